use std::path::{Path, PathBuf};
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/cavityshare.h");

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "cavityshare.h"

int main(void) {
    CsModel *m = NULL;
    if (cs_model_new(1.0, 0.0, 0.0, &m) != CS_STATUS_OK) return 1;
    CsInitial init = { CS_INIT_KIND_BELL_THETA, 0.75 * M_PI, {0}, {0} };
    double ys = 0.0;
    if (cs_ys_dynamic(m, &init, 1.3, &ys) != CS_STATUS_OK || fabs(ys - 2.0) > 1e-12) return 2;

    CsIntervals *iv = NULL;
    CsInitial cavity = { CS_INIT_KIND_CAVITY_EXCITED, 0.0, {0}, {0} };
    if (cs_detect(m, &cavity, 0.0, 2.0, 1e-9, 2.0 / 2048.0, &iv) != CS_STATUS_OK) return 3;
    double s, e;
    CsFreezeKind k;
    if (cs_intervals_get(iv, 1, &s, &e, &k) != CS_STATUS_OK || k != CS_FREEZE_KIND_FROZEN) return 4;
    cs_intervals_free(iv);

    double block[16];
    size_t dim;
    if (cs_build_block(m, -2, block, 16, &dim) != CS_STATUS_INVALID_ARGUMENT) return 5;
    if (cs_last_error() == NULL) return 6;
    cs_model_free(m);
    printf("%.12f %.12f\n", s, e);
    return 0;
}
"#;

fn lib_dir() -> PathBuf {
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(HEADER).expect("header is generated by build.rs");
    for decl in [
        "typedef struct CsModel CsModel;",
        "typedef struct CsIntervals CsIntervals;",
        "typedef struct CsSweepGrid CsSweepGrid;",
        "CS_STATUS_OK = 0",
        "CS_STATUS_NULL_POINTER = 1",
        "CS_STATUS_INVALID_ARGUMENT = 2",
        "CS_STATUS_NOT_NORMALIZED = 3",
        "CS_STATUS_OUT_OF_RANGE = 4",
        "CS_STATUS_PANIC = 5",
        "const char *cs_last_error(void);",
        "double cs_ys_class1(double tau);",
        "double cs_ys_class2(double theta, double tau);",
    ] {
        assert!(header.contains(decl), "missing `{decl}`");
    }
    for f in [
        "cs_model_new",
        "cs_model_free",
        "cs_model_big_g",
        "cs_model_time_from_tau",
        "cs_evolve",
        "cs_entanglement",
        "cs_ys_dynamic",
        "cs_detect",
        "cs_intervals_len",
        "cs_intervals_get",
        "cs_intervals_free",
        "cs_sweep",
        "cs_sweep_rows",
        "cs_sweep_cols",
        "cs_sweep_values",
        "cs_sweep_value",
        "cs_sweep_free",
        "cs_build_block",
    ] {
        let declared = header.contains(&format!(" {f}(")) || header.contains(&format!("*{f}("));
        assert!(declared, "missing `{f}`");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = lib_dir().join("libcavityshare_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = Path::new(HEADER).parent().unwrap();
    let status = Command::new("cc")
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "0.499999999841 1.500000000159"
    );
}
