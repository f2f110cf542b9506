//! Independent oracles: mixed-state concurrence, finite differences,
//! characteristic polynomials and brute-force roots.

mod common;

use std::f64::consts::{PI, SQRT_2};

use cavityshare::analysis::{theta0_boundaries, ys_class2};
use cavityshare::dynamics::{evolve_analytic, InitialCondition};
use cavityshare::entanglement::{
    one_to_other_concurrence, pair_density_matrix, pairwise_concurrence,
};
use cavityshare::model::{build_block, ModelParams};
use cavityshare::verify::{random_initial, random_state};
use common::{bisect, spin_flip_spectrum, to_matrix, wootters_concurrence};
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn pairwise_closed_form_matches_mixed_state_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let state = random_state(&mut rng);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let rho = to_matrix(&pair_density_matrix(&state, i, j).unwrap());
            let oracle = wootters_concurrence(&rho);
            let closed = pairwise_concurrence(&state, i, j).unwrap();
            worst = worst.max((oracle - closed).abs());
        }
    }
    assert!(worst <= 1e-10, "worst deviation {worst:e}");
}

#[test]
fn oracle_singular_values_match_spin_flip_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let state = random_state(&mut rng);
        let rho = to_matrix(&pair_density_matrix(&state, 0, 2).unwrap());
        let ev = spin_flip_spectrum(&rho);
        // rank-one R: the largest eigenvalue is C², the rest vanish
        let c = pairwise_concurrence(&state, 0, 2).unwrap();
        assert!((ev[0].re - c * c).abs() < 1e-12, "{ev:?}");
        assert!(ev[1..].iter().all(|z| z.norm() < 1e-12), "{ev:?}");
    }
}

#[test]
fn oracle_reproduces_known_concurrences() {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // Bell state (|01> + |10>)/√2
    let mut bell = [[z; 4]; 4];
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        bell[i][j] = h * h;
    }
    assert!((wootters_concurrence(&to_matrix(&bell)) - 1.0).abs() < 1e-12);
    // maximally mixed state is separable
    let mut mixed = [[z; 4]; 4];
    for (k, row) in mixed.iter_mut().enumerate() {
        row[k] = C64::new(0.25, 0.0);
    }
    assert!(wootters_concurrence(&to_matrix(&mixed)) < 1e-12);
}

#[test]
fn one_to_other_concurrence_is_pure_state_formula() {
    // pure bipartite state: C = 2√(det ρ_i) = 2√(μ₁μ₂)
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let p = s.populations();
        for (i, pi) in p.into_iter().enumerate() {
            let expect = 2.0 * (pi * (1.0 - pi)).sqrt();
            assert!((one_to_other_concurrence(&s, i).unwrap() - expect).abs() < 1e-14);
        }
    }
}

#[test]
fn analytic_amplitudes_solve_the_equations_of_motion() {
    // central differences of the closed form against the slow-frame ODE
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let h = 1e-5;
    let i = C64::new(0.0, 1.0);
    for _ in 0..30 {
        let init = random_initial(&mut rng);
        let p = ModelParams::with_detuning(rng.gen_range(0.3..2.0), 1.0, rng.gen_range(-3.0..3.0))
            .unwrap();
        let t = rng.gen_range(0.1..10.0);
        let plus = evolve_analytic(&init, &p, t + h).amplitudes;
        let minus = evolve_analytic(&init, &p, t - h).amplitudes;
        let now = evolve_analytic(&init, &p, t).amplitudes;
        let deriv: Vec<C64> = plus
            .iter()
            .zip(minus)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        let rot = C64::from_polar(1.0, p.delta() * t);
        let rhs = [
            -i * p.g() * (now[1] + now[2]) * rot.conj(),
            -i * p.g() * now[0] * rot,
            -i * p.g() * now[0] * rot,
        ];
        for (d, r) in deriv.iter().zip(rhs) {
            assert!((d - r).norm() < 1e-7, "{d} vs {r}");
        }
    }
}

#[test]
fn single_excitation_block_spectrum() {
    // [[0,0,g],[0,0,g],[g,g,0]] has characteristic polynomial λ³ − 2g²λ
    let g = 1.7;
    let w0 = 3.0;
    let p = ModelParams::resonant(g, w0).unwrap();
    let b = build_block(1, &p);
    let shifted = Matrix3::from_fn(|r, c| b.entry(r, c) - if r == c { w0 } else { 0.0 });
    let mut ev: Vec<f64> = SymmetricEigen::new(shifted)
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let expect = [-SQRT_2 * g, 0.0, SQRT_2 * g];
    for (x, y) in ev.iter().zip(expect) {
        assert!((x - y).abs() < 1e-12);
        assert!((x.powi(3) - 2.0 * g * g * x).abs() < 1e-10);
    }
}

#[test]
fn theta0_freezing_root_by_bisection() {
    // first branch meets 2 where −c² − 2c + 1 = 0, c = cos(Gt/2)
    let c = bisect(|c| -c * c - 2.0 * c + 1.0, 0.0, 1.0);
    assert!((c - (SQRT_2 - 1.0)).abs() < 1e-15);
    let tau1 = 2.0 * c.acos() / PI;
    let (ref1, ref2) = theta0_boundaries();
    assert!((tau1 - ref1).abs() < 1e-14);
    // 30-digit reference: 2·acos(√2 − 1)/π = 0.728113327547753426096…
    assert!((ref1 - 0.728_113_327_547_753_4).abs() < 1e-15);
    assert!((ref2 - (2.0 - ref1)).abs() < 1e-15);
    // and the printed two-atom formula reaches 2 there
    assert!((ys_class2(0.0, tau1) - 2.0).abs() < 1e-14);
}

#[test]
fn bell_initial_condition_expansion() {
    let theta = 0.37;
    let a = InitialCondition::BellTheta(theta).amplitudes();
    assert_eq!(a[0], C64::new(0.0, 0.0));
    assert_eq!(a[1], C64::new(theta.cos(), 0.0));
    assert_eq!(a[2], C64::new(theta.sin(), 0.0));
}
