use std::f64::consts::PI;

use cavityshare::analysis::ys_dynamic;
use cavityshare::dynamics::{evolve_analytic, AmplitudeState, Frame, InitialCondition};
use cavityshare::entanglement::{
    one_to_other, schmidt_weight, y_from_concurrence, y_from_k, SchmidtPair,
};
use cavityshare::model::{build_block, verify_excitation_conservation, ModelParams};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn amplitudes() -> impl Strategy<Value = [C64; 3]> {
    prop::array::uniform6(-1.0f64..1.0)
        .prop_filter("non-degenerate", |v| {
            v.iter().map(|x| x * x).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            [
                C64::new(v[0], v[1]) / n,
                C64::new(v[2], v[3]) / n,
                C64::new(v[4], v[5]) / n,
            ]
        })
}

fn initial() -> impl Strategy<Value = InitialCondition> {
    prop_oneof![
        Just(InitialCondition::CavityExcited),
        (0.0f64..2.0 * PI).prop_map(InitialCondition::BellTheta),
        amplitudes().prop_map(|[a, b, c]| InitialCondition::general(a, b, c).unwrap()),
    ]
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.1f64..3.0, -5.0f64..5.0, -3.0f64..3.0)
        .prop_map(|(g, w, d)| ModelParams::with_detuning(g, w, d).unwrap())
}

fn resonant_params() -> impl Strategy<Value = ModelParams> {
    (0.1f64..3.0, -5.0f64..5.0).prop_map(|(g, w)| ModelParams::resonant(g, w).unwrap())
}

proptest! {
    #[test]
    fn blocks_are_symmetric_with_printed_couplings(m in 2u32..=50, p in params()) {
        let b = build_block(m, &p);
        prop_assert!(b.is_symmetric());
        prop_assert_eq!(b.dim(), 4);
        let (lower, upper) = ((f64::from(m) - 1.0).sqrt() * p.g(), f64::from(m).sqrt() * p.g());
        prop_assert_eq!(b.entry(0, 1), lower);
        prop_assert_eq!(b.entry(0, 2), lower);
        prop_assert_eq!(b.entry(1, 3), upper);
        prop_assert_eq!(b.entry(2, 3), upper);
        prop_assert_eq!(b.entry(0, 3), 0.0);
        prop_assert_eq!(b.entry(1, 2), 0.0);
        prop_assert!(b.basis().iter().all(|k| k.excitations() == m));
    }

    #[test]
    fn excitation_number_is_conserved(m in 0u32..=10, p in params()) {
        prop_assert!(verify_excitation_conservation(m, &p));
    }

    #[test]
    fn analytic_evolution_preserves_norm(init in initial(), p in params(), t in 0.0f64..50.0) {
        let s = evolve_analytic(&init, &p, t);
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn antisymmetric_part_is_conserved(init in initial(), p in params(), t in 0.0f64..50.0) {
        let [_, c1, c2] = init.amplitudes();
        let s = evolve_analytic(&init, &p, t);
        prop_assert!(((s.a1() - s.a2()) - (c1 - c2)).norm() <= 1e-12);
    }

    #[test]
    fn resonant_swap_antiperiodicity(init in initial(), p in resonant_params(), tau in 0.0f64..8.0) {
        let now = evolve_analytic(&init, &p, p.time_from_tau(tau));
        let later = evolve_analytic(&init, &p, p.time_from_tau(tau + 2.0));
        prop_assert!((later.a1() + now.a2()).norm() <= 1e-10);
        prop_assert!((later.a2() + now.a1()).norm() <= 1e-10);
        prop_assert!((later.a0() + now.a0()).norm() <= 1e-10);
        let far = evolve_analytic(&init, &p, p.time_from_tau(tau + 4.0));
        for (x, y) in far.populations().iter().zip(now.populations()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn sharing_bounds(a in amplitudes()) {
        let s = AmplitudeState::new(a, Frame::Slow, 0.0);
        let y = one_to_other(&s).unwrap();
        let [y0, y1, y2] = y.as_array();
        prop_assert!(y.y_sum() <= 2.0 + 1e-12);
        for (i, j, k) in [(y0, y1, y2), (y1, y0, y2), (y2, y0, y1)] {
            prop_assert!((0.0..=1.0).contains(&i));
            prop_assert!(i <= j + k + 1e-12);
        }
    }

    #[test]
    fn measure_routes_agree(mu in 0.0f64..=1.0) {
        let pair = SchmidtPair::new(mu, 1.0 - mu).unwrap();
        let via_k = y_from_k(schmidt_weight(&pair)).unwrap();
        let via_c = y_from_concurrence(2.0 * (pair.mu1() * pair.mu2()).sqrt()).unwrap();
        // both reduce to 2·min(μ₁, μ₂); near μ = 1/2 the √ amplifies rounding
        let d = (pair.mu1() - pair.mu2()).max(1e-8);
        prop_assert!((via_k - via_c).abs() <= 1e-15 / d + 1e-14);
        prop_assert!((via_k - 2.0 * pair.mu2()).abs() <= 1e-15 / d + 1e-14);
    }

    #[test]
    fn dynamic_ys_stays_in_range(init in initial(), p in params(), tau in 0.0f64..10.0) {
        let y = ys_dynamic(&init, &p, tau).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&y));
    }
}

#[test]
fn measure_routes_agree_on_grid() {
    for k in 0..=1000 {
        let mu = f64::from(k) / 1000.0;
        let pair = SchmidtPair::new(mu, 1.0 - mu).unwrap();
        let via_k = y_from_k(schmidt_weight(&pair)).unwrap();
        let via_c = y_from_concurrence(2.0 * (pair.mu1() * pair.mu2()).sqrt()).unwrap();
        assert!(
            (via_k - via_c).abs() <= 1e-12,
            "mu = {mu}: {via_k} vs {via_c}"
        );
    }
}

/// Brute force over a dense simplex grid: `Y_S = 2` exactly when no
/// population exceeds 1/2, and the shares then follow the populations.
#[test]
fn saturation_characterization_on_simplex() {
    let n = 400;
    let mut saturated = 0;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let p = [
                i as f64 / n as f64,
                j as f64 / n as f64,
                (n - i - j) as f64 / n as f64,
            ];
            let s = AmplitudeState::new(p.map(|x| C64::new(x.sqrt(), 0.0)), Frame::Full, 0.0);
            let y = one_to_other(&s).unwrap();
            let pmax = p.iter().cloned().fold(0.0, f64::max);
            let full = (y.y_sum() - 2.0).abs() <= 1e-12;
            assert_eq!(
                full,
                pmax <= 0.5 + 1e-12,
                "populations {p:?}, Y_S = {}",
                y.y_sum()
            );
            if full {
                saturated += 1;
                for (yi, pi) in y.as_array().iter().zip(p) {
                    assert!((yi / y.y_sum() - pi).abs() <= 1e-10);
                }
            }
        }
    }
    assert!(saturated > 0);
}

#[test]
fn volume_bound_is_attained() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let witness = AmplitudeState::new(
        [C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(h, 0.0)],
        Frame::Full,
        0.0,
    );
    assert!((one_to_other(&witness).unwrap().y_sum() - 2.0).abs() < 1e-15);
}
