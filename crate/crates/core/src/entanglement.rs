//! One-to-other entanglement of the three qubits (cavity, atom 1, atom 2)
//! measured by the normalized Schmidt weight `Y = 1 − √(2/K − 1)`, and the
//! sharing inequalities that constrain it on the single-excitation manifold.

use num_complex::Complex64 as C64;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::dynamics::AmplitudeState;
use crate::error::{Error, Result};

/// Tolerance on the squared norm of states handed to the measures. States
/// within it are renormalized first.
pub const STATE_NORM_TOL: f64 = 1e-8;

/// Slack allowed on `μ₁ + μ₂ = 1` and on the `K ∈ [1, 2]` domain.
const PROB_TOL: f64 = 1e-10;

/// The two eigenvalues of a qubit's reduced density matrix, `mu1 ≥ mu2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtPair {
    mu1: f64,
    mu2: f64,
}

impl SchmidtPair {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        let ok = |m: f64| m.is_finite() && (-PROB_TOL..=1.0 + PROB_TOL).contains(&m);
        if !ok(mu1) || !ok(mu2) {
            return Err(Error::param(
                "mu",
                format!("eigenvalues must lie in [0, 1], got ({mu1}, {mu2})"),
            ));
        }
        if (mu1 + mu2 - 1.0).abs() > PROB_TOL {
            return Err(Error::param(
                "mu",
                format!("eigenvalues must sum to 1, got {}", mu1 + mu2),
            ));
        }
        let (hi, lo) = if mu1 >= mu2 { (mu1, mu2) } else { (mu2, mu1) };
        Ok(SchmidtPair {
            mu1: hi.clamp(0.0, 1.0),
            mu2: lo.clamp(0.0, 1.0),
        })
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }
}

/// Schmidt weight `K = 1/(μ₁² + μ₂²)`, in `[1, 2]` for a qubit.
///
/// The purity is accumulated with its rounding error so that `K` is close to
/// correctly rounded; near `K = 2` every lost bit shows up amplified in `Y`.
pub fn schmidt_weight(pair: &SchmidtPair) -> f64 {
    let (p1, p2) = (pair.mu1 * pair.mu1, pair.mu2 * pair.mu2);
    let e1 = pair.mu1.mul_add(pair.mu1, -p1);
    let e2 = pair.mu2.mul_add(pair.mu2, -p2);
    let hi = p1 + p2;
    let lo = (p1 - hi) + p2 + e1 + e2;
    let k = 1.0 / hi;
    // one Newton step on k·(hi + lo) = 1
    k + k * (-k).mul_add(hi, 1.0) - k * k * lo
}

/// Normalized Schmidt weight `Y = 1 − √(2/K − 1)`.
pub fn y_from_k(k: f64) -> Result<f64> {
    if !k.is_finite() || !(1.0 - PROB_TOL..=2.0 + PROB_TOL).contains(&k) {
        return Err(Error::param(
            "k",
            format!("Schmidt weight must lie in [1, 2], got {k}"),
        ));
    }
    let k = k.clamp(1.0, 2.0);
    Ok(1.0 - ((2.0 - k) / k).sqrt())
}

/// `Y = 1 − √(1 − C²)` for concurrence `C`.
pub fn y_from_concurrence(c: f64) -> Result<f64> {
    if !c.is_finite() || !(0.0..=1.0).contains(&c) {
        return Err(Error::param(
            "c",
            format!("concurrence must lie in [0, 1], got {c}"),
        ));
    }
    Ok(1.0 - ((1.0 - c) * (1.0 + c)).sqrt())
}

/// `(Y₀, Y₁, Y₂)`: each party against the other two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementTriple {
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
}

impl EntanglementTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.y0, self.y1, self.y2]
    }

    /// `Y_S = Y₀ + Y₁ + Y₂`.
    pub fn y_sum(&self) -> f64 {
        self.y0 + self.y1 + self.y2
    }
}

fn normalized_populations(state: &AmplitudeState) -> Result<[f64; 3]> {
    let pops = state.populations();
    let norm: f64 = pops.iter().sum();
    if !norm.is_finite() || (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: norm });
    }
    Ok(pops.map(|p| p / norm))
}

fn normalized_amplitudes(state: &AmplitudeState) -> Result<[C64; 3]> {
    let norm = normalized_populations(state).map(|_| state.norm_sqr())?;
    let scale = norm.sqrt().recip();
    Ok(state.amplitudes.map(|a| a * scale))
}

/// One-to-other entanglements from the populations alone:
/// `Y_i = 2 min(|a_i|², 1 − |a_i|²)`.
pub fn one_to_other(state: &AmplitudeState) -> Result<EntanglementTriple> {
    let p = normalized_populations(state)?;
    let y = |own: f64, rest: f64| 2.0 * own.min(rest);
    Ok(EntanglementTriple {
        y0: y(p[0], p[1] + p[2]),
        y1: y(p[1], p[0] + p[2]),
        y2: y(p[2], p[0] + p[1]),
    })
}

/// Three-qubit state vector, index `4·n_cavity + 2·s_atom1 + s_atom2`.
pub fn three_qubit_vector(state: &AmplitudeState) -> Result<[C64; 8]> {
    let [a0, a1, a2] = normalized_amplitudes(state)?;
    let mut psi = [C64::new(0.0, 0.0); 8];
    psi[0b100] = a0;
    psi[0b010] = a1;
    psi[0b001] = a2;
    Ok(psi)
}

fn bit_of(party: usize) -> usize {
    2 - party
}

fn check_party(party: usize) -> Result<()> {
    if party > 2 {
        return Err(Error::InvalidParty(party));
    }
    Ok(())
}

/// Reduced density matrix of one party, obtained by tracing the other two
/// out of the eight-dimensional state vector.
pub fn reduced_density_matrix(state: &AmplitudeState, party: usize) -> Result<[[C64; 2]; 2]> {
    check_party(party)?;
    let psi = three_qubit_vector(state)?;
    let bit = bit_of(party);
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (x, &amp_x) in psi.iter().enumerate() {
        for (y, &amp_y) in psi.iter().enumerate() {
            // environment bits must agree
            if (x ^ y) & !(1 << bit) != 0 {
                continue;
            }
            rho[(x >> bit) & 1][(y >> bit) & 1] += amp_x * amp_y.conj();
        }
    }
    Ok(rho)
}

/// Eigenvalues of a party's reduced density matrix in closed form,
/// `μ = (tr ± √((ρ₀₀ − ρ₁₁)² + 4|ρ₀₁|²))/2`.
///
/// The discriminant is built from the diagonal difference instead of
/// `tr² − 4 det`, which cancels catastrophically near `μ₁ = μ₂`.
pub fn reduced_eigenvalues(state: &AmplitudeState, party: usize) -> Result<SchmidtPair> {
    let rho = reduced_density_matrix(state, party)?;
    let (d0, d1) = (rho[0][0].re, rho[1][1].re);
    let tr = d0 + d1;
    let disc = (d0 - d1).hypot(2.0 * rho[0][1].norm());
    SchmidtPair::new(0.5 * (tr + disc), 0.5 * (tr - disc).max(0.0))
}

/// `Y` of one party by the long route: partial trace, eigenvalues, `K`,
/// `1 − √(2/K − 1)`, all in double-double arithmetic.
///
/// In plain `f64` the last step is ill-conditioned at `μ₁ ≈ μ₂`: rounding
/// `K` near 2 leaves an error of about `10⁻¹⁶/(μ₁ − μ₂)` in `Y`. The extra
/// precision moves that floor far below anything `f64` inputs can resolve.
pub fn schmidt_route_y(state: &AmplitudeState, party: usize) -> Result<f64> {
    check_party(party)?;
    normalized_populations(state)?;
    let bit = bit_of(party);
    let mut psi = [(0.0, 0.0); 8];
    psi[0b100] = (state.a0().re, state.a0().im);
    psi[0b010] = (state.a1().re, state.a1().im);
    psi[0b001] = (state.a2().re, state.a2().im);

    let zero = TwoFloat::from(0.0);
    let (mut d, mut off_re, mut off_im) = ([zero; 2], zero, zero);
    for (x, &(xr, xi)) in psi.iter().enumerate() {
        for (y, &(yr, yi)) in psi.iter().enumerate() {
            if (x ^ y) & !(1 << bit) != 0 {
                continue;
            }
            // ψ_x ψ_y*
            let re = TwoFloat::new_mul(xr, yr) + TwoFloat::new_mul(xi, yi);
            let im = TwoFloat::new_mul(xi, yr) - TwoFloat::new_mul(xr, yi);
            match ((x >> bit) & 1, (y >> bit) & 1) {
                (r, c) if r == c => d[r] += re,
                (0, 1) => {
                    off_re += re;
                    off_im += im;
                }
                _ => {}
            }
        }
    }
    let tr = d[0] + d[1];
    let diff = d[0] - d[1];
    let disc = (diff * diff + 4.0 * (off_re * off_re + off_im * off_im)).sqrt();
    let (mu1, mu2) = (div(tr + disc, 2.0 * tr), div(tr - disc, 2.0 * tr));
    let k = div(TwoFloat::from(1.0), mu1 * mu1 + mu2 * mu2);
    let radicand = div(TwoFloat::from(2.0) - k, k);
    let root = if radicand.hi() > 0.0 {
        radicand.sqrt()
    } else {
        zero
    };
    Ok(f64::from(TwoFloat::from(1.0) - root))
}

// `TwoFloat / TwoFloat` can return a bare f64 quotient when the divisor has
// no low word; one correction step through the exact `/ f64` path fixes it.
fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b;
    q + (a - q * b) / b.hi()
}

/// Two-qubit reduced density matrix of parties `(i, j)` in the basis
/// `|s_i s_j>` with index `2·s_i + s_j`.
pub fn pair_density_matrix(state: &AmplitudeState, i: usize, j: usize) -> Result<[[C64; 4]; 4]> {
    check_party(i)?;
    check_party(j)?;
    if i == j {
        return Err(Error::SameParty(i, j));
    }
    let psi = three_qubit_vector(state)?;
    let (bi, bj) = (bit_of(i), bit_of(j));
    let kept = (1 << bi) | (1 << bj);
    let local = |x: usize| (((x >> bi) & 1) << 1) | ((x >> bj) & 1);
    let mut rho = [[C64::new(0.0, 0.0); 4]; 4];
    for (x, &amp_x) in psi.iter().enumerate() {
        for (y, &amp_y) in psi.iter().enumerate() {
            if (x ^ y) & !kept & 0b111 != 0 {
                continue;
            }
            rho[local(x)][local(y)] += amp_x * amp_y.conj();
        }
    }
    Ok(rho)
}

/// Concurrence of the two-qubit reduced state of parties `i` and `j`.
///
/// On the single-excitation manifold the reduced state is
/// `|a_k|² |00><00| + |ψ_ij><ψ_ij|` with `ψ_ij = a_i|10> + a_j|01>`, whose
/// concurrence is `2|a_i||a_j|`.
pub fn pairwise_concurrence(state: &AmplitudeState, i: usize, j: usize) -> Result<f64> {
    check_party(i)?;
    check_party(j)?;
    if i == j {
        return Err(Error::SameParty(i, j));
    }
    let p = normalized_populations(state)?;
    Ok(2.0 * (p[i] * p[j]).sqrt())
}

/// Concurrence between party `i` and the other two as one block,
/// `2|a_i|√(|a_j|² + |a_k|²)`.
pub fn one_to_other_concurrence(state: &AmplitudeState, i: usize) -> Result<f64> {
    check_party(i)?;
    let p = normalized_populations(state)?;
    let rest: f64 = (0..3).filter(|&k| k != i).map(|k| p[k]).sum();
    Ok(2.0 * (p[i] * rest).sqrt())
}

/// One CKW inequality `C²_ij + C²_ik ≤ C²_i(jk)` for a focal party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyCheck {
    pub party: usize,
    /// `C²_i(jk) − C²_ij − C²_ik`.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyReport {
    pub checks: [MonogamyCheck; 3],
}

impl MonogamyReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Slack below which a monogamy inequality counts as violated.
pub const MONOGAMY_TOL: f64 = 1e-12;

pub fn check_monogamy(state: &AmplitudeState) -> Result<MonogamyReport> {
    let mut checks = [MonogamyCheck {
        party: 0,
        slack: 0.0,
        holds: true,
    }; 3];
    for (i, check) in checks.iter_mut().enumerate() {
        let whole = one_to_other_concurrence(state, i)?.powi(2);
        let pairs: f64 = (0..3)
            .filter(|&j| j != i)
            .map(|j| pairwise_concurrence(state, i, j).map(|c| c * c))
            .sum::<Result<f64>>()?;
        let slack = whole - pairs;
        *check = MonogamyCheck {
            party: i,
            slack,
            holds: slack >= -MONOGAMY_TOL,
        };
    }
    Ok(MonogamyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Frame;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn state(a: [f64; 3]) -> AmplitudeState {
        AmplitudeState::new(a.map(|x| C64::new(x, 0.0)), Frame::Full, 0.0)
    }

    #[test]
    fn schmidt_weight_examples() {
        assert_eq!(schmidt_weight(&SchmidtPair::new(1.0, 0.0).unwrap()), 1.0);
        assert_eq!(schmidt_weight(&SchmidtPair::new(0.5, 0.5).unwrap()), 2.0);
        assert_abs_diff_eq!(
            schmidt_weight(&SchmidtPair::new(0.75, 0.25).unwrap()),
            1.6,
            epsilon = 1e-15
        );
    }

    #[test]
    fn schmidt_pair_validation() {
        assert!(SchmidtPair::new(0.7, 0.2).is_err());
        assert!(SchmidtPair::new(1.2, -0.2).is_err());
        let p = SchmidtPair::new(0.25, 0.75).unwrap();
        assert_eq!((p.mu1(), p.mu2()), (0.75, 0.25));
    }

    #[test]
    fn y_from_k_examples() {
        assert_eq!(y_from_k(1.0).unwrap(), 0.0);
        assert_eq!(y_from_k(2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(y_from_k(1.6).unwrap(), 0.5, epsilon = 1e-15);
        assert!(y_from_k(0.9).is_err());
        assert!(y_from_k(2.1).is_err());
        assert!(y_from_k(f64::NAN).is_err());
    }

    #[test]
    fn y_from_concurrence_examples() {
        assert_eq!(y_from_concurrence(0.0).unwrap(), 0.0);
        assert_eq!(y_from_concurrence(1.0).unwrap(), 1.0);
        let y = y_from_concurrence(3f64.sqrt() / 2.0).unwrap();
        assert_abs_diff_eq!(y, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(y, y_from_k(1.6).unwrap(), epsilon = 1e-15);
        assert!(y_from_concurrence(-0.1).is_err());
        assert!(y_from_concurrence(1.1).is_err());
    }

    #[test]
    fn one_to_other_examples() {
        let t = one_to_other(&state([1.0, 0.0, 0.0])).unwrap();
        assert_eq!(t.as_array(), [0.0, 0.0, 0.0]);

        let t = one_to_other(&state([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        assert_abs_diff_eq!(t.y0, 0.0);
        assert_abs_diff_eq!(t.y1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.y2, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.y_sum(), 2.0, epsilon = 1e-15);

        let t = one_to_other(&state([FRAC_1_SQRT_2, 0.5, 0.5])).unwrap();
        assert_abs_diff_eq!(t.y0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.y1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.y2, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.y_sum(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn one_to_other_rejects_unnormalized() {
        assert!(matches!(
            one_to_other(&state([1.0, 0.5, 0.0])),
            Err(Error::NotNormalized { .. })
        ));
        // within tolerance: renormalized silently
        let t = one_to_other(&state([(1.0f64 + 1e-9).sqrt(), 0.0, 0.0])).unwrap();
        assert_eq!(t.y_sum(), 0.0);
    }

    #[test]
    fn reduced_eigenvalue_examples() {
        let p = reduced_eigenvalues(&state([1.0, 0.0, 0.0]), 0).unwrap();
        assert_eq!((p.mu1(), p.mu2()), (1.0, 0.0));
        let p = reduced_eigenvalues(&state([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]), 1).unwrap();
        assert_abs_diff_eq!(p.mu1(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mu2(), 0.5, epsilon = 1e-15);
        let p = reduced_eigenvalues(&state([FRAC_1_SQRT_2, 0.5, 0.5]), 2).unwrap();
        assert_abs_diff_eq!(p.mu1(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mu2(), 0.25, epsilon = 1e-15);
        assert!(matches!(
            reduced_eigenvalues(&state([1.0, 0.0, 0.0]), 3),
            Err(Error::InvalidParty(3))
        ));
    }

    #[test]
    fn reduced_matrix_is_diagonal_with_populations() {
        let s = AmplitudeState::new(
            [
                C64::new(0.6, 0.0),
                C64::new(0.0, 0.48),
                C64::new(-0.64, 0.0),
            ],
            Frame::Slow,
            0.0,
        );
        let rho = reduced_density_matrix(&s, 1).unwrap();
        assert_abs_diff_eq!(rho[1][1].re, 0.48 * 0.48, epsilon = 1e-15);
        assert_abs_diff_eq!(rho[0][0].re, 1.0 - 0.48 * 0.48, epsilon = 1e-15);
        assert_eq!(rho[0][1], C64::new(0.0, 0.0));
    }

    #[test]
    fn pair_matrix_has_unit_trace() {
        let s = AmplitudeState::new(
            [
                C64::new(0.6, 0.0),
                C64::new(0.0, 0.48),
                C64::new(-0.64, 0.0),
            ],
            Frame::Slow,
            0.0,
        );
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let rho = pair_density_matrix(&s, i, j).unwrap();
            let tr: f64 = (0..4).map(|k| rho[k][k].re).sum();
            assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-15);
            // |00> carries the population of the traced party
            let k = 3 - i - j;
            assert_abs_diff_eq!(rho[0][0].re, s.populations()[k], epsilon = 1e-15);
        }
        assert!(matches!(
            pair_density_matrix(&s, 1, 1),
            Err(Error::SameParty(1, 1))
        ));
    }

    #[test]
    fn pairwise_concurrence_examples() {
        assert_abs_diff_eq!(
            pairwise_concurrence(&state([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]), 1, 2).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(
                pairwise_concurrence(&state([1.0, 0.0, 0.0]), i, j).unwrap(),
                0.0
            );
        }
        assert_abs_diff_eq!(
            pairwise_concurrence(&state([FRAC_1_SQRT_2, 0.5, 0.5]), 0, 1).unwrap(),
            FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert!(matches!(
            pairwise_concurrence(&state([1.0, 0.0, 0.0]), 2, 2),
            Err(Error::SameParty(2, 2))
        ));
    }

    #[test]
    fn monogamy_examples() {
        let r = check_monogamy(&state([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        assert!(r.all_hold());
        assert_abs_diff_eq!(r.checks[1].slack, 0.0, epsilon = 1e-15);
        let r = check_monogamy(&state([1.0, 0.0, 0.0])).unwrap();
        assert!(r.all_hold());
        assert!(r.checks.iter().all(|c| c.slack == 0.0));
    }

    #[test]
    fn long_route_near_balanced_party() {
        // cavity population 1/2 − 1e-7: the f64 route is off by ~1e-9 here
        let p0: f64 = 0.5 - 1e-7;
        let rest = ((1.0 - p0) / 2.0).sqrt();
        let s = AmplitudeState::new(
            [
                C64::new(p0.sqrt(), 0.0),
                C64::new(0.0, rest),
                C64::new(rest, 0.0),
            ],
            Frame::Slow,
            0.0,
        );
        let fast = one_to_other(&s).unwrap();
        for party in 0..3 {
            assert_abs_diff_eq!(
                schmidt_route_y(&s, party).unwrap(),
                fast.as_array()[party],
                epsilon = 1e-14
            );
        }
        assert!(schmidt_route_y(&s, 3).is_err());
    }
}
