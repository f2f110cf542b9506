#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, Matrix4, SymmetricEigen};

pub type C = Complex<f64>;

/// `σ_y ⊗ σ_y` in the basis |00>, |01>, |10>, |11>.
pub fn spin_flip() -> Matrix4<C> {
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    Matrix4::new(
        z, z, z, -one, //
        z, z, one, z, //
        z, one, z, z, //
        -one, z, z, z,
    )
}

pub fn to_matrix(rho: &[[C; 4]; 4]) -> Matrix4<C> {
    Matrix4::from_fn(|i, j| rho[i][j])
}

/// General two-qubit mixed-state concurrence.
///
/// Decomposes `ρ = Σ v_k v_k†` over its numerically non-zero eigenvalues;
/// the singular values of `τ_kl = v_kᵀ (σ_y⊗σ_y) v_l` are the square roots of
/// the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, and
/// `C = max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn wootters_concurrence(rho: &Matrix4<C>) -> f64 {
    let eig = SymmetricEigen::new(*rho);
    let pmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let kept: Vec<_> = (0..4)
        .filter(|&k| eig.eigenvalues[k] > 1e-12 * pmax)
        .collect();
    let flip = spin_flip();
    let vs: Vec<_> = kept
        .iter()
        .map(|&k| eig.eigenvectors.column(k).into_owned() * C::new(eig.eigenvalues[k].sqrt(), 0.0))
        .collect();
    let n = vs.len();
    let tau = DMatrix::from_fn(n, n, |k, l| (vs[k].transpose() * flip * vs[l])[(0, 0)]);
    let mut sv: Vec<f64> = tau
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let first = sv.first().copied().unwrap_or(0.0);
    (first - sv.iter().skip(1).sum::<f64>()).max(0.0)
}

/// Eigenvalues of `R = ρ ρ̃` (complex Schur form), sorted descending by real part.
pub fn spin_flip_spectrum(rho: &Matrix4<C>) -> Vec<C> {
    let flip = spin_flip();
    let tilde = flip * rho.map(|z| z.conj()) * flip;
    let r = rho * tilde;
    let mut ev: Vec<C> = r
        .schur()
        .eigenvalues()
        .expect("triangular Schur form")
        .iter()
        .cloned()
        .collect();
    ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    ev
}

/// Bisection root of a continuous function with a sign change on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
