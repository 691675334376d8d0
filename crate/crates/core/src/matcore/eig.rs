//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slower than tridiagonal QL for large `n` but every matrix in
//! this crate has `n <= 64`, and Jacobi delivers eigenvectors that are
//! orthonormal to working precision without a separate reorthogonalization.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::Result;
use crate::scalar::Real;

/// Relative threshold below which an eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// `A = U diag(values) U^H` with `values` ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// Eigenvector for the `k`-th smallest eigenvalue.
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.col(k)
    }

    /// Number of eigenvalues above `RANK_TOL * max(|lambda|)`.
    pub fn rank(&self) -> usize {
        let scale = self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if scale == T::zero() {
            return 0;
        }
        let tol = T::lit(RANK_TOL) * scale;
        self.values.iter().filter(|&&v| v > tol).count()
    }

    /// `U f(Lambda) U^H`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.dim();
        let u = &self.vectors;
        let fl: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::zero();
                for (k, &w) in fl.iter().enumerate() {
                    if w != T::zero() {
                        acc += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = T::zero();
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply(|v| v)
    }

    /// Principal square root with negative eigenvalues clamped to zero.
    pub fn psd_sqrt(&self) -> ComplexMatrix<T> {
        self.apply(|v| v.max(T::zero()).sqrt())
    }

    /// Factor `W` with `W W^H = A` keeping only eigenvalues above the rank
    /// threshold; columns ordered by descending eigenvalue.
    pub fn low_rank_factor(&self) -> ComplexMatrix<T> {
        let r = self.rank();
        let n = self.dim();
        ComplexMatrix::from_fn(n, r, |i, j| {
            let k = n - 1 - j;
            self.vectors[(i, k)].scale(self.values[k].sqrt())
        })
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is replaced by its Hermitian part `(A + A^H)/2` before
/// factoring. Eigenvalues are returned in ascending order.
pub fn hermitian_eig<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEig<T>> {
    a.ensure_square("hermitian_eig input")?;
    a.ensure_finite("hermitian_eig input")?;
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let norm2 = m.fro_norm_sqr();
    if norm2 == T::zero() || n == 1 {
        return Ok(finish(m, v));
    }
    let eps = T::epsilon();
    let target = eps * eps * norm2;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    Ok(finish(m, v))
}

fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let g = apq.norm();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if g == T::zero() {
        return;
    }
    let g100 = g * T::lit(100.0);
    if app.abs() + g100 == app.abs() && aqq.abs() + g100 == aqq.abs() {
        m[(p, q)] = Complex::zero();
        m[(q, p)] = Complex::zero();
        return;
    }
    let e = apq / g;
    let ec = e.conj();
    let theta = (aqq - app) / (g + g);
    let t = if theta == T::zero() {
        T::one()
    } else {
        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    // G restricted to (p, q): [[c, s], [-s conj(e), c conj(e)]].
    let g_qp = ec.scale(-s);
    let g_qq = ec.scale(c);
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp.scale(c) + akq * g_qp;
        m[(k, q)] = akp.scale(s) + akq * g_qq;
    }
    let e_s = e.scale(s);
    let e_c = e.scale(c);
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk.scale(c) - e_s * aqk;
        m[(q, k)] = apk.scale(s) + e_c * aqk;
    }
    m[(p, q)] = Complex::zero();
    m[(q, p)] = Complex::zero();
    m[(p, p)].im = T::zero();
    m[(q, q)].im = T::zero();

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp.scale(c) + vkq * g_qp;
        v[(k, q)] = vkp.scale(s) + vkq * g_qq;
    }
}

fn finish<T: Real>(m: ComplexMatrix<T>, v: ComplexMatrix<T>) -> HermitianEig<T> {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let diag = m.real_diag();
    order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEig { values, vectors }
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn eig_extremes<T: Real>(a: &ComplexMatrix<T>) -> Result<(T, T)> {
    let e = hermitian_eig(a)?;
    Ok((e.min(), e.max()))
}

/// Numerical PSD test: `lambda_min >= -tol * max(1, |lambda_max|)`.
pub fn is_psd<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    let (lo, hi) = eig_extremes(a)?;
    Ok(lo >= -tol * hi.abs().max(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> M {
        let a = M::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + &a.adjoint()).scale(0.5)
    }

    fn orthonormality_defect(u: &M) -> f64 {
        (&u.adjoint().matmul(u) - &M::identity(u.cols())).fro_norm()
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_eig(&M::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert!(orthonormality_defect(&e.vectors) < 1e-14);
    }

    #[test]
    fn diagonal_is_sorted_with_permuted_basis() {
        let a = M::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = hermitian_eig(&a).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // smallest eigenvalue lives on e_2
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 8, 16, 33] {
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&a).unwrap();
            let resid = (&a - &e.reconstruct()).fro_norm();
            assert!(resid <= 1e-10 * a.fro_norm().max(1.0), "n={n} resid={resid}");
            assert!(orthonormality_defect(&e.vectors) <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn repeated_eigenvalues_stay_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = hermitian_eig(&random_hermitian(6, &mut rng)).unwrap().vectors;
        let d = M::from_real_diag(&[2.0, 2.0, 2.0, -1.0, -1.0, 5.0]);
        let a = q.matmul(&d).matmul(&q.adjoint());
        let e = hermitian_eig(&a).unwrap();
        assert!(orthonormality_defect(&e.vectors) < 1e-12);
        for (got, want) in e.values.iter().zip([-1.0, -1.0, 2.0, 2.0, 2.0, 5.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_square_and_nan() {
        assert!(matches!(hermitian_eig(&M::zeros(2, 3)), Err(Error::Dimension(_))));
        let mut a = M::identity(2);
        a[(0, 0)].re = f64::INFINITY;
        assert!(matches!(hermitian_eig(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(6, &mut rng).cast::<f32>();
        let e = hermitian_eig(&a).unwrap();
        let resid = (&a - &e.reconstruct()).fro_norm();
        assert!(resid <= 1e-5 * a.fro_norm(), "resid={resid}");
    }

    #[test]
    fn low_rank_factor_reproduces_psd_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = M::from_fn(5, 2, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let x = w.outer_gram();
        let e = hermitian_eig(&x).unwrap();
        assert_eq!(e.rank(), 2);
        let f = e.low_rank_factor();
        assert_eq!(f.cols(), 2);
        assert!((&f.outer_gram() - &x).fro_norm() < 1e-12 * x.fro_norm());
    }
}
