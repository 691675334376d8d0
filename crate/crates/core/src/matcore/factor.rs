//! Cholesky and LU factorizations and the solves built on them.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::eig::hermitian_eig;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower-triangular Cholesky factor `L` with `L L^H = A`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: ComplexMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factors the Hermitian part of `a`. Fails with [`Error::Singular`]
    /// when a pivot is not strictly positive.
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        a.ensure_square("Cholesky input")?;
        a.ensure_finite("Cholesky input")?;
        let a = a.hermitian_part();
        let n = a.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::Singular("matrix"));
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s.unscale(ljj);
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &ComplexMatrix<T> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L Y = B`.
    pub fn forward(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let mut y = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = y[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * y[(k, c)];
                }
                y[(i, c)] = s.unscale(self.l[(i, i)].re);
            }
        }
        y
    }

    /// Solves `L^H X = Y`.
    pub fn backward(&self, y: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        assert_eq!(y.rows(), n);
        let mut x = y.clone();
        for c in 0..y.cols() {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s.unscale(self.l[(i, i)].re);
            }
        }
        x
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.backward(&self.forward(b))
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        let mut inv = self.solve(&ComplexMatrix::identity(self.dim()));
        inv.force_hermitian();
        inv
    }

    /// `ln det A = 2 sum ln L_ii`.
    pub fn logdet(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim()).map(|i| self.l[(i, i)].re.ln()).sum::<T>() * two
    }
}

/// Solves `A X = B` for Hermitian positive-definite `A`.
pub fn solve_hpd<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "solve_hpd: A is {}x{}, B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    Ok(Cholesky::new(a)?.solve(b))
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inverse_hpd<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(Cholesky::new(a)?.inverse())
}

/// Natural-log determinant of a Hermitian positive-definite matrix.
pub fn logdet_hpd<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(Cholesky::new(a)?.logdet())
}

/// Minimizes the generalized Rayleigh quotient `u^H A u / u^H B u`.
///
/// Whitens with the Cholesky factor of `B` and takes the smallest
/// eigenpair of `L^{-1} A L^{-H}`. Returns a unit-norm `u` and the
/// minimal ratio.
pub fn min_rayleigh_vec<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<(Vec<Complex<T>>, T)> {
    a.ensure_square("min_rayleigh_vec A")?;
    if a.shape() != b.shape() {
        return Err(Error::Dimension("min_rayleigh_vec: A and B differ in shape".into()));
    }
    let chol = Cholesky::new(b).map_err(|_| Error::Singular("B"))?;
    // C = L^{-1} A L^{-H} = L^{-1} (L^{-1} A^H)^H, and A is Hermitian.
    let la = chol.forward(&a.hermitian_part());
    let c = chol.forward(&la.adjoint());
    let e = hermitian_eig(&c)?;
    let y = ComplexMatrix::column(&e.vector(0));
    let u = chol.backward(&y);
    let norm = u.fro_norm();
    let u: Vec<_> = u.as_slice().iter().map(|z| z.unscale(norm)).collect();
    Ok((u, e.min()))
}

/// LU factorization with partial pivoting for general square matrices.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        a.ensure_square("LU input")?;
        a.ensure_finite("LU input")?;
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == T::zero() {
                return Err(Error::Singular("matrix"));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in (k + 1)..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n);
        let mut x = ComplexMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }

    /// Complex log-determinant; the real part is `ln |det A|`.
    pub fn logdet(&self) -> Complex<T> {
        let n = self.lu.rows();
        let mut acc = Complex::<T>::zero();
        let mut sign = Complex::<T>::one();
        for i in 0..n {
            acc += self.lu[(i, i)].ln();
        }
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        if sign.re < T::zero() {
            acc += Complex::new(T::zero(), T::PI());
        }
        acc
    }
}

/// Solves `A X = B` for a general nonsingular square `A`.
pub fn solve_general<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension("solve_general: row mismatch".into()));
    }
    Ok(Lu::new(a)?.solve(b))
}
