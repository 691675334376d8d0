use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, RANK_TOL};
use crate::scalar::Real;

use super::{herm_from_real_basis, SdpProblem, SdpSolution};

/// Lowers the rank of an optimal `X` without moving any constraint value.
///
/// Writes `X = V V^H` and searches for a nonzero Hermitian `Delta` with
/// `Tr(V^H A_i V Delta) = 0` for every constraint; such a `Delta` always
/// exists while `r^2 > m`. Stepping to `V (I - Delta / lambda) V^H`, with
/// `lambda` the signed eigenvalue of `Delta` of largest magnitude, keeps the
/// point PSD and drops at least one rank. The objective is preserved through
/// complementary slackness (`Z V = 0` at optimality). Terminates with
/// `r^2 <= m`, so two or three constraints give rank one.
pub fn rank_reduce<T: Real>(sol: &SdpSolution<T>, p: &SdpProblem<T>) -> Result<SdpSolution<T>> {
    if sol.x.shape() != (p.dim(), p.dim()) {
        return Err(Error::Dimension("solution does not match problem".into()));
    }
    let m = p.constraints().len();
    let mut v = hermitian_eig(&sol.x)?.low_rank_factor();
    let mut changed = false;
    while v.cols() * v.cols() > m {
        let r = v.cols();
        let delta = match null_direction(p, &v) {
            Some(d) => d,
            None => break,
        };
        let e = hermitian_eig(&delta)?;
        let lbar = if e.max().abs() >= e.min().abs() {
            e.max()
        } else {
            e.min()
        };
        // Eigenvalues of I - Delta/lbar are 1 - l/lbar in [0, 2]; the one for
        // lbar itself is exactly zero and is dropped.
        let keep: Vec<usize> = (0..r)
            .filter(|&k| {
                let t = T::one() - e.values[k] / lbar;
                t > T::lit(RANK_TOL) * T::lit(2.0)
            })
            .collect();
        if keep.len() == r {
            break;
        }
        let u = ComplexMatrix::from_fn(r, keep.len(), |i, j| {
            let k = keep[j];
            e.vectors[(i, k)].scale((T::one() - e.values[k] / lbar).sqrt())
        });
        v = v.matmul(&u);
        changed = true;
    }
    if !changed {
        return Ok(sol.clone());
    }
    let mut x = v.outer_gram();
    x.force_hermitian();
    let mut out = sol.clone();
    out.objective = p.objective(&x);
    out.x = x;
    Ok(out)
}

/// Unit-norm `Delta` in the null space of `Delta -> [Tr(V^H A_i V Delta)]_i`.
fn null_direction<T: Real>(p: &SdpProblem<T>, v: &ComplexMatrix<T>) -> Option<ComplexMatrix<T>> {
    let r = v.cols();
    let dofs = r * r;
    let rows: Vec<Vec<T>> = p
        .constraints()
        .iter()
        .map(|k| {
            let b = v.adjoint().matmul(&k.a).matmul(v);
            let mut row = Vec::with_capacity(dofs);
            for i in 0..r {
                row.push(b[(i, i)].re);
            }
            for i in 0..r {
                for j in (i + 1)..r {
                    let z = b[(i, j)];
                    row.push(z.re + z.re);
                    row.push(z.im + z.im);
                }
            }
            let nrm = row.iter().map(|&x| x * x).sum::<T>().sqrt();
            if nrm > T::zero() {
                row.iter_mut().for_each(|x| *x /= nrm);
            }
            row
        })
        .collect();
    // Smallest eigenvector of M^T M; it is an exact null vector when dofs > m.
    let gram = ComplexMatrix::from_fn(dofs, dofs, |i, j| {
        Complex::new(rows.iter().map(|row| row[i] * row[j]).sum(), T::zero())
    });
    let e = hermitian_eig(&gram).ok()?;
    let coeffs: Vec<T> = e.vector(0).iter().map(|z| z.re).collect();
    let d = herm_from_real_basis(r, &coeffs);
    (d.fro_norm() > T::zero()).then_some(d)
}

/// `sqrt(lambda_1) u_1` for a numerically rank-one PSD matrix.
pub fn extract_rank_one<T: Real>(x: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    let e = hermitian_eig(x)?;
    let n = e.dim();
    let l1 = e.max();
    if l1 <= T::zero() {
        if x.max_abs() == T::zero() {
            return Ok(vec![Complex::new(T::zero(), T::zero()); n]);
        }
        return Err(Error::Rank { ratio: f64::INFINITY });
    }
    if n > 1 {
        let ratio = e.values[n - 2].max(T::zero()) / l1;
        if ratio > T::lit(1e-6) {
            return Err(Error::Rank { ratio: ratio.as_f64() });
        }
    }
    let s = l1.sqrt();
    Ok(e.vector(n - 1).into_iter().map(|z| z.scale(s)).collect())
}
