//! Log-barrier Newton refinement for the concave full-stream problem.
//!
//! Conditional gradient converges slowly when the optimal covariance has
//! full rank, since every oracle answer is rank one. This routine follows the
//! central path of
//! `t phi(X) + log det X + log(P_T - Tr X) + log(Tr(K X) - thr)`
//! with damped Newton steps in the `n^2` real coordinates of `X`.

use num_complex::Complex;

use crate::error::Result;
use crate::matcore::{hermitian_eig, inverse_hpd, logdet_hpd, solve_hpd, Cholesky, ComplexMatrix};
use crate::model::{log_det_gain, ChannelPair, DesignBudget};
use crate::scalar::Real;
use crate::sdp::herm_from_real_basis;

const T_GROWTH: f64 = 10.0;
const T_MAX: f64 = 1e13;
const MAX_NEWTON: usize = 100;

struct Barrier<'a, T> {
    ch: &'a ChannelPair<T>,
    p_t: T,
    thr: T,
    with_eh: bool,
}

impl<T: Real> Barrier<'_, T> {
    fn slacks(&self, x: &ComplexMatrix<T>) -> Option<(T, T)> {
        let sp = self.p_t - x.re_trace();
        let se = self.ch.gram_e().trace_mul(x).re - self.thr;
        if sp <= T::zero() || (self.with_eh && se <= T::zero()) {
            return None;
        }
        Cholesky::new(x).ok()?;
        Some((sp, se))
    }

    fn value(&self, x: &ComplexMatrix<T>, t: T) -> Result<Option<T>> {
        let Some((sp, se)) = self.slacks(x) else {
            return Ok(None);
        };
        let phi = log_det_gain(self.ch.h_i(), x)? - log_det_gain(self.ch.h_e(), x)?;
        let mut v = t * phi + logdet_hpd(x)? + sp.ln();
        if self.with_eh {
            v += se.ln();
        }
        Ok(Some(v))
    }

    /// Gradient and negated Hessian in the real basis.
    fn derivatives(&self, x: &ComplexMatrix<T>, t: T) -> Result<(Vec<T>, ComplexMatrix<T>)> {
        let n = x.rows();
        let dim = n * n;
        let (sp, se) = self.slacks(x).expect("iterate stays interior");
        let curv = |h: &ComplexMatrix<T>| -> Result<ComplexMatrix<T>> {
            let inv = inverse_hpd(&h.congruence(x).add_scaled_identity(T::one()))?;
            Ok(h.adjoint().congruence(&inv))
        };
        let a_i = curv(self.ch.h_i())?;
        let a_e = curv(self.ch.h_e())?;
        let x_inv = inverse_hpd(x)?;
        let k = self.ch.gram_e();

        let mut grad_m = (&a_i - &a_e).scale(t) + x_inv.clone();
        grad_m = grad_m.add_scaled_identity(-T::one() / sp);
        if self.with_eh {
            grad_m.axpy(T::one() / se, k);
        }

        let basis: Vec<ComplexMatrix<T>> = (0..dim)
            .map(|j| {
                let mut c = vec![T::zero(); dim];
                c[j] = T::one();
                herm_from_real_basis(n, &c)
            })
            .collect();
        let g: Vec<T> = basis.iter().map(|e| grad_m.trace_mul(e).re).collect();
        let ai_e: Vec<_> = basis.iter().map(|e| a_i.matmul(e)).collect();
        let ae_e: Vec<_> = basis.iter().map(|e| a_e.matmul(e)).collect();
        let xi_e: Vec<_> = basis.iter().map(|e| x_inv.matmul(e)).collect();
        let tr: Vec<T> = basis.iter().map(|e| e.re_trace()).collect();
        let tk: Vec<T> = basis.iter().map(|e| k.trace_mul(e).re).collect();

        // -Hessian: t Tr(A_I E A_I E') - t Tr(A_E E A_E E') + Tr(X^-1 E X^-1 E')
        // + tr tr' / sp^2 + tk tk' / se^2.
        let mut h = ComplexMatrix::zeros(dim, dim);
        for p in 0..dim {
            for q in p..dim {
                let mut v = t * (ai_e[p].trace_mul(&ai_e[q]).re - ae_e[p].trace_mul(&ae_e[q]).re)
                    + xi_e[p].trace_mul(&xi_e[q]).re
                    + tr[p] * tr[q] / (sp * sp);
                if self.with_eh {
                    v += tk[p] * tk[q] / (se * se);
                }
                h[(p, q)] = Complex::new(v, T::zero());
                h[(q, p)] = Complex::new(v, T::zero());
            }
        }
        Ok((g, h))
    }
}

/// A strictly feasible covariance near `x`, or `None` when the feasible set
/// has no interior.
fn interior_start<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    x: &ComplexMatrix<T>,
    bar: &Barrier<'_, T>,
) -> Result<Option<ComplexMatrix<T>>> {
    let n = ch.n_t();
    let e = hermitian_eig(ch.gram_e())?;
    let q = ComplexMatrix::column(&e.vector(n - 1)).outer_gram();
    for (c, delta) in [(0.95, 0.1), (0.999, 0.01), (0.999_999, 1e-4)] {
        let mut center = q.scale(T::one() - T::lit(delta));
        center = center.add_scaled_identity(T::lit(delta) / T::from_usize_lossy(n));
        let center = center.scale(T::lit(c) * budget.p_t);
        for theta in [0.1, 0.5, 1.0] {
            let mut y = x.scale(T::one() - T::lit(theta));
            y.axpy(T::lit(theta), &center);
            y.force_hermitian();
            if bar.slacks(&y).is_some() {
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

/// Follows the central path from near `x` until the barrier duality bound
/// `(n + m) / t` drops below `target_gap` nats. Returns `None` if the
/// feasible set has no interior or a Newton system breaks down.
pub(crate) fn barrier_polish<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    x: &ComplexMatrix<T>,
    target_gap: T,
) -> Result<Option<ComplexMatrix<T>>> {
    let thr = ch.eh_threshold(budget);
    let bar = Barrier {
        ch,
        p_t: budget.p_t,
        thr,
        with_eh: thr > T::zero(),
    };
    let Some(mut y) = interior_start(ch, budget, x, &bar)? else {
        return Ok(None);
    };
    let n = ch.n_t();
    let m = T::from_usize_lossy(n + 1 + usize::from(bar.with_eh));
    let mut t = T::one();
    loop {
        for _ in 0..MAX_NEWTON {
            let (g, h) = bar.derivatives(&y, t)?;
            let gm = ComplexMatrix::from_fn(g.len(), 1, |i, _| Complex::new(g[i], T::zero()));
            let Ok(d) = solve_hpd(&h, &gm) else {
                return Ok(None);
            };
            let coeffs: Vec<T> = (0..g.len()).map(|i| d[(i, 0)].re).collect();
            let dec: T = g.iter().zip(&coeffs).map(|(a, b)| *a * *b).sum();
            if dec <= T::lit(1e-14) {
                break;
            }
            let step = herm_from_real_basis(n, &coeffs);
            let f0 = bar.value(&y, t)?.expect("interior");
            let mut s = T::one();
            let mut moved = false;
            for _ in 0..60 {
                let mut cand = y.clone();
                cand.axpy(s, &step);
                cand.force_hermitian();
                if let Some(f1) = bar.value(&cand, t)? {
                    if f1 >= f0 + T::lit(0.25) * s * dec {
                        y = cand;
                        moved = true;
                        break;
                    }
                }
                s /= T::lit(2.0);
            }
            if !moved {
                break;
            }
        }
        if m / t <= target_gap || t >= T::lit(T_MAX) {
            return Ok(Some(y));
        }
        t *= T::lit(T_GROWTH);
    }
}
