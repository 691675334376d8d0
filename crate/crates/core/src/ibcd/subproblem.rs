use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, RANK_TOL};
use crate::model::{ChannelPair, DesignBudget};
use crate::scalar::Real;

use super::aux::AuxVars;

/// One variable block of a separable QP: minimize
/// `Tr(V^H A V) - 2 Re Tr(B^H V)` jointly with the other blocks, subject to
/// a shared power budget and a shared linear constraint
/// `sum_k 2 Re Tr(C_k^H V_k) >= rhs`. Stored in the eigenbasis of `A`.
#[derive(Clone, Debug)]
pub(crate) struct QpBlock<T> {
    p: ComplexMatrix<T>,
    sigma: Vec<T>,
    /// `P^H B`, `P^H C`.
    pb: ComplexMatrix<T>,
    pc: ComplexMatrix<T>,
    a: ComplexMatrix<T>,
    b: ComplexMatrix<T>,
}

impl<T: Real> QpBlock<T> {
    pub(crate) fn new(a: ComplexMatrix<T>, b: ComplexMatrix<T>, c: &ComplexMatrix<T>) -> Result<Self> {
        let e = hermitian_eig(&a)?;
        let p = e.vectors;
        let ph = p.adjoint();
        Ok(Self {
            pb: ph.matmul(&b),
            pc: ph.matmul(c),
            sigma: e.values,
            p,
            a,
            b,
        })
    }

    /// Diagonal of `(lambda I + Sigma)^{-1}`, or the pseudo-inverse of
    /// `Sigma` at `lambda = 0`.
    fn inv_diag(&self, lambda: T) -> Vec<T> {
        if lambda > T::zero() {
            return self
                .sigma
                .iter()
                .map(|&s| T::one() / (lambda + s.max(T::zero())))
                .collect();
        }
        let smax = self.sigma.iter().fold(T::zero(), |m, &s| m.max(s));
        let cut = T::lit(RANK_TOL) * smax;
        self.sigma
            .iter()
            .map(|&s| if s > cut { T::one() / s } else { T::zero() })
            .collect()
    }

    /// `(Re Tr(C^H Theta B), Tr(C^H Theta C))`.
    fn mu_terms(&self, inv: &[T]) -> (T, T) {
        let mut cb = T::zero();
        let mut cc = T::zero();
        for (i, &w) in inv.iter().enumerate().take(self.pb.rows()) {
            for j in 0..self.pb.cols() {
                cb += (self.pc[(i, j)].conj() * self.pb[(i, j)]).re * w;
                cc += self.pc[(i, j)].norm_sqr() * w;
            }
        }
        (cb, cc)
    }

    fn point(&self, inv: &[T], mu: T) -> ComplexMatrix<T> {
        let y = ComplexMatrix::from_fn(self.pb.rows(), self.pb.cols(), |i, j| {
            (self.pb[(i, j)] + self.pc[(i, j)].scale(mu)).scale(inv[i])
        });
        self.p.matmul(&y)
    }

    pub(crate) fn objective(&self, v: &ComplexMatrix<T>) -> T {
        v.adjoint().matmul(&self.a).matmul(v).re_trace() - T::lit(2.0) * self.b.inner(v).re
    }
}

/// Multi-block QP with shared power budget and linear constraint, solved by
/// bisection on the power multiplier with the harvesting multiplier in
/// closed form.
#[derive(Clone, Debug)]
pub(crate) struct BlockQp<T> {
    pub(crate) blocks: Vec<QpBlock<T>>,
    pub(crate) rhs: T,
    pub(crate) p_t: T,
}

pub(crate) struct BlockQpPoint<T> {
    pub(crate) v: Vec<ComplexMatrix<T>>,
    pub(crate) lambda: T,
    pub(crate) mu: T,
    pub(crate) bisection_steps: usize,
}

impl<T: Real> BlockQp<T> {
    fn at(&self, lambda: T) -> Result<(Vec<ComplexMatrix<T>>, T)> {
        let invs: Vec<Vec<T>> = self.blocks.iter().map(|b| b.inv_diag(lambda)).collect();
        let (mut cb, mut cc) = (T::zero(), T::zero());
        for (b, inv) in self.blocks.iter().zip(&invs) {
            let (x, y) = b.mu_terms(inv);
            cb += x;
            cc += y;
        }
        let num = self.rhs - T::lit(2.0) * cb;
        let mu = if num <= T::zero() {
            T::zero()
        } else if cc > T::zero() {
            num / (T::lit(2.0) * cc)
        } else {
            return Err(Error::UnreachableLinearization);
        };
        let v = self.blocks.iter().zip(&invs).map(|(b, inv)| b.point(inv, mu)).collect();
        Ok((v, mu))
    }

    fn power(v: &[ComplexMatrix<T>]) -> T {
        v.iter().map(|m| m.fro_norm_sqr()).sum()
    }

    pub(crate) fn objective(&self, v: &[ComplexMatrix<T>]) -> T {
        self.blocks.iter().zip(v).map(|(b, m)| b.objective(m)).sum()
    }

    /// Bisection on `lambda` until the bracket is at most `eps` wide; returns
    /// the point at the upper end so the power budget holds.
    pub(crate) fn solve(&self, eps: T) -> Result<BlockQpPoint<T>> {
        let (v0, mu0) = self.at(T::zero())?;
        if Self::power(&v0) <= self.p_t {
            return Ok(BlockQpPoint {
                v: v0,
                lambda: T::zero(),
                mu: mu0,
                bisection_steps: 0,
            });
        }
        let mut hi = T::one();
        let mut at_hi = self.at(hi)?;
        let mut steps = 0;
        while Self::power(&at_hi.0) > self.p_t {
            hi = hi + hi;
            at_hi = self.at(hi)?;
            steps += 1;
            if !hi.is_finite() || steps > 2000 {
                return Err(Error::Solver("power multiplier bracket diverged".into()));
            }
        }
        let mut lo = T::zero();
        while hi - lo > eps {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            let at_mid = self.at(mid)?;
            if Self::power(&at_mid.0) >= self.p_t {
                lo = mid;
            } else {
                hi = mid;
                at_hi = at_mid;
            }
            steps += 1;
        }
        Ok(BlockQpPoint {
            v: at_hi.0,
            lambda: hi,
            mu: at_hi.1,
            bisection_steps: steps,
        })
    }
}

/// The convex subproblem in `V` at a fixed `(U, W_I, W_E)`, with the
/// harvesting constraint linearized at `V~`:
///
/// `min Tr(V^H A V) - 2 Re Tr(B^H V)` s.t. `Tr(V V^H) <= P_T`,
/// `2 Re Tr(V^H K V~) >= P_E / (zeta sigma_E^2) + Tr(V~^H K V~)`,
///
/// where `A = H_I^H U W_I U^H H_I + H_E^H W_E H_E`, `B = H_I^H U W_I` and
/// `K = H_E^H H_E`.
#[derive(Clone, Debug)]
pub struct LinearizedSubproblem<T> {
    qp: BlockQp<T>,
    a: ComplexMatrix<T>,
    b: ComplexMatrix<T>,
    c: ComplexMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct SubproblemSolution<T> {
    pub v: ComplexMatrix<T>,
    pub lambda: T,
    pub mu: T,
    pub bisection_steps: usize,
}

impl<T: Real> LinearizedSubproblem<T> {
    pub fn new(
        ch: &ChannelPair<T>,
        v_tilde: &ComplexMatrix<T>,
        aux: &AuxVars<T>,
        budget: &DesignBudget<T>,
    ) -> Result<Self> {
        ch.check_tx_rows(v_tilde, "V~")?;
        let hiu = ch.h_i().adjoint().matmul(&aux.u);
        let mut a = &hiu.congruence(&aux.w_i) + &ch.h_e().adjoint().congruence(&aux.w_e);
        a.force_hermitian();
        let b = hiu.matmul(&aux.w_i);
        let c = ch.gram_e().matmul(v_tilde);
        let rhs = ch.eh_threshold(budget) + c.inner(v_tilde).re;
        let block = QpBlock::new(a.clone(), b.clone(), &c)?;
        Ok(Self {
            qp: BlockQp {
                blocks: vec![block],
                rhs,
                p_t: budget.p_t,
            },
            a,
            b,
            c,
        })
    }

    pub fn a(&self) -> &ComplexMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix<T> {
        &self.b
    }

    /// `K V~`, the linearized constraint's coefficient.
    pub fn c(&self) -> &ComplexMatrix<T> {
        &self.c
    }

    /// Right-hand side of the linearized harvesting constraint.
    pub fn rhs(&self) -> T {
        self.qp.rhs
    }

    pub fn p_t(&self) -> T {
        self.qp.p_t
    }

    pub fn objective(&self, v: &ComplexMatrix<T>) -> T {
        self.qp.blocks[0].objective(v)
    }

    /// `2 Re Tr(V^H K V~)`.
    pub fn linearized_eh(&self, v: &ComplexMatrix<T>) -> T {
        T::lit(2.0) * self.c.inner(v).re
    }

    /// `V(lambda)` with the closed-form harvesting multiplier.
    pub fn point_at(&self, lambda: T) -> Result<(ComplexMatrix<T>, T)> {
        let (mut v, mu) = self.qp.at(lambda)?;
        Ok((v.remove(0), mu))
    }

    pub fn solve(&self, eps: T) -> Result<SubproblemSolution<T>> {
        let mut out = self.qp.solve(eps)?;
        Ok(SubproblemSolution {
            v: out.v.remove(0),
            lambda: out.lambda,
            mu: out.mu,
            bisection_steps: out.bisection_steps,
        })
    }
}

/// Builds and solves the linearized subproblem at `V~`.
pub fn solve_linearized_subproblem<T: Real>(
    ch: &ChannelPair<T>,
    v_tilde: &ComplexMatrix<T>,
    aux: &AuxVars<T>,
    budget: &DesignBudget<T>,
    eps: T,
) -> Result<SubproblemSolution<T>> {
    LinearizedSubproblem::new(ch, v_tilde, aux, budget)?.solve(eps)
}
