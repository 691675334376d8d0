use crate::error::Result;
use crate::ibcd::{BlockQp, QpBlock};
use crate::matcore::ComplexMatrix;
use crate::model::{ChannelPair, DesignBudget};
use crate::scalar::Real;

use super::aux::AnAuxVars;

/// Convex two-block QP in `(V, V_E)` at fixed auxiliaries, with the
/// harvesting constraint linearized at `(V~, V_E~)`:
///
/// `min Tr(V^H A_V V) - 2 Re Tr(B_V^H V) + Tr(V_E^H A_E V_E) - 2 Re Tr(B_E^H V_E)`
/// s.t. `||V||^2 + ||V_E||^2 <= P_T` and
/// `2 Re Tr(V^H K V~) + 2 Re Tr(V_E^H K V_E~) >= thr + ||H_E V~||^2 + ||H_E V_E~||^2`.
///
/// With `G = H_I^H U_1 W_1 U_1^H H_I` and `F = H_E^H W_3 H_E`:
/// `A_V = G + F`, `A_E = G + F + H_E^H U_2 W_2 U_2^H H_E`,
/// `B_V = H_I^H U_1 W_1`, `B_E = H_E^H U_2 W_2`. There are no cross terms,
/// so each block has its own closed form for fixed multipliers.
#[derive(Clone, Debug)]
pub struct AnLinearizedSubproblem<T> {
    qp: BlockQp<T>,
    a_v: ComplexMatrix<T>,
    b_v: ComplexMatrix<T>,
    c_v: ComplexMatrix<T>,
    a_e: ComplexMatrix<T>,
    b_e: ComplexMatrix<T>,
    c_e: ComplexMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct AnSubproblemSolution<T> {
    pub v: ComplexMatrix<T>,
    pub v_e: ComplexMatrix<T>,
    pub lambda: T,
    pub mu: T,
    pub bisection_steps: usize,
}

impl<T: Real> AnLinearizedSubproblem<T> {
    pub fn new(
        ch: &ChannelPair<T>,
        v_tilde: &ComplexMatrix<T>,
        ve_tilde: &ComplexMatrix<T>,
        aux: &AnAuxVars<T>,
        budget: &DesignBudget<T>,
    ) -> Result<Self> {
        ch.check_tx_rows(v_tilde, "V~")?;
        ch.check_tx_rows(ve_tilde, "V_E~")?;
        let hiu = ch.h_i().adjoint().matmul(&aux.u1);
        let heu = ch.h_e().adjoint().matmul(&aux.u2);
        let shared = &hiu.congruence(&aux.w1) + &ch.h_e().adjoint().congruence(&aux.w3);
        let mut a_v = shared.clone();
        a_v.force_hermitian();
        let mut a_e = &shared + &heu.congruence(&aux.w2);
        a_e.force_hermitian();
        let b_v = hiu.matmul(&aux.w1);
        let b_e = heu.matmul(&aux.w2);
        let c_v = ch.gram_e().matmul(v_tilde);
        let c_e = ch.gram_e().matmul(ve_tilde);
        let rhs = ch.eh_threshold(budget) + c_v.inner(v_tilde).re + c_e.inner(ve_tilde).re;
        let blocks = vec![
            QpBlock::new(a_v.clone(), b_v.clone(), &c_v)?,
            QpBlock::new(a_e.clone(), b_e.clone(), &c_e)?,
        ];
        Ok(Self {
            qp: BlockQp {
                blocks,
                rhs,
                p_t: budget.p_t,
            },
            a_v,
            b_v,
            c_v,
            a_e,
            b_e,
            c_e,
        })
    }

    pub fn a_v(&self) -> &ComplexMatrix<T> {
        &self.a_v
    }

    pub fn b_v(&self) -> &ComplexMatrix<T> {
        &self.b_v
    }

    pub fn c_v(&self) -> &ComplexMatrix<T> {
        &self.c_v
    }

    pub fn a_e(&self) -> &ComplexMatrix<T> {
        &self.a_e
    }

    pub fn b_e(&self) -> &ComplexMatrix<T> {
        &self.b_e
    }

    pub fn c_e(&self) -> &ComplexMatrix<T> {
        &self.c_e
    }

    pub fn rhs(&self) -> T {
        self.qp.rhs
    }

    pub fn p_t(&self) -> T {
        self.qp.p_t
    }

    pub fn objective(&self, v: &ComplexMatrix<T>, v_e: &ComplexMatrix<T>) -> T {
        self.qp.objective(&[v.clone(), v_e.clone()])
    }

    pub fn linearized_eh(&self, v: &ComplexMatrix<T>, v_e: &ComplexMatrix<T>) -> T {
        T::lit(2.0) * (self.c_v.inner(v).re + self.c_e.inner(v_e).re)
    }

    pub fn solve(&self, eps: T) -> Result<AnSubproblemSolution<T>> {
        let mut out = self.qp.solve(eps)?;
        let v_e = out.v.pop().expect("two blocks");
        let v = out.v.pop().expect("two blocks");
        Ok(AnSubproblemSolution {
            v,
            v_e,
            lambda: out.lambda,
            mu: out.mu,
            bisection_steps: out.bisection_steps,
        })
    }
}

/// Builds and solves the two-block subproblem at `(V~, V_E~)`.
pub fn an_solve_subproblem<T: Real>(
    ch: &ChannelPair<T>,
    v_tilde: &ComplexMatrix<T>,
    ve_tilde: &ComplexMatrix<T>,
    aux: &AnAuxVars<T>,
    budget: &DesignBudget<T>,
    eps: T,
) -> Result<AnSubproblemSolution<T>> {
    AnLinearizedSubproblem::new(ch, v_tilde, ve_tilde, aux, budget)?.solve(eps)
}
