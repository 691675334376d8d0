//! Small dense complex-Hermitian semidefinite programs.
//!
//! Problems have the form `min Tr(C X)` subject to `Tr(A_i X) {=, <=, >=} b_i`
//! and `X` Hermitian positive semidefinite. [`solve_sdp`] is a primal-dual
//! interior-point method; [`rank_reduce`] and [`extract_rank_one`] turn an
//! optimal point into a low-rank (ideally rank-one) solution.

mod ipm;
mod rank;

pub use ipm::solve_sdp;
pub use rank::{extract_rank_one, rank_reduce};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matcore::{eig_extremes, ComplexMatrix};
use crate::scalar::Real;

pub const MAX_DIM: usize = 64;
pub const MAX_CONSTRAINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpConstraint<T> {
    pub a: ComplexMatrix<T>,
    pub b: T,
    pub sense: Sense,
}

impl<T: Real> SdpConstraint<T> {
    /// Signed violation: positive when the constraint is broken.
    pub fn violation(&self, x: &ComplexMatrix<T>) -> T {
        let v = self.a.trace_mul(x).re;
        match self.sense {
            Sense::Eq => (v - self.b).abs(),
            Sense::Le => v - self.b,
            Sense::Ge => self.b - v,
        }
    }
}

/// `min Tr(C X)` over Hermitian PSD `X` subject to linear constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem<T> {
    c: ComplexMatrix<T>,
    constraints: Vec<SdpConstraint<T>>,
}

impl<T: Real> SdpProblem<T> {
    pub fn new(c: ComplexMatrix<T>) -> Result<Self> {
        c.ensure_square("SDP objective")?;
        c.ensure_finite("SDP objective")?;
        if c.rows() == 0 || c.rows() > MAX_DIM {
            return Err(Error::Dimension(format!(
                "SDP dimension {} outside 1..={MAX_DIM}",
                c.rows()
            )));
        }
        Ok(Self {
            c: c.hermitian_part(),
            constraints: Vec::new(),
        })
    }

    /// Adds `Tr(A X) sense b`. `A` is replaced by its Hermitian part.
    pub fn add(&mut self, a: ComplexMatrix<T>, sense: Sense, b: T) -> Result<&mut Self> {
        if a.shape() != self.c.shape() {
            return Err(Error::Dimension(format!(
                "constraint matrix is {}x{}, problem is {n}x{n}",
                a.rows(),
                a.cols(),
                n = self.dim()
            )));
        }
        a.ensure_finite("SDP constraint")?;
        if !b.is_finite() {
            return Err(Error::NonFinite("SDP right-hand side"));
        }
        if self.constraints.len() == MAX_CONSTRAINTS {
            return Err(Error::Invalid(format!("at most {MAX_CONSTRAINTS} constraints")));
        }
        if a.fro_norm() == T::zero() {
            return Err(Error::Invalid("constraint matrix is zero".into()));
        }
        self.constraints.push(SdpConstraint {
            a: a.hermitian_part(),
            b,
            sense,
        });
        Ok(self)
    }

    pub fn with(mut self, a: ComplexMatrix<T>, sense: Sense, b: T) -> Result<Self> {
        self.add(a, sense, b)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.c.rows()
    }

    pub fn c(&self) -> &ComplexMatrix<T> {
        &self.c
    }

    pub fn constraints(&self) -> &[SdpConstraint<T>] {
        &self.constraints
    }

    pub fn objective(&self, x: &ComplexMatrix<T>) -> T {
        self.c.trace_mul(x).re
    }

    /// Largest violation relative to `max(1, |b_i|)`; zero when feasible.
    pub fn max_violation(&self, x: &ComplexMatrix<T>) -> T {
        self.constraints
            .iter()
            .map(|k| k.violation(x).max(T::zero()) / k.b.abs().max(T::one()))
            .fold(T::zero(), T::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

/// One interior-point iterate, in the caller's units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IpmIterate<T> {
    pub iter: usize,
    pub primal_obj: T,
    pub dual_obj: T,
    /// Scaled, relative residual norms.
    pub primal_infeas: T,
    pub dual_infeas: T,
    pub rel_gap: T,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub x: ComplexMatrix<T>,
    /// Dual slack `Z = C - sum_i y_i A_i`.
    pub z: ComplexMatrix<T>,
    pub duals: Vec<T>,
    pub objective: T,
    pub dual_objective: T,
    pub status: SdpStatus,
    pub iterations: usize,
    pub history: Vec<IpmIterate<T>>,
}

/// Optimality residuals of a solution, each relative to the data scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KktResiduals<T> {
    /// Constraint violation over `max(1, |b_i|)`.
    pub primal: T,
    /// `||C - sum y_i A_i - Z||`, negative eigenvalues of `Z` and wrong-signed
    /// multipliers, over `1 + ||C||`.
    pub dual: T,
    /// `Tr(X Z)` plus inequality slackness, over `max(1, |objective|)`.
    pub complementarity: T,
    /// Duality gap over `max(1, |objective|)`.
    pub gap: T,
}

impl<T: Real> KktResiduals<T> {
    pub fn max(&self) -> T {
        self.primal.max(self.dual).max(self.complementarity).max(self.gap)
    }
}

impl<T: Real> SdpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    pub fn kkt(&self, p: &SdpProblem<T>) -> Result<KktResiduals<T>> {
        let scale = T::one().max(self.objective.abs());
        let mut stat = p.c.clone();
        let mut sign = T::zero();
        let mut slack = T::zero();
        for (k, &y) in p.constraints.iter().zip(&self.duals) {
            stat.axpy(-y, &k.a);
            let resid = k.a.trace_mul(&self.x).re - k.b;
            match k.sense {
                Sense::Eq => {}
                Sense::Le => {
                    sign = sign.max(y);
                    slack += (y * resid).abs();
                }
                Sense::Ge => {
                    sign = sign.max(-y);
                    slack += (y * resid).abs();
                }
            }
        }
        let stat = (&stat - &self.z).fro_norm();
        let (zmin, _) = eig_extremes(&self.z)?;
        let cnorm = T::one() + p.c.fro_norm();
        let dual = (stat + (-zmin).max(T::zero()) * T::from_usize_lossy(p.dim()).sqrt()) / cnorm + sign / cnorm;
        let comp = (self.x.trace_mul(&self.z).re.abs() + slack) / scale;
        Ok(KktResiduals {
            primal: p.max_violation(&self.x),
            dual,
            complementarity: comp,
            gap: (self.objective - self.dual_objective).abs() / scale,
        })
    }
}

pub(crate) fn herm_from_real_basis<T: Real>(r: usize, coeffs: &[T]) -> ComplexMatrix<T> {
    debug_assert_eq!(coeffs.len(), r * r);
    let mut d = ComplexMatrix::zeros(r, r);
    let mut idx = 0;
    for k in 0..r {
        d[(k, k)] = Complex::new(coeffs[idx], T::zero());
        idx += 1;
    }
    for k in 0..r {
        for l in (k + 1)..r {
            let z = Complex::new(coeffs[idx], coeffs[idx + 1]);
            d[(k, l)] = z;
            d[(l, k)] = z.conj();
            idx += 2;
        }
    }
    d
}
