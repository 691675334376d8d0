//! Infeasible primal-dual path-following method with the HKM search
//! direction and Mehrotra predictor-corrector, applied directly to complex
//! Hermitian matrices. Inequalities get nonnegative slack variables.

use crate::error::Result;
use crate::matcore::{hermitian_eig, inverse_hpd, Cholesky, ComplexMatrix, Lu};
use crate::scalar::Real;

use super::{IpmIterate, SdpProblem, SdpSolution, SdpStatus, Sense};

const MAX_ITER: usize = 200;
const TOL: f64 = 1e-10;
/// Accepted as optimal when progress stalls.
const ACCEPT_TOL: f64 = 1e-8;
const STEP_FRACTION: f64 = 0.98;
/// Dual objective (in scaled units) beyond which an improving ray is tested.
const RAY_THRESHOLD: f64 = 1e8;

type Mat<T> = ComplexMatrix<T>;

/// Problem rescaled so `||C|| = ||A_i|| = 1` and `max |b_i| = 1`.
struct Scaled<T> {
    n: usize,
    c: Mat<T>,
    a: Vec<Mat<T>>,
    b: Vec<T>,
    /// Per constraint: `Some((slack index, g))` with `Tr(A X) + g s = b`.
    slack: Vec<Option<(usize, T)>>,
    n_slack: usize,
    c_scale: T,
    a_scale: Vec<T>,
    x_scale: T,
}

impl<T: Real> Scaled<T> {
    fn new(p: &SdpProblem<T>) -> Self {
        let n = p.dim();
        let c_norm = p.c.fro_norm();
        let c_scale = if c_norm > T::zero() { c_norm } else { T::one() };
        let a_scale: Vec<T> = p.constraints.iter().map(|k| k.a.fro_norm()).collect();
        let a: Vec<Mat<T>> = p
            .constraints
            .iter()
            .zip(&a_scale)
            .map(|(k, &s)| k.a.scale(T::one() / s))
            .collect();
        let b_raw: Vec<T> = p.constraints.iter().zip(&a_scale).map(|(k, &s)| k.b / s).collect();
        let bmax = b_raw.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let x_scale = if bmax > T::zero() { bmax } else { T::one() };
        let b = b_raw.iter().map(|&v| v / x_scale).collect();
        let mut n_slack = 0;
        let slack = p
            .constraints
            .iter()
            .map(|k| {
                let g = match k.sense {
                    Sense::Eq => return None,
                    Sense::Le => T::one(),
                    Sense::Ge => -T::one(),
                };
                n_slack += 1;
                Some((n_slack - 1, g))
            })
            .collect();
        Self {
            n,
            c: p.c.scale(T::one() / c_scale),
            a,
            b,
            slack,
            n_slack,
            c_scale,
            a_scale,
            x_scale,
        }
    }

    fn m(&self) -> usize {
        self.a.len()
    }

    fn a_op(&self, x: &Mat<T>) -> Vec<T> {
        self.a.iter().map(|a| a.trace_mul(x).re).collect()
    }

    fn a_adj(&self, y: &[T]) -> Mat<T> {
        let mut out = Mat::zeros(self.n, self.n);
        for (a, &yi) in self.a.iter().zip(y) {
            out.axpy(yi, a);
        }
        out
    }
}

struct State<T> {
    x: Mat<T>,
    z: Mat<T>,
    y: Vec<T>,
    s: Vec<T>,
    w: Vec<T>,
}

struct Direction<T> {
    dx: Mat<T>,
    dz: Mat<T>,
    dy: Vec<T>,
    ds: Vec<T>,
    dw: Vec<T>,
}

struct Residuals<T> {
    rp: Vec<T>,
    rd: Mat<T>,
    rds: Vec<T>,
}

enum SchurFactor<T> {
    Chol(Cholesky<T>),
    Lu(Lu<T>),
}

impl<T: Real> SchurFactor<T> {
    fn solve(&self, rhs: &[T]) -> Vec<T> {
        let b = Mat::from_fn(rhs.len(), 1, |i, _| num_complex::Complex::new(rhs[i], T::zero()));
        let x = match self {
            Self::Chol(c) => c.solve(&b),
            Self::Lu(l) => l.solve(&b),
        };
        x.as_slice().iter().map(|z| z.re).collect()
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Largest `alpha` with `X + alpha dX` PSD (infinite if `dX` is PSD).
fn max_step_psd<T: Real>(x: &Mat<T>, dx: &Mat<T>) -> T {
    let Ok(chol) = Cholesky::new(x) else {
        return T::zero();
    };
    let l_dx = chol.forward(dx);
    let w = chol.forward(&l_dx.adjoint());
    match hermitian_eig(&w) {
        Ok(e) if e.min() < T::zero() => -T::one() / e.min(),
        Ok(_) => T::infinity(),
        Err(_) => T::zero(),
    }
}

fn max_step_lp<T: Real>(s: &[T], ds: &[T]) -> T {
    s.iter()
        .zip(ds)
        .filter(|(_, &d)| d < T::zero())
        .map(|(&v, &d)| -v / d)
        .fold(T::infinity(), T::min)
}

fn residuals<T: Real>(sc: &Scaled<T>, st: &State<T>) -> Residuals<T> {
    let ax = sc.a_op(&st.x);
    let mut rp: Vec<T> = sc.b.iter().zip(&ax).map(|(&b, &v)| b - v).collect();
    let mut rds = vec![T::zero(); sc.n_slack];
    for (i, sl) in sc.slack.iter().enumerate() {
        if let Some((k, g)) = *sl {
            rp[i] -= g * st.s[k];
            rds[k] = -g * st.y[i] - st.w[k];
        }
    }
    let rd = &(&sc.c - &sc.a_adj(&st.y)) - &st.z;
    Residuals { rp, rd, rds }
}

/// Solves the Newton system given the complementarity targets
/// `t = (target - X Z - corr) Z^{-1}` and `t_s = (target - s w - corr_s) / w`.
#[allow(clippy::too_many_arguments)]
fn direction<T: Real>(
    sc: &Scaled<T>,
    st: &State<T>,
    res: &Residuals<T>,
    zinv: &Mat<T>,
    schur: &SchurFactor<T>,
    t: &Mat<T>,
    t_s: &[T],
) -> Direction<T> {
    let x_rd_zinv = st.x.matmul(&res.rd).matmul(zinv);
    let base = t - &x_rd_zinv;
    let mut rhs: Vec<T> =
        sc.a.iter()
            .zip(&res.rp)
            .map(|(a, &r)| r - a.trace_mul(&base).re)
            .collect();
    for (i, sl) in sc.slack.iter().enumerate() {
        if let Some((k, g)) = *sl {
            rhs[i] -= g * (t_s[k] - st.s[k] / st.w[k] * res.rds[k]);
        }
    }
    let dy = schur.solve(&rhs);
    let dz = &res.rd - &sc.a_adj(&dy);
    let mut dx = t - &st.x.matmul(&dz).matmul(zinv);
    dx.force_hermitian();
    let mut dw = res.rds.clone();
    let mut ds = vec![T::zero(); sc.n_slack];
    for (i, sl) in sc.slack.iter().enumerate() {
        if let Some((k, g)) = *sl {
            dw[k] -= g * dy[i];
            ds[k] = t_s[k] - st.s[k] / st.w[k] * dw[k];
        }
    }
    Direction { dx, dz, dy, ds, dw }
}

fn schur_factor<T: Real>(sc: &Scaled<T>, st: &State<T>, zinv: &Mat<T>) -> Option<SchurFactor<T>> {
    let m = sc.m();
    let g: Vec<Mat<T>> = sc.a.iter().map(|a| st.x.matmul(a).matmul(zinv)).collect();
    let mut mm = Mat::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = sc.a[i].trace_mul(&g[j]).re;
            mm[(i, j)].re = v;
            mm[(j, i)].re = v;
        }
        if let Some((k, _)) = sc.slack[i] {
            mm[(i, i)].re += st.s[k] / st.w[k];
        }
    }
    if let Ok(c) = Cholesky::new(&mm) {
        return Some(SchurFactor::Chol(c));
    }
    Lu::new(&mm).ok().map(SchurFactor::Lu)
}

fn step_lengths<T: Real>(st: &State<T>, d: &Direction<T>) -> (T, T) {
    let ap = max_step_psd(&st.x, &d.dx).min(max_step_lp(&st.s, &d.ds));
    let ad = max_step_psd(&st.z, &d.dz).min(max_step_lp(&st.w, &d.dw));
    (ap, ad)
}

/// Solves `p` with an infeasible-start primal-dual interior-point method.
///
/// Returns `Optimal` when relative primal/dual infeasibility and duality gap
/// fall below `1e-10` (or below `1e-8` once progress stalls), `Infeasible`
/// when the dual iterates certify an improving ray, and `MaxIter` otherwise.
pub fn solve_sdp<T: Real>(p: &SdpProblem<T>) -> Result<SdpSolution<T>> {
    let sc = Scaled::new(p);
    let n = sc.n;
    let nf = T::from_usize_lossy(n);
    let m = sc.m();
    let xi = T::lit(10.0).max(nf.sqrt());
    let mut st = State {
        x: Mat::scaled_identity(n, xi),
        z: Mat::scaled_identity(n, xi),
        y: vec![T::zero(); m],
        s: vec![xi; sc.n_slack],
        w: vec![xi; sc.n_slack],
    };
    let cone_dim = T::from_usize_lossy(n + sc.n_slack);
    let b_norm = norm(&sc.b);
    let obj_scale = sc.c_scale * sc.x_scale;
    let tol = T::lit(TOL);
    let mut history = Vec::new();
    let mut best: Option<(T, State<T>)> = None;
    let mut status = SdpStatus::MaxIter;
    let mut gamma = T::lit(0.9);

    for iter in 0..MAX_ITER {
        let res = residuals(&sc, &st);
        let pobj = sc.c.trace_mul(&st.x).re;
        let dobj = dot(&sc.b, &st.y);
        let comp = st.x.trace_mul(&st.z).re + dot(&st.s, &st.w);
        let mu = comp / cone_dim;
        let relp = norm(&res.rp) / (T::one() + b_norm);
        let reld = (res.rd.fro_norm_sqr() + dot(&res.rds, &res.rds)).sqrt() / T::lit(2.0);
        let relg = comp.abs() / (T::one() + pobj.abs() + dobj.abs());
        history.push(IpmIterate {
            iter,
            primal_obj: pobj * obj_scale,
            dual_obj: dobj * obj_scale,
            primal_infeas: relp,
            dual_infeas: reld,
            rel_gap: relg,
        });
        let err = relp.max(reld).max(relg);
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((
                err,
                State {
                    x: st.x.clone(),
                    z: st.z.clone(),
                    y: st.y.clone(),
                    s: st.s.clone(),
                    w: st.w.clone(),
                },
            ));
        }
        if err <= tol {
            status = SdpStatus::Optimal;
            break;
        }
        if improving_ray(&sc, &st, dobj)? {
            status = SdpStatus::Infeasible;
            best = Some((err, st));
            break;
        }

        let Ok(zinv) = inverse_hpd(&st.z) else { break };
        let Some(schur) = schur_factor(&sc, &st, &zinv) else {
            break;
        };

        // Predictor.
        let t_aff = st.x.scale(-T::one());
        let ts_aff: Vec<T> = st.s.iter().map(|&v| -v).collect();
        let aff = direction(&sc, &st, &res, &zinv, &schur, &t_aff, &ts_aff);
        let (ap, ad) = step_lengths(&st, &aff);
        let (ap, ad) = (ap.min(T::one()), ad.min(T::one()));
        let x_a = &st.x + &aff.dx.scale(ap);
        let z_a = &st.z + &aff.dz.scale(ad);
        let mut comp_a = x_a.trace_mul(&z_a).re;
        for k in 0..sc.n_slack {
            comp_a += (st.s[k] + ap * aff.ds[k]) * (st.w[k] + ad * aff.dw[k]);
        }
        let sigma = (comp_a / comp).max(T::zero()).min(T::one()).powi(3);

        // Corrector.
        let target = sigma * mu;
        let corr = aff.dx.matmul(&aff.dz).matmul(&zinv);
        let t = &(&zinv.scale(target) - &st.x) - &corr;
        let t_s: Vec<T> = (0..sc.n_slack)
            .map(|k| (target - st.s[k] * st.w[k] - aff.ds[k] * aff.dw[k]) / st.w[k])
            .collect();
        let d = direction(&sc, &st, &res, &zinv, &schur, &t, &t_s);
        let (ap, ad) = step_lengths(&st, &d);
        let ap = (gamma * ap).min(T::one());
        let ad = (gamma * ad).min(T::one());
        if ap < T::lit(1e-12) && ad < T::lit(1e-12) {
            break;
        }
        st.x.axpy(ap, &d.dx);
        st.x.force_hermitian();
        st.z.axpy(ad, &d.dz);
        st.z.force_hermitian();
        for k in 0..m {
            st.y[k] += ad * d.dy[k];
        }
        for k in 0..sc.n_slack {
            st.s[k] += ap * d.ds[k];
            st.w[k] += ad * d.dw[k];
        }
        gamma = T::lit(0.9) + T::lit(STEP_FRACTION - 0.9) * ap.min(ad);
    }

    let (err, st) = best.expect("at least one iterate");
    if status == SdpStatus::MaxIter && err <= T::lit(ACCEPT_TOL) {
        status = SdpStatus::Optimal;
    }
    Ok(unscale(p, &sc, st, status, history))
}

/// Detects `y` with `b^T y > 0`, `-sum y_i A_i` PSD and slack signs
/// consistent, normalized so the objective term is negligible.
fn improving_ray<T: Real>(sc: &Scaled<T>, st: &State<T>, dobj: T) -> Result<bool> {
    if !(dobj > T::lit(RAY_THRESHOLD)) {
        return Ok(false);
    }
    let yh: Vec<T> = st.y.iter().map(|&v| v / dobj).collect();
    let ray = sc.a_adj(&yh).scale(-T::one());
    let e = hermitian_eig(&ray)?;
    let slack_ok = sc.slack.iter().enumerate().all(|(i, sl)| match sl {
        Some((_, g)) => -*g * yh[i] >= -T::lit(1e-7),
        None => true,
    });
    Ok(e.min() >= -T::lit(1e-7) * T::one().max(e.max().abs()) && slack_ok)
}

fn unscale<T: Real>(
    p: &SdpProblem<T>,
    sc: &Scaled<T>,
    st: State<T>,
    status: SdpStatus,
    history: Vec<IpmIterate<T>>,
) -> SdpSolution<T> {
    let mut x = st.x.scale(sc.x_scale);
    x.force_hermitian();
    let duals: Vec<T> =
        st.y.iter()
            .zip(&sc.a_scale)
            .map(|(&y, &a)| sc.c_scale * y / a)
            .collect();
    let mut z = st.z.scale(sc.c_scale);
    z.force_hermitian();
    let objective = p.objective(&x);
    let dual_objective = p.constraints.iter().zip(&duals).map(|(k, &y)| k.b * y).sum();
    SdpSolution {
        x,
        z,
        duals,
        objective,
        dual_objective,
        status,
        iterations: history.len(),
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ComplexMatrix;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> M {
        let a = M::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + &a.adjoint()).scale(0.5)
    }

    #[test]
    fn min_eigenvalue_sdp() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 3, 5, 8] {
            let c = random_hermitian(n, &mut rng);
            let p = SdpProblem::new(c.clone())
                .unwrap()
                .with(M::identity(n), Sense::Eq, 1.0)
                .unwrap();
            let sol = solve_sdp(&p).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            let lmin = hermitian_eig(&c).unwrap().min();
            assert!((sol.objective - lmin).abs() < 1e-8, "n={n} {} vs {lmin}", sol.objective);
            assert!(sol.kkt(&p).unwrap().max() < 1e-7);
        }
    }

    #[test]
    fn trace_objective() {
        let p = SdpProblem::new(M::identity(3))
            .unwrap()
            .with(M::identity(3), Sense::Eq, 1.0)
            .unwrap();
        let sol = solve_sdp(&p).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inequality_constraints() {
        // min -Tr(X) s.t. Tr(X) <= 2, X_00 >= 0.5 -> objective -2
        let mut e00 = M::zeros(2, 2);
        e00[(0, 0)] = Complex::new(1.0, 0.0);
        let p = SdpProblem::new(M::scaled_identity(2, -1.0))
            .unwrap()
            .with(M::identity(2), Sense::Le, 2.0)
            .unwrap()
            .with(e00, Sense::Ge, 0.5)
            .unwrap();
        let sol = solve_sdp(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective + 2.0).abs() < 1e-8);
        assert!(sol.x[(0, 0)].re >= 0.5 - 1e-8);
        assert!(sol.duals[0] < 0.0);
    }

    #[test]
    fn detects_infeasibility() {
        // Tr(X) <= 1 and Tr(X) >= 2.
        let p = SdpProblem::new(M::identity(2))
            .unwrap()
            .with(M::identity(2), Sense::Le, 1.0)
            .unwrap()
            .with(M::identity(2), Sense::Ge, 2.0)
            .unwrap();
        assert_eq!(solve_sdp(&p).unwrap().status, SdpStatus::Infeasible);
        // X_00 = -1 has no PSD solution.
        let mut e00 = M::zeros(2, 2);
        e00[(0, 0)] = Complex::new(1.0, 0.0);
        let p = SdpProblem::new(M::identity(2))
            .unwrap()
            .with(e00, Sense::Eq, -1.0)
            .unwrap();
        assert_eq!(solve_sdp(&p).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn badly_scaled_data() {
        // Tr(Q X) = 1 with Q ~ 1e3 and a tiny objective scale.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = M::from_fn(3, 3, |_, _| {
            Complex::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0))
        });
        let q = h.gram().add_scaled_identity(100.0);
        let c = random_hermitian(3, &mut rng).scale(1e-4);
        let p = SdpProblem::new(c).unwrap().with(q, Sense::Eq, 1.0).unwrap();
        let sol = solve_sdp(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!(sol.kkt(&p).unwrap().max() < 1e-7, "{:?}", sol.kkt(&p));
    }

    #[test]
    fn weak_duality_on_feasible_iterates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = random_hermitian(4, &mut rng);
        let p = SdpProblem::new(c)
            .unwrap()
            .with(M::identity(4), Sense::Le, 3.0)
            .unwrap()
            .with(random_hermitian(4, &mut rng), Sense::Eq, 0.2)
            .unwrap();
        let sol = solve_sdp(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        for it in &sol.history {
            if it.primal_infeas < 1e-9 && it.dual_infeas < 1e-9 {
                assert!(it.primal_obj >= it.dual_obj - 1e-9 * (1.0 + it.primal_obj.abs()));
            }
        }
    }
}
