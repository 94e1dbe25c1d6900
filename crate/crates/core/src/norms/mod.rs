//! Lebesgue, grand and small norms on the normalized space `L(G)`.
//!
//! Both the grand norm and the small norm are restricted to a finite grid of
//! `ε` values. On that grid the two are exactly dual under the pairing
//! `mean(g h)`, which is what the certificates exploit.

mod dual;
mod primal;
mod project;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GFunction;

pub use dual::small_norm_dual;
pub use primal::{small_norm_primal, small_norm_primal_from, PrimalStart};
pub use project::project_lp_ball;

/// Exponents closer than this to 1 are treated as exactly 1.
const UNIT_SNAP: f64 = 1e-12;

/// Geometric `ε`-grid description: `count` points from `min_fraction (p-1)` to `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub count: usize,
    pub min_fraction: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { count: 8, min_fraction: 1e-3 }
    }
}

impl GridSpec {
    pub fn points(&self, p: f64) -> Result<Vec<f64>> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} must lie in (1, inf)")));
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("grid count must be positive".into()));
        }
        if !(self.min_fraction > 0.0 && self.min_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grid min fraction {} must lie in (0, 1]",
                self.min_fraction
            )));
        }
        let top = p - 1.0;
        if self.count == 1 {
            return Ok(vec![top]);
        }
        let lo = self.min_fraction.ln();
        let mut pts: Vec<f64> = (0..self.count)
            .map(|i| top * (lo * (1.0 - i as f64 / (self.count - 1) as f64)).exp())
            .collect();
        pts[self.count - 1] = top;
        pts.dedup();
        Ok(pts)
    }
}

/// Parameters of the grand norm `max_j ε_j^{θ/(p-ε_j)} ‖f‖_{p-ε_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrandParams {
    p: f64,
    theta: f64,
    grid: Vec<f64>,
}

impl GrandParams {
    pub fn new(p: f64, theta: f64, grid: Vec<f64>) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} must lie in (1, inf)")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("theta = {theta} must be >= 0")));
        }
        if grid.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        for w in grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
            }
        }
        let top = p - 1.0;
        for &e in &grid {
            if !(e > 0.0 && e <= top * (1.0 + 1e-14)) {
                return Err(Error::InvalidParameter(format!("grid point {e} outside (0, {top}]")));
            }
        }
        Ok(Self { p, theta, grid })
    }

    pub fn geometric(p: f64, theta: f64, grid: GridSpec) -> Result<Self> {
        Self::new(p, theta, grid.points(p)?)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Lebesgue exponents `p - ε_j`.
    pub fn exponents(&self) -> Vec<f64> {
        self.grid
            .iter()
            .map(|&e| {
                let q = self.p - e;
                if (q - 1.0).abs() < UNIT_SNAP { 1.0 } else { q }
            })
            .collect()
    }

    /// Weights `ε_j^{θ/(p-ε_j)}`.
    pub fn weights(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(self.exponents())
            .map(|(&e, q)| e.powf(self.theta / q))
            .collect()
    }
}

/// Parameters of the small norm `inf Σ_j ε_j^{-θ/(p-ε_j)} ‖g_j‖_{(p-ε_j)'}`.
///
/// The grid lives on the pre-conjugate exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallParams {
    grand: GrandParams,
}

impl SmallParams {
    pub fn new(p_conj: f64, theta: f64, grid: Vec<f64>) -> Result<Self> {
        Ok(Self { grand: GrandParams::new(conjugate(p_conj)?, theta, grid)? })
    }

    pub fn geometric(p_conj: f64, theta: f64, grid: GridSpec) -> Result<Self> {
        let p = conjugate(p_conj)?;
        Ok(Self { grand: GrandParams::geometric(p, theta, grid)? })
    }

    /// The small space whose associate is the given grand space.
    pub fn associate_of(grand: &GrandParams) -> Self {
        Self { grand: grand.clone() }
    }

    pub fn grand(&self) -> &GrandParams {
        &self.grand
    }

    pub fn p(&self) -> f64 {
        self.grand.p
    }

    pub fn p_conj(&self) -> f64 {
        self.grand.p / (self.grand.p - 1.0)
    }

    pub fn theta(&self) -> f64 {
        self.grand.theta
    }

    pub fn grid(&self) -> &[f64] {
        &self.grand.grid
    }

    /// `w_j = ε_j^{-θ/(p-ε_j)}`.
    pub fn weights(&self) -> Vec<f64> {
        self.grand.weights().iter().map(|a| 1.0 / a).collect()
    }

    /// `q_j = (p-ε_j)'`, infinite at the endpoint `ε = p - 1`.
    pub fn exponents(&self) -> Vec<f64> {
        self.grand
            .exponents()
            .iter()
            .map(|&q| if q == 1.0 { f64::INFINITY } else { q / (q - 1.0) })
            .collect()
    }
}

/// `p' = p / (p - 1)`.
pub fn conjugate(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent {p} must lie in (1, inf)")));
    }
    Ok(p / (p - 1.0))
}

/// Sorted absolute values; every norm below sums in this order, so results
/// are bit-identical under permutations of `G`.
pub(crate) fn sorted_abs(values: &[Complex64]) -> Vec<f64> {
    let mut a: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    a
}

/// `(mean a^q)^{1/q}` for nonnegative `a`; `q = inf` gives the max.
pub(crate) fn lp_of_abs(a: &[f64], q: f64) -> f64 {
    let m = a.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return m;
    }
    if q == 1.0 {
        return a.iter().sum::<f64>() / a.len() as f64;
    }
    let s: f64 = a.iter().map(|&x| (x / m).powf(q)).sum::<f64>() / a.len() as f64;
    m * s.powf(1.0 / q)
}

pub(crate) fn grand_of_abs(a: &[f64], params: &GrandParams) -> f64 {
    params
        .exponents()
        .iter()
        .zip(params.weights())
        .map(|(&q, w)| w * lp_of_abs(a, q))
        .fold(0.0, f64::max)
}

pub(crate) fn small_cost_of_abs(blocks: &[Vec<f64>], params: &SmallParams) -> f64 {
    blocks
        .iter()
        .zip(params.weights().iter().zip(params.exponents()))
        .map(|(b, (&w, q))| w * lp_of_abs(b, q))
        .sum()
}

pub fn lp_norm(f: &GFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must be >= 1")));
    }
    Ok(lp_of_abs(&sorted_abs(f.values()), q))
}

pub fn grand_norm(f: &GFunction, params: &GrandParams) -> f64 {
    grand_of_abs(&sorted_abs(f.values()), params)
}

/// Cost `Σ_j w_j ‖g_j‖_{q_j}` of an explicit decomposition.
pub fn decomposition_cost(blocks: &[GFunction], params: &SmallParams) -> f64 {
    let abs: Vec<Vec<f64>> = blocks.iter().map(|b| sorted_abs(b.values())).collect();
    small_cost_of_abs(&abs, params)
}

/// Cheapest single-block decomposition `min_j w_j ‖g‖_{q_j}` and its index.
pub fn single_block_bound(g: &GFunction, params: &SmallParams) -> (f64, usize) {
    let a = sorted_abs(g.values());
    params
        .weights()
        .iter()
        .zip(params.exponents())
        .map(|(&w, q)| w * lp_of_abs(&a, q))
        .enumerate()
        .fold((f64::INFINITY, 0), |best, (j, c)| if c < best.0 { (c, j) } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative gap above which a certificate is flagged.
    pub tol_rel: f64,
    /// Iteration budget (Newton steps for the dual, sweeps for the primal).
    pub max_iter: usize,
    /// Relative accuracy the interior-point path aims for.
    pub target_rel: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_rel: 1e-3, max_iter: 5000, target_rel: 1e-11 }
    }
}

/// A small-norm value bracketed by a dual witness and a primal decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct NormCertificate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grid: Vec<f64>,
    pub p: f64,
    pub p_conj: f64,
    pub theta: f64,
    #[serde(skip)]
    pub witness_dual: GFunction,
    #[serde(skip)]
    pub witness_primal: Vec<GFunction>,
}

impl NormCertificate {
    pub(crate) fn assemble(
        lower: f64,
        upper: f64,
        iterations: usize,
        params: &SmallParams,
        opts: &SolverOptions,
        witness_dual: GFunction,
        witness_primal: Vec<GFunction>,
    ) -> Self {
        let gap = relative_gap(lower, upper);
        Self {
            value: 0.5 * (lower + upper),
            lower,
            upper,
            gap,
            iterations,
            converged: gap <= opts.tol_rel,
            grid: params.grid().to_vec(),
            p: params.p(),
            p_conj: params.p_conj(),
            theta: params.theta(),
            witness_dual,
            witness_primal,
        }
    }

    pub(crate) fn zero(g: &GFunction, params: &SmallParams, opts: &SolverOptions) -> Self {
        let z = GFunction::zeros(g.spec());
        Self::assemble(0.0, 0.0, 0, params, opts, z.clone(), vec![z])
    }

    /// `Σ_j g_j`.
    pub fn reconstruction(&self) -> Option<GFunction> {
        let mut it = self.witness_primal.iter();
        let first = it.next()?.clone();
        it.try_fold(first, |acc, b| acc.add(b)).ok()
    }
}

pub(crate) fn relative_gap(lower: f64, upper: f64) -> f64 {
    if upper <= 0.0 {
        return 0.0;
    }
    ((upper - lower) / upper.max(f64::MIN_POSITIVE)).max(0.0)
}

/// Runs the interior-point dual, then polishes the primal side with the
/// splitting solver only if the recovered decomposition leaves a gap.
pub fn small_norm(g: &GFunction, params: &SmallParams, opts: &SolverOptions) -> NormCertificate {
    let dual = small_norm_dual(g, params, opts);
    if dual.converged || dual.upper == 0.0 {
        return dual;
    }
    let remaining = opts.max_iter.saturating_sub(dual.iterations);
    if remaining == 0 {
        return dual;
    }
    let start = PrimalStart {
        blocks: Some(dual.witness_primal.clone()),
        target_lower: Some(dual.lower),
    };
    let popts = SolverOptions { max_iter: remaining, ..*opts };
    let primal = small_norm_primal_from(g, params, &popts, &start);
    let (upper, blocks) = if primal.upper < dual.upper {
        (primal.upper, primal.witness_primal)
    } else {
        (dual.upper, dual.witness_primal)
    };
    let (lower, h) = if primal.lower > dual.lower {
        (primal.lower, primal.witness_dual)
    } else {
        (dual.lower, dual.witness_dual)
    };
    NormCertificate::assemble(lower, upper, dual.iterations + primal.iterations, params, opts, h, blocks)
}

/// `C₁`: `‖u‖_{(r',θ} ≤ C₁ ‖u‖_{p'}` from the cheapest single block with `q_j ≤ p'`.
pub fn embedding_constant(p_from: f64, params_to: &SmallParams) -> Result<f64> {
    params_to
        .weights()
        .iter()
        .zip(params_to.exponents())
        .filter(|(_, q)| *q <= p_from * (1.0 + 1e-12))
        .map(|(&w, _)| w)
        .fold(None, |acc: Option<f64>, w| Some(acc.map_or(w, |a| a.min(w))))
        .ok_or_else(|| {
            Error::Inadmissible(format!(
                "no grid point of the target space has (p-ε)' <= {p_from}"
            ))
        })
}

/// `C₃`: `‖f‖_{p'} ≤ C₃ ‖f‖_{(p',θ}`, equal to `max_j ε_j^{θ/(p-ε_j)}`.
pub fn small_to_lebesgue_constant(params: &SmallParams) -> f64 {
    params.grand().weights().into_iter().fold(0.0, f64::max)
}

/// Constant of the generalized Hölder inequality
/// `‖fg‖_{(r',θ} ≤ C ‖f‖_{(p₁',θ} ‖g‖_{(p₂',θ}`, returned with its factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderConstant {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub p_conj: f64,
    pub value: f64,
}

pub fn holder_constant(
    f_params: &SmallParams,
    g_params: &SmallParams,
    out_params: &SmallParams,
) -> Result<HolderConstant> {
    let p_conj = 1.0 / (1.0 / f_params.p_conj() + 1.0 / g_params.p_conj());
    let r = out_params.p();
    let r_conj = out_params.p_conj();
    if !(r * r_conj < p_conj + 1.0) {
        return Err(Error::Inadmissible(format!(
            "r*r' = {} is not below p'+1 = {}",
            r * r_conj,
            p_conj + 1.0
        )));
    }
    let c1 = embedding_constant(p_conj, out_params)?;
    let c3 = small_to_lebesgue_constant(f_params);
    let c4 = small_to_lebesgue_constant(g_params);
    Ok(HolderConstant { c1, c2: 1.0, c3, c4, p_conj, value: c1 * c3 * c4 })
}

/// Exact admissibility arithmetic for the Hölder exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactAdmissibility {
    pub p_conj: Ratio<i64>,
    pub r_times_r_conj: Ratio<i64>,
    pub admissible: bool,
}

pub fn exact_admissibility(p1_conj: Ratio<i64>, p2_conj: Ratio<i64>, r: Ratio<i64>) -> ExactAdmissibility {
    let one = Ratio::from_integer(1);
    let p_conj = (p1_conj.recip() + p2_conj.recip()).recip();
    let r_conj = r / (r - one);
    let rr = r * r_conj;
    ExactAdmissibility { p_conj, r_times_r_conj: rr, admissible: rr < p_conj + one }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Automorphism, GroupSpec};
    use crate::rng::Gaussian;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn lp_examples() {
        let g = GroupSpec::cyclic(12).unwrap();
        let f = GFunction::constant(&g, Complex64::new(0.0, -3.0));
        for q in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((lp_norm(&f, q).unwrap() - 3.0).abs() < 1e-14);
            let spike = GFunction::indicator(&g, 0).scale(c((12f64).powf(1.0 / q)));
            if q.is_finite() {
                assert!((lp_norm(&spike, q).unwrap() - 1.0).abs() < 1e-13);
            }
        }
        assert!(lp_norm(&f, 0.5).is_err());
        let r = Gaussian::new(2).g_function(&g);
        let mut prev = 0.0;
        for q in [1.0, 1.3, 2.0, 3.5, 10.0, f64::INFINITY] {
            let v = lp_norm(&r, q).unwrap();
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn grid_shape() {
        let pts = GridSpec { count: 6, min_fraction: 1e-3 }.points(2.5).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(*pts.last().unwrap(), 1.5);
        assert!((pts[0] - 1.5e-3).abs() < 1e-15);
        assert!(GrandParams::new(2.0, 1.0, vec![0.5, 0.2]).is_err());
        assert!(GrandParams::new(2.0, 1.0, vec![1.5]).is_err());
        assert!(GrandParams::new(1.0, 1.0, vec![0.5]).is_err());
        let s = SmallParams::geometric(3.0, 1.0, GridSpec::default()).unwrap();
        assert!((s.p() - 1.5).abs() < 1e-15);
        assert!(s.exponents().last().unwrap().is_infinite());
        assert!(s.weights().iter().all(|w| w.is_finite() && *w > 0.0));
    }

    #[test]
    fn grand_examples() {
        let g = GroupSpec::cyclic(8).unwrap();
        let one = GFunction::constant(&g, c(1.0));
        let p0 = GrandParams::geometric(2.0, 0.0, GridSpec::default()).unwrap();
        assert!((grand_norm(&one.scale(c(4.0)), &p0) - 4.0).abs() < 1e-14);
        let p1 = GrandParams::geometric(2.0, 1.0, GridSpec { count: 9, min_fraction: 1e-3 }).unwrap();
        assert!((grand_norm(&one, &p1) - 1.0).abs() < 1e-15);
        let dense = (1..=10000).map(|i| i as f64 / 10000.0).map(|e| e.powf(1.0 / (2.0 - e)));
        assert!(dense.fold(0.0, f64::max) <= 1.0);

        let z32 = GroupSpec::cyclic(32).unwrap();
        let f = Gaussian::new(4).g_function(&z32);
        let fine = GrandParams::geometric(2.0, 0.0, GridSpec { count: 12, min_fraction: 1e-3 }).unwrap();
        let lp = lp_norm(&f, 2.0).unwrap();
        assert!((grand_norm(&f, &fine) - lp).abs() / lp < 0.02);
    }

    #[test]
    fn grand_is_a_norm_and_refines_up() {
        let g = GroupSpec::cyclic(16).unwrap();
        let mut rng = Gaussian::new(8);
        let params = GrandParams::geometric(2.5, 1.0, GridSpec { count: 6, min_fraction: 1e-2 }).unwrap();
        let mut grid = params.grid().to_vec();
        grid.push(0.7);
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let finer = GrandParams::new(2.5, 1.0, grid).unwrap();
        for _ in 0..20 {
            let f = rng.g_function(&g);
            let h = rng.g_function(&g);
            let s = rng.complex();
            let nf = grand_norm(&f, &params);
            assert!((grand_norm(&f.scale(s), &params) - s.norm() * nf).abs() < 1e-10 * nf.max(1.0));
            assert!(grand_norm(&f.add(&h).unwrap(), &params) <= nf + grand_norm(&h, &params) + 1e-12);
            assert!(grand_norm(&f, &finer) >= nf);
        }
    }

    #[test]
    fn norms_are_permutation_invariant_exactly() {
        let g: GroupSpec = "Z4xZ4".parse().unwrap();
        let f = Gaussian::new(5).g_function(&g);
        let params = SmallParams::geometric(3.0, 1.0, GridSpec { count: 6, min_fraction: 1e-3 }).unwrap();
        let base = small_norm(&f, &params, &SolverOptions::default());
        for a in Automorphism::all(&g) {
            let fa = f.compose(&a.permutation());
            assert_eq!(grand_norm(&fa, params.grand()), grand_norm(&f, params.grand()));
            assert_eq!(small_norm(&fa, &params, &SolverOptions::default()).value, base.value);
        }
        let ft = f.translate_idx(5);
        assert_eq!(lp_norm(&ft, 2.7).unwrap(), lp_norm(&f, 2.7).unwrap());
        assert_eq!(small_norm(&ft, &params, &SolverOptions::default()).value, base.value);
    }

    #[test]
    fn embedding_constants() {
        let grid = GridSpec::default();
        let s = |pc: f64, th: f64| SmallParams::geometric(pc, th, grid).unwrap();
        let h = holder_constant(&s(9.0, 0.0), &s(10.0, 0.0), &s(1.5, 0.0)).unwrap();
        assert_eq!(h.value, 1.0);
        let h = holder_constant(&s(9.0, 1.0), &s(10.0, 1.0), &s(1.5, 1.0)).unwrap();
        assert!((h.p_conj - 90.0 / 19.0).abs() < 1e-12);
        assert!(h.value > 0.0 && h.value.is_finite());
        assert!(holder_constant(&s(2.0, 1.0), &s(2.0, 1.0), &s(1.5, 1.0)).is_err());

        let ex = exact_admissibility(Ratio::from_integer(9), Ratio::from_integer(10), Ratio::from_integer(3));
        assert_eq!(ex.p_conj, Ratio::new(90, 19));
        assert_eq!(ex.r_times_r_conj, Ratio::new(9, 2));
        assert!(ex.admissible);
    }
}
