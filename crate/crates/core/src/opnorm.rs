//! Brackets for the multiplier norm `‖B_m‖` between small spaces.
//!
//! Lower bounds come from explicit witness pairs evaluated with certified
//! norms. Upper bounds fold the symbol's construction tree, multiplying the
//! constant of each rule; unstructured symbols get no upper bound.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipliers::{apply, trilinear, DerivedOp, MultiplierParams, Structure, Symbol};
use crate::norms::{
    grand_norm, holder_constant, small_norm, HolderConstant, NormCertificate, SmallParams,
    SolverOptions,
};
use crate::rng::Gaussian;
use crate::spectral::{fourier_forward, fourier_inverse, DualFunction, GFunction};

/// `small(B_m(f,g)) / (small(f) small(g))` with its certified interval.
#[derive(Debug, Clone, Serialize)]
pub struct RatioValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Ratio of the dual-witness values alone; stable to solver precision.
    pub dual_value: f64,
    pub numerator: NormCertificate,
    pub f_norm: NormCertificate,
    pub g_norm: NormCertificate,
}

pub fn ratio(
    m: &Symbol,
    f: &GFunction,
    g: &GFunction,
    params: &MultiplierParams,
    opts: &SolverOptions,
) -> Result<RatioValue> {
    let [s1, s2, s3] = params.small_params()?;
    let fc = small_norm(f, &s1, opts);
    let gc = small_norm(g, &s2, opts);
    if fc.lower <= 0.0 || gc.lower <= 0.0 {
        return Err(Error::ZeroDenominator("witness functions must be nonzero".into()));
    }
    let num = small_norm(&apply(m, f, g)?, &s3, opts);
    Ok(RatioValue {
        value: num.value / (fc.value * gc.value),
        lower: num.lower / (fc.upper * gc.upper),
        upper: num.upper / (fc.lower * gc.lower),
        dual_value: num.lower / (fc.lower * gc.lower),
        numerator: num,
        f_norm: fc,
        g_norm: gc,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub rule: String,
    pub factor: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    /// `None` when no rule applies.
    pub value: Option<f64>,
    pub trace: Vec<TraceStep>,
    pub holder: Option<HolderConstant>,
    pub diagnostic: Option<String>,
}

impl UpperBound {
    pub fn finite(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

struct Folder<'a> {
    params: &'a MultiplierParams,
    holder: Option<HolderConstant>,
    trace: Vec<TraceStep>,
}

impl Folder<'_> {
    fn holder(&mut self) -> Result<f64> {
        if self.holder.is_none() {
            let [s1, s2, s3] = self.params.small_params()?;
            let h = holder_constant(&s1, &s2, &s3).map_err(|e| match e {
                Error::Inadmissible(msg) => Error::Inadmissible(format!(
                    "p3*p3' < p'+1 with 1/p' = 1/p1' + 1/p2' fails: {msg}"
                )),
                other => other,
            })?;
            self.holder = Some(h);
        }
        Ok(self.holder.expect("set above").value)
    }

    fn step(&mut self, rule: &str, factor: f64, note: String) {
        self.trace.push(TraceStep { rule: rule.into(), factor, note });
    }

    fn fold(&mut self, m: &Symbol) -> Result<Option<f64>> {
        let l1_g = |f: &GFunction| f.l1_norm();
        let l1_d = |f: &DualFunction| f.abs_sum();
        Ok(Some(match m.structure() {
            Structure::General => return Ok(None),
            Structure::Constant(a) => {
                let c = self.holder()?;
                self.step("thm5c", c * a.norm(), format!("holder constant {c:.6e} times |a| = {:.6e}", a.norm()));
                c * a.norm()
            }
            Structure::RankOne { m1, m2 } => {
                let c = self.holder()?;
                let (k1, k2) = (l1_g(&fourier_inverse(m1)), l1_g(&fourier_inverse(m2)));
                self.step("thm6", c * k1 * k2, format!("Phi-hat = 1 (cor1: C = {c:.6e}), |Psi1|_1 = {k1:.6e}, |Psi2|_1 = {k2:.6e}"));
                c * k1 * k2
            }
            Structure::Difference { m } => {
                let c = self.holder()?;
                let k = l1_g(&fourier_inverse(m));
                self.step("example2", c * k, format!("holder constant {c:.6e} times |K|_1 = {k:.6e}"));
                c * k
            }
            Structure::Triple { psi1, phi, psi2 } => {
                let c = self.holder()?;
                let (p, k1, k2) = (l1_g(phi), l1_g(psi1), l1_g(psi2));
                self.step("cor1", p * c, format!("|B_Phi-hat| <= |Phi|_1 = {p:.6e} times {c:.6e}"));
                self.step("thm6", p * c * k1 * k2, format!("|Psi1|_1 = {k1:.6e}, |Psi2|_1 = {k2:.6e}"));
                p * c * k1 * k2
            }
            Structure::Measure { lambda, .. } => {
                let c = self.holder()?;
                let tv = lambda.total_variation();
                self.step("prop3", c * tv, format!("holder constant {c:.6e} times |lambda| = {tv:.6e}"));
                c * tv
            }
            Structure::Derived { op, parent } => {
                let Some(base) = self.fold(parent)? else { return Ok(None) };
                let (rule, factor, note) = match op {
                    DerivedOp::Translate { .. } => ("thm2a", 1.0, "translation preserves the norm".to_string()),
                    DerivedOp::Modulate { .. } => ("thm2b", 1.0, "modulation preserves the norm".to_string()),
                    DerivedOp::Convolve { phi } => ("thm5a", l1_d(phi), "|Phi|_l1".to_string()),
                    DerivedOp::ProductTransform { phi } => ("thm5b", l1_g(phi), "|Phi|_1".to_string()),
                    DerivedOp::Dilate { .. } => ("thm3", 1.0, "|A| = 1".to_string()),
                    DerivedOp::PsiWeighted { psi, .. } => ("prop1", l1_d(psi), "|Psi|_l1 with |A*| = 1".to_string()),
                    DerivedOp::Average { .. } => ("prop2", 1.0, "average of translates".to_string()),
                    DerivedOp::Scale(a) => ("scale", a.norm(), "|a|".to_string()),
                    DerivedOp::DiffTranslate { .. } => ("prop5a", 1.0, "translated kernel".to_string()),
                    DerivedOp::DiffModulate { .. } => ("prop5b", 1.0, "modulated kernel".to_string()),
                    DerivedOp::DiffConvolve { phi } => ("thm7a", l1_d(phi), "|Phi|_l1".to_string()),
                    DerivedOp::DiffProduct { phi } => ("thm7b", l1_g(phi), "|Phi|_1".to_string()),
                    DerivedOp::SumFilter { phi } => ("prop6", l1_g(phi), "|Phi|_1".to_string()),
                };
                self.step(rule, factor, note);
                base * factor
            }
        }))
    }
}

/// Folds the construction tree of `m` into an upper bound with a trace.
pub fn bound_upper(m: &Symbol, params: &MultiplierParams) -> Result<UpperBound> {
    let mut folder = Folder { params, holder: None, trace: Vec::new() };
    let value = folder.fold(m)?;
    let diagnostic = value.is_none().then(|| {
        "no rule applies: the symbol (or one of its ancestors) is a general dense symbol".to_string()
    });
    Ok(UpperBound { value, trace: folder.trace, holder: folder.holder, diagnostic })
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub ratio: RatioValue,
    pub restart: usize,
    pub budget: usize,
    #[serde(skip)]
    pub witness_f: GFunction,
    #[serde(skip)]
    pub witness_g: GFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateOptions {
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { budget: 10, restarts: 8, seed: 0, solver: SolverOptions::default() }
    }
}

/// Maximizer of `Re mean(f k)` over the unit small ball: a single block in the
/// active grid point of `grand(k)`.
fn best_response(k: &GFunction, params: &SmallParams) -> Option<GFunction> {
    let a = params.grand().weights();
    let exps = params.grand().exponents();
    let norms: Vec<f64> = exps.iter().map(|&p| crate::norms::lp_norm(k, p).expect("p >= 1")).collect();
    let (j, best) = norms
        .iter()
        .zip(&a)
        .map(|(n, a)| n * a)
        .enumerate()
        .fold((0, 0.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    if !(best > 0.0) {
        return None;
    }
    let p = exps[j];
    let w = 1.0 / a[j];
    let nk = norms[j];
    Some(k.map(|v| {
        let r = v.norm();
        let phase = if r > 0.0 { v.conj() / r } else { Complex64::new(1.0, 0.0) };
        let mag = if p == 1.0 { 1.0 } else { (r / nk).powf(p - 1.0) };
        phase * (mag / w)
    }))
}

/// `k` with `mean(h B(f,g)) = mean(f k)` (`which = 0`) or `mean(g k)` (`which = 1`).
fn adjoint(m: &Symbol, f: &GFunction, g: &GFunction, h: &GFunction, which: usize) -> GFunction {
    let spec = m.spec();
    let n = spec.order();
    let (fh, gh, hh) = (fourier_forward(f), fourier_forward(g), fourier_forward(h));
    let big = DualFunction::from_fn(spec, |a| {
        (0..n)
            .map(|b| {
                let (s, t) = if which == 0 { (a, b) } else { (b, a) };
                let other = if which == 0 { gh.at(t) } else { fh.at(s) };
                other * m.at(s, t) * hh.at(spec.neg_idx(spec.add_idx(s, t)))
            })
            .sum()
    });
    fourier_inverse(&big).reflect()
}

fn run_restart(
    m: &Symbol,
    params: &MultiplierParams,
    opts: &EstimateOptions,
    restart: usize,
) -> Result<Option<(RatioValue, GFunction, GFunction)>> {
    let spec = m.spec();
    let [s1, s2, s3] = params.small_params()?;
    let (mut f, mut g) = if restart == 0 {
        let one = GFunction::constant(spec, Complex64::new(1.0, 0.0));
        (one.clone(), one)
    } else {
        let mut rng = Gaussian::keyed(opts.seed, &format!("estimate-lower/{restart}"));
        (rng.g_function(spec), rng.g_function(spec))
    };
    let mut best: Option<(RatioValue, GFunction, GFunction)> = None;
    let mut consider = |r: RatioValue, f: &GFunction, g: &GFunction| {
        if best.as_ref().is_none_or(|b| r.lower > b.0.lower) {
            best = Some((r, f.clone(), g.clone()));
        }
    };
    consider(ratio(m, &f, &g, params, &opts.solver)?, &f, &g);
    for _ in 0..opts.budget {
        for which in 0..2 {
            let image = apply(m, &f, &g)?;
            let cert = small_norm(&image, &s3, &opts.solver);
            if cert.lower <= 0.0 {
                return Ok(best);
            }
            let k = adjoint(m, &f, &g, &cert.witness_dual, which);
            let target = if which == 0 { &s1 } else { &s2 };
            match best_response(&k, target) {
                Some(next) if which == 0 => f = next,
                Some(next) => g = next,
                None => return Ok(best),
            }
        }
        consider(ratio(m, &f, &g, params, &opts.solver)?, &f, &g);
    }
    Ok(best)
}

/// Alternating ascent over witness pairs with seeded restarts.
///
/// Restart 0 starts from constants; the others from complex Gaussian pairs.
/// The result is the best certified lower ratio seen, so it is nondecreasing
/// in the budget for a fixed seed.
pub fn estimate_lower(m: &Symbol, params: &MultiplierParams, opts: &EstimateOptions) -> Result<LowerBound> {
    if opts.budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    let runs: Vec<Result<Option<(RatioValue, GFunction, GFunction)>>> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| run_restart(m, params, opts, r))
        .collect();
    let mut best: Option<(usize, RatioValue, GFunction, GFunction)> = None;
    for (r, run) in runs.into_iter().enumerate() {
        if let Some((rv, f, g)) = run? {
            if best.as_ref().is_none_or(|b| rv.lower > b.1.lower) {
                best = Some((r, rv, f, g));
            }
        }
    }
    let (restart, rv, f, g) = best.ok_or_else(|| Error::ZeroDenominator("no usable witness".into()))?;
    Ok(LowerBound { value: rv.lower, ratio: rv, restart, budget: opts.budget, witness_f: f, witness_g: g })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormBound {
    pub lower: Option<LowerBound>,
    pub upper: UpperBound,
    pub params: MultiplierParams,
}

impl NormBound {
    /// True when a finite upper bound sits below the lower bound by more than `tol`.
    pub fn inconsistent(&self, tol: f64) -> bool {
        match (&self.lower, self.upper.value) {
            (Some(l), Some(u)) => l.value > u + tol,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrilinearReport {
    pub trials: usize,
    pub violations: usize,
    pub bound: Option<f64>,
    /// Largest `|T(f,g,h)| / (small(f) small(g) grand(h))` seen.
    pub max_ratio: f64,
}

/// Samples `|T_m(f,g,h)| ≤ U small(f) small(g) grand(h)` with `U` from [`bound_upper`].
pub fn trilinear_bound_check(
    m: &Symbol,
    params: &MultiplierParams,
    trials: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<TrilinearReport> {
    let upper = bound_upper(m, params)?;
    let [s1, s2, s3] = params.small_params()?;
    let spec = m.spec();
    let results: Vec<Result<(f64, bool)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = Gaussian::keyed(seed, &format!("trilinear/{i}"));
            let (f, g, h) = (rng.g_function(spec), rng.g_function(spec), rng.g_function(spec));
            let t = trilinear(m, &f, &g, &h)?.norm();
            let (fc, gc) = (small_norm(&f, &s1, opts), small_norm(&g, &s2, opts));
            let gh = grand_norm(&h, s3.grand());
            let ratio = t / (fc.value * gc.value * gh);
            let ok = upper.value.is_none_or(|u| t <= u * fc.lower * gc.lower * gh * (1.0 + 1e-12) + 1e-14);
            Ok((ratio, ok))
        })
        .collect();
    let mut max_ratio = 0.0f64;
    let mut violations = 0;
    for r in results {
        let (ratio, ok) = r?;
        max_ratio = max_ratio.max(ratio);
        violations += usize::from(!ok);
    }
    Ok(TrilinearReport { trials, violations, bound: upper.value, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::norms::GridSpec;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn flat_params() -> MultiplierParams {
        MultiplierParams::example1(0.0, GridSpec { count: 12, min_fraction: 1e-3 })
    }

    #[test]
    fn ratio_examples() {
        let g = GroupSpec::cyclic(8).unwrap();
        let one = GFunction::constant(&g, c(1.0));
        let p = flat_params();
        let opts = SolverOptions::default();
        let r = ratio(&Symbol::constant(&g, c(1.0)), &one, &one, &p, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let mut rng = Gaussian::new(3);
        let (f, h) = (rng.g_function(&g), rng.g_function(&g));
        assert_eq!(ratio(&Symbol::constant(&g, c(0.0)), &f, &h, &p, &opts).unwrap().value, 0.0);
        let r1 = ratio(&Symbol::constant(&g, c(1.0)), &f, &h, &p, &opts).unwrap();
        let r3 = ratio(&Symbol::constant(&g, Complex64::new(0.0, 3.0)), &f, &h, &p, &opts).unwrap();
        assert!((r3.value - 3.0 * r1.value).abs() < 1e-8 * r3.value);
        assert!(ratio(&Symbol::constant(&g, c(1.0)), &GFunction::zeros(&g), &h, &p, &opts).is_err());
    }

    #[test]
    fn constant_symbol_lower_reaches_one() {
        let g = GroupSpec::cyclic(6).unwrap();
        let p = flat_params();
        let est = estimate_lower(&Symbol::constant(&g, c(1.0)), &p, &EstimateOptions { budget: 2, ..Default::default() }).unwrap();
        assert!(est.value >= 1.0 - 1e-9, "{}", est.value);
        let ub = bound_upper(&Symbol::constant(&g, c(1.0)), &p).unwrap();
        assert!(est.value <= ub.finite() + 1e-6);
        let zero = estimate_lower(&Symbol::constant(&g, c(0.0)), &p, &EstimateOptions { budget: 2, ..Default::default() }).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn lower_is_monotone_in_budget() {
        let g = GroupSpec::cyclic(6).unwrap();
        let p = MultiplierParams::example1(1.0, GridSpec { count: 6, min_fraction: 1e-3 });
        let m = Symbol::difference(&Gaussian::new(4).dual_function(&g));
        let mut prev = 0.0;
        for budget in [1, 2, 4] {
            let est = estimate_lower(&m, &p, &EstimateOptions { budget, restarts: 3, ..Default::default() }).unwrap();
            assert!(est.value >= prev);
            prev = est.value;
            let again = ratio(&m, &est.witness_f, &est.witness_g, &p, &SolverOptions::default()).unwrap();
            assert!((again.lower - est.value).abs() <= 1e-6 * est.value.max(1.0));
        }
    }

    #[test]
    fn upper_bound_rules() {
        let g = GroupSpec::cyclic(6).unwrap();
        let p = MultiplierParams::example1(1.0, GridSpec::default());
        let h = bound_upper(&Symbol::constant(&g, c(-2.0)), &p).unwrap();
        let hc = h.holder.unwrap().value;
        assert!((h.finite() - 2.0 * hc).abs() < 1e-15);
        let mut rng = Gaussian::new(5);
        let phi = rng.dual_function(&g.product(&g));
        let conv = Symbol::constant(&g, c(1.0)).convolve(&phi).unwrap();
        let b = bound_upper(&conv, &p).unwrap();
        assert!((b.finite() - phi.abs_sum() * hc).abs() < 1e-12 * b.finite());
        assert!(b.trace.iter().any(|s| s.rule == "thm5a"));
        let hl = Symbol::difference_kernel(&crate::multipliers::hl_kernel(&g, 1));
        assert!((bound_upper(&hl, &p).unwrap().finite() - hc).abs() < 1e-12);
        let general = Symbol::general(&g, phi).unwrap();
        let b = bound_upper(&general.translate(1, 2), &p).unwrap();
        assert!(b.value.is_none() && b.diagnostic.is_some());
        let bad = MultiplierParams::new(2.0, 2.0, 3.0, 1.0, GridSpec::default()).unwrap();
        assert!(matches!(bound_upper(&Symbol::constant(&g, c(1.0)), &bad), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn trilinear_checks() {
        let g = GroupSpec::cyclic(6).unwrap();
        let p = flat_params();
        let opts = SolverOptions::default();
        let zero = trilinear_bound_check(&Symbol::constant(&g, c(0.0)), &p, 5, 1, &opts).unwrap();
        assert_eq!(zero.max_ratio, 0.0);
        let one = trilinear_bound_check(&Symbol::constant(&g, c(1.0)), &p, 20, 1, &opts).unwrap();
        assert_eq!(one.violations, 0);
        assert!(one.max_ratio <= one.bound.unwrap() + 1e-9);
    }
}
