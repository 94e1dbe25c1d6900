use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::Status;
use crate::error::{Error, Result};
use crate::group::{Automorphism, GroupSpec};
use crate::multipliers::{
    apply, apply_general, dilate_function, hl_kernel, hl_maximal, hl_maximal_direct, hl_radii,
    kernel_apply, trilinear, MultiplierParams, Symbol,
};
use crate::norms::{
    exact_admissibility, grand_norm, holder_constant, lp_norm, relative_gap, small_norm,
    small_norm_dual, small_norm_primal, small_to_lebesgue_constant, GrandParams, GridSpec,
    SmallParams, SolverOptions,
};
use crate::opnorm::{bound_upper, ratio};
use crate::rng::Gaussian;
use crate::spectral::{
    convolve_g, fourier_forward, fourier_inverse, haar_integral, AtomicMeasure, DualFunction,
    GFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Pointwise equality; passes when the max abs error is within tolerance.
    Identity,
    /// Sampled inequality with certified brackets; passes with zero violations.
    Inequality,
    /// Exact rational arithmetic.
    Arithmetic,
    /// Measurement that records which of two forms holds.
    Record,
    /// Solver agreement.
    Solver,
}

pub(crate) struct Ctx<'a> {
    pub id: &'a str,
    pub spec: &'a GroupSpec,
    pub params: &'a MultiplierParams,
    pub seed: u64,
    pub trials: usize,
    pub solver: SolverOptions,
    pub tol: f64,
}

impl Ctx<'_> {
    fn rng(&self) -> Gaussian {
        Gaussian::keyed(self.seed, &format!("{}/{}", self.id, self.spec))
    }

    fn n(&self) -> usize {
        self.spec.order()
    }

    fn small(&self) -> Result<[SmallParams; 3]> {
        self.params.small_params()
    }
}

pub(crate) struct Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violations: Option<usize>,
    pub status: Status,
    pub detail: String,
}

type CheckFn = fn(&Ctx) -> Result<Outcome>;

const CHECKS: &[(&str, CheckKind, CheckFn)] = &[
    ("cor1", CheckKind::Inequality, cor1),
    ("duality-gap", CheckKind::Solver, duality_gap),
    ("eq2.11", CheckKind::Identity, eq2_11),
    ("eq2.12", CheckKind::Identity, eq2_12),
    ("eq2.16", CheckKind::Identity, eq2_16),
    ("eq2.21", CheckKind::Identity, eq2_21),
    ("eq2.23", CheckKind::Identity, eq2_23),
    ("eq2.25", CheckKind::Identity, eq2_25),
    ("eq2.26", CheckKind::Identity, eq2_26),
    ("eq2.26-variant", CheckKind::Record, eq2_26_variant),
    ("eq2.28", CheckKind::Identity, eq2_28),
    ("eq2.29", CheckKind::Identity, eq2_29),
    ("eq2.32", CheckKind::Identity, eq2_32),
    ("eq2.34", CheckKind::Identity, eq2_34),
    ("eq2.36", CheckKind::Identity, eq2_36),
    ("eq2.38", CheckKind::Identity, eq2_38),
    ("eq2.40", CheckKind::Identity, eq2_40),
    ("eq2.6", CheckKind::Identity, eq2_6),
    ("example1", CheckKind::Arithmetic, example1),
    ("example2", CheckKind::Inequality, example2),
    ("example4", CheckKind::Inequality, example4),
    ("lemma1", CheckKind::Inequality, lemma1),
    ("lemma2", CheckKind::Identity, lemma2),
    ("prop1", CheckKind::Identity, prop1),
    ("prop2", CheckKind::Identity, prop2),
    ("prop3", CheckKind::Inequality, prop3),
    ("prop4", CheckKind::Identity, prop4),
    ("prop5a", CheckKind::Identity, prop5a),
    ("prop5b", CheckKind::Identity, prop5b),
    ("prop6", CheckKind::Inequality, prop6),
    ("prop7", CheckKind::Inequality, prop7),
    ("theta0-reduction", CheckKind::Solver, theta0_reduction),
    ("thm2a", CheckKind::Identity, thm2a),
    ("thm2b", CheckKind::Identity, thm2b),
    ("thm2b-transport", CheckKind::Identity, thm2b_transport),
    ("thm3", CheckKind::Identity, thm3),
    ("thm4-degenerate", CheckKind::Identity, thm4_degenerate),
    ("thm5a", CheckKind::Inequality, thm5a),
    ("thm5b", CheckKind::Inequality, thm5b),
    ("thm5c", CheckKind::Inequality, thm5c),
    ("thm6", CheckKind::Inequality, thm6),
    ("thm7a", CheckKind::Inequality, thm7a),
    ("thm7b", CheckKind::Inequality, thm7b),
];

/// Every known check id, sorted.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn check_kind(id: &str) -> Result<CheckKind> {
    lookup(id).map(|c| c.1)
}

fn lookup(id: &str) -> Result<&'static (&'static str, CheckKind, CheckFn)> {
    CHECKS.iter().find(|c| c.0 == id).ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

pub(crate) fn run_check(ctx: &Ctx) -> Result<Outcome> {
    (lookup(ctx.id)?.2)(ctx)
}

#[derive(Default)]
struct Diff {
    err: f64,
    lhs: f64,
    rhs: f64,
    count: usize,
}

impl Diff {
    fn vals(&mut self, a: &[Complex64], b: &[Complex64]) {
        for (x, y) in a.iter().zip(b) {
            self.err = self.err.max((x - y).norm());
            self.lhs = self.lhs.max(x.norm());
            self.rhs = self.rhs.max(y.norm());
        }
        self.count += 1;
    }

    fn g(&mut self, a: &GFunction, b: &GFunction) {
        self.vals(a.values(), b.values());
    }

    fn scalar(&mut self, a: Complex64, b: Complex64) {
        self.vals(&[a], &[b]);
    }

    fn finish(self, tol: f64, note: &str) -> Outcome {
        let status = if self.err <= tol { Status::Pass } else { Status::Fail };
        let mut detail = format!("{} comparisons, max abs error {:.3e}", self.count, self.err);
        if !note.is_empty() {
            detail = format!("{note}; {detail}");
        }
        Outcome { lhs: self.lhs, rhs: self.rhs, margin: self.err, violations: None, status, detail }
    }
}

struct Ineq {
    worst: Option<(f64, f64, f64)>,
    violations: usize,
    count: usize,
    unconverged: usize,
}

impl Ineq {
    fn new() -> Self {
        Self { worst: None, violations: 0, count: 0, unconverged: 0 }
    }

    /// `lhs` should be an upper estimate of the left side, `rhs` a lower estimate of the right.
    fn push(&mut self, lhs: f64, rhs: f64, converged: bool) {
        let slack = if rhs > 0.0 { (rhs - lhs) / rhs } else if lhs <= 0.0 { 0.0 } else { -1.0 };
        if lhs > rhs * (1.0 + 1e-10) + 1e-14 {
            self.violations += 1;
        }
        if self.worst.is_none_or(|w| slack < w.2) {
            self.worst = Some((lhs, rhs, slack));
        }
        self.count += 1;
        self.unconverged += usize::from(!converged);
    }

    fn finish(self, note: &str) -> Outcome {
        let (lhs, rhs, margin) = self.worst.unwrap_or((0.0, 0.0, 0.0));
        let status = if self.violations == 0 { Status::Pass } else { Status::Fail };
        let mut detail = format!(
            "{} trials, {} violations, worst relative slack {:.3e}",
            self.count, self.violations, margin
        );
        if self.unconverged > 0 {
            detail.push_str(&format!(", {} certificates above the gap tolerance", self.unconverged));
        }
        if !note.is_empty() {
            detail = format!("{note}; {detail}");
        }
        Outcome { lhs, rhs, margin, violations: Some(self.violations), status, detail }
    }
}

fn general(rng: &mut Gaussian, spec: &GroupSpec) -> Result<Symbol> {
    Symbol::general(spec, rng.dual_function(&spec.product(spec)))
}

/// All pairs on small groups, otherwise eight seeded samples.
fn pairs(rng: &mut Gaussian, n: usize, exhaustive_up_to: usize) -> Vec<(usize, usize)> {
    if n * n <= exhaustive_up_to {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        (0..8).map(|_| (rng.below(n), rng.below(n))).collect()
    }
}

fn random_automorphism(rng: &mut Gaussian, spec: &GroupSpec) -> Automorphism {
    let all: Vec<Automorphism> = Automorphism::all(spec).into_iter().filter(|a| !a.is_identity()).collect();
    if all.is_empty() {
        Automorphism::identity(spec)
    } else {
        all[rng.below(all.len())].clone()
    }
}

fn sum_scaled(spec: &GroupSpec, terms: impl Iterator<Item = (Complex64, GFunction)>) -> GFunction {
    let mut acc = vec![Complex64::new(0.0, 0.0); spec.order()];
    for (w, f) in terms {
        for (a, v) in acc.iter_mut().zip(f.values()) {
            *a += w * v;
        }
    }
    GFunction::new(spec, acc).expect("finite sum")
}

fn eq2_6(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g, h) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let mut d = Diff::default();
    let rhs = haar_integral(&h.mul(&apply(&m, &f, &g)?.reflect())?);
    d.scalar(trilinear(&m, &f, &g, &h)?, rhs);
    Ok(d.finish(ctx.tol, "trilinear form vs pairing of h with the reflected image"))
}

fn eq2_11(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let f = rng.g_function(ctx.spec);
    let fh = fourier_forward(&f);
    let mut d = Diff::default();
    for s0 in 0..ctx.n() {
        let neg = ctx.spec.neg_idx(s0);
        d.vals(fourier_forward(&f.modulate_idx(neg)).values(), fh.translate_idx(neg).values());
    }
    Ok(d.finish(ctx.tol, "transform of a modulation is a shifted transform"))
}

fn eq2_12(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let mut d = Diff::default();
    for (s0, t0) in pairs(&mut rng, ctx.n(), 256) {
        let lhs = apply(&m.translate(s0, t0), &f, &g)?;
        let rhs = apply(&m, &f.modulate_idx(sp.neg_idx(s0)), &g.modulate_idx(sp.neg_idx(t0)))?
            .modulate_idx(sp.add_idx(s0, t0));
        d.g(&lhs, &rhs);
    }
    Ok(d.finish(ctx.tol, ""))
}

fn thm2b(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let mut d = Diff::default();
    for (s0, t0) in pairs(&mut rng, ctx.n(), 256) {
        let lhs = apply(&m.modulate(s0, t0), &f, &g)?;
        let rhs = apply(&m, &f.translate_idx(sp.neg_idx(s0)), &g.translate_idx(sp.neg_idx(t0)))?;
        d.g(&lhs, &rhs);
    }
    Ok(d.finish(ctx.tol, ""))
}

fn eq2_16(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let mut d = Diff::default();
    for a in Automorphism::all(ctx.spec) {
        let lhs = apply(&m.dilate(&a)?, &f, &g)?;
        let inner = apply(&m, &dilate_function(&f, &a)?, &dilate_function(&g, &a)?)?;
        d.g(&lhs, &dilate_function(&inner, &a.inverse())?);
    }
    Ok(d.finish(ctx.tol, "every automorphism"))
}

fn eq2_21(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let phi = rng.dual_function(&ctx.spec.product(ctx.spec));
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let n = ctx.n();
    let lhs = apply(&m.convolve(&phi)?, &f, &g)?;
    let terms = (0..n * n)
        .map(|i| Ok((phi.at(i), apply(&m.translate(i / n, i % n), &f, &g)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut d = Diff::default();
    d.g(&lhs, &sum_scaled(ctx.spec, terms.into_iter()));
    Ok(d.finish(ctx.tol, "superposition of translated symbols"))
}

fn eq2_23(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let phi = rng.g_function(&ctx.spec.product(ctx.spec));
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let (n, sp) = (ctx.n(), ctx.spec);
    let lhs = apply(&m.product_transform(&phi)?, &f, &g)?;
    let w = 1.0 / (n * n) as f64;
    let terms = (0..n * n)
        .map(|i| {
            let (u, v) = (i / n, i % n);
            Ok((phi.at(i) * w, apply(&m.modulate(sp.neg_idx(u), sp.neg_idx(v)), &f, &g)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = Diff::default();
    d.g(&lhs, &sum_scaled(sp, terms.into_iter()));
    Ok(d.finish(ctx.tol, "mean of modulated symbols weighted by Phi"))
}

fn eq2_25(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let two = Complex64::new(2.0, 0.0);
    let mut d = Diff::default();
    d.g(&apply_general(&Symbol::constant(ctx.spec, two), &f, &g)?, &f.mul(&g)?.scale(two));
    Ok(d.finish(ctx.tol, "m = 2"))
}

struct MeasureCase {
    lambda: AtomicMeasure,
    a: Automorphism,
    b: Automorphism,
    f: GFunction,
    g: GFunction,
}

fn measure_case(ctx: &Ctx) -> Result<MeasureCase> {
    let mut rng = ctx.rng();
    let n = ctx.n();
    let mut atoms: Vec<(usize, Complex64)> = Vec::new();
    while atoms.len() < 3.min(n) {
        let y = rng.below(n);
        let w = rng.complex();
        if atoms.iter().all(|&(x, _)| x != y) {
            atoms.push((y, w));
        }
    }
    let lambda = AtomicMeasure::new(ctx.spec, atoms)?;
    let a = random_automorphism(&mut rng, ctx.spec);
    let all = Automorphism::all(ctx.spec);
    let b = all.iter().find(|b| **b != a).cloned().unwrap_or_else(|| a.clone());
    Ok(MeasureCase { lambda, a, b, f: rng.g_function(ctx.spec), g: rng.g_function(ctx.spec) })
}

fn atom_sum(c: &MeasureCase, b: &Automorphism) -> GFunction {
    let sp = c.f.spec();
    GFunction::from_fn(sp, |x| {
        c.lambda
            .atoms()
            .iter()
            .map(|&(y, w)| w * c.f.at(sp.sub_idx(x, c.a.apply_idx(y))) * c.g.at(sp.sub_idx(x, b.apply_idx(y))))
            .sum()
    })
}

fn eq2_26(ctx: &Ctx) -> Result<Outcome> {
    let c = measure_case(ctx)?;
    let m = Symbol::measure(&c.lambda, &c.a, &c.b)?;
    let mut d = Diff::default();
    d.g(&apply_general(&m, &c.f, &c.g)?, &atom_sum(&c, &c.b));
    Ok(d.finish(ctx.tol, "general form sum_j w_j f(x - A y_j) g(x - B y_j)"))
}

fn eq2_26_variant(ctx: &Ctx) -> Result<Outcome> {
    let c = measure_case(ctx)?;
    let m = Symbol::measure(&c.lambda, &c.a, &c.b)?;
    let image = apply_general(&m, &c.f, &c.g)?;
    let general_err = image.max_abs_diff(&atom_sum(&c, &c.b));
    let printed_err = image.max_abs_diff(&atom_sum(&c, &c.a));
    let matches = |e: f64| e <= ctx.tol;
    let detail = if c.a == c.b {
        format!("A = B on this group, both forms coincide (error {general_err:.3e})")
    } else {
        format!(
            "A = {:?}, B = {:?}: f(x-Ay)g(x-By) {} (error {general_err:.3e}); f(x-Ay)g(x-Ay) {} (error {printed_err:.3e})",
            c.a.units(),
            c.b.units(),
            if matches(general_err) { "matches" } else { "does not match" },
            if matches(printed_err) { "matches" } else { "does not match" },
        )
    };
    let status = if matches(general_err) { Status::Pass } else { Status::Fail };
    Ok(Outcome { lhs: general_err, rhs: printed_err, margin: general_err, violations: None, status, detail })
}

fn eq2_28(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let pair = ctx.spec.product(ctx.spec);
    let (p1, phi, p2) = (rng.g_function(ctx.spec), rng.g_function(&pair), rng.g_function(ctx.spec));
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let m = Symbol::triple(&p1, &phi, &p2)?;
    let inner = Symbol::general(ctx.spec, fourier_forward(&phi))?;
    let mut d = Diff::default();
    d.g(
        &apply_general(&m, &f, &g)?,
        &apply_general(&inner, &convolve_g(&f, &p1)?, &convolve_g(&g, &p2)?)?,
    );
    Ok(d.finish(ctx.tol, ""))
}

fn direct_kernel(f: &GFunction, g: &GFunction, k: &GFunction) -> GFunction {
    let sp = f.spec();
    let n = sp.order();
    GFunction::from_fn(sp, |x| {
        (0..n).map(|y| f.at(sp.sub_idx(x, y)) * g.at(sp.add_idx(x, y)) * k.at(y)).sum::<Complex64>() / n as f64
    })
}

fn eq2_29(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let k = rng.g_function(ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let mut d = Diff::default();
    d.g(&apply_general(&Symbol::difference_kernel(&k), &f, &g)?, &direct_kernel(&f, &g, &k));
    Ok(d.finish(ctx.tol, "general path vs direct kernel average"))
}

fn eq2_32(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let (af, ag) = (f.abs(), g.abs());
    let mut best = vec![0.0f64; ctx.n()];
    for r in hl_radii(ctx.spec) {
        let img = apply_general(&Symbol::difference_kernel(&hl_kernel(ctx.spec, r)), &af, &ag)?;
        for (b, v) in best.iter_mut().zip(img.values()) {
            *b = b.max(v.re);
        }
    }
    let via_symbols = GFunction::from_fn(ctx.spec, |x| Complex64::new(best[x], 0.0));
    let direct = hl_maximal_direct(&f, &g)?;
    let mut d = Diff::default();
    d.g(&direct, &via_symbols);
    d.g(&direct, &hl_maximal(&f, &g)?);
    Ok(d.finish(ctx.tol, "direct ball averages vs sup of difference-symbol operators"))
}

fn diff_base(rng: &mut Gaussian, spec: &GroupSpec) -> Symbol {
    Symbol::difference(&rng.dual_function(spec))
}

fn eq2_34(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let base = diff_base(&mut rng, ctx.spec);
    let phi = rng.dual_function(ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let terms = (0..ctx.n())
        .map(|u| Ok((phi.at(u), apply(&base, &f.modulate_idx(sp.neg_idx(u)), &g)?.modulate_idx(u))))
        .collect::<Result<Vec<_>>>()?;
    let mut d = Diff::default();
    d.g(&apply_general(&base.diff_convolve(&phi)?, &f, &g)?, &sum_scaled(sp, terms.into_iter()));
    Ok(d.finish(ctx.tol, ""))
}

fn eq2_36(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let base = diff_base(&mut rng, ctx.spec);
    let phi = rng.g_function(ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let w = 1.0 / ctx.n() as f64;
    let terms = (0..ctx.n())
        .map(|u| Ok((phi.at(u) * w, apply(&base, &f.translate_idx(u), &g.translate_idx(sp.neg_idx(u)))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut d = Diff::default();
    d.g(&apply_general(&base.diff_product(&phi)?, &f, &g)?, &sum_scaled(sp, terms.into_iter()));
    Ok(d.finish(ctx.tol, ""))
}

fn eq2_38(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let base = diff_base(&mut rng, ctx.spec);
    let phi = rng.g_function(ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let mut d = Diff::default();
    d.g(&apply_general(&base.sum_filter(&phi)?, &f, &g)?, &convolve_g(&phi, &apply(&base, &f, &g)?)?);
    Ok(d.finish(ctx.tol, ""))
}

fn character_composite(spec: &GroupSpec, gamma: usize, a: &Automorphism) -> GFunction {
    GFunction::from_fn(spec, |x| spec.character_idx(gamma, a.apply_idx(x)))
}

fn eq2_40(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let k = rng.dual_function(ctx.spec);
    let a = random_automorphism(&mut rng, ctx.spec);
    let m = Symbol::difference(&k);
    let integral = haar_integral(&fourier_inverse(&k));
    let mut d = Diff::default();
    for gamma in 0..ctx.n() {
        let f = character_composite(ctx.spec, gamma, &a);
        let want = f.mul(&f)?.scale(integral);
        d.g(&apply_general(&m, &f, &f)?, &want);
        d.g(&apply(&m, &f, &f)?, &want);
    }
    Ok(d.finish(ctx.tol, "f = <gamma, Ax> for every gamma"))
}

fn prop1(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let psi = rng.dual_function(ctx.spec);
    let a = random_automorphism(&mut rng, ctx.spec);
    let mut d = Diff::default();
    d.vals(m.psi_weighted(&psi, &a)?.values().values(), m.dilate(&a)?.values().scale(psi.sum()).values());
    Ok(d.finish(ctx.tol, "the literal sum collapses to (sum Psi) m(A*s, A*t)"))
}

fn prop2(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let n = ctx.n();
    let pick = |rng: &mut Gaussian| {
        let mut u: Vec<usize> = Vec::new();
        while u.len() < 3.min(n) {
            let x = rng.below(n);
            if !u.contains(&x) {
                u.push(x);
            }
        }
        u
    };
    let (u1, u2) = (pick(&mut rng), pick(&mut rng));
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let w = Complex64::new(1.0 / (u1.len() * u2.len()) as f64, 0.0);
    let mut terms = Vec::new();
    for &u in &u1 {
        for &v in &u2 {
            terms.push((w, apply(&m.translate(sp.neg_idx(u), sp.neg_idx(v)), &f, &g)?));
        }
    }
    let mut d = Diff::default();
    d.g(&apply(&m.average(&u1, &u2)?, &f, &g)?, &sum_scaled(sp, terms.into_iter()));
    Ok(d.finish(ctx.tol, "average of translated operators"))
}

fn prop4(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let k = rng.dual_function(ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let mut d = Diff::default();
    d.g(&kernel_apply(&k, &f, &g)?, &apply_general(&Symbol::difference(&k), &f, &g)?);
    Ok(d.finish(ctx.tol, "kernel path vs general path"))
}

fn prop5a(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let base = diff_base(&mut rng, ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let mut d = Diff::default();
    for (y1, y2) in pairs(&mut rng, ctx.n(), 256) {
        let lhs = apply_general(&base.diff_translate(sp.add_idx(y1, y2))?, &f, &g)?;
        let rhs = apply(&base, &f.modulate_idx(sp.neg_idx(y1)), &g.modulate_idx(y2))?.modulate_idx(sp.sub_idx(y1, y2));
        d.g(&lhs, &rhs);
    }
    Ok(d.finish(ctx.tol, ""))
}

fn prop5b(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let base = diff_base(&mut rng, ctx.spec);
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let mut d = Diff::default();
    for y in 0..ctx.n() {
        let lhs = apply_general(&base.diff_modulate(y)?, &f, &g)?;
        d.g(&lhs, &apply(&base, &f.translate_idx(sp.neg_idx(y)), &g.translate_idx(y))?);
    }
    Ok(d.finish(ctx.tol, "every y"))
}

fn lemma2(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let f = rng.g_function(ctx.spec);
    let [s1, ..] = ctx.small()?;
    let base_small = small_norm(&f, &s1, &ctx.solver).value;
    let base_grand = grand_norm(&f, s1.grand());
    let mut d = Diff::default();
    for a in Automorphism::all(ctx.spec).into_iter().take(16) {
        let fa = dilate_function(&f, &a)?;
        d.scalar(small_norm(&fa, &s1, &ctx.solver).value.into(), base_small.into());
        d.scalar(grand_norm(&fa, s1.grand()).into(), base_grand.into());
        d.scalar(a.modulus().into(), 1.0.into());
    }
    Ok(d.finish(ctx.tol, "dilation leaves small and grand norms unchanged, |A| = 1"))
}

fn thm4_degenerate(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let a = random_automorphism(&mut rng, ctx.spec);
    let mut orbit = vec![Automorphism::identity(ctx.spec)];
    loop {
        let last = orbit.last().expect("nonempty");
        let next = Automorphism::new(
            ctx.spec,
            &last.units().iter().zip(a.units()).map(|(x, y)| (x * y) as i64).collect::<Vec<_>>(),
        )?;
        if next.is_identity() {
            break;
        }
        orbit.push(next);
    }
    let n = ctx.n();
    let k = orbit.len() as f64;
    let inv = Symbol::general(
        ctx.spec,
        DualFunction::from_fn(&ctx.spec.product(ctx.spec), |i| {
            orbit.iter().map(|b| m.at(b.adjoint_apply_idx(i / n), b.adjoint_apply_idx(i % n))).sum::<Complex64>() / k
        }),
    )?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let mut d = Diff::default();
    d.g(&apply(&inv.dilate(&a)?, &f, &g)?, &apply(&inv, &f, &g)?);
    Ok(d.finish(ctx.tol, "A*-invariant symbol, |A| = 1; exponent conclusion not asserted"))
}

fn transport(ctx: &Ctx, cases: Vec<(Symbol, GFunction, GFunction)>, m: &Symbol, f: &GFunction, g: &GFunction) -> Result<Outcome> {
    let mut d = Diff::default();
    for (mt, ft, gt) in cases {
        let lhs = ratio(&mt, f, g, ctx.params, &ctx.solver)?.dual_value;
        let rhs = ratio(m, &ft, &gt, ctx.params, &ctx.solver)?.dual_value;
        d.scalar(lhs.into(), rhs.into());
    }
    Ok(d.finish(ctx.tol, "dual-certified ratio equality under witness transport"))
}

fn thm2a(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let cases = pairs(&mut rng, ctx.n(), 36)
        .into_iter()
        .map(|(s0, t0)| (m.translate(s0, t0), f.modulate_idx(sp.neg_idx(s0)), g.modulate_idx(sp.neg_idx(t0))))
        .collect();
    transport(ctx, cases, &m, &f, &g)
}

fn thm2b_transport(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let sp = ctx.spec;
    let cases = pairs(&mut rng, ctx.n(), 36)
        .into_iter()
        .map(|(s0, t0)| (m.modulate(s0, t0), f.translate_idx(sp.neg_idx(s0)), g.translate_idx(sp.neg_idx(t0))))
        .collect();
    transport(ctx, cases, &m, &f, &g)
}

fn thm3(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = general(&mut rng, ctx.spec)?;
    let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
    let cases = Automorphism::all(ctx.spec)
        .into_iter()
        .take(8)
        .map(|a| Ok((m.dilate(&a)?, dilate_function(&f, &a)?, dilate_function(&g, &a)?)))
        .collect::<Result<Vec<_>>>()?;
    transport(ctx, cases, &m, &f, &g)
}

fn example1(_ctx: &Ctx) -> Result<Outcome> {
    let r = Ratio::from_integer(3);
    let ex = exact_admissibility(Ratio::from_integer(9), Ratio::from_integer(10), r);
    let one = Ratio::from_integer(1);
    let to_f = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
    let ok = ex.admissible && ex.p_conj == Ratio::new(90, 19) && ex.r_times_r_conj == Ratio::new(9, 2);
    Ok(Outcome {
        lhs: to_f(ex.r_times_r_conj),
        rhs: to_f(ex.p_conj + one),
        margin: to_f(ex.p_conj + one - ex.r_times_r_conj),
        violations: None,
        status: if ok { Status::Pass } else { Status::Fail },
        detail: format!(
            "p1' = 9, p2' = 10, r = 3: p' = {}, r*r' = {} < p'+1 = {}",
            ex.p_conj,
            ex.r_times_r_conj,
            ex.p_conj + one
        ),
    })
}

fn lemma1(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let [s1, s2, s3] = ctx.small()?;
    let c = holder_constant(&s1, &s2, &s3)?.value;
    let mut q = Ineq::new();
    for _ in 0..ctx.trials {
        let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
        let (fc, gc) = (small_norm(&f, &s1, &ctx.solver), small_norm(&g, &s2, &ctx.solver));
        let pc = small_norm(&f.mul(&g)?, &s3, &ctx.solver);
        q.push(pc.upper, c * fc.lower * gc.lower, fc.converged && gc.converged && pc.converged);
    }
    Ok(q.finish(&format!("holder constant {c:.6e}")))
}

/// Defining inequality `small(B_m(f,g)) ≤ U small(f) small(g)` with `U` from the bound fold.
fn operator_bound(ctx: &Ctx, m: &Symbol, rng: &mut Gaussian) -> Result<Outcome> {
    let ub = bound_upper(m, ctx.params)?;
    let Some(u) = ub.value else {
        return Err(Error::InvalidParameter("no upper bound for this symbol".into()));
    };
    let [s1, s2, s3] = ctx.small()?;
    let mut q = Ineq::new();
    for _ in 0..ctx.trials {
        let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
        let (fc, gc) = (small_norm(&f, &s1, &ctx.solver), small_norm(&g, &s2, &ctx.solver));
        let bc = small_norm(&apply(m, &f, &g)?, &s3, &ctx.solver);
        q.push(bc.upper, u * fc.lower * gc.lower, fc.converged && gc.converged && bc.converged);
    }
    let rules: Vec<&str> = ub.trace.iter().map(|s| s.rule.as_str()).collect();
    Ok(q.finish(&format!("bound {u:.6e} via {}", rules.join(" > "))))
}

fn thm5a(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let phi = rng.dual_function(&ctx.spec.product(ctx.spec));
    let m = Symbol::constant(ctx.spec, rng.complex()).convolve(&phi)?;
    operator_bound(ctx, &m, &mut rng)
}

fn thm5b(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let phi = rng.g_function(&ctx.spec.product(ctx.spec));
    let m = Symbol::difference(&rng.dual_function(ctx.spec)).product_transform(&phi)?;
    operator_bound(ctx, &m, &mut rng)
}

fn thm5c(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = Symbol::constant(ctx.spec, rng.complex());
    operator_bound(ctx, &m, &mut rng)
}

fn cor1(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let delta = GFunction::delta(ctx.spec);
    let m = Symbol::triple(&delta, &rng.g_function(&ctx.spec.product(ctx.spec)), &delta)?;
    operator_bound(ctx, &m, &mut rng)
}

fn thm6(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let pair = ctx.spec.product(ctx.spec);
    let m = Symbol::triple(&rng.g_function(ctx.spec), &rng.g_function(&pair), &rng.g_function(ctx.spec))?;
    operator_bound(ctx, &m, &mut rng)
}

fn thm7a(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = diff_base(&mut rng, ctx.spec).diff_convolve(&rng.dual_function(ctx.spec))?;
    operator_bound(ctx, &m, &mut rng)
}

fn thm7b(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = diff_base(&mut rng, ctx.spec).diff_product(&rng.g_function(ctx.spec))?;
    operator_bound(ctx, &m, &mut rng)
}

fn example2(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = Symbol::difference_kernel(&rng.g_function(ctx.spec));
    operator_bound(ctx, &m, &mut rng)
}

fn prop3(ctx: &Ctx) -> Result<Outcome> {
    let c = measure_case(ctx)?;
    let m = Symbol::measure(&c.lambda, &c.a, &c.b)?;
    operator_bound(ctx, &m, &mut ctx.rng())
}

fn prop6(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let m = diff_base(&mut rng, ctx.spec).sum_filter(&rng.g_function(ctx.spec))?;
    operator_bound(ctx, &m, &mut rng)
}

fn example4(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let [s1, s2, s3] = ctx.small()?;
    let c = holder_constant(&s1, &s2, &s3)?.value;
    let mut q = Ineq::new();
    for _ in 0..ctx.trials {
        let (f, g) = (rng.g_function(ctx.spec), rng.g_function(ctx.spec));
        let (fc, gc) = (small_norm(&f, &s1, &ctx.solver), small_norm(&g, &s2, &ctx.solver));
        let mc = small_norm(&hl_maximal(&f, &g)?, &s3, &ctx.solver);
        q.push(mc.upper, c * fc.lower * gc.lower, fc.converged && gc.converged && mc.converged);
    }
    Ok(q.finish(&format!("maximal function against holder constant {c:.6e} (kernel L1 norm 1)")))
}

fn prop7(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let k = rng.dual_function(ctx.spec);
    let m = Symbol::difference(&k);
    let a = random_automorphism(&mut rng, ctx.spec);
    let [s1, s2, s3] = ctx.small()?;
    let c3 = small_to_lebesgue_constant(&s3);
    let u = bound_upper(&m, ctx.params)?.finite();
    let lhs = haar_integral(&fourier_inverse(&k)).norm();
    let p3c = s3.p_conj();
    let mut q = Ineq::new();
    for _ in 0..ctx.trials.max(1) {
        let f = character_composite(ctx.spec, rng.below(ctx.n()), &a);
        let image = apply(&m, &f, &f)?;
        let bc = small_norm(&image, &s3, &ctx.solver);
        // ‖B_K(f,f)‖_{p3'} equals |∫K^∨| and is dominated by C3 small(B_K(f,f)).
        q.push(lp_norm(&image, p3c)?, c3 * bc.lower, bc.converged);
        let (f1, f2) = (small_norm(&f, &s1, &ctx.solver), small_norm(&f, &s2, &ctx.solver));
        q.push(lhs, c3 * u * f1.lower * f2.lower, f1.converged && f2.converged);
    }
    Ok(q.finish(&format!("|int K^v| = {lhs:.6e}, C3 = {c3:.6e}, bound {u:.6e}")))
}

fn duality_gap(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let mut weak_ok = true;
    let mut count = 0;
    for _ in 0..ctx.trials.max(1) {
        let g = rng.g_function(ctx.spec);
        for s in ctx.small()? {
            let start = std::time::Instant::now();
            let dual = small_norm_dual(&g, &s, &ctx.solver);
            let primal = small_norm_primal(&g, &s, &ctx.solver);
            slowest = slowest.max(start.elapsed().as_secs_f64());
            weak_ok &= dual.lower <= primal.upper * (1.0 + 1e-12);
            worst = worst.max(relative_gap(dual.lower, primal.upper));
            count += 1;
        }
    }
    let tol = ctx.solver.tol_rel;
    let pass = weak_ok && worst <= tol && slowest <= 10.0;
    Ok(Outcome {
        lhs: worst,
        rhs: tol,
        margin: tol - worst,
        violations: None,
        status: if pass { Status::Pass } else { Status::Fail },
        detail: format!(
            "{count} certificates from independent primal and dual solvers, max gap {worst:.3e}, weak duality {}",
            if weak_ok { "holds" } else { "violated" }
        ),
    })
}

fn theta0_reduction(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    let grid = GridSpec { count: ctx.params.grid.count.max(8), min_fraction: 1e-3 };
    let tol = 0.02;
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.trials.max(1) {
        let f = rng.g_function(ctx.spec);
        for (p, pc) in [ctx.params.p1, ctx.params.p2, ctx.params.p3].into_iter().zip(ctx.params.conjugates()) {
            let lp = lp_norm(&f, p)?;
            let grand = grand_norm(&f, &GrandParams::geometric(p, 0.0, grid)?);
            worst = worst.max((grand - lp).abs() / lp);
            let small = small_norm(&f, &SmallParams::geometric(pc, 0.0, grid)?, &ctx.solver).value;
            let lpc = lp_norm(&f, pc)?;
            worst = worst.max((small - lpc).abs() / lpc);
        }
    }
    Ok(Outcome {
        lhs: worst,
        rhs: tol,
        margin: tol - worst,
        violations: None,
        status: if worst <= tol { Status::Pass } else { Status::Fail },
        detail: format!("theta = 0, eps_min = 1e-3 (p-1): max relative deviation from Lebesgue norms {worst:.3e}"),
    })
}
