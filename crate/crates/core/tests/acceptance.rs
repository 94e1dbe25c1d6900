//! Acceptance criteria 1 to 9. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any failure.

use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;

use grandsmall::multipliers::{apply, apply_oracle, MultiplierParams};
use grandsmall::norms::{
    exact_admissibility, grand_norm, lp_norm, small_norm, GrandParams, GridSpec, SmallParams, SolverOptions,
};
use grandsmall::opnorm::{bound_upper, estimate_lower, EstimateOptions};
use grandsmall::rng::Gaussian;
use grandsmall::spectral::{fourier_forward, fourier_inverse};
use grandsmall::verify::{run_suite, CheckRecord, Status, SuiteConfig};
use grandsmall::{AtomicMeasure, Automorphism, GroupSpec, Symbol};

struct Verdict {
    pass: bool,
    detail: String,
}

fn groups(specs: &[&str]) -> Vec<GroupSpec> {
    specs.iter().map(|s| s.parse().expect("valid spec")).collect()
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn summarize(records: &[CheckRecord]) -> (usize, usize, f64, Vec<String>) {
    let fails: Vec<String> = records
        .iter()
        .filter(|r| r.status == Status::Fail)
        .take(5)
        .map(|r| format!("{} {} seed {}: {}", r.check_id, r.group, r.seed, r.detail))
        .collect();
    let nfail = records.iter().filter(|r| r.status == Status::Fail).count();
    let worst = records.iter().map(|r| r.margin).fold(0.0, f64::max);
    (records.len(), nfail, worst, fails)
}

fn c1_identity_suite() -> Verdict {
    let selection = ids(&[
        "eq2.6", "eq2.11", "eq2.12", "thm2b", "eq2.16", "eq2.21", "eq2.23", "eq2.25", "eq2.28", "eq2.29", "eq2.32",
        "eq2.34", "eq2.36", "eq2.38", "eq2.40", "prop2", "prop5a", "prop5b",
    ]);
    let cfg = SuiteConfig { tolerance: 1e-9, ..SuiteConfig::default() };
    let start = Instant::now();
    let records = run_suite(&selection, &cfg).expect("suite runs");
    let secs = start.elapsed().as_secs_f64();
    let (n, nfail, worst, fails) = summarize(&records);
    Verdict {
        pass: nfail == 0 && n == selection.len() * 5 * 20 && secs < 300.0,
        detail: format!("{n} records over 5 groups x 20 seeds, max abs error {worst:.2e}, {secs:.1} s {fails:?}"),
    }
}

fn c2_brute_force() -> Verdict {
    let specs = groups(&["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z2xZ2", "Z2xZ3", "Z2xZ4", "Z2xZ2xZ2"]);
    let mut rng = Gaussian::keyed(0, "acceptance/brute-force");
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let spec = &specs[i % specs.len()];
        let m = Symbol::general(spec, rng.dual_function(&spec.product(spec))).unwrap();
        let (f, g) = (rng.g_function(spec), rng.g_function(spec));
        let fast = apply(&m, &f, &g).unwrap();
        let slow = apply_oracle(&m, &f, &g).unwrap();
        worst = worst.max(fast.max_abs_diff(&slow));
    }
    Verdict { pass: worst <= 1e-10, detail: format!("50 instances with |G| <= 8, max abs error {worst:.2e}") }
}

fn c3_duality() -> Verdict {
    let cfg = SuiteConfig {
        groups: groups(&["Z16"]),
        params: vec![MultiplierParams::example1(1.0, GridSpec { count: 6, min_fraction: 1e-3 })],
        seeds: (0..20).collect(),
        trials: 1,
        ..SuiteConfig::default()
    };
    let records = run_suite(&ids(&["duality-gap"]), &cfg).unwrap();
    let (n, nfail, _, fails) = summarize(&records);
    let gap = records.iter().map(|r| r.lhs).fold(0.0, f64::max);
    Verdict {
        pass: nfail == 0 && n == 20,
        detail: format!("Z16, 6-point grid, 20 inputs x 3 exponents, max relative gap {gap:.2e} {fails:?}"),
    }
}

fn c4_theta0() -> Verdict {
    let spec: GroupSpec = "Z32".parse().unwrap();
    let grid = GridSpec { count: 12, min_fraction: 1e-3 };
    let mut rng = Gaussian::keyed(0, "acceptance/theta0");
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f = rng.g_function(&spec);
        for p in [1.5, 2.0, 3.0, 10.0 / 9.0] {
            let pc = p / (p - 1.0);
            let grand = grand_norm(&f, &GrandParams::geometric(p, 0.0, grid).unwrap());
            let lp = lp_norm(&f, p).unwrap();
            worst = worst.max((grand - lp).abs() / lp);
            let small = small_norm(&f, &SmallParams::geometric(pc, 0.0, grid).unwrap(), &opts).value;
            let lpc = lp_norm(&f, pc).unwrap();
            worst = worst.max((small - lpc).abs() / lpc);
        }
    }
    Verdict {
        pass: worst <= 0.02,
        detail: format!("Z32, 10 inputs x 4 exponents, eps_min = 1e-3 (p-1), max relative deviation {worst:.2e}"),
    }
}

fn c5_lemma1() -> Verdict {
    let ex = exact_admissibility(Ratio::from_integer(9), Ratio::from_integer(10), Ratio::from_integer(3));
    let exact = ex.admissible
        && ex.p_conj == Ratio::new(90, 19)
        && ex.r_times_r_conj == Ratio::new(9, 2)
        && ex.r_times_r_conj < ex.p_conj + Ratio::from_integer(1);
    let cfg = SuiteConfig { groups: groups(&["Z16"]), seeds: (0..10).collect(), trials: 100, ..SuiteConfig::default() };
    let records = run_suite(&ids(&["lemma1"]), &cfg).unwrap();
    let trials: usize = records.len() * cfg.trials;
    let violations: usize = records.iter().filter_map(|r| r.violations).sum();
    let (_, nfail, _, fails) = summarize(&records);
    Verdict {
        pass: exact && nfail == 0 && violations == 0 && trials == 1000,
        detail: format!(
            "r*r' = {} < p'+1 = {} exactly: {exact}; {trials} trials on Z16, {violations} violations {fails:?}",
            ex.r_times_r_conj,
            ex.p_conj + Ratio::from_integer(1)
        ),
    }
}

fn c6_transport() -> Verdict {
    let cfg = SuiteConfig { groups: groups(&["Z6"]), seeds: vec![0, 1], ..SuiteConfig::default() };
    let records = run_suite(&ids(&["thm2a", "thm2b-transport"]), &cfg).unwrap();
    let (n, nfail, worst, fails) = summarize(&records);
    let exhaustive = records.iter().all(|r| r.detail.contains("36 comparisons"));
    Verdict {
        pass: nfail == 0 && exhaustive && worst <= 1e-9,
        detail: format!("{n} records, all 36 shifts each: {exhaustive}, max abs error {worst:.2e} {fails:?}"),
    }
}

fn corpus(spec: &GroupSpec, rng: &mut Gaussian) -> Vec<(&'static str, Symbol)> {
    let pair = spec.product(spec);
    let n = spec.order();
    let sparse_dual = |rng: &mut Gaussian| {
        let mut v = vec![Complex64::new(0.0, 0.0); pair.order()];
        for _ in 0..3 {
            v[rng.below(pair.order())] = rng.complex() * 0.3;
        }
        grandsmall::DualFunction::new(&pair, v).unwrap()
    };
    let autos = Automorphism::all(spec);
    let a = autos[rng.below(autos.len())].clone();
    let b = autos[rng.below(autos.len())].clone();
    let x0 = rng.below(n);
    let x1 = (x0 + 1 + rng.below(n - 1)) % n;
    let lambda = AtomicMeasure::new(spec, vec![(x0, rng.complex()), (x1, rng.complex())]).unwrap();
    let constant = Symbol::constant(spec, rng.complex());
    vec![
        ("constant", constant.clone()),
        ("convolved", Symbol::constant(spec, Complex64::new(1.0, 0.0)).convolve(&sparse_dual(rng)).unwrap()),
        ("product-transformed", constant.product_transform(&rng.g_function(&pair)).unwrap()),
        ("difference", Symbol::difference(&rng.dual_function(spec))),
        ("triple", Symbol::triple(&rng.g_function(spec), &rng.g_function(&pair), &rng.g_function(spec)).unwrap()),
        ("measure", Symbol::measure(&lambda, &a, &b).unwrap()),
        ("averaged", Symbol::difference(&rng.dual_function(spec)).average(&[0, 1], &[0, n - 1]).unwrap()),
        ("averaged-measure", Symbol::measure(&lambda, &a, &b).unwrap().average(&[1], &[0, 1]).unwrap()),
    ]
}

fn c7_bounds() -> Verdict {
    let params = MultiplierParams::example1(1.0, GridSpec::default());
    let opts = EstimateOptions { budget: 6, restarts: 3, ..EstimateOptions::default() };
    let mut rng = Gaussian::keyed(0, "acceptance/corpus");
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for spec in groups(&["Z6", "Z8", "Z2xZ4"]) {
        for (name, m) in corpus(&spec, &mut rng) {
            let up = bound_upper(&m, &params).unwrap();
            let Some(u) = up.value else {
                bad.push(format!("{name} on {spec}: no upper bound"));
                continue;
            };
            let lo = estimate_lower(&m, &params, &opts).unwrap().value;
            worst = worst.max(lo - u);
            if lo > u + 1e-6 {
                bad.push(format!("{name} on {spec}: {lo:.6e} > {u:.6e}"));
            }
            checked += 1;
        }
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!("{checked} structured symbols, max (lower - upper) {worst:.2e} {bad:?}"),
    }
}

fn c8_hardy_littlewood() -> Verdict {
    let cfg = SuiteConfig { groups: groups(&["Z16"]), seeds: (0..4).collect(), trials: 50, ..SuiteConfig::default() };
    let records = run_suite(&ids(&["eq2.32", "example4"]), &cfg).unwrap();
    let ident: Vec<_> = records.iter().filter(|r| r.check_id == "eq2.32").collect();
    let ineq: Vec<_> = records.iter().filter(|r| r.check_id == "example4").collect();
    let err = ident.iter().map(|r| r.margin).fold(0.0, f64::max);
    let violations: usize = ineq.iter().filter_map(|r| r.violations).sum();
    let trials = ineq.len() * cfg.trials;
    let worst_slack = ineq.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let ident_ok = ident.iter().all(|r| r.status == Status::Pass);
    Verdict {
        pass: ident_ok && violations == 0 && trials == 200,
        detail: format!(
            "eq2.32 max abs error {err:.2e}; {trials} trials on Z16, {violations} violations, worst relative slack {worst_slack:.3e}"
        ),
    }
}

fn c9_invariants() -> Verdict {
    let mut rng = Gaussian::keyed(0, "acceptance/invariants");
    let mut roundtrip: f64 = 0.0;
    let mut parseval: f64 = 0.0;
    for s in ["Z4096", "Z64xZ64", "Z16xZ16xZ16", "Z3xZ5xZ7", "Z1000", "Z2xZ2048"] {
        let spec: GroupSpec = s.parse().unwrap();
        let f = rng.g_function(&spec);
        let hat = fourier_forward(&f);
        let back = fourier_inverse(&hat);
        roundtrip = roundtrip.max(back.max_abs_diff(&f) / f.max_abs().max(1.0));
        let lhs: f64 = f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / spec.order() as f64;
        let rhs: f64 = hat.values().iter().map(|z| z.norm_sqr()).sum();
        parseval = parseval.max((lhs - rhs).abs() / lhs);
    }
    let mut automorphisms = 0;
    let mut modulus_ok = true;
    for spec in groups(&["Z6", "Z8", "Z12", "Z16", "Z4xZ4", "Z2xZ6", "Z30"]) {
        for a in Automorphism::all(&spec) {
            automorphisms += 1;
            modulus_ok &= a.modulus() == 1.0;
        }
    }

    // Norm axioms on random triples.
    let spec: GroupSpec = "Z12".parse().unwrap();
    let gp = GrandParams::geometric(2.5, 1.0, GridSpec::default()).unwrap();
    let sp = SmallParams::geometric(2.5, 1.0, GridSpec::default()).unwrap();
    let opts = SolverOptions::default();
    let (mut homog, mut tri): (f64, f64) = (0.0, f64::INFINITY);
    let mut small_homog: f64 = 0.0;
    for _ in 0..20 {
        let (f, g) = (rng.g_function(&spec), rng.g_function(&spec));
        let c = rng.complex() * 3.0;
        let scaled = f.scale(c);
        homog = homog.max((grand_norm(&scaled, &gp) - c.norm() * grand_norm(&f, &gp)).abs());
        homog = homog.max((lp_norm(&scaled, 3.0).unwrap() - c.norm() * lp_norm(&f, 3.0).unwrap()).abs());
        let sum = f.add(&g).unwrap();
        tri = tri.min(grand_norm(&f, &gp) + grand_norm(&g, &gp) - grand_norm(&sum, &gp));
        let (cf, cg, cs, cc) =
            (small_norm(&f, &sp, &opts), small_norm(&g, &sp, &opts), small_norm(&sum, &sp, &opts), small_norm(&scaled, &sp, &opts));
        // Certified brackets: the true norms satisfy the axioms, so the brackets must be compatible.
        tri = tri.min(cf.upper + cg.upper - cs.lower);
        let k = c.norm();
        small_homog = small_homog.max((k * cf.lower - cc.upper).max(cc.lower - k * cf.upper) / (k * cf.upper));
    }
    let pass = roundtrip <= 1e-12 && parseval <= 1e-10 && modulus_ok && homog <= 1e-10 && tri >= -1e-8 && small_homog <= 0.0;
    Verdict {
        pass,
        detail: format!(
            "round-trip {roundtrip:.1e} up to |G| = 4096, Parseval {parseval:.1e}, |A| = 1 for {automorphisms} automorphisms: {modulus_ok}, \
             homogeneity {homog:.1e}, triangle slack {tri:.1e}, small-norm brackets compatible: {}",
            small_homog <= 0.0
        ),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact-identity suite", c1_identity_suite),
        ("brute-force equivalence", c2_brute_force),
        ("norm duality", c3_duality),
        ("theta = 0 reductions", c4_theta0),
        ("generalized Hoelder with example exponents", c5_lemma1),
        ("witness transport", c6_transport),
        ("bound consistency", c7_bounds),
        ("Hardy-Littlewood maximal function", c8_hardy_littlewood),
        ("invariant regressions", c9_invariants),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        println!("{} {label}: {} ({secs:.1} s)", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

