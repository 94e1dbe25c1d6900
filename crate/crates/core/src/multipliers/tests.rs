use num_complex::Complex64;

use super::*;
use crate::rng::Gaussian;
use crate::spectral::{convolve_g, haar_integral};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn z(n: usize) -> GroupSpec {
    GroupSpec::cyclic(n).unwrap()
}

fn random_symbol(rng: &mut Gaussian, spec: &GroupSpec) -> Symbol {
    Symbol::general(spec, rng.dual_function(&spec.product(spec))).unwrap()
}

#[test]
fn constant_symbols_multiply() {
    let g = z(8);
    let mut rng = Gaussian::new(1);
    let (f, h) = (rng.g_function(&g), rng.g_function(&g));
    let one = Symbol::constant(&g, c(1.0));
    assert!(apply(&one, &f, &h).unwrap().max_abs_diff(&f.mul(&h).unwrap()) < 1e-14);
    assert!(apply_general(&one, &f, &h).unwrap().max_abs_diff(&f.mul(&h).unwrap()) < 1e-12);
    let zero = Symbol::constant(&g, c(0.0));
    assert_eq!(apply_general(&zero, &f, &h).unwrap().max_abs(), 0.0);
    assert!(apply(&one, &f, &rng.g_function(&z(6))).is_err());
}

#[test]
fn general_path_matches_triple_sum() {
    let mut rng = Gaussian::new(2);
    for spec in ["Z8", "Z2xZ4", "Z5"] {
        let g: GroupSpec = spec.parse().unwrap();
        let m = random_symbol(&mut rng, &g);
        let (f, h) = (rng.g_function(&g), rng.g_function(&g));
        let a = apply_general(&m, &f, &h).unwrap();
        let b = apply_oracle(&m, &f, &h).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
    }
}

#[test]
fn trilinear_examples() {
    let g = z(12);
    let mut rng = Gaussian::new(3);
    let (f, h, k) = (rng.g_function(&g), rng.g_function(&g), rng.g_function(&g));
    let one = Symbol::constant(&g, c(1.0));
    let ones = GFunction::constant(&g, c(1.0));
    let t = trilinear(&one, &f, &h, &ones).unwrap();
    assert!((t - haar_integral(&f.mul(&h).unwrap())).norm() < 1e-12);
    let m = random_symbol(&mut rng, &g);
    let lhs = trilinear(&m, &f, &h, &k).unwrap();
    let rhs = haar_integral(&k.mul(&apply(&m, &f, &h).unwrap().reflect()).unwrap());
    assert!((lhs - rhs).norm() < 1e-10);
    assert_eq!(trilinear(&m, &GFunction::zeros(&g), &h, &k).unwrap(), c(0.0));
}

#[test]
fn translation_and_modulation_trivial_cases() {
    let g = z(6);
    let m = random_symbol(&mut Gaussian::new(4), &g);
    assert_eq!(m.translate(0, 0).values(), m.values());
    assert!(m.modulate(0, 0).values().max_abs_diff(m.values()) == 0.0);
    let a = Automorphism::identity(&g);
    assert_eq!(m.dilate(&a).unwrap().values(), m.values());
    assert_eq!(m.average(&[0], &[0]).unwrap().values(), m.values());
    let k = Symbol::constant(&g, c(2.5));
    assert!(k.average(&[0, 1, 3], &[2, 5]).unwrap().values().max_abs_diff(k.values()) < 1e-15);
    assert!(m.average(&[], &[0]).is_err());
}

#[test]
fn psi_weighted_examples() {
    let g = z(8);
    let mut rng = Gaussian::new(5);
    let m = random_symbol(&mut rng, &g);
    let a = Automorphism::new(&g, &[3]).unwrap();
    let dil = m.dilate(&a).unwrap();
    let point = m.psi_weighted(&DualFunction::indicator(&g, 0), &a).unwrap();
    assert!(point.values().max_abs_diff(dil.values()) < 1e-15);
    let mut psi = rng.dual_function(&g);
    let mean = psi.sum() / 8.0;
    psi = psi.map(|v| v - mean);
    assert!(m.psi_weighted(&psi, &a).unwrap().values().max_abs() < 1e-12);
    let psi = rng.dual_function(&g);
    let w = m.psi_weighted(&psi, &a).unwrap();
    assert!(w.values().max_abs_diff(&dil.values().scale(psi.sum())) < 1e-12);
}

#[test]
fn measure_symbols() {
    let g = z(8);
    let mut rng = Gaussian::new(6);
    let (f, h) = (rng.g_function(&g), rng.g_function(&g));
    let id = Automorphism::identity(&g);
    let unit = Symbol::measure(&AtomicMeasure::point_mass(&g, 0), &id, &id).unwrap();
    assert!(unit.values().max_abs_diff(&DualFunction::constant(unit.pair_spec(), c(1.0))) < 1e-15);
    let y0 = 3;
    let shifted = Symbol::measure(&AtomicMeasure::point_mass(&g, y0), &id, &id).unwrap();
    let want = f.translate_idx(y0).mul(&h.translate_idx(y0)).unwrap();
    assert!(apply_general(&shifted, &f, &h).unwrap().max_abs_diff(&want) < 1e-12);

    let a = Automorphism::new(&g, &[3]).unwrap();
    let b = Automorphism::new(&g, &[5]).unwrap();
    let lam = AtomicMeasure::new(&g, vec![(1, c(0.7)), (2, Complex64::new(0.0, -0.4)), (6, c(0.2))]).unwrap();
    let m = Symbol::measure(&lam, &a, &b).unwrap();
    let general = apply_general(&m, &f, &h).unwrap();
    assert!(general.max_abs_diff(&apply_measure_atoms(&m, &f, &h).unwrap()) < 1e-12);
    let same_a = GFunction::from_fn(&g, |x| {
        lam.atoms()
            .iter()
            .map(|&(y, w)| w * f.at(g.sub_idx(x, a.apply_idx(y))) * h.at(g.sub_idx(x, a.apply_idx(y))))
            .sum()
    });
    assert!(general.max_abs_diff(&same_a) > 1e-3);
}

#[test]
fn difference_symbols() {
    let g = z(8);
    let mut rng = Gaussian::new(7);
    let (f, h) = (rng.g_function(&g), rng.g_function(&g));
    let delta_hat = DualFunction::indicator(&g, 0);
    let m = Symbol::difference(&delta_hat);
    let avg = GFunction::from_fn(&g, |x| {
        (0..8).map(|y| f.at(g.sub_idx(x, y)) * h.at(g.add_idx(x, y))).sum::<Complex64>() / 8.0
    });
    assert!(apply(&m, &f, &h).unwrap().max_abs_diff(&avg) < 1e-12);
    assert!(apply_general(&m, &f, &h).unwrap().max_abs_diff(&avg) < 1e-12);

    let flat = Symbol::difference(&DualFunction::constant(&g, c(1.0)));
    assert!(apply(&flat, &f, &h).unwrap().max_abs_diff(&f.mul(&h).unwrap()) < 1e-12);

    let k = rng.g_function(&g);
    let ex2 = Symbol::difference_kernel(&k);
    let want = GFunction::from_fn(&g, |x| {
        (0..8).map(|y| f.at(g.sub_idx(x, y)) * h.at(g.add_idx(x, y)) * k.at(y)).sum::<Complex64>() / 8.0
    });
    assert!(apply(&ex2, &f, &h).unwrap().max_abs_diff(&want) < 1e-12);
    assert!(apply_general(&ex2, &f, &h).unwrap().max_abs_diff(&want) < 1e-12);
}

#[test]
fn triple_symbols() {
    let g = z(8);
    let pair = g.product(&g);
    let mut rng = Gaussian::new(8);
    let (f, h) = (rng.g_function(&g), rng.g_function(&g));
    let delta = GFunction::delta(&g);
    let phi_unit = GFunction::delta(&pair);
    let m = Symbol::triple(&delta, &phi_unit, &delta).unwrap();
    assert!(apply(&m, &f, &h).unwrap().max_abs_diff(&f.mul(&h).unwrap()) < 1e-12);

    let (p1, p2) = (rng.g_function(&g), rng.g_function(&g));
    let m = Symbol::triple(&p1, &phi_unit, &p2).unwrap();
    let want = convolve_g(&f, &p1).unwrap().mul(&convolve_g(&h, &p2).unwrap()).unwrap();
    assert!(apply(&m, &f, &h).unwrap().max_abs_diff(&want) < 1e-12);
    let r1 = Symbol::rank_one(
        &crate::spectral::fourier_forward(&p1),
        &crate::spectral::fourier_forward(&p2),
    )
    .unwrap();
    assert!(apply(&r1, &f, &h).unwrap().max_abs_diff(&want) < 1e-12);

    let m = Symbol::triple(&p1, &rng.g_function(&pair), &p2).unwrap();
    assert!(apply(&m, &f, &h).unwrap().max_abs_diff(&apply_general(&m, &f, &h).unwrap()) < 1e-10);
}

#[test]
fn product_transform_unit() {
    let g = z(6);
    let pair = g.product(&g);
    let m = random_symbol(&mut Gaussian::new(9), &g);
    let pt = m.product_transform(&GFunction::delta(&pair)).unwrap();
    assert!(pt.values().max_abs_diff(m.values()) < 1e-13);
}

#[test]
fn structured_fast_paths_agree() {
    let g = z(6);
    let pair = g.product(&g);
    let mut rng = Gaussian::new(10);
    let base = Symbol::difference(&rng.dual_function(&g));
    let syms = vec![
        Symbol::constant(&g, Complex64::new(0.3, -1.1)),
        Symbol::rank_one(&rng.dual_function(&g), &rng.dual_function(&g)).unwrap(),
        base.clone(),
        base.diff_translate(2).unwrap(),
        base.diff_modulate(4).unwrap(),
        base.diff_convolve(&rng.dual_function(&g)).unwrap(),
        base.diff_product(&rng.g_function(&g)).unwrap(),
        base.translate(1, 4),
        base.scale(c(2.0)),
        Symbol::triple(&rng.g_function(&g), &rng.g_function(&pair), &rng.g_function(&g)).unwrap(),
    ];
    for m in syms {
        let (f, h) = (rng.g_function(&g), rng.g_function(&g));
        let a = apply(&m, &f, &h).unwrap();
        let b = apply_general(&m, &f, &h).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10, "{:?}", m.structure());
        assert!(m.rebuild().unwrap().values().max_abs_diff(m.values()) < 1e-12);
    }
}

#[test]
fn hl_maximal_examples() {
    let g = z(8);
    let one = GFunction::constant(&g, c(1.0));
    let m = hl_maximal(&one, &one).unwrap();
    assert!(m.max_abs_diff(&one) < 1e-14);
    let mut rng = Gaussian::new(11);
    let f = rng.g_function(&g);
    let fast = hl_maximal(&f, &one).unwrap();
    let uni = GFunction::from_fn(&g, |x| {
        let best = (0..=4)
            .map(|r| {
                let b = g.ball(r as f64);
                b.iter().map(|&y| f.at(g.sub_idx(x, y)).norm()).sum::<f64>() / b.len() as f64
            })
            .fold(0.0, f64::max);
        c(best)
    });
    assert!(fast.max_abs_diff(&uni) < 1e-12);
    let h = rng.g_function(&g);
    assert!(hl_maximal(&f, &h).unwrap().max_abs_diff(&hl_maximal_direct(&f, &h).unwrap()) < 1e-12);
    let full = GFunction::from_fn(&g, |x| {
        c((0..8).map(|y| (f.at(g.sub_idx(x, y)) * h.at(g.add_idx(x, y))).norm()).sum::<f64>() / 8.0)
    });
    let m = hl_maximal(&f, &h).unwrap();
    for x in 0..8 {
        assert!(m.at(x).re >= full.at(x).re - 1e-12);
    }
    for r in hl_radii(&g) {
        assert!((hl_kernel(&g, r).l1_norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn symbol_json_round_trip() {
    let g = z(6);
    let pair = g.product(&g);
    let mut rng = Gaussian::new(12);
    let a = Automorphism::new(&g, &[5]).unwrap();
    let lam = AtomicMeasure::new(&g, vec![(1, c(0.5)), (4, c(-0.25))]).unwrap();
    let syms = vec![
        random_symbol(&mut rng, &g),
        Symbol::constant(&g, c(2.0)),
        Symbol::measure(&lam, &a, &Automorphism::identity(&g)).unwrap(),
        Symbol::difference(&rng.dual_function(&g)).sum_filter(&rng.g_function(&g)).unwrap(),
        Symbol::constant(&g, c(1.0))
            .convolve(&rng.dual_function(&pair))
            .unwrap()
            .average(&[0, 2], &[1])
            .unwrap()
            .psi_weighted(&rng.dual_function(&g), &a)
            .unwrap(),
    ];
    for m in syms {
        let doc = SymbolDoc::from_symbol(&m);
        let text = serde_json::to_string(&doc).unwrap();
        let back: SymbolDoc = serde_json::from_str(&text).unwrap();
        let rebuilt = back.to_symbol().unwrap();
        assert!(rebuilt.values().max_abs_diff(m.values()) < 1e-12);
        assert_eq!(rebuilt.structure(), m.structure());
        let dense = SymbolDoc::from_symbol(&m).with_values(&m);
        assert!(dense.to_symbol().is_ok());
    }
}

#[test]
fn multiplier_params() {
    let p = MultiplierParams::example1(1.0, GridSpec::default());
    let [a, b, cc] = p.conjugates();
    assert!((a - 9.0).abs() < 1e-12 && (b - 10.0).abs() < 1e-12 && (cc - 1.5).abs() < 1e-12);
    assert!((1.0 / p.q() - (1.0 / 9.0 + 1.0 / 10.0 - 2.0 / 3.0)).abs() < 1e-12);
    assert!(MultiplierParams::new(1.0, 2.0, 2.0, 0.0, GridSpec::default()).is_err());
}
