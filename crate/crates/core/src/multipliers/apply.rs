use num_complex::Complex64;

use super::{Structure, Symbol};
use crate::error::{Error, Result};
use crate::spectral::{convolve_g, fourier_forward, fourier_inverse, DualFunction, GFunction};

/// Evaluation path for [`apply_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// Structure-specific closed form when available, else [`EvalPath::General`].
    #[default]
    Auto,
    /// `O(|G|²)` diagonal sum followed by one inverse transform.
    General,
    /// Literal triple sum over `(s, t, x)`.
    Oracle,
}

fn check(m: &Symbol, f: &GFunction, g: &GFunction) -> Result<()> {
    f.same_spec(g)?;
    if f.spec() != m.spec() {
        return Err(Error::SpecMismatch(m.spec().to_string(), f.spec().to_string()));
    }
    Ok(())
}

pub fn apply(m: &Symbol, f: &GFunction, g: &GFunction) -> Result<GFunction> {
    apply_with(m, f, g, EvalPath::Auto)
}

pub fn apply_with(m: &Symbol, f: &GFunction, g: &GFunction, path: EvalPath) -> Result<GFunction> {
    check(m, f, g)?;
    match path {
        EvalPath::General => Ok(general(m, f, g)),
        EvalPath::Oracle => Ok(oracle(m, f, g)),
        EvalPath::Auto => structured(m, f, g),
    }
}

fn structured(m: &Symbol, f: &GFunction, g: &GFunction) -> Result<GFunction> {
    if let Some(k) = m.difference_profile() {
        return kernel_apply(&k, f, g);
    }
    match m.structure() {
        Structure::Constant(a) => Ok(f.mul(g)?.scale(*a)),
        Structure::RankOne { m1, m2 } => {
            let lf = fourier_inverse(&fourier_forward(f).mul(m1)?);
            let lg = fourier_inverse(&fourier_forward(g).mul(m2)?);
            lf.mul(&lg)
        }
        Structure::Triple { psi1, phi, psi2 } => {
            let inner = Symbol::general(m.spec(), fourier_forward(phi))?;
            Ok(general(&inner, &convolve_g(f, psi1)?, &convolve_g(g, psi2)?))
        }
        Structure::Measure { .. } => apply_measure_atoms(m, f, g),
        _ => Ok(general(m, f, g)),
    }
}

pub fn apply_general(m: &Symbol, f: &GFunction, g: &GFunction) -> Result<GFunction> {
    apply_with(m, f, g, EvalPath::General)
}

pub fn apply_oracle(m: &Symbol, f: &GFunction, g: &GFunction) -> Result<GFunction> {
    apply_with(m, f, g, EvalPath::Oracle)
}

fn general(m: &Symbol, f: &GFunction, g: &GFunction) -> GFunction {
    let spec = m.spec();
    let n = spec.order();
    let fh = fourier_forward(f);
    let gh = fourier_forward(g);
    let h = DualFunction::from_fn(spec, |u| {
        (0..n)
            .map(|s| {
                let t = spec.sub_idx(u, s);
                fh.at(s) * gh.at(t) * m.at(s, t)
            })
            .sum()
    });
    fourier_inverse(&h)
}

fn oracle(m: &Symbol, f: &GFunction, g: &GFunction) -> GFunction {
    let spec = m.spec();
    let n = spec.order();
    let fh = fourier_forward(f);
    let gh = fourier_forward(g);
    GFunction::from_fn(spec, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..n {
            for t in 0..n {
                acc += fh.at(s) * gh.at(t) * m.at(s, t) * spec.character_idx(spec.add_idx(s, t), x);
            }
        }
        acc
    })
}

/// `mean_y f(x - y) g(x + y) M^∨(y)`.
pub fn kernel_apply(m: &DualFunction, f: &GFunction, g: &GFunction) -> Result<GFunction> {
    f.same_spec(g)?;
    if m.spec() != f.spec() {
        return Err(Error::SpecMismatch(m.spec().to_string(), f.spec().to_string()));
    }
    let spec = f.spec();
    let n = spec.order();
    let k = fourier_inverse(m);
    Ok(GFunction::from_fn(spec, |x| {
        (0..n)
            .map(|y| f.at(spec.sub_idx(x, y)) * g.at(spec.add_idx(x, y)) * k.at(y))
            .sum::<Complex64>()
            / n as f64
    }))
}

/// `Σ_j w_j f(x - A y_j) g(x - B y_j)` for measure symbols.
pub fn apply_measure_atoms(m: &Symbol, f: &GFunction, g: &GFunction) -> Result<GFunction> {
    check(m, f, g)?;
    let Structure::Measure { lambda, a, b } = m.structure() else {
        return Err(Error::InvalidParameter("symbol is not a measure symbol".into()));
    };
    let spec = m.spec();
    Ok(GFunction::from_fn(spec, |x| {
        lambda
            .atoms()
            .iter()
            .map(|&(y, w)| {
                w * f.at(spec.sub_idx(x, a.apply_idx(y))) * g.at(spec.sub_idx(x, b.apply_idx(y)))
            })
            .sum()
    }))
}

/// `Σ_s Σ_t f̂(s) ĝ(t) ĥ(s+t) m(s,t)`.
pub fn trilinear(m: &Symbol, f: &GFunction, g: &GFunction, h: &GFunction) -> Result<Complex64> {
    check(m, f, g)?;
    f.same_spec(h)?;
    let spec = m.spec();
    let n = spec.order();
    let (fh, gh, hh) = (fourier_forward(f), fourier_forward(g), fourier_forward(h));
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..n {
        for t in 0..n {
            acc += fh.at(s) * gh.at(t) * hh.at(spec.add_idx(s, t)) * m.at(s, t);
        }
    }
    Ok(acc)
}
