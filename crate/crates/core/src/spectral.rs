//! Fourier analysis on `G` and `Ĝ`.
//!
//! Conventions (normalized Haar measure on `G`, counting measure on `Ĝ`):
//!
//! * `f̂(γ) = mean_x f(x) <γ, -x>`
//! * `F^∨(x) = Σ_γ F(γ) <γ, x>`
//! * `(f * g)(x) = mean_y f(y) g(x - y)`, so `(f * g)^ = f̂ ĝ`
//! * `(F * K)(γ) = Σ_u F(u) K(γ - u)`

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

macro_rules! field {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            spec: GroupSpec,
            values: Vec<Complex64>,
        }

        impl $name {
            pub fn new(spec: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
                if values.len() != spec.order() {
                    return Err(Error::Dimension { expected: spec.order(), got: values.len() });
                }
                if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::NonFinite(i));
                }
                Ok(Self { spec: spec.clone(), values })
            }

            pub(crate) fn raw(spec: &GroupSpec, values: Vec<Complex64>) -> Self {
                debug_assert_eq!(values.len(), spec.order());
                Self { spec: spec.clone(), values }
            }

            pub fn from_fn(spec: &GroupSpec, f: impl FnMut(usize) -> Complex64) -> Self {
                Self::raw(spec, (0..spec.order()).map(f).collect())
            }

            pub fn zeros(spec: &GroupSpec) -> Self {
                Self::constant(spec, Complex64::new(0.0, 0.0))
            }

            pub fn constant(spec: &GroupSpec, c: Complex64) -> Self {
                Self::raw(spec, vec![c; spec.order()])
            }

            pub fn indicator(spec: &GroupSpec, idx: usize) -> Self {
                let mut v = vec![Complex64::new(0.0, 0.0); spec.order()];
                v[idx] = Complex64::new(1.0, 0.0);
                Self::raw(spec, v)
            }

            pub fn spec(&self) -> &GroupSpec {
                &self.spec
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            pub fn at(&self, idx: usize) -> Complex64 {
                self.values[idx]
            }

            pub fn same_spec(&self, other: &Self) -> Result<()> {
                if self.spec != other.spec {
                    return Err(Error::SpecMismatch(self.spec.to_string(), other.spec.to_string()));
                }
                Ok(())
            }

            pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
                Self::raw(&self.spec, self.values.iter().map(|&v| f(v)).collect())
            }

            pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
                self.same_spec(other)?;
                Ok(Self::raw(
                    &self.spec,
                    self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
                ))
            }

            pub fn scale(&self, c: Complex64) -> Self {
                self.map(|v| v * c)
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a + b)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a - b)
            }

            pub fn mul(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a * b)
            }

            pub fn conj(&self) -> Self {
                self.map(|v| v.conj())
            }

            pub fn abs(&self) -> Self {
                self.map(|v| Complex64::new(v.norm(), 0.0))
            }

            /// `x -> f(-x)`.
            pub fn reflect(&self) -> Self {
                Self::from_fn(&self.spec, |i| self.values[self.spec.neg_idx(i)])
            }

            /// `x -> f(x - x0)`.
            pub fn translate_idx(&self, x0: usize) -> Self {
                Self::from_fn(&self.spec, |i| self.values[self.spec.sub_idx(i, x0)])
            }

            /// `x -> <x, xi> f(x)`.
            pub fn modulate_idx(&self, xi: usize) -> Self {
                Self::from_fn(&self.spec, |i| self.spec.character_idx(i, xi) * self.values[i])
            }

            pub fn translate(&self, x0: &GroupElement) -> Result<Self> {
                Ok(self.translate_idx(self.spec.index_of(x0)?))
            }

            pub fn modulate(&self, xi: &GroupElement) -> Result<Self> {
                Ok(self.modulate_idx(self.spec.index_of(xi)?))
            }

            /// `x -> f(perm[x])`.
            pub fn compose(&self, perm: &[usize]) -> Self {
                Self::from_fn(&self.spec, |i| self.values[perm[i]])
            }

            pub fn sum(&self) -> Complex64 {
                self.values.iter().sum()
            }

            pub fn abs_sum(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).sum()
            }

            pub fn max_abs(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.values
                    .iter()
                    .zip(&other.values)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            }
        }
    };
}

field!(GFunction);
field!(DualFunction);

impl GFunction {
    /// `|G| 1_{0}`, the unit of normalized convolution.
    pub fn delta(spec: &GroupSpec) -> Self {
        Self::indicator(spec, 0).scale(Complex64::new(spec.order() as f64, 0.0))
    }

    pub fn haar_integral(&self) -> Complex64 {
        self.spec.mean(&self.values)
    }

    /// `mean |f|`.
    pub fn l1_norm(&self) -> f64 {
        self.abs_sum() / self.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransformMode {
    #[default]
    Fast,
    Direct,
}

pub fn haar_integral(f: &GFunction) -> Complex64 {
    f.haar_integral()
}

/// Unnormalized multidimensional DFT along every axis; `inverse` flips the sign.
fn dft_fast(spec: &GroupSpec, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let factors = spec.factors();
    let mut stride = spec.order();
    for &n in factors {
        stride /= n;
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let block = n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for k in 0..n {
                    line[k] = data[base + off + k * stride];
                }
                fft.process(&mut line);
                for k in 0..n {
                    data[base + off + k * stride] = line[k];
                }
            }
        }
    }
}

fn dft_direct(spec: &GroupSpec, data: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = spec.order();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|x| {
                    let c = spec.character_idx(k, x);
                    data[x] * if inverse { c } else { c.conj() }
                })
                .sum()
        })
        .collect()
}

pub fn fourier_forward(f: &GFunction) -> DualFunction {
    fourier_forward_with(f, TransformMode::Fast)
}

pub fn fourier_forward_with(f: &GFunction, mode: TransformMode) -> DualFunction {
    let spec = f.spec();
    let mut v = match mode {
        TransformMode::Fast => {
            let mut v = f.values().to_vec();
            dft_fast(spec, &mut v, false);
            v
        }
        TransformMode::Direct => dft_direct(spec, f.values(), false),
    };
    let inv_n = 1.0 / spec.order() as f64;
    v.iter_mut().for_each(|z| *z *= inv_n);
    DualFunction::raw(spec, v)
}

pub fn fourier_inverse(big_f: &DualFunction) -> GFunction {
    fourier_inverse_with(big_f, TransformMode::Fast)
}

pub fn fourier_inverse_with(big_f: &DualFunction, mode: TransformMode) -> GFunction {
    let spec = big_f.spec();
    let v = match mode {
        TransformMode::Fast => {
            let mut v = big_f.values().to_vec();
            dft_fast(spec, &mut v, true);
            v
        }
        TransformMode::Direct => dft_direct(spec, big_f.values(), true),
    };
    GFunction::raw(spec, v)
}

/// Normalized convolution on `G`.
pub fn convolve_g(f: &GFunction, g: &GFunction) -> Result<GFunction> {
    f.same_spec(g)?;
    let prod = fourier_forward(f).mul(&fourier_forward(g))?;
    Ok(fourier_inverse(&prod))
}

pub fn convolve_g_direct(f: &GFunction, g: &GFunction) -> Result<GFunction> {
    f.same_spec(g)?;
    let spec = f.spec();
    let n = spec.order();
    Ok(GFunction::from_fn(spec, |x| {
        (0..n).map(|y| f.at(y) * g.at(spec.sub_idx(x, y))).sum::<Complex64>() / n as f64
    }))
}

/// Counting-measure convolution on `Ĝ` (or on `Ĝ x Ĝ` for symbol specs).
pub fn convolve_dual(big_f: &DualFunction, k: &DualFunction) -> Result<DualFunction> {
    big_f.same_spec(k)?;
    let prod = fourier_inverse(big_f).mul(&fourier_inverse(k))?;
    Ok(fourier_forward(&prod))
}

pub fn convolve_dual_direct(big_f: &DualFunction, k: &DualFunction) -> Result<DualFunction> {
    big_f.same_spec(k)?;
    let spec = big_f.spec();
    let n = spec.order();
    Ok(DualFunction::from_fn(spec, |s| {
        (0..n).map(|u| big_f.at(u) * k.at(spec.sub_idx(s, u))).sum()
    }))
}

/// Finite complex measure `Σ_j w_j δ_{x_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    spec: GroupSpec,
    atoms: Vec<(usize, Complex64)>,
}

impl AtomicMeasure {
    pub fn new(spec: &GroupSpec, atoms: Vec<(usize, Complex64)>) -> Result<Self> {
        let mut seen = vec![false; spec.order()];
        for &(x, w) in &atoms {
            if x >= spec.order() {
                return Err(Error::InvalidParameter(format!("atom location {x} out of range")));
            }
            if seen[x] {
                return Err(Error::InvalidParameter(format!("duplicate atom at {x}")));
            }
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::NonFinite(x));
            }
            seen[x] = true;
        }
        Ok(Self { spec: spec.clone(), atoms })
    }

    pub fn point_mass(spec: &GroupSpec, x: usize) -> Self {
        Self { spec: spec.clone(), atoms: vec![(x, Complex64::new(1.0, 0.0))] }
    }

    /// The measure `f dλ`, i.e. atoms `f(x) / |G|`.
    pub fn from_density(f: &GFunction) -> Self {
        let n = f.len() as f64;
        Self {
            spec: f.spec().clone(),
            atoms: f.values().iter().enumerate().map(|(i, &v)| (i, v / n)).collect(),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn atoms(&self) -> &[(usize, Complex64)] {
        &self.atoms
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w.norm()).sum()
    }
}

/// `λ̂(γ) = Σ_j w_j <γ, -x_j>`.
pub fn measure_transform(lambda: &AtomicMeasure) -> DualFunction {
    let spec = lambda.spec();
    DualFunction::from_fn(spec, |s| {
        lambda
            .atoms()
            .iter()
            .map(|&(x, w)| w * spec.character_idx(s, x).conj())
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Gaussian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn transform_examples() {
        let g: GroupSpec = "Z6xZ2".parse().unwrap();
        let one = GFunction::constant(&g, c(1.0));
        let hat = fourier_forward(&one);
        assert!(hat.max_abs_diff(&DualFunction::indicator(&g, 0)) < 1e-15);
        let hat = fourier_forward(&GFunction::delta(&g));
        assert!(hat.max_abs_diff(&DualFunction::constant(&g, c(1.0))) < 1e-14);
        let back = fourier_inverse(&DualFunction::indicator(&g, 0));
        assert!(back.max_abs_diff(&one) < 1e-15);
    }

    #[test]
    fn fast_matches_direct() {
        let mut rng = Gaussian::new(3);
        for spec in ["Z16", "Z4xZ4", "Z3xZ5x Z2"] {
            let g: GroupSpec = spec.parse().unwrap();
            let f = rng.g_function(&g);
            let a = fourier_forward_with(&f, TransformMode::Fast);
            let b = fourier_forward_with(&f, TransformMode::Direct);
            assert!(a.max_abs_diff(&b) < 1e-12);
            let a = fourier_inverse_with(&a, TransformMode::Fast);
            let b = fourier_inverse_with(&b, TransformMode::Direct);
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = Gaussian::new(5);
        for spec in ["Z64", "Z8xZ8", "Z7xZ6"] {
            let g: GroupSpec = spec.parse().unwrap();
            let f = rng.g_function(&g);
            let hat = fourier_forward(&f);
            assert!(fourier_inverse(&hat).max_abs_diff(&f) < 1e-12);
            let lhs = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.order() as f64;
            let rhs: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum();
            assert!((lhs - rhs).abs() / lhs < 1e-12);
        }
    }

    #[test]
    fn shift_modulation_duality_exhaustive() {
        let mut rng = Gaussian::new(9);
        for spec in ["Z12", "Z4xZ4", "Z6"] {
            let g: GroupSpec = spec.parse().unwrap();
            let f = rng.g_function(&g);
            let hat = fourier_forward(&f);
            for s0 in 0..g.order() {
                let lhs = fourier_forward(&f.modulate_idx(g.neg_idx(s0)));
                assert!(lhs.max_abs_diff(&hat.translate_idx(g.neg_idx(s0))) < 1e-12);
                let lhs = fourier_forward(&f.translate_idx(g.neg_idx(s0)));
                assert!(lhs.max_abs_diff(&hat.modulate_idx(s0)) < 1e-12);
            }
            assert_eq!(f.translate_idx(0), f);
            let m = f.modulate_idx(3 % g.order());
            for (a, b) in m.values().iter().zip(f.values()) {
                assert!((a.norm() - b.norm()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn convolutions() {
        let mut rng = Gaussian::new(11);
        let g = GroupSpec::cyclic(16).unwrap();
        let f = rng.g_function(&g);
        let h = rng.g_function(&g);
        assert!(convolve_g(&f, &GFunction::delta(&g)).unwrap().max_abs_diff(&f) < 1e-13);
        let fast = convolve_g(&f, &h).unwrap();
        assert!(fast.max_abs_diff(&convolve_g_direct(&f, &h).unwrap()) < 1e-12);
        let lhs = fourier_forward(&fast);
        let rhs = fourier_forward(&f).mul(&fourier_forward(&h)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let one = GFunction::constant(&g, c(1.0));
        assert!(convolve_g(&one, &one).unwrap().max_abs_diff(&one) < 1e-14);

        let gg = GroupSpec::cyclic(8).unwrap();
        let pair = gg.product(&gg);
        let phi = rng.dual_function(&pair);
        let m = rng.dual_function(&pair);
        let fast = convolve_dual(&phi, &m).unwrap();
        assert!(fast.max_abs_diff(&convolve_dual_direct(&phi, &m).unwrap()) < 1e-11);
        let unit = convolve_dual(&DualFunction::indicator(&pair, 0), &m).unwrap();
        assert!(unit.max_abs_diff(&m) < 1e-13);
        let uv = pair.index_of(&pair.element(&[3, 5]).unwrap()).unwrap();
        let shifted = convolve_dual(&DualFunction::indicator(&pair, uv), &m).unwrap();
        assert!(shifted.max_abs_diff(&m.translate_idx(uv)) < 1e-13);
    }

    #[test]
    fn measures() {
        let mut rng = Gaussian::new(13);
        let g = GroupSpec::cyclic(10).unwrap();
        let unit = measure_transform(&AtomicMeasure::point_mass(&g, 0));
        assert!(unit.max_abs_diff(&DualFunction::constant(&g, c(1.0))) < 1e-15);

        let x0 = 3;
        let lam = AtomicMeasure::new(&g, vec![(0, c(0.5)), (x0, c(-0.5))]).unwrap();
        let hat = measure_transform(&lam);
        for s in 0..10 {
            let want = (c(1.0) - g.character_idx(s, x0).conj()) / 2.0;
            assert!((hat.at(s) - want).norm() < 1e-15);
            assert!(hat.at(s).norm() <= lam.total_variation() + 1e-15);
        }
        let f = rng.g_function(&g);
        let hat = measure_transform(&AtomicMeasure::from_density(&f));
        assert!(hat.max_abs_diff(&fourier_forward(&f)) < 1e-13);
        assert!(AtomicMeasure::new(&g, vec![(1, c(1.0)), (1, c(2.0))]).is_err());
    }

    #[test]
    fn haar_examples() {
        let g: GroupSpec = "Z3xZ4".parse().unwrap();
        assert!((GFunction::constant(&g, c(2.5)).haar_integral() - c(2.5)).norm() < 1e-15);
        assert!((GFunction::delta(&g).haar_integral() - c(1.0)).norm() < 1e-15);
        for s in 1..g.order() {
            let chi = GFunction::from_fn(&g, |x| g.character_idx(s, x));
            assert!(chi.haar_integral().norm() < 1e-15);
        }
        assert!(GFunction::new(&g, vec![c(1.0); 5]).is_err());
        assert!(GFunction::new(&g, vec![c(f64::NAN); 12]).is_err());
    }
}
