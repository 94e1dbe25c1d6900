//! Bilinear multipliers `B_m(f,g)(x) = Σ_s Σ_t f̂(s) ĝ(t) m(s,t) <s+t, x>`.
//!
//! A [`Symbol`] always stores its dense values on `Ĝ x Ĝ` (flat index
//! `s * |G| + t`) together with a structure tag recording how it was built.
//! The tag selects closed-form evaluation paths and drives the upper bounds
//! in [`crate::opnorm`].

mod apply;
mod maximal;
mod serial;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Automorphism, GroupSpec};
use crate::norms::{conjugate, GridSpec, SmallParams};
use crate::spectral::{
    convolve_dual, fourier_forward, fourier_inverse, measure_transform, AtomicMeasure,
    DualFunction, GFunction,
};

pub use apply::{
    apply, apply_general, apply_measure_atoms, apply_oracle, kernel_apply, trilinear, EvalPath,
    apply_with,
};
pub use maximal::{hl_kernel, hl_maximal, hl_maximal_direct, hl_radii};
pub use serial::{StructureDoc, SymbolDoc};

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    General,
    Constant(Complex64),
    RankOne { m1: DualFunction, m2: DualFunction },
    /// `m(s,t) = M(s - t)`.
    Difference { m: DualFunction },
    /// `m(s,t) = Ψ̂₁(s) Φ̂(s,t) Ψ̂₂(t)` with `Φ` on `G x G`.
    Triple { psi1: GFunction, phi: GFunction, psi2: GFunction },
    /// `m(s,t) = λ̂(A*s + B*t)`.
    Measure { lambda: AtomicMeasure, a: Automorphism, b: Automorphism },
    Derived { op: DerivedOp, parent: Box<Symbol> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DerivedOp {
    /// `m(s - s0, t - t0)`.
    Translate { s0: usize, t0: usize },
    /// `<s,s0> <t,t0> m(s,t)`.
    Modulate { s0: usize, t0: usize },
    /// `Φ * m` on `Ĝ x Ĝ`.
    Convolve { phi: DualFunction },
    /// `Φ̂ m` with `Φ` on `G x G`.
    ProductTransform { phi: GFunction },
    /// `m(A*s, A*t)`.
    Dilate { a: Automorphism },
    /// `(Σ_u Ψ(u)) m(A*s, A*t)`.
    PsiWeighted { psi: DualFunction, a: Automorphism },
    /// `mean_{u ∈ U1, v ∈ U2} m(s+u, t+v)`.
    Average { u1: Vec<usize>, u2: Vec<usize> },
    Scale(Complex64),
    /// Difference profile `K(γ - y)`.
    DiffTranslate { y: usize },
    /// Difference profile `<γ, y> K(γ)`.
    DiffModulate { y: usize },
    /// Difference profile `Φ * K` on `Ĝ`.
    DiffConvolve { phi: DualFunction },
    /// Difference profile `Φ̂ K` with `Φ` on `G`.
    DiffProduct { phi: GFunction },
    /// `M(s - t) Φ̂(s + t)`.
    SumFilter { phi: GFunction },
}

impl DerivedOp {
    pub fn name(&self) -> &'static str {
        match self {
            DerivedOp::Translate { .. } => "translate",
            DerivedOp::Modulate { .. } => "modulate",
            DerivedOp::Convolve { .. } => "convolve",
            DerivedOp::ProductTransform { .. } => "product_transform",
            DerivedOp::Dilate { .. } => "dilate",
            DerivedOp::PsiWeighted { .. } => "psi_weighted",
            DerivedOp::Average { .. } => "average",
            DerivedOp::Scale(_) => "scale",
            DerivedOp::DiffTranslate { .. } => "diff_translate",
            DerivedOp::DiffModulate { .. } => "diff_modulate",
            DerivedOp::DiffConvolve { .. } => "diff_convolve",
            DerivedOp::DiffProduct { .. } => "diff_product",
            DerivedOp::SumFilter { .. } => "sum_filter",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    spec: GroupSpec,
    pair: GroupSpec,
    values: DualFunction,
    structure: Structure,
}

impl Symbol {
    fn build(spec: &GroupSpec, values: DualFunction, structure: Structure) -> Self {
        Self { spec: spec.clone(), pair: spec.product(spec), values, structure }
    }

    fn from_fn(spec: &GroupSpec, structure: Structure, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let n = spec.order();
        let pair = spec.product(spec);
        let values = DualFunction::from_fn(&pair, |i| f(i / n, i % n));
        Self { spec: spec.clone(), pair, values, structure }
    }

    fn derived(&self, op: DerivedOp, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self::from_fn(&self.spec, Structure::Derived { op, parent: Box::new(self.clone()) }, f)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// `Ĝ x Ĝ` as a group spec.
    pub fn pair_spec(&self) -> &GroupSpec {
        &self.pair
    }

    pub fn values(&self) -> &DualFunction {
        &self.values
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn at(&self, s: usize, t: usize) -> Complex64 {
        self.values.at(s * self.spec.order() + t)
    }

    fn check_spec(&self, spec: &GroupSpec) -> Result<()> {
        if &self.spec != spec {
            return Err(Error::SpecMismatch(self.spec.to_string(), spec.to_string()));
        }
        Ok(())
    }

    fn check_pair(&self, f: &impl HasSpec) -> Result<()> {
        if f.group() != &self.pair {
            return Err(Error::SpecMismatch(self.pair.to_string(), f.group().to_string()));
        }
        Ok(())
    }

    /// Dense symbol with no structure.
    pub fn general(spec: &GroupSpec, values: DualFunction) -> Result<Self> {
        let pair = spec.product(spec);
        if values.spec() != &pair {
            return Err(Error::SpecMismatch(pair.to_string(), values.spec().to_string()));
        }
        Ok(Self::build(spec, values, Structure::General))
    }

    pub fn constant(spec: &GroupSpec, a: Complex64) -> Self {
        let pair = spec.product(spec);
        Self::build(spec, DualFunction::constant(&pair, a), Structure::Constant(a))
    }

    pub fn rank_one(m1: &DualFunction, m2: &DualFunction) -> Result<Self> {
        m1.same_spec(m2)?;
        let (a, b) = (m1.clone(), m2.clone());
        Ok(Self::from_fn(m1.spec(), Structure::RankOne { m1: a, m2: b }, |s, t| m1.at(s) * m2.at(t)))
    }

    pub fn difference(m: &DualFunction) -> Self {
        let spec = m.spec().clone();
        Self::from_fn(&spec, Structure::Difference { m: m.clone() }, |s, t| m.at(spec.sub_idx(s, t)))
    }

    /// `m(s,t) = K̂(s - t)` for a kernel `K` on `G`.
    pub fn difference_kernel(k: &GFunction) -> Self {
        Self::difference(&fourier_forward(k))
    }

    pub fn triple(psi1: &GFunction, phi: &GFunction, psi2: &GFunction) -> Result<Self> {
        psi1.same_spec(psi2)?;
        let spec = psi1.spec().clone();
        let pair = spec.product(&spec);
        if phi.spec() != &pair {
            return Err(Error::SpecMismatch(pair.to_string(), phi.spec().to_string()));
        }
        let (h1, hp, h2) = (fourier_forward(psi1), fourier_forward(phi), fourier_forward(psi2));
        let n = spec.order();
        Ok(Self::from_fn(
            &spec,
            Structure::Triple { psi1: psi1.clone(), phi: phi.clone(), psi2: psi2.clone() },
            |s, t| h1.at(s) * hp.at(s * n + t) * h2.at(t),
        ))
    }

    pub fn measure(lambda: &AtomicMeasure, a: &Automorphism, b: &Automorphism) -> Result<Self> {
        let spec = lambda.spec().clone();
        if a.spec() != &spec || b.spec() != &spec {
            return Err(Error::SpecMismatch(spec.to_string(), a.spec().to_string()));
        }
        let hat = measure_transform(lambda);
        Ok(Self::from_fn(
            &spec,
            Structure::Measure { lambda: lambda.clone(), a: a.clone(), b: b.clone() },
            |s, t| hat.at(spec.add_idx(a.adjoint_apply_idx(s), b.adjoint_apply_idx(t))),
        ))
    }

    pub fn translate(&self, s0: usize, t0: usize) -> Self {
        let g = &self.spec;
        self.derived(DerivedOp::Translate { s0, t0 }, |s, t| self.at(g.sub_idx(s, s0), g.sub_idx(t, t0)))
    }

    pub fn modulate(&self, s0: usize, t0: usize) -> Self {
        let g = &self.spec;
        self.derived(DerivedOp::Modulate { s0, t0 }, |s, t| {
            g.character_idx(s, s0) * g.character_idx(t, t0) * self.at(s, t)
        })
    }

    pub fn convolve(&self, phi: &DualFunction) -> Result<Self> {
        self.check_pair(phi)?;
        let conv = convolve_dual(phi, &self.values)?;
        let n = self.spec.order();
        Ok(self.derived(DerivedOp::Convolve { phi: phi.clone() }, |s, t| conv.at(s * n + t)))
    }

    pub fn product_transform(&self, phi: &GFunction) -> Result<Self> {
        self.check_pair(phi)?;
        let hat = fourier_forward(phi);
        let n = self.spec.order();
        Ok(self.derived(DerivedOp::ProductTransform { phi: phi.clone() }, |s, t| {
            hat.at(s * n + t) * self.at(s, t)
        }))
    }

    pub fn dilate(&self, a: &Automorphism) -> Result<Self> {
        self.check_spec(a.spec())?;
        Ok(self.derived(DerivedOp::Dilate { a: a.clone() }, |s, t| {
            self.at(a.adjoint_apply_idx(s), a.adjoint_apply_idx(t))
        }))
    }

    /// Literal `Σ_{u ∈ A*Ĝ} m(A*s, A*t) Ψ(u)`; the summand does not depend on `u`.
    pub fn psi_weighted(&self, psi: &DualFunction, a: &Automorphism) -> Result<Self> {
        self.check_spec(psi.spec())?;
        self.check_spec(a.spec())?;
        let total = psi.sum();
        Ok(self.derived(DerivedOp::PsiWeighted { psi: psi.clone(), a: a.clone() }, |s, t| {
            total * self.at(a.adjoint_apply_idx(s), a.adjoint_apply_idx(t))
        }))
    }

    pub fn average(&self, u1: &[usize], u2: &[usize]) -> Result<Self> {
        if u1.is_empty() || u2.is_empty() {
            return Err(Error::InvalidParameter("averaging sets must be nonempty".into()));
        }
        let n = self.spec.order();
        if u1.iter().chain(u2).any(|&u| u >= n) {
            return Err(Error::InvalidParameter("averaging set element out of range".into()));
        }
        let g = &self.spec;
        let count = (u1.len() * u2.len()) as f64;
        Ok(self.derived(DerivedOp::Average { u1: u1.to_vec(), u2: u2.to_vec() }, |s, t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &u in u1 {
                for &v in u2 {
                    acc += self.at(g.add_idx(s, u), g.add_idx(t, v));
                }
            }
            acc / count
        }))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.derived(DerivedOp::Scale(a), |s, t| a * self.at(s, t))
    }

    /// The profile `M` when the symbol has the form `M(s - t)` by construction.
    pub fn difference_profile(&self) -> Option<DualFunction> {
        match &self.structure {
            Structure::Difference { m } => Some(m.clone()),
            Structure::Constant(a) if *a == Complex64::new(0.0, 0.0) => {
                Some(DualFunction::zeros(&self.spec))
            }
            Structure::Derived { op, parent } => {
                let k = parent.difference_profile()?;
                match op {
                    DerivedOp::DiffTranslate { y } => Some(k.translate_idx(*y)),
                    DerivedOp::DiffModulate { y } => Some(k.modulate_idx(*y)),
                    DerivedOp::DiffConvolve { phi } => convolve_dual(phi, &k).ok(),
                    DerivedOp::DiffProduct { phi } => fourier_forward(phi).mul(&k).ok(),
                    DerivedOp::Scale(a) => Some(k.scale(*a)),
                    // M(s - s0 - (t - t0)) is the profile shifted by s0 - t0.
                    DerivedOp::Translate { s0, t0 } => Some(k.translate_idx(self.spec.sub_idx(*s0, *t0))),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn require_difference(&self) -> Result<DualFunction> {
        self.difference_profile()
            .ok_or_else(|| Error::InvalidParameter("symbol is not a difference symbol".into()))
    }

    fn derived_difference(&self, op: DerivedOp, k: DualFunction) -> Self {
        let g = self.spec.clone();
        self.derived(op, |s, t| k.at(g.sub_idx(s, t)))
    }

    pub fn diff_translate(&self, y: usize) -> Result<Self> {
        let k = self.require_difference()?.translate_idx(y);
        Ok(self.derived_difference(DerivedOp::DiffTranslate { y }, k))
    }

    pub fn diff_modulate(&self, y: usize) -> Result<Self> {
        let k = self.require_difference()?.modulate_idx(y);
        Ok(self.derived_difference(DerivedOp::DiffModulate { y }, k))
    }

    pub fn diff_convolve(&self, phi: &DualFunction) -> Result<Self> {
        let k = convolve_dual(phi, &self.require_difference()?)?;
        Ok(self.derived_difference(DerivedOp::DiffConvolve { phi: phi.clone() }, k))
    }

    pub fn diff_product(&self, phi: &GFunction) -> Result<Self> {
        let k = fourier_forward(phi).mul(&self.require_difference()?)?;
        Ok(self.derived_difference(DerivedOp::DiffProduct { phi: phi.clone() }, k))
    }

    /// `M(s - t) Φ̂(s + t)`.
    pub fn sum_filter(&self, phi: &GFunction) -> Result<Self> {
        let k = self.require_difference()?;
        self.check_spec(phi.spec())?;
        let hat = fourier_forward(phi);
        let g = self.spec.clone();
        Ok(self.derived(DerivedOp::SumFilter { phi: phi.clone() }, |s, t| {
            k.at(g.sub_idx(s, t)) * hat.at(g.add_idx(s, t))
        }))
    }

    /// Recomputes the values from the structure tag alone.
    pub fn rebuild(&self) -> Result<Symbol> {
        Ok(match &self.structure {
            Structure::General => self.clone(),
            Structure::Constant(a) => Symbol::constant(&self.spec, *a),
            Structure::RankOne { m1, m2 } => Symbol::rank_one(m1, m2)?,
            Structure::Difference { m } => Symbol::difference(m),
            Structure::Triple { psi1, phi, psi2 } => Symbol::triple(psi1, phi, psi2)?,
            Structure::Measure { lambda, a, b } => Symbol::measure(lambda, a, b)?,
            Structure::Derived { op, parent } => {
                let p = parent.rebuild()?;
                match op {
                    DerivedOp::Translate { s0, t0 } => p.translate(*s0, *t0),
                    DerivedOp::Modulate { s0, t0 } => p.modulate(*s0, *t0),
                    DerivedOp::Convolve { phi } => p.convolve(phi)?,
                    DerivedOp::ProductTransform { phi } => p.product_transform(phi)?,
                    DerivedOp::Dilate { a } => p.dilate(a)?,
                    DerivedOp::PsiWeighted { psi, a } => p.psi_weighted(psi, a)?,
                    DerivedOp::Average { u1, u2 } => p.average(u1, u2)?,
                    DerivedOp::Scale(a) => p.scale(*a),
                    DerivedOp::DiffTranslate { y } => p.diff_translate(*y)?,
                    DerivedOp::DiffModulate { y } => p.diff_modulate(*y)?,
                    DerivedOp::DiffConvolve { phi } => p.diff_convolve(phi)?,
                    DerivedOp::DiffProduct { phi } => p.diff_product(phi)?,
                    DerivedOp::SumFilter { phi } => p.sum_filter(phi)?,
                }
            }
        })
    }
}

trait HasSpec {
    fn group(&self) -> &GroupSpec;
}

impl HasSpec for GFunction {
    fn group(&self) -> &GroupSpec {
        self.spec()
    }
}

impl HasSpec for DualFunction {
    fn group(&self) -> &GroupSpec {
        self.spec()
    }
}

/// `D_A f = f ∘ A` (the modulus factor is 1 on a finite group).
pub fn dilate_function(f: &GFunction, a: &Automorphism) -> Result<GFunction> {
    if f.spec() != a.spec() {
        return Err(Error::SpecMismatch(f.spec().to_string(), a.spec().to_string()));
    }
    Ok(f.compose(&a.permutation()))
}

/// `K^∨` as a function on `G`.
pub fn kernel_of(m: &DualFunction) -> GFunction {
    fourier_inverse(m)
}

/// Exponent triple `p₁, p₂, p₃` with θ and the ε-grid shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub theta: f64,
    pub grid: GridSpec,
}

impl MultiplierParams {
    pub fn new(p1: f64, p2: f64, p3: f64, theta: f64, grid: GridSpec) -> Result<Self> {
        for p in [p1, p2, p3] {
            conjugate(p)?;
        }
        let me = Self { p1, p2, p3, theta, grid };
        me.small_params()?;
        Ok(me)
    }

    /// `p₁' = 9, p₂' = 10, p₃' = 3/2`.
    pub fn example1(theta: f64, grid: GridSpec) -> Self {
        Self::new(9.0 / 8.0, 10.0 / 9.0, 3.0, theta, grid).expect("valid exponents")
    }

    pub fn conjugates(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3].map(|p| p / (p - 1.0))
    }

    /// `1/q = 1/p₁' + 1/p₂' - 1/p₃'`.
    pub fn q(&self) -> f64 {
        let [a, b, c] = self.conjugates();
        1.0 / (1.0 / a + 1.0 / b - 1.0 / c)
    }

    /// Small-norm parameters of the three spaces `L^{(p_i',θ}`.
    pub fn small_params(&self) -> Result<[SmallParams; 3]> {
        let [a, b, c] = self.conjugates();
        Ok([
            SmallParams::geometric(a, self.theta, self.grid)?,
            SmallParams::geometric(b, self.theta, self.grid)?,
            SmallParams::geometric(c, self.theta, self.grid)?,
        ])
    }
}

#[cfg(test)]
mod tests;
