//! JSON form of symbols: `{spec, structure, values?}`.
//!
//! Structured symbols carry constructor parameters only; dense values are
//! required for `general` and optional otherwise. Group elements are flat
//! indices, complex numbers are `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hl_kernel, DerivedOp, Structure, Symbol};
use crate::error::{Error, Result};
use crate::group::{Automorphism, GroupSpec};
use crate::spectral::{AtomicMeasure, DualFunction, GFunction};

pub type Pair = [f64; 2];

pub fn to_pairs(v: &[Complex64]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(v: &[Pair]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub spec: GroupSpec,
    pub structure: StructureDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureDoc {
    General {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<Pair>>,
    },
    Constant { a: Pair },
    RankOne { m1: Vec<Pair>, m2: Vec<Pair> },
    Difference { m: Vec<Pair> },
    /// `K̂(s - t)` for a kernel on `G`.
    DifferenceKernel { k: Vec<Pair> },
    /// Ball-average kernel of the given radius.
    HlKernel { radius: usize },
    Triple { psi1: Vec<Pair>, phi: Vec<Pair>, psi2: Vec<Pair> },
    Measure { atoms: Vec<(usize, Pair)>, a: Vec<i64>, b: Vec<i64> },
    Derived { op: OpDoc, parent: Box<StructureDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpDoc {
    Translate { s0: usize, t0: usize },
    Modulate { s0: usize, t0: usize },
    Convolve { phi: Vec<Pair> },
    ProductTransform { phi: Vec<Pair> },
    Dilate { units: Vec<i64> },
    PsiWeighted { psi: Vec<Pair>, units: Vec<i64> },
    Average { u1: Vec<usize>, u2: Vec<usize> },
    Scale { a: Pair },
    DiffTranslate { y: usize },
    DiffModulate { y: usize },
    DiffConvolve { phi: Vec<Pair> },
    DiffProduct { phi: Vec<Pair> },
    SumFilter { phi: Vec<Pair> },
}

fn units(a: &Automorphism) -> Vec<i64> {
    a.units().iter().map(|&u| u as i64).collect()
}

fn structure_doc(m: &Symbol) -> StructureDoc {
    match m.structure() {
        Structure::General => StructureDoc::General { values: Some(to_pairs(m.values().values())) },
        Structure::Constant(a) => StructureDoc::Constant { a: [a.re, a.im] },
        Structure::RankOne { m1, m2 } => StructureDoc::RankOne {
            m1: to_pairs(m1.values()),
            m2: to_pairs(m2.values()),
        },
        Structure::Difference { m } => StructureDoc::Difference { m: to_pairs(m.values()) },
        Structure::Triple { psi1, phi, psi2 } => StructureDoc::Triple {
            psi1: to_pairs(psi1.values()),
            phi: to_pairs(phi.values()),
            psi2: to_pairs(psi2.values()),
        },
        Structure::Measure { lambda, a, b } => StructureDoc::Measure {
            atoms: lambda.atoms().iter().map(|&(x, w)| (x, [w.re, w.im])).collect(),
            a: units(a),
            b: units(b),
        },
        Structure::Derived { op, parent } => {
            let op = match op {
                DerivedOp::Translate { s0, t0 } => OpDoc::Translate { s0: *s0, t0: *t0 },
                DerivedOp::Modulate { s0, t0 } => OpDoc::Modulate { s0: *s0, t0: *t0 },
                DerivedOp::Convolve { phi } => OpDoc::Convolve { phi: to_pairs(phi.values()) },
                DerivedOp::ProductTransform { phi } => OpDoc::ProductTransform { phi: to_pairs(phi.values()) },
                DerivedOp::Dilate { a } => OpDoc::Dilate { units: units(a) },
                DerivedOp::PsiWeighted { psi, a } => OpDoc::PsiWeighted {
                    psi: to_pairs(psi.values()),
                    units: units(a),
                },
                DerivedOp::Average { u1, u2 } => OpDoc::Average { u1: u1.clone(), u2: u2.clone() },
                DerivedOp::Scale(a) => OpDoc::Scale { a: [a.re, a.im] },
                DerivedOp::DiffTranslate { y } => OpDoc::DiffTranslate { y: *y },
                DerivedOp::DiffModulate { y } => OpDoc::DiffModulate { y: *y },
                DerivedOp::DiffConvolve { phi } => OpDoc::DiffConvolve { phi: to_pairs(phi.values()) },
                DerivedOp::DiffProduct { phi } => OpDoc::DiffProduct { phi: to_pairs(phi.values()) },
                DerivedOp::SumFilter { phi } => OpDoc::SumFilter { phi: to_pairs(phi.values()) },
            };
            StructureDoc::Derived { op, parent: Box::new(structure_doc(parent)) }
        }
    }
}

fn build(spec: &GroupSpec, doc: &StructureDoc, top_values: Option<&Vec<Pair>>) -> Result<Symbol> {
    let pair = spec.product(spec);
    let g = |v: &[Pair]| GFunction::new(spec, from_pairs(v));
    let d = |v: &[Pair]| DualFunction::new(spec, from_pairs(v));
    Ok(match doc {
        StructureDoc::General { values } => {
            let v = values
                .as_ref()
                .or(top_values)
                .ok_or_else(|| Error::Parse("general symbol needs values".into()))?;
            Symbol::general(spec, DualFunction::new(&pair, from_pairs(v))?)?
        }
        StructureDoc::Constant { a } => Symbol::constant(spec, Complex64::new(a[0], a[1])),
        StructureDoc::RankOne { m1, m2 } => Symbol::rank_one(&d(m1)?, &d(m2)?)?,
        StructureDoc::Difference { m } => Symbol::difference(&d(m)?),
        StructureDoc::DifferenceKernel { k } => Symbol::difference_kernel(&g(k)?),
        StructureDoc::HlKernel { radius } => Symbol::difference_kernel(&hl_kernel(spec, *radius)),
        StructureDoc::Triple { psi1, phi, psi2 } => {
            Symbol::triple(&g(psi1)?, &GFunction::new(&pair, from_pairs(phi))?, &g(psi2)?)?
        }
        StructureDoc::Measure { atoms, a, b } => {
            let lam = AtomicMeasure::new(
                spec,
                atoms.iter().map(|(x, w)| (*x, Complex64::new(w[0], w[1]))).collect(),
            )?;
            Symbol::measure(&lam, &Automorphism::new(spec, a)?, &Automorphism::new(spec, b)?)?
        }
        StructureDoc::Derived { op, parent } => {
            let p = build(spec, parent, None)?;
            let n = spec.order();
            let idx = |i: usize| {
                if i < n { Ok(i) } else { Err(Error::InvalidParameter(format!("index {i} out of range"))) }
            };
            match op {
                OpDoc::Translate { s0, t0 } => p.translate(idx(*s0)?, idx(*t0)?),
                OpDoc::Modulate { s0, t0 } => p.modulate(idx(*s0)?, idx(*t0)?),
                OpDoc::Convolve { phi } => p.convolve(&DualFunction::new(&pair, from_pairs(phi))?)?,
                OpDoc::ProductTransform { phi } => {
                    p.product_transform(&GFunction::new(&pair, from_pairs(phi))?)?
                }
                OpDoc::Dilate { units } => p.dilate(&Automorphism::new(spec, units)?)?,
                OpDoc::PsiWeighted { psi, units } => {
                    p.psi_weighted(&d(psi)?, &Automorphism::new(spec, units)?)?
                }
                OpDoc::Average { u1, u2 } => p.average(u1, u2)?,
                OpDoc::Scale { a } => p.scale(Complex64::new(a[0], a[1])),
                OpDoc::DiffTranslate { y } => p.diff_translate(idx(*y)?)?,
                OpDoc::DiffModulate { y } => p.diff_modulate(idx(*y)?)?,
                OpDoc::DiffConvolve { phi } => p.diff_convolve(&d(phi)?)?,
                OpDoc::DiffProduct { phi } => p.diff_product(&g(phi)?)?,
                OpDoc::SumFilter { phi } => p.sum_filter(&g(phi)?)?,
            }
        }
    })
}

impl SymbolDoc {
    /// Parameters only; dense values are written for general symbols.
    pub fn from_symbol(m: &Symbol) -> Self {
        Self { spec: m.spec().clone(), structure: structure_doc(m), values: None }
    }

    pub fn with_values(mut self, m: &Symbol) -> Self {
        self.values = Some(to_pairs(m.values().values()));
        self
    }

    pub fn to_symbol(&self) -> Result<Symbol> {
        let sym = build(&self.spec, &self.structure, self.values.as_ref())?;
        if let (Some(v), false) = (&self.values, matches!(self.structure, StructureDoc::General { .. })) {
            let given = DualFunction::new(sym.pair_spec(), from_pairs(v))?;
            if given.max_abs_diff(sym.values()) > 1e-12 {
                return Err(Error::Parse("dense values disagree with the structure".into()));
            }
        }
        Ok(sym)
    }
}
