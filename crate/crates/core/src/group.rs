//! Finite abelian groups `Z_{n1} x ... x Z_{nk}`.
//!
//! Elements are stored as flat indices, row-major over the factor grid with
//! the last factor varying fastest. The dual group uses the same index set.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<usize>,
    strides: Vec<usize>,
    order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(Vec<usize>);

impl GroupElement {
    pub fn residues(&self) -> &[usize] {
        &self.0
    }
}

impl GroupSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no factors".into()));
        }
        if let Some(&n) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidGroup(format!("factor {n} < 2")));
        }
        let mut order: usize = 1;
        for &n in &factors {
            order = order
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidGroup("order overflows".into()))?;
        }
        let mut strides = vec![1; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }
        Ok(Self { factors, strides, order })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The product group `self x other`, factors concatenated.
    pub fn product(&self, other: &GroupSpec) -> GroupSpec {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        GroupSpec::new(f).expect("product of valid specs")
    }

    /// Reduces arbitrary integers componentwise.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_rank(residues.len())?;
        Ok(GroupElement(
            residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
                .collect(),
        ))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    fn check_rank(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::Dimension { expected: self.rank(), got });
        }
        Ok(())
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        self.check_rank(x.0.len())?;
        for (i, (&r, &n)) in x.0.iter().zip(&self.factors).enumerate() {
            if r >= n {
                return Err(Error::InvalidParameter(format!(
                    "residue {r} out of range for factor {i} (order {n})"
                )));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        self.check(x)?;
        Ok(x.0.iter().zip(&self.strides).map(|(r, s)| r * s).sum())
    }

    pub fn element_at(&self, idx: usize) -> GroupElement {
        GroupElement(self.residues_of(idx))
    }

    fn residues_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            out[i] = idx % self.factors[i];
            idx /= self.factors[i];
        }
        out
    }

    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, n| (x + y) % n)
    }

    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, n| (x + n - y) % n)
    }

    pub fn neg_idx(&self, a: usize) -> usize {
        self.combine(0, a, |x, y, n| (x + n - y) % n)
    }

    fn combine(&self, mut a: usize, mut b: usize, op: impl Fn(usize, usize, usize) -> usize) -> usize {
        let mut out = 0;
        for i in (0..self.rank()).rev() {
            let n = self.factors[i];
            out += op(a % n, b % n, n) * self.strides[i];
            a /= n;
            b /= n;
        }
        out
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        Ok(self.element_at(self.add_idx(self.index_of(a)?, self.index_of(b)?)))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        Ok(self.element_at(self.neg_idx(self.index_of(a)?)))
    }

    /// Turns of the character pairing, reduced to `[0, 1)`.
    fn pairing_turns(&self, mut s: usize, mut x: usize) -> f64 {
        let mut turns = 0.0;
        for &n in self.factors.iter().rev() {
            turns += ((s % n) * (x % n) % n) as f64 / n as f64;
            s /= n;
            x /= n;
        }
        turns - turns.floor()
    }

    /// `<s, x> = exp(2 pi i sum s_i x_i / n_i)` on flat indices.
    pub fn character_idx(&self, s: usize, x: usize) -> Complex64 {
        unit_root(self.pairing_turns(s, x))
    }

    pub fn character(&self, s: &GroupElement, x: &GroupElement) -> Result<Complex64> {
        Ok(self.character_idx(self.index_of(s)?, self.index_of(x)?))
    }

    /// Circular sup-distance of `x` from zero.
    pub fn distance_to_zero(&self, idx: usize) -> usize {
        self.residues_of(idx)
            .iter()
            .zip(&self.factors)
            .map(|(&r, &n)| r.min(n - r))
            .max()
            .unwrap_or(0)
    }

    pub fn diameter(&self) -> usize {
        self.factors.iter().map(|n| n / 2).max().unwrap_or(0)
    }

    /// Closed ball `{x : d(x, 0) <= r}`, as sorted flat indices.
    pub fn ball(&self, r: f64) -> Vec<usize> {
        (0..self.order)
            .filter(|&i| self.distance_to_zero(i) as f64 <= r)
            .collect()
    }

    pub fn mean(&self, values: &[Complex64]) -> Complex64 {
        values.iter().sum::<Complex64>() / self.order as f64
    }
}

fn unit_root(turns: f64) -> Complex64 {
    let q = turns * 4.0;
    if q == q.round() {
        return match q as i64 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (2.0 * std::f64::consts::PI * turns).sin_cos();
    Complex64::new(c, s)
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.is_empty() {
            return Err(Error::InvalidGroup("empty spec".into()));
        }
        let mut factors = Vec::new();
        for part in lower.split('x') {
            let digits = part
                .trim()
                .strip_prefix('z')
                .ok_or_else(|| Error::InvalidGroup(format!("factor '{part}' must look like Z<n>")))?;
            let n: usize = digits
                .parse()
                .map_err(|_| Error::InvalidGroup(format!("bad order in '{part}'")))?;
            factors.push(n);
        }
        GroupSpec::new(factors)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn mod_inverse(a: usize, n: usize) -> Option<usize> {
    let (mut r0, mut r1) = (n as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(n as i64) as usize)
}

/// Componentwise unit automorphism `x -> (a_1 x_1, ..., a_k x_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    spec: GroupSpec,
    units: Vec<usize>,
}

impl Automorphism {
    pub fn new(spec: &GroupSpec, units: &[i64]) -> Result<Self> {
        if units.len() != spec.rank() {
            return Err(Error::Dimension { expected: spec.rank(), got: units.len() });
        }
        let mut reduced = Vec::with_capacity(units.len());
        for (&a, &n) in units.iter().zip(spec.factors()) {
            let r = a.rem_euclid(n as i64) as usize;
            if gcd(r, n) != 1 {
                return Err(Error::NotUnit(a, n));
            }
            reduced.push(r);
        }
        Ok(Self { spec: spec.clone(), units: reduced })
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        Self { spec: spec.clone(), units: vec![1; spec.rank()] }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_identity(&self) -> bool {
        self.units.iter().all(|&a| a == 1)
    }

    pub fn inverse(&self) -> Self {
        let units = self
            .units
            .iter()
            .zip(self.spec.factors())
            .map(|(&a, &n)| mod_inverse(a, n).expect("unit"))
            .collect();
        Self { spec: self.spec.clone(), units }
    }

    pub fn apply_idx(&self, idx: usize) -> usize {
        let r = self.spec.residues_of(idx);
        r.iter()
            .zip(&self.units)
            .zip(self.spec.factors())
            .zip(&self.spec.strides)
            .map(|(((&x, &a), &n), &s)| (x * a % n) * s)
            .sum()
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        Ok(self.spec.element_at(self.apply_idx(self.spec.index_of(x)?)))
    }

    /// `A*` on the dual group; componentwise units are self-adjoint.
    pub fn adjoint_apply_idx(&self, idx: usize) -> usize {
        self.apply_idx(idx)
    }

    pub fn adjoint_apply(&self, s: &GroupElement) -> Result<GroupElement> {
        self.apply(s)
    }

    /// `perm[x] = A x`.
    pub fn permutation(&self) -> Vec<usize> {
        (0..self.spec.order()).map(|i| self.apply_idx(i)).collect()
    }

    /// `|A| = |A(G)| / |G|`, computed from the image.
    pub fn modulus(&self) -> f64 {
        let mut seen = vec![false; self.spec.order()];
        for i in self.permutation() {
            seen[i] = true;
        }
        seen.iter().filter(|&&b| b).count() as f64 / self.spec.order() as f64
    }

    /// Every componentwise automorphism of the group.
    pub fn all(spec: &GroupSpec) -> Vec<Automorphism> {
        let per_factor: Vec<Vec<usize>> = spec
            .factors()
            .iter()
            .map(|&n| (1..n).filter(|&a| gcd(a, n) == 1).collect())
            .collect();
        let mut out = vec![Vec::new()];
        for units in per_factor {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    units.iter().map(move |&a| {
                        let mut v = prefix.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|u| Automorphism { spec: spec.clone(), units: u })
            .collect()
    }
}
