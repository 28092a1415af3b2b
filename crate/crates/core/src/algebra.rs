//! Real Clifford algebras `R_n` (e_i^2 = -1, anticommuting units) and the
//! quaternions, together with paravector utilities.
//!
//! Both algebras share one dense representation: a [`Multivector`] stores one
//! real coefficient per basis element. For `R_n` the basis element with index
//! `mask` is the blade `e_{i1} e_{i2} ...` where bit `i-1` of `mask` is set, in
//! ascending order. For the quaternions the basis is `1, i, j, k`.
//!
//! In both cases the "imaginary units" used by paravectors are the generators:
//! `e_1..e_n` for `R_n` and `i, j, k` for `H`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for unit-scale comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

/// The algebra an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Algebra {
    /// Real Clifford algebra over `n` anticommuting units squaring to -1.
    Clifford { n: usize },
    /// Quaternions with units i, j, k.
    Quaternion,
}

/// Largest Clifford dimension we accept; 2^7 = 128 coefficients.
pub const MAX_CLIFFORD_N: usize = 7;

impl Algebra {
    pub fn clifford(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_CLIFFORD_N {
            return Err(Error::Unsupported(format!(
                "Clifford dimension n={n} (supported: 1..={MAX_CLIFFORD_N})"
            )));
        }
        Ok(Algebra::Clifford { n })
    }

    /// Number of basis elements (2^n or 4).
    pub fn dim(&self) -> usize {
        match *self {
            Algebra::Clifford { n } => 1 << n,
            Algebra::Quaternion => 4,
        }
    }

    /// Number of imaginary generators; this is the `n` that enters every kernel
    /// formula (the quaternions behave as the `n = 3` case).
    pub fn units(&self) -> usize {
        match *self {
            Algebra::Clifford { n } => n,
            Algebra::Quaternion => 3,
        }
    }

    /// Basis index of the `j`-th imaginary unit, `j` in `1..=units()`.
    pub fn unit_index(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.units());
        match *self {
            Algebra::Clifford { .. } => 1 << (j - 1),
            Algebra::Quaternion => j,
        }
    }

    /// Product of two basis elements: `e_a e_b = sign * e_result`.
    pub fn basis_product(&self, a: usize, b: usize) -> (f64, usize) {
        match *self {
            Algebra::Clifford { .. } => {
                // Move each generator of b leftwards past the generators of a
                // with a larger index, then contract the common ones.
                let mut swaps = 0u32;
                let mut bits = b;
                while bits != 0 {
                    let low = bits.trailing_zeros();
                    swaps += (a >> (low + 1)).count_ones();
                    bits &= bits - 1;
                }
                let contractions = (a & b).count_ones();
                let sign = if (swaps + contractions) % 2 == 0 { 1.0 } else { -1.0 };
                (sign, a ^ b)
            }
            Algebra::Quaternion => QUAT_TABLE[a][b],
        }
    }

    pub fn basis_label(&self, idx: usize) -> String {
        match *self {
            Algebra::Clifford { .. } => {
                if idx == 0 {
                    return "1".to_string();
                }
                let mut s = String::from("e");
                for bit in 0..usize::BITS {
                    if idx & (1 << bit) != 0 {
                        s.push_str(&(bit + 1).to_string());
                    }
                }
                s
            }
            Algebra::Quaternion => ["1", "i", "j", "k"][idx].to_string(),
        }
    }

    /// Inverse of [`Algebra::basis_label`].
    pub fn parse_basis_label(&self, label: &str) -> Result<usize> {
        let label = label.trim();
        let bad = || Error::Parse(format!("unknown basis element '{label}' for {self}"));
        match *self {
            Algebra::Clifford { n } => {
                if label == "1" || label == "e" || label == "e0" {
                    return Ok(0);
                }
                let digits = label.strip_prefix('e').ok_or_else(bad)?;
                let mut mask = 0usize;
                let mut last = 0u32;
                for ch in digits.chars() {
                    let k = ch.to_digit(10).ok_or_else(bad)?;
                    if k == 0 || k as usize > n || k <= last {
                        return Err(bad());
                    }
                    last = k;
                    mask |= 1 << (k - 1);
                }
                Ok(mask)
            }
            Algebra::Quaternion => match label {
                "1" => Ok(0),
                "i" => Ok(1),
                "j" => Ok(2),
                "k" => Ok(3),
                _ => Err(bad()),
            },
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Clifford { n } => write!(f, "R_{n}"),
            Algebra::Quaternion => write!(f, "H"),
        }
    }
}

const QUAT_TABLE: [[(f64, usize); 4]; 4] = [
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
    [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
    [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
    [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
];

/// Dense element of a Clifford algebra or of the quaternions.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    alg: Algebra,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(alg: Algebra) -> Self {
        Multivector {
            alg,
            coeffs: vec![0.0; alg.dim()],
        }
    }

    pub fn scalar(alg: Algebra, x: f64) -> Self {
        let mut m = Self::zero(alg);
        m.coeffs[0] = x;
        m
    }

    pub fn one(alg: Algebra) -> Self {
        Self::scalar(alg, 1.0)
    }

    pub fn basis(alg: Algebra, idx: usize) -> Self {
        let mut m = Self::zero(alg);
        m.coeffs[idx] = 1.0;
        m
    }

    /// The `j`-th imaginary unit (`e_j`, or i/j/k).
    pub fn unit(alg: Algebra, j: usize) -> Self {
        Self::basis(alg, alg.unit_index(j))
    }

    pub fn from_coeffs(alg: Algebra, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coefficients for {alg}", alg.dim()),
                found: coeffs.len().to_string(),
            });
        }
        Ok(Multivector { alg, coeffs })
    }

    /// Builds a quaternion `x0 + i x1 + j x2 + k x3`.
    pub fn quaternion(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Multivector {
            alg: Algebra::Quaternion,
            coeffs: vec![x0, x1, x2, x3],
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: usize) -> f64 {
        self.coeffs[idx]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        Multivector {
            alg: self.alg,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Geometric product, reporting mismatched algebras as an error.
    pub fn try_mul(&self, rhs: &Multivector) -> Result<Multivector> {
        if self.alg != rhs.alg {
            return Err(Error::DimensionMismatch {
                expected: self.alg.to_string(),
                found: rhs.alg.to_string(),
            });
        }
        let mut out = vec![0.0; self.alg.dim()];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in rhs.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                let (sign, idx) = self.alg.basis_product(a, b);
                out[idx] += sign * ca * cb;
            }
        }
        Ok(Multivector {
            alg: self.alg,
            coeffs: out,
        })
    }

    /// Largest absolute coefficient outside the scalar and grade-1 part.
    pub fn non_paravector_norm(&self) -> f64 {
        let mut keep = vec![false; self.alg.dim()];
        keep[0] = true;
        for j in 1..=self.alg.units() {
            keep[self.alg.unit_index(j)] = true;
        }
        self.coeffs
            .iter()
            .zip(keep)
            .filter(|(_, k)| !k)
            .map(|(c, _)| c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_close(&self, other: &Multivector, tol: f64) -> bool {
        self.alg == other.alg && (self - other).norm() <= tol * (1.0 + self.norm().max(other.norm()))
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if idx == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}{}", self.alg.basis_label(idx))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add<&Multivector> for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        Multivector {
            alg: self.alg,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Multivector> for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        Multivector {
            alg: self.alg,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&Multivector> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.try_mul(rhs).expect("algebra mismatch")
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident, $ty:ty) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add, Multivector);
forward_owned_binop!(Sub, sub, Multivector);
forward_owned_binop!(Mul, mul, Multivector);

/// Element `x0 + x1 e_1 + ... + xn e_n` of `R^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Paravector {
    alg: Algebra,
    parts: Vec<f64>,
}

impl Paravector {
    pub fn new(alg: Algebra, parts: Vec<f64>) -> Result<Self> {
        if parts.len() != alg.units() + 1 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} paravector parts for {alg}", alg.units() + 1),
                found: parts.len().to_string(),
            });
        }
        Ok(Paravector { alg, parts })
    }

    pub fn real(alg: Algebra, x: f64) -> Self {
        let mut parts = vec![0.0; alg.units() + 1];
        parts[0] = x;
        Paravector { alg, parts }
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn parts(&self) -> &[f64] {
        &self.parts
    }

    pub fn re(&self) -> f64 {
        self.parts[0]
    }

    /// `|x_|`, the norm of the vector part.
    pub fn vector_norm(&self) -> f64 {
        self.parts[1..].iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.parts.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        let mut parts = self.parts.clone();
        for p in &mut parts[1..] {
            *p = -*p;
        }
        Paravector { alg: self.alg, parts }
    }

    /// `x^{-1} = conj(x) / |x|^2`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::Singular(format!("paravector {self} has no inverse")));
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn scale(&self, k: f64) -> Self {
        Paravector {
            alg: self.alg,
            parts: self.parts.iter().map(|p| p * k).collect(),
        }
    }

    pub fn add_real(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.parts[0] += k;
        out
    }

    pub fn to_mv(&self) -> Multivector {
        let mut m = Multivector::zero(self.alg);
        m.coeffs[0] = self.parts[0];
        for j in 1..=self.alg.units() {
            m.coeffs[self.alg.unit_index(j)] = self.parts[j];
        }
        m
    }

    /// Reads the scalar and grade-1 part of `m`; fails if anything else is
    /// present beyond `tol`.
    pub fn from_mv(m: &Multivector, tol: f64) -> Result<Self> {
        let leak = m.non_paravector_norm();
        if leak > tol * (1.0 + m.norm()) {
            return Err(Error::Precondition(format!(
                "multivector is not a paravector (off-grade norm {leak:.3e})"
            )));
        }
        let alg = m.algebra();
        let mut parts = vec![m.coeff(0)];
        parts.extend((1..=alg.units()).map(|j| m.coeff(alg.unit_index(j))));
        Ok(Paravector { alg, parts })
    }

    /// Unit direction of the vector part, if it is nonzero.
    pub fn imaginary_unit(&self) -> Option<ImaginaryUnit> {
        let r = self.vector_norm();
        if r == 0.0 {
            return None;
        }
        Some(ImaginaryUnit {
            alg: self.alg,
            comps: self.parts[1..].iter().map(|c| c / r).collect(),
        })
    }

    /// The same point seen as the complex number `Re(x) + i|x_|`.
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re(), self.vector_norm())
    }

    /// Maps the complex number `z` into the plane spanned by 1 and the
    /// direction of `self` (e_1 when `self` is real).
    pub fn from_plane_complex(&self, z: Complex64) -> Paravector {
        let unit = self
            .imaginary_unit()
            .unwrap_or_else(|| ImaginaryUnit::basis(self.alg, 1));
        embed_in_plane(z.re, z.im, &unit)
    }

    /// `x^2`, which stays in the plane of `x`.
    pub fn square(&self) -> Self {
        self.powi(2)
    }

    /// Integer power computed in the plane of `x`; negative powers invert.
    pub fn powi(&self, k: i32) -> Self {
        let z = self.as_complex();
        let w = if k >= 0 { z.powi(k) } else { z.inv().powi(-k) };
        self.from_plane_complex(w)
    }

    pub fn sphere(&self) -> SpectralSphere {
        sphere_of(self)
    }
}

impl fmt::Display for Paravector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Add<&Paravector> for &Paravector {
    type Output = Paravector;
    fn add(self, rhs: &Paravector) -> Paravector {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        Paravector {
            alg: self.alg,
            parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Paravector> for &Paravector {
    type Output = Paravector;
    fn sub(self, rhs: &Paravector) -> Paravector {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        Paravector {
            alg: self.alg,
            parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a - b).collect(),
        }
    }
}

forward_owned_binop!(Add, add, Paravector);
forward_owned_binop!(Sub, sub, Paravector);

/// A unit 1-vector `I`, so that `I^2 = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaginaryUnit {
    alg: Algebra,
    comps: Vec<f64>,
}

impl ImaginaryUnit {
    /// Accepts components whose Euclidean norm is 1 within `1e-10`.
    pub fn new(alg: Algebra, comps: Vec<f64>) -> Result<Self> {
        let unit = Self::normalized(alg, comps.clone())?;
        let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!(
                "imaginary unit must have norm 1, got {norm}"
            )));
        }
        Ok(unit)
    }

    /// Rescales nonzero components onto the unit sphere.
    pub fn normalized(alg: Algebra, comps: Vec<f64>) -> Result<Self> {
        if comps.len() != alg.units() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} components", alg.units()),
                found: comps.len().to_string(),
            });
        }
        let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Precondition("imaginary unit must be nonzero".into()));
        }
        Ok(ImaginaryUnit {
            alg,
            comps: comps.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// `e_j` (or i, j, k), `j` in `1..=units`.
    pub fn basis(alg: Algebra, j: usize) -> Self {
        let mut comps = vec![0.0; alg.units()];
        comps[j - 1] = 1.0;
        ImaginaryUnit { alg, comps }
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn to_mv(&self) -> Multivector {
        embed_in_plane(0.0, 1.0, self).to_mv()
    }
}

/// An axially symmetric set `[s0 + r S]`; `r = 0` is a real point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSphere {
    pub center: f64,
    pub radius: f64,
}

impl SpectralSphere {
    pub fn new(center: f64, radius: f64) -> Self {
        SpectralSphere {
            center,
            radius: radius.abs(),
        }
    }

    /// Euclidean distance in `R^{n+1}` from `y` to the sphere.
    pub fn distance_to(&self, y: &Paravector) -> f64 {
        ((y.re() - self.center).powi(2) + (y.vector_norm() - self.radius).powi(2)).sqrt()
    }

    pub fn contains(&self, y: &Paravector, tol: f64) -> bool {
        (y.re() - self.center).abs() <= tol && (y.vector_norm() - self.radius).abs() <= tol
    }

    /// `sqrt(s0^2 + r^2)`, the modulus of every point on the sphere.
    pub fn modulus(&self) -> f64 {
        self.center.hypot(self.radius)
    }

    /// The point `s0 + I r` of the sphere lying in the plane of `unit`.
    pub fn point_in_plane(&self, unit: &ImaginaryUnit) -> Paravector {
        embed_in_plane(self.center, self.radius, unit)
    }
}

/// `x · y` of two multivectors, checking that they live in the same algebra.
pub fn mv_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.try_mul(b)
}

pub fn paravector_conjugate(x: &Paravector) -> Paravector {
    x.conj()
}

pub fn paravector_inverse(x: &Paravector) -> Result<Paravector> {
    x.inverse()
}

/// `[x] = {Re(x) + I|x_| : I in S}` as a (center, radius) pair.
pub fn sphere_of(x: &Paravector) -> SpectralSphere {
    SpectralSphere::new(x.re(), x.vector_norm())
}

/// `u + I v`.
pub fn embed_in_plane(u: f64, v: f64, unit: &ImaginaryUnit) -> Paravector {
    let mut parts = Vec::with_capacity(unit.comps.len() + 1);
    parts.push(u);
    parts.extend(unit.comps.iter().map(|c| c * v));
    Paravector {
        alg: unit.alg,
        parts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Multiplies two blades symbol by symbol: concatenate the generator
    /// words, then bubble-sort applying e_i e_j = -e_j e_i and e_i e_i = -1.
    fn symbolic_blade_product(a: usize, b: usize) -> (f64, usize) {
        let word = |m: usize| (0..8).filter(move |i| m & (1 << i) != 0).collect::<Vec<_>>();
        let mut w = word(a);
        w.extend(word(b));
        let mut sign = 1.0;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < w.len() {
                if w[i] > w[i + 1] {
                    w.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if w[i] == w[i + 1] {
                    w.drain(i..i + 2);
                    sign = -sign;
                    changed = true;
                    continue;
                }
                i += 1;
            }
            if !changed {
                break;
            }
        }
        (sign, w.iter().fold(0, |m, i| m | (1 << i)))
    }

    #[test]
    fn blade_signs_match_symbolic_rewriting() {
        for n in 1..=5 {
            let alg = Algebra::clifford(n).unwrap();
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    assert_eq!(alg.basis_product(a, b), symbolic_blade_product(a, b), "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn e1_squared_and_e12_squared() {
        let alg = Algebra::clifford(3).unwrap();
        let e1 = Multivector::unit(alg, 1);
        assert_eq!(&e1 * &e1, Multivector::scalar(alg, -1.0));
        let e12 = Multivector::basis(alg, 0b11);
        assert_eq!(&e12 * &e12, Multivector::scalar(alg, -1.0));
    }

    #[test]
    fn anticommutation_relations() {
        for n in 1..=5 {
            let alg = Algebra::clifford(n).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let ei = Multivector::unit(alg, i);
                    let ej = Multivector::unit(alg, j);
                    let lhs = &(&ei * &ej) + &(&ej * &ei);
                    let delta = if i == j { -2.0 } else { 0.0 };
                    assert_eq!(lhs, Multivector::scalar(alg, delta));
                }
            }
        }
    }

    #[test]
    fn quaternion_rules() {
        let q = Algebra::Quaternion;
        let (i, j, k) = (Multivector::unit(q, 1), Multivector::unit(q, 2), Multivector::unit(q, 3));
        let m1 = Multivector::scalar(q, -1.0);
        assert_eq!(&i * &i, m1);
        assert_eq!(&j * &j, m1);
        assert_eq!(&k * &k, m1);
        assert_eq!(&(&i * &j) * &k, m1);
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = Multivector::one(Algebra::clifford(3).unwrap());
        let b = Multivector::one(Algebra::clifford(2).unwrap());
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn conjugate_and_inverse_examples() {
        let alg = Algebra::clifford(3).unwrap();
        let x = Paravector::new(alg, vec![3.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(x.conj(), x);
        let y = Paravector::new(alg, vec![1.0, 2.0, 0.0, -1.0]).unwrap();
        assert_eq!(y.conj().parts(), &[1.0, -2.0, 0.0, 1.0]);
        let e1 = Paravector::new(alg, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e1.inverse().unwrap().parts(), &[0.0, -1.0, 0.0, 0.0]);
        assert_eq!(Paravector::real(alg, 1.0).inverse().unwrap(), Paravector::real(alg, 1.0));
        assert!(matches!(Paravector::real(alg, 0.0).inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn sphere_examples() {
        let alg = Algebra::clifford(3).unwrap();
        let s = sphere_of(&Paravector::real(alg, 5.0));
        assert_eq!((s.center, s.radius), (5.0, 0.0));
        let s = sphere_of(&Paravector::new(alg, vec![1.0, 3.0, 4.0, 0.0]).unwrap());
        assert_eq!((s.center, s.radius), (1.0, 5.0));
    }

    #[test]
    fn embed_in_plane_examples() {
        let alg = Algebra::clifford(3).unwrap();
        let e1 = ImaginaryUnit::basis(alg, 1);
        assert_eq!(embed_in_plane(2.5, 0.0, &e1), Paravector::real(alg, 2.5));
        assert_eq!(embed_in_plane(0.0, 1.0, &e1).parts(), &[0.0, 1.0, 0.0, 0.0]);
        let unit = ImaginaryUnit::normalized(alg, vec![1.0, 2.0, -2.0]).unwrap();
        let z = embed_in_plane(0.7, 1.3, &unit);
        let w = embed_in_plane(0.7, -1.3, &unit);
        let prod = &z.to_mv() * &w.to_mv();
        assert!(prod.is_close(&Multivector::scalar(alg, 0.7 * 0.7 + 1.3 * 1.3), 1e-14));
        assert_eq!(sphere_of(&z), SpectralSphere::new(0.7, 1.3));
        let u = unit.to_mv();
        assert!((&u * &u).is_close(&Multivector::scalar(alg, -1.0), 1e-14));
    }

    #[test]
    fn labels_round_trip() {
        let alg = Algebra::clifford(5).unwrap();
        for idx in 0..alg.dim() {
            assert_eq!(alg.parse_basis_label(&alg.basis_label(idx)).unwrap(), idx);
        }
        let q = Algebra::Quaternion;
        for idx in 0..4 {
            assert_eq!(q.parse_basis_label(&q.basis_label(idx)).unwrap(), idx);
        }
        assert!(alg.parse_basis_label("e21").is_err());
        assert!(alg.parse_basis_label("e6").is_err());
    }
}
