//! The SC- and F-functional calculi as contour integrals over resolvents.
//!
//! With node weights `w = ds_I / 2π` (see [`crate::contour`]) the left
//! integrals are `Σ K(s) L_w L_{f(s)}` and the right ones
//! `Σ L_{f(s)} L_w K(s)`, where `K` is a resolvent matrix and `L_a` is left
//! multiplication by the algebra element `a`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::contour::{integrate, Contour, Quadrature};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::operator::OperatorTuple;
use crate::slice::{Side, SliceFunction};
use crate::spectrum::{f_spectrum, FSpectrum};

/// Default number of trapezoidal nodes per circle.
pub const DEFAULT_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalculusKind {
    Sc,
    F,
}

impl std::fmt::Display for CalculusKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CalculusKind::Sc => "sc",
            CalculusKind::F => "f",
        })
    }
}

/// Quadrature settings. Only the trapezoidal rule on circles is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub nodes_per_circle: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_circle: DEFAULT_NODES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalculusResult {
    pub value: DMatrix<f64>,
    pub per_circle: Vec<DMatrix<f64>>,
    pub nodes: usize,
    /// Spectral norm of the change against the half-node rule.
    pub error_estimate: f64,
}

impl From<Quadrature<DMatrix<f64>>> for CalculusResult {
    fn from(q: Quadrature<DMatrix<f64>>) -> Self {
        CalculusResult {
            error_estimate: q.error_estimate(),
            value: q.value,
            per_circle: q.per_circle,
            nodes: q.nodes,
        }
    }
}

/// `(1/2π)∫ K(s) ds_I f(s)` (left) or `(1/2π)∫ f(s) ds_I K(s)` (right).
pub fn contour_integral<K>(side: Side, kernel: K, f: &SliceFunction, t: &OperatorTuple, contour: &Contour) -> Result<CalculusResult>
where
    K: Fn(&crate::algebra::Paravector) -> Result<DMatrix<f64>> + Sync,
{
    let rep = t.rep();
    let q = integrate(contour, |node| {
        let k = kernel(&node.s)?;
        let fs = f.evaluate(&node.s)?;
        let w = node.weight.to_mv();
        Ok(match side {
            Side::Left => k * rep.left_mult(&(&w * &fs)),
            Side::Right => rep.left_mult(&(&fs * &w)) * k,
        })
    })?;
    Ok(q.into())
}

/// Rejects contours that pass within their margin of a spectral sphere and
/// rational functions with poles inside or near the contour.
pub fn check_contour(spec: &FSpectrum, f: Option<&SliceFunction>, contour: &Contour) -> Result<()> {
    let min_clear = (contour.margin * (1.0 - 1e-9)).max(1e-9);
    for (i, e) in spec.spheres.iter().enumerate() {
        let clear = contour.clearance(&e.sphere);
        if clear < min_clear {
            return Err(Error::Contour(format!(
                "sphere {i} (s0={}, r={}) lies {clear:.3e} from the contour (margin {})",
                e.sphere.center, e.sphere.radius, contour.margin
            )));
        }
    }
    if let Some(f) = f {
        for z in f.poles() {
            let z = num_complex::Complex64::new(z.re, z.im.abs());
            let pole = crate::algebra::SpectralSphere::new(z.re, z.im);
            if contour.winding(z) != 0 || contour.clearance(&pole) < min_clear {
                return Err(Error::Contour(format!(
                    "pole {} ± {}i of the function is enclosed by or too close to the contour",
                    z.re, z.im
                )));
            }
        }
    }
    Ok(())
}

fn side_check(f: &SliceFunction, side: Side) -> Result<()> {
    if f.supports(side) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{}-sided function used with the {side} calculus",
            f.side()
        )))
    }
}

/// `f(T) = (1/2π)∫ S_{C,L}^{-1}(s,T) ds_I f(s)` or the right analogue.
pub fn sc_calculus(side: Side, f: &SliceFunction, t: &OperatorTuple, contour: &Contour) -> Result<CalculusResult> {
    side_check(f, side)?;
    f.algebra_check(t.algebra())?;
    check_contour(&f_spectrum(t), Some(f), contour)?;
    contour_integral(side, |s| Ok(t.resolvent(s)?.sc(side)), f, t, contour)
}

/// `f̆(T) = (1/2π)∫ F_n^L(s,T) ds_I f(s)` or the right analogue.
pub fn f_calculus(side: Side, f: &SliceFunction, t: &OperatorTuple, contour: &Contour) -> Result<CalculusResult> {
    side_check(f, side)?;
    f.algebra_check(t.algebra())?;
    crate::slice::gamma_constant(t.algebra().units())?;
    check_contour(&f_spectrum(t), Some(f), contour)?;
    contour_integral(side, |s| t.resolvent(s)?.f(side), f, t, contour)
}

pub fn apply_calculus(kind: CalculusKind, side: Side, f: &SliceFunction, t: &OperatorTuple, contour: &Contour) -> Result<CalculusResult> {
    match kind {
        CalculusKind::Sc => sc_calculus(side, f, t, contour),
        CalculusKind::F => f_calculus(side, f, t, contour),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    /// Number of (contour, plane) combinations evaluated.
    pub combinations: usize,
    /// Largest spectral-norm difference between any two results.
    pub max_difference: f64,
}

/// Evaluates the calculus on every contour in every plane and reports the
/// spread of the results.
pub fn independence_report(
    kind: CalculusKind,
    side: Side,
    f: &SliceFunction,
    t: &OperatorTuple,
    contours: &[Contour],
    planes: &[crate::algebra::ImaginaryUnit],
) -> Result<IndependenceReport> {
    let mut values = Vec::new();
    for c in contours {
        for p in planes {
            values.push(apply_calculus(kind, side, f, t, &c.with_plane(p.clone()))?.value);
        }
    }
    let mut max_difference: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            max_difference = max_difference.max(spectral_norm(&(&values[i] - &values[j])));
        }
    }
    Ok(IndependenceReport {
        combinations: values.len(),
        max_difference,
    })
}

/// Norms of `(1/2π)∫ ds_I s F_3^R(s,T)` and `(1/2π)∫ F_3^L(p,T) p dp_I`.
pub fn vanishing_integrals_check(t: &OperatorTuple, contour: &Contour) -> Result<(f64, f64)> {
    if t.algebra().units() != 3 {
        return Err(Error::Unsupported("the vanishing integrals are stated for n = 3".into()));
    }
    check_contour(&f_spectrum(t), None, contour)?;
    let rep = t.rep();
    let right = integrate(contour, |node| {
        let ws = &node.weight.to_mv() * &node.s.to_mv();
        Ok(rep.left_mult(&ws) * t.resolvent(&node.s)?.f(Side::Right)?)
    })?;
    let left = integrate(contour, |node| {
        let pw = &node.s.to_mv() * &node.weight.to_mv();
        Ok(t.resolvent(&node.s)?.f(Side::Left)? * rep.left_mult(&pw))
    })?;
    Ok((spectral_norm(&right.value), spectral_norm(&left.value)))
}
