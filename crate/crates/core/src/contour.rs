//! Circular contours in a complex plane `C_I` and trapezoidal quadrature on
//! them.
//!
//! A circle `s(θ) = c + ρ e^{Iσθ}`, `θ ∈ [0, 2π)`, carries the measure
//! `ds_I = ds / I = σρ e^{Iσθ} dθ`. The quadrature node `k` of `N` therefore
//! gets the paravector weight `w_k = σρ e^{Iσθ_k} / N`, already divided by 2π,
//! so that `(1/2π)∫ g(s) ds_I h(s) ≈ Σ_k g(s_k) w_k h(s_k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{embed_in_plane, ImaginaryUnit, Multivector, Paravector, SpectralSphere};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// Circle centered on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: f64,
    pub radius: f64,
    pub orientation: Orientation,
}

impl Circle {
    pub fn new(center: f64, radius: f64) -> Self {
        Circle {
            center,
            radius,
            orientation: Orientation::Positive,
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Distance from `z` to the circle itself.
    fn distance(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// One quadrature node.
#[derive(Debug, Clone)]
pub struct Node {
    pub s: Paravector,
    /// `ds_I / (2π)` for this node, a paravector in the contour plane.
    pub weight: Paravector,
    pub circle: usize,
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct Contour {
    pub plane: ImaginaryUnit,
    pub circles: Vec<Circle>,
    pub nodes_per_circle: usize,
    /// Clearance the contour was built with; informational.
    pub margin: f64,
}

impl Contour {
    pub fn new(plane: ImaginaryUnit, circles: Vec<Circle>, nodes_per_circle: usize) -> Result<Self> {
        if circles.is_empty() {
            return Err(Error::Contour("contour has no circles".into()));
        }
        if let Some(c) = circles.iter().find(|c| !(c.radius > 0.0 && c.radius.is_finite() && c.center.is_finite())) {
            return Err(Error::Contour(format!("invalid circle (center {}, radius {})", c.center, c.radius)));
        }
        if nodes_per_circle < 4 || nodes_per_circle % 2 != 0 {
            return Err(Error::Contour(format!(
                "nodes per circle must be even and at least 4, got {nodes_per_circle}"
            )));
        }
        Ok(Contour {
            plane,
            circles,
            nodes_per_circle,
            margin: 0.0,
        })
    }

    pub fn circle(plane: ImaginaryUnit, center: f64, radius: f64, nodes: usize) -> Result<Self> {
        Self::new(plane, vec![Circle::new(center, radius)], nodes)
    }

    pub fn with_plane(&self, plane: ImaginaryUnit) -> Self {
        Contour {
            plane,
            ..self.clone()
        }
    }

    pub fn with_nodes(&self, nodes_per_circle: usize) -> Result<Self> {
        let mut c = Self::new(self.plane.clone(), self.circles.clone(), nodes_per_circle)?;
        c.margin = self.margin;
        Ok(c)
    }

    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        for circle in &mut c.circles {
            circle.orientation = circle.orientation.flipped();
        }
        c
    }

    pub fn nodes(&self) -> Vec<Node> {
        let n = self.nodes_per_circle;
        let mut out = Vec::with_capacity(n * self.circles.len());
        for (ci, circle) in self.circles.iter().enumerate() {
            let sigma = circle.orientation.sign();
            for k in 0..n {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                let (sin, cos) = theta.sin_cos();
                let s = embed_in_plane(
                    circle.center + circle.radius * cos,
                    circle.radius * sigma * sin,
                    &self.plane,
                );
                let scale = sigma * circle.radius / n as f64;
                let weight = embed_in_plane(scale * cos, scale * sigma * sin, &self.plane);
                out.push(Node {
                    s,
                    weight,
                    circle: ci,
                    index: k,
                });
            }
        }
        out
    }

    /// Winding number of the contour around the plane point `z`.
    pub fn winding(&self, z: Complex64) -> i32 {
        self.circles
            .iter()
            .filter(|c| c.contains(z))
            .map(|c| c.orientation.sign() as i32)
            .sum()
    }

    /// Winding number around the trace of `sphere` in the contour plane.
    pub fn sphere_winding(&self, sphere: &SpectralSphere) -> i32 {
        self.winding(Complex64::new(sphere.center, sphere.radius))
    }

    /// Winding number around the trace of an arbitrary paravector.
    pub fn point_winding(&self, x: &Paravector) -> i32 {
        self.winding(x.as_complex())
    }

    /// Smallest plane distance between the sphere's trace and any circle.
    pub fn clearance(&self, sphere: &SpectralSphere) -> f64 {
        let z = Complex64::new(sphere.center, sphere.radius);
        self.circles
            .iter()
            .map(|c| c.distance(z))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Values that can be summed by the quadrature engine.
pub trait Accumulate: Clone + Send + Sync {
    fn add_scaled(&mut self, other: &Self, k: f64);
    fn zeroed(&self) -> Self;
    fn magnitude(&self) -> f64;
}

impl Accumulate for Multivector {
    fn add_scaled(&mut self, other: &Self, k: f64) {
        *self += &other.scale(k);
    }
    fn zeroed(&self) -> Self {
        Multivector::zero(self.algebra())
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Accumulate for DMatrix<f64> {
    fn add_scaled(&mut self, other: &Self, k: f64) {
        *self += other * k;
    }
    fn zeroed(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn magnitude(&self) -> f64 {
        crate::linalg::spectral_norm(self)
    }
}

/// Result of a contour quadrature.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    pub value: T,
    /// Contribution of each circle.
    pub per_circle: Vec<T>,
    /// Same rule using only every second node.
    pub coarse: T,
    pub nodes: usize,
}

impl<T: Accumulate> Quadrature<T> {
    /// Size of the change between the half-node and full rule.
    pub fn error_estimate(&self) -> f64 {
        let mut d = self.value.clone();
        d.add_scaled(&self.coarse, -1.0);
        d.magnitude()
    }
}

/// Sums `term(node)` over all nodes. Terms are evaluated in parallel and
/// reduced sequentially in node order, so the result does not depend on
/// thread scheduling.
pub fn integrate<T, F>(contour: &Contour, term: F) -> Result<Quadrature<T>>
where
    T: Accumulate,
    F: Fn(&Node) -> Result<T> + Sync,
{
    let nodes = contour.nodes();
    let terms: Vec<T> = nodes.par_iter().map(&term).collect::<Result<Vec<T>>>()?;
    let zero = terms[0].zeroed();
    let mut value = zero.clone();
    let mut coarse = zero.clone();
    let mut per_circle = vec![zero; contour.circles.len()];
    for (node, t) in nodes.iter().zip(&terms) {
        per_circle[node.circle].add_scaled(t, 1.0);
        if node.index % 2 == 0 {
            coarse.add_scaled(t, 2.0);
        }
    }
    for c in &per_circle {
        value.add_scaled(c, 1.0);
    }
    Ok(Quadrature {
        value,
        per_circle,
        coarse,
        nodes: nodes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn e1(n: usize) -> ImaginaryUnit {
        ImaginaryUnit::basis(Algebra::clifford(n).unwrap(), 1)
    }

    #[test]
    fn weights_sum_to_zero_and_integrate_inverse() {
        let alg = Algebra::clifford(3).unwrap();
        let c = Contour::circle(e1(3), 0.5, 2.0, 64).unwrap();
        // (1/2π)∫ ds_I (s - 0.5)^{-1} = 1: ds/(I(s-c)) integrates to 2π.
        let q = integrate(&c, |node| {
            let z = node.s.add_real(-0.5).inverse()?;
            Ok(&node.weight.to_mv() * &z.to_mv())
        })
        .unwrap();
        assert!(q.value.is_close(&Multivector::one(alg), 1e-13));
        let q0 = integrate(&c, |node| Ok(node.weight.to_mv())).unwrap();
        assert!(q0.value.norm() < 1e-14);
    }

    #[test]
    fn reversed_orientation_negates() {
        let c = Contour::circle(e1(3), 0.0, 1.0, 32).unwrap();
        let f = |node: &Node| Ok(&node.weight.to_mv() * &node.s.inverse()?.to_mv());
        let a = integrate(&c, f).unwrap().value;
        let b = integrate(&c.reversed(), f).unwrap().value;
        assert!((&a + &b).norm() < 1e-14);
    }

    #[test]
    fn winding_and_clearance() {
        let c = Contour::new(e1(3), vec![Circle::new(-2.0, 1.0), Circle::new(2.0, 1.0)], 16).unwrap();
        assert_eq!(c.sphere_winding(&SpectralSphere::new(-2.0, 0.5)), 1);
        assert_eq!(c.sphere_winding(&SpectralSphere::new(0.0, 0.0)), 0);
        assert!((c.clearance(&SpectralSphere::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!(Contour::circle(e1(3), 0.0, 1.0, 7).is_err());
        assert!(Contour::circle(e1(3), 0.0, -1.0, 8).is_err());
    }
}
