//! F-spectrum of a commuting tuple, a brute-force singular-value oracle for
//! it, and contours that enclose chosen parts of it.
//!
//! In a fixed plane `C_I` the pencil `s^2 - s(T + T̄) + T T̄` is the complex
//! quadratic `z^2 I - 2 z T_0 + B` with `B = T_0^2 + Σ T_j^2`, so its
//! eigenvalues are those of the real companion matrix `[[0, I], [-B, 2 T_0]]`.
//! Every eigenvalue `z` gives the sphere `(Re z, |Im z|)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{embed_in_plane, ImaginaryUnit, Paravector, SpectralSphere};
use crate::contour::{Circle, Contour};
use crate::error::{Error, Result};
use crate::linalg::min_singular_value;
use crate::operator::OperatorTuple;

/// Absolute tolerance for merging folded spheres.
pub const SPHERE_MERGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereEntry {
    pub sphere: SpectralSphere,
    /// Number of companion eigenvalues (both conjugates counted) on it.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FSpectrum {
    /// Sorted by center, then radius.
    pub spheres: Vec<SphereEntry>,
}

impl FSpectrum {
    pub fn spheres(&self) -> Vec<SpectralSphere> {
        self.spheres.iter().map(|e| e.sphere).collect()
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    /// Largest `sqrt(s_0^2 + r^2)` over all spheres.
    pub fn max_modulus(&self) -> f64 {
        self.spheres.iter().map(|e| e.sphere.modulus()).fold(0.0, f64::max)
    }
}

/// Companion matrix `[[0, I], [-B, A]]` with `A = 2 T_0`.
pub fn companion_matrix(t: &OperatorTuple) -> DMatrix<f64> {
    let d = t.d();
    let mut c = DMatrix::zeros(2 * d, 2 * d);
    c.view_mut((0, d), (d, d)).copy_from(&DMatrix::identity(d, d));
    c.view_mut((d, 0), (d, d)).copy_from(&(-t.sum_of_squares()));
    c.view_mut((d, d), (d, d)).copy_from(&(&t.components()[0] * 2.0));
    c
}

/// Groups eigenvalues closer than `tol` (single linkage) and replaces each
/// group by its mean. Defective double roots come out of the eigensolver
/// split by about `sqrt(eps)`; averaging restores them.
fn cluster_eigenvalues(mut eig: Vec<Complex64>, tol: f64) -> Vec<(Complex64, usize)> {
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eig[i] - eig[j]).norm() < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += eig[i];
                g.2 += 1;
            }
            None => groups.push((r, eig[i], 1)),
        }
    }
    groups.into_iter().map(|(_, sum, k)| (sum / k as f64, k)).collect()
}

/// The F-spectrum as a list of spheres.
pub fn f_spectrum(t: &OperatorTuple) -> FSpectrum {
    let c = companion_matrix(t);
    let scale = c.amax().max(1.0);
    let eig: Vec<Complex64> = c.complex_eigenvalues().iter().copied().collect();
    let clustered = cluster_eigenvalues(eig, 1e-6 * scale);
    let mut spheres: Vec<SphereEntry> = Vec::new();
    for (z, k) in clustered {
        let sphere = SpectralSphere::new(z.re, z.im.abs());
        match spheres.iter_mut().find(|e| {
            (e.sphere.center - sphere.center).abs() <= SPHERE_MERGE_TOL
                && (e.sphere.radius - sphere.radius).abs() <= SPHERE_MERGE_TOL
        }) {
            Some(e) => e.multiplicity += k,
            None => spheres.push(SphereEntry { sphere, multiplicity: k }),
        }
    }
    spheres.sort_by(|a, b| {
        a.sphere
            .center
            .total_cmp(&b.sphere.center)
            .then(a.sphere.radius.total_cmp(&b.sphere.radius))
    });
    FSpectrum { spheres }
}

/// Smallest singular value of the full pencil matrix at `s`.
pub fn pencil_min_sv(t: &OperatorTuple, s: &Paravector) -> f64 {
    min_singular_value(&t.pencil_matrix(s))
}

/// Rectangle `[u_min, u_max] × [v_min, v_max]` sampled at `nu × nv` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub nu: usize,
    pub nv: usize,
}

impl ScanGrid {
    /// Square grid covering the disc of radius `bound` (upper half plane and
    /// one row below the real axis).
    pub fn covering(bound: f64, per_side: usize) -> Self {
        let r = bound.max(0.5) * 1.05;
        let h = 2.0 * r / (per_side - 1) as f64;
        ScanGrid {
            u_min: -r,
            u_max: r,
            v_min: -h,
            v_max: r,
            nu: per_side,
            nv: ((r + h) / h).round() as usize + 1,
        }
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u_min + (self.u_max - self.u_min) * i as f64 / (self.nu - 1) as f64
    }

    pub fn v(&self, k: usize) -> f64 {
        self.v_min + (self.v_max - self.v_min) * k as f64 / (self.nv - 1) as f64
    }

    pub fn step(&self) -> f64 {
        ((self.u_max - self.u_min) / (self.nu - 1) as f64).max((self.v_max - self.v_min) / (self.nv - 1) as f64)
    }
}

/// Values of [`pencil_min_sv`] on a grid, row `k` holding `v(k)`.
#[derive(Debug, Clone, Serialize)]
pub struct ScanField {
    pub grid: ScanGrid,
    pub values: Vec<Vec<f64>>,
}

impl ScanField {
    /// Grid points whose value is no larger than any of their 8 neighbours.
    pub fn local_minima(&self) -> Vec<(usize, usize)> {
        let g = &self.grid;
        let mut out = Vec::new();
        for k in 0..g.nv {
            for i in 0..g.nu {
                let v = self.values[k][i];
                let mut is_min = true;
                for dk in -1i64..=1 {
                    for di in -1i64..=1 {
                        if dk == 0 && di == 0 {
                            continue;
                        }
                        let (kk, ii) = (k as i64 + dk, i as i64 + di);
                        if kk < 0 || ii < 0 || kk >= g.nv as i64 || ii >= g.nu as i64 {
                            continue;
                        }
                        if self.values[kk as usize][ii as usize] < v {
                            is_min = false;
                        }
                    }
                }
                if is_min {
                    out.push((k, i));
                }
            }
        }
        out
    }
}

pub fn min_sv_scan(t: &OperatorTuple, plane: &ImaginaryUnit, grid: ScanGrid) -> ScanField {
    let values = (0..grid.nv)
        .into_par_iter()
        .map(|k| {
            (0..grid.nu)
                .map(|i| pencil_min_sv(t, &embed_in_plane(grid.u(i), grid.v(k), plane)))
                .collect()
        })
        .collect();
    ScanField { grid, values }
}

/// A refined minimum of the singular-value field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleMinimum {
    pub u: f64,
    pub v: f64,
    pub sigma: f64,
}

/// Compass search from `(u, v)` down to step `1e-12`.
fn refine_minimum(t: &OperatorTuple, plane: &ImaginaryUnit, u: f64, v: f64, step: f64) -> OracleMinimum {
    let f = |u: f64, v: f64| pencil_min_sv(t, &embed_in_plane(u, v, plane));
    let (mut u, mut v, mut best) = (u, v, f(u, v));
    let mut h = step;
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let mut iters = 0;
    while h > 1e-12 && iters < 4000 {
        iters += 1;
        let mut moved = false;
        for (du, dv) in dirs {
            let val = f(u + h * du, v + h * dv);
            if val < best {
                best = val;
                u += h * du;
                v += h * dv;
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    OracleMinimum { u, v: v.abs(), sigma: best }
}

/// Spectrum traces found by scanning the pencil's smallest singular value in
/// `plane` and refining every grid minimum. Minima whose refined value stays
/// above `sigma_tol` are dropped.
pub fn oracle_spectrum(t: &OperatorTuple, plane: &ImaginaryUnit, per_side: usize, sigma_tol: f64) -> Vec<OracleMinimum> {
    let grid = ScanGrid::covering(t.norm_bound(), per_side);
    let field = min_sv_scan(t, plane, grid);
    let starts = field.local_minima();
    let refined: Vec<OracleMinimum> = starts
        .par_iter()
        .map(|&(k, i)| refine_minimum(t, plane, grid.u(i), grid.v(k), grid.step()))
        .collect();
    let mut out: Vec<OracleMinimum> = Vec::new();
    for m in refined {
        if m.sigma > sigma_tol {
            continue;
        }
        if !out.iter().any(|o| (o.u - m.u).hypot(o.v - m.v) < 1e-7) {
            out.push(m);
        }
    }
    out.sort_by(|a, b| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)));
    out
}

/// Agreement between the companion spectrum and the scan oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    /// Largest distance from a sphere trace `(s_0, r)` to its nearest oracle
    /// minimum, or from a minimum to its nearest trace.
    pub max_distance: f64,
    pub oracle_points: usize,
    pub tol: f64,
    pub agree: bool,
}

pub fn compare_with_oracle(spec: &FSpectrum, minima: &[OracleMinimum], tol: f64) -> OracleComparison {
    let traces: Vec<(f64, f64)> = spec.spheres.iter().map(|e| (e.sphere.center, e.sphere.radius)).collect();
    let nearest = |(u, v): (f64, f64), pts: &mut dyn Iterator<Item = (f64, f64)>| {
        pts.map(|(a, b)| (a - u).hypot(b - v)).fold(f64::INFINITY, f64::min)
    };
    let mut max_distance: f64 = 0.0;
    for &tr in &traces {
        max_distance = max_distance.max(nearest(tr, &mut minima.iter().map(|m| (m.u, m.v))));
    }
    for m in minima {
        max_distance = max_distance.max(nearest((m.u, m.v), &mut traces.iter().copied()));
    }
    if traces.is_empty() && minima.is_empty() {
        max_distance = 0.0;
    }
    OracleComparison {
        max_distance,
        oracle_points: minima.len(),
        tol,
        agree: max_distance <= tol,
    }
}

/// `max sqrt(s_0^2 + r^2) ≤ Σ_j ‖T_j‖`, returned as `(max modulus, bound)`.
pub fn compactness(t: &OperatorTuple, spec: &FSpectrum) -> (f64, f64) {
    (spec.max_modulus(), t.norm_bound())
}

/// Circles around chosen spheres.
///
/// Each selected sphere asks for a disc centered on the real axis that holds
/// both trace points `(s_0, ±r)` with room `margin`. Overlapping discs are
/// merged into one circle around the merged group. Unselected spheres must
/// lie outside every circle by at least `margin`.
pub fn admissible_contour(
    spec: &FSpectrum,
    subset: &[usize],
    margin: f64,
    plane: &ImaginaryUnit,
    nodes: usize,
) -> Result<Contour> {
    if subset.is_empty() {
        return Err(Error::Contour("no spheres selected".into()));
    }
    if !(margin > 0.0) {
        return Err(Error::Contour(format!("margin must be positive, got {margin}")));
    }
    let all = spec.spheres();
    if let Some(&bad) = subset.iter().find(|&&i| i >= all.len()) {
        return Err(Error::Contour(format!(
            "sphere index {bad} out of range (spectrum has {} spheres)",
            all.len()
        )));
    }
    let mut groups: Vec<Vec<SpectralSphere>> = subset.iter().map(|&i| vec![all[i]]).collect();
    let circle_of = |g: &[SpectralSphere]| -> Circle {
        let lo = g.iter().map(|s| s.center).fold(f64::INFINITY, f64::min);
        let hi = g.iter().map(|s| s.center).fold(f64::NEG_INFINITY, f64::max);
        let c = 0.5 * (lo + hi);
        let r = g
            .iter()
            .map(|s| (s.center - c).hypot(s.radius))
            .fold(0.0, f64::max);
        Circle::new(c, r + margin)
    };
    loop {
        let circles: Vec<Circle> = groups.iter().map(|g| circle_of(g)).collect();
        let mut merge = None;
        'outer: for a in 0..circles.len() {
            for b in a + 1..circles.len() {
                if (circles[a].center - circles[b].center).abs() < circles[a].radius + circles[b].radius {
                    merge = Some((a, b));
                    break 'outer;
                }
            }
        }
        match merge {
            Some((a, b)) => {
                let moved = groups.remove(b);
                groups[a].extend(moved);
            }
            None => break,
        }
    }
    let mut circles: Vec<Circle> = groups.iter().map(|g| circle_of(g)).collect();
    circles.sort_by(|a, b| a.center.total_cmp(&b.center));
    for (i, s) in all.iter().enumerate() {
        if subset.contains(&i) {
            continue;
        }
        for c in &circles {
            let dist = Complex64::new(s.center - c.center, s.radius).norm();
            if dist < c.radius + margin {
                return Err(Error::Contour(format!(
                    "unselected sphere {i} (s0={}, r={}) is within margin {margin} of the circle (c={}, rho={})",
                    s.center, s.radius, c.center, c.radius
                )));
            }
        }
    }
    let mut contour = Contour::new(plane.clone(), circles, nodes)?;
    contour.margin = margin;
    Ok(contour)
}

/// Contour around the whole spectrum.
pub fn full_contour(spec: &FSpectrum, margin: f64, plane: &ImaginaryUnit, nodes: usize) -> Result<Contour> {
    let all: Vec<usize> = (0..spec.len()).collect();
    admissible_contour(spec, &all, margin, plane, nodes)
}

/// Partitions the spheres into groups whose real-axis shadows
/// `[s_0 - r, s_0 + r]`, widened by `gap / 2` on each side, chain together.
/// Distinct groups can be enclosed by disjoint circles.
pub fn separated_groups(spec: &FSpectrum, gap: f64) -> Vec<Vec<usize>> {
    let s = spec.spheres();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| (s[a].center - s[a].radius).total_cmp(&(s[b].center - s[b].radius)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for i in order {
        let lo = s[i].center - s[i].radius - 0.5 * gap;
        let hi = s[i].center + s[i].radius + 0.5 * gap;
        match groups.last_mut() {
            Some(g) if lo < reach => g.push(i),
            _ => groups.push(vec![i]),
        }
        reach = reach.max(hi);
    }
    for g in &mut groups {
        g.sort();
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn alg3() -> Algebra {
        Algebra::clifford(3).unwrap()
    }

    fn tuple(comps: Vec<DMatrix<f64>>) -> OperatorTuple {
        OperatorTuple::new(alg3(), comps).unwrap()
    }

    #[test]
    fn diagonal_real_spectrum() {
        let mut comps = vec![DMatrix::zeros(2, 2); 4];
        comps[0] = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let spec = f_spectrum(&tuple(comps));
        let s = spec.spheres();
        assert_eq!(s.len(), 2);
        assert!((s[0].center - 1.0).abs() < 1e-12 && s[0].radius < 1e-7);
        assert!((s[1].center - 2.0).abs() < 1e-12 && s[1].radius < 1e-7);
    }

    #[test]
    fn rotation_generator_gives_two_real_points() {
        let mut comps = vec![DMatrix::zeros(2, 2); 4];
        comps[1] = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let spec = f_spectrum(&tuple(comps));
        let s = spec.spheres();
        assert_eq!(s.len(), 2);
        assert!((s[0].center + 1.0).abs() < 1e-12 && s[0].radius < 1e-12);
        assert!((s[1].center - 1.0).abs() < 1e-12 && s[1].radius < 1e-12);
    }

    #[test]
    fn scalar_tuple_single_sphere() {
        let mut comps = vec![DMatrix::zeros(1, 1); 4];
        comps[0][(0, 0)] = 0.5;
        comps[1][(0, 0)] = -1.5;
        let spec = f_spectrum(&tuple(comps));
        assert_eq!(spec.len(), 1);
        let s = spec.spheres[0];
        assert_eq!(s.multiplicity, 2);
        assert!((s.sphere.center - 0.5).abs() < 1e-14 && (s.sphere.radius - 1.5).abs() < 1e-14);
    }

    #[test]
    fn zero_tuple_scan_minimum_at_origin() {
        let t = tuple(vec![DMatrix::zeros(1, 1); 4]);
        let plane = ImaginaryUnit::basis(alg3(), 1);
        let mins = oracle_spectrum(&t, &plane, 21, 1e-6);
        assert_eq!(mins.len(), 1);
        assert!(mins[0].u.abs() < 1e-6 && mins[0].v < 1e-6);
    }

    #[test]
    fn contour_examples() {
        let plane = ImaginaryUnit::basis(alg3(), 1);
        let one = FSpectrum {
            spheres: vec![SphereEntry { sphere: SpectralSphere::new(1.0, 2.0), multiplicity: 2 }],
        };
        let c = full_contour(&one, 0.5, &plane, 64).unwrap();
        assert_eq!(c.circles.len(), 1);
        assert!((c.circles[0].center - 1.0).abs() < 1e-15 && (c.circles[0].radius - 2.5).abs() < 1e-15);

        let two = FSpectrum {
            spheres: vec![
                SphereEntry { sphere: SpectralSphere::new(1.0, 0.0), multiplicity: 2 },
                SphereEntry { sphere: SpectralSphere::new(5.0, 0.0), multiplicity: 2 },
            ],
        };
        let c = admissible_contour(&two, &[0], 1.0, &plane, 64).unwrap();
        assert_eq!((c.circles[0].center, c.circles[0].radius), (1.0, 1.0));
        assert!(matches!(admissible_contour(&two, &[0], 2.5, &plane, 64), Err(Error::Contour(_))));
        let both = full_contour(&two, 1.0, &plane, 64).unwrap();
        assert_eq!(both.circles.len(), 2);
        let merged = full_contour(&two, 2.5, &plane, 64).unwrap();
        assert_eq!(merged.circles.len(), 1);
        assert!((merged.circles[0].center - 3.0).abs() < 1e-15);
    }
}
