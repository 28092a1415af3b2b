//! Riesz-type projectors built from the F-resolvent.
//!
//! For a contour around part of the F-spectrum,
//! `P̆ = γ_n^{-1} (1/2π)∫ F_n^L(s,T) ds_I s^{n-1}` and
//! `T̆ = γ_n^{-1} (1/2π)∫ F_n^L(s,T) ds_I s^n - (1/2π)∫ Q_s(T)^{(n-1)/2} ds_I s^{n-1}`.
//! Multiplying the left F-resolvent equation by `s^{n-1}` and integrating
//! shows `T P̆ = T̆`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::ImaginaryUnit;
use crate::calculus::{check_contour, contour_integral};
use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::relative_residual;
use crate::operator::OperatorTuple;
use crate::slice::{gamma_constant, Side, SliceFunction};
use crate::spectrum::{admissible_contour, f_spectrum, FSpectrum};

#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub p: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub subset: Vec<usize>,
    pub contour: Contour,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectorDiagnostics {
    /// `‖P̆² - P̆‖` (relative).
    pub idempotence: f64,
    /// `‖T P̆ - T̆‖`.
    pub left_intertwining: f64,
    /// `‖P̆ T - T̆‖`.
    pub right_intertwining: f64,
    /// `‖T P̆ - P̆ T‖`.
    pub commutator: f64,
}

/// `P̆` and `T̆` for a given contour.
pub fn projector_on_contour(t: &OperatorTuple, contour: &Contour) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = t.algebra().units();
    let gamma = gamma_constant(n)?;
    check_contour(&f_spectrum(t), None, contour)?;
    let f_left = |s: &crate::algebra::Paravector| t.resolvent(s)?.f(Side::Left);
    let p = contour_integral(Side::Left, f_left, &SliceFunction::monomial(n - 1), t, contour)?.value / gamma;
    let first = contour_integral(Side::Left, f_left, &SliceFunction::monomial(n), t, contour)?.value / gamma;
    let k = (n - 1) / 2;
    let q_part = contour_integral(
        Side::Left,
        |s| {
            let mut r = t.resolvent(s)?;
            Ok(if k == 0 { t.rep().identity() } else { r.q_power(k) })
        },
        &SliceFunction::monomial(n - 1),
        t,
        contour,
    )?
    .value;
    Ok((p, first - q_part))
}

/// Projector onto the spheres listed in `subset` (indices into `spec`).
pub fn riesz_projector(
    t: &OperatorTuple,
    spec: &FSpectrum,
    subset: &[usize],
    margin: f64,
    plane: &ImaginaryUnit,
    nodes: usize,
) -> Result<ProjectorPair> {
    let contour = admissible_contour(spec, subset, margin, plane, nodes)?;
    let (p, tt) = projector_on_contour(t, &contour)?;
    let mut subset = subset.to_vec();
    subset.sort();
    Ok(ProjectorPair {
        p,
        t: tt,
        subset,
        contour,
    })
}

pub fn diagnostics(t: &OperatorTuple, pair: &ProjectorPair) -> ProjectorDiagnostics {
    let e = t.encode();
    let ep = &e * &pair.p;
    let pe = &pair.p * &e;
    ProjectorDiagnostics {
        idempotence: relative_residual(&(&pair.p * &pair.p), &pair.p),
        left_intertwining: relative_residual(&ep, &pair.t),
        right_intertwining: relative_residual(&pe, &pair.t),
        commutator: relative_residual(&ep, &pe),
    }
}

/// `‖Σ_j P̆_j - I‖` for projectors over a partition of the spectrum.
pub fn completeness_residual(t: &OperatorTuple, pairs: &[ProjectorPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Precondition("no projectors given".into()));
    }
    let sum = pairs.iter().fold(t.rep().zeros(), |acc, p| acc + &p.p);
    Ok(relative_residual(&sum, &t.rep().identity()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::fixtures::{seeded, split_spectrum_tuple};
    use crate::spectrum::separated_groups;

    #[test]
    fn full_spectrum_projector_is_identity() {
        let alg = Algebra::clifford(3).unwrap();
        let (t, _) = split_spectrum_tuple(alg, 2, &mut seeded(5));
        let spec = f_spectrum(&t);
        let all: Vec<usize> = (0..spec.len()).collect();
        let pair = riesz_projector(&t, &spec, &all, 0.5, &ImaginaryUnit::basis(alg, 1), 128).unwrap();
        assert!(relative_residual(&pair.p, &t.rep().identity()) < 1e-10);
        assert!(relative_residual(&pair.t, &t.encode()) < 1e-10);
    }

    #[test]
    fn split_projectors_partition_identity() {
        let alg = Algebra::clifford(3).unwrap();
        let (t, _) = split_spectrum_tuple(alg, 4, &mut seeded(9));
        let spec = f_spectrum(&t);
        let groups = separated_groups(&spec, 1.0);
        assert_eq!(groups.len(), 2);
        let plane = ImaginaryUnit::basis(alg, 1);
        let pairs: Vec<ProjectorPair> = groups
            .iter()
            .map(|g| riesz_projector(&t, &spec, g, 0.5, &plane, 256).unwrap())
            .collect();
        for p in &pairs {
            let d = diagnostics(&t, p);
            assert!(d.idempotence < 1e-8, "{d:?}");
            assert!(d.left_intertwining < 1e-8 && d.right_intertwining < 1e-8, "{d:?}");
        }
        assert!(completeness_residual(&t, &pairs).unwrap() < 1e-8);
    }
}
