//! Resolvent identities as matrix residuals, and the verification battery
//! that samples them.
//!
//! Every residual is `‖LHS - RHS‖₂ / max(1, ‖LHS‖₂, ‖RHS‖₂)` in the
//! `2^n d` representation. Scalars such as `(p^2 - 2 s_0 p + |s|^2)^{-1}`
//! act by left multiplication.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{sphere_of, Algebra, ImaginaryUnit, Multivector, Paravector, SpectralSphere};
use crate::calculus::{f_calculus, independence_report, sc_calculus, vanishing_integrals_check, CalculusKind};
use crate::contour::{integrate, Contour};
use crate::error::{Error, Result};
use crate::exact::{binom_identity_check, residue_gamma_check};
use crate::fixtures::{random_commuting_tuple, random_in_ball, random_resolvent_point, random_unit, seeded, split_fixture_family, split_spectrum_tuple};
use crate::linalg::{relative_residual, spectral_norm};
use crate::operator::{ModuleRep, OperatorTuple};
use crate::projectors::{completeness_residual, diagnostics, riesz_projector, ProjectorPair};
use crate::slice::{fueter_sce_pointwise, gamma_constant, pencil_form_ii, Side, SliceFunction};
use crate::spectrum::{admissible_contour, f_spectrum, full_contour, separated_groups};

/// Tolerance used for `p ∉ [s]`.
pub const SAME_SPHERE_TOL: f64 = 1e-8;

fn gamma_q(t: &OperatorTuple, r: &mut crate::operator::Resolvent<'_>) -> Result<DMatrix<f64>> {
    let n = t.algebra().units();
    let k = (n - 1) / 2;
    let g = gamma_constant(n)?;
    Ok(if k == 0 { t.rep().identity() * g } else { r.q_power(k) * g })
}

/// `F^L(s,T) s - T F^L(s,T) = γ_n Q_s(T)^{(n-1)/2}`.
pub fn residual_frel(t: &OperatorTuple, s: &Paravector) -> Result<f64> {
    let mut r = t.resolvent(s)?;
    let f = r.f(Side::Left)?;
    let lhs = &f * t.rep().left_mult_pv(s) - t.encode() * &f;
    Ok(relative_residual(&lhs, &gamma_q(t, &mut r)?))
}

/// `s F^R(s,T) - F^R(s,T) T = γ_n Q_s(T)^{(n-1)/2}`.
pub fn residual_frer(t: &OperatorTuple, s: &Paravector) -> Result<f64> {
    let mut r = t.resolvent(s)?;
    let f = r.f(Side::Right)?;
    let lhs = t.rep().left_mult_pv(s) * &f - &f * t.encode();
    Ok(relative_residual(&lhs, &gamma_q(t, &mut r)?))
}

/// `T^m F^L = F^L s^m - M^L_m` (left) or `F^R T^m = s^m F^R - M^R_m` (right).
pub fn residual_generalized(t: &OperatorTuple, s: &Paravector, m: usize, side: Side) -> Result<f64> {
    let mut r = t.resolvent(s)?;
    let f = r.f(side)?;
    let msum = r.m_sum(side, m)?;
    let e = t.encode();
    let mut em = t.rep().identity();
    for _ in 0..m {
        em = &em * &e;
    }
    let lsm = t.rep().left_mult_pv(&s.powi(m as i32));
    Ok(match side {
        Side::Left => relative_residual(&(&em * &f), &(&f * &lsm - &msum)),
        Side::Right => relative_residual(&(&f * &em), &(&lsm * &f - &msum)),
    })
}

/// `S_{C,L}^{-1} s - T S_{C,L}^{-1} = I` or `s S_{C,R}^{-1} - S_{C,R}^{-1} T = I`.
pub fn residual_sc_equation(t: &OperatorTuple, s: &Paravector, side: Side) -> Result<f64> {
    let sc = t.resolvent(s)?.sc(side);
    let ls = t.rep().left_mult_pv(s);
    let e = t.encode();
    let lhs = match side {
        Side::Left => &sc * &ls - &e * &sc,
        Side::Right => &ls * &sc - &sc * &e,
    };
    Ok(relative_residual(&lhs, &t.rep().identity()))
}

fn check_pair(s: &Paravector, p: &Paravector) -> Result<()> {
    if sphere_of(s).distance_to(p) <= SAME_SPHERE_TOL {
        return Err(Error::Precondition(format!("p={p} lies on the sphere of s={s}")));
    }
    Ok(())
}

/// `[X p - s̄ X] (p^2 - 2 s_0 p + |s|^2)^{-1}`.
fn form_i_rhs(rep: &ModuleRep, x: &DMatrix<f64>, s: &Paravector, p: &Paravector) -> Result<DMatrix<f64>> {
    let scalar = pencil_form_ii(p, s).inverse()?;
    Ok((x * rep.left_mult_pv(p) - rep.left_mult_pv(&s.conj()) * x) * rep.left_mult_pv(&scalar))
}

/// `(s^2 - 2 p_0 s + |p|^2)^{-1} [X p̄ - s X]`.
fn form_ii_rhs(rep: &ModuleRep, x: &DMatrix<f64>, s: &Paravector, p: &Paravector) -> Result<DMatrix<f64>> {
    let scalar = pencil_form_ii(s, p).inverse()?;
    Ok(rep.left_mult_pv(&scalar) * (x * rep.left_mult_pv(&p.conj()) - rep.left_mult_pv(s) * x))
}

/// SC-resolvent equation, `S_{C,R}^{-1}(s,T) S_{C,L}^{-1}(p,T)` expressed in
/// form I (`form_ii = false`) or form II.
pub fn residual_sc_resolvent_equation(t: &OperatorTuple, s: &Paravector, p: &Paravector, form_ii: bool) -> Result<f64> {
    check_pair(s, p)?;
    let a = t.resolvent(s)?.sc(Side::Right);
    let b = t.resolvent(p)?.sc(Side::Left);
    let lhs = &a * &b;
    let x = &a - &b;
    let rhs = if form_ii {
        form_ii_rhs(&t.rep(), &x, s, p)?
    } else {
        form_i_rhs(&t.rep(), &x, s, p)?
    };
    Ok(relative_residual(&lhs, &rhs))
}

/// Pseudo F-resolvent equation for `F^R(s,T) F^L(p,T)`. Form I uses the
/// `γ_n Q^{(n-1)/2}` terms, form II replaces them by the resolvent
/// expressions they equal.
pub fn residual_pseudo(t: &OperatorTuple, s: &Paravector, p: &Paravector, form_ii: bool) -> Result<f64> {
    check_pair(s, p)?;
    let rep = t.rep();
    let mut rs = t.resolvent(s)?;
    let mut rp = t.resolvent(p)?;
    let a = rs.f(Side::Right)?;
    let b = rp.f(Side::Left)?;
    let e = t.encode();
    let (gqp, gqs) = if form_ii {
        (&b * rep.left_mult_pv(p) - &e * &b, rep.left_mult_pv(s) * &a - &a * &e)
    } else {
        (gamma_q(t, &mut rp)?, gamma_q(t, &mut rs)?)
    };
    let x = &a * gqp - gqs * &b;
    Ok(relative_residual(&(&a * &b), &form_i_rhs(&rep, &x, s, p)?))
}

/// F-resolvent equation for `n = 3`:
/// `F^R(s)S_L(p) + S_R(s)F^L(p) + C = [(F^R(s) - F^L(p)) p - s̄ (F^R(s) - F^L(p))](p^2 - 2s_0p + |s|^2)^{-1}`
/// with `C = γ_3 Q_s Q_p` (`expanded = false`) or
/// `C = γ_3^{-1}(s F^R F^L p - s F^R T F^L - F^R T F^L p + F^R T^2 F^L)`.
pub fn residual_n3(t: &OperatorTuple, s: &Paravector, p: &Paravector, expanded: bool) -> Result<f64> {
    if t.algebra().units() != 3 {
        return Err(Error::Unsupported("this resolvent equation is stated for n = 3".into()));
    }
    check_pair(s, p)?;
    let rep = t.rep();
    let gamma = gamma_constant(3)?;
    let mut rs = t.resolvent(s)?;
    let mut rp = t.resolvent(p)?;
    let fr = rs.f(Side::Right)?;
    let fl = rp.f(Side::Left)?;
    let sr = rs.sc(Side::Right);
    let sl = rp.sc(Side::Left);
    let correction = if expanded {
        let e = t.encode();
        let ls = rep.left_mult_pv(s);
        let lp = rep.left_mult_pv(p);
        (&ls * &fr * &fl * &lp - &ls * &fr * &e * &fl - &fr * &e * &fl * &lp + &fr * &e * &e * &fl) / gamma
    } else {
        rs.q_power(1) * rp.q_power(1) * gamma
    };
    let lhs = &fr * &sl + &sr * &fl + correction;
    let rhs = form_i_rhs(&rep, &(&fr - &fl), s, p)?;
    Ok(relative_residual(&lhs, &rhs))
}

/// Random element `Σ_A L_{e_A} lift(M_A)` of the operators on `V_n`.
pub fn random_module_operator<R: Rng>(rep: &ModuleRep, rng: &mut R) -> DMatrix<f64> {
    let mut out = rep.zeros();
    for blade in 0..rep.alg.dim() {
        let m = DMatrix::from_fn(rep.d, rep.d, |_, _| rng.random_range(-1.0..=1.0));
        out += rep.left_mult_lift(&Multivector::basis(rep.alg, blade), &m);
    }
    out
}

/// `(1/2π)∫ f(s) ds_I (s̄B - Bp)(p^2 - 2s_0p + |s|^2)^{-1} = B f(p)` for
/// intrinsic `f` and `p` enclosed by the contour.
pub fn residual_lemma_bf(rep: &ModuleRep, b: &DMatrix<f64>, f: &SliceFunction, p: &Paravector, contour: &Contour) -> Result<f64> {
    if !f.is_intrinsic() {
        return Err(Error::Precondition("this identity needs an intrinsic function".into()));
    }
    let lp = rep.left_mult_pv(p);
    let q = integrate(contour, |node| {
        let s = &node.s;
        let fw = &f.evaluate(s)? * &node.weight.to_mv();
        let scalar = pencil_form_ii(p, s).inverse()?;
        Ok(rep.left_mult(&fw) * (rep.left_mult_pv(&s.conj()) * b - b * &lp) * rep.left_mult_pv(&scalar))
    })?;
    let rhs = b * rep.left_mult(&f.evaluate(p)?);
    Ok(relative_residual(&q.value, &rhs))
}

/// `P̆ F^L(λ) λ - T̆ F^L(λ) = P̆ γ_n Q_λ^{(n-1)/2}` and
/// `λ F^R(λ) P̆ - F^R(λ) T̆ = γ_n Q_λ^{(n-1)/2} P̆`; returns the larger residual.
pub fn residual_substituted(t: &OperatorTuple, pair: &ProjectorPair, lambda: &Paravector) -> Result<f64> {
    let mut r = t.resolvent(lambda)?;
    let fl = r.f(Side::Left)?;
    let fr = r.f(Side::Right)?;
    let gq = gamma_q(t, &mut r)?;
    let ll = t.rep().left_mult_pv(lambda);
    let left = relative_residual(&(&pair.p * &fl * &ll - &pair.t * &fl), &(&pair.p * &gq));
    let right = relative_residual(&(&ll * &fr * &pair.p - &fr * &pair.t), &(&gq * &pair.p));
    Ok(left.max(right))
}

/// `|(1/2π)∫ F_n^L(s,x) ds_I s^{n-1} - γ_n|` at `x` inside the contour.
pub fn lemma_gamma_check(x: &Paravector, contour: &Contour) -> Result<f64> {
    let n = x.algebra().units();
    let gamma = gamma_constant(n)?;
    let v = fueter_sce_pointwise(Side::Left, &SliceFunction::monomial(n - 1), x, contour)?;
    Ok((&v - &Multivector::scalar(x.algebra(), gamma)).norm())
}

/// What a catalog entry checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Check {
    Frel,
    Frer,
    Gfrel,
    Gfrer,
    Pseudo,
    PseudoII,
    ScLeft,
    ScRight,
    ScRes,
    ScResII,
    N3,
    N3Lemma,
    Lemma321,
    Subs,
    Proj,
    ProjSum,
    Intertwine,
    Vanish,
    FCalc,
    ScCalc,
    Gamma,
    Binom,
    ProjN5,
}

/// Algebras an entry is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// `R_3`, and `R_5` where the statement holds for all odd `n`.
    Clifford,
    Quaternion,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: String,
    pub check: Check,
    pub backend: Backend,
    pub statement: &'static str,
    pub tolerance: f64,
    /// Exploratory entries are reported but never fail the battery.
    pub asserted: bool,
}

/// Tolerance for identities evaluated pointwise.
pub const DIRECT_TOL: f64 = 1e-10;
/// Tolerance for identities involving contour integrals.
pub const INTEGRATED_TOL: f64 = 1e-6;

fn describe(check: Check) -> (&'static str, f64, bool) {
    match check {
        Check::Frel => ("F^L(s,T)s - T F^L(s,T) = γ_n Q_s(T)^{(n-1)/2}", DIRECT_TOL, true),
        Check::Frer => ("s F^R(s,T) - F^R(s,T)T = γ_n Q_s(T)^{(n-1)/2}", DIRECT_TOL, true),
        Check::Gfrel => ("T^m F^L(s,T) = F^L(s,T)s^m - M^L_m(s,T), m = 1..5", DIRECT_TOL, true),
        Check::Gfrer => ("F^R(s,T)T^m = s^m F^R(s,T) - M^R_m(s,T), m = 1..5", DIRECT_TOL, true),
        Check::Pseudo => ("pseudo F-resolvent equation for F^R(s,T)F^L(p,T)", DIRECT_TOL, true),
        Check::PseudoII => ("pseudo F-resolvent equation with the Q-terms written through F-resolvents", DIRECT_TOL, true),
        Check::ScLeft => ("S_L^{-1}(s,T)s - T S_L^{-1}(s,T) = I", DIRECT_TOL, true),
        Check::ScRight => ("s S_R^{-1}(s,T) - S_R^{-1}(s,T)T = I", DIRECT_TOL, true),
        Check::ScRes => ("SC-resolvent equation, factor (p^2 - 2s_0p + |s|^2)^{-1} on the right", DIRECT_TOL, true),
        Check::ScResII => ("SC-resolvent equation, factor (s^2 - 2p_0s + |p|^2)^{-1} on the left", DIRECT_TOL, true),
        Check::N3 => ("n = 3 F-resolvent equation, product term written through F-resolvents", DIRECT_TOL, true),
        Check::N3Lemma => ("n = 3 F-resolvent equation with the γ_3 Q_s Q_p term", DIRECT_TOL, true),
        Check::Lemma321 => ("(1/2π)∫ f(s) ds_I (s̄B - Bp)(p^2 - 2s_0p + |s|^2)^{-1} = B f(p)", INTEGRATED_TOL, true),
        Check::Subs => ("P̆F^L(λ)λ - T̆F^L(λ) = P̆ γ_n Q_λ^{(n-1)/2} and its right analogue", INTEGRATED_TOL, true),
        Check::Proj => ("P̆^2 = P̆ for a separated part of the spectrum", 1e-6, true),
        Check::ProjSum => ("projectors over a partition of the spectrum sum to I", 1e-6, true),
        Check::Intertwine => ("T P̆ = P̆ T = T̆", 1e-8, true),
        Check::Vanish => ("(1/2π)∫ ds_I s F^R(s,T) = 0 and (1/2π)∫ F^L(p,T) p dp_I = 0", 1e-8, true),
        Check::FCalc => ("F-calculus: s^2 ↦ γ_3 I, s ↦ 0, independent of contour and plane", 1e-8, true),
        Check::ScCalc => ("SC-calculus: s^m ↦ T^m, left = right for intrinsic f, independence", 1e-8, true),
        Check::Gamma => ("(1/2π)∫ F_n^L(s,x) ds_I s^{n-1} = γ_n; residue sums reproduce γ_n exactly", 1e-6, true),
        Check::Binom => ("Σ_k (-1)^k C(m+k-1,k) C(m+j,m+k) = 1 and its recurrence, exact", 0.0, true),
        Check::ProjN5 => ("P̆^2 - P̆ for n = 5 (exploratory)", 1e-6, false),
    }
}

/// The full catalog: Clifford entries followed by their quaternion mirrors.
pub fn catalog() -> Vec<CatalogEntry> {
    let clifford = [
        ("FREL", Check::Frel),
        ("FRER", Check::Frer),
        ("GFREL", Check::Gfrel),
        ("GFRER", Check::Gfrer),
        ("PSEUDO", Check::Pseudo),
        ("PSEUDO-II", Check::PseudoII),
        ("SCLEFT", Check::ScLeft),
        ("SCRIGHT", Check::ScRight),
        ("SCRES", Check::ScRes),
        ("SCRES-II", Check::ScResII),
        ("N3", Check::N3),
        ("N3-LEMMA", Check::N3Lemma),
        ("LEMMA321", Check::Lemma321),
        ("SUBS", Check::Subs),
        ("PROJ", Check::Proj),
        ("PROJ-SUM", Check::ProjSum),
        ("INTERTWINE", Check::Intertwine),
        ("VANISH", Check::Vanish),
        ("FCALC", Check::FCalc),
        ("SCCALC", Check::ScCalc),
        ("GAMMA", Check::Gamma),
        ("BINOM", Check::Binom),
        ("PROJ-N5", Check::ProjN5),
    ];
    let quaternion = [
        ("QUAT-FREL", Check::Frel),
        ("QUAT-FRER", Check::Frer),
        ("QUAT-GFREL", Check::Gfrel),
        ("QUAT-GFRER", Check::Gfrer),
        ("QUAT-PSEUDO", Check::Pseudo),
        ("QUAT-PSEUDO-II", Check::PseudoII),
        ("QUAT-SCLEFT", Check::ScLeft),
        ("QUAT-SCRIGHT", Check::ScRight),
        ("QUAT-SCRES", Check::ScRes),
        ("QUAT-SCRES-II", Check::ScResII),
        ("QUAT-N3", Check::N3),
        ("QUAT-N3-LEMMA", Check::N3Lemma),
        ("QUAT-LEMMA321", Check::Lemma321),
        ("QUAT-SUBS", Check::Subs),
        ("QUAT-PROJ", Check::Proj),
        ("QUAT-PROJ-SUM", Check::ProjSum),
        ("QUAT-INTERTWINE", Check::Intertwine),
        ("QUAT-VANISH", Check::Vanish),
        ("QUAT-FCALC", Check::FCalc),
    ];
    let mk = |(id, check): (&str, Check), backend| {
        let (statement, tolerance, asserted) = describe(check);
        CatalogEntry {
            id: id.to_string(),
            check,
            backend,
            statement,
            tolerance,
            asserted,
        }
    };
    clifford
        .into_iter()
        .map(|e| mk(e, Backend::Clifford))
        .chain(quaternion.into_iter().map(|e| mk(e, Backend::Quaternion)))
        .collect()
}

/// Settings of a battery run.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Random points per pointwise identity.
    pub samples: usize,
    pub nodes: usize,
    pub margin: f64,
    /// Largest `m` (and `j`) for the exact binomial check.
    pub m_max: i64,
    /// Clifford dimensions to evaluate (subset of 3 and 5).
    pub clifford_dims: Vec<usize>,
    /// Record wall-clock time per entry.
    pub timings: bool,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            seed: 0,
            samples: 50,
            nodes: 256,
            margin: 0.5,
            m_max: 12,
            clifford_dims: vec![3, 5],
            timings: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityOutcome {
    pub id: String,
    pub statement: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub asserted: bool,
    pub samples: usize,
    /// Failure message when the check could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// FNV-1a, used to derive a per-entry seed from its id.
fn id_hash(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn algebras(backend: Backend, clifford_dims: &[usize]) -> Vec<Algebra> {
    match backend {
        Backend::Quaternion => vec![Algebra::Quaternion],
        Backend::Clifford => clifford_dims.iter().map(|&n| Algebra::Clifford { n }).collect(),
    }
}

/// Sizes of the random tuples used for pointwise identities.
fn fixture_sizes(alg: Algebra) -> &'static [usize] {
    if alg.units() >= 5 {
        &[2, 3]
    } else {
        &[2, 4, 6]
    }
}

/// Evaluates `residual` at `samples` random points (and pairs of points),
/// spread over a few random tuples for each algebra.
fn sample_pointwise<F>(algs: &[Algebra], cfg: &BatteryConfig, seed: u64, pairs: bool, residual: F) -> Result<(f64, usize)>
where
    F: Fn(&OperatorTuple, &Paravector, &Paravector) -> Result<f64>,
{
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let sizes = fixture_sizes(alg);
        let tuples: Vec<OperatorTuple> = sizes.iter().map(|&d| random_commuting_tuple(alg, d, &mut rng)).collect();
        let spheres: Vec<Vec<SpectralSphere>> = tuples.iter().map(|t| f_spectrum(t).spheres()).collect();
        for k in 0..cfg.samples {
            let i = k % tuples.len();
            let t = &tuples[i];
            let bound = t.norm_bound();
            let s = random_resolvent_point(alg, &mut rng, &spheres[i], bound, 0.1);
            let p = loop {
                let p = random_resolvent_point(alg, &mut rng, &spheres[i], bound, 0.1);
                if !pairs || sphere_of(&s).distance_to(&p) > 0.1 {
                    break p;
                }
            };
            worst = worst.max(residual(t, &s, &p)?);
            count += 1;
        }
    }
    Ok((worst, count))
}

fn split_family(alg: Algebra, seed: u64) -> Vec<OperatorTuple> {
    if alg.units() < 5 {
        return split_fixture_family(alg, seed);
    }
    let mut rng = seeded(seed);
    (0..2).map(|_| split_spectrum_tuple(alg, 2, &mut rng).0).collect()
}

/// Projector pairs for each group of the split fixtures.
fn split_projectors(t: &OperatorTuple, cfg: &BatteryConfig, plane: &ImaginaryUnit) -> Result<Vec<ProjectorPair>> {
    let spec = f_spectrum(t);
    let groups = separated_groups(&spec, 2.0 * cfg.margin);
    if groups.len() < 2 {
        return Err(Error::Precondition("split fixture did not separate".into()));
    }
    groups
        .iter()
        .map(|g| riesz_projector(t, &spec, g, cfg.margin, plane, cfg.nodes))
        .collect()
}

fn run_check(entry: &CatalogEntry, cfg: &BatteryConfig) -> Result<(f64, usize)> {
    let seed = cfg.seed ^ id_hash(&entry.id);
    let algs = algebras(entry.backend, &entry_dims(entry, cfg));
    if algs.is_empty() && entry.check != Check::Binom {
        return Err(Error::Precondition(format!("{} does not apply to the selected dimensions", entry.id)));
    }
    let algs = &algs[..];
    match entry.check {
        Check::Frel => sample_pointwise(algs, cfg, seed, false, |t, s, _| residual_frel(t, s)),
        Check::Frer => sample_pointwise(algs, cfg, seed, false, |t, s, _| residual_frer(t, s)),
        Check::Gfrel | Check::Gfrer => {
            let side = if entry.check == Check::Gfrel { Side::Left } else { Side::Right };
            sample_pointwise(algs, cfg, seed, false, |t, s, _| {
                (1..=5).try_fold(0.0f64, |acc, m| Ok(acc.max(residual_generalized(t, s, m, side)?)))
            })
        }
        Check::Pseudo => sample_pointwise(algs, cfg, seed, true, |t, s, p| residual_pseudo(t, s, p, false)),
        Check::PseudoII => sample_pointwise(algs, cfg, seed, true, |t, s, p| residual_pseudo(t, s, p, true)),
        Check::ScLeft => sample_pointwise(algs, cfg, seed, false, |t, s, _| residual_sc_equation(t, s, Side::Left)),
        Check::ScRight => sample_pointwise(algs, cfg, seed, false, |t, s, _| residual_sc_equation(t, s, Side::Right)),
        Check::ScRes => sample_pointwise(algs, cfg, seed, true, |t, s, p| residual_sc_resolvent_equation(t, s, p, false)),
        Check::ScResII => sample_pointwise(algs, cfg, seed, true, |t, s, p| residual_sc_resolvent_equation(t, s, p, true)),
        Check::N3 => sample_pointwise(algs, cfg, seed, true, |t, s, p| residual_n3(t, s, p, true)),
        Check::N3Lemma => sample_pointwise(algs, cfg, seed, true, |t, s, p| residual_n3(t, s, p, false)),
        Check::Lemma321 => check_lemma_bf(algs, cfg, seed),
        Check::Subs => check_subs(algs, cfg, seed),
        Check::Proj | Check::ProjSum | Check::Intertwine | Check::ProjN5 => check_projectors(entry.check, algs, cfg, seed),
        Check::Vanish => check_vanish(algs, cfg, seed),
        Check::FCalc => check_fcalc(algs, cfg, seed),
        Check::ScCalc => check_sccalc(algs, cfg, seed),
        Check::Gamma => check_gamma(algs, cfg, seed),
        Check::Binom => check_binom(cfg),
    }
}

impl Check {
    /// Clifford dimensions the check is evaluated in; empty when it does not
    /// involve an algebra.
    pub fn clifford_dims(self) -> &'static [usize] {
        match self {
            Check::N3 | Check::N3Lemma | Check::Vanish | Check::FCalc | Check::Proj | Check::ProjSum => &[3],
            Check::ProjN5 => &[5],
            Check::Binom => &[],
            _ => &[3, 5],
        }
    }
}

fn entry_dims(entry: &CatalogEntry, cfg: &BatteryConfig) -> Vec<usize> {
    entry
        .check
        .clifford_dims()
        .iter()
        .copied()
        .filter(|n| cfg.clifford_dims.contains(n))
        .collect()
}

/// Whether `entry` has anything to evaluate under `cfg`.
pub fn applicable(entry: &CatalogEntry, cfg: &BatteryConfig) -> bool {
    match entry.backend {
        Backend::Quaternion => true,
        Backend::Clifford => entry.check == Check::Binom || !entry_dims(entry, cfg).is_empty(),
    }
}

fn check_lemma_bf(algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut rng = seeded(seed);
    let functions = [
        SliceFunction::real_polynomial(&[0.5, -1.0, 0.0, 1.0]),
        SliceFunction::IntrinsicRational {
            num: vec![1.0, 0.0, 1.0],
            den: vec![-4.0, 1.0],
        },
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let rep = ModuleRep::new(alg, 2);
        for k in 0..10 {
            let plane = random_unit(alg, &mut rng);
            let contour = Contour::circle(plane, 0.0, 2.5, cfg.nodes)?;
            let p = random_in_ball(alg, &mut rng, 1.5);
            let b = random_module_operator(&rep, &mut rng);
            worst = worst.max(residual_lemma_bf(&rep, &b, &functions[k % 2], &p, &contour)?);
            count += 1;
        }
    }
    Ok((worst, count))
}

fn check_subs(algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let plane = ImaginaryUnit::basis(alg, 1);
        for t in split_family(alg, seed) {
            let spheres = f_spectrum(&t).spheres();
            for pair in split_projectors(&t, cfg, &plane)? {
                for _ in 0..3 {
                    let lambda = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.1);
                    worst = worst.max(residual_substituted(&t, &pair, &lambda)?);
                    count += 1;
                }
            }
        }
    }
    Ok((worst, count))
}

fn check_projectors(check: Check, algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let plane = ImaginaryUnit::basis(alg, 1);
        for t in split_family(alg, seed) {
            let pairs = split_projectors(&t, cfg, &plane)?;
            match check {
                Check::ProjSum => worst = worst.max(completeness_residual(&t, &pairs)?),
                _ => {
                    for pair in &pairs {
                        let d = diagnostics(&t, pair);
                        worst = worst.max(match check {
                            Check::Intertwine => d.left_intertwining.max(d.right_intertwining).max(d.commutator),
                            _ => d.idempotence,
                        });
                    }
                }
            }
            count += 1;
        }
    }
    Ok((worst, count))
}

fn check_vanish(algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let plane = ImaginaryUnit::basis(alg, 1);
        for t in split_family(alg, seed) {
            let spec = f_spectrum(&t);
            let mut contours = vec![full_contour(&spec, cfg.margin, &plane, cfg.nodes)?];
            for g in separated_groups(&spec, 2.0 * cfg.margin) {
                contours.push(admissible_contour(&spec, &g, cfg.margin, &plane, cfg.nodes)?);
            }
            for c in &contours {
                let (a, b) = vanishing_integrals_check(&t, c)?;
                worst = worst.max(a).max(b);
                count += 1;
            }
        }
    }
    Ok((worst, count))
}

/// Rotated planes used by the independence checks.
pub fn independence_planes(alg: Algebra) -> Vec<ImaginaryUnit> {
    let n = alg.units();
    let mut second = vec![0.0; n];
    second[0] = 1.0;
    second[1] = 1.0;
    let third: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    vec![
        ImaginaryUnit::basis(alg, 1),
        ImaginaryUnit::normalized(alg, second).expect("nonzero"),
        ImaginaryUnit::normalized(alg, third).expect("nonzero"),
    ]
}

/// Full-spectrum contour with the given margin and a second one with a
/// larger margin.
pub fn independence_contours(t: &OperatorTuple, margin: f64, nodes: usize) -> Result<Vec<Contour>> {
    let spec = f_spectrum(t);
    let plane = ImaginaryUnit::basis(t.algebra(), 1);
    Ok(vec![
        full_contour(&spec, margin, &plane, nodes)?,
        full_contour(&spec, 2.0 * margin + 0.25, &plane, nodes)?,
    ])
}

fn check_fcalc(algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        for d in [2, 4] {
            let t = random_commuting_tuple(alg, d, &mut rng);
            let contours = independence_contours(&t, cfg.margin, cfg.nodes)?;
            let id = t.rep().identity();
            for side in [Side::Left, Side::Right] {
                let sq = f_calculus(side, &SliceFunction::monomial(2), &t, &contours[0])?.value;
                worst = worst.max(relative_residual(&sq, &(&id * gamma_constant(3)?)));
                let lin = f_calculus(side, &SliceFunction::monomial(1), &t, &contours[0])?.value;
                worst = worst.max(spectral_norm(&lin));
            }
            let f = SliceFunction::real_polynomial(&[1.0, -0.5, 0.25, 1.0]);
            let rep = independence_report(CalculusKind::F, Side::Left, &f, &t, &contours, &independence_planes(alg))?;
            worst = worst.max(rep.max_difference);
            count += 1;
        }
    }
    Ok((worst, count))
}

fn check_sccalc(algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let d = if alg.units() >= 5 { 2 } else { 4 };
        let t = random_commuting_tuple(alg, d, &mut rng);
        let contours = independence_contours(&t, cfg.margin, cfg.nodes)?;
        let e = t.encode();
        let mut em = t.rep().identity();
        for m in 0..=5 {
            for side in [Side::Left, Side::Right] {
                let v = sc_calculus(side, &SliceFunction::monomial(m), &t, &contours[0])?.value;
                worst = worst.max(relative_residual(&v, &em));
            }
            em = &em * &e;
        }
        let f = SliceFunction::IntrinsicRational {
            num: vec![1.0, 2.0, 0.0, -1.0],
            den: vec![400.0, 0.0, 1.0],
        };
        let l = sc_calculus(Side::Left, &f, &t, &contours[0])?.value;
        let r = sc_calculus(Side::Right, &f, &t, &contours[0])?.value;
        worst = worst.max(relative_residual(&l, &r));
        let rep = independence_report(CalculusKind::Sc, Side::Left, &f, &t, &contours, &independence_planes(alg))?;
        worst = worst.max(rep.max_difference);
        count += 1;
    }
    Ok((worst, count))
}

fn check_gamma(algs: &[Algebra], cfg: &BatteryConfig, seed: u64) -> Result<(f64, usize)> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &alg in algs {
        let n = alg.units();
        for _ in 0..5 {
            let plane = random_unit(alg, &mut rng);
            let contour = Contour::circle(plane, 0.0, 3.0, cfg.nodes)?;
            let x = random_in_ball(alg, &mut rng, 1.5);
            let gamma = gamma_constant(n)?;
            worst = worst.max(lemma_gamma_check(&x, &contour)? / gamma.abs());
            // Coordinates with short binary expansions keep the rationals small.
            let xr = Paravector::new(alg, x.parts().iter().map(|c| (c * 64.0).round() / 64.0 + 1.0 / 128.0).collect())?;
            let exact = residue_gamma_check(n, &xr)?;
            if !(exact.equals_gamma && exact.closed_forms_agree) {
                return Ok((f64::INFINITY, count + 1));
            }
            count += 1;
        }
    }
    Ok((worst, count))
}

fn check_binom(cfg: &BatteryConfig) -> Result<(f64, usize)> {
    let mut failures = 0;
    let mut count = 0;
    for m in 0..=cfg.m_max {
        for j in 0..=cfg.m_max {
            let c = binom_identity_check(m, j);
            if !(c.identity_holds && c.recurrence_holds) {
                failures += 1;
            }
            count += 1;
        }
    }
    Ok((failures as f64, count))
}

/// Runs one catalog entry.
pub fn verify_identity(entry: &CatalogEntry, cfg: &BatteryConfig) -> IdentityOutcome {
    let start = Instant::now();
    let result = run_check(entry, cfg);
    let runtime_ms = cfg.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    match result {
        Ok((residual, samples)) => IdentityOutcome {
            id: entry.id.clone(),
            statement: entry.statement.to_string(),
            residual,
            tolerance: entry.tolerance,
            pass: residual <= entry.tolerance,
            asserted: entry.asserted,
            samples,
            error: None,
            runtime_ms,
        },
        Err(e) => IdentityOutcome {
            id: entry.id.clone(),
            statement: entry.statement.to_string(),
            residual: f64::INFINITY,
            tolerance: entry.tolerance,
            pass: false,
            asserted: entry.asserted,
            samples: 0,
            error: Some(e.to_string()),
            runtime_ms,
        },
    }
}

/// Runs the selected entries in parallel; the output keeps catalog order.
pub fn run_battery(entries: &[CatalogEntry], cfg: &BatteryConfig) -> Vec<IdentityOutcome> {
    entries.par_iter().map(|e| verify_identity(e, cfg)).collect()
}

/// Catalog entries whose id equals `filter` (case-insensitive), or all
/// entries when no filter is given.
pub fn select(filter: Option<&str>) -> Result<Vec<CatalogEntry>> {
    let all = catalog();
    match filter {
        None => Ok(all),
        Some(f) => {
            let chosen: Vec<CatalogEntry> = all.into_iter().filter(|e| e.id.eq_ignore_ascii_case(f)).collect();
            if chosen.is_empty() {
                Err(Error::Parse(format!("unknown catalog id '{f}'")))
            } else {
                Ok(chosen)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_identities_on_one_tuple() {
        let alg = Algebra::clifford(3).unwrap();
        let mut rng = seeded(21);
        let t = random_commuting_tuple(alg, 3, &mut rng);
        let spheres = f_spectrum(&t).spheres();
        for _ in 0..5 {
            let s = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.1);
            let p = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.1);
            assert!(residual_frel(&t, &s).unwrap() < 1e-11);
            assert!(residual_frer(&t, &s).unwrap() < 1e-11);
            assert!(residual_generalized(&t, &s, 3, Side::Left).unwrap() < 1e-11);
            assert!(residual_generalized(&t, &s, 3, Side::Right).unwrap() < 1e-11);
            assert!(residual_sc_equation(&t, &s, Side::Left).unwrap() < 1e-11);
            assert!(residual_sc_equation(&t, &s, Side::Right).unwrap() < 1e-11);
            assert!(residual_sc_resolvent_equation(&t, &s, &p, false).unwrap() < 1e-11);
            assert!(residual_sc_resolvent_equation(&t, &s, &p, true).unwrap() < 1e-11);
            assert!(residual_pseudo(&t, &s, &p, false).unwrap() < 1e-11);
            assert!(residual_pseudo(&t, &s, &p, true).unwrap() < 1e-11);
            assert!(residual_n3(&t, &s, &p, false).unwrap() < 1e-11);
            assert!(residual_n3(&t, &s, &p, true).unwrap() < 1e-11);
        }
    }

    #[test]
    fn left_factor_form_needs_reversed_bracket() {
        // (s^2 - 2p_0 s + |p|^2)^{-1}(s D - D p̄) is off by a sign.
        let alg = Algebra::clifford(3).unwrap();
        let mut rng = seeded(4);
        let t = random_commuting_tuple(alg, 2, &mut rng);
        let spheres = f_spectrum(&t).spheres();
        let s = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.1);
        let p = random_resolvent_point(alg, &mut rng, &spheres, t.norm_bound(), 0.1);
        let a = t.resolvent(&s).unwrap().sc(Side::Right);
        let b = t.resolvent(&p).unwrap().sc(Side::Left);
        let flipped = -form_ii_rhs(&t.rep(), &(&a - &b), &s, &p).unwrap();
        assert!(relative_residual(&(&a * &b), &flipped) > 1e-2);
        assert!(residual_sc_resolvent_equation(&t, &s, &p, true).unwrap() < 1e-11);
    }

    #[test]
    fn same_sphere_pair_is_rejected() {
        let alg = Algebra::clifford(3).unwrap();
        let t = random_commuting_tuple(alg, 2, &mut seeded(1));
        let s = Paravector::new(alg, vec![3.0, 1.0, 0.0, 0.0]).unwrap();
        let p = Paravector::new(alg, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(residual_sc_resolvent_equation(&t, &s, &p, false), Err(Error::Precondition(_))));
    }

    #[test]
    fn catalog_ids_unique() {
        let c = catalog();
        let mut ids: Vec<&str> = c.iter().map(|e| e.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), c.len());
    }
}
