//! Commuting operator tuples `T = T_0 + Σ e_j T_j` and the real matrix
//! representation on `V_n = R^d ⊗ R_n` in which every resolvent lives.
//!
//! A vector of `V_n` is stored with index `blade * d + base`. Left
//! multiplication by an algebra element `a` is `L_a = left_regular(a) ⊗ I_d`,
//! a real matrix `M` acts componentwise as `lift(M) = I ⊗ M`, and the tuple
//! itself is `encode(T) = Σ_j L_{e_j} lift(T_j)`.

use nalgebra::{DMatrix, LU};
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Multivector, Paravector};
use crate::error::{Error, Result};
use crate::linalg::{one_norm, spectral_norm};
use crate::slice::{gamma_constant, Side};

/// Default relative commutator tolerance.
pub const DEFAULT_COMMUTATIVITY_TOL: f64 = 1e-10;
/// Default 1-norm condition number above which a point counts as spectral.
pub const DEFAULT_COND_THRESHOLD: f64 = 1e12;

/// Sizes of the representation and the matrix builders that depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModuleRep {
    pub alg: Algebra,
    pub d: usize,
}

impl ModuleRep {
    pub fn new(alg: Algebra, d: usize) -> Self {
        ModuleRep { alg, d }
    }

    /// `2^n · d` (or `4 d`).
    pub fn size(&self) -> usize {
        self.alg.dim() * self.d
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.size(), self.size())
    }

    pub fn zeros(&self) -> DMatrix<f64> {
        DMatrix::zeros(self.size(), self.size())
    }

    /// `L_a`.
    pub fn left_mult(&self, a: &Multivector) -> DMatrix<f64> {
        left_regular(a).kronecker(&DMatrix::identity(self.d, self.d))
    }

    pub fn left_mult_pv(&self, s: &Paravector) -> DMatrix<f64> {
        self.left_mult(&s.to_mv())
    }

    /// `I ⊗ M`.
    pub fn lift(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::<f64>::identity(self.alg.dim(), self.alg.dim()).kronecker(m)
    }

    /// `L_a lift(M)`, the operator `v ↦ a M(v)`.
    pub fn left_mult_lift(&self, a: &Multivector, m: &DMatrix<f64>) -> DMatrix<f64> {
        left_regular(a).kronecker(m)
    }

    /// Coordinates of `Σ_B v_B e_B` with `v_B ∈ R^d`.
    pub fn pack(&self, parts: &[nalgebra::DVector<f64>]) -> nalgebra::DVector<f64> {
        let mut out = nalgebra::DVector::zeros(self.size());
        for (b, v) in parts.iter().enumerate() {
            out.rows_mut(b * self.d, self.d).copy_from(v);
        }
        out
    }

    pub fn unpack(&self, v: &nalgebra::DVector<f64>) -> Vec<nalgebra::DVector<f64>> {
        (0..self.alg.dim())
            .map(|b| v.rows(b * self.d, self.d).into_owned())
            .collect()
    }
}

/// Matrix of `x ↦ a x` on the algebra coefficients.
pub fn left_regular(a: &Multivector) -> DMatrix<f64> {
    let alg = a.algebra();
    let dim = alg.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for (ia, &ca) in a.coeffs().iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        for b in 0..dim {
            let (sign, idx) = alg.basis_product(ia, b);
            m[(idx, b)] += sign * ca;
        }
    }
    m
}

/// Outcome of the pairwise commutator check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    /// Largest `‖T_iT_j - T_jT_i‖ / max(‖T_i‖‖T_j‖, 1)`.
    pub max_norm: f64,
    pub pair: (usize, usize),
    pub tol: f64,
    pub pass: bool,
}

/// An `(n+1)`-tuple of commuting real `d × d` matrices.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    alg: Algebra,
    d: usize,
    components: Vec<DMatrix<f64>>,
    commutativity_tol: f64,
    cond_threshold: f64,
}

impl OperatorTuple {
    /// Builds the tuple and rejects it if the components do not commute.
    pub fn new(alg: Algebra, components: Vec<DMatrix<f64>>) -> Result<Self> {
        Self::with_tolerance(alg, components, DEFAULT_COMMUTATIVITY_TOL)
    }

    pub fn with_tolerance(alg: Algebra, components: Vec<DMatrix<f64>>, tol: f64) -> Result<Self> {
        let t = Self::unchecked(alg, components, tol)?;
        let report = t.validate_commuting();
        if !report.pass {
            return Err(Error::NonCommuting {
                max_norm: report.max_norm,
                pair: report.pair,
                tol: report.tol,
            });
        }
        Ok(t)
    }

    /// Builds the tuple checking only shapes.
    pub fn unchecked(alg: Algebra, components: Vec<DMatrix<f64>>, tol: f64) -> Result<Self> {
        if components.len() != alg.units() + 1 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} components for {alg}", alg.units() + 1),
                found: components.len().to_string(),
            });
        }
        let d = components[0].nrows();
        if d == 0 {
            return Err(Error::DimensionMismatch {
                expected: "nonempty matrices".into(),
                found: "0x0".into(),
            });
        }
        for (j, c) in components.iter().enumerate() {
            if c.nrows() != d || c.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d}x{d} for T{j}"),
                    found: format!("{}x{}", c.nrows(), c.ncols()),
                });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("T{j} has non-finite entries")));
            }
        }
        Ok(OperatorTuple {
            alg,
            d,
            components,
            commutativity_tol: tol,
            cond_threshold: DEFAULT_COND_THRESHOLD,
        })
    }

    pub fn with_cond_threshold(mut self, threshold: f64) -> Self {
        self.cond_threshold = threshold;
        self
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rep(&self) -> ModuleRep {
        ModuleRep::new(self.alg, self.d)
    }

    pub fn components(&self) -> &[DMatrix<f64>] {
        &self.components
    }

    pub fn commutativity_tol(&self) -> f64 {
        self.commutativity_tol
    }

    pub fn cond_threshold(&self) -> f64 {
        self.cond_threshold
    }

    pub fn validate_commuting(&self) -> CommutatorReport {
        validate_commuting(&self.components, self.commutativity_tol)
    }

    /// `T̄ = T_0 - Σ e_j T_j`.
    pub fn conjugate(&self) -> OperatorTuple {
        let mut t = self.clone();
        for c in &mut t.components[1..] {
            *c = -&*c;
        }
        t
    }

    /// `encode(T) = Σ_j L_{e_j} lift(T_j)`.
    pub fn encode(&self) -> DMatrix<f64> {
        let rep = self.rep();
        let mut out = rep.left_mult_lift(&Multivector::one(self.alg), &self.components[0]);
        for j in 1..=self.alg.units() {
            out += rep.left_mult_lift(&Multivector::unit(self.alg, j), &self.components[j]);
        }
        out
    }

    /// `T_0^2 + Σ T_j^2`, the componentwise form of `T T̄`.
    pub fn sum_of_squares(&self) -> DMatrix<f64> {
        self.components.iter().map(|c| c * c).fold(DMatrix::zeros(self.d, self.d), |a, b| a + b)
    }

    /// `Σ_j ‖T_j‖_2` over all components, the radius bound for the spectrum.
    pub fn norm_bound(&self) -> f64 {
        self.components.iter().map(spectral_norm).sum()
    }

    /// `s^2 I - s (T + T̄) + T T̄` as a matrix on `V_n`.
    pub fn pencil_matrix(&self, s: &Paravector) -> DMatrix<f64> {
        let rep = self.rep();
        let mut p = rep.left_mult_pv(&s.square());
        p -= rep.left_mult_lift(&s.to_mv(), &(&self.components[0] * 2.0));
        p += rep.lift(&self.sum_of_squares());
        p
    }

    pub fn resolvent(&self, s: &Paravector) -> Result<Resolvent<'_>> {
        Resolvent::new(self, s)
    }

    pub fn to_document(&self) -> TupleDocument {
        TupleDocument {
            algebra: Some(match self.alg {
                Algebra::Clifford { .. } => "clifford".into(),
                Algebra::Quaternion => "quaternion".into(),
            }),
            n: self.alg.units(),
            d: self.d,
            components: self
                .components
                .iter()
                .map(|c| MatrixRepr::Rows(c.row_iter().map(|r| r.iter().copied().collect()).collect()))
                .collect(),
            commutativity_tol: Some(self.commutativity_tol),
        }
    }
}

/// Largest relative commutator norm over all pairs.
pub fn validate_commuting(components: &[DMatrix<f64>], tol: f64) -> CommutatorReport {
    let norms: Vec<f64> = components.iter().map(spectral_norm).collect();
    let mut worst = (0.0, (0, 0));
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            let c = &components[i] * &components[j] - &components[j] * &components[i];
            let rel = spectral_norm(&c) / (norms[i] * norms[j]).max(1.0);
            if rel > worst.0 {
                worst = (rel, (i, j));
            }
        }
    }
    CommutatorReport {
        max_norm: worst.0,
        pair: worst.1,
        tol,
        pass: worst.0 <= tol,
    }
}

/// A matrix in a tuple file: either flat row-major or a list of rows.
// Parsed through `Value`: untagged enums lose numbers under serde_json's
// arbitrary_precision feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "serde_json::Value")]
pub enum MatrixRepr {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl TryFrom<serde_json::Value> for MatrixRepr {
    type Error = String;

    fn try_from(v: serde_json::Value) -> std::result::Result<Self, String> {
        let items = v.as_array().ok_or("a matrix must be a JSON array")?;
        let num = |x: &serde_json::Value| x.as_f64().ok_or_else(|| format!("'{x}' is not a number"));
        if items.iter().all(|x| x.is_array()) && !items.is_empty() {
            items
                .iter()
                .map(|row| row.as_array().unwrap().iter().map(num).collect())
                .collect::<std::result::Result<_, _>>()
                .map(MatrixRepr::Rows)
        } else {
            items.iter().map(num).collect::<std::result::Result<_, _>>().map(MatrixRepr::Flat)
        }
    }
}

/// On-disk form of an operator tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDocument {
    /// `clifford` (default) or `quaternion`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    pub n: usize,
    pub d: usize,
    pub components: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutativity_tol: Option<f64>,
}

impl TupleDocument {
    pub fn algebra(&self) -> Result<Algebra> {
        match self.algebra.as_deref().unwrap_or("clifford") {
            "clifford" => Algebra::clifford(self.n),
            "quaternion" if self.n == 3 => Ok(Algebra::Quaternion),
            "quaternion" => Err(Error::Parse(format!("quaternion tuples need n = 3, got {}", self.n))),
            other => Err(Error::Parse(format!("unknown algebra '{other}'"))),
        }
    }

    /// Builds the tuple, rejecting non-commuting components.
    pub fn into_tuple(self) -> Result<OperatorTuple> {
        let alg = self.algebra()?;
        let d = self.d;
        let mats = self
            .components
            .iter()
            .enumerate()
            .map(|(j, m)| match m {
                MatrixRepr::Flat(v) if v.len() == d * d => Ok(DMatrix::from_row_slice(d, d, v)),
                MatrixRepr::Rows(rows) if rows.len() == d && rows.iter().all(|r| r.len() == d) => {
                    Ok(DMatrix::from_fn(d, d, |i, k| rows[i][k]))
                }
                _ => Err(Error::Parse(format!("component T{j} is not a {d}x{d} matrix"))),
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorTuple::with_tolerance(alg, mats, self.commutativity_tol.unwrap_or(DEFAULT_COMMUTATIVITY_TOL))
    }
}

pub fn parse_tuple_json(text: &str) -> Result<OperatorTuple> {
    let doc: TupleDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_tuple()
}

/// `Q_s(T)` and the resolvents at a fixed point `s` of the resolvent set.
///
/// The pencil is factored once; powers of `Q_s(T)` are obtained by repeated
/// solves against the factorization.
pub struct Resolvent<'a> {
    tuple: &'a OperatorTuple,
    s: Paravector,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    powers: Vec<DMatrix<f64>>,
    condition: f64,
}

impl<'a> Resolvent<'a> {
    pub fn new(tuple: &'a OperatorTuple, s: &Paravector) -> Result<Self> {
        if s.algebra() != tuple.alg {
            return Err(Error::DimensionMismatch {
                expected: tuple.alg.to_string(),
                found: s.algebra().to_string(),
            });
        }
        let p = tuple.pencil_matrix(s);
        let spectral_err = |condition: f64| Error::SpectralPoint {
            center: s.re(),
            radius: s.vector_norm(),
            condition,
        };
        let lu = p.clone().lu();
        let q = lu
            .solve(&tuple.rep().identity())
            .ok_or_else(|| spectral_err(f64::INFINITY))?;
        let condition = one_norm(&p) * one_norm(&q);
        if !condition.is_finite() || condition > tuple.cond_threshold {
            return Err(spectral_err(condition));
        }
        Ok(Resolvent {
            tuple,
            s: s.clone(),
            lu,
            powers: vec![q],
            condition,
        })
    }

    pub fn point(&self) -> &Paravector {
        &self.s
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `Q_s(T)^k`, `k ≥ 1`.
    pub fn q_power(&mut self, k: usize) -> DMatrix<f64> {
        assert!(k >= 1, "power must be positive");
        while self.powers.len() < k {
            let next = self.lu.solve(self.powers.last().unwrap()).expect("factorization already succeeded");
            self.powers.push(next);
        }
        self.powers[k - 1].clone()
    }

    fn linear_part(&self) -> DMatrix<f64> {
        let rep = self.tuple.rep();
        rep.left_mult_pv(&self.s) - self.tuple.conjugate().encode()
    }

    /// `S_{C,L}^{-1}(s,T) = (sI - T̄) Q_s(T)` or `S_{C,R}^{-1}(s,T) = Q_s(T)(sI - T̄)`.
    pub fn sc(&mut self, side: Side) -> DMatrix<f64> {
        let q = self.q_power(1);
        match side {
            Side::Left => self.linear_part() * q,
            Side::Right => q * self.linear_part(),
        }
    }

    /// `F_n^L(s,T) = γ_n (sI - T̄) Q_s(T)^{(n+1)/2}` or mirrored.
    pub fn f(&mut self, side: Side) -> Result<DMatrix<f64>> {
        let n = self.tuple.alg.units();
        let gamma = gamma_constant(n)?;
        let q = self.q_power(n.div_ceil(2));
        Ok(match side {
            Side::Left => self.linear_part() * q * gamma,
            Side::Right => q * self.linear_part() * gamma,
        })
    }

    /// `γ_n Σ_{i<m} T^i Q_s(T)^{(n-1)/2} s^{m-1-i}` (left) or
    /// `γ_n Σ_{i<m} s^{m-1-i} Q_s(T)^{(n-1)/2} T^i` (right).
    pub fn m_sum(&mut self, side: Side, m: usize) -> Result<DMatrix<f64>> {
        let n = self.tuple.alg.units();
        let gamma = gamma_constant(n)?;
        let rep = self.tuple.rep();
        let k = (n - 1) / 2;
        let q = if k == 0 { rep.identity() } else { self.q_power(k) };
        let e = self.tuple.encode();
        let mut out = rep.zeros();
        let mut e_pow = rep.identity();
        for i in 0..m {
            let ls = rep.left_mult_pv(&self.s.powi((m - 1 - i) as i32));
            out += match side {
                Side::Left => &e_pow * &q * ls,
                Side::Right => ls * &q * &e_pow,
            };
            e_pow = &e_pow * &e;
        }
        Ok(out * gamma)
    }
}

/// `Q_s(T)^power`.
pub fn q_operator(s: &Paravector, t: &OperatorTuple, power: usize) -> Result<DMatrix<f64>> {
    Ok(t.resolvent(s)?.q_power(power))
}

pub fn sc_resolvent(side: Side, s: &Paravector, t: &OperatorTuple) -> Result<DMatrix<f64>> {
    Ok(t.resolvent(s)?.sc(side))
}

pub fn f_resolvent(side: Side, s: &Paravector, t: &OperatorTuple) -> Result<DMatrix<f64>> {
    t.resolvent(s)?.f(side)
}

pub fn m_sum(side: Side, m: usize, s: &Paravector, t: &OperatorTuple) -> Result<DMatrix<f64>> {
    t.resolvent(s)?.m_sum(side, m)
}
