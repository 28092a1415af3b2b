//! Exact combinatorics behind `Δ^{(n-1)/2} s^{n-1} = γ_n`: the alternating
//! binomial identity, the recurrence used to prove it, and the two residue
//! sums evaluated in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::Paravector;
use crate::error::{Error, Result};

/// Generalized binomial coefficient `C(a, k)` for integer `a` (possibly
/// negative) and `k`; zero for `k < 0`.
pub fn binom(a: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(a - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `Λ(j, k) = (-1)^k C(m+k-1, k) C(m+j, m+k)`.
pub fn lambda_term(m: i64, j: i64, k: i64) -> BigInt {
    if k < 0 || m + k < 0 {
        return BigInt::zero();
    }
    let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    sign * binom(m + k - 1, k) * binom(m + j, m + k)
}

/// `Σ_{k=0}^{j} Λ(j, k)`.
pub fn binom_sum(m: i64, j: i64) -> BigInt {
    (0..=j).map(|k| lambda_term(m, j, k)).sum()
}

/// Five-term relation between neighbouring `Λ` values, multiplied through by
/// `j + 2`; returns the left-hand side, which vanishes.
pub fn recurrence_defect(m: i64, j: i64, k: i64) -> BigInt {
    let l = |jj: i64, kk: i64| lambda_term(m, jj, kk);
    let a = BigInt::from(m + j + 1);
    -(&a * l(j, k)) + &a * l(j + 1, k) + &a * l(j, k + 1) - BigInt::from(m + 2 * j + 3) * l(j + 1, k + 1)
        + BigInt::from(j + 2) * l(j + 2, k + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomCheck {
    pub m: i64,
    pub j: i64,
    pub sum: String,
    pub identity_holds: bool,
    pub recurrence_holds: bool,
}

/// Checks `Σ_k Λ(j,k) = 1` and the recurrence for all `k ∈ [-2, j+2]`.
pub fn binom_identity_check(m: i64, j: i64) -> BinomCheck {
    let sum = binom_sum(m, j);
    let recurrence_holds = (-2..=j + 2).all(|k| recurrence_defect(m, j, k).is_zero());
    BinomCheck {
        m,
        j,
        identity_holds: sum.is_one(),
        sum: sum.to_string(),
        recurrence_holds,
    }
}

/// Element `a + b w` of `Q(w)` with `w^2 = -nu`, `nu > 0`. With `w` standing
/// for the vector part of a paravector this is exact arithmetic in its plane.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExt {
    pub a: BigRational,
    pub b: BigRational,
    nu: BigRational,
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, nu: BigRational) -> Self {
        QuadExt { a, b, nu }
    }

    pub fn rational(a: BigRational, nu: &BigRational) -> Self {
        QuadExt::new(a, BigRational::zero(), nu.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadExt::new(&self.a + &o.a, &self.b + &o.b, self.nu.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadExt::new(&self.a - &o.a, &self.b - &o.b, self.nu.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        QuadExt::new(
            &self.a * &o.a - &self.nu * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
            self.nu.clone(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadExt::new(&self.a * k, &self.b * k, self.nu.clone())
    }

    pub fn conj(&self) -> Self {
        QuadExt::new(self.a.clone(), -&self.b, self.nu.clone())
    }

    pub fn inv(&self) -> Self {
        let den = &self.a * &self.a + &self.nu * &self.b * &self.b;
        QuadExt::new(&self.a / &den, -&self.b / &den, self.nu.clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = QuadExt::rational(BigRational::one(), &self.nu);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn is_rational_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }
}

/// Exact rational value of a finite `f64`.
pub fn exact_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("{x} is not finite")))
}

fn plane_pair(x: &Paravector) -> Result<(QuadExt, QuadExt)> {
    let nu = x.parts()[1..]
        .iter()
        .map(|&c| exact_rational(c).map(|r| &r * &r))
        .sum::<Result<BigRational>>()?;
    if !nu.is_positive() {
        return Err(Error::Domain("the residue sums need a non-real x".into()));
    }
    let x0 = exact_rational(x.re())?;
    let xv = QuadExt::new(x0, BigRational::one(), nu);
    let xb = xv.conj();
    Ok((xv, xb))
}

fn q(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

/// The two residue sums for `n = 2m + 1`, in exact arithmetic on the plane
/// of `x`:
/// `Res_x = Σ_{k=0}^{m} (-1)^k C(2m, m-k) C(m+k-1, k) x^{m+k} / (x - x̄)^{m+k}`,
/// `Res_x̄ = Σ_{k=0}^{m-1} (-1)^k C(2m, m-k-1) C(m+k, k) x̄^{m+k+1} / (x̄ - x)^{m+1+k}`.
pub fn residue_sums(n: usize, x: &Paravector) -> Result<(QuadExt, QuadExt)> {
    if n % 2 == 0 {
        return Err(Error::Unsupported(format!("residue sums need odd n, got {n}")));
    }
    let m = ((n - 1) / 2) as i64;
    let (xv, xb) = plane_pair(x)?;
    let diff = xv.sub(&xb);
    let diff_inv = diff.inv();
    let mut res_x = QuadExt::rational(BigRational::zero(), &xv.nu);
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = q(BigInt::from(sign) * binom(2 * m, m - k) * binom(m + k - 1, k));
        let term = xv.pow((m + k) as u32).mul(&diff_inv.pow((m + k) as u32)).scale(&c);
        res_x = res_x.add(&term);
    }
    let neg_diff_inv = diff_inv.scale(&-BigRational::one());
    let mut res_xb = QuadExt::rational(BigRational::zero(), &xv.nu);
    for k in 0..m {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = q(BigInt::from(sign) * binom(2 * m, m - k - 1) * binom(m + k, k));
        let term = xb
            .pow((m + k + 1) as u32)
            .mul(&neg_diff_inv.pow((m + 1 + k) as u32))
            .scale(&c);
        res_xb = res_xb.add(&term);
    }
    Ok((res_x, res_xb))
}

/// Closed forms of the residue sums:
/// `(x - x̄)^{-2m} Σ_{j∈J} C(2m, j) x^j (-x̄)^{2m-j}` with `J = m..=2m` for
/// `Res_x` and `J = 0..m` for `Res_x̄`. With `negate_conjugate = false` the
/// sign of `x̄` inside the sum is dropped.
pub fn residue_closed_forms(n: usize, x: &Paravector, negate_conjugate: bool) -> Result<(QuadExt, QuadExt)> {
    let m = ((n - 1) / 2) as i64;
    let (xv, xb) = plane_pair(x)?;
    let scale = xv.sub(&xb).inv().pow(2 * m as u32);
    let y = if negate_conjugate { xb.scale(&-BigRational::one()) } else { xb };
    let part = |range: std::ops::Range<i64>| {
        let mut acc = QuadExt::rational(BigRational::zero(), &xv.nu);
        for j in range {
            let term = xv.pow(j as u32).mul(&y.pow((2 * m - j) as u32)).scale(&q(binom(2 * m, j)));
            acc = acc.add(&term);
        }
        acc.mul(&scale)
    };
    Ok((part(m..2 * m + 1), part(0..m)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueCheck {
    pub n: usize,
    /// `γ_n (Res_x + Res_x̄)` as an exact rational, printed.
    pub gamma_times_sum: String,
    pub equals_gamma: bool,
    pub closed_forms_agree: bool,
}

/// Exact check that `γ_n (Res_x + Res_x̄) = γ_n`.
pub fn residue_gamma_check(n: usize, x: &Paravector) -> Result<ResidueCheck> {
    let gamma = crate::slice::gamma_constant(n)?;
    let (rx, rxb) = residue_sums(n, x)?;
    let (cx, cxb) = residue_closed_forms(n, x, true)?;
    let total = rx.add(&rxb);
    let g = exact_rational(gamma)?;
    let scaled = total.scale(&g);
    Ok(ResidueCheck {
        n,
        gamma_times_sum: if scaled.b.is_zero() {
            scaled.a.to_string()
        } else {
            format!("{} + {} w", scaled.a, scaled.b)
        },
        equals_gamma: total.is_rational_one(),
        closed_forms_agree: rx == cx && rxb == cxb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    #[test]
    fn generalized_binomials() {
        assert_eq!(binom(-1, 0), BigInt::one());
        assert_eq!(binom(-1, 3), BigInt::from(-1));
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(3, 5), BigInt::zero());
        assert_eq!(binom(4, -1), BigInt::zero());
    }

    #[test]
    fn small_cases_by_hand() {
        for m in 0..6 {
            assert!(binom_sum(m, 0).is_one());
        }
        // m = 2, j = 1: C(1,0)C(3,2) - C(2,1)C(3,3) = 3 - 2.
        assert_eq!(lambda_term(2, 1, 0), BigInt::from(3));
        assert_eq!(lambda_term(2, 1, 1), BigInt::from(-2));
    }

    #[test]
    fn residues_for_n3() {
        let alg = Algebra::clifford(3).unwrap();
        let x = Paravector::new(alg, vec![0.5, 0.25, -1.0, 2.0]).unwrap();
        let c = residue_gamma_check(3, &x).unwrap();
        assert!(c.equals_gamma && c.closed_forms_agree);
        assert_eq!(c.gamma_times_sum, "-4");
    }
}
