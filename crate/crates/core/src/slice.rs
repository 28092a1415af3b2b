//! Slice monogenic functions, their Cauchy kernels, the `Δ^h` kernel closed
//! forms, and finite-difference checks for monogenicity.

use num_complex::Complex64;

use crate::algebra::{embed_in_plane, sphere_of, Algebra, ImaginaryUnit, Multivector, Paravector};
use crate::contour::{integrate, Contour};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The two equivalent expressions of the Cauchy kernels: form I is written
/// with `x^2 - 2 Re(s) x + |s|^2`, form II with `s^2 - 2 Re(x) s + |x|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    FormI,
    FormII,
}

/// Functions the calculus can be applied to.
#[derive(Debug, Clone, PartialEq)]
pub enum SliceFunction {
    /// `Σ s^m a_m` (left) or `Σ a_m s^m` (right).
    Polynomial { side: Side, coeffs: Vec<Multivector> },
    /// `p(s)/q(s)` with real coefficients in ascending order.
    IntrinsicRational { num: Vec<f64>, den: Vec<f64> },
}

/// Relative size below which a rational denominator counts as a pole.
const POLE_TOL: f64 = 1e-13;

impl SliceFunction {
    /// `Σ s^m c_m` with real coefficients, intrinsic.
    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        SliceFunction::IntrinsicRational {
            num: coeffs.to_vec(),
            den: vec![1.0],
        }
    }

    /// The monomial `s^m`.
    pub fn monomial(m: usize) -> Self {
        let mut c = vec![0.0; m + 1];
        c[m] = 1.0;
        Self::real_polynomial(&c)
    }

    /// Side the function is slice monogenic on; intrinsic functions are both
    /// and report `Left`.
    pub fn side(&self) -> Side {
        match self {
            SliceFunction::Polynomial { side, .. } => *side,
            SliceFunction::IntrinsicRational { .. } => Side::Left,
        }
    }

    pub fn is_intrinsic(&self) -> bool {
        match self {
            SliceFunction::IntrinsicRational { .. } => true,
            SliceFunction::Polynomial { coeffs, .. } => coeffs
                .iter()
                .all(|c| c.coeffs()[1..].iter().all(|&x| x == 0.0)),
        }
    }

    /// True if the function can be used with the calculus on `side`.
    pub fn supports(&self, side: Side) -> bool {
        self.is_intrinsic() || self.side() == side
    }

    pub fn algebra_check(&self, alg: Algebra) -> Result<()> {
        if let SliceFunction::Polynomial { coeffs, .. } = self {
            if let Some(c) = coeffs.iter().find(|c| c.algebra() != alg) {
                return Err(Error::DimensionMismatch {
                    expected: alg.to_string(),
                    found: c.algebra().to_string(),
                });
            }
        }
        Ok(())
    }

    /// Real coefficients of a polynomial whose coefficients are all real.
    pub fn real_coefficients(&self) -> Option<Vec<f64>> {
        match self {
            SliceFunction::IntrinsicRational { num, den } if den.len() == 1 => {
                Some(num.iter().map(|c| c / den[0]).collect())
            }
            SliceFunction::Polynomial { coeffs, .. } if self.is_intrinsic() => {
                Some(coeffs.iter().map(|c| c.scalar_part()).collect())
            }
            _ => None,
        }
    }

    /// Zeros of the denominator of a rational function, as complex numbers
    /// (upper and lower half-plane both listed).
    pub fn poles(&self) -> Vec<Complex64> {
        match self {
            SliceFunction::IntrinsicRational { den, .. } => polynomial_roots(den),
            SliceFunction::Polynomial { .. } => Vec::new(),
        }
    }

    pub fn evaluate(&self, s: &Paravector) -> Result<Multivector> {
        match self {
            SliceFunction::Polynomial { side, coeffs } => {
                let alg = s.algebra();
                self.algebra_check(alg)?;
                let sv = s.to_mv();
                let mut acc = Multivector::zero(alg);
                for a in coeffs.iter().rev() {
                    acc = match side {
                        Side::Left => &(&sv * &acc) + a,
                        Side::Right => &(&acc * &sv) + a,
                    };
                }
                Ok(acc)
            }
            SliceFunction::IntrinsicRational { .. } => Ok(self.evaluate_plane(s)?.to_mv()),
        }
    }

    /// Evaluates an intrinsic function at `s`, staying inside the plane of `s`.
    pub fn evaluate_plane(&self, s: &Paravector) -> Result<Paravector> {
        match self {
            SliceFunction::IntrinsicRational { num, den } => {
                let z = s.as_complex();
                let q = horner_complex(den, z);
                let scale: f64 = den.iter().map(|c| c.abs()).sum::<f64>() * (1.0 + z.norm()).powi(den.len() as i32 - 1);
                if q.norm() <= POLE_TOL * scale {
                    return Err(Error::Pole(format!("{s}")));
                }
                Ok(s.from_plane_complex(horner_complex(num, z) / q))
            }
            SliceFunction::Polynomial { .. } => match self.real_coefficients() {
                Some(c) => Ok(s.from_plane_complex(horner_complex(&c, s.as_complex()))),
                None => Err(Error::Precondition(
                    "function has Clifford coefficients and does not preserve planes".into(),
                )),
            },
        }
    }
}

fn horner_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Roots of a real polynomial (ascending coefficients) via its companion
/// matrix.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut m = nalgebra::DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// `γ_n = (-1)^{(n-1)/2} 2^{n-1} [((n-1)/2)!]^2` for odd `n`.
pub fn gamma_constant(n: usize) -> Result<f64> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "the Fueter-Sce constant needs odd n, got n={n}"
        )));
    }
    let h = (n - 1) / 2;
    let fact: f64 = (1..=h).map(|k| k as f64).product();
    let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * 2f64.powi(n as i32 - 1) * fact * fact)
}

/// `(-1)^h ∏_{ℓ=1}^h (2ℓ) ∏_{ℓ=1}^h (n - (2ℓ-1))`.
pub fn laplacian_power_constant(n: usize, h: usize) -> f64 {
    let mut c = if h % 2 == 0 { 1.0 } else { -1.0 };
    for l in 1..=h {
        c *= (2 * l) as f64 * (n as f64 - (2 * l - 1) as f64);
    }
    c
}

fn check_domain(s: &Paravector, x: &Paravector) -> Result<()> {
    if s.algebra() != x.algebra() {
        return Err(Error::DimensionMismatch {
            expected: s.algebra().to_string(),
            found: x.algebra().to_string(),
        });
    }
    let tol = 1e-12 * (1.0 + s.norm().max(x.norm()));
    if sphere_of(x).contains(s, tol) {
        return Err(Error::Domain(format!("s={s} lies on the sphere of x={x}")));
    }
    Ok(())
}

/// `s^2 - 2 Re(x) s + |x|^2`, a paravector in the plane of `s`.
pub fn pencil_form_ii(s: &Paravector, x: &Paravector) -> Paravector {
    (&s.square() - &s.scale(2.0 * x.re())).add_real(x.norm_sqr())
}

/// `x^2 - 2 Re(s) x + |s|^2`, a paravector in the plane of `x`.
pub fn pencil_form_i(s: &Paravector, x: &Paravector) -> Paravector {
    pencil_form_ii(x, s)
}

/// Left or right Cauchy kernel `S^{-1}(s, x)` in the requested form.
pub fn cauchy_kernel(side: Side, form: KernelForm, s: &Paravector, x: &Paravector) -> Result<Multivector> {
    check_domain(s, x)?;
    match form {
        KernelForm::FormI => {
            let q = pencil_form_i(s, x).inverse()?.to_mv();
            let lin = (x - &s.conj()).to_mv();
            Ok(match side {
                Side::Left => -&(&q * &lin),
                Side::Right => -&(&lin * &q),
            })
        }
        KernelForm::FormII => laplacian_power_kernel(side, 0, s, x),
    }
}

/// Closed form of `Δ^h` (in `x`) of the Cauchy kernel.
pub fn laplacian_power_kernel(side: Side, h: usize, s: &Paravector, x: &Paravector) -> Result<Multivector> {
    check_domain(s, x)?;
    let n = s.algebra().units();
    let c = laplacian_power_constant(n, h);
    let q = pencil_form_ii(s, x).inverse()?.powi(h as i32 + 1).to_mv();
    let lin = (s - &x.conj()).to_mv();
    Ok(match side {
        Side::Left => (&lin * &q).scale(c),
        Side::Right => (&q * &lin).scale(c),
    })
}

/// `F_n^L(s,x) = γ_n (s - x̄)(s^2 - 2Re(x)s + |x|^2)^{-(n+1)/2}`, or mirrored.
pub fn f_kernel(side: Side, s: &Paravector, x: &Paravector) -> Result<Multivector> {
    let n = s.algebra().units();
    gamma_constant(n)?;
    laplacian_power_kernel(side, (n - 1) / 2, s, x)
}

/// Side used for a function that may be intrinsic.
fn effective_side(f: &SliceFunction, side: Side) -> Result<Side> {
    if f.supports(side) {
        Ok(side)
    } else {
        Err(Error::Precondition(format!(
            "function is {}-sided but the {side} formula was requested",
            f.side()
        )))
    }
}

/// Quadrature value of a Cauchy-type integral together with the change
/// against the half-node rule.
#[derive(Debug, Clone)]
pub struct PointIntegral {
    pub value: Multivector,
    pub error_estimate: f64,
}

fn kernel_integral<K>(f: &SliceFunction, side: Side, contour: &Contour, kernel: K) -> Result<PointIntegral>
where
    K: Fn(&Paravector) -> Result<Multivector> + Sync,
{
    let side = effective_side(f, side)?;
    let q = integrate(contour, |node| {
        let k = kernel(&node.s)?;
        let fs = f.evaluate(&node.s)?;
        let w = node.weight.to_mv();
        Ok(match side {
            Side::Left => &(&k * &w) * &fs,
            Side::Right => &(&fs * &w) * &k,
        })
    })?;
    Ok(PointIntegral {
        error_estimate: q.error_estimate(),
        value: q.value,
    })
}

/// `(1/2π)∫ S_L^{-1}(s,x) ds_I f(s)` (left) or `(1/2π)∫ f(s) ds_I S_R^{-1}(s,x)`.
pub fn cauchy_formula_with_estimate(f: &SliceFunction, side: Side, x: &Paravector, contour: &Contour) -> Result<PointIntegral> {
    kernel_integral(f, side, contour, |s| cauchy_kernel(side, KernelForm::FormII, s, x))
}

/// Cauchy formula using the function's own side.
pub fn cauchy_formula(f: &SliceFunction, x: &Paravector, contour: &Contour) -> Result<Multivector> {
    Ok(cauchy_formula_with_estimate(f, f.side(), x, contour)?.value)
}

/// `(1/2π)∫ F_n^L(s,x) ds_I f(s)` (left) or mirrored; equals `Δ^{(n-1)/2} f(x)`
/// when `x` is enclosed.
pub fn fueter_sce_pointwise(side: Side, f: &SliceFunction, x: &Paravector, contour: &Contour) -> Result<Multivector> {
    gamma_constant(x.algebra().units())?;
    Ok(kernel_integral(f, side, contour, |s| f_kernel(side, s, x))?.value)
}

/// Reconstructs `f(u + I_x v)` from the values of `f` at `u ± I v`.
pub fn representation_formula(
    f: &SliceFunction,
    u: f64,
    v: f64,
    plane: &ImaginaryUnit,
    target: &ImaginaryUnit,
) -> Result<Multivector> {
    let alg = plane.algebra();
    let fp = f.evaluate(&embed_in_plane(u, v, plane))?;
    let fm = f.evaluate(&embed_in_plane(u, -v, plane))?;
    let one = Multivector::one(alg);
    let j = &target.to_mv() * &plane.to_mv();
    let minus = (&one - &j).scale(0.5);
    let plus = (&one + &j).scale(0.5);
    Ok(match f.side() {
        Side::Left => &(&minus * &fp) + &(&plus * &fm),
        Side::Right => {
            let jr = &plane.to_mv() * &target.to_mv();
            let minus = (&one - &jr).scale(0.5);
            let plus = (&one + &jr).scale(0.5);
            &(&fp * &minus) + &(&fm * &plus)
        }
    })
}

/// Central-difference partial derivative of `g` at `x` along coordinate `i`
/// (0 is the real part).
fn partial<G>(g: &G, x: &Paravector, i: usize, step: f64) -> Result<Multivector>
where
    G: Fn(&Paravector) -> Result<Multivector> + ?Sized,
{
    let shift = |delta: f64| {
        let mut p = x.parts().to_vec();
        p[i] += delta;
        Paravector::new(x.algebra(), p)
    };
    let fwd = g(&shift(step)?)?;
    let bwd = g(&shift(-step)?)?;
    Ok((&fwd - &bwd).scale(0.5 / step))
}

/// Norm of the central-difference Dirac operator `∂_0 g + Σ e_i ∂_i g`
/// (left, units multiply from the left) or `∂_0 g + Σ ∂_i g e_i` (right).
pub fn fd_dirac_residual<G>(g: &G, x: &Paravector, step: f64, side: Side) -> Result<f64>
where
    G: Fn(&Paravector) -> Result<Multivector> + ?Sized,
{
    let alg = x.algebra();
    let mut acc = partial(g, x, 0, step)?;
    for i in 1..=alg.units() {
        let d = partial(g, x, i, step)?;
        let e = Multivector::unit(alg, i);
        acc += &match side {
            Side::Left => &e * &d,
            Side::Right => &d * &e,
        };
    }
    Ok(acc.norm())
}

/// Norm of the slice Cauchy-Riemann residual `∂_u g + I ∂_v g` (left) or
/// `∂_u g + ∂_v g I` (right) at `u + I v`.
pub fn fd_cr_residual<G>(g: &G, u: f64, v: f64, plane: &ImaginaryUnit, side: Side, step: f64) -> Result<f64>
where
    G: Fn(&Paravector) -> Result<Multivector> + ?Sized,
{
    let du = (&g(&embed_in_plane(u + step, v, plane))? - &g(&embed_in_plane(u - step, v, plane))?).scale(0.5 / step);
    let dv = (&g(&embed_in_plane(u, v + step, plane))? - &g(&embed_in_plane(u, v - step, plane))?).scale(0.5 / step);
    let i = plane.to_mv();
    let r = match side {
        Side::Left => &du + &(&i * &dv),
        Side::Right => &du + &(&dv * &i),
    };
    Ok(r.norm())
}

/// Central-difference Laplacian over all `n+1` coordinates of `x`.
pub fn fd_laplacian<G>(g: &G, x: &Paravector, step: f64) -> Result<Multivector>
where
    G: Fn(&Paravector) -> Result<Multivector> + ?Sized,
{
    let alg = x.algebra();
    let center = g(x)?;
    let mut acc = Multivector::zero(alg);
    for i in 0..=alg.units() {
        let shift = |delta: f64| {
            let mut p = x.parts().to_vec();
            p[i] += delta;
            Paravector::new(alg, p)
        };
        let fwd = g(&shift(step)?)?;
        let bwd = g(&shift(-step)?)?;
        acc += &(&(&fwd + &bwd) - &center.scale(2.0));
    }
    Ok(acc.scale(1.0 / (step * step)))
}

/// `Δ^h g` by iterating [`fd_laplacian`].
pub fn fd_laplacian_power<G>(g: &G, h: usize, x: &Paravector, step: f64) -> Result<Multivector>
where
    G: Fn(&Paravector) -> Result<Multivector> + Sync + ?Sized,
{
    if h == 0 {
        return g(x);
    }
    let inner = |y: &Paravector| fd_laplacian_power(g, h - 1, y, step);
    fd_laplacian(&inner, x, step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg3() -> Algebra {
        Algebra::clifford(3).unwrap()
    }

    fn pv(alg: Algebra, p: &[f64]) -> Paravector {
        Paravector::new(alg, p.to_vec()).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_constant(1).unwrap(), 1.0);
        assert_eq!(gamma_constant(3).unwrap(), -4.0);
        assert_eq!(gamma_constant(5).unwrap(), 64.0);
        assert_eq!(gamma_constant(7).unwrap(), -2304.0);
        assert!(matches!(gamma_constant(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn coefficient_order() {
        let alg = alg3();
        let e1 = Multivector::unit(alg, 1);
        let e2 = pv(alg, &[0.0, 0.0, 1.0, 0.0]);
        let coeffs = vec![Multivector::zero(alg), e1.clone()];
        let left = SliceFunction::Polynomial { side: Side::Left, coeffs: coeffs.clone() };
        let right = SliceFunction::Polynomial { side: Side::Right, coeffs };
        assert_eq!(left.evaluate(&e2).unwrap(), &e2.to_mv() * &e1);
        assert_eq!(right.evaluate(&e2).unwrap(), &e1 * &e2.to_mv());
    }

    #[test]
    fn evaluate_square() {
        let alg = alg3();
        let f = SliceFunction::Polynomial {
            side: Side::Left,
            coeffs: vec![Multivector::zero(alg), Multivector::zero(alg), Multivector::one(alg)],
        };
        let v = f.evaluate(&pv(alg, &[1.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(v, pv(alg, &[0.0, 2.0, 0.0, 0.0]).to_mv());
        assert_eq!(SliceFunction::monomial(2).evaluate(&pv(alg, &[1.0, 1.0, 0.0, 0.0])).unwrap(), v);
    }

    #[test]
    fn kernel_at_zero_is_inverse() {
        let alg = alg3();
        let s = pv(alg, &[0.3, -1.0, 0.5, 2.0]);
        let x = Paravector::real(alg, 0.0);
        let k = cauchy_kernel(Side::Left, KernelForm::FormII, &s, &x).unwrap();
        assert!(k.is_close(&s.inverse().unwrap().to_mv(), 1e-14));
    }

    #[test]
    fn real_kernel_is_scalar_cauchy_kernel() {
        let alg = alg3();
        let s = Paravector::real(alg, 2.0);
        let x = Paravector::real(alg, -0.5);
        for side in [Side::Left, Side::Right] {
            for form in [KernelForm::FormI, KernelForm::FormII] {
                let k = cauchy_kernel(side, form, &s, &x).unwrap();
                assert!(k.is_close(&Multivector::scalar(alg, 1.0 / 2.5), 1e-15));
            }
        }
    }

    #[test]
    fn kernel_domain_error() {
        let alg = alg3();
        let x = pv(alg, &[1.0, 0.0, 2.0, 0.0]);
        let s = pv(alg, &[1.0, 2.0, 0.0, 0.0]);
        assert!(matches!(
            cauchy_kernel(Side::Left, KernelForm::FormI, &s, &x),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn right_h1_example() {
        let alg = alg3();
        let s = pv(alg, &[0.5, 1.0, -0.3, 0.2]);
        let x = pv(alg, &[-0.2, 0.1, 0.7, -0.4]);
        let q = pencil_form_ii(&s, &x).inverse().unwrap();
        let q2 = (&q.to_mv() * &q.to_mv()).scale(-2.0 * 2.0);
        let want = &q2 * &(&s - &x.conj()).to_mv();
        let got = laplacian_power_kernel(Side::Right, 1, &s, &x).unwrap();
        assert!(got.is_close(&want, 1e-14));
    }

    #[test]
    fn f_kernel_n3() {
        let alg = alg3();
        let s = Paravector::real(alg, 1.0);
        let x = Paravector::real(alg, 0.0);
        let k = f_kernel(Side::Left, &s, &x).unwrap();
        assert!(k.is_close(&Multivector::scalar(alg, -4.0), 1e-15));
        let even = Paravector::real(Algebra::clifford(2).unwrap(), 1.0);
        assert!(f_kernel(Side::Left, &even, &even.add_real(1.0)).is_err());
    }

    #[test]
    fn dirac_of_identity_is_one_minus_n() {
        let alg = alg3();
        let x = pv(alg, &[0.1, 0.2, 0.3, 0.4]);
        let r = fd_dirac_residual(&|y: &Paravector| Ok(y.to_mv()), &x, 1e-3, Side::Left).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
        let c = fd_dirac_residual(&|_: &Paravector| Ok(Multivector::one(alg)), &x, 1e-3, Side::Left).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn cr_residual_of_conjugate_is_two() {
        let alg = alg3();
        let i = ImaginaryUnit::normalized(alg, vec![1.0, 1.0, 0.0]).unwrap();
        let r = fd_cr_residual(&|y: &Paravector| Ok(y.conj().to_mv()), 0.3, 0.7, &i, Side::Left, 1e-3).unwrap();
        assert!((r - 2.0).abs() < 1e-9);
        let f = SliceFunction::monomial(4);
        let r = fd_cr_residual(&|y: &Paravector| f.evaluate(y), 0.3, 0.7, &i, Side::Right, 1e-4).unwrap();
        assert!(r < 1e-6);
    }

    #[test]
    fn representation_collapses() {
        let alg = alg3();
        let f = SliceFunction::Polynomial {
            side: Side::Left,
            coeffs: vec![Multivector::basis(alg, 3), Multivector::unit(alg, 2), Multivector::basis(alg, 6)],
        };
        let i = ImaginaryUnit::basis(alg, 1);
        let same = representation_formula(&f, 0.4, 1.1, &i, &i).unwrap();
        assert!(same.is_close(&f.evaluate(&embed_in_plane(0.4, 1.1, &i)).unwrap(), 1e-14));
        let j = ImaginaryUnit::basis(alg, 3);
        let real = representation_formula(&f, 0.4, 0.0, &i, &j).unwrap();
        assert!(real.is_close(&f.evaluate(&Paravector::real(alg, 0.4)).unwrap(), 1e-14));
    }

    #[test]
    fn rational_pole_detected() {
        let alg = alg3();
        let f = SliceFunction::IntrinsicRational {
            num: vec![1.0],
            den: vec![1.0, 0.0, 1.0],
        };
        let at_pole = pv(alg, &[0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(f.evaluate(&at_pole), Err(Error::Pole(_))));
        let mut poles = f.poles();
        poles.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((poles[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((poles[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }
}
