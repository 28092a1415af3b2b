//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Smallest singular value.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().min()
}

/// Maximum absolute column sum.
pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖lhs - rhs‖₂ / max(1, ‖lhs‖₂, ‖rhs‖₂)`.
pub fn relative_residual(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) -> f64 {
    let diff = spectral_norm(&(lhs - rhs));
    diff / 1f64.max(spectral_norm(lhs)).max(spectral_norm(rhs))
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -0.5, 1.0]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
        assert!((min_singular_value(&m) - 0.5).abs() < 1e-14);
        assert_eq!(one_norm(&m), 3.0);
    }

    #[test]
    fn residual_is_relative_for_large_operands() {
        let a = DMatrix::from_element(2, 2, 1e6);
        let mut b = a.clone();
        b[(0, 0)] += 1.0;
        let r = relative_residual(&a, &b);
        assert!(r > 4e-7 && r < 6e-7, "{r}");
        let z = DMatrix::<f64>::zeros(2, 2);
        let mut w = z.clone();
        w[(1, 1)] = 1e-3;
        assert!((relative_residual(&z, &w) - 1e-3).abs() < 1e-15);
    }
}
