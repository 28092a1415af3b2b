//! Text format for slice functions.
//!
//! ```text
//! function  = poly | rational ;
//! poly      = "poly" , side , "[" , coeff , { ";" , coeff } , "]" ;
//! side      = "left" | "right" ;
//! coeff     = number | term , { "," , term } ;
//! term      = blade , ":" , number ;
//! rational  = "rational" , "[" , reals , "]" , "/" , "[" , reals , "]" ;
//! reals     = number , { ( "," | ";" ) , number } ;
//! ```
//!
//! Coefficients are listed by ascending power. Blades are labels such as
//! `1`, `e1`, `e23` (Clifford) or `1`, `i`, `j`, `k` (quaternions).

use crate::algebra::{Algebra, Multivector};
use crate::error::{Error, Result};
use crate::slice::{Side, SliceFunction};

fn parse_number(tok: &str) -> Result<f64> {
    let tok = tok.trim();
    let x: f64 = tok.parse().map_err(|_| Error::Parse(format!("'{tok}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("'{tok}' is not finite")));
    }
    Ok(x)
}

/// Returns the contents of the leading `[...]` and the remainder.
fn bracketed(text: &str) -> Result<(&str, &str)> {
    let text = text.trim_start();
    let rest = text
        .strip_prefix('[')
        .ok_or_else(|| Error::Parse(format!("expected '[' at '{text}'")))?;
    let close = rest.find(']').ok_or_else(|| Error::Parse("missing ']'".into()))?;
    Ok((&rest[..close], &rest[close + 1..]))
}

fn parse_coeff(alg: Algebra, text: &str) -> Result<Multivector> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty coefficient".into()));
    }
    if !text.contains(':') {
        return Ok(Multivector::scalar(alg, parse_number(text)?));
    }
    let mut m = Multivector::zero(alg);
    for term in text.split(',') {
        let (blade, value) = term
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected blade:value, got '{}'", term.trim())))?;
        let idx = alg.parse_basis_label(blade.trim())?;
        m += &Multivector::basis(alg, idx).scale(parse_number(value)?);
    }
    Ok(m)
}

fn parse_reals(text: &str) -> Result<Vec<f64>> {
    let v = text
        .split([',', ';'])
        .map(parse_number)
        .collect::<Result<Vec<f64>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    Ok(v)
}

/// Parses a function in the format above for the given algebra.
pub fn parse_function(text: &str, alg: Algebra) -> Result<SliceFunction> {
    let text = text.trim();
    let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    match head {
        "poly" => {
            let rest = rest.trim_start();
            let cut = rest.find(|c: char| c.is_whitespace() || c == '[').unwrap_or(rest.len());
            let (side_word, rest) = rest.split_at(cut);
            let side = match side_word {
                "left" => Side::Left,
                "right" => Side::Right,
                other => return Err(Error::Parse(format!("expected 'left' or 'right', got '{other}'"))),
            };
            let (body, tail) = bracketed(rest)?;
            if !tail.trim().is_empty() {
                return Err(Error::Parse(format!("unexpected trailing input '{}'", tail.trim())));
            }
            let coeffs = body.split(';').map(|c| parse_coeff(alg, c)).collect::<Result<Vec<_>>>()?;
            Ok(SliceFunction::Polynomial { side, coeffs })
        }
        "rational" => {
            let (num, rest) = bracketed(rest)?;
            let rest = rest
                .trim_start()
                .strip_prefix('/')
                .ok_or_else(|| Error::Parse("expected '/' between numerator and denominator".into()))?;
            let (den, tail) = bracketed(rest)?;
            if !tail.trim().is_empty() {
                return Err(Error::Parse(format!("unexpected trailing input '{}'", tail.trim())));
            }
            let num = parse_reals(num)?;
            let den = parse_reals(den)?;
            if den.iter().all(|&c| c == 0.0) {
                return Err(Error::Parse("denominator is identically zero".into()));
            }
            Ok(SliceFunction::IntrinsicRational { num, den })
        }
        other => Err(Error::Parse(format!("expected 'poly' or 'rational', got '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Paravector;

    #[test]
    fn real_polynomial() {
        let alg = Algebra::clifford(3).unwrap();
        let f = parse_function("poly left [0;0;1]", alg).unwrap();
        let s = Paravector::new(alg, vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        let v = f.evaluate(&s).unwrap();
        assert!((v.scalar_part() + 3.0).abs() < 1e-15);
        assert!((v.coeff(alg.unit_index(1)) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn blade_coefficients() {
        let alg = Algebra::clifford(3).unwrap();
        let f = parse_function("poly right [ 1 ; e1:2, e23:-0.5 ]", alg).unwrap();
        match f {
            SliceFunction::Polynomial { side, coeffs } => {
                assert_eq!(side, Side::Right);
                assert_eq!(coeffs.len(), 2);
                assert_eq!(coeffs[1].coeff(alg.parse_basis_label("e23").unwrap()), -0.5);
            }
            _ => panic!("expected a polynomial"),
        }
        let q = parse_function("poly left [i:1, k:2]", Algebra::Quaternion).unwrap();
        assert_eq!(q.side(), Side::Left);
    }

    #[test]
    fn rational() {
        let f = parse_function("rational [1, 0, 1] / [4; 0; 1]", Algebra::Quaternion).unwrap();
        assert!(f.is_intrinsic());
        assert_eq!(f.poles().len(), 2);
    }

    #[test]
    fn malformed_inputs() {
        let alg = Algebra::clifford(3).unwrap();
        for bad in [
            "",
            "poly up [1]",
            "poly left 1",
            "poly left [1;]",
            "poly left [e9:1]",
            "poly left [1] x",
            "rational [1] [1]",
            "rational [1] / [0]",
            "poly left [nan]",
            "series [1]",
        ] {
            assert!(matches!(parse_function(bad, alg), Err(Error::Parse(_)) | Err(Error::Domain(_))), "{bad}");
        }
    }
}
