//! Exact rational scalars and small dense matrices.
//!
//! Everything here works over arbitrary-precision rationals. The only place
//! floating point enters is [`spectral_norm_upper`], which uses a numeric
//! eigensolver to propose a bound and then certifies it exactly.

mod definite;
mod linsolve;
mod lp;
mod matrix;

pub use definite::{
    gershgorin_bound, is_positive_definite, is_positive_semidefinite, ldl_decompose, leading_minor_failure,
    leading_minor_failure_int, spectral_norm_upper,
};
pub use linsolve::{min_norm_solution, nullspace, rank, rref, solve_linear, LinearSolution};
pub use lp::{positive_combination, LinearProgram, LpOutcome};
pub use matrix::RatMatrix;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite (leading minor {minor} is not positive)")]
    NotPositiveDefinite { minor: usize },
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
}

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, `p`, or a plain decimal such as `1.5294`.
pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let bad = || ExactError::BadRational(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let mag = Rat::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(p))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Smallest multiple of `1/denom` that is `>= x`. `x` must be finite.
pub fn rat_ceil_f64(x: f64, denom: u64) -> Rat {
    let exact = Rat::from_float(x).expect("finite float");
    let d = BigInt::from(denom);
    let scaled = (exact * Rat::from_integer(d.clone())).ceil();
    scaled / Rat::from_integer(d)
}

/// Nearest multiple of `1/denom` to `x`. `x` must be finite.
pub fn rat_round_f64(x: f64, denom: u64) -> Rat {
    let exact = Rat::from_float(x).expect("finite float");
    let d = BigInt::from(denom);
    let scaled = (exact * Rat::from_integer(d.clone())).round();
    scaled / Rat::from_integer(d)
}

/// Largest multiple of `1/denom` that is `<= x`. `x` must be finite.
pub fn rat_floor_f64(x: f64, denom: u64) -> Rat {
    let exact = Rat::from_float(x).expect("finite float");
    let d = BigInt::from(denom);
    let scaled = (exact * Rat::from_integer(d.clone())).floor();
    scaled / Rat::from_integer(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "-3", "1/4", "-87/2"] {
            assert_eq!(format_rat(&parse_rat(s).unwrap()), s);
        }
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("1.5294").unwrap(), rat(15294, 10000));
        assert_eq!(parse_rat("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("1.").is_err());
    }

    #[test]
    fn float_rounding_brackets_value() {
        let x = 1.529_411_764_7;
        let lo = rat_floor_f64(x, 1_000_000);
        let hi = rat_ceil_f64(x, 1_000_000);
        assert!(rat_to_f64(&lo) <= x && x <= rat_to_f64(&hi));
        assert_eq!(&hi - &lo, rat(1, 1_000_000));
        assert_eq!(rat_ceil_f64(16.0, 1), rat_int(16));
    }
}
