//! Sparse multivariate polynomials over the rationals and symmetric matrices
//! of them.

mod matpoly;
mod poly;

pub use matpoly::MatPoly;
pub use poly::{NamedPoly, Poly};
pub(crate) use poly::PowerTable;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::exactalg::ExactError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("degree {degree} exceeds the target degree {target}")]
    DegreeOverflow { degree: u32, target: u32 },
    #[error("expected {expected} substitution forms, got {got}")]
    FormCount { expected: usize, got: usize },
    #[error("matrix polynomial is not symmetric at entry ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix polynomial shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Exponent vector of a monomial.
///
/// Ordered graded lexicographically: lower total degree first, and within a
/// degree larger exponents on earlier variables first (`x² < xy < y²`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / x_i`, if `x_i` divides it.
    pub fn div_var(&self, i: usize) -> Option<Monomial> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(Monomial(e))
    }

    /// `α! = α_1!·…·α_n!`
    pub fn factorial(&self) -> num_bigint::BigUint {
        self.0.iter().map(|&a| factorial(a)).product()
    }
}

pub(crate) fn factorial(n: u32) -> num_bigint::BigUint {
    (1..=n).map(num_bigint::BigUint::from).product()
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let mut ms = vec![
            Monomial::new(vec![0, 2]),
            Monomial::new(vec![1, 0]),
            Monomial::new(vec![1, 1]),
            Monomial::new(vec![0, 0]),
            Monomial::new(vec![2, 0]),
            Monomial::new(vec![0, 1]),
        ];
        ms.sort();
        let exps: Vec<_> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(
            exps,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
    }

    #[test]
    fn multi_factorial() {
        assert_eq!(Monomial::new(vec![3, 0, 2]).factorial(), 12u32.into());
    }
}
