//! Sum of squares form `F = Σ_e (Σ GᵀG)·L^e` over parity vectors `e`.
//!
//! Each `F_α = Uᵀ·diag(d)·U` is factored without square roots, and
//! `L^α = (L^β)²·L^e` with `e = α mod 2`, `β = (α - e)/2`. The real factor
//! is `G = diag(√d)·U·L^β`; storing `(d, U, β)` keeps everything rational.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::verify::{check_forms, compare_expansion};
use super::{HandelmanCertificate, VerifyError};
use crate::exactalg::{ldl_decompose, ExactError, Rat, RatMatrix};
use crate::polyring::{MatPoly, Monomial, Poly};
use crate::polytope::HPolyhedron;

/// One square `GᵀG·L^{2β}` with `G = diag(√d)·U·L^β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareFactor {
    pub half: Monomial,
    #[serde(with = "crate::serial::rat_vec")]
    pub d: Vec<Rat>,
    pub u: RatMatrix,
}

/// All squares multiplied by the same `L^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SosBucket {
    pub parity: Monomial,
    pub factors: Vec<SquareFactor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SosCertificate {
    pub polyhedron: HPolyhedron,
    #[serde(with = "crate::serial::rat_vec")]
    pub scaling: Vec<Rat>,
    pub forms: Vec<Poly>,
    pub t: usize,
    /// Bound on the degree of every `GᵀG·L^e` in the forms.
    pub degree: u64,
    pub buckets: Vec<SosBucket>,
}

/// Regroups a certificate by parity of the exponents.
pub fn to_schmudgen(cert: &HandelmanCertificate) -> Result<SosCertificate, VerifyError> {
    let factored = cert
        .terms
        .par_iter()
        .map(|term| {
            let (d, u) = ldl_decompose(&term.matrix).map_err(|e| match e {
                ExactError::NotPositiveDefinite { minor } => VerifyError::NotPositiveDefinite {
                    alpha: term.alpha.clone(),
                    minor,
                },
                _ => VerifyError::NotSymmetric {
                    alpha: term.alpha.clone(),
                },
            })?;
            let parity: Vec<u32> = term.alpha.exponents().iter().map(|a| a % 2).collect();
            let half: Vec<u32> = term.alpha.exponents().iter().map(|a| a / 2).collect();
            Ok((Monomial::new(parity), SquareFactor { half: Monomial::new(half), d, u }))
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let mut buckets: BTreeMap<Monomial, Vec<SquareFactor>> = BTreeMap::new();
    for (parity, factor) in factored {
        buckets.entry(parity).or_default().push(factor);
    }
    Ok(SosCertificate {
        polyhedron: cert.polyhedron.clone(),
        scaling: cert.scaling.clone(),
        forms: cert.forms.clone(),
        t: cert.t,
        degree: cert.degree,
        buckets: buckets
            .into_iter()
            .map(|(parity, factors)| SosBucket { parity, factors })
            .collect(),
    })
}

fn check_factor(f: &SquareFactor, t: usize) -> Result<(), String> {
    if f.d.len() != t || f.u.rows() != t || f.u.cols() != t {
        return Err(format!("factor at {} has the wrong size", f.half));
    }
    if f.d.iter().any(|v| !v.is_positive()) {
        return Err(format!("factor at {} has a non-positive diagonal", f.half));
    }
    for i in 0..t {
        if !f.u.get(i, i).is_one() || (0..i).any(|j| !f.u.get(i, j).is_zero()) {
            return Err(format!("factor at {} is not unit upper triangular", f.half));
        }
    }
    Ok(())
}

/// Re-expands `Σ_e Σ Uᵀ·diag(d)·U·L^{2β+e}` and compares with `f` exactly.
pub fn verify_sos(sos: &SosCertificate, f: &MatPoly) -> Result<(), VerifyError> {
    let m = sos.forms.len();
    if f.size() != sos.t || f.nvars() != sos.polyhedron.dim() {
        return Err(VerifyError::Shape("F does not match the certificate".into()));
    }
    check_forms(sos.polyhedron.forms(), &sos.scaling, &sos.forms)?;
    let mut coeffs: BTreeMap<Monomial, RatMatrix> = BTreeMap::new();
    for bucket in &sos.buckets {
        if bucket.parity.nvars() != m || bucket.parity.exponents().iter().any(|&e| e > 1) {
            return Err(VerifyError::Shape(format!("bad parity vector {}", bucket.parity)));
        }
        for factor in &bucket.factors {
            check_factor(factor, sos.t).map_err(VerifyError::Shape)?;
            if factor.half.nvars() != m {
                return Err(VerifyError::Shape(format!("bad exponent {}", factor.half)));
            }
            let alpha = factor.half.mul(&factor.half).mul(&bucket.parity);
            if alpha.degree() as u64 > sos.degree {
                return Err(VerifyError::Degree {
                    alpha,
                    found: factor.half.degree() * 2 + bucket.parity.degree(),
                    expected: sos.degree,
                });
            }
            let prod = factor
                .u
                .transpose()
                .checked_mul(&RatMatrix::diagonal(&factor.d))
                .and_then(|a| a.checked_mul(&factor.u))
                .map_err(|e| VerifyError::Shape(e.to_string()))?;
            match coeffs.get_mut(&alpha) {
                Some(acc) => acc.add_assign(&prod),
                None => {
                    coeffs.insert(alpha, prod);
                }
            }
        }
    }
    let sum_y = MatPoly::from_coefficients(sos.t, m, coeffs.iter())
        .map_err(|e| VerifyError::Shape(e.to_string()))?;
    compare_expansion(&sum_y, &sos.forms, f)
}
