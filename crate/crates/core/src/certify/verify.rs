//! Independent check of a certificate: uses only exact arithmetic and
//! polynomial expansion, never the code that produced it.

use rayon::prelude::*;
use thiserror::Error;

use super::HandelmanCertificate;
use crate::exactalg::{format_rat, leading_minor_failure, Rat};
use crate::polyring::{MatPoly, Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("certificate shape: {0}")]
    Shape(String),
    #[error("scaling constant {index} is not positive")]
    Scaling { index: usize },
    #[error("form {index} is not the scaled polyhedron form")]
    Form { index: usize },
    #[error("term {alpha} has degree {found}, expected {expected}")]
    Degree {
        alpha: Monomial,
        found: u32,
        expected: u64,
    },
    #[error("coefficient at {alpha} is not positive definite (leading minor {minor})")]
    NotPositiveDefinite { alpha: Monomial, minor: usize },
    #[error("coefficient at {alpha} is not symmetric")]
    NotSymmetric { alpha: Monomial },
    #[error("expansion differs from F at entry ({row}, {col}), monomial {monomial}: expected {expected}, found {found}")]
    Mismatch {
        row: usize,
        col: usize,
        monomial: Monomial,
        expected: String,
        found: String,
    },
}

/// Checks that `forms[i] = scaling[i]·ℓ_i` for the stored polyhedron.
pub(super) fn check_forms(
    polyhedron_forms: &[Poly],
    scaling: &[Rat],
    forms: &[Poly],
) -> Result<(), VerifyError> {
    if scaling.len() != polyhedron_forms.len() || forms.len() != polyhedron_forms.len() {
        return Err(VerifyError::Shape(format!(
            "{} forms, {} scaling constants, {} polyhedron forms",
            forms.len(),
            scaling.len(),
            polyhedron_forms.len()
        )));
    }
    for (index, ((l, s), base)) in forms.iter().zip(scaling).zip(polyhedron_forms).enumerate() {
        if *s <= Rat::from_integer(0.into()) {
            return Err(VerifyError::Scaling { index });
        }
        if *l != base.scale(s) {
            return Err(VerifyError::Form { index });
        }
    }
    Ok(())
}

/// Substitutes the forms into `Σ_α Y^α·F_α` and compares with `f` entry by
/// entry.
pub(super) fn compare_expansion(sum_y: &MatPoly, forms: &[Poly], f: &MatPoly) -> Result<(), VerifyError> {
    let t = f.size();
    let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (i..t).map(move |j| (i, j))).collect();
    let mismatch = pairs
        .par_iter()
        .map(|&(i, j)| {
            let got = sum_y
                .entry(i, j)
                .substitute_linear(forms)
                .map_err(|e| VerifyError::Shape(e.to_string()))?;
            let want = f.entry(i, j);
            let diff = &got - want;
            let first = diff.terms().next().map(|(m, _)| m.clone());
            match first {
                None => Ok(()),
                Some(m) => Err(VerifyError::Mismatch {
                    row: i,
                    col: j,
                    expected: format_rat(&want.coeff(&m)),
                    found: format_rat(&got.coeff(&m)),
                    monomial: m,
                }),
            }
        })
        .collect::<Vec<_>>();
    mismatch.into_iter().collect()
}

/// The matrix `Σ_α F_α·L^α` a certificate represents, expanded in `X`.
pub fn certificate_matrix(cert: &HandelmanCertificate) -> Result<MatPoly, VerifyError> {
    check_forms(cert.polyhedron.forms(), &cert.scaling, &cert.forms)?;
    let sum_y = MatPoly::from_coefficients(
        cert.t,
        cert.forms.len(),
        cert.terms.iter().map(|term| (&term.alpha, &term.matrix)),
    )
    .map_err(|e| VerifyError::Shape(e.to_string()))?;
    sum_y
        .substitute_linear(&cert.forms)
        .map_err(|e| VerifyError::Shape(e.to_string()))
}

/// Re-checks every coefficient for exact positive definiteness and expands
/// `Σ_α F_α·L^α` symbolically, requiring exact equality with `f`.
pub fn verify_certificate(cert: &HandelmanCertificate, f: &MatPoly) -> Result<(), VerifyError> {
    let n = cert.polyhedron.dim();
    let m = cert.forms.len();
    if f.nvars() != n {
        return Err(VerifyError::Shape(format!(
            "F has {} variables, the polyhedron {n}",
            f.nvars()
        )));
    }
    if f.size() != cert.t {
        return Err(VerifyError::Shape(format!(
            "F is {0}x{0}, the certificate {1}x{1}",
            f.size(),
            cert.t
        )));
    }
    if cert.terms.is_empty() {
        return Err(VerifyError::Shape("certificate has no terms".into()));
    }
    check_forms(cert.polyhedron.forms(), &cert.scaling, &cert.forms)?;
    if let Some(form) = cert.forms.iter().find(|l| l.nvars() != n || l.degree() > 1) {
        return Err(VerifyError::Shape(format!("form {form} is not affine in {n} variables")));
    }
    for term in &cert.terms {
        if term.alpha.nvars() != m {
            return Err(VerifyError::Shape(format!(
                "term {} has {} slots, expected {m}",
                term.alpha,
                term.alpha.nvars()
            )));
        }
        if term.alpha.degree() as u64 != cert.degree {
            return Err(VerifyError::Degree {
                alpha: term.alpha.clone(),
                found: term.alpha.degree(),
                expected: cert.degree,
            });
        }
        if term.matrix.rows() != cert.t || term.matrix.cols() != cert.t {
            return Err(VerifyError::Shape(format!("term {} has the wrong size", term.alpha)));
        }
    }

    cert.terms
        .par_iter()
        .map(|term| match leading_minor_failure(&term.matrix) {
            Ok(None) => Ok(()),
            Ok(Some(minor)) => Err(VerifyError::NotPositiveDefinite {
                alpha: term.alpha.clone(),
                minor,
            }),
            Err(_) => Err(VerifyError::NotSymmetric {
                alpha: term.alpha.clone(),
            }),
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<(), _>>()?;

    let sum_y = MatPoly::from_coefficients(
        cert.t,
        m,
        cert.terms.iter().map(|term| (&term.alpha, &term.matrix)),
    )
    .map_err(|e| VerifyError::Shape(e.to_string()))?;
    compare_expansion(&sum_y, &cert.forms, f)
}
