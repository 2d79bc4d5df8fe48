use super::*;
use crate::exactalg::{rat, rat_int};
use crate::examples;

fn interval_vertices() -> Vec<Vec<Rat>> {
    vec![vec![rat_int(0)], vec![rat_int(1)]]
}

#[test]
fn interval_matrix_certifies_and_verifies() {
    let f = examples::interval_matrix();
    let cert = certify(&f, &examples::unit_interval(), &CertifyConfig::default()).unwrap();
    assert!(cert.n <= 30, "N = {}", cert.n);
    assert_eq!(cert.report.used_n, cert.n);
    verify_certificate(&cert, &f).unwrap();
    let sos = to_schmudgen(&cert).unwrap();
    verify_sos(&sos, &f).unwrap();
}

#[test]
fn constant_matrix_gives_single_term() {
    let a = RatMatrix::from_i64(&[&[2, 0], &[0, 2]]);
    let f = MatPoly::from_coefficients(2, 2, [(&Monomial::one(2), &a)]).unwrap();
    let cert = certify(&f, &examples::square(), &CertifyConfig::default()).unwrap();
    assert_eq!(cert.terms.len(), 1);
    assert_eq!(cert.terms[0].alpha, Monomial::one(4));
    assert_eq!(cert.terms[0].matrix, a);
    verify_certificate(&cert, &f).unwrap();
    let sos = to_schmudgen(&cert).unwrap();
    assert_eq!(sos.buckets.len(), 1);
    verify_sos(&sos, &f).unwrap();

    let bad = MatPoly::scalar_identity(1, &Poly::constant(2, rat_int(-1)));
    assert!(matches!(
        certify(&bad, &examples::square(), &CertifyConfig::default()),
        Err(CertifyError::NotPositiveDefinite { .. })
    ));
}

#[test]
fn simplex_linear_entry_needs_no_expansion() {
    let s = barycentric_coords(&interval_vertices()).unwrap();
    let f = MatPoly::scalar_identity(1, &Poly::affine(rat_int(1), &[rat_int(1)]));
    let cert = certify_simplex(&f, &s, &CertifyConfig::default()).unwrap();
    assert_eq!(cert.n, 0);
    let terms: Vec<(Vec<u32>, RatMatrix)> = cert
        .terms
        .iter()
        .map(|t| (t.alpha.exponents().to_vec(), t.matrix.clone()))
        .collect();
    assert_eq!(
        terms,
        vec![
            (vec![1, 0], RatMatrix::from_i64(&[&[1]])),
            (vec![0, 1], RatMatrix::from_i64(&[&[2]])),
        ]
    );
    verify_certificate(&cert, &f).unwrap();
}

#[test]
fn simplex_matrix_certifies() {
    let s = barycentric_coords(&interval_vertices()).unwrap();
    let f = examples::interval_matrix();
    let cert = certify_simplex(&f, &s, &CertifyConfig::default()).unwrap();
    verify_certificate(&cert, &f).unwrap();
    verify_sos(&to_schmudgen(&cert).unwrap(), &f).unwrap();
}

#[test]
fn tampering_is_detected() {
    let f = examples::interval_matrix();
    let cert = certify(&f, &examples::unit_interval(), &CertifyConfig::default()).unwrap();

    let mut bumped = cert.clone();
    let a = &mut bumped.terms[0].matrix;
    let v = a.get(0, 0) + rat_int(1);
    a.set(0, 0, v);
    assert!(matches!(
        verify_certificate(&bumped, &f),
        Err(VerifyError::Mismatch { .. })
    ));

    let mut flipped = cert.clone();
    flipped.terms[0].matrix = flipped.terms[0].matrix.neg();
    assert!(matches!(
        verify_certificate(&flipped, &f),
        Err(VerifyError::NotPositiveDefinite { .. })
    ));

    let other = MatPoly::scalar_identity(2, &Poly::constant(1, rat_int(3)));
    assert!(verify_certificate(&cert, &other).is_err());

    let mut rescaled = cert;
    rescaled.scaling[0] = rat_int(7);
    assert!(matches!(
        verify_certificate(&rescaled, &f),
        Err(VerifyError::Form { index: 0 })
    ));
}

#[test]
fn vertex_failure_is_reported_with_witness() {
    // 1 - 2x is negative at the vertex x = 1 of [0, 1].
    let f = MatPoly::scalar_identity(1, &Poly::affine(rat_int(1), &[rat_int(-2)]));
    let err = certify(&f, &examples::unit_interval(), &CertifyConfig::default()).unwrap_err();
    assert!(matches!(err, CertifyError::NotPositiveDefinite { witness: Some(_) }), "{err}");
    assert!(err.to_string().contains("not positive definite on P"));
}

#[test]
fn escalation_recovers_from_small_shift() {
    let config = CertifyConfig {
        fixed_c: Some(rat(1, 8)),
        ..CertifyConfig::default()
    };
    let f = examples::interval_matrix();
    let cert = certify(&f, &examples::unit_interval(), &config).unwrap();
    verify_certificate(&cert, &f).unwrap();
}

#[test]
fn certificate_file_round_trip() {
    let f = examples::interval_matrix();
    let cert = certify(&f, &examples::unit_interval(), &CertifyConfig::default()).unwrap();
    let text = write_certificate(&cert);
    assert!(text.starts_with("{\n  \"version\": 1,"));
    let back = read_certificate(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(write_certificate(&back), text);

    let sos = to_schmudgen(&cert).unwrap();
    let sos_back = read_sos(&write_sos(&sos)).unwrap();
    assert_eq!(sos_back, sos);
}

#[test]
fn identity_term_goes_to_odd_bucket() {
    let mut cert = certify(
        &MatPoly::scalar_identity(2, &Poly::one(1)),
        &examples::unit_interval(),
        &CertifyConfig::default(),
    )
    .unwrap();
    cert.terms = vec![CertTerm {
        alpha: Monomial::new(vec![2, 1]),
        matrix: RatMatrix::identity(2),
    }];
    cert.degree = 3;
    let sos = to_schmudgen(&cert).unwrap();
    assert_eq!(sos.buckets.len(), 1);
    assert_eq!(sos.buckets[0].parity, Monomial::new(vec![0, 1]));
    let factor = &sos.buckets[0].factors[0];
    assert_eq!(factor.half, Monomial::new(vec![1, 0]));
    assert_eq!(factor.d, vec![rat_int(1), rat_int(1)]);
    assert_eq!(factor.u, RatMatrix::identity(2));
}

#[test]
fn inspect_reports_relations_and_bounds() {
    let f = examples::square_matrix();
    let info = inspect(&f, &examples::square(), &CertifyConfig::default()).unwrap();
    assert_eq!(info.relations, vec!["y1 + y2 - 1/2", "y3 + y4 - 1/2"]);
    assert_eq!(info.report.c, rat_int(17));
    assert_eq!(info.report.polya_c, Some(rat(87, 2)));
    assert_eq!(info.report.theorem_n, Some(167));
}

#[test]
fn certificate_matrix_reproduces_input() {
    let f = examples::interval_matrix();
    let cert = certify(&f, &examples::unit_interval(), &CertifyConfig::default()).unwrap();
    assert_eq!(certificate_matrix(&cert).unwrap(), f);
}

#[test]
fn simplex_inspection_reports_bounds() {
    let s = barycentric_coords(&interval_vertices()).unwrap();
    let report = inspect_simplex(&examples::interval_matrix(), &s, &CertifyConfig::default()).unwrap();
    assert_eq!(report.d, 2);
    assert!(report.lambda_sampled.unwrap() > 0.0);
    assert!(report.theorem_n.is_some());
}
