//! Building Handelman-type certificates: `F = Σ_α F_α·L^α` with every `F_α`
//! positive definite, plus their verification, conversion to a sum of
//! squares form, and file formats.

mod format;
mod sos;
mod verify;

pub use format::{
    read_certificate, read_problem, read_sos, write_certificate, write_problem, write_report, write_sos,
    FileError, FORMAT_VERSION,
};
pub use sos::{to_schmudgen, verify_sos, SosBucket, SosCertificate, SquareFactor};
pub use verify::{certificate_matrix, verify_certificate, VerifyError};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    choose_c, degree_bound, eigen_branch_minima, lambda_floor, min_eig_on_simplex,
    polya_constant, region_min_r, Attempt, BoundReport, BoundsError, SampledMin, SimplexSampler,
};
use crate::exactalg::{format_rat, is_positive_definite, Rat, RatMatrix};
use crate::lifts::{bernstein_bezier, shift_by_cr, shifted_degree, LiftContext, LiftError};
use crate::polya::{find_minimal_n, Limits, PolyaError, PolyaExpansion, Progress};
use crate::polyring::{MatPoly, Monomial, Poly, PolyError};
use crate::polytope::{
    barycentric_coords, describe_relations, normalize, validate_polytope, HPolyhedron,
    NormalizedPolyhedron, PolytopeError, Simplex,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("input is not positive definite on P{}", witness_note(.witness))]
    NotPositiveDefinite { witness: Option<Vec<Rat>> },
    #[error("no certificate found within caps after {rounds} escalation rounds; input may not be positive definite on P, or caps too small")]
    Exhausted { rounds: u32 },
    #[error(transparent)]
    Polya(PolyaError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

fn witness_note(w: &Option<Vec<Rat>>) -> String {
    match w {
        Some(x) => format!(
            " (not positive definite at x = ({}))",
            x.iter().map(format_rat).collect::<Vec<_>>().join(", ")
        ),
        None => String::new(),
    }
}

/// Knobs of the certification pipeline.
#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub resolution: u32,
    pub refine_rounds: u32,
    pub seed: u64,
    pub max_sample_points: usize,
    /// Extra relative margin on each spectral norm bound.
    pub inflation: Rat,
    /// Relative margin added to the shift threshold `-m1/m2`.
    pub c_margin: Rat,
    /// Relative amount the sampled eigenvalue floor is shrunk by.
    pub lambda_safety: Rat,
    /// Overrides the degree bound as the search cap.
    pub n_cap: Option<u64>,
    /// Search cap used when no degree bound is available.
    pub fallback_n_cap: u64,
    pub escalation_rounds: u32,
    /// Uses this shift instead of estimating one.
    pub fixed_c: Option<Rat>,
    pub limits: Limits,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            resolution: 24,
            refine_rounds: 3,
            seed: 0,
            max_sample_points: 200_000,
            inflation: Rat::zero(),
            c_margin: Rat::new(1.into(), 100.into()),
            lambda_safety: Rat::new(1.into(), 1000.into()),
            n_cap: None,
            fallback_n_cap: 64,
            escalation_rounds: 6,
            fixed_c: None,
            limits: Limits::default(),
        }
    }
}

impl CertifyConfig {
    fn sampler(&self, m: usize) -> SimplexSampler {
        SimplexSampler {
            m,
            base_resolution: self.resolution,
            refine_rounds: self.refine_rounds,
            seed: self.seed,
            max_points: self.max_sample_points,
        }
    }
}

/// Where a problem lives: an H-polyhedron or a simplex given by vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Polyhedron(HPolyhedron),
    Simplex(Vec<Vec<Rat>>),
}

/// A matrix polynomial together with the set it should be positive on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub domain: Domain,
    pub matrix: MatPoly,
}

impl Problem {
    /// Runs [`certify`] or [`certify_simplex`] as appropriate.
    pub fn certify(
        &self,
        config: &CertifyConfig,
        progress: &mut dyn FnMut(&Progress),
    ) -> Result<HandelmanCertificate, CertifyError> {
        match &self.domain {
            Domain::Polyhedron(p) => certify_with(&self.matrix, p, config, progress),
            Domain::Simplex(v) => {
                let s = barycentric_coords(v)?;
                certify_simplex_with(&self.matrix, &s, config, progress)
            }
        }
    }
}

/// One coefficient `F_α` of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertTerm {
    pub alpha: Monomial,
    pub matrix: RatMatrix,
}

/// `F = Σ_α F_α·L^α`, with `L_i = scaling[i]·ℓ_i` for the polyhedron's
/// forms `ℓ_i`, and every `F_α` positive definite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandelmanCertificate {
    pub polyhedron: HPolyhedron,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_points")]
    pub vertices: Option<Vec<Vec<Rat>>>,
    #[serde(with = "crate::serial::rat_vec")]
    pub scaling: Vec<Rat>,
    pub forms: Vec<Poly>,
    pub t: usize,
    /// Power of `Σ L_i` used in the expansion.
    pub n: u64,
    /// Common degree `|α|` of all terms.
    pub degree: u64,
    pub terms: Vec<CertTerm>,
    pub report: BoundReport,
}

mod opt_points {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exactalg::{format_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Vec<Rat>>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|pts| {
                pts.iter()
                    .map(|p| p.iter().map(format_rat).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Vec<Rat>>>, D::Error> {
        let raw = Option::<Vec<Vec<String>>>::deserialize(d)?;
        raw.map(|pts| {
            pts.iter()
                .map(|p| p.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(serde::de::Error::custom)
        })
        .transpose()
    }
}

impl HandelmanCertificate {
    fn assemble(
        polyhedron: HPolyhedron,
        vertices: Option<Vec<Vec<Rat>>>,
        scaling: Vec<Rat>,
        forms: Vec<Poly>,
        e: &PolyaExpansion,
        report: BoundReport,
    ) -> Self {
        let terms = e
            .terms()
            .into_iter()
            .filter(|(_, f)| !f.is_zero())
            .map(|(alpha, matrix)| CertTerm { alpha, matrix })
            .collect();
        HandelmanCertificate {
            polyhedron,
            vertices,
            scaling,
            forms,
            t: e.t(),
            n: e.n(),
            degree: e.degree(),
            terms,
            report,
        }
    }

    fn constant(
        polyhedron: HPolyhedron,
        vertices: Option<Vec<Vec<Rat>>>,
        scaling: Vec<Rat>,
        forms: Vec<Poly>,
        a: RatMatrix,
        report: BoundReport,
    ) -> Self {
        let m = forms.len();
        HandelmanCertificate {
            polyhedron,
            vertices,
            scaling,
            forms,
            t: a.rows(),
            n: 0,
            degree: 0,
            terms: vec![CertTerm {
                alpha: Monomial::one(m),
                matrix: a,
            }],
            report,
        }
    }
}

fn check_shape(f: &MatPoly, n: usize) -> Result<(), CertifyError> {
    if f.nvars() != n {
        return Err(CertifyError::Input(format!(
            "matrix has {} variables but the domain has dimension {n}",
            f.nvars()
        )));
    }
    if f.size() == 0 {
        return Err(CertifyError::Input("empty matrix".into()));
    }
    Ok(())
}

/// `B·y`, the point of `X` space a simplex point maps to.
fn map_point(b: &RatMatrix, y: &[Rat]) -> Vec<Rat> {
    (0..b.rows())
        .map(|k| b.row(k).iter().zip(y).map(|(a, v)| a * v).sum())
        .collect()
}

/// `Some(x)` when `x = B·y` lies in `P` and `F(x)` is exactly not positive
/// definite, which settles the question without any expansion.
fn witness(f: &MatPoly, p: &HPolyhedron, b: &RatMatrix, y: &[Rat]) -> Option<Vec<Rat>> {
    let x = map_point(b, y);
    (p.contains(&x) && !is_positive_definite(&f.eval(&x)).unwrap_or(false)).then_some(x)
}

/// Quantities computed from a homogeneous `G` ahead of an expansion.
struct Prepared {
    lambda_sampled: SampledMin,
    lambda: Option<Rat>,
    polya_c: Rat,
    theorem_n: Option<u64>,
}

fn prepare(g: &MatPoly, sampler: &SimplexSampler, config: &CertifyConfig) -> Result<Prepared, CertifyError> {
    let lambda_sampled = min_eig_on_simplex(g, sampler);
    let lambda = lambda_floor(lambda_sampled.value, &config.lambda_safety);
    let polya_c = polya_constant(g, &config.inflation)?;
    let theorem_n = match &lambda {
        Some(l) => Some(degree_bound(&polya_c, l, g.degree())?),
        None => None,
    };
    Ok(Prepared {
        lambda_sampled,
        lambda,
        polya_c,
        theorem_n,
    })
}

/// Normalization data and the first round of bounds for a problem on a
/// polyhedron, without expanding anything.
#[derive(Clone, Debug)]
pub struct Inspection {
    pub normalized: NormalizedPolyhedron,
    pub relations: Vec<String>,
    pub report: BoundReport,
}

/// Computes everything [`certify`] would before its first expansion.
pub fn inspect(f: &MatPoly, p: &HPolyhedron, config: &CertifyConfig) -> Result<Inspection, CertifyError> {
    check_shape(f, p.dim())?;
    validate_polytope(p)?;
    let norm = normalize(p)?;
    let sampler = config.sampler(norm.m());
    let mut report = BoundReport::new(&sampler);
    let d = f.degree();
    report.d = d;
    if d > 0 {
        let ft = LiftContext::for_polyhedron(&norm, d).tilde_lift_matrix(f)?;
        let c = shift_for(&ft, &norm, &sampler, config, &mut report)?;
        let g = shift_by_cr(&ft, &c, &norm.r_sq)?.homogenize(shifted_degree(d, &c))?;
        record(&mut report, &g, &prepare(&g, &sampler, config)?);
    }
    let relations = describe_relations(&norm);
    Ok(Inspection {
        normalized: norm,
        relations,
        report,
    })
}

/// Bounds for the Bernstein–Bézier form of `F` on a simplex, without
/// expanding anything.
pub fn inspect_simplex(f: &MatPoly, s: &Simplex, config: &CertifyConfig) -> Result<BoundReport, CertifyError> {
    check_shape(f, s.dim())?;
    let sampler = config.sampler(s.vertices().len());
    let mut report = BoundReport::new(&sampler);
    report.d = f.degree();
    if f.degree() > 0 {
        let g = bernstein_bezier(f, s)?;
        record(&mut report, &g, &prepare(&g, &sampler, config)?);
    }
    Ok(report)
}

fn record(report: &mut BoundReport, g: &MatPoly, prep: &Prepared) {
    report.d = g.degree();
    report.lambda_sampled = Some(prep.lambda_sampled.value);
    report.lambda = prep.lambda.clone();
    report.polya_c = Some(prep.polya_c.clone());
    report.theorem_n = prep.theorem_n;
}

/// Estimates `m1`, `m2` and picks the initial shift, filling in `report`.
fn shift_for(
    ft: &MatPoly,
    norm: &NormalizedPolyhedron,
    sampler: &SimplexSampler,
    config: &CertifyConfig,
    report: &mut BoundReport,
) -> Result<Rat, CertifyError> {
    report.branch_minima = eigen_branch_minima(ft, sampler);
    let m1 = min_eig_on_simplex(ft, sampler);
    report.m1 = Some(m1.value);
    if m1.value <= 0.0 && !norm.r_sq.is_zero() {
        report.m2 = region_min_r(ft, &norm.r_sq, sampler).map(|s| s.value);
    }
    let c = match &config.fixed_c {
        Some(c) => c.clone(),
        // Without kernel relations the shift term vanishes.
        None if norm.r_sq.is_zero() => Rat::zero(),
        None => match choose_c(m1.value, report.m2, &config.c_margin) {
            Ok(choice) => {
                report.c_threshold = choice.threshold;
                choice.c
            }
            Err(BoundsError::DegenerateRegion) => {
                log::warn!("sampled minimum of R where F̃ fails is 0, so F may not be positive definite on P; starting from c = 1");
                Rat::one()
            }
            Err(e) => return Err(e.into()),
        },
    };
    report.c = c.clone();
    Ok(c)
}

/// Certificate for `F` on a compact polyhedron with nonempty interior.
pub fn certify(f: &MatPoly, p: &HPolyhedron, config: &CertifyConfig) -> Result<HandelmanCertificate, CertifyError> {
    certify_with(f, p, config, &mut |_| {})
}

/// [`certify`] with a progress callback invoked after every swept level.
pub fn certify_with(
    f: &MatPoly,
    p: &HPolyhedron,
    config: &CertifyConfig,
    progress: &mut dyn FnMut(&Progress),
) -> Result<HandelmanCertificate, CertifyError> {
    check_shape(f, p.dim())?;
    validate_polytope(p)?;
    let norm = normalize(p)?;
    let sampler = config.sampler(norm.m());
    let mut report = BoundReport::new(&sampler);
    let d = f.degree();

    if d == 0 {
        let a = f.constant_matrix();
        if !is_positive_definite(&a).map_err(PolyError::from)? {
            return Err(CertifyError::NotPositiveDefinite { witness: None });
        }
        return Ok(HandelmanCertificate::constant(
            p.clone(),
            None,
            norm.scaling,
            norm.forms,
            a,
            report,
        ));
    }

    let ft = LiftContext::for_polyhedron(&norm, d).tilde_lift_matrix(f)?;
    let mut c = shift_for(&ft, &norm, &sampler, config, &mut report)?;
    let has_relations = !norm.r_sq.is_zero();
    let mut cap_scale: u64 = 1;

    for round in 0..=config.escalation_rounds {
        let g = shift_by_cr(&ft, &c, &norm.r_sq)?.homogenize(shifted_degree(d, &c))?;
        let prep = prepare(&g, &sampler, config)?;
        record(&mut report, &g, &prep);
        report.c = c.clone();
        let cap = config
            .n_cap
            .or(prep.theorem_n)
            .unwrap_or(config.fallback_n_cap)
            .saturating_mul(cap_scale);
        log::info!(
            "round {round}: c = {}, sampled lambda = {:.6}, C = {}, N cap = {cap}",
            format_rat(&c),
            prep.lambda_sampled.value,
            format_rat(&prep.polya_c)
        );

        let outcome = if prep.lambda.is_none() {
            if let Some(x) = witness(f, p, &norm.b, &prep.lambda_sampled.point) {
                return Err(CertifyError::NotPositiveDefinite { witness: Some(x) });
            }
            "sampled eigenvalue floor not positive".to_string()
        } else {
            match find_minimal_n(&g, cap, &config.limits, &mut *progress) {
                Ok(e) => {
                    report.used_n = e.n();
                    report.attempts.push(Attempt {
                        c: c.clone(),
                        lambda_sampled: prep.lambda_sampled.value,
                        n_cap: cap,
                        outcome: format!("certified at N = {}", e.n()),
                    });
                    return Ok(HandelmanCertificate::assemble(
                        p.clone(),
                        None,
                        norm.scaling.clone(),
                        norm.forms.clone(),
                        &e,
                        report,
                    ));
                }
                Err(PolyaError::Exhausted { cap, alpha, minor }) => {
                    format!("exhausted at N = {cap} (coefficient {alpha}, minor {minor})")
                }
                Err(e) => return Err(CertifyError::Polya(e)),
            }
        };
        log::info!("round {round}: {outcome}");
        report.attempts.push(Attempt {
            c: c.clone(),
            lambda_sampled: prep.lambda_sampled.value,
            n_cap: cap,
            outcome,
        });
        if has_relations {
            c = Rat::from_integer(2.into()) * c.max(Rat::one());
        } else {
            cap_scale = cap_scale.saturating_mul(2);
        }
    }
    Err(CertifyError::Exhausted {
        rounds: config.escalation_rounds,
    })
}

/// Certificate for `F` on a simplex, in its barycentric coordinates.
pub fn certify_simplex(f: &MatPoly, s: &Simplex, config: &CertifyConfig) -> Result<HandelmanCertificate, CertifyError> {
    certify_simplex_with(f, s, config, &mut |_| {})
}

/// [`certify_simplex`] with a progress callback.
pub fn certify_simplex_with(
    f: &MatPoly,
    s: &Simplex,
    config: &CertifyConfig,
    progress: &mut dyn FnMut(&Progress),
) -> Result<HandelmanCertificate, CertifyError> {
    check_shape(f, s.dim())?;
    let p = s.polyhedron();
    let m = s.vertices().len();
    let sampler = config.sampler(m);
    let mut report = BoundReport::new(&sampler);
    let ones = vec![Rat::one(); m];
    let forms = s.barycentric().to_vec();
    let vertices = Some(s.vertices().to_vec());

    if f.degree() == 0 {
        let a = f.constant_matrix();
        if !is_positive_definite(&a).map_err(PolyError::from)? {
            return Err(CertifyError::NotPositiveDefinite { witness: None });
        }
        return Ok(HandelmanCertificate::constant(p, vertices, ones, forms, a, report));
    }

    let g = bernstein_bezier(f, s)?;
    let prep = prepare(&g, &sampler, config)?;
    record(&mut report, &g, &prep);
    if prep.lambda.is_none() {
        if let Some(x) = witness(f, &p, &s.vertex_matrix(), &prep.lambda_sampled.point) {
            return Err(CertifyError::NotPositiveDefinite { witness: Some(x) });
        }
    }
    let mut cap = config
        .n_cap
        .or(prep.theorem_n)
        .unwrap_or(config.fallback_n_cap);
    for round in 0..=config.escalation_rounds {
        log::info!("round {round}: N cap = {cap}");
        match find_minimal_n(&g, cap, &config.limits, &mut *progress) {
            Ok(e) => {
                report.used_n = e.n();
                report.attempts.push(Attempt {
                    c: Rat::zero(),
                    lambda_sampled: prep.lambda_sampled.value,
                    n_cap: cap,
                    outcome: format!("certified at N = {}", e.n()),
                });
                return Ok(HandelmanCertificate::assemble(p, vertices, ones, forms, &e, report));
            }
            Err(PolyaError::Exhausted { cap, alpha, minor }) => {
                report.attempts.push(Attempt {
                    c: Rat::zero(),
                    lambda_sampled: prep.lambda_sampled.value,
                    n_cap: cap,
                    outcome: format!("exhausted at N = {cap} (coefficient {alpha}, minor {minor})"),
                });
            }
            Err(e) => return Err(CertifyError::Polya(e)),
        }
        cap = cap.saturating_mul(2).max(1);
    }
    Err(CertifyError::Exhausted {
        rounds: config.escalation_rounds,
    })
}

#[cfg(test)]
mod tests;
