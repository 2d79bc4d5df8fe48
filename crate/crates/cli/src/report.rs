//! Plain-text reports. Output is deterministic for a fixed input and seed.

use std::fmt::Write;

use handelman::bounds::BoundReport;
use handelman::certify::{CertifyError, Domain, Problem, SosCertificate};
use handelman::exactalg::{format_rat, rat_to_f64, Rat};
use handelman::polytope::{barycentric_coords, describe_relations, normalize};

fn list(values: &[Rat]) -> String {
    let parts: Vec<String> = values.iter().map(format_rat).collect();
    format!("({})", parts.join(", "))
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.6}"))
}

fn opt_rat(v: &Option<Rat>) -> String {
    v.as_ref().map_or_else(|| "n/a".into(), format_rat)
}

/// Normalization data of a polyhedron, or the barycentric forms of a simplex.
pub fn domain(problem: &Problem) -> Result<String, CertifyError> {
    let mut s = String::new();
    match &problem.domain {
        Domain::Polyhedron(p) => {
            let norm = normalize(p)?;
            writeln!(s, "polyhedron: n = {}, m = {}", norm.dim(), norm.m()).unwrap();
            writeln!(s, "c-vector: {}", list(&norm.scaling)).unwrap();
            for (i, l) in norm.forms.iter().enumerate() {
                writeln!(s, "L{} = {}", i + 1, l.named("x")).unwrap();
            }
            writeln!(s, "B = {}", norm.b).unwrap();
            let relations = describe_relations(&norm);
            if relations.is_empty() {
                writeln!(s, "relations: none").unwrap();
            } else {
                writeln!(s, "relations: {{{}}}", relations.join(", ")).unwrap();
            }
        }
        Domain::Simplex(v) => {
            let simplex = barycentric_coords(v)?;
            writeln!(s, "simplex: n = {}, {} vertices", simplex.dim(), v.len()).unwrap();
            for (i, l) in simplex.barycentric().iter().enumerate() {
                writeln!(s, "L{i} = {}", l.named("x")).unwrap();
            }
        }
    }
    Ok(s)
}

pub fn bounds(r: &BoundReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "sampler: resolution {}, refine rounds {}, seed {}",
        r.resolution, r.refine_rounds, r.seed
    )
    .unwrap();
    if !r.branch_minima.is_empty() {
        let parts: Vec<String> = r.branch_minima.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(s, "eigenvalue branch minima: ({})", parts.join(", ")).unwrap();
    }
    writeln!(s, "m1: {}", opt_f64(r.m1)).unwrap();
    writeln!(s, "m2: {}", opt_f64(r.m2)).unwrap();
    writeln!(s, "c threshold: {}", opt_rat(&r.c_threshold)).unwrap();
    writeln!(s, "c: {}", format_rat(&r.c)).unwrap();
    writeln!(s, "degree d: {}", r.d).unwrap();
    writeln!(s, "lambda (sampled): {}", opt_f64(r.lambda_sampled)).unwrap();
    writeln!(s, "lambda (floor): {}", opt_rat(&r.lambda)).unwrap();
    match &r.polya_c {
        Some(c) => writeln!(s, "C: {} (~{:.6})", format_rat(c), rat_to_f64(c)).unwrap(),
        None => writeln!(s, "C: n/a").unwrap(),
    }
    writeln!(
        s,
        "Theorem N: {}",
        r.theorem_n.map_or_else(|| "n/a".into(), |n| n.to_string())
    )
    .unwrap();
    for (i, a) in r.attempts.iter().enumerate() {
        writeln!(
            s,
            "attempt {}: c = {}, lambda {:.6}, N cap {}: {}",
            i + 1,
            format_rat(&a.c),
            a.lambda_sampled,
            a.n_cap,
            a.outcome
        )
        .unwrap();
    }
    if !r.attempts.is_empty() {
        writeln!(s, "used N: {}", r.used_n).unwrap();
    }
    s
}

pub fn sos(sos: &SosCertificate) -> String {
    let mut s = String::new();
    writeln!(s, "degree bound: {}", sos.degree).unwrap();
    writeln!(s, "buckets: {}", sos.buckets.len()).unwrap();
    for b in &sos.buckets {
        writeln!(s, "  e = {}: {} squares", b.parity, b.factors.len()).unwrap();
    }
    s
}
