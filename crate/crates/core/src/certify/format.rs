//! Versioned JSON files for problems and certificates.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{Domain, HandelmanCertificate, Problem, SosCertificate};
use crate::bounds::BoundReport;
use crate::exactalg::{format_rat, parse_rat, Rat};
use crate::polyring::MatPoly;
use crate::polytope::HPolyhedron;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("syntax error at line {line}, column {column} (byte {offset}): {message}")]
    Syntax {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
    #[error("invalid content at line {line}, column {column} (byte {offset}): {message}")]
    Content {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
    #[error("invalid content: {0}")]
    Invalid(String),
    #[error("missing \"version\" field")]
    MissingVersion,
    #[error("unsupported format version {0}; this build reads version {FORMAT_VERSION}")]
    UnsupportedVersion(String),
}

/// Byte offset of a 1-based line and column, clamped to the text.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn located(text: &str, e: serde_json::Error, syntax: bool) -> FileError {
    let (line, column) = (e.line(), e.column());
    let offset = byte_offset(text, line, column);
    // The message carries its own location suffix; keep only the description.
    let message = e.to_string();
    let message = match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    };
    if syntax {
        FileError::Syntax {
            line,
            column,
            offset,
            message,
        }
    } else {
        FileError::Content {
            line,
            column,
            offset,
            message,
        }
    }
}

fn read_versioned<T: DeserializeOwned>(text: &str, require_version: bool) -> Result<T, FileError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        let syntax = e.is_syntax() || e.is_eof();
        located(text, e, syntax)
    })?;
    match value.get("version") {
        None if require_version => return Err(FileError::MissingVersion),
        None => {}
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => return Err(FileError::UnsupportedVersion(v.to_string())),
    }
    serde_json::from_str(text).map_err(|e| located(text, e, false))
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    version: u64,
    #[serde(flatten)]
    body: &'a T,
}

fn write_versioned<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Versioned {
        version: FORMAT_VERSION,
        body,
    })
    .expect("serializable");
    s.push('\n');
    s
}

pub fn read_certificate(text: &str) -> Result<HandelmanCertificate, FileError> {
    read_versioned(text, true)
}

pub fn write_certificate(cert: &HandelmanCertificate) -> String {
    write_versioned(cert)
}

pub fn read_sos(text: &str) -> Result<SosCertificate, FileError> {
    read_versioned(text, true)
}

pub fn write_sos(sos: &SosCertificate) -> String {
    write_versioned(sos)
}

/// A bound report as pretty JSON (unversioned; reports are diagnostics).
pub fn write_report(report: &BoundReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
struct SimplexRepr {
    vertices: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polyhedron: Option<HPolyhedron>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    simplex: Option<SimplexRepr>,
    matrix: MatPoly,
}

/// Reads `{"polyhedron": ..., "matrix": ...}` or
/// `{"simplex": {"vertices": ...}, "matrix": ...}`; `version` is optional.
pub fn read_problem(text: &str) -> Result<Problem, FileError> {
    let repr: ProblemRepr = read_versioned(text, false)?;
    let domain = match (repr.polyhedron, repr.simplex) {
        (Some(p), None) => Domain::Polyhedron(p),
        (None, Some(s)) => {
            let vertices = s
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| parse_rat(x)).collect::<Result<Vec<Rat>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FileError::Invalid(e.to_string()))?;
            Domain::Simplex(vertices)
        }
        _ => {
            return Err(FileError::Invalid(
                "expected exactly one of \"polyhedron\" and \"simplex\"".into(),
            ))
        }
    };
    Ok(Problem {
        domain,
        matrix: repr.matrix,
    })
}

pub fn write_problem(problem: &Problem) -> String {
    let (polyhedron, simplex) = match &problem.domain {
        Domain::Polyhedron(p) => (Some(p.clone()), None),
        Domain::Simplex(v) => (
            None,
            Some(SimplexRepr {
                vertices: v.iter().map(|p| p.iter().map(format_rat).collect()).collect(),
            }),
        ),
    };
    write_versioned(&ProblemRepr {
        polyhedron,
        simplex,
        matrix: problem.matrix.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_lines() {
        let text = "ab\ncde\nf";
        assert_eq!(byte_offset(text, 1, 1), 0);
        assert_eq!(byte_offset(text, 2, 2), 4);
        assert_eq!(byte_offset(text, 3, 1), 7);
        assert_eq!(byte_offset(text, 9, 9), text.len());
    }

    #[test]
    fn problem_round_trip() {
        let p = Problem {
            domain: Domain::Polyhedron(crate::examples::square()),
            matrix: crate::examples::square_matrix(),
        };
        assert_eq!(read_problem(&write_problem(&p)).unwrap(), p);
        let s = Problem {
            domain: Domain::Simplex(vec![vec![Rat::from_integer(0.into())], vec![Rat::from_integer(1.into())]]),
            matrix: MatPoly::scalar_identity(1, &crate::polyring::Poly::var(1, 0)),
        };
        assert_eq!(read_problem(&write_problem(&s)).unwrap(), s);
    }

    #[test]
    fn problem_needs_one_domain() {
        let m = serde_json::to_string(&crate::examples::square_matrix()).unwrap();
        let err = read_problem(&format!("{{\"matrix\": {m}}}")).unwrap_err();
        assert!(matches!(err, FileError::Invalid(_)));
    }

    #[test]
    fn version_checks() {
        assert_eq!(read_certificate("{}").unwrap_err(), FileError::MissingVersion);
        assert_eq!(
            read_certificate("{\"version\": 0}").unwrap_err(),
            FileError::UnsupportedVersion("0".into())
        );
    }

    #[test]
    fn truncated_file_reports_offset() {
        let text = "{\n  \"version\": 1,\n  \"t\": ";
        match read_certificate(text).unwrap_err() {
            FileError::Syntax { line, offset, .. } => {
                assert_eq!(line, 3);
                assert!(offset <= text.len() && offset >= 18);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
