//! Ready-made problems used by tests, the CLI and the Python bindings.

use crate::exactalg::rat_int;
use crate::polyring::{MatPoly, Monomial, Poly};
use crate::polytope::HPolyhedron;

fn poly(nvars: usize, terms: &[(i64, &[u32])]) -> Poly {
    Poly::from_terms(
        nvars,
        terms
            .iter()
            .map(|(c, e)| (Monomial::new(e.to_vec()), rat_int(*c))),
    )
    .expect("well-formed terms")
}

/// The square `[-1, 1]²` as `1 ± x ≥ 0`, `1 ± y ≥ 0`.
pub fn square() -> HPolyhedron {
    let f = |c: i64, a: i64, b: i64| Poly::affine(rat_int(c), &[rat_int(a), rat_int(b)]);
    HPolyhedron::new(2, vec![f(1, 1, 0), f(1, -1, 0), f(1, 0, 1), f(1, 0, -1)])
        .expect("square is a valid polytope")
}

/// A degree-4 matrix in `(x, y)` that is positive definite on [`square`] but
/// has a negative eigenvalue on the larger image of the simplex.
///
/// Its eigenvalues are `(6 - 4y)(x² + 1)` and `(x² + 1)(x² + y + 3)`.
pub fn square_matrix() -> MatPoly {
    let f11 = poly(2, &[(-4, &[2, 1]), (7, &[2, 0]), (1, &[0, 1]), (3, &[0, 0])]);
    let f12 = poly(2, &[(1, &[3, 0]), (5, &[1, 1]), (-3, &[1, 0])]);
    let f22 = poly(
        2,
        &[(1, &[4, 0]), (1, &[2, 1]), (3, &[2, 0]), (-4, &[0, 1]), (6, &[0, 0])],
    );
    MatPoly::from_rows(vec![vec![f11, f12.clone()], vec![f12, f22]]).expect("symmetric")
}

/// `[0, 1]` as `x ≥ 0`, `1 - x ≥ 0`.
pub fn unit_interval() -> HPolyhedron {
    HPolyhedron::new(
        1,
        vec![
            Poly::affine(rat_int(0), &[rat_int(1)]),
            Poly::affine(rat_int(1), &[rat_int(-1)]),
        ],
    )
    .expect("interval is a valid polytope")
}

/// `[[1 + x², -x], [-x, 2 - x]]`, positive definite on [`unit_interval`].
pub fn interval_matrix() -> MatPoly {
    let a = poly(1, &[(1, &[0]), (1, &[2])]);
    let b = poly(1, &[(-1, &[1])]);
    let c = poly(1, &[(2, &[0]), (-1, &[1])]);
    MatPoly::from_rows(vec![vec![a, b.clone()], vec![b, c]]).expect("symmetric")
}
