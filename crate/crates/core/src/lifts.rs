//! Lifting polynomials on a polyhedron to homogeneous polynomials on the
//! standard simplex.
//!
//! Given `X = L·Bᵀ`, a polynomial `g(X) = Σ a_α X^α` of degree at most `d`
//! lifts to `g̃(Y) = Σ a_α (Y·Bᵀ)^α (Σ Y_i)^(d-|α|)`, homogeneous of degree
//! `d` with `g̃(L(X)) = g(X)`. On a simplex with `B` the vertex matrix this is
//! the Bernstein–Bézier form.
//!
//! Eigenvalues of lifted matrices are never handled symbolically; the bounds
//! module evaluates them pointwise.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::{Rat, RatMatrix};
use crate::polyring::{MatPoly, Poly, PolyError, PowerTable};
use crate::polytope::{NormalizedPolyhedron, Simplex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("degree {degree} exceeds the lift degree {target}")]
    DegreeOverflow { degree: u32, target: u32 },
    #[error("polynomial has {got} variables but the polyhedron has dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("shift constant must be nonnegative")]
    NegativeShift,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `B` (`n x m`) and the working degree used for lifting.
#[derive(Clone, Debug)]
pub struct LiftContext {
    b: RatMatrix,
    d: u32,
    /// Linear forms `X_k = Σ_j b_kj Y_j`, then `Σ Y_j` last.
    bases: Vec<Poly>,
}

impl LiftContext {
    pub fn new(b: RatMatrix, d: u32) -> Self {
        let m = b.cols();
        let mut bases: Vec<Poly> = (0..b.rows())
            .map(|k| Poly::affine(Rat::zero(), b.row(k)))
            .collect();
        bases.push(Poly::affine(Rat::zero(), &vec![Rat::one(); m]));
        LiftContext { b, d, bases }
    }

    pub fn for_polyhedron(norm: &NormalizedPolyhedron, d: u32) -> Self {
        Self::new(norm.b.clone(), d)
    }

    pub fn for_simplex(s: &Simplex, d: u32) -> Self {
        Self::new(s.vertex_matrix(), d)
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    fn lift_with(
        &self,
        g: &Poly,
        powers: &mut PowerTable<'_>,
    ) -> Result<Poly, LiftError> {
        let n = self.b.rows();
        if g.nvars() != n {
            return Err(LiftError::Dimension {
                expected: n,
                got: g.nvars(),
            });
        }
        let degree = g.degree();
        if degree > self.d {
            return Err(LiftError::DegreeOverflow {
                degree,
                target: self.d,
            });
        }
        let m = self.m();
        let mut out = Poly::zero(m);
        for (alpha, a) in g.terms() {
            let mut term = Poly::constant(m, a.clone());
            for (k, &e) in alpha.exponents().iter().enumerate() {
                if e > 0 {
                    term = &term * powers.get(k, e);
                }
            }
            let gap = self.d - alpha.degree();
            if gap > 0 {
                term = &term * powers.get(n, gap);
            }
            out.add_assign(&term);
        }
        Ok(out)
    }

    /// `g̃`, homogeneous of degree `d` in `m` variables.
    pub fn tilde_lift(&self, g: &Poly) -> Result<Poly, LiftError> {
        let mut powers = PowerTable::new(&self.bases);
        self.lift_with(g, &mut powers)
    }

    /// Entrywise lift; powers of the linear forms are shared across entries.
    pub fn tilde_lift_matrix(&self, f: &MatPoly) -> Result<MatPoly, LiftError> {
        let mut powers = PowerTable::new(&self.bases);
        let mut err = None;
        let lifted = MatPoly::from_upper(f.size(), self.m(), |i, j| {
            match self.lift_with(f.entry(i, j), &mut powers) {
                Ok(p) => p,
                Err(e) => {
                    err.get_or_insert(e);
                    Poly::zero(self.m())
                }
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(lifted),
        }
    }
}

/// Bernstein–Bézier form of `F` with respect to a simplex, in variables
/// `Y_0..Y_n`, at the matrix degree of `F`.
pub fn bernstein_bezier(f: &MatPoly, s: &Simplex) -> Result<MatPoly, LiftError> {
    LiftContext::for_simplex(s, f.degree()).tilde_lift_matrix(f)
}

/// `F̄ = F̃ + c·R·I`.
pub fn shift_by_cr(ft: &MatPoly, c: &Rat, r_sq: &Poly) -> Result<MatPoly, LiftError> {
    if c.is_negative() {
        return Err(LiftError::NegativeShift);
    }
    let shift = MatPoly::scalar_identity(ft.size(), &r_sq.scale(c));
    Ok(ft.checked_add(&shift)?)
}

/// Degree used to homogenize `F̄`: the lift degree, raised to 2 once a
/// nonzero multiple of `R` has been added.
pub fn shifted_degree(d: u32, c: &Rat) -> u32 {
    if c.is_zero() {
        d
    } else {
        d.max(2)
    }
}
