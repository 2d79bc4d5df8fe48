//! Polyhedra given by affine inequalities, and their normalization.
//!
//! A compact polyhedron `P = {x : L'_i(x) >= 0}` is rescaled so the forms sum
//! to one. Writing `φ: Y_i ↦ L_i(X)`, we also recover a matrix `B` with
//! `X = L·Bᵀ` and the affine relations generating `Ker φ`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::{
    format_rat, min_norm_solution, nullspace, positive_combination, rref, solve_linear,
    ExactError, LinearProgram, LinearSolution, LpOutcome, Rat, RatMatrix,
};
use crate::polyring::{Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("polyhedron is unbounded (coordinate {0} has no {1} bound)")]
    Unbounded(usize, &'static str),
    #[error("polyhedron has empty interior")]
    EmptyInterior,
    #[error("not normalizable: no positive combination of the forms equals 1")]
    NotNormalizable,
    #[error("B inconsistent: the forms do not affinely span coordinate {0}")]
    BInconsistent(usize),
    #[error("form {index} has degree {degree}; only affine forms are allowed")]
    NonAffineForm { index: usize, degree: u32 },
    #[error("form {index} has {got} variables, expected {expected}")]
    FormVars {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("simplex vertices are affinely dependent")]
    AffinelyDependent,
    #[error("simplex needs {expected} vertices of dimension {dim}, got {got}")]
    VertexCount {
        expected: usize,
        dim: usize,
        got: usize,
    },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `{x ∈ ℝⁿ : forms[i](x) >= 0}` with affine forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolyhedron {
    n: usize,
    forms: Vec<Poly>,
}

impl HPolyhedron {
    pub fn new(n: usize, forms: Vec<Poly>) -> Result<Self, PolytopeError> {
        for (index, f) in forms.iter().enumerate() {
            if f.nvars() != n {
                return Err(PolytopeError::FormVars {
                    index,
                    expected: n,
                    got: f.nvars(),
                });
            }
            if f.degree() > 1 {
                return Err(PolytopeError::NonAffineForm {
                    index,
                    degree: f.degree(),
                });
            }
        }
        Ok(HPolyhedron { n, forms })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn forms(&self) -> &[Poly] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// `(n+1) x m` matrix whose column `j` holds the constant and linear
    /// coefficients of form `j`.
    pub fn coefficient_matrix(&self) -> RatMatrix {
        coefficient_matrix(self.n, &self.forms)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.forms.iter().all(|f| !f.eval(x).is_negative())
    }
}

fn coefficient_matrix(n: usize, forms: &[Poly]) -> RatMatrix {
    RatMatrix::from_fn(n + 1, forms.len(), |k, j| {
        if k == 0 {
            forms[j].constant_term()
        } else {
            forms[j].linear_coeff(k - 1)
        }
    })
}

/// Linear coefficients of `f` with the free variables split as `x = x⁺ - x⁻`.
fn split_row(f: &Poly, n: usize) -> Vec<Rat> {
    let mut row = Vec::with_capacity(2 * n);
    for i in 0..n {
        row.push(f.linear_coeff(i));
    }
    for i in 0..n {
        row.push(-f.linear_coeff(i));
    }
    row
}

/// Checks that `P` is bounded and has nonempty interior, by exact LPs.
pub fn validate_polytope(p: &HPolyhedron) -> Result<(), PolytopeError> {
    let n = p.n;
    // Interior: maximize s subject to L'_i(x) >= s, s <= 1.
    let mut lp = LinearProgram::new(2 * n + 1);
    lp.objective[2 * n] = Rat::one();
    for f in &p.forms {
        // -(a·x) + s <= b
        let mut row: Vec<Rat> = split_row(f, n).into_iter().map(|v| -v).collect();
        row.push(Rat::one());
        lp.le.push((row, f.constant_term()));
    }
    let mut cap = vec![Rat::zero(); 2 * n + 1];
    cap[2 * n] = Rat::one();
    lp.le.push((cap, Rat::one()));
    // s >= 0 here; only whether s > 0 is attainable matters.
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } if value.is_positive() => {}
        _ => return Err(PolytopeError::EmptyInterior),
    }

    for i in 0..n {
        for (sign, label) in [(Rat::one(), "upper"), (-Rat::one(), "lower")] {
            let mut lp = LinearProgram::new(2 * n);
            lp.objective[i] = sign.clone();
            lp.objective[n + i] = -sign.clone();
            for f in &p.forms {
                let row = split_row(f, n).into_iter().map(|v| -v).collect();
                lp.le.push((row, f.constant_term()));
            }
            match lp.solve()? {
                LpOutcome::Optimal { .. } => {}
                LpOutcome::Unbounded => return Err(PolytopeError::Unbounded(i, label)),
                LpOutcome::Infeasible => return Err(PolytopeError::EmptyInterior),
            }
        }
    }
    Ok(())
}

/// A polyhedron with forms scaled to sum to one, plus the data of `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedPolyhedron {
    pub base: HPolyhedron,
    /// Positive scaling constants, `L_i = scaling[i]·L'_i`.
    pub scaling: Vec<Rat>,
    /// Scaled forms `L_i` over `X`.
    pub forms: Vec<Poly>,
    /// `n x m`, with `X_i = Σ_j b_ij L_j`.
    pub b: RatMatrix,
    /// Affine forms over `Y` generating `Ker φ`, in reduced row echelon form.
    pub relations: Vec<Poly>,
    /// `R = Σ R_k²`
    pub r_sq: Poly,
}

impl NormalizedPolyhedron {
    pub fn dim(&self) -> usize {
        self.base.n
    }

    /// Number of forms, i.e. the number of `Y` variables.
    pub fn m(&self) -> usize {
        self.forms.len()
    }

    /// Builds the normalized data from forms that already sum to one.
    fn from_scaled(
        base: HPolyhedron,
        scaling: Vec<Rat>,
        forms: Vec<Poly>,
    ) -> Result<Self, PolytopeError> {
        let n = base.n;
        let m = forms.len();
        let coeffs = coefficient_matrix(n, &forms);

        // X_i = Σ_j b_ij L_j, coefficient-wise: coeffs · b_i = e_{i+1}.
        let mut b = RatMatrix::zeros(n, m);
        for i in 0..n {
            let mut target = vec![Rat::zero(); n + 1];
            target[i + 1] = Rat::one();
            let row = min_norm_solution(&coeffs, &target)?
                .ok_or(PolytopeError::BInconsistent(i))?;
            for (j, v) in row.into_iter().enumerate() {
                b.set(i, j, v);
            }
        }

        // Affine relations a·Y + a_0 with a_0 + Σ a_j L_j ≡ 0: the nullspace of
        // the coefficient matrix extended by a column for the constant.
        let ext = RatMatrix::from_fn(n + 1, m + 1, |k, j| {
            if j < m {
                coeffs.get(k, j).clone()
            } else if k == 0 {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let mut basis = nullspace(&ext);
        rref(&mut basis, m + 1);
        let relations: Vec<Poly> = basis
            .iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .map(|v| Poly::affine(v[m].clone(), &v[..m]))
            .collect();
        let r_sq = relations
            .iter()
            .fold(Poly::zero(m), |acc, r| &acc + &(r * r));

        Ok(NormalizedPolyhedron {
            base,
            scaling,
            forms,
            b,
            relations,
            r_sq,
        })
    }
}

/// Scales the forms to sum to one and computes `B` and the kernel relations.
pub fn normalize(p: &HPolyhedron) -> Result<NormalizedPolyhedron, PolytopeError> {
    let coeffs = p.coefficient_matrix();
    let mut target = vec![Rat::zero(); p.n + 1];
    target[0] = Rat::one();
    let scaling = positive_combination(&coeffs, &target)?.ok_or(PolytopeError::NotNormalizable)?;
    let forms = p
        .forms
        .iter()
        .zip(&scaling)
        .map(|(f, c)| f.scale(c))
        .collect();
    NormalizedPolyhedron::from_scaled(p.clone(), scaling, forms)
}

/// An `n`-simplex with its barycentric coordinate forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<Vec<Rat>>,
    barycentric: Vec<Poly>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn barycentric(&self) -> &[Poly] {
        &self.barycentric
    }

    /// `n x (n+1)` matrix whose columns are the vertices, so `X = Σ Y_i v_i`.
    pub fn vertex_matrix(&self) -> RatMatrix {
        RatMatrix::from_fn(self.dim(), self.vertices.len(), |k, i| {
            self.vertices[i][k].clone()
        })
    }

    pub fn polyhedron(&self) -> HPolyhedron {
        HPolyhedron {
            n: self.dim(),
            forms: self.barycentric.clone(),
        }
    }

    /// The barycentric forms already sum to one, so no scaling is needed.
    pub fn normalized(&self) -> NormalizedPolyhedron {
        let m = self.vertices.len();
        NormalizedPolyhedron::from_scaled(
            self.polyhedron(),
            vec![Rat::one(); m],
            self.barycentric.clone(),
        )
        .expect("barycentric forms are a valid normalization")
    }
}

/// Barycentric coordinates of the simplex with the given vertices.
pub fn barycentric_coords(vertices: &[Vec<Rat>]) -> Result<Simplex, PolytopeError> {
    let k = vertices.len();
    let n = k.saturating_sub(1);
    if k == 0 || vertices.iter().any(|v| v.len() != n) {
        return Err(PolytopeError::VertexCount {
            expected: n + 1,
            dim: vertices.first().map_or(0, Vec::len),
            got: k,
        });
    }
    // Row j is (1, v_j); form i has coefficients a_i with rows·a_i = e_i.
    let vmat = RatMatrix::from_fn(k, k, |j, c| {
        if c == 0 {
            Rat::one()
        } else {
            vertices[j][c - 1].clone()
        }
    });
    let mut barycentric = Vec::with_capacity(k);
    for i in 0..k {
        let mut e = vec![Rat::zero(); k];
        e[i] = Rat::one();
        match solve_linear(&vmat, &e)? {
            LinearSolution::Solved {
                particular,
                nullspace,
            } if nullspace.is_empty() => {
                barycentric.push(Poly::affine(particular[0].clone(), &particular[1..]));
            }
            _ => return Err(PolytopeError::AffinelyDependent),
        }
    }
    Ok(Simplex {
        vertices: vertices.to_vec(),
        barycentric,
    })
}

/// One line per relation, e.g. `y1 + y2 - 1/2`.
pub fn describe_relations(norm: &NormalizedPolyhedron) -> Vec<String> {
    norm.relations
        .iter()
        .map(|r| {
            let lin: Vec<(Monomial, Rat)> = r
                .terms()
                .filter(|(m, _)| m.degree() == 1)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            let p = Poly::from_terms(r.nvars(), lin).expect("same ring");
            let c = r.constant_term();
            let lin_s = p.to_string();
            if c.is_zero() {
                lin_s
            } else if c.is_negative() {
                format!("{lin_s} - {}", format_rat(&-c))
            } else {
                format!("{lin_s} + {}", format_rat(&c))
            }
        })
        .collect()
}
