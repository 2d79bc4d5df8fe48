use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::Zero;

use super::{Monomial, Poly, PolyError};
use crate::exactalg::{Rat, RatMatrix};

/// Symmetric `t x t` matrix with polynomial entries.
///
/// Only the upper triangle is stored; `entry(i, j)` and `entry(j, i)` are the
/// same object, so symmetry holds by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatPoly {
    t: usize,
    nvars: usize,
    upper: Vec<Poly>,
}

fn packed_index(t: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * t - i * (i + 1) / 2 + j
}

impl MatPoly {
    pub fn zero(t: usize, nvars: usize) -> Self {
        MatPoly {
            t,
            nvars,
            upper: vec![Poly::zero(nvars); t * (t + 1) / 2],
        }
    }

    /// Builds from the upper triangle, `f(i, j)` called for `i <= j`.
    pub fn from_upper(
        t: usize,
        nvars: usize,
        mut f: impl FnMut(usize, usize) -> Poly,
    ) -> Result<Self, PolyError> {
        let mut upper = Vec::with_capacity(t * (t + 1) / 2);
        for i in 0..t {
            for j in i..t {
                let p = f(i, j);
                if p.nvars() != nvars {
                    return Err(PolyError::VarCountMismatch(nvars, p.nvars()));
                }
                upper.push(p);
            }
        }
        Ok(MatPoly { t, nvars, upper })
    }

    /// Builds from a full grid, rejecting anything that is not exactly symmetric.
    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self, PolyError> {
        let t = rows.len();
        if t == 0 {
            return Err(PolyError::Shape("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != t) {
            return Err(PolyError::Shape("matrix is not square".into()));
        }
        for i in 0..t {
            for j in i + 1..t {
                if rows[i][j] != rows[j][i] {
                    return Err(PolyError::NotSymmetric(i, j));
                }
            }
        }
        let nvars = rows[0][0].nvars();
        Self::from_upper(t, nvars, |i, j| rows[i][j].clone())
    }

    /// `p · I_t`
    pub fn scalar_identity(t: usize, p: &Poly) -> Self {
        let nvars = p.nvars();
        Self::from_upper(t, nvars, |i, j| {
            if i == j {
                p.clone()
            } else {
                Poly::zero(nvars)
            }
        })
        .expect("consistent variable count")
    }

    /// Assembles `Σ_α A_α · x^α` from coefficient matrices.
    pub fn from_coefficients<'a>(
        t: usize,
        nvars: usize,
        coeffs: impl IntoIterator<Item = (&'a Monomial, &'a RatMatrix)>,
    ) -> Result<Self, PolyError> {
        let mut out = MatPoly::zero(t, nvars);
        for (m, a) in coeffs {
            if m.nvars() != nvars {
                return Err(PolyError::VarCountMismatch(nvars, m.nvars()));
            }
            if a.rows() != t || a.cols() != t {
                return Err(PolyError::Shape(format!("coefficient at {m} is not {t}x{t}")));
            }
            if !a.is_symmetric() {
                return Err(PolyError::Exact(crate::exactalg::ExactError::NotSymmetric));
            }
            for i in 0..t {
                for j in i..t {
                    out.upper[packed_index(t, i, j)].add_term(m.clone(), a.get(i, j).clone());
                }
            }
        }
        Ok(out)
    }

    pub fn size(&self) -> usize {
        self.t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.upper[packed_index(self.t, i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.t)
            .map(|i| (0..self.t).map(|j| self.entry(i, j).clone()).collect())
            .collect()
    }

    /// Upper-triangle entries in row-major order.
    pub fn upper_entries(&self) -> &[Poly] {
        &self.upper
    }

    pub fn degree(&self) -> u32 {
        self.upper.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.upper.iter().all(|p| p.is_homogeneous(d))
    }

    /// The coefficient matrix `A_α`; the zero matrix if `α` does not occur.
    pub fn coeff(&self, alpha: &Monomial) -> RatMatrix {
        RatMatrix::from_fn(self.t, self.t, |i, j| self.entry(i, j).coeff(alpha))
    }

    /// All nonzero coefficient matrices, in graded-lex order.
    pub fn coefficients(&self) -> BTreeMap<Monomial, RatMatrix> {
        let mut out: BTreeMap<Monomial, RatMatrix> = BTreeMap::new();
        for i in 0..self.t {
            for j in i..self.t {
                for (m, c) in self.entry(i, j).terms() {
                    let a = out
                        .entry(m.clone())
                        .or_insert_with(|| RatMatrix::zeros(self.t, self.t));
                    a.set(i, j, c.clone());
                    a.set(j, i, c.clone());
                }
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> RatMatrix {
        let vals: Vec<Rat> = self.upper.iter().map(|p| p.eval(point)).collect();
        RatMatrix::from_fn(self.t, self.t, |i, j| vals[packed_index(self.t, i, j)].clone())
    }

    pub fn eval_f64(&self, point: &[f64]) -> DMatrix<f64> {
        let vals: Vec<f64> = self.upper.iter().map(|p| p.eval_f64(point)).collect();
        DMatrix::from_fn(self.t, self.t, |i, j| vals[packed_index(self.t, i, j)])
    }

    pub fn try_map(&self, f: impl Fn(&Poly) -> Result<Poly, PolyError>) -> Result<Self, PolyError> {
        let upper = self.upper.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        let nvars = upper.first().map_or(self.nvars, Poly::nvars);
        Ok(MatPoly {
            t: self.t,
            nvars,
            upper,
        })
    }

    /// Entrywise image under `x_i ↦ forms[i]`.
    pub fn substitute_linear(&self, forms: &[Poly]) -> Result<Self, PolyError> {
        let out = self.try_map(|p| p.substitute_linear(forms))?;
        Ok(MatPoly {
            nvars: forms.first().map_or(0, Poly::nvars),
            ..out
        })
    }

    pub fn homogenize(&self, d: u32) -> Result<Self, PolyError> {
        self.try_map(|p| p.homogenize(d))
    }

    pub fn checked_add(&self, other: &MatPoly) -> Result<Self, PolyError> {
        if self.t != other.t {
            return Err(PolyError::Shape(format!("{} vs {}", self.t, other.t)));
        }
        let upper = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatPoly {
            t: self.t,
            nvars: self.nvars,
            upper,
        })
    }

    /// First entry `(i, j)` with `i <= j` and the first monomial where the two
    /// matrices differ, or `None` when equal.
    pub fn first_difference(&self, other: &MatPoly) -> Option<(usize, usize, Monomial)> {
        for i in 0..self.t {
            for j in i..self.t {
                let diff = self.entry(i, j) - other.entry(i, j);
                let first = diff.terms().next().map(|(m, _)| m.clone());
                if let Some(m) = first {
                    return Some((i, j, m));
                }
            }
        }
        None
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|p| p.is_zero())
    }

    /// True when every entry is a constant (including the zero polynomial).
    pub fn is_constant(&self) -> bool {
        self.upper.iter().all(|p| p.degree() == 0)
    }

    pub fn constant_matrix(&self) -> RatMatrix {
        RatMatrix::from_fn(self.t, self.t, |i, j| {
            let p = self.entry(i, j);
            if p.is_zero() {
                Rat::zero()
            } else {
                p.constant_term()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat_int;

    fn paper_matrix() -> MatPoly {
        // Entries in (x, y).
        let t = |c: i64, e: [u32; 2]| (Monomial::new(e.to_vec()), rat_int(c));
        let f11 = Poly::from_terms(2, [t(-4, [2, 1]), t(7, [2, 0]), t(1, [0, 1]), t(3, [0, 0])]);
        let f12 = Poly::from_terms(2, [t(1, [3, 0]), t(5, [1, 1]), t(-3, [1, 0])]);
        let f22 = Poly::from_terms(
            2,
            [t(1, [4, 0]), t(1, [2, 1]), t(3, [2, 0]), t(-4, [0, 1]), t(6, [0, 0])],
        );
        MatPoly::from_rows(vec![
            vec![f11.clone().unwrap(), f12.clone().unwrap()],
            vec![f12.unwrap(), f22.unwrap()],
        ])
        .unwrap()
    }

    #[test]
    fn single_term_coefficients() {
        let x2 = Poly::var(1, 0).pow(2);
        let f = MatPoly::from_upper(2, 1, |i, j| match (i, j) {
            (0, 0) => x2.clone(),
            (1, 1) => x2.scale(&rat_int(2)),
            _ => Poly::zero(1),
        })
        .unwrap();
        assert_eq!(
            f.coeff(&Monomial::new(vec![2])),
            RatMatrix::from_i64(&[&[1, 0], &[0, 2]])
        );
        assert!(f.coeff(&Monomial::new(vec![1])).is_zero());
    }

    #[test]
    fn paper_matrix_coefficients_and_values() {
        let f = paper_matrix();
        assert_eq!(f.degree(), 4);
        assert_eq!(
            f.coeff(&Monomial::new(vec![2, 1])),
            RatMatrix::from_i64(&[&[-4, 0], &[0, 1]])
        );
        assert_eq!(
            f.eval(&[rat_int(0), rat_int(0)]),
            RatMatrix::from_i64(&[&[3, 0], &[0, 6]])
        );
        // Eigenvalue functions 6x²-4x²y-4y+6 and x⁴+x²y+4x²+y+3 give 4 and 10 at (1,1).
        let at = f.eval(&[rat_int(1), rat_int(1)]);
        let trace = at.get(0, 0) + at.get(1, 1);
        let det = at.get(0, 0) * at.get(1, 1) - at.get(0, 1) * at.get(1, 0);
        assert_eq!(trace, rat_int(14));
        assert_eq!(det, rat_int(40));
    }

    #[test]
    fn coefficients_reassemble() {
        let f = paper_matrix();
        let coeffs = f.coefficients();
        let back = MatPoly::from_coefficients(2, 2, coeffs.iter()).unwrap();
        assert_eq!(back, f);
        for a in coeffs.values() {
            assert!(a.is_symmetric());
        }
    }

    #[test]
    fn rejects_asymmetric_grid() {
        let rows = vec![
            vec![Poly::one(1), Poly::var(1, 0)],
            vec![Poly::zero(1), Poly::one(1)],
        ];
        assert_eq!(MatPoly::from_rows(rows), Err(PolyError::NotSymmetric(0, 1)));
    }
}
