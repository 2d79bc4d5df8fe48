use num_traits::{One, Zero};

use super::{ExactError, Rat, RatMatrix};

/// Result of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent,
    /// A particular solution (free variables set to zero) and a basis of the
    /// homogeneous solution space.
    Solved {
        particular: Vec<Rat>,
        nullspace: Vec<Vec<Rat>>,
    },
}

/// Reduces `m` in place to reduced row echelon form and returns the pivot
/// columns, in order. Only the first `ncols` columns are eligible as pivots.
pub fn rref(m: &mut [Vec<Rat>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (v, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(a: &RatMatrix) -> usize {
    let mut rows = a.to_rows();
    rref(&mut rows, a.cols()).len()
}

fn nullspace_from_rref(reduced: &[Vec<Rat>], pivots: &[usize], ncols: usize) -> Vec<Vec<Rat>> {
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[r][f].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{x : A x = 0}`, one vector per free column of the RREF.
pub fn nullspace(a: &RatMatrix) -> Vec<Vec<Rat>> {
    let mut rows = a.to_rows();
    let pivots = rref(&mut rows, a.cols());
    nullspace_from_rref(&rows, &pivots, a.cols())
}

pub fn solve_linear(a: &RatMatrix, b: &[Rat]) -> Result<LinearSolution, ExactError> {
    if a.rows() != b.len() {
        return Err(ExactError::DimensionMismatch(format!(
            "{} equations but right-hand side of length {}",
            a.rows(),
            b.len()
        )));
    }
    let n = a.cols();
    let mut aug: Vec<Vec<Rat>> = (0..a.rows())
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    let consistent = aug[pivots.len()..].iter().all(|r| r[n].is_zero());
    if !consistent {
        return Ok(LinearSolution::Inconsistent);
    }
    let mut particular = vec![Rat::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = aug[r][n].clone();
    }
    let nullspace = nullspace_from_rref(&aug, &pivots, n);
    Ok(LinearSolution::Solved {
        particular,
        nullspace,
    })
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The unique solution of `A x = b` orthogonal to the nullspace of `A`
/// (the minimum Euclidean norm solution), or `None` when inconsistent.
pub fn min_norm_solution(a: &RatMatrix, b: &[Rat]) -> Result<Option<Vec<Rat>>, ExactError> {
    let LinearSolution::Solved {
        particular,
        nullspace,
    } = solve_linear(a, b)?
    else {
        return Ok(None);
    };
    if nullspace.is_empty() {
        return Ok(Some(particular));
    }
    // Project out the nullspace component: solve (N^T N) w = N^T p, x = p - N w.
    let k = nullspace.len();
    let gram = RatMatrix::from_fn(k, k, |i, j| dot(&nullspace[i], &nullspace[j]));
    let rhs: Vec<Rat> = nullspace.iter().map(|v| dot(v, &particular)).collect();
    let LinearSolution::Solved { particular: w, .. } = solve_linear(&gram, &rhs)? else {
        unreachable!("Gram matrix of a basis is nonsingular");
    };
    let mut x = particular;
    for (wi, v) in w.iter().zip(&nullspace) {
        for (xj, vj) in x.iter_mut().zip(v) {
            *xj -= wi * vj;
        }
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::super::{rat, rat_int};
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn underdetermined_single_equation() {
        let sol = solve_linear(&RatMatrix::from_i64(&[&[1, 1]]), &ints(&[1])).unwrap();
        assert_eq!(
            sol,
            LinearSolution::Solved {
                particular: ints(&[1, 0]),
                nullspace: vec![ints(&[-1, 1])],
            }
        );
    }

    #[test]
    fn identity_system_is_unique() {
        let sol = solve_linear(&RatMatrix::identity(2), &ints(&[3, 4])).unwrap();
        assert_eq!(
            sol,
            LinearSolution::Solved {
                particular: ints(&[3, 4]),
                nullspace: vec![],
            }
        );
    }

    #[test]
    fn contradictory_rows_are_inconsistent() {
        let a = RatMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve_linear(&a, &ints(&[1, 3])).unwrap(), LinearSolution::Inconsistent);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(solve_linear(&RatMatrix::identity(2), &ints(&[1])).is_err());
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_kernel() {
        // x1 + x2 = 1: minimum-norm solution is (1/2, 1/2).
        let x = min_norm_solution(&RatMatrix::from_i64(&[&[1, 1]]), &ints(&[1]))
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn rank_and_nullspace_dimension_add_up() {
        let a = RatMatrix::from_i64(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }
}
