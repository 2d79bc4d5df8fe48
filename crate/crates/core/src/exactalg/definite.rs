use nalgebra::SymmetricEigen;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat_round_f64, ExactError, Rat, RatMatrix};

fn check_symmetric(m: &RatMatrix) -> Result<(), ExactError> {
    if !m.is_square() {
        return Err(ExactError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_symmetric() {
        return Err(ExactError::NotSymmetric);
    }
    Ok(())
}

/// Fraction-free (Bareiss) elimination on a row-major `n x n` integer matrix.
///
/// Without pivoting, the k-th pivot equals the k-th leading principal minor,
/// so this returns the 1-based index of the first minor that is not positive,
/// or `None` when all are (Sylvester's criterion).
pub fn leading_minor_failure_int(mut a: Vec<BigInt>, n: usize) -> Option<usize> {
    debug_assert_eq!(a.len(), n * n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k * n + k].clone();
        if !pivot.is_positive() {
            return Some(k + 1);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &pivot - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = pivot;
    }
    None
}

/// 1-based index of the first non-positive leading principal minor of a
/// symmetric rational matrix, or `None` if it is positive definite.
pub fn leading_minor_failure(m: &RatMatrix) -> Result<Option<usize>, ExactError> {
    check_symmetric(m)?;
    let lcm = m
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints = m
        .entries()
        .iter()
        .map(|r| r.numer() * (&lcm / r.denom()))
        .collect();
    Ok(leading_minor_failure_int(ints, m.rows()))
}

pub fn is_positive_definite(m: &RatMatrix) -> Result<bool, ExactError> {
    Ok(leading_minor_failure(m)?.is_none())
}

/// Square-root-free factorization `M = Uᵀ·diag(D)·U` with `U` unit upper
/// triangular. Fails unless `M` is positive definite.
pub fn ldl_decompose(m: &RatMatrix) -> Result<(Vec<Rat>, RatMatrix), ExactError> {
    check_symmetric(m)?;
    let n = m.rows();
    let mut u = RatMatrix::identity(n);
    let mut d: Vec<Rat> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = m.get(j, j).clone();
        for k in 0..j {
            let ukj = u.get(k, j);
            if !ukj.is_zero() {
                dj -= ukj * ukj * &d[k];
            }
        }
        if !dj.is_positive() {
            return Err(ExactError::NotPositiveDefinite { minor: j + 1 });
        }
        for i in j + 1..n {
            let mut v = m.get(j, i).clone();
            for k in 0..j {
                v -= u.get(k, j) * u.get(k, i) * &d[k];
            }
            u.set(j, i, v / &dj);
        }
        d.push(dj);
    }
    Ok((d, u))
}

/// Largest absolute row sum; bounds the spectral radius of any square matrix.
pub fn gershgorin_bound(m: &RatMatrix) -> Rat {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum::<Rat>())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Exact positive semidefiniteness test by symmetric elimination: a zero
/// pivot is allowed only when the rest of its row is zero too.
pub fn is_positive_semidefinite(m: &RatMatrix) -> Result<bool, ExactError> {
    check_symmetric(m)?;
    let n = m.rows();
    let mut a = m.clone();
    for k in 0..n {
        let p = a.get(k, k).clone();
        if p.is_negative() {
            return Ok(false);
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !a.get(k, j).is_zero()) {
                return Ok(false);
            }
            continue;
        }
        for i in k + 1..n {
            let f = a.get(i, k) / &p;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    Ok(true)
}

/// `b·I - M ⪰ 0` and `b·I + M ⪰ 0`, i.e. `b ≥ ‖M‖₂`.
fn dominates(b: &Rat, m: &RatMatrix) -> bool {
    let n = m.rows();
    [Rat::one(), -Rat::one()].iter().all(|sign| {
        let shifted = RatMatrix::from_fn(n, n, |i, j| {
            let v = m.get(i, j) * sign;
            if i == j {
                b - v
            } else {
                -v
            }
        });
        is_positive_semidefinite(&shifted).unwrap_or(false)
    })
}

/// A rational upper bound on the spectral norm of a symmetric matrix.
///
/// A numeric eigensolve proposes `max |λ|` rounded to a multiple of 1e-9;
/// the candidate is accepted only once `b·I ± M` is exactly positive
/// semidefinite, and nudged upward otherwise. The accepted bound is then
/// multiplied by `1 + inflation`. If the search fails, the Gershgorin bound
/// is returned instead.
pub fn spectral_norm_upper(m: &RatMatrix, inflation: &Rat) -> Result<Rat, ExactError> {
    check_symmetric(m)?;
    if m.rows() == 0 || m.is_zero() {
        return Ok(Rat::zero());
    }
    let gersh = gershgorin_bound(m);
    let eig = SymmetricEigen::new(m.to_f64()).eigenvalues;
    let numeric = eig.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let step = Rat::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    let mut candidate = rat_round_f64(numeric, 1_000_000_000);
    for _ in 0..64 {
        if candidate >= gersh {
            return Ok(gersh);
        }
        if dominates(&candidate, m) {
            return Ok(candidate * (Rat::one() + inflation));
        }
        let bump = (&candidate * &step).max(step.clone());
        candidate += bump;
    }
    Ok(gersh)
}

#[cfg(test)]
mod tests {
    use super::super::{rat, rat_int, rat_to_f64};
    use super::*;

    #[test]
    fn sylvester_examples() {
        assert!(is_positive_definite(&RatMatrix::from_i64(&[&[2, 1], &[1, 2]])).unwrap());
        assert!(!is_positive_definite(&RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).unwrap());
        assert_eq!(
            leading_minor_failure(&RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).unwrap(),
            Some(2)
        );
        assert_eq!(
            leading_minor_failure(&RatMatrix::from_i64(&[&[0, 0], &[0, 1]])).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        assert_eq!(is_positive_definite(&m), Err(ExactError::NotSymmetric));
        assert!(is_positive_definite(&RatMatrix::from_i64(&[&[1, 2]])).is_err());
    }

    #[test]
    fn ldl_of_small_matrix() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        let (d, u) = ldl_decompose(&m).unwrap();
        assert_eq!(d, vec![rat_int(2), rat(3, 2)]);
        assert_eq!(
            u,
            RatMatrix::from_rows(vec![vec![rat_int(1), rat(1, 2)], vec![rat_int(0), rat_int(1)]])
                .unwrap()
        );
        let back = u
            .transpose()
            .checked_mul(&RatMatrix::diagonal(&d))
            .unwrap()
            .checked_mul(&u)
            .unwrap();
        assert_eq!(back, m);
        assert!(ldl_decompose(&RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).is_err());
    }

    #[test]
    fn semidefinite_examples() {
        assert!(is_positive_semidefinite(&RatMatrix::from_i64(&[&[0, 0], &[0, 1]])).unwrap());
        assert!(is_positive_semidefinite(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap());
        assert!(!is_positive_semidefinite(&RatMatrix::from_i64(&[&[0, 1], &[1, 1]])).unwrap());
        assert!(!is_positive_semidefinite(&RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).unwrap());
    }

    #[test]
    fn spectral_bound_on_diagonal_hits_gershgorin() {
        let m = RatMatrix::from_i64(&[&[3, 0], &[0, -5]]);
        assert_eq!(spectral_norm_upper(&m, &Rat::zero()).unwrap(), rat_int(5));
    }

    #[test]
    fn spectral_bound_on_swap_matrix() {
        let m = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let b = spectral_norm_upper(&m, &rat(1, 100)).unwrap();
        assert!(b >= rat_int(1) && b <= rat_int(2));
        assert!(rat_to_f64(&b) <= 1.0101);
    }

    #[test]
    fn spectral_bound_on_paper_block() {
        // [[79/2, -2], [-2, 85/2]] has eigenvalues 41 ± 5/2.
        let m = RatMatrix::from_rows(vec![
            vec![rat(79, 2), rat_int(-2)],
            vec![rat_int(-2), rat(85, 2)],
        ])
        .unwrap();
        assert_eq!(spectral_norm_upper(&m, &Rat::zero()).unwrap(), rat(87, 2));
        assert_eq!(
            spectral_norm_upper(&m, &rat(1, 100)).unwrap(),
            rat(87, 2) * rat(101, 100)
        );
    }
}
