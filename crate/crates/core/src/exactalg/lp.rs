//! A small dense two-phase simplex method over exact rationals.
//!
//! Instances in this crate have a handful of rows and columns, so the tableau
//! is dense and reduced costs are recomputed every pivot. Bland's rule keeps
//! it from cycling.

use num_traits::{One, Signed, Zero};

use super::{ExactError, Rat, RatMatrix};

/// `maximize objective·x` subject to `eq` rows (`a·x = b`), `le` rows
/// (`a·x <= b`), and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<Rat>,
    pub eq: Vec<(Vec<Rat>, Rat)>,
    pub le: Vec<(Vec<Rat>, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Unbounded,
    Infeasible,
}

struct Tableau {
    rows: Vec<Vec<Rat>>, // last entry is the right-hand side
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations maximizing `obj`; columns `>= allowed` never enter.
    /// Returns `false` when unbounded.
    fn optimize(&mut self, obj: &[Rat], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = obj[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !obj[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &obj[b] * &self.rows[i][j];
                    }
                }
                reduced.is_positive()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }

    fn value(&self, obj: &[Rat]) -> Rat {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| &obj[b] * self.rhs(i))
            .sum()
    }
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram {
            objective: vec![Rat::zero(); nvars],
            ..Default::default()
        }
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> Result<LpOutcome, ExactError> {
        let n = self.nvars();
        if self.eq.iter().chain(&self.le).any(|(a, _)| a.len() != n) {
            return Err(ExactError::DimensionMismatch("constraint row length".into()));
        }
        let nslack = self.le.len();
        let nrows = self.eq.len() + nslack;
        let ncols = n + nslack + nrows;
        let art0 = n + nslack;

        let mut rows = Vec::with_capacity(nrows);
        for (k, (a, b)) in self.eq.iter().chain(&self.le).enumerate() {
            let mut row = vec![Rat::zero(); ncols + 1];
            row[..n].clone_from_slice(a);
            if k >= self.eq.len() {
                row[n + k - self.eq.len()] = Rat::one();
            }
            row[ncols] = b.clone();
            if b.is_negative() {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            row[art0 + k] = Rat::one();
            rows.push(row);
        }
        let mut tab = Tableau {
            rows,
            basis: (art0..art0 + nrows).collect(),
            ncols,
        };

        // Phase one: drive the artificial variables to zero.
        let mut phase1 = vec![Rat::zero(); ncols];
        for v in &mut phase1[art0..] {
            *v = -Rat::one();
        }
        tab.optimize(&phase1, ncols);
        if tab.value(&phase1).is_negative() {
            return Ok(LpOutcome::Infeasible);
        }
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art0 {
                match (0..art0).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        // Redundant constraint.
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let mut obj = vec![Rat::zero(); ncols];
        obj[..n].clone_from_slice(&self.objective);
        if !tab.optimize(&obj, art0) {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![Rat::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < n {
                x[b] = tab.rhs(i).clone();
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

/// Finds `c` with `A c = b` and every `c_i > 0`, maximizing `min c_i`.
///
/// Returns `None` when no strictly positive solution exists. Writes
/// `c = z + τ·1` with `z, τ >= 0` and maximizes `τ`; if that LP is unbounded
/// the extra cap `τ <= 1` is added, which still yields a valid positive
/// solution.
pub fn positive_combination(a: &RatMatrix, b: &[Rat]) -> Result<Option<Vec<Rat>>, ExactError> {
    if a.rows() != b.len() {
        return Err(ExactError::DimensionMismatch(format!(
            "{} equations but right-hand side of length {}",
            a.rows(),
            b.len()
        )));
    }
    let m = a.cols();
    let build = |capped: bool| {
        let mut lp = LinearProgram::new(m + 1);
        lp.objective[m] = Rat::one();
        for (i, bi) in b.iter().enumerate() {
            let mut row = a.row(i).to_vec();
            row.push(a.row(i).iter().sum());
            lp.eq.push((row, bi.clone()));
        }
        if capped {
            let mut row = vec![Rat::zero(); m + 1];
            row[m] = Rat::one();
            lp.le.push((row, Rat::one()));
        }
        lp
    };
    let mut outcome = build(false).solve()?;
    if outcome == LpOutcome::Unbounded {
        outcome = build(true).solve()?;
    }
    match outcome {
        LpOutcome::Optimal { x, .. } if x[m].is_positive() => {
            let tau = &x[m];
            Ok(Some(x[..m].iter().map(|z| z + tau).collect()))
        }
        _ => Ok(None),
    }
}
