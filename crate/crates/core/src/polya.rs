//! Coefficients of `(Σ Y_i)^N · G` for a homogeneous matrix polynomial `G`.
//!
//! All coefficients share one denominator (the lcm of the denominators of
//! `G`), so each level is stored as integer matrices in a dense array indexed
//! by the rank of the exponent among all exponents of that degree. A level is
//! obtained from the previous one by `next[α] = Σ_i prev[α - e_i]`.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exactalg::{leading_minor_failure_int, Rat, RatMatrix};
use crate::polyring::{MatPoly, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyaError {
    #[error("matrix polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("no level up to N = {cap} has all coefficients positive definite (last failure at {alpha}, leading minor {minor})")]
    Exhausted {
        cap: u64,
        alpha: Monomial,
        minor: usize,
    },
    #[error("level N = {n} needs about {} MB for {points} coefficients, above the {} MB cap", mb(*.needed_bytes), mb(*.cap_bytes))]
    MemoryCap {
        n: u64,
        points: u128,
        needed_bytes: u64,
        cap_bytes: u64,
    },
    #[error("time limit reached before level N = {n} (not resumable)")]
    TimeLimit { n: u64 },
}

fn mb(bytes: u64) -> String {
    format!("{:.1}", bytes as f64 / (1u64 << 20) as f64)
}

/// Resource limits for an expansion.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_bytes: u64,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_bytes: 2048 << 20,
            deadline: None,
        }
    }
}

/// Outcome of checking every coefficient of a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sweep {
    AllPd,
    /// First coefficient (in graded-lex order) that is not positive
    /// definite, with the 1-based index of its first non-positive leading minor.
    Failure { alpha: Monomial, minor: usize },
}

/// Progress report emitted after each level is swept.
#[derive(Clone, Debug)]
pub struct Progress {
    pub n: u64,
    pub points: usize,
    pub sweep: Sweep,
}

/// Binomial coefficients `C(a, b)` for `a <= rows`, `b <= cols`, saturating.
struct Binomials {
    cols: usize,
    table: Vec<u128>,
}

impl Binomials {
    fn new(rows: usize, cols: usize) -> Self {
        let mut table = vec![0u128; (rows + 1) * (cols + 1)];
        for a in 0..=rows {
            for b in 0..=cols.min(a) {
                table[a * (cols + 1) + b] = if b == 0 || b == a {
                    1
                } else {
                    table[(a - 1) * (cols + 1) + b - 1].saturating_add(table[(a - 1) * (cols + 1) + b])
                };
            }
        }
        Binomials { cols, table }
    }

    fn get(&self, a: usize, b: usize) -> u128 {
        if b > a {
            0
        } else {
            self.table[a * (self.cols + 1) + b]
        }
    }
}

/// Number of exponents of degree `k` in `m` variables.
pub fn lattice_size(m: usize, k: u64) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..m as u128 {
        acc = match acc.checked_mul(k as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Position of `alpha` among exponents of the same degree in graded-lex order.
fn rank(alpha: &[u32], binom: &Binomials) -> usize {
    let m = alpha.len();
    let mut rem: u64 = alpha.iter().map(|&a| a as u64).sum();
    let mut r: u128 = 0;
    for (i, &a) in alpha.iter().enumerate().take(m.saturating_sub(1)) {
        let a = a as u64;
        if rem > a {
            let k = m - i - 1;
            r += binom.get((rem - a - 1) as usize + k, k);
        }
        rem -= a;
    }
    r as usize
}

/// All exponents of degree `k` in `m` variables, flattened, in rank order.
fn exponents(m: usize, k: u32) -> Vec<u32> {
    fn go(k: u32, m: usize, prefix: &mut Vec<u32>, out: &mut Vec<u32>) {
        if m == 1 {
            out.extend_from_slice(prefix);
            out.push(k);
            return;
        }
        for v in (0..=k).rev() {
            prefix.push(v);
            go(k - v, m - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Coefficients of `(Σ Y_i)^n · G`, scaled to integers by `denom`.
#[derive(Clone, Debug)]
pub struct PolyaExpansion {
    m: usize,
    t: usize,
    d: u32,
    n: u64,
    denom: BigInt,
    exps: Vec<u32>,
    coeffs: Vec<BigInt>,
}

fn tri(t: usize) -> usize {
    t * (t + 1) / 2
}

impl PolyaExpansion {
    /// Level 0: the coefficients of `G` itself.
    fn level_zero(g: &MatPoly) -> Result<Self, PolyaError> {
        let d = g.degree();
        if !g.is_homogeneous(d) {
            return Err(PolyaError::NotHomogeneous);
        }
        let (m, t) = (g.nvars(), g.size());
        let denom = g
            .upper_entries()
            .iter()
            .flat_map(|p| p.terms().map(|(_, c)| c.denom().clone()))
            .fold(BigInt::one(), |acc, q| acc.lcm(&q));
        let exps = exponents(m, d);
        let binom = Binomials::new(d as usize + m, m);
        let mut coeffs = vec![BigInt::zero(); (exps.len() / m.max(1)) * tri(t)];
        for (k, p) in g.upper_entries().iter().enumerate() {
            for (mono, c) in p.terms() {
                let idx = rank(mono.exponents(), &binom);
                coeffs[idx * tri(t) + k] = c.numer() * (&denom / c.denom());
            }
        }
        Ok(PolyaExpansion {
            m,
            t,
            d,
            n: 0,
            denom,
            exps,
            coeffs,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `N`, the power of `Σ Y_i` applied.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Total degree `N + d` of every coefficient's monomial.
    pub fn degree(&self) -> u64 {
        self.n + self.d as u64
    }

    pub fn len(&self) -> usize {
        self.exps.len() / self.m.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn exponent(&self, idx: usize) -> &[u32] {
        &self.exps[idx * self.m..(idx + 1) * self.m]
    }

    fn int_matrix(&self, idx: usize) -> Vec<BigInt> {
        let t = self.t;
        let packed = &self.coeffs[idx * tri(t)..(idx + 1) * tri(t)];
        let mut full = vec![BigInt::zero(); t * t];
        let mut k = 0;
        for i in 0..t {
            for j in i..t {
                full[i * t + j] = packed[k].clone();
                full[j * t + i] = packed[k].clone();
                k += 1;
            }
        }
        full
    }

    fn rat_matrix(&self, idx: usize) -> RatMatrix {
        let full = self.int_matrix(idx);
        let t = self.t;
        RatMatrix::from_fn(t, t, |i, j| Rat::new(full[i * t + j].clone(), self.denom.clone()))
    }

    /// The coefficient matrix at `alpha` (zero if the degree does not match).
    pub fn coefficient(&self, alpha: &Monomial) -> RatMatrix {
        if alpha.nvars() != self.m || alpha.degree() as u64 != self.degree() {
            return RatMatrix::zeros(self.t, self.t);
        }
        let binom = Binomials::new(self.degree() as usize + self.m, self.m);
        self.rat_matrix(rank(alpha.exponents(), &binom))
    }

    /// All `(α, F_α)` pairs in graded-lex order, zero matrices included.
    pub fn terms(&self) -> Vec<(Monomial, RatMatrix)> {
        (0..self.len())
            .into_par_iter()
            .map(|i| (Monomial::new(self.exponent(i).to_vec()), self.rat_matrix(i)))
            .collect()
    }

    /// Reassembles `Σ_α F_α·Y^α` as a matrix polynomial.
    pub fn to_matpoly(&self) -> MatPoly {
        let terms = self.terms();
        MatPoly::from_coefficients(self.t, self.m, terms.iter().map(|(a, f)| (a, f)))
            .expect("consistent shapes")
    }

    /// Checks every coefficient for exact positive definiteness and reports
    /// the first failure in graded-lex order.
    pub fn pd_sweep(&self) -> Sweep {
        let failing = (0..self.len())
            .into_par_iter()
            .map(|i| leading_minor_failure_int(self.int_matrix(i), self.t));
        let found = failing
            .enumerate()
            .filter_map(|(i, f)| f.map(|minor| (i, minor)))
            .min_by_key(|&(i, _)| i);
        match found {
            None => Sweep::AllPd,
            Some((i, minor)) => Sweep::Failure {
                alpha: Monomial::new(self.exponent(i).to_vec()),
                minor,
            },
        }
    }

    fn max_limbs(&self) -> u64 {
        self.coeffs
            .par_iter()
            .map(|c| c.bits().div_ceil(64))
            .max()
            .unwrap_or(0)
    }

    /// Rough memory needed to hold this level and the next.
    fn next_level_bytes(&self) -> (u128, u128) {
        let points = lattice_size(self.m, self.degree() + 1);
        // One more limb allows for growth within the step.
        let per = 32 + 8 * (self.max_limbs() as u128 + 1);
        let bytes = (points.saturating_add(self.len() as u128))
            .saturating_mul(tri(self.t) as u128)
            .saturating_mul(per);
        (points, bytes)
    }

    /// Multiplies by `Σ Y_i` once.
    fn step(&self) -> PolyaExpansion {
        let m = self.m;
        let tr = tri(self.t);
        let k = self.degree() as u32 + 1;
        let exps = exponents(m, k);
        let count = exps.len() / m;
        let binom = Binomials::new(k as usize + m, m);
        let mut coeffs = vec![BigInt::zero(); count * tr];
        coeffs
            .par_chunks_mut(tr)
            .enumerate()
            .for_each(|(idx, out)| {
                let mut alpha = exps[idx * m..(idx + 1) * m].to_vec();
                for i in 0..m {
                    if alpha[i] == 0 {
                        continue;
                    }
                    alpha[i] -= 1;
                    let src = rank(&alpha, &binom);
                    alpha[i] += 1;
                    for (o, v) in out.iter_mut().zip(&self.coeffs[src * tr..(src + 1) * tr]) {
                        *o += v;
                    }
                }
            });
        PolyaExpansion {
            m,
            t: self.t,
            d: self.d,
            n: self.n + 1,
            denom: self.denom.clone(),
            exps,
            coeffs,
        }
    }

    fn checked_step(&self, limits: &Limits) -> Result<PolyaExpansion, PolyaError> {
        if limits.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(PolyaError::TimeLimit { n: self.n + 1 });
        }
        let (points, bytes) = self.next_level_bytes();
        if bytes > limits.max_bytes as u128 {
            return Err(PolyaError::MemoryCap {
                n: self.n + 1,
                points,
                needed_bytes: bytes.min(u64::MAX as u128) as u64,
                cap_bytes: limits.max_bytes,
            });
        }
        Ok(self.step())
    }
}

/// Coefficients of `(Σ Y_i)^n · G`.
pub fn expand(g: &MatPoly, n: u64, limits: &Limits) -> Result<PolyaExpansion, PolyaError> {
    let mut e = PolyaExpansion::level_zero(g)?;
    while e.n < n {
        e = e.checked_step(limits)?;
    }
    Ok(e)
}

/// The smallest `N <= n_cap` whose coefficients are all positive definite.
///
/// Each level is built from the previous one, and `progress` is called after
/// every sweep. Once a level passes, every later level passes too, since
/// each of its coefficients is a sum of earlier ones.
pub fn find_minimal_n(
    g: &MatPoly,
    n_cap: u64,
    limits: &Limits,
    mut progress: impl FnMut(&Progress),
) -> Result<PolyaExpansion, PolyaError> {
    let mut e = PolyaExpansion::level_zero(g)?;
    loop {
        let sweep = e.pd_sweep();
        progress(&Progress {
            n: e.n,
            points: e.len(),
            sweep: sweep.clone(),
        });
        match sweep {
            Sweep::AllPd => return Ok(e),
            Sweep::Failure { alpha, minor } => {
                if e.n >= n_cap {
                    return Err(PolyaError::Exhausted {
                        cap: n_cap,
                        alpha,
                        minor,
                    });
                }
            }
        }
        e = e.checked_step(limits)?;
    }
}
