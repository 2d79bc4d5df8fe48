//! Numeric estimates of the constants that feed the degree bound: the
//! eigenvalue minima `m1`, `m2`, the shift `c`, the floor `λ`, the Pólya
//! constant `C` and the bound `N` itself.
//!
//! Minima over the simplex are estimated by a deterministic lattice scan
//! followed by local refinement. The estimates only steer the search; the
//! exact sweep in [`crate::polya`] decides whether a certificate exists.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    is_positive_definite, rat_floor_f64, rat_to_f64, spectral_norm_upper, ExactError, Rat,
};
use crate::polyring::{factorial, MatPoly, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("matrix is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("the sampled eigenvalue floor is not positive")]
    NonPositiveLambda,
    #[error("degenerate region: the shift polynomial vanishes where the lifted matrix is not positive definite")]
    DegenerateRegion,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Deterministic sampler over the standard simplex in `m` coordinates.
///
/// Points are lattice points `k / r` with `Σ k_i = r`, so every sample lies
/// exactly in the simplex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexSampler {
    pub m: usize,
    pub base_resolution: u32,
    pub refine_rounds: u32,
    pub seed: u64,
    /// Upper limit on the number of lattice points; the resolution is lowered
    /// until the lattice fits.
    pub max_points: usize,
}

const REFINE_CANDIDATES: usize = 8;
const CLIMB_STEPS: usize = 200;

impl SimplexSampler {
    pub fn new(m: usize) -> Self {
        SimplexSampler {
            m,
            base_resolution: 24,
            refine_rounds: 3,
            seed: 0,
            max_points: 200_000,
        }
    }

    /// Resolution actually used: `base_resolution`, lowered while the lattice
    /// exceeds `max_points`.
    pub fn resolution(&self) -> u32 {
        let mut r = self.base_resolution.max(1);
        while r > 1 && lattice_size(self.m, r).is_none_or(|s| s > self.max_points as u128) {
            r -= 1;
        }
        r
    }

    /// All lattice points of the simplex at [`resolution`](Self::resolution),
    /// as numerators over the resolution.
    pub fn lattice(&self) -> Vec<Vec<u64>> {
        compositions(self.resolution() as u64, self.m)
    }

    /// Minimizes `f` over the simplex. `f` receives numerators and a common
    /// denominator; `+∞` marks points to ignore. Returns `None` when every
    /// sampled value is infinite.
    pub fn minimize<F>(&self, f: F) -> Option<SampledMin>
    where
        F: Fn(&[u64], u64) -> f64 + Sync,
    {
        let r = self.resolution() as u64;
        let grid = self.lattice();
        let values: Vec<f64> = grid.par_iter().map(|p| f(p, r)).collect();
        let mut order: Vec<usize> = (0..grid.len()).filter(|&i| values[i].is_finite()).collect();
        if order.is_empty() {
            return None;
        }
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        order.truncate(REFINE_CANDIDATES);

        let refined: Vec<(f64, Vec<u64>, u64)> = order
            .par_iter()
            .enumerate()
            .map(|(rank, &i)| self.refine(&f, grid[i].clone(), r, values[i], rank as u64))
            .collect();
        let (value, num, den) = refined
            .into_iter()
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .expect("at least one candidate");
        let point = num
            .iter()
            .map(|&k| Rat::new(BigInt::from(k), BigInt::from(den)))
            .collect();
        Some(SampledMin { value, point })
    }

    fn refine<F>(&self, f: &F, mut num: Vec<u64>, mut den: u64, mut best: f64, rank: u64) -> (f64, Vec<u64>, u64)
    where
        F: Fn(&[u64], u64) -> f64 + Sync,
    {
        let m = self.m;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ rank);
        for _ in 0..self.refine_rounds {
            num.iter_mut().for_each(|k| *k *= 2);
            den *= 2;
            for _ in 0..CLIMB_STEPS {
                let mut moves: Vec<(usize, usize, u64)> = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        if i != j {
                            moves.push((i, j, 1));
                        }
                    }
                }
                if m > 1 {
                    for _ in 0..m {
                        let i = rng.gen_range(0..m);
                        let j = (i + rng.gen_range(1..m)) % m;
                        moves.push((i, j, rng.gen_range(2..=4)));
                    }
                }
                let mut improved: Option<(f64, Vec<u64>)> = None;
                for (i, j, step) in moves {
                    if num[j] < step {
                        continue;
                    }
                    let mut cand = num.clone();
                    cand[i] += step;
                    cand[j] -= step;
                    let v = f(&cand, den);
                    let current = improved.as_ref().map_or(best, |c| c.0);
                    if v < current {
                        improved = Some((v, cand));
                    }
                }
                match improved {
                    Some((v, cand)) => {
                        best = v;
                        num = cand;
                    }
                    None => break,
                }
            }
        }
        (best, num, den)
    }
}

fn lattice_size(m: usize, r: u32) -> Option<u128> {
    // C(r + m - 1, m - 1)
    let mut acc: u128 = 1;
    for i in 1..m as u128 {
        acc = acc.checked_mul(r as u128 + i)? / i;
    }
    Some(acc)
}

/// Compositions of `r` into `m` nonnegative parts, in reverse lexicographic order.
fn compositions(r: u64, m: usize) -> Vec<Vec<u64>> {
    fn go(r: u64, m: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if m == 1 {
            prefix.push(r);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=r).rev() {
            prefix.push(k);
            go(r - k, m - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        go(r, m, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

/// Smallest sampled value and where it was attained.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMin {
    pub value: f64,
    pub point: Vec<Rat>,
}

/// Floating point copy of a polynomial for fast evaluation.
struct FloatPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    fn new(p: &Poly) -> Self {
        FloatPoly {
            terms: p
                .terms()
                .map(|(m, c)| (m.exponents().to_vec(), rat_to_f64(c)))
                .collect(),
        }
    }

    fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(y)
                    .fold(*c, |acc, (&k, x)| if k == 0 { acc } else { acc * x.powi(k as i32) })
            })
            .sum()
    }
}

struct FloatMatPoly {
    t: usize,
    entries: Vec<FloatPoly>,
}

impl FloatMatPoly {
    fn new(g: &MatPoly) -> Self {
        FloatMatPoly {
            t: g.size(),
            entries: g.upper_entries().iter().map(FloatPoly::new).collect(),
        }
    }

    fn eval(&self, y: &[f64]) -> DMatrix<f64> {
        let vals: Vec<f64> = self.entries.iter().map(|p| p.eval(y)).collect();
        let t = self.t;
        let mut out = DMatrix::zeros(t, t);
        let mut k = 0;
        for i in 0..t {
            for j in i..t {
                out[(i, j)] = vals[k];
                out[(j, i)] = vals[k];
                k += 1;
            }
        }
        out
    }
}

fn to_f64_point(num: &[u64], den: u64) -> Vec<f64> {
    num.iter().map(|&k| k as f64 / den as f64).collect()
}

fn to_rat_point(num: &[u64], den: u64) -> Vec<Rat> {
    num.iter()
        .map(|&k| Rat::new(BigInt::from(k), BigInt::from(den)))
        .collect()
}

fn min_eigenvalue(a: DMatrix<f64>) -> f64 {
    match a.nrows() {
        0 => f64::INFINITY,
        1 => a[(0, 0)],
        2 => {
            let (p, q, r) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
            (p + r) / 2.0 - ((p - r) / 2.0).hypot(q)
        }
        _ => SymmetricEigen::new(a).eigenvalues.min(),
    }
}

/// Smallest sampled eigenvalue of `G(y)` over the simplex; an upper bound
/// on the true minimum.
pub fn min_eig_on_simplex(g: &MatPoly, sampler: &SimplexSampler) -> SampledMin {
    let fg = FloatMatPoly::new(g);
    let mut best = sampler
        .minimize(|num, den| min_eigenvalue(fg.eval(&to_f64_point(num, den))))
        .expect("eigenvalues are finite");
    // Re-evaluate the winner from exactly computed entries.
    best.value = min_eigenvalue(g.eval(&best.point).to_f64());
    best
}

/// Smallest sampled value of `R` over simplex points where `Ft` is not
/// positive definite, or `None` when no sampled point qualifies.
///
/// Membership is decided exactly whenever the numeric eigenvalue is close to
/// zero, so boundary points of the region are classified correctly, and `R`
/// is evaluated exactly before rounding.
pub fn region_min_r(ft: &MatPoly, r_sq: &Poly, sampler: &SimplexSampler) -> Option<SampledMin> {
    let fg = FloatMatPoly::new(ft);
    sampler.minimize(|num, den| {
        let y = to_f64_point(num, den);
        let a = fg.eval(&y);
        let scale = a.amax().max(1.0);
        let v = min_eigenvalue(a);
        let point = to_rat_point(num, den);
        let in_region = if v > 1e-7 * scale {
            false
        } else if v < -1e-7 * scale {
            true
        } else {
            !is_positive_definite(&ft.eval(&point)).unwrap_or(false)
        };
        if in_region {
            rat_to_f64(&r_sq.eval(&point))
        } else {
            f64::INFINITY
        }
    })
}

/// Minimum of each eigenvalue branch of `G` over the sampling lattice.
///
/// Branches are numbered by ascending eigenvalue at the lattice point nearest
/// the barycenter and followed across the lattice by eigenvector continuity,
/// so crossing eigenvalues keep their identity. Where eigenvalues coincide
/// the eigenvectors are inherited from the neighbour the point was reached
/// from.
pub fn eigen_branch_minima(g: &MatPoly, sampler: &SimplexSampler) -> Vec<f64> {
    let t = g.size();
    let fg = FloatMatPoly::new(g);
    let r = sampler.resolution() as u64;
    let grid = sampler.lattice();
    let eig: Vec<SymmetricEigen<f64, nalgebra::Dyn>> = grid
        .par_iter()
        .map(|p| SymmetricEigen::new(fg.eval(&to_f64_point(p, r))))
        .collect();
    let index: HashMap<&[u64], usize> = grid.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();

    let m = sampler.m;
    let mut start = vec![r / m as u64; m];
    for k in start.iter_mut().take((r % m as u64) as usize) {
        *k += 1;
    }
    let s = index[start.as_slice()];

    // Per visited point: eigenvector carried by each branch.
    let mut vectors: Vec<Option<Vec<DVector<f64>>>> = vec![None; grid.len()];
    let mut minima = vec![f64::INFINITY; t];
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| eig[s].eigenvalues[a].total_cmp(&eig[s].eigenvalues[b]));
    vectors[s] = Some(order.iter().map(|&k| eig[s].eigenvectors.column(k).into_owned()).collect());
    for (b, &k) in order.iter().enumerate() {
        minima[b] = eig[s].eigenvalues[k];
    }

    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let parent = vectors[u].clone().expect("visited");
        for i in 0..m {
            for j in 0..m {
                if i == j || grid[u][j] == 0 {
                    continue;
                }
                let mut q = grid[u].clone();
                q[i] += 1;
                q[j] -= 1;
                let v = index[q.as_slice()];
                if vectors[v].is_some() {
                    continue;
                }
                let (assigned, vecs) = match_branches(&parent, &eig[v]);
                for b in 0..t {
                    minima[b] = minima[b].min(assigned[b]);
                }
                vectors[v] = Some(vecs);
                queue.push_back(v);
            }
        }
    }
    minima
}

/// Greedy maximum-overlap matching of parent branch vectors to the
/// eigenpairs at a neighbouring point.
fn match_branches(
    parent: &[DVector<f64>],
    e: &SymmetricEigen<f64, nalgebra::Dyn>,
) -> (Vec<f64>, Vec<DVector<f64>>) {
    let t = parent.len();
    let scale = e.eigenvalues.amax().max(1.0);
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(t * t);
    for (b, pv) in parent.iter().enumerate() {
        for k in 0..t {
            pairs.push((pv.dot(&e.eigenvectors.column(k)).abs(), b, k));
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut branch_of = vec![usize::MAX; t];
    let mut taken = vec![false; t];
    for (_, b, k) in pairs {
        if branch_of[b] == usize::MAX && !taken[k] {
            branch_of[b] = k;
            taken[k] = true;
        }
    }
    let mut values = Vec::with_capacity(t);
    let mut vecs = Vec::with_capacity(t);
    for b in 0..t {
        let k = branch_of[b];
        let val = e.eigenvalues[k];
        let degenerate = (0..t).any(|l| l != k && (e.eigenvalues[l] - val).abs() < 1e-9 * scale);
        values.push(val);
        vecs.push(if degenerate {
            parent[b].clone()
        } else {
            e.eigenvectors.column(k).into_owned()
        });
    }
    (values, vecs)
}

/// Chosen shift and the threshold it exceeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftChoice {
    /// `-m1/m2` as an exact rational, when a shift is needed.
    pub threshold: Option<Rat>,
    pub c: Rat,
}

/// Smallest integer strictly above `-m1/m2 · (1 + margin)`; zero when
/// `m1 > 0` or the region is empty (`m2 = None`).
pub fn choose_c(m1: f64, m2: Option<f64>, margin: &Rat) -> Result<ShiftChoice, BoundsError> {
    let zero = ShiftChoice {
        threshold: None,
        c: Rat::zero(),
    };
    if m1 > 0.0 {
        return Ok(zero);
    }
    let Some(m2) = m2 else {
        return Ok(zero);
    };
    if m2 <= 0.0 {
        return Err(BoundsError::DegenerateRegion);
    }
    let m1r = Rat::from_float(m1).expect("finite m1");
    let m2r = Rat::from_float(m2).expect("finite m2");
    let threshold = -m1r / m2r;
    let c = (&threshold * (Rat::one() + margin)).floor() + Rat::one();
    Ok(ShiftChoice {
        threshold: Some(threshold),
        c,
    })
}

/// `C(G) = max_α ‖A_α‖·α!/|α|!` over the coefficient matrices of a
/// homogeneous `G`, with each norm replaced by a certified upper bound.
pub fn polya_constant(g: &MatPoly, inflation: &Rat) -> Result<Rat, BoundsError> {
    let d = g.degree();
    if !g.is_homogeneous(d) {
        return Err(BoundsError::NotHomogeneous(d));
    }
    let d_fact = Rat::from_integer(BigInt::from(factorial(d)));
    let coeffs: Vec<_> = g.coefficients().into_iter().collect();
    let values = coeffs
        .par_iter()
        .map(|(alpha, a)| {
            let norm = spectral_norm_upper(a, inflation)?;
            Ok(norm * Rat::from_integer(BigInt::from(alpha.factorial())) / &d_fact)
        })
        .collect::<Result<Vec<Rat>, ExactError>>()?;
    Ok(values.into_iter().max().unwrap_or_else(Rat::zero))
}

/// Smallest `N ≥ 0` with `N > d(d-1)/2 · C/λ - d`.
pub fn degree_bound(c: &Rat, lambda: &Rat, d: u32) -> Result<u64, BoundsError> {
    if !lambda.is_positive() {
        return Err(BoundsError::NonPositiveLambda);
    }
    let d_big = BigInt::from(d);
    let pairs = Rat::from_integer(&d_big * (&d_big - 1u32)) / Rat::from_integer(BigInt::from(2u32));
    let bound = pairs * c / lambda - Rat::from_integer(d_big);
    let n: BigInt = bound.floor().to_integer() + 1;
    Ok(if n.is_negative() {
        0
    } else {
        n.to_u64().unwrap_or(u64::MAX)
    })
}

/// The sampled minimum shrunk by `safety` and rounded down to a multiple of
/// 1e-6 (or kept unrounded if rounding would reach zero); `None` if the
/// sample is not positive.
pub fn lambda_floor(sampled: f64, safety: &Rat) -> Option<Rat> {
    if !sampled.is_finite() || sampled <= 0.0 {
        return None;
    }
    let shrunk = Rat::from_float(sampled).expect("finite") * (Rat::one() - safety);
    if !shrunk.is_positive() {
        return None;
    }
    let rounded = rat_floor_f64(rat_to_f64(&shrunk), 1_000_000);
    Some(if rounded.is_positive() && rounded <= shrunk {
        rounded
    } else {
        shrunk
    })
}

/// One pass of the shift/expansion loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    #[serde(with = "crate::serial::rat")]
    pub c: Rat,
    pub lambda_sampled: f64,
    pub n_cap: u64,
    pub outcome: String,
}

/// Everything the degree bound depends on, recorded alongside a certificate.
///
/// `m2 = None` means the region where the lift fails to be positive definite
/// was empty on the sample (an infinite minimum).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m1: Option<f64>,
    pub branch_minima: Vec<f64>,
    pub m2: Option<f64>,
    #[serde(with = "crate::serial::opt_rat")]
    pub c_threshold: Option<Rat>,
    #[serde(with = "crate::serial::rat")]
    pub c: Rat,
    pub lambda_sampled: Option<f64>,
    #[serde(with = "crate::serial::opt_rat")]
    pub lambda: Option<Rat>,
    #[serde(with = "crate::serial::opt_rat")]
    pub polya_c: Option<Rat>,
    pub d: u32,
    pub theorem_n: Option<u64>,
    pub used_n: u64,
    pub attempts: Vec<Attempt>,
    pub resolution: u32,
    pub refine_rounds: u32,
    pub seed: u64,
}

impl BoundReport {
    pub fn new(sampler: &SimplexSampler) -> Self {
        BoundReport {
            m1: None,
            branch_minima: Vec::new(),
            m2: None,
            c_threshold: None,
            c: Rat::zero(),
            lambda_sampled: None,
            lambda: None,
            polya_c: None,
            d: 0,
            theorem_n: None,
            used_n: 0,
            attempts: Vec::new(),
            resolution: sampler.resolution(),
            refine_rounds: sampler.refine_rounds,
            seed: sampler.seed,
        }
    }
}
