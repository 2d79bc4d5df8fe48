#![allow(dead_code)]

use handelman::exactalg::{rat, rat_int, Rat, RatMatrix};
use handelman::polyring::{MatPoly, Monomial, Poly};
use handelman::polytope::HPolyhedron;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn small_rat(rng: &mut ChaCha8Rng, max: i64) -> Rat {
    rat(rng.gen_range(-max..=max), rng.gen_range(1..=4))
}

/// All exponent vectors of total degree `d` in `m` variables.
pub fn monomials_of_degree(m: usize, d: u32) -> Vec<Monomial> {
    fn go(m: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == m {
            prefix.push(d);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a);
            go(m, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(m, d, &mut Vec::new(), &mut out);
    out
}

pub fn monomials_up_to(m: usize, d: u32) -> Vec<Monomial> {
    (0..=d).flat_map(|k| monomials_of_degree(m, k)).collect()
}

/// Random polynomial with support in `support`, each term kept with
/// probability one half.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, support: &[Monomial], max: i64) -> Poly {
    let mut p = Poly::zero(nvars);
    for m in support {
        if rng.gen_bool(0.5) {
            p.add_term(m.clone(), small_rat(rng, max));
        }
    }
    p
}

pub fn random_matpoly(rng: &mut ChaCha8Rng, t: usize, nvars: usize, support: &[Monomial], max: i64) -> MatPoly {
    let mut rows = vec![vec![Poly::zero(nvars); t]; t];
    for i in 0..t {
        for j in i..t {
            let p = random_poly(rng, nvars, support, max);
            rows[i][j] = p.clone();
            rows[j][i] = p;
        }
    }
    MatPoly::from_rows(rows).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, t: usize, max: i64) -> RatMatrix {
    let mut a = RatMatrix::zeros(t, t);
    for i in 0..t {
        for j in i..t {
            let v = small_rat(rng, max);
            a.set(i, j, v.clone());
            a.set(j, i, v);
        }
    }
    a
}

/// Sum of absolute values of all coefficients: bounds every entry of `F(x)`
/// for `x` in the box `[-1, 1]^n`.
pub fn coefficient_mass(f: &MatPoly) -> Rat {
    f.upper_entries()
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| c.abs()))
        .fold(Rat::zero(), |a, b| a + b)
}

pub fn interval(a: Rat, b: Rat) -> HPolyhedron {
    HPolyhedron::new(
        1,
        vec![
            Poly::affine(-a, &[rat_int(1)]),
            Poly::affine(b, &[rat_int(-1)]),
        ],
    )
    .unwrap()
}

pub fn boxed(x0: Rat, x1: Rat, y0: Rat, y1: Rat) -> HPolyhedron {
    HPolyhedron::new(
        2,
        vec![
            Poly::affine(-x0, &[rat_int(1), rat_int(0)]),
            Poly::affine(x1, &[rat_int(-1), rat_int(0)]),
            Poly::affine(-y0, &[rat_int(0), rat_int(1)]),
            Poly::affine(y1, &[rat_int(0), rat_int(-1)]),
        ],
    )
    .unwrap()
}

/// The triangle `x >= a, y >= a, x + y <= b` (nonempty for `2a < b`).
pub fn triangle(a: Rat, b: Rat) -> HPolyhedron {
    HPolyhedron::new(
        2,
        vec![
            Poly::affine(-a.clone(), &[rat_int(1), rat_int(0)]),
            Poly::affine(-a, &[rat_int(0), rat_int(1)]),
            Poly::affine(b, &[rat_int(-1), rat_int(-1)]),
        ],
    )
    .unwrap()
}

/// Random compact polyhedron inside `[-1, 1]^n` with `n <= 2`, `m <= 4`,
/// together with its vertices.
pub fn random_polyhedron(rng: &mut ChaCha8Rng) -> (HPolyhedron, Vec<Vec<Rat>>) {
    let pick = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| rat(rng.gen_range(lo..=hi), 4);
    match rng.gen_range(0..4) {
        0 => {
            let a = pick(rng, -4, 0);
            let b = pick(rng, 1, 4);
            (interval(a.clone(), b.clone()), vec![vec![a], vec![b]])
        }
        1 => {
            // Interval with a redundant third constraint.
            let a = pick(rng, -4, 0);
            let b = pick(rng, 1, 3);
            let mut forms = interval(a.clone(), b.clone()).forms().to_vec();
            forms.push(Poly::affine(&b + rat(1, 4), &[rat_int(-1)]));
            (HPolyhedron::new(1, forms).unwrap(), vec![vec![a], vec![b]])
        }
        2 => {
            let a = pick(rng, -4, -1);
            let c = &a + rat_int(1);
            let vertices = vec![
                vec![a.clone(), a.clone()],
                vec![&c - &a, a.clone()],
                vec![a.clone(), &c - &a],
            ];
            (triangle(a, c), vertices)
        }
        _ => {
            let x0 = pick(rng, -4, -1);
            let x1 = pick(rng, 0, 4);
            let y0 = pick(rng, -4, 0);
            let y1 = pick(rng, 1, 4);
            let vertices = vec![
                vec![x0.clone(), y0.clone()],
                vec![x1.clone(), y0.clone()],
                vec![x0.clone(), y1.clone()],
                vec![x1.clone(), y1.clone()],
            ];
            (boxed(x0, x1, y0, y1), vertices)
        }
    }
}

/// `Mᵀ·M + A + margin·I` for random affine `M`, `A` (and `M = 0` when
/// `d = 1`). The minimum eigenvalue of the affine `A` is concave, so its
/// minimum over the polytope is attained at a vertex; the margin lifts it
/// to at least `slack` there, making the result positive definite on the
/// whole polytope.
pub fn random_pd_on_polytope(
    rng: &mut ChaCha8Rng,
    t: usize,
    d: u32,
    vertices: &[Vec<Rat>],
    slack: &Rat,
) -> MatPoly {
    let n = vertices[0].len();
    let affine = monomials_up_to(n, 1);
    let a = random_matpoly(rng, t, n, &affine, 3);
    let lowest = vertices
        .iter()
        .map(|v| {
            let e = nalgebra::SymmetricEigen::new(a.eval(v).to_f64()).eigenvalues;
            e.iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    let margin = handelman::exactalg::rat_ceil_f64((-lowest).max(0.0), 64) + slack;
    let mut f = a
        .checked_add(&MatPoly::scalar_identity(t, &Poly::constant(n, margin)))
        .unwrap();
    if d >= 2 {
        let mut rows = vec![vec![Poly::zero(n); t]; t];
        for row in rows.iter_mut() {
            for e in row.iter_mut() {
                *e = random_poly(rng, n, &affine, 2);
            }
        }
        // (MᵀM)_ij = Σ_k M_ki M_kj
        let mtm: Vec<Vec<Poly>> = (0..t)
            .map(|i| {
                (0..t)
                    .map(|j| {
                        (0..t).fold(Poly::zero(n), |acc, k| &acc + &(&rows[k][i] * &rows[k][j]))
                    })
                    .collect()
            })
            .collect();
        f = f.checked_add(&MatPoly::from_rows(mtm).unwrap()).unwrap();
    }
    f
}
