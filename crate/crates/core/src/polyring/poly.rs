use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Monomial, PolyError};
use crate::exactalg::{format_rat, Rat};

/// Sparse polynomial over the rationals. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, summing repeats.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Rat)>,
    ) -> Result<Self, PolyError> {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::VarCountMismatch(nvars, m.nvars()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Affine form `constant + Σ coeffs[i]·x_i`.
    pub fn affine(constant: Rat, coeffs: &[Rat]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::constant(n, constant);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Coefficient of `x_i` (only meaningful for affine forms).
    pub fn linear_coeff(&self, i: usize) -> Rat {
        self.coeff(&Monomial::var(self.nvars, i))
    }

    fn check_vars(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VarCountMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// In-place `self += other`. Panics on a variable count mismatch.
    pub fn add_assign(&mut self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomial sum variable count");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_vars(other)?;
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars, "evaluation point length");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(point)
                    .filter(|(e, _)| **e > 0)
                    .fold(c.clone(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize))
            })
            .sum()
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "evaluation point length");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(point)
                    .fold(c.to_f64().unwrap_or(f64::NAN), |acc, (&e, x)| {
                        acc * x.powi(e as i32)
                    })
            })
            .sum()
    }

    /// Image under `x_i ↦ forms[i]`. Powers of each form are computed once.
    pub fn substitute_linear(&self, forms: &[Poly]) -> Result<Poly, PolyError> {
        if forms.len() != self.nvars {
            return Err(PolyError::FormCount {
                expected: self.nvars,
                got: forms.len(),
            });
        }
        let target = forms.first().map_or(0, Poly::nvars);
        if let Some(bad) = forms.iter().find(|f| f.nvars != target) {
            return Err(PolyError::VarCountMismatch(target, bad.nvars));
        }
        let terms: Vec<(&[u32], &Rat)> = self.terms.iter().map(|(m, c)| (m.exponents(), c)).collect();
        Ok(horner(&terms, 0, forms, target))
    }

    /// Multiplies each term of degree `k` by `(Σ x_i)^(d-k)`.
    pub fn homogenize(&self, d: u32) -> Result<Poly, PolyError> {
        let degree = self.degree();
        if degree > d {
            return Err(PolyError::DegreeOverflow { degree, target: d });
        }
        let sum = Poly::from_terms(
            self.nvars,
            (0..self.nvars).map(|i| (Monomial::var(self.nvars, i), Rat::one())),
        )?;
        let mut powers = PowerTable::new(std::slice::from_ref(&sum));
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let gap = d - m.degree();
            let term = Poly::monomial(m.clone(), c.clone());
            let lifted = if gap == 0 {
                term
            } else {
                &term * powers.get(0, gap)
            };
            out.add_assign(&lifted);
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

/// Memoized powers of a fixed list of polynomials.
/// `Σ c·Π forms[i]^e_i` evaluated one variable at a time: the terms are
/// grouped by the exponent of `forms[var]` and combined by Horner's rule, so
/// only products with a single form are ever formed.
fn horner(terms: &[(&[u32], &Rat)], var: usize, forms: &[Poly], target: usize) -> Poly {
    if var == forms.len() {
        let c: Rat = terms.iter().map(|(_, c)| (*c).clone()).sum();
        return Poly::constant(target, c);
    }
    let mut groups: BTreeMap<u32, Vec<(&[u32], &Rat)>> = BTreeMap::new();
    for &(e, c) in terms {
        groups.entry(e[var]).or_default().push((e, c));
    }
    let top = *groups.keys().next_back().unwrap_or(&0);
    let mut acc = Poly::zero(target);
    for k in (0..=top).rev() {
        if !acc.is_zero() {
            acc = &acc * &forms[var];
        }
        if let Some(g) = groups.get(&k) {
            acc.add_assign(&horner(g, var + 1, forms, target));
        }
    }
    acc
}

pub(crate) struct PowerTable<'a> {
    bases: &'a [Poly],
    powers: Vec<Vec<Poly>>,
}

impl<'a> PowerTable<'a> {
    pub(crate) fn new(bases: &'a [Poly]) -> Self {
        PowerTable {
            bases,
            powers: bases
                .iter()
                .map(|b| vec![Poly::one(b.nvars), b.clone()])
                .collect(),
        }
    }

    pub(crate) fn get(&mut self, i: usize, e: u32) -> &Poly {
        let e = e as usize;
        while self.powers[i].len() <= e {
            let next = self.powers[i].last().expect("non-empty") * &self.bases[i];
            self.powers[i].push(next);
        }
        &self.powers[i][e]
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial sum")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial difference")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial product")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rat::one())
    }
}

impl fmt::Display for Poly {
    /// Human-readable form using `y1, y2, …` as variable names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.named("y").fmt(f)
    }
}

/// Display adapter with a chosen variable prefix, see [`Poly::named`].
pub struct NamedPoly<'a> {
    poly: &'a Poly,
    var: &'a str,
}

impl Poly {
    /// Displays as `Poly` does but with variables `{var}1, {var}2, …`.
    pub fn named<'a>(&'a self, var: &'a str) -> NamedPoly<'a> {
        NamedPoly { poly: self, var }
    }
}

impl fmt::Display for NamedPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.var;
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("{var}{}", i + 1)
                    } else {
                        format!("{var}{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rat(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rat_int};

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn difference_of_squares() {
        let one = Poly::one(1);
        let p = &(&x(1, 0) + &one) * &(&x(1, 0) - &one);
        let expected = &x(1, 0).pow(2) - &one;
        assert_eq!(p, expected);
    }

    #[test]
    fn zero_is_additive_identity() {
        let p = Poly::affine(rat(1, 3), &[rat_int(2), rat_int(-1)]);
        assert_eq!(&Poly::zero(2) + &p, p);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn binomial_coefficient_in_cube() {
        let s = &x(2, 0) + &x(2, 1);
        let cube = s.pow(3);
        assert_eq!(cube.coeff(&Monomial::new(vec![1, 2])), rat_int(3));
        assert_eq!(cube.degree(), 3);
        assert!(cube.is_homogeneous(3));
    }

    #[test]
    fn mismatched_varcount_is_rejected() {
        assert!(x(1, 0).checked_add(&x(2, 0)).is_err());
        assert!(x(1, 0).checked_mul(&x(2, 0)).is_err());
    }

    #[test]
    fn substitution_examples() {
        let xx = x(1, 0);
        let one_minus_x = &Poly::one(1) - &xx;
        let forms = [xx.clone(), one_minus_x];
        let kernel = &(&x(2, 0) + &x(2, 1)) - &Poly::one(2);
        assert!(kernel.substitute_linear(&forms).unwrap().is_zero());
        let prod = &x(2, 0) * &x(2, 1);
        assert_eq!(
            prod.substitute_linear(&forms).unwrap(),
            &xx - &xx.pow(2)
        );
        let l1 = Poly::affine(rat(1, 4), &[rat(1, 4), rat_int(0)]);
        let forms4 = [l1.clone(), Poly::zero(2), Poly::zero(2), Poly::zero(2)];
        assert_eq!(x(4, 0).substitute_linear(&forms4).unwrap(), l1);
        assert!(x(2, 0).substitute_linear(&[xx]).is_err());
    }

    #[test]
    fn homogenize_examples() {
        // y1 + 1 in two variables, d = 1 -> 2 y1 + y2
        let p = &x(2, 0) + &Poly::one(2);
        assert_eq!(
            p.homogenize(1).unwrap(),
            &x(2, 0).scale(&rat_int(2)) + &x(2, 1)
        );
        let h = &x(2, 0) * &x(2, 1);
        assert_eq!(h.homogenize(2).unwrap(), h);
        assert_eq!(
            h.homogenize(1),
            Err(PolyError::DegreeOverflow {
                degree: 2,
                target: 1
            })
        );
    }

    #[test]
    fn evaluation_exact_and_float() {
        let p = Poly::affine(rat(1, 2), &[rat_int(3), rat_int(-1)]);
        let q = &p * &p;
        let pt = [rat(1, 3), rat_int(2)];
        assert_eq!(q.eval(&pt), rat(1, 4));
        assert!((q.eval_f64(&[1.0 / 3.0, 2.0]) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn display() {
        let p = Poly::affine(rat(-1, 2), &[rat_int(1), rat_int(1)]);
        assert_eq!(p.to_string(), "-1/2 + y1 + y2");
    }
}
