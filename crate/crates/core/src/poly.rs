//! Multivariate polynomials over the rationals.
//!
//! Variables are the coordinate vectors of the realization `V`, so a linear
//! polynomial is the same thing as a vector of `V`. The grading used by the
//! rest of the crate puts `V` in degree 2; [`Poly::degree`] returns the
//! polynomial (unit-weight) degree and [`Poly::grade`] the doubled one.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{q_canonical, q_display, Q};

/// Maximum number of variables. Exponents are packed into a `u64`, eight
/// bits per variable, with variable 0 in the most significant byte so that
/// integer order on the packed key is lexicographic order on exponent vectors.
pub const MAX_VARS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    fn shift(var: usize) -> u32 {
        (8 * (MAX_VARS - 1 - var)) as u32
    }

    pub fn var(var: usize) -> Self {
        Monomial(1u64 << Self::shift(var))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut key = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < 256, "exponent overflow");
            key |= (e as u64) << Self::shift(i);
        }
        Monomial(key)
    }

    pub fn exponent(self, var: usize) -> u32 {
        ((self.0 >> Self::shift(var)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i)).sum()
    }

    pub fn mul(self, other: Monomial) -> Monomial {
        // No carries as long as every exponent stays below 256.
        Monomial(self.0 + other.0)
    }

    pub fn divides(self, other: Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(self, other: Monomial) -> Monomial {
        Monomial(other.0 - self.0)
    }
}

/// All monomials of the given (unit-weight) degree in `nvars` variables, in
/// increasing lexicographic order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, var: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == nvars {
            cur.push(left);
            out.push(Monomial::from_exponents(cur));
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(nvars, var + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::ONE);
        }
        return out;
    }
    rec(nvars, 0, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Dimension of the space of homogeneous polynomials of a given unit-weight degree.
pub fn dim_homogeneous(nvars: usize, degree: i64) -> usize {
    if degree < 0 {
        return 0;
    }
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    // binomial(degree + nvars - 1, nvars - 1)
    let n = degree as u128 + nvars as u128 - 1;
    let k = (nvars - 1) as u128;
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r as usize
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(i), Q::one());
        p
    }

    /// The linear form `sum_i coords[i] x_i`.
    pub fn linear(coords: &[Q]) -> Self {
        let mut p = Poly::zero(coords.len());
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(Monomial::var(i), c.clone());
            }
        }
        p
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: Monomial) -> Q {
        self.terms.get(&m).cloned().unwrap_or_else(Q::zero)
    }

    /// Constant term; this is the augmentation `R -> R/R_+`.
    pub fn constant_term(&self) -> Q {
        self.coeff(Monomial::ONE)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    /// Unit-weight degree of a homogeneous polynomial, `None` for zero or
    /// inhomogeneous input.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Degree in the convention `deg V = 2`.
    pub fn grade(&self) -> Option<i64> {
        self.degree().map(|d| 2 * d as i64)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Coordinates of a linear polynomial as a vector of `V`.
    pub fn linear_coords(&self) -> Option<Vec<Q>> {
        let mut v = vec![Q::zero(); self.nvars];
        for (m, c) in &self.terms {
            if m.degree() != 1 {
                return None;
            }
            let i = (0..self.nvars).find(|&i| m.exponent(i) == 1).unwrap();
            v[i] = c.clone();
        }
        Some(v)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(*m, -c.clone());
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Q, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(*m, c * a);
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars.max(other.nvars));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(*m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = out.mul_ref(self);
        }
        out
    }

    /// Homogeneous component of unit-weight degree `d`.
    pub fn component(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn leading(&self) -> Option<(Monomial, &Q)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    /// Exact quotient `self / divisor`, or `None` when the divisor does not
    /// divide. A single polynomial is a Groebner basis of the ideal it
    /// generates, so lex division leaves remainder zero iff it divides.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let lc_inv = Q::one() / lc;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.quotient_of(m);
            let qc = c * &lc_inv;
            for (dm, dc) in &divisor.terms {
                rem.add_term(qm.mul(*dm), -(&qc * dc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Linear change of variables: `x_i -> images[i]`, each image linear.
    pub fn substitute_linear(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars), p.clone()]).collect();
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(self.nvars, c.clone());
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exponent(i) as usize;
                if e == 0 {
                    continue;
                }
                while pw.len() <= e {
                    let next = pw.last().unwrap().mul_ref(&images[i]);
                    pw.push(next);
                }
                t = t.mul_ref(&pw[e]);
            }
            out.add_assign_ref(&t);
        }
        out
    }

    /// Apply a linear map of `V` given by its matrix (`matrix[j][i]` is the
    /// `j`-th coordinate of the image of `e_i`).
    pub fn act_matrix(&self, matrix: &[Vec<Q>]) -> Poly {
        let n = self.nvars;
        let images: Vec<Poly> = (0..n).map(|i| Poly::linear(&(0..n).map(|j| matrix[j][i].clone()).collect::<Vec<_>>())).collect();
        self.substitute_linear(&images)
    }

    /// Reduction modulo a nonzero linear form: eliminates the leading variable
    /// of `form`. Two polynomials agree modulo `form` iff their reductions agree.
    pub fn reduce_mod_linear(&self, form: &Poly) -> Poly {
        let coords = form.linear_coords().expect("linear form");
        let j = coords.iter().position(|c| !c.is_zero()).expect("nonzero form");
        let inv = Q::one() / &coords[j];
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                if i == j {
                    let mut v: Vec<Q> = coords.iter().map(|c| -(c * &inv)).collect();
                    v[j] = Q::zero();
                    Poly::linear(&v)
                } else {
                    Poly::var(self.nvars, i)
                }
            })
            .collect();
        self.substitute_linear(&images)
    }

    /// Canonical serialization: monomials in increasing lexicographic order
    /// of exponent vectors, coefficients always written as `p/q`.
    pub fn canonical(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                let exps = m.exponents(self.nvars);
                let mono: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                    .collect();
                if mono.is_empty() {
                    q_canonical(c)
                } else {
                    format!("{}*{}", q_canonical(c), mono.join("*"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono: Vec<String> = m
                .exponents(self.nvars)
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", q_display(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", q_display(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_ref(rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn exact_division_by_linear_form() {
        let a = &x(0) + &x(1);
        let b = &x(0) - &x(2);
        let f = &(&a * &b) * &a;
        assert_eq!(f.div_exact(&a).unwrap(), &a * &b);
        assert!(x(0).div_exact(&x(1)).is_none());
        assert!((&x(0) + &Poly::one(3)).div_exact(&x(0)).is_none());
    }

    #[test]
    fn lex_order_matches_exponent_vectors() {
        let a = Monomial::from_exponents(&[1, 0, 0]);
        let b = Monomial::from_exponents(&[0, 5, 2]);
        assert!(a > b);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(dim_homogeneous(4, 3), 20);
        assert_eq!(dim_homogeneous(3, 0), 1);
    }

    #[test]
    fn reduction_mod_linear_detects_divisibility() {
        let a = &x(0) - &x(1);
        let f = &x(0) * &x(2);
        let g = &x(1) * &x(2);
        assert_eq!(f.reduce_mod_linear(&a), g.reduce_mod_linear(&a));
        assert_ne!(f.reduce_mod_linear(&a), x(2).reduce_mod_linear(&a));
    }

    #[test]
    fn canonical_form() {
        let f = &x(0).scale(&q(3)) + &Poly::constant(3, crate::rational::qf(-1, 2));
        assert_eq!(f.canonical(), "-1/2 + 3/1*x0");
    }
}
