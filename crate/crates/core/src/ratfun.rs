//! Fractions whose denominators are products of linear forms (roots).

use std::fmt;

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Q;

/// Scales a nonzero linear form so its lex-leading coefficient is 1.
pub fn normalize_linear(f: &Poly) -> (Poly, Q) {
    let (_, c) = f.leading().expect("nonzero linear form");
    let c = c.clone();
    (f.scale(&(Q::one() / &c)), c)
}

/// `num / prod(den)`, each denominator factor a monic linear form. Kept in
/// lowest terms: no factor of `den` divides `num`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Vec<Poly>,
}

impl RatFun {
    pub fn zero(nvars: usize) -> Self {
        RatFun { num: Poly::zero(nvars), den: Vec::new() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Vec::new() }
    }

    /// `num / prod(roots)` for arbitrary nonzero linear forms.
    pub fn new(num: Poly, roots: &[Poly]) -> Self {
        let mut n = num;
        let mut den = Vec::new();
        for r in roots {
            let (m, c) = normalize_linear(r);
            n = n.scale(&(Q::one() / c));
            den.push(m);
        }
        let mut out = RatFun { num: n, den };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut kept = Vec::new();
        for d in std::mem::take(&mut self.den) {
            if let Some(q) = self.num.div_exact(&d) {
                self.num = q;
            } else {
                kept.push(d);
            }
        }
        kept.sort();
        self.den = kept;
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &[Poly] {
        &self.den
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Multiset union with maximal multiplicities, and the cofactors
    /// `lcm / self.den`, `lcm / other.den`.
    fn lcm_den(a: &[Poly], b: &[Poly]) -> (Vec<Poly>, Vec<Poly>, Vec<Poly>) {
        let mut rest_b: Vec<Poly> = b.to_vec();
        let mut lcm = Vec::new();
        let mut extra_for_b = Vec::new();
        for f in a {
            lcm.push(f.clone());
            if let Some(i) = rest_b.iter().position(|g| g == f) {
                rest_b.remove(i);
            } else {
                extra_for_b.push(f.clone());
            }
        }
        let extra_for_a = rest_b.clone();
        lcm.extend(rest_b);
        (lcm, extra_for_a, extra_for_b)
    }

    fn product(nvars: usize, fs: &[Poly]) -> Poly {
        fs.iter().fold(Poly::one(nvars), |acc, f| &acc * f)
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let n = self.nvars();
        let (lcm, ea, eb) = Self::lcm_den(&self.den, &other.den);
        let mut num = &self.num * &Self::product(n, &ea);
        num.add_assign_ref(&(&other.num * &Self::product(n, &eb)));
        let mut out = RatFun { num, den: lcm };
        out.reduce();
        out
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        if self.is_zero() || other.is_zero() {
            return RatFun::zero(self.nvars());
        }
        let mut den = self.den.clone();
        den.extend(other.den.iter().cloned());
        let mut out = RatFun { num: &self.num * &other.num, den };
        out.reduce();
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFun {
        self.mul(&RatFun::from_poly(p.clone()))
    }

    pub fn scale(&self, c: &Q) -> RatFun {
        if c.is_zero() {
            return RatFun::zero(self.nvars());
        }
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Divides by a nonzero linear form.
    pub fn div_linear(&self, root: &Poly) -> RatFun {
        let mut den = self.den.clone();
        let (m, c) = normalize_linear(root);
        den.push(m);
        let mut out = RatFun { num: self.num.scale(&(Q::one() / c)), den };
        out.reduce();
        out
    }

    /// Applies a linear change of coordinates (matrix convention of
    /// [`Poly::act_matrix`]).
    pub fn act_matrix(&self, matrix: &[Vec<Q>]) -> RatFun {
        let num = self.num.act_matrix(matrix);
        let roots: Vec<Poly> = self.den.iter().map(|d| d.act_matrix(matrix)).collect();
        RatFun::new(num, &roots)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num == Poly::one(self.nvars())
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})", self.num)?;
        for d in &self.den {
            write!(f, "/({d})")?;
        }
        Ok(())
    }
}

impl Zero for RatFun {
    fn zero() -> Self {
        RatFun::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl std::ops::Add for RatFun {
    type Output = RatFun;
    fn add(self, rhs: RatFun) -> RatFun {
        RatFun::add(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_and_sums() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = RatFun::new(Poly::one(2), std::slice::from_ref(&x));
        let b = RatFun::new(Poly::one(2), std::slice::from_ref(&y));
        // 1/x - 1/y = (y - x)/(xy)
        let d = a.sub(&b);
        assert_eq!(d.denominator().len(), 2);
        // times x*y gives a polynomial
        let p = d.mul_poly(&(&x * &y));
        assert_eq!(p.as_poly().unwrap(), &(&y - &x));
        // 2x / (2x) = 1
        let two_x = x.scale(&crate::rational::q(2));
        assert!(RatFun::new(two_x.clone(), &[two_x]).is_one());
    }
}
