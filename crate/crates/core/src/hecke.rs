//! Hecke algebra over `Z[v, v^-1]` in the standard basis, the bar
//! involution, the Kazhdan-Lusztig basis and the standard pairing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::coxeter::{CoxeterGroup, GroupElement};

/// Laurent polynomial in `v` with integer coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent(BTreeMap<i32, i64>);

impl Laurent {
    pub fn zero() -> Self {
        Laurent(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i32, c: i64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(exp, c);
        }
        Laurent(m)
    }

    /// `v`.
    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    pub fn from_terms(terms: &[(i32, i64)]) -> Self {
        let mut out = Laurent::zero();
        for &(e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.0.iter().map(|(e, c)| (*e, *c))
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.0.get(&e).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: i32, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(e, -c);
        }
        out
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in o.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (*e, -c)).collect())
    }

    /// `v -> v^-1`.
    pub fn bar(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (-e, *c)).collect())
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.0.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.0.keys().next_back().copied()
    }

    /// Whether every exponent is positive.
    pub fn in_v_zv(&self) -> bool {
        self.0.keys().all(|&e| e > 0)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.0.values().all(|&c| c >= 0)
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Ascending exponents, e.g. `v^-1+2+v^3`.
impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &c) in &self.0 {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let mono = match e {
                0 => String::new(),
                1 => "v".to_string(),
                _ => format!("v^{e}"),
            };
            if mono.is_empty() {
                write!(f, "{sign}{a}")?;
            } else if a == 1 {
                write!(f, "{sign}{mono}")?;
            } else {
                write!(f, "{sign}{a}{mono}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Finitely supported `W -> Z[v, v^-1]`, coordinates in the standard basis.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct HeckeElement {
    pub terms: BTreeMap<GroupElement, Laurent>,
}

impl HeckeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn h(x: GroupElement) -> Self {
        Self::term(x, Laurent::one())
    }

    pub fn term(x: GroupElement, c: Laurent) -> Self {
        let mut out = Self::zero();
        out.add_term(x, &c);
        out
    }

    pub fn coeff(&self, x: &GroupElement) -> Laurent {
        self.terms.get(x).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, x: GroupElement, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(x.clone()).or_default();
        *e = e.add(c);
        if e.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn add(&self, o: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (x, c) in &o.terms {
            out.add_term(x.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (x, c) in &o.terms {
            out.add_term(x.clone(), &c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Laurent) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (x, a) in &self.terms {
            out.add_term(x.clone(), &a.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

pub struct Hecke<'g> {
    pub group: &'g CoxeterGroup,
    kl: Mutex<HashMap<GroupElement, Arc<HeckeElement>>>,
    bar_h: Mutex<HashMap<GroupElement, Arc<HeckeElement>>>,
}

impl<'g> Hecke<'g> {
    pub fn new(group: &'g CoxeterGroup) -> Self {
        Hecke { group, kl: Mutex::new(HashMap::new()), bar_h: Mutex::new(HashMap::new()) }
    }

    /// `a H_s`.
    pub fn mul_s(&self, a: &HeckeElement, s: u8) -> HeckeElement {
        let g = self.group;
        let mut out = HeckeElement::zero();
        let q = Laurent::from_terms(&[(-1, 1), (1, -1)]);
        for (w, c) in &a.terms {
            let ws = g.mul_gen(w, s);
            if ws.length() > w.length() {
                out.add_term(ws, c);
            } else {
                out.add_term(w.clone(), &c.mul(&q));
                out.add_term(ws, c);
            }
        }
        out
    }

    pub fn multiply(&self, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (y, c) in &b.terms {
            let mut t = a.clone();
            for &s in y.word() {
                t = self.mul_s(&t, s);
            }
            out = out.add(&t.scale(c));
        }
        out
    }

    /// `b_s = H_s + v`.
    pub fn b_s(&self, s: u8) -> HeckeElement {
        let mut out = HeckeElement::h(self.group.gen(s));
        out.add_term(GroupElement::identity(), &Laurent::v());
        out
    }

    /// `a b_s`.
    pub fn mul_b_s(&self, a: &HeckeElement, s: u8) -> HeckeElement {
        self.mul_s(a, s).add(&a.scale(&Laurent::v()))
    }

    fn bar_of_h(&self, x: &GroupElement) -> Arc<HeckeElement> {
        if let Some(r) = self.bar_h.lock().unwrap().get(x) {
            return r.clone();
        }
        let r = match x.drop_last() {
            None => HeckeElement::h(GroupElement::identity()),
            Some((xs, s)) => {
                let prev = self.bar_of_h(&xs);
                // bar(H_s) = H_s + v - v^-1
                let shift = Laurent::from_terms(&[(1, 1), (-1, -1)]);
                self.mul_s(&prev, s).add(&prev.scale(&shift))
            }
        };
        let r = Arc::new(r);
        self.bar_h.lock().unwrap().insert(x.clone(), r.clone());
        r
    }

    pub fn bar(&self, a: &HeckeElement) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (x, c) in &a.terms {
            out = out.add(&self.bar_of_h(x).scale(&c.bar()));
        }
        out
    }

    /// The Kazhdan-Lusztig basis element `b_w`.
    pub fn kl_basis(&self, w: &GroupElement) -> Arc<HeckeElement> {
        if let Some(r) = self.kl.lock().unwrap().get(w) {
            return r.clone();
        }
        let r = match w.drop_last() {
            None => HeckeElement::h(GroupElement::identity()),
            Some((ws, s)) => {
                let mut c = self.mul_b_s(&self.kl_basis(&ws), s);
                // Remove bar-invariant non-positive parts from the top down.
                loop {
                    let bad = c
                        .terms
                        .iter()
                        .rev()
                        .find(|(x, coeff)| *x != w && !coeff.in_v_zv())
                        .map(|(x, coeff)| (x.clone(), coeff.clone()));
                    let Some((x, coeff)) = bad else { break };
                    let mut gamma = Laurent::zero();
                    for (e, a) in coeff.terms() {
                        if e <= 0 {
                            gamma.add_term(e, a);
                            if e < 0 {
                                gamma.add_term(-e, a);
                            }
                        }
                    }
                    c = c.sub(&self.kl_basis(&x).scale(&gamma));
                }
                c
            }
        };
        let r = Arc::new(r);
        self.kl.lock().unwrap().insert(w.clone(), r.clone());
        r
    }

    /// `h_{x,w}`: coefficient of `H_x` in `b_w`.
    pub fn kl_coeff(&self, x: &GroupElement, w: &GroupElement) -> Laurent {
        self.kl_basis(w).coeff(x)
    }

    /// Character of the Bott-Samelson bimodule: `b_{s_1} ... b_{s_k}`.
    pub fn bs_character(&self, word: &[u8]) -> HeckeElement {
        let mut out = HeckeElement::h(GroupElement::identity());
        for &s in word {
            out = self.mul_b_s(&out, s);
        }
        out
    }

    /// Expansion of `a` in the KL basis (requires `a` bar-invariant for the
    /// coefficients to be bar-invariant).
    pub fn to_kl(&self, a: &HeckeElement) -> BTreeMap<GroupElement, Laurent> {
        let mut rest = a.clone();
        let mut out = BTreeMap::new();
        while let Some((x, c)) = rest.terms.iter().next_back().map(|(x, c)| (x.clone(), c.clone())) {
            rest = rest.sub(&self.kl_basis(&x).scale(&c));
            out.insert(x, c);
        }
        out
    }
}

/// `(H_x, H_y) = delta_{x,y}`, extended bilinearly.
pub fn pairing(a: &HeckeElement, b: &HeckeElement) -> Laurent {
    let mut out = Laurent::zero();
    for (x, c) in &a.terms {
        if let Some(d) = b.terms.get(x) {
            out = out.add(&c.mul(d));
        }
    }
    out
}

/// The self-dual shortcut `sum_x c_x d_x`; equals [`pairing`] for any
/// inputs under this normalization, exposed separately for bar-invariant `a`.
pub fn self_dual_pairing(a: &HeckeElement, b: &HeckeElement) -> Laurent {
    a.terms.iter().fold(Laurent::zero(), |acc, (x, c)| acc.add(&c.mul(&b.coeff(x))))
}

/// Graded rank `v^{-l(w)} sum_{x <= w} v^{2 l(x)}`.
pub fn hw_rank_formula(interval: &[GroupElement], len: usize) -> Laurent {
    let mut out = Laurent::zero();
    for x in interval {
        out.add_term(2 * x.length() as i32 - len as i32, 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::preset;

    #[test]
    fn quadratic_relation() {
        let g = preset("A2").unwrap();
        let h = Hecke::new(&g);
        let hs = HeckeElement::h(g.gen(0));
        let sq = h.multiply(&hs, &hs);
        let mut expect = HeckeElement::h(g.identity());
        expect.add_term(g.gen(0), &Laurent::from_terms(&[(-1, 1), (1, -1)]));
        assert_eq!(sq, expect);
        let bs = h.b_s(0);
        assert_eq!(h.multiply(&bs, &bs), bs.scale(&Laurent::from_terms(&[(-1, 1), (1, 1)])));
        assert_eq!(h.multiply(&hs, &HeckeElement::h(g.gen(1))), HeckeElement::h(g.reduce(&[0, 1])));
    }

    #[test]
    fn bar_involution() {
        let g = preset("A2").unwrap();
        let h = Hecke::new(&g);
        assert_eq!(h.bar(&h.b_s(0)), h.b_s(0));
        let x = HeckeElement::term(g.reduce(&[0, 1]), Laurent::from_terms(&[(2, 3), (-1, 1)]));
        assert_eq!(h.bar(&h.bar(&x)), x);
    }

    #[test]
    fn kl_examples() {
        let g = preset("A2").unwrap();
        let h = Hecke::new(&g);
        let sts = g.reduce(&[0, 1, 0]);
        let b = h.kl_basis(&sts);
        for x in g.interval(&sts).iter() {
            let l = (3 - x.length()) as i32;
            assert_eq!(b.coeff(x), Laurent::monomial(l, 1));
        }
        assert_eq!(h.bs_character(&[0, 1, 0]), b.add(&h.b_s(0)));
        let u = preset("universal3").unwrap();
        let hu = Hecke::new(&u);
        let w = u.reduce(&[0, 1, 2, 0, 1, 2]);
        assert_eq!(hu.kl_coeff(&u.identity(), &w).to_string(), "3v^4+v^6");
    }

    #[test]
    fn pairing_examples() {
        let g = preset("A1").unwrap();
        let h = Hecke::new(&g);
        let bs = h.b_s(0);
        assert_eq!(pairing(&h.bar(&bs), &bs), Laurent::from_terms(&[(0, 1), (2, 1)]));
    }
}
