//! The nil-Hecke ring inside the smash product `Q_W`, the values
//! `d(x, y)` of the dual basis, and the `W`-action on that dual basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;
use thiserror::Error;

use crate::coxeter::{CoxeterGroup, GroupElement};
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NilHeckeError {
    #[error("Pieri mismatch for D_{w}: {detail}")]
    PieriMismatch { w: String, detail: String },
    #[error("d({x}, {y}) disagrees: triangular {a}, subword sum {b}")]
    OracleMismatch { x: String, y: String, a: String, b: String },
    #[error("triangular solve produced a non-polynomial value for d({x}, {y})")]
    NotPolynomial { x: String, y: String },
}

/// Element of `Q_W` in the `delta`-basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QWElement {
    nvars: usize,
    terms: BTreeMap<GroupElement, RatFun>,
}

impl QWElement {
    pub fn zero(nvars: usize) -> Self {
        QWElement { nvars, terms: BTreeMap::new() }
    }

    pub fn term(x: GroupElement, f: RatFun) -> Self {
        let mut out = QWElement::zero(f.nvars());
        out.add_term(x, f);
        out
    }

    pub fn delta(nvars: usize, x: GroupElement) -> Self {
        Self::term(x, RatFun::from_poly(Poly::one(nvars)))
    }

    pub fn scalar(f: Poly) -> Self {
        Self::term(GroupElement::identity(), RatFun::from_poly(f))
    }

    pub fn terms(&self) -> &BTreeMap<GroupElement, RatFun> {
        &self.terms
    }

    pub fn coeff(&self, x: &GroupElement) -> RatFun {
        self.terms.get(x).cloned().unwrap_or_else(|| RatFun::zero(self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, x: GroupElement, f: RatFun) {
        if f.is_zero() {
            return;
        }
        let v = match self.terms.remove(&x) {
            Some(old) => old.add(&f),
            None => f,
        };
        if !v.is_zero() {
            self.terms.insert(x, v);
        }
    }

    pub fn add(&self, other: &QWElement) -> QWElement {
        let mut out = self.clone();
        for (x, f) in &other.terms {
            out.add_term(x.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &QWElement) -> QWElement {
        let mut out = self.clone();
        for (x, f) in &other.terms {
            out.add_term(x.clone(), f.neg());
        }
        out
    }

    /// Left multiplication by a polynomial (`f delta_e` on the left).
    pub fn left_scale(&self, f: &Poly) -> QWElement {
        let mut out = QWElement::zero(self.nvars);
        for (x, g) in &self.terms {
            out.add_term(x.clone(), g.mul_poly(f));
        }
        out
    }

    /// `(f delta_x)(g delta_y) = f x(g) delta_{xy}`.
    pub fn mul(&self, g: &CoxeterGroup, other: &QWElement) -> QWElement {
        let mut out = QWElement::zero(self.nvars);
        for (x, f) in &self.terms {
            let mx = g.matrix(x);
            for (y, h) in &other.terms {
                let xh = if x.is_identity() { h.clone() } else { h.act_matrix(&mx) };
                out.add_term(g.multiply(x, y), f.mul(&xh));
            }
        }
        out
    }
}

/// Nil-Hecke computations for one group, with memoized `D_x` expansions and
/// rows of `d`.
pub struct NilHecke<'g> {
    pub group: &'g CoxeterGroup,
    dx: Mutex<HashMap<GroupElement, Arc<QWElement>>>,
    rows: Mutex<HashMap<GroupElement, Arc<BTreeMap<GroupElement, Poly>>>>,
    fast_rows: Mutex<HashMap<GroupElement, Arc<BTreeMap<GroupElement, Poly>>>>,
}

impl<'g> NilHecke<'g> {
    pub fn new(group: &'g CoxeterGroup) -> Self {
        NilHecke {
            group,
            dx: Mutex::new(HashMap::new()),
            rows: Mutex::new(HashMap::new()),
            fast_rows: Mutex::new(HashMap::new()),
        }
    }

    fn nvars(&self) -> usize {
        self.group.dim()
    }

    /// `D_s = (delta_e - delta_s) / alpha_s`.
    pub fn d_s(&self, s: u8) -> QWElement {
        let g = self.group;
        let a = g.alpha(s);
        let one = RatFun::new(Poly::one(self.nvars()), &[a]);
        let mut out = QWElement::term(GroupElement::identity(), one.clone());
        out.add_term(g.gen(s), one.neg());
        out
    }

    /// Product of the `D_{s_i}` along an arbitrary word.
    pub fn d_word(&self, word: &[u8]) -> QWElement {
        let mut out = QWElement::delta(self.nvars(), GroupElement::identity());
        for &s in word {
            out = out.mul(self.group, &self.d_s(s));
        }
        out
    }

    /// `D_x`, computed along the normal form of `x`.
    pub fn d_elem(&self, x: &GroupElement) -> Arc<QWElement> {
        if let Some(d) = self.dx.lock().unwrap().get(x) {
            return d.clone();
        }
        let d = match x.drop_last() {
            None => QWElement::delta(self.nvars(), GroupElement::identity()),
            Some((xs, s)) => self.d_elem(&xs).mul(self.group, &self.d_s(s)),
        };
        let d = Arc::new(d);
        self.dx.lock().unwrap().insert(x.clone(), d.clone());
        d
    }

    /// `p_w`: product of the roots of the left inversions of `w`.
    pub fn p(&self, w: &GroupElement) -> Poly {
        let g = self.group;
        let mut out = Poly::one(self.nvars());
        let mut prefix = GroupElement::identity();
        for &s in w.word() {
            out = &out * &g.act_root(&prefix, s);
            prefix = g.mul_gen(&prefix, s);
        }
        out
    }

    /// `D_w * lambda` computed in `Q_W`, checked against
    /// `w(lambda) D_w + sum_{v -t-> w} alpha_t^vee(lambda) D_v`.
    pub fn pieri_d(&self, w: &GroupElement, lambda: &Poly) -> Result<QWElement, NilHeckeError> {
        let g = self.group;
        let lhs = self.d_elem(w).mul(g, &QWElement::scalar(lambda.clone()));
        let mut rhs = self.d_elem(w).left_scale(&g.act(w, lambda));
        for v in g.interval(w).iter().filter(|v| v.length() + 1 == w.length()) {
            let t = g.multiply(&g.inverse(v), w);
            let r = g.reflection(&t).expect("Bruhat cover differs by a reflection");
            let c = g.eval_functional(&r.coroot, lambda);
            rhs = rhs.add(&self.d_elem(v).left_scale(&Poly::constant(self.nvars(), c)));
        }
        if lhs != rhs {
            return Err(NilHeckeError::PieriMismatch {
                w: g.format(w),
                detail: format!("difference {:?}", lhs.sub(&rhs)),
            });
        }
        Ok(lhs)
    }

    /// All `d(x, y)` for fixed `y`, by expanding `delta_y` in the `D`-basis.
    pub fn d_row_triangular(&self, y: &GroupElement) -> Result<BTreeMap<GroupElement, Poly>, NilHeckeError> {
        let g = self.group;
        let omega = g.interval(y);
        let nv = self.nvars();
        let sign = |x: &GroupElement| if x.length().is_multiple_of(2) { Q::one() } else { -Q::one() };
        let mut c: BTreeMap<GroupElement, RatFun> = BTreeMap::new();
        c.insert(y.clone(), RatFun::from_poly(self.p(y).scale(&sign(y))));
        for z in omega.iter().rev().skip(1) {
            let mut acc = RatFun::zero(nv);
            for (x, cx) in &c {
                let a = self.d_elem(x).coeff(z);
                if !a.is_zero() {
                    acc = acc.add(&cx.mul(&a));
                }
            }
            let cz = acc.mul_poly(&self.p(z)).scale(&-sign(z));
            c.insert(z.clone(), cz);
        }
        let mut out = BTreeMap::new();
        for (x, cx) in c {
            let v = cx.scale(&sign(&x));
            let p = v
                .as_poly()
                .cloned()
                .ok_or_else(|| NilHeckeError::NotPolynomial { x: g.format(&x), y: g.format(y) })?;
            if !p.is_zero() {
                out.insert(x, p);
            }
        }
        Ok(out)
    }

    /// All `d(x, y)` for fixed `y`, as sums over reduced subwords of the
    /// normal form of `y` of products of the partially applied roots.
    pub fn d_row_subword(&self, y: &GroupElement) -> BTreeMap<GroupElement, Poly> {
        let g = self.group;
        let word = y.word();
        let mut betas = Vec::with_capacity(word.len());
        let mut prefix = GroupElement::identity();
        for &s in word {
            betas.push(g.act_root(&prefix, s));
            prefix = g.mul_gen(&prefix, s);
        }
        let mut out: BTreeMap<GroupElement, Poly> = BTreeMap::new();
        let mut stack = vec![(0usize, GroupElement::identity(), Poly::one(self.nvars()))];
        while let Some((i, x, prod)) = stack.pop() {
            if i == word.len() {
                out.entry(x).or_insert_with(|| Poly::zero(self.nvars())).add_assign_ref(&prod);
                continue;
            }
            let s = word[i];
            if !g.is_right_descent(&x, s) {
                stack.push((i + 1, g.mul_gen(&x, s), &prod * &betas[i]));
            }
            stack.push((i + 1, x, prod));
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// The row `x -> d(x, y)`, computed by both algorithms and cross-checked.
    pub fn d_row(&self, y: &GroupElement) -> Result<Arc<BTreeMap<GroupElement, Poly>>, NilHeckeError> {
        if let Some(r) = self.rows.lock().unwrap().get(y) {
            return Ok(r.clone());
        }
        let a = self.d_row_triangular(y)?;
        let b = self.d_row_subword(y);
        for x in a.keys().chain(b.keys()) {
            let va = a.get(x).cloned().unwrap_or_else(|| Poly::zero(self.nvars()));
            let vb = b.get(x).cloned().unwrap_or_else(|| Poly::zero(self.nvars()));
            if va != vb {
                return Err(NilHeckeError::OracleMismatch {
                    x: self.group.format(x),
                    y: self.group.format(y),
                    a: va.to_string(),
                    b: vb.to_string(),
                });
            }
        }
        let r = Arc::new(a);
        self.rows.lock().unwrap().insert(y.clone(), r.clone());
        Ok(r)
    }

    /// The subword-sum row alone, without the cross-check.
    pub fn d_row_fast(&self, y: &GroupElement) -> Arc<BTreeMap<GroupElement, Poly>> {
        if let Some(r) = self.fast_rows.lock().unwrap().get(y) {
            return r.clone();
        }
        let r = Arc::new(self.d_row_subword(y));
        self.fast_rows.lock().unwrap().insert(y.clone(), r.clone());
        r
    }

    pub fn d(&self, x: &GroupElement, y: &GroupElement) -> Result<Poly, NilHeckeError> {
        Ok(self.d_row(y)?.get(x).cloned().unwrap_or_else(|| Poly::zero(self.nvars())))
    }

    /// Expansion of `s . xi^w` in the `xi`-basis, restricted to `omega`.
    pub fn s_dot_xi(&self, s: u8, w: &GroupElement, omega: &[GroupElement]) -> BTreeMap<GroupElement, Poly> {
        let g = self.group;
        let nv = self.nvars();
        let mut out: BTreeMap<GroupElement, Poly> = BTreeMap::new();
        let mut add = |x: GroupElement, p: Poly| {
            if !omega.contains(&x) || p.is_zero() {
                return;
            }
            let e = out.entry(x).or_insert_with(|| Poly::zero(nv));
            e.add_assign_ref(&p);
        };
        add(w.clone(), Poly::one(nv));
        if !g.is_right_descent(w, s) {
            out.retain(|_, p| !p.is_zero());
            return out;
        }
        let ws = g.mul_gen(w, s);
        add(ws.clone(), -&g.act_root(w, s));
        let alpha_s = g.alpha(s);
        for v in g.covers(&ws) {
            let t = g.multiply(&g.inverse(&ws), &v);
            let r = g.reflection(&t).expect("cover differs by a reflection");
            let c = g.eval_functional(&r.coroot, &alpha_s);
            add(v, Poly::constant(nv, -c));
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::preset;

    #[test]
    fn smash_product_rules() {
        let g = preset("A2").unwrap();
        let nv = g.dim();
        let s = g.gen(0);
        let ds = QWElement::delta(nv, s.clone());
        assert_eq!(ds.mul(&g, &ds), QWElement::delta(nv, g.identity()));
        let a = QWElement::scalar(g.alpha(0));
        assert_eq!(a.mul(&g, &ds), QWElement::term(s.clone(), RatFun::from_poly(g.alpha(0))));
        assert_eq!(ds.mul(&g, &a), QWElement::term(s, RatFun::from_poly(-&g.alpha(0))));
    }

    #[test]
    fn d_operators() {
        let g = preset("A2").unwrap();
        let nh = NilHecke::new(&g);
        assert!(nh.d_word(&[0, 0]).is_zero());
        assert_eq!(nh.d_word(&[0, 1, 0]), nh.d_word(&[1, 0, 1]));
    }

    #[test]
    fn p_and_d_examples() {
        let g = preset("A2").unwrap();
        let nh = NilHecke::new(&g);
        let (a, b) = (g.alpha(0), g.alpha(1));
        let st = g.reduce(&[0, 1]);
        let ts = g.reduce(&[1, 0]);
        assert_eq!(nh.p(&g.identity()), Poly::one(2));
        assert_eq!(nh.p(&st), &a * &(&a + &b));
        let s = g.gen(0);
        assert_eq!(nh.d(&s, &ts).unwrap(), &a + &b);
        assert_eq!(nh.d(&s, &st).unwrap(), a.clone());
        assert_eq!(nh.d(&g.identity(), &st).unwrap(), Poly::one(2));
        assert_eq!(nh.d(&st, &st).unwrap(), nh.p(&st));
    }

    #[test]
    fn pieri_nil_hecke() {
        let g = preset("A2").unwrap();
        let nh = NilHecke::new(&g);
        for w in g.interval(&g.reduce(&[0, 1, 0])).iter() {
            for lambda in g.basis_of_v() {
                nh.pieri_d(w, &lambda).unwrap();
            }
        }
    }

    #[test]
    fn s_dot_xi_rank_one() {
        let g = preset("A1").unwrap();
        let nh = NilHecke::new(&g);
        let s = g.gen(0);
        let omega = vec![g.identity(), s.clone()];
        let r = nh.s_dot_xi(0, &s, &omega);
        assert_eq!(r[&g.identity()], g.alpha(0));
        assert_eq!(r[&s], Poly::constant(1, -Q::one()));
        let r = nh.s_dot_xi(0, &g.identity(), &omega);
        assert_eq!(r.len(), 1);
    }
}
