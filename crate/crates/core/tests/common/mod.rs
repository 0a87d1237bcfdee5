//! Independent Kazhdan-Lusztig oracle: the classical recursion for
//! `P_{x,w}(q)` using only lengths, descents and Bruhat order.

#![allow(dead_code)]

use std::collections::HashMap;

use soergel::coxeter::{CoxeterGroup, GroupElement};
use soergel::hecke::Laurent;

type IntPoly = Vec<i64>;

fn add_into(a: &mut IntPoly, b: &IntPoly, shift: usize, sign: i64) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, 0);
    }
    for (i, c) in b.iter().enumerate() {
        a[i + shift] += sign * c;
    }
}

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

pub struct KlOracle<'g> {
    g: &'g CoxeterGroup,
    memo: HashMap<(GroupElement, GroupElement), IntPoly>,
}

impl<'g> KlOracle<'g> {
    pub fn new(g: &'g CoxeterGroup) -> Self {
        KlOracle { g, memo: HashMap::new() }
    }

    /// `P_{x,w}(q)` as coefficients in `q`.
    pub fn p(&mut self, x: &GroupElement, w: &GroupElement) -> IntPoly {
        let g = self.g;
        if !g.bruhat_leq(x, w) {
            return Vec::new();
        }
        if x == w {
            return vec![1];
        }
        let key = (x.clone(), w.clone());
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let s = *g.right_descents(w).first().expect("w is not the identity");
        let v = g.mul_gen(w, s);
        let xs = g.mul_gen(x, s);
        let c = usize::from(g.is_right_descent(x, s));
        let mut out = Vec::new();
        add_into(&mut out, &self.p(&xs, &v), 1 - c, 1);
        add_into(&mut out, &self.p(x, &v), c, 1);
        let lv = v.length();
        let candidates: Vec<GroupElement> =
            g.interval(&v).iter().filter(|z| *z != &v && g.is_right_descent(z, s) && g.bruhat_leq(x, z)).cloned().collect();
        for z in candidates {
            let gap = lv - z.length();
            if gap.is_multiple_of(2) {
                continue;
            }
            let mu = self.p(&z, &v).get((gap - 1) / 2).copied().unwrap_or(0);
            if mu != 0 {
                let pxz = self.p(x, &z);
                add_into(&mut out, &pxz, (w.length() - z.length()) / 2, -mu);
            }
        }
        let out = trim(out);
        self.memo.insert(key, out.clone());
        out
    }

    /// `h_{x,w}(v) = v^(l(w)-l(x)) P_{x,w}(v^-2)`.
    pub fn h(&mut self, x: &GroupElement, w: &GroupElement) -> Laurent {
        let d = (w.length() - x.length()) as i32;
        let mut out = Laurent::zero();
        for (i, c) in self.p(x, w).iter().enumerate() {
            out.add_term(d - 2 * i as i32, *c);
        }
        out
    }
}
