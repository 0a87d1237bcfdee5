//! The moment-graph structure algebra on finite supports: sections, the
//! basis `P_x`, straightening, the `W`-action, the twisted right action of
//! `R`, the Pieri rule, the splitting over `s`-invariants, and `Z/R_+Z`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coxeter::{CoxeterGroup, GroupElement};
use crate::nilhecke::{NilHecke, NilHeckeError};
use crate::poly::Poly;
use crate::rational::{qf, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("section is not in the span of the P-basis: {0}")]
    NotInSpan(String),
    #[error("support is not stable under right multiplication by {0}")]
    SupportNotStable(String),
    #[error("support is missing {0}")]
    SupportTooSmall(String),
    #[error("exact division failed at {0}")]
    DivisionFailure(String),
    #[error("Pieri expansion of P_{w} times {lambda} is unexpected: {detail}")]
    PieriShape { w: String, lambda: String, detail: String },
    #[error(transparent)]
    NilHecke(#[from] NilHeckeError),
}

/// A map from a finite subset of `W` to polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub values: BTreeMap<GroupElement, Poly>,
}

impl Section {
    pub fn constant(omega: &[GroupElement], f: &Poly) -> Self {
        Section { values: omega.iter().map(|v| (v.clone(), f.clone())).collect() }
    }

    pub fn zero(omega: &[GroupElement], nvars: usize) -> Self {
        Self::constant(omega, &Poly::zero(nvars))
    }

    pub fn support(&self) -> Vec<GroupElement> {
        self.values.keys().cloned().collect()
    }

    pub fn get(&self, v: &GroupElement) -> &Poly {
        &self.values[v]
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Section) -> Section {
        Section { values: self.values.iter().map(|(v, p)| (v.clone(), p + other.get(v))).collect() }
    }

    pub fn sub(&self, other: &Section) -> Section {
        Section { values: self.values.iter().map(|(v, p)| (v.clone(), p - other.get(v))).collect() }
    }

    /// Pointwise (left) multiplication by a polynomial.
    pub fn scale(&self, f: &Poly) -> Section {
        Section { values: self.values.iter().map(|(v, p)| (v.clone(), p * f)).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Section) -> Section {
        Section { values: self.values.iter().map(|(v, p)| (v.clone(), p * other.get(v))).collect() }
    }

    /// Common degree of the nonzero values (`deg V = 2`).
    pub fn grade(&self) -> Option<i64> {
        let mut it = self.values.values().filter(|p| !p.is_zero());
        let d = it.next()?.grade()?;
        if it.all(|p| p.grade() == Some(d)) {
            Some(d)
        } else {
            None
        }
    }

    pub fn restrict(&self, omega: &[GroupElement]) -> Section {
        Section { values: omega.iter().map(|v| (v.clone(), self.values[v].clone())).collect() }
    }
}

/// Signs found when comparing a computed Pieri expansion with the formula.
#[derive(Clone, Debug)]
pub struct PieriReport {
    pub w: GroupElement,
    pub lambda: Poly,
    pub expansion: BTreeMap<GroupElement, Poly>,
    /// For each cover `v` of `w` with `d_t(lambda) != 0`, the sign `c` with
    /// coefficient `= c * d_t(lambda)`.
    pub edge_signs: Vec<(GroupElement, i8)>,
}

/// Structure-algebra computations for one group.
pub struct Structure<'g> {
    pub nh: NilHecke<'g>,
}

impl<'g> Structure<'g> {
    pub fn new(group: &'g CoxeterGroup) -> Self {
        Structure { nh: NilHecke::new(group) }
    }

    pub fn group(&self) -> &'g CoxeterGroup {
        self.nh.group
    }

    fn nvars(&self) -> usize {
        self.group().dim()
    }

    /// `P_x` restricted to `omega`: `v -> d(x, v)`.
    pub fn p(&self, x: &GroupElement, omega: &[GroupElement]) -> Section {
        let nv = self.nvars();
        Section {
            values: omega
                .iter()
                .map(|v| {
                    let val = if x.length() <= v.length() {
                        self.nh.d_row_fast(v).get(x).cloned().unwrap_or_else(|| Poly::zero(nv))
                    } else {
                        Poly::zero(nv)
                    };
                    (v.clone(), val)
                })
                .collect(),
        }
    }

    /// Edge congruences `z_v = z_{tv} mod alpha_t` on all moment-graph edges
    /// inside the support.
    pub fn validate_gkm(&self, z: &Section) -> bool {
        let g = self.group();
        let omega = z.support();
        g.moment_edges(&omega).iter().all(|e| {
            let diff = z.get(&e.v) - z.get(&e.w);
            diff.is_zero() || diff.div_exact(&e.t.root).is_some()
        })
    }

    /// Coefficients `c_x` with `z = sum c_x P_x` on a lower ideal.
    pub fn straighten(&self, z: &Section) -> Result<BTreeMap<GroupElement, Poly>, StructureError> {
        let g = self.group();
        let omega = z.support();
        let mut f = z.clone();
        let mut out = BTreeMap::new();
        for v in &omega {
            let fv = f.get(v).clone();
            if fv.is_zero() {
                continue;
            }
            let pv = self.nh.p(v);
            let c = fv.div_exact(&pv).ok_or_else(|| StructureError::NotInSpan(format!("value at {} not divisible by p", g.format(v))))?;
            let pvs = self.p(v, &omega);
            f = f.sub(&pvs.scale(&c));
            out.insert(v.clone(), c);
        }
        Ok(out)
    }

    /// `(x . z)_v = z_{vx}`.
    pub fn w_act(&self, x: &GroupElement, z: &Section) -> Result<Section, StructureError> {
        let g = self.group();
        let mut values = BTreeMap::new();
        for v in z.values.keys() {
            let vx = g.multiply(v, x);
            let val = z.values.get(&vx).ok_or_else(|| StructureError::SupportNotStable(g.format(x)))?;
            values.insert(v.clone(), val.clone());
        }
        Ok(Section { values })
    }

    /// `(z . f)_v = v(f) z_v`.
    pub fn right_mul(&self, z: &Section, f: &Poly) -> Section {
        let g = self.group();
        Section { values: z.values.iter().map(|(v, p)| (v.clone(), p * &g.act(v, f))).collect() }
    }

    /// Straightens `P_w . lambda` and compares it with the Pieri shape:
    /// leading term `w(lambda) P_w` and `+-d_t(lambda) P_v` on covers.
    pub fn pieri_z(&self, w: &GroupElement, lambda: &Poly, omega: &[GroupElement]) -> Result<PieriReport, StructureError> {
        let g = self.group();
        let covers = g.covers(w);
        for v in covers.iter().chain(std::iter::once(w)) {
            if !omega.contains(v) {
                return Err(StructureError::SupportTooSmall(g.format(v)));
            }
        }
        let z = self.right_mul(&self.p(w, omega), lambda);
        let expansion = self.straighten(&z)?;
        let shape_err = |detail: String| StructureError::PieriShape { w: g.format(w), lambda: lambda.to_string(), detail };
        let lead = expansion.get(w).cloned().unwrap_or_else(|| Poly::zero(self.nvars()));
        if lead != g.act(w, lambda) {
            return Err(shape_err(format!("leading coefficient {lead}")));
        }
        let mut edge_signs = Vec::new();
        for (x, c) in &expansion {
            if x == w {
                continue;
            }
            if !covers.contains(x) {
                return Err(shape_err(format!("term at non-cover {}", g.format(x))));
            }
            let t = g.multiply(&g.inverse(w), x);
            let r = g.reflection(&t).map_err(|e| shape_err(e.to_string()))?;
            let dt = Poly::constant(self.nvars(), g.eval_functional(&r.coroot, lambda));
            if *c == dt {
                edge_signs.push((x.clone(), 1));
            } else if *c == -&dt {
                edge_signs.push((x.clone(), -1));
            } else {
                return Err(shape_err(format!("coefficient {c} at {} is not +-{dt}", g.format(x))));
            }
        }
        for v in &covers {
            if !expansion.contains_key(v) {
                let t = g.multiply(&g.inverse(w), v);
                let r = g.reflection(&t).map_err(|e| shape_err(e.to_string()))?;
                if !g.eval_functional(&r.coroot, lambda).is_zero() {
                    return Err(shape_err(format!("missing cover {}", g.format(v))));
                }
            }
        }
        Ok(PieriReport { w: w.clone(), lambda: lambda.clone(), expansion, edge_signs })
    }

    /// `tau_s = (v(varpi_s))_v`.
    pub fn tau(&self, varpi: &Poly, omega: &[GroupElement]) -> Section {
        let g = self.group();
        Section { values: omega.iter().map(|v| (v.clone(), g.act(v, varpi))).collect() }
    }

    /// The default fundamental weight `varpi_s = alpha_s / 2`.
    pub fn varpi(&self, s: u8) -> Poly {
        self.group().alpha(s).scale(&qf(1, 2))
    }

    /// `z = a + b tau_s` with `a`, `b` invariant under `v -> vs`.
    pub fn s_split(&self, z: &Section, s: u8) -> Result<(Section, Section), StructureError> {
        self.s_split_with(z, s, &self.varpi(s))
    }

    pub fn s_split_with(&self, z: &Section, s: u8, varpi: &Poly) -> Result<(Section, Section), StructureError> {
        let g = self.group();
        let omega = z.support();
        let mut b = BTreeMap::new();
        for v in &omega {
            let vs = g.mul_gen(v, s);
            let zvs = z.values.get(&vs).ok_or_else(|| StructureError::SupportNotStable(g.format(&g.gen(s))))?;
            let diff = z.get(v) - zvs;
            let q = diff.div_exact(&g.act_root(v, s)).ok_or_else(|| StructureError::DivisionFailure(g.format(v)))?;
            b.insert(v.clone(), q);
        }
        let b = Section { values: b };
        let a = z.sub(&b.mul(&self.tau(varpi, &omega)));
        Ok((a, b))
    }

    /// Whether `z_{vs} = z_v` for all `v`.
    pub fn is_s_invariant(&self, z: &Section, s: u8) -> bool {
        let g = self.group();
        z.values.iter().all(|(v, p)| z.values.get(&g.mul_gen(v, s)).is_some_and(|q| q == p))
    }

    /// Structure constants of `Z` on the lower ideal `omega`:
    /// `P_u P_v = sum_x c^x_{u,v} P_x`.
    pub fn structure_constants(
        &self,
        omega: &[GroupElement],
    ) -> Result<BTreeMap<(GroupElement, GroupElement), BTreeMap<GroupElement, Poly>>, StructureError> {
        let sections: Vec<Section> = omega.iter().map(|x| self.p(x, omega)).collect();
        let mut out = BTreeMap::new();
        for (i, u) in omega.iter().enumerate() {
            for (j, v) in omega.iter().enumerate().skip(i) {
                let c = self.straighten(&sections[i].mul(&sections[j]))?;
                out.insert((u.clone(), v.clone()), c.clone());
                out.insert((v.clone(), u.clone()), c);
            }
        }
        Ok(out)
    }

    /// Multiplication table of `Z/R_+Z` on `{P_x : x in omega}`.
    pub fn zbar_structure(
        &self,
        omega: &[GroupElement],
    ) -> Result<BTreeMap<(GroupElement, GroupElement), BTreeMap<GroupElement, Q>>, StructureError> {
        Ok(self
            .structure_constants(omega)?
            .into_iter()
            .map(|(k, c)| {
                let vals = c
                    .into_iter()
                    .map(|(x, p)| (x, p.constant_term()))
                    .filter(|(_, q)| !q.is_zero())
                    .collect();
                (k, vals)
            })
            .collect())
    }

    /// Expansion of `s . P_w` obtained by reindexing and straightening.
    pub fn s_act_expansion(&self, s: u8, w: &GroupElement, omega: &[GroupElement]) -> Result<BTreeMap<GroupElement, Poly>, StructureError> {
        let g = self.group();
        let z = self.w_act(&g.gen(s), &self.p(w, omega))?;
        self.straighten(&z)
    }

    /// The all-ones section.
    pub fn one(&self, omega: &[GroupElement]) -> Section {
        Section::constant(omega, &Poly::one(self.nvars()))
    }

    /// Sum `sum c_x P_x` on `omega`.
    pub fn combine(&self, coeffs: &BTreeMap<GroupElement, Poly>, omega: &[GroupElement]) -> Section {
        let mut out = Section::zero(omega, self.nvars());
        for (x, c) in coeffs {
            out = out.add(&self.p(x, omega).scale(c));
        }
        out
    }
}

/// `1` or `-1` as a rational.
pub fn sign_q(s: i8) -> Q {
    if s >= 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::preset;

    #[test]
    fn p_sections_a2() {
        let g = preset("A2").unwrap();
        let st = Structure::new(&g);
        let sts = g.reduce(&[0, 1, 0]);
        let omega = g.interval(&sts).to_vec();
        let p = st.p(&g.gen(0), &omega);
        let (a, b) = (g.alpha(0), g.alpha(1));
        let expect = [Poly::zero(2), a.clone(), Poly::zero(2), a.clone(), &a + &b, &a + &b];
        // omega order: e, s, t, st, ts, sts
        for (v, e) in omega.iter().zip(expect.iter()) {
            assert_eq!(p.get(v), e, "{}", g.format(v));
        }
        assert!(st.validate_gkm(&p));
        let one = st.one(&omega);
        assert!(st.validate_gkm(&one));
        assert_eq!(st.straighten(&st.p(&sts, &omega)).unwrap().len(), 1);
    }

    #[test]
    fn gkm_rank_one() {
        let g = preset("A1").unwrap();
        let st = Structure::new(&g);
        let omega = vec![g.identity(), g.gen(0)];
        let bad = Section { values: [(g.identity(), Poly::zero(1)), (g.gen(0), Poly::one(1))].into_iter().collect() };
        assert!(!st.validate_gkm(&bad));
        let good = st.p(&g.gen(0), &omega);
        assert!(st.validate_gkm(&good));
        assert_eq!(st.straighten(&good).unwrap()[&g.gen(0)], Poly::one(1));
    }

    #[test]
    fn pieri_sign_rank_one() {
        let g = preset("A1").unwrap();
        let st = Structure::new(&g);
        let omega = vec![g.identity(), g.gen(0)];
        let lambda = Poly::var(1, 0);
        let r = st.pieri_z(&g.identity(), &lambda, &omega).unwrap();
        assert_eq!(r.edge_signs, vec![(g.gen(0), -1)]);
    }

    #[test]
    fn s_split_round_trip() {
        let g = preset("A1").unwrap();
        let st = Structure::new(&g);
        let omega = vec![g.identity(), g.gen(0)];
        let z = st.p(&g.gen(0), &omega);
        let (a, b) = st.s_split(&z, 0).unwrap();
        assert!(st.is_s_invariant(&a, 0) && st.is_s_invariant(&b, 0));
        assert_eq!(a.add(&b.mul(&st.tau(&st.varpi(0), &omega))), z);
        assert_eq!(b, Section::constant(&omega, &Poly::constant(1, -Q::one())));
    }

    #[test]
    fn zbar_rank_one() {
        let g = preset("A1").unwrap();
        let st = Structure::new(&g);
        let omega = vec![g.identity(), g.gen(0)];
        let t = st.zbar_structure(&omega).unwrap();
        assert!(t[&(g.gen(0), g.gen(0))].is_empty());
        assert_eq!(t[&(g.identity(), g.gen(0))][&g.gen(0)], Q::one());
    }
}
