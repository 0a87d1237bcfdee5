//! Bott-Samelson bimodules `BS(w) = B_{s_1} (x) ... (x) B_{s_k}` for a word,
//! stored in the string basis `c_e`. Slot `i` of a mask is bit `1 << i`; a set
//! bit stands for `1 (x) 1` and a clear bit for `c_s`.
//!
//! The localisation `BS(w)_Q` has the eigenbasis `kappa_f` (`c_s` for clear
//! bits, `c~_s = c_s + alpha_s c_id` for set bits), and `kappa_f` lies in the
//! component of the target `w^f`. The structure algebra acts componentwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::One;
use thiserror::Error;

use crate::coxeter::{CoxeterError, CoxeterGroup, GroupElement};
use crate::linalg::{sparse_kernel, SparseVec};
use crate::poly::{monomials_of_degree, Monomial, Poly};
use crate::ratfun::RatFun;
use crate::rational::Q;
use crate::structure::{PieriReport, Section, Structure, StructureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BimoduleError {
    #[error("denominators do not clear in the string basis: {0}")]
    DenominatorNotCleared(String),
    #[error("section is not defined at {0}")]
    SectionTooSmall(String),
    #[error("section is not GKM: division by {0} failed")]
    NotGkm(String),
    #[error("element is not in the span of the H_w basis")]
    NotInHw,
    #[error("H_w duality needs a reduced word, got {0}")]
    NotReduced(String),
    #[error("Pieri expansion of P_(w,{x}) times {lambda} is unexpected: {detail}")]
    PieriShape { x: String, lambda: String, detail: String },
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Renders a mask as a 0/1 string, slot 0 first.
pub fn mask_bits(mask: usize, len: usize) -> String {
    (0..len).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Inverse of [`mask_bits`] for a slice of 0/1 values.
pub fn bits_to_mask(bits: &[u8]) -> usize {
    bits.iter().enumerate().fold(0, |m, (i, &b)| m | ((b as usize & 1) << i))
}

/// Moves `f`, sitting just right of slot `upto - 1` of `c_mask` in
/// `BS(word)`, to the far left using `c_id f = s(f) c_id - d_s(f) c_s`.
pub fn push_left(g: &CoxeterGroup, word: &[u8], mask: usize, upto: usize, f: &Poly) -> Vec<(usize, Poly)> {
    let mut cur = vec![(mask, f.clone())];
    for j in (0..upto).rev() {
        if mask >> j & 1 == 0 {
            continue;
        }
        let s = word[j];
        let mut next = Vec::with_capacity(2 * cur.len());
        for (m, p) in cur {
            let d = g.demazure_s(s, &p);
            let sp = g.act(&g.gen(s), &p);
            if !sp.is_zero() {
                next.push((m, sp));
            }
            if !d.is_zero() {
                next.push((m & !(1 << j), -&d));
            }
        }
        cur = next;
    }
    cur
}

/// An element `sum_e b_e c_e` of `BS(w)`, coefficients on the left.
#[derive(Clone, PartialEq, Eq)]
pub struct BSElement {
    pub coords: Vec<Poly>,
}

impl BSElement {
    pub fn zero(len: usize, nvars: usize) -> Self {
        BSElement { coords: vec![Poly::zero(nvars); 1 << len] }
    }

    pub fn len(&self) -> usize {
        self.coords.len().trailing_zeros() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coeff(&self, mask: usize) -> &Poly {
        &self.coords[mask]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &BSElement) -> BSElement {
        BSElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &BSElement) -> BSElement {
        BSElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    /// Left multiplication by a polynomial.
    pub fn scale(&self, f: &Poly) -> BSElement {
        BSElement { coords: self.coords.iter().map(|a| a * f).collect() }
    }

    pub fn scale_q(&self, c: &Q) -> BSElement {
        BSElement { coords: self.coords.iter().map(|a| a.scale(c)).collect() }
    }

    /// Degree of a homogeneous element (`deg c_e = #zeros - #ones`).
    pub fn degree(&self) -> Option<i64> {
        let len = self.len() as i64;
        let mut found = None;
        for (m, p) in self.coords.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let d = p.grade()? + len - 2 * m.count_ones() as i64;
            match found {
                None => found = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        found
    }
}

impl fmt::Debug for BSElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BSElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let len = self.len();
        let mut first = true;
        for (m, p) in self.coords.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({p})c_{}", mask_bits(m, len))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Computations in `BS(w)` for a fixed word.
pub struct BottSamelson<'g> {
    pub st: Structure<'g>,
    word: Vec<u8>,
    nv: usize,
    /// `prefix[f][i]`: product of the letters `s_j` with `j < i` kept by `f`.
    prefix: Vec<Vec<GroupElement>>,
    /// `beta[f][i] = prefix[f][i](alpha_{s_i})`.
    beta: Vec<Vec<Poly>>,
    /// Targets of all subexpressions of `word[..i]`, for each `i`.
    omegas: Vec<Vec<GroupElement>>,
    kappa_string: OnceLock<Vec<BSElement>>,
    products: Mutex<HashMap<(usize, usize), Vec<(usize, Poly)>>>,
}

impl<'g> BottSamelson<'g> {
    pub fn new(group: &'g CoxeterGroup, word: &[u8]) -> Self {
        let len = word.len();
        let nv = group.dim();
        let mut prefix = Vec::with_capacity(1 << len);
        let mut beta = Vec::with_capacity(1 << len);
        for f in 0..1usize << len {
            let mut x = GroupElement::identity();
            let mut px = Vec::with_capacity(len + 1);
            let mut bx = Vec::with_capacity(len);
            for (i, &s) in word.iter().enumerate() {
                px.push(x.clone());
                bx.push(group.act_root(&x, s));
                if f >> i & 1 == 1 {
                    x = group.mul_gen(&x, s);
                }
            }
            px.push(x);
            prefix.push(px);
            beta.push(bx);
        }
        let omegas = (0..=len)
            .map(|i| {
                let set: BTreeSet<GroupElement> = (0..1usize << i).map(|f| prefix[f][i].clone()).collect();
                set.into_iter().collect()
            })
            .collect();
        BottSamelson {
            st: Structure::new(group),
            word: word.to_vec(),
            nv,
            prefix,
            beta,
            omegas,
            kappa_string: OnceLock::new(),
            products: Mutex::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &'g CoxeterGroup {
        self.st.group()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nv
    }

    pub fn num_masks(&self) -> usize {
        1 << self.len()
    }

    pub fn full_mask(&self) -> usize {
        self.num_masks() - 1
    }

    /// `deg c_e`.
    pub fn mask_degree(&self, mask: usize) -> i64 {
        self.len() as i64 - 2 * mask.count_ones() as i64
    }

    /// The target `w^f` of a mask.
    pub fn target(&self, mask: usize) -> &GroupElement {
        &self.prefix[mask][self.len()]
    }

    /// All subexpression targets, sorted.
    pub fn omega(&self) -> &[GroupElement] {
        &self.omegas[self.len()]
    }

    pub fn zero(&self) -> BSElement {
        BSElement::zero(self.len(), self.nv)
    }

    pub fn basis(&self, mask: usize) -> BSElement {
        let mut b = self.zero();
        b.coords[mask] = Poly::one(self.nv);
        b
    }

    /// `1 (x) 1 (x) ... (x) 1`.
    pub fn one_tensor(&self) -> BSElement {
        self.basis(self.full_mask())
    }

    pub fn c_top(&self) -> BSElement {
        self.basis(0)
    }

    fn push_left(&self, mask: usize, upto: usize, f: &Poly) -> Vec<(usize, Poly)> {
        push_left(self.group(), &self.word, mask, upto, f)
    }

    /// Right multiplication by `f`.
    pub fn right_mul(&self, b: &BSElement, f: &Poly) -> BSElement {
        let mut out = self.zero();
        for (e, be) in b.coords.iter().enumerate() {
            if be.is_zero() {
                continue;
            }
            for (m, p) in self.push_left(e, self.len(), f) {
                out.coords[m].add_assign_ref(&(be * &p));
            }
        }
        out
    }

    /// `c_a c_b` in the string basis; depends only on `a & b` and on the
    /// slots where both are `c_s` (each contributing `c_s^2 = -alpha_s c_s`).
    fn basis_product(&self, a: usize, b: usize) -> Vec<(usize, Poly)> {
        let and = a & b;
        let both_s = !(a | b) & self.full_mask();
        if let Some(v) = self.products.lock().unwrap().get(&(and, both_s)) {
            return v.clone();
        }
        let g = self.group();
        let mut cur: Vec<(usize, Poly)> = vec![(0, Poly::one(self.nv))];
        for i in 0..self.len() {
            if both_s >> i & 1 == 1 {
                let neg_alpha = -&g.alpha(self.word[i]);
                let mut next: BTreeMap<usize, Poly> = BTreeMap::new();
                for (m, p) in &cur {
                    for (m2, q) in self.push_left(*m, i, &neg_alpha) {
                        next.entry(m2).or_insert_with(|| Poly::zero(self.nv)).add_assign_ref(&(p * &q));
                    }
                }
                cur = next.into_iter().filter(|(_, p)| !p.is_zero()).collect();
            } else {
                let bit = and & (1 << i);
                for t in cur.iter_mut() {
                    t.0 |= bit;
                }
            }
        }
        self.products.lock().unwrap().insert((and, both_s), cur.clone());
        cur
    }

    /// The componentwise (ring) product.
    pub fn multiply(&self, a: &BSElement, b: &BSElement) -> BSElement {
        let mut out = self.zero();
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai * bj;
                for (m, p) in self.basis_product(i, j) {
                    out.coords[m].add_assign_ref(&(&c * &p));
                }
            }
        }
        out
    }

    /// Coefficient of `c_top`.
    pub fn trace(&self, b: &BSElement) -> Poly {
        b.coords[0].clone()
    }

    /// The intersection form `<a, b> = Tr(a b)`.
    pub fn iform(&self, a: &BSElement, b: &BSElement) -> Poly {
        self.trace(&self.multiply(a, b))
    }

    pub fn gram(&self, elems: &[BSElement]) -> Vec<Vec<Poly>> {
        elems.iter().map(|a| elems.iter().map(|b| self.iform(a, b)).collect()).collect()
    }

    /// `c_e = sum_f q_f kappa_f`: nonzero only for `f <= e` bitwise, with
    /// `q_f = prod_{e_i = 1} (+-1) / beta_{f,i}`, sign `-` where `f_i = 0`.
    pub fn kappa_coeffs(&self, e: usize) -> Vec<(usize, RatFun)> {
        let mut out = Vec::new();
        let mut f = e;
        loop {
            let mut sign = Q::one();
            let mut den = Vec::new();
            for i in 0..self.len() {
                if e >> i & 1 == 1 {
                    if f >> i & 1 == 0 {
                        sign = -sign;
                    }
                    den.push(self.beta[f][i].clone());
                }
            }
            out.push((f, RatFun::new(Poly::constant(self.nv, sign), &den)));
            if f == 0 {
                break;
            }
            f = (f - 1) & e;
        }
        out
    }

    /// Coordinates in the `kappa` basis.
    pub fn to_kappa(&self, b: &BSElement) -> Vec<RatFun> {
        let mut out = vec![RatFun::zero(self.nv); self.num_masks()];
        for (e, be) in b.coords.iter().enumerate() {
            if be.is_zero() {
                continue;
            }
            for (f, q) in self.kappa_coeffs(e) {
                out[f] = out[f].add(&q.mul_poly(be));
            }
        }
        out
    }

    /// `kappa_f` in the string basis.
    pub fn kappa_in_string(&self, f: usize) -> &BSElement {
        &self.kappa_string.get_or_init(|| (0..self.num_masks()).map(|f| self.build_kappa(f)).collect())[f]
    }

    fn build_kappa(&self, f: usize) -> BSElement {
        let g = self.group();
        let mut cur: BTreeMap<usize, Poly> = BTreeMap::from([(0, Poly::one(self.nv))]);
        for i in 0..self.len() {
            if f >> i & 1 == 0 {
                continue;
            }
            let alpha = g.alpha(self.word[i]);
            let mut next = cur.clone();
            for (m, p) in &cur {
                for (m2, q) in self.push_left(*m, i, &alpha) {
                    next.entry(m2 | 1 << i).or_insert_with(|| Poly::zero(self.nv)).add_assign_ref(&(p * &q));
                }
            }
            cur = next;
        }
        let mut out = self.zero();
        for (m, p) in cur {
            out.coords[m] = p;
        }
        out
    }

    /// Back from `kappa` coordinates; fails unless the result is integral.
    pub fn from_kappa(&self, k: &[RatFun]) -> Result<BSElement, BimoduleError> {
        let mut acc = vec![RatFun::zero(self.nv); self.num_masks()];
        for (f, kf) in k.iter().enumerate() {
            if kf.is_zero() {
                continue;
            }
            for (e, p) in self.kappa_in_string(f).coords.iter().enumerate() {
                if !p.is_zero() {
                    acc[e] = acc[e].add(&kf.mul_poly(p));
                }
            }
        }
        let mut out = self.zero();
        for (e, r) in acc.into_iter().enumerate() {
            out.coords[e] = r
                .as_poly()
                .cloned()
                .ok_or_else(|| BimoduleError::DenominatorNotCleared(format!("{r} at c_{}", mask_bits(e, self.len()))))?;
        }
        Ok(out)
    }

    /// `{x : b_x != 0}` for the decomposition `b = sum_x b_x` of `BS(w)_Q`.
    pub fn support(&self, b: &BSElement) -> BTreeSet<GroupElement> {
        self.to_kappa(b)
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(f, _)| self.target(f).clone())
            .collect()
    }

    fn section_value<'a>(&self, z: &'a Section, x: &GroupElement) -> Result<&'a Poly, BimoduleError> {
        z.values.get(x).ok_or_else(|| BimoduleError::SectionTooSmall(self.group().format(x)))
    }

    /// Action of a section through the `kappa` basis.
    pub fn z_act_kappa(&self, z: &Section, b: &BSElement) -> Result<BSElement, BimoduleError> {
        let mut k = self.to_kappa(b);
        for (f, kf) in k.iter_mut().enumerate() {
            if !kf.is_zero() {
                *kf = kf.mul_poly(self.section_value(z, self.target(f))?);
            }
        }
        self.from_kappa(&k)
    }

    /// Action of a section, by peeling the last slot:
    /// `z (m (x) c_s) = (z m) (x) c_s` and
    /// `z (m (x) c_id) = ((s.z) m) (x) c_id + ((d_s z) m) (x) c_s`,
    /// where `(s.z)_v = z_{vs}` and `(d_s z)_v = (z_{vs} - z_v) / v(alpha_s)`.
    pub fn z_act(&self, z: &Section, b: &BSElement) -> Result<BSElement, BimoduleError> {
        let len = self.len();
        let mut vals = BTreeMap::new();
        for x in &self.omegas[len] {
            vals.insert(x.clone(), self.section_value(z, x)?.clone());
        }
        let coords = self.act_rec(len, &vals, b.coords.clone())?;
        Ok(BSElement { coords })
    }

    fn act_rec(&self, i: usize, z: &BTreeMap<GroupElement, Poly>, m: Vec<Poly>) -> Result<Vec<Poly>, BimoduleError> {
        if i == 0 {
            return Ok(vec![&m[0] * &z[&GroupElement::identity()]]);
        }
        let g = self.group();
        let half = 1 << (i - 1);
        let (m0, m1) = m.split_at(half);
        let mut out = vec![Poly::zero(self.nv); 2 * half];
        if m0.iter().any(|p| !p.is_zero()) {
            let lower: BTreeMap<GroupElement, Poly> =
                self.omegas[i - 1].iter().map(|v| (v.clone(), z[v].clone())).collect();
            for (k, p) in self.act_rec(i - 1, &lower, m0.to_vec())?.into_iter().enumerate() {
                out[k].add_assign_ref(&p);
            }
        }
        if m1.iter().any(|p| !p.is_zero()) {
            let s = self.word[i - 1];
            let mut sz = BTreeMap::new();
            let mut dz = BTreeMap::new();
            for v in &self.omegas[i - 1] {
                let zvs = &z[&g.mul_gen(v, s)];
                let root = g.act_root(v, s);
                let diff = zvs - &z[v];
                let q = if diff.is_zero() {
                    diff
                } else {
                    diff.div_exact(&root).ok_or_else(|| BimoduleError::NotGkm(root.to_string()))?
                };
                sz.insert(v.clone(), zvs.clone());
                dz.insert(v.clone(), q);
            }
            for (k, p) in self.act_rec(i - 1, &sz, m1.to_vec())?.into_iter().enumerate() {
                out[k + half].add_assign_ref(&p);
            }
            for (k, p) in self.act_rec(i - 1, &dz, m1.to_vec())?.into_iter().enumerate() {
                out[k].add_assign_ref(&p);
            }
        }
        Ok(out)
    }

    /// `P_{w,x} = P_x . 1^(x)` for every target `x`.
    pub fn hw_basis(&self) -> Result<BTreeMap<GroupElement, BSElement>, BimoduleError> {
        let omega = self.omega().to_vec();
        let one = self.one_tensor();
        omega
            .iter()
            .map(|x| Ok((x.clone(), self.z_act(&self.st.p(x, &omega), &one)?)))
            .collect()
    }

    /// `c_{can_y}` for every `y <= w`; needs a reduced word.
    pub fn canonical_elements(&self) -> Result<BTreeMap<GroupElement, BSElement>, BimoduleError> {
        let g = self.group();
        if !g.is_reduced_word(&self.word) {
            return Err(BimoduleError::NotReduced(g.format_word(&self.word)));
        }
        self.omega()
            .iter()
            .map(|y| {
                let e = g.canonical_subexpression(&self.word, y)?;
                Ok((y.clone(), self.basis(bits_to_mask(&e.bits))))
            })
            .collect()
    }

    /// Coordinates of `h` in the basis `P_{w,y}` via `<P_{w,x}, c_{can_y}> =
    /// delta`; the recombination is checked.
    pub fn hw_coords(&self, h: &BSElement) -> Result<BTreeMap<GroupElement, Poly>, BimoduleError> {
        let can = self.canonical_elements()?;
        let basis = self.hw_basis()?;
        let mut coords = BTreeMap::new();
        let mut rebuilt = self.zero();
        for (y, c) in &can {
            let a = self.iform(h, c);
            if !a.is_zero() {
                rebuilt = rebuilt.add(&basis[y].scale(&a));
                coords.insert(y.clone(), a);
            }
        }
        if &rebuilt != h {
            return Err(BimoduleError::NotInHw);
        }
        Ok(coords)
    }

    /// Expands `P_{w,x} . lambda` in `H_w` and matches it against the
    /// Pieri shape (leading `x(lambda)`, `+-d_t(lambda)` on covers `y <= w`).
    pub fn pieri_bs(&self, x: &GroupElement, lambda: &Poly) -> Result<PieriReport, BimoduleError> {
        let g = self.group();
        let basis = self.hw_basis()?;
        let h = self.right_mul(&basis[x], lambda);
        let expansion = self.hw_coords(&h)?;
        let shape = |detail: String| BimoduleError::PieriShape { x: g.format(x), lambda: lambda.to_string(), detail };
        let lead = expansion.get(x).cloned().unwrap_or_else(|| Poly::zero(self.nv));
        if lead != g.act(x, lambda) {
            return Err(shape(format!("leading coefficient {lead}")));
        }
        let omega: BTreeSet<&GroupElement> = self.omega().iter().collect();
        let covers: Vec<GroupElement> = g.covers(x).into_iter().filter(|y| omega.contains(y)).collect();
        let mut edge_signs = Vec::new();
        for y in &covers {
            let t = g.multiply(&g.inverse(x), y);
            let r = g.reflection(&t)?;
            let dt = Poly::constant(self.nv, g.eval_functional(&r.coroot, lambda));
            let c = expansion.get(y).cloned().unwrap_or_else(|| Poly::zero(self.nv));
            if dt.is_zero() {
                if !c.is_zero() {
                    return Err(shape(format!("nonzero coefficient {c} where d_t vanishes")));
                }
            } else if c == dt {
                edge_signs.push((y.clone(), 1));
            } else if c == -&dt {
                edge_signs.push((y.clone(), -1));
            } else {
                return Err(shape(format!("coefficient {c} at {} is not +-{dt}", g.format(y))));
            }
        }
        for y in expansion.keys() {
            if y != x && !covers.contains(y) {
                return Err(shape(format!("term at non-cover {}", g.format(y))));
            }
        }
        Ok(PieriReport { w: x.clone(), lambda: lambda.clone(), expansion, edge_signs })
    }

    /// Column index of the degree-`d` part of `BS(w)` over `Q`: pairs
    /// `(mask, monomial)` with `2 deg(monomial) + deg c_mask = d`.
    pub fn degree_space(&self, d: i64) -> DegreeSpace {
        let mut cols = Vec::new();
        for mask in 0..self.num_masks() {
            let rest = d - self.mask_degree(mask);
            if rest < 0 || rest % 2 != 0 {
                continue;
            }
            for mono in monomials_of_degree(self.nv, (rest / 2) as u32) {
                cols.push((mask, mono));
            }
        }
        let index = cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        DegreeSpace { len: self.len(), nvars: self.nv, cols, index }
    }

    /// Basis of the degree-`d` part of `Gamma_A BS(w)`, the elements whose
    /// components vanish outside `a`.
    pub fn gamma(&self, a: &BTreeSet<GroupElement>, d: i64) -> Vec<BSElement> {
        let space = self.degree_space(d);
        let mut rows: BTreeMap<(usize, Monomial), SparseVec> = BTreeMap::new();
        for f in 0..self.num_masks() {
            if a.contains(self.target(f)) {
                continue;
            }
            // sum_e b_e q_f(c_e), times prod_i beta_{f,i}
            for (col, &(e, mono)) in space.cols.iter().enumerate() {
                if e & f != f {
                    continue;
                }
                let mut p = Poly::monomial(self.nv, mono, Q::one());
                for i in 0..self.len() {
                    if e >> i & 1 == 1 {
                        if f >> i & 1 == 0 {
                            p = -&p;
                        }
                    } else {
                        p = &p * &self.beta[f][i];
                    }
                }
                for (m, c) in p.terms() {
                    rows.entry((f, *m)).or_default().insert(col, c.clone());
                }
            }
        }
        let rows: Vec<SparseVec> = rows.into_values().collect();
        sparse_kernel(&rows, space.cols.len()).iter().map(|v| space.from_vec(v)).collect()
    }

    /// Degree-`d` elements commuting with every linear form; equals
    /// `Gamma_{id}` when no `x != id` in the support fixes `V` pointwise.
    pub fn commuting_part(&self, d: i64) -> Vec<BSElement> {
        let space = self.degree_space(d);
        let target = self.degree_space(d + 2);
        let mut rows: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (li, lambda) in self.group().basis_of_v().iter().enumerate() {
            for (col, &(e, mono)) in space.cols.iter().enumerate() {
                let mut b = self.zero();
                b.coords[e] = Poly::monomial(self.nv, mono, Q::one());
                let diff = self.right_mul(&b, lambda).sub(&b.scale(lambda));
                for (r, c) in target.to_vec(&diff) {
                    rows.entry((li, r)).or_default().insert(col, c);
                }
            }
        }
        let rows: Vec<SparseVec> = rows.into_values().filter(|r| !r.is_empty()).collect();
        sparse_kernel(&rows, space.cols.len()).iter().map(|v| space.from_vec(v)).collect()
    }
}

/// Coordinates of one graded piece of `BS(w)` as a `Q`-vector space.
pub struct DegreeSpace {
    len: usize,
    nvars: usize,
    pub cols: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
}

impl DegreeSpace {
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Fails silently on terms of the wrong degree by dropping them; callers
    /// only pass homogeneous elements of the right degree.
    pub fn to_vec(&self, b: &BSElement) -> SparseVec {
        let mut v = SparseVec::new();
        for (e, p) in b.coords.iter().enumerate() {
            for (m, c) in p.terms() {
                if let Some(&i) = self.index.get(&(e, *m)) {
                    v.insert(i, c.clone());
                }
            }
        }
        v
    }

    pub fn from_vec(&self, v: &SparseVec) -> BSElement {
        let mut out = BSElement::zero(self.len, self.nvars);
        for (i, c) in v {
            let (e, m) = self.cols[*i];
            out.coords[e].add_assign_ref(&Poly::monomial(self.nvars, m, c.clone()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::preset;

    #[test]
    fn rank_one_gram_and_products() {
        let g = preset("A1").unwrap();
        let bs = BottSamelson::new(&g, &[0]);
        let a = g.alpha(0);
        let gram = bs.gram(&[bs.basis(1), bs.basis(0)]);
        assert!(gram[0][0].is_zero());
        assert!(gram[0][1].is_one_poly());
        assert_eq!(gram[1][1], -&a);
        let sq = bs.multiply(&bs.c_top(), &bs.c_top());
        assert_eq!(sq, bs.c_top().scale(&-&a));
    }

    trait IsOne {
        fn is_one_poly(&self) -> bool;
    }
    impl IsOne for Poly {
        fn is_one_poly(&self) -> bool {
            *self == Poly::one(self.nvars())
        }
    }

    #[test]
    fn nil_hecke_relation() {
        let g = preset("A2").unwrap();
        let bs = BottSamelson::new(&g, &[0]);
        let f = &g.alpha(1) * &g.alpha(1);
        let lhs = bs.right_mul(&bs.one_tensor(), &f);
        let expect = bs.one_tensor().scale(&g.act(&g.gen(0), &f)).sub(&bs.c_top().scale(&g.demazure_s(0, &f)));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn kappa_round_trip_and_eigenvectors() {
        let g = preset("A2").unwrap();
        let bs = BottSamelson::new(&g, &[0, 1, 0]);
        let lam = g.basis_of_v();
        for f in 0..bs.num_masks() {
            let k = bs.kappa_in_string(f).clone();
            let coords = bs.to_kappa(&k);
            for (h, c) in coords.iter().enumerate() {
                assert_eq!(c.is_one(), h == f);
                assert!(h == f || c.is_zero());
            }
            let x = bs.target(f);
            for l in &lam {
                assert_eq!(bs.right_mul(&k, l), k.scale(&g.act(x, l)));
            }
        }
        for e in 0..bs.num_masks() {
            let b = bs.basis(e).scale(&g.alpha(1));
            assert_eq!(bs.from_kappa(&bs.to_kappa(&b)).unwrap(), b);
        }
    }

    #[test]
    fn rank_one_hw_basis() {
        let g = preset("universal3").unwrap();
        let bs = BottSamelson::new(&g, &[0]);
        let hw = bs.hw_basis().unwrap();
        let a = g.alpha(0);
        let expect = bs.one_tensor().scale(&a).add(&bs.c_top());
        assert_eq!(hw[&g.gen(0)], expect);
        assert_eq!(hw[&g.identity()], bs.one_tensor());
    }

    #[test]
    fn recursive_action_matches_kappa() {
        let g = preset("A2").unwrap();
        let word = [0u8, 1, 0];
        let bs = BottSamelson::new(&g, &word);
        let omega = bs.omega().to_vec();
        let b = bs.basis(0b101).scale(&g.alpha(0)).add(&bs.basis(0b010));
        for x in &omega {
            let z = bs.st.p(x, &omega);
            assert_eq!(bs.z_act(&z, &b).unwrap(), bs.z_act_kappa(&z, &b).unwrap());
        }
    }

    #[test]
    fn hw_duality_and_degrees() {
        let g = preset("A2").unwrap();
        let bs = BottSamelson::new(&g, &[0, 1, 0]);
        let hw = bs.hw_basis().unwrap();
        let can = bs.canonical_elements().unwrap();
        for (x, p) in &hw {
            assert_eq!(p.degree(), Some(2 * x.length() as i64 - 3));
            for (y, c) in &can {
                let v = bs.iform(p, c);
                let expect = if x == y { Poly::one(g.dim()) } else { Poly::zero(g.dim()) };
                assert_eq!(v, expect);
            }
        }
    }

    #[test]
    fn support_of_top_and_one() {
        let g = preset("A2").unwrap();
        let bs = BottSamelson::new(&g, &[0, 1]);
        let sup = bs.support(&bs.c_top());
        assert_eq!(sup, BTreeSet::from([g.identity()]));
        let sup = bs.support(&bs.one_tensor());
        assert_eq!(sup.len(), 4);
        let top = BTreeSet::from([g.element(&[0, 1])]);
        // Gamma_{st} in degree 2 is spanned by P_{w,st}
        let gam = bs.gamma(&top, 2);
        assert_eq!(gam.len(), 1);
        let p = &bs.hw_basis().unwrap()[&g.element(&[0, 1])];
        let ratio = gam[0].coords.iter().zip(&p.coords).find(|(a, _)| !a.is_zero()).map(|(a, b)| a.div_exact(b).unwrap());
        assert_eq!(gam[0], p.scale(&ratio.unwrap()));
    }
}
