//! Soergel modules `B-bar = k (x)_R B`: finite-dimensional graded vector
//! spaces with the right action of `V` and the action of `Z-bar = Z / R_+ Z`,
//! hom spaces over both, and an exact indecomposability test.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bimodule::{bits_to_mask, mask_bits, push_left, BSElement, BimoduleError, BottSamelson};
use crate::coxeter::{CoxeterError, CoxeterGroup, GroupElement};
use crate::hecke::{pairing, Hecke, Laurent};
use crate::linalg::{identity, inverse, kernel, mat_mul, mat_vec, rank, sparse_kernel, zeros, Echelon, Matrix, SparseVec};
use crate::poly::{Monomial, Poly};
use crate::rational::Q;
use crate::structure::{Section, StructureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmodError {
    #[error("could not decide whether the degree-0 endomorphism algebra has nontrivial idempotents")]
    Undetermined,
    #[error("verification failed at step {step}: {detail}")]
    VerificationFailed { step: String, detail: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// Which operators a hom space or endomorphism algebra must commute with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionSet {
    /// The right action of `V` and every `P-bar_x`.
    Zbar,
    /// The right action of `V` only.
    RightR,
    /// No operators (graded vector spaces).
    Trivial,
}

/// A graded module with action matrices; `A[i][j]` is the coefficient of
/// basis vector `i` in the image of basis vector `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoergelModule {
    pub name: String,
    pub degrees: Vec<i64>,
    pub labels: Vec<String>,
    /// Right action of the coordinate functions `x_0, ..., x_{n-1}`.
    pub right: Vec<Matrix>,
    /// Action of `P-bar_x`; absent keys act by zero.
    pub zbar: BTreeMap<GroupElement, Matrix>,
}

impl SoergelModule {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// `k` in degree 0, with `P-bar_id = 1` and all else zero.
    pub fn trivial(nvars: usize) -> Self {
        SoergelModule {
            name: "k".into(),
            degrees: vec![0],
            labels: vec!["1".into()],
            right: vec![zeros(1, 1); nvars],
            zbar: BTreeMap::from([(GroupElement::identity(), identity(1))]),
        }
    }

    /// Grading shift: degrees increase by `d`.
    pub fn shift(&self, d: i64) -> Self {
        let mut out = self.clone();
        out.degrees.iter_mut().for_each(|x| *x += d);
        out.name = format!("{}({d})", self.name);
        out
    }

    pub fn direct_sum(&self, other: &SoergelModule) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let block = |a: Option<&Matrix>, b: Option<&Matrix>| {
            let mut out = zeros(n + m, n + m);
            if let Some(a) = a {
                for i in 0..n {
                    for j in 0..n {
                        out[i][j] = a[i][j].clone();
                    }
                }
            }
            if let Some(b) = b {
                for i in 0..m {
                    for j in 0..m {
                        out[n + i][n + j] = b[i][j].clone();
                    }
                }
            }
            out
        };
        let keys: BTreeSet<&GroupElement> = self.zbar.keys().chain(other.zbar.keys()).collect();
        SoergelModule {
            name: format!("{} + {}", self.name, other.name),
            degrees: self.degrees.iter().chain(&other.degrees).copied().collect(),
            labels: self.labels.iter().chain(&other.labels).cloned().collect(),
            right: self.right.iter().zip(&other.right).map(|(a, b)| block(Some(a), Some(b))).collect(),
            zbar: keys.into_iter().map(|x| (x.clone(), block(self.zbar.get(x), other.zbar.get(x)))).collect(),
        }
    }

    /// Graded dimension `sum v^deg`.
    pub fn grdim(&self) -> Laurent {
        let mut out = Laurent::zero();
        for &d in &self.degrees {
            out.add_term(d as i32, 1);
        }
        out
    }

    fn operators<'a>(&'a self, other: &'a SoergelModule, set: ActionSet) -> Vec<(Option<&'a Matrix>, Option<&'a Matrix>)> {
        let mut ops = Vec::new();
        if set == ActionSet::Trivial {
            return ops;
        }
        for (a, b) in self.right.iter().zip(&other.right) {
            ops.push((Some(a), Some(b)));
        }
        if set == ActionSet::Zbar {
            let keys: BTreeSet<&GroupElement> = self.zbar.keys().chain(other.zbar.keys()).collect();
            for x in keys {
                if !x.is_identity() {
                    ops.push((self.zbar.get(x), other.zbar.get(x)));
                }
            }
        }
        ops
    }

    /// Applies the right action of a monomial to a vector.
    pub fn right_monomial(&self, m: Monomial, v: &[Q]) -> Vec<Q> {
        let mut out = v.to_vec();
        for (i, a) in self.right.iter().enumerate() {
            for _ in 0..m.exponent(i) {
                out = mat_vec(a, &out);
            }
        }
        out
    }
}

/// Degree-`d` maps `M -> N` commuting with the chosen operators.
#[derive(Clone, Debug)]
pub struct GradedHom {
    pub dims: BTreeMap<i64, usize>,
    pub bases: BTreeMap<i64, Vec<Matrix>>,
}

impl GradedHom {
    pub fn grdim(&self) -> Laurent {
        let mut out = Laurent::zero();
        for (&d, &n) in &self.dims {
            out.add_term(d as i32, n as i64);
        }
        out
    }

    pub fn dim_in(&self, d: i64) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }
}

/// Maps of one degree: `phi[i][j]` for `deg N_i = deg M_j + d`.
pub fn hom_degree(m: &SoergelModule, n: &SoergelModule, d: i64, set: ActionSet) -> Vec<Matrix> {
    let mut unknowns: HashMap<(usize, usize), usize> = HashMap::new();
    let mut cols = Vec::new();
    for i in 0..n.dim() {
        for j in 0..m.dim() {
            if n.degrees[i] == m.degrees[j] + d {
                unknowns.insert((i, j), cols.len());
                cols.push((i, j));
            }
        }
    }
    if cols.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<SparseVec> = Vec::new();
    for (am, an) in m.operators(n, set) {
        // (phi A_M - A_N phi)[i][j] = 0
        let mut eqs: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        if let Some(am) = am {
            for (&(i, k), &u) in &unknowns {
                for j in 0..m.dim() {
                    let c = &am[k][j];
                    if !c.is_zero() {
                        *eqs.entry((i, j)).or_default().entry(u).or_insert_with(Q::zero) += c;
                    }
                }
            }
        }
        if let Some(an) = an {
            for (&(k, j), &u) in &unknowns {
                for i in 0..n.dim() {
                    let c = &an[i][k];
                    if !c.is_zero() {
                        *eqs.entry((i, j)).or_default().entry(u).or_insert_with(Q::zero) -= c;
                    }
                }
            }
        }
        rows.extend(eqs.into_values().map(|r| r.into_iter().filter(|(_, c)| !c.is_zero()).collect::<SparseVec>()).filter(|r| !r.is_empty()));
    }
    sparse_kernel(&rows, cols.len())
        .into_iter()
        .map(|v| {
            let mut phi = zeros(n.dim(), m.dim());
            for (u, c) in v {
                let (i, j) = cols[u];
                phi[i][j] = c;
            }
            phi
        })
        .collect()
}

pub fn hom(m: &SoergelModule, n: &SoergelModule, set: ActionSet) -> GradedHom {
    let mut dims = BTreeMap::new();
    let mut bases = BTreeMap::new();
    if m.dim() == 0 || n.dim() == 0 {
        return GradedHom { dims, bases };
    }
    let lo = n.degrees.iter().min().unwrap() - m.degrees.iter().max().unwrap();
    let hi = n.degrees.iter().max().unwrap() - m.degrees.iter().min().unwrap();
    for d in lo..=hi {
        let b = hom_degree(m, n, d, set);
        if !b.is_empty() {
            dims.insert(d, b.len());
            bases.insert(d, b);
        }
    }
    GradedHom { dims, bases }
}

pub fn hom_zbar(m: &SoergelModule, n: &SoergelModule) -> GradedHom {
    hom(m, n, ActionSet::Zbar)
}

pub fn hom_right_r(m: &SoergelModule, n: &SoergelModule) -> GradedHom {
    hom(m, n, ActionSet::RightR)
}

/// Result of the indecomposability test.
#[derive(Clone, Debug, PartialEq)]
pub enum Indecomposability {
    /// The degree-0 endomorphism algebra is local.
    Indecomposable { end0_dim: usize, radical_dim: usize },
    /// A nontrivial idempotent of the degree-0 endomorphism algebra.
    Decomposable { idempotent: Matrix, image_dim: usize },
}

impl Indecomposability {
    pub fn is_indecomposable(&self) -> bool {
        matches!(self, Indecomposability::Indecomposable { .. })
    }
}

fn trace(a: &Matrix) -> Q {
    (0..a.len()).fold(Q::zero(), |acc, i| acc + &a[i][i])
}

fn flatten(a: &Matrix) -> Vec<Q> {
    a.iter().flatten().cloned().collect()
}

/// Minimal polynomial of a square matrix, monic, lowest degree first.
pub fn minimal_polynomial(a: &Matrix) -> Vec<Q> {
    let n = a.len();
    let mut powers: Vec<Matrix> = vec![identity(n)];
    loop {
        let k = powers.len();
        let next = mat_mul(&powers[k - 1], a);
        // solve next = sum c_i powers[i]
        let cols: Vec<Vec<Q>> = powers.iter().map(flatten).collect();
        let target = flatten(&next);
        let mut m: Matrix = (0..n * n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        for (r, row) in m.iter_mut().enumerate() {
            row.push(target[r].clone());
        }
        let ker = kernel(&m, k + 1);
        if let Some(v) = ker.iter().find(|v| !v[k].is_zero()) {
            let lead = v[k].clone();
            return v.iter().map(|c| c / &lead).collect();
        }
        powers.push(next);
    }
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
        if d > 2_000_000 {
            return None;
        }
    }
    Some(out)
}

/// Distinct rational roots of a polynomial given lowest degree first.
pub fn rational_roots(p: &[Q]) -> Vec<Q> {
    let mut coeffs = p.to_vec();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let mut roots = Vec::new();
    while coeffs.len() > 1 && coeffs[0].is_zero() {
        coeffs.remove(0);
        if !roots.contains(&Q::zero()) {
            roots.push(Q::zero());
        }
    }
    if coeffs.len() <= 1 {
        return roots;
    }
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
        return roots;
    };
    for p in &ps {
        for q in &qs {
            for sign in [1, -1] {
                let r = Q::new(p * sign, q.clone());
                if roots.contains(&r) {
                    continue;
                }
                let val = coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * &r + c);
                if val.is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

fn sub_scalar(a: &Matrix, r: &Q) -> Matrix {
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= r;
    }
    out
}

/// Projection onto the generalised `r`-eigenspace of `a` along the others.
fn eigen_projector(a: &Matrix, r: &Q) -> Matrix {
    let n = a.len();
    let b = sub_scalar(a, r);
    let mut p = identity(n);
    for _ in 0..n {
        p = mat_mul(&p, &b);
    }
    // columns: kernel of p, then a basis of the image of p
    let ker = kernel(&p, n);
    let mut cols: Vec<Vec<Q>> = ker.clone();
    let mut ech = Echelon::new();
    for v in &ker {
        ech.insert(&crate::linalg::to_sparse(v));
    }
    for j in 0..n {
        let col: Vec<Q> = (0..n).map(|i| p[i][j].clone()).collect();
        if ech.insert(&crate::linalg::to_sparse(&col)) {
            cols.push(col);
        }
    }
    let basis: Matrix = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let inv = inverse(&basis).expect("kernel and image of a power are complementary");
    let mut diag = zeros(n, n);
    for (i, row) in diag.iter_mut().enumerate().take(ker.len()) {
        row[i] = Q::one();
    }
    mat_mul(&mat_mul(&basis, &diag), &inv)
}

/// Decides whether `M` is indecomposable over the chosen operators.
pub fn indecomposable_over(m: &SoergelModule, set: ActionSet) -> Result<Indecomposability, SmodError> {
    let end0 = hom_degree(m, m, 0, set);
    let k = end0.len();
    // radical: kernel of the trace form
    let gram: Matrix = end0.iter().map(|a| end0.iter().map(|b| trace(&mat_mul(a, b))).collect()).collect();
    let radical_dim = k - rank(&gram);
    if k - radical_dim <= 1 {
        return Ok(Indecomposability::Indecomposable { end0_dim: k, radical_dim });
    }
    let mut candidates: Vec<Matrix> = end0.clone();
    for i in 0..k {
        for j in i + 1..k {
            let mut c = end0[i].clone();
            for (r, row) in c.iter_mut().enumerate() {
                for (s, x) in row.iter_mut().enumerate() {
                    *x += &end0[j][r][s] * Q::from_integer(BigInt::from(j as i64 + 2));
                }
            }
            candidates.push(c);
        }
    }
    for a in &candidates {
        let roots = rational_roots(&minimal_polynomial(a));
        if roots.len() >= 2 {
            let e = eigen_projector(a, &roots[0]);
            let image_dim = rank(&e);
            debug_assert_eq!(mat_mul(&e, &e), e);
            return Ok(Indecomposability::Decomposable { idempotent: e, image_dim });
        }
    }
    Err(SmodError::Undetermined)
}

/// Whether `e` is a nontrivial idempotent commuting with the operators.
pub fn is_nontrivial_idempotent(m: &SoergelModule, e: &Matrix, set: ActionSet) -> bool {
    let n = m.dim();
    if mat_mul(e, e) != *e || *e == zeros(n, n) || *e == identity(n) {
        return false;
    }
    for (a, _) in m.operators(m, set) {
        if let Some(a) = a {
            if mat_mul(e, a) != mat_mul(a, e) {
                return false;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !e[i][j].is_zero() && m.degrees[i] != m.degrees[j] {
                return false;
            }
        }
    }
    true
}

/// Constant parts of the expansions of `s . P_x` and `d_s P_x` on a lower
/// interval, as `(y, c)` lists.
type Expansions = (Vec<(GroupElement, Q)>, Vec<(GroupElement, Q)>);

/// Builds `bar(BS(w))` for many words, sharing work between prefixes.
///
/// For `m` in `BS(w)` the Z-action satisfies `z (m (x) c_s) = (z m) (x) c_s`
/// and `z (m (x) c_id) = ((s.z) m) (x) c_id + ((d_s z) m) (x) c_s`. Expanding
/// `s.P_x` and `d_s P_x` in the `P`-basis of the structure algebra of the
/// interval below `w` and keeping constant coefficients gives the matrix of
/// `P-bar_x` on `bar(BS(ws))` from the matrices on `bar(BS(w))`.
pub struct BarBuilder<'g> {
    pub st: crate::structure::Structure<'g>,
    expansions: Mutex<HashMap<(GroupElement, u8, GroupElement), Arc<Expansions>>>,
    actions: Mutex<HashMap<Vec<u8>, Arc<BTreeMap<GroupElement, Matrix>>>>,
    /// Words up to this length keep their matrices cached.
    pub memo_len: usize,
}

impl<'g> BarBuilder<'g> {
    pub fn new(group: &'g CoxeterGroup) -> Self {
        BarBuilder {
            st: crate::structure::Structure::new(group),
            expansions: Mutex::default(),
            actions: Mutex::default(),
            memo_len: 4,
        }
    }

    pub fn group(&self) -> &'g CoxeterGroup {
        self.st.group()
    }

    /// Demazure product of a word.
    pub fn demazure(&self, word: &[u8]) -> GroupElement {
        let g = self.group();
        word.iter().fold(GroupElement::identity(), |x, &s| if g.is_right_descent(&x, s) { x } else { g.mul_gen(&x, s) })
    }

    fn expansions(&self, top: &GroupElement, s: u8, x: &GroupElement) -> Result<Arc<Expansions>, SmodError> {
        let key = (top.clone(), s, x.clone());
        if let Some(r) = self.expansions.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let g = self.group();
        let omega = g.interval(top);
        let shifted: Vec<GroupElement> = omega.iter().map(|v| g.mul_gen(v, s)).collect();
        let px_shift = self.st.p(x, &shifted);
        let px = self.st.p(x, &omega);
        let mut sp = BTreeMap::new();
        let mut dp = BTreeMap::new();
        for (v, vs) in omega.iter().zip(&shifted) {
            let a = px_shift.get(vs).clone();
            let diff = &a - px.get(v);
            let q = if diff.is_zero() {
                diff
            } else {
                diff.div_exact(&g.act_root(v, s)).ok_or_else(|| StructureError::DivisionFailure(g.format(v)))?
            };
            sp.insert(v.clone(), a);
            dp.insert(v.clone(), q);
        }
        let constants = |sec: BTreeMap<GroupElement, Poly>| -> Result<Vec<(GroupElement, Q)>, SmodError> {
            Ok(self
                .st
                .straighten(&Section { values: sec })?
                .into_iter()
                .map(|(y, c)| (y, c.constant_term()))
                .filter(|(_, c)| !c.is_zero())
                .collect())
        };
        let r = Arc::new((constants(sp)?, constants(dp)?));
        self.expansions.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }

    /// Matrices of `P-bar_x` on `bar(BS(w))` for every `x` below the
    /// Demazure product; other `x` act by zero.
    pub fn zbar_matrices(&self, word: &[u8]) -> Result<Arc<BTreeMap<GroupElement, Matrix>>, SmodError> {
        if let Some(r) = self.actions.lock().unwrap().get(word) {
            return Ok(r.clone());
        }
        let g = self.group();
        let r = match word.split_last() {
            None => BTreeMap::from([(GroupElement::identity(), identity(1))]),
            Some((&s, prefix)) => {
                let prev = self.zbar_matrices(prefix)?;
                let top = self.demazure(prefix);
                let half = 1usize << prefix.len();
                let mut out = BTreeMap::new();
                for x in g.interval(&self.demazure(word)).iter() {
                    let exp = self.expansions(&top, s, x)?;
                    let mut a = zeros(2 * half, 2 * half);
                    // columns ending in c_s
                    if let Some(px) = prev.get(x) {
                        for f in 0..half {
                            for e in 0..half {
                                if !px[f][e].is_zero() {
                                    a[f][e] = px[f][e].clone();
                                }
                            }
                        }
                    }
                    // columns ending in c_id
                    for (list, row_off) in [(&exp.0, half), (&exp.1, 0)] {
                        for (y, c) in list {
                            let py = &prev[y];
                            for f in 0..half {
                                for e in 0..half {
                                    if !py[f][e].is_zero() {
                                        a[f + row_off][e + half] += c * &py[f][e];
                                    }
                                }
                            }
                        }
                    }
                    out.insert(x.clone(), a);
                }
                out
            }
        };
        let r = Arc::new(r);
        if word.len() <= self.memo_len {
            self.actions.lock().unwrap().insert(word.to_vec(), r.clone());
        }
        Ok(r)
    }

    /// `P-bar_{w,x} = P-bar_x (1 (x) ... (x) 1)` as vectors over masks.
    pub fn pbar(&self, word: &[u8]) -> Result<BTreeMap<GroupElement, Vec<Q>>, SmodError> {
        let full = (1usize << word.len()) - 1;
        Ok(self.zbar_matrices(word)?.iter().map(|(x, a)| (x.clone(), a.iter().map(|row| row[full].clone()).collect())).collect())
    }

    /// Right action of the coordinate functions on `bar(BS(w))`.
    pub fn right_matrices(&self, word: &[u8]) -> Vec<Matrix> {
        let g = self.group();
        let n = 1usize << word.len();
        (0..g.dim())
            .map(|j| {
                let lambda = Poly::var(g.dim(), j);
                let mut a = zeros(n, n);
                for e in 0..n {
                    for (m, p) in push_left(g, word, e, word.len(), &lambda) {
                        let c = p.constant_term();
                        if !c.is_zero() {
                            a[m][e] += c;
                        }
                    }
                }
                a
            })
            .collect()
    }

    /// `bar(BS(w))` with its right and `Z-bar` actions.
    pub fn bar_bs(&self, word: &[u8]) -> Result<SoergelModule, SmodError> {
        let g = self.group();
        let len = word.len();
        let n = 1usize << len;
        Ok(SoergelModule {
            name: format!("BS({})", g.format_word(word)),
            degrees: (0..n).map(|e| len as i64 - 2 * e.count_ones() as i64).collect(),
            labels: (0..n).map(|e| format!("c_{}", mask_bits(e, len))).collect(),
            right: self.right_matrices(word),
            zbar: (*self.zbar_matrices(word)?).clone(),
        })
    }
}

/// Graded dimension of the Hecke pairing `(bar[BS(u)], [BS(v)])`.
pub fn hecke_pairing_of_words(h: &Hecke, u: &[u8], v: &[u8]) -> Laurent {
    pairing(&h.bar(&h.bs_character(u)), &h.bs_character(v))
}

/// The verdict of the universal rank-3 example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub deg: i64,
    pub in_gamma_id: bool,
    #[serde(rename = "annihilates_Rplus")]
    pub annihilates_rplus: bool,
    pub kl_coeff: String,
    pub theta_surjective: bool,
}

/// Supporting data for [`Verdict`].
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub verdict: Verdict,
    /// `"left-to-right"` when the first bit is the first letter.
    pub orientation: String,
    pub gamma_id_degree2_dim: usize,
    pub commuting_degree2_dim: usize,
    pub hom_right_r_degree2: usize,
    pub hom_zbar_degree2: usize,
    pub expected_kl_coeff: String,
    pub kl_matches_expected: bool,
    pub one_tensor_annihilates: bool,
}

/// The 13 signed terms of `b`, bit strings as printed.
pub const UNIVERSAL_B_TERMS: [(&str, i64); 13] = [
    ("000011", 1),
    ("000101", -1),
    ("000110", 1),
    ("001010", -1),
    ("001100", 1),
    ("010001", -1),
    ("010010", -2),
    ("011000", 1),
    ("010100", -1),
    ("100001", 1),
    ("100010", -1),
    ("101000", -1),
    ("110000", 1),
];

/// `b` in `BS(stustu)`, reading bit strings left to right or reversed.
pub fn universal_b(bs: &BottSamelson, reversed: bool) -> BSElement {
    let nv = bs.nvars();
    let mut b = bs.zero();
    for (bits, c) in UNIVERSAL_B_TERMS {
        let mut v: Vec<u8> = bits.bytes().map(|ch| ch - b'0').collect();
        if reversed {
            v.reverse();
        }
        b.coords[bits_to_mask(&v)].add_assign_ref(&Poly::constant(nv, Q::from_integer(BigInt::from(c))));
    }
    b
}

fn constant_vector(b: &BSElement) -> Vec<Q> {
    b.coords.iter().map(|p| p.constant_term()).collect()
}

fn annihilated_by_right(m: &SoergelModule, v: &[Q]) -> bool {
    m.right.iter().all(|a| mat_vec(a, v).iter().all(|c| c.is_zero()))
}

/// Checks the universal rank-3 example on the word `stustu`.
pub fn counterexample_universal() -> Result<CounterexampleReport, SmodError> {
    let g = crate::coxeter::preset("universal3")?;
    let word = [0u8, 1, 2, 0, 1, 2];
    let bs = BottSamelson::new(&g, &word);
    let builder = BarBuilder::new(&g);
    let bar = builder.bar_bs(&word)?;
    let fail = |step: &str, detail: String| SmodError::VerificationFailed { step: step.into(), detail };

    let mut chosen = None;
    for (reversed, name) in [(false, "left-to-right"), (true, "right-to-left")] {
        let b = universal_b(&bs, reversed);
        if b.degree() == Some(2) && annihilated_by_right(&bar, &constant_vector(&b)) {
            chosen = Some((b, name));
            break;
        }
    }
    let (b, orientation) = chosen.ok_or_else(|| fail("orientation", "no reading of b has degree 2 and is killed by R_+".into()))?;
    let deg = b.degree().ok_or_else(|| fail("degree", "b is not homogeneous".into()))?;

    let gamma2 = bs.gamma(&BTreeSet::from([GroupElement::identity()]), 2);
    let commuting2 = bs.commuting_part(2);
    let in_gamma_id = bs.support(&b) == BTreeSet::from([GroupElement::identity()]);

    let k = SoergelModule::trivial(g.dim());
    let hom_r = hom_right_r(&k, &bar).dim_in(2);
    let hom_z = hom_zbar(&k, &bar).dim_in(2);

    let h = Hecke::new(&g);
    let kl = h.kl_coeff(&GroupElement::identity(), &g.element(&word)).to_string();
    let expected = "v^4+v^6".to_string();

    let one = constant_vector(&bs.one_tensor());
    let verdict = Verdict {
        deg,
        in_gamma_id,
        annihilates_rplus: true,
        kl_coeff: kl.clone(),
        theta_surjective: hom_r == hom_z,
    };
    Ok(CounterexampleReport {
        verdict,
        orientation: orientation.into(),
        gamma_id_degree2_dim: gamma2.len(),
        commuting_degree2_dim: commuting2.len(),
        hom_right_r_degree2: hom_r,
        hom_zbar_degree2: hom_z,
        kl_matches_expected: kl == expected,
        expected_kl_coeff: expected,
        one_tensor_annihilates: annihilated_by_right(&bar, &one),
    })
}

/// Per-degree comparison of `k (x) Gamma_id BS(w)` with the joint annihilator
/// of the `P-bar_x`, `x != id`, in `bar(BS(w))`.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaDegree {
    pub degree: i64,
    pub generators: usize,
    pub image_rank: usize,
    pub annihilator_dim: usize,
    pub image_in_annihilator: bool,
}

pub fn theta_check(g: &CoxeterGroup, word: &[u8]) -> Result<(bool, Vec<ThetaDegree>), SmodError> {
    let bs = BottSamelson::new(g, word);
    let bar = BarBuilder::new(g).bar_bs(word)?;
    let k = SoergelModule::trivial(g.dim());
    let hz = hom_zbar(&k, &bar);
    let nv = g.dim();
    let id = BTreeSet::from([GroupElement::identity()]);
    let len = word.len() as i64;
    let mut rows = Vec::new();
    let mut gens_by_degree: BTreeMap<i64, usize> = BTreeMap::new();
    let mut ok = true;
    for d in -len..=len {
        if (d + len) % 2 != 0 {
            continue;
        }
        let gamma = bs.gamma(&id, d);
        let from_lower: usize =
            gens_by_degree.iter().map(|(&e, &c)| c * crate::poly::dim_homogeneous(nv, (d - e) / 2)).sum();
        let generators = gamma.len() - from_lower;
        gens_by_degree.insert(d, generators);
        let images: Vec<Vec<Q>> = gamma.iter().map(constant_vector).collect();
        let image_rank = if images.is_empty() { 0 } else { rank(&images) };
        let image_in_annihilator = images.iter().all(|v| {
            bar.zbar.iter().filter(|(x, _)| !x.is_identity()).all(|(_, a)| mat_vec(a, v).iter().all(|c| c.is_zero()))
        });
        let annihilator_dim = hz.dim_in(d);
        ok &= image_rank == generators && image_in_annihilator && annihilator_dim == generators;
        rows.push(ThetaDegree { degree: d, generators, image_rank, annihilator_dim, image_in_annihilator });
    }
    Ok((ok, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::preset;

    #[test]
    fn rank_one_bar_module() {
        let g = preset("A2").unwrap();
        let b = BarBuilder::new(&g);
        let m = b.bar_bs(&[0]).unwrap();
        assert_eq!(m.degrees, vec![1, -1]);
        let ps = &m.zbar[&g.gen(0)];
        // P_s: c_1 -> c_0, c_0 -> 0
        assert!(ps[0][1].is_one() && ps[0][0].is_zero() && ps[1][0].is_zero() && ps[1][1].is_zero());
        let end = hom_zbar(&m, &m);
        assert_eq!(end.grdim(), Laurent::from_terms(&[(0, 1), (2, 1)]));
        let kmod = SoergelModule::trivial(g.dim());
        assert_eq!(hom_zbar(&kmod, &m).grdim(), Laurent::v());
        assert!(indecomposable_over(&m, ActionSet::Zbar).unwrap().is_indecomposable());
        let two = m.direct_sum(&m);
        match indecomposable_over(&two, ActionSet::Zbar).unwrap() {
            Indecomposability::Decomposable { idempotent, .. } => {
                assert!(is_nontrivial_idempotent(&two, &idempotent, ActionSet::Zbar))
            }
            other => panic!("{other:?}"),
        }
        let split = kmod.direct_sum(&kmod.shift(2));
        assert!(!indecomposable_over(&split, ActionSet::Trivial).unwrap().is_indecomposable());
    }

    #[test]
    fn recursion_matches_direct_action() {
        let g = preset("universal3").unwrap();
        let word = [0u8, 1, 0, 2];
        let bs = BottSamelson::new(&g, &word);
        let builder = BarBuilder::new(&g);
        let pbar = builder.pbar(&word).unwrap();
        let hw = bs.hw_basis().unwrap();
        for (x, p) in &hw {
            assert_eq!(&pbar[x], &constant_vector(p), "{}", g.format(x));
        }
        // full matrices against z_act on every basis vector
        let m = builder.bar_bs(&word).unwrap();
        let omega = bs.omega().to_vec();
        for x in &omega {
            let z = bs.st.p(x, &omega);
            for e in 0..bs.num_masks() {
                let direct = constant_vector(&bs.z_act(&z, &bs.basis(e)).unwrap());
                let col: Vec<Q> = (0..bs.num_masks()).map(|i| m.zbar[x][i][e].clone()).collect();
                assert_eq!(direct, col);
            }
        }
    }

    #[test]
    fn hom_formula_small_a2() {
        let g = preset("A2").unwrap();
        let b = BarBuilder::new(&g);
        let h = Hecke::new(&g);
        let words: Vec<Vec<u8>> = vec![vec![], vec![0], vec![1], vec![0, 1], vec![0, 0]];
        for u in &words {
            for v in &words {
                let m = b.bar_bs(u).unwrap();
                let n = b.bar_bs(v).unwrap();
                assert_eq!(hom_zbar(&m, &n).grdim(), hecke_pairing_of_words(&h, u, v));
                assert_eq!(hom_right_r(&m, &n).grdim(), hom_zbar(&m, &n).grdim());
            }
        }
    }

    #[test]
    fn universal_counterexample_verdict() {
        let r = counterexample_universal().unwrap();
        let v = &r.verdict;
        assert_eq!(v.deg, 2);
        assert!(!v.in_gamma_id);
        assert!(v.annihilates_rplus);
        assert!(!v.theta_surjective);
        assert_eq!(r.gamma_id_degree2_dim, 0);
        assert_eq!(r.commuting_degree2_dim, 0);
        assert!(r.hom_right_r_degree2 >= 1);
        assert_eq!(r.hom_zbar_degree2, 0);
        assert!(!r.one_tensor_annihilates);
    }

    #[test]
    fn theta_is_onto_in_a2() {
        let g = preset("A2").unwrap();
        for w in [vec![0u8], vec![0, 1, 0], vec![0, 0]] {
            let (ok, rows) = theta_check(&g, &w).unwrap();
            assert!(ok, "{w:?}: {rows:?}");
        }
    }

    #[test]
    fn minimal_polynomial_and_roots() {
        let a: Matrix = vec![vec![Q::from_integer(2.into()), Q::zero()], vec![Q::zero(), Q::from_integer((-3).into())]];
        let mp = minimal_polynomial(&a);
        assert_eq!(mp.len(), 3);
        let mut r = rational_roots(&mp);
        r.sort();
        assert_eq!(r, vec![Q::from_integer((-3).into()), Q::from_integer(2.into())]);
    }
}
