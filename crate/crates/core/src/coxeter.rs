//! Coxeter systems, realizations, Bruhat order, reflections and
//! subexpressions.
//!
//! Every group carries two representations: the user realization `V`, in
//! which polynomials live, and a canonical integral representation on the
//! span of the simple roots, used for word reduction and descent tests so
//! that element equality never depends on the faithfulness of `V`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::rational::{parse_q, q, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoxeterError {
    #[error("balancedness fails for ({s}, {t}): {detail}")]
    BalancednessViolation { s: String, t: String, detail: String },
    #[error("zero root or coroot for generator {0}")]
    ZeroRootOrCoroot(String),
    #[error("alpha_{0}^vee(alpha_{0}) = {1}, expected 2")]
    BadNormalization(String, String),
    #[error("infinite edge ({s}, {t}) has Cartan product {product} < 4 or non-integral entries")]
    InfiniteEdgeTooSmall { s: String, t: String, product: String },
    #[error("(st)^m does not act trivially for ({s}, {t}) with m = {m}")]
    NotARepresentation { s: String, t: String, m: u32 },
    #[error("unsupported Coxeter matrix entry {0}; allowed: 2, 3, 4, 6 and infinity")]
    UnsupportedEntry(u32),
    #[error("invalid Coxeter matrix: {0}")]
    InvalidMatrix(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("element {0} is not a reflection")]
    NotAReflection(String),
    #[error("{x} is not below the word {w}")]
    TargetNotBelow { x: String, w: String },
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("root of {t} depends on its decomposition: {a} vs {b}")]
    RootMismatch { t: String, a: String, b: String },
}

/// Entry value used for `m = infinity`.
pub const INF: u32 = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterMatrix {
    pub generators: Vec<String>,
    /// `m[s][t]`; `0` encodes infinity.
    pub m: Vec<Vec<u32>>,
}

impl CoxeterMatrix {
    pub fn new(generators: Vec<String>, m: Vec<Vec<u32>>) -> Result<Self, CoxeterError> {
        let n = generators.len();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(CoxeterError::InvalidMatrix("matrix size does not match generators".into()));
        }
        for s in 0..n {
            if m[s][s] != 1 {
                return Err(CoxeterError::InvalidMatrix(format!("diagonal entry {} != 1", m[s][s])));
            }
            for t in 0..n {
                if s == t {
                    continue;
                }
                if m[s][t] != m[t][s] {
                    return Err(CoxeterError::InvalidMatrix("not symmetric".into()));
                }
                if !matches!(m[s][t], 2 | 3 | 4 | 6 | INF) {
                    return Err(CoxeterError::UnsupportedEntry(m[s][t]));
                }
            }
        }
        Ok(CoxeterMatrix { generators, m })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Integral Cartan matrix of the canonical representation.
    fn canonical_cartan(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut a = vec![vec![0i64; n]; n];
        for s in 0..n {
            a[s][s] = 2;
            for t in s + 1..n {
                let (x, y) = match self.m[s][t] {
                    2 => (0, 0),
                    3 => (-1, -1),
                    4 => (-1, -2),
                    6 => (-1, -3),
                    _ => (-2, -2),
                };
                a[s][t] = x;
                a[t][s] = y;
            }
        }
        a
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub dim: usize,
    /// `roots[s]` holds the coordinates of `alpha_s`.
    pub roots: Vec<Vec<Q>>,
    /// `coroots[s]` holds the functional `alpha_s^vee` in dual coordinates.
    pub coroots: Vec<Vec<Q>>,
}

impl Realization {
    /// The realization on the span of the simple roots with the given Cartan
    /// matrix `a[s][t] = alpha_s^vee(alpha_t)`.
    pub fn from_cartan(a: &[Vec<i64>]) -> Self {
        let n = a.len();
        Realization {
            dim: n,
            roots: (0..n).map(|s| (0..n).map(|j| if j == s { Q::one() } else { Q::zero() }).collect()).collect(),
            coroots: a.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(),
        }
    }

    pub fn pairing(&self, s: usize, t: usize) -> Q {
        dot(&self.coroots[s], &self.roots[t])
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// Two-colored quantum numbers `([k]_x, [k]_y)` for `k = 0..=n`.
pub fn two_colored_quantum(x: &Q, y: &Q, n: usize) -> Vec<(Q, Q)> {
    let mut out = vec![(Q::zero(), Q::zero()), (Q::one(), Q::one())];
    while out.len() <= n {
        let k = out.len() - 1;
        let a = x * &out[k].1 - &out[k - 1].0;
        let b = y * &out[k].0 - &out[k - 1].1;
        out.push((a, b));
    }
    out.truncate(n + 1);
    out
}

/// A group element, stored as its normal-form reduced word (generator
/// indices). Normal forms are produced by peeling the smallest right descent
/// off the right, so every prefix of a normal form is again a normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    word: Vec<u8>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { word: Vec::new() }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// The element obtained by dropping the last letter (`ws` for the last
    /// letter `s`, which is a right descent).
    pub fn drop_last(&self) -> Option<(GroupElement, u8)> {
        let (&s, rest) = self.word.split_last()?;
        Some((GroupElement { word: rest.to_vec() }, s))
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Length first, then lexicographic on the normal form. This total order
/// refines the Bruhat order.
impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.word.len(), &self.word).cmp(&(other.word.len(), &other.word))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement{:?}", self.word)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    U,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subexpression {
    pub word: Vec<u8>,
    pub bits: Vec<u8>,
    pub decoration: Vec<Decoration>,
    pub target: GroupElement,
    pub defect: i64,
}

impl Subexpression {
    pub fn is_canonical(&self) -> bool {
        self.decoration.iter().all(|d| *d == Decoration::U)
    }
}

#[derive(Clone, Debug)]
pub struct Reflection {
    pub element: GroupElement,
    /// The root `alpha_t`, a linear polynomial.
    pub root: Poly,
    /// The functional `alpha_t^vee`.
    pub coroot: Vec<Q>,
}

/// `v -> w` with `w = v t` and `l(w) = l(v) + 1`; `t` is the right label.
#[derive(Clone, Debug)]
pub struct BruhatEdge {
    pub v: GroupElement,
    pub w: GroupElement,
    pub t: Arc<Reflection>,
}

/// Moment-graph edge `{v, w}` with `w = t v`, `v < w`; `t` is the left label.
#[derive(Clone, Debug)]
pub struct MomentEdge {
    pub v: GroupElement,
    pub w: GroupElement,
    pub t: Arc<Reflection>,
}

type IMat = Vec<Vec<i64>>;

#[derive(Default)]
struct Caches {
    mul_gen: HashMap<(GroupElement, u8), GroupElement>,
    matrices: HashMap<GroupElement, Arc<Matrix>>,
    reflections: HashMap<GroupElement, Option<Arc<Reflection>>>,
    intervals: HashMap<GroupElement, Arc<Vec<GroupElement>>>,
}

pub struct CoxeterGroup {
    pub name: String,
    pub cox: CoxeterMatrix,
    pub real: Realization,
    geom: Vec<IMat>,
    gens: Vec<Matrix>,
    caches: Mutex<Caches>,
}

impl fmt::Debug for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterGroup").field("name", &self.name).field("cox", &self.cox).finish()
    }
}

fn imat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn imat_identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

impl CoxeterGroup {
    /// Builds the group and checks every realization axiom.
    pub fn new(name: &str, cox: CoxeterMatrix, real: Realization) -> Result<Self, CoxeterError> {
        let n = cox.rank();
        if real.roots.len() != n || real.coroots.len() != n {
            return Err(CoxeterError::Dimension("need one root and one coroot per generator".into()));
        }
        if real.roots.iter().chain(&real.coroots).any(|v| v.len() != real.dim) {
            return Err(CoxeterError::Dimension(format!("roots and coroots must have length {}", real.dim)));
        }
        if real.dim > crate::poly::MAX_VARS {
            return Err(CoxeterError::Dimension(format!("at most {} dimensions supported", crate::poly::MAX_VARS)));
        }
        let a = cox.canonical_cartan();
        let geom = (0..n)
            .map(|s| (0..n).map(|i| (0..n).map(|j| i64::from(i == j) - if i == s { a[s][j] } else { 0 }).collect()).collect())
            .collect();
        let gens = (0..n)
            .map(|s| {
                (0..real.dim)
                    .map(|j| {
                        (0..real.dim)
                            .map(|i| {
                                let d = if i == j { Q::one() } else { Q::zero() };
                                d - &real.roots[s][j] * &real.coroots[s][i]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let g = CoxeterGroup { name: name.to_string(), cox, real, geom, gens, caches: Mutex::new(Caches::default()) };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), CoxeterError> {
        let n = self.rank();
        let names = &self.cox.generators;
        for s in 0..n {
            if self.real.roots[s].iter().all(|x| x.is_zero()) || self.real.coroots[s].iter().all(|x| x.is_zero()) {
                return Err(CoxeterError::ZeroRootOrCoroot(names[s].clone()));
            }
            let p = self.real.pairing(s, s);
            if p != q(2) {
                return Err(CoxeterError::BadNormalization(names[s].clone(), p.to_string()));
            }
        }
        for s in 0..n {
            for t in s + 1..n {
                let m = self.cox.m[s][t];
                let ast = self.real.pairing(s, t);
                let ats = self.real.pairing(t, s);
                if m == INF {
                    let prod = &ast * &ats;
                    if !ast.is_integer() || !ats.is_integer() || prod < q(4) {
                        return Err(CoxeterError::InfiniteEdgeTooSmall {
                            s: names[s].clone(),
                            t: names[t].clone(),
                            product: prod.to_string(),
                        });
                    }
                    continue;
                }
                let x = -ast;
                let y = -ats;
                let qn = two_colored_quantum(&x, &y, m as usize - 1);
                let (qx, qy) = &qn[m as usize - 1];
                if !qx.is_one() || !qy.is_one() {
                    return Err(CoxeterError::BalancednessViolation {
                        s: names[s].clone(),
                        t: names[t].clone(),
                        detail: format!("[{}]_x = {}, [{}]_y = {} with x = {}, y = {}", m - 1, qx, m - 1, qy, x, y),
                    });
                }
                let st = linalg::mat_mul(&self.gens[s], &self.gens[t]);
                let mut p = linalg::identity(self.dim());
                for _ in 0..m {
                    p = linalg::mat_mul(&p, &st);
                }
                if p != linalg::identity(self.dim()) {
                    return Err(CoxeterError::NotARepresentation { s: names[s].clone(), t: names[t].clone(), m });
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.cox.rank()
    }

    pub fn dim(&self) -> usize {
        self.real.dim
    }

    pub fn generator_names(&self) -> &[String] {
        &self.cox.generators
    }

    pub fn m(&self, s: u8, t: u8) -> u32 {
        self.cox.m[s as usize][t as usize]
    }

    pub fn gen(&self, s: u8) -> GroupElement {
        GroupElement { word: vec![s] }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity()
    }

    fn geom_of_word(&self, word: &[u8]) -> IMat {
        let mut m = imat_identity(self.rank());
        for &s in word {
            m = imat_mul(&m, &self.geom[s as usize]);
        }
        m
    }

    fn is_negative_column(m: &IMat, s: usize) -> bool {
        m.iter().all(|r| r[s] <= 0)
    }

    /// Normal form of an arbitrary word.
    pub fn reduce(&self, word: &[u8]) -> GroupElement {
        let mut m = self.geom_of_word(word);
        let mut rev = Vec::new();
        let n = self.rank();
        while let Some(s) = (0..n).find(|&s| Self::is_negative_column(&m, s)) {
            m = imat_mul(&m, &self.geom[s]);
            rev.push(s as u8);
        }
        debug_assert_eq!(m, imat_identity(n));
        rev.reverse();
        GroupElement { word: rev }
    }

    /// Is `w s < w`?
    pub fn is_right_descent(&self, w: &GroupElement, s: u8) -> bool {
        if w.word.last() == Some(&s) {
            return true;
        }
        let m = self.geom_of_word(&w.word);
        Self::is_negative_column(&m, s as usize)
    }

    /// Is `s w < w`?
    pub fn is_left_descent(&self, w: &GroupElement, s: u8) -> bool {
        let rev: Vec<u8> = w.word.iter().rev().copied().collect();
        let m = self.geom_of_word(&rev);
        Self::is_negative_column(&m, s as usize)
    }

    pub fn right_descents(&self, w: &GroupElement) -> Vec<u8> {
        let m = self.geom_of_word(&w.word);
        (0..self.rank() as u8).filter(|&s| Self::is_negative_column(&m, s as usize)).collect()
    }

    pub fn left_descents(&self, w: &GroupElement) -> Vec<u8> {
        (0..self.rank() as u8).filter(|&s| self.is_left_descent(w, s)).collect()
    }

    /// `w s`.
    pub fn mul_gen(&self, w: &GroupElement, s: u8) -> GroupElement {
        let key = (w.clone(), s);
        if let Some(r) = self.caches.lock().unwrap().mul_gen.get(&key) {
            return r.clone();
        }
        let mut word = w.word.clone();
        word.push(s);
        let r = self.reduce(&word);
        self.caches.lock().unwrap().mul_gen.insert(key, r.clone());
        r
    }

    /// `s w`.
    pub fn gen_mul(&self, s: u8, w: &GroupElement) -> GroupElement {
        let mut word = vec![s];
        word.extend_from_slice(&w.word);
        self.reduce(&word)
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut word = a.word.clone();
        word.extend_from_slice(&b.word);
        self.reduce(&word)
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        let rev: Vec<u8> = a.word.iter().rev().copied().collect();
        self.reduce(&rev)
    }

    pub fn element(&self, word: &[u8]) -> GroupElement {
        self.reduce(word)
    }

    pub fn is_reduced_word(&self, word: &[u8]) -> bool {
        self.reduce(word).length() == word.len()
    }

    /// Matrix of `w` on `V` (`m[j][i]` = `j`-th coordinate of `w(e_i)`).
    pub fn matrix(&self, w: &GroupElement) -> Arc<Matrix> {
        if let Some(m) = self.caches.lock().unwrap().matrices.get(w) {
            return m.clone();
        }
        let m = Arc::new(self.matrix_of_word(&w.word));
        self.caches.lock().unwrap().matrices.insert(w.clone(), m.clone());
        m
    }

    pub fn matrix_of_word(&self, word: &[u8]) -> Matrix {
        let mut m = linalg::identity(self.dim());
        for &s in word {
            m = linalg::mat_mul(&m, &self.gens[s as usize]);
        }
        m
    }

    pub fn alpha(&self, s: u8) -> Poly {
        Poly::linear(&self.real.roots[s as usize])
    }

    pub fn coroot(&self, s: u8) -> &[Q] {
        &self.real.coroots[s as usize]
    }

    /// Evaluates a functional on a linear polynomial.
    pub fn eval_functional(&self, functional: &[Q], lambda: &Poly) -> Q {
        let v = lambda.linear_coords().expect("linear polynomial");
        dot(functional, &v)
    }

    /// The basis vectors `x_i` of `V`, as linear polynomials.
    pub fn basis_of_v(&self) -> Vec<Poly> {
        (0..self.dim()).map(|i| Poly::var(self.dim(), i)).collect()
    }

    pub fn act(&self, w: &GroupElement, f: &Poly) -> Poly {
        if w.is_identity() || f.is_constant() {
            return f.clone();
        }
        f.act_matrix(&self.matrix(w))
    }

    pub fn act_word(&self, word: &[u8], f: &Poly) -> Poly {
        f.act_matrix(&self.matrix_of_word(word))
    }

    /// `w(alpha_s)`.
    pub fn act_root(&self, w: &GroupElement, s: u8) -> Poly {
        self.act(w, &self.alpha(s))
    }

    /// Demazure operator for a simple reflection.
    pub fn demazure_s(&self, s: u8, f: &Poly) -> Poly {
        let sf = f.act_matrix(&self.gens[s as usize]);
        (f - &sf).div_exact(&self.alpha(s)).expect("Demazure quotient must be exact")
    }

    pub fn demazure(&self, t: &Reflection, f: &Poly) -> Poly {
        let tf = self.act(&t.element, f);
        (f - &tf).div_exact(&t.root).expect("Demazure quotient must be exact")
    }

    /// Decides whether `t` is a reflection and, if so, computes its root and
    /// coroot by conjugating down to a simple reflection.
    pub fn reflection(&self, t: &GroupElement) -> Result<Arc<Reflection>, CoxeterError> {
        if let Some(r) = self.caches.lock().unwrap().reflections.get(t) {
            return r.clone().ok_or_else(|| CoxeterError::NotAReflection(self.format(t)));
        }
        let r = self.compute_reflection(t).map(Arc::new);
        self.caches.lock().unwrap().reflections.insert(t.clone(), r.clone());
        r.ok_or_else(|| CoxeterError::NotAReflection(self.format(t)))
    }

    pub fn is_reflection(&self, t: &GroupElement) -> bool {
        self.reflection(t).is_ok()
    }

    fn compute_reflection(&self, t: &GroupElement) -> Option<Reflection> {
        if t.length().is_multiple_of(2) {
            return None;
        }
        // Find x, s with t = x s x^{-1}, conjugating by left descents.
        let mut x_word: Vec<u8> = Vec::new();
        let mut cur = t.clone();
        while cur.length() > 1 {
            let s = *self.left_descents(&cur).first()?;
            let next = self.multiply(&self.gen_mul(s, &cur), &self.gen(s));
            if next.length() + 2 != cur.length() {
                return None;
            }
            x_word.push(s);
            cur = next;
        }
        let s = cur.word[0];
        let x = self.reduce(&x_word);
        let root = self.act(&x, &self.alpha(s));
        let xinv = self.matrix(&self.inverse(&x));
        let cs = &self.real.coroots[s as usize];
        let coroot = (0..self.dim()).map(|i| (0..self.dim()).map(|j| &cs[j] * &xinv[j][i]).sum()).collect();
        Some(Reflection { element: t.clone(), root, coroot })
    }

    /// Checks that `x(alpha_s)` agrees with the computed root of
    /// `t = x s x^{-1}` for every `x` in `omega` and every `s` with `xs > x`.
    pub fn check_roots(&self, omega: &[GroupElement]) -> Result<usize, CoxeterError> {
        let mut checked = 0;
        for x in omega {
            let xinv = self.inverse(x);
            for s in 0..self.rank() as u8 {
                if self.is_right_descent(x, s) {
                    continue;
                }
                let t = self.multiply(&self.mul_gen(x, s), &xinv);
                let r = self.reflection(&t)?;
                let direct = self.act(x, &self.alpha(s));
                if direct != r.root {
                    return Err(CoxeterError::RootMismatch {
                        t: self.format(&t),
                        a: direct.to_string(),
                        b: r.root.to_string(),
                    });
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    pub fn bruhat_leq(&self, x: &GroupElement, y: &GroupElement) -> bool {
        if x.length() > y.length() {
            return false;
        }
        let Some((ys, s)) = y.drop_last() else { return x.is_identity() };
        if self.is_right_descent(x, s) {
            let xs = self.mul_gen(x, s);
            self.bruhat_leq(&xs, &ys)
        } else {
            self.bruhat_leq(x, &ys)
        }
    }

    /// `{x : x <= y}` sorted by length, then normal form.
    pub fn interval(&self, y: &GroupElement) -> Arc<Vec<GroupElement>> {
        if let Some(r) = self.caches.lock().unwrap().intervals.get(y) {
            return r.clone();
        }
        let mut set: BTreeSet<GroupElement> = BTreeSet::new();
        set.insert(GroupElement::identity());
        for &s in &y.word {
            let new: Vec<GroupElement> = set.iter().map(|x| self.mul_gen(x, s)).collect();
            set.extend(new);
        }
        let r = Arc::new(set.into_iter().collect::<Vec<_>>());
        self.caches.lock().unwrap().intervals.insert(y.clone(), r.clone());
        r
    }

    /// Union of the lower intervals of the given elements, sorted.
    pub fn lower_ideal(&self, tops: &[GroupElement]) -> Vec<GroupElement> {
        let mut set = BTreeSet::new();
        for t in tops {
            set.extend(self.interval(t).iter().cloned());
        }
        set.into_iter().collect()
    }

    /// All elements of length at most `n`, sorted.
    pub fn ball(&self, n: usize) -> Vec<GroupElement> {
        let mut set: BTreeSet<GroupElement> = BTreeSet::new();
        set.insert(GroupElement::identity());
        let mut frontier = vec![GroupElement::identity()];
        for _ in 0..n {
            let mut next = Vec::new();
            for x in &frontier {
                for s in 0..self.rank() as u8 {
                    if !self.is_right_descent(x, s) {
                        let y = self.mul_gen(x, s);
                        if set.insert(y.clone()) {
                            next.push(y);
                        }
                    }
                }
            }
            frontier = next;
        }
        set.into_iter().collect()
    }

    /// Directed Bruhat edges `v -> w = v t` inside `omega`.
    pub fn bruhat_edges(&self, omega: &[GroupElement]) -> Vec<BruhatEdge> {
        let mut out = Vec::new();
        for v in omega {
            let vinv = self.inverse(v);
            for w in omega {
                if w.length() != v.length() + 1 {
                    continue;
                }
                let t = self.multiply(&vinv, w);
                if let Ok(r) = self.reflection(&t) {
                    out.push(BruhatEdge { v: v.clone(), w: w.clone(), t: r });
                }
            }
        }
        out
    }

    /// Moment-graph edges `{v, t v}` inside `omega`, labelled on the left.
    pub fn moment_edges(&self, omega: &[GroupElement]) -> Vec<MomentEdge> {
        let mut out = Vec::new();
        for (i, v) in omega.iter().enumerate() {
            let vinv = self.inverse(v);
            for w in &omega[i + 1..] {
                if (w.length() + v.length()) % 2 == 0 {
                    continue;
                }
                let t = self.multiply(w, &vinv);
                if let Ok(r) = self.reflection(&t) {
                    let (a, b) = if v < w { (v, w) } else { (w, v) };
                    out.push(MomentEdge { v: a.clone(), w: b.clone(), t: r });
                }
            }
        }
        out
    }

    /// Elements `v` with `w -> v` (all covers of `w` in Bruhat order).
    pub fn covers(&self, w: &GroupElement) -> Vec<GroupElement> {
        let mut set = BTreeSet::new();
        for rw in self.reduced_words(w) {
            for pos in 0..=rw.len() {
                for s in 0..self.rank() as u8 {
                    let mut word = rw.clone();
                    word.insert(pos, s);
                    let v = self.reduce(&word);
                    if v.length() == w.length() + 1 {
                        set.insert(v);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn reduced_words(&self, w: &GroupElement) -> Vec<Vec<u8>> {
        if w.is_identity() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for s in self.right_descents(w) {
            let ws = self.mul_gen(w, s);
            for mut rw in self.reduced_words(&ws) {
                rw.push(s);
                out.push(rw);
            }
        }
        out.sort();
        out
    }

    /// Pairwise linear independence of the roots of all reflections on
    /// moment-graph edges inside `omega`.
    pub fn gkm_check(&self, omega: &[GroupElement]) -> bool {
        let mut roots: Vec<(GroupElement, Poly)> = Vec::new();
        for e in self.moment_edges(omega) {
            if !roots.iter().any(|(t, _)| *t == e.t.element) {
                roots.push((e.t.element.clone(), e.t.root.clone()));
            }
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let a = roots[i].1.linear_coords().unwrap();
                let b = roots[j].1.linear_coords().unwrap();
                if linalg::rank(&vec![a, b]) < 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Distinct matrices on `V` for the `2m` elements of each finite
    /// dihedral parabolic subgroup.
    pub fn dihedrally_faithful(&self) -> bool {
        let n = self.rank() as u8;
        for s in 0..n {
            for t in s + 1..n {
                let m = self.m(s, t);
                if m == INF {
                    continue;
                }
                let mut mats = Vec::new();
                for len in 0..=m as usize {
                    for start in [s, t] {
                        if len == 0 && start == t {
                            continue;
                        }
                        let word: Vec<u8> = (0..len).map(|i| if i % 2 == 0 { start } else if start == s { t } else { s }).collect();
                        if len == m as usize && start == t {
                            continue;
                        }
                        mats.push(self.matrix_of_word(&word));
                    }
                }
                for i in 0..mats.len() {
                    for j in i + 1..mats.len() {
                        if mats[i] == mats[j] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Decorates a bit sequence along a word.
    pub fn decorate(&self, word: &[u8], bits: &[u8]) -> Subexpression {
        let mut x = GroupElement::identity();
        let mut decoration = Vec::with_capacity(word.len());
        let mut defect = 0i64;
        for (&s, &e) in word.iter().zip(bits) {
            let up = !self.is_right_descent(&x, s);
            decoration.push(if up { Decoration::U } else { Decoration::D });
            if e == 0 {
                defect += if up { 1 } else { -1 };
            } else {
                x = self.mul_gen(&x, s);
            }
        }
        Subexpression { word: word.to_vec(), bits: bits.to_vec(), decoration, target: x, defect }
    }

    pub fn all_subexpressions(&self, word: &[u8]) -> Vec<Subexpression> {
        let l = word.len();
        (0..1u64 << l)
            .map(|mask| {
                let bits: Vec<u8> = (0..l).map(|i| ((mask >> (l - 1 - i)) & 1) as u8).collect();
                self.decorate(word, &bits)
            })
            .collect()
    }

    pub fn subexpressions(&self, word: &[u8], x: &GroupElement) -> Vec<Subexpression> {
        self.all_subexpressions(word).into_iter().filter(|e| &e.target == x).collect()
    }

    pub fn canonical_subexpression(&self, word: &[u8], x: &GroupElement) -> Result<Subexpression, CoxeterError> {
        // Build from the right: keep a letter iff it shortens the remaining target.
        let mut bits = vec![0u8; word.len()];
        let mut cur = x.clone();
        for (i, &s) in word.iter().enumerate().rev() {
            if self.is_right_descent(&cur, s) {
                bits[i] = 1;
                cur = self.mul_gen(&cur, s);
            }
        }
        let e = self.decorate(word, &bits);
        if !cur.is_identity() || &e.target != x || !e.is_canonical() {
            return Err(CoxeterError::TargetNotBelow { x: self.format(x), w: self.format_word(word) });
        }
        Ok(e)
    }

    pub fn format(&self, w: &GroupElement) -> String {
        self.format_word(&w.word)
    }

    pub fn format_word(&self, word: &[u8]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        let names = &self.cox.generators;
        if names.iter().all(|n| n.chars().count() == 1) {
            word.iter().map(|&s| names[s as usize].as_str()).collect()
        } else {
            word.iter().map(|&s| names[s as usize].as_str()).collect::<Vec<_>>().join(",")
        }
    }

    /// Parses `"stu"`, `"s,t,u"`, `"s t u"`, or `"e"` for the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<u8>, CoxeterError> {
        let text = text.trim();
        let names = &self.cox.generators;
        let lookup = |tok: &str| {
            names.iter().position(|n| n == tok).map(|i| i as u8).ok_or_else(|| CoxeterError::UnknownGenerator(tok.to_string()))
        };
        if text.is_empty() || ((text == "e" || text == "id") && !names.iter().any(|n| n == text)) {
            return Ok(Vec::new());
        }
        if text.contains(',') || text.contains(char::is_whitespace) {
            return text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(lookup).collect();
        }
        if names.iter().all(|n| n.chars().count() == 1) {
            return text.chars().map(|c| lookup(&c.to_string())).collect();
        }
        lookup(text).map(|s| vec![s])
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement, CoxeterError> {
        Ok(self.reduce(&self.parse_word(text)?))
    }

    pub fn from_config(cfg: &GroupConfig) -> Result<Self, CoxeterError> {
        let n = cfg.generators.len();
        let cox = CoxeterMatrix::new(cfg.generators.clone(), cfg.coxeter_matrix.clone())?;
        let parse = |v: &Num| v.to_q().ok_or_else(|| CoxeterError::Config(format!("bad number {v:?}")));
        if cfg.roots.len() != cfg.dim || cfg.roots.iter().any(|r| r.len() != n) {
            return Err(CoxeterError::Dimension("roots must be a dim x rank matrix (column s = alpha_s)".into()));
        }
        let mut roots = vec![vec![Q::zero(); cfg.dim]; n];
        for (j, row) in cfg.roots.iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                roots[s][j] = parse(v)?;
            }
        }
        let coroots = cfg
            .coroots
            .iter()
            .map(|row| row.iter().map(parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let real = Realization { dim: cfg.dim, roots, coroots };
        CoxeterGroup::new(&cfg.name, cox, real)
    }

    /// Reads a JSON or TOML group description.
    pub fn load(path: &std::path::Path) -> Result<Self, CoxeterError> {
        let text = std::fs::read_to_string(path).map_err(|e| CoxeterError::Config(e.to_string()))?;
        let cfg: GroupConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| CoxeterError::Config(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| CoxeterError::Config(e.to_string()))?
        };
        Self::from_config(&cfg)
    }

    /// A preset name, or a path to a config file.
    pub fn resolve(name_or_path: &str) -> Result<Self, CoxeterError> {
        match preset(name_or_path) {
            Ok(g) => Ok(g),
            Err(CoxeterError::UnknownPreset(_)) if std::path::Path::new(name_or_path).exists() => {
                Self::load(std::path::Path::new(name_or_path))
            }
            Err(e) => Err(e),
        }
    }
}

/// A number in a config file: integer or `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    fn to_q(&self) -> Option<Q> {
        match self {
            Num::Int(i) => Some(q(*i)),
            Num::Str(s) => parse_q(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct GroupConfig {
    pub name: String,
    pub generators: Vec<String>,
    /// `0` encodes infinity.
    pub coxeter_matrix: Vec<Vec<u32>>,
    pub dim: usize,
    /// `dim x rank`; column `s` holds `alpha_s`.
    pub roots: Vec<Vec<Num>>,
    /// `rank x dim`; row `s` holds `alpha_s^vee`.
    pub coroots: Vec<Vec<Num>>,
}

fn names(n: usize) -> Vec<String> {
    const LETTERS: [&str; 8] = ["s", "t", "u", "r", "p", "q", "x", "y"];
    (0..n).map(|i| LETTERS.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("s{i}"))).collect()
}

fn cartan_group(name: &str, m: Vec<Vec<u32>>, cartan: Vec<Vec<i64>>) -> Result<CoxeterGroup, CoxeterError> {
    let cox = CoxeterMatrix::new(names(m.len()), m)?;
    CoxeterGroup::new(name, cox, Realization::from_cartan(&cartan))
}

pub const PRESETS: &[&str] =
    &["A1", "A2", "A3", "B2", "G2", "universal2", "universal3", "ra3", "affine-A2", "gkm-violation"];

/// Built-in groups. `universalN` is the universal Coxeter group of rank `N`
/// with Cartan entries `-2`; `ra3` is right-angled of rank 3 (`m_st = 2`,
/// other pairs infinite); `affine-A2` uses a 4-dimensional Kac realization
/// with the affine generator `u` last.
pub fn preset(name: &str) -> Result<CoxeterGroup, CoxeterError> {
    let norm = name.to_ascii_lowercase().replace(['_', ' ', '(', ')'], "");
    match norm.as_str() {
        "a1" => cartan_group("A1", vec![vec![1]], vec![vec![2]]),
        "a2" => cartan_group("A2", vec![vec![1, 3], vec![3, 1]], vec![vec![2, -1], vec![-1, 2]]),
        "a3" => cartan_group(
            "A3",
            vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]],
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
        ),
        "b2" => cartan_group("B2", vec![vec![1, 4], vec![4, 1]], vec![vec![2, -2], vec![-1, 2]]),
        "g2" => cartan_group("G2", vec![vec![1, 6], vec![6, 1]], vec![vec![2, -1], vec![-3, 2]]),
        "ra3" => cartan_group(
            "ra3",
            vec![vec![1, 2, INF], vec![2, 1, INF], vec![INF, INF, 1]],
            vec![vec![2, 0, -2], vec![0, 2, -2], vec![-2, -2, 2]],
        ),
        "affinea2" | "affine-a2" | "a2affine" | "a~2" => {
            let cox = CoxeterMatrix::new(names(3), vec![vec![1, 3, 3], vec![3, 1, 3], vec![3, 3, 1]])?;
            let e = |i: usize| (0..4).map(|j| if i == j { Q::one() } else { Q::zero() }).collect::<Vec<_>>();
            let co = |r: [i64; 4]| r.iter().map(|&x| q(x)).collect::<Vec<_>>();
            let real = Realization {
                dim: 4,
                roots: vec![e(0), e(1), e(2)],
                coroots: vec![co([2, -1, -1, 0]), co([-1, 2, -1, 0]), co([-1, -1, 2, 1])],
            };
            CoxeterGroup::new("affine-A2", cox, real)
        }
        "gkmviolation" | "gkm-violation" => {
            let cox = CoxeterMatrix::new(names(2), vec![vec![1, INF], vec![INF, 1]])?;
            let real = Realization { dim: 1, roots: vec![vec![q(1)], vec![q(-1)]], coroots: vec![vec![q(2)], vec![q(-2)]] };
            CoxeterGroup::new("gkm-violation", cox, real)
        }
        _ => {
            if let Some(n) = norm.strip_prefix("universal") {
                if let Ok(n) = n.parse::<usize>() {
                    if (1..=crate::poly::MAX_VARS).contains(&n) {
                        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { INF }).collect()).collect();
                        let c = (0..n).map(|i| (0..n).map(|j| if i == j { 2 } else { -2 }).collect()).collect();
                        return cartan_group(&format!("universal{n}"), m, c);
                    }
                }
            }
            Err(CoxeterError::UnknownPreset(name.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> CoxeterGroup {
        preset("A2").unwrap()
    }

    #[test]
    fn presets_validate() {
        for p in PRESETS {
            preset(p).unwrap();
        }
    }

    #[test]
    fn balancedness_violation_detected() {
        let cox = CoxeterMatrix::new(names(2), vec![vec![1, 3], vec![3, 1]]).unwrap();
        let real = Realization::from_cartan(&[vec![2, -3], vec![-1, 2]]);
        assert!(matches!(CoxeterGroup::new("bad", cox, real), Err(CoxeterError::BalancednessViolation { .. })));
    }

    #[test]
    fn infinite_edge_too_small() {
        let cox = CoxeterMatrix::new(names(2), vec![vec![1, INF], vec![INF, 1]]).unwrap();
        let real = Realization::from_cartan(&[vec![2, -1], vec![-3, 2]]);
        assert!(matches!(CoxeterGroup::new("bad", cox, real), Err(CoxeterError::InfiniteEdgeTooSmall { .. })));
    }

    #[test]
    fn zero_root_rejected() {
        let cox = CoxeterMatrix::new(names(1), vec![vec![1]]).unwrap();
        let real = Realization { dim: 1, roots: vec![vec![q(0)]], coroots: vec![vec![q(2)]] };
        assert!(matches!(CoxeterGroup::new("bad", cox, real), Err(CoxeterError::ZeroRootOrCoroot(_))));
    }

    #[test]
    fn multiplication_basics() {
        let g = a2();
        let s = g.gen(0);
        let t = g.gen(1);
        assert!(g.multiply(&s, &s).is_identity());
        let st = g.multiply(&s, &t);
        let ts = g.multiply(&t, &s);
        assert!(g.multiply(&st, &ts).is_identity());
        assert_eq!(g.reduce(&[0, 1, 0]), g.reduce(&[1, 0, 1]));
        let u = preset("universal3").unwrap();
        assert_eq!(u.multiply(&u.gen(0), &u.gen(1)).word(), &[0, 1]);
    }

    #[test]
    fn bruhat_examples() {
        let g = a2();
        let ts = g.reduce(&[1, 0]);
        let st = g.reduce(&[0, 1]);
        assert!(g.bruhat_leq(&g.gen(0), &ts));
        assert!(!g.bruhat_leq(&st, &ts));
        assert_eq!(g.interval(&st).len(), 4);
        assert_eq!(g.interval(&g.reduce(&[0, 1, 0])).len(), 6);
        assert_eq!(g.bruhat_edges(&g.interval(&st)).len(), 4);
        assert_eq!(g.bruhat_edges(&g.interval(&g.reduce(&[0, 1, 0]))).len(), 8);
    }

    #[test]
    fn reflection_roots() {
        let g = a2();
        let sts = g.reduce(&[0, 1, 0]);
        let r = g.reflection(&sts).unwrap();
        assert_eq!(r.root, &g.alpha(0) + &g.alpha(1));
        assert!(g.reflection(&g.reduce(&[0, 1])).is_err());
        g.check_roots(&g.interval(&sts)).unwrap();
    }

    #[test]
    fn gkm_examples() {
        let g = a2();
        assert!(g.gkm_check(&g.interval(&g.reduce(&[0, 1, 0]))));
        let u = preset("universal3").unwrap();
        assert!(u.gkm_check(&u.interval(&u.reduce(&[0, 1, 2, 0, 1, 2]))));
        let bad = preset("gkm-violation").unwrap();
        assert!(!bad.gkm_check(&bad.interval(&bad.reduce(&[0, 1]))));
    }

    #[test]
    fn subexpression_examples() {
        let g = a2();
        let w = [0u8, 1, 0];
        let subs = g.subexpressions(&w, &g.gen(0));
        assert_eq!(subs.len(), 2);
        let a = subs.iter().find(|e| e.bits == vec![1, 0, 0]).unwrap();
        let b = subs.iter().find(|e| e.bits == vec![0, 0, 1]).unwrap();
        assert_eq!(a.defect, 0);
        assert_eq!(b.defect, 2);
        assert_eq!(g.canonical_subexpression(&w, &g.gen(0)).unwrap().bits, vec![0, 0, 1]);
        let st = g.reduce(&[0, 1]);
        let c = g.canonical_subexpression(&w, &st).unwrap();
        assert_eq!(c.bits, vec![1, 1, 0]);
        assert_eq!(c.defect, 1);
        assert_eq!(g.canonical_subexpression(&w, &g.identity()).unwrap().bits, vec![0, 0, 0]);
        assert!(g.canonical_subexpression(&[0], &g.gen(1)).is_err());
    }

    #[test]
    fn dihedral_faithfulness() {
        for p in ["A2", "B2", "G2", "A3", "affine-A2"] {
            assert!(preset(p).unwrap().dihedrally_faithful(), "{p}");
        }
    }

    #[test]
    fn covers_in_a2() {
        let g = a2();
        let covers = g.covers(&g.gen(0));
        assert_eq!(covers.len(), 2);
    }
}
