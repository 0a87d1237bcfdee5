//! Light leaves `ll_{w,e}` in Bott-Samelson bimodules, their duals, the
//! defective submodule `D_w` and the check `H_w = D_w^perp`.
//!
//! Leaves are built for words whose letters pairwise satisfy `m in {2, inf}`:
//! reduced expressions are then related by commutations only, realised by the
//! slot swap `B_s B_t = B_t B_s`. The morphism `LL_{w,e}: BS(w) -> BS(x)` is
//! assembled from the identity (U1), the end dot `f (x) g -> fg` (U0), the
//! merge `f (x) g (x) h -> f d_s(g) (x) h` (D0) and the cap
//! `f (x) g (x) h -> f d_s(g) h` (D1). The leaf `ll_{w,e}` is the adjoint of
//! `LL_{w,e}` applied to `1^(x)`, found from `<ll_e, c_f> = Tr(LL_e(c_f))`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::bimodule::{bits_to_mask, push_left, BSElement, BimoduleError, BottSamelson};
use crate::coxeter::{CoxeterError, CoxeterGroup, Decoration, GroupElement, Subexpression};
use crate::linalg::{poly_det, poly_matrix_inverse};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LightLeavesError {
    #[error("light leaves need m in {{2, inf}} with orthogonal roots for the letters {s}, {t}")]
    Unsupported { s: String, t: String },
    #[error("the Gram matrix is not invertible over R")]
    GramNotUnit,
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// How reduced expressions are rearranged while building leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    /// Only the commutations forced by D-steps.
    Standard,
    /// Additionally slide each newly kept letter as far left as it commutes.
    Shuffled,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub sub: Subexpression,
    pub element: BSElement,
}

impl Leaf {
    pub fn target(&self) -> &GroupElement {
        &self.sub.target
    }

    pub fn expected_degree(&self) -> i64 {
        self.sub.defect - self.sub.target.length() as i64
    }
}

/// Leaves indexed by subexpression mask.
#[derive(Clone, Debug)]
pub struct LightLeafFamily {
    pub word: Vec<u8>,
    pub leaves: Vec<Leaf>,
}

impl LightLeafFamily {
    /// The non-canonical leaves, spanning `D_w`.
    pub fn defective(&self) -> Vec<&Leaf> {
        self.leaves.iter().filter(|l| !l.sub.is_canonical()).collect()
    }

    /// String-basis coordinates, one row per leaf.
    pub fn matrix(&self) -> Vec<Vec<Poly>> {
        self.leaves.iter().map(|l| l.element.coords.clone()).collect()
    }
}

/// Fails unless every pair of distinct letters of the word has `m = inf`, or
/// `m = 2` with mutually orthogonal roots.
pub fn check_support(g: &CoxeterGroup, word: &[u8]) -> Result<(), LightLeavesError> {
    let letters: BTreeSet<u8> = word.iter().copied().collect();
    for &s in &letters {
        for &t in &letters {
            if s >= t {
                continue;
            }
            let ok = match g.m(s, t) {
                0 => true,
                2 => g.eval_functional(g.coroot(s), &g.alpha(t)).is_zero() && g.eval_functional(g.coroot(t), &g.alpha(s)).is_zero(),
                _ => false,
            };
            if !ok {
                let names = g.generator_names();
                return Err(LightLeavesError::Unsupported { s: names[s as usize].clone(), t: names[t as usize].clone() });
            }
        }
    }
    Ok(())
}

/// Image of a string basis element under `LL_{w,e}` followed by the trace.
struct LeafEvaluator<'a> {
    g: &'a CoxeterGroup,
    choice: Choice,
}

impl LeafEvaluator<'_> {
    fn swap(u: &mut [u8], terms: BTreeMap<usize, Poly>, k: usize) -> BTreeMap<usize, Poly> {
        u.swap(k, k + 1);
        terms
            .into_iter()
            .map(|(m, p)| {
                let a = m >> k & 1;
                let b = m >> (k + 1) & 1;
                let m2 = (m & !(3 << k)) | (b << k) | (a << (k + 1));
                (m2, p)
            })
            .collect()
    }

    fn add(out: &mut BTreeMap<usize, Poly>, m: usize, p: Poly) {
        let e = out.entry(m).or_insert_with(|| Poly::zero(p.nvars()));
        e.add_assign_ref(&p);
        if e.is_zero() {
            out.remove(&m);
        }
    }

    fn trace_of_image(&self, sub: &Subexpression, f: usize) -> Poly {
        let g = self.g;
        let nv = g.dim();
        let mut u: Vec<u8> = Vec::new();
        let mut terms: BTreeMap<usize, Poly> = BTreeMap::from([(0, Poly::one(nv))]);
        for (i, &s) in sub.word.iter().enumerate() {
            let gamma = f >> i & 1;
            match sub.decoration[i] {
                Decoration::U => {
                    let l = u.len();
                    terms = terms.into_iter().map(|(m, p)| (m | gamma << l, p)).collect();
                    if sub.bits[i] == 1 {
                        u.push(s);
                        if self.choice == Choice::Shuffled {
                            let mut k = l;
                            while k > 0 && g.m(u[k - 1], s) == 2 {
                                terms = Self::swap(&mut u, terms, k - 1);
                                k -= 1;
                            }
                        }
                    } else {
                        let neg_alpha = -&g.alpha(s);
                        let mut out = BTreeMap::new();
                        for (m, p) in terms {
                            if m >> l & 1 == 1 {
                                Self::add(&mut out, m & !(1 << l), p);
                            } else {
                                for (m2, q) in push_left(g, &u, m, l, &neg_alpha) {
                                    Self::add(&mut out, m2, &p * &q);
                                }
                            }
                        }
                        terms = out;
                    }
                }
                Decoration::D => {
                    let j = (0..u.len())
                        .rev()
                        .find(|&j| u[j] == s && u[j + 1..].iter().all(|&t| g.m(s, t) == 2))
                        .expect("a descent is reachable by commutations");
                    for k in j..u.len() - 1 {
                        terms = Self::swap(&mut u, terms, k);
                    }
                    let l = u.len() - 1;
                    let mut out = BTreeMap::new();
                    for (m, p) in terms {
                        let m = m | gamma << (l + 1);
                        let a = m >> l & 1;
                        let b = m >> (l + 1) & 1;
                        let base = m & !(3 << l);
                        if sub.bits[i] == 0 {
                            // merge: (1,1) -> 0, (1,0),(0,1) -> -c_id, (0,0) -> -c_s
                            match (a, b) {
                                (1, 1) => {}
                                (0, 0) => Self::add(&mut out, base, -&p),
                                _ => Self::add(&mut out, base | 1 << l, -&p),
                            }
                        } else {
                            // cap: (1,1) -> 0, (1,0),(0,1) -> -1, (0,0) -> alpha_s
                            match (a, b) {
                                (1, 1) => {}
                                (0, 0) => {
                                    for (m2, q) in push_left(g, &u[..l], base, l, &g.alpha(s)) {
                                        Self::add(&mut out, m2, &p * &q);
                                    }
                                }
                                _ => Self::add(&mut out, base, -&p),
                            }
                        }
                    }
                    terms = out;
                    if sub.bits[i] == 1 {
                        u.pop();
                    }
                }
            }
        }
        terms.remove(&0).unwrap_or_else(|| Poly::zero(nv))
    }
}

/// Inverse of the Gram matrix of the string basis.
pub fn string_gram_inverse(bs: &BottSamelson) -> Result<Vec<Vec<Poly>>, LightLeavesError> {
    let basis: Vec<BSElement> = (0..bs.num_masks()).map(|m| bs.basis(m)).collect();
    poly_matrix_inverse(&bs.gram(&basis)).ok_or(LightLeavesError::GramNotUnit)
}

/// The full family of light leaves.
pub fn light_leaves(bs: &BottSamelson) -> Result<LightLeafFamily, LightLeavesError> {
    light_leaves_with(bs, Choice::Standard)
}

pub fn light_leaves_with(bs: &BottSamelson, choice: Choice) -> Result<LightLeafFamily, LightLeavesError> {
    let g = bs.group();
    check_support(g, bs.word())?;
    let ginv = string_gram_inverse(bs)?;
    let ev = LeafEvaluator { g, choice };
    let n = bs.num_masks();
    let mut leaves = Vec::with_capacity(n);
    for sub in all_subexpressions(g, bs.word()) {
        let gvec: Vec<Poly> = (0..n).map(|f| ev.trace_of_image(&sub, f)).collect();
        let mut element = bs.zero();
        for (h, row) in ginv.iter().enumerate() {
            for (f, gf) in gvec.iter().enumerate() {
                if !gf.is_zero() && !row[f].is_zero() {
                    element.coords[h].add_assign_ref(&(&row[f] * gf));
                }
            }
        }
        leaves.push(Leaf { sub, element });
    }
    Ok(LightLeafFamily { word: bs.word().to_vec(), leaves })
}

/// Subexpressions indexed by mask (slot `i` is bit `1 << i`).
pub fn all_subexpressions(g: &CoxeterGroup, word: &[u8]) -> Vec<Subexpression> {
    (0..1usize << word.len())
        .map(|m| {
            let bits: Vec<u8> = (0..word.len()).map(|i| (m >> i & 1) as u8).collect();
            g.decorate(word, &bits)
        })
        .collect()
}

/// Canonical leaves `ll_{w,can_x} = c_{can_x}` (available for any group).
pub fn canonical_leaves(bs: &BottSamelson) -> Result<BTreeMap<GroupElement, BSElement>, LightLeavesError> {
    Ok(bs.canonical_elements()?)
}

/// Gram matrix `<ll_e, ll_f>` of a family.
pub fn leaf_gram(bs: &BottSamelson, fam: &LightLeafFamily) -> Vec<Vec<Poly>> {
    let elems: Vec<BSElement> = fam.leaves.iter().map(|l| l.element.clone()).collect();
    bs.gram(&elems)
}

/// The dual basis `ll*` with `<ll*_e, ll_f> = delta_{e,f}`.
pub fn dual_leaves(bs: &BottSamelson, fam: &LightLeafFamily) -> Result<Vec<BSElement>, LightLeavesError> {
    let inv = poly_matrix_inverse(&leaf_gram(bs, fam)).ok_or(LightLeavesError::GramNotUnit)?;
    Ok(inv
        .iter()
        .map(|row| {
            let mut out = bs.zero();
            for (f, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out = out.add(&fam.leaves[f].element.scale(c));
                }
            }
            out
        })
        .collect())
}

/// Determinant of the leaf-to-string change of basis.
pub fn change_of_basis_det(fam: &LightLeafFamily) -> Poly {
    poly_det(&fam.matrix())
}

/// Outcome of the `H_w = D_w^perp` comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalReport {
    /// Number of pairs `(x, e)` with `<P_{w,x}, ll_e> != 0`, `e` non-canonical.
    pub nonzero_pairings: usize,
    pub defective_rank: usize,
    pub corank: usize,
    pub interval_size: usize,
    /// Whether `ll*_{can_x} = P_{w,x}` for all `x`.
    pub duals_match: bool,
}

impl OrthogonalReport {
    pub fn passed(&self) -> bool {
        self.nonzero_pairings == 0 && self.corank == self.interval_size && self.duals_match
    }
}

pub fn orthogonal_check(bs: &BottSamelson, fam: &LightLeafFamily, duals: &[BSElement]) -> Result<OrthogonalReport, LightLeavesError> {
    let hw = bs.hw_basis()?;
    let defective = fam.defective();
    let mut nonzero = 0;
    for p in hw.values() {
        for l in &defective {
            if !bs.iform(p, &l.element).is_zero() {
                nonzero += 1;
            }
        }
    }
    let mut duals_match = true;
    for (e, leaf) in fam.leaves.iter().enumerate() {
        if leaf.sub.is_canonical() && hw.get(leaf.target()) != Some(&duals[e]) {
            duals_match = false;
        }
    }
    let rank = defective.len();
    Ok(OrthogonalReport {
        nonzero_pairings: nonzero,
        defective_rank: rank,
        corank: bs.num_masks() - rank,
        interval_size: bs.omega().len(),
        duals_match,
    })
}

/// Leaves spanning `Gamma_{<=x}` and dual leaves spanning `Gamma_{>=x}`.
pub fn gamma_via_leaves(
    bs: &BottSamelson,
    fam: &LightLeafFamily,
    duals: &[BSElement],
    x: &GroupElement,
) -> (Vec<BSElement>, Vec<BSElement>) {
    let g = bs.group();
    let mut le = Vec::new();
    let mut ge = Vec::new();
    for (e, leaf) in fam.leaves.iter().enumerate() {
        if g.bruhat_leq(leaf.target(), x) {
            le.push(leaf.element.clone());
        }
        if g.bruhat_leq(x, leaf.target()) {
            ge.push(duals[e].clone());
        }
    }
    (le, ge)
}

/// `dim_Q` of the degree-`d` part of the free module on homogeneous generators.
pub fn free_dim(nvars: usize, gens: &[BSElement], d: i64) -> usize {
    gens.iter()
        .filter_map(|b| b.degree())
        .filter(|k| d >= *k && (d - k) % 2 == 0)
        .map(|k| crate::poly::dim_homogeneous(nvars, (d - k) / 2))
        .sum()
}

/// Mask of a canonical subexpression, convenient for lookups.
pub fn canonical_mask(g: &CoxeterGroup, word: &[u8], x: &GroupElement) -> Result<usize, LightLeavesError> {
    Ok(bits_to_mask(&g.canonical_subexpression(word, x)?.bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::preset;

    #[test]
    fn rank_one_leaves_and_duals() {
        let g = preset("universal2").unwrap();
        let bs = BottSamelson::new(&g, &[0]);
        let fam = light_leaves(&bs).unwrap();
        assert_eq!(fam.leaves[1].element, bs.one_tensor());
        assert_eq!(fam.leaves[0].element, bs.c_top());
        let duals = dual_leaves(&bs, &fam).unwrap();
        assert_eq!(duals[0], bs.one_tensor());
        assert_eq!(duals[1], bs.c_top().add(&bs.one_tensor().scale(&g.alpha(0))));
    }

    #[test]
    fn repeated_letter_leaves() {
        let g = preset("universal2").unwrap();
        let bs = BottSamelson::new(&g, &[0, 0]);
        let fam = light_leaves(&bs).unwrap();
        for l in &fam.leaves {
            assert_eq!(l.element.degree(), Some(l.expected_degree()), "{:?}", l.sub.bits);
        }
        assert_eq!(fam.leaves[3].expected_degree(), 0);
        let mut degs: Vec<i64> = fam.leaves.iter().map(|l| l.expected_degree()).collect();
        degs.sort();
        assert_eq!(degs, vec![-2, 0, 0, 2]);
        assert_eq!(fam.defective().len(), 2);
        assert!(change_of_basis_det(&fam).is_constant());
        let duals = dual_leaves(&bs, &fam).unwrap();
        assert!(orthogonal_check(&bs, &fam, &duals).unwrap().passed());
    }

    #[test]
    fn infinite_sts_family() {
        let g = preset("universal2").unwrap();
        let bs = BottSamelson::new(&g, &[0, 1, 0]);
        let fam = light_leaves(&bs).unwrap();
        let det = change_of_basis_det(&fam);
        assert!(det.is_constant() && !det.is_zero());
        for l in &fam.leaves {
            assert_eq!(l.element.degree(), Some(l.expected_degree()));
            let sup = bs.support(&l.element);
            assert!(sup.iter().all(|y| g.bruhat_leq(y, l.target())));
        }
        let duals = dual_leaves(&bs, &fam).unwrap();
        let r = orthogonal_check(&bs, &fam, &duals).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn unsupported_in_a2() {
        let g = preset("A2").unwrap();
        let bs = BottSamelson::new(&g, &[0, 1, 0]);
        assert!(matches!(light_leaves(&bs), Err(LightLeavesError::Unsupported { .. })));
        assert_eq!(canonical_leaves(&bs).unwrap().len(), 6);
    }
}
