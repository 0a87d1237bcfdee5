//! Verification suites shared by the command-line driver and the acceptance
//! tests. Each suite returns named pass/fail assertions plus a JSON summary.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use serde_json::{json, Value};

use crate::bimodule::BottSamelson;
use crate::coxeter::{preset, CoxeterError, CoxeterGroup, CoxeterMatrix, GroupElement, Realization, PRESETS};
use crate::hecke::{hw_rank_formula, Hecke, Laurent};
use crate::lightleaves::{change_of_basis_det, check_support, dual_leaves, light_leaves, orthogonal_check};
use crate::poly::Poly;
use crate::sheaves::{counterexample_affine, decomposability_check, BmpSheaf};
use crate::smod::{counterexample_universal, hecke_pairing_of_words, hom_right_r, hom_zbar, BarBuilder, SoergelModule};
use crate::structure::Structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub status: Status,
    pub details: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, ok: bool, details: impl Into<String>) -> Self {
        Assertion { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, details: details.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub results: Value,
    pub assertions: Vec<Assertion>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(Assertion::passed)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed()).collect()
    }
}

/// Every word of length at most `max_len` over `rank` letters, shortest first.
pub fn all_words(rank: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in 0..rank as u8 {
                let mut v: Vec<u8> = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Both `d(x, y)` algorithms agree, `d(x, x) = p_x`, `d(x, y)` is
/// homogeneous of degree `2 l(x)`, and `y -> d(x, y)` satisfies the edge
/// congruences.
pub fn dxy_suite(g: &CoxeterGroup, max_len: usize) -> SuiteResult {
    let st = Structure::new(g);
    let ball = g.ball(max_len);
    let mut pairs = 0usize;
    let (mut agree, mut diag, mut degree, mut support) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for y in &ball {
        match st.nh.d_row(y) {
            Ok(row) => {
                let interval: BTreeSet<GroupElement> = g.interval(y).iter().cloned().collect();
                for (x, p) in row.iter() {
                    pairs += 1;
                    if p.grade() != Some(2 * x.length() as i64) || !p.is_homogeneous() {
                        degree.push(format!("d({},{})", g.format(x), g.format(y)));
                    }
                    if !interval.contains(x) {
                        support.push(format!("d({},{}) with x not below y", g.format(x), g.format(y)));
                    }
                }
                if row.get(y) != Some(&st.nh.p(y)) {
                    diag.push(g.format(y));
                }
            }
            Err(e) => agree.push(e.to_string()),
        }
    }
    let mut congruence = Vec::new();
    for x in &ball {
        if !st.validate_gkm(&st.p(x, &ball)) {
            congruence.push(g.format(x));
        }
    }
    let list = |v: &[String]| if v.is_empty() { "none".to_string() } else { v.join("; ") };
    SuiteResult {
        results: json!({ "elements": ball.len(), "nonzero_pairs": pairs }),
        assertions: vec![
            Assertion::new("dxy.algorithms_agree", agree.is_empty(), list(&agree)),
            Assertion::new("dxy.diagonal_is_p", diag.is_empty(), list(&diag)),
            Assertion::new("dxy.degree", degree.is_empty(), list(&degree)),
            Assertion::new("dxy.support_below", support.is_empty(), list(&support)),
            Assertion::new("dxy.edge_congruences", congruence.is_empty(), list(&congruence)),
        ],
    }
}

/// `P_w . lambda` has support `{w}` plus covers, leading coefficient
/// `w(lambda)`, and edge coefficients `+-d_t(lambda)` with one sign.
pub fn pieri_suite(g: &CoxeterGroup, max_len: usize) -> SuiteResult {
    let st = Structure::new(g);
    let omega = g.ball(max_len + 1);
    let mut shape = Vec::new();
    let mut nil_hecke = Vec::new();
    let mut signs: BTreeMap<i8, usize> = BTreeMap::new();
    let mut checked = 0usize;
    for w in g.ball(max_len) {
        for lambda in g.basis_of_v() {
            checked += 1;
            match st.pieri_z(&w, &lambda, &omega) {
                Ok(r) => r.edge_signs.iter().for_each(|(_, s)| *signs.entry(*s).or_default() += 1),
                Err(e) => shape.push(e.to_string()),
            }
            if let Err(e) = st.nh.pieri_d(&w, &lambda) {
                nil_hecke.push(e.to_string());
            }
        }
    }
    let sign = match signs.keys().collect::<Vec<_>>().as_slice() {
        [s] => format!("{s:+}"),
        [] => "none".into(),
        _ => "mixed".into(),
    };
    SuiteResult {
        results: json!({ "cases": checked, "edge_sign": sign, "sign_counts": signs }),
        assertions: vec![
            Assertion::new("pieri.shape", shape.is_empty(), shape.first().cloned().unwrap_or_else(|| format!("{checked} cases"))),
            Assertion::new("pieri.consistent_sign", signs.len() <= 1, format!("edge coefficient = {sign} d_t(lambda)")),
            Assertion::new("pieri.nil_hecke", nil_hecke.is_empty(), nil_hecke.first().cloned().unwrap_or_default()),
        ],
    }
}

/// Graded rank of `span P_{w,x}` equals `v^-l(w) sum_{x<=w} v^(2l(x))` for
/// every reduced word of length at most `max_len`.
pub fn hw_rank_suite(g: &CoxeterGroup, max_len: usize) -> SuiteResult {
    let mut words = 0usize;
    let mut failures = Vec::new();
    for w in g.ball(max_len) {
        for word in g.reduced_words(&w) {
            words += 1;
            let bs = BottSamelson::new(g, &word);
            let outcome = (|| -> Result<Option<String>, String> {
                let hw = bs.hw_basis().map_err(|e| e.to_string())?;
                let can = bs.canonical_elements().map_err(|e| e.to_string())?;
                let mut rank = Laurent::zero();
                for (x, p) in &hw {
                    let d = p.degree().ok_or("inhomogeneous P_{w,x}")?;
                    rank.add_term(d as i32, 1);
                    for (y, c) in &can {
                        let expect = if x == y { Poly::one(g.dim()) } else { Poly::zero(g.dim()) };
                        if bs.iform(p, c) != expect {
                            return Ok(Some(format!("pairing of P at {} with c_can at {}", g.format(x), g.format(y))));
                        }
                    }
                }
                let formula = hw_rank_formula(bs.omega(), word.len());
                Ok((rank != formula).then(|| format!("rank {rank} vs {formula}")))
            })();
            match outcome {
                Ok(None) => {}
                Ok(Some(msg)) | Err(msg) => failures.push(format!("{}: {msg}", g.format_word(&word))),
            }
        }
    }
    SuiteResult {
        results: json!({ "reduced_words": words }),
        assertions: vec![Assertion::new(
            "hw.graded_rank",
            failures.is_empty(),
            failures.first().cloned().unwrap_or_else(|| format!("{words} reduced words")),
        )],
    }
}

/// Degree formula, support containment, unit determinant, duals, and
/// `H_w = D_w^perp` for every reduced word of length at most `max_len`.
pub fn lightleaves_suite(g: &CoxeterGroup, max_len: usize) -> SuiteResult {
    let mut words = 0usize;
    let mut skipped = 0usize;
    let mut fails: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for w in g.ball(max_len) {
        for word in g.reduced_words(&w) {
            if check_support(g, &word).is_err() {
                skipped += 1;
                continue;
            }
            words += 1;
            let name = g.format_word(&word);
            let bs = BottSamelson::new(g, &word);
            let fam = match light_leaves(&bs) {
                Ok(f) => f,
                Err(e) => {
                    fails.entry("construct").or_default().push(format!("{name}: {e}"));
                    continue;
                }
            };
            for l in &fam.leaves {
                if l.element.degree() != Some(l.expected_degree()) {
                    fails.entry("degree").or_default().push(name.clone());
                }
                if !bs.support(&l.element).iter().all(|y| g.bruhat_leq(y, l.target())) {
                    fails.entry("support").or_default().push(name.clone());
                }
            }
            let det = change_of_basis_det(&fam);
            if !(det.is_constant() && !det.is_zero()) {
                fails.entry("unit_determinant").or_default().push(name.clone());
            }
            match dual_leaves(&bs, &fam).and_then(|d| orthogonal_check(&bs, &fam, &d)) {
                Ok(r) if r.passed() => {}
                Ok(r) => fails.entry("orthogonal").or_default().push(format!("{name}: {r:?}")),
                Err(e) => fails.entry("orthogonal").or_default().push(format!("{name}: {e}")),
            }
        }
    }
    let assertions = ["construct", "degree", "support", "unit_determinant", "orthogonal"]
        .iter()
        .map(|k| {
            let f = fails.get(k).cloned().unwrap_or_default();
            Assertion::new(format!("lightleaves.{k}"), f.is_empty(), f.first().cloned().unwrap_or_else(|| format!("{words} words")))
        })
        .chain(std::iter::once(Assertion::new("lightleaves.nonempty", words > 0, format!("{words} words, {skipped} skipped"))))
        .collect();
    SuiteResult { results: json!({ "words": words, "skipped": skipped }), assertions }
}

/// `grdim Hom_Zbar(bar BS(u), bar BS(v)) = (bar[BS(u)], [BS(v)])` for all
/// word pairs with `l(u) + l(v) <= max_total`; optionally also compares with
/// maps commuting only with the right action.
pub fn homformula_suite(g: &CoxeterGroup, max_total: usize, compare_right: bool) -> SuiteResult {
    let h = Hecke::new(g);
    let builder = BarBuilder::new(g);
    let words = all_words(g.rank(), max_total);
    let half = max_total / 2;
    let mut cache: HashMap<Vec<u8>, SoergelModule> = HashMap::new();
    let mut build_errors = Vec::new();
    for w in words.iter().filter(|w| w.len() <= half) {
        match builder.bar_bs(w) {
            Ok(m) => {
                cache.insert(w.clone(), m);
            }
            Err(e) => build_errors.push(e.to_string()),
        }
    }
    let mut pairs = 0usize;
    let mut mismatches = Vec::new();
    let mut right_mismatches = Vec::new();
    let mut check = |u: &[u8], v: &[u8], mu: &SoergelModule, mv: &SoergelModule| {
        pairs += 1;
        let z = hom_zbar(mu, mv).grdim();
        let expect = hecke_pairing_of_words(&h, u, v);
        if z != expect {
            mismatches.push(format!("({}, {}): {z} vs {expect}", g.format_word(u), g.format_word(v)));
        }
        if compare_right {
            let r = hom_right_r(mu, mv).grdim();
            if r != z {
                right_mismatches.push(format!("({}, {}): {r} vs {z}", g.format_word(u), g.format_word(v)));
            }
        }
    };
    for u in words.iter().filter(|w| w.len() <= half) {
        for v in words.iter().filter(|w| w.len() <= half && u.len() + w.len() <= max_total) {
            if let (Some(mu), Some(mv)) = (cache.get(u), cache.get(v)) {
                check(u, v, mu, mv);
            }
        }
    }
    for long in words.iter().filter(|w| w.len() > half) {
        let ml = match builder.bar_bs(long) {
            Ok(m) => m,
            Err(e) => {
                build_errors.push(e.to_string());
                continue;
            }
        };
        for short in words.iter().filter(|w| w.len() + long.len() <= max_total) {
            let ms = &cache[short];
            check(short, long, ms, &ml);
            check(long, short, &ml, ms);
        }
    }
    let mut assertions = vec![
        Assertion::new("homformula.build", build_errors.is_empty(), build_errors.first().cloned().unwrap_or_default()),
        Assertion::new(
            "homformula.zbar_equals_pairing",
            mismatches.is_empty(),
            mismatches.first().cloned().unwrap_or_else(|| format!("{pairs} pairs")),
        ),
    ];
    if let Some(ms) = cache.get(&vec![0u8]) {
        let end = hom_zbar(ms, ms).grdim();
        let expect = Laurent::from_terms(&[(0, 1), (2, 1)]);
        assertions.push(Assertion::new("homformula.end_bs_s", end == expect, format!("{end}")));
    }
    if compare_right {
        assertions.push(Assertion::new(
            "homformula.right_r_equals_zbar",
            right_mismatches.is_empty(),
            right_mismatches.first().cloned().unwrap_or_else(|| format!("{pairs} pairs")),
        ));
    }
    SuiteResult { results: json!({ "pairs": pairs, "max_total": max_total }), assertions }
}

/// A realization that is not balanced: type `A2` with Cartan entries
/// `-3, -1`.
pub fn balancedness_violation() -> Result<CoxeterGroup, CoxeterError> {
    let cox = CoxeterMatrix::new(vec!["s".into(), "t".into()], vec![vec![1, 3], vec![3, 1]])?;
    CoxeterGroup::new("unbalanced", cox, Realization::from_cartan(&[vec![2, -3], vec![-1, 2]]))
}

/// Balancedness accepted on presets and rejected on the violation, GKM on
/// balls, and well-defined reflection roots.
pub fn realization_suite(groups: &[&str], max_len: usize) -> SuiteResult {
    let mut assertions = Vec::new();
    let mut results = serde_json::Map::new();
    for name in groups {
        let g = match preset(name) {
            Ok(g) => g,
            Err(e) => {
                assertions.push(Assertion::new(format!("realization.{name}.balanced"), false, e.to_string()));
                continue;
            }
        };
        assertions.push(Assertion::new(format!("realization.{name}.balanced"), true, "accepted"));
        let ball = g.ball(max_len);
        let gkm = g.gkm_check(&ball);
        if *name == "gkm-violation" {
            assertions.push(Assertion::new(format!("realization.{name}.gkm_rejected"), !gkm, "constructed GKM violation"));
        } else {
            assertions.push(Assertion::new(format!("realization.{name}.gkm"), gkm, format!("{} elements", ball.len())));
        }
        let roots = g.check_roots(&ball);
        assertions.push(Assertion::new(
            format!("realization.{name}.roots"),
            roots.is_ok(),
            match &roots {
                Ok(n) => format!("{n} decompositions"),
                Err(e) => e.to_string(),
            },
        ));
        results.insert(name.to_string(), json!({ "elements": ball.len() }));
    }
    let bad = balancedness_violation();
    assertions.push(Assertion::new(
        "realization.violation_rejected",
        matches!(bad, Err(CoxeterError::BalancednessViolation { .. })),
        match &bad {
            Err(e) => e.to_string(),
            Ok(_) => "accepted".into(),
        },
    ));
    SuiteResult { results: Value::Object(results), assertions }
}

/// Presets that are valid realizations (excludes the GKM violation).
pub fn valid_presets() -> Vec<&'static str> {
    PRESETS.iter().copied().filter(|p| *p != "gkm-violation").collect()
}

/// Stalks against KL, symmetry, and indecomposability over `Z-bar` of the
/// bar of sections, for every element of length at most `max_len`.
pub fn sheaves_suite(g: &CoxeterGroup, max_len: usize) -> SuiteResult {
    let h = Hecke::new(g);
    let mut kl = Vec::new();
    let mut other = Vec::new();
    let mut count = 0usize;
    for w in g.ball(max_len) {
        count += 1;
        match BmpSheaf::build(g, &w) {
            Ok(s) => kl.extend(s.kl_mismatches(&h).iter().map(|(x, a, b)| format!("{} at {}: {a} vs {b}", g.format(&w), g.format(x)))),
            Err(e) => kl.push(e.to_string()),
        }
        match decomposability_check(g, w.word()) {
            Ok(r) => {
                if !(r.verdict.zbar_indecomposable && r.bar_grdim_symmetric && r.bar_dim == r.total_stalk_rank) {
                    other.push(format!("{}: {:?}", g.format(&w), r.verdict));
                }
            }
            Err(e) => other.push(format!("{}: {e}", g.format(&w))),
        }
    }
    SuiteResult {
        results: json!({ "elements": count }),
        assertions: vec![
            Assertion::new("sheaves.stalks_match_kl", kl.is_empty(), kl.first().cloned().unwrap_or_else(|| format!("{count} elements"))),
            Assertion::new(
                "sheaves.bar_indecomposable_over_zbar",
                other.is_empty(),
                other.first().cloned().unwrap_or_else(|| format!("{count} elements")),
            ),
        ],
    }
}

/// The universal rank-3 example as assertions.
pub fn universal_suite() -> SuiteResult {
    match counterexample_universal() {
        Ok(r) => {
            let v = &r.verdict;
            SuiteResult {
                results: serde_json::to_value(&r).unwrap_or(Value::Null),
                assertions: vec![
                    Assertion::new("universal.degree_b", v.deg == 2, format!("deg b = {}, reading {}", v.deg, r.orientation)),
                    Assertion::new(
                        "universal.kl_coefficient",
                        r.kl_matches_expected,
                        format!("computed {}, expected {}", v.kl_coeff, r.expected_kl_coeff),
                    ),
                    Assertion::new(
                        "universal.gamma_id_degree2_zero",
                        r.gamma_id_degree2_dim == 0 && r.commuting_degree2_dim == 0 && !v.in_gamma_id,
                        format!("dim {} (commuting part {})", r.gamma_id_degree2_dim, r.commuting_degree2_dim),
                    ),
                    Assertion::new("universal.annihilates_rplus", v.annihilates_rplus, "b-bar . lambda = 0 for all lambda"),
                    Assertion::new("universal.one_tensor_not_annihilated", !r.one_tensor_annihilates, "control"),
                    Assertion::new(
                        "universal.theta_not_surjective",
                        !v.theta_surjective,
                        format!("degree 2: right-R maps {}, Z-bar maps {}", r.hom_right_r_degree2, r.hom_zbar_degree2),
                    ),
                ],
            }
        }
        Err(e) => SuiteResult { results: Value::Null, assertions: vec![Assertion::new("universal.run", false, e.to_string())] },
    }
}

/// The affine `A2` example as assertions.
pub fn affine_suite() -> SuiteResult {
    match counterexample_affine() {
        Ok(r) => {
            let framework = if r.stalks_match_kl { "holds".to_string() } else { format!("framework assumption failed: {:?}", r.kl_mismatches) };
            SuiteResult {
                results: serde_json::to_value(&r).unwrap_or(Value::Null),
                assertions: vec![
                    Assertion::new("affine.stalks_match_kl", r.stalks_match_kl, framework),
                    Assertion::new("affine.bar_symmetric", r.bar_grdim_symmetric && r.bar_dim == r.total_stalk_rank, r.bar_grdim.clone()),
                    Assertion::new("affine.zbar_indecomposable", r.verdict.zbar_indecomposable, format!("End^0 dim {}", r.end0_zbar_dim)),
                    Assertion::new(
                        "affine.right_r_decomposable",
                        r.verdict.right_r_decomposable && r.idempotent_verified,
                        format!("idempotent of rank {:?}", r.idempotent_rank),
                    ),
                ],
            }
        }
        Err(e) => SuiteResult { results: Value::Null, assertions: vec![Assertion::new("affine.run", false, e.to_string())] },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_enumeration() {
        let w = all_words(3, 6);
        assert_eq!(w.len(), 1093);
        let pairs: usize = w.iter().map(|u| w.iter().filter(|v| u.len() + v.len() <= 6).count()).sum();
        assert_eq!(pairs, 7108);
    }

    #[test]
    fn small_suites_pass() {
        let g = preset("A2").unwrap();
        for r in [dxy_suite(&g, 3), pieri_suite(&g, 2), hw_rank_suite(&g, 3), homformula_suite(&g, 3, true), sheaves_suite(&g, 3)] {
            assert!(r.passed(), "{:?}", r.failures());
        }
        let u = preset("universal3").unwrap();
        assert!(lightleaves_suite(&u, 3).passed());
        assert!(realization_suite(&["A2", "gkm-violation"], 3).passed());
    }
}
