//! Constructive certificate of exponential growth for parabolic quotients:
//! build a reflection subgroup isomorphic to the universal Coxeter group on
//! three generators, enumerate its reflection orbit, and turn both into
//! counted witnesses with exact length bounds.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rustc_hash::FxHashSet;

use crate::diagram::{Diagram, DiagramClass};
use crate::elements::{
    self, distinct_cosets, length_and_word, min_coset_rep, reflection_from_root,
    root_from_reflection, Element,
};
use crate::error::{Error, Result};
use crate::growth::{self, quotient_growth_parabolic};
use crate::linalg;
use crate::rootspace::{
    descend_to_simple, is_unit_positive_root, pairing2, reflect_vector, RootVector,
};

/// Depth to which freeness is certified when an embedding is constructed.
pub const DEFAULT_FREE_CHECK_DEPTH: usize = 10;

/// How the generator triple was obtained.
#[derive(Debug, Clone)]
pub enum Provenance {
    /// The full construction: component Z of J, affine subdiagram Y, the
    /// outside node p, the shortest path from p to Y, and the null root.
    Constructed {
        j: Vec<usize>,
        z: Vec<usize>,
        y: Vec<usize>,
        p: usize,
        path: Vec<usize>,
        delta: RootVector,
    },
    /// The abstract three-generator model: betas are the simple roots of
    /// the all-infinite triangle diagram.
    UniversalModel,
}

/// The triple (beta_1, beta_2, beta_3) certifying a reflection subgroup
/// isomorphic to the universal Coxeter group on three generators, together
/// with its provenance and the length constant M = max l(s_{beta_i}).
#[derive(Debug, Clone)]
pub struct W3Embedding {
    pub betas: [RootVector; 3],
    pub refls: [Element; 3],
    pub m_bound: usize,
    pub free_checked_depth: usize,
    pub provenance: Provenance,
}

impl W3Embedding {
    /// Node p from a constructed embedding; the universal model has none.
    pub fn outside_node(&self) -> Option<usize> {
        match &self.provenance {
            Provenance::Constructed { p, .. } => Some(*p),
            Provenance::UniversalModel => None,
        }
    }

    /// JSON certificate: chosen Z, Y, p, path, delta, betas, M.
    pub fn to_json(&self, diagram: &Diagram) -> serde_json::Value {
        let names = |set: &[usize]| -> Vec<String> {
            set.iter().map(|&i| diagram.node_name(i).to_string()).collect()
        };
        let provenance = match &self.provenance {
            Provenance::Constructed { j, z, y, p, path, delta } => serde_json::json!({
                "kind": "constructed",
                "J": names(j),
                "Z": names(z),
                "Y": names(y),
                "p": diagram.node_name(*p),
                "path": names(path),
                "delta": delta,
            }),
            Provenance::UniversalModel => serde_json::json!({ "kind": "universal-model" }),
        };
        serde_json::json!({
            "betas": self.betas,
            "M": self.m_bound,
            "free_checked_depth": self.free_checked_depth,
            "provenance": provenance,
        })
    }
}

/// The abstract model: the all-infinite triangle diagram with the simple
/// roots as generator triple. Useful as an oracle for orbit computations.
pub fn universal_model() -> Result<(Diagram, W3Embedding)> {
    let d = Diagram::universal(3);
    let betas = [
        RootVector::simple(3, 0),
        RootVector::simple(3, 1),
        RootVector::simple(3, 2),
    ];
    let refls = [
        elements::generator(&d, 0)?,
        elements::generator(&d, 1)?,
        elements::generator(&d, 2)?,
    ];
    let emb = W3Embedding {
        betas,
        refls,
        m_bound: 1,
        free_checked_depth: 0,
        provenance: Provenance::UniversalModel,
    };
    let emb = W3Embedding {
        free_checked_depth: certify_freeness(&emb, DEFAULT_FREE_CHECK_DEPTH)?,
        ..emb
    };
    Ok((d, emb))
}

/// True iff every pairwise form value of the unit positive roots in `f`
/// lies in Dyer's admissible set, which for the integral doubled form is
/// {0, -1} together with everything <= -2.
pub fn verify_dyer_criterion(diagram: &Diagram, f: &[RootVector]) -> Result<bool> {
    for (i, root) in f.iter().enumerate() {
        if !is_unit_positive_root(diagram, root)? {
            return Err(Error::NotARoot(format!(
                "input {i} is not a unit positive root of W"
            )));
        }
    }
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let v = pairing2(diagram, &f[i], &f[j])?;
            if !(v == 0 || v == -1 || v <= -2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Build the embedding for a proper parabolic J with infinite W_J:
/// pick the first infinite component Z of J, its smallest affine
/// subdiagram Y with null root delta, the smallest node p outside J, and
/// the shortest path from p to Y; then
/// beta_1 = s_{r-1}...s_1(alpha_p), beta_2 = alpha_{s_r} + delta,
/// beta_3 = -alpha_{s_r} + 3 delta.
pub fn construct_w3_embedding(diagram: &Diagram, j: &[usize]) -> Result<W3Embedding> {
    let n = diagram.n();
    if !diagram.is_connected() {
        return Err(Error::Precondition("diagram must be connected".into()));
    }
    if diagram.classify()? != DiagramClass::Indefinite {
        return Err(Error::Precondition(format!(
            "diagram must be indefinite, got {}",
            diagram.classify()?
        )));
    }
    let j = crate::diagram::normalize_subset(j);
    if j.iter().any(|&s| s >= n) {
        return Err(Error::Precondition("J contains an out-of-range node".into()));
    }
    if j.len() == n {
        return Err(Error::Precondition("J must be a proper subset of the nodes".into()));
    }
    let z = diagram
        .components_of(&j)
        .into_iter()
        .find_map(|comp| match diagram.classify_subset(&comp) {
            Ok(DiagramClass::Finite) => None,
            Ok(_) => Some(Ok(comp)),
            Err(e) => Some(Err(e)),
        })
        .transpose()?
        .ok_or_else(|| {
            Error::FiniteParabolic(
                "every component of J is of finite type: trivial case, use \
                 quotient_growth_parabolic directly"
                    .into(),
            )
        })?;
    let y = diagram
        .find_affine_subdiagram(&z)?
        .ok_or_else(|| Error::Internal("infinite component without affine subdiagram".into()))?;
    let p = (0..n)
        .find(|i| !j.contains(i))
        .expect("J is proper, so some node lies outside");
    let path = diagram.shortest_path(p, &y)?;
    let delta = diagram.null_root(&y)?;
    let r = path.len() - 1;

    let mut beta1 = RootVector::simple(n, path[0]);
    for &node in path.iter().take(r).skip(1) {
        beta1 = reflect_vector(diagram, &RootVector::simple(n, node), &beta1)?;
    }
    // In the simply laced case beta_1 is just the sum of the path prefix.
    if path.windows(2).take(r).all(|w| {
        diagram.label(w[0], w[1]) == Some(crate::diagram::EdgeLabel::Three)
    }) {
        let mut sum = vec![0i128; n];
        for &node in path.iter().take(r) {
            sum[node] = 1;
        }
        if beta1.coords() != sum.as_slice() {
            return Err(Error::Internal("beta_1 disagrees with its closed form".into()));
        }
    }

    let s_r = path[r];
    let mut beta2 = delta.coords().to_vec();
    beta2[s_r] = linalg::cadd(beta2[s_r], 1)?;
    let beta2 = RootVector::new(beta2)?;
    let mut beta3 = delta
        .coords()
        .iter()
        .map(|&c| linalg::cmul(3, c))
        .collect::<Result<Vec<_>>>()?;
    beta3[s_r] = linalg::cadd(beta3[s_r], -1)?;
    let beta3 = RootVector::new(beta3)?;

    let betas = [beta1, beta2, beta3];
    verify_triple(diagram, &betas)?;
    let refls = [
        reflection_from_root(diagram, &betas[0])?,
        reflection_from_root(diagram, &betas[1])?,
        reflection_from_root(diagram, &betas[2])?,
    ];
    let m_bound = refls
        .iter()
        .map(|t| length_and_word(diagram, t).map(|(l, _)| l))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .expect("three reflections");

    let emb = W3Embedding {
        betas,
        refls,
        m_bound,
        free_checked_depth: 0,
        provenance: Provenance::Constructed { j, z, y, p, path, delta },
    };
    let depth = certify_freeness(&emb, DEFAULT_FREE_CHECK_DEPTH)?;
    Ok(W3Embedding { free_checked_depth: depth, ..emb })
}

/// The in-group variant: J is taken to be an affine subdiagram of the
/// whole (indefinite) diagram, certifying that W itself contains a
/// universal reflection subgroup.
pub fn construct_w3_in_group(diagram: &Diagram) -> Result<W3Embedding> {
    if !diagram.is_connected() {
        return Err(Error::Precondition("diagram must be connected".into()));
    }
    if diagram.classify()? != DiagramClass::Indefinite {
        return Err(Error::Precondition(format!(
            "diagram must be indefinite, got {}",
            diagram.classify()?
        )));
    }
    let all: Vec<usize> = (0..diagram.n()).collect();
    let y = diagram
        .find_affine_subdiagram(&all)?
        .ok_or_else(|| Error::Internal("indefinite diagram without affine subdiagram".into()))?;
    construct_w3_embedding(diagram, &y)
}

fn verify_triple(diagram: &Diagram, betas: &[RootVector; 3]) -> Result<()> {
    for (i, beta) in betas.iter().enumerate() {
        if !beta.is_positive() {
            return Err(Error::Internal(format!("beta_{} is not positive", i + 1)));
        }
        let norm = pairing2(diagram, beta, beta)?;
        if norm != 2 {
            return Err(Error::Internal(format!(
                "beta_{} has pairing2 norm {norm}, expected 2",
                i + 1
            )));
        }
        if descend_to_simple(diagram, beta)?.is_none() {
            return Err(Error::Internal(format!(
                "beta_{} does not descend to a simple root",
                i + 1
            )));
        }
    }
    for i in 0..3 {
        for k in i + 1..3 {
            let v = pairing2(diagram, &betas[i], &betas[k])?;
            if v > -2 {
                return Err(Error::Internal(format!(
                    "pairing2(beta_{}, beta_{}) = {v}, expected <= -2",
                    i + 1,
                    k + 1
                )));
            }
        }
    }
    let v23 = pairing2(diagram, &betas[1], &betas[2])?;
    if v23 != -2 {
        return Err(Error::Internal(format!(
            "pairing2(beta_2, beta_3) = {v23}, expected exactly -2"
        )));
    }
    // Linear independence over the rationals.
    let n = diagram.n();
    let mut flat = vec![0i128; n * 3];
    for (col, beta) in betas.iter().enumerate() {
        for (row, &c) in beta.coords().iter().enumerate() {
            flat[row * 3 + col] = c;
        }
    }
    if linalg::rank(n, 3, &flat) != 3 {
        return Err(Error::Internal("betas are linearly dependent".into()));
    }
    if !verify_dyer_criterion(diagram, betas.as_slice())? {
        return Err(Error::Internal("betas fail the Dyer criterion".into()));
    }
    Ok(())
}

/// Evaluate all words without two equal consecutive letters in the three
/// generator reflections, up to length `l`, and report whether all
/// 3*2^l - 2 evaluations (identity included) are pairwise distinct.
pub fn free_product_check(emb: &W3Embedding, l: usize) -> Result<bool> {
    if l < 1 {
        return Err(Error::Precondition("free_product_check: depth must be >= 1".into()));
    }
    let n = emb.refls[0].n();
    let mut seen: FxHashSet<Vec<i128>> = FxHashSet::default();
    seen.insert(Element::identity(n).matrix().to_vec());
    // (product, last letter, depth)
    let mut stack: Vec<(Element, usize, usize)> = Vec::new();
    for letter in (0..3).rev() {
        stack.push((emb.refls[letter].clone(), letter, 1));
    }
    while let Some((product, last, depth)) = stack.pop() {
        if !seen.insert(product.matrix().to_vec()) {
            return Ok(false);
        }
        if depth < l {
            for letter in (0..3).rev() {
                if letter != last {
                    let next = elements::multiply(&product, &emb.refls[letter])?;
                    stack.push((next, letter, depth + 1));
                }
            }
        }
    }
    debug_assert_eq!(seen.len(), 3 * (1usize << l) - 2);
    Ok(true)
}

/// Run `free_product_check` to depth `l` and return the certified depth,
/// failing loudly if a relation shows up.
fn certify_freeness(emb: &W3Embedding, l: usize) -> Result<usize> {
    if free_product_check(emb, l)? {
        Ok(l)
    } else {
        Err(Error::Falsification(
            "generator triple admits a relation within the checked depth".into(),
        ))
    }
}

/// One reflection in the orbit of s_{beta_1} under conjugation by minimal
/// coset representatives.
#[derive(Debug, Clone)]
pub struct OrbitReflection {
    /// The conjugator sigma as letters into the generator triple.
    pub word: Vec<usize>,
    /// S'-length of sigma.
    pub level: usize,
    /// t = sigma s_{beta_1} sigma^{-1}.
    pub element: Element,
    /// beta_t = sigma(beta_1), the positive root of t.
    pub root: RootVector,
    /// l_{S'}(t) <= 2*level + 1.
    pub sprime_length_bound: usize,
}

/// Enumerate the orbit reflections sigma s_{beta_1} sigma^{-1} for all
/// sigma of S'-length j <= k that are reduced on the right with respect to
/// {s_{beta_1}} (words not ending in letter 0): exactly 2^j words per
/// level j >= 1 and one at level 0. Distinctness of the reflections and of
/// their roots is checked, not assumed.
pub fn orbit_reflections(emb: &W3Embedding, k: usize) -> Result<Vec<OrbitReflection>> {
    if emb.free_checked_depth < k + 1 && !free_product_check(emb, k + 1)? {
        return Err(Error::FreenessUnverified { needed: k + 1 });
    }
    let n = emb.refls[0].n();
    let mut out = Vec::new();
    let mut elements_seen: FxHashSet<Vec<i128>> = FxHashSet::default();
    let mut roots_seen: FxHashSet<RootVector> = FxHashSet::default();
    let mut per_level: Vec<usize> = vec![0; k + 1];
    // DFS over alternating words, carrying sigma and its inverse.
    let mut stack: Vec<(Vec<usize>, Element, Element)> = Vec::new();
    stack.push((Vec::new(), Element::identity(n), Element::identity(n)));
    while let Some((word, sigma, sigma_inv)) = stack.pop() {
        let level = word.len();
        // Words ending in letter 0 are not reduced on the right w.r.t.
        // {s_{beta_1}}; they still extend to words that are.
        if word.last() != Some(&0) {
            let t = elements::multiply(&elements::multiply(&sigma, &emb.refls[0])?, &sigma_inv)?;
            let root = sigma.apply(&emb.betas[0])?;
            if !root.is_positive() {
                return Err(Error::Falsification(format!(
                    "orbit root of sigma = {word:?} is not positive"
                )));
            }
            if t.apply(&root)? != root.negated() {
                return Err(Error::Falsification(format!(
                    "orbit element of sigma = {word:?} does not negate its root"
                )));
            }
            if !elements_seen.insert(t.matrix().to_vec()) || !roots_seen.insert(root.clone()) {
                return Err(Error::Falsification(format!(
                    "orbit collision at sigma = {word:?}: contradicts the free product"
                )));
            }
            per_level[level] += 1;
            out.push(OrbitReflection {
                level,
                sprime_length_bound: 2 * level + 1,
                element: t,
                root,
                word: word.clone(),
            });
        }
        if level < k {
            for letter in (0..3).rev() {
                if word.last() != Some(&letter) {
                    let mut w2 = word.clone();
                    w2.push(letter);
                    let sigma2 = elements::multiply(&sigma, &emb.refls[letter])?;
                    let sigma2_inv = elements::multiply(&emb.refls[letter], &sigma_inv)?;
                    stack.push((w2, sigma2, sigma2_inv));
                }
            }
        }
    }
    for (j, &count) in per_level.iter().enumerate() {
        let expected = if j == 0 { 1 } else { 1usize << j };
        if count != expected {
            return Err(Error::Internal(format!(
                "orbit level {j} produced {count} words, expected {expected}"
            )));
        }
    }
    out.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| a.word.cmp(&b.word)));
    Ok(out)
}

/// Exactly solve beta_t = c_1 beta_1 + c_2 beta_2 + c_3 beta_3 for an
/// orbit root; the betas are linearly independent so the solution is
/// unique.
pub fn orbit_root_coefficients(emb: &W3Embedding, root: &RootVector) -> Result<[i128; 3]> {
    let n = root.len();
    let mut flat = vec![0i128; n * 3];
    for (col, beta) in emb.betas.iter().enumerate() {
        for (row, &c) in beta.coords().iter().enumerate() {
            flat[row * 3 + col] = c;
        }
    }
    match linalg::solve(n, 3, &flat, root.coords()) {
        linalg::Solve::Unique(x) => {
            let mut out = [0i128; 3];
            for (slot, v) in x.iter().enumerate() {
                if !v.is_integer() {
                    return Err(Error::Falsification(format!(
                        "orbit root has non-integer coefficient c_{}",
                        slot + 1
                    )));
                }
                out[slot] = linalg::bigint_to_i128(v.numer())?;
            }
            Ok(out)
        }
        linalg::Solve::Inconsistent => Err(Error::Internal(
            "orbit root lies outside the span of the betas".into(),
        )),
        linalg::Solve::Underdetermined => {
            Err(Error::Internal("betas are linearly dependent".into()))
        }
    }
}

/// True iff for every orbit root at levels <= k the coefficient vector in
/// the beta basis is nonnegative integral with c_1 > 0.
pub fn check_c1_positive(emb: &W3Embedding, k: usize) -> Result<bool> {
    for orbit in orbit_reflections(emb, k)? {
        let c = orbit_root_coefficients(emb, &orbit.root)?;
        if c[0] < 1 || c.iter().any(|&x| x < 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per-level summary of the main-proposition witness.
#[derive(Debug, Clone)]
pub struct MainPropLevel {
    pub k: usize,
    /// Reflections accumulated through level k.
    pub count: BigUint,
    /// 2^k.
    pub required: BigUint,
    /// M(2k+1).
    pub length_bound: usize,
    pub max_length: usize,
    pub lengths_ok: bool,
    /// Every orbit root has e_p > 0.
    pub coefficient_ok: bool,
    /// Every orbit reflection has a nonidentity coset representative.
    pub coset_ok: bool,
    pub count_ok: bool,
}

impl MainPropLevel {
    pub fn ok(&self) -> bool {
        self.lengths_ok && self.coefficient_ok && self.coset_ok && self.count_ok
    }
}

/// Witness report: at least 2^k reflections outside W_J of length at most
/// M(2k+1), membership decided by two independent routes that must agree.
#[derive(Debug, Clone)]
pub struct MainPropReport {
    pub m_bound: usize,
    pub p: usize,
    pub per_k: Vec<MainPropLevel>,
    pub ok: bool,
    pub witness: Option<String>,
}

impl MainPropReport {
    pub fn to_json(&self, diagram: &Diagram) -> serde_json::Value {
        serde_json::json!({
            "M": self.m_bound,
            "p": diagram.node_name(self.p),
            "ok": self.ok,
            "witness": self.witness,
            "per_k": self.per_k.iter().map(|l| serde_json::json!({
                "k": l.k,
                "count": l.count.to_string(),
                "required": l.required.to_string(),
                "length_bound": l.length_bound,
                "max_length": l.max_length,
                "lengths_ok": l.lengths_ok,
                "coefficient_test_ok": l.coefficient_ok,
                "coset_test_ok": l.coset_ok,
                "count_ok": l.count_ok,
            })).collect::<Vec<_>>(),
        })
    }
}

fn embedding_for(diagram: &Diagram, j: &[usize]) -> Result<W3Embedding> {
    let j = crate::diagram::normalize_subset(j);
    if j.is_empty() {
        // W_J trivial: certify inside W itself; every nonidentity element
        // avoids the empty parabolic.
        construct_w3_in_group(diagram)
    } else {
        construct_w3_embedding(diagram, &j)
    }
}

pub(crate) fn mainprop_with_embedding(
    diagram: &Diagram,
    j: &[usize],
    k_max: usize,
) -> Result<(W3Embedding, Vec<OrbitReflection>, MainPropReport)> {
    let j = crate::diagram::normalize_subset(j);
    let emb = embedding_for(diagram, &j)?;
    let p = emb.outside_node().ok_or_else(|| {
        Error::Internal("constructed embedding is missing its outside node".into())
    })?;
    if j.contains(&p) {
        return Err(Error::Internal("outside node p lies in J".into()));
    }
    let orbit = orbit_reflections(&emb, k_max)?;
    let m = emb.m_bound;

    let mut lengths: Vec<usize> = Vec::with_capacity(orbit.len());
    let mut coeff_ok: Vec<bool> = Vec::with_capacity(orbit.len());
    let mut coset_ok: Vec<bool> = Vec::with_capacity(orbit.len());
    let mut witness = None;
    for refl in &orbit {
        // Genuine reflection whose root matches the orbit root.
        let recovered = root_from_reflection(diagram, &refl.element)?;
        if recovered != refl.root {
            return Err(Error::Falsification(format!(
                "orbit reflection at sigma = {:?} has root {:?}, expected {:?}",
                refl.word,
                recovered.coords(),
                refl.root.coords()
            )));
        }
        let (len, _) = length_and_word(diagram, &refl.element)?;
        if len > m * refl.sprime_length_bound {
            return Err(Error::Falsification(format!(
                "l(t) = {len} exceeds M * l_S'(t) = {} at sigma = {:?}",
                m * refl.sprime_length_bound,
                refl.word
            )));
        }
        lengths.push(len);

        let e_p = refl.root.coords()[p];
        let rep = min_coset_rep(diagram, &refl.element, &j)?;
        let outside_by_coeff = e_p > 0;
        let outside_by_coset = !rep.is_identity();
        if outside_by_coeff != outside_by_coset {
            return Err(Error::Falsification(format!(
                "membership tests disagree at sigma = {:?}: e_p = {e_p}, rep identity = {}",
                refl.word,
                rep.is_identity()
            )));
        }
        coeff_ok.push(outside_by_coeff);
        coset_ok.push(outside_by_coset);
        if !outside_by_coeff && witness.is_none() {
            witness = Some(format!(
                "orbit reflection at sigma = {:?} fell into W_J (e_p = {e_p})",
                refl.word
            ));
        }
    }

    let mut per_k = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let idx: Vec<usize> =
            (0..orbit.len()).filter(|&i| orbit[i].level <= k).collect();
        let count = BigUint::from(idx.len());
        let required = growth::biguint_pow2(k);
        let length_bound = m * (2 * k + 1);
        let max_length = idx.iter().map(|&i| lengths[i]).max().unwrap_or(0);
        let level = MainPropLevel {
            k,
            count_ok: count >= required,
            lengths_ok: max_length <= length_bound,
            coefficient_ok: idx.iter().all(|&i| coeff_ok[i]),
            coset_ok: idx.iter().all(|&i| coset_ok[i]),
            count,
            required,
            length_bound,
            max_length,
        };
        per_k.push(level);
    }
    let ok = per_k.iter().all(MainPropLevel::ok);
    let report = MainPropReport {
        m_bound: m,
        p,
        per_k,
        ok,
        witness: if ok { None } else { witness },
    };
    Ok((emb, orbit, report))
}

/// Verify the 2^k-reflections witness for W_J: counts, length bounds, and
/// both membership tests on every orbit reflection.
pub fn verify_mainprop(diagram: &Diagram, j: &[usize], k_max: usize) -> Result<MainPropReport> {
    mainprop_with_embedding(diagram, j, k_max).map(|(_, _, report)| report)
}

/// Per-level summary of the quotient witness.
#[derive(Debug, Clone)]
pub struct QuotientLevel {
    pub k: usize,
    pub distinct_reps: BigUint,
    pub required: BigUint,
    pub length_bound: usize,
    /// l(\[t\]) <= l(t) held for every reflection through this level.
    pub rep_lengths_ok: bool,
    pub ok: bool,
}

/// One comparison of the certified bound against an independent BFS table.
#[derive(Debug, Clone)]
pub struct CrossCheckEntry {
    pub k: usize,
    pub length: usize,
    pub gamma: BigUint,
    pub required: BigUint,
    pub ok: bool,
}

/// Certified exponential-growth witness for W^J, plus an independent BFS
/// cross-check wherever its depth reaches M(2k+1).
#[derive(Debug, Clone)]
pub struct QuotientExpReport {
    pub mainprop: MainPropReport,
    pub per_k: Vec<QuotientLevel>,
    pub m_bound: usize,
    /// Decimal rendering of the certified rate bound 2^(1/(3M)).
    pub rate_bound_decimal: String,
    pub cross_checks: Vec<CrossCheckEntry>,
    pub bfs_depth: usize,
    pub ok: bool,
}

impl QuotientExpReport {
    pub fn to_json(&self, diagram: &Diagram) -> serde_json::Value {
        let cross: Vec<serde_json::Value> = self
            .cross_checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "k": c.k,
                    "length": c.length,
                    "gamma": c.gamma.to_string(),
                    "required": c.required.to_string(),
                    "ok": c.ok,
                })
            })
            .collect();
        serde_json::json!({
            "mainprop": self.mainprop.to_json(diagram),
            "M": self.m_bound,
            "rate_bound": format!("2^(1/(3*{})) > 1", self.m_bound),
            "rate_bound_decimal": self.rate_bound_decimal,
            "ok": self.ok,
            "per_k": self.per_k.iter().map(|l| serde_json::json!({
                "k": l.k,
                "distinct_coset_reps": l.distinct_reps.to_string(),
                "required": l.required.to_string(),
                "length_bound": l.length_bound,
                "rep_lengths_ok": l.rep_lengths_ok,
                "ok": l.ok,
            })).collect::<Vec<_>>(),
            "bfs_cross_check": { "bfs_depth": self.bfs_depth, "entries": cross },
        })
    }
}

/// Decimal rendering (six places, truncated) of 2^(1/q).
pub(crate) fn two_to_inverse_decimal(q: usize) -> String {
    // floor(10^6 * 2^(1/q)) = floor((2 * 10^(6q))^(1/q))
    let scaled = BigUint::from(2u32) * BigUint::from(10u32).pow(6 * q as u32);
    let root = num_integer::Roots::nth_root(&scaled, q as u32);
    let million = BigUint::from(1_000_000u32);
    let int_part = &root / &million;
    let frac = (&root % &million).to_u64().unwrap_or(0);
    format!("{int_part}.{frac:06}")
}

/// Map every orbit reflection to its minimal coset representative, verify
/// pairwise distinctness (Deodhar) and the length inequality, and emit the
/// certified bound gamma_{W^J}(M(2k+1)) >= 2^k together with the rate
/// bound 2^(1/(3M)). The quotient's own BFS table cross-checks the bound
/// wherever its depth permits.
pub fn verify_quotient_exponential(
    diagram: &Diagram,
    j: &[usize],
    k_max: usize,
    bfs_max_len: usize,
    bfs_cap: usize,
) -> Result<QuotientExpReport> {
    let j = crate::diagram::normalize_subset(j);
    let (_emb, orbit, mainprop) = mainprop_with_embedding(diagram, &j, k_max)?;
    let m = mainprop.m_bound;
    if !mainprop.ok {
        return Ok(QuotientExpReport {
            rate_bound_decimal: two_to_inverse_decimal(3 * m),
            m_bound: m,
            mainprop,
            per_k: Vec::new(),
            cross_checks: Vec::new(),
            bfs_depth: 0,
            ok: false,
        });
    }

    let ts: Vec<Element> = orbit.iter().map(|o| o.element.clone()).collect();
    if !j.is_empty() {
        let distinct = distinct_cosets(diagram, &ts, &j)?;
        if !distinct.distinct {
            let (a, b) = distinct.collision.expect("collision recorded");
            return Err(Error::Falsification(format!(
                "orbit reflections {:?} and {:?} share a coset of W_J: contradicts Deodhar",
                orbit[a].word, orbit[b].word
            )));
        }
    }

    let mut rep_lengths_ok = Vec::with_capacity(orbit.len());
    let mut reps: FxHashSet<Vec<i128>> = FxHashSet::default();
    for refl in &orbit {
        let rep = min_coset_rep(diagram, &refl.element, &j)?;
        let l_t = length_and_word(diagram, &refl.element)?.0;
        let l_rep = length_and_word(diagram, &rep)?.0;
        rep_lengths_ok.push(l_rep <= l_t);
        reps.insert(rep.matrix().to_vec());
    }
    if reps.len() != orbit.len() {
        return Err(Error::Falsification(
            "coset representatives collided: contradicts Deodhar".into(),
        ));
    }

    let mut per_k = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let idx: Vec<usize> = (0..orbit.len()).filter(|&i| orbit[i].level <= k).collect();
        let distinct_reps = BigUint::from(idx.len());
        let required = growth::biguint_pow2(k);
        let lengths_ok = idx.iter().all(|&i| rep_lengths_ok[i]);
        per_k.push(QuotientLevel {
            k,
            ok: distinct_reps >= required && lengths_ok,
            distinct_reps,
            required,
            length_bound: m * (2 * k + 1),
            rep_lengths_ok: lengths_ok,
        });
    }

    let table = quotient_growth_parabolic(diagram, &j, bfs_max_len, bfs_cap)?;
    let bfs_depth = table.k_max();
    let mut cross_checks = Vec::new();
    for k in 0..=k_max {
        let length = m * (2 * k + 1);
        if length <= bfs_depth {
            let gamma = table.gamma(length).clone();
            let required = growth::biguint_pow2(k);
            cross_checks.push(CrossCheckEntry {
                k,
                length,
                ok: gamma >= required,
                gamma,
                required,
            });
        }
    }

    let ok = per_k.iter().all(|l| l.ok) && cross_checks.iter().all(|c| c.ok);
    Ok(QuotientExpReport {
        rate_bound_decimal: two_to_inverse_decimal(3 * m),
        m_bound: m,
        mainprop,
        per_k,
        cross_checks,
        bfs_depth,
        ok,
    })
}
