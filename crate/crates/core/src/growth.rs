//! Exact growth tables by Cayley-graph breadth-first enumeration, quotient
//! growth, generating-series verification, and growth-rate witnesses.

use num_bigint::{BigInt, BigUint};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashSet;

use crate::diagram::{Diagram, DiagramClass};
use crate::elements::{self, Element};
use crate::error::{Error, Result};
use crate::linalg;

/// Exact per-length and cumulative element counts for a subset of W.
///
/// `counts[k]` is the number of new elements at length k; `cumulative[k]`
/// is gamma(k), the number of elements of length at most k. When
/// `truncated` is set the table is valid only through its last layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    counts: Vec<BigUint>,
    cumulative: Vec<BigUint>,
    truncated: bool,
}

impl GrowthTable {
    pub fn from_counts(counts: Vec<BigUint>, truncated: bool) -> Self {
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = BigUint::zero();
        for c in &counts {
            acc += c;
            cumulative.push(acc.clone());
        }
        GrowthTable { counts, cumulative, truncated }
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn cumulative(&self) -> &[BigUint] {
        &self.cumulative
    }

    /// Largest length the table covers.
    pub fn k_max(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn count(&self, k: usize) -> &BigUint {
        &self.counts[k]
    }

    /// gamma(k) for k within the table. Panics past `k_max`.
    pub fn gamma(&self, k: usize) -> &BigUint {
        &self.cumulative[k]
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Total elements seen (gamma at k_max).
    pub fn total(&self) -> &BigUint {
        self.cumulative.last().expect("table has at least length 0")
    }

    /// JSON export: {"counts": [...], "cumulative": [...], "truncated": bool}
    /// with counts as decimal strings so arbitrarily large values survive.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "counts": self.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "cumulative": self.cumulative.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "truncated": self.truncated,
        })
    }

    /// CSV export with header k,a_k,gamma_k.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a_k,gamma_k\n");
        for k in 0..self.counts.len() {
            out.push_str(&format!("{},{},{}\n", k, self.counts[k], self.cumulative[k]));
        }
        out
    }
}

fn check_generators(diagram: &Diagram, gens: &[Element]) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::Precondition("no generators supplied".into()));
    }
    let n = diagram.n();
    for (i, g) in gens.iter().enumerate() {
        if g.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.n() });
        }
        if g.is_identity() {
            return Err(Error::Precondition(format!("generator {i} is the identity")));
        }
        if !elements::multiply(g, g)?.is_identity() {
            return Err(Error::Precondition(format!("generator {i} is not an involution")));
        }
    }
    Ok(())
}

/// Layered breadth-first search over the group generated by `gens`,
/// deduplicating by matrix. `visit` sees every element once with its word
/// length; its return value decides whether the element is counted.
fn bfs_ball(
    diagram: &Diagram,
    gens: &[Element],
    max_len: usize,
    cap: usize,
    mut visit: impl FnMut(usize, &Element) -> Result<bool>,
) -> Result<(Vec<u64>, bool)> {
    check_generators(diagram, gens)?;
    if cap == 0 {
        return Err(Error::Precondition("cap must be positive".into()));
    }
    let n = diagram.n();
    let identity = Element::identity(n);
    let mut seen: FxHashSet<Vec<i128>> = FxHashSet::default();
    seen.insert(identity.matrix().to_vec());
    let mut counts: Vec<u64> = vec![if visit(0, &identity)? { 1 } else { 0 }];
    let mut frontier = vec![identity];
    let mut truncated = false;
    'layers: for k in 1..=max_len {
        let mut next = Vec::new();
        let mut retained = 0u64;
        for w in &frontier {
            for g in gens {
                // Raw product, skipping Element's word cache: BFS elements
                // would otherwise drag ever-longer words behind them.
                let mat = linalg::mat_mul(n, w.matrix(), g.matrix())?;
                if seen.contains(&mat) {
                    continue;
                }
                if seen.len() >= cap {
                    truncated = true;
                    break 'layers;
                }
                seen.insert(mat.clone());
                let m = Element::from_matrix(n, mat);
                if visit(k, &m)? {
                    retained += 1;
                }
                next.push(m);
            }
        }
        if next.is_empty() {
            break;
        }
        counts.push(retained);
        frontier = next;
    }
    Ok((counts, truncated))
}

/// Filtered variant for other modules: counts per layer only the elements
/// the filter accepts, while still exploring the whole ball.
pub(crate) fn bfs_ball_filtered(
    diagram: &Diagram,
    gens: &[Element],
    max_len: usize,
    cap: usize,
    mut filter: impl FnMut(usize, &Element) -> Result<bool>,
) -> Result<(Vec<u64>, bool)> {
    bfs_ball(diagram, gens, max_len, cap, |k, w| filter(k, w))
}

/// Growth table of the group generated by `gens` under word length in
/// `gens`. Layer counts are independent of generator order.
pub fn enumerate_ball(
    diagram: &Diagram,
    gens: &[Element],
    max_len: usize,
    cap: usize,
) -> Result<GrowthTable> {
    let (counts, truncated) = bfs_ball(diagram, gens, max_len, cap, |_, _| Ok(true))?;
    Ok(GrowthTable::from_counts(counts.into_iter().map(BigUint::from).collect(), truncated))
}

/// As `enumerate_ball`, but also returns the elements grouped by length,
/// each layer sorted by matrix contents.
pub fn enumerate_ball_elements(
    diagram: &Diagram,
    gens: &[Element],
    max_len: usize,
    cap: usize,
) -> Result<(GrowthTable, Vec<Vec<Element>>)> {
    let mut layers: Vec<Vec<Element>> = Vec::new();
    let (counts, truncated) = bfs_ball(diagram, gens, max_len, cap, |k, w| {
        if layers.len() <= k {
            layers.resize(k + 1, Vec::new());
        }
        layers[k].push(w.clone());
        Ok(true)
    })?;
    layers.truncate(counts.len());
    for layer in &mut layers {
        layer.sort_by(|a, b| a.matrix().cmp(b.matrix()));
    }
    let table =
        GrowthTable::from_counts(counts.into_iter().map(BigUint::from).collect(), truncated);
    Ok((table, layers))
}

/// Growth table of the minimal coset representatives W^J inside W, counted
/// by the length function of W. Enumerates the full group, retaining the
/// elements that send every alpha_s, s in J, to a positive root.
pub fn quotient_growth_parabolic(
    diagram: &Diagram,
    j: &[usize],
    max_len: usize,
    cap: usize,
) -> Result<GrowthTable> {
    let j = crate::diagram::normalize_subset(j);
    let n = diagram.n();
    if j.iter().any(|&s| s >= n) {
        return Err(Error::Precondition("J contains an out-of-range node".into()));
    }
    if j.len() == n {
        return Err(Error::Precondition("J must be a proper subset of the nodes".into()));
    }
    let gens = elements::standard_generators(diagram)?;
    let (counts, truncated) = bfs_ball(diagram, &gens, max_len, cap, |_, w| {
        Ok(j.iter().all(|&s| w.column(s).iter().all(|&c| c >= 0)))
    })?;
    Ok(retained_table(counts, truncated))
}

/// Table for a filtered (retained-subset) count: layers past the last
/// retained element carry no information, so trailing zeros are dropped.
pub(crate) fn retained_table(mut counts: Vec<u64>, truncated: bool) -> GrowthTable {
    while counts.len() > 1 && counts.last() == Some(&0) {
        counts.pop();
    }
    GrowthTable::from_counts(counts.into_iter().map(BigUint::from).collect(), truncated)
}

/// A rational lower bound for the exponential growth rate, with the k
/// attaining it.
#[derive(Debug, Clone)]
pub struct RateEstimate {
    pub value: BigRational,
    pub at_k: usize,
}

impl RateEstimate {
    /// Decimal rendering (six places, truncated).
    pub fn decimal(&self) -> String {
        rational_decimal(&self.value)
    }
}

pub(crate) fn rational_decimal(value: &BigRational) -> String {
    let million = BigInt::from(1_000_000u32);
    let scaled = (value * BigRational::from_integer(million.clone())).floor();
    let as_int = scaled.to_integer();
    let q = &as_int / &million;
    let r = (&as_int % &million).abs().to_u64().unwrap_or(0);
    format!("{q}.{r:06}")
}

/// max over k in [k_min, k_max] of gamma(k)^(1/k), computed to six decimal
/// places by exact integer k-th roots. A lower-bound proxy for the growth
/// rate omega, which is a limsup and not computable from a finite table.
pub fn growth_rate_lower_bound(table: &GrowthTable, k_min: usize) -> Result<RateEstimate> {
    if table.counts().is_empty() {
        return Err(Error::Precondition("empty growth table".into()));
    }
    let k_max = table.k_max();
    if k_min < 1 || k_min > k_max {
        return Err(Error::Precondition(format!(
            "k_min must lie in 1..={k_max}, got {k_min}"
        )));
    }
    let scale = BigUint::from(10u32).pow(6);
    let mut best: Option<(BigUint, usize)> = None;
    for k in k_min..=k_max {
        // floor(gamma(k)^(1/k) * 10^6) = floor((gamma(k) * 10^(6k))^(1/k))
        let scaled = table.gamma(k) * scale.pow(k as u32);
        let root = scaled.nth_root(k as u32);
        match &best {
            Some((b, _)) if *b >= root => {}
            _ => best = Some((root, k)),
        }
    }
    let (root, at_k) = best.expect("nonempty range");
    Ok(RateEstimate {
        value: BigRational::new(BigInt::from(root), BigInt::from(scale)),
        at_k,
    })
}

/// True iff gamma(k) >= lambda^k for every k the table covers.
pub fn exponential_witness(table: &GrowthTable, lambda: &BigRational) -> Result<bool> {
    if lambda <= &BigRational::one() {
        return Err(Error::Precondition("lambda must exceed 1".into()));
    }
    let num = lambda.numer();
    let den = lambda.denom();
    for k in 0..=table.k_max() {
        let lhs = BigInt::from(table.gamma(k).clone()) * den.pow(k as u32);
        let rhs = num.pow(k as u32);
        if lhs < rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of comparing a table against a rational generating function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCheck {
    pub matches: bool,
    /// First k where the expansion coefficient differs from gamma(k).
    pub first_mismatch: Option<usize>,
}

/// Exact comparison of the power-series expansion of num/den against the
/// cumulative counts gamma(k), for all k the table covers.
pub fn series_check(table: &GrowthTable, num: &[BigInt], den: &[BigInt]) -> Result<SeriesCheck> {
    let den0 = den.first().cloned().unwrap_or_else(BigInt::zero);
    if den0.is_zero() {
        return Err(Error::Precondition("denominator must not vanish at 0".into()));
    }
    let k_max = table.k_max();
    let mut coeffs: Vec<BigRational> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        // den_0 c_k = num_k - sum_{j=1..k} den_j c_{k-j}
        let mut acc = BigRational::from_integer(num.get(k).cloned().unwrap_or_else(BigInt::zero));
        for j in 1..=k.min(den.len().saturating_sub(1)) {
            acc -= BigRational::from_integer(den[j].clone()) * &coeffs[k - j];
        }
        coeffs.push(acc / BigRational::from_integer(den0.clone()));
    }
    for (k, coeff) in coeffs.iter().enumerate() {
        let gamma = BigRational::from_integer(BigInt::from(table.gamma(k).clone()));
        if coeff != &gamma {
            return Ok(SeriesCheck { matches: false, first_mismatch: Some(k) });
        }
    }
    Ok(SeriesCheck { matches: true, first_mismatch: None })
}

/// Exact length generating polynomial of a finite Coxeter group, by
/// complete enumeration. Every connected component must classify as
/// Finite; exceeding `cap` before the ball closes is an error.
pub fn poincare_polynomial_finite(diagram: &Diagram, cap: usize) -> Result<Vec<BigInt>> {
    for comp in diagram.connected_components() {
        if diagram.classify_subset(&comp)? != DiagramClass::Finite {
            return Err(Error::Precondition(format!(
                "component {:?} is not of finite type",
                comp.iter().map(|&i| diagram.node_name(i)).collect::<Vec<_>>()
            )));
        }
    }
    let gens = elements::standard_generators(diagram)?;
    let table = enumerate_ball(diagram, &gens, usize::MAX, cap)?;
    if table.truncated() {
        return Err(Error::CapExceeded { cap, msg: "group did not close within cap".into() });
    }
    Ok(table.counts().iter().map(|c| BigInt::from(c.clone())).collect())
}

/// Product of two integer polynomials (coefficient vectors, low degree first).
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Convenience for building small integer polynomials from i64 coefficients.
pub fn poly(coeffs: &[i64]) -> Vec<BigInt> {
    coeffs.iter().map(|&c| BigInt::from(c)).collect()
}

/// Check of the basic table invariants: gamma nondecreasing, gamma(0) = 1,
/// and 1 <= gamma(k) <= (#gens + 1)^k.
pub fn check_table_invariants(table: &GrowthTable, num_gens: usize) -> Result<()> {
    if table.gamma(0) != &BigUint::one() {
        return Err(Error::Internal("gamma(0) != 1".into()));
    }
    let base = BigUint::from(num_gens + 1);
    let mut prev = BigUint::zero();
    for k in 0..=table.k_max() {
        let g = table.gamma(k);
        if g < &prev {
            return Err(Error::Internal("gamma is decreasing".into()));
        }
        if g < &BigUint::one() || g > &base.pow(k as u32) {
            return Err(Error::Internal(format!("gamma({k}) outside [1, (#S+1)^k]")));
        }
        prev = g.clone();
    }
    Ok(())
}

/// Value of an integer polynomial at 1 (the group order for a Poincare
/// polynomial).
pub fn poly_value_at_one(p: &[BigInt]) -> BigInt {
    p.iter().sum()
}

pub(crate) fn biguint_pow2(k: usize) -> BigUint {
    BigUint::one() << k
}
