//! Vectors in the geometric representation: the doubled bilinear form,
//! reflections of vectors, root membership, and enumeration of positive
//! roots by depth.

use rustc_hash::FxHashSet;
use serde::ser::SerializeSeq;

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::linalg;

/// Integer coordinate vector over the simple-root basis. Always nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVector {
    coords: Vec<i128>,
}

impl RootVector {
    pub fn new(coords: Vec<i128>) -> Result<Self> {
        if coords.iter().all(|&c| c == 0) {
            return Err(Error::Precondition("zero vector is not a RootVector".into()));
        }
        Ok(RootVector { coords })
    }

    /// The simple root alpha_s in an n-dimensional root space.
    pub fn simple(n: usize, s: usize) -> Self {
        let mut coords = vec![0; n];
        coords[s] = 1;
        RootVector { coords }
    }

    pub fn coords(&self) -> &[i128] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// True iff all coordinates are >= 0 (the vector is nonzero by construction).
    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0)
    }

    pub fn is_negative(&self) -> bool {
        self.coords.iter().all(|&c| c <= 0)
    }

    pub fn negated(&self) -> Self {
        RootVector { coords: self.coords.iter().map(|&c| -c).collect() }
    }
}

impl serde::Serialize for RootVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coords.len()))?;
        for &c in &self.coords {
            let small = i64::try_from(c).map_err(|_| {
                serde::ser::Error::custom("root coordinate exceeds i64 range for serialization")
            })?;
            seq.serialize_element(&small)?;
        }
        seq.end()
    }
}

/// The doubled bilinear form 2(x, y) read off the diagram's Gram matrix.
pub fn pairing2(diagram: &Diagram, x: &RootVector, y: &RootVector) -> Result<i128> {
    let n = diagram.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    linalg::bilinear(n, &diagram.gram2(), x.coords(), y.coords())
}

/// Reflect `v` in the hyperplane of the unit root `beta`:
/// v - 2(v, beta) beta. Only unit roots (pairing2(beta, beta) = 2) are
/// admissible reflection roots.
pub fn reflect_vector(diagram: &Diagram, beta: &RootVector, v: &RootVector) -> Result<RootVector> {
    if pairing2(diagram, beta, beta)? != 2 {
        return Err(Error::NotUnitRoot(format!(
            "reflection root must satisfy pairing2(beta, beta) = 2, got {}",
            pairing2(diagram, beta, beta)?
        )));
    }
    let coeff = pairing2(diagram, v, beta)?;
    let coords = v
        .coords()
        .iter()
        .zip(beta.coords())
        .map(|(&vc, &bc)| linalg::cadd(vc, -linalg::cmul(coeff, bc)?))
        .collect::<Result<Vec<_>>>()?;
    RootVector::new(coords)
}

/// Coordinate sum of a positive root.
pub fn height(beta: &RootVector) -> Result<i128> {
    if !beta.is_positive() {
        return Err(Error::Precondition("height: root has a negative coordinate".into()));
    }
    beta.coords().iter().try_fold(0i128, |acc, &c| linalg::cadd(acc, c))
}

/// Positive roots grouped by depth: `layers[d]` holds the roots of depth
/// d + 1, each layer sorted. Depth 1 is exactly the simple roots, and depth
/// d + 1 roots arise from depth <= d roots by one simple reflection.
#[derive(Debug, Clone)]
pub struct RootsByDepth {
    pub layers: Vec<Vec<RootVector>>,
    pub truncated: bool,
}

impl RootsByDepth {
    /// Roots of the given depth (1-based). Empty slice past the last layer.
    pub fn depth(&self, d: usize) -> &[RootVector] {
        if d == 0 || d > self.layers.len() {
            &[]
        } else {
            &self.layers[d - 1]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &RootVector)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(i, layer)| layer.iter().map(move |r| (i + 1, r)))
    }

    pub fn total(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

/// Enumerate positive roots of depth at most `d_max` by layered expansion
/// from the simple roots. Stops early (flagging truncation and keeping only
/// complete layers) once more than `cap` roots have been collected.
pub fn positive_roots_by_depth(diagram: &Diagram, d_max: usize, cap: usize) -> Result<RootsByDepth> {
    if d_max < 1 {
        return Err(Error::Precondition("positive_roots_by_depth: d_max must be >= 1".into()));
    }
    let n = diagram.n();
    let simples: Vec<RootVector> = (0..n).map(|s| RootVector::simple(n, s)).collect();
    let mut seen: FxHashSet<RootVector> = simples.iter().cloned().collect();
    let mut layers = vec![simples.clone()];
    let mut truncated = false;
    'depths: for _ in 1..d_max {
        let prev = layers.last().unwrap();
        let mut next = Vec::new();
        for root in prev {
            for alpha in &simples {
                let image = reflect_vector(diagram, alpha, root)?;
                if image.is_positive() && !seen.contains(&image) {
                    if seen.len() >= cap {
                        truncated = true;
                        break 'depths;
                    }
                    seen.insert(image.clone());
                    next.push(image);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        layers.push(next);
    }
    Ok(RootsByDepth { layers, truncated })
}

/// Walk a positive vector down to a simple root by simple reflections that
/// strictly decrease height. Returns the reflection word applied (first
/// applied first) and the index of the simple root reached, or `None` when
/// the vector is not a positive root of W.
pub fn descend_to_simple(diagram: &Diagram, beta: &RootVector) -> Result<Option<(Vec<usize>, usize)>> {
    let n = diagram.n();
    if beta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: beta.len() });
    }
    if !beta.is_positive() {
        return Ok(None);
    }
    let alpha: Vec<RootVector> = (0..n).map(|s| RootVector::simple(n, s)).collect();
    let mut current = beta.clone();
    let mut word = Vec::new();
    loop {
        if let Some(s) = as_simple(&current) {
            return Ok(Some((word, s)));
        }
        let descent = (0..n)
            .find_map(|s| match pairing2(diagram, &current, &alpha[s]) {
                Ok(v) if v > 0 => Some(Ok(s)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
            .transpose()?;
        let Some(s) = descent else {
            // No simple root pairs positively, so (beta, beta) <= 0: not a root.
            return Ok(None);
        };
        current = reflect_vector(diagram, &alpha[s], &current)?;
        if !current.is_positive() {
            return Ok(None);
        }
        word.push(s);
    }
}

fn as_simple(v: &RootVector) -> Option<usize> {
    let mut found = None;
    for (i, &c) in v.coords().iter().enumerate() {
        match c {
            0 => {}
            1 if found.is_none() => found = Some(i),
            _ => return None,
        }
    }
    found
}

/// True iff `beta` is a positive root of W with pairing2(beta, beta) = 2.
pub fn is_unit_positive_root(diagram: &Diagram, beta: &RootVector) -> Result<bool> {
    Ok(beta.is_positive()
        && pairing2(diagram, beta, beta)? == 2
        && descend_to_simple(diagram, beta)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::EdgeLabel;

    fn a2() -> Diagram {
        Diagram::type_a(2)
    }

    #[test]
    fn pairing_values() {
        let d = a2();
        let a = RootVector::simple(2, 0);
        let b = RootVector::simple(2, 1);
        assert_eq!(pairing2(&d, &a, &b).unwrap(), -1);
        assert_eq!(pairing2(&d, &a, &a).unwrap(), 2);
        assert_eq!(pairing2(&d, &b, &b).unwrap(), 2);
    }

    #[test]
    fn pairing_length_mismatch() {
        let d = a2();
        let long = RootVector::new(vec![1, 0, 0]).unwrap();
        assert!(pairing2(&d, &long, &long).is_err());
    }

    #[test]
    fn null_root_orthogonal_to_affine_simples() {
        let d4 = Diagram::star(4);
        let delta = d4.null_root(&[0, 1, 2, 3, 4]).unwrap();
        for q in 0..5 {
            let alpha = RootVector::simple(5, q);
            assert_eq!(pairing2(&d4, &delta, &alpha).unwrap(), 0);
        }
    }

    #[test]
    fn reflection_basics() {
        let d = a2();
        let a1 = RootVector::simple(2, 0);
        let a2v = RootVector::simple(2, 1);
        assert_eq!(reflect_vector(&d, &a1, &a1).unwrap(), a1.negated());
        let sum = reflect_vector(&d, &a1, &a2v).unwrap();
        assert_eq!(sum.coords(), &[1, 1]);
        // Orthogonal vectors are fixed.
        let disconnected = Diagram::new(vec!["a", "b"], vec![]).unwrap();
        let fixed = reflect_vector(&disconnected, &a1, &a2v).unwrap();
        assert_eq!(fixed, a2v);
    }

    #[test]
    fn reflection_rejects_non_unit() {
        let tri = Diagram::cycle(3);
        let delta = tri.null_root(&[0, 1, 2]).unwrap();
        let v = RootVector::simple(3, 0);
        assert!(matches!(reflect_vector(&tri, &delta, &v), Err(Error::NotUnitRoot(_))));
    }

    #[test]
    fn delta_fixed_by_affine_reflections() {
        let tri = Diagram::cycle(3);
        let delta = tri.null_root(&[0, 1, 2]).unwrap();
        for s in 0..3 {
            let alpha = RootVector::simple(3, s);
            assert_eq!(reflect_vector(&tri, &alpha, &delta).unwrap(), delta);
        }
    }

    #[test]
    fn heights() {
        let alpha = RootVector::simple(3, 1);
        assert_eq!(height(&alpha).unwrap(), 1);
        let highest = RootVector::new(vec![1, 1]).unwrap();
        assert_eq!(height(&highest).unwrap(), 2);
        // beta2 = alpha_c + delta in affine D4 has height 7.
        let beta2 = RootVector::new(vec![3, 1, 1, 1, 1]).unwrap();
        assert_eq!(height(&beta2).unwrap(), 7);
        let mixed = RootVector::new(vec![1, -1]).unwrap();
        assert!(height(&mixed).is_err());
    }

    #[test]
    fn positivity() {
        assert!(RootVector::simple(2, 0).is_positive());
        assert!(RootVector::simple(2, 0).negated().is_negative());
        let mixed = RootVector::new(vec![1, -1]).unwrap();
        assert!(!mixed.is_positive() && !mixed.is_negative());
        assert!(RootVector::new(vec![0, 0]).is_err());
    }

    #[test]
    fn depth_layers_a2() {
        let d = a2();
        let roots = positive_roots_by_depth(&d, 3, 1000).unwrap();
        assert_eq!(roots.depth(1), &[RootVector::simple(2, 0), RootVector::simple(2, 1)]);
        assert_eq!(roots.depth(2), &[RootVector::new(vec![1, 1]).unwrap()]);
        assert!(roots.depth(3).is_empty());
        assert_eq!(roots.total(), 3);
        assert!(!roots.truncated);
    }

    #[test]
    fn depth_count_affine_a2() {
        // Independent oracle: depth <= 3 positive roots are exactly the
        // positive vectors w(alpha_t) over words w of length <= 2.
        let tri = Diagram::cycle(3);
        let mut expected: FxHashSet<RootVector> = FxHashSet::default();
        let simples: Vec<RootVector> = (0..3).map(|s| RootVector::simple(3, s)).collect();
        for t in 0..3 {
            for w in words_up_to(3, 2) {
                let mut v = simples[t].clone();
                for &s in &w {
                    v = reflect_vector(&tri, &simples[s], &v).unwrap();
                }
                if v.is_positive() {
                    expected.insert(v);
                }
            }
        }
        assert_eq!(expected.len(), 9);

        let roots = positive_roots_by_depth(&tri, 3, 1000).unwrap();
        assert_eq!(roots.total(), 9);
        let got: FxHashSet<RootVector> = roots.iter().map(|(_, r)| r.clone()).collect();
        assert_eq!(got, expected);
    }

    fn words_up_to(letters: usize, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for s in 0..letters {
                    let mut w2 = w.clone();
                    w2.push(s);
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn depth_roots_are_unit() {
        for d in [Diagram::type_a(3), Diagram::cycle(3), Diagram::universal(3)] {
            let roots = positive_roots_by_depth(&d, 4, 100_000).unwrap();
            for (_, r) in roots.iter() {
                assert_eq!(pairing2(&d, r, r).unwrap(), 2);
            }
        }
    }

    #[test]
    fn truncation_flagged() {
        let w3 = Diagram::universal(3);
        let roots = positive_roots_by_depth(&w3, 30, 20).unwrap();
        assert!(roots.truncated);
        // Only complete layers are kept.
        for layer in &roots.layers {
            assert!(!layer.is_empty());
        }
    }

    #[test]
    fn descend_to_simple_finds_roots() {
        let d = a2();
        let highest = RootVector::new(vec![1, 1]).unwrap();
        let (word, s) = descend_to_simple(&d, &highest).unwrap().unwrap();
        assert_eq!(word.len(), 1);
        assert!(s < 2);
        // Non-roots are rejected.
        let not_root = RootVector::new(vec![2, 0]).unwrap();
        assert!(descend_to_simple(&d, &not_root).unwrap().is_none());
        let tri = Diagram::cycle(3);
        let delta = tri.null_root(&[0, 1, 2]).unwrap();
        assert!(descend_to_simple(&tri, &delta).unwrap().is_none());
    }

    #[test]
    fn reflect_preserves_pairing_randomized() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let d = Diagram::from_named_edges(
            vec!["a", "b", "c"],
            &[("a", "b", EdgeLabel::Three), ("b", "c", EdgeLabel::Infinite)],
        )
        .unwrap();
        let strategy = (
            proptest::collection::vec(-20i128..=20, 3),
            proptest::collection::vec(-20i128..=20, 3),
            0usize..3,
        );
        runner
            .run(&strategy, |(x, y, s)| {
                prop_assume!(x.iter().any(|&c| c != 0));
                prop_assume!(y.iter().any(|&c| c != 0));
                let x = RootVector::new(x).unwrap();
                let y = RootVector::new(y).unwrap();
                let beta = RootVector::simple(3, s);
                let rx = reflect_vector(&d, &beta, &x).unwrap();
                let ry = reflect_vector(&d, &beta, &y).unwrap();
                prop_assert_eq!(
                    pairing2(&d, &rx, &ry).unwrap(),
                    pairing2(&d, &x, &y).unwrap()
                );
                // Involutive.
                prop_assert_eq!(reflect_vector(&d, &beta, &rx).unwrap(), x);
                Ok(())
            })
            .unwrap();
    }
}
