//! Coxeter diagrams with edge labels in {3, infinity} (an absent edge means
//! label 2), their doubled integral Gram form, and the exact
//! finite / affine / indefinite trichotomy for connected subdiagrams.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rootspace::RootVector;

/// Edge label of a Coxeter diagram. Pairs without an edge have label 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EdgeLabel {
    /// m = 3: single bond, doubled form value -1.
    Three,
    /// m = infinity: doubled form value -2.
    Infinite,
}

impl EdgeLabel {
    /// Doubled bilinear form value 2*(alpha_u, alpha_v) for this label.
    pub fn gram2_value(self) -> i128 {
        match self {
            EdgeLabel::Three => -1,
            EdgeLabel::Infinite => -2,
        }
    }
}

/// Type of a connected diagram: positive definite, positive semidefinite
/// with one-dimensional kernel, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DiagramClass {
    Finite,
    Affine,
    Indefinite,
}

impl fmt::Display for DiagramClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramClass::Finite => write!(f, "Finite"),
            DiagramClass::Affine => write!(f, "Affine"),
            DiagramClass::Indefinite => write!(f, "Indefinite"),
        }
    }
}

/// A labeled graph over named generator nodes. Node indices 0..n-1 follow
/// the order nodes first appear in the source.
#[derive(Debug, Clone)]
pub struct Diagram {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), EdgeLabel>,
}

impl Diagram {
    /// Build a diagram from named nodes and labeled edges.
    pub fn new<S: Into<String>>(nodes: Vec<S>, edges: Vec<(usize, usize, EdgeLabel)>) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, name) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Precondition(format!("duplicate node {name:?}")));
            }
        }
        let mut map = BTreeMap::new();
        for (u, v, m) in edges {
            if u >= nodes.len() || v >= nodes.len() {
                return Err(Error::Precondition(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop at node {:?}", nodes[u])));
            }
            let key = (u.min(v), u.max(v));
            if map.insert(key, m).is_some() {
                return Err(Error::Precondition(format!(
                    "edge {:?}-{:?} declared twice",
                    nodes[key.0], nodes[key.1]
                )));
            }
        }
        Ok(Diagram { nodes, index, edges: map })
    }

    /// Convenience constructor with edges given by node name.
    pub fn from_named_edges<S: Into<String>>(
        nodes: Vec<S>,
        edges: &[(&str, &str, EdgeLabel)],
    ) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let lookup: HashMap<&str, usize> =
            nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let resolved = edges
            .iter()
            .map(|&(u, v, m)| {
                let ui = *lookup
                    .get(u)
                    .ok_or_else(|| Error::Precondition(format!("unknown node {u:?}")))?;
                let vi = *lookup
                    .get(v)
                    .ok_or_else(|| Error::Precondition(format!("unknown node {v:?}")))?;
                Ok((ui, vi, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Diagram::new(nodes, resolved)
    }

    /// The path diagram A_n on nodes s1..sn, all labels 3.
    pub fn type_a(n: usize) -> Self {
        let nodes: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1, EdgeLabel::Three)).collect();
        Diagram::new(nodes, edges).expect("valid path diagram")
    }

    /// The cycle diagram (affine A_{n-1}) on n >= 3 nodes, all labels 3.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        let nodes: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
        let mut edges: Vec<(usize, usize, EdgeLabel)> =
            (0..n - 1).map(|i| (i, i + 1, EdgeLabel::Three)).collect();
        edges.push((n - 1, 0, EdgeLabel::Three));
        Diagram::new(nodes, edges).expect("valid cycle diagram")
    }

    /// Star with one center and `leaves` leaves, all labels 3.
    /// Four leaves give affine D4; five give the indefinite K_{1,5}.
    pub fn star(leaves: usize) -> Self {
        let mut nodes = vec!["c".to_string()];
        nodes.extend((1..=leaves).map(|i| format!("l{i}")));
        let edges = (1..=leaves).map(|i| (0, i, EdgeLabel::Three)).collect();
        Diagram::new(nodes, edges).expect("valid star diagram")
    }

    /// Complete graph on n nodes with every label infinite: the universal
    /// Coxeter group on n generators.
    pub fn universal(n: usize) -> Self {
        let nodes: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
        let edges = (0..n)
            .tuple_combinations()
            .map(|(i, j)| (i, j, EdgeLabel::Infinite))
            .collect();
        Diagram::new(nodes, edges).expect("valid universal diagram")
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Label of the pair {i, j}; `None` means label 2 (no edge).
    pub fn label(&self, i: usize, j: usize) -> Option<EdgeLabel> {
        if i == j {
            return None;
        }
        self.edges.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeLabel)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    /// Entry of the doubled Gram form: 2 on the diagonal, -1 for label 3,
    /// -2 for label infinity, 0 otherwise.
    pub fn gram2_entry(&self, i: usize, j: usize) -> i128 {
        if i == j {
            2
        } else {
            self.label(i, j).map_or(0, EdgeLabel::gram2_value)
        }
    }

    /// The full doubled Gram matrix, row-major n x n.
    pub fn gram2(&self) -> Vec<i128> {
        let n = self.n();
        let mut g = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self.gram2_entry(i, j);
            }
        }
        g
    }

    /// Doubled Gram matrix restricted to the subset `k` (in the given order).
    pub fn gram2_sub(&self, k: &[usize]) -> Vec<i128> {
        let m = k.len();
        let mut g = vec![0; m * m];
        for (a, &i) in k.iter().enumerate() {
            for (b, &j) in k.iter().enumerate() {
                g[a * m + b] = self.gram2_entry(i, j);
            }
        }
        g
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.label(i, j).is_some()).collect()
    }

    /// Connected components of the whole diagram, each sorted, ordered by
    /// smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        self.components_of(&(0..self.n()).collect::<Vec<_>>())
    }

    /// Connected components of the induced subdiagram on `subset`.
    pub fn components_of(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let subset = normalize_subset(subset);
        let mut seen: Vec<bool> = vec![false; self.n()];
        let in_subset: Vec<bool> = {
            let mut v = vec![false; self.n()];
            for &i in &subset {
                v[i] = true;
            }
            v
        };
        let mut components = Vec::new();
        for &start in &subset {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for v in self.neighbors(u) {
                    if in_subset[v] && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.connected_components().len() == 1
    }

    pub fn is_connected_subset(&self, subset: &[usize]) -> bool {
        !subset.is_empty() && self.components_of(subset).len() == 1
    }

    /// Classify the connected induced subdiagram on `k`.
    ///
    /// Finite iff the restricted doubled Gram form is positive definite
    /// (all leading principal minors positive); Affine iff it is singular
    /// with a strictly positive kernel vector (Perron-Frobenius: for a
    /// connected diagram this forces positive semidefinite with exactly
    /// one-dimensional kernel); Indefinite otherwise.
    pub fn classify_subset(&self, k: &[usize]) -> Result<DiagramClass> {
        let k = normalize_subset(k);
        if k.is_empty() {
            return Err(Error::Precondition("classify: empty node subset".into()));
        }
        if k.iter().any(|&i| i >= self.n()) {
            return Err(Error::Precondition("classify: node index out of range".into()));
        }
        if !self.is_connected_subset(&k) {
            return Err(Error::Precondition("classify: subdiagram is disconnected".into()));
        }
        let m = k.len();
        let g = self.gram2_sub(&k);
        classify_gram2_connected(m, &g)
    }

    /// Classify the whole diagram (must be connected).
    pub fn classify(&self) -> Result<DiagramClass> {
        self.classify_subset(&(0..self.n()).collect::<Vec<_>>())
    }

    /// Smallest connected affine subdiagram of the connected induced
    /// diagram on `k` (by cardinality, then lexicographically on sorted
    /// indices), or `None` when `k` is of finite type.
    pub fn find_affine_subdiagram(&self, k: &[usize]) -> Result<Option<Vec<usize>>> {
        let k = normalize_subset(k);
        if !self.is_connected_subset(&k) {
            return Err(Error::Precondition(
                "find_affine_subdiagram: subdiagram is disconnected or empty".into(),
            ));
        }
        for size in 2..=k.len() {
            for subset in k.iter().copied().combinations(size) {
                if !self.is_connected_subset(&subset) {
                    continue;
                }
                if self.classify_subset(&subset)? == DiagramClass::Affine {
                    return Ok(Some(subset));
                }
            }
        }
        Ok(None)
    }

    /// The primitive positive kernel vector of the Gram form restricted to
    /// the affine subset `y`, returned as a full-length vector supported
    /// on `y`. All coefficients are >= 1 and their gcd is 1.
    pub fn null_root(&self, y: &[usize]) -> Result<RootVector> {
        let y = normalize_subset(y);
        if self.classify_subset(&y)? != DiagramClass::Affine {
            return Err(Error::Precondition("null_root: subdiagram is not affine".into()));
        }
        let m = y.len();
        let g = self.gram2_sub(&y);
        let basis = linalg::kernel_basis(m, m, &g);
        if basis.len() != 1 {
            return Err(Error::Internal("affine Gram form with kernel dimension != 1".into()));
        }
        let mut local = linalg::primitive_integer(&basis[0])?;
        if local.iter().any(|&c| c < 0) {
            for c in &mut local {
                *c = -*c;
            }
        }
        if local.iter().any(|&c| c < 1) {
            return Err(Error::Internal("affine null root with a coefficient < 1".into()));
        }
        if linalg::gcd_i128(&local) != 1 {
            return Err(Error::Internal("affine null root is not primitive".into()));
        }
        let mut coords = vec![0i128; self.n()];
        for (slot, &node) in y.iter().enumerate() {
            coords[node] = local[slot];
        }
        RootVector::new(coords)
    }

    /// Shortest path from node `p` to the set `y`, as the node sequence
    /// s_0 = p, ..., s_r in y. Ties are broken by smallest node index at
    /// each BFS layer, so the result is deterministic.
    pub fn shortest_path(&self, p: usize, y: &[usize]) -> Result<Vec<usize>> {
        let y = normalize_subset(y);
        if y.is_empty() {
            return Err(Error::Precondition("shortest_path: target set is empty".into()));
        }
        if y.contains(&p) {
            return Err(Error::Precondition(format!(
                "shortest_path: source {:?} lies in the target set",
                self.node_name(p)
            )));
        }
        let in_y = {
            let mut v = vec![false; self.n()];
            for &i in &y {
                v[i] = true;
            }
            v
        };
        let mut parent: Vec<Option<usize>> = vec![None; self.n()];
        let mut seen = vec![false; self.n()];
        seen[p] = true;
        let mut frontier = vec![p];
        let mut hit: Option<usize> = None;
        'bfs: while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        parent[v] = Some(u);
                        next.push(v);
                    }
                }
            }
            next.sort_unstable();
            if let Some(&target) = next.iter().find(|&&v| in_y[v]) {
                hit = Some(target);
                break 'bfs;
            }
            frontier = next;
        }
        let Some(target) = hit else {
            return Err(Error::Precondition(format!(
                "shortest_path: node {:?} cannot reach the target set",
                self.node_name(p)
            )));
        };
        let mut path = vec![target];
        let mut cur = target;
        while let Some(par) = parent[cur] {
            path.push(par);
            cur = par;
        }
        path.reverse();
        self.check_path_postconditions(&path, &in_y)?;
        Ok(path)
    }

    /// Minimality of a shortest path forces these; violations would mean a
    /// broken search, so they are checked rather than assumed.
    fn check_path_postconditions(&self, path: &[usize], in_y: &[bool]) -> Result<()> {
        let r = path.len() - 1;
        let mut sorted = path.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != path.len() {
            return Err(Error::Internal("shortest_path: repeated node".into()));
        }
        if path[..r].iter().any(|&s| in_y[s]) {
            return Err(Error::Internal("shortest_path: interior node lies in target".into()));
        }
        for i in 0..=r {
            for j in i + 1..=r {
                let adjacent = self.label(path[i], path[j]).is_some();
                if j == i + 1 && !adjacent {
                    return Err(Error::Internal("shortest_path: consecutive nodes not adjacent".into()));
                }
                if j > i + 1 && adjacent {
                    return Err(Error::Internal("shortest_path: chord in shortest path".into()));
                }
            }
        }
        Ok(())
    }

    /// Parse a diagram from text or JSON source (JSON when the first
    /// non-whitespace character is '{').
    pub fn parse(source: &str) -> Result<Self> {
        if source.trim_start().starts_with('{') {
            Self::parse_json(source)
        } else {
            Self::parse_text(source)
        }
    }

    /// Text grammar: one edge per line as `u v m` with m in {3, inf};
    /// isolated nodes declared as `node u`. Blank lines and lines starting
    /// with '#' are skipped. Node order follows first appearance.
    fn parse_text(source: &str) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<(usize, usize, EdgeLabel)> = Vec::new();
        let intern = |name: &str, nodes: &mut Vec<String>, index: &mut HashMap<String, usize>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                nodes.push(name.to_string());
                nodes.len() - 1
            })
        };
        for (lineno, raw) in source.lines().enumerate() {
            let line = lineno + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = text.split_whitespace().collect();
            match parts.as_slice() {
                ["node", name] => {
                    if index.contains_key(*name) {
                        return Err(Error::Parse {
                            line,
                            msg: format!("duplicate node {name:?}"),
                        });
                    }
                    intern(name, &mut nodes, &mut index);
                }
                [u, v, m] => {
                    if u == v {
                        return Err(Error::Parse {
                            line,
                            msg: format!("self-loop at node {u:?}"),
                        });
                    }
                    let label = match *m {
                        "3" => EdgeLabel::Three,
                        "inf" | "\u{221e}" => EdgeLabel::Infinite,
                        other => {
                            return Err(Error::Parse {
                                line,
                                msg: format!("unknown label {other:?} (expected 3 or inf)"),
                            })
                        }
                    };
                    let ui = intern(u, &mut nodes, &mut index);
                    let vi = intern(v, &mut nodes, &mut index);
                    let key = (ui.min(vi), ui.max(vi));
                    if edges.iter().any(|&(a, b, _)| (a.min(b), a.max(b)) == key) {
                        return Err(Error::Parse {
                            line,
                            msg: format!("edge {u:?}-{v:?} declared twice"),
                        });
                    }
                    edges.push((ui, vi, label));
                }
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected \"u v m\" or \"node u\", got {text:?}"),
                    })
                }
            }
        }
        Diagram::new(nodes, edges)
    }

    /// JSON form: {"nodes": [...], "edges": [{"u":.., "v":.., "m": 3|"inf"}]}.
    fn parse_json(source: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(source).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        let nodes_val = value
            .get("nodes")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse { line: 0, msg: "missing \"nodes\" array".into() })?;
        let nodes: Vec<String> = nodes_val
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse { line: 0, msg: "node names must be strings".into() })
            })
            .collect::<Result<_>>()?;
        let lookup: HashMap<&str, usize> =
            nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if lookup.len() != nodes.len() {
            return Err(Error::Parse { line: 0, msg: "duplicate node".into() });
        }
        let mut edges = Vec::new();
        if let Some(list) = value.get("edges").and_then(|v| v.as_array()) {
            for (k, e) in list.iter().enumerate() {
                let get_node = |key: &str| -> Result<usize> {
                    let name = e.get(key).and_then(|v| v.as_str()).ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: format!("edge {k}: missing node field {key:?}"),
                    })?;
                    lookup.get(name).copied().ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: format!("edge {k}: unknown node {name:?}"),
                    })
                };
                let u = get_node("u")?;
                let v = get_node("v")?;
                let m = match e.get("m") {
                    Some(serde_json::Value::Number(x)) if x.as_i64() == Some(3) => EdgeLabel::Three,
                    Some(serde_json::Value::String(s)) if s == "inf" || s == "\u{221e}" => {
                        EdgeLabel::Infinite
                    }
                    other => {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("edge {k}: bad label {other:?} (expected 3 or \"inf\")"),
                        })
                    }
                };
                edges.push((u, v, m));
            }
        }
        Diagram::new(nodes, edges)
    }

    /// Resolve a list of node names to sorted indices.
    pub fn resolve_nodes(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = names
            .iter()
            .map(|&name| {
                self.node_index(name)
                    .ok_or_else(|| Error::Precondition(format!("unknown node {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Sorted, deduplicated copy of a node subset.
pub(crate) fn normalize_subset(subset: &[usize]) -> Vec<usize> {
    let mut v = subset.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Trichotomy for a symmetric integral matrix with diagonal 2 and
/// nonpositive off-diagonal entries whose support graph is connected.
pub(crate) fn classify_gram2_connected(m: usize, g: &[i128]) -> Result<DiagramClass> {
    let minors = linalg::leading_principal_minors(m, g)?;
    if minors.iter().all(|&d| d > 0) {
        return Ok(DiagramClass::Finite);
    }
    let kernel = linalg::kernel_basis(m, m, g);
    if kernel.len() == 1 {
        let prim = linalg::primitive_integer(&kernel[0])?;
        let all_pos = prim.iter().all(|&c| c > 0);
        let all_neg = prim.iter().all(|&c| c < 0);
        if all_pos || all_neg {
            return Ok(DiagramClass::Affine);
        }
    }
    Ok(DiagramClass::Indefinite)
}
