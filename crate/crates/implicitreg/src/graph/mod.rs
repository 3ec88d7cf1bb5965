//! Immutable sparse graph representation and its derived matrix operators.

use std::collections::VecDeque;
use std::io::BufRead;

use crate::error::{Error, Result};

mod generate;

pub use generate::{generate, GraphFamily};

/// Undirected weighted graph in compressed sparse row form.
///
/// Invariants enforced at construction: symmetric adjacency, strictly
/// positive weights, no self-loops, no duplicate edges. Weighted degrees
/// and total volume are cached; connectivity is computed once.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_volume: f64,
    connected: bool,
}

impl Graph {
    /// Build a graph from undirected edges, each listed once as `(u, v, w)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut normalized: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) out of bounds for n={n}"
                )));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonpositiveWeight { u, v, w });
            }
            normalized.push((u.min(v), u.max(v), w));
        }
        normalized.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for pair in normalized.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::DuplicateEdge {
                    u: pair[0].0,
                    v: pair[0].1,
                });
            }
        }

        let mut offsets = vec![0usize; n + 1];
        for &(u, v, _) in &normalized {
            offsets[u + 1] += 1;
            offsets[v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let nnz = offsets[n];
        let mut targets = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        let mut cursor = offsets.clone();
        for &(u, v, w) in &normalized {
            targets[cursor[u]] = v;
            weights[cursor[u]] = w;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            weights[cursor[v]] = w;
            cursor[v] += 1;
        }
        // Sort each row by target id for deterministic iteration.
        for u in 0..n {
            let (lo, hi) = (offsets[u], offsets[u + 1]);
            let mut row: Vec<(usize, f64)> = targets[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(t, _)| t);
            for (k, (t, w)) in row.into_iter().enumerate() {
                targets[lo + k] = t;
                weights[lo + k] = w;
            }
        }

        let degrees: Vec<f64> = (0..n)
            .map(|u| weights[offsets[u]..offsets[u + 1]].iter().sum())
            .collect();
        let total_volume = degrees.iter().sum();
        let mut graph = Graph {
            n,
            offsets,
            targets,
            weights,
            degrees,
            total_volume,
            connected: false,
        };
        graph.connected = graph.compute_connected();
        Ok(graph)
    }

    fn compute_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        let mut count = 1usize;
        while let Some(u) = queue.pop_front() {
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, u: usize) -> f64 {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Neighbors of `u` with edge weights, ordered by node id.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.offsets[u], self.offsets[u + 1]);
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Undirected edges `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Unit vector proportional to entrywise sqrt of the degrees.
    ///
    /// This is the kernel direction of the normalized Laplacian for a
    /// connected graph.
    pub fn sqrt_degree_unit(&self) -> NodeVector {
        let mut values: Vec<f64> = self.degrees.iter().map(|d| d.sqrt()).collect();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        }
        NodeVector::from_raw(values)
    }

    /// FNV-1a hash over the canonical edge list, for manifests.
    pub fn structure_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut mix = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        mix(self.n as u64);
        for (u, v, w) in self.edges() {
            mix(u as u64);
            mix(v as u64);
            mix(w.to_bits());
        }
        h
    }
}

/// Dense per-node real vector, index-aligned with graph node ids.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeVector {
    values: Vec<f64>,
}

impl NodeVector {
    /// Validates that every entry is finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite entry at index {bad}"
            )));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    /// Standard basis vector `e_node`.
    pub fn indicator(n: usize, node: usize) -> Result<Self> {
        if node >= n {
            return Err(Error::InvalidParameter(format!(
                "node {node} out of bounds for n={n}"
            )));
        }
        let mut values = vec![0.0; n];
        values[node] = 1.0;
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }

    pub fn dot(&self, other: &NodeVector) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &NodeVector) {
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a += s * b;
        }
    }

    pub fn l1_distance(&self, other: &NodeVector) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

impl std::ops::Index<usize> for NodeVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl From<NodeVector> for Vec<f64> {
    fn from(v: NodeVector) -> Vec<f64> {
        v.values
    }
}

/// Nonnegative node vector summing to one, used to seed diffusions.
#[derive(Debug, Clone)]
pub struct SeedDistribution {
    vector: NodeVector,
}

impl SeedDistribution {
    pub fn new(vector: NodeVector) -> Result<Self> {
        if vector.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter(
                "seed distribution has negative entries".into(),
            ));
        }
        let sum = vector.sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "seed distribution sums to {sum}, expected 1"
            )));
        }
        Ok(Self { vector })
    }

    /// Point mass at a single node.
    pub fn single(n: usize, node: usize) -> Result<Self> {
        Ok(Self {
            vector: NodeVector::indicator(n, node)?,
        })
    }

    /// Uniform distribution over a node set.
    pub fn uniform_over(n: usize, nodes: &[usize]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("empty seed set".into()));
        }
        let mut values = vec![0.0; n];
        let mass = 1.0 / nodes.len() as f64;
        for &u in nodes {
            if u >= n {
                return Err(Error::InvalidParameter(format!(
                    "seed node {u} out of bounds for n={n}"
                )));
            }
            if values[u] != 0.0 {
                return Err(Error::InvalidParameter(format!("duplicate seed node {u}")));
            }
            values[u] = mass;
        }
        Ok(Self {
            vector: NodeVector::from_raw(values),
        })
    }

    pub fn vector(&self) -> &NodeVector {
        &self.vector
    }

    pub fn into_vector(self) -> NodeVector {
        self.vector
    }
}

/// Matrix operators derived from a graph, applied matrix-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixKind {
    /// Weighted adjacency `A`.
    Adjacency,
    /// Diagonal degree matrix `D`.
    DegreeDiag,
    /// `D - A`.
    CombinatorialLaplacian,
    /// `I - D^{-1/2} A D^{-1/2}`.
    NormalizedLaplacian,
    /// Column-stochastic walk matrix `A D^{-1}`.
    RandomWalk,
    /// `alpha I + (1 - alpha) A D^{-1}` with `alpha` strictly inside (0, 1).
    LazyWalk { alpha: f64 },
}

/// Exact sparse matrix-vector product for the selected operator, O(|E|).
pub fn apply_matrix(graph: &Graph, kind: MatrixKind, x: &NodeVector) -> Result<NodeVector> {
    let n = graph.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let xs = x.as_slice();
    let mut out = vec![0.0f64; n];
    match kind {
        MatrixKind::Adjacency => {
            for u in 0..n {
                let mut acc = 0.0;
                for (v, w) in graph.neighbors(u) {
                    acc += w * xs[v];
                }
                out[u] = acc;
            }
        }
        MatrixKind::DegreeDiag => {
            for u in 0..n {
                out[u] = graph.degree(u) * xs[u];
            }
        }
        MatrixKind::CombinatorialLaplacian => {
            for u in 0..n {
                let mut acc = graph.degree(u) * xs[u];
                for (v, w) in graph.neighbors(u) {
                    acc -= w * xs[v];
                }
                out[u] = acc;
            }
        }
        MatrixKind::NormalizedLaplacian => {
            for u in 0..n {
                let du = graph.degree(u);
                if du == 0.0 {
                    out[u] = xs[u];
                    continue;
                }
                let mut acc = 0.0;
                for (v, w) in graph.neighbors(u) {
                    acc += w * xs[v] / (du * graph.degree(v)).sqrt();
                }
                out[u] = xs[u] - acc;
            }
        }
        MatrixKind::RandomWalk => {
            for u in 0..n {
                let mut acc = 0.0;
                for (v, w) in graph.neighbors(u) {
                    acc += w * xs[v] / graph.degree(v);
                }
                out[u] = acc;
            }
        }
        MatrixKind::LazyWalk { alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "lazy-walk alpha {alpha} outside (0,1)"
                )));
            }
            for u in 0..n {
                let mut acc = 0.0;
                for (v, w) in graph.neighbors(u) {
                    acc += w * xs[v] / graph.degree(v);
                }
                out[u] = alpha * xs[u] + (1.0 - alpha) * acc;
            }
        }
    }
    Ok(NodeVector::from_raw(out))
}

/// Parse an edge-list stream: lines `u v [w]`, `#` comments allowed, each
/// undirected edge listed once. Weight defaults to 1.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `u v [w]`, got {} tokens", tokens.len()),
            });
        }
        let u: usize = tokens[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid node id `{}`", tokens[0]),
        })?;
        let v: usize = tokens[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid node id `{}`", tokens[1]),
        })?;
        let w: f64 = match tokens.get(2) {
            Some(tok) => tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid weight `{tok}`"),
            })?,
            None => 1.0,
        };
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let n = match max_id {
        Some(m) => m + 1,
        None => return Err(Error::EmptyGraph),
    };
    Graph::from_edges(n, &edges)
}

/// Stable map from original node ids to the dense ids of a preprocessed graph.
#[derive(Debug, Clone)]
pub struct IdMap {
    entries: Vec<(usize, usize)>,
}

impl IdMap {
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.entries
            .binary_search_by_key(&old, |&(o, _)| o)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// CSV with header `old_id,new_id`, sorted by old id.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("old_id,new_id\n");
        for &(old, new) in &self.entries {
            out.push_str(&format!("{old},{new}\n"));
        }
        out
    }
}

/// Extract the largest connected component, densely reindexed.
///
/// On a tie between equal-size components, the one containing the smallest
/// original node id wins. Relative order of retained ids is preserved.
pub fn preprocess(graph: &Graph) -> Result<(Graph, IdMap)> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut component = vec![usize::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0usize;
        let mut queue = VecDeque::new();
        component[start] = id;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            size += 1;
            for (v, _) in graph.neighbors(u) {
                if component[v] == usize::MAX {
                    component[v] = id;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    // First component attaining the maximum size contains the smallest id.
    let mut best = 0usize;
    for (id, &size) in sizes.iter().enumerate() {
        if size > sizes[best] {
            best = id;
        }
    }
    let members: Vec<usize> = (0..n).filter(|&u| component[u] == best).collect();
    let mut new_id = vec![usize::MAX; n];
    for (new, &old) in members.iter().enumerate() {
        new_id[old] = new;
    }
    let edges: Vec<(usize, usize, f64)> = graph
        .edges()
        .filter(|&(u, _, _)| component[u] == best)
        .map(|(u, v, w)| (new_id[u], new_id[v], w))
        .collect();
    let sub = Graph::from_edges(members.len(), &edges)?;
    let entries = members.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    Ok((sub, IdMap { entries }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn single_edge() -> Graph {
        Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn load_path_graph() {
        let g = load_edge_list("0 1\n1 2".as_bytes()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert!(g.is_connected());
    }

    #[test]
    fn load_rejects_self_loop() {
        let err = load_edge_list("0 0".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(0)));
    }

    #[test]
    fn load_weighted_edge() {
        let g = load_edge_list("0 1 2.5".as_bytes()).unwrap();
        assert_abs_diff_eq!(g.total_volume(), 5.0);
    }

    #[test]
    fn load_rejects_duplicates_and_bad_weights() {
        assert!(matches!(
            load_edge_list("0 1\n1 0".as_bytes()).unwrap_err(),
            Error::DuplicateEdge { u: 0, v: 1 }
        ));
        assert!(matches!(
            load_edge_list("0 1 -2".as_bytes()).unwrap_err(),
            Error::NonpositiveWeight { .. }
        ));
    }

    #[test]
    fn load_reports_line_numbers() {
        let err = load_edge_list("# comment\n0 1\nbogus line here four".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_empty_stream_is_error() {
        assert!(matches!(
            load_edge_list("# nothing\n".as_bytes()).unwrap_err(),
            Error::EmptyGraph
        ));
    }

    #[test]
    fn preprocess_identity_on_connected() {
        let g = load_edge_list("0 1\n1 2".as_bytes()).unwrap();
        let (sub, map) = preprocess(&g).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(map.entries(), &[(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn preprocess_drops_smaller_component() {
        let g = load_edge_list("0 1\n1 2\n5 6".as_bytes()).unwrap();
        let (sub, map) = preprocess(&g).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(map.new_id(5), None);
        assert_eq!(map.new_id(6), None);
        assert_eq!(map.new_id(2), Some(2));
    }

    #[test]
    fn preprocess_tie_break_smallest_id() {
        // Two equal components {0,3} and {1,2}; {0,3} contains node 0.
        let g = load_edge_list("0 3\n1 2".as_bytes()).unwrap();
        let (sub, map) = preprocess(&g).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(map.entries(), &[(0, 0), (3, 1)]);
    }

    #[test]
    fn normalized_laplacian_on_single_edge() {
        let g = single_edge();
        let x = NodeVector::new(vec![1.0, 0.0]).unwrap();
        let y = apply_matrix(&g, MatrixKind::NormalizedLaplacian, &x).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn degree_diag_times_ones_is_degrees() {
        let g = generate(&GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0).unwrap();
        let ones = NodeVector::constant(g.n(), 1.0);
        let y = apply_matrix(&g, MatrixKind::DegreeDiag, &ones).unwrap();
        assert_eq!(y.as_slice(), g.degrees());
    }

    #[test]
    fn random_walk_on_cycle_spreads_to_neighbors() {
        let g = generate(&GraphFamily::Cycle { n: 4 }, 0).unwrap();
        let e0 = NodeVector::indicator(4, 0).unwrap();
        let y = apply_matrix(&g, MatrixKind::RandomWalk, &e0).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 0.5, 0.0, 0.5]);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let g = single_edge();
        let x = NodeVector::zeros(3);
        assert!(matches!(
            apply_matrix(&g, MatrixKind::Adjacency, &x).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 3 }
        ));
    }

    #[test]
    fn combinatorial_laplacian_annihilates_ones() {
        for family in [
            GraphFamily::Path { n: 7 },
            GraphFamily::Cycle { n: 9 },
            GraphFamily::Complete { n: 6 },
            GraphFamily::Grid { rows: 3, cols: 4 },
            GraphFamily::Dumbbell { clique: 4, bridges: 2 },
            GraphFamily::RingOfCliques { count: 4, size: 3 },
            GraphFamily::RandomRegular { n: 12, degree: 3 },
        ] {
            let g = generate(&family, 11).unwrap();
            let ones = NodeVector::constant(g.n(), 1.0);
            let y = apply_matrix(&g, MatrixKind::CombinatorialLaplacian, &ones).unwrap();
            let max_deg = g.degrees().iter().fold(0.0f64, |m, &d| m.max(d));
            assert!(y.linf_norm() <= 1e-12 * max_deg, "family {family:?}");
        }
    }

    #[test]
    fn normalized_laplacian_annihilates_sqrt_degrees() {
        let g = generate(&GraphFamily::RingOfCliques { count: 5, size: 4 }, 3).unwrap();
        let d_sqrt =
            NodeVector::new(g.degrees().iter().map(|d| d.sqrt()).collect()).unwrap();
        let y = apply_matrix(&g, MatrixKind::NormalizedLaplacian, &d_sqrt).unwrap();
        assert!(y.linf_norm() <= 1e-12);
    }

    #[test]
    fn random_walk_transpose_preserves_ones() {
        // M^T 1 = D^{-1} A 1 = D^{-1} d = 1.
        let g = generate(&GraphFamily::Dumbbell { clique: 5, bridges: 3 }, 0).unwrap();
        let ones = NodeVector::constant(g.n(), 1.0);
        let a_ones = apply_matrix(&g, MatrixKind::Adjacency, &ones).unwrap();
        for u in 0..g.n() {
            assert_abs_diff_eq!(a_ones[u] / g.degree(u), 1.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn laplacian_quadratic_form_nonnegative(
            seed in 0u64..50,
            entries in proptest::collection::vec(-10.0f64..10.0, 12)
        ) {
            let g = generate(&GraphFamily::RandomRegular { n: 12, degree: 3 }, seed).unwrap();
            let x = NodeVector::new(entries).unwrap();
            let lx = apply_matrix(&g, MatrixKind::CombinatorialLaplacian, &x).unwrap();
            prop_assert!(x.dot(&lx) >= -1e-12 * (1.0 + x.dot(&x)));
        }
    }
}
