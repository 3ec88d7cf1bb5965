//! Conductance, sweep cuts, spectral partitioning, flow-based refinement,
//! and cluster niceness metrics.

use std::collections::VecDeque;

use crate::diffusion::{power_method, PowerTarget};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeVector};
use crate::numerics::dense_eigendecompose;
use crate::MatrixKind;

mod flow;

pub use flow::{
    brute_force_min_quotient, max_flow, mqi_refine, FlowNetwork, MaxFlowResult, MqiOutcome,
};

/// A node set with its cut weight, volume, and conductance.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Sorted member ids.
    pub members: Vec<usize>,
    pub cut_weight: f64,
    pub volume: f64,
    pub conductance: f64,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

fn checked_member_set(graph: &Graph, members: &[usize]) -> Result<Vec<usize>> {
    let n = graph.n();
    if members.is_empty() {
        return Err(Error::InvalidParameter("empty node set".into()));
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("duplicate node in set".into()));
    }
    if *sorted.last().unwrap() >= n {
        return Err(Error::InvalidParameter(format!(
            "node {} out of bounds for n={n}",
            sorted.last().unwrap()
        )));
    }
    if sorted.len() == n {
        return Err(Error::InvalidParameter(
            "node set must be a proper subset".into(),
        ));
    }
    Ok(sorted)
}

/// Cut weight and volume of a set given a membership bitmap.
fn cut_and_volume(graph: &Graph, members: &[usize], in_set: &[bool]) -> (f64, f64) {
    let mut cut = 0.0;
    let mut vol = 0.0;
    for &u in members {
        vol += graph.degree(u);
        for (v, w) in graph.neighbors(u) {
            if !in_set[v] {
                cut += w;
            }
        }
    }
    (cut, vol)
}

/// Exact conductance of a node set: cut weight over the smaller side volume.
pub fn conductance(graph: &Graph, members: &[usize]) -> Result<Cluster> {
    let sorted = checked_member_set(graph, members)?;
    let mut in_set = vec![false; graph.n()];
    for &u in &sorted {
        in_set[u] = true;
    }
    let (cut, vol) = cut_and_volume(graph, &sorted, &in_set);
    let denom = vol.min(graph.total_volume() - vol);
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(
            "set or complement has zero volume".into(),
        ));
    }
    Ok(Cluster {
        members: sorted,
        cut_weight: cut,
        volume: vol,
        conductance: cut / denom,
    })
}

/// Degree-unweighted counterpart of conductance: cut size over the smaller
/// side cardinality.
pub fn expansion(graph: &Graph, members: &[usize]) -> Result<f64> {
    let sorted = checked_member_set(graph, members)?;
    let mut in_set = vec![false; graph.n()];
    for &u in &sorted {
        in_set[u] = true;
    }
    let (cut, _) = cut_and_volume(graph, &sorted, &in_set);
    let small = sorted.len().min(graph.n() - sorted.len());
    Ok(cut / small as f64)
}

/// How node values are ranked before sweeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepOrdering {
    Raw,
    /// `x_u / sqrt(d_u)`: the right scaling for eigenvectors of the
    /// normalized Laplacian.
    InvSqrtDegree,
    /// `x_u / d_u`: the right scaling for diffusion mass vectors.
    InvDegree,
}

/// Ordered sweep over prefixes of a node ranking with per-prefix conductance.
#[derive(Debug, Clone)]
pub struct SweepProfile {
    /// Nodes in sweep order (all nodes for a global sweep, the support for a
    /// local one).
    pub order: Vec<usize>,
    /// Conductance of each proper prefix, aligned with `order`.
    pub prefix_conductance: Vec<f64>,
    /// Index into `prefix_conductance` attaining the minimum (lowest on ties).
    pub best_prefix: usize,
    pub best_cluster: Cluster,
}

fn sweep_over(graph: &Graph, order: Vec<usize>) -> Result<SweepProfile> {
    let n = graph.n();
    let total = graph.total_volume();
    // Only proper subsets of V are valid prefixes.
    let prefix_count = order.len().min(n - 1);
    if prefix_count == 0 {
        return Err(Error::InvalidParameter("nothing to sweep".into()));
    }
    let mut in_set = vec![false; n];
    let mut cut = 0.0;
    let mut vol = 0.0;
    let mut prefix_conductance = Vec::with_capacity(prefix_count);
    let mut best_prefix = 0usize;
    for (k, &u) in order.iter().take(prefix_count).enumerate() {
        let mut to_inside = 0.0;
        for (v, w) in graph.neighbors(u) {
            if in_set[v] {
                to_inside += w;
            }
        }
        in_set[u] = true;
        vol += graph.degree(u);
        cut += graph.degree(u) - 2.0 * to_inside;
        let phi = cut / vol.min(total - vol);
        prefix_conductance.push(phi);
        if phi < prefix_conductance[best_prefix] {
            best_prefix = k;
        }
    }
    let best_cluster = conductance(graph, &order[..=best_prefix])?;
    Ok(SweepProfile {
        order,
        prefix_conductance,
        best_prefix,
        best_cluster,
    })
}

fn sweep_key(graph: &Graph, ordering: SweepOrdering, u: usize, value: f64) -> f64 {
    let d = graph.degree(u);
    match ordering {
        SweepOrdering::Raw => value,
        SweepOrdering::InvSqrtDegree => {
            if d > 0.0 {
                value / d.sqrt()
            } else {
                value
            }
        }
        SweepOrdering::InvDegree => {
            if d > 0.0 {
                value / d
            } else {
                value
            }
        }
    }
}

/// Sweep cut over a node vector: rank nodes by the (optionally
/// degree-normalized) values, descending, ties broken by node id, and take
/// conductance over every prefix. Incremental updates keep the whole sweep
/// at O(|E|).
pub fn sweep_cut(
    graph: &Graph,
    vector: &NodeVector,
    ordering: SweepOrdering,
) -> Result<SweepProfile> {
    let n = graph.n();
    if vector.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: vector.len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("sweep needs at least two nodes".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ka = sweep_key(graph, ordering, a, vector[a]);
        let kb = sweep_key(graph, ordering, b, vector[b]);
        kb.partial_cmp(&ka).unwrap().then(a.cmp(&b))
    });
    sweep_over(graph, order)
}

/// Sweep restricted to the support of a nonnegative mass vector.
///
/// Nodes with zero mass are excluded; a single-node support yields that
/// singleton's conductance as the only prefix.
pub fn local_sweep(graph: &Graph, mass: &NodeVector) -> Result<SweepProfile> {
    let n = graph.n();
    if mass.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mass.len(),
        });
    }
    if mass.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("mass vector has negative entries".into()));
    }
    let mut support: Vec<usize> = (0..n).filter(|&u| mass[u] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::InvalidParameter("mass vector is zero".into()));
    }
    support.sort_by(|&a, &b| {
        let ka = sweep_key(graph, SweepOrdering::InvDegree, a, mass[a]);
        let kb = sweep_key(graph, SweepOrdering::InvDegree, b, mass[b]);
        kb.partial_cmp(&ka).unwrap().then(a.cmp(&b))
    });
    sweep_over(graph, support)
}

/// Eigenvector source for spectral partitioning.
#[derive(Debug, Clone, Copy)]
pub enum EigenSolver {
    Dense,
    /// Power method with deflation from a seeded random start.
    PowerMethod { iters: usize, seed: u64 },
}

/// Global spectral partition: second eigenvector plus degree-normalized sweep.
/// Returns the sweep profile and the lambda_2 estimate for Cheeger checks.
pub fn spectral_partition(graph: &Graph, solver: EigenSolver) -> Result<(SweepProfile, f64)> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let (vector, lambda2) = match solver {
        EigenSolver::Dense => {
            let eig = dense_eigendecompose(graph, MatrixKind::NormalizedLaplacian)?;
            (NodeVector::new(eig.eigenvector(1))?, eig.lambda2())
        }
        EigenSolver::PowerMethod { iters, seed } => {
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let start = NodeVector::new(
                (0..graph.n()).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )?;
            let report = power_method(
                graph,
                PowerTarget::SecondOfNormalizedLaplacian,
                &start,
                iters,
                1e-12,
            )?;
            (report.vector, report.lambda)
        }
    };
    let profile = sweep_cut(graph, &vector, SweepOrdering::InvSqrtDegree)?;
    Ok((profile, lambda2))
}

/// Niceness measures of a cluster, following the scatter-experiment columns.
#[derive(Debug, Clone, Copy)]
pub struct NicenessMetrics {
    /// Mean unweighted shortest-path length over connected ordered pairs in
    /// the induced subgraph.
    pub avg_internal_spl: f64,
    pub connected: bool,
    /// External conductance over internal conductance, where internal
    /// conductance is the best spectral sweep cut of the induced subgraph
    /// (infinite when the induced subgraph is disconnected).
    pub ext_int_ratio: f64,
}

/// Induced subgraph on `members` plus the member list mapping new -> old ids.
pub fn induced_subgraph(graph: &Graph, members: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let sorted = checked_member_set(graph, members)?;
    let mut new_id = vec![usize::MAX; graph.n()];
    for (new, &old) in sorted.iter().enumerate() {
        new_id[old] = new;
    }
    let edges: Vec<(usize, usize, f64)> = graph
        .edges()
        .filter(|&(u, v, _)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
        .map(|(u, v, w)| (new_id[u], new_id[v], w))
        .collect();
    let sub = Graph::from_edges(sorted.len(), &edges)?;
    Ok((sub, sorted))
}

/// Average internal shortest-path length, internal connectivity, and the
/// external-to-internal conductance ratio of a cluster.
pub fn niceness_metrics(graph: &Graph, cluster: &Cluster) -> Result<NicenessMetrics> {
    if cluster.size() < 2 {
        return Err(Error::InvalidParameter(
            "niceness metrics are undefined for singleton clusters".into(),
        ));
    }
    let (sub, _) = induced_subgraph(graph, &cluster.members)?;
    let m = sub.n();
    let mut pair_sum = 0u64;
    let mut pair_count = 0u64;
    let mut connected = true;
    let mut dist = vec![usize::MAX; m];
    let mut queue = VecDeque::new();
    for src in 0..m {
        dist.fill(usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        let mut reached = 1usize;
        while let Some(u) = queue.pop_front() {
            for (v, _) in sub.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        if reached < m {
            connected = false;
        }
        for (v, &d) in dist.iter().enumerate() {
            if v != src && d != usize::MAX {
                pair_sum += d as u64;
                pair_count += 1;
            }
        }
    }
    let avg_internal_spl = if pair_count > 0 {
        pair_sum as f64 / pair_count as f64
    } else {
        f64::INFINITY
    };
    let internal_conductance = if connected {
        let eig = dense_eigendecompose(&sub, MatrixKind::NormalizedLaplacian)?;
        let v2 = NodeVector::new(eig.eigenvector(1))?;
        sweep_cut(&sub, &v2, SweepOrdering::InvSqrtDegree)?
            .best_cluster
            .conductance
    } else {
        0.0
    };
    let ext_int_ratio = if internal_conductance > 0.0 {
        cluster.conductance / internal_conductance
    } else {
        f64::INFINITY
    };
    Ok(NicenessMetrics {
        avg_internal_spl,
        connected,
        ext_int_ratio,
    })
}

/// Exhaustive minimum conductance over all proper nonempty subsets; test
/// oracle, exponential in n.
pub fn brute_force_min_conductance(graph: &Graph) -> Result<(f64, Vec<usize>)> {
    let n = graph.n();
    if n < 2 || n > 24 {
        return Err(Error::InvalidParameter(format!(
            "brute force supports 2 <= n <= 24, got {n}"
        )));
    }
    let mut best = f64::INFINITY;
    let mut best_set = Vec::new();
    for mask in 1u32..((1u32 << n) - 1) {
        let members: Vec<usize> = (0..n).filter(|&u| mask & (1 << u) != 0).collect();
        let c = conductance(graph, &members)?;
        if c.conductance < best {
            best = c.conductance;
            best_set = members;
        }
    }
    Ok((best, best_set))
}
