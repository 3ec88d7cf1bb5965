//! Exact integral max-flow (Dinic) and flow-based quotient-cut refinement.

use std::collections::VecDeque;

use super::{conductance, Cluster};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Directed flow network with integer capacities.
///
/// By construction no arc enters the source or leaves the sink.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    node_count: usize,
    source: usize,
    sink: usize,
    arcs: Vec<(usize, usize, u64)>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= node_count || sink >= node_count || source == sink {
            return Err(Error::InvalidParameter(format!(
                "bad source/sink ({source},{sink}) for {node_count} nodes"
            )));
        }
        Ok(FlowNetwork {
            node_count,
            source,
            sink,
            arcs: Vec::new(),
        })
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: u64) -> Result<()> {
        if from >= self.node_count || to >= self.node_count {
            return Err(Error::InvalidParameter(format!(
                "arc ({from},{to}) out of bounds"
            )));
        }
        if from == to {
            return Err(Error::InvalidParameter(format!("arc loop at {from}")));
        }
        if to == self.source {
            return Err(Error::InvalidParameter("arc into source".into()));
        }
        if from == self.sink {
            return Err(Error::InvalidParameter("arc out of sink".into()));
        }
        self.arcs.push((from, to, capacity));
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }
}

#[derive(Debug, Clone)]
pub struct MaxFlowResult {
    pub value: u64,
    /// Nodes reachable from the source in the final residual graph. This is
    /// the minimal minimum cut, so the sink side is the maximal one.
    pub source_side: Vec<usize>,
}

#[derive(Clone)]
struct DinicEdge {
    to: usize,
    rev: usize,
    cap: i64,
}

struct Dinic {
    adj: Vec<Vec<DinicEdge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            adj: vec![Vec::new(); n],
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(DinicEdge { to, rev: rev_from, cap });
        self.adj[to].push(DinicEdge {
            to: from,
            rev: rev_to,
            cap: 0,
        });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for e in &self.adj[u] {
                if e.cap > 0 && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let i = self.iter[u];
            let (to, cap) = (self.adj[u][i].to, self.adj[u][i].cap);
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0 {
                    self.adj[u][i].cap -= d;
                    let rev = self.adj[u][i].rev;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0i64;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    fn residual_reachable(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::new();
        seen[s] = true;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for e in &self.adj[u] {
                if e.cap > 0 && !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        (0..self.adj.len()).filter(|&u| seen[u]).collect()
    }
}

/// Exact maximum flow and a minimum cut (as the residual-reachable source side).
pub fn max_flow(network: &FlowNetwork) -> Result<MaxFlowResult> {
    let mut dinic = Dinic::new(network.node_count);
    for &(from, to, cap) in &network.arcs {
        if cap > i64::MAX as u64 {
            return Err(Error::NumericalFailure(format!("capacity {cap} overflows")));
        }
        if cap > 0 {
            dinic.add_edge(from, to, cap as i64);
        }
    }
    let value = dinic.max_flow(network.source, network.sink);
    Ok(MaxFlowResult {
        value: value as u64,
        source_side: dinic.residual_reachable(network.source),
    })
}

/// Result of iterated quotient-cut refinement.
#[derive(Debug, Clone)]
pub struct MqiOutcome {
    pub cluster: Cluster,
    /// cut/vol of the retained set after each round, starting with the input
    /// side; strictly decreasing.
    pub quotient_history: Vec<f64>,
    pub iterations: usize,
}

fn integer_weight(w: f64) -> Result<u64> {
    let rounded = w.round();
    if (w - rounded).abs() > 1e-9 * w.abs().max(1.0) || rounded < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "flow refinement requires integer edge weights, got {w}"
        )));
    }
    Ok(rounded as u64)
}

fn checked_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b)
        .ok_or_else(|| Error::NumericalFailure(format!("capacity product {a}*{b} overflows")))
}

/// Max-flow quotient-cut improvement inside a fixed side.
///
/// Starting from `side` with cut `c` and volume `v`, each round builds a flow
/// network whose min cut is below `c*v` exactly when some subset has a
/// strictly smaller cut/volume quotient; the sink side of the (maximal)
/// minimum cut is that subset and becomes the next side. Because the maximal
/// minimizers at decreasing quotients are nested, iterating to a fixed point
/// reaches the minimum quotient over all nonempty subsets of the original
/// side. Capacities are exact integers (cut and volume multiplied through),
/// so there is no tolerance in the stopping rule.
pub fn mqi_refine(graph: &Graph, side: &[usize]) -> Result<MqiOutcome> {
    let n = graph.n();
    let mut members = side.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::InvalidParameter("empty side".into()));
    }
    if members.len() != side.len() {
        return Err(Error::InvalidParameter("duplicate node in side".into()));
    }
    if *members.last().unwrap() >= n {
        return Err(Error::InvalidParameter(format!(
            "node {} out of bounds for n={n}",
            members.last().unwrap()
        )));
    }
    if members.len() == n {
        return Err(Error::InvalidParameter("side must be a proper subset".into()));
    }

    let int_degree: Vec<u64> = graph
        .degrees()
        .iter()
        .map(|&d| integer_weight(d))
        .collect::<Result<_>>()?;

    let mut in_side = vec![false; n];
    for &u in &members {
        in_side[u] = true;
    }
    let mut quotient_history = Vec::new();
    let mut iterations = 0usize;

    loop {
        let mut cut: u64 = 0;
        let mut vol: u64 = 0;
        let mut boundary = vec![0u64; members.len()];
        let mut local_id = vec![usize::MAX; n];
        for (i, &u) in members.iter().enumerate() {
            local_id[u] = i;
        }
        for (i, &u) in members.iter().enumerate() {
            vol += int_degree[u];
            for (v, w) in graph.neighbors(u) {
                if !in_side[v] {
                    boundary[i] += integer_weight(w)?;
                }
            }
            cut += boundary[i];
        }
        quotient_history.push(cut as f64 / vol as f64);
        if cut == 0 {
            break; // quotient already zero, nothing to improve
        }

        let m = members.len();
        let source = m;
        let sink = m + 1;
        let mut network = FlowNetwork::new(m + 2, source, sink)?;
        for (i, &u) in members.iter().enumerate() {
            if boundary[i] > 0 {
                network.add_arc(source, i, checked_mul(vol, boundary[i])?)?;
            }
            network.add_arc(i, sink, checked_mul(cut, int_degree[u])?)?;
            for (v, w) in graph.neighbors(u) {
                if in_side[v] && u < v {
                    let cap = checked_mul(vol, integer_weight(w)?)?;
                    let j = local_id[v];
                    network.add_arc(i, j, cap)?;
                    network.add_arc(j, i, cap)?;
                }
            }
        }
        let result = max_flow(&network)?;
        let target = checked_mul(cut, vol)?;
        if result.value >= target {
            break; // no subset improves the quotient
        }
        let mut on_source_side = vec![false; m];
        for &x in &result.source_side {
            if x < m {
                on_source_side[x] = true;
            }
        }
        let next: Vec<usize> = members
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| !on_source_side[i])
            .map(|(_, u)| u)
            .collect();
        if next.is_empty() || next.len() == members.len() {
            return Err(Error::NumericalFailure(
                "flow refinement produced a degenerate cut".into(),
            ));
        }
        for &u in &members {
            in_side[u] = false;
        }
        for &u in &next {
            in_side[u] = true;
        }
        members = next;
        iterations += 1;
    }

    let cluster = conductance(graph, &members)?;
    Ok(MqiOutcome {
        cluster,
        quotient_history,
        iterations,
    })
}

/// Exhaustive minimum cut/vol quotient over nonempty subsets of `side`;
/// test oracle, exponential in |side|.
pub fn brute_force_min_quotient(graph: &Graph, side: &[usize]) -> Result<(f64, Vec<usize>)> {
    if side.is_empty() || side.len() > 20 {
        return Err(Error::InvalidParameter(format!(
            "brute force supports 1..=20 side nodes, got {}",
            side.len()
        )));
    }
    let mut best = f64::INFINITY;
    let mut best_set = Vec::new();
    let mut in_subset = vec![false; graph.n()];
    for mask in 1u32..(1u32 << side.len()) {
        let members: Vec<usize> = side
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .map(|(_, &u)| u)
            .collect();
        for &u in &members {
            in_subset[u] = true;
        }
        let mut cut = 0.0;
        let mut vol = 0.0;
        for &u in &members {
            vol += graph.degree(u);
            for (v, w) in graph.neighbors(u) {
                if !in_subset[v] {
                    cut += w;
                }
            }
        }
        for &u in &members {
            in_subset[u] = false;
        }
        let q = cut / vol;
        if q < best {
            best = q;
            best_set = members;
        }
    }
    Ok((best, best_set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphFamily};
    use approx::assert_abs_diff_eq;

    #[test]
    fn max_flow_single_arc() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 5).unwrap();
        assert_eq!(max_flow(&net).unwrap().value, 5);
    }

    #[test]
    fn max_flow_two_disjoint_paths() {
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, 3).unwrap();
        net.add_arc(1, 3, 3).unwrap();
        net.add_arc(0, 2, 4).unwrap();
        net.add_arc(2, 3, 4).unwrap();
        assert_eq!(max_flow(&net).unwrap().value, 7);
    }

    #[test]
    fn max_flow_diamond_with_cross_arc() {
        // s -> {a,b} -> t all capacity 1 plus a -> b capacity 1: value 2 by
        // enumerating all cuts.
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, 1).unwrap();
        net.add_arc(0, 2, 1).unwrap();
        net.add_arc(1, 3, 1).unwrap();
        net.add_arc(2, 3, 1).unwrap();
        net.add_arc(1, 2, 1).unwrap();
        assert_eq!(max_flow(&net).unwrap().value, 2);
    }

    #[test]
    fn network_rejects_arcs_violating_source_sink_rules() {
        let mut net = FlowNetwork::new(3, 0, 2).unwrap();
        assert!(net.add_arc(1, 0, 1).is_err());
        assert!(net.add_arc(2, 1, 1).is_err());
    }

    #[test]
    fn mqi_trims_dumbbell_side_to_triangle() {
        let g = generate(&GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0).unwrap();
        let out = mqi_refine(&g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(out.cluster.members, vec![0, 1, 2]);
        assert_abs_diff_eq!(out.cluster.conductance, 1.0 / 7.0, epsilon = 1e-12);
        let (oracle, _) = brute_force_min_quotient(&g, &[0, 1, 2, 3]).unwrap();
        assert_abs_diff_eq!(out.cluster.cut_weight / out.cluster.volume, oracle, epsilon = 1e-12);
    }

    #[test]
    fn mqi_leaves_locally_optimal_side_alone() {
        let g = generate(&GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0).unwrap();
        let out = mqi_refine(&g, &[0, 1, 2]).unwrap();
        assert_eq!(out.cluster.members, vec![0, 1, 2]);
        assert_eq!(out.iterations, 0);
        let single = mqi_refine(&g, &[4]).unwrap();
        assert_eq!(single.cluster.members, vec![4]);
    }

    #[test]
    fn mqi_quotient_history_strictly_decreases() {
        let g = generate(&GraphFamily::RingOfCliques { count: 4, size: 4 }, 0).unwrap();
        // A clique plus pieces of the next one.
        let side = vec![0, 1, 2, 3, 4, 5];
        let out = mqi_refine(&g, &side).unwrap();
        for pair in out.quotient_history.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        let (oracle, _) = brute_force_min_quotient(&g, &side).unwrap();
        assert_abs_diff_eq!(
            out.cluster.cut_weight / out.cluster.volume,
            oracle,
            epsilon = 1e-12
        );
    }

    #[test]
    fn mqi_matches_exhaustive_optimum_on_random_sides() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for (family, seed) in [
            (GraphFamily::Dumbbell { clique: 4, bridges: 2 }, 0u64),
            (GraphFamily::RandomRegular { n: 14, degree: 3 }, 2),
            (GraphFamily::Grid { rows: 3, cols: 5 }, 0),
        ] {
            let g = generate(&family, seed).unwrap();
            let nodes: Vec<usize> = (0..g.n()).collect();
            for size in [3usize, 7, 11] {
                let mut pool = nodes.clone();
                pool.shuffle(&mut rng);
                let side: Vec<usize> = pool.into_iter().take(size.min(g.n() - 1)).collect();
                let out = mqi_refine(&g, &side).unwrap();
                let (oracle, _) = brute_force_min_quotient(&g, &side).unwrap();
                let got = out.cluster.cut_weight / out.cluster.volume;
                assert!(
                    (got - oracle).abs() <= 1e-12,
                    "family {family:?} side {side:?}: got {got}, oracle {oracle}"
                );
            }
        }
    }
}
