//! Strongly-local clustering: the push algorithm for approximate
//! personalized PageRank, truncated random walks, the locally-biased
//! spectral program, and the best-conductance local profile.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{apply_matrix, Graph, MatrixKind, NodeVector, SeedDistribution};
use crate::numerics::dense_eigendecompose;
use crate::partition::{conductance, sweep_cut, Cluster, SweepOrdering};

pub use crate::partition::local_sweep;

/// State of a push run: settled mass, residual, and work counters.
///
/// The invariant maintained by every push is
/// `p + R_gamma(r) = R_gamma(seed)`, so the settled vector underestimates
/// the exact PageRank by exactly the PageRank of the residual.
#[derive(Debug, Clone)]
pub struct PushState {
    /// Settled mass `p`, entrywise nonnegative.
    pub settled: NodeVector,
    /// Residual mass `r`, entrywise nonnegative.
    pub residual: NodeVector,
    pub gamma: f64,
    pub epsilon: f64,
    /// Number of pushes performed.
    pub pushes: usize,
    /// Sorted ids of nodes whose settled or residual mass was ever nonzero.
    pub touched: Vec<usize>,
}

impl PushState {
    /// True when no node is eligible: `r(v) < epsilon * d(v)` everywhere.
    pub fn terminated(&self, graph: &Graph) -> bool {
        (0..graph.n()).all(|v| self.residual[v] < self.epsilon * graph.degree(v))
    }
}

/// Push-style approximate personalized PageRank, run to termination.
///
/// Eligible nodes (`r(v) >= epsilon * d(v)`) are processed in FIFO order:
/// a push settles `gamma * r(v)` at `v` and spreads the rest over the
/// neighbors through the walk matrix. Total pushes are bounded by
/// `1/(gamma * epsilon)` for unit-or-heavier degrees, and the touched set
/// size is independent of n.
pub fn push_ppr(
    graph: &Graph,
    seed: &SeedDistribution,
    gamma: f64,
    epsilon: f64,
) -> Result<PushState> {
    push_ppr_bounded(graph, seed, gamma, epsilon, usize::MAX)
}

/// Push run stopped after at most `max_pushes` pushes; the conservation
/// identity holds at any such interrupt point.
pub fn push_ppr_bounded(
    graph: &Graph,
    seed: &SeedDistribution,
    gamma: f64,
    epsilon: f64,
    max_pushes: usize,
) -> Result<PushState> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "teleportation gamma {gamma} outside (0,1)"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold epsilon {epsilon} must be positive"
        )));
    }
    let n = graph.n();
    if seed.vector().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: seed.vector().len(),
        });
    }
    if graph.degrees().iter().any(|&d| d == 0.0) {
        return Err(Error::InvalidParameter(
            "push requires a graph without isolated nodes".into(),
        ));
    }

    let mut p = vec![0.0f64; n];
    let mut r: Vec<f64> = seed.vector().as_slice().to_vec();
    let mut touched = vec![false; n];
    let mut queued = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for v in 0..n {
        if r[v] > 0.0 {
            touched[v] = true;
        }
        if r[v] >= epsilon * graph.degree(v) {
            queued[v] = true;
            queue.push_back(v);
        }
    }
    let mut pushes = 0usize;
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let dv = graph.degree(v);
        let rv = r[v];
        if rv < epsilon * dv {
            continue; // stale entry
        }
        if pushes >= max_pushes {
            queued[v] = true;
            queue.push_front(v);
            break;
        }
        p[v] += gamma * rv;
        r[v] = 0.0;
        let spread = (1.0 - gamma) * rv / dv;
        for (u, w) in graph.neighbors(v) {
            r[u] += spread * w;
            touched[u] = true;
            if !queued[u] && r[u] >= epsilon * graph.degree(u) {
                queued[u] = true;
                queue.push_back(u);
            }
        }
        pushes += 1;
    }
    Ok(PushState {
        settled: NodeVector::new(p)?,
        residual: NodeVector::new(r)?,
        gamma,
        epsilon,
        pushes,
        touched: (0..n).filter(|&v| touched[v]).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct TruncatedWalkOutcome {
    /// Final sub-stochastic mass vector.
    pub vector: NodeVector,
    /// Mass removed by truncation; never re-normalized away, the bias is
    /// the studied object.
    pub lost_mass: f64,
}

/// Lazy walk with per-step truncation: after each application entries below
/// `epsilon * d(v)` are zeroed.
pub fn truncated_walk(
    graph: &Graph,
    seed: &SeedDistribution,
    alpha: f64,
    steps: usize,
    epsilon: f64,
) -> Result<TruncatedWalkOutcome> {
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold epsilon {epsilon} must be >= 0"
        )));
    }
    let mut q = seed.vector().clone();
    for _ in 0..steps {
        q = apply_matrix(graph, MatrixKind::LazyWalk { alpha }, &q)?;
        if epsilon > 0.0 {
            let values = q.as_mut_slice();
            for (v, entry) in values.iter_mut().enumerate() {
                if *entry < epsilon * graph.degree(v) {
                    *entry = 0.0;
                }
            }
        }
    }
    let lost_mass = 1.0 - q.sum();
    Ok(TruncatedWalkOutcome {
        vector: q,
        lost_mass,
    })
}

/// Seed specification for the locally-biased program: a node set (normalized
/// to a uniform distribution) or an explicit distribution.
#[derive(Debug, Clone)]
pub enum SeedSpec {
    Nodes(Vec<usize>),
    Distribution(SeedDistribution),
}

impl SeedSpec {
    fn to_vector(&self, n: usize) -> Result<NodeVector> {
        match self {
            SeedSpec::Nodes(nodes) => {
                Ok(SeedDistribution::uniform_over(n, nodes)?.into_vector())
            }
            SeedSpec::Distribution(dist) => {
                if dist.vector().len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: dist.vector().len(),
                    });
                }
                Ok(dist.vector().clone())
            }
        }
    }
}

/// Inputs of the locally-biased spectral program and the local profile.
#[derive(Debug, Clone)]
pub struct LocalSpec {
    pub seed: SeedSpec,
    /// Locality strength in [0, 1]: required squared correlation with the
    /// seed direction.
    pub kappa: f64,
    /// Volume budget for the local profile.
    pub volume_budget: f64,
    /// Node required to be inside profile clusters.
    pub target: usize,
}

/// Solution of the locally-biased spectral program.
#[derive(Debug, Clone)]
pub struct MovSolution {
    /// Unit-norm solution, orthogonal to the trivial direction, signed so
    /// the seed correlation is nonnegative.
    pub x: NodeVector,
    /// Multiplier on the orthogonality/eigenvalue side when the locality
    /// constraint binds; `None` when the unconstrained optimum already
    /// satisfies it or when `kappa = 1` forces full alignment.
    pub gamma_star: Option<f64>,
    /// Norm of the stationarity residual, computed with sparse operator
    /// applications rather than the eigenexpansion that produced `x`.
    pub kkt_residual: f64,
    /// Achieved squared seed correlation.
    pub constraint_value: f64,
    /// Whether the locality constraint binds at the solution.
    pub binding: bool,
}

/// Solve the locally-biased spectral program exactly via eigenexpansion.
///
/// The seed is mapped to `s_hat`: degree-square-root scaled, projected off
/// the trivial direction, and normalized. For kappa = 0 the answer is the
/// global second eigenvector; for kappa = 1 it is `s_hat` itself; in between,
/// the solution is proportional to the pseudo-inverse `(L - gamma I)^+ s_hat`
/// with `gamma < lambda_2` chosen by bisection so the constraint binds.
pub fn mov_solve(graph: &Graph, spec: &LocalSpec) -> Result<MovSolution> {
    if !(0.0..=1.0).contains(&spec.kappa) {
        return Err(Error::InvalidParameter(format!(
            "kappa {} outside [0,1]",
            spec.kappa
        )));
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = graph.n();
    let eig = dense_eigendecompose(graph, MatrixKind::NormalizedLaplacian)?;
    let q = graph.sqrt_degree_unit();

    let raw = spec.seed.to_vector(n)?;
    let mut s_hat_vals: Vec<f64> = (0..n)
        .map(|u| graph.degree(u).sqrt() * raw[u])
        .collect();
    let mut s_hat = NodeVector::new(s_hat_vals.clone())?;
    let overlap = q.dot(&s_hat);
    s_hat.axpy(-overlap, &q);
    let norm = s_hat.norm();
    if norm <= 1e-12 {
        return Err(Error::InvalidParameter(
            "seed aligns with the trivial direction".into(),
        ));
    }
    s_hat.scale(1.0 / norm);
    s_hat_vals.clear();

    // Expansion of s_hat over the nontrivial eigenvectors.
    let coeffs: Vec<f64> = (1..n)
        .map(|i| {
            eig.eigenvectors
                .column(i)
                .iter()
                .zip(s_hat.iter())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    let lambdas = &eig.eigenvalues[1..];
    let lambda2 = lambdas[0];

    let build = |weights: &[f64]| -> NodeVector {
        let mut out = vec![0.0f64; n];
        for (k, &wk) in weights.iter().enumerate() {
            if wk != 0.0 {
                let col = eig.eigenvectors.column(k + 1);
                for i in 0..n {
                    out[i] += wk * col[i];
                }
            }
        }
        NodeVector::from_raw(out)
    };
    let finish = |mut x: NodeVector, gamma_star: Option<f64>, binding: bool| -> Result<MovSolution> {
        let nrm = x.norm();
        if nrm <= 1e-300 {
            return Err(Error::NumericalFailure("solution vector vanished".into()));
        }
        x.scale(1.0 / nrm);
        let corr = x.dot(&s_hat);
        if corr < 0.0 {
            x.scale(-1.0);
        }
        let constraint_value = corr * corr;
        let kkt_residual = match gamma_star {
            Some(gamma) => {
                let mut res = apply_matrix(graph, MatrixKind::NormalizedLaplacian, &x)?;
                res.axpy(-gamma, &x);
                let c = s_hat.dot(&res);
                res.axpy(-c, &s_hat);
                // Stationarity only needs to hold off the trivial direction.
                let t = q.dot(&res);
                res.axpy(-t, &q);
                res.norm()
            }
            None if binding => 0.0, // fully aligned: no feasible direction remains
            None => {
                let mut res = apply_matrix(graph, MatrixKind::NormalizedLaplacian, &x)?;
                let rayleigh = x.dot(&res);
                res.axpy(-rayleigh, &x);
                res.norm()
            }
        };
        Ok(MovSolution {
            x,
            gamma_star,
            kkt_residual,
            constraint_value,
            binding,
        })
    };

    if spec.kappa >= 1.0 - 1e-12 {
        return finish(s_hat.clone(), None, true);
    }

    // Correlation the unconstrained optimum achieves: mass of s_hat on the
    // lambda_2 eigenspace.
    let eigenspace: Vec<usize> = (0..lambdas.len())
        .filter(|&i| lambdas[i] - lambda2 <= 1e-10)
        .collect();
    let space_mass: f64 = eigenspace.iter().map(|&i| coeffs[i] * coeffs[i]).sum();
    if space_mass >= spec.kappa {
        let mut weights = vec![0.0; lambdas.len()];
        if space_mass > 1e-24 {
            for &i in &eigenspace {
                weights[i] = coeffs[i];
            }
        } else {
            weights[0] = 1.0; // seed orthogonal to the eigenspace: canonical v2
        }
        return finish(build(&weights), None, false);
    }

    // Binding case: bisection on gamma < lambda_2 for the correlation
    //   g(gamma) = (sum b^2/(l-g))^2 / sum b^2/(l-g)^2,
    // which decreases from 1 (gamma -> -inf) to the eigenspace mass
    // (gamma -> lambda_2).
    let correlation = |gamma: f64| -> f64 {
        let mut u = 0.0;
        let mut nn = 0.0;
        for (i, &b) in coeffs.iter().enumerate() {
            let denom = lambdas[i] - gamma;
            u += b * b / denom;
            nn += b * b / (denom * denom);
        }
        u * u / nn
    };
    let span = (lambdas[lambdas.len() - 1] - lambda2).max(1.0);
    let mut lo = lambda2 - span;
    let mut grow = 0;
    while correlation(lo) < spec.kappa {
        lo = lambda2 - (lambda2 - lo) * 4.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::BisectionFailure(format!(
                "no lower bracket for kappa={}",
                spec.kappa
            )));
        }
    }
    let mut hi = lambda2 - 1e-9 * span;
    let mut shrink = 0;
    while correlation(hi) > spec.kappa {
        hi = lambda2 - (lambda2 - hi) * 0.25;
        shrink += 1;
        if shrink > 200 {
            return Err(Error::BisectionFailure(format!(
                "no upper bracket for kappa={}",
                spec.kappa
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if correlation(mid) >= spec.kappa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma_star = 0.5 * (lo + hi);
    let weights: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &b)| b / (lambdas[i] - gamma_star))
        .collect();
    finish(build(&weights), Some(gamma_star), true)
}

/// Parameter grids for the local profile.
#[derive(Debug, Clone)]
pub enum LocalMethod {
    Push { gammas: Vec<f64>, epsilon: f64 },
    Mov { kappas: Vec<f64> },
}

impl LocalMethod {
    /// Default push grid: 20 geometric teleportation values in [1e-4, 0.5],
    /// threshold scaled to the volume budget.
    pub fn default_push(volume_budget: f64) -> Self {
        let lo: f64 = 1e-4;
        let hi: f64 = 0.5;
        let count = 20usize;
        let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
        let gammas = (0..count).map(|i| lo * ratio.powi(i as i32)).collect();
        LocalMethod::Push {
            gammas,
            epsilon: 1e-6 / volume_budget.max(1.0),
        }
    }
}

fn better_candidate(current: &Option<Cluster>, candidate: &Cluster) -> bool {
    match current {
        None => true,
        Some(best) => {
            (candidate.conductance, candidate.volume, &candidate.members)
                < (best.conductance, best.volume, &best.members)
        }
    }
}

fn collect_candidates(
    graph: &Graph,
    order: &[usize],
    prefix_conductance: &[f64],
    target: usize,
    volume_budget: f64,
    best: &mut Option<Cluster>,
) -> Result<()> {
    let mut vol = 0.0;
    let mut has_target = false;
    for (k, &u) in order.iter().enumerate() {
        if k >= prefix_conductance.len() {
            break;
        }
        vol += graph.degree(u);
        if u == target {
            has_target = true;
        }
        if vol > volume_budget {
            break;
        }
        if !has_target {
            continue;
        }
        // Build the cluster lazily, only when it could win.
        let phi = prefix_conductance[k];
        let provisional = match best {
            Some(b) => (phi, vol) <= (b.conductance, b.volume),
            None => true,
        };
        if provisional {
            let cluster = conductance(graph, &order[..=k])?;
            if better_candidate(best, &cluster) {
                *best = Some(cluster);
            }
        }
    }
    Ok(())
}

/// Best-conductance cluster containing `target` with volume at most the
/// budget, over the chosen method's parameter grid.
///
/// Returns `Ok(None)` when no swept prefix qualifies; the seed node missing
/// from every candidate cluster is a real outcome, surfaced rather than
/// patched over.
pub fn local_profile(
    graph: &Graph,
    target: usize,
    volume_budget: f64,
    method: &LocalMethod,
) -> Result<Option<Cluster>> {
    let n = graph.n();
    if target >= n {
        return Err(Error::InvalidParameter(format!(
            "target {target} out of bounds for n={n}"
        )));
    }
    if volume_budget < graph.degree(target) {
        return Err(Error::InvalidParameter(format!(
            "volume budget {volume_budget} below the target degree {}",
            graph.degree(target)
        )));
    }
    if volume_budget > graph.total_volume() {
        return Err(Error::InvalidParameter(format!(
            "volume budget {volume_budget} exceeds the total volume {}",
            graph.total_volume()
        )));
    }
    let mut best: Option<Cluster> = None;
    match method {
        LocalMethod::Push { gammas, epsilon } => {
            let seed = SeedDistribution::single(n, target)?;
            for &gamma in gammas {
                let state = push_ppr(graph, &seed, gamma, *epsilon)?;
                if state.settled.sum() <= 0.0 {
                    continue;
                }
                let profile = local_sweep(graph, &state.settled)?;
                collect_candidates(
                    graph,
                    &profile.order,
                    &profile.prefix_conductance,
                    target,
                    volume_budget,
                    &mut best,
                )?;
            }
        }
        LocalMethod::Mov { kappas } => {
            for &kappa in kappas {
                let spec = LocalSpec {
                    seed: SeedSpec::Nodes(vec![target]),
                    kappa,
                    volume_budget,
                    target,
                };
                let sol = mov_solve(graph, &spec)?;
                let profile = sweep_cut(graph, &sol.x, SweepOrdering::InvSqrtDegree)?;
                collect_candidates(
                    graph,
                    &profile.order,
                    &profile.prefix_conductance,
                    target,
                    volume_budget,
                    &mut best,
                )?;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{lazy_walk, pagerank, PageRankMode};
    use crate::graph::{generate, GraphFamily};
    use approx::assert_abs_diff_eq;

    fn dumbbell() -> Graph {
        generate(&GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0).unwrap()
    }

    fn exact_ppr(graph: &Graph, gamma: f64, v: &NodeVector) -> NodeVector {
        pagerank(graph, gamma, v, PageRankMode::ExactDense).unwrap()
    }

    #[test]
    fn push_with_huge_epsilon_does_nothing() {
        let g = dumbbell();
        let seed = SeedDistribution::single(6, 0).unwrap();
        let state = push_ppr(&g, &seed, 0.2, 2.0).unwrap();
        assert_eq!(state.pushes, 0);
        assert_eq!(state.settled.sum(), 0.0);
        assert_eq!(state.residual.as_slice(), seed.vector().as_slice());
    }

    #[test]
    fn push_converges_to_exact_pagerank_on_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let seed = SeedDistribution::single(2, 0).unwrap();
        let state = push_ppr(&g, &seed, 0.5, 1e-12).unwrap();
        assert_abs_diff_eq!(state.settled[0], 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(state.settled[1], 1.0 / 3.0, epsilon = 1e-9);
        assert!(state.terminated(&g));
    }

    #[test]
    fn push_conservation_identity_at_interrupts() {
        let g = dumbbell();
        let gamma = 0.15;
        let seed = SeedDistribution::single(6, 0).unwrap();
        let exact = exact_ppr(&g, gamma, seed.vector());
        for budget in [0usize, 1, 2, 5, 9, 40, usize::MAX] {
            let state = push_ppr_bounded(&g, &seed, gamma, 1e-7, budget).unwrap();
            let mut recon = exact_ppr(&g, gamma, &state.residual);
            recon.axpy(1.0, &state.settled);
            let err = recon.l1_distance(&exact);
            assert!(err <= 1e-10, "budget {budget}: residual identity off by {err}");
        }
    }

    #[test]
    fn push_terminal_accuracy_and_work_bound() {
        let g = generate(&GraphFamily::RingOfCliques { count: 4, size: 4 }, 0).unwrap();
        let gamma = 0.2;
        let epsilon = 1e-4;
        let seed = SeedDistribution::single(g.n(), 3).unwrap();
        let state = push_ppr(&g, &seed, gamma, epsilon).unwrap();
        assert!(state.pushes as f64 <= (1.0 / (gamma * epsilon)).ceil());
        let exact = exact_ppr(&g, gamma, seed.vector());
        for v in 0..g.n() {
            let err = (exact[v] - state.settled[v]).abs() / g.degree(v);
            assert!(err <= epsilon, "node {v} error {err} > {epsilon}");
        }
    }

    #[test]
    fn push_touches_few_nodes_far_from_seed() {
        let g = generate(
            &GraphFamily::WhiskeredExpander {
                core: 1200,
                degree: 4,
                whiskers: 20,
                length: 10,
            },
            5,
        )
        .unwrap();
        // Seed at the tip of the first whisker.
        let tip = 1200 + 10 - 1;
        let seed = SeedDistribution::single(g.n(), tip).unwrap();
        let state = push_ppr(&g, &seed, 0.1, 1e-3).unwrap();
        assert!(
            state.touched.len() < g.n() / 10,
            "touched {} of {}",
            state.touched.len(),
            g.n()
        );
        assert!(state.pushes as f64 <= 1.0 / (0.1 * 1e-3));
    }

    #[test]
    fn truncated_walk_with_zero_threshold_equals_lazy_walk() {
        let g = dumbbell();
        let seed = SeedDistribution::single(6, 1).unwrap();
        let exact = lazy_walk(&g, 0.6, 7, seed.vector()).unwrap();
        let out = truncated_walk(&g, &seed, 0.6, 7, 0.0).unwrap();
        assert_eq!(out.vector.as_slice(), exact.as_slice());
        assert_abs_diff_eq!(out.lost_mass, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn truncated_walk_with_huge_threshold_loses_everything() {
        let g = dumbbell();
        let seed = SeedDistribution::single(6, 0).unwrap();
        let out = truncated_walk(&g, &seed, 0.5, 1, 10.0).unwrap();
        assert!(out.vector.iter().all(|&v| v == 0.0));
        assert_abs_diff_eq!(out.lost_mass, 1.0);
    }

    #[test]
    fn truncated_walk_confines_support_to_seed_side() {
        let g = dumbbell();
        let seed = SeedDistribution::single(6, 0).unwrap();
        // Exact walk puts < 0.01 * degree beyond the bridge after 3 steps,
        // so truncation keeps support within the seed triangle + bridge node.
        let exact = lazy_walk(&g, 0.5, 3, seed.vector()).unwrap();
        for v in [4usize, 5] {
            assert!(exact[v] < 0.01 * g.degree(v));
        }
        let out = truncated_walk(&g, &seed, 0.5, 3, 0.01).unwrap();
        for v in [4usize, 5] {
            assert_eq!(out.vector[v], 0.0);
        }
        assert!(out.vector[0] > 0.0);
    }

    #[test]
    fn local_sweep_of_triangle_indicator() {
        let g = dumbbell();
        let mut mass = vec![0.0; 6];
        for u in [0, 1, 2] {
            mass[u] = 1.0;
        }
        let profile = local_sweep(&g, &NodeVector::new(mass).unwrap()).unwrap();
        assert_eq!(profile.best_cluster.members, vec![0, 1, 2]);
        assert_abs_diff_eq!(profile.best_cluster.conductance, 1.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn local_sweep_of_push_mass_finds_seed_triangle() {
        let g = dumbbell();
        let seed = SeedDistribution::single(6, 0).unwrap();
        let state = push_ppr(&g, &seed, 0.1, 1e-6).unwrap();
        let profile = local_sweep(&g, &state.settled).unwrap();
        assert_eq!(profile.best_cluster.members, vec![0, 1, 2]);
    }

    #[test]
    fn local_sweep_singleton_support() {
        let g = dumbbell();
        let mass = NodeVector::indicator(6, 3).unwrap();
        let profile = local_sweep(&g, &mass).unwrap();
        assert_eq!(profile.best_cluster.members, vec![3]);
        assert_eq!(profile.prefix_conductance.len(), 1);
    }

    #[test]
    fn mov_kappa_zero_recovers_v2() {
        let g = dumbbell();
        let eig = dense_eigendecompose(&g, MatrixKind::NormalizedLaplacian).unwrap();
        let v2 = NodeVector::new(eig.eigenvector(1)).unwrap();
        let spec = LocalSpec {
            seed: SeedSpec::Nodes(vec![0]),
            kappa: 0.0,
            volume_budget: 7.0,
            target: 0,
        };
        let sol = mov_solve(&g, &spec).unwrap();
        assert!(!sol.binding);
        assert!(sol.x.dot(&v2).abs() >= 1.0 - 1e-10);
    }

    #[test]
    fn mov_kappa_one_recovers_scaled_seed() {
        let g = dumbbell();
        let spec = LocalSpec {
            seed: SeedSpec::Nodes(vec![0]),
            kappa: 1.0,
            volume_budget: 7.0,
            target: 0,
        };
        let sol = mov_solve(&g, &spec).unwrap();
        // s_hat: degree-scaled indicator, projected and normalized.
        let q = g.sqrt_degree_unit();
        let mut s_hat = NodeVector::zeros(6);
        s_hat.as_mut_slice()[0] = g.degree(0).sqrt();
        let c = q.dot(&s_hat);
        s_hat.axpy(-c, &q);
        s_hat.scale(1.0 / s_hat.norm());
        assert!(sol.x.dot(&s_hat) >= 1.0 - 1e-10);
        assert_abs_diff_eq!(sol.constraint_value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn mov_binding_case_meets_constraint_with_small_residual() {
        let g = dumbbell();
        let spec = LocalSpec {
            seed: SeedSpec::Nodes(vec![0]),
            kappa: 0.5,
            volume_budget: 7.0,
            target: 0,
        };
        let sol = mov_solve(&g, &spec).unwrap();
        assert!(sol.binding);
        assert_abs_diff_eq!(sol.constraint_value, 0.5, epsilon = 1e-8);
        assert!(sol.kkt_residual <= 1e-8);
        assert!(sol.gamma_star.unwrap() < dense_eigendecompose(&g, MatrixKind::NormalizedLaplacian).unwrap().lambda2());
    }

    #[test]
    fn mov_solution_varies_continuously_along_kappa_grid() {
        let g = generate(&GraphFamily::RingOfCliques { count: 4, size: 3 }, 0).unwrap();
        let mut previous: Option<NodeVector> = None;
        let mut kappa: f64 = 0.0;
        while kappa <= 1.0 + 1e-9 {
            let spec = LocalSpec {
                seed: SeedSpec::Nodes(vec![0]),
                kappa: kappa.min(1.0),
                volume_budget: 10.0,
                target: 0,
            };
            let sol = mov_solve(&g, &spec).unwrap();
            if sol.binding && sol.gamma_star.is_some() {
                assert!(
                    (sol.constraint_value - kappa).abs() <= 1e-8,
                    "kappa {kappa}: constraint {}",
                    sol.constraint_value
                );
            }
            if let Some(prev) = &previous {
                assert!(prev.dot(&sol.x) >= 0.0, "sign flip at kappa {kappa}");
            }
            previous = Some(sol.x);
            kappa += 0.05;
        }
    }

    #[test]
    fn mov_beats_random_feasible_samples() {
        use rand::Rng;
        use rand::SeedableRng;
        let g = dumbbell();
        let spec = LocalSpec {
            seed: SeedSpec::Nodes(vec![0]),
            kappa: 0.5,
            volume_budget: 7.0,
            target: 0,
        };
        let sol = mov_solve(&g, &spec).unwrap();
        let lx = apply_matrix(&g, MatrixKind::NormalizedLaplacian, &sol.x).unwrap();
        let optimum = sol.x.dot(&lx);

        let q = g.sqrt_degree_unit();
        let mut s_hat = NodeVector::zeros(6);
        s_hat.as_mut_slice()[0] = g.degree(0).sqrt();
        let c = q.dot(&s_hat);
        s_hat.axpy(-c, &q);
        s_hat.scale(1.0 / s_hat.norm());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            // Random feasible unit vector: cos(theta) s_hat + sin(theta) w
            // with w orthogonal to both s_hat and the trivial direction.
            let mut w = NodeVector::new((0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
                .unwrap();
            let cq = q.dot(&w);
            w.axpy(-cq, &q);
            let cs = s_hat.dot(&w);
            w.axpy(-cs, &s_hat);
            if w.norm() < 1e-9 {
                continue;
            }
            w.scale(1.0 / w.norm());
            let u: f64 = rng.random_range(0.0..1.0);
            let cos = (spec.kappa + u * (1.0 - spec.kappa)).sqrt();
            let sin = (1.0 - cos * cos).sqrt();
            let mut x = s_hat.clone();
            x.scale(cos);
            x.axpy(sin, &w);
            let lx = apply_matrix(&g, MatrixKind::NormalizedLaplacian, &x).unwrap();
            assert!(x.dot(&lx) >= optimum - 1e-9);
        }
    }

    #[test]
    fn local_profile_finds_dumbbell_triangle() {
        let g = dumbbell();
        let best = local_profile(&g, 0, 7.0, &LocalMethod::default_push(7.0))
            .unwrap()
            .expect("profile found a cluster");
        assert_eq!(best.members, vec![0, 1, 2]);
        assert_abs_diff_eq!(best.conductance, 1.0 / 7.0, epsilon = 1e-12);
        // Exhaustive oracle over sets containing node 0 with volume <= 7.
        let mut oracle = f64::INFINITY;
        for mask in 1u32..63 {
            if mask & 1 == 0 {
                continue;
            }
            let members: Vec<usize> = (0..6).filter(|&u| mask & (1 << u) != 0).collect();
            if members.len() == 6 {
                continue;
            }
            let c = conductance(&g, &members).unwrap();
            if c.volume <= 7.0 {
                oracle = oracle.min(c.conductance);
            }
        }
        assert_abs_diff_eq!(best.conductance, oracle, epsilon = 1e-12);
    }

    #[test]
    fn local_profile_with_mov_grid_finds_triangle() {
        let g = dumbbell();
        let method = LocalMethod::Mov {
            kappas: vec![0.2, 0.5, 0.8],
        };
        let best = local_profile(&g, 0, 7.0, &method).unwrap().unwrap();
        assert_eq!(best.members, vec![0, 1, 2]);
    }

    #[test]
    fn local_profile_rejects_budget_below_degree() {
        let g = dumbbell();
        let err = local_profile(&g, 2, 2.0, &LocalMethod::default_push(2.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn local_profile_recovers_clique_in_ring() {
        let g = generate(&GraphFamily::RingOfCliques { count: 8, size: 5 }, 0).unwrap();
        // Clique 3 occupies nodes 15..20; its volume is 5*4 + 2 ring stubs.
        let budget = 22.0;
        let target = 16;
        let best = local_profile(&g, target, budget, &LocalMethod::default_push(budget))
            .unwrap()
            .unwrap();
        assert_eq!(best.members, vec![15, 16, 17, 18, 19]);
        // Oracle over clique sub/super-sets within budget: the full clique wins.
        let clique: Vec<usize> = (15..20).collect();
        let phi_clique = conductance(&g, &clique).unwrap().conductance;
        assert_abs_diff_eq!(best.conductance, phi_clique, epsilon = 1e-12);
    }
}
