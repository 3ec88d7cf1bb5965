//! The three diffusion dynamics (heat kernel, personalized PageRank, lazy
//! random walk) and a power method with deflation.
//!
//! Each dynamics has an exact dense mode used as an oracle and an iterative
//! mode whose truncation is itself an object of study, so approximate modes
//! deliberately stop early rather than polishing to machine precision.

use crate::error::{Error, Result};
use crate::graph::{apply_matrix, Graph, MatrixKind, NodeVector};
use crate::numerics::{check_dense_limit, dense_eigendecompose, dense_matrix};

use nalgebra::DVector;

/// A diffusion dynamics with its aggressiveness parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffusionKind {
    /// `exp(-t L_norm)`, `t >= 0`.
    HeatKernel { t: f64 },
    /// `gamma (I - (1-gamma) M)^{-1}`, `gamma` in (0, 1].
    PageRank { gamma: f64 },
    /// `(alpha I + (1-alpha) M)^steps`.
    LazyWalk { alpha: f64, steps: usize },
}

impl DiffusionKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DiffusionKind::HeatKernel { t } => {
                if !(t >= 0.0) {
                    return Err(Error::InvalidParameter(format!("heat time {t} must be >= 0")));
                }
            }
            DiffusionKind::PageRank { gamma } => {
                if !(gamma > 0.0 && gamma <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "teleportation gamma {gamma} outside (0,1]"
                    )));
                }
            }
            DiffusionKind::LazyWalk { alpha, .. } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "holding probability alpha {alpha} outside (0,1)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Short name for reports.
    pub fn name(&self) -> &'static str {
        match self {
            DiffusionKind::HeatKernel { .. } => "heat_kernel",
            DiffusionKind::PageRank { .. } => "pagerank",
            DiffusionKind::LazyWalk { .. } => "lazy_walk",
        }
    }

    /// Parameter rendering for reports (`;`-separated, CSV-safe).
    pub fn param_string(&self) -> String {
        match *self {
            DiffusionKind::HeatKernel { t } => format!("t={t}"),
            DiffusionKind::PageRank { gamma } => format!("gamma={gamma}"),
            DiffusionKind::LazyWalk { alpha, steps } => format!("alpha={alpha};steps={steps}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum HeatMode {
    /// `exp(-t L) seed` via dense eigendecomposition.
    ExactDense,
    /// Taylor series truncated after `terms` powers (the studied approximation).
    TruncatedSeries { terms: usize },
}

/// Apply the heat-kernel dynamics to a seed vector.
pub fn heat_kernel_apply(
    graph: &Graph,
    t: f64,
    seed: &NodeVector,
    mode: HeatMode,
) -> Result<NodeVector> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("heat time {t} must be >= 0")));
    }
    if seed.len() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            got: seed.len(),
        });
    }
    match mode {
        HeatMode::ExactDense => {
            let eig = dense_eigendecompose(graph, MatrixKind::NormalizedLaplacian)?;
            let n = graph.n();
            let s = DVector::from_column_slice(seed.as_slice());
            let coeffs = eig.eigenvectors.transpose() * s;
            let mut out = vec![0.0f64; n];
            for k in 0..n {
                let scale = (-t * eig.eigenvalues[k]).exp() * coeffs[k];
                let col = eig.eigenvectors.column(k);
                for i in 0..n {
                    out[i] += scale * col[i];
                }
            }
            NodeVector::new(out)
        }
        HeatMode::TruncatedSeries { terms } => {
            let mut acc = seed.clone();
            let mut term = seed.clone();
            for j in 1..=terms {
                let next = apply_matrix(graph, MatrixKind::NormalizedLaplacian, &term)?;
                term = next;
                term.scale(-t / j as f64);
                acc.axpy(1.0, &term);
            }
            Ok(acc)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PageRankMode {
    /// Direct dense solve of the resolvent system.
    ExactDense,
    /// Fixed-point iteration `x <- gamma s + (1-gamma) M x`, stopping when
    /// the l1 change drops below `tol`.
    Richardson { tol: f64 },
}

/// Personalized PageRank `gamma (I - (1-gamma) M)^{-1} seed`.
pub fn pagerank(
    graph: &Graph,
    gamma: f64,
    seed: &NodeVector,
    mode: PageRankMode,
) -> Result<NodeVector> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "teleportation gamma {gamma} outside (0,1]"
        )));
    }
    let n = graph.n();
    if seed.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: seed.len(),
        });
    }
    if gamma == 1.0 {
        return Ok(seed.clone());
    }
    match mode {
        PageRankMode::ExactDense => {
            check_dense_limit(n)?;
            let m = dense_matrix(graph, MatrixKind::RandomWalk)?;
            let sys = nalgebra::DMatrix::<f64>::identity(n, n) - m * (1.0 - gamma);
            let rhs = DVector::from_column_slice(seed.as_slice()) * gamma;
            let x = sys
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::NumericalFailure("resolvent solve failed".into()))?;
            NodeVector::new(x.iter().copied().collect())
        }
        PageRankMode::Richardson { tol } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance {tol} must be positive"
                )));
            }
            let mut base = seed.clone();
            base.scale(gamma);
            let mut x = base.clone();
            // Contraction factor (1-gamma) < 1, so this always terminates;
            // the cap is a safety net.
            let max_iters = 10_000_000usize;
            for _ in 0..max_iters {
                let mut next = apply_matrix(graph, MatrixKind::RandomWalk, &x)?;
                next.scale(1.0 - gamma);
                next.axpy(1.0, &base);
                let delta = next.l1_distance(&x);
                x = next;
                if delta <= tol {
                    return Ok(x);
                }
            }
            Err(Error::NonConvergence(max_iters))
        }
    }
}

/// `steps` applications of the lazy walk operator to the seed.
pub fn lazy_walk(graph: &Graph, alpha: f64, steps: usize, seed: &NodeVector) -> Result<NodeVector> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "holding probability alpha {alpha} outside (0,1)"
        )));
    }
    if seed.len() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            got: seed.len(),
        });
    }
    let mut x = seed.clone();
    for _ in 0..steps {
        x = apply_matrix(graph, MatrixKind::LazyWalk { alpha }, &x)?;
    }
    Ok(x)
}

/// What the power iteration should converge to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerTarget {
    /// Dominant eigenpair of the PSD operator `2I - L_norm`.
    DominantOfShifted,
    /// Second-smallest eigenpair of `L_norm`: the iteration runs on
    /// `2I - L_norm` with re-orthogonalization against the trivial direction
    /// every step.
    SecondOfNormalizedLaplacian,
}

/// Power-iteration outcome, convergent or not.
///
/// Non-convergence is data, not failure: truncated runs feed the
/// regularization experiments, so the full Rayleigh history is kept.
#[derive(Debug, Clone)]
pub struct PowerMethodReport {
    /// Eigenvalue estimate: for the dominant target this is the eigenvalue of
    /// the shifted operator, for the second-eigenvector target it is already
    /// converted to the Laplacian eigenvalue.
    pub lambda: f64,
    /// Unit-norm eigenvector estimate.
    pub vector: NodeVector,
    pub iterations: usize,
    /// Rayleigh quotient of the shifted operator per iteration
    /// (non-decreasing up to roundoff since the operator is PSD).
    pub rayleigh_history: Vec<f64>,
    pub converged: bool,
}

/// Power iteration on `2I - L_norm`, converging when successive Rayleigh
/// quotients differ by less than `tol`.
pub fn power_method(
    graph: &Graph,
    target: PowerTarget,
    start: &NodeVector,
    max_iters: usize,
    tol: f64,
) -> Result<PowerMethodReport> {
    let n = graph.n();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: start.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let deflate = matches!(target, PowerTarget::SecondOfNormalizedLaplacian);
    let q = graph.sqrt_degree_unit();
    let mut x = start.clone();
    if deflate {
        let c = q.dot(&x);
        x.axpy(-c, &q);
    }
    let norm = x.norm();
    if norm < 1e-300 {
        return Err(Error::InvalidParameter(
            "start vector is (numerically) orthogonal to the target".into(),
        ));
    }
    x.scale(1.0 / norm);

    let apply_shifted = |v: &NodeVector| -> Result<NodeVector> {
        let mut y = apply_matrix(graph, MatrixKind::NormalizedLaplacian, v)?;
        y.scale(-1.0);
        y.axpy(2.0, v);
        Ok(y)
    };

    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0usize;
    for iter in 1..=max_iters {
        iterations = iter;
        let mut y = apply_shifted(&x)?;
        if deflate {
            let c = q.dot(&y);
            y.axpy(-c, &q);
        }
        let norm = y.norm();
        if norm < 1e-300 {
            return Err(Error::NumericalFailure("power iterate vanished".into()));
        }
        y.scale(1.0 / norm);
        let ay = apply_shifted(&y)?;
        let rayleigh = y.dot(&ay);
        x = y;
        let done = history
            .last()
            .is_some_and(|prev| (rayleigh - prev).abs() < tol);
        history.push(rayleigh);
        if done {
            converged = true;
            break;
        }
    }
    let shifted_lambda = *history.last().expect("max_iters >= 1");
    let lambda = match target {
        PowerTarget::DominantOfShifted => shifted_lambda,
        PowerTarget::SecondOfNormalizedLaplacian => 2.0 - shifted_lambda,
    };
    Ok(PowerMethodReport {
        lambda,
        vector: x,
        iterations,
        rayleigh_history: history,
        converged,
    })
}
