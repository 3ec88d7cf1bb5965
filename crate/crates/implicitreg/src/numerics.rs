//! Dense numerical kernels: symmetric eigendecomposition, conjugate-gradient
//! solves, and a projected-gradient solver over the trace-one PSD set.
//!
//! Everything here is a desk-scale oracle: each operation checks the dense
//! ceiling (`IMPLICITREG_DENSE_LIMIT`, default 4096) where a dense matrix is
//! materialized.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{apply_matrix, Graph, MatrixKind, NodeVector};

pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Node-count ceiling for dense paths; override with `IMPLICITREG_DENSE_LIMIT`.
pub fn dense_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("IMPLICITREG_DENSE_LIMIT")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_DENSE_LIMIT)
    })
}

pub(crate) fn check_dense_limit(n: usize) -> Result<()> {
    let limit = dense_limit();
    if n > limit {
        return Err(Error::DenseLimitExceeded { n, limit });
    }
    Ok(())
}

/// Materialize the selected operator as a dense matrix.
pub fn dense_matrix(graph: &Graph, kind: MatrixKind) -> Result<DMatrix<f64>> {
    check_dense_limit(graph.n())?;
    let n = graph.n();
    let mut m = DMatrix::<f64>::zeros(n, n);
    match kind {
        MatrixKind::Adjacency => {
            for u in 0..n {
                for (v, w) in graph.neighbors(u) {
                    m[(u, v)] = w;
                }
            }
        }
        MatrixKind::DegreeDiag => {
            for u in 0..n {
                m[(u, u)] = graph.degree(u);
            }
        }
        MatrixKind::CombinatorialLaplacian => {
            for u in 0..n {
                m[(u, u)] = graph.degree(u);
                for (v, w) in graph.neighbors(u) {
                    m[(u, v)] = -w;
                }
            }
        }
        MatrixKind::NormalizedLaplacian => {
            for u in 0..n {
                m[(u, u)] = 1.0;
                let du = graph.degree(u);
                if du == 0.0 {
                    continue;
                }
                for (v, w) in graph.neighbors(u) {
                    m[(u, v)] = -w / (du * graph.degree(v)).sqrt();
                }
            }
        }
        MatrixKind::RandomWalk => {
            for u in 0..n {
                for (v, w) in graph.neighbors(u) {
                    m[(u, v)] = w / graph.degree(v);
                }
            }
        }
        MatrixKind::LazyWalk { alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "lazy-walk alpha {alpha} outside (0,1)"
                )));
            }
            for u in 0..n {
                m[(u, u)] = alpha;
                for (v, w) in graph.neighbors(u) {
                    m[(u, v)] += (1.0 - alpha) * w / graph.degree(v);
                }
            }
        }
    }
    Ok(m)
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, index-aligned with `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Second-smallest eigenvalue.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }
}

/// Dense eigendecomposition of a symmetric Laplacian kind.
///
/// The eigenvector sign convention is deterministic: the largest-magnitude
/// entry is made positive, ties resolved to the lower index.
pub fn dense_eigendecompose(graph: &Graph, kind: MatrixKind) -> Result<SpectralDecomposition> {
    match kind {
        MatrixKind::CombinatorialLaplacian | MatrixKind::NormalizedLaplacian => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "eigendecomposition supports the symmetric Laplacian kinds, got {other:?}"
            )))
        }
    }
    check_dense_limit(graph.n())?;
    let m = dense_matrix(graph, kind)?;
    let se = m.symmetric_eigen();
    let n = graph.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let v = se.eigenvectors.column(src);
        let mut peak = 0usize;
        for i in 1..n {
            if v[i].abs() > v[peak].abs() {
                peak = i;
            }
        }
        let sign = if v[peak] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, col)] = sign * v[i];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Matrix-free operator `shift*I + scale*K` for iterative solves.
#[derive(Debug, Clone, Copy)]
pub struct SpdOperator {
    pub kind: MatrixKind,
    pub scale: f64,
    pub shift: f64,
}

impl SpdOperator {
    pub fn identity() -> Self {
        SpdOperator {
            kind: MatrixKind::Adjacency,
            scale: 0.0,
            shift: 1.0,
        }
    }

    pub fn plain(kind: MatrixKind) -> Self {
        SpdOperator {
            kind,
            scale: 1.0,
            shift: 0.0,
        }
    }

    pub fn apply(&self, graph: &Graph, x: &NodeVector) -> Result<NodeVector> {
        let mut y = apply_matrix(graph, self.kind, x)?;
        y.scale(self.scale);
        y.axpy(self.shift, x);
        Ok(y)
    }
}

/// Conjugate gradient for an operator that is SPD on the relevant subspace.
///
/// Terminates when the residual drops below `tol * ||rhs||`; a singular or
/// indefinite operator surfaces as non-convergence (pivot breakdown or
/// iteration cap, 10n by default).
pub fn solve_spd(
    graph: &Graph,
    op: &SpdOperator,
    rhs: &NodeVector,
    tol: f64,
) -> Result<NodeVector> {
    let n = graph.n();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let max_iters = 10 * n.max(1);
    let b_norm = rhs.norm();
    if b_norm == 0.0 {
        return Ok(NodeVector::zeros(n));
    }
    let mut x = NodeVector::zeros(n);
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    for iter in 0..max_iters {
        let ap = op.apply(graph, &p)?;
        let p_ap = p.dot(&ap);
        if !p_ap.is_finite() || p_ap <= f64::EPSILON * rs {
            // Breakdown: operator singular or indefinite along p.
            return Err(Error::NonConvergence(iter));
        }
        let alpha = rs / p_ap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rs_next = r.dot(&r);
        if rs_next.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let beta = rs_next / rs;
        let mut p_next = r.clone();
        p_next.axpy(beta, &p);
        p = p_next;
        rs = rs_next;
    }
    Err(Error::NonConvergence(max_iters))
}

/// Feasibility residuals of a density matrix: PSD violation, trace error,
/// and leakage along the trivial direction.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityResiduals {
    pub psd: f64,
    pub trace: f64,
    pub trivial: f64,
}

/// Symmetric PSD matrix with unit trace annihilating the trivial direction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: DMatrix<f64>,
}

impl DensityMatrix {
    /// Validate invariants against the unit trivial direction `q`:
    /// symmetry to 1e-12, eigenvalues >= -1e-10, trace within 1e-10 of one,
    /// `||X q|| <= 1e-8`.
    pub fn new(mat: DMatrix<f64>, trivial: &[f64]) -> Result<Self> {
        let n = mat.nrows();
        if mat.ncols() != n || trivial.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mat.ncols().max(trivial.len()),
            });
        }
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                asym = asym.max((mat[(i, j)] - mat[(j, i)]).abs());
            }
        }
        if asym > 1e-12 {
            return Err(Error::NumericalFailure(format!(
                "density matrix asymmetry {asym:.3e}"
            )));
        }
        let dm = DensityMatrix { mat };
        let res = dm.residuals(trivial);
        if res.psd > 1e-10 {
            return Err(Error::NumericalFailure(format!(
                "density matrix has eigenvalue below -1e-10 (violation {:.3e})",
                res.psd
            )));
        }
        if res.trace > 1e-10 {
            return Err(Error::NumericalFailure(format!(
                "density matrix trace off by {:.3e}",
                res.trace
            )));
        }
        if res.trivial > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "density matrix leaks {:.3e} along the trivial direction",
                res.trivial
            )));
        }
        Ok(dm)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    pub fn residuals(&self, trivial: &[f64]) -> FeasibilityResiduals {
        let n = self.n();
        let eigs = self.mat.clone().symmetric_eigen().eigenvalues;
        let min_eig = eigs.iter().fold(f64::INFINITY, |m, &e| m.min(e));
        let mut leak = 0.0f64;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.mat[(i, j)] * trivial[j];
            }
            leak += acc * acc;
        }
        FeasibilityResiduals {
            psd: (-min_eig).max(0.0),
            trace: (self.mat.trace() - 1.0).abs(),
            trivial: leak.sqrt(),
        }
    }
}

/// Orthonormal basis (as columns) of the hyperplane orthogonal to the unit
/// vector `q`, via a Householder reflector.
pub fn complement_basis(q: &[f64]) -> DMatrix<f64> {
    let n = q.len();
    let mut v: Vec<f64> = q.to_vec();
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vtv: f64 = v.iter().map(|x| x * x).sum();
    DMatrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let e = if i == col { 1.0 } else { 0.0 };
        e - 2.0 * v[i] * v[col] / vtv
    })
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(w: &mut [f64]) {
    let mut sorted = w.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let candidate = (acc - 1.0) / (i + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    for v in w.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PgOptions {
    pub max_iters: usize,
    /// Sliding-window length for the relative-decrease stop rule.
    pub window: usize,
    pub rel_tol: f64,
    pub step_init: f64,
    /// Gradient-mapping norm below which the iterate counts as stationary.
    pub grad_tol: f64,
}

impl Default for PgOptions {
    fn default() -> Self {
        PgOptions {
            max_iters: 200_000,
            window: 400,
            rel_tol: 1e-15,
            step_init: 1.0,
            grad_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PgSolution {
    pub density: DensityMatrix,
    pub objective: f64,
    /// Objective value of the accepted iterate, per iteration (non-increasing).
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

/// Projected-gradient solver over `{X >= 0, Tr X = 1, X q = 0}`.
///
/// The constraint along the trivial direction is enforced by explicit basis
/// restriction: iterates live in the (n-1)-dimensional complement of `q` and
/// are lifted back only when the callables are evaluated. The projection
/// eigendecomposes the iterate and projects its spectrum onto the simplex.
///
/// Steps are chosen by backtracking halving against the local quadratic
/// model, with a monotone accelerated update: momentum follows the
/// proposals, but the incumbent only moves to improving points and momentum
/// restarts after a bounded run of rejections. The recorded objective
/// sequence is therefore non-increasing.
pub fn projected_gradient_sdp<FObj, FGrad>(
    graph: &Graph,
    objective: FObj,
    gradient: FGrad,
    opts: &PgOptions,
) -> Result<PgSolution>
where
    FObj: Fn(&DMatrix<f64>) -> f64,
    FGrad: Fn(&DMatrix<f64>) -> DMatrix<f64>,
{
    let n = graph.n();
    check_dense_limit(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "projected gradient needs at least two nodes".into(),
        ));
    }
    let q = graph.sqrt_degree_unit();
    let basis = complement_basis(q.as_slice());
    let m = n - 1;

    let lift = |xr: &DMatrix<f64>| -> DMatrix<f64> { &basis * xr * basis.transpose() };
    let f = |xr: &DMatrix<f64>| -> f64 { objective(&lift(xr)) };
    let grad_reduced = |xr: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let g_full = gradient(&lift(xr));
        if g_full.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(
                "gradient produced non-finite values".into(),
            ));
        }
        Ok(basis.transpose() * g_full * &basis)
    };
    let project = |xr: &DMatrix<f64>| -> DMatrix<f64> {
        let sym = (xr + xr.transpose()) * 0.5;
        let se = sym.symmetric_eigen();
        let mut weights: Vec<f64> = se.eigenvalues.iter().copied().collect();
        project_simplex(&mut weights);
        let mut out = DMatrix::<f64>::zeros(m, m);
        for (k, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                let col = se.eigenvectors.column(k);
                for i in 0..m {
                    for j in 0..m {
                        out[(i, j)] += w * col[i] * col[j];
                    }
                }
            }
        }
        out
    };

    let mut x = DMatrix::<f64>::identity(m, m) / m as f64;
    let mut x_prev = x.clone();
    let mut y = x.clone();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::NumericalFailure(
            "objective not finite at the feasible start".into(),
        ));
    }
    let mut t_momentum = 1.0f64;
    let mut step = opts.step_init;
    let mut history = vec![fx];
    let restart_patience = 8usize;
    let mut rejections = 0usize;

    for iter in 0..opts.max_iters {
        // Momentum extrapolation can leave the domain of a barrier objective;
        // restart from the incumbent when it does.
        let mut fy = f(&y);
        if !fy.is_finite() {
            y = x.clone();
            t_momentum = 1.0;
            fy = fx;
        }
        let gy = grad_reduced(&y)?;
        // Backtracking: quadratic upper-bound test at the proposed point.
        let mut z;
        let mut fz;
        loop {
            z = project(&(&y - &gy * step));
            fz = f(&z);
            let diff = &z - &y;
            let lin = gy.dot(&diff);
            let quad = diff.norm_squared() / (2.0 * step);
            if fz.is_finite() && fz <= fy + lin + quad + 1e-15 * (1.0 + fy.abs()) {
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return Err(Error::NumericalFailure(
                    "projected-gradient line search collapsed".into(),
                ));
            }
        }
        // Stationarity via the gradient mapping at the evaluation point.
        let mapping_norm = (&z - &y).norm() / step;
        let improved = fz <= fx;
        let x_next = if improved { z.clone() } else { x.clone() };
        let fx_next = if improved { fz } else { fx };
        if improved {
            rejections = 0;
        } else {
            rejections += 1;
        }
        if rejections > restart_patience {
            rejections = 0;
            t_momentum = 1.0;
            y = x.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_momentum * t_momentum).sqrt());
            y = &x_next
                + (&z - &x_next) * (t_momentum / t_next)
                + (&x_next - &x_prev) * ((t_momentum - 1.0) / t_next);
            t_momentum = t_next;
        }
        x_prev = x;
        x = x_next;
        fx = fx_next;
        history.push(fx);
        step *= 1.2;

        let w = opts.window;
        let k = history.len() - 1;
        let plateaued =
            k >= w && history[k - w] - history[k] <= opts.rel_tol * (1.0 + history[k].abs());
        if mapping_norm <= opts.grad_tol || plateaued {
            let full = lift(&project(&x));
            let density = DensityMatrix::new(full, q.as_slice())?;
            return Ok(PgSolution {
                density,
                objective: fx,
                objective_history: history,
                iterations: iter + 1,
            });
        }
    }
    Err(Error::NonConvergence(opts.max_iters))
}
