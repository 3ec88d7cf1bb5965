//! Exact solutions of the regularized trace objective over density matrices,
//! and the equivalence checks between diffusion operators and those optima.
//!
//! The regularized program minimizes `Tr(L X) + G(X)/eta` over the density
//! matrices annihilating the trivial direction. Because every supported
//! regularizer is a unitarily-invariant spectral function, the optimum is
//! diagonal in the Laplacian eigenbasis restricted to the complement, and the
//! reduced problem over eigenvalue weights has a closed form (entropy) or a
//! one-dimensional dual root (log-det, p-norm). Those closed forms are
//! derived from first-order optimality and are validated against the
//! independent projected-gradient oracle in the tests.

use nalgebra::{DMatrix, DVector};

use crate::diffusion::DiffusionKind;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{
    complement_basis, dense_eigendecompose, dense_matrix, projected_gradient_sdp, DensityMatrix,
    PgOptions, PgSolution, SpectralDecomposition,
};
use crate::MatrixKind;

/// Choice of spectral regularizer `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerFamily {
    /// `G(X) = Tr(X ln X)`; optimum has Gibbs weights `exp(-eta l_i)`.
    GeneralizedEntropy,
    /// `G(X) = -ln det(X)` on the complement; optimum `1/(eta (l_i + nu))`.
    LogDet,
    /// `G(X) = Tr(X^p)/p`, `p > 1`; optimum `max(0, c - eta l_i)^{1/(p-1)}`.
    PNorm { p: f64 },
}

impl RegularizerFamily {
    pub fn validate(&self) -> Result<()> {
        if let RegularizerFamily::PNorm { p } = *self {
            if !(p > 1.0) {
                return Err(Error::InvalidParameter(format!("p-norm exponent {p} must be > 1")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            RegularizerFamily::GeneralizedEntropy => "entropy".into(),
            RegularizerFamily::LogDet => "logdet".into(),
            RegularizerFamily::PNorm { p } => format!("pnorm;p={p}"),
        }
    }
}

/// Regularizer with its strength `eta > 0` (larger eta, weaker smoothing).
#[derive(Debug, Clone, Copy)]
pub struct RegularizerKind {
    pub family: RegularizerFamily,
    pub eta: f64,
}

impl RegularizerKind {
    pub fn new(family: RegularizerFamily, eta: f64) -> Result<Self> {
        family.validate()?;
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta {eta} must be positive")));
        }
        Ok(RegularizerKind { family, eta })
    }
}

fn connected_eigens(graph: &Graph) -> Result<SpectralDecomposition> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    if graph.n() < 2 {
        return Err(Error::InvalidParameter("need at least two nodes".into()));
    }
    dense_eigendecompose(graph, MatrixKind::NormalizedLaplacian)
}

/// Assemble `sum_i w_i v_{i+1} v_{i+1}^T` over the nontrivial eigenvectors.
fn density_from_weights(
    graph: &Graph,
    eig: &SpectralDecomposition,
    weights: &[f64],
) -> Result<DensityMatrix> {
    let n = graph.n();
    let mut x = DMatrix::<f64>::zeros(n, n);
    for (k, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            let col = eig.eigenvectors.column(k + 1);
            for i in 0..n {
                for j in i..n {
                    let add = w * col[i] * col[j];
                    x[(i, j)] += add;
                    if i != j {
                        x[(j, i)] += add;
                    }
                }
            }
        }
    }
    DensityMatrix::new(x, graph.sqrt_degree_unit().as_slice())
}

/// Exact solution plus diagnostics for the unregularized program.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub density: DensityMatrix,
    /// Optimal objective `Tr(L X) = lambda_2`.
    pub objective: f64,
    /// Whether lambda_2 is within 1e-10 of lambda_3, in which case the
    /// solution is the (scaled) eigenspace projector rather than rank one.
    pub degenerate: bool,
}

/// Minimize `Tr(L X)` over the density matrices: the trace-normalized
/// projector onto the lambda_2 eigenspace.
pub fn solve_unregularized_sdp(graph: &Graph) -> Result<SdpSolution> {
    let eig = connected_eigens(graph)?;
    let lambdas = &eig.eigenvalues[1..];
    let lambda2 = lambdas[0];
    let count = lambdas.iter().filter(|&&l| l - lambda2 <= 1e-10).count();
    let mut weights = vec![0.0; lambdas.len()];
    for w in weights.iter_mut().take(count) {
        *w = 1.0 / count as f64;
    }
    let density = density_from_weights(graph, &eig, &weights)?;
    let objective: f64 = lambdas[..count].iter().sum::<f64>() / count as f64;
    Ok(SdpSolution {
        density,
        objective,
        degenerate: count > 1,
    })
}

/// Gibbs weights `exp(-eta l_i)`, computed with a max shift so extreme eta
/// stays representable.
fn entropy_weights(lambdas: &[f64], eta: f64) -> Vec<f64> {
    let lmin = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = lambdas.iter().map(|&l| (-eta * (l - lmin)).exp()).collect();
    let z: f64 = w.iter().sum();
    for v in &mut w {
        *v /= z;
    }
    w
}

/// Weights `1/(eta (l_i + nu))` with `nu` root-found so they sum to one.
fn logdet_weights(lambdas: &[f64], eta: f64) -> Result<(Vec<f64>, f64)> {
    let lmin = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let total = |nu: f64| -> f64 { lambdas.iter().map(|&l| 1.0 / (eta * (l + nu))).sum() };
    let mut delta = 1.0f64;
    while total(-lmin + delta) < 1.0 {
        delta *= 0.5;
        if delta < 1e-300 {
            return Err(Error::BisectionFailure(format!(
                "log-det dual has no bracket at eta={eta}"
            )));
        }
    }
    let mut lo = -lmin + delta;
    let mut hi = -lmin + delta.max(1.0);
    while total(hi) > 1.0 {
        hi = -lmin + (hi + lmin) * 2.0;
        if !(hi.is_finite()) {
            return Err(Error::BisectionFailure(format!(
                "log-det dual unbounded at eta={eta}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu = 0.5 * (lo + hi);
    let mut w: Vec<f64> = lambdas.iter().map(|&l| 1.0 / (eta * (l + nu))).collect();
    let z: f64 = w.iter().sum();
    for v in &mut w {
        *v /= z;
    }
    Ok((w, nu))
}

/// Weights `max(0, c - eta l_i)^{1/(p-1)}` with `c` root-found so they sum
/// to one.
fn pnorm_weights(lambdas: &[f64], eta: f64, p: f64) -> Result<(Vec<f64>, f64)> {
    let exponent = 1.0 / (p - 1.0);
    let total = |c: f64| -> f64 {
        lambdas
            .iter()
            .map(|&l| (c - eta * l).max(0.0).powf(exponent))
            .sum()
    };
    let lmin = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = eta * lmin;
    let mut hi = eta * lmax + 1.0;
    while total(hi) < 1.0 {
        hi = eta * lmax + (hi - eta * lmax) * 2.0;
        if !hi.is_finite() {
            return Err(Error::BisectionFailure(format!(
                "p-norm dual unbounded at eta={eta}, p={p}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let mut w: Vec<f64> = lambdas
        .iter()
        .map(|&l| (c - eta * l).max(0.0).powf(exponent))
        .collect();
    let z: f64 = w.iter().sum();
    if !(z > 0.0) {
        return Err(Error::BisectionFailure(format!(
            "p-norm weights vanished at eta={eta}, p={p}"
        )));
    }
    for v in &mut w {
        *v /= z;
    }
    Ok((w, c))
}

fn regularizer_weights(family: RegularizerFamily, eta: f64, lambdas: &[f64]) -> Result<Vec<f64>> {
    match family {
        RegularizerFamily::GeneralizedEntropy => Ok(entropy_weights(lambdas, eta)),
        RegularizerFamily::LogDet => logdet_weights(lambdas, eta).map(|(w, _)| w),
        RegularizerFamily::PNorm { p } => pnorm_weights(lambdas, eta, p).map(|(w, _)| w),
    }
}

/// Exact optimum of `Tr(L X) + G(X)/eta` over the density matrices, by
/// spectral reduction.
pub fn solve_regularized_sdp(graph: &Graph, reg: &RegularizerKind) -> Result<DensityMatrix> {
    reg.family.validate()?;
    if !(reg.eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta {} must be positive", reg.eta)));
    }
    let eig = connected_eigens(graph)?;
    let weights = regularizer_weights(reg.family, reg.eta, &eig.eigenvalues[1..])?;
    density_from_weights(graph, &eig, &weights)
}

/// `exp(scale * m)` for symmetric `m`, by scaling-and-squaring of a Taylor
/// polynomial. This deliberately avoids the eigendecomposition route so the
/// heat operator and the closed-form optimum are computed independently.
fn expm_symmetric(m: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let magnitude = m.norm() * scale.abs();
    let squarings = if magnitude > 0.5 {
        (magnitude / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m * (scale / 2f64.powi(squarings));
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut acc = DMatrix::<f64>::identity(n, n);
    for j in 1..=18 {
        term = (&term * &a) / j as f64;
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Dense similarity matrix `D^{-1/2} A D^{-1/2} = I - L_norm`.
fn dense_similarity(graph: &Graph) -> Result<DMatrix<f64>> {
    let lap = dense_matrix(graph, MatrixKind::NormalizedLaplacian)?;
    Ok(DMatrix::<f64>::identity(graph.n(), graph.n()) - lap)
}

/// Symmetric dynamics operator of a diffusion, before projection.
fn dense_operator(graph: &Graph, kind: &DiffusionKind) -> Result<DMatrix<f64>> {
    kind.validate()?;
    match *kind {
        DiffusionKind::HeatKernel { t } => {
            let lap = dense_matrix(graph, MatrixKind::NormalizedLaplacian)?;
            Ok(expm_symmetric(&lap, -t))
        }
        DiffusionKind::PageRank { gamma } => {
            let n = graph.n();
            let sys = DMatrix::<f64>::identity(n, n) - dense_similarity(graph)? * (1.0 - gamma);
            let inv = sys
                .lu()
                .try_inverse()
                .ok_or_else(|| Error::NumericalFailure("resolvent inversion failed".into()))?;
            Ok(inv * gamma)
        }
        DiffusionKind::LazyWalk { alpha, steps } => {
            let n = graph.n();
            let base = DMatrix::<f64>::identity(n, n) * alpha
                + dense_similarity(graph)? * (1.0 - alpha);
            // Power by squaring.
            let mut result = DMatrix::<f64>::identity(n, n);
            let mut factor = base;
            let mut k = steps;
            while k > 0 {
                if k & 1 == 1 {
                    result = &result * &factor;
                }
                factor = &factor * &factor;
                k >>= 1;
            }
            Ok(result)
        }
    }
}

/// Full diffusion operator as a density matrix: symmetrized dynamics,
/// projected off the trivial direction, trace-normalized.
///
/// PageRank and the lazy walk are conjugated by `D^{+-1/2}` into their
/// symmetric representation; the lazy walk needs `alpha >= 1/2` for the
/// resulting operator to be PSD.
pub fn diffusion_operator(graph: &Graph, kind: &DiffusionKind) -> Result<DensityMatrix> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = graph.n();
    let op = dense_operator(graph, kind)?;
    let q = graph.sqrt_degree_unit();
    let qv = DVector::from_column_slice(q.as_slice());
    let projector = DMatrix::<f64>::identity(n, n) - &qv * qv.transpose();
    let projected = &projector * op * &projector;
    let symmetric = (&projected + projected.transpose()) * 0.5;
    let trace = symmetric.trace();
    if !(trace > 1e-300) {
        return Err(Error::NumericalFailure(format!(
            "projected operator trace {trace} too small to normalize"
        )));
    }
    DensityMatrix::new(symmetric / trace, q.as_slice()).map_err(|e| {
        if matches!(kind, DiffusionKind::LazyWalk { alpha, .. } if *alpha < 0.5) {
            Error::InvalidParameter(format!(
                "lazy-walk operator is not PSD for alpha < 1/2: {e}"
            ))
        } else {
            e
        }
    })
}

/// Eigenweights of a density matrix along the nontrivial eigenvectors.
fn operator_weights(eig: &SpectralDecomposition, x: &DensityMatrix) -> Vec<f64> {
    let n = eig.n();
    let mut w = Vec::with_capacity(n - 1);
    for k in 1..n {
        let col = eig.eigenvectors.column(k);
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += x.matrix()[(i, j)] * col[j];
            }
            acc += col[i] * row;
        }
        w.push(acc);
    }
    w
}

/// Group nontrivial eigenvalues by value (1e-9 tolerance) and average the
/// operator weights within each group.
fn grouped_weights(lambdas: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for (&l, &w) in lambdas.iter().zip(weights) {
        match groups.last_mut() {
            Some((gl, gw, count)) if (l - *gl).abs() <= 1e-9 => {
                *gw += w;
                *count += 1;
            }
            _ => groups.push((l, w, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(l, w, count)| (l, w / count as f64))
        .collect()
}

/// Calibrate the log-det strength from a PageRank operator's spectrum by
/// matching the weight ratio of the two smallest distinct eigenvalues, then
/// normalizing. Falls back to the analytic shift when the spectrum has a
/// single distinct nontrivial eigenvalue.
fn calibrate_logdet_eta(lambdas: &[f64], weights: &[f64], gamma: f64) -> f64 {
    let fallback = gamma / (1.0 - gamma);
    let groups = grouped_weights(lambdas, weights);
    let nu = if groups.len() >= 2 {
        let (la, wa) = groups[0];
        let (lb, wb) = groups[1];
        if wa > wb && wb > 0.0 {
            let candidate = (wb * lb - wa * la) / (wa - wb);
            if candidate > -la && candidate.is_finite() {
                candidate
            } else {
                fallback
            }
        } else {
            fallback
        }
    } else {
        fallback
    };
    lambdas.iter().map(|&l| 1.0 / (l + nu)).sum()
}

/// Calibrate the p-norm strength from a lazy-walk operator's spectrum: the
/// weight ratio of the two smallest distinct eigenvalues fixes the shape
/// parameter, normalization fixes eta.
fn calibrate_pnorm_eta(lambdas: &[f64], weights: &[f64], p: f64, alpha: f64) -> Result<f64> {
    let exponent = 1.0 / (p - 1.0);
    let fallback_sigma = 1.0 / (1.0 - alpha);
    let groups = grouped_weights(lambdas, weights);
    let sigma = if groups.len() >= 2 {
        let (la, wa) = groups[0];
        let (lb, wb) = groups[1];
        if wa > wb && wb > 0.0 {
            let tau = (wa / wb).powf(p - 1.0);
            let candidate = (tau * lb - la) / (tau - 1.0);
            if candidate > la && candidate.is_finite() {
                candidate
            } else {
                fallback_sigma
            }
        } else {
            fallback_sigma
        }
    } else {
        fallback_sigma
    };
    let total: f64 = lambdas
        .iter()
        .map(|&l| (sigma - l).max(0.0).powf(exponent))
        .sum();
    if !(total > 0.0) {
        return Err(Error::BisectionFailure(format!(
            "p-norm calibration degenerate at p={p}, alpha={alpha}"
        )));
    }
    Ok(total.powf(-(p - 1.0)))
}

/// Objective `Tr(L X) + G(X)/eta`, with `G` evaluated on the spectrum of the
/// basis-restricted matrix. Infinite for log-det at the PSD boundary.
pub fn regularized_objective(graph: &Graph, x: &DensityMatrix, reg: &RegularizerKind) -> Result<f64> {
    let lap = dense_matrix(graph, MatrixKind::NormalizedLaplacian)?;
    let q = graph.sqrt_degree_unit();
    let basis = complement_basis(q.as_slice());
    Ok(objective_with(&lap, &basis, x.matrix(), reg))
}

fn spectral_penalty(mu: &[f64], family: RegularizerFamily) -> f64 {
    match family {
        RegularizerFamily::GeneralizedEntropy => mu
            .iter()
            .map(|&m| if m > 0.0 { m * m.ln() } else { 0.0 })
            .sum(),
        RegularizerFamily::LogDet => {
            let mut acc = 0.0;
            for &m in mu {
                if m <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= m.ln();
            }
            acc
        }
        RegularizerFamily::PNorm { p } => mu.iter().map(|&m| m.max(0.0).powf(p) / p).sum(),
    }
}

fn objective_with(
    lap: &DMatrix<f64>,
    basis: &DMatrix<f64>,
    x: &DMatrix<f64>,
    reg: &RegularizerKind,
) -> f64 {
    let tr_lx = (lap * x).trace();
    let reduced = basis.transpose() * x * basis;
    let mu: Vec<f64> = reduced.symmetric_eigen().eigenvalues.iter().copied().collect();
    tr_lx + spectral_penalty(&mu, reg.family) / reg.eta
}

/// Outcome of one diffusion-vs-regularized-optimum comparison.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub graph_id: String,
    pub dynamics: String,
    pub param: String,
    pub regularizer: String,
    pub eta: f64,
    pub frobenius_gap: f64,
    pub objective_gap: f64,
    pub psd_resid: f64,
    pub trace_resid: f64,
    pub trivial_resid: f64,
    pub degenerate: bool,
}

impl EquivalenceReport {
    pub fn csv_header() -> &'static str {
        "graph_id,dynamics,param,regularizer,eta,frobenius_gap,objective_gap,psd_resid,trace_resid,trivial_resid,degenerate_flag"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.graph_id,
            self.dynamics,
            self.param,
            self.regularizer,
            self.eta,
            self.frobenius_gap,
            self.objective_gap,
            self.psd_resid,
            self.trace_resid,
            self.trivial_resid,
            if self.degenerate { 1 } else { 0 }
        )
    }
}

/// Build both sides of the correspondence and measure the gap.
///
/// Pairings follow the dynamics/regularizer correspondence (heat kernel with
/// entropy, PageRank with log-det, lazy walk with the p-norm); eta is
/// calibrated from the diffusion parameter (heat time maps to eta directly,
/// the other two are spectrum-matched). Anything else is an unsupported
/// pairing.
pub fn verify_equivalence(
    graph: &Graph,
    graph_id: &str,
    kind: &DiffusionKind,
    family: &RegularizerFamily,
) -> Result<EquivalenceReport> {
    family.validate()?;
    kind.validate()?;
    match (kind, family) {
        (DiffusionKind::HeatKernel { t }, RegularizerFamily::GeneralizedEntropy) => {
            if !(*t > 0.0) {
                return Err(Error::InvalidParameter(
                    "equivalence check needs t > 0".into(),
                ));
            }
        }
        (DiffusionKind::PageRank { gamma }, RegularizerFamily::LogDet) => {
            if !(*gamma < 1.0) {
                return Err(Error::InvalidParameter(
                    "equivalence check needs gamma < 1".into(),
                ));
            }
        }
        (DiffusionKind::LazyWalk { .. }, RegularizerFamily::PNorm { .. }) => {}
        (kind, family) => {
            return Err(Error::UnsupportedPairing(format!(
                "{} with {}",
                kind.name(),
                family.name()
            )))
        }
    }

    let operator = diffusion_operator(graph, kind)?;
    let eig = connected_eigens(graph)?;
    let lambdas = &eig.eigenvalues[1..];
    let weights = operator_weights(&eig, &operator);
    let eta = match (kind, family) {
        (DiffusionKind::HeatKernel { t }, _) => *t,
        (DiffusionKind::PageRank { gamma }, _) => calibrate_logdet_eta(lambdas, &weights, *gamma),
        (DiffusionKind::LazyWalk { alpha, .. }, RegularizerFamily::PNorm { p }) => {
            calibrate_pnorm_eta(lambdas, &weights, *p, *alpha)?
        }
        _ => unreachable!(),
    };
    let reg = RegularizerKind::new(*family, eta)?;
    let optimum = density_from_weights(graph, &eig, &regularizer_weights(reg.family, eta, lambdas)?)?;

    let lap = dense_matrix(graph, MatrixKind::NormalizedLaplacian)?;
    let q = graph.sqrt_degree_unit();
    let basis = complement_basis(q.as_slice());
    let obj_diffusion = objective_with(&lap, &basis, operator.matrix(), &reg);
    let obj_optimum = objective_with(&lap, &basis, optimum.matrix(), &reg);
    let residuals = operator.residuals(q.as_slice());
    let degenerate = lambdas.len() >= 2 && lambdas[1] - lambdas[0] <= 1e-10;

    Ok(EquivalenceReport {
        graph_id: graph_id.to_string(),
        dynamics: kind.name().to_string(),
        param: kind.param_string(),
        regularizer: family.name(),
        eta,
        frobenius_gap: operator.frobenius_distance(&optimum),
        objective_gap: (obj_diffusion - obj_optimum).abs(),
        psd_resid: residuals.psd,
        trace_resid: residuals.trace,
        trivial_resid: residuals.trivial,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct PnormFitRow {
    pub p: f64,
    pub eta: f64,
    pub frobenius_gap: f64,
}

/// Best-fit report for the lazy-walk/p-norm correspondence, where the exact
/// exponent is an open question: the gap is measured over a p-grid rather
/// than asserted at a single p.
#[derive(Debug, Clone)]
pub struct PnormFitReport {
    pub alpha: f64,
    pub steps: usize,
    pub rows: Vec<PnormFitRow>,
    pub best_index: usize,
    /// Whether the gap decreases monotonically toward the best-fit p from
    /// both ends of the grid.
    pub unimodal_toward_best: bool,
}

impl PnormFitReport {
    pub fn best(&self) -> PnormFitRow {
        self.rows[self.best_index]
    }
}

/// Fit the p-norm exponent to a lazy-walk operator over a p-grid.
pub fn pnorm_fit(graph: &Graph, alpha: f64, steps: usize, p_grid: &[f64]) -> Result<PnormFitReport> {
    if p_grid.is_empty() {
        return Err(Error::InvalidParameter("empty p grid".into()));
    }
    let kind = DiffusionKind::LazyWalk { alpha, steps };
    let operator = diffusion_operator(graph, &kind)?;
    let eig = connected_eigens(graph)?;
    let lambdas = &eig.eigenvalues[1..];
    let weights = operator_weights(&eig, &operator);
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("grid p {p} must be > 1")));
        }
        let eta = calibrate_pnorm_eta(lambdas, &weights, p, alpha)?;
        let (w, _) = pnorm_weights(lambdas, eta, p)?;
        let optimum = density_from_weights(graph, &eig, &w)?;
        rows.push(PnormFitRow {
            p,
            eta,
            frobenius_gap: operator.frobenius_distance(&optimum),
        });
    }
    let mut best_index = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.frobenius_gap < rows[best_index].frobenius_gap {
            best_index = i;
        }
    }
    let max_gap = rows.iter().map(|r| r.frobenius_gap).fold(0.0, f64::max);
    let slack = 1e-12 + 1e-9 * max_gap;
    let mut unimodal = true;
    for i in 0..rows.len() - 1 {
        if i < best_index && rows[i].frobenius_gap < rows[i + 1].frobenius_gap - slack {
            unimodal = false;
        }
        if i >= best_index && rows[i + 1].frobenius_gap < rows[i].frobenius_gap - slack {
            unimodal = false;
        }
    }
    Ok(PnormFitReport {
        alpha,
        steps,
        rows,
        best_index,
        unimodal_toward_best: unimodal,
    })
}

/// Eigenvalue floor below which the oracle's barrier terms switch to their
/// C1 linear extensions. Weights below the floor are smoothed away, which
/// perturbs the optimum by at most ~sqrt(n) * floor, well under the 1e-5
/// comparison tolerances; without the extension the non-Lipschitz gradients
/// at zero break the backtracking line search, and a much smaller floor
/// makes the smoothed problem needlessly stiff.
const ORACLE_FLOOR: f64 = 1e-6;

fn smoothed_penalty(mu: f64, family: RegularizerFamily) -> f64 {
    let m0 = ORACLE_FLOOR;
    match family {
        RegularizerFamily::GeneralizedEntropy => {
            if mu >= m0 {
                mu * mu.ln()
            } else {
                m0 * m0.ln() + (m0.ln() + 1.0) * (mu - m0)
            }
        }
        RegularizerFamily::LogDet => {
            if mu >= m0 {
                -mu.ln()
            } else {
                -m0.ln() - (mu - m0) / m0
            }
        }
        RegularizerFamily::PNorm { p } => mu.max(0.0).powf(p) / p,
    }
}

fn smoothed_penalty_derivative(mu: f64, family: RegularizerFamily) -> f64 {
    let m0 = ORACLE_FLOOR;
    match family {
        RegularizerFamily::GeneralizedEntropy => mu.max(m0).ln() + 1.0,
        RegularizerFamily::LogDet => -1.0 / mu.max(m0),
        RegularizerFamily::PNorm { p } => mu.max(0.0).powf(p - 1.0),
    }
}

/// Solve the regularized program with the projected-gradient oracle instead
/// of the closed form; used to validate the closed forms independently.
pub fn pg_oracle_regularized(
    graph: &Graph,
    reg: &RegularizerKind,
    opts: &PgOptions,
) -> Result<PgSolution> {
    reg.family.validate()?;
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let lap = dense_matrix(graph, MatrixKind::NormalizedLaplacian)?;
    let q = graph.sqrt_degree_unit();
    let basis = complement_basis(q.as_slice());
    let family = reg.family;
    let eta = reg.eta;

    let lap_obj = lap.clone();
    let basis_obj = basis.clone();
    let objective = move |x: &DMatrix<f64>| -> f64 {
        let tr_lx = (&lap_obj * x).trace();
        let reduced = basis_obj.transpose() * x * &basis_obj;
        let penalty: f64 = reduced
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&mu| smoothed_penalty(mu, family))
            .sum();
        tr_lx + penalty / eta
    };

    let gradient = move |x: &DMatrix<f64>| -> DMatrix<f64> {
        let reduced = basis.transpose() * x * &basis;
        let m = reduced.nrows();
        let se = reduced.symmetric_eigen();
        let mut diag = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            diag[(k, k)] = smoothed_penalty_derivative(se.eigenvalues[k], family);
        }
        let grad_reduced = &se.eigenvectors * diag * se.eigenvectors.transpose();
        &lap + &basis * grad_reduced * basis.transpose() / eta
    };

    projected_gradient_sdp(graph, objective, gradient, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphFamily};
    use approx::assert_abs_diff_eq;

    fn single_edge() -> Graph {
        Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap()
    }

    fn dumbbell() -> Graph {
        generate(&GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0).unwrap()
    }

    #[test]
    fn unregularized_on_single_edge_is_rank_one() {
        let sol = solve_unregularized_sdp(&single_edge()).unwrap();
        assert!(!sol.degenerate);
        assert_abs_diff_eq!(sol.objective, 2.0, epsilon = 1e-12);
        let m = sol.density.matrix();
        assert_abs_diff_eq!(m[(0, 0)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(0, 1)], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn unregularized_on_dumbbell_matches_lambda2() {
        let g = dumbbell();
        let eig = dense_eigendecompose(&g, MatrixKind::NormalizedLaplacian).unwrap();
        let sol = solve_unregularized_sdp(&g).unwrap();
        assert!(!sol.degenerate);
        assert_abs_diff_eq!(sol.objective, eig.lambda2(), epsilon = 1e-12);
        // Rank one: squared Frobenius norm of a rank-1 projector is 1.
        assert_abs_diff_eq!(sol.density.matrix().norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn unregularized_on_cycle4_flags_degeneracy() {
        let g = generate(&GraphFamily::Cycle { n: 4 }, 0).unwrap();
        let sol = solve_unregularized_sdp(&g).unwrap();
        assert!(sol.degenerate);
        assert_abs_diff_eq!(sol.objective, 1.0, epsilon = 1e-10);
        // Half the projector onto the two-dimensional eigenspace.
        assert_abs_diff_eq!(sol.density.matrix().norm(), (0.5f64).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn entropy_weights_handle_extreme_eta() {
        let lambdas = [0.1, 0.5, 1.4, 2.0];
        let w = entropy_weights(&lambdas, 1e4);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        let w = entropy_weights(&lambdas, 1e-9);
        for &v in &w {
            assert_abs_diff_eq!(v, 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn small_eta_entropy_solution_is_uniform() {
        let g = dumbbell();
        let reg = RegularizerKind::new(RegularizerFamily::GeneralizedEntropy, 1e-6).unwrap();
        let x = solve_regularized_sdp(&g, &reg).unwrap();
        // Uniform over the complement: P/(n-1).
        let q = g.sqrt_degree_unit();
        let qv = DVector::from_column_slice(q.as_slice());
        let p = DMatrix::<f64>::identity(6, 6) - &qv * qv.transpose();
        assert!((x.matrix() - p / 5.0).norm() <= 1e-5);
    }

    #[test]
    fn single_edge_has_unique_feasible_point_for_all_regularizers() {
        let g = single_edge();
        let expected = solve_unregularized_sdp(&g).unwrap().density;
        for family in [
            RegularizerFamily::GeneralizedEntropy,
            RegularizerFamily::LogDet,
            RegularizerFamily::PNorm { p: 2.0 },
        ] {
            let reg = RegularizerKind::new(family, 3.0).unwrap();
            let x = solve_regularized_sdp(&g, &reg).unwrap();
            assert!(x.frobenius_distance(&expected) <= 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_projected_gradient_oracle() {
        let suites = [
            (GraphFamily::RandomRegular { n: 14, degree: 3 }, 3u64),
            (GraphFamily::Dumbbell { clique: 4, bridges: 2 }, 0),
            (GraphFamily::RingOfCliques { count: 3, size: 4 }, 0),
        ];
        let regs = [
            RegularizerKind::new(RegularizerFamily::GeneralizedEntropy, 2.0).unwrap(),
            RegularizerKind::new(RegularizerFamily::LogDet, 5.0).unwrap(),
            RegularizerKind::new(RegularizerFamily::PNorm { p: 2.0 }, 1.0).unwrap(),
        ];
        for (family, seed) in suites {
            let g = generate(&family, seed).unwrap();
            for reg in &regs {
                let closed = solve_regularized_sdp(&g, reg).unwrap();
                let oracle = pg_oracle_regularized(&g, reg, &PgOptions::default()).unwrap();
                let gap = closed.frobenius_distance(&oracle.density);
                assert!(
                    gap <= 1e-5,
                    "oracle gap {gap:.2e} for {family:?} under {:?}",
                    reg.family
                );
            }
        }
    }

    #[test]
    fn dumbbell_entropy_eta10_matches_oracle() {
        let g = dumbbell();
        let reg = RegularizerKind::new(RegularizerFamily::GeneralizedEntropy, 10.0).unwrap();
        let closed = solve_regularized_sdp(&g, &reg).unwrap();
        let opts = PgOptions {
            max_iters: 300_000,
            ..PgOptions::default()
        };
        let oracle = pg_oracle_regularized(&g, &reg, &opts).unwrap();
        let gap = closed.frobenius_distance(&oracle.density);
        assert!(gap <= 1e-6, "gap {gap:.2e}");
    }

    #[test]
    fn heat_operator_at_time_zero_is_uniform() {
        let g = dumbbell();
        let x = diffusion_operator(&g, &DiffusionKind::HeatKernel { t: 0.0 }).unwrap();
        let q = g.sqrt_degree_unit();
        let qv = DVector::from_column_slice(q.as_slice());
        let p = DMatrix::<f64>::identity(6, 6) - &qv * qv.transpose();
        assert!((x.matrix() - p / 5.0).norm() <= 1e-12);
    }

    #[test]
    fn heat_operator_on_single_edge_is_rank_one_projector() {
        let g = single_edge();
        for t in [0.2, 1.0, 7.0] {
            let x = diffusion_operator(&g, &DiffusionKind::HeatKernel { t }).unwrap();
            assert_abs_diff_eq!(x.matrix()[(0, 0)], 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(x.matrix()[(0, 1)], -0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn pagerank_operator_spectrum_matches_resolvent_formula() {
        let g = generate(&GraphFamily::Cycle { n: 4 }, 0).unwrap();
        let gamma = 0.3;
        let x = diffusion_operator(&g, &DiffusionKind::PageRank { gamma }).unwrap();
        let eig = dense_eigendecompose(&g, MatrixKind::NormalizedLaplacian).unwrap();
        let weights = operator_weights(&eig, &x);
        let raw: Vec<f64> = eig.eigenvalues[1..]
            .iter()
            .map(|&l| gamma / (1.0 - (1.0 - gamma) * (1.0 - l)))
            .collect();
        let z: f64 = raw.iter().sum();
        for (got, want) in weights.iter().zip(raw.iter().map(|r| r / z)) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn verify_heat_entropy_on_random_regular() {
        let g = generate(&GraphFamily::RandomRegular { n: 20, degree: 3 }, 1).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let report = verify_equivalence(
                &g,
                "rr20",
                &DiffusionKind::HeatKernel { t },
                &RegularizerFamily::GeneralizedEntropy,
            )
            .unwrap();
            assert!(
                report.frobenius_gap <= 1e-6,
                "t={t}: gap {:.2e}",
                report.frobenius_gap
            );
            assert_abs_diff_eq!(report.eta, t);
        }
    }

    #[test]
    fn verify_on_single_edge_is_exact() {
        let g = single_edge();
        let jobs: [(DiffusionKind, RegularizerFamily); 3] = [
            (
                DiffusionKind::HeatKernel { t: 1.0 },
                RegularizerFamily::GeneralizedEntropy,
            ),
            (DiffusionKind::PageRank { gamma: 0.5 }, RegularizerFamily::LogDet),
            (
                DiffusionKind::LazyWalk { alpha: 0.6, steps: 2 },
                RegularizerFamily::PNorm { p: 1.5 },
            ),
        ];
        for (kind, family) in jobs {
            let report = verify_equivalence(&g, "edge", &kind, &family).unwrap();
            assert!(report.frobenius_gap <= 1e-12, "{}: {}", report.dynamics, report.frobenius_gap);
        }
    }

    #[test]
    fn verify_pagerank_logdet_on_dumbbell() {
        let g = dumbbell();
        let report = verify_equivalence(
            &g,
            "dumbbell",
            &DiffusionKind::PageRank { gamma: 0.5 },
            &RegularizerFamily::LogDet,
        )
        .unwrap();
        assert!(report.frobenius_gap <= 1e-6, "gap {:.2e}", report.frobenius_gap);
        assert!(report.objective_gap <= 1e-6);
    }

    #[test]
    fn verify_flags_degenerate_spectrum() {
        let g = generate(&GraphFamily::Cycle { n: 4 }, 0).unwrap();
        let report = verify_equivalence(
            &g,
            "c4",
            &DiffusionKind::PageRank { gamma: 0.4 },
            &RegularizerFamily::LogDet,
        )
        .unwrap();
        assert!(report.degenerate);
        assert!(report.frobenius_gap <= 1e-6);
    }

    #[test]
    fn verify_rejects_mismatched_pairings() {
        let g = dumbbell();
        assert!(matches!(
            verify_equivalence(
                &g,
                "dumbbell",
                &DiffusionKind::HeatKernel { t: 1.0 },
                &RegularizerFamily::LogDet,
            )
            .unwrap_err(),
            Error::UnsupportedPairing(_)
        ));
    }

    #[test]
    fn lazy_walk_exponent_is_recovered_by_the_fit() {
        // k steps correspond to p = 1 + 1/k; the fit over a grid containing
        // that value should pick it (or its nearest neighbor) and look
        // unimodal around it.
        let g = generate(&GraphFamily::RandomRegular { n: 16, degree: 4 }, 5).unwrap();
        let steps = 2usize;
        let grid: Vec<f64> = (0..30).map(|i| 1.1 + i as f64 * 0.1).collect();
        let fit = pnorm_fit(&g, 0.6, steps, &grid).unwrap();
        let best = fit.best();
        assert!((best.p - 1.5).abs() <= 0.05 + 1e-9, "best p {}", best.p);
        assert!(fit.unimodal_toward_best);
        // At the exact exponent the correspondence is exact.
        let exact = pnorm_fit(&g, 0.6, steps, &[1.5]).unwrap();
        assert!(exact.rows[0].frobenius_gap <= 1e-9);
    }

    #[test]
    fn entropy_path_is_monotone_and_recovers_lambda2() {
        let g = dumbbell();
        let eig = dense_eigendecompose(&g, MatrixKind::NormalizedLaplacian).unwrap();
        let lap = dense_matrix(&g, MatrixKind::NormalizedLaplacian).unwrap();
        let mut last_tr = f64::INFINITY;
        let mut last_entropy = f64::INFINITY;
        for eta in [0.01, 0.1, 1.0, 10.0, 100.0, 1e4] {
            let reg = RegularizerKind::new(RegularizerFamily::GeneralizedEntropy, eta).unwrap();
            let x = solve_regularized_sdp(&g, &reg).unwrap();
            let tr = (&lap * x.matrix()).trace();
            assert!(tr <= last_tr + 1e-12);
            last_tr = tr;
            let w = entropy_weights(&eig.eigenvalues[1..], eta);
            let entropy: f64 = -w
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| v * v.ln())
                .sum::<f64>();
            assert!(entropy <= last_entropy + 1e-12);
            last_entropy = entropy;
        }
        assert_abs_diff_eq!(last_tr, eig.lambda2(), epsilon = 1e-9);
    }

    #[test]
    fn large_eta_entropy_recovers_unregularized_solution() {
        let g = dumbbell();
        let eig = dense_eigendecompose(&g, MatrixKind::NormalizedLaplacian).unwrap();
        assert!(eig.eigenvalues[2] - eig.eigenvalues[1] >= 0.1);
        let reg = RegularizerKind::new(RegularizerFamily::GeneralizedEntropy, 1e4).unwrap();
        let x = solve_regularized_sdp(&g, &reg).unwrap();
        let exact = solve_unregularized_sdp(&g).unwrap();
        assert!(x.frobenius_distance(&exact.density) <= 1e-3);
    }
}
