//! Parameter sweeps over (tau, u) planes and extrapolation in atom number.

use rayon::prelude::*;

use crate::error::{QfiError, Result, SweepPointFailure};
use crate::qfi::{evaluate_point, QfiPoint};
use crate::spin::HamiltonianParams;

/// Per-point results kept by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub fisher_scaled: f64,
    pub fisher_max: f64,
    pub ell_max: f64,
    pub ell_min: f64,
}

impl SweepCell {
    pub fn from_point(point: &QfiPoint) -> Self {
        Self {
            fisher_scaled: point.fisher_scaled,
            fisher_max: point.fisher_max,
            ell_max: point.ell_max,
            ell_min: point.ell_min,
        }
    }
}

/// Rectangular sweep result, stored row-major with u as the outer (row)
/// index and tau as the inner (column) index.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    tau_axis: Vec<f64>,
    u_axis: Vec<f64>,
    eps: f64,
    n_atoms: usize,
    cells: Vec<SweepCell>,
}

fn validate_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() || axis.iter().any(|v| !v.is_finite()) {
        return Err(QfiError::InvalidAxis { name });
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QfiError::InvalidAxis { name });
    }
    Ok(())
}

impl SweepGrid {
    /// Reassembles a grid from cells laid out row-major (u outer, tau inner),
    /// e.g. when re-importing persisted sweep output.
    pub fn from_cells(
        tau_axis: Vec<f64>,
        u_axis: Vec<f64>,
        eps: f64,
        n_atoms: usize,
        cells: Vec<SweepCell>,
    ) -> Result<Self> {
        validate_axis("tau", &tau_axis)?;
        validate_axis("u", &u_axis)?;
        if !eps.is_finite() {
            return Err(QfiError::NonFiniteParam { name: "eps" });
        }
        if cells.len() != tau_axis.len() * u_axis.len() {
            return Err(QfiError::GridMismatch {
                reason: format!(
                    "{} cells for a {} x {} grid",
                    cells.len(),
                    u_axis.len(),
                    tau_axis.len()
                ),
            });
        }
        Ok(Self {
            tau_axis,
            u_axis,
            eps,
            n_atoms,
            cells,
        })
    }

    pub fn tau_axis(&self) -> &[f64] {
        &self.tau_axis
    }

    pub fn u_axis(&self) -> &[f64] {
        &self.u_axis
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn cell(&self, u_index: usize, tau_index: usize) -> &SweepCell {
        &self.cells[u_index * self.tau_axis.len() + tau_index]
    }

    pub fn cells(&self) -> &[SweepCell] {
        &self.cells
    }

    /// f_M values as a matrix indexed [u][tau].
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.u_axis
            .iter()
            .enumerate()
            .map(|(iu, _)| {
                (0..self.tau_axis.len())
                    .map(|it| self.cell(iu, it).fisher_scaled)
                    .collect()
            })
            .collect()
    }
}

/// Evaluates the pipeline on the tau x u grid at fixed eps and N.
///
/// Points are distributed over a thread pool (`parallelism` = None uses the
/// global pool) but assembled by index, so the result is identical however
/// many workers run. Failures are collected with their coordinates instead
/// of aborting on the first one.
pub fn sweep(
    tau_axis: &[f64],
    u_axis: &[f64],
    eps: f64,
    n_atoms: usize,
    parallelism: Option<usize>,
) -> Result<SweepGrid> {
    validate_axis("tau", tau_axis)?;
    validate_axis("u", u_axis)?;
    if !eps.is_finite() {
        return Err(QfiError::NonFiniteParam { name: "eps" });
    }
    if n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }

    let n_tau = tau_axis.len();
    let total = n_tau * u_axis.len();
    let run = || -> Vec<std::result::Result<SweepCell, SweepPointFailure>> {
        (0..total)
            .into_par_iter()
            .map(|idx| {
                let tau = tau_axis[idx % n_tau];
                let u = u_axis[idx / n_tau];
                HamiltonianParams::new(tau, eps, u, n_atoms)
                    .and_then(|p| evaluate_point(&p))
                    .map(|point| SweepCell::from_point(&point))
                    .map_err(|e| SweepPointFailure {
                        tau,
                        u,
                        message: e.to_string(),
                    })
            })
            .collect()
    };

    let results = match parallelism {
        None => run(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
            .install(run),
    };

    let mut cells = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(cell) => cells.push(cell),
            Err(f) => failures.push(f),
        }
    }
    if !failures.is_empty() {
        return Err(QfiError::SweepFailed { total, failures });
    }
    SweepGrid::from_cells(tau_axis.to_vec(), u_axis.to_vec(), eps, n_atoms, cells)
}

/// Richardson extrapolation of f_M(N) to N -> infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult {
    pub n_series: Vec<usize>,
    pub values: Vec<f64>,
    /// Neville value of the interpolating polynomial in 1/N at 0.
    pub f_infinity: f64,
    /// Difference between the last two extrapolation orders.
    pub error_estimate: f64,
}

/// Extrapolates a series of (N, f_M(N)) samples to infinite atom number by
/// evaluating the interpolating polynomial in h = 1/N at h = 0 (Neville's
/// scheme). Finite-size corrections enter as a power series in 1/N, so each
/// added point cancels one more order.
pub fn richardson_extrapolate(series: &[(usize, f64)]) -> Result<ExtrapolationResult> {
    if series.len() < 3 {
        return Err(QfiError::TooFewPoints { got: series.len() });
    }
    for (i, &(n, value)) in series.iter().enumerate() {
        if n == 0 {
            return Err(QfiError::AtomsRequired);
        }
        if i > 0 && n <= series[i - 1].0 {
            return Err(QfiError::NonIncreasingAtomNumbers { n });
        }
        if !value.is_finite() {
            return Err(QfiError::NonFiniteParam { name: "f_M" });
        }
    }

    let count = series.len();
    let h: Vec<f64> = series.iter().map(|&(n, _)| 1.0 / n as f64).collect();
    // tableau[i][j]: degree-j interpolant through points i-j ..= i, at h = 0.
    let mut tableau = vec![vec![0.0f64; count]; count];
    for (i, &(_, value)) in series.iter().enumerate() {
        tableau[i][0] = value;
    }
    for j in 1..count {
        for i in j..count {
            let num = h[i - j] * tableau[i][j - 1] - h[i] * tableau[i - 1][j - 1];
            tableau[i][j] = num / (h[i - j] - h[i]);
        }
    }

    let f_infinity = tableau[count - 1][count - 1];
    let error_estimate = (f_infinity - tableau[count - 2][count - 2]).abs();
    Ok(ExtrapolationResult {
        n_series: series.iter().map(|&(n, _)| n).collect(),
        values: series.iter().map(|&(_, v)| v).collect(),
        f_infinity,
        error_estimate,
    })
}

/// Largest |f_M(tau, u) - f_M(tau, -u)| between a grid over positive u and
/// its mirror over negative u. The grids must share tau axis, eps, and N,
/// and the u axes must be exact mirrors.
pub fn u_sign_symmetry_report(grid_pos: &SweepGrid, grid_neg: &SweepGrid) -> Result<f64> {
    if grid_pos.n_atoms() != grid_neg.n_atoms() {
        return Err(QfiError::GridMismatch {
            reason: format!(
                "atom numbers differ: {} vs {}",
                grid_pos.n_atoms(),
                grid_neg.n_atoms()
            ),
        });
    }
    if grid_pos.eps() != grid_neg.eps() {
        return Err(QfiError::GridMismatch {
            reason: format!("eps differs: {} vs {}", grid_pos.eps(), grid_neg.eps()),
        });
    }
    if grid_pos.tau_axis() != grid_neg.tau_axis() {
        return Err(QfiError::GridMismatch {
            reason: "tau axes differ".into(),
        });
    }
    let nu = grid_pos.u_axis().len();
    if nu != grid_neg.u_axis().len() {
        return Err(QfiError::GridMismatch {
            reason: "u axis lengths differ".into(),
        });
    }
    for (i, &u) in grid_pos.u_axis().iter().enumerate() {
        if grid_neg.u_axis()[nu - 1 - i] != -u {
            return Err(QfiError::GridMismatch {
                reason: format!("u axes are not mirrored at index {i}"),
            });
        }
    }

    let mut worst = 0.0f64;
    for iu in 0..nu {
        for it in 0..grid_pos.tau_axis().len() {
            let a = grid_pos.cell(iu, it).fisher_scaled;
            let b = grid_neg.cell(nu - 1 - iu, it).fisher_scaled;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
