//! Experiments on the symmetric two-species test problem
//!
//! ```text
//! y' = [[-a, a], [a, -a]] y,   y⁰ = ½(1, 1)ᵀ + δ(1, -1)ᵀ,   0 ≤ δ < ½,
//! ```
//!
//! whose solution `½(1, 1)ᵀ + δ e^{-2at}(1, -1)ᵀ` tends to `y* = ½(1, 1)ᵀ`.
//! After `M` steps the distance `d(α, δ) = ‖y* - y^M‖∞` tells whether the
//! iteration reached the steady state or got stuck at a spurious fixed
//! point.
//!
//! Scans are described by a [`ScanPlan`] whose cells are independent, so
//! callers may evaluate them in any order or in parallel and hand the
//! outcomes back to [`ScanPlan::collect`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::scheme::{advance, StepWorkspace};
use crate::{Error, LinearPds, MprkParams, Result, State, TwoSpeciesSystem};

/// `d` below this counts as converged to the steady state.
pub const STABLE_THRESHOLD: f64 = 1e-6;
/// `d` above this counts as a spurious limit.
pub const UNSTABLE_THRESHOLD: f64 = 1e-2;

pub const STEADY_STATE: [f64; 2] = [0.5, 0.5];

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..0.5).contains(&delta) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "delta must lie in [0, 0.5), got {delta}"
        )))
    }
}

/// `y⁰ = (0.5 + δ, 0.5 - δ)`.
pub fn initial_value(delta: f64) -> Result<State> {
    check_delta(delta)?;
    State::new(0.0, vec![0.5 + delta, 0.5 - delta])
}

/// Exact solution of the test problem at time `t`.
pub fn exact_solution(delta: f64, a: f64, t: f64) -> Result<State> {
    check_delta(delta)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    let dev = delta * libm::exp(-2.0 * a * t);
    State::new(t, vec![0.5 + dev, 0.5 - dev])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub a: f64,
    pub delta: f64,
    pub alpha: f64,
    pub dt: f64,
    pub steps: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        MprkParams::new(self.alpha)?;
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Domain(format!("a must be positive, got {}", self.a)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceClass {
    Stable,
    Ambiguous,
    Unstable,
    Diverged,
}

impl DistanceClass {
    pub fn of(d: f64) -> Self {
        if !d.is_finite() {
            DistanceClass::Diverged
        } else if d < STABLE_THRESHOLD {
            DistanceClass::Stable
        } else if d > UNSTABLE_THRESHOLD {
            DistanceClass::Unstable
        } else {
            DistanceClass::Ambiguous
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceClass::Stable => "stable",
            DistanceClass::Ambiguous => "ambiguous",
            DistanceClass::Unstable => "unstable",
            DistanceClass::Diverged => "diverged",
        }
    }
}

/// Result of one run of the test problem.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Finished {
        final_state: [f64; 2],
        distance: f64,
        /// Steps actually computed; fewer than requested once the iteration
        /// became stationary.
        steps_computed: usize,
    },
    Diverged {
        step: usize,
        reason: String,
    },
}

impl CellOutcome {
    /// `d`, or infinity for a diverged run.
    pub fn distance(&self) -> f64 {
        match self {
            CellOutcome::Finished { distance, .. } => *distance,
            CellOutcome::Diverged { .. } => f64::INFINITY,
        }
    }

    pub fn class(&self) -> DistanceClass {
        DistanceClass::of(self.distance())
    }

    pub fn final_state(&self) -> Option<[f64; 2]> {
        match self {
            CellOutcome::Finished { final_state, .. } => Some(*final_state),
            CellOutcome::Diverged { .. } => None,
        }
    }
}

/// Runs `cfg.steps` steps from `initial_value(cfg.delta)` and measures the
/// distance to `y*`.
pub fn run_fixed_point_experiment(cfg: &ExperimentConfig) -> Result<CellOutcome> {
    cfg.validate()?;
    let pds = TwoSpeciesSystem::symmetric(cfg.a)?.to_linear();
    let params = MprkParams::new(cfg.alpha)?;
    let mut ws = StepWorkspace::new(2);
    Ok(run_cell(&pds, &params, cfg, &mut ws))
}

fn run_cell(
    pds: &LinearPds,
    params: &MprkParams,
    cfg: &ExperimentConfig,
    ws: &mut StepWorkspace,
) -> CellOutcome {
    let mut y = vec![0.5 + cfg.delta, 0.5 - cfg.delta];
    match advance(pds, &mut y, cfg.dt, cfg.steps, params, ws) {
        Ok(steps_computed) => CellOutcome::Finished {
            final_state: [y[0], y[1]],
            distance: (STEADY_STATE[0] - y[0])
                .abs()
                .max((STEADY_STATE[1] - y[1]).abs()),
            steps_computed,
        },
        Err(Error::Step { step, source }) => CellOutcome::Diverged {
            step,
            reason: source.to_string(),
        },
        Err(e) => CellOutcome::Diverged {
            step: 0,
            reason: e.to_string(),
        },
    }
}

/// `n` equidistant samples of δ in (0, 0.5), offset by half a cell so that
/// neither endpoint is included.
pub fn delta_axis(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 delta samples, got {n}"
        )));
    }
    let h = 0.5 / n as f64;
    Ok((0..n).map(|k| (k as f64 + 0.5) * h).collect())
}

/// `n` equidistant samples of α in `(lo, hi]`: `lo + (k+1)(hi-lo)/n`.
///
/// A sample landing on α = 0 is rejected, since the scheme is undefined
/// there.
pub fn alpha_axis(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "invalid alpha range ({lo}, {hi}] with {n} samples"
        )));
    }
    let h = (hi - lo) / n as f64;
    let tiny = 1e-12 * lo.abs().max(hi.abs());
    let axis: Vec<f64> = (0..n).map(|k| lo + (k + 1) as f64 * h).collect();
    if axis.iter().any(|a| a.abs() <= tiny) {
        return Err(Error::ZeroAlpha);
    }
    Ok(axis)
}

/// A grid of independent fixed-point experiments, α outer and δ inner.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub a: f64,
    pub dt: f64,
    pub steps: usize,
    pub alpha_axis: Vec<f64>,
    pub delta_axis: Vec<f64>,
    pds: LinearPds,
}

impl ScanPlan {
    pub fn new(
        a: f64,
        dt: f64,
        steps: usize,
        alpha_axis: Vec<f64>,
        delta_axis: Vec<f64>,
    ) -> Result<Self> {
        if alpha_axis.is_empty() || delta_axis.is_empty() {
            return Err(Error::Domain("empty scan axis".to_string()));
        }
        let pds = TwoSpeciesSystem::symmetric(a)?.to_linear();
        let plan = Self {
            a,
            dt,
            steps,
            alpha_axis,
            delta_axis,
            pds,
        };
        for &alpha in &plan.alpha_axis {
            for &delta in &plan.delta_axis {
                ExperimentConfig {
                    a,
                    delta,
                    alpha,
                    dt,
                    steps,
                }
                .validate()?;
            }
        }
        Ok(plan)
    }

    /// One α, `n_samples` values of δ.
    pub fn delta_sweep(
        alpha: f64,
        a: f64,
        dt: f64,
        steps: usize,
        n_samples: usize,
    ) -> Result<Self> {
        Self::new(a, dt, steps, vec![alpha], delta_axis(n_samples)?)
    }

    pub fn n_cells(&self) -> usize {
        self.alpha_axis.len() * self.delta_axis.len()
    }

    pub fn config(&self, index: usize) -> ExperimentConfig {
        let nd = self.delta_axis.len();
        ExperimentConfig {
            a: self.a,
            delta: self.delta_axis[index % nd],
            alpha: self.alpha_axis[index / nd],
            dt: self.dt,
            steps: self.steps,
        }
    }

    /// Evaluates cell `index` with a caller-owned workspace.
    pub fn run_cell(&self, index: usize, ws: &mut StepWorkspace) -> CellOutcome {
        let cfg = self.config(index);
        match MprkParams::new(cfg.alpha) {
            Ok(params) => run_cell(&self.pds, &params, &cfg, ws),
            Err(e) => CellOutcome::Diverged {
                step: 0,
                reason: e.to_string(),
            },
        }
    }

    /// Assembles a result from outcomes listed in cell order.
    pub fn collect(self, cells: Vec<CellOutcome>) -> Result<ScanResult> {
        if cells.len() != self.n_cells() {
            return Err(Error::Dimension {
                expected: self.n_cells(),
                got: cells.len(),
            });
        }
        Ok(ScanResult {
            alpha_axis: self.alpha_axis,
            delta_axis: self.delta_axis,
            cells,
            steps_used: self.steps,
        })
    }

    pub fn run_serial(self) -> Result<ScanResult> {
        let mut ws = StepWorkspace::new(2);
        let cells = (0..self.n_cells())
            .map(|i| self.run_cell(i, &mut ws))
            .collect();
        self.collect(cells)
    }
}

/// Serial δ-sweep at fixed α.
pub fn scan_delta(
    alpha: f64,
    a: f64,
    dt: f64,
    steps: usize,
    n_samples: usize,
) -> Result<ScanResult> {
    ScanPlan::delta_sweep(alpha, a, dt, steps, n_samples)?.run_serial()
}

/// Serial (α, δ) scan with α in `(alpha_lo, alpha_hi]`.
pub fn scan_alpha_delta(
    alpha_lo: f64,
    alpha_hi: f64,
    n_alpha: usize,
    n_delta: usize,
    a: f64,
    dt: f64,
    steps: usize,
) -> Result<ScanResult> {
    ScanPlan::new(
        a,
        dt,
        steps,
        alpha_axis(alpha_lo, alpha_hi, n_alpha)?,
        delta_axis(n_delta)?,
    )?
    .run_serial()
}

/// Transition between two neighbouring grid samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub below: f64,
    pub above: f64,
}

impl Transition {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.below + self.above)
    }

    pub fn uncertainty(&self) -> f64 {
        (self.above - self.below).abs()
    }
}

/// Distances on an α × δ grid, stored α-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub alpha_axis: Vec<f64>,
    pub delta_axis: Vec<f64>,
    pub cells: Vec<CellOutcome>,
    pub steps_used: usize,
}

impl ScanResult {
    pub fn cell(&self, i_alpha: usize, i_delta: usize) -> &CellOutcome {
        &self.cells[i_alpha * self.delta_axis.len() + i_delta]
    }

    pub fn d(&self, i_alpha: usize, i_delta: usize) -> f64 {
        self.cell(i_alpha, i_delta).distance()
    }

    pub fn row(&self, i_alpha: usize) -> &[CellOutcome] {
        let nd = self.delta_axis.len();
        &self.cells[i_alpha * nd..(i_alpha + 1) * nd]
    }

    /// `(alpha, delta, outcome)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &CellOutcome)> + '_ {
        let nd = self.delta_axis.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.alpha_axis[k / nd], self.delta_axis[k % nd], c))
    }

    /// Cells whose distance falls between the stable and unstable
    /// thresholds; these need a closer look.
    pub fn ambiguous(&self) -> Vec<(f64, f64)> {
        self.iter()
            .filter(|(_, _, c)| c.class() == DistanceClass::Ambiguous)
            .map(|(a, d, _)| (a, d))
            .collect()
    }

    /// First stable → unstable change along δ for the row `i_alpha`.
    pub fn delta_transition(&self, i_alpha: usize) -> Option<Transition> {
        let row = self.row(i_alpha);
        (1..row.len()).find_map(|k| {
            (row[k - 1].class() == DistanceClass::Stable
                && row[k].class() == DistanceClass::Unstable)
                .then(|| Transition {
                    below: self.delta_axis[k - 1],
                    above: self.delta_axis[k],
                })
        })
    }

    fn has_unstable(&self, i_alpha: usize) -> bool {
        self.row(i_alpha)
            .iter()
            .any(|c| c.class() == DistanceClass::Unstable)
    }

    /// The boundary α* below -1/2: between the last column (in increasing α)
    /// without unstable cells and the first one with an unstable cell.
    ///
    /// `None` when no column at or below -1/2 is unstable, or when the most
    /// negative column already is (the boundary lies outside the grid).
    pub fn alpha_star(&self) -> Option<Transition> {
        let mut idx: Vec<usize> = (0..self.alpha_axis.len())
            .filter(|&i| self.alpha_axis[i] <= -0.5)
            .collect();
        idx.sort_by(|&i, &j| self.alpha_axis[i].total_cmp(&self.alpha_axis[j]));
        let first = idx.iter().position(|&i| self.has_unstable(i))?;
        if first == 0 {
            return None;
        }
        Some(Transition {
            below: self.alpha_axis[idx[first - 1]],
            above: self.alpha_axis[idx[first]],
        })
    }

    /// Number of unstable cells in columns with α in `[lo, hi]`.
    pub fn unstable_count_in(&self, lo: f64, hi: f64) -> usize {
        self.iter()
            .filter(|(a, _, c)| *a >= lo && *a <= hi && c.class() == DistanceClass::Unstable)
            .count()
    }
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// `‖y_numeric(T) - y_exact(T)‖∞`, or the failure message.
    pub error: core::result::Result<f64, String>,
    /// Observed order against the previous row.
    pub order: Option<f64>,
}

/// Errors at time `horizon` for each step size and the observed orders
/// `log(e_k/e_{k+1}) / log(dt_k/dt_{k+1})`.
pub fn convergence_order(
    alpha: f64,
    a: f64,
    delta: f64,
    dt_list: &[f64],
    horizon: f64,
) -> Result<Vec<ConvergenceRow>> {
    if dt_list.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 step sizes, got {}",
            dt_list.len()
        )));
    }
    if dt_list.iter().any(|&dt| !(dt > 0.0)) || dt_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain(
            "step sizes must be positive and strictly decreasing".to_string(),
        ));
    }
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let params = MprkParams::new(alpha)?;
    let pds = TwoSpeciesSystem::symmetric(a)?.to_linear();
    let y0 = initial_value(delta)?;
    let mut ws = StepWorkspace::new(2);

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        let steps = libm::round(horizon / dt).max(1.0) as usize;
        let mut y = y0.y.clone();
        let error = match advance(&pds, &mut y, dt, steps, &params, &mut ws) {
            Ok(_) => {
                let exact = exact_solution(delta, a, steps as f64 * dt)?;
                Ok(y.iter()
                    .zip(&exact.y)
                    .fold(0.0_f64, |m, (u, v)| m.max((u - v).abs())))
            }
            Err(e) => Err(e.to_string()),
        };
        let order = match (rows.last(), &error) {
            (Some(prev), Ok(e)) => match prev.error {
                Ok(pe) if pe > 0.0 && *e > 0.0 => Some(libm::log(pe / e) / libm::log(prev.dt / dt)),
                _ => None,
            },
            _ => None,
        };
        rows.push(ConvergenceRow { dt, error, order });
    }
    Ok(rows)
}
