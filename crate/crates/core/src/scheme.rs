//! The MPRK22(α) step.
//!
//! With `y⁽¹⁾ = yⁿ` the scheme reads
//!
//! ```text
//! y⁽²⁾_i   = yⁿ_i + a21 Δt Σ_j ( p_ij(y⁽¹⁾) y⁽²⁾_γ(j,i,a21) / y⁽¹⁾_γ(j,i,a21)
//!                              - d_ij(y⁽¹⁾) y⁽²⁾_γ(i,j,a21) / y⁽¹⁾_γ(i,j,a21) )
//! yⁿ⁺¹_i  = yⁿ_i + Δt Σ_k b_k Σ_j ( p_ij(y⁽ᵏ⁾) yⁿ⁺¹_γ(j,i,b_k) / σ_γ(j,i,b_k)
//!                                 - d_ij(y⁽ᵏ⁾) yⁿ⁺¹_γ(i,j,b_k) / σ_γ(i,j,b_k) )
//! σ_i      = (yⁿ_i)^(1 - 1/a21) (y⁽²⁾_i)^(1/a21)
//! ```
//!
//! where the index function `γ` swaps the roles of production and
//! destruction under a negative coefficient. Both relations are linear in
//! the unknown and are solved as `M x = yⁿ`. For a conservative system `M`
//! has unit column sums, a diagonal `≥ 1` and nonpositive off-diagonals in
//! every sign regime, so `M⁻¹ ≥ 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{solve_in_place, solve_unit_column_sum_in_place};
use crate::pds::check_positive;
use crate::{DenseMatrix, Error, MprkParams, ProductionDestruction, Result, State};

/// Components below this are treated as an underflow.
pub const UNDERFLOW_GUARD: f64 = 1e-300;

/// The index function: `i` for `theta >= 0`, `j` otherwise.
#[inline]
pub fn gamma(i: usize, j: usize, theta: f64) -> usize {
    if theta >= 0.0 {
        i
    } else {
        j
    }
}

/// Writes `σ_i = (yⁿ_i)^(1-1/a21) (y⁽²⁾_i)^(1/a21)` into `out`.
pub fn sigma_weights(y_n: &[f64], y_stage: &[f64], a21: f64, out: &mut [f64]) -> Result<()> {
    let e2 = 1.0 / a21;
    let e1 = 1.0 - e2;
    for (i, ((s, &u), &v)) in out.iter_mut().zip(y_n).zip(y_stage).enumerate() {
        let w = libm::exp(e1 * libm::log(u) + e2 * libm::log(v));
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::Sigma(i));
        }
        *s = w;
    }
    Ok(())
}

/// One group of terms in an implicit Patankar relation: the PDS evaluated
/// at `(t, y)` and scaled by the Runge-Kutta weight `weight`.
#[derive(Debug, Clone, Copy)]
pub struct StageTerm<'a> {
    pub t: f64,
    pub y: &'a [f64],
    pub weight: f64,
}

/// Assembles `M` such that the implicit relation reads `M x = yⁿ`.
///
/// Starting from the identity, each weight `θ_k` adds
/// `-θ_k Δt p_ij / denom_g` to `M[i, g]` with `g = γ(j, i, θ_k)` and
/// `+θ_k Δt d_ij / denom_h` to `M[i, h]` with `h = γ(i, j, θ_k)`.
pub fn assemble_patankar_matrix<P: ProductionDestruction + ?Sized>(
    pds: &P,
    terms: &[StageTerm<'_>],
    denom: &[f64],
    dt: f64,
    out: &mut DenseMatrix,
) -> Result<()> {
    let n = pds.n_species();
    if out.dim() != n || denom.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: denom.len().min(out.dim()),
        });
    }
    out.set_identity();
    for (k, term) in terms.iter().enumerate() {
        let theta = term.weight;
        if theta == 0.0 {
            continue;
        }
        let scale = theta * dt;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let p = pds.production(term.t, term.y, i, j);
                if p != 0.0 {
                    let g = gamma(j, i, theta);
                    let c = scale * p / denom[g];
                    if !c.is_finite() {
                        return Err(Error::Assembly { i, j, k });
                    }
                    out[(i, g)] -= c;
                }
                let d = pds.destruction(term.t, term.y, i, j);
                if d != 0.0 {
                    let h = gamma(i, j, theta);
                    let c = scale * d / denom[h];
                    if !c.is_finite() {
                        return Err(Error::Assembly { i, j, k });
                    }
                    out[(i, h)] += c;
                }
            }
        }
    }
    Ok(())
}

/// Scratch space for [`step_into`]. After a successful step it holds the
/// stage value, the σ weights and both assembled matrices. The matrices are
/// left untouched by a step that started at an exact steady state.
#[derive(Debug, Clone)]
pub struct StepWorkspace {
    pub y_stage: Vec<f64>,
    pub sigma: Vec<f64>,
    pub stage_matrix: DenseMatrix,
    pub update_matrix: DenseMatrix,
    lu: DenseMatrix,
}

impl StepWorkspace {
    pub fn new(n: usize) -> Self {
        Self {
            y_stage: vec![0.0; n],
            sigma: vec![0.0; n],
            stage_matrix: DenseMatrix::zeros(n),
            update_matrix: DenseMatrix::zeros(n),
            lu: DenseMatrix::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.y_stage.len()
    }
}

fn check_state(y: &[f64]) -> Result<()> {
    check_positive(y)?;
    match y.iter().position(|&v| v < UNDERFLOW_GUARD) {
        Some(index) => Err(Error::Underflow {
            index,
            value: y[index],
        }),
        None => Ok(()),
    }
}

/// Solver outputs that reach zero have left the representable range rather
/// than lost positivity.
fn check_solution(y: &[f64]) -> Result<()> {
    match y.iter().position(|&v| (0.0..UNDERFLOW_GUARD).contains(&v)) {
        Some(index) => Err(Error::Underflow {
            index,
            value: y[index],
        }),
        None => check_positive(y),
    }
}

fn is_exact_steady_state<P: ProductionDestruction + ?Sized>(pds: &P, t: f64, y: &[f64]) -> bool {
    let n = y.len();
    (0..n).all(|i| {
        let mut rate = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            rate += pds.production(t, y, i, j) - pds.destruction(t, y, i, j);
        }
        rate == 0.0
    })
}

fn solve(conservative: bool, m: &mut DenseMatrix, x: &mut [f64]) -> Result<()> {
    if conservative {
        solve_unit_column_sum_in_place(m, x)
    } else {
        solve_in_place(m, x)
    }
}

/// Advances `y_n` at time `t` by one step of size `dt` into `out`.
pub fn step_into<P: ProductionDestruction + ?Sized>(
    pds: &P,
    t: f64,
    y_n: &[f64],
    dt: f64,
    params: &MprkParams,
    ws: &mut StepWorkspace,
    out: &mut [f64],
) -> Result<()> {
    let n = pds.n_species();
    if y_n.len() != n || out.len() != n || ws.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y_n.len(),
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(alloc::format!(
            "dt must be positive and finite, got {dt}"
        )));
    }
    check_state(y_n)?;

    // If the right-hand side vanishes exactly, yⁿ solves both implicit
    // relations and, the matrices being nonsingular, is their solution.
    if pds.is_autonomous() && is_exact_steady_state(pds, t, y_n) {
        ws.y_stage.copy_from_slice(y_n);
        ws.sigma.copy_from_slice(y_n);
        out.copy_from_slice(y_n);
        return Ok(());
    }

    let conservative = pds.is_conservative();
    let stage = [StageTerm {
        t,
        y: y_n,
        weight: params.a21,
    }];
    assemble_patankar_matrix(pds, &stage, y_n, dt, &mut ws.stage_matrix)?;
    ws.lu.clone_from(&ws.stage_matrix);
    ws.y_stage.copy_from_slice(y_n);
    solve(conservative, &mut ws.lu, &mut ws.y_stage)?;
    check_solution(&ws.y_stage)?;

    sigma_weights(y_n, &ws.y_stage, params.a21, &mut ws.sigma)?;

    let t2 = t + params.a21 * dt;
    let update = [
        StageTerm {
            t,
            y: y_n,
            weight: params.b1,
        },
        StageTerm {
            t: t2,
            y: &ws.y_stage,
            weight: params.b2,
        },
    ];
    assemble_patankar_matrix(pds, &update, &ws.sigma, dt, &mut ws.update_matrix)?;
    ws.lu.clone_from(&ws.update_matrix);
    out.copy_from_slice(y_n);
    solve(conservative, &mut ws.lu, out)?;
    check_solution(out)
}

/// One MPRK22(α) step from `state`, returning the state at `t + dt`.
pub fn mprk22_step<P: ProductionDestruction + ?Sized>(
    pds: &P,
    state: &State,
    dt: f64,
    params: &MprkParams,
) -> Result<State> {
    let n = pds.n_species();
    let mut ws = StepWorkspace::new(n);
    let mut out = vec![0.0; n];
    step_into(pds, state.t, &state.y, dt, params, &mut ws, &mut out)?;
    Ok(State {
        t: state.t + dt,
        y: out,
    })
}

/// States `y⁰, …, y^steps` at `t_n = t_0 + n dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }
}

/// Applies [`mprk22_step`] `steps` times. A failure is reported as
/// [`Error::Step`] carrying the zero-based index of the failing step.
pub fn integrate<P: ProductionDestruction + ?Sized>(
    pds: &P,
    y0: &State,
    dt: f64,
    steps: usize,
    params: &MprkParams,
) -> Result<Trajectory> {
    check_positive(&y0.y)?;
    let n = pds.n_species();
    if y0.y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y0.y.len(),
        });
    }
    let mut ws = StepWorkspace::new(n);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(y0.clone());
    for k in 0..steps {
        let prev = &states[k];
        let mut next = vec![0.0; n];
        step_into(pds, prev.t, &prev.y, dt, params, &mut ws, &mut next)
            .map_err(|e| e.at_step(k))?;
        let t = y0.t + (k + 1) as f64 * dt;
        states.push(State { t, y: next });
    }
    Ok(Trajectory { states })
}

/// Advances `y` in place by `steps` steps without recording the path.
///
/// For an autonomous system the step map is a pure function of the state,
/// so once an iterate reproduces its predecessor bit for bit all remaining
/// iterates are identical and the loop stops early. Nonautonomous systems
/// always run all steps. Returns the number of
/// steps actually computed.
pub fn advance<P: ProductionDestruction + ?Sized>(
    pds: &P,
    y: &mut Vec<f64>,
    dt: f64,
    steps: usize,
    params: &MprkParams,
    ws: &mut StepWorkspace,
) -> Result<usize> {
    let autonomous = pds.is_autonomous();
    let mut next = vec![0.0; y.len()];
    for k in 0..steps {
        step_into(pds, k as f64 * dt, y, dt, params, ws, &mut next).map_err(|e| e.at_step(k))?;
        let stationary = autonomous && next == *y;
        core::mem::swap(y, &mut next);
        if stationary {
            return Ok(k + 1);
        }
    }
    Ok(steps)
}
