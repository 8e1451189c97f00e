//! Linear stability of MPRK22(α) at steady states of linear systems.
//!
//! Applied to `y' = A y`, the scheme defines an implicit map
//! `yⁿ⁺¹ = g(yⁿ)` for which every steady state `y*` is a fixed point. For
//! the 2×2 family the eigenvalues of `Dg(y*)` are `R(Δt λ)` over the
//! eigenvalues `λ` of `A`, where `R` depends on the sign regime of α:
//!
//! * α ≥ 1/2: `|R(z)| < 1` for every `z < 0`;
//! * 0 < α < 1/2 and -1/2 < α < 0: stable only for `z* < z < 0`;
//! * α ≤ -1/2: `R` increases monotonically from
//!   `-(α+2)/(2α(α-1)) ≥ -1` to `R(0) = 1`, hence `|R(z)| < 1` for `z < 0`.
//!
//! For α < 0 the Jacobian is obtained by implicit differentiation of the
//! stage relation `Ψ(u, v) = 0` and the update relation `Φ(u, v, w) = 0`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::{DenseMatrix, Error, LinearPds, Regime, Result, TwoSpeciesSystem};

/// Half width of the band around `|R| = 1` classified as marginal.
pub const MARGINAL_BAND: f64 = 1e-12;

fn pole(alpha: f64, z: f64) -> Error {
    Error::Domain(format!("pole of R at z={z} for alpha={alpha}"))
}

/// The stability function `R(z)` of MPRK22(α).
///
/// For α ≥ 1/2 every real `z` away from the poles `1` and `1/α` is
/// accepted. The other regimes are only defined on `z ≤ 0`.
pub fn stability_function(alpha: f64, z: f64) -> Result<f64> {
    let regime = Regime::of(alpha)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("z must be finite, got {z}")));
    }
    if regime != Regime::NonnegativeAll && z > 0.0 {
        return Err(Error::Domain(format!(
            "alpha={alpha} requires z <= 0, got {z}"
        )));
    }
    let r = match regime {
        Regime::NonnegativeAll => {
            let den = 2.0 * (1.0 - alpha * z) * (1.0 - z);
            if den == 0.0 {
                return Err(pole(alpha, z));
            }
            (-z * z - 2.0 * alpha * z + 2.0) / den
        }
        Regime::NegativeB1 => {
            let inv = 1.0 / alpha;
            let c1 = 2.0 - 2.5 * inv + inv * inv;
            let c2 = 1.5 * inv - inv * inv;
            let inner = -1.0 + alpha * z;
            let den = -1.0 + (-1.0 + inv) * z;
            if inner == 0.0 || den == 0.0 {
                return Err(pole(alpha, z));
            }
            -(1.0 + c1 * z - c2 * z / inner) / den
        }
        Regime::NegativeA21B2 => {
            let a2 = alpha * alpha;
            let num = -(alpha + 2.0) * z * z - (2.0 * a2 + 2.0) * z - 2.0 * alpha;
            let den = (2.0 * a2 - 2.0 * alpha) * z * z + (-2.0 * a2 + 2.0 * alpha - 2.0) * z
                - 2.0 * alpha;
            if den == 0.0 {
                return Err(pole(alpha, z));
            }
            num / den
        }
    };
    Ok(r)
}

/// `lim_{z→-∞} R(z) = -(α+2)/(2α(α-1))` for α < 0.
pub fn r_limit_negative_alpha(alpha: f64) -> Result<f64> {
    if !(alpha < 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "limit defined for alpha < 0, got {alpha}"
        )));
    }
    Ok(-(alpha + 2.0) / (2.0 * alpha * (alpha - 1.0)))
}

/// The critical argument `z*` with `R(z*) = -1` in the conditionally stable
/// ranges `0 < α < 1/2` and `-1/2 < α < 0`.
pub fn z_star(alpha: f64) -> Result<f64> {
    let a2 = alpha * alpha;
    if alpha > 0.0 && alpha < 0.5 {
        let disc = 4.0 * a2 * a2 + 12.0 * a2 * alpha - 11.0 * a2 - 4.0 * alpha + 4.0;
        Ok((-2.0 * a2 + 3.0 * alpha - 2.0 - libm::sqrt(disc)) / (6.0 * a2 - 7.0 * alpha + 2.0))
    } else if alpha > -0.5 && alpha < 0.0 {
        let disc = 4.0 * a2 * a2 + 4.0 * a2 * alpha - 3.0 * a2 - 12.0 * alpha + 4.0;
        Ok((2.0 * a2 - alpha + 2.0 + libm::sqrt(disc)) / (2.0 * a2 - 3.0 * alpha - 2.0))
    } else if alpha == 0.0 {
        Err(Error::ZeroAlpha)
    } else {
        Err(Error::Domain(format!(
            "alpha={alpha} is unconditionally stable or invalid; z* exists only for 0 < |alpha| < 0.5"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Stable,
    Marginal,
    Unstable,
}

impl Classification {
    pub fn from_modulus(modulus: f64) -> Self {
        if modulus < 1.0 - MARGINAL_BAND {
            Classification::Stable
        } else if modulus <= 1.0 + MARGINAL_BAND {
            Classification::Marginal
        } else {
            Classification::Unstable
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Marginal => "marginal",
            Classification::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub z: f64,
    pub r_value: f64,
    pub modulus: f64,
    pub classification: Classification,
    pub z_star: Option<f64>,
    pub regime: Regime,
}

/// Evaluates `R(dt λ)` and classifies the mode with eigenvalue `lambda`.
pub fn classify(alpha: f64, dt: f64, lambda: f64) -> Result<StabilityReport> {
    let regime = Regime::of(alpha)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if !(lambda <= 0.0) {
        return Err(Error::Domain(format!(
            "lambda must be nonpositive, got {lambda}"
        )));
    }
    let z = dt * lambda;
    let r_value = stability_function(alpha, z)?;
    let modulus = r_value.abs();
    Ok(StabilityReport {
        z,
        r_value,
        modulus,
        classification: Classification::from_modulus(modulus),
        z_star: z_star(alpha).ok(),
        regime,
    })
}

/// Jacobians of the stage relation `Ψ` and the update relation `Φ` at
/// `u = v = w = y*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitJacobians {
    pub du_psi: DenseMatrix,
    pub dv_psi: DenseMatrix,
    pub du_phi: DenseMatrix,
    pub dv_phi: DenseMatrix,
    pub dw_phi: DenseMatrix,
}

/// The five Jacobians for α < 0, written in terms of `A` and
/// `T = diag(y*) Aᵀ diag(y*)⁻¹`.
pub fn psi_phi_jacobians(
    sys: &LinearPds,
    y_star: &[f64],
    dt: f64,
    alpha: f64,
) -> Result<ImplicitJacobians> {
    if !(alpha < 0.0) {
        return Err(Error::Domain(format!(
            "implicit Jacobians require alpha < 0, got {alpha}"
        )));
    }
    let a = sys.rate_matrix();
    let n = a.dim();
    if y_star.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y_star.len(),
        });
    }
    crate::pds::check_positive(y_star)?;
    let ymax = y_star.iter().fold(0.0_f64, |m, v| m.max(*v));
    let residual = a
        .mul_vec(y_star)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if residual > 1e-12 * a.max_abs().max(1.0) * ymax {
        return Err(Error::Domain(format!(
            "y* is not a steady state: |A y*| = {residual:e}"
        )));
    }

    let t = sys.similarity_transpose(y_star);
    let id = DenseMatrix::identity(n);
    let inv = 1.0 / alpha;
    let inv2 = inv * inv;
    let comb = |ca: f64, ct: f64| &a.scale(dt * ca) + &t.scale(dt * ct);

    Ok(ImplicitJacobians {
        du_psi: &id + &comb(alpha, alpha),
        dv_psi: &id.scale(-1.0) + &comb(0.0, -alpha),
        du_phi: &id + &comb(inv - 0.5 * inv2, -(-0.5 * inv + 0.5 * inv2)),
        dv_phi: comb(-0.5 * inv + 0.5 * inv2, 0.5 * inv2),
        dw_phi: &id.scale(-1.0) + &comb(1.0 - 0.5 * inv, -0.5 * inv),
    })
}

/// `Dg(y*) = -(D_wΦ)⁻¹ (D_uΦ - D_vΦ (D_vΨ)⁻¹ D_uΨ)`.
pub fn dg_implicit(j: &ImplicitJacobians) -> Result<DenseMatrix> {
    let dv_psi_inv = j.dv_psi.inverse()?;
    let dw_phi_inv = j.dw_phi.inverse()?;
    let inner = &j.du_phi - &(&j.dv_phi * &(&dv_psi_inv * &j.du_psi));
    Ok((&dw_phi_inv * &inner).scale(-1.0))
}

/// Closed form of `Dg(y*)` for the 2×2 system and α < 0, where
/// `diag(y*) Aᵀ diag(y*)⁻¹ = A`.
pub fn dg_analytic_2x2(sys: &TwoSpeciesSystem, dt: f64, alpha: f64) -> Result<DenseMatrix> {
    if !(alpha < 0.0) {
        return Err(Error::Domain(format!(
            "closed form requires alpha < 0, got {alpha}"
        )));
    }
    if !(sys.a + sys.b > 0.0) {
        return Err(Error::Degenerate("a + b must be positive"));
    }
    let a = sys.rate_matrix();
    let id = DenseMatrix::identity(2);
    let neg_id = id.scale(-1.0);
    let inv = 1.0 / alpha;
    let inv2 = inv * inv;

    let outer = &neg_id + &a.scale(dt * (1.0 - inv));
    let first = &id + &a.scale(dt * (1.5 * inv - inv2));
    let coupling = a.scale(dt * (-0.5 * inv + inv2));
    let stage_inv = (&neg_id - &a.scale(alpha * dt)).inverse()?;
    let stage_rhs = &id + &a.scale(2.0 * alpha * dt);
    let inner = &first - &(&coupling * &(&stage_inv * &stage_rhs));
    Ok((&outer.inverse()? * &inner).scale(-1.0))
}

/// Central finite-difference Jacobian of `map` at `point`.
pub fn fd_jacobian<F>(mut map: F, point: &[f64], h: f64) -> Result<DenseMatrix>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step h must be positive, got {h}")));
    }
    if let Some(index) = point.iter().position(|&v| !(v > h)) {
        return Err(Error::Domain(format!(
            "point component {index} = {} does not exceed h = {h}",
            point[index]
        )));
    }
    let n = point.len();
    let mut jac = DenseMatrix::zeros(n);
    let mut probe = point.to_vec();
    for col in 0..n {
        probe[col] = point[col] + h;
        let fwd = map(&probe).map_err(|e| probe_err(col, "+h", e))?;
        probe[col] = point[col] - h;
        let bwd = map(&probe).map_err(|e| probe_err(col, "-h", e))?;
        probe[col] = point[col];
        if fwd.len() != n || bwd.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: fwd.len().min(bwd.len()),
            });
        }
        for row in 0..n {
            jac[(row, col)] = (fwd[row] - bwd[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn probe_err(column: usize, direction: &'static str, e: Error) -> Error {
    Error::Probe {
        column,
        direction,
        source: Box::new(e),
    }
}
