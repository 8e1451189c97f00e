//! Butcher coefficients of the second order two-stage RK family underlying
//! MPRK22(α).

use crate::{Error, Result};

/// Sign pattern of the Runge-Kutta coefficients, which decides how the
/// Patankar weights are routed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// α ≥ 1/2: `a21, b1, b2 ≥ 0`.
    NonnegativeAll,
    /// 0 < α < 1/2: `b1 < 0`.
    NegativeB1,
    /// α < 0: `a21 < 0`, `b2 < 0`, `b1 > 0`.
    NegativeA21B2,
}

impl Regime {
    pub fn of(alpha: f64) -> Result<Self> {
        if alpha == 0.0 {
            Err(Error::ZeroAlpha)
        } else if !alpha.is_finite() {
            Err(Error::Domain(alloc::format!(
                "alpha must be finite, got {alpha}"
            )))
        } else if alpha >= 0.5 {
            Ok(Regime::NonnegativeAll)
        } else if alpha > 0.0 {
            Ok(Regime::NegativeB1)
        } else {
            Ok(Regime::NegativeA21B2)
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::NonnegativeAll => "nonnegative",
            Regime::NegativeB1 => "negative-b1",
            Regime::NegativeA21B2 => "negative-a21-b2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MprkParams {
    pub alpha: f64,
    pub a21: f64,
    pub b1: f64,
    pub b2: f64,
    pub regime: Regime,
}

impl MprkParams {
    pub fn new(alpha: f64) -> Result<Self> {
        let regime = Regime::of(alpha)?;
        let b2 = 1.0 / (2.0 * alpha);
        Ok(Self {
            alpha,
            a21: alpha,
            b1: 1.0 - b2,
            b2,
            regime,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_alpha_rejected() {
        assert_eq!(MprkParams::new(0.0), Err(Error::ZeroAlpha));
        assert!(MprkParams::new(f64::NAN).is_err());
    }

    #[test]
    fn order_conditions_and_sign_patterns() {
        for &alpha in &[
            -4.0,
            -2.0,
            -1.0,
            -0.5,
            -0.25,
            -1e-3,
            1e-3,
            0.25,
            0.5,
            2.0 / 3.0,
            1.0,
            4.0,
        ] {
            let p = MprkParams::new(alpha).unwrap();
            assert!((p.b1 + p.b2 - 1.0).abs() <= 1e-15, "alpha={alpha}");
            assert!((p.a21 * p.b2 - 0.5).abs() <= 1e-15, "alpha={alpha}");
            match p.regime {
                Regime::NonnegativeAll => {
                    assert!(alpha >= 0.5 && p.a21 >= 0.0 && p.b1 >= 0.0 && p.b2 >= 0.0)
                }
                Regime::NegativeB1 => assert!(alpha > 0.0 && alpha < 0.5 && p.b1 < 0.0),
                Regime::NegativeA21B2 => {
                    assert!(alpha < 0.0 && p.a21 < 0.0 && p.b2 < 0.0 && p.b1 > 0.0)
                }
            }
        }
        assert_eq!(MprkParams::new(0.5).unwrap().b1, 0.0);
    }
}
