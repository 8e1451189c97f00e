//! Production-destruction systems.
//!
//! A PDS is `y_i' = Σ_{j≠i} (p_ij(t, y) - d_ij(t, y))` with nonnegative
//! production rates `p_ij` and destruction rates `d_ij`. It is conservative
//! when `d_ij = p_ji`, in which case the total mass `Σ y_i` is constant.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::{DenseMatrix, Error, Result};

/// Absolute tolerance for the column sums of a conservative rate matrix,
/// scaled by the largest entry when that exceeds one.
pub const COLUMN_SUM_TOL: f64 = 1e-13;

/// Evaluator for the production and destruction terms of a PDS.
///
/// Implementations must return zero on the diagonal (`i == j`).
pub trait ProductionDestruction {
    fn n_species(&self) -> usize;

    /// Production rate `p_ij(t, y)` of species `i` from species `j`.
    fn production(&self, t: f64, y: &[f64], i: usize, j: usize) -> f64;

    /// Destruction rate `d_ij(t, y)` of species `i` towards species `j`.
    fn destruction(&self, t: f64, y: &[f64], i: usize, j: usize) -> f64;

    /// Whether `d_ij = p_ji` holds identically.
    fn is_conservative(&self) -> bool {
        false
    }

    /// Whether the rates are independent of `t`.
    fn is_autonomous(&self) -> bool {
        false
    }
}

impl<T: ProductionDestruction + ?Sized> ProductionDestruction for &T {
    fn n_species(&self) -> usize {
        (**self).n_species()
    }
    fn production(&self, t: f64, y: &[f64], i: usize, j: usize) -> f64 {
        (**self).production(t, y, i, j)
    }
    fn destruction(&self, t: f64, y: &[f64], i: usize, j: usize) -> f64 {
        (**self).destruction(t, y, i, j)
    }
    fn is_conservative(&self) -> bool {
        (**self).is_conservative()
    }
    fn is_autonomous(&self) -> bool {
        (**self).is_autonomous()
    }
}

/// A failed invariant of a candidate rate matrix. Indices are zero-based;
/// the `Display` output is one-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonFinite { i: usize, j: usize, value: f64 },
    NegativeOffDiagonal { i: usize, j: usize, value: f64 },
    PositiveDiagonal { i: usize, value: f64 },
    ColumnSum { j: usize, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFinite { i, j, value } => {
                write!(f, "entry ({}, {}) is not finite ({value})", i + 1, j + 1)
            }
            Violation::NegativeOffDiagonal { i, j, value } => {
                write!(f, "off-diagonal ({}, {}) = {value} < 0", i + 1, j + 1)
            }
            Violation::PositiveDiagonal { i, value } => {
                write!(f, "diagonal ({}, {}) = {value} > 0", i + 1, i + 1)
            }
            Violation::ColumnSum { j, sum } => write!(f, "column {} sums to {sum}", j + 1),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("pass");
        }
        f.write_str("fail: ")?;
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks positivity (`A - diag(A) >= 0`) and conservativity (`1ᵀA = 0`)
/// of a candidate rate matrix.
pub fn validate_linear(a: &DenseMatrix) -> ValidationReport {
    let n = a.dim();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            if !v.is_finite() {
                violations.push(Violation::NonFinite { i, j, value: v });
            } else if i != j && v < 0.0 {
                violations.push(Violation::NegativeOffDiagonal { i, j, value: v });
            } else if i == j && v > 0.0 {
                violations.push(Violation::PositiveDiagonal { i, value: v });
            }
        }
    }
    let tol = COLUMN_SUM_TOL * a.max_abs().max(1.0);
    for j in 0..n {
        let sum = a.column_sum(j);
        if !(sum.abs() <= tol) {
            violations.push(Violation::ColumnSum { j, sum });
        }
    }
    ValidationReport { violations }
}

/// A positive and conservative linear system `y' = A y`, viewed as a PDS
/// with `p_ij = a_ij y_j` and `d_ij = p_ji = a_ji y_i` for `i != j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPds {
    a: DenseMatrix,
}

impl LinearPds {
    /// Validates `a` and wraps it. The error names every failing invariant.
    pub fn new(a: DenseMatrix) -> Result<Self> {
        let report = validate_linear(&a);
        if !report.passed() {
            return Err(Error::Validation(format!("{report}")));
        }
        Ok(Self { a })
    }

    pub fn rate_matrix(&self) -> &DenseMatrix {
        &self.a
    }

    /// The off-diagonal part `B = A - diag(A)`.
    pub fn production_matrix(&self) -> DenseMatrix {
        let mut b = self.a.clone();
        for i in 0..b.dim() {
            b[(i, i)] = 0.0;
        }
        b
    }

    /// `diag(y) Aᵀ diag(y)⁻¹`, which appears in the Jacobians of the step
    /// map for negative Runge-Kutta weights.
    pub fn similarity_transpose(&self, y: &[f64]) -> DenseMatrix {
        let n = self.a.dim();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = y[i] * self.a[(j, i)] / y[j];
            }
        }
        m
    }
}

impl ProductionDestruction for LinearPds {
    fn n_species(&self) -> usize {
        self.a.dim()
    }

    #[inline]
    fn production(&self, _t: f64, y: &[f64], i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.a[(i, j)] * y[j]
        }
    }

    #[inline]
    fn destruction(&self, t: f64, y: &[f64], i: usize, j: usize) -> f64 {
        self.production(t, y, j, i)
    }

    fn is_conservative(&self) -> bool {
        true
    }

    fn is_autonomous(&self) -> bool {
        true
    }
}

/// The general positive conservative 2×2 linear system
/// `y' = [[-a, b], [a, -b]] y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpeciesSystem {
    pub a: f64,
    pub b: f64,
}

impl TwoSpeciesSystem {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Validation(format!(
                "rates must be finite and nonnegative (a={a}, b={b})"
            )));
        }
        Ok(Self { a, b })
    }

    /// The symmetric test family `a = b`.
    pub fn symmetric(a: f64) -> Result<Self> {
        Self::new(a, a)
    }

    pub fn rate_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_row_major(2, alloc::vec![-self.a, self.b, self.a, -self.b]).expect("2x2")
    }

    pub fn to_linear(&self) -> LinearPds {
        LinearPds {
            a: self.rate_matrix(),
        }
    }

    /// The nonzero eigenvalue `-(a + b)` of the rate matrix.
    pub fn lambda(&self) -> f64 {
        -(self.a + self.b)
    }

    /// The steady state `s (b, a)ᵀ` with components summing to `total_mass`.
    pub fn steady_state(&self, total_mass: f64) -> Result<State> {
        let sum = self.a + self.b;
        if !(sum > 0.0) {
            return Err(Error::Degenerate("a = b = 0: every state is steady"));
        }
        if !(total_mass > 0.0) {
            return Err(Error::Domain(format!(
                "total mass must be positive, got {total_mass}"
            )));
        }
        let s = total_mass / sum;
        State::new(0.0, alloc::vec![s * self.b, s * self.a])
    }
}

/// A strictly positive state vector at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub y: Vec<f64>,
}

impl State {
    pub fn new(t: f64, y: Vec<f64>) -> Result<Self> {
        check_positive(&y)?;
        Ok(Self { t, y })
    }

    pub fn mass(&self) -> f64 {
        self.y.iter().sum()
    }
}

pub(crate) fn check_positive(y: &[f64]) -> Result<()> {
    match y.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        Some(index) => Err(Error::NonPositive {
            index,
            value: y[index],
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn m(rows: &[[f64; 2]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn linear_as_general_symbolic_example() {
        let (a, b) = (2.5, 0.75);
        let sys = LinearPds::new(m(&[[-a, b], [a, -b]])).unwrap();
        let y = [1.0, 1.0];
        assert_eq!(sys.production(0.0, &y, 0, 1), b);
        assert_eq!(sys.production(0.0, &y, 1, 0), a);
        assert_eq!(sys.destruction(0.0, &y, 0, 1), a);
        assert_eq!(sys.destruction(0.0, &y, 1, 0), b);
        assert!(sys.is_conservative());
    }

    #[test]
    fn linear_as_general_zero_and_entrywise() {
        let z = LinearPds::new(DenseMatrix::zeros(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(z.production(0.0, &[1.0, 2.0, 3.0], i, j), 0.0);
                assert_eq!(z.destruction(0.0, &[1.0, 2.0, 3.0], i, j), 0.0);
            }
        }
        let s = LinearPds::new(m(&[[-2.0, 1.0], [2.0, -1.0]])).unwrap();
        assert_eq!(s.production(0.0, &[3.0, 5.0], 0, 1), 5.0);
        assert_eq!(s.production(0.0, &[3.0, 5.0], 1, 0), 6.0);
        assert_eq!(s.production(0.0, &[3.0, 5.0], 0, 0), 0.0);
        assert_eq!(s.destruction(0.0, &[3.0, 5.0], 1, 1), 0.0);
    }

    #[test]
    fn validation_reports() {
        assert!(validate_linear(&m(&[[-1.0, 1.0], [1.0, -1.0]])).passed());

        let r = validate_linear(&m(&[[-1.0, 1.0], [0.5, -1.0]]));
        assert_eq!(r.violations, vec![Violation::ColumnSum { j: 0, sum: -0.5 }]);
        assert_eq!(r.to_string(), "fail: column 1 sums to -0.5");

        let r = validate_linear(&m(&[[1.0, -1.0], [-1.0, 1.0]]));
        assert!(!r.passed());
        assert!(r.violations.contains(&Violation::NegativeOffDiagonal {
            i: 0,
            j: 1,
            value: -1.0
        }));
        assert!(r.to_string().contains("off-diagonal (1, 2) = -1 < 0"));
    }

    #[test]
    fn invalid_matrix_rejected_with_reason() {
        let err = LinearPds::new(m(&[[-1.0, 1.0], [0.5, -1.0]])).unwrap_err();
        assert!(err.to_string().contains("column 1 sums to -0.5"));
    }

    #[test]
    fn column_sum_tolerance_scales_with_entries() {
        // 1e3 + rounding: an absolute 1e-13 would reject this.
        let a = 1000.0 + 1e-12;
        assert!(validate_linear(&m(&[[-a, 3.0], [1000.0, -3.0]])).passed());
        assert!(!validate_linear(&m(&[[-1.0 - 1e-12, 3.0], [1.0, -3.0]])).passed());
    }

    #[test]
    fn two_species_steady_states() {
        let s = TwoSpeciesSystem::new(20.0, 20.0)
            .unwrap()
            .steady_state(1.0)
            .unwrap();
        assert_eq!(s.y, vec![0.5, 0.5]);
        let s = TwoSpeciesSystem::new(1.0, 3.0)
            .unwrap()
            .steady_state(4.0)
            .unwrap();
        assert_eq!(s.y, vec![3.0, 1.0]);
        let s = TwoSpeciesSystem::new(2.0, 1.0)
            .unwrap()
            .steady_state(1.0)
            .unwrap();
        assert!((s.y[0] - 1.0 / 3.0).abs() < 1e-16 && (s.y[1] - 2.0 / 3.0).abs() < 1e-16);
        assert!(matches!(
            TwoSpeciesSystem::new(0.0, 0.0).unwrap().steady_state(1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn two_species_expansion_and_spectrum() {
        let s = TwoSpeciesSystem::new(2.0, 5.0).unwrap();
        assert_eq!(s.rate_matrix(), m(&[[-2.0, 5.0], [2.0, -5.0]]));
        let ev = s.rate_matrix().eigenvalues_2x2().unwrap();
        assert!((ev[0] - s.lambda()).abs() < 1e-14 && ev[1].abs() < 1e-14);
        let ys = s.steady_state(1.0).unwrap();
        for r in s.rate_matrix().mul_vec(&ys.y) {
            assert!(r.abs() < 1e-13);
        }
    }

    #[test]
    fn state_requires_positive_components() {
        assert!(State::new(0.0, vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            State::new(0.0, vec![0.5, 0.0]),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(State::new(0.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn similarity_transpose_of_two_species_is_rate_matrix() {
        for &(a, b) in &[(1.0, 1.0), (2.0, 7.0), (0.3, 11.0)] {
            let s = TwoSpeciesSystem::new(a, b).unwrap();
            let ys = s.steady_state(1.0).unwrap();
            let m = s.to_linear().similarity_transpose(&ys.y);
            assert!(m.max_abs_diff(&s.rate_matrix()) <= 1e-13 * (a + b).max(1.0));
        }
    }
}
