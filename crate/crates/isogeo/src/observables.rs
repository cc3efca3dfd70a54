//! Observable-induced vector fields on the purification space, the
//! uncertainty scalar, the variance decomposition, and the dispersion
//! bound with its equality certificate.
//!
//! An observable A with Planck scale hbar generates the field
//! X_A(Psi) = A Psi / (i hbar), which is automatically tangent. Its
//! squared uncertainty splits into a horizontal part, measured by the
//! submersion metric, plus gauge terms read off the connection form:
//!
//! ```text
//! (Delta A)^2 = h^2 g(X_A, X_A) + h^2 Tr(A(X_A) P)^2 - h^2 Tr(A(X_A)^2 P)
//! ```
//!
//! with h = hbar and A(.) the connection form. The gauge terms combine to
//! the variance of the eigenvalues of i A(X_A) against the spectrum
//! weights, which is nonnegative by convexity of x -> x^2, so
//! Delta A >= hbar sqrt(g) always, with equality exactly when the field is
//! horizontal up to the scalar trace mode.

use crate::bundle_geometry::{connection_form, horizontal_projection, purification_metric};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{c, herm_residual, real_trace, CMatrix};
use crate::state_space::{
    standard_purification, DensityOperator, GaugeAlgebraElement, Purification, TangentVector,
};

/// Negative radicands within this window of zero are treated as roundoff
/// and clamped; anything lower is reported as an error.
const RADICAND_CLAMP: f64 = 1e-12;

/// Hermitian operator together with the Planck scale used in the dynamics
/// it generates.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMatrix,
    hbar: f64,
}

impl Observable {
    pub fn new(matrix: CMatrix, hbar: f64, tols: &Tolerances) -> Result<Self> {
        assert!(hbar > 0.0, "hbar must be positive");
        let residual = herm_residual(&matrix);
        if residual > tols.herm * matrix.norm().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { matrix, hbar })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// The gauge invariant vector field of an observable, X_A(Psi) =
/// A Psi / (i hbar); tangent because A is Hermitian.
pub fn observable_field(a: &Observable, psi: &Purification) -> Result<TangentVector> {
    if a.dim() != psi.hilbert_dim() {
        return Err(Error::ShapeMismatch {
            expected_rows: psi.hilbert_dim(),
            expected_cols: psi.hilbert_dim(),
            rows: a.dim(),
            cols: a.dim(),
        });
    }
    let x = a.matrix() * psi.matrix() * c(0.0, -1.0 / a.hbar());
    Ok(TangentVector::new_unchecked(psi.clone(), x))
}

/// Uncertainty Delta A at rho: sqrt(Tr(A^2 rho) - Tr(A rho)^2).
pub fn uncertainty(a: &Observable, rho: &DensityOperator) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::ShapeMismatch {
            expected_rows: rho.dim(),
            expected_cols: rho.dim(),
            rows: a.dim(),
            cols: a.dim(),
        });
    }
    let second = real_trace(&(a.matrix() * a.matrix() * rho.matrix()));
    let mean = real_trace(&(a.matrix() * rho.matrix()));
    let radicand = second - mean * mean;
    let window = RADICAND_CLAMP * second.abs().max(1.0);
    if radicand < -window {
        return Err(Error::NegativeRadicand { radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// The three terms of the variance split at a purification, together with
/// the residuals of the trace identities they rest on.
#[derive(Debug, Clone, Copy)]
pub struct VarianceDecomposition {
    /// hbar^2 g(X_A, X_A), the horizontal contribution.
    pub g_term: f64,
    /// hbar^2 Tr(A(X_A) P)^2; nonpositive since the trace is imaginary.
    pub square_of_mean_term: f64,
    /// hbar^2 Tr(A(X_A)^2 P); nonpositive for anti-Hermitian arguments.
    pub second_moment_term: f64,
    /// (Delta A)^2 at the projected state, for closing the identity.
    pub variance: f64,
    /// |Tr(A^2 rho) - hbar^2 G(X_A, X_A)|.
    pub second_moment_residual: f64,
    /// |Tr(A rho) - i hbar Tr(A(X_A) P)|.
    pub mean_residual: f64,
    /// |variance - (g_term + square_of_mean_term - second_moment_term)|.
    pub split_residual: f64,
}

/// Splits the squared uncertainty of an observable at a purification into
/// the submersion metric term and the two gauge trace terms, certifying
/// the underlying trace identities along the way.
pub fn variance_decomposition(
    a: &Observable,
    psi: &Purification,
    tols: &Tolerances,
) -> Result<VarianceDecomposition> {
    let x = observable_field(a, psi)?;
    let xi = connection_form(psi, x.matrix())?;
    let p = psi.spectrum().p_matrix();
    let h2 = a.hbar() * a.hbar();

    let horizontal = horizontal_projection(&x);
    let g = purification_metric(&horizontal, &horizontal, tols)?;
    let g_term = h2 * g;

    let trace_ap = (xi.matrix() * &p).trace();
    let square_of_mean_term = h2 * (trace_ap * trace_ap).re;
    let trace_a2p = (xi.matrix() * xi.matrix() * &p).trace();
    let second_moment_term = h2 * trace_a2p.re;

    let rho = crate::bundle_geometry::project(psi);
    let variance = uncertainty(a, &rho)?.powi(2);

    let full_g = purification_metric(&x, &x, tols)?;
    let second_moment_residual =
        (real_trace(&(a.matrix() * a.matrix() * rho.matrix())) - h2 * full_g).abs();
    let mean_lhs = real_trace(&(a.matrix() * rho.matrix()));
    let mean_rhs = c(0.0, a.hbar()) * trace_ap;
    let mean_residual = ((c(mean_lhs, 0.0)) - mean_rhs).norm();
    let split_residual =
        (variance - (g_term + square_of_mean_term - second_moment_term)).abs();

    Ok(VarianceDecomposition {
        g_term,
        square_of_mean_term,
        second_moment_term,
        variance,
        second_moment_residual,
        mean_residual,
        split_residual,
    })
}

/// Outcome of comparing Delta A against hbar sqrt(g).
#[derive(Debug, Clone, Copy)]
pub struct DispersionBound {
    /// Delta A at rho.
    pub lhs: f64,
    /// hbar sqrt(g(X_A, X_A)) at rho.
    pub rhs: f64,
    /// True when the two sides agree within the identity tolerance.
    pub is_equality: bool,
}

/// Checks the dispersion bound Delta A >= hbar sqrt(g) at a state, using
/// the standard purification to evaluate the right-hand side.
pub fn dispersion_bound_check(
    a: &Observable,
    rho: &DensityOperator,
    tols: &Tolerances,
) -> Result<DispersionBound> {
    let psi = standard_purification(rho, tols)?;
    let decomposition = variance_decomposition(a, &psi, tols)?;
    let lhs = uncertainty(a, rho)?;
    let rhs = decomposition.g_term.max(0.0).sqrt();
    let is_equality = (lhs - rhs).abs() <= tols.identity * lhs.max(1.0);
    Ok(DispersionBound {
        lhs,
        rhs,
        is_equality,
    })
}

/// The two sides of the convexity inequality behind the dispersion bound:
/// (sum p_i lambda_i)^2 <= sum p_i lambda_i^2, with lambda the eigenvalues
/// of i xi and p the spectrum weights in the diagonalizing gauge.
pub fn convexity_terms(xi: &GaugeAlgebraElement) -> (f64, f64) {
    let (_, lambdas) = xi.diagonalize();
    let weights = xi.spectrum().values();
    let mean: f64 = weights.iter().zip(&lambdas).map(|(p, l)| p * l).sum();
    let second: f64 = weights.iter().zip(&lambdas).map(|(p, l)| p * l * l).sum();
    (mean * mean, second)
}
