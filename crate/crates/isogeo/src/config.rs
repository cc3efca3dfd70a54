//! Numerical tolerances and run-level configuration.
//!
//! Every validation routine in this crate compares a residual against a
//! named tolerance from [`Tolerances`] rather than a hard-coded constant,
//! so a single knob (`--tol` on the command line) can loosen or tighten
//! the whole stack coherently.

/// Named tolerances for the residual checks performed across the crate.
///
/// All matrix residuals are measured in the Frobenius norm.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Deviation of a trace from its required value.
    pub trace: f64,
    /// Hermiticity and anti-Hermiticity residuals.
    pub herm: f64,
    /// Residual of the fiber condition on purifications.
    pub fiber: f64,
    /// Residual of tangency conditions (both upstairs and on the orbit).
    pub tangent: f64,
    /// Residual of commutation with the rank projector.
    pub commute: f64,
    /// Gap below which two eigenvalues are treated as degenerate.
    pub degeneracy: f64,
    /// Magnitude below which an eigenvalue counts as zero.
    pub psd: f64,
    /// Overlap below which two states count as orthogonal.
    pub orth: f64,
    /// Deviation tolerated when matching spectra across objects or curves.
    pub spectrum: f64,
    /// Generic tolerance for identity and equality certification.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace: 1e-9,
            herm: 1e-9,
            fiber: 1e-9,
            tangent: 1e-9,
            commute: 1e-9,
            degeneracy: 1e-9,
            psd: 1e-10,
            orth: 1e-8,
            spectrum: 1e-8,
            identity: 1e-9,
        }
    }
}

impl Tolerances {
    /// Scales the whole family from a single base tolerance, keeping the
    /// default ratios between the individual knobs.
    pub fn from_base(tol: f64) -> Self {
        Self {
            trace: tol,
            herm: tol,
            fiber: tol,
            tangent: tol,
            commute: tol,
            degeneracy: tol,
            psd: tol / 10.0,
            orth: tol * 10.0,
            spectrum: tol * 10.0,
            identity: tol,
        }
    }
}

/// Run-level settings shared by the library entry points and the CLI.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    /// Reduced Planck constant used in every physical formula.
    pub hbar: f64,
    /// Base tolerance; expanded into [`Tolerances`] via [`Tolerances::from_base`].
    pub tol: f64,
    /// Seed for all pseudo-random draws.
    pub seed: u64,
    /// Number of integration steps per unit time interval.
    pub steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            tol: 1e-9,
            seed: 0,
            steps: 1000,
        }
    }
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances::from_base(self.tol)
    }
}
