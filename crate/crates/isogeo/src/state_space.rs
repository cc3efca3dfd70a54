//! Spectra, density operators, purifications, tangent vectors, and gauge
//! algebra elements, with validated constructors and seeded generators for
//! test instances.
//!
//! A spectrum sigma is a non-increasing list of k positive probabilities
//! summing to one, together with the ambient dimension n >= k. It labels
//! the unitary orbit of density operators with those eigenvalues. A
//! purification of a state rho on that orbit is an n x k matrix Psi with
//! Psi'Psi = P(sigma) and Psi Psi' = rho, where P(sigma) is the diagonal
//! matrix of the spectrum. Tangent vectors X at Psi satisfy
//! Psi'X + X'Psi = 0, and the gauge algebra consists of anti-Hermitian
//! k x k matrices commuting with P(sigma).

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    antiherm_residual, cluster_by_gap, complex_gaussian, cr, eigh_desc, haar_isometry,
    haar_unitary, herm_residual, hermitize, CMatrix, CVector,
};

/// Ordered positive eigenvalue list with multiplicities and ambient
/// dimension; the orbit label.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    blocks: Vec<Range<usize>>,
    hilbert_dim: usize,
}

impl Spectrum {
    pub(crate) fn from_sorted_values(
        values: Vec<f64>,
        hilbert_dim: usize,
        degeneracy_tol: f64,
    ) -> Self {
        let blocks = cluster_by_gap(&values, degeneracy_tol);
        Self {
            values,
            blocks,
            hilbert_dim,
        }
    }

    /// Eigenvalues with multiplicity, non-increasing.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rank k, the number of positive eigenvalues.
    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Ambient Hilbert space dimension n.
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Index ranges of the degenerate blocks, in descending eigenvalue order.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    /// Distinct eigenvalues with their multiplicities.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        self.blocks
            .iter()
            .map(|b| {
                let mean = self.values[b.clone()].iter().sum::<f64>() / b.len() as f64;
                (mean, b.len())
            })
            .collect()
    }

    /// True when some eigenvalue has multiplicity above one.
    pub fn is_degenerate(&self) -> bool {
        self.blocks.len() < self.values.len()
    }

    /// The k x k diagonal matrix P(sigma).
    pub fn p_matrix(&self) -> CMatrix {
        self.diag_of(|p| p)
    }

    /// P(sigma)^(1/2).
    pub fn p_sqrt(&self) -> CMatrix {
        self.diag_of(|p| p.sqrt())
    }

    /// P(sigma)^(-1); well defined because every entry is positive.
    pub fn p_inv(&self) -> CMatrix {
        self.diag_of(|p| 1.0 / p)
    }

    fn diag_of(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = CVector::from_iterator(self.values.len(), self.values.iter().map(|&p| cr(f(p))));
        CMatrix::from_diagonal(&d)
    }

    /// Largest entrywise deviation from another spectrum; infinite when the
    /// ranks or ambient dimensions differ.
    pub fn deviation_from(&self, other: &Spectrum) -> f64 {
        if self.rank() != other.rank() || self.hilbert_dim != other.hilbert_dim {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_matches(&self, other: &Spectrum, tol: f64) -> Result<()> {
        let deviation = self.deviation_from(other);
        if deviation > tol {
            return Err(Error::SpectrumMismatch { deviation });
        }
        Ok(())
    }
}

/// Validates a raw eigenvalue list against an ambient dimension.
///
/// The list must be non-increasing, strictly positive, and sum to one
/// within the trace tolerance; degenerate blocks are clustered by the
/// degeneracy tolerance.
pub fn validate_spectrum(values: &[f64], hilbert_dim: usize, tols: &Tolerances) -> Result<Spectrum> {
    let k = values.len();
    if hilbert_dim < k {
        return Err(Error::DimensionTooSmall { n: hilbert_dim, k });
    }
    for (index, &value) in values.iter().enumerate() {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NotPositive { index, value });
        }
    }
    for index in 1..k {
        let rise = values[index] - values[index - 1];
        if rise > tols.degeneracy {
            return Err(Error::NotDecreasing { index, rise });
        }
    }
    let trace: f64 = values.iter().sum();
    if (trace - 1.0).abs() > tols.trace {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(Spectrum::from_sorted_values(
        values.to_vec(),
        hilbert_dim,
        tols.degeneracy,
    ))
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Re-derives the positive part of the spectrum by diagonalization.
    pub fn spectrum(&self, tols: &Tolerances) -> Result<Spectrum> {
        let (rho, sigma) = density_from_matrix(&self.matrix, tols)?;
        let _ = rho;
        Ok(sigma)
    }
}

/// Validates a raw square matrix as a density operator and derives its
/// spectrum, discarding eigenvalues below the PSD tolerance.
pub fn density_from_matrix(matrix: &CMatrix, tols: &Tolerances) -> Result<(DensityOperator, Spectrum)> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: n,
            cols: matrix.ncols(),
        });
    }
    let residual = herm_residual(matrix);
    if residual > tols.herm {
        return Err(Error::NotHermitian { residual });
    }
    let trace = matrix.trace();
    if (trace.re - 1.0).abs() > tols.trace || trace.im.abs() > tols.trace {
        return Err(Error::TraceNotOne { trace: trace.re });
    }
    let (eigs, _) = eigh_desc(matrix);
    if let Some(&min_eig) = eigs.last() {
        if min_eig < -tols.psd {
            return Err(Error::NotPSD { min_eig });
        }
    }
    let kept: Vec<f64> = eigs.into_iter().filter(|&e| e > tols.psd).collect();
    if kept.is_empty() {
        return Err(Error::RankMismatch {
            expected: 1,
            found: 0,
        });
    }
    let sigma = Spectrum::from_sorted_values(kept, n, tols.degeneracy);
    Ok((
        DensityOperator {
            matrix: hermitize(matrix),
        },
        sigma,
    ))
}

/// Point of the purification space: n x k matrix with Psi'Psi = P(sigma).
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    matrix: CMatrix,
    spectrum: Spectrum,
}

impl Purification {
    /// Validates the fiber condition Psi'Psi = P(sigma).
    pub fn new(matrix: CMatrix, spectrum: Spectrum, tols: &Tolerances) -> Result<Self> {
        if matrix.nrows() != spectrum.hilbert_dim() || matrix.ncols() != spectrum.rank() {
            return Err(Error::ShapeMismatch {
                expected_rows: spectrum.hilbert_dim(),
                expected_cols: spectrum.rank(),
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let residual = (matrix.adjoint() * &matrix - spectrum.p_matrix()).norm();
        if residual > tols.fiber {
            return Err(Error::FiberViolation { residual });
        }
        Ok(Self { matrix, spectrum })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, spectrum: Spectrum) -> Self {
        Self { matrix, spectrum }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn hilbert_dim(&self) -> usize {
        self.spectrum.hilbert_dim()
    }

    pub fn rank(&self) -> usize {
        self.spectrum.rank()
    }

    pub(crate) fn base_deviation(&self, other: &Purification) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).norm()
    }
}

/// Purification assembled from the eigenvectors of rho: columns are
/// sqrt(p_i) v_i in descending eigenvalue order.
pub fn standard_purification(rho: &DensityOperator, tols: &Tolerances) -> Result<Purification> {
    let n = rho.dim();
    let (eigs, vectors) = eigh_desc(rho.matrix());
    if let Some(&min_eig) = eigs.last() {
        if min_eig < -tols.psd {
            return Err(Error::NotPSD { min_eig });
        }
    }
    let kept: Vec<f64> = eigs.iter().copied().filter(|&e| e > tols.psd).collect();
    let k = kept.len();
    if k == 0 {
        return Err(Error::RankMismatch {
            expected: 1,
            found: 0,
        });
    }
    let spectrum = Spectrum::from_sorted_values(kept, n, tols.degeneracy);
    let matrix = CMatrix::from_fn(n, k, |i, j| vectors[(i, j)] * cr(spectrum.values()[j].sqrt()));
    Purification::new(matrix, spectrum, tols)
}

/// Haar-conjugated representative of the orbit labeled by sigma;
/// deterministic per seed.
pub fn random_density(sigma: &Spectrum, seed: u64) -> DensityOperator {
    let n = sigma.hilbert_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(n, &mut rng);
    let d = CVector::from_iterator(
        n,
        (0..n).map(|i| cr(sigma.values().get(i).copied().unwrap_or(0.0))),
    );
    let rho = &u * CMatrix::from_diagonal(&d) * u.adjoint();
    DensityOperator::from_matrix_unchecked(hermitize(&rho))
}

/// Haar-distributed point of the purification space; deterministic per seed.
pub fn random_purification(sigma: &Spectrum, seed: u64) -> Purification {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = haar_isometry(sigma.hilbert_dim(), sigma.rank(), &mut rng);
    Purification::new_unchecked(&v * sigma.p_sqrt(), sigma.clone())
}

/// True when the supports are orthogonal, measured by the Frobenius norm
/// of the product; requires a common spectrum.
pub fn distinguishable(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    tols: &Tolerances,
) -> Result<bool> {
    let s0 = rho0.spectrum(tols)?;
    let s1 = rho1.spectrum(tols)?;
    s0.check_matches(&s1, tols.spectrum)?;
    Ok((rho0.matrix() * rho1.matrix()).norm() < tols.orth)
}

/// Velocity attached to a purification; satisfies Psi'X + X'Psi = 0.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: Purification,
    matrix: CMatrix,
}

impl TangentVector {
    pub fn new(base: Purification, matrix: CMatrix, tols: &Tolerances) -> Result<Self> {
        if matrix.shape() != base.matrix().shape() {
            return Err(Error::ShapeMismatch {
                expected_rows: base.hilbert_dim(),
                expected_cols: base.rank(),
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let overlap = base.matrix().adjoint() * &matrix;
        let residual = antiherm_residual(&overlap);
        let scale = matrix.norm().max(1.0);
        if residual > tols.tangent * scale {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { base, matrix })
    }

    pub(crate) fn new_unchecked(base: Purification, matrix: CMatrix) -> Self {
        Self { base, matrix }
    }

    pub fn base(&self) -> &Purification {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Random tangent vector at a purification, built by projecting a Gaussian
/// ambient matrix onto the tangency condition; deterministic per seed.
pub fn random_tangent(psi: &Purification, seed: u64) -> TangentVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = complex_gaussian(psi.hilbert_dim(), psi.rank(), &mut rng);
    let overlap = psi.matrix().adjoint() * &g;
    // Keep only the anti-Hermitian part of Psi'G; the range-orthogonal
    // component of G is unconstrained by tangency.
    let anti = (&overlap - overlap.adjoint()).scale(0.5);
    let p_inv = psi.spectrum().p_inv();
    let range_projector = psi.matrix() * &p_inv * psi.matrix().adjoint();
    let n = psi.hilbert_dim();
    let complement = CMatrix::identity(n, n) - range_projector;
    let matrix = psi.matrix() * &p_inv * anti + complement * g;
    TangentVector::new_unchecked(psi.clone(), matrix)
}

/// Anti-Hermitian k x k matrix commuting with P(sigma); the gauge algebra.
#[derive(Debug, Clone)]
pub struct GaugeAlgebraElement {
    matrix: CMatrix,
    spectrum: Spectrum,
}

impl GaugeAlgebraElement {
    pub fn new(matrix: CMatrix, spectrum: Spectrum, tols: &Tolerances) -> Result<Self> {
        let k = spectrum.rank();
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(Error::ShapeMismatch {
                expected_rows: k,
                expected_cols: k,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let residual = antiherm_residual(&matrix);
        if residual > tols.herm * matrix.norm().max(1.0) {
            return Err(Error::NotAntiHermitian { residual });
        }
        let p = spectrum.p_matrix();
        let commute_residual = (&matrix * &p - &p * &matrix).norm();
        if commute_residual > tols.commute * matrix.norm().max(1.0) {
            return Err(Error::NotBlockDiagonal {
                residual: commute_residual,
            });
        }
        Ok(Self { matrix, spectrum })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, spectrum: Spectrum) -> Self {
        Self { matrix, spectrum }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Blockwise diagonalization of i*xi: returns a gauge group element U
    /// (unitary, commuting with P) and the real eigenvalues lambda of i*xi,
    /// so that U'(i*xi)U = diag(lambda).
    pub fn diagonalize(&self) -> (CMatrix, Vec<f64>) {
        let k = self.spectrum.rank();
        let h = &self.matrix * crate::linalg::c(0.0, 1.0);
        let mut u = CMatrix::zeros(k, k);
        let mut lambdas = vec![0.0; k];
        for block in self.spectrum.blocks() {
            let m = block.len();
            let sub = h.view((block.start, block.start), (m, m)).into_owned();
            let (vals, vecs) = eigh_desc(&sub);
            for (j, &val) in vals.iter().enumerate() {
                lambdas[block.start + j] = val;
                for i in 0..m {
                    u[(block.start + i, block.start + j)] = vecs[(i, j)];
                }
            }
        }
        (u, lambdas)
    }
}

/// Random gauge algebra element for sigma: independent anti-Hermitian
/// blocks matching the multiplicity structure; deterministic per seed.
pub fn random_gauge_element(sigma: &Spectrum, seed: u64) -> GaugeAlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = sigma.rank();
    let mut matrix = CMatrix::zeros(k, k);
    for block in sigma.blocks() {
        let m = block.len();
        let g = complex_gaussian(m, m, &mut rng);
        let anti = (&g - g.adjoint()).scale(0.5);
        for i in 0..m {
            for j in 0..m {
                matrix[(block.start + i, block.start + j)] = anti[(i, j)];
            }
        }
    }
    GaugeAlgebraElement::new_unchecked(matrix, sigma.clone())
}

/// Random gauge group element exp(xi) for a random algebra element xi.
pub fn random_gauge_unitary(sigma: &Spectrum, seed: u64) -> CMatrix {
    let xi = random_gauge_element(sigma, seed);
    crate::linalg::exp_antihermitian(xi.matrix())
}
