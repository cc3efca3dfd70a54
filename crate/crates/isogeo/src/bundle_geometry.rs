//! The bundle projection, the metrics upstairs and downstairs, moment of
//! inertia and moment map, the mechanical connection, and the vertical and
//! horizontal projections.
//!
//! The projection pi maps a purification Psi to the state Psi Psi'. The
//! purification space carries the metric G(X,Y) = Re Tr(X'Y); the gauge
//! orbits through each Psi are the vertical directions, and their
//! G-orthogonal complements are the horizontal ones. The mechanical
//! connection form
//!
//! ```text
//! A_Psi(X) = sum_j E_j Psi'X E_j P(sigma)^(-1)
//! ```
//!
//! (E_j the multiplicity block projectors) returns the gauge algebra
//! element whose orbit direction matches the vertical part of X, so
//! X_vert = Psi A_Psi(X) and X_horiz = X - X_vert. Pushing G through pi
//! along horizontal lifts defines the submersion metric g on the orbit of
//! isospectral states.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, herm_residual, hermitize, real_inner, CMatrix};
use crate::state_space::{
    standard_purification, DensityOperator, GaugeAlgebraElement, Purification, Spectrum,
    TangentVector,
};

/// Diagonal 0/1 projectors onto the multiplicity blocks of a spectrum.
#[derive(Debug, Clone)]
pub struct BlockProjectors {
    ranges: Vec<std::ops::Range<usize>>,
    rank: usize,
}

impl BlockProjectors {
    pub fn from_spectrum(sigma: &Spectrum) -> Self {
        Self {
            ranges: sigma.blocks().to_vec(),
            rank: sigma.rank(),
        }
    }

    /// Number of distinct eigenvalue blocks.
    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// The projectors E_j as dense matrices. They resolve the identity and
    /// are mutually orthogonal by construction.
    pub fn matrices(&self) -> Vec<CMatrix> {
        self.ranges
            .iter()
            .map(|r| {
                let mut e = CMatrix::zeros(self.rank, self.rank);
                for i in r.clone() {
                    e[(i, i)] = crate::linalg::cr(1.0);
                }
                e
            })
            .collect()
    }

    /// sum_j E_j M E_j: zeroes every entry coupling different blocks.
    pub fn block_diagonal_part(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for r in &self.ranges {
            for i in r.clone() {
                for j in r.clone() {
                    out[(i, j)] = m[(i, j)];
                }
            }
        }
        out
    }
}

/// Bundle projection pi(Psi) = Psi Psi'.
pub fn project(psi: &Purification) -> DensityOperator {
    let rho = psi.matrix() * psi.matrix().adjoint();
    DensityOperator::from_matrix_unchecked(hermitize(&rho))
}

/// The metric on the purification space, G(X,Y) = Re Tr(X'Y).
pub fn purification_metric(x: &TangentVector, y: &TangentVector, tols: &Tolerances) -> Result<f64> {
    let deviation = x.base().base_deviation(y.base());
    if deviation > tols.fiber {
        return Err(Error::BaseMismatch { deviation });
    }
    Ok(real_inner(x.matrix(), y.matrix()))
}

/// Linear functional on the gauge algebra, stored as the matrix mu of the
/// pairing xi -> Re Tr(mu' xi).
#[derive(Debug, Clone)]
pub struct CotangentValue {
    matrix: CMatrix,
}

impl CotangentValue {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn pair(&self, xi: &GaugeAlgebraElement) -> f64 {
        real_inner(&self.matrix, xi.matrix())
    }
}

/// Moment of inertia form: I(xi) dual vector with I(xi) . eta =
/// Tr((xi'eta + eta'xi) P)/2. Independent of the purification.
pub fn inertia_functional(xi: &GaugeAlgebraElement) -> CotangentValue {
    CotangentValue {
        matrix: xi.matrix() * xi.spectrum().p_matrix(),
    }
}

/// Moment of inertia pairing of two gauge algebra elements over a common
/// spectrum; equals G(Psi xi, Psi eta) at every purification.
pub fn moment_of_inertia(
    xi: &GaugeAlgebraElement,
    eta: &GaugeAlgebraElement,
    tols: &Tolerances,
) -> Result<f64> {
    xi.spectrum().check_matches(eta.spectrum(), tols.spectrum)?;
    Ok(inertia_functional(xi).pair(eta))
}

/// Moment map value as a dual vector: J(X) . xi = G(X, Psi xi).
pub fn moment_map_functional(x: &TangentVector) -> CotangentValue {
    CotangentValue {
        matrix: x.base().matrix().adjoint() * x.matrix(),
    }
}

/// Moment map pairing J(X) . xi for a tangent vector and a gauge algebra
/// element over a common spectrum.
pub fn moment_map(x: &TangentVector, xi: &GaugeAlgebraElement, tols: &Tolerances) -> Result<f64> {
    x.base()
        .spectrum()
        .check_matches(xi.spectrum(), tols.spectrum)?;
    Ok(moment_map_functional(x).pair(xi))
}

/// Mechanical connection form A_Psi(X) = sum_j E_j Psi'X E_j P^(-1).
///
/// Defined on arbitrary ambient n x k matrices; the result commutes with
/// P(sigma) by construction and is anti-Hermitian whenever X is tangent.
/// Solves the inertia equation I(A(X)) = J(X) and reproduces xi on
/// vertical vectors Psi xi.
pub fn connection_form(psi: &Purification, x: &CMatrix) -> Result<GaugeAlgebraElement> {
    if x.shape() != psi.matrix().shape() {
        return Err(Error::ShapeMismatch {
            expected_rows: psi.hilbert_dim(),
            expected_cols: psi.rank(),
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    let projectors = BlockProjectors::from_spectrum(psi.spectrum());
    let overlap = psi.matrix().adjoint() * x;
    let block_part = projectors.block_diagonal_part(&overlap);
    let xi = block_part * psi.spectrum().p_inv();
    Ok(GaugeAlgebraElement::new_unchecked(
        xi,
        psi.spectrum().clone(),
    ))
}

/// Vertical part Psi A_Psi(X) of a tangent vector.
pub fn vertical_projection(x: &TangentVector) -> TangentVector {
    let xi = connection_form(x.base(), x.matrix()).expect("base and vector shapes agree");
    let vertical = x.base().matrix() * xi.matrix();
    TangentVector::new_unchecked(x.base().clone(), vertical)
}

/// Horizontal part X - Psi A_Psi(X) of a tangent vector.
pub fn horizontal_projection(x: &TangentVector) -> TangentVector {
    let vertical = vertical_projection(x);
    let horizontal = x.matrix() - vertical.matrix();
    TangentVector::new_unchecked(x.base().clone(), horizontal)
}

/// A real basis of the gauge algebra u(sigma), one generator set per
/// multiplicity block: i e_jj on the diagonal and the two rotation
/// generators per off-diagonal pair.
pub fn gauge_algebra_basis(sigma: &Spectrum) -> Vec<GaugeAlgebraElement> {
    let k = sigma.rank();
    let mut basis = Vec::new();
    for block in sigma.blocks() {
        for j in block.clone() {
            let mut m = CMatrix::zeros(k, k);
            m[(j, j)] = crate::linalg::c(0.0, 1.0);
            basis.push(GaugeAlgebraElement::new_unchecked(m, sigma.clone()));
        }
        for j in block.clone() {
            for l in (j + 1)..block.end {
                let mut re = CMatrix::zeros(k, k);
                re[(j, l)] = crate::linalg::cr(1.0);
                re[(l, j)] = crate::linalg::cr(-1.0);
                basis.push(GaugeAlgebraElement::new_unchecked(re, sigma.clone()));
                let mut im = CMatrix::zeros(k, k);
                im[(j, l)] = crate::linalg::c(0.0, 1.0);
                im[(l, j)] = crate::linalg::c(0.0, 1.0);
                basis.push(GaugeAlgebraElement::new_unchecked(im, sigma.clone()));
            }
        }
    }
    basis
}

/// Horizontal lift of an orbit velocity rhodot at the purification Psi.
///
/// Solves rhodot = a rho - rho a for the minimal-norm anti-Hermitian a in
/// the eigenbasis of rho (entries between eigenvalues closer than the
/// degeneracy tolerance are unconstrained and set to zero), then removes
/// the vertical part of a Psi. The input must be Hermitian and must have
/// vanishing blocks between degenerate eigenvalues, including the kernel
/// block, which is the consistency condition for tangency to the orbit.
pub fn tangent_lift(psi: &Purification, rhodot: &CMatrix, tols: &Tolerances) -> Result<TangentVector> {
    let n = psi.hilbert_dim();
    if rhodot.nrows() != n || rhodot.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: rhodot.nrows(),
            cols: rhodot.ncols(),
        });
    }
    let rho = psi.matrix() * psi.matrix().adjoint();
    let (lam, v) = eigh_desc(&rho);
    let a = minimal_generator(&lam, &v, rhodot, tols)?;
    let raw = &a * psi.matrix();
    let xi = connection_form(psi, &raw)?;
    let horizontal = &raw - psi.matrix() * xi.matrix();
    Ok(TangentVector::new_unchecked(psi.clone(), horizontal))
}

/// Minimal-Frobenius-norm anti-Hermitian solution a of rhodot = [a, rho],
/// computed in a given eigendecomposition of rho. Entries between
/// eigenvalues closer than the degeneracy tolerance are unconstrained by
/// the commutator and set to zero; the corresponding entries of rhodot
/// must vanish for the equation to be solvable, which is exactly the
/// consistency condition for tangency to the isospectral orbit.
pub(crate) fn minimal_generator(
    lam: &[f64],
    v: &CMatrix,
    rhodot: &CMatrix,
    tols: &Tolerances,
) -> Result<CMatrix> {
    let n = lam.len();
    let scale = rhodot.norm().max(1.0);
    let herm = herm_residual(rhodot);
    if herm > tols.herm * scale {
        return Err(Error::NotHermitian { residual: herm });
    }
    let m = v.adjoint() * rhodot * v;
    let clusters = crate::linalg::cluster_by_gap(lam, tols.degeneracy);
    let mut within = 0.0_f64;
    for cluster in &clusters {
        for i in cluster.clone() {
            for j in cluster.clone() {
                within += m[(i, j)].norm_sqr();
            }
        }
    }
    let within = within.sqrt();
    if within > tols.tangent * scale {
        return Err(Error::NotTangent { residual: within });
    }
    let mut a_eig = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let gap = lam[j] - lam[i];
            if gap.abs() > tols.degeneracy {
                a_eig[(i, j)] = m[(i, j)] / crate::linalg::cr(gap);
            }
        }
    }
    Ok(v * a_eig * v.adjoint())
}

/// The submersion metric g evaluated on an orbit velocity at rho: the
/// squared length of the horizontal lift, independent of the choice of
/// purification over rho.
pub fn state_metric(rho: &DensityOperator, rhodot: &CMatrix, tols: &Tolerances) -> Result<f64> {
    let psi = standard_purification(rho, tols)?;
    let x = tangent_lift(&psi, rhodot, tols)?;
    purification_metric(&x, &x, tols)
}
