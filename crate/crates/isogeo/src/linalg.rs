//! Dense complex linear algebra shared across the crate.
//!
//! Wraps `nalgebra` decompositions with the conventions the geometry code
//! relies on everywhere: Hermitian eigenvalues sorted in descending order,
//! principal logarithms of unitaries that stay anti-Hermitian, and grid
//! utilities (quadrature, finite differences) for sampled curves.

use std::ops::Range;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = Complex::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Frobenius norm of the deviation from Hermitian symmetry.
pub fn herm_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Frobenius norm of the deviation from anti-Hermitian symmetry.
pub fn antiherm_residual(m: &CMatrix) -> f64 {
    (m + m.adjoint()).norm()
}

/// Nearest Hermitian matrix, (M + M')/2.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Real part of the trace.
pub fn real_trace(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Real Hilbert-Schmidt pairing Re Tr(A'B).
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.re * y.re + x.im * y.im;
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order; returns (values, column eigenvectors).
pub fn eigh_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = hermitize(m).symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let values = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), n, |r, col| se.eigenvectors[(r, idx[col])]);
    (values, vectors)
}

/// Splits a descending-sorted list into maximal runs whose consecutive gaps
/// stay within `tol`.
pub fn cluster_by_gap(sorted_desc: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..sorted_desc.len() {
        if sorted_desc[i - 1] - sorted_desc[i] > tol {
            out.push(start..i);
            start = i;
        }
    }
    if !sorted_desc.is_empty() {
        out.push(start..sorted_desc.len());
    }
    out
}

/// Unitary exponential exp(a) of an anti-Hermitian matrix.
pub fn exp_antihermitian(a: &CMatrix) -> CMatrix {
    let h = a * c(0.0, -1.0);
    let (vals, v) = eigh_desc(&h);
    let phases = CVector::from_iterator(vals.len(), vals.iter().map(|&t| c(0.0, t).exp()));
    &v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Principal logarithm of a unitary matrix, returned anti-Hermitian.
///
/// Diagonalizes the commuting Hermitian pair (W + W')/2 and (W - W')/2i in
/// a common basis, refining inside eigenvalue clusters of the first, then
/// reads phases off the diagonal of the rotated W. Eigenvalues of W at -1
/// land on the branch angle pi.
pub fn unitary_log(w: &CMatrix, cluster_tol: f64) -> CMatrix {
    let h_plus = hermitize(w);
    let h_minus = (w - w.adjoint()) * c(0.0, -0.5);
    let (vals, mut v) = eigh_desc(&h_plus);
    for cluster in cluster_by_gap(&vals, cluster_tol) {
        if cluster.len() < 2 {
            continue;
        }
        let vc = v.columns(cluster.start, cluster.len()).into_owned();
        let sub = vc.adjoint() * &h_minus * &vc;
        let (_, u) = eigh_desc(&sub);
        let refined = &vc * u;
        v.columns_mut(cluster.start, cluster.len()).copy_from(&refined);
    }
    let rotated = v.adjoint() * w * &v;
    let n = w.nrows();
    let phases = CVector::from_iterator(n, (0..n).map(|j| c(0.0, rotated[(j, j)].arg())));
    let log = &v * CMatrix::from_diagonal(&phases) * v.adjoint();
    (&log - log.adjoint()).scale(0.5)
}

/// Unitary polar factor of a square matrix via SVD.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    &u * &v_t
}

/// Block-diagonal unitary whose blocks are the polar factors of the
/// corresponding diagonal blocks of m. Entries of m outside the listed
/// blocks are ignored. Degenerate 1x1 blocks with a vanishing entry fall
/// back to 1 so the result is always unitary.
pub fn blockwise_polar(m: &CMatrix, blocks: &[std::ops::Range<usize>]) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for block in blocks {
        let len = block.len();
        let sub = m.view((block.start, block.start), (len, len)).into_owned();
        if len == 1 {
            let z = sub[(0, 0)];
            let w = if z.norm() > 1e-300 { z / cr(z.norm()) } else { cr(1.0) };
            out[(block.start, block.start)] = w;
        } else {
            let u = polar_unitary(&sub);
            out.view_mut((block.start, block.start), (len, len)).copy_from(&u);
        }
    }
    out
}

/// One Newton-Schulz sweep Q(3I - Q'Q)/2; pulls an almost-unitary matrix
/// back onto the unitary group, contracting the defect quadratically.
pub fn reunitarize(q: &CMatrix) -> CMatrix {
    let n = q.ncols();
    let correction = CMatrix::identity(n, n).scale(3.0) - q.adjoint() * q;
    (q * correction).scale(0.5)
}

/// Matrix of iid standard complex Gaussian entries, filled column-major so
/// a seeded generator reproduces it exactly.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the R-diagonal phase fix that removes the QR gauge ambiguity.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    haar_isometry(n, n, rng)
}

/// Haar-distributed isometry (n x k columns, V'V = I).
pub fn haar_isometry<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> CMatrix {
    assert!(k <= n, "isometry needs at least as many rows as columns");
    let g = complex_gaussian(n, k, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = CVector::from_iterator(
        k,
        (0..k).map(|j| {
            let d = r[(j, j)];
            if d.norm() == 0.0 {
                cr(1.0)
            } else {
                d / cr(d.norm())
            }
        }),
    );
    &q * CMatrix::from_diagonal(&phases)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    hermitize(&complex_gaussian(n, n, rng))
}

fn grid_is_uniform(times: &[f64]) -> Option<f64> {
    let n = times.len();
    if n < 2 {
        return None;
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let scale = times.iter().fold(1.0_f64, |m, t| m.max(t.abs()));
    for (i, &t) in times.iter().enumerate() {
        if (t - (times[0] + i as f64 * h)).abs() > 1e-9 * scale {
            return None;
        }
    }
    Some(h)
}

/// Integrates samples over the given time grid.
///
/// Uniform grids get composite Simpson, closing an odd interval count with
/// a single 3/8 panel at the right end; non-uniform grids fall back to the
/// trapezoid rule.
pub fn integrate_samples(times: &[f64], values: &[f64]) -> f64 {
    assert_eq!(times.len(), values.len(), "grid and samples must align");
    let n = times.len();
    if n < 2 {
        return 0.0;
    }
    let Some(h) = grid_is_uniform(times) else {
        return trapezoid(times, values);
    };
    let m = n - 1;
    if m == 1 {
        return trapezoid(times, values);
    }
    let simpson_end = if m.is_multiple_of(2) { m } else { m - 3 };
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        i += 2;
    }
    if simpson_end < m {
        let j = simpson_end;
        acc += 3.0 * h / 8.0
            * (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]);
    }
    acc
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len() {
        acc += (times[i] - times[i - 1]) * (values[i] + values[i - 1]) * 0.5;
    }
    acc
}

fn lagrange3_weights(x: f64, x0: f64, x1: f64, x2: f64) -> [f64; 3] {
    // Form the numerators from node-local differences; expanding them as
    // 2x - xj - xk rounds at the scale of the raw times and loses the
    // small spacing differences that the center weight is made of.
    let d0 = x - x0;
    let d1 = x - x1;
    let d2 = x - x2;
    [
        (d1 + d2) / ((x0 - x1) * (x0 - x2)),
        (d0 + d2) / ((x1 - x0) * (x1 - x2)),
        (d0 + d1) / ((x2 - x0) * (x2 - x1)),
    ]
}

fn combine3(samples: &[CMatrix], idx: [usize; 3], w: [f64; 3]) -> CMatrix {
    samples[idx[0]].scale(w[0]) + samples[idx[1]].scale(w[1]) + samples[idx[2]].scale(w[2])
}

/// Differentiates matrix samples on a time grid.
///
/// Uniform grids with at least five samples use fourth-order five-point
/// stencils throughout, central in the interior and one-sided at the
/// edges; shorter or non-uniform grids use the derivative of the local
/// three-point interpolant.
pub fn sampled_derivative(times: &[f64], samples: &[CMatrix]) -> Vec<CMatrix> {
    assert_eq!(times.len(), samples.len(), "grid and samples must align");
    let n = times.len();
    assert!(n >= 2, "need at least two samples to differentiate");
    if n == 2 {
        let d = (&samples[1] - &samples[0]).scale(1.0 / (times[1] - times[0]));
        return vec![d.clone(), d];
    }
    let uniform_h = grid_is_uniform(times);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if let Some(h) = uniform_h {
            if n >= 5 {
                let inv = 1.0 / (12.0 * h);
                let d = if i >= 2 && i + 2 < n {
                    (samples[i - 2].scale(1.0) - samples[i - 1].scale(8.0)
                        + samples[i + 1].scale(8.0)
                        - samples[i + 2].scale(1.0))
                    .scale(inv)
                } else if i == 0 {
                    (samples[0].scale(-25.0) + samples[1].scale(48.0) - samples[2].scale(36.0)
                        + samples[3].scale(16.0)
                        - samples[4].scale(3.0))
                    .scale(inv)
                } else if i == 1 {
                    (samples[0].scale(-3.0) - samples[1].scale(10.0) + samples[2].scale(18.0)
                        - samples[3].scale(6.0)
                        + samples[4].scale(1.0))
                    .scale(inv)
                } else if i == n - 2 {
                    (samples[n - 1].scale(3.0) + samples[n - 2].scale(10.0)
                        - samples[n - 3].scale(18.0)
                        + samples[n - 4].scale(6.0)
                        - samples[n - 5].scale(1.0))
                    .scale(inv)
                } else {
                    (samples[n - 1].scale(25.0) - samples[n - 2].scale(48.0)
                        + samples[n - 3].scale(36.0)
                        - samples[n - 4].scale(16.0)
                        + samples[n - 5].scale(3.0))
                    .scale(inv)
                };
                out.push(d);
                continue;
            }
            if i >= 2 && i + 2 < n {
                let d = (samples[i - 2].scale(1.0) - samples[i - 1].scale(8.0)
                    + samples[i + 1].scale(8.0)
                    - samples[i + 2].scale(1.0))
                .scale(1.0 / (12.0 * h));
                out.push(d);
                continue;
            }
        }
        let idx = if i == 0 {
            [0, 1, 2]
        } else if i == n - 1 {
            [n - 3, n - 2, n - 1]
        } else {
            [i - 1, i, i + 1]
        };
        let w = lagrange3_weights(times[i], times[idx[0]], times[idx[1]], times[idx[2]]);
        out.push(combine3(samples, idx, w));
    }
    out
}
