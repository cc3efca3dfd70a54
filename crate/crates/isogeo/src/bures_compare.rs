//! Comparison of the orbit geometry with the bundle of invertible
//! purifications and its Bures distance.
//!
//! Square invertible purifications of full-rank states form a larger
//! bundle over the invertible density operators whose mechanical
//! connection induces the Bures metric downstairs. Orbit curves are in
//! particular curves in that larger bundle, and both metrics restrict
//! the same ambient inner product, so the orbit distance can never fall
//! below the Bures distance. This module checks horizontality in the
//! larger bundle, verifies that its horizontal directions meet the orbit
//! bundle's tangent spaces only in zero, evaluates the two-level Bures
//! formula, and works out a rotation family on which the inequality
//! between the two distances is strict.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{c, cr, eigh_desc, hermitize, random_hermitian, real_trace, CMatrix};
use crate::state_space::{density_from_matrix, DensityOperator, Purification};

type RMatrix = nalgebra::DMatrix<f64>;

/// Distance comparison for a rotation family between two-level states.
///
/// `dist_g` is the orbit distance of the family's endpoints, `dist_b`
/// the Bures value of the same pair, and `gap` their difference, which
/// is nonnegative up to roundoff; `strict` records whether the gap is
/// resolvably positive. The serialized form spells the Bures field
/// `dist_B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuresReport {
    pub p1: f64,
    pub p2: f64,
    pub eps: f64,
    pub dist_g: f64,
    #[serde(rename = "dist_B")]
    pub dist_b: f64,
    pub gap: f64,
    pub strict: bool,
}

/// Tests whether a direction at a square invertible purification is
/// horizontal in the bundle of invertible purifications, which holds
/// exactly when psi' x - x' psi vanishes.
///
/// The base point must be square with unit Frobenius norm and safely
/// invertible; the direction must have the same shape.
pub fn uhlmann_horizontal_check(psi: &CMatrix, x: &CMatrix, tols: &Tolerances) -> Result<bool> {
    let n = psi.nrows();
    if psi.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: psi.nrows(),
            cols: psi.ncols(),
        });
    }
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    let norm = psi.norm();
    if (norm * norm - 1.0).abs() > tols.trace * 10.0 {
        return Err(Error::TraceNotOne { trace: norm * norm });
    }
    let sv = smallest_singular_value(psi);
    if sv <= tols.psd.sqrt() {
        return Err(Error::NotInvertible { sv });
    }
    let residual = (psi.adjoint() * x - x.adjoint() * psi).norm();
    Ok(residual <= tols.identity * x.norm().max(1.0))
}

/// Checks that no nonzero horizontal direction of the bundle of
/// invertible purifications is tangent to the orbit bundle's total space
/// at a square purification.
///
/// Horizontality requires psi' x - x' psi = 0 while tangency requires
/// psi' x + x' psi = 0, so joint solutions satisfy psi' x = 0 and vanish
/// whenever psi is invertible. The check stacks both real linear
/// constraint systems, confirms full numeric column rank, and then
/// probes `trials` random unit-norm horizontal directions, each of which
/// must show a tangency defect above the rank tolerance.
pub fn intersection_triviality_check(
    psi: &Purification,
    trials: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<bool> {
    let n = psi.hilbert_dim();
    let k = psi.rank();
    let sv = smallest_singular_value(psi.matrix());
    if k != n || sv <= tols.psd.sqrt() {
        return Err(Error::NotFullRank { sv });
    }
    let horizontal = constraint_matrix(psi.matrix(), -1.0);
    let tangential = constraint_matrix(psi.matrix(), 1.0);
    let mut joint = RMatrix::zeros(4 * n * n, 2 * n * n);
    joint.rows_mut(0, 2 * n * n).copy_from(&horizontal);
    joint.rows_mut(2 * n * n, 2 * n * n).copy_from(&tangential);
    let svals = joint.svd(false, false).singular_values;
    let top = svals.iter().fold(0.0_f64, |m, s| m.max(*s));
    let rank_tol = tols.identity * top.max(1.0);
    let trivial = svals.iter().all(|s| *s > rank_tol);
    if !trivial {
        return Ok(false);
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    for _ in 0..trials {
        let s = random_hermitian(n, &mut rng);
        let mut x = &s * psi.matrix();
        let norm = x.norm();
        if norm <= tols.psd {
            continue;
        }
        x = x.scale(1.0 / norm);
        let defect = (psi.matrix().adjoint() * &x + x.adjoint() * psi.matrix()).norm();
        if defect <= rank_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Real matrix of the constraint x -> psi' x + sign * x' psi acting on
/// the real and imaginary parts of x stacked column by column.
fn constraint_matrix(psi: &CMatrix, sign: f64) -> RMatrix {
    let n = psi.nrows();
    let mut out = RMatrix::zeros(2 * n * n, 2 * n * n);
    for col in 0..2 * n * n {
        let entry = col % (n * n);
        let (p, q) = (entry % n, entry / n);
        let mut basis = CMatrix::zeros(n, n);
        basis[(p, q)] = if col < n * n { cr(1.0) } else { c(0.0, 1.0) };
        let image = psi.adjoint() * &basis + (basis.adjoint() * psi).scale(sign);
        for j in 0..n {
            for i in 0..n {
                out[(2 * (j * n + i), col)] = image[(i, j)].re;
                out[(2 * (j * n + i) + 1, col)] = image[(i, j)].im;
            }
        }
    }
    out
}

fn smallest_singular_value(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let (lam, _) = eigh_desc(&hermitize(&gram));
    lam.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Bures distance between a two-level state and its perturbation by a
/// traceless Hermitian increment, via the trace formula
/// dist(rho, rho + d)^2 = (1/4) Tr(d d + (1 / det rho) (d - rho d)^2).
pub fn dittmann_bures_2x2(
    rho: &DensityOperator,
    delta: &CMatrix,
    tols: &Tolerances,
) -> Result<f64> {
    if rho.dim() != 2 || delta.nrows() != 2 || delta.ncols() != 2 {
        return Err(Error::ShapeMismatch {
            expected_rows: 2,
            expected_cols: 2,
            rows: delta.nrows(),
            cols: delta.ncols(),
        });
    }
    let herm = crate::linalg::herm_residual(delta);
    if herm > tols.herm * delta.norm().max(1.0) {
        return Err(Error::NotHermitian { residual: herm });
    }
    let trace = real_trace(delta);
    if trace.abs() > tols.trace * 10.0 {
        return Err(Error::NotApplicable {
            reason: format!("perturbation must be traceless, trace {trace:.3e}"),
        });
    }
    let m = rho.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    if det <= tols.psd {
        let (lam, _) = eigh_desc(m);
        return Err(Error::SingularState {
            min_eig: lam.last().copied().unwrap_or(0.0),
        });
    }
    let shifted = delta - m * delta;
    let radicand = 0.25 * (real_trace(&(delta * delta)) + real_trace(&(&shifted * &shifted)) / det);
    if radicand < -tols.identity {
        return Err(Error::NegativeRadicand { radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

fn check_family_params(p1: f64, p2: f64, tols: &Tolerances) -> Result<()> {
    if p1.is_nan() || p2.is_nan() || p2 <= 0.0 || p1 < p2 {
        return Err(Error::InvalidSpectrum {
            reason: format!("need p1 >= p2 > 0, got p1 = {p1}, p2 = {p2}"),
        });
    }
    if (p1 + p2 - 1.0).abs() > tols.trace * 10.0 {
        return Err(Error::InvalidSpectrum {
            reason: format!("p1 + p2 must equal one, got {}", p1 + p2),
        });
    }
    Ok(())
}

/// Point at parameter `t` of the rotation family with spectrum
/// (p1, p2) and rate `eps`: the diagonal state diag(p1, p2) conjugated
/// by the plane rotation of angle eps t, written out entrywise.
pub fn example_curve(
    p1: f64,
    p2: f64,
    eps: f64,
    t: f64,
    tols: &Tolerances,
) -> Result<DensityOperator> {
    check_family_params(p1, p2, tols)?;
    let (s, co) = (eps * t).sin_cos();
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            cr(p2 * s * s + p1 * co * co),
            cr((p2 - p1) * s * co),
            cr((p2 - p1) * s * co),
            cr(p1 * s * s + p2 * co * co),
        ],
    );
    let (rho, _) = density_from_matrix(&m, tols)?;
    Ok(rho)
}

/// Distance comparison at the endpoints of the rotation family.
///
/// The family is length minimizing for small rates, so the orbit
/// distance between its endpoints equals `eps` whenever p1 > p2; for
/// p1 = p2 the family is constant and the distance is zero. The Bures
/// value comes from the closed form
/// ((p1 - p2)/sqrt(2)) |sin eps| sqrt(2 + ((p1 - p2)^2/(2 p1 p2)) sin^2 eps)
/// and is cross-checked against the two-level trace formula applied to
/// the endpoint difference.
pub fn example_gap_report(p1: f64, p2: f64, eps: f64, tols: &Tolerances) -> Result<BuresReport> {
    check_family_params(p1, p2, tols)?;
    if eps.is_nan() || eps <= 0.0 || eps > std::f64::consts::FRAC_PI_4 {
        return Err(Error::InvalidSpectrum {
            reason: format!(
                "rate must lie in (0, pi/4] for the length-minimality claim, got {eps}"
            ),
        });
    }
    let degenerate = (p1 - p2).abs() <= tols.degeneracy;
    let dist_g = if degenerate { 0.0 } else { eps };
    let s = eps.sin();
    let diff = p1 - p2;
    let dist_b =
        diff / 2.0_f64.sqrt() * s.abs() * (2.0 + diff * diff / (2.0 * p1 * p2) * s * s).sqrt();
    let rho0 = example_curve(p1, p2, eps, 0.0, tols)?;
    let rho1 = example_curve(p1, p2, eps, 1.0, tols)?;
    let delta = rho1.matrix() - rho0.matrix();
    let via_trace_formula = dittmann_bures_2x2(&rho0, &delta, tols)?;
    let deviation = (dist_b - via_trace_formula).abs();
    if deviation > tols.identity * 10.0 {
        return Err(Error::NotApplicable {
            reason: format!(
                "closed form and trace formula disagree by {deviation:.3e}"
            ),
        });
    }
    let gap = dist_g - dist_b;
    Ok(BuresReport {
        p1,
        p2,
        eps,
        dist_g,
        dist_b,
        gap,
        strict: gap > tols.identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{curve_length, uniform_grid, StateCurve};
    use crate::linalg::complex_gaussian;
    use crate::state_space::{random_purification, validate_spectrum};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn square_purification(values: &[f64], seed: u64) -> Purification {
        let sigma = validate_spectrum(values, values.len(), &tols()).unwrap();
        random_purification(&sigma, seed)
    }

    #[test]
    fn hermitian_multiples_of_the_frame_are_horizontal() {
        let psi = square_purification(&[0.7, 0.3], 11);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let s = random_hermitian(2, &mut rng);
        let x = &s * psi.matrix();
        assert!(uhlmann_horizontal_check(psi.matrix(), &x, &tols()).unwrap());
    }

    #[test]
    fn vertical_directions_are_not_horizontal() {
        let psi = square_purification(&[0.6, 0.3, 0.1], 13);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        let g = complex_gaussian(3, 3, &mut rng);
        let xi = (&g - g.adjoint()).scale(0.5);
        let x = psi.matrix() * &xi;
        assert!(!uhlmann_horizontal_check(psi.matrix(), &x, &tols()).unwrap());
    }

    #[test]
    fn the_zero_direction_is_horizontal() {
        let psi = square_purification(&[0.7, 0.3], 15);
        let zero = CMatrix::zeros(2, 2);
        assert!(uhlmann_horizontal_check(psi.matrix(), &zero, &tols()).unwrap());
    }

    #[test]
    fn singular_frames_are_rejected() {
        let mut frame = CMatrix::zeros(2, 2);
        frame[(0, 0)] = cr(1.0);
        let x = CMatrix::zeros(2, 2);
        assert!(matches!(
            uhlmann_horizontal_check(&frame, &x, &tols()).unwrap_err(),
            Error::NotInvertible { .. }
        ));
    }

    #[test]
    fn frames_without_unit_norm_are_rejected() {
        let frame = CMatrix::identity(2, 2);
        let x = CMatrix::zeros(2, 2);
        assert!(matches!(
            uhlmann_horizontal_check(&frame, &x, &tols()).unwrap_err(),
            Error::TraceNotOne { .. }
        ));
    }

    #[test]
    fn joint_horizontal_tangential_space_is_trivial() {
        for (values, seed) in [
            (vec![0.7, 0.3], 21_u64),
            (vec![0.5, 0.3, 0.2], 22),
            (vec![0.4, 0.4, 0.2], 23),
            (vec![0.4, 0.3, 0.2, 0.1], 24),
        ] {
            let psi = square_purification(&values, seed);
            assert!(
                intersection_triviality_check(&psi, 10, 7 * seed, &tols()).unwrap(),
                "joint space should be trivial for {values:?}"
            );
        }
    }

    #[test]
    fn horizontality_alone_admits_nonzero_solutions() {
        let psi = square_purification(&[0.7, 0.3], 31);
        let n = 2;
        let single = constraint_matrix(psi.matrix(), -1.0);
        let svals = single.svd(false, false).singular_values;
        let top = svals.iter().fold(0.0_f64, |m, s| m.max(*s));
        let nullity = svals.iter().filter(|s| **s <= 1e-9 * top).count();
        assert_eq!(nullity, n * n, "half of the directions stay horizontal");
    }

    #[test]
    fn rectangular_purifications_are_rejected() {
        let sigma = validate_spectrum(&[0.7, 0.3], 3, &tols()).unwrap();
        let psi = random_purification(&sigma, 33);
        assert!(matches!(
            intersection_triviality_check(&psi, 4, 2, &tols()).unwrap_err(),
            Error::NotFullRank { .. }
        ));
    }

    #[test]
    fn zero_perturbations_have_zero_bures_distance() {
        let (rho, _) = density_from_matrix(
            &CMatrix::from_row_slice(2, 2, &[cr(0.7), cr(0.0), cr(0.0), cr(0.3)]),
            &tols(),
        )
        .unwrap();
        let d = dittmann_bures_2x2(&rho, &CMatrix::zeros(2, 2), &tols()).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn offdiagonal_perturbation_of_the_reference_state() {
        let (rho, _) = density_from_matrix(
            &CMatrix::from_row_slice(2, 2, &[cr(0.7), cr(0.0), cr(0.0), cr(0.3)]),
            &tols(),
        )
        .unwrap();
        let delta = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.1), cr(0.1), cr(0.0)]);
        let d = dittmann_bures_2x2(&rho, &delta, &tols()).unwrap();
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed_case_matches_hand_expansion() {
        let (rho, _) = density_from_matrix(
            &CMatrix::from_row_slice(2, 2, &[cr(0.5), cr(0.0), cr(0.0), cr(0.5)]),
            &tols(),
        )
        .unwrap();
        let delta = CMatrix::from_row_slice(2, 2, &[cr(0.04), cr(0.03), cr(0.03), cr(-0.04)]);
        // With rho = I/2 the shifted factor is delta/2, det rho = 1/4, so
        // the radicand is (1/4)(1 + 1/4 * 4) Tr(delta^2) = Tr(delta^2)/2.
        let tr2: f64 = 2.0 * (0.04 * 0.04 + 0.03 * 0.03);
        let d = dittmann_bures_2x2(&rho, &delta, &tols()).unwrap();
        assert_abs_diff_eq!(d, (tr2 / 2.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn singular_states_are_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
        let rho = DensityOperator::from_matrix_unchecked(m);
        let delta = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.1), cr(0.1), cr(0.0)]);
        assert!(matches!(
            dittmann_bures_2x2(&rho, &delta, &tols()).unwrap_err(),
            Error::SingularState { .. }
        ));
    }

    #[test]
    fn traced_perturbations_are_rejected() {
        let (rho, _) = density_from_matrix(
            &CMatrix::from_row_slice(2, 2, &[cr(0.7), cr(0.0), cr(0.0), cr(0.3)]),
            &tols(),
        )
        .unwrap();
        let delta = CMatrix::from_row_slice(2, 2, &[cr(0.1), cr(0.0), cr(0.0), cr(0.1)]);
        assert!(matches!(
            dittmann_bures_2x2(&rho, &delta, &tols()).unwrap_err(),
            Error::NotApplicable { .. }
        ));
    }

    #[test]
    fn family_starts_at_the_diagonal_state() {
        let rho = example_curve(0.7, 0.3, 0.5, 0.0, &tols()).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn family_entries_follow_the_rotation_formulas() {
        let (p1, p2, eps, t) = (0.7, 0.3, 0.5, 1.0);
        let rho = example_curve(p1, p2, eps, t, &tols()).unwrap();
        let (s, co) = (eps * t).sin_cos();
        assert_abs_diff_eq!(
            rho.matrix()[(0, 0)].re,
            p2 * s * s + p1 * co * co,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].re, (p2 - p1) * s * co, epsilon = 1e-15);
        assert_abs_diff_eq!(
            rho.matrix()[(1, 1)].re,
            p1 * s * s + p2 * co * co,
            epsilon = 1e-15
        );
    }

    #[test]
    fn family_is_isospectral_for_random_parameters() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let t = 4.0 * rand::Rng::random::<f64>(&mut rng) - 2.0;
            let rho = example_curve(0.7, 0.3, 0.9, t, &tols()).unwrap();
            let (lam, _) = eigh_desc(rho.matrix());
            assert_abs_diff_eq!(lam[0], 0.7, epsilon = 1e-12);
            assert_abs_diff_eq!(lam[1], 0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn disordered_or_unnormalized_parameters_are_rejected() {
        assert!(matches!(
            example_curve(0.3, 0.7, 0.5, 0.0, &tols()).unwrap_err(),
            Error::InvalidSpectrum { .. }
        ));
        assert!(matches!(
            example_curve(0.7, 0.4, 0.5, 0.0, &tols()).unwrap_err(),
            Error::InvalidSpectrum { .. }
        ));
        assert!(matches!(
            example_gap_report(0.7, 0.3, 2.0, &tols()).unwrap_err(),
            Error::InvalidSpectrum { .. }
        ));
    }

    #[test]
    fn reference_report_shows_a_strict_gap() {
        let report = example_gap_report(0.7, 0.3, 0.5, &tols()).unwrap();
        assert_abs_diff_eq!(report.dist_g, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(report.dist_b, 0.195_923_167_805_277, epsilon = 1e-12);
        assert_abs_diff_eq!(report.gap, report.dist_g - report.dist_b, epsilon = 1e-15);
        assert!(report.strict);
    }

    #[test]
    fn skewed_report_shows_a_strict_gap() {
        let report = example_gap_report(0.9, 0.1, 0.2, &tols()).unwrap();
        assert_abs_diff_eq!(report.dist_g, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(report.dist_b, 0.16441702937662005, epsilon = 1e-12);
        assert!(report.strict);
    }

    #[test]
    fn degenerate_spectrum_collapses_the_report() {
        let report = example_gap_report(0.5, 0.5, 0.5, &tols()).unwrap();
        assert_abs_diff_eq!(report.dist_g, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.dist_b, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.gap, 0.0, epsilon = 1e-15);
        assert!(!report.strict);
    }

    #[test]
    fn small_rate_ratio_approaches_the_spectral_gap() {
        let report = example_gap_report(0.7, 0.3, 1e-4, &tols()).unwrap();
        let ratio = report.dist_b / report.dist_g;
        assert_abs_diff_eq!(ratio, 0.39999999971428571, epsilon = 1e-12);
        assert!((ratio - (0.7 - 0.3)).abs() < 1e-8);
        assert!(ratio < 1.0);
    }

    #[test]
    fn family_length_matches_the_rate() {
        for (p1, p2, eps) in [(0.7, 0.3, 0.5), (0.9, 0.1, 0.2)] {
            let times = uniform_grid(0.0, 1.0, 600);
            let states = times
                .iter()
                .map(|&t| example_curve(p1, p2, eps, t, &tols()).unwrap())
                .collect();
            let curve = StateCurve::new(times, states, &tols()).unwrap();
            let length = curve_length(&curve, &tols()).unwrap();
            assert_abs_diff_eq!(length, eps, epsilon = 1e-8);
        }
    }

    #[test]
    fn orbit_distance_never_undercuts_the_bures_value() {
        for (p1, p2, eps) in [(0.7, 0.3, 0.5), (0.9, 0.1, 0.2)] {
            let report = example_gap_report(p1, p2, eps, &tols()).unwrap();
            let rho0 = example_curve(p1, p2, eps, 0.0, &tols()).unwrap();
            let rho1 = example_curve(p1, p2, eps, 1.0, &tols()).unwrap();
            let upper =
                crate::evolution::distance_upper_bound(&rho0, &rho1, 2, 5, &tols()).unwrap();
            assert!(
                upper >= report.dist_b - 1e-9,
                "upper bound {upper} fell below the Bures value {}",
                report.dist_b
            );
        }
    }

    #[test]
    fn reports_serialize_with_the_spelled_field_names() {
        let report = example_gap_report(0.7, 0.3, 0.5, &tols()).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"dist_B\""));
        assert!(text.contains("\"dist_g\""));
        let back: BuresReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
