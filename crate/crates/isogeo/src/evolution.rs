//! Unitary dynamics on an isospectral orbit and the quantities attached
//! to sampled curves: horizontal lifts, minimal-dispersion Hamiltonian
//! synthesis, energy dispersion, lengths, geodesics between states with
//! orthogonal supports, optimized distance upper bounds, and the
//! time-energy product check.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bundle_geometry::{connection_form, minimal_generator, project, state_metric};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    blockwise_polar, c, cluster_by_gap, eigh_desc, exp_antihermitian, hermitize,
    integrate_samples, real_inner, reunitarize, sampled_derivative, unitary_log, CMatrix,
};
use crate::observables::{uncertainty, Observable};
use crate::state_space::{
    distinguishable, standard_purification, DensityOperator, Purification, Spectrum,
};

/// Unitary steps with norm*dt/hbar above this threshold are rejected;
/// beyond it the midpoint rule degrades too far to trust.
const STEP_NORM_LIMIT: f64 = 0.5;

/// Slack allowed on the time-energy product before flagging a violation;
/// absorbs finite-difference and quadrature noise.
const TIME_ENERGY_SLACK: f64 = 1e-6;

/// Phase clustering tolerance when taking logarithms of the unitaries
/// explored by the distance search. Generous on purpose: eigenvalues
/// whose real parts nearly coincide must be grouped and refined through
/// the imaginary part, because resolving them directly yields poorly
/// determined eigenvectors and an inaccurate logarithm.
const LOG_CLUSTER_TOL: f64 = 1e-5;

/// Coarse points per coordinate line search in the distance optimizer.
const LINE_GRID: usize = 13;

/// Golden-section refinement steps per coordinate line search.
const GOLDEN_STEPS: usize = 40;

/// Maximum coordinate-descent sweeps per restart.
const MAX_SWEEPS: usize = 8;

/// Uniform grid of steps+1 samples covering [t0, t1].
pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| t0 + (t1 - t0) * i as f64 / steps as f64)
        .collect()
}

/// A sampled curve of density operators on a strictly increasing time
/// grid, all samples sharing one spectrum.
#[derive(Clone, Debug)]
pub struct StateCurve {
    times: Vec<f64>,
    states: Vec<DensityOperator>,
    spectrum: Spectrum,
}

impl StateCurve {
    pub fn new(times: Vec<f64>, states: Vec<DensityOperator>, tols: &Tolerances) -> Result<Self> {
        check_grid(&times, states.len())?;
        let dim = states[0].dim();
        for state in &states {
            if state.dim() != dim {
                return Err(Error::ShapeMismatch {
                    expected_rows: dim,
                    expected_cols: dim,
                    rows: state.dim(),
                    cols: state.dim(),
                });
            }
        }
        let spectrum = states[0].spectrum(tols)?;
        for state in states.iter().skip(1) {
            let other = state.spectrum(tols)?;
            spectrum.check_matches(&other, tols.spectrum)?;
        }
        Ok(Self {
            times,
            states,
            spectrum,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }
}

/// A sampled curve of purifications over a state curve.
#[derive(Clone, Debug)]
pub struct LiftedCurve {
    times: Vec<f64>,
    purifications: Vec<Purification>,
}

impl LiftedCurve {
    pub fn new(
        times: Vec<f64>,
        purifications: Vec<Purification>,
        tols: &Tolerances,
    ) -> Result<Self> {
        check_grid(&times, purifications.len())?;
        let first = purifications[0].spectrum().clone();
        for psi in purifications.iter().skip(1) {
            first.check_matches(psi.spectrum(), tols.spectrum)?;
        }
        Ok(Self {
            times,
            purifications,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn purifications(&self) -> &[Purification] {
        &self.purifications
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Length of the lift measured in the ambient inner product, using
    /// finite-difference velocities and composite quadrature.
    pub fn length(&self) -> f64 {
        let mats: Vec<CMatrix> = self
            .purifications
            .iter()
            .map(|p| p.matrix().clone())
            .collect();
        let vels = sampled_derivative(&self.times, &mats);
        let speeds: Vec<f64> = vels
            .iter()
            .map(|v| real_inner(v, v).max(0.0).sqrt())
            .collect();
        integrate_samples(&self.times, &speeds)
    }

    /// Largest deviation of any sample from its fiber constraint.
    pub fn max_fiber_residual(&self) -> f64 {
        self.purifications
            .iter()
            .map(|p| {
                let gram = p.matrix().adjoint() * p.matrix();
                (gram - p.spectrum().p_matrix()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest connection-form norm over finite-difference velocities; a
    /// horizontal lift keeps this at the discretization level.
    pub fn max_horizontality_residual(&self) -> f64 {
        let mats: Vec<CMatrix> = self
            .purifications
            .iter()
            .map(|p| p.matrix().clone())
            .collect();
        let vels = sampled_derivative(&self.times, &mats);
        self.purifications
            .iter()
            .zip(&vels)
            .map(|(psi, vel)| {
                connection_form(psi, vel)
                    .expect("velocity shape matches its base point")
                    .matrix()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation between the projected lift and the given curve.
    pub fn max_projection_residual(&self, curve: &StateCurve) -> Result<f64> {
        if curve.len() != self.len() {
            return Err(Error::GridMismatch {
                deviation: (curve.len() as f64 - self.len() as f64).abs(),
            });
        }
        Ok(self
            .purifications
            .iter()
            .zip(curve.states())
            .map(|(psi, rho)| (psi.matrix() * psi.matrix().adjoint() - rho.matrix()).norm())
            .fold(0.0, f64::max))
    }
}

/// A sampled Hermitian generator schedule sharing one value of hbar.
#[derive(Clone, Debug)]
pub struct HamiltonianSchedule {
    times: Vec<f64>,
    operators: Vec<Observable>,
    hbar: f64,
}

impl HamiltonianSchedule {
    pub fn new(
        times: Vec<f64>,
        matrices: Vec<CMatrix>,
        hbar: f64,
        tols: &Tolerances,
    ) -> Result<Self> {
        check_grid(&times, matrices.len())?;
        let dim = matrices[0].nrows();
        let mut operators = Vec::with_capacity(matrices.len());
        for m in matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::ShapeMismatch {
                    expected_rows: dim,
                    expected_cols: dim,
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
            operators.push(Observable::new(m, hbar, tols)?);
        }
        Ok(Self {
            times,
            operators,
            hbar,
        })
    }

    /// Time-independent schedule sampled on a uniform grid.
    pub fn constant(
        matrix: &CMatrix,
        hbar: f64,
        t0: f64,
        t1: f64,
        steps: usize,
        tols: &Tolerances,
    ) -> Result<Self> {
        let times = uniform_grid(t0, t1, steps);
        let matrices = vec![matrix.clone(); times.len()];
        Self::new(times, matrices, hbar, tols)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn operators(&self) -> &[Observable] {
        &self.operators
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }
}

fn check_grid(times: &[f64], samples: usize) -> Result<()> {
    if times.len() != samples {
        return Err(Error::GridMismatch {
            deviation: (times.len() as f64 - samples as f64).abs(),
        });
    }
    if times.len() < 2 {
        return Err(Error::GridMismatch {
            deviation: f64::INFINITY,
        });
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::GridMismatch {
                deviation: w[0] - w[1],
            });
        }
    }
    Ok(())
}

fn check_grids_aligned(a: &[f64], b: &[f64], tol: f64) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch {
            deviation: (a.len() as f64 - b.len() as f64).abs(),
        });
    }
    let span = (a[a.len() - 1] - a[0]).abs().max(1.0);
    let deviation = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if deviation > tol * span {
        return Err(Error::GridMismatch { deviation });
    }
    Ok(())
}

/// Integrates i hbar rhodot = [H, rho] by conjugating with accumulated
/// midpoint-sampled unitary steps, so every sample stays exactly on the
/// isospectral orbit up to roundoff.
pub fn von_neumann_evolve(
    schedule: &HamiltonianSchedule,
    rho0: &DensityOperator,
    tols: &Tolerances,
) -> Result<StateCurve> {
    let n = rho0.dim();
    if schedule.dim() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: schedule.dim(),
            cols: schedule.dim(),
        });
    }
    let hbar = schedule.hbar();
    let mut propagator = CMatrix::identity(n, n);
    let mut states = Vec::with_capacity(schedule.len());
    states.push(rho0.clone());
    for i in 0..schedule.len() - 1 {
        let dt = schedule.times[i + 1] - schedule.times[i];
        let mid = (schedule.operators[i].matrix() + schedule.operators[i + 1].matrix()).scale(0.5);
        let step_norm = mid.norm() * dt / hbar;
        if step_norm > STEP_NORM_LIMIT {
            return Err(Error::StepTooLarge {
                dt: step_norm,
                max: STEP_NORM_LIMIT,
            });
        }
        let generator = mid.scale(dt / hbar) * c(0.0, -1.0);
        propagator = exp_antihermitian(&generator) * propagator;
        propagator = reunitarize(&propagator);
        let state = hermitize(&(&propagator * rho0.matrix() * propagator.adjoint()));
        states.push(DensityOperator::from_matrix_unchecked(state));
    }
    StateCurve::new(schedule.times.clone(), states, tols)
}

/// Transports a starting purification along a state curve so that the
/// discrete velocities stay horizontal.
///
/// Each step advances with the exponential of the averaged minimal-norm
/// generator, retracts exactly onto the fiber over the next sample by
/// aligning against its eigenframe with a blockwise polar factor, and
/// then removes the residual connection-form component of the discrete
/// velocity with two gauge-correction sweeps.
pub fn horizontal_lift(
    curve: &StateCurve,
    psi0: &Purification,
    tols: &Tolerances,
) -> Result<LiftedCurve> {
    let n = curve.states[0].dim();
    if psi0.hilbert_dim() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: curve.spectrum.rank(),
            rows: psi0.hilbert_dim(),
            cols: psi0.rank(),
        });
    }
    psi0.spectrum()
        .check_matches(&curve.spectrum, tols.spectrum)?;
    let start_residual =
        (psi0.matrix() * psi0.matrix().adjoint() - curve.states[0].matrix()).norm();
    if start_residual > tols.fiber {
        return Err(Error::FiberMismatch {
            residual: start_residual,
        });
    }
    let sigma = psi0.spectrum().clone();
    let k = sigma.rank();
    let p_sqrt = sigma.p_sqrt();
    let blocks: Vec<Range<usize>> = sigma.blocks().to_vec();

    let mats: Vec<CMatrix> = curve.states.iter().map(|s| s.matrix().clone()).collect();
    let rhodots = sampled_derivative(&curve.times, &mats);
    let mut frames = Vec::with_capacity(curve.len());
    let mut generators = Vec::with_capacity(curve.len());
    for (state, rhodot) in mats.iter().zip(&rhodots) {
        let (lam, v) = eigh_desc(state);
        generators.push(minimal_generator(&lam, &v, rhodot, tols)?);
        frames.push(v.view((0, 0), (n, k)).into_owned() * &p_sqrt);
    }

    let mut psis: Vec<Purification> = Vec::with_capacity(curve.len());
    psis.push(psi0.clone());
    for i in 0..curve.len() - 1 {
        let dt = curve.times[i + 1] - curve.times[i];
        let half_step = (&generators[i] + &generators[i + 1]).scale(0.5 * dt);
        let psi_pre = exp_antihermitian(&half_step) * psis[i].matrix();
        let overlap = frames[i + 1].adjoint() * &psi_pre;
        let gauge = blockwise_polar(&overlap, &blocks);
        let mut next = &frames[i + 1] * gauge;
        for _ in 0..2 {
            let vel = (&next - psis[i].matrix()).unscale(dt);
            let xi_here = connection_form(&psis[i], &vel)?;
            let probe = Purification::new_unchecked(next.clone(), sigma.clone());
            let xi_there = connection_form(&probe, &vel)?;
            let correction = (xi_here.matrix() + xi_there.matrix()).scale(-0.5 * dt);
            next *= exp_antihermitian(&correction);
        }
        psis.push(Purification::new(next, sigma.clone(), tols)?);
    }
    LiftedCurve::new(curve.times.clone(), psis, tols)
}

/// Synthesizes a Hermitian generator schedule whose evolution retraces
/// the curve while keeping the lift horizontal, which makes its energy
/// dispersion match the curve length.
///
/// With a horizontal velocity V at the purification Psi, the generator is
/// i hbar (V P^-1 Psi' - Psi P^-1 V' - Psi P^-1 (Psi' V) P^-1 Psi'); it
/// is Hermitian and maps Psi to i hbar V, both checked in tests.
pub fn min_dispersion_hamiltonian(
    curve: &StateCurve,
    hbar: f64,
    tols: &Tolerances,
) -> Result<HamiltonianSchedule> {
    let psi0 = standard_purification(&curve.states[0], tols)?;
    let lift = horizontal_lift(curve, &psi0, tols)?;
    let p_inv = curve.spectrum.p_inv();
    let mats: Vec<CMatrix> = lift
        .purifications
        .iter()
        .map(|p| p.matrix().clone())
        .collect();
    let vels = sampled_derivative(&curve.times, &mats);
    let mut hams = Vec::with_capacity(mats.len());
    for (psi, vel) in mats.iter().zip(&vels) {
        let raw = vel * &p_inv * psi.adjoint()
            - psi * &p_inv * vel.adjoint()
            - psi * &p_inv * (psi.adjoint() * vel) * &p_inv * psi.adjoint();
        hams.push(hermitize(&(raw * c(0.0, hbar))));
    }
    HamiltonianSchedule::new(curve.times.clone(), hams, hbar, tols)
}

/// Dimensionless energy dispersion (1/hbar) times the integral of the
/// pointwise uncertainty of the schedule along the curve.
pub fn energy_dispersion(
    schedule: &HamiltonianSchedule,
    curve: &StateCurve,
    tols: &Tolerances,
) -> Result<f64> {
    check_grids_aligned(&schedule.times, &curve.times, tols.identity)?;
    if schedule.dim() != curve.states[0].dim() {
        return Err(Error::ShapeMismatch {
            expected_rows: curve.states[0].dim(),
            expected_cols: curve.states[0].dim(),
            rows: schedule.dim(),
            cols: schedule.dim(),
        });
    }
    let mut samples = Vec::with_capacity(curve.len());
    for (op, state) in schedule.operators.iter().zip(&curve.states) {
        samples.push(uncertainty(op, state)?);
    }
    Ok(integrate_samples(&curve.times, &samples) / schedule.hbar())
}

/// Length of a sampled curve in the quotient metric, via the horizontal
/// norm of finite-difference velocities and composite quadrature.
pub fn curve_length(curve: &StateCurve, tols: &Tolerances) -> Result<f64> {
    let mats: Vec<CMatrix> = curve.states.iter().map(|s| s.matrix().clone()).collect();
    let rhodots = sampled_derivative(&curve.times, &mats);
    let mut speeds = Vec::with_capacity(curve.len());
    for (state, rhodot) in curve.states.iter().zip(&rhodots) {
        let g = state_metric(state, rhodot, tols)?;
        speeds.push(g.max(0.0).sqrt());
    }
    Ok(integrate_samples(&curve.times, &speeds))
}

/// Unit-speed minimizing curve between states with orthogonal supports,
/// returned with the horizontal lift that realizes it; the parameter runs
/// over [0, pi/2] and the length is pi/2.
pub fn distinguishable_geodesic(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    samples: usize,
    tols: &Tolerances,
) -> Result<(StateCurve, LiftedCurve)> {
    if !distinguishable(rho0, rho1, tols)? {
        return Err(Error::NotDistinguishable {
            overlap: (rho0.matrix() * rho1.matrix()).norm(),
        });
    }
    let psi0 = standard_purification(rho0, tols)?;
    let psi1 = standard_purification(rho1, tols)?;
    let overlap = (psi0.matrix().adjoint() * psi1.matrix()).norm();
    if overlap > tols.orth {
        return Err(Error::NotDistinguishable { overlap });
    }
    let segments = samples.max(2);
    let times = uniform_grid(0.0, FRAC_PI_2, segments);
    let sigma = psi0.spectrum().clone();
    let mut purifications = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    for &t in &times {
        let (s, c_) = t.sin_cos();
        let psi = psi0.matrix().scale(c_) + psi1.matrix().scale(s);
        let psi = Purification::new(psi, sigma.clone(), tols)?;
        states.push(project(&psi));
        purifications.push(psi);
    }
    let curve = StateCurve::new(times.clone(), states, tols)?;
    let lift = LiftedCurve::new(times, purifications, tols)?;
    Ok((curve, lift))
}

/// Squared quotient-metric speed of the conjugation curve generated by an
/// anti-Hermitian matrix, written in the eigenbasis of the state; only
/// entries joining distinct eigenvalue clusters move the state.
pub(crate) fn conjugation_speed_squared(
    lam: &[f64],
    clusters: &[Range<usize>],
    a_eig: &CMatrix,
) -> f64 {
    let mut cluster_of = vec![0usize; lam.len()];
    for (ci, block) in clusters.iter().enumerate() {
        for i in block.clone() {
            cluster_of[i] = ci;
        }
    }
    let mut acc = 0.0;
    for i in 0..lam.len() {
        for j in (i + 1)..lam.len() {
            if cluster_of[i] != cluster_of[j] {
                acc += a_eig[(i, j)].norm_sqr() * (lam[i] + lam[j]);
            }
        }
    }
    acc.max(0.0)
}

/// Anti-Hermitian basis of the block-diagonal algebra attached to the
/// eigenvalue clusters, including any null cluster.
fn commutant_basis(clusters: &[Range<usize>], n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for block in clusters {
        for j in block.clone() {
            let mut phase = CMatrix::zeros(n, n);
            phase[(j, j)] = c(0.0, 1.0);
            out.push(phase);
            for l in (j + 1)..block.end {
                let mut rot = CMatrix::zeros(n, n);
                rot[(j, l)] = c(1.0, 0.0);
                rot[(l, j)] = c(-1.0, 0.0);
                out.push(rot);
                let mut sym = CMatrix::zeros(n, n);
                sym[(j, l)] = c(0.0, 1.0);
                sym[(l, j)] = c(0.0, 1.0);
                out.push(sym);
            }
        }
    }
    out
}

fn line_minimize(
    objective: &dyn Fn(&[f64]) -> f64,
    theta: &mut [f64],
    j: usize,
    current: f64,
) -> f64 {
    let mut best_val = current;
    let mut best_t = theta[j];
    for s in 0..LINE_GRID {
        let t = -PI + 2.0 * PI * s as f64 / (LINE_GRID - 1) as f64;
        theta[j] = t;
        let v = objective(theta);
        if v < best_val {
            best_val = v;
            best_t = t;
        }
    }
    let span = 2.0 * PI / (LINE_GRID - 1) as f64;
    let golden = 0.618_033_988_749_895;
    let (mut lo, mut hi) = (best_t - span, best_t + span);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    theta[j] = x1;
    let mut f1 = objective(theta);
    theta[j] = x2;
    let mut f2 = objective(theta);
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            theta[j] = x1;
            f1 = objective(theta);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            theta[j] = x2;
            f2 = objective(theta);
        }
    }
    let (cand_t, cand_v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if cand_v < best_val {
        best_val = cand_v;
        best_t = cand_t;
    }
    theta[j] = best_t;
    best_val
}

/// Upper bound on the quotient-metric distance between two isospectral
/// states, found by optimizing over single-generator conjugation paths.
///
/// Endpoint alignments are parametrized by a block-diagonal unitary in
/// the commutant of the common eigenvalue pattern; every candidate path
/// lands exactly on the target and has constant speed, so each evaluation
/// is a genuine path length and the result never undershoots the true
/// distance. The search runs the aligned start plus the given number of
/// seeded random restarts, each refined by coordinate descent, and keeps
/// the best value, which makes the bound non-increasing in the budget.
pub fn distance_upper_bound(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    iterations: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<f64> {
    distance_upper_bound_detailed(rho0, rho1, iterations, seed, tols).map(|(best, _)| best)
}

/// Same search as [`distance_upper_bound`], additionally returning the
/// anti-Hermitian generator whose conjugation flow
/// rho(t) = exp(t a) rho0 exp(-t a) traverses the shortest family member
/// found: it reaches rho1 at t = 1 at constant speed equal to the bound.
pub fn distance_upper_bound_detailed(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    iterations: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<(f64, CMatrix)> {
    let s0 = rho0.spectrum(tols)?;
    let s1 = rho1.spectrum(tols)?;
    s0.check_matches(&s1, tols.spectrum)?;
    let n = rho0.dim();
    let (lam0, v0) = eigh_desc(rho0.matrix());
    let (_lam1, v1) = eigh_desc(rho1.matrix());
    let clusters = cluster_by_gap(&lam0, tols.degeneracy);
    let s_mat = v0.adjoint() * &v1;
    let aligned = blockwise_polar(&s_mat, &clusters).adjoint();
    let basis = commutant_basis(&clusters, n);
    let dim = basis.len();

    let objective = |theta: &[f64]| -> f64 {
        let mut generator = CMatrix::zeros(n, n);
        for (t, b) in theta.iter().zip(&basis) {
            if *t != 0.0 {
                generator += b.scale(*t);
            }
        }
        let candidate = &s_mat * (&aligned * exp_antihermitian(&generator));
        let a_eig = unitary_log(&candidate, LOG_CLUSTER_TOL);
        conjugation_speed_squared(&lam0, &clusters, &a_eig).sqrt()
    };

    let mut best_theta = vec![0.0; dim];
    let mut best = objective(&best_theta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spreads = [0.25, 0.75, 1.5];
    for restart in 0..=iterations {
        let mut theta: Vec<f64> = if restart == 0 {
            vec![0.0; dim]
        } else {
            let spread = spreads[(restart - 1) % spreads.len()];
            (0..dim)
                .map(|_| {
                    let draw: f64 = rng.sample(StandardNormal);
                    draw * spread
                })
                .collect()
        };
        let mut current = objective(&theta);
        for _ in 0..MAX_SWEEPS {
            let before = current;
            for j in 0..dim {
                current = line_minimize(&objective, &mut theta, j, current);
            }
            if before - current < 1e-13 * current.abs().max(1.0) {
                break;
            }
        }
        if current < best {
            best = current;
            best_theta = theta;
        }
    }
    let mut generator = CMatrix::zeros(n, n);
    for (t, b) in best_theta.iter().zip(&basis) {
        if *t != 0.0 {
            generator += b.scale(*t);
        }
    }
    let candidate = &s_mat * (&aligned * exp_antihermitian(&generator));
    let a_eig = unitary_log(&candidate, LOG_CLUSTER_TOL);
    Ok((best, &v0 * a_eig * v0.adjoint()))
}

/// Outcome of the time-energy product check for a transfer between
/// distinguishable endpoints.
#[derive(Clone, Debug)]
pub struct TimeEnergyCheck {
    pub mean_dispersion: f64,
    pub delta_t: f64,
    pub product: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Evolves the state under the schedule, verifies the endpoints are
/// distinguishable, and compares the accumulated dispersion-time product
/// against pi hbar / 2.
pub fn time_energy_check(
    schedule: &HamiltonianSchedule,
    rho0: &DensityOperator,
    tols: &Tolerances,
) -> Result<TimeEnergyCheck> {
    let curve = von_neumann_evolve(schedule, rho0, tols)?;
    let last = &curve.states[curve.len() - 1];
    if !distinguishable(rho0, last, tols)? {
        let overlap = (rho0.matrix() * last.matrix()).norm();
        return Err(Error::NotApplicable {
            reason: format!("endpoints are not distinguishable, support overlap {overlap:.3e}"),
        });
    }
    let hbar = schedule.hbar();
    let dispersion = energy_dispersion(schedule, &curve, tols)?;
    let delta_t = curve.duration();
    let product = dispersion * hbar;
    let bound = FRAC_PI_2 * hbar;
    Ok(TimeEnergyCheck {
        mean_dispersion: product / delta_t,
        delta_t,
        product,
        bound,
        satisfied: product >= bound - TIME_ENERGY_SLACK * bound.max(1.0),
    })
}
