//! Secure reweighted-nuclear-norm interference alignment: a
//! majorization-minimization outer loop that retightens weight matrices
//! around the current iterate, with an inner coordinate-descent loop over
//! the weighted subproblems.

use num_complex::Complex64;

use crate::alignment::AlignmentState;
use crate::error::Result;
use crate::linalg::{singular_values, CMat};
use crate::solver::{self, SolverOptions};
use crate::subproblems;
use crate::system::{
    orthonormalize, random_precoders, random_receivers, ChannelSet, PrecoderSet, ReceiverSet,
    SystemConfig,
};

/// Which side the wiretap weight multiplies `S_e` on: left when
/// `N_re < K d`, right when `N_re >= K d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiSide {
    Left,
    Right,
}

/// The MM weight matrices: one Hermitian positive-definite `Xi_k` per user
/// and the wiretap weight `Phi_e` of size `d_e = min(N_re, K d)`.
#[derive(Debug, Clone)]
pub struct RnnWeights {
    pub xi: Vec<CMat>,
    pub phi: CMat,
    pub side: PhiSide,
}

impl RnnWeights {
    /// The initialization of the algorithm: all weights identity, which
    /// makes the first inner loop coincide with the plain NN subproblems.
    pub fn identity(config: &SystemConfig) -> Self {
        let d = config.streams;
        let d_e = config.eve_antennas.min(config.users * d);
        Self {
            xi: vec![CMat::identity(d, d); config.users],
            phi: CMat::identity(d_e, d_e),
            side: if config.eve_antennas < config.users * d {
                PhiSide::Left
            } else {
                PhiSide::Right
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct RnnIaOptions {
    pub kappa_max: usize,
    pub m_max: usize,
    pub epsilon: f64,
    /// Smoothing constant for the interference log terms.
    pub gamma: f64,
    /// Smoothing constant for the wiretap log terms.
    pub zeta: f64,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl RnnIaOptions {
    pub fn new(kappa_max: usize, m_max: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            kappa_max,
            m_max,
            epsilon,
            gamma: 1e-2,
            zeta: 1e-2,
            seed,
            solver: SolverOptions::default(),
        }
    }
}

/// The smoothed rank surrogate
/// `Omega = sum_k sum_i log(sigma_i(J_k) + gamma) + sum_i log(sigma_i(S_e) + zeta)`.
pub fn surrogate_objective(state: &AlignmentState, gamma: f64, zeta: f64) -> f64 {
    let mut omega = 0.0;
    for j in &state.interference {
        for s in singular_values(j) {
            omega += (s + gamma).ln();
        }
    }
    for s in singular_values(&state.wiretap) {
        omega += (s + zeta).ln();
    }
    omega
}

/// Weight matrices from the current iterate's snapshots:
/// `Xi_k = Psi_k diag(1/(sigma_i + gamma)) Psi_k^H` from the left singular
/// vectors of `J_k`, and `Phi_e` analogously from `S_e`'s left (tall case)
/// or right (wide case) singular vectors.
pub fn compute_weights(
    interference: &[CMat],
    wiretap: &CMat,
    gamma: f64,
    zeta: f64,
) -> RnnWeights {
    let xi = interference
        .iter()
        .map(|j| {
            let d = j.nrows();
            if j.ncols() == 0 {
                return CMat::identity(d, d) * Complex64::new(1.0 / gamma, 0.0);
            }
            let svd = j.clone().svd(true, false);
            let u = svd.u.as_ref().unwrap();
            congruence_of_reciprocal(u, &svd.singular_values.as_slice().to_vec(), gamma, d)
        })
        .collect();

    let nre = wiretap.nrows();
    let kd = wiretap.ncols();
    let side = if nre < kd { PhiSide::Left } else { PhiSide::Right };
    let d_e = nre.min(kd);
    let svd = wiretap.clone().svd(true, true);
    let sigmas = svd.singular_values.as_slice().to_vec();
    let phi = match side {
        PhiSide::Left => {
            let u = svd.u.as_ref().unwrap();
            congruence_of_reciprocal(u, &sigmas, zeta, d_e)
        }
        PhiSide::Right => {
            let v = svd.v_t.as_ref().unwrap().adjoint();
            congruence_of_reciprocal(&v, &sigmas, zeta, d_e)
        }
    };
    RnnWeights { xi, phi, side }
}

/// `B diag(1/(sigma_i + c)) B^H` over the first `dim` singular triplets.
///
/// nalgebra's thin SVD returns exactly `min(rows, cols)` columns in the
/// singular-vector factors, which equals `dim` for every caller here.
fn congruence_of_reciprocal(basis: &CMat, sigmas: &[f64], c: f64, dim: usize) -> CMat {
    // Sort singular triplets descending so weights pair with the i-th
    // largest singular value.
    let mut order: Vec<usize> = (0..sigmas.len()).collect();
    order.sort_by(|&a, &b| sigmas[b].partial_cmp(&sigmas[a]).unwrap());
    let mut out = CMat::zeros(dim, dim);
    for &i in order.iter().take(dim) {
        let w = Complex64::new(1.0 / (sigmas[i] + c), 0.0);
        let bi = basis.column(i);
        for r in 0..dim {
            for s in 0..dim {
                out[(r, s)] += bi[r] * w * bi[s].conj();
            }
        }
    }
    out
}

/// One inner coordinate-descent pass with the weights held fixed:
/// alternate receiver and precoder weighted subproblems, orthogonalizing
/// after each half-step, until the weighted objective settles or `m_max`.
pub fn inner_coordinate_descent(
    channels: &ChannelSet,
    config: &SystemConfig,
    weights: &RnnWeights,
    mut precoders: PrecoderSet,
    mut receivers: ReceiverSet,
    epsilon: f64,
    m_max: usize,
    solver_options: &SolverOptions,
) -> Result<(PrecoderSet, ReceiverSet, f64)> {
    let mut worst_violation: f64 = 0.0;
    let mut prev_objective = f64::INFINITY;
    for _ in 0..m_max {
        // Receiver half-step: per-user weighted problems.
        let mut new_w = Vec::with_capacity(config.users);
        for k in 0..config.users {
            let problem = subproblems::receiver_problem(
                channels,
                &precoders,
                config,
                k,
                epsilon,
                Some(&weights.xi[k]),
            );
            let init = vec![receivers.w[k].adjoint()];
            let res = solver::solve_with_init(&problem, solver_options, Some(&init))?;
            worst_violation = worst_violation.max(res.constraint_violation);
            new_w.push(orthonormalize(&res.blocks[0].adjoint(), 1.0)?);
        }
        receivers = ReceiverSet { w: new_w };

        // Precoder half-step: joint weighted problem. Solved cold: the
        // gram-scaled precoders sit far above the floor scale at high
        // transmit power and make a poor splitting initialization.
        let problem =
            subproblems::precoder_problem(channels, &receivers, config, epsilon, Some(weights));
        let res = solver::solve(&problem, solver_options)?;
        worst_violation = worst_violation.max(res.constraint_violation);
        precoders = PrecoderSet {
            f: res
                .blocks
                .iter()
                .map(|f| orthonormalize(f, config.gram_scale()))
                .collect::<Result<_>>()?,
        };

        let objective = weighted_objective(channels, &precoders, &receivers, config, weights)?;
        if (prev_objective - objective).abs() <= crate::nn::CONVERGENCE_TOL * prev_objective.max(1e-12)
        {
            prev_objective = objective;
            break;
        }
        prev_objective = objective;
    }
    let _ = prev_objective;
    Ok((precoders, receivers, worst_violation))
}

/// Weighted objective `sum_k ||Xi_k J_k||_* + ||Phi S_e||_*` (or the
/// right-multiplied wiretap variant) at an operating point.
pub fn weighted_objective(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
    weights: &RnnWeights,
) -> Result<f64> {
    let state = AlignmentState::build(channels, precoders, receivers, config)?;
    let mut total = 0.0;
    for (xi, j) in weights.xi.iter().zip(state.interference.iter()) {
        total += crate::linalg::nuclear_norm(&(xi * j));
    }
    total += match weights.side {
        PhiSide::Left => crate::linalg::nuclear_norm(&(&weights.phi * &state.wiretap)),
        PhiSide::Right => crate::linalg::nuclear_norm(&(&state.wiretap * &weights.phi)),
    };
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct RnnOutcome {
    pub precoders: PrecoderSet,
    pub receivers: ReceiverSet,
    /// Omega after each outer iteration.
    pub history: Vec<f64>,
    pub worst_constraint_violation: f64,
}

/// Runs the secure RNN IA algorithm: identity weights first, then
/// alternate inner coordinate descent and weight updates.
pub fn run(
    channels: &ChannelSet,
    config: &SystemConfig,
    options: &RnnIaOptions,
) -> Result<RnnOutcome> {
    let mut precoders =
        random_precoders(config, crate::rng::derive_seed(options.seed, 0, "rnn-f0"))?;
    let mut receivers =
        random_receivers(config, crate::rng::derive_seed(options.seed, 0, "rnn-w0"))?;
    let mut weights = RnnWeights::identity(config);

    let mut history = Vec::with_capacity(options.kappa_max);
    let mut worst_violation: f64 = 0.0;

    for _ in 0..options.kappa_max {
        let (f, w, viol) = inner_coordinate_descent(
            channels,
            config,
            &weights,
            precoders,
            receivers,
            options.epsilon,
            options.m_max,
            &options.solver,
        )?;
        precoders = f;
        receivers = w;
        worst_violation = worst_violation.max(viol);

        let state = AlignmentState::build(channels, &precoders, &receivers, config)?;
        let omega = surrogate_objective(&state, options.gamma, options.zeta);
        weights = compute_weights(
            &state.interference,
            &state.wiretap,
            options.gamma,
            options.zeta,
        );

        let stop = history
            .last()
            .map(|prev: &f64| (prev - omega).abs() <= crate::nn::CONVERGENCE_TOL * prev.abs().max(1.0))
            .unwrap_or(false);
        history.push(omega);
        if stop {
            break;
        }
    }

    Ok(RnnOutcome {
        precoders,
        receivers,
        history,
        worst_constraint_violation: worst_violation,
    })
}
