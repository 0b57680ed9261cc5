//! Secure nuclear-norm interference alignment: coordinate descent
//! alternating between the precoder and receive-subspace subproblems.

use crate::error::Result;
use crate::solver::{self, SolverOptions};
use crate::subproblems;
use crate::system::{
    orthonormalize, random_precoders, random_receivers, ChannelSet, PrecoderSet, ReceiverSet,
    SystemConfig,
};

/// Relative objective change below which the outer loop stops early.
pub const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct NnIaOptions {
    /// Outer iteration budget `kappa_max`.
    pub kappa_max: usize,
    /// Spectral floor on the desired-signal matrices.
    pub epsilon: f64,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl NnIaOptions {
    pub fn new(kappa_max: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            kappa_max,
            epsilon,
            seed,
            solver: SolverOptions::default(),
        }
    }
}

/// Raw half-step output, before orthogonalization.
#[derive(Debug, Clone)]
pub struct SubproblemOutcome<T> {
    pub solution: T,
    pub objective: f64,
    pub constraint_violation: f64,
    pub converged: bool,
}

/// Solves the precoder subproblem (receivers fixed): minimize
/// `sum_k ||J_k||_* + ||S_e||_*` under the floor on every `S_k`.
pub fn solve_precoder_subproblem(
    channels: &ChannelSet,
    config: &SystemConfig,
    receivers: &ReceiverSet,
    epsilon: f64,
    options: &SolverOptions,
    init: Option<&PrecoderSet>,
) -> Result<SubproblemOutcome<PrecoderSet>> {
    let problem = subproblems::precoder_problem(channels, receivers, config, epsilon, None);
    let res = solver::solve_with_init(&problem, options, init.map(|p| p.f.as_slice()))?;
    Ok(SubproblemOutcome {
        solution: PrecoderSet { f: res.blocks },
        objective: res.objective,
        constraint_violation: res.constraint_violation,
        converged: res.converged,
    })
}

/// Solves the receiver subproblem (precoders fixed): minimize
/// `sum_k ||J_k||_*`. Decouples into K independent per-user problems.
pub fn solve_receiver_subproblem(
    channels: &ChannelSet,
    config: &SystemConfig,
    precoders: &PrecoderSet,
    epsilon: f64,
    options: &SolverOptions,
    init: Option<&ReceiverSet>,
) -> Result<SubproblemOutcome<ReceiverSet>> {
    let mut w = Vec::with_capacity(config.users);
    let mut objective = 0.0;
    let mut violation: f64 = 0.0;
    let mut converged = true;
    for k in 0..config.users {
        let problem = subproblems::receiver_problem(channels, precoders, config, k, epsilon, None);
        let init_block = init.map(|r| vec![r.w[k].adjoint()]);
        let res = solver::solve_with_init(&problem, options, init_block.as_deref())?;
        objective += res.objective;
        violation = violation.max(res.constraint_violation);
        converged &= res.converged;
        w.push(res.blocks[0].adjoint());
    }
    Ok(SubproblemOutcome {
        solution: ReceiverSet { w },
        objective,
        constraint_violation: violation,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct IaOutcome {
    pub precoders: PrecoderSet,
    pub receivers: ReceiverSet,
    /// Alignment objective after each outer iteration, with the value at
    /// the random initial point first. Post-orthogonalization values: the
    /// history tracks the operating point, not the raw solver output.
    pub history: Vec<f64>,
    /// Worst spectral-floor violation observed over all subproblem solves.
    pub worst_constraint_violation: f64,
}

/// Runs the secure NN IA algorithm.
pub fn run(channels: &ChannelSet, config: &SystemConfig, options: &NnIaOptions) -> Result<IaOutcome> {
    let mut precoders = random_precoders(config, crate::rng::derive_seed(options.seed, 0, "nn-f0"))?;
    let mut receivers =
        random_receivers(config, crate::rng::derive_seed(options.seed, 0, "nn-w0"))?;

    let mut history =
        vec![subproblems::alignment_objective(channels, &precoders, &receivers, config)?];
    let mut worst_violation: f64 = 0.0;

    for _ in 0..options.kappa_max {
        let wsol = solve_receiver_subproblem(
            channels,
            config,
            &precoders,
            options.epsilon,
            &options.solver,
            Some(&receivers),
        )?;
        worst_violation = worst_violation.max(wsol.constraint_violation);
        receivers = ReceiverSet {
            w: wsol
                .solution
                .w
                .iter()
                .map(|w| orthonormalize(w, 1.0))
                .collect::<Result<_>>()?,
        };

        // Cold start: the gram-scaled precoders sit far above the floor
        // scale at high transmit power and make a poor splitting
        // initialization, while the subproblem optimum does not depend on
        // the starting point.
        let fsol = solve_precoder_subproblem(
            channels,
            config,
            &receivers,
            options.epsilon,
            &options.solver,
            None,
        )?;
        worst_violation = worst_violation.max(fsol.constraint_violation);
        precoders = PrecoderSet {
            f: fsol
                .solution
                .f
                .iter()
                .map(|f| orthonormalize(f, config.gram_scale()))
                .collect::<Result<_>>()?,
        };

        let obj = subproblems::alignment_objective(channels, &precoders, &receivers, config)?;
        let prev = *history.last().unwrap();
        history.push(obj);
        if (prev - obj).abs() <= CONVERGENCE_TOL * prev.max(1e-12) {
            break;
        }
    }

    Ok(IaOutcome {
        precoders,
        receivers,
        history,
        worst_constraint_violation: worst_violation,
    })
}
