//! Assembly of the precoder and receiver coordinate-descent subproblems as
//! [`NuclearNormProblem`]s.
//!
//! Both algorithms share the same structure; the reweighted variant only
//! attaches weight matrices to the objective terms.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::CMat;
use crate::rnn::{PhiSide, RnnWeights};
use crate::solver::{
    AffineMatrixMap, BlockSpec, FloorConstraint, NuclearNormProblem, ObjectiveTerm,
};
use crate::system::{ChannelSet, PrecoderSet, ReceiverSet, SystemConfig};

/// `d x total` block selector with an identity at column offset `off*d`.
fn block_selector(d: usize, total: usize, off: usize) -> CMat {
    let mut e = CMat::zeros(d, total);
    for i in 0..d {
        e[(i, off * d + i)] = Complex64::new(1.0, 0.0);
    }
    e
}

/// Subproblem over the precoders `{F_k}` with the receive subspaces fixed.
///
/// Variable block `k` is `F_k` (`N_t x d`). The objective holds one
/// interference term per user plus the wiretap term; every desired-signal
/// matrix carries a spectral floor.
pub fn precoder_problem(
    channels: &ChannelSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
    epsilon: f64,
    weights: Option<&RnnWeights>,
) -> NuclearNormProblem {
    let k_users = config.users;
    let d = config.streams;
    let blocks: Vec<BlockSpec> = (0..k_users)
        .map(|_| BlockSpec {
            rows: config.tx_antennas,
            cols: d,
        })
        .collect();

    let mut objective = Vec::new();
    for k in 0..k_users {
        if k_users < 2 {
            break; // no interference terms for a single pair
        }
        let total = (k_users - 1) * d;
        let mut map = AffineMatrixMap::new(CMat::zeros(d, total));
        let mut pos = 0usize;
        for l in 0..k_users {
            if l == k {
                continue;
            }
            let left = receivers.w[k].adjoint() * channels.direct(k, l);
            map = map.with_term(l, left, block_selector(d, total, pos));
            pos += 1;
        }
        objective.push(ObjectiveTerm {
            map,
            left_weight: weights.map(|w| w.xi[k].clone()),
            right_weight: None,
        });
    }

    // Wiretap term S_e = [H_{K+1,l} F_l].
    let total = k_users * d;
    let mut se_map = AffineMatrixMap::new(CMat::zeros(config.eve_antennas, total));
    for l in 0..k_users {
        se_map = se_map.with_term(l, channels.eve(l).clone(), block_selector(d, total, l));
    }
    let (lw, rw) = match weights {
        Some(w) => match w.side {
            PhiSide::Left => (Some(w.phi.clone()), None),
            PhiSide::Right => (None, Some(w.phi.clone())),
        },
        None => (None, None),
    };
    objective.push(ObjectiveTerm {
        map: se_map,
        left_weight: lw,
        right_weight: rw,
    });

    let floors = (0..k_users)
        .map(|k| {
            let left = receivers.w[k].adjoint() * channels.direct(k, k);
            FloorConstraint {
                map: AffineMatrixMap::new(CMat::zeros(d, d)).with_term(
                    k,
                    left,
                    CMat::identity(d, d),
                ),
                epsilon,
            }
        })
        .collect();

    NuclearNormProblem {
        blocks,
        objective,
        floors,
    }
}

/// Per-user subproblem over the receiver adjoint `G_k = W_k^H` with the
/// precoders fixed. The receiver half-step decouples across users, so each
/// user gets its own problem.
pub fn receiver_problem(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    config: &SystemConfig,
    user: usize,
    epsilon: f64,
    xi_k: Option<&CMat>,
) -> NuclearNormProblem {
    let k_users = config.users;
    let d = config.streams;
    let blocks = vec![BlockSpec {
        rows: d,
        cols: config.rx_antennas,
    }];

    let mut objective = Vec::new();
    if k_users >= 2 {
        // J_k = G_k [H_{k,l} F_l]_{l != k}; stack the fixed factors on the right.
        let total = (k_users - 1) * d;
        let mut stacked = CMat::zeros(config.rx_antennas, total);
        let mut pos = 0usize;
        for l in 0..k_users {
            if l == user {
                continue;
            }
            let block = channels.direct(user, l) * &precoders.f[l];
            stacked
                .view_mut((0, pos * d), (config.rx_antennas, d))
                .copy_from(&block);
            pos += 1;
        }
        let map = AffineMatrixMap::new(CMat::zeros(d, total)).with_term(
            0,
            CMat::identity(d, d),
            stacked,
        );
        objective.push(ObjectiveTerm {
            map,
            left_weight: xi_k.cloned(),
            right_weight: None,
        });
    }

    let hf = channels.direct(user, user) * &precoders.f[user];
    let floors = vec![FloorConstraint {
        map: AffineMatrixMap::new(CMat::zeros(d, d)).with_term(0, CMat::identity(d, d), hf),
        epsilon,
    }];

    NuclearNormProblem {
        blocks,
        objective,
        floors,
    }
}

/// Joint formulation of the receiver half-step over all users at once.
/// Equivalent to solving [`receiver_problem`] per user; kept for the
/// separability check and for callers that prefer one solve.
pub fn receiver_problem_joint(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    config: &SystemConfig,
    epsilon: f64,
    xi: Option<&[CMat]>,
) -> NuclearNormProblem {
    let k_users = config.users;
    let d = config.streams;
    let blocks: Vec<BlockSpec> = (0..k_users)
        .map(|_| BlockSpec {
            rows: d,
            cols: config.rx_antennas,
        })
        .collect();

    let mut objective = Vec::new();
    let mut floors = Vec::new();
    for k in 0..k_users {
        let per_user = receiver_problem(channels, precoders, config, k, epsilon, xi.map(|x| &x[k]));
        for mut term in per_user.objective {
            for t in &mut term.map.terms {
                t.block = k;
            }
            objective.push(term);
        }
        for mut floor in per_user.floors {
            for t in &mut floor.map.terms {
                t.block = k;
            }
            floors.push(floor);
        }
    }

    NuclearNormProblem {
        blocks,
        objective,
        floors,
    }
}

/// Receiver-adjoint solution blocks back to `W_k` matrices.
pub fn receivers_from_adjoint_blocks(blocks: &[CMat]) -> Vec<CMat> {
    blocks.iter().map(|g| g.adjoint()).collect()
}

/// Objective value `sum_k ||J_k||_* + ||S_e||_*` at a full operating point.
pub fn alignment_objective(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
) -> Result<f64> {
    let state = crate::alignment::AlignmentState::build(channels, precoders, receivers, config)?;
    let mut total: f64 = state
        .interference
        .iter()
        .map(crate::linalg::nuclear_norm)
        .sum();
    total += crate::linalg::nuclear_norm(&state.wiretap);
    Ok(total)
}
