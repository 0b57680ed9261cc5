//! Conventional interference alignment baseline: alternating minimization
//! of total interference leakage via least-dominant eigenvectors, with no
//! knowledge of the eavesdropper.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, CMat};
use crate::system::{random_precoders, LegitimateChannels, PrecoderSet, ReceiverSet, SystemConfig};

/// The `d` eigenvectors of the Hermitian matrix `q` with the smallest
/// eigenvalues, as an orthonormal `n x d` matrix.
fn least_dominant_eigenvectors(q: &CMat, d: usize) -> Result<CMat> {
    let h = hermitian_part(q);
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical(
            "non-finite interference covariance".into(),
        ));
    }
    let eig = h.symmetric_eigen();
    let n = q.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let mut out = CMat::zeros(n, d);
    for (j, &i) in order.iter().take(d).enumerate() {
        out.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok(out)
}

/// Total interference leakage `sum_k || W_k^H H_kl F_l ||_F^2` over `l != k`.
fn total_leakage(
    channels: &LegitimateChannels<'_>,
    precoders: &PrecoderSet,
    receivers: &ReceiverSet,
) -> f64 {
    let k_users = channels.users();
    let mut total = 0.0;
    for k in 0..k_users {
        for l in 0..k_users {
            if l == k {
                continue;
            }
            let j = receivers.w[k].adjoint() * channels.get(k, l) * &precoders.f[l];
            total += crate::linalg::frobenius_norm_sq(&j);
        }
    }
    total
}

/// Runs minimum-interference-leakage alternating IA for the given number of
/// iterations. The eavesdropper plays no role: the function only sees the
/// legitimate channel rows.
///
/// Each iteration sets `W_k` to the `d` least-dominant eigenvectors of the
/// interference covariance at receiver `k`, then updates each `F_k` from
/// the reciprocal network (least-dominant eigenvectors of the reciprocal
/// interference covariance), rescaled to the `F_k^H F_k = (P_t/d) I` Gram
/// convention.
pub fn run_min_leakage_ia(
    channels: &LegitimateChannels<'_>,
    config: &SystemConfig,
    iterations: usize,
    seed: u64,
) -> Result<(PrecoderSet, ReceiverSet)> {
    let k_users = config.users;
    let d = config.streams;
    let mut precoders = random_precoders(config, seed)?;
    let mut receivers = ReceiverSet {
        w: vec![CMat::zeros(config.rx_antennas, d); k_users],
    };
    let scale = Complex64::new(config.gram_scale().sqrt(), 0.0);

    for _ in 0..iterations {
        // Forward direction: receive subspaces.
        for k in 0..k_users {
            let mut q = CMat::zeros(config.rx_antennas, config.rx_antennas);
            for l in 0..k_users {
                if l == k {
                    continue;
                }
                let hf = channels.get(k, l) * &precoders.f[l];
                q += &hf * hf.adjoint();
            }
            receivers.w[k] = least_dominant_eigenvectors(&q, d)?;
        }
        // Reciprocal direction: precoders.
        for k in 0..k_users {
            let mut q = CMat::zeros(config.tx_antennas, config.tx_antennas);
            for l in 0..k_users {
                if l == k {
                    continue;
                }
                let hw = channels.get(l, k).adjoint() * &receivers.w[l];
                q += &hw * hw.adjoint();
            }
            precoders.f[k] = least_dominant_eigenvectors(&q, d)? * scale;
        }
    }

    Ok((precoders, receivers))
}

/// Leakage after each iteration, for monotonicity diagnostics.
pub fn leakage_trace(
    channels: &LegitimateChannels<'_>,
    config: &SystemConfig,
    iterations: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut trace = Vec::with_capacity(iterations);
    for it in 1..=iterations {
        let (f, w) = run_min_leakage_ia(channels, config, it, seed)?;
        trace.push(total_leakage(channels, &f, &w));
    }
    Ok(trace)
}
