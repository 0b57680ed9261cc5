//! Per-user rates, eavesdropper leakage rates and the secrecy sum rate.
//!
//! Rates are the closed-form mutual-information expressions on the natural
//! channel matrices; receive subspaces never enter, they only shaped the
//! precoders during optimization.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, CMat};
use crate::system::{ChannelSet, PrecoderSet};

/// Per-user rates `R_k`, leakage rates `R_k^(e)`, clamped secrecy rates
/// and their sum.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub per_user_rate: Vec<f64>,
    pub per_user_leakage: Vec<f64>,
    pub per_user_secrecy: Vec<f64>,
    pub ssr: f64,
}

/// `log2 det` of a Hermitian positive-definite matrix via Cholesky.
fn logdet2_hpd(m: &CMat) -> Result<f64> {
    let h = hermitian_part(m);
    let chol = h.clone().cholesky().ok_or_else(|| {
        let ev = crate::linalg::hermitian_eigenvalues(&h);
        Error::Numerical(format!(
            "log-det argument not positive definite (lambda_min = {:.3e}, lambda_max = {:.3e})",
            ev.first().copied().unwrap_or(f64::NAN),
            ev.last().copied().unwrap_or(f64::NAN)
        ))
    })?;
    let mut acc = 0.0;
    let l = chol.l();
    for i in 0..l.nrows() {
        acc += l[(i, i)].re.log2();
    }
    let val = 2.0 * acc;
    if !val.is_finite() {
        return Err(Error::Numerical("non-finite log-det".into()));
    }
    Ok(val)
}

fn noise_plus_interference(
    rows: usize,
    signals: impl Iterator<Item = CMat>,
    sigma2: f64,
) -> CMat {
    let mut r = CMat::identity(rows, rows) * Complex64::new(sigma2, 0.0);
    for hf in signals {
        r += &hf * hf.adjoint();
    }
    r
}

/// Rate of user `k` (0-based):
/// `log2 det(I + H_kk F_k F_k^H H_kk^H R_z^-1)` with
/// `R_z = sum_{l != k} H_kl F_l F_l^H H_kl^H + sigma^2 I`.
pub fn user_rate(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    k: usize,
    sigma2: f64,
) -> Result<f64> {
    let k_users = channels.users();
    if k >= k_users {
        return Err(Error::InvalidConfig(format!("user index {} out of range", k)));
    }
    let nr = channels.direct(k, 0).nrows();
    let rz = noise_plus_interference(
        nr,
        (0..k_users)
            .filter(|&l| l != k)
            .map(|l| channels.direct(k, l) * &precoders.f[l]),
        sigma2,
    );
    let hf = channels.direct(k, k) * &precoders.f[k];
    let total = &rz + &hf * hf.adjoint();
    Ok(logdet2_hpd(&total)? - logdet2_hpd(&rz)?)
}

/// Information leakage rate from user `k` to the eavesdropper:
/// `log2 det(I + H_ek F_k F_k^H H_ek^H R_e^-1)` with the other users'
/// wiretapped signals plus noise as the effective noise.
pub fn leakage_rate(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    k: usize,
    sigma2: f64,
) -> Result<f64> {
    let k_users = channels.users();
    if k >= k_users {
        return Err(Error::InvalidConfig(format!("user index {} out of range", k)));
    }
    let nre = channels.eve(0).nrows();
    let re = noise_plus_interference(
        nre,
        (0..k_users)
            .filter(|&l| l != k)
            .map(|l| channels.eve(l) * &precoders.f[l]),
        sigma2,
    );
    let hf = channels.eve(k) * &precoders.f[k];
    let total = &re + &hf * hf.adjoint();
    Ok(logdet2_hpd(&total)? - logdet2_hpd(&re)?)
}

/// Full rate report with clamped per-user secrecy rates
/// `[R_k - R_k^(e)]^+` and their sum.
pub fn secrecy_sum_rate(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    sigma2: f64,
) -> Result<RateReport> {
    let k_users = channels.users();
    let mut per_user_rate = Vec::with_capacity(k_users);
    let mut per_user_leakage = Vec::with_capacity(k_users);
    let mut per_user_secrecy = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let r = user_rate(channels, precoders, k, sigma2)?;
        let l = leakage_rate(channels, precoders, k, sigma2)?;
        per_user_rate.push(r);
        per_user_leakage.push(l);
        per_user_secrecy.push((r - l).max(0.0));
    }
    let ssr = per_user_secrecy.iter().sum();
    Ok(RateReport {
        per_user_rate,
        per_user_leakage,
        per_user_secrecy,
        ssr,
    })
}
