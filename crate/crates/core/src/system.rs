//! System dimensions, channel generation, precoder/receiver initialization
//! and properness (feasibility) checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Dimensions and power budget of an `(N_t x N_r, N_re, d)^K` system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of Tx-Rx pairs `K`.
    pub users: usize,
    /// Transmit antennas per Tx, `N_t`.
    pub tx_antennas: usize,
    /// Receive antennas per legitimate Rx, `N_r`.
    pub rx_antennas: usize,
    /// Eavesdropper antennas, `N_re`.
    pub eve_antennas: usize,
    /// Data streams per pair, `d`.
    pub streams: usize,
    /// Total transmit power per Tx (linear).
    pub tx_power: f64,
    /// Noise variance per receive antenna (linear).
    pub noise_var: f64,
}

impl SystemConfig {
    pub fn new(
        users: usize,
        tx_antennas: usize,
        rx_antennas: usize,
        eve_antennas: usize,
        streams: usize,
        tx_power: f64,
        noise_var: f64,
    ) -> Result<Self> {
        if users < 1 || tx_antennas < 1 || rx_antennas < 1 || eve_antennas < 1 || streams < 1 {
            return Err(Error::InvalidConfig(
                "all dimensions must be at least 1".into(),
            ));
        }
        if streams > tx_antennas.min(rx_antennas) {
            return Err(Error::InvalidConfig(format!(
                "d = {} exceeds min(N_t, N_r) = {}",
                streams,
                tx_antennas.min(rx_antennas)
            )));
        }
        if !(tx_power > 0.0) || !(noise_var > 0.0) {
            return Err(Error::InvalidConfig(
                "tx_power and noise_var must be positive".into(),
            ));
        }
        Ok(Self {
            users,
            tx_antennas,
            rx_antennas,
            eve_antennas,
            streams,
            tx_power,
            noise_var,
        })
    }

    /// SNR is always derived, never stored: `P_t / sigma^2`.
    pub fn snr(&self) -> f64 {
        self.tx_power / self.noise_var
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr().log10()
    }

    /// The same system with a different transmit power.
    pub fn with_tx_power(&self, tx_power: f64) -> Self {
        Self { tx_power, ..self.clone() }
    }

    /// Per-precoder column Gram scale `P_t / d`.
    pub fn gram_scale(&self) -> f64 {
        self.tx_power / self.streams as f64
    }
}

/// Outcome of the dimension-counting feasibility check.
///
/// `proper` is the conjunction of the two closed-form conditions
/// (`N_t - d >= N_re` and `N_r >= K d`); the third bound on the
/// eavesdropper antenna count is evaluated and reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropernessReport {
    /// `N_t - d >= N_re`
    pub tx_dimension: bool,
    /// `N_r >= K d`
    pub rx_dimension: bool,
    /// `N_re <= (K (N_t + N_r) - (K^2 + 1) d) / (K - 1)`; vacuously true for K = 1.
    pub eve_bound: bool,
    pub proper: bool,
}

/// Evaluates the properness conditions with exact integer arithmetic.
pub fn check_properness(config: &SystemConfig) -> PropernessReport {
    let k = config.users as i64;
    let nt = config.tx_antennas as i64;
    let nr = config.rx_antennas as i64;
    let nre = config.eve_antennas as i64;
    let d = config.streams as i64;

    let tx_dimension = nt - d >= nre;
    let rx_dimension = nr >= k * d;
    // Compare N_re (K-1) <= K (N_t + N_r) - (K^2 + 1) d to avoid division.
    let eve_bound = if k == 1 {
        true
    } else {
        nre * (k - 1) <= k * (nt + nr) - (k * k + 1) * d
    };
    PropernessReport {
        tx_dimension,
        rx_dimension,
        eve_bound,
        proper: tx_dimension && rx_dimension,
    }
}

/// All channel matrices of one realization.
///
/// Rows `0..K` hold the legitimate channels `H[k][l]` of shape `N_r x N_t`;
/// row `K` holds the eavesdropper channels of shape `N_re x N_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    h: Vec<Vec<CMat>>,
    pub seed: u64,
}

/// Borrowed view of the legitimate rows only. The conventional IA baseline
/// takes this view so it cannot read eavesdropper channels by construction.
#[derive(Debug, Clone, Copy)]
pub struct LegitimateChannels<'a> {
    rows: &'a [Vec<CMat>],
}

impl<'a> LegitimateChannels<'a> {
    /// `H[k][l]` for legitimate receiver `k` and transmitter `l` (0-based).
    pub fn get(&self, k: usize, l: usize) -> &'a CMat {
        &self.rows[k][l]
    }

    pub fn users(&self) -> usize {
        self.rows.len()
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    // CN(0,1): real and imaginary parts i.i.d. N(0, 1/2).
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

impl ChannelSet {
    /// Draws all channel entries i.i.d. from CN(0,1).
    ///
    /// Entries are generated in a fixed (receiver-major) order, so the same
    /// seed reproduces identical matrices bit for bit.
    pub fn generate(config: &SystemConfig, seed: u64) -> Self {
        let mut rng = crate::rng::stream(seed, 0, "channels");
        let mut h = Vec::with_capacity(config.users + 1);
        for k in 0..=config.users {
            let rows = if k < config.users {
                config.rx_antennas
            } else {
                config.eve_antennas
            };
            let mut row = Vec::with_capacity(config.users);
            for _ in 0..config.users {
                row.push(complex_gaussian(&mut rng, rows, config.tx_antennas));
            }
            h.push(row);
        }
        Self { h, seed }
    }

    /// Builds a channel set from explicit matrices (tests and synthetic
    /// scenarios). `rows` must have K+1 entries of K matrices each.
    pub fn from_matrices(rows: Vec<Vec<CMat>>, seed: u64) -> Self {
        Self { h: rows, seed }
    }

    pub fn users(&self) -> usize {
        self.h.len() - 1
    }

    /// Legitimate channel from Tx `l` to Rx `k` (0-based).
    pub fn direct(&self, k: usize, l: usize) -> &CMat {
        &self.h[k][l]
    }

    /// Eavesdropper channel from Tx `l` (0-based); the spec's `H[K+1][l]`.
    pub fn eve(&self, l: usize) -> &CMat {
        &self.h[self.users()][l]
    }

    pub fn legitimate(&self) -> LegitimateChannels<'_> {
        LegitimateChannels {
            rows: &self.h[..self.users()],
        }
    }
}

/// Per-user transmit precoders `F_k` (`N_t x d`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    pub f: Vec<CMat>,
}

impl PrecoderSet {
    /// Scales every precoder by a common real factor (used for SNR sweeps).
    pub fn scaled(&self, factor: f64) -> Self {
        let c = Complex64::new(factor, 0.0);
        Self {
            f: self.f.iter().map(|m| m * c).collect(),
        }
    }
}

/// Per-user receive subspace matrices `W_k` (`N_r x d`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverSet {
    pub w: Vec<CMat>,
}

/// Returns `Q * sqrt(column_scale)` where `Q` is the thin-QR orthonormal
/// factor of `m`, with column phases fixed so the R factor has a real
/// positive diagonal. The column span of the output equals the span of `m`.
pub fn orthonormalize(m: &CMat, column_scale: f64) -> Result<CMat> {
    let sv = crate::linalg::singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin < 1e-12 * smax {
        return Err(Error::Degenerate(format!(
            "rank-deficient iterate: sigma_min/sigma_max = {:.3e}",
            if smax == 0.0 { 0.0 } else { smin / smax }
        )));
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    // Phase convention: make diag(R) real positive.
    for j in 0..q.ncols() {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj.conj() / Complex64::new(rjj.norm(), 0.0);
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(q * Complex64::new(column_scale.sqrt(), 0.0))
}

/// Random precoders with `F_k^H F_k = (P_t/d) I_d`.
pub fn random_precoders(config: &SystemConfig, seed: u64) -> Result<PrecoderSet> {
    let mut rng = crate::rng::stream(seed, 0, "precoders");
    let mut f = Vec::with_capacity(config.users);
    for _ in 0..config.users {
        let g = complex_gaussian(&mut rng, config.tx_antennas, config.streams);
        f.push(orthonormalize(&g, config.gram_scale())?);
    }
    Ok(PrecoderSet { f })
}

/// Random receive subspaces with `W_k^H W_k = I_d`.
pub fn random_receivers(config: &SystemConfig, seed: u64) -> Result<ReceiverSet> {
    let mut rng = crate::rng::stream(seed, 0, "receivers");
    let mut w = Vec::with_capacity(config.users);
    for _ in 0..config.users {
        let g = complex_gaussian(&mut rng, config.rx_antennas, config.streams);
        w.push(orthonormalize(&g, 1.0)?);
    }
    Ok(ReceiverSet { w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;

    fn reference_config_18() -> SystemConfig {
        SystemConfig::new(3, 18, 12, 9, 3, 9.0, 1.0).unwrap()
    }

    #[test]
    fn config_rejects_too_many_streams() {
        assert!(SystemConfig::new(3, 4, 4, 2, 5, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(0, 4, 4, 2, 1, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(3, 4, 4, 2, 2, -1.0, 1.0).is_err());
    }

    #[test]
    fn channel_generation_is_deterministic() {
        let cfg = reference_config_18();
        let a = ChannelSet::generate(&cfg, 42);
        let b = ChannelSet::generate(&cfg, 42);
        assert_eq!(a, b);
        let c = ChannelSet::generate(&cfg, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn eavesdropper_row_has_expected_shape() {
        // H[4][1] in 1-based spec indexing: eavesdropper channel from Tx 1.
        let cfg = reference_config_18();
        let ch = ChannelSet::generate(&cfg, 1);
        assert_eq!(ch.eve(0).shape(), (9, 18));
        assert_eq!(ch.direct(0, 0).shape(), (12, 18));
    }

    #[test]
    fn channel_entries_match_unit_variance_gaussian() {
        // >= 1e5 entries through a single wide config.
        let cfg = SystemConfig::new(1, 350, 300, 1, 1, 1.0, 1.0).unwrap();
        let ch = ChannelSet::generate(&cfg, 7);
        let m = ch.direct(0, 0);
        let n = (m.nrows() * m.ncols()) as f64;
        assert!(n >= 1e5);
        let mean = m.iter().sum::<num_complex::Complex64>() / n;
        let var = m.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        assert!(mean.norm() < 0.02, "mean modulus {}", mean.norm());
        assert!((0.98..=1.02).contains(&var), "variance {}", var);
        // Within three standard errors of 1 (se of variance of CN(0,1) is ~1/sqrt(n)).
        assert!((var - 1.0).abs() < 3.0 / n.sqrt() + 0.005);
    }

    #[test]
    fn properness_of_reference_systems() {
        let r = check_properness(&reference_config_18());
        assert!(r.tx_dimension && r.rx_dimension && r.eve_bound && r.proper);

        let cfg15 = SystemConfig::new(3, 15, 15, 9, 3, 9.0, 1.0).unwrap();
        let r = check_properness(&cfg15);
        assert!(r.tx_dimension && r.rx_dimension && r.eve_bound && r.proper);

        let bad = SystemConfig::new(3, 4, 4, 2, 2, 1.0, 1.0).unwrap();
        let r = check_properness(&bad);
        assert!(!r.rx_dimension && !r.proper);

        let single = SystemConfig::new(1, 4, 4, 2, 2, 1.0, 1.0).unwrap();
        assert!(check_properness(&single).eve_bound);
    }

    #[test]
    fn random_precoders_satisfy_gram_convention() {
        let cfg = reference_config_18();
        let p = random_precoders(&cfg, 5).unwrap();
        let scale = cfg.gram_scale();
        for f in &p.f {
            let gram = f.adjoint() * f;
            let target = CMat::identity(cfg.streams, cfg.streams)
                * num_complex::Complex64::new(scale, 0.0);
            assert!(frobenius_norm(&(gram - target)) < 1e-10);
            // Each column has squared norm P_t/d = 3.
            for j in 0..cfg.streams {
                let col = f.column(j);
                let nsq: f64 = col.iter().map(|z| z.norm_sqr()).sum();
                assert!((nsq - 3.0).abs() < 1e-10);
            }
        }
        let q = random_precoders(&cfg, 5).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn orthonormalize_diagonal_case() {
        let m = CMat::from_row_slice(
            3,
            2,
            &[
                num_complex::Complex64::new(2.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(3.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
            ],
        );
        let q = orthonormalize(&m, 1.0).unwrap();
        let expected = CMat::from_row_slice(
            3,
            2,
            &[
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
            ],
        );
        assert!(frobenius_norm(&(q - expected)) < 1e-12);
    }

    #[test]
    fn orthonormalize_is_idempotent_up_to_phase() {
        let cfg = reference_config_18();
        let p = random_precoders(&cfg, 11).unwrap();
        let w = orthonormalize(&p.f[0], cfg.gram_scale()).unwrap();
        // Projectors agree, i.e. same column span and same Gram.
        let scale = num_complex::Complex64::new(1.0 / cfg.gram_scale(), 0.0);
        let pa = &p.f[0] * p.f[0].adjoint() * scale;
        let pb = &w * w.adjoint() * scale;
        assert!(frobenius_norm(&(pa - pb)) < 1e-8);
    }

    #[test]
    fn orthonormalize_preserves_column_span() {
        let mut rng = crate::rng::stream(3, 0, "span");
        let m = complex_gaussian(&mut rng, 12, 3);
        let q = orthonormalize(&m, 1.0).unwrap();
        // Q Q^H applied to the original columns reproduces them.
        let proj = &q * q.adjoint();
        let back = &proj * &m;
        assert!(frobenius_norm(&(back - &m)) / frobenius_norm(&m) < 1e-8);
    }

    #[test]
    fn orthonormalize_rejects_rank_deficiency() {
        let m = CMat::from_fn(4, 2, |i, _| num_complex::Complex64::new(i as f64, 0.0));
        assert!(matches!(
            orthonormalize(&m, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn gram_check_on_random_tall_matrix() {
        let mut rng = crate::rng::stream(9, 0, "gram");
        let m = complex_gaussian(&mut rng, 12, 3);
        let scale = 9.0 / 3.0;
        let q = orthonormalize(&m, scale).unwrap();
        let gram = q.adjoint() * &q;
        let target = CMat::identity(3, 3) * num_complex::Complex64::new(scale, 0.0);
        assert!(frobenius_norm(&(gram - target)) < 1e-10);
    }
}
