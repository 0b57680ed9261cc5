//! Desired-signal, interference and wiretapped-signal matrices, their
//! numerical ranks and leakage powers.


use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm_sq, singular_values, CMat};
use crate::system::{ChannelSet, PrecoderSet, ReceiverSet, SystemConfig};

/// The three matrix families the rank conditions are stated on:
/// `S_k = W_k^H H_kk F_k` (d x d), `J_k` (d x (K-1)d, cross blocks in
/// ascending transmitter order) and `S_e` (N_re x Kd).
///
/// `S_e` depends only on the precoders and eavesdropper channels, never on
/// any `W_k`.
#[derive(Debug, Clone)]
pub struct AlignmentState {
    pub desired: Vec<CMat>,
    pub interference: Vec<CMat>,
    pub wiretap: CMat,
}

fn check_product_shapes(w: &CMat, h: &CMat, f: &CMat) -> Result<()> {
    if w.nrows() != h.nrows() || h.ncols() != f.nrows() {
        return Err(Error::Dimension(format!(
            "W ({}x{}), H ({}x{}), F ({}x{}) do not conform",
            w.nrows(),
            w.ncols(),
            h.nrows(),
            h.ncols(),
            f.nrows(),
            f.ncols()
        )));
    }
    Ok(())
}

/// `W_k^H H_kk F_k`.
pub fn desired_signal_matrix(w_k: &CMat, h_kk: &CMat, f_k: &CMat) -> Result<CMat> {
    check_product_shapes(w_k, h_kk, f_k)?;
    Ok(w_k.adjoint() * h_kk * f_k)
}

/// Horizontal concatenation of `W_k^H H_kl F_l` over the given
/// `(H_kl, F_l)` pairs, ordered by ascending transmitter index.
pub fn interference_matrix(w_k: &CMat, cross: &[(&CMat, &CMat)]) -> Result<CMat> {
    let d = w_k.ncols();
    let mut out = CMat::zeros(d, d * cross.len().max(0));
    // K = 1: an empty d x 0 matrix.
    if cross.is_empty() {
        return Ok(CMat::zeros(d, 0));
    }
    let wa = w_k.adjoint();
    for (i, (h, f)) in cross.iter().enumerate() {
        check_product_shapes(w_k, h, f)?;
        if f.ncols() != d {
            return Err(Error::Dimension("precoder stream count mismatch".into()));
        }
        let block = &wa * *h * *f;
        out.view_mut((0, i * d), (d, d)).copy_from(&block);
    }
    Ok(out)
}

/// Horizontal concatenation of `H_{K+1,l} F_l` over all transmitters.
pub fn wiretap_matrix(eve: &[(&CMat, &CMat)]) -> Result<CMat> {
    if eve.is_empty() {
        return Err(Error::Dimension("wiretap matrix needs at least one block".into()));
    }
    let nre = eve[0].0.nrows();
    let d = eve[0].1.ncols();
    let mut out = CMat::zeros(nre, d * eve.len());
    for (i, (h, f)) in eve.iter().enumerate() {
        if h.nrows() != nre || h.ncols() != f.nrows() || f.ncols() != d {
            return Err(Error::Dimension("wiretap block shapes do not conform".into()));
        }
        let block = *h * *f;
        out.view_mut((0, i * d), (nre, d)).copy_from(&block);
    }
    Ok(out)
}

impl AlignmentState {
    pub fn build(
        channels: &ChannelSet,
        precoders: &PrecoderSet,
        receivers: &ReceiverSet,
        config: &SystemConfig,
    ) -> Result<Self> {
        let k_users = config.users;
        let mut desired = Vec::with_capacity(k_users);
        let mut interference = Vec::with_capacity(k_users);
        for k in 0..k_users {
            desired.push(desired_signal_matrix(
                &receivers.w[k],
                channels.direct(k, k),
                &precoders.f[k],
            )?);
            let cross: Vec<(&CMat, &CMat)> = (0..k_users)
                .filter(|&l| l != k)
                .map(|l| (channels.direct(k, l), &precoders.f[l]))
                .collect();
            interference.push(interference_matrix(&receivers.w[k], &cross)?);
        }
        let eve: Vec<(&CMat, &CMat)> = (0..k_users)
            .map(|l| (channels.eve(l), &precoders.f[l]))
            .collect();
        let wiretap = wiretap_matrix(&eve)?;
        Ok(Self {
            desired,
            interference,
            wiretap,
        })
    }
}

/// Count of singular values above `rel_tol * sigma_1`. The zero matrix has
/// rank 0.
pub fn numerical_rank(m: &CMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = singular_values(m);
    let smax = sv[0];
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Default relative threshold for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Diagnostic alignment residuals: `(sum_k ||J_k||_F^2, ||S_e||_F^2)`.
/// Both are zero exactly when the perfect-alignment conditions hold.
pub fn leakage_powers(state: &AlignmentState) -> (f64, f64) {
    let interf = state.interference.iter().map(frobenius_norm_sq).sum();
    let wiretap = frobenius_norm_sq(&state.wiretap);
    (interf, wiretap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use crate::system::{random_precoders, random_receivers, SystemConfig};
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn rand_cmat(rng: &mut rand_chacha::ChaCha8Rng, r: usize, c: usize) -> CMat {
        DMatrix::from_fn(r, c, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    /// Independent elementwise triple-product oracle.
    fn triple_product_oracle(w: &CMat, h: &CMat, f: &CMat) -> CMat {
        let (d, nr, nt, dc) = (w.ncols(), w.nrows(), h.ncols(), f.ncols());
        let mut out = CMat::zeros(d, dc);
        for i in 0..d {
            for j in 0..dc {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..nr {
                    for b in 0..nt {
                        acc += w[(a, i)].conj() * h[(a, b)] * f[(b, j)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn desired_signal_identity_channel() {
        let d = 2;
        let n = 4;
        let p_t = 8.0;
        let h = CMat::identity(n, n);
        let mut w = CMat::zeros(n, d);
        for j in 0..d {
            w[(j, j)] = Complex64::new(1.0, 0.0);
        }
        let f = &w * Complex64::new((p_t / d as f64).sqrt(), 0.0);
        let s = desired_signal_matrix(&w, &h, &f).unwrap();
        let expected = CMat::identity(d, d) * Complex64::new(2.0, 0.0);
        assert!(frobenius_norm(&(s - expected)) < 1e-12);

        let wz = CMat::zeros(n, d);
        let sz = desired_signal_matrix(&wz, &h, &f).unwrap();
        assert!(frobenius_norm(&sz) < 1e-15);
    }

    #[test]
    fn desired_signal_matches_elementwise_oracle() {
        let mut rng = crate::rng::stream(1, 0, "align");
        let w = rand_cmat(&mut rng, 12, 3);
        let h = rand_cmat(&mut rng, 12, 18);
        let f = rand_cmat(&mut rng, 18, 3);
        let s = desired_signal_matrix(&w, &h, &f).unwrap();
        let o = triple_product_oracle(&w, &h, &f);
        assert!(frobenius_norm(&(s - o)) < 1e-12);
    }

    #[test]
    fn desired_signal_rejects_shape_mismatch() {
        let w = CMat::zeros(4, 2);
        let h = CMat::zeros(5, 4);
        let f = CMat::zeros(4, 2);
        assert!(desired_signal_matrix(&w, &h, &f).is_err());
    }

    #[test]
    fn interference_matrix_shape_and_blocks() {
        let cfg = SystemConfig::new(3, 18, 12, 9, 3, 9.0, 1.0).unwrap();
        let ch = ChannelSet::generate(&cfg, 2);
        let f = random_precoders(&cfg, 3).unwrap();
        let w = random_receivers(&cfg, 4).unwrap();
        let cross: Vec<(&CMat, &CMat)> = vec![
            (ch.direct(0, 1), &f.f[1]),
            (ch.direct(0, 2), &f.f[2]),
        ];
        let j = interference_matrix(&w.w[0], &cross).unwrap();
        assert_eq!(j.shape(), (3, 6));
        // Blockwise comparison against the oracle.
        for (i, (h, fl)) in cross.iter().enumerate() {
            let block = j.view((0, 3 * i), (3, 3)).clone_owned();
            let o = triple_product_oracle(&w.w[0], h, fl);
            assert!(frobenius_norm(&(block - o)) < 1e-12);
        }
    }

    #[test]
    fn interference_matrix_two_user_case_is_single_block() {
        let cfg = SystemConfig::new(2, 6, 4, 2, 2, 4.0, 1.0).unwrap();
        let ch = ChannelSet::generate(&cfg, 5);
        let f = random_precoders(&cfg, 6).unwrap();
        let w = random_receivers(&cfg, 7).unwrap();
        let cross: Vec<(&CMat, &CMat)> = vec![(ch.direct(0, 1), &f.f[1])];
        let j = interference_matrix(&w.w[0], &cross).unwrap();
        let o = triple_product_oracle(&w.w[0], ch.direct(0, 1), &f.f[1]);
        assert!(frobenius_norm(&(j - o)) < 1e-12);
    }

    #[test]
    fn zero_cross_channels_annihilate_interference() {
        let w = CMat::identity(4, 2);
        let h = CMat::zeros(4, 6);
        let f = CMat::zeros(6, 2);
        let j = interference_matrix(&w, &[(&h, &f)]).unwrap();
        assert!(frobenius_norm(&j) < 1e-15);
    }

    #[test]
    fn wiretap_matrix_shape_and_blocks() {
        let cfg = SystemConfig::new(3, 18, 12, 9, 3, 9.0, 1.0).unwrap();
        let ch = ChannelSet::generate(&cfg, 8);
        let f = random_precoders(&cfg, 9).unwrap();
        let eve: Vec<(&CMat, &CMat)> = (0..3).map(|l| (ch.eve(l), &f.f[l])).collect();
        let se = wiretap_matrix(&eve).unwrap();
        assert_eq!(se.shape(), (9, 9));
        for l in 0..3 {
            let block = se.view((0, 3 * l), (9, 3)).clone_owned();
            let direct = ch.eve(l) * &f.f[l];
            assert!(frobenius_norm(&(block - direct)) < 1e-12);
        }
    }

    #[test]
    fn numerical_rank_cases() {
        assert_eq!(numerical_rank(&CMat::zeros(3, 5), 1e-6), 0);
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1e-9, 0.0),
        ]));
        assert_eq!(numerical_rank(&m, 1e-6), 1);
        let mut rng = crate::rng::stream(10, 0, "rank");
        let r = rand_cmat(&mut rng, 3, 6);
        assert_eq!(numerical_rank(&r, 1e-6), 3);
    }

    #[test]
    fn leakage_powers_cases() {
        let state = AlignmentState {
            desired: vec![CMat::identity(3, 3)],
            interference: vec![CMat::identity(3, 3), CMat::zeros(3, 3)],
            wiretap: CMat::zeros(9, 9),
        };
        let (ip, wp) = leakage_powers(&state);
        assert!((ip - 3.0).abs() < 1e-12);
        assert_eq!(wp, 0.0);

        // Random state matches elementwise sum-of-squares oracle.
        let mut rng = crate::rng::stream(11, 0, "leak");
        let j = rand_cmat(&mut rng, 3, 6);
        let se = rand_cmat(&mut rng, 9, 9);
        let oracle_i: f64 = j.iter().map(|z| z.re * z.re + z.im * z.im).sum();
        let oracle_w: f64 = se.iter().map(|z| z.re * z.re + z.im * z.im).sum();
        let state = AlignmentState {
            desired: vec![],
            interference: vec![j],
            wiretap: se,
        };
        let (ip, wp) = leakage_powers(&state);
        assert!((ip - oracle_i).abs() < 1e-12 * oracle_i.max(1.0));
        assert!((wp - oracle_w).abs() < 1e-12 * oracle_w.max(1.0));
    }

    #[test]
    fn unitary_receiver_rotation_preserves_singular_values() {
        let cfg = SystemConfig::new(3, 8, 6, 4, 2, 4.0, 1.0).unwrap();
        let ch = ChannelSet::generate(&cfg, 12);
        let f = random_precoders(&cfg, 13).unwrap();
        let w = random_receivers(&cfg, 14).unwrap();
        let state = AlignmentState::build(&ch, &f, &w, &cfg).unwrap();

        // Rotate the receive subspace basis: W_k Q with Q unitary d x d.
        // (W Q)^H H F = Q^H (W^H H F), a row rotation, so singular values
        // and ranks are basis-independent.
        let mut rng = crate::rng::stream(15, 0, "unitary");
        let g = rand_cmat(&mut rng, 2, 2);
        let q = crate::system::orthonormalize(&g, 1.0).unwrap();
        let w2 = ReceiverSet {
            w: w.w.iter().map(|wk| wk * &q).collect(),
        };
        let state2 = AlignmentState::build(&ch, &f, &w2, &cfg).unwrap();
        for k in 0..3 {
            let a = crate::linalg::singular_values(&state.desired[k]);
            let b = crate::linalg::singular_values(&state2.desired[k]);
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-9 * x.max(1.0));
            }
            assert_eq!(
                numerical_rank(&state.interference[k], 1e-6),
                numerical_rank(&state2.interference[k], 1e-6)
            );
        }
        // S_e never changes when any W_k changes.
        assert!(frobenius_norm(&(state.wiretap.clone() - state2.wiretap)) < 1e-15);
    }
}
