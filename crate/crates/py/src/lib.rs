//! Python bindings for the secure interference alignment library.
//!
//! Exposes the system description, channel generation, the two
//! nuclear-norm alignment algorithms, the leakage-minimizing baseline and
//! the secrecy-rate metrics as a `secia` extension module.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use secia_core::linalg::CMat;
use secia_core::{baseline, metrics, nn, rnn, system};

fn to_py_err(e: secia_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Row-major nested list view of a complex matrix.
fn matrix_rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Dimensions and power budget of the interference network: `users`
/// transmit-receive pairs with `streams` data streams each, plus an
/// eavesdropper with `eve_antennas` antennas.
#[pyclass(frozen, skip_from_py_object, module = "secia")]
#[derive(Clone)]
struct SystemConfig {
    inner: system::SystemConfig,
}

#[pymethods]
impl SystemConfig {
    #[new]
    #[pyo3(signature = (users, tx_antennas, rx_antennas, eve_antennas, streams, tx_power=1.0, noise_var=1.0))]
    fn new(
        users: usize,
        tx_antennas: usize,
        rx_antennas: usize,
        eve_antennas: usize,
        streams: usize,
        tx_power: f64,
        noise_var: f64,
    ) -> PyResult<Self> {
        system::SystemConfig::new(
            users,
            tx_antennas,
            rx_antennas,
            eve_antennas,
            streams,
            tx_power,
            noise_var,
        )
        .map(|inner| Self { inner })
        .map_err(to_py_err)
    }

    #[getter]
    fn users(&self) -> usize {
        self.inner.users
    }

    #[getter]
    fn tx_antennas(&self) -> usize {
        self.inner.tx_antennas
    }

    #[getter]
    fn rx_antennas(&self) -> usize {
        self.inner.rx_antennas
    }

    #[getter]
    fn eve_antennas(&self) -> usize {
        self.inner.eve_antennas
    }

    #[getter]
    fn streams(&self) -> usize {
        self.inner.streams
    }

    #[getter]
    fn tx_power(&self) -> f64 {
        self.inner.tx_power
    }

    #[getter]
    fn noise_var(&self) -> f64 {
        self.inner.noise_var
    }

    fn snr_db(&self) -> f64 {
        self.inner.snr_db()
    }

    /// The same system at a different transmit power.
    fn with_tx_power(&self, tx_power: f64) -> Self {
        Self {
            inner: self.inner.with_tx_power(tx_power),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemConfig(users={}, tx_antennas={}, rx_antennas={}, eve_antennas={}, streams={}, tx_power={}, noise_var={})",
            self.inner.users,
            self.inner.tx_antennas,
            self.inner.rx_antennas,
            self.inner.eve_antennas,
            self.inner.streams,
            self.inner.tx_power,
            self.inner.noise_var
        )
    }
}

/// Feasibility report: signal-space slack at the transmitters and
/// receivers, and whether the eavesdropper is weak enough for the wiretap
/// signal to be confined.
#[pyclass(frozen, module = "secia")]
struct PropernessReport {
    #[pyo3(get)]
    tx_dimension: bool,
    #[pyo3(get)]
    rx_dimension: bool,
    #[pyo3(get)]
    eve_bound: bool,
    #[pyo3(get)]
    proper: bool,
}

#[pymethods]
impl PropernessReport {
    fn __repr__(&self) -> String {
        format!(
            "PropernessReport(tx_dimension={}, rx_dimension={}, eve_bound={}, proper={})",
            self.tx_dimension, self.rx_dimension, self.eve_bound, self.proper
        )
    }
}

/// Checks the dimension-counting feasibility conditions for the system.
#[pyfunction]
fn check_properness(config: &SystemConfig) -> PropernessReport {
    let r = system::check_properness(&config.inner);
    PropernessReport {
        tx_dimension: r.tx_dimension,
        rx_dimension: r.rx_dimension,
        eve_bound: r.eve_bound,
        proper: r.proper,
    }
}

/// One draw of all channel matrices: `users x users` legitimate links plus
/// one eavesdropper link per transmitter, i.i.d. complex Gaussian.
#[pyclass(frozen, module = "secia")]
struct ChannelSet {
    inner: system::ChannelSet,
}

#[pymethods]
impl ChannelSet {
    #[staticmethod]
    fn generate(config: &SystemConfig, seed: u64) -> Self {
        Self {
            inner: system::ChannelSet::generate(&config.inner, seed),
        }
    }

    /// Channel from transmitter `l` to receiver `k`, as nested lists.
    fn direct(&self, k: usize, l: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let users = self.inner.users();
        if k >= users || l >= users {
            return Err(PyValueError::new_err(format!(
                "user index out of range: ({}, {}) with {} users",
                k, l, users
            )));
        }
        Ok(matrix_rows(self.inner.direct(k, l)))
    }

    /// Channel from transmitter `l` to the eavesdropper.
    fn eve(&self, l: usize) -> PyResult<Vec<Vec<Complex64>>> {
        if l >= self.inner.users() {
            return Err(PyValueError::new_err(format!(
                "user index out of range: {} with {} users",
                l,
                self.inner.users()
            )));
        }
        Ok(matrix_rows(self.inner.eve(l)))
    }
}

/// Outcome of one alignment run: the secrecy metrics at the final
/// operating point, the objective trace of the outer loop and the
/// designed precoders.
#[pyclass(frozen, module = "secia")]
struct AlignmentResult {
    /// Secrecy sum rate in bits/s/Hz.
    #[pyo3(get)]
    ssr: f64,
    #[pyo3(get)]
    per_user_rate: Vec<f64>,
    #[pyo3(get)]
    per_user_leakage: Vec<f64>,
    #[pyo3(get)]
    per_user_secrecy: Vec<f64>,
    /// Objective value after each outer iteration (algorithm-specific).
    #[pyo3(get)]
    history: Vec<f64>,
    #[pyo3(get)]
    worst_constraint_violation: f64,
    precoder_mats: Vec<CMat>,
}

#[pymethods]
impl AlignmentResult {
    #[getter]
    fn precoders(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.precoder_mats.iter().map(matrix_rows).collect()
    }

    fn __repr__(&self) -> String {
        format!("AlignmentResult(ssr={:.4})", self.ssr)
    }
}

impl AlignmentResult {
    fn build(
        channels: &system::ChannelSet,
        precoders: system::PrecoderSet,
        sigma2: f64,
        history: Vec<f64>,
        worst_constraint_violation: f64,
    ) -> PyResult<Self> {
        let report = metrics::secrecy_sum_rate(channels, &precoders, sigma2).map_err(to_py_err)?;
        Ok(Self {
            ssr: report.ssr,
            per_user_rate: report.per_user_rate,
            per_user_leakage: report.per_user_leakage,
            per_user_secrecy: report.per_user_secrecy,
            history,
            worst_constraint_violation,
            precoder_mats: precoders.f,
        })
    }
}

/// Secure alignment with plain nuclear-norm objectives. `history` traces
/// the sum of interference and wiretap nuclear norms.
#[pyfunction]
#[pyo3(signature = (config, channels, kappa_max=5, epsilon=0.1, seed=0))]
fn run_nn_ia(
    config: &SystemConfig,
    channels: &ChannelSet,
    kappa_max: usize,
    epsilon: f64,
    seed: u64,
) -> PyResult<AlignmentResult> {
    let opts = nn::NnIaOptions::new(kappa_max, epsilon, seed);
    let out = nn::run(&channels.inner, &config.inner, &opts).map_err(to_py_err)?;
    AlignmentResult::build(
        &channels.inner,
        out.precoders,
        config.inner.noise_var,
        out.history,
        out.worst_constraint_violation,
    )
}

/// Secure alignment with iteratively reweighted nuclear norms. `history`
/// traces the smoothed rank surrogate after each reweighting.
#[pyfunction]
#[pyo3(signature = (config, channels, kappa_max=3, m_max=3, epsilon=0.1, gamma=1e-2, zeta=1e-2, seed=0))]
#[allow(clippy::too_many_arguments)]
fn run_rnn_ia(
    config: &SystemConfig,
    channels: &ChannelSet,
    kappa_max: usize,
    m_max: usize,
    epsilon: f64,
    gamma: f64,
    zeta: f64,
    seed: u64,
) -> PyResult<AlignmentResult> {
    let mut opts = rnn::RnnIaOptions::new(kappa_max, m_max, epsilon, seed);
    opts.gamma = gamma;
    opts.zeta = zeta;
    let out = rnn::run(&channels.inner, &config.inner, &opts).map_err(to_py_err)?;
    AlignmentResult::build(
        &channels.inner,
        out.precoders,
        config.inner.noise_var,
        out.history,
        out.worst_constraint_violation,
    )
}

/// Conventional interference alignment that minimizes leakage into the
/// receive subspaces and ignores the eavesdropper. `history` is empty:
/// the baseline has no tracked objective trace.
#[pyfunction]
#[pyo3(signature = (config, channels, iterations=100, seed=0))]
fn run_conventional_ia(
    config: &SystemConfig,
    channels: &ChannelSet,
    iterations: usize,
    seed: u64,
) -> PyResult<AlignmentResult> {
    let (precoders, _receivers) = baseline::run_min_leakage_ia(
        &channels.inner.legitimate(),
        &config.inner,
        iterations,
        seed,
    )
    .map_err(to_py_err)?;
    AlignmentResult::build(
        &channels.inner,
        precoders,
        config.inner.noise_var,
        Vec::new(),
        0.0,
    )
}

/// Secrecy metrics for externally supplied precoders (row-major nested
/// lists, one `tx_antennas x streams` matrix per user).
#[pyfunction]
fn secrecy_sum_rate(
    config: &SystemConfig,
    channels: &ChannelSet,
    precoders: Vec<Vec<Vec<Complex64>>>,
) -> PyResult<AlignmentResult> {
    let cfg = &config.inner;
    if precoders.len() != cfg.users {
        return Err(PyValueError::new_err(format!(
            "expected {} precoders, got {}",
            cfg.users,
            precoders.len()
        )));
    }
    let mut f = Vec::with_capacity(cfg.users);
    for (k, rows) in precoders.iter().enumerate() {
        if rows.len() != cfg.tx_antennas || rows.iter().any(|r| r.len() != cfg.streams) {
            return Err(PyValueError::new_err(format!(
                "precoder {} must be {} x {}",
                k, cfg.tx_antennas, cfg.streams
            )));
        }
        f.push(CMat::from_fn(cfg.tx_antennas, cfg.streams, |r, c| {
            rows[r][c]
        }));
    }
    AlignmentResult::build(
        &channels.inner,
        system::PrecoderSet { f },
        cfg.noise_var,
        Vec::new(),
        0.0,
    )
}

#[pymodule]
fn secia(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SystemConfig>()?;
    m.add_class::<PropernessReport>()?;
    m.add_class::<ChannelSet>()?;
    m.add_class::<AlignmentResult>()?;
    m.add_function(wrap_pyfunction!(check_properness, m)?)?;
    m.add_function(wrap_pyfunction!(run_nn_ia, m)?)?;
    m.add_function(wrap_pyfunction!(run_rnn_ia, m)?)?;
    m.add_function(wrap_pyfunction!(run_conventional_ia, m)?)?;
    m.add_function(wrap_pyfunction!(secrecy_sum_rate, m)?)?;
    Ok(())
}
