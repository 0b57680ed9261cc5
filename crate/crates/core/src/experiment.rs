//! Monte-Carlo experiment harness: trials over channel realizations and an
//! SNR sweep for every requested algorithm, with incremental persistence,
//! CSV emission and summary statistics.
//!
//! Channel draws are keyed by `(master_seed, trial)` only, so every
//! algorithm within a trial sees the same realization (paired comparison)
//! and adding an algorithm never perturbs existing draws.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use crate::alignment::AlignmentState;
use crate::baseline;
use crate::error::{Error, Result};
use crate::metrics;
use crate::nn::{self, NnIaOptions};
use crate::rng;
use crate::rnn::{self, RnnIaOptions};
use crate::solver::SolverOptions;
use crate::system::{ChannelSet, PrecoderSet, ReceiverSet, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Conventional,
    Nn,
    Rnn,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Conventional => "conventional",
            Algorithm::Nn => "nn",
            Algorithm::Rnn => "rnn",
        }
    }

    pub const ALL: [Algorithm; 3] = [Algorithm::Conventional, Algorithm::Nn, Algorithm::Rnn];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "conventional" => Ok(Algorithm::Conventional),
            "nn" => Ok(Algorithm::Nn),
            "rnn" => Ok(Algorithm::Rnn),
            other => Err(Error::Parse(format!("unknown algorithm '{}'", other))),
        }
    }
}

/// Per-algorithm tuning knobs shared by the harness.
#[derive(Debug, Clone)]
pub struct AlgorithmOptions {
    pub epsilon: f64,
    pub nn_kappa_max: usize,
    pub rnn_kappa_max: usize,
    pub m_max: usize,
    pub gamma: f64,
    pub zeta: f64,
    pub baseline_iterations: usize,
    pub solver: SolverOptions,
}

impl Default for AlgorithmOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            nn_kappa_max: 5,
            rnn_kappa_max: 3,
            m_max: 3,
            gamma: 1e-2,
            zeta: 1e-2,
            baseline_iterations: 100,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Dimension template; its `tx_power` is replaced by the reference
    /// power derived from the SNR grid.
    pub config: SystemConfig,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub options: AlgorithmOptions,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Re-optimize at every SNR point instead of rescaling the reference
    /// design.
    pub reoptimize_per_snr: bool,
    /// Record wall-clock times. Off by default so the emitted CSV is a
    /// pure function of the spec.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidConfig("snr grid must be nonempty".into()));
        }
        if !self.snr_grid_db.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "snr grid must be strictly increasing".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms selected".into()));
        }
        let mut seen = HashSet::new();
        for a in &self.algorithms {
            if !seen.insert(*a) {
                return Err(Error::InvalidConfig(format!("duplicate algorithm {}", a)));
            }
        }
        Ok(())
    }

    /// Median of the SNR grid in dB (average of the middle pair for even
    /// lengths); the reference optimization power is taken here.
    pub fn median_snr_db(&self) -> f64 {
        let g = &self.snr_grid_db;
        let n = g.len();
        if n % 2 == 1 {
            g[n / 2]
        } else {
            0.5 * (g[n / 2 - 1] + g[n / 2])
        }
    }

    pub fn reference_power(&self) -> f64 {
        self.config.noise_var * 10f64.powf(self.median_snr_db() / 10.0)
    }
}

/// One (algorithm, channel realization, SNR) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub trial: usize,
    pub snr_db: f64,
    pub ssr: f64,
    pub rates: Vec<f64>,
    pub leakages: Vec<f64>,
    pub interference_power: f64,
    pub wiretap_power: f64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone)]
pub struct FailureRecord {
    pub algorithm: Algorithm,
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub snr_db: f64,
    pub mean_ssr: f64,
    pub stderr_ssr: f64,
    pub n: usize,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    pub failures: Vec<FailureRecord>,
}

fn optimize(
    algorithm: Algorithm,
    channels: &ChannelSet,
    config: &SystemConfig,
    options: &AlgorithmOptions,
    master_seed: u64,
    trial: usize,
) -> Result<(PrecoderSet, ReceiverSet)> {
    match algorithm {
        Algorithm::Nn => {
            let mut opts = NnIaOptions::new(
                options.nn_kappa_max,
                options.epsilon,
                rng::derive_seed(master_seed, trial as u64, "nn-init"),
            );
            opts.solver = options.solver.clone();
            let out = nn::run(channels, config, &opts)?;
            Ok((out.precoders, out.receivers))
        }
        Algorithm::Rnn => {
            let mut opts = RnnIaOptions::new(
                options.rnn_kappa_max,
                options.m_max,
                options.epsilon,
                rng::derive_seed(master_seed, trial as u64, "rnn-init"),
            );
            opts.gamma = options.gamma;
            opts.zeta = options.zeta;
            opts.solver = options.solver.clone();
            let out = rnn::run(channels, config, &opts)?;
            Ok((out.precoders, out.receivers))
        }
        Algorithm::Conventional => baseline::run_min_leakage_ia(
            &channels.legitimate(),
            config,
            options.baseline_iterations,
            rng::derive_seed(master_seed, trial as u64, "conventional-init"),
        ),
    }
}

fn evaluate_point(
    algorithm: Algorithm,
    trial: usize,
    snr_db: f64,
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
) -> Result<TrialRecord> {
    let report = metrics::secrecy_sum_rate(channels, precoders, config.noise_var)?;
    let state = AlignmentState::build(channels, precoders, receivers, config)?;
    let (interference_power, wiretap_power) = crate::alignment::leakage_powers(&state);
    Ok(TrialRecord {
        algorithm,
        trial,
        snr_db,
        ssr: report.ssr,
        rates: report.per_user_rate,
        leakages: report.per_user_leakage,
        interference_power,
        wiretap_power,
        wall_ms: 0,
    })
}

fn run_trial(
    spec: &ExperimentSpec,
    trial: usize,
    skip: &HashSet<(Algorithm, usize)>,
) -> (Vec<TrialRecord>, Vec<FailureRecord>) {
    let p_ref = spec.reference_power();
    let cfg_ref = spec.config.with_tx_power(p_ref);
    let channels = ChannelSet::generate(
        &cfg_ref,
        rng::derive_seed(spec.master_seed, trial as u64, "channels"),
    );
    let mut records = Vec::new();
    let mut failures = Vec::new();

    for &alg in &spec.algorithms {
        if skip.contains(&(alg, trial)) {
            continue;
        }
        let started = Instant::now();
        let result: Result<Vec<TrialRecord>> = (|| {
            let mut out = Vec::with_capacity(spec.snr_grid_db.len());
            if spec.reoptimize_per_snr {
                for &snr_db in &spec.snr_grid_db {
                    let p = spec.config.noise_var * 10f64.powf(snr_db / 10.0);
                    let cfg = spec.config.with_tx_power(p);
                    let (f, w) = optimize(alg, &channels, &cfg, &spec.options, spec.master_seed, trial)?;
                    out.push(evaluate_point(alg, trial, snr_db, &channels, &f, &w, &cfg)?);
                }
            } else {
                let (f, w) =
                    optimize(alg, &channels, &cfg_ref, &spec.options, spec.master_seed, trial)?;
                for &snr_db in &spec.snr_grid_db {
                    let p = spec.config.noise_var * 10f64.powf(snr_db / 10.0);
                    let scaled = f.scaled((p / p_ref).sqrt());
                    let cfg = spec.config.with_tx_power(p);
                    out.push(evaluate_point(alg, trial, snr_db, &channels, &scaled, &w, &cfg)?);
                }
            }
            Ok(out)
        })();
        match result {
            Ok(mut recs) => {
                if spec.timing {
                    let wall = started.elapsed().as_millis() as u64;
                    for r in &mut recs {
                        r.wall_ms = wall;
                    }
                }
                records.extend(recs);
            }
            Err(e) => failures.push(FailureRecord {
                algorithm: alg,
                trial,
                message: e.to_string(),
            }),
        }
    }
    (records, failures)
}

fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        a.algorithm
            .name()
            .cmp(b.algorithm.name())
            .then(a.snr_db.partial_cmp(&b.snr_db).unwrap())
            .then(a.trial.cmp(&b.trial))
    });
}

/// Mean SSR with standard error per (algorithm, SNR) cell.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(&'static str, u64), (Algorithm, f64, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let key = (r.algorithm.name(), r.snr_db.to_bits());
        cells
            .entry(key)
            .or_insert_with(|| (r.algorithm, r.snr_db, Vec::new()))
            .2
            .push(r.ssr);
    }
    let mut rows: Vec<SummaryRow> = cells
        .into_values()
        .map(|(algorithm, snr_db, ssrs)| {
            let n = ssrs.len();
            let mean = ssrs.iter().sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var =
                    ssrs.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                algorithm,
                snr_db,
                mean_ssr: mean,
                stderr_ssr: stderr,
                n,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.algorithm
            .name()
            .cmp(b.algorithm.name())
            .then(a.snr_db.partial_cmp(&b.snr_db).unwrap())
    });
    rows
}

fn fmt_f64(v: f64) -> String {
    format!("{:.12e}", v)
}

fn csv_header(users: usize) -> String {
    let mut cols = vec!["algorithm".to_string(), "trial".into(), "snr_db".into(), "ssr".into()];
    for k in 1..=users {
        cols.push(format!("rate_user_{}", k));
    }
    for k in 1..=users {
        cols.push(format!("leak_user_{}", k));
    }
    cols.push("interf_power".into());
    cols.push("wiretap_power".into());
    cols.push("wall_ms".into());
    cols.join(",")
}

fn csv_row(r: &TrialRecord) -> String {
    let mut cols = vec![
        r.algorithm.name().to_string(),
        r.trial.to_string(),
        fmt_f64(r.snr_db),
        fmt_f64(r.ssr),
    ];
    cols.extend(r.rates.iter().map(|v| fmt_f64(*v)));
    cols.extend(r.leakages.iter().map(|v| fmt_f64(*v)));
    cols.push(fmt_f64(r.interference_power));
    cols.push(fmt_f64(r.wiretap_power));
    cols.push(r.wall_ms.to_string());
    cols.join(",")
}

/// Writes records sorted by (algorithm, snr_db, trial) with LF endings.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidConfig("no records to emit".into()));
    }
    let users = records[0].rates.len();
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = String::new();
    out.push_str(&csv_header(users));
    out.push('\n');
    for r in &sorted {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn emit_summary_csv(summary: &[SummaryRow], path: &Path) -> Result<()> {
    let mut out = String::from("algorithm,snr_db,mean_ssr,stderr_ssr,n\n");
    for row in summary {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.algorithm.name(),
            fmt_f64(row.snr_db),
            fmt_f64(row.mean_ssr),
            fmt_f64(row.stderr_ssr),
            row.n
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parses a records CSV produced by [`emit_csv`].
pub fn parse_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = fs::read_to_string(path)?;
    parse_csv_text(&text)
}

pub fn parse_csv_text(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let users = cols.iter().filter(|c| c.starts_with("rate_user_")).count();
    if users == 0 {
        return Err(Error::Parse("no rate_user columns in header".into()));
    }
    let expected = 4 + 2 * users + 3;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != expected {
            return Err(Error::Parse(format!(
                "row {}: expected {} fields, found {}",
                i + 2,
                expected,
                f.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {}", i + 2, e)))
        };
        let rates = f[4..4 + users].iter().map(|s| num(s)).collect::<Result<_>>()?;
        let leakages = f[4 + users..4 + 2 * users]
            .iter()
            .map(|s| num(s))
            .collect::<Result<_>>()?;
        records.push(TrialRecord {
            algorithm: f[0].parse()?,
            trial: f[1]
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {}", i + 2, e)))?,
            snr_db: num(f[2])?,
            ssr: num(f[3])?,
            rates,
            leakages,
            interference_power: num(f[4 + 2 * users])?,
            wiretap_power: num(f[4 + 2 * users + 1])?,
            wall_ms: f[4 + 2 * users + 2]
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {}", i + 2, e)))?,
        });
    }
    Ok(records)
}

/// Runs the full experiment. Completed (algorithm, trial) pairs found in
/// the journal file are reused, so interrupted runs resume.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    fs::create_dir_all(&spec.output_dir)?;
    let journal_path = spec.output_dir.join("journal.csv");

    // Resume: keep journal records that match the current grid exactly.
    let mut resumed: Vec<TrialRecord> = Vec::new();
    let mut skip: HashSet<(Algorithm, usize)> = HashSet::new();
    if journal_path.exists() {
        if let Ok(old) = parse_csv(&journal_path) {
            let mut by_pair: BTreeMap<(&'static str, usize), Vec<TrialRecord>> = BTreeMap::new();
            for r in old {
                if r.trial < spec.trials && spec.algorithms.contains(&r.algorithm) {
                    by_pair
                        .entry((r.algorithm.name(), r.trial))
                        .or_default()
                        .push(r);
                }
            }
            for (_, recs) in by_pair {
                let snrs: HashSet<u64> = recs.iter().map(|r| r.snr_db.to_bits()).collect();
                let want: HashSet<u64> = spec.snr_grid_db.iter().map(|s| s.to_bits()).collect();
                if snrs == want {
                    skip.insert((recs[0].algorithm, recs[0].trial));
                    resumed.extend(recs);
                }
            }
        }
    }

    let journal = Mutex::new(
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&journal_path)?,
    );
    if skip.is_empty() {
        let mut j = journal.lock().unwrap();
        // Fresh journal: truncate and write the header.
        j.set_len(0)?;
        writeln!(j, "{}", csv_header(spec.config.users))?;
    }

    let per_trial: Vec<(Vec<TrialRecord>, Vec<FailureRecord>)> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let out = run_trial(spec, trial, &skip);
            let mut j = journal.lock().unwrap();
            for r in &out.0 {
                let _ = writeln!(j, "{}", csv_row(r));
            }
            out
        })
        .collect();

    let mut records = resumed;
    let mut failures = Vec::new();
    for (recs, fails) in per_trial {
        records.extend(recs);
        failures.extend(fails);
    }
    sort_records(&mut records);
    failures.sort_by(|a, b| {
        a.algorithm
            .name()
            .cmp(b.algorithm.name())
            .then(a.trial.cmp(&b.trial))
    });

    if records.is_empty() {
        return Err(Error::Numerical(
            "every trial failed; no records produced".into(),
        ));
    }

    emit_csv(&records, &spec.output_dir.join("records.csv"))?;
    let summary = summarize(&records);
    emit_summary_csv(&summary, &spec.output_dir.join("summary.csv"))?;
    if !failures.is_empty() {
        let mut out = String::from("algorithm,trial,message\n");
        for f in &failures {
            out.push_str(&format!(
                "{},{},{}\n",
                f.algorithm.name(),
                f.trial,
                f.message.replace(',', ";")
            ));
        }
        fs::write(spec.output_dir.join("failures.csv"), out)?;
    }
    crate::plot::emit_plot(&summary, &spec.output_dir.join("ssr_vs_snr.svg"))?;

    Ok(ExperimentOutcome {
        records,
        summary,
        failures,
    })
}

// ---------------------------------------------------------------------------
// Flat key-value settings (config file format, mirrored by CLI flags)
// ---------------------------------------------------------------------------

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_settings(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get_parsed<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T>
where
    T::Err: fmt::Display,
{
    match map.get(key) {
        Some(v) => v
            .parse::<T>()
            .map_err(|e| Error::Parse(format!("{}: {}", key, e))),
        None => Ok(default),
    }
}

impl ExperimentSpec {
    /// Builds a spec from flat settings, applying defaults for anything
    /// absent. CLI flags are merged into the map before calling this.
    pub fn from_settings(map: &BTreeMap<String, String>) -> Result<Self> {
        let users = get_parsed(map, "k", 3usize)?;
        let nt = get_parsed(map, "n_t", 18usize)?;
        let nr = get_parsed(map, "n_r", 12usize)?;
        let nre = get_parsed(map, "n_re", 9usize)?;
        let d = get_parsed(map, "d", 3usize)?;
        let sigma2 = get_parsed(map, "sigma2", 1.0f64)?;
        let config = SystemConfig::new(users, nt, nr, nre, d, 1.0, sigma2)?;

        let snr_grid_db: Vec<f64> = match map.get("snr_db") {
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("snr_db: {}", e)))
                })
                .collect::<Result<_>>()?,
            None => (0..=50).step_by(10).map(|x| x as f64).collect(),
        };
        let algorithms: Vec<Algorithm> = match map.get("algorithms") {
            Some(v) => v
                .split(',')
                .map(|s| s.parse::<Algorithm>())
                .collect::<Result<_>>()?,
            None => vec![Algorithm::Conventional, Algorithm::Nn, Algorithm::Rnn],
        };

        let mut options = AlgorithmOptions::default();
        options.epsilon = get_parsed(map, "epsilon", options.epsilon)?;
        options.nn_kappa_max = get_parsed(map, "nn_kappa_max", options.nn_kappa_max)?;
        options.rnn_kappa_max = get_parsed(map, "rnn_kappa_max", options.rnn_kappa_max)?;
        options.m_max = get_parsed(map, "m_max", options.m_max)?;
        options.gamma = get_parsed(map, "gamma", options.gamma)?;
        options.zeta = get_parsed(map, "zeta", options.zeta)?;
        options.baseline_iterations =
            get_parsed(map, "baseline_iterations", options.baseline_iterations)?;
        options.solver.tolerance = get_parsed(map, "solver_tolerance", options.solver.tolerance)?;
        options.solver.max_iterations =
            get_parsed(map, "solver_max_iterations", options.solver.max_iterations)?;
        options.solver.penalty = get_parsed(map, "solver_penalty", options.solver.penalty)?;

        let spec = ExperimentSpec {
            config,
            snr_grid_db,
            trials: get_parsed(map, "trials", 200usize)?,
            algorithms,
            options,
            master_seed: get_parsed(map, "master_seed", 1u64)?,
            output_dir: PathBuf::from(
                map.get("output_dir").cloned().unwrap_or_else(|| "out".into()),
            ),
            reoptimize_per_snr: get_parsed(map, "reoptimize_per_snr", false)?,
            timing: get_parsed(map, "timing", false)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn tiny_spec(dir: &Path) -> ExperimentSpec {
        ExperimentSpec {
            config: SystemConfig::new(2, 4, 4, 2, 1, 1.0, 1.0).unwrap(),
            snr_grid_db: vec![0.0, 10.0, 20.0],
            trials: 2,
            algorithms: vec![Algorithm::Conventional, Algorithm::Nn],
            options: AlgorithmOptions {
                nn_kappa_max: 2,
                baseline_iterations: 10,
                ..Default::default()
            },
            master_seed: 7,
            output_dir: dir.to_path_buf(),
            reoptimize_per_snr: false,
            timing: false,
        }
    }

    #[test]
    fn record_count_matches_grid_times_trials_times_algorithms() {
        let dir = tempdir().unwrap();
        let spec = tiny_spec(dir.path());
        let out = run_experiment(&spec).unwrap();
        assert_eq!(out.records.len(), 12);
        assert!(out.failures.is_empty());
    }

    #[test]
    fn identical_seed_gives_identical_csv_bytes() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let mut spec_a = tiny_spec(dir_a.path());
        let mut spec_b = tiny_spec(dir_b.path());
        spec_a.output_dir = dir_a.path().to_path_buf();
        spec_b.output_dir = dir_b.path().to_path_buf();
        run_experiment(&spec_a).unwrap();
        run_experiment(&spec_b).unwrap();
        let a = fs::read(dir_a.path().join("records.csv")).unwrap();
        let b = fs::read(dir_b.path().join("records.csv")).unwrap();
        assert_eq!(a, b);
        let a = fs::read(dir_a.path().join("summary.csv")).unwrap();
        let b = fs::read(dir_b.path().join("summary.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip_and_sort_order() {
        let dir = tempdir().unwrap();
        let spec = tiny_spec(dir.path());
        let out = run_experiment(&spec).unwrap();
        let path = dir.path().join("records.csv");
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 13); // 12 records + header
        assert!(!text.contains('\r'));
        let parsed = parse_csv(&path).unwrap();
        assert_eq!(parsed.len(), out.records.len());
        for (a, b) in parsed.iter().zip(out.records.iter()) {
            assert_eq!(a.algorithm, b.algorithm);
            assert_eq!(a.trial, b.trial);
            // 12 significant digits survive the round trip.
            assert!((a.ssr - b.ssr).abs() <= 1e-12 * b.ssr.abs().max(1.0));
        }
        // Sorted by (algorithm, snr_db, trial).
        let keys: Vec<_> = parsed
            .iter()
            .map(|r| (r.algorithm.name(), r.snr_db.to_bits(), r.trial))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn resume_skips_completed_pairs() {
        let dir = tempdir().unwrap();
        let spec = tiny_spec(dir.path());
        let first = run_experiment(&spec).unwrap();
        // Second run resumes everything from the journal.
        let second = run_experiment(&spec).unwrap();
        assert_eq!(first.records.len(), second.records.len());
        for (a, b) in first.records.iter().zip(second.records.iter()) {
            assert!((a.ssr - b.ssr).abs() <= 1e-12 * a.ssr.abs().max(1.0));
        }
    }

    #[test]
    fn settings_parse_and_overrides() {
        let text = "k = 2\nn_t = 4\nn_r = 4 # antennas\nn_re = 2\nd = 1\ntrials = 3\nsnr_db = 0, 10\nalgorithms = nn\n";
        let map = parse_settings(text).unwrap();
        let spec = ExperimentSpec::from_settings(&map).unwrap();
        assert_eq!(spec.trials, 3);
        assert_eq!(spec.snr_grid_db, vec![0.0, 10.0]);
        assert_eq!(spec.algorithms, vec![Algorithm::Nn]);
        assert!(parse_settings("nonsense line").is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let dir = tempdir().unwrap();
        let mut spec = tiny_spec(dir.path());
        spec.trials = 0;
        assert!(spec.validate().is_err());
        let mut spec = tiny_spec(dir.path());
        spec.snr_grid_db = vec![10.0, 0.0];
        assert!(spec.validate().is_err());
        let mut spec = tiny_spec(dir.path());
        spec.algorithms = vec![Algorithm::Nn, Algorithm::Nn];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn median_snr_of_even_grid() {
        let dir = tempdir().unwrap();
        let mut spec = tiny_spec(dir.path());
        spec.snr_grid_db = vec![0.0, 10.0, 20.0, 30.0];
        assert_eq!(spec.median_snr_db(), 15.0);
    }
}
