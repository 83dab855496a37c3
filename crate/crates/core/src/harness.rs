//! Experiment driver: expected interference and bit error rate sweeps.
//!
//! Trials are split into fixed-size blocks, each with its own generator
//! stream derived from `(seed, block index)` and its own empty channel at the
//! start. Block results are merged in block order, so reports do not depend
//! on the number of worker threads. Every sweep point reuses the same seed,
//! which makes a point's result a function of its own parameters only.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{
    calibrate_threshold, expected_isi, slot_probs, ChannelParams, MolecularTransport,
};
use crate::channel::sim::block_rng;
use crate::error::{param, Error, Result};
use crate::scalar::Scalar;
use crate::scheme::{CodeChoice, LineCode};

/// Codewords per independently seeded block.
pub const BLOCK_CODEWORDS: u64 = 4096;

/// Threshold used when there is no signal to calibrate against (`M = 0`):
/// half a molecule.
pub const NO_SIGNAL_THRESHOLD: f64 = 0.5;

pub const DEFAULT_BER_TRIALS: u64 = 1_000_000;
pub const DEFAULT_ISI_TRIALS: u64 = 100_000;
pub const DEFAULT_PILOT_SLOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Isi,
    BerVsMolecules,
    BerVsNoise,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Isi => "isi",
            ExperimentKind::BerVsMolecules => "ber-m",
            ExperimentKind::BerVsNoise => "ber-noise",
        }
    }
}

/// Swept channel variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep<T> {
    Molecules(Vec<u64>),
    NoiseVariance(Vec<T>),
}

impl<T: Scalar> Sweep<T> {
    /// Inclusive `start..=stop` in steps of `step`.
    pub fn molecules(start: u64, stop: u64, step: u64) -> Result<Self> {
        if step == 0 || stop < start {
            return param(format!("empty molecule sweep {start}:{stop}:{step}"));
        }
        Ok(Sweep::Molecules((start..=stop).step_by(step as usize).collect()))
    }

    /// Inclusive `start..=stop` in steps of `step`, tolerant to rounding at
    /// the end point.
    pub fn noise_variance(start: T, stop: T, step: T) -> Result<Self> {
        if !(step > T::zero()) || stop < start || start < T::zero() {
            return param(format!("empty noise sweep {start}:{stop}:{step}"));
        }
        let count = ((stop - start) / step + T::of(1e-9)).floor().as_f64() as usize;
        Ok(Sweep::NoiseVariance(
            (0..=count).map(|j| start + step * T::of(j as f64)).collect(),
        ))
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::Molecules(v) => v.len(),
            Sweep::NoiseVariance(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    pub code: CodeChoice,
    pub channel: ChannelParams<T>,
    /// `None` runs the single point given by `channel`.
    pub sweep: Option<Sweep<T>>,
    /// Codewords per sweep point.
    pub trials: u64,
    pub post_encoding: bool,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide. Does not affect results.
    pub threads: usize,
    pub pilot_slots: usize,
    /// Fixed detection threshold instead of pilot calibration.
    pub threshold: Option<T>,
}

impl<T: Scalar> ExperimentConfig<T> {
    pub fn new(code: CodeChoice, channel: ChannelParams<T>, seed: u64) -> Self {
        ExperimentConfig {
            code,
            channel,
            sweep: None,
            trials: DEFAULT_BER_TRIALS,
            post_encoding: true,
            seed,
            threads: 0,
            pilot_slots: DEFAULT_PILOT_SLOTS,
            threshold: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sweep.as_ref().is_some_and(Sweep::is_empty) {
            return Err(Error::Config("sweep range is empty".into()));
        }
        if let Some(Sweep::NoiseVariance(v)) = &self.sweep {
            if v.iter().any(|&s| !(s >= T::zero())) {
                return Err(Error::Config("noise variances must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Channel parameters of every sweep point, in sweep order.
    pub fn points(&self) -> Vec<ChannelParams<T>> {
        match &self.sweep {
            None => vec![self.channel],
            Some(Sweep::Molecules(v)) => v.iter().map(|&m| self.channel.with_molecules(m)).collect(),
            Some(Sweep::NoiseVariance(v)) => {
                v.iter().map(|&s| self.channel.with_noise_var(s)).collect()
            }
        }
    }

    fn line_code(&self) -> Result<LineCode> {
        LineCode::new(self.code, self.post_encoding)
    }
}

/// Error counts at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord<T> {
    pub molecules: u64,
    pub noise_var: T,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub threshold: T,
    pub codewords: u64,
}

impl<T> BerRecord<T> {
    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits_sent as f64).sqrt()
    }
}

/// Expected interference, in molecules, on one codeword position.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiRecord<T> {
    pub molecules: u64,
    pub position: usize,
    /// `M` times the mean over codewords of the in-codeword interference.
    pub analytic: T,
    /// Mean interference count in a continuous stream of random codewords.
    pub monte_carlo: T,
}

#[derive(Debug, Clone)]
pub struct TrialReport<T> {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig<T>,
    pub ber: Vec<BerRecord<T>>,
    pub isi: Vec<IsiRecord<T>>,
    pub elapsed: Duration,
}

impl<T: Scalar> TrialReport<T> {
    pub fn code_label(&self) -> String {
        self.config.code.to_string()
    }

    pub fn to_csv(&self) -> String {
        let cfg = &self.config;
        let code = self.code_label();
        let mut out = String::new();
        match self.kind {
            ExperimentKind::Isi => {
                out.push_str("code,ts_s,L,position,expected_isi_analytic,expected_isi_mc\n");
                for r in &self.isi {
                    let _ = writeln!(
                        out,
                        "{code},{},{},{},{},{}",
                        cfg.channel.slot, cfg.channel.memory, r.position, r.analytic, r.monte_carlo
                    );
                }
            }
            ExperimentKind::BerVsMolecules | ExperimentKind::BerVsNoise => {
                out.push_str(
                    "code,post_encoding,ts_s,L,M,sigma_n2,bits_sent,bit_errors,ber,threshold\n",
                );
                let post = LineCode::new(cfg.code, cfg.post_encoding)
                    .map(|c| c.post_encoding())
                    .unwrap_or(false);
                for r in &self.ber {
                    let _ = writeln!(
                        out,
                        "{code},{post},{},{},{},{},{},{},{},{}",
                        cfg.channel.slot,
                        cfg.channel.memory,
                        r.molecules,
                        r.noise_var,
                        r.bits_sent,
                        r.bit_errors,
                        r.ber,
                        r.threshold
                    );
                }
            }
        }
        out
    }

    /// Plain-text record of every input plus the calibrated thresholds.
    pub fn manifest(&self) -> String {
        let cfg = &self.config;
        let p = &cfg.channel;
        let mut out = String::new();
        let _ = writeln!(out, "software = isi-ecc {}", crate::VERSION);
        let _ = writeln!(out, "experiment = {}", self.kind.name());
        let _ = writeln!(out, "code = {}", cfg.code);
        let _ = writeln!(out, "post_encoding = {}", cfg.post_encoding);
        let _ = writeln!(out, "D_um2_per_s = {}", p.diffusion);
        let _ = writeln!(out, "r_um = {}", p.radius);
        let _ = writeln!(out, "r0_um = {}", p.distance);
        let _ = writeln!(out, "ts_s = {}", p.slot);
        let _ = writeln!(out, "L = {}", p.memory);
        let _ = writeln!(out, "M = {}", p.molecules);
        let _ = writeln!(out, "sigma_n2 = {}", p.noise_var);
        match &cfg.sweep {
            None => {
                let _ = writeln!(out, "sweep = none");
            }
            Some(Sweep::Molecules(v)) => {
                let _ = writeln!(out, "sweep = M {}", join(v));
            }
            Some(Sweep::NoiseVariance(v)) => {
                let _ = writeln!(out, "sweep = sigma_n2 {}", join(v));
            }
        }
        let _ = writeln!(out, "trials = {}", cfg.trials);
        let _ = writeln!(out, "seed = {}", cfg.seed);
        let _ = writeln!(out, "pilot_slots = {}", cfg.pilot_slots);
        let _ = writeln!(out, "block_codewords = {BLOCK_CODEWORDS}");
        if let Some(t) = cfg.threshold {
            let _ = writeln!(out, "threshold_override = {t}");
        }
        if !self.ber.is_empty() {
            let thresholds: Vec<T> = self.ber.iter().map(|r| r.threshold).collect();
            let _ = writeln!(out, "thresholds = {}", join(&thresholds));
        }
        let _ = writeln!(out, "wall_clock_s = {:.3}", self.elapsed.as_secs_f64());
        out
    }
}

fn join<V: std::fmt::Display>(values: &[V]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn with_pool<R: Send>(threads: usize, job: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn blocks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(BLOCK_CODEWORDS))
        .map(|b| (b, BLOCK_CODEWORDS.min(trials - b * BLOCK_CODEWORDS)))
        .collect()
}

fn random_message<R: Rng + ?Sized>(rng: &mut R, out: &mut [u8]) {
    let word: u64 = rng.random();
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = ((word >> j) & 1) as u8;
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct ErrorTally {
    bits: u64,
    errors: u64,
}

fn ber_block<T: Scalar>(
    code: &LineCode,
    transport: &MolecularTransport,
    params: &ChannelParams<T>,
    threshold: T,
    seed: u64,
    (block, codewords): (u64, u64),
) -> ErrorTally {
    let mut rng = block_rng(seed, block);
    let mut transport = transport.clone();
    transport.reset();
    let sigma = params.noise_var.sqrt();
    let (k, n) = (code.k(), code.n());
    let mut msg = vec![0u8; k];
    let mut word = vec![0u8; n];
    let mut decided = vec![0u8; n];
    let mut decoded = vec![0u8; k];
    let mut tally = ErrorTally::default();
    for _ in 0..codewords {
        random_message(&mut rng, &mut msg);
        code.encode_into(&msg, &mut word);
        for (slot, &bit) in decided.iter_mut().zip(&word) {
            let (own, earlier) = transport.step(bit, &mut rng);
            let mut y = T::of((own + earlier) as f64);
            if sigma > T::zero() {
                y = y + sigma * T::standard_normal(&mut rng);
            }
            *slot = u8::from(y >= threshold);
        }
        code.decode_into(&decided, &mut decoded);
        tally.bits += k as u64;
        tally.errors += msg.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64;
    }
    tally
}

/// Detection threshold for one sweep point.
pub fn point_threshold<T: Scalar>(config: &ExperimentConfig<T>, params: &ChannelParams<T>) -> Result<T> {
    if let Some(t) = config.threshold {
        return Ok(t);
    }
    match calibrate_threshold(params, config.pilot_slots, config.seed) {
        Err(Error::Calibration(_)) if params.molecules == 0 => Ok(T::of(NO_SIGNAL_THRESHOLD)),
        other => other,
    }
}

/// BER of one code at one channel point.
pub fn run_ber_point<T: Scalar>(
    config: &ExperimentConfig<T>,
    params: &ChannelParams<T>,
) -> Result<BerRecord<T>> {
    params.validate()?;
    let code = config.line_code()?;
    let threshold = point_threshold(config, params)?;
    let profile = slot_probs(params)?;
    let transport = MolecularTransport::new(&profile, params.molecules);
    let parts = blocks(config.trials);
    let tallies: Vec<ErrorTally> = with_pool(config.threads, || {
        parts
            .par_iter()
            .map(|&b| ber_block(&code, &transport, params, threshold, config.seed, b))
            .collect()
    })?;
    let total = tallies.iter().fold(ErrorTally::default(), |acc, t| ErrorTally {
        bits: acc.bits + t.bits,
        errors: acc.errors + t.errors,
    });
    Ok(BerRecord {
        molecules: params.molecules,
        noise_var: params.noise_var,
        bits_sent: total.bits,
        bit_errors: total.errors,
        ber: total.errors as f64 / total.bits as f64,
        threshold,
        codewords: config.trials,
    })
}

fn run_ber<T: Scalar>(config: &ExperimentConfig<T>, kind: ExperimentKind) -> Result<TrialReport<T>> {
    config.validate()?;
    let start = Instant::now();
    let ber = config
        .points()
        .iter()
        .map(|p| run_ber_point(config, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport {
        kind,
        config: config.clone(),
        ber,
        isi: Vec::new(),
        elapsed: start.elapsed(),
    })
}

/// BER over a sweep of the molecule count (or the single configured point).
pub fn run_ber_vs_molecules<T: Scalar>(config: &ExperimentConfig<T>) -> Result<TrialReport<T>> {
    if matches!(config.sweep, Some(Sweep::NoiseVariance(_))) {
        return Err(Error::Config("ber-m sweeps the molecule count".into()));
    }
    run_ber(config, ExperimentKind::BerVsMolecules)
}

/// BER over a sweep of the noise variance (or the single configured point).
pub fn run_ber_vs_noise<T: Scalar>(config: &ExperimentConfig<T>) -> Result<TrialReport<T>> {
    if matches!(config.sweep, Some(Sweep::Molecules(_))) {
        return Err(Error::Config("ber-noise sweeps the noise variance".into()));
    }
    run_ber(config, ExperimentKind::BerVsNoise)
}

fn isi_block(
    code: &LineCode,
    transport: &MolecularTransport,
    seed: u64,
    (block, codewords): (u64, u64),
) -> Vec<u64> {
    let mut rng = block_rng(seed, block);
    let mut transport = transport.clone();
    transport.reset();
    let mut msg = vec![0u8; code.k()];
    let mut word = vec![0u8; code.n()];
    let mut sums = vec![0u64; code.n()];
    for _ in 0..codewords {
        random_message(&mut rng, &mut msg);
        code.encode_into(&msg, &mut word);
        for (acc, &bit) in sums.iter_mut().zip(&word) {
            *acc += transport.step(bit, &mut rng).1;
        }
    }
    sums
}

/// Per-position expected interference for the configured code: the
/// in-codeword analytic mean and a streaming Monte Carlo estimate, both in
/// molecules, at the configured `M` (and every `M` of a molecule sweep).
pub fn run_isi_experiment<T: Scalar>(config: &ExperimentConfig<T>) -> Result<TrialReport<T>> {
    config.validate()?;
    if matches!(config.sweep, Some(Sweep::NoiseVariance(_))) {
        return Err(Error::Config("interference does not depend on receiver noise".into()));
    }
    let start = Instant::now();
    let code = config.line_code()?;
    let words = code.channel_words()?;
    let mut isi = Vec::new();
    for params in config.points() {
        let profile = slot_probs(&params)?;
        let transport = MolecularTransport::new(&profile, params.molecules);
        let parts = blocks(config.trials);
        let per_block: Vec<Vec<u64>> = with_pool(config.threads, || {
            parts
                .par_iter()
                .map(|&b| isi_block(&code, &transport, config.seed, b))
                .collect()
        })?;
        let mut sums = vec![0u64; code.n()];
        for block in &per_block {
            for (acc, v) in sums.iter_mut().zip(block) {
                *acc += v;
            }
        }
        let molecules = T::of(params.molecules as f64);
        for (pos, &sum) in sums.iter().enumerate() {
            isi.push(IsiRecord {
                molecules: params.molecules,
                position: pos + 1,
                analytic: molecules * expected_isi(&words, pos + 1, &profile)?,
                monte_carlo: T::of(sum as f64 / config.trials as f64),
            });
        }
    }
    Ok(TrialReport {
        kind: ExperimentKind::Isi,
        config: config.clone(),
        ber: Vec::new(),
        isi,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(code: &str, m: u64, noise: f64, trials: u64) -> ExperimentConfig<f64> {
        let mut cfg = ExperimentConfig::new(
            code.parse().unwrap(),
            ChannelParams::reference(0.3, m, noise),
            17,
        );
        cfg.trials = trials;
        cfg.pilot_slots = 20_000;
        cfg
    }

    #[test]
    fn sweeps_expand_inclusively() {
        assert_eq!(
            Sweep::<f64>::molecules(100, 300, 100).unwrap(),
            Sweep::Molecules(vec![100, 200, 300])
        );
        assert_eq!(
            Sweep::<f64>::noise_variance(0.0, 120.0, 60.0).unwrap(),
            Sweep::NoiseVariance(vec![0.0, 60.0, 120.0])
        );
        assert!(Sweep::<f64>::molecules(3, 1, 1).is_err());
        assert!(Sweep::<f64>::noise_variance(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = config("uncoded", 100, 0.0, 10);
        cfg.trials = 0;
        assert!(run_ber_vs_molecules(&cfg).is_err());
        let mut cfg = config("uncoded", 100, 0.0, 10);
        cfg.sweep = Some(Sweep::Molecules(vec![]));
        assert!(run_ber_vs_molecules(&cfg).is_err());
        let mut cfg = config("uncoded", 100, 0.0, 10);
        cfg.sweep = Some(Sweep::Molecules(vec![100]));
        assert!(run_ber_vs_noise(&cfg).is_err());
    }

    #[test]
    fn no_signal_uncoded_ber_is_the_one_fraction() {
        let report = run_ber_vs_molecules(&config("uncoded", 0, 0.0, 20_000)).unwrap();
        let rec = &report.ber[0];
        assert_eq!(rec.threshold, NO_SIGNAL_THRESHOLD);
        assert_eq!(rec.bits_sent, 20_000);
        assert!((rec.ber - 0.5).abs() < 0.02, "{}", rec.ber);
    }

    #[test]
    fn bits_accounting() {
        let report = run_ber_vs_molecules(&config("ckm:4,5", 200, 0.0, 5000)).unwrap();
        let rec = &report.ber[0];
        assert_eq!(rec.bits_sent, 5000 * 4);
        assert_eq!(rec.ber, rec.bit_errors as f64 / rec.bits_sent as f64);
        assert!((0.0..=1.0).contains(&rec.ber));
    }

    #[test]
    fn zero_molecules_zero_isi() {
        let mut cfg = config("ckm:4,5", 0, 0.0, 2000);
        cfg.trials = 2000;
        let report = run_isi_experiment(&cfg).unwrap();
        assert_eq!(report.isi.len(), 10);
        assert!(report.isi.iter().all(|r| r.analytic == 0.0 && r.monte_carlo == 0.0));
    }

    #[test]
    fn csv_headers() {
        let report = run_ber_vs_molecules(&config("rep3", 100, 0.0, 100)).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("code,post_encoding,ts_s,L,M,sigma_n2,bits_sent,bit_errors,ber,threshold\n"));
        assert!(csv.lines().nth(1).unwrap().starts_with("rep3,false,0.3,40,100,0,100,"));
        assert!(report.manifest().contains("seed = 17"));
        let isi = run_isi_experiment(&config("rep3", 100, 0.0, 100)).unwrap();
        assert!(isi.to_csv().starts_with("code,ts_s,L,position,expected_isi_analytic,expected_isi_mc\nrep3,0.3,40,1,0,"));
    }
}
