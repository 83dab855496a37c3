use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use isi_ecc::channel::ChannelConfig;
use isi_ecc::harness::{
    run_ber_vs_molecules, run_ber_vs_noise, run_isi_experiment, ExperimentConfig, Sweep,
    TrialReport, DEFAULT_BER_TRIALS, DEFAULT_ISI_TRIALS, DEFAULT_PILOT_SLOTS,
};
use isi_ecc::{build_codebook, BitSequence, CodeChoice, CodeSpec, Codec, MessageWord};

#[derive(Parser)]
#[command(name = "isi-ecc", version, about = "ISI-reducing single error correcting codes for diffusion channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a message and print the transmitted bits.
    Encode {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        msg: String,
        /// Transmit the codeword without the position swap.
        #[arg(long)]
        no_post_encode: bool,
    },
    /// Decode a received word and print the message bits.
    Decode {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        word: String,
        /// The word was sent without the position swap.
        #[arg(long)]
        no_post_encode: bool,
    },
    /// Write the codebook as CSV.
    Codebook {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected interference per codeword position.
    Isi(ExperimentArgs),
    /// BER against the number of molecules per bit-1.
    #[command(name = "ber-m")]
    BerM(ExperimentArgs),
    /// BER against the receiver noise variance.
    #[command(name = "ber-noise")]
    BerNoise(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Channel key-value file.
    #[arg(long)]
    config: PathBuf,
    /// `ckm:K,M`, `uncoded` or `rep3`.
    #[arg(long)]
    code: CodeChoice,
    #[arg(long)]
    no_post_encode: bool,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Codewords per sweep point.
    #[arg(long)]
    trials: Option<u64>,
    /// Inclusive sweep `START:STOP:STEP` over M (isi, ber-m) or sigma_n2 (ber-noise).
    #[arg(long)]
    sweep: Option<String>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Pilot length for threshold calibration, in slots.
    #[arg(long, default_value_t = DEFAULT_PILOT_SLOTS)]
    pilot: usize,
    /// Fixed detection threshold instead of calibrating one.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Isi,
    BerM,
    BerNoise,
}

fn bits(s: &str) -> Result<BitSequence> {
    s.parse().with_context(|| format!("invalid bit string {s:?}"))
}

fn parse_sweep(raw: &str, kind: Kind) -> Result<Sweep<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [start, stop, step] = parts[..] else {
        bail!("sweep must be START:STOP:STEP, got {raw:?}");
    };
    Ok(match kind {
        Kind::Isi | Kind::BerM => Sweep::molecules(start.parse()?, stop.parse()?, step.parse()?)?,
        Kind::BerNoise => Sweep::noise_variance(start.parse()?, stop.parse()?, step.parse()?)?,
    })
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.txt")
}

fn run_experiment(args: &ExperimentArgs, kind: Kind) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let channel: ChannelConfig<f64> = text.parse()?;
    let mut config = ExperimentConfig::new(args.code, channel.params, args.seed.unwrap_or(channel.seed));
    config.post_encoding = !args.no_post_encode;
    config.trials = args.trials.unwrap_or(match kind {
        Kind::Isi => DEFAULT_ISI_TRIALS,
        Kind::BerM | Kind::BerNoise => DEFAULT_BER_TRIALS,
    });
    config.sweep = args.sweep.as_deref().map(|s| parse_sweep(s, kind)).transpose()?;
    config.threads = args.threads;
    config.pilot_slots = args.pilot;
    config.threshold = args.threshold;

    let report: TrialReport<f64> = match kind {
        Kind::Isi => run_isi_experiment(&config)?,
        Kind::BerM => run_ber_vs_molecules(&config)?,
        Kind::BerNoise => run_ber_vs_noise(&config)?,
    };
    fs::write(&args.out, report.to_csv()).with_context(|| format!("writing {}", args.out.display()))?;
    let manifest = manifest_path(&args.out);
    fs::write(&manifest, report.manifest())
        .with_context(|| format!("writing {}", manifest.display()))?;
    eprintln!(
        "wrote {} and {} in {:.1}s",
        args.out.display(),
        manifest.display(),
        report.elapsed.as_secs_f64()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Encode { k, m, msg, no_post_encode } => {
            let spec = CodeSpec::new(k, m)?;
            let msg = MessageWord::new(bits(&msg)?, &spec)?;
            let word = Codec::new(spec, !no_post_encode).encode(&msg);
            println!("{}", word.transmitted);
        }
        Command::Decode { k, m, word, no_post_encode } => {
            let spec = CodeSpec::new(k, m)?;
            let msg = Codec::new(spec, !no_post_encode).decode(&bits(&word)?)?;
            println!("{}", msg.bits());
        }
        Command::Codebook { k, m, out } => {
            let csv = build_codebook(k, m)?.to_csv();
            match out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
        }
        Command::Isi(args) => run_experiment(&args, Kind::Isi)?,
        Command::BerM(args) => run_experiment(&args, Kind::BerM)?,
        Command::BerNoise(args) => run_experiment(&args, Kind::BerNoise)?,
    }
    Ok(())
}
