//! Single executable for the full experiment workflow: train a GAN on a
//! synthetic dataset, recover latent vectors, evaluate resampling criteria
//! in paired trials, and render latent-space figures.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. Progress goes
//! to stderr; stdout carries only results (tables, summary lines). Output
//! files are written atomically and are byte-reproducible from their seeds
//! (wall-time columns aside).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use glvr::gantrain::{history_csv, train_with_progress, SyntheticDataset, TrainConfig};
use glvr::harness::{
    parse_criteria, records_csv, render_table, run_paired_trials, summarize, ExperimentConfig,
    Jobs, TableFormat,
};
use glvr::latentops::{embed_compose, great_circle, slerp_path, InterpolationPath, PathMode};
use glvr::nets::{load_checkpoint, save_checkpoint};
use glvr::recovery::{recover_with_progress, RecoveryConfig, ResampleCriterion};
use glvr::rng::{trial_seed, Rng};
use glvr::storage::{atomic_write, image_bytes, read_tensor, write_tensor};
use glvr::Tensor;

#[derive(Parser)]
#[command(
    name = "glvr",
    version,
    about = "Train small GANs, invert images to latent vectors, and benchmark resampling criteria"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Slerp,
    GreatCircle,
}

#[derive(Subcommand)]
enum Command {
    /// Train a generator/discriminator pair from a JSON config
    Train {
        /// Training config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Output path for the generator checkpoint
        #[arg(long)]
        out: PathBuf,
        /// Optional output path for the discriminator checkpoint
        #[arg(long)]
        disc_out: Option<PathBuf>,
        /// Optional loss history CSV (step,d_loss,g_loss)
        #[arg(long)]
        loss_csv: Option<PathBuf>,
        /// Progress line to stderr every N steps
        #[arg(long, default_value_t = 1000)]
        progress_every: u64,
    },
    /// Recover the latent vector behind an image
    Recover {
        /// Generator checkpoint
        #[arg(long)]
        model: PathBuf,
        /// Target image tensor (GLVT)
        #[arg(long)]
        image: PathBuf,
        /// Resampling criterion: disabled | hard:C | logistic:A,B | truncnorm:A
        #[arg(long, default_value = "disabled")]
        criterion: String,
        #[arg(long, default_value_t = 20_000)]
        iters: u64,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        /// Stream seed (default: GLVR_SEED env var, then 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Expected iteration count E for the per-step probability
        /// (default: same as --iters)
        #[arg(long)]
        expected_iters: Option<u64>,
        /// Keep Adam moments when a coordinate is resampled
        #[arg(long)]
        no_moment_reset: bool,
        /// Output path for the recovered latent tensor (GLVT)
        #[arg(long)]
        out: PathBuf,
        /// Optional per-iteration trace CSV (iter,loss,resamples_this_iter)
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        progress_every: u64,
    },
    /// Run paired recovery trials across criteria and summarize
    Evaluate {
        /// Experiment config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for trial x criterion cells (0 = auto)
        #[arg(long)]
        jobs: Option<usize>,
        /// Master seed (overrides config and GLVR_SEED)
        #[arg(long)]
        master_seed: Option<u64>,
        /// Raw per-cell records CSV
        #[arg(long, default_value = "records.csv")]
        records: PathBuf,
        /// Summary table CSV
        #[arg(long, default_value = "summary.csv")]
        summary: PathBuf,
        /// Table format printed to stdout
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
    },
    /// Render an interpolation path through the generator as image frames
    Interpolate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Seed for the endpoint/direction draws (default: GLVR_SEED, then 0)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Emit G(e_i), G(e_j), and G(e_i + e_j) for basis vectors e_i, e_j
    Embed {
        #[arg(long)]
        model: PathBuf,
        /// First basis index (1-based)
        #[arg(long)]
        i: usize,
        /// Second basis index (1-based)
        #[arg(long)]
        j: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Sample a synthetic dataset to a GLVT tensor
    GenData {
        /// Dataset: ring | ring:MODES,RADIUS,SIGMA | checkerboard | tiles:SIDE
        #[arg(long)]
        dataset: String,
        /// Number of samples
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Output tensor path ([n, dim], GLVT)
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<glvr::Error> for CliError {
    fn from(e: glvr::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits 2 on usage errors, 0 on --help
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Seed resolution: explicit flag, then config value, then GLVR_SEED, then 0.
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var("GLVR_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("GLVR_SEED must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(0),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("reading {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("parsing {what} {}: {e}", path.display())))
}

/// Best displayable shape for a flat generator output: a square grayscale
/// image when the length is a perfect square, an RGB image when it is
/// 3 x square, otherwise a single-row image.
fn image_shape(len: usize) -> Vec<usize> {
    let isqrt = |n: usize| (n as f64).sqrt().round() as usize;
    let s = isqrt(len);
    if s * s == len {
        return vec![s, s];
    }
    if len.is_multiple_of(3) {
        let t = isqrt(len / 3);
        if 3 * t * t == len {
            return vec![3, t, t];
        }
    }
    vec![1, len]
}

fn write_frame(dir: &Path, name: &str, flat: &Tensor) -> CliResult {
    let img = flat.reshape(image_shape(flat.len()))?;
    atomic_write(&dir.join(name), &image_bytes(&img)?)?;
    Ok(())
}

fn parse_dataset(spec: &str) -> Result<SyntheticDataset, CliError> {
    let bad = |msg: &str| {
        CliError::usage(format!(
            "bad dataset '{spec}': {msg} \
             (expected ring | ring:MODES,RADIUS,SIGMA | checkerboard | tiles:SIDE)"
        ))
    };
    let dataset = match spec.split_once(':') {
        None => match spec {
            "ring" => SyntheticDataset::default_ring(),
            "checkerboard" => SyntheticDataset::Checkerboard,
            _ => return Err(bad("unknown dataset")),
        },
        Some(("ring", args)) => {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 3 {
                return Err(bad("ring takes MODES,RADIUS,SIGMA"));
            }
            SyntheticDataset::RingOfGaussians {
                modes: parts[0].parse().map_err(|_| bad("bad mode count"))?,
                radius: parts[1].parse().map_err(|_| bad("bad radius"))?,
                sigma: parts[2].parse().map_err(|_| bad("bad sigma"))?,
            }
        }
        Some(("tiles", args)) => SyntheticDataset::ProceduralTiles {
            side: args.parse().map_err(|_| bad("bad tile side"))?,
        },
        Some(_) => return Err(bad("unknown dataset")),
    };
    dataset.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(dataset)
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Train {
            config,
            out,
            disc_out,
            loss_csv,
            progress_every,
        } => {
            let cfg: TrainConfig = read_json(&config, "training config")?;
            let every = progress_every.max(1);
            let total = cfg.steps;
            let output = train_with_progress(&cfg, |step, d_loss, g_loss| {
                if step % every == 0 || step == total {
                    eprintln!("train step {step}/{total} d_loss={d_loss:.6} g_loss={g_loss:.6}");
                }
            })?;
            save_checkpoint(&output.generator, &out)?;
            if let Some(path) = disc_out {
                save_checkpoint(&output.discriminator, &path)?;
            }
            if let Some(path) = loss_csv {
                atomic_write(&path, history_csv(&output.history).as_bytes())?;
            }
            println!(
                "trained {} steps; generator -> {}",
                output.generator.step,
                out.display()
            );
            Ok(())
        }

        Command::Recover {
            model,
            image,
            criterion,
            iters,
            lr,
            seed,
            expected_iters,
            no_moment_reset,
            out,
            trace,
            progress_every,
        } => {
            let criterion: ResampleCriterion = criterion
                .parse()
                .map_err(|e: glvr::Error| CliError::usage(e.to_string()))?;
            let seed = resolve_seed(seed, None)?;
            let checkpoint = load_checkpoint(&model)?;
            let target = read_tensor(&image)?;
            // Accept any tensor whose element count matches the generator
            // output; shape details are irrelevant to the loss.
            let flat = target.reshape(vec![target.len()])?;
            let cfg = RecoveryConfig {
                iters,
                lr,
                expected_iters,
                reset_moments: !no_moment_reset,
                record_trace: trace.is_some(),
                seed,
                ..RecoveryConfig::default()
            };
            let every = progress_every.max(1);
            let result = recover_with_progress(
                &flat,
                &checkpoint.net,
                &criterion,
                &cfg,
                Rng::from_seed(seed),
                seed,
                |t, loss| {
                    if t % every == 0 || t == iters {
                        eprintln!("recover iter {t}/{iters} loss={loss:.6e}");
                    }
                },
            )?;
            write_tensor(&out, &result.z)?;
            if let (Some(path), Some(csv)) = (trace, result.trace_csv()) {
                atomic_write(&path, csv.as_bytes())?;
            }
            println!(
                "final_loss={} resamples={} out={}",
                result.final_loss,
                result.total_resamples(),
                out.display()
            );
            Ok(())
        }

        Command::Evaluate {
            config,
            jobs,
            master_seed,
            records,
            summary,
            format,
        } => {
            let cfg: ExperimentConfig = read_json(&config, "experiment config")?;
            let criteria = parse_criteria(&cfg.criteria)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let master = resolve_seed(master_seed, cfg.master_seed)?;
            let jobs = Jobs::from_flag(jobs.or(cfg.jobs));
            let checkpoint = load_checkpoint(&cfg.model)?;

            let progress = |r: &glvr::harness::TrialRecord| {
                eprintln!(
                    "cell trial={} criterion={} err={:.3e} ({:.0} ms)",
                    r.trial, r.criterion, r.error, r.wall_ms
                );
            };
            let recs = run_paired_trials(
                &checkpoint.net,
                &criteria,
                cfg.trials,
                master,
                &cfg.recovery,
                jobs,
                Some(&progress),
            )?;
            atomic_write(&records, records_csv(&recs).as_bytes())?;
            let table = summarize(&recs)?;
            atomic_write(&summary, render_table(&table, TableFormat::Csv).as_bytes())?;
            let stdout_format = match format {
                FormatArg::Markdown => TableFormat::Markdown,
                FormatArg::Csv => TableFormat::Csv,
            };
            print!("{}", render_table(&table, stdout_format));
            Ok(())
        }

        Command::Interpolate {
            model,
            mode,
            steps,
            seed,
            out_dir,
        } => {
            let seed = resolve_seed(seed, None)?;
            let checkpoint = load_checkpoint(&model)?;
            let net = &checkpoint.net;
            let d = net.input_dim();
            let mut rng = Rng::from_seed(seed);
            let path: InterpolationPath = match mode {
                ModeArg::Slerp => {
                    let z1 = Tensor::from_vec(rng.normal_vec(d));
                    let z2 = Tensor::from_vec(rng.normal_vec(d));
                    let mut p = slerp_path(&z1, &z2, steps)?;
                    p.seed = Some(seed);
                    p
                }
                ModeArg::GreatCircle => {
                    let z = Tensor::from_vec(rng.normal_vec(d));
                    // separate derived seed for the orthogonal direction
                    let mut p = great_circle(&z, steps, trial_seed(seed, 1))?;
                    p.seed = Some(seed);
                    p
                }
            };
            fs::create_dir_all(&out_dir)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("creating {}: {e}", out_dir.display())))?;
            for (k, point) in path.points.iter().enumerate() {
                let frame = net.forward(point)?;
                write_frame(&out_dir, &format!("frame_{k:03}.pgm"), &frame)?;
            }
            let meta = PathMetadata {
                mode: path.mode,
                steps: path.steps,
                seed,
                latent_dim: d,
                norms: path.norms(),
            };
            let json = serde_json::to_vec_pretty(&meta)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("metadata: {e}")))?;
            atomic_write(&out_dir.join("path.json"), &json)?;
            println!("wrote {} frames to {}", path.points.len(), out_dir.display());
            Ok(())
        }

        Command::Embed { model, i, j, out_dir } => {
            let checkpoint = load_checkpoint(&model)?;
            let images = embed_compose(&checkpoint.net, i, j)?;
            fs::create_dir_all(&out_dir)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("creating {}: {e}", out_dir.display())))?;
            for (name, tensor) in [
                ("first", &images.first),
                ("second", &images.second),
                ("combined", &images.combined),
            ] {
                write_frame(&out_dir, &format!("{name}.pgm"), tensor)?;
                write_tensor(out_dir.join(format!("{name}.glvt")), tensor)?;
            }
            println!("wrote embed probes ({i}, {j}) to {}", out_dir.display());
            Ok(())
        }

        Command::GenData { dataset, n, seed, out } => {
            let dataset = parse_dataset(&dataset)?;
            if n == 0 {
                return Err(CliError::usage("need at least one sample"));
            }
            let seed = resolve_seed(seed, None)?;
            let mut rng = Rng::from_seed(seed);
            let batch = dataset.sample_batch(&mut rng, n)?;
            write_tensor(&out, &batch)?;
            println!(
                "wrote {} samples of dim {} to {}",
                n,
                dataset.dim(),
                out.display()
            );
            Ok(())
        }
    }
}

#[derive(serde::Serialize)]
struct PathMetadata {
    mode: PathMode,
    steps: usize,
    seed: u64,
    latent_dim: usize,
    norms: Vec<f64>,
}
