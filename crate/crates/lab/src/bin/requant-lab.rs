use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use requant_core::codec::{CodecConfig, ContentSpec, Prediction};
use requant_core::quantizer::MAX_QP;
use requant_core::requant::RequantConfig;
use requant_core::{CoefficientDomain, ErrorMetric, Rational, TieBreak, TransformSize};
use requant_lab::range::{parse_int_range, parse_range, parse_rational};
use requant_lab::table::{write_all_atomic, CsvDoc};
use requant_lab::verify::{self, VerifyConfig};
use requant_lab::{commands, pgm};

#[derive(Parser)]
#[command(
    name = "requant-lab",
    version,
    about = "Requantization error and transcoding experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-stage quantization error analysis.
    #[command(subcommand)]
    Requant(RequantCommand),
    /// Write a synthetic 8-bit test plane as binary PGM.
    GenContent {
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        complexity: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Direct-encoding rate/PSNR curve of one plane.
    RdCurve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "0:51:1", value_parser = qp_list)]
        qps: QpList,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Transcoding sweep with ratio profile and local-minimum report.
    CpdtSweep {
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, default_value = "0:51:1", value_parser = qp_list)]
        qp_s: QpList,
        #[arg(long, default_value = "0:51:1", value_parser = qp_list)]
        qp_t: QpList,
        #[arg(long, default_value_t = 0.05)]
        bin_width: f64,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the reproduction checks and print one line per check.
    Verify {
        /// Side of the square test planes.
        #[arg(long, default_value_t = 128)]
        size: usize,
        #[arg(long, default_value_t = 100_000)]
        transform_blocks: usize,
    },
}

#[derive(Subcommand)]
enum RequantCommand {
    /// Error ratio along the target step for one source step.
    Sweep {
        #[arg(long, value_parser = rational)]
        qstep_s: Rational,
        #[arg(long, value_parser = steps)]
        qstep_t: Steps,
        #[command(flatten)]
        quant: QuantArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Error ratio over a grid of source and target steps.
    Surface {
        #[arg(long, value_parser = steps)]
        qstep_s: Steps,
        #[arg(long, value_parser = steps)]
        qstep_t: Steps,
        #[command(flatten)]
        quant: QuantArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decision-boundary alignment for step pairs given as `S,T`.
    Overlap {
        #[arg(long, required = true, value_parser = step_pair)]
        steps: Vec<(Rational, Rational)>,
        #[command(flatten)]
        quant: QuantArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate offset and metric conventions against the published example.
    Audit {
        #[command(flatten)]
        quant: QuantArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct QuantArgs {
    /// Rounding offset as a decimal or `n/d`.
    #[arg(long, default_value = "0", value_parser = rational)]
    offset: Rational,
    #[arg(long, default_value = "mean-abs", value_parser = metric)]
    metric: ErrorMetric,
    #[arg(long, default_value = "-32768:32767", value_parser = domain, allow_hyphen_values = true)]
    domain: CoefficientDomain,
    #[arg(long, default_value = "toward-zero", value_parser = tie_break)]
    tie_break: TieBreak,
}

impl QuantArgs {
    fn config(&self) -> RequantConfig {
        RequantConfig {
            domain: self.domain,
            metric: self.metric,
            offset: self.offset,
            tie_break: self.tie_break,
        }
    }
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, default_value_t = 8, value_parser = block_size)]
    block_size: usize,
    #[arg(long, default_value = "1/3", value_parser = rational)]
    offset: Rational,
    #[arg(long, default_value = "intra", value_parser = prediction)]
    prediction: Prediction,
}

impl CodecArgs {
    fn config(&self) -> anyhow::Result<CodecConfig> {
        Ok(CodecConfig {
            block_size: TransformSize::from_len(self.block_size)?,
            offset: self.offset,
            prediction: self.prediction,
        })
    }
}

#[derive(Clone)]
struct Steps(Vec<Rational>);

#[derive(Clone)]
struct QpList(Vec<i32>);

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn block_size(s: &str) -> Result<usize, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("block size must be 4 or 8, got `{s}`")),
    }
}

fn steps(s: &str) -> Result<Steps, String> {
    parse_range(s).map(Steps).map_err(|e| e.to_string())
}

fn qp_list(s: &str) -> Result<QpList, String> {
    parse_int_range(s, 0, MAX_QP as i64)
        .map(|v| QpList(v.into_iter().map(|q| q as i32).collect()))
        .map_err(|e| e.to_string())
}

fn step_pair(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected S,T, got `{s}`"))?;
    Ok((rational(a)?, rational(b)?))
}

fn metric(s: &str) -> Result<ErrorMetric, String> {
    ErrorMetric::from_name(s).ok_or_else(|| format!("unknown metric `{s}` (mean-abs, rms, mse)"))
}

fn prediction(s: &str) -> Result<Prediction, String> {
    Prediction::from_name(s).ok_or_else(|| format!("unknown prediction `{s}` (none, intra)"))
}

fn tie_break(s: &str) -> Result<TieBreak, String> {
    match s {
        "toward-zero" => Ok(TieBreak::TowardZero),
        "away-from-zero" => Ok(TieBreak::AwayFromZero),
        _ => Err(format!(
            "unknown tie break `{s}` (toward-zero, away-from-zero)"
        )),
    }
}

fn domain(s: &str) -> Result<CoefficientDomain, String> {
    let bad = || format!("expected lo:hi integers, got `{s}`");
    let (lo, hi) = s.rsplit_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    CoefficientDomain::new(lo, hi).map_err(|e| e.to_string())
}

fn emit(doc: &CsvDoc, output: Option<&Path>) -> anyhow::Result<()> {
    let bytes = doc.to_bytes()?;
    match output {
        Some(p) => write_all_atomic(&[(p.to_path_buf(), bytes)])?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn run_requant(cmd: RequantCommand) -> anyhow::Result<()> {
    match cmd {
        RequantCommand::Sweep {
            qstep_s,
            qstep_t,
            quant,
            output,
        } => emit(
            &commands::requant_sweep(qstep_s, &qstep_t.0, &quant.config())?,
            output.as_deref(),
        ),
        RequantCommand::Surface {
            qstep_s,
            qstep_t,
            quant,
            output,
        } => emit(
            &commands::requant_surface(&qstep_s.0, &qstep_t.0, &quant.config())?,
            output.as_deref(),
        ),
        RequantCommand::Overlap {
            steps,
            quant,
            output,
        } => {
            let doc = commands::requant_overlap(&steps, &quant.config())?;
            if output.is_some() {
                for row in doc.rows() {
                    eprintln!(
                        "q_s {} q_t {}: aligned {} ({}/{}), max extra error {}",
                        row[0], row[1], row[3], row[4], row[5], row[8]
                    );
                }
            }
            emit(&doc, output.as_deref())
        }
        RequantCommand::Audit { quant, output } => emit(
            &commands::requant_audit(&quant.config())?,
            output.as_deref(),
        ),
    }
}

fn plane_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Requant(cmd) => run_requant(cmd)?,
        Command::GenContent {
            width,
            height,
            seed,
            complexity,
            output,
        } => {
            let bytes = commands::gen_content(&ContentSpec {
                seed,
                complexity,
                width,
                height,
            })?;
            write_all_atomic(&[(output, bytes)])?;
        }
        Command::RdCurve {
            input,
            qps,
            codec,
            output,
        } => {
            let plane = pgm::read(&input)?;
            emit(
                &commands::rd_curve(&plane, &qps.0, &codec.config()?)?,
                output.as_deref(),
            )?;
        }
        Command::CpdtSweep {
            input,
            qp_s,
            qp_t,
            bin_width,
            codec,
            out_dir,
        } => {
            let planes = input
                .iter()
                .map(|p| pgm::read(p))
                .collect::<Result<Vec<_>, _>>()?;
            let names: Vec<String> = input.iter().map(|p| plane_name(p)).collect();
            let out = commands::cpdt_sweep(
                &planes,
                &names,
                &qp_s.0,
                &qp_t.0,
                &codec.config()?,
                bin_width,
            )?;
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            write_all_atomic(&[
                (out_dir.join("records.csv"), out.records.to_bytes()?),
                (out_dir.join("profile.csv"), out.profile.to_bytes()?),
                (
                    out_dir.join("local_minimum.csv"),
                    out.local_minimum.to_bytes()?,
                ),
            ])?;
        }
        Command::Verify {
            size,
            transform_blocks,
        } => {
            let cfg = VerifyConfig {
                plane_size: size,
                transform_blocks,
                ..VerifyConfig::default()
            };
            let outcomes = verify::run_all(&cfg);
            for o in &outcomes {
                println!(
                    "{:>2} {} {:<38} {:>8.2}s  {}",
                    o.id,
                    if o.passed { "PASS" } else { "FAIL" },
                    o.title,
                    o.elapsed.as_secs_f64(),
                    o.detail
                );
            }
            return Ok(outcomes.iter().all(|o| o.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
