use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subtile::io::{run, AnalysisRequest, Command};

#[derive(Parser)]
#[command(name = "subtile", version, about = "Spectral and conjugacy analysis of substitution tilings")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Request file.
    file: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Matrix, eigenvalues, hypotheses and fixed-point data.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Classify the dynamical spectrum of the tiling space.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Comma-separated candidates k/2pi.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// Decide whether two length vectors give conjugate tiling spaces.
    Conjugacy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        max_word_len: Option<usize>,
    },
    /// List repetition vectors and their families.
    Repvecs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<String>,
        #[arg(long)]
        max_word_len: Option<usize>,
    },
    /// Draw a window of the tiling.
    Render {
        #[command(flatten)]
        common: Common,
        /// Window as t0:t1.
        #[arg(long)]
        window: Option<String>,
        /// svg or text.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        supertiles: Option<u32>,
    },
}

fn load(common: &Common, command: Command, settings: &[(&str, Option<String>)]) -> subtile::Result<AnalysisRequest> {
    let mut req = AnalysisRequest::from_file(&common.file)?;
    req.command = command;
    for (k, v) in settings {
        if let Some(v) = v {
            req.budget.set(k, v)?;
        }
    }
    req.budget.check()?;
    Ok(req)
}

fn execute(req: &AnalysisRequest, json: Option<&Path>) -> subtile::Result<i32> {
    let report = run(req)?;
    print!("{}", report.summary());
    if let Some(path) = json {
        std::fs::write(path, report.to_json())?;
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let s = |x: &Option<u32>| x.map(|v| v.to_string());
    let (common, req) = match &cli.command {
        Cmd::Analyze { common } => (common, load(common, Command::Analyze, &[])),
        Cmd::Spectrum { common, k, m_max } => {
            (common, load(common, Command::Spectrum, &[("candidates", k.clone()), ("m_max", s(m_max))]))
        }
        Cmd::Conjugacy { common, degree, delta, max_word_len } => (
            common,
            load(
                common,
                Command::Conjugacy,
                &[
                    ("degree", degree.clone()),
                    ("delta", delta.map(|d| d.to_string())),
                    ("max_word_len", max_word_len.map(|w| w.to_string())),
                ],
            ),
        ),
        Cmd::Repvecs { common, degree, max_word_len } => (
            common,
            load(
                common,
                Command::Repvecs,
                &[("degree", degree.clone()), ("max_word_len", max_word_len.map(|w| w.to_string()))],
            ),
        ),
        Cmd::Render { common, window, format, supertiles } => (
            common,
            load(
                common,
                Command::Render,
                &[("window", window.clone()), ("format", format.clone()), ("supertiles", s(supertiles))],
            ),
        ),
    };
    match req.and_then(|r| execute(&r, common.json.as_deref())) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
