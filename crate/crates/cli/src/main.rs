use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::{CliError, Settings};

#[derive(Parser, Debug)]
#[command(name = "fdim", version, about = "Fractal dimension laboratory")]
struct Cli {
    /// Plain `key=value` file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a fractal point set.
    Generate(GenerateArgs),
    /// Box-counting dimension of a point set.
    Boxdim(BoxdimArgs),
    /// Compression-based point density of one point.
    Kdim(KdimArgs),
    /// Random-translation intersection campaign.
    Intersect(IntersectArgs),
    /// Random rigid-motion intersection campaign.
    Motion(MotionArgs),
    /// Product dimension chain and count identity.
    Product(ProductArgs),
    /// Chain-rule campaign on generated point pairs.
    Chain(ChainArgs),
    /// Point densities of set members against the set's dimension.
    Probe(ProbeArgs),
    /// Measure the compressor constants and write the calibration file.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// koch, cantor, sierpinski or ifs
    #[arg(long)]
    fractal: Option<String>,
    #[arg(long)]
    order: Option<u32>,
    #[arg(long)]
    depth: Option<u32>,
    /// Cantor contraction ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Map file for `--fractal ifs`.
    #[arg(long)]
    ifs: Option<PathBuf>,
    #[arg(long)]
    precision: Option<u32>,
    /// `.csv` writes text, anything else the binary format.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BoxdimArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    rmin: Option<u32>,
    #[arg(long)]
    rmax: Option<u32>,
    /// Pick the straightest scale range inside [rmin, rmax].
    #[arg(long)]
    auto: bool,
    /// Precision used when reading CSV input.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct KdimArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Member of the input set to examine.
    #[arg(long)]
    index: Option<usize>,
    /// Use a generated point with this many bits instead of an input file.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    rmax: Option<usize>,
    #[arg(long)]
    calibration: Option<PathBuf>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    #[arg(long)]
    e: Option<PathBuf>,
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    rmin: Option<u32>,
    #[arg(long)]
    rmax: Option<u32>,
    /// Primary thickening at the finest scale; the sweep adds half and double.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    allowed_fraction: Option<f64>,
    #[arg(long)]
    box_scale: Option<f64>,
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct IntersectArgs {
    #[command(flatten)]
    common: CampaignArgs,
    /// Read upper slopes on both sides of the bound.
    #[arg(long)]
    packing: bool,
}

#[derive(Args, Debug)]
struct MotionArgs {
    #[command(flatten)]
    common: CampaignArgs,
    /// Similarity ratio composed with each rotation.
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args, Debug)]
struct ProductArgs {
    #[arg(long)]
    e: Option<PathBuf>,
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    rmin: Option<u32>,
    #[arg(long)]
    rmax: Option<u32>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    cap: Option<u64>,
    /// Known dimension of the product; each rung is compared to it.
    #[arg(long)]
    oracle: Option<f64>,
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    count: Option<usize>,
    /// Bits per generated coordinate.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    allowed_fraction: Option<f64>,
    #[arg(long)]
    calibration: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    rmin: Option<u32>,
    #[arg(long)]
    rmax: Option<u32>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(T::to_string)
}

fn p(v: &Option<PathBuf>) -> Option<String> {
    v.as_ref().map(|p| p.display().to_string())
}

fn b(v: bool) -> Option<String> {
    v.then(|| "true".to_string())
}

fn campaign_pairs(a: &CampaignArgs) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("e", p(&a.e)),
        ("f", p(&a.f)),
        ("count", s(&a.count)),
        ("r_min", s(&a.rmin)),
        ("r_max", s(&a.rmax)),
        ("delta", s(&a.delta)),
        ("tolerance", s(&a.tolerance)),
        ("allowed_fraction", s(&a.allowed_fraction)),
        ("box_scale", s(&a.box_scale)),
        ("window", s(&a.window)),
        ("precision", s(&a.precision)),
        ("out", p(&a.out)),
        ("seed", s(&a.seed)),
    ]
}

fn keys(pairs: &[(&'static str, Option<String>)]) -> Vec<&'static str> {
    pairs.iter().map(|(k, _)| *k).collect()
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (name, pairs): (&str, Vec<(&'static str, Option<String>)>) = match &cli.command {
        Command::Generate(a) => (
            "generate",
            vec![
                ("fractal", s(&a.fractal)),
                ("order", s(&a.order)),
                ("depth", s(&a.depth)),
                ("ratio", s(&a.ratio)),
                ("ifs", p(&a.ifs)),
                ("precision", s(&a.precision)),
                ("out", p(&a.out)),
                ("seed", s(&a.seed)),
            ],
        ),
        Command::Boxdim(a) => (
            "boxdim",
            vec![
                ("in", p(&a.input)),
                ("r_min", s(&a.rmin)),
                ("r_max", s(&a.rmax)),
                ("auto", b(a.auto)),
                ("precision", s(&a.precision)),
                ("out", p(&a.out)),
                ("seed", s(&a.seed)),
            ],
        ),
        Command::Kdim(a) => (
            "kdim",
            vec![
                ("in", p(&a.input)),
                ("index", s(&a.index)),
                ("random", s(&a.random)),
                ("r_max", s(&a.rmax)),
                ("calibration", p(&a.calibration)),
                ("precision", s(&a.precision)),
                ("out", p(&a.out)),
                ("seed", s(&a.seed)),
            ],
        ),
        Command::Intersect(a) => {
            let mut v = campaign_pairs(&a.common);
            v.push(("packing", b(a.packing)));
            ("intersect", v)
        }
        Command::Motion(a) => {
            let mut v = campaign_pairs(&a.common);
            v.push(("scale", s(&a.scale)));
            ("motion", v)
        }
        Command::Product(a) => (
            "product",
            vec![
                ("e", p(&a.e)),
                ("f", p(&a.f)),
                ("r_min", s(&a.rmin)),
                ("r_max", s(&a.rmax)),
                ("tolerance", s(&a.tolerance)),
                ("cap", s(&a.cap)),
                ("oracle", s(&a.oracle)),
                ("window", s(&a.window)),
                ("precision", s(&a.precision)),
                ("out", p(&a.out)),
                ("seed", s(&a.seed)),
            ],
        ),
        Command::Chain(a) => (
            "chain",
            vec![
                ("count", s(&a.count)),
                ("length", s(&a.length)),
                ("allowed_fraction", s(&a.allowed_fraction)),
                ("calibration", p(&a.calibration)),
                ("out", p(&a.out)),
                ("seed", s(&a.seed)),
            ],
        ),
        Command::Probe(a) => (
            "probe",
            vec![
                ("in", p(&a.input)),
                ("count", s(&a.count)),
                ("r_min", s(&a.rmin)),
                ("r_max", s(&a.rmax)),
                ("precision", s(&a.precision)),
                ("out", p(&a.out)),
                ("seed", s(&a.seed)),
            ],
        ),
        Command::Calibrate(a) => ("calibrate", vec![("out", p(&a.out)), ("seed", s(&a.seed))]),
    };
    let valid = keys(&pairs);
    let settings = Settings::build(name, &valid, cli.config.as_deref(), pairs)?;
    let (line, success) = commands::run(&settings)?;
    println!("{line}");
    if success {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
