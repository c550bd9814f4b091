//! Command-line harness: phantom generation, mask generation, single
//! reconstructions, parameter sweeps, metric evaluation, and PGM export.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on usage errors (clap).

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ewrecon::edges::{magnitude, Detector, DetectorConfig};
use ewrecon::fourier::{apply_mask, fft2_centered};
use ewrecon::grid::{
    parse_grid, read_edgemap, read_image, read_mask, write_edgemap, write_image, write_mask,
    AnyGrid, ComplexImage, EdgeWeightMap, KSpaceGrid, RealGrid, SamplingMask,
};
use ewrecon::masks::{cartesian_mask, random2d_mask};
use ewrecon::metrics::{psnr, rlne, PsnrMode};
use ewrecon::pgm::{export_pgm, PgmScaling};
use ewrecon::phantom::{add_phase_ramp, piecewise_phantom, shepp_logan};
use ewrecon::solver::{pfista_reconstruct, EdgeMode, SolverConfig};
use ewrecon::threshold::ThresholdConfig;

type CliError = Box<dyn std::error::Error>;

const CSV_HEADER: &str =
    "method,detector,mask_kind,mask_param,seed,lambda_gamma,iters,rlne,psnr_std,psnr_paper,seconds";

#[derive(Parser)]
#[command(name = "ewrecon", version)]
#[command(about = "Edge-weighted pFISTA reconstruction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a phantom image (plus its oracle edge map for piecewise)
    Phantom(PhantomArgs),
    /// Generate an undersampling mask
    Mask(MaskArgs),
    /// Reconstruct one retrospectively undersampled phantom
    Recon(ReconArgs),
    /// Sweep methods x masks x thresholds and write a CSV table
    Experiment(ExperimentArgs),
    /// Print metrics between a reference and a reconstruction grid file
    Eval(EvalArgs),
    /// Export a grid file as a binary PGM image
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhantomKind {
    Shepp,
    Piecewise,
}

#[derive(Args)]
struct PhantomArgs {
    /// Phantom kind
    #[arg(long, value_enum)]
    kind: PhantomKind,
    /// Image side length in pixels
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Region count including the background (piecewise only)
    #[arg(long, default_value_t = 5)]
    regions: usize,
    /// RNG seed for region placement (piecewise only)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add a linear phase ramp so the phantom is genuinely complex-valued
    #[arg(long)]
    phase_ramp: bool,
    /// Output image path
    #[arg(long)]
    out: PathBuf,
    /// Oracle edge map output path (piecewise only)
    #[arg(long)]
    edges: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MaskKindArg {
    Cartesian,
    Random2d,
}

#[derive(Args)]
struct MaskArgs {
    /// Mask kind
    #[arg(long, value_enum)]
    kind: MaskKindArg,
    /// Mask side length in pixels
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Acceleration factor (cartesian only)
    #[arg(long)]
    af: Option<f64>,
    /// Sampling rate (random2d only)
    #[arg(long)]
    rate: Option<f64>,
    /// Fraction of the grid kept fully sampled at the center
    #[arg(long, default_value_t = 0.04)]
    center_fraction: f64,
    /// RNG seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output mask path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EdgeArg {
    None,
    Detected,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectorArg {
    Tv,
    Sobel,
    Canny,
}

impl From<DetectorArg> for Detector {
    fn from(d: DetectorArg) -> Self {
        match d {
            DetectorArg::Tv => Detector::Tv,
            DetectorArg::Sobel => Detector::Sobel,
            DetectorArg::Canny => Detector::Canny,
        }
    }
}

#[derive(Args)]
struct ReconArgs {
    /// Reference image; measurements are simulated as mask .* fft2(reference)
    #[arg(long)]
    image: PathBuf,
    /// Sampling mask path
    #[arg(long)]
    mask: PathBuf,
    /// Edge weighting mode
    #[arg(long, value_enum, default_value_t = EdgeArg::None)]
    edge: EdgeArg,
    /// Edge detector (edge=detected)
    #[arg(long, value_enum, default_value_t = DetectorArg::Tv)]
    detector: DetectorArg,
    /// Oracle edge map path (edge=oracle)
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Regularization weight lambda
    #[arg(long, default_value_t = 1e-4)]
    lambda: f64,
    /// Gradient step size gamma
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Weight offset epsilon
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Iteration count
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Haar decomposition levels
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Output reconstruction path
    #[arg(long)]
    out: PathBuf,
    /// Error map |x - xhat| output path (default: out path with .err.ewp)
    #[arg(long)]
    err_out: Option<PathBuf>,
    /// Also export the reconstruction magnitude as a PGM image
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Append a metrics row to this CSV file (header written when new)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Phantom kind
    #[arg(long, value_enum, default_value_t = PhantomKind::Piecewise)]
    phantom: PhantomKind,
    /// Image side length in pixels
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Region count including the background (piecewise only)
    #[arg(long, default_value_t = 6)]
    regions: usize,
    /// Phantom placement seed (piecewise only)
    #[arg(long, default_value_t = 12345)]
    phantom_seed: u64,
    /// Mask descriptors, e.g. cartesian:af=6:cf=0.04:seed=1 or
    /// random2d:rate=0.18:cf=0.04:seed=1 or full
    #[arg(long, value_delimiter = ',', required = true)]
    masks: Vec<String>,
    /// Methods to run
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "uniform,oracle-edge,tv-edge,sobel-edge,canny-edge"
    )]
    methods: Vec<String>,
    /// Lambda*gamma sweep: comma-separated values, or log:<lo>:<hi>:<n>
    #[arg(long, default_value = "1e-4")]
    lambdas: String,
    /// Iteration count per run
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Haar decomposition levels
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Output CSV path (overwritten)
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference image path
    #[arg(long)]
    reference: PathBuf,
    /// Reconstruction image path
    #[arg(long)]
    reconstruction: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScalingArg {
    Minmax,
    Absolute01,
}

#[derive(Args)]
struct ExportArgs {
    /// Input grid path (any kind; complex grids export their magnitude)
    #[arg(long)]
    input: PathBuf,
    /// Output PGM path
    #[arg(long)]
    out: PathBuf,
    /// Gray-level scaling
    #[arg(long, value_enum, default_value_t = ScalingArg::Minmax)]
    scaling: ScalingArg,
}

/// One CSV row. The seconds field is left empty so repeated invocations are
/// byte-identical; wall-clock timings go to stdout instead.
struct CsvRow {
    method: &'static str,
    detector: &'static str,
    mask_kind: String,
    mask_param: f64,
    seed: u64,
    lambda_gamma: f64,
    iters: usize,
    rlne: f64,
    psnr_std: f64,
    psnr_paper: f64,
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{},",
            self.method,
            self.detector,
            self.mask_kind,
            self.mask_param,
            self.seed,
            self.lambda_gamma,
            self.iters,
            self.rlne,
            self.psnr_std,
            self.psnr_paper
        )
    }
}

fn method_labels(edge: EdgeMode, det: Detector) -> (&'static str, &'static str) {
    match edge {
        EdgeMode::None => ("uniform", "none"),
        EdgeMode::Oracle => ("oracle-edge", "none"),
        EdgeMode::Detected => match det {
            Detector::Tv => ("tv-edge", "tv"),
            Detector::Sobel => ("sobel-edge", "sobel"),
            Detector::Canny => ("canny-edge", "canny"),
        },
    }
}

fn append_csv_row(path: &Path, row: &CsvRow) -> Result<(), CliError> {
    let mut body = match fs::read_to_string(path) {
        Ok(existing) => existing,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => format!("{CSV_HEADER}\n"),
        Err(e) => return Err(e.into()),
    };
    body.push_str(&row.to_string());
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

fn simulate(reference: &ComplexImage, mask: &SamplingMask) -> Result<KSpaceGrid, CliError> {
    Ok(apply_mask(&fft2_centered(reference), mask)?)
}

fn run_phantom(args: PhantomArgs) -> Result<(), CliError> {
    let (image, oracle) = match args.kind {
        PhantomKind::Shepp => {
            if args.edges.is_some() {
                return Err("--edges requires --kind piecewise".into());
            }
            (shepp_logan(args.size)?, None)
        }
        PhantomKind::Piecewise => {
            let (image, oracle) = piecewise_phantom(args.size, args.regions, args.seed)?;
            (image, Some(oracle))
        }
    };
    let image = if args.phase_ramp {
        add_phase_ramp(&image)
    } else {
        image
    };
    write_image(&image, &args.out)?;
    if let (Some(path), Some(oracle)) = (&args.edges, &oracle) {
        write_edgemap(&oracle.to_real(), path)?;
    }
    println!("wrote {}x{} phantom to {}", image.height(), image.width(), args.out.display());
    Ok(())
}

fn run_mask(args: MaskArgs) -> Result<(), CliError> {
    let mask = match args.kind {
        MaskKindArg::Cartesian => {
            let af = args.af.ok_or("--kind cartesian requires --af")?;
            cartesian_mask(args.size, args.size, af, args.center_fraction, args.seed)?
        }
        MaskKindArg::Random2d => {
            let rate = args.rate.ok_or("--kind random2d requires --rate")?;
            random2d_mask(args.size, args.size, rate, args.center_fraction, args.seed)?
        }
    };
    write_mask(&mask, &args.out)?;
    println!(
        "wrote {} mask with {} samples (rate {:.4}) to {}",
        mask.kind.as_str(),
        mask.ones(),
        mask.rate(),
        args.out.display()
    );
    Ok(())
}

fn run_recon(args: ReconArgs) -> Result<(), CliError> {
    let reference = read_image(&args.image)?;
    let mask = read_mask(&args.mask)?;
    let y = simulate(&reference, &mask)?;
    let oracle = match &args.oracle {
        Some(path) => Some(EdgeWeightMap::from_real(&read_edgemap(path)?)?),
        None => None,
    };
    let edge_mode = match args.edge {
        EdgeArg::None => EdgeMode::None,
        EdgeArg::Detected => EdgeMode::Detected,
        EdgeArg::Oracle => EdgeMode::Oracle,
    };
    let cfg = SolverConfig {
        iterations: args.iters,
        threshold: ThresholdConfig {
            lambda: args.lambda,
            gamma: args.gamma,
            epsilon: args.epsilon,
        },
        levels: args.levels,
        edge_mode,
        detector: DetectorConfig {
            detector: args.detector.into(),
            ..DetectorConfig::default()
        },
        track_objective: false,
        ..SolverConfig::default()
    };
    let result = pfista_reconstruct(&y, &mask, &cfg, Some(&reference), oracle.as_ref())?;

    write_image(&result.image, &args.out)?;
    let err_path = args
        .err_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("err.ewp"));
    let err_data: Vec<f64> = reference
        .data()
        .iter()
        .zip(result.image.data())
        .map(|(a, b)| (a - b).norm())
        .collect();
    let err_map = RealGrid::new(reference.height(), reference.width(), err_data)?;
    write_edgemap(&err_map, &err_path)?;
    if let Some(pgm_path) = &args.pgm {
        export_pgm(&magnitude(&result.image), pgm_path, PgmScaling::MinMax)?;
    }

    let rlne_val = rlne(&reference, &result.image)?;
    let psnr_std = psnr(&reference, &result.image, PsnrMode::Standard)?;
    let psnr_paper = psnr(&reference, &result.image, PsnrMode::PaperLiteral)?;
    let (method, detector) = method_labels(edge_mode, args.detector.into());
    println!(
        "{method} rlne={rlne_val:.6} psnr_std={psnr_std:.3} psnr_paper={psnr_paper:.3} ({:.2}s)",
        result.elapsed_seconds
    );
    if let Some(csv) = &args.csv {
        append_csv_row(
            csv,
            &CsvRow {
                method,
                detector,
                mask_kind: mask.kind.as_str().to_string(),
                mask_param: mask.nominal_rate,
                seed: mask.seed,
                lambda_gamma: args.lambda * args.gamma,
                iters: args.iters,
                rlne: rlne_val,
                psnr_std,
                psnr_paper,
            },
        )?;
    }
    Ok(())
}

/// Parsed `--masks` descriptor: the mask plus the CSV-facing parameter
/// (acceleration factor or rate).
struct MaskSpec {
    mask: SamplingMask,
    param: f64,
}

fn parse_mask_descriptor(desc: &str, size: usize) -> Result<MaskSpec, CliError> {
    let mut parts = desc.split(':');
    let kind = parts.next().unwrap_or_default();
    let mut af = None;
    let mut rate = None;
    let mut cf = 0.04;
    let mut seed = 1u64;
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad mask descriptor field {part:?} in {desc:?}"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("bad number {value:?} in mask descriptor {desc:?}"))?;
        match key {
            "af" => af = Some(value),
            "rate" => rate = Some(value),
            "cf" => cf = value,
            "seed" => seed = value as u64,
            _ => return Err(format!("unknown mask descriptor key {key:?} in {desc:?}").into()),
        }
    }
    match kind {
        "cartesian" => {
            let af = af.ok_or_else(|| format!("mask descriptor {desc:?} needs af="))?;
            Ok(MaskSpec {
                mask: cartesian_mask(size, size, af, cf, seed)?,
                param: af,
            })
        }
        "random2d" => {
            let rate = rate.ok_or_else(|| format!("mask descriptor {desc:?} needs rate="))?;
            Ok(MaskSpec {
                mask: random2d_mask(size, size, rate, cf, seed)?,
                param: rate,
            })
        }
        "full" => Ok(MaskSpec {
            mask: SamplingMask::full(size, size)?,
            param: 1.0,
        }),
        other => Err(format!("unknown mask kind {other:?} in descriptor {desc:?}").into()),
    }
}

fn parse_method(name: &str) -> Result<(EdgeMode, Detector), CliError> {
    match name {
        "uniform" => Ok((EdgeMode::None, Detector::Tv)),
        "oracle-edge" => Ok((EdgeMode::Oracle, Detector::Tv)),
        "tv-edge" => Ok((EdgeMode::Detected, Detector::Tv)),
        "sobel-edge" => Ok((EdgeMode::Detected, Detector::Sobel)),
        "canny-edge" => Ok((EdgeMode::Detected, Detector::Canny)),
        other => Err(format!("unknown method {other:?}").into()),
    }
}

fn parse_lambdas(spec: &str) -> Result<Vec<f64>, CliError> {
    if let Some(grid) = spec.strip_prefix("log:") {
        let fields: Vec<&str> = grid.split(':').collect();
        if fields.len() != 3 {
            return Err(format!("bad lambda grid {spec:?}, expected log:<lo>:<hi>:<n>").into());
        }
        let lo: f64 = fields[0].parse()?;
        let hi: f64 = fields[1].parse()?;
        let n: usize = fields[2].parse()?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(format!("bad lambda grid {spec:?}").into());
        }
        let (l, h) = (lo.ln(), hi.ln());
        Ok((0..n)
            .map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
            .collect())
    } else {
        spec.split(',')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| format!("bad lambda value {v:?}").into())
            })
            .collect()
    }
}

fn run_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let (reference, oracle) = match args.phantom {
        PhantomKind::Shepp => (shepp_logan(args.size)?, None),
        PhantomKind::Piecewise => {
            let (image, oracle) = piecewise_phantom(args.size, args.regions, args.phantom_seed)?;
            (image, Some(oracle))
        }
    };
    let masks: Vec<MaskSpec> = args
        .masks
        .iter()
        .map(|d| parse_mask_descriptor(d, args.size))
        .collect::<Result<_, _>>()?;
    let methods: Vec<(EdgeMode, Detector)> = args
        .methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<Result<_, _>>()?;
    let lambdas = parse_lambdas(&args.lambdas)?;
    let measurements: Vec<KSpaceGrid> = masks
        .iter()
        .map(|spec| simulate(&reference, &spec.mask))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for &(edge_mode, det) in &methods {
        if edge_mode == EdgeMode::Oracle && oracle.is_none() {
            return Err("method oracle-edge requires --phantom piecewise".into());
        }
        for (spec, y) in masks.iter().zip(&measurements) {
            for &lambda in &lambdas {
                let cfg = SolverConfig {
                    iterations: args.iters,
                    threshold: ThresholdConfig {
                        lambda,
                        ..ThresholdConfig::default()
                    },
                    levels: args.levels,
                    edge_mode,
                    detector: DetectorConfig {
                        detector: det,
                        ..DetectorConfig::default()
                    },
                    track_objective: false,
                    ..SolverConfig::default()
                };
                let result =
                    pfista_reconstruct(y, &spec.mask, &cfg, Some(&reference), oracle.as_ref())?;
                let rlne_val = rlne(&reference, &result.image)?;
                let (method, detector) = method_labels(edge_mode, det);
                println!(
                    "{method} {} param={} lambda={lambda:.3e} rlne={rlne_val:.6} ({:.2}s)",
                    spec.mask.kind.as_str(),
                    spec.param,
                    result.elapsed_seconds
                );
                rows.push(CsvRow {
                    method,
                    detector,
                    mask_kind: spec.mask.kind.as_str().to_string(),
                    mask_param: spec.param,
                    seed: spec.mask.seed,
                    lambda_gamma: lambda,
                    iters: args.iters,
                    rlne: rlne_val,
                    psnr_std: psnr(&reference, &result.image, PsnrMode::Standard)?,
                    psnr_paper: psnr(&reference, &result.image, PsnrMode::PaperLiteral)?,
                });
            }
        }
    }

    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for row in &rows {
        body.push_str(&row.to_string());
        body.push('\n');
    }
    fs::write(&args.csv, body)?;
    println!("wrote {} rows to {}", rows.len(), args.csv.display());
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<(), CliError> {
    let reference = read_image(&args.reference)?;
    let reconstruction = read_image(&args.reconstruction)?;
    println!("rlne={}", rlne(&reference, &reconstruction)?);
    println!(
        "psnr_std={}",
        psnr(&reference, &reconstruction, PsnrMode::Standard)?
    );
    println!(
        "psnr_paper={}",
        psnr(&reference, &reconstruction, PsnrMode::PaperLiteral)?
    );
    Ok(())
}

fn run_export(args: ExportArgs) -> Result<(), CliError> {
    let bytes = fs::read(&args.input)?;
    let real = match parse_grid(&bytes)? {
        AnyGrid::Image(image) => magnitude(&image),
        AnyGrid::KSpace(kspace) => {
            let data = kspace.data().iter().map(|v| v.norm()).collect();
            RealGrid::new(kspace.height(), kspace.width(), data)?
        }
        AnyGrid::Mask(mask) => {
            let data = mask.cells().iter().map(|&c| c as f64).collect();
            RealGrid::new(mask.height(), mask.width(), data)?
        }
        AnyGrid::EdgeMap(map) => map,
    };
    let scaling = match args.scaling {
        ScalingArg::Minmax => PgmScaling::MinMax,
        ScalingArg::Absolute01 => PgmScaling::Absolute01,
    };
    export_pgm(&real, &args.out, scaling)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Phantom(args) => run_phantom(args),
        Command::Mask(args) => run_mask(args),
        Command::Recon(args) => run_recon(args),
        Command::Experiment(args) => run_experiment(args),
        Command::Eval(args) => run_eval(args),
        Command::Export(args) => run_export(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::FAILURE
        }
    }
}
