use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ips2::cluster::Bandwidth;
use ips2::dataset::{write_csv, LabelColumn, Standardize};
use ips2::synthgen::{NoiseModel, USDATA1_NOISE_STD, USDATA2_DIM};
use ips2::{ClusterConfig, EmbedMode, Method};
use ips2_cli::bench::load_spec_dataset;
use ips2_cli::sweep::write_sweep;
use ips2_cli::{run_bench, run_sweep, write_bench, DataSource, ExperimentSpec, GeneratorSpec, HarnessError, SweepParam, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "ips2", version, about = "High-order pairwise similarity clustering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV with a `label` column.
    Gen {
        #[command(flatten)]
        generator: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to `<out-dir>/<dataset name>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = OUT_DIR_ENV, default_value = ips2_cli::DEFAULT_OUT_DIR)]
        out_dir: PathBuf,
    },
    /// Run methods repeatedly on one dataset and write a metrics report.
    Bench {
        /// Rerun a recorded `spec.json`; all data and config flags are ignored.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Labeled CSV input.
        #[arg(long, conflicts_with = "generator")]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "label")]
        label_column: LabelColumn,
        #[arg(long)]
        no_header: bool,
        #[command(flatten)]
        generator: OptGenArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a benchmark at each value of one generator parameter.
    Sweep {
        #[command(flatten)]
        generator: GenArgs,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorName {
    Usdata1,
    Usdata2,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    Uniform,
    Gaussian,
    Rayleigh,
    Gamma,
}

#[derive(Args, Clone)]
struct GenParams {
    /// Feature dimension (usdata2 defaults to 2360).
    #[arg(long)]
    dim: Option<usize>,
    /// usdata1 white-noise std.
    #[arg(long, default_value_t = USDATA1_NOISE_STD)]
    noise_std: f64,
    /// usdata2 third-cluster size.
    #[arg(long)]
    n3: Option<usize>,
    /// gaussian cluster sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// gaussian cluster means.
    #[arg(long, value_delimiter = ',')]
    means: Vec<f64>,
    /// gaussian cluster std.
    #[arg(long, default_value_t = 0.5)]
    std: f64,
    /// Additive noise with the standard parameters of the chosen model.
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    generator: GeneratorName,
    #[command(flatten)]
    params: GenParams,
}

#[derive(Args)]
struct OptGenArgs {
    #[arg(long, value_enum)]
    generator: Option<GeneratorName>,
    #[command(flatten)]
    params: GenParams,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_delimiter = ',', default_values = ["sc", "ppc", "ips2"])]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of clusters; defaults to the number of label classes.
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    sigma_t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Fixed kernel bandwidth instead of the median distance.
    #[arg(long)]
    sigma_s: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, value_enum)]
    embed_mode: Option<EmbedArg>,
    #[arg(long)]
    zscore: bool,
    /// Draw a fresh generator dataset for every seed.
    #[arg(long)]
    resample: bool,
    /// Dump S, V, U and their histograms for the first seed.
    #[arg(long)]
    dump: bool,
    #[arg(long, env = OUT_DIR_ENV, default_value = ips2_cli::DEFAULT_OUT_DIR)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedArg {
    Spectral,
    Rows,
}

fn generator_spec(name: GeneratorName, p: &GenParams) -> Result<GeneratorSpec, HarnessError> {
    let need = |what: &str| HarnessError::Usage(format!("--{what} is required for this generator"));
    Ok(match name {
        GeneratorName::Usdata1 => GeneratorSpec::Usdata1 { dim: p.dim.ok_or_else(|| need("dim"))?, noise_std: p.noise_std },
        GeneratorName::Usdata2 => GeneratorSpec::Usdata2 { n3: p.n3.ok_or_else(|| need("n3"))?, dim: p.dim.unwrap_or(USDATA2_DIM) },
        GeneratorName::Gaussian => {
            if p.sizes.is_empty() || p.means.is_empty() {
                return Err(need("sizes and --means"));
            }
            GeneratorSpec::Gaussian { sizes: p.sizes.clone(), means: p.means.clone(), std: p.std, dim: p.dim.ok_or_else(|| need("dim"))? }
        }
    })
}

fn noise_model(p: &GenParams) -> Option<NoiseModel> {
    p.noise.map(|k| {
        let name = match k {
            NoiseKind::Uniform => "uniform",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Rayleigh => "rayleigh",
            NoiseKind::Gamma => "gamma",
        };
        NoiseModel::standard(name).expect("known noise model")
    })
}

fn build_spec(data: DataSource, run: &RunArgs) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = ExperimentSpec { data, methods: run.methods.clone(), config: ClusterConfig::new(0), repeats: run.repeats, seed: run.seed, dump: run.dump };
    let c = match run.c {
        Some(c) => c,
        None => match &spec.data {
            DataSource::Generator { generator, .. } => generator.n_classes(),
            DataSource::Csv { .. } => {
                let d = load_spec_dataset(&spec)?;
                d.n_classes().ok_or_else(|| HarnessError::Usage(format!("dataset '{}' has no labels; metrics need ground truth", d.name)))?
            }
        },
    };
    let cfg = &mut spec.config;
    *cfg = ClusterConfig::new(c);
    cfg.seed = run.seed;
    if let Some(k) = run.k {
        cfg.k = k;
    }
    if let Some(v) = run.sigma_t {
        cfg.sigma_t = v;
    }
    if let Some(v) = run.eps {
        cfg.eps = v;
    }
    if let Some(v) = run.sigma_s {
        cfg.kernel_bandwidth = Bandwidth::Fixed(v);
    }
    if let Some(v) = run.restarts {
        cfg.restarts = v;
    }
    if let Some(m) = run.embed_mode {
        cfg.embed_mode = match m {
            EmbedArg::Spectral => EmbedMode::Spectral,
            EmbedArg::Rows => EmbedMode::Rows,
        };
    }
    if run.zscore {
        cfg.standardize = Standardize::Zscore;
    }
    spec.validate()?;
    Ok(spec)
}

fn report_failures(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("some runs failed; see the report");
        ExitCode::from(1)
    }
}

fn execute(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Gen { generator, seed, out, out_dir } => {
            let spec = generator_spec(generator.generator, &generator.params)?;
            let data = DataSource::Generator { generator: spec, noise: noise_model(&generator.params), resample_per_run: false };
            let d = ips2_cli::gen::dataset_for_run(&data, seed, seed)?;
            let path = out.unwrap_or_else(|| out_dir.join(format!("{}.csv", d.name)));
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| HarnessError::Io { path: parent.to_path_buf(), source })?;
            }
            write_csv(&d, &path)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { spec, csv, label_column, no_header, generator, run } => {
            let spec = match (spec, csv, generator.generator) {
                (Some(path), _, _) => ExperimentSpec::load(&path)?,
                (None, Some(path), _) => build_spec(DataSource::Csv { path, label_column, has_header: !no_header }, &run)?,
                (None, None, Some(name)) => {
                    let g = generator_spec(name, &generator.params)?;
                    build_spec(DataSource::Generator { generator: g, noise: noise_model(&generator.params), resample_per_run: run.resample }, &run)?
                }
                (None, None, None) => return Err(HarnessError::Usage("one of --spec, --csv or --generator is required".into())),
            };
            let outcome = run_bench(&spec)?;
            write_bench(&outcome, &run.out_dir)?;
            for s in &outcome.report.summary {
                let acc = s.metrics.iter().find(|m| m.name == "acc");
                match acc {
                    Some(a) => println!("{:<5} acc {:.4} ± {:.4} ({} ok, {} failed)", s.method, a.mean, a.std, s.ok_runs, s.failed_runs),
                    None => println!("{:<5} no successful runs", s.method),
                }
            }
            Ok(report_failures(outcome.all_ok()))
        }
        Command::Sweep { generator, param, values, run } => {
            let g = generator_spec(generator.generator, &generator.params)?;
            let base = build_spec(DataSource::Generator { generator: g, noise: noise_model(&generator.params), resample_per_run: run.resample }, &run)?;
            let points = run_sweep(&base, param, &values)?;
            write_sweep(param, &points, &run.out_dir)?;
            let rows: Vec<_> = points.iter().map(|(r, _)| r.clone()).collect();
            print!("{}", ips2_cli::sweep::sweep_table(param, &rows));
            Ok(report_failures(points.iter().all(|(_, o)| o.all_ok())))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, HarnessError::Usage(_)) { 2 } else { 1 })
        }
    }
}
