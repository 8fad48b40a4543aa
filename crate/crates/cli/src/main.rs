use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use strata_bench::classifiers::{Classifier, ModelFile};
use strata_bench::evaluator::{accuracy, run_cell, run_grid, CellKey, CellOptions, ExperimentReport, GridConfig};
use strata_bench::io::write_atomic;
use strata_bench::parser::{load_dictionary, parse_records, DEFAULT_BATCH_SIZE};
use strata_bench::preprocess::{run_pipeline, MetastasisMapping, PreprocessConfig};
use strata_bench::report::{emit_report, ReportFormat};
use strata_bench::sampler::{balanced_stratified_sample, sample, SamplingPlan, Strategy, DEFAULT_MINORITY_RATIO};
use strata_bench::synthgen::{default_profile, generate, mix, MixPart, SynthSpec};
use strata_bench::Dataset;

const SEED_ENV: &str = "STRATA_BENCH_SEED";

#[derive(Parser)]
#[command(
    name = "strata-bench",
    version,
    about = "Sampling and classification benchmark harness"
)]
struct Cli {
    /// Master seed. Falls back to the config file, then STRATA_BENCH_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse fixed-width records into a dataset CSV.
    Parse {
        /// Data dictionary describing the record layout.
        #[arg(long)]
        dict: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive labels and filter attributes.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Preprocessing config (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Label column; overrides the config.
        #[arg(long)]
        label: Option<String>,
    },
    /// Draw a sample.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "balanced")]
        strategy: Strategy,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        label: Option<String>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Train a classifier and save the model.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        label: Option<String>,
        /// DT, NB or KNN, optionally with parameters, e.g. `KNN(k=5)`.
        #[arg(long, default_value = "DT")]
        classifier: Classifier,
    },
    /// Score a saved model, or run one evaluation cell.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        /// Saved model to score on the input.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Write the cell summary CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        label: Option<String>,
        #[arg(long, default_value = "balanced")]
        strategy: Strategy,
        #[arg(long, default_value = "DT")]
        classifier: Classifier,
        /// Sample size per iteration.
        #[arg(long)]
        n: Option<usize>,
        /// Grid config supplying split ratio, iterations and sampling options.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the experiment grid.
    Grid {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for results.csv, summary.csv and report.md.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Generate a synthetic dataset.
    Synth {
        /// Generator spec; the built-in profile when absent.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Row count; overrides the spec.
        #[arg(long)]
        n: Option<usize>,
        /// Write the spec that was used instead of generating data.
        #[arg(long)]
        print_spec: bool,
    },
    /// Combine random subsets of datasets, tagging each row's source.
    Mix {
        /// Input dataset, as `path` or `id=path`; repeat per input.
        #[arg(long = "in", required = true)]
        inputs: Vec<String>,
        /// Rows to take from each input, in the same order.
        #[arg(long, required = true)]
        n: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a results directory as markdown or CSV.
    Report {
        /// Directory written by `grid`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SamplingArgs {
    /// Classes below this share of the labelled rows are left out.
    #[arg(long, default_value_t = DEFAULT_MINORITY_RATIO)]
    minority_ratio: f64,
    /// Resample undersized strata instead of shrinking the class set.
    #[arg(long)]
    with_replacement: bool,
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{SEED_ENV}=`{v}` is not an unsigned integer")),
        Err(_) => Ok(None),
    }
}

fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    Ok(match flag.or(config) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    Dataset::read_csv(path).with_context(|| format!("reading {}", path.display()))
}

fn write_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    ds.write_csv(path)
        .with_context(|| format!("writing {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn labelled(mut ds: Dataset, label: Option<&str>) -> Result<Dataset> {
    if let Some(l) = label {
        ds.set_label(l)?;
    }
    Ok(ds)
}

fn base_dir(path: &Path) -> &Path {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
}

/// Appends `suffix` to the file name of `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Parse { dict, input, out } => {
            let dict = load_dictionary(&read_text(&dict)?).with_context(|| format!("loading {}", dict.display()))?;
            let file = std::fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let lines: Vec<String> = BufReader::new(file).lines().collect::<std::io::Result<_>>()?;
            let outcome = parse_records(&lines, &dict, DEFAULT_BATCH_SIZE)?;
            write_dataset(&outcome.dataset, &out)?;
            eprintln!(
                "parsed {} records, rejected {}, truncated {} long lines",
                outcome.dataset.n_rows(),
                outcome.rejected.len(),
                outcome.long_lines
            );
            if !outcome.rejected.is_empty() {
                let mut text = String::from("line,message\n");
                for r in &outcome.rejected {
                    text.push_str(&format!("{},\"{}\"\n", r.index + 1, r.message.replace('"', "\"\"")));
                }
                let path = sibling(&out, ".rejected.csv");
                write_atomic(&path, text.as_bytes())?;
                eprintln!("rejected lines listed in {}", path.display());
            }
        }
        Command::Preprocess {
            input,
            out,
            config,
            label,
        } => {
            let mut cfg = match &config {
                Some(p) => PreprocessConfig::parse(&read_text(p)?).with_context(|| format!("in {}", p.display()))?,
                None => PreprocessConfig::default(),
            };
            if label.is_some() {
                cfg.label = label;
            }
            let mapping = match (&cfg.metastasis, &config) {
                (Some((_, path)), Some(cfg_path)) => {
                    let path = base_dir(cfg_path).join(path);
                    let f = std::fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    Some(MetastasisMapping::from_csv(f)?)
                }
                _ => None,
            };
            let ds = read_dataset(&input)?;
            let (ds, report) = run_pipeline(&ds, &cfg, mapping.as_ref())?;
            write_dataset(&ds, &out)?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            let path = sibling(&out, ".filters.csv");
            write_atomic(&path, &buf)?;
            eprintln!(
                "kept {} rows and {} columns; removed {} rows; filter log in {}",
                ds.n_rows(),
                ds.n_cols(),
                report.rows_removed,
                path.display()
            );
        }
        Command::Sample {
            input,
            out,
            strategy,
            n,
            label,
            sampling,
        } => {
            let ds = labelled(read_dataset(&input)?, label.as_deref())?;
            let plan = SamplingPlan {
                strategy,
                n,
                seed: resolve_seed(cli.seed, None)?,
                minority_ratio: sampling.minority_ratio,
                with_replacement: sampling.with_replacement,
            };
            let label = ds.label_name().map(str::to_string);
            let drawn = if strategy == Strategy::Balanced {
                let l = label
                    .as_deref()
                    .context("balanced sampling needs --label or a labelled dataset")?;
                let (drawn, alloc) = balanced_stratified_sample(&ds, l, &plan)?;
                let names = ds.class_names();
                let quotas: Vec<String> = alloc
                    .quotas
                    .iter()
                    .map(|(c, q)| format!("{}={q}", names[*c as usize]))
                    .collect();
                eprintln!("allocation: {}", quotas.join(" "));
                if alloc.shortfall > 0 {
                    eprintln!("shortfall: {} rows", alloc.shortfall);
                }
                drawn
            } else {
                sample(&ds, label.as_deref(), &plan)?
            };
            write_dataset(&drawn, &out)?;
            eprintln!("{plan}: wrote {} rows", drawn.n_rows());
        }
        Command::Train {
            input,
            out,
            label,
            classifier,
        } => {
            let ds = labelled(read_dataset(&input)?, label.as_deref())?;
            let model = classifier.train(&ds)?;
            let file = ModelFile::new(model, &ds)?;
            let data = std::fs::canonicalize(&input)?;
            file.save(&out, Some(&data))?;
            eprintln!("trained {} on {} rows", classifier.label(), ds.n_rows());
        }
        Command::Eval {
            input,
            model,
            out,
            label,
            strategy,
            classifier,
            n,
            config,
        } => {
            let ds = read_dataset(&input)?;
            if let Some(model) = model {
                let mf = ModelFile::load(&model).with_context(|| format!("loading {}", model.display()))?;
                let test = mf.conform(&ds)?;
                let keep: Vec<usize> = (0..test.n_rows()).filter(|&r| test.label_of(r).is_some()).collect();
                let test = test.select_rows(&keep);
                let truth: Vec<u32> = (0..test.n_rows()).map(|r| test.label_of(r).unwrap()).collect();
                let acc = accuracy(&mf.model.predict_all(&test)?, &truth)?;
                println!("accuracy {acc} ({:.2}%) on {} rows", acc * 100.0, truth.len());
                return Ok(());
            }
            let grid = match &config {
                Some(p) => Some(GridConfig::parse(&read_text(p)?).with_context(|| format!("in {}", p.display()))?),
                None => None,
            };
            let opts = grid.as_ref().map_or_else(CellOptions::default, |g| g.options.clone());
            let label = label
                .or_else(|| ds.label_name().map(str::to_string))
                .context("eval needs --label or a labelled dataset")?;
            let key = CellKey {
                dataset: input
                    .file_stem()
                    .map_or("data".into(), |s| s.to_string_lossy().into_owned()),
                label,
                strategy,
                classifier,
                sample_size: n.context("eval without --model needs --n")?,
            };
            let seed = resolve_seed(cli.seed, grid.and_then(|g| g.seed))?;
            let cell = run_cell(&ds, &key, &opts, seed)?;
            let report = ExperimentReport { cells: vec![cell] };
            match out {
                Some(path) => write_atomic(&path, report.summary_csv()?.as_bytes())?,
                None => print!("{}", report.summary_csv()?),
            }
        }
        Command::Grid { config, out, jobs } => {
            let mut cfg =
                GridConfig::parse(&read_text(&config)?).with_context(|| format!("in {}", config.display()))?;
            cfg.seed = Some(resolve_seed(cli.seed, cfg.seed)?);
            let datasets = cfg.load_datasets(base_dir(&config))?;
            let report = run_grid(&cfg, &datasets, jobs)?;
            report.save(&out)?;
            write_atomic(
                &out.join("report.md"),
                emit_report(&report, ReportFormat::Markdown)?.as_bytes(),
            )?;
            let skipped = report.cells.iter().filter(|c| c.is_skipped()).count();
            eprintln!(
                "{} cells ({} skipped); results in {}",
                report.cells.len(),
                skipped,
                out.display()
            );
        }
        Command::Synth {
            spec,
            out,
            n,
            print_spec,
        } => {
            let mut spec = match &spec {
                Some(p) => SynthSpec::parse(&read_text(p)?).with_context(|| format!("in {}", p.display()))?,
                None => default_profile(),
            };
            if let Some(n) = n {
                spec.rows = n;
            }
            if print_spec {
                write_atomic(&out, spec.to_string().as_bytes())?;
                return Ok(());
            }
            let ds = generate(&spec, resolve_seed(cli.seed, None)?)?;
            write_dataset(&ds, &out)?;
            eprintln!("generated {} rows", ds.n_rows());
        }
        Command::Mix { inputs, n, out } => {
            if inputs.len() != n.len() {
                bail!("{} inputs but {} --n values", inputs.len(), n.len());
            }
            let mut loaded = Vec::new();
            for spec in &inputs {
                let (id, path) = match spec.split_once('=') {
                    Some((id, p)) => (id.to_string(), PathBuf::from(p)),
                    None => {
                        let p = PathBuf::from(spec);
                        let id = p.file_stem().map_or(spec.clone(), |s| s.to_string_lossy().into_owned());
                        (id, p)
                    }
                };
                loaded.push((id, read_dataset(&path)?));
            }
            let parts: Vec<MixPart> = loaded
                .iter()
                .zip(&n)
                .map(|((id, data), &n)| MixPart { id, data, n })
                .collect();
            let ds = mix(&parts, resolve_seed(cli.seed, None)?)?;
            write_dataset(&ds, &out)?;
            eprintln!("mixed {} rows over {} shared columns", ds.n_rows(), ds.n_cols() - 1);
        }
        Command::Report { input, format, out } => {
            let report = ExperimentReport::load(&input).with_context(|| format!("loading {}", input.display()))?;
            let text = emit_report(&report, format)?;
            match out {
                Some(p) => write_atomic(&p, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
