use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gmld_core::coefflattice::rational::{format_rational, parse_rational};
use gmld_core::coefflattice::{partition_of_one, BasisDescriptor, Rational, SpanElement};
use gmld_core::complements::{check_decomposable, check_n_complement_coeffs, check_strong_auto};
use gmld_core::discrepancy::{mld_oracle, profile, Mld, SurfaceGermModel};
use gmld_core::dualgraph::hj_graph;
use gmld_core::explorer::{
    emit_scan, model_digest, model_to_document, parse_complement, parse_model, random_corpus,
    run_perturb_harness, run_scan, to_json, Family, PerturbConfig, ReportFormat, ScanConfig,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "gmld", version, about = "Exact log discrepancies of surface germs")]
struct Cli {
    /// Seed for random corpora (required by `--family random`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Depth of the blow-up oracle.
    #[arg(long, global = true, default_value_t = 3)]
    oracle_depth: u32,
    /// Enclosure refinement budget for model files.
    #[arg(long, global = true)]
    refine_budget: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    /// Hirzebruch-Jung chains `1/n(1, q)`.
    Hj,
    /// `A_n` chains.
    Chain,
    /// Single curves `1/n(1, 1)`.
    Cone,
    /// Seeded mix of chains and trees.
    Random,
    /// Seeded smooth germs.
    Smooth,
    /// The files given with `--model`.
    Models,
}

#[derive(Subcommand)]
enum Command {
    /// Log discrepancies, mld and classification of a model file.
    Solve {
        model: PathBuf,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// mld over the germ point, cross-checked against the blow-up oracle.
    Mld {
        model: PathBuf,
        #[arg(long)]
        no_oracle: bool,
    },
    /// Scan a family and aggregate its mld values.
    Scan {
        #[arg(long, value_enum, default_value_t = FamilyKind::Hj)]
        family: FamilyKind,
        #[arg(long, default_value_t = 2)]
        n_min: i64,
        #[arg(long, default_value_t = 30)]
        n_max: i64,
        /// Fix `q` in the hj family; all coprime `q` otherwise.
        #[arg(long)]
        q: Option<i64>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        /// Coefficient set element: `p/q`, or coordinates `c0,c1,...`.
        #[arg(long = "coefficient")]
        coefficients: Vec<String>,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Re-solve lc models under the maps of a partition of one.
    Perturb {
        /// Model files; the seeded random corpus when empty.
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value = "1/1000")]
        delta: String,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Partition of one for the basis of a model file.
    Partition {
        model: PathBuf,
        #[arg(long, default_value = "1/1000")]
        delta: String,
    },
    /// Coefficient checks of an n-complement document.
    CheckComplement { file: PathBuf },
    /// Model document for the cyclic quotient `1/n(1, q)`.
    GenHj { n: i64, q: i64 },
    /// Run every check suite on model files or the seeded random corpus.
    VerifyLemmas {
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

enum Status {
    Clean,
    Violations,
}

impl Status {
    fn from_clean(clean: bool) -> Self {
        if clean {
            Status::Clean
        } else {
            Status::Violations
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_model(path: &Path, budget: Option<usize>) -> Result<SurfaceGermModel> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text, budget).with_context(|| format!("in {}", path.display()))
}

fn read_models(paths: &[PathBuf], budget: Option<usize>) -> Result<Vec<SurfaceGermModel>> {
    paths.iter().map(|p| read_model(p, budget)).collect()
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_only(cli: &Cli, command: &str) -> Result<()> {
    if cli.format == ReportFormat::Csv {
        bail!("csv output is not available for {command}");
    }
    Ok(())
}

fn rational_arg(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

fn require_seed(cli: &Cli) -> Result<u64> {
    cli.seed.context("random corpora need --seed")
}

/// `p/q` or comma-separated coordinates, zero-padded to the basis.
fn coefficient_arg(basis: &Arc<BasisDescriptor>, s: &str) -> Result<SpanElement> {
    let mut coords = s.split(',').map(parse_rational).collect::<gmld_core::Result<Vec<_>>>()?;
    if coords.len() > basis.dim() {
        bail!("coefficient {s:?} has more coordinates than the basis");
    }
    coords.resize(basis.dim(), Rational::from_integer(0.into()));
    Ok(SpanElement::new(basis, coords)?)
}

fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Solve { model, epsilon } => {
            let mut m = read_model(model, cli.refine_budget)?;
            if let Some(e) = epsilon {
                m = m.with_epsilon(Some(SpanElement::rational(m.basis(), rational_arg(e)?)))?;
            }
            let p = profile(&m)?;
            let text = match cli.format {
                ReportFormat::Json => to_json(&json!({
                    "digest": model_digest(&m)?,
                    "profile": p,
                }))?,
                ReportFormat::Csv => {
                    let mut s = String::from("vertex,log-discrepancy,decimal\n");
                    for (v, a) in &p.discrepancies {
                        s += &format!("{v},{},{}\n", a.exact_string(), a.decimal(12)?);
                    }
                    s
                }
            };
            write_output(cli, &text)?;
            Ok(Status::Clean)
        }
        Command::Mld { model, no_oracle } => {
            json_only(cli, "mld")?;
            let m = read_model(model, cli.refine_budget)?;
            let p = profile(&m)?;
            let decimal = match &p.mld {
                Mld::NegInfinity => "-inf".to_string(),
                Mld::Value(x) => x.decimal(12)?,
            };
            let mut doc = json!({
                "mld": p.mld,
                "decimal": decimal,
                "locus": p.locus,
                "classification": p.classification,
            });
            let mut agrees = true;
            if !no_oracle {
                let oracle = mld_oracle(&m, cli.oracle_depth)?;
                agrees = oracle == p.mld;
                doc["oracle"] = json!({
                    "depth": cli.oracle_depth,
                    "mld": oracle,
                    "agrees": agrees,
                });
            }
            write_output(cli, &to_json(&doc)?)?;
            Ok(Status::from_clean(agrees))
        }
        Command::Scan {
            family,
            n_min,
            n_max,
            q,
            count,
            models,
            coefficients,
            epsilon,
        } => {
            let family = match family {
                FamilyKind::Hj => Family::HjRange {
                    n_min: *n_min,
                    n_max: *n_max,
                    q: *q,
                },
                FamilyKind::Chain => Family::Chain {
                    n_max: usize::try_from(*n_max).context("--n-max must be nonnegative")?,
                },
                FamilyKind::Cone => Family::Cone { n_max: *n_max },
                FamilyKind::Random => Family::Random {
                    seed: require_seed(cli)?,
                    count: *count,
                },
                FamilyKind::Smooth => Family::Smooth {
                    seed: require_seed(cli)?,
                    count: *count,
                },
                FamilyKind::Models => Family::Models(read_models(models, cli.refine_budget)?),
            };
            let instances = family.models()?;
            let coefficients = match instances.first() {
                Some(m) if !coefficients.is_empty() => Some(
                    coefficients
                        .iter()
                        .map(|c| coefficient_arg(m.basis(), c))
                        .collect::<Result<Vec<_>>>()?,
                ),
                _ => None,
            };
            let config = ScanConfig {
                family: Family::Models(instances),
                coefficients,
                epsilon: epsilon.as_deref().map(rational_arg).transpose()?,
                oracle_depth: cli.oracle_depth,
            };
            let report = run_scan(&config)?;
            write_output(cli, &emit_scan(&report, cli.format)?)?;
            Ok(Status::from_clean(
                report.aggregate.violation_count == 0 && report.aggregate.span_closed,
            ))
        }
        Command::Perturb {
            models,
            count,
            delta,
            epsilon,
        } => {
            json_only(cli, "perturb")?;
            let models = if models.is_empty() {
                random_corpus(require_seed(cli)?, *count)?
            } else {
                read_models(models, cli.refine_budget)?
            };
            let report = run_perturb_harness(&PerturbConfig {
                models,
                delta: rational_arg(delta)?,
                epsilon: epsilon.as_deref().map(rational_arg).transpose()?,
            })?;
            write_output(cli, &to_json(&report)?)?;
            Ok(Status::from_clean(report.passed()))
        }
        Command::Partition { model, delta } => {
            json_only(cli, "partition")?;
            let m = read_model(model, cli.refine_budget)?;
            let delta = rational_arg(delta)?;
            let p = partition_of_one(m.basis(), &delta)?;
            let failures = p.verify()?;
            let entries: Vec<_> = p
                .entries
                .iter()
                .map(|e| {
                    let images: Vec<String> = (1..m.basis().dim())
                        .map(|i| e.map.image_of_symbol(i).exact_string())
                        .collect();
                    json!({ "sigma": e.sigma, "factors": e.factors, "images": images })
                })
                .collect();
            let doc = json!({
                "basis": m.basis().symbols().iter().map(|s| &s.name).collect::<Vec<_>>(),
                "delta": format_rational(&delta),
                "splits": p.splits,
                "entries": entries,
                "failures": failures,
            });
            write_output(cli, &to_json(&doc)?)?;
            Ok(Status::from_clean(failures.is_empty()))
        }
        Command::CheckComplement { file } => {
            json_only(cli, "check-complement")?;
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("reading {}", file.display()))?;
            let d = parse_complement(&text, cli.refine_budget)
                .with_context(|| format!("in {}", file.display()))?;
            let coefficients = check_n_complement_coeffs(&d)?;
            let strong = check_strong_auto(&d)?;
            let decomposition = match &d.decomposition {
                Some(_) => Some(check_decomposable(&d)?),
                None => None,
            };
            let doc = json!({
                "n": d.n,
                "coefficients": coefficients,
                "strong_auto": strong,
                "decomposition": decomposition,
            });
            write_output(cli, &to_json(&doc)?)?;
            Ok(Status::from_clean(!strong.is_counterexample()))
        }
        Command::GenHj { n, q } => {
            json_only(cli, "gen-hj")?;
            let m = SurfaceGermModel::new(
                &BasisDescriptor::rationals(),
                hj_graph(*n, *q)?,
                Vec::new(),
                Default::default(),
                None,
            )?;
            write_output(cli, &to_json(&model_to_document(&m)?)?)?;
            Ok(Status::Clean)
        }
        Command::VerifyLemmas { models, count } => {
            let family = if models.is_empty() {
                Family::Random {
                    seed: require_seed(cli)?,
                    count: *count,
                }
            } else {
                Family::Models(read_models(models, cli.refine_budget)?)
            };
            let mut config = ScanConfig::new(family);
            config.oracle_depth = cli.oracle_depth;
            let report = run_scan(&config)?;
            let text = match cli.format {
                ReportFormat::Csv => emit_scan(&report, ReportFormat::Csv)?,
                ReportFormat::Json => {
                    let violations: Vec<_> = report
                        .violations()
                        .map(|(digest, v)| json!({ "digest": digest, "violation": v }))
                        .collect();
                    let suites: Vec<_> = report
                        .instances
                        .iter()
                        .map(|r| json!({ "digest": r.digest, "checks": r.checks }))
                        .collect();
                    to_json(&json!({
                        "instances": report.aggregate.instance_count,
                        "oracle_depth": cli.oracle_depth,
                        "suites": suites,
                        "violation_count": report.aggregate.violation_count,
                        "violations": violations,
                    }))?
                }
            };
            write_output(cli, &text)?;
            Ok(Status::from_clean(report.aggregate.violation_count == 0))
        }
    }
}
