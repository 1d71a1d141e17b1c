use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use gcflow::fixtures::Fixture;
use gcflow::report::{
    classify_fibration, export_samples, parse_map, run_verification_suite, ExportKind, Profile, RunReport, Suite,
    SuiteConfig, Target, Tolerances, PROFILE_ENV,
};

#[derive(Parser)]
#[command(name = "gcflow", version, about = "Great-circle flows on the round 3-sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a graph map and the field it generates.
    Classify(RunArgs),
    /// Run a verification suite.
    Verify {
        /// prop-1, prop-a, lemma-key, prop-2-5, theorem-b, flow or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write sample rows as CSV.
    Export {
        #[command(flatten)]
        source: Source,
        /// field, graph or defects
        #[arg(long, default_value = "field")]
        what: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// JSON fibration spec file.
    #[arg(long, conflicts_with = "fixture")]
    spec: Option<PathBuf>,
    /// HOPF, VOL05, CONF05, GEN or FULLANTI.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance profile: standard, strict or relaxed.
    #[arg(long, env = PROFILE_ENV)]
    profile: Option<String>,
    #[command(flatten)]
    tol: TolArgs,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

macro_rules! tolerance_flags {
    ($($field:ident => $name:literal),* $(,)?) => {
        #[derive(Args)]
        struct TolArgs {
            $(
                #[arg(long = concat!("tol-", $name), value_name = "VALUE")]
                $field: Option<f64>,
            )*
        }

        impl TolArgs {
            fn apply(&self, tol: &mut Tolerances) -> gcflow::Result<()> {
                $(
                    if let Some(v) = self.$field {
                        tol.set($name, v)?;
                    }
                )*
                Ok(())
            }
        }
    };
}

tolerance_flags! {
    geodesic => "geodesic",
    lambda => "lambda",
    reeb => "reeb",
    contact_min => "contact-min",
    dlambda => "dlambda",
    key => "key",
    div => "div",
    jdefect => "jdefect",
    conf => "conf",
    classify => "classify",
    commute => "commute",
    e_invariance => "e-invariance",
    symplectic => "symplectic",
    roundtrip => "roundtrip",
    non_lagrangian_min => "non-lagrangian-min",
    div_witness => "div-witness",
    jdefect_witness => "jdefect-witness",
    conf_witness => "conf-witness",
    dilatation_reject => "dilatation-reject",
}

/// A configuration or input problem; maps to exit status 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for ConfigError {
    fn from(e: E) -> Self {
        Self(e.into())
    }
}

fn target(source: &Source, required: bool) -> Result<Target, ConfigError> {
    match (&source.spec, &source.fixture) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let map = parse_map(&text).with_context(|| format!("parsing {}", path.display()))?;
            let name = path
                .file_stem()
                .map_or("spec".into(), |s| s.to_string_lossy().into_owned());
            Ok(Target::Map { name, map })
        }
        (None, Some(name)) => Ok(Target::Fixture(name.parse::<Fixture>()?)),
        (None, None) if required => Err(anyhow::anyhow!("one of --spec or --fixture is required").into()),
        (None, None) => Ok(Target::Fixtures),
    }
}

fn suite_config(suite: Suite, run: &RunArgs) -> Result<SuiteConfig, ConfigError> {
    let profile = match &run.profile {
        Some(p) if !p.is_empty() => p.parse::<Profile>()?,
        _ => Profile::Standard,
    };
    let mut tolerances = Tolerances::for_profile(profile);
    run.tol.apply(&mut tolerances)?;
    let config = SuiteConfig {
        suite,
        target: target(&run.source, false)?,
        samples: run.samples,
        seed: run.seed,
        tolerances,
    };
    config.validate()?;
    Ok(config)
}

fn write_output(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing to stdout"),
    }
}

fn emit(report: &RunReport, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    write_output(out, &report.to_json())?;
    eprint!("{}", report.summary());
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode, ConfigError> {
    match cli.command {
        Command::Classify(run) => {
            let config = suite_config(Suite::Correspondence, &run)?;
            if config.target == Target::Fixtures {
                return Err(anyhow::anyhow!("classify needs --spec or --fixture").into());
            }
            let report = classify_fibration(&config)?;
            for t in &report.targets {
                match (&t.map_class, t.field_class) {
                    (Some(c), _) if t.rejected => eprintln!(
                        "{}: rejected, sampled max dilatation {:.6} >= 1",
                        t.name, c.max_dilatation
                    ),
                    (Some(c), Some(f)) => eprintln!(
                        "{}: map {}, field {}",
                        t.name,
                        serde_json::to_value(c.verdict)?.as_str().unwrap_or_default(),
                        f
                    ),
                    _ => {}
                }
            }
            Ok(emit(&report, run.out.as_deref())?)
        }
        Command::Verify { suite, run } => {
            let config = suite_config(suite.parse()?, &run)?;
            let report = run_verification_suite(&config)?;
            Ok(emit(&report, run.out.as_deref())?)
        }
        Command::Export {
            source,
            what,
            samples,
            seed,
            out,
        } => {
            let kind: ExportKind = what.parse()?;
            let map = match target(&source, true)? {
                Target::Fixture(f) => f.map(),
                Target::Map { map, .. } => map,
                Target::Fixtures => bail_config("one of --spec or --fixture is required")?,
            };
            if samples == 0 {
                return Err(anyhow::anyhow!("--samples must be at least 1").into());
            }
            let csv = export_samples(&map, samples, seed, kind).map_err(anyhow::Error::from)?;
            write_output(out.as_deref(), &csv)?;
            let failed = csv.lines().skip(1).filter(|l| !l.ends_with(",ok")).count();
            if failed > 0 {
                eprintln!("{failed} rows failed");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bail_config<T>(msg: &str) -> anyhow::Result<T> {
    bail!("{msg}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
