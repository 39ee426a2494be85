//! Command surface of the `condquant` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::report::{format_number, table, verify_summary, verify_table};
use super::scenario::{parse_scenario, Scenario, ScenarioError};
use crate::dynamic::{
    dynamic_eval, run_property, DynamicRiskMeasure, Outcome, PropertyKind, PropertyReport, RiskMeasure,
    SuiteConfig, Witness,
};
use crate::quantile::{brute_force_quantile, SolveSettings};
use crate::shortfall::ShortfallSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_NO_WITNESS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "condquant", version, about = "Conditional generalized quantiles and shortfall risk measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a risk measure given a partition or along a filtration.
    Compute {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long = "var")]
        variable: String,
        #[arg(long, conflicts_with = "filtration", required_unless_present = "filtration")]
        sigma: Option<String>,
        #[arg(long)]
        filtration: Option<String>,
        #[arg(long)]
        spec: String,
        #[arg(long)]
        tol_x: Option<f64>,
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Run randomized property suites for every spec in a scenario.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = ["axioms", "equivalence", "foc", "consistency", "all"])]
        suite: String,
        #[arg(long, env = "CONDQUANT_SEED", default_value_t = 42)]
        seed: u64,
        /// Random trials per property.
        #[arg(long, default_value_t = 500)]
        budget: usize,
        /// Write the machine-readable JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the solver against the brute-force grid oracle.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long = "var")]
        variable: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        spec: String,
        #[arg(long)]
        grid_step: Option<f64>,
    },
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(ScenarioError::Io { .. }) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Scenario(_) => EXIT_DATA,
            CliError::Core(e) if e.is_validation() => EXIT_DATA,
            CliError::Core(_) | CliError::Io(_) => EXIT_VIOLATION,
        }
    }
}

fn settings(tol_x: Option<f64>, grid_step: Option<f64>) -> Result<SolveSettings, CliError> {
    let s = SolveSettings { tol_x: tol_x.unwrap_or(1e-10), grid_step, ..SolveSettings::default() };
    s.validate()?;
    Ok(s)
}

fn header(out: &mut String, spec: &RiskMeasure, settings: &SolveSettings, what: &str) {
    out.push_str(&format!("# spec: {}\n# settings: {}\n# {what}\n", spec.fingerprint(), settings.fingerprint()));
}

pub fn cmd_compute(
    scenario: &Scenario,
    variable: &str,
    sigma: Option<&str>,
    filtration: Option<&str>,
    spec: &str,
    settings: &SolveSettings,
) -> Result<String, CliError> {
    let x = scenario.variable(variable)?;
    let measure = scenario.spec(spec)?;
    let mut out = String::new();
    match (sigma, filtration) {
        (Some(g), None) => {
            let part = scenario.partition(g)?;
            let rho = measure.evaluate(&scenario.space, x, part, settings)?;
            header(&mut out, measure, settings, &format!("variable: {variable}; sigma: {g}"));
            let rows: Vec<Vec<String>> = scenario
                .outcomes
                .iter()
                .zip(rho.values())
                .map(|(o, v)| vec![o.clone(), format_number(*v)])
                .collect();
            out.push_str(&table(&["outcome", "value"], &rows));
        }
        (None, Some(f)) => {
            let drm = DynamicRiskMeasure::new(scenario.filtration(f)?.clone(), measure.clone());
            let stages = dynamic_eval(&scenario.space, x, &drm, settings)?;
            header(&mut out, measure, settings, &format!("variable: {variable}; filtration: {f}"));
            let names: Vec<String> = (0..stages.len()).map(|t| format!("stage_{t}")).collect();
            let mut cols = vec!["outcome"];
            cols.extend(names.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = scenario
                .outcomes
                .iter()
                .enumerate()
                .map(|(i, o)| {
                    std::iter::once(o.clone()).chain(stages.iter().map(|s| format_number(s.get(i)))).collect()
                })
                .collect();
            out.push_str(&table(&cols, &rows));
        }
        _ => return Err(CliError::Usage("exactly one of --sigma and --filtration is required".into())),
    }
    Ok(out)
}

pub fn cmd_oracle(
    scenario: &Scenario,
    variable: &str,
    sigma: &str,
    spec: &str,
    settings: &SolveSettings,
) -> Result<String, CliError> {
    let x = scenario.variable(variable)?;
    let g = scenario.partition(sigma)?;
    let measure = scenario.spec(spec)?;
    let qspec = match measure.as_risk_spec() {
        Some(q) => q,
        None => {
            let v = measure
                .as_score()
                .ok_or_else(|| CliError::Usage(format!("spec `{spec}` has no finite score")))?;
            ShortfallSpec::new(v.clone())?;
            crate::quantile::RiskSpec::from_score(0.5, &v)?
        }
    };
    let step = settings.grid_step_for(x.max() - x.min());
    let solved = measure.evaluate(&scenario.space, x, g, settings)?;
    let brute = brute_force_quantile(&scenario.space, x, g, &qspec, step, settings.tol_f)?;
    let mut out = String::new();
    header(&mut out, measure, settings, &format!("variable: {variable}; sigma: {sigma}; grid_step: {}", format_number(step)));
    let rows: Vec<Vec<String>> = scenario
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let (a, b) = (solved.get(i), brute.get(i));
            vec![o.clone(), format_number(a), format_number(b), format_number((a - b).abs())]
        })
        .collect();
    out.push_str(&table(&["outcome", "solver", "oracle", "abs_diff"], &rows));
    Ok(out)
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    scenario: String,
    suite: &'a str,
    seed: u64,
    budget: usize,
    settings: String,
    reports: Vec<SpecReport<'a>>,
}

#[derive(Serialize)]
struct SpecReport<'a> {
    spec: &'a str,
    #[serde(flatten)]
    report: &'a PropertyReport,
}

/// Runs the suites and returns the human table, the JSON report and the exit code.
pub fn cmd_verify(
    scenario: &Scenario,
    scenario_name: &str,
    suite: &str,
    seed: u64,
    budget: usize,
) -> Result<(String, String, i32), CliError> {
    let kinds = PropertyKind::suite(suite).ok_or_else(|| CliError::Usage(format!("unknown suite `{suite}`")))?;
    let fixed: Vec<Witness> = scenario
        .variables
        .values()
        .flat_map(|x| scenario.partitions.values().map(move |g| Witness::fixed(&scenario.space, x, g)))
        .collect();
    let config = SuiteConfig { seed, trials: budget, fixed, ..SuiteConfig::default() };
    let mut reports = Vec::new();
    for (name, measure) in &scenario.specs {
        for &kind in &kinds {
            reports.push((name.clone(), run_property(kind, measure, &config)?));
        }
    }
    let worst = reports.iter().map(|(_, r)| r.outcome()).max().unwrap_or(Outcome::Pass);
    let code = match worst {
        Outcome::Pass => EXIT_OK,
        Outcome::WitnessNotFound => EXIT_NO_WITNESS,
        Outcome::Violation => EXIT_VIOLATION,
    };
    let mut human = format!(
        "# scenario: {scenario_name}\n# suite: {suite}; seed: {seed}; budget: {budget}\n# settings: {}\n",
        config.settings.fingerprint()
    );
    for (name, measure) in &scenario.specs {
        human.push_str(&format!("# spec {name}: {}\n", measure.fingerprint()));
    }
    human.push_str(&verify_table(&reports));
    human.push_str(&verify_summary(&reports));
    human.push('\n');
    let json = VerifyJson {
        scenario: scenario_name.to_string(),
        suite,
        seed,
        budget,
        settings: config.settings.fingerprint(),
        reports: reports.iter().map(|(s, r)| SpecReport { spec: s, report: r }).collect(),
    };
    let json = serde_json::to_string_pretty(&json).expect("reports serialize") + "\n";
    Ok((human, json, code))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Compute { scenario, variable, sigma, filtration, spec, tol_x, grid_step } => {
            let s = parse_scenario(&scenario)?;
            let settings = settings(tol_x, grid_step)?;
            let out = cmd_compute(&s, &variable, sigma.as_deref(), filtration.as_deref(), &spec, &settings)?;
            stdout.write_all(out.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Oracle { scenario, variable, sigma, spec, grid_step } => {
            let s = parse_scenario(&scenario)?;
            let settings = settings(None, grid_step)?;
            stdout.write_all(cmd_oracle(&s, &variable, &sigma, &spec, &settings)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Verify { scenario, suite, seed, budget, report } => {
            let s = parse_scenario(&scenario)?;
            let name = scenario.file_name().map_or_else(|| scenario.display().to_string(), |n| n.to_string_lossy().into_owned());
            let (human, json, code) = cmd_verify(&s, &name, &suite, seed, budget)?;
            stdout.write_all(human.as_bytes())?;
            if let Some(path) = report {
                fs::write(path, json)?;
            }
            Ok(code)
        }
    }
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
