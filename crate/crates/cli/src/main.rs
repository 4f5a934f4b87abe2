//! `weyl` — subgroup listings, decay-rate traces, Markovianity verdicts,
//! mixture reports, and the cross-validation suite.
//!
//! Exit codes: 0 success, 1 suite failure, 2 usage/parse error,
//! 3 numerical (noninvertibility) error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use weyl_dynamics::classify::{enm_on_grid, DEFAULT_RATE_TOL};
use weyl_dynamics::dynamics::{
    rate_trace_csv, rate_trace_csv_with, DynamicsError, MapRule, ProbabilityProfile, TimeGrid,
};
use weyl_dynamics::mixtures::{theorem2_bound, MixtureSpec};
use weyl_dynamics::phase_space::{
    count_subgroups, divisors, enumerate_subgroups, PhasePoint, SubgroupHnf,
};
use weyl_dynamics::suite::{run_suite_with, SuiteConfig};

#[derive(Parser)]
#[command(name = "weyl", about = "Weyl dynamical maps on d-level systems", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List subgroups of the discrete phase space Z_d x Z_d.
    Subgroups {
        /// Hilbert space dimension.
        #[arg(long)]
        d: u64,
        /// Subgroup order; omit to tabulate all orders.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Emit a CSV trace of decay rates gamma_alpha(t) over a time grid.
    Rates {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        grid: GridArgs,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Grade a map as MarkovianSemigroup / CPDivisible / NonMarkovian /
    /// EternallyNonMarkovian and print the verdict as JSON.
    Classify {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        grid: GridArgs,
        /// Rate-sign tolerance.
        #[arg(long, default_value_t = DEFAULT_RATE_TOL)]
        tol: f64,
    },
    /// Analyze a mixture spec: coverage, admissible-size bound, verdict.
    Mixture {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_RATE_TOL)]
        tol: f64,
        /// Also write the rate trace CSV to this path.
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the cross-validation suite and print one line per check.
    Paper {
        /// Run only checks whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Override the per-check agreement tolerances.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args)]
struct SpecArg {
    /// Map spec: a JSON file path or inline JSON.
    #[arg(long)]
    spec: String,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1e-3)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 64)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    spacing: Spacing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Spacing {
    Log,
    Linear,
}

impl GridArgs {
    fn build(&self) -> Result<TimeGrid, DynamicsError> {
        match self.spacing {
            Spacing::Log => TimeGrid::log_spaced(self.t_min, self.t_max, self.points),
            Spacing::Linear => TimeGrid::linear_spaced(self.t_min, self.t_max, self.points),
        }
    }
}

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn usage_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_PARSE)
}

fn numeric_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_NUMERIC)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Subgroups { d, k } => cmd_subgroups(d, k),
        Command::Rates { spec, grid, out } => cmd_rates(&spec.spec, &grid, out.as_deref()),
        Command::Classify { spec, grid, tol } => cmd_classify(&spec.spec, &grid, tol),
        Command::Mixture { spec, grid, tol, out } => {
            cmd_mixture(&spec.spec, &grid, tol, out.as_deref())
        }
        Command::Paper { filter, seed, tol } => cmd_paper(filter.as_deref(), seed, tol),
    }
}

fn cmd_subgroups(d: u64, k: Option<u64>) -> ExitCode {
    if d < 2 {
        return usage_err("need d >= 2");
    }
    match k {
        Some(k) => {
            let subgroups = match enumerate_subgroups(d, k) {
                Ok(s) => s,
                Err(e) => return usage_err(e),
            };
            println!("{:>4} {:>4} {:>4} {:>6} {:<13} dual(m,w,n)", "m", "w", "n", "order", "type");
            for g in &subgroups {
                let dual = g.dual();
                println!(
                    "{:>4} {:>4} {:>4} {:>6} {:<13} ({}, {}, {})",
                    g.m,
                    g.w,
                    g.n,
                    g.order(),
                    g.classify().map(|t| t.to_string()).unwrap_or_default(),
                    dual.m,
                    dual.w,
                    dual.n,
                );
            }
            println!("total: {} subgroups of order {k} in Z_{d} x Z_{d}", subgroups.len());
        }
        None => {
            println!("{:>8} {:>8}", "order", "count");
            let max = count_subgroups(d, d).unwrap();
            for k in divisors(d * d) {
                let count = count_subgroups(d, k).unwrap();
                let marker = if k == d && count == max { "  <- max (K = d)" } else { "" };
                println!("{k:>8} {count:>8}{marker}");
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_rates(spec: &str, grid: &GridArgs, out: Option<&str>) -> ExitCode {
    let rule = match parse_rule(spec) {
        Ok(r) => r,
        Err(msg) => return usage_err(msg),
    };
    let grid = match grid.build() {
        Ok(g) => g,
        Err(e) => return usage_err(e),
    };
    let csv = match rate_trace_csv(&rule, &grid) {
        Ok(csv) => csv,
        Err(e) => return numeric_err(e),
    };
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, csv) {
                return usage_err(format!("cannot write {path}: {e}"));
            }
        }
        None => print!("{csv}"),
    }
    ExitCode::SUCCESS
}

fn cmd_classify(spec: &str, grid: &GridArgs, tol: f64) -> ExitCode {
    if tol <= 0.0 {
        return usage_err("tolerance must be positive");
    }
    let rule = match parse_rule(spec) {
        Ok(r) => r,
        Err(msg) => return usage_err(msg),
    };
    let grid = match grid.build() {
        Ok(g) => g,
        Err(e) => return usage_err(e),
    };
    match enm_on_grid(|t| rule.decay_rates(t), &grid, tol) {
        Ok(verdict) => {
            println!("{}", verdict.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => numeric_err(e),
    }
}

fn cmd_mixture(spec: &str, grid: &GridArgs, tol: f64, out: Option<&str>) -> ExitCode {
    let value = match load_json(spec) {
        Ok(v) => v,
        Err(msg) => return usage_err(msg),
    };
    let mix = match parse_mixture(&value) {
        Ok(m) => m,
        Err(msg) => return usage_err(msg),
    };
    let grid = match grid.build() {
        Ok(g) => g,
        Err(e) => return usage_err(e),
    };
    let rule = mix.as_rule();
    // Theorem-2 mixtures grade on the exact closed-form rates; the DFT path
    // loses precision once the uncovered eigenvalue e^{-ct} underflows.
    let verdict = if mix.is_theorem2_mode() {
        enm_on_grid(|t| mix.closed_form_rate_table(t), &grid, tol)
    } else {
        enm_on_grid(|t| rule.decay_rates(t), &grid, tol)
    };
    let verdict = match verdict {
        Ok(v) => v,
        Err(e) => return numeric_err(e),
    };
    let report = mix.coverage_report();
    let bound = mix
        .common_order()
        .and_then(|k| theorem2_bound(mix.dim(), k).ok());
    let to_pairs = |pts: Vec<&PhasePoint>| -> Vec<[u64; 2]> {
        pts.into_iter().map(|u| [u.i(), u.j()]).collect()
    };
    let output = json!({
        "d": mix.dim(),
        "components": mix.components().len(),
        "common_order": mix.common_order(),
        "theorem2_mode": mix.is_theorem2_mode(),
        "bound": bound.as_ref().map(|b| b.bound),
        "admissible_n": bound.as_ref().map(|b| b.admissible.clone()),
        "covered": report.covered.len(),
        "uncovered": to_pairs(report.uncovered.iter().collect()),
        "dual_intersections": to_pairs(
            report.dual_intersections.iter().filter(|u| !u.is_identity()).collect()
        ),
        "verdict": verdict.to_json(),
    });
    println!("{output}");
    if let Some(path) = out {
        let csv = if mix.is_theorem2_mode() {
            rate_trace_csv_with(mix.dim(), &grid, |t| mix.closed_form_rate_table(t))
        } else {
            rate_trace_csv(&rule, &grid)
        };
        let csv = match csv {
            Ok(csv) => csv,
            Err(e) => return numeric_err(e),
        };
        if let Err(e) = fs::write(path, csv) {
            return usage_err(format!("cannot write {path}: {e}"));
        }
    }
    ExitCode::SUCCESS
}

fn cmd_paper(filter: Option<&str>, seed: u64, tol: Option<f64>) -> ExitCode {
    let results = run_suite_with(filter, SuiteConfig { seed, tol });
    if results.is_empty() {
        return usage_err("filter matched no checks");
    }
    let mut ok = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {:<26} {}", r.name, r.detail);
        ok &= r.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Loads `--spec` as inline JSON when it parses, else as a file path.
fn load_json(spec: &str) -> Result<serde_json::Value, String> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return serde_json::from_str(spec).map_err(|e| format!("inline spec: {e}"));
    }
    let text = fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{spec}: {e}"))
}

fn parse_profile(value: &serde_json::Value) -> Result<ProbabilityProfile, String> {
    let obj = value
        .as_object()
        .ok_or("profile must be an object with (r, c) or (times, values)")?;
    if obj.contains_key("r") {
        let r = obj["r"].as_f64().ok_or("profile.r must be a number")?;
        let c = obj
            .get("c")
            .and_then(|v| v.as_f64())
            .ok_or("profile.c must be a number")?;
        return ProbabilityProfile::exponential(r, c).map_err(|e| e.to_string());
    }
    if obj.contains_key("times") {
        let parse = |key: &str| -> Result<Vec<f64>, String> {
            obj.get(key)
                .and_then(|v| v.as_array())
                .ok_or(format!("profile.{key} must be an array"))?
                .iter()
                .map(|x| x.as_f64().ok_or(format!("profile.{key}: non-numeric entry")))
                .collect()
        };
        return ProbabilityProfile::tabulated(parse("times")?, parse("values")?)
            .map_err(|e| e.to_string());
    }
    Err("profile must have (r, c) or (times, values)".into())
}

fn parse_subgroup(value: &serde_json::Value) -> Result<SubgroupHnf, String> {
    serde_json::from_value(value.clone()).map_err(|e| format!("subgroup: {e}"))
}

fn parse_mixture(value: &serde_json::Value) -> Result<MixtureSpec, String> {
    let d = value["d"].as_u64().ok_or("mixture spec needs integer d")?;
    let profile = parse_profile(&value["profile"])?;
    let raw = value["components"]
        .as_array()
        .ok_or("mixture spec needs a components array")?;
    let mut components = Vec::new();
    for entry in raw {
        let x = entry["x"].as_f64().ok_or("component needs numeric x")?;
        let g = parse_subgroup(&entry["G"])?;
        components.push((x, g));
    }
    // Prefer Theorem-2 mode when the profile matches the pinned amplitude.
    if let ProbabilityProfile::Exponential { r, c } = &profile {
        if let Some(k) = components.first().map(|(_, g)| g.order()) {
            let pinned = (k - 1) as f64 / k as f64;
            if components.iter().all(|(_, g)| g.order() == k) && (r - pinned).abs() <= 1e-12 {
                return MixtureSpec::theorem2(d, components, *c).map_err(|e| e.to_string());
            }
        }
    }
    MixtureSpec::new(d, components, profile).map_err(|e| e.to_string())
}

/// Accepts dephasing (`u`), isotropic (`G`), anisotropic (`support`), and
/// mixture (`components`) specs, keyed by which field is present.
fn parse_rule(spec: &str) -> Result<MapRule, String> {
    let value = load_json(spec)?;
    if value.get("components").is_some() {
        return Ok(parse_mixture(&value)?.as_rule());
    }
    let profile = parse_profile(&value["profile"])?;
    if let Some(g) = value.get("G") {
        let g = parse_subgroup(g)?;
        return MapRule::isotropic(&g, profile).map_err(|e| e.to_string());
    }
    let d = value["d"].as_u64().ok_or("spec needs integer d")?;
    if d < 2 {
        return Err("need d >= 2".into());
    }
    if let Some(u) = value.get("u") {
        let pair = u.as_array().filter(|a| a.len() == 2).ok_or("u must be [i, j]")?;
        let (i, j) = (
            pair[0].as_i64().ok_or("u[0] must be an integer")?,
            pair[1].as_i64().ok_or("u[1] must be an integer")?,
        );
        return MapRule::dephasing(PhasePoint::new(i, j, d), profile).map_err(|e| e.to_string());
    }
    if let Some(support) = value.get("support").and_then(|v| v.as_array()) {
        let mut weights = Vec::new();
        for entry in support {
            let i = entry["i"].as_i64().ok_or("support entry needs integer i")?;
            let j = entry["j"].as_i64().ok_or("support entry needs integer j")?;
            let w = entry["w"].as_f64().ok_or("support entry needs numeric w")?;
            weights.push((PhasePoint::new(i, j, d), w));
        }
        return MapRule::new(d, weights, profile).map_err(|e| e.to_string());
    }
    Err("spec needs one of: u (dephasing), G (isotropic), support, components".into())
}
