//! Command-line driver.
//!
//! Exit status: 0 on success, 1 on diagnostics (invalid files, usage errors,
//! I/O failures), 2 when the solver diverged in any requested interval.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::benchmark::{self, build_benchmark, evaluate_at, ANALYSIS_SLOT};
use crate::congestion::{congested_elements, CongestionReport};
use crate::error::{Error, Result};
use crate::io::{
    emit_network, emit_profile_csv, emit_scenario, emit_summary, emit_sweep, load_profiles_dir, parse_detail,
    parse_network_file, parse_network_unchecked, parse_scenario_file, read_text, write_report, write_text,
    ReportFormat, SummaryRow,
};
use crate::network::{validate_network, Network};
use crate::powerflow::total_losses;
use crate::scenario::{run_sweep, ProfileSet, Scenario, SLOTS_PER_DAY};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gridstress", version, about = "EV charging impact on distribution feeder loading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a network file against every network invariant.
    Validate {
        /// Network file; the bundled benchmark when omitted.
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        network: Option<PathBuf>,
    },
    /// Solve one interval and print a loading summary.
    Solve(RunArgs),
    /// Run the interval loop over a day (or one interval) under a scenario.
    Sweep(RunArgs),
    /// Bin stored per-branch detail files into a summary table.
    Report {
        /// Detail files written by `solve`, `sweep` or `benchmark`.
        #[arg(required = true)]
        details: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
        /// Also write the summary into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled benchmark to disk and run its scenarios.
    Benchmark {
        /// Directory for the network, scenario, profile and report files.
        #[arg(long, default_value = "gridstress-benchmark")]
        out: PathBuf,
        /// Slot 0-95 to analyse.
        #[arg(long, default_value_t = ANALYSIS_SLOT, value_parser = slot_parser())]
        interval: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Network file; the bundled benchmark when omitted.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Scenario file; the benchmark base case when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Directory of profile CSVs; the bundled profiles when omitted.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Slot 0-95. `solve` defaults to 36 (09:00); `sweep` to the whole day.
    #[arg(long, value_parser = slot_parser())]
    interval: Option<usize>,
    /// Directory for report files; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
}

fn slot_parser() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::new().range(0..SLOTS_PER_DAY as u64)
}

/// Which intervals a run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSelection {
    Single(usize),
    FullDay,
}

impl IntervalSelection {
    pub fn slots(&self) -> Vec<usize> {
        match *self {
            IntervalSelection::Single(slot) => vec![slot],
            IntervalSelection::FullDay => (0..SLOTS_PER_DAY).collect(),
        }
    }
}

/// Resolved inputs of a `solve` or `sweep` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub network: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub profiles: Option<PathBuf>,
    pub intervals: IntervalSelection,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl RunConfig {
    fn from_args(args: RunArgs, default: IntervalSelection) -> Self {
        Self {
            network: args.network,
            scenario: args.scenario,
            profiles: args.profiles,
            intervals: args.interval.map(IntervalSelection::Single).unwrap_or(default),
            out: args.out,
            format: args.format,
        }
    }

    pub fn load_network(&self) -> Result<Network> {
        match &self.network {
            Some(path) => parse_network_file(&read_text(path)?).map_err(|e| at_path(path, e)),
            None => Ok(benchmark::benchmark_network()),
        }
    }

    pub fn load_scenario(&self) -> Result<(String, Scenario)> {
        match &self.scenario {
            Some(path) => {
                let scenario = parse_scenario_file(&read_text(path)?).map_err(|e| at_path(path, e))?;
                Ok((file_stem(path), scenario))
            }
            None => {
                let base = benchmark::benchmark_scenarios().swap_remove(0);
                Ok((base.key.to_string(), base.scenario))
            }
        }
    }

    pub fn load_profiles(&self) -> Result<ProfileSet> {
        match &self.profiles {
            Some(dir) => load_profiles_dir(dir),
            None => Ok(benchmark::benchmark_profiles()),
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string()
}

fn at_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io { .. } => e,
        other => Error::Io {
            path: path.display().to_string(),
            message: other.to_string(),
        },
    }
}

fn clock(slot: usize) -> String {
    format!("{:02}:{:02}", slot / 4, (slot % 4) * 15)
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_DIAGNOSTICS
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Validate { path, network } => validate(path.or(network), out),
        Command::Solve(args) => solve(&RunConfig::from_args(args, IntervalSelection::Single(ANALYSIS_SLOT)), out),
        Command::Sweep(args) => sweep(&RunConfig::from_args(args, IntervalSelection::FullDay), out, err),
        Command::Report { details, format, out: dir } => report(&details, format, dir.as_deref(), out),
        Command::Benchmark { out: dir, interval, format } => run_benchmark(&dir, interval, format, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DIAGNOSTICS
        }
    }
}

fn validate(path: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    let (label, net) = match &path {
        Some(p) => (
            p.display().to_string(),
            parse_network_unchecked(&read_text(p)?).map_err(|e| at_path(p, e))?,
        ),
        None => ("bundled benchmark".to_string(), benchmark::benchmark_network()),
    };
    let report = validate_network(&net);
    if !report.is_valid() {
        return Err(Error::Io {
            path: label,
            message: Error::Validation(report.violations.iter().map(|v| v.to_string()).collect()).to_string(),
        });
    }
    writeln!(
        out,
        "{label}: valid ({} buses, {} branches, {} generators)",
        net.bus_count(),
        net.branches().len(),
        net.generators().len()
    )
    .map_err(write_error)?;
    Ok(EXIT_OK)
}

fn write_error(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    }
}

fn solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let net = cfg.load_network()?;
    let (name, scenario) = cfg.load_scenario()?;
    let profiles = cfg.load_profiles()?;
    let IntervalSelection::Single(slot) = cfg.intervals else {
        unreachable!("solve always runs one interval")
    };
    let outcome = evaluate_at(&net, &scenario, &profiles, slot)?;
    let sol = &outcome.solution;
    let h = &outcome.report.histogram;
    let s_base_kva = net.s_base_mva() * 1000.0;

    let mut text = String::new();
    text.push_str(&format!("scenario {name}, interval {slot} ({})\n", clock(slot)));
    text.push_str(&format!(
        "{} after {} iterations, max mismatch {:.3e} pu\n",
        if sol.converged { "converged" } else { "DIVERGED" },
        sol.iterations,
        sol.max_mismatch
    ));
    let (vmin_bus, vmin) = sol
        .voltages
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm()))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    text.push_str(&format!("min voltage {vmin:.4} pu at {}\n", net.buses()[vmin_bus].id));
    let slack = sol.slack_injection * s_base_kva;
    let losses = total_losses(sol) * s_base_kva;
    text.push_str(&format!(
        "slack supply {:.1} kW {:.1} kvar, losses {:.1} kW {:.1} kvar\n",
        slack.re, slack.im, losses.re, losses.im
    ));
    text.push_str(&format!(
        "bins: below_40={} 40_80={} 80_100={} 100_150={} gt_150={}\n",
        h.below_40, h.bin_40_80, h.bin_80_100, h.bin_100_150, h.bin_gt_150
    ));
    let congested = congested_elements(&outcome.report.branches, 80.0)?;
    text.push_str(&format!("branches at or above 80%: {}\n", congested.len()));
    for b in &congested {
        text.push_str(&format!("  {:>7.1}%  {:<11} {}\n", b.loading_percent, b.kind.as_str(), b.branch));
    }
    out.write_all(text.as_bytes()).map_err(write_error)?;

    if let Some(dir) = &cfg.out {
        write_report(dir, &[(name, outcome.report)], cfg.format)?;
    }
    Ok(if sol.converged { EXIT_OK } else { EXIT_DIVERGED })
}

fn sweep(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let net = cfg.load_network()?;
    let (name, scenario) = cfg.load_scenario()?;
    let profiles = cfg.load_profiles()?;
    let result = run_sweep(&net, &scenario, &profiles, &cfg.intervals.slots())?;
    let table = emit_sweep(&net, &result, cfg.format)?;
    out.write_all(table.as_bytes()).map_err(write_error)?;
    if let Some(dir) = &cfg.out {
        write_text(&dir.join(format!("sweep_{}.{}", crate::io::slug(&name), cfg.format.extension())), &table)?;
    }
    let diverged = result.diverged();
    if diverged.is_empty() {
        Ok(EXIT_OK)
    } else {
        let list: Vec<String> = diverged.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(err, "solver diverged in intervals: {}", list.join(", "));
        Ok(EXIT_DIVERGED)
    }
}

fn report(details: &[PathBuf], format: ReportFormat, dir: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let mut rows = Vec::with_capacity(details.len());
    for path in details {
        let detail_format = if path.extension().is_some_and(|x| x == "json") {
            ReportFormat::JsonText
        } else {
            ReportFormat::Csv
        };
        let parsed = parse_detail(&read_text(path)?, detail_format).map_err(|e| at_path(path, e))?;
        let stem = file_stem(path);
        let name = stem.strip_prefix("detail_").unwrap_or(&stem).to_string();
        rows.push(SummaryRow::new(name, parsed.histogram));
    }
    let text = emit_summary(&rows, format);
    out.write_all(text.as_bytes()).map_err(write_error)?;
    if let Some(dir) = dir {
        write_text(&dir.join(format!("summary.{}", format.extension())), &text)?;
    }
    Ok(EXIT_OK)
}

/// Writes the benchmark network, scenarios and profiles under `dir`.
pub fn write_benchmark_files(dir: &Path) -> Result<()> {
    let bench = build_benchmark();
    write_text(&dir.join("network.json"), &emit_network(&bench.network))?;
    for s in &bench.scenarios {
        write_text(&dir.join("scenarios").join(format!("{}.json", s.key)), &emit_scenario(&s.scenario))?;
    }
    for (id, profile) in &bench.profiles {
        write_text(&dir.join("profiles").join(format!("{id}.csv")), &emit_profile_csv(profile))?;
    }
    Ok(())
}

fn run_benchmark(dir: &Path, slot: usize, format: ReportFormat, out: &mut dyn Write) -> Result<i32> {
    write_benchmark_files(dir)?;
    let bench = build_benchmark();
    let mut results: Vec<(String, CongestionReport)> = Vec::new();
    let mut diverged = Vec::new();
    for s in &bench.scenarios {
        let outcome = evaluate_at(&bench.network, &s.scenario, &bench.profiles, slot)?;
        if !outcome.solution.converged {
            diverged.push(s.key);
        }
        results.push((s.key.to_string(), outcome.report));
    }
    write_report(&dir.join("report"), &results, format)?;
    let rows: Vec<SummaryRow> = bench
        .scenarios
        .iter()
        .zip(&results)
        .map(|(s, (_, r))| SummaryRow::new(s.label, r.histogram))
        .collect();
    out.write_all(emit_summary(&rows, format).as_bytes()).map_err(write_error)?;
    Ok(if diverged.is_empty() { EXIT_OK } else { EXIT_DIVERGED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gridstress").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = run_args(&["solve", "--bogus"]);
        assert_eq!(code, EXIT_DIAGNOSTICS);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn interval_out_of_range_is_rejected() {
        assert_eq!(run_args(&["solve", "--interval", "96"]).0, EXIT_DIAGNOSTICS);
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("benchmark"));
    }

    #[test]
    fn clock_labels() {
        assert_eq!(clock(36), "09:00");
        assert_eq!(clock(95), "23:45");
    }
}
