//! Parsing and emission of network, scenario, profile and report files.
//!
//! Network and scenario files are JSON documents with unknown keys rejected.
//! Emission is canonical: pretty-printed with a trailing newline, fields in
//! declaration order and floats in shortest round-trip form, so that
//! `emit(parse(canonical)) == canonical` byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use crate::congestion::{bin_branches, BranchLoading, CongestionHistogram, CongestionReport, LoadingBin};
use crate::error::{Error, Result};
use crate::network::{validate_network, Branch, Bus, CableType, ElementKind, Generator, Network};
use crate::scenario::{normalize_profile, slot_of_time, LoadProfile, ProfileSet, Scenario, SweepResult, SLOTS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ReportFormat {
    #[default]
    Csv,
    JsonText,
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::JsonText => "json",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    s_base_mva: f64,
    cable_catalog: Vec<CableType>,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    generators: Vec<Generator>,
}

fn json_error(e: serde_json::Error) -> Error {
    let full = e.to_string();
    let message = match full.rsplit_once(" at line ") {
        Some((m, _)) => m.to_string(),
        None => full,
    };
    match e.classify() {
        Category::Syntax | Category::Eof => Error::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        },
        Category::Data => Error::Schema {
            line: Some(e.line()),
            message,
        },
        Category::Io => Error::Io {
            path: String::new(),
            message,
        },
    }
}

fn to_canonical<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Parses a network document without running validation.
pub fn parse_network_unchecked(text: &str) -> Result<Network> {
    let file: NetworkFile = serde_json::from_str(text).map_err(json_error)?;
    Ok(Network::new(
        file.s_base_mva,
        file.cable_catalog,
        file.buses,
        file.branches,
        file.generators,
    ))
}

/// Parses a network document and requires it to pass validation.
pub fn parse_network_file(text: &str) -> Result<Network> {
    let net = parse_network_unchecked(text)?;
    validate_network(&net).into_result()?;
    Ok(net)
}

pub fn emit_network(net: &Network) -> String {
    to_canonical(&NetworkFile {
        s_base_mva: net.s_base_mva(),
        cable_catalog: net.cable_catalog().to_vec(),
        buses: net.buses().to_vec(),
        branches: net.branches().to_vec(),
        generators: net.generators().to_vec(),
    })
}

pub fn parse_scenario_file(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(json_error)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn emit_scenario(scenario: &Scenario) -> String {
    to_canonical(scenario)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    Error::Schema {
        line,
        message: match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn record_line(record: &csv::StringRecord) -> Option<usize> {
    record.position().map(|p| p.line() as usize)
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, index: usize, name: &str) -> Result<T> {
    let raw = record.get(index).unwrap_or("");
    raw.parse().map_err(|_| Error::Schema {
        line: record_line(record),
        message: format!("column `{name}`: cannot parse `{raw}`"),
    })
}

/// Parses a profile CSV. Two layouts are accepted: `slot,coefficient` with
/// slots 0 to 95 in order and already-normalized values, or
/// `timestamp,kw` with one `HH:MM` row per slot in any order, normalized on
/// ingest.
pub fn parse_profile_csv(id: &str, text: &str) -> Result<LoadProfile> {
    let mut rdr = reader(text);
    let headers: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    match header_refs.as_slice() {
        ["slot", "coefficient"] => {
            let mut coefficients = Vec::with_capacity(SLOTS_PER_DAY);
            for record in rdr.records() {
                let record = record.map_err(csv_error)?;
                let slot: usize = parse_field(&record, 0, "slot")?;
                if slot != coefficients.len() {
                    return Err(Error::Schema {
                        line: record_line(&record),
                        message: format!("expected slot {}, found {slot}", coefficients.len()),
                    });
                }
                coefficients.push(parse_field::<f64>(&record, 1, "coefficient")?);
            }
            check_slot_count(id, coefficients.len())?;
            LoadProfile::from_coefficients(id, coefficients)
        }
        ["timestamp", "kw"] => {
            let mut series: Vec<Option<f64>> = vec![None; SLOTS_PER_DAY];
            for record in rdr.records() {
                let record = record.map_err(csv_error)?;
                let stamp = record.get(0).unwrap_or("");
                let slot = slot_of_time(stamp).ok_or_else(|| Error::Schema {
                    line: record_line(&record),
                    message: format!("timestamp `{stamp}` is not a 15-minute HH:MM time"),
                })?;
                if series[slot].is_some() {
                    return Err(Error::Schema {
                        line: record_line(&record),
                        message: format!("timestamp `{stamp}` repeated"),
                    });
                }
                series[slot] = Some(parse_field(&record, 1, "kw")?);
            }
            let filled: Vec<f64> = series.iter().flatten().copied().collect();
            check_slot_count(id, filled.len())?;
            normalize_profile(id, &filled)
        }
        other => Err(Error::Schema {
            line: Some(1),
            message: format!(
                "profile header must be `slot,coefficient` or `timestamp,kw`, found `{}`",
                other.join(",")
            ),
        }),
    }
}

fn check_slot_count(id: &str, n: usize) -> Result<()> {
    if n != SLOTS_PER_DAY {
        return Err(Error::InvalidProfile(format!(
            "profile `{id}` has {n} slots, expected {SLOTS_PER_DAY}"
        )));
    }
    Ok(())
}

pub fn emit_profile_csv(profile: &LoadProfile) -> String {
    let mut out = String::from("slot,coefficient\n");
    for (slot, c) in profile.coefficients().iter().enumerate() {
        out.push_str(&format!("{slot},{c}\n"));
    }
    out
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Loads every `*.csv` in `dir` as a profile whose id is the file stem.
pub fn load_profiles_dir(dir: &Path) -> Result<ProfileSet> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let mut set = ProfileSet::new();
    for path in paths {
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let profile = parse_profile_csv(&id, &read_text(&path)?).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        set.insert(id, profile);
    }
    Ok(set)
}

pub fn write_profiles_dir(dir: &Path, profiles: &ProfileSet) -> Result<()> {
    for (id, profile) in profiles {
        write_text(&dir.join(format!("{id}.csv")), &emit_profile_csv(profile))?;
    }
    Ok(())
}

/// One row of the scenario summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryRow {
    pub scenario: String,
    pub histogram: CongestionHistogram,
}

impl SummaryRow {
    pub fn new(scenario: impl Into<String>, histogram: CongestionHistogram) -> Self {
        Self {
            scenario: scenario.into(),
            histogram,
        }
    }
}

const SUMMARY_HEADER: [&str; 5] = ["scenario", "bin_40_80", "bin_80_100", "bin_100_150", "bin_gt_150"];

/// Summary table: one row per scenario, the four reported bins as columns.
/// The CSV form omits the below-40 count; the JSON form keeps it.
pub fn emit_summary(rows: &[SummaryRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(SUMMARY_HEADER).expect("in-memory write");
            for row in rows {
                let mut record = vec![row.scenario.clone()];
                record.extend(row.histogram.reported().iter().map(|c| c.to_string()));
                w.write_record(&record).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
        ReportFormat::JsonText => to_canonical(&rows),
    }
}

/// Parses a summary table. In CSV, a `--` cell reads as zero.
pub fn parse_summary(text: &str, format: ReportFormat) -> Result<Vec<SummaryRow>> {
    match format {
        ReportFormat::Csv => {
            let mut rdr = reader(text);
            let headers = rdr.headers().map_err(csv_error)?.clone();
            if headers.iter().ne(SUMMARY_HEADER) {
                return Err(Error::Schema {
                    line: Some(1),
                    message: format!("summary header must be `{}`", SUMMARY_HEADER.join(",")),
                });
            }
            let mut rows = Vec::new();
            for record in rdr.records() {
                let record = record.map_err(csv_error)?;
                let mut counts = [0usize; 4];
                for (k, count) in counts.iter_mut().enumerate() {
                    *count = match record.get(k + 1) {
                        Some("--") => 0,
                        _ => parse_field(&record, k + 1, SUMMARY_HEADER[k + 1])?,
                    };
                }
                rows.push(SummaryRow::new(&record[0], CongestionHistogram::from_reported(counts)));
            }
            Ok(rows)
        }
        ReportFormat::JsonText => serde_json::from_str(text).map_err(json_error),
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetailRecord {
    branch: String,
    kind: String,
    loading_percent: f64,
    bin: String,
}

/// Per-branch detail: `branch,kind,loading_percent,bin`, in network order.
pub fn emit_detail(branches: &[BranchLoading], format: ReportFormat) -> String {
    let records: Vec<DetailRecord> = branches
        .iter()
        .map(|b| DetailRecord {
            branch: b.branch.clone(),
            kind: b.kind.as_str().to_string(),
            loading_percent: b.loading_percent,
            bin: b.bin().label().to_string(),
        })
        .collect();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["branch", "kind", "loading_percent", "bin"]).expect("in-memory write");
            for r in &records {
                w.write_record([
                    r.branch.as_str(),
                    r.kind.as_str(),
                    &r.loading_percent.to_string(),
                    r.bin.as_str(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
        ReportFormat::JsonText => to_canonical(&records),
    }
}

/// Parses a detail listing back into a report. The `bin` column must agree
/// with the loading.
pub fn parse_detail(text: &str, format: ReportFormat) -> Result<CongestionReport> {
    let records: Vec<(DetailRecord, Option<usize>)> = match format {
        ReportFormat::Csv => {
            let mut rdr = reader(text);
            let headers = rdr.headers().map_err(csv_error)?.clone();
            if headers.iter().ne(["branch", "kind", "loading_percent", "bin"]) {
                return Err(Error::Schema {
                    line: Some(1),
                    message: "detail header must be `branch,kind,loading_percent,bin`".into(),
                });
            }
            let mut out = Vec::new();
            for record in rdr.records() {
                let record = record.map_err(csv_error)?;
                let line = record_line(&record);
                out.push((
                    DetailRecord {
                        branch: record[0].to_string(),
                        kind: record[1].to_string(),
                        loading_percent: parse_field(&record, 2, "loading_percent")?,
                        bin: record.get(3).unwrap_or("").to_string(),
                    },
                    line,
                ));
            }
            out
        }
        ReportFormat::JsonText => {
            let records: Vec<DetailRecord> = serde_json::from_str(text).map_err(json_error)?;
            records.into_iter().map(|r| (r, None)).collect()
        }
    };
    let mut branches = Vec::with_capacity(records.len());
    for (r, line) in records {
        let kind = ElementKind::parse(&r.kind).ok_or_else(|| Error::Schema {
            line,
            message: format!("unknown element kind `{}`", r.kind),
        })?;
        let loading = BranchLoading {
            branch: r.branch,
            kind,
            loading_percent: r.loading_percent,
        };
        if LoadingBin::parse(&r.bin) != Some(loading.bin()) {
            return Err(Error::Schema {
                line,
                message: format!(
                    "branch `{}`: bin `{}` does not match loading {} %",
                    loading.branch, r.bin, loading.loading_percent
                ),
            });
        }
        branches.push(loading);
    }
    bin_branches(branches)
}

/// File-system friendly form of a scenario name.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    out.trim_end_matches('_').to_string()
}

/// Writes `summary.<ext>` plus one `detail_<scenario>.<ext>` per scenario.
/// Returns the paths written, summary first.
pub fn write_report(out_dir: &Path, scenarios: &[(String, CongestionReport)], format: ReportFormat) -> Result<Vec<PathBuf>> {
    if scenarios.is_empty() {
        return Err(Error::InvalidInput("a report needs at least one scenario".into()));
    }
    let ext = format.extension();
    let rows: Vec<SummaryRow> = scenarios
        .iter()
        .map(|(name, r)| SummaryRow::new(name.clone(), r.histogram))
        .collect();
    let mut written = vec![out_dir.join(format!("summary.{ext}"))];
    write_text(&written[0], &emit_summary(&rows, format))?;
    for (name, report) in scenarios {
        let path = out_dir.join(format!("detail_{}.{ext}", slug(name)));
        write_text(&path, &emit_detail(&report.branches, format))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct IntervalRecord {
    interval: usize,
    converged: bool,
    iterations: usize,
    max_mismatch: f64,
    max_loading_percent: f64,
    min_voltage_pu: f64,
    ev_demand_kw: f64,
    ev_served_kw: f64,
    below_40: usize,
    bin_40_80: usize,
    bin_80_100: usize,
    bin_100_150: usize,
    bin_gt_150: usize,
}

#[derive(Debug, Serialize)]
struct SweepDocument {
    mode: &'static str,
    diverged: Vec<usize>,
    ev_demanded_kwh: f64,
    ev_served_kwh: f64,
    ev_unserved_kwh: f64,
    intervals: Vec<IntervalRecord>,
}

/// Per-interval status table of a sweep.
pub fn emit_sweep(net: &Network, sweep: &SweepResult, format: ReportFormat) -> Result<String> {
    let mut records = Vec::with_capacity(sweep.intervals.len());
    for r in &sweep.intervals {
        let h = CongestionReport::from_solution(net, &r.solution)?.histogram;
        records.push(IntervalRecord {
            interval: r.interval,
            converged: r.solution.converged,
            iterations: r.solution.iterations,
            max_mismatch: r.solution.max_mismatch,
            max_loading_percent: r.solution.max_loading(),
            min_voltage_pu: r.solution.min_voltage(),
            ev_demand_kw: r.ev_demand_kw,
            ev_served_kw: r.ev_served_kw,
            below_40: h.below_40,
            bin_40_80: h.bin_40_80,
            bin_80_100: h.bin_80_100,
            bin_100_150: h.bin_100_150,
            bin_gt_150: h.bin_gt_150,
        });
    }
    Ok(match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r).map_err(csv_error)?;
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
        ReportFormat::JsonText => to_canonical(&SweepDocument {
            mode: match sweep.mode {
                crate::scenario::SweepMode::Independent => "independent",
                crate::scenario::SweepMode::Sequential => "sequential",
            },
            diverged: sweep.diverged(),
            ev_demanded_kwh: sweep.ledger.demanded_kwh(),
            ev_served_kwh: sweep.ledger.served_kwh(),
            ev_unserved_kwh: sweep.ledger.queued_kwh(),
            intervals: records,
        }),
    })
}

/// Injection vector as `bus,p_pu,q_pu` in network order.
pub fn emit_injections(net: &Network, inj: &crate::powerflow::InjectionSet) -> String {
    let mut out = String::from("bus,p_pu,q_pu\n");
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for (bus, s) in net.buses().iter().zip(inj.values()) {
        w.write_record([bus.id.as_str(), &s.re.to_string(), &s.im.to_string()])
            .expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("utf-8 input"));
    out
}

/// Parses the output of [`emit_injections`] into `bus -> (p, q)`.
pub fn parse_injections(text: &str) -> Result<BTreeMap<String, (f64, f64)>> {
    let mut rdr = reader(text);
    let mut out = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let p = parse_field(&record, 1, "p_pu")?;
        let q = parse_field(&record, 2, "q_pu")?;
        out.insert(record[0].to_string(), (p, q));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BusKind, NominalLoad};
    use crate::scenario::{ev_step_profile, pv_half_sine_profile, Bindings, ControllerKind, ParkingLot};

    fn small_network() -> Network {
        Network::new(
            10.0,
            vec![CableType::new("MV", 0.136, 0.16)],
            vec![
                Bus::new("Pole", BusKind::Slack, 4.16, NominalLoad::default()),
                Bus::new("Hall, East", BusKind::Load, 4.16, NominalLoad::new(250.5)),
                Bus::new("Lot", BusKind::Load, 0.48, NominalLoad::with_reactive(10.0, 2.0)),
            ],
            vec![
                Branch::cable("Pole", "Hall, East", "MV", 0.25, 5000.0),
                Branch::transformer("Hall, East", "Lot", 5.75, 1500.0),
            ],
            vec![Generator::grid_supply("Pole", 20_000.0), Generator::pv_site("Lot", 467.0)],
        )
    }

    #[test]
    fn network_round_trip_is_canonical() {
        let net = small_network();
        let text = emit_network(&net);
        let parsed = parse_network_file(&text).unwrap();
        assert_eq!(parsed, net);
        assert_eq!(emit_network(&parsed), text);
    }

    #[test]
    fn missing_key_is_a_schema_violation_naming_it() {
        let text = emit_network(&small_network()).replace("\"s_base_mva\": 10.0,", "");
        match parse_network_file(&text) {
            Err(Error::Schema { message, .. }) => assert!(message.contains("s_base_mva"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_and_syntax_errors_are_distinct() {
        let text = emit_network(&small_network()).replacen("{", "{\n  \"extra\": 1,", 1);
        assert!(matches!(parse_network_file(&text), Err(Error::Schema { .. })));
        match parse_network_file("{\n  \"s_base_mva\": 10.0,\n  oops\n}") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_failure_is_reported() {
        let text = emit_network(&small_network()).replace("\"slack\"", "\"load\"");
        match parse_network_file(&text) {
            Err(Error::Validation(v)) => assert!(v.iter().any(|m| m.starts_with("no slack"))),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_network_unchecked(&text).is_ok());
    }

    #[test]
    fn scenario_round_trip() {
        let bindings = Bindings {
            building_profile: Some("campus".into()),
            ev_profile: Some("ev_step".into()),
            parking_lots: vec![ParkingLot::new("B3 Structure", 1760, "Parking B3")],
            ..Default::default()
        };
        let s = Scenario::new(0.25, true, ControllerKind::OneThirdStagger, bindings);
        let text = emit_scenario(&s);
        assert!(text.contains("\"one_third_stagger\""));
        assert!(!text.contains("allow_any_charger_kw"));
        assert_eq!(parse_scenario_file(&text).unwrap(), s);
        assert!(parse_scenario_file(&text.replace("0.25", "1.25")).is_err());
    }

    #[test]
    fn profile_csv_round_trip() {
        for p in [ev_step_profile(), pv_half_sine_profile()] {
            let text = emit_profile_csv(&p);
            assert_eq!(parse_profile_csv(p.id(), &text).unwrap(), p);
        }
    }

    #[test]
    fn raw_profile_is_normalized() {
        let mut text = String::from("timestamp,kw\n");
        for slot in (0..96).rev() {
            text.push_str(&format!("{:02}:{:02},{}\n", slot / 4, (slot % 4) * 15, slot * 2));
        }
        let p = parse_profile_csv("raw", &text).unwrap();
        assert_eq!(p.at(95).unwrap(), 1.0);
        assert_eq!(p.at(0).unwrap(), 0.0);
        assert_eq!(p.at(19).unwrap(), 38.0 / 190.0);
    }

    #[test]
    fn bad_profiles_are_rejected() {
        assert!(parse_profile_csv("x", "slot,value\n0,1\n").is_err());
        assert!(parse_profile_csv("x", "slot,coefficient\n0,1\n").is_err());
        let mut skipped = String::from("slot,coefficient\n");
        for slot in (0..97).filter(|&s| s != 5) {
            skipped.push_str(&format!("{slot},1\n"));
        }
        match parse_profile_csv("x", &skipped) {
            Err(Error::Schema { line, .. }) => assert_eq!(line, Some(7)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_histogram_is_a_row_of_zeros() {
        let text = emit_summary(&[SummaryRow::new("empty", CongestionHistogram::default())], ReportFormat::Csv);
        assert_eq!(text, "scenario,bin_40_80,bin_80_100,bin_100_150,bin_gt_150\nempty,0,0,0,0\n");
    }

    #[test]
    fn summary_dashes_read_as_zero() {
        let rows = parse_summary(
            "scenario,bin_40_80,bin_80_100,bin_100_150,bin_gt_150\nCurrent Grid,2,--,--,--\n",
            ReportFormat::Csv,
        )
        .unwrap();
        assert_eq!(rows[0].histogram.reported(), [2, 0, 0, 0]);
    }

    #[test]
    fn summary_round_trips_in_both_formats() {
        let rows = vec![
            SummaryRow::new("25% EV Load", CongestionHistogram::from_reported([9, 4, 10, 8])),
            SummaryRow::new(
                "with, comma",
                CongestionHistogram {
                    below_40: 3,
                    ..CongestionHistogram::from_reported([1, 0, 0, 2])
                },
            ),
        ];
        let json = emit_summary(&rows, ReportFormat::JsonText);
        assert_eq!(parse_summary(&json, ReportFormat::JsonText).unwrap(), rows);
        let csv_text = emit_summary(&rows, ReportFormat::Csv);
        let back = parse_summary(&csv_text, ReportFormat::Csv).unwrap();
        assert_eq!(back[0], rows[0]);
        assert_eq!(back[1].histogram.reported(), rows[1].histogram.reported());
        assert_eq!(emit_summary(&back, ReportFormat::Csv), csv_text);
    }

    #[test]
    fn detail_round_trip_preserves_histogram() {
        let branches = vec![
            BranchLoading {
                branch: "A -> B".into(),
                kind: ElementKind::Line,
                loading_percent: 79.99999999999999,
            },
            BranchLoading {
                branch: "B -> C".into(),
                kind: ElementKind::Transformer,
                loading_percent: 0.1 + 0.2,
            },
        ];
        let report = bin_branches(branches).unwrap();
        for format in [ReportFormat::Csv, ReportFormat::JsonText] {
            let text = emit_detail(&report.branches, format);
            assert_eq!(parse_detail(&text, format).unwrap(), report);
        }
    }

    #[test]
    fn detail_with_wrong_bin_is_rejected() {
        let text = "branch,kind,loading_percent,bin\nA -> B,line,85,40_80\n";
        assert!(matches!(parse_detail(text, ReportFormat::Csv), Err(Error::Schema { line: Some(2), .. })));
    }

    #[test]
    fn unwritable_report_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let report = CongestionReport::default();
        let err = write_report(&blocker.join("sub"), &[("s".into(), report)], ReportFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("25% EV + PV + LM"), "25_ev_pv_lm");
        assert_eq!(slug("Base"), "base");
    }
}
