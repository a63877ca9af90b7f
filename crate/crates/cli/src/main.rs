//! Command-line front end for the free-space optical network simulator.
//!
//! Subcommands mirror the pipeline stages: pass prediction, weather
//! reduction, link-budget evaluation, availability and throughput analysis,
//! cloud correlation, and the full configuration sweep with CSV tables and
//! SVG charts. Identical invocations (config + seed) produce byte-identical
//! outputs.

mod chart;
mod report;

use chart::{bar_chart, heatmap, line_chart, scatter_chart, BarGroup, LineSeries};
use fsonet_core::analysis::{
    availability_series, pearson_cloud_correlation, throughput, StationInput,
};
use fsonet_core::passes::pass_statistics;
use fsonet_core::scenario::{
    build_weather, check_weather_coverage, integrate, load_scenario_with_overrides, run_sweep,
    Scenario, WeatherSource,
};
use fsonet_core::weather::synth_weather;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USAGE: &str = "\
usage: fsonet <subcommand> --scenario <path> --out <dir> [options]

subcommands:
  passes         visibility passes per catalog station (passes.csv)
  weather-stats  per-station cloud statistics (weather_stats.csv)
  linkbudget     link budget per pass sample (linkbudget.csv)
  availability   network availability over the catalog (availability_monthly.csv)
  throughput     transmitted data over the catalog (throughput_monthly.csv, per_pass.csv)
  correlate      pairwise cloud correlation (correlation.csv)
  synth-weather  synthetic weather series (synth_weather.csv)
  sweep          every configuration: summary.csv, per-config tables, SVG charts

options:
  --scenario <path>      scenario config file (required)
  --out <dir>            output directory (required; created if missing)
  --set <section.key=v>  override a config value (repeatable)
  --seed <u64>           override the synthetic-weather seed
  --min-elevation <deg>  override the default elevation mask
  --threshold <frac>     override the cloud-cover outage threshold
  -h, --help             print this help
";

enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<fsonet_core::scenario::ConfigError> for CliError {
    fn from(e: fsonet_core::scenario::ConfigError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<fsonet_core::scenario::ScenarioError> for CliError {
    fn from(e: fsonet_core::scenario::ScenarioError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<fsonet_core::analysis::AnalysisError> for CliError {
    fn from(e: fsonet_core::analysis::AnalysisError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<chart::ChartError> for CliError {
    fn from(e: chart::ChartError) -> Self {
        // Charts are only rendered from data the pipeline already produced,
        // so an empty series here is a broken invariant, not bad input.
        CliError::Internal(e.to_string())
    }
}

struct Invocation {
    subcommand: String,
    scenario: PathBuf,
    out: PathBuf,
    sets: Vec<(String, String)>,
}

fn parse_args(args: &[String]) -> Result<Invocation, CliError> {
    let mut subcommand = None;
    let mut scenario = None;
    let mut out = None;
    let mut sets: Vec<(String, String)> = Vec::new();
    let mut i = 0;
    let usage = |msg: &str| CliError::Usage(msg.to_string());
    let value = |args: &[String], i: &mut usize, flag: &str| -> Result<String, CliError> {
        *i += 1;
        args.get(*i)
            .cloned()
            .ok_or(CliError::Usage(format!("{flag} needs a value")))
    };
    while i < args.len() {
        match args[i].as_str() {
            "-h" | "--help" => {
                println!("{USAGE}");
                std::process::exit(0);
            }
            "--scenario" | "-s" => {
                scenario = Some(PathBuf::from(value(args, &mut i, "--scenario")?))
            }
            "--out" | "-o" => out = Some(PathBuf::from(value(args, &mut i, "--out")?)),
            "--set" => {
                let raw = value(args, &mut i, "--set")?;
                let (key, v) = raw.split_once('=').ok_or(CliError::Usage(format!(
                    "--set expects section.key=value, got {raw:?}"
                )))?;
                sets.push((key.trim().to_string(), v.trim().to_string()));
            }
            "--seed" => {
                let v = value(args, &mut i, "--seed")?;
                v.parse::<u64>()
                    .map_err(|_| CliError::Usage(format!("bad --seed {v:?}")))?;
                sets.push(("defaults.weather_seed".to_string(), v));
            }
            "--min-elevation" => {
                let v = value(args, &mut i, "--min-elevation")?;
                v.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad --min-elevation {v:?}")))?;
                sets.push(("defaults.min_elevation_deg".to_string(), v));
            }
            "--threshold" => {
                let v = value(args, &mut i, "--threshold")?;
                v.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad --threshold {v:?}")))?;
                sets.push(("defaults.cloud_threshold".to_string(), v));
            }
            flag if flag.starts_with('-') => return Err(usage(&format!("unknown flag {flag:?}"))),
            word => {
                if subcommand.replace(word.to_string()).is_some() {
                    return Err(usage(&format!("unexpected argument {word:?}")));
                }
            }
        }
        i += 1;
    }
    let subcommand = subcommand.ok_or(usage("missing subcommand"))?;
    const KNOWN: [&str; 8] = [
        "passes",
        "weather-stats",
        "linkbudget",
        "availability",
        "throughput",
        "correlate",
        "sweep",
        "synth-weather",
    ];
    if !KNOWN.contains(&subcommand.as_str()) {
        return Err(usage(&format!("unknown subcommand {subcommand:?}")));
    }
    Ok(Invocation {
        subcommand,
        scenario: scenario.ok_or(usage("--scenario is required"))?,
        out: out.ok_or(usage("--out is required"))?,
        sets,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

fn warn_outside_validity(scenario: &Scenario) {
    let prop = fsonet_core::orbit::Propagator::new(&scenario.satellite.tle);
    if !prop.within_validity(scenario.window.start) || !prop.within_validity(scenario.window.end) {
        eprintln!(
            "warning: window {} .. {} extends beyond 30 days from the TLE epoch {}; \
             pass timing degrades with distance from the epoch",
            scenario.window.start,
            scenario.window.end,
            scenario.satellite.tle.epoch()
        );
    }
}

/// Throughput inputs for the whole station catalog.
fn catalog_inputs<'a>(
    scenario: &Scenario,
    joined: &'a [fsonet_core::scenario::StationData],
) -> Vec<StationInput<'a>> {
    joined
        .iter()
        .map(|d| {
            let station = scenario
                .station(&d.station_id)
                .expect("joined data matches catalog");
            StationInput {
                station_id: d.station_id.clone(),
                passes: &d.passes,
                weather: &d.weather,
                terminal: scenario.terminal_for(station),
                environment: scenario.environment_for(station),
            }
        })
        .collect()
}

fn run(invocation: &Invocation) -> Result<(), CliError> {
    let scenario = load_scenario_with_overrides(&invocation.scenario, &invocation.sets)?;
    warn_outside_validity(&scenario);
    std::fs::create_dir_all(&invocation.out)?;
    let out = invocation.out.as_path();

    match invocation.subcommand.as_str() {
        "passes" => {
            let weather = build_weather(&scenario)?;
            let joined = integrate(&scenario, &weather)?;
            let mut all = Vec::new();
            for d in &joined {
                let stats = pass_statistics(&d.passes);
                println!(
                    "{}: {} passes, {:.0} s total, mean {} s, mean max elevation {}",
                    d.station_id,
                    stats.count,
                    stats.total_duration_s,
                    stats
                        .mean_duration_s
                        .map_or("-".to_string(), |v| format!("{v:.0}")),
                    stats
                        .mean_max_elevation_deg
                        .map_or("-".to_string(), |v| format!("{v:.1} deg")),
                );
                all.extend(d.passes.iter().cloned());
            }
            write_file(&out.join("passes.csv"), &report::passes_csv(&all))?;
        }
        "weather-stats" => {
            let weather = build_weather(&scenario)?;
            check_weather_coverage(&scenario, &weather)?;
            write_file(
                &out.join("weather_stats.csv"),
                &report::weather_stats_csv(&weather),
            )?;
        }
        "synth-weather" => {
            let (cadence_s, seed) = match scenario.weather {
                WeatherSource::Synthetic { cadence_s, seed } => (cadence_s, seed),
                WeatherSource::Grid { .. } => (
                    fsonet_core::scenario::DEFAULT_WEATHER_CADENCE_S,
                    fsonet_core::scenario::DEFAULT_WEATHER_SEED,
                ),
            };
            let specs: Vec<(String, f64)> = scenario
                .stations
                .iter()
                .map(|s| (s.id.clone(), s.cloud_prob))
                .collect();
            let series = synth_weather(&specs, scenario.window, cadence_s, seed);
            write_file(
                &out.join("synth_weather.csv"),
                &report::synth_weather_csv(&series),
            )?;
        }
        "availability" => {
            let weather = build_weather(&scenario)?;
            check_weather_coverage(&scenario, &weather)?;
            let report = availability_series(
                &weather,
                scenario.cloud_threshold,
                scenario.availability_cadence_s,
            )?;
            write_file(
                &out.join("availability_monthly.csv"),
                &report::availability_monthly_csv(&report),
            )?;
            println!(
                "network availability: {} over {} complete months (threshold {})",
                report
                    .overall_pct
                    .map_or("-".to_string(), |v| format!("{v:.2}%")),
                report.monthly.len(),
                report.threshold
            );
            for (station, pct) in &report.per_station_pct {
                println!(
                    "  {station}: {}",
                    pct.map_or("-".to_string(), |v| format!("{v:.2}%"))
                );
            }
        }
        "throughput" => {
            let weather = build_weather(&scenario)?;
            let joined = integrate(&scenario, &weather)?;
            let inputs = catalog_inputs(&scenario, &joined);
            let summary = throughput(&inputs, &scenario.noise, scenario.satellite.c_max_bps)?;
            write_file(
                &out.join("throughput_monthly.csv"),
                &report::throughput_monthly_csv(&summary),
            )?;
            write_file(&out.join("per_pass.csv"), &report::per_pass_csv(&summary))?;
            println!(
                "transmitted {:.3} Gbit of {:.3} Gbit ideal (pdt {})",
                summary.total_bits / 1e9,
                summary.max_bits / 1e9,
                summary
                    .pdt_pct
                    .map_or("-".to_string(), |v| format!("{v:.3}%")),
            );
        }
        "linkbudget" => {
            let weather = build_weather(&scenario)?;
            let joined = integrate(&scenario, &weather)?;
            let inputs = catalog_inputs(&scenario, &joined);
            let summary = throughput(&inputs, &scenario.noise, scenario.satellite.c_max_bps)?;
            write_file(
                &out.join("linkbudget.csv"),
                &report::linkbudget_csv(&summary),
            )?;
        }
        "correlate" => {
            let weather = build_weather(&scenario)?;
            check_weather_coverage(&scenario, &weather)?;
            let matrix = pearson_cloud_correlation(&weather, scenario.availability_cadence_s)?;
            write_file(
                &out.join("correlation.csv"),
                &report::correlation_csv(&matrix),
            )?;
        }
        "sweep" => {
            let weather = build_weather(&scenario)?;
            let joined = integrate(&scenario, &weather)?;
            let results = run_sweep(&scenario, &joined)?;

            let mut summary_rows = Vec::new();
            for c in &results.configurations {
                summary_rows.push(report::SummaryRow {
                    configuration: c.name.clone(),
                    a_overall_pct: c.availability.overall_pct,
                    t_gbits: c.throughput.total_bits / 1e9,
                    pdt_pct: c.pdt_normalized_pct,
                });
                let dir = out.join(&c.name);
                write_file(
                    &dir.join("availability_monthly.csv"),
                    &report::availability_monthly_csv(&c.availability),
                )?;
                write_file(
                    &dir.join("throughput_monthly.csv"),
                    &report::throughput_monthly_csv(&c.throughput),
                )?;
                write_file(
                    &dir.join("per_pass.csv"),
                    &report::per_pass_csv(&c.throughput),
                )?;
                write_file(&dir.join("buffer.csv"), &report::buffer_csv(&c.buffer))?;
            }
            write_file(
                &out.join("summary.csv"),
                &report::summary_csv(&summary_rows),
            )?;
            if let Some(matrix) = &results.correlation {
                write_file(
                    &out.join("correlation.csv"),
                    &report::correlation_csv(&matrix.clone()),
                )?;
            }
            render_sweep_charts(out, &results)?;
            for r in &summary_rows {
                println!(
                    "{}: availability {}, transmitted {:.3} Gbit, pdt {}",
                    r.configuration,
                    r.a_overall_pct
                        .map_or("-".to_string(), |v| format!("{v:.2}%")),
                    r.t_gbits,
                    r.pdt_pct.map_or("-".to_string(), |v| format!("{v:.3}%")),
                );
            }
        }
        other => return Err(CliError::Usage(format!("unknown subcommand {other:?}"))),
    }
    Ok(())
}

fn render_sweep_charts(
    out: &Path,
    results: &fsonet_core::scenario::SweepResults,
) -> Result<(), CliError> {
    let charts = out.join("charts");

    // Months come from the first configuration with monthly data; all
    // configurations share the scenario window.
    let months: Vec<String> = results
        .configurations
        .iter()
        .find(|c| !c.availability.monthly.is_empty())
        .map(|c| {
            c.availability
                .monthly
                .iter()
                .map(|(m, _)| m.to_string())
                .collect()
        })
        .unwrap_or_default();

    if !months.is_empty() {
        let series: Vec<LineSeries> = results
            .configurations
            .iter()
            .map(|c| LineSeries {
                label: c.name.clone(),
                values: c.availability.monthly.iter().map(|(_, v)| *v).collect(),
            })
            .collect();
        let svg = line_chart(
            "Monthly network availability",
            "month",
            "availability [%]",
            &months,
            &series,
        )?;
        write_file(&charts.join("availability_monthly.svg"), &svg)?;

        let groups: Vec<BarGroup> = results
            .configurations
            .iter()
            .map(|c| {
                // Align transmitted bits onto the availability month axis.
                let values = months
                    .iter()
                    .map(|label| {
                        c.throughput
                            .per_month
                            .iter()
                            .find(|(m, _)| m.to_string() == *label)
                            .map(|(_, bits)| bits / 1e9)
                            .unwrap_or(0.0)
                    })
                    .collect();
                BarGroup {
                    label: c.name.clone(),
                    values,
                }
            })
            .collect();
        let svg = bar_chart(
            "Monthly transmitted data",
            "month",
            "transmitted [Gbit]",
            &months,
            &groups,
        )?;
        write_file(&charts.join("transmitted_monthly.svg"), &svg)?;
    }

    let names: Vec<String> = results
        .configurations
        .iter()
        .map(|c| c.name.clone())
        .collect();
    let pdt_values: Vec<f64> = results
        .configurations
        .iter()
        .map(|c| c.pdt_normalized_pct.unwrap_or(0.0))
        .collect();
    let svg = bar_chart(
        "Percentage of data transferred",
        "configuration",
        "PDT [%]",
        &names,
        &[BarGroup {
            label: "pdt".into(),
            values: pdt_values,
        }],
    )?;
    write_file(&charts.join("pdt.svg"), &svg)?;

    let points: Vec<(String, f64, f64)> = results
        .configurations
        .iter()
        .filter_map(|c| {
            c.availability
                .overall_pct
                .map(|a| (c.name.clone(), a, c.throughput.total_bits / 1e9))
        })
        .collect();
    if !points.is_empty() {
        let svg = scatter_chart(
            "Transmitted data vs availability",
            "availability [%]",
            "transmitted [Gbit]",
            &points,
        )?;
        write_file(&charts.join("availability_vs_throughput.svg"), &svg)?;
    }

    if let Some(matrix) = &results.correlation {
        let svg = heatmap("Cloud-cover correlation", &matrix.station_ids, &matrix.r)?;
        write_file(&charts.join("correlation_heatmap.svg"), &svg)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let invocation = match parse_args(&args) {
        Ok(inv) => inv,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n{USAGE}");
            return ExitCode::from(1);
        }
        Err(_) => unreachable!("argument parsing only raises usage errors"),
    };
    match run(&invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n{USAGE}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
