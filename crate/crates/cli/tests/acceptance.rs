//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them).
//!
//! Criteria cover component exactness of the link-budget chain, equation
//! recomposition, oracle equivalence for pass prediction and buffer
//! accounting, availability statistics against the closed-form independence
//! product, throughput identities, correlation sanity, the qualitative shape
//! of the bundled network-configuration experiment, and byte-exact
//! determinism of the sweep command.

use fsonet_core::analysis::{
    availability_series, buffer_simulate, pearson_cloud_correlation, throughput, DownlinkInterval,
    StationInput,
};
use fsonet_core::linkbudget::{
    antenna_gain, free_space_path_loss, link_budget, pointing_loss, shannon_capacity,
    LinkEnvironment, NoiseSpec, TerminalSpec, BOLTZMANN_J_PER_K, DEFAULT_CN2_REFERENCE,
};
use fsonet_core::orbit::{
    parse_tle_file, synthesize_tle, GeodeticSite, Propagator, TopocentricState, MU_EARTH,
};
use fsonet_core::passes::{find_passes, Pass};
use fsonet_core::rng::SplitMix64;
use fsonet_core::scenario::{build_weather, integrate, load_scenario, run_sweep};
use fsonet_core::time::{TimeWindow, UtcTime};
use fsonet_core::weather::{synth_weather, WeatherSample, WeatherSeries};
use fsonet_oracles::{
    check_well_formed_xml, closed_form_outage_oracle, elevation_scan_oracle,
    fine_step_buffer_oracle, OracleReport,
};
use std::path::{Path, PathBuf};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn pass_line(criterion: &str, detail: &str) {
    println!("[PASS] {criterion}: {detail}");
}

fn t(s: &str) -> UtcTime {
    UtcTime::parse_iso8601(s).unwrap()
}

#[test]
fn c01_link_budget_component_exactness() {
    let fspl = OracleReport::absolute(
        "FSPL 514 km @ 1550 nm",
        free_space_path_loss(514_000.0, 1550e-9).unwrap(),
        20.0 * (4.0 * std::f64::consts::PI * 514_000.0 / 1550e-9).log10(),
        0.01,
    );
    let gain = OracleReport::absolute(
        "gain 0.5 m @ 1550 nm, eta 0.6",
        antenna_gain(0.5, 1550e-9, 0.6).unwrap(),
        10.0 * (0.6 * (std::f64::consts::PI * 0.5 / 1550e-9).powi(2)).log10(),
        0.01,
    );
    let pointing = OracleReport::absolute(
        "pointing loss at sigma = theta_div/2",
        pointing_loss(7.5e-6, 15e-6).unwrap(),
        4.3429,
        1e-4,
    );
    for report in [&fspl, &gain, &pointing] {
        assert!(report.pass, "{report}");
    }
    pass_line(
        "C1 link-budget component exactness",
        &format!(
            "fspl {:.4} dB, gain {:.4} dB, pointing {:.5} dB all inside tolerance",
            fspl.main_value, gain.main_value, pointing.main_value
        ),
    );
}

#[test]
fn c02_equation_shape_conformance() {
    // Received power recomposes additively from the reported components.
    let mut rng = SplitMix64::new(0xACCE_0002);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let terminal = TerminalSpec {
            tx_power_dbw: rng.range_f64(-10.0, 20.0),
            wavelength_m: rng.range_f64(0.8e-6, 1.6e-6),
            tx_aperture_m: rng.range_f64(0.02, 0.3),
            rx_aperture_m: rng.range_f64(0.1, 1.2),
            efficiency: rng.range_f64(0.3, 1.0),
            beam_divergence_rad: rng.range_f64(5e-6, 50e-6),
            pointing_error_rad: rng.range_f64(0.0, 5e-6),
        };
        let noise = NoiseSpec {
            system_noise_temperature_k: rng.range_f64(100.0, 1000.0),
            bandwidth_hz: rng.range_f64(1e8, 1e10),
        };
        let env = LinkEnvironment::new(
            rng.range_f64(0.0, 2.0),
            rng.range_f64(0.0, 0.099),
            rng.range_f64(1e-18, 1e-14),
            rng.range_f64(0.0, 6.0),
        );
        let geometry = TopocentricState {
            time: UtcTime::from_unix_seconds(0),
            azimuth_deg: 0.0,
            elevation_deg: rng.range_f64(5.0, 90.0),
            slant_range_m: rng.range_f64(520e3, 2500e3),
        };
        let r = link_budget(&terminal, &noise, &env, &geometry).unwrap();
        let recomposed = r.tx_power_dbw + r.gain_tx_db + r.gain_rx_db
            - r.fspl_db
            - (r.pointing_loss_db
                + r.atmospheric_loss_db
                + r.cloud_loss_db.unwrap()
                + r.turbulence_loss_db
                + r.link_margin_db);
        worst = worst.max((recomposed - r.received_power_dbw.unwrap()).abs());
    }
    assert!(worst <= 1e-9, "worst recomposition deviation {worst}");

    // Capacity follows B log2(1 + SNR_linear) across twelve decades.
    let bandwidth = 1e9;
    let mut worst_rel: f64 = 0.0;
    let mut snr: f64 = 1e-6;
    while snr <= 1e6 {
        let c = shannon_capacity(bandwidth, 10.0 * snr.log10());
        let expect = bandwidth * (1.0 + snr).log2();
        worst_rel = worst_rel.max((c - expect).abs() / expect);
        snr *= 10f64.powf(0.25);
    }
    assert!(worst_rel <= 1e-12, "worst capacity deviation {worst_rel}");
    pass_line(
        "C2 equation-shape conformance",
        &format!(
            "recomposition <= {worst:.2e} dB over 1000 draws, capacity <= {worst_rel:.2e} rel"
        ),
    );
}

#[test]
fn c03_pass_prediction_oracle_equivalence() {
    let mut rng = SplitMix64::new(0xACCE_0003);
    let mut total_passes = 0usize;
    for case in 0..20u32 {
        let inclination = rng.range_f64(40.0, 100.0);
        let tle = synthesize_tle(
            50_000 + case,
            2023,
            rng.range_f64(10.0, 300.0),
            inclination,
            rng.range_f64(0.0, 360.0),
            rng.range_f64(0.0, 0.02),
            rng.range_f64(0.0, 360.0),
            rng.range_f64(0.0, 360.0),
            rng.range_f64(12.5, 15.8),
        );
        // Keep the site under the orbit's latitude band so most windows
        // actually contain passes.
        let lat_band = inclination.min(180.0 - inclination).min(60.0);
        let site = GeodeticSite::new(
            rng.range_f64(-lat_band, lat_band),
            rng.range_f64(-180.0, 180.0),
            rng.range_f64(0.0, 2500.0),
        )
        .unwrap();
        let start = tle.epoch().plus_seconds(rng.below(5 * 86_400) as i64);
        let window = TimeWindow::new(start, start.plus_seconds(12 * 3600)).unwrap();
        let mask = rng.range_f64(5.0, 20.0);

        let main = find_passes(&tle, &site, "gs", window, mask).unwrap();
        let oracle = elevation_scan_oracle(&tle, &site, window, mask);
        assert_eq!(
            main.len(),
            oracle.len(),
            "case {case}: pass count (mask {mask:.2})"
        );
        for (p, (aos, los)) in main.iter().zip(&oracle) {
            assert!(
                (p.aos.unix_seconds() - aos.unix_seconds()).abs() <= 1,
                "case {case}: AOS {} vs {aos}",
                p.aos
            );
            assert!(
                (p.los.unix_seconds() - los.unix_seconds()).abs() <= 1,
                "case {case}: LOS {} vs {los}",
                p.los
            );
        }
        total_passes += main.len();
    }
    assert!(
        total_passes >= 20,
        "fixtures produced too few passes ({total_passes}) to be meaningful"
    );
    pass_line(
        "C3 pass-prediction oracle equivalence",
        &format!("20 fixtures, {total_passes} passes, endpoints within 1 s of the 1 s scan"),
    );
}

#[test]
fn c04_kepler_law_altitude_check() {
    // The bundled element set mimics a 514 km / 97.44 deg orbit.
    let text = std::fs::read_to_string(fixture("terrasarx.tle")).unwrap();
    let tle = parse_tle_file(&text).unwrap().into_iter().next().unwrap();
    assert_eq!(tle.mean_motion_rev_day, 15.19);
    assert_eq!(tle.inclination_deg, 97.44);

    // Kepler's third law, evaluated independently of the propagator.
    let period_s = 86_400.0 / tle.mean_motion_rev_day;
    let semi_major_oracle = (MU_EARTH * (period_s / (2.0 * std::f64::consts::PI)).powi(2)).cbrt();
    let altitude_oracle_km = (semi_major_oracle - 6_378_137.0) / 1000.0;
    assert!(
        (altitude_oracle_km - 514.0).abs() <= 15.0,
        "oracle altitude {altitude_oracle_km} km"
    );

    let prop = Propagator::new(&tle);
    for k in 0..8 {
        let state = prop
            .state_at_unix(tle.epoch_unix_s + k as f64 * 700.0)
            .unwrap();
        let altitude_km = (state.radius_m() - 6_378_137.0) / 1000.0;
        assert!(
            (altitude_km - 514.0).abs() <= 15.0,
            "propagated altitude {altitude_km} km at step {k}"
        );
    }
    pass_line(
        "C4 Kepler-law altitude check",
        &format!(
            "Kepler oracle {altitude_oracle_km:.1} km, propagated radius within 514 +/- 15 km"
        ),
    );
}

#[test]
fn c05_availability_statistics_oracle() {
    let ticks = 100_000i64;
    let cadence = 60i64;
    let span = TimeWindow::new(
        t("2023-01-01T00:00:00Z"),
        t("2023-01-01T00:00:00Z").plus_seconds(cadence * (ticks - 1)),
    )
    .unwrap();
    let stations: Vec<(String, f64)> = (0..4).map(|i| (format!("s{i}"), 0.3)).collect();
    let weather = synth_weather(&stations, span, cadence, 0xACCE_0005);

    let mut previous: Option<Vec<(UtcTime, bool)>> = None;
    let mut detail = String::new();
    for k in 1..=4usize {
        let report = availability_series(&weather[..k], 0.1, cadence).unwrap();
        assert_eq!(report.series.len(), ticks as usize);
        let outage = report.outage_fraction();
        let expect = closed_form_outage_oracle(&vec![0.3; k]);
        let se = (expect * (1.0 - expect) / ticks as f64).sqrt();
        assert!(
            (outage - expect).abs() <= 3.0 * se,
            "k={k}: outage {outage:.5} vs {expect:.5} (3se {:.5})",
            3.0 * se
        );
        if let Some(prev) = &previous {
            for ((ta, a), (tb, b)) in prev.iter().zip(&report.series) {
                assert_eq!(ta, tb);
                assert!(
                    *b || !*a,
                    "availability dropped at {ta} when adding station {k}"
                );
            }
        }
        detail.push_str(&format!("k={k}: {outage:.4}~{expect:.4} "));
        previous = Some(report.series);
    }
    pass_line("C5 availability statistics oracle", detail.trim());
}

// Exact-unit throughput fixture: zero gains and losses, noise floor 0 dBW,
// so capacity is the bandwidth to float round-off.

fn unit_terminal() -> TerminalSpec {
    TerminalSpec {
        tx_power_dbw: 0.0,
        wavelength_m: 1.55e-6,
        tx_aperture_m: 1.55e-6 / std::f64::consts::PI,
        rx_aperture_m: 1.55e-6 / std::f64::consts::PI,
        efficiency: 1.0,
        beam_divergence_rad: 15e-6,
        pointing_error_rad: 0.0,
    }
}

fn unit_pass(station: &str, start: UtcTime, duration_s: i64) -> Pass {
    let slant = 1.55e-6 / (4.0 * std::f64::consts::PI);
    let mut samples = Vec::new();
    let mut at = start;
    while at <= start.plus_seconds(duration_s) {
        samples.push(TopocentricState {
            time: at,
            azimuth_deg: 0.0,
            elevation_deg: 90.0,
            slant_range_m: slant,
        });
        at = at.plus_seconds(10);
    }
    Pass {
        station_id: station.into(),
        aos: start,
        los: start.plus_seconds(duration_s),
        duration_s: duration_s as f64,
        max_elevation_deg: 90.0,
        samples,
    }
}

fn constant_weather(id: &str, cc: f64, start: UtcTime, end: UtcTime) -> WeatherSeries {
    let mut samples = Vec::new();
    let mut at = start;
    while at <= end {
        samples.push(WeatherSample {
            time: at,
            cloud_fraction: cc,
            cn2: None,
        });
        at = at.plus_seconds(900);
    }
    WeatherSeries {
        station_id: id.into(),
        samples,
    }
}

#[test]
fn c06_throughput_identities() {
    let start = t("2023-06-01T00:00:00Z");
    let bandwidth = 1e9;
    let noise = NoiseSpec {
        system_noise_temperature_k: 1.0 / (BOLTZMANN_J_PER_K * bandwidth),
        bandwidth_hz: bandwidth,
    };
    let clear = constant_weather("gs", 0.0, start, start.plus_seconds(3600));
    let pass = unit_pass("gs", start, 600);
    let input = StationInput {
        station_id: "gs".into(),
        passes: std::slice::from_ref(&pass),
        weather: &clear,
        terminal: unit_terminal(),
        environment: LinkEnvironment::new(0.0, 0.0, DEFAULT_CN2_REFERENCE, 0.0),
    };
    let summary = throughput(&[input], &noise, 2.0 * bandwidth).unwrap();
    let pdt = summary.pdt_pct.unwrap();
    assert!(
        (pdt - 50.0).abs() < 1e-9,
        "600 s pass at c_max/2 must give 50.000% PDT, got {pdt}"
    );

    let cloudy = constant_weather("gs", 1.0, start, start.plus_seconds(3600));
    let blocked_input = StationInput {
        station_id: "gs".into(),
        passes: std::slice::from_ref(&pass),
        weather: &cloudy,
        terminal: unit_terminal(),
        environment: LinkEnvironment::new(0.0, 0.0, DEFAULT_CN2_REFERENCE, 0.0),
    };
    let blocked = throughput(&[blocked_input], &noise, 2.0 * bandwidth).unwrap();
    assert_eq!(blocked.total_bits, 0.0);
    assert!(blocked.max_bits > 0.0);
    assert_eq!(blocked.pdt_pct, Some(0.0));
    pass_line(
        "C6 throughput identities",
        &format!("half-rate fixture pdt {pdt:.3}%, all-blocked fixture pdt 0.000%"),
    );
}

#[test]
fn c07_buffer_conservation() {
    // Conservation exact in integer bits on randomized pass/rate fixtures.
    let mut rng = SplitMix64::new(0xACCE_0007);
    let start = t("2023-06-01T00:00:00Z");
    for case in 0..50 {
        let span = TimeWindow::new(start, start.plus_seconds(2 * 86_400)).unwrap();
        let mut passes = Vec::new();
        let mut cursor = rng.below(4000) as i64;
        while cursor < 2 * 86_400 - 1000 {
            let dur = rng.below(800) as i64 + 60;
            passes.push(DownlinkInterval {
                aos: start.plus_seconds(cursor),
                los: start.plus_seconds(cursor + dur),
                rate_bps: rng.below(2_000_000_000),
            });
            cursor += dur + rng.below(15_000) as i64 + 10;
        }
        let generation = rng.below(200_000_000);
        let capacity = rng.below(500_000_000_000) + 1;
        let sim = buffer_simulate(&passes, generation, capacity, span);
        for point in &sim.points {
            assert_eq!(
                point.generated_bits,
                point.downlinked_bits + point.lost_bits + point.fill_bits,
                "conservation violated in case {case} at {}",
                point.time
            );
        }
    }

    // Seven synthetic days of the bundled scenario against the 1 s oracle.
    let text = std::fs::read_to_string(fixture("terrasarx.tle")).unwrap();
    let tle = parse_tle_file(&text).unwrap().into_iter().next().unwrap();
    let site = GeodeticSite::new(28.30, -16.51, 2390.0).unwrap();
    let span = TimeWindow::new(tle.epoch(), tle.epoch().plus_seconds(7 * 86_400)).unwrap();
    let passes = find_passes(&tle, &site, "tenerife", span, 10.0).unwrap();
    assert!(
        passes.len() >= 7,
        "expected daily passes, got {}",
        passes.len()
    );
    let rate = 1_000_000_000u64;
    let generation = 13_888_889u64; // 1.2 Tb/day
    let capacity = 390_000_000_000u64;
    let intervals: Vec<DownlinkInterval> = passes
        .iter()
        .map(|p| DownlinkInterval {
            aos: p.aos,
            los: p.los,
            rate_bps: rate,
        })
        .collect();
    let raw: Vec<(UtcTime, UtcTime, u64)> = passes.iter().map(|p| (p.aos, p.los, rate)).collect();
    let main = buffer_simulate(&intervals, generation, capacity, span).totals;
    let oracle = fine_step_buffer_oracle(&raw, generation, capacity, span);
    let reports = [
        OracleReport::absolute(
            "generated",
            main.generated_bits as f64,
            oracle.generated_bits as f64,
            1e6,
        ),
        OracleReport::absolute(
            "downlinked",
            main.downlinked_bits as f64,
            oracle.downlinked_bits as f64,
            1e6,
        ),
        OracleReport::absolute("lost", main.lost_bits as f64, oracle.lost_bits as f64, 1e6),
        OracleReport::absolute(
            "final fill",
            main.final_fill_bits as f64,
            oracle.final_fill_bits as f64,
            1e6,
        ),
    ];
    for r in &reports {
        assert!(r.pass, "{r}");
    }
    pass_line(
        "C7 buffer conservation",
        &format!(
            "50 random fixtures conserve exactly; 7-day totals within 1 Mb of the 1 s oracle \
             (downlinked {:.3} Gb, lost {:.3} Gb)",
            main.downlinked_bits as f64 / 1e9,
            main.lost_bits as f64 / 1e9
        ),
    );
}

#[test]
fn c08_correlation_sanity() {
    let ticks = 100_000i64;
    let span = TimeWindow::new(
        t("2023-01-01T00:00:00Z"),
        t("2023-01-01T00:00:00Z").plus_seconds(60 * (ticks - 1)),
    )
    .unwrap();
    let series = synth_weather(
        &[("a".into(), 0.4), ("b".into(), 0.4)],
        span,
        60,
        0xACCE_0008,
    );
    let base = &series[0];
    let copy = WeatherSeries {
        station_id: "copy".into(),
        samples: base.samples.clone(),
    };
    let complement = WeatherSeries {
        station_id: "inv".into(),
        samples: base
            .samples
            .iter()
            .map(|s| WeatherSample {
                time: s.time,
                cloud_fraction: 1.0 - s.cloud_fraction,
                cn2: None,
            })
            .collect(),
    };
    let matrix =
        pearson_cloud_correlation(&[base.clone(), copy, complement, series[1].clone()], 60)
            .unwrap();
    let self_r = matrix.r[0][1].unwrap();
    let complement_r = matrix.r[0][2].unwrap();
    let independent_r = matrix.r[0][3].unwrap();
    assert!((self_r - 1.0).abs() <= 1e-12, "self correlation {self_r}");
    assert!(
        (complement_r + 1.0).abs() <= 1e-12,
        "complement correlation {complement_r}"
    );
    assert!(
        independent_r.abs() < 0.02,
        "independent correlation {independent_r}"
    );
    pass_line(
        "C8 correlation sanity",
        &format!(
            "self {self_r:.14}, complement {complement_r:.14}, independent {independent_r:+.5}"
        ),
    );
}

#[test]
fn c09_experiment_shape_on_bundled_year() {
    let scenario = load_scenario(&fixture("terrasarx_europe.cfg")).unwrap();
    assert_eq!(scenario.stations.len(), 7);
    assert_eq!(scenario.configurations.len(), 4);
    let weather = build_weather(&scenario).unwrap();
    let joined = integrate(&scenario, &weather).unwrap();
    let results = run_sweep(&scenario, &joined).unwrap();

    let availability: Vec<f64> = results
        .configurations
        .iter()
        .map(|c| {
            c.availability
                .overall_pct
                .expect("year window has complete months")
        })
        .collect();
    let pdt: Vec<f64> = results
        .configurations
        .iter()
        .map(|c| c.pdt_normalized_pct.expect("normalized PDT"))
        .collect();

    for i in 1..4 {
        assert!(
            availability[i] > availability[i - 1],
            "availability not strictly increasing: {availability:?}"
        );
        assert!(
            pdt[i] > pdt[i - 1],
            "normalized PDT not strictly increasing: {pdt:?}"
        );
    }
    for i in 0..2 {
        let second_difference = pdt[i + 2] - 2.0 * pdt[i + 1] + pdt[i];
        assert!(
            second_difference < 0.0,
            "marginal PDT gains must diminish: {pdt:?} (d2[{i}] = {second_difference})"
        );
    }
    pass_line(
        "C9 experiment shape",
        &format!(
            "availability {:?} strictly increasing, normalized PDT {:?} concave increasing",
            availability
                .iter()
                .map(|v| format!("{v:.2}"))
                .collect::<Vec<_>>(),
            pdt.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>()
        ),
    );
}

fn collect_files(root: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let mut entries: Vec<_> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path);
            }
        }
    }
    files.sort();
    files
}

#[test]
fn c10_sweep_determinism() {
    let out_base = std::env::temp_dir().join(format!("fsonet-acceptance-{}", std::process::id()));
    let run = |suffix: &str| {
        let out = out_base.join(suffix);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_fsonet"))
            .args([
                "sweep",
                "--scenario",
                fixture("terrasarx_europe.cfg").to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--seed",
                "42",
            ])
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .expect("sweep must start");
        assert!(status.success(), "sweep exited with {status}");
        out
    };
    let a = run("a");
    let b = run("b");

    let files_a = collect_files(&a);
    let files_b = collect_files(&b);
    let rel = |files: &[PathBuf], root: &Path| -> Vec<PathBuf> {
        files
            .iter()
            .map(|f| f.strip_prefix(root).unwrap().to_path_buf())
            .collect()
    };
    assert_eq!(rel(&files_a, &a), rel(&files_b, &b), "output trees differ");
    assert!(!files_a.is_empty());

    let mut csvs = 0;
    let mut svgs = 0;
    for (fa, fb) in files_a.iter().zip(&files_b) {
        let bytes_a = std::fs::read(fa).unwrap();
        let bytes_b = std::fs::read(fb).unwrap();
        assert_eq!(bytes_a, bytes_b, "{} differs between runs", fa.display());
        match fa.extension().and_then(|e| e.to_str()) {
            Some("csv") => {
                let text = String::from_utf8(bytes_a).unwrap();
                let header = text.lines().next().unwrap_or("");
                assert!(
                    header.chars().any(|c| c.is_ascii_alphabetic()),
                    "{} lacks a header",
                    fa.display()
                );
                csvs += 1;
            }
            Some("svg") => {
                let text = String::from_utf8(bytes_a).unwrap();
                check_well_formed_xml(&text).unwrap_or_else(|e| panic!("{}: {e}", fa.display()));
                assert!(
                    !text.contains("href"),
                    "{} references external content",
                    fa.display()
                );
                svgs += 1;
            }
            _ => {}
        }
    }
    assert!(csvs >= 18, "expected the full CSV set, saw {csvs}");
    assert_eq!(svgs, 5, "expected five charts, saw {svgs}");

    let summary = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    assert_eq!(
        summary.lines().count(),
        5,
        "header plus one row per configuration"
    );

    std::fs::remove_dir_all(&out_base).ok();
    pass_line(
        "C10 determinism",
        &format!(
            "two sweep runs byte-identical across {} files ({csvs} CSV, {svgs} SVG)",
            files_a.len()
        ),
    );
}
