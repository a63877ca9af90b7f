//! Independent brute-force reference implementations for validating the
//! main pipeline.
//!
//! Nothing here is part of the shipped simulator surface: these routines
//! exist so the test suite can cross-check refined algorithms against
//! exhaustive or closed-form equivalents. Each oracle re-derives its
//! quantity through a different route than the code it checks (explicit
//! 1 s scans, bisection instead of Newton, spelled-out rotation matrices)
//! and deliberately shares no implementation with it. Speed is a non-goal.

use fsonet_core::orbit::{GeodeticSite, Propagator, TwoLineElements};
use fsonet_core::time::{TimeWindow, UtcTime};
use std::fmt;

// ─── Comparison reports ──────────────────────────────────────────────────────

/// One main-path-vs-oracle comparison with its verdict.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub case: String,
    pub main_value: f64,
    pub oracle_value: f64,
    pub absolute_deviation: f64,
    pub relative_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    /// Compare against an absolute tolerance.
    pub fn absolute(
        case: impl Into<String>,
        main_value: f64,
        oracle_value: f64,
        tolerance: f64,
    ) -> Self {
        let absolute_deviation = (main_value - oracle_value).abs();
        let relative_deviation = if oracle_value != 0.0 {
            absolute_deviation / oracle_value.abs()
        } else {
            absolute_deviation
        };
        OracleReport {
            case: case.into(),
            main_value,
            oracle_value,
            absolute_deviation,
            relative_deviation,
            tolerance,
            pass: absolute_deviation <= tolerance,
        }
    }

    /// Compare against a relative tolerance.
    pub fn relative(
        case: impl Into<String>,
        main_value: f64,
        oracle_value: f64,
        tolerance: f64,
    ) -> Self {
        let absolute_deviation = (main_value - oracle_value).abs();
        let relative_deviation = if oracle_value != 0.0 {
            absolute_deviation / oracle_value.abs()
        } else {
            absolute_deviation
        };
        OracleReport {
            case: case.into(),
            main_value,
            oracle_value,
            absolute_deviation,
            relative_deviation,
            tolerance,
            pass: relative_deviation <= tolerance,
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: main={:.6e} oracle={:.6e} |dev|={:.3e} tol={:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.case,
            self.main_value,
            self.oracle_value,
            self.absolute_deviation,
            self.tolerance
        )
    }
}

// ─── Pass detection: exhaustive 1 s elevation scan ───────────────────────────

/// Brute-force pass intervals: evaluate the elevation at every whole second
/// of the window and collect maximal runs at or above the mask. Endpoints are
/// therefore the exact first/last seconds of visibility; runs touching the
/// window edges are truncated there.
pub fn elevation_scan_oracle(
    tle: &TwoLineElements,
    site: &GeodeticSite,
    window: TimeWindow,
    min_elevation_deg: f64,
) -> Vec<(UtcTime, UtcTime)> {
    let prop = Propagator::new(tle);
    let mut intervals = Vec::new();
    let mut run_start: Option<i64> = None;
    let mut prev_above = false;
    let start = window.start.unix_seconds();
    let end = window.end.unix_seconds();
    for secs in start..=end {
        let t = UtcTime::from_unix_seconds(secs);
        let state = prop.state_at(t).expect("oracle propagation");
        let topo = fsonet_core::orbit::eci_to_topocentric(state.position_m, site, t);
        let above = topo.elevation_deg >= min_elevation_deg;
        if above && !prev_above {
            run_start = Some(secs);
        } else if !above && prev_above {
            intervals.push((
                UtcTime::from_unix_seconds(run_start.take().unwrap()),
                UtcTime::from_unix_seconds(secs - 1),
            ));
        }
        prev_above = above;
    }
    if let Some(first) = run_start {
        intervals.push((UtcTime::from_unix_seconds(first), window.end));
    }
    intervals
}

// ─── Buffer accounting: explicit 1 s stepping ────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BufferOracleTotals {
    pub generated_bits: u64,
    pub downlinked_bits: u64,
    pub lost_bits: u64,
    pub final_fill_bits: u64,
}

/// Step the onboard buffer one second at a time: generate, transmit up to
/// the strongest active pass rate, clamp overflow at capacity.
pub fn fine_step_buffer_oracle(
    passes: &[(UtcTime, UtcTime, u64)],
    generation_rate_bps: u64,
    capacity_bits: u64,
    span: TimeWindow,
) -> BufferOracleTotals {
    let mut fill: u64 = 0;
    let mut generated: u64 = 0;
    let mut downlinked: u64 = 0;
    let mut lost: u64 = 0;
    for t in span.start.unix_seconds()..span.end.unix_seconds() {
        let rate = passes
            .iter()
            .filter(|(aos, los, _)| aos.unix_seconds() <= t && los.unix_seconds() > t)
            .map(|(_, _, r)| *r)
            .max()
            .unwrap_or(0);
        generated += generation_rate_bps;
        fill += generation_rate_bps;
        let tx = fill.min(rate);
        fill -= tx;
        downlinked += tx;
        if fill > capacity_bits {
            lost += fill - capacity_bits;
            fill = capacity_bits;
        }
    }
    BufferOracleTotals {
        generated_bits: generated,
        downlinked_bits: downlinked,
        lost_bits: lost,
        final_fill_bits: fill,
    }
}

// ─── Availability: closed-form independence ──────────────────────────────────

/// Expected network outage probability for independent per-station cloud
/// probabilities: the product of the individual probabilities.
pub fn closed_form_outage_oracle(cloud_probs: &[f64]) -> f64 {
    cloud_probs.iter().product()
}

// ─── Kepler equation: bisection ──────────────────────────────────────────────

/// Solve `E - e sin E = M` by bisection on the monotone residual, to a
/// residual below 1e-12. Independent of the Newton path.
pub fn kepler_bisection_oracle(mean_anomaly_rad: f64, eccentricity: f64) -> f64 {
    let m = mean_anomaly_rad;
    let f = |e_anom: f64| e_anom - eccentricity * e_anom.sin() - m;
    let mut lo = m - 1.0;
    let mut hi = m + 1.0;
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0, "bracket must straddle the root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

// ─── Topocentric geometry: explicit rotation matrices ────────────────────────

/// Independent ECI -> (azimuth, elevation, range) path: sidereal rotation and
/// east-north-up decomposition written as explicit matrix products, with the
/// sidereal angle evaluated from the seconds-of-time polynomial.
pub fn topocentric_rotation_oracle(
    eci_position_m: [f64; 3],
    latitude_deg: f64,
    longitude_deg: f64,
    altitude_m: f64,
    unix_s: f64,
) -> (f64, f64, f64) {
    // Sidereal time from the seconds-of-time coefficients.
    let jd = unix_s / 86_400.0 + 2_440_587.5;
    let t = (jd - 2_451_545.0) / 36_525.0;
    let gmst_s = 67_310.548_41 + (876_600.0 * 3_600.0 + 8_640_184.812_866) * t + 0.093_104 * t * t
        - 6.2e-6 * t * t * t;
    let theta = (gmst_s.rem_euclid(86_400.0)) / 86_400.0 * 2.0 * std::f64::consts::PI;

    let r3 = [
        [theta.cos(), theta.sin(), 0.0],
        [-theta.sin(), theta.cos(), 0.0],
        [0.0, 0.0, 1.0],
    ];
    let sat = mat3_mul(&r3, eci_position_m);

    // WGS-84 site coordinates, spelled out.
    let a = 6_378_137.0f64;
    let f = 1.0 / 298.257_223_563;
    let e2 = f * (2.0 - f);
    let lat = latitude_deg.to_radians();
    let lon = longitude_deg.to_radians();
    let n = a / (1.0 - e2 * lat.sin() * lat.sin()).sqrt();
    let site = [
        (n + altitude_m) * lat.cos() * lon.cos(),
        (n + altitude_m) * lat.cos() * lon.sin(),
        (n * (1.0 - e2) + altitude_m) * lat.sin(),
    ];

    let rho = [sat[0] - site[0], sat[1] - site[1], sat[2] - site[2]];
    let enu_rot = [
        [-lon.sin(), lon.cos(), 0.0],
        [-lat.sin() * lon.cos(), -lat.sin() * lon.sin(), lat.cos()],
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()],
    ];
    let enu = mat3_mul(&enu_rot, rho);
    let range = (enu[0] * enu[0] + enu[1] * enu[1] + enu[2] * enu[2]).sqrt();
    let elevation = (enu[2] / range).clamp(-1.0, 1.0).asin().to_degrees();
    let mut azimuth = enu[0].atan2(enu[1]).to_degrees();
    if azimuth < 0.0 {
        azimuth += 360.0;
    }
    (azimuth, elevation, range)
}

fn mat3_mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

// ─── Grid reduction: independent cell enumeration ────────────────────────────

/// Mean cloud value over the box by enumerating every cell of one frame and
/// testing its center against the box bounds directly. Mask value 2 counts
/// as 1. Returns `None` when no center falls inside.
#[allow(clippy::too_many_arguments)]
pub fn grid_box_mean_oracle(
    values: &[f64],
    n_rows: usize,
    n_cols: usize,
    origin_lat_deg: f64,
    origin_lon_deg: f64,
    cell_size_deg: f64,
    site_lat_deg: f64,
    site_lon_deg: f64,
    box_km: f64,
) -> Option<f64> {
    let half_lat = box_km / 2.0 / fsonet_core::weather::KM_PER_DEG;
    let half_lon = half_lat / site_lat_deg.to_radians().cos().abs();
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in 0..n_rows {
        for col in 0..n_cols {
            let lat = origin_lat_deg + (row as f64 + 0.5) * cell_size_deg;
            let lon = origin_lon_deg + (col as f64 + 0.5) * cell_size_deg;
            if (lat - site_lat_deg).abs() <= half_lat && (lon - site_lon_deg).abs() <= half_lon {
                let v = values[row * n_cols + col];
                sum += if v == 2.0 { 1.0 } else { v };
                count += 1;
            }
        }
    }
    if count == 0 {
        None
    } else {
        Some(sum / count as f64)
    }
}

// ─── Symmetric eigenvalues (Jacobi sweeps) ───────────────────────────────────

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
/// Used to check positive semidefiniteness of correlation matrices.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        debug_assert!(sweep < 99, "Jacobi failed to converge");
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

// ─── XML well-formedness ─────────────────────────────────────────────────────

/// Minimal well-formedness check for generated SVG: every element opened is
/// closed in order, attribute quotes balance, and nothing dangles after the
/// root. Not a validator, just an independent structural audit.
pub fn check_well_formed_xml(text: &str) -> Result<(), String> {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    let mut seen_root = false;
    while let Some(start) = rest.find('<') {
        let tail = &rest[start + 1..];
        let end = tail.find('>').ok_or("unterminated tag")?;
        let tag = &tail[..end];
        rest = &tail[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if tag.as_bytes().iter().filter(|&&b| b == b'"').count() % 2 != 0 {
            return Err(format!("unbalanced attribute quotes in <{tag}>"));
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack
                .pop()
                .ok_or_else(|| format!("closing </{name}> with no open element"))?;
            if open != name.trim() {
                return Err(format!("expected </{open}>, found </{name}>"));
            }
        } else if !tag.ends_with('/') {
            if stack.is_empty() && seen_root {
                return Err("content after the root element".to_string());
            }
            seen_root = true;
            let name = tag.split_whitespace().next().unwrap_or("").to_string();
            if name.is_empty() {
                return Err("empty tag name".to_string());
            }
            stack.push(name);
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed element <{}>", stack.last().unwrap()));
    }
    if !seen_root {
        return Err("no root element".to_string());
    }
    Ok(())
}
