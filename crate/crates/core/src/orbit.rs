//! Orbit determination from two-line element sets.
//!
//! This module covers:
//! - TLE parsing and re-serialization (standard 69-character NORAD format)
//! - Kepler equation solver (Newton-Raphson)
//! - Keplerian propagation with first-order secular J2 rates
//! - WGS-84 geodetic coordinates and ECI -> topocentric transforms
//!
//! Full SGP4/SDP4 (drag, deep-space resonance) is deliberately out of scope:
//! pass timing at minute scale over week-long windows only needs the secular
//! J2 drift of the node, perigee, and mean anomaly.

use crate::time::{unix_seconds_from_year_doy, UtcTime};
use std::f64::consts::PI;
use std::fmt;

/// Earth gravitational parameter (m^3/s^2).
pub const MU_EARTH: f64 = 3.986_004_418e14;

/// WGS-84 equatorial radius (m).
pub const EARTH_EQUATORIAL_RADIUS_M: f64 = 6_378_137.0;

/// WGS-84 flattening.
pub const EARTH_FLATTENING: f64 = 1.0 / 298.257_223_563;

/// Earth J2 zonal harmonic.
pub const J2: f64 = 1.082_626_68e-3;

const TWO_PI: f64 = 2.0 * PI;
const KEPLER_TOLERANCE: f64 = 1e-12;
const KEPLER_MAX_ITERATIONS: u32 = 50;

/// Validity half-window around the TLE epoch before propagation accuracy
/// degrades enough to deserve a warning (seconds).
pub const PROPAGATION_VALIDITY_S: i64 = 30 * 86_400;

// ─── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub enum TleError {
    /// Structural problem: wrong length, non-numeric field, bad line tag.
    FormatError {
        line: u8,
        columns: (usize, usize),
        message: String,
    },
    /// The final digit does not match the modulo-10 sum of the line.
    ChecksumMismatch {
        line: u8,
        expected: u8,
        computed: u8,
    },
}

impl fmt::Display for TleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TleError::FormatError {
                line,
                columns,
                message,
            } => write!(
                f,
                "TLE line {} columns {}-{}: {}",
                line, columns.0, columns.1, message
            ),
            TleError::ChecksumMismatch {
                line,
                expected,
                computed,
            } => write!(
                f,
                "TLE line {} checksum mismatch: line says {}, computed {}",
                line, expected, computed
            ),
        }
    }
}

impl std::error::Error for TleError {}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitError {
    /// Kepler iteration failed to converge (pathological elements).
    EccentricityDomain {
        eccentricity: f64,
        mean_anomaly_rad: f64,
    },
    /// A geodetic site coordinate is outside its legal range.
    InvalidSite { field: &'static str, value: f64 },
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitError::EccentricityDomain {
                eccentricity,
                mean_anomaly_rad,
            } => write!(
                f,
                "Kepler solve failed for e={eccentricity} M={mean_anomaly_rad} rad"
            ),
            OrbitError::InvalidSite { field, value } => {
                write!(f, "invalid site {field}: {value}")
            }
        }
    }
}

impl std::error::Error for OrbitError {}

// ─── Two-line elements ───────────────────────────────────────────────────────

/// Parsed NORAD two-line element set.
///
/// Angles are kept in degrees and mean motion in revolutions/day exactly as
/// printed in the source lines; the propagator converts to SI on entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLineElements {
    pub satellite_id: u32,
    /// Epoch as fractional Unix seconds (TLE epochs carry sub-second digits).
    pub epoch_unix_s: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
    pub mean_motion_rev_day: f64,
    /// Drag term in inverse Earth radii (parsed, not used by propagation).
    pub bstar: f64,
    /// The two 69-character source lines, byte-for-byte.
    pub element_set_lines: [String; 2],
    pub name: Option<String>,
}

impl TwoLineElements {
    /// Epoch rounded to the nearest whole second.
    pub fn epoch(&self) -> UtcTime {
        UtcTime::from_unix_seconds(self.epoch_unix_s.round() as i64)
    }

    /// Orbital period from mean motion (s).
    pub fn period_s(&self) -> f64 {
        86_400.0 / self.mean_motion_rev_day
    }

    /// Semi-major axis from mean motion via Kepler's third law (m).
    pub fn semi_major_axis_m(&self) -> f64 {
        let n = self.mean_motion_rev_day * TWO_PI / 86_400.0;
        (MU_EARTH / (n * n)).cbrt()
    }

    /// The stored source lines, reproduced byte-for-byte.
    pub fn to_lines(&self) -> [String; 2] {
        self.element_set_lines.clone()
    }
}

/// Modulo-10 checksum over the first 68 characters of a TLE line:
/// digits count their value, a minus sign counts 1, all else 0.
pub fn tle_checksum(line: &str) -> u8 {
    let mut sum: u32 = 0;
    for b in line.bytes().take(68) {
        if b.is_ascii_digit() {
            sum += (b - b'0') as u32;
        } else if b == b'-' {
            sum += 1;
        }
    }
    (sum % 10) as u8
}

fn field(line: &str, lineno: u8, range: std::ops::Range<usize>) -> Result<&str, TleError> {
    line.get(range.clone()).ok_or(TleError::FormatError {
        line: lineno,
        columns: (range.start + 1, range.end),
        message: "line too short".to_string(),
    })
}

fn parse_f64(
    line: &str,
    lineno: u8,
    range: std::ops::Range<usize>,
    what: &str,
) -> Result<f64, TleError> {
    let s = field(line, lineno, range.clone())?;
    s.trim().parse::<f64>().map_err(|_| TleError::FormatError {
        line: lineno,
        columns: (range.start + 1, range.end),
        message: format!("non-numeric {what}: {s:?}"),
    })
}

fn parse_u32(
    line: &str,
    lineno: u8,
    range: std::ops::Range<usize>,
    what: &str,
) -> Result<u32, TleError> {
    let s = field(line, lineno, range.clone())?;
    s.trim().parse::<u32>().map_err(|_| TleError::FormatError {
        line: lineno,
        columns: (range.start + 1, range.end),
        message: format!("non-numeric {what}: {s:?}"),
    })
}

/// Parse a TLE implied-decimal exponent field such as " 36258-4" (0.36258e-4).
fn parse_implied_exponent(
    line: &str,
    lineno: u8,
    range: std::ops::Range<usize>,
    what: &str,
) -> Result<f64, TleError> {
    let raw = field(line, lineno, range.clone())?;
    let s = raw.trim();
    if s.is_empty() {
        return Ok(0.0);
    }
    let err = |message: String| TleError::FormatError {
        line: lineno,
        columns: (range.start + 1, range.end),
        message,
    };
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    // Exponent sign is the last '+'/'-' past position 0.
    let exp_pos = rest.rfind(['+', '-']).filter(|&p| p > 0);
    match exp_pos {
        Some(pos) => {
            let mantissa: f64 = format!("0.{}", &rest[..pos])
                .parse()
                .map_err(|_| err(format!("bad {what} mantissa: {raw:?}")))?;
            let exponent: i32 = rest[pos..]
                .parse()
                .map_err(|_| err(format!("bad {what} exponent: {raw:?}")))?;
            Ok(sign * mantissa * 10f64.powi(exponent))
        }
        None => {
            let mantissa: f64 = format!("0.{rest}")
                .parse()
                .map_err(|_| err(format!("bad {what}: {raw:?}")))?;
            Ok(sign * mantissa)
        }
    }
}

/// Parse one element set from its two 69-character lines.
pub fn parse_tle(
    name: Option<&str>,
    line1: &str,
    line2: &str,
) -> Result<TwoLineElements, TleError> {
    for (lineno, line, tag) in [(1u8, line1, '1'), (2u8, line2, '2')] {
        if line.len() != 69 {
            return Err(TleError::FormatError {
                line: lineno,
                columns: (1, 69),
                message: format!("line is {} characters, expected 69", line.len()),
            });
        }
        if !line.starts_with(tag) {
            return Err(TleError::FormatError {
                line: lineno,
                columns: (1, 1),
                message: format!("expected line to start with {tag:?}"),
            });
        }
        let expected = line.as_bytes()[68].wrapping_sub(b'0');
        let computed = tle_checksum(line);
        if expected != computed {
            return Err(TleError::ChecksumMismatch {
                line: lineno,
                expected,
                computed,
            });
        }
    }

    let satellite_id = parse_u32(line1, 1, 2..7, "satellite number")?;
    let satellite_id2 = parse_u32(line2, 2, 2..7, "satellite number")?;
    if satellite_id != satellite_id2 {
        return Err(TleError::FormatError {
            line: 2,
            columns: (3, 7),
            message: format!(
                "satellite number {satellite_id2} does not match line 1 ({satellite_id})"
            ),
        });
    }

    let epoch_yy = parse_u32(line1, 1, 18..20, "epoch year")?;
    let epoch_year = if epoch_yy >= 57 {
        1900 + epoch_yy
    } else {
        2000 + epoch_yy
    } as i32;
    let epoch_doy = parse_f64(line1, 1, 20..32, "epoch day")?;
    if !(1.0..367.0).contains(&epoch_doy) {
        return Err(TleError::FormatError {
            line: 1,
            columns: (21, 32),
            message: format!("epoch day {epoch_doy} outside [1,367)"),
        });
    }
    let bstar = parse_implied_exponent(line1, 1, 53..61, "B*")?;

    let inclination_deg = parse_f64(line2, 2, 8..16, "inclination")?;
    let raan_deg = parse_f64(line2, 2, 17..25, "RAAN")?;
    let ecc_digits = field(line2, 2, 26..33)?;
    let eccentricity: f64 =
        format!("0.{}", ecc_digits.trim())
            .parse()
            .map_err(|_| TleError::FormatError {
                line: 2,
                columns: (27, 33),
                message: format!("non-numeric eccentricity: {ecc_digits:?}"),
            })?;
    let arg_perigee_deg = parse_f64(line2, 2, 34..42, "argument of perigee")?;
    let mean_anomaly_deg = parse_f64(line2, 2, 43..51, "mean anomaly")?;
    let mean_motion_rev_day = parse_f64(line2, 2, 52..63, "mean motion")?;

    if !(0.0..=180.0).contains(&inclination_deg) {
        return Err(TleError::FormatError {
            line: 2,
            columns: (9, 16),
            message: format!("inclination {inclination_deg} outside [0,180]"),
        });
    }
    if mean_motion_rev_day <= 0.0 {
        return Err(TleError::FormatError {
            line: 2,
            columns: (53, 63),
            message: format!("mean motion {mean_motion_rev_day} must be positive"),
        });
    }

    Ok(TwoLineElements {
        satellite_id,
        epoch_unix_s: unix_seconds_from_year_doy(epoch_year, epoch_doy),
        inclination_deg,
        raan_deg,
        eccentricity,
        arg_perigee_deg,
        mean_anomaly_deg,
        mean_motion_rev_day,
        bstar,
        element_set_lines: [line1.to_string(), line2.to_string()],
        name: name.map(|n| n.trim().to_string()).filter(|n| !n.is_empty()),
    })
}

/// Parse every element set in a TLE file: 2-line sets, optionally preceded by
/// a name line, newline-delimited, blank lines ignored.
pub fn parse_tle_file(text: &str) -> Result<Vec<TwoLineElements>, TleError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .collect();
    let mut sets = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let name = if !lines[i].starts_with("1 ") {
            let n = lines[i];
            i += 1;
            Some(n)
        } else {
            None
        };
        if i + 1 >= lines.len() {
            return Err(TleError::FormatError {
                line: 1,
                columns: (1, 69),
                message: "truncated element set at end of file".to_string(),
            });
        }
        sets.push(parse_tle(name, lines[i], lines[i + 1])?);
        i += 2;
    }
    Ok(sets)
}

/// Synthesize a format-valid element set (with correct checksums) from raw
/// elements. Round-trips through [`parse_tle`].
#[allow(clippy::too_many_arguments)]
pub fn synthesize_tle(
    satellite_id: u32,
    epoch_year: i32,
    epoch_day_of_year: f64,
    inclination_deg: f64,
    raan_deg: f64,
    eccentricity: f64,
    arg_perigee_deg: f64,
    mean_anomaly_deg: f64,
    mean_motion_rev_day: f64,
) -> TwoLineElements {
    assert!(
        (0.0..1.0).contains(&eccentricity),
        "eccentricity outside [0,1)"
    );
    let yy = epoch_year.rem_euclid(100);
    let mut line1 = format!(
        "1 {:05}U 00000A   {:02}{:012.8} {} {} {} 0  999",
        satellite_id, yy, epoch_day_of_year, " .00000000", " 00000+0", " 00000+0"
    );
    line1.push(char::from(b'0' + tle_checksum(&line1)));

    let ecc_digits = (eccentricity * 1e7).round().min(9_999_999.0) as u32;
    let mut line2 = format!(
        "2 {:05} {:8.4} {:8.4} {:07} {:8.4} {:8.4} {:11.8}{:5}",
        satellite_id,
        inclination_deg,
        raan_deg,
        ecc_digits,
        arg_perigee_deg,
        mean_anomaly_deg,
        mean_motion_rev_day,
        1
    );
    line2.push(char::from(b'0' + tle_checksum(&line2)));

    debug_assert_eq!(line1.len(), 69, "synthesized line 1 has wrong width");
    debug_assert_eq!(line2.len(), 69, "synthesized line 2 has wrong width");
    parse_tle(None, &line1, &line2).expect("synthesized TLE must parse")
}

// ─── Kepler equation ─────────────────────────────────────────────────────────

/// Solve `E - e sin E = M` for the eccentric anomaly by Newton iteration
/// from `E0 = M`, to |residual| < 1e-12 within 50 iterations.
pub fn solve_kepler(mean_anomaly_rad: f64, eccentricity: f64) -> Result<f64, OrbitError> {
    if !(0.0..1.0).contains(&eccentricity) || !mean_anomaly_rad.is_finite() {
        return Err(OrbitError::EccentricityDomain {
            eccentricity,
            mean_anomaly_rad,
        });
    }
    let m = mean_anomaly_rad;
    let mut e_anom = m;
    for _ in 0..KEPLER_MAX_ITERATIONS {
        let f = e_anom - eccentricity * e_anom.sin() - m;
        if f.abs() < KEPLER_TOLERANCE {
            return Ok(e_anom);
        }
        let f_prime = 1.0 - eccentricity * e_anom.cos();
        e_anom -= f / f_prime;
    }
    let f = e_anom - eccentricity * e_anom.sin() - m;
    if f.abs() < KEPLER_TOLERANCE {
        Ok(e_anom)
    } else {
        Err(OrbitError::EccentricityDomain {
            eccentricity,
            mean_anomaly_rad,
        })
    }
}

// ─── Propagation ─────────────────────────────────────────────────────────────

/// Satellite state in the Earth-centered inertial frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EciState {
    pub position_m: [f64; 3],
    pub velocity_mps: [f64; 3],
}

impl EciState {
    pub fn radius_m(&self) -> f64 {
        norm(self.position_m)
    }
}

/// Keplerian propagator with first-order secular J2 drift of the RAAN,
/// argument of perigee, and mean anomaly. Pure: identical inputs produce
/// bit-identical outputs.
#[derive(Debug, Clone)]
pub struct Propagator {
    epoch_unix_s: f64,
    semi_major_axis_m: f64,
    eccentricity: f64,
    inclination_rad: f64,
    raan0_rad: f64,
    arg_perigee0_rad: f64,
    mean_anomaly0_rad: f64,
    mean_motion_rad_s: f64,
    raan_rate_rad_s: f64,
    arg_perigee_rate_rad_s: f64,
    mean_anomaly_rate_rad_s: f64,
}

impl Propagator {
    pub fn new(tle: &TwoLineElements) -> Self {
        Self::build(tle, true)
    }

    /// Propagator with the J2 secular rates zeroed (pure two-body motion).
    pub fn without_j2(tle: &TwoLineElements) -> Self {
        Self::build(tle, false)
    }

    fn build(tle: &TwoLineElements, with_j2: bool) -> Self {
        let n0 = tle.mean_motion_rev_day * TWO_PI / 86_400.0;
        let a = (MU_EARTH / (n0 * n0)).cbrt();
        let e = tle.eccentricity;
        let i = tle.inclination_deg.to_radians();
        let p = a * (1.0 - e * e);
        let k = if with_j2 {
            1.5 * J2 * (EARTH_EQUATORIAL_RADIUS_M / p).powi(2) * n0
        } else {
            0.0
        };
        let sin2_i = i.sin() * i.sin();
        Propagator {
            epoch_unix_s: tle.epoch_unix_s,
            semi_major_axis_m: a,
            eccentricity: e,
            inclination_rad: i,
            raan0_rad: tle.raan_deg.to_radians(),
            arg_perigee0_rad: tle.arg_perigee_deg.to_radians(),
            mean_anomaly0_rad: tle.mean_anomaly_deg.to_radians(),
            mean_motion_rad_s: n0,
            raan_rate_rad_s: -k * i.cos(),
            arg_perigee_rate_rad_s: k * (2.0 - 2.5 * sin2_i),
            mean_anomaly_rate_rad_s: k * (1.0 - e * e).sqrt() * (1.0 - 1.5 * sin2_i),
        }
    }

    pub fn epoch_unix_s(&self) -> f64 {
        self.epoch_unix_s
    }

    pub fn semi_major_axis_m(&self) -> f64 {
        self.semi_major_axis_m
    }

    /// True when `t` is within the +/-30 day window around the epoch where
    /// the secular model is trustworthy; callers should warn otherwise.
    pub fn within_validity(&self, t: UtcTime) -> bool {
        (t.unix_seconds() as f64 - self.epoch_unix_s).abs() <= PROPAGATION_VALIDITY_S as f64
    }

    pub fn state_at(&self, t: UtcTime) -> Result<EciState, OrbitError> {
        self.state_at_unix(t.unix_seconds() as f64)
    }

    /// Propagate to fractional Unix seconds (the TLE epoch itself is fractional).
    pub fn state_at_unix(&self, unix_s: f64) -> Result<EciState, OrbitError> {
        let dt = unix_s - self.epoch_unix_s;
        let e = self.eccentricity;
        let m = normalize_angle(
            self.mean_anomaly0_rad + (self.mean_motion_rad_s + self.mean_anomaly_rate_rad_s) * dt,
        );
        let raan = self.raan0_rad + self.raan_rate_rad_s * dt;
        let arg_perigee = self.arg_perigee0_rad + self.arg_perigee_rate_rad_s * dt;

        let e_anom = solve_kepler(m, e)?;
        let (sin_e, cos_e) = e_anom.sin_cos();
        let sqrt_1me2 = (1.0 - e * e).sqrt();
        let true_anom = f64::atan2(sqrt_1me2 * sin_e, cos_e - e);
        let r = self.semi_major_axis_m * (1.0 - e * cos_e);
        let p = self.semi_major_axis_m * (1.0 - e * e);

        // Perifocal position and velocity.
        let (sin_nu, cos_nu) = true_anom.sin_cos();
        let r_pf = [r * cos_nu, r * sin_nu, 0.0];
        let v_scale = (MU_EARTH / p).sqrt();
        let v_pf = [-v_scale * sin_nu, v_scale * (e + cos_nu), 0.0];

        // Perifocal -> ECI rotation: Rz(-RAAN) Rx(-i) Rz(-argp) applied as a matrix.
        let (sin_o, cos_o) = raan.sin_cos();
        let (sin_w, cos_w) = arg_perigee.sin_cos();
        let (sin_i, cos_i) = self.inclination_rad.sin_cos();
        let rot = [
            [
                cos_o * cos_w - sin_o * sin_w * cos_i,
                -cos_o * sin_w - sin_o * cos_w * cos_i,
                sin_o * sin_i,
            ],
            [
                sin_o * cos_w + cos_o * sin_w * cos_i,
                -sin_o * sin_w + cos_o * cos_w * cos_i,
                -cos_o * sin_i,
            ],
            [sin_w * sin_i, cos_w * sin_i, cos_i],
        ];

        Ok(EciState {
            position_m: mat_mul(&rot, r_pf),
            velocity_mps: mat_mul(&rot, v_pf),
        })
    }
}

fn normalize_angle(angle: f64) -> f64 {
    let a = angle % TWO_PI;
    if a < 0.0 {
        a + TWO_PI
    } else {
        a
    }
}

fn mat_mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

// ─── Geodetic sites and topocentric geometry ─────────────────────────────────

/// A ground site on the WGS-84 ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodeticSite {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub altitude_m: f64,
}

impl GeodeticSite {
    pub fn new(latitude_deg: f64, longitude_deg: f64, altitude_m: f64) -> Result<Self, OrbitError> {
        if !(-90.0..=90.0).contains(&latitude_deg) || !latitude_deg.is_finite() {
            return Err(OrbitError::InvalidSite {
                field: "latitude_deg",
                value: latitude_deg,
            });
        }
        if !(-180.0..=180.0).contains(&longitude_deg) || !longitude_deg.is_finite() {
            return Err(OrbitError::InvalidSite {
                field: "longitude_deg",
                value: longitude_deg,
            });
        }
        if !altitude_m.is_finite() {
            return Err(OrbitError::InvalidSite {
                field: "altitude_m",
                value: altitude_m,
            });
        }
        Ok(GeodeticSite {
            latitude_deg,
            longitude_deg,
            altitude_m,
        })
    }

    /// WGS-84 geodetic -> ECEF (m).
    pub fn to_ecef_m(&self) -> [f64; 3] {
        let lat = self.latitude_deg.to_radians();
        let lon = self.longitude_deg.to_radians();
        let e2 = EARTH_FLATTENING * (2.0 - EARTH_FLATTENING);
        let (sin_lat, cos_lat) = lat.sin_cos();
        let n = EARTH_EQUATORIAL_RADIUS_M / (1.0 - e2 * sin_lat * sin_lat).sqrt();
        [
            (n + self.altitude_m) * cos_lat * lon.cos(),
            (n + self.altitude_m) * cos_lat * lon.sin(),
            (n * (1.0 - e2) + self.altitude_m) * sin_lat,
        ]
    }
}

/// Station-relative look geometry at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopocentricState {
    pub time: UtcTime,
    /// Degrees clockwise from north, in [0, 360).
    pub azimuth_deg: f64,
    /// Degrees above the local horizontal, in [-90, 90].
    pub elevation_deg: f64,
    pub slant_range_m: f64,
}

/// Greenwich Mean Sidereal Time (radians) per the IAU 1982 polynomial,
/// with UTC standing in for UT1.
pub fn gmst_rad(unix_s: f64) -> f64 {
    let jd = unix_s / 86_400.0 + 2_440_587.5;
    let d = jd - 2_451_545.0;
    let t = d / 36_525.0;
    let gmst_deg =
        280.460_618_37 + 360.985_647_366_29 * d + 0.000_387_933 * t * t - t * t * t / 38_710_000.0;
    normalize_angle(gmst_deg.to_radians())
}

/// Rotate an ECI vector into ECEF at time `unix_s`.
pub fn eci_to_ecef(position_m: [f64; 3], unix_s: f64) -> [f64; 3] {
    let theta = gmst_rad(unix_s);
    let (sin_t, cos_t) = theta.sin_cos();
    [
        cos_t * position_m[0] + sin_t * position_m[1],
        -sin_t * position_m[0] + cos_t * position_m[1],
        position_m[2],
    ]
}

/// Convert an ECI position into station-relative azimuth, elevation, and
/// slant range, via the south-east-zenith frame at the site.
pub fn eci_to_topocentric(
    position_m: [f64; 3],
    site: &GeodeticSite,
    t: UtcTime,
) -> TopocentricState {
    eci_to_topocentric_unix(position_m, site, t.unix_seconds() as f64, t)
}

pub(crate) fn eci_to_topocentric_unix(
    position_m: [f64; 3],
    site: &GeodeticSite,
    unix_s: f64,
    stamp: UtcTime,
) -> TopocentricState {
    let sat_ecef = eci_to_ecef(position_m, unix_s);
    let site_ecef = site.to_ecef_m();
    let rho = [
        sat_ecef[0] - site_ecef[0],
        sat_ecef[1] - site_ecef[1],
        sat_ecef[2] - site_ecef[2],
    ];
    let lat = site.latitude_deg.to_radians();
    let lon = site.longitude_deg.to_radians();
    let (sin_lat, cos_lat) = lat.sin_cos();
    let (sin_lon, cos_lon) = lon.sin_cos();

    // South-east-zenith components of the range vector.
    let south = sin_lat * cos_lon * rho[0] + sin_lat * sin_lon * rho[1] - cos_lat * rho[2];
    let east = -sin_lon * rho[0] + cos_lon * rho[1];
    let zenith = cos_lat * cos_lon * rho[0] + cos_lat * sin_lon * rho[1] + sin_lat * rho[2];

    let range = norm(rho);
    let elevation_deg = (zenith / range).clamp(-1.0, 1.0).asin().to_degrees();
    let mut azimuth_deg = east.atan2(-south).to_degrees();
    if azimuth_deg < 0.0 {
        azimuth_deg += 360.0;
    }
    if azimuth_deg >= 360.0 {
        azimuth_deg -= 360.0;
    }
    TopocentricState {
        time: stamp,
        azimuth_deg,
        elevation_deg,
        slant_range_m: range,
    }
}
