//! Visibility pass detection above a minimum-elevation mask.
//!
//! A coarse 30 s elevation scan finds threshold crossings, which are then
//! refined to 1 s by bisection. Geometry samples inside each pass are taken
//! on a global 10 s grid anchored at the window start, so simultaneous
//! passes at different stations share sample instants (the throughput
//! stage compares stations at matching ticks).

use crate::orbit::{
    eci_to_topocentric, GeodeticSite, OrbitError, Propagator, TopocentricState, TwoLineElements,
};
use crate::time::{TimeWindow, UtcTime};
use std::fmt;

/// Coarse elevation-scan step. A 514 km LEO spends tens of seconds crossing
/// a 5-20 degree mask, so a 30 s step cannot skip a detectable pass.
pub const COARSE_STEP_S: i64 = 30;

/// Cadence of the stored geometry samples inside a pass.
pub const SAMPLE_CADENCE_S: i64 = 10;

/// Windows beyond this many days are refused to bound memory.
pub const MAX_WINDOW_DAYS: i64 = 400;

#[derive(Debug, Clone, PartialEq)]
pub enum PassError {
    WindowTooLarge { days: i64 },
    InvalidThreshold { min_elevation_deg: f64 },
    Orbit(OrbitError),
}

impl fmt::Display for PassError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PassError::WindowTooLarge { days } => {
                write!(
                    f,
                    "search window of {days} days exceeds the {MAX_WINDOW_DAYS}-day limit"
                )
            }
            PassError::InvalidThreshold { min_elevation_deg } => {
                write!(f, "minimum elevation {min_elevation_deg} outside [0, 90)")
            }
            PassError::Orbit(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PassError {}

impl From<OrbitError> for PassError {
    fn from(e: OrbitError) -> Self {
        PassError::Orbit(e)
    }
}

/// One visibility interval between the satellite and a station.
#[derive(Debug, Clone, PartialEq)]
pub struct Pass {
    pub station_id: String,
    /// Acquisition of signal: first whole second at or above the mask.
    pub aos: UtcTime,
    /// Loss of signal: last whole second at or above the mask.
    pub los: UtcTime,
    pub duration_s: f64,
    pub max_elevation_deg: f64,
    pub samples: Vec<TopocentricState>,
}

/// Find all passes above `min_elevation_deg` within `window`, time-ordered
/// and disjoint. Passes straddling a window edge are truncated, not dropped.
pub fn find_passes(
    tle: &TwoLineElements,
    site: &GeodeticSite,
    station_id: &str,
    window: TimeWindow,
    min_elevation_deg: f64,
) -> Result<Vec<Pass>, PassError> {
    if !(0.0..90.0).contains(&min_elevation_deg) {
        return Err(PassError::InvalidThreshold { min_elevation_deg });
    }
    let duration = window.duration_s();
    if duration > MAX_WINDOW_DAYS * 86_400 {
        return Err(PassError::WindowTooLarge {
            days: duration / 86_400,
        });
    }
    if duration == 0 {
        return Ok(Vec::new());
    }

    let prop = Propagator::new(tle);
    let elevation = |secs: i64| -> Result<f64, PassError> {
        let t = UtcTime::from_unix_seconds(secs);
        let state = prop.state_at(t)?;
        Ok(eci_to_topocentric(state.position_m, site, t).elevation_deg)
    };

    let start = window.start.unix_seconds();
    let end = window.end.unix_seconds();
    let mut passes = Vec::new();

    let mut t_prev = start;
    let mut above_prev = elevation(t_prev)? >= min_elevation_deg;
    let mut aos: Option<i64> = if above_prev { Some(start) } else { None };

    let mut t = start;
    while t < end {
        t = (t + COARSE_STEP_S).min(end);
        let above = elevation(t)? >= min_elevation_deg;
        if above && !above_prev {
            // Rising crossing in (t_prev, t]: first second at or above mask.
            aos = Some(bisect_crossing(
                &elevation,
                t_prev,
                t,
                min_elevation_deg,
                true,
            )?);
        } else if !above && above_prev {
            let los = bisect_crossing(&elevation, t_prev, t, min_elevation_deg, false)?;
            passes.push(build_pass(
                &prop,
                site,
                station_id,
                aos.take().unwrap_or(start),
                los,
                start,
            )?);
        }
        above_prev = above;
        t_prev = t;
    }
    if above_prev {
        // Still visible at the window edge: truncate.
        passes.push(build_pass(
            &prop,
            site,
            station_id,
            aos.unwrap_or(start),
            end,
            start,
        )?);
    }
    Ok(passes)
}

/// Bisect an elevation-threshold crossing down to 1 s. For a rising edge the
/// returned second is at or above the mask; for a falling edge it is the last
/// second at or above.
fn bisect_crossing(
    elevation: &dyn Fn(i64) -> Result<f64, PassError>,
    mut below: i64,
    mut above: i64,
    threshold_deg: f64,
    rising: bool,
) -> Result<i64, PassError> {
    // Invariant names follow the rising case; for a falling edge the
    // "below" endpoint is the later one.
    if !rising {
        std::mem::swap(&mut below, &mut above);
    }
    while (above - below).abs() > 1 {
        let mid = below + (above - below) / 2;
        if elevation(mid)? >= threshold_deg {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(above)
}

fn build_pass(
    prop: &Propagator,
    site: &GeodeticSite,
    station_id: &str,
    aos_s: i64,
    los_s: i64,
    grid_anchor_s: i64,
) -> Result<Pass, PassError> {
    let mut samples = Vec::new();
    // First grid tick at or after AOS.
    let offset = (aos_s - grid_anchor_s).rem_euclid(SAMPLE_CADENCE_S);
    let mut t = if offset == 0 {
        aos_s
    } else {
        aos_s + SAMPLE_CADENCE_S - offset
    };
    while t <= los_s {
        samples.push(sample_at(prop, site, t)?);
        t += SAMPLE_CADENCE_S;
    }
    if samples.is_empty() {
        // Sub-cadence pass: keep one sample at AOS so geometry is never lost.
        samples.push(sample_at(prop, site, aos_s)?);
    }
    let max_elevation_deg = samples
        .iter()
        .map(|s| s.elevation_deg)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Pass {
        station_id: station_id.to_string(),
        aos: UtcTime::from_unix_seconds(aos_s),
        los: UtcTime::from_unix_seconds(los_s),
        duration_s: (los_s - aos_s) as f64,
        max_elevation_deg,
        samples,
    })
}

fn sample_at(
    prop: &Propagator,
    site: &GeodeticSite,
    secs: i64,
) -> Result<TopocentricState, PassError> {
    let t = UtcTime::from_unix_seconds(secs);
    let state = prop.state_at(t)?;
    Ok(eci_to_topocentric(state.position_m, site, t))
}

/// Aggregate statistics over a pass list.
#[derive(Debug, Clone, PartialEq)]
pub struct PassStatistics {
    pub count: usize,
    pub total_duration_s: f64,
    pub mean_duration_s: Option<f64>,
    pub mean_max_elevation_deg: Option<f64>,
}

pub fn pass_statistics(passes: &[Pass]) -> PassStatistics {
    let count = passes.len();
    let total_duration_s: f64 = passes.iter().map(|p| p.duration_s).sum();
    if count == 0 {
        return PassStatistics {
            count,
            total_duration_s,
            mean_duration_s: None,
            mean_max_elevation_deg: None,
        };
    }
    let mean_max: f64 = passes.iter().map(|p| p.max_elevation_deg).sum::<f64>() / count as f64;
    PassStatistics {
        count,
        total_duration_s,
        mean_duration_s: Some(total_duration_s / count as f64),
        mean_max_elevation_deg: Some(mean_max),
    }
}
