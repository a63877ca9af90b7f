//! Cloud-mask and turbulence ingestion plus per-station reduction.
//!
//! Gridded products arrive in a self-describing text interchange format:
//!
//! ```text
//! GRID <origin_lat> <origin_lon> <cell_size> <n_rows> <n_cols>
//! FRAME <iso8601>
//! <n_rows lines of n_cols whitespace-separated values>
//! FRAME <iso8601>
//! ...
//! ```
//!
//! Cell (row, col) spans `[origin + index*cell_size, origin + (index+1)*cell_size)`
//! in latitude (rows grow northward) and longitude, with its center at
//! `origin + (index + 0.5)*cell_size`. Cloud masks use 0 (clear) / 2 (cloud);
//! pre-averaged products use fractions in [0, 1]; turbulence maps carry one
//! frame of positive Cn^2 values, stored verbatim in the units of the source
//! product.

use crate::orbit::GeodeticSite;
use crate::rng::SplitMix64;
use crate::time::{TimeWindow, UtcTime};
use std::fmt;
use std::path::Path;

/// Kilometers per degree of latitude (mean-Earth-radius arc length).
pub const KM_PER_DEG: f64 = 6371.0088 * std::f64::consts::PI / 180.0;

/// Default side of the averaging box around a station (km).
pub const DEFAULT_BOX_KM: f64 = 20.0;

// ─── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum WeatherError {
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Malformed header or frame structure.
    Schema {
        line: usize,
        message: String,
    },
    /// A cell value outside {0,2} plus [0,1] for cloud products, or a
    /// non-positive turbulence value.
    Value {
        line: usize,
        value: f64,
    },
    /// Frame timestamps out of order.
    TimeOrder {
        line: usize,
    },
    OutOfCoverage {
        message: String,
    },
    OutOfSpan {
        t: UtcTime,
    },
}

impl fmt::Display for WeatherError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeatherError::Io { path, source } => write!(f, "{path}: {source}"),
            WeatherError::Schema { line, message } => write!(f, "line {line}: {message}"),
            WeatherError::Value { line, value } => {
                write!(
                    f,
                    "line {line}: cell value {value} outside the legal domain"
                )
            }
            WeatherError::TimeOrder { line } => {
                write!(
                    f,
                    "line {line}: frame timestamps must be strictly increasing"
                )
            }
            WeatherError::OutOfCoverage { message } => write!(f, "out of coverage: {message}"),
            WeatherError::OutOfSpan { t } => write!(f, "{t} is outside the weather series span"),
        }
    }
}

impl std::error::Error for WeatherError {}

// ─── Gridded products ────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct GridFrame {
    pub time: UtcTime,
    /// Row-major, `n_rows * n_cols` values.
    pub values: Vec<f64>,
}

/// A time series of gridded cloud values on a fixed lat/lon raster.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSeries {
    pub origin_lat_deg: f64,
    pub origin_lon_deg: f64,
    pub cell_size_deg: f64,
    pub n_rows: usize,
    pub n_cols: usize,
    pub frames: Vec<GridFrame>,
}

/// A single-frame annual-average turbulence map on the same raster layout.
#[derive(Debug, Clone, PartialEq)]
pub struct TurbulenceMap {
    pub origin_lat_deg: f64,
    pub origin_lon_deg: f64,
    pub cell_size_deg: f64,
    pub n_rows: usize,
    pub n_cols: usize,
    pub values: Vec<f64>,
}

struct RawGrid {
    origin_lat_deg: f64,
    origin_lon_deg: f64,
    cell_size_deg: f64,
    n_rows: usize,
    n_cols: usize,
    frames: Vec<GridFrame>,
}

fn parse_raw_grid(text: &str) -> Result<RawGrid, WeatherError> {
    let mut lines = text.lines().enumerate();
    let (header_no, header) =
        lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or(WeatherError::Schema {
                line: 1,
                message: "empty file".to_string(),
            })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 6 || tokens[0] != "GRID" {
        return Err(WeatherError::Schema {
            line: header_no + 1,
            message: format!(
                "expected 'GRID origin_lat origin_lon cell_size n_rows n_cols', got {header:?}"
            ),
        });
    }
    let num = |s: &str, what: &str| -> Result<f64, WeatherError> {
        s.parse::<f64>().map_err(|_| WeatherError::Schema {
            line: header_no + 1,
            message: format!("bad {what}: {s:?}"),
        })
    };
    let origin_lat_deg = num(tokens[1], "origin_lat")?;
    let origin_lon_deg = num(tokens[2], "origin_lon")?;
    let cell_size_deg = num(tokens[3], "cell_size")?;
    let n_rows = num(tokens[4], "n_rows")? as usize;
    let n_cols = num(tokens[5], "n_cols")? as usize;
    if cell_size_deg <= 0.0 || n_rows == 0 || n_cols == 0 {
        return Err(WeatherError::Schema {
            line: header_no + 1,
            message: "cell_size, n_rows, n_cols must all be positive".to_string(),
        });
    }

    let mut frames: Vec<GridFrame> = Vec::new();
    let mut pending: Option<(UtcTime, Vec<f64>, usize)> = None;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(stamp) = trimmed.strip_prefix("FRAME") {
            if let Some((time, values, _)) = pending.take() {
                finish_frame(&mut frames, time, values, n_rows, n_cols, lineno)?;
            }
            let time = UtcTime::parse_iso8601(stamp.trim()).map_err(|e| WeatherError::Schema {
                line: lineno,
                message: e.to_string(),
            })?;
            pending = Some((time, Vec::with_capacity(n_rows * n_cols), lineno));
        } else {
            let (_, values, _) = pending.as_mut().ok_or(WeatherError::Schema {
                line: lineno,
                message: "data row before any FRAME line".to_string(),
            })?;
            for tok in trimmed.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| WeatherError::Schema {
                    line: lineno,
                    message: format!("non-numeric cell: {tok:?}"),
                })?;
                values.push(v);
            }
            if values.len() > n_rows * n_cols {
                return Err(WeatherError::Schema {
                    line: lineno,
                    message: format!("frame has more than {} cells", n_rows * n_cols),
                });
            }
        }
    }
    if let Some((time, values, lineno)) = pending.take() {
        finish_frame(&mut frames, time, values, n_rows, n_cols, lineno)?;
    }
    if frames.is_empty() {
        return Err(WeatherError::Schema {
            line: header_no + 1,
            message: "file contains no frames".to_string(),
        });
    }
    Ok(RawGrid {
        origin_lat_deg,
        origin_lon_deg,
        cell_size_deg,
        n_rows,
        n_cols,
        frames,
    })
}

fn finish_frame(
    frames: &mut Vec<GridFrame>,
    time: UtcTime,
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    lineno: usize,
) -> Result<(), WeatherError> {
    if values.len() != n_rows * n_cols {
        return Err(WeatherError::Schema {
            line: lineno,
            message: format!(
                "frame has {} cells, expected {}",
                values.len(),
                n_rows * n_cols
            ),
        });
    }
    if let Some(prev) = frames.last() {
        if time <= prev.time {
            return Err(WeatherError::TimeOrder { line: lineno });
        }
    }
    frames.push(GridFrame { time, values });
    Ok(())
}

fn cloud_value_ok(v: f64) -> bool {
    v == 2.0 || (0.0..=1.0).contains(&v)
}

/// Parse a cloud grid series from interchange-format text.
pub fn parse_grid_series(text: &str) -> Result<GridSeries, WeatherError> {
    let raw = parse_raw_grid(text)?;
    for frame in &raw.frames {
        for &v in &frame.values {
            if !cloud_value_ok(v) {
                // The offending line is not tracked per cell; report the frame.
                return Err(WeatherError::Value { line: 0, value: v });
            }
        }
    }
    Ok(GridSeries {
        origin_lat_deg: raw.origin_lat_deg,
        origin_lon_deg: raw.origin_lon_deg,
        cell_size_deg: raw.cell_size_deg,
        n_rows: raw.n_rows,
        n_cols: raw.n_cols,
        frames: raw.frames,
    })
}

pub fn load_grid_series(path: &Path) -> Result<GridSeries, WeatherError> {
    let text = std::fs::read_to_string(path).map_err(|source| WeatherError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_grid_series(&text)
}

/// Parse a turbulence map: exactly one frame of strictly positive values.
pub fn parse_turbulence_map(text: &str) -> Result<TurbulenceMap, WeatherError> {
    let raw = parse_raw_grid(text)?;
    if raw.frames.len() != 1 {
        return Err(WeatherError::Schema {
            line: 0,
            message: format!(
                "turbulence map must contain exactly 1 frame, found {}",
                raw.frames.len()
            ),
        });
    }
    let frame = raw.frames.into_iter().next().unwrap();
    for &v in &frame.values {
        if v <= 0.0 || v.is_nan() {
            return Err(WeatherError::Value { line: 0, value: v });
        }
    }
    Ok(TurbulenceMap {
        origin_lat_deg: raw.origin_lat_deg,
        origin_lon_deg: raw.origin_lon_deg,
        cell_size_deg: raw.cell_size_deg,
        n_rows: raw.n_rows,
        n_cols: raw.n_cols,
        values: frame.values,
    })
}

pub fn load_turbulence_map(path: &Path) -> Result<TurbulenceMap, WeatherError> {
    let text = std::fs::read_to_string(path).map_err(|source| WeatherError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_turbulence_map(&text)
}

// ─── Per-station series ──────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherSample {
    pub time: UtcTime,
    /// Cloud fraction in [0, 1].
    pub cloud_fraction: f64,
    /// Refractive-index structure parameter, stored verbatim from the source
    /// map (the bundled products label it m^-1/3; the conventional unit is
    /// m^-2/3 — the number is not rescaled either way).
    pub cn2: Option<f64>,
}

/// Time-ordered cloud/turbulence samples for one station.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    pub station_id: String,
    pub samples: Vec<WeatherSample>,
}

impl WeatherSeries {
    pub fn span(&self) -> Option<TimeWindow> {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => TimeWindow::new(a.time, b.time),
            _ => None,
        }
    }

    /// Step-hold lookup: the most recent sample at or before `t`.
    pub fn sample_at(&self, t: UtcTime) -> Result<&WeatherSample, WeatherError> {
        let span = self.span().ok_or(WeatherError::OutOfSpan { t })?;
        if !span.contains(t) {
            return Err(WeatherError::OutOfSpan { t });
        }
        let idx = self.samples.partition_point(|s| s.time <= t);
        Ok(&self.samples[idx - 1])
    }

    pub fn cloud_fraction_at(&self, t: UtcTime) -> Result<f64, WeatherError> {
        Ok(self.sample_at(t)?.cloud_fraction)
    }

    /// Apply a constant turbulence value to every sample.
    pub fn with_cn2(mut self, cn2: f64) -> Self {
        for s in &mut self.samples {
            s.cn2 = Some(cn2);
        }
        self
    }
}

/// Indices of the cells whose centers fall inside a `box_km`-sided box
/// centered on the site. The whole box must lie inside the grid extent.
fn cells_in_box(
    origin_lat: f64,
    origin_lon: f64,
    cell: f64,
    n_rows: usize,
    n_cols: usize,
    site: &GeodeticSite,
    box_km: f64,
) -> Result<Vec<usize>, WeatherError> {
    let half_lat = box_km / 2.0 / KM_PER_DEG;
    let half_lon = half_lat / site.latitude_deg.to_radians().cos().abs();
    let lat_lo = site.latitude_deg - half_lat;
    let lat_hi = site.latitude_deg + half_lat;
    let lon_lo = site.longitude_deg - half_lon;
    let lon_hi = site.longitude_deg + half_lon;

    let grid_lat_hi = origin_lat + cell * n_rows as f64;
    let grid_lon_hi = origin_lon + cell * n_cols as f64;
    if lat_lo < origin_lat || lat_hi > grid_lat_hi || lon_lo < origin_lon || lon_hi > grid_lon_hi {
        return Err(WeatherError::OutOfCoverage {
            message: format!(
                "{box_km} km box around ({}, {}) extends beyond the grid extent \
                 [{origin_lat}, {grid_lat_hi}] x [{origin_lon}, {grid_lon_hi}]",
                site.latitude_deg, site.longitude_deg
            ),
        });
    }

    let mut cells = Vec::new();
    for row in 0..n_rows {
        let lat_c = origin_lat + (row as f64 + 0.5) * cell;
        if lat_c < lat_lo || lat_c > lat_hi {
            continue;
        }
        for col in 0..n_cols {
            let lon_c = origin_lon + (col as f64 + 0.5) * cell;
            if lon_c >= lon_lo && lon_c <= lon_hi {
                cells.push(row * n_cols + col);
            }
        }
    }
    if cells.is_empty() {
        return Err(WeatherError::OutOfCoverage {
            message: format!(
                "no cell center falls inside the {box_km} km box around ({}, {})",
                site.latitude_deg, site.longitude_deg
            ),
        });
    }
    Ok(cells)
}

/// Reduce a cloud grid to a per-station series by averaging every cell whose
/// center falls inside the box centered on the site (mask value 2 counts 1).
pub fn station_cloud_series(
    grid: &GridSeries,
    site: &GeodeticSite,
    box_km: f64,
    station_id: &str,
) -> Result<WeatherSeries, WeatherError> {
    let cells = cells_in_box(
        grid.origin_lat_deg,
        grid.origin_lon_deg,
        grid.cell_size_deg,
        grid.n_rows,
        grid.n_cols,
        site,
        box_km,
    )?;
    let samples = grid
        .frames
        .iter()
        .map(|frame| {
            let sum: f64 = cells
                .iter()
                .map(|&i| {
                    let v = frame.values[i];
                    if v == 2.0 {
                        1.0
                    } else {
                        v
                    }
                })
                .sum();
            WeatherSample {
                time: frame.time,
                cloud_fraction: sum / cells.len() as f64,
                cn2: None,
            }
        })
        .collect();
    Ok(WeatherSeries {
        station_id: station_id.to_string(),
        samples,
    })
}

/// Nearest-cell Cn^2 lookup. A site exactly on a cell boundary resolves to
/// the lower row index, then the lower column index.
pub fn station_turbulence(map: &TurbulenceMap, site: &GeodeticSite) -> Result<f64, WeatherError> {
    let row = nearest_index(
        site.latitude_deg,
        map.origin_lat_deg,
        map.cell_size_deg,
        map.n_rows,
    )?;
    let col = nearest_index(
        site.longitude_deg,
        map.origin_lon_deg,
        map.cell_size_deg,
        map.n_cols,
    )?;
    Ok(map.values[row * map.n_cols + col])
}

fn nearest_index(coord: f64, origin: f64, cell: f64, n: usize) -> Result<usize, WeatherError> {
    let x = (coord - origin) / cell;
    if x < 0.0 || x > n as f64 {
        return Err(WeatherError::OutOfCoverage {
            message: format!(
                "coordinate {coord} outside grid [{origin}, {}]",
                origin + cell * n as f64
            ),
        });
    }
    let idx = if x == x.floor() && x > 0.0 {
        // On a boundary the lower-index cell wins.
        x as usize - 1
    } else {
        x.floor() as usize
    };
    Ok(idx.min(n - 1))
}

/// Cloud-free line of sight: true when the step-held cloud fraction at `t`
/// is strictly below the threshold.
pub fn cflos(series: &WeatherSeries, t: UtcTime, threshold: f64) -> Result<bool, WeatherError> {
    Ok(series.cloud_fraction_at(t)? < threshold)
}

/// Generate synthetic per-station weather: independent Bernoulli cloud draws
/// (cloud fraction 0 or 1) at a fixed cadence, deterministic for a seed.
pub fn synth_weather(
    stations: &[(String, f64)],
    span: TimeWindow,
    cadence_s: i64,
    seed: u64,
) -> Vec<WeatherSeries> {
    assert!(cadence_s > 0, "cadence must be positive");
    let mut rng = SplitMix64::new(seed);
    stations
        .iter()
        .map(|(station_id, p)| {
            assert!((0.0..=1.0).contains(p), "cloud probability outside [0,1]");
            let mut samples = Vec::new();
            let mut t = span.start;
            while t <= span.end {
                let cloud = if rng.next_f64() < *p { 1.0 } else { 0.0 };
                samples.push(WeatherSample {
                    time: t,
                    cloud_fraction: cloud,
                    cn2: None,
                });
                t = t.plus_seconds(cadence_s);
            }
            WeatherSeries {
                station_id: station_id.clone(),
                samples,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> UtcTime {
        UtcTime::parse_iso8601(s).unwrap()
    }

    const SMALL_GRID: &str = "\
GRID 40.0 -5.0 0.25 2 2
FRAME 2023-06-01T00:00:00Z
0 2
2 2
";

    #[test]
    fn parses_minimal_grid() {
        let g = parse_grid_series(SMALL_GRID).unwrap();
        assert_eq!(g.n_rows, 2);
        assert_eq!(g.n_cols, 2);
        assert_eq!(g.frames.len(), 1);
        assert_eq!(g.frames[0].values, vec![0.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn all_zero_frame_is_all_clear() {
        let text = "GRID 0 0 1 1 1\nFRAME 2023-01-01T00:00:00Z\n0\n";
        let g = parse_grid_series(text).unwrap();
        assert_eq!(g.frames[0].values, vec![0.0]);
    }

    #[test]
    fn out_of_order_frames_rejected() {
        let text = "\
GRID 0 0 1 1 1
FRAME 2023-01-02T00:00:00Z
0
FRAME 2023-01-01T00:00:00Z
0
";
        assert!(matches!(
            parse_grid_series(text),
            Err(WeatherError::TimeOrder { .. })
        ));
    }

    #[test]
    fn illegal_cell_value_rejected() {
        let text = "GRID 0 0 1 1 1\nFRAME 2023-01-01T00:00:00Z\n1.5\n";
        assert!(
            matches!(parse_grid_series(text), Err(WeatherError::Value { value, .. }) if value == 1.5)
        );
    }

    #[test]
    fn malformed_header_rejected() {
        assert!(matches!(
            parse_grid_series("GRID 0 0 1 1\n"),
            Err(WeatherError::Schema { .. })
        ));
    }

    #[test]
    fn three_quarters_cloud_average() {
        // {0,2,2,2} maps to mean(0,1,1,1) = 0.75 over a box containing all
        // four cell centers (35 km reaches the +/-0.125 deg centers).
        let g = parse_grid_series(SMALL_GRID).unwrap();
        let site = GeodeticSite::new(40.25, -4.75, 0.0).unwrap();
        let series = station_cloud_series(&g, &site, 35.0, "gs").unwrap();
        assert_eq!(series.samples[0].cloud_fraction, 0.75);
    }

    #[test]
    fn uniform_cloud_gives_fraction_one() {
        let text = "\
GRID 40.0 -5.0 0.25 4 4
FRAME 2023-06-01T00:00:00Z
2 2 2 2
2 2 2 2
2 2 2 2
2 2 2 2
";
        let g = parse_grid_series(text).unwrap();
        // Site on a cell center so even the smallest box selects a cell.
        let site = GeodeticSite::new(40.375, -4.625, 0.0).unwrap();
        for box_km in [5.0, 20.0, 50.0] {
            let series = station_cloud_series(&g, &site, box_km, "gs").unwrap();
            assert_eq!(series.samples[0].cloud_fraction, 1.0);
        }
    }

    #[test]
    fn tiny_box_selects_single_checkerboard_cell() {
        let text = "\
GRID 40.0 -5.0 0.25 2 2
FRAME 2023-06-01T00:00:00Z
0 2
2 0
";
        let g = parse_grid_series(text).unwrap();
        // Centered on the clear lower-left cell (row 0, col 0).
        let site = GeodeticSite::new(40.125, -4.875, 0.0).unwrap();
        let series = station_cloud_series(&g, &site, 1.0, "gs").unwrap();
        assert_eq!(series.samples[0].cloud_fraction, 0.0);
    }

    #[test]
    fn binary_fraction_has_cell_count_denominator() {
        let g = parse_grid_series(SMALL_GRID).unwrap();
        let site = GeodeticSite::new(40.25, -4.75, 0.0).unwrap();
        let series = station_cloud_series(&g, &site, 35.0, "gs").unwrap();
        let f = series.samples[0].cloud_fraction;
        let n = 4.0;
        assert_eq!((f * n).round(), f * n);
    }

    #[test]
    fn box_beyond_extent_is_out_of_coverage() {
        let g = parse_grid_series(SMALL_GRID).unwrap();
        // Site inside the grid, but a 200 km box spills over the edge.
        let site = GeodeticSite::new(40.25, -4.75, 0.0).unwrap();
        assert!(matches!(
            station_cloud_series(&g, &site, 200.0, "gs"),
            Err(WeatherError::OutOfCoverage { .. })
        ));
        // Site entirely outside.
        let far = GeodeticSite::new(10.0, 100.0, 0.0).unwrap();
        assert!(matches!(
            station_cloud_series(&g, &far, 1.0, "gs"),
            Err(WeatherError::OutOfCoverage { .. })
        ));
    }

    #[test]
    fn translation_invariance() {
        let base = parse_grid_series(SMALL_GRID).unwrap();
        let mut shifted = base.clone();
        shifted.origin_lat_deg += 2.0;
        shifted.origin_lon_deg += 3.0;
        let site = GeodeticSite::new(40.25, -4.75, 0.0).unwrap();
        let site_shifted = GeodeticSite::new(42.25, -1.75, 0.0).unwrap();
        let a = station_cloud_series(&base, &site, 35.0, "gs").unwrap();
        let b = station_cloud_series(&shifted, &site_shifted, 35.0, "gs").unwrap();
        assert_eq!(a.samples[0].cloud_fraction, b.samples[0].cloud_fraction);
    }

    const TURB_MAP: &str = "\
GRID 40.0 -5.0 0.25 2 2
FRAME 2023-01-01T00:00:00Z
1e-17 2e-17
3e-17 4e-17
";

    #[test]
    fn turbulence_exact_cell_center() {
        let m = parse_turbulence_map(TURB_MAP).unwrap();
        let site = GeodeticSite::new(40.125, -4.875, 0.0).unwrap();
        assert_eq!(station_turbulence(&m, &site).unwrap(), 1e-17);
        let site_ne = GeodeticSite::new(40.375, -4.625, 0.0).unwrap();
        assert_eq!(station_turbulence(&m, &site_ne).unwrap(), 4e-17);
    }

    #[test]
    fn turbulence_boundary_tie_break() {
        let m = parse_turbulence_map(TURB_MAP).unwrap();
        // Exactly on the row and column boundary: lower row, then lower column.
        let site = GeodeticSite::new(40.25, -4.75, 0.0).unwrap();
        assert_eq!(station_turbulence(&m, &site).unwrap(), 1e-17);
    }

    #[test]
    fn turbulence_nearest_matches_brute_force() {
        let m = parse_turbulence_map(TURB_MAP).unwrap();
        let mut rng = SplitMix64::new(99);
        for _ in 0..500 {
            let lat = rng.range_f64(40.0, 40.5);
            let lon = rng.range_f64(-5.0, -4.5);
            let site = GeodeticSite::new(lat, lon, 0.0).unwrap();
            let got = station_turbulence(&m, &site).unwrap();
            // Exhaustive nearest-center search with the same tie-break.
            let mut best = (f64::MAX, 0usize);
            for row in 0..2usize {
                for col in 0..2usize {
                    let clat = 40.0 + (row as f64 + 0.5) * 0.25;
                    let clon = -5.0 + (col as f64 + 0.5) * 0.25;
                    let d = (clat - lat).powi(2) + (clon - lon).powi(2);
                    if d < best.0 {
                        best = (d, row * 2 + col);
                    }
                }
            }
            assert_eq!(got, m.values[best.1], "site ({lat}, {lon})");
        }
    }

    #[test]
    fn turbulence_must_be_single_positive_frame() {
        let two = "GRID 0 0 1 1 1\nFRAME 2023-01-01T00:00:00Z\n1e-17\nFRAME 2023-01-02T00:00:00Z\n1e-17\n";
        assert!(parse_turbulence_map(two).is_err());
        let nonpos = "GRID 0 0 1 1 1\nFRAME 2023-01-01T00:00:00Z\n0\n";
        assert!(matches!(
            parse_turbulence_map(nonpos),
            Err(WeatherError::Value { .. })
        ));
    }

    fn series_with(samples: &[(&str, f64)]) -> WeatherSeries {
        WeatherSeries {
            station_id: "gs".into(),
            samples: samples
                .iter()
                .map(|(stamp, cc)| WeatherSample {
                    time: t(stamp),
                    cloud_fraction: *cc,
                    cn2: None,
                })
                .collect(),
        }
    }

    #[test]
    fn cflos_strict_inequality_at_threshold() {
        let s = series_with(&[("2023-06-01T00:00:00Z", 0.0), ("2023-06-01T00:15:00Z", 0.1)]);
        assert!(cflos(&s, t("2023-06-01T00:00:00Z"), 0.1).unwrap());
        // Exactly at the threshold counts as blocked.
        assert!(!cflos(&s, t("2023-06-01T00:15:00Z"), 0.1).unwrap());
    }

    #[test]
    fn cflos_uses_step_hold() {
        let s = series_with(&[("2023-06-01T00:00:00Z", 0.5), ("2023-06-01T00:15:00Z", 0.0)]);
        // Between samples the earlier one holds.
        assert!(!cflos(&s, t("2023-06-01T00:07:00Z"), 0.1).unwrap());
        assert!(cflos(&s, t("2023-06-01T00:15:00Z"), 0.1).unwrap());
    }

    #[test]
    fn cflos_monotone_in_threshold() {
        let s = series_with(&[("2023-06-01T00:00:00Z", 0.3)]);
        let at = t("2023-06-01T00:00:00Z");
        for th1 in [0.0, 0.2, 0.3, 0.4, 1.0] {
            for th2 in [0.0, 0.2, 0.3, 0.4, 1.0] {
                if th1 <= th2 && cflos(&s, at, th1).unwrap() {
                    assert!(cflos(&s, at, th2).unwrap());
                }
            }
        }
    }

    #[test]
    fn cflos_out_of_span() {
        let s = series_with(&[("2023-06-01T00:00:00Z", 0.0)]);
        assert!(matches!(
            cflos(&s, t("2023-05-31T23:59:59Z"), 0.1),
            Err(WeatherError::OutOfSpan { .. })
        ));
        assert!(matches!(
            cflos(&s, t("2023-06-01T00:00:01Z"), 0.1),
            Err(WeatherError::OutOfSpan { .. })
        ));
    }

    #[test]
    fn synth_weather_extremes_and_mean() {
        let span = TimeWindow::new(t("2023-06-01T00:00:00Z"), t("2023-06-02T00:00:00Z")).unwrap();
        let series = synth_weather(
            &[("clear".into(), 0.0), ("cloudy".into(), 1.0)],
            span,
            900,
            7,
        );
        assert!(series[0].samples.iter().all(|s| s.cloud_fraction == 0.0));
        assert!(series[1].samples.iter().all(|s| s.cloud_fraction == 1.0));

        let long_span = TimeWindow::new(
            t("2023-01-01T00:00:00Z"),
            t("2023-01-01T00:00:00Z").plus_seconds(100_000 - 1),
        )
        .unwrap();
        let series = synth_weather(&[("p3".into(), 0.3)], long_span, 1, 42);
        assert_eq!(series[0].samples.len(), 100_000);
        let mean = series[0]
            .samples
            .iter()
            .map(|s| s.cloud_fraction)
            .sum::<f64>()
            / 100_000.0;
        assert!((mean - 0.3).abs() < 0.01, "empirical mean {mean}");
    }

    #[test]
    fn synth_weather_deterministic_for_seed() {
        let span = TimeWindow::new(t("2023-06-01T00:00:00Z"), t("2023-06-01T06:00:00Z")).unwrap();
        let a = synth_weather(&[("x".into(), 0.4)], span, 60, 1234);
        let b = synth_weather(&[("x".into(), 0.4)], span, 60, 1234);
        assert_eq!(a, b);
    }
}
