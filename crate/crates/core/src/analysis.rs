//! Network-level aggregation: availability, throughput, onboard-buffer
//! accounting, and cloud-correlation statistics.
//!
//! Availability at a tick is 1 when at least one station in the set has a
//! cloud-free line of sight (cloud fraction strictly below the threshold);
//! monthly availability averages the ticks of complete calendar months and
//! the overall figure is the plain mean of the monthly percentages.
//!
//! Throughput evaluates the link budget per pass sample, caps the achieved
//! rate at the configured maximum terminal rate, and when several stations
//! see the satellite simultaneously credits only the station with the
//! highest instantaneous capacity (ties break in station catalog order).
//! Buffer accounting is exact in integer bits.

use crate::linkbudget::{
    link_budget, LinkEnvironment, LinkError, LinkResult, NoiseSpec, TerminalSpec,
};
use crate::passes::Pass;
use crate::time::{TimeWindow, UtcTime, YearMonth};
use crate::weather::{WeatherError, WeatherSeries};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub enum AnalysisError {
    /// The weather series have no common time span.
    NoOverlap,
    /// Weather does not cover the passes (or window) it must be joined with.
    SpanMismatch {
        station_id: String,
        uncovered: (UtcTime, UtcTime),
    },
    /// A pass sample achieved more than the configured maximum rate.
    CMaxExceeded {
        c_max_bps: f64,
        achieved_bps: f64,
    },
    /// Fewer stations than the statistic needs.
    TooFewStations {
        needed: usize,
        got: usize,
    },
    Weather(WeatherError),
    Link(LinkError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::NoOverlap => write!(f, "weather series share no common time span"),
            AnalysisError::SpanMismatch {
                station_id,
                uncovered,
            } => write!(
                f,
                "weather for {station_id} does not cover {} .. {}",
                uncovered.0, uncovered.1
            ),
            AnalysisError::CMaxExceeded {
                c_max_bps,
                achieved_bps,
            } => write!(
                f,
                "achieved rate {achieved_bps} bps exceeds configured c_max {c_max_bps} bps"
            ),
            AnalysisError::TooFewStations { needed, got } => {
                write!(f, "need at least {needed} stations, got {got}")
            }
            AnalysisError::Weather(e) => write!(f, "{e}"),
            AnalysisError::Link(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

impl From<WeatherError> for AnalysisError {
    fn from(e: WeatherError) -> Self {
        AnalysisError::Weather(e)
    }
}

impl From<LinkError> for AnalysisError {
    fn from(e: LinkError) -> Self {
        AnalysisError::Link(e)
    }
}

// ─── Availability ────────────────────────────────────────────────────────────

/// Availability of the station network over time.
#[derive(Debug, Clone)]
pub struct AvailabilityReport {
    pub threshold: f64,
    pub cadence_s: i64,
    /// Tick-by-tick network availability over the intersection span.
    pub series: Vec<(UtcTime, bool)>,
    /// Percent availability per complete calendar month.
    pub monthly: Vec<(YearMonth, f64)>,
    /// Mean of the monthly percentages; absent when no month is complete.
    pub overall_pct: Option<f64>,
    /// Single-site availability per input station, same monthly pipeline.
    pub per_station_pct: Vec<(String, Option<f64>)>,
}

impl AvailabilityReport {
    /// Fraction of ticks with no available station, over the raw series.
    pub fn outage_fraction(&self) -> f64 {
        if self.series.is_empty() {
            return 0.0;
        }
        let outages = self.series.iter().filter(|(_, a)| !*a).count();
        outages as f64 / self.series.len() as f64
    }
}

/// Evaluate network availability on a fixed cadence over the intersection
/// of the stations' weather spans.
pub fn availability_series(
    weather: &[WeatherSeries],
    threshold: f64,
    cadence_s: i64,
) -> Result<AvailabilityReport, AnalysisError> {
    if weather.is_empty() {
        return Err(AnalysisError::TooFewStations { needed: 1, got: 0 });
    }
    assert!(cadence_s > 0, "cadence must be positive");
    let mut start = UtcTime::from_unix_seconds(i64::MIN);
    let mut end = UtcTime::from_unix_seconds(i64::MAX);
    for series in weather {
        let span = series.span().ok_or(AnalysisError::NoOverlap)?;
        start = start.max(span.start);
        end = end.min(span.end);
    }
    if start > end {
        return Err(AnalysisError::NoOverlap);
    }

    let mut series_out = Vec::new();
    let mut t = start;
    while t <= end {
        let mut available = false;
        for w in weather {
            if w.cloud_fraction_at(t)? < threshold {
                available = true;
                break;
            }
        }
        series_out.push((t, available));
        t = t.plus_seconds(cadence_s);
    }

    let monthly = monthly_availability(&series_out, start, end, cadence_s);
    let overall_pct = mean_of(&monthly);

    let mut per_station_pct = Vec::new();
    for w in weather {
        let mut single = Vec::with_capacity(series_out.len());
        for (t, _) in &series_out {
            single.push((*t, w.cloud_fraction_at(*t)? < threshold));
        }
        let m = monthly_availability(&single, start, end, cadence_s);
        per_station_pct.push((w.station_id.clone(), mean_of(&m)));
    }

    Ok(AvailabilityReport {
        threshold,
        cadence_s,
        series: series_out,
        monthly,
        overall_pct,
        per_station_pct,
    })
}

fn mean_of(monthly: &[(YearMonth, f64)]) -> Option<f64> {
    if monthly.is_empty() {
        None
    } else {
        Some(monthly.iter().map(|(_, v)| v).sum::<f64>() / monthly.len() as f64)
    }
}

/// Group ticks by calendar month, keeping only months whose full tick grid
/// lies inside [start, end] (incomplete edge months are excluded).
fn monthly_availability(
    series: &[(UtcTime, bool)],
    start: UtcTime,
    end: UtcTime,
    cadence_s: i64,
) -> Vec<(YearMonth, f64)> {
    let mut buckets: BTreeMap<YearMonth, (u64, u64)> = BTreeMap::new();
    for (t, a) in series {
        let e = buckets.entry(t.year_month()).or_insert((0, 0));
        e.0 += 1;
        if *a {
            e.1 += 1;
        }
    }
    buckets
        .into_iter()
        .filter(|(month, _)| month_is_complete(*month, start, end, cadence_s))
        .map(|(month, (ticks, avail))| (month, 100.0 * avail as f64 / ticks as f64))
        .collect()
}

/// A month is complete when the tick grid anchored at `start` covers it
/// end to end: the month must not begin before the span, and the last grid
/// tick inside the month must not exceed the span end.
fn month_is_complete(month: YearMonth, start: UtcTime, end: UtcTime, cadence_s: i64) -> bool {
    let month_start = month.start();
    let month_end = month.next().start();
    if month_start < start {
        return false;
    }
    let k = (month_end.unix_seconds() - 1 - start.unix_seconds()).div_euclid(cadence_s);
    let last_tick = start.unix_seconds() + k * cadence_s;
    last_tick <= end.unix_seconds()
}

// ─── Throughput ──────────────────────────────────────────────────────────────

/// Everything the throughput evaluation needs to know about one station.
#[derive(Debug, Clone)]
pub struct StationInput<'a> {
    pub station_id: String,
    pub passes: &'a [Pass],
    pub weather: &'a WeatherSeries,
    pub terminal: TerminalSpec,
    /// Template environment; cloud fraction and Cn^2 are overwritten per
    /// sample from the weather series.
    pub environment: LinkEnvironment,
}

/// One evaluated geometry sample inside a pass.
#[derive(Debug, Clone)]
pub struct SampleEvaluation {
    pub time: UtcTime,
    pub elevation_deg: f64,
    pub slant_range_m: f64,
    pub cloud_fraction: f64,
    pub link: LinkResult,
    /// Achieved rate: Shannon capacity capped at c_max, zero when blocked.
    pub rate_bps: f64,
    /// False when another station had strictly higher capacity at this tick.
    pub credited: bool,
}

/// Per-pass throughput outcome.
#[derive(Debug, Clone)]
pub struct PassThroughput {
    pub pass_id: usize,
    pub station_id: String,
    pub aos: UtcTime,
    pub los: UtcTime,
    pub duration_s: f64,
    /// Mean credited rate over the pass samples (bps).
    pub mean_rate_bps: f64,
    /// mean_rate * duration.
    pub bits: f64,
    pub samples: Vec<SampleEvaluation>,
}

/// Aggregate transmitted-data summary.
#[derive(Debug, Clone)]
pub struct ThroughputSummary {
    /// Total data transmitted (bits).
    pub total_bits: f64,
    /// Maximum possible under ideal conditions: c_max times total pass time.
    pub max_bits: f64,
    /// 100 * total / max; absent when there are no passes.
    pub pdt_pct: Option<f64>,
    /// Transmitted bits per calendar month of the pass AOS.
    pub per_month: Vec<(YearMonth, f64)>,
    pub per_pass: Vec<PassThroughput>,
}

/// Evaluate the link budget over every pass sample and aggregate transmitted
/// data. Output passes are ordered by station catalog order then AOS; pass
/// ids are indices in that ordering.
pub fn throughput(
    stations: &[StationInput<'_>],
    noise: &NoiseSpec,
    c_max_bps: f64,
) -> Result<ThroughputSummary, AnalysisError> {
    assert!(c_max_bps > 0.0, "c_max must be positive");

    // Weather must cover every pass sample it will be joined with.
    for s in stations {
        let span = match s.weather.span() {
            Some(span) => span,
            None => {
                if s.passes.is_empty() {
                    continue;
                }
                return Err(AnalysisError::SpanMismatch {
                    station_id: s.station_id.clone(),
                    uncovered: (s.passes[0].aos, s.passes[s.passes.len() - 1].los),
                });
            }
        };
        for p in s.passes {
            let lo = p.samples.first().map(|x| x.time).unwrap_or(p.aos);
            let hi = p.samples.last().map(|x| x.time).unwrap_or(p.los);
            if lo < span.start || hi > span.end {
                return Err(AnalysisError::SpanMismatch {
                    station_id: s.station_id.clone(),
                    uncovered: (lo, hi),
                });
            }
        }
    }

    // First sweep: evaluate every sample independently.
    let mut evaluated: Vec<(usize, PassThroughput)> = Vec::new();
    for (station_rank, s) in stations.iter().enumerate() {
        for p in s.passes {
            let mut samples = Vec::with_capacity(p.samples.len());
            for geom in &p.samples {
                let sample = s.weather.sample_at(geom.time)?;
                let mut env = s.environment;
                env.cloud_fraction = sample.cloud_fraction;
                if let Some(cn2) = sample.cn2 {
                    env.cn2 = cn2;
                }
                let link = link_budget(&s.terminal, noise, &env, geom)?;
                let rate_bps = link.capacity_bps.min(c_max_bps);
                samples.push(SampleEvaluation {
                    time: geom.time,
                    elevation_deg: geom.elevation_deg,
                    slant_range_m: geom.slant_range_m,
                    cloud_fraction: sample.cloud_fraction,
                    link,
                    rate_bps,
                    credited: true,
                });
            }
            evaluated.push((
                station_rank,
                PassThroughput {
                    pass_id: 0,
                    station_id: s.station_id.clone(),
                    aos: p.aos,
                    los: p.los,
                    duration_s: p.duration_s,
                    mean_rate_bps: 0.0,
                    bits: 0.0,
                    samples,
                },
            ));
        }
    }
    evaluated.sort_by(|(ra, a), (rb, b)| ra.cmp(rb).then(a.aos.cmp(&b.aos)));

    // Second sweep: at each shared tick, credit only the best station.
    // Samples sit on a global cadence grid, so equal timestamps are the
    // simultaneity test.
    let mut best_at: BTreeMap<UtcTime, (f64, usize)> = BTreeMap::new();
    for (rank, p) in &evaluated {
        for sample in &p.samples {
            let entry = best_at
                .entry(sample.time)
                .or_insert((f64::NEG_INFINITY, usize::MAX));
            if sample.rate_bps > entry.0 || (sample.rate_bps == entry.0 && *rank < entry.1) {
                *entry = (sample.rate_bps, *rank);
            }
        }
    }
    for (rank, p) in &mut evaluated {
        for sample in &mut p.samples {
            let &(best_rate, best_rank) = best_at.get(&sample.time).unwrap();
            sample.credited = sample.rate_bps == best_rate && *rank == best_rank;
        }
    }

    // Aggregate per pass and per month.
    let mut total_bits = 0.0;
    let mut max_bits = 0.0;
    let mut per_month: BTreeMap<YearMonth, f64> = BTreeMap::new();
    let mut per_pass = Vec::with_capacity(evaluated.len());
    for (pass_id, (_, mut p)) in evaluated.into_iter().enumerate() {
        p.pass_id = pass_id;
        let n = p.samples.len();
        let mean_rate = if n == 0 {
            0.0
        } else {
            p.samples
                .iter()
                .map(|s| if s.credited { s.rate_bps } else { 0.0 })
                .sum::<f64>()
                / n as f64
        };
        if mean_rate > c_max_bps {
            return Err(AnalysisError::CMaxExceeded {
                c_max_bps,
                achieved_bps: mean_rate,
            });
        }
        p.mean_rate_bps = mean_rate;
        p.bits = mean_rate * p.duration_s;
        total_bits += p.bits;
        max_bits += c_max_bps * p.duration_s;
        *per_month.entry(p.aos.year_month()).or_insert(0.0) += p.bits;
        per_pass.push(p);
    }

    let pdt_pct = if max_bits > 0.0 {
        Some(100.0 * total_bits / max_bits)
    } else {
        None
    };
    Ok(ThroughputSummary {
        total_bits,
        max_bits,
        pdt_pct,
        per_month: per_month.into_iter().collect(),
        per_pass,
    })
}

// ─── Onboard buffer ──────────────────────────────────────────────────────────

/// Buffer accounting totals, exact in integer bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BufferTotals {
    pub generated_bits: u64,
    pub downlinked_bits: u64,
    pub lost_bits: u64,
    pub final_fill_bits: u64,
}

/// Buffer state at one boundary of the piecewise-linear evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BufferPoint {
    pub time: UtcTime,
    pub fill_bits: u64,
    pub generated_bits: u64,
    pub downlinked_bits: u64,
    pub lost_bits: u64,
}

#[derive(Debug, Clone)]
pub struct BufferSimulation {
    pub points: Vec<BufferPoint>,
    pub totals: BufferTotals,
}

/// A downlink opportunity: [aos, los] with a constant achieved rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DownlinkInterval {
    pub aos: UtcTime,
    pub los: UtcTime,
    pub rate_bps: u64,
}

/// Piecewise-linear onboard-buffer simulation. The buffer starts empty,
/// fills at the generation rate, drains during passes at the achieved rate
/// (overlapping passes use the highest rate: the satellite talks to one
/// station at a time), and overflow above capacity is lost. Every total is
/// exact in integer bits; the per-segment closed forms agree bit-for-bit
/// with 1 s stepping.
pub fn buffer_simulate(
    passes: &[DownlinkInterval],
    generation_rate_bps: u64,
    capacity_bits: u64,
    span: TimeWindow,
) -> BufferSimulation {
    assert!(capacity_bits > 0, "capacity must be positive");

    // Segment boundaries: span edges plus every pass edge inside the span.
    let mut bounds: Vec<i64> = vec![span.start.unix_seconds(), span.end.unix_seconds()];
    for p in passes {
        for t in [p.aos.unix_seconds(), p.los.unix_seconds()] {
            if t > span.start.unix_seconds() && t < span.end.unix_seconds() {
                bounds.push(t);
            }
        }
    }
    bounds.sort_unstable();
    bounds.dedup();

    let g = generation_rate_bps;
    let mut fill: u64 = 0;
    let mut generated: u64 = 0;
    let mut downlinked: u64 = 0;
    let mut lost: u64 = 0;
    let mut points = Vec::with_capacity(bounds.len());
    points.push(BufferPoint {
        time: span.start,
        fill_bits: 0,
        generated_bits: 0,
        downlinked_bits: 0,
        lost_bits: 0,
    });

    for pair in bounds.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let dt = (t1 - t0) as u64;
        // Downlink is active over whole segments; boundaries were split at
        // every pass edge so coverage is all-or-none per segment.
        let rate: u64 = passes
            .iter()
            .filter(|p| p.aos.unix_seconds() <= t0 && p.los.unix_seconds() >= t1)
            .map(|p| p.rate_bps)
            .max()
            .unwrap_or(0);

        generated += g * dt;
        if rate >= g {
            // Monotone drain: transmitted = min(backlog + generated, rate*dt).
            let tx = (fill + g * dt).min(rate * dt);
            downlinked += tx;
            fill = fill + g * dt - tx;
        } else {
            // Monotone growth: transmit at full rate, overflow above capacity.
            downlinked += rate * dt;
            let raw = fill + (g - rate) * dt;
            if raw > capacity_bits {
                lost += raw - capacity_bits;
                fill = capacity_bits;
            } else {
                fill = raw;
            }
        }
        debug_assert_eq!(generated, downlinked + lost + fill, "buffer conservation");
        points.push(BufferPoint {
            time: UtcTime::from_unix_seconds(t1),
            fill_bits: fill,
            generated_bits: generated,
            downlinked_bits: downlinked,
            lost_bits: lost,
        });
    }

    BufferSimulation {
        points,
        totals: BufferTotals {
            generated_bits: generated,
            downlinked_bits: downlinked,
            lost_bits: lost,
            final_fill_bits: fill,
        },
    }
}

// ─── Cloud correlation ───────────────────────────────────────────────────────

/// Pairwise Pearson correlation of station cloud series. Entries are absent
/// (not zero) when either series has zero variance; the diagonal is 1 by
/// convention.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub station_ids: Vec<String>,
    pub r: Vec<Vec<Option<f64>>>,
}

/// Sample Pearson correlation between station cloud series, aligned to a
/// common tick grid by step-hold over the intersection span.
pub fn pearson_cloud_correlation(
    series: &[WeatherSeries],
    cadence_s: i64,
) -> Result<CorrelationMatrix, AnalysisError> {
    if series.len() < 2 {
        return Err(AnalysisError::TooFewStations {
            needed: 2,
            got: series.len(),
        });
    }
    let mut start = UtcTime::from_unix_seconds(i64::MIN);
    let mut end = UtcTime::from_unix_seconds(i64::MAX);
    for s in series {
        let span = s.span().ok_or(AnalysisError::NoOverlap)?;
        start = start.max(span.start);
        end = end.min(span.end);
    }
    if start > end {
        return Err(AnalysisError::NoOverlap);
    }

    let mut aligned: Vec<Vec<f64>> = Vec::with_capacity(series.len());
    for s in series {
        let mut xs = Vec::new();
        let mut t = start;
        while t <= end {
            xs.push(s.cloud_fraction_at(t)?);
            t = t.plus_seconds(cadence_s);
        }
        aligned.push(xs);
    }

    let n = series.len();
    let means: Vec<f64> = aligned
        .iter()
        .map(|xs| xs.iter().sum::<f64>() / xs.len() as f64)
        .collect();
    let variances: Vec<f64> = aligned
        .iter()
        .zip(&means)
        .map(|(xs, m)| xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>())
        .collect();

    let mut r = vec![vec![None; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = Some(1.0);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if variances[i] == 0.0 || variances[j] == 0.0 {
                continue;
            }
            let cov: f64 = aligned[i]
                .iter()
                .zip(&aligned[j])
                .map(|(x, y)| (x - means[i]) * (y - means[j]))
                .sum();
            let rij = cov / (variances[i] * variances[j]).sqrt();
            r[i][j] = Some(rij);
            r[j][i] = Some(rij);
        }
    }

    Ok(CorrelationMatrix {
        station_ids: series.iter().map(|s| s.station_id.clone()).collect(),
        r,
    })
}
