//! Scenario configuration, data joining, and configuration sweeps.
//!
//! A scenario file is line-oriented `key = value` text under `[section]`
//! headers. Recognized sections:
//!
//! - `[satellite]` — TLE source, transmit terminal, data generation/buffer
//! - `[noise]` — receiver noise temperature and bandwidth
//! - `[defaults]` — window, thresholds, loss-model constants, weather source
//! - `[station:<id>]` — one per ground station
//! - `[config:<name>]` — a network configuration (ordered station list)
//!
//! Full-line comments start with `#`. Unknown sections or keys are rejected
//! with their line number. Values are normalized to SI units on load.
//! Referenced data files resolve relative to the config file's directory.

use crate::analysis::{
    availability_series, buffer_simulate, pearson_cloud_correlation, throughput, AnalysisError,
    AvailabilityReport, BufferSimulation, CorrelationMatrix, DownlinkInterval, StationInput,
    ThroughputSummary,
};
use crate::linkbudget::{
    LinkEnvironment, NoiseSpec, TerminalSpec, DEFAULT_CLOUD_LOSS_FULL_COVER_DB,
    DEFAULT_CLOUD_THRESHOLD, DEFAULT_CN2_REFERENCE, DEFAULT_TURBULENCE_DB_PER_DECADE,
};
use crate::orbit::{
    parse_tle, parse_tle_file, GeodeticSite, OrbitError, TleError, TwoLineElements,
};
use crate::passes::{find_passes, Pass, PassError};
use crate::time::{TimeWindow, UtcTime};
use crate::weather::{
    load_grid_series, load_turbulence_map, station_cloud_series, station_turbulence, synth_weather,
    WeatherError, WeatherSeries, DEFAULT_BOX_KM,
};
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

// ─── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Structural problem at a specific line.
    Parse {
        line: usize,
        message: String,
    },
    UnknownKey {
        line: usize,
        key: String,
    },
    MissingKey {
        section: String,
        key: String,
    },
    /// Value failed to parse as the unit its key implies.
    Unit {
        line: usize,
        key: String,
        value: String,
    },
    Duplicate {
        line: usize,
        what: String,
    },
    Invalid {
        key: String,
        message: String,
    },
    Tle(TleError),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "{path}: {source}"),
            ConfigError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::UnknownKey { line, key } => write!(f, "line {line}: unknown key {key:?}"),
            ConfigError::MissingKey { section, key } => {
                write!(f, "missing key {key:?} in section [{section}]")
            }
            ConfigError::Unit { line, key, value } => {
                write!(f, "line {line}: cannot parse {key} = {value:?}")
            }
            ConfigError::Duplicate { line, what } => write!(f, "line {line}: duplicate {what}"),
            ConfigError::Invalid { key, message } => write!(f, "{key}: {message}"),
            ConfigError::Tle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<TleError> for ConfigError {
    fn from(e: TleError) -> Self {
        ConfigError::Tle(e)
    }
}

/// Errors raised while joining data sources or running a sweep.
#[derive(Debug)]
pub enum ScenarioError {
    Weather(WeatherError),
    Pass(PassError),
    Analysis(AnalysisError),
    Orbit(OrbitError),
    /// Weather data does not cover the scenario window.
    SpanMismatch {
        station_id: String,
        uncovered: (UtcTime, UtcTime),
    },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Weather(e) => write!(f, "{e}"),
            ScenarioError::Pass(e) => write!(f, "{e}"),
            ScenarioError::Analysis(e) => write!(f, "{e}"),
            ScenarioError::Orbit(e) => write!(f, "{e}"),
            ScenarioError::SpanMismatch {
                station_id,
                uncovered,
            } => write!(
                f,
                "weather for {station_id} does not cover {} .. {}",
                uncovered.0, uncovered.1
            ),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<WeatherError> for ScenarioError {
    fn from(e: WeatherError) -> Self {
        ScenarioError::Weather(e)
    }
}

impl From<PassError> for ScenarioError {
    fn from(e: PassError) -> Self {
        ScenarioError::Pass(e)
    }
}

impl From<AnalysisError> for ScenarioError {
    fn from(e: AnalysisError) -> Self {
        ScenarioError::Analysis(e)
    }
}

impl From<OrbitError> for ScenarioError {
    fn from(e: OrbitError) -> Self {
        ScenarioError::Orbit(e)
    }
}

// ─── Scenario model ──────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeClass {
    Large,
    Mobile,
}

impl SizeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SizeClass::Large => "large",
            SizeClass::Mobile => "mobile",
        }
    }
}

/// A ground station: site geodetics plus receiver terminal parameters.
#[derive(Debug, Clone)]
pub struct GroundStation {
    pub id: String,
    pub site: GeodeticSite,
    pub size_class: SizeClass,
    pub rx_aperture_m: f64,
    pub min_elevation_deg: f64,
    pub box_km: f64,
    /// Bernoulli cloud probability for synthetic weather.
    pub cloud_prob: f64,
    /// Static Cn^2 for synthetic weather (grid mode reads the map instead).
    pub cn2: f64,
}

#[derive(Debug, Clone)]
pub struct NetworkConfiguration {
    pub name: String,
    pub station_ids: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SatelliteConfig {
    pub name: Option<String>,
    pub tle: TwoLineElements,
    pub tx_power_dbw: f64,
    pub wavelength_m: f64,
    pub tx_aperture_m: f64,
    pub efficiency: f64,
    pub beam_divergence_rad: f64,
    pub pointing_error_rad: f64,
    pub generation_rate_bps: u64,
    pub buffer_capacity_bits: u64,
    pub c_max_bps: f64,
}

#[derive(Debug, Clone)]
pub enum WeatherSource {
    /// Per-station Bernoulli draws from the station cloud probabilities.
    Synthetic { cadence_s: i64, seed: u64 },
    /// Gridded cloud series plus optional turbulence map, paths resolved
    /// relative to the config file.
    Grid {
        cloud_grid: PathBuf,
        turbulence_map: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    /// Normalize PDT against the largest configuration's ideal maximum.
    Largest,
    None,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub satellite: SatelliteConfig,
    pub noise: NoiseSpec,
    pub stations: Vec<GroundStation>,
    pub configurations: Vec<NetworkConfiguration>,
    pub window: TimeWindow,
    pub cloud_threshold: f64,
    pub zenith_attenuation_db: f64,
    pub link_margin_db: f64,
    pub cloud_loss_full_cover_db: f64,
    pub cn2_reference: f64,
    pub turbulence_db_per_decade: f64,
    pub availability_cadence_s: i64,
    pub normalize: NormalizeMode,
    pub weather: WeatherSource,
}

impl Scenario {
    pub fn station(&self, id: &str) -> Option<&GroundStation> {
        self.stations.iter().find(|s| s.id == id)
    }

    /// Satellite transmit terminal paired with one station's receiver.
    pub fn terminal_for(&self, station: &GroundStation) -> TerminalSpec {
        TerminalSpec {
            tx_power_dbw: self.satellite.tx_power_dbw,
            wavelength_m: self.satellite.wavelength_m,
            tx_aperture_m: self.satellite.tx_aperture_m,
            rx_aperture_m: station.rx_aperture_m,
            efficiency: self.satellite.efficiency,
            beam_divergence_rad: self.satellite.beam_divergence_rad,
            pointing_error_rad: self.satellite.pointing_error_rad,
        }
    }

    /// Environment template for a station (cloud/Cn^2 joined per sample).
    pub fn environment_for(&self, station: &GroundStation) -> LinkEnvironment {
        LinkEnvironment {
            zenith_attenuation_db: self.zenith_attenuation_db,
            cloud_fraction: 0.0,
            cn2: station.cn2,
            link_margin_db: self.link_margin_db,
            cloud_threshold: self.cloud_threshold,
            cloud_loss_full_cover_db: self.cloud_loss_full_cover_db,
            cn2_reference: self.cn2_reference,
            turbulence_db_per_decade: self.turbulence_db_per_decade,
        }
    }
}

// ─── Raw config text ─────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

#[derive(Debug, Clone)]
struct Section {
    line: usize,
    name: String,
    entries: Vec<Entry>,
}

fn parse_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                line: lineno,
                message: format!("unterminated section header {line:?}"),
            })?;
            sections.push(Section {
                line: lineno,
                name: name.trim().to_string(),
                entries: Vec::new(),
            });
        } else if let Some((key, value)) = line.split_once('=') {
            let section = sections.last_mut().ok_or(ConfigError::Parse {
                line: lineno,
                message: "key before any [section] header".to_string(),
            })?;
            section.entries.push(Entry {
                line: lineno,
                key: key.trim().to_string(),
                value: value.trim().to_string(),
            });
        } else {
            return Err(ConfigError::Parse {
                line: lineno,
                message: format!("expected 'key = value' or '[section]', got {line:?}"),
            });
        }
    }
    Ok(sections)
}

/// Apply `--set section.key=value` style overrides after parsing.
fn apply_overrides(
    sections: &mut Vec<Section>,
    sets: &[(String, String)],
) -> Result<(), ConfigError> {
    for (path, value) in sets {
        let (section_name, key) = path.rsplit_once('.').ok_or(ConfigError::Invalid {
            key: path.clone(),
            message: "override must look like section.key=value".to_string(),
        })?;
        let section = match sections.iter_mut().find(|s| s.name == section_name) {
            Some(s) => s,
            None => {
                sections.push(Section {
                    line: 0,
                    name: section_name.to_string(),
                    entries: Vec::new(),
                });
                sections.last_mut().unwrap()
            }
        };
        match section.entries.iter_mut().find(|e| e.key == key) {
            Some(entry) => entry.value = value.clone(),
            None => section.entries.push(Entry {
                line: 0,
                key: key.to_string(),
                value: value.clone(),
            }),
        }
    }
    Ok(())
}

// ─── Typed readers ───────────────────────────────────────────────────────────

struct SectionReader<'a> {
    section: &'a Section,
    used: BTreeSet<usize>,
}

impl<'a> SectionReader<'a> {
    fn new(section: &'a Section) -> Self {
        SectionReader {
            section,
            used: BTreeSet::new(),
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a Entry> {
        for (i, e) in self.section.entries.iter().enumerate() {
            if e.key == key {
                self.used.insert(i);
                return Some(e);
            }
        }
        None
    }

    fn text(&mut self, key: &str) -> Option<String> {
        self.get(key).map(|e| e.value.clone())
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| ConfigError::Unit {
                line: e.line,
                key: key.to_string(),
                value: e.value.clone(),
            }),
        }
    }

    fn f64_required(&mut self, key: &str) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Err(ConfigError::MissingKey {
                section: self.section.name.clone(),
                key: key.to_string(),
            }),
            Some(e) => e.value.parse().map_err(|_| ConfigError::Unit {
                line: e.line,
                key: key.to_string(),
                value: e.value.clone(),
            }),
        }
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(e) => parse_u64(&e.value).ok_or(ConfigError::Unit {
                line: e.line,
                key: key.to_string(),
                value: e.value.clone(),
            }),
        }
    }

    fn time(&mut self, key: &str) -> Result<UtcTime, ConfigError> {
        match self.get(key) {
            None => Err(ConfigError::MissingKey {
                section: self.section.name.clone(),
                key: key.to_string(),
            }),
            Some(e) => UtcTime::parse_iso8601(&e.value).map_err(|_| ConfigError::Unit {
                line: e.line,
                key: key.to_string(),
                value: e.value.clone(),
            }),
        }
    }

    /// Every key must have been consumed; anything left is unknown.
    fn finish(self) -> Result<(), ConfigError> {
        for (i, e) in self.section.entries.iter().enumerate() {
            if !self.used.contains(&i) {
                return Err(ConfigError::UnknownKey {
                    line: e.line,
                    key: e.key.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Accept plain integers and scientific notation for bit counts and rates,
/// requiring the value to be a whole number.
fn parse_u64(value: &str) -> Option<u64> {
    if let Ok(v) = value.parse::<u64>() {
        return Some(v);
    }
    let f: f64 = value.parse().ok()?;
    if f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Some(f as u64)
    } else {
        None
    }
}

// ─── Default values ──────────────────────────────────────────────────────────

pub const DEFAULT_TX_POWER_DBW: f64 = 0.0;
pub const DEFAULT_WAVELENGTH_NM: f64 = 1550.0;
pub const DEFAULT_TX_APERTURE_M: f64 = 0.1;
pub const DEFAULT_EFFICIENCY: f64 = 0.6;
pub const DEFAULT_BEAM_DIVERGENCE_URAD: f64 = 15.0;
pub const DEFAULT_POINTING_ERROR_URAD: f64 = 1.0;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 1e9;
pub const DEFAULT_NOISE_TEMPERATURE_K: f64 = 500.0;
pub const DEFAULT_ZENITH_ATTENUATION_DB: f64 = 0.5;
pub const DEFAULT_LINK_MARGIN_DB: f64 = 3.0;
pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 10.0;
pub const DEFAULT_C_MAX_BPS: f64 = 1e9;
/// 1.2 Tb/day rounded up to a whole bits-per-second rate.
pub const DEFAULT_GENERATION_RATE_BPS: u64 = 13_888_889;
pub const DEFAULT_BUFFER_CAPACITY_BITS: u64 = 390_000_000_000;
pub const DEFAULT_RX_APERTURE_LARGE_M: f64 = 1.0;
pub const DEFAULT_RX_APERTURE_MOBILE_M: f64 = 0.4;
pub const DEFAULT_AVAILABILITY_CADENCE_S: i64 = 900;
pub const DEFAULT_WEATHER_CADENCE_S: i64 = 900;
pub const DEFAULT_WEATHER_SEED: u64 = 42;
pub const DEFAULT_CLOUD_PROB: f64 = 0.5;

// ─── Loading ─────────────────────────────────────────────────────────────────

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    load_scenario_with_overrides(path, &[])
}

/// Load a scenario, applying `section.key=value` overrides after parse.
pub fn load_scenario_with_overrides(
    path: &Path,
    sets: &[(String, String)],
) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut sections = parse_sections(&text)?;
    apply_overrides(&mut sections, sets)?;
    build_scenario(&sections, &base_dir)
}

fn build_scenario(sections: &[Section], base_dir: &Path) -> Result<Scenario, ConfigError> {
    let mut satellite_section = None;
    let mut noise_section = None;
    let mut defaults_section = None;
    let mut station_sections: Vec<(&Section, String)> = Vec::new();
    let mut config_sections: Vec<(&Section, String)> = Vec::new();

    for section in sections {
        match section.name.as_str() {
            "satellite" => {
                if satellite_section.replace(section).is_some() {
                    return Err(ConfigError::Duplicate {
                        line: section.line,
                        what: "[satellite] section".into(),
                    });
                }
            }
            "noise" => {
                if noise_section.replace(section).is_some() {
                    return Err(ConfigError::Duplicate {
                        line: section.line,
                        what: "[noise] section".into(),
                    });
                }
            }
            "defaults" => {
                if defaults_section.replace(section).is_some() {
                    return Err(ConfigError::Duplicate {
                        line: section.line,
                        what: "[defaults] section".into(),
                    });
                }
            }
            name => {
                if let Some(id) = name.strip_prefix("station:") {
                    let id = id.trim().to_string();
                    if id.is_empty() {
                        return Err(ConfigError::Parse {
                            line: section.line,
                            message: "empty station id".into(),
                        });
                    }
                    if station_sections.iter().any(|(_, existing)| *existing == id) {
                        return Err(ConfigError::Duplicate {
                            line: section.line,
                            what: format!("station id {id:?}"),
                        });
                    }
                    station_sections.push((section, id));
                } else if let Some(name) = name.strip_prefix("config:") {
                    let name = name.trim().to_string();
                    if name.is_empty() {
                        return Err(ConfigError::Parse {
                            line: section.line,
                            message: "empty config name".into(),
                        });
                    }
                    if config_sections
                        .iter()
                        .any(|(_, existing)| *existing == name)
                    {
                        return Err(ConfigError::Duplicate {
                            line: section.line,
                            what: format!("config name {name:?}"),
                        });
                    }
                    config_sections.push((section, name));
                } else {
                    return Err(ConfigError::Parse {
                        line: section.line,
                        message: format!("unknown section [{name}]"),
                    });
                }
            }
        }
    }

    // [defaults]
    let empty = Section {
        line: 0,
        name: "defaults".into(),
        entries: Vec::new(),
    };
    let defaults = defaults_section.unwrap_or(&empty);
    let mut d = SectionReader::new(defaults);
    let window_start = d.time("window_start")?;
    let window_end = d.time("window_end")?;
    let window = TimeWindow::new(window_start, window_end).ok_or(ConfigError::Invalid {
        key: "window_start/window_end".into(),
        message: "window_start must not be after window_end".into(),
    })?;
    let cloud_threshold = d.f64("cloud_threshold", DEFAULT_CLOUD_THRESHOLD)?;
    let zenith_attenuation_db =
        d.f64("atmospheric_attenuation_db", DEFAULT_ZENITH_ATTENUATION_DB)?;
    let link_margin_db = d.f64("link_margin_db", DEFAULT_LINK_MARGIN_DB)?;
    let cloud_loss_full_cover_db =
        d.f64("cloud_loss_full_cover_db", DEFAULT_CLOUD_LOSS_FULL_COVER_DB)?;
    let cn2_reference = d.f64("turbulence_reference", DEFAULT_CN2_REFERENCE)?;
    let turbulence_db_per_decade =
        d.f64("turbulence_db_per_decade", DEFAULT_TURBULENCE_DB_PER_DECADE)?;
    let default_min_elevation = d.f64("min_elevation_deg", DEFAULT_MIN_ELEVATION_DEG)?;
    let default_box_km = d.f64("box_km", DEFAULT_BOX_KM)?;
    let rx_large = d.f64("rx_aperture_large_m", DEFAULT_RX_APERTURE_LARGE_M)?;
    let rx_mobile = d.f64("rx_aperture_mobile_m", DEFAULT_RX_APERTURE_MOBILE_M)?;
    let availability_cadence_s = d.u64(
        "availability_cadence_s",
        DEFAULT_AVAILABILITY_CADENCE_S as u64,
    )? as i64;
    let normalize = match d.text("normalize").as_deref() {
        None | Some("largest") => NormalizeMode::Largest,
        Some("none") => NormalizeMode::None,
        Some(other) => {
            return Err(ConfigError::Invalid {
                key: "normalize".into(),
                message: format!("expected 'largest' or 'none', got {other:?}"),
            })
        }
    };
    let weather_mode = d
        .text("weather_mode")
        .unwrap_or_else(|| "synthetic".to_string());
    let weather_cadence_s = d.u64("weather_cadence_s", DEFAULT_WEATHER_CADENCE_S as u64)? as i64;
    let weather_seed = d.u64("weather_seed", DEFAULT_WEATHER_SEED)?;
    let cloud_grid = d.text("cloud_grid");
    let turbulence_map = d.text("turbulence_map");
    let weather = match weather_mode.as_str() {
        "synthetic" => WeatherSource::Synthetic {
            cadence_s: weather_cadence_s,
            seed: weather_seed,
        },
        "grid" => {
            let grid = cloud_grid.ok_or(ConfigError::MissingKey {
                section: "defaults".into(),
                key: "cloud_grid".into(),
            })?;
            WeatherSource::Grid {
                cloud_grid: base_dir.join(grid),
                turbulence_map: turbulence_map.map(|m| base_dir.join(m)),
            }
        }
        other => {
            return Err(ConfigError::Invalid {
                key: "weather_mode".into(),
                message: format!("expected 'synthetic' or 'grid', got {other:?}"),
            })
        }
    };
    d.finish()?;

    // [satellite]
    let satellite_section = satellite_section.ok_or(ConfigError::MissingKey {
        section: "satellite".into(),
        key: "(section)".into(),
    })?;
    let mut s = SectionReader::new(satellite_section);
    let name = s.text("name");
    let tle_file = s.text("tle_file");
    let tle_line1 = s.text("tle_line1");
    let tle_line2 = s.text("tle_line2");
    let tle = match (tle_file, tle_line1, tle_line2) {
        (Some(file), None, None) => {
            let path = base_dir.join(&file);
            let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let sets = parse_tle_file(&text)?;
            sets.into_iter().next().ok_or(ConfigError::Invalid {
                key: "tle_file".into(),
                message: format!("{file} contains no element sets"),
            })?
        }
        (None, Some(l1), Some(l2)) => parse_tle(name.as_deref(), &l1, &l2)?,
        (None, _, _) => {
            return Err(ConfigError::MissingKey {
                section: "satellite".into(),
                key: "tle_file (or tle_line1 + tle_line2)".into(),
            })
        }
        (Some(_), _, _) => {
            return Err(ConfigError::Invalid {
                key: "tle_file".into(),
                message: "give either tle_file or tle_line1/tle_line2, not both".into(),
            })
        }
    };
    let satellite = SatelliteConfig {
        name,
        tle,
        tx_power_dbw: s.f64("tx_power_dbw", DEFAULT_TX_POWER_DBW)?,
        wavelength_m: s.f64("wavelength_nm", DEFAULT_WAVELENGTH_NM)? * 1e-9,
        tx_aperture_m: s.f64("tx_aperture_m", DEFAULT_TX_APERTURE_M)?,
        efficiency: s.f64("efficiency", DEFAULT_EFFICIENCY)?,
        beam_divergence_rad: s.f64("beam_divergence_urad", DEFAULT_BEAM_DIVERGENCE_URAD)? * 1e-6,
        pointing_error_rad: s.f64("pointing_error_urad", DEFAULT_POINTING_ERROR_URAD)? * 1e-6,
        generation_rate_bps: s.u64("generation_rate_bps", DEFAULT_GENERATION_RATE_BPS)?,
        buffer_capacity_bits: s.u64("buffer_capacity_bits", DEFAULT_BUFFER_CAPACITY_BITS)?,
        c_max_bps: s.f64("c_max_bps", DEFAULT_C_MAX_BPS)?,
    };
    s.finish()?;
    validate_positive("efficiency", satellite.efficiency)?;
    validate_positive("wavelength_nm", satellite.wavelength_m)?;
    validate_positive("c_max_bps", satellite.c_max_bps)?;
    if satellite.buffer_capacity_bits == 0 {
        return Err(ConfigError::Invalid {
            key: "buffer_capacity_bits".into(),
            message: "must be positive".into(),
        });
    }

    // [noise]
    let noise = match noise_section {
        Some(section) => {
            let mut n = SectionReader::new(section);
            let noise = NoiseSpec {
                system_noise_temperature_k: n
                    .f64("system_noise_temperature_k", DEFAULT_NOISE_TEMPERATURE_K)?,
                bandwidth_hz: n.f64("bandwidth_hz", DEFAULT_BANDWIDTH_HZ)?,
            };
            n.finish()?;
            noise
        }
        None => NoiseSpec {
            system_noise_temperature_k: DEFAULT_NOISE_TEMPERATURE_K,
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
        },
    };
    validate_positive(
        "system_noise_temperature_k",
        noise.system_noise_temperature_k,
    )?;
    validate_positive("bandwidth_hz", noise.bandwidth_hz)?;

    // [station:<id>]
    if station_sections.is_empty() {
        return Err(ConfigError::MissingKey {
            section: "station:<id>".into(),
            key: "(section)".into(),
        });
    }
    let mut stations = Vec::with_capacity(station_sections.len());
    for (section, id) in &station_sections {
        let mut r = SectionReader::new(section);
        let latitude = r.f64_required("latitude")?;
        let longitude = r.f64_required("longitude")?;
        let altitude_m = r.f64("altitude_m", 0.0)?;
        let size_class = match r.text("size_class").as_deref() {
            None | Some("mobile") => SizeClass::Mobile,
            Some("large") => SizeClass::Large,
            Some(other) => {
                return Err(ConfigError::Invalid {
                    key: format!("station:{id}.size_class"),
                    message: format!("expected 'large' or 'mobile', got {other:?}"),
                })
            }
        };
        let rx_default = match size_class {
            SizeClass::Large => rx_large,
            SizeClass::Mobile => rx_mobile,
        };
        let station = GroundStation {
            id: id.clone(),
            site: GeodeticSite::new(latitude, longitude, altitude_m).map_err(|e| {
                ConfigError::Invalid {
                    key: format!("station:{id}"),
                    message: e.to_string(),
                }
            })?,
            size_class,
            rx_aperture_m: r.f64("rx_aperture_m", rx_default)?,
            min_elevation_deg: r.f64("min_elevation_deg", default_min_elevation)?,
            box_km: r.f64("box_km", default_box_km)?,
            cloud_prob: r.f64("cloud_prob", DEFAULT_CLOUD_PROB)?,
            cn2: r.f64("cn2", cn2_reference)?,
        };
        r.finish()?;
        if !(0.0..90.0).contains(&station.min_elevation_deg) {
            return Err(ConfigError::Invalid {
                key: format!("station:{id}.min_elevation_deg"),
                message: format!("{} outside [0, 90)", station.min_elevation_deg),
            });
        }
        if !(0.0..=1.0).contains(&station.cloud_prob) {
            return Err(ConfigError::Invalid {
                key: format!("station:{id}.cloud_prob"),
                message: format!("{} outside [0, 1]", station.cloud_prob),
            });
        }
        validate_positive(
            &format!("station:{id}.rx_aperture_m"),
            station.rx_aperture_m,
        )?;
        validate_positive(&format!("station:{id}.box_km"), station.box_km)?;
        validate_positive(&format!("station:{id}.cn2"), station.cn2)?;
        stations.push(station);
    }

    // [config:<name>]
    if config_sections.is_empty() {
        return Err(ConfigError::MissingKey {
            section: "config:<name>".into(),
            key: "(section)".into(),
        });
    }
    let mut configurations = Vec::with_capacity(config_sections.len());
    for (section, name) in &config_sections {
        let mut r = SectionReader::new(section);
        let list = r.text("stations").ok_or(ConfigError::MissingKey {
            section: format!("config:{name}"),
            key: "stations".into(),
        })?;
        r.finish()?;
        let ids: Vec<String> = list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if ids.is_empty() {
            return Err(ConfigError::Invalid {
                key: format!("config:{name}.stations"),
                message: "configuration must list at least one station".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if stations.iter().all(|s| s.id != *id) {
                return Err(ConfigError::Invalid {
                    key: format!("config:{name}.stations"),
                    message: format!("unknown station {id:?}"),
                });
            }
            if !seen.insert(id.clone()) {
                return Err(ConfigError::Duplicate {
                    line: section.line,
                    what: format!("station {id:?} in config {name:?}"),
                });
            }
        }
        configurations.push(NetworkConfiguration {
            name: name.clone(),
            station_ids: ids,
        });
    }

    Ok(Scenario {
        satellite,
        noise,
        stations,
        configurations,
        window,
        cloud_threshold,
        zenith_attenuation_db,
        link_margin_db,
        cloud_loss_full_cover_db,
        cn2_reference,
        turbulence_db_per_decade,
        availability_cadence_s,
        normalize,
        weather,
    })
}

fn validate_positive(key: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            key: key.to_string(),
            message: format!("{value} must be positive"),
        })
    }
}

// ─── Weather assembly and integration ────────────────────────────────────────

/// Produce one weather series per catalog station from the scenario's
/// configured source, with per-station Cn^2 attached to every sample.
pub fn build_weather(scenario: &Scenario) -> Result<Vec<WeatherSeries>, ScenarioError> {
    match &scenario.weather {
        WeatherSource::Synthetic { cadence_s, seed } => {
            let specs: Vec<(String, f64)> = scenario
                .stations
                .iter()
                .map(|s| (s.id.clone(), s.cloud_prob))
                .collect();
            let series = synth_weather(&specs, scenario.window, *cadence_s, *seed);
            Ok(series
                .into_iter()
                .zip(&scenario.stations)
                .map(|(w, station)| w.with_cn2(station.cn2))
                .collect())
        }
        WeatherSource::Grid {
            cloud_grid,
            turbulence_map,
        } => {
            let grid = load_grid_series(cloud_grid)?;
            let map = match turbulence_map {
                Some(path) => Some(load_turbulence_map(path)?),
                None => None,
            };
            let mut out = Vec::with_capacity(scenario.stations.len());
            for station in &scenario.stations {
                let series =
                    station_cloud_series(&grid, &station.site, station.box_km, &station.id)?;
                let cn2 = match &map {
                    Some(map) => station_turbulence(map, &station.site)?,
                    None => station.cn2,
                };
                out.push(series.with_cn2(cn2));
            }
            Ok(out)
        }
    }
}

/// Passes joined with weather for one station.
#[derive(Debug, Clone)]
pub struct StationData {
    pub station_index: usize,
    pub station_id: String,
    pub passes: Vec<Pass>,
    pub weather: WeatherSeries,
}

/// Every catalog station must have a weather series spanning the scenario
/// window; the error names the uncovered interval.
pub fn check_weather_coverage(
    scenario: &Scenario,
    weather: &[WeatherSeries],
) -> Result<(), ScenarioError> {
    for station in &scenario.stations {
        let series = weather
            .iter()
            .find(|w| w.station_id == station.id)
            .ok_or_else(|| ScenarioError::SpanMismatch {
                station_id: station.id.clone(),
                uncovered: (scenario.window.start, scenario.window.end),
            })?;
        let span = series.span().ok_or_else(|| ScenarioError::SpanMismatch {
            station_id: station.id.clone(),
            uncovered: (scenario.window.start, scenario.window.end),
        })?;
        if span.start > scenario.window.start || span.end < scenario.window.end {
            let uncovered = if span.start > scenario.window.start {
                (scenario.window.start, span.start.min(scenario.window.end))
            } else {
                (span.end.max(scenario.window.start), scenario.window.end)
            };
            return Err(ScenarioError::SpanMismatch {
                station_id: station.id.clone(),
                uncovered,
            });
        }
    }
    Ok(())
}

/// Join every data source: per-station passes over the scenario window plus
/// the weather series that covers them. Station order follows the catalog.
pub fn integrate(
    scenario: &Scenario,
    weather: &[WeatherSeries],
) -> Result<Vec<StationData>, ScenarioError> {
    check_weather_coverage(scenario, weather)?;
    let mut joined = Vec::with_capacity(scenario.stations.len());
    for (station_index, station) in scenario.stations.iter().enumerate() {
        let series = weather
            .iter()
            .find(|w| w.station_id == station.id)
            .expect("coverage check resolved every station");
        let passes = find_passes(
            &scenario.satellite.tle,
            &station.site,
            &station.id,
            scenario.window,
            station.min_elevation_deg,
        )?;
        joined.push(StationData {
            station_index,
            station_id: station.id.clone(),
            passes,
            weather: series.clone(),
        });
    }
    Ok(joined)
}

// ─── Sweeps ──────────────────────────────────────────────────────────────────

/// Results for one network configuration.
#[derive(Debug, Clone)]
pub struct ConfigurationResult {
    pub name: String,
    pub availability: AvailabilityReport,
    pub throughput: ThroughputSummary,
    pub buffer: BufferSimulation,
    /// PDT against the normalization denominator (the largest configuration's
    /// ideal maximum when `normalize = largest`).
    pub pdt_normalized_pct: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepResults {
    pub configurations: Vec<ConfigurationResult>,
    pub correlation: Option<CorrelationMatrix>,
}

/// Run availability, throughput, and buffer accounting for every network
/// configuration over the joined data. Results depend only on scenario
/// content, never on configuration order.
pub fn run_sweep(
    scenario: &Scenario,
    joined: &[StationData],
) -> Result<SweepResults, ScenarioError> {
    struct Partial {
        name: String,
        availability: AvailabilityReport,
        throughput: ThroughputSummary,
        buffer: BufferSimulation,
    }

    let mut partials = Vec::with_capacity(scenario.configurations.len());
    for config in &scenario.configurations {
        let members: Vec<&StationData> = config
            .station_ids
            .iter()
            .map(|id| {
                joined
                    .iter()
                    .find(|d| d.station_id == *id)
                    .expect("validated station id")
            })
            .collect();

        let weather: Vec<WeatherSeries> = members.iter().map(|d| d.weather.clone()).collect();
        let availability = availability_series(
            &weather,
            scenario.cloud_threshold,
            scenario.availability_cadence_s,
        )?;

        let inputs: Vec<StationInput<'_>> = members
            .iter()
            .map(|d| {
                let station = scenario
                    .station(&d.station_id)
                    .expect("validated station id");
                StationInput {
                    station_id: d.station_id.clone(),
                    passes: &d.passes,
                    weather: &d.weather,
                    terminal: scenario.terminal_for(station),
                    environment: scenario.environment_for(station),
                }
            })
            .collect();
        let throughput_summary =
            throughput(&inputs, &scenario.noise, scenario.satellite.c_max_bps)?;

        let intervals: Vec<DownlinkInterval> = throughput_summary
            .per_pass
            .iter()
            .map(|p| DownlinkInterval {
                aos: p.aos,
                los: p.los,
                rate_bps: p.mean_rate_bps.floor() as u64,
            })
            .collect();
        let buffer = buffer_simulate(
            &intervals,
            scenario.satellite.generation_rate_bps,
            scenario.satellite.buffer_capacity_bits,
            scenario.window,
        );

        partials.push(Partial {
            name: config.name.clone(),
            availability,
            throughput: throughput_summary,
            buffer,
        });
    }

    let denominator = match scenario.normalize {
        NormalizeMode::Largest => partials
            .iter()
            .map(|p| p.throughput.max_bits)
            .fold(0.0, f64::max),
        NormalizeMode::None => 0.0,
    };
    let configurations = partials
        .into_iter()
        .map(|p| {
            let pdt_normalized_pct = match scenario.normalize {
                NormalizeMode::Largest if denominator > 0.0 => {
                    Some(100.0 * p.throughput.total_bits / denominator)
                }
                _ => p.throughput.pdt_pct,
            };
            ConfigurationResult {
                name: p.name,
                availability: p.availability,
                throughput: p.throughput,
                buffer: p.buffer,
                pdt_normalized_pct,
            }
        })
        .collect();

    let correlation = if scenario.stations.len() >= 2 {
        let weather: Vec<WeatherSeries> = joined.iter().map(|d| d.weather.clone()).collect();
        Some(pearson_cloud_correlation(
            &weather,
            scenario.availability_cadence_s,
        )?)
    } else {
        None
    };

    Ok(SweepResults {
        configurations,
        correlation,
    })
}
