//! Optical link-budget chain: gains, losses, received power, SNR, and
//! Shannon-capacity data rate.
//!
//! Everything is additive in decibels:
//!
//! ```text
//! P_rx = P_tx + G_tx + G_rx - L_fs - (L_p + L_atm + L_cloud + L_turb + margin)
//! SNR  = P_rx - (k_B,dB + 10 log10 T_s + 10 log10 B)
//! C    = B log2(1 + 10^(SNR/10))
//! ```
//!
//! Cloud cover at or above the outage threshold blocks the link outright
//! (capacity 0, power/SNR unavailable) rather than contributing a finite
//! attenuation.

use crate::orbit::TopocentricState;
use std::fmt;

/// Boltzmann constant (J/K).
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// Cloud fraction at or above which the link is treated as blocked.
pub const DEFAULT_CLOUD_THRESHOLD: f64 = 0.1;

/// Sub-threshold haze penalty at full cover (dB); scales linearly in fraction.
pub const DEFAULT_CLOUD_LOSS_FULL_COVER_DB: f64 = 10.0;

/// Turbulence reference Cn^2 at which the penalty is zero.
pub const DEFAULT_CN2_REFERENCE: f64 = 1e-17;

/// Turbulence penalty slope (dB per decade of Cn^2 above the reference).
pub const DEFAULT_TURBULENCE_DB_PER_DECADE: f64 = 3.0;

/// Boltzmann constant expressed in dBW/K/Hz.
pub fn boltzmann_db() -> f64 {
    10.0 * BOLTZMANN_J_PER_K.log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkError {
    pub what: &'static str,
    pub value: f64,
}

impl fmt::Display for LinkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain error: {} = {}", self.what, self.value)
    }
}

impl std::error::Error for LinkError {}

fn require(cond: bool, what: &'static str, value: f64) -> Result<(), LinkError> {
    if cond && value.is_finite() {
        Ok(())
    } else {
        Err(LinkError { what, value })
    }
}

// ─── Specs ───────────────────────────────────────────────────────────────────

/// Transmit/receive terminal pair for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalSpec {
    pub tx_power_dbw: f64,
    pub wavelength_m: f64,
    pub tx_aperture_m: f64,
    pub rx_aperture_m: f64,
    /// Antenna efficiency, shared by both apertures.
    pub efficiency: f64,
    pub beam_divergence_rad: f64,
    pub pointing_error_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub system_noise_temperature_k: f64,
    pub bandwidth_hz: f64,
}

impl NoiseSpec {
    /// Noise floor k_B,dB + 10 log10 T_s + 10 log10 B (dBW).
    pub fn noise_floor_dbw(&self) -> f64 {
        boltzmann_db()
            + 10.0 * self.system_noise_temperature_k.log10()
            + 10.0 * self.bandwidth_hz.log10()
    }
}

/// Environmental conditions and loss-model constants for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEnvironment {
    /// Total zenith-path atmospheric attenuation (dB); the elevation-angle
    /// formula scales it by the cosecant of the elevation.
    pub zenith_attenuation_db: f64,
    pub cloud_fraction: f64,
    /// Refractive-index structure parameter for the site.
    pub cn2: f64,
    pub link_margin_db: f64,
    pub cloud_threshold: f64,
    pub cloud_loss_full_cover_db: f64,
    pub cn2_reference: f64,
    pub turbulence_db_per_decade: f64,
}

impl LinkEnvironment {
    /// Environment with the default cloud/turbulence model constants.
    pub fn new(
        zenith_attenuation_db: f64,
        cloud_fraction: f64,
        cn2: f64,
        link_margin_db: f64,
    ) -> Self {
        LinkEnvironment {
            zenith_attenuation_db,
            cloud_fraction,
            cn2,
            link_margin_db,
            cloud_threshold: DEFAULT_CLOUD_THRESHOLD,
            cloud_loss_full_cover_db: DEFAULT_CLOUD_LOSS_FULL_COVER_DB,
            cn2_reference: DEFAULT_CN2_REFERENCE,
            turbulence_db_per_decade: DEFAULT_TURBULENCE_DB_PER_DECADE,
        }
    }
}

/// One link evaluation: every constituent term plus the derived quantities.
/// `cloud_loss_db`, `received_power_dbw`, and `snr_db` are `None` when cloud
/// cover blocks the link; capacity is then zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkResult {
    pub tx_power_dbw: f64,
    pub fspl_db: f64,
    pub gain_tx_db: f64,
    pub gain_rx_db: f64,
    pub pointing_loss_db: f64,
    pub atmospheric_loss_db: f64,
    pub cloud_loss_db: Option<f64>,
    pub turbulence_loss_db: f64,
    pub link_margin_db: f64,
    pub received_power_dbw: Option<f64>,
    pub snr_db: Option<f64>,
    pub capacity_bps: f64,
}

impl LinkResult {
    pub fn is_blocked(&self) -> bool {
        self.cloud_loss_db.is_none()
    }
}

// ─── Component operations ────────────────────────────────────────────────────

/// Free-space path loss 20 log10(4 pi S / lambda) (dB).
pub fn free_space_path_loss(slant_range_m: f64, wavelength_m: f64) -> Result<f64, LinkError> {
    require(slant_range_m > 0.0, "slant_range_m", slant_range_m)?;
    require(wavelength_m > 0.0, "wavelength_m", wavelength_m)?;
    Ok(20.0 * (4.0 * std::f64::consts::PI * slant_range_m / wavelength_m).log10())
}

/// Aperture gain 10 log10(eta (pi D / lambda)^2) (dB).
pub fn antenna_gain(aperture_m: f64, wavelength_m: f64, efficiency: f64) -> Result<f64, LinkError> {
    require(aperture_m > 0.0, "aperture_m", aperture_m)?;
    require(wavelength_m > 0.0, "wavelength_m", wavelength_m)?;
    require(
        efficiency > 0.0 && efficiency <= 1.0,
        "efficiency",
        efficiency,
    )?;
    let ratio = std::f64::consts::PI * aperture_m / wavelength_m;
    Ok(10.0 * (efficiency * ratio * ratio).log10())
}

/// Pointing loss -10 log10(exp(-(2 sigma / theta_div)^2)) (dB).
pub fn pointing_loss(pointing_error_rad: f64, beam_divergence_rad: f64) -> Result<f64, LinkError> {
    require(
        pointing_error_rad >= 0.0,
        "pointing_error_rad",
        pointing_error_rad,
    )?;
    require(
        beam_divergence_rad > 0.0,
        "beam_divergence_rad",
        beam_divergence_rad,
    )?;
    let ratio = 2.0 * pointing_error_rad / beam_divergence_rad;
    Ok(ratio * ratio * 10.0 / std::f64::consts::LN_10)
}

/// Cosecant slant-path scaling of the zenith attenuation (dB). Diverges at
/// the horizon, so elevations at or below zero are a domain error; visibility
/// masks keep real passes away from it.
pub fn atmospheric_loss(zenith_attenuation_db: f64, elevation_deg: f64) -> Result<f64, LinkError> {
    require(
        zenith_attenuation_db >= 0.0,
        "zenith_attenuation_db",
        zenith_attenuation_db,
    )?;
    require(
        elevation_deg > 0.0 && elevation_deg <= 90.0,
        "elevation_deg",
        elevation_deg,
    )?;
    Ok(zenith_attenuation_db / elevation_deg.to_radians().sin())
}

/// Sub-threshold cloud attenuation, or `Blocked` at/above the outage threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CloudLoss {
    Attenuation(f64),
    Blocked,
}

pub fn cloud_loss(cloud_fraction: f64, threshold: f64, full_cover_db: f64) -> CloudLoss {
    if cloud_fraction >= threshold {
        CloudLoss::Blocked
    } else {
        CloudLoss::Attenuation(full_cover_db * cloud_fraction)
    }
}

/// Logarithmic turbulence penalty, zero at the reference Cn^2 and clamped
/// to never go negative below it.
pub fn turbulence_loss(cn2: f64, reference: f64, db_per_decade: f64) -> Result<f64, LinkError> {
    require(cn2 > 0.0, "cn2", cn2)?;
    require(reference > 0.0, "cn2_reference", reference)?;
    require(db_per_decade >= 0.0, "db_per_decade", db_per_decade)?;
    Ok((db_per_decade * (cn2 / reference).log10()).max(0.0))
}

/// Shannon capacity B log2(1 + SNR_linear) (bit/s). No SNR floor: very weak
/// links report their true tiny capacity, outage semantics live in the cloud
/// threshold.
pub fn shannon_capacity(bandwidth_hz: f64, snr_db: f64) -> f64 {
    bandwidth_hz * (1.0 + 10f64.powf(snr_db / 10.0)).log2()
}

/// Full chain evaluation for one geometry sample.
pub fn link_budget(
    terminal: &TerminalSpec,
    noise: &NoiseSpec,
    env: &LinkEnvironment,
    geometry: &TopocentricState,
) -> Result<LinkResult, LinkError> {
    require(
        noise.system_noise_temperature_k > 0.0,
        "system_noise_temperature_k",
        noise.system_noise_temperature_k,
    )?;
    require(noise.bandwidth_hz > 0.0, "bandwidth_hz", noise.bandwidth_hz)?;
    require(
        env.link_margin_db >= 0.0,
        "link_margin_db",
        env.link_margin_db,
    )?;
    require(
        (0.0..=1.0).contains(&env.cloud_fraction),
        "cloud_fraction",
        env.cloud_fraction,
    )?;

    let fspl_db = free_space_path_loss(geometry.slant_range_m, terminal.wavelength_m)?;
    let gain_tx_db = antenna_gain(
        terminal.tx_aperture_m,
        terminal.wavelength_m,
        terminal.efficiency,
    )?;
    let gain_rx_db = antenna_gain(
        terminal.rx_aperture_m,
        terminal.wavelength_m,
        terminal.efficiency,
    )?;
    let pointing_loss_db =
        pointing_loss(terminal.pointing_error_rad, terminal.beam_divergence_rad)?;
    let atmospheric_loss_db = atmospheric_loss(env.zenith_attenuation_db, geometry.elevation_deg)?;
    let turbulence_loss_db =
        turbulence_loss(env.cn2, env.cn2_reference, env.turbulence_db_per_decade)?;

    let cloud = cloud_loss(
        env.cloud_fraction,
        env.cloud_threshold,
        env.cloud_loss_full_cover_db,
    );
    let cloud_loss_db = match cloud {
        CloudLoss::Blocked => {
            return Ok(LinkResult {
                tx_power_dbw: terminal.tx_power_dbw,
                fspl_db,
                gain_tx_db,
                gain_rx_db,
                pointing_loss_db,
                atmospheric_loss_db,
                cloud_loss_db: None,
                turbulence_loss_db,
                link_margin_db: env.link_margin_db,
                received_power_dbw: None,
                snr_db: None,
                capacity_bps: 0.0,
            });
        }
        CloudLoss::Attenuation(db) => db,
    };

    let other_losses_db = pointing_loss_db
        + atmospheric_loss_db
        + cloud_loss_db
        + turbulence_loss_db
        + env.link_margin_db;
    let received_power_dbw =
        terminal.tx_power_dbw + gain_tx_db + gain_rx_db - fspl_db - other_losses_db;
    let snr_db = received_power_dbw - noise.noise_floor_dbw();
    let capacity_bps = shannon_capacity(noise.bandwidth_hz, snr_db);

    Ok(LinkResult {
        tx_power_dbw: terminal.tx_power_dbw,
        fspl_db,
        gain_tx_db,
        gain_rx_db,
        pointing_loss_db,
        atmospheric_loss_db,
        cloud_loss_db: Some(cloud_loss_db),
        turbulence_loss_db,
        link_margin_db: env.link_margin_db,
        received_power_dbw: Some(received_power_dbw),
        snr_db: Some(snr_db),
        capacity_bps,
    })
}
