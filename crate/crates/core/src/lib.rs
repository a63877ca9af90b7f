//! Deterministic simulator for space-to-ground free-space optical networks.
//!
//! Given satellite orbital elements, an optical-ground-station catalog, and
//! cloud/turbulence time series, the library computes visibility passes,
//! per-pass optical link budgets and achievable data rates, aggregate
//! throughput with onboard-buffer accounting, and network availability
//! across ground-station network configurations.
//!
//! All operations are pure: identical inputs give bit-identical outputs,
//! and every value type is immutable after construction.

pub mod analysis;
pub mod linkbudget;
pub mod orbit;
pub mod passes;
pub mod rng;
pub mod scenario;
pub mod time;
pub mod weather;

pub use orbit::{GeodeticSite, Propagator, TopocentricState, TwoLineElements};
pub use passes::{find_passes, pass_statistics, Pass};
pub use time::{TimeWindow, UtcTime, YearMonth};
pub use weather::{GridSeries, TurbulenceMap, WeatherSeries};
