//! Multitaper spectral estimation and band-power extraction.

pub mod bands;
pub mod dpss;
pub mod integrate;
pub mod psd;

pub use bands::{band_power_table, BandPowerRow, BandPowerTable, Bands, Segment};
pub use dpss::{compute_dpss, DpssSet};
pub use integrate::{band_power, simpson_uniform};
pub use psd::{default_taper_count, multitaper_psd, PowerSpectrum};
