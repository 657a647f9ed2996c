//! Comparison schemes and fading diagnostics.

mod fading;
mod fd_mount;
mod ofdm;

pub use fading::{energy_per_carrier, is_non_fading, relative_db, spread_db};
pub use fd_mount::{fd_mount_genie, fd_mount_one_tap, fd_mount_transmit};
pub use ofdm::{
    apply_ltv, ofdm_demodulate, ofdm_frame_matrix, ofdm_modulate, ofdm_transceive, OfdmConfig, OfdmReceiver,
};
