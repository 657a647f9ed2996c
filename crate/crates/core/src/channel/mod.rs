//! Doubly-spread channel synthesis and channel matrices.

mod effective;
mod operators;
mod paths;
mod pulse;
mod taps_io;

pub use effective::{
    default_window, effective_channel, effective_channel_in, periodize, EffectiveChannel, PeriodizedChannel,
    TapWindow, DEFAULT_FLOOR,
};
pub use operators::{
    apply_dd, apply_dd_adjoint, apply_td, build_h_basis, build_h_dd, build_h_fd, doppler_band_width,
    td_channel_operator, Basis, FdChannel,
};
pub use paths::{veh_a_paths, Path, PathSet, VEH_A_DELAYS_US, VEH_A_POWERS_DB};
pub use pulse::{raised_cosine, sinc, PulseShape};
pub use taps_io::{read_taps, write_taps};
