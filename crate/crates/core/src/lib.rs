//! Strong-field dressed susceptibilities of a four-level Raman four-wave-mixing
//! scheme, design of a counter-propagating control field that removes the
//! two-photon Doppler shift, and the resulting conversion efficiency in an
//! optically thick medium.
//!
//! The modules build on each other:
//!
//! * [`scheme`]: levels, transitions, field roles and the sodium-dimer preset;
//! * [`response`]: per-velocity χ1, χ4 and χ̃4 ratios;
//! * [`doppler`]: Maxwell averaging, spectra and line metrics;
//! * [`designer`]: control-field design from the compensation condition;
//! * [`propagation`]: absorption, phase mismatch and conversion efficiency;
//! * [`cli`]: scenario files and the `dffwm` batch commands.

pub mod cli;
pub mod designer;
pub mod doppler;
pub mod error;
pub mod ode;
pub mod optimize;
pub mod propagation;
pub mod response;
pub mod scheme;

pub use error::{Error, Result};
pub use response::{Response, ResponseModel};
pub use scheme::{fig1b_fields, fig1c_fields, Direction, FieldParams, FieldSet, SchemeConfig};
