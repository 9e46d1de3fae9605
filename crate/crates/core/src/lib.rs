//! Nuclear-spin feedback on a single quantum-dot electron spin under pulsed
//! optical control.
//!
//! * [`model`]: parameters, pumping and per-cycle trion count rates, pulse physics.
//! * [`fokker_planck`]: the Overhauser-shift density, its evolution and steady state.
//! * [`mean_field`]: first-moment dynamics, fixed points and hysteretic sweeps.
//! * [`experiments`]: named runs with CSV and JSON outputs.
//! * [`config`]: the TOML configuration format with explicit units.

pub mod model;
pub mod units;
pub mod fokker_planck;
pub mod mean_field;
pub mod experiments;
pub mod config;
