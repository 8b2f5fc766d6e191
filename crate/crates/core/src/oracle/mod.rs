//! Independent solution paths: a per-mode RK4 integrator and a periodic-grid
//! evolution with exact per-mode multipliers.

mod grid;
mod io;
mod mode_ode;

pub use grid::{
    discrete_energy, grid_evolve, grid_evolve_state, grid_profile, wraparound_guard, GridField,
    GridSpec, GuardVerdict,
};
pub use io::{read_grid, read_sidecar, sidecar_path, write_grid, GridSidecar};
pub use mode_ode::{max_stable_step, mode_ode_evolve, ModeState};
