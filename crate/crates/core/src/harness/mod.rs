//! Experiment sweep and worked-example checks.

mod fixtures_suite;
pub mod sweep;

pub use fixtures_suite::{
    run_fixtures, veil_optimum, veil_oracle, Check, FixtureReport, BUTLER_DRINK, BUTLER_EU, FIXTURE_NAMES,
    VEIL_ASYMMETRIC_EU, VEIL_OPTIMUM_EU,
};
pub use sweep::{run_sweep, write_outputs, CellResult, GameRecord, SweepConfig, SweepReport};
