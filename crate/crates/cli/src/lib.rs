//! Configuration, output formats and subcommands of the `ptthermo` binary.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;

pub use commands::{
    cmd_closed_ergotropy, cmd_laws, cmd_open_ergotropy, cmd_sweep, cmd_third_law, parse_list,
    SweepRow,
};
pub use config::RunConfig;
pub use manifest::{Check, RunManifest};

/// Process exit status: all checks passed.
pub const EXIT_OK: i32 = 0;
/// Bad arguments, configuration or parameters.
pub const EXIT_USAGE: i32 = 1;
/// A physics check failed.
pub const EXIT_PHYSICS: i32 = 2;

/// Exit status for an error raised while running a command.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    use ptthermo::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::InvalidParams(_)
            | E::OutsideAnticommutatorClass { .. }
            | E::BrokenOrExceptional { .. }
            | E::ExceptionalPoint { .. }
            | E::InvalidBath(_)
            | E::InvalidTimes(_)
            | E::InvalidCoefficients(_),
        ) => EXIT_USAGE,
        Some(_) => EXIT_PHYSICS,
        None => EXIT_USAGE,
    }
}
