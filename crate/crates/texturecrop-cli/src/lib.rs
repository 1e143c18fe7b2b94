//! Command implementations behind the `texturecrop` binary.
//!
//! Each command is a plain function over typed arguments so integration
//! tests can drive the full pipeline without spawning processes.

pub mod commands;

pub use commands::{
    cmd_ablate, cmd_aggregate, cmd_crop, cmd_evaluate, cmd_run, cmd_score, AblateArgs,
    AblationPoint, AblationSummary, AggregateArgs, CmdSummary, CropArgs, EvaluateArgs, RunArgs,
    ScoreArgs, WorkConfig,
};
