//! Experiment configuration, ladders and report emission.

mod config;
mod experiments;
mod report;

pub use config::{
    ConeConfig, ExperimentConfig, ExperimentKind, ExponentsConfig, GseConfig, ImsConfig,
    LadderConfig, LtConfig, MollifyConfig, PairConfig, PerturbationConfig, PotentialConfig,
};
pub use experiments::{run, run_experiment};
pub use report::{Cell, Check, CheckKind, Format, GseFit, Report, Summary, Table};
