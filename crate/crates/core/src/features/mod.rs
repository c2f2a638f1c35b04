//! Player records to analysis-ready variables: representation,
//! transformation, standardisation.

pub mod represent;
pub mod standardize;
pub mod table;
pub mod transform;

pub use represent::{derive_composition, per90, success_rate};
pub use standardize::{standardize_mad_median, standardize_pooled, Standardized};
pub use table::{
    read_metadata, read_players, run_feature_pipeline, ColumnManifest, CompositionBlock, FeatureColumn, FeatureManifest, FeatureTable,
    PipelineConfig, PlayerRecord, StageFlags, TransformSpec, VariableGroupSpec, VariableKind,
};
pub use transform::{fit_shift_constant, log_shift, stability_slope, SeasonPair, ShiftChoice, DEFAULT_SHIFT_GRID};
