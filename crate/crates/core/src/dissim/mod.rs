//! Dissimilarity matrices and the construction of the player dissimilarity.

pub mod group;
pub mod matrix;
pub mod position;

pub use group::{
    aggregate_final, final_dissimilarity, group_dissimilarities, league_team_dissim, quantitative_l1, DissimConfig,
    GroupDissimilarity, GroupWeights, L1Layout, QuantRow,
};
pub use matrix::{condensed_index, condensed_len, DissimilarityMatrix};
pub use position::{geco_position, parse_position_set, position_distance, squared_position_distance, Position};
