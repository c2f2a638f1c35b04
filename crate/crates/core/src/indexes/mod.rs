//! Cluster validity indexes: the five aspect indexes that feed the composite
//! index, plus common stand-alone indexes for comparison.

pub mod aspect;
pub mod bootstab;
pub mod literature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aspect::{ave_within, entropy, pearson_gamma, separation_index, DEFAULT_SEPARATION_P};
pub use bootstab::{
    bootstab, classify, comembership_disagreement, draw_bootstrap, fit_seed, iteration_seed, BootstabConfig,
    Classifier, DEFAULT_BOOTSTAB_B,
};
pub use literature::{ari, asw, ch, cvnn, cvnn_components, dunn, CvnnComponents, NeighbourTable, DEFAULT_CVNN_KAPPA};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexId {
    AveWithin,
    #[serde(rename = "sep", alias = "separation")]
    Separation,
    PearsonGamma,
    Entropy,
    Bootstab,
    Asw,
    Ch,
    Dunn,
    Cvnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LargerBetter,
    SmallerBetter,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::LargerBetter => "larger_better",
            Orientation::SmallerBetter => "smaller_better",
        }
    }
}

impl IndexId {
    /// The five aspect indexes, in composite weight order.
    pub const ASPECTS: [IndexId; 5] =
        [IndexId::AveWithin, IndexId::Separation, IndexId::PearsonGamma, IndexId::Entropy, IndexId::Bootstab];
    pub const LITERATURE: [IndexId; 4] = [IndexId::Asw, IndexId::Ch, IndexId::Dunn, IndexId::Cvnn];

    pub fn orientation(self) -> Orientation {
        match self {
            IndexId::AveWithin | IndexId::Bootstab | IndexId::Cvnn => Orientation::SmallerBetter,
            _ => Orientation::LargerBetter,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexId::AveWithin => "ave_within",
            IndexId::Separation => "sep",
            IndexId::PearsonGamma => "pearson_gamma",
            IndexId::Entropy => "entropy",
            IndexId::Bootstab => "bootstab",
            IndexId::Asw => "asw",
            IndexId::Ch => "ch",
            IndexId::Dunn => "dunn",
            IndexId::Cvnn => "cvnn",
        }
    }
}

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexId::ASPECTS
            .iter()
            .chain(IndexId::LITERATURE.iter())
            .copied()
            .find(|i| i.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown index `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexValue<T> {
    pub index: IndexId,
    pub raw: T,
    pub orientation: Orientation,
}

impl<T> IndexValue<T> {
    pub fn new(index: IndexId, raw: T) -> Self {
        Self { index, raw, orientation: index.orientation() }
    }
}
