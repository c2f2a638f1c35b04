//! Pitch positions and the geco dissimilarity between position sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Position {
    DC,
    DL,
    DR,
    DMC,
    MC,
    ML,
    MR,
    AMC,
    AML,
    AMR,
    FW,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lateral {
    Centre,
    Left,
    Right,
}

impl Position {
    pub const ALL: [Position; 11] = [
        Position::DC,
        Position::DL,
        Position::DR,
        Position::DMC,
        Position::MC,
        Position::ML,
        Position::MR,
        Position::AMC,
        Position::AML,
        Position::AMR,
        Position::FW,
    ];

    /// Defence-to-attack line: 0 defence .. 4 forward.
    fn line(self) -> i32 {
        use Position::*;
        match self {
            DC | DL | DR => 0,
            DMC => 1,
            MC | ML | MR => 2,
            AMC | AML | AMR => 3,
            FW => 4,
        }
    }

    fn lateral(self) -> Lateral {
        use Position::*;
        match self {
            DL | ML | AML => Lateral::Left,
            DR | MR | AMR => Lateral::Right,
            DC | DMC | MC | AMC | FW => Lateral::Centre,
        }
    }

    pub fn code(self) -> &'static str {
        use Position::*;
        match self {
            DC => "DC",
            DL => "DL",
            DR => "DR",
            DMC => "DMC",
            MC => "MC",
            ML => "ML",
            MR => "MR",
            AMC => "AMC",
            AML => "AML",
            AMR => "AMR",
            FW => "FW",
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Position::ALL
            .iter()
            .copied()
            .find(|p| p.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown position code `{s}`")))
    }
}

/// Squared pitch distance; an integer, so the table can be checked exactly.
pub fn squared_position_distance(a: Position, b: Position) -> u32 {
    let dx = (a.line() - b.line()).unsigned_abs();
    let dlat = u32::from(a.lateral() != b.lateral());
    dx * dx + dlat
}

pub fn position_distance<T: Scalar>(a: Position, b: Position) -> T {
    T::lit(f64::from(squared_position_distance(a, b))).sqrt()
}

/// Parses a string of codes separated by `;`, `|`, `/` or whitespace.
pub fn parse_position_set(s: &str) -> Result<Vec<Position>> {
    let mut set: Vec<Position> = s
        .split(|c: char| c == ';' || c == '|' || c == '/' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    set.sort();
    set.dedup();
    if set.is_empty() {
        return Err(Error::invalid("empty position set"));
    }
    Ok(set)
}

/// Geco dissimilarity between two position sets: the symmetrised mean of
/// clipped nearest-position distances, `u(d) = min(d / cutoff, 1)`.
pub fn geco_position<T: Scalar>(a: &[Position], b: &[Position], cutoff: T) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("geco needs nonempty position sets"));
    }
    if !(cutoff > T::zero()) {
        return Err(Error::invalid("geco cutoff must be positive"));
    }
    let clip = |d: T| (d / cutoff).min(T::one());
    let directed = |from: &[Position], to: &[Position]| -> T {
        let total: T = from
            .iter()
            .map(|&p| {
                let nearest = to
                    .iter()
                    .map(|&q| squared_position_distance(p, q))
                    .min()
                    .expect("nonempty");
                clip(T::lit(f64::from(nearest)).sqrt())
            })
            .sum();
        total / T::from_len(from.len())
    };
    Ok(T::lit(0.5) * (directed(a, b) + directed(b, a)))
}
