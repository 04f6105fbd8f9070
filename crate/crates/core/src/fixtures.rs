//! Complexes shipped with the crate.

use crate::error::Result;
use crate::precubical::{parse_precubical, PrecubicalSet};

pub const MATCHBOX: &str = include_str!("../../../fixtures/matchbox");
pub const FIG1_LEFT: &str = include_str!("../../../fixtures/fig1-left");
pub const FIG1_RIGHT: &str = include_str!("../../../fixtures/fig1-right");
pub const UNIT_SQUARE: &str = include_str!("../../../fixtures/unit-square");
pub const GRID_2X2: &str = include_str!("../../../fixtures/grid-2x2");

pub const ALL: [(&str, &str); 5] = [
    ("matchbox", MATCHBOX),
    ("fig1-left", FIG1_LEFT),
    ("fig1-right", FIG1_RIGHT),
    ("unit-square", UNIT_SQUARE),
    ("grid-2x2", GRID_2X2),
];

pub fn source(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Option<Result<PrecubicalSet>> {
    source(name).map(parse_precubical)
}

pub fn matchbox() -> PrecubicalSet {
    parse_precubical(MATCHBOX).expect("matchbox fixture is valid")
}

pub fn fig1_left() -> PrecubicalSet {
    parse_precubical(FIG1_LEFT).expect("fixture is valid")
}

pub fn fig1_right() -> PrecubicalSet {
    parse_precubical(FIG1_RIGHT).expect("fixture is valid")
}
