//! The bundled fixture corpus.

use serde::{Deserialize, Serialize};

use crate::assembler::{cofiber_assembler, Assembler, AssemblerMorphism, AssemblerMorphismSpec, AssemblerSpec, SimplicialLevels};
use crate::error::Result;

pub const POINT: &str = include_str!("../fixtures/point.json");
pub const HALFSPLIT: &str = include_str!("../fixtures/halfsplit.json");
pub const HALFSPLIT_BAD_PULLBACK: &str = include_str!("../fixtures/halfsplit_bad_pullback.json");
pub const DOUBLE_COVER: &str = include_str!("../fixtures/double_cover.json");
pub const EMPTY_COVER: &str = include_str!("../fixtures/empty_cover.json");
pub const FREE3: &str = include_str!("../fixtures/free3.json");
pub const DISCRETE_AX: &str = include_str!("../fixtures/discrete_ax.json");
pub const COFIBER_DOUBLE_COVER: &str = include_str!("../fixtures/cofiber_double_cover.json");
pub const COFIBER_HALFSPLIT_POINT: &str = include_str!("../fixtures/cofiber_halfsplit_point.json");
pub const SWAP_EPS_DELTA: &str = include_str!("../fixtures/swap_eps_delta.json");
pub const SWAP_HALF: &str = include_str!("../fixtures/swap_half.json");
pub const IDENTITY_IET: &str = include_str!("../fixtures/identity.json");
pub const ROTATION_SQRT2: &str = include_str!("../fixtures/rotation_sqrt2.json");

/// Every bundled file by its stem.
pub const ALL: [(&str, &str); 13] = [
    ("point", POINT),
    ("halfsplit", HALFSPLIT),
    ("halfsplit_bad_pullback", HALFSPLIT_BAD_PULLBACK),
    ("double_cover", DOUBLE_COVER),
    ("empty_cover", EMPTY_COVER),
    ("free3", FREE3),
    ("discrete_ax", DISCRETE_AX),
    ("cofiber_double_cover", COFIBER_DOUBLE_COVER),
    ("cofiber_halfsplit_point", COFIBER_HALFSPLIT_POINT),
    ("swap_eps_delta", SWAP_EPS_DELTA),
    ("swap_half", SWAP_HALF),
    ("identity", IDENTITY_IET),
    ("rotation_sqrt2", ROTATION_SQRT2),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn load(text: &str) -> Assembler {
    Assembler::from_json(text).expect("bundled fixture parses")
}

pub fn point() -> Assembler {
    load(POINT)
}

pub fn halfsplit() -> Assembler {
    load(HALFSPLIT)
}

pub fn double_cover() -> Assembler {
    load(DOUBLE_COVER)
}

pub fn empty_cover() -> Assembler {
    load(EMPTY_COVER)
}

pub fn free3() -> Assembler {
    load(FREE3)
}

pub fn discrete_ax() -> Assembler {
    load(DISCRETE_AX)
}

/// Every valid bundled site, by name.
pub fn sites() -> Vec<(&'static str, Assembler)> {
    vec![
        ("point", point()),
        ("halfsplit", halfsplit()),
        ("double_cover", double_cover()),
        ("empty_cover", empty_cover()),
        ("free3", free3()),
        ("discrete_ax", discrete_ax()),
    ]
}

/// A morphism of assemblers `F: D → C` in file form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CofiberSpec {
    pub base: AssemblerSpec,
    pub sub: AssemblerSpec,
    pub map: AssemblerMorphismSpec,
}

impl CofiberSpec {
    pub fn build(&self) -> Result<SimplicialLevels> {
        let base = Assembler::from_spec(&self.base)?;
        let sub = Assembler::from_spec(&self.sub)?;
        let map = AssemblerMorphism::from_spec(&self.map, &sub, &base)?;
        cofiber_assembler(&base, &sub, &map)
    }
}

pub fn cofiber_from_json(text: &str) -> Result<SimplicialLevels> {
    let spec: CofiberSpec = serde_json::from_str(text)?;
    spec.build()
}

/// Levels of the cofiber of the inclusion `{A, X} → double_cover`.
pub fn cofiber_double_cover() -> SimplicialLevels {
    cofiber_from_json(COFIBER_DOUBLE_COVER).expect("bundled fixture builds")
}

pub fn cofiber_halfsplit_point() -> SimplicialLevels {
    cofiber_from_json(COFIBER_HALFSPLIT_POINT).expect("bundled fixture builds")
}
