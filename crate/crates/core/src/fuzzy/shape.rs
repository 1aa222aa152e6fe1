use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::perception::Percept;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Round,
    Elongated,
    Flat,
    Boxy,
}

impl ShapeName {
    /// Also the tie-breaking order for argmax.
    pub const ALL: [ShapeName; 4] = [
        ShapeName::Round,
        ShapeName::Elongated,
        ShapeName::Flat,
        ShapeName::Boxy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeName::Round => "round",
            ShapeName::Elongated => "elongated",
            ShapeName::Flat => "flat",
            ShapeName::Boxy => "boxy",
        }
    }

    pub fn from_word(word: &str) -> Option<ShapeName> {
        ShapeName::ALL.into_iter().find(|s| s.as_str() == word)
    }
}

impl fmt::Display for ShapeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShapeName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ShapeName::from_word(s).ok_or_else(|| format!("unknown shape {s:?}"))
    }
}

/// Fuzzy shape: a membership per class and the winning class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeClass {
    pub class: ShapeName,
    memberships: [f64; 4],
}

impl ShapeClass {
    pub fn membership(&self, shape: ShapeName) -> f64 {
        self.memberships[shape as usize]
    }

    pub fn memberships(&self) -> BTreeMap<ShapeName, f64> {
        ShapeName::ALL
            .into_iter()
            .map(|s| (s, self.membership(s)))
            .collect()
    }
}

pub fn shape_class(p: &Percept) -> ShapeClass {
    shape_of_extent(p.extent)
}

/// Rules over elongation `e = max/min` of the three dimensions and flatness
/// `f = height / max(width, depth)`:
/// round peaks at e = 1 and vanishes at e = 2, elongated ramps up over
/// e in [2, 4], flat ramps down over f in [0.1, 0.4], boxy takes the residual.
pub fn shape_of_extent(extent: [f64; 3]) -> ShapeClass {
    let [w, d, h] = extent;
    let longest = w.max(d).max(h);
    let shortest = w.min(d).min(h);
    let elongation = longest / shortest;
    let flatness = h / w.max(d);

    let round = (2.0 - elongation).clamp(0.0, 1.0);
    let elongated = ((elongation - 2.0) / 2.0).clamp(0.0, 1.0);
    let flat = ((0.4 - flatness) / 0.3).clamp(0.0, 1.0);
    let boxy = (1.0 - round.max(elongated).max(flat)).max(0.0);
    let memberships = [round, elongated, flat, boxy];

    let mut class = ShapeName::Round;
    for shape in ShapeName::ALL {
        if memberships[shape as usize] > memberships[class as usize] {
            class = shape;
        }
    }
    ShapeClass { class, memberships }
}
