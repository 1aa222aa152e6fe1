use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::perception::{Percept, Viewpoint};
use crate::scene::Rect;

/// Exponent applied to the clipped cosine of directional relations.
pub const DIRECTION_EXPONENT: i32 = 2;
/// Horizontal displacement below which direction is undefined (meters).
pub const DEGENERATE_DISPLACEMENT_M: f64 = 1e-3;
/// `near` is fully true up to this fraction of the table diagonal...
pub const NEAR_FULL: f64 = 0.1;
/// ...and fully false from this fraction on.
pub const NEAR_ZERO: f64 = 0.3;
pub const ON_MIN_OVERLAP: f64 = 0.5;
pub const ON_MAX_GAP_M: f64 = 0.01;

const GAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationName {
    LeftOf,
    RightOf,
    InFrontOf,
    Behind,
    Near,
    On,
    NextTo,
}

impl RelationName {
    pub const ALL: [RelationName; 7] = [
        RelationName::LeftOf,
        RelationName::RightOf,
        RelationName::InFrontOf,
        RelationName::Behind,
        RelationName::Near,
        RelationName::On,
        RelationName::NextTo,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationName::LeftOf => "left_of",
            RelationName::RightOf => "right_of",
            RelationName::InFrontOf => "in_front_of",
            RelationName::Behind => "behind",
            RelationName::Near => "near",
            RelationName::On => "on",
            RelationName::NextTo => "next_to",
        }
    }

    /// Canonical English phrase, e.g. "left of".
    pub fn phrase(self) -> &'static str {
        match self {
            RelationName::LeftOf => "left of",
            RelationName::RightOf => "right of",
            RelationName::InFrontOf => "in front of",
            RelationName::Behind => "behind",
            RelationName::Near => "near",
            RelationName::On => "on",
            RelationName::NextTo => "next to",
        }
    }

    pub fn is_directional(self) -> bool {
        matches!(
            self,
            RelationName::LeftOf
                | RelationName::RightOf
                | RelationName::InFrontOf
                | RelationName::Behind
        )
    }
}

impl fmt::Display for RelationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationName::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown relation {s:?}"))
    }
}

/// A membership degree plus a flag for undefined directional geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub degree: f64,
    pub degenerate: bool,
}

impl Membership {
    fn of(degree: f64) -> Self {
        Membership {
            degree,
            degenerate: false,
        }
    }
}

/// Degree to which `a` stands in relation `r` to `b`, seen from `vp`.
///
/// `bounds` is the table rectangle; its diagonal normalizes distances for
/// `near`.
pub fn relation_membership(
    a: &Percept,
    b: &Percept,
    r: RelationName,
    vp: &Viewpoint,
    bounds: &Rect,
) -> Membership {
    let (right, forward) = vp.axes();
    match r {
        RelationName::LeftOf => directional(a, b, [-right[0], -right[1]]),
        RelationName::RightOf => directional(a, b, right),
        RelationName::Behind => directional(a, b, forward),
        RelationName::InFrontOf => directional(a, b, [-forward[0], -forward[1]]),
        RelationName::Near => Membership::of(near(a, b, bounds.diagonal())),
        RelationName::On => Membership::of(on(a, b)),
        RelationName::NextTo => Membership::of(near(a, b, bounds.diagonal()).min(1.0 - on(a, b))),
    }
}

fn directional(a: &Percept, b: &Percept, axis: [f64; 2]) -> Membership {
    let d = [a.position[0] - b.position[0], a.position[1] - b.position[1]];
    let len = d[0].hypot(d[1]);
    if len < DEGENERATE_DISPLACEMENT_M {
        return Membership {
            degree: 0.0,
            degenerate: true,
        };
    }
    let cos = ((d[0] * axis[0] + d[1] * axis[1]) / len).clamp(0.0, 1.0);
    Membership::of(cos.powi(DIRECTION_EXPONENT))
}

fn near(a: &Percept, b: &Percept, diagonal: f64) -> f64 {
    let d = (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]);
    let t = d / diagonal;
    if t <= NEAR_FULL {
        1.0
    } else if t >= NEAR_ZERO {
        0.0
    } else {
        (NEAR_ZERO - t) / (NEAR_ZERO - NEAR_FULL)
    }
}

/// `a` rests on top of `b`: `a` is higher, its bottom touches `b`'s top, and
/// at least half of `a`'s footprint lies over `b`.
fn on(a: &Percept, b: &Percept) -> f64 {
    if a.position[2] <= b.position[2] {
        return 0.0;
    }
    if (a.bottom() - b.top()).abs() > ON_MAX_GAP_M + GAP_EPS {
        return 0.0;
    }
    let fa = a.footprint();
    let overlap = (fa.intersection_area(&b.footprint()) / fa.area()).clamp(0.0, 1.0);
    if overlap >= ON_MIN_OVERLAP {
        overlap
    } else {
        0.0
    }
}
