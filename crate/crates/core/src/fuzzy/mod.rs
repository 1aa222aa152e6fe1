//! Fuzzy inference for spatial relations and object shape.

mod relation;
mod shape;

pub use relation::{
    relation_membership, Membership, RelationName, DEGENERATE_DISPLACEMENT_M, DIRECTION_EXPONENT,
    NEAR_FULL, NEAR_ZERO, ON_MAX_GAP_M, ON_MIN_OVERLAP,
};
pub use shape::{shape_class, shape_of_extent, ShapeClass, ShapeName};
