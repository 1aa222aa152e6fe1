//! Structured referring expressions and their canonical surface form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fuzzy::{RelationName, ShapeName};
use crate::scene::{ColorName, SizeClass};

/// Longest chain of nested relation clauses a referring expression may carry.
pub const MAX_RELATION_DEPTH: usize = 2;

/// At most one constraint per attribute dimension.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<ColorName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrConstraint {
    Color(ColorName),
    Size(SizeClass),
    Shape(ShapeName),
}

impl AttrConstraint {
    pub fn word(self) -> &'static str {
        match self {
            AttrConstraint::Color(c) => c.as_str(),
            AttrConstraint::Size(s) => s.as_str(),
            AttrConstraint::Shape(s) => s.as_str(),
        }
    }
}

impl Attributes {
    pub fn is_empty(&self) -> bool {
        self.color.is_none() && self.size.is_none() && self.shape.is_none()
    }

    /// Constraints in canonical order: color, size, shape.
    pub fn iter(&self) -> impl Iterator<Item = AttrConstraint> {
        [
            self.color.map(AttrConstraint::Color),
            self.size.map(AttrConstraint::Size),
            self.shape.map(AttrConstraint::Shape),
        ]
        .into_iter()
        .flatten()
    }

    /// Adds `c`, failing if its dimension already holds a different value.
    pub fn insert(&mut self, c: AttrConstraint) -> Result<(), AttrConstraint> {
        fn put<T: PartialEq + Copy>(
            slot: &mut Option<T>,
            v: T,
            c: AttrConstraint,
        ) -> Result<(), AttrConstraint> {
            match slot {
                Some(existing) if *existing != v => Err(c),
                _ => {
                    *slot = Some(v);
                    Ok(())
                }
            }
        }
        match c {
            AttrConstraint::Color(v) => put(&mut self.color, v, c),
            AttrConstraint::Size(v) => put(&mut self.size, v, c),
            AttrConstraint::Shape(v) => put(&mut self.shape, v, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationConstraint {
    pub relation: RelationName,
    pub landmark: RefExp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefExp {
    pub target_category: String,
    #[serde(default, skip_serializing_if = "Attributes::is_empty")]
    pub attributes: Attributes,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationConstraint>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub raw_text: String,
}

impl RefExp {
    pub fn new(target_category: impl Into<String>) -> Self {
        RefExp {
            target_category: target_category.into(),
            attributes: Attributes::default(),
            relations: Vec::new(),
            raw_text: String::new(),
        }
    }

    pub fn with_color(mut self, color: ColorName) -> Self {
        self.attributes.color = Some(color);
        self
    }

    pub fn with_size(mut self, size: SizeClass) -> Self {
        self.attributes.size = Some(size);
        self
    }

    pub fn with_shape(mut self, shape: ShapeName) -> Self {
        self.attributes.shape = Some(shape);
        self
    }

    pub fn with_relation(mut self, relation: RelationName, landmark: RefExp) -> Self {
        self.relations
            .push(RelationConstraint { relation, landmark });
        self
    }

    /// Length of the longest chain of nested relations.
    pub fn depth(&self) -> usize {
        self.relations
            .iter()
            .map(|r| 1 + r.landmark.depth())
            .max()
            .unwrap_or(0)
    }

    /// Equality that ignores `raw_text` at every level.
    pub fn same_structure(&self, other: &RefExp) -> bool {
        self.target_category == other.target_category
            && self.attributes == other.attributes
            && self.relations.len() == other.relations.len()
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|(a, b)| a.relation == b.relation && a.landmark.same_structure(&b.landmark))
    }
}

impl fmt::Display for RefExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Canonical surface form: "the", attributes in color/size/shape order, the
/// noun, then the first relation as a clause. A second top-level relation is
/// rendered in declarative form ("... is near the book").
///
/// `parse(render(r))` reproduces `r` for every expression the parser can
/// produce: at most two top-level relations and one per landmark.
pub fn render(r: &RefExp) -> String {
    let mut out = render_np(r);
    for extra in r.relations.iter().skip(1) {
        out.push_str(" is ");
        out.push_str(extra.relation.phrase());
        out.push(' ');
        out.push_str(&render_np(&extra.landmark));
    }
    out
}

/// Renders `r` as a noun phrase carrying only its first relation.
pub fn render_np(r: &RefExp) -> String {
    let mut out = String::from("the");
    for attr in r.attributes.iter() {
        out.push(' ');
        out.push_str(attr.word());
    }
    out.push(' ');
    out.push_str(&r.target_category);
    if let Some(rel) = r.relations.first() {
        out.push(' ');
        out.push_str(rel.relation.phrase());
        out.push(' ');
        out.push_str(&render_np(&rel.landmark));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_bare_noun() {
        assert_eq!(render(&RefExp::new("cup")), "the cup");
    }

    #[test]
    fn renders_color() {
        assert_eq!(
            render(&RefExp::new("cup").with_color(ColorName::Red)),
            "the red cup"
        );
    }

    #[test]
    fn renders_relation_clause() {
        let r = RefExp::new("cup").with_relation(RelationName::LeftOf, RefExp::new("banana"));
        assert_eq!(render(&r), "the cup left of the banana");
    }

    #[test]
    fn renders_attributes_in_canonical_order() {
        let r = RefExp::new("cup")
            .with_shape(ShapeName::Round)
            .with_size(SizeClass::Big)
            .with_color(ColorName::Blue);
        assert_eq!(render(&r), "the blue big round cup");
    }

    #[test]
    fn renders_second_relation_declaratively() {
        let r = RefExp::new("cup")
            .with_relation(RelationName::LeftOf, RefExp::new("banana"))
            .with_relation(RelationName::Near, RefExp::new("book"));
        assert_eq!(render(&r), "the cup left of the banana is near the book");
        assert_eq!(r.depth(), 1);
    }

    #[test]
    fn insert_rejects_second_value_in_a_dimension() {
        let mut a = Attributes::default();
        a.insert(AttrConstraint::Color(ColorName::Red)).unwrap();
        a.insert(AttrConstraint::Color(ColorName::Red)).unwrap();
        assert!(a.insert(AttrConstraint::Color(ColorName::Blue)).is_err());
        a.insert(AttrConstraint::Size(SizeClass::Small)).unwrap();
        assert_eq!(a.iter().count(), 2);
    }
}
