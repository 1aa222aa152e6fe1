//! Ground-truth table-top scenes.
//!
//! Coordinates are robot-centric: x to the right, y away from the robot,
//! z up, all in meters. An object's `position` is the center of its
//! axis-aligned bounding box and `extent` is (width, depth, height).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::lexicon::normalize_category;

/// Absolute size thresholds in cubic centimeters.
pub const SMALL_MAX_CM3: f64 = 250.0;
pub const MEDIUM_MAX_CM3: f64 = 1500.0;

/// Maximum footprint overlap between two objects at the same level,
/// as a fraction of the smaller footprint.
pub const MAX_FOOTPRINT_OVERLAP: f64 = 0.25;

const GEOMETRY_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("invariant violated at {location}: {message}")]
    Invariant { location: String, message: String },
}

impl SceneError {
    pub fn location(&self) -> &str {
        match self {
            SceneError::Schema { location, .. } | SceneError::Invariant { location, .. } => {
                location
            }
        }
    }

    fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        SceneError::Schema {
            location: location.into(),
            message: message.into(),
        }
    }

    fn invariant(location: impl Into<String>, message: impl Into<String>) -> Self {
        SceneError::Invariant {
            location: location.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorName {
    Black,
    Blue,
    Green,
    Orange,
    Pink,
    Purple,
    Red,
    White,
    Yellow,
}

impl ColorName {
    pub const ALL: [ColorName; 9] = [
        ColorName::Black,
        ColorName::Blue,
        ColorName::Green,
        ColorName::Orange,
        ColorName::Pink,
        ColorName::Purple,
        ColorName::Red,
        ColorName::White,
        ColorName::Yellow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ColorName::Black => "black",
            ColorName::Blue => "blue",
            ColorName::Green => "green",
            ColorName::Orange => "orange",
            ColorName::Pink => "pink",
            ColorName::Purple => "purple",
            ColorName::Red => "red",
            ColorName::White => "white",
            ColorName::Yellow => "yellow",
        }
    }
}

impl fmt::Display for ColorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown color {0:?}")]
pub struct UnknownColor(pub String);

impl FromStr for ColorName {
    type Err = UnknownColor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ColorName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownColor(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Medium,
    Big,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Small, SizeClass::Medium, SizeClass::Big];

    pub fn as_str(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Big => "big",
        }
    }

    pub fn from_word(word: &str) -> Option<SizeClass> {
        SizeClass::ALL.into_iter().find(|s| s.as_str() == word)
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Axis-aligned rectangle in the table plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn centered(center: [f64; 2], size: [f64; 2]) -> Self {
        Rect {
            min: [center[0] - size[0] / 2.0, center[1] - size[1] / 2.0],
            max: [center[0] + size[0] / 2.0, center[1] + size[1] / 2.0],
        }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn depth(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.depth()
    }

    pub fn center(&self) -> [f64; 2] {
        [
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
        ]
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.depth())
    }

    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let w = self.max[0].min(other.max[0]) - self.min[0].max(other.min[0]);
        let d = self.max[1].min(other.max[1]) - self.min[1].max(other.min[1]);
        if w <= 0.0 || d <= 0.0 {
            0.0
        } else {
            w * d
        }
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.min[0] >= self.min[0] - GEOMETRY_EPS
            && other.min[1] >= self.min[1] - GEOMETRY_EPS
            && other.max[0] <= self.max[0] + GEOMETRY_EPS
            && other.max[1] <= self.max[1] + GEOMETRY_EPS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub category: String,
    pub color: ColorName,
    pub position: [f64; 3],
    pub extent: [f64; 3],
    pub base_detectability: f64,
}

impl SceneObject {
    pub fn footprint(&self) -> Rect {
        footprint(self.position, self.extent)
    }

    pub fn volume(&self) -> f64 {
        self.extent[0] * self.extent[1] * self.extent[2]
    }

    pub fn bottom(&self) -> f64 {
        self.position[2] - self.extent[2] / 2.0
    }

    pub fn top(&self) -> f64 {
        self.position[2] + self.extent[2] / 2.0
    }
}

pub(crate) fn footprint(position: [f64; 3], extent: [f64; 3]) -> Rect {
    Rect::centered([position[0], position[1]], [extent[0], extent[1]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub id: String,
    pub table_bounds: Rect,
    pub objects: Vec<SceneObject>,
}

impl Scene {
    /// Builds a scene after checking every invariant.
    pub fn new(
        id: impl Into<String>,
        table_bounds: Rect,
        objects: Vec<SceneObject>,
    ) -> Result<Self, SceneError> {
        let scene = Scene {
            id: id.into(),
            table_bounds,
            objects,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let b = &self.table_bounds;
        if !(b.min.iter().chain(&b.max).all(|v| v.is_finite())) {
            return Err(SceneError::invariant(
                "table_bounds",
                "bounds must be finite",
            ));
        }
        if b.min[0] >= b.max[0] || b.min[1] >= b.max[1] {
            return Err(SceneError::invariant(
                "table_bounds",
                "min must be strictly below max on both axes",
            ));
        }

        let mut seen = HashSet::new();
        for obj in &self.objects {
            let at = |field: &str| format!("{}.{}", obj.id, field);
            if obj.id.is_empty() {
                return Err(SceneError::invariant("objects[].id", "id must be nonempty"));
            }
            if !seen.insert(obj.id.as_str()) {
                return Err(SceneError::invariant(at("id"), "duplicate id"));
            }
            if obj.category.trim().is_empty() {
                return Err(SceneError::invariant(
                    at("category"),
                    "category must be nonempty",
                ));
            }
            if !obj.position.iter().all(|v| v.is_finite()) {
                return Err(SceneError::invariant(
                    at("position"),
                    "position must be finite",
                ));
            }
            if !obj.extent.iter().all(|v| v.is_finite() && *v > 0.0) {
                return Err(SceneError::invariant(
                    at("extent"),
                    "extent components must be strictly positive",
                ));
            }
            if !(0.0..=1.0).contains(&obj.base_detectability) {
                return Err(SceneError::invariant(
                    at("base_detectability"),
                    "base_detectability must lie in [0, 1]",
                ));
            }
            if !b.contains(&obj.footprint()) {
                return Err(SceneError::invariant(
                    at("position"),
                    "footprint lies outside table_bounds",
                ));
            }
        }

        // Stacked objects legitimately share a footprint; only objects whose
        // vertical spans overlap are checked.
        for (i, a) in self.objects.iter().enumerate() {
            for b in &self.objects[i + 1..] {
                let same_level =
                    a.bottom() < b.top() - GEOMETRY_EPS && b.bottom() < a.top() - GEOMETRY_EPS;
                if !same_level {
                    continue;
                }
                let (fa, fb) = (a.footprint(), b.footprint());
                let overlap = fa.intersection_area(&fb);
                if overlap > MAX_FOOTPRINT_OVERLAP * fa.area().min(fb.area()) + GEOMETRY_EPS {
                    return Err(SceneError::invariant(
                        format!("{}.position", b.id),
                        format!("footprint overlaps {} by more than 25%", a.id),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a scene document.
pub fn load_scene(source: &[u8]) -> Result<Scene, SceneError> {
    let value: Value = serde_json::from_slice(source)
        .map_err(|e| SceneError::schema("<document>", format!("malformed JSON: {e}")))?;
    let root = value
        .as_object()
        .ok_or_else(|| SceneError::schema("<document>", "expected a JSON object"))?;

    let id = string_field(root, "id", "id")?;
    let bounds = root
        .get("table_bounds")
        .ok_or_else(|| SceneError::schema("table_bounds", "missing field"))?
        .as_object()
        .ok_or_else(|| SceneError::schema("table_bounds", "expected an object"))?;
    let table_bounds = Rect {
        min: number_array::<2>(bounds, "min", "table_bounds.min")?,
        max: number_array::<2>(bounds, "max", "table_bounds.max")?,
    };

    let raw_objects = root
        .get("objects")
        .ok_or_else(|| SceneError::schema("objects", "missing field"))?
        .as_array()
        .ok_or_else(|| SceneError::schema("objects", "expected an array"))?;

    let mut objects = Vec::with_capacity(raw_objects.len());
    for (index, raw) in raw_objects.iter().enumerate() {
        let map = raw
            .as_object()
            .ok_or_else(|| SceneError::schema(format!("objects[{index}]"), "expected an object"))?;
        let obj_id = string_field(map, "id", &format!("objects[{index}].id"))?;
        let at = |field: &str| format!("{obj_id}.{field}");

        let color_text = string_field(map, "color", &at("color"))?;
        let color = color_text
            .parse::<ColorName>()
            .map_err(|e| SceneError::invariant(at("color"), e.to_string()))?;

        objects.push(SceneObject {
            category: string_field(map, "category", &at("category"))?
                .trim()
                .to_lowercase(),
            color,
            position: number_array::<3>(map, "position", &at("position"))?,
            extent: number_array::<3>(map, "extent", &at("extent"))?,
            base_detectability: number_field(map, "base_detectability", &at("base_detectability"))?,
            id: obj_id,
        });
    }

    Scene::new(id, table_bounds, objects)
}

fn string_field(map: &Map<String, Value>, key: &str, location: &str) -> Result<String, SceneError> {
    match map.get(key) {
        None => Err(SceneError::schema(location, "missing field")),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(SceneError::schema(location, "expected a string")),
    }
}

fn number_field(map: &Map<String, Value>, key: &str, location: &str) -> Result<f64, SceneError> {
    match map.get(key) {
        None => Err(SceneError::schema(location, "missing field")),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| SceneError::schema(location, "expected a number")),
    }
}

fn number_array<const N: usize>(
    map: &Map<String, Value>,
    key: &str,
    location: &str,
) -> Result<[f64; N], SceneError> {
    let items = map
        .get(key)
        .ok_or_else(|| SceneError::schema(location, "missing field"))?
        .as_array()
        .ok_or_else(|| SceneError::schema(location, format!("expected an array of {N} numbers")))?;
    if items.len() != N {
        return Err(SceneError::schema(
            location,
            format!("expected {N} numbers, found {}", items.len()),
        ));
    }
    let mut out = [0.0; N];
    for (slot, item) in out.iter_mut().zip(items) {
        *slot = item
            .as_f64()
            .ok_or_else(|| SceneError::schema(location, "expected a number"))?;
    }
    Ok(out)
}

/// Classifies `obj` as small, medium or big.
///
/// With at least three category-mates (the object included) the class is the
/// tercile of the object's volume rank among them; otherwise the absolute
/// thresholds apply.
pub fn size_class(obj: &SceneObject, scene: &Scene) -> SizeClass {
    let category = normalize_category(&obj.category);
    let mates: Vec<f64> = scene
        .objects
        .iter()
        .filter(|o| normalize_category(&o.category) == category)
        .map(SceneObject::volume)
        .collect();
    classify_volume(obj.volume(), &mates)
}

/// `mates` holds the volumes of every category-mate, including the object.
pub fn classify_volume(volume: f64, mates: &[f64]) -> SizeClass {
    let n = mates.len();
    if n >= 3 {
        let rank = mates.iter().filter(|&&v| v < volume).count();
        if 3 * rank < n {
            SizeClass::Small
        } else if 3 * rank < 2 * n {
            SizeClass::Medium
        } else {
            SizeClass::Big
        }
    } else {
        let cm3 = volume * 1e6;
        if cm3 < SMALL_MAX_CM3 {
            SizeClass::Small
        } else if cm3 <= MEDIUM_MAX_CM3 {
            SizeClass::Medium
        } else {
            SizeClass::Big
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cup_json(color: &str) -> String {
        format!(
            r#"{{"id":"s","table_bounds":{{"min":[-0.5,0.0],"max":[0.5,1.0]}},"objects":[
            {{"id":"cup1","category":"cup","color":"{color}","position":[0.1,0.5,0.05],
              "extent":[0.08,0.08,0.10],"base_detectability":0.9}}]}}"#
        )
    }

    fn obj(id: &str, category: &str, x: f64, extent: [f64; 3]) -> SceneObject {
        SceneObject {
            id: id.into(),
            category: category.into(),
            color: ColorName::Red,
            position: [x, 0.5, extent[2] / 2.0],
            extent,
            base_detectability: 0.9,
        }
    }

    fn bounds() -> Rect {
        Rect {
            min: [-1.0, 0.0],
            max: [1.0, 1.0],
        }
    }

    #[test]
    fn minimal_scene_loads() {
        let scene = load_scene(cup_json("red").as_bytes()).unwrap();
        assert_eq!(scene.objects.len(), 1);
        assert_eq!(scene.objects[0].color, ColorName::Red);
    }

    #[test]
    fn unknown_color_names_object_and_field() {
        let err = load_scene(cup_json("cyan").as_bytes()).unwrap_err();
        assert!(matches!(err, SceneError::Invariant { .. }));
        assert_eq!(err.location(), "cup1.color");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Scene::new(
            "s",
            bounds(),
            vec![
                obj("cup1", "cup", -0.3, [0.08, 0.08, 0.1]),
                obj("cup1", "cup", 0.3, [0.08, 0.08, 0.1]),
            ],
        )
        .unwrap_err();
        assert_eq!(err.location(), "cup1.id");
        assert!(err.to_string().contains("duplicate id"));
    }

    #[test]
    fn missing_field_is_schema_error() {
        let text = cup_json("red").replace(r#""category":"cup","#, "");
        let err = load_scene(text.as_bytes()).unwrap_err();
        assert!(matches!(err, SceneError::Schema { .. }));
        assert_eq!(err.location(), "cup1.category");
    }

    #[test]
    fn malformed_json_is_schema_error() {
        assert!(matches!(
            load_scene(b"{\"id\": "),
            Err(SceneError::Schema { .. })
        ));
    }

    #[test]
    fn off_table_object_rejected() {
        let err = Scene::new(
            "s",
            bounds(),
            vec![obj("cup1", "cup", 0.99, [0.08, 0.08, 0.1])],
        )
        .unwrap_err();
        assert_eq!(err.location(), "cup1.position");
    }

    #[test]
    fn overlapping_footprints_rejected_but_stacking_allowed() {
        let overlapping = vec![
            obj("a", "book", 0.0, [0.2, 0.2, 0.05]),
            obj("b", "book", 0.05, [0.2, 0.2, 0.05]),
        ];
        assert!(Scene::new("s", bounds(), overlapping).is_err());

        let plate = obj("plate", "plate", 0.0, [0.25, 0.25, 0.02]);
        let mut cup = obj("cup", "cup", 0.0, [0.08, 0.08, 0.1]);
        cup.position[2] = 0.02 + 0.05;
        assert!(Scene::new("s", bounds(), vec![plate, cup]).is_ok());
    }

    #[test]
    fn bad_detectability_and_extent_rejected() {
        let mut o = obj("cup1", "cup", 0.0, [0.08, 0.08, 0.1]);
        o.base_detectability = 1.5;
        let err = Scene::new("s", bounds(), vec![o]).unwrap_err();
        assert_eq!(err.location(), "cup1.base_detectability");

        let o = obj("cup1", "cup", 0.0, [0.08, 0.0, 0.1]);
        let err = Scene::new("s", bounds(), vec![o]).unwrap_err();
        assert_eq!(err.location(), "cup1.extent");
    }

    #[test]
    fn color_parses_only_lowercase_names() {
        for c in ColorName::ALL {
            assert_eq!(c.as_str().parse::<ColorName>().unwrap(), c);
            assert!(c.as_str().to_uppercase().parse::<ColorName>().is_err());
        }
        assert!("cyan".parse::<ColorName>().is_err());
        assert!("".parse::<ColorName>().is_err());
    }

    #[test]
    fn single_cup_uses_absolute_thresholds() {
        // 0.08 * 0.08 * 0.10 m^3 = 640 cm^3, between 250 and 1500.
        let scene = load_scene(cup_json("red").as_bytes()).unwrap();
        assert_eq!(size_class(&scene.objects[0], &scene), SizeClass::Medium);
    }

    #[test]
    fn three_cups_use_terciles() {
        // 100, 300 and 900 cm^3.
        let objects = vec![
            obj("c1", "cup", -0.5, [0.05, 0.05, 0.04]),
            obj("c2", "mug", 0.0, [0.05, 0.05, 0.12]),
            obj("c3", "cup", 0.5, [0.1, 0.1, 0.09]),
        ];
        let scene = Scene::new("s", bounds(), objects).unwrap();
        let classes: Vec<_> = scene
            .objects
            .iter()
            .map(|o| size_class(o, &scene))
            .collect();
        assert_eq!(
            classes,
            [SizeClass::Small, SizeClass::Medium, SizeClass::Big]
        );
    }

    #[test]
    fn identical_cups_share_a_class() {
        let objects = vec![
            obj("c1", "cup", -0.3, [0.08, 0.08, 0.1]),
            obj("c2", "cup", 0.3, [0.08, 0.08, 0.1]),
        ];
        let scene = Scene::new("s", bounds(), objects).unwrap();
        assert_eq!(
            size_class(&scene.objects[0], &scene),
            size_class(&scene.objects[1], &scene)
        );
    }

    #[test]
    fn absolute_threshold_edges() {
        assert_eq!(classify_volume(249e-6, &[]), SizeClass::Small);
        assert_eq!(classify_volume(1499e-6, &[]), SizeClass::Medium);
        assert_eq!(classify_volume(1501e-6, &[]), SizeClass::Big);
    }
}
