//! Simulated object detector.
//!
//! Stands in for the robot's recognition pipeline: an object is reported iff
//! it is not occluded from the current viewpoint and its detectability clears
//! the confidence threshold for its category. Attributes are copied from
//! ground truth; the simulator only produces false negatives.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::normalize_category;
use crate::scene::{size_class, ColorName, Scene, SceneObject, SizeClass};

pub const DEFAULT_THRESHOLD: f64 = 0.7;
/// Threshold applied to a category after it has been lowered.
pub const LOWERED_THRESHOLD: f64 = 0.3;
pub const VIEWPOINT_STEP_DEG: f64 = 45.0;
pub const DEFAULT_OCCLUSION_TOLERANCE_DEG: f64 = 5.0;
pub const DEFAULT_CAMERA_DISTANCE_M: f64 = 1.0;
pub const DEFAULT_CAMERA_HEIGHT_M: f64 = 1.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerceptionError {
    #[error("invalid viewpoint: {0}")]
    Viewpoint(String),
    #[error("invalid detector config: {0}")]
    Config(String),
}

/// Camera placement around the table center.
///
/// At azimuth 0 the camera sits on the robot's side of the table looking
/// along +y; increasing azimuth moves it counter-clockwise seen from above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint {
    pub azimuth_deg: f64,
    pub distance_m: f64,
    pub height_m: f64,
}

impl Default for Viewpoint {
    fn default() -> Self {
        Viewpoint {
            azimuth_deg: 0.0,
            distance_m: DEFAULT_CAMERA_DISTANCE_M,
            height_m: DEFAULT_CAMERA_HEIGHT_M,
        }
    }
}

impl Viewpoint {
    pub fn new(azimuth_deg: f64, distance_m: f64, height_m: f64) -> Result<Self, PerceptionError> {
        if !azimuth_deg.is_finite() {
            return Err(PerceptionError::Viewpoint("azimuth must be finite".into()));
        }
        if !(distance_m.is_finite() && distance_m > 0.0) {
            return Err(PerceptionError::Viewpoint(
                "distance must be positive".into(),
            ));
        }
        if !(height_m.is_finite() && height_m > 0.0) {
            return Err(PerceptionError::Viewpoint("height must be positive".into()));
        }
        Ok(Viewpoint {
            azimuth_deg: normalize_azimuth(azimuth_deg),
            distance_m,
            height_m,
        })
    }

    /// Horizontal camera position for a table centered at `center`.
    pub fn camera_position(&self, center: [f64; 2]) -> [f64; 2] {
        let az = self.azimuth_deg.to_radians();
        [
            center[0] + self.distance_m * az.sin(),
            center[1] - self.distance_m * az.cos(),
        ]
    }

    /// Unit vectors (right, forward) of the viewer's frame in the table plane.
    pub fn axes(&self) -> ([f64; 2], [f64; 2]) {
        let az = self.azimuth_deg.to_radians();
        let (s, c) = az.sin_cos();
        ([c, s], [-s, c])
    }
}

fn normalize_azimuth(deg: f64) -> f64 {
    let wrapped = deg.rem_euclid(360.0);
    if wrapped >= 360.0 {
        0.0
    } else {
        wrapped
    }
}

/// Moves the camera one step counter-clockwise around the table.
pub fn next_viewpoint(vp: &Viewpoint) -> Viewpoint {
    Viewpoint {
        azimuth_deg: normalize_azimuth(vp.azimuth_deg + VIEWPOINT_STEP_DEG),
        ..*vp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub default_threshold: f64,
    /// Keyed by canonical category.
    #[serde(default)]
    pub per_category_threshold: BTreeMap<String, f64>,
    pub occlusion_tolerance_deg: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            default_threshold: DEFAULT_THRESHOLD,
            per_category_threshold: BTreeMap::new(),
            occlusion_tolerance_deg: DEFAULT_OCCLUSION_TOLERANCE_DEG,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), PerceptionError> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.default_threshold) {
            return Err(PerceptionError::Config(
                "default threshold outside [0, 1]".into(),
            ));
        }
        if let Some((cat, _)) = self.per_category_threshold.iter().find(|(_, v)| !unit(**v)) {
            return Err(PerceptionError::Config(format!(
                "threshold for {cat} outside [0, 1]"
            )));
        }
        if self.occlusion_tolerance_deg.is_nan() || self.occlusion_tolerance_deg < 0.0 {
            return Err(PerceptionError::Config(
                "occlusion tolerance must be >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn threshold(&self, category: &str) -> f64 {
        self.per_category_threshold
            .get(&normalize_category(category))
            .copied()
            .unwrap_or(self.default_threshold)
    }

    /// Returns a copy whose threshold for `category` is at most
    /// [`LOWERED_THRESHOLD`]. Thresholds already below the floor are kept.
    pub fn lower_threshold(&self, category: &str) -> DetectorConfig {
        let mut cfg = self.clone();
        let lowered = self.threshold(category).min(LOWERED_THRESHOLD);
        cfg.per_category_threshold
            .insert(normalize_category(category), lowered);
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percept {
    /// Link back to ground truth; never consulted by grounding.
    pub object_id: String,
    pub category: String,
    pub color: ColorName,
    pub position: [f64; 3],
    pub extent: [f64; 3],
    /// Size class relative to the scene's category-mates.
    pub size: SizeClass,
    pub confidence: f64,
}

impl Percept {
    pub fn footprint(&self) -> crate::scene::Rect {
        crate::scene::footprint(self.position, self.extent)
    }

    pub fn bottom(&self) -> f64 {
        self.position[2] - self.extent[2] / 2.0
    }

    pub fn top(&self) -> f64 {
        self.position[2] + self.extent[2] / 2.0
    }
}

/// False iff another object at least as tall stands nearer to the camera
/// within `tolerance_deg` of the horizontal line of sight to `obj`.
pub fn visibility(obj: &SceneObject, vp: &Viewpoint, scene: &Scene, tolerance_deg: f64) -> bool {
    let cam = vp.camera_position(scene.table_bounds.center());
    let to_obj = [obj.position[0] - cam[0], obj.position[1] - cam[1]];
    let obj_dist = to_obj[0].hypot(to_obj[1]);

    !scene.objects.iter().any(|blocker| {
        if blocker.id == obj.id || blocker.extent[2] < obj.extent[2] {
            return false;
        }
        let to_blocker = [blocker.position[0] - cam[0], blocker.position[1] - cam[1]];
        let blocker_dist = to_blocker[0].hypot(to_blocker[1]);
        if blocker_dist >= obj_dist {
            return false;
        }
        let cross = to_obj[0] * to_blocker[1] - to_obj[1] * to_blocker[0];
        let dot = to_obj[0] * to_blocker[0] + to_obj[1] * to_blocker[1];
        cross.abs().atan2(dot).to_degrees() <= tolerance_deg
    })
}

/// Runs the simulated detector. Output is sorted by object id.
pub fn detect(scene: &Scene, vp: &Viewpoint, cfg: &DetectorConfig) -> Vec<Percept> {
    let mut percepts: Vec<Percept> = scene
        .objects
        .iter()
        .filter(|obj| visibility(obj, vp, scene, cfg.occlusion_tolerance_deg))
        .filter_map(|obj| {
            // Visible objects keep their full detectability.
            let confidence = obj.base_detectability;
            (confidence >= cfg.threshold(&obj.category)).then(|| Percept {
                object_id: obj.id.clone(),
                category: obj.category.clone(),
                color: obj.color,
                position: obj.position,
                extent: obj.extent,
                size: size_class(obj, scene),
                confidence,
            })
        })
        .collect();
    percepts.sort_by(|a, b| a.object_id.cmp(&b.object_id));
    percepts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Rect;

    fn object(id: &str, x: f64, y: f64, height: f64, detectability: f64) -> SceneObject {
        SceneObject {
            id: id.into(),
            category: "cup".into(),
            color: ColorName::Red,
            position: [x, y, height / 2.0],
            extent: [0.06, 0.06, height],
            base_detectability: detectability,
        }
    }

    /// Table centered at (0, 0.6); camera at azimuth 0 sits at (0, -0.4).
    fn scene(objects: Vec<SceneObject>) -> Scene {
        Scene::new(
            "s",
            Rect {
                min: [-0.5, 0.2],
                max: [0.5, 1.0],
            },
            objects,
        )
        .unwrap()
    }

    fn occlusion_pair() -> Scene {
        scene(vec![
            object("blocker", 0.0, 0.5, 0.2, 0.9),
            object("target", 0.0, 0.7, 0.1, 0.9),
        ])
    }

    #[test]
    fn collinear_taller_nearer_blocker_occludes() {
        let s = occlusion_pair();
        let vp = Viewpoint::default();
        assert!(!visibility(&s.objects[1], &vp, &s, 5.0));
        assert!(visibility(&s.objects[0], &vp, &s, 5.0));
    }

    #[test]
    fn rotated_viewpoint_reveals_target() {
        // Camera at (1.0, 0.6): lines of sight to (0, 0.5) and (0, 0.7) are
        // 2 * atan(0.1) = 11.42 degrees apart, beyond the 5 degree tolerance.
        let s = occlusion_pair();
        let vp = Viewpoint::new(90.0, 1.0, 1.2).unwrap();
        assert!(visibility(&s.objects[1], &vp, &s, 5.0));
    }

    #[test]
    fn lone_object_always_visible() {
        let s = scene(vec![object("a", 0.1, 0.6, 0.1, 0.9)]);
        let mut vp = Viewpoint::default();
        for _ in 0..8 {
            assert!(visibility(&s.objects[0], &vp, &s, 5.0));
            vp = next_viewpoint(&vp);
        }
    }

    #[test]
    fn detect_respects_threshold() {
        let s = scene(vec![
            object("a", -0.2, 0.6, 0.1, 0.9),
            object("b", 0.2, 0.6, 0.1, 0.5),
        ]);
        let cfg = DetectorConfig::default();
        let out = detect(&s, &Viewpoint::default(), &cfg);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].object_id, "a");
        assert_eq!(out[0].confidence, 0.9);

        let lowered = cfg.lower_threshold("cup");
        let out = detect(&s, &Viewpoint::default(), &lowered);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].object_id, "b");
        assert_eq!(out[1].confidence, 0.5);
    }

    #[test]
    fn lowering_touches_only_the_named_category() {
        let cfg = DetectorConfig::default();
        let lowered = cfg.lower_threshold("cup");
        assert_eq!(lowered.threshold("cup"), LOWERED_THRESHOLD);
        assert_eq!(lowered.threshold("mug"), LOWERED_THRESHOLD);
        assert_eq!(lowered.threshold("book"), DEFAULT_THRESHOLD);
        assert_eq!(lowered.default_threshold, DEFAULT_THRESHOLD);
        assert_eq!(lowered.lower_threshold("cup"), lowered);
    }

    #[test]
    fn lowering_never_raises_a_threshold() {
        let mut cfg = DetectorConfig::default();
        cfg.per_category_threshold.insert("cup".into(), 0.1);
        assert_eq!(cfg.lower_threshold("cup").threshold("cup"), 0.1);
    }

    #[test]
    fn viewpoint_steps() {
        let vp = Viewpoint::default();
        assert_eq!(next_viewpoint(&vp).azimuth_deg, 45.0);
        let last = Viewpoint::new(315.0, 1.0, 1.2).unwrap();
        assert_eq!(next_viewpoint(&last).azimuth_deg, 0.0);
        let full = (0..8).fold(vp, |v, _| next_viewpoint(&v));
        assert_eq!(full, vp);
    }

    #[test]
    fn viewpoint_normalizes_and_validates() {
        assert_eq!(Viewpoint::new(-45.0, 1.0, 1.0).unwrap().azimuth_deg, 315.0);
        assert_eq!(Viewpoint::new(720.0, 1.0, 1.0).unwrap().azimuth_deg, 0.0);
        assert!(Viewpoint::new(0.0, 0.0, 1.0).is_err());
        assert!(Viewpoint::new(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DetectorConfig::default().validate().is_ok());
        let mut cfg = DetectorConfig::default();
        cfg.per_category_threshold.insert("cup".into(), 1.2);
        assert!(cfg.validate().is_err());
    }
}
