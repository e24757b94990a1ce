//! Depth-map preprocessing and safety-critical object retrieval.
//!
//! The run-time reference set comes from a metric depth map: invert it so
//! near structure dominates the gradients, subtract the mean inverse map of
//! the driving perspective, normalize, then find objects with Canny edge
//! detection, contour linking, and box fitting.

mod boxes;
mod canny;
mod contour;
mod raster;

pub use boxes::fit_boxes;
pub use canny::{canny_edges, gaussian_blur};
pub use contour::{trace_contours, PixelChain};
pub use raster::{
    invert, load_depth_map, mean_inverse_map, normalize, save_depth_map, subtract_foreground,
    DepthMap, EdgeMask, IntensityImage,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Object25D;

/// Division guard for degenerate zero depths.
pub const DEPTH_EPSILON: f64 = 1e-3;

/// Knobs for the retrieval pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    /// Hysteresis low threshold on the [0, 255] gradient scale.
    pub canny_low: f64,
    /// Hysteresis high threshold.
    pub canny_high: f64,
    /// Boxes below this area (pixels squared) are treated as speckle.
    pub min_box_area: f64,
    /// Objects deeper than this are not safety-critical, meters.
    pub max_depth: f64,
    /// Gaussian blur kernel radius, pixels.
    pub blur_radius: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            canny_low: 20.0,
            canny_high: 60.0,
            min_box_area: 64.0,
            max_depth: 20.0,
            blur_radius: 2,
        }
    }
}

/// Full retrieval pass over one frame: invert the raw map, remove the mean
/// driving-perspective foreground, normalize, detect edges, link contours,
/// and fit 2.5-D boxes against the original metric map.
pub fn retrieve_safety_critical(
    raw: &DepthMap,
    mean_inv: &DepthMap,
    cfg: &RetrievalConfig,
) -> Result<Vec<Object25D>> {
    let inv = invert(raw, DEPTH_EPSILON);
    let fg = subtract_foreground(&inv, mean_inv)?;
    let img = normalize(&fg);
    let mask = canny_edges(&img, cfg)?;
    let chains = trace_contours(&mask);
    Ok(fit_boxes(&chains, raw, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::iou;
    use crate::synth::{render_scene, GroundPlane, SceneObject};

    fn ramp_mean(ground: &GroundPlane) -> DepthMap {
        let empty = render_scene(ground, &[]);
        invert(&empty, DEPTH_EPSILON)
    }

    #[test]
    fn single_rectangle_recovered() {
        let ground = GroundPlane::default();
        let obj = SceneObject {
            x0: 60,
            y0: 42,
            w: 24,
            h: 11,
            depth: 10.0,
        };
        let map = render_scene(&ground, &[obj]);
        let mean = ramp_mean(&ground);
        let cfg = RetrievalConfig::default();
        let found = retrieve_safety_critical(&map, &mean, &cfg).unwrap();
        assert_eq!(found.len(), 1, "{found:?}");
        let got = found[0];
        assert!(iou(&got.rect(), &obj.object25d().rect()) >= 0.7, "{got:?}");
        assert!((got.d - 10.0).abs() <= 0.5);
    }

    #[test]
    fn object_free_scene_yields_nothing() {
        let ground = GroundPlane::default();
        let map = render_scene(&ground, &[]);
        let mean = ramp_mean(&ground);
        let found = retrieve_safety_critical(&map, &mean, &RetrievalConfig::default()).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn two_rectangles_at_known_depths() {
        let ground = GroundPlane::default();
        let a = SceneObject {
            x0: 20,
            y0: 44,
            w: 26,
            h: 12,
            depth: 8.0,
        };
        let b = SceneObject {
            x0: 100,
            y0: 36,
            w: 20,
            h: 12,
            depth: 15.0,
        };
        let map = render_scene(&ground, &[a, b]);
        let mean = ramp_mean(&ground);
        let mut found =
            retrieve_safety_critical(&map, &mean, &RetrievalConfig::default()).unwrap();
        found.sort_by(|l, r| l.d.partial_cmp(&r.d).unwrap());
        assert_eq!(found.len(), 2, "{found:?}");
        assert!((found[0].d - 8.0).abs() <= 0.5);
        assert!((found[1].d - 15.0).abs() <= 0.5);
    }

    #[test]
    fn retrieval_respects_cutoffs() {
        let ground = GroundPlane::default();
        // visible object, but deeper than the 20 m safety cutoff
        let far = SceneObject {
            x0: 70,
            y0: 30,
            w: 24,
            h: 12,
            depth: 25.0,
        };
        let map = render_scene(&ground, &[far]);
        let mean = ramp_mean(&ground);
        let found = retrieve_safety_critical(&map, &mean, &RetrievalConfig::default()).unwrap();
        assert!(found.iter().all(|o| o.d <= 20.0));
        assert!(found.is_empty());
    }

    #[test]
    fn retrieval_is_deterministic() {
        let ground = GroundPlane::default();
        let obj = SceneObject {
            x0: 60,
            y0: 42,
            w: 24,
            h: 11,
            depth: 10.0,
        };
        let map = render_scene(&ground, &[obj]);
        let mean = ramp_mean(&ground);
        let cfg = RetrievalConfig::default();
        let a = retrieve_safety_critical(&map, &mean, &cfg).unwrap();
        let b = retrieve_safety_critical(&map, &mean, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
