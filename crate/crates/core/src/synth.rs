//! Synthetic scene generation: pinhole ground-plane depth ramps with
//! rectangular obstacles, seeded scene sampling for the retrieval suites,
//! the object-level perturbation harness for the correlation experiments,
//! and the self-contained demo corpus.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::depth::DepthMap;
use crate::geometry::{Box3D, CameraModel, Object25D};
use crate::metrics::FrameObjects;

/// Camera over a flat ground plane; rows below the principal point see the
/// ground at pinhole depth, everything else is capped at `max_range`.
#[derive(Debug, Clone, Copy)]
pub struct GroundPlane {
    pub camera: CameraModel,
    /// Camera height above the ground, meters.
    pub cam_height: f64,
    /// Depth cap for sky and far ground, meters.
    pub max_range: f64,
}

impl Default for GroundPlane {
    fn default() -> Self {
        Self {
            camera: CameraModel {
                fx: 100.0,
                fy: 100.0,
                cx0: 80.0,
                cy0: 40.0,
                width: 160,
                height: 120,
            },
            cam_height: 1.5,
            max_range: 80.0,
        }
    }
}

impl GroundPlane {
    /// Ground depth seen at an image row.
    pub fn depth_at_row(&self, y: usize) -> f64 {
        let dy = y as f64 - self.camera.cy0;
        if dy <= 0.0 {
            self.max_range
        } else {
            (self.camera.fy * self.cam_height / dy).min(self.max_range)
        }
    }

    /// Image row at which the ground reaches the given depth.
    pub fn ground_row(&self, depth: f64) -> f64 {
        self.camera.cy0 + self.camera.fy * self.cam_height / depth
    }
}

/// A constant-depth rectangle drawn over the ground ramp. Extents are
/// inclusive pixel spans, matching the retrieval box convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneObject {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
    pub depth: f64,
}

impl SceneObject {
    pub fn object25d(&self) -> Object25D {
        Object25D {
            cx: self.x0 as f64 + (self.w as f64 - 1.0) / 2.0,
            cy: self.y0 as f64 + (self.h as f64 - 1.0) / 2.0,
            w: self.w as f64,
            h: self.h as f64,
            d: self.depth,
        }
    }
}

/// Render the ground ramp and paint each object's rectangle at its constant
/// depth. Rectangles are clipped to the image.
pub fn render_scene(ground: &GroundPlane, objects: &[SceneObject]) -> DepthMap {
    let w = ground.camera.width as usize;
    let h = ground.camera.height as usize;
    let mut map = DepthMap::filled(w, h, ground.max_range);
    for y in 0..h {
        let z = ground.depth_at_row(y);
        for x in 0..w {
            map.set(x, y, z);
        }
    }
    for o in objects {
        let x1 = (o.x0 + o.w).min(w);
        let y1 = (o.y0 + o.h).min(h);
        for y in o.y0.min(h)..y1 {
            for x in o.x0.min(w)..x1 {
                map.set(x, y, o.depth);
            }
        }
    }
    map
}

/// Sample up to `max_objects` well-separated rectangles that the retrieval
/// pipeline is expected to recover: every box sits fully above the image
/// row where the ground reaches twice its depth, so the surrounding
/// background stays at least twice as deep as the object and the contrast
/// band stays within one order of magnitude across the scene.
pub fn sample_scene(
    ground: &GroundPlane,
    max_objects: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SceneObject> {
    let img_w = ground.camera.width as usize;
    let n = rng.random_range(1..=max_objects.max(1));
    let mut placed: Vec<SceneObject> = Vec::new();
    for _ in 0..n {
        for _attempt in 0..40 {
            let depth = rng.random_range(6.0..16.0);
            let w = rng.random_range(16..=40usize);
            let h = rng.random_range(12..=26usize);
            let max_y1 = ground.ground_row(2.0 * depth).floor() as isize - 3;
            let min_y1 = h as isize + 1;
            if max_y1 < min_y1 {
                continue;
            }
            let y1 = rng.random_range(min_y1..=max_y1) as usize;
            let y0 = y1 + 1 - h;
            if img_w < w + 4 {
                continue;
            }
            let x0 = rng.random_range(2..=img_w - w - 2);
            let candidate = SceneObject { x0, y0, w, h, depth };
            let sep = 6usize;
            let clear = placed.iter().all(|p| {
                let dx = (candidate.x0 + candidate.w + sep <= p.x0)
                    || (p.x0 + p.w + sep <= candidate.x0);
                let dy = (candidate.y0 + candidate.h + sep <= p.y0)
                    || (p.y0 + p.h + sep <= candidate.y0);
                dx || dy
            });
            if clear {
                placed.push(candidate);
                break;
            }
        }
    }
    placed
}

fn perturb(o: &Object25D, rel: f64, rng: &mut ChaCha8Rng) -> Object25D {
    if rel == 0.0 {
        return *o;
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut n = || normal.sample(rng);
    Object25D {
        cx: o.cx + n() * rel * o.w * 0.5,
        cy: o.cy + n() * rel * o.h * 0.5,
        w: (o.w * (1.0 + n() * rel * 0.5)).max(4.0),
        h: (o.h * (1.0 + n() * rel * 0.5)).max(4.0),
        d: (o.d * (1.0 + n() * rel * 0.5)).max(1.0),
    }
}

/// Object-level perturbation harness: per frame, ground truths are drawn at
/// random, the detector's predictions are the ground truths degraded by a
/// per-frame quality level, and the depth-retrieved set is the ground
/// truths degraded by `retrieval_noise`. At zero retrieval noise the
/// retrieved set equals the ground truths exactly.
pub fn perturbation_frames(
    n_frames: usize,
    retrieval_noise: f64,
    seed: u64,
) -> Vec<FrameObjects> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let n_obj = rng.random_range(2..=5usize);
        let gts: Vec<Object25D> = (0..n_obj)
            .map(|_| Object25D {
                cx: rng.random_range(25.0..135.0),
                cy: rng.random_range(25.0..95.0),
                w: rng.random_range(16.0..40.0),
                h: rng.random_range(12.0..28.0),
                d: rng.random_range(5.0..18.0),
            })
            .collect();
        let detector_jitter = rng.random_range(0.02..0.30);
        let miss_prob = rng.random_range(0.0..0.5);
        let preds: Vec<Object25D> = gts
            .iter()
            .filter_map(|g| {
                let missed = rng.random_bool(miss_prob);
                let p = perturb(g, detector_jitter, &mut rng);
                if missed {
                    None
                } else {
                    Some(p)
                }
            })
            .collect();
        let retrieved: Vec<Object25D> = gts
            .iter()
            .map(|g| perturb(g, retrieval_noise, &mut rng))
            .collect();
        frames.push(FrameObjects {
            condition: "synthetic".to_string(),
            preds,
            retrieved,
            gts,
        });
    }
    frames
}

/// Lift a 2.5-D box back into a thin 3-D box whose near face projects onto
/// (approximately) the same image rectangle at the given depth.
pub fn lift_to_box3d(o: &Object25D, cam: &CameraModel) -> Box3D {
    const BODY_DEPTH: f64 = 0.8;
    let z = o.d;
    Box3D {
        center: [
            (o.cx - cam.cx0) * z / cam.fx,
            (o.cy - cam.cy0) * z / cam.fy,
            z + BODY_DEPTH / 2.0,
        ],
        size: [o.w * z / cam.fx, BODY_DEPTH, o.h * z / cam.fy],
        yaw: 0.0,
    }
}

/// One frame of the demo corpus: a rendered depth map, 3-D detector
/// predictions with scores, and 2.5-D ground truths.
#[derive(Debug, Clone)]
pub struct DemoFrame {
    pub frame_id: String,
    pub condition: String,
    pub depth: DepthMap,
    pub camera: CameraModel,
    pub predictions: Vec<(Box3D, f64)>,
    pub ground_truths: Vec<Object25D>,
}

/// Detector degradation per demo condition.
const DEMO_CONDITIONS: [(&str, f64, f64); 3] = [
    ("nominal", 0.05, 0.02),
    ("sensor_noise", 0.30, 0.10),
    ("low_light", 0.50, 0.05),
];

/// Generate the demo corpus: `frames_per_condition` frames for each of the
/// three conditions, all over the default ground plane.
pub fn demo_frames(seed: u64, frames_per_condition: usize) -> Vec<DemoFrame> {
    let ground = GroundPlane::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut frames = Vec::new();
    for (cond, miss_prob, jitter) in DEMO_CONDITIONS {
        for i in 0..frames_per_condition {
            let objects = sample_scene(&ground, 3, &mut rng);
            let depth = render_scene(&ground, &objects);
            let gts: Vec<Object25D> = objects.iter().map(|o| o.object25d()).collect();
            let mut predictions = Vec::new();
            for g in &gts {
                let missed = rng.random_bool(miss_prob);
                let noisy = perturb(g, jitter * 2.0, &mut rng);
                if missed {
                    continue;
                }
                let score = rng.random_range(0.5..1.0);
                predictions.push((lift_to_box3d(&noisy, &ground.camera), score));
            }
            // occasional distant false positive, beyond the retrieval cutoff
            if cond == "sensor_noise" && rng.random_bool(0.15) {
                let z = rng.random_range(25.0..60.0);
                let fp = Box3D {
                    center: [
                        rng.random_range(-4.0..4.0),
                        normal.sample(&mut rng) * 0.3,
                        z,
                    ],
                    size: [1.8, 0.8, 1.6],
                    yaw: 0.0,
                };
                predictions.push((fp, rng.random_range(0.3..0.6)));
            }
            frames.push(DemoFrame {
                frame_id: format!("{cond}-{i:03}"),
                condition: cond.to_string(),
                depth,
                camera: ground.camera,
                predictions,
                ground_truths: gts,
            });
        }
    }
    frames
}
