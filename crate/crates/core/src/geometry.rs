//! Geometry primitives shared by the retrieval, alignment, and metric layers:
//! axis-aligned boxes with overlap measures, depth discrepancy measures, and
//! perspective projection of 3-D detector boxes into the 2.5-D representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2.5-D object: an axis-aligned image-plane box plus one scalar depth.
///
/// The same tuple represents depth-retrieved objects, projected detector
/// predictions, and ground-truth annotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Object25D {
    /// Box center, pixels.
    pub cx: f64,
    /// Box center, pixels.
    pub cy: f64,
    /// Full extent along the x axis, pixels.
    pub w: f64,
    /// Full extent along the y axis, pixels.
    pub h: f64,
    /// Object depth, meters.
    pub d: f64,
}

impl Object25D {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, d: f64) -> Self {
        Self { cx, cy, w, h, d }
    }

    /// The box region in corner form.
    pub fn rect(&self) -> Box2D {
        Box2D {
            x0: self.cx - self.w / 2.0,
            y0: self.cy - self.h / 2.0,
            x1: self.cx + self.w / 2.0,
            y1: self.cy + self.h / 2.0,
        }
    }

    pub fn center_distance(&self, other: &Object25D) -> f64 {
        (self.cx - other.cx).hypot(self.cy - other.cy)
    }
}

/// Axis-aligned rectangle in corner form, continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2D {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Box2D {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0).max(0.0) * (self.y1 - self.y0).max(0.0)
    }

    pub fn intersection_area(&self, other: &Box2D) -> f64 {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }
}

/// Intersection over union of two boxes. Symmetric, in [0, 1].
pub fn iou(a: &Box2D, b: &Box2D) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Intersection over the area of the second (ground-truth) box. Asymmetric.
pub fn iog(p: &Box2D, g: &Box2D) -> f64 {
    let ga = g.area();
    if ga <= 0.0 {
        0.0
    } else {
        p.intersection_area(g) / ga
    }
}

/// Relative depth discrepancy between a prediction depth and a reference
/// depth: min(1, (d_p - d_s) / d_s), clamped below at -1 so the value stays
/// in [-1, 1]. Positive when the prediction is localized farther than the
/// reference.
pub fn rdd(d_p: f64, d_s: f64) -> f64 {
    ((d_p - d_s) / d_s).min(1.0).max(-1.0)
}

/// Distance ratio min(1, d_g / d_p): penalizes predictions farther than the
/// ground truth, never rewards closer ones beyond 1.
pub fn dr(d_p: f64, d_g: f64) -> f64 {
    (d_g / d_p).min(1.0)
}

/// Oriented 3-D box in the camera frame: x right, y down, z forward.
/// Yaw rotates about the vertical (y) axis; at zero yaw the `length` side
/// runs along +x and `width` along +z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D {
    /// Center (x, y, z), meters.
    pub center: [f64; 3],
    /// (length, width, height), meters.
    pub size: [f64; 3],
    /// Radians about the vertical axis.
    pub yaw: f64,
}

impl Box3D {
    /// The eight corners in camera coordinates.
    pub fn corners(&self) -> [[f64; 3]; 8] {
        let (l, w, h) = (self.size[0] / 2.0, self.size[1] / 2.0, self.size[2] / 2.0);
        let (s, c) = self.yaw.sin_cos();
        let mut out = [[0.0; 3]; 8];
        let mut i = 0;
        for &du in &[-l, l] {
            for &dv in &[-h, h] {
                for &dw in &[-w, w] {
                    // length axis (c, 0, s); width axis (-s, 0, c)
                    out[i] = [
                        self.center[0] + du * c - dw * s,
                        self.center[1] + dv,
                        self.center[2] + du * s + dw * c,
                    ];
                    i += 1;
                }
            }
        }
        out
    }

    /// Exact Euclidean distance from the camera origin to the closest point
    /// of the box: the origin is expressed in box-local coordinates and
    /// clamped into the local extents.
    pub fn distance_from_origin(&self) -> f64 {
        let (s, c) = self.yaw.sin_cos();
        // origin relative to center, projected on the local axes
        let rel = [-self.center[0], -self.center[1], -self.center[2]];
        let u = rel[0] * c + rel[2] * s;
        let v = rel[1];
        let w = -rel[0] * s + rel[2] * c;
        let half = [self.size[0] / 2.0, self.size[2] / 2.0, self.size[1] / 2.0];
        let du = u - u.clamp(-half[0], half[0]);
        let dv = v - v.clamp(-half[2], half[2]);
        let dw = w - w.clamp(-half[1], half[1]);
        (du * du + dv * dv + dw * dw).sqrt()
    }
}

/// Pinhole camera intrinsics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    /// Focal length, pixels.
    pub fx: f64,
    /// Focal length, pixels.
    pub fy: f64,
    /// Principal point, pixels.
    #[serde(rename = "cx")]
    pub cx0: f64,
    /// Principal point, pixels.
    #[serde(rename = "cy")]
    pub cy0: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraModel {
    pub fn project_point(&self, p: &[f64; 3]) -> (f64, f64) {
        (
            self.fx * p[0] / p[2] + self.cx0,
            self.fy * p[1] / p[2] + self.cy0,
        )
    }
}

/// Corners closer than this are skipped during projection.
pub const Z_NEAR: f64 = 0.1;

/// Project a 3-D detector box into a 2.5-D object: the tight axis-aligned
/// box of the projected visible corners, clipped to the image, with depth
/// set to the closest distance from the camera origin to the 3-D box.
///
/// Fails with [`Error::BehindCamera`] when no corner lies in front of the
/// camera.
pub fn project_box3d(b: &Box3D, cam: &CameraModel) -> Result<Object25D> {
    let corners = b.corners();
    if !corners.iter().any(|c| c[2] > 0.0) {
        return Err(Error::BehindCamera);
    }
    let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
    let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut seen = false;
    for c in &corners {
        if c[2] <= Z_NEAR {
            continue;
        }
        seen = true;
        let (px, py) = cam.project_point(c);
        x0 = x0.min(px);
        y0 = y0.min(py);
        x1 = x1.max(px);
        y1 = y1.max(py);
    }
    if !seen {
        return Err(Error::BehindCamera);
    }
    x0 = x0.clamp(0.0, cam.width as f64);
    x1 = x1.clamp(0.0, cam.width as f64);
    y0 = y0.clamp(0.0, cam.height as f64);
    y1 = y1.clamp(0.0, cam.height as f64);
    Ok(Object25D {
        cx: (x0 + x1) / 2.0,
        cy: (y0 + y1) / 2.0,
        w: x1 - x0,
        h: y1 - y0,
        d: b.distance_from_origin(),
    })
}
