//! Bounding-box fitting over traced contours.

use crate::geometry::Object25D;

use super::contour::PixelChain;
use super::raster::DepthMap;
use super::RetrievalConfig;

/// Fit one tight axis-aligned box per chain (inclusive pixel extents), set
/// its depth to the minimum of the original metric map inside the box, and
/// drop boxes smaller than `min_box_area` or deeper than `max_depth`.
pub fn fit_boxes(
    chains: &[PixelChain],
    depth: &DepthMap,
    cfg: &RetrievalConfig,
) -> Vec<Object25D> {
    let mut out = Vec::new();
    for chain in chains {
        if chain.is_empty() {
            continue;
        }
        let (mut x0, mut y0) = (usize::MAX, usize::MAX);
        let (mut x1, mut y1) = (0usize, 0usize);
        for &(x, y) in chain {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let w = (x1 - x0 + 1) as f64;
        let h = (y1 - y0 + 1) as f64;
        if w * h < cfg.min_box_area {
            continue;
        }
        let mut d = f64::INFINITY;
        for y in y0..=y1 {
            for x in x0..=x1 {
                d = d.min(depth.at(x, y));
            }
        }
        if d > cfg.max_depth {
            continue;
        }
        out.push(Object25D {
            cx: (x0 + x1) as f64 / 2.0,
            cy: (y0 + y1) as f64 / 2.0,
            w,
            h,
            d,
        });
    }
    out
}
