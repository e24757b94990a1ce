//! Canny edge detection on real-valued intensity images: Gaussian blur,
//! Sobel gradients, non-maximum suppression, and double-threshold
//! hysteresis.

use crate::error::{Error, Result};

use super::raster::{EdgeMask, IntensityImage};
use super::RetrievalConfig;

/// Run the full Canny pipeline with the thresholds and blur radius from the
/// retrieval config. Thresholds apply to Sobel gradient magnitudes on the
/// [0, 255] intensity scale.
pub fn canny_edges(img: &IntensityImage, cfg: &RetrievalConfig) -> Result<EdgeMask> {
    if img.width < 3 || img.height < 3 {
        return Err(Error::ImageTooSmall {
            width: img.width,
            height: img.height,
        });
    }
    let blurred = gaussian_blur(img, cfg.blur_radius);
    let (gx, gy) = sobel(&blurred);
    let mag = suppress_non_maxima(&blurred, &gx, &gy);
    Ok(hysteresis(
        img.width,
        img.height,
        &mag,
        cfg.canny_low,
        cfg.canny_high,
    ))
}

/// Separable Gaussian blur with kernel radius `radius` (sigma = radius / 2,
/// floored at 0.5) and replicated borders. Radius 0 is a no-op.
pub fn gaussian_blur(img: &IntensityImage, radius: usize) -> IntensityImage {
    if radius == 0 {
        return img.clone();
    }
    let sigma = (radius as f64 / 2.0).max(0.5);
    let mut kernel: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let x = i as f64 - radius as f64;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }

    let (w, h) = (img.width, img.height);
    let r = radius as isize;
    let mut horiz = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let sx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                acc += k * img.at(sx, y);
            }
            horiz[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let sy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                acc += k * horiz[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    IntensityImage {
        width: w,
        height: h,
        data: out,
    }
}

/// 3x3 Sobel gradients. Border pixels keep zero gradient.
fn sobel(img: &IntensityImage) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (img.width, img.height);
    let mut gx = vec![0.0f64; w * h];
    let mut gy = vec![0.0f64; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let p = |dx: isize, dy: isize| {
                img.at((x as isize + dx) as usize, (y as isize + dy) as usize)
            };
            gx[y * w + x] = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1))
                - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            gy[y * w + x] = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1))
                - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        }
    }
    (gx, gy)
}

/// Keep a pixel only when its gradient magnitude is no smaller than both
/// neighbors along the quantized gradient direction.
fn suppress_non_maxima(img: &IntensityImage, gx: &[f64], gy: &[f64]) -> Vec<f64> {
    let (w, h) = (img.width, img.height);
    let mag: Vec<f64> = gx.iter().zip(gy).map(|(a, b)| a.hypot(*b)).collect();
    let mut out = vec![0.0f64; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            if mag[i] == 0.0 {
                continue;
            }
            let mut angle = gy[i].atan2(gx[i]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            let (n1, n2) = if !(22.5..157.5).contains(&angle) {
                (mag[i - 1], mag[i + 1])
            } else if angle < 67.5 {
                (mag[i - w - 1], mag[i + w + 1])
            } else if angle < 112.5 {
                (mag[i - w], mag[i + w])
            } else {
                (mag[i - w + 1], mag[i + w - 1])
            };
            if mag[i] >= n1 && mag[i] >= n2 {
                out[i] = mag[i];
            }
        }
    }
    out
}

/// Double-threshold hysteresis: seeds at magnitude >= high, grown through
/// 8-connected neighbors with magnitude >= low.
fn hysteresis(w: usize, h: usize, mag: &[f64], low: f64, high: f64) -> EdgeMask {
    let mut mask = EdgeMask::empty(w, h);
    let mut stack = Vec::new();
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            if mag[y * w + x] < high || mask.at(x, y) {
                continue;
            }
            mask.set(x, y);
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = cx as isize + dx;
                        let ny = cy as isize + dy;
                        if nx < 1 || ny < 1 || nx >= w as isize - 1 || ny >= h as isize - 1 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if !mask.at(nx, ny) && mag[ny * w + nx] >= low {
                            mask.set(nx, ny);
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }
    mask
}
