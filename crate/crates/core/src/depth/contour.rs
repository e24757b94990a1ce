//! Contour extraction: maximal 8-connected components of edge pixels.

use super::raster::EdgeMask;

/// A connected chain of edge pixels, in (x, y) coordinates.
pub type PixelChain = Vec<(usize, usize)>;

/// Partition the edge pixels into maximal 8-connected components. Every
/// edge pixel lands in exactly one chain; scan order makes the output
/// deterministic.
pub fn trace_contours(mask: &EdgeMask) -> Vec<PixelChain> {
    let (w, h) = (mask.width, mask.height);
    let mut visited = vec![false; w * h];
    let mut chains = Vec::new();
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.at(x, y) || visited[y * w + x] {
                continue;
            }
            let mut chain = Vec::new();
            visited[y * w + x] = true;
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                chain.push((cx, cy));
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = cx as isize + dx;
                        let ny = cy as isize + dy;
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.at(nx, ny) && !visited[ny * w + nx] {
                            visited[ny * w + nx] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            chains.push(chain);
        }
    }
    chains
}
