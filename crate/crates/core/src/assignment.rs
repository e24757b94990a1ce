//! Minimum-cost assignment via the Hungarian algorithm (shortest augmenting
//! paths with dual potentials, O(n^3)).

/// A dense cost matrix, row-major.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Costs must be finite and non-negative.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix shape mismatch");
        debug_assert!(data.iter().all(|c| c.is_finite() && *c >= 0.0));
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn transposed(&self) -> CostMatrix {
        CostMatrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r))
    }
}

/// Minimum-total-cost assignment of `min(rows, cols)` pairs; each row and
/// column is used at most once. Pairs are returned sorted by row index.
pub fn hungarian(cost: &CostMatrix) -> Vec<(usize, usize)> {
    if cost.rows == 0 || cost.cols == 0 {
        return Vec::new();
    }
    if cost.rows > cost.cols {
        let mut pairs: Vec<(usize, usize)> = hungarian(&cost.transposed())
            .into_iter()
            .map(|(r, c)| (c, r))
            .collect();
        pairs.sort_unstable();
        return pairs;
    }

    let n = cost.rows;
    let m = cost.cols;
    // 1-based with a virtual column 0; p[j] = row assigned to column j (0 = none)
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // unwind the augmenting path
        while j0 != 0 {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| p[j] != 0)
        .map(|j| (p[j] - 1, j - 1))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Total cost of an assignment on the given matrix.
pub fn assignment_cost(cost: &CostMatrix, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(r, c)| cost.at(r, c)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let m = CostMatrix::new(1, 1, vec![3.0]);
        assert_eq!(hungarian(&m), vec![(0, 0)]);
    }

    #[test]
    fn diagonal_optimum() {
        let m = CostMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]);
        let pairs = hungarian(&m);
        assert_eq!(pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(assignment_cost(&m, &pairs), 2.0);
    }

    #[test]
    fn rectangular_uses_min_side() {
        let m = CostMatrix::new(2, 3, vec![1.0, 2.0, 3.0, 6.0, 5.0, 4.0]);
        let pairs = hungarian(&m);
        assert_eq!(pairs.len(), 2);
        assert_eq!(assignment_cost(&m, &pairs), 5.0); // (0,0) + (1,2)

        let t = CostMatrix::new(3, 2, vec![1.0, 6.0, 2.0, 5.0, 3.0, 4.0]);
        let pairs = hungarian(&t);
        assert_eq!(pairs.len(), 2);
        assert_eq!(assignment_cost(&t, &pairs), 5.0);
    }

    #[test]
    fn classic_4x4() {
        let m = CostMatrix::new(
            4,
            4,
            vec![
                10.0, 25.0, 15.0, 20.0, //
                15.0, 30.0, 5.0, 15.0, //
                35.0, 20.0, 12.0, 24.0, //
                17.0, 25.0, 24.0, 20.0,
            ],
        );
        let pairs = hungarian(&m);
        assert_eq!(assignment_cost(&m, &pairs), 10.0 + 5.0 + 20.0 + 20.0);
    }

    #[test]
    fn no_worse_than_greedy() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(1..6);
            let m = rng.random_range(1..6);
            let cost = CostMatrix::from_fn(n, m, |_, _| rng.random_range(0.0..10.0));
            let pairs = hungarian(&cost);
            assert_eq!(pairs.len(), n.min(m));

            // greedy: repeatedly take the cheapest unused (row, col)
            let mut used_r = vec![false; n];
            let mut used_c = vec![false; m];
            let mut greedy = 0.0;
            for _ in 0..n.min(m) {
                let mut best = f64::INFINITY;
                let mut arg = (0, 0);
                for r in 0..n {
                    for c in 0..m {
                        if !used_r[r] && !used_c[c] && cost.at(r, c) < best {
                            best = cost.at(r, c);
                            arg = (r, c);
                        }
                    }
                }
                used_r[arg.0] = true;
                used_c[arg.1] = true;
                greedy += best;
            }
            assert!(assignment_cost(&cost, &pairs) <= greedy + 1e-9);
        }
    }
}
