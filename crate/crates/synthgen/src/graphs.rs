//! Random directed graphs and direct-definition metric oracles on a dense matrix.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weighted edge list over `n` nodes: each ordered pair (self-loops included) is
/// present with probability `density`, with weight 1 to 3.
pub fn random_digraph(seed: u64, n: usize, density: f64) -> Vec<(u32, u32, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if rng.random_bool(density) {
                edges.push((u, v, rng.random_range(1..=3)));
            }
        }
    }
    edges
}

/// `n` samples of `floor(X)` with `X` continuous Pareto on `[1, inf)` of density
/// exponent `alpha`, drawn by inverting the CDF. `P(floor(X) >= k) = k^(1 - alpha)` exactly.
pub fn pareto_degrees(seed: u64, n: usize, alpha: f64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // u in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            u.powf(-1.0 / (alpha - 1.0)).floor() as u64
        })
        .collect()
}

/// Adjacency matrix with parallel edges summed.
pub struct Dense {
    n: usize,
    w: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub largest: usize,
}

impl Dense {
    pub fn new(n: usize, edges: &[(u32, u32, u64)]) -> Self {
        let mut w = vec![0; n * n];
        for &(u, v, x) in edges {
            w[u as usize * n + v as usize] += x;
        }
        Dense { n, w }
    }

    fn at(&self, u: usize, v: usize) -> u64 {
        self.w[u * self.n + v]
    }

    fn classes(&self, reach: &[bool]) -> Components {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut out = Components { count: 0, largest: 0 };
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut size = 0;
            for j in 0..n {
                if reach[i * n + j] && reach[j * n + i] {
                    seen[j] = true;
                    size += 1;
                }
            }
            out.count += 1;
            out.largest = out.largest.max(size);
        }
        out
    }

    /// Reflexive-transitive closure by Floyd–Warshall.
    fn closure(&self, symmetric: bool) -> Vec<bool> {
        let n = self.n;
        let mut r = vec![false; n * n];
        for u in 0..n {
            r[u * n + u] = true;
            for v in 0..n {
                if self.at(u, v) > 0 {
                    r[u * n + v] = true;
                    if symmetric {
                        r[v * n + u] = true;
                    }
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                if r[i * n + k] {
                    for j in 0..n {
                        if r[k * n + j] {
                            r[i * n + j] = true;
                        }
                    }
                }
            }
        }
        r
    }

    /// Classes of mutual reachability.
    pub fn strong_components(&self) -> Components {
        self.classes(&self.closure(false))
    }

    pub fn weak_components(&self) -> Components {
        self.classes(&self.closure(true))
    }

    pub fn reciprocity(&self) -> Option<f64> {
        let (mut total, mut mutual) = (0u64, 0u64);
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v && self.at(u, v) > 0 {
                    total += 1;
                    if self.at(v, u) > 0 {
                        mutual += 1;
                    }
                }
            }
        }
        (total > 0).then(|| mutual as f64 / total as f64)
    }

    fn linked(&self, u: usize, v: usize) -> bool {
        u != v && (self.at(u, v) > 0 || self.at(v, u) > 0)
    }

    fn degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.linked(u, v)).count()
    }

    /// Mean over nodes of closed neighbour pairs over all neighbour pairs, undirected.
    pub fn clustering(&self) -> Option<f64> {
        if self.n == 0 {
            return None;
        }
        let mut sum = 0.0;
        for i in 0..self.n {
            let nb: Vec<usize> = (0..self.n).filter(|&j| self.linked(i, j)).collect();
            let k = nb.len();
            if k < 2 {
                continue;
            }
            let mut closed = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if self.linked(nb[a], nb[b]) {
                        closed += 1;
                    }
                }
            }
            sum += closed as f64 / (k * (k - 1) / 2) as f64;
        }
        Some(sum / self.n as f64)
    }

    /// Pearson correlation between the degrees at the two ends of every undirected
    /// edge, listed in both orientations.
    pub fn assortativity(&self) -> Option<f64> {
        let deg: Vec<f64> = (0..self.n).map(|u| self.degree(u) as f64).collect();
        let mut pairs = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.linked(u, v) {
                    pairs.push((deg[u], deg[v]));
                }
            }
        }
        if pairs.is_empty() {
            return None;
        }
        let m = pairs.len() as f64;
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / m;
        let cov: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let vx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let vy: f64 = pairs.iter().map(|p| (p.1 - my).powi(2)).sum();
        if vx == 0.0 || vy == 0.0 {
            return None;
        }
        Some(cov / (vx * vy).sqrt())
    }

    /// Stationary vector of the damped random walk, solved exactly as the linear system
    /// `(I - d P^T - (d / n) 1 z^T) x = (1 - d) / n`, where `z` marks dangling nodes.
    #[allow(clippy::needless_range_loop)]
    pub fn pagerank(&self, damping: f64) -> Vec<f64> {
        let n = self.n;
        let out: Vec<u64> = (0..n).map(|u| (0..n).map(|v| self.at(u, v)).sum()).collect();
        let nf = n as f64;
        // augmented matrix rows: equation for node v
        let mut a = vec![vec![0.0; n + 1]; n];
        for v in 0..n {
            for u in 0..n {
                let p = if out[u] == 0 {
                    1.0 / nf
                } else {
                    self.at(u, v) as f64 / out[u] as f64
                };
                a[v][u] = -damping * p;
            }
            a[v][v] += 1.0;
            a[v][n] = (1.0 - damping) / nf;
        }
        // Gaussian elimination with partial pivoting
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for row in 0..n {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    if f != 0.0 {
                        for k in col..=n {
                            a[row][k] -= f * a[col][k];
                        }
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cycle() {
        let d = Dense::new(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        assert_eq!(d.strong_components(), Components { count: 1, largest: 3 });
        assert_eq!(d.reciprocity(), Some(0.0));
        assert_eq!(d.clustering(), Some(1.0));
        assert_eq!(d.assortativity(), None);
        for p in d.pagerank(0.85) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pagerank_sums_to_one_with_dangling_nodes() {
        let d = Dense::new(4, &[(0, 1, 2), (1, 2, 1), (0, 2, 1)]);
        let p = d.pagerank(0.85);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[2] > p[1] && p[1] > p[0]);
    }

    #[test]
    fn pareto_sample_is_at_least_one() {
        assert!(pareto_degrees(3, 1000, 2.5).iter().all(|&k| k >= 1));
    }
}
