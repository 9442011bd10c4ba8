//! All-pairs shortest paths over a difference-constraint graph.
//!
//! Node 0 is the time origin. An edge `u -> v` of weight `w` encodes
//! `tau_v - tau_u <= w`, so `get(u, v)` is the largest value `tau_v - tau_u`
//! can take over the feasible region, `-get(u, 0)` the earliest feasible
//! start of `u` and `get(0, u)` its latest.

use super::Infeasible;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct DistanceMatrix<S> {
    n: usize,
    stride: usize,
    d: Vec<S>,
}

/// Largest closure handled by [`DistanceMatrix::closure_feasible`].
pub const MAX_CLOSURE: usize = 8;

impl<S: Scalar> DistanceMatrix<S> {
    /// Matrix holding only the origin.
    pub fn origin_only(capacity: usize) -> Self {
        let stride = capacity.max(1);
        let mut d = vec![S::infinity(); stride * stride];
        d[0] = S::zero();
        Self { n: 1, stride, d }
    }

    /// Floyd-Warshall over `n` nodes (origin included).
    pub fn from_edges(n: usize, edges: &[(usize, usize, S)], capacity: usize) -> Result<Self, Infeasible> {
        let stride = capacity.max(n).max(1);
        let inf = S::infinity();
        let mut d = vec![inf; stride * stride];
        for i in 0..n {
            d[i * stride + i] = S::zero();
        }
        for &(u, v, w) in edges {
            let slot = &mut d[u * stride + v];
            if w < *slot {
                *slot = w;
            }
        }
        let mut row_k = vec![inf; n];
        for k in 0..n {
            row_k.copy_from_slice(&d[k * stride..k * stride + n]);
            for i in 0..n {
                if i == k {
                    continue;
                }
                let dik = d[i * stride + k];
                if dik == inf {
                    continue;
                }
                let row_i = &mut d[i * stride..i * stride + n];
                for (dij, &dkj) in row_i.iter_mut().zip(&row_k) {
                    let cand = dik + dkj;
                    if cand < *dij {
                        *dij = cand;
                    }
                }
            }
            if d[k * stride + k] < -S::tol() {
                return Err(Infeasible);
            }
        }
        let tol = S::tol();
        for i in 0..n {
            let dii = &mut d[i * stride + i];
            if *dii < -tol {
                return Err(Infeasible);
            }
            *dii = S::zero();
        }
        Ok(Self { n, stride, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> S {
        debug_assert!(u < self.n && v < self.n);
        self.d[u * self.stride + v]
    }

    /// Earliest feasible start of node `u`.
    #[inline]
    pub fn earliest(&self, u: usize) -> S {
        -self.get(u, 0)
    }

    /// Latest feasible start of node `u` (infinite when unbounded).
    #[inline]
    pub fn latest(&self, u: usize) -> S {
        self.get(0, u)
    }

    fn grow(&mut self) {
        let stride = (self.stride * 2).max(8);
        let mut d = vec![S::infinity(); stride * stride];
        for i in 0..self.n {
            d[i * stride..i * stride + self.n].copy_from_slice(&self.d[i * self.stride..i * self.stride + self.n]);
        }
        self.stride = stride;
        self.d = d;
    }

    /// Adds a node with the given incident edges and updates every distance
    /// in O(n^2). `incoming` holds `(u, w)` for edges `u -> new`, `outgoing`
    /// holds `(v, w)` for edges `new -> v`. The matrix is left untouched when
    /// the extended system is infeasible.
    pub fn add_node(&mut self, incoming: &[(usize, S)], outgoing: &[(usize, S)]) -> Result<usize, Infeasible> {
        let n = self.n;
        let inf = S::infinity();
        // to_new[x] = dist(x -> new), from_new[y] = dist(new -> y)
        let mut to_new = vec![inf; n];
        for &(u, w) in incoming {
            for (x, slot) in to_new.iter_mut().enumerate() {
                let cand = self.d[x * self.stride + u] + w;
                if cand < *slot {
                    *slot = cand;
                }
            }
        }
        let mut from_new = vec![inf; n];
        for &(v, w) in outgoing {
            let row_v = &self.d[v * self.stride..v * self.stride + n];
            for (slot, &dvy) in from_new.iter_mut().zip(row_v) {
                let cand = w + dvy;
                if cand < *slot {
                    *slot = cand;
                }
            }
        }
        let through_new = outgoing
            .iter()
            .map(|&(v, w)| w + to_new[v])
            .fold(inf, S::min);
        if through_new < -S::tol() {
            return Err(Infeasible);
        }
        if n == self.stride {
            self.grow();
        }
        let stride = self.stride;
        for x in 0..n {
            let dx = to_new[x];
            if dx == inf {
                continue;
            }
            let row_x = &mut self.d[x * stride..x * stride + n];
            for (dxy, &dy) in row_x.iter_mut().zip(&from_new) {
                let cand = dx + dy;
                if cand < *dxy {
                    *dxy = cand;
                }
            }
        }
        for x in 0..n {
            self.d[x * stride + n] = to_new[x];
            self.d[n * stride + x] = from_new[x];
        }
        self.d[n * stride + n] = S::zero();
        self.n += 1;
        Ok(n)
    }

    /// Decides whether new nodes and edges can be added without creating a
    /// negative cycle, without modifying the matrix.
    ///
    /// Local index `i < anchors.len()` refers to matrix node `anchors[i]`;
    /// larger local indices are the `extra` new nodes. Every new edge must
    /// touch a new node; any negative cycle then decomposes into new edges
    /// and shortest paths between anchors, so the small closure is exact.
    pub fn closure_feasible(&self, anchors: &[usize], extra: usize, edges: &[(usize, usize, S)]) -> bool {
        let m = anchors.len() + extra;
        assert!(m <= MAX_CLOSURE, "closure larger than {MAX_CLOSURE} nodes");
        let inf = S::infinity();
        let mut c = [[inf; MAX_CLOSURE]; MAX_CLOSURE];
        for (i, &a) in anchors.iter().enumerate() {
            for (j, &b) in anchors.iter().enumerate() {
                c[i][j] = self.get(a, b);
            }
        }
        for (i, row) in c.iter_mut().enumerate().take(m) {
            row[i] = S::zero();
        }
        for &(u, v, w) in edges {
            if w < c[u][v] {
                c[u][v] = w;
            }
        }
        for k in 0..m {
            for i in 0..m {
                let cik = c[i][k];
                if cik == inf {
                    continue;
                }
                for j in 0..m {
                    let cand = cik + c[k][j];
                    if cand < c[i][j] {
                        c[i][j] = cand;
                    }
                }
            }
        }
        (0..m).all(|i| c[i][i] >= -S::tol())
    }
}
