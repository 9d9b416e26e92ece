//! Minimal cuts through the spacetime network of a circuit.
//!
//! A cut is a path on the dual lattice. Nodes are `(slice, gap)`: slice `s`
//! is the time after layer `s` and gap `g` sits left of site `g` (open
//! chains have gaps `0..=L`, rings `0..L`). Within a slice a path crosses
//! the world line of one site per horizontal step, paying the bond's cost;
//! it may descend through layer `s` at any gap that no gate of that layer
//! straddles. Every slice-0 node connects freely to the initial product
//! state.

use std::collections::VecDeque;

use crate::circuit::{Boundary, Circuit, Event};
use crate::error::{Error, Result};

/// Directed cuts are monotone in time; undirected cuts may turn back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutConvention {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// Number of intact bonds cut.
    pub bonds: u32,
    /// `bonds · ln q`.
    pub cost: f64,
    /// `(slice, gap)` nodes visited from the top endpoint, for single-point
    /// directed cuts; empty otherwise.
    pub path: Vec<(usize, usize)>,
}

/// Spacetime network of a circuit with unit bond costs (0 for bonds broken
/// by a measurement).
#[derive(Debug, Clone, PartialEq)]
pub struct CutGraph {
    n: usize,
    boundary: Boundary,
    slices: usize,
    ln_q: f64,
    /// `blocked[s-1][g]`: layer `s` straddles gap `g`.
    blocked: Vec<Vec<bool>>,
    /// `bond[s][j]`: bond id of site `j`'s world line at slice `s`.
    bond: Vec<Vec<usize>>,
    /// Unit cost of each bond.
    cost: Vec<u32>,
}

const INF: u32 = u32::MAX / 4;

impl CutGraph {
    /// Builds the network; layers without gates only mark measurements.
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let n = c.n_sites;
        let gaps = Self::gap_count_for(n, c.boundary);
        let mut blocked = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        let mut cost: Vec<u32> = vec![1; n];
        let mut bond = vec![current.clone()];
        for layer in &c.layers {
            if layer.has_gates() {
                let mut row = vec![false; gaps];
                for e in &layer.events {
                    if let Event::Gate { sites, .. } = e {
                        match sites.as_slice() {
                            [_] => {}
                            &[a, b] => {
                                let gap = Self::straddled_gap(n, c.boundary, a, b)?;
                                row[gap] = true;
                                for s in [a, b] {
                                    current[s] = cost.len();
                                    cost.push(1);
                                }
                            }
                            _ => return Err(Error::InvalidGeometry("cut graphs need one- and two-site gates".into())),
                        }
                    }
                }
                blocked.push(row);
                bond.push(current.clone());
            }
            for e in &layer.events {
                if let Event::Measure { site, .. } = e {
                    cost[current[*site]] = 0;
                }
            }
        }
        let slices = blocked.len();
        Ok(Self { n, boundary: c.boundary, slices, ln_q: (c.q as f64).ln(), blocked, bond, cost })
    }

    fn gap_count_for(n: usize, b: Boundary) -> usize {
        match b {
            Boundary::Open => n + 1,
            Boundary::Periodic => n,
        }
    }

    fn straddled_gap(n: usize, boundary: Boundary, a: usize, b: usize) -> Result<usize> {
        let (lo, hi) = (a.min(b), a.max(b));
        if hi == lo + 1 {
            Ok(hi)
        } else if boundary == Boundary::Periodic && lo == 0 && hi == n - 1 {
            Ok(0)
        } else {
            Err(Error::InvalidGeometry(format!("gate on ({a}, {b}) is not nearest-neighbour")))
        }
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn gap_count(&self) -> usize {
        Self::gap_count_for(self.n, self.boundary)
    }

    /// Number of distinct bonds and how many are intact.
    pub fn bond_counts(&self) -> (usize, usize) {
        (self.cost.len(), self.cost.iter().filter(|&&c| c == 1).count())
    }

    /// Marks a bond as broken (cost 0). Used to test monotonicity.
    pub fn break_bond(&mut self, id: usize) {
        if let Some(c) = self.cost.get_mut(id) {
            *c = 0;
        }
    }

    /// Site crossed by the horizontal step from gap `g` to gap `g + 1`.
    fn right_step(&self, g: usize) -> Option<(usize, usize)> {
        match self.boundary {
            Boundary::Open if g < self.n => Some((g, g + 1)),
            Boundary::Open => None,
            Boundary::Periodic => Some((g, (g + 1) % self.n)),
        }
    }

    fn step_cost(&self, s: usize, site: usize) -> u32 {
        self.cost[self.bond[s][site]]
    }

    /// Horizontal relaxation of `h` at slice `s`.
    fn relax(&self, s: usize, h: &mut [u32]) {
        let g = self.gap_count();
        let passes = if self.boundary == Boundary::Periodic { 2 } else { 1 };
        for _ in 0..passes {
            for a in 0..g {
                if let Some((site, b)) = self.right_step(a) {
                    let c = self.step_cost(s, site);
                    h[b] = h[b].min(h[a].saturating_add(c));
                }
            }
            for a in (0..g).rev() {
                if let Some((site, b)) = self.right_step(a) {
                    let c = self.step_cost(s, site);
                    h[a] = h[a].min(h[b].saturating_add(c));
                }
            }
        }
    }

    fn check_gap(&self, y: usize) -> Result<()> {
        if y >= self.gap_count() {
            return Err(Error::InvalidRegion(format!("gap {y} out of range")));
        }
        Ok(())
    }

    /// Directed costs from the top node `y` to every node, slice by slice
    /// downward; `out[s][g]`.
    fn directed_from_top(&self, y: usize) -> Vec<Vec<u32>> {
        let g = self.gap_count();
        let mut out = vec![vec![INF; g]; self.slices + 1];
        let mut h = vec![INF; g];
        h[y] = 0;
        self.relax(self.slices, &mut h);
        out[self.slices] = h.clone();
        for s in (1..=self.slices).rev() {
            for (gap, v) in h.iter_mut().enumerate() {
                if self.blocked[s - 1][gap] {
                    *v = INF;
                }
            }
            self.relax(s - 1, &mut h);
            out[s - 1] = h.clone();
        }
        out
    }

    /// Minimal cut separating the final-time region on one side of gap `y`
    /// (open chains only).
    pub fn min_cut_point(&self, y: usize, conv: CutConvention) -> Result<CutResult> {
        self.check_gap(y)?;
        if self.boundary == Boundary::Periodic {
            return Err(Error::InvalidRegion("a ring needs two cut endpoints".into()));
        }
        let bonds = match conv {
            CutConvention::Directed => {
                let d = self.directed_from_top(y);
                let bonds = *d[0].iter().min().expect("gaps");
                let path = self.directed_path(&d);
                return Ok(CutResult { bonds, cost: bonds as f64 * self.ln_q, path });
            }
            CutConvention::Undirected => {
                let d = self.bfs(y);
                d[self.sink()]
            }
        };
        Ok(CutResult { bonds, cost: bonds as f64 * self.ln_q, path: vec![] })
    }

    /// Reconstructs the leftmost optimal directed path. Returns the gap at
    /// which it leaves each slice, from the top slice down to slice 0.
    fn directed_path(&self, d: &[Vec<u32>]) -> Vec<(usize, usize)> {
        // Backward pass: cost-to-bottom from every node.
        let g = self.gap_count();
        let mut below = vec![vec![0u32; g]; self.slices + 1];
        let mut h = vec![0u32; g];
        below[0] = h.clone();
        for s in 1..=self.slices {
            for (gap, v) in h.iter_mut().enumerate() {
                if self.blocked[s - 1][gap] {
                    *v = INF;
                }
            }
            self.relax(s, &mut h);
            below[s] = h.clone();
        }
        let total = d[0].iter().min().copied().unwrap_or(INF);
        let mut path = Vec::with_capacity(self.slices + 1);
        let mut s = self.slices;
        loop {
            // Leftmost gap on an optimal path at this slice from which the
            // path descends (or ends at slice 0).
            let next = (0..g)
                .find(|&gap| {
                    let descend = if s == 0 { 0 } else if self.blocked[s - 1][gap] { INF } else { below[s - 1][gap] };
                    d[s][gap] < INF && descend < INF && d[s][gap] + descend == total
                })
                .expect("an optimal path exists");
            path.push((s, next));
            if s == 0 {
                break;
            }
            s -= 1;
        }
        path
    }

    /// Minimal cut for the final-time region between gaps `y1 < y2`.
    pub fn min_cut_region(&self, y1: usize, y2: usize, conv: CutConvention) -> Result<CutResult> {
        self.check_gap(y1)?;
        self.check_gap(y2)?;
        if y1 == y2 {
            return Err(Error::InvalidRegion("empty region".into()));
        }
        let bonds = match conv {
            CutConvention::Directed => {
                let a = self.directed_from_top(y1);
                let b = self.directed_from_top(y2);
                let apart = a[0].iter().min().expect("gaps").saturating_add(*b[0].iter().min().expect("gaps"));
                let joined = a
                    .iter()
                    .zip(&b)
                    .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.saturating_add(*y)))
                    .min()
                    .unwrap_or(INF);
                apart.min(joined)
            }
            CutConvention::Undirected => {
                let d = self.bfs(y1);
                let d2 = self.bfs(y2);
                (d[self.sink()].saturating_add(d2[self.sink()])).min(d[self.node(self.slices, y2)])
            }
        };
        if bonds >= INF {
            return Err(Error::InvalidRegion("cut endpoints are disconnected".into()));
        }
        Ok(CutResult { bonds, cost: bonds as f64 * self.ln_q, path: vec![] })
    }

    fn node(&self, s: usize, g: usize) -> usize {
        s * self.gap_count() + g
    }

    fn sink(&self) -> usize {
        (self.slices + 1) * self.gap_count()
    }

    /// 0-1 breadth-first search over the undirected dual graph from the top
    /// node at gap `y`; the last entry is the initial-state sink.
    fn bfs(&self, y: usize) -> Vec<u32> {
        let g = self.gap_count();
        let total = self.sink() + 1;
        let mut dist = vec![INF; total];
        let mut dq = VecDeque::new();
        let start = self.node(self.slices, y);
        dist[start] = 0;
        dq.push_back(start);
        while let Some(u) = dq.pop_front() {
            let du = dist[u];
            if u == self.sink() {
                continue;
            }
            let (s, gap) = (u / g, u % g);
            let mut visit = |v: usize, w: u32, dq: &mut VecDeque<usize>| {
                let nd = du + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    if w == 0 {
                        dq.push_front(v);
                    } else {
                        dq.push_back(v);
                    }
                }
            };
            if s == 0 {
                visit(self.sink(), 0, &mut dq);
            }
            if let Some((site, b)) = self.right_step(gap) {
                visit(self.node(s, b), self.step_cost(s, site), &mut dq);
            }
            let left = match self.boundary {
                Boundary::Open if gap > 0 => Some(gap - 1),
                Boundary::Open => None,
                Boundary::Periodic => Some((gap + self.n - 1) % self.n),
            };
            if let Some(a) = left {
                let (site, _) = self.right_step(a).expect("left neighbour exists");
                visit(self.node(s, a), self.step_cost(s, site), &mut dq);
            }
            if s > 0 && !self.blocked[s - 1][gap] {
                visit(self.node(s - 1, gap), 0, &mut dq);
            }
            if s < self.slices && !self.blocked[s][gap] {
                visit(self.node(s + 1, gap), 0, &mut dq);
            }
        }
        dist
    }
}
