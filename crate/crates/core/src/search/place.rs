//! Placement search: all graphs with a given size profile that are UPBs.
//!
//! Qubits are placed one at a time. Vertices that received the same regions
//! on every placed qubit form a *cell*; cells are contiguous index ranges and
//! their members are interchangeable, so placing a qubit amounts to choosing
//! a contingency table (cells x regions) whose row sums are the cell sizes and
//! whose column sums are the region sizes. Within a cell, vertices are handed
//! to regions in column order.
//!
//! Swapping the two equal sides of a component, or two components of the same
//! type, maps tables to tables; only the lexicographically largest table of
//! each such orbit is visited. Remaining duplicates (symmetries of earlier
//! qubits, qubit permutations) are left to canonical deduplication.

use std::sync::atomic::{AtomicBool, Ordering};

use itertools::Itertools;
use serde::Serialize;

use super::profiles::water_level;
use crate::graph::{OrthogonalityGraph, QubitFactorization, SizeProfile};

/// Largest state count the placement search handles.
pub const MAX_STATES: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PlacementStats {
    /// Search nodes (complete placements of a qubit prefix) visited.
    pub nodes: u64,
    /// Complete assignments that passed every prune and were checked.
    pub leaves: u64,
    pub emitted: u64,
    /// Completed table rows, per placed qubit.
    pub rows: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct PlacementResult {
    pub graphs: Vec<OrthogonalityGraph>,
    pub stats: PlacementStats,
    pub cancelled: bool,
}

#[derive(Clone, Copy, Debug)]
enum Constraint {
    /// Column `x` >= column `y` lexicographically (equal sides of a component).
    Swap { x: usize, y: usize },
    /// `(x1, y1)` >= `(x2, y2)` as concatenated columns (two components of
    /// the same type); `y` columns are absent for unmatched regions.
    Order {
        x1: usize,
        y1: Option<usize>,
        x2: usize,
        y2: Option<usize>,
    },
}

struct QubitPlan {
    /// Profile index of this qubit.
    index: usize,
    sizes: Vec<usize>,
    partner: Vec<Option<usize>>,
    constraints: Vec<Constraint>,
}

impl QubitPlan {
    fn new(index: usize, comps: &[(usize, usize)]) -> Self {
        let mut sizes = Vec::new();
        let mut partner = Vec::new();
        let mut cols: Vec<(usize, Option<usize>)> = Vec::new();
        for &(a, b) in comps {
            let x = sizes.len();
            sizes.push(a);
            partner.push(None);
            let y = if b > 0 {
                sizes.push(b);
                partner.push(Some(x));
                partner[x] = Some(x + 1);
                Some(x + 1)
            } else {
                None
            };
            cols.push((x, y));
        }
        let mut constraints = Vec::new();
        for (j, &(a, b)) in comps.iter().enumerate() {
            if a == b {
                constraints.push(Constraint::Swap {
                    x: cols[j].0,
                    y: cols[j].1.expect("a == b >= 1 is two-sided"),
                });
            }
            if j + 1 < comps.len() && comps[j + 1] == (a, b) {
                constraints.push(Constraint::Order {
                    x1: cols[j].0,
                    y1: cols[j].1,
                    x2: cols[j + 1].0,
                    y2: cols[j + 1].1,
                });
            }
        }
        QubitPlan {
            index,
            sizes,
            partner,
            constraints,
        }
    }

    fn max_side(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    fn edges(&self) -> usize {
        (0..self.sizes.len())
            .filter_map(|r| self.partner[r].filter(|&o| o > r).map(|o| self.sizes[r] * self.sizes[o]))
            .sum()
    }
}

struct Level {
    /// Region masks of this qubit.
    masks: Vec<u64>,
    cells: Vec<(usize, usize)>,
    adj: Vec<u64>,
}

struct Searcher<'a> {
    s: usize,
    full: u64,
    plans: Vec<QubitPlan>,
    /// `thresholds[k]`: covering this many states using the first `k` placed
    /// qubits forces an extension whatever the rest looks like.
    thresholds: Vec<usize>,
    rem_edges: Vec<usize>,
    rem_max_side: Vec<usize>,
    levels: Vec<Level>,
    out: Vec<OrthogonalityGraph>,
    stats: PlacementStats,
    cancel: Option<&'a AtomicBool>,
    cancelled: bool,
    /// Region of each vertex on the last two qubits, while they are placed.
    region_of: [Vec<usize>; 2],
}

/// Smallest number of covered states from which the guaranteed greedy chain
/// through `rest` (best order) reaches `s`.
fn threshold(s: usize, rest: &[&QubitPlan]) -> usize {
    if rest.is_empty() {
        return s;
    }
    let sides: Vec<Vec<usize>> = rest.iter().map(|q| q.sizes.clone()).collect();
    let orders: Vec<Vec<usize>> = if rest.len() <= 6 {
        (0..rest.len()).permutations(rest.len()).collect()
    } else {
        vec![(0..rest.len()).collect()]
    };
    (0..=s)
        .find(|&u| {
            orders.iter().any(|order| {
                let mut covered = u;
                for &i in order {
                    if covered >= s {
                        break;
                    }
                    covered += water_level(&sides[i], covered).min(s - covered);
                }
                covered >= s
            })
        })
        .unwrap_or(s)
}

impl Searcher<'_> {
    fn check_cancel(&mut self) -> bool {
        if !self.cancelled && self.stats.nodes.is_multiple_of(1024) {
            if let Some(flag) = self.cancel {
                if flag.load(Ordering::Relaxed) {
                    self.cancelled = true;
                }
            }
        }
        self.cancelled
    }

    fn run(&mut self) {
        let cells = vec![(0, self.s)];
        let adj = vec![0u64; self.s];
        self.place(0, &cells, &adj);
    }

    fn place(&mut self, k: usize, cells: &[(usize, usize)], adj: &[u64]) {
        let m = self.plans[k].sizes.len();
        let mut table = vec![0usize; cells.len() * m];
        let mut caps = self.plans[k].sizes.clone();
        let mut status = vec![false; self.plans[k].constraints.len()];
        self.fill_row(k, cells, adj, 0, &mut table, &mut caps, &mut status);
    }

    /// Enumerates the entries of row `row` and recurses into later rows.
    #[allow(clippy::too_many_arguments)]
    fn fill_row(
        &mut self,
        k: usize,
        cells: &[(usize, usize)],
        adj: &[u64],
        row: usize,
        table: &mut Vec<usize>,
        caps: &mut Vec<usize>,
        status: &mut Vec<bool>,
    ) {
        if self.cancelled {
            return;
        }
        if row == cells.len() {
            if self.final_constraints_hold(k, cells.len(), table, status) {
                self.complete(k, cells, adj, table);
            }
            return;
        }
        let m = self.plans[k].sizes.len();
        let len = cells[row].1;
        self.fill_entry(k, cells, adj, row, 0, len, table, caps, status, m);
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_entry(
        &mut self,
        k: usize,
        cells: &[(usize, usize)],
        adj: &[u64],
        row: usize,
        col: usize,
        left: usize,
        table: &mut Vec<usize>,
        caps: &mut Vec<usize>,
        status: &mut Vec<bool>,
        m: usize,
    ) {
        if col == m - 1 {
            if left > caps[col] {
                return;
            }
            table[row * m + col] = left;
            caps[col] -= left;
            let saved = status.clone();
            let remaining = self.plans.len() - k - 1;
            self.stats.rows[k] += 1;
            if self.row_constraints_hold(k, row, m, table, status)
                && match remaining {
                    0 => self.last_row_consistent(k, cells[row], adj, row, table, caps),
                    1 => self.penultimate_row_consistent(k, cells[row], adj, row, table, caps),
                    _ => true,
                }
            {
                self.fill_row(k, cells, adj, row + 1, table, caps, status);
            }
            *status = saved;
            caps[col] += left;
            return;
        }
        // Room left in later columns bounds how little this one may take.
        let room: usize = caps[col + 1..].iter().sum();
        let lo = left.saturating_sub(room);
        let hi = left.min(caps[col]);
        for n in (lo..=hi).rev() {
            table[row * m + col] = n;
            caps[col] -= n;
            self.fill_entry(k, cells, adj, row, col + 1, left - n, table, caps, status, m);
            caps[col] += n;
            if self.cancelled {
                return;
            }
        }
    }

    /// Lexicographic checks once row `row` is complete. `status[i]` turns true
    /// when constraint `i` is strictly satisfied by an earlier row.
    fn row_constraints_hold(&self, k: usize, row: usize, m: usize, table: &[usize], status: &mut [bool]) -> bool {
        for (i, c) in self.plans[k].constraints.iter().enumerate() {
            if status[i] {
                continue;
            }
            let (x, y) = match *c {
                Constraint::Swap { x, y } => (x, y),
                Constraint::Order { x1, x2, .. } => (x1, x2),
            };
            let (vx, vy) = (table[row * m + x], table[row * m + y]);
            if vx < vy {
                return false;
            }
            if vx > vy {
                status[i] = true;
            }
        }
        true
    }

    /// On the last qubit every missing pair must become an edge: a vertex in
    /// region `r` needs all its missing neighbours in the partner of `r`.
    fn last_row_consistent(
        &mut self,
        k: usize,
        (start, len): (usize, usize),
        adj: &[u64],
        row: usize,
        table: &[usize],
        caps: &[usize],
    ) -> bool {
        let plan = &self.plans[k];
        let m = plan.sizes.len();
        let mut v = start;
        for col in 0..m {
            for _ in 0..table[row * m + col] {
                self.region_of[1][v] = col;
                v += 1;
            }
        }
        let end = start + len;
        for v in start..end {
            let r = self.region_of[1][v];
            let missing = !adj[v] & self.full & !(1u64 << v);
            if missing == 0 {
                continue;
            }
            let Some(o) = plan.partner[r] else {
                return false;
            };
            let mut earlier = missing & ((1u64 << v) - 1);
            while earlier != 0 {
                let u = earlier.trailing_zeros() as usize;
                earlier &= earlier - 1;
                if self.region_of[1][u] != o {
                    return false;
                }
            }
            let later_outside = missing.checked_shr(end as u32).unwrap_or(0).count_ones() as usize;
            if later_outside > caps[o] {
                return false;
            }
        }
        true
    }

    /// Tie-breaks on the second columns of equal component pairs.
    fn final_constraints_hold(&self, k: usize, rows: usize, table: &[usize], status: &[bool]) -> bool {
        let m = self.plans[k].sizes.len();
        for (i, c) in self.plans[k].constraints.iter().enumerate() {
            if status[i] {
                continue;
            }
            if let Constraint::Order {
                y1: Some(y1),
                y2: Some(y2),
                ..
            } = *c
            {
                for r in 0..rows {
                    let (a, b) = (table[r * m + y1], table[r * m + y2]);
                    if a > b {
                        break;
                    }
                    if a < b {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn complete(&mut self, k: usize, cells: &[(usize, usize)], adj: &[u64], table: &[usize]) {
        self.stats.nodes += 1;
        if self.check_cancel() {
            return;
        }
        let plan = &self.plans[k];
        let m = plan.sizes.len();
        let mut masks = vec![0u64; m];
        let mut new_cells = Vec::with_capacity(cells.len() * 2);
        for (row, &(start, _)) in cells.iter().enumerate() {
            let mut offset = start;
            for col in 0..m {
                let n = table[row * m + col];
                if n > 0 {
                    masks[col] |= range_mask(offset, n);
                    new_cells.push((offset, n));
                    offset += n;
                }
            }
        }
        let remaining = self.plans.len() - k - 1;
        if remaining < 6 && new_cells.iter().any(|&(_, n)| n > 1 << remaining) {
            return;
        }
        let mut new_adj = adj.to_vec();
        for r in 0..m {
            if let Some(o) = plan.partner[r] {
                let other = masks[o];
                let mut bits = masks[r];
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    new_adj[v] |= other;
                }
            }
        }
        let mut missing_total = 0usize;
        for v in 0..self.s {
            let missing = (!new_adj[v] & self.full & !(1u64 << v)).count_ones() as usize;
            if missing > self.rem_max_side[k + 1] {
                return;
            }
            missing_total += missing;
        }
        if missing_total / 2 > self.rem_edges[k + 1] {
            return;
        }
        if k + 2 == self.plans.len() && !self.fits_one_qubit(k + 1, &new_adj) {
            return;
        }
        self.levels.push(Level {
            masks,
            cells: new_cells,
            adj: new_adj,
        });
        if !self.coverable(self.thresholds[k + 1]) {
            if k + 1 == self.plans.len() {
                self.stats.leaves += 1;
                self.emit();
            } else {
                let level = self.levels.last().unwrap();
                let (cells, adj) = (level.cells.clone(), level.adj.clone());
                self.place(k + 1, &cells, &adj);
            }
        }
        self.levels.pop();
    }

    /// One qubit after this one: the pairs missing after this qubit among the
    /// vertices placed so far must form a bipartite graph that fits the last
    /// qubit, and no vertex may be left with more missing pairs than the last
    /// qubit's largest side.
    fn penultimate_row_consistent(
        &mut self,
        k: usize,
        (start, len): (usize, usize),
        adj: &[u64],
        row: usize,
        table: &[usize],
        caps: &[usize],
    ) -> bool {
        let plan = &self.plans[k];
        let m = plan.sizes.len();
        let mut v = start;
        for col in 0..m {
            for _ in 0..table[row * m + col] {
                self.region_of[0][v] = col;
                v += 1;
            }
        }
        let end = start + len;
        let placed = range_mask(0, end);
        let mut masks = vec![0u64; m];
        for v in 0..end {
            masks[self.region_of[0][v]] |= 1u64 << v;
        }
        let last_max = self.plans[k + 1].max_side();
        let mut resid = vec![0u64; end];
        for v in 0..end {
            let r = self.region_of[0][v];
            let (covered, room) = match plan.partner[r] {
                Some(o) => (masks[o], caps[o]),
                None => (0, 0),
            };
            let missing = !adj[v] & self.full & !(1u64 << v) & !covered;
            resid[v] = missing & placed;
            let open = (missing & !placed).count_ones() as usize;
            if resid[v].count_ones() as usize + open.saturating_sub(room) > last_max {
                return false;
            }
        }
        self.residual_fits(k + 1, &resid)
    }

    /// Whether the graph `resid` (on its first `resid.len()` vertices) is
    /// bipartite with every component inside some `K_{a,b}` of qubit `k`.
    fn residual_fits(&self, k: usize, resid: &[u64]) -> bool {
        let plan = &self.plans[k];
        let n = resid.len();
        let mut side = [u8::MAX; MAX_STATES];
        let mut stack = Vec::new();
        for root in 0..n {
            if side[root] != u8::MAX || resid[root] == 0 {
                continue;
            }
            side[root] = 0;
            stack.push(root);
            let mut counts = [0usize; 2];
            while let Some(v) = stack.pop() {
                counts[side[v] as usize] += 1;
                let mut nb = resid[v];
                while nb != 0 {
                    let u = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    if side[u] == u8::MAX {
                        side[u] = 1 - side[v];
                        stack.push(u);
                    } else if side[u] == side[v] {
                        return false;
                    }
                }
            }
            let (x, y) = (counts[0].max(counts[1]), counts[0].min(counts[1]));
            let fits = (0..plan.sizes.len()).any(|r| {
                plan.partner[r].is_some_and(|o| {
                    let (a, b) = (plan.sizes[r], plan.sizes[o]);
                    x <= a.max(b) && y <= a.min(b)
                })
            });
            if !fits {
                return false;
            }
        }
        true
    }

    /// Whether the missing pairs can all be edges of qubit `k`.
    fn fits_one_qubit(&self, k: usize, adj: &[u64]) -> bool {
        let missing: Vec<u64> = (0..self.s).map(|v| !adj[v] & self.full & !(1u64 << v)).collect();
        self.residual_fits(k, &missing)
    }

    /// Whether one region per placed qubit can cover `target` states.
    fn coverable(&self, target: usize) -> bool {
        let lists: Vec<Vec<u64>> = self
            .levels
            .iter()
            .map(|l| {
                let mut v: Vec<u64> = l.masks.clone();
                v.sort_unstable_by_key(|m| std::cmp::Reverse(m.count_ones()));
                v
            })
            .collect();
        let mut suffix = vec![0usize; lists.len() + 1];
        for i in (0..lists.len()).rev() {
            suffix[i] = suffix[i + 1] + lists[i][0].count_ones() as usize;
        }
        fn rec(lists: &[Vec<u64>], suffix: &[usize], i: usize, cur: u64, target: usize) -> bool {
            let have = cur.count_ones() as usize;
            if have >= target {
                return true;
            }
            if i == lists.len() || have + suffix[i] < target {
                return false;
            }
            for &m in &lists[i] {
                if m & !cur != 0 && rec(lists, suffix, i + 1, cur | m, target) {
                    return true;
                }
            }
            rec(lists, suffix, i + 1, cur, target)
        }
        rec(&lists, &suffix, 0, 0, target)
    }

    fn emit(&mut self) {
        let p = self.plans.len();
        let mut qubits: Vec<Option<QubitFactorization>> = vec![None; p];
        for (k, level) in self.levels.iter().enumerate() {
            let plan = &self.plans[k];
            let regions: Vec<Vec<usize>> = level
                .masks
                .iter()
                .map(|&m| (0..self.s).filter(|&v| m >> v & 1 == 1).collect())
                .collect();
            let matching = (0..regions.len())
                .filter_map(|r| plan.partner[r].filter(|&o| o > r).map(|o| (r, o)))
                .collect();
            qubits[plan.index] = Some(QubitFactorization::new(regions, matching));
        }
        let g = OrthogonalityGraph::new(self.s, qubits.into_iter().map(|q| q.unwrap()).collect());
        debug_assert!(crate::checker::classify(&g).is_upb());
        self.stats.emitted += 1;
        self.out.push(g);
    }
}

fn range_mask(start: usize, n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        ((1u64 << n) - 1) << start
    }
}

/// Order in which qubits are placed: largest side first, then most edges.
/// Large regions split the vertices into few cells early, and the qubits
/// placed last are the ones whose tables the per-row checks prune hardest.
fn placement_order(pr: &SizeProfile) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pr.p()).collect();
    order.sort_by_key(|&q| {
        let comps = &pr.qubits[q];
        let max_side = comps.iter().map(|c| c.0).max().unwrap_or(0);
        let edges: usize = comps.iter().map(|c| c.0 * c.1).sum();
        (std::cmp::Reverse(max_side), std::cmp::Reverse(edges), q)
    });
    order
}

/// All UPB graphs with profile `pr`, with duplicates.
pub fn search_profile(pr: &SizeProfile) -> Vec<OrthogonalityGraph> {
    search_profile_with(pr, None).graphs
}

pub fn search_profile_with(pr: &SizeProfile, cancel: Option<&AtomicBool>) -> PlacementResult {
    let s = pr.s;
    assert!(s <= MAX_STATES, "placement search supports at most {MAX_STATES} states");
    let valid = pr.p() > 0
        && pr
            .qubits
            .iter()
            .all(|q| q.iter().map(|&(a, b)| a + b).sum::<usize>() == s && q.iter().all(|&(a, _)| a > 0));
    if !valid || s == 0 {
        return PlacementResult {
            graphs: Vec::new(),
            stats: PlacementStats::default(),
            cancelled: false,
        };
    }
    let order = placement_order(pr);
    let plans: Vec<QubitPlan> = order.iter().map(|&q| QubitPlan::new(q, &pr.qubits[q])).collect();
    let p = plans.len();
    let mut thresholds = vec![0; p + 1];
    let mut rem_edges = vec![0; p + 1];
    let mut rem_max_side = vec![0; p + 1];
    for k in 0..=p {
        let rest: Vec<&QubitPlan> = plans[k..].iter().collect();
        thresholds[k] = threshold(s, &rest);
        rem_edges[k] = rest.iter().map(|q| q.edges()).sum();
        rem_max_side[k] = rest.iter().map(|q| q.max_side()).sum();
    }
    let mut searcher = Searcher {
        s,
        full: range_mask(0, s),
        plans,
        thresholds,
        rem_edges,
        rem_max_side,
        levels: Vec::new(),
        out: Vec::new(),
        stats: PlacementStats::default(),
        cancel,
        cancelled: false,
        region_of: [vec![0; s], vec![0; s]],
    };
    searcher.stats.rows = vec![0; p];
    searcher.run();
    PlacementResult {
        graphs: searcher.out,
        stats: searcher.stats,
        cancelled: searcher.cancelled,
    }
}
