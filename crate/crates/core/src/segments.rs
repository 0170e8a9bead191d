//! Distribution of offer types across subscriber segments.
//!
//! Rows are offer types, columns are segments, `probs[i][j]` is the
//! acceptance probability of offer `i` in segment `j`. Both programs
//! maximize the expected number of acceptances `sum p[i][j] * x[i][j]` over
//! non-negative integer allocations:
//!
//! * count mode: `sum_j x[i][j] <= K_i` and `sum_i x[i][j] <= M_j`, solved
//!   exactly as a min-cost flow on the transportation network;
//! * budget mode: `v_i * sum_j x[i][j] <= B_i` and `sum_i v_i x[i][j] <= W_j`,
//!   solved exactly by depth-first branch-and-bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn validate_probs(probs: &[Vec<f64>], k: usize, m: usize) -> Result<()> {
    if probs.len() != k {
        return Err(Error::InvalidInstance(format!(
            "probs has {} rows, expected {k}",
            probs.len()
        )));
    }
    for (i, row) in probs.iter().enumerate() {
        if row.len() != m {
            return Err(Error::InvalidInstance(format!(
                "probs row {i} has {} entries, expected {m}",
                row.len()
            )));
        }
        if let Some((j, p)) = row
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::InvalidInstance(format!(
                "probs[{i}][{j}] = {p} is not a probability"
            )));
        }
    }
    Ok(())
}

pub(crate) fn allocation_objective(probs: &[Vec<f64>], x: &[Vec<u64>]) -> f64 {
    probs
        .iter()
        .zip(x)
        .flat_map(|(pr, xr)| pr.iter().zip(xr).map(|(p, &c)| p * c as f64))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentInstance {
    pub probs: Vec<Vec<f64>>,
    /// `K_i`, units of each offer type.
    pub row_caps: Vec<u64>,
    /// `M_j`, maximum offers per segment.
    pub col_caps: Vec<u64>,
}

impl SegmentInstance {
    pub fn new(probs: Vec<Vec<f64>>, row_caps: Vec<u64>, col_caps: Vec<u64>) -> Result<Self> {
        let inst = SegmentInstance {
            probs,
            row_caps,
            col_caps,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        validate_probs(&self.probs, self.row_caps.len(), self.col_caps.len())
    }

    pub fn k(&self) -> usize {
        self.row_caps.len()
    }

    pub fn m(&self) -> usize {
        self.col_caps.len()
    }

    pub fn is_feasible(&self, x: &[Vec<u64>]) -> bool {
        x.len() == self.k()
            && x.iter().all(|r| r.len() == self.m())
            && x.iter()
                .zip(&self.row_caps)
                .all(|(r, &cap)| r.iter().sum::<u64>() <= cap)
            && (0..self.m()).all(|j| x.iter().map(|r| r[j]).sum::<u64>() <= self.col_caps[j])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetInstance {
    pub probs: Vec<Vec<f64>>,
    /// `v_i`, value of one unit of offer type `i`.
    pub values: Vec<f64>,
    /// `B_i`, budget per offer type.
    pub row_budgets: Vec<f64>,
    /// `W_j`, budget per segment.
    pub col_budgets: Vec<f64>,
}

fn budget_tol(budget: f64) -> f64 {
    1e-9 * budget.abs().max(1.0)
}

/// Largest integer `c` with `value * c <= room + tol(budget)`.
fn max_units(room: f64, budget: f64, value: f64) -> u64 {
    let limit = room + budget_tol(budget);
    if limit < 0.0 {
        return 0;
    }
    let mut c = (limit / value).floor() as u64;
    while c > 0 && value * c as f64 > limit {
        c -= 1;
    }
    while value * (c + 1) as f64 <= limit {
        c += 1;
    }
    c
}

impl BudgetInstance {
    pub fn new(
        probs: Vec<Vec<f64>>,
        values: Vec<f64>,
        row_budgets: Vec<f64>,
        col_budgets: Vec<f64>,
    ) -> Result<Self> {
        let inst = BudgetInstance {
            probs,
            values,
            row_budgets,
            col_budgets,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Budgets derived from a count instance with one common unit value:
    /// `B_i = v K_i`, `W_j = v M_j`.
    pub fn from_counts(inst: &SegmentInstance, value: f64) -> Result<Self> {
        Self::new(
            inst.probs.clone(),
            vec![value; inst.k()],
            inst.row_caps.iter().map(|&c| value * c as f64).collect(),
            inst.col_caps.iter().map(|&c| value * c as f64).collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.values.len();
        if self.row_budgets.len() != k {
            return Err(Error::InvalidInstance(format!(
                "{} row budgets for {k} offer types",
                self.row_budgets.len()
            )));
        }
        validate_probs(&self.probs, k, self.col_budgets.len())?;
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "offer value {v} must be positive"
            )));
        }
        if let Some(b) = self
            .row_budgets
            .iter()
            .chain(&self.col_budgets)
            .find(|b| !(b.is_finite() && **b >= 0.0))
        {
            return Err(Error::InvalidInstance(format!(
                "budget {b} must be non-negative"
            )));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.col_budgets.len()
    }

    /// Units of type `i` the row budget alone allows.
    pub fn row_units(&self, i: usize) -> u64 {
        max_units(self.row_budgets[i], self.row_budgets[i], self.values[i])
    }

    /// Per-variable upper bound `min(B_i / v_i, W_j / v_i)`, floored.
    pub fn var_bound(&self, i: usize, j: usize) -> u64 {
        self.row_units(i).min(max_units(
            self.col_budgets[j],
            self.col_budgets[j],
            self.values[i],
        ))
    }

    pub fn is_feasible(&self, x: &[Vec<u64>]) -> bool {
        if x.len() != self.k() || x.iter().any(|r| r.len() != self.m()) {
            return false;
        }
        let rows_ok = x.iter().enumerate().all(|(i, r)| {
            let spend = self.values[i] * r.iter().sum::<u64>() as f64;
            spend <= self.row_budgets[i] + budget_tol(self.row_budgets[i])
        });
        rows_ok
            && (0..self.m()).all(|j| {
                let spend: f64 = (0..self.k()).map(|i| self.values[i] * x[i][j] as f64).sum();
                spend <= self.col_budgets[j] + budget_tol(self.col_budgets[j])
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationMatrix {
    pub x: Vec<Vec<u64>>,
    pub objective: f64,
}

impl AllocationMatrix {
    pub fn from_counts(probs: &[Vec<f64>], x: Vec<Vec<u64>>) -> Self {
        let objective = allocation_objective(probs, &x);
        AllocationMatrix { x, objective }
    }

    /// Column `j`: the units of each offer type granted to segment `j`.
    pub fn column(&self, j: usize) -> Vec<u64> {
        self.x.iter().map(|r| r[j]).collect()
    }
}

// ---- count mode: min-cost flow ----

const COST_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    residual: u64,
    cost: f64,
    twin: usize,
}

#[derive(Debug, Default)]
struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    fn link(&mut self, from: usize, to: usize, cap: u64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to,
            residual: cap,
            cost,
            twin: id + 1,
        });
        self.arcs.push(Arc {
            to: from,
            residual: 0,
            cost: -cost,
            twin: id,
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    fn nodes(&self) -> usize {
        self.out.len()
    }

    /// Shortest distances from `source` over residual arcs; used once to
    /// seed the potentials because the initial costs are negative.
    fn bellman_ford(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.nodes()];
        dist[source] = 0.0;
        for _ in 0..self.nodes() {
            let mut changed = false;
            for u in 0..self.nodes() {
                if dist[u].is_infinite() {
                    continue;
                }
                for &a in &self.out[u] {
                    let arc = &self.arcs[a];
                    if arc.residual > 0 && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    /// Dijkstra on reduced costs (dense version; the networks are small).
    fn dijkstra(&self, source: usize, potential: &[f64]) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![None; n];
        let mut done = vec![false; n];
        dist[source] = 0.0;
        while let Some(u) = (0..n)
            .filter(|&u| !done[u] && dist[u].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        {
            done[u] = true;
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.residual == 0 || done[arc.to] {
                    continue;
                }
                let reduced = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
                if dist[u] + reduced < dist[arc.to] {
                    dist[arc.to] = dist[u] + reduced;
                    via[arc.to] = Some(a);
                }
            }
        }
        (dist, via)
    }

    /// Successive shortest paths, augmenting only while a path has negative
    /// cost.
    fn max_profit_flow(&mut self, source: usize, sink: usize) {
        let mut potential: Vec<f64> = self
            .bellman_ford(source)
            .into_iter()
            .map(|d| if d.is_finite() { d } else { 0.0 })
            .collect();
        loop {
            let (dist, via) = self.dijkstra(source, &potential);
            if dist[sink].is_infinite() {
                break;
            }
            for (p, d) in potential.iter_mut().zip(&dist) {
                if d.is_finite() {
                    *p += d;
                }
            }
            let path_cost = potential[sink] - potential[source];
            if path_cost >= -COST_EPS {
                break;
            }
            let mut bottleneck = u64::MAX;
            let mut v = sink;
            while let Some(a) = via[v] {
                bottleneck = bottleneck.min(self.arcs[a].residual);
                v = self.arcs[self.arcs[a].twin].to;
            }
            let mut v = sink;
            while let Some(a) = via[v] {
                self.arcs[a].residual -= bottleneck;
                let twin = self.arcs[a].twin;
                self.arcs[twin].residual += bottleneck;
                v = self.arcs[twin].to;
            }
        }
    }
}

/// Exactly optimal count allocation via min-cost flow.
pub fn solve_count_allocation(instance: &SegmentInstance) -> Result<AllocationMatrix> {
    instance.validate()?;
    let (k, m) = (instance.k(), instance.m());
    let source = 0;
    let sink = k + m + 1;
    let mut net = FlowNetwork::new(k + m + 2);
    for (i, &cap) in instance.row_caps.iter().enumerate() {
        net.link(source, 1 + i, cap, 0.0);
    }
    let middle: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let cap = instance.row_caps[i].min(instance.col_caps[j]);
                    net.link(1 + i, 1 + k + j, cap, -instance.probs[i][j])
                })
                .collect()
        })
        .collect();
    for (j, &cap) in instance.col_caps.iter().enumerate() {
        net.link(1 + k + j, sink, cap, 0.0);
    }
    net.max_profit_flow(source, sink);
    let x = middle
        .iter()
        .map(|row| {
            row.iter()
                .map(|&a| net.arcs[net.arcs[a].twin].residual)
                .collect()
        })
        .collect();
    Ok(AllocationMatrix::from_counts(&instance.probs, x))
}

// ---- budget mode: branch-and-bound ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchBoundOptions {
    /// Search stops after this many nodes and returns the best allocation
    /// found so far, flagged incomplete.
    pub node_limit: u64,
}

impl Default for BranchBoundOptions {
    fn default() -> Self {
        BranchBoundOptions {
            node_limit: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSolution {
    pub allocation: AllocationMatrix,
    /// False when the node limit cut the search short.
    pub complete: bool,
    pub nodes: u64,
}

/// Fractional transportation LP over spend: maximize `sum r[i][j] * y[i][j]`
/// with row sums `<= supply[i]`, column sums `<= demand[j]` and
/// `0 <= y[i][j] <= cap[i][j]`. Dense successive shortest paths.
struct SpendLp {
    k: usize,
    m: usize,
    // residual capacity and cost, row-major over k + m + 2 nodes
    cap: Vec<f64>,
    cost: Vec<f64>,
    pot: Vec<f64>,
    dist: Vec<f64>,
    prev: Vec<usize>,
    done: Vec<bool>,
}

impl SpendLp {
    fn new(k: usize, m: usize) -> Self {
        let v = k + m + 2;
        SpendLp {
            k,
            m,
            cap: vec![0.0; v * v],
            cost: vec![0.0; v * v],
            pot: vec![0.0; v],
            dist: vec![0.0; v],
            prev: vec![0; v],
            done: vec![false; v],
        }
    }

    fn nodes(&self) -> usize {
        self.k + self.m + 2
    }

    /// Spend on cell `(i, j)` in the last solution.
    fn flow(&self, i: usize, j: usize) -> f64 {
        let n = self.nodes();
        self.cap[(1 + self.k + j) * n + 1 + i]
    }

    fn solve(
        &mut self,
        rate: &[Vec<f64>],
        cell_cap: &[Vec<f64>],
        supply: &[f64],
        demand: &[f64],
    ) -> f64 {
        let (k, m, n) = (self.k, self.m, self.nodes());
        let (s, t) = (0, n - 1);
        self.cap.fill(0.0);
        self.cost.fill(0.0);
        for (i, &v) in supply.iter().enumerate() {
            self.cap[s * n + 1 + i] = v.max(0.0);
        }
        for (j, &v) in demand.iter().enumerate() {
            self.cap[(1 + k + j) * n + t] = v.max(0.0);
        }
        self.pot.fill(0.0);
        for i in 0..k {
            for j in 0..m {
                let (u, v) = (1 + i, 1 + k + j);
                self.cap[u * n + v] = cell_cap[i][j];
                self.cost[u * n + v] = -rate[i][j];
                self.cost[v * n + u] = rate[i][j];
                if cell_cap[i][j] > 0.0 {
                    self.pot[v] = self.pot[v].min(-rate[i][j]);
                }
            }
        }
        self.pot[t] = (0..m).map(|j| self.pot[1 + k + j]).fold(0.0, f64::min);

        let mut total = 0.0;
        loop {
            self.dist.fill(f64::INFINITY);
            self.done.fill(false);
            self.dist[s] = 0.0;
            loop {
                let mut u = usize::MAX;
                for v in 0..n {
                    if !self.done[v]
                        && self.dist[v].is_finite()
                        && (u == usize::MAX || self.dist[v] < self.dist[u])
                    {
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                self.done[u] = true;
                for v in 0..n {
                    if self.done[v] || self.cap[u * n + v] <= CAP_EPS {
                        continue;
                    }
                    let d =
                        self.dist[u] + (self.cost[u * n + v] + self.pot[u] - self.pot[v]).max(0.0);
                    if d < self.dist[v] {
                        self.dist[v] = d;
                        self.prev[v] = u;
                    }
                }
            }
            if !self.dist[t].is_finite() {
                break;
            }
            for v in 0..n {
                if self.dist[v].is_finite() {
                    self.pot[v] += self.dist[v];
                }
            }
            let path_cost = self.pot[t] - self.pot[s];
            if path_cost >= -COST_EPS {
                break;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let u = self.prev[v];
                push = push.min(self.cap[u * n + v]);
                v = u;
            }
            let mut v = t;
            while v != s {
                let u = self.prev[v];
                self.cap[u * n + v] -= push;
                self.cap[v * n + u] += push;
                v = u;
            }
            total -= path_cost * push;
        }
        total
    }
}

const CAP_EPS: f64 = 1e-12;

struct Search<'a> {
    inst: &'a BudgetInstance,
    vars: Vec<(usize, usize)>,
    // best_p[d][i]: largest p in row i among vars[d..]
    best_p: Vec<Vec<f64>>,
    // depth at which (i, j) is branched on, usize::MAX if never
    var_depth: Vec<Vec<usize>>,
    // per segment, rows by p / v descending
    col_order: Vec<Vec<usize>>,
    rate: Vec<Vec<f64>>,
    cell_cap: Vec<Vec<f64>>,
    supply: Vec<f64>,
    lp: SpendLp,
    row_left: Vec<u64>,
    col_room: Vec<f64>,
    x: Vec<Vec<u64>>,
    value: f64,
    best: f64,
    best_x: Vec<Vec<u64>>,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

impl Search<'_> {
    fn row_bound(&self, depth: usize) -> f64 {
        self.row_left
            .iter()
            .zip(&self.best_p[depth])
            .map(|(&units, &p)| units as f64 * p)
            .sum()
    }

    fn prunable(&mut self, depth: usize) -> bool {
        let cheap = self.row_bound(depth).min(self.column_bound(depth));
        if self.value + cheap <= self.best + COST_EPS {
            return true;
        }
        self.value + self.lp_bound(depth) <= self.best + COST_EPS
    }

    // plain LP relaxation, no rounding of the cell bounds
    fn relaxed_bound(&mut self, depth: usize) -> f64 {
        for (i, row) in self.cell_cap.iter_mut().enumerate() {
            self.supply[i] = self.row_left[i] as f64 * self.inst.values[i];
            for (j, cell) in row.iter_mut().enumerate() {
                let d = self.var_depth[i][j];
                *cell = if d == usize::MAX || d < depth {
                    0.0
                } else {
                    f64::INFINITY
                };
            }
        }
        self.lp
            .solve(&self.rate, &self.cell_cap, &self.supply, &self.col_room)
    }

    fn lp_bound(&mut self, depth: usize) -> f64 {
        let inst = self.inst;
        for (i, row) in self.cell_cap.iter_mut().enumerate() {
            let v = inst.values[i];
            self.supply[i] = self.row_left[i] as f64 * v;
            for (j, cell) in row.iter_mut().enumerate() {
                let d = self.var_depth[i][j];
                *cell = if d == usize::MAX || d < depth {
                    0.0
                } else {
                    let units =
                        self.row_left[i].min(max_units(self.col_room[j], inst.col_budgets[j], v));
                    units as f64 * v
                };
            }
        }
        self.lp
            .solve(&self.rate, &self.cell_cap, &self.supply, &self.col_room)
    }

    // segment budgets kept, offer-type budgets only cap each cell
    fn column_bound(&self, depth: usize) -> f64 {
        let mut total = 0.0;
        for (j, order) in self.col_order.iter().enumerate() {
            let mut room = self.col_room[j].max(0.0);
            for &i in order {
                if room <= 0.0 {
                    break;
                }
                let d = self.var_depth[i][j];
                if d == usize::MAX || d < depth {
                    continue;
                }
                let v = self.inst.values[i];
                let spend = room.min(self.row_left[i] as f64 * v);
                total += spend / v * self.inst.probs[i][j];
                room -= spend;
            }
        }
        total
    }

    /// Returns false when the node was cut by its bound.
    fn dfs(&mut self, depth: usize) -> bool {
        if self.aborted {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return true;
        }
        if self.value > self.best {
            self.best = self.value;
            self.best_x.clone_from(&self.x);
        }
        if depth == self.vars.len() {
            return true;
        }
        if self.prunable(depth) {
            return false;
        }
        let (i, j) = self.vars[depth];
        let v = self.inst.values[i];
        let top = self.row_left[i].min(max_units(self.col_room[j], self.inst.col_budgets[j], v));

        // The LP value with x[i][j] pinned to c is concave in c and peaks at
        // the relaxed optimum, so sweep away from the peak in both
        // directions and stop each sweep at the first child it cannot beat.
        self.relaxed_bound(depth);
        let peak = ((self.lp.flow(i, j) / v).floor() as u64).min(top);
        let (saved_value, saved_room) = (self.value, self.col_room[j]);
        for c in (0..=peak).rev() {
            if !self.child(depth, c, saved_value, saved_room, true) {
                break;
            }
        }
        for c in peak + 1..=top {
            if !self.child(depth, c, saved_value, saved_room, false) {
                break;
            }
        }
        self.x[i][j] = 0;
        self.value = saved_value;
        self.col_room[j] = saved_room;
        true
    }

    /// Explores `x[i][j] = c`; false means the sweep can stop.
    fn child(
        &mut self,
        depth: usize,
        c: u64,
        saved_value: f64,
        saved_room: f64,
        downward: bool,
    ) -> bool {
        if self.aborted {
            return false;
        }
        let (i, j) = self.vars[depth];
        let v = self.inst.values[i];
        self.x[i][j] = c;
        self.row_left[i] -= c;
        self.col_room[j] = saved_room - v * c as f64;
        self.value = saved_value + self.inst.probs[i][j] * c as f64;
        // going down, the row bound only shrinks
        let more = if downward && self.value + self.row_bound(depth + 1) <= self.best + COST_EPS {
            false
        } else {
            self.dfs(depth + 1) || self.value + self.relaxed_bound(depth + 1) > self.best + COST_EPS
        };
        self.row_left[i] += c;
        more && !self.aborted
    }
}

/// Exactly optimal budget allocation via branch-and-bound.
///
/// Nodes are pruned by the smaller of two cheap relaxations (drop the
/// segment budgets, or drop the offer-type budgets) and, failing that, by the
/// LP relaxation, which measured in spend is a transportation problem.
pub fn solve_budget_allocation(
    instance: &BudgetInstance,
    options: &BranchBoundOptions,
) -> Result<BudgetSolution> {
    instance.validate()?;
    let (k, m) = (instance.k(), instance.m());
    let mut vars: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| instance.probs[i][j] > 0.0 && instance.var_bound(i, j) > 0)
        .collect();
    vars.sort_by(|a, b| instance.probs[b.0][b.1].total_cmp(&instance.probs[a.0][a.1]));

    let mut best_p = vec![vec![0.0f64; k]; vars.len() + 1];
    for d in (0..vars.len()).rev() {
        best_p[d] = best_p[d + 1].clone();
        let (i, j) = vars[d];
        best_p[d][i] = best_p[d][i].max(instance.probs[i][j]);
    }

    let mut var_depth = vec![vec![usize::MAX; m]; k];
    for (d, &(i, j)) in vars.iter().enumerate() {
        var_depth[i][j] = d;
    }
    let col_order = (0..m)
        .map(|j| {
            let mut rows: Vec<usize> = (0..k).collect();
            let ratio = |i: usize| instance.probs[i][j] / instance.values[i];
            rows.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
            rows
        })
        .collect();

    let mut search = Search {
        inst: instance,
        vars,
        best_p,
        var_depth,
        col_order,
        rate: (0..k)
            .map(|i| {
                (0..m)
                    .map(|j| instance.probs[i][j] / instance.values[i])
                    .collect()
            })
            .collect(),
        cell_cap: vec![vec![0.0; m]; k],
        supply: vec![0.0; k],
        lp: SpendLp::new(k, m),
        row_left: (0..k).map(|i| instance.row_units(i)).collect(),
        col_room: instance.col_budgets.clone(),
        x: vec![vec![0; m]; k],
        value: 0.0,
        best: 0.0,
        best_x: vec![vec![0; m]; k],
        nodes: 0,
        limit: options.node_limit,
        aborted: false,
    };
    search.dfs(0);
    Ok(BudgetSolution {
        allocation: AllocationMatrix::from_counts(&instance.probs, search.best_x),
        complete: !search.aborted,
        nodes: search.nodes,
    })
}
