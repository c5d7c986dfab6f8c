use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{MetricMatrix, Optimality, PlanProblem, PlanSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    #[default]
    Exact,
    Bnb,
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Largest `C(M, J)` that [`solve_exact`] enumerates directly.
    pub enumeration_limit: u64,
    /// Expanded-node limit of the branch-and-bound search.
    pub node_budget: u64,
    /// Spots to seed the incumbent with (padded greedily up to `J`).
    pub warm_start: Option<Vec<usize>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            enumeration_limit: 10_000_000,
            node_budget: 2_000_000,
            warm_start: None,
        }
    }
}

/// Column-major copy of the matrix: `cols[m][u]`.
struct Columns {
    cols: Vec<Vec<f64>>,
    n_ues: usize,
}

impl Columns {
    fn new(m: &MetricMatrix) -> Self {
        let cols = (0..m.n_spots())
            .map(|t| (0..m.n_ues()).map(|u| m.get(u, t)).collect())
            .collect();
        Self { cols, n_ues: m.n_ues() }
    }

    fn n_spots(&self) -> usize {
        self.cols.len()
    }

    /// Per-UE best value over `set`; zero for an empty set.
    fn best(&self, set: &[usize]) -> Vec<f64> {
        let mut best = vec![0.0f64; self.n_ues];
        for &t in set {
            for (b, &v) in best.iter_mut().zip(&self.cols[t]) {
                *b = b.max(v);
            }
        }
        best
    }

    /// `sum_u max(best[u], R[u][t])`, summed in UE order.
    #[inline]
    fn total_with(&self, best: &[f64], t: usize) -> f64 {
        best.iter().zip(&self.cols[t]).map(|(b, v)| b.max(*v)).sum()
    }
}

/// `C(n, k)` saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

/// Proven optimum by enumeration when `C(M, J)` is within the limit, by
/// branch-and-bound otherwise.
pub fn solve_exact(problem: &PlanProblem<'_>, opts: &SolveOptions) -> Result<PlanSolution> {
    if binomial(problem.matrix.n_spots(), problem.irs_count) <= opts.enumeration_limit {
        Ok(solve_enumerate(problem))
    } else {
        solve_bnb(problem, opts)
    }
}

pub fn solve(problem: &PlanProblem<'_>, method: SolverMethod, opts: &SolveOptions) -> Result<PlanSolution> {
    match method {
        SolverMethod::Exact => solve_exact(problem, opts),
        SolverMethod::Bnb => solve_bnb(problem, opts),
        SolverMethod::Greedy => Ok(solve_greedy_swap(problem)),
    }
}

/// Lexicographic enumeration of all `J`-subsets; the first best subset wins.
pub fn solve_enumerate(problem: &PlanProblem<'_>) -> PlanSolution {
    let start = Instant::now();
    let cols = Columns::new(problem.matrix);
    let j = problem.irs_count;
    let mut e = Enumerator {
        cols: &cols,
        j,
        levels: vec![vec![0.0; cols.n_ues]; j],
        stack: Vec::with_capacity(j),
        best_total: f64::NEG_INFINITY,
        best_set: Vec::new(),
        leaves: 0,
    };
    e.descend(0, 0);
    let mut sol = PlanSolution::from_chosen(problem.matrix, e.best_set, Optimality::ProvenOptimal, 0.0, e.leaves);
    sol.stats.elapsed = start.elapsed();
    sol
}

struct Enumerator<'a> {
    cols: &'a Columns,
    j: usize,
    /// `levels[d][u]`: best value of UE `u` over the first `d` stacked spots.
    levels: Vec<Vec<f64>>,
    stack: Vec<usize>,
    best_total: f64,
    best_set: Vec<usize>,
    leaves: u64,
}

impl Enumerator<'_> {
    fn descend(&mut self, from: usize, depth: usize) {
        let m = self.cols.n_spots();
        let last = m - (self.j - depth);
        for t in from..=last {
            if depth + 1 == self.j {
                let total = self.cols.total_with(&self.levels[depth], t);
                self.leaves += 1;
                if total > self.best_total {
                    self.best_total = total;
                    self.best_set.clear();
                    self.best_set.extend_from_slice(&self.stack);
                    self.best_set.push(t);
                }
            } else {
                let (lo, hi) = self.levels.split_at_mut(depth + 1);
                for ((n, &b), &v) in hi[0].iter_mut().zip(&lo[depth]).zip(&self.cols.cols[t]) {
                    *n = b.max(v);
                }
                self.stack.push(t);
                self.descend(t + 1, depth + 1);
                self.stack.pop();
            }
        }
    }
}

/// Greedy insertion of `count` spots on top of `start`, lowest id on ties.
fn greedy_fill(cols: &Columns, start: &[usize], count: usize) -> Vec<usize> {
    let mut chosen = start.to_vec();
    let mut best = cols.best(&chosen);
    while chosen.len() < count {
        let mut pick = None;
        let mut pick_val = f64::NEG_INFINITY;
        for t in 0..cols.n_spots() {
            if chosen.contains(&t) {
                continue;
            }
            let v = cols.total_with(&best, t);
            if v > pick_val {
                pick_val = v;
                pick = Some(t);
            }
        }
        let t = pick.expect("count <= M");
        for (b, &v) in best.iter_mut().zip(&cols.cols[t]) {
            *b = b.max(v);
        }
        chosen.push(t);
    }
    chosen
}

/// Best-improvement single-spot swaps until no swap strictly improves.
fn swap_search(cols: &Columns, mut chosen: Vec<usize>) -> Vec<usize> {
    let total_of = |set: &[usize]| cols.best(set).iter().sum::<f64>();
    let mut current = total_of(&chosen);
    loop {
        let mut best_move = None;
        let mut best_val = current;
        for i in 0..chosen.len() {
            let rest: Vec<usize> = chosen
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &t)| t)
                .collect();
            let without = cols.best(&rest);
            for t in 0..cols.n_spots() {
                if chosen.contains(&t) {
                    continue;
                }
                let v = cols.total_with(&without, t);
                if v > best_val {
                    best_val = v;
                    best_move = Some((i, t));
                }
            }
        }
        match best_move {
            Some((i, t)) => {
                chosen[i] = t;
                current = best_val;
            }
            None => return chosen,
        }
    }
}

fn row_max_bound(m: &MetricMatrix) -> f64 {
    let total: f64 = (0..m.n_ues())
        .map(|u| m.row(u).iter().copied().fold(0.0, f64::max))
        .sum();
    total / m.n_ues() as f64
}

/// Greedy add-by-marginal-gain followed by best-improvement swaps.
pub fn solve_greedy_swap(problem: &PlanProblem<'_>) -> PlanSolution {
    let start = Instant::now();
    let cols = Columns::new(problem.matrix);
    let chosen = swap_search(&cols, greedy_fill(&cols, &[], problem.irs_count));
    let mut sol = PlanSolution::from_chosen(
        problem.matrix,
        chosen,
        Optimality::Heuristic,
        row_max_bound(problem.matrix),
        0,
    );
    sol.stats.elapsed = start.elapsed();
    sol
}

#[derive(Debug)]
struct Node {
    /// Upper bound on `sum_u` of any completion.
    bound: f64,
    chosen: Vec<usize>,
    next: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: higher bound, then deeper, then lexicographically smaller.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.chosen.len().cmp(&other.chosen.len()))
            .then_with(|| other.chosen.cmp(&self.chosen))
    }
}

/// Best-first branch-and-bound over spot inclusion.
///
/// A node fixes an open set `S` and may only add spots with id `>= next`.
/// Its bound is the smaller of `f(S)` plus the top `J - |S|` marginal gains
/// of the remaining spots (valid by submodularity) and the sum of per-UE
/// maxima over `S` and every remaining spot.
pub fn solve_bnb(problem: &PlanProblem<'_>, opts: &SolveOptions) -> Result<PlanSolution> {
    let start = Instant::now();
    let matrix = problem.matrix;
    let cols = Columns::new(matrix);
    let j = problem.irs_count;
    let m = cols.n_spots();
    let n_ues = cols.n_ues;

    let mut incumbent = swap_search(&cols, greedy_fill(&cols, &[], j));
    incumbent.sort_unstable();
    let mut inc_total: f64 = cols.best(&incumbent).iter().sum();
    if let Some(ws) = &opts.warm_start {
        let mut ws = ws.clone();
        ws.sort_unstable();
        ws.dedup();
        if ws.len() > j || ws.iter().any(|&t| t >= m) {
            return Err(Error::invalid("warm start is not a feasible partial plan"));
        }
        let mut filled = greedy_fill(&cols, &ws, j);
        filled.sort_unstable();
        let total: f64 = cols.best(&filled).iter().sum();
        if total > inc_total {
            incumbent = filled;
            inc_total = total;
        }
    }

    // Search over spots ranked by singleton value, so that index-ordered
    // branching leaves the weak spots for the deep, cheap-to-prune nodes.
    let empty = vec![0.0; n_ues];
    let singles: Vec<f64> = (0..m).map(|t| cols.total_with(&empty, t)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| singles[b].total_cmp(&singles[a]).then(a.cmp(&b)));
    let mut inv = vec![0; m];
    for (i, &t) in order.iter().enumerate() {
        inv[t] = i;
    }
    let cols = Columns {
        cols: order.iter().map(|&t| cols.cols[t].clone()).collect(),
        n_ues,
    };
    let mut incumbent: Vec<usize> = incumbent.iter().map(|&t| inv[t]).collect();
    incumbent.sort_unstable();
    let to_original = |set: &[usize]| set.iter().map(|&i| order[i]).collect::<Vec<_>>();

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::INFINITY,
        chosen: Vec::new(),
        next: 0,
    });
    let mut nodes = 0u64;
    let mut gains = vec![0.0; m];
    let mut suffix = vec![vec![0.0; n_ues]; m + 1];
    let mut top: Vec<f64> = Vec::with_capacity(j);

    while let Some(node) = heap.pop() {
        if node.bound <= inc_total {
            break;
        }
        if nodes >= opts.node_budget {
            let mut sol = PlanSolution::from_chosen(
                matrix,
                to_original(&incumbent),
                Optimality::Heuristic,
                node.bound / n_ues as f64,
                nodes,
            );
            sol.upper_bound = sol.upper_bound.max(sol.objective_value);
            sol.stats.elapsed = start.elapsed();
            return Err(Error::BudgetExceeded {
                upper_bound: sol.upper_bound,
                incumbent: Box::new(sol),
            });
        }
        nodes += 1;

        let r = j - node.chosen.len();
        let best = cols.best(&node.chosen);
        let base: f64 = best.iter().sum();
        for (g, col) in gains[node.next..m].iter_mut().zip(&cols.cols[node.next..m]) {
            *g = best.iter().zip(col).map(|(b, v)| (v - b).max(0.0)).sum();
        }
        suffix[m].copy_from_slice(&best);
        for t in (node.next..m).rev() {
            let (lo, hi) = suffix.split_at_mut(t + 1);
            for ((s, &n), &v) in lo[t].iter_mut().zip(&hi[0]).zip(&cols.cols[t]) {
                *s = n.max(v);
            }
        }

        let max_bound: f64 = suffix[node.next].iter().sum();
        let mut rest = gains[node.next..].to_vec();
        rest.sort_by(|a, b| b.total_cmp(a));
        let gain_bound = base + rest.iter().take(r).sum::<f64>();
        if gain_bound.min(max_bound) <= inc_total {
            continue;
        }

        // Suffix sums of the top (r - 1) gains, walking t downward.
        top.clear();
        let last = m - r;
        let mut children = Vec::new();
        for t in (node.next..m).rev() {
            if t <= last {
                let mut chosen = node.chosen.clone();
                chosen.push(t);
                if r == 1 {
                    let total = cols.total_with(&best, t);
                    if total > inc_total || (total == inc_total && chosen < incumbent) {
                        inc_total = total;
                        incumbent = chosen;
                    }
                } else {
                    let gain_bound = base + gains[t] + top.iter().sum::<f64>();
                    let max_bound: f64 = best
                        .iter()
                        .zip(&cols.cols[t])
                        .zip(&suffix[t + 1])
                        .map(|((b, v), s)| b.max(*v).max(*s))
                        .sum();
                    children.push(Node {
                        bound: gain_bound.min(max_bound),
                        chosen,
                        next: t + 1,
                    });
                }
            }
            if r >= 2 {
                let g = gains[t];
                if top.len() < r - 1 {
                    top.push(g);
                    top.sort_by(|a, b| b.total_cmp(a));
                } else if let Some(min) = top.last_mut() {
                    if g > *min {
                        *min = g;
                        top.sort_by(|a, b| b.total_cmp(a));
                    }
                }
            }
        }
        for c in children {
            if c.bound > inc_total {
                heap.push(c);
            }
        }
    }

    let mut sol = PlanSolution::from_chosen(matrix, to_original(&incumbent), Optimality::ProvenOptimal, 0.0, nodes);
    sol.stats.elapsed = start.elapsed();
    Ok(sol)
}
