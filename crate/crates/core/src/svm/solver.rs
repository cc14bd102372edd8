//! Pairwise coordinate descent for the one-class dual
//!
//! ```text
//! minimize    ½ αᵀ K α
//! subject to  Σ α_i = 1,  0 ≤ α_i ≤ u_i
//! ```
//!
//! Working pairs are chosen with second-order information as in libsvm.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::kernel::KernelSpec;
use crate::matrix::SparseRow;
use crate::par::map_range;

const TAU: f64 = 1e-12;

/// Kernel columns computed on demand and kept in a FIFO cache.
struct ColumnCache<'a> {
    rows: &'a [SparseRow],
    popcounts: Vec<usize>,
    kernel: KernelSpec,
    n_cols: usize,
    slot_of: Vec<Option<usize>>,
    slots: Vec<Vec<f64>>,
    owners: VecDeque<usize>,
    capacity: usize,
}

impl<'a> ColumnCache<'a> {
    fn new(rows: &'a [SparseRow], kernel: KernelSpec, cache_bytes: usize) -> Self {
        let l = rows.len();
        let n_cols = rows
            .iter()
            .filter_map(SparseRow::max_column)
            .max()
            .map_or(0, |c| c as usize + 1);
        let capacity = (cache_bytes / (8 * l.max(1))).clamp(2, l.max(2));
        ColumnCache {
            rows,
            popcounts: rows.iter().map(SparseRow::count_ones).collect(),
            kernel,
            n_cols,
            slot_of: vec![None; l],
            slots: Vec::new(),
            owners: VecDeque::new(),
            capacity,
        }
    }

    fn compute(&self, i: usize) -> Vec<f64> {
        let mut marker = vec![false; self.n_cols];
        for &c in self.rows[i].columns() {
            marker[c as usize] = true;
        }
        let ni = self.popcounts[i];
        let rows = self.rows;
        let kernel = self.kernel;
        let popcounts = &self.popcounts;
        let column = |t: usize| {
            let dot = rows[t]
                .columns()
                .iter()
                .filter(|&&c| marker[c as usize])
                .count();
            kernel.from_counts(dot, ni, popcounts[t])
        };
        if rows.len() >= 2048 {
            map_range(rows.len(), column)
        } else {
            (0..rows.len()).map(column).collect()
        }
    }

    fn column(&mut self, i: usize) -> &[f64] {
        if let Some(slot) = self.slot_of[i] {
            return &self.slots[slot];
        }
        let data = self.compute(i);
        let slot = if self.slots.len() < self.capacity {
            self.slots.push(data);
            self.slots.len() - 1
        } else {
            let victim = self.owners.pop_front().expect("cache owner");
            let slot = self.slot_of[victim].take().expect("cached slot");
            self.slots[slot] = data;
            slot
        };
        self.slot_of[i] = Some(slot);
        self.owners.push_back(i);
        &self.slots[slot]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when the maximal KKT violation falls below this value times the
    /// largest kernel diagonal entry.
    pub tolerance: f64,
    /// Iteration limit, in multiples of the number of distinct rows.
    pub max_epochs: usize,
    pub cache_bytes: usize,
    /// Merge identical rows and scale their upper bounds by multiplicity.
    pub dedup: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-4,
            max_epochs: 10_000,
            cache_bytes: 128 << 20,
            dedup: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn solve(
    rows: &[SparseRow],
    upper: &[f64],
    kernel: KernelSpec,
    options: &SolverOptions,
) -> DualSolution {
    let l = rows.len();
    let mut alpha = vec![0.0; l];
    let mut remaining = 1.0f64;
    for i in 0..l {
        if remaining <= 0.0 {
            break;
        }
        let a = upper[i].min(remaining);
        alpha[i] = a;
        remaining -= a;
    }

    let mut cache = ColumnCache::new(rows, kernel, options.cache_bytes);
    let diag: Vec<f64> = rows.iter().map(|r| kernel.eval(r, r)).collect();
    let mut gradient = vec![0.0; l];
    for (i, &a) in alpha.iter().enumerate() {
        if a != 0.0 {
            let qi = cache.column(i);
            for (g, q) in gradient.iter_mut().zip(qi) {
                *g += a * q;
            }
        }
    }

    let scale = diag.iter().copied().fold(0.0f64, f64::max);
    let tolerance = options.tolerance * if scale > 0.0 { scale } else { 1.0 };
    let max_iter = options.max_epochs.saturating_mul(l.max(1));
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // i: smallest gradient among rows that may grow
        let mut g_min = f64::INFINITY;
        let mut i = usize::MAX;
        for t in 0..l {
            if alpha[t] < upper[t] && gradient[t] < g_min {
                g_min = gradient[t];
                i = t;
            }
        }
        let mut g_max = f64::NEG_INFINITY;
        for t in 0..l {
            if alpha[t] > 0.0 && gradient[t] > g_max {
                g_max = gradient[t];
            }
        }
        if i == usize::MAX || g_max - g_min < tolerance {
            converged = true;
            break;
        }
        let qi = cache.column(i).to_vec();
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..l {
            if alpha[t] > 0.0 {
                let diff = gradient[t] - g_min;
                if diff > 0.0 {
                    let quad = diag[i] + diag[t] - 2.0 * qi[t];
                    let gain = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if gain < best {
                        best = gain;
                        j = t;
                    }
                }
            }
        }
        if j == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let qj = cache.column(j).to_vec();
        let quad = diag[i] + diag[j] - 2.0 * qi[j];
        let quad = if quad > 0.0 { quad } else { TAU };
        let delta = (gradient[j] - gradient[i]) / quad;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let sum = old_i + old_j;
        let mut new_i = old_i + delta;
        let mut new_j = old_j - delta;
        if sum > upper[i] {
            if new_i > upper[i] {
                new_i = upper[i];
                new_j = sum - upper[i];
            }
        } else if new_j < 0.0 {
            new_j = 0.0;
            new_i = sum;
        }
        if sum > upper[j] {
            if new_j > upper[j] {
                new_j = upper[j];
                new_i = sum - upper[j];
            }
        } else if new_i < 0.0 {
            new_i = 0.0;
            new_j = sum;
        }
        alpha[i] = new_i;
        alpha[j] = new_j;
        let (di, dj) = (new_i - old_i, new_j - old_j);
        for t in 0..l {
            gradient[t] += qi[t] * di + qj[t] * dj;
        }
    }

    DualSolution {
        alpha,
        gradient,
        iterations,
        converged,
    }
}
