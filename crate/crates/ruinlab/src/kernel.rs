//! The chip-exchange kernel restricted to interior states.
//!
//! A game step picks one of the `C(k,2)` player pairs uniformly and moves a
//! chip by a fair coin, so every admissible transition has probability
//! `1/(2*C(k,2))`. Killing the kernel at the boundary leaves a symmetric,
//! strictly sub-stochastic operator on the interior. The support is stored
//! as an integer adjacency structure and the step probability is applied
//! only when the operator acts, so row-sum accounting stays exact.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simplex::{ChipConfig, SimplexIndex};

/// Row count below which `apply` stays single threaded.
const PARALLEL_ROWS: usize = 8192;

/// Nonzero budget above which the kernel is kept matrix free by default.
const EXPLICIT_NNZ_LIMIT: usize = 10_000_000;

/// The killed kernel as a symmetric operator over interior states.
pub struct KernelOperator {
    index: Arc<SimplexIndex>,
    pairs: usize,
    /// CSR adjacency over interior states; empty when matrix free.
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    matrix_free: bool,
}

fn pair_count(k: usize) -> usize {
    k * (k - 1) / 2
}

impl KernelOperator {
    /// Build the kernel, materializing the adjacency unless it would exceed
    /// the explicit-storage budget.
    pub fn build(index: Arc<SimplexIndex>) -> Self {
        let bound = index.interior_count() * 2 * pair_count(index.k());
        if bound <= EXPLICIT_NNZ_LIMIT {
            Self::build_explicit(index)
        } else {
            Self::build_matrix_free(index)
        }
    }

    pub fn build_explicit(index: Arc<SimplexIndex>) -> Self {
        let n = index.interior_count();
        let pairs = pair_count(index.k());
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols: Vec<u32> = Vec::with_capacity(n * 2 * pairs);
        row_ptr.push(0);
        for x in index.interior_states() {
            let mut interior = 0usize;
            let mut exits = 0usize;
            let start = cols.len();
            for (_, target) in x.neighbors() {
                let t = target.expect("interior donors always hold a chip");
                if t.is_interior() {
                    let j = index
                        .interior_index(&t)
                        .expect("interior neighbor is enumerated");
                    cols.push(j as u32);
                    interior += 1;
                } else {
                    exits += 1;
                }
            }
            // Exact accounting: interior mass plus exit mass is the full
            // row, in units of 1/(2*C(k,2)).
            assert_eq!(interior + exits, 2 * pairs);
            cols[start..].sort_unstable();
            row_ptr.push(cols.len());
        }
        Self {
            index,
            pairs,
            row_ptr,
            cols,
            matrix_free: false,
        }
    }

    pub fn build_matrix_free(index: Arc<SimplexIndex>) -> Self {
        let pairs = pair_count(index.k());
        Self {
            index,
            pairs,
            row_ptr: Vec::new(),
            cols: Vec::new(),
            matrix_free: true,
        }
    }

    pub fn index(&self) -> &SimplexIndex {
        &self.index
    }

    pub fn index_arc(&self) -> Arc<SimplexIndex> {
        Arc::clone(&self.index)
    }

    pub fn interior_count(&self) -> usize {
        self.index.interior_count()
    }

    pub fn is_matrix_free(&self) -> bool {
        self.matrix_free
    }

    /// The uniform transition probability `1/(2*C(k,2))`.
    pub fn step_probability(&self) -> f64 {
        1.0 / (2.0 * self.pairs as f64)
    }

    /// Number of interior neighbors of interior row `i`.
    pub fn interior_degree(&self, i: usize) -> usize {
        if self.matrix_free {
            self.index.interior_state(i)
                .neighbors()
                .into_iter()
                .filter(|(_, t)| t.as_ref().is_some_and(ChipConfig::is_interior))
                .count()
        } else {
            self.row_ptr[i + 1] - self.row_ptr[i]
        }
    }

    fn row_sum(&self, i: usize, v: &[f64]) -> f64 {
        if self.matrix_free {
            let mut acc = 0.0;
            for (_, target) in self.index.interior_state(i).neighbors() {
                let t = target.expect("interior donors always hold a chip");
                if let Some(j) = self.index.interior_index(&t) {
                    acc += v[j];
                }
            }
            acc
        } else {
            let mut acc = 0.0;
            for &j in &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]] {
                acc += v[j as usize];
            }
            acc
        }
    }

    /// `out = K v`. Each output entry is accumulated in a fixed per-row
    /// order, so the result is bitwise independent of the thread count.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.interior_count();
        if v.len() != n || out.len() != n {
            return Err(Error::Invalid(format!(
                "vector length {} does not match interior count {n}",
                v.len()
            )));
        }
        let p = self.step_probability();
        if n >= PARALLEL_ROWS {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, o)| *o = self.row_sum(i, v) * p);
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.row_sum(i, v) * p;
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.interior_count()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// Boundary states one move from interior `y`, each carrying the step
    /// probability. The list is empty for deep-interior states.
    pub fn exit_distribution(&self, y: &ChipConfig) -> Result<Vec<(ChipConfig, f64)>> {
        if y.k() != self.index.k() || y.total() != self.index.n() {
            return Err(Error::Invalid(format!(
                "state {y} does not belong to the (k={}, N={}) simplex",
                self.index.k(),
                self.index.n()
            )));
        }
        if !y.is_interior() {
            return Err(Error::Invalid(format!("state {y} is not interior")));
        }
        let p = self.step_probability();
        Ok(y.neighbors()
            .into_iter()
            .filter_map(|(_, t)| t)
            .filter(ChipConfig::is_reachable_boundary)
            .map(|z| (z, p))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(chips: &[u64]) -> ChipConfig {
        ChipConfig::new(chips.to_vec()).unwrap()
    }

    fn op(k: usize, n: u64) -> KernelOperator {
        KernelOperator::build(Arc::new(SimplexIndex::new(k, n).unwrap()))
    }

    #[test]
    fn single_state_kernel_is_zero() {
        let op = op(3, 3);
        assert_eq!(op.interior_count(), 1);
        assert_eq!(op.interior_degree(0), 0);
        assert_eq!(op.apply(&[1.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn k3_n4_kernel_is_a_three_cycle() {
        let op = op(3, 4);
        for i in 0..3 {
            assert_eq!(op.interior_degree(i), 2);
        }
        // K * ones = row sums = 2/6 each.
        let v = op.apply(&[1.0, 1.0, 1.0]).unwrap();
        for x in v {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn deep_interior_rows_are_stochastic() {
        let op = op(3, 9);
        let idx = op.index();
        let ones = vec![1.0; idx.interior_count()];
        let sums = op.apply(&ones).unwrap();
        for (i, s) in idx.interior_states().iter().enumerate() {
            if s.chips().iter().all(|&c| c >= 2) {
                assert!((sums[i] - 1.0).abs() < 1e-15, "row sum at {s}");
            } else {
                assert!(sums[i] < 1.0);
            }
        }
    }

    #[test]
    fn apply_is_linear_and_self_adjoint() {
        let op = op(4, 8);
        let n = op.interior_count();
        assert_eq!(op.apply(&vec![0.0; n]).unwrap(), vec![0.0; n]);

        // Deterministic pseudo-random vectors.
        let v: Vec<f64> = (0..n).map(|i| ((i * 2654435761) % 1000) as f64 / 997.0).collect();
        let w: Vec<f64> = (0..n).map(|i| ((i * 40503 + 11) % 1000) as f64 / 991.0).collect();
        let kv = op.apply(&v).unwrap();
        let kw = op.apply(&w).unwrap();
        let a: f64 = kv.iter().zip(&w).map(|(x, y)| x * y).sum();
        let b: f64 = v.iter().zip(&kw).map(|(x, y)| x * y).sum();
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((a - b).abs() <= 1e-14 * vn * wn);
    }

    #[test]
    fn matrix_free_agrees_with_explicit() {
        // Summation order differs between the two representations, so the
        // agreement is to round-off, not bitwise.
        let index = Arc::new(SimplexIndex::new(4, 9).unwrap());
        let dense = KernelOperator::build_explicit(Arc::clone(&index));
        let free = KernelOperator::build_matrix_free(index);
        let n = dense.interior_count();
        let v: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let a = dense.apply(&v).unwrap();
        let b = free.apply(&v).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn exit_distributions() {
        let op3 = op(3, 3);
        let exits = op3.exit_distribution(&cfg(&[1, 1, 1])).unwrap();
        assert_eq!(exits.len(), 6);
        for (z, p) in &exits {
            assert!(z.is_reachable_boundary());
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }

        let op4 = op(3, 4);
        let exits = op4.exit_distribution(&cfg(&[1, 1, 2])).unwrap();
        assert_eq!(exits.len(), 4);

        let op9 = op(3, 9);
        assert!(op9.exit_distribution(&cfg(&[3, 3, 3])).unwrap().is_empty());
        assert!(op9.exit_distribution(&cfg(&[0, 4, 5])).is_err());
    }

    #[test]
    fn apply_is_bitwise_independent_of_thread_count() {
        // Large enough to take the parallel path.
        let op = op(3, 130);
        assert!(op.interior_count() >= 8192);
        let n = op.interior_count();
        let v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).cos()).collect();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| op.apply(&v).unwrap());
        let b = pool4.install(|| op.apply(&v).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn interior_plus_exit_mass_is_one() {
        let op = op(4, 7);
        let pairs = 2 * pair_count(4);
        for (i, y) in op.index().interior_states().iter().enumerate() {
            let exits = op.exit_distribution(y).unwrap().len();
            assert_eq!(op.interior_degree(i) + exits, pairs);
        }
    }
}
