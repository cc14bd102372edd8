//! One-class ν-SVM on sparse binary rows.

mod kernel;
mod solver;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use kernel::{KernelKind, KernelSpec};
pub use solver::SolverOptions;

use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, SparseRow};
use crate::par::map_range;

pub const MODEL_VERSION: u32 = 1;

/// FNV-1a fingerprint of a column catalog, in column order.
pub fn catalog_fingerprint(catalog: &[alloc::string::String]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for name in catalog {
        for b in name.bytes().chain(core::iter::once(0u8)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub version: u32,
    pub kernel: KernelSpec,
    pub nu: f64,
    /// Training row count, duplicates included.
    pub n: usize,
    pub n_cols: usize,
    pub catalog_fingerprint: u64,
    /// First training row index of each support vector.
    pub support_rows: Vec<usize>,
    pub support_vectors: Vec<SparseRow>,
    /// Total dual weight per support vector (summed over its duplicates).
    pub alpha: Vec<f64>,
    pub rho: f64,
    /// Every training row was identical; all rows score zero.
    pub degenerate: bool,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    pub fn decision(&self, x: &SparseRow) -> f64 {
        if self.degenerate {
            return 0.0;
        }
        let mut sum = 0.0;
        for (sv, a) in self.support_vectors.iter().zip(&self.alpha) {
            sum += a * self.kernel.eval(sv, x);
        }
        sum - self.rho
    }

    /// Training rows carrying nonzero weight, duplicates counted.
    pub fn support_count(&self, m: &FeatureMatrix) -> usize {
        let mut svs: Vec<&SparseRow> = self.support_vectors.iter().collect();
        svs.sort();
        m.rows
            .iter()
            .filter(|r| svs.binary_search(r).is_ok())
            .count()
    }
}

/// Distinct rows in ascending order with multiplicities and first positions.
struct DistinctRows {
    rows: Vec<SparseRow>,
    multiplicity: Vec<usize>,
    first_index: Vec<usize>,
}

fn distinct_rows(rows: &[SparseRow]) -> DistinctRows {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].cmp(&rows[b]).then(a.cmp(&b)));
    let mut out = DistinctRows {
        rows: Vec::new(),
        multiplicity: Vec::new(),
        first_index: Vec::new(),
    };
    for idx in order {
        if out.rows.last() == Some(&rows[idx]) {
            *out.multiplicity.last_mut().expect("group") += 1;
        } else {
            out.rows.push(rows[idx].clone());
            out.multiplicity.push(1);
            out.first_index.push(idx);
        }
    }
    out
}

pub fn train_ocsvm(m: &FeatureMatrix, kernel: KernelSpec, nu: f64) -> Result<SvmModel> {
    train_ocsvm_with(m, kernel, nu, &SolverOptions::default())
}

/// Solves the one-class dual and fixes the offset ρ as the smallest gradient
/// among rows below their upper bound. With that choice only rows at the
/// upper bound can score below zero, so at most ⌊νn⌋ training rows are
/// abnormal, and the row attaining the minimum sits exactly on the margin.
pub fn train_ocsvm_with(
    m: &FeatureMatrix,
    kernel: KernelSpec,
    nu: f64,
    options: &SolverOptions,
) -> Result<SvmModel> {
    if m.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidNu(nu));
    }
    kernel.validate()?;
    let n = m.n_rows();
    let c = 1.0 / (nu * n as f64);
    let fingerprint = catalog_fingerprint(&m.catalog);

    let groups = if options.dedup {
        distinct_rows(&m.rows)
    } else {
        DistinctRows {
            rows: m.rows.clone(),
            multiplicity: alloc::vec![1; n],
            first_index: (0..n).collect(),
        }
    };
    let degenerate = m.rows.iter().all(|r| *r == m.rows[0]);
    if degenerate {
        return Ok(SvmModel {
            version: MODEL_VERSION,
            kernel,
            nu,
            n,
            n_cols: m.n_cols(),
            catalog_fingerprint: fingerprint,
            support_rows: Vec::new(),
            support_vectors: Vec::new(),
            alpha: Vec::new(),
            rho: 0.0,
            degenerate: true,
            iterations: 0,
            converged: true,
        });
    }

    let upper: Vec<f64> = groups.multiplicity.iter().map(|&k| k as f64 * c).collect();
    let sol = solver::solve(&groups.rows, &upper, kernel, options);

    let mut rho = f64::INFINITY;
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a < upper[t] {
            rho = rho.min(sol.gradient[t]);
        }
    }
    if rho == f64::INFINITY {
        rho = sol
            .gradient
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
    }

    let mut support_rows = Vec::new();
    let mut support_vectors = Vec::new();
    let mut alpha = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_rows.push(groups.first_index[t]);
            support_vectors.push(groups.rows[t].clone());
            alpha.push(a);
        }
    }
    Ok(SvmModel {
        version: MODEL_VERSION,
        kernel,
        nu,
        n,
        n_cols: m.n_cols(),
        catalog_fingerprint: fingerprint,
        support_rows,
        support_vectors,
        alpha,
        rho,
        degenerate: false,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

/// Signed distance of every row; `d >= 0` is normal.
pub fn score(model: &SvmModel, m: &FeatureMatrix) -> Result<Vec<f64>> {
    if model.n_cols != m.n_cols() || model.catalog_fingerprint != catalog_fingerprint(&m.catalog) {
        return Err(Error::CatalogMismatch {
            expected: model.n_cols,
            found: m.n_cols(),
        });
    }
    Ok(map_range(m.n_rows(), |i| model.decision(&m.rows[i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{MatrixKind, RowKey};
    use crate::term::TermId;
    use alloc::string::ToString;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn matrix(rows: Vec<Vec<u32>>, n_cols: usize) -> FeatureMatrix {
        FeatureMatrix {
            kind: MatrixKind::EntityMatrix,
            row_keys: (0..rows.len())
                .map(|i| RowKey::Entity(TermId(i as u32)))
                .collect(),
            catalog: (0..n_cols).map(|c| c.to_string()).collect(),
            rows: rows.into_iter().map(SparseRow::from).collect(),
        }
    }

    fn random_matrix(n: usize, cols: usize, density: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n)
            .map(|_| (0..cols as u32).filter(|_| rng.gen_bool(density)).collect())
            .collect();
        matrix(rows, cols)
    }

    fn all_kernels(cols: usize) -> Vec<KernelSpec> {
        KernelKind::ALL
            .iter()
            .map(|&k| KernelSpec::with_defaults(k, cols))
            .collect()
    }

    #[test]
    fn single_outlier_gets_minimum() {
        let mut rows = vec![vec![0, 1, 2]; 99];
        rows.push(vec![5, 6]);
        let m = matrix(rows, 8);
        let model = train_ocsvm(&m, KernelSpec::Rbf { gamma: 0.125 }, 0.05).unwrap();
        let d = score(&model, &m).unwrap();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(d[99], min);
        assert!(d[..99].iter().all(|&x| x > d[99]));
    }

    #[test]
    fn nu_one_puts_everything_on_the_bound() {
        let m = random_matrix(50, 10, 0.3, 1);
        let model = train_ocsvm(&m, KernelSpec::Rbf { gamma: 0.1 }, 1.0).unwrap();
        let d = score(&model, &m).unwrap();
        assert!(d.iter().all(|&x| x <= 1e-12));
        assert_eq!(model.support_count(&m), 50);
    }

    #[test]
    fn dual_constraints_hold() {
        let m = random_matrix(200, 30, 0.2, 2);
        for kernel in all_kernels(30) {
            let model = train_ocsvm(&m, kernel, 0.1).unwrap();
            let sum: f64 = model.alpha.iter().sum();
            assert!((sum - 1.0).abs() < 1e-8, "{kernel:?} sum {sum}");
            let c = 1.0 / (0.1 * 200.0);
            let groups = distinct_rows(&m.rows);
            for (sv, a) in model.support_vectors.iter().zip(&model.alpha) {
                let k = groups.rows.iter().position(|r| r == sv).unwrap();
                assert!(*a >= 0.0 && *a <= groups.multiplicity[k] as f64 * c + 1e-15);
            }
        }
    }

    #[test]
    fn margin_row_scores_zero() {
        let m = random_matrix(100, 20, 0.25, 3);
        let model = train_ocsvm(&m, KernelSpec::Rbf { gamma: 0.05 }, 0.2).unwrap();
        let d = score(&model, &m).unwrap();
        assert!(d.iter().any(|x| x.abs() <= 1e-6));
    }

    #[test]
    fn interior_duplicate_is_normal() {
        let mut rows = vec![vec![0, 1, 2, 3]; 40];
        rows.extend((0..10).map(|i| vec![i % 4, 4 + i]));
        let m = matrix(rows, 20);
        let model = train_ocsvm(&m, KernelSpec::Rbf { gamma: 0.05 }, 0.1).unwrap();
        let probe = FeatureMatrix {
            rows: vec![SparseRow::from(vec![0, 1, 2, 3])],
            row_keys: vec![RowKey::Entity(TermId(0))],
            ..m.clone()
        };
        assert!(score(&model, &probe).unwrap()[0] > 0.0);
    }

    #[test]
    fn degenerate_matrix_is_flagged() {
        let m = matrix(vec![vec![1, 2]; 10], 3);
        let model = train_ocsvm(&m, KernelSpec::Linear, 0.3).unwrap();
        assert!(model.degenerate);
        assert!(score(&model, &m).unwrap().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn catalog_mismatch_is_fatal() {
        let m = random_matrix(20, 5, 0.5, 4);
        let model = train_ocsvm(&m, KernelSpec::Linear, 0.5).unwrap();
        let other = random_matrix(20, 6, 0.5, 4);
        assert!(matches!(
            score(&model, &other),
            Err(Error::CatalogMismatch { .. })
        ));
    }

    #[test]
    fn invalid_arguments() {
        let m = random_matrix(10, 5, 0.5, 5);
        assert!(matches!(
            train_ocsvm(&m, KernelSpec::Linear, 0.0),
            Err(Error::InvalidNu(_))
        ));
        assert!(matches!(
            train_ocsvm(&m, KernelSpec::Linear, 1.5),
            Err(Error::InvalidNu(_))
        ));
        assert!(matches!(
            train_ocsvm(&matrix(vec![], 5), KernelSpec::Linear, 0.5),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn dedup_matches_full_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let base: Vec<Vec<u32>> = (0..15)
            .map(|_| (0..12u32).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        let rows: Vec<Vec<u32>> = (0..120)
            .map(|_| base[rng.gen_range(0..base.len())].clone())
            .collect();
        let m = matrix(rows, 12);
        let tight = SolverOptions {
            tolerance: 1e-12,
            ..Default::default()
        };
        for kernel in [KernelSpec::Rbf { gamma: 1.0 / 12.0 }, KernelSpec::Linear] {
            let a = train_ocsvm_with(&m, kernel, 0.15, &tight).unwrap();
            let b = train_ocsvm_with(
                &m,
                kernel,
                0.15,
                &SolverOptions {
                    dedup: false,
                    ..tight
                },
            )
            .unwrap();
            let (da, db) = (score(&a, &m).unwrap(), score(&b, &m).unwrap());
            for (x, y) in da.iter().zip(&db) {
                assert!((x - y).abs() < 1e-6, "{kernel:?}: {x} vs {y}");
            }
        }
    }
}
