use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SparseRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KernelKind {
    Linear,
    Rbf,
    Poly,
    Sigmoid,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Linear,
        KernelKind::Rbf,
        KernelKind::Poly,
        KernelKind::Sigmoid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Rbf => "rbf",
            KernelKind::Poly => "poly",
            KernelKind::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(s: &str) -> Result<KernelKind> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(KernelKind::Linear),
            "rbf" => Ok(KernelKind::Rbf),
            "poly" | "polynomial" => Ok(KernelKind::Poly),
            "sigmoid" => Ok(KernelKind::Sigmoid),
            _ => Err(Error::InvalidKernel(String::from(s))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
    Poly { degree: u32, gamma: f64, coef0: f64 },
    Sigmoid { gamma: f64, coef0: f64 },
}

impl KernelSpec {
    /// Conventional defaults: γ = 1/columns, cubic polynomial with coef0 1,
    /// sigmoid with coef0 0.
    pub fn with_defaults(kind: KernelKind, n_cols: usize) -> KernelSpec {
        let gamma = 1.0 / n_cols.max(1) as f64;
        match kind {
            KernelKind::Linear => KernelSpec::Linear,
            KernelKind::Rbf => KernelSpec::Rbf { gamma },
            KernelKind::Poly => KernelSpec::Poly {
                degree: 3,
                gamma,
                coef0: 1.0,
            },
            KernelKind::Sigmoid => KernelSpec::Sigmoid { gamma, coef0: 0.0 },
        }
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Linear => KernelKind::Linear,
            KernelSpec::Rbf { .. } => KernelKind::Rbf,
            KernelSpec::Poly { .. } => KernelKind::Poly,
            KernelSpec::Sigmoid { .. } => KernelKind::Sigmoid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let gamma = match *self {
            KernelSpec::Linear => return Ok(()),
            KernelSpec::Rbf { gamma } | KernelSpec::Sigmoid { gamma, .. } => gamma,
            KernelSpec::Poly { degree, gamma, .. } => {
                if degree < 2 {
                    return Err(Error::InvalidKernel(alloc::format!(
                        "polynomial degree {degree} < 2"
                    )));
                }
                gamma
            }
        };
        if gamma > 0.0 && gamma.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidKernel(alloc::format!(
                "gamma must be positive, got {gamma}"
            )))
        }
    }

    /// Kernel value from the shared-bit count and the two row popcounts.
    #[inline]
    pub fn from_counts(&self, dot: usize, nx: usize, ny: usize) -> f64 {
        let dot = dot as f64;
        match *self {
            KernelSpec::Linear => dot,
            KernelSpec::Rbf { gamma } => libm::exp(-gamma * (nx as f64 + ny as f64 - 2.0 * dot)),
            KernelSpec::Poly {
                degree,
                gamma,
                coef0,
            } => {
                let base = gamma * dot + coef0;
                (0..degree).fold(1.0, |acc, _| acc * base)
            }
            KernelSpec::Sigmoid { gamma, coef0 } => libm::tanh(gamma * dot + coef0),
        }
    }

    pub fn eval(&self, x: &SparseRow, y: &SparseRow) -> f64 {
        self.from_counts(x.dot(y), x.count_ones(), y.count_ones())
    }
}
