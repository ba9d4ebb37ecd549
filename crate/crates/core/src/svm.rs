//! L2-regularized linear SVM trained by dual coordinate descent.
//!
//! Solves
//!
//! ```text
//! min_w  ½‖w‖² + C Σᵢ loss(yᵢ wᵀxᵢ)
//! ```
//!
//! with the hinge loss `max(0, 1 - m)` or the squared hinge
//! `max(0, 1 - m)²`, through its dual
//!
//! ```text
//! min_α  ½ αᵀ Q̄ α - eᵀα,   0 ≤ αᵢ ≤ U,   Q̄ = Q + D,   Qᵢⱼ = yᵢ yⱼ xᵢᵀxⱼ
//! ```
//!
//! where `U = C, D = 0` for the hinge loss and `U = ∞, Dᵢᵢ = 1 / (2C)` for
//! the squared hinge. The primal vector `w = Σ αᵢ yᵢ xᵢ` is maintained
//! incrementally. There is no separate intercept; callers add a constant
//! feature instead.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Sparse vector with strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    pairs: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Sorts by index and sums values of repeated indices.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (idx, val) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == idx => last.1 += val,
                _ => merged.push((idx, val)),
            }
        }
        SparseVector { pairs: merged }
    }

    pub fn pairs(&self) -> &[(u32, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.pairs
            .iter()
            .map(|&(i, v)| weights.get(i as usize).copied().unwrap_or(0.0) * v)
            .sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.pairs.iter().map(|&(_, v)| v * v).sum()
    }

    fn axpy(&self, scale: f64, weights: &mut [f64]) {
        for &(i, v) in &self.pairs {
            weights[i as usize] += scale * v;
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Loss {
    #[default]
    Hinge,
    SquaredHinge,
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loss::Hinge => "hinge",
            Loss::SquaredHinge => "squared_hinge",
        })
    }
}

impl FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hinge" | "l1" => Ok(Loss::Hinge),
            "squared_hinge" | "squared-hinge" | "l2" => Ok(Loss::SquaredHinge),
            other => Err(Error::InvalidConfig(format!("unknown loss {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct TrainSet {
    examples: Vec<SparseVector>,
    targets: Vec<f64>,
    dim: usize,
}

impl TrainSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: SparseVector, label: Label) {
        if let Some(&(last, _)) = x.pairs.last() {
            self.dim = self.dim.max(last as usize + 1);
        }
        self.examples.push(x);
        self.targets.push(label.sign());
    }

    /// Raises the dimension to at least `dim`.
    pub fn set_dim(&mut self, dim: usize) {
        self.dim = self.dim.max(dim);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[SparseVector] {
        &self.examples
    }

    /// `+1` / `-1` targets aligned with [`examples`](Self::examples).
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub loss: Loss,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            c: 1.0,
            tol: 1e-3,
            max_iter: 1000,
            seed: 42,
            loss: Loss::Hinge,
        }
    }
}

impl SolverParams {
    fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }

    /// `(upper bound on αᵢ, diagonal shift Dᵢᵢ)`.
    fn dual_box(&self) -> (f64, f64) {
        match self.loss {
            Loss::Hinge => (self.c, 0.0),
            Loss::SquaredHinge => (f64::INFINITY, 0.5 / self.c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochTrace {
    pub primal: f64,
    pub dual: f64,
    /// `max PG - min PG` over the epoch.
    pub violation: f64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub weights: Vec<f64>,
    pub alpha: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
    pub trace: Vec<EpochTrace>,
}

pub fn train(set: &TrainSet, params: &SolverParams) -> Result<Solution> {
    solve(set, params, false)
}

/// Like [`train`], recording the primal and dual objectives after every epoch.
pub fn train_traced(set: &TrainSet, params: &SolverParams) -> Result<Solution> {
    solve(set, params, true)
}

fn solve(set: &TrainSet, params: &SolverParams, traced: bool) -> Result<Solution> {
    params.validate()?;
    if set.is_empty() {
        return Err(Error::NotEnoughData("empty training set".into()));
    }
    if set
        .examples
        .iter()
        .flat_map(|x| x.pairs.iter())
        .any(|&(_, v)| !v.is_finite())
    {
        return Err(Error::BadInput("non-finite feature value".into()));
    }
    let has_pos = set.targets.iter().any(|&y| y > 0.0);
    let has_neg = set.targets.iter().any(|&y| y < 0.0);
    if !(has_pos && has_neg) {
        return Err(Error::DegenerateLabels);
    }

    let n = set.len();
    let (upper, diag) = params.dual_box();
    let qd: Vec<f64> = set
        .examples
        .iter()
        .map(|x| x.squared_norm() + diag)
        .collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; set.dim];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut epochs = 0;

    while epochs < params.max_iter {
        epochs += 1;
        order.shuffle(&mut rng);
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;

        for &i in &order {
            if qd[i] <= 0.0 {
                continue;
            }
            let x = &set.examples[i];
            let y = set.targets[i];
            let g = y * x.dot(&w) - 1.0 + diag * alpha[i];
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == upper {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, upper);
                x.axpy((alpha[i] - old) * y, &mut w);
            }
        }

        let violation = if pg_max.is_finite() {
            pg_max - pg_min
        } else {
            0.0
        };
        if traced {
            trace.push(EpochTrace {
                primal: primal_objective(&w, set, params.c, params.loss),
                dual: dual_objective(&w, &alpha, diag),
                violation,
            });
        }
        if violation < params.tol {
            converged = true;
            break;
        }
    }

    Ok(Solution {
        weights: w,
        alpha,
        epochs,
        converged,
        trace,
    })
}

pub fn primal_objective(w: &[f64], set: &TrainSet, c: f64, loss: Loss) -> f64 {
    let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let data: f64 = set
        .examples
        .iter()
        .zip(&set.targets)
        .map(|(x, &y)| {
            let slack = (1.0 - y * x.dot(w)).max(0.0);
            match loss {
                Loss::Hinge => slack,
                Loss::SquaredHinge => slack * slack,
            }
        })
        .sum();
    reg + c * data
}

/// Dual objective `½‖w‖² + ½ Σ Dᵢᵢ αᵢ² - Σ αᵢ` (to be minimized).
pub fn dual_objective(w: &[f64], alpha: &[f64], diag: f64) -> f64 {
    0.5 * w.iter().map(|v| v * v).sum::<f64>()
        + 0.5 * diag * alpha.iter().map(|a| a * a).sum::<f64>()
        - alpha.iter().sum::<f64>()
}

/// Label for a decision value: `Underscore` iff strictly positive.
pub fn label_for(decision: f64) -> Label {
    if decision > 0.0 {
        Label::Underscore
    } else {
        Label::Space
    }
}
