//! Dense Metropolis transition matrices, Gibbs distributions and spectral
//! gaps for small instances.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sk_model::{EnergyTable, SkInstance};

/// Largest `n` for which a dense `2^n x 2^n` matrix is built.
pub const DEFAULT_MATRIX_CAP: usize = 12;

const STOCHASTIC_TOL: f64 = 1e-9;

/// Column-stochastic Metropolis matrix: entry `(y, x)` is the probability of
/// moving from `x` to `y` in one step.
#[derive(Debug, Clone)]
pub struct MarkovMatrix {
    pub beta: f64,
    pub n: usize,
    pub entries: DMatrix<f64>,
}

impl MarkovMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.entries[(y, x)]
    }

    /// `p' = W p`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let v = &self.entries * nalgebra::DVector::from_column_slice(p);
        v.iter().copied().collect()
    }

    fn check_stochastic(&self) -> Result<()> {
        for (x, col) in self.entries.column_iter().enumerate() {
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL || col.iter().any(|&v| v < -STOCHASTIC_TOL) {
                return Err(Error::NotStochastic { column: x, sum });
            }
        }
        Ok(())
    }
}

/// Builds `W` for single-bit-flip proposals (`M = n`) with Metropolis
/// acceptance `min(1, exp(beta (E(x) - E(y))))`.
pub fn transition_matrix(inst: &SkInstance, beta: f64) -> Result<MarkovMatrix> {
    transition_matrix_capped(inst, beta, DEFAULT_MATRIX_CAP)
}

pub fn transition_matrix_capped(inst: &SkInstance, beta: f64, cap: usize) -> Result<MarkovMatrix> {
    let table = EnergyTable::build(inst, cap)?;
    Ok(transition_matrix_from_table(&table, beta))
}

pub fn transition_matrix_from_table(table: &EnergyTable, beta: f64) -> MarkovMatrix {
    let n = table.n();
    let dim = 1usize << n;
    let m = n as f64;
    let mut w = DMatrix::<f64>::zeros(dim, dim);
    for x in 0..dim {
        let ex = table.get(x);
        let mut leave = 0.0;
        for j in 0..n {
            let y = x ^ (1 << j);
            let t = (beta * (ex - table.get(y)) as f64).exp().min(1.0) / m;
            w[(y, x)] = t;
            leave += t;
        }
        w[(x, x)] = 1.0 - leave;
    }
    MarkovMatrix {
        beta,
        n,
        entries: w,
    }
}

/// Boltzmann weights `pi_x ∝ exp(-beta E(x))` over all configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsDist {
    pub beta: f64,
    probs: Vec<f64>,
}

impl GibbsDist {
    pub fn from_table(table: &EnergyTable, beta: f64) -> Self {
        let log_w: Vec<f64> = table.as_slice().iter().map(|&e| -beta * e as f64).collect();
        let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_w.iter().map(|&l| (l - max).exp()).collect();
        let z: f64 = weights.iter().sum();
        GibbsDist {
            beta,
            probs: weights.into_iter().map(|w| w / z).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_variation(&self, other: &[f64]) -> f64 {
        self.probs
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0
    }
}

pub fn gibbs_distribution(inst: &SkInstance, beta: f64) -> Result<GibbsDist> {
    let table = EnergyTable::build(inst, DEFAULT_MATRIX_CAP)?;
    Ok(GibbsDist::from_table(&table, beta))
}

/// `1 - |lambda_2|`: the gap between the two largest eigenvalue magnitudes of
/// a reversible stochastic matrix. Eigenvalues are taken from the symmetric
/// matrix `sqrt(W_xy W_yx)`, which is similar to `W` under detailed balance.
pub fn spectral_gap(w: &MarkovMatrix) -> Result<f64> {
    w.check_stochastic()?;
    let dim = w.dim();
    let sym = DMatrix::from_fn(dim, dim, |y, x| {
        if x == y {
            w.get(x, x)
        } else {
            (w.get(y, x) * w.get(x, y)).sqrt()
        }
    });
    let eig = SymmetricEigen::new(sym);
    let mut mags: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let second = mags.get(1).copied().unwrap_or(0.0);
    Ok((mags[0] - second).clamp(0.0, 1.0))
}
