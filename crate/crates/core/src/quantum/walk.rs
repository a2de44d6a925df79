//! Statevector simulation of the qubitized Metropolis walk
//! `U = R V^dag B^dag F B V` on System (n qubits), Move (ceil(log2 n)
//! qubits) and Coin (1 qubit) registers.
//!
//! * `V` prepares `n^{-1/2} sum_{j<n} |j>` on Move from `|0>`. It is the
//!   Householder reflection exchanging `|0>` with that state, so `V = V^dag`.
//!   Move indices `j >= n` never receive amplitude from `|0>`.
//! * `B(beta)` rotates Coin, controlled on `(x, j)`, putting amplitude
//!   `sqrt(a)` on `|1>` where `a = min(1, exp(beta (E(x) - E(x ^ e_j))))`.
//! * `F` flips System bit `j` when Coin is `|1>`; it is a permutation and an
//!   involution.
//! * `R = 2 |0><0|_{M,C} - I`.
//!
//! Projected on `|0>_M |0>_C`, `V^dag B^dag F B V` is the symmetrized
//! Metropolis matrix `sqrt(W_xy W_yx)`, so the walk's eigenphases are
//! `± arccos` of the classical eigenvalues.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::classical::AnnealSchedule;
use crate::error::{Error, Result};
use crate::sk_model::{EnergyTable, SkInstance};

/// Largest System register simulated by default (`2^18` amplitudes at
/// `n = 13`).
pub const DEFAULT_STATEVECTOR_CAP: usize = 13;

const NORM_TOL: f64 = 1e-6;

/// Register widths and the index map `(x, z, c) -> x * 2^{m+1} + z * 2 + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkLayout {
    pub n: usize,
    pub move_bits: usize,
}

impl WalkLayout {
    pub fn new(n: usize) -> Self {
        let move_bits = (usize::BITS - (n - 1).leading_zeros()) as usize;
        WalkLayout {
            n,
            move_bits: move_bits.max(1),
        }
    }

    pub fn qubits(&self) -> usize {
        self.n + self.move_bits + 1
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits()
    }

    /// Amplitudes per System basis state.
    #[inline]
    pub fn block(&self) -> usize {
        1usize << (self.move_bits + 1)
    }

    #[inline]
    pub fn index(&self, x: usize, z: usize, c: usize) -> usize {
        (x << (self.move_bits + 1)) | (z << 1) | c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    layout: WalkLayout,
    amps: Vec<Complex64>,
}

impl WalkState {
    /// `|0>_S |0>_M |0>_C`.
    pub fn initial(layout: WalkLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        WalkState { layout, amps }
    }

    /// Uniform superposition over System with Move and Coin zeroed: the
    /// coherent Gibbs state at `beta = 0`, a fixed point of every walk at
    /// that temperature.
    pub fn uniform(layout: WalkLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        let amp = Complex64::new(((1u64 << layout.n) as f64).sqrt().recip(), 0.0);
        for blk in amps.chunks_exact_mut(layout.block()) {
            blk[0] = amp;
        }
        WalkState { layout, amps }
    }

    pub fn basis(layout: WalkLayout, x: usize, z: usize, c: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[layout.index(x, z, c)] = Complex64::new(1.0, 0.0);
        WalkState { layout, amps }
    }

    pub fn from_amplitudes(layout: WalkLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::InvalidConfig(format!(
                "expected {} amplitudes, got {}",
                layout.dim(),
                amps.len()
            )));
        }
        Ok(WalkState { layout, amps })
    }

    pub fn layout(&self) -> WalkLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of each System basis state with Move and Coin traced out.
    pub fn system_marginal(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(self.layout.block())
            .map(|blk| blk.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// `(basis index, re, im)` lines for debugging small states.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", a.re, a.im));
        }
        out
    }
}

/// The four walk primitives at one inverse temperature.
#[derive(Debug, Clone)]
pub struct WalkOperators {
    beta: f64,
    layout: WalkLayout,
    energies: EnergyTable,
    /// Householder vector of `V` on the Move register.
    householder: Vec<f64>,
    /// Index into `coin` of the energy gain `E(x) - E(x ^ e_j)` for every
    /// `(x, j)`, row-major in `x`. Gains take few distinct values, so the
    /// rotations are stored once per gain.
    gain_index: Vec<u16>,
    gains: Vec<i64>,
    /// `(cos, sin)` of the coin angle per distinct gain.
    coin: Vec<(f64, f64)>,
}

pub fn build_walk(inst: &SkInstance, beta: f64) -> Result<WalkOperators> {
    build_walk_capped(inst, beta, DEFAULT_STATEVECTOR_CAP)
}

pub fn build_walk_capped(inst: &SkInstance, beta: f64, cap: usize) -> Result<WalkOperators> {
    Ok(WalkOperators::new(EnergyTable::build(inst, cap)?, beta))
}

impl WalkOperators {
    pub fn new(energies: EnergyTable, beta: f64) -> Self {
        let layout = WalkLayout::new(energies.n());
        let n = layout.n;
        let moves = 1usize << layout.move_bits;
        let amp = 1.0 / (n as f64).sqrt();
        let mut u: Vec<f64> = (0..moves).map(|j| if j < n { -amp } else { 0.0 }).collect();
        u[0] += 1.0;
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        u.iter_mut().for_each(|v| *v /= norm);

        let mut gains: Vec<i64> = Vec::new();
        let mut lookup: HashMap<i64, u16> = HashMap::new();
        let mut gain_index = Vec::with_capacity(n << n);
        for x in 0..1usize << n {
            let ex = energies.get(x);
            for j in 0..n {
                let g = ex - energies.get(x ^ (1 << j));
                let idx = *lookup.entry(g).or_insert_with(|| {
                    gains.push(g);
                    (gains.len() - 1) as u16
                });
                gain_index.push(idx);
            }
        }
        let mut ops = WalkOperators {
            beta,
            layout,
            energies,
            householder: u,
            gain_index,
            gains,
            coin: Vec::new(),
        };
        ops.set_beta(beta);
        ops
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn layout(&self) -> WalkLayout {
        self.layout
    }

    pub fn energies(&self) -> &EnergyTable {
        &self.energies
    }

    /// Recomputes the coin rotations of `B` for a new inverse temperature.
    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
        self.coin.clear();
        self.coin.extend(self.gains.iter().map(|&g| {
            let accept = (beta * g as f64).exp().min(1.0);
            ((1.0 - accept).sqrt(), accept.sqrt())
        }));
    }

    /// Acceptance probability encoded by the coin rotation at `(x, j)`.
    pub fn acceptance(&self, x: usize, j: usize) -> f64 {
        self.coin[self.gain_index[x * self.layout.n + j] as usize]
            .1
            .powi(2)
    }

    /// `V` (equal to `V^dag`).
    pub fn apply_v(&self, psi: &mut WalkState) {
        let u = &self.householder;
        let moves = u.len();
        for blk in psi.amps.chunks_exact_mut(self.layout.block()) {
            for c in 0..2 {
                let mut dot = Complex64::new(0.0, 0.0);
                for z in 0..moves {
                    dot += blk[2 * z + c] * u[z];
                }
                dot *= 2.0;
                for z in 0..moves {
                    blk[2 * z + c] -= dot * u[z];
                }
            }
        }
    }

    fn rotate_coin(&self, psi: &mut WalkState, dagger: bool) {
        let n = self.layout.n;
        let sign = if dagger { -1.0 } else { 1.0 };
        for (x, blk) in psi.amps.chunks_exact_mut(self.layout.block()).enumerate() {
            let row = &self.gain_index[x * n..(x + 1) * n];
            for (j, &g) in row.iter().enumerate() {
                let (cos, sin) = self.coin[g as usize];
                let a0 = blk[2 * j];
                let a1 = blk[2 * j + 1];
                let s = sign * sin;
                blk[2 * j] = a0 * cos - a1 * s;
                blk[2 * j + 1] = a0 * s + a1 * cos;
            }
        }
    }

    pub fn apply_b(&self, psi: &mut WalkState) {
        self.rotate_coin(psi, false);
    }

    pub fn apply_b_dagger(&self, psi: &mut WalkState) {
        self.rotate_coin(psi, true);
    }

    /// Swaps `|x, j, 1>` with `|x ^ e_j, j, 1>` for every valid move `j`.
    pub fn apply_f(&self, psi: &mut WalkState) {
        let n = self.layout.n;
        let size = 1usize << n;
        for x in 0..size {
            for j in 0..n {
                let y = x ^ (1 << j);
                if y > x {
                    let a = self.layout.index(x, j, 1);
                    let b = self.layout.index(y, j, 1);
                    psi.amps.swap(a, b);
                }
            }
        }
    }

    pub fn apply_r(&self, psi: &mut WalkState) {
        for blk in psi.amps.chunks_exact_mut(self.layout.block()) {
            for a in blk[1..].iter_mut() {
                *a = -*a;
            }
        }
    }

    /// One walk step `R V^dag B^dag F B V`.
    pub fn apply_step(&self, psi: &mut WalkState) {
        self.apply_v(psi);
        self.apply_b(psi);
        self.apply_f(psi);
        self.apply_b_dagger(psi);
        self.apply_v(psi);
        self.apply_r(psi);
    }

    /// Dense real matrix of an operator, built column by column. Only for
    /// small layouts.
    pub fn dense<F: Fn(&Self, &mut WalkState)>(&self, op: F) -> DMatrix<f64> {
        let dim = self.layout.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[col] = Complex64::new(1.0, 0.0);
            let mut psi = WalkState {
                layout: self.layout,
                amps,
            };
            op(self, &mut psi);
            for (row, a) in psi.amps.iter().enumerate() {
                debug_assert!(a.im.abs() < 1e-15);
                m[(row, col)] = a.re;
            }
        }
        m
    }

    pub fn walk_matrix(&self) -> DMatrix<f64> {
        self.dense(|ops, psi| ops.apply_step(psi))
    }
}

/// Smallest nonzero eigenphase magnitude of the walk unitary.
///
/// The walk matrix `U` is real orthogonal, hence normal, so the eigenvalues of
/// `(U + U^T) / 2` are exactly `cos(phi)` over its eigenphases `phi`.
pub fn phase_gap(ops: &WalkOperators) -> f64 {
    const ZERO_PHASE: f64 = 1e-6;
    let u = ops.walk_matrix();
    let sym = (&u + u.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .map(|&c| c.clamp(-1.0, 1.0).acos())
        .filter(|&p| p > ZERO_PHASE)
        .fold(std::f64::consts::PI, f64::min)
}

/// Initial System register of an anneal. Move and Coin always start at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WalkStart {
    /// `|0>_S`. The walk is unitary, so a basis state never relaxes toward
    /// the coherent Gibbs state; kept for comparison.
    Zero,
    /// Uniform superposition, the stationary state of the first (`beta = 0`)
    /// walk, which the anneal then tracks.
    #[default]
    Uniform,
}

/// Applies `U(beta_i)` once per schedule step starting from the uniform
/// superposition, refreshing the coin rotations before every step.
pub fn lhpst_anneal(energies: &EnergyTable, sched: &AnnealSchedule) -> WalkState {
    lhpst_anneal_from(energies, sched, WalkStart::default())
}

pub fn lhpst_anneal_from(
    energies: &EnergyTable,
    sched: &AnnealSchedule,
    start: WalkStart,
) -> WalkState {
    let mut ops = WalkOperators::new(energies.clone(), sched.beta_start);
    let mut psi = match start {
        WalkStart::Zero => WalkState::initial(ops.layout()),
        WalkStart::Uniform => WalkState::uniform(ops.layout()),
    };
    for beta in sched.betas() {
        ops.set_beta(beta);
        ops.apply_step(&mut psi);
    }
    psi
}

/// `sum_x E(x) P(System = x)`.
pub fn energy_expectation(energies: &EnergyTable, psi: &WalkState) -> Result<f64> {
    let deviation = (psi.norm() - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    if psi.layout.n != energies.n() {
        return Err(Error::InvalidConfig(format!(
            "state has {} system qubits, energies cover {}",
            psi.layout.n,
            energies.n()
        )));
    }
    Ok(psi
        .system_marginal()
        .iter()
        .zip(energies.as_slice())
        .map(|(p, &e)| p * e as f64)
        .sum())
}
