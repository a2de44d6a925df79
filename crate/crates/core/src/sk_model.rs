//! Sherrington-Kirkpatrick instances, energies and exact spectra.
//!
//! A configuration of `n` spins is stored as an `n`-bit integer. Bit `j`
//! clear means `s_j = +1`, bit `j` set means `s_j = -1`, so a configuration
//! doubles as an index into any length-`2^n` vector (Gibbs weights,
//! statevector amplitudes, energy tables).
//!
//! The objective is `E(s) = sum_{i != j} w_ij s_i s_j` over ordered pairs,
//! with symmetric couplings `w_ij = w_ji = ±1` and no field term. Energies
//! are therefore even integers and are kept as `i64` internally.

use std::cell::Cell;
use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// Largest `n` enumerated by [`exact_spectrum`] unless a caller raises it.
pub const DEFAULT_SPECTRUM_CAP: usize = 20;

/// Bound on the number of regeneration attempts for ineligible instances.
const MAX_ELIGIBILITY_ATTEMPTS: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinConfig(pub u64);

impl SpinConfig {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n < 64 && bits >> n != 0 {
            return Err(Error::ConfigOutOfRange { bits, n });
        }
        Ok(SpinConfig(bits))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Spin value `s_j` in `{-1, +1}`.
    #[inline]
    pub fn spin(self, j: usize) -> i64 {
        1 - 2 * ((self.0 >> j) & 1) as i64
    }

    /// All spins reversed.
    pub fn flip_all(self, n: usize) -> Self {
        SpinConfig(self.0 ^ full_mask(n))
    }

    pub fn spins(self, n: usize) -> Vec<i8> {
        (0..n).map(|j| self.spin(j) as i8).collect()
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Counts the arithmetic performed on energies. The benchmarked code paths
/// are written against this trait, so the instrumented and the production
/// paths are the same code.
pub trait OpCounter {
    fn mul(&self) {}
    fn add(&self) {}
    fn sub(&self) {}
}

/// Counter that records nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoCount;

impl OpCounter for NoCount {}

/// Tally of multiplications, additions and subtractions.
#[derive(Debug, Default)]
pub struct FlopCounter {
    muls: Cell<u64>,
    adds: Cell<u64>,
    subs: Cell<u64>,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.muls.get() + self.adds.get() + self.subs.get()
    }

    pub fn muls(&self) -> u64 {
        self.muls.get()
    }

    pub fn adds(&self) -> u64 {
        self.adds.get()
    }

    pub fn subs(&self) -> u64 {
        self.subs.get()
    }

    pub fn reset(&self) {
        self.muls.set(0);
        self.adds.set(0);
        self.subs.set(0);
    }
}

impl OpCounter for FlopCounter {
    fn mul(&self) {
        self.muls.set(self.muls.get() + 1);
    }
    fn add(&self) {
        self.adds.set(self.adds.get() + 1);
    }
    fn sub(&self) {
        self.subs.set(self.subs.get() + 1);
    }
}

/// Anything that assigns an integer energy to every configuration of `n`
/// spins.
pub trait Landscape: Sync {
    fn n(&self) -> usize;

    /// Energy of `s`, reporting any arithmetic performed to `ops`.
    fn energy_with<C: OpCounter>(&self, s: SpinConfig, ops: &C) -> i64;

    #[inline]
    fn energy_of(&self, s: SpinConfig) -> i64 {
        self.energy_with(s, &NoCount)
    }
}

/// One SK instance: a symmetric `n x n` matrix of `±1` couplings with zero
/// diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkInstance {
    n: usize,
    seed: u64,
    w: Vec<i8>,
}

impl SkInstance {
    /// Builds an instance from its upper-triangle couplings in row-major
    /// order (`w_01, w_02, ..., w_0(n-1), w_12, ...`).
    pub fn from_upper(n: usize, seed: u64, upper: &[i8]) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSpins(n));
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidInstance(format!(
                "expected {expected} couplings for n = {n}, got {}",
                upper.len()
            )));
        }
        if let Some(bad) = upper.iter().find(|&&c| c != 1 && c != -1) {
            return Err(Error::InvalidInstance(format!("coupling {bad} is not ±1")));
        }
        let mut w = vec![0i8; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let c = *it.next().expect("length checked");
                w[i * n + j] = c;
                w[j * n + i] = c;
            }
        }
        Ok(SkInstance { n, seed, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> i8 {
        self.w[i * self.n + j]
    }

    pub fn upper_triangle(&self) -> Vec<i8> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.coupling(i, j))
            .collect()
    }

    pub fn num_states(&self) -> usize {
        1usize << self.n
    }

    /// `E(s)` over all ordered pairs `i != j`.
    #[inline]
    pub fn energy(&self, s: SpinConfig) -> i64 {
        self.energy_counted(s, &NoCount)
    }

    /// Same double loop as [`SkInstance::energy`], reporting one product per
    /// ordered pair and one addition per accumulated term. The sign
    /// `s_i s_j` is a parity of two bits and is not arithmetic.
    pub fn energy_counted<C: OpCounter>(&self, s: SpinConfig, ops: &C) -> i64 {
        let n = self.n;
        let bits = s.bits();
        let mut total: i64 = 0;
        let mut first = true;
        for i in 0..n {
            let row = &self.w[i * n..(i + 1) * n];
            let bi = (bits >> i) & 1;
            for (j, &wij) in row.iter().enumerate() {
                if j == i {
                    continue;
                }
                let same = bi == (bits >> j) & 1;
                let sign: i64 = if same { 1 } else { -1 };
                let term = wij as i64 * sign;
                ops.mul();
                if first {
                    total = term;
                    first = false;
                } else {
                    total += term;
                    ops.add();
                }
            }
        }
        total
    }

    /// `E(s) - E(s with bit j flipped)`, computed from the local field in
    /// `O(n)`.
    pub fn flip_gain(&self, s: SpinConfig, j: usize) -> i64 {
        let n = self.n;
        let row = &self.w[j * n..(j + 1) * n];
        let field: i64 = row
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(k, &w)| w as i64 * s.spin(k))
            .sum();
        4 * s.spin(j) * field
    }
}

impl Landscape for SkInstance {
    fn n(&self) -> usize {
        self.n
    }

    fn energy_with<C: OpCounter>(&self, s: SpinConfig, ops: &C) -> i64 {
        self.energy_counted(s, ops)
    }
}

/// Draws the `n(n-1)/2` independent couplings uniformly from `{-1, +1}`
/// with a ChaCha8 stream seeded by `seed`.
pub fn generate_instance(n: usize, seed: u64) -> Result<SkInstance> {
    if n < 2 {
        return Err(Error::TooFewSpins(n));
    }
    let mut rng = rng::stream(seed, Purpose::Instance, &[n as u64]);
    let upper: Vec<i8> = (0..n * (n - 1) / 2)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();
    SkInstance::from_upper(n, seed, &upper)
}

/// Seed of the `attempt`-th draw for instance `index` at size `n`.
pub fn instance_seed(master_seed: u64, n: usize, index: usize, attempt: u64) -> u64 {
    rng::derive_seed(master_seed, &[n as u64, index as u64, attempt])
}

/// An instance together with its exact spectrum and energy table.
#[derive(Debug, Clone)]
pub struct SolvedInstance {
    pub index: usize,
    pub instance: SkInstance,
    pub table: EnergyTable,
    pub spectrum: Spectrum,
    /// Number of rejected draws before this one.
    pub regenerated: u64,
}

/// Generates instance `index` at size `n`, redrawing with the next sub-seed
/// while the ground energy is not negative.
pub fn generate_eligible(
    n: usize,
    master_seed: u64,
    index: usize,
    cap: usize,
) -> Result<SolvedInstance> {
    for attempt in 0..MAX_ELIGIBILITY_ATTEMPTS {
        let instance = generate_instance(n, instance_seed(master_seed, n, index, attempt))?;
        let table = EnergyTable::build(&instance, cap)?;
        let spectrum = Spectrum::from_table(&table);
        if spectrum.e_gs() < 0.0 {
            return Ok(SolvedInstance {
                index,
                instance,
                table,
                spectrum,
                regenerated: attempt,
            });
        }
        log::warn!(
            "instance n={n} index={index} attempt={attempt} has E_gs = {} >= 0; regenerating",
            spectrum.e_gs()
        );
    }
    Err(Error::InvalidInstance(format!(
        "no eligible instance for n = {n}, index = {index} after {MAX_ELIGIBILITY_ATTEMPTS} draws"
    )))
}

/// Energies of all `2^n` configurations, indexed by configuration bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyTable {
    n: usize,
    energies: Vec<i64>,
}

impl EnergyTable {
    /// Fills the table in Gray-code order, updating local fields in `O(n)`
    /// per configuration.
    pub fn build(inst: &SkInstance, cap: usize) -> Result<Self> {
        let n = inst.n();
        if n > cap || n >= usize::BITS as usize - 1 {
            return Err(Error::CapExceeded { n, cap });
        }
        let size = 1usize << n;
        let mut energies = vec![0i64; size];
        let mut spins = vec![1i64; n];
        let mut field: Vec<i64> = (0..n)
            .map(|k| (0..n).map(|l| inst.coupling(k, l) as i64).sum())
            .collect();
        let mut e: i64 = field.iter().sum();
        let mut x = 0usize;
        energies[0] = e;
        for step in 1..size {
            let j = step.trailing_zeros() as usize;
            let old = spins[j];
            e -= 4 * old * field[j];
            for (k, f) in field.iter_mut().enumerate() {
                *f -= 2 * inst.coupling(k, j) as i64 * old;
            }
            spins[j] = -old;
            x ^= 1 << j;
            energies[x] = e;
        }
        Ok(EnergyTable { n, energies })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.energies
    }

    #[inline]
    pub fn get(&self, index: usize) -> i64 {
        self.energies[index]
    }
}

impl Landscape for EnergyTable {
    fn n(&self) -> usize {
        self.n
    }

    /// A lookup; no arithmetic to report.
    #[inline]
    fn energy_with<C: OpCounter>(&self, s: SpinConfig, _ops: &C) -> i64 {
        self.energies[s.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub energy: i64,
    pub degeneracy: u64,
}

/// Exact enumeration result for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    ground_set: Vec<SpinConfig>,
    levels: Vec<Level>,
}

impl Spectrum {
    pub fn from_table(table: &EnergyTable) -> Self {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for &e in table.as_slice() {
            *counts.entry(e).or_default() += 1;
        }
        let levels: Vec<Level> = counts
            .into_iter()
            .map(|(energy, degeneracy)| Level { energy, degeneracy })
            .collect();
        let e_min = levels[0].energy;
        let ground_set = table
            .as_slice()
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e == e_min)
            .map(|(x, _)| SpinConfig(x as u64))
            .collect();
        Spectrum {
            n: table.n(),
            ground_set,
            levels,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn e_gs(&self) -> f64 {
        self.levels[0].energy as f64
    }

    /// Second distinct energy level. Every instance with `n >= 2` has a
    /// non-constant energy, so this level exists.
    pub fn e_1(&self) -> f64 {
        self.levels[1].energy as f64
    }

    pub fn ground_set(&self) -> &[SpinConfig] {
        &self.ground_set
    }

    /// Distinct energies in increasing order with their degeneracies.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `E_1 / E_gs`, defined only for instances with negative ground energy.
    pub fn ratio_gap(&self) -> Result<f64> {
        let e_gs = self.e_gs();
        if e_gs >= 0.0 {
            return Err(Error::Ineligible { e_gs });
        }
        Ok(self.e_1() / e_gs)
    }
}

/// Enumerates all `2^n` configurations of `inst`, refusing `n` above
/// [`DEFAULT_SPECTRUM_CAP`].
pub fn exact_spectrum(inst: &SkInstance) -> Result<Spectrum> {
    exact_spectrum_capped(inst, DEFAULT_SPECTRUM_CAP)
}

pub fn exact_spectrum_capped(inst: &SkInstance, cap: usize) -> Result<Spectrum> {
    Ok(Spectrum::from_table(&EnergyTable::build(inst, cap)?))
}

pub fn ratio_gap(inst: &SkInstance) -> Result<f64> {
    exact_spectrum(inst)?.ratio_gap()
}

/// On-disk form of an instance: upper-triangle couplings in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub seed: u64,
    pub couplings: Vec<i8>,
}

impl From<&SkInstance> for InstanceFile {
    fn from(inst: &SkInstance) -> Self {
        InstanceFile {
            n: inst.n(),
            seed: inst.seed(),
            couplings: inst.upper_triangle(),
        }
    }
}

impl TryFrom<InstanceFile> for SkInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        SkInstance::from_upper(file.n, file.seed, &file.couplings)
    }
}

impl SkInstance {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))?;
        file.try_into()
    }
}
