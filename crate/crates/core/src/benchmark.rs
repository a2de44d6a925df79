//! Per-instance steps-to-quality measurements and the sweep over
//! `(method, n, instance)` cells.
//!
//! Random sampling, Metropolis-Hastings and the quantum walk are scored by
//! the number of steps needed to reach `E_avg <= alpha * E_gs`. Brute force
//! and Grover adaptive search are scored by the steps needed to find a ground
//! state (with probability above `1 - epsilon` for GAS).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{brute_force_steps, mh_anneal, AnnealSchedule, RandomSampler};
use crate::error::{Error, Result};
use crate::quantum::{
    energy_expectation, gas_run, lhpst_anneal, GasParams, DEFAULT_STATEVECTOR_CAP,
};
use crate::rng::{self, Purpose};
use crate::sk_model::{generate_eligible, NoCount, SolvedInstance, DEFAULT_SPECTRUM_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "BF")]
    BruteForce,
    #[serde(rename = "RS")]
    RandomSampling,
    #[serde(rename = "MH")]
    MetropolisHastings,
    #[serde(rename = "GAS")]
    Grover,
    #[serde(rename = "LHPST")]
    QuantumWalk,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::BruteForce,
        Method::RandomSampling,
        Method::MetropolisHastings,
        Method::Grover,
        Method::QuantumWalk,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::BruteForce => "BF",
            Method::RandomSampling => "RS",
            Method::MetropolisHastings => "MH",
            Method::Grover => "GAS",
            Method::QuantumWalk => "LHPST",
        }
    }

    pub fn is_quantum(self) -> bool {
        matches!(self, Method::Grover | Method::QuantumWalk)
    }

    /// Methods scored against the approximation-ratio target rather than the
    /// exact ground state.
    pub fn is_approximate(self) -> bool {
        matches!(
            self,
            Method::RandomSampling | Method::MetropolisHastings | Method::QuantumWalk
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub samples_per_instance: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub beta_final: f64,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    /// Step cap is `2^(n + t_max_offset)`.
    pub t_max_offset: u32,
    pub spectrum_cap: usize,
    pub statevector_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: (8..=13).collect(),
            instances_per_size: 100,
            samples_per_instance: 100,
            alpha: 0.9,
            epsilon: 0.016,
            lambda: 6.0 / 5.0,
            beta_final: 1.0,
            master_seed: 20_240_917,
            methods: Method::ALL.to_vec(),
            t_max_offset: 4,
            spectrum_cap: DEFAULT_SPECTRUM_CAP,
            statevector_cap: DEFAULT_STATEVECTOR_CAP,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.lambda.is_nan() || self.lambda <= 1.0 {
            return bad(format!("lambda must exceed 1, got {}", self.lambda));
        }
        if !(self.beta_final >= 0.0 && self.beta_final.is_finite()) {
            return bad(format!(
                "beta_final must be finite and >= 0, got {}",
                self.beta_final
            ));
        }
        if self.sizes.is_empty() || self.methods.is_empty() {
            return bad("sizes and methods must be nonempty".into());
        }
        if self.instances_per_size == 0 || self.samples_per_instance == 0 {
            return bad("instance and sample counts must be positive".into());
        }
        for &n in &self.sizes {
            if n < 2 {
                return bad(format!("size {n} is below 2 spins"));
            }
            if n > self.spectrum_cap {
                return bad(format!(
                    "size {n} exceeds the spectrum cap {}",
                    self.spectrum_cap
                ));
            }
            if self.methods.contains(&Method::QuantumWalk) && n > self.statevector_cap {
                return bad(format!(
                    "size {n} exceeds the statevector cap {}",
                    self.statevector_cap
                ));
            }
            if n + self.t_max_offset as usize >= 63 {
                return bad(format!(
                    "step cap 2^{} overflows",
                    n + self.t_max_offset as usize
                ));
            }
        }
        Ok(())
    }

    pub fn t_max(&self, n: usize) -> u64 {
        1u64 << (n as u32 + self.t_max_offset)
    }

    pub fn gas_params(&self) -> GasParams {
        GasParams {
            epsilon: self.epsilon,
            lambda: self.lambda,
        }
    }

    /// Every cell of the sweep in canonical order (method, n, instance).
    pub fn cells(&self) -> Vec<CellKey> {
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        let mut sizes = self.sizes.clone();
        sizes.sort();
        sizes.dedup();
        let mut cells = Vec::new();
        for &method in &methods {
            for &n in &sizes {
                for instance in 0..self.instances_per_size {
                    cells.push(CellKey {
                        method,
                        n,
                        instance,
                    });
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub method: Method,
    pub n: usize,
    pub instance: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Resolved,
    /// The step cap was reached first; excluded from fits.
    Unresolved,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Resolved => "resolved",
            Status::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub n: usize,
    pub instance: usize,
    pub status: Status,
    /// Steps to reach the target; the cap for unresolved cells.
    pub steps: u64,
    pub e_gs: f64,
    /// Energy measure at `steps`: sample mean (RS, MH), state expectation
    /// (LHPST, GAS) or the ground energy itself (BF).
    pub e_avg: f64,
    /// Informational only; never written to the record CSV.
    #[serde(skip)]
    pub wallclock_secs: f64,
}

impl BenchRecord {
    pub fn key(&self) -> CellKey {
        CellKey {
            method: self.method,
            n: self.n,
            instance: self.instance,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.status == Status::Resolved
    }
}

/// Outcome of a steps-to-quality search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub status: Status,
    pub steps: u64,
    pub e_avg: f64,
}

/// Smallest `T` in `1..=t_max` with `eval(T) <= target`, searched by doubling
/// from 1 and then bisecting the last bracket. `eval` is assumed
/// nonincreasing in expectation; the returned `T` always satisfies the bound
/// as measured.
pub fn minimal_steps<F: FnMut(u64) -> f64>(t_max: u64, target: f64, mut eval: F) -> StepOutcome {
    let mut lo = 0u64;
    let mut hi = 1u64;
    let mut e_hi;
    loop {
        e_hi = eval(hi);
        if e_hi <= target {
            break;
        }
        if hi >= t_max {
            return StepOutcome {
                status: Status::Unresolved,
                steps: t_max,
                e_avg: e_hi,
            };
        }
        lo = hi;
        hi = (hi * 2).min(t_max);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let e = eval(mid);
        if e <= target {
            hi = mid;
            e_hi = e;
        } else {
            lo = mid;
        }
    }
    StepOutcome {
        status: Status::Resolved,
        steps: hi,
        e_avg: e_hi,
    }
}

fn stream_keys(solved: &SolvedInstance) -> [u64; 2] {
    [solved.instance.n() as u64, solved.index as u64]
}

/// Steps for random sampling, Metropolis-Hastings or the quantum walk to
/// reach `E_avg <= alpha * E_gs`.
pub fn steps_to_aear(
    method: Method,
    solved: &SolvedInstance,
    config: &BenchConfig,
) -> Result<StepOutcome> {
    let e_gs = solved.spectrum.e_gs();
    if e_gs >= 0.0 {
        return Err(Error::Ineligible { e_gs });
    }
    let target = config.alpha * e_gs;
    let n = solved.instance.n();
    let t_max = config.t_max(n);
    let [kn, ki] = stream_keys(solved);
    let table = &solved.table;
    match method {
        Method::RandomSampling => {
            let samples = config.samples_per_instance;
            let mut rngs: Vec<_> = (0..samples as u64)
                .map(|s| rng::stream(config.master_seed, Purpose::RandomSampling, &[kn, ki, s]))
                .collect();
            let mut samplers: Vec<RandomSampler> = rngs
                .iter_mut()
                .map(|r| RandomSampler::start(table, r, &NoCount))
                .collect();
            let mut sum: i64 = samplers.iter().map(|s| s.best()).sum();
            let mut step = 1u64;
            loop {
                let mean = sum as f64 / samples as f64;
                if mean <= target {
                    return Ok(StepOutcome {
                        status: Status::Resolved,
                        steps: step,
                        e_avg: mean,
                    });
                }
                if step >= t_max {
                    return Ok(StepOutcome {
                        status: Status::Unresolved,
                        steps: t_max,
                        e_avg: mean,
                    });
                }
                for (s, r) in samplers.iter_mut().zip(rngs.iter_mut()) {
                    let before = s.best();
                    sum += s.step(table, r, &NoCount) - before;
                }
                step += 1;
            }
        }
        Method::MetropolisHastings => {
            let samples = config.samples_per_instance;
            Ok(minimal_steps(t_max, target, |t| {
                let mut r = rng::stream(config.master_seed, Purpose::Metropolis, &[kn, ki, t]);
                let sched = AnnealSchedule::linear(config.beta_final, t);
                let total: i64 = (0..samples)
                    .map(|_| mh_anneal(table, &sched, &mut r).1)
                    .sum();
                total as f64 / samples as f64
            }))
        }
        Method::QuantumWalk => {
            if n > config.statevector_cap {
                return Err(Error::CapExceeded {
                    n,
                    cap: config.statevector_cap,
                });
            }
            Ok(minimal_steps(t_max, target, |t| {
                let psi = lhpst_anneal(table, &AnnealSchedule::linear(config.beta_final, t));
                energy_expectation(table, &psi).expect("unitary evolution keeps the norm")
            }))
        }
        other => Err(Error::InvalidConfig(format!(
            "{other} is not scored by the approximation ratio"
        ))),
    }
}

/// Oracle calls for Grover adaptive search to exceed success probability
/// `1 - epsilon` on the ground set.
pub fn steps_to_success_gas(solved: &SolvedInstance, config: &BenchConfig) -> StepOutcome {
    let [kn, ki] = stream_keys(solved);
    let mut r = rng::stream(config.master_seed, Purpose::Grover, &[kn, ki]);
    let run = gas_run(&solved.spectrum, &config.gas_params(), &mut r);
    // Measured energy: ground with the success probability, otherwise a
    // uniformly weighted non-solution. All energies sum to zero.
    let size = solved.table.as_slice().len() as f64;
    let t = run.solutions as f64;
    let e_gs = solved.spectrum.e_gs();
    let rest = if size > t {
        -t * e_gs / (size - t)
    } else {
        0.0
    };
    StepOutcome {
        status: if run.resolved {
            Status::Resolved
        } else {
            Status::Unresolved
        },
        steps: run.total_calls,
        e_avg: run.final_success * e_gs + (1.0 - run.final_success) * rest,
    }
}

pub fn run_cell(
    method: Method,
    solved: &SolvedInstance,
    config: &BenchConfig,
) -> Result<BenchRecord> {
    let start = Instant::now();
    let e_gs = solved.spectrum.e_gs();
    let outcome = match method {
        Method::BruteForce => StepOutcome {
            status: Status::Resolved,
            steps: brute_force_steps(&solved.table, e_gs as i64),
            e_avg: e_gs,
        },
        Method::Grover => steps_to_success_gas(solved, config),
        approx => steps_to_aear(approx, solved, config)?,
    };
    if outcome.status == Status::Unresolved {
        log::warn!(
            "{method} n={} instance={} hit the step cap {}",
            solved.instance.n(),
            solved.index,
            outcome.steps
        );
    }
    Ok(BenchRecord {
        method,
        n: solved.instance.n(),
        instance: solved.index,
        status: outcome.status,
        steps: outcome.steps,
        e_gs,
        e_avg: outcome.e_avg,
        wallclock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Generates (or regenerates, for ineligible draws) every instance of the
/// sweep, in parallel.
pub fn solve_instances(config: &BenchConfig) -> Result<BTreeMap<(usize, usize), SolvedInstance>> {
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for &n in &config.sizes {
        for i in 0..config.instances_per_size {
            keys.push((n, i));
        }
    }
    keys.sort();
    keys.dedup();
    keys.par_iter()
        .map(|&(n, i)| {
            generate_eligible(n, config.master_seed, i, config.spectrum_cap).map(|s| ((n, i), s))
        })
        .collect()
}

/// Runs every cell not in `skip`, calling `on_record` as each finishes, and
/// returns the new records in canonical order.
pub fn run_suite_with<S, F>(
    config: &BenchConfig,
    instances: &BTreeMap<(usize, usize), SolvedInstance>,
    skip: S,
    on_record: F,
) -> Result<Vec<BenchRecord>>
where
    S: Fn(&CellKey) -> bool + Sync,
    F: Fn(&BenchRecord) + Sync,
{
    config.validate()?;
    let pending: Vec<CellKey> = config.cells().into_iter().filter(|c| !skip(c)).collect();
    // Heavy cells first so the pool does not idle on a long tail.
    let mut order: Vec<usize> = (0..pending.len()).collect();
    order.sort_by_key(|&i| {
        let c = &pending[i];
        (
            std::cmp::Reverse(c.method == Method::QuantumWalk),
            std::cmp::Reverse(c.n),
            i,
        )
    });
    let mut done: Vec<(usize, BenchRecord)> = order
        .par_iter()
        .map(|&i| {
            let cell = pending[i];
            let solved = instances.get(&(cell.n, cell.instance)).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "missing instance n={} index={}",
                    cell.n, cell.instance
                ))
            })?;
            let record = run_cell(cell.method, solved, config)?;
            on_record(&record);
            Ok((i, record))
        })
        .collect::<Result<_>>()?;
    done.sort_by_key(|(i, _)| *i);
    Ok(done.into_iter().map(|(_, r)| r).collect())
}

/// Full sweep: one record per `(method, n, instance)`, deterministic in the
/// master seed regardless of thread count.
pub fn run_suite(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let instances = solve_instances(config)?;
    run_suite_with(config, &instances, |_| false, |_| {})
}

pub const RECORD_HEADER: &str = "method,n,instance,T,e_gs,e_avg,status";

pub fn record_csv_line(r: &BenchRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.method,
        r.n,
        r.instance,
        r.steps,
        r.e_gs,
        r.e_avg,
        r.status.as_str()
    )
}

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RECORD_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_csv_line(r));
        out.push('\n');
    }
    out
}

pub fn parse_record_line(line: &str) -> Result<BenchRecord> {
    let bad = || Error::InvalidConfig(format!("malformed record line {line:?}"));
    let f: Vec<&str> = line.trim_end().split(',').collect();
    if f.len() != 7 {
        return Err(bad());
    }
    let status = match f[6] {
        "resolved" => Status::Resolved,
        "unresolved" => Status::Unresolved,
        _ => return Err(bad()),
    };
    Ok(BenchRecord {
        method: f[0].parse()?,
        n: f[1].parse().map_err(|_| bad())?,
        instance: f[2].parse().map_err(|_| bad())?,
        steps: f[3].parse().map_err(|_| bad())?,
        e_gs: f[4].parse().map_err(|_| bad())?,
        e_avg: f[5].parse().map_err(|_| bad())?,
        status,
        wallclock_secs: 0.0,
    })
}

/// Parses a record CSV. A truncated final line (from an interrupted write)
/// is dropped; malformed lines elsewhere are errors.
pub fn records_from_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == RECORD_HEADER => {}
        Some(h) => return Err(Error::InvalidConfig(format!("unexpected header {h:?}"))),
        None => return Ok(Vec::new()),
    }
    let body: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
    let complete = text.ends_with('\n');
    let mut out = Vec::with_capacity(body.len());
    for (i, line) in body.iter().enumerate() {
        match parse_record_line(line) {
            Ok(r) => out.push(r),
            Err(_) if i + 1 == body.len() && !complete => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Tukey box-plot summary with whiskers at the most extreme samples within
/// 1.5 IQR of the quartiles. Quartiles interpolate linearly between order
/// statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
    pub count: usize,
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn box_stats(samples: &[f64]) -> Result<BoxStats> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|&v| v >= lo_fence && v <= hi_fence)
        .collect();
    Ok(BoxStats {
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        whisker_low: inside.first().copied().unwrap_or(q1),
        whisker_high: inside.last().copied().unwrap_or(q3),
        outliers: sorted
            .iter()
            .copied()
            .filter(|&v| v < lo_fence || v > hi_fence)
            .collect(),
        count: sorted.len(),
    })
}

/// Mean steps and box statistics of the resolved records of one
/// `(method, n)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub method: Method,
    pub n: usize,
    pub mean_steps: f64,
    pub resolved: usize,
    pub unresolved: usize,
    pub stats: BoxStats,
}

pub fn summarize(records: &[BenchRecord]) -> Vec<SeriesPoint> {
    let mut groups: BTreeMap<(Method, usize), (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let entry = groups.entry((r.method, r.n)).or_default();
        if r.is_resolved() {
            entry.0.push(r.steps as f64);
        } else {
            entry.1 += 1;
        }
    }
    groups
        .into_iter()
        .filter(|(_, (steps, _))| !steps.is_empty())
        .map(|((method, n), (steps, unresolved))| SeriesPoint {
            method,
            n,
            mean_steps: steps.iter().sum::<f64>() / steps.len() as f64,
            resolved: steps.len(),
            unresolved,
            stats: box_stats(&steps).expect("nonempty"),
        })
        .collect()
}

/// `E_1 / E_gs` of one instance. Values at most `alpha` mean the
/// approximation target already excludes every excited level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioGapSample {
    pub n: usize,
    pub instance: usize,
    pub e_gs: f64,
    pub e_1: f64,
    pub ratio: f64,
}

/// Ratio gaps over the same eligible instances the sweep uses, for every
/// size in `sizes`.
pub fn ratio_gap_series(
    sizes: &[usize],
    instances: usize,
    master_seed: u64,
    cap: usize,
) -> Result<Vec<RatioGapSample>> {
    let keys: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..instances).map(move |i| (n, i)))
        .collect();
    keys.par_iter()
        .map(|&(n, i)| {
            let solved = generate_eligible(n, master_seed, i, cap)?;
            Ok(RatioGapSample {
                n,
                instance: i,
                e_gs: solved.spectrum.e_gs(),
                e_1: solved.spectrum.e_1(),
                ratio: solved.spectrum.ratio_gap()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(methods: Vec<Method>) -> BenchConfig {
        BenchConfig {
            sizes: vec![8],
            instances_per_size: 2,
            samples_per_instance: 20,
            methods,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn default_config_is_valid() {
        let c = BenchConfig::default();
        c.validate().unwrap();
        assert_eq!(c.sizes, vec![8, 9, 10, 11, 12, 13]);
        assert_eq!(c.instances_per_size, 100);
        assert_eq!(c.samples_per_instance, 100);
        assert_eq!(c.alpha, 0.9);
        assert_eq!(c.epsilon, 0.016);
        assert_eq!(c.beta_final, 1.0);
        assert_eq!(c.t_max(13), 1 << 17);
    }

    #[test]
    fn alpha_outside_unit_interval_rejected() {
        for alpha in [0.0, 1.0, 1.1, -0.5, f64::NAN] {
            let c = BenchConfig {
                alpha,
                ..BenchConfig::default()
            };
            assert!(
                matches!(c.validate(), Err(Error::InvalidConfig(_))),
                "alpha {alpha}"
            );
        }
        let c = BenchConfig {
            epsilon: 1.0,
            ..BenchConfig::default()
        };
        assert!(c.validate().is_err());
        let c = BenchConfig {
            sizes: vec![14],
            ..BenchConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn method_labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert!("QAOA".parse::<Method>().is_err());
    }

    #[test]
    fn minimal_steps_finds_threshold() {
        // Deterministic decreasing curve: E(T) = -T.
        let out = minimal_steps(1 << 10, -37.0, |t| -(t as f64));
        assert_eq!(out.status, Status::Resolved);
        assert_eq!(out.steps, 37);
        let out = minimal_steps(1 << 10, 0.0, |t| -(t as f64));
        assert_eq!(out.steps, 1);
        let out = minimal_steps(16, -100.0, |t| -(t as f64));
        assert_eq!(out.status, Status::Unresolved);
        assert_eq!(out.steps, 16);
    }

    #[test]
    fn minimal_steps_result_always_satisfies_bound() {
        // Non-monotone curve: the reported T must still satisfy the bound.
        let f = |t: u64| {
            if t.is_multiple_of(3) {
                -10.0
            } else {
                (20 - t as i64) as f64
            }
        };
        let out = minimal_steps(1 << 8, -5.0, f);
        assert!(f(out.steps) <= -5.0);
    }

    #[test]
    fn brute_force_cardinality_and_determinism() {
        let c = small_config(vec![Method::BruteForce]);
        let a = run_suite(&c).unwrap();
        assert_eq!(a.len(), 2);
        let b = run_suite(&c).unwrap();
        assert_eq!(records_to_csv(&a), records_to_csv(&b));
        for r in &a {
            assert!(r.steps >= 1 && r.steps <= 256);
            assert_eq!(r.e_avg, r.e_gs);
        }
    }

    #[test]
    fn approximate_records_meet_the_bound() {
        let c = small_config(vec![
            Method::RandomSampling,
            Method::MetropolisHastings,
            Method::QuantumWalk,
        ]);
        for r in run_suite(&c).unwrap() {
            assert!(r.steps >= 1);
            if r.is_resolved() {
                assert!(r.e_avg <= c.alpha * r.e_gs, "{r:?}");
            }
        }
    }

    #[test]
    fn gas_records_reach_target() {
        let c = small_config(vec![Method::Grover]);
        for r in run_suite(&c).unwrap() {
            assert!(r.is_resolved());
            assert!(r.steps >= 1);
            assert!(r.e_avg < 0.99 * r.e_gs);
        }
    }

    #[test]
    fn random_sampling_steps_monotone_in_alpha() {
        let base = small_config(vec![Method::RandomSampling]);
        let instances = solve_instances(&base).unwrap();
        for solved in instances.values() {
            let mut last = u64::MAX;
            for alpha in [0.5, 0.6, 0.7, 0.8, 0.9, 0.95] {
                let c = BenchConfig {
                    alpha,
                    ..base.clone()
                };
                let t = steps_to_aear(Method::RandomSampling, solved, &c)
                    .unwrap()
                    .steps;
                // Larger alpha is a looser target.
                assert!(
                    t >= if last == u64::MAX { 0 } else { last },
                    "alpha {alpha}"
                );
                last = t;
            }
        }
    }

    #[test]
    fn bf_and_gas_are_not_aear_methods() {
        let c = small_config(vec![Method::BruteForce]);
        let instances = solve_instances(&c).unwrap();
        let solved = instances.values().next().unwrap();
        assert!(steps_to_aear(Method::BruteForce, solved, &c).is_err());
        assert!(steps_to_aear(Method::Grover, solved, &c).is_err());
    }

    #[test]
    fn csv_round_trip_and_truncation() {
        let c = small_config(vec![Method::BruteForce, Method::Grover]);
        let records = run_suite(&c).unwrap();
        let text = records_to_csv(&records);
        assert!(text.starts_with("method,n,instance,T,e_gs,e_avg,status\n"));
        let back = records_from_csv(&text).unwrap();
        assert_eq!(records_to_csv(&back), text);
        let truncated = &text[..text.len() - 5];
        assert_eq!(
            records_from_csv(truncated).unwrap().len(),
            records.len() - 1
        );
        assert!(records_from_csv("bogus\n").is_err());
    }

    #[test]
    fn box_stats_examples() {
        let b = box_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (2.0, 3.0, 4.0));
        assert_eq!((b.min, b.max), (1.0, 5.0));
        assert!(b.outliers.is_empty());

        let b = box_stats(&[7.0; 9]).unwrap();
        assert!([b.min, b.q1, b.median, b.q3, b.max]
            .iter()
            .all(|&v| v == 7.0));
        assert!(b.outliers.is_empty());

        let b = box_stats(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(b.outliers, vec![100.0]);
        assert_eq!(b.whisker_high, 4.0);

        assert_eq!(box_stats(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn ratio_gaps_lie_in_unit_interval() {
        let samples = ratio_gap_series(&[8, 9], 5, 7, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(samples.len(), 10);
        for s in samples {
            assert!(s.e_1 > s.e_gs);
            assert!(s.ratio < 1.0 && s.ratio == s.e_1 / s.e_gs);
        }
    }

    #[test]
    fn summary_excludes_unresolved() {
        let mk = |instance, steps, status| BenchRecord {
            method: Method::MetropolisHastings,
            n: 9,
            instance,
            status,
            steps,
            e_gs: -20.0,
            e_avg: -19.0,
            wallclock_secs: 0.0,
        };
        let s = summarize(&[
            mk(0, 10, Status::Resolved),
            mk(1, 30, Status::Resolved),
            mk(2, 512, Status::Unresolved),
        ]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean_steps, 20.0);
        assert_eq!((s[0].resolved, s[0].unresolved), (2, 1));
    }
}
