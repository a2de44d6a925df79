//! Scaling fits, per-step operation counts and wall-clock projections.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::benchmark::{BenchRecord, Method};
use crate::classical::{AnnealSchedule, MetropolisWalker, MhOptions, RandomSampler};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sk_model::{generate_instance, FlopCounter, Landscape, OpCounter, SpinConfig};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const DAYS_PER_GALACTIC_YEAR: f64 = 2.3e8 * 365.25;

/// Published scaling fits `b * 2^(c n)` used as reference points.
pub const REFERENCE_SCALING: [(Method, f64, f64); 5] = [
    (Method::BruteForce, 0.34, 0.94),
    (Method::RandomSampling, 3.05, 0.61),
    (Method::MetropolisHastings, 14.09, 0.17),
    (Method::Grover, 4.27, 0.50),
    (Method::QuantumWalk, 8.88, 0.21),
];

/// Published wall-clock estimates in days.
pub const REFERENCE_DAYS: [(Method, usize, f64); 10] = [
    (Method::BruteForce, 64, 1.67e7),
    (Method::BruteForce, 128, 6.08e26),
    (Method::RandomSampling, 64, 1.17e3),
    (Method::RandomSampling, 128, 5.00e16),
    (Method::MetropolisHastings, 64, 6.91e-7),
    (Method::MetropolisHastings, 128, 1.70e-3),
    (Method::Grover, 64, 2.00e9),
    (Method::Grover, 128, 1.42e20),
    (Method::QuantumWalk, 64, 2.96e1),
    (Method::QuantumWalk, 128, 4.88e5),
];

pub fn reference_scaling(method: Method) -> PowerLaw {
    let &(_, b, c) = REFERENCE_SCALING
        .iter()
        .find(|(m, _, _)| *m == method)
        .expect("every method has a reference fit");
    PowerLaw { b, c }
}

pub fn reference_days(method: Method, n: usize) -> Option<f64> {
    REFERENCE_DAYS
        .iter()
        .find(|(m, k, _)| *m == method && *k == n)
        .map(|r| r.2)
}

/// `steps = b * 2^(c n)`, i.e. `b * N^c` with `N = 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub b: f64,
    pub c: f64,
}

impl PowerLaw {
    pub fn eval(&self, n: f64) -> f64 {
        self.b * (self.c * n).exp2()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub method: Method,
    pub b: f64,
    pub c: f64,
    /// Relative RMS deviation of the fitted curve from the points.
    pub residual: f64,
    pub n_range: (usize, usize),
    /// `(n, mean steps)` pairs the fit was made on.
    pub points: Vec<(usize, f64)>,
}

impl ScalingFit {
    pub fn law(&self) -> PowerLaw {
        PowerLaw {
            b: self.b,
            c: self.c,
        }
    }
}

fn relative_rms(law: &PowerLaw, points: &[(f64, f64)]) -> f64 {
    let ss: f64 = points
        .iter()
        .map(|&(n, y)| ((law.eval(n) - y) / y).powi(2))
        .sum();
    (ss / points.len() as f64).sqrt()
}

/// Least-squares fit of `b * 2^(c n)` on the linear scale by
/// Levenberg-Marquardt, started from a straight-line fit of `log2 y` on `n`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLaw> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 distinct sizes, got {}",
            distinct.len()
        )));
    }
    if points
        .iter()
        .any(|&(n, y)| y.is_nan() || y <= 0.0 || !y.is_finite() || !n.is_finite())
    {
        return Err(Error::DegenerateFit(
            "step means must be positive and finite".into(),
        ));
    }

    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1.log2()).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1.log2() - my)).sum();
    let c0 = sxy / sxx;
    let mut law = PowerLaw {
        b: (my - c0 * mx).exp2(),
        c: c0,
    };

    // Residuals are scaled by the largest mean so the damping parameter is
    // independent of units.
    let scale = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let cost = |l: &PowerLaw| -> f64 {
        points
            .iter()
            .map(|&(n, y)| ((l.eval(n) - y) / scale).powi(2))
            .sum()
    };
    let mut mu = 1e-3;
    let mut current = cost(&law);
    for _ in 0..500 {
        let mut jtj = Matrix2::<f64>::zeros();
        let mut jtr = Vector2::<f64>::zeros();
        for &(n, y) in points {
            let g = (law.c * n).exp2();
            let r = (law.b * g - y) / scale;
            let j = Vector2::new(g, law.b * g * n * std::f64::consts::LN_2) / scale;
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut improved = false;
        while mu < 1e12 {
            let damped = jtj + Matrix2::from_diagonal(&jtj.diagonal()) * mu;
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                mu *= 10.0;
                continue;
            };
            let trial = PowerLaw {
                b: law.b + step[0],
                c: law.c + step[1],
            };
            let next = if trial.b > 0.0 {
                cost(&trial)
            } else {
                f64::INFINITY
            };
            if next <= current {
                let small = step[0].abs() <= 1e-14 * law.b.abs() && step[1].abs() <= 1e-14;
                law = trial;
                current = next;
                mu = (mu / 10.0).max(1e-12);
                improved = !small;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(law)
}

/// Mean resolved steps per size for one method, fitted to `b * 2^(c n)`.
/// Unresolved records are left out.
pub fn fit_method(method: Method, records: &[BenchRecord]) -> Result<ScalingFit> {
    let mut by_n: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.method == method && r.is_resolved())
    {
        let e = by_n.entry(r.n).or_default();
        e.0 += r.steps as f64;
        e.1 += 1;
    }
    let points: Vec<(usize, f64)> = by_n
        .into_iter()
        .map(|(n, (s, k))| (n, s / k as f64))
        .collect();
    let as_f: Vec<(f64, f64)> = points.iter().map(|&(n, y)| (n as f64, y)).collect();
    let law = fit_power_law(&as_f)?;
    Ok(ScalingFit {
        method,
        b: law.b,
        c: law.c,
        residual: relative_rms(&law, &as_f),
        n_range: (points[0].0, points[points.len() - 1].0),
        points,
    })
}

/// One fit per method present in `records`, in method order.
pub fn fit_all(records: &[BenchRecord]) -> Result<Vec<ScalingFit>> {
    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    methods
        .into_iter()
        .map(|m| fit_method(m, records))
        .collect()
}

/// `a n^2 + b n + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl Quadratic {
    pub fn eval(&self, n: f64) -> f64 {
        (self.a * n + self.b) * n + self.d
    }
}

/// Least-squares quadratic through `(n, value)` points.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<Quadratic> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit(
            "a quadratic needs at least 3 distinct sizes".into(),
        ));
    }
    let a = DMatrix::from_fn(points.len(), 3, |i, j| points[i].0.powi(2 - j as i32));
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let coef = a
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    Ok(Quadratic {
        a: coef[0],
        b: coef[1],
        d: coef[2],
    })
}

/// Mean counted multiplications, additions and subtractions per main
/// subroutine call, measured on `instances` random instances of size `n`
/// over `steps` calls each.
pub fn flops_per_step(
    method: Method,
    n: usize,
    instances: usize,
    steps: u64,
    seed: u64,
) -> Result<f64> {
    if method.is_quantum() {
        return Err(Error::InvalidConfig(format!("{method} has no FLOP model")));
    }
    if n > 63 {
        return Err(Error::TooFewSpins(n));
    }
    let counter = FlopCounter::new();
    let mut total = 0u64;
    for i in 0..instances as u64 {
        let inst = generate_instance(n, rng::derive_seed(seed, &[n as u64, i]))?;
        let mut r = rng::stream(seed, Purpose::Flops, &[n as u64, i, method as u64]);
        counter.reset();
        match method {
            Method::BruteForce => {
                // The scan only ever touches the low indices at this budget.
                for x in 0..steps {
                    inst.energy_with(SpinConfig(x), &counter);
                }
            }
            Method::RandomSampling => {
                let mut s = RandomSampler::start(&inst, &mut r, &FlopCounter::new());
                for _ in 0..steps {
                    s.step(&inst, &mut r, &counter);
                }
            }
            Method::MetropolisHastings => {
                let start = SpinConfig(rand::Rng::gen::<u64>(&mut r) & ((1u64 << n) - 1));
                let mut walker = MetropolisWalker::new(&inst, start, &FlopCounter::new());
                let sched = AnnealSchedule::linear(1.0, steps);
                let inc = sched.increment();
                let mut beta = sched.beta_start;
                let opts = MhOptions::default();
                for _ in 0..steps {
                    walker.step(&inst, beta, &opts, &mut r, &counter);
                    beta += inc;
                    counter.add();
                }
            }
            _ => unreachable!(),
        }
        total += counter.total();
    }
    Ok(total as f64 / (instances as u64 * steps) as f64)
}

/// Measured FLOPs per step for `sizes` and their quadratic fit.
pub fn measure_flop_model(
    method: Method,
    sizes: &[usize],
    instances: usize,
    steps: u64,
    seed: u64,
) -> Result<(Vec<(usize, f64)>, Quadratic)> {
    let points: Vec<(usize, f64)> = sizes
        .iter()
        .map(|&n| flops_per_step(method, n, instances, steps, seed).map(|f| (n, f)))
        .collect::<Result<_>>()?;
    let q = fit_quadratic(
        &points
            .iter()
            .map(|&(n, f)| (n as f64, f))
            .collect::<Vec<_>>(),
    )?;
    Ok((points, q))
}

/// Per-step cost expressions and hardware rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceModel {
    pub bf_flops: Quadratic,
    pub rs_flops: Quadratic,
    pub mh_flops: Quadratic,
    pub flops_per_second: f64,
    pub seconds_per_toffoli: f64,
}

impl Default for ResourceModel {
    /// Published per-step FLOP polynomials, an 11 TFLOPS classical device
    /// and one second per Toffoli until calibrated.
    fn default() -> Self {
        ResourceModel {
            bf_flops: Quadratic {
                a: 1.3e2,
                b: 5.2e4,
                d: 1.2e6,
            },
            rs_flops: Quadratic {
                a: 9.5e2,
                b: 4.5e5,
                d: 1.4e6,
            },
            mh_flops: Quadratic {
                a: 6.6e3,
                b: 2.9e4,
                d: 9.8e6,
            },
            flops_per_second: 11e12,
            seconds_per_toffoli: 1.0,
        }
    }
}

impl ResourceModel {
    pub fn flops_per_step(&self, method: Method, n: usize) -> Option<f64> {
        let q = match method {
            Method::BruteForce => &self.bf_flops,
            Method::RandomSampling => &self.rs_flops,
            Method::MetropolisHastings => &self.mh_flops,
            _ => return None,
        };
        Some(q.eval(n as f64))
    }

    /// Toffolis per oracle call (GAS, logarithmic term dropped) or per walk
    /// step (LHPST).
    pub fn toffolis_per_step(&self, method: Method, n: usize) -> Option<f64> {
        let n = n as f64;
        match method {
            Method::Grover => Some(2.0 * n * n + n),
            Method::QuantumWalk => Some(5.0 * n + 11.0 * n.log2() + 98.0),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.flops_per_second > 0.0 && self.seconds_per_toffoli > 0.0) {
            return Err(Error::InvalidConfig(
                "hardware rates must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Toffolis per GAS iteration obtained by summing the per-operator table
/// instead of the summary formula.
pub fn gas_toffolis_from_operator_table(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * n + 2.0 * n - 2.0
}

pub fn classical_time_estimate(
    method: Method,
    n: usize,
    law: &PowerLaw,
    model: &ResourceModel,
) -> Result<f64> {
    let per_step = model
        .flops_per_step(method, n)
        .ok_or_else(|| Error::InvalidConfig(format!("{method} is not a classical method")))?;
    Ok(law.eval(n as f64) * per_step / model.flops_per_second / SECONDS_PER_DAY)
}

pub fn quantum_time_estimate(
    method: Method,
    n: usize,
    law: &PowerLaw,
    model: &ResourceModel,
) -> Result<f64> {
    let per_step = model
        .toffolis_per_step(method, n)
        .ok_or_else(|| Error::InvalidConfig(format!("{method} is not a quantum method")))?;
    Ok(law.eval(n as f64) * per_step * model.seconds_per_toffoli / SECONDS_PER_DAY)
}

pub fn time_estimate(
    method: Method,
    n: usize,
    law: &PowerLaw,
    model: &ResourceModel,
) -> Result<f64> {
    if method.is_quantum() {
        quantum_time_estimate(method, n, law, model)
    } else {
        classical_time_estimate(method, n, law, model)
    }
}

/// Seconds per Toffoli that makes `quantum_time_estimate(method, n)` equal
/// `anchor_days`.
pub fn calibrate_toffoli_time(
    method: Method,
    n: usize,
    anchor_days: f64,
    law: &PowerLaw,
    model: &ResourceModel,
) -> Result<f64> {
    let per_step = model
        .toffolis_per_step(method, n)
        .ok_or_else(|| Error::InvalidConfig(format!("{method} is not a quantum method")))?;
    let seconds = anchor_days * SECONDS_PER_DAY / (law.eval(n as f64) * per_step);
    log::info!("calibrated {seconds:.4e} s per Toffoli from the {method} n={n} anchor of {anchor_days:e} days");
    Ok(seconds)
}

pub fn galactic_years(days: f64) -> f64 {
    days / DAYS_PER_GALACTIC_YEAR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub method: Method,
    pub n: usize,
    pub days: f64,
    pub galactic_years: f64,
}

pub fn estimate_table(
    fits: &[ScalingFit],
    sizes: &[usize],
    model: &ResourceModel,
) -> Result<Vec<EstimateRow>> {
    model.validate()?;
    let mut rows = Vec::new();
    for fit in fits {
        for &n in sizes {
            let days = time_estimate(fit.method, n, &fit.law(), model)?;
            rows.push(EstimateRow {
                method: fit.method,
                n,
                days,
                galactic_years: galactic_years(days),
            });
        }
    }
    Ok(rows)
}

pub fn estimates_to_csv(rows: &[EstimateRow]) -> String {
    let mut out = String::from("method,n,days,galactic_years\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e}\n",
            r.method, r.n, r.days, r.galactic_years
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(b: f64, c: f64) -> Vec<(f64, f64)> {
        (8..=13)
            .map(|n| (n as f64, b * 2f64.powf(c * n as f64)))
            .collect()
    }

    #[test]
    fn exact_power_law_recovered() {
        let pts = synthetic(3.0, 0.5);
        let law = fit_power_law(&pts).unwrap();
        assert!(
            (law.b - 3.0).abs() < 1e-8 && (law.c - 0.5).abs() < 1e-8,
            "{law:?}"
        );
        assert!(relative_rms(&law, &pts) < 1e-8);
    }

    /// Independent optimum: for fixed `c` the best `b` is a linear
    /// least-squares solution, so scan `c` finely and refine.
    fn profile_fit(pts: &[(f64, f64)]) -> PowerLaw {
        let best_for = |c: f64| {
            let g: Vec<f64> = pts.iter().map(|p| (c * p.0).exp2()).collect();
            let b = g.iter().zip(pts).map(|(g, p)| g * p.1).sum::<f64>()
                / g.iter().map(|g| g * g).sum::<f64>();
            let sse: f64 = g.iter().zip(pts).map(|(g, p)| (b * g - p.1).powi(2)).sum();
            (sse, PowerLaw { b, c })
        };
        let (mut lo, mut hi) = (0.0, 2.0);
        for _ in 0..6 {
            let step = (hi - lo) / 1000.0;
            let best = (0..=1000)
                .map(|i| best_for(lo + step * i as f64))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap();
            lo = best.1.c - step;
            hi = best.1.c + step;
        }
        best_for((lo + hi) / 2.0).1
    }

    #[test]
    fn noisy_fit_matches_profile_search() {
        let mut pts = synthetic(2.0, 0.7);
        pts[0].1 *= 3.0;
        pts[3].1 *= 0.8;
        let law = fit_power_law(&pts).unwrap();
        let oracle = profile_fit(&pts);
        assert!((law.c - oracle.c).abs() < 1e-7, "{law:?} vs {oracle:?}");
        assert!((law.b / oracle.b - 1.0).abs() < 1e-7);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(matches!(
            fit_power_law(&[(8.0, 1.0), (8.0, 2.0), (9.0, 3.0)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_power_law(&[(8.0, 1.0), (9.0, 0.0), (10.0, 3.0)]).is_err());
        assert!(fit_quadratic(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }

    #[test]
    fn quadratic_fit_exact() {
        let pts: Vec<(f64, f64)> = (10..=50)
            .step_by(5)
            .map(|n| (n as f64, 2.0 * (n * n) as f64 - 2.0 * n as f64 - 1.0))
            .collect();
        let q = fit_quadratic(&pts).unwrap();
        assert!(
            (q.a - 2.0).abs() < 1e-9 && (q.b + 2.0).abs() < 1e-7 && (q.d + 1.0).abs() < 1e-5,
            "{q:?}"
        );
    }

    #[test]
    fn energy_evaluation_flops() {
        // One product per ordered pair and one fewer addition.
        for n in [10usize, 23, 50] {
            let expect = (2 * n * (n - 1) - 1) as f64;
            assert_eq!(
                flops_per_step(Method::BruteForce, n, 3, 20, 1).unwrap(),
                expect
            );
            assert_eq!(
                flops_per_step(Method::RandomSampling, n, 3, 20, 1).unwrap(),
                expect
            );
            let mh = flops_per_step(Method::MetropolisHastings, n, 3, 200, 1).unwrap();
            // Proposal energy plus the schedule update, plus one subtraction
            // and one multiplication on uphill proposals only.
            assert!(mh >= expect + 1.0 && mh <= expect + 3.0, "{mh}");
        }
        assert!(flops_per_step(Method::Grover, 10, 1, 1, 0).is_err());
    }

    #[test]
    fn measured_flop_models_are_quadratic() {
        let sizes: Vec<usize> = (10..=50).step_by(10).collect();
        let mut at50 = Vec::new();
        for m in [
            Method::BruteForce,
            Method::RandomSampling,
            Method::MetropolisHastings,
        ] {
            let (_, q) = measure_flop_model(m, &sizes, 2, 50, 3).unwrap();
            assert!((q.a - 2.0).abs() < 0.05, "{m}: {q:?}");
            at50.push(q.eval(50.0));
        }
        assert!(at50[0] <= at50[1] && at50[1] < at50[2]);
    }

    #[test]
    fn reference_rows_from_reference_coefficients() {
        let model = ResourceModel::default();
        let mh = classical_time_estimate(
            Method::MetropolisHastings,
            64,
            &reference_scaling(Method::MetropolisHastings),
            &model,
        )
        .unwrap();
        // Recomputed by hand: 14.09 * 2^10.88 steps * 3.87e7 FLOPs / 11e12 / 86400.
        assert!((mh / 1.08e-6 - 1.0).abs() < 0.02, "{mh:e}");
        assert!(mh / 6.91e-7 < 2.0);
    }

    #[test]
    fn toffoli_formulas() {
        let m = ResourceModel::default();
        assert_eq!(m.toffolis_per_step(Method::Grover, 64), Some(8256.0));
        assert_eq!(
            m.toffolis_per_step(Method::QuantumWalk, 64),
            Some(320.0 + 66.0 + 98.0)
        );
        assert_eq!(gas_toffolis_from_operator_table(64), 8318.0);
        assert_eq!(m.toffolis_per_step(Method::BruteForce, 64), None);
    }

    #[test]
    fn calibration_reproduces_anchor() {
        let model = ResourceModel::default();
        let law = reference_scaling(Method::Grover);
        let s = calibrate_toffoli_time(Method::Grover, 64, 2.0e9, &law, &model).unwrap();
        // 2e9 days / (4.27 * 2^32 * 8256 Toffolis).
        assert!((s - 1.1414).abs() < 1e-3, "{s}");
        let calibrated = ResourceModel {
            seconds_per_toffoli: s,
            ..model
        };
        let days = quantum_time_estimate(Method::Grover, 64, &law, &calibrated).unwrap();
        assert!((days / 2.0e9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn galactic_year_conversion() {
        assert!((galactic_years(DAYS_PER_GALACTIC_YEAR) - 1.0).abs() < 1e-15);
        // Published pair: 6.08e26 days is 7.24e15 galactic years.
        assert!((galactic_years(6.08e26) / 7.24e15 - 1.0).abs() < 0.01);
    }

    #[test]
    fn estimate_csv_layout() {
        let fits: Vec<ScalingFit> = Method::ALL
            .iter()
            .map(|&m| {
                let l = reference_scaling(m);
                ScalingFit {
                    method: m,
                    b: l.b,
                    c: l.c,
                    residual: 0.0,
                    n_range: (8, 13),
                    points: vec![],
                }
            })
            .collect();
        let rows = estimate_table(&fits, &[64, 128], &ResourceModel::default()).unwrap();
        assert_eq!(rows.len(), 10);
        let csv = estimates_to_csv(&rows);
        assert!(csv.starts_with("method,n,days,galactic_years\n"));
        assert_eq!(csv.lines().count(), 11);
        for r in &rows {
            assert_eq!(r.galactic_years, r.days / DAYS_PER_GALACTIC_YEAR);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fit_is_exact_and_scale_equivariant(b in 0.1f64..20.0, c in 0.05f64..1.0, k in 0.01f64..100.0) {
            let pts = synthetic(b, c);
            let law = fit_power_law(&pts).unwrap();
            prop_assert!((law.b / b - 1.0).abs() < 1e-8 && (law.c - c).abs() < 1e-8);
            let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, y)| (n, k * y)).collect();
            let law_k = fit_power_law(&scaled).unwrap();
            prop_assert!((law_k.b / (k * law.b) - 1.0).abs() < 1e-8);
            prop_assert!((law_k.c - law.c).abs() < 1e-8);
        }

        #[test]
        fn estimates_are_linear(n in 16usize..200, factor in 1.5f64..8.0) {
            let model = ResourceModel::default();
            for m in Method::ALL {
                let law = reference_scaling(m);
                let base = time_estimate(m, n, &law, &model).unwrap();
                let more_steps = PowerLaw { b: law.b * factor, ..law };
                prop_assert!((time_estimate(m, n, &more_steps, &model).unwrap() / base / factor - 1.0).abs() < 1e-12);
                let faster = ResourceModel { flops_per_second: model.flops_per_second * 2.0, seconds_per_toffoli: model.seconds_per_toffoli * 2.0, ..model.clone() };
                let ratio = time_estimate(m, n, &law, &faster).unwrap() / base;
                let expect = if m.is_quantum() { 2.0 } else { 0.5 };
                prop_assert!((ratio / expect - 1.0).abs() < 1e-12);
            }
        }
    }
}
