//! Grover adaptive search, simulated in the two-dimensional subspace spanned
//! by the normalized solution and non-solution superpositions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sk_model::Spectrum;

/// Probability of measuring a solution after `k` Grover iterations on the
/// uniform superposition over `2^n` items with `t` solutions:
/// `sin^2((2k + 1) asin(sqrt(t / 2^n)))`.
pub fn grover_success_prob(n: usize, t: u64, k: u64) -> Result<f64> {
    let size = 2f64.powi(n as i32);
    if t == 0 || t as f64 > size {
        return Err(Error::InvalidSolutionCount(t));
    }
    let theta = (t as f64 / size).sqrt().asin();
    Ok(((2 * k + 1) as f64 * theta).sin().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    /// Tolerated failure probability; the search stops once the success
    /// probability exceeds `1 - epsilon`.
    pub epsilon: f64,
    /// Growth factor of the iteration bound `m`.
    pub lambda: f64,
}

impl Default for GasParams {
    fn default() -> Self {
        GasParams {
            epsilon: 0.016,
            lambda: 6.0 / 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasRound {
    pub k: u64,
    pub m: f64,
    pub success: f64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverRun {
    pub n: usize,
    pub solutions: u64,
    pub params: GasParams,
    /// Accumulated oracle calls.
    pub total_calls: u64,
    pub final_success: f64,
    /// False when no admissible iteration count can ever exceed the target
    /// probability, in which case the loop is not entered.
    pub resolved: bool,
    pub rounds: Vec<GasRound>,
}

/// Largest `k` that `floor(U[1, m))` can return once `m` has saturated at
/// `sqrt(2^n)`.
fn max_reachable_k(n: usize) -> u64 {
    let cap = 2f64.powf(n as f64 / 2.0);
    let k = cap.floor() as u64;
    if (cap - k as f64).abs() < f64::EPSILON {
        k.saturating_sub(1).max(1)
    } else {
        k.max(1)
    }
}

/// Runs the adaptive loop against the ground set of `spectrum`.
pub fn gas_run<R: Rng + ?Sized>(spectrum: &Spectrum, params: &GasParams, rng: &mut R) -> GroverRun {
    gas_run_counts(
        spectrum.n(),
        spectrum.ground_set().len() as u64,
        params,
        rng,
    )
    .expect("a spectrum always has a nonempty ground set")
}

/// The adaptive loop for `t` marked items among `2^n`: one iteration first,
/// then `m <- min(lambda m, sqrt(2^n))`, `k <- floor(U[1, m))` and
/// `T <- T + k` while the success probability of the latest `k` is at most
/// `1 - epsilon`.
pub fn gas_run_counts<R: Rng + ?Sized>(
    n: usize,
    t: u64,
    params: &GasParams,
    rng: &mut R,
) -> Result<GroverRun> {
    let target = 1.0 - params.epsilon;
    let cap = 2f64.powf(n as f64 / 2.0);
    let mut m = params.lambda;
    let mut k = 1u64;
    let mut total = k;
    let mut success = grover_success_prob(n, t, k)?;
    let mut rounds = vec![GasRound {
        k,
        m,
        success,
        total,
    }];

    let kmax = max_reachable_k(n);
    let feasible = success > target
        || (1..=kmax).any(|k| grover_success_prob(n, t, k).is_ok_and(|p| p > target));
    if !feasible {
        return Ok(GroverRun {
            n,
            solutions: t,
            params: *params,
            total_calls: total,
            final_success: success,
            resolved: false,
            rounds,
        });
    }

    while success <= target {
        m = (params.lambda * m).min(cap);
        k = if m > 1.0 {
            rng.gen_range(1.0..m).floor() as u64
        } else {
            1
        };
        total += k;
        success = grover_success_prob(n, t, k)?;
        rounds.push(GasRound {
            k,
            m,
            success,
            total,
        });
    }
    Ok(GroverRun {
        n,
        solutions: t,
        params: *params,
        total_calls: total,
        final_success: success,
        resolved: true,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Statevector oracle: explicit phase-oracle and diffusion matrices.
    fn statevector_success(n: usize, marked: &[usize], k: u64) -> f64 {
        let dim = 1usize << n;
        let amp = 1.0 / (dim as f64).sqrt();
        let psi0 = DVector::from_element(dim, amp);
        let mut oracle = DMatrix::<f64>::identity(dim, dim);
        for &x in marked {
            oracle[(x, x)] = -1.0;
        }
        let diffusion = 2.0 * &psi0 * psi0.transpose() - DMatrix::<f64>::identity(dim, dim);
        let g = diffusion * oracle;
        let mut psi = psi0;
        for _ in 0..k {
            psi = &g * psi;
        }
        marked.iter().map(|&x| psi[x] * psi[x]).sum()
    }

    #[test]
    fn closed_form_examples() {
        assert!((grover_success_prob(5, 3, 0).unwrap() - 3.0 / 32.0).abs() < 1e-15);
        assert!((grover_success_prob(2, 1, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            grover_success_prob(3, 0, 1),
            Err(Error::InvalidSolutionCount(0))
        );
        assert!(grover_success_prob(3, 9, 1).is_err());
    }

    #[test]
    fn closed_form_matches_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=8usize {
            let dim = 1usize << n;
            for _ in 0..3 {
                let t = rng.gen_range(1..=dim);
                let marked = sample(&mut rng, dim, t).into_vec();
                for k in 0..12 {
                    let exact = grover_success_prob(n, t as u64, k).unwrap();
                    let sv = statevector_success(n, &marked, k);
                    assert!((exact - sv).abs() <= 1e-10, "n={n} t={t} k={k}");
                }
            }
        }
    }

    #[test]
    fn all_solutions_stop_after_first_shot() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..10 {
            let run = gas_run_counts(n, 1 << n, &GasParams::default(), &mut rng).unwrap();
            assert_eq!(run.total_calls, 1);
            assert!(run.resolved);
        }
    }

    #[test]
    fn default_growth_factor() {
        let p = GasParams::default();
        assert_eq!(p.lambda, 1.2);
        assert_eq!(p.epsilon, 0.016);
    }

    #[test]
    fn loop_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 8..=13 {
            for t in [2u64, 4, 6] {
                let run = gas_run_counts(n, t, &GasParams::default(), &mut rng).unwrap();
                assert!(run.resolved);
                assert!(run.final_success > 1.0 - 0.016);
                let cap = 2f64.powf(n as f64 / 2.0);
                for w in run.rounds.windows(2) {
                    assert!(w[1].total > w[0].total);
                }
                for r in &run.rounds {
                    assert!(r.k as f64 <= r.m);
                    assert!(r.m <= cap);
                }
                assert_eq!(run.rounds.iter().map(|r| r.k).sum::<u64>(), run.total_calls);
            }
        }
    }

    #[test]
    fn unreachable_target_is_reported() {
        // n = 4, t = 2: k in 1..=3 peaks at sin^2 = 0.947.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = gas_run_counts(4, 2, &GasParams::default(), &mut rng).unwrap();
        assert!(!run.resolved);
    }
}
