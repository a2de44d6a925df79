use rand::Rng;

use super::schedule::AnnealSchedule;
use crate::error::{Error, Result};
use crate::sk_model::{full_mask, Landscape, NoCount, OpCounter, SpinConfig};

/// The configuration differing from `s` in bit `j` only.
pub fn bit_flip_neighbor(s: SpinConfig, j: usize, n: usize) -> Result<SpinConfig> {
    if j >= n {
        return Err(Error::BitOutOfRange { index: j, n });
    }
    Ok(SpinConfig(s.bits() ^ (1u64 << j)))
}

#[inline]
fn uniform_config<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpinConfig {
    SpinConfig(rng.gen::<u64>() & full_mask(n))
}

/// Number of probes a fixed-order scan `0, 1, 2, ...` needs before it meets a
/// configuration of energy `e_gs`. Returns `2^n + 1` only if no configuration
/// attains `e_gs`.
pub fn brute_force_steps<L: Landscape>(land: &L, e_gs: i64) -> u64 {
    brute_force_steps_with(land, e_gs, &NoCount)
}

pub fn brute_force_steps_with<L: Landscape, C: OpCounter>(land: &L, e_gs: i64, ops: &C) -> u64 {
    let size = 1u64 << land.n();
    for x in 0..size {
        if land.energy_with(SpinConfig(x), ops) == e_gs {
            return x + 1;
        }
    }
    size + 1
}

/// Independent uniform draws with a running minimum.
#[derive(Debug, Clone)]
pub struct RandomSampler {
    n: usize,
    best: i64,
    steps: u64,
}

impl RandomSampler {
    /// Draws the starting point; this counts as the first step.
    pub fn start<L: Landscape, R: Rng + ?Sized, C: OpCounter>(
        land: &L,
        rng: &mut R,
        ops: &C,
    ) -> Self {
        let n = land.n();
        let best = land.energy_with(uniform_config(n, rng), ops);
        RandomSampler { n, best, steps: 1 }
    }

    pub fn step<L: Landscape, R: Rng + ?Sized, C: OpCounter>(
        &mut self,
        land: &L,
        rng: &mut R,
        ops: &C,
    ) -> i64 {
        let e = land.energy_with(uniform_config(self.n, rng), ops);
        if e < self.best {
            self.best = e;
        }
        self.steps += 1;
        self.best
    }

    pub fn best(&self) -> i64 {
        self.best
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Best-so-far energy after each of `max_steps` uniform draws.
pub fn random_sampling_trajectory<L: Landscape, R: Rng + ?Sized>(
    land: &L,
    max_steps: u64,
    rng: &mut R,
) -> Vec<i64> {
    if max_steps == 0 {
        return Vec::new();
    }
    let mut sampler = RandomSampler::start(land, rng, &NoCount);
    let mut out = Vec::with_capacity(max_steps as usize);
    out.push(sampler.best());
    for _ in 1..max_steps {
        out.push(sampler.step(land, rng, &NoCount));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhOptions {
    /// Probability of proposing a uniformly random configuration instead of a
    /// single bit flip. Zero in every benchmark.
    pub tunnel_probability: f64,
}

impl Default for MhOptions {
    fn default() -> Self {
        MhOptions {
            tunnel_probability: 0.0,
        }
    }
}

/// State of one Metropolis chain.
#[derive(Debug, Clone, Copy)]
pub struct MetropolisWalker {
    pub state: SpinConfig,
    pub energy: i64,
}

impl MetropolisWalker {
    pub fn new<L: Landscape, C: OpCounter>(land: &L, start: SpinConfig, ops: &C) -> Self {
        MetropolisWalker {
            state: start,
            energy: land.energy_with(start, ops),
        }
    }

    /// One proposal and accept/reject at inverse temperature `beta`.
    /// Downhill or level moves are always taken; uphill moves are taken when
    /// `exp(beta (f(x) - f(y)))` exceeds a uniform draw from `[0, 1)`.
    #[inline]
    pub fn step<L: Landscape, R: Rng + ?Sized, C: OpCounter>(
        &mut self,
        land: &L,
        beta: f64,
        opts: &MhOptions,
        rng: &mut R,
        ops: &C,
    ) -> bool {
        let n = land.n();
        let y = if opts.tunnel_probability > 0.0 && rng.gen::<f64>() < opts.tunnel_probability {
            uniform_config(n, rng)
        } else {
            let j = rng.gen_range(0..n);
            SpinConfig(self.state.bits() ^ (1u64 << j))
        };
        let fy = land.energy_with(y, ops);
        let accept = if fy <= self.energy {
            true
        } else {
            ops.sub();
            let gain = (self.energy - fy) as f64;
            ops.mul();
            let weight = (beta * gain).exp();
            weight > rng.gen::<f64>()
        };
        if accept {
            self.state = y;
            self.energy = fy;
        }
        accept
    }
}

/// Simulated annealing with single-bit-flip proposals from a uniformly drawn
/// start. Returns the configuration and energy after `T` steps.
pub fn mh_anneal<L: Landscape, R: Rng + ?Sized>(
    land: &L,
    sched: &AnnealSchedule,
    rng: &mut R,
) -> (SpinConfig, i64) {
    mh_anneal_with(land, sched, &MhOptions::default(), rng, &NoCount)
}

pub fn mh_anneal_with<L: Landscape, R: Rng + ?Sized, C: OpCounter>(
    land: &L,
    sched: &AnnealSchedule,
    opts: &MhOptions,
    rng: &mut R,
    ops: &C,
) -> (SpinConfig, i64) {
    let start = uniform_config(land.n(), rng);
    let mut walker = MetropolisWalker::new(land, start, ops);
    let inc = sched.increment();
    let mut beta = sched.beta_start;
    for _ in 0..sched.total_steps {
        walker.step(land, beta, opts, rng, ops);
        beta += inc;
        ops.add();
    }
    (walker.state, walker.energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::gibbs_distribution;
    use crate::sk_model::{exact_spectrum, generate_instance, EnergyTable, SkInstance};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn neighbor_examples() {
        assert_eq!(
            bit_flip_neighbor(SpinConfig(0b000), 1, 3).unwrap(),
            SpinConfig(0b010)
        );
        assert!(bit_flip_neighbor(SpinConfig(0), 3, 3).is_err());
        let s = SpinConfig(0b1011);
        for j in 0..4 {
            let y = bit_flip_neighbor(s, j, 4).unwrap();
            assert_eq!((y.bits() ^ s.bits()).count_ones(), 1);
            assert_eq!(bit_flip_neighbor(y, j, 4).unwrap(), s);
        }
    }

    #[test]
    fn neighborhood_is_n_regular() {
        let n = 6;
        for x in 0..1u64 << n {
            let mut nbrs: Vec<u64> = (0..n)
                .map(|j| bit_flip_neighbor(SpinConfig(x), j, n).unwrap().bits())
                .collect();
            nbrs.sort();
            nbrs.dedup();
            assert_eq!(nbrs.len(), n);
        }
    }

    #[test]
    fn brute_force_finds_first_ground_state() {
        // w_01 = -1: ground states are 00 and 11, so the scan stops at once.
        let inst = SkInstance::from_upper(2, 0, &[-1]).unwrap();
        assert_eq!(brute_force_steps(&inst, -2), 1);
        // w_01 = +1: ground states are 01 and 10.
        let inst = SkInstance::from_upper(2, 0, &[1]).unwrap();
        assert_eq!(brute_force_steps(&inst, -2), 2);

        for seed in 0..30 {
            let inst = generate_instance(8, seed).unwrap();
            let spectrum = exact_spectrum(&inst).unwrap();
            let t = brute_force_steps(&inst, spectrum.e_gs() as i64);
            assert!((1..=256).contains(&t));
            assert_eq!(t, spectrum.ground_set()[0].bits() + 1);
        }
    }

    #[test]
    fn zero_step_anneal_returns_start() {
        let inst = generate_instance(7, 3).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        let (s, e) = mh_anneal(&inst, &AnnealSchedule::linear(1.0, 0), &mut a);
        let start = SpinConfig(b.gen::<u64>() & full_mask(7));
        assert_eq!(s, start);
        assert_eq!(e, inst.energy(start));
    }

    #[test]
    fn downhill_moves_always_accepted() {
        let inst = generate_instance(8, 21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for x in 0..256u64 {
            let mut w = MetropolisWalker::new(&inst, SpinConfig(x), &NoCount);
            let before = w.energy;
            let mut probe = rng.clone();
            let j = probe.gen_range(0..8usize);
            let y = SpinConfig(x ^ (1 << j));
            let accepted = w.step(&inst, 1e9, &MhOptions::default(), &mut rng, &NoCount);
            if inst.energy(y) <= before {
                assert!(accepted);
                assert_eq!(w.state, y);
            } else {
                // at huge beta an uphill move is essentially never taken
                assert!(!accepted);
            }
        }
    }

    #[test]
    fn anneal_is_reproducible() {
        let inst = generate_instance(10, 8).unwrap();
        let sched = AnnealSchedule::linear(1.0, 500);
        let a = mh_anneal(&inst, &sched, &mut ChaCha8Rng::seed_from_u64(3));
        let b = mh_anneal(&inst, &sched, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_beta_chains_sample_gibbs() {
        // A single chain at beta = 2 stays in one of the two mirror-image
        // ground basins, so sample final states of many chains started
        // uniformly instead.
        let beta = 2.0;
        for seed in [12u64, 0, 5] {
            let inst = generate_instance(4, seed).unwrap();
            let gibbs = gibbs_distribution(&inst, beta).unwrap();
            let sched = AnnealSchedule {
                beta_start: beta,
                beta_final: 0.0,
                total_steps: 200,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(99 + seed);
            let chains = 20_000;
            let mut hist = vec![0.0; 16];
            for _ in 0..chains {
                let (s, _) = mh_anneal(&inst, &sched, &mut rng);
                hist[s.index()] += 1.0 / chains as f64;
            }
            let tv = gibbs.total_variation(&hist);
            assert!(tv < 0.05, "seed {seed}: total variation {tv}");
        }
    }

    #[test]
    fn expected_draws_to_hit_a_config() {
        // Geometric waiting time with success probability 2^-n has mean 2^n.
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 20_000;
        let mut total = 0u64;
        for _ in 0..trials {
            let mut k = 1u64;
            while uniform_config(n, &mut rng) != SpinConfig(0b101010) {
                k += 1;
            }
            total += k;
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 64.0).abs() < 3.0, "mean waiting time {mean}");
    }

    #[test]
    fn tunnelling_is_off_by_default() {
        assert_eq!(MhOptions::default().tunnel_probability, 0.0);
        let inst = generate_instance(6, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let opts = MhOptions {
            tunnel_probability: 1.0,
        };
        let mut w = MetropolisWalker::new(&inst, SpinConfig(0), &NoCount);
        let mut far = false;
        for _ in 0..200 {
            let before = w.state;
            if w.step(&inst, 0.0, &opts, &mut rng, &NoCount) {
                far |= (before.bits() ^ w.state.bits()).count_ones() > 1;
            }
        }
        assert!(far);
    }

    proptest! {
        #[test]
        fn sampling_trajectory_is_monotone(seed in any::<u64>(), n in 2usize..12) {
            let inst = generate_instance(n, seed).unwrap();
            let table = EnergyTable::build(&inst, 20).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let traj = random_sampling_trajectory(&table, 300, &mut rng);
            prop_assert_eq!(traj.len(), 300);
            prop_assert!(traj.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
