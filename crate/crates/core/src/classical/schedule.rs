use serde::{Deserialize, Serialize};

/// Linear inverse-temperature schedule: `beta_1 = beta_start` and
/// `beta_{i+1} = beta_i + beta_final / total_steps`, applied after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub beta_start: f64,
    pub beta_final: f64,
    pub total_steps: u64,
}

impl AnnealSchedule {
    pub fn linear(beta_final: f64, total_steps: u64) -> Self {
        AnnealSchedule {
            beta_start: 0.0,
            beta_final,
            total_steps,
        }
    }

    pub fn increment(&self) -> f64 {
        if self.total_steps == 0 {
            0.0
        } else {
            self.beta_final / self.total_steps as f64
        }
    }

    /// Inverse temperatures `beta_1, ..., beta_T` used by the `T` steps, built
    /// by repeated addition exactly as the update rule is applied.
    pub fn betas(&self) -> impl Iterator<Item = f64> {
        let inc = self.increment();
        let mut beta = self.beta_start;
        (0..self.total_steps).map(move |_| {
            let current = beta;
            beta += inc;
            current
        })
    }

    /// Value of beta after all `T` updates.
    pub fn terminal_beta(&self) -> f64 {
        let inc = self.increment();
        (0..self.total_steps).fold(self.beta_start, |b, _| b + inc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_zero_and_reaches_final() {
        for t in [1u64, 3, 7, 100, 12_345] {
            let s = AnnealSchedule::linear(1.0, t);
            let betas: Vec<f64> = s.betas().collect();
            assert_eq!(betas.len() as u64, t);
            assert_eq!(betas[0], 0.0);
            assert!(betas.windows(2).all(|w| w[1] >= w[0]));
            let end = s.terminal_beta();
            assert!(
                (end - 1.0).abs() <= t as f64 * f64::EPSILON,
                "T={t} end={end}"
            );
        }
    }

    #[test]
    fn empty_schedule() {
        let s = AnnealSchedule::linear(1.0, 0);
        assert_eq!(s.betas().count(), 0);
        assert_eq!(s.terminal_beta(), 0.0);
    }
}
