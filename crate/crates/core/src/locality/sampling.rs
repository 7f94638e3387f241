//! Seeded Monte Carlo sampling of common-cause models.
//!
//! Each trial monitors the cause first: draw `mu` from the cause weights,
//! then draw the two outcomes independently from the per-cause responses.
//! Relative frequencies converge to the mixed behavior as trials grow.
//!
//! Randomness is positional so that work can be partitioned: trial `t` of
//! schedule entry `e` draws from `SplitMix64::new(split_seed(split_seed(seed,
//! e), t))` — three uniforms, in the order cause, A-outcome, B-outcome.
//! Any partition of the trial range that merges its counts reproduces the
//! sequential totals exactly.

use std::ops::Range;

use super::{BehaviorTable, LocalModel, Scenario};
use crate::error::{Error, Result};
use crate::rng::{split_seed, SplitMix64};

/// Raw counts from a sampling run.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    scenario: Scenario,
    /// Outcome counts indexed like a behavior table.
    counts: Vec<u64>,
    /// Trials performed per setting pair, indexed `x * settings_b + y`.
    pair_trials: Vec<u64>,
}

impl SampleOutcome {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, x: usize, y: usize, a: usize, b: usize) -> u64 {
        self.counts[self.scenario.index(x, y, a, b)]
    }

    pub fn pair_trials(&self, x: usize, y: usize) -> u64 {
        self.pair_trials[x * self.scenario.settings_b() + y]
    }

    /// Setting pairs the schedule never visited.
    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        let mut missing = Vec::new();
        for x in 0..self.scenario.settings_a() {
            for y in 0..self.scenario.settings_b() {
                if self.pair_trials(x, y) == 0 {
                    missing.push((x, y));
                }
            }
        }
        missing
    }

    /// Relative frequencies as a behavior table. Fails if any setting pair
    /// is missing: absent cells are reported, never fabricated.
    pub fn frequencies(&self) -> Result<BehaviorTable> {
        let missing = self.missing_pairs();
        if !missing.is_empty() {
            return Err(Error::Consistency(format!(
                "no trials for setting pairs {missing:?}"
            )));
        }
        let s = self.scenario;
        let mut p = vec![0.0; s.table_len()];
        for x in 0..s.settings_a() {
            for y in 0..s.settings_b() {
                let n = self.pair_trials(x, y) as f64;
                for a in 0..s.outcomes_a() {
                    for b in 0..s.outcomes_b() {
                        p[s.index(x, y, a, b)] = self.count(x, y, a, b) as f64 / n;
                    }
                }
            }
        }
        BehaviorTable::new(s, p)
    }

    /// Largest entry deviation between the empirical frequencies and an
    /// exact behavior.
    pub fn max_deviation(&self, exact: &BehaviorTable) -> Result<f64> {
        if exact.scenario() != &self.scenario {
            return Err(Error::Shape("scenario mismatch".into()));
        }
        let freq = self.frequencies()?;
        Ok(freq
            .entries()
            .iter()
            .zip(exact.entries())
            .map(|(e, t)| (e - t).abs())
            .fold(0.0, f64::max))
    }
}

/// Round-robin schedule visiting every setting pair once, x-major.
pub fn round_robin_schedule(scenario: &Scenario) -> Vec<(usize, usize)> {
    let mut schedule = Vec::with_capacity(scenario.settings_a() * scenario.settings_b());
    for x in 0..scenario.settings_a() {
        for y in 0..scenario.settings_b() {
            schedule.push((x, y));
        }
    }
    schedule
}

/// Inverse-CDF draw from a weight row (weights are a distribution up to
/// round-off; the final index absorbs the tail).
fn pick(weights: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cum += w.max(0.0);
        if u < cum {
            return i;
        }
    }
    weights.len() - 1
}

/// Counts for one schedule entry over a contiguous range of trial indices;
/// the partition building block. Returns a flat `outcomes_a * outcomes_b`
/// count table for the given setting pair.
pub fn sample_entry_range(
    model: &LocalModel,
    seed: u64,
    entry_index: u64,
    setting: (usize, usize),
    trials: Range<u64>,
) -> Result<Vec<u64>> {
    let s = *model.scenario();
    let (x, y) = setting;
    if x >= s.settings_a() || y >= s.settings_b() {
        return Err(Error::Domain(format!("setting pair ({x},{y}) out of range")));
    }
    let entry_seed = split_seed(seed, entry_index);
    let mut counts = vec![0u64; s.outcomes_a() * s.outcomes_b()];
    for t in trials {
        let mut rng = SplitMix64::new(split_seed(entry_seed, t));
        let mu = pick(model.weights(), rng.next_f64());
        let a = pick(&model.response_a()[mu][x], rng.next_f64());
        let b = pick(&model.response_b()[mu][y], rng.next_f64());
        counts[a * s.outcomes_b() + b] += 1;
    }
    Ok(counts)
}

/// Samples `n` trials for every entry of the schedule (default: round-robin
/// over all setting pairs). Deterministic given the seed; see the module
/// docs for the seed tree.
pub fn sample_local_model(
    model: &LocalModel,
    n: u64,
    seed: u64,
    schedule: Option<&[(usize, usize)]>,
) -> Result<SampleOutcome> {
    if n < 1 {
        return Err(Error::Domain("need at least one trial per schedule entry".into()));
    }
    let s = *model.scenario();
    let default_schedule;
    let schedule = match schedule {
        Some(sch) => sch,
        None => {
            default_schedule = round_robin_schedule(&s);
            &default_schedule
        }
    };
    if schedule.is_empty() {
        return Err(Error::Domain("schedule must not be empty".into()));
    }
    let mut counts = vec![0u64; s.table_len()];
    let mut pair_trials = vec![0u64; s.settings_a() * s.settings_b()];
    for (e, &(x, y)) in schedule.iter().enumerate() {
        let block = sample_entry_range(model, seed, e as u64, (x, y), 0..n)?;
        for a in 0..s.outcomes_a() {
            for b in 0..s.outcomes_b() {
                counts[s.index(x, y, a, b)] += block[a * s.outcomes_b() + b];
            }
        }
        pair_trials[x * s.settings_b() + y] += n;
    }
    Ok(SampleOutcome {
        scenario: s,
        counts,
        pair_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locality::{chsh_value, mix_local_model, random_local_model};

    fn deterministic_model() -> LocalModel {
        let s = Scenario::chsh();
        LocalModel::new(
            s,
            vec![1.0],
            vec![vec![vec![0.0, 1.0], vec![0.0, 1.0]]],
            vec![vec![vec![1.0, 0.0], vec![1.0, 0.0]]],
        )
        .unwrap()
    }

    #[test]
    fn deterministic_model_samples_exactly() {
        let model = deterministic_model();
        let out = sample_local_model(&model, 100, 7, None).unwrap();
        let exact = mix_local_model(&model).unwrap();
        assert_eq!(out.max_deviation(&exact).unwrap(), 0.0);
        assert_eq!(out.count(0, 0, 1, 0), 100);
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let model = random_local_model(&Scenario::chsh(), 3, 11).unwrap();
        let a = sample_local_model(&model, 1000, 5, None).unwrap();
        let b = sample_local_model(&model, 1000, 5, None).unwrap();
        assert_eq!(a.counts(), b.counts());
        let c = sample_local_model(&model, 1000, 6, None).unwrap();
        assert_ne!(a.counts(), c.counts());
    }

    #[test]
    fn partitioned_runs_merge_to_the_sequential_totals() {
        let model = random_local_model(&Scenario::chsh(), 4, 23).unwrap();
        let n = 10_000u64;
        let seq = sample_local_model(&model, n, 99, None).unwrap();

        let schedule = round_robin_schedule(model.scenario());
        for (e, &(x, y)) in schedule.iter().enumerate() {
            let first = sample_entry_range(&model, 99, e as u64, (x, y), 0..n / 2).unwrap();
            let second = sample_entry_range(&model, 99, e as u64, (x, y), n / 2..n).unwrap();
            let merged: Vec<u64> = first.iter().zip(&second).map(|(p, q)| p + q).collect();
            let sequential: Vec<u64> = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| seq.count(x, y, a, b))
                .collect();
            assert_eq!(merged, sequential);
        }
    }

    #[test]
    fn frequencies_converge_to_the_mixture() {
        let model = random_local_model(&Scenario::chsh(), 5, 301).unwrap();
        let exact = mix_local_model(&model).unwrap();
        let out = sample_local_model(&model, 200_000, 17, None).unwrap();
        let dev = out.max_deviation(&exact).unwrap();
        assert!(dev <= 5.0 / (200_000f64).sqrt(), "deviation {dev}");
        let emp_chsh = chsh_value(&out.frequencies().unwrap()).unwrap();
        assert!(emp_chsh <= 2.0 + 0.01, "empirical S {emp_chsh}");
    }

    #[test]
    fn missing_pairs_are_reported() {
        let model = deterministic_model();
        let out = sample_local_model(&model, 10, 1, Some(&[(0, 0), (0, 1)])).unwrap();
        assert_eq!(out.missing_pairs(), vec![(1, 0), (1, 1)]);
        assert!(matches!(out.frequencies(), Err(Error::Consistency(_))));

        let err = sample_local_model(&model, 10, 1, Some(&[(5, 0)]));
        assert!(matches!(err, Err(Error::Domain(_))));

        let err = sample_local_model(&model, 0, 1, None);
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
