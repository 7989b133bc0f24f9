//! Best-anchored differential evolution.
//!
//! Every generation the best point `P_o` (lowest index on ties) is the base.
//! Each other point `P_i` proposes `P_o + (P_k − P_j) / diag`, with
//! `o, i, j, k` all distinct and `diag` the length of the bounds diagonal,
//! clamped into the bounds. The proposal replaces `P_i`
//! when it is better and a uniform draw falls below `acceptance_prob`.
//! All random draws happen serially in index order before the candidates
//! are evaluated, so the result does not depend on the thread count.

use crate::error::{invalid, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DEConfig {
    pub population: usize,
    /// `[lo, hi]` per parameter.
    pub bounds: Vec<(f64, f64)>,
    pub acceptance_prob: f64,
    /// Stop when every parameter's population standard deviation is below this.
    pub spread_tol: f64,
    pub max_generations: usize,
    pub rng_seed: u64,
    #[serde(default)]
    pub record_history: bool,
}

impl DEConfig {
    /// Desk-scale defaults for `(s, T_a)` on `[0, 3] × [0.5, 1]`.
    pub fn source_fit(rng_seed: u64) -> Self {
        Self {
            population: 500,
            bounds: vec![(0.0, 3.0), (0.5, 1.0)],
            acceptance_prob: 0.7,
            spread_tol: 1e-6,
            max_generations: 2000,
            rng_seed,
            record_history: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(invalid(format!("population {} must be >= 4", self.population)));
        }
        if self.bounds.is_empty() {
            return Err(invalid("at least one parameter bound is required"));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("bounds of parameter {i} must be finite with lo < hi, got [{lo}, {hi}]")));
            }
        }
        if !(0.0..=1.0).contains(&self.acceptance_prob) {
            return Err(invalid("acceptance_prob must lie in [0, 1]"));
        }
        if !(self.spread_tol > 0.0) {
            return Err(invalid("spread_tol must be > 0"));
        }
        if self.max_generations < 1 {
            return Err(invalid("max_generations must be >= 1"));
        }
        Ok(())
    }

    fn diagonal(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| (hi - lo).powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best: Vec<f64>,
    pub best_value: f64,
    pub spread: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub generations: usize,
    /// Final per-parameter population standard deviation.
    pub spread: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
    /// Candidates dropped for a non-finite objective.
    pub discarded: usize,
    pub history: Vec<GenerationRecord>,
}

fn spread(pop: &[Vec<f64>]) -> Vec<f64> {
    let n = pop.len() as f64;
    (0..pop[0].len())
        .map(|d| {
            let mean = pop.iter().map(|p| p[d]).sum::<f64>() / n;
            (pop.iter().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / n).sqrt()
        })
        .collect()
}

fn best_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] || (!values[best].is_finite() && v.is_finite()) {
            best = i;
        }
    }
    best
}

/// Minimizes `objective` inside `config.bounds`. Non-finite objective values
/// never enter the population as improvements.
pub fn differential_evolution<F>(objective: F, config: &DEConfig) -> Result<DEResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let np = config.population;
    let diag = config.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut pop: Vec<Vec<f64>> = (0..np)
        .map(|_| config.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect())
        .collect();
    let mut values: Vec<f64> = pop.par_iter().map(|p| objective(p)).collect();
    let mut evaluations = np;
    let mut discarded = values.iter().filter(|v| !v.is_finite()).count();
    if discarded > 0 {
        log::warn!("{discarded} initial points have a non-finite objective");
    }
    let mut history = Vec::new();
    let mut generation = 0;
    let mut sp = spread(&pop);
    let mut converged = sp.iter().all(|&s| s < config.spread_tol);

    while !converged && generation < config.max_generations {
        generation += 1;
        let o = best_index(&values);
        let mut proposals: Vec<(usize, Vec<f64>, f64)> = Vec::with_capacity(np - 1);
        for i in (0..np).filter(|&i| i != o) {
            let j = draw_other(&mut rng, np, &[o, i]);
            let k = draw_other(&mut rng, np, &[o, i, j]);
            let cand = config
                .bounds
                .iter()
                .enumerate()
                .map(|(d, &(lo, hi))| (pop[o][d] + (pop[k][d] - pop[j][d]) / diag).clamp(lo, hi))
                .collect();
            let u: f64 = rng.random();
            proposals.push((i, cand, u));
        }
        let scored: Vec<f64> = proposals.par_iter().map(|(_, c, _)| objective(c)).collect();
        evaluations += scored.len();
        for ((i, cand, u), v) in proposals.into_iter().zip(scored) {
            if !v.is_finite() {
                discarded += 1;
                log::debug!("generation {generation}: discarded candidate {cand:?} with objective {v}");
                continue;
            }
            if v < values[i] && u < config.acceptance_prob {
                pop[i] = cand;
                values[i] = v;
            }
        }
        sp = spread(&pop);
        converged = sp.iter().all(|&s| s < config.spread_tol);
        if config.record_history {
            let b = best_index(&values);
            history.push(GenerationRecord { generation, best: pop[b].clone(), best_value: values[b], spread: sp.clone() });
        }
    }
    if discarded > 0 {
        log::warn!("{discarded} candidates discarded for non-finite objective values");
    }
    let b = best_index(&values);
    Ok(DEResult {
        best: pop[b].clone(),
        best_value: values[b],
        generations: generation,
        spread: sp,
        converged,
        evaluations,
        discarded,
        history,
    })
}

fn draw_other(rng: &mut ChaCha8Rng, n: usize, exclude: &[usize]) -> usize {
    loop {
        let c = rng.random_range(0..n);
        if !exclude.contains(&c) {
            return c;
        }
    }
}
