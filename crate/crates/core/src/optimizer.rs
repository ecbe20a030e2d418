//! Population-based stochastic search over `(p_t, p_u, q_u)`.
//!
//! Used to bound how far the exact small-sample selection probability can
//! drift from its Gaussian approximation at a fixed `n`. The loop:
//!
//! 1. evaluate every point of an initial grid with one batch of `mc_res` trials;
//! 2. take the `m` candidates with the largest running means;
//! 3. give each survivor one more batch;
//! 4. spawn perturbed copies of each survivor and evaluate them with one batch;
//! 5. repeat from 2 for `t_final` iterations.
//!
//! A candidate's running mean is the mean of its batch means. Perturbations
//! that land on an already known point add a batch to that candidate instead
//! of creating a duplicate.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    assemble_model, random_signal_block, sample_cross_cov_asymptotic_model, ModelParams, SamplerKind,
};
use crate::rng::{with_workers, Rng, StreamSeed};
use crate::selectors::MethodKind;

/// A point `(p_t, p_u, q_u)` of the search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Theta {
    pub p_t: usize,
    pub p_u: usize,
    pub q_u: usize,
}

impl Theta {
    pub const fn new(p_t: usize, p_u: usize, q_u: usize) -> Self {
        Theta { p_t, p_u, q_u }
    }

    pub fn p(&self) -> usize {
        self.p_t + self.p_u
    }

    pub fn q(&self) -> usize {
        self.p_t + self.q_u
    }

    pub fn params(&self, n: usize) -> Result<ModelParams> {
        ModelParams::new(n, self.p_t, self.p_u, self.q_u)
    }

    fn as_array(&self) -> [usize; 3] {
        [self.p_t, self.p_u, self.q_u]
    }

    fn from_array(a: [usize; 3]) -> Self {
        Theta::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p_t, self.p_u, self.q_u)
    }
}

/// Inclusive box constraints on `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Theta,
    pub upper: Theta,
}

impl Bounds {
    pub fn contains(&self, theta: &Theta) -> bool {
        let (lo, hi, t) = (self.lower.as_array(), self.upper.as_array(), theta.as_array());
        (0..3).all(|k| lo[k] <= t[k] && t[k] <= hi[k])
    }

    pub fn clamp(&self, raw: [i64; 3]) -> Theta {
        let (lo, hi) = (self.lower.as_array(), self.upper.as_array());
        let mut out = [0usize; 3];
        for k in 0..3 {
            out[k] = raw[k].clamp(lo[k] as i64, hi[k] as i64) as usize;
        }
        Theta::from_array(out)
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.lower.as_array(), self.upper.as_array());
        if (0..3).any(|k| lo[k] > hi[k]) {
            return Err(Error::InvalidConfig(format!("empty bounds box {} .. {}", self.lower, self.upper)));
        }
        if self.lower.p_t == 0 {
            return Err(Error::InvalidConfig("lower bound on p_t must be at least 1".into()));
        }
        Ok(())
    }
}

/// Add `(δ₁, δ₂, δ₃)` with `δ₁ ~ U{−1, 0, 1}` and `δ₂, δ₃ ~ U{−3, …, 3}`,
/// then clamp into `bounds`.
pub fn perturb(theta: &Theta, bounds: &Bounds, rng: &mut Rng) -> Theta {
    let d1 = rng.random_range(-1..=1_i64);
    let d2 = rng.random_range(-3..=3_i64);
    let d3 = rng.random_range(-3..=3_i64);
    bounds.clamp([theta.p_t as i64 + d1, theta.p_u as i64 + d2, theta.q_u as i64 + d3])
}

/// A noisy objective whose expectation the search maximizes.
pub trait Objective: Sync {
    /// Mean of one batch of `mc_res` measurements at `theta`.
    fn batch_mean(&self, theta: &Theta, mc_res: u64, seed: StreamSeed) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `P − P̃`
    ExactMinusAsymptotic,
    /// `P̃ − P`
    AsymptoticMinusExact,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-minus-asymptotic" | "exact" => Ok(Direction::ExactMinusAsymptotic),
            "asymptotic-minus-exact" | "asymptotic" => Ok(Direction::AsymptoticMinusExact),
            other => Err(Error::InvalidConfig(format!("unknown direction '{other}'"))),
        }
    }
}

/// How the exact and asymptotic probabilities are paired within a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Each trial draws one signal block and feeds it to both samplers.
    Paired,
    /// The two probabilities are estimated from separate trials.
    Independent,
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paired" => Ok(Pairing::Paired),
            "independent" => Ok(Pairing::Independent),
            other => Err(Error::InvalidConfig(format!("unknown pairing '{other}'"))),
        }
    }
}

/// Signed gap between the exact and asymptotic selection probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyObjective {
    pub n: usize,
    pub method: MethodKind,
    pub direction: Direction,
    /// `WishartExact` or `DataSimulation`; both have the exact law.
    pub exact_sampler: SamplerKind,
    pub pairing: Pairing,
}

impl DiscrepancyObjective {
    pub fn new(n: usize, method: MethodKind, direction: Direction) -> Self {
        DiscrepancyObjective { n, method, direction, exact_sampler: SamplerKind::DataSimulation, pairing: Pairing::Paired }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSampleSize { n: self.n, reason: "the sample covariance needs n >= 2" });
        }
        if !self.exact_sampler.is_exact() {
            return Err(Error::InvalidConfig("the exact side needs an exact sampler".into()));
        }
        Ok(())
    }
}

/// Success indicator for one sample, `None` when the method is degenerate.
fn selects_correlated(method: MethodKind, sample: &crate::selectors::CrossCovMatrix, p_t: usize) -> Result<Option<bool>> {
    match method.score(sample) {
        Ok(s) => Ok(Some(s.top_index().expect("p >= 1") < p_t)),
        Err(Error::DegenerateMatrix(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Default, Clone, Copy)]
struct PairCounts {
    exact: i64,
    asym: i64,
    exact_trials: i64,
    asym_trials: i64,
}

impl PairCounts {
    fn add(self, o: PairCounts) -> PairCounts {
        PairCounts {
            exact: self.exact + o.exact,
            asym: self.asym + o.asym,
            exact_trials: self.exact_trials + o.exact_trials,
            asym_trials: self.asym_trials + o.asym_trials,
        }
    }
}

/// Mean signed per-trial difference of the two success indicators over one
/// batch of `mc_res` trials.
pub fn evaluate_objective_batch(obj: &DiscrepancyObjective, theta: &Theta, mc_res: u64, seed: StreamSeed) -> Result<f64> {
    obj.validate()?;
    let params = theta.params(obj.n)?;
    if mc_res == 0 {
        return Err(Error::InvalidConfig("mc_res must be at least 1".into()));
    }
    if params.p_u == 0 {
        return Ok(0.0);
    }
    let counts = (0..mc_res)
        .into_par_iter()
        .map(|i| -> Result<PairCounts> {
            let mut c = PairCounts::default();
            match obj.pairing {
                Pairing::Paired => {
                    let mut rng = seed.child(i).rng();
                    let signal = random_signal_block(params.p_t, &mut rng)?;
                    let model = assemble_model(&signal, &params)?;
                    let exact = obj.exact_sampler.sample(&model, params.n, &mut rng)?;
                    let asym = sample_cross_cov_asymptotic_model(&model, params.n, &mut rng)?;
                    let e = selects_correlated(obj.method, &exact, params.p_t)?;
                    let a = selects_correlated(obj.method, &asym, params.p_t)?;
                    if let (Some(e), Some(a)) = (e, a) {
                        c = PairCounts { exact: e as i64, asym: a as i64, exact_trials: 1, asym_trials: 1 };
                    }
                }
                Pairing::Independent => {
                    for (stream, sampler) in [(0, obj.exact_sampler), (1, SamplerKind::AsymptoticGaussian)] {
                        let mut rng = seed.child(stream).child(i).rng();
                        let signal = random_signal_block(params.p_t, &mut rng)?;
                        let model = assemble_model(&signal, &params)?;
                        let sample = sampler.sample(&model, params.n, &mut rng)?;
                        if let Some(ok) = selects_correlated(obj.method, &sample, params.p_t)? {
                            if stream == 0 {
                                c.exact = ok as i64;
                                c.exact_trials = 1;
                            } else {
                                c.asym = ok as i64;
                                c.asym_trials = 1;
                            }
                        }
                    }
                }
            }
            Ok(c)
        })
        .try_reduce(PairCounts::default, |a, b| Ok(a.add(b)))?;
    if counts.exact_trials == 0 || counts.asym_trials == 0 {
        return Err(Error::TooManyDiscarded { discarded: mc_res, attempted: mc_res });
    }
    let gap = counts.exact as f64 / counts.exact_trials as f64 - counts.asym as f64 / counts.asym_trials as f64;
    Ok(match obj.direction {
        Direction::ExactMinusAsymptotic => gap,
        Direction::AsymptoticMinusExact => -gap,
    })
}

impl Objective for DiscrepancyObjective {
    fn batch_mean(&self, theta: &Theta, mc_res: u64, seed: StreamSeed) -> Result<f64> {
        evaluate_objective_batch(self, theta, mc_res, seed)
    }
}

/// Noise-free test objective `−‖θ − target‖₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Objective {
    pub target: Theta,
}

impl Objective for L1Objective {
    fn batch_mean(&self, theta: &Theta, _mc_res: u64, _seed: StreamSeed) -> Result<f64> {
        let d = |a: usize, b: usize| a.abs_diff(b) as f64;
        Ok(-(d(theta.p_t, self.target.p_t) + d(theta.p_u, self.target.p_u) + d(theta.q_u, self.target.q_u)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub initial_grid: Vec<Theta>,
    /// Survivors kept per iteration (`m`).
    pub survivors: usize,
    pub mc_res: u64,
    pub t_final: usize,
    pub perturbations_per_survivor: usize,
    pub bounds: Bounds,
}

impl SearchConfig {
    /// 5 × 10 × 10 grid over `p_t ∈ {2..6}`, `p_u, q_u ∈ {1, 6, …, 46}`,
    /// ten survivors with ten perturbed copies each, five iterations.
    pub fn reference(mc_res: u64) -> Self {
        let steps: Vec<usize> = (0..10).map(|k| 1 + 5 * k).collect();
        let mut grid = Vec::with_capacity(500);
        for p_t in 2..=6 {
            for &p_u in &steps {
                for &q_u in &steps {
                    grid.push(Theta::new(p_t, p_u, q_u));
                }
            }
        }
        SearchConfig {
            initial_grid: grid,
            survivors: 10,
            mc_res,
            t_final: 5,
            perturbations_per_survivor: 10,
            bounds: Bounds { lower: Theta::new(2, 0, 0), upper: Theta::new(12, 80, 80) },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if self.initial_grid.is_empty() {
            return Err(Error::InvalidConfig("initial grid is empty".into()));
        }
        if self.survivors == 0 || self.mc_res == 0 || self.t_final == 0 || self.perturbations_per_survivor == 0 {
            return Err(Error::InvalidConfig("survivors, mc_res, t_final and perturbations must all be >= 1".into()));
        }
        if self.survivors > self.initial_grid.len() {
            return Err(Error::InvalidConfig(format!(
                "survivor count {} exceeds the grid size {}",
                self.survivors,
                self.initial_grid.len()
            )));
        }
        if let Some(bad) = self.initial_grid.iter().find(|t| !self.bounds.contains(t)) {
            return Err(Error::InvalidConfig(format!("grid point {bad} lies outside the bounds")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Discovery order; earlier candidates win ties.
    pub id: usize,
    pub theta: Theta,
    pub sum_objective: f64,
    pub batches: u64,
    /// Iteration at which the candidate first appeared (0 = grid).
    pub discovered_at: usize,
}

impl Candidate {
    pub fn mean(&self) -> f64 {
        self.sum_objective / self.batches as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalRole {
    Grid,
    Survivor,
    Perturbed,
    /// A perturbation that hit a known point and pooled into it.
    Merged,
}

/// One batch evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub candidate: usize,
    pub theta: Theta,
    pub role: EvalRole,
    pub batch_mean: f64,
    pub running_mean: f64,
    pub batches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Every evaluated candidate, best running mean first.
    pub candidates: Vec<Candidate>,
    /// Candidate ids of the survivors selected at each iteration `1..=t_final`.
    pub survivors: Vec<Vec<usize>>,
    pub trace: Vec<TraceRecord>,
}

impl SearchReport {
    pub fn best(&self) -> &Candidate {
        &self.candidates[0]
    }
}

struct Job {
    id: usize,
    batch: u64,
    role: EvalRole,
}

struct Pool {
    candidates: Vec<Candidate>,
    index: HashMap<Theta, usize>,
    /// Batches scheduled so far per candidate, used to number batch seeds.
    scheduled: Vec<u64>,
}

impl Pool {
    fn schedule(&mut self, theta: Theta, iteration: usize, fresh_role: EvalRole, jobs: &mut Vec<Job>) {
        let (id, role) = match self.index.get(&theta) {
            Some(&id) => (id, if fresh_role == EvalRole::Grid { EvalRole::Grid } else { EvalRole::Merged }),
            None => {
                let id = self.candidates.len();
                self.candidates.push(Candidate { id, theta, sum_objective: 0.0, batches: 0, discovered_at: iteration });
                self.index.insert(theta, id);
                self.scheduled.push(0);
                (id, fresh_role)
            }
        };
        jobs.push(Job { id, batch: self.scheduled[id], role });
        self.scheduled[id] += 1;
    }

    fn ranked_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.candidates.len()).filter(|&i| self.candidates[i].batches > 0).collect();
        ids.sort_by(|&a, &b| self.candidates[b].mean().total_cmp(&self.candidates[a].mean()).then(a.cmp(&b)));
        ids
    }
}

fn run_jobs<O: Objective>(
    objective: &O,
    pool: &mut Pool,
    jobs: Vec<Job>,
    iteration: usize,
    mc_res: u64,
    seed: StreamSeed,
    trace: &mut Vec<TraceRecord>,
) -> Result<()> {
    let batch_seed = seed.named("batch");
    let means: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|job| {
            let theta = pool.candidates[job.id].theta;
            objective.batch_mean(&theta, mc_res, batch_seed.child(job.id as u64).child(job.batch))
        })
        .collect();
    for (job, mean) in jobs.iter().zip(means) {
        let mean = mean?;
        if !mean.is_finite() {
            return Err(Error::Domain(format!("objective returned {mean}")));
        }
        let c = &mut pool.candidates[job.id];
        c.sum_objective += mean;
        c.batches += 1;
        trace.push(TraceRecord {
            iteration,
            candidate: c.id,
            theta: c.theta,
            role: job.role,
            batch_mean: mean,
            running_mean: c.mean(),
            batches: c.batches,
        });
    }
    Ok(())
}

/// Run the search. Deterministic for a given seed regardless of `workers`.
pub fn run_search<O: Objective>(objective: &O, config: &SearchConfig, seed: StreamSeed, workers: usize) -> Result<SearchReport> {
    config.validate()?;
    with_workers(workers, || search(objective, config, seed))
}

fn search<O: Objective>(objective: &O, config: &SearchConfig, seed: StreamSeed) -> Result<SearchReport> {
    let mut pool = Pool { candidates: Vec::new(), index: HashMap::new(), scheduled: Vec::new() };
    let mut trace = Vec::new();
    let mut survivors_log = Vec::with_capacity(config.t_final);

    let mut jobs = Vec::new();
    for &theta in &config.initial_grid {
        if !pool.index.contains_key(&theta) {
            pool.schedule(theta, 0, EvalRole::Grid, &mut jobs);
        }
    }
    run_jobs(objective, &mut pool, jobs, 0, config.mc_res, seed, &mut trace)?;

    for t in 1..=config.t_final {
        let survivors: Vec<usize> = pool.ranked_ids().into_iter().take(config.survivors).collect();
        survivors_log.push(survivors.clone());

        let mut jobs = Vec::new();
        for &id in &survivors {
            jobs.push(Job { id, batch: pool.scheduled[id], role: EvalRole::Survivor });
            pool.scheduled[id] += 1;
        }
        run_jobs(objective, &mut pool, jobs, t, config.mc_res, seed, &mut trace)?;

        let mut rng = seed.named("perturb").child(t as u64).rng();
        let mut jobs = Vec::new();
        for &id in &survivors {
            let base = pool.candidates[id].theta;
            for _ in 0..config.perturbations_per_survivor {
                let theta = perturb(&base, &config.bounds, &mut rng);
                pool.schedule(theta, t, EvalRole::Perturbed, &mut jobs);
            }
        }
        run_jobs(objective, &mut pool, jobs, t, config.mc_res, seed, &mut trace)?;
    }

    let order = pool.ranked_ids();
    let candidates = order.into_iter().map(|i| pool.candidates[i].clone()).collect();
    Ok(SearchReport { candidates, survivors: survivors_log, trace })
}
