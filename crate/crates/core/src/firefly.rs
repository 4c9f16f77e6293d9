//! Firefly algorithm over the unit hypercube of feature weights.
//!
//! Each firefly is a [`WeightVector`]; its brightness is the inverse training
//! MMRE of ABE run with those weights. Dimmer fireflies move toward brighter
//! ones with Gaussian-decaying attraction `β0·exp(-γ r²)` plus a uniform
//! perturbation `α·(rand − ½)`; a firefly with no brighter peer walks randomly.
//! Positions are clamped to `[0, 1]` after every step.
//!
//! Every firefly owns its own ChaCha8 stream derived from the master seed, so
//! results do not depend on how fitness evaluation is scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abe::{self, AbeConfig, WeightVector};
use crate::dataset::{Dataset, Project};
use crate::error::{ConfigError, ModelError};

/// Added to the training MMRE before inversion; a perfect fit scores `1e9`.
pub const FITNESS_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaConfig {
    pub population: usize,
    pub max_iterations: usize,
    /// Light absorption coefficient.
    pub gamma: f64,
    /// Randomization scale at iteration 1.
    pub alpha: f64,
    /// `alpha` is multiplied by this after every iteration.
    pub alpha_decay: f64,
    /// Attractiveness at distance zero.
    pub beta0: f64,
    pub seed: u64,
}

impl Default for FaConfig {
    fn default() -> Self {
        Self { population: 20, max_iterations: 50, gamma: 1.0, alpha: 0.2, alpha_decay: 0.97, beta0: 1.0, seed: 0 }
    }
}

impl FaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: &str| Err(ConfigError::Invalid { key: key.into(), message: message.into() });
        if self.population == 0 {
            return bad("pop", "population must be >= 1");
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return bad("gamma", "must be finite and >= 0");
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad("alpha", "must be finite and >= 0");
        }
        if !(self.alpha_decay.is_finite() && self.alpha_decay >= 0.0) {
            return bad("alpha_decay", "must be finite and >= 0");
        }
        if !(self.beta0.is_finite() && self.beta0 >= 0.0) {
            return bad("beta0", "must be finite and >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Firefly {
    pub position: WeightVector,
    pub brightness: f64,
}

/// Something the optimizer can maximize over `[0,1]^dim`.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn brightness(&self, w: &WeightVector) -> Result<f64, ModelError>;
}

/// Training objective: estimate each train project from the basic set with
/// the candidate weights and score `1 / (MMRE + ε)`.
#[derive(Debug, Clone)]
pub struct FitnessObjective {
    pub basic: Vec<Project>,
    pub train: Vec<Project>,
    pub abe: AbeConfig,
    /// Evaluate train projects on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl FitnessObjective {
    pub fn new(basic: Vec<Project>, train: Vec<Project>, abe: AbeConfig) -> Result<Self, ModelError> {
        if basic.is_empty() {
            return Err(ModelError::EmptyCaseBase);
        }
        if train.is_empty() {
            return Err(ModelError::TooShort { needed: 1, got: 0 });
        }
        Ok(Self { basic, train, abe, parallel: false })
    }

    /// Builds the objective from disjoint row index sets of `d`.
    pub fn from_rows(d: &Dataset, basic: &[usize], train: &[usize], abe: AbeConfig) -> Result<Self, ModelError> {
        if basic.iter().any(|b| train.contains(b)) {
            return Err(ModelError::OverlappingSets);
        }
        Self::new(d.rows(basic), d.rows(train), abe)
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    /// Training-set MMRE for the given weights.
    pub fn train_mmre(&self, w: &WeightVector) -> Result<f64, ModelError> {
        let relative_error = |p: &Project| -> Result<f64, ModelError> {
            let est = abe::estimate(p, &self.basic, w, &self.abe)?;
            Ok(((p.effort - est) / p.effort).abs())
        };
        let errors: Vec<f64> = if self.parallel {
            self.train.par_iter().map(relative_error).collect::<Result<_, _>>()?
        } else {
            self.train.iter().map(relative_error).collect::<Result<_, _>>()?
        };
        // Sequential sum keeps the result independent of scheduling.
        Ok(errors.iter().sum::<f64>() / errors.len() as f64)
    }
}

impl Objective for FitnessObjective {
    fn dim(&self) -> usize {
        self.basic[0].values.len()
    }

    fn brightness(&self, w: &WeightVector) -> Result<f64, ModelError> {
        Ok(1.0 / (self.train_mmre(w)? + FITNESS_EPSILON))
    }
}

pub fn fitness(w: &WeightVector, obj: &FitnessObjective) -> Result<f64, ModelError> {
    obj.brightness(w)
}

/// Euclidean distance between two positions.
pub fn firefly_distance(a: &[f64], b: &[f64]) -> Result<f64, ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// Moves `xi` toward the brighter `xj`:
/// `xi + β0·exp(-γ r²)·(xj − xi) + α·(rand − ½)`, clamped to `[0, 1]`.
pub fn move_toward(xi: &WeightVector, xj: &WeightVector, cfg: &FaConfig, rng: &mut impl Rng) -> WeightVector {
    let (a, b) = (xi.as_slice(), xj.as_slice());
    let r2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let attraction = cfg.beta0 * (-cfg.gamma * r2).exp();
    WeightVector::clamped(
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let noise = rng.gen::<f64>() - 0.5;
                x + attraction * (y - x) + cfg.alpha * noise
            })
            .collect(),
    )
}

/// Uniform perturbation `xi + α·(rand − ½)`, clamped to `[0, 1]`.
pub fn random_walk(xi: &WeightVector, cfg: &FaConfig, rng: &mut impl Rng) -> WeightVector {
    WeightVector::clamped(xi.as_slice().iter().map(|x| x + cfg.alpha * (rng.gen::<f64>() - 0.5)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaOutcome {
    pub best: Firefly,
    /// Global best brightness after initialization (entry 0) and after each iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// `iteration,best_brightness` CSV of a convergence trace.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,best_brightness\n");
    for (t, b) in trace.iter().enumerate() {
        out.push_str(&format!("{t},{b}\n"));
    }
    out
}

fn firefly_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn optimize(obj: &impl Objective, cfg: &FaConfig) -> Result<FaOutcome, ModelError> {
    optimize_seeded(obj, cfg, &[])
}

/// Runs the optimizer with `seeded` positions replacing the first random
/// initial fireflies (extra seeds beyond the population are ignored).
pub fn optimize_seeded(obj: &impl Objective, cfg: &FaConfig, seeded: &[WeightVector]) -> Result<FaOutcome, ModelError> {
    let dim = obj.dim();
    let n = cfg.population.max(1);
    let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|i| firefly_rng(cfg.seed, i)).collect();
    let mut positions: Vec<WeightVector> = rngs
        .iter_mut()
        .map(|rng| WeightVector::clamped((0..dim).map(|_| rng.gen::<f64>()).collect()))
        .collect();
    for (slot, w) in positions.iter_mut().zip(seeded) {
        if w.len() != dim {
            return Err(ModelError::DimensionMismatch(w.len(), dim));
        }
        *slot = w.clone();
    }
    let brightness: Vec<f64> = positions.par_iter().map(|w| obj.brightness(w)).collect::<Result<_, _>>()?;
    let mut swarm: Vec<Firefly> = positions
        .into_iter()
        .zip(brightness)
        .map(|(position, brightness)| Firefly { position, brightness })
        .collect();
    let mut evaluations = n;

    let mut best = swarm[0].clone();
    for f in &swarm[1..] {
        if f.brightness > best.brightness {
            best = f.clone();
        }
    }
    let mut trace = Vec::with_capacity(cfg.max_iterations + 1);
    trace.push(best.brightness);

    let mut step = *cfg;
    for _ in 0..cfg.max_iterations {
        for i in 0..n {
            let mut moved = false;
            for j in 0..n {
                if swarm[j].brightness > swarm[i].brightness {
                    let position = move_toward(&swarm[i].position, &swarm[j].position, &step, &mut rngs[i]);
                    let brightness = obj.brightness(&position)?;
                    evaluations += 1;
                    swarm[i] = Firefly { position, brightness };
                    moved = true;
                    if brightness > best.brightness {
                        best = swarm[i].clone();
                    }
                }
            }
            if !moved && step.alpha > 0.0 {
                let position = random_walk(&swarm[i].position, &step, &mut rngs[i]);
                let brightness = obj.brightness(&position)?;
                evaluations += 1;
                swarm[i] = Firefly { position, brightness };
                if brightness > best.brightness {
                    best = swarm[i].clone();
                }
            }
        }
        step.alpha *= cfg.alpha_decay;
        trace.push(best.brightness);
    }
    Ok(FaOutcome { best, trace, evaluations })
}
