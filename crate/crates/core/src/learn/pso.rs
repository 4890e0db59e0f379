//! Particle swarm optimization over `[0, 1]^d` and the feature-weighting
//! fitness built on it.

use rand::Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::corpus::ClassLabel;
use crate::error::LearnError;
use crate::features::FEATURE_COUNT;
use crate::rng;
use crate::scalar::Scalar;
use crate::scoring::WeightVectorOf;

use super::cv::stratified_folds;
use super::linear::{train_linear, LinearConfig, Standardizer};
use super::{check_xy, take};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_iter: usize,
    pub inertia: f64,
    /// When set, inertia falls linearly to this value at the last iteration.
    pub inertia_final: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub velocity_clamp: f64,
    pub seed: u64,
    /// Folds of the inner cross-validation used as fitness.
    pub inner_folds: usize,
    pub linear: LinearConfig,
    /// Starting positions for the first particles; the rest are random.
    pub initial: Vec<Vec<f64>>,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            max_iter: 100,
            inertia: 0.729,
            inertia_final: None,
            c1: 1.494,
            c2: 1.494,
            velocity_clamp: 0.5,
            seed: 42,
            inner_folds: 5,
            linear: LinearConfig::default(),
            initial: Vec::new(),
        }
    }
}

impl PsoConfig {
    fn validate(&self, dim: usize) -> Result<(), LearnError> {
        let bad = |m: String| Err(LearnError::Config(m));
        if self.swarm_size < 2 {
            return bad(format!("swarm_size must be at least 2, got {}", self.swarm_size));
        }
        if self.max_iter < 1 {
            return bad("max_iter must be at least 1".into());
        }
        if self.initial.len() > self.swarm_size {
            return bad("more initial positions than particles".into());
        }
        if let Some(p) = self.initial.iter().find(|p| p.len() != dim) {
            return Err(LearnError::Dimension { expected: dim, found: p.len() });
        }
        let finite = [self.inertia, self.c1, self.c2, self.velocity_clamp, self.inertia_final.unwrap_or(0.0)];
        if finite.iter().any(|v| !v.is_finite()) || self.velocity_clamp <= 0.0 {
            return bad("PSO coefficients must be finite and the velocity clamp positive".into());
        }
        Ok(())
    }

    fn inertia_at(&self, iter: usize) -> f64 {
        match self.inertia_final {
            Some(end) if self.max_iter > 1 => {
                self.inertia + (end - self.inertia) * iter as f64 / (self.max_iter - 1) as f64
            }
            _ => self.inertia,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult<T> {
    pub best: Vec<T>,
    pub best_fitness: T,
    /// Global-best fitness after each iteration.
    pub trace: Vec<T>,
}

/// Maximizes `fitness` over the unit hypercube.
///
/// Each iteration evaluates every particle, updates personal and global
/// bests (only on strict improvement) and then moves the swarm. Particles
/// are evaluated in parallel; every random draw comes from a stream keyed
/// by particle and iteration, so results do not depend on thread count.
pub fn pso_optimize<T, F>(dim: usize, cfg: &PsoConfig, fitness: F) -> Result<PsoResult<T>, LearnError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    cfg.validate(dim)?;
    let vmax = T::of(cfg.velocity_clamp);
    let mut pos: Vec<Vec<T>> = Vec::with_capacity(cfg.swarm_size);
    let mut vel: Vec<Vec<T>> = Vec::with_capacity(cfg.swarm_size);
    for i in 0..cfg.swarm_size {
        let mut r = rng::stream(cfg.seed, "pso-init", i as u64);
        let p = match cfg.initial.get(i) {
            Some(p) => p.iter().map(|v| T::of(*v).clamp_unit()).collect(),
            None => (0..dim).map(|_| T::of(r.gen::<f64>())).collect(),
        };
        pos.push(p);
        vel.push((0..dim).map(|_| T::of(r.gen_range(-1.0..=1.0) * cfg.velocity_clamp)).collect());
    }
    let mut pbest = pos.clone();
    let mut pbest_fit = vec![T::neg_infinity(); cfg.swarm_size];
    let mut gbest = pos[0].clone();
    let mut gbest_fit = T::neg_infinity();
    let mut trace = Vec::with_capacity(cfg.max_iter);

    for iter in 0..cfg.max_iter {
        let fits: Vec<T> = pos.par_iter().map(|p| fitness(p)).collect();
        for (i, &f) in fits.iter().enumerate() {
            if f > pbest_fit[i] {
                pbest_fit[i] = f;
                pbest[i].clone_from(&pos[i]);
            }
            if f > gbest_fit {
                gbest_fit = f;
                gbest.clone_from(&pos[i]);
            }
        }
        trace.push(gbest_fit);
        if iter + 1 == cfg.max_iter {
            break;
        }
        let w = T::of(cfg.inertia_at(iter));
        let (c1, c2) = (T::of(cfg.c1), T::of(cfg.c2));
        for (i, (x, v)) in pos.iter_mut().zip(vel.iter_mut()).enumerate() {
            let mut r = rng::stream(cfg.seed, "pso-move", (iter * cfg.swarm_size + i) as u64);
            for j in 0..dim {
                let (r1, r2) = (T::of(r.gen::<f64>()), T::of(r.gen::<f64>()));
                let nv = w * v[j] + c1 * r1 * (pbest[i][j] - x[j]) + c2 * r2 * (gbest[j] - x[j]);
                v[j] = nv.max(-vmax).min(vmax);
                x[j] = (x[j] + v[j]).clamp_unit();
            }
        }
    }
    Ok(PsoResult { best: gbest, best_fitness: gbest_fit, trace })
}

struct FoldData<T> {
    train_x: Vec<Vec<T>>,
    train_y: Vec<ClassLabel>,
    test_x: Vec<Vec<T>>,
    test_y: Vec<ClassLabel>,
}

/// Mean inner-fold accuracy of the linear classifier on standardized
/// columns scaled by a candidate weight vector. Folds and standardization
/// are computed once and shared by every evaluation.
pub struct ScaledCvFitness<T> {
    folds: Vec<FoldData<T>>,
    linear: LinearConfig,
}

impl<T: Scalar> ScaledCvFitness<T> {
    pub fn new(x: &[Vec<T>], y: &[ClassLabel], k: usize, linear: LinearConfig, seed: u64) -> Result<Self, LearnError> {
        check_xy(x, y)?;
        let (folds, _) = stratified_folds(y, k, seed)?;
        let mut out = Vec::with_capacity(folds.k);
        for f in 0..folds.k {
            let (train, test) = folds.split(f);
            let train_x = take(x, &train);
            let std = Standardizer::fit(&train_x);
            out.push(FoldData {
                train_x: std.transform(&train_x),
                train_y: take(y, &train),
                test_x: std.transform(&take(x, &test)),
                test_y: take(y, &test),
            });
        }
        Ok(Self { folds: out, linear })
    }

    pub fn evaluate(&self, weights: &[T]) -> T {
        let scale = |rows: &[Vec<T>]| -> Vec<Vec<T>> {
            rows.iter().map(|r| r.iter().zip(weights).map(|(v, w)| *v * *w).collect()).collect()
        };
        let mut total = T::zero();
        for f in &self.folds {
            let tx = scale(&f.train_x);
            let acc = match train_linear(&tx, &f.train_y, &self.linear) {
                Ok(fit) => {
                    let correct =
                        scale(&f.test_x).iter().zip(&f.test_y).filter(|(r, l)| fit.model.predict(r) == **l).count();
                    T::ratio(correct, f.test_y.len())
                }
                Err(_) => T::zero(),
            };
            total = total + acc;
        }
        total / T::from_count(self.folds.len())
    }
}

/// Convenience wrapper around [`ScaledCvFitness`].
pub fn inner_cv_accuracy<T: Scalar>(
    x: &[Vec<T>],
    y: &[ClassLabel],
    weights: &[T],
    k: usize,
    linear: LinearConfig,
    seed: u64,
) -> Result<T, LearnError> {
    Ok(ScaledCvFitness::new(x, y, k, linear, seed)?.evaluate(weights))
}

/// Learns one weight per feature column.
pub fn pso_weight_features<T: Scalar>(
    x: &[Vec<T>],
    y: &[ClassLabel],
    cfg: &PsoConfig,
) -> Result<(WeightVectorOf<T>, PsoResult<T>), LearnError> {
    let d = check_xy(x, y)?;
    if d != FEATURE_COUNT {
        return Err(LearnError::Dimension { expected: FEATURE_COUNT, found: d });
    }
    if x.len() < 10 {
        return Err(LearnError::TooFewRows { needed: 10, found: x.len() });
    }
    if y.iter().all(|&l| l == y[0]) {
        return Err(LearnError::SingleClass);
    }
    let fitness =
        ScaledCvFitness::new(x, y, cfg.inner_folds, cfg.linear, rng::child_seed(cfg.seed, "pso-inner-cv", 0))?;
    let result = pso_optimize(d, cfg, |w| fitness.evaluate(w))?;
    let weights = WeightVectorOf::from_slice(&result.best).expect("dimension checked");
    Ok((weights, result))
}
