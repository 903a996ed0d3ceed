//! Covariance Matrix Adaptation Evolution Strategy with comma `(μ, λ)` and
//! elitist plus `(μ + λ)` selection.
//!
//! The engine follows the ask/tell pattern: [`CmaState::ask`] samples a
//! population, the caller evaluates it (possibly in parallel) and hands the
//! fitnesses back through [`CmaState::tell`]. Only fitness ranks enter the
//! update, so any strictly increasing transform of the objective leaves the
//! trajectory unchanged.
//!
//! Strategy parameters use the standard defaults from Hansen's tutorial:
//! log-rank weights, cumulative step-size adaptation and rank-one plus
//! rank-μ covariance updates.

mod params;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use params::StrategyParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmaError {
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("covariance matrix is no longer positive definite")]
    CovarianceDegenerate,
    #[error("expected {expected} {what}, got {got}")]
    WrongPopulationSize {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("candidate {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Parents are discarded every generation.
    #[default]
    Comma,
    /// Surviving parents compete with the offspring.
    Plus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CmaConfig {
    pub dimension: usize,
    pub lambda: usize,
    pub mu: usize,
    pub sigma0: f64,
    pub max_generations: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// Stop once `sigma * sqrt(max eigenvalue of C)` drops below this.
    pub tolerance: f64,
}

impl Default for CmaConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            lambda: 10,
            mu: 3,
            sigma0: 0.25,
            max_generations: 100,
            strategy: Strategy::Comma,
            seed: 0,
            tolerance: 1e-10,
        }
    }
}

impl CmaConfig {
    pub fn validate(&self) -> Result<(), CmaError> {
        let bad = |m: String| Err(CmaError::BadConfig(m));
        if self.dimension == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.mu == 0 || self.mu > self.lambda {
            return bad(format!("need 1 <= mu <= lambda, got mu={} lambda={}", self.mu, self.lambda));
        }
        if !(self.sigma0 > 0.0) || !self.sigma0.is_finite() {
            return bad(format!("sigma0 must be positive, got {}", self.sigma0));
        }
        if !(self.tolerance >= 0.0) {
            return bad(format!("tolerance must be non-negative, got {}", self.tolerance));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Offspring,
    SurvivingParent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedCandidate {
    pub genome: Vec<f64>,
    /// Lower is better.
    pub fitness: f64,
    pub origin: Origin,
}

impl EvaluatedCandidate {
    pub fn offspring(genome: Vec<f64>, fitness: f64) -> Self {
        Self {
            genome,
            fitness,
            origin: Origin::Offspring,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    MaxGenerations,
    StepSize,
}

impl std::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TerminationReason::MaxGenerations => "max_generations",
            TerminationReason::StepSize => "step_size",
        })
    }
}

/// Indices into the pool passed to [`CmaState::tell`], best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Eigen {
    basis: DMatrix<f64>,
    /// Square roots of the eigenvalues of C.
    scales: DVector<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CmaState {
    config: CmaConfig,
    params: StrategyParams,
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    generation: usize,
    evaluations: usize,
    eigen: Option<Eigen>,
    rng: ChaCha8Rng,
    survivors: Vec<EvaluatedCandidate>,
    best: Option<EvaluatedCandidate>,
}

impl CmaState {
    pub fn init(config: CmaConfig, initial_mean: &[f64]) -> Result<Self, CmaError> {
        config.validate()?;
        if initial_mean.len() != config.dimension {
            return Err(CmaError::BadConfig(format!(
                "initial mean has {} entries but dimension is {}",
                initial_mean.len(),
                config.dimension
            )));
        }
        if initial_mean.iter().any(|v| !v.is_finite()) {
            return Err(CmaError::BadConfig("initial mean must be finite".into()));
        }
        let n = config.dimension;
        Ok(Self {
            params: StrategyParams::new(n, config.mu),
            mean: DVector::from_column_slice(initial_mean),
            sigma: config.sigma0,
            cov: DMatrix::identity(n, n),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            generation: 0,
            evaluations: 0,
            eigen: Some(Eigen {
                basis: DMatrix::identity(n, n),
                scales: DVector::from_element(n, 1.0),
            }),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            survivors: Vec::new(),
            best: None,
            config,
        })
    }

    pub fn config(&self) -> &CmaConfig {
        &self.config
    }

    pub fn params(&self) -> &StrategyParams {
        &self.params
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn weights(&self) -> &[f64] {
        &self.params.weights
    }

    /// Parents to pass back alongside the next offspring in plus mode;
    /// always empty in comma mode.
    pub fn survivors(&self) -> &[EvaluatedCandidate] {
        &self.survivors
    }

    /// Best candidate ever selected.
    pub fn best(&self) -> Option<&EvaluatedCandidate> {
        self.best.as_ref()
    }

    /// Samples `lambda` points from `N(mean, sigma² C)`.
    pub fn ask(&mut self) -> Result<Vec<Vec<f64>>, CmaError> {
        self.ensure_eigen()?;
        let eigen = self.eigen.as_ref().expect("eigen computed above");
        let n = self.config.dimension;
        let mut out = Vec::with_capacity(self.config.lambda);
        for _ in 0..self.config.lambda {
            let z = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut self.rng)));
            let y = &eigen.basis * z.component_mul(&eigen.scales);
            out.push((&self.mean + y * self.sigma).as_slice().to_vec());
        }
        Ok(out)
    }

    /// Selects the best `mu` candidates and updates mean, paths, step size
    /// and covariance. In comma mode `pool` must hold exactly `lambda`
    /// offspring; in plus mode it may additionally hold up to `mu`
    /// surviving parents. Ties keep pool order.
    pub fn tell(&mut self, pool: &[EvaluatedCandidate]) -> Result<Selection, CmaError> {
        let offspring = pool.iter().filter(|c| c.origin == Origin::Offspring).count();
        let parents = pool.len() - offspring;
        if offspring != self.config.lambda {
            return Err(CmaError::WrongPopulationSize {
                what: "offspring",
                expected: self.config.lambda,
                got: offspring,
            });
        }
        let max_parents = match self.config.strategy {
            Strategy::Comma => 0,
            Strategy::Plus => self.config.mu,
        };
        if parents > max_parents {
            return Err(CmaError::WrongPopulationSize {
                what: "surviving parents at most",
                expected: max_parents,
                got: parents,
            });
        }
        let n = self.config.dimension;
        if let Some((index, c)) = pool.iter().enumerate().find(|(_, c)| c.genome.len() != n) {
            return Err(CmaError::DimensionMismatch {
                index,
                expected: n,
                got: c.genome.len(),
            });
        }
        self.ensure_eigen()?;

        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| pool[a].fitness.total_cmp(&pool[b].fitness));
        order.truncate(self.config.mu);

        let p = &self.params;
        let old_mean = self.mean.clone();
        let steps: Vec<DVector<f64>> = order
            .iter()
            .map(|&i| (DVector::from_column_slice(&pool[i].genome) - &old_mean) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in p.weights.iter().zip(&steps) {
            y_w.axpy(*w, y, 1.0);
        }
        self.mean = &old_mean + &y_w * self.sigma;

        // C^{-1/2} y_w via the current eigenbasis
        let eigen = self.eigen.as_ref().expect("eigen computed above");
        let whitened = &eigen.basis * (eigen.basis.transpose() * &y_w).component_div(&eigen.scales);

        self.p_sigma = &self.p_sigma * (1.0 - p.c_sigma) + whitened * (p.c_sigma * (2.0 - p.c_sigma) * p.mu_eff).sqrt();
        let ps_norm = self.p_sigma.norm();
        let decay = 1.0 - (1.0 - p.c_sigma).powi(2 * (self.generation as i32 + 1));
        let h_sigma = ps_norm / decay.sqrt() < (1.4 + 2.0 / (n as f64 + 1.0)) * p.chi_n;
        let h = if h_sigma { 1.0 } else { 0.0 };

        self.p_c = &self.p_c * (1.0 - p.c_c) + &y_w * (h * (p.c_c * (2.0 - p.c_c) * p.mu_eff).sqrt());
        let delta_h = (1.0 - h) * p.c_c * (2.0 - p.c_c);

        let mut rank_mu = DMatrix::zeros(n, n);
        for (w, y) in p.weights.iter().zip(&steps) {
            rank_mu.ger(*w, y, y, 1.0);
        }
        let rank_one = &self.p_c * self.p_c.transpose();
        self.cov = &self.cov * (1.0 - p.c_1 - p.c_mu) + (rank_one + &self.cov * delta_h) * p.c_1 + rank_mu * p.c_mu;
        self.cov = (&self.cov + self.cov.transpose()) * 0.5;

        self.sigma *= ((p.c_sigma / p.d_sigma) * (ps_norm / p.chi_n - 1.0)).exp();
        self.eigen = None;
        self.generation += 1;
        self.evaluations += offspring;

        let selected: Vec<EvaluatedCandidate> = order
            .iter()
            .map(|&i| EvaluatedCandidate {
                origin: Origin::SurvivingParent,
                ..pool[i].clone()
            })
            .collect();
        if self.best.as_ref().is_none_or(|b| selected[0].fitness < b.fitness) {
            self.best = Some(selected[0].clone());
        }
        self.survivors = match self.config.strategy {
            Strategy::Comma => Vec::new(),
            Strategy::Plus => selected,
        };
        Ok(Selection { indices: order })
    }

    pub fn has_converged(&self) -> Option<TerminationReason> {
        if self.generation >= self.config.max_generations {
            return Some(TerminationReason::MaxGenerations);
        }
        let max_eig = self
            .cov
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(0.0f64, f64::max);
        if self.sigma * max_eig.sqrt() < self.config.tolerance {
            return Some(TerminationReason::StepSize);
        }
        None
    }

    /// True when C admits a Cholesky factorization.
    pub fn covariance_is_positive_definite(&self) -> bool {
        Cholesky::new(self.cov.clone()).is_some()
    }

    fn ensure_eigen(&mut self) -> Result<(), CmaError> {
        if self.eigen.is_some() {
            return Ok(());
        }
        if self.cov.iter().any(|v| !v.is_finite()) || !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(CmaError::CovarianceDegenerate);
        }
        let eig = SymmetricEigen::new(self.cov.clone());
        if eig.eigenvalues.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(CmaError::CovarianceDegenerate);
        }
        self.eigen = Some(Eigen {
            scales: eig.eigenvalues.map(f64::sqrt),
            basis: eig.eigenvectors,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(dimension: usize) -> CmaConfig {
        CmaConfig {
            dimension,
            seed: 42,
            ..CmaConfig::default()
        }
    }

    fn evaluate(points: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> Vec<EvaluatedCandidate> {
        points.iter().map(|x| EvaluatedCandidate::offspring(x.clone(), f(x))).collect()
    }

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn init_state() {
        let s = CmaState::init(config(2), &[1.0, 1.0]).unwrap();
        assert_eq!(s.covariance(), &DMatrix::identity(2, 2));
        assert_eq!(s.sigma(), 0.25);
        assert_eq!(s.mean(), &[1.0, 1.0]);
        assert!(s.has_converged().is_none());
    }

    #[test]
    fn bad_configs() {
        let c = CmaConfig { mu: 11, ..config(2) };
        assert!(matches!(CmaState::init(c, &[0.0, 0.0]), Err(CmaError::BadConfig(_))));
        let c = CmaConfig { sigma0: 0.0, ..config(2) };
        assert!(matches!(CmaState::init(c, &[0.0, 0.0]), Err(CmaError::BadConfig(_))));
        assert!(matches!(CmaState::init(config(3), &[0.0, 0.0]), Err(CmaError::BadConfig(_))));
    }

    #[test]
    fn log_rank_weights() {
        let s = CmaState::init(config(2), &[0.0, 0.0]).unwrap();
        let w = s.weights();
        assert_eq!(w.len(), 3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(w.windows(2).all(|p| p[0] > p[1]));
        assert!(w.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn ask_is_deterministic() {
        let mut a = CmaState::init(config(4), &[0.0; 4]).unwrap();
        let mut b = a.clone();
        assert_eq!(a.ask().unwrap(), b.ask().unwrap());
        assert_eq!(a.ask().unwrap().len(), 10);
    }

    #[test]
    fn tiny_sigma_collapses_to_mean() {
        let c = CmaConfig { sigma0: 1e-12, ..config(3) };
        let mut s = CmaState::init(c, &[0.5, -2.0, 3.0]).unwrap();
        for x in s.ask().unwrap() {
            for (xi, mi) in x.iter().zip([0.5, -2.0, 3.0]) {
                assert!((xi - mi).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn empirical_covariance_is_identity() {
        let c = CmaConfig { sigma0: 1.0, ..config(3) };
        let mut s = CmaState::init(c, &[0.0; 3]).unwrap();
        let samples: Vec<Vec<f64>> = (0..1000).flat_map(|_| s.ask().unwrap()).collect();
        assert_eq!(samples.len(), 10_000);
        let n = samples.len() as f64;
        for i in 0..3 {
            for j in 0..3 {
                let cov: f64 = samples.iter().map(|x| x[i] * x[j]).sum::<f64>() / n;
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((cov - expected).abs() < 0.1, "C[{i}{j}] = {cov}");
            }
        }
    }

    #[test]
    fn equal_fitness_takes_first_mu() {
        let mut s = CmaState::init(config(2), &[0.0, 0.0]).unwrap();
        let xs = s.ask().unwrap();
        let sel = s.tell(&evaluate(&xs, |_| 1.0)).unwrap();
        assert_eq!(sel.indices, vec![0, 1, 2]);
        let weights = s.weights().to_vec();
        for k in 0..2 {
            let expected: f64 = (0..3).map(|i| weights[i] * xs[i][k]).sum();
            assert!((s.mean()[k] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn plus_keeps_better_parents() {
        let c = CmaConfig {
            strategy: super::Strategy::Plus,
            ..config(2)
        };
        let mut s = CmaState::init(c, &[1.0, 1.0]).unwrap();
        let xs = s.ask().unwrap();
        s.tell(&evaluate(&xs, sphere)).unwrap();
        let parents = s.survivors().to_vec();
        assert_eq!(parents.len(), 3);
        let best = s.best().unwrap().clone();

        let xs = s.ask().unwrap();
        let mut pool = evaluate(&xs, |_| 1e9);
        pool.extend(parents.iter().cloned());
        let sel = s.tell(&pool).unwrap();
        assert_eq!(sel.indices, vec![10, 11, 12]);
        assert_eq!(s.survivors(), parents.as_slice());
        assert_eq!(s.best(), Some(&best));
    }

    #[test]
    fn population_size_checked() {
        let mut s = CmaState::init(config(2), &[0.0, 0.0]).unwrap();
        let xs = s.ask().unwrap();
        let mut pool = evaluate(&xs[..9], sphere);
        assert!(matches!(s.tell(&pool), Err(CmaError::WrongPopulationSize { .. })));
        pool = evaluate(&xs, sphere);
        pool.push(EvaluatedCandidate {
            origin: Origin::SurvivingParent,
            ..pool[0].clone()
        });
        // comma mode accepts no parents
        assert!(matches!(s.tell(&pool), Err(CmaError::WrongPopulationSize { .. })));
    }

    #[test]
    fn convergence_reasons() {
        let c = CmaConfig {
            max_generations: 1,
            ..config(2)
        };
        let mut s = CmaState::init(c.clone(), &[0.0, 0.0]).unwrap();
        let xs = s.ask().unwrap();
        s.tell(&evaluate(&xs, sphere)).unwrap();
        assert_eq!(s.has_converged(), Some(TerminationReason::MaxGenerations));

        let c = CmaConfig { sigma0: 1e-12, ..config(2) };
        let s = CmaState::init(c, &[0.0, 0.0]).unwrap();
        assert_eq!(s.has_converged(), Some(TerminationReason::StepSize));
    }

    #[test]
    fn sphere_converges_and_stays_positive_definite() {
        let c = CmaConfig {
            sigma0: 0.5,
            max_generations: 10_000,
            ..config(5)
        };
        let mut s = CmaState::init(c, &[1.0; 5]).unwrap();
        let mut best = f64::INFINITY;
        while best >= 1e-8 && s.evaluations() < 5000 {
            let pool = evaluate(&s.ask().unwrap(), sphere);
            best = best.min(pool.iter().map(|c| c.fitness).fold(f64::INFINITY, f64::min));
            s.tell(&pool).unwrap();
            assert!(s.covariance_is_positive_definite());
        }
        assert!(best < 1e-8, "best {best} after {}", s.evaluations());
    }

    #[test]
    fn snapshot_roundtrip_resumes_identically() {
        let mut s = CmaState::init(config(3), &[0.3; 3]).unwrap();
        let xs = s.ask().unwrap();
        s.tell(&evaluate(&xs, sphere)).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let mut restored: CmaState = serde_json::from_str(&text).unwrap();
        assert_eq!(restored.ask().unwrap(), s.ask().unwrap());
    }

    proptest! {
        #[test]
        fn rank_transform_leaves_update_unchanged(seed in any::<u64>(), shift in -5.0f64..5.0, scale in 0.01f64..10.0) {
            let c = CmaConfig { seed, ..config(3) };
            let mut a = CmaState::init(c, &[0.2, -0.4, 1.0]).unwrap();
            let mut b = a.clone();
            for _ in 0..5 {
                let xa = a.ask().unwrap();
                let xb = b.ask().unwrap();
                prop_assert_eq!(&xa, &xb);
                let sa = a.tell(&evaluate(&xa, sphere)).unwrap();
                let sb = b.tell(&evaluate(&xb, |x| (scale * sphere(x)).exp() + shift)).unwrap();
                prop_assert_eq!(sa, sb);
                prop_assert_eq!(a.mean(), b.mean());
                prop_assert_eq!(a.sigma().to_bits(), b.sigma().to_bits());
                prop_assert_eq!(a.covariance(), b.covariance());
            }
        }
    }
}
