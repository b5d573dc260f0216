//! Seeded Poisson simulator for the limiting primitive length spectrum.
//!
//! The limiting model says: primitive geodesic lengths in `(0, L]` form a
//! Poisson point process with intensity [`crate::integrals::intensity`].  A
//! realization is drawn in the standard two-stage way — a Poisson count with
//! mean `I(L)`, then that many i.i.d. lengths from the normalized density —
//! with the lengths produced by inverting the cumulative mass on a
//! precomputed monotone grid plus local bisection.
//!
//! Reproducibility contract: trial `i` of a run is a pure function of
//! `(seed, i)`.  Each trial gets its own counter-derived ChaCha12 stream, so
//! trials can be generated in any order (or in parallel) without changing
//! results.
//!
//! The model covers the primitive non-separating spectrum only; it makes no
//! attempt to represent finite-genus corrections or a separating-curve
//! subprocess (the estimator's error terms quantify what is being ignored).

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::intensity;
use crate::quad::gk15;

/// Parameters of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Upper length cap `L` of the observation window `(0, L]`.
    pub window: f64,
    /// Number of cells in the precomputed cumulative-mass grid.
    pub inversion_grid: u32,
}

impl SimConfig {
    pub const DEFAULT_INVERSION_GRID: u32 = 4096;

    pub fn new(trials: u64, seed: u64, window: f64) -> Result<Self> {
        let config = Self {
            trials,
            seed,
            window,
            inversion_grid: Self::DEFAULT_INVERSION_GRID,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_inversion_grid(mut self, cells: u32) -> Result<Self> {
        self.inversion_grid = cells;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "window must be positive and finite, got {}",
                self.window
            )));
        }
        if self.inversion_grid < 8 {
            return Err(Error::InvalidParameter(
                "the inversion grid needs at least 8 cells".into(),
            ));
        }
        Ok(())
    }
}

/// One realization of the spectrum: the lengths observed in `(0, window]`,
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample {
    lengths: Vec<f64>,
    window: f64,
}

impl SpectrumSample {
    pub fn new(mut lengths: Vec<f64>, window: f64) -> Result<Self> {
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "window must be positive and finite, got {window}"
            )));
        }
        for &length in &lengths {
            if !(length > 0.0 && length <= window) {
                return Err(Error::InvalidParameter(format!(
                    "length {length} is outside the window (0, {window}]"
                )));
            }
        }
        lengths.sort_by(f64::total_cmp);
        Ok(Self { lengths, window })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn count(&self) -> usize {
        self.lengths.len()
    }

    /// Shortest observed length, or `+inf` for an empty spectrum.
    pub fn systole(&self) -> f64 {
        self.lengths.first().copied().unwrap_or(f64::INFINITY)
    }
}

/// Shared per-run state: the cumulative intensity mass on a uniform grid
/// over the window.
pub struct SpectrumSampler {
    config: SimConfig,
    /// `cumulative[i]` is the mass of `(0, node_i]`; length `cells + 1`.
    cumulative: Vec<f64>,
}

impl SpectrumSampler {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let cells = config.inversion_grid as usize;
        let mut cumulative = Vec::with_capacity(cells + 1);
        cumulative.push(0.0);
        let mut running = 0.0f64;
        for i in 0..cells {
            let a = config.window * i as f64 / cells as f64;
            let b = config.window * (i + 1) as f64 / cells as f64;
            running += gk15(&intensity, a, b).0;
            cumulative.push(running);
        }
        if running > 1e7 {
            return Err(Error::InvalidParameter(format!(
                "expected count {running:.3e} is too large to simulate"
            )));
        }
        Ok(Self { config, cumulative })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Total expected count `I(window)` as seen by the sampler's grid.
    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().expect("grid is nonempty")
    }

    /// The sample for one trial; a pure function of `(seed, trial_index)`.
    pub fn sample(&self, trial_index: u64) -> SpectrumSample {
        let mut rng = ChaCha12Rng::seed_from_u64(self.config.seed);
        rng.set_stream(trial_index);

        let mass = self.total_mass();
        let count = if mass > 0.0 {
            Poisson::new(mass).expect("positive mean").sample(&mut rng) as usize
        } else {
            0
        };
        let mut lengths = Vec::with_capacity(count);
        for _ in 0..count {
            let quantile: f64 = rng.sample(Open01);
            lengths.push(self.invert_mass(quantile * mass));
        }
        lengths.sort_by(f64::total_cmp);
        SpectrumSample {
            lengths,
            window: self.config.window,
        }
    }

    /// Length `l` with cumulative mass `target`: grid lookup for the cell,
    /// then bisection against the one-panel quadrature within it.
    fn invert_mass(&self, target: f64) -> f64 {
        let cell = self.cumulative.partition_point(|&mass| mass < target) - 1;
        let cells = self.config.inversion_grid as usize;
        let cell = cell.min(cells - 1);
        let cell_start = self.config.window * cell as f64 / cells as f64;
        let cell_end = self.config.window * (cell + 1) as f64 / cells as f64;
        let base = self.cumulative[cell];

        let tolerance = 1e-13 * self.config.window.max(1.0);
        let mut lo = cell_start;
        let mut hi = cell_end;
        while hi - lo > tolerance {
            let mid = 0.5 * (lo + hi);
            if base + gk15(&intensity, cell_start, mid).0 < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// One row of the empirical systole distribution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CdfPoint {
    pub point: f64,
    /// Fraction of trials whose systole is at most `point`.
    pub fraction: f64,
    /// Binomial standard error `sqrt(fraction (1 - fraction) / trials)`.
    pub stderr: f64,
}

/// Aggregates of a full simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub trials: u64,
    pub window: f64,
    pub total_mass: f64,
    pub count_mean: f64,
    /// Sample variance of the counts (zero for a single trial).
    pub count_variance: f64,
    pub cdf: Vec<CdfPoint>,
}

/// Run all trials once and aggregate counts and the systole distribution at
/// `eval_points` (each must lie in `(0, window]`).
pub fn run_simulation(config: &SimConfig, eval_points: &[f64]) -> Result<SimReport> {
    for &point in eval_points {
        if !(point > 0.0 && point <= config.window) {
            return Err(Error::InvalidParameter(format!(
                "evaluation point {point} is outside the window (0, {}]",
                config.window
            )));
        }
    }
    let sampler = SpectrumSampler::new(config.clone())?;
    let trials = config.trials;
    let mut counts = Vec::with_capacity(trials as usize);
    let mut hits = vec![0u64; eval_points.len()];
    for trial in 0..trials {
        let sample = sampler.sample(trial);
        counts.push(sample.count() as f64);
        let systole = sample.systole();
        for (hit, &point) in hits.iter_mut().zip(eval_points) {
            if systole <= point {
                *hit += 1;
            }
        }
    }

    let count_mean = counts.iter().sum::<f64>() / trials as f64;
    let count_variance = if trials > 1 {
        counts
            .iter()
            .map(|&count| (count - count_mean).powi(2))
            .sum::<f64>()
            / (trials - 1) as f64
    } else {
        0.0
    };
    let cdf = hits
        .iter()
        .zip(eval_points)
        .map(|(&hit, &point)| {
            let fraction = hit as f64 / trials as f64;
            CdfPoint {
                point,
                fraction,
                stderr: (fraction * (1.0 - fraction) / trials as f64).sqrt(),
            }
        })
        .collect();

    Ok(SimReport {
        trials,
        window: config.window,
        total_mass: sampler.total_mass(),
        count_mean,
        count_variance,
        cdf,
    })
}

/// Empirical distribution of the systole at the given points.
pub fn empirical_systole_cdf(config: &SimConfig, eval_points: &[f64]) -> Result<Vec<CdfPoint>> {
    run_simulation(config, eval_points).map(|report| report.cdf)
}

/// Empirical mean and sample variance of the spectrum cardinality.
pub fn count_moments(config: &SimConfig) -> Result<(f64, f64)> {
    run_simulation(config, &[]).map(|report| (report.count_mean, report.count_variance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::i_of;
    use crate::quad::QuadratureConfig;

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0, 1, 2.0).is_err());
        assert!(SimConfig::new(10, 1, 0.0).is_err());
        assert!(SimConfig::new(10, 1, 2.0)
            .unwrap()
            .with_inversion_grid(4)
            .is_err());
        assert_eq!(
            SimConfig::new(10, 1, 2.0).unwrap().inversion_grid,
            SimConfig::DEFAULT_INVERSION_GRID
        );
    }

    #[test]
    fn sample_validation_and_systole() {
        let empty = SpectrumSample::new(vec![], 2.0).unwrap();
        assert_eq!(empty.systole(), f64::INFINITY);
        let pair = SpectrumSample::new(vec![3.5, 2.0], 4.0).unwrap();
        assert_eq!(pair.systole(), 2.0);
        assert_eq!(pair.lengths(), &[2.0, 3.5]);
        let single = SpectrumSample::new(vec![1.25], 2.0).unwrap();
        assert_eq!(single.systole(), 1.25);
        assert!(SpectrumSample::new(vec![5.0], 2.0).is_err());
        assert!(SpectrumSample::new(vec![0.0], 2.0).is_err());
    }

    #[test]
    fn trials_are_reproducible_and_stream_separated() {
        let sampler = SpectrumSampler::new(SimConfig::new(10, 7, 3.0).unwrap()).unwrap();
        let first = sampler.sample(3);
        let again = sampler.sample(3);
        assert_eq!(first, again);
        let other = sampler.sample(4);
        assert_ne!(first, other);
    }

    #[test]
    fn samples_stay_in_window_and_sorted() {
        let sampler = SpectrumSampler::new(SimConfig::new(10, 11, 2.5).unwrap()).unwrap();
        for trial in 0..50 {
            let sample = sampler.sample(trial);
            let lengths = sample.lengths();
            for &length in lengths {
                assert!(length > 0.0 && length <= 2.5);
            }
            for pair in lengths.windows(2) {
                assert!(pair[0] <= pair[1]);
            }
        }
    }

    #[test]
    fn grid_mass_matches_the_quadrature() {
        let sampler = SpectrumSampler::new(SimConfig::new(1, 0, 4.0).unwrap()).unwrap();
        let reference = i_of(4.0, &QuadratureConfig::default()).unwrap();
        assert!((sampler.total_mass() - reference).abs() <= 1e-9 * reference);
    }

    #[test]
    fn count_moments_match_the_poisson_law() {
        let config = SimConfig::new(2_000, 20_260_823, 2.0).unwrap();
        let (mean, variance) = count_moments(&config).unwrap();
        let mass = i_of(2.0, &QuadratureConfig::default()).unwrap();
        let sigma_mean = (mass / 2_000.0).sqrt();
        assert!((mean - mass).abs() <= 3.0 * sigma_mean, "mean {mean} vs {mass}");
        let sigma_variance = ((mass + 2.0 * mass * mass) / 2_000.0).sqrt();
        assert!(
            (variance - mass).abs() <= 3.0 * sigma_variance,
            "variance {variance} vs {mass}"
        );
    }

    #[test]
    fn single_trial_variance_is_zero() {
        let config = SimConfig::new(1, 5, 2.0).unwrap();
        let (_, variance) = count_moments(&config).unwrap();
        assert_eq!(variance, 0.0);
    }

    #[test]
    fn wider_windows_mean_more_lengths() {
        let narrow = count_moments(&SimConfig::new(500, 3, 1.5).unwrap()).unwrap().0;
        let wide = count_moments(&SimConfig::new(500, 3, 3.0).unwrap()).unwrap().0;
        assert!(wide > narrow);
    }

    #[test]
    fn cdf_is_monotone_and_matches_the_void_probability() {
        let config = SimConfig::new(3_000, 99, 3.0).unwrap();
        let quad = QuadratureConfig::default();
        let points = [0.5, 1.0, 2.0, 3.0];
        let cdf = empirical_systole_cdf(&config, &points).unwrap();
        let mut last = 0.0;
        for row in &cdf {
            assert!(row.fraction >= last);
            last = row.fraction;
            let expect = -(-i_of(row.point, &quad).unwrap()).exp_m1();
            let slack = 3.0 * row.stderr.max(1e-3);
            assert!(
                (row.fraction - expect).abs() <= slack,
                "point {}: {} vs {expect}",
                row.point,
                row.fraction
            );
        }
        assert!(empirical_systole_cdf(&config, &[4.0]).is_err());
    }

    #[test]
    fn superposition_of_subwindows() {
        // Counts from (0, 2] directly, versus a (0, 1] run plus the
        // restriction of an independent full-window run to (1, 2].
        let trials = 4_000u64;
        let full = SpectrumSampler::new(SimConfig::new(trials, 404, 2.0).unwrap()).unwrap();
        let low = SpectrumSampler::new(SimConfig::new(trials, 405, 1.0).unwrap()).unwrap();
        let high_source = SpectrumSampler::new(SimConfig::new(trials, 406, 2.0).unwrap()).unwrap();

        let mut direct = Vec::with_capacity(trials as usize);
        let mut stitched = Vec::with_capacity(trials as usize);
        for trial in 0..trials {
            direct.push(full.sample(trial).count() as f64);
            let below = low.sample(trial).count();
            let above = high_source
                .sample(trial)
                .lengths()
                .iter()
                .filter(|&&length| length > 1.0)
                .count();
            stitched.push((below + above) as f64);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64], m: f64| {
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
        };
        let (m1, m2) = (mean(&direct), mean(&stitched));
        let spread =
            (var(&direct, m1) / trials as f64 + var(&stitched, m2) / trials as f64).sqrt();
        assert!((m1 - m2).abs() <= 3.0 * spread, "{m1} vs {m2} (sigma {spread})");
    }
}
