//! Brute-force sampling oracle for the mean and RMS strain statistics.
//!
//! Each trial draws an independent impurity count k_i ~ Poisson(n_i·V)
//! per species and forms the volume-averaged strain Σ η_i·k_i/(N₀·V).
//! In expectation this reproduces the closed-form mean Σ η_i·n_i/N₀ and
//! the closed-form standard deviation sqrt(Σ η_i²·n_i/(N₀²·V)) exactly,
//! so the sampler is an independent derivation of those formulas rather
//! than a restatement.
//!
//! Sampling is deterministic: the seed is expanded through SplitMix64
//! into per-purpose ChaCha8 streams, and sweeps derive one independent
//! sub-seed per volume.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::materials::GeLatticeConstants;
use crate::strain::ImpuritySpecies;
use crate::{CoreError, Result};

/// Largest Poisson mean we accept: beyond 2^53 the f64 sample values no
/// longer represent every integer count exactly.
pub const MAX_POISSON_MEAN: f64 = 9.007_199_254_740_992e15; // 2^53

/// Sampling plan: species loads at explicit number densities (m⁻³), a
/// sampling volume, a trial count, and the seed that fixes the stream.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub species_loads: Vec<(ImpuritySpecies, f64)>,
    pub sampling_volume_m3: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.species_loads.is_empty() {
            return Err(CoreError::EmptyInput("species loads"));
        }
        if !(self.sampling_volume_m3 > 0.0) {
            return Err(CoreError::invalid(
                "McConfig",
                format!(
                    "sampling volume must be positive, got {}",
                    self.sampling_volume_m3
                ),
            ));
        }
        if self.trials < 1 {
            return Err(CoreError::invalid("McConfig", "trials must be >= 1"));
        }
        for (sp, n) in &self.species_loads {
            if !(*n > 0.0 && n.is_finite()) {
                return Err(CoreError::invalid(
                    "McConfig",
                    format!("density for {} must be positive, got {n}", sp.symbol),
                ));
            }
            let lambda = n * self.sampling_volume_m3;
            if lambda > MAX_POISSON_MEAN {
                return Err(CoreError::PoissonRange {
                    lambda,
                    max: MAX_POISSON_MEAN,
                });
            }
        }
        Ok(())
    }
}

/// Sample statistics over the trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub sample_mean: f64,
    /// Bessel-corrected sample standard deviation.
    pub sample_std: f64,
    pub trials: u64,
    /// sample_std / sqrt(trials).
    pub standard_error_of_mean: f64,
    /// Mean sampled count per species, for the Poisson-mean cross-check.
    pub mean_counts: Vec<f64>,
}

/// Closed-form moments of the per-trial strain with the standard errors
/// of their sample estimators, from the exact Poisson cumulants
/// (κ₂ = Σa²λ, κ₄ = Σa⁴λ with a = η/(N₀V), λ = nV; delta method for
/// the std estimator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrainMoments {
    pub mean: f64,
    pub std: f64,
    pub se_mean: f64,
    pub se_std: f64,
}

/// Analytic mean/std and estimator standard errors for a sampling plan.
pub fn analytic_moments(
    loads: &[(ImpuritySpecies, f64)],
    volume_m3: f64,
    trials: u64,
    lattice: &GeLatticeConstants,
) -> Result<StrainMoments> {
    if loads.is_empty() {
        return Err(CoreError::EmptyInput("species loads"));
    }
    if !(volume_m3 > 0.0) {
        return Err(CoreError::invalid(
            "analytic_moments",
            "volume must be positive",
        ));
    }
    let n0 = lattice.atomic_density_n0;
    let nt = trials as f64;
    let mut mean = 0.0;
    let mut kappa2 = 0.0;
    let mut kappa4 = 0.0;
    for (sp, n) in loads {
        let a = sp.mismatch_eta / (n0 * volume_m3);
        let lambda = n * volume_m3;
        mean += a * lambda;
        kappa2 += a * a * lambda;
        kappa4 += a.powi(4) * lambda;
    }
    let std = kappa2.sqrt();
    let se_mean = std / nt.sqrt();
    let se_std = if std > 0.0 {
        ((kappa4 + 2.0 * kappa2 * kappa2) / (4.0 * kappa2 * nt)).sqrt()
    } else {
        0.0
    };
    Ok(StrainMoments {
        mean,
        std,
        se_mean,
        se_std,
    })
}

/// SplitMix64 step, used to decorrelate derived seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for stream `index` under `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(1)))
}

/// Runs the sampling plan and returns the sample statistics.
pub fn simulate_volume_strain(cfg: &McConfig, lattice: &GeLatticeConstants) -> Result<McResult> {
    cfg.validate()?;
    let n0 = lattice.atomic_density_n0;
    let v = cfg.sampling_volume_m3;
    let samplers: Vec<(f64, Option<Poisson<f64>>)> = cfg
        .species_loads
        .iter()
        .map(|(sp, n)| {
            let a = sp.mismatch_eta / (n0 * v);
            let pois = Poisson::new(n * v).map_err(|e| {
                CoreError::invalid("McConfig", format!("Poisson({:e}): {e}", n * v))
            })?;
            Ok((a, Some(pois)))
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0));
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut count_sums = vec![0.0f64; samplers.len()];
    for t in 0..cfg.trials {
        let mut eps = 0.0;
        for (i, (a, pois)) in samplers.iter().enumerate() {
            let k = pois.as_ref().expect("sampler built").sample(&mut rng);
            count_sums[i] += k;
            eps += a * k;
        }
        // Welford update keeps the accumulation stable over 1e6+ trials.
        let delta = eps - mean;
        mean += delta / (t + 1) as f64;
        m2 += delta * (eps - mean);
    }
    let trials_f = cfg.trials as f64;
    let sample_std = if cfg.trials > 1 {
        (m2 / (trials_f - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(McResult {
        sample_mean: mean,
        sample_std,
        trials: cfg.trials,
        standard_error_of_mean: sample_std / trials_f.sqrt(),
        mean_counts: count_sums.iter().map(|s| s / trials_f).collect(),
    })
}

/// Per-volume std estimates from independent sub-seeded runs.
pub fn convergence_sweep(
    cfg: &McConfig,
    volumes_m3: &[f64],
    lattice: &GeLatticeConstants,
) -> Result<Vec<(f64, f64)>> {
    if volumes_m3.is_empty() {
        return Err(CoreError::EmptyInput("volumes"));
    }
    let mut out = Vec::with_capacity(volumes_m3.len());
    for (j, &v) in volumes_m3.iter().enumerate() {
        let sub = McConfig {
            species_loads: cfg.species_loads.clone(),
            sampling_volume_m3: v,
            trials: cfg.trials,
            seed: derive_seed(cfg.seed, 1 + j as u64),
        };
        let res = simulate_volume_strain(&sub, lattice)?;
        out.push((v, res.sample_std));
    }
    Ok(out)
}
