//! Grid evaluation of strain and T1 budgets over operating-point ranges,
//! plus the two closed-form design inversions: the suppression level at
//! which parasitics take over, and the minimum cavity detuning keeping
//! the Purcell rate under a budget.
//!
//! Cells are evaluated in row-major order over the axes as declared
//! (first axis outermost). A failing cell carries its error string and
//! does not abort the sweep.

use serde::{Deserialize, Serialize};

use crate::budget::{
    channel_rates, pnc_suppression_factor, purcell_rate, qubit_frequency, reference_t1, t2_from,
    CalibrationPoint, CavityParams, ModeSpectrum, ParasiticChannels, QubitOperatingPoint,
};
use crate::materials::{GeLatticeConstants, PhysicalConstants};
use crate::strain::{total_avg_strain, ImpuritySpecies, PurityGrade};
use crate::{CoreError, Result};

/// Sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    B0,
    T,
    SPnc,
    DeltaCav,
    Q,
    GCoupling,
    ImpurityDensity,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::B0 => "B0",
            AxisParam::T => "T",
            AxisParam::SPnc => "S_pnc",
            AxisParam::DeltaCav => "delta_cav",
            AxisParam::Q => "Q",
            AxisParam::GCoupling => "g_coupling",
            AxisParam::ImpurityDensity => "impurity_density",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    Linear,
    Log,
}

/// One swept axis: an inclusive [min, max] range sampled at `points`
/// locations on a linear or logarithmic scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub scale: AxisScale,
    pub points: usize,
}

impl Axis {
    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(CoreError::SweepSpec(format!(
                "axis {}: points must be >= 2, got {}",
                self.param.name(),
                self.points
            )));
        }
        if !(self.min < self.max) {
            return Err(CoreError::SweepSpec(format!(
                "axis {}: need min < max, got [{:e}, {:e}]",
                self.param.name(),
                self.min,
                self.max
            )));
        }
        if self.scale == AxisScale::Log && !(self.min > 0.0) {
            return Err(CoreError::SweepSpec(format!(
                "axis {}: log scale requires min > 0, got {:e}",
                self.param.name(),
                self.min
            )));
        }
        let needs_positive_min = matches!(
            self.param,
            AxisParam::B0
                | AxisParam::T
                | AxisParam::Q
                | AxisParam::GCoupling
                | AxisParam::ImpurityDensity
        );
        if needs_positive_min && !(self.min > 0.0) {
            return Err(CoreError::SweepSpec(format!(
                "axis {}: values must stay strictly positive, got min {:e}",
                self.param.name(),
                self.min
            )));
        }
        if self.param == AxisParam::SPnc && self.min < 0.0 {
            return Err(CoreError::SweepSpec(
                "axis S_pnc: suppression cannot be negative".to_string(),
            ));
        }
        Ok(())
    }

    /// The sampled coordinate values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    AxisScale::Linear => self.min + t * (self.max - self.min),
                    AxisScale::Log => {
                        10f64.powf(self.min.log10() + t * (self.max.log10() - self.min.log10()))
                    }
                }
            })
            .collect()
    }
}

/// Where the suppression factor for a budget evaluation comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SuppressionSource {
    /// Use this value directly.
    Fixed(f64),
    /// Evaluate the spectrum at the cell's qubit frequency.
    Spectrum(ModeSpectrum),
}

/// Fully specified base configuration for budget evaluation; the sweep
/// perturbs copies of this per cell.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub constants: PhysicalConstants,
    pub lattice: GeLatticeConstants,
    pub operating_point: QubitOperatingPoint,
    pub calibration: CalibrationPoint,
    pub channels: ParasiticChannels,
    pub cavity: Option<CavityParams>,
    pub suppression: SuppressionSource,
    /// Pure-dephasing time; `f64::INFINITY` when dephasing is ignored.
    pub t_phi_s: f64,
    /// Optional impurity loads (species, number density m⁻³) for the
    /// strain column.
    pub species_loads: Vec<(ImpuritySpecies, f64)>,
    /// Overrides Δ = ω_q − ω_c in the Purcell term when set (used by the
    /// delta_cav axis); κ and g still come from `cavity`.
    pub delta_cav_override: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.channels.validate()?;
        if let SuppressionSource::Fixed(s) = &self.suppression {
            if *s < 0.0 || !s.is_finite() {
                return Err(CoreError::invalid(
                    "Scenario",
                    format!("fixed suppression must be >= 0 and finite, got {s}"),
                ));
            }
        }
        if !(self.t_phi_s > 0.0) {
            return Err(CoreError::invalid(
                "Scenario",
                format!("t_phi must be positive (or +inf), got {}", self.t_phi_s),
            ));
        }
        if self.cavity.is_some() && self.channels.gamma_cav > 0.0 {
            return Err(CoreError::invalid(
                "Scenario",
                "both cavity parameters and a nonzero gamma_cav are set; \
                 the cavity channel would be double-counted"
                    .to_string(),
            ));
        }
        Ok(())
    }

    /// Parasitic channels with the cavity term filled in from the
    /// Purcell formula when cavity parameters are present.
    pub fn effective_channels(&self, omega_q: f64) -> ParasiticChannels {
        let mut channels = self.channels;
        if let Some(cav) = &self.cavity {
            channels.gamma_cav = match self.delta_cav_override {
                Some(delta) => {
                    let kappa = cav.kappa();
                    cav.coupling_g * cav.coupling_g * kappa
                        / (delta * delta + (kappa / 2.0).powi(2))
                }
                None => purcell_rate(cav, omega_q),
            };
        }
        channels
    }
}

/// Everything one budget evaluation produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellOutput {
    pub t1_total_s: f64,
    pub t2_s: f64,
    pub dominant_channel: &'static str,
    pub s_pnc_used: f64,
    /// Magnitude total |ε̄| when species loads are configured.
    pub total_strain: Option<f64>,
}

/// Evaluates one fully specified scenario through the budget operations.
pub fn evaluate_scenario(scenario: &Scenario) -> Result<CellOutput> {
    scenario.validate()?;
    let omega_q = qubit_frequency(&scenario.operating_point, &scenario.constants);
    let t1_ref = reference_t1(&scenario.operating_point, &scenario.calibration);
    let s_pnc = match &scenario.suppression {
        SuppressionSource::Fixed(s) => *s,
        SuppressionSource::Spectrum(spectrum) => pnc_suppression_factor(spectrum, omega_q)?,
    };
    let channels = scenario.effective_channels(omega_q);
    let rates = channel_rates(t1_ref, s_pnc, &channels)?;
    let total_rate = rates.total();
    let t1_total = if total_rate == 0.0 {
        f64::INFINITY
    } else {
        1.0 / total_rate
    };
    let t2 = t2_from(t1_total, scenario.t_phi_s)?;
    let total_strain = if scenario.species_loads.is_empty() {
        None
    } else {
        let loads: Vec<(ImpuritySpecies, PurityGrade)> = scenario
            .species_loads
            .iter()
            .map(|(sp, n)| (sp.clone(), PurityGrade::NumberDensity(*n)))
            .collect();
        Some(total_avg_strain(&loads, &scenario.lattice)?.magnitude)
    };
    Ok(CellOutput {
        t1_total_s: t1_total,
        t2_s: t2,
        dominant_channel: rates.dominant(),
        s_pnc_used: s_pnc,
        total_strain,
    })
}

/// A sweep: up to three axes over a base scenario.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub base: Scenario,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(CoreError::SweepSpec(format!(
                "need 1..=3 axes, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[i + 1..].iter().any(|b| b.param == a.param) {
                return Err(CoreError::SweepSpec(format!(
                    "axis {} declared twice",
                    a.param.name()
                )));
            }
        }
        let cavity_axes = [AxisParam::DeltaCav, AxisParam::Q, AxisParam::GCoupling];
        for axis in &self.axes {
            if cavity_axes.contains(&axis.param) && self.base.cavity.is_none() {
                return Err(CoreError::SweepSpec(format!(
                    "axis {} requires cavity parameters in the base configuration",
                    axis.param.name()
                )));
            }
            if axis.param == AxisParam::ImpurityDensity && self.base.species_loads.is_empty() {
                return Err(CoreError::SweepSpec(
                    "axis impurity_density requires species loads in the base configuration"
                        .to_string(),
                ));
            }
        }
        self.base.validate()
    }
}

/// One grid cell: its coordinates in declared-axis order and either the
/// evaluated output or the error that cell produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub coords: Vec<f64>,
    pub output: Option<CellOutput>,
    pub error: Option<String>,
}

/// Sweep outcome: the axis names and every cell in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis_names: Vec<&'static str>,
    pub cells: Vec<SweepCell>,
}

fn apply_axis(scenario: &mut Scenario, param: AxisParam, value: f64) -> Result<()> {
    match param {
        AxisParam::B0 => {
            scenario.operating_point = QubitOperatingPoint::new(
                scenario.operating_point.g_eff,
                value,
                scenario.operating_point.temperature_k,
                scenario.operating_point.modality,
            )?;
        }
        AxisParam::T => {
            scenario.operating_point = QubitOperatingPoint::new(
                scenario.operating_point.g_eff,
                scenario.operating_point.field_b0_t,
                value,
                scenario.operating_point.modality,
            )?;
        }
        AxisParam::SPnc => {
            scenario.suppression = SuppressionSource::Fixed(value);
        }
        AxisParam::DeltaCav => {
            scenario.delta_cav_override = Some(value);
        }
        AxisParam::Q => {
            let cav = scenario.cavity.as_ref().expect("validated");
            scenario.cavity = Some(CavityParams::new(cav.omega_c, value, cav.coupling_g)?);
        }
        AxisParam::GCoupling => {
            let cav = scenario.cavity.as_ref().expect("validated");
            scenario.cavity = Some(CavityParams::new(cav.omega_c, cav.quality_q, value)?);
        }
        AxisParam::ImpurityDensity => {
            for (_, n) in scenario.species_loads.iter_mut() {
                *n = value;
            }
        }
    }
    Ok(())
}

/// Evaluates the full grid. Per-cell failures are recorded in the cell,
/// not propagated.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total: usize = axis_values.iter().map(Vec::len).product();
    let mut cells = Vec::with_capacity(total);
    let mut indices = vec![0usize; spec.axes.len()];
    for _ in 0..total {
        let coords: Vec<f64> = indices
            .iter()
            .zip(&axis_values)
            .map(|(&i, vals)| vals[i])
            .collect();
        let mut scenario = spec.base.clone();
        let cell_result = coords
            .iter()
            .zip(&spec.axes)
            .try_for_each(|(&v, axis)| apply_axis(&mut scenario, axis.param, v))
            .and_then(|()| evaluate_scenario(&scenario));
        cells.push(match cell_result {
            Ok(output) => SweepCell {
                coords,
                output: Some(output),
                error: None,
            },
            Err(e) => SweepCell {
                coords,
                output: None,
                error: Some(e.to_string()),
            },
        });
        // Row-major increment: last axis fastest.
        for k in (0..indices.len()).rev() {
            indices[k] += 1;
            if indices[k] < axis_values[k].len() {
                break;
            }
            indices[k] = 0;
        }
    }
    Ok(SweepResult {
        axis_names: spec.axes.iter().map(|a| a.param.name()).collect(),
        cells,
    })
}

/// Crossover result: the closed-form suppression at which the phonon
/// rate equals the parasitic total, plus the bisection cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub s_star: f64,
    pub s_star_bisection: f64,
    pub t1_ref_phonon_s: f64,
    pub gamma_parasitic_total: f64,
}

/// Suppression S* where phonon and parasitic rates are equal, for a
/// spec with a single S_pnc axis. Closed form S* = T1_ref·Γ_par,
/// verified against bisection on the swept range to 1e-6 relative.
pub fn find_crossover(spec: &SweepSpec) -> Result<Crossover> {
    spec.validate()?;
    if spec.axes.len() != 1 || spec.axes[0].param != AxisParam::SPnc {
        return Err(CoreError::SweepSpec(
            "find_crossover needs exactly one axis, S_pnc".to_string(),
        ));
    }
    let base = &spec.base;
    let omega_q = qubit_frequency(&base.operating_point, &base.constants);
    let t1_ref = reference_t1(&base.operating_point, &base.calibration);
    let gamma_par = base.effective_channels(omega_q).total();
    if gamma_par == 0.0 {
        return Err(CoreError::Crossover(
            "total parasitic rate is zero; no crossover exists".to_string(),
        ));
    }
    let s_star = t1_ref * gamma_par;
    let axis = &spec.axes[0];
    let rate_gap = |s: f64| s / t1_ref - gamma_par;
    let (mut lo, mut hi) = (axis.min, axis.max);
    if rate_gap(lo) > 0.0 || rate_gap(hi) < 0.0 {
        return Err(CoreError::Crossover(format!(
            "crossover S* = {s_star:e} outside swept range [{:e}, {:e}]",
            axis.min, axis.max
        )));
    }
    while (hi - lo) / hi.abs().max(f64::MIN_POSITIVE) > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if rate_gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_bisect = 0.5 * (lo + hi);
    if (s_bisect - s_star).abs() / s_star > 1e-6 {
        return Err(CoreError::Crossover(format!(
            "closed form {s_star:e} and bisection {s_bisect:e} disagree beyond 1e-6"
        )));
    }
    Ok(Crossover {
        s_star,
        s_star_bisection: s_bisect,
        t1_ref_phonon_s: t1_ref,
        gamma_parasitic_total: gamma_par,
    })
}

/// Minimal |Δ| keeping the Purcell rate at or below a budget:
/// |Δ| = sqrt(g²κ/γ − (κ/2)²), or 0 when even resonance satisfies it.
pub fn purcell_safe_detuning(cav: &CavityParams, gamma_budget: f64) -> Result<f64> {
    if !(gamma_budget > 0.0) {
        return Err(CoreError::invalid(
            "purcell_safe_detuning",
            format!("budget must be strictly positive, got {gamma_budget}"),
        ));
    }
    let kappa = cav.kappa();
    let on_resonance = 4.0 * cav.coupling_g * cav.coupling_g / kappa;
    if gamma_budget >= on_resonance {
        return Ok(0.0);
    }
    Ok((cav.coupling_g * cav.coupling_g * kappa / gamma_budget - (kappa / 2.0).powi(2)).sqrt())
}
