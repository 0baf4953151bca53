//! Longitudinal-relaxation budgets for phononic-crystal-patterned spin
//! qubits.
//!
//! The budget factorizes as: a calibrated reference phonon rate (B⁴T
//! scaling around a measured anchor), a strain-density-of-states
//! suppression factor S evaluated from a discrete mode spectrum against
//! an unpatterned reference density, and additive parasitic channels
//! including a cavity Purcell term. The working model is
//! T1 = [S/T1_ref + Γ_surf + Γ_def + Γ_mw + Γ_cav + Γ_other]⁻¹.
//!
//! All frequencies here are angular (rad/s). A fully gated phonon
//! channel yields an explicit `f64::INFINITY` sentinel, never a
//! division blow-up.

use serde::{Deserialize, Serialize};

use crate::materials::PhysicalConstants;
use crate::{CoreError, Result};

/// Which spin-qubit platform a calibration belongs to. Tags reports and
/// provenance; changes no formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Donor,
    Acceptor,
    GateElectron,
    GateHole,
}

impl std::fmt::Display for Modality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Modality::Donor => "donor",
            Modality::Acceptor => "acceptor",
            Modality::GateElectron => "gate_electron",
            Modality::GateHole => "gate_hole",
        };
        write!(f, "{s}")
    }
}

/// Field, temperature, and effective g-factor at which the qubit runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitOperatingPoint {
    pub g_eff: f64,
    /// Static magnetic field B₀ (T).
    pub field_b0_t: f64,
    /// Operating temperature (K).
    pub temperature_k: f64,
    pub modality: Modality,
}

impl QubitOperatingPoint {
    pub fn new(
        g_eff: f64,
        field_b0_t: f64,
        temperature_k: f64,
        modality: Modality,
    ) -> Result<Self> {
        if g_eff == 0.0 || !g_eff.is_finite() {
            return Err(CoreError::invalid(
                "QubitOperatingPoint",
                format!("g_eff must be nonzero and finite, got {g_eff}"),
            ));
        }
        if !(field_b0_t > 0.0 && field_b0_t.is_finite()) {
            return Err(CoreError::invalid(
                "QubitOperatingPoint",
                format!("field_b0_t must be positive, got {field_b0_t}"),
            ));
        }
        if !(temperature_k > 0.0 && temperature_k.is_finite()) {
            return Err(CoreError::invalid(
                "QubitOperatingPoint",
                format!("temperature_k must be positive, got {temperature_k}"),
            ));
        }
        Ok(Self {
            g_eff,
            field_b0_t,
            temperature_k,
            modality,
        })
    }
}

/// A measured (T1, B₀, T) anchor plus the power law that extrapolates it.
///
/// Defaults (4, 1) implement the direct one-phonon scaling
/// T1 ∝ B₀⁻⁴·T⁻¹; the exponents stay configurable because the prefactor
/// and anisotropy are species-dependent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    /// Reference relaxation time (s).
    pub t1_ref_s: f64,
    /// Field at which it was measured (T).
    pub field_ref_t: f64,
    /// Temperature at which it was measured (K).
    pub temp_ref_k: f64,
    pub field_exponent: f64,
    pub temp_exponent: f64,
}

impl CalibrationPoint {
    pub fn new(t1_ref_s: f64, field_ref_t: f64, temp_ref_k: f64) -> Result<Self> {
        Self::with_exponents(t1_ref_s, field_ref_t, temp_ref_k, 4.0, 1.0)
    }

    pub fn with_exponents(
        t1_ref_s: f64,
        field_ref_t: f64,
        temp_ref_k: f64,
        field_exponent: f64,
        temp_exponent: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("t1_ref_s", t1_ref_s),
            ("field_ref_t", field_ref_t),
            ("temp_ref_k", temp_ref_k),
            ("field_exponent", field_exponent),
            ("temp_exponent", temp_exponent),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoreError::invalid(
                    "CalibrationPoint",
                    format!("{name} must be strictly positive, got {v}"),
                ));
            }
        }
        Ok(Self {
            t1_ref_s,
            field_ref_t,
            temp_ref_k,
            field_exponent,
            temp_exponent,
        })
    }

    /// The enriched-Ge:P donor anchor: T1 = 0.6 ms at 0.44 T, 0.35 K.
    pub fn donor_ge_p() -> Self {
        Self::new(0.6e-3, 0.44, 0.35).expect("anchor values are positive")
    }
}

/// Qubit angular frequency ω_q = |g_eff|·μ_B·B₀/ħ (rad/s).
pub fn qubit_frequency(op: &QubitOperatingPoint, consts: &PhysicalConstants) -> f64 {
    op.g_eff.abs() * consts.bohr_magneton * op.field_b0_t / consts.reduced_planck
}

/// Reference phonon-limited T1 at an operating point, extrapolated from
/// the calibration anchor by the configured power law.
pub fn reference_t1(op: &QubitOperatingPoint, cal: &CalibrationPoint) -> f64 {
    cal.t1_ref_s
        * (cal.field_ref_t / op.field_b0_t).powf(cal.field_exponent)
        * (cal.temp_ref_k / op.temperature_k).powf(cal.temp_exponent)
}

/// Line shape used for the broadened delta in the mode-sum numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineShape {
    /// Unit-area Lorentzian with FWHM κ: (κ/2π)/(Δ² + (κ/2)²).
    #[default]
    Lorentzian,
    /// Unit-area Gaussian with FWHM κ.
    Gaussian,
}

impl LineShape {
    /// Unit-area profile evaluated at detuning Δ (rad/s) for FWHM κ.
    pub fn density(&self, delta: f64, kappa: f64) -> f64 {
        match self {
            LineShape::Lorentzian => {
                (kappa / (2.0 * std::f64::consts::PI)) / (delta * delta + (kappa / 2.0).powi(2))
            }
            LineShape::Gaussian => {
                let sigma = kappa / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
                (-0.5 * (delta / sigma).powi(2)).exp()
                    / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }
}

/// One acoustic mode: angular frequency, linewidth, and a
/// matrix-element weight |M|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Mode angular frequency ω_λ (rad/s).
    pub omega: f64,
    /// Linewidth κ_λ (rad/s), FWHM of the broadened delta.
    pub linewidth_kappa: f64,
    /// Coupling weight |M_λ|² (dimensionless, ≥ 0).
    pub coupling_weight: f64,
}

/// Reference (unpatterned-control) weighted strain density of states,
/// per rad/s: either a flat constant or a tabulated curve with linear
/// interpolation. Evaluation outside the table is an error, not a guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceDensity {
    Flat { density: f64 },
    Table { points: Vec<(f64, f64)> },
}

impl ReferenceDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            ReferenceDensity::Flat { density } => {
                if !(*density > 0.0 && density.is_finite()) {
                    return Err(CoreError::invalid(
                        "ReferenceDensity",
                        format!("flat density must be strictly positive, got {density}"),
                    ));
                }
            }
            ReferenceDensity::Table { points } => {
                if points.is_empty() {
                    return Err(CoreError::EmptyInput("reference density table"));
                }
                for w in points.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(CoreError::invalid(
                            "ReferenceDensity",
                            "table frequencies must be strictly increasing",
                        ));
                    }
                }
                if let Some((omega, d)) = points.iter().find(|(_, d)| !(*d > 0.0)) {
                    return Err(CoreError::invalid(
                        "ReferenceDensity",
                        format!(
                            "density must be strictly positive everywhere, got {d} at {omega:e}"
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Density at ω (rad/s); errors outside the tabulated domain.
    pub fn value_at(&self, omega: f64) -> Result<f64> {
        match self {
            ReferenceDensity::Flat { density } => Ok(*density),
            ReferenceDensity::Table { points } => {
                let first = points.first().expect("validated nonempty");
                let last = points.last().expect("validated nonempty");
                if omega < first.0 || omega > last.0 {
                    return Err(CoreError::ReferenceDensity {
                        omega,
                        why: format!(
                            "outside tabulated domain [{:e}, {:e}]; extrapolation refused",
                            first.0, last.0
                        ),
                    });
                }
                let idx = points.partition_point(|(w, _)| *w <= omega);
                if idx == 0 {
                    return Ok(first.1);
                }
                if idx == points.len() {
                    return Ok(last.1);
                }
                let (w0, d0) = points[idx - 1];
                let (w1, d1) = points[idx];
                let t = (omega - w0) / (w1 - w0);
                Ok(d0 + t * (d1 - d0))
            }
        }
    }
}

/// Discrete acoustic spectrum plus the unpatterned reference density it
/// is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub modes: Vec<Mode>,
    pub reference_density: ReferenceDensity,
    pub line_shape: LineShape,
}

impl ModeSpectrum {
    pub fn new(
        modes: Vec<Mode>,
        reference_density: ReferenceDensity,
        line_shape: LineShape,
    ) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                return Err(CoreError::invalid(
                    "ModeSpectrum",
                    format!("mode {i}: omega must be positive, got {}", m.omega),
                ));
            }
            if !(m.linewidth_kappa > 0.0 && m.linewidth_kappa.is_finite()) {
                return Err(CoreError::invalid(
                    "ModeSpectrum",
                    format!(
                        "mode {i}: linewidth must be positive, got {}",
                        m.linewidth_kappa
                    ),
                ));
            }
            if !(m.coupling_weight >= 0.0 && m.coupling_weight.is_finite()) {
                return Err(CoreError::invalid(
                    "ModeSpectrum",
                    format!("mode {i}: weight must be >= 0, got {}", m.coupling_weight),
                ));
            }
        }
        reference_density.validate()?;
        Ok(Self {
            modes,
            reference_density,
            line_shape,
        })
    }

    /// Builds a spectrum from ordinary-frequency inputs: modes as
    /// (f_hz, kappa_hz, weight) and a reference density per Hz. The
    /// per-Hz density converts as ρ_ω = ρ_f/2π.
    pub fn from_ordinary_hz(
        modes_hz: &[(f64, f64, f64)],
        reference_per_hz: ReferenceDensityHz,
        line_shape: LineShape,
    ) -> Result<Self> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let modes = modes_hz
            .iter()
            .map(|&(f, k, w)| Mode {
                omega: two_pi * f,
                linewidth_kappa: two_pi * k,
                coupling_weight: w,
            })
            .collect();
        let reference_density = match reference_per_hz {
            ReferenceDensityHz::Flat { density_per_hz } => ReferenceDensity::Flat {
                density: density_per_hz / two_pi,
            },
            ReferenceDensityHz::Table { points_hz } => ReferenceDensity::Table {
                points: points_hz
                    .iter()
                    .map(|&(f, d)| (two_pi * f, d / two_pi))
                    .collect(),
            },
        };
        Self::new(modes, reference_density, line_shape)
    }

    /// Mode-sum numerator Σ_λ |M_λ|²·δ_κ(ω − ω_λ), per rad/s.
    pub fn weighted_density_at(&self, omega: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                m.coupling_weight * self.line_shape.density(omega - m.omega, m.linewidth_kappa)
            })
            .sum()
    }
}

/// Reference density expressed in ordinary-frequency units, as ingested
/// from CSV files.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceDensityHz {
    Flat { density_per_hz: f64 },
    Table { points_hz: Vec<(f64, f64)> },
}

/// Strain-density-of-states suppression factor S at the qubit frequency:
/// the broadened, weighted mode sum over the unpatterned reference.
///
/// An empty mode list is the complete-bandgap idealization and yields 0.
pub fn pnc_suppression_factor(spectrum: &ModeSpectrum, omega_q: f64) -> Result<f64> {
    if !(omega_q > 0.0 && omega_q.is_finite()) {
        return Err(CoreError::invalid(
            "pnc_suppression_factor",
            format!("omega_q must be positive, got {omega_q}"),
        ));
    }
    let reference = spectrum.reference_density.value_at(omega_q)?;
    if reference == 0.0 {
        return Err(CoreError::ReferenceDensity {
            omega: omega_q,
            why: "reference density is zero; suppression ratio undefined".to_string(),
        });
    }
    Ok(spectrum.weighted_density_at(omega_q) / reference)
}

/// Phonon-limited T1 after suppression: T1_ref/S, with an explicit +∞
/// sentinel for a fully gated channel (S = 0).
pub fn pnc_t1(t1_ref_s: f64, s_pnc: f64) -> Result<f64> {
    if !(t1_ref_s > 0.0 && t1_ref_s.is_finite()) {
        return Err(CoreError::invalid(
            "pnc_t1",
            format!("t1_ref must be strictly positive, got {t1_ref_s}"),
        ));
    }
    if s_pnc < 0.0 || !s_pnc.is_finite() {
        return Err(CoreError::invalid(
            "pnc_t1",
            format!("s_pnc must be >= 0 and finite, got {s_pnc}"),
        ));
    }
    if s_pnc == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(t1_ref_s / s_pnc)
}

/// Additional relaxation channels introduced by the device geometry,
/// as rates (s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParasiticChannels {
    /// Surface magnetic noise, charge noise, surface TLS.
    pub gamma_surf: f64,
    /// Implantation/etch damage, dislocations, residual defects.
    pub gamma_def: f64,
    /// Microwave, gate, or resonator-induced relaxation.
    pub gamma_mw: f64,
    /// Relaxation through a localized phonon mode.
    pub gamma_cav: f64,
    pub gamma_other: f64,
}

impl ParasiticChannels {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CoreError::invalid(
                    "ParasiticChannels",
                    format!("{name} must be >= 0 and finite, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("surf", self.gamma_surf),
            ("def", self.gamma_def),
            ("mw", self.gamma_mw),
            ("cav", self.gamma_cav),
            ("other", self.gamma_other),
        ]
    }

    pub fn total(&self) -> f64 {
        self.named().iter().map(|(_, v)| v).sum()
    }
}

/// Localized phononic cavity mode near the qubit frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Cavity angular frequency ω_c (rad/s).
    pub omega_c: f64,
    /// Quality factor Q; the linewidth is κ = ω_c/Q.
    pub quality_q: f64,
    /// Qubit-phonon coupling g (rad/s).
    pub coupling_g: f64,
}

impl CavityParams {
    pub fn new(omega_c: f64, quality_q: f64, coupling_g: f64) -> Result<Self> {
        for (name, v) in [
            ("omega_c", omega_c),
            ("quality_q", quality_q),
            ("coupling_g", coupling_g),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoreError::invalid(
                    "CavityParams",
                    format!("{name} must be strictly positive, got {v}"),
                ));
            }
        }
        Ok(Self {
            omega_c,
            quality_q,
            coupling_g,
        })
    }

    /// Cavity linewidth κ = ω_c/Q (rad/s).
    pub fn kappa(&self) -> f64 {
        self.omega_c / self.quality_q
    }
}

/// Purcell-like cavity-induced relaxation rate
/// Γ = g²κ/(Δ² + (κ/2)²), Δ = ω_q − ω_c.
pub fn purcell_rate(cav: &CavityParams, omega_q: f64) -> f64 {
    let kappa = cav.kappa();
    let delta = omega_q - cav.omega_c;
    cav.coupling_g * cav.coupling_g * kappa / (delta * delta + (kappa / 2.0).powi(2))
}

/// Per-channel rates entering the total budget, with the phonon channel
/// already suppressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelRates {
    pub phonon: f64,
    pub surf: f64,
    pub def: f64,
    pub mw: f64,
    pub cav: f64,
    pub other: f64,
}

impl ChannelRates {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("phonon", self.phonon),
            ("surf", self.surf),
            ("def", self.def),
            ("mw", self.mw),
            ("cav", self.cav),
            ("other", self.other),
        ]
    }

    pub fn total(&self) -> f64 {
        self.named().iter().map(|(_, v)| v).sum()
    }

    /// Largest channel; ties resolve to the earlier entry in the fixed
    /// order phonon, surf, def, mw, cav, other.
    pub fn dominant(&self) -> &'static str {
        let mut best = ("phonon", self.phonon);
        for (name, v) in self.named().into_iter().skip(1) {
            if v > best.1 {
                best = (name, v);
            }
        }
        best.0
    }
}

/// Assembles the channel rates for a suppressed phonon reference plus
/// parasitics.
pub fn channel_rates(
    t1_ref_phonon_s: f64,
    s_pnc: f64,
    channels: &ParasiticChannels,
) -> Result<ChannelRates> {
    if !(t1_ref_phonon_s > 0.0 && t1_ref_phonon_s.is_finite()) {
        return Err(CoreError::invalid(
            "total_t1",
            format!("t1_ref must be strictly positive, got {t1_ref_phonon_s}"),
        ));
    }
    if s_pnc < 0.0 || !s_pnc.is_finite() {
        return Err(CoreError::invalid(
            "total_t1",
            format!("s_pnc must be >= 0 and finite, got {s_pnc}"),
        ));
    }
    channels.validate()?;
    Ok(ChannelRates {
        phonon: s_pnc / t1_ref_phonon_s,
        surf: channels.gamma_surf,
        def: channels.gamma_def,
        mw: channels.gamma_mw,
        cav: channels.gamma_cav,
        other: channels.gamma_other,
    })
}

/// Total relaxation time [S/T1_ref + ΣΓ]⁻¹; +∞ sentinel when every
/// channel is zero.
pub fn total_t1(t1_ref_phonon_s: f64, s_pnc: f64, channels: &ParasiticChannels) -> Result<f64> {
    let rates = channel_rates(t1_ref_phonon_s, s_pnc, channels)?;
    let total = rates.total();
    if total == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / total)
}

/// Effective suppression extracted from paired control/patterned
/// measurements: (1/T1_pnc − Γ_other)·T1_control. With Γ_other = 0 this
/// reduces to T1_control/T1_pnc. A negative result means the quoted
/// parasitic rate exceeds the total measured rate and is rejected.
pub fn effective_suppression(t1_control_s: f64, t1_pnc_s: f64, gamma_other: f64) -> Result<f64> {
    if !(t1_control_s > 0.0) {
        return Err(CoreError::invalid(
            "effective_suppression",
            format!("t1_control must be positive, got {t1_control_s}"),
        ));
    }
    if !(t1_pnc_s > 0.0) {
        return Err(CoreError::invalid(
            "effective_suppression",
            format!("t1_pnc must be positive, got {t1_pnc_s}"),
        ));
    }
    if !(gamma_other >= 0.0 && gamma_other.is_finite()) {
        return Err(CoreError::invalid(
            "effective_suppression",
            format!("gamma_other must be >= 0, got {gamma_other}"),
        ));
    }
    let rate_pnc = if t1_pnc_s.is_infinite() {
        0.0
    } else {
        1.0 / t1_pnc_s
    };
    let s_eff = (rate_pnc - gamma_other) * t1_control_s;
    if s_eff < 0.0 {
        return Err(CoreError::InconsistentParasitics(s_eff));
    }
    Ok(s_eff)
}

/// Transverse coherence from relaxation and pure dephasing:
/// T2 = [1/(2T1) + 1/Tφ]⁻¹. An infinite Tφ gives exactly 2·T1.
pub fn t2_from(t1_s: f64, t_phi_s: f64) -> Result<f64> {
    if !(t1_s > 0.0) {
        return Err(CoreError::invalid(
            "t2_from",
            format!("t1 must be positive, got {t1_s}"),
        ));
    }
    if !(t_phi_s > 0.0) {
        return Err(CoreError::invalid(
            "t2_from",
            format!("t_phi must be positive, got {t_phi_s}"),
        ));
    }
    if t_phi_s.is_infinite() {
        if t1_s.is_infinite() {
            return Ok(f64::INFINITY);
        }
        return Ok(2.0 * t1_s);
    }
    if t1_s.is_infinite() {
        return Ok(t_phi_s);
    }
    Ok(1.0 / (1.0 / (2.0 * t1_s) + 1.0 / t_phi_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let denom = expected.abs().max(f64::MIN_POSITIVE);
        assert!(
            (actual - expected).abs() / denom <= tol,
            "expected {expected:e}, got {actual:e} (rel err {:e})",
            (actual - expected).abs() / denom
        );
    }

    fn donor_point(b0: f64, temp: f64) -> QubitOperatingPoint {
        QubitOperatingPoint::new(2.0, b0, temp, Modality::Donor).unwrap()
    }

    #[test]
    fn qubit_frequency_matches_codata_evaluation() {
        let consts = PhysicalConstants::default();
        let op = donor_point(1.0, 0.35);
        let omega = qubit_frequency(&op, &consts);
        // 2·μ_B/ħ with CODATA constants, frozen from a 30-digit evaluation.
        assert_rel(omega, 1.758820009e11, 1e-6);
        assert_rel(omega / TWO_PI / 1e9, 27.99249, 1e-5);
        // Linear in B₀.
        let op2 = donor_point(2.0, 0.35);
        assert_rel(qubit_frequency(&op2, &consts), 2.0 * omega, 1e-15);
        let op44 = donor_point(0.44, 0.35);
        assert_rel(
            qubit_frequency(&op44, &consts) / TWO_PI / 1e9,
            12.3167,
            1e-4,
        );
    }

    #[test]
    fn reference_t1_anchor_and_scaling() {
        let cal = CalibrationPoint::donor_ge_p();
        let at_anchor = reference_t1(&donor_point(0.44, 0.35), &cal);
        assert_eq!(at_anchor, 0.6e-3);
        // Halving the field multiplies T1 by 16.
        let halved = reference_t1(&donor_point(0.22, 0.35), &cal);
        assert_rel(halved, 16.0 * 0.6e-3, 1e-12);
        // Worked point: 0.22 T and 0.70 K.
        let other = reference_t1(&donor_point(0.22, 0.70), &cal);
        assert_rel(other, 4.8e-3, 1e-12);
    }

    #[test]
    fn scaling_homogeneity_invariant() {
        let cal = CalibrationPoint::donor_ge_p();
        let anchor = reference_t1(&donor_point(0.44, 0.35), &cal) * 0.44f64.powi(4) * 0.35;
        for i in 0..10 {
            for j in 0..10 {
                let b = 0.05 + 0.1 * f64::from(i);
                let t = 0.05 + 0.15 * f64::from(j);
                let val = reference_t1(&donor_point(b, t), &cal) * b.powi(4) * t;
                assert_rel(val, anchor, 1e-12);
            }
        }
    }

    #[test]
    fn line_shapes_are_unit_area() {
        // Trapezoid quadrature over ±2000 half-widths; the Lorentzian
        // tail beyond the window carries ~2/(π·2000) ≈ 3.2e-4 of mass.
        let kappa = 2.0;
        let half = 2000.0;
        let n = 400_000;
        let dw = 2.0 * half / n as f64;
        let mut area = 0.0;
        let mut g_area = 0.0;
        for i in 0..=n {
            let w = -half + i as f64 * dw;
            let scale = if i == 0 || i == n { 0.5 } else { 1.0 };
            area += scale * LineShape::Lorentzian.density(w, kappa) * dw;
            g_area += scale * LineShape::Gaussian.density(w, kappa) * dw;
        }
        assert!((area - 1.0).abs() < 5e-4, "lorentzian area = {area}");
        assert!((g_area - 1.0).abs() < 1e-9, "gaussian area = {g_area}");
        // FWHM convention: both shapes fall to half their peak at ±κ/2.
        for shape in [LineShape::Lorentzian, LineShape::Gaussian] {
            let ratio = shape.density(kappa / 2.0, kappa) / shape.density(0.0, kappa);
            assert!(
                (ratio - 0.5).abs() < 1e-12,
                "{shape:?} half-max ratio {ratio}"
            );
        }
    }

    #[test]
    fn suppression_single_detuned_mode() {
        // Mode at 3 GHz with 300 kHz linewidth, probed at 2 GHz against
        // a flat reference of 1e-9 per Hz. Frozen from a 30-digit
        // evaluation of the same closed form.
        let spectrum = ModeSpectrum::from_ordinary_hz(
            &[(3e9, 3e5, 1.0)],
            ReferenceDensityHz::Flat {
                density_per_hz: 1e-9,
            },
            LineShape::Lorentzian,
        )
        .unwrap();
        let s = pnc_suppression_factor(&spectrum, TWO_PI * 2e9).unwrap();
        assert_rel(s, 4.774648185e-5, 1e-9);
    }

    #[test]
    fn suppression_empty_spectrum_is_zero() {
        let spectrum = ModeSpectrum::new(
            vec![],
            ReferenceDensity::Flat { density: 1e-9 },
            LineShape::Lorentzian,
        )
        .unwrap();
        assert_eq!(pnc_suppression_factor(&spectrum, 1e10).unwrap(), 0.0);
    }

    #[test]
    fn suppression_control_matched_is_unity() {
        // Single mode centered on the probe; pick the reference equal to
        // the numerator value so the ratio is exactly 1.
        let omega_q = TWO_PI * 3e9;
        let kappa = TWO_PI * 1e6;
        let numerator = LineShape::Lorentzian.density(0.0, kappa);
        let spectrum = ModeSpectrum::new(
            vec![Mode {
                omega: omega_q,
                linewidth_kappa: kappa,
                coupling_weight: 1.0,
            }],
            ReferenceDensity::Flat { density: numerator },
            LineShape::Lorentzian,
        )
        .unwrap();
        assert_rel(
            pnc_suppression_factor(&spectrum, omega_q).unwrap(),
            1.0,
            1e-12,
        );
    }

    #[test]
    fn suppression_discrete_continuum_limit() {
        // A comb of modes whose weights integrate to the reference
        // density approaches S = 1 at the band center, with the residual
        // set by the truncated Lorentzian tails (~κ/(2π·half_band)).
        let rho = 2.5e-10;
        let center = TWO_PI * 3e9;
        let spacing = TWO_PI * 2e5;
        let kappa = 4.0 * spacing;
        let comb = |n_modes: usize| {
            let modes: Vec<Mode> = (0..n_modes)
                .map(|i| Mode {
                    omega: center + spacing * (i as f64 - (n_modes as f64 - 1.0) / 2.0),
                    linewidth_kappa: kappa,
                    coupling_weight: rho * spacing,
                })
                .collect();
            ModeSpectrum::new(
                modes,
                ReferenceDensity::Flat { density: rho },
                LineShape::Lorentzian,
            )
            .unwrap()
        };
        let narrow = comb(4001);
        let wide = comb(16001);
        let s_narrow = pnc_suppression_factor(&narrow, center).unwrap();
        let s_wide = pnc_suppression_factor(&wide, center).unwrap();
        assert_rel(s_narrow, 1.0, 1e-3);
        assert!(
            (s_wide - 1.0).abs() < (s_narrow - 1.0).abs(),
            "wider band must be closer to the continuum: {s_wide} vs {s_narrow}"
        );
        // Quadrature consistency: integrating the same Lorentzian sum
        // over one comb period at the band center recovers one mode's
        // weight (mass conservation in the interior).
        let n_quad = 2_000;
        let dw = spacing / n_quad as f64;
        let mut integral = 0.0;
        for i in 0..=n_quad {
            let w = center - spacing / 2.0 + i as f64 * dw;
            let f = narrow.weighted_density_at(w);
            integral += if i == 0 || i == n_quad { 0.5 * f } else { f } * dw;
        }
        assert_rel(integral, rho * spacing, 1e-3);
    }

    #[test]
    fn reference_table_interpolates_and_refuses_extrapolation() {
        let table = ReferenceDensity::Table {
            points: vec![(1.0, 2.0), (3.0, 4.0), (5.0, 8.0)],
        };
        table.validate().unwrap();
        assert_rel(table.value_at(1.0).unwrap(), 2.0, 1e-15);
        assert_rel(table.value_at(2.0).unwrap(), 3.0, 1e-15);
        assert_rel(table.value_at(4.0).unwrap(), 6.0, 1e-15);
        assert_rel(table.value_at(5.0).unwrap(), 8.0, 1e-15);
        assert!(table.value_at(0.5).is_err());
        assert!(table.value_at(5.5).is_err());
        let unsorted = ReferenceDensity::Table {
            points: vec![(3.0, 4.0), (1.0, 2.0)],
        };
        assert!(unsorted.validate().is_err());
        let nonpositive = ReferenceDensity::Table {
            points: vec![(1.0, 0.0)],
        };
        assert!(nonpositive.validate().is_err());
    }

    #[test]
    fn pnc_t1_division_and_sentinel() {
        assert_rel(pnc_t1(0.6e-3, 1e-2).unwrap(), 0.06, 1e-12);
        assert_rel(pnc_t1(0.6e-3, 1.0).unwrap(), 0.6e-3, 0.0);
        assert_rel(pnc_t1(0.6e-3, 1e-3).unwrap(), 0.6, 1e-12);
        assert!(pnc_t1(0.6e-3, 0.0).unwrap().is_infinite());
        assert!(pnc_t1(0.6e-3, -1e-3).is_err());
        assert!(pnc_t1(0.0, 1e-3).is_err());
    }

    #[test]
    fn purcell_worked_example() {
        let cav = CavityParams::new(TWO_PI * 3e9, 1e4, TWO_PI * 6.3e6).unwrap();
        assert_rel(cav.kappa(), TWO_PI * 3e5, 1e-12);
        let omega_q = cav.omega_c + TWO_PI * 1e8;
        // Frozen from a 30-digit evaluation: 2π·1190.697 rad/s.
        assert_rel(purcell_rate(&cav, omega_q), 7481.371912, 1e-8);
        // On resonance the rate is exactly 4g²/κ.
        let on_res = purcell_rate(&cav, cav.omega_c);
        assert_rel(on_res, 4.0 * cav.coupling_g.powi(2) / cav.kappa(), 1e-12);
    }

    #[test]
    fn purcell_zero_coupling() {
        // Zero coupling is outside CavityParams' invariants, but the
        // rate formula itself degrades gracefully toward it.
        let cav = CavityParams::new(TWO_PI * 3e9, 1e4, 1e-300).unwrap();
        assert!(purcell_rate(&cav, cav.omega_c) < 1e-280);
    }

    #[test]
    fn total_t1_reduces_and_saturates() {
        let channels = ParasiticChannels::default();
        // No parasitics: equals pnc_t1.
        let t = total_t1(0.6e-3, 1e-2, &channels).unwrap();
        assert_rel(t, pnc_t1(0.6e-3, 1e-2).unwrap(), 1e-15);
        // Fully gated phonon with Γ_other = 10 s⁻¹ hits the parasitic
        // ceiling 0.1 s.
        let parasitic = ParasiticChannels {
            gamma_other: 10.0,
            ..Default::default()
        };
        assert_rel(total_t1(0.6e-3, 0.0, &parasitic).unwrap(), 0.1, 1e-12);
        // Worked mixed case.
        let one = ParasiticChannels {
            gamma_other: 1.0,
            ..Default::default()
        };
        assert_rel(total_t1(0.6e-3, 1e-2, &one).unwrap(), 0.056603774, 1e-8);
        // All-zero total rate.
        assert!(total_t1(0.6e-3, 0.0, &channels).unwrap().is_infinite());
        assert!(total_t1(0.6e-3, -0.1, &channels).is_err());
    }

    #[test]
    fn effective_suppression_cases() {
        assert_rel(
            effective_suppression(0.6e-3, 60e-3, 0.0).unwrap(),
            1e-2,
            1e-12,
        );
        assert_rel(
            effective_suppression(0.6e-3, 0.6e-3, 0.0).unwrap(),
            1.0,
            1e-12,
        );
        let fully_parasitic = effective_suppression(0.6e-3, 1.0, 1.0).unwrap();
        assert_eq!(fully_parasitic, 0.0);
        assert!(matches!(
            effective_suppression(0.6e-3, 1.0, 2.0),
            Err(CoreError::InconsistentParasitics(_))
        ));
    }

    #[test]
    fn t2_relations() {
        assert_eq!(t2_from(0.6e-3, f64::INFINITY).unwrap(), 1.2e-3);
        assert_rel(t2_from(1.0, 1e-3).unwrap(), 0.99950025e-3, 1e-7);
        assert!(t2_from(f64::INFINITY, f64::INFINITY).unwrap().is_infinite());
        assert_rel(t2_from(f64::INFINITY, 1e-3).unwrap(), 1e-3, 0.0);
        assert!(t2_from(-1.0, 1.0).is_err());
        assert!(t2_from(1.0, 0.0).is_err());
    }

    #[test]
    fn dominant_channel_tie_breaking() {
        let rates = ChannelRates {
            phonon: 1.0,
            surf: 1.0,
            def: 1.0,
            mw: 0.5,
            cav: 0.0,
            other: 1.0,
        };
        assert_eq!(rates.dominant(), "phonon");
        let surf_wins = ChannelRates {
            phonon: 0.1,
            surf: 2.0,
            def: 2.0,
            mw: 0.0,
            cav: 0.0,
            other: 0.0,
        };
        assert_eq!(surf_wins.dominant(), "surf");
    }

    proptest! {
        #[test]
        fn purcell_even_in_detuning(delta in 1e3f64..1e10) {
            let cav = CavityParams::new(TWO_PI * 3e9, 1e4, TWO_PI * 6.3e6).unwrap();
            let plus = purcell_rate(&cav, cav.omega_c + delta);
            let minus = purcell_rate(&cav, cav.omega_c - delta);
            prop_assert!((plus - minus).abs() / plus <= 1e-12);
            // On-resonance is the maximum.
            prop_assert!(plus <= purcell_rate(&cav, cav.omega_c));
        }

        #[test]
        fn suppression_round_trip(s in 1e-6f64..1.0, t1c in 1e-6f64..1.0) {
            let t1p = pnc_t1(t1c, s).unwrap();
            let back = effective_suppression(t1c, t1p, 0.0).unwrap();
            prop_assert!((back - s).abs() / s <= 1e-12);
        }

        #[test]
        fn total_t1_monotone_in_rates(
            s in 0.0f64..1.0,
            g1 in 0.0f64..100.0,
            bump in 1e-6f64..100.0,
        ) {
            let base = ParasiticChannels { gamma_other: g1, ..Default::default() };
            let more = ParasiticChannels { gamma_other: g1 + bump, ..Default::default() };
            let t_base = total_t1(0.6e-3, s, &base).unwrap();
            let t_more = total_t1(0.6e-3, s, &more).unwrap();
            prop_assert!(t_more < t_base || (t_base.is_infinite() && t_more.is_finite()));
        }

        #[test]
        fn rate_additivity_permutation_invariant(
            a in 0.0f64..10.0,
            b in 0.0f64..10.0,
            c in 0.0f64..10.0,
        ) {
            let ch1 = ParasiticChannels { gamma_surf: a, gamma_def: b, gamma_mw: c, ..Default::default() };
            let ch2 = ParasiticChannels { gamma_surf: c, gamma_def: a, gamma_mw: b, ..Default::default() };
            let t1 = total_t1(0.6e-3, 0.5, &ch1).unwrap();
            let t2 = total_t1(0.6e-3, 0.5, &ch2).unwrap();
            prop_assert!((t1 - t2).abs() <= 1e-18 + 1e-12 * t1.abs());
        }

        #[test]
        fn t2_monotone(t1a in 1e-6f64..10.0, bump in 1e-6f64..10.0, tphi in 1e-6f64..10.0) {
            let base = t2_from(t1a, tphi).unwrap();
            prop_assert!(t2_from(t1a + bump, tphi).unwrap() > base);
            prop_assert!(t2_from(t1a, tphi + bump).unwrap() > base);
        }
    }
}
