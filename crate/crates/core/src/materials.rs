//! Physical constants, Ge band-structure parameters, and the derived
//! effective masses used for density-of-states and transport estimates.
//!
//! Masses are dimensionless multiples of the free-electron mass m₀.
//! Constants default to CODATA values and the usual Ge band-edge numbers
//! but stay overridable so other diamond-lattice hosts can be modeled.

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// CODATA 2022 Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_065_7e-24;
/// Reduced Planck constant ħ = h/2π with the exact SI h (J·s).
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
/// CODATA 2022 electron mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_713_9e-31;

/// Fundamental constants entering the qubit-frequency and budget formulas.
///
/// Immutable after construction; all values strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Bohr magneton μ_B (J/T).
    pub bohr_magneton: f64,
    /// Reduced Planck constant ħ (J·s).
    pub reduced_planck: f64,
    /// Free-electron mass m₀ (kg).
    pub electron_mass: f64,
}

impl PhysicalConstants {
    pub fn new(bohr_magneton: f64, reduced_planck: f64, electron_mass: f64) -> Result<Self> {
        for (name, v) in [
            ("bohr_magneton", bohr_magneton),
            ("reduced_planck", reduced_planck),
            ("electron_mass", electron_mass),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoreError::invalid(
                    "PhysicalConstants",
                    format!("{name} must be strictly positive, got {v}"),
                ));
            }
        }
        Ok(Self {
            bohr_magneton,
            reduced_planck,
            electron_mass,
        })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            bohr_magneton: BOHR_MAGNETON,
            reduced_planck: REDUCED_PLANCK,
            electron_mass: ELECTRON_MASS,
        }
    }
}

/// Diamond-cubic lattice constant and the atomic density derived from it.
///
/// The density is always recomputed as 8/a₀³, never stored independently,
/// so the two fields cannot drift apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeLatticeConstants {
    /// Conventional cubic lattice constant a₀ (m).
    pub lattice_constant_a0: f64,
    /// Atomic density N₀ = 8/a₀³ (m⁻³). ≈ 4.4e28 m⁻³ for Ge.
    pub atomic_density_n0: f64,
}

/// Ge conventional lattice constant (m).
pub const GE_LATTICE_A0: f64 = 5.658e-10;

impl GeLatticeConstants {
    pub fn new(lattice_constant_a0: f64) -> Result<Self> {
        if !(lattice_constant_a0 > 0.0 && lattice_constant_a0.is_finite()) {
            return Err(CoreError::invalid(
                "GeLatticeConstants",
                format!("a0 must be strictly positive, got {lattice_constant_a0}"),
            ));
        }
        Ok(Self {
            lattice_constant_a0,
            atomic_density_n0: 8.0 / lattice_constant_a0.powi(3),
        })
    }
}

impl Default for GeLatticeConstants {
    fn default() -> Self {
        Self::new(GE_LATTICE_A0).expect("default a0 is positive")
    }
}

/// Band-edge effective masses (units of m₀) and valley degeneracy.
///
/// Defaults are the representative Ge values: anisotropic L-valley
/// electron masses, heavy/light/split-off hole masses, and the fourfold
/// L-valley degeneracy. The Γ-point direct-valley mass is carried along
/// for completeness but drives no derived quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEdgeMasses {
    /// Longitudinal L-valley electron mass m_l.
    pub m_l: f64,
    /// Transverse L-valley electron mass m_t.
    pub m_t: f64,
    /// Heavy-hole mass m_hh.
    pub m_hh: f64,
    /// Light-hole mass m_lh.
    pub m_lh: f64,
    /// Split-off hole mass m_so.
    pub m_so: f64,
    /// Γ-point direct-valley electron mass (documented, unused).
    pub m_gamma_direct: f64,
    /// Number of equivalent conduction-band valleys N_v.
    pub valley_degeneracy_nv: u32,
}

impl BandEdgeMasses {
    pub fn new(
        m_l: f64,
        m_t: f64,
        m_hh: f64,
        m_lh: f64,
        m_so: f64,
        m_gamma_direct: f64,
        valley_degeneracy_nv: u32,
    ) -> Result<Self> {
        let masses = Self {
            m_l,
            m_t,
            m_hh,
            m_lh,
            m_so,
            m_gamma_direct,
            valley_degeneracy_nv,
        };
        masses.validate()?;
        Ok(masses)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_l", self.m_l),
            ("m_t", self.m_t),
            ("m_hh", self.m_hh),
            ("m_so", self.m_so),
            ("m_gamma_direct", self.m_gamma_direct),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoreError::invalid(
                    "BandEdgeMasses",
                    format!("{name} must be strictly positive, got {v}"),
                ));
            }
        }
        // m_lh = 0 is the degenerate single-band limit and stays legal.
        if !(self.m_lh >= 0.0 && self.m_lh.is_finite()) {
            return Err(CoreError::invalid(
                "BandEdgeMasses",
                format!("m_lh must be non-negative, got {}", self.m_lh),
            ));
        }
        if self.m_l < self.m_t {
            return Err(CoreError::invalid(
                "BandEdgeMasses",
                format!(
                    "expected m_l >= m_t, got m_l = {}, m_t = {}",
                    self.m_l, self.m_t
                ),
            ));
        }
        if self.m_hh < self.m_lh {
            return Err(CoreError::invalid(
                "BandEdgeMasses",
                format!(
                    "expected m_hh >= m_lh, got m_hh = {}, m_lh = {}",
                    self.m_hh, self.m_lh
                ),
            ));
        }
        if self.valley_degeneracy_nv < 1 {
            return Err(CoreError::invalid(
                "BandEdgeMasses",
                "valley_degeneracy_nv must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

impl Default for BandEdgeMasses {
    fn default() -> Self {
        Self {
            m_l: 1.64,
            m_t: 0.082,
            m_hh: 0.28,
            m_lh: 0.044,
            m_so: 0.084,
            m_gamma_direct: 0.041,
            valley_degeneracy_nv: 4,
        }
    }
}

/// Electron density-of-states mass: N_v^(2/3) · (m_l · m_t²)^(1/3).
pub fn dos_mass_electron(m: &BandEdgeMasses) -> f64 {
    let nv = f64::from(m.valley_degeneracy_nv);
    nv.powf(2.0 / 3.0) * (m.m_l * m.m_t * m.m_t).cbrt()
}

/// Hole density-of-states mass from the combined HH and LH bands:
/// (m_hh^(3/2) + m_lh^(3/2))^(2/3).
pub fn dos_mass_hole(m: &BandEdgeMasses) -> f64 {
    (m.m_hh.powf(1.5) + m.m_lh.powf(1.5)).powf(2.0 / 3.0)
}

/// Electron conductivity mass, averaged over equivalent valley
/// directions: 3 / (1/m_l + 2/m_t).
pub fn conductivity_mass_electron(m: &BandEdgeMasses) -> f64 {
    3.0 / (1.0 / m.m_l + 2.0 / m.m_t)
}

/// Hole conductivity mass combining HH and LH contributions:
/// (m_hh^(3/2) + m_lh^(3/2)) / (m_hh^(1/2) + m_lh^(1/2)).
pub fn conductivity_mass_hole(m: &BandEdgeMasses) -> f64 {
    (m.m_hh.powf(1.5) + m.m_lh.powf(1.5)) / (m.m_hh.sqrt() + m.m_lh.sqrt())
}

/// All four derived masses in one pass, in the order
/// (DOS electron, DOS hole, conductivity electron, conductivity hole).
pub fn derived_masses(m: &BandEdgeMasses) -> [f64; 4] {
    [
        dos_mass_electron(m),
        dos_mass_hole(m),
        conductivity_mass_electron(m),
        conductivity_mass_hole(m),
    ]
}
