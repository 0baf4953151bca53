//! Strict JSON run configuration.
//!
//! Every section is optional and defaults to the built-in Ge values;
//! unknown keys anywhere are rejected outright, since a silently
//! ignored typo in a physics parameter is the worst failure mode this
//! tool can have. Field names carry their units.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use serde::{Deserialize, Serialize};

use gespin_core::budget::{
    CalibrationPoint, CavityParams, LineShape, Modality, ModeSpectrum, ParasiticChannels,
    QubitOperatingPoint, ReferenceDensityHz,
};
use gespin_core::materials::{BandEdgeMasses, GeLatticeConstants, PhysicalConstants};
use gespin_core::strain::{parse_species_csv, PurityGrade, SpeciesDb};

use crate::units;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub constants: Option<ConstantsSection>,
    pub lattice: Option<LatticeSection>,
    pub band_masses: Option<BandMassesSection>,
    /// Extra species table (CSV `symbol,type,radius_pm`) merged over the
    /// built-in one; same symbol overrides.
    pub species_db: Option<PathBuf>,
    pub calibration: Option<CalibrationSection>,
    pub operating_point: Option<OperatingPointSection>,
    pub channels: Option<ChannelsSection>,
    pub cavity: Option<CavitySection>,
    /// Direct suppression factor when no mode spectrum is supplied.
    pub s_pnc: Option<f64>,
    /// Mode spectrum CSV: columns `omega_hz,kappa_hz,weight`.
    pub mode_spectrum_csv: Option<PathBuf>,
    /// Reference density CSV: columns `omega_hz,density_per_hz`.
    pub reference_density_csv: Option<PathBuf>,
    /// Flat reference density (per Hz) when no table is supplied.
    pub reference_density_flat_per_hz: Option<f64>,
    pub line_shape: Option<LineShape>,
    /// Pure-dephasing time in seconds; absent means no dephasing channel.
    pub t_phi_s: Option<f64>,
    pub mc: Option<McSection>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsSection {
    pub bohr_magneton_j_per_t: Option<f64>,
    pub reduced_planck_j_s: Option<f64>,
    pub electron_mass_kg: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub lattice_constant_a0_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandMassesSection {
    pub m_l: Option<f64>,
    pub m_t: Option<f64>,
    pub m_hh: Option<f64>,
    pub m_lh: Option<f64>,
    pub m_so: Option<f64>,
    pub m_gamma_direct: Option<f64>,
    pub valley_degeneracy_nv: Option<u32>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSection {
    pub t1_ref_s: Option<f64>,
    pub field_ref_t: Option<f64>,
    pub temp_ref_k: Option<f64>,
    pub field_exponent: Option<f64>,
    pub temp_exponent: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatingPointSection {
    pub g_eff: Option<f64>,
    pub field_b0_t: Option<f64>,
    pub temperature_k: Option<f64>,
    pub modality: Option<Modality>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelsSection {
    pub gamma_surf: Option<f64>,
    pub gamma_def: Option<f64>,
    pub gamma_mw: Option<f64>,
    pub gamma_cav: Option<f64>,
    pub gamma_other: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    pub omega_c_hz: Option<f64>,
    pub quality_q: Option<f64>,
    pub coupling_g_hz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesLoad {
    pub species: String,
    /// Grade string: `5N`, `9N`, `13N`, `c=<fraction>`, `n=<density>`.
    pub grade: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub species_loads: Option<Vec<SpeciesLoad>>,
    pub volume_m3: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Extra volumes for the convergence sweep; V and 4V rows are always
    /// produced for the base volume.
    pub volumes_m3: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    /// One of: B0, T, S_pnc, delta_cav, Q, g_coupling, impurity_density.
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub scale: String,
    pub points: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub axes: Vec<AxisSection>,
    pub species_loads: Option<Vec<SpeciesLoad>>,
}

impl RunConfig {
    /// Parses a config file with strict unknown-key rejection.
    pub fn from_path(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("cannot read config `{}`", path.display()))?;
        let cfg: RunConfig = serde_json::from_slice(&bytes)
            .with_context(|| format!("invalid config `{}`", path.display()))?;
        Ok((cfg, bytes))
    }

    pub fn physical_constants(&self) -> Result<PhysicalConstants> {
        let defaults = PhysicalConstants::default();
        let section = self.constants.clone().unwrap_or_default();
        Ok(PhysicalConstants::new(
            section
                .bohr_magneton_j_per_t
                .unwrap_or(defaults.bohr_magneton),
            section
                .reduced_planck_j_s
                .unwrap_or(defaults.reduced_planck),
            section.electron_mass_kg.unwrap_or(defaults.electron_mass),
        )?)
    }

    pub fn lattice(&self) -> Result<GeLatticeConstants> {
        let a0 = self
            .lattice
            .as_ref()
            .and_then(|l| l.lattice_constant_a0_m)
            .unwrap_or(gespin_core::materials::GE_LATTICE_A0);
        Ok(GeLatticeConstants::new(a0)?)
    }

    pub fn band_masses(&self) -> Result<BandEdgeMasses> {
        let d = BandEdgeMasses::default();
        let s = self.band_masses.clone().unwrap_or_default();
        Ok(BandEdgeMasses::new(
            s.m_l.unwrap_or(d.m_l),
            s.m_t.unwrap_or(d.m_t),
            s.m_hh.unwrap_or(d.m_hh),
            s.m_lh.unwrap_or(d.m_lh),
            s.m_so.unwrap_or(d.m_so),
            s.m_gamma_direct.unwrap_or(d.m_gamma_direct),
            s.valley_degeneracy_nv.unwrap_or(d.valley_degeneracy_nv),
        )?)
    }

    pub fn species_db(&self, config_dir: &Path) -> Result<SpeciesDb> {
        let mut db = SpeciesDb::builtin();
        if let Some(rel) = &self.species_db {
            let path = resolve(config_dir, rel);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read species db `{}`", path.display()))?;
            db.extend_with(parse_species_csv(&text)?);
        }
        Ok(db)
    }

    pub fn calibration(&self) -> Result<CalibrationPoint> {
        let anchor = CalibrationPoint::donor_ge_p();
        let s = self.calibration.clone().unwrap_or_default();
        Ok(CalibrationPoint::with_exponents(
            s.t1_ref_s.unwrap_or(anchor.t1_ref_s),
            s.field_ref_t.unwrap_or(anchor.field_ref_t),
            s.temp_ref_k.unwrap_or(anchor.temp_ref_k),
            s.field_exponent.unwrap_or(anchor.field_exponent),
            s.temp_exponent.unwrap_or(anchor.temp_exponent),
        )?)
    }

    pub fn operating_point(&self) -> Result<QubitOperatingPoint> {
        let s = self.operating_point.clone().unwrap_or_default();
        Ok(QubitOperatingPoint::new(
            s.g_eff.unwrap_or(2.0),
            s.field_b0_t.unwrap_or(0.44),
            s.temperature_k.unwrap_or(0.35),
            s.modality.unwrap_or(Modality::Donor),
        )?)
    }

    pub fn channels(&self) -> Result<ParasiticChannels> {
        let s = self.channels.clone().unwrap_or_default();
        let channels = ParasiticChannels {
            gamma_surf: s.gamma_surf.unwrap_or(0.0),
            gamma_def: s.gamma_def.unwrap_or(0.0),
            gamma_mw: s.gamma_mw.unwrap_or(0.0),
            gamma_cav: s.gamma_cav.unwrap_or(0.0),
            gamma_other: s.gamma_other.unwrap_or(0.0),
        };
        channels.validate()?;
        Ok(channels)
    }

    pub fn cavity(&self) -> Result<Option<CavityParams>> {
        match &self.cavity {
            None => Ok(None),
            Some(s) => {
                let omega_c_hz = require(s.omega_c_hz, "cavity.omega_c_hz")?;
                let quality_q = require(s.quality_q, "cavity.quality_q")?;
                let coupling_g_hz = require(s.coupling_g_hz, "cavity.coupling_g_hz")?;
                Ok(Some(CavityParams::new(
                    TWO_PI * omega_c_hz,
                    quality_q,
                    TWO_PI * coupling_g_hz,
                )?))
            }
        }
    }

    /// Mode spectrum from the configured CSVs, when present.
    pub fn mode_spectrum(&self, config_dir: &Path) -> Result<Option<ModeSpectrum>> {
        let Some(spectrum_rel) = &self.mode_spectrum_csv else {
            return Ok(None);
        };
        let spectrum_path = resolve(config_dir, spectrum_rel);
        let modes_hz = read_mode_csv(&spectrum_path)?;
        let reference = match (
            &self.reference_density_csv,
            self.reference_density_flat_per_hz,
        ) {
            (Some(_), Some(_)) => {
                bail!("set either reference_density_csv or reference_density_flat_per_hz, not both")
            }
            (Some(rel), None) => {
                let path = resolve(config_dir, rel);
                ReferenceDensityHz::Table {
                    points_hz: read_density_csv(&path)?,
                }
            }
            (None, Some(flat)) => ReferenceDensityHz::Flat {
                density_per_hz: flat,
            },
            (None, None) => bail!(
                "mode_spectrum_csv needs a reference density \
                 (reference_density_csv or reference_density_flat_per_hz)"
            ),
        };
        let shape = self.line_shape.unwrap_or_default();
        Ok(Some(ModeSpectrum::from_ordinary_hz(
            &modes_hz, reference, shape,
        )?))
    }

    pub fn resolve_loads(
        &self,
        loads: &[SpeciesLoad],
        db: &SpeciesDb,
    ) -> Result<Vec<(gespin_core::strain::ImpuritySpecies, PurityGrade)>> {
        loads
            .iter()
            .map(|l| {
                let sp = db.get(&l.species)?.clone();
                let grade = units::parse_grade(&l.grade)?;
                Ok((sp, grade))
            })
            .collect()
    }
}

fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| anyhow::anyhow!("config field `{name}` is required here"))
}

fn resolve(config_dir: &Path, rel: &Path) -> PathBuf {
    if rel.is_absolute() {
        rel.to_path_buf()
    } else {
        config_dir.join(rel)
    }
}

fn numeric_rows(path: &Path, expected_cols: usize, header: &str) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == header {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != expected_cols {
            bail!(
                "{}:{}: expected {expected_cols} columns (`{header}`), got `{line}`",
                path.display(),
                lineno + 1
            );
        }
        let row: Vec<f64> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .with_context(|| format!("{}:{}: bad number `{f}`", path.display(), lineno + 1))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads `omega_hz,kappa_hz,weight` rows.
pub fn read_mode_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    Ok(numeric_rows(path, 3, "omega_hz,kappa_hz,weight")?
        .into_iter()
        .map(|r| (r[0], r[1], r[2]))
        .collect())
}

/// Reads `omega_hz,density_per_hz` rows.
pub fn read_density_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    Ok(numeric_rows(path, 2, "omega_hz,density_per_hz")?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect())
}
