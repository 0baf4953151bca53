//! Residual-impurity strain backgrounds in the covalent-radius-mismatch
//! picture.
//!
//! A substitutional impurity of covalent radius r_i in a host of radius
//! r_host perturbs the lattice with fractional mismatch
//! η = (r_i − r_host)/r_host. In the dilute limit the average linear
//! strain from species i at atomic fraction c_i is ε̄_i ≈ η_i·c_i, totals
//! add linearly, and the RMS fluctuation over a sampling volume V is
//! sqrt(Σ η_i²·n_i/(N₀²·V)).
//!
//! Signs are kept internally (compressive vs tensile is physical);
//! table/curve outputs report magnitudes.

use serde::{Deserialize, Serialize};

use crate::materials::GeLatticeConstants;
use crate::{CoreError, Result};

/// Ge covalent radius (pm) used to derive mismatch parameters.
pub const GE_COVALENT_RADIUS_PM: f64 = 120.0;

/// Default species table: the common shallow donors and acceptors in Ge.
pub const DEFAULT_SPECIES_CSV: &str = include_str!("../data/species.csv");

/// Whether a substitutional impurity donates or accepts a carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DopantType {
    Donor,
    Acceptor,
}

impl std::fmt::Display for DopantType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DopantType::Donor => write!(f, "donor"),
            DopantType::Acceptor => write!(f, "acceptor"),
        }
    }
}

/// A substitutional impurity with its size mismatch relative to the host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpuritySpecies {
    /// Short chemical symbol, e.g. "B".
    pub symbol: String,
    pub dopant_type: DopantType,
    /// Covalent radius (pm).
    pub covalent_radius_pm: f64,
    /// Fractional covalent-radius mismatch η = (r_i − r_host)/r_host.
    pub mismatch_eta: f64,
}

impl ImpuritySpecies {
    /// Builds a species against the Ge host radius.
    pub fn new(symbol: &str, dopant_type: DopantType, covalent_radius_pm: f64) -> Result<Self> {
        Self::with_host_radius(
            symbol,
            dopant_type,
            covalent_radius_pm,
            GE_COVALENT_RADIUS_PM,
        )
    }

    pub fn with_host_radius(
        symbol: &str,
        dopant_type: DopantType,
        covalent_radius_pm: f64,
        host_radius_pm: f64,
    ) -> Result<Self> {
        if !(covalent_radius_pm > 0.0 && covalent_radius_pm.is_finite()) {
            return Err(CoreError::invalid(
                "ImpuritySpecies",
                format!("covalent radius must be positive, got {covalent_radius_pm} pm"),
            ));
        }
        if !(host_radius_pm > 0.0 && host_radius_pm.is_finite()) {
            return Err(CoreError::invalid(
                "ImpuritySpecies",
                format!("host radius must be positive, got {host_radius_pm} pm"),
            ));
        }
        if symbol.is_empty() {
            return Err(CoreError::invalid("ImpuritySpecies", "empty symbol"));
        }
        Ok(Self {
            symbol: symbol.to_string(),
            dopant_type,
            covalent_radius_pm,
            mismatch_eta: (covalent_radius_pm - host_radius_pm) / host_radius_pm,
        })
    }
}

/// Parses a species table in `symbol,type,radius_pm` CSV form.
///
/// Lines starting with `#` and the header row are skipped.
pub fn parse_species_csv(text: &str) -> Result<Vec<ImpuritySpecies>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields == ["symbol", "type", "radius_pm"] {
            continue;
        }
        if fields.len() != 3 {
            return Err(CoreError::invalid(
                "species table",
                format!(
                    "line {}: expected `symbol,type,radius_pm`, got `{line}`",
                    lineno + 1
                ),
            ));
        }
        let dopant_type = match fields[1] {
            "donor" => DopantType::Donor,
            "acceptor" => DopantType::Acceptor,
            other => {
                return Err(CoreError::invalid(
                    "species table",
                    format!("line {}: unknown dopant type `{other}`", lineno + 1),
                ))
            }
        };
        let radius: f64 = fields[2].parse().map_err(|_| {
            CoreError::invalid(
                "species table",
                format!("line {}: bad radius `{}`", lineno + 1, fields[2]),
            )
        })?;
        out.push(ImpuritySpecies::new(fields[0], dopant_type, radius)?);
    }
    Ok(out)
}

/// In-memory species database with lookup by symbol.
#[derive(Debug, Clone)]
pub struct SpeciesDb {
    species: Vec<ImpuritySpecies>,
}

impl SpeciesDb {
    /// The six preloaded Ge dopants.
    pub fn builtin() -> Self {
        Self {
            species: parse_species_csv(DEFAULT_SPECIES_CSV).expect("builtin table parses"),
        }
    }

    pub fn from_species(species: Vec<ImpuritySpecies>) -> Self {
        Self { species }
    }

    /// Merges extra entries on top of this table; same symbol overrides.
    pub fn extend_with(&mut self, extra: Vec<ImpuritySpecies>) {
        for sp in extra {
            if let Some(existing) = self.species.iter_mut().find(|s| s.symbol == sp.symbol) {
                *existing = sp;
            } else {
                self.species.push(sp);
            }
        }
    }

    pub fn get(&self, symbol: &str) -> Result<&ImpuritySpecies> {
        self.species
            .iter()
            .find(|s| s.symbol == symbol)
            .ok_or_else(|| CoreError::UnknownSpecies(symbol.to_string()))
    }

    pub fn all(&self) -> &[ImpuritySpecies] {
        &self.species
    }
}

/// Residual purity level, in either of the two conventions used for Ge:
/// a nominal atomic fraction (the 5N/9N convention) or a direct number
/// density (the detector-grade "13N" convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum PurityGrade {
    /// Impurity atoms per host atom, 0 < c < 1.
    AtomicFraction(f64),
    /// Impurity number density (m⁻³), 0 < n < N₀.
    NumberDensity(f64),
}

impl PurityGrade {
    /// 5N: nominal atomic fraction 1e-5.
    pub fn five_n() -> Self {
        PurityGrade::AtomicFraction(1e-5)
    }

    /// 9N: nominal atomic fraction 1e-9.
    pub fn nine_n() -> Self {
        PurityGrade::AtomicFraction(1e-9)
    }

    /// Detector-grade "13N": net electrically active density 1e10 cm⁻³,
    /// i.e. 1e16 m⁻³ — a direct density, never an atomic fraction.
    pub fn thirteen_n() -> Self {
        PurityGrade::NumberDensity(1e16)
    }

    /// Conventional display label; custom values print their numbers.
    pub fn label(&self) -> String {
        match self {
            PurityGrade::AtomicFraction(c) if *c == 1e-5 => "5N".to_string(),
            PurityGrade::AtomicFraction(c) if *c == 1e-9 => "9N".to_string(),
            PurityGrade::NumberDensity(n) if *n == 1e16 => "13N".to_string(),
            PurityGrade::AtomicFraction(c) => format!("c={c:e}"),
            PurityGrade::NumberDensity(n) => format!("n={:e}cm-3", n / 1e6),
        }
    }
}

/// Impurity number density (m⁻³) for a purity grade.
///
/// Atomic fractions are scaled by the host atomic density; direct
/// densities pass through. Rejects fractions outside (0, 1) and
/// densities outside (0, N₀).
pub fn number_density(grade: PurityGrade, lattice: &GeLatticeConstants) -> Result<f64> {
    match grade {
        PurityGrade::AtomicFraction(c) => {
            if !(c > 0.0 && c < 1.0) {
                return Err(CoreError::GradeOutOfRange(format!(
                    "atomic fraction must be in (0, 1), got {c}"
                )));
            }
            Ok(c * lattice.atomic_density_n0)
        }
        PurityGrade::NumberDensity(n) => {
            if !(n > 0.0 && n < lattice.atomic_density_n0) {
                return Err(CoreError::GradeOutOfRange(format!(
                    "number density must be in (0, N0 = {:e}), got {n:e}",
                    lattice.atomic_density_n0
                )));
            }
            Ok(n)
        }
    }
}

/// Signed average linear strain ε̄ = η·n/N₀ from one species at one grade.
pub fn avg_linear_strain(
    species: &ImpuritySpecies,
    grade: PurityGrade,
    lattice: &GeLatticeConstants,
) -> Result<f64> {
    let n = number_density(grade, lattice)?;
    Ok(species.mismatch_eta * n / lattice.atomic_density_n0)
}

/// Signed and magnitude totals over several species loads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalStrain {
    /// Σ η_i·n_i/N₀ — the literal signed sum; opposite mismatches cancel.
    pub signed: f64,
    /// Σ |η_i|·n_i/N₀ — worst-case magnitude bound.
    pub magnitude: f64,
}

/// Total average hydrostatic strain over independent species loads.
pub fn total_avg_strain(
    loads: &[(ImpuritySpecies, PurityGrade)],
    lattice: &GeLatticeConstants,
) -> Result<TotalStrain> {
    if loads.is_empty() {
        return Err(CoreError::EmptyInput("species loads"));
    }
    let mut signed = 0.0;
    let mut magnitude = 0.0;
    for (species, grade) in loads {
        let e = avg_linear_strain(species, *grade, lattice)?;
        signed += e;
        magnitude += e.abs();
    }
    Ok(TotalStrain { signed, magnitude })
}

/// RMS strain fluctuation over a sampling volume V (m³):
/// sqrt(Σ η_i²·n_i/(N₀²·V)).
pub fn rms_strain(
    loads: &[(ImpuritySpecies, PurityGrade)],
    volume_m3: f64,
    lattice: &GeLatticeConstants,
) -> Result<f64> {
    if loads.is_empty() {
        return Err(CoreError::EmptyInput("species loads"));
    }
    if !(volume_m3 > 0.0) {
        return Err(CoreError::invalid(
            "sampling volume",
            format!("must be strictly positive, got {volume_m3}"),
        ));
    }
    let n0 = lattice.atomic_density_n0;
    let mut var = 0.0;
    for (species, grade) in loads {
        let n = number_density(*grade, lattice)?;
        var += species.mismatch_eta.powi(2) * n / (n0 * n0 * volume_m3);
    }
    Ok(var.sqrt())
}

/// Per-species and total strain, with the RMS fluctuation when a
/// sampling volume was supplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrainReport {
    /// (symbol, signed average linear strain) per load.
    pub per_species: Vec<(String, f64)>,
    /// Signed total (sum of the entries above).
    pub total_signed: f64,
    /// Magnitude total Σ|ε̄_i| (worst-case bound).
    pub total_magnitude: f64,
    /// RMS fluctuation and its sampling volume, present iff requested.
    pub rms: Option<RmsEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RmsEntry {
    pub rms_strain: f64,
    pub sampling_volume_m3: f64,
}

/// Assembles the full report for a set of loads.
pub fn strain_report(
    loads: &[(ImpuritySpecies, PurityGrade)],
    volume_m3: Option<f64>,
    lattice: &GeLatticeConstants,
) -> Result<StrainReport> {
    let totals = total_avg_strain(loads, lattice)?;
    let mut per_species = Vec::with_capacity(loads.len());
    for (species, grade) in loads {
        per_species.push((
            species.symbol.clone(),
            avg_linear_strain(species, *grade, lattice)?,
        ));
    }
    let rms = match volume_m3 {
        Some(v) => Some(RmsEntry {
            rms_strain: rms_strain(loads, v, lattice)?,
            sampling_volume_m3: v,
        }),
        None => None,
    };
    Ok(StrainReport {
        per_species,
        total_signed: totals.signed,
        total_magnitude: totals.magnitude,
        rms,
    })
}

/// Species × grade table of |ε̄| values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrainTable {
    pub species: Vec<String>,
    pub grades: Vec<String>,
    /// `entries[i][j]` = |ε̄| of species i at grade j, full precision.
    pub entries: Vec<Vec<f64>>,
}

/// Full cross-product of |ε̄| over species and grades.
pub fn strain_table(
    species: &[ImpuritySpecies],
    grades: &[PurityGrade],
    lattice: &GeLatticeConstants,
) -> Result<StrainTable> {
    if species.is_empty() {
        return Err(CoreError::EmptyInput("species list"));
    }
    if grades.is_empty() {
        return Err(CoreError::EmptyInput("grades list"));
    }
    let mut entries = Vec::with_capacity(species.len());
    for sp in species {
        let mut row = Vec::with_capacity(grades.len());
        for grade in grades {
            row.push(avg_linear_strain(sp, *grade, lattice)?.abs());
        }
        entries.push(row);
    }
    Ok(StrainTable {
        species: species.iter().map(|s| s.symbol.clone()).collect(),
        grades: grades.iter().map(PurityGrade::label).collect(),
        entries,
    })
}

/// Strain-vs-density curves on a log-spaced density grid, with the
/// conventional grade densities annotated for marker lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrainCurves {
    /// Shared log-spaced density grid (m⁻³).
    pub densities: Vec<f64>,
    /// Per species: (symbol, |ε̄| at each grid density).
    pub curves: Vec<(String, Vec<f64>)>,
    /// (label, density m⁻³) markers for 13N / 9N / 5N.
    pub grade_markers: Vec<(String, f64)>,
}

/// Evaluates |ε̄(n)| = |η|·n/N₀ for each species over a log-spaced
/// density range.
pub fn strain_curve(
    species: &[ImpuritySpecies],
    density_range_m3: (f64, f64),
    points_per_decade: u32,
    lattice: &GeLatticeConstants,
) -> Result<StrainCurves> {
    if species.is_empty() {
        return Err(CoreError::EmptyInput("species list"));
    }
    let (min, max) = density_range_m3;
    let n0 = lattice.atomic_density_n0;
    if !(min > 0.0 && min < max && max < n0) {
        return Err(CoreError::invalid(
            "density range",
            format!("need 0 < min < max < N0 = {n0:e}, got ({min:e}, {max:e})"),
        ));
    }
    if points_per_decade < 1 {
        return Err(CoreError::invalid(
            "points_per_decade",
            "must be >= 1".to_string(),
        ));
    }
    let decades = (max / min).log10();
    let steps = (decades * f64::from(points_per_decade)).ceil() as usize;
    let steps = steps.max(1);
    let log_min = min.log10();
    let log_max = max.log10();
    let densities: Vec<f64> = (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            10f64.powf(log_min + t * (log_max - log_min))
        })
        .collect();
    let curves = species
        .iter()
        .map(|sp| {
            let eta = sp.mismatch_eta.abs();
            (
                sp.symbol.clone(),
                densities.iter().map(|n| eta * n / n0).collect(),
            )
        })
        .collect();
    let grade_markers = vec![
        ("13N".to_string(), 1e16),
        ("9N".to_string(), 1e-9 * n0),
        ("5N".to_string(), 1e-5 * n0),
    ];
    Ok(StrainCurves {
        densities,
        curves,
        grade_markers,
    })
}
