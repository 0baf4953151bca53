//! Subcommand implementations. Each returns the process exit code:
//! 0 success, 1 validation failure (mc-validate z-scores), 2 on
//! usage/config errors (mapped from `Err` by `main`).

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use sha2::{Digest, Sha256};

use gespin_core::budget::{
    channel_rates, pnc_suppression_factor, qubit_frequency, reference_t1, t2_from,
    QubitOperatingPoint,
};
use gespin_core::materials::{
    conductivity_mass_electron, conductivity_mass_hole, dos_mass_electron, dos_mass_hole,
    BandEdgeMasses, GeLatticeConstants, PhysicalConstants,
};
use gespin_core::montecarlo::{analytic_moments, derive_seed, simulate_volume_strain, McConfig};
use gespin_core::strain::{number_density, strain_curve, strain_table, PurityGrade, SpeciesDb};
use gespin_core::sweep::{
    find_crossover, run_sweep, Axis, AxisParam, AxisScale, Scenario, SuppressionSource, SweepSpec,
};

use crate::config::{RunConfig, SpeciesLoad, TWO_PI};
use crate::output::{sig3, write_atomic, Cell, Format, Meta, Table};
use crate::svg::{LogLogPlot, Series};
use crate::units;

const DEFAULT_SEED: u64 = 20260810;

pub struct Context {
    pub cfg: RunConfig,
    pub config_dir: PathBuf,
    pub out_dir: PathBuf,
    pub format: Format,
    pub seed: u64,
    pub meta: Meta,
    pub constants: PhysicalConstants,
    pub lattice: GeLatticeConstants,
    pub band_masses: BandEdgeMasses,
    pub species_db: SpeciesDb,
}

impl Context {
    pub fn load(
        config_path: Option<&Path>,
        out_dir: &Path,
        format: Format,
        seed_flag: Option<u64>,
    ) -> Result<Self> {
        let (cfg, raw, config_dir) = match config_path {
            Some(path) => {
                let (cfg, raw) = RunConfig::from_path(path)?;
                let dir = path
                    .parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| PathBuf::from("."));
                (cfg, raw, dir)
            }
            None => {
                let cfg = RunConfig::default();
                let raw = serde_json::to_vec(&cfg)?;
                (cfg, raw, PathBuf::from("."))
            }
        };
        let digest = Sha256::digest(&raw);
        let config_hash: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();

        // Validate every referenced path up front.
        for path in [
            cfg.species_db.as_ref(),
            cfg.mode_spectrum_csv.as_ref(),
            cfg.reference_density_csv.as_ref(),
        ]
        .into_iter()
        .flatten()
        {
            let resolved = if path.is_absolute() {
                path.clone()
            } else {
                config_dir.join(path)
            };
            if !resolved.is_file() {
                bail!("configured path does not exist: `{}`", resolved.display());
            }
        }

        let seed = seed_flag
            .or(cfg.mc.as_ref().and_then(|m| m.seed))
            .unwrap_or(DEFAULT_SEED);
        let constants = cfg.physical_constants()?;
        let lattice = cfg.lattice()?;
        let band_masses = cfg.band_masses()?;
        let species_db = cfg.species_db(&config_dir)?;
        let meta = Meta::new(&config_hash, seed);
        Ok(Self {
            cfg,
            config_dir,
            out_dir: out_dir.to_path_buf(),
            format,
            seed,
            meta,
            constants,
            lattice,
            band_masses,
            species_db,
        })
    }

    /// Suppression source from config: a direct `s_pnc`, a mode
    /// spectrum, or the unpatterned default S = 1.
    fn suppression(&self, flag: Option<f64>) -> Result<SuppressionSource> {
        if let Some(s) = flag {
            if s < 0.0 {
                bail!("--s-pnc must be >= 0, got {s}");
            }
            return Ok(SuppressionSource::Fixed(s));
        }
        let spectrum = self.cfg.mode_spectrum(&self.config_dir)?;
        match (self.cfg.s_pnc, spectrum) {
            (Some(_), Some(_)) => {
                bail!("config sets both s_pnc and mode_spectrum_csv; pick one")
            }
            (Some(s), None) => {
                if s < 0.0 {
                    bail!("config s_pnc must be >= 0, got {s}");
                }
                Ok(SuppressionSource::Fixed(s))
            }
            (None, Some(spectrum)) => Ok(SuppressionSource::Spectrum(spectrum)),
            (None, None) => Ok(SuppressionSource::Fixed(1.0)),
        }
    }

    fn scenario(&self, s_pnc_flag: Option<f64>, loads: &[SpeciesLoad]) -> Result<Scenario> {
        let species_loads = self
            .cfg
            .resolve_loads(loads, &self.species_db)?
            .into_iter()
            .map(|(sp, grade)| Ok((sp.clone(), number_density(grade, &self.lattice)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario {
            constants: self.constants,
            lattice: self.lattice,
            operating_point: self.cfg.operating_point()?,
            calibration: self.cfg.calibration()?,
            channels: self.cfg.channels()?,
            cavity: self.cfg.cavity()?,
            suppression: self.suppression(s_pnc_flag)?,
            t_phi_s: self.cfg.t_phi_s.unwrap_or(f64::INFINITY),
            species_loads,
            delta_cav_override: None,
        })
    }
}

pub fn cmd_masses(ctx: &Context) -> Result<i32> {
    let m = &ctx.band_masses;
    let derived = [
        ("dos_mass_electron", dos_mass_electron(m)),
        ("dos_mass_hole", dos_mass_hole(m)),
        ("conductivity_mass_electron", conductivity_mass_electron(m)),
        ("conductivity_mass_hole", conductivity_mass_hole(m)),
    ];
    let inputs = [
        ("m_l", m.m_l),
        ("m_t", m.m_t),
        ("m_hh", m.m_hh),
        ("m_lh", m.m_lh),
        ("m_so", m.m_so),
        ("m_gamma_direct", m.m_gamma_direct),
        ("valley_degeneracy_nv", f64::from(m.valley_degeneracy_nv)),
    ];
    let mut table = Table::new(&["quantity", "value_m0", "kind"]);
    for (name, value) in inputs {
        table.push(vec![
            Cell::Text(name.to_string()),
            Cell::Float(value),
            Cell::Text("input".to_string()),
        ]);
    }
    for (name, value) in derived {
        table.push(vec![
            Cell::Text(name.to_string()),
            Cell::Float(value),
            Cell::Text("derived".to_string()),
        ]);
    }
    let path = table.write(&ctx.out_dir, "masses", ctx.format, &ctx.meta)?;

    println!("band-edge inputs (units of m0):");
    for (name, value) in inputs {
        println!("  {name:<24} {}", sig3(value));
    }
    println!("derived masses (units of m0):");
    for (name, value) in derived {
        println!("  {name:<28} {}", sig3(value));
    }
    println!("wrote {}", path.display());
    Ok(0)
}

fn resolve_species(
    ctx: &Context,
    symbols: &[String],
) -> Result<Vec<gespin_core::strain::ImpuritySpecies>> {
    if symbols.is_empty() {
        return Ok(ctx.species_db.all().to_vec());
    }
    symbols
        .iter()
        .map(|s| Ok(ctx.species_db.get(s)?.clone()))
        .collect()
}

fn resolve_grades(grades: &[String]) -> Result<Vec<PurityGrade>> {
    if grades.is_empty() {
        return Ok(vec![
            PurityGrade::five_n(),
            PurityGrade::nine_n(),
            PurityGrade::thirteen_n(),
        ]);
    }
    grades.iter().map(|g| units::parse_grade(g)).collect()
}

pub fn cmd_strain_table(ctx: &Context, symbols: &[String], grades: &[String]) -> Result<i32> {
    let species = resolve_species(ctx, symbols)?;
    let grades = resolve_grades(grades)?;
    let result = strain_table(&species, &grades, &ctx.lattice)?;

    let mut columns: Vec<String> = vec!["species".to_string()];
    columns.extend(result.grades.iter().map(|g| format!("abs_strain_{g}")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&column_refs);
    for (i, symbol) in result.species.iter().enumerate() {
        let mut row = vec![Cell::Text(symbol.clone())];
        row.extend(result.entries[i].iter().map(|v| Cell::Float(*v)));
        table.push(row);
    }
    let path = table.write(&ctx.out_dir, "strain_table", ctx.format, &ctx.meta)?;

    // Console view rounds to two significant figures, like the export's
    // provenance tables; the file keeps full precision.
    print!("{:<8}", "species");
    for g in &result.grades {
        print!("{g:>12}");
    }
    println!();
    for (i, symbol) in result.species.iter().enumerate() {
        print!("{symbol:<8}");
        for v in &result.entries[i] {
            print!("{:>12}", format!("{v:.1e}"));
        }
        println!();
    }
    println!("wrote {}", path.display());
    Ok(0)
}

pub fn cmd_strain_curve(
    ctx: &Context,
    symbols: &[String],
    min: &str,
    max: &str,
    points_per_decade: u32,
) -> Result<i32> {
    let species = resolve_species(ctx, symbols)?;
    let min_m3 = units::parse_density(min)?;
    let max_m3 = units::parse_density(max)?;
    let curves = strain_curve(&species, (min_m3, max_m3), points_per_decade, &ctx.lattice)?;

    let mut columns = vec!["density_m3".to_string(), "density_cm3".to_string()];
    columns.extend(
        curves
            .curves
            .iter()
            .map(|(sym, _)| format!("abs_strain_{sym}")),
    );
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&column_refs);
    for (i, n) in curves.densities.iter().enumerate() {
        let mut row = vec![Cell::Float(*n), Cell::Float(n / 1e6)];
        row.extend(curves.curves.iter().map(|(_, ys)| Cell::Float(ys[i])));
        table.push(row);
    }
    for (label, n) in &curves.grade_markers {
        table.annotate(
            &format!("marker_{label}"),
            format!("density_m3={n:e} density_cm3={:e}", n / 1e6),
        );
    }
    let path = table.write(&ctx.out_dir, "strain_curve", ctx.format, &ctx.meta)?;

    let plot = LogLogPlot {
        title: "Average impurity-induced linear strain in Ge".to_string(),
        x_label: "impurity density (cm^-3)".to_string(),
        y_label: "|average linear strain|".to_string(),
        series: curves
            .curves
            .iter()
            .map(|(sym, ys)| Series {
                label: sym.clone(),
                points: curves
                    .densities
                    .iter()
                    .map(|n| n / 1e6)
                    .zip(ys.iter().copied())
                    .collect(),
            })
            .collect(),
        vlines: curves
            .grade_markers
            .iter()
            .map(|(label, n)| (n / 1e6, label.clone()))
            .collect(),
    };
    let svg_path = ctx.out_dir.join("strain_curve.svg");
    write_atomic(&svg_path, plot.render().as_bytes())?;

    println!(
        "{} species, {} points each over [{}, {}] cm^-3",
        curves.curves.len(),
        curves.densities.len(),
        sig3(min_m3 / 1e6),
        sig3(max_m3 / 1e6),
    );
    println!("wrote {}", path.display());
    println!("wrote {}", svg_path.display());
    Ok(0)
}

/// Command-line overrides for one budget evaluation; dimensioned values
/// carry unit suffixes.
#[derive(Default)]
pub struct BudgetOverrides {
    pub s_pnc: Option<f64>,
    pub b0: Option<String>,
    pub temp: Option<String>,
    pub t_phi: Option<String>,
    pub detuning: Option<String>,
}

pub fn cmd_t1_budget(ctx: &Context, overrides: BudgetOverrides) -> Result<i32> {
    let mut scenario = ctx.scenario(overrides.s_pnc, &[])?;
    if overrides.b0.is_some() || overrides.temp.is_some() {
        let op = scenario.operating_point;
        scenario.operating_point = QubitOperatingPoint::new(
            op.g_eff,
            match &overrides.b0 {
                Some(s) => units::parse_field(s)?,
                None => op.field_b0_t,
            },
            match &overrides.temp {
                Some(s) => units::parse_temperature(s)?,
                None => op.temperature_k,
            },
            op.modality,
        )?;
    }
    if let Some(t_phi) = &overrides.t_phi {
        scenario.t_phi_s = units::parse_time(t_phi)?;
    }
    if let Some(detuning) = &overrides.detuning {
        if scenario.cavity.is_none() {
            bail!("--detuning requires cavity parameters in the config");
        }
        scenario.delta_cav_override = Some(TWO_PI * units::parse_frequency_hz(detuning)?);
    }
    scenario.validate().map_err(|e| anyhow!(e))?;
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

    let mut table = Table::new(&["quantity", "value", "unit"]);
    let mut push = |name: &str, cell: Cell, unit: &str| {
        table.push(vec![
            Cell::Text(name.to_string()),
            cell,
            Cell::Text(unit.to_string()),
        ]);
    };
    push(
        "modality",
        Cell::Text(scenario.operating_point.modality.to_string()),
        "",
    );
    push(
        "field_b0",
        Cell::Float(scenario.operating_point.field_b0_t),
        "T",
    );
    push(
        "temperature",
        Cell::Float(scenario.operating_point.temperature_k),
        "K",
    );
    push("omega_q", Cell::Float(omega_q), "rad/s");
    push("f_q", Cell::Float(omega_q / TWO_PI), "Hz");
    push("t1_ref_phonon", Cell::Float(t1_ref), "s");
    push("s_pnc", Cell::Float(s_pnc), "");
    for (name, rate) in rates.named() {
        push(&format!("gamma_{name}"), Cell::Float(rate), "1/s");
    }
    push("total_rate", Cell::Float(total_rate), "1/s");
    push("t1_total", Cell::Float(t1_total), "s");
    push("t2", Cell::Float(t2), "s");
    push("t_phi", Cell::Float(scenario.t_phi_s), "s");
    push(
        "dominant_channel",
        Cell::Text(rates.dominant().to_string()),
        "",
    );
    let path = table.write(&ctx.out_dir, "t1_budget", ctx.format, &ctx.meta)?;

    println!(
        "operating point: {} | B0 = {} T | T = {} K | f_q = {} GHz",
        scenario.operating_point.modality,
        sig3(scenario.operating_point.field_b0_t),
        sig3(scenario.operating_point.temperature_k),
        sig3(omega_q / TWO_PI / 1e9),
    );
    println!(
        "reference phonon T1 = {} s, S_pnc = {}",
        sig3(t1_ref),
        sig3(s_pnc)
    );
    println!("channel rates (1/s):");
    for (name, rate) in rates.named() {
        println!("  {name:<8} {}", sig3(rate));
    }
    if t1_total.is_infinite() {
        println!("T1: phonon-channel fully gated (no finite relaxation channel)");
    } else {
        println!(
            "T1 = {} s, T2 = {} s (dominant channel: {})",
            sig3(t1_total),
            sig3(t2),
            rates.dominant()
        );
    }
    println!("wrote {}", path.display());
    Ok(0)
}

fn axis_from_section(section: &crate::config::AxisSection) -> Result<Axis> {
    let param = match section.param.as_str() {
        "B0" => AxisParam::B0,
        "T" => AxisParam::T,
        "S_pnc" => AxisParam::SPnc,
        "delta_cav" => AxisParam::DeltaCav,
        "Q" => AxisParam::Q,
        "g_coupling" => AxisParam::GCoupling,
        "impurity_density" => AxisParam::ImpurityDensity,
        other => bail!(
            "unknown sweep axis `{other}` (use B0, T, S_pnc, delta_cav, Q, g_coupling, impurity_density)"
        ),
    };
    let scale = match section.scale.as_str() {
        "linear" => AxisScale::Linear,
        "log" => AxisScale::Log,
        other => bail!("unknown axis scale `{other}` (use linear or log)"),
    };
    // delta_cav and g_coupling ranges are given in ordinary Hz in the
    // config; everything internal is angular.
    let unit = match param {
        AxisParam::DeltaCav | AxisParam::GCoupling => TWO_PI,
        _ => 1.0,
    };
    Ok(Axis {
        param,
        min: unit * section.min,
        max: unit * section.max,
        scale,
        points: section.points,
    })
}

pub fn cmd_sweep(ctx: &Context, crossover: bool) -> Result<i32> {
    let section = ctx
        .cfg
        .sweep
        .clone()
        .ok_or_else(|| anyhow!("config has no `sweep` section"))?;
    if section.axes.is_empty() {
        bail!("sweep section declares no axes");
    }
    let axes = section
        .axes
        .iter()
        .map(axis_from_section)
        .collect::<Result<Vec<_>>>()?;
    let loads = section.species_loads.clone().unwrap_or_default();
    let base = ctx.scenario(None, &loads)?;
    let spec = SweepSpec { axes, base };
    let result = run_sweep(&spec)?;

    let mut columns: Vec<String> = result.axis_names.iter().map(|n| n.to_string()).collect();
    columns.extend(
        [
            "t1_total_s",
            "t2_s",
            "dominant_channel",
            "s_pnc_used",
            "total_strain",
            "error",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&column_refs);
    let mut failed = 0usize;
    for cell in &result.cells {
        let mut row: Vec<Cell> = cell.coords.iter().map(|c| Cell::Float(*c)).collect();
        match (&cell.output, &cell.error) {
            (Some(out), None) => {
                row.push(Cell::Float(out.t1_total_s));
                row.push(Cell::Float(out.t2_s));
                row.push(Cell::Text(out.dominant_channel.to_string()));
                row.push(Cell::Float(out.s_pnc_used));
                row.push(match out.total_strain {
                    Some(v) => Cell::Float(v),
                    None => Cell::Empty,
                });
                row.push(Cell::Empty);
            }
            (_, Some(err)) => {
                failed += 1;
                row.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
                row.push(Cell::Text(err.clone()));
            }
            _ => unreachable!("cell carries output xor error"),
        }
        table.push(row);
    }
    let path = table.write(&ctx.out_dir, "sweep", ctx.format, &ctx.meta)?;

    println!(
        "swept {} cells over axes [{}]; {} failed",
        result.cells.len(),
        result.axis_names.join(", "),
        failed
    );
    if failed > 0 {
        for cell in result.cells.iter().filter(|c| c.error.is_some()).take(5) {
            println!(
                "  failed at ({}): {}",
                cell.coords
                    .iter()
                    .map(|c| sig3(*c))
                    .collect::<Vec<_>>()
                    .join(", "),
                cell.error.as_deref().unwrap_or("")
            );
        }
    }
    if crossover {
        let c = find_crossover(&spec)?;
        println!(
            "parasitic-dominance crossover: S* = {} (bisection {}, T1_ref = {} s, Γ_par = {} 1/s)",
            sig3(c.s_star),
            sig3(c.s_star_bisection),
            sig3(c.t1_ref_phonon_s),
            sig3(c.gamma_parasitic_total),
        );
    }
    println!("wrote {}", path.display());
    Ok(0)
}

fn default_mc_loads() -> Vec<SpeciesLoad> {
    [("B", "13N"), ("B", "5N"), ("Sb", "13N"), ("Sb", "5N")]
        .iter()
        .map(|(sp, gr)| SpeciesLoad {
            species: sp.to_string(),
            grade: gr.to_string(),
        })
        .collect()
}

fn zscore(diff: f64, se: f64) -> f64 {
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY * diff.signum()
        }
    } else {
        diff / se
    }
}

pub fn cmd_mc_validate(ctx: &Context, trials_flag: Option<u64>) -> Result<i32> {
    let section = ctx.cfg.mc.clone().unwrap_or_default();
    let loads = section.species_loads.unwrap_or_else(default_mc_loads);
    let volume = section.volume_m3.unwrap_or(1e-21);
    let trials = trials_flag.or(section.trials).unwrap_or(1_000_000);
    let extra_volumes = section.volumes_m3.unwrap_or_default();

    let mut table = Table::new(&[
        "case",
        "volume_m3",
        "analytic_mean",
        "analytic_std",
        "sample_mean",
        "sample_std",
        "z_mean",
        "z_std",
    ]);
    let mut all_pass = true;
    let mut ratio_lines = Vec::new();

    for (case_idx, load) in loads.iter().enumerate() {
        let resolved = ctx
            .cfg
            .resolve_loads(std::slice::from_ref(load), &ctx.species_db)?;
        let (species, grade) = &resolved[0];
        let density = number_density(*grade, &ctx.lattice)?;
        let case_label = format!("{}@{}", load.species, load.grade);
        let case_seed = derive_seed(ctx.seed, case_idx as u64);

        let mut volumes = vec![volume, 4.0 * volume];
        volumes.extend(extra_volumes.iter().copied());
        let mut stds = Vec::new();
        let mut moments = Vec::new();
        for (j, &v) in volumes.iter().enumerate() {
            // Per-volume sub-streams, seeded the same way as the core
            // convergence sweep.
            let cfg = McConfig {
                species_loads: vec![(species.clone(), density)],
                sampling_volume_m3: v,
                trials,
                seed: derive_seed(case_seed, 1 + j as u64),
            };
            let analytic = analytic_moments(&cfg.species_loads, v, trials, &ctx.lattice)?;
            let sampled = simulate_volume_strain(&cfg, &ctx.lattice)?;
            let z_mean = zscore(sampled.sample_mean - analytic.mean, analytic.se_mean);
            let z_std = zscore(sampled.sample_std - analytic.std, analytic.se_std);
            // Written so NaN (degenerate zero-event estimates) also fails.
            if !(z_mean.abs() < 3.0 && z_std.abs() < 3.0) {
                all_pass = false;
            }
            table.push(vec![
                Cell::Text(case_label.clone()),
                Cell::Float(v),
                Cell::Float(analytic.mean),
                Cell::Float(analytic.std),
                Cell::Float(sampled.sample_mean),
                Cell::Float(sampled.sample_std),
                Cell::Float(z_mean),
                Cell::Float(z_std),
            ]);
            stds.push(sampled.sample_std);
            moments.push(analytic);
        }

        // V vs 4V scaling: std ratio must sit within 3 combined standard
        // errors of 2.
        let ratio = stds[0] / stds[1];
        let se_ratio = 2.0
            * ((moments[0].se_std / moments[0].std).powi(2)
                + (moments[1].se_std / moments[1].std).powi(2))
            .sqrt();
        let z_ratio = zscore(ratio - 2.0, se_ratio);
        if !(z_ratio.abs() < 3.0) {
            all_pass = false;
        }
        ratio_lines.push(format!(
            "{case_label}: std(V)/std(4V) = {} (z = {})",
            sig3(ratio),
            sig3(z_ratio)
        ));
    }

    let path = table.write(&ctx.out_dir, "mc_validate", ctx.format, &ctx.meta)?;
    println!(
        "{} cases x {} volumes, {} trials each, seed {}",
        loads.len(),
        2 + extra_volumes.len(),
        trials,
        ctx.seed
    );
    for line in &ratio_lines {
        println!("  {line}");
    }
    println!("wrote {}", path.display());
    if all_pass {
        println!("validation PASSED: all z-scores < 3");
        Ok(0)
    } else {
        println!("validation FAILED: some z-scores >= 3");
        Ok(1)
    }
}
