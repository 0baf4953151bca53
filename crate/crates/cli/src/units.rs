//! Suffixed-unit parsing for flags and config strings.
//!
//! Dimensioned quantities must carry an explicit unit suffix
//! (`0.44T`, `0.35K`, `1e10cm-3`, `3GHz`, `0.6ms`); bare numbers are
//! rejected so a silent unit mix-up cannot slip through.

use anyhow::{anyhow, bail, Result};
use gespin_core::strain::PurityGrade;

fn split_suffix(input: &str, suffixes: &[(&'static str, f64)]) -> Result<f64> {
    let s = input.trim();
    for (suffix, scale) in suffixes {
        if let Some(number) = s.strip_suffix(suffix) {
            let number = number.trim();
            if number.is_empty() {
                bail!("missing number in `{input}`");
            }
            let value: f64 = number
                .parse()
                .map_err(|_| anyhow!("cannot parse number in `{input}`"))?;
            return Ok(value * scale);
        }
    }
    bail!(
        "`{input}` needs an explicit unit suffix (one of: {})",
        suffixes
            .iter()
            .map(|(s, _)| *s)
            .collect::<Vec<_>>()
            .join(", ")
    )
}

/// Number density → m⁻³. Accepts `cm-3` and `m-3`.
pub fn parse_density(input: &str) -> Result<f64> {
    let v = split_suffix(input, &[("cm-3", 1e6), ("m-3", 1.0)])?;
    if !(v > 0.0) {
        bail!("density must be positive, got `{input}`");
    }
    Ok(v)
}

/// Magnetic field → tesla. Longer suffixes first so `mT` is not read
/// as a malformed `T`.
pub fn parse_field(input: &str) -> Result<f64> {
    split_suffix(input, &[("mT", 1e-3), ("T", 1.0)])
}

/// Temperature → kelvin.
pub fn parse_temperature(input: &str) -> Result<f64> {
    split_suffix(input, &[("mK", 1e-3), ("K", 1.0)])
}

/// Time → seconds.
pub fn parse_time(input: &str) -> Result<f64> {
    split_suffix(
        input,
        &[("ns", 1e-9), ("us", 1e-6), ("ms", 1e-3), ("s", 1.0)],
    )
}

/// Ordinary frequency → Hz (conversion to angular happens at use sites).
pub fn parse_frequency_hz(input: &str) -> Result<f64> {
    split_suffix(
        input,
        &[("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3), ("Hz", 1.0)],
    )
}

/// Purity grade: `5N`, `9N`, `13N`, `c=<fraction>`, or `n=<density>`.
pub fn parse_grade(input: &str) -> Result<PurityGrade> {
    let s = input.trim();
    match s {
        "5N" => return Ok(PurityGrade::five_n()),
        "9N" => return Ok(PurityGrade::nine_n()),
        "13N" => return Ok(PurityGrade::thirteen_n()),
        _ => {}
    }
    if let Some(fraction) = s.strip_prefix("c=") {
        let c: f64 = fraction
            .parse()
            .map_err(|_| anyhow!("cannot parse atomic fraction in `{input}`"))?;
        return Ok(PurityGrade::AtomicFraction(c));
    }
    if let Some(density) = s.strip_prefix("n=") {
        return Ok(PurityGrade::NumberDensity(parse_density(density)?));
    }
    bail!("unrecognized grade `{input}` (use 5N, 9N, 13N, c=<fraction>, or n=<density>)")
}
