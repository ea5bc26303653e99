//! Small parsers for command-line values.

use std::path::Path;

use focklab::io::{read_planar_weight_csv, read_radial_weight_csv};
use focklab::weights::WeightSpec;
use focklab::C64;

/// `classical`, `gaussian:A`, `power:M:C`, `radial-csv:PATH`, `planar-csv:PATH`.
pub fn parse_weight(text: &str) -> Result<WeightSpec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let spec = match head.trim() {
        "classical" if rest.is_empty() => WeightSpec::classical(),
        "gaussian" => WeightSpec::Gaussian { scale: num(rest)? },
        "power" => {
            let (m, c) = rest.split_once(':').ok_or("expected power:M:C")?;
            WeightSpec::Power { exponent: num(m)?, coefficient: num(c)? }
        }
        "radial-csv" => read_radial_weight_csv(Path::new(rest)).map_err(|e| e.to_string())?,
        "planar-csv" => read_planar_weight_csv(Path::new(rest)).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown weight `{other}`")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// `x,y`.
pub fn parse_point(text: &str) -> Result<C64, String> {
    let (x, y) = text.split_once(',').ok_or_else(|| format!("expected x,y, got `{text}`"))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    Ok(C64::new(num(x)?, num(y)?))
}
