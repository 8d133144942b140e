//! `--val p=1,q=3/2` parsing against a model's parameters.

use anyhow::{bail, Result};
use ptakit::constraints::Rational;
use ptakit::model::PtaModel;

/// Values in the model's parameter order; every parameter must be given
/// exactly once.
pub fn parse_valuation(m: &PtaModel, text: &str) -> Result<Vec<Rational>> {
    let mut values: Vec<Option<Rational>> = vec![None; m.params.len()];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((name, value)) = part.split_once('=') else {
            bail!("expected name=value in `{part}`");
        };
        let (name, value) = (name.trim(), value.trim());
        let Some(i) = m.param_index(name) else {
            bail!("`{name}` is not a parameter of `{}`", m.name);
        };
        let Ok(x) = value.parse::<Rational>() else {
            bail!("`{value}` is not a rational number");
        };
        if values[i].replace(x).is_some() {
            bail!("parameter `{name}` given twice");
        }
    }
    let missing: Vec<&str> = m
        .params
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.is_none())
        .map(|(n, _)| n.as_str())
        .collect();
    if !missing.is_empty() {
        bail!("missing value for {}", missing.join(", "));
    }
    Ok(values.into_iter().flatten().collect())
}
