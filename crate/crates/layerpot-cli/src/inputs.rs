//! Loading JSON inputs from files or bundled presets.
//!
//! An argument `preset:NAME` selects `presets/<kind>/NAME.json` from the
//! binary. A plain path is read from disk; when no such file exists but its
//! file name matches a bundled preset of the right kind, the preset is used.

use crate::CliError;
use serde::de::DeserializeOwned;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Geometry,
    Coefficients,
    Suite,
    Sweep,
    Grid,
    Pairs,
    Fourier,
}

impl Kind {
    fn dir(self) -> &'static str {
        match self {
            Kind::Geometry => "geometry",
            Kind::Coefficients => "coefficients",
            Kind::Suite => "suites",
            Kind::Sweep => "sweeps",
            Kind::Grid => "grids",
            Kind::Pairs => "pairs",
            Kind::Fourier => "fourier",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Kind::Geometry => "geometry",
            Kind::Coefficients => "coefficients",
            Kind::Suite => "suite",
            Kind::Sweep => "sweep",
            Kind::Grid => "grid",
            Kind::Pairs => "pairs",
            Kind::Fourier => "Fourier parameters",
        }
    }
}

macro_rules! presets {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../presets/", $path)))),*]
    };
}

pub static PRESETS: &[(&str, &str)] = presets![
    "geometry/unit_disk.json",
    "geometry/unit_square.json",
    "geometry/flat_line.json",
    "geometry/lipschitz_graph.json",
    "geometry/wedge.json",
    "geometry/l_shape.json",
    "coefficients/identity.json",
    "coefficients/complex_0.1.json",
    "coefficients/complex_0.3.json",
    "coefficients/graph_metric.json",
    "coefficients/diagonal_profile.json",
    "coefficients/scalar_bump.json",
    "suites/default.json",
    "suites/half_plane.json",
    "suites/jump.json",
    "suites/double_layer_of_one.json",
    "suites/green_symmetry.json",
    "suites/dirichlet_disk.json",
    "suites/representation.json",
    "suites/max_principle.json",
    "suites/carleson.json",
    "suites/perturbation.json",
    "suites/uniqueness.json",
    "suites/conjugate.json",
    "suites/atom_decay.json",
    "suites/wedge.json",
    "sweeps/complex_sweep.json",
];

fn bundled(kind: Kind, file_name: &str) -> Option<&'static str> {
    let key = format!("{}/{}", kind.dir(), file_name);
    PRESETS.iter().find(|(p, _)| *p == key).map(|(_, text)| *text)
}

/// Names of the bundled presets of one kind.
pub fn preset_names(kind: Kind) -> Vec<&'static str> {
    let prefix = format!("{}/", kind.dir());
    PRESETS
        .iter()
        .filter_map(|(p, _)| p.strip_prefix(&prefix)?.strip_suffix(".json"))
        .collect()
}

/// The text of an input and a label naming where it came from.
pub fn read_text(arg: &str, kind: Kind) -> Result<(String, String), CliError> {
    if let Some(name) = arg.strip_prefix("preset:") {
        return bundled(kind, &format!("{name}.json"))
            .map(|t| (t.to_string(), arg.to_string()))
            .ok_or_else(|| {
                CliError::config(format!(
                    "unknown {} preset '{name}'; available: {}",
                    kind.label(),
                    preset_names(kind).join(", ")
                ))
            });
    }
    let path = Path::new(arg);
    match std::fs::read_to_string(path) {
        Ok(text) => Ok((text, arg.to_string())),
        Err(e) => {
            let fallback = (e.kind() == std::io::ErrorKind::NotFound)
                .then(|| path.file_name().and_then(|f| f.to_str()))
                .flatten()
                .and_then(|f| bundled(kind, f));
            match fallback {
                Some(text) => Ok((text.to_string(), format!("bundled {}/{}", kind.dir(), arg))),
                None => Err(CliError::config(format!(
                    "cannot read {} file '{}': {e}",
                    kind.label(),
                    path.display()
                ))),
            }
        }
    }
}

pub fn read_json<T: DeserializeOwned>(arg: &str, kind: Kind) -> Result<(T, String), CliError> {
    let (text, label) = read_text(arg, kind)?;
    let value = serde_json::from_str(&text).map_err(|e| {
        CliError::config(format!("cannot parse {} '{label}': {e}", kind.label()))
    })?;
    Ok((value, label))
}
