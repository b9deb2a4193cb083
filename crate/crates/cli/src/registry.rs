//! Built-in experiments, one manifest per reproduced table or figure.

use crate::config::ExperimentConfig;
use crate::ExperimentError;

/// (name, manifest text) of every registered experiment.
pub const MANIFESTS: &[(&str, &str)] = &[
    ("fig13-p-u1", include_str!("../../../configs/fig13-p-u1.toml")),
    ("fig14-p-u3", include_str!("../../../configs/fig14-p-u3.toml")),
    ("fig18-hp", include_str!("../../../configs/fig18-hp.toml")),
    ("fig2-eigen", include_str!("../../../configs/fig2-eigen.toml")),
    ("fig5-condition", include_str!("../../../configs/fig5-condition.toml")),
    ("instability-u0", include_str!("../../../configs/instability-u0.toml")),
    ("instability-u1", include_str!("../../../configs/instability-u1.toml")),
    ("patch-test", include_str!("../../../configs/patch-test.toml")),
    ("scattering-fields", include_str!("../../../configs/scattering-fields.toml")),
    ("scattering", include_str!("../../../configs/scattering.toml")),
    ("table1", include_str!("../../../configs/table1.toml")),
    ("table2-voronoi", include_str!("../../../configs/table2-voronoi.toml")),
    ("table3-stabilization", include_str!("../../../configs/table3-stabilization.toml")),
    ("table5-sigma", include_str!("../../../configs/table5-sigma.toml")),
    ("u2-cartesian", include_str!("../../../configs/u2-cartesian.toml")),
    ("u3-cartesian", include_str!("../../../configs/u3-cartesian.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    MANIFESTS.iter().map(|(n, _)| *n)
}

/// Parsed manifest of a registered experiment.
pub fn lookup(name: &str) -> Result<ExperimentConfig, ExperimentError> {
    let (_, text) = MANIFESTS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ExperimentError::UnknownExperiment(name.to_string()))?;
    ExperimentConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_manifest_parses_and_validates() {
        let root = crate::config::default_root();
        for (name, _) in MANIFESTS {
            let cfg = lookup(name).unwrap();
            assert_eq!(&cfg.name, name);
            cfg.validate(&root).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(lookup("nope"), Err(ExperimentError::UnknownExperiment(_))));
    }
}
