use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fracture_ls::line_search::Strategy;
use fracture_ls::model::{preset, Preset, PresetKind};
use fracture_ls::newton::ConvergenceCriterion;
use serde::Deserialize;

use crate::error::{BenchError, Result};

/// Characteristic displacements swept by default, one per decade around 0.01.
pub const DEFAULT_U_C: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
pub const DEFAULT_PHI: [f64; 2] = [0.1, 0.2];
pub const DEFAULT_CELLS: [usize; 2] = [6, 12];
pub const DEFAULT_MODELS: [&str; 2] = ["single-pm", "single-tpm"];
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Increment,
    Residual,
}

impl Criterion {
    /// Increment norm on the single fracture, residual norm on the fracture networks.
    pub fn default_for(preset: &Preset) -> Self {
        match preset.kind {
            PresetKind::Single => Criterion::Increment,
            PresetKind::Multi(_) => Criterion::Residual,
        }
    }

    pub fn to_solver(self) -> ConvergenceCriterion<f64> {
        match self {
            Criterion::Increment => ConvergenceCriterion::increment(),
            Criterion::Residual => ConvergenceCriterion::residual(),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Increment => "increment",
            Criterion::Residual => "residual",
        })
    }
}

impl FromStr for Criterion {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increment" => Ok(Criterion::Increment),
            "residual" => Ok(Criterion::Residual),
            _ => Err(BenchError::Config(format!("unknown criterion `{s}` (expected increment or residual)"))),
        }
    }
}

/// Cartesian sweep over strategy, model, dilation angle, mesh size, characteristic
/// displacement and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub strategies: Vec<Strategy>,
    pub models: Vec<Preset>,
    pub phi_values: Vec<f64>,
    /// Only read by single-fracture models.
    pub cells_per_side: Vec<usize>,
    pub u_c_values: Vec<f64>,
    /// Only read by multi-fracture models.
    pub seeds: Vec<u64>,
    /// `None` picks [`Criterion::default_for`] per model.
    pub criterion: Option<Criterion>,
    pub max_iter: usize,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            strategies: Strategy::ALL.to_vec(),
            models: DEFAULT_MODELS.iter().map(|m| preset(m).expect("built-in preset")).collect(),
            phi_values: DEFAULT_PHI.to_vec(),
            cells_per_side: DEFAULT_CELLS.to_vec(),
            u_c_values: DEFAULT_U_C.to_vec(),
            seeds: vec![0],
            criterion: None,
            max_iter: DEFAULT_MAX_ITER,
            jobs: None,
            output: None,
        }
    }
}

fn check_axis<V: PartialEq + fmt::Debug>(name: &str, values: &[V]) -> Result<()> {
    if values.is_empty() {
        return Err(BenchError::Config(format!("`{name}` must not be empty")));
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(BenchError::Config(format!("`{name}` lists {v:?} twice")));
        }
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_axis("strategies", &self.strategies)?;
        check_axis("models", &self.models.iter().map(|m| m.name).collect::<Vec<_>>())?;
        check_axis("phi", &self.phi_values)?;
        check_axis("cells", &self.cells_per_side)?;
        check_axis("u_c", &self.u_c_values)?;
        check_axis("seeds", &self.seeds)?;
        if let Some(&phi) = self.phi_values.iter().find(|p| !(p.is_finite() && (0.0..1.5).contains(*p))) {
            return Err(BenchError::Config(format!("dilation angle {phi} outside [0, 1.5) rad")));
        }
        if let Some(&u_c) = self.u_c_values.iter().find(|u| !(u.is_finite() && **u > 0.0)) {
            return Err(BenchError::Config(format!("characteristic displacement {u_c} must be positive")));
        }
        if let Some(&n) = self.cells_per_side.iter().find(|&&n| n < 2) {
            return Err(BenchError::Config(format!("cells per side must be at least 2, got {n}")));
        }
        if self.max_iter == 0 {
            return Err(BenchError::Config("max_iter must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(BenchError::Config("jobs must be positive".into()));
        }
        Ok(())
    }
}

/// On-disk sweep description. Every key is optional; missing keys keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub strategies: Option<Vec<String>>,
    pub models: Option<Vec<String>>,
    pub phi: Option<Vec<f64>>,
    pub cells: Option<Vec<usize>>,
    pub u_c: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub criterion: Option<String>,
    pub max_iter: Option<usize>,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| BenchError::ReadConfig { path: path.to_owned(), source })?;
        toml::from_str(&text).map_err(|source| BenchError::ParseConfig { path: path.to_owned(), source })
    }

    /// Keys set in `other` win.
    pub fn overridden_by(self, other: FileConfig) -> FileConfig {
        FileConfig {
            strategies: other.strategies.or(self.strategies),
            models: other.models.or(self.models),
            phi: other.phi.or(self.phi),
            cells: other.cells.or(self.cells),
            u_c: other.u_c.or(self.u_c),
            seeds: other.seeds.or(self.seeds),
            criterion: other.criterion.or(self.criterion),
            max_iter: other.max_iter.or(self.max_iter),
            jobs: other.jobs.or(self.jobs),
            output: other.output.or(self.output),
        }
    }

    pub fn into_spec(self) -> Result<SweepSpec> {
        let defaults = SweepSpec::default();
        let strategies = match self.strategies {
            Some(names) => names
                .iter()
                .map(|s| s.parse::<Strategy>().map_err(|e| BenchError::Config(e.to_string())))
                .collect::<Result<_>>()?,
            None => defaults.strategies,
        };
        let models = match self.models {
            Some(names) => {
                names.iter().map(|m| preset(m).map_err(|e| BenchError::Config(e.to_string()))).collect::<Result<_>>()?
            }
            None => defaults.models,
        };
        let spec = SweepSpec {
            strategies,
            models,
            phi_values: self.phi.unwrap_or(defaults.phi_values),
            cells_per_side: self.cells.unwrap_or(defaults.cells_per_side),
            u_c_values: self.u_c.unwrap_or(defaults.u_c_values),
            seeds: self.seeds.unwrap_or(defaults.seeds),
            criterion: self.criterion.as_deref().map(str::parse).transpose()?,
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
            jobs: self.jobs,
            output: self.output,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        let spec = SweepSpec::default();
        spec.validate().unwrap();
        assert_eq!(FileConfig::default().into_spec().unwrap(), spec);
    }

    #[test]
    fn file_keys_override_defaults() {
        let file: FileConfig = toml::from_str(
            r#"
            strategies = ["none", "constraint-adaptive"]
            models = ["multi4-pm"]
            u_c = [0.01]
            criterion = "increment"
            "#,
        )
        .unwrap();
        let spec = file.into_spec().unwrap();
        assert_eq!(spec.strategies, [Strategy::None, Strategy::ConstraintAdaptive]);
        assert_eq!(spec.models[0].name, "multi4-pm");
        assert_eq!(spec.u_c_values, [0.01]);
        assert_eq!(spec.criterion, Some(Criterion::Increment));
        assert_eq!(spec.phi_values, DEFAULT_PHI);
    }

    #[test]
    fn later_layer_wins() {
        let base = FileConfig { phi: Some(vec![0.1]), max_iter: Some(10), ..Default::default() };
        let merged = base.overridden_by(FileConfig { phi: Some(vec![0.2]), ..Default::default() });
        assert_eq!((merged.phi, merged.max_iter), (Some(vec![0.2]), Some(10)));
    }

    #[test]
    fn bad_values_are_rejected() {
        let cases = [
            FileConfig { strategies: Some(vec!["bisection".into()]), ..Default::default() },
            FileConfig { models: Some(vec!["single".into()]), ..Default::default() },
            FileConfig { phi: Some(vec![]), ..Default::default() },
            FileConfig { u_c: Some(vec![0.0]), ..Default::default() },
            FileConfig { u_c: Some(vec![0.1, 0.1]), ..Default::default() },
            FileConfig { cells: Some(vec![1]), ..Default::default() },
            FileConfig { criterion: Some("energy".into()), ..Default::default() },
            FileConfig { max_iter: Some(0), ..Default::default() },
            FileConfig { jobs: Some(0), ..Default::default() },
        ];
        for case in cases {
            assert!(matches!(case.clone().into_spec(), Err(BenchError::Config(_))), "{case:?}");
        }
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }

    #[test]
    fn criterion_defaults_follow_the_model() {
        assert_eq!(Criterion::default_for(&preset("single-tpm").unwrap()), Criterion::Increment);
        assert_eq!(Criterion::default_for(&preset("multi8-pm").unwrap()), Criterion::Residual);
    }
}
