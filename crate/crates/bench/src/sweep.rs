use std::cmp::Ordering;
use std::time::{Duration, Instant};

use fracture_ls::line_search::Strategy;
use fracture_ls::model::{Preset, PresetKind, MULTI_CELLS_PER_SIDE, PRESET_NAMES};
use fracture_ls::newton::{solve, NewtonConfig, NewtonReport, Status};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::spec::{Criterion, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Converged,
    #[serde(rename = "NC")]
    NoConvergence,
    #[serde(rename = "Div")]
    Diverged,
}

impl From<Status> for RunStatus {
    fn from(status: Status) -> Self {
        match status {
            Status::Converged => RunStatus::Converged,
            Status::NoConvergence => RunStatus::NoConvergence,
            Status::Diverged => RunStatus::Diverged,
        }
    }
}

impl RunStatus {
    pub fn label(self) -> &'static str {
        match self {
            RunStatus::Converged => "Converged",
            RunStatus::NoConvergence => "NC",
            RunStatus::Diverged => "Div",
        }
    }
}

mod strategy_name {
    use fracture_ls::line_search::Strategy;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(strategy: &Strategy, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(strategy.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Strategy, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(D::Error::custom)
    }
}

/// One solve of the sweep. Field order is the CSV column order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    #[serde(with = "strategy_name")]
    pub strategy: Strategy,
    pub model: String,
    pub physics: String,
    pub phi: f64,
    /// Cells per fracture side; fixed for the multi-fracture models.
    pub cells: usize,
    pub u_c: f64,
    /// Geometry seed; 0 for the single-fracture models, which ignore it.
    pub seed: u64,
    pub status: RunStatus,
    pub iterations: usize,
    /// Last value of the norm the convergence criterion tests.
    pub final_norm: f64,
    /// Residual plus indicator evaluations made inside line searches.
    pub ls_evals: usize,
    pub tightenings: usize,
}

impl PartialEq for ResultRow {
    fn eq(&self, other: &Self) -> bool {
        let same_norm = self.final_norm == other.final_norm || (self.final_norm.is_nan() && other.final_norm.is_nan());
        same_norm
            && (self.strategy, &self.model, &self.physics, self.cells, self.seed, self.status)
                == (other.strategy, &other.model, &other.physics, other.cells, other.seed, other.status)
            && (self.phi, self.u_c) == (other.phi, other.u_c)
            && (self.iterations, self.ls_evals, self.tightenings)
                == (other.iterations, other.ls_evals, other.tightenings)
    }
}

impl ResultRow {
    fn model_rank(&self) -> usize {
        PRESET_NAMES.iter().position(|&n| n == self.model).unwrap_or(PRESET_NAMES.len())
    }

    /// Sweep-coordinate order used for emission, independent of execution order.
    pub fn coordinate_cmp(&self, other: &Self) -> Ordering {
        self.model_rank()
            .cmp(&other.model_rank())
            .then_with(|| self.model.cmp(&other.model))
            .then_with(|| self.phi.total_cmp(&other.phi))
            .then_with(|| self.cells.cmp(&other.cells))
            .then_with(|| self.seed.cmp(&other.seed))
            .then_with(|| self.u_c.total_cmp(&other.u_c))
            .then_with(|| self.strategy.cmp(&other.strategy))
    }
}

/// A single point of the cartesian sweep after irrelevant axes are collapsed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub strategy: Strategy,
    pub model: Preset,
    pub phi: f64,
    pub cells: usize,
    pub u_c: f64,
    pub seed: u64,
    pub criterion: Criterion,
    pub max_iter: usize,
}

impl SweepCell {
    pub fn run(&self) -> Result<(ResultRow, NewtonReport<f64>)> {
        let wrap = |source| BenchError::Solver { model: self.model.name.into(), phi: self.phi, u_c: self.u_c, source };
        let model = self.model.build(self.cells, self.phi, self.u_c, self.seed).map_err(wrap)?;
        let mut config = NewtonConfig::new(self.strategy, self.criterion.to_solver());
        config.max_iter = self.max_iter;
        let report = solve(&model, &model.initial_guess(), &config).map_err(wrap)?;
        let final_norm = match self.criterion {
            Criterion::Increment => report.final_increment_norm(),
            Criterion::Residual => report.final_residual_norm(),
        };
        let row = ResultRow {
            strategy: self.strategy,
            model: self.model.name.into(),
            physics: self.model.physics.name().into(),
            phi: self.phi,
            cells: self.cells,
            u_c: self.u_c,
            seed: self.seed,
            status: report.status.into(),
            iterations: report.iterations,
            final_norm,
            ls_evals: report.counts.line_search_evaluations(),
            tightenings: report.total_tightenings(),
        };
        Ok((row, report))
    }
}

/// Expands `spec` into its cells. Single-fracture models ignore the seed axis and
/// multi-fracture models the mesh axis, so each contributes one cell per remaining point.
pub fn expand(spec: &SweepSpec) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for &model in &spec.models {
        let (sizes, seeds) = match model.kind {
            PresetKind::Single => (spec.cells_per_side.clone(), vec![0]),
            PresetKind::Multi(_) => (vec![MULTI_CELLS_PER_SIDE], spec.seeds.clone()),
        };
        let criterion = spec.criterion.unwrap_or_else(|| Criterion::default_for(&model));
        for &phi in &spec.phi_values {
            for &n in &sizes {
                for &seed in &seeds {
                    for &u_c in &spec.u_c_values {
                        for &strategy in &spec.strategies {
                            cells.push(SweepCell {
                                strategy,
                                model,
                                phi,
                                cells: n,
                                u_c,
                                seed,
                                criterion,
                                max_iter: spec.max_iter,
                            });
                        }
                    }
                }
            }
        }
    }
    cells
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by [`ResultRow::coordinate_cmp`].
    pub rows: Vec<ResultRow>,
    /// Wall time of each row's solve, aligned with `rows`. Informational only.
    pub wall_times: Vec<Duration>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cells = expand(spec);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = spec.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| BenchError::Config(format!("cannot start worker pool: {e}")))?;
    let timed: Vec<(ResultRow, Duration)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let start = Instant::now();
                cell.run().map(|(row, _)| (row, start.elapsed()))
            })
            .collect::<Result<_>>()
    })?;
    let mut timed = timed;
    timed.sort_by(|a, b| a.0.coordinate_cmp(&b.0));
    let (rows, wall_times) = timed.into_iter().unzip();
    Ok(SweepResult { rows, wall_times })
}

#[cfg(test)]
mod tests {
    use fracture_ls::model::preset;

    use super::*;

    #[test]
    fn default_sweep_arity() {
        assert_eq!(expand(&SweepSpec::default()).len(), 4 * 2 * 2 * 2 * 5);
    }

    #[test]
    fn irrelevant_axes_collapse() {
        let spec = SweepSpec {
            models: vec![preset("single-pm").unwrap(), preset("multi4-pm").unwrap()],
            seeds: vec![0, 1, 2],
            cells_per_side: vec![3, 4],
            phi_values: vec![0.1],
            u_c_values: vec![0.01],
            strategies: vec![Strategy::None],
            ..SweepSpec::default()
        };
        let cells = expand(&spec);
        assert_eq!(cells.len(), 2 + 3);
        assert!(cells[..2].iter().all(|c| c.seed == 0 && c.criterion == Criterion::Increment));
        assert!(cells[2..].iter().all(|c| c.cells == MULTI_CELLS_PER_SIDE && c.criterion == Criterion::Residual));
    }

    #[test]
    fn status_labels() {
        assert_eq!(RunStatus::from(Status::NoConvergence).label(), "NC");
        assert_eq!(RunStatus::from(Status::Diverged).label(), "Div");
    }
}
