//! Semismooth Newton driver with pluggable step-length strategies.

use std::ops::Range;

use crate::contact::{coulomb_violation, CellContactState, ContactParameters, RegimeCensus};
use crate::error::{Error, Result};
use crate::indicators::IndicatorField;
use crate::linalg::{DenseMatrix, LuFactorization};
use crate::line_search::{
    search_constraint, search_none, search_residual, LineSearchConfig, LineSearchOutcome, Strategy,
};
use crate::scalar::{all_finite, normalized_norm, Real};
use crate::scaling::AdaptiveScale;

/// A square nonlinear system `r(x) = 0` with a generalized Jacobian.
pub trait NonlinearSystem<T: Real> {
    fn dimension(&self) -> usize;

    fn residual(&self, x: &[T], out: &mut [T]);

    /// Overwrites `jac` (already sized `n × n`).
    fn jacobian(&self, x: &[T], jac: &mut DenseMatrix<T>);

    /// Fracture cells for the constraint searches and the diagnostics built on contact states.
    fn contact(&self) -> Option<&dyn ContactSubsystem<T>> {
        None
    }
}

pub trait ContactSubsystem<T: Real> {
    fn parameters(&self) -> ContactParameters<T>;

    /// Cell index ranges, one per fracture.
    fn fractures(&self) -> Vec<Range<usize>>;

    fn cell_states(&self, x: &[T]) -> Vec<CellContactState<T>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    /// `‖p^k‖/√n < tol`
    IncrementNorm,
    /// `‖r^k‖/√n < tol`
    ResidualNorm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCriterion<T> {
    pub kind: CriterionKind,
    pub tolerance: T,
}

impl<T: Real> ConvergenceCriterion<T> {
    pub fn increment() -> Self {
        Self { kind: CriterionKind::IncrementNorm, tolerance: T::lit(1e-10) }
    }

    pub fn residual() -> Self {
        Self { kind: CriterionKind::ResidualNorm, tolerance: T::lit(1e-10) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig<T> {
    pub line_search: LineSearchConfig<T>,
    pub criterion: ConvergenceCriterion<T>,
    pub max_iter: usize,
    /// Divergence once `‖r‖` exceeds this multiple of its initial value.
    pub divergence_factor: T,
    /// Computes the first adaptive scale from the initial guess instead of starting at 1.
    pub scale_from_initial_guess: bool,
}

impl<T: Real> NewtonConfig<T> {
    pub fn new(strategy: Strategy, criterion: ConvergenceCriterion<T>) -> Self {
        Self {
            line_search: LineSearchConfig::new(strategy),
            criterion,
            max_iter: 100,
            divergence_factor: T::lit(1e10),
            scale_from_initial_guess: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Converged,
    NoConvergence,
    Diverged,
}

impl Status {
    /// Short label used in tables (`NC`, `Div`).
    pub fn label(self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::NoConvergence => "NC",
            Status::Diverged => "Div",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceCause {
    NonFiniteResidual,
    NonFiniteIterate,
    ResidualGrowth,
    SingularJacobian { column: usize },
    LineSearch,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvaluationCounts {
    /// Residual evaluations made by the driver itself (one per accepted iterate).
    pub driver_residuals: usize,
    /// Extra residual evaluations made by the residual search.
    pub line_search_residuals: usize,
    /// Indicator evaluations made by the constraint searches.
    pub indicator_evaluations: usize,
    pub jacobians: usize,
    pub factorizations: usize,
}

impl EvaluationCounts {
    pub fn total_residuals(&self) -> usize {
        self.driver_residuals + self.line_search_residuals
    }

    pub fn line_search_evaluations(&self) -> usize {
        self.line_search_residuals + self.indicator_evaluations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport<T> {
    pub status: Status,
    /// Newton updates performed.
    pub iterations: usize,
    pub divergence: Option<DivergenceCause>,
    /// `‖p^k‖/√n` of every computed direction.
    pub increment_norms: Vec<T>,
    /// `‖r^k‖/√n` of every evaluated iterate, starting with the initial guess.
    pub residual_norms: Vec<T>,
    pub alphas: Vec<T>,
    pub tightening_rounds: Vec<usize>,
    /// Regime census of every evaluated iterate, starting with the initial guess.
    pub regime_history: Vec<RegimeCensus>,
    /// Adaptive scale used by each line search.
    pub scales: Vec<T>,
    pub counts: EvaluationCounts,
    pub solution: Vec<T>,
}

impl<T: Real> NewtonReport<T> {
    pub fn final_residual_norm(&self) -> T {
        self.residual_norms.last().copied().unwrap_or_else(T::nan)
    }

    pub fn final_increment_norm(&self) -> T {
        self.increment_norms.last().copied().unwrap_or_else(T::nan)
    }

    pub fn total_tightenings(&self) -> usize {
        self.tightening_rounds.iter().sum()
    }
}

fn axpy<T: Real>(x: &[T], alpha: T, p: &[T]) -> Vec<T> {
    x.iter().zip(p.iter()).map(|(&a, &b)| a + alpha * b).collect()
}

fn half_squared_norm<T: Real>(r: &[T]) -> T {
    T::lit(0.5) * r.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

/// Largest Coulomb-condition violation over the fracture cells of `x`.
pub fn contact_violation<T: Real>(model: &dyn NonlinearSystem<T>, x: &[T]) -> Option<T> {
    let contact = model.contact()?;
    let params = contact.parameters();
    Some(contact.cell_states(x).iter().fold(T::zero(), |worst, s| worst.max(coulomb_violation(s, &params))))
}

struct Tracker<T> {
    report: NewtonReport<T>,
}

impl<T: Real> Tracker<T> {
    fn finish(mut self, status: Status, cause: Option<DivergenceCause>, x: Vec<T>) -> NewtonReport<T> {
        self.report.status = status;
        self.report.divergence = cause;
        self.report.solution = x;
        self.report
    }
}

/// Runs the Newton iteration from `initial_guess`. Non-convergence and divergence are report
/// statuses; only malformed input is an error.
pub fn solve<T: Real>(
    model: &dyn NonlinearSystem<T>,
    initial_guess: &[T],
    config: &NewtonConfig<T>,
) -> Result<NewtonReport<T>> {
    let n = model.dimension();
    if initial_guess.len() != n {
        return Err(Error::Dimension { expected: n, actual: initial_guess.len() });
    }
    config.line_search.validate()?;
    if !(config.criterion.tolerance > T::zero()) {
        return Err(Error::Config(format!("tolerance must be positive, got {}", config.criterion.tolerance)));
    }
    let strategy = config.line_search.strategy;
    let contact = model.contact();
    if strategy.is_constraint() && contact.is_none() {
        return Err(Error::Config(format!("strategy {strategy} needs a model with fracture cells")));
    }
    let fractures = contact.map(|c| c.fractures()).unwrap_or_default();
    let params = contact.map(|c| c.parameters());

    let mut tracker = Tracker {
        report: NewtonReport {
            status: Status::NoConvergence,
            iterations: 0,
            divergence: None,
            increment_norms: Vec::new(),
            residual_norms: Vec::new(),
            alphas: Vec::new(),
            tightening_rounds: Vec::new(),
            regime_history: Vec::new(),
            scales: Vec::new(),
            counts: EvaluationCounts::default(),
            solution: Vec::new(),
        },
    };

    let mut x = initial_guess.to_vec();
    let mut r = vec![T::zero(); n];
    model.residual(&x, &mut r);
    tracker.report.counts.driver_residuals += 1;
    let initial_norm = normalized_norm(&r);

    let mut scale = AdaptiveScale::initial();
    let mut states = contact.map(|c| c.cell_states(&x)).unwrap_or_default();
    if config.scale_from_initial_guess {
        if let Some(p) = &params {
            scale.update(&states, p, 0)?;
        }
    }

    let mut jac = DenseMatrix::zeros(n, n);
    for k in 0..=config.max_iter {
        let r_norm = normalized_norm(&r);
        tracker.report.residual_norms.push(r_norm);
        if let Some(p) = &params {
            tracker.report.regime_history.push(RegimeCensus::from_states_tolerant(&states, p));
        }
        if !r_norm.is_finite() {
            return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::NonFiniteResidual), x));
        }
        if initial_norm > T::zero() && r_norm > config.divergence_factor * initial_norm {
            return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::ResidualGrowth), x));
        }
        if config.criterion.kind == CriterionKind::ResidualNorm && r_norm < config.criterion.tolerance {
            return Ok(tracker.finish(Status::Converged, None, x));
        }
        if k == config.max_iter {
            break;
        }

        model.jacobian(&x, &mut jac);
        tracker.report.counts.jacobians += 1;
        tracker.report.counts.factorizations += 1;
        let lu = match LuFactorization::new(jac.clone()) {
            Ok(lu) => lu,
            Err(Error::Singular { column }) => {
                return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::SingularJacobian { column }), x));
            }
            Err(e) => return Err(e),
        };
        let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        let p = lu.solve(&rhs)?;
        if !all_finite(&p) {
            return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::NonFiniteIterate), x));
        }
        let p_norm = normalized_norm(&p);
        tracker.report.increment_norms.push(p_norm);

        tracker.report.scales.push(scale.value);
        let outcome: LineSearchOutcome<T> = match strategy {
            Strategy::None => search_none(&config.line_search),
            Strategy::Residual => {
                let f0 = half_squared_norm(&r);
                let mut trial = vec![T::zero(); n];
                let counts = &mut tracker.report.counts;
                let result = search_residual(
                    |alpha| {
                        if alpha == T::zero() {
                            return f0;
                        }
                        counts.line_search_residuals += 1;
                        model.residual(&axpy(&x, alpha, &p), &mut trial);
                        half_squared_norm(&trial)
                    },
                    &config.line_search,
                );
                match result {
                    Ok(outcome) => outcome,
                    Err(Error::NonFiniteSamples) => {
                        return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::LineSearch), x));
                    }
                    Err(e) => return Err(e),
                }
            }
            Strategy::ConstraintConstant | Strategy::ConstraintAdaptive => {
                let contact = contact.expect("checked above");
                let p_params = params.expect("contact parameters");
                let reference = IndicatorField::evaluate(&states, &p_params, None).normal;
                let mask = (!config.line_search.mask_along_ray).then_some(reference.as_slice());
                let counts = &mut tracker.report.counts;
                search_constraint(
                    |alpha| {
                        counts.indicator_evaluations += 1;
                        let trial = contact.cell_states(&axpy(&x, alpha, &p));
                        IndicatorField::evaluate(&trial, &p_params, mask)
                    },
                    &fractures,
                    &config.line_search,
                    scale.value,
                )?
            }
        };
        tracker.report.alphas.push(outcome.alpha);
        tracker.report.tightening_rounds.push(outcome.tightening_rounds);

        x = axpy(&x, outcome.alpha, &p);
        tracker.report.iterations = k + 1;
        if !all_finite(&x) {
            return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::NonFiniteIterate), x));
        }
        model.residual(&x, &mut r);
        tracker.report.counts.driver_residuals += 1;
        if let (Some(c), Some(p)) = (contact, &params) {
            states = c.cell_states(&x);
            scale.update(&states, p, k + 1)?;
        }

        if config.criterion.kind == CriterionKind::IncrementNorm && p_norm < config.criterion.tolerance {
            let r_norm = normalized_norm(&r);
            tracker.report.residual_norms.push(r_norm);
            if let Some(p) = &params {
                tracker.report.regime_history.push(RegimeCensus::from_states_tolerant(&states, p));
            }
            if !r_norm.is_finite() {
                return Ok(tracker.finish(Status::Diverged, Some(DivergenceCause::NonFiniteResidual), x));
            }
            return Ok(tracker.finish(Status::Converged, None, x));
        }
    }
    Ok(tracker.finish(Status::NoConvergence, None, x))
}
