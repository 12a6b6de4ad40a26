//! Step-length strategies along a Newton direction.
//!
//! The residual search minimises an interpolant of `½‖r‖²`. The constraint searches only look
//! at the contact state indicators of the fracture cells: every cell that overshoots its
//! branch switch by more than `δ` is pulled back to `δ` beyond the switch, and `δ` is halved
//! while some fracture still sees too many cells change state.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::indicators::{transition_indicator, IndicatorField};
use crate::interpolation::{equispaced, MonotoneCubic};
use crate::scalar::{sgn, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    None,
    Residual,
    ConstraintConstant,
    ConstraintAdaptive,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::None, Strategy::Residual, Strategy::ConstraintConstant, Strategy::ConstraintAdaptive];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::Residual => "residual",
            Strategy::ConstraintConstant => "constraint-const",
            Strategy::ConstraintAdaptive => "constraint-adaptive",
        }
    }

    pub fn is_constraint(self) -> bool {
        matches!(self, Strategy::ConstraintConstant | Strategy::ConstraintAdaptive)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL.into_iter().find(|strategy| strategy.name() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown line-search strategy `{s}` (expected none, residual, constraint-const or constraint-adaptive)"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchConfig<T> {
    pub strategy: Strategy,
    /// Constraint violation tolerance `δ`.
    pub delta: T,
    /// Relative transition tolerance `γ`.
    pub gamma: T,
    /// Trial points per ray, including both ends for the constraint searches.
    pub sample_count: usize,
    pub max_tightenings: usize,
    pub alpha_min: T,
    /// Replaces the adaptive scale by a fixed value. Only read by
    /// [`Strategy::ConstraintAdaptive`].
    pub fixed_scale: Option<T>,
    /// Evaluate the tangential Heaviside mask at every trial point instead of holding it at
    /// the reference iterate.
    pub mask_along_ray: bool,
}

impl<T: Real> LineSearchConfig<T> {
    pub fn new(strategy: Strategy) -> Self {
        Self {
            strategy,
            delta: T::lit(0.3),
            gamma: T::lit(0.2),
            sample_count: 5,
            max_tightenings: 10,
            alpha_min: T::lit(1e-3),
            fixed_scale: None,
            mask_along_ray: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.gamma > T::zero() && self.gamma < T::one()) {
            return Err(Error::Config(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if self.sample_count < 2 {
            return Err(Error::Config(format!("sample_count must be at least 2, got {}", self.sample_count)));
        }
        if !(self.alpha_min > T::zero() && self.alpha_min <= T::one()) {
            return Err(Error::Config(format!("alpha_min must lie in (0, 1], got {}", self.alpha_min)));
        }
        if let Some(s) = self.fixed_scale {
            if !(s > T::zero()) || !s.is_finite() {
                return Err(Error::Config(format!("fixed scale must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

/// Sampled data kept for auditing a search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchDiagnostics<T> {
    /// `(α, f(α))` for the residual search.
    pub objective_samples: Vec<(T, T)>,
    /// Candidate weight after each tightening round, starting with the untightened one.
    pub candidates: Vec<T>,
    /// Number of cell indicators with `t(1) > δ` in the last round.
    pub flagged: usize,
    /// Flagged indicators whose root could not be bracketed.
    pub bracket_fallbacks: usize,
    /// Evaluator calls made by the search.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome<T> {
    pub alpha: T,
    /// Cells changing state at the returned weight, per fracture.
    pub transitions_per_fracture: Vec<usize>,
    pub final_delta: T,
    pub tightening_rounds: usize,
    pub diagnostics: SearchDiagnostics<T>,
}

impl<T: Real> LineSearchOutcome<T> {
    fn full_step(delta: T) -> Self {
        Self {
            alpha: T::one(),
            transitions_per_fracture: Vec::new(),
            final_delta: delta,
            tightening_rounds: 0,
            diagnostics: SearchDiagnostics::default(),
        }
    }
}

pub fn search_none<T: Real>(config: &LineSearchConfig<T>) -> LineSearchOutcome<T> {
    LineSearchOutcome::full_step(config.delta)
}

/// Minimises an interpolant of `objective(α) = ½‖r(x + αp)‖²`.
///
/// The objective is called at `α = 0` and at `sample_count` equispaced points on
/// `[alpha_min, 1]`. Samples that are not finite are dropped; the zero sample only anchors the
/// interpolant and is never returned.
pub fn search_residual<T: Real, F>(mut objective: F, config: &LineSearchConfig<T>) -> Result<LineSearchOutcome<T>>
where
    F: FnMut(T) -> T,
{
    config.validate()?;
    let mut alphas = vec![T::zero()];
    alphas.extend(equispaced(config.alpha_min, T::one(), config.sample_count));
    let mut samples = Vec::with_capacity(alphas.len());
    let mut evaluations = 0;
    for &alpha in &alphas {
        evaluations += 1;
        let value = objective(alpha);
        if value.is_finite() {
            samples.push((alpha, value));
        }
    }
    // An anchor alone cannot pick a positive step.
    if samples.iter().all(|&(alpha, _)| alpha == T::zero()) {
        return Err(Error::NonFiniteSamples);
    }
    let alpha = if samples.len() == 1 {
        samples[0].0
    } else {
        let spline = MonotoneCubic::fit(&samples)?;
        spline.find_minimum((config.alpha_min, T::one())).0
    };
    Ok(LineSearchOutcome {
        alpha: alpha.max(config.alpha_min).min(T::one()),
        transitions_per_fracture: Vec::new(),
        final_delta: config.delta,
        tightening_rounds: 0,
        diagnostics: SearchDiagnostics { objective_samples: samples, evaluations, ..Default::default() },
    })
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Normal,
    Tangential,
}

impl Family {
    fn values<T>(self, field: &IndicatorField<T>) -> &[T] {
        match self {
            Family::Normal => &field.normal,
            Family::Tangential => &field.tangential,
        }
    }
}

/// Per-cell transition flags `t(α) > 0`, counted once per cell and summed per fracture.
pub fn count_transitions<T: Real>(
    reference: &IndicatorField<T>,
    trial: &IndicatorField<T>,
    fractures: &[Range<usize>],
) -> Vec<usize> {
    fractures
        .iter()
        .map(|cells| {
            cells
                .clone()
                .filter(|&v| {
                    transition_indicator(reference.normal[v], trial.normal[v]) > T::zero()
                        || transition_indicator(reference.tangential[v], trial.tangential[v]) > T::zero()
                })
                .count()
        })
        .collect()
}

/// `#t_i > max(1, γ #v_i)` for some fracture `i`.
pub fn too_many_transitions<T: Real>(counts: &[usize], fractures: &[Range<usize>], gamma: T) -> bool {
    counts.iter().zip(fractures.iter()).any(|(&count, cells)| {
        let limit = T::one().max(gamma * T::lit(cells.len() as f64));
        T::lit(count as f64) > limit
    })
}

struct Ray<T> {
    alphas: Vec<T>,
    fields: Vec<IndicatorField<T>>,
}

impl<T: Real> Ray<T> {
    fn reference(&self) -> &IndicatorField<T> {
        &self.fields[0]
    }

    fn end(&self) -> &IndicatorField<T> {
        &self.fields[self.fields.len() - 1]
    }

    fn series(&self, family: Family, cell: usize) -> Vec<T> {
        self.fields.iter().map(|f| family.values(f)[cell]).collect()
    }

    /// Largest sampled weight before the first sample that has left the reference branch.
    fn last_consistent(&self, values: &[T]) -> T {
        let reference = sgn(values[0]);
        let mut best = self.alphas[0];
        for (alpha, value) in self.alphas.iter().zip(values.iter()) {
            if sgn(*value) != reference {
                break;
            }
            best = *alpha;
        }
        best
    }
}

/// Constraint-based search.
///
/// `indicators(α)` must return constant-scaled indicators at `x + αp`, with the tangential
/// Heaviside mask taken from `x`. `fractures` partitions the cell indices. `scale` is the
/// frozen adaptive scale and is only applied by [`Strategy::ConstraintAdaptive`] (or replaced
/// by `config.fixed_scale`); the constant variant ignores it.
pub fn search_constraint<T: Real, F>(
    mut indicators: F,
    fractures: &[Range<usize>],
    config: &LineSearchConfig<T>,
    scale: T,
) -> Result<LineSearchOutcome<T>>
where
    F: FnMut(T) -> IndicatorField<T>,
{
    config.validate()?;
    let s = match config.strategy {
        Strategy::ConstraintAdaptive => Some(config.fixed_scale.unwrap_or(scale)),
        _ => None,
    };
    if let Some(s) = s {
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::Input(format!("indicator scale must be positive, got {s}")));
        }
    }
    let mut evaluations = 0;
    let mut evaluate = |alpha: T| {
        evaluations += 1;
        let field = indicators(alpha);
        match s {
            Some(s) => field.scaled(s),
            None => field,
        }
    };

    let alphas = equispaced(T::zero(), T::one(), config.sample_count);
    let fields: Vec<IndicatorField<T>> = alphas.iter().map(|&a| evaluate(a)).collect();
    let cells = fields[0].len();
    if fractures.iter().any(|r| r.end > cells) {
        return Err(Error::Dimension { expected: cells, actual: fractures.iter().map(|r| r.end).max().unwrap_or(0) });
    }
    let ray = Ray { alphas, fields };

    // Splines are fitted lazily and reused across rounds: tightening only shifts the root
    // equation by `δ sgn(i(x^k))`.
    let mut splines: Vec<Option<MonotoneCubic<T>>> = vec![None; 2 * cells];
    let families = [Family::Normal, Family::Tangential];
    let end_transitions: Vec<[T; 2]> = (0..cells)
        .map(|v| {
            families.map(|family| transition_indicator(family.values(ray.reference())[v], family.values(ray.end())[v]))
        })
        .collect();

    let mut delta = config.delta;
    let mut rounds = 0;
    let mut diagnostics = SearchDiagnostics::default();
    let mut previous = T::one();
    loop {
        let mut alpha = T::one();
        let mut flagged = 0;
        let mut fallbacks = 0;
        for (v, transitions) in end_transitions.iter().enumerate() {
            for (slot, family) in families.iter().enumerate() {
                if !(transitions[slot] > delta) {
                    continue;
                }
                flagged += 1;
                let key = 2 * v + slot;
                if splines[key].is_none() {
                    let values = ray.series(*family, v);
                    splines[key] = Some(MonotoneCubic::from_samples(ray.alphas.clone(), values)?);
                }
                let spline = splines[key].as_ref().expect("fitted above");
                let reference = spline.values()[0];
                let shifted = spline.shifted(delta * sgn(reference));
                let root = match shifted.find_root((T::zero(), T::one())) {
                    Some(root) => root,
                    None => {
                        fallbacks += 1;
                        ray.last_consistent(shifted.values())
                    }
                };
                alpha = alpha.min(root);
            }
        }
        // Halving can only add flagged cells and move roots towards zero; the clamp keeps the
        // sequence monotone when a fallback breaks that.
        alpha = alpha.min(previous);
        previous = alpha;
        diagnostics.candidates.push(alpha);
        diagnostics.flagged = flagged;
        diagnostics.bracket_fallbacks += fallbacks;

        let counts = if alpha == T::one() {
            count_transitions(ray.reference(), ray.end(), fractures)
        } else {
            count_transitions(ray.reference(), &evaluate(alpha), fractures)
        };
        if too_many_transitions(&counts, fractures, config.gamma) && rounds < config.max_tightenings {
            rounds += 1;
            delta = delta * T::lit(0.5);
            continue;
        }
        diagnostics.evaluations = evaluations;
        return Ok(LineSearchOutcome {
            alpha: alpha.max(config.alpha_min).min(T::one()),
            transitions_per_fracture: counts,
            final_delta: delta,
            tightening_rounds: rounds,
            diagnostics,
        });
    }
}

#[cfg(test)]
#[allow(clippy::single_range_in_vec_init)]
mod tests {
    use super::*;
    use proptest::{prop_assert, prop_assert_eq, proptest};

    fn linear_field(values0: &[f64], slopes: &[f64], alpha: f64) -> IndicatorField<f64> {
        IndicatorField {
            normal: values0.iter().zip(slopes.iter()).map(|(v, s)| v + alpha * s).collect(),
            tangential: vec![0.0; values0.len()],
            scaling: crate::indicators::IndicatorScaling::Constant,
        }
    }

    fn config(strategy: Strategy) -> LineSearchConfig<f64> {
        LineSearchConfig::new(strategy)
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("armijo".parse::<Strategy>().is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let c = config(Strategy::ConstraintAdaptive);
        assert_eq!((c.delta, c.gamma, c.sample_count, c.max_tightenings, c.alpha_min), (0.3, 0.2, 5, 10, 1e-3));
        assert!(c.validate().is_ok());
        assert!(LineSearchConfig { delta: 0.0, ..c }.validate().is_err());
        assert!(LineSearchConfig { gamma: 1.0, ..c }.validate().is_err());
        assert!(LineSearchConfig { sample_count: 1, ..c }.validate().is_err());
        assert!(LineSearchConfig { fixed_scale: Some(-1.0), ..c }.validate().is_err());
    }

    #[test]
    fn none_is_a_full_step() {
        let out = search_none(&config(Strategy::None));
        assert_eq!((out.alpha, out.tightening_rounds, out.final_delta), (1.0, 0, 0.3));
    }

    #[test]
    fn residual_quadratic_sampled_coarsely_lands_on_best_knot() {
        let c = LineSearchConfig { alpha_min: 1e-12, ..config(Strategy::Residual) };
        let out = search_residual(|a: f64| (a - 0.6) * (a - 0.6), &c).unwrap();
        // Monotone interpolation cannot place an interior minimum between knots.
        assert!((out.alpha - 0.5).abs() < 1e-9, "{}", out.alpha);
        assert_eq!(out.diagnostics.evaluations, 6);
    }

    #[test]
    fn residual_quadratic_sampled_densely() {
        let c = LineSearchConfig { sample_count: 51, ..config(Strategy::Residual) };
        let out = search_residual(|a: f64| (a - 0.6) * (a - 0.6), &c).unwrap();
        assert!((out.alpha - 0.6).abs() < 0.02, "{}", out.alpha);
    }

    #[test]
    fn residual_decreasing_and_overflowing() {
        let c = config(Strategy::Residual);
        assert_eq!(search_residual(|a: f64| 2.0 - a, &c).unwrap().alpha, 1.0);
        let out = search_residual(|a: f64| if a == 1.0 { f64::INFINITY } else { 2.0 - a }, &c).unwrap();
        assert!((out.alpha - 0.75025).abs() < 1e-12, "{}", out.alpha);
        assert_eq!(search_residual(|_| f64::NAN, &c).unwrap_err(), Error::NonFiniteSamples);
        let only_anchor = search_residual(|a: f64| if a == 0.0 { 1.0 } else { f64::NAN }, &c);
        assert_eq!(only_anchor.unwrap_err(), Error::NonFiniteSamples);
    }

    #[test]
    fn linear_indicator_root() {
        let out = search_constraint(
            |a| linear_field(&[0.5], &[-1.0], a),
            &[0..1],
            &config(Strategy::ConstraintConstant),
            1.0,
        )
        .unwrap();
        assert!((out.alpha - 0.8).abs() < 1e-12, "{}", out.alpha);
        assert_eq!(out.tightening_rounds, 0);
        assert_eq!(out.transitions_per_fracture, vec![1]);
    }

    #[test]
    fn no_transitions_gives_full_step() {
        let out = search_constraint(
            |a| linear_field(&[0.5, -0.2], &[0.1, -0.3], a),
            &[0..2],
            &config(Strategy::ConstraintAdaptive),
            7.0,
        )
        .unwrap();
        assert_eq!(out.alpha, 1.0);
        assert_eq!(out.transitions_per_fracture, vec![0]);
        assert_eq!(out.diagnostics.evaluations, 5);
    }

    #[test]
    fn small_overshoot_is_accepted() {
        // Crosses zero but ends within δ of the switch.
        let out = search_constraint(
            |a| linear_field(&[0.1], &[-0.3], a),
            &[0..1],
            &config(Strategy::ConstraintConstant),
            1.0,
        )
        .unwrap();
        assert_eq!(out.alpha, 1.0);
        assert_eq!(out.transitions_per_fracture, vec![1]);
    }

    #[test]
    fn adaptive_scale_relaxes_flagging() {
        let field = |a| linear_field(&[5.0], &[-10.0], a);
        let constant = search_constraint(field, &[0..1], &config(Strategy::ConstraintConstant), 100.0).unwrap();
        assert!((constant.alpha - 0.53).abs() < 1e-12);
        let adaptive = search_constraint(field, &[0..1], &config(Strategy::ConstraintAdaptive), 100.0).unwrap();
        assert_eq!(adaptive.alpha, 1.0);
        let forced = LineSearchConfig { fixed_scale: Some(1.0), ..config(Strategy::ConstraintAdaptive) };
        assert_eq!(search_constraint(field, &[0..1], &forced, 100.0).unwrap(), constant);
    }

    #[test]
    fn tightening_halves_delta_until_few_cells_switch() {
        let mut v0 = vec![0.5; 10];
        let mut slopes = vec![0.1; 10];
        slopes[..4].copy_from_slice(&[-0.9, -1.0, -1.1, -1.2]);
        v0[4..].iter_mut().for_each(|v| *v = 0.5);
        let out =
            search_constraint(|a| linear_field(&v0, &slopes, a), &[0..10], &config(Strategy::ConstraintConstant), 1.0)
                .unwrap();
        assert_eq!(out.tightening_rounds, 2);
        assert!((out.final_delta - 0.075).abs() < 1e-15);
        let expected = [0.8 / 1.2, 0.65 / 1.2, 0.575 / 1.2];
        for (got, want) in out.diagnostics.candidates.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(out.transitions_per_fracture, vec![2]);
    }

    #[test]
    fn tightening_cap_is_respected() {
        // Every cell switches however small δ gets.
        let v0 = vec![0.5; 10];
        let slopes = vec![-1.0; 10];
        let c = LineSearchConfig { max_tightenings: 3, ..config(Strategy::ConstraintConstant) };
        let out = search_constraint(|a| linear_field(&v0, &slopes, a), &[0..10], &c, 1.0).unwrap();
        assert_eq!(out.tightening_rounds, 3);
        assert_eq!(out.final_delta, 0.3 / 8.0);
        assert!(out.diagnostics.candidates.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn alpha_is_floored() {
        let c = LineSearchConfig { alpha_min: 0.1, delta: 1e-6, ..config(Strategy::ConstraintConstant) };
        let out = search_constraint(|a| linear_field(&[1e-4], &[-10.0], a), &[0..1], &c, 1.0).unwrap();
        assert_eq!(out.alpha, 0.1);
    }

    #[test]
    fn tangential_family_and_cell_counted_once() {
        let field = |a: f64| IndicatorField {
            normal: vec![0.5 - a, 0.5],
            tangential: vec![0.5 - a, 0.5 - 2.0 * a],
            scaling: crate::indicators::IndicatorScaling::Constant,
        };
        let out = search_constraint(field, &[0..2], &config(Strategy::ConstraintConstant), 1.0).unwrap();
        assert!((out.alpha - 0.4).abs() < 1e-12);
        assert_eq!(out.transitions_per_fracture, vec![1]);
    }

    #[test]
    fn fracture_ranges_are_checked() {
        let out = search_constraint(
            |a| linear_field(&[0.5], &[-1.0], a),
            &[0..3],
            &config(Strategy::ConstraintConstant),
            1.0,
        );
        assert!(out.is_err());
    }

    proptest! {
        #[test]
        fn flagged_roots_respect_delta(
            v0 in proptest::collection::vec(-1.0..1.0_f64, 1..12),
            slopes in proptest::collection::vec(-3.0..3.0_f64, 12),
        ) {
            let n = v0.len();
            let slopes = &slopes[..n];
            let c = LineSearchConfig { max_tightenings: 0, ..config(Strategy::ConstraintConstant) };
            let out = search_constraint(|a| linear_field(&v0, slopes, a), &[0..n], &c, 1.0).unwrap();
            prop_assert!(out.alpha > 0.0 && out.alpha <= 1.0);
            for v in 0..n {
                let t = transition_indicator(v0[v], v0[v] + out.alpha * slopes[v]);
                prop_assert!(t <= c.delta + 1e-8, "cell {} overshoots: {}", v, t);
            }
        }

        #[test]
        fn candidates_never_increase(
            v0 in proptest::collection::vec(0.01..1.0_f64, 10),
            slopes in proptest::collection::vec(-3.0..0.5_f64, 10),
            gamma in 0.05..0.9_f64,
        ) {
            let c = LineSearchConfig { gamma, ..config(Strategy::ConstraintConstant) };
            let out = search_constraint(|a| linear_field(&v0, &slopes, a), &[0..5, 5..10], &c, 1.0).unwrap();
            prop_assert!(out.diagnostics.candidates.windows(2).all(|w| w[1] <= w[0]));
            prop_assert_eq!(out.final_delta, 0.3 * 0.5_f64.powi(out.tightening_rounds as i32));
        }

        #[test]
        fn flagging_is_scale_equivariant(
            v0 in proptest::collection::vec(-5.0..5.0_f64, 1..10),
            slopes in proptest::collection::vec(-10.0..10.0_f64, 10),
            s in 0.01..100.0_f64,
        ) {
            let n = v0.len();
            let slopes = &slopes[..n];
            let adaptive = LineSearchConfig { max_tightenings: 0, ..config(Strategy::ConstraintAdaptive) };
            let constant = LineSearchConfig { max_tightenings: 0, delta: 0.3 * s, ..config(Strategy::ConstraintConstant) };
            let a = search_constraint(|a| linear_field(&v0, slopes, a), &[0..n], &adaptive, s).unwrap();
            let c = search_constraint(|a| linear_field(&v0, slopes, a), &[0..n], &constant, s).unwrap();
            prop_assert_eq!(a.diagnostics.flagged, c.diagnostics.flagged);
            prop_assert!((a.alpha - c.alpha).abs() < 1e-9);
        }
    }
}
