//! Linear state indicators that change sign exactly where a contact `max` switches branch.
//!
//! * normal: `i⊥ = −σ̃⊥ − c(⟦u⟧⊥ − g)`, positive in contact;
//! * tangential: `i∥ = (‖σ̃∥ + c⟦u̇⟧∥‖ − b) H(i⊥(x^k))`, positive when sliding.
//!
//! The Heaviside mask is taken from the reference iterate `x^k` and held fixed along a search
//! ray. The adaptively scaled variant divides the constant variant by the frozen scale `s`.

use crate::contact::{friction_bound, gap, tangential_argument, vnorm, CellContactState, ContactParameters};
use crate::scalar::{sgn, Real};

pub fn normal_indicator<T: Real, const N: usize>(state: &CellContactState<T, N>, params: &ContactParameters<T>) -> T {
    -state.traction_n - params.c_num * (state.jump_n - gap(state, params))
}

pub fn tangential_indicator<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
    normal_indicator_at_reference: T,
) -> T {
    if normal_indicator_at_reference > T::zero() {
        vnorm(&tangential_argument(state, params)) - friction_bound(state, params)
    } else {
        T::zero()
    }
}

/// `t = −sgn(i_ref · i_trial) |i_trial|`; positive iff the cell changed state.
pub fn transition_indicator<T: Real>(i_ref: T, i_trial: T) -> T {
    -sgn(i_ref * i_trial) * i_trial.abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndicatorScaling<T> {
    /// `i_c`
    Constant,
    /// `i_a = i_c / s`
    Adaptive(T),
}

/// Per-cell indicators at one trial point.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField<T> {
    pub normal: Vec<T>,
    pub tangential: Vec<T>,
    pub scaling: IndicatorScaling<T>,
}

impl<T: Real> IndicatorField<T> {
    /// Constant-scaled indicators. The tangential mask uses `reference_normal` (the normal
    /// indicators at `x^k`) or, when `None`, the normal indicators computed here.
    pub fn evaluate<const N: usize>(
        states: &[CellContactState<T, N>],
        params: &ContactParameters<T>,
        reference_normal: Option<&[T]>,
    ) -> Self {
        let normal: Vec<T> = states.iter().map(|s| normal_indicator(s, params)).collect();
        let mask = reference_normal.unwrap_or(&normal);
        assert_eq!(mask.len(), states.len(), "reference indicator length");
        let tangential = states.iter().zip(mask.iter()).map(|(s, &m)| tangential_indicator(s, params, m)).collect();
        Self { normal, tangential, scaling: IndicatorScaling::Constant }
    }

    /// Adaptive variant `i_c / s` of a constant-scaled field.
    pub fn scaled(&self, s: T) -> Self {
        assert!(matches!(self.scaling, IndicatorScaling::Constant), "field is already scaled");
        Self {
            normal: self.normal.iter().map(|&v| v / s).collect(),
            tangential: self.tangential.iter().map(|&v| v / s).collect(),
            scaling: IndicatorScaling::Adaptive(s),
        }
    }

    pub fn len(&self) -> usize {
        self.normal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normal.is_empty()
    }
}
