//! Characteristic scales and the adaptive indicator scale.
//!
//! The adaptive scale is a capped power mean of per-cell magnitude estimates
//! `s^ν = ‖σ̃^ν‖ + ‖c(⟦u⟧^ν − n g^ν)‖` over all fracture cells.

use crate::contact::{gap, vnorm, CellContactState, ContactParameters};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_P_EXPONENT: f64 = 5.0;
pub const DEFAULT_CAP_LOW: f64 = 1e-8;
pub const DEFAULT_CAP_HIGH: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicScales<T> {
    pub u_c: T,
    pub sigma_c: T,
    /// Always `1 / u_c`.
    pub c_num: T,
    pub domain_length: T,
}

/// `σ_c = E u_c / L`, `c = 1 / u_c`.
pub fn characteristic_scales<T: Real>(u_c: T, youngs_modulus: T, domain_length: T) -> Result<CharacteristicScales<T>> {
    for (name, value) in [("u_c", u_c), ("Young's modulus", youngs_modulus), ("domain length", domain_length)] {
        if !(value > T::zero()) || !value.is_finite() {
            return Err(Error::Config(format!("{name} must be positive and finite, got {value}")));
        }
    }
    Ok(CharacteristicScales {
        u_c,
        sigma_c: youngs_modulus * u_c / domain_length,
        c_num: T::one() / u_c,
        domain_length,
    })
}

/// Young's modulus from the Lamé parameters.
pub fn youngs_modulus<T: Real>(lame_lambda: T, shear_modulus: T) -> T {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    shear_modulus * (three * lame_lambda + two * shear_modulus) / (lame_lambda + shear_modulus)
}

/// Per-cell estimate `‖σ̃‖ + ‖c(⟦u⟧ − n g)‖` using full-vector norms.
///
/// The state stores the jump in its local frame (normal and tangential components), so
/// subtracting `n g` only shifts the normal component.
pub fn cell_scale_estimate<T: Real, const N: usize>(state: &CellContactState<T, N>, gap_value: T, c_num: T) -> T {
    let traction = (state.traction_n * state.traction_n + vnorm(&state.traction_t).powi(2)).sqrt();
    let dn = state.jump_n - gap_value;
    let jump = (dn * dn + vnorm(&state.jump_t).powi(2)).sqrt();
    traction + c_num * jump
}

/// `clamp((Σ s_ν^p / N)^{1/p}, low, high)`.
pub fn p_mean_scale<T: Real>(cell_estimates: &[T], p: T, caps: (T, T)) -> Result<T> {
    let raw = p_mean(cell_estimates, p)?;
    Ok(raw.max(caps.0).min(caps.1))
}

/// Unclamped power mean.
pub fn p_mean<T: Real>(values: &[T], p: T) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Config("power mean over an empty set of fracture cells".into()));
    }
    if !(p >= T::one()) {
        return Err(Error::Config(format!("power-mean exponent must be >= 1, got {p}")));
    }
    // Factor out the largest magnitude so that s^p neither overflows nor underflows.
    let peak = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if peak == T::zero() {
        return Ok(T::zero());
    }
    let sum = values.iter().fold(T::zero(), |acc, v| acc + (v.abs() / peak).powf(p));
    let count = T::lit(values.len() as f64);
    Ok(peak * (sum / count).powf(T::one() / p))
}

/// Adaptive indicator scale, frozen for the duration of one line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveScale<T> {
    pub value: T,
    pub p_exponent: T,
    pub cap_low: T,
    pub cap_high: T,
    /// Iterate the value was computed from; `None` for the initial value.
    pub frozen_from_iteration: Option<usize>,
}

impl<T: Real> AdaptiveScale<T> {
    /// Initial scale before any iterate has been evaluated: `s = 1`.
    pub fn initial() -> Self {
        Self {
            value: T::one(),
            p_exponent: T::lit(DEFAULT_P_EXPONENT),
            cap_low: T::lit(DEFAULT_CAP_LOW),
            cap_high: T::lit(DEFAULT_CAP_HIGH),
            frozen_from_iteration: None,
        }
    }

    /// Recomputes the scale from the fracture cells of iterate `iteration`. An empty cell set
    /// leaves the scale unchanged.
    pub fn update<const N: usize>(
        &mut self,
        states: &[CellContactState<T, N>],
        params: &ContactParameters<T>,
        iteration: usize,
    ) -> Result<()> {
        if states.is_empty() {
            return Ok(());
        }
        let estimates: Vec<T> = states.iter().map(|s| cell_scale_estimate(s, gap(s, params), params.c_num)).collect();
        self.value = p_mean_scale(&estimates, self.p_exponent, (self.cap_low, self.cap_high))?;
        self.frozen_from_iteration = Some(iteration);
        Ok(())
    }
}
