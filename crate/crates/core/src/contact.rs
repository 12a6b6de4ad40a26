//! Non-smooth complementarity functions for frictional contact on a single fracture cell.
//!
//! Tractions enter already scaled by the characteristic traction while jumps are in metres. The
//! numerical parameter `c` carries the inverse characteristic displacement. The tangential
//! function follows the primal-dual active set form
//!
//! ```text
//! C∥ = σ∥                                   if b ≤ 0 (open)
//! C∥ = σ∥ max{b, ‖σ∥ + c⟦u̇⟧∥‖} − b (σ∥ + c⟦u̇⟧∥)   otherwise
//! ```
//!
//! With this form a sliding root has the traction pointing along the slip increment.
//!
//! Where a `max` is evaluated exactly at its kink, generalized derivatives take the branch of
//! the second argument.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// State of one fracture cell at a trial point. `N` is the tangential dimension: 2 for
/// fractures in 3D, 1 for fractures in 2D (whose normal then has a zero third component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellContactState<T, const N: usize = 2> {
    pub traction_n: T,
    pub traction_t: [T; N],
    pub jump_n: T,
    pub jump_t: [T; N],
    pub jump_t_prev: [T; N],
    pub normal: [T; 3],
}

impl<T: Real, const N: usize> CellContactState<T, N> {
    pub fn new(
        traction_n: T,
        traction_t: [T; N],
        jump_n: T,
        jump_t: [T; N],
        jump_t_prev: [T; N],
        normal: [T; 3],
    ) -> Result<Self> {
        let length = normal.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        if (length - T::one()).abs() > tol {
            return Err(Error::Input(format!("normal vector has length {length}, expected 1")));
        }
        Ok(Self { traction_n, traction_t, jump_n, jump_t, jump_t_prev, normal })
    }

    /// Cell with zero previous jump and a normal along the last axis.
    pub fn local(traction_n: T, traction_t: [T; N], jump_n: T, jump_t: [T; N]) -> Self {
        Self {
            traction_n,
            traction_t,
            jump_n,
            jump_t,
            jump_t_prev: [T::zero(); N],
            normal: [T::zero(), T::zero(), T::one()],
        }
    }

    /// Tangential jump increment relative to the previous time state.
    pub fn slip_increment(&self) -> [T; N] {
        let mut out = self.jump_t;
        for (o, p) in out.iter_mut().zip(self.jump_t_prev.iter()) {
            *o = *o - *p;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactParameters<T> {
    pub friction_coeff: T,
    /// Dilation angle in radians.
    pub dilation_angle: T,
    /// Numerical parameter `c` (1/m).
    pub c_num: T,
    pub residual_aperture: T,
}

impl<T: Real> ContactParameters<T> {
    pub fn new(friction_coeff: T, dilation_angle: T, c_num: T, residual_aperture: T) -> Result<Self> {
        if !(friction_coeff >= T::zero()) {
            return Err(Error::Config(format!("friction coefficient {friction_coeff} < 0")));
        }
        if !(c_num > T::zero()) {
            return Err(Error::Config(format!("numerical parameter c = {c_num} must be positive")));
        }
        let half_pi = T::lit(std::f64::consts::FRAC_PI_2);
        if !(dilation_angle >= T::zero() && dilation_angle < half_pi) {
            return Err(Error::Config(format!("dilation angle {dilation_angle} outside [0, pi/2)")));
        }
        if !(residual_aperture > T::zero()) {
            return Err(Error::Config(format!("residual aperture {residual_aperture} must be positive")));
        }
        Ok(Self { friction_coeff, dilation_angle, c_num, residual_aperture })
    }

    pub fn with_c_num(self, c_num: T) -> Result<Self> {
        Self::new(self.friction_coeff, self.dilation_angle, c_num, self.residual_aperture)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContactRegime {
    Open,
    Sticking,
    Sliding,
}

/// Cell counts per regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegimeCensus {
    pub open: usize,
    pub sticking: usize,
    pub sliding: usize,
}

impl RegimeCensus {
    pub fn from_states<T: Real, const N: usize>(
        states: &[CellContactState<T, N>],
        params: &ContactParameters<T>,
    ) -> Self {
        let mut census = Self::default();
        for state in states {
            match classify_regime(state, params) {
                ContactRegime::Open => census.open += 1,
                ContactRegime::Sticking => census.sticking += 1,
                ContactRegime::Sliding => census.sliding += 1,
            }
        }
        census
    }

    /// Like [`RegimeCensus::from_states`], but a friction bound within `1e-10` of the largest
    /// bound in the set counts as zero. Converged open cells carry round-off tractions of
    /// either sign, and the exact classification splits them between open and sliding.
    pub fn from_states_tolerant<T: Real, const N: usize>(
        states: &[CellContactState<T, N>],
        params: &ContactParameters<T>,
    ) -> Self {
        let peak = states.iter().fold(T::zero(), |m, s| m.max(friction_bound(s, params).abs()));
        let tol = T::lit(CENSUS_RELATIVE_TOLERANCE) * peak;
        let mut census = Self::default();
        for state in states {
            match classify_regime_with_tolerance(state, params, tol) {
                ContactRegime::Open => census.open += 1,
                ContactRegime::Sticking => census.sticking += 1,
                ContactRegime::Sliding => census.sliding += 1,
            }
        }
        census
    }

    pub fn total(&self) -> usize {
        self.open + self.sticking + self.sliding
    }
}

pub(crate) fn vnorm<T: Real, const N: usize>(v: &[T; N]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// `σ̃∥ + c⟦u̇⟧∥`, the argument of the tangential `max`.
pub fn tangential_argument<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
) -> [T; N] {
    let slip = state.slip_increment();
    let mut z = state.traction_t;
    for (zi, si) in z.iter_mut().zip(slip.iter()) {
        *zi = *zi + params.c_num * *si;
    }
    z
}

/// `b = −F σ̃⊥`.
pub fn friction_bound<T: Real, const N: usize>(state: &CellContactState<T, N>, params: &ContactParameters<T>) -> T {
    -params.friction_coeff * state.traction_n
}

/// Shear-dilation gap `tan(φ) ‖⟦u⟧∥‖`.
pub fn gap<T: Real, const N: usize>(state: &CellContactState<T, N>, params: &ContactParameters<T>) -> T {
    params.dilation_angle.tan() * vnorm(&state.jump_t)
}

/// `C⊥ = −σ̃⊥ − max{0, −σ̃⊥ − c(⟦u⟧⊥ − g)}`.
pub fn normal_complementarity<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
) -> T {
    let g = gap(state, params);
    let active = -state.traction_n - params.c_num * (state.jump_n - g);
    -state.traction_n - active.max(T::zero())
}

pub fn tangential_complementarity<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
) -> [T; N] {
    let b = friction_bound(state, params);
    if b <= T::zero() {
        return state.traction_t;
    }
    let z = tangential_argument(state, params);
    let m = b.max(vnorm(&z));
    let mut out = [T::zero(); N];
    for i in 0..N {
        out[i] = state.traction_t[i] * m - b * z[i];
    }
    out
}

pub fn classify_regime<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
) -> ContactRegime {
    classify_regime_with_tolerance(state, params, T::zero())
}

const CENSUS_RELATIVE_TOLERANCE: f64 = 1e-10;

/// Open when `b ≤ tol`; otherwise sticking or sliding as in [`classify_regime`].
pub fn classify_regime_with_tolerance<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
    tol: T,
) -> ContactRegime {
    let b = friction_bound(state, params);
    if b <= tol {
        ContactRegime::Open
    } else if vnorm(&tangential_argument(state, params)) > b {
        ContactRegime::Sliding
    } else {
        ContactRegime::Sticking
    }
}

/// One element of the generalized Jacobian of `(C⊥, C∥)` for a cell.
///
/// Tangential blocks are indexed `[row][column]` with rows the components of `C∥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactDerivative<T, const N: usize = 2> {
    pub normal_wrt_traction_n: T,
    pub normal_wrt_jump_n: T,
    pub normal_wrt_jump_t: [T; N],
    pub tangential_wrt_traction_n: [T; N],
    pub tangential_wrt_traction_t: [[T; N]; N],
    pub tangential_wrt_jump_t: [[T; N]; N],
}

pub fn contact_generalized_derivative<T: Real, const N: usize>(
    state: &CellContactState<T, N>,
    params: &ContactParameters<T>,
) -> ContactDerivative<T, N> {
    let zero = T::zero();
    let one = T::one();
    let c = params.c_num;

    // Normal function, including the chain rule through the gap.
    let g = gap(state, params);
    let active = -state.traction_n - c * (state.jump_n - g);
    let (normal_wrt_traction_n, normal_wrt_jump_n, normal_wrt_jump_t) = if active >= zero {
        let jt_norm = vnorm(&state.jump_t);
        let mut d_jt = [zero; N];
        if jt_norm > zero {
            let tan_phi = params.dilation_angle.tan();
            for i in 0..N {
                d_jt[i] = -c * tan_phi * state.jump_t[i] / jt_norm;
            }
        }
        (zero, c, d_jt)
    } else {
        (-one, zero, [zero; N])
    };

    let mut d_sn = [zero; N];
    let mut d_st = [[zero; N]; N];
    let mut d_jt = [[zero; N]; N];
    let b = friction_bound(state, params);
    if b <= zero {
        for i in 0..N {
            d_st[i][i] = one;
        }
    } else {
        let f = params.friction_coeff;
        let z = tangential_argument(state, params);
        let z_norm = vnorm(&z);
        if z_norm >= b {
            // Sliding: C = σ‖z‖ − b z.
            for i in 0..N {
                d_sn[i] = f * z[i];
                for j in 0..N {
                    let outer = state.traction_t[i] * z[j] / z_norm;
                    let diag = if i == j { one } else { zero };
                    d_st[i][j] = outer + (z_norm - b) * diag;
                    d_jt[i][j] = c * outer - b * c * diag;
                }
            }
        } else {
            // Sticking: C = −b c ⟦u̇⟧.
            let slip = state.slip_increment();
            for i in 0..N {
                d_sn[i] = f * c * slip[i];
                d_jt[i][i] = -b * c;
            }
        }
    }

    ContactDerivative {
        normal_wrt_traction_n,
        normal_wrt_jump_n,
        normal_wrt_jump_t,
        tangential_wrt_traction_n: d_sn,
        tangential_wrt_traction_t: d_st,
        tangential_wrt_jump_t: d_jt,
    }
}

/// Largest violation of the classical Coulomb contact conditions, in scaled traction units:
/// non-penetration `⟦u⟧⊥ ≥ g`, no tension `σ̃⊥ ≤ 0`, normal complementarity, the friction cone
/// `‖σ̃∥‖ ≤ b`, slip only on the cone boundary and slip along `σ̃∥`.
pub fn coulomb_violation<T: Real, const N: usize>(state: &CellContactState<T, N>, params: &ContactParameters<T>) -> T {
    let zero = T::zero();
    let c = params.c_num;
    let opening = c * (state.jump_n - gap(state, params));
    let mut worst = (-opening).max(zero);
    worst = worst.max(state.traction_n.max(zero));
    worst = worst.max(state.traction_n.abs().min(opening.abs()));

    let b = friction_bound(state, params).max(zero);
    let st_norm = vnorm(&state.traction_t);
    let mut slip = state.slip_increment();
    for s in slip.iter_mut() {
        *s = c * *s;
    }
    let slip_norm = vnorm(&slip);
    worst = worst.max((st_norm - b).max(zero));
    worst = worst.max(slip_norm.min((b - st_norm).abs()));
    if slip_norm > zero {
        // `‖σ̃∥‖ ŝ − σ̃∥` vanishes iff the slip direction `ŝ` is that of the traction.
        let mut misalignment = zero;
        for i in 0..N {
            let r = st_norm * slip[i] / slip_norm - state.traction_t[i];
            misalignment = misalignment + r * r;
        }
        worst = worst.max(misalignment.sqrt().min(slip_norm));
    }
    worst
}
