//! Fritsch–Carlson monotone piecewise cubic Hermite interpolation.
//!
//! Slopes start from the average of adjacent secants (zero where the secants disagree in sign,
//! i.e. at local extrema of the data) and are then limited so that `(α, β) = (d_k, d_{k+1}) / Δ_k`
//! lies in the disc of radius 3. Every piece is therefore monotone and no piece overshoots its
//! knot values, which is what makes the interpolant safe to root-find and minimise.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T> {
    knots: Vec<T>,
    values: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    pub fn fit(points: &[(T, T)]) -> Result<Self> {
        let knots: Vec<T> = points.iter().map(|p| p.0).collect();
        let values: Vec<T> = points.iter().map(|p| p.1).collect();
        Self::from_samples(knots, values)
    }

    pub fn from_samples(knots: Vec<T>, values: Vec<T>) -> Result<Self> {
        let n = knots.len();
        if n != values.len() {
            return Err(Error::Dimension { expected: n, actual: values.len() });
        }
        if n < 2 {
            return Err(Error::Input(format!("monotone cubic needs at least 2 points, got {n}")));
        }
        if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite interpolation data".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("abscissae must be strictly increasing".into()));
        }

        let secants: Vec<T> = (0..n - 1).map(|k| (values[k + 1] - values[k]) / (knots[k + 1] - knots[k])).collect();

        let half = T::lit(0.5);
        let mut slopes = vec![T::zero(); n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for k in 1..n - 1 {
            let (left, right) = (secants[k - 1], secants[k]);
            slopes[k] = if left * right > T::zero() { half * (left + right) } else { T::zero() };
        }

        let three = T::lit(3.0);
        for k in 0..n - 1 {
            let delta = secants[k];
            if delta == T::zero() {
                slopes[k] = T::zero();
                slopes[k + 1] = T::zero();
                continue;
            }
            let a = slopes[k] / delta;
            let b = slopes[k + 1] / delta;
            let radius = (a * a + b * b).sqrt();
            if radius > three {
                let tau = three / radius;
                slopes[k] = tau * a * delta;
                slopes[k + 1] = tau * b * delta;
            }
        }

        Ok(Self { knots, values, slopes })
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn domain(&self) -> (T, T) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Same interpolant shifted vertically by `offset`. The limited slopes only depend on
    /// differences of values, so they carry over unchanged.
    pub fn shifted(&self, offset: T) -> Self {
        Self {
            knots: self.knots.clone(),
            values: self.values.iter().map(|&v| v + offset).collect(),
            slopes: self.slopes.clone(),
        }
    }

    fn piece(&self, x: T) -> usize {
        let last = self.knots.len() - 2;
        self.knots.partition_point(|&k| k <= x).saturating_sub(1).min(last)
    }

    fn eval_piece(&self, j: usize, x: T) -> T {
        let h = self.knots[j + 1] - self.knots[j];
        let t = (x - self.knots[j]) / h;
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s = one - t;
        let h00 = (one + two * t) * s * s;
        let h10 = t * s * s;
        let h01 = t * t * (three - two * t);
        let h11 = t * t * (t - one);
        h00 * self.values[j] + h10 * h * self.slopes[j] + h01 * self.values[j + 1] + h11 * h * self.slopes[j + 1]
    }

    fn derivative_piece(&self, j: usize, x: T) -> T {
        let h = self.knots[j + 1] - self.knots[j];
        let t = (x - self.knots[j]) / h;
        let (one, two, three, four, six) = (T::one(), T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
        (six * t * t - six * t) * (self.values[j] - self.values[j + 1]) / h
            + (three * t * t - four * t + one) * self.slopes[j]
            + (three * t * t - two * t) * self.slopes[j + 1]
    }

    /// Value at `x`; arguments outside the knot range are clamped to it.
    pub fn evaluate(&self, x: T) -> T {
        let (lo, hi) = self.domain();
        let x = x.max(lo).min(hi);
        self.eval_piece(self.piece(x), x)
    }

    pub fn derivative(&self, x: T) -> T {
        let (lo, hi) = self.domain();
        let x = x.max(lo).min(hi);
        self.derivative_piece(self.piece(x), x)
    }

    fn value_scale(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Smallest root inside `bracket` (intersected with the knot range), or `None` when the
    /// interpolant has no sign change there.
    pub fn find_root(&self, bracket: (T, T)) -> Option<T> {
        let (dlo, dhi) = self.domain();
        let lo = bracket.0.max(dlo);
        let hi = bracket.1.min(dhi);
        if !(lo <= hi) {
            return None;
        }
        let eps = T::epsilon() * T::lit(8.0);
        let x_tol = T::lit(1e-12).max(eps);
        let f_tol = T::lit(1e-12).max(eps) * (T::one() + self.value_scale());

        let first = self.piece(lo);
        let last = self.piece(hi);
        for j in first..=last {
            let a = lo.max(self.knots[j]);
            let b = hi.min(self.knots[j + 1]);
            let fa = self.eval_piece(j, a);
            if fa == T::zero() {
                return Some(a);
            }
            let fb = self.eval_piece(j, b);
            if fb == T::zero() {
                return Some(b);
            }
            if (fa < T::zero()) != (fb < T::zero()) {
                return Some(self.solve_piece(j, (a, fa), (b, fb), x_tol, f_tol));
            }
        }
        None
    }

    /// Safeguarded Newton iteration on a bracketed, monotone piece.
    fn solve_piece(&self, j: usize, left: (T, T), right: (T, T), x_tol: T, f_tol: T) -> T {
        let (mut a, fa) = left;
        let (mut b, _) = right;
        let negative_at_a = fa < T::zero();
        let half = T::lit(0.5);
        let mut x = a - fa * (b - a) / (right.1 - fa);
        for _ in 0..200 {
            if !(x > a && x < b) {
                x = half * (a + b);
            }
            let fx = self.eval_piece(j, x);
            if fx.abs() <= f_tol {
                return x;
            }
            if (fx < T::zero()) == negative_at_a {
                a = x;
            } else {
                b = x;
            }
            if b - a <= x_tol {
                return half * (a + b);
            }
            let dfx = self.derivative_piece(j, x);
            x = if dfx != T::zero() { x - fx / dfx } else { half * (a + b) };
        }
        half * (a + b)
    }

    /// Global minimiser over `interval` (intersected with the knot range). Candidates are the
    /// piece boundaries clipped to it plus interior critical points; ties go to the leftmost.
    pub fn find_minimum(&self, interval: (T, T)) -> (T, T) {
        let (dlo, dhi) = self.domain();
        let lo = interval.0.max(dlo).min(dhi);
        let hi = interval.1.min(dhi).max(lo);
        let mut best = (lo, self.evaluate(lo));
        let mut consider = |x: T, v: T| {
            if v < best.1 {
                best = (x, v);
            }
        };
        let first = self.piece(lo);
        let last = self.piece(hi);
        for j in first..=last {
            let a = lo.max(self.knots[j]);
            let b = hi.min(self.knots[j + 1]);
            consider(a, self.eval_piece(j, a));
            let mut roots = self.critical_points(j);
            roots.sort_by(|x, y| x.partial_cmp(y).expect("finite critical points"));
            for x in roots {
                if x > a && x < b {
                    consider(x, self.eval_piece(j, x));
                }
            }
            consider(b, self.eval_piece(j, b));
        }
        best
    }

    /// Zeros of the derivative strictly inside piece `j`.
    fn critical_points(&self, j: usize) -> Vec<T> {
        let h = self.knots[j + 1] - self.knots[j];
        let (y0, y1) = (self.values[j], self.values[j + 1]);
        let (d0, d1) = (h * self.slopes[j], h * self.slopes[j + 1]);
        let (two, three, four, six) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
        // d/dt of the Hermite form: a t² + b t + c.
        let a = six * (y0 - y1) + three * (d0 + d1);
        let b = six * (y1 - y0) - four * d0 - two * d1;
        let c = d0;
        let mut ts = Vec::with_capacity(2);
        if a == T::zero() {
            if b != T::zero() {
                ts.push(-c / b);
            }
        } else {
            let disc = b * b - four * a * c;
            if disc >= T::zero() {
                let q = -(b + b.signum() * disc.sqrt()) / two;
                if q != T::zero() {
                    ts.push(q / a);
                    ts.push(c / q);
                } else {
                    ts.push(T::zero());
                }
            }
        }
        ts.into_iter()
            .filter(|t| t.is_finite() && *t > T::zero() && *t < T::one())
            .map(|t| self.knots[j] + t * h)
            .collect()
    }
}

/// `count` equispaced points on `[lo, hi]`, endpoints included.
pub fn equispaced<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let step = (hi - lo) / T::lit((count - 1) as f64);
            (0..count).map(|j| if j + 1 == count { hi } else { lo + step * T::lit(j as f64) }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(spline: &MonotoneCubic<f64>, count: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = spline.domain();
        equispaced(lo, hi, count).into_iter().map(|x| (x, spline.evaluate(x))).collect()
    }

    #[test]
    fn reproduces_linear_data() {
        let s = MonotoneCubic::<f64>::fit(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(s.evaluate(0.5), 0.5);
        for (x, v) in dense(&s, 101) {
            assert!((v - x).abs() < 1e-15);
        }
    }

    #[test]
    fn no_overshoot_at_local_maximum() {
        let s = MonotoneCubic::<f64>::fit(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        assert_eq!(s.evaluate(1.0), 1.0);
        assert_eq!(s.slopes()[1], 0.0);
        assert!(dense(&s, 10_001).iter().all(|&(_, v)| v <= 1.0));
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let s = MonotoneCubic::<f64>::fit(&[(0.0, 0.0), (1.0, 2.0), (2.0, 2.1), (3.0, 10.0)]).unwrap();
        let samples = dense(&s, 10_000);
        assert!(samples.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12));
    }

    #[test]
    fn rejects_bad_abscissae() {
        assert!(MonotoneCubic::<f64>::fit(&[(0.0, 1.0)]).is_err());
        assert!(MonotoneCubic::<f64>::fit(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(MonotoneCubic::<f64>::fit(&[(1.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(MonotoneCubic::<f64>::fit(&[(0.0, f64::NAN), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn root_examples() {
        let linear = MonotoneCubic::<f64>::fit(&[(0.0, 0.8), (1.0, -0.2)]).unwrap();
        assert!((linear.find_root((0.0, 1.0)).unwrap() - 0.8).abs() < 1e-14);
        let positive = MonotoneCubic::<f64>::fit(&[(0.0, 1.0), (0.5, 2.0), (1.0, 0.5)]).unwrap();
        assert_eq!(positive.find_root((0.0, 1.0)), None);
        let s = MonotoneCubic::<f64>::fit(&[(0.0, 1.0), (0.5, 0.5), (1.0, -1.0)]).unwrap();
        let r = s.find_root((0.0, 1.0)).unwrap();
        assert!(r > 0.5 && r < 1.0);
        assert!(s.evaluate(r).abs() < 1e-12);
    }

    #[test]
    fn smallest_root_is_returned() {
        let s = MonotoneCubic::<f64>::fit(&[(0.0, 1.0), (0.25, -1.0), (0.5, 1.0), (0.75, -1.0)]).unwrap();
        let r = s.find_root((0.0, 0.75)).unwrap();
        assert!(r < 0.25, "{r}");
        // Root search restricted to a sub-bracket.
        let r2 = s.find_root((0.3, 0.75)).unwrap();
        assert!(r2 > 0.3 && r2 < 0.5);
    }

    #[test]
    fn minimum_examples() {
        let decreasing = MonotoneCubic::<f64>::fit(&[(0.0, 3.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(decreasing.find_minimum((0.0, 1.0)), (1.0, 0.0));
        let valley = MonotoneCubic::<f64>::fit(&[(0.0, 1.0), (0.5, 0.1), (1.0, 1.0)]).unwrap();
        let (x, v) = valley.find_minimum((0.0, 1.0));
        assert!(x > 0.0 && x < 1.0 && v <= 0.1);
        let sampled = dense(&valley, 10_001).into_iter().fold(f64::INFINITY, |m, p| m.min(p.1));
        assert!(v <= sampled + 1e-15);
        let flat = MonotoneCubic::<f64>::fit(&[(0.0, 2.0), (0.5, 2.0), (1.0, 2.0)]).unwrap();
        assert_eq!(flat.find_minimum((0.0, 1.0)), (0.0, 2.0));
    }

    #[test]
    fn shifted_spline_keeps_slopes() {
        let s = MonotoneCubic::<f64>::fit(&[(0.0, 0.5), (0.5, 0.1), (1.0, -0.4)]).unwrap();
        let t = s.shifted(0.3);
        assert_eq!(s.slopes(), t.slopes());
        assert!((t.evaluate(0.37) - s.evaluate(0.37) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn f32_interpolant() {
        let s = MonotoneCubic::fit(&[(0.0_f32, 0.5), (0.5, 0.0), (1.0, -0.5)]).unwrap();
        let r = s.find_root((0.0, 1.0)).unwrap();
        assert!((r - 0.5).abs() < 1e-6);
    }

    #[test]
    fn equispaced_grid() {
        assert_eq!(equispaced(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(equispaced(0.2, 1.0, 1), vec![1.0]);
    }

    fn monotone_data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..12).prop_flat_map(|n| {
            (
                proptest::collection::vec(0.01..1.0_f64, n),
                proptest::collection::vec(0.0..5.0_f64, n),
                -10.0..10.0_f64,
                prop::bool::ANY,
            )
                .prop_map(|(dx, dy, y0, increasing)| {
                    let mut xs = Vec::with_capacity(dx.len());
                    let mut ys = Vec::with_capacity(dx.len());
                    let (mut x, mut y) = (0.0, y0);
                    for (a, b) in dx.iter().zip(dy.iter()) {
                        xs.push(x);
                        ys.push(y);
                        x += a;
                        y += if increasing { *b } else { -*b };
                    }
                    (xs, ys)
                })
        })
    }

    proptest! {
        #[test]
        fn interpolates_knots_and_preserves_monotonicity((xs, ys) in monotone_data()) {
            let s = MonotoneCubic::from_samples(xs.clone(), ys.clone()).unwrap();
            for (x, y) in xs.iter().zip(ys.iter()) {
                prop_assert!((s.evaluate(*x) - y).abs() <= 1e-14 * (1.0 + y.abs()));
            }
            let increasing = ys[ys.len() - 1] >= ys[0];
            let samples = dense(&s, 2_000);
            for w in samples.windows(2) {
                let step = w[1].1 - w[0].1;
                let ok = if increasing { step >= -1e-12 } else { step <= 1e-12 };
                prop_assert!(ok, "monotonicity violated by {}", step);
            }
        }

        #[test]
        fn roots_evaluate_to_zero(ys in proptest::collection::vec(-1.0..1.0_f64, 2..9)) {
            let xs = equispaced(0.0, 1.0, ys.len());
            let s = MonotoneCubic::from_samples(xs, ys.clone()).unwrap();
            if let Some(r) = s.find_root((0.0, 1.0)) {
                prop_assert!(s.evaluate(r).abs() < 1e-11);
                // No earlier sign change among dense samples.
                let f0 = s.evaluate(0.0);
                for (x, v) in dense(&s, 500) {
                    if x < r - 1e-9 {
                        prop_assert!(v * f0 > 0.0 || f0 == 0.0);
                    }
                }
            } else {
                let f0 = s.evaluate(0.0);
                prop_assert!(dense(&s, 500).iter().all(|p| p.1 * f0 > 0.0));
            }
        }

        #[test]
        fn minimum_never_exceeds_samples(ys in proptest::collection::vec(-1.0..1.0_f64, 2..9)) {
            let xs = equispaced(0.0, 1.0, ys.len());
            let s = MonotoneCubic::from_samples(xs, ys).unwrap();
            let (_, v) = s.find_minimum((0.0, 1.0));
            let sampled = dense(&s, 1_000).into_iter().fold(f64::INFINITY, |m, p| m.min(p.1));
            prop_assert!(v <= sampled + 1e-15);
        }
    }
}
