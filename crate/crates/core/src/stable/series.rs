//! Power-law asymptotic expansion of the standard S1 density.
//!
//! For `x -> +inf`,
//! `f(x) ~ (1/pi) sum_k (-1)^(k+1) S^(k a) Gamma(k a + 1) / k! sin(k a (theta0 + pi/2)) x^(-k a - 1)`
//! where `S^a = sqrt(1 + (b tan(pi a / 2))^2)` and `a theta0 = atan(b tan(pi a / 2))`.
//! The leading term is the `|x|^(-1-alpha)` tail law. For `alpha > 1` the
//! series is only asymptotic, so it is truncated at its smallest term.

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::ln_gamma;

const MAX_TERMS: usize = 40;

#[derive(Debug, Clone)]
pub(crate) struct TailSeries {
    alpha: f64,
    right: Vec<f64>,
    left: Vec<f64>,
    // coefficient magnitudes without the oscillating sine factor; decides
    // where the asymptotic expansion starts to diverge
    envelope: Vec<f64>,
}

/// Truncated expansion with the magnitude of the last retained term as an
/// error proxy.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesValue {
    pub value: f64,
    pub error: f64,
}

impl TailSeries {
    /// `alpha` in `(0, 2)`. At `alpha = 1` only the symmetric case has a
    /// pure power expansion; skewed Cauchy-type laws keep the leading term.
    pub fn new(alpha: f64, beta: f64) -> Self {
        debug_assert!(alpha > 0.0 && alpha < 2.0);
        if alpha == 1.0 && beta != 0.0 {
            return Self {
                alpha,
                right: vec![(1.0 + beta) / PI],
                left: vec![(1.0 - beta) / PI],
                envelope: vec![1.0 / PI],
            };
        }
        let (right, envelope) = coefficients(alpha, beta);
        Self {
            alpha,
            right,
            left: coefficients(alpha, -beta).0,
            envelope,
        }
    }

    #[cfg(test)]
    /// Leading coefficient `K` of `f(x) ~ K |x|^(-1-alpha)` on one side.
    pub fn leading(&self, right: bool) -> f64 {
        if right {
            self.right[0]
        } else {
            self.left[0]
        }
    }

    /// Density at the S1 standard coordinate `z1` (`|z1|` large).
    pub fn pdf(&self, z1: f64) -> SeriesValue {
        let x = z1.abs();
        self.sum(self.coeffs(z1), x, |_, c, xp| c * xp / x)
    }

    /// Mass beyond `z1` on its own side: `P(Z > z1)` for `z1 > 0`,
    /// `P(Z < z1)` for `z1 < 0`.
    pub fn tail_mass(&self, z1: f64) -> SeriesValue {
        let alpha = self.alpha;
        self.sum(self.coeffs(z1), z1.abs(), |k, c, xp| {
            c * xp / (k as f64 * alpha)
        })
    }

    fn coeffs(&self, z1: f64) -> &[f64] {
        if z1 >= 0.0 {
            &self.right
        } else {
            &self.left
        }
    }

    fn sum(&self, coeffs: &[f64], x: f64, term: impl Fn(usize, f64, f64) -> f64) -> SeriesValue {
        if !(x > 0.0) {
            return SeriesValue {
                value: f64::NAN,
                error: f64::INFINITY,
            };
        }
        let step = x.powf(-self.alpha);
        let mut xp = 1.0;
        let mut sum = 0.0;
        let mut last = f64::INFINITY;
        let mut err = 0.0;
        for (i, (&c, &e)) in coeffs.iter().zip(&self.envelope).enumerate() {
            xp *= step;
            let mag = term(i + 1, e, xp).abs();
            if mag > last {
                // past the smallest term; the expansion diverges from here
                return SeriesValue {
                    value: sum,
                    error: last,
                };
            }
            sum += term(i + 1, c, xp);
            err = mag;
            last = mag;
            if mag <= 1e-17 * sum.abs() {
                break;
            }
        }
        SeriesValue {
            value: sum,
            error: err,
        }
    }
}

fn coefficients(alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let zeta = if alpha == 1.0 {
        0.0
    } else {
        beta * (FRAC_PI_2 * alpha).tan()
    };
    let alpha_theta = zeta.atan();
    // ln S^alpha
    let ln_s_alpha = 0.5 * zeta.mul_add(zeta, 1.0).ln();
    let phase = alpha_theta + FRAC_PI_2 * alpha;
    (1..=MAX_TERMS)
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let log_mag = kf * ln_s_alpha + ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0);
            let env = log_mag.exp() / PI;
            let mut sine = (kf * phase).sin();
            if sine.abs() < 1e-13 * kf {
                // exact zeros of sin(k pi) etc. lost to rounding in `phase`
                sine = 0.0;
            }
            (sign * env * sine, env)
        })
        .unzip()
}

/// Leading power-law coefficient `K` for `f(x) ~ K |x|^(-1-alpha)`.
pub(crate) fn leading_coefficient(alpha: f64, beta: f64, right: bool) -> f64 {
    let b = if right { beta } else { -beta };
    if alpha == 1.0 {
        (1.0 + b) / PI
    } else {
        (1.0 + b) * (FRAC_PI_2 * alpha).sin() * ln_gamma(alpha + 1.0).exp() / PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_term_matches_closed_form_constant() {
        for &(a, b) in &[(1.5, 0.0), (1.2, 0.5), (0.7, -0.3), (1.9, 1.0)] {
            let s = TailSeries::new(a, b);
            let k = leading_coefficient(a, b, true);
            assert!(
                (s.leading(true) - k).abs() < 1e-12 * k.abs().max(1e-300),
                "{a} {b}"
            );
            let kl = leading_coefficient(a, b, false);
            assert!((s.leading(false) - kl).abs() < 1e-12 * kl.abs().max(1e-300));
        }
    }

    #[test]
    fn cauchy_expansion() {
        let s = TailSeries::new(1.0, 0.0);
        for x in [5.0, 20.0, -7.0] {
            let exact = 1.0 / (PI * (1.0 + x * x));
            let v = s.pdf(x);
            assert!((v.value - exact).abs() < 1e-12 * exact, "{x}");
            let mass = 0.5 - (x as f64).abs().atan() / PI;
            let m = s.tail_mass(x);
            assert!((m.value - mass).abs() < 1e-12 * mass);
        }
    }

    #[test]
    fn totally_skewed_left_tail_vanishes() {
        let s = TailSeries::new(1.5, 1.0);
        assert_eq!(s.leading(false), 0.0);
        assert!(s.leading(true) > 0.0);
    }
}
