use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(alpha, beta, gamma, delta)` of a stable law in the
/// Samorodnitsky-Taqqu (S1) parameterization.
///
/// `delta` is the location; for `alpha > 1` it equals the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl TryFrom<RawParams> for StableParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        StableParams::new(r.alpha, r.beta, r.gamma, r.delta)
    }
}

impl From<StableParams> for RawParams {
    fn from(p: StableParams) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
        }
    }
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::param("alpha", format!("{alpha} not in (0, 2]")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::param("beta", format!("{beta} not in [-1, 1]")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", format!("{gamma} must be positive")));
        }
        if !delta.is_finite() {
            return Err(Error::param("delta", format!("{delta} must be finite")));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Unit-scale, zero-location law.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta == 0.0
    }

    /// Location in Nolan's continuous S0 parameterization, in which the
    /// density is jointly continuous in all four parameters.
    pub fn s0_location(&self) -> f64 {
        self.delta + s0_shift(self.alpha, self.beta, self.gamma)
    }

    /// Builds S1 parameters from an S0 location.
    pub fn from_s0(alpha: f64, beta: f64, gamma: f64, delta0: f64) -> Result<Self> {
        let shift = if alpha > 0.0 && gamma > 0.0 {
            s0_shift(alpha, beta, gamma)
        } else {
            0.0
        };
        Self::new(alpha, beta, gamma, delta0 - shift)
    }

    /// The same law after the affine map `x -> a x + b` with `a > 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::param("a", "affine slope must be positive"));
        }
        // S1 locations transform linearly except at alpha = 1, where the
        // scale enters the location through the log term.
        let extra = if self.alpha == 1.0 {
            -FRAC_2_PI * self.beta * self.gamma * a * a.ln()
        } else {
            0.0
        };
        Self::new(
            self.alpha,
            self.beta,
            self.gamma * a,
            a * self.delta + b + extra,
        )
    }
}

/// `delta0 - delta1` for the S0/S1 conversion.
pub(crate) fn s0_shift(alpha: f64, beta: f64, gamma: f64) -> f64 {
    if alpha == 1.0 {
        FRAC_2_PI * beta * gamma * gamma.ln()
    } else {
        beta * gamma * (FRAC_PI_2 * alpha).tan()
    }
}

/// Characteristic function `E[exp(i t X)]` of the S1 law.
///
/// The location enters as a separate `i delta t` term in the exponent.
pub fn char_fn(params: &StableParams, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::param("t", "frequency must be finite"));
    }
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let StableParams {
        alpha,
        beta,
        gamma,
        delta,
    } = *params;
    let at = t.abs();
    let sign = t.signum();
    let exponent = if alpha == 1.0 {
        let modulus = gamma * at;
        Complex64::new(-modulus, -modulus * beta * FRAC_2_PI * sign * at.ln())
    } else {
        let modulus = (gamma * at).powf(alpha);
        let skew = if alpha == 2.0 {
            0.0
        } else {
            beta * (FRAC_PI_2 * alpha).tan()
        };
        Complex64::new(-modulus, modulus * skew * sign)
    };
    Ok((exponent + Complex64::new(0.0, delta * t)).exp())
}
