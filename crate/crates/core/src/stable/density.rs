use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, DEFAULT_NODE_BUDGET};
use super::params::StableParams;
use super::series::{leading_coefficient, TailSeries};
use crate::error::{Error, Result};

/// Where the Gaussian (alpha = 2) body hands over to the closed form.
const GAUSS_SPLICE: f64 = 8.0;
const LADDER_RATIO: f64 = 1.12;
/// Hard ceiling on tail/quadrature disagreement at the splice point.
const MAX_SPLICE_DISAGREEMENT: f64 = 1e-2;

/// Accuracy controls for the numerical density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Relative agreement required between quadrature and the tail
    /// expansion before the tail takes over.
    pub splice_rtol: f64,
    /// Absolute agreement floor (quadrature round-off level).
    pub splice_atol: f64,
    /// Upper bound on Gauss-Legendre nodes per kernel.
    pub node_budget: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            splice_rtol: 1e-6,
            splice_atol: 1e-15,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
enum Tail {
    Series(TailSeries),
    Gaussian,
}

/// Density of the standard law (`gamma = 1`, S0 location 0) in the S0
/// coordinate: quadrature in the body, asymptotic tails outside
/// `[left, right]`.
#[derive(Debug, Clone)]
pub struct StandardStable {
    alpha: f64,
    beta: f64,
    /// S1 standard coordinate is `z + zeta`.
    zeta: f64,
    kernel: Kernel,
    tail: Tail,
    left: f64,
    right: f64,
}

impl StandardStable {
    pub fn new(alpha: f64, beta: f64, opts: &QuadratureOptions) -> Result<Self> {
        StableParams::standard(alpha, beta)?;
        if alpha == 2.0 {
            let kernel = Kernel::build(alpha, 0.0, GAUSS_SPLICE, opts.node_budget)?;
            return Ok(Self {
                alpha,
                beta,
                zeta: 0.0,
                kernel,
                tail: Tail::Gaussian,
                left: -GAUSS_SPLICE,
                right: GAUSS_SPLICE,
            });
        }
        let zeta = if alpha == 1.0 {
            0.0
        } else {
            beta * (std::f64::consts::FRAC_PI_2 * alpha).tan()
        };
        let series = TailSeries::new(alpha, beta);
        let mut reach = 16.0_f64.max(4.0 * zeta.abs());
        let mut right: Option<f64> = None;
        let mut left: Option<f64> = None;
        if alpha < 1.0 && beta.abs() == 1.0 {
            // one-sided law: the short tail is exactly zero past the
            // support edge at z = -zeta
            if beta > 0.0 {
                left = Some(-zeta);
            } else {
                right = Some(-zeta);
            }
        }
        let mut best = [(f64::INFINITY, f64::NAN); 2];
        loop {
            let kernel = match Kernel::build(alpha, beta, reach, opts.node_budget) {
                Ok(k) => k,
                Err(e) => {
                    // out of budget: settle for the closest agreement seen
                    let ok = |b: (f64, f64)| b.0 <= MAX_SPLICE_DISAGREEMENT;
                    if (right.is_some() || ok(best[0])) && (left.is_some() || ok(best[1])) {
                        let r = right.unwrap_or(best[0].1);
                        let l = left.unwrap_or(best[1].1);
                        let reach = r.max(-l);
                        let kernel = Kernel::build(alpha, beta, reach, opts.node_budget)?;
                        return Ok(Self {
                            alpha,
                            beta,
                            zeta,
                            kernel,
                            tail: Tail::Series(series),
                            left: l,
                            right: r,
                        });
                    }
                    return Err(e);
                }
            };
            for (side, slot) in [(1.0, &mut right), (-1.0, &mut left)] {
                if slot.is_some() {
                    continue;
                }
                let idx = if side > 0.0 { 0 } else { 1 };
                *slot = scan_side(&kernel, &series, zeta, side, reach, opts, &mut best[idx]);
            }
            if let (Some(r), Some(l)) = (right, left) {
                let need = r.max(-l);
                let kernel = if need < kernel.reach() {
                    Kernel::build(alpha, beta, need, opts.node_budget)?
                } else {
                    kernel
                };
                return Ok(Self {
                    alpha,
                    beta,
                    zeta,
                    kernel,
                    tail: Tail::Series(series),
                    left: l,
                    right: r,
                });
            }
            reach *= 2.0;
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// S0 abscissae where the tails take over.
    pub fn splice_points(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    pub fn node_count(&self) -> usize {
        self.kernel.node_count()
    }

    pub(crate) fn in_body(&self, z: f64) -> bool {
        z >= self.left && z <= self.right
    }

    pub fn pdf(&self, z: f64) -> f64 {
        if self.in_body(z) {
            return self.kernel.pdf(z).max(0.0);
        }
        self.tail_pdf(z)
    }

    pub(crate) fn tail_pdf(&self, z: f64) -> f64 {
        match &self.tail {
            Tail::Gaussian => gauss_pdf(z),
            Tail::Series(s) => s.pdf(z + self.zeta).value.max(0.0),
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if self.in_body(z) {
            return self.kernel.cdf(z).clamp(0.0, 1.0);
        }
        let mass = match &self.tail {
            Tail::Gaussian => 0.5 * statrs::function::erf::erfc(z.abs() / 2.0),
            Tail::Series(s) => s.tail_mass(z + self.zeta).value.clamp(0.0, 1.0),
        };
        if z > 0.0 {
            1.0 - mass
        } else {
            mass
        }
    }

    /// Quantile in the S0 standard coordinate.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("{p} not in (0, 1)")));
        }
        let mut lo = -1.0;
        let mut hi = 1.0;
        while self.cdf(lo) > p {
            lo *= 2.0;
            if lo < -1e300 {
                return Err(Error::Domain("quantile bracket diverged".into()));
            }
        }
        while self.cdf(hi) < p {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Domain("quantile bracket diverged".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

fn gauss_pdf(z: f64) -> f64 {
    (-0.25 * z * z).exp() / (2.0 * PI.sqrt())
}

/// Walks outward on one side until quadrature and tail expansion agree for
/// two consecutive ladder points. Returns the S0 splice abscissa.
fn scan_side(
    kernel: &Kernel,
    series: &TailSeries,
    zeta: f64,
    side: f64,
    reach: f64,
    opts: &QuadratureOptions,
    best: &mut (f64, f64),
) -> Option<f64> {
    // start where the S1 coordinate is safely on this side
    let mut z = (2.0_f64).max(2.0 - side * zeta).max(reach / 64.0);
    let mut streak = 0;
    let mut first = f64::NAN;
    while z <= reach {
        let z0 = side * z;
        let z1 = z0 + zeta;
        if side * z1 > 1.0 {
            let q = kernel.pdf(z0);
            let s = series.pdf(z1);
            let qm = if side > 0.0 {
                1.0 - kernel.cdf(z0)
            } else {
                kernel.cdf(z0)
            };
            let m = series.tail_mass(z1);
            let dp = (q - s.value).abs();
            let dm = (qm - m.value).abs();
            let tol_p = opts.splice_rtol * s.value.abs() + opts.splice_atol;
            let tol_m = opts.splice_rtol * m.value.abs() + opts.splice_atol;
            let ok = dp <= tol_p && dm <= tol_m && s.error <= tol_p && m.error <= tol_m;
            let rel = (dp / s.value.abs().max(1e-300)).max(dm / m.value.abs().max(1e-300));
            if rel < best.0 {
                *best = (rel, z0);
            }
            if ok {
                if streak == 0 {
                    first = z0;
                }
                streak += 1;
                if streak >= 2 {
                    return Some(first);
                }
            } else {
                streak = 0;
            }
        }
        z *= LADDER_RATIO;
    }
    None
}

/// Numerical stable density for a full parameter set.
#[derive(Debug, Clone)]
pub struct StableDensity {
    params: StableParams,
    delta0: f64,
    standard: Arc<StandardStable>,
}

impl StableDensity {
    pub fn new(params: StableParams) -> Result<Self> {
        Self::with_options(params, &QuadratureOptions::default())
    }

    pub fn with_options(params: StableParams, opts: &QuadratureOptions) -> Result<Self> {
        let standard = StandardStable::new(params.alpha(), params.beta(), opts)?;
        Ok(Self::from_standard(params, Arc::new(standard)))
    }

    pub(crate) fn from_standard(params: StableParams, standard: Arc<StandardStable>) -> Self {
        Self {
            delta0: params.s0_location(),
            params,
            standard,
        }
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn standard(&self) -> &Arc<StandardStable> {
        &self.standard
    }

    pub(crate) fn standardize(&self, x: f64) -> f64 {
        (x - self.delta0) / self.params.gamma()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.standard.pdf(self.standardize(x)) / self.params.gamma()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.standard.cdf(self.standardize(x))
    }

    /// Smallest `x` with `cdf(x) >= p`, by bracketing and bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.delta0 + self.params.gamma() * self.standard.quantile(p)?)
    }
}

/// Densities and distribution values on an abscissa grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub xs: Vec<f64>,
    pub pdf_values: Vec<f64>,
    pub cdf_values: Vec<f64>,
}

impl DensityGrid {
    /// Trapezoidal integral of the density over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.pdf_values.windows(2))
            .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
            .sum()
    }

    pub(crate) fn from_fn(
        xs: &[f64],
        pdf: impl Fn(f64) -> f64,
        cdf: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        validate_abscissae(xs)?;
        let pdf_values = xs.iter().map(|&x| pdf(x)).collect();
        let cdf_values = xs.iter().map(|&x| cdf(x)).collect();
        Self::from_values(xs, pdf_values, cdf_values)
    }

    pub(crate) fn from_values(
        xs: &[f64],
        mut pdf_values: Vec<f64>,
        mut cdf_values: Vec<f64>,
    ) -> Result<Self> {
        for f in &mut pdf_values {
            *f = f.max(0.0);
        }
        for c in &mut cdf_values {
            *c = c.clamp(0.0, 1.0);
        }
        // round-off can leave adjacent values a few ulps out of order
        for i in 1..cdf_values.len() {
            if cdf_values[i] < cdf_values[i - 1] {
                cdf_values[i] = cdf_values[i - 1];
            }
        }
        Ok(Self {
            xs: xs.to_vec(),
            pdf_values,
            cdf_values,
        })
    }
}

pub(crate) fn validate_abscissae(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty abscissa list".into()));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("abscissae must be finite".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "abscissae must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Density and distribution function of `params` on `xs`.
pub fn pdf(params: &StableParams, xs: &[f64]) -> Result<DensityGrid> {
    validate_abscissae(xs)?;
    let d = StableDensity::new(*params)?;
    DensityGrid::from_fn(xs, |x| d.pdf(x), |x| d.cdf(x))
}

/// Distribution function at a single abscissa.
pub fn cdf(params: &StableParams, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidInput("abscissa is NaN".into()));
    }
    Ok(StableDensity::new(*params)?.cdf(x))
}

/// Leading power-law tail `K gamma^alpha |x - delta|^(-1-alpha)`, with
/// `K = (1 +/- beta) sin(pi alpha / 2) Gamma(alpha + 1) / pi` on the
/// right/left side.
///
/// Only meaningful far from the body, `|x - delta| >> gamma`.
pub fn tail_density(params: &StableParams, x: f64) -> Result<f64> {
    let alpha = params.alpha();
    if alpha == 2.0 {
        return Err(Error::Domain(
            "the Gaussian law has no power-law tail".into(),
        ));
    }
    let r = x - params.delta();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain("tail law needs |x - delta| > 0".into()));
    }
    let k = leading_coefficient(alpha, params.beta(), r > 0.0);
    Ok(k * params.gamma().powf(alpha) * r.abs().powf(-1.0 - alpha))
}
