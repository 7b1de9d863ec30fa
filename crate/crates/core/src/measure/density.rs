//! Absolutely continuous measures.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use statrs::function::erf::erfc;

use super::WindowStats;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_pieces, log_breakpoints, QuadPolicy};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density supplied through the library API.
#[derive(Clone)]
pub struct CustomDensity {
    pub name: String,
    pub pdf: RealFn,
    /// Closed support interval; endpoints may be infinite.
    pub support: (f64, f64),
    /// Location and width of the bulk, used to seed the quadrature partition.
    pub center: f64,
    pub scale: f64,
    /// Optional closed-form CDF, required for tail probabilities on unbounded support.
    pub cdf: Option<RealFn>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum DensityKind {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    Cauchy {
        loc: f64,
        scale: f64,
    },
    /// `1/(1 + C x^a)` for `x ≥ 0`, `1/(1 + D |x|^b)` for `x < 0`, each half carrying mass 1/2.
    PowerTail {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    Custom(CustomDensity),
}

#[derive(Debug, Clone)]
pub struct DensityMeasure {
    kind: DensityKind,
    quad: QuadPolicy,
}

/// Constant `C` such that `∫_0^∞ dx / (1 + C x^a) = 1/2`.
///
/// Uses `∫_0^∞ dx / (1 + C x^a) = C^{-1/a} (π/a) / sin(π/a)`.
pub fn half_mass_constant(a: f64) -> f64 {
    (2.0 * PI / (a * (PI / a).sin())).powf(a)
}

impl DensityMeasure {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
            return Err(Error::Construction(format!(
                "gaussian({mu}, {sigma}): need finite mu and sigma > 0"
            )));
        }
        Ok(Self::from_kind(DensityKind::Gaussian { mu, sigma }))
    }

    pub fn cauchy(loc: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !loc.is_finite() || !scale.is_finite() {
            return Err(Error::Construction(format!(
                "cauchy({loc}, {scale}): need finite loc and scale > 0"
            )));
        }
        Ok(Self::from_kind(DensityKind::Cauchy { loc, scale }))
    }

    /// Two-sided power tail with exponents `a` (right) and `b` (left), both `> 1`.
    pub fn power_tail(a: f64, b: f64) -> Result<Self> {
        if !(a > 1.0 && b > 1.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Construction(format!(
                "power_tail({a}, {b}): exponents must exceed 1 for the density to be normalizable"
            )));
        }
        Ok(Self::from_kind(DensityKind::PowerTail {
            a,
            b,
            c: half_mass_constant(a),
            d: half_mass_constant(b),
        }))
    }

    pub fn custom(density: CustomDensity) -> Result<Self> {
        let (lo, hi) = density.support;
        if !(lo < hi) || !(density.scale > 0.0) {
            return Err(Error::Construction(format!(
                "{}: invalid support or scale",
                density.name
            )));
        }
        Ok(Self::from_kind(DensityKind::Custom(density)))
    }

    fn from_kind(kind: DensityKind) -> Self {
        Self {
            kind,
            quad: QuadPolicy::default(),
        }
    }

    pub fn with_quadrature(mut self, quad: QuadPolicy) -> Self {
        self.quad = quad;
        self
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn quadrature(&self) -> &QuadPolicy {
        &self.quad
    }

    pub fn name(&self) -> String {
        match &self.kind {
            DensityKind::Gaussian { mu, sigma } => format!("gaussian({mu}, {sigma})"),
            DensityKind::Cauchy { loc, scale } => format!("cauchy({loc}, {scale})"),
            DensityKind::PowerTail { a, b, .. } => format!("power_tail({a}, {b})"),
            DensityKind::Custom(c) => c.name.clone(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match &self.kind {
            DensityKind::Gaussian { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
            DensityKind::Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            }
            DensityKind::PowerTail { a, b, c, d } => {
                if x >= 0.0 {
                    1.0 / (1.0 + c * x.powf(*a))
                } else {
                    1.0 / (1.0 + d * (-x).powf(*b))
                }
            }
            DensityKind::Custom(cd) => {
                if x < cd.support.0 || x > cd.support.1 {
                    0.0
                } else {
                    (cd.pdf)(x)
                }
            }
        }
    }

    fn bulk(&self) -> (f64, f64) {
        match &self.kind {
            DensityKind::Gaussian { mu, sigma } => (*mu, *sigma),
            DensityKind::Cauchy { loc, scale } => (*loc, *scale),
            DensityKind::PowerTail { a, b, c, d } => (0.0, c.powf(-1.0 / a).min(d.powf(-1.0 / b))),
            DensityKind::Custom(cd) => (cd.center, cd.scale),
        }
    }

    fn partition(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (center, scale) = self.bulk();
        let mut pts: Vec<f64> = log_breakpoints(lo - center, hi - center, scale)
            .into_iter()
            .map(|x| x + center)
            .collect();
        pts[0] = lo;
        let last = pts.len() - 1;
        pts[last] = hi;
        if let DensityKind::PowerTail { .. } = self.kind {
            // the density has a kink at the origin
            if lo < 0.0 && hi > 0.0 && !pts.contains(&0.0) {
                pts.push(0.0);
            }
        }
        pts.retain(|x| *x >= lo && *x <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn support(&self) -> (f64, f64) {
        match &self.kind {
            DensityKind::Custom(cd) => cd.support,
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `∫_{[lo, hi]} g(x) pdf(x) dx` over a finite window.
    pub(crate) fn expect_window(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        let (s_lo, s_hi) = self.support();
        let (lo, hi) = (lo.max(s_lo), hi.min(s_hi));
        if !(lo < hi) {
            return Ok(0.0);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("{}: quadrature over an unbounded window", self.name())));
        }
        let pts = self.partition(lo, hi);
        Ok(integrate_pieces(|x| g(x) * self.pdf(x), &pts, &self.quad)?.value)
    }

    pub(crate) fn window(&self, lo: f64, hi: f64) -> Result<WindowStats> {
        match &self.kind {
            DensityKind::Gaussian { mu, sigma } => {
                let a = (lo - mu) / sigma;
                let b = (hi - mu) / sigma;
                let mass = normal_interval(a, b);
                let phi = |z: f64| {
                    if z.is_infinite() {
                        0.0
                    } else {
                        (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
                    }
                };
                Ok(WindowStats {
                    mass,
                    first_moment: mu * mass + sigma * (phi(a) - phi(b)),
                })
            }
            DensityKind::Cauchy { loc, scale } => {
                let a = (lo - loc) / scale;
                let b = (hi - loc) / scale;
                let mass = cauchy_interval(a, b);
                let moment = scale / (2.0 * PI) * (log1p_sq(b) - log1p_sq(a));
                Ok(WindowStats {
                    mass,
                    first_moment: loc * mass + moment,
                })
            }
            _ => {
                let mass = if lo.is_finite() && hi.is_finite() {
                    self.expect_window(&|_| 1.0, lo, hi)?
                } else {
                    1.0 - self.prob_below(lo)? - self.prob_above(hi)?
                };
                let first_moment = self.expect_window(&|x| x, lo, hi)?;
                Ok(WindowStats { mass, first_moment })
            }
        }
    }

    /// `P(X > t)`.
    pub(crate) fn prob_above(&self, t: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::Gaussian { mu, sigma } => Ok(0.5 * erfc((t - mu) / (sigma * SQRT_2))),
            DensityKind::Cauchy { loc, scale } => Ok(cauchy_upper((t - loc) / scale)),
            DensityKind::PowerTail { a, b, c, d } => {
                if t >= 0.0 {
                    power_upper_tail(*a, *c, t, &self.quad)
                } else {
                    let inner = 0.5 - power_upper_tail(*b, *d, -t, &self.quad)?;
                    Ok(0.5 + inner)
                }
            }
            DensityKind::Custom(cd) => {
                if let Some(cdf) = &cd.cdf {
                    return Ok(1.0 - cdf(t));
                }
                let hi = cd.support.1;
                if !hi.is_finite() {
                    return Err(invalid(format!("{}: tail probability needs a cdf", cd.name)));
                }
                self.expect_window(&|_| 1.0, t, hi)
            }
        }
    }

    /// `P(X < t)`.
    pub(crate) fn prob_below(&self, t: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::Gaussian { mu, sigma } => Ok(0.5 * erfc(-(t - mu) / (sigma * SQRT_2))),
            DensityKind::Cauchy { loc, scale } => Ok(cauchy_upper(-(t - loc) / scale)),
            DensityKind::PowerTail { a, b, c, d } => {
                if t <= 0.0 {
                    power_upper_tail(*b, *d, -t, &self.quad)
                } else {
                    let inner = 0.5 - power_upper_tail(*a, *c, t, &self.quad)?;
                    Ok(0.5 + inner)
                }
            }
            DensityKind::Custom(cd) => {
                if let Some(cdf) = &cd.cdf {
                    return Ok(cdf(t));
                }
                let lo = cd.support.0;
                if !lo.is_finite() {
                    return Err(invalid(format!("{}: tail probability needs a cdf", cd.name)));
                }
                self.expect_window(&|_| 1.0, lo, t)
            }
        }
    }
}

/// `Φ(b) - Φ(a)` without cancellation in either tail.
fn normal_interval(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let upper = |z: f64| 0.5 * erfc(z / SQRT_2);
    if a >= 0.0 {
        upper(a) - upper(b)
    } else if b <= 0.0 {
        upper(-b) - upper(-a)
    } else {
        1.0 - upper(-a) - upper(b)
    }
}

/// `P(Z > z)` for a standard Cauchy variable.
fn cauchy_upper(z: f64) -> f64 {
    if z > 1.0 {
        (1.0 / z).atan() / PI
    } else {
        0.5 - z.atan() / PI
    }
}

fn cauchy_interval(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a.is_finite() && b.is_finite() && a * b > 0.0 {
        ((b - a) / (1.0 + a * b)).atan() / PI
    } else {
        (b.atan() - a.atan()) / PI
    }
}

/// `ln(1 + x²)` without overflow for large `|x|`.
fn log1p_sq(x: f64) -> f64 {
    let ax = x.abs();
    if ax > 1e8 {
        2.0 * ax.ln() + (1.0 / (ax * ax)).ln_1p()
    } else {
        (x * x).ln_1p()
    }
}

/// `∫_t^∞ dx / (1 + C x^a)` for `t ≥ 0`.
fn power_upper_tail(a: f64, c: f64, t: f64, quad: &QuadPolicy) -> Result<f64> {
    let f = |x: f64| 1.0 / (1.0 + c * x.powf(a));
    // beyond `cut` the integrand is 1/(C x^a) to relative accuracy 1e-16
    let cut = (1e16 / c).powf(1.0 / a).max(t);
    let far = |x: f64| x.powf(1.0 - a) / (c * (a - 1.0));
    if t >= cut {
        return Ok(far(t));
    }
    let scale = c.powf(-1.0 / a);
    let mut pts = vec![t];
    let mut r = scale * 0.1;
    while r < cut {
        if r > t {
            pts.push(r);
        }
        r *= 10.0;
    }
    pts.push(cut);
    let policy = QuadPolicy {
        abs_tol: quad.abs_tol.min(1e-12 * far(t.max(scale))),
        ..*quad
    };
    Ok(integrate_pieces(f, &pts, &policy)?.value + far(cut))
}
