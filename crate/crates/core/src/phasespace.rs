//! Positive-part phase-space integrals `∫(λ − C·T(k) − W(y))₊` and the
//! one-dimensional reductions used to extract their leading terms.

use crate::potential::PotentialSpec;
use crate::quad::{self, Tolerance};
use crate::{Error, Result};

/// Sliver `[0, y₀]` on which the reduced integrand stays in the `y` variable.
const ORIGIN_SLIVER: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceQuery {
    pub lambda: f64,
    pub c: f64,
    pub spec: PotentialSpec,
}

impl PhaseSpaceQuery {
    pub fn new(spec: PotentialSpec, lambda: f64, c: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("C must be positive, got {c}")));
        }
        Ok(Self { lambda, c, spec })
    }

    /// Whether the integration region is nonempty.
    pub fn is_nonempty(&self) -> bool {
        self.c < self.lambda - self.spec.at_origin()
    }
}

/// `coefficient · λ^lambda_exponent · (log λ)^log_exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTerm {
    pub coefficient: f64,
    pub lambda_exponent: f64,
    pub log_exponent: f64,
}

impl LeadingTerm {
    /// Leading term of the Riesz mean.
    pub fn for_spec(spec: &PotentialSpec) -> Self {
        let (p, beta) = (spec.p(), spec.beta());
        if beta == 0.0 {
            Self {
                coefficient: 4.0 * p / (p + 1.0),
                lambda_exponent: 1.0 + 1.0 / p,
                log_exponent: 1.0,
            }
        } else {
            Self {
                coefficient: 4.0,
                lambda_exponent: 1.0,
                log_exponent: 1.0 + 1.0 / beta,
            }
        }
    }

    /// Leading term of the counting function `N(λ)`, the λ-derivative of
    /// [`LeadingTerm::for_spec`] at top order.
    pub fn counting(spec: &PotentialSpec) -> Self {
        let (p, beta) = (spec.p(), spec.beta());
        if beta == 0.0 {
            Self {
                coefficient: 4.0,
                lambda_exponent: 1.0 / p,
                log_exponent: 1.0,
            }
        } else {
            Self {
                coefficient: 4.0,
                lambda_exponent: 0.0,
                log_exponent: 1.0 + 1.0 / beta,
            }
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.coefficient * lambda.powf(self.lambda_exponent) * lambda.ln().powf(self.log_exponent)
    }
}

pub fn leading_term(spec: &PotentialSpec, lambda: f64) -> f64 {
    LeadingTerm::for_spec(spec).eval(lambda)
}

fn inner_tolerance() -> Tolerance {
    Tolerance::new(1e-14, 1e-12)
}

/// `∫_{y≥0} (E − W(y))₊ dy`, with the part above the sliver rewritten in
/// `v = W(y)`: `∫_L^E (E − v)/W′(W⁻¹(v)) dv`.
fn energy_slice(spec: &PotentialSpec, e: f64) -> Result<f64> {
    let w0 = spec.at_origin();
    if e <= w0 {
        return Ok(0.0);
    }
    let cut = spec.value(ORIGIN_SLIVER);
    let y_top = if e <= cut {
        spec.inverse(e)?
    } else {
        ORIGIN_SLIVER
    };
    let near = quad::quad(|y| e - spec.value(y), 0.0, y_top, inner_tolerance())?;
    if e <= cut {
        return Ok(near);
    }
    let far = quad::quad(
        |v| {
            let y = spec.inverse(v).unwrap_or(f64::NAN);
            (e - v) / spec.derivative(y).unwrap_or(f64::NAN)
        },
        cut,
        e,
        inner_tolerance(),
    )?;
    Ok(near + far)
}

/// Quadrant-folded integral
/// `4∫_C^{λ−W(0)} (1/u) ∫_{W(0)}^{λ−u} (λ−u−v)/W′(W⁻¹(v)) dv du`,
/// i.e. `4∫_{k,y≥0}(λ − Ce^k − W(y))₊`.
pub fn quadrant_integral(q: &PhaseSpaceQuery) -> Result<f64> {
    if !q.is_nonempty() {
        return Ok(0.0);
    }
    let top = q.lambda - q.spec.at_origin();
    let kink = q.lambda - q.spec.value(ORIGIN_SLIVER);
    let mut breaks = vec![q.c];
    if kink > q.c && kink < top {
        breaks.push(kink);
    }
    breaks.push(top);
    let v = quad::quad_breaks(
        |u| energy_slice(&q.spec, q.lambda - u).unwrap_or(f64::NAN) / u,
        &breaks,
        Tolerance::default(),
    )?;
    Ok(4.0 * v)
}

/// `∫_{ℝ²}(λ − C cosh k − W(y))₊ dk dy` as four times the first quadrant.
pub fn cosh_integral(q: &PhaseSpaceQuery) -> Result<f64> {
    if !q.is_nonempty() {
        return Ok(0.0);
    }
    let k_max = ((q.lambda - q.spec.at_origin()) / q.c).acosh();
    let v = quad::quad(
        |k| energy_slice(&q.spec, q.lambda - q.c * k.cosh()).unwrap_or(f64::NAN),
        0.0,
        k_max,
        Tolerance::default(),
    )?;
    Ok(4.0 * v)
}

/// `∫_ℝ (λ − C cosh k)₊ dk`, the kinetic part alone.
pub fn cosh_integral_1d(lambda: f64, c: f64) -> Result<f64> {
    if lambda <= c {
        return Ok(0.0);
    }
    let k_max = (lambda / c).acosh();
    Ok(2.0 * quad::quad(|k| lambda - c * k.cosh(), 0.0, k_max, Tolerance::default())?)
}

/// `∫_lo^1 u (1−u)^{1/p−1} log u du`. Near `u = 1` the substitution
/// `w = (1−u)^{1/p}` removes the endpoint singularity.
fn weighted_log_integral(p: f64, lo: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-15, 1e-13);
    let split = lo.max(0.5);
    let head = if lo < split {
        quad::quad(
            |u: f64| {
                if u > 0.0 {
                    u * (1.0 - u).powf(1.0 / p - 1.0) * u.ln()
                } else {
                    0.0
                }
            },
            lo,
            split,
            tol,
        )?
    } else {
        0.0
    };
    let w_top = (1.0 - split).powf(1.0 / p);
    let tail = quad::quad(
        |w: f64| {
            let wp = w.powf(p);
            p * (1.0 - wp) * (-wp).ln_1p()
        },
        0.0,
        w_top,
        tol,
    )?;
    Ok(head + tail)
}

/// `∫₀¹ u(1−u)^{1/p−1} log u du`.
pub fn tail_integral(p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("tail integral needs p > 0, got {p}")));
    }
    weighted_log_integral(p, 0.0)
}

/// Residual of the integration by parts
/// `∫_{C/λ}^1 (1−u)^{1/p}(p+u)/u du = log(λ/C)(1−C/λ)^{1/p}(p+C/λ) + ((p+1)/p)∫_{C/λ}^1 u(1−u)^{1/p−1} log u du`.
pub fn ibp_residual_power(lambda: f64, c: f64, p: f64) -> Result<f64> {
    let (lhs, rhs) = ibp_sides_power(lambda, c, p)?;
    Ok((lhs - rhs).abs())
}

/// Both sides of the identity checked by [`ibp_residual_power`].
pub fn ibp_sides_power(lambda: f64, c: f64, p: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < lambda) || !(p > 0.0) {
        return Err(Error::Domain(
            "ibp_residual_power needs 0 < C < λ and p > 0".into(),
        ));
    }
    let lo = c / lambda;
    let lhs = quad::quad(
        |u: f64| (1.0 - u).powf(1.0 / p) * (p + u) / u,
        lo,
        1.0,
        Tolerance::new(1e-15, 1e-13),
    )?;
    let rhs = (lambda / c).ln() * (1.0 - lo).powf(1.0 / p) * (p + lo)
        + (p + 1.0) / p * weighted_log_integral(p, lo)?;
    Ok((lhs, rhs))
}

/// Residual of the integration by parts in `v` for `(log v)^r`:
/// `∫∫ (log v)^r/u = ∫[v(log v)^r/u]_{v=L}^{λ−u} du − r∫∫ (log v)^{r−1}/u`,
/// over `C ≤ u ≤ λ−L`, `L ≤ v ≤ λ−u`.
pub fn ibp_residual_exp(lambda: f64, c: f64, l_cut: f64, r: f64) -> Result<f64> {
    let (lhs, rhs) = ibp_sides_exp(lambda, c, l_cut, r)?;
    Ok((lhs - rhs).abs())
}

/// Both sides of the identity checked by [`ibp_residual_exp`].
pub fn ibp_sides_exp(lambda: f64, c: f64, l_cut: f64, r: f64) -> Result<(f64, f64)> {
    if !(l_cut > 1.0 && c > 0.0 && c < lambda - l_cut && r > 0.0) {
        return Err(Error::Domain(
            "ibp_residual_exp needs 1 < L, 0 < C < λ − L and r > 0".into(),
        ));
    }
    let inner = |u: f64, power: f64| -> f64 {
        quad::quad(
            |v: f64| v.ln().powf(power),
            l_cut,
            lambda - u,
            inner_tolerance(),
        )
        .unwrap_or(f64::NAN)
            / u
    };
    let tol = Tolerance::new(1e-14, 1e-12);
    let lhs = quad::quad(|u| inner(u, r), c, lambda - l_cut, tol)?;
    let boundary = quad::quad(
        |u: f64| {
            let top = lambda - u;
            (top * top.ln().powf(r) - l_cut * l_cut.ln().powf(r)) / u
        },
        c,
        lambda - l_cut,
        tol,
    )?;
    let correction = quad::quad(|u| inner(u, r - 1.0), c, lambda - l_cut, tol)?;
    let rhs = boundary - r * correction;
    Ok((lhs, rhs))
}

/// Magnitude of the numerator-`(−u)` part of the reduced integral,
/// `∫_C^{λ−W(0)} W⁻¹(λ−u) du` (without the factor 4).
pub fn minus_u_part(q: &PhaseSpaceQuery) -> Result<f64> {
    if !q.is_nonempty() {
        return Ok(0.0);
    }
    let top = q.lambda - q.spec.at_origin();
    quad::quad(
        |u| q.spec.inverse(q.lambda - u).unwrap_or(f64::NAN),
        q.c,
        top,
        Tolerance::default(),
    )
}
