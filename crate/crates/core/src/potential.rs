//! The potential family `W(x) = |x|^p e^{|x|^β}`, its inverse and derivative,
//! Gaussian heat smoothing `W ∗ g_a²`, and the two families of certified
//! smoothing error estimates:
//!
//! - affine (β = 0): `W ∗ g_a² ≤ (1 + σ)W + τ`, with `σ = τ → 0` as `a → ∞`;
//! - dilation (β > 0): `W ∗ g_a² ≤ 2(W(μ·) + 1)` with `μ = (1 + ε)^{1/β}`.
//!
//! All certificate constants are built from exact binomial/multinomial
//! coefficients and closed-form Gaussian moments, then re-checked on a
//! deterministic sample grid.

use std::f64::consts::{E, PI};

use crate::coherent::{abs_moment, GaussianParam};
use crate::quad::{self, Tolerance};
use crate::{Error, Result};

/// Relative slack used when comparing two floating-point sides of an
/// inequality that holds exactly in real arithmetic.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    p: f64,
    beta: f64,
}

impl PotentialSpec {
    pub fn new(p: f64, beta: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::Domain(format!("p must be finite and ≥ 0, got {p}")));
        }
        if !(0.0..=2.0).contains(&beta) {
            return Err(Error::Domain(format!(
                "beta must lie in [0, 2], got {beta}"
            )));
        }
        if p == 0.0 && beta == 0.0 {
            return Err(Error::Domain(
                "p = 0 and beta = 0 give a constant potential".into(),
            ));
        }
        Ok(Self { p, beta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `W(x)`, saturating to `+∞` on overflow.
    pub fn value(&self, x: f64) -> f64 {
        let r = x.abs();
        if self.beta == 0.0 {
            r.powf(self.p)
        } else if self.p == 0.0 {
            r.powf(self.beta).exp()
        } else if r == 0.0 {
            0.0
        } else {
            // Combine in log space so |x|^p·e^{|x|^β} stays finite as long as
            // the true value does.
            (self.p * r.ln() + r.powf(self.beta)).exp()
        }
    }

    /// `ln W(x)`; `-∞` at the origin when `p > 0`.
    pub fn ln_value(&self, x: f64) -> f64 {
        let r = x.abs();
        let log_power = if self.p == 0.0 { 0.0 } else { self.p * r.ln() };
        if self.beta == 0.0 {
            log_power
        } else {
            log_power + r.powf(self.beta)
        }
    }

    /// `W(x)`; fails with [`Error::Range`] when the value is not representable.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range { argument: x })
        }
    }

    /// `W(0)`: 1 for the pure exponential family (`p = 0`), 0 otherwise.
    pub fn at_origin(&self) -> f64 {
        if self.p == 0.0 {
            1.0
        } else {
            0.0
        }
    }

    /// `W′(x) = (p x^{p−1} + β x^{p+β−1}) e^{x^β}` for `x > 0`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!(
                "W′ is only defined for x > 0, got {x}"
            )));
        }
        let ln_x = x.ln();
        let growth = if self.beta == 0.0 {
            0.0
        } else {
            x.powf(self.beta)
        };
        let mut d = 0.0;
        if self.p > 0.0 {
            d += self.p * ((self.p - 1.0) * ln_x + growth).exp();
        }
        if self.beta > 0.0 {
            d += self.beta * ((self.p + self.beta - 1.0) * ln_x + growth).exp();
        }
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Range { argument: x })
        }
    }

    /// The unique `y ≥ 0` with `W(y) = v`.
    ///
    /// Safeguarded Newton on a bisection bracket, iterated to full double
    /// precision (relative step below 1e−15, well inside the 1e−12 target).
    pub fn inverse(&self, v: f64) -> Result<f64> {
        let w0 = self.at_origin();
        if !(v >= w0) || !v.is_finite() {
            return Err(Error::Domain(format!("W⁻¹ needs v ≥ W(0) = {w0}, got {v}")));
        }
        if v == w0 {
            return Ok(0.0);
        }
        // W(y) ≥ y^p and W(y) ≥ e^{y^β} bound the root from above.
        let mut hi = f64::INFINITY;
        if self.p > 0.0 {
            hi = hi.min(v.powf(1.0 / self.p) * E);
        }
        if self.beta > 0.0 && v > 1.0 {
            hi = hi.min(v.ln().powf(1.0 / self.beta) * E);
        }
        hi = hi.max(1.0);
        let mut lo = 0.0;
        // Work with ln W − ln v: well-conditioned over the whole bracket.
        let target = v.ln();
        let g = |y: f64| self.ln_value(y) - target;
        let mut y = 0.5 * (lo + hi);
        for _ in 0..300 {
            let gy = g(y);
            if gy == 0.0 {
                return Ok(y);
            }
            if gy > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            // d/dy ln W = p/y + β y^{β−1}
            let slope = self.p / y
                + if self.beta > 0.0 {
                    self.beta * y.powf(self.beta - 1.0)
                } else {
                    0.0
                };
            let newton = y - gy / slope;
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - y).abs() <= 1e-15 * y.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            y = next;
        }
        Ok(y)
    }

    /// Leading large-`v` behaviour of `W⁻¹`: `(log v)^{1/β}` for β > 0 and
    /// `v^{1/p}` for β = 0.
    pub fn inverse_asymptotic(&self, v: f64) -> Result<f64> {
        if !(v > self.at_origin().max(1.0)) {
            return Err(Error::Domain(format!(
                "asymptotic inverse needs v > max(W(0), 1), got {v}"
            )));
        }
        Ok(if self.beta > 0.0 {
            v.ln().powf(1.0 / self.beta)
        } else {
            v.powf(1.0 / self.p)
        })
    }

    /// The power-law majorant `|x−y|^p ≤ |x|^p + C(1+|x|^p)Σ_γ|y|^γ`.
    /// Only meaningful for the pure power family.
    pub fn binomial_majorant(&self) -> Result<MajorantData> {
        if self.beta != 0.0 {
            return Err(Error::Usage("binomial majorant requires beta = 0".into()));
        }
        Ok(MajorantData::for_power(self.p))
    }

    /// `(W ∗ g_a²)(x)` to relative accuracy 1e−10.
    pub fn heat_smooth(&self, a: f64, x: f64) -> Result<f64> {
        if self.beta == 2.0 && !(a > 1.0) {
            return Err(Error::NonIntegrable(format!(
                "W ∗ g_a² diverges for beta = 2 unless a > 1 (a = {a})"
            )));
        }
        heat_smooth_log(|z| self.ln_value(z), a, x)
    }

    /// Affine certificate `W ∗ g_a² ≤ (1+σ)W + τ` for the power family.
    pub fn affine_certificate(&self, a: f64) -> Result<AffineCertificate> {
        if self.beta != 0.0 {
            return Err(Error::Usage("affine certificate requires beta = 0".into()));
        }
        let g = GaussianParam::new(a)?;
        let majorant = self.binomial_majorant()?;
        let sigma = majorant.constant_c
            * majorant
                .gamma_set
                .iter()
                .map(|&gm| abs_moment(&g, gm))
                .sum::<f64>();
        let cert = AffineCertificate {
            sigma,
            tau: sigma,
            a,
        };

        // Sample extent grows with the smoothing width so the tails are
        // exercised too.
        let extent = 50.0_f64.max(20.0 / a.sqrt());
        for i in 0..AFFINE_SAMPLES {
            let x = -extent + 2.0 * extent * i as f64 / (AFFINE_SAMPLES - 1) as f64;
            let smoothed = self.heat_smooth(a, x)?;
            let bound = cert.bound(self.value(x));
            if smoothed > bound * (1.0 + ROUNDING_SLACK) {
                return Err(Error::Certificate(format!(
                    "affine certificate fails at x = {x}: {smoothed} > {bound}"
                )));
            }
        }
        Ok(cert)
    }

    /// Dilation certificate `W ∗ g_a² ≤ 2(W(μx) + 1)` for β > 0.
    pub fn dilation_certificate(&self, a: f64, epsilon: f64) -> Result<DilationCertificate> {
        if !(self.beta > 0.0) {
            return Err(Error::Usage(
                "dilation certificate requires beta > 0".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        GaussianParam::new(a)?;
        let k = young_constant(self.beta, epsilon);
        let mu = (1.0 + epsilon).powf(1.0 / self.beta);
        if self.beta == 2.0 && !(a > 1.0 + k) {
            return Err(Error::NonIntegrable(format!(
                "dilation integrals diverge for beta = 2 unless a > 1 + K = {} (a = {a})",
                1.0 + k
            )));
        }

        let majorant = (self.p > 0.0).then(|| MajorantData::for_power(self.p));
        let c = majorant.as_ref().map_or(0.0, |m| m.constant_c);
        let sigma = |y: f64| majorant.as_ref().map_or(0.0, |m| m.sigma_sum(y));
        let beta = self.beta;
        let ln_g2 = |y: f64| 0.5 * (a / PI).ln() - a * y * y;

        // ∫ ((1 + 2CΣ)e^{(1+K)|y|^β} − 1) g_a²
        let main = |y: f64| {
            let t = (1.0 + k) * y.abs().powf(beta);
            let extra = 2.0 * c * sigma(y);
            let g2 = ln_g2(y).exp();
            if t < 1.0 {
                t.exp_m1() * g2 + extra * (t + ln_g2(y)).exp()
            } else {
                ((1.0 + extra).ln() + t + ln_g2(y)).exp() - g2
            }
        };
        let ln_main =
            |y: f64| (1.0 + 2.0 * c * sigma(y)).ln() + (1.0 + k) * y.abs().powf(beta) + ln_g2(y);
        let residual_main = gaussian_weighted_integral(main, ln_main, a)?;

        let residual_tail = if c == 0.0 {
            0.0
        } else {
            let tail =
                |y: f64| E * E * c * sigma(y) * ((1.0 + k) * y.abs().powf(beta) + ln_g2(y)).exp();
            let ln_tail = |y: f64| {
                2.0 + c.ln()
                    + sigma(y).max(f64::MIN_POSITIVE).ln()
                    + (1.0 + k) * y.abs().powf(beta)
                    + ln_g2(y)
            };
            gaussian_weighted_integral(tail, ln_tail, a)?
        };

        let valid = residual_main < 1.0 && residual_tail < 1.0;
        let cert = DilationCertificate {
            epsilon,
            k,
            mu,
            a,
            residual_main,
            residual_tail,
            valid,
        };
        if valid {
            for i in 0..DILATION_SAMPLES {
                let x = -10.0 + 20.0 * i as f64 / (DILATION_SAMPLES - 1) as f64;
                let smoothed = self.heat_smooth(a, x)?;
                let bound = 2.0 * (self.value(mu * x) + 1.0);
                if smoothed > bound * (1.0 + ROUNDING_SLACK) {
                    return Err(Error::Certificate(format!(
                        "dilation certificate fails at x = {x}: {smoothed} > {bound}"
                    )));
                }
            }
        }
        Ok(cert)
    }
}

const AFFINE_SAMPLES: usize = 1000;
const DILATION_SAMPLES: usize = 1001;

/// `K(ε) = 2^{β−2}/ε`, the Young's-inequality constant in
/// `2^{β/2}|x|^{β/2}|y|^{β/2} ≤ ε|x|^β + K|y|^β`.
pub fn young_constant(beta: f64, epsilon: f64) -> f64 {
    2.0_f64.powf(beta - 2.0) / epsilon
}

/// `(f ∗ g_a²)(x)` for a function given through `ln f`, to relative 1e−10.
///
/// The integrand is handled in log space so super-exponential `f` (β = 2)
/// does not overflow before the Gaussian tail takes over. The domain is cut
/// once the log-integrand has dropped 80 units (≈ 1e−35) below its peak.
pub fn heat_smooth_log<F: Fn(f64) -> f64>(ln_f: F, a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!(
            "Gaussian parameter a must be positive, got {a}"
        )));
    }
    let ln_norm = 0.5 * (a / PI).ln();
    let ln_integrand = |y: f64| ln_f(x - y) + ln_norm - a * y * y;

    let (peak_y, ln_peak) = scan_peak(&ln_integrand, 12.0 / a.sqrt());
    if !ln_peak.is_finite() {
        return if ln_peak == f64::NEG_INFINITY {
            Ok(0.0)
        } else {
            Err(Error::NonIntegrable(format!(
                "integrand of f ∗ g_a² is unbounded at x = {x}"
            )))
        };
    }
    let radius = quad::log_cutoff(|y| ln_integrand(y + peak_y), ln_peak, 12.0 / a.sqrt(), 80.0);
    let mut breaks = vec![peak_y - radius, peak_y + radius, 0.0, x, peak_y];
    breaks.retain(|b| *b >= peak_y - radius && *b <= peak_y + radius);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let tol = Tolerance::new(0.0, 1e-12).with_max_intervals(8000);
    let scaled = quad::integrate_with_breaks(|y| (ln_integrand(y) - ln_peak).exp(), &breaks, tol)
        .into_result("heat smoothing")?;
    let value = scaled * ln_peak.exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range { argument: x })
    }
}

/// `(cosh ∗ g_a²)(x)`; closed form `e^{1/(4a)} cosh x`. Validation hook
/// outside the `|x|^p e^{|x|^β}` family.
pub fn cosh_heat_smooth(a: f64, x: f64) -> Result<f64> {
    heat_smooth_log(
        |z: f64| z.abs() + (-2.0 * z.abs()).exp().ln_1p() - 2.0_f64.ln(),
        a,
        x,
    )
}

/// Locates the maximum of a unimodal-ish log integrand, widening the window
/// until the peak is interior.
fn scan_peak<F: Fn(f64) -> f64>(ln_f: &F, start: f64) -> (f64, f64) {
    let mut half = start;
    let mut best = (0.0, ln_f(0.0));
    for _ in 0..40 {
        const N: usize = 400;
        for i in 0..=N {
            let y = -half + 2.0 * half * i as f64 / N as f64;
            let v = ln_f(y);
            if v > best.1 || best.1.is_nan() {
                best = (y, v);
            }
        }
        if best.0.abs() < 0.9 * half {
            break;
        }
        half *= 2.0;
    }
    // One refinement pass around the coarse maximum.
    let step = half / 200.0;
    for i in 0..=200 {
        let y = best.0 - step + 2.0 * step * i as f64 / 200.0;
        let v = ln_f(y);
        if v > best.1 {
            best = (y, v);
        }
    }
    best
}

/// `∫ f(y) dy` over ℝ for an even integrand carrying a `g_a²` factor; `ln_f`
/// is an upper envelope of `ln |f|` used for truncation.
fn gaussian_weighted_integral<F, G>(f: F, ln_f: G, a: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (peak_y, ln_peak) = scan_peak(&|y: f64| ln_f(y.abs()), 12.0 / a.sqrt());
    // Positive integrand whose peak already overflows.
    if ln_peak > f64::MAX.ln() {
        return Ok(f64::INFINITY);
    }
    let radius = quad::log_cutoff(&ln_f, ln_peak, 12.0 / a.sqrt(), 80.0).max(peak_y.abs() * 1.5);
    let tol = Tolerance::new(1e-15, 1e-12).with_max_intervals(8000);
    let mut breaks = vec![0.0, peak_y.abs(), radius];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let half =
        quad::integrate_with_breaks(&f, &breaks, tol).into_result("Gaussian-weighted integral")?;
    Ok(2.0 * half)
}

/// Certified power-law majorant data: `|x−y|^p ≤ |x|^p + C(1+|x|^p)Σ_γ|y|^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantData {
    pub constant_c: f64,
    /// Sorted ascending.
    pub gamma_set: Vec<f64>,
    pub gamma_min: f64,
}

impl MajorantData {
    /// Builds the majorant for `|x−y|^p`, `p > 0`.
    ///
    /// For `p < 2` this is the three-term estimate
    /// `|x|^p + 2^{p/2}|x|^{p/2}|y|^{p/2} + |y|^p`. For `p ≥ 2`, write
    /// `p/2 = q + r` with integer `q` and `r ∈ [0,1)`, expand
    /// `(x² + 2|x||y| + y²)^q` multinomially and bound the fractional power
    /// by subadditivity. Every cross term `|x|^A|y|^B` with `B > 0` has
    /// `A ≤ p`, hence `|x|^A ≤ 1 + |x|^p`; coefficients of equal `B` are
    /// summed and `C` is the largest such sum.
    pub fn for_power(p: f64) -> Self {
        assert!(p > 0.0, "majorant needs p > 0");
        // (coefficient, x exponent, y exponent)
        let terms: Vec<(f64, f64, f64)> = if p < 2.0 {
            vec![
                (1.0, p, 0.0),
                (2.0_f64.powf(p / 2.0), p / 2.0, p / 2.0),
                (1.0, 0.0, p),
            ]
        } else {
            let q = (p / 2.0).floor() as u32;
            let r = p / 2.0 - q as f64;
            let mut integer_part = Vec::new();
            for i in 0..=q {
                for j in 0..=(q - i) {
                    let k = q - i - j;
                    let coeff = multinomial(q, &[i, j, k]) * 2.0_f64.powi(j as i32);
                    integer_part.push((coeff, (2 * i + j) as f64, (j + 2 * k) as f64));
                }
            }
            let fractional: Vec<(f64, f64, f64)> = if r > 0.0 {
                vec![
                    (1.0, 2.0 * r, 0.0),
                    (2.0_f64.powf(r), r, r),
                    (1.0, 0.0, 2.0 * r),
                ]
            } else {
                vec![(1.0, 0.0, 0.0)]
            };
            integer_part
                .iter()
                .flat_map(|&(c1, a1, b1)| {
                    fractional
                        .iter()
                        .map(move |&(c2, a2, b2)| (c1 * c2, a1 + a2, b1 + b2))
                })
                .collect()
        };

        let mut grouped: Vec<(f64, f64)> = Vec::new();
        for (coeff, _x_exp, y_exp) in terms {
            if y_exp == 0.0 {
                continue;
            }
            match grouped.iter_mut().find(|(b, _)| (b - y_exp).abs() < 1e-12) {
                Some(entry) => entry.1 += coeff,
                None => grouped.push((y_exp, coeff)),
            }
        }
        grouped.sort_by(|l, r| l.0.total_cmp(&r.0));
        let constant_c = grouped.iter().map(|g| g.1).fold(0.0, f64::max);
        let gamma_set: Vec<f64> = grouped.iter().map(|g| g.0).collect();
        let gamma_min = gamma_set[0];
        Self {
            constant_c,
            gamma_set,
            gamma_min,
        }
    }

    /// `Σ_γ |y|^γ`.
    pub fn sigma_sum(&self, y: f64) -> f64 {
        self.gamma_set.iter().map(|&g| y.abs().powf(g)).sum()
    }

    /// Right-hand side `|x|^p + C(1+|x|^p)Σ(y)`.
    pub fn bound(&self, p: f64, x: f64, y: f64) -> f64 {
        let xp = x.abs().powf(p);
        xp + self.constant_c * (1.0 + xp) * self.sigma_sum(y)
    }
}

fn multinomial(n: u32, parts: &[u32]) -> f64 {
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    fact(n) / parts.iter().map(|&k| fact(k)).product::<f64>()
}

/// `W ∗ g_a² ≤ (1 + σ)W + τ` with `σ = τ = C Σ_γ m_γ(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineCertificate {
    pub sigma: f64,
    pub tau: f64,
    pub a: f64,
}

impl AffineCertificate {
    /// `(1 + σ)w + τ`.
    pub fn bound(&self, w: f64) -> f64 {
        (1.0 + self.sigma) * w + self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationCertificate {
    pub epsilon: f64,
    pub k: f64,
    pub mu: f64,
    pub a: f64,
    /// `∫((1 + 2CΣ)e^{(1+K)|y|^β} − 1) g_a²`
    pub residual_main: f64,
    /// `∫ e² C Σ e^{(1+K)|y|^β} g_a²`
    pub residual_tail: f64,
    pub valid: bool,
}
