//! λ-dependent scale schedules, the two-sided Riesz-mean bounds built from
//! them, and convergence diagnostics.

use rayon::prelude::*;

use crate::coherent::GaussianParam;
use crate::phasespace::{self, LeadingTerm, PhaseSpaceQuery};
use crate::potential::{AffineCertificate, DilationCertificate, PotentialSpec};
use crate::spectral::{self, Grid, SpectrumResult};
use crate::{Error, Result};

/// Optional replacements for the default scales `a = log log λ` and
/// `ε = 1/log log log λ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScheduleOverrides {
    pub a: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Affine(AffineCertificate),
    /// Certificates at `a` (lower bound) and at `aμ²` (upper bound).
    Dilation {
        at_a: DilationCertificate,
        at_dilated: DilationCertificate,
    },
}

/// All scales entering the bounds at one λ.
///
/// In the β = 0 branch `epsilon`, `k` are 0 and `mu` is 1; in the β > 0
/// branch `sigma` and `tau` are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSchedule {
    pub lambda: f64,
    pub a: f64,
    pub s: f64,
    pub sigma: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub k: f64,
    pub mu: f64,
    pub c1: f64,
    pub c2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub certificate: Option<Certificate>,
}

pub fn default_scale(lambda: f64) -> f64 {
    lambda.ln().ln()
}

pub fn default_epsilon(lambda: f64) -> f64 {
    1.0 / lambda.ln().ln().ln()
}

pub fn make_schedule(
    spec: &PotentialSpec,
    lambda: f64,
    overrides: ScheduleOverrides,
) -> Result<ScaleSchedule> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let e = std::f64::consts::E;
    let a = match overrides.a {
        Some(a) => a,
        None if lambda > e.powf(e) => default_scale(lambda),
        None => {
            return Err(Error::Domain(format!(
                "λ = {lambda} is below e^e; the default scale log log λ needs an override"
            )))
        }
    };
    let s = GaussianParam::new(a)?.s();

    if spec.beta() == 0.0 {
        let cert = spec.affine_certificate(a)?;
        let (sigma, tau) = (cert.sigma, cert.tau);
        let shift = tau.max(1.0);
        return Ok(ScaleSchedule {
            lambda,
            a,
            s,
            sigma,
            tau,
            epsilon: 0.0,
            k: 0.0,
            mu: 1.0,
            c1: 0.5 * (1.0 + sigma) * (-s).exp(),
            c2: s.exp() / (1.0 + sigma),
            lambda1: (1.0 + sigma) * lambda + shift,
            lambda2: (lambda - shift) / (1.0 + sigma),
            certificate: Some(Certificate::Affine(cert)),
        });
    }

    let epsilon = match overrides.epsilon {
        Some(eps) => eps,
        None if lambda > e.powf(e.powf(e)) => default_epsilon(lambda),
        None => {
            return Err(Error::Domain(format!(
                "λ = {lambda} is below e^(e^e); the default ε = 1/log log log λ needs an override"
            )))
        }
    };
    let at_a = spec.dilation_certificate(a, epsilon)?;
    if !at_a.valid {
        return Err(Error::Certificate(format!(
            "dilation certificate invalid at a = {a}, ε = {epsilon}: residuals {:.4e}, {:.4e}",
            at_a.residual_main, at_a.residual_tail
        )));
    }
    let mu = at_a.mu;
    let at_dilated = spec.dilation_certificate(a * mu * mu, epsilon)?;
    if !at_dilated.valid {
        return Err(Error::Certificate(format!(
            "dilation certificate invalid at aμ² = {}, ε = {epsilon}",
            a * mu * mu
        )));
    }
    Ok(ScaleSchedule {
        lambda,
        a,
        s,
        sigma: 0.0,
        tau: 0.0,
        epsilon,
        k: at_a.k,
        mu,
        c1: (-s).exp(),
        c2: 0.5 * s.exp(),
        lambda1: 2.0 * (lambda + 1.0),
        lambda2: 0.5 * lambda - 1.0,
        certificate: Some(Certificate::Dilation { at_a, at_dilated }),
    })
}

/// Upper bound on the Riesz mean; `+∞` when `C₁ ≥ λ₁` (vacuous).
pub fn upper_bound(spec: &PotentialSpec, sched: &ScaleSchedule) -> Result<f64> {
    if sched.c1 >= sched.lambda1 {
        return Ok(f64::INFINITY);
    }
    let prefactor = if spec.beta() == 0.0 {
        1.0 / (1.0 + sched.sigma)
    } else {
        0.5 * sched.mu
    };
    let q = PhaseSpaceQuery::new(*spec, sched.lambda1, sched.c1)?;
    Ok(prefactor * phasespace::quadrant_integral(&q)?)
}

/// Lower bound on the Riesz mean; 0 when `C₂ ≥ λ₂`.
pub fn lower_bound(spec: &PotentialSpec, sched: &ScaleSchedule) -> Result<f64> {
    if sched.c2 >= sched.lambda2 {
        return Ok(0.0);
    }
    let prefactor = if spec.beta() == 0.0 {
        1.0 + sched.sigma
    } else {
        2.0 / sched.mu
    };
    let q = PhaseSpaceQuery::new(*spec, sched.lambda2, sched.c2)?;
    Ok(prefactor * phasespace::quadrant_integral(&q)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    pub riesz: Option<f64>,
    /// Defined for λ > e.
    pub leading: Option<f64>,
    pub schedule: ScaleSchedule,
}

impl BoundReport {
    /// `(riesz, lower, upper)` divided by the leading term.
    pub fn ratios(&self) -> Option<(f64, f64, f64)> {
        let lead = self.leading?;
        Some((
            self.riesz.unwrap_or(f64::NAN) / lead,
            self.lower / lead,
            self.upper / lead,
        ))
    }

    /// `0.005·riesz`.
    pub fn slack(&self) -> f64 {
        0.005 * self.riesz.unwrap_or(0.0)
    }

    pub fn check(&self) -> Result<()> {
        if self.lower > self.upper {
            return Err(Error::Contract(format!(
                "λ = {}: lower bound {} exceeds upper bound {}",
                self.lambda, self.lower, self.upper
            )));
        }
        if let Some(r) = self.riesz {
            let slack = self.slack();
            if r < self.lower - slack || r > self.upper + slack {
                return Err(Error::Contract(format!(
                    "λ = {}: Riesz mean {r} outside [{}, {}] with slack {slack}",
                    self.lambda, self.lower, self.upper
                )));
            }
        }
        Ok(())
    }
}

/// Bounds at one λ, optionally against a computed spectrum. Does not check
/// the report; see [`BoundReport::check`].
pub fn bound_report(
    spec: &PotentialSpec,
    lambda: f64,
    spectrum: Option<&SpectrumResult>,
    overrides: ScheduleOverrides,
) -> Result<BoundReport> {
    let schedule = make_schedule(spec, lambda, overrides)?;
    let lower = lower_bound(spec, &schedule)?;
    let upper = upper_bound(spec, &schedule)?;
    let leading = (lambda > std::f64::consts::E).then(|| phasespace::leading_term(spec, lambda));
    Ok(BoundReport {
        lambda,
        lower,
        upper,
        riesz: spectrum.map(|s| spectral::riesz_mean(s, lambda)),
        leading,
        schedule,
    })
}

/// Eigensolve on `grid` and bound reports at every λ, each checked.
pub fn sandwich_report(
    spec: &PotentialSpec,
    lambdas: &[f64],
    grid: &Grid,
    overrides: ScheduleOverrides,
) -> Result<Vec<BoundReport>> {
    let lambda_max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    spectral::resolution_check(grid, spec, lambda_max, 2.0).require()?;
    let op = spectral::assemble(grid, spec)?;
    let spectrum = spectral::eigenvalues(&op)?;
    sandwich_from_spectrum(spec, lambdas, &spectrum, overrides)
}

/// Like [`sandwich_report`] for an already computed spectrum.
pub fn sandwich_from_spectrum(
    spec: &PotentialSpec,
    lambdas: &[f64],
    spectrum: &SpectrumResult,
    overrides: ScheduleOverrides,
) -> Result<Vec<BoundReport>> {
    let reports = lambdas
        .par_iter()
        .map(|&l| bound_report(spec, l, Some(spectrum), overrides))
        .collect::<Result<Vec<_>>>()?;
    for r in &reports {
        r.check()?;
    }
    Ok(reports)
}

/// `|Σ(λ−λ_j)₊ − ∫₀^λ N(t) dt|`.
pub fn karamata_check(spectrum: &SpectrumResult, lambda: f64) -> f64 {
    (spectral::riesz_mean(spectrum, lambda) - spectral::layer_cake(spectrum, lambda)).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    pub lambdas: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `ratios[i+1] − ratios[i]`.
    pub deltas: Vec<f64>,
    /// `|ratio − 1|` is nonincreasing along the series.
    pub monotone: bool,
}

/// Measured values divided by the predictor, with a trend flag.
pub fn ratio_series(values: &[(f64, f64)], predictor: &LeadingTerm) -> Result<RatioSeries> {
    if values.len() < 3 {
        return Err(Error::Usage(
            "ratio_series needs at least three points".into(),
        ));
    }
    if values.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Usage(
            "ratio_series needs strictly increasing λ".into(),
        ));
    }
    let lambdas: Vec<f64> = values.iter().map(|v| v.0).collect();
    let ratios: Vec<f64> = values.iter().map(|&(l, m)| m / predictor.eval(l)).collect();
    let deltas = ratios.windows(2).map(|w| w[1] - w[0]).collect();
    let monotone = ratios
        .windows(2)
        .all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs());
    Ok(RatioSeries {
        lambdas,
        ratios,
        deltas,
        monotone,
    })
}
