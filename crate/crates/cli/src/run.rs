use std::f64::consts::E;
use std::fmt;

use fdo_core::coherent::{self, GaussianParam, TestFunction};
use fdo_core::phasespace::{self, LeadingTerm, PhaseSpaceQuery};
use fdo_core::potential::PotentialSpec;
use fdo_core::quad::{self, Tolerance};
use fdo_core::schedule::{self, ScheduleOverrides};
use fdo_core::spectral::{self, SpectrumResult};
use fdo_core::Error;
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::output::{svg_plot, Series, Table};

/// Resolution margin for every command that reads eigenvalues.
const MARGIN: f64 = 2.0;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Resolution(String),
    Certificate(String),
    Contract(String),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 1,
            Failure::Resolution(_) => 2,
            Failure::Certificate(_) => 3,
            Failure::Contract(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration: {m}"),
            Failure::Resolution(m) => write!(f, "{m}"),
            Failure::Certificate(m) => write!(f, "{m}"),
            Failure::Contract(m) => write!(f, "{m}"),
            Failure::Io(e) => write!(f, "i/o: {e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Domain(_) | Error::Range { .. } | Error::Usage(_) => Failure::Config(msg),
            Error::Resolution(_) => Failure::Resolution(msg),
            Error::Certificate(_) | Error::NonIntegrable(_) => Failure::Certificate(msg),
            Error::Truncation(_) | Error::Convergence(_) | Error::Contract(_) => {
                Failure::Contract(msg)
            }
        }
    }
}

/// Everything a command produced, held in memory until it is written.
pub struct Outcome {
    pub files: Vec<(String, String)>,
    /// Set when the tables are complete but an asserted check failed.
    pub failure: Option<Failure>,
}

impl Outcome {
    fn ok(files: Vec<(String, String)>) -> Self {
        Self {
            files,
            failure: None,
        }
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match command {
        Command::Spectrum => spectrum(cfg),
        Command::Bounds => bounds(cfg),
        Command::Phasespace => phase_space(cfg),
        Command::Verify => verify(cfg),
        Command::Asymptotics => asymptotics(cfg),
    }
}

fn overrides(cfg: &RunConfig) -> ScheduleOverrides {
    ScheduleOverrides {
        a: cfg.a_override,
        epsilon: cfg.epsilon_override,
    }
}

fn lambda_max(cfg: &RunConfig) -> f64 {
    *cfg.lambdas.last().expect("validated non-empty")
}

fn resolved_spectrum(cfg: &RunConfig) -> Result<SpectrumResult, Failure> {
    spectral::resolution_check(&cfg.grid, &cfg.potential, lambda_max(cfg), MARGIN).require()?;
    let op = spectral::assemble(&cfg.grid, &cfg.potential)?;
    Ok(spectral::eigenvalues(&op)?)
}

fn quadrant(spec: PotentialSpec, lambda: f64, c: f64) -> Result<f64, Failure> {
    Ok(phasespace::quadrant_integral(&PhaseSpaceQuery::new(
        spec, lambda, c,
    )?)?)
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spectrum = resolved_spectrum(cfg)?;
    let top = lambda_max(cfg);

    let mut counts = Table::new(&["lambda", "count", "riesz_mean", "layer_cake"]);
    for &lam in &cfg.lambdas {
        counts.push(vec![
            lam.into(),
            spectrum.count(lam).into(),
            spectral::riesz_mean(&spectrum, lam).into(),
            spectral::layer_cake(&spectrum, lam).into(),
        ]);
    }
    // Only the resolved window is physical.
    let mut levels = Table::new(&["index", "eigenvalue"]);
    for (i, &e) in spectrum
        .eigenvalues
        .iter()
        .take_while(|&&e| e <= top)
        .enumerate()
    {
        levels.push(vec![i.into(), e.into()]);
    }

    let mut files = vec![
        ("spectrum.csv".to_string(), counts.to_csv()),
        ("eigenvalues.csv".to_string(), levels.to_csv()),
    ];
    if cfg.emit_svg {
        let steps: Vec<(f64, f64)> = spectrum
            .eigenvalues
            .iter()
            .take_while(|&&e| e <= top)
            .enumerate()
            .map(|(i, &e)| (e, (i + 1) as f64))
            .collect();
        let series = [Series {
            name: "N(λ)",
            points: steps,
        }];
        files.push((
            "spectrum.svg".to_string(),
            svg_plot("eigenvalue counting", &series, false, false),
        ));
    }
    Ok(Outcome::ok(files))
}

fn bounds(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let reports =
        schedule::sandwich_report(&cfg.potential, &cfg.lambdas, &cfg.grid, overrides(cfg))?;
    let mut t = Table::new(&[
        "lambda",
        "a",
        "s",
        "sigma",
        "tau",
        "epsilon",
        "mu",
        "lower",
        "riesz_mean",
        "upper",
        "leading",
        "lower_ratio",
        "riesz_ratio",
        "upper_ratio",
    ]);
    for r in &reports {
        let sc = &r.schedule;
        let (rr, lr, ur) = r.ratios().unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        t.push(vec![
            r.lambda.into(),
            sc.a.into(),
            sc.s.into(),
            sc.sigma.into(),
            sc.tau.into(),
            sc.epsilon.into(),
            sc.mu.into(),
            r.lower.into(),
            r.riesz.unwrap_or(f64::NAN).into(),
            r.upper.into(),
            r.leading.unwrap_or(f64::NAN).into(),
            lr.into(),
            rr.into(),
            ur.into(),
        ]);
    }
    let mut files = vec![("bounds.csv".to_string(), t.to_csv())];
    if cfg.emit_svg {
        let pick = |f: fn(&schedule::BoundReport) -> f64| {
            reports.iter().map(|r| (r.lambda, f(r))).collect()
        };
        let series = [
            Series {
                name: "lower",
                points: pick(|r| r.lower),
            },
            Series {
                name: "riesz",
                points: pick(|r| r.riesz.unwrap_or(f64::NAN)),
            },
            Series {
                name: "upper",
                points: pick(|r| r.upper),
            },
        ];
        files.push((
            "bounds.svg".to_string(),
            svg_plot("Riesz-mean sandwich", &series, true, true),
        ));
    }
    Ok(Outcome::ok(files))
}

fn phase_space(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = cfg.potential;
    let rows = cfg
        .lambdas
        .par_iter()
        .map(|&lam| -> Result<[f64; 5], Failure> {
            let q = PhaseSpaceQuery::new(spec, lam, 1.0)?;
            let folded = phasespace::quadrant_integral(&q)?;
            let cosh = phasespace::cosh_integral(&q)?;
            let lead = phasespace::leading_term(&spec, lam);
            Ok([lam, folded, cosh, lead, folded / lead])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "lambda",
        "quadrant_integral",
        "cosh_integral",
        "leading",
        "ratio",
    ]);
    for row in &rows {
        t.push(row.iter().map(|&v| v.into()).collect());
    }
    let mut files = vec![("phasespace.csv".to_string(), t.to_csv())];
    if cfg.emit_svg {
        let series = [Series {
            name: "integral / leading",
            points: rows.iter().map(|r| (r[0], r[4])).collect(),
        }];
        files.push((
            "phasespace.svg".to_string(),
            svg_plot("phase-space ratio", &series, true, false),
        ));
    }
    Ok(Outcome::ok(files))
}

fn asymptotics(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spectrum = resolved_spectrum(cfg)?;
    let counting: Vec<(f64, f64)> = cfg
        .lambdas
        .iter()
        .map(|&l| (l, spectrum.count(l) as f64))
        .collect();
    let riesz: Vec<(f64, f64)> = cfg
        .lambdas
        .iter()
        .map(|&l| (l, spectral::riesz_mean(&spectrum, l)))
        .collect();
    let count_lead = LeadingTerm::counting(&cfg.potential);
    let riesz_lead = LeadingTerm::for_spec(&cfg.potential);
    let n_series = schedule::ratio_series(&counting, &count_lead)?;
    let r_series = schedule::ratio_series(&riesz, &riesz_lead)?;

    let mut t = Table::new(&[
        "lambda",
        "count",
        "count_leading",
        "count_ratio",
        "count_delta",
        "riesz_mean",
        "riesz_leading",
        "riesz_ratio",
        "riesz_delta",
    ]);
    for i in 0..cfg.lambdas.len() {
        let lam = cfg.lambdas[i];
        let delta = |d: &[f64]| if i == 0 { f64::NAN } else { d[i - 1] };
        t.push(vec![
            lam.into(),
            (counting[i].1 as usize).into(),
            count_lead.eval(lam).into(),
            n_series.ratios[i].into(),
            delta(&n_series.deltas).into(),
            riesz[i].1.into(),
            riesz_lead.eval(lam).into(),
            r_series.ratios[i].into(),
            delta(&r_series.deltas).into(),
        ]);
    }
    println!(
        "[asymptotics] counting ratios monotone toward 1: {}; Riesz-mean ratios: {}",
        n_series.monotone, r_series.monotone
    );
    let mut files = vec![("asymptotics.csv".to_string(), t.to_csv())];
    if cfg.emit_svg {
        let zip = |s: &schedule::RatioSeries| {
            s.lambdas
                .iter()
                .copied()
                .zip(s.ratios.iter().copied())
                .collect()
        };
        let series = [
            Series {
                name: "N / leading",
                points: zip(&n_series),
            },
            Series {
                name: "riesz / leading",
                points: zip(&r_series),
            },
        ];
        files.push((
            "asymptotics.svg".to_string(),
            svg_plot("ratio to leading term", &series, true, false),
        ));
    }
    Ok(Outcome::ok(files))
}

struct Check {
    name: String,
    value: f64,
    threshold: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
        }
    }

    fn pass(&self) -> bool {
        // NaN fails.
        self.value < self.threshold
    }
}

/// `4∫_0^{W⁻¹(λ−C)} (E ln(E/C) − (E − C)) dy` with `E = λ − W(y)`: the
/// k-integral done exactly, the y-integral by quadrature.
fn quadrant_by_slices(spec: &PotentialSpec, lambda: f64, c: f64) -> Result<f64, Failure> {
    if lambda - c <= spec.at_origin() {
        return Ok(0.0);
    }
    let y_max = spec.inverse(lambda - c)?;
    let slice = |y: f64| {
        let e = lambda - spec.value(y);
        if e <= c {
            0.0
        } else {
            e * (e / c).ln() - (e - c)
        }
    };
    let mut breaks = vec![0.0, y_max];
    if y_max > 1.0 {
        breaks.insert(1, 1.0);
    }
    Ok(4.0
        * quad::quad_breaks(
            slice,
            &breaks,
            Tolerance::new(0.0, 1e-12).with_max_intervals(4000),
        )?)
}

fn verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = cfg.potential;
    let spectrum = resolved_spectrum(cfg)?;
    let mut checks = Vec::new();

    // Coherent-state marginals with W from the config. β = 2 needs a > 1.
    let tests = [
        ("gaussian", TestFunction::gaussian(1.0, 24.0, 960)?),
        ("hermite1", TestFunction::hermite(1, 24.0, 960)?),
    ];
    for a in [0.5, 1.0, 4.0] {
        let g = GaussianParam::new(a)?;
        let smoothing_ok = !(spec.beta() == 2.0 && a <= 1.0);
        for (label, psi) in &tests {
            let pots: Vec<(PotentialSpec, f64)> = if smoothing_ok {
                vec![(spec, 1.0)]
            } else {
                Vec::new()
            };
            let res = coherent::marginal_residuals_batch(psi, &g, &pots)?;
            if let Some(r) = res.first() {
                checks.push(Check::new(format!("marginal_k/{label}/a={a}"), r.r_k, 1e-8));
                checks.push(Check::new(format!("marginal_y/{label}/a={a}"), r.r_y, 1e-8));
                checks.push(Check::new(format!("marginal_w/{label}/a={a}"), r.r_w, 1e-8));
            }
        }
        checks.push(Check::new(
            format!("kinetic/a={a}"),
            coherent::kinetic_residual(&g)?,
            1e-8,
        ));
    }

    for &lam in &cfg.lambdas {
        let riesz = spectral::riesz_mean(&spectrum, lam);
        checks.push(Check::new(
            format!("karamata/lambda={lam}"),
            schedule::karamata_check(&spectrum, lam) / (1.0 + riesz),
            1e-12,
        ));
        if spec.beta() == 0.0 && lam > 1.0 {
            let (lhs, rhs) = phasespace::ibp_sides_power(lam, 1.0, spec.p())?;
            checks.push(Check::new(
                format!("ibp_power/lambda={lam}"),
                (lhs - rhs).abs() / (1.0 + lhs.abs()),
                1e-9,
            ));
        }
        if spec.beta() > 0.0 && lam > 1.0 + E {
            let (lhs, rhs) = phasespace::ibp_sides_exp(lam, 1.0, E, 1.0 / spec.beta())?;
            checks.push(Check::new(
                format!("ibp_exp/lambda={lam}"),
                (lhs - rhs).abs() / (1.0 + lhs.abs()),
                1e-9,
            ));
        }
        let folded = quadrant(spec, lam, 1.0)?;
        let sliced = quadrant_by_slices(&spec, lam, 1.0)?;
        let rel = if folded == 0.0 && sliced == 0.0 {
            0.0
        } else {
            (folded - sliced).abs() / folded.abs().max(sliced.abs())
        };
        checks.push(Check::new(format!("reduction/lambda={lam}"), rel, 1e-6));
    }

    let mut t = Table::new(&["check_name", "value", "threshold", "pass"]);
    for c in &checks {
        t.push(vec![
            c.name.as_str().into(),
            c.value.into(),
            c.threshold.into(),
            c.pass().into(),
        ]);
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.pass())
        .map(|c| c.name.as_str())
        .collect();
    let failure = (!failed.is_empty())
        .then(|| Failure::Contract(format!("failed checks: {}", failed.join(", "))));
    Ok(Outcome {
        files: vec![("verify.csv".to_string(), t.to_csv())],
        failure,
    })
}
