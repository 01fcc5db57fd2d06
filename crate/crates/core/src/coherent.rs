//! Gaussian coherent states and the coherent-state transform
//!
//! `ψ̃(k, y) = ∫ e^{-2πikx} g_a(x − y) ψ(x) dx`,  `g_a(y) = (a/π)^{1/4} e^{-ay²/2}`.
//!
//! Besides the transform itself this module checks its marginal identities
//! numerically, provides the kinetic multiplier `T(k) = e^{-s}cosh(k)` that
//! solves `T ∗ ĝ_a² = cosh`, and the closed-form absolute moments of `g_a²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::potential::PotentialSpec;
use crate::quad::{self, Tolerance};
use crate::{Error, Result};

/// Gaussian window parameter together with its heat times:
/// `t = 1/(4a)` in position and `s = a/(16π²)` in frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParam {
    a: f64,
    t: f64,
    s: f64,
}

impl GaussianParam {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!(
                "Gaussian parameter a must be positive, got {a}"
            )));
        }
        Ok(Self {
            a,
            t: 1.0 / (4.0 * a),
            s: a / (16.0 * PI * PI),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Position-side heat time `1/(4a)`.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Frequency-side heat time `a/(16π²)`.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `g_a(y)`.
    pub fn eval(&self, y: f64) -> f64 {
        (self.a / PI).powf(0.25) * (-0.5 * self.a * y * y).exp()
    }

    /// `g_a(y)²`, the centred normal density with variance `1/(2a)`.
    pub fn eval_sq(&self, y: f64) -> f64 {
        (self.a / PI).sqrt() * (-self.a * y * y).exp()
    }

    /// `ĝ_a(ξ) = (a/π)^{1/4} √(2π/a) e^{-2π²ξ²/a}`.
    pub fn fourier(&self, xi: f64) -> f64 {
        (self.a / PI).powf(0.25)
            * (2.0 * PI / self.a).sqrt()
            * (-2.0 * PI * PI * xi * xi / self.a).exp()
    }

    /// `ĝ_a(ξ)²`, a centred normal density with variance `a/(8π²)`.
    pub fn fourier_sq(&self, xi: f64) -> f64 {
        (4.0 * PI / self.a).sqrt() * (-4.0 * PI * PI * xi * xi / self.a).exp()
    }
}

pub fn gaussian_eval(g: &GaussianParam, y: f64) -> f64 {
    g.eval(y)
}

/// `∫|y|^γ g_a²(y) dy = Γ((γ+1)/2) / (√π a^{γ/2})`.
pub fn abs_moment(g: &GaussianParam, gamma_exp: f64) -> f64 {
    assert!(gamma_exp > 0.0, "moment order must be positive");
    gamma(0.5 * (gamma_exp + 1.0)) / (PI.sqrt() * g.a.powf(0.5 * gamma_exp))
}

/// Prefactor `e^{-s}` of the kinetic multiplier `T(k) = e^{-s} cosh(k)`.
pub fn kinetic_multiplier(g: &GaussianParam) -> f64 {
    (-g.s).exp()
}

/// `max_{k∈[-5,5]} |(T ∗ ĝ_a²)(k) − cosh k| / cosh k`, with the convolution
/// done by quadrature against the closed form of `ĝ_a²`.
pub fn kinetic_residual(g: &GaussianParam) -> Result<f64> {
    let prefactor = kinetic_multiplier(g);
    let std = (g.a / (8.0 * PI * PI)).sqrt();
    let radius = 40.0 * std + 8.0 * std * std;
    let tol = Tolerance::new(0.0, 1e-13);
    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let k = -5.0 + 0.05 * i as f64;
        let conv = quad::quad_breaks(
            |xi| prefactor * (k - xi).cosh() * g.fourier_sq(xi),
            &[-radius, 0.0, radius],
            tol,
        )?;
        worst = worst.max((conv - k.cosh()).abs() / k.cosh());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunctionKind {
    /// `g_b` for the given width parameter `b`.
    Gaussian {
        b: f64,
    },
    /// Hermite function of the given order.
    Hermite {
        order: usize,
    },
    Custom,
}

/// A unit-norm test function sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct TestFunction {
    start: f64,
    spacing: f64,
    values: Vec<Complex64>,
    kind: TestFunctionKind,
}

impl TestFunction {
    /// Wraps samples that must already be unit-normalized (`h Σ|ψ_j|² = 1`
    /// to 1e−10).
    pub fn from_samples(
        start: f64,
        spacing: f64,
        values: Vec<Complex64>,
        kind: TestFunctionKind,
    ) -> Result<Self> {
        if !(spacing > 0.0) || values.len() < 2 {
            return Err(Error::Domain(
                "test function needs at least two samples and positive spacing".into(),
            ));
        }
        let f = Self {
            start,
            spacing,
            values,
            kind,
        };
        let norm = f.norm_sq();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Truncation(format!(
                "test function norm² is {norm}, not 1 ± 1e-10; widen or refine the grid"
            )));
        }
        Ok(f)
    }

    /// Normalizes arbitrary samples.
    pub fn custom(start: f64, spacing: f64, mut values: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * spacing;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain(
                "cannot normalize a zero or non-finite test function".into(),
            ));
        }
        let scale = norm.sqrt().recip();
        values.iter_mut().for_each(|v| *v *= scale);
        Self::from_samples(start, spacing, values, TestFunctionKind::Custom)
    }

    /// `g_b` sampled at `n` points on `[-half_extent, half_extent)`.
    pub fn gaussian(b: f64, half_extent: f64, n: usize) -> Result<Self> {
        let g = GaussianParam::new(b)?;
        let spacing = 2.0 * half_extent / n as f64;
        let values = (0..n)
            .map(|j| Complex64::new(g.eval(-half_extent + j as f64 * spacing), 0.0))
            .collect();
        Self::from_samples(
            -half_extent,
            spacing,
            values,
            TestFunctionKind::Gaussian { b },
        )
    }

    /// Hermite function `h_order` sampled at `n` points on `[-half_extent, half_extent)`.
    pub fn hermite(order: usize, half_extent: f64, n: usize) -> Result<Self> {
        let spacing = 2.0 * half_extent / n as f64;
        let values = (0..n)
            .map(|j| {
                Complex64::new(
                    hermite_function(order, -half_extent + j as f64 * spacing),
                    0.0,
                )
            })
            .collect();
        Self::from_samples(
            -half_extent,
            spacing,
            values,
            TestFunctionKind::Hermite { order },
        )
    }

    pub fn kind(&self) -> TestFunctionKind {
        self.kind
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.spacing
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn first_node(&self) -> f64 {
        self.start
    }

    pub fn last_node(&self) -> f64 {
        self.node(self.values.len() - 1)
    }

    /// `h Σ|ψ_j|²`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spacing
    }

    fn window_mass_outside(&self, g: &GaussianParam, y: f64) -> f64 {
        let sa = g.a.sqrt();
        0.5 * erfc((y - self.first_node()) * sa) + 0.5 * erfc((self.last_node() - y) * sa)
    }

    /// Node index range where `g_a(x − y)` is above ~1e−22 of its peak.
    fn window_range(&self, g: &GaussianParam, y: f64) -> std::ops::Range<usize> {
        let reach = 10.0 / g.a.sqrt();
        let lo = ((y - reach - self.start) / self.spacing).floor().max(0.0) as usize;
        let hi =
            (((y + reach - self.start) / self.spacing).ceil() as usize + 1).min(self.values.len());
        lo.min(hi)..hi
    }
}

/// Normalized Hermite function via the stable three-term recurrence.
pub fn hermite_function(order: usize, x: f64) -> f64 {
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if order == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = 2.0_f64.sqrt() * x * h0;
    for n in 1..order {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ψ̃(k, y)` by trapezoidal quadrature on the test function's grid.
pub fn transform(psi: &TestFunction, g: &GaussianParam, k: f64, y: f64) -> Result<Complex64> {
    let off = psi.window_mass_outside(g, y);
    if off > 1e-8 {
        return Err(Error::Truncation(format!(
            "window at y = {y} has mass {off:e} off the grid [{}, {}]",
            psi.first_node(),
            psi.last_node()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in psi.window_range(g, y) {
        let x = psi.node(j);
        let phase = Complex64::from_polar(1.0, -2.0 * PI * k * x);
        acc += phase * psi.values[j] * g.eval(x - y);
    }
    Ok(acc * psi.spacing)
}

/// Residuals of the three coherent-state identities:
///
/// - `r_k = max_y |∫|ψ̃(k,y)|²dk − (|ψ|² ∗ g_a²)(y)|`
/// - `r_y = max_k |∫|ψ̃(k,y)|²dy − (|ψ̂|² ∗ ĝ_a²)(k)|`
/// - `r_w = |∫∫W(y)|ψ̃|²dkdy − ∫(W ∗ g_a²)|ψ|²dx|`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalResiduals {
    pub r_k: f64,
    pub r_y: f64,
    pub r_w: f64,
}

impl MarginalResiduals {
    pub fn max(&self) -> f64 {
        self.r_k.max(self.r_y).max(self.r_w)
    }
}

/// Phase-space sampling shared by the identity checks.
struct PhaseGrid {
    ks: Vec<f64>,
    dk: f64,
    /// Node indices of the test-function grid used as `y` samples.
    y_nodes: Vec<usize>,
    dy: f64,
    y_max: f64,
}

impl PhaseGrid {
    fn new(psi: &TestFunction, g: &GaussianParam) -> Result<Self> {
        let h = psi.spacing;
        let center = 0.5 * (psi.first_node() + psi.last_node());
        let half = 0.5 * (psi.last_node() - psi.first_node());
        // Keep the whole window on the grid for every y sample.
        let y_max = half - 9.0 / g.a.sqrt();
        if y_max <= 0.0 {
            return Err(Error::Truncation(format!(
                "grid half-width {half} cannot hold a window of parameter a = {}",
                g.a
            )));
        }
        let stride = ((0.1 * (1.0_f64).min(1.0 / g.a.sqrt())) / h)
            .round()
            .max(1.0) as usize;
        let y_nodes: Vec<usize> = (0..psi.len())
            .filter(|&j| j % stride == 0 && (psi.node(j) - center).abs() <= y_max)
            .collect();
        let k_max = 0.5 / h;
        let dk = 0.02;
        let nk = (k_max / dk).floor() as i64;
        let ks = (-nk..=nk).map(|m| m as f64 * dk).collect();
        Ok(Self {
            ks,
            dk,
            y_nodes,
            dy: stride as f64 * h,
            y_max,
        })
    }
}

pub fn marginal_residuals(
    psi: &TestFunction,
    g: &GaussianParam,
    w: &PotentialSpec,
) -> Result<MarginalResiduals> {
    marginal_residuals_scaled(psi, g, w, 1.0)
}

/// [`marginal_residuals`] with `W` multiplied by `w_scale`; a zero scale
/// exercises the `W ≡ 0` limit.
pub fn marginal_residuals_scaled(
    psi: &TestFunction,
    g: &GaussianParam,
    w: &PotentialSpec,
    w_scale: f64,
) -> Result<MarginalResiduals> {
    Ok(marginal_residuals_batch(psi, g, &[(*w, w_scale)])?.remove(0))
}

/// Residuals for several scaled potentials, sharing the phase-space table.
pub fn marginal_residuals_batch(
    psi: &TestFunction,
    g: &GaussianParam,
    potentials: &[(PotentialSpec, f64)],
) -> Result<Vec<MarginalResiduals>> {
    let n = psi.len();
    let edge = psi.values[..4.min(n)]
        .iter()
        .chain(psi.values[n.saturating_sub(4)..].iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if edge > 1e-12 {
        return Err(Error::Truncation(format!(
            "test function is {edge:e} at the grid edge"
        )));
    }
    let grid = PhaseGrid::new(psi, g)?;
    let h = psi.spacing;
    let density: Vec<f64> = psi.values.iter().map(|v| v.norm_sqr()).collect();

    // |ψ̃(k, y)|² on the phase grid, plus ψ̂ on the k grid.
    let ny = grid.y_nodes.len();
    let mut power = vec![0.0; grid.ks.len() * ny];
    let mut psi_hat_sq = vec![0.0; grid.ks.len()];
    let windows: Vec<(std::ops::Range<usize>, Vec<f64>)> = grid
        .y_nodes
        .iter()
        .map(|&jy| {
            let y = psi.node(jy);
            let range = psi.window_range(g, y);
            let weights = range.clone().map(|j| g.eval(psi.node(j) - y)).collect();
            (range, weights)
        })
        .collect();
    let mut phases = vec![Complex64::new(0.0, 0.0); n];
    for (m, &k) in grid.ks.iter().enumerate() {
        for (j, ph) in phases.iter_mut().enumerate() {
            *ph = Complex64::from_polar(1.0, -2.0 * PI * k * psi.node(j)) * psi.values[j];
        }
        psi_hat_sq[m] = (phases.iter().sum::<Complex64>() * h).norm_sqr();
        for (iy, (range, weights)) in windows.iter().enumerate() {
            let acc: Complex64 = phases[range.clone()]
                .iter()
                .zip(weights)
                .map(|(ph, &wt)| ph * wt)
                .sum();
            power[m * ny + iy] = (acc * h).norm_sqr();
        }
    }

    // k-marginal: integrate over k, compare with |ψ|² ∗ g_a².
    let mut k_marginal = vec![0.0; ny];
    let mut r_k: f64 = 0.0;
    for (iy, &jy) in grid.y_nodes.iter().enumerate() {
        let lhs: f64 = (0..grid.ks.len()).map(|m| power[m * ny + iy]).sum::<f64>() * grid.dk;
        let y = psi.node(jy);
        let rhs: f64 = density
            .iter()
            .enumerate()
            .map(|(j, d)| d * g.eval_sq(y - psi.node(j)))
            .sum::<f64>()
            * h;
        k_marginal[iy] = lhs;
        r_k = r_k.max((lhs - rhs).abs());
    }
    let captured: f64 = k_marginal.iter().sum::<f64>() * grid.dy;
    if (captured - 1.0).abs() > 1e-9 {
        return Err(Error::Truncation(format!(
            "phase-space mass over |y| ≤ {} is {captured}; widen the grid",
            grid.y_max
        )));
    }

    // y-marginal: integrate over y, compare with |ψ̂|² ∗ ĝ_a².
    let mut r_y: f64 = 0.0;
    for (m, &k) in grid.ks.iter().enumerate() {
        let lhs: f64 = power[m * ny..(m + 1) * ny].iter().sum::<f64>() * grid.dy;
        let rhs: f64 = grid
            .ks
            .iter()
            .zip(&psi_hat_sq)
            .map(|(&xi, &ph)| ph * g.fourier_sq(k - xi))
            .sum::<f64>()
            * grid.dk;
        r_y = r_y.max((lhs - rhs).abs());
    }

    // Potential identity. The y integral is adaptive so kinks of W at the
    // origin do not limit accuracy; the k marginal is recomputed pointwise.
    let k_marginal_at = |y: f64| -> f64 {
        let range = psi.window_range(g, y);
        let weighted: Vec<(f64, Complex64)> = range
            .map(|j| {
                let x = psi.node(j);
                (x, psi.values[j] * g.eval(x - y))
            })
            .collect();
        let start: Vec<Complex64> = weighted
            .iter()
            .map(|&(x, v)| v * Complex64::from_polar(1.0, -2.0 * PI * grid.ks[0] * x))
            .collect();
        let step: Vec<Complex64> = weighted
            .iter()
            .map(|&(x, _)| Complex64::from_polar(1.0, -2.0 * PI * grid.dk * x))
            .collect();
        let mut cur = start;
        let mut total = 0.0;
        for _ in 0..grid.ks.len() {
            total += (cur.iter().sum::<Complex64>() * h).norm_sqr();
            cur.iter_mut().zip(&step).for_each(|(c, s)| *c *= s);
        }
        total * grid.dk
    };
    let mut out = Vec::with_capacity(potentials.len());
    for (w, w_scale) in potentials {
        let r_w = if *w_scale == 0.0 {
            0.0
        } else {
            let lhs = quad::quad_breaks(
                |y| w_scale * w.value(y) * k_marginal_at(y),
                &[-grid.y_max, 0.0, grid.y_max],
                Tolerance::new(1e-14, 1e-12),
            )?;
            let mut rhs = 0.0;
            for (j, d) in density.iter().enumerate() {
                if *d > 1e-32 {
                    rhs += d * w.heat_smooth(g.a, psi.node(j))?;
                }
            }
            rhs *= w_scale * h;
            (lhs - rhs).abs()
        };
        out.push(MarginalResiduals { r_k, r_y, r_w });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let g = GaussianParam::new(PI).unwrap();
        assert!((gaussian_eval(&g, 0.0) - 1.0).abs() < 1e-15);
        let g1 = GaussianParam::new(1.0).unwrap();
        assert!((gaussian_eval(&g1, 0.0) - PI.powf(-0.25)).abs() < 1e-15);
        assert!((g1.eval(0.0) - 0.751126).abs() < 1e-6);
        for a in [0.1, 1.0, 7.0] {
            let g = GaussianParam::new(a).unwrap();
            let mass = quad::quad(|y| g.eval_sq(y), -60.0, 60.0, Tolerance::default()).unwrap();
            assert!((mass - 1.0).abs() < 1e-12);
            let fmass = quad::quad(|y| g.fourier_sq(y), -60.0, 60.0, Tolerance::default()).unwrap();
            assert!((fmass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_times_multiply_to_constant() {
        for a in [1e-3, 0.5, 1.0, 17.0, 1e4] {
            let g = GaussianParam::new(a).unwrap();
            assert!((g.t() * g.s() - 1.0 / (64.0 * PI * PI)).abs() < 1e-18);
        }
        assert!(GaussianParam::new(0.0).is_err());
    }

    #[test]
    fn fourier_closed_form_matches_quadrature() {
        let g = GaussianParam::new(2.0).unwrap();
        for xi in [0.0, 0.3, 1.1] {
            let re = quad::quad(
                |x| (2.0 * PI * xi * x).cos() * g.eval(x),
                -30.0,
                30.0,
                Tolerance::default(),
            )
            .unwrap();
            assert!((re - g.fourier(xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_moment_examples() {
        let g = GaussianParam::new(1.0).unwrap();
        assert!((abs_moment(&g, 2.0) - 0.5).abs() < 1e-14);
        assert!((abs_moment(&g, 1.0) - 1.0 / PI.sqrt()).abs() < 1e-14);
        assert!((abs_moment(&g, 1e-9) - 1.0).abs() < 1e-8);
        for gm in [0.25, 1.0, 2.5] {
            let q = quad::quad_breaks(
                |y| y.abs().powf(gm) * g.eval_sq(y),
                &[-40.0, 0.0, 40.0],
                Tolerance::default(),
            )
            .unwrap();
            assert!((q - abs_moment(&g, gm)).abs() < 1e-11);
        }
    }

    #[test]
    fn moment_scaling_is_exact() {
        for gm in [0.5, 1.0, 3.0] {
            let base = abs_moment(&GaussianParam::new(1.0).unwrap(), gm);
            for a in [0.1, 4.0, 250.0] {
                let scaled = abs_moment(&GaussianParam::new(a).unwrap(), gm) * a.powf(gm / 2.0);
                assert!((scaled - base).abs() < 1e-12 * base);
            }
        }
    }

    #[test]
    fn kinetic_multiplier_examples() {
        let g = GaussianParam::new(16.0 * PI * PI).unwrap();
        assert!((kinetic_multiplier(&g) - (-1.0_f64).exp()).abs() < 1e-15);
        let a = 1e-8;
        let g = GaussianParam::new(a).unwrap();
        assert!((kinetic_multiplier(&g) - (1.0 - a / (16.0 * PI * PI))).abs() < 1e-12);
        let mut prev = 1.0;
        for a in [0.1, 1.0, 10.0, 100.0] {
            let m = kinetic_multiplier(&GaussianParam::new(a).unwrap());
            assert!(m < prev);
            prev = m;
        }
        assert!(kinetic_residual(&GaussianParam::new(1.0).unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        for (m, n) in [(0, 0), (1, 1), (3, 3), (0, 2), (1, 4)] {
            let ip = quad::quad(
                |x| hermite_function(m, x) * hermite_function(n, x),
                -30.0,
                30.0,
                Tolerance::default(),
            )
            .unwrap();
            let expected = if m == n { 1.0 } else { 0.0 };
            assert!((ip - expected).abs() < 1e-12, "({m},{n}): {ip}");
        }
    }

    #[test]
    fn transform_examples() {
        let g = GaussianParam::new(1.0).unwrap();
        let psi = TestFunction::gaussian(1.0, 20.0, 800).unwrap();
        let t = transform(&psi, &g, 0.0, 0.0).unwrap();
        assert!((t.re - 1.0).abs() < 1e-12 && t.im.abs() < 1e-14);
        let far = transform(&psi, &g, 0.0, 14.0).unwrap();
        assert!(far.norm() < 1e-12);
        let t = transform(&psi, &g, 1.0, 0.0).unwrap();
        assert!((t.norm() - (-PI * PI).exp()).abs() < 1e-12);
        // Window hanging off the grid.
        assert!(matches!(
            transform(&psi, &g, 0.0, 19.0),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn transform_bounded_by_one() {
        let g = GaussianParam::new(0.7).unwrap();
        let psi = TestFunction::hermite(1, 20.0, 800).unwrap();
        for (k, y) in [(0.0, 0.0), (0.2, 1.0), (-0.4, -0.8), (1.0, 2.0)] {
            assert!(transform(&psi, &g, k, y).unwrap().norm() <= 1.0);
        }
    }

    #[test]
    fn test_function_normalization_enforced() {
        let bad = vec![Complex64::new(1.0, 0.0); 10];
        assert!(
            TestFunction::from_samples(0.0, 1.0, bad.clone(), TestFunctionKind::Custom).is_err()
        );
        let ok = TestFunction::custom(0.0, 0.5, bad).unwrap();
        assert!((ok.norm_sq() - 1.0).abs() < 1e-14);
        // Grid too narrow for the Gaussian.
        assert!(TestFunction::gaussian(1.0, 1.0, 64).is_err());
    }

    #[test]
    fn zero_potential_residual_vanishes() {
        let g = GaussianParam::new(1.0).unwrap();
        let psi = TestFunction::gaussian(1.0, 20.0, 800).unwrap();
        let w = PotentialSpec::new(2.0, 0.0).unwrap();
        let r = marginal_residuals_scaled(&psi, &g, &w, 0.0).unwrap();
        assert_eq!(r.r_w, 0.0);
    }

    #[test]
    fn heat_consistency_with_potential_module() {
        // (|ψ|² ∗ g_a²) for ψ = h_1 by grid quadrature vs heat_smooth_log.
        let g = GaussianParam::new(1.5).unwrap();
        let psi = TestFunction::hermite(1, 20.0, 800).unwrap();
        let ln_density = |x: f64| (2.0 / PI.sqrt()).ln() + 2.0 * x.abs().ln() - x * x;
        for y in [-2.0, 0.0, 0.7, 3.0] {
            let grid: f64 = psi
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| v.norm_sqr() * g.eval_sq(y - psi.node(j)))
                .sum::<f64>()
                * psi.spacing();
            let adaptive = crate::potential::heat_smooth_log(ln_density, 1.5, y).unwrap();
            assert!(
                (grid - adaptive).abs() < 1e-8,
                "y={y}: {grid} vs {adaptive}"
            );
        }
    }
}
