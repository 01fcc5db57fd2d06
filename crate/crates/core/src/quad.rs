//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! Intervals are kept in a max-heap keyed on their error estimate and the
//! worst interval is bisected until the summed error estimate drops below
//! `max(abs, rel·|I|)`. Refinement order depends only on the integrand, so
//! results are reproducible bit for bit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_204_534,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule: stop once the error estimate is below `max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl Estimate {
    /// Converts a non-converged estimate into a [`Error::Convergence`].
    pub fn into_result(self, what: &str) -> Result<f64> {
        if self.converged && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::Convergence(format!(
                "{what}: quadrature stalled at {:e} ± {:e} after {} intervals",
                self.value, self.error, self.intervals
            )))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = WGK[10] * f_center;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (1.0_f64).min((200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Estimate {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the adaptive
/// refinement with the given breakpoints (kinks, singularities, peaks).
///
/// Breakpoints must be nondecreasing; repeated points are skipped.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Estimate {
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel> = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&f, w[0], w[1]));
        }
    }
    if heap.is_empty() {
        return Estimate {
            value: 0.0,
            error: 0.0,
            intervals: 0,
            converged: true,
        };
    }

    loop {
        let (value, error) = heap
            .iter()
            .chain(done.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let intervals = heap.len() + done.len();
        if error <= tol.target(value) {
            return Estimate {
                value,
                error,
                intervals,
                converged: value.is_finite(),
            };
        }
        if intervals >= tol.max_intervals || heap.is_empty() {
            return Estimate {
                value,
                error,
                intervals,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 8.0 * f64::EPSILON * mid.abs()
        {
            done.push(worst);
            continue;
        }
        heap.push(kronrod21(&f, worst.a, mid));
        heap.push(kronrod21(&f, mid, worst.b));
    }
}

/// Integrates `f` over `[a, b]` and fails if the tolerance was not met.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if b < a {
        return quad(f, b, a, tol).map(|v| -v);
    }
    integrate(f, a, b, tol).into_result("quad")
}

/// Like [`quad`] with explicit breakpoints.
pub fn quad_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<f64> {
    integrate_with_breaks(f, points, tol).into_result("quad")
}

/// Finds `R ≥ start` with `log_f(±y)` at least `drop` below `log_peak` for
/// all `|y| ≥ R`, by doubling. `log_f` must be eventually decreasing.
pub(crate) fn log_cutoff<F: Fn(f64) -> f64>(log_f: F, log_peak: f64, start: f64, drop: f64) -> f64 {
    let mut r = start.max(1e-3);
    for _ in 0..64 {
        let outer = log_f(r).max(log_f(-r));
        let further = log_f(1.5 * r).max(log_f(-1.5 * r));
        if outer < log_peak - drop && further <= outer {
            return r;
        }
        r *= 1.5;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_integrate_constants() {
        let sum: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((sum - 2.0).abs() < 1e-14);
        let gsum: f64 = WG.iter().sum::<f64>() * 2.0;
        assert!((gsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exact_on_single_panel() {
        // K21 integrates degree-31 polynomials exactly.
        let p = kronrod21(&|x: f64| x.powi(30) + 3.0 * x.powi(7), -1.0, 1.0);
        assert!((p.value - 2.0 / 31.0).abs() < 1e-14);
        // G10 is exact to degree 19.
        let p = kronrod21(&|x: f64| x.powi(18), 0.0, 1.0);
        assert!((p.value - 1.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_singular_integrands() {
        let tol = Tolerance::default();
        let v = quad(|x: f64| (-x * x).exp(), -10.0, 10.0, tol).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);

        // ∫₀¹ x ln x = −1/4 with an endpoint log singularity.
        let v = quad(
            |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 },
            0.0,
            1.0,
            tol,
        )
        .unwrap();
        assert!((v + 0.25).abs() < 1e-12);

        // ∫₀¹ x^{-1/2} = 2, a genuine endpoint singularity.
        let v = quad(
            |x: f64| x.powf(-0.5),
            0.0,
            1.0,
            Tolerance::new(1e-11, 1e-11),
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn breaks_handle_kinks() {
        let v = quad_breaks(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], Tolerance::default()).unwrap();
        assert!((v - 2.5).abs() < 1e-14);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = quad(|x: f64| x, 1.0, 0.0, Tolerance::default()).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
    }

    #[test]
    fn nan_integrand_fails() {
        assert!(quad(|_| f64::NAN, 0.0, 1.0, Tolerance::default()).is_err());
    }
}
