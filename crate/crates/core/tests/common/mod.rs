//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Cyclic Jacobi rotations; returns ascending eigenvalues.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let total: f64 = m.iter().flatten().map(|v| v * v).sum();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.random_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// `|x|^p e^{|x|^β}` written out directly.
pub fn potential(p: f64, beta: f64, x: f64) -> f64 {
    let r = x.abs();
    let poly = if p == 0.0 { 1.0 } else { r.powf(p) };
    let expo = if beta == 0.0 { 1.0 } else { r.powf(beta).exp() };
    poly * expo
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1)
}

/// Adaptive Simpson with Richardson correction to absolute accuracy `eps`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // Pre-split so the first Simpson estimate cannot be accidentally exact.
    let pieces = 16;
    (0..pieces)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / pieces as f64;
            let hi = a + (b - a) * (i + 1) as f64 / pieces as f64;
            let m = 0.5 * (lo + hi);
            let (flo, fm, fhi) = (f(lo), f(m), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
            simpson_step(&f, lo, flo, hi, fhi, m, fm, whole, eps / pieces as f64, 40)
        })
        .sum()
}

/// Root of the increasing function `w(y) = e` on `[0, ∞)` by bisection.
fn bisect_level(p: f64, beta: f64, e: f64) -> f64 {
    let mut hi = 1.0;
    while potential(p, beta, hi) < e {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if potential(p, beta, mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `4∫_{k≥0}∫_{y≥0}(λ − C e^k − W(y))₊ dy dk` by nested adaptive Simpson.
pub fn quadrant_2d(p: f64, beta: f64, lambda: f64, c: f64, rel: f64) -> f64 {
    let w0 = potential(p, beta, 0.0);
    if c >= lambda - w0 {
        return 0.0;
    }
    let k_max = ((lambda - w0) / c).ln();
    // Crude magnitude to turn `rel` into an absolute target.
    let y_top = bisect_level(p, beta, lambda);
    let scale = lambda * y_top * k_max;
    let slice = |k: f64| {
        let e = lambda - c * k.exp();
        if e <= w0 {
            return 0.0;
        }
        let y_e = bisect_level(p, beta, e);
        adaptive_simpson(
            |y| (e - potential(p, beta, y)).max(0.0),
            0.0,
            y_e,
            0.1 * rel * scale / k_max,
        )
    };
    4.0 * adaptive_simpson(slice, 0.0, k_max, rel * scale)
}
