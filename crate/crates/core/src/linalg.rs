//! Dense symmetric linear algebra: Householder tridiagonalization with
//! implicit-shift QL for the spectrum, tridiagonal inverse iteration for
//! selected eigenvectors, and a Bunch–Kaufman `LDLᵀ` factorization whose
//! pivot signs give the inertia of `A − σI` (Sylvester's law).

use crate::{Error, Result};

/// Dense row-major square matrix, intended to hold symmetric data.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain("matrix must be square".into()));
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        if m.asymmetry() != 0.0 {
            return Err(Error::Domain("matrix must be symmetric".into()));
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Infinity norm (max absolute row sum); equals the 1-norm for symmetric data.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Householder reduction `A = Q T Qᵀ` with `T` tridiagonal.
#[derive(Debug, Clone)]
pub struct Tridiagonalization {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
    /// Reflector `k` acts on indices `k+1..n` as `I − β v vᵀ`.
    reflectors: Vec<(f64, Vec<f64>)>,
}

impl Tridiagonalization {
    pub fn new(a: &SymMatrix) -> Self {
        let n = a.n;
        let mut work = a.data.clone();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![0.0; n];

        for k in 0..n.saturating_sub(2) {
            let m = n - k - 1;
            let col: Vec<f64> = (k + 1..n).map(|i| work[i * n + k]).collect();
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            diag[k] = work[k * n + k];
            let tail_norm = col[1..].iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            if tail_norm == 0.0 {
                off[k] = col[0];
                reflectors.push((0.0, Vec::new()));
                continue;
            }
            let alpha = if col[0] >= 0.0 { -norm } else { norm };
            let mut v = col;
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let beta = 2.0 / vtv;
            off[k] = alpha;

            // p = β A₂₂ v
            for (ii, pi) in p[..m].iter_mut().enumerate() {
                let row = &work[(k + 1 + ii) * n + k + 1..(k + 1 + ii) * n + n];
                *pi = beta * row.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
            }
            let half_kappa = 0.5 * beta * p[..m].iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
            // w = p − (β/2)(pᵀv) v
            let w: Vec<f64> = p[..m]
                .iter()
                .zip(&v)
                .map(|(pi, vi)| pi - half_kappa * vi)
                .collect();
            for ii in 0..m {
                let (vi, wi) = (v[ii], w[ii]);
                let row = &mut work[(k + 1 + ii) * n + k + 1..(k + 1 + ii) * n + n];
                for ((r, vj), wj) in row.iter_mut().zip(&v).zip(&w) {
                    *r -= vi * wj + wi * vj;
                }
            }
            reflectors.push((beta, v));
        }
        if n >= 2 {
            diag[n - 2] = work[(n - 2) * n + n - 2];
            off[n - 2] = work[(n - 1) * n + n - 2];
        }
        if n >= 1 {
            diag[n - 1] = work[(n - 1) * n + n - 1];
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    /// Maps an eigenvector of `T` back to one of `A`.
    pub fn back_transform(&self, z: &mut [f64]) {
        for (k, (beta, v)) in self.reflectors.iter().enumerate().rev() {
            if *beta == 0.0 {
                continue;
            }
            let seg = &mut z[k + 1..];
            let dot: f64 = seg.iter().zip(v).map(|(a, b)| a * b).sum();
            let scale = beta * dot;
            seg.iter_mut().zip(v).for_each(|(s, vi)| *s -= scale * vi);
        }
    }

    /// Eigenvector of `A` for an (already computed) eigenvalue, by inverse
    /// iteration on `T` followed by back-transformation. Unit 2-norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.25 * ((i as f64) * 0.754_877_666).sin())
            .collect();
        for _ in 0..4 {
            x = solve_shifted_tridiagonal(&self.diag, &self.off, lambda, &x, scale);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        self.back_transform(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        x
    }
}

/// Solves `(T − σI) x = b` by Gaussian elimination with partial pivoting.
/// Exactly singular pivots are nudged to `ε·scale`.
fn solve_shifted_tridiagonal(
    diag: &[f64],
    off: &[f64],
    sigma: f64,
    rhs: &[f64],
    scale: f64,
) -> Vec<f64> {
    let n = diag.len();
    let tiny = f64::EPSILON * scale;
    let mut b: Vec<f64> = diag.iter().map(|d| d - sigma).collect();
    let mut c: Vec<f64> = off.to_vec();
    c.push(0.0);
    let mut c2 = vec![0.0; n];
    let mut r = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        let sub = off[i];
        if b[i].abs() >= sub.abs() {
            if b[i] == 0.0 {
                b[i] = tiny;
            }
            let f = sub / b[i];
            b[i + 1] -= f * c[i];
            r[i + 1] -= f * r[i];
        } else {
            let f = b[i] / sub;
            let next_c = if i + 1 < n - 1 { c[i + 1] } else { 0.0 };
            let (old_b, old_c) = (b[i], c[i]);
            b[i] = sub;
            c[i] = b[i + 1];
            c2[i] = next_c;
            b[i + 1] = old_c - f * c[i];
            if i + 1 < n - 1 {
                c[i + 1] = -f * next_c;
            }
            let _ = old_b;
            r.swap(i, i + 1);
            r[i + 1] -= f * r[i];
        }
    }
    if b[n - 1] == 0.0 {
        b[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = r[i];
        if i + 1 < n {
            acc -= c[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= c2[i] * x[i + 2];
        }
        x[i] = acc / b[i];
    }
    x
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL,
/// returned in ascending order.
///
/// Fails if any eigenvalue needs more than 50 sweeps.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Convergence(format!(
                    "QL iteration stalled at eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Full spectrum of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    let tri = Tridiagonalization::new(a);
    tridiagonal_eigenvalues(&tri.diag, &tri.off)
}

/// Inertia of `A − σI` from a Bunch–Kaufman symmetric-indefinite
/// factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Computes the inertia of `A − σI` with Bunch–Kaufman pivoting.
///
/// Fails with [`Error::Convergence`] if the factorization produces
/// non-finite entries.
pub fn shifted_inertia(a: &SymMatrix, sigma: f64) -> Result<Inertia> {
    let n = a.n;
    let mut w = a.data.clone();
    for i in 0..n {
        w[i * n + i] -= sigma;
    }
    let alpha = (1.0 + 17.0_f64.sqrt()) / 8.0;
    let mut inertia = Inertia {
        negative: 0,
        zero: 0,
        positive: 0,
    };
    let swap_sym = |w: &mut [f64], r: usize, s: usize| {
        if r == s {
            return;
        }
        for j in 0..n {
            w.swap(r * n + j, s * n + j);
        }
        for i in 0..n {
            w.swap(i * n + r, i * n + s);
        }
    };

    let mut k = 0;
    while k < n {
        let absakk = w[k * n + k].abs();
        let (imax, colmax) =
            (k + 1..n)
                .map(|i| (i, w[i * n + k].abs()))
                .fold(
                    (k, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );

        if absakk.max(colmax) == 0.0 {
            inertia.zero += 1;
            k += 1;
            continue;
        }

        let two_by_two = if absakk >= alpha * colmax {
            false
        } else {
            let rowmax = (k..n)
                .filter(|&j| j != imax)
                .map(|j| w[imax * n + j].abs())
                .fold(0.0, f64::max);
            if absakk * rowmax >= alpha * colmax * colmax {
                false
            } else if w[imax * n + imax].abs() >= alpha * rowmax {
                swap_sym(&mut w, k, imax);
                false
            } else {
                swap_sym(&mut w, k + 1, imax);
                true
            }
        };

        if !two_by_two {
            let d = w[k * n + k];
            if !d.is_finite() {
                return Err(Error::Convergence("LDLᵀ pivot is not finite".into()));
            }
            match d.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Less) => inertia.negative += 1,
                Some(std::cmp::Ordering::Greater) => inertia.positive += 1,
                _ => inertia.zero += 1,
            }
            if d != 0.0 {
                let pivot_row: Vec<f64> = w[k * n + k + 1..k * n + n].to_vec();
                for i in k + 1..n {
                    let l = w[i * n + k] / d;
                    if l == 0.0 {
                        continue;
                    }
                    let row = &mut w[i * n + k + 1..i * n + n];
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(x, p)| *x -= l * p);
                }
            }
            k += 1;
        } else {
            let (a11, a21, a22) = (w[k * n + k], w[(k + 1) * n + k], w[(k + 1) * n + k + 1]);
            let det = a11 * a22 - a21 * a21;
            if !det.is_finite() || det == 0.0 {
                return Err(Error::Convergence(
                    "LDLᵀ 2×2 pivot is singular or not finite".into(),
                ));
            }
            if det < 0.0 {
                inertia.negative += 1;
                inertia.positive += 1;
            } else if a11 + a22 < 0.0 {
                inertia.negative += 2;
            } else {
                inertia.positive += 2;
            }
            let r1: Vec<f64> = w[k * n + k + 2..k * n + n].to_vec();
            let r2: Vec<f64> = w[(k + 1) * n + k + 2..(k + 1) * n + n].to_vec();
            for i in k + 2..n {
                let (x1, x2) = (w[i * n + k], w[i * n + k + 1]);
                let c1 = (a22 * x1 - a21 * x2) / det;
                let c2 = (a11 * x2 - a21 * x1) / det;
                let row = &mut w[i * n + k + 2..i * n + n];
                for ((x, p1), p2) in row.iter_mut().zip(&r1).zip(&r2) {
                    *x -= c1 * p1 + c2 * p2;
                }
            }
            k += 2;
        }
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence(
            "LDLᵀ factorization produced non-finite entries".into(),
        ));
    }
    Ok(inertia)
}
