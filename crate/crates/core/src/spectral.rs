//! Periodic discretization of `H = F⁻¹ cosh(ξ) F + W` and its spectrum.
//!
//! On the grid `x_j = −L + jh`, the kinetic part is the circulant matrix
//! `C_{jk} = (1/N) Σ_m cosh(ξ_m) cos(2πm(j−k)/N)`, which is real because
//! `cosh` is even. The potential is added on the diagonal.

use crate::linalg::{self, SymMatrix, Tridiagonalization};
use crate::potential::PotentialSpec;
use crate::{Error, Result};

/// Uniform periodic grid on `[−L, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_extent: f64,
    n: usize,
}

/// Builds the grid `x_j = −L + j·2L/N`.
pub fn build_grid(half_extent: f64, n: usize) -> Result<Grid> {
    if !(half_extent > 0.0 && half_extent.is_finite()) {
        return Err(Error::Domain(format!(
            "grid half-extent must be positive, got {half_extent}"
        )));
    }
    if n < 8 || n % 2 != 0 {
        return Err(Error::Domain(format!(
            "grid size must be even and at least 8, got {n}"
        )));
    }
    Ok(Grid { half_extent, n })
}

impl Grid {
    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Frequencies `ξ_m = m/(Nh)` for `m = −N/2..N/2−1`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n as i64;
        let nh = self.n as f64 * self.spacing();
        (-n / 2..n / 2).map(|m| m as f64 / nh).collect()
    }

    /// `1/(2h)`, the Nyquist frequency.
    pub fn max_frequency(&self) -> f64 {
        0.5 / self.spacing()
    }
}

/// Dense symmetric discretization of `H` on a [`Grid`].
#[derive(Debug, Clone)]
pub struct SymOperator {
    matrix: SymMatrix,
    grid: Grid,
    spec: Option<PotentialSpec>,
}

impl SymOperator {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `None` for the kinetic-only operator.
    pub fn spec(&self) -> Option<&PotentialSpec> {
        self.spec.as_ref()
    }
}

fn kinetic_circulant(grid: &Grid) -> Result<Vec<f64>> {
    let xi_max = grid.max_frequency();
    if !xi_max.cosh().is_finite() {
        return Err(Error::Range { argument: xi_max });
    }
    let n = grid.n;
    let cosh_xi: Vec<f64> = grid.frequencies().iter().map(|x| x.cosh()).collect();
    let cos_table: Vec<f64> = (0..n)
        .map(|r| (2.0 * std::f64::consts::PI * r as f64 / n as f64).cos())
        .collect();
    let half = n as i64 / 2;
    Ok((0..n)
        .map(|d| {
            let sum: f64 = cosh_xi
                .iter()
                .enumerate()
                .map(|(idx, c)| {
                    let m = idx as i64 - half;
                    let r = (m * d as i64).rem_euclid(n as i64) as usize;
                    c * cos_table[r]
                })
                .sum();
            sum / n as f64
        })
        .collect())
}

fn from_circulant(grid: &Grid, row: &[f64], diag: &[f64]) -> SymMatrix {
    let n = grid.n;
    let mut a = SymMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            let d = (j + n - k) % n;
            // row[d] == row[n − d] mathematically; use the smaller index both ways so A is exactly symmetric.
            let v = row[d.min(n - d)];
            a.set(j, k, v);
        }
        a.set(j, j, a.get(j, j) + diag[j]);
    }
    a
}

/// Assembles `C + diag(W(x_j))`.
///
/// Fails if `cosh(ξ_max)` or any `W(x_j)` overflows.
pub fn assemble(grid: &Grid, spec: &PotentialSpec) -> Result<SymOperator> {
    let row = kinetic_circulant(grid)?;
    let diag = grid
        .nodes()
        .iter()
        .map(|&x| spec.eval(x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SymOperator {
        matrix: from_circulant(grid, &row, &diag),
        grid: *grid,
        spec: Some(*spec),
    })
}

/// Kinetic part only (`W ≡ 0`), whose spectrum is exactly `{cosh(ξ_m)}`.
pub fn assemble_kinetic(grid: &Grid) -> Result<SymOperator> {
    let row = kinetic_circulant(grid)?;
    let diag = vec![0.0; grid.n];
    Ok(SymOperator {
        matrix: from_circulant(grid, &row, &diag),
        grid: *grid,
        spec: None,
    })
}

/// Headroom of a grid for energies up to `lambda_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionDiagnostics {
    pub lambda_max: f64,
    pub margin: f64,
    pub frequency_ok: bool,
    pub domain_ok: bool,
    /// `cosh(1/(2h)) / (margin·λ_max)`.
    pub frequency_headroom: f64,
    /// `W(L) / (margin·λ_max)`.
    pub domain_headroom: f64,
}

impl ResolutionDiagnostics {
    pub fn ok(&self) -> bool {
        self.frequency_ok && self.domain_ok
    }

    /// Converts a failing diagnostic into [`Error::Resolution`].
    pub fn require(&self) -> Result<()> {
        if self.ok() {
            Ok(())
        } else {
            Err(Error::Resolution(format!(
                "grid does not resolve λ ≤ {} with margin {}: frequency headroom {:.4}, domain headroom {:.4}",
                self.lambda_max, self.margin, self.frequency_headroom, self.domain_headroom
            )))
        }
    }
}

pub fn resolution_check(
    grid: &Grid,
    spec: &PotentialSpec,
    lambda_max: f64,
    margin: f64,
) -> ResolutionDiagnostics {
    let need = margin * lambda_max;
    let frequency_headroom = grid.max_frequency().cosh() / need;
    let domain_headroom = spec.value(grid.half_extent) / need;
    ResolutionDiagnostics {
        lambda_max,
        margin,
        frequency_ok: frequency_headroom >= 1.0,
        domain_ok: domain_headroom >= 1.0,
        frequency_headroom,
        domain_headroom,
    }
}

/// Sorted spectrum of a [`SymOperator`].
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub grid: Option<Grid>,
    pub spec: Option<PotentialSpec>,
    /// Largest `‖Av − λv‖ / ‖A‖` over the sampled eigenpairs.
    pub backward_error: f64,
}

impl SpectrumResult {
    /// Wraps an already sorted list, e.g. for tests.
    pub fn from_sorted(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Domain(
                "eigenvalues must be sorted nondecreasing".into(),
            ));
        }
        Ok(Self {
            eigenvalues,
            grid: None,
            spec: None,
            backward_error: 0.0,
        })
    }

    pub fn resolution(&self, lambda_max: f64, margin: f64) -> Option<ResolutionDiagnostics> {
        match (&self.grid, &self.spec) {
            (Some(g), Some(s)) => Some(resolution_check(g, s, lambda_max, margin)),
            _ => None,
        }
    }

    /// `#{j : λ_j ≤ λ}`.
    pub fn count(&self, lambda: f64) -> usize {
        self.eigenvalues.partition_point(|&e| e <= lambda)
    }
}

const SAMPLED_PAIRS: usize = 10;

/// Full spectrum by Householder tridiagonalization and implicit QL.
///
/// Ten eigenpairs spread over the spectrum are checked for backward error
/// `‖Av − λv‖ ≤ 1e−10‖A‖`; a failure is reported as [`Error::Contract`].
pub fn eigenvalues(op: &SymOperator) -> Result<SpectrumResult> {
    let a = &op.matrix;
    let tri = Tridiagonalization::new(a);
    let values = linalg::tridiagonal_eigenvalues(&tri.diag, &tri.off)?;
    let norm = a.norm_inf();
    let n = values.len();
    let mut worst: f64 = 0.0;
    if n > 0 {
        // Deterministic scatter of indices (golden-ratio stride).
        let picks: Vec<usize> = (0..SAMPLED_PAIRS.min(n))
            .map(|i| ((i as f64 * 0.618_033_988_749_895 + 0.1).fract() * n as f64) as usize)
            .collect();
        for idx in picks {
            let lam = values[idx.min(n - 1)];
            let v = tri.eigenvector(lam);
            let av = a.mul_vec(&v);
            let res = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lam * y).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(res / norm.max(f64::MIN_POSITIVE));
        }
    }
    if worst > 1e-10 {
        return Err(Error::Contract(format!(
            "eigenpair backward error {worst:e} exceeds 1e-10·‖A‖"
        )));
    }
    Ok(SpectrumResult {
        eigenvalues: values,
        grid: Some(op.grid),
        spec: op.spec,
        backward_error: worst,
    })
}

/// `#{λ_j ≤ λ}` from the inertia of `A − (λ + 1e−12‖A‖)I`, falling back to
/// the full spectrum if the factorization breaks down.
pub fn count_below(op: &SymOperator, lambda: f64) -> Result<usize> {
    let shift = lambda + 1e-12 * op.matrix.norm_inf();
    match linalg::shifted_inertia(&op.matrix, shift) {
        Ok(inertia) => Ok(inertia.negative),
        Err(_) => Ok(eigenvalues(op)?.count(shift)),
    }
}

/// `Σ_j (λ − λ_j)₊`.
pub fn riesz_mean(spectrum: &SpectrumResult, lambda: f64) -> f64 {
    spectrum
        .eigenvalues
        .iter()
        .take_while(|&&e| e < lambda)
        .map(|&e| lambda - e)
        .sum()
}

/// `∫₀^λ N(t) dt`, summed exactly over the steps of the counting function.
pub fn layer_cake(spectrum: &SpectrumResult, lambda: f64) -> f64 {
    let ev = &spectrum.eigenvalues;
    let mut total = 0.0;
    let mut j = 0;
    while j < ev.len() && ev[j] < lambda {
        let start = ev[j].max(0.0);
        // Skip the whole cluster of equal eigenvalues at once.
        let mut count = j + 1;
        while count < ev.len() && ev[count] == ev[j] {
            count += 1;
        }
        let end = if count < ev.len() {
            ev[count].min(lambda)
        } else {
            lambda
        };
        total += count as f64 * (end - start).max(0.0);
        j = count;
    }
    total
}
