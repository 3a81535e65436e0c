//! Spectral measures, Cauchy-transform evaluation, and Stieltjes inversion.

mod measure;

pub use measure::AnalyticMeasure;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A map z ↦ G(z) on the open upper half-plane: closed-form, fixed-point
/// solved, or empirical. Implementations must satisfy Im G(z) < 0 for
/// Im z > 0 and G(z) → 1/z at infinity.
pub trait CauchyEvaluator: Sync {
    fn cauchy(&self, z: Complex64) -> Result<Complex64>;

    /// Like [`cauchy`](Self::cauchy) but also reports the iteration count of
    /// any internal solve (0 for closed forms).
    fn cauchy_info(&self, z: Complex64) -> Result<(Complex64, u32)> {
        Ok((self.cauchy(z)?, 0))
    }

    /// H(z) = 1/G(z) - z, the reluctance form of the subordination map.
    fn h(&self, z: Complex64) -> Result<Complex64> {
        let g = self.cauchy(z)?;
        if g.norm() < 1e-300 {
            return Err(Error::ZeroCauchy);
        }
        Ok(1.0 / g - z)
    }
}

impl CauchyEvaluator for AnalyticMeasure {
    fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        AnalyticMeasure::cauchy(self, z)
    }
}

/// Wraps a closure as an evaluator; handy for tests and for the PDE checker.
pub struct FnEvaluator<F: Fn(Complex64) -> Result<Complex64> + Sync>(pub F);

impl<F: Fn(Complex64) -> Result<Complex64> + Sync> CauchyEvaluator for FnEvaluator<F> {
    fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        (self.0)(z)
    }
}

/// A sampled density ρ(λ) on a strictly increasing grid; the universal
/// comparison object between analytics and Monte Carlo.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl DensityCurve {
    /// Checks the type invariants: strictly increasing grid, nonnegative
    /// values, trapezoid mass within [0, 1 + 1e-6].
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let c = Self::new_unnormalized(grid, values)?;
        let mass = c.mass();
        if !(0.0..=1.0 + 1e-6).contains(&mass) {
            return Err(Error::InvalidCurve(format!("mass {mass} outside [0, 1+1e-6]")));
        }
        Ok(c)
    }

    /// Same structural checks but no mass cap; used for curves that carry
    /// integrable edge singularities clipped onto a finite grid.
    pub fn new_unnormalized(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidCurve("grid/value length mismatch".into()));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidCurve("need at least two grid points".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidCurve("grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidCurve("values must be finite and >= 0".into()));
        }
        Ok(DensityCurve { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Trapezoid integral of the curve.
    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid[i] - self.grid[i - 1]);
        }
        acc
    }

    /// Linear interpolation, zero outside the grid range.
    pub fn interpolate(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x < g[0] || x > *g.last().unwrap() {
            return 0.0;
        }
        let idx = match g.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (x0, x1) = (g[idx - 1], g[idx]);
        let t = (x - x0) / (x1 - x0);
        self.values[idx - 1] * (1.0 - t) + self.values[idx] * t
    }

    /// Trapezoid ∫ ρ(λ) λ^k dλ of the sampled curve.
    pub fn moment(&self, k: u32) -> f64 {
        let f: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(x, v)| v * x.powi(k as i32))
            .collect();
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            acc += 0.5 * (f[i] + f[i - 1]) * (self.grid[i] - self.grid[i - 1]);
        }
        acc
    }

    /// Rescale values so the trapezoid mass is one.
    pub fn renormalized(&self) -> DensityCurve {
        let m = self.mass();
        if m <= 0.0 {
            return self.clone();
        }
        DensityCurve {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v / m).collect(),
        }
    }
}

/// A density curve together with per-point solver status. Points that failed
/// to converge keep a zero value but are flagged, never interpolated over.
#[derive(Debug, Clone)]
pub struct CurveReport {
    pub curve: DensityCurve,
    pub converged: Vec<bool>,
    pub iterations: Vec<u32>,
}

impl CurveReport {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&b| b)
    }

    pub fn failed_count(&self) -> usize {
        self.converged.iter().filter(|&&b| !b).count()
    }
}

/// Sorted eigenvalues of one realized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::EmptyInput("spectrum must hold at least one eigenvalue".into()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("eigenvalues must be finite".into()));
        }
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Spectrum { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn mean(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.n() as f64
    }

    /// Empirical Cauchy transform (1/n) Σ 1/(z - aᵢ).
    pub fn empirical_cauchy(&self, z: Complex64) -> Result<Complex64> {
        if z.im <= 0.0 {
            return Err(Error::LowerHalfPlane);
        }
        let sum: Complex64 = self.eigenvalues.iter().map(|&a| 1.0 / (z - a)).sum();
        Ok(sum / self.n() as f64)
    }
}

impl CauchyEvaluator for Spectrum {
    fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        self.empirical_cauchy(z)
    }
}

/// Stieltjes inversion ρ(λ) = -Im G(λ + iε)/π on a grid, clamped at zero
/// from below. With `extrapolate`, the Richardson step 2ρ_ε - ρ_{2ε} is
/// applied before clamping. Evaluator failures mark the point invalid.
pub fn stieltjes_invert(
    g: &dyn CauchyEvaluator,
    grid: &[f64],
    eps: f64,
    extrapolate: bool,
) -> Result<CurveReport> {
    if eps <= 0.0 {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidCurve("grid must be strictly increasing, len >= 2".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut converged = Vec::with_capacity(grid.len());
    let mut iterations = Vec::with_capacity(grid.len());
    for &lam in grid {
        let point = (|| -> Result<(f64, u32)> {
            let (g1, it1) = g.cauchy_info(Complex64::new(lam, eps))?;
            let rho1 = -g1.im / std::f64::consts::PI;
            if !extrapolate {
                return Ok((rho1, it1));
            }
            let (g2, it2) = g.cauchy_info(Complex64::new(lam, 2.0 * eps))?;
            let rho2 = -g2.im / std::f64::consts::PI;
            Ok((2.0 * rho1 - rho2, it1 + it2))
        })();
        match point {
            Ok((rho, it)) => {
                values.push(rho.max(0.0));
                converged.push(true);
                iterations.push(it);
            }
            Err(_) => {
                values.push(0.0);
                converged.push(false);
                iterations.push(0);
            }
        }
    }
    Ok(CurveReport {
        curve: DensityCurve::new_unnormalized(grid.to_vec(), values)?,
        converged,
        iterations,
    })
}

/// Convenience: a uniform grid lo..hi with n points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo, "need n >= 2 and hi > lo");
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
