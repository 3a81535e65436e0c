//! Free additive convolution via the subordination fixed point.
//!
//! For free A and B, the subordination functions satisfy
//!     ω_A(z) = z + H_B(z + H_A(ω_A(z))),      H(z) = 1/G(z) - z,
//! with G_C(z) = G_A(ω_A(z)) = G_B(ω_B(z)) and ω_B = z + H_A(ω_A). The
//! fixed point is solved by damped iteration; H maps ℂ⁺ into ℂ⁺ ∪ ℝ, so the
//! iterates stay evaluable (a clamp at `min_im` guards the roundoff edge).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::transforms::{AnalyticMeasure, CauchyEvaluator, CurveReport, DensityCurve};

/// Damping, tolerance, iteration cap, and the imaginary-part floor shared by
/// every self-consistent solve in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: u32,
    pub min_im: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig { damping: 0.5, tol: 1e-12, max_iter: 10_000, min_im: 1e-8 }
    }
}

impl FixedPointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!("damping must be in (0,1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if !(self.min_im > 0.0) {
            return Err(Error::InvalidConfig("min_im must be positive".into()));
        }
        Ok(())
    }
}

/// Converged subordination data at one point z.
#[derive(Debug, Clone, Copy)]
pub struct SubordinationResult {
    pub omega_a: Complex64,
    pub omega_b: Complex64,
    pub g_c: Complex64,
    pub iterations: u32,
    pub residual: f64,
}

const CLAMP_BUDGET: u32 = 100;

fn clamp_up(z: Complex64, min_im: f64, clamps: &mut u32) -> Complex64 {
    if z.im < min_im {
        *clamps += 1;
        Complex64::new(z.re, min_im)
    } else {
        z
    }
}

/// Solves ω = z + H_B(z + H_A(ω)) started at `omega0` (use z for a cold
/// start). The base step is the damped Picard update; every pass also tries
/// an Aitken Δ² jump, accepted only when it stays in ℂ⁺ and shrinks the map
/// residual. Close to the real axis the Picard multiplier has modulus one on
/// the support (neutral fixed point), where Δ² restores convergence.
pub fn subordination_solve_from(
    a: &dyn CauchyEvaluator,
    b: &dyn CauchyEvaluator,
    z: Complex64,
    omega0: Complex64,
    cfg: &FixedPointConfig,
) -> Result<SubordinationResult> {
    if z.im <= 0.0 {
        return Err(Error::LowerHalfPlane);
    }
    cfg.validate()?;
    let mut omega = if omega0.im > 0.0 { omega0 } else { z };
    let mut clamps = 0u32;
    let mut residual = f64::INFINITY;

    let mut map = |w: Complex64, clamps: &mut u32| -> Result<Complex64> {
        let inner = clamp_up(z + a.h(w)?, cfg.min_im, clamps);
        Ok(z + b.h(inner)?)
    };

    let finish = |omega: Complex64, k: u32, residual: f64, clamps: &mut u32| -> Result<SubordinationResult> {
        let omega_b = clamp_up(z + a.h(omega)?, cfg.min_im, clamps);
        let g_c = a.cauchy(omega)?;
        let cross = (b.cauchy(omega_b)? - g_c).norm();
        if cross > 10.0 * cfg.tol {
            return Err(Error::NoConvergence { iterations: k, residual: cross });
        }
        Ok(SubordinationResult { omega_a: omega, omega_b, g_c, iterations: k, residual })
    };

    for k in 1..=cfg.max_iter {
        let t1 = map(omega, &mut clamps)?;
        residual = (t1 - omega).norm();
        if residual <= cfg.tol {
            return finish(omega, k, residual, &mut clamps);
        }
        let t2 = map(t1, &mut clamps)?;
        let r2 = (t2 - t1).norm();
        if r2 <= cfg.tol {
            return finish(t1, k, r2, &mut clamps);
        }
        let d1 = t1 - omega;
        let d2 = t2 - t1;
        let denom = d2 - d1;
        let mut accepted = false;
        if denom.norm() > 1e-300 {
            let acc = omega - d1 * d1 / denom;
            if acc.im >= cfg.min_im {
                if let Ok(tacc) = map(acc, &mut clamps) {
                    let racc = (tacc - acc).norm();
                    if racc <= cfg.tol {
                        return finish(acc, k, racc, &mut clamps);
                    }
                    if racc < 0.5 * r2 {
                        omega = acc;
                        accepted = true;
                    }
                }
            }
        }
        if !accepted {
            omega = clamp_up(
                t1 * (1.0 - cfg.damping) + t2 * cfg.damping,
                cfg.min_im,
                &mut clamps,
            );
        }
        if clamps > CLAMP_BUDGET {
            return Err(Error::NoConvergence { iterations: k, residual });
        }
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, residual })
}

/// Cold-started subordination solve at z.
pub fn subordination_solve(
    a: &dyn CauchyEvaluator,
    b: &dyn CauchyEvaluator,
    z: Complex64,
    cfg: &FixedPointConfig,
) -> Result<SubordinationResult> {
    subordination_solve_from(a, b, z, z, cfg)
}

/// The free additive convolution ρ_A ⊞ ρ_B as a Cauchy evaluator; each call
/// runs the subordination fixed point at that z, so evaluators can be nested
/// (η-fold convolutions build Kesten-McKay out of Bernoulli factors).
pub struct FreeConvolution<'a> {
    pub a: &'a dyn CauchyEvaluator,
    pub b: &'a dyn CauchyEvaluator,
    pub cfg: FixedPointConfig,
}

impl<'a> FreeConvolution<'a> {
    pub fn new(a: &'a dyn CauchyEvaluator, b: &'a dyn CauchyEvaluator) -> Self {
        FreeConvolution { a, b, cfg: FixedPointConfig::default() }
    }
}

impl CauchyEvaluator for FreeConvolution<'_> {
    fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        Ok(subordination_solve(self.a, self.b, z, &self.cfg)?.g_c)
    }

    fn cauchy_info(&self, z: Complex64) -> Result<(Complex64, u32)> {
        let r = subordination_solve(self.a, self.b, z, &self.cfg)?;
        Ok((r.g_c, r.iterations))
    }
}

/// Grid points are solved in fixed blocks of this many points; within a
/// block the solves warm-start from the left neighbour, block boundaries
/// restart cold from ω₀ = z. The partition is independent of the worker
/// count, so outputs are bit-identical for any parallelism.
const WARM_BLOCK: usize = 64;

struct PointOutcome {
    rho: f64,
    converged: bool,
    iterations: u32,
}

fn convolve_block(
    a: &dyn CauchyEvaluator,
    b: &dyn CauchyEvaluator,
    lambdas: &[f64],
    eps: f64,
    cfg: &FixedPointConfig,
) -> Vec<PointOutcome> {
    let mut out = Vec::with_capacity(lambdas.len());
    // independent warm-start chains for the two Richardson levels
    let mut warm_full: Option<Complex64> = None;
    let mut warm_half: Option<Complex64> = None;
    for &lam in lambdas {
        let z_full = Complex64::new(lam, eps);
        let z_half = Complex64::new(lam, 0.5 * eps);
        let full = subordination_solve_from(a, b, z_full, warm_full.unwrap_or(z_full), cfg);
        let half = subordination_solve_from(a, b, z_half, warm_half.unwrap_or(z_half), cfg);
        match (full, half) {
            (Ok(rf), Ok(rh)) => {
                warm_full = Some(rf.omega_a);
                warm_half = Some(rh.omega_a);
                let rho_full = -rf.g_c.im / std::f64::consts::PI;
                let rho_half = -rh.g_c.im / std::f64::consts::PI;
                out.push(PointOutcome {
                    rho: (2.0 * rho_half - rho_full).max(0.0),
                    converged: true,
                    iterations: rf.iterations + rh.iterations,
                });
            }
            _ => {
                warm_full = None;
                warm_half = None;
                out.push(PointOutcome { rho: 0.0, converged: false, iterations: 0 });
            }
        }
    }
    out
}

/// Density of ρ_A ⊞ ρ_B on `grid`: subordination solves at λ + iε and
/// λ + iε/2 followed by Richardson-extrapolated Stieltjes inversion.
/// Failed points are flagged in the report, not interpolated.
pub fn free_convolve_density(
    a: &dyn CauchyEvaluator,
    b: &dyn CauchyEvaluator,
    grid: &[f64],
    eps: f64,
    cfg: &FixedPointConfig,
) -> Result<CurveReport> {
    if eps <= 0.0 {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidCurve("grid must be strictly increasing, len >= 2".into()));
    }
    let outcomes: Vec<PointOutcome> = grid
        .par_chunks(WARM_BLOCK)
        .flat_map_iter(|chunk| convolve_block(a, b, chunk, eps, cfg))
        .collect();
    let values: Vec<f64> = outcomes.iter().map(|p| p.rho).collect();
    Ok(CurveReport {
        curve: DensityCurve::new_unnormalized(grid.to_vec(), values)?,
        converged: outcomes.iter().map(|p| p.converged).collect(),
        iterations: outcomes.iter().map(|p| p.iterations).collect(),
    })
}

/// Support radius bound for grid sizing: the support of ρ_A ⊞ ρ_B lies in
/// the Minkowski sum of the two supports.
pub fn convolved_support(ma: &AnalyticMeasure, mb: &AnalyticMeasure) -> (f64, f64) {
    let (alo, ahi) = ma.support();
    let (blo, bhi) = mb.support();
    (alo + blo, ahi + bhi)
}

/// Classical (commuting) convolution of two sampled densities on a target
/// grid: ρ_c(λ) = Σ ca(μ)·cb(λ-μ)·h, renormalized to unit mass. All three
/// grids must share one uniform spacing.
pub fn classical_convolve_density(
    ca: &DensityCurve,
    cb: &DensityCurve,
    grid: &[f64],
) -> Result<DensityCurve> {
    let h = uniform_step(ca.grid()).ok_or_else(|| {
        Error::GridMismatch("first curve grid is not uniform".into())
    })?;
    let hb = uniform_step(cb.grid()).ok_or_else(|| {
        Error::GridMismatch("second curve grid is not uniform".into())
    })?;
    let hg = uniform_step(grid).ok_or_else(|| {
        Error::GridMismatch("output grid is not uniform".into())
    })?;
    if (h - hb).abs() > 1e-9 * h || (h - hg).abs() > 1e-9 * h {
        return Err(Error::GridMismatch(format!(
            "grids must share one spacing: {h} vs {hb} vs {hg}"
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &lam in grid {
        let mut acc = 0.0;
        for (mu, w) in ca.grid().iter().zip(ca.values()) {
            acc += w * cb.interpolate(lam - mu);
        }
        values.push(acc * h);
    }
    Ok(DensityCurve::new_unnormalized(grid.to_vec(), values)?.renormalized())
}

fn uniform_step(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let h = grid[1] - grid[0];
    let ok = grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if ok && h > 0.0 {
        Some(h)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::linspace;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bernoulli_pair_gives_arcsine_transform() {
        let b = AnalyticMeasure::Bernoulli;
        let cfg = FixedPointConfig::default();
        let r = subordination_solve(&b, &b, c(0.0, 1.0), &cfg).unwrap();
        let want = c(0.0, -1.0 / 5.0f64.sqrt());
        assert!((r.g_c - want).norm() < 1e-11, "G_C = {}, want {want}", r.g_c);
        assert!(r.residual <= cfg.tol);
    }

    #[test]
    fn dirac_shift_is_exact() {
        let m = AnalyticMeasure::semicircle(1.0);
        let d = AnalyticMeasure::DiracMass { c: 0.7 };
        let cfg = FixedPointConfig::default();
        let z = c(0.3, 0.9);
        let r = subordination_solve(&m, &d, z, &cfg).unwrap();
        let want = m.cauchy(z - 0.7).unwrap();
        assert!((r.g_c - want).norm() < 1e-11, "{} vs {want}", r.g_c);
        assert!((r.omega_a - (z - 0.7)).norm() < 1e-10, "omega_a = {}", r.omega_a);
    }

    #[test]
    fn semicircle_variances_add() {
        let s1 = AnalyticMeasure::semicircle(1.0);
        let s2 = AnalyticMeasure::semicircle(2.0);
        let cfg = FixedPointConfig::default();
        let z = c(0.0, 1.0);
        let r = subordination_solve(&s1, &s1, z, &cfg).unwrap();
        let want = s2.cauchy(z).unwrap();
        assert!((r.g_c - want).norm() < 1e-11, "{} vs {want}", r.g_c);
        // closed value: (i - 3i)/4 = -i/2
        assert!((r.g_c - c(0.0, -0.5)).norm() < 1e-11);
    }

    #[test]
    fn subordination_stays_in_upper_half_plane() {
        let a = AnalyticMeasure::Arcsine;
        let b = AnalyticMeasure::semicircle(1.0);
        let cfg = FixedPointConfig::default();
        for i in 0..13 {
            let x = -6.0 + i as f64;
            for y in [0.01, 0.1, 1.0] {
                let z = c(x, y);
                let r = subordination_solve(&a, &b, z, &cfg).unwrap();
                assert!(r.omega_a.im >= z.im - cfg.tol, "Im ω_A < Im z at {z}");
                assert!(r.omega_b.im >= z.im - cfg.tol, "Im ω_B < Im z at {z}");
                // two-route consistency
                let ga = a.cauchy(r.omega_a).unwrap();
                let gb = b.cauchy(r.omega_b).unwrap();
                assert!((ga - gb).norm() <= 10.0 * cfg.tol);
            }
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        let b = AnalyticMeasure::Bernoulli;
        let cfg = FixedPointConfig::default();
        assert!(matches!(
            subordination_solve(&b, &b, c(0.0, -1.0), &cfg),
            Err(Error::LowerHalfPlane)
        ));
    }

    #[test]
    fn bernoulli_density_matches_arcsine() {
        let b = AnalyticMeasure::Bernoulli;
        let grid = linspace(-1.9, 1.9, 97);
        let rep = free_convolve_density(&b, &b, &grid, 1e-6, &FixedPointConfig::default()).unwrap();
        assert!(rep.all_converged());
        let mut linf: f64 = 0.0;
        for (i, &lam) in grid.iter().enumerate() {
            let want = AnalyticMeasure::Arcsine.density(lam).unwrap();
            linf = linf.max((rep.curve.values()[i] - want).abs());
        }
        assert!(linf <= 1e-6, "L∞ = {linf:e}");
    }

    #[test]
    fn dirac_zero_is_identity() {
        let m = AnalyticMeasure::semicircle(1.0);
        let d = AnalyticMeasure::DiracMass { c: 0.0 };
        let grid = linspace(-1.9, 1.9, 65);
        let rep = free_convolve_density(&m, &d, &grid, 1e-6, &FixedPointConfig::default()).unwrap();
        for (i, &lam) in grid.iter().enumerate() {
            let want = m.density(lam).unwrap();
            assert!(
                (rep.curve.values()[i] - want).abs() < 1e-6,
                "at {lam}: {} vs {want}",
                rep.curve.values()[i]
            );
        }
    }

    #[test]
    fn commutativity() {
        let a = AnalyticMeasure::semicircle(1.0);
        let b = AnalyticMeasure::Arcsine;
        let grid = linspace(-3.5, 3.5, 71);
        let cfg = FixedPointConfig::default();
        let ab = free_convolve_density(&a, &b, &grid, 1e-6, &cfg).unwrap();
        let ba = free_convolve_density(&b, &a, &grid, 1e-6, &cfg).unwrap();
        let linf = ab
            .curve
            .values()
            .iter()
            .zip(ba.curve.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(linf <= 1e-9, "L∞ = {linf:e}");
    }

    #[test]
    fn mean_and_variance_add() {
        let a = AnalyticMeasure::affine(1.0, 0.3, AnalyticMeasure::semicircle(1.0));
        let b = AnalyticMeasure::Arcsine; // variance 2
        let (lo, hi) = convolved_support(&a, &b);
        let grid = linspace(lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo), 801);
        let rep = free_convolve_density(&a, &b, &grid, 1e-5, &FixedPointConfig::default()).unwrap();
        let curve = &rep.curve;
        let mass = curve.mass();
        assert!((mass - 1.0).abs() < 1e-3, "mass {mass}");
        let m1 = curve.moment(1);
        let m2 = curve.moment(2) - m1 * m1;
        let want_mean = a.mean() + b.mean();
        let want_var = a.variance() + b.variance();
        assert!((m1 - want_mean).abs() < 1e-4, "mean {m1} vs {want_mean}");
        assert!((m2 - want_var).abs() < 1e-3, "var {m2} vs {want_var}");
    }

    #[test]
    fn raw_mass_close_to_one_on_padded_grid() {
        let a = AnalyticMeasure::semicircle(1.0);
        let b = AnalyticMeasure::semicircle(1.0);
        let (lo, hi) = convolved_support(&a, &b);
        let grid = linspace(lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo), 1201);
        let rep = free_convolve_density(&a, &b, &grid, 1e-6, &FixedPointConfig::default()).unwrap();
        let mass = rep.curve.mass();
        assert!((0.999..=1.001).contains(&mass), "mass {mass}");
    }

    #[test]
    fn classical_gaussian_self_convolution() {
        let g1 = AnalyticMeasure::gaussian(1.0);
        let grid_in = linspace(-8.0, 8.0, 1601);
        let vals: Vec<f64> = grid_in.iter().map(|&x| g1.density(x).unwrap()).collect();
        let ca = DensityCurve::new_unnormalized(grid_in.clone(), vals).unwrap();
        let grid_out = linspace(-8.0, 8.0, 1601);
        let conv = classical_convolve_density(&ca, &ca, &grid_out).unwrap();
        let g2 = AnalyticMeasure::gaussian(std::f64::consts::SQRT_2);
        let mut linf: f64 = 0.0;
        for (i, &lam) in grid_out.iter().enumerate() {
            linf = linf.max((conv.values()[i] - g2.density(lam).unwrap()).abs());
        }
        assert!(linf <= 1e-4, "L∞ = {linf:e}");
    }

    #[test]
    fn classical_coin_flip_atoms() {
        // Bernoulli realized as two narrow spikes; its classical square has
        // atoms {-2, 0, 2} with masses {1/4, 1/2, 1/4}.
        let h = 0.01;
        let grid_in = linspace(-3.0, 3.0, 601);
        let vals: Vec<f64> = grid_in
            .iter()
            .map(|&x| {
                if (x - 1.0).abs() < 0.5 * h || (x + 1.0).abs() < 0.5 * h {
                    0.5 / h
                } else {
                    0.0
                }
            })
            .collect();
        let ca = DensityCurve::new_unnormalized(grid_in.clone(), vals).unwrap();
        let conv = classical_convolve_density(&ca, &ca, &grid_in).unwrap();
        let mass_near = |center: f64| -> f64 {
            conv.grid()
                .iter()
                .zip(conv.values())
                .filter(|(x, _)| (**x - center).abs() < 0.1)
                .map(|(_, v)| v * h)
                .sum()
        };
        assert!((mass_near(-2.0) - 0.25).abs() < 1e-6, "{}", mass_near(-2.0));
        assert!((mass_near(0.0) - 0.5).abs() < 1e-6, "{}", mass_near(0.0));
        assert!((mass_near(2.0) - 0.25).abs() < 1e-6, "{}", mass_near(2.0));
    }

    #[test]
    fn classical_identity_against_narrow_spike() {
        let m = AnalyticMeasure::semicircle(1.0);
        let grid = linspace(-3.0, 3.0, 1201);
        let h = grid[1] - grid[0];
        let vals: Vec<f64> = grid.iter().map(|&x| m.density(x).unwrap()).collect();
        let ca = DensityCurve::new_unnormalized(grid.clone(), vals).unwrap();
        let spike: Vec<f64> = grid
            .iter()
            .map(|&x| if x.abs() < 0.5 * h { 1.0 / h } else { 0.0 })
            .collect();
        let cb = DensityCurve::new_unnormalized(grid.clone(), spike).unwrap();
        let conv = classical_convolve_density(&ca, &cb, &grid).unwrap();
        let mut linf: f64 = 0.0;
        for (i, &lam) in grid.iter().enumerate() {
            linf = linf.max((conv.values()[i] - m.density(lam).unwrap()).abs());
        }
        assert!(linf <= 2e-3, "L∞ = {linf:e}");
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = DensityCurve::new_unnormalized(vec![0.0, 1.0, 2.0], vec![0.2; 3]).unwrap();
        let b = DensityCurve::new_unnormalized(vec![0.0, 0.5, 1.0], vec![0.2; 3]).unwrap();
        assert!(matches!(
            classical_convolve_density(&a, &b, &[0.0, 1.0, 2.0]),
            Err(Error::GridMismatch(_))
        ));
    }
}
