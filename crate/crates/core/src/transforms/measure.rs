//! The catalog of closed-form spectral measures and their transforms.
//!
//! Every measure here has a compactly supported density (the Gaussian is
//! truncated at ±12σ for quadrature, tail mass < 1e-30) or is purely atomic.
//! Cauchy transforms are evaluated on the branch with Im G < 0 for Im z > 0
//! and G(z) → 1/z at infinity; square roots of (z - lo)(z - hi) are built as
//! products of principal square roots, which lands on that branch for every
//! z in the upper half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad;
use crate::special::faddeeva_w;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Spectral measures with closed-form density / Cauchy / R transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AnalyticMeasure {
    /// Wigner semicircle with variance `variance` on [-2√v, 2√v].
    Semicircle { variance: f64 },
    /// 1/(π√(4-λ²)) on [-2, 2]; the spectral law of the infinite chain.
    Arcsine,
    /// Kesten-McKay with parameter η ≥ 2 on [-2√(η-1), 2√(η-1)].
    #[serde(rename = "kesten_mckay")]
    KestenMcKay { eta: f64 },
    /// Two atoms of mass 1/2 at ±1.
    Bernoulli,
    /// Centered Gaussian, σ > 0, truncated at ±12σ for quadrature.
    Gaussian { sigma: f64 },
    /// Measure induced by orthogonal polynomials with constant recurrence
    /// coefficients: density √(4b-(λ-a)²)/(2π(b+aλ)) on [a-2√b, a+2√b].
    /// Restricted to a² < b, where the measure carries no extra atom.
    #[serde(rename = "orthopoly")]
    OrthoPoly { a: f64, b: f64 },
    /// Unit point mass at c.
    #[serde(rename = "dirac")]
    DiracMass { c: f64 },
    /// Pushforward λ ↦ scale·λ + shift of `base`.
    Affine {
        scale: f64,
        shift: f64,
        base: Box<AnalyticMeasure>,
    },
}

/// √((z-lo)(z-hi)) on the branch that behaves like z at infinity, analytic
/// off [lo, hi]. Valid for Im z > 0.
fn sqrt_edges(z: Complex64, lo: f64, hi: f64) -> Complex64 {
    (z - lo).sqrt() * (z - hi).sqrt()
}

fn sqrt_edges_jet(zj: Jet, lo: f64, hi: f64) -> Jet {
    let w = (zj - Jet::real_constant(lo)) * (zj - Jet::real_constant(hi));
    w.sqrt_with_value(sqrt_edges(zj.f, lo, hi))
}

impl AnalyticMeasure {
    pub fn semicircle(variance: f64) -> Self {
        AnalyticMeasure::Semicircle { variance }
    }

    pub fn gaussian(sigma: f64) -> Self {
        AnalyticMeasure::Gaussian { sigma }
    }

    pub fn kesten_mckay(eta: f64) -> Self {
        AnalyticMeasure::KestenMcKay { eta }
    }

    pub fn affine(scale: f64, shift: f64, base: AnalyticMeasure) -> Self {
        AnalyticMeasure::Affine { scale, shift, base: Box::new(base) }
    }

    /// Parameter checks; `Affine` recurses into its base.
    pub fn validate(&self) -> Result<()> {
        use AnalyticMeasure::*;
        match self {
            Semicircle { variance } => {
                if !(variance.is_finite() && *variance > 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "semicircle variance must be positive, got {variance}"
                    )));
                }
            }
            Arcsine | Bernoulli => {}
            KestenMcKay { eta } => {
                if !(eta.is_finite() && *eta >= 2.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "kesten_mckay eta must be >= 2, got {eta}"
                    )));
                }
            }
            Gaussian { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "gaussian sigma must be positive, got {sigma}"
                    )));
                }
            }
            OrthoPoly { a, b } => {
                if !(b.is_finite() && *b > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidMeasure(format!(
                        "orthopoly requires b > 0, got a={a}, b={b}"
                    )));
                }
                if a * a >= *b {
                    // for a² ≥ b the induced measure grows an atom at -b/a
                    // and the density alone no longer carries unit mass
                    return Err(Error::InvalidMeasure(format!(
                        "orthopoly requires a^2 < b, got a={a}, b={b}"
                    )));
                }
            }
            DiracMass { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidMeasure("dirac location must be finite".into()));
                }
            }
            Affine { scale, shift, base } => {
                if !(scale.is_finite() && *scale != 0.0 && shift.is_finite()) {
                    return Err(Error::InvalidMeasure(format!(
                        "affine requires finite scale != 0, got scale={scale}, shift={shift}"
                    )));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Closed support interval of the measure (continuous part plus atoms).
    pub fn support(&self) -> (f64, f64) {
        use AnalyticMeasure::*;
        match self {
            Semicircle { variance } => {
                let r = 2.0 * variance.sqrt();
                (-r, r)
            }
            Arcsine => (-2.0, 2.0),
            KestenMcKay { eta } => {
                let r = 2.0 * (eta - 1.0).sqrt();
                (-r, r)
            }
            Bernoulli => (-1.0, 1.0),
            Gaussian { sigma } => (-12.0 * sigma, 12.0 * sigma),
            OrthoPoly { a, b } => (a - 2.0 * b.sqrt(), a + 2.0 * b.sqrt()),
            DiracMass { c } => (*c, *c),
            Affine { scale, shift, base } => {
                let (lo, hi) = base.support();
                let (x, y) = (scale * lo + shift, scale * hi + shift);
                if x <= y { (x, y) } else { (y, x) }
            }
        }
    }

    /// Atoms as (location, mass) pairs; empty for continuous measures.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        use AnalyticMeasure::*;
        match self {
            Bernoulli => vec![(-1.0, 0.5), (1.0, 0.5)],
            DiracMass { c } => vec![(*c, 1.0)],
            Affine { scale, shift, base } => base
                .atoms()
                .into_iter()
                .map(|(loc, mass)| (scale * loc + shift, mass))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_atomic(&self) -> bool {
        !self.atoms().is_empty()
    }

    /// Whether the density has inverse- or half-power edges (everything in
    /// the catalog except the truncated Gaussian); drives the θ-substitution
    /// used for quadrature.
    fn has_hard_edges(&self) -> bool {
        use AnalyticMeasure::*;
        match self {
            Gaussian { .. } => false,
            Affine { base, .. } => base.has_hard_edges(),
            _ => true,
        }
    }

    /// ρ(λ); zero outside the support, error for purely atomic measures.
    pub fn density(&self, lambda: f64) -> Result<f64> {
        use AnalyticMeasure::*;
        match self {
            Semicircle { variance } => {
                let d = 4.0 * variance - lambda * lambda;
                Ok(if d > 0.0 { d.sqrt() / (2.0 * std::f64::consts::PI * variance) } else { 0.0 })
            }
            Arcsine => {
                let d = 4.0 - lambda * lambda;
                Ok(if d > 0.0 { 1.0 / (std::f64::consts::PI * d.sqrt()) } else { 0.0 })
            }
            KestenMcKay { eta } => {
                let d = 4.0 * (eta - 1.0) - lambda * lambda;
                Ok(if d > 0.0 {
                    eta * d.sqrt() / (2.0 * std::f64::consts::PI * (eta * eta - lambda * lambda))
                } else {
                    0.0
                })
            }
            Gaussian { sigma } => {
                if lambda.abs() > 12.0 * sigma {
                    return Ok(0.0);
                }
                let u = lambda / sigma;
                Ok((-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
            }
            OrthoPoly { a, b } => {
                let d = 4.0 * b - (lambda - a) * (lambda - a);
                Ok(if d > 0.0 {
                    d.sqrt() / (2.0 * std::f64::consts::PI * (b + a * lambda))
                } else {
                    0.0
                })
            }
            Bernoulli | DiracMass { .. } => Err(Error::AtomicMeasure),
            Affine { scale, shift, base } => {
                Ok(base.density((lambda - shift) / scale)? / scale.abs())
            }
        }
    }

    /// G(z) = ∫ ρ(λ)/(z-λ) dλ for Im z > 0, with Im G < 0 and G ~ 1/z.
    pub fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.cauchy_jet(z)?.f)
    }

    /// G together with ∂G, ∂²G, ∂³G.
    pub fn cauchy_jet(&self, z: Complex64) -> Result<Jet> {
        if z.im <= 0.0 {
            return Err(Error::LowerHalfPlane);
        }
        Ok(self.cauchy_jet_unchecked(z))
    }

    fn cauchy_jet_unchecked(&self, z: Complex64) -> Jet {
        use AnalyticMeasure::*;
        let zj = Jet::variable(z);
        match self {
            Semicircle { variance } => {
                let r = 2.0 * variance.sqrt();
                let s = sqrt_edges_jet(zj, -r, r);
                (zj - s).scale(1.0 / (2.0 * variance))
            }
            Arcsine => sqrt_edges_jet(zj, -2.0, 2.0).recip(),
            KestenMcKay { eta } => {
                // 2(η-1) / ((η-2) z + η s), the pole-free form of the
                // quadratic root.
                let r = 2.0 * (eta - 1.0).sqrt();
                let s = sqrt_edges_jet(zj, -r, r);
                Jet::real_constant(2.0 * (eta - 1.0))
                    / (zj.scale(eta - 2.0) + s.scale(*eta))
            }
            Bernoulli => {
                // z/(z²-1)
                zj / (zj * zj - Jet::real_constant(1.0))
            }
            Gaussian { sigma } => {
                // G(z) = -i √(π/2σ²) w(z/(σ√2)); jets from w' = -2ζw + 2i/√π.
                let scale = 1.0 / (sigma * std::f64::consts::SQRT_2);
                let zeta = z * scale;
                let w0 = faddeeva_w(zeta);
                let two_i_over_sqrt_pi = Complex64::new(0.0, 2.0 / SQRT_PI);
                let w1 = -2.0 * zeta * w0 + two_i_over_sqrt_pi;
                let w2 = -2.0 * w0 - 2.0 * zeta * w1;
                let w3 = -4.0 * w1 - 2.0 * zeta * w2;
                let wj = Jet { f: w0, d1: w1, d2: w2, d3: w3 }.compose_affine(scale);
                let c = Complex64::new(0.0, -1.0)
                    * (std::f64::consts::PI / (2.0 * sigma * sigma)).sqrt();
                wj.scale_complex(c)
            }
            OrthoPoly { a, b } => {
                // 2/(z + a + s), s = √((z-a)² - 4b) on the z-like branch.
                let (lo, hi) = (a - 2.0 * b.sqrt(), a + 2.0 * b.sqrt());
                let s = sqrt_edges_jet(zj, lo, hi);
                Jet::real_constant(2.0) / (zj + Jet::real_constant(*a) + s)
            }
            DiracMass { c } => (zj - Jet::real_constant(*c)).recip(),
            Affine { scale, shift, base } => {
                let zeta = (z - shift) / scale;
                if *scale > 0.0 {
                    let inner = base.cauchy_jet_unchecked(zeta);
                    inner.compose_affine(1.0 / scale).scale(1.0 / scale)
                } else {
                    // ζ lies in the lower half-plane; use G(conj ζ) = conj G(ζ).
                    let inner = base.cauchy_jet_unchecked(zeta.conj()).conj();
                    inner.compose_affine(1.0 / scale).scale(1.0 / scale)
                }
            }
        }
    }

    /// R-transform on the series branch with R(0) = κ₁.
    pub fn r_transform(&self, w: Complex64) -> Result<Complex64> {
        use AnalyticMeasure::*;
        match self {
            Semicircle { variance } => Ok(variance * w),
            Arcsine => {
                if w.norm() < 1e-100 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(((1.0 + 4.0 * w * w).sqrt() - 1.0) / w)
            }
            Bernoulli => {
                if w.norm() < 1e-100 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(((1.0 + 4.0 * w * w).sqrt() - 1.0) / (2.0 * w))
            }
            KestenMcKay { eta } => {
                if (*eta - 2.0).abs() < 1e-14 {
                    AnalyticMeasure::Arcsine.r_transform(w)
                } else {
                    Err(Error::NoClosedForm)
                }
            }
            Gaussian { .. } => Err(Error::NoClosedForm),
            OrthoPoly { a, b } => {
                let denom = 1.0 - a * w;
                if denom.norm() < 1e-12 * (1.0 + (a * w).norm()) {
                    return Err(Error::PoleAt(1.0 / a));
                }
                Ok(b * w / denom)
            }
            DiracMass { c } => Ok(Complex64::new(*c, 0.0)),
            Affine { scale, shift, base } => {
                Ok(*scale * base.r_transform(*scale * w)? + shift)
            }
        }
    }

    /// k-th moment ∫ ρ(λ) λ^k dλ by adaptive quadrature (exact sum for
    /// atomic measures). Hard-edged densities are integrated after the
    /// substitution λ = c + r sinθ, which removes the edge singularity.
    pub fn moment(&self, k: u32) -> f64 {
        let atoms = self.atoms();
        if !atoms.is_empty() {
            return atoms.iter().map(|(loc, mass)| mass * loc.powi(k as i32)).sum();
        }
        let (lo, hi) = self.support();
        if self.has_hard_edges() {
            let c = 0.5 * (lo + hi);
            let r = 0.5 * (hi - lo);
            quad::integrate(
                |theta| {
                    let lam = c + r * theta.sin();
                    let rho = self.density(lam).unwrap_or(0.0);
                    rho * lam.powi(k as i32) * r * theta.cos()
                },
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                1e-11,
                1e-13,
            )
        } else {
            quad::integrate(
                |lam| self.density(lam).unwrap_or(0.0) * lam.powi(k as i32),
                lo,
                hi,
                1e-11,
                1e-13,
            )
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m1 = self.moment(1);
        self.moment(2) - m1 * m1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: AnalyticMeasure = serde_json::from_str(s)
            .map_err(|e| Error::InvalidMeasure(format!("bad measure JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}
