//! Degree-3 Taylor jets over ℂ: a value together with its first three
//! z-derivatives. Writing each closed-form Cauchy transform once over jets
//! gives the analytic derivatives needed by the perturbation series from the
//! same expression that produces the values, so the two cannot drift apart.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl Jet {
    pub fn constant(c: Complex64) -> Self {
        Jet {
            f: c,
            d1: Complex64::new(0.0, 0.0),
            d2: Complex64::new(0.0, 0.0),
            d3: Complex64::new(0.0, 0.0),
        }
    }

    pub fn real_constant(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// The identity jet at z: value z, first derivative 1.
    pub fn variable(z: Complex64) -> Self {
        Jet {
            f: z,
            d1: Complex64::new(1.0, 0.0),
            d2: Complex64::new(0.0, 0.0),
            d3: Complex64::new(0.0, 0.0),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Jet {
            f: self.f * c,
            d1: self.d1 * c,
            d2: self.d2 * c,
            d3: self.d3 * c,
        }
    }

    pub fn scale_complex(self, c: Complex64) -> Self {
        Jet {
            f: self.f * c,
            d1: self.d1 * c,
            d2: self.d2 * c,
            d3: self.d3 * c,
        }
    }

    pub fn recip(self) -> Self {
        let r0 = 1.0 / self.f;
        let r1 = -self.d1 * r0 * r0;
        let r2 = -(2.0 * r1 * self.d1 + r0 * self.d2) * r0;
        let r3 = -(3.0 * r2 * self.d1 + 3.0 * r1 * self.d2 + r0 * self.d3) * r0;
        Jet { f: r0, d1: r1, d2: r2, d3: r3 }
    }

    /// Square root with a caller-chosen branch for the value; the derivative
    /// components follow from implicit differentiation of s² = f, so they are
    /// automatically consistent with whichever branch was selected.
    pub fn sqrt_with_value(self, s0: Complex64) -> Self {
        let s1 = self.d1 / (2.0 * s0);
        let s2 = (self.d2 - 2.0 * s1 * s1) / (2.0 * s0);
        let s3 = (self.d3 - 6.0 * s1 * s2) / (2.0 * s0);
        Jet { f: s0, d1: s1, d2: s2, d3: s3 }
    }

    pub fn exp(self) -> Self {
        let e0 = self.f.exp();
        let e1 = self.d1 * e0;
        let e2 = self.d2 * e0 + self.d1 * e1;
        let e3 = self.d3 * e0 + 2.0 * self.d2 * e1 + self.d1 * e2;
        Jet { f: e0, d1: e1, d2: e2, d3: e3 }
    }

    /// Conjugate jet: the jet of z ↦ conj(g(conj z)) given the jet of g.
    pub fn conj(self) -> Self {
        Jet {
            f: self.f.conj(),
            d1: self.d1.conj(),
            d2: self.d2.conj(),
            d3: self.d3.conj(),
        }
    }

    /// Rescale the independent variable: the jet of z ↦ g(c·z + t) given the
    /// jet of g at c·z + t.
    pub fn compose_affine(self, c: f64) -> Self {
        Jet {
            f: self.f,
            d1: self.d1 * c,
            d2: self.d2 * c * c,
            d3: self.d3 * c * c * c,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            f: self.f + o.f,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d3: self.d3 + o.d3,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            f: self.f - o.f,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
            d3: self.d3 - o.d3,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            f: self.f * o.f,
            d1: self.d1 * o.f + self.f * o.d1,
            d2: self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
            d3: self.d3 * o.f + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.f * o.d3,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { f: -self.f, d1: -self.d1, d2: -self.d2, d3: -self.d3 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(re: f64, im: f64) -> Jet {
        Jet::variable(Complex64::new(re, im))
    }

    #[test]
    fn polynomial_derivatives() {
        // p(z) = z³: p' = 3z², p'' = 6z, p''' = 6.
        let z = var(1.5, 0.5);
        let p = z * z * z;
        let zv = Complex64::new(1.5, 0.5);
        assert!((p.f - zv.powu(3)).norm() < 1e-14);
        assert!((p.d1 - 3.0 * zv * zv).norm() < 1e-13);
        assert!((p.d2 - 6.0 * zv).norm() < 1e-13);
        assert!((p.d3 - Complex64::new(6.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn reciprocal_derivatives() {
        // 1/z: derivatives -1/z², 2/z³, -6/z⁴.
        let zv = Complex64::new(0.7, 1.3);
        let r = var(zv.re, zv.im).recip();
        assert!((r.f - 1.0 / zv).norm() < 1e-14);
        assert!((r.d1 + 1.0 / (zv * zv)).norm() < 1e-14);
        assert!((r.d2 - 2.0 / (zv * zv * zv)).norm() < 1e-14);
        assert!((r.d3 + 6.0 / (zv * zv * zv * zv)).norm() < 1e-14);
    }

    #[test]
    fn sqrt_consistent_with_finite_differences() {
        let zv = Complex64::new(2.0, 1.0);
        let h = 1e-5;
        let s = |z: Complex64| (z * z - 4.0).sqrt();
        let w = var(zv.re, zv.im);
        let jet = (w * w - Jet::real_constant(4.0)).sqrt_with_value(s(zv));
        let fd1 = (s(zv + h) - s(zv - h)) / (2.0 * h);
        let fd2 = (s(zv + h) - 2.0 * s(zv) + s(zv - h)) / (h * h);
        assert!((jet.d1 - fd1).norm() < 1e-9, "{} vs {}", jet.d1, fd1);
        assert!((jet.d2 - fd2).norm() < 1e-5, "{} vs {}", jet.d2, fd2);
    }

    #[test]
    fn exp_derivatives() {
        // e^{-z²}: f' = -2z f, f'' = (4z²-2) f, f''' = (12z - 8z³) f.
        let zv = Complex64::new(0.4, 0.9);
        let w = var(zv.re, zv.im);
        let e = (-(w * w)).exp();
        let f = (-zv * zv).exp();
        assert!((e.f - f).norm() < 1e-14);
        assert!((e.d1 + 2.0 * zv * f).norm() < 1e-13);
        assert!((e.d2 - (4.0 * zv * zv - 2.0) * f).norm() < 1e-13);
        assert!((e.d3 - (12.0 * zv - 8.0 * zv * zv * zv) * f).norm() < 1e-12);
    }
}
