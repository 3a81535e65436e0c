//! Adaptive quadrature on finite intervals.
//!
//! Panels are integrated with Gauss–Legendre rules; the error estimate for a
//! panel is the difference between the 15-point rule and the sum of the two
//! 15-point rules on its halves. Panels that miss the tolerance are bisected.
//! Nodes and weights are generated at first use by Newton iteration on the
//! Legendre recurrence, so no coefficient tables are carried around.

use std::sync::OnceLock;

const GAUSS_N: usize = 15;
const MAX_DEPTH: u32 = 52;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n(x) = 0.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_N))
}

/// 15-point estimates of (∫f, ∫|f|) on one panel; the second value sets the
/// roundoff floor below which refinement cannot help.
fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (nodes, weights) = rule15();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    let mut abs_acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let v = f(c + h * x);
        acc += w * v;
        abs_acc += w * v.abs();
    }
    (acc * h, abs_acc * h)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (left, labs) = panel(f, a, m);
    let (right, rabs) = panel(f, m, b);
    let refined = left + right;
    let floor = 4.0 * f64::EPSILON * (labs + rabs);
    if (refined - whole).abs() <= tol.max(floor) || depth >= MAX_DEPTH {
        return refined;
    }
    adapt(f, a, m, left, 0.5 * tol, depth + 1) + adapt(f, m, b, right, 0.5 * tol, depth + 1)
}

/// ∫_a^b f(x) dx to absolute tolerance `abs_tol` plus relative tolerance
/// `rel_tol` against a first global estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _) = panel(&f, a, b);
    let tol = abs_tol.max(rel_tol * whole.abs()).max(1e-300);
    adapt(&f, a, b, whole, tol, 0)
}

/// Complex-valued convenience wrapper: integrates real and imaginary parts.
pub fn integrate_complex<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> num_complex::Complex64
where
    F: Fn(f64) -> num_complex::Complex64,
{
    let re = integrate(|x| f(x).re, a, b, rel_tol, abs_tol);
    let im = integrate(|x| f(x).im, a, b, rel_tol, abs_tol);
    num_complex::Complex64::new(re, im)
}
