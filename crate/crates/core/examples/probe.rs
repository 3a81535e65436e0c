// temporary probe: hand-rolled copy of the adaptive loop with stats
use std::cell::Cell;

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1; p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 { break; }
        }
        nodes[i] = -x; nodes[n-1-i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w; weights[n-1-i] = w;
    }
    (nodes, weights)
}

fn main() {
    let (nodes, weights) = gauss_legendre(15);
    let x = 15.0f64;
    let count = Cell::new(0u64);
    let f = |s: f64| { count.set(count.get()+1); x * (-x*x*(1.0-s*s)).exp() };
    let panel = |a: f64, b: f64| -> (f64, f64) {
        let c = 0.5*(a+b); let h = 0.5*(b-a);
        let mut acc = 0.0; let mut abs_acc = 0.0;
        for (xn, w) in nodes.iter().zip(&weights) {
            let v = f(c + h*xn); acc += w*v; abs_acc += w*v.abs();
        }
        (acc*h, abs_acc*h)
    };
    // iterative stack version with stats
    let mut deepest = 0u32; let mut panels = 0u64; let mut maxd_count = 0u64;
    let (whole, _) = panel(0.0, 1.0);
    let tol0 = 1e-15f64.max(1e-14*whole.abs());
    let mut stack = vec![(0.0f64, 1.0f64, whole, tol0, 0u32)];
    let mut total = 0.0;
    while let Some((a,b,wh,tol,depth)) = stack.pop() {
        panels += 1;
        let m = 0.5*(a+b);
        let (l, labs) = panel(a, m);
        let (r, rabs) = panel(m, b);
        let refined = l + r;
        let floor = 4.0*f64::EPSILON*(labs+rabs);
        if depth > 30 {
            eprintln!("deep [{a:.17}, {b:.17}] err={:.3e} tol={tol:.3e} floor={floor:.3e} labs={labs:.3e}", (refined-wh).abs());
        }
        if (refined-wh).abs() <= tol.max(floor) || depth >= 52 {
            total += refined;
            if depth >= 52 { maxd_count += 1; }
            if depth > deepest { deepest = depth; }
            continue;
        }
        stack.push((a,m,l,0.5*tol,depth+1));
        stack.push((m,b,r,0.5*tol,depth+1));
    }
    eprintln!("x=15: total={total:.8e} evals={} panels={panels} deepest={deepest} at_maxdepth={maxd_count} tol0={tol0:.2e}", count.get());
}
