//! Derivative-free 1-D and n-D searches used by the measures and the boundary solver.

/// Termination settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Initial simplex edge length along each coordinate.
    pub step: f64,
    /// Stop when every vertex lies within this distance of the best one...
    pub x_tol: f64,
    /// ...and the vertex values span less than this.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            step: 0.05,
            x_tol: 1e-7,
            f_tol: 1e-12,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Simplex diameter at exit.
    pub x_spread: f64,
}

/// Minimise `f` from `x0` with the standard reflection / expansion /
/// contraction / shrink rules (coefficients 1, 2, 1/2, 1/2).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = simplex_spread(&pts);
        if (vals[n] - vals[0]).abs() <= opts.f_tol && spread <= opts.x_tol {
            converged = true;
        }
        if converged || iterations >= opts.max_iter {
            return Minimum {
                x: pts[0].clone(),
                value: vals[0],
                iterations,
                converged,
                x_spread: spread,
            };
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|d| pts[..n].iter().map(|p| p[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|d| centroid[d] + t * (pts[n][d] - centroid[d]))
                .collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(-0.5);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            for d in 0..n {
                pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
            }
            vals[i] = f(&pts[i]);
        }
    }
}

fn simplex_spread(pts: &[Vec<f64>]) -> f64 {
    pts[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(&pts[0])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximise a unimodal `f` on `[lo, hi]` by golden-section search.
/// Returns `(argmax, max)`; the endpoints are also compared so a monotone
/// profile yields its boundary maximum.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Root of `f` on `[lo, hi]` by bisection, given `f(lo)` and `f(hi)` of
/// opposite sign (or zero). Returns `None` if the bracket is not valid.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut sa = fa.signum();
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == sa {
            a = m;
            sa = fm.signum();
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Root of `f` on a sign-changing bracket by the Illinois variant of
/// regula falsi; superlinear on smooth functions and never leaves the bracket.
pub fn illinois<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() <= tol {
            return Some(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= tol {
            return Some(0.5 * (a + b));
        }
    }
    Some(0.5 * (a + b))
}
