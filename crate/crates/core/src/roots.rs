//! Scalar bracketing helpers shared by the equilibrium solvers.

/// Bisection on `[lo, hi]` for a continuous `g` with `g(lo)` and `g(hi)` of
/// opposite sign (or one of them zero). Stops once the bracket is narrower
/// than `width`.
pub(crate) fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    if g(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Every root of `g` on `[lo, hi]` detected as a sign change (or an exact
/// zero) on a uniform grid of `cells` cells, each refined by bisection.
pub(crate) fn scan_roots<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    cells: usize,
    width: f64,
) -> Vec<f64> {
    let mut roots = Vec::new();
    if !(hi > lo) {
        if hi == lo && g(lo) == 0.0 {
            roots.push(lo);
        }
        return roots;
    }
    let step = (hi - lo) / cells as f64;
    let node = |i: usize| if i == cells { hi } else { lo + step * i as f64 };
    let mut x_prev = lo;
    let mut g_prev = g(lo);
    if g_prev == 0.0 {
        roots.push(lo);
    }
    for i in 1..=cells {
        let x = node(i);
        let gx = g(x);
        if gx == 0.0 {
            roots.push(x);
        } else if g_prev != 0.0 && (gx < 0.0) != (g_prev < 0.0) {
            roots.push(bisect(&g, x_prev, x, width));
        }
        x_prev = x;
        g_prev = gx;
    }
    roots
}

/// Golden-section search for the minimum of a unimodal `g` on `[lo, hi]`.
pub(crate) fn golden_min<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut ga, mut gb) = (g(a), g(b));
    while hi - lo > width {
        if ga < gb {
            hi = b;
            b = a;
            gb = ga;
            a = hi - ratio * (hi - lo);
            ga = g(a);
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + ratio * (hi - lo);
            gb = g(b);
        }
    }
    0.5 * (lo + hi)
}
