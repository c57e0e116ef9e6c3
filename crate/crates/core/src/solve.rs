//! Scalar bracketing solvers used by the optimizers.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1) / 2

/// Outcome of a bracketing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub x: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Finds the boundary of a monotone predicate on `[lo, hi]`.
///
/// `ok(lo)` must hold and `ok(hi)` must fail. Returns the last point known to
/// satisfy `ok`, within `tol` of the boundary.
pub fn bisect_boundary<F>(mut ok: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Bracketed
where
    F: FnMut(f64) -> bool,
{
    let mut iterations = 0;
    while hi - lo > tol && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Bracketed {
        x: lo,
        iterations,
        converged: hi - lo <= tol,
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `rel_tol · max(|a|, |b|)`. Ties move
/// the bracket left, which keeps the search anchored on a discontinuous jump
/// approached from the right.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64, max_iter: usize) -> (Bracketed, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > rel_tol * a.abs().max(b.abs()) && iterations < max_iter {
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
        iterations += 1;
    }
    let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    (
        Bracketed {
            x,
            iterations,
            converged: (b - a) <= rel_tol * a.abs().max(b.abs()),
        },
        fx,
    )
}
