//! Deterministic one-dimensional search: uniform grids and golden-section
//! refinement on a bracket.

/// 1 / phi
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `steps` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (steps - 1) as f64;
            (0..steps)
                .map(|i| {
                    if i == steps - 1 {
                        hi
                    } else {
                        lo + h * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Golden-section minimization of `f` on `[lo, hi]` until the bracket is
/// narrower than `tol`. Returns the best point seen, endpoints included.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    let mut best = if fb < fa { (b, fb) } else { (a, fa) };
    if b - a <= tol {
        return best;
    }

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // A bounded iteration count guards against a tolerance below the float
    // spacing of the bracket.
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
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
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Golden-section maximization; see [`golden_section_min`].
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (x, neg) = golden_section_min(|x| -f(x), lo, hi, tol);
    (x, -neg)
}
