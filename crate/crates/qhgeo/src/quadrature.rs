//! Adaptive Simpson quadrature with interval bisection.

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h * (fa + 4.0 * fm + fb) / 6.0
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        // Richardson extrapolation of the two Simpson estimates.
        left + right + delta / 15.0
    } else {
        recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1)
            + recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The integrand must be finite on `[a, b]`; a non-finite sample propagates
/// into the result.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, fa, m, fm, b, fb, whole, tol.abs().max(1e-300), 0)
}

/// Minimize a scalar function on `[a, b]` by golden-section search; returns
/// `(argmin, min)`. Exact only for unimodal `f`.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
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
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive_simpson(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((q - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_matches_log() {
        let q = adaptive_simpson(|x| 1.0 / x, 1.0, 2.0, 1e-10);
        assert!((q - std::f64::consts::LN_2).abs() < 1e-10, "got {q}");
    }

    #[test]
    fn tolerance_scales() {
        for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
            let q = adaptive_simpson(|x| (3.0 - x).recip(), 0.0, 1.0, tol);
            assert!((q - (1.5f64).ln()).abs() <= tol * 10.0);
        }
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(|x| x.exp(), 2.0, 2.0, 1e-9), 0.0);
    }
}
