//! Safeguarded one-dimensional root finding and maximization.

#[allow(unused_imports)]
use crate::math::*;
use crate::{Error, Result};

/// Newton iteration kept inside a sign-change bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
///
/// `f` returns `(value, derivative)`. Converges when the bracket or the step
/// is below `tol_abs + tol_rel * |x|`.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, tol_rel: f64, tol_abs: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root("no sign change in bracket"));
    }
    // orient so that f(a) < 0 < f(b)
    let flip = fa > 0.0;
    let mut x = 0.5 * (a + b);
    let mut last_step = b - a;
    for _ in 0..200 {
        let (mut fx, dfx) = f(x);
        if flip {
            fx = -fx;
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let dfx = if flip { -dfx } else { dfx };
        let newton = if dfx != 0.0 && dfx.is_finite() { x - fx / dfx } else { f64::NAN };
        let tol = tol_abs + tol_rel * x.abs();
        let (next, step) = if newton > a && newton < b && (x - newton).abs() < 0.5 * last_step {
            (newton, (x - newton).abs())
        } else {
            let mid = 0.5 * (a + b);
            (mid, (x - mid).abs())
        };
        last_step = step.max(f64::MIN_POSITIVE);
        x = next;
        if step <= tol || (b - a) <= tol {
            return Ok(x);
        }
    }
    Err(Error::Root("newton-bisection iteration limit"))
}

/// Plain bisection for a continuous function with a sign change on `[lo, hi]`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol_abs: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root("no sign change in bracket"));
    }
    let sa = fa.signum();
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol_abs || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Solve `f(x) = target` for a function increasing on `[start, inf)`.
/// The upper end is found by doubling from `start + step`.
pub fn solve_increasing<F>(mut f: F, start: f64, step: f64, target: f64, tol_rel: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let f0 = f(start).0 - target;
    if f0 >= 0.0 {
        return Ok(start);
    }
    let mut h = step.max(f64::MIN_POSITIVE);
    let mut hi = start + h;
    let mut lo = start;
    let mut guard = 0;
    while f(hi).0 - target < 0.0 {
        lo = hi;
        h *= 2.0;
        hi = start + h;
        guard += 1;
        if guard > 2100 || !hi.is_finite() {
            return Err(Error::Root("could not bracket level set"));
        }
    }
    newton_bisect(|x| {
        let (v, d) = f(x);
        (v - target, d)
    }, lo, hi, tol_rel, f64::MIN_POSITIVE)
}

/// Brent's parabolic/golden maximizer on `[a, b]`. Returns `(x, f(x))`.
pub fn brent_max<F>(mut f: F, a: f64, b: f64, tol_abs: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const CGOLD: f64 = 0.381_966_011_250_105;
    let mut g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + CGOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = g(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = 1.5e-8 * x.abs() + tol_abs;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + if d >= 0.0 { tol1 } else { -tol1 } };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, -fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_cubic_root() {
        let r = newton_bisect(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-15, 0.0).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_rejects_same_sign() {
        assert!(newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn newton_survives_bad_derivative() {
        // derivative deliberately wrong; bisection fallback must still converge
        let r = newton_bisect(|x| (x - 0.3, 1e-30), 0.0, 1.0, 1e-14, 1e-15).unwrap();
        assert!((r - 0.3).abs() < 1e-13);
    }

    #[test]
    fn solve_increasing_quartic() {
        let x = solve_increasing(|x| (x.powi(4), 4.0 * x.powi(3)), 0.0, 1e-3, 81.0, 1e-15).unwrap();
        assert!((x - 3.0).abs() < 1e-13);
    }

    #[test]
    fn brent_finds_interior_max() {
        let (x, fx) = brent_max(|t| -(t - 0.62996).powi(2) + 1.0, -3.0, 5.0, 1e-12, 200);
        assert!((x - 0.62996).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_basic() {
        let r = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-15).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-14);
    }
}
