//! Float shims and small numerical helpers shared by every module.

#[cfg(not(feature = "std"))]
pub use num_traits::Float;

pub const PI: f64 = core::f64::consts::PI;

/// `x^n` by repeated squaring; cheaper than `powi` on the libm path.
#[inline]
pub fn ipow(x: f64, n: u32) -> f64 {
    let mut base = x;
    let mut exp = n;
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// `ln(e^a + e^b)` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Sum of signed log-magnitudes: returns `(ln|s|, sign(s))` for
/// `s = sa e^a + sb e^b`.
pub fn signed_log_add(a: f64, sa: f64, b: f64, sb: f64) -> (f64, f64) {
    if sa == 0.0 || a == f64::NEG_INFINITY {
        return (b, sb);
    }
    if sb == 0.0 || b == f64::NEG_INFINITY {
        return (a, sa);
    }
    let (hi, shi, lo, slo) = if a >= b { (a, sa, b, sb) } else { (b, sb, a, sa) };
    let r = slo * shi * (lo - hi).exp();
    let total = 1.0 + r;
    if total == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    (hi + total.abs().ln(), shi * total.signum())
}

/// Flat C-infinity step on `[0, 1]`: 0 below, 1 above, with every derivative
/// vanishing at both ends. Returns value, first and second derivative.
///
/// Written as a logistic of `q(s) = 1/s - 1/(1-s)`, which equals
/// `e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})`.
pub fn flat_step(s: f64) -> [f64; 3] {
    if s <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if s >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let r = 1.0 - s;
    let q = 1.0 / s - 1.0 / r;
    let dq = -1.0 / (s * s) - 1.0 / (r * r);
    let d2q = 2.0 / (s * s * s) - 2.0 / (r * r * r);
    // psi = sigma(-q); sigma' = sigma (1 - sigma); sigma'' = sigma' (1 - 2 sigma)
    let psi = if q > 0.0 {
        let e = (-q).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + q.exp())
    };
    let sp = psi * (1.0 - psi);
    let spp = sp * (1.0 - 2.0 * psi);
    let d1 = -sp * dq;
    let d2 = spp * dq * dq - sp * d2q;
    [psi, if d1.is_finite() { d1 } else { 0.0 }, if d2.is_finite() { d2 } else { 0.0 }]
}

/// FNV-1a, used for report reproducibility tags.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ipow_matches_powi() {
        for n in 0..12 {
            let x = 1.37_f64;
            assert!((ipow(x, n) - x.powi(n as i32)).abs() < 1e-12 * x.powi(n as i32));
        }
        assert_eq!(ipow(-2.0, 3), -8.0);
    }

    #[test]
    fn log_sums() {
        let s = log_add_exp(1000.0, 1000.0);
        assert!((s - (1000.0 + 2f64.ln())).abs() < 1e-12);
        let (l, sg) = signed_log_add(3f64.ln(), 1.0, 1f64.ln(), -1.0);
        assert!((l - 2f64.ln()).abs() < 1e-14 && sg == 1.0);
        let (l, sg) = signed_log_add(0.0, 1.0, 0.0, -1.0);
        assert_eq!((l, sg), (f64::NEG_INFINITY, 0.0));
    }

    #[test]
    fn flat_step_shape() {
        assert_eq!(flat_step(-0.1)[0], 0.0);
        assert_eq!(flat_step(1.2)[0], 1.0);
        assert!((flat_step(0.5)[0] - 0.5).abs() < 1e-15);
        assert!((flat_step(0.5)[1] - 2.0).abs() < 1e-12);
        // derivatives against central differences
        for &s in &[0.1, 0.3, 0.62, 0.9] {
            let h = 1e-5;
            let fd1 = (flat_step(s + h)[0] - flat_step(s - h)[0]) / (2.0 * h);
            let fd2 = (flat_step(s + h)[1] - flat_step(s - h)[1]) / (2.0 * h);
            assert!((fd1 - flat_step(s)[1]).abs() < 1e-7);
            assert!((fd2 - flat_step(s)[2]).abs() < 1e-5);
        }
        // symmetry psi(s) + psi(1-s) = 1
        for &s in &[0.05, 0.2, 0.45] {
            assert!((flat_step(s)[0] + flat_step(1.0 - s)[0] - 1.0).abs() < 1e-15);
        }
    }
}
