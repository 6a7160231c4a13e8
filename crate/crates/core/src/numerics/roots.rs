//! Bracketed root finding.

use crate::error::{Error, Result};

use super::quad::Tolerance;

/// Brent's method on [lo, hi]; `f(lo)` and `f(hi)` must differ in sign.
///
/// Infinite function values are accepted at the bracket ends and inside
/// (they count by sign), which lets callers search across a blow-up.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::Bracketing {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter.max(200) {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.abs.max(tol.rel * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= xtol || fb == 0.0 {
            return Ok(b);
        }
        let finite = fa.is_finite() && fb.is_finite() && fc.is_finite();
        if finite && e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::domain("find_root", format!("NaN function value at {b}")));
        }
    }
    Err(Error::Convergence {
        what: "find_root",
        estimate: b,
        error: (c - b).abs(),
    })
}

/// Expands `hi` geometrically away from `lo` until `f` changes sign.
pub fn bracket_upward<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    mut hi: f64,
    factor: f64,
    max_steps: usize,
) -> Result<(f64, f64)> {
    let flo = f(lo);
    let mut fhi = f(hi);
    let mut last = lo;
    for _ in 0..max_steps {
        if flo.signum() != fhi.signum() {
            return Ok((last, hi));
        }
        last = hi;
        hi = lo + (hi - lo) * factor;
        fhi = f(hi);
    }
    Err(Error::Bracketing {
        lo,
        hi,
        f_lo: flo,
        f_hi: fhi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let tol = Tolerance::rel(1e-14);
        let r = find_root(|x| x * x - 2.0, 0.0, 2.0, &tol).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = find_root(|x: f64| x.cos() - x, 0.0, 1.0, &tol).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-13);
    }

    #[test]
    fn tolerates_infinite_values() {
        let tol = Tolerance::rel(1e-13);
        let f = |x: f64| if x > 3.0 { f64::INFINITY } else { x - 2.5 };
        let r = find_root(f, 0.0, 10.0, &tol).unwrap();
        assert!((r - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_bracket() {
        let tol = Tolerance::rel(1e-10);
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, &tol),
            Err(Error::Bracketing { .. })
        ));
    }

    #[test]
    fn upward_bracketing() {
        let (lo, hi) = bracket_upward(|x| x - 100.0, 0.0, 1.0, 2.0, 20).unwrap();
        assert!(lo < 100.0 && hi >= 100.0);
    }
}
