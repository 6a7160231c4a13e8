//! Adaptive Gauss–Kronrod (7/15) quadrature with global subdivision.
//!
//! Infinite endpoints are mapped to a finite interval with t = u/(1-u).
//! The error estimate follows the QUADPACK qk15 heuristic.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convergence controls shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_iter: usize) -> Result<Self> {
        if !(rel > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol.rel",
                value: rel,
                constraint: "rel > 0",
            });
        }
        if !(abs >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol.abs",
                value: abs,
                constraint: "abs >= 0",
            });
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "tol.max_iter",
                value: 0.0,
                constraint: "max_iter >= 1",
            });
        }
        Ok(Self { rel, abs, max_iter })
    }

    pub const fn rel(rel: f64) -> Self {
        Self {
            rel,
            abs: 0.0,
            max_iter: 2000,
        }
    }

    pub const fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub const fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 0.0,
            max_iter: 2000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    if !resk.is_finite() {
        return Err(Error::Convergence {
            what: "integrate (non-finite integrand)",
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    error = error.max(50.0 * f64::EPSILON * value.abs());
    Ok(Segment { a, b, value, error })
}

fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&mut f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(first);
    let mut frozen_err = 0.0;
    for _ in 0..tol.max_iter {
        if total_err + frozen_err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok((total, total_err + frozen_err));
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if (seg.b - seg.a).abs() <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            // cannot split further; keep its contribution, stop refining it
            frozen_err += seg.error;
            total_err -= seg.error;
            continue;
        }
        let left = kronrod15(&mut f, seg.a, mid)?;
        let right = kronrod15(&mut f, mid, seg.b)?;
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        heap.push(left);
        heap.push(right);
    }
    // recompute sums to shed accumulated rounding before judging
    let total: f64 = heap.iter().map(|s| s.value).sum::<f64>();
    let err: f64 = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    if err <= tol.abs.max(tol.rel * total.abs()) {
        return Ok((total, err));
    }
    Err(Error::Convergence {
        what: "integrate",
        estimate: total,
        error: err,
    })
}

/// ∫_a^b f, where either endpoint may be infinite.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<f64> {
    integrate_with_error(f, a, b, tol).map(|(v, _)| v)
}

/// As [`integrate`], also returning the error estimate.
pub fn integrate_with_error<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    integrate_dyn(&mut f, a, b, tol)
}

fn integrate_dyn(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: &Tolerance) -> Result<(f64, f64)> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::domain("integrate", "NaN endpoint"));
    }
    if a > b {
        return integrate_dyn(f, b, a, tol).map(|(v, e)| (-v, e));
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(f, a, b, tol),
        (true, false) => adaptive(
            |u: f64| {
                let w = 1.0 - u;
                let v = f(a + u / w);
                if v == 0.0 {
                    0.0
                } else {
                    v / (w * w)
                }
            },
            0.0,
            1.0,
            tol,
        ),
        (false, true) => adaptive(
            |u: f64| {
                let w = 1.0 - u;
                let v = f(b - u / w);
                if v == 0.0 {
                    0.0
                } else {
                    v / (w * w)
                }
            },
            0.0,
            1.0,
            tol,
        ),
        (false, false) => {
            let (l, el) = integrate_dyn(f, f64::NEG_INFINITY, 0.0, tol)?;
            let (r, er) = integrate_dyn(f, 0.0, f64::INFINITY, tol)?;
            Ok((l + r, el + er))
        }
    }
}

/// Integrates piecewise over consecutive breakpoints (which may start or
/// end at ±∞). Use where the integrand has kinks or peaks at known places.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: &Tolerance) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2).filter(|w| w[0] != w[1]) {
        total += integrate(&mut f, w[0], w[1], tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_integrals() {
        let tol = Tolerance::rel(1e-12);
        assert!((integrate(|_| 1.0, 0.0, 1.0, &tol).unwrap() - 1.0).abs() < 1e-14);
        let e = integrate(|t: f64| (-t).exp(), 0.0, f64::INFINITY, &tol).unwrap();
        assert!((e - 1.0).abs() < 1e-11);
        let g = integrate(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &tol).unwrap();
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        let tol = Tolerance::rel(1e-10);
        let v = integrate(|y: f64| y.powf(-0.5), 0.0, 1.0, &tol).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let tol = Tolerance::rel(1e-12);
        let v = integrate(|x: f64| x * x, 1.0, 0.0, &tol).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_convergence_reports_estimate() {
        let tol = Tolerance::rel(1e-14).with_max_iter(3);
        let err = integrate(|x: f64| (1.0 / x).sin() / x.sqrt(), 0.0, 1.0, &tol).unwrap_err();
        match err {
            Error::Convergence { estimate, .. } => assert!(estimate.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 0.0, 10).is_err());
        assert!(Tolerance::new(1e-8, -1.0, 10).is_err());
        assert!(Tolerance::new(1e-8, 0.0, 0).is_err());
        assert!(Tolerance::new(1e-8, 0.0, 1).is_ok());
    }
}
