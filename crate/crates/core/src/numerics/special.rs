//! Special functions: log-gamma, the Macdonald function K₁, and the
//! error-function family used by the Black–Scholes routines.
//!
//! Regime switch points:
//! * `log_gamma`: Stirling series for x ≥ 15, upward shift by a product
//!   of 15 factors below that.
//! * `bessel_k1`: power series for z ≤ 2, Steed's continued fraction above.
//! * `erfcx`: Taylor series of erf for 0 ≤ x < 2, Lentz continued fraction
//!   for x ≥ 2, reflection for x < 0.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_SHIFT: f64 = 15.0;

/// log Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x} must be positive")));
    }
    if x >= STIRLING_SHIFT {
        return Ok(stirling(x));
    }
    // Γ(x) = Γ(x + n) / (x (x+1) ... (x+n-1))
    let mut prod = 1.0;
    let mut z = x;
    while z < STIRLING_SHIFT {
        prod *= z;
        z += 1.0;
    }
    Ok(stirling(z) - prod.ln())
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k (2k-1) x^{2k-1})
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2
                                        * (1.0 / 1188.0
                                            + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// ln n! from a table for small n, log-gamma beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        let mut acc = 0.0;
        for k in 2..=n {
            acc += (k as f64).ln();
        }
        return acc;
    }
    stirling(n as f64 + 1.0)
}

/// Cached table of ln n! for n = 0..len.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(len: usize) -> Self {
        let mut table = Vec::with_capacity(len + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for n in 1..=len {
            acc += (n as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        match self.table.get(n) {
            Some(v) => *v,
            None => stirling(n as f64 + 1.0),
        }
    }

    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// Result of a K₁ evaluation; `underflow` is set when e^{-z} is not
/// representable and the returned value has been flushed to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK1 {
    pub value: f64,
    pub underflow: bool,
}

/// Modified Bessel function of the second kind, order one.
pub fn bessel_k1(z: f64) -> Result<BesselK1> {
    let scaled = bessel_k1_scaled(z)?;
    if z > 2.0 {
        let value = scaled * (-z).exp();
        let underflow = value == 0.0 || value < f64::MIN_POSITIVE;
        return Ok(BesselK1 {
            value: if underflow { 0.0 } else { value },
            underflow,
        });
    }
    Ok(BesselK1 {
        value: scaled * (-z).exp(),
        underflow: false,
    })
}

/// e^{z} K₁(z); never underflows.
pub fn bessel_k1_scaled(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain("bessel_k1", format!("z = {z} must be positive")));
    }
    if z <= 2.0 {
        Ok(k1_series(z) * z.exp())
    } else {
        Ok(k1_steed_scaled(z))
    }
}

/// ln K₁(z), finite for every positive z.
pub fn ln_bessel_k1(z: f64) -> Result<f64> {
    Ok(bessel_k1_scaled(z)?.ln() - z)
}

fn k1_series(z: f64) -> f64 {
    let y = 0.25 * z * z;
    let mut term = 0.5 * z; // (z/2)^{2k+1} / (k! (k+1)!) at k = 0
    let mut i1 = 0.0;
    let mut digamma_sum = 0.0;
    // ψ(k+1) + ψ(k+2) at k = 0: -γ + (1 - γ)
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut k = 0.0;
    loop {
        i1 += term;
        digamma_sum += (psi_k1 + psi_k2) * term;
        k += 1.0;
        term *= y / (k * (k + 1.0));
        psi_k1 += 1.0 / k;
        psi_k2 += 1.0 / (k + 1.0);
        if term < 1e-18 * i1.abs() {
            break;
        }
    }
    // (z/4) Σ (ψ(k+1)+ψ(k+2)) (z²/4)^k / (k!(k+1)!) equals ½ Σ (ψ+ψ) term_k
    1.0 / z + (0.5 * z).ln() * i1 - 0.5 * digamma_sum
}

/// Steed's continued-fraction method (order ν = 1, fractional part μ = 0),
/// returns e^{z} K₁(z).
fn k1_steed_scaled(x: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0_scaled = (PI / (2.0 * x)).sqrt() / s;
    k0_scaled * (x + 0.5 - h) / x
}

/// Scaled complementary error function e^{x²} erfc(x).
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        if x < -26.7 {
            return f64::INFINITY;
        }
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 2.0 {
        return (x * x).exp() * (1.0 - erf_series(x));
    }
    // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let an = 0.5 * n as f64;
        d = x + an * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (f * PI.sqrt())
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/√π Σ (-1)^n x^{2n+1} / (n! (2n+1))
    if x == 0.0 || x.is_nan() {
        return x;
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x > 27.0 {
        return 0.0;
    }
    erfcx(x) * (-x * x).exp()
}

/// Standard normal CDF.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// ln Φ(z), accurate deep in the lower tail.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z > -1.0 {
        return norm_cdf(z).ln();
    }
    let u = -z / SQRT_2;
    (0.5 * erfcx(u)).ln() - u * u
}

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}
