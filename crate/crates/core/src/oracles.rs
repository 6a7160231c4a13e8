//! Independent reference computations: Fourier inversion of the product
//! characteristic function, Monte Carlo paths, and a Riccati ODE solver for
//! moment explosion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heston::{self, HestonModel, HestonParams};
use crate::mixed::{Jumps, MixedModel};
use crate::numerics::rng::stream;
use crate::numerics::{find_root, integrate_pieces, Tolerance};

/// Fraction of the moment interval used when choosing a tilt.
const EDGE_FRACTION: f64 = 0.97;

/// Largest frequency examined before giving up on decay of the transform.
const MAX_FREQUENCY: f64 = 1e5;

/// A log-price law known through its characteristic function.
pub trait LogCf {
    /// `log E[exp(iu log X)]` for complex `u` with `-Im u` inside [`moment_interval`](Self::moment_interval).
    fn log_cf(&self, u: Complex64) -> Complex64;

    /// Open interval of orders `s` with `E[X^s] < ∞`.
    fn moment_interval(&self) -> (f64, f64);

    /// `log E[X^s]`.
    fn ln_moment(&self, s: f64) -> f64 {
        self.log_cf(Complex64::new(0.0, -s)).re
    }
}

impl LogCf for HestonModel {
    fn log_cf(&self, u: Complex64) -> Complex64 {
        heston::log_cf(&self.params, u)
    }

    fn moment_interval(&self) -> (f64, f64) {
        (self.moments.s_minus, self.moments.s_plus)
    }
}

/// `λt(E[e^(iuU)] - 1)` for double-exponential `U`.
fn kou_log_cf(p: &crate::kou::KouJumpParams, u: Complex64) -> Complex64 {
    let iu = Complex64::i() * u;
    let up = p.p * p.eta1 / (p.eta1 - iu);
    let down = p.q * p.eta2 / (p.eta2 + iu);
    p.lambda_t() * (up + down - 1.0)
}

impl LogCf for MixedModel {
    fn log_cf(&self, u: Complex64) -> Complex64 {
        let jump = match &self.jumps {
            Jumps::Kou(k) => kou_log_cf(&k.params, u),
            Jumps::Nig(n) => n.log_cf(u),
        };
        self.heston.log_cf(u) + jump
    }

    fn moment_interval(&self) -> (f64, f64) {
        MixedModel::moment_interval(self)
    }
}

/// Characteristic function of `log X_t` for the mixed model.
pub fn mixed_cf(model: &MixedModel, u: f64) -> Complex64 {
    model.log_cf(Complex64::new(u, 0.0)).exp()
}

fn clipped_interval<M: LogCf + ?Sized>(model: &M) -> (f64, f64) {
    let (lo, hi) = model.moment_interval();
    (EDGE_FRACTION * lo, EDGE_FRACTION * hi)
}

/// Order `s` in `[lo, hi]` minimising `log E[X^s] - s·y`.
fn saddle<M: LogCf + ?Sized>(model: &M, y: f64, lo: f64, hi: f64) -> f64 {
    let slope = |s: f64| {
        let h = 1e-6 * s.abs().max(1.0);
        (model.ln_moment(s + h) - model.ln_moment(s - h)) / (2.0 * h) - y
    };
    if slope(lo) >= 0.0 {
        return lo;
    }
    if slope(hi) <= 0.0 {
        return hi;
    }
    find_root(slope, lo, hi, &Tolerance::rel(1e-8).with_abs(1e-10)).unwrap_or(0.5 * (lo + hi))
}

/// Smallest frequency past which `|φ(v - iα)| / E[X^α] < floor`.
fn frequency_reach<M: LogCf + ?Sized>(model: &M, alpha: f64, ln_m: f64, floor: f64) -> Result<f64> {
    let ln_floor = floor.ln();
    let mut v = 1.0;
    while v <= MAX_FREQUENCY {
        if model.log_cf(Complex64::new(v, -alpha)).re - ln_m < ln_floor {
            return Ok(v);
        }
        v *= 1.5;
    }
    Err(Error::Oracle {
        detail: format!(
            "transform tilted by {alpha} has not decayed below {floor:e} by frequency {MAX_FREQUENCY:e}"
        ),
    })
}

/// Breakpoints on `[0, reach]` that resolve oscillation at log-strike `y`.
fn frequency_grid(reach: f64, y: f64) -> Vec<f64> {
    let n = ((reach * y.abs().max(1.0) / PI).ceil() as usize).clamp(8, 4000);
    (0..=n).map(|i| reach * i as f64 / n as f64).collect()
}

/// The tilted integrands peak at 1 near `v = 0`, so pieces that nearly
/// cancel are held to an absolute floor of `rel / pieces`.
fn piece_tolerance(tol: &Tolerance, pieces: usize) -> Tolerance {
    tol.with_abs(tol.abs.max(tol.rel / pieces as f64))
}

/// Density of `X_t` at `x` by inversion of the tilted characteristic
/// function of `log X_t`; the tilt is placed at the saddle point.
pub fn density_fourier<M: LogCf + ?Sized>(model: &M, x: f64, tol: &Tolerance) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("density_fourier", format!("x = {x} must be positive")));
    }
    let y = x.ln();
    let (lo, hi) = clipped_interval(model);
    let alpha = saddle(model, y, lo, hi);
    let ln_m = model.ln_moment(alpha);
    let reach = frequency_reach(model, alpha, ln_m, 1e-17)?;
    let integrand = |v: f64| {
        let z = model.log_cf(Complex64::new(v, -alpha)) - ln_m - Complex64::new(0.0, v * y);
        z.exp().re
    };
    let grid = frequency_grid(reach, y);
    let integral = integrate_pieces(integrand, &grid, &piece_tolerance(tol, grid.len())).map_err(|e| Error::Oracle {
        detail: format!("density inversion at x = {x} (tilt {alpha}, reach {reach}): {e}"),
    })?;
    Ok((ln_m - alpha * y - y).exp() * integral / PI)
}

/// Choice of the damping order for [`call_fourier`] and [`put_fourier`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping {
    /// Midpoint of `(1, s₊)` for calls, of `(s₋, 0)` for puts.
    Midpoint,
    /// Saddle point of the damped payoff transform, clipped inside the strip.
    Saddle,
    /// The given moment order `R`; `R > 1` prices a call, `R < 0` a put.
    Fixed(f64),
}

/// `E[(X-K)^+]` for `R > 1`, or `E[(K-X)^+]` for `R < 0`, by inversion of
/// the transform of the payoff damped by `K^R`.
pub fn damped_price<M: LogCf + ?Sized>(model: &M, strike: f64, r: f64, tol: &Tolerance) -> Result<f64> {
    let (lo, hi) = model.moment_interval();
    if !(strike > 0.0) {
        return Err(Error::domain("damped_price", format!("strike {strike} must be positive")));
    }
    if !(r > lo && r < hi) || (0.0..=1.0).contains(&r) {
        return Err(Error::Oracle {
            detail: format!("damping order {r} is not in ({lo}, 0) ∪ (1, {hi})"),
        });
    }
    let k = strike.ln();
    let a = r - 1.0;
    let ln_m = model.ln_moment(r);
    let reach = frequency_reach(model, r, ln_m, 1e-17)?;
    let integrand = |v: f64| {
        let phi = (model.log_cf(Complex64::new(v, -r)) - ln_m - Complex64::new(0.0, v * k)).exp();
        let den = Complex64::new(a, v) * Complex64::new(a + 1.0, v);
        (phi / den).re
    };
    let grid = frequency_grid(reach, k);
    let integral = integrate_pieces(integrand, &grid, &piece_tolerance(tol, grid.len())).map_err(|e| Error::Oracle {
        detail: format!("price inversion at K = {strike} (damping {r}): {e}"),
    })?;
    Ok((ln_m - a * k).exp() * integral / PI)
}

fn damping_order<M: LogCf + ?Sized>(model: &M, strike: f64, damping: Damping, call: bool) -> f64 {
    let (lo, hi) = model.moment_interval();
    match damping {
        Damping::Fixed(r) => r,
        Damping::Midpoint if call => 0.5 * (1.0 + hi),
        Damping::Midpoint => 0.5 * lo,
        Damping::Saddle => {
            let (a, b) = if call {
                (1.0 + 0.05 * (hi - 1.0), EDGE_FRACTION * hi)
            } else {
                (EDGE_FRACTION * lo, 0.05 * lo)
            };
            saddle(model, strike.ln(), a, b)
        }
    }
}

/// Undiscounted call price `E[(X_t - K)^+]`.
pub fn call_fourier<M: LogCf + ?Sized>(model: &M, strike: f64, damping: Damping, tol: &Tolerance) -> Result<f64> {
    let r = damping_order(model, strike, damping, true);
    if r < 0.0 {
        let put = damped_price(model, strike, r, tol)?;
        return Ok(put + model.ln_moment(1.0).exp() - strike);
    }
    damped_price(model, strike, r, tol)
}

/// Undiscounted put price `E[(K - X_t)^+]`.
pub fn put_fourier<M: LogCf + ?Sized>(model: &M, strike: f64, damping: Damping, tol: &Tolerance) -> Result<f64> {
    let r = damping_order(model, strike, damping, false);
    if r > 1.0 {
        let call = damped_price(model, strike, r, tol)?;
        return Ok(call - model.ln_moment(1.0).exp() + strike);
    }
    damped_price(model, strike, r, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n_paths: usize,
    pub steps: usize,
    pub seed: u64,
    /// Minimum number of time steps per unit of time.
    pub min_steps_per_year: f64,
}

impl McSettings {
    pub fn new(n_paths: usize, steps: usize, seed: u64) -> Self {
        Self {
            n_paths,
            steps,
            seed,
            min_steps_per_year: 50.0,
        }
    }
}

/// Paths per random sub-stream.
const CHUNK: usize = 8192;

fn heston_log_return<R: Rng + ?Sized>(p: &HestonParams, steps: usize, rng: &mut R) -> f64 {
    let dt = p.t / steps as f64;
    let sq = dt.sqrt();
    let perp = (1.0 - p.rho * p.rho).sqrt();
    let mut y = p.y0;
    let mut lx = 0.0;
    for _ in 0..steps {
        let yp = y.max(0.0);
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        let vol = yp.sqrt() * sq;
        lx += -0.5 * yp * dt + vol * (p.rho * z1 + perp * z2);
        y += (p.a - p.b * yp) * dt + p.c * vol * z1;
    }
    lx + p.mu * p.t
}

/// Terminal prices `X_t`: full-truncation Euler variance, lognormal
/// increments given the variance path, times an independent jump factor.
pub fn simulate_paths(model: &MixedModel, settings: &McSettings) -> Result<Vec<f64>> {
    simulate(&model.heston.params, Some(&model.jumps), settings)
}

/// Terminal prices of the Heston model without jumps, same scheme as [`simulate_paths`].
pub fn simulate_heston_paths(params: &HestonParams, settings: &McSettings) -> Result<Vec<f64>> {
    params.validate()?;
    simulate(params, None, settings)
}

fn simulate(p: &HestonParams, jumps: Option<&Jumps>, settings: &McSettings) -> Result<Vec<f64>> {
    let per_year = settings.steps as f64 / p.t;
    if settings.steps == 0 || per_year < settings.min_steps_per_year {
        return Err(Error::InvalidParameter {
            name: "steps",
            value: settings.steps as f64,
            constraint: "at least min_steps_per_year steps per unit time",
        });
    }
    let n = settings.n_paths;
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(settings.seed, c as u64);
            let count = CHUNK.min(n - c * CHUNK);
            (0..count)
                .map(|_| {
                    let lx = heston_log_return(p, settings.steps, &mut rng);
                    let jump = match jumps {
                        Some(Jumps::Kou(k)) => k.sample_log_jump(&mut rng),
                        Some(Jumps::Nig(g)) => g.sample(&mut rng),
                        None => 0.0,
                    };
                    p.x0 * (lx + jump).exp()
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// Sample mean of `f` with its standard error.
pub fn mc_estimate<F: Fn(f64) -> f64>(samples: &[f64], f: F, seed: u64) -> MCResult {
    let n = samples.len();
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &x) in samples.iter().enumerate() {
        let v = f(x);
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    MCResult {
        estimate: mean,
        std_error: (var / n as f64).sqrt(),
        n_paths: n,
        seed,
    }
}

/// Simulates and averages `f(X_t)`.
pub fn mc_expectation<F: Fn(f64) -> f64>(model: &MixedModel, settings: &McSettings, f: F) -> Result<MCResult> {
    let samples = simulate_paths(model, settings)?;
    Ok(mc_estimate(&samples, f, settings.seed))
}

/// Step of the RK4 integrator in [`riccati_explosion_time`].
pub const RICCATI_STEP: f64 = 1e-4;

fn rk4<F: Fn(f64) -> f64>(f: &F, v: f64, h: f64) -> f64 {
    let k1 = f(v);
    let k2 = f(v + 0.5 * h * k1);
    let k3 = f(v + 0.5 * h * k2);
    let k4 = f(v + h * k3);
    v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Blow-up time of `ψ' = ½s(s-1) + (ρcs - b)ψ + ½c²ψ²`, `ψ(0) = 0`, found by
/// integrating up to `t_max`; `+∞` if `ψ` stays finite there.
///
/// Once `|ψ| > 1` the solver follows `v = 1/ψ` instead, which crosses zero
/// smoothly at the blow-up.
pub fn riccati_explosion_time(params: &HestonParams, s: f64, t_max: f64) -> f64 {
    let p = params;
    let k = 0.5 * s * (s - 1.0);
    let beta = p.rho * p.c * s - p.b;
    let half_c2 = 0.5 * p.c * p.c;
    let f_psi = |psi: f64| k + beta * psi + half_c2 * psi * psi;
    let f_inv = |v: f64| -(k * v * v + beta * v + half_c2);
    let h = RICCATI_STEP;
    let (mut t, mut psi, mut inv, mut inverted) = (0.0, 0.0, 0.0, false);
    while t < t_max {
        if inverted {
            let next = rk4(&f_inv, inv, h);
            if next <= 0.0 && inv > 0.0 {
                let (mut a, mut b) = (0.0, h);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if rk4(&f_inv, inv, m) > 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return t + 0.5 * (a + b);
            }
            inv = next;
            if inv.abs() > 1.0 {
                inverted = false;
                psi = 1.0 / inv;
            }
        } else {
            psi = rk4(&f_psi, psi, h);
            if psi.abs() > 1.0 {
                inverted = true;
                inv = 1.0 / psi;
            }
        }
        t += h;
    }
    f64::INFINITY
}

/// Upper (`upward = true`) or lower critical moment at horizon `t`, by
/// bisection on the sign of `T*(s) - t` with `T*` from the Riccati solver.
pub fn riccati_critical_moment(params: &HestonParams, upward: bool) -> Result<f64> {
    let t = params.t;
    let explodes = |s: f64| riccati_explosion_time(params, s, 1.5 * t + 1.0) <= t;
    let inner = if upward { 1.0 } else { 0.0 };
    let mut outer = if upward { 2.0 } else { -1.0 };
    let mut steps = 0;
    while !explodes(outer) {
        outer = inner + 2.0 * (outer - inner);
        steps += 1;
        if steps > 60 {
            return Err(Error::Oracle {
                detail: format!("no exploding order found, last tried {outer}"),
            });
        }
    }
    let (mut a, mut b) = (inner, outer);
    while (b - a).abs() > 1e-11 * b.abs().max(1.0) {
        let m = 0.5 * (a + b);
        if explodes(m) {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heston::explosion_time;
    use crate::kou::KouJumpParams;
    use crate::nig::NigParams;
    use crate::numerics::integrate;

    fn heston() -> HestonModel {
        HestonModel::new(HestonParams::REFERENCE).unwrap()
    }

    fn kou_model() -> MixedModel {
        let j = KouJumpParams {
            lambda: 1.0,
            eta1: 4.0,
            eta2: 3.0,
            p: 0.5,
            q: 0.5,
            t: 1.0,
        };
        MixedModel::kou(HestonParams::REFERENCE, j).unwrap().with_martingale_drift().unwrap()
    }

    #[test]
    fn cf_basic_properties() {
        let m = kou_model();
        assert!((mixed_cf(&m, 0.0) - 1.0).norm() < 1e-14);
        let (a, b) = (mixed_cf(&m, 1.7), mixed_cf(&m, -1.7));
        assert!((a - b.conj()).norm() < 1e-14);
        assert!((m.ln_moment(2.0) - m.ln_mgf(2.0).unwrap()).abs() < 1e-12);
        assert!((m.ln_moment(1.0)).abs() < 1e-12);
    }

    #[test]
    fn heston_density_normalizes_and_is_unimodal() {
        let h = heston();
        let tol = Tolerance::rel(1e-11);
        let f = |y: f64| density_fourier(&h, y.exp(), &tol).unwrap() * y.exp();
        let total = integrate(f, -30.0, 30.0, &Tolerance::rel(1e-9)).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        let grid: Vec<f64> = (0..60).map(|i| 0.3 + 0.03 * i as f64).map(|x| density_fourier(&h, x, &tol).unwrap()).collect();
        let peak = grid.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!(grid[..peak].windows(2).all(|w| w[0] <= w[1]));
        assert!(grid[peak..].windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn heston_density_wings_extrapolate_to_asymptotes() {
        let h = heston();
        let tol = Tolerance::rel(1e-11);
        let ells: Vec<f64> = (0..13).map(|i| 6.0 + 0.5 * i as f64).collect();
        let large: Vec<f64> = ells
            .iter()
            .map(|&l| (density_fourier(&h, l.exp(), &tol).unwrap() / h.density_tail(l.exp()).unwrap()).ln())
            .collect();
        let small: Vec<f64> = ells
            .iter()
            .map(|&l| (density_fourier(&h, (-l).exp(), &tol).unwrap() / h.density_zero((-l).exp()).unwrap()).ln())
            .collect();
        for logs in [large, small] {
            assert!(logs.windows(2).all(|w| w[1] > w[0]));
            let c = crate::numerics::inverse_sqrt_fit(&ells, &logs).unwrap();
            assert!((c[0].exp() - 1.0).abs() < 0.15, "{c:?}");
        }
    }

    #[test]
    fn parity_and_limits() {
        let m = kou_model();
        let tol = Tolerance::rel(1e-12);
        for k in [0.5, 1.0, 1.6] {
            let c = call_fourier(&m, k, Damping::Midpoint, &tol).unwrap();
            let p = put_fourier(&m, k, Damping::Midpoint, &tol).unwrap();
            assert!((c - p - (1.0 - k)).abs() < 1e-8, "{k}: {c} {p}");
            let s = call_fourier(&m, k, Damping::Saddle, &tol).unwrap();
            assert!((c - s).abs() < 1e-9);
        }
        let c0 = call_fourier(&m, 1e-6, Damping::Midpoint, &tol).unwrap();
        assert!((c0 - 1.0).abs() < 1e-5);
        assert!(damped_price(&m, 1.0, 0.5, &tol).is_err());
    }

    #[test]
    fn calls_are_decreasing_and_convex() {
        let m = kou_model();
        let tol = Tolerance::rel(1e-12);
        let c: Vec<f64> = (0..30)
            .map(|i| call_fourier(&m, 0.4 + 0.05 * i as f64, Damping::Midpoint, &tol).unwrap())
            .collect();
        assert!(c.windows(2).all(|w| w[1] < w[0]));
        assert!(c.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] > -1e-12));
    }

    #[test]
    fn riccati_oracle_matches_closed_form() {
        let p = HestonParams::REFERENCE;
        for s in [8.0, 15.0, -8.0, -20.0] {
            let a = riccati_explosion_time(&p, s, 20.0);
            let b = explosion_time(&p, s);
            assert!((a - b).abs() < 1e-9 * b.max(1.0), "{s}: {a} {b}");
        }
        assert_eq!(riccati_explosion_time(&p, 0.5, 20.0), f64::INFINITY);
        let cm = heston::critical_moments(&p).unwrap();
        assert!((riccati_critical_moment(&p, true).unwrap() - cm.s_plus).abs() < 1e-8);
        assert!((riccati_critical_moment(&p, false).unwrap() - cm.s_minus).abs() < 1e-8);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_centred() {
        let m = kou_model();
        let s = McSettings::new(20_000, 50, 11);
        let a = mc_expectation(&m, &s, |x| x).unwrap();
        let b = mc_expectation(&m, &s, |x| x).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 1.0).abs() < 4.0 * a.std_error);
        assert!(simulate_paths(&m, &McSettings::new(10, 10, 1)).is_err());
    }

    #[test]
    fn nig_model_density_normalizes() {
        let m = MixedModel::nig(HestonParams::REFERENCE, NigParams { alpha: 3.0, delta: 0.5, t: 1.0 })
            .unwrap()
            .with_martingale_drift()
            .unwrap();
        let tol = Tolerance::rel(1e-11);
        let f = |y: f64| density_fourier(&m, y.exp(), &tol).unwrap() * y.exp();
        let total = integrate(f, -30.0, 30.0, &Tolerance::rel(1e-9)).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }
}

