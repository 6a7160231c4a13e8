//! The acceptance criteria as executable checks.
//!
//! Each `criterion_N` builds its own configuration, runs the comparison
//! against an independent oracle and returns a [`CriterionReport`]. A
//! criterion passes when every check holds and the runtime stays within
//! its budget.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heston::{critical_moments, explosion_time, HestonParams};
use crate::kou::{coefficients, frac_integral, KouJumpParams, KouJumps};
use crate::mellin::{convolve_asymptote_infinity, convolve_asymptote_zero, mellin_convolve_with_breaks, mellin_transform};
use crate::mixed::{Dominant, Jumps, MixedModel, Wing, WingAsymptote};
use crate::nig::NigParams;
use crate::numerics::{integrate, integrate_pieces, inverse_sqrt_fit, Tolerance};
use crate::oracles::{
    call_fourier, density_fourier, mc_estimate, put_fourier, riccati_critical_moment, simulate_paths, Damping,
    McSettings,
};
use crate::smile::{bs_call, bs_implied_vol, bs_implied_vol_put, bs_put, smile_expansion, SmileExpansion};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub within_budget: bool,
    pub elapsed_s: f64,
    pub budget_s: f64,
    pub detail: String,
}

impl CriterionReport {
    /// One summary line: `PASS [ 6] mixed-density wings (12.3 s / 300 s): ...`.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.1} s / {:.0} s{}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_s,
            self.budget_s,
            if self.within_budget { "" } else { ", over budget" },
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub mc_paths: usize,
    pub mc_steps: usize,
    pub seed: u64,
    /// Relative tolerance of the Fourier density and price oracles.
    pub oracle_rel: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            mc_paths: 1_000_000,
            mc_steps: 200,
            seed: 20240601,
            oracle_rel: 1e-11,
        }
    }
}

/// Loosest Fourier-oracle tolerance the oracle-based criteria accept.
pub const MAX_ORACLE_REL: f64 = 1e-6;

fn check_oracle(settings: &ValidationSettings) -> Result<()> {
    if settings.oracle_rel > MAX_ORACLE_REL {
        return Err(Error::Config(format!(
            "oracle tolerance {:e} is looser than {MAX_ORACLE_REL:e}",
            settings.oracle_rel
        )));
    }
    Ok(())
}

/// Kou parameters at `t = 1`, `λ = 1`.
pub fn kou_params(p: f64, eta1: f64, eta2: f64) -> KouJumpParams {
    KouJumpParams {
        lambda: 1.0,
        eta1,
        eta2,
        p,
        q: 1.0 - p,
        t: 1.0,
    }
}

/// Jump-dominant in both wings against the reference Heston set.
pub const KOU_JUMP: (f64, f64, f64) = (0.5, 4.0, 3.0);
/// Diffusion-dominant in both wings.
pub const KOU_DIFFUSION: (f64, f64, f64) = (0.5, 20.0, 12.0);
/// Jump-dominant NIG.
pub const NIG_JUMP: NigParams = NigParams {
    alpha: 3.0,
    delta: 0.5,
    t: 1.0,
};
/// Diffusion-dominant NIG.
pub const NIG_DIFFUSION: NigParams = NigParams {
    alpha: 14.0,
    delta: 0.5,
    t: 1.0,
};

pub fn kou_model(config: (f64, f64, f64)) -> Result<MixedModel> {
    MixedModel::kou(HestonParams::REFERENCE, kou_params(config.0, config.1, config.2))?.with_martingale_drift()
}

pub fn nig_model(params: NigParams) -> Result<MixedModel> {
    MixedModel::nig(HestonParams::REFERENCE, params)?.with_martingale_drift()
}

fn finish(id: u8, name: &str, budget_s: f64, start: Instant, outcome: Result<(bool, String)>) -> CriterionReport {
    let elapsed_s = start.elapsed().as_secs_f64();
    let within_budget = elapsed_s <= budget_s;
    let (ok, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name: name.to_string(),
        passed: ok && within_budget,
        within_budget,
        elapsed_s,
        budget_s,
        detail,
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `max(v) ≤ factor · max(v[..head])` with all values finite.
fn bounded_by_head(v: &[f64], head: usize, factor: f64) -> bool {
    v.iter().all(|x| x.is_finite()) && max_of(v) <= factor * max_of(&v[..head])
}

/// Theorem-level coefficient inequalities on the parameter grid.
pub fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut ok = true;
        let mut worst: f64 = 0.0;
        let mut cases = 0;
        let tol = Tolerance::rel(1e-15);
        for lt in [0.5, 1.0, 2.0] {
            for p in [0.3, 0.5, 0.7] {
                for eta1 in [2.0, 5.0] {
                    for eta2 in [1.0, 3.0] {
                        let params = KouJumpParams {
                            lambda: lt,
                            ..kou_params(p, eta1, eta2)
                        };
                        let tab = coefficients(&params, 60, &tol)?;
                        let scaled = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
                            (0..=60).map(|k| f(k).abs() * (k + 1) as f64).collect()
                        };
                        let positive = (0..=60).all(|k| tab.a_excess(k) > 0.0 && tab.b_excess(k) > 0.0);
                        let seqs = [
                            scaled(&|k| tab.a_excess(k)),
                            scaled(&|k| tab.b_excess(k)),
                            scaled(&|k| tab.a_vs_d(k)),
                            scaled(&|k| tab.b_vs_l(k)),
                        ];
                        for s in &seqs {
                            let ratio = max_of(s) / max_of(&s[..=10]);
                            worst = worst.max(ratio);
                            ok &= bounded_by_head(s, 11, 10.0);
                        }
                        ok &= positive;
                        cases += 1;
                    }
                }
            }
        }
        Ok((
            ok,
            format!("{cases} parameter sets, k ≤ 60; worst max_k/max_(k≤10) ratio {worst:.3} (limit 10)"),
        ))
    })();
    finish(1, "coefficient inequalities", 10.0, start, outcome)
}

/// Second-order envelope of `G1` by the fractional integrals of the cosh comparison function.
pub fn criterion_2() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut ok = true;
        let mut detail = String::new();
        for config in [KOU_JUMP, (0.3, 2.0, 1.0)] {
            let params = kou_params(config.0, config.1, config.2);
            let k = KouJumps::with_reach(params, 400.0, Tolerance::rel(1e-15))?;
            let (s, r) = k.comparison_sr();
            let grid = log_grid(1.0, 400.0, 40);
            let mut vals = Vec::with_capacity(grid.len());
            for &u in &grid {
                let lg = k.ln_g1(u)?;
                let l15 = frac_integral(-1.5, s, r, u)?.ln();
                let l25 = frac_integral(-2.5, s, r, u)?.ln();
                vals.push(((lg - l25).exp() - (l15 - l25).exp()).abs());
            }
            let full = max_of(&vals);
            let upper = max_of(&vals[20..]);
            let ratio = upper / full;
            ok &= full.is_finite() && ratio > 0.5;
            let _ = write!(detail, "p={} η=({}, {}): sup {full:.4}, upper/full {ratio:.3}; ", config.0, config.1, config.2);
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })();
    finish(2, "fractional-integral envelope", 30.0, start, outcome)
}

/// `H1`, `H2` against their leading terms far out.
pub fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let ells = [10.0, 30.0, 100.0, 300.0, 1e3, 1e4];
        let mut ok = true;
        let mut detail = String::new();
        for config in [KOU_JUMP, (0.3, 2.0, 1.0)] {
            let params = kou_params(config.0, config.1, config.2);
            let k = KouJumps::with_reach(params, 1.1e4, Tolerance::rel(1e-15))?;
            let (up, down) = (k.jump_tail_asymptote(), k.jump_zero_asymptote());
            let mut h1 = Vec::new();
            let mut h2 = Vec::new();
            for &l in &ells {
                h1.push((k.ln_g1(l)? - up.ln_slowly_varying_at_ell(l)).exp_m1().abs() * l.sqrt());
                h2.push((k.ln_g2(l)? - down.ln_slowly_varying_at_ell(l)).exp_m1().abs() * l.sqrt());
            }
            ok &= bounded_by_head(&h1, 2, 3.0) && bounded_by_head(&h2, 2, 3.0);
            let _ = write!(
                detail,
                "p={} η=({}, {}): max|res|√ℓ H1 {:.3}, H2 {:.3}; ",
                config.0,
                config.1,
                config.2,
                max_of(&h1),
                max_of(&h2)
            );
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })();
    finish(3, "jump-tail asymptote", 10.0, start, outcome)
}

/// Compactly supported bump on `[1/2, 2]`.
pub fn bump(x: f64) -> f64 {
    let y = x.ln() / std::f64::consts::LN_2;
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - y * y).powi(2)
    }
}

/// Mellin convolution of a bump with `H` against `MU(-η1-1) x^(-η1-1) H1`.
pub fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let params = kou_params(KOU_JUMP.0, KOU_JUMP.1, KOU_JUMP.2);
        let k = KouJumps::with_reach(params, 60.0, Tolerance::rel(1e-15))?;
        let tol = Tolerance::rel(1e-12);
        let mu = mellin_transform(bump, -params.eta1 - 1.0, &tol)?;
        let ells: Vec<f64> = (0..15).map(|i| 15.0 + 2.5 * i as f64).collect();
        let mut vals = Vec::new();
        for &l in &ells {
            let x = l.exp();
            let ln2 = std::f64::consts::LN_2;
            let conv = mellin_convolve_with_breaks(
                bump,
                |t: f64| k.h_density(t).unwrap_or(f64::NAN),
                x,
                &[l - ln2, l + ln2],
                &tol,
            )?;
            let reference = mu * k.h_density(x)?;
            vals.push((conv / reference - 1.0).abs() * l.sqrt());
        }
        let ok = bounded_by_head(&vals, 5, 3.0);
        Ok((
            ok,
            format!(
                "ℓ ∈ [15, 50]: |ratio-1|√ℓ from {:.4} to {:.4}, max {:.4}",
                vals[0],
                vals[vals.len() - 1],
                max_of(&vals)
            ),
        ))
    })();
    finish(4, "Mellin asymptote", 60.0, start, outcome)
}

/// Critical moments against the Riccati blow-up oracle.
pub fn criterion_5() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut ok = true;
        let mut detail = String::new();
        for t in [0.25, 1.0, 4.0] {
            let p = HestonParams::REFERENCE.with_horizon(t);
            let cm = critical_moments(&p)?;
            let gap = (explosion_time(&p, cm.s_plus) - t).abs();
            let oracle = riccati_critical_moment(&p, true)?;
            let diff = (oracle - cm.s_plus).abs();
            let oracle_minus = riccati_critical_moment(&p, false)?;
            let diff_minus = (oracle_minus - cm.s_minus).abs();
            ok &= gap <= 1e-8 && diff <= 1e-6 && diff_minus <= 1e-6;
            let _ = write!(
                detail,
                "t={t}: s+={:.8} |T*-t|={gap:.1e} |Δs+|={diff:.1e} |Δs-|={diff_minus:.1e}; ",
                cm.s_plus
            );
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })();
    finish(5, "critical moments", 5.0, start, outcome)
}

/// Log-ratios of the Fourier density to an asymptote over `ℓ ∈ [6, 12]`,
/// with the extrapolated constant `e^A` from the four-term fit.
pub fn wing_ratio_fit(model: &MixedModel, wing: &WingAsymptote, oracle_rel: f64) -> Result<(Vec<f64>, f64)> {
    let ells: Vec<f64> = (0..13).map(|i| 6.0 + 0.5 * i as f64).collect();
    let tol = Tolerance::rel(oracle_rel);
    let mut logs = Vec::with_capacity(ells.len());
    for &l in &ells {
        let y = match wing.regime.wing {
            Wing::Large => l,
            Wing::Small => -l,
        };
        let d = density_fourier(model, y.exp(), &tol)?;
        logs.push(d.ln() - wing.asymptote.ln_value_at_ell(l));
    }
    let c = inverse_sqrt_fit(&ells, &logs)?;
    Ok((logs, c[0].exp()))
}

fn monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0]) || v.windows(2).all(|w| w[1] <= w[0])
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Mixed-density wing asymptotes against the Fourier oracle and the
/// convolution route.
pub fn criterion_6(settings: &ValidationSettings) -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        check_oracle(settings)?;
        let mut ok = true;
        let mut detail = String::new();
        for (label, config) in [("jump-dominant", KOU_JUMP), ("diffusion-dominant", KOU_DIFFUSION)] {
            let m = kou_model(config)?;
            let Jumps::Kou(k) = &m.jumps else {
                unreachable!("kou_model builds Kou jumps")
            };
            for wing in [m.tail_asymptote()?, m.zero_asymptote()?] {
                let route = match (wing.regime.wing, wing.regime.dominant) {
                    (Wing::Large, Dominant::Jump) => convolve_asymptote_infinity(&m.heston, &k.jump_tail_asymptote())?,
                    (Wing::Large, Dominant::Diffusion) => convolve_asymptote_infinity(k, &m.heston.tail_asymptote())?,
                    (Wing::Small, Dominant::Jump) => convolve_asymptote_zero(&m.heston, &k.jump_zero_asymptote())?,
                    (Wing::Small, Dominant::Diffusion) => convolve_asymptote_zero(k, &m.heston.zero_asymptote())?,
                };
                let a = &wing.asymptote;
                let identity = rel_diff(a.r1, route.r1).max(rel_diff(a.r2, route.r2)).max(rel_diff(a.r3, route.r3));
                let (logs, limit) = wing_ratio_fit(&m, &wing, settings.oracle_rel)?;
                let pass = identity <= 1e-12 && monotone(&logs) && (limit - 1.0).abs() <= 0.15;
                ok &= pass;
                let _ = write!(
                    detail,
                    "{label} {:?}: ratio {:.3}→{:.3}, fitted limit {limit:.3}, identity {identity:.1e}; ",
                    wing.regime.wing,
                    logs[0].exp(),
                    logs[logs.len() - 1].exp()
                );
            }
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })();
    finish(6, "mixed-density wings", 300.0, start, outcome)
}

/// Martingale property of the simulated mixed price under the no-arbitrage drift.
pub fn criterion_7(settings: &ValidationSettings) -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut ok = true;
        let mut detail = String::new();
        let mc = McSettings::new(settings.mc_paths, settings.mc_steps, settings.seed);
        for (label, m) in [("kou", kou_model(KOU_JUMP)?), ("nig", nig_model(NIG_JUMP)?)] {
            let r = mc_estimate(&simulate_paths(&m, &mc)?, |x| x, mc.seed);
            let z = (r.estimate - m.heston.params.x0) / r.std_error;
            ok &= z.abs() <= 3.0;
            let _ = write!(detail, "{label}: mean {:.5} ± {:.5} (z = {z:.2}); ", r.estimate, r.std_error);
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })();
    finish(7, "martingale", 120.0, start, outcome)
}

/// Closed-form moments against simulation, and Mellin transforms against moments.
pub fn criterion_8(settings: &ValidationSettings) -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut ok = true;
        let mut detail = String::new();
        let mc = McSettings::new(settings.mc_paths, settings.mc_steps, settings.seed ^ 0x9e37_79b9);
        let models = [
            ("kou", kou_model((0.5, 10.0, 5.0))?),
            ("nig", nig_model(NigParams { alpha: 5.0, ..NIG_JUMP })?),
        ];
        for (label, m) in &models {
            let samples = simulate_paths(m, &mc)?;
            for s in [-1.0, 0.5, 2.0] {
                let exact = m.mgf(s)?;
                let r = mc_estimate(&samples, |x| x.powf(s), mc.seed);
                let z = (r.estimate - exact) / r.std_error;
                ok &= z.abs() <= 3.0;
                let _ = write!(detail, "{label} s={s}: z={z:.2}; ");
            }
        }
        let tol = Tolerance::rel(1e-12);
        let nig = NIG_JUMP;
        let kou = KouJumps::with_reach(kou_params(KOU_JUMP.0, KOU_JUMP.1, KOU_JUMP.2), 400.0, tol)?;
        let mut worst: f64 = 0.0;
        for eta in [-3.0, -2.0, -1.5, 0.0, 1.0] {
            let q = mellin_transform(|x| nig.price_density(x).map(|d| d.value).unwrap_or(f64::NAN), eta, &tol)?;
            worst = worst.max(rel_diff(q, nig.mgf(-eta - 1.0)?));
        }
        for eta in [-4.0, -3.0, -1.5, 0.0, 1.0] {
            let q = mellin_transform(|x| kou.h_density(x).unwrap_or(f64::NAN), eta, &tol)? + kou.atom_mass();
            worst = worst.max(rel_diff(q, kou.jump_mgf(-eta - 1.0)?));
        }
        ok &= worst <= 1e-8;
        let _ = write!(detail, "MU(η) vs m(-η-1) worst rel {worst:.1e}");
        Ok((ok, detail))
    })();
    finish(8, "moment identities", 120.0, start, outcome)
}

/// Residual of the five-term expansion against inversion of the leading-term price.
pub fn expansion_residuals(e: &SmileExpansion, ls: &[f64]) -> Result<Vec<f64>> {
    ls.iter()
        .map(|&l| Ok((e.implied_vol_of_asymptotic_price(l)? - e.at(l)) * l))
        .collect()
}

/// Implied volatility of the exact (Fourier) price at `L` on the expansion's wing.
pub fn exact_implied_vol(model: &MixedModel, e: &SmileExpansion, l: f64, oracle_rel: f64) -> Result<f64> {
    let tol = Tolerance::rel(oracle_rel);
    let (x0, t) = (e.x0, e.t);
    match e.wing {
        Wing::Large => {
            let k = x0 * l.exp();
            bs_implied_vol(call_fourier(model, k, Damping::Saddle, &tol)?, x0, k, t)
        }
        Wing::Small => {
            let k = x0 * (-l).exp();
            bs_implied_vol_put(put_fourier(model, k, Damping::Saddle, &tol)?, x0, k, t)
        }
    }
}

/// Ls used for the expansion residual scan.
pub fn residual_grid() -> (Vec<f64>, Vec<f64>) {
    let low: Vec<f64> = (0..11).map(|i| 10.0 + 2.0 * i as f64).collect();
    let high: Vec<f64> = (0..15).map(|i| 30.0 + 5.0 * i as f64).collect();
    (low, high)
}

/// Strikes (as `L`) where the expansion is compared with exact prices.
pub const EXACT_PRICE_LS: [f64; 2] = [6.0, 8.0];

pub fn criterion_9(settings: &ValidationSettings) -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        check_oracle(settings)?;
        let mut ok = true;
        let mut detail = String::new();
        let variants = [
            ("kou jump", kou_model(KOU_JUMP)?),
            ("kou diffusion", kou_model(KOU_DIFFUSION)?),
            ("nig jump", nig_model(NIG_JUMP)?),
            ("nig diffusion", nig_model(NIG_DIFFUSION)?),
        ];
        let (low, high) = residual_grid();
        for (label, m) in &variants {
            for wing in [Wing::Large, Wing::Small] {
                let e = smile_expansion(m, wing)?;
                let a = max_of(&expansion_residuals(&e, &low)?.iter().map(|v| v.abs()).collect::<Vec<_>>());
                let b = max_of(&expansion_residuals(&e, &high)?.iter().map(|v| v.abs()).collect::<Vec<_>>());
                let stable = a.is_finite() && b.is_finite() && rel_diff(a, b) < 0.5;
                let mut exact_worst: f64 = 0.0;
                for &l in &EXACT_PRICE_LS {
                    let iv = exact_implied_vol(m, &e, l, settings.oracle_rel)?;
                    exact_worst = exact_worst.max(rel_diff(iv, e.at(l)) * iv.max(e.at(l)) / iv);
                }
                ok &= stable && exact_worst <= 0.10;
                let _ = write!(
                    detail,
                    "{label} {wing:?}: max|res·L| {a:.4}/{b:.4}, exact-price iv rel {exact_worst:.3}; "
                );
            }
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })();
    finish(9, "implied-vol expansion", 120.0, start, outcome)
}

/// Black–Scholes price/implied-vol round trip.
pub fn criterion_10() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let sigmas = [0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0];
        let ks: Vec<f64> = (0..16).map(|i| 0.5 + 0.1 * i as f64).collect();
        let mut worst: f64 = 0.0;
        for &s in &sigmas {
            for &k in &ks {
                // Out-of-the-money side: calls above the forward, puts below.
                let v = if k >= 1.0 {
                    bs_implied_vol(bs_call(1.0, k, 1.0, s), 1.0, k, 1.0)?
                } else {
                    bs_implied_vol_put(bs_put(1.0, k, 1.0, s), 1.0, k, 1.0)?
                };
                worst = worst.max((v - s).abs());
            }
        }
        Ok((
            worst <= 1e-10,
            format!("{} points, worst |Δσ| {worst:.1e}", sigmas.len() * ks.len()),
        ))
    })();
    finish(10, "Black–Scholes round trip", 1.0, start, outcome)
}

/// Boundary configurations must produce structured errors.
pub fn criterion_11() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let h = crate::heston::HestonModel::new(HestonParams::REFERENCE)?;
        let k = h.constants;
        let mut ok = true;
        let mut seen = Vec::new();
        let cases: [(&str, Result<MixedModel>); 3] = [
            ("A3 = 1 + η1", MixedModel::kou(HestonParams::REFERENCE, kou_params(0.5, k.A3 - 1.0, 3.0))),
            ("Ã3 = η2 - 1", MixedModel::kou(HestonParams::REFERENCE, kou_params(0.5, 4.0, k.A3t + 1.0))),
            (
                "A3 = α + 1",
                MixedModel::nig(HestonParams::REFERENCE, NigParams { alpha: k.A3 - 1.0, ..NIG_JUMP }),
            ),
        ];
        for (label, model) in cases {
            let m = model?;
            let wing = if label.starts_with('Ã') { Wing::Small } else { Wing::Large };
            let results = [
                m.classify_wing(wing).map(|_| ()),
                match wing {
                    Wing::Large => m.tail_asymptote().map(|_| ()),
                    Wing::Small => m.zero_asymptote().map(|_| ()),
                },
                m.with_martingale_drift().and_then(|d| smile_expansion(&d, wing)).map(|_| ()),
            ];
            let all = results.iter().all(|r| matches!(r, Err(Error::Degenerate { .. })));
            ok &= all;
            seen.push(format!("{label}: {}", if all { "degenerate error" } else { "NOT rejected" }));
        }
        Ok((ok, seen.join("; ")))
    })();
    finish(11, "degeneracy handling", 5.0, start, outcome)
}

/// Total mass of the jump law, the NIG density and the mixed density.
pub fn criterion_12() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let tol = Tolerance::rel(1e-12);
        let k = KouJumps::with_reach(kou_params(KOU_JUMP.0, KOU_JUMP.1, KOU_JUMP.2), 400.0, tol)?;
        // in y = log x the mass of H is ∫ H(e^y) e^y dy
        let h_mass = integrate_pieces(
            |y: f64| k.h_density(y.exp()).unwrap_or(f64::NAN) * y.exp(),
            &[-300.0, 0.0, 300.0],
            &tol,
        )?;
        let kou_err = (k.atom_mass() + h_mass - 1.0).abs();
        let nig = NIG_JUMP;
        let nig_mass = integrate(
            |y: f64| nig.log_density(y).map(|d| d.value).unwrap_or(f64::NAN),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &tol,
        )?;
        let nig_err = (nig_mass - 1.0).abs();
        let m = kou_model(KOU_JUMP)?;
        let inner = Tolerance::rel(1e-7);
        let mixed_mass = integrate_pieces(
            |y: f64| m.density(y.exp(), &inner).unwrap_or(f64::NAN) * y.exp(),
            &[-15.0, -2.0, 0.0, 2.0, 15.0],
            &Tolerance::rel(1e-7),
        )?;
        let mixed_err = (mixed_mass - 1.0).abs();
        Ok((
            kou_err <= 1e-8 && nig_err <= 1e-8 && mixed_err <= 1e-6,
            format!("atom+∫H-1 = {kou_err:.1e}, ∫NIG-1 = {nig_err:.1e}, ∫mixed-1 = {mixed_err:.1e}"),
        ))
    })();
    finish(12, "normalizations", 30.0, start, outcome)
}

/// All twelve criteria in order.
pub fn run_all(settings: &ValidationSettings) -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(settings),
        criterion_7(settings),
        criterion_8(settings),
        criterion_9(settings),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ]
}

/// Runs one criterion by number.
pub fn run_one(id: u8, settings: &ValidationSettings) -> Result<CriterionReport> {
    Ok(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(settings),
        7 => criterion_7(settings),
        8 => criterion_8(settings),
        9 => criterion_9(settings),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => return Err(Error::Config(format!("no criterion {id}; valid ids are 1 to 12"))),
    })
}
