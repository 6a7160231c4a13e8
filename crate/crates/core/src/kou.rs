//! Double-exponential compound-Poisson jumps.
//!
//! The log-jump sum `T_t = Σ U_i` has an atom `e^(-λt)` at zero and density
//! `G1(t,y) e^(-η1 y)` for `y > 0`, `G2(t,y) e^(η2 y)` for `y < 0`. The price
//! factor `e^(T_t)` therefore has an atom at 1 and density
//! `H(t,x) = H1(t,x) x^(-η1-1)` above 1, `H2(t,x) x^(η2-1)` below.
//!
//! Coefficients are handled in log-space throughout; `ln_a[k]` is `ln a_k`.
//! `B1_jump = η1λtp` and `B2_jump = η2λtq` are named to keep them apart
//! from the Heston constant `B1`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{ErrorOrder, MellinSource, MellinStrip, Side, TailAsymptote};
use crate::numerics::special::{log_gamma, LnFactorials};
use crate::numerics::{integrate_pieces, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KouJumpParams {
    pub lambda: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl KouJumpParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            ("lambda", self.lambda, self.lambda > 0.0 && self.lambda.is_finite(), "lambda > 0"),
            (
                "eta1",
                self.eta1,
                self.eta1 > 1.0 && self.eta1.is_finite(),
                "eta1 > 1 (finite expectation of the jump factor)",
            ),
            ("eta2", self.eta2, self.eta2 > 0.0 && self.eta2.is_finite(), "eta2 > 0"),
            ("p", self.p, self.p > 0.0 && self.p < 1.0, "0 < p < 1"),
            ("q", self.q, self.q > 0.0 && self.q < 1.0, "0 < q < 1"),
            ("t", self.t, self.t > 0.0 && self.t.is_finite(), "t > 0"),
        ];
        for (name, value, ok, constraint) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, value, constraint });
            }
        }
        if (self.p + self.q - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "p + q",
                value: self.p + self.q,
                constraint: "p + q = 1",
            });
        }
        Ok(())
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda * self.t
    }

    /// `η1 λ t p`
    pub fn b1_jump(&self) -> f64 {
        self.eta1 * self.lambda_t() * self.p
    }

    /// `η2 λ t q`
    pub fn b2_jump(&self) -> f64 {
        self.eta2 * self.lambda_t() * self.q
    }

    /// `exp{η2λtq/(η1+η2) - λt}`
    pub fn e1(&self) -> f64 {
        (self.b2_jump() / (self.eta1 + self.eta2) - self.lambda_t()).exp()
    }

    /// `exp{η1λtp/(η1+η2) - λt}`
    pub fn e2(&self) -> f64 {
        (self.b1_jump() / (self.eta1 + self.eta2) - self.lambda_t()).exp()
    }

    /// `C1_jump = B1_jump·E1/(2π)`
    pub fn c1_jump(&self) -> f64 {
        self.b1_jump() * self.e1() / (2.0 * PI)
    }

    /// `C2_jump = B2_jump·E2/(2π)`
    pub fn c2_jump(&self) -> f64 {
        self.b2_jump() * self.e2() / (2.0 * PI)
    }

    /// Parameters of the mirrored law (`U ↦ -U`).
    pub fn mirrored(&self) -> Self {
        Self {
            eta1: self.eta2,
            eta2: self.eta1,
            p: self.q,
            q: self.p,
            ..*self
        }
    }

    /// Drift that makes `x0·exp(μt + ∫√Y dW - ½∫Y + T_t)` a martingale.
    pub fn risk_neutral_drift(&self) -> Result<f64> {
        if !(self.eta1 > 1.0) {
            return Err(Error::domain(
                "risk_neutral_drift",
                format!("eta1 = {} must exceed 1", self.eta1),
            ));
        }
        Ok(self.lambda * (self.q / (self.eta2 + 1.0) - self.p / (self.eta1 - 1.0)))
    }

    /// Probability weight of the two-sided mixture: `Σ_i C(n-k-1,i-k) C(n,i) ...`.
    fn ln_weight(&self, lf: &LnFactorials, n: usize, k: usize, upward: bool) -> f64 {
        let (p_same, p_other, w_same, w_other) = if upward {
            (self.p, self.q, self.eta1, self.eta2)
        } else {
            (self.q, self.p, self.eta2, self.eta1)
        };
        if k == n {
            return n as f64 * p_same.ln();
        }
        let total = self.eta1 + self.eta2;
        let (lw_same, lw_other) = ((w_same / total).ln(), (w_other / total).ln());
        let (lp_same, lp_other) = (p_same.ln(), p_other.ln());
        let mut terms = Vec::with_capacity(n - k);
        for i in k..n {
            terms.push(
                lf.ln_binomial(n - k - 1, i - k)
                    + lf.ln_binomial(n, i)
                    + (i - k) as f64 * lw_same
                    + (n - i) as f64 * lw_other
                    + i as f64 * lp_same
                    + (n - i) as f64 * lp_other,
            );
        }
        log_sum_exp(&terms)
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn check_pair(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::domain("pnk", format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// `P_{n,k}`: weight of `k` net upward exponentials after `n` jumps.
pub fn pnk(n: usize, k: usize, params: &KouJumpParams) -> Result<f64> {
    check_pair(n, k)?;
    let lf = LnFactorials::new(n + 1);
    Ok(params.ln_weight(&lf, n, k, true).exp())
}

/// `Q_{n,k}`, the downward counterpart of [`pnk`].
pub fn qnk(n: usize, k: usize, params: &KouJumpParams) -> Result<f64> {
    check_pair(n, k)?;
    let lf = LnFactorials::new(n + 1);
    Ok(params.ln_weight(&lf, n, k, false).exp())
}

/// `c_{n,α} = Γ(n+1)/Γ(n-α+1)`, the Riemann–Liouville coefficient.
pub fn rl_coefficient(n: usize, alpha: f64) -> Result<f64> {
    let n = n as f64;
    Ok((log_gamma(n + 1.0)? - log_gamma(n - alpha + 1.0)?).exp())
}

/// Coefficient sequences of `G1`, `G2` and their closed-form approximations,
/// all stored as natural logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub ln_a: Vec<f64>,
    pub ln_b: Vec<f64>,
    pub ln_a_hat: Vec<f64>,
    pub ln_b_hat: Vec<f64>,
    pub ln_d: Vec<f64>,
    pub ln_l: Vec<f64>,
    pub truncation_k: usize,
    /// Largest relative geometric bound on the discarded n-series tail.
    pub tail_bound: f64,
}

impl CoefficientTable {
    pub fn a(&self, k: usize) -> f64 {
        self.ln_a[k].exp()
    }
    pub fn b(&self, k: usize) -> f64 {
        self.ln_b[k].exp()
    }
    pub fn a_hat(&self, k: usize) -> f64 {
        self.ln_a_hat[k].exp()
    }
    pub fn b_hat(&self, k: usize) -> f64 {
        self.ln_b_hat[k].exp()
    }
    pub fn d(&self, k: usize) -> f64 {
        self.ln_d[k].exp()
    }
    pub fn l(&self, k: usize) -> f64 {
        self.ln_l[k].exp()
    }

    /// `(a_k - â_k)/â_k`, computed without forming the tiny absolute values.
    pub fn a_excess(&self, k: usize) -> f64 {
        (self.ln_a[k] - self.ln_a_hat[k]).exp_m1()
    }
    pub fn b_excess(&self, k: usize) -> f64 {
        (self.ln_b[k] - self.ln_b_hat[k]).exp_m1()
    }
    /// `(a_k - d_k)/d_k`
    pub fn a_vs_d(&self, k: usize) -> f64 {
        (self.ln_a[k] - self.ln_d[k]).exp_m1()
    }
    /// `(b_k - l_k)/l_k`
    pub fn b_vs_l(&self, k: usize) -> f64 {
        (self.ln_b[k] - self.ln_l[k]).exp_m1()
    }
}

const MAX_SERIES_TERMS: usize = 5000;

/// `ln( η^{k+1}/k! Σ_{n≥k+1} π_n W_{n,k+1} )` with the truncation rule: stop
/// once a term falls below `rel` of the partial sum after three decreasing
/// terms in a row. Returns the value and the relative tail bound.
fn ln_series_coefficient(
    params: &KouJumpParams,
    lf: &LnFactorials,
    k: usize,
    upward: bool,
    rel: f64,
) -> Result<(f64, f64)> {
    let lt = params.lambda_t();
    let eta = if upward { params.eta1 } else { params.eta2 };
    let ln_pi = |n: usize| -lt + n as f64 * lt.ln() - lf.get(n);
    let mut terms: Vec<f64> = Vec::new();
    let mut ln_sum = f64::NEG_INFINITY;
    let mut decreasing = 0;
    let mut prev = f64::NEG_INFINITY;
    for n in (k + 1)..(k + 1 + MAX_SERIES_TERMS) {
        let term = ln_pi(n) + params.ln_weight(lf, n, k + 1, upward);
        ln_sum = log_add(ln_sum, term);
        terms.push(term);
        if term < prev {
            decreasing += 1;
        } else {
            decreasing = 0;
        }
        if decreasing >= 3 && term - ln_sum < rel.ln() {
            let ratio = (term - prev).exp();
            let tail = if ratio < 1.0 {
                (term - ln_sum).exp() * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            let ln_coef = (k + 1) as f64 * eta.ln() - lf.get(k) + ln_sum;
            return Ok((ln_coef, tail));
        }
        prev = term;
    }
    Err(Error::Convergence {
        what: "jump coefficient series",
        estimate: ln_sum,
        error: f64::INFINITY,
    })
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Builds the coefficient table for `k = 0..=k_max`.
pub fn coefficients(params: &KouJumpParams, k_max: usize, tol: &Tolerance) -> Result<CoefficientTable> {
    params.validate()?;
    let lf = LnFactorials::new(k_max + MAX_SERIES_TERMS + 2);
    let mut table = CoefficientTable {
        ln_a: Vec::with_capacity(k_max + 1),
        ln_b: Vec::with_capacity(k_max + 1),
        ln_a_hat: Vec::with_capacity(k_max + 1),
        ln_b_hat: Vec::with_capacity(k_max + 1),
        ln_d: Vec::with_capacity(k_max + 1),
        ln_l: Vec::with_capacity(k_max + 1),
        truncation_k: k_max,
        tail_bound: 0.0,
    };
    let (b1, b2) = (params.b1_jump(), params.b2_jump());
    let (ln_e1, ln_e2) = (params.e1().ln(), params.e2().ln());
    let (ln_c1, ln_c2) = (params.c1_jump().ln(), params.c2_jump().ln());
    for k in 0..=k_max {
        let (la, ta) = ln_series_coefficient(params, &lf, k, true, tol.rel)?;
        let (lb, tb) = ln_series_coefficient(params, &lf, k, false, tol.rel)?;
        table.ln_a.push(la);
        table.ln_b.push(lb);
        table.tail_bound = table.tail_bound.max(ta).max(tb);
        let kf = k as f64;
        let denom = lf.get(k) + lf.get(k + 1);
        table.ln_a_hat.push(ln_e1 + (kf + 1.0) * b1.ln() - denom);
        table.ln_b_hat.push(ln_e2 + (kf + 1.0) * b2.ln() - denom);
        let stirling = |ln_c: f64, b: f64| {
            if k == 0 {
                ln_c
            } else {
                ln_c + kf * b.ln() + 2.0 * kf - (2.0 * kf + 2.0) * kf.ln()
            }
        };
        table.ln_d.push(stirling(ln_c1, b1));
        table.ln_l.push(stirling(ln_c2, b2));
    }
    Ok(table)
}

/// `u^α D^α λ_{s,r}(u)` for `λ_{s,r}(u) = s·cosh(r√u)` and `α < 0`, i.e.
/// `s/Γ(-α) ∫₀¹ cosh(r√(yu)) (1-y)^(-α-1) dy`, returned as a logarithm.
pub fn ln_frac_integral(order: f64, s: f64, r: f64, u: f64) -> Result<f64> {
    if !(order < 0.0) {
        return Err(Error::domain("frac_integral", format!("order {order} must be negative")));
    }
    if !(s > 0.0 && r > 0.0 && u > 0.0) {
        return Err(Error::domain("frac_integral", format!("need s, r, u > 0 (s={s}, r={r}, u={u})")));
    }
    let nu = -order;
    let big_r = r * u.sqrt();
    let tol = Tolerance::rel(1e-13);
    // y = z²: ∫₀¹ (e^{Rz} + e^{-Rz}) z (1-z²)^{ν-1} dz, the first factor scaled by e^{-R}
    let kernel = |z: f64| z * (1.0 - z * z).max(0.0).powf(nu - 1.0);
    let split = |z: f64| if z > 1e-3 && z < 1.0 - 1e-3 { vec![0.0, z, 1.0] } else { vec![0.0, 1.0] };
    let rising = integrate_pieces(|z| (big_r * (z - 1.0)).exp() * kernel(z), &split(1.0 - 20.0 / big_r), &tol)?;
    let falling = integrate_pieces(|z| (-big_r * z).exp() * kernel(z), &split(20.0 / big_r), &tol)?;
    let inner = rising + (-big_r).exp() * falling;
    Ok(s.ln() - log_gamma(nu)? + big_r + inner.ln())
}

pub fn frac_integral(order: f64, s: f64, r: f64, u: f64) -> Result<f64> {
    ln_frac_integral(order, s, r, u).map(f64::exp)
}

/// Default regime guard for the `H1`/`H2` asymptotes: `|log x| ≥ 4`.
pub const JUMP_TAIL_GUARD: f64 = 4.0;

/// Double-exponential jump component with its coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KouJumps {
    pub params: KouJumpParams,
    pub table: CoefficientTable,
    pub tol: Tolerance,
    pub guard: f64,
}

impl KouJumps {
    pub fn new(params: KouJumpParams, k_max: usize, tol: Tolerance) -> Result<Self> {
        let table = coefficients(&params, k_max, &tol)?;
        Ok(Self {
            params,
            table,
            tol,
            guard: JUMP_TAIL_GUARD,
        })
    }

    /// A table long enough to evaluate `G1`, `G2` on `[0, u_max]`.
    pub fn with_reach(params: KouJumpParams, u_max: f64, tol: Tolerance) -> Result<Self> {
        params.validate()?;
        let b = params.b1_jump().max(params.b2_jump());
        let peak = (b * u_max.max(1.0)).sqrt();
        let k_max = (peak + 10.0 * peak.sqrt() + 40.0).ceil() as usize;
        Self::new(params, k_max, tol)
    }

    fn ln_power_series(&self, ln_coef: &[f64], u: f64, what: &'static str) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::domain(what, format!("u = {u} must be nonnegative")));
        }
        if u == 0.0 {
            return Ok(ln_coef[0]);
        }
        let lu = u.ln();
        let terms: Vec<f64> = ln_coef.iter().enumerate().map(|(k, c)| c + k as f64 * lu).collect();
        let total = log_sum_exp(&terms);
        let n = terms.len();
        let last = terms[n - 1];
        let falling = n >= 2 && last < terms[n - 2];
        if !(falling && last - total < self.tol.rel.ln()) {
            return Err(Error::Convergence {
                what,
                estimate: total.exp(),
                error: (last - total).exp(),
            });
        }
        Ok(total)
    }

    /// `ln G1(t,u)`
    pub fn ln_g1(&self, u: f64) -> Result<f64> {
        self.ln_power_series(&self.table.ln_a, u, "G1 series")
    }

    /// `ln G2(t,-u)`, `u ≥ 0`.
    pub fn ln_g2(&self, u: f64) -> Result<f64> {
        self.ln_power_series(&self.table.ln_b, u, "G2 series")
    }

    pub fn g1(&self, u: f64) -> Result<f64> {
        self.ln_g1(u).map(f64::exp)
    }

    pub fn g2(&self, u: f64) -> Result<f64> {
        self.ln_g2(u).map(f64::exp)
    }

    /// `G1'(t,u)/G1(t,u)`, by term-wise differentiation.
    pub fn g1_log_derivative(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::domain("g1_log_derivative", format!("u = {u} must be positive")));
        }
        let lu = u.ln();
        let terms: Vec<f64> = self
            .table
            .ln_a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c + (k as f64).ln() + (k as f64 - 1.0) * lu)
            .collect();
        Ok((log_sum_exp(&terms) - self.ln_g1(u)?).exp())
    }

    /// Continuous part of the law of `T_t` at `y ≠ 0`.
    pub fn log_jump_density(&self, y: f64) -> Result<f64> {
        if y > 0.0 {
            Ok((self.ln_g1(y)? - self.params.eta1 * y).exp())
        } else if y < 0.0 {
            Ok((self.ln_g2(-y)? + self.params.eta2 * y).exp())
        } else {
            self.g1(0.0)
        }
    }

    /// `H(t,x)`, the absolutely continuous part of the law of `e^(T_t)`.
    /// At `x = 1` the right limit `a0` is returned.
    pub fn h_density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("h_density", format!("x = {x} must be positive")));
        }
        let y = x.ln();
        if y >= 0.0 {
            Ok((self.ln_g1(y)? - (self.params.eta1 + 1.0) * y).exp())
        } else {
            Ok((self.ln_g2(-y)? + (self.params.eta2 - 1.0) * y).exp())
        }
    }

    /// `H1(t,x) = G1(t, log x)` for `x > 1`.
    pub fn h1(&self, x: f64) -> Result<f64> {
        if !(x > 1.0) {
            return Err(Error::domain("h1", format!("x = {x} must exceed 1")));
        }
        self.g1(x.ln())
    }

    /// `H2(t,x) = G2(t, log x)` for `0 < x < 1`.
    pub fn h2(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain("h2", format!("x = {x} must lie in (0, 1)")));
        }
        self.g2(-x.ln())
    }

    /// `H(t,x) ~ (1/2√π) B1^{1/4} E1 (log x)^{-3/4} e^{2√(B1 log x)} x^{-η1-1}`.
    pub fn jump_tail_asymptote(&self) -> TailAsymptote {
        let p = &self.params;
        let b = p.b1_jump();
        TailAsymptote {
            r1: b.powf(0.25) * p.e1() / (2.0 * PI.sqrt()),
            r2: 2.0 * b.sqrt(),
            r3: p.eta1 + 1.0,
            r4: -0.75,
            side: Side::AtInfinity,
            error_order: ErrorOrder::InvSqrtLog,
        }
    }

    /// `H(t,x) ~ (1/2√π) B2^{1/4} E2 (log 1/x)^{-3/4} e^{2√(B2 log 1/x)} x^{η2-1}`.
    pub fn jump_zero_asymptote(&self) -> TailAsymptote {
        let p = &self.params;
        let b = p.b2_jump();
        TailAsymptote {
            r1: b.powf(0.25) * p.e2() / (2.0 * PI.sqrt()),
            r2: 2.0 * b.sqrt(),
            r3: p.eta2 - 1.0,
            r4: -0.75,
            side: Side::AtZero,
            error_order: ErrorOrder::InvSqrtLog,
        }
    }

    /// Leading term of `H1(t,x)`; requires `log x ≥ guard`.
    pub fn h1_asymptote(&self, x: f64) -> Result<f64> {
        if !(x.ln() >= self.guard) {
            return Err(Error::regime(format!("h1_asymptote needs log x >= {}, got x = {x}", self.guard)));
        }
        self.jump_tail_asymptote().slowly_varying(x)
    }

    /// Leading term of `H2(t,x)`; requires `log(1/x) ≥ guard`.
    pub fn h2_asymptote(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && -x.ln() >= self.guard) {
            return Err(Error::regime(format!(
                "h2_asymptote needs log(1/x) >= {}, got x = {x}",
                self.guard
            )));
        }
        self.jump_zero_asymptote().slowly_varying(x)
    }

    /// `s = 2√π C1_jump`, `r = 2√B1_jump`: the cosh comparison function of `G1`.
    pub fn comparison_sr(&self) -> (f64, f64) {
        let p = &self.params;
        (2.0 * PI.sqrt() * p.c1_jump(), 2.0 * p.b1_jump().sqrt())
    }

    pub fn jump_mgf(&self, s: f64) -> Result<f64> {
        jump_mgf(&self.params, s)
    }

    pub fn atom_mass(&self) -> f64 {
        (-self.params.lambda_t()).exp()
    }

    pub fn sample_log_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_log_jump(&self.params, rng)
    }
}

/// `E[e^{s T_t}] = exp{λt(pη1/(η1-s) + qη2/(η2+s) - 1)}` for `-η2 < s < η1`.
pub fn jump_mgf(params: &KouJumpParams, s: f64) -> Result<f64> {
    ln_jump_mgf(params, s).map(f64::exp)
}

pub fn ln_jump_mgf(params: &KouJumpParams, s: f64) -> Result<f64> {
    let p = params;
    if !(s > -p.eta2 && s < p.eta1) {
        return Err(Error::MomentExplosion {
            order: s,
            detail: format!("jump moments exist only on (-{}, {})", p.eta2, p.eta1),
        });
    }
    Ok(p.lambda_t() * (p.p * p.eta1 / (p.eta1 - s) + p.q * p.eta2 / (p.eta2 + s) - 1.0))
}

/// One draw of `T_t = Σ_{i ≤ N_t} U_i`.
pub fn sample_log_jump<R: Rng + ?Sized>(params: &KouJumpParams, rng: &mut R) -> f64 {
    let lt = params.lambda_t();
    let n = Poisson::new(lt).map(|d| d.sample(rng) as u64).unwrap_or(0);
    let up = Exp::new(params.eta1).expect("eta1 > 0");
    let down = Exp::new(params.eta2).expect("eta2 > 0");
    let mut total = 0.0;
    for _ in 0..n {
        if rng.random::<f64>() < params.p {
            total += up.sample(rng);
        } else {
            total -= down.sample(rng);
        }
    }
    total
}

/// One draw of the price factor `e^(T_t)`.
pub fn sample_jump_factor<R: Rng + ?Sized>(params: &KouJumpParams, rng: &mut R) -> f64 {
    sample_log_jump(params, rng).exp()
}

/// The full jump law (atom plus `H`) as a Mellin source on `(-η1-1, η2-1)`.
impl MellinSource for KouJumps {
    fn strip(&self) -> MellinStrip {
        MellinStrip {
            sigma: -self.params.eta1 - 1.0,
            tau: self.params.eta2 - 1.0,
        }
    }

    fn mellin(&self, z: f64) -> Result<f64> {
        self.jump_mgf(-z - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    const P: KouJumpParams = KouJumpParams {
        lambda: 1.0,
        eta1: 2.0,
        eta2: 1.0,
        p: 0.5,
        q: 0.5,
        t: 1.0,
    };

    #[test]
    fn validation() {
        assert!(P.validate().is_ok());
        assert!(KouJumpParams { eta1: 1.0, ..P }.validate().is_err());
        assert!(KouJumpParams { p: 0.6, ..P }.validate().is_err());
    }

    #[test]
    fn boundary_weights() {
        assert!((pnk(1, 1, &P).unwrap() - 0.5).abs() < 1e-15);
        assert!((pnk(5, 5, &P).unwrap() - 0.5f64.powi(5)).abs() < 1e-15);
        assert!((qnk(4, 4, &P).unwrap() - 0.5f64.powi(4)).abs() < 1e-15);
        assert!((pnk(2, 1, &P).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(pnk(2, 3, &P).is_err());
        assert!(pnk(2, 0, &P).is_err());
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..12 {
            let total: f64 = (1..=n)
                .map(|k| pnk(n, k, &P).unwrap() + qnk(n, k, &P).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn closed_forms_at_k0() {
        let t = coefficients(&P, 10, &Tolerance::rel(1e-15)).unwrap();
        let want = P.e1() * P.b1_jump();
        assert!((t.a_hat(0) / want - 1.0).abs() < 1e-14);
        assert!(t.a(0) > t.a_hat(0));
        assert!((t.d(0) / P.c1_jump() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn downward_coefficients_vanish_with_q() {
        let p = KouJumpParams { p: 1.0 - 1e-10, q: 1e-10, ..P };
        let t = coefficients(&p, 8, &Tolerance::rel(1e-14)).unwrap();
        assert!((0..=8).all(|k| t.b(k) < 1e-9));
    }

    #[test]
    fn normalization_of_the_law() {
        let j = KouJumps::with_reach(P, 60.0, Tolerance::rel(1e-15)).unwrap();
        let tol = Tolerance::rel(1e-12);
        let up = integrate(|y| j.log_jump_density(y).unwrap(), 0.0, 60.0, &tol).unwrap();
        let down = integrate(|y| j.log_jump_density(-y).unwrap(), 0.0, 60.0, &tol).unwrap();
        assert!((up + down + j.atom_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jump_mgf_identities() {
        assert!((jump_mgf(&P, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let mu = P.risk_neutral_drift().unwrap();
        assert!((mu + 0.25).abs() < 1e-15);
        assert!(((mu * P.t).exp() * jump_mgf(&P, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(jump_mgf(&P, 2.0).is_err());
        assert!(jump_mgf(&P, -1.0).is_err());
    }

    #[test]
    fn frac_integral_limits() {
        // u → 0: integrand → s(1-y)^{1/2}
        let v = frac_integral(-1.5, 2.0, 1.0, 1e-10).unwrap();
        let g = log_gamma(1.5).unwrap().exp();
        assert!((v - 2.0 / g * (2.0 / 3.0)).abs() < 1e-8);
        // large u: e^{R} √2 Γ(3/2) R^{-3/2} leading behaviour
        let (s, r, u): (f64, f64, f64) = (1.0, 2.0, 1e4);
        let lead = (s / g) * (r * u.sqrt()).exp() * 2f64.sqrt() * g * r.powf(-1.5) * u.powf(-0.75);
        let v = frac_integral(-1.5, s, r, u).unwrap();
        assert!((v / lead - 1.0).abs() < 0.05);
        assert!(frac_integral(0.5, s, r, u).is_err());
    }
}
