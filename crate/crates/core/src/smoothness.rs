//! Tight price-of-anarchy and price-of-stability bounds for affine costs under
//! homogeneous participation probability `p`, and the (λ, μ)-smoothness
//! machinery behind them.
//!
//! For affine costs the smoothness condition of the class reduces to the
//! integer family
//!
//! ```text
//! k (1 + m p) <= λ k (1 - p + p k) + μ m (1 - p + p m)    for k >= 1, m >= 0,
//! ```
//!
//! and with `y = μ / (1 - μ)` the best ratio `λ / (1 - μ)` is the minimum over
//! `y > 0` of `ψ_p(y) = sup_{k,m} ψ^{k,m}_p(y)`, an upper envelope of affine
//! functions of `y`. The minimizer sits at one of three closed-form points
//! depending on which of three regimes `p` falls in, separated by `1/4` and
//! by the real root of `8p³ + 4p² = 1`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary between the low and middle regimes.
pub const P_BAR0: f64 = 0.25;

/// Default truncation of the sup over `k` in [`psi_sup`].
pub const DEFAULT_K_MAX: usize = 10_000;

/// Golden-section cross-check window for [`minimize_psi`].
pub const GOLDEN_WINDOW: (f64, f64) = (1e-4, 10.0);

/// How far another point may beat the regime's closed-form minimizer before
/// [`minimize_psi`] reports a failure.
pub const CANDIDATE_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `0 < p <= 1/4`
    Low,
    /// `1/4 < p <= p̄₁`
    Mid,
    /// `p̄₁ < p <= 1`
    High,
}

impl Regime {
    pub fn of(p: f64) -> Regime {
        if p <= P_BAR0 {
            Regime::Low
        } else if p <= p_bar1() {
            Regime::Mid
        } else {
            Regime::High
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::Mid => "mid",
            Regime::High => "high",
        }
    }
}

/// Root of `f` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in
/// sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidParameter(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The real root of `8p³ + 4p² = 1` (≈ 0.3774), boundary between the middle
/// and high regimes.
pub fn p_bar1() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        bisect(|p| 8.0 * p * p * p + 4.0 * p * p - 1.0, 0.3, 0.4, 1e-12).expect("8p³+4p²-1 changes sign on [0.3, 0.4]")
    })
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("participation probability p = {p} must lie in (0, 1]")))
    }
}

fn root_term(p: f64) -> f64 {
    (p * (2.0 + p)).sqrt()
}

/// `ψ^{k,m}_p(y)`: the bound on `λ/(1-μ)` forced by the pair `(k, m)`.
pub fn psi_km(p: f64, y: f64, k: usize, m: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("psi_km needs k >= 1".into()));
    }
    Ok(psi_km_unchecked(p, y, k as f64, m as f64))
}

fn psi_km_unchecked(p: f64, y: f64, k: f64, m: f64) -> f64 {
    let opt_k = 1.0 - p + p * k;
    let slope = (k * (1.0 + p * m) - m * (1.0 - p + p * m)) / (k * opt_k);
    y * slope + (1.0 + p * m) / opt_k
}

/// `(y + 1)² / (4y)`, the `k → ∞` limit of `sup_m ψ^{k,m}_p(y)`, independent
/// of `p`.
pub fn psi_infty(y: f64) -> Result<f64> {
    if y.is_nan() || y <= 0.0 {
        return Err(Error::InvalidParameter(format!("psi_infty needs y > 0, got {y}")));
    }
    Ok((y + 1.0) * (y + 1.0) / (4.0 * y))
}

/// Best `m` for fixed `k` and its value. `ψ^{k,m}` is a concave quadratic in
/// `m`, so the integer maximizer is a neighbour of the real one (clamped to 0).
fn best_m(p: f64, y: f64, k: usize) -> (usize, f64) {
    let kf = k as f64;
    let m_hat = (((y + 1.0) * p * kf - y * (1.0 - p)) / (2.0 * y * p)).max(0.0);
    let lo = m_hat.floor() as usize;
    [lo, lo + 1, 0]
        .into_iter()
        .map(|m| (m, psi_km_unchecked(p, y, kf, m as f64)))
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// `ψ_p(y)`: sup over `1 <= k <= k_max` with the inner sup over `m` solved in
/// closed form, combined with the `k → ∞` envelope `ψ∞(y)`.
pub fn psi_sup(p: f64, y: f64, k_max: usize) -> Result<f64> {
    check_p(p)?;
    let tail = psi_infty(y)?;
    if k_max == 0 {
        return Err(Error::InvalidParameter("psi_sup needs k_max >= 1".into()));
    }
    Ok((1..=k_max).map(|k| best_m(p, y, k).1).fold(tail, f64::max))
}

/// The three closed-form candidate minimizers `(y₀, y₁, y₂)` of `ψ_p`.
pub fn candidate_minimizers(p: f64) -> (f64, f64, f64) {
    let y0 = 1.0 / 3.0;
    let y1 = 1.0 / (1.0 + 2.0 * p + 2.0 * root_term(p));
    let y2 = p / (1.0 + p);
    (y0, y1, y2)
}

/// The closed-form minimizer of `ψ_p` for the regime `p` falls in.
pub fn closed_form_minimizer(p: f64) -> f64 {
    let (y0, y1, y2) = candidate_minimizers(p);
    match Regime::of(p) {
        Regime::Low => y0,
        Regime::Mid => y1,
        Regime::High => y2,
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiMinimum {
    pub p: f64,
    pub regime: Regime,
    /// Closed-form minimizer for the regime.
    pub y_min: f64,
    /// `ψ_p(y_min)`.
    pub value: f64,
    /// Independent golden-section estimate on [`GOLDEN_WINDOW`].
    pub golden_y: f64,
    pub golden_value: f64,
}

/// Minimizes `ψ_p` over `y > 0`.
///
/// `ψ_p` is evaluated at all three closed-form candidates and at a
/// golden-section minimizer. The regime's candidate is returned; if any other
/// point beats it by more than [`CANDIDATE_SLACK`] an error is returned.
pub fn minimize_psi(p: f64, k_max: usize) -> Result<PsiMinimum> {
    check_p(p)?;
    let psi = |y: f64| psi_sup(p, y, k_max);
    let (y0, y1, y2) = candidate_minimizers(p);
    let regime = Regime::of(p);
    let y_min = closed_form_minimizer(p);
    let value = psi(y_min)?;
    for y in [y0, y1, y2] {
        let other = psi(y)?;
        if other < value - CANDIDATE_SLACK {
            return Err(Error::Internal(format!(
                "p = {p}: candidate y = {y} gives ψ = {other}, below the {} regime value {value}",
                regime.name()
            )));
        }
    }
    let (golden_y, golden_value) =
        golden_section(|y| psi_sup(p, y, k_max).unwrap_or(f64::INFINITY), GOLDEN_WINDOW.0, GOLDEN_WINDOW.1, 1e-10);
    if golden_value < value - CANDIDATE_SLACK {
        return Err(Error::Internal(format!(
            "p = {p}: golden-section minimum {golden_value} at y = {golden_y} beats the closed form {value}"
        )));
    }
    Ok(PsiMinimum { p, regime, y_min, value, golden_y, golden_value })
}

/// Tight price of anarchy for affine costs at participation probability `p`.
/// `p = 0` gives 1.
pub fn poa_bound(p: f64) -> Result<f64> {
    if p == 0.0 {
        return Ok(1.0);
    }
    check_p(p)?;
    Ok(match Regime::of(p) {
        Regime::Low => 4.0 / 3.0,
        Regime::Mid => {
            let s = root_term(p);
            (1.0 + p + s) / (1.0 - p + s)
        }
        Regime::High => 1.0 + p + p * p / (1.0 + p),
    })
}

/// Tight price of stability for affine costs at participation probability
/// `p`. `p = 0` gives 1.
pub fn pos_bound(p: f64) -> Result<f64> {
    if p == 0.0 {
        return Ok(1.0);
    }
    check_p(p)?;
    Ok(if p <= P_BAR0 { 4.0 / 3.0 } else { 1.0 + (p / (2.0 + p)).sqrt() })
}

/// Smoothness parameters `(λ, μ)` attaining [`poa_bound`].
pub fn smoothness_params(p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    Ok(match Regime::of(p) {
        Regime::Low => (1.0, 0.25),
        Regime::Mid => {
            let s = root_term(p);
            ((1.0 + p + s) / 2.0, (1.0 + p - s) / 2.0)
        }
        Regime::High => ((1.0 + 2.0 * p + 2.0 * p * p) / (1.0 + 2.0 * p), p / (1.0 + 2.0 * p)),
    })
}

/// `λ / (1 - μ)`.
pub fn smoothness_poa_cap(lambda: f64, mu: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must lie in [0, 1)")));
    }
    Ok(lambda / (1.0 - mu))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub p: f64,
    pub poa: f64,
    pub pos: f64,
    pub regime: Regime,
    pub lambda: f64,
    pub mu: f64,
    pub y_min: f64,
}

/// Every closed-form quantity at `p`.
pub fn bound(p: f64) -> Result<BoundResult> {
    let (lambda, mu) = smoothness_params(p)?;
    Ok(BoundResult {
        p,
        poa: poa_bound(p)?,
        pos: pos_bound(p)?,
        regime: Regime::of(p),
        lambda,
        mu,
        y_min: closed_form_minimizer(p),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessCheck {
    pub p: f64,
    pub lambda: f64,
    pub mu: f64,
    pub k_max: usize,
    pub m_max: usize,
    /// Largest `LHS - RHS` over the grid; `<= 0` means no violation.
    pub worst_violation: f64,
    pub worst_pair: (usize, usize),
}

impl SmoothnessCheck {
    pub fn certified(&self, tol: f64) -> bool {
        self.worst_violation <= tol
    }
}

/// Evaluates `k(1+mp) - [λ k(1-p+pk) + μ m(1-p+pm)]` on `1 <= k <= k_max`,
/// `0 <= m <= m_max` and reports the largest value.
pub fn verify_smoothness(p: f64, lambda: f64, mu: f64, k_max: usize, m_max: usize) -> SmoothnessCheck {
    let mut worst = (f64::NEG_INFINITY, (1, 0));
    for k in 1..=k_max.max(1) {
        let kf = k as f64;
        let own = lambda * kf * (1.0 - p + p * kf);
        for m in 0..=m_max {
            let mf = m as f64;
            let gap = kf * (1.0 + mf * p) - (own + mu * mf * (1.0 - p + p * mf));
            if gap > worst.0 {
                worst = (gap, (k, m));
            }
        }
    }
    SmoothnessCheck { p, lambda, mu, k_max, m_max, worst_violation: worst.0, worst_pair: worst.1 }
}

/// Discontinuity of `f` at `x`: the gap between its one-sided limits, each
/// estimated by linear extrapolation from samples at `x ± h` and `x ± 2h`.
pub fn jump_at(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let left = 2.0 * f(x - h) - f(x - 2.0 * h);
    let right = 2.0 * f(x + h) - f(x + 2.0 * h);
    (right - left).abs()
}
