use super::check_family_p;
use crate::equilibrium::{analyze, analyze_best_response_only, is_equilibrium, AnalysisReport};
use crate::error::{Error, Result};
use crate::game::{CostFunction, Game, Player, StrategyProfile};

/// Roundabouts with more players than this are analyzed on the two canonical
/// profiles only.
pub const ROUNDABOUT_EXHAUSTIVE_PLAYERS: usize = 20;

fn check_k(k: usize) -> Result<()> {
    if k >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("k must be at least 1".into()))
    }
}

/// Two parallel links shared by `2k` players: the upper one costs `x`, the
/// lower one the constant `1 + 2kp`. Strategy 0 is the upper link.
pub fn gen_pigou(k: usize, p: f64) -> Result<Game> {
    check_k(k)?;
    check_family_p(p)?;
    let lower = 1.0 + 2.0 * k as f64 * p;
    Ok(Game::new(
        format!("pigou(k={k}, p={p})"),
        vec![CostFunction::linear(1.0), CostFunction::constant(lower)],
        vec![Player::new(p, vec![vec![0], vec![1]]); 2 * k],
    ))
}

/// `(4kp + 2 - 2p) / (3kp + 2 - p)`, the equilibrium-to-optimum ratio of both
/// the Pigou and the bypass families.
pub fn pigou_ratio(k: usize, p: f64) -> f64 {
    let kp = k as f64 * p;
    (4.0 * kp + 2.0 - 2.0 * p) / (3.0 * kp + 2.0 - p)
}

/// Bypass network: players `0..k` choose between a private link `e_i`
/// (cost `x`, strategy 0) and the shared link (cost `x / (1 + 2kp)`,
/// strategy 1); players `k..2k` can only use the shared link. Resource `i`
/// is `e_i` and resource `k` is the shared link.
pub fn gen_bypass(k: usize, p: f64) -> Result<Game> {
    check_k(k)?;
    check_family_p(p)?;
    let mut resources = vec![CostFunction::linear(1.0); k];
    resources.push(CostFunction::linear(1.0 / (1.0 + 2.0 * k as f64 * p)));
    let players = (0..k)
        .map(|i| Player::new(p, vec![vec![i], vec![k]]))
        .chain((0..k).map(|_| Player::new(p, vec![vec![k]])))
        .collect();
    Ok(Game::new(format!("bypass(k={k}, p={p})"), resources, players))
}

/// Slope `γ = p / (m(1 - p + pm) - k(1 + pm))` of the roundabout links,
/// which makes every player indifferent between her two routes when all
/// players take the long one.
pub fn roundabout_gamma(k: usize, m: usize, p: f64) -> Result<f64> {
    check_k(k)?;
    check_family_p(p)?;
    if m <= k {
        return Err(Error::InvalidParameter(format!("roundabout needs m > k, got k = {k}, m = {m}")));
    }
    let (kf, mf) = (k as f64, m as f64);
    let denom = mf * (1.0 - p + p * mf) - kf * (1.0 + p * mf);
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "roundabout slope undefined: m(1-p+pm) - k(1+pm) = {denom} must be positive (k = {k}, m = {m}, p = {p})"
        )));
    }
    Ok(p / denom)
}

/// `m = ⌊z k⌋` with `z = 1 + p + √(p(2+p))`, the choice under which the
/// roundabout ratio approaches the middle-regime bound as `k` grows.
pub fn roundabout_m(k: usize, p: f64) -> usize {
    let z = 1.0 + p + (p * (2.0 + p)).sqrt();
    (z * k as f64).floor() as usize
}

/// Roundabout with `n = m + k` players. Resources `0..n` are the ring links
/// `h_j` (cost `γx`) and `n..2n` the exits `g_j` (cost `x`). Player `i`'s
/// strategy 0 is the short route `h_i..h_{i+k-1}, g_{i+k-1}` and strategy 1
/// the long route `h_{i+k}..h_{i+k+m-1}, g_{i+k+m-1}`, indices mod `n`.
pub fn gen_roundabout(k: usize, m: usize, p: f64) -> Result<Game> {
    let gamma = roundabout_gamma(k, m, p)?;
    let n = m + k;
    let mut resources = vec![CostFunction::linear(gamma); n];
    resources.extend(vec![CostFunction::linear(1.0); n]);
    let route = |start: usize, len: usize| -> Vec<usize> {
        let mut r: Vec<usize> = (start..start + len).map(|j| j % n).collect();
        r.push(n + (start + len - 1) % n);
        r
    };
    let players = (0..n).map(|i| Player::new(p, vec![route(i, k), route(i + k, m)])).collect();
    Ok(Game::new(format!("roundabout(k={k}, m={m}, p={p})"), resources, players))
}

/// Ratio of the all-long equilibrium's cost to the all-short profile's cost:
/// `((1+p) m(1-p+pm) - k(1+pm)) / (pk(1-p+pk) + m(1-p+pm) - k(1+pm))`.
pub fn roundabout_ratio(k: usize, m: usize, p: f64) -> f64 {
    let (kf, mf) = (k as f64, m as f64);
    let long = mf * (1.0 - p + p * mf);
    let cross = kf * (1.0 + p * mf);
    ((1.0 + p) * long - cross) / (p * kf * (1.0 - p + p * kf) + long - cross)
}

/// Roundabout analysis: exhaustive up to [`ROUNDABOUT_EXHAUSTIVE_PLAYERS`]
/// players, otherwise on the all-long equilibrium against the all-short
/// profile (after checking the former is an equilibrium).
pub fn analyze_roundabout(k: usize, m: usize, p: f64, eps: f64) -> Result<AnalysisReport> {
    let game = gen_roundabout(k, m, p)?;
    let n = game.num_players();
    if n <= ROUNDABOUT_EXHAUSTIVE_PLAYERS {
        return analyze(&game, eps);
    }
    let long = StrategyProfile::uniform(n, 1);
    if !is_equilibrium(&game, &long, eps)? {
        return Err(Error::Internal(format!("all-long profile of {} is not an equilibrium", game.name)));
    }
    analyze_best_response_only(&game, eps, &[long], &[StrategyProfile::uniform(n, 0)], 1)
}

/// Three players on six resources: `h_i` cost `p x` (resources 0..3), `g_i`
/// cost `x` (resources 3..6). Player `i` picks `{h_i, g_i}` (strategy 0) or
/// `{h_{i-1}, h_{i+1}, g_{i+1}}` (strategy 1), indices mod 3.
pub fn gen_triangle(p: f64) -> Result<Game> {
    check_family_p(p)?;
    let mut resources = vec![CostFunction::linear(p); 3];
    resources.extend(vec![CostFunction::linear(1.0); 3]);
    let players =
        (0..3).map(|i| Player::new(p, vec![vec![i, 3 + i], vec![(i + 2) % 3, (i + 1) % 3, 3 + (i + 1) % 3]])).collect();
    Ok(Game::new(format!("triangle(p={p})"), resources, players))
}

/// `1 + p + p² / (1 + p)`.
pub fn triangle_ratio(p: f64) -> f64 {
    1.0 + p + p * p / (1.0 + p)
}
