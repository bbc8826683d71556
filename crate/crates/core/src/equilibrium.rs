//! Potential, best-response dynamics, exhaustive equilibrium enumeration and
//! per-instance price of anarchy / stability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, ResourceUsage, StrategyProfile};
use crate::stochastic::{expected_strategy_cost, load_distribution, social_cost_of_usage};

/// Default tolerance: a deviation must improve by more than this to count.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Largest number of profiles an exhaustive scan will visit.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// Expected Rosenthal potential `Σ_e E[Σ_{k=1}^{N_e} c_e(k)]`.
pub fn potential(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    let usage = ResourceUsage::new(game, profile)?;
    potential_of_usage(game, &usage)
}

fn potential_of_usage(game: &Game, usage: &ResourceUsage) -> Result<f64> {
    let mut total = 0.0;
    for (r, cost) in game.resources.iter().enumerate() {
        let load = usage.load(r);
        if load == 0 {
            continue;
        }
        // partial[n] = Σ_{k=1}^{n} c(k)
        let mut partial = Vec::with_capacity(load + 1);
        partial.push(0.0);
        for k in 1..=load {
            partial.push(partial[k - 1] + cost.eval(k)?);
        }
        let dist = load_distribution(game, usage, r)?;
        total += dist.expect(|n| Ok(partial[n]))?;
    }
    Ok(total)
}

/// Best deviation for player `i`: the lowest-index strategy whose expected
/// cost beats the current one by more than `eps`.
fn first_improvement(
    game: &Game,
    usage: &ResourceUsage,
    profile: &StrategyProfile,
    i: usize,
    eps: f64,
) -> Result<Option<usize>> {
    let player = &game.players[i];
    if player.strategies.len() < 2 {
        return Ok(None);
    }
    let current = expected_strategy_cost(game, usage, i, game.strategy_of(profile, i))?;
    for (t, strategy) in player.strategies.iter().enumerate() {
        if t == profile.0[i] {
            continue;
        }
        if expected_strategy_cost(game, usage, i, strategy)? < current - eps {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn is_equilibrium_with(game: &Game, usage: &ResourceUsage, profile: &StrategyProfile, eps: f64) -> Result<bool> {
    for i in 0..game.players.len() {
        if first_improvement(game, usage, profile, i, eps)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no player can lower her expected cost by more than `eps` with a
/// unilateral deviation.
pub fn is_equilibrium(game: &Game, profile: &StrategyProfile, eps: f64) -> Result<bool> {
    let usage = ResourceUsage::new(game, profile)?;
    is_equilibrium_with(game, &usage, profile, eps)
}

/// Round-robin best-response dynamics from `start`.
///
/// Players are visited in index order; a player moves to the lowest-index
/// strategy that improves on her current cost by more than `eps`. The run
/// stops after a full round without a move. `max_rounds` bounds the number
/// of rounds.
pub fn best_response_dynamics(
    game: &Game,
    start: &StrategyProfile,
    eps: f64,
    max_rounds: usize,
) -> Result<StrategyProfile> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("best-response tolerance must be positive, got {eps}")));
    }
    let mut profile = start.clone();
    let mut usage = ResourceUsage::new(game, &profile)?;
    let mut phi = potential_of_usage(game, &usage)?;
    for _ in 0..max_rounds {
        let mut moved = false;
        for i in 0..game.players.len() {
            if let Some(t) = first_improvement(game, &usage, &profile, i, eps)? {
                profile = profile.with_choice(i, t);
                usage = ResourceUsage::new(game, &profile)?;
                let next = potential_of_usage(game, &usage)?;
                if next.is_nan() || next >= phi {
                    return Err(Error::Internal(format!(
                        "improving move by player {i} did not decrease the potential ({phi} -> {next})"
                    )));
                }
                phi = next;
                moved = true;
            }
        }
        if !moved {
            return Ok(profile);
        }
    }
    Err(Error::NoConvergence { rounds: max_rounds })
}

fn guard(game: &Game) -> Result<u64> {
    let count = game.profile_count();
    if count > ENUMERATION_LIMIT as u128 {
        Err(Error::TooLarge { profiles: count, limit: ENUMERATION_LIMIT })
    } else {
        Ok(count as u64)
    }
}

/// The `index`-th profile in lexicographic order (player 0 most significant).
fn decode(game: &Game, mut index: u64) -> StrategyProfile {
    let mut choices = vec![0; game.players.len()];
    for (slot, player) in choices.iter_mut().zip(&game.players).rev() {
        let radix = player.strategies.len() as u64;
        *slot = (index % radix) as usize;
        index /= radix;
    }
    StrategyProfile(choices)
}

/// All profiles in lexicographic order, subject to [`ENUMERATION_LIMIT`].
pub fn profiles(game: &Game) -> Result<impl Iterator<Item = StrategyProfile> + '_> {
    let total = if game.players.iter().any(|p| p.strategies.is_empty()) { 0 } else { guard(game)? };
    Ok((0..total).map(move |index| decode(game, index)))
}

struct Scan {
    profile: StrategyProfile,
    cost: f64,
    equilibrium: bool,
}

fn scan(game: &Game, eps: Option<f64>) -> Result<Vec<Scan>> {
    if game.players.iter().any(|p| p.strategies.is_empty()) {
        return Err(Error::InvalidParameter("every player needs at least one strategy".into()));
    }
    let total = guard(game)?;
    (0..total)
        .into_par_iter()
        .map(|index| {
            let profile = decode(game, index);
            let usage = ResourceUsage::new(game, &profile)?;
            let cost = social_cost_of_usage(game, &usage)?;
            let equilibrium = match eps {
                Some(eps) => is_equilibrium_with(game, &usage, &profile, eps)?,
                None => false,
            };
            Ok(Scan { profile, cost, equilibrium })
        })
        .collect()
}

/// Lowest cost, first in scan order among ties.
fn cheapest(rows: &[Scan]) -> Option<&Scan> {
    rows.iter().reduce(|best, row| if row.cost < best.cost { row } else { best })
}

/// Every profile passing [`is_equilibrium`], in lexicographic order.
pub fn enumerate_equilibria(game: &Game, eps: f64) -> Result<Vec<StrategyProfile>> {
    Ok(scan(game, Some(eps))?.into_iter().filter(|row| row.equilibrium).map(|row| row.profile).collect())
}

/// A profile minimizing the expected social cost (lexicographically first
/// among minimizers) and its cost.
pub fn social_optimum(game: &Game) -> Result<(StrategyProfile, f64)> {
    let rows = scan(game, None)?;
    let best = cheapest(&rows).ok_or_else(|| Error::Internal("empty profile space".into()))?;
    Ok((best.profile.clone(), best.cost))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Every profile visited; ratios are exact.
    Exhaustive,
    /// Equilibrium from best-response dynamics and optimum over a candidate
    /// set; ratios are lower estimates of the instance's PoA.
    BestResponseOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostedProfile {
    pub profile: StrategyProfile,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub method: Method,
    pub equilibria: Vec<StrategyProfile>,
    pub social_optimum: CostedProfile,
    pub best_equilibrium: CostedProfile,
    pub worst_equilibrium: CostedProfile,
    pub best_eq_cost: f64,
    pub worst_eq_cost: f64,
    pub poa: f64,
    pub pos: f64,
}

fn ratio(cost: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        1.0
    } else {
        cost / optimum
    }
}

fn report(method: Method, equilibria: Vec<CostedProfile>, optimum: CostedProfile) -> Result<AnalysisReport> {
    // Ties keep the first equilibrium in scan order.
    let best = equilibria
        .iter()
        .reduce(|a, b| if b.cost < a.cost { b } else { a })
        .ok_or_else(|| Error::Internal("no equilibrium found".into()))?
        .clone();
    let worst = equilibria.iter().reduce(|a, b| if b.cost > a.cost { b } else { a }).expect("nonempty").clone();
    Ok(AnalysisReport {
        method,
        best_eq_cost: best.cost,
        worst_eq_cost: worst.cost,
        poa: ratio(worst.cost, optimum.cost),
        pos: ratio(best.cost, optimum.cost),
        equilibria: equilibria.into_iter().map(|e| e.profile).collect(),
        social_optimum: optimum,
        best_equilibrium: best,
        worst_equilibrium: worst,
    })
}

/// Exhaustive analysis: all equilibria, the social optimum, PoA and PoS.
///
/// When the optimal cost is zero every profile is optimal and both ratios are
/// reported as 1.
pub fn analyze(game: &Game, eps: f64) -> Result<AnalysisReport> {
    let rows = scan(game, Some(eps))?;
    let optimum = cheapest(&rows).ok_or_else(|| Error::Internal("empty profile space".into()))?;
    let optimum = CostedProfile { profile: optimum.profile.clone(), cost: optimum.cost };
    let equilibria = rows
        .into_iter()
        .filter(|row| row.equilibrium)
        .map(|row| CostedProfile { profile: row.profile, cost: row.cost })
        .collect();
    report(Method::Exhaustive, equilibria, optimum)
}

/// Analysis without a full scan, for games past [`ENUMERATION_LIMIT`].
///
/// Each of `starts` is run through best-response dynamics; the distinct
/// resulting equilibria are reported. The optimum is the cheapest of the
/// starts, the equilibria and `candidates`, so it only bounds the true
/// optimum from above.
pub fn analyze_best_response_only(
    game: &Game,
    eps: f64,
    starts: &[StrategyProfile],
    candidates: &[StrategyProfile],
    max_rounds: usize,
) -> Result<AnalysisReport> {
    let mut equilibria: Vec<CostedProfile> = Vec::new();
    for start in starts {
        let eq = best_response_dynamics(game, start, eps, max_rounds)?;
        if equilibria.iter().all(|e| e.profile != eq) {
            let cost = crate::stochastic::expected_social_cost(game, &eq)?;
            equilibria.push(CostedProfile { profile: eq, cost });
        }
    }
    let mut optimum: Option<CostedProfile> = None;
    let pool = starts
        .iter()
        .chain(candidates)
        .cloned()
        .map(|profile| {
            let cost = crate::stochastic::expected_social_cost(game, &profile)?;
            Ok(CostedProfile { profile, cost })
        })
        .collect::<Result<Vec<_>>>()?;
    for c in pool.into_iter().chain(equilibria.iter().cloned()) {
        if optimum.as_ref().is_none_or(|o| c.cost < o.cost) {
            optimum = Some(c);
        }
    }
    let optimum = optimum.ok_or_else(|| Error::InvalidParameter("no starting profile given".into()))?;
    report(Method::BestResponseOnly, equilibria, optimum)
}
