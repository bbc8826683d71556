//! Exact expectations under independent Bernoulli participation.
//!
//! The load on a resource is a sum of independent, non-identical Bernoulli
//! variables, so its law is Poisson-binomial. Every expectation here is taken
//! against that law computed by sequential convolution; nothing is sampled.

use crate::error::{Error, Result};
use crate::game::{CostFunction, Game, Player, ResourceUsage, StrategyProfile};

/// Law of a nonnegative integer load: `pmf()[j] = P(X = j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadDistribution {
    pmf: Vec<f64>,
}

impl LoadDistribution {
    /// The point mass at zero.
    pub fn zero() -> Self {
        LoadDistribution { pmf: vec![1.0] }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Largest load with a slot in the pmf.
    pub fn max_load(&self) -> usize {
        self.pmf.len() - 1
    }

    /// Convolves in one more independent Bernoulli(`p`) summand.
    fn push(&mut self, p: f64) {
        let q = 1.0 - p;
        self.pmf.push(0.0);
        for j in (1..self.pmf.len()).rev() {
            self.pmf[j] = self.pmf[j] * q + self.pmf[j - 1] * p;
        }
        self.pmf[0] *= q;
    }

    /// `E[f(X)]`, summed in increasing load order.
    pub fn expect(&self, mut f: impl FnMut(usize) -> Result<f64>) -> Result<f64> {
        let mut total = 0.0;
        for (j, &q) in self.pmf.iter().enumerate() {
            total += q * f(j)?;
        }
        Ok(total)
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(j, q)| j as f64 * q).sum()
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// Exact law of `Σ_j Bernoulli(probs[j])`, convolved left to right.
pub fn poisson_binomial(probs: &[f64]) -> Result<LoadDistribution> {
    let mut dist = LoadDistribution::zero();
    dist.pmf.reserve(probs.len());
    for &p in probs {
        check_probability(p)?;
        dist.push(p);
    }
    Ok(dist)
}

/// `E[c(1 + X)]` for `X ~ others`: what one active user of the resource pays
/// on average when the other users' load is distributed as `others`.
pub fn expected_resource_cost_seen(cost: &CostFunction, others: &LoadDistribution) -> Result<f64> {
    others.expect(|j| cost.eval(1 + j))
}

fn others_on<'a>(
    game: &'a Game,
    usage: &'a ResourceUsage,
    i: usize,
    resource: usize,
) -> impl Iterator<Item = f64> + 'a {
    usage.choosers(resource).iter().filter(move |&&j| j != i).map(move |&j| game.players[j].p)
}

/// `E[c_e(1 + N_e^{-i})]` with the closed form for affine costs.
fn seen_cost(game: &Game, usage: &ResourceUsage, i: usize, resource: usize) -> Result<f64> {
    match game.resources[resource] {
        CostFunction::Affine { a, b } => {
            let others: f64 = others_on(game, usage, i, resource).sum();
            Ok(a * (1.0 + others) + b)
        }
        CostFunction::Table { .. } => seen_cost_dp(game, usage, i, resource),
    }
}

fn seen_cost_dp(game: &Game, usage: &ResourceUsage, i: usize, resource: usize) -> Result<f64> {
    let probs: Vec<f64> = others_on(game, usage, i, resource).collect();
    expected_resource_cost_seen(&game.resources[resource], &poisson_binomial(&probs)?)
}

/// Expected cost to player `i` of playing the resources in `strategy` while
/// everyone else plays as in `usage`. Player `i`'s own current choice in
/// `usage` is ignored.
pub(crate) fn expected_strategy_cost(game: &Game, usage: &ResourceUsage, i: usize, strategy: &[usize]) -> Result<f64> {
    let p = game.players[i].p;
    let mut total = 0.0;
    for &r in strategy {
        total += seen_cost(game, usage, i, r)?;
    }
    Ok(p * total)
}

/// Expected cost of player `i`: `p_i Σ_{e ∈ s_i} E[c_e(1 + N_e^{-i})]`.
///
/// Affine resources use `a (1 + Σ_{j≠i} p_j) + b`; table resources use the
/// Poisson-binomial law of the other choosers.
pub fn expected_player_cost(game: &Game, profile: &StrategyProfile, i: usize) -> Result<f64> {
    game.check_player(i)?;
    let usage = ResourceUsage::new(game, profile)?;
    expected_strategy_cost(game, &usage, i, game.strategy_of(profile, i))
}

/// Same quantity as [`expected_player_cost`] but always through the
/// Poisson-binomial law, whatever the cost kind.
pub fn expected_player_cost_dp(game: &Game, profile: &StrategyProfile, i: usize) -> Result<f64> {
    game.check_player(i)?;
    let usage = ResourceUsage::new(game, profile)?;
    let mut total = 0.0;
    for &r in game.strategy_of(profile, i) {
        total += seen_cost_dp(game, &usage, i, r)?;
    }
    Ok(game.players[i].p * total)
}

/// Law of the random load on `resource` (all choosers).
pub(crate) fn load_distribution(game: &Game, usage: &ResourceUsage, resource: usize) -> Result<LoadDistribution> {
    let probs: Vec<f64> = usage.choosers(resource).iter().map(|&j| game.players[j].p).collect();
    poisson_binomial(&probs)
}

pub(crate) fn social_cost_of_usage(game: &Game, usage: &ResourceUsage) -> Result<f64> {
    let mut total = 0.0;
    for (r, cost) in game.resources.iter().enumerate() {
        if usage.load(r) == 0 {
            continue;
        }
        let dist = load_distribution(game, usage, r)?;
        total += dist.expect(|n| if n == 0 { Ok(0.0) } else { Ok(n as f64 * cost.eval(n)?) })?;
    }
    Ok(total)
}

/// Expected social cost `Σ_e E[N_e c_e(N_e)]`.
pub fn expected_social_cost(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    let usage = ResourceUsage::new(game, profile)?;
    social_cost_of_usage(game, &usage)
}

/// `c^p(x) = p E[c(1 + X)]` with `X ~ Binomial(x - 1, p)`: the expected cost
/// to a user of a resource chosen by `x` homogeneous players.
pub fn homogeneous_transform(cost: &CostFunction, p: f64, x: usize) -> Result<f64> {
    check_probability(p)?;
    if x < 1 {
        return Err(Error::InvalidParameter(format!("homogeneous transform needs a load x >= 1, got {x}")));
    }
    match *cost {
        CostFunction::Affine { a, b } => Ok(p * (a * (1.0 - p + p * x as f64) + b)),
        CostFunction::Table { .. } => homogeneous_transform_dp(cost, p, x),
    }
}

fn homogeneous_transform_dp(cost: &CostFunction, p: f64, x: usize) -> Result<f64> {
    let others = poisson_binomial(&vec![p; x - 1])?;
    Ok(p * expected_resource_cost_seen(cost, &others)?)
}

/// A game with probabilities `r_i = p_i / q` and costs `c_e^q` tabulated up
/// to the number of players, equivalent to the original one.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedGame {
    pub q: f64,
    pub game: Game,
}

/// Rewrites a heterogeneous game as one with homogeneous level `q`.
///
/// `q` defaults to `max_i p_i`. Every player's expected cost is the same in
/// both games on every profile.
pub fn reduce_heterogeneous(game: &Game, q: Option<f64>) -> Result<ReducedGame> {
    let max_p = game.max_probability();
    let q = q.unwrap_or(max_p);
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!("reduction level q = {q} must lie in (0, 1]")));
    }
    if q < max_p {
        return Err(Error::InvalidParameter(format!(
            "reduction level q = {q} is below the largest participation probability {max_p}"
        )));
    }
    let n = game.players.len().max(1);
    let resources = game
        .resources
        .iter()
        .map(|cost| {
            (1..=n).map(|x| homogeneous_transform(cost, q, x)).collect::<Result<Vec<_>>>().map(CostFunction::table)
        })
        .collect::<Result<Vec<_>>>()?;
    let players = game.players.iter().map(|pl| Player::new((pl.p / q).min(1.0), pl.strategies.clone())).collect();
    Ok(ReducedGame { q, game: Game::new(format!("{} (reduced, q={q})", game.name), resources, players) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::deterministic_player_cost;
    use proptest::prelude::*;

    /// Oracle: enumerate all 2^n outcomes.
    fn enumerate_law(probs: &[f64]) -> Vec<f64> {
        let n = probs.len();
        let mut pmf = vec![0.0; n + 1];
        for mask in 0u32..(1 << n) {
            let mut weight = 1.0;
            for (j, &p) in probs.iter().enumerate() {
                weight *= if mask & (1 << j) != 0 { p } else { 1.0 - p };
            }
            pmf[mask.count_ones() as usize] += weight;
        }
        pmf
    }

    /// Oracle: subset-sum form of a player's expected cost, summing over every
    /// set of active players that contains `i`.
    fn subset_player_cost(game: &Game, profile: &StrategyProfile, i: usize) -> f64 {
        let n = game.players.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask & (1 << i) == 0 {
                continue;
            }
            let mut weight = 1.0;
            for (j, pl) in game.players.iter().enumerate() {
                weight *= if mask & (1 << j) != 0 { pl.p } else { 1.0 - pl.p };
            }
            for &e in game.strategy_of(profile, i) {
                let load =
                    (0..n).filter(|&j| mask & (1 << j) != 0 && game.strategy_of(profile, j).contains(&e)).count();
                total += weight * game.resources[e].eval(load).unwrap();
            }
        }
        total
    }

    fn edge_game(probs: &[f64], cost: CostFunction) -> Game {
        Game::new("edge", vec![cost], probs.iter().map(|&p| Player::new(p, vec![vec![0]])).collect())
    }

    #[test]
    fn poisson_binomial_small_cases() {
        assert_eq!(poisson_binomial(&[]).unwrap().pmf(), &[1.0]);
        assert_eq!(poisson_binomial(&[0.5, 0.5]).unwrap().pmf(), &[0.25, 0.5, 0.25]);
        assert_eq!(poisson_binomial(&[1.0]).unwrap().pmf(), &[0.0, 1.0]);
        assert!(matches!(poisson_binomial(&[0.2, 1.1]), Err(Error::ProbabilityOutOfRange(_))));
        assert!(poisson_binomial(&[f64::NAN]).is_err());
    }

    #[test]
    fn cost_seen_by_one_user() {
        let half = poisson_binomial(&[0.5]).unwrap();
        assert_eq!(expected_resource_cost_seen(&CostFunction::linear(1.0), &half).unwrap(), 1.5);
        let table = CostFunction::table(vec![3.0, 7.0]);
        assert_eq!(expected_resource_cost_seen(&table, &LoadDistribution::zero()).unwrap(), 3.0);
        let two = poisson_binomial(&[0.5, 0.5]).unwrap();
        assert!(matches!(expected_resource_cost_seen(&table, &two), Err(Error::CostUndefined { load: 3, len: 2 })));
    }

    #[test]
    fn affine_cost_seen_matches_linearity() {
        let (a, b, p, k) = (1.7, 0.3, 0.35, 9);
        let dist = poisson_binomial(&vec![p; k]).unwrap();
        let dp = expected_resource_cost_seen(&CostFunction::affine(a, b), &dist).unwrap();
        assert!((dp - (a * (1.0 + k as f64 * p) + b)).abs() < 1e-12);
    }

    #[test]
    fn two_players_on_one_edge() {
        let game = edge_game(&[0.5, 0.5], CostFunction::linear(1.0));
        let profile = StrategyProfile::uniform(2, 0);
        assert_eq!(expected_player_cost(&game, &profile, 0).unwrap(), 0.75);
        assert!((subset_player_cost(&game, &profile, 0) - 0.75).abs() < 1e-15);
        assert_eq!(expected_social_cost(&game, &profile).unwrap(), 1.5);
    }

    #[test]
    fn absent_player_pays_nothing() {
        let game = edge_game(&[0.0, 0.5], CostFunction::affine(1.0, 2.0));
        assert_eq!(expected_player_cost(&game, &StrategyProfile::uniform(2, 0), 0).unwrap(), 0.0);
    }

    #[test]
    fn empty_usage_has_zero_social_cost() {
        let game = Game::new(
            "idle",
            vec![CostFunction::linear(1.0), CostFunction::linear(1.0)],
            vec![Player::new(0.5, vec![vec![0]])],
        );
        let usage = ResourceUsage::new(&game, &StrategyProfile::uniform(1, 0)).unwrap();
        assert_eq!(usage.load(1), 0);
        let nobody = Game::new("nobody", vec![CostFunction::linear(1.0)], vec![]);
        assert_eq!(expected_social_cost(&nobody, &StrategyProfile::new(vec![])).unwrap(), 0.0);
    }

    #[test]
    fn homogeneous_transform_values() {
        let linear = CostFunction::linear(1.0);
        assert_eq!(homogeneous_transform(&linear, 0.5, 2).unwrap(), 0.75);
        for &p in &[0.1, 0.3, 0.77] {
            for x in 1..8 {
                let v = homogeneous_transform(&linear, p, x).unwrap();
                assert!((v - p * (1.0 + (x as f64 - 1.0) * p)).abs() < 1e-15);
                let dp = homogeneous_transform_dp(&linear, p, x).unwrap();
                assert!((v - dp).abs() < 1e-13);
            }
        }
        let table = CostFunction::table(vec![1.0, 4.0, 9.0]);
        for x in 1..=3 {
            assert_eq!(homogeneous_transform(&table, 1.0, x).unwrap(), table.eval(x).unwrap());
        }
        assert!(homogeneous_transform(&linear, 0.5, 0).is_err());
        assert!(homogeneous_transform(&linear, 1.5, 1).is_err());
    }

    #[test]
    fn reduction_probabilities() {
        let game = Game::new(
            "het",
            vec![CostFunction::affine(1.0, 0.5)],
            vec![Player::new(0.2, vec![vec![0]]), Player::new(0.4, vec![vec![0]])],
        );
        let reduced = reduce_heterogeneous(&game, None).unwrap();
        assert_eq!(reduced.q, 0.4);
        assert_eq!(reduced.game.players[0].p, 0.5);
        assert_eq!(reduced.game.players[1].p, 1.0);
        assert!(reduced.game.validate().is_empty());

        let uniform = game.with_uniform_probability(0.3);
        let reduced = reduce_heterogeneous(&uniform, None).unwrap();
        assert!(reduced.game.players.iter().all(|pl| pl.p == 1.0));

        assert!(reduce_heterogeneous(&game, Some(0.3)).is_err());
        assert!(reduce_heterogeneous(&game.with_uniform_probability(0.0), None).is_err());
        assert!(reduce_heterogeneous(&game, Some(1.2)).is_err());
    }

    #[test]
    fn reduction_preserves_costs_on_small_instance() {
        let game = Game::new(
            "three",
            vec![
                CostFunction::affine(1.3, 0.2),
                CostFunction::affine(0.4, 1.1),
                CostFunction::table(vec![0.5, 0.9, 2.0]),
            ],
            vec![
                Player::new(0.25, vec![vec![0, 1], vec![2]]),
                Player::new(0.6, vec![vec![0], vec![1, 2]]),
                Player::new(0.9, vec![vec![2, 0], vec![1]]),
            ],
        );
        let reduced = reduce_heterogeneous(&game, None).unwrap();
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let profile = StrategyProfile::new(vec![a, b, c]);
                    for i in 0..3 {
                        let orig = expected_player_cost(&game, &profile, i).unwrap();
                        let red = expected_player_cost(&reduced.game, &profile, i).unwrap();
                        worst = worst.max((orig - red).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-12, "max discrepancy {worst}");
    }

    #[test]
    fn full_participation_is_deterministic() {
        let game = Game::new(
            "mix",
            vec![CostFunction::affine(2.0, 1.0), CostFunction::table(vec![1.0, 5.0, 6.0])],
            vec![
                Player::new(1.0, vec![vec![0, 1], vec![1]]),
                Player::new(1.0, vec![vec![1]]),
                Player::new(1.0, vec![vec![0], vec![1]]),
            ],
        );
        for a in 0..2 {
            for c in 0..2 {
                let profile = StrategyProfile::new(vec![a, 0, c]);
                for i in 0..3 {
                    assert_eq!(
                        expected_player_cost(&game, &profile, i).unwrap(),
                        deterministic_player_cost(&game, &profile, i).unwrap()
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn law_matches_enumeration(probs in prop::collection::vec(0.0f64..=1.0, 0..=12)) {
            let dp = poisson_binomial(&probs).unwrap();
            let oracle = enumerate_law(&probs);
            prop_assert_eq!(dp.pmf().len(), oracle.len());
            let total: f64 = dp.pmf().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for (x, y) in dp.pmf().iter().zip(&oracle) {
                prop_assert!(*x >= 0.0);
                prop_assert!((x - y).abs() < 1e-14, "{} vs {}", x, y);
            }
        }

        #[test]
        fn affine_closed_form_matches_dp(
            probs in prop::collection::vec(0.0f64..=1.0, 1..=12),
            a in 0.0f64..3.0,
            b in 0.0f64..3.0,
        ) {
            let game = edge_game(&probs, CostFunction::affine(a, b));
            let profile = StrategyProfile::uniform(probs.len(), 0);
            for i in 0..probs.len() {
                let closed = expected_player_cost(&game, &profile, i).unwrap();
                let dp = expected_player_cost_dp(&game, &profile, i).unwrap();
                prop_assert!((closed - dp).abs() < 1e-12);
            }
        }

        #[test]
        fn player_cost_matches_subset_sum(
            probs in prop::collection::vec(0.0f64..=1.0, 3),
            choices in prop::collection::vec(0usize..2, 3),
            table in prop::collection::vec(0.0f64..2.0, 3),
        ) {
            let mut table = table;
            table.sort_by(f64::total_cmp);
            let game = Game::new(
                "sub",
                vec![CostFunction::affine(1.0, 0.5), CostFunction::table(table)],
                probs.iter().map(|&p| Player::new(p, vec![vec![0], vec![0, 1]])).collect(),
            );
            let profile = StrategyProfile::new(choices);
            let mut total = 0.0;
            for i in 0..3 {
                let cost = expected_player_cost(&game, &profile, i).unwrap();
                prop_assert!((cost - subset_player_cost(&game, &profile, i)).abs() < 1e-12);
                total += cost;
            }
            let esc = expected_social_cost(&game, &profile).unwrap();
            prop_assert!((esc - total).abs() < 1e-10);
        }

        #[test]
        fn transform_monotone_on_affine_family(
            a in 0.0f64..3.0,
            b in 0.0f64..3.0,
            p in 0.0f64..=1.0,
            dp in 0.0f64..0.2,
            x in 1usize..20,
        ) {
            let cost = CostFunction::affine(a, b);
            let here = homogeneous_transform(&cost, p, x).unwrap();
            prop_assert!(homogeneous_transform(&cost, p, x + 1).unwrap() >= here);
            let p2 = (p + dp).min(1.0);
            prop_assert!(homogeneous_transform(&cost, p2, x).unwrap() >= here - 1e-15);
        }
    }
}
