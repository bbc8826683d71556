//! Congestion game data model and deterministic profile accounting.
//!
//! A [`Game`] is a list of resources, each with a [`CostFunction`] giving the
//! per-user cost as a function of load, and a list of players. Every player
//! participates with some probability and picks one of an explicit list of
//! strategies, where a strategy is a set of resource indices. Network
//! structure never appears here: generators emit strategies directly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-user cost of one resource as a function of its load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostFunction {
    /// `c(x) = a x + b` with `a, b >= 0`.
    Affine { a: f64, b: f64 },
    /// `values[x - 1] = c(x)` for loads `1..=values.len()`.
    Table { values: Vec<f64> },
}

impl CostFunction {
    pub fn affine(a: f64, b: f64) -> Self {
        CostFunction::Affine { a, b }
    }

    pub fn linear(a: f64) -> Self {
        CostFunction::Affine { a, b: 0.0 }
    }

    pub fn constant(b: f64) -> Self {
        CostFunction::Affine { a: 0.0, b }
    }

    pub fn table(values: Vec<f64>) -> Self {
        CostFunction::Table { values }
    }

    /// Cost seen by each user when `load >= 1` players use the resource.
    pub fn eval(&self, load: usize) -> Result<f64> {
        match self {
            CostFunction::Affine { a, b } => Ok(a * load as f64 + b),
            CostFunction::Table { values } => {
                if load == 0 || load > values.len() {
                    Err(Error::CostUndefined { load, len: values.len() })
                } else {
                    Ok(values[load - 1])
                }
            }
        }
    }

    /// Largest load at which the cost is defined; `None` means unbounded.
    pub fn max_load(&self) -> Option<usize> {
        match self {
            CostFunction::Affine { .. } => None,
            CostFunction::Table { values } => Some(values.len()),
        }
    }

    fn violations(&self, resource: usize, players: usize, out: &mut Vec<Violation>) {
        let loc = Location::Resource(resource);
        match *self {
            CostFunction::Affine { a, b } => {
                if !(a.is_finite() && a >= 0.0) {
                    out.push(Violation::new(loc, format!("affine slope a = {a} must be finite and >= 0")));
                }
                if !(b.is_finite() && b >= 0.0) {
                    out.push(Violation::new(loc, format!("affine intercept b = {b} must be finite and >= 0")));
                }
            }
            CostFunction::Table { ref values } => {
                if values.len() < players {
                    out.push(Violation::new(
                        loc,
                        format!("cost table has {} entries but the game has {players} players", values.len()),
                    ));
                }
                if let Some((x, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                    out.push(Violation::new(loc, format!("cost c({}) = {v} must be finite and >= 0", x + 1)));
                }
                if let Some(x) = values.windows(2).position(|w| w[1] < w[0]) {
                    out.push(Violation::new(
                        loc,
                        format!("cost table decreases from load {} to load {}", x + 1, x + 2),
                    ));
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Player {
    /// Participation probability.
    pub p: f64,
    /// Feasible strategies, each a set of resource indices.
    pub strategies: Vec<Vec<usize>>,
}

impl Player {
    pub fn new(p: f64, strategies: Vec<Vec<usize>>) -> Self {
        Player { p, strategies }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Game {
    pub name: String,
    pub resources: Vec<CostFunction>,
    pub players: Vec<Player>,
}

/// One strategy index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    pub fn new(choices: Vec<usize>) -> Self {
        StrategyProfile(choices)
    }

    /// Every player on strategy `index`.
    pub fn uniform(players: usize, index: usize) -> Self {
        StrategyProfile(vec![index; players])
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The profile with player `player` switched to `strategy`.
    pub fn with_choice(&self, player: usize, strategy: usize) -> Self {
        let mut next = self.0.clone();
        next[player] = strategy;
        StrategyProfile(next)
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Game,
    Resource(usize),
    Player(usize),
    Strategy { player: usize, strategy: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Game => write!(f, "game"),
            Location::Resource(r) => write!(f, "resource {r}"),
            Location::Player(i) => write!(f, "player {i}"),
            Location::Strategy { player, strategy } => write!(f, "player {player} strategy {strategy}"),
        }
    }
}

/// A broken invariant, reported by [`Game::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub message: String,
}

impl Violation {
    fn new(location: Location, message: String) -> Self {
        Violation { location, message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl Game {
    pub fn new(name: impl Into<String>, resources: Vec<CostFunction>, players: Vec<Player>) -> Self {
        Game { name: name.into(), resources, players }
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_resources(&self) -> usize {
        self.resources.len()
    }

    /// All broken invariants; empty iff the game is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.players.len();
        for (r, cost) in self.resources.iter().enumerate() {
            cost.violations(r, n, &mut out);
        }
        for (i, player) in self.players.iter().enumerate() {
            if !(0.0..=1.0).contains(&player.p) {
                out.push(Violation::new(
                    Location::Player(i),
                    format!("participation probability {} is outside [0, 1]", player.p),
                ));
            }
            if player.strategies.is_empty() {
                out.push(Violation::new(Location::Player(i), "player has no strategies".into()));
            }
            for (s, strategy) in player.strategies.iter().enumerate() {
                let loc = Location::Strategy { player: i, strategy: s };
                if let Some(&r) = strategy.iter().find(|&&r| r >= self.resources.len()) {
                    out.push(Violation::new(
                        loc,
                        format!("resource index {r} out of range (game has {} resources)", self.resources.len()),
                    ));
                }
                let mut sorted = strategy.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    out.push(Violation::new(loc, "strategy lists a resource more than once".into()));
                }
            }
        }
        out
    }

    /// Conditions that are legal but usually unintended (empty strategies).
    pub fn warnings(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, player) in self.players.iter().enumerate() {
            for (s, strategy) in player.strategies.iter().enumerate() {
                if strategy.is_empty() {
                    out.push(Violation::new(
                        Location::Strategy { player: i, strategy: s },
                        "empty strategy (costs nothing)".into(),
                    ));
                }
            }
        }
        out
    }

    /// `Ok(self)` if [`validate`](Self::validate) reports nothing.
    pub fn validated(self) -> Result<Self> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidGame(violations))
        }
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.len() != self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.players.len()
            )));
        }
        for (i, (&choice, player)) in profile.0.iter().zip(&self.players).enumerate() {
            if choice >= player.strategies.len() {
                return Err(Error::InvalidProfile(format!(
                    "player {i} has {} strategies, profile picks {choice}",
                    player.strategies.len()
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn check_player(&self, player: usize) -> Result<()> {
        if player < self.players.len() {
            Ok(())
        } else {
            Err(Error::PlayerOutOfRange { index: player, count: self.players.len() })
        }
    }

    /// Resources of the strategy player `i` picks in `profile`.
    pub fn strategy_of(&self, profile: &StrategyProfile, i: usize) -> &[usize] {
        &self.players[i].strategies[profile.0[i]]
    }

    /// `Π_i |S_i|`, saturating.
    pub fn profile_count(&self) -> u128 {
        self.players.iter().fold(1u128, |acc, p| acc.saturating_mul(p.strategies.len() as u128))
    }

    pub fn max_probability(&self) -> f64 {
        self.players.iter().map(|p| p.p).fold(0.0, f64::max)
    }

    /// A copy with every participation probability set to `p`.
    pub fn with_uniform_probability(&self, p: f64) -> Game {
        let mut game = self.clone();
        for player in &mut game.players {
            player.p = p;
        }
        game
    }
}

/// Which players choose each resource under a profile, ignoring
/// participation. Chooser lists are in ascending player order.
#[derive(Clone, Debug)]
pub struct ResourceUsage {
    choosers: Vec<Vec<usize>>,
}

impl ResourceUsage {
    pub fn new(game: &Game, profile: &StrategyProfile) -> Result<Self> {
        game.check_profile(profile)?;
        let mut choosers = vec![Vec::new(); game.resources.len()];
        for i in 0..game.players.len() {
            for &r in game.strategy_of(profile, i) {
                let slot =
                    choosers.get_mut(r).ok_or(Error::ResourceOutOfRange { index: r, count: game.resources.len() })?;
                slot.push(i);
            }
        }
        Ok(ResourceUsage { choosers })
    }

    pub fn choosers(&self, resource: usize) -> &[usize] {
        &self.choosers[resource]
    }

    pub fn load(&self, resource: usize) -> usize {
        self.choosers[resource].len()
    }
}

/// Number of players choosing `resource`, active or not.
pub fn deterministic_load(game: &Game, profile: &StrategyProfile, resource: usize) -> Result<usize> {
    if resource >= game.resources.len() {
        return Err(Error::ResourceOutOfRange { index: resource, count: game.resources.len() });
    }
    game.check_profile(profile)?;
    Ok((0..game.players.len()).filter(|&i| game.strategy_of(profile, i).contains(&resource)).count())
}

/// Cost of player `i` when everybody participates.
pub fn deterministic_player_cost(game: &Game, profile: &StrategyProfile, i: usize) -> Result<f64> {
    game.check_player(i)?;
    let usage = ResourceUsage::new(game, profile)?;
    game.strategy_of(profile, i).iter().map(|&r| game.resources[r].eval(usage.load(r))).sum()
}

/// `Σ_e N_e c_e(N_e)` when everybody participates.
pub fn deterministic_social_cost(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    let usage = ResourceUsage::new(game, profile)?;
    let mut total = 0.0;
    for (r, cost) in game.resources.iter().enumerate() {
        let load = usage.load(r);
        if load > 0 {
            total += load as f64 * cost.eval(load)?;
        }
    }
    Ok(total)
}
