use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::ENUMERATION_LIMIT;
use crate::error::{Error, Result};
use crate::game::{CostFunction, Game, Player};

/// Size and seed of a random affine instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub players: usize,
    pub resources: usize,
    pub max_strategies: usize,
    pub p_range: (f64, f64),
    pub seed: u64,
}

impl RandomSpec {
    fn check(&self) -> Result<()> {
        if self.players == 0 || self.resources == 0 || self.max_strategies == 0 {
            return Err(Error::InvalidParameter(format!(
                "random instance needs at least one player, resource and strategy (got {}, {}, {})",
                self.players, self.resources, self.max_strategies
            )));
        }
        let (lo, hi) = self.p_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidParameter(format!("p range [{lo}, {hi}] must be an interval inside [0, 1]")));
        }
        let profiles = (self.max_strategies as f64).powf(self.players as f64);
        if profiles > ENUMERATION_LIMIT as f64 {
            return Err(Error::TooLarge {
                profiles: (self.max_strategies as u128).saturating_pow(self.players.min(u32::MAX as usize) as u32),
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(())
    }
}

fn nonempty_subset(rng: &mut ChaCha8Rng, resources: usize) -> Vec<usize> {
    loop {
        let subset: Vec<usize> = (0..resources).filter(|_| rng.gen_bool(0.5)).collect();
        if !subset.is_empty() {
            return subset;
        }
    }
}

/// Random game with affine costs `a x + b`, `a, b ~ U[0, 2]`, each player
/// holding between one and `max_strategies` nonempty resource subsets and a
/// probability drawn uniformly from `p_range`. Deterministic in `seed`.
pub fn gen_random(spec: &RandomSpec) -> Result<Game> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let resources =
        (0..spec.resources).map(|_| CostFunction::affine(rng.gen_range(0.0..=2.0), rng.gen_range(0.0..=2.0))).collect();
    let (lo, hi) = spec.p_range;
    let players = (0..spec.players)
        .map(|_| {
            let p = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            let count = rng.gen_range(1..=spec.max_strategies);
            let strategies = (0..count).map(|_| nonempty_subset(&mut rng, spec.resources)).collect();
            Player::new(p, strategies)
        })
        .collect();
    Ok(Game::new(format!("random-{}", spec.seed), resources, players))
}
