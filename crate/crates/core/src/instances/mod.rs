//! Instance generators: the four tight families, random test corpora, and
//! the JSON instance format.

mod families;
mod io;
mod random;

use std::fmt;
use std::str::FromStr;

pub use families::{
    analyze_roundabout, gen_bypass, gen_pigou, gen_roundabout, gen_triangle, pigou_ratio, roundabout_gamma,
    roundabout_m, roundabout_ratio, triangle_ratio, ROUNDABOUT_EXHAUSTIVE_PLAYERS,
};
pub use io::{game_from_json, game_to_json, load_instance, save_instance};
pub use random::{gen_random, RandomSpec};

use crate::error::{Error, Result};
use crate::game::Game;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Pigou,
    Bypass,
    Roundabout,
    Triangle,
    Random,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Pigou, Family::Bypass, Family::Roundabout, Family::Triangle, Family::Random];

    pub fn name(self) -> &'static str {
        match self {
            Family::Pigou => "pigou",
            Family::Bypass => "bypass",
            Family::Roundabout => "roundabout",
            Family::Triangle => "triangle",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }
}

/// Parameters of one generated instance.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Pigou { k: usize, p: f64 },
    Bypass { k: usize, p: f64 },
    Roundabout { k: usize, m: usize, p: f64 },
    Triangle { p: f64 },
    Random(RandomSpec),
}

impl FamilySpec {
    pub fn family(&self) -> Family {
        match self {
            FamilySpec::Pigou { .. } => Family::Pigou,
            FamilySpec::Bypass { .. } => Family::Bypass,
            FamilySpec::Roundabout { .. } => Family::Roundabout,
            FamilySpec::Triangle { .. } => Family::Triangle,
            FamilySpec::Random(_) => Family::Random,
        }
    }

    pub fn generate(&self) -> Result<Game> {
        match *self {
            FamilySpec::Pigou { k, p } => gen_pigou(k, p),
            FamilySpec::Bypass { k, p } => gen_bypass(k, p),
            FamilySpec::Roundabout { k, m, p } => gen_roundabout(k, m, p),
            FamilySpec::Triangle { p } => gen_triangle(p),
            FamilySpec::Random(ref spec) => gen_random(spec),
        }
    }

    /// The family's closed-form equilibrium-to-optimum ratio, a lower bound
    /// on the instance's price of anarchy. `None` for random instances.
    pub fn lower_bound_ratio(&self) -> Option<f64> {
        match *self {
            FamilySpec::Pigou { k, p } | FamilySpec::Bypass { k, p } => Some(pigou_ratio(k, p)),
            FamilySpec::Roundabout { k, m, p } => Some(roundabout_ratio(k, m, p)),
            FamilySpec::Triangle { p } => Some(triangle_ratio(p)),
            FamilySpec::Random(_) => None,
        }
    }
}

pub(crate) fn check_family_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("participation probability p = {p} must lie in (0, 1]")))
    }
}
