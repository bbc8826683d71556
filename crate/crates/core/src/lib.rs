//! Atomic congestion games with Bernoulli participation.
//!
//! Each player is active independently with her own probability and pays
//! nothing when inactive. The crate computes exact expected costs, the
//! expected Rosenthal potential, Bayesian-Nash equilibria and social optima
//! by enumeration, closed-form price of anarchy / stability bounds as a
//! function of the participation probability, and (λ, μ)-smoothness
//! certificates, plus generators for the instance families that make those
//! bounds tight.

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod instances;
pub mod smoothness;
pub mod stochastic;

pub use equilibrium::{
    analyze, analyze_best_response_only, best_response_dynamics, enumerate_equilibria, is_equilibrium, potential,
    profiles, social_optimum, AnalysisReport, CostedProfile, Method, DEFAULT_EPS, ENUMERATION_LIMIT,
};
pub use error::{Error, Result};
pub use game::{CostFunction, Game, Location, Player, ResourceUsage, StrategyProfile, Violation};
pub use smoothness::{bound, p_bar1, poa_bound, pos_bound, smoothness_params, verify_smoothness, BoundResult, Regime};
pub use stochastic::{
    expected_player_cost, expected_social_cost, homogeneous_transform, poisson_binomial, reduce_heterogeneous,
    LoadDistribution, ReducedGame,
};
