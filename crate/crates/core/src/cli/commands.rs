use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::format::{human, machine, to_json};
use super::{AnalyzeArgs, BoundArgs, GenerateArgs, OutFormat, ReduceArgs, VerifyArgs};
use super::{DEFAULT_GRID, EXIT_OK, EXIT_VERIFY};
use crate::equilibrium::{analyze as analyze_game, analyze_best_response_only, potential, profiles, AnalysisReport};
use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::instances::{
    analyze_roundabout, game_to_json, gen_random, load_instance, roundabout_m, save_instance, Family, FamilySpec,
    RandomSpec,
};
use crate::smoothness::{bound as bound_at, smoothness_params, smoothness_poa_cap, verify_smoothness, BoundResult};
use crate::stochastic::{expected_player_cost, reduce_heterogeneous};

/// Largest `LHS - RHS` a smoothness grid may show and still certify.
const SMOOTHNESS_TOL: f64 = 1e-9;
/// Largest potential-identity error `verify --potential` accepts.
const POTENTIAL_TOL: f64 = 1e-10;
/// Profiles sampled by `reduce` when the game is too large to enumerate.
const REDUCE_SAMPLES: usize = 1000;

pub(super) enum Failure {
    Core(Error),
    Output(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e)
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn require_p(p: Option<f64>, family: Family) -> Result<f64> {
    p.ok_or_else(|| Error::InvalidParameter(format!("family {family} needs --p")))
}

fn check_unit_p(p: f64) -> Result<f64> {
    if p > 0.0 && p <= 1.0 {
        Ok(p)
    } else {
        Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1]")))
    }
}

fn family_spec(a: &GenerateArgs) -> Result<FamilySpec> {
    Ok(match a.family {
        Family::Pigou => FamilySpec::Pigou { k: a.k, p: require_p(a.p, a.family)? },
        Family::Bypass => FamilySpec::Bypass { k: a.k, p: require_p(a.p, a.family)? },
        Family::Triangle => FamilySpec::Triangle { p: require_p(a.p, a.family)? },
        Family::Roundabout => {
            let p = require_p(a.p, a.family)?;
            FamilySpec::Roundabout { k: a.k, m: a.m.unwrap_or_else(|| roundabout_m(a.k, p)), p }
        }
        Family::Random => FamilySpec::Random(RandomSpec {
            players: a.players,
            resources: a.resources,
            max_strategies: a.max_strategies,
            p_range: a.p.map_or((a.p_min, a.p_max), |p| (p, p)),
            seed: a.seed,
        }),
    })
}

fn strategy_counts(game: &Game) -> String {
    let counts: Vec<String> = game.players.iter().map(|p| p.strategies.len().to_string()).collect();
    format!("[{}]", counts.join(", "))
}

pub(super) fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Outcome {
    let game = family_spec(a)?.generate()?;
    match &a.out {
        Some(path) => {
            save_instance(&game, path)?;
            writeln!(
                out,
                "{}: {} players, {} resources, strategies per player {}",
                game.name,
                game.num_players(),
                game.num_resources(),
                strategy_counts(&game)
            )?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => writeln!(out, "{}", game_to_json(&game))?,
    }
    Ok(EXIT_OK)
}

/// Uniform profiles `(j, j, ..., j)`, with `j` clamped to each player's last
/// strategy.
fn uniform_starts(game: &Game) -> Vec<StrategyProfile> {
    let widest = game.players.iter().map(|p| p.strategies.len()).max().unwrap_or(0);
    (0..widest)
        .map(|j| {
            StrategyProfile::new(game.players.iter().map(|p| j.min(p.strategies.len().saturating_sub(1))).collect())
        })
        .collect()
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    instance: &'a str,
    players: usize,
    resources: usize,
    #[serde(flatten)]
    report: &'a AnalysisReport,
}

pub(super) fn analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Outcome {
    let game = load_instance(&a.input)?;
    let report = if a.best_response_only {
        analyze_best_response_only(&game, a.eps, &uniform_starts(&game), &[], a.max_rounds)?
    } else {
        analyze_game(&game, a.eps)?
    };
    if a.json {
        let doc = AnalyzeOutput {
            instance: &game.name,
            players: game.num_players(),
            resources: game.num_resources(),
            report: &report,
        };
        writeln!(out, "{}", to_json(&doc))?;
        return Ok(EXIT_OK);
    }
    for w in game.warnings() {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "instance      {}", game.name)?;
    writeln!(out, "players       {}", game.num_players())?;
    writeln!(out, "resources     {}", game.num_resources())?;
    writeln!(out, "method        {:?}", report.method)?;
    writeln!(out, "equilibria    {}", report.equilibria.len())?;
    writeln!(out, "optimum       {} at {}", human(report.social_optimum.cost), report.social_optimum.profile)?;
    writeln!(out, "best eq       {} at {}", human(report.best_eq_cost), report.best_equilibrium.profile)?;
    writeln!(out, "worst eq      {} at {}", human(report.worst_eq_cost), report.worst_equilibrium.profile)?;
    writeln!(out, "PoA           {}", human(report.poa))?;
    writeln!(out, "PoS           {}", human(report.pos))?;
    Ok(EXIT_OK)
}

#[derive(Clone, Debug, Serialize)]
struct SweepRow {
    p: f64,
    poa_bound: f64,
    pos_bound: f64,
    lambda: f64,
    mu: f64,
    regime: &'static str,
    y_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance_poa: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance_pos: Option<Option<f64>>,
}

impl SweepRow {
    fn new(b: BoundResult) -> Self {
        SweepRow {
            p: b.p,
            poa_bound: b.poa,
            pos_bound: b.pos,
            lambda: b.lambda,
            mu: b.mu,
            regime: b.regime.name(),
            y_min: b.y_min,
            instance_poa: None,
            instance_pos: None,
        }
    }
}

/// Engine ratios of the family instance at `p`, `None` where the family has
/// no instance (roundabouts whose `m = ⌊zk⌋` does not exceed `k`).
fn family_ratios(family: Family, k: usize, p: f64, eps: f64) -> Result<Option<(f64, f64)>> {
    let report = match family {
        Family::Roundabout => match analyze_roundabout(k, roundabout_m(k, p), p, eps) {
            Err(Error::InvalidParameter(_)) => return Ok(None),
            other => other?,
        },
        Family::Pigou => analyze_game(&FamilySpec::Pigou { k, p }.generate()?, eps)?,
        Family::Bypass => analyze_game(&FamilySpec::Bypass { k, p }.generate()?, eps)?,
        Family::Triangle => analyze_game(&FamilySpec::Triangle { p }.generate()?, eps)?,
        Family::Random => return Err(Error::InvalidParameter("random instances cannot be swept over p".into())),
    };
    Ok(Some((report.poa, report.pos)))
}

fn sweep_row(p: f64, a: &BoundArgs) -> Result<SweepRow> {
    let mut row = SweepRow::new(bound_at(check_unit_p(p)?)?);
    if let Some(family) = a.family {
        let ratios = family_ratios(family, a.k, p, a.eps)?;
        row.instance_poa = Some(ratios.map(|r| r.0));
        row.instance_pos = Some(ratios.map(|r| r.1));
    }
    Ok(row)
}

fn csv_cell(x: Option<Option<f64>>) -> Option<String> {
    x.map(|v| v.map(machine).unwrap_or_default())
}

fn write_csv(rows: &[SweepRow], out: &mut dyn Write) -> io::Result<()> {
    let with_family = rows.first().is_some_and(|r| r.instance_poa.is_some());
    write!(out, "p,poa_bound,pos_bound,lambda,mu,regime,y_min")?;
    if with_family {
        write!(out, ",instance_poa,instance_pos")?;
    }
    writeln!(out)?;
    for r in rows {
        let mut cells = vec![
            machine(r.p),
            machine(r.poa_bound),
            machine(r.pos_bound),
            machine(r.lambda),
            machine(r.mu),
            r.regime.to_owned(),
            machine(r.y_min),
        ];
        cells.extend(csv_cell(r.instance_poa));
        cells.extend(csv_cell(r.instance_pos));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub(super) fn bound(a: &BoundArgs, out: &mut dyn Write) -> Outcome {
    if a.family == Some(Family::Random) {
        return Err(Error::InvalidParameter("random instances cannot be swept over p".into()).into());
    }
    let rows = match a.p {
        Some(p) => vec![sweep_row(p, a)?],
        None => {
            let n = a.grid.unwrap_or(DEFAULT_GRID);
            if n < 2 {
                return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {n}")).into());
            }
            (1..=n)
                .into_par_iter()
                .map(|j| sweep_row(if j == n { 1.0 } else { j as f64 / n as f64 }, a))
                .collect::<Result<Vec<_>>>()?
        }
    };
    match a.out {
        OutFormat::Csv => write_csv(&rows, out)?,
        OutFormat::Json => writeln!(out, "{}", to_json(&rows))?,
    }
    Ok(EXIT_OK)
}

pub(super) fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    if a.potential {
        return verify_potential(a.seed, a.trials, out);
    }
    let p = check_unit_p(a.p.expect("clap requires --p without --potential"))?;
    let (lambda0, mu0) = smoothness_params(p)?;
    let (lambda, mu) = (a.lambda.unwrap_or(lambda0), a.mu.unwrap_or(mu0));
    let check = verify_smoothness(p, lambda, mu, a.kmax, a.mmax);
    writeln!(out, "p               {}", human(p))?;
    writeln!(out, "lambda          {}", machine(lambda))?;
    writeln!(out, "mu              {}", machine(mu))?;
    if let Ok(cap) = smoothness_poa_cap(lambda, mu) {
        writeln!(out, "lambda/(1-mu)   {}", machine(cap))?;
    }
    writeln!(out, "grid            k <= {}, m <= {}", a.kmax, a.mmax)?;
    let (k, m) = check.worst_pair;
    writeln!(out, "worst violation {} at (k, m) = ({k}, {m})", human(check.worst_violation))?;
    if check.certified(SMOOTHNESS_TOL) {
        writeln!(out, "certified")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "FAILED: k(1+mp) exceeds the smoothness bound at (k, m) = ({k}, {m})")?;
        Ok(EXIT_VERIFY)
    }
}

struct Deviation {
    error: f64,
    trial: usize,
    profile: StrategyProfile,
    player: usize,
    to: usize,
}

/// Largest `|Φ(s') − Φ(s) − (C_i(s') − C_i(s))|` over every profile and
/// unilateral deviation of `game`.
fn worst_deviation(game: &Game, trial: usize) -> Result<Option<Deviation>> {
    let mut worst: Option<Deviation> = None;
    for profile in profiles(game)? {
        let phi = potential(game, &profile)?;
        for (i, player) in game.players.iter().enumerate() {
            let cost = expected_player_cost(game, &profile, i)?;
            for t in (0..player.strategies.len()).filter(|&t| t != profile.0[i]) {
                let moved = profile.with_choice(i, t);
                let d_phi = potential(game, &moved)? - phi;
                let d_cost = expected_player_cost(game, &moved, i)? - cost;
                let error = (d_phi - d_cost).abs();
                if worst.as_ref().is_none_or(|w| error > w.error) {
                    worst = Some(Deviation { error, trial, profile: profile.clone(), player: i, to: t });
                }
            }
        }
    }
    Ok(worst)
}

/// Random instance number `trial` of the potential check: up to 4 players,
/// 4 resources and 3 strategies, heterogeneous probabilities.
pub(crate) fn potential_trial_spec(rng: &mut ChaCha8Rng) -> RandomSpec {
    RandomSpec {
        players: rng.gen_range(1..=4),
        resources: rng.gen_range(1..=4),
        max_strategies: rng.gen_range(1..=3),
        p_range: (0.0, 1.0),
        seed: rng.gen(),
    }
}

fn verify_potential(seed: u64, trials: usize, out: &mut dyn Write) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<RandomSpec> = (0..trials).map(|_| potential_trial_spec(&mut rng)).collect();
    let results = specs
        .par_iter()
        .enumerate()
        .map(|(trial, spec)| worst_deviation(&gen_random(spec)?, trial))
        .collect::<Result<Vec<_>>>()?;
    let deviations = results.iter().flatten().count();
    let worst = results.into_iter().flatten().reduce(|a, b| if b.error > a.error { b } else { a });
    writeln!(out, "trials          {trials} (seed {seed})")?;
    let Some(w) = worst else {
        writeln!(out, "no unilateral deviations to check")?;
        return Ok(EXIT_OK);
    };
    writeln!(out, "instances with deviations {deviations}")?;
    writeln!(
        out,
        "max identity error {} (trial {}, profile {}, player {} -> strategy {})",
        human(w.error),
        w.trial,
        w.profile,
        w.player,
        w.to
    )?;
    if w.error <= POTENTIAL_TOL {
        writeln!(out, "exact potential verified")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "FAILED: potential identity error above {}", human(POTENTIAL_TOL))?;
        Ok(EXIT_VERIFY)
    }
}

/// Profiles on which `reduce` compares costs: all of them when the game can
/// be enumerated, otherwise a fixed-seed sample.
fn comparison_profiles(game: &Game) -> Result<Vec<StrategyProfile>> {
    match profiles(game) {
        Ok(all) => Ok(all.collect()),
        Err(Error::TooLarge { .. }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            Ok((0..REDUCE_SAMPLES)
                .map(|_| {
                    StrategyProfile::new(game.players.iter().map(|p| rng.gen_range(0..p.strategies.len())).collect())
                })
                .collect())
        }
        Err(e) => Err(e),
    }
}

pub(super) fn reduce(a: &ReduceArgs, out: &mut dyn Write) -> Outcome {
    let game = load_instance(&a.input)?;
    let reduced = reduce_heterogeneous(&game, a.q)?;
    save_instance(&reduced.game, &a.out)?;
    let sample = comparison_profiles(&game)?;
    let mut discrepancy: f64 = 0.0;
    for profile in &sample {
        for i in 0..game.num_players() {
            let original = expected_player_cost(&game, profile, i)?;
            let transformed = expected_player_cost(&reduced.game, profile, i)?;
            discrepancy = discrepancy.max((original - transformed).abs());
        }
    }
    writeln!(out, "q                {}", machine(reduced.q))?;
    writeln!(out, "profiles checked {}", sample.len())?;
    writeln!(out, "max discrepancy  {}", human(discrepancy))?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(EXIT_OK)
}
