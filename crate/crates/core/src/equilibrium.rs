//! Proper mixed equilibria of the two-player game.
//!
//! At a proper equilibrium each player is indifferent between charging and
//! discharging given the opponent's mix, so each player's own payoffs pin down
//! the *opponent's* charge probability. Under EUT this is a closed form; under
//! PT the opponent's probability enters through the Prelec weights and the
//! indifference condition becomes
//!
//! ```text
//! w(q) / w(1 - q) = (u(D,D) - u(C,D)) / (u(C,C) - u(D,C))
//! ```
//!
//! (own action first, `C` = charge, `D` = discharge). The left side is
//! continuous and strictly increasing in `q`, so it is solved by bisection
//! on its logarithm.

use std::fmt;

use crate::bisection::Bisection;
use crate::error::{Error, Result};
use crate::model::{Action, ActionProfile, EquilibriumResult, MixedProfile, Scenario, Theory};
use crate::pricing;
use crate::utility::{self, PayoffTable, Prelec};

/// Deviation gain below which an equilibrium counts as confirmed.
pub const CONFIRMATION_TOLERANCE: f64 = 1e-8;

/// Open interval on which the PT indifference equation is bracketed.
pub const PT_BRACKET_EPSILON: f64 = 1e-15;

/// Largest indifference residual a solver may return.
pub const MAX_INDIFFERENCE_RESIDUAL: f64 = 1e-9;

/// Existence bounds for one player: a proper equilibrium needs
/// `lower < value < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayerBounds {
    /// `−c(C,C)·D_k + β(D_k + S_k)²`
    pub lower: f64,
    /// `−c(k charges, other discharges)·D_k + β(D_k + S_k)² + 2β·Π(D_l + S_l)`
    pub upper: f64,
    /// `b_k·S_k`
    pub value: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub players: Vec<PlayerBounds>,
}

impl ExistenceReport {
    pub fn all_satisfied(&self) -> bool {
        self.players.iter().all(|p| p.satisfied)
    }

    pub fn satisfied(&self) -> Vec<bool> {
        self.players.iter().map(|p| p.satisfied).collect()
    }
}

impl fmt::Display for ExistenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.players.iter().enumerate() {
            writeln!(
                f,
                "player {}: {:.6} < b*S = {:.6} < {:.6} ... {}",
                k + 1,
                p.lower,
                p.value,
                p.upper,
                if p.satisfied { "satisfied" } else { "violated" }
            )?;
        }
        Ok(())
    }
}

/// Evaluates the existence condition for both players of a two-player game.
pub fn check_existence(scenario: &Scenario) -> Result<ExistenceReport> {
    scenario.require_players(2)?;
    let beta = scenario.grid().beta;
    let swing_product: f64 = scenario.customers().iter().map(|c| c.swing_kwh()).product();
    let all_charge = ActionProfile::all_charge(2);
    let price_all = pricing::profile_price(&all_charge, scenario)?;

    let players = (0..2)
        .map(|k| {
            let c = scenario.customer(k);
            let split = ActionProfile::all_charge(2).with_action(1 - k, Action::Discharge);
            let price_split = pricing::profile_price(&split, scenario)?;
            let penalty = beta * c.swing_kwh().powi(2);
            let lower = -price_all * c.demand_kwh + penalty;
            let upper = -price_split * c.demand_kwh + penalty + 2.0 * beta * swing_product;
            let value = c.sell_price * c.surplus_kwh;
            Ok(PlayerBounds {
                lower,
                upper,
                value,
                satisfied: lower < value && value < upper,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExistenceReport { players })
}

/// One player's payoffs in a 2x2 game, keyed (own action, opponent action).
#[derive(Debug, Clone, Copy)]
struct Payoffs2x2 {
    cc: f64,
    cd: f64,
    dc: f64,
    dd: f64,
}

impl Payoffs2x2 {
    fn of(table: &PayoffTable, player: usize) -> Self {
        let opponent = 1 - player;
        let at = |own: Action, other: Action| {
            let mut actions = vec![Action::Charge; 2];
            actions[player] = own;
            actions[opponent] = other;
            table.utility(player, &ActionProfile::new(actions))
        };
        Payoffs2x2 {
            cc: at(Action::Charge, Action::Charge),
            cd: at(Action::Charge, Action::Discharge),
            dc: at(Action::Discharge, Action::Charge),
            dd: at(Action::Discharge, Action::Discharge),
        }
    }

    /// Right-hand side of the indifference condition.
    fn ratio(&self) -> f64 {
        (self.dd - self.cd) / (self.cc - self.dc)
    }
}

fn proper_ratio(theory: Theory, player: usize, payoffs: &Payoffs2x2) -> Result<f64> {
    let ratio = payoffs.ratio();
    if ratio.is_finite() && ratio > 0.0 {
        Ok(ratio)
    } else {
        Err(Error::NoProperIndifference {
            theory,
            player: player + 1,
            ratio,
        })
    }
}

fn existing(scenario: &Scenario) -> Result<ExistenceReport> {
    let report = check_existence(scenario)?;
    if report.all_satisfied() {
        Ok(report)
    } else {
        Err(Error::NoProperEquilibrium {
            report: Box::new(report),
        })
    }
}

/// EUT equilibrium from the closed-form indifference solution.
pub fn solve_eut(scenario: &Scenario) -> Result<EquilibriumResult> {
    let report = existing(scenario)?;
    let table = utility::payoff_table(scenario)?;

    let mut probs = [0.0; 2];
    for player in 0..2 {
        let u = Payoffs2x2::of(&table, player);
        let denominator = (u.cc - u.dc) + (u.dd - u.cd);
        if denominator == 0.0 {
            return Err(Error::DegenerateGame { player: player + 1 });
        }
        proper_ratio(Theory::Eut, player, &u)?;
        probs[1 - player] = (u.dd - u.cd) / denominator;
    }
    finish(Theory::Eut, probs, &table, Prelec::identity(), report)
}

/// PT equilibrium: each player's weighted indifference condition is solved
/// for the opponent's charge probability by bisection.
pub fn solve_pt(scenario: &Scenario) -> Result<EquilibriumResult> {
    let report = existing(scenario)?;
    let table = utility::payoff_table(scenario)?;
    let weighting = Prelec::new(scenario.grid().prelec_alpha)?;

    let mut probs = [0.0; 2];
    for player in 0..2 {
        let u = Payoffs2x2::of(&table, player);
        let ratio = proper_ratio(Theory::Pt, player, &u)?;
        probs[1 - player] = solve_weighted_odds(weighting, ratio)?;
    }
    finish(Theory::Pt, probs, &table, weighting, report)
}

/// Solves `w(q) / w(1 − q) = ratio` for `q` in (0, 1).
pub fn solve_weighted_odds(weighting: Prelec, ratio: f64) -> Result<f64> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::Numeric(format!("weighted odds ratio {ratio} must be positive")));
    }
    let target = ratio.ln();
    let log_odds = |q: f64| weighting.ln_weight(q) - weighting.ln_weight(1.0 - q) - target;
    // roots can sit within 1e-10 of 0 or 1, so bisect down to adjacent doubles
    let bisection = Bisection {
        tolerance: 0.0,
        ..Bisection::default()
    };
    bisection
        .solve(log_odds, PT_BRACKET_EPSILON, 1.0 - PT_BRACKET_EPSILON)
        .map_err(|_| {
            Error::Numeric(format!(
                "weighted odds {ratio} not reachable within ({PT_BRACKET_EPSILON}, 1 - {PT_BRACKET_EPSILON})"
            ))
        })
}

fn finish(
    theory: Theory,
    probs: [f64; 2],
    table: &PayoffTable,
    weighting: Prelec,
    report: ExistenceReport,
) -> Result<EquilibriumResult> {
    let mixed = MixedProfile::new(probs.to_vec())?;
    let indifference_residuals: Vec<f64> = (0..2)
        .map(|k| indifference_residual(k, &mixed, table, theory, weighting))
        .collect();
    if let Some(worst) = indifference_residuals
        .iter()
        .copied()
        .find(|r| r.is_nan() || r.abs() >= MAX_INDIFFERENCE_RESIDUAL)
    {
        return Err(Error::Numeric(format!(
            "{theory} equilibrium {:?} not resolvable in double precision (indifference residual {worst:e})",
            mixed.probabilities()
        )));
    }
    Ok(EquilibriumResult {
        is_proper: mixed.is_proper(),
        mixed,
        theory,
        indifference_residuals,
        existence_satisfied: report.satisfied(),
    })
}

/// Expected utility of `player` under the given theory.
pub fn expected_utility(
    player: usize,
    mixed: &MixedProfile,
    table: &PayoffTable,
    theory: Theory,
    weighting: Prelec,
) -> f64 {
    match theory {
        Theory::Eut => utility::eut_expected_utility(player, mixed, table),
        Theory::Pt => utility::pt_expected_utility(player, mixed, table, weighting),
    }
}

/// Pure Charge minus pure Discharge expected utility for `player` against the
/// others' mix.
pub fn indifference_residual(
    player: usize,
    mixed: &MixedProfile,
    table: &PayoffTable,
    theory: Theory,
    weighting: Prelec,
) -> f64 {
    let charge = mixed.with_pure_action(player, Action::Charge);
    let discharge = mixed.with_pure_action(player, Action::Discharge);
    expected_utility(player, &charge, table, theory, weighting)
        - expected_utility(player, &discharge, table, theory, weighting)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Best unilateral gain found per player (non-negative when the grid
    /// contains the equilibrium probability's utility or better).
    pub max_gain: Vec<f64>,
    /// Charge probability achieving the best gain, per player.
    pub best_deviation: Vec<f64>,
    pub confirmed: bool,
}

/// Scans unilateral deviations on an evenly spaced probability grid with
/// `resolution` points (including 0 and 1).
pub fn verify_equilibrium(
    result: &EquilibriumResult,
    scenario: &Scenario,
    resolution: usize,
) -> Result<VerificationReport> {
    scenario.require_players(2)?;
    if resolution < 2 {
        return Err(Error::Parameter {
            name: "grid_resolution",
            message: format!("{resolution} < 2"),
        });
    }
    if result.mixed.len() != 2 {
        return Err(Error::ProfileLength {
            expected: 2,
            got: result.mixed.len(),
        });
    }
    let table = utility::payoff_table(scenario)?;
    let weighting = match result.theory {
        Theory::Eut => Prelec::identity(),
        Theory::Pt => Prelec::new(scenario.grid().prelec_alpha)?,
    };

    let mut max_gain = Vec::with_capacity(2);
    let mut best_deviation = Vec::with_capacity(2);
    for player in 0..2 {
        let base = expected_utility(player, &result.mixed, &table, result.theory, weighting);
        let (best_q, gain) = (0..resolution)
            .map(|i| {
                let q = i as f64 / (resolution - 1) as f64;
                let deviated = result.mixed.with_probability(player, q)?;
                let u = expected_utility(player, &deviated, &table, result.theory, weighting);
                Ok((q, u - base))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold((0.0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        max_gain.push(gain);
        best_deviation.push(best_q);
    }
    let confirmed = max_gain.iter().all(|&g| g < CONFIRMATION_TOLERANCE);
    Ok(VerificationReport {
        max_gain,
        best_deviation,
        confirmed,
    })
}

/// Pure profiles where no player gains by flipping its own action.
pub fn enumerate_pure_nash(scenario: &Scenario) -> Result<Vec<ActionProfile>> {
    let table = utility::payoff_table(scenario)?;
    Ok(table
        .iter()
        .filter(|(profile, row)| {
            (0..profile.len()).all(|k| {
                let flipped = profile.with_action(k, profile.action(k).flipped());
                table.utility(k, &flipped) <= row[k]
            })
        })
        .map(|(profile, _)| profile)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Customer;

    #[test]
    fn reference_bounds() {
        let report = check_existence(&Scenario::reference()).unwrap();
        let p1 = report.players[0];
        assert!((p1.lower + 0.38).abs() < 1e-12);
        assert!((p1.upper - 1.78).abs() < 1e-12);
        assert!((p1.value - 0.6).abs() < 1e-12);
        let p2 = report.players[1];
        assert!((p2.lower + 0.78).abs() < 1e-12);
        assert!((p2.upper - 1.38).abs() < 1e-12);
        assert!(report.all_satisfied());
    }

    #[test]
    fn high_sell_price_violates_existence() {
        let s = Scenario::reference().with_sell_prices(&[0.20, 0.06]).unwrap();
        let report = check_existence(&s).unwrap();
        assert_eq!(report.satisfied(), vec![false, true]);
        match solve_eut(&s) {
            Err(Error::NoProperEquilibrium { report }) => assert!(!report.players[0].satisfied),
            other => panic!("{other:?}"),
        }
        assert!(matches!(solve_pt(&s), Err(Error::NoProperEquilibrium { .. })));
    }

    #[test]
    fn requires_two_players() {
        let grid = Scenario::reference().grid().clone();
        let s = Scenario::new(vec![Customer::new(20.0, 10.0, 0.06)], grid).unwrap();
        assert!(matches!(
            check_existence(&s),
            Err(Error::UnsupportedPlayerCount { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn reference_eut_solution() {
        let r = solve_eut(&Scenario::reference()).unwrap();
        assert!(r.is_proper);
        assert_eq!(r.theory, Theory::Eut);
        // player 1 indifference: p2 = (-3.9 + 2.72) / (-0.98 - 1.18)
        assert!((r.mixed.charge_probability(1) - 1.18 / 2.16).abs() < 1e-12);
        assert!(r.indifference_residuals.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn symmetric_players_mix_equally() {
        let grid = Scenario::reference().grid().clone();
        let s = Scenario::new(vec![Customer::new(18.0, 6.0, 0.05); 2], grid).unwrap();
        for r in [solve_eut(&s).unwrap(), solve_pt(&s).unwrap()] {
            let p = r.mixed.probabilities();
            assert!((p[0] - p[1]).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn unit_ratio_gives_half_for_any_alpha() {
        for alpha in [0.1, 0.25, 0.6, 1.0] {
            let q = solve_weighted_odds(Prelec::new(alpha).unwrap(), 1.0).unwrap();
            assert!((q - 0.5).abs() < 1e-12, "{alpha}: {q}");
        }
    }

    #[test]
    fn weighted_odds_rejects_non_positive_ratio() {
        assert!(solve_weighted_odds(Prelec::identity(), 0.0).is_err());
        assert!(solve_weighted_odds(Prelec::identity(), -2.0).is_err());
    }

    #[test]
    fn perturbed_solution_not_confirmed() {
        let s = Scenario::reference();
        let mut r = solve_eut(&s).unwrap();
        assert!(verify_equilibrium(&r, &s, 101).unwrap().confirmed);
        let p1 = r.mixed.charge_probability(0);
        r.mixed = r.mixed.with_probability(0, p1 + 0.1).unwrap();
        let report = verify_equilibrium(&r, &s, 101).unwrap();
        assert!(!report.confirmed);
        assert!(report.max_gain[1] > CONFIRMATION_TOLERANCE);
    }

    #[test]
    fn verification_grid_must_have_two_points() {
        let s = Scenario::reference();
        let r = solve_eut(&s).unwrap();
        assert!(verify_equilibrium(&r, &s, 1).is_err());
    }

    #[test]
    fn reference_game_is_anti_coordination() {
        // each player's best reply is the opposite of the opponent's action,
        // so only the two split profiles are stable
        let nash = enumerate_pure_nash(&Scenario::reference()).unwrap();
        let split = |first: Action| ActionProfile::new(vec![first, first.flipped()]);
        assert_eq!(nash, vec![split(Action::Charge), split(Action::Discharge)]);
    }

    #[test]
    fn pure_nash_at_extreme_payoffs() {
        let (customers, grid) = Scenario::reference().into_parts();
        // negligible penalty, very profitable selling: everyone discharges
        let sellers: Vec<Customer> = customers
            .iter()
            .map(|c| Customer { sell_price: 10.0, ..*c })
            .collect();
        let s = Scenario::from_parts_unchecked(sellers, crate::model::GridConfig { beta: 0.0, ..grid.clone() });
        let nash = enumerate_pure_nash(&s).unwrap();
        assert_eq!(nash, vec![ActionProfile::new(vec![Action::Discharge; 2])]);

        // free selling with a penalty that outweighs the charging bill
        let free: Vec<Customer> = customers
            .iter()
            .map(|c| Customer { sell_price: 0.0, ..*c })
            .collect();
        let s = Scenario::new(free, crate::model::GridConfig { beta: 0.01, ..grid }).unwrap();
        assert_eq!(enumerate_pure_nash(&s).unwrap(), vec![ActionProfile::all_charge(2)]);
    }
}
