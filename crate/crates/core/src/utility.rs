//! Pure-profile utilities, the payoff table, Prelec weighting and the EUT and
//! PT expected utilities of a mixed profile.

use crate::error::{Error, Result};
use crate::model::{Action, ActionProfile, MixedProfile, Scenario};
use crate::power;
use crate::pricing;

/// Largest player count whose `2^K` profiles we are willing to enumerate.
pub const MAX_ENUMERATED_PLAYERS: usize = 20;

/// Utility of `player` under a pure profile: charging cost (including the
/// player's own delivery losses), selling revenue and the quadratic
/// regulation penalty on the generation deviation.
pub fn pure_utility(player: usize, profile: &ActionProfile, scenario: &Scenario) -> Result<f64> {
    let balance = power::generation(profile, scenario)?;
    let customer = scenario.customer(player);
    let grid = scenario.grid();
    let charge = pricing::charging_payment(player, profile, scenario)?;
    let discharge = pricing::discharging_payment(player, profile, scenario.customers());
    let own_losses = match profile.action(player) {
        Action::Charge => grid.loss_model.losses(customer.demand_kwh),
        Action::Discharge => 0.0,
    };
    Ok(-charge * (customer.demand_kwh + own_losses) + discharge * customer.surplus_kwh
        - grid.beta * balance.deviation_kwh.powi(2))
}

/// Per-player utilities for every pure profile, indexed by
/// [`ActionProfile::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    players: usize,
    utilities: Vec<Vec<f64>>,
}

impl PayoffTable {
    /// Builds a table from rows in profile-index order, each row holding one
    /// utility per player.
    pub fn new(players: usize, utilities: Vec<Vec<f64>>) -> Result<Self> {
        if players > MAX_ENUMERATED_PLAYERS {
            return Err(Error::TooManyPlayers {
                players,
                limit: MAX_ENUMERATED_PLAYERS,
            });
        }
        if utilities.len() != 1 << players || utilities.iter().any(|row| row.len() != players) {
            return Err(Error::invalid(
                "payoff_table",
                format!("expected {} rows of {players} utilities", 1usize << players),
            ));
        }
        Ok(PayoffTable { players, utilities })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Number of profiles, `2^players`.
    pub fn len(&self) -> usize {
        self.utilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utilities.is_empty()
    }

    pub fn utilities(&self, profile: &ActionProfile) -> &[f64] {
        &self.utilities[profile.index()]
    }

    pub fn utility(&self, player: usize, profile: &ActionProfile) -> f64 {
        self.utilities[profile.index()][player]
    }

    /// `(profile, utilities)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (ActionProfile, &[f64])> + '_ {
        let players = self.players;
        self.utilities
            .iter()
            .enumerate()
            .map(move |(i, row)| (ActionProfile::from_index(players, i), row.as_slice()))
    }
}

pub fn payoff_table(scenario: &Scenario) -> Result<PayoffTable> {
    let players = scenario.players();
    if players > MAX_ENUMERATED_PLAYERS {
        return Err(Error::TooManyPlayers {
            players,
            limit: MAX_ENUMERATED_PLAYERS,
        });
    }
    let utilities = ActionProfile::enumerate(players)
        .map(|profile| {
            (0..players)
                .map(|k| pure_utility(k, &profile, scenario))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PayoffTable::new(players, utilities)
}

/// Prelec probability weighting `w(σ) = exp(−(−ln σ)^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prelec {
    alpha: f64,
}

impl Prelec {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Prelec { alpha })
        } else {
            Err(Error::Parameter {
                name: "prelec_alpha",
                message: format!("{alpha} outside (0, 1]"),
            })
        }
    }

    /// Identity weighting (`α = 1`).
    pub fn identity() -> Self {
        Prelec { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Weighted probability; extended continuously with `w(0) = 0`, `w(1) = 1`.
    pub fn weight(&self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            0.0
        } else if sigma >= 1.0 {
            1.0
        } else if self.alpha == 1.0 {
            sigma
        } else {
            (-(-sigma.ln()).powf(self.alpha)).exp()
        }
    }

    /// `ln w(σ) = −(−ln σ)^α` for `σ` in (0, 1].
    pub fn ln_weight(&self, sigma: f64) -> f64 {
        -(-sigma.ln()).powf(self.alpha)
    }
}

pub fn prelec_weight(sigma: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::Parameter {
            name: "sigma",
            message: format!("{sigma} outside [0, 1]"),
        });
    }
    Ok(Prelec::new(alpha)?.weight(sigma))
}

/// Objective expected utility of `player` under independent mixing.
pub fn eut_expected_utility(player: usize, mixed: &MixedProfile, table: &PayoffTable) -> f64 {
    table
        .iter()
        .map(|(profile, row)| {
            let weight: f64 = profile
                .actions()
                .iter()
                .enumerate()
                .map(|(l, &a)| mixed.prob(l, a))
                .product();
            weight * row[player]
        })
        .sum()
}

/// Prospect-theoretic expected utility of `player`: opponents' probabilities
/// pass through the weighting, the player's own probability does not.
pub fn pt_expected_utility(
    player: usize,
    mixed: &MixedProfile,
    table: &PayoffTable,
    weighting: Prelec,
) -> f64 {
    table
        .iter()
        .map(|(profile, row)| {
            let weight: f64 = profile
                .actions()
                .iter()
                .enumerate()
                .map(|(l, &a)| {
                    let p = mixed.prob(l, a);
                    if l == player {
                        p
                    } else {
                        weighting.weight(p)
                    }
                })
                .product();
            weight * row[player]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Customer, LossModel};
    use std::f64::consts::E;
    use Action::{Charge as C, Discharge as D};

    fn p(actions: &[Action]) -> ActionProfile {
        ActionProfile::new(actions.to_vec())
    }

    #[test]
    fn reference_pure_utilities() {
        let s = Scenario::reference();
        let u = |a: &[Action]| pure_utility(0, &p(a), &s).unwrap();
        assert!((u(&[C, C]) + 2.0).abs() < 1e-12);
        assert!((u(&[D, C]) + 1.02).abs() < 1e-12);
        assert!((u(&[D, D]) + 3.9).abs() < 1e-12);
        // -0.10 * 20 - 0.0018 * 20^2
        assert!((u(&[C, D]) + 2.72).abs() < 1e-12);
    }

    #[test]
    fn charging_player_pays_for_own_losses() {
        let s = Scenario::reference()
            .with_loss_model(LossModel::LinearFraction { lambda: 0.02 })
            .unwrap();
        let u = pure_utility(0, &ActionProfile::all_charge(2), &s).unwrap();
        assert!((u + 0.10 * 20.0 * 1.02).abs() < 1e-12);
    }

    #[test]
    fn table_shapes() {
        let table = payoff_table(&Scenario::reference()).unwrap();
        assert_eq!(table.len(), 4);
        assert!((table.utility(0, &ActionProfile::all_charge(2)) + 2.0).abs() < 1e-12);

        let grid = Scenario::reference().grid().clone();
        let single = Scenario::new(vec![Customer::new(20.0, 10.0, 0.06)], grid).unwrap();
        assert_eq!(payoff_table(&single).unwrap().len(), 2);
    }

    #[test]
    fn table_size_guard() {
        let grid = Scenario::reference().grid().clone();
        let many = Scenario::from_parts_unchecked(vec![Customer::new(2.0, 1.0, 0.0); 21], grid);
        assert!(matches!(
            payoff_table(&many),
            Err(Error::TooManyPlayers { players: 21, .. })
        ));
        assert!(PayoffTable::new(2, vec![vec![0.0; 2]; 3]).is_err());
    }

    #[test]
    fn symmetric_players_permute() {
        let grid = Scenario::reference().grid().clone();
        let s = Scenario::new(vec![Customer::new(10.0, 4.0, 0.05); 3], grid).unwrap();
        let table = payoff_table(&s).unwrap();
        assert_eq!(table.len(), 8);
        for (profile, row) in table.iter() {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let mut swapped = profile.actions().to_vec();
                swapped.swap(i, j);
                let other = table.utilities(&ActionProfile::new(swapped));
                assert!((row[i] - other[j]).abs() < 1e-12);
                assert!((row[j] - other[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn prelec_special_points() {
        for alpha in [0.1, 0.25, 0.5, 0.9, 1.0] {
            assert_eq!(prelec_weight(0.0, alpha).unwrap(), 0.0);
            assert_eq!(prelec_weight(1.0, alpha).unwrap(), 1.0);
            let inv_e = 1.0 / E;
            assert!((prelec_weight(inv_e, alpha).unwrap() - inv_e).abs() < 1e-12);
        }
        for sigma in [0.01, 0.3, 0.77, 0.999] {
            assert_eq!(prelec_weight(sigma, 1.0).unwrap(), sigma);
        }
        assert!(prelec_weight(0.5, 0.0).is_err());
        assert!(prelec_weight(0.5, 1.01).is_err());
        assert!(prelec_weight(1.5, 0.5).is_err());
    }

    #[test]
    fn eut_point_mass_and_uniform() {
        let table = payoff_table(&Scenario::reference()).unwrap();
        let cc = ActionProfile::all_charge(2);
        let point = MixedProfile::pure(&cc);
        assert_eq!(eut_expected_utility(0, &point, &table), table.utility(0, &cc));

        let uniform = MixedProfile::new(vec![0.5, 0.5]).unwrap();
        for k in 0..2 {
            let mean = table.iter().map(|(_, row)| row[k]).sum::<f64>() / 4.0;
            assert!((eut_expected_utility(k, &uniform, &table) - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn pt_against_charging_opponent() {
        let table = payoff_table(&Scenario::reference()).unwrap();
        let w = Prelec::new(0.25).unwrap();
        let mixed = MixedProfile::new(vec![0.3, 1.0]).unwrap();
        let expected = 0.3 * table.utility(0, &p(&[C, C])) + 0.7 * table.utility(0, &p(&[D, C]));
        assert!((pt_expected_utility(0, &mixed, &table, w) - expected).abs() < 1e-12);
    }

    #[test]
    fn pt_identity_weighting_is_eut() {
        let table = payoff_table(&Scenario::reference()).unwrap();
        let mixed = MixedProfile::new(vec![0.3, 0.7]).unwrap();
        for k in 0..2 {
            assert_eq!(
                pt_expected_utility(k, &mixed, &table, Prelec::identity()),
                eut_expected_utility(k, &mixed, &table)
            );
        }
    }
}
