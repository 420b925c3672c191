//! Domain types shared by the solver modules and validation of scenario inputs.
//!
//! Energies are in kWh and prices in currency per kWh. Generation (kW over a
//! one-hour epoch) is numerically equal to energy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit (exclusive) on the loss fraction of [`LossModel::LinearFraction`].
pub const MAX_LOSS_FRACTION: f64 = 0.1;

/// One active customer owning a storage unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    /// Energy bought from the grid when charging.
    pub demand_kwh: f64,
    /// Stored energy sold to the grid when discharging.
    pub surplus_kwh: f64,
    /// Unit price asked for discharged energy.
    pub sell_price: f64,
}

impl Customer {
    pub fn new(demand_kwh: f64, surplus_kwh: f64, sell_price: f64) -> Self {
        Customer {
            demand_kwh,
            surplus_kwh,
            sell_price,
        }
    }

    /// Swing in generation between the player charging and discharging.
    pub fn swing_kwh(&self) -> f64 {
        self.demand_kwh + self.surplus_kwh
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    pub threshold_kwh: f64,
    pub unit_price: f64,
}

/// Step-function LMP price as a function of total company generation.
///
/// Tier `i` applies when `threshold[i] < G <= threshold[i + 1]`; the first
/// tier also covers everything at or below the second threshold and the last
/// tier is open-ended. A generation level that lands exactly on a threshold is
/// therefore priced by the lower tier (200 kWh is "at most 200").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingScheme {
    tiers: Vec<Tier>,
}

impl PricingScheme {
    pub fn new(tiers: Vec<Tier>) -> Result<Self> {
        let scheme = PricingScheme { tiers };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Builds a scheme from `(threshold, price)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(threshold_kwh, unit_price)| Tier {
                    threshold_kwh,
                    unit_price,
                })
                .collect(),
        )
    }

    /// The four-tier ladder: $0.05 up to 200 kWh, $0.10 to 250, $0.15 to 300,
    /// $0.20 above.
    pub fn standard_lmp() -> Self {
        PricingScheme {
            tiers: vec![
                Tier { threshold_kwh: 0.0, unit_price: 0.05 },
                Tier { threshold_kwh: 200.0, unit_price: 0.10 },
                Tier { threshold_kwh: 250.0, unit_price: 0.15 },
                Tier { threshold_kwh: 300.0, unit_price: 0.20 },
            ],
        }
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.tiers
    }

    pub fn min_price(&self) -> f64 {
        // prices are non-decreasing, so the first tier is the cheapest
        self.tiers[0].unit_price
    }

    /// Unit price at the given generation level.
    pub fn price_at(&self, generation_kwh: f64) -> f64 {
        let idx = self
            .tiers
            .iter()
            .rposition(|t| t.threshold_kwh < generation_kwh)
            .unwrap_or(0);
        self.tiers[idx].unit_price
    }

    /// Shifts every tier price by the same amount so the cheapest tier costs
    /// `base_price`.
    pub fn with_base_price(&self, base_price: f64) -> Result<Self> {
        let shift = base_price - self.min_price();
        Self::new(
            self.tiers
                .iter()
                .map(|t| Tier {
                    threshold_kwh: t.threshold_kwh,
                    unit_price: t.unit_price + shift,
                })
                .collect(),
        )
    }

    fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(Error::invalid("tiers", "at least one pricing tier is required"));
        }
        for (i, t) in self.tiers.iter().enumerate() {
            if !t.threshold_kwh.is_finite() {
                return Err(Error::invalid(
                    format!("tiers[{i}].threshold"),
                    "threshold must be finite",
                ));
            }
            if !t.unit_price.is_finite() || t.unit_price < 0.0 {
                return Err(Error::invalid(
                    format!("tiers[{i}].price"),
                    "price must be finite and >= 0",
                ));
            }
        }
        for (i, pair) in self.tiers.windows(2).enumerate() {
            if pair[1].threshold_kwh <= pair[0].threshold_kwh {
                return Err(Error::invalid(
                    format!("tiers[{}].threshold", i + 1),
                    "thresholds must be strictly increasing",
                ));
            }
            if pair[1].unit_price < pair[0].unit_price {
                return Err(Error::invalid(
                    format!("tiers[{}].price", i + 1),
                    "prices must be non-decreasing",
                ));
            }
        }
        Ok(())
    }
}

/// Line losses incurred while serving charging demand.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossModel {
    #[default]
    Zero,
    /// Losses equal `lambda` times the charging demand served (background
    /// load included).
    LinearFraction { lambda: f64 },
}

impl LossModel {
    pub fn fraction(&self) -> f64 {
        match *self {
            LossModel::Zero => 0.0,
            LossModel::LinearFraction { lambda } => lambda,
        }
    }

    /// Losses for delivering `served_kwh` of demand.
    pub fn losses(&self, served_kwh: f64) -> f64 {
        self.fraction() * served_kwh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Constant demand of non-participating customers.
    pub background_load_kwh: f64,
    /// Regulation penalty per kWh² of generation deviation.
    pub beta: f64,
    /// Cap on customer selling prices, if the company imposes one.
    pub price_cap: Option<f64>,
    pub pricing: PricingScheme,
    pub loss_model: LossModel,
    /// Prelec weighting parameter in (0, 1].
    pub prelec_alpha: f64,
}

/// A player's pure action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Buy the demand from the grid.
    Charge,
    /// Sell the stored surplus to the grid.
    Discharge,
}

impl Action {
    pub fn flipped(self) -> Self {
        match self {
            Action::Charge => Action::Discharge,
            Action::Discharge => Action::Charge,
        }
    }
}

/// A pure joint action, one entry per active customer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionProfile(Vec<Action>);

impl ActionProfile {
    pub fn new(actions: Vec<Action>) -> Self {
        ActionProfile(actions)
    }

    pub fn all_charge(players: usize) -> Self {
        ActionProfile(vec![Action::Charge; players])
    }

    /// Decodes a profile index: bit `k` set means player `k` charges.
    pub fn from_index(players: usize, index: usize) -> Self {
        ActionProfile(
            (0..players)
                .map(|k| {
                    if index >> k & 1 == 1 {
                        Action::Charge
                    } else {
                        Action::Discharge
                    }
                })
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == Action::Charge)
            .fold(0, |acc, (k, _)| acc | 1 << k)
    }

    /// All `2^players` profiles in index order.
    pub fn enumerate(players: usize) -> impl Iterator<Item = ActionProfile> {
        (0..1usize << players).map(move |i| ActionProfile::from_index(players, i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn action(&self, player: usize) -> Action {
        self.0[player]
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    /// The same profile with `player`'s action replaced.
    pub fn with_action(&self, player: usize, action: Action) -> Self {
        let mut actions = self.0.clone();
        actions[player] = action;
        ActionProfile(actions)
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|a| match a {
                Action::Charge => "C",
                Action::Discharge => "D",
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Per-player probability of charging.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile(Vec<f64>);

impl MixedProfile {
    pub fn new(charge_probabilities: Vec<f64>) -> Result<Self> {
        for (k, &p) in charge_probabilities.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(
                    format!("mixed[{k}]"),
                    format!("charge probability {p} outside [0, 1]"),
                ));
            }
        }
        Ok(MixedProfile(charge_probabilities))
    }

    /// Point mass on a pure profile.
    pub fn pure(profile: &ActionProfile) -> Self {
        MixedProfile(
            profile
                .actions()
                .iter()
                .map(|a| if *a == Action::Charge { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn charge_probability(&self, player: usize) -> f64 {
        self.0[player]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    /// Probability that `player` plays `action`.
    pub fn prob(&self, player: usize, action: Action) -> f64 {
        match action {
            Action::Charge => self.0[player],
            Action::Discharge => 1.0 - self.0[player],
        }
    }

    /// The profile with one player's charge probability replaced.
    pub fn with_probability(&self, player: usize, p: f64) -> Result<Self> {
        let mut probs = self.0.clone();
        probs[player] = p;
        MixedProfile::new(probs)
    }

    /// The profile with `player` committed to a pure action.
    pub fn with_pure_action(&self, player: usize, action: Action) -> Self {
        let mut probs = self.0.clone();
        probs[player] = match action {
            Action::Charge => 1.0,
            Action::Discharge => 0.0,
        };
        MixedProfile(probs)
    }

    /// Every player strictly mixes.
    pub fn is_proper(&self) -> bool {
        self.0.iter().all(|&p| p > 0.0 && p < 1.0)
    }
}

/// Decision model used to evaluate mixed strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theory {
    /// Expected utility theory: objective probabilities.
    Eut,
    /// Prospect theory: opponents' probabilities seen through Prelec weighting.
    Pt,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Eut => "EUT",
            Theory::Pt => "PT",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub mixed: MixedProfile,
    pub theory: Theory,
    /// Per player: expected utility of pure Charge minus pure Discharge
    /// against the opponents' equilibrium mix.
    pub indifference_residuals: Vec<f64>,
    pub existence_satisfied: Vec<bool>,
    pub is_proper: bool,
}

/// A set of customers plus grid configuration that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    customers: Vec<Customer>,
    grid: GridConfig,
}

impl Scenario {
    pub fn new(customers: Vec<Customer>, grid: GridConfig) -> Result<Self> {
        validate_scenario(customers, grid)
    }

    /// Assembles a scenario without checking invariants. Only for probing the
    /// model outside its valid domain (negative prices, zero penalty, ...).
    pub fn from_parts_unchecked(customers: Vec<Customer>, grid: GridConfig) -> Self {
        Scenario { customers, grid }
    }

    /// Two customers with D = (20, 15) kWh, S = (10, 5) kWh, selling at
    /// $0.06/kWh on a 200 kWh background load, β = 0.0018, Prelec α = 0.25,
    /// the standard LMP ladder and a $0.25/kWh selling cap.
    pub fn reference() -> Self {
        Scenario {
            customers: vec![
                Customer::new(20.0, 10.0, 0.06),
                Customer::new(15.0, 5.0, 0.06),
            ],
            grid: GridConfig {
                background_load_kwh: 200.0,
                beta: 0.0018,
                price_cap: Some(0.25),
                pricing: PricingScheme::standard_lmp(),
                loss_model: LossModel::Zero,
                prelec_alpha: 0.25,
            },
        }
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn customer(&self, player: usize) -> &Customer {
        &self.customers[player]
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn players(&self) -> usize {
        self.customers.len()
    }

    pub fn into_parts(self) -> (Vec<Customer>, GridConfig) {
        (self.customers, self.grid)
    }

    /// Sets every customer's selling price and re-validates.
    pub fn with_sell_prices(&self, prices: &[f64]) -> Result<Self> {
        if prices.len() != self.customers.len() {
            return Err(Error::ProfileLength {
                expected: self.customers.len(),
                got: prices.len(),
            });
        }
        let customers = self
            .customers
            .iter()
            .zip(prices)
            .map(|(c, &b)| Customer { sell_price: b, ..*c })
            .collect();
        Scenario::new(customers, self.grid.clone())
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let grid = GridConfig {
            beta,
            ..self.grid.clone()
        };
        Scenario::new(self.customers.clone(), grid)
    }

    pub fn with_prelec_alpha(&self, prelec_alpha: f64) -> Result<Self> {
        let grid = GridConfig {
            prelec_alpha,
            ..self.grid.clone()
        };
        Scenario::new(self.customers.clone(), grid)
    }

    pub fn with_base_price(&self, base_price: f64) -> Result<Self> {
        let grid = GridConfig {
            pricing: self.grid.pricing.with_base_price(base_price)?,
            ..self.grid.clone()
        };
        Scenario::new(self.customers.clone(), grid)
    }

    pub fn with_loss_model(&self, loss_model: LossModel) -> Result<Self> {
        let grid = GridConfig {
            loss_model,
            ..self.grid.clone()
        };
        Scenario::new(self.customers.clone(), grid)
    }

    pub(crate) fn require_players(&self, expected: usize) -> Result<()> {
        if self.players() == expected {
            Ok(())
        } else {
            Err(Error::UnsupportedPlayerCount {
                expected,
                got: self.players(),
            })
        }
    }
}

/// Checks every model invariant and returns the scenario, or the first
/// violation found.
pub fn validate_scenario(customers: Vec<Customer>, grid: GridConfig) -> Result<Scenario> {
    if let Some(cap) = grid.price_cap {
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::invalid("grid.price_cap", "price cap must be > 0"));
        }
    }
    for (i, c) in customers.iter().enumerate() {
        if !(c.demand_kwh.is_finite() && c.demand_kwh > 0.0) {
            return Err(Error::invalid(
                format!("customers[{i}].demand_kwh"),
                "demand must be > 0",
            ));
        }
        if !(c.surplus_kwh.is_finite() && c.surplus_kwh > 0.0) {
            return Err(Error::invalid(
                format!("customers[{i}].surplus_kwh"),
                "surplus must be > 0",
            ));
        }
        if c.surplus_kwh >= c.demand_kwh {
            return Err(Error::invalid(
                format!("customers[{i}].surplus_kwh"),
                "surplus must be < demand",
            ));
        }
        if !(c.sell_price.is_finite() && c.sell_price >= 0.0) {
            return Err(Error::invalid(
                format!("customers[{i}].sell_price"),
                "sell price must be >= 0",
            ));
        }
        if let Some(cap) = grid.price_cap {
            if c.sell_price >= cap {
                return Err(Error::invalid(
                    format!("customers[{i}].sell_price"),
                    format!("sell price must be < price cap {cap}"),
                ));
            }
        }
    }
    if !(grid.background_load_kwh.is_finite() && grid.background_load_kwh >= 0.0) {
        return Err(Error::invalid(
            "grid.background_load_kwh",
            "background load must be >= 0",
        ));
    }
    if !(grid.beta.is_finite() && grid.beta > 0.0) {
        return Err(Error::invalid("grid.beta", "beta must be > 0"));
    }
    if !(grid.prelec_alpha > 0.0 && grid.prelec_alpha <= 1.0) {
        return Err(Error::invalid(
            "grid.prelec_alpha",
            "prelec alpha must lie in (0, 1]",
        ));
    }
    grid.pricing.validate()?;
    if let LossModel::LinearFraction { lambda } = grid.loss_model {
        if !(0.0..MAX_LOSS_FRACTION).contains(&lambda) {
            return Err(Error::invalid(
                "grid.loss_model.lambda",
                format!("loss fraction must lie in [0, {MAX_LOSS_FRACTION})"),
            ));
        }
    }
    Ok(Scenario { customers, grid })
}
