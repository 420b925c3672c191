//! TOML scenario files.
//!
//! ```toml
//! [grid]
//! background_load_kwh = 200.0
//! beta = 0.0018
//! prelec_alpha = 0.25
//! price_cap = 0.25            # optional
//! loss_model = "zero"         # or "linear_fraction"
//! loss_lambda = 0.0           # used by linear_fraction
//!
//! [[tiers]]
//! threshold = 0.0
//! price = 0.05
//!
//! [[customers]]
//! demand = 20.0
//! surplus = 10.0
//! sell_price = 0.06
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Customer, GridConfig, LossModel, PricingScheme, Scenario, Tier};

/// Bundled scenario with the reference two-customer parameters.
pub const REFERENCE_SCENARIO: &str = include_str!("../scenarios/reference.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Zero,
    LinearFraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub background_load_kwh: f64,
    pub beta: f64,
    pub prelec_alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub price_cap: Option<f64>,
    #[serde(default)]
    pub loss_model: LossKind,
    #[serde(default)]
    pub loss_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierEntry {
    pub threshold: f64,
    pub price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerEntry {
    pub demand: f64,
    pub surplus: f64,
    pub sell_price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub grid: GridSection,
    pub tiers: Vec<TierEntry>,
    pub customers: Vec<CustomerEntry>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario file serializes")
    }

    /// Converts to a validated scenario.
    pub fn into_scenario(self) -> Result<Scenario> {
        let loss_model = match self.grid.loss_model {
            LossKind::Zero => LossModel::Zero,
            LossKind::LinearFraction => LossModel::LinearFraction {
                lambda: self.grid.loss_lambda,
            },
        };
        let pricing = PricingScheme::new(
            self.tiers
                .iter()
                .map(|t| Tier {
                    threshold_kwh: t.threshold,
                    unit_price: t.price,
                })
                .collect(),
        )?;
        let grid = GridConfig {
            background_load_kwh: self.grid.background_load_kwh,
            beta: self.grid.beta,
            price_cap: self.grid.price_cap,
            pricing,
            loss_model,
            prelec_alpha: self.grid.prelec_alpha,
        };
        let customers = self
            .customers
            .iter()
            .map(|c| Customer::new(c.demand, c.surplus, c.sell_price))
            .collect();
        Scenario::new(customers, grid)
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        let grid = scenario.grid();
        let (loss_model, loss_lambda) = match grid.loss_model {
            LossModel::Zero => (LossKind::Zero, 0.0),
            LossModel::LinearFraction { lambda } => (LossKind::LinearFraction, lambda),
        };
        ScenarioFile {
            grid: GridSection {
                background_load_kwh: grid.background_load_kwh,
                beta: grid.beta,
                prelec_alpha: grid.prelec_alpha,
                price_cap: grid.price_cap,
                loss_model,
                loss_lambda,
            },
            tiers: grid
                .pricing
                .tiers()
                .iter()
                .map(|t| TierEntry {
                    threshold: t.threshold_kwh,
                    price: t.unit_price,
                })
                .collect(),
            customers: scenario
                .customers()
                .iter()
                .map(|c| CustomerEntry {
                    demand: c.demand_kwh,
                    surplus: c.surplus_kwh,
                    sell_price: c.sell_price,
                })
                .collect(),
        }
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::parse(text)?.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    ScenarioFile::read(path)?.into_scenario()
}
