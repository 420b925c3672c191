//! LMP charging price and per-player unit payments for pure profiles.

use crate::error::Result;
use crate::model::{Action, ActionProfile, Customer, PricingScheme, Scenario};
use crate::power;

/// Unit price of the tier containing `generation_kwh`.
pub fn lmp_price(generation_kwh: f64, scheme: &PricingScheme) -> f64 {
    scheme.price_at(generation_kwh)
}

/// LMP price at the generation a profile induces.
pub fn profile_price(profile: &ActionProfile, scenario: &Scenario) -> Result<f64> {
    let balance = power::generation(profile, scenario)?;
    Ok(lmp_price(balance.generation_kwh, &scenario.grid().pricing))
}

/// Unit price paid by `player` for charging; zero when it discharges.
pub fn charging_payment(player: usize, profile: &ActionProfile, scenario: &Scenario) -> Result<f64> {
    let price = profile_price(profile, scenario)?;
    Ok(match profile.action(player) {
        Action::Charge => price,
        Action::Discharge => 0.0,
    })
}

/// Unit price received by `player` for discharging; zero when it charges.
pub fn discharging_payment(player: usize, profile: &ActionProfile, customers: &[Customer]) -> f64 {
    match profile.action(player) {
        Action::Discharge => customers[player].sell_price,
        Action::Charge => 0.0,
    }
}
