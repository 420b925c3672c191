//! Company generation, the nominal regulated level and regulation deviation.

use crate::error::{Error, Result};
use crate::model::{Action, ActionProfile, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBalance {
    pub generation_kwh: f64,
    pub nominal_kwh: f64,
    pub deviation_kwh: f64,
    pub losses_kwh: f64,
}

/// Generation when every active customer charges: background plus all
/// demands plus the losses of serving them.
pub fn nominal_generation(scenario: &Scenario) -> f64 {
    let grid = scenario.grid();
    let served = grid.background_load_kwh
        + scenario.customers().iter().map(|c| c.demand_kwh).sum::<f64>();
    served + grid.loss_model.losses(served)
}

pub fn generation(profile: &ActionProfile, scenario: &Scenario) -> Result<PowerBalance> {
    check_profile(profile, scenario)?;
    let grid = scenario.grid();
    let mut served = grid.background_load_kwh;
    let mut sold = 0.0;
    for (customer, action) in scenario.customers().iter().zip(profile.actions()) {
        match action {
            Action::Charge => served += customer.demand_kwh,
            Action::Discharge => sold += customer.surplus_kwh,
        }
    }
    let losses_kwh = grid.loss_model.losses(served);
    let generation_kwh = served - sold + losses_kwh;
    let nominal_kwh = nominal_generation(scenario);
    Ok(PowerBalance {
        generation_kwh,
        nominal_kwh,
        deviation_kwh: generation_kwh - nominal_kwh,
        losses_kwh,
    })
}

pub(crate) fn check_profile(profile: &ActionProfile, scenario: &Scenario) -> Result<()> {
    if profile.len() != scenario.players() {
        return Err(Error::ProfileLength {
            expected: scenario.players(),
            got: profile.len(),
        });
    }
    Ok(())
}
