//! Equilibria of a charge/discharge game between customer-owned storage
//! units, under expected utility theory and under prospect-theoretic
//! probability weighting.
//!
//! Each active customer either buys its demand from the grid or sells its
//! stored surplus. Utilities combine the LMP charging bill, selling revenue
//! and a quadratic penalty on the deviation of company generation from its
//! nominal level. For two customers the crate computes the unique proper
//! mixed equilibrium, verifies it, and sweeps selling price, LMP level and
//! penalty factor to tabulate company revenue and expected load.

pub mod analysis;
pub mod bisection;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod power;
pub mod pricing;
pub mod scenario_file;
pub mod utility;

pub use analysis::{
    emit_csv, expected_load, revenue, sweep, SweepParameter, SweepRow, SweepSpec, TheoryPoint,
};
pub use equilibrium::{
    check_existence, enumerate_pure_nash, solve_eut, solve_pt, verify_equilibrium,
    ExistenceReport, PlayerBounds, VerificationReport,
};
pub use error::{Error, Result};
pub use model::{
    validate_scenario, Action, ActionProfile, Customer, EquilibriumResult, GridConfig, LossModel,
    MixedProfile, PricingScheme, Scenario, Theory, Tier,
};
pub use power::{generation, nominal_generation, PowerBalance};
pub use pricing::{charging_payment, discharging_payment, lmp_price};
pub use scenario_file::{load_scenario, parse_scenario, ScenarioFile, REFERENCE_SCENARIO};
pub use utility::{
    eut_expected_utility, payoff_table, prelec_weight, pt_expected_utility, pure_utility,
    PayoffTable, Prelec,
};
