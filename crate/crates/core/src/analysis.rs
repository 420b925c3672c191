//! Company revenue, expected participating load and parameter sweeps.

use std::io::Write;

use rayon::prelude::*;

use crate::equilibrium::{self, ExistenceReport};
use crate::error::{Error, Result};
use crate::model::{Action, ActionProfile, Customer, EquilibriumResult, MixedProfile, Scenario, Theory};
use crate::pricing;

/// Expected company revenue from the two active customers.
///
/// Each profile in which somebody charges contributes its probability times
/// the LMP price at that profile times the energy (and delivery losses) sold.
pub fn revenue(mixed: &MixedProfile, scenario: &Scenario) -> Result<f64> {
    scenario.require_players(2)?;
    if mixed.len() != 2 {
        return Err(Error::ProfileLength {
            expected: 2,
            got: mixed.len(),
        });
    }
    let losses = scenario.grid().loss_model;
    let sold = |k: usize| {
        let d = scenario.customer(k).demand_kwh;
        d + losses.losses(d)
    };
    let (p1, p2) = (mixed.charge_probability(0), mixed.charge_probability(1));
    let price = |actions: [Action; 2]| pricing::profile_price(&ActionProfile::new(actions.to_vec()), scenario);

    let c11 = price([Action::Charge, Action::Charge])?;
    let c12 = price([Action::Charge, Action::Discharge])?;
    let c21 = price([Action::Discharge, Action::Charge])?;
    Ok(p1 * p2 * c11 * (sold(0) + sold(1))
        + p1 * (1.0 - p2) * c12 * sold(0)
        + (1.0 - p1) * p2 * c21 * sold(1))
}

/// Net expected grid load of the participants, losses and background
/// excluded. Negative when they inject more than they draw.
pub fn expected_load(mixed: &MixedProfile, customers: &[Customer]) -> f64 {
    customers
        .iter()
        .zip(mixed.probabilities())
        .map(|(c, &p)| p * c.demand_kwh - (1.0 - p) * c.surplus_kwh)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Customers' selling price `b`.
    SellPrice,
    /// Cheapest LMP tier price; the whole ladder shifts with it.
    LmpBasePrice,
    /// Regulation penalty factor.
    Beta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub theories: Vec<Theory>,
    /// For [`SweepParameter::SellPrice`]: set every customer's price to the
    /// swept value. When false only the first customer's price moves.
    pub coupled_sell_price: bool,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, steps: usize) -> Self {
        SweepSpec {
            parameter,
            start,
            stop,
            steps,
            theories: vec![Theory::Eut, Theory::Pt],
            coupled_sell_price: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Parameter {
                name: "steps",
                message: format!("steps must be >= 2 (got {})", self.steps),
            });
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::Parameter {
                name: "start/stop",
                message: format!("need finite start < stop (got {} .. {})", self.start, self.stop),
            });
        }
        if self.theories.is_empty() {
            return Err(Error::Parameter {
                name: "theories",
                message: "at least one theory is required".into(),
            });
        }
        Ok(())
    }

    /// Evenly spaced parameter values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * i as f64 / last
                }
            })
            .collect()
    }

    fn apply(&self, scenario: &Scenario, value: f64) -> Result<Scenario> {
        match self.parameter {
            SweepParameter::SellPrice => {
                let mut prices: Vec<f64> = scenario.customers().iter().map(|c| c.sell_price).collect();
                if self.coupled_sell_price {
                    prices.iter_mut().for_each(|b| *b = value);
                } else if let Some(first) = prices.first_mut() {
                    *first = value;
                }
                scenario.with_sell_prices(&prices)
            }
            SweepParameter::LmpBasePrice => scenario.with_base_price(value),
            SweepParameter::Beta => scenario.with_beta(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSolution {
    pub mixed: MixedProfile,
    pub revenue: f64,
    pub expected_load_kwh: f64,
}

/// One theory's outcome at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryPoint {
    pub theory: Theory,
    pub exists: Vec<bool>,
    /// `None` when no proper equilibrium was found at this point.
    pub solution: Option<SweepSolution>,
    /// Why the solver gave up, when it did.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Ordered EUT before PT.
    pub points: Vec<TheoryPoint>,
}

impl SweepRow {
    pub fn point(&self, theory: Theory) -> Option<&TheoryPoint> {
        self.points.iter().find(|p| p.theory == theory)
    }

    pub fn solution(&self, theory: Theory) -> Option<&SweepSolution> {
        self.point(theory).and_then(|p| p.solution.as_ref())
    }
}

fn solve_point(theory: Theory, scenario: &Scenario, report: &ExistenceReport) -> TheoryPoint {
    let exists = report.satisfied();
    if !report.all_satisfied() {
        return TheoryPoint {
            theory,
            exists,
            solution: None,
            failure: Some("existence condition violated".into()),
        };
    }
    let solved: Result<(EquilibriumResult, f64)> = match theory {
        Theory::Eut => equilibrium::solve_eut(scenario),
        Theory::Pt => equilibrium::solve_pt(scenario),
    }
    .and_then(|r| revenue(&r.mixed, scenario).map(|rev| (r, rev)));
    match solved {
        Ok((result, revenue)) => TheoryPoint {
            theory,
            exists,
            solution: Some(SweepSolution {
                expected_load_kwh: expected_load(&result.mixed, scenario.customers()),
                mixed: result.mixed,
                revenue,
            }),
            failure: None,
        },
        Err(e) => TheoryPoint {
            theory,
            exists,
            solution: None,
            failure: Some(e.to_string()),
        },
    }
}

/// Solves every requested theory at each swept parameter value.
pub fn sweep(spec: &SweepSpec, scenario: &Scenario) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    scenario.require_players(2)?;
    let mut theories = spec.theories.clone();
    theories.sort();
    theories.dedup();

    let rows = spec
        .values()
        .into_par_iter()
        .map(|value| {
            let modified = spec.apply(scenario, value)?;
            let report = equilibrium::check_existence(&modified)?;
            let points = theories
                .iter()
                .map(|&t| solve_point(t, &modified, &report))
                .collect();
            Ok(SweepRow { value, points })
        })
        .collect::<Result<Vec<_>>>()?;

    if rows.iter().all(|r| r.points.iter().all(|p| p.solution.is_none())) {
        return Err(Error::EmptySweep);
    }
    Ok(rows)
}

/// Number of rows with at least one solved theory.
pub fn feasible_count(rows: &[SweepRow]) -> usize {
    rows.iter()
        .filter(|r| r.points.iter().any(|p| p.solution.is_some()))
        .count()
}

pub const CSV_HEADER: [&str; 8] = [
    "parameter", "theory", "p1", "p2", "revenue", "load", "exists1", "exists2",
];

/// Fixed-point rendering with 12 significant digits.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.11}", x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).clamp(0, 40) as usize;
    format!("{:.*}", decimals, x)
}

/// Writes one row per (parameter value, theory). Infeasible points leave the
/// probability, revenue and load fields empty.
pub fn emit_csv<W: Write>(rows: &[SweepRow], destination: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut writer = csv::Writer::from_writer(destination);
    writer.write_record(CSV_HEADER)?;
    let mut ordered: Vec<&SweepRow> = rows.iter().collect();
    ordered.sort_by(|a, b| a.value.total_cmp(&b.value));
    for row in ordered {
        let mut points: Vec<&TheoryPoint> = row.points.iter().collect();
        points.sort_by_key(|p| p.theory);
        for point in points {
            let flag = |k: usize| point.exists.get(k).copied().unwrap_or(false).to_string();
            let (p1, p2, rev, load) = match &point.solution {
                Some(s) => (
                    format_decimal(s.mixed.charge_probability(0)),
                    format_decimal(s.mixed.charge_probability(1)),
                    format_decimal(s.revenue),
                    format_decimal(s.expected_load_kwh),
                ),
                None => Default::default(),
            };
            writer.write_record([
                format_decimal(row.value),
                point.theory.to_string(),
                p1,
                p2,
                rev,
                load,
                flag(0),
                flag(1),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}
