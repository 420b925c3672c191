//! Independent oracles: the two-player game written out directly from its
//! defining formulas, without going through the library's power/pricing/
//! utility modules.

#![allow(dead_code)]

use ptgrid_core::{Customer, GridConfig, LossModel, PricingScheme, Scenario};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// The four-tier ladder, written out by hand.
pub fn ladder_price(generation: f64, base: f64) -> f64 {
    if generation <= 200.0 {
        base
    } else if generation <= 250.0 {
        base + 0.05
    } else if generation <= 300.0 {
        base + 0.10
    } else {
        base + 0.15
    }
}

/// Plain-number description of a lossless two-player game on the ladder.
#[derive(Debug, Clone, Copy)]
pub struct Game {
    pub demand: [f64; 2],
    pub surplus: [f64; 2],
    pub sell: [f64; 2],
    pub beta: f64,
    pub background: f64,
    pub base_price: f64,
}

impl Game {
    pub fn reference() -> Self {
        Game {
            demand: [20.0, 15.0],
            surplus: [10.0, 5.0],
            sell: [0.06, 0.06],
            beta: 0.0018,
            background: 200.0,
            base_price: 0.05,
        }
    }

    pub fn scenario(&self, prelec_alpha: f64) -> Scenario {
        let customers = (0..2)
            .map(|k| Customer::new(self.demand[k], self.surplus[k], self.sell[k]))
            .collect();
        let grid = GridConfig {
            background_load_kwh: self.background,
            beta: self.beta,
            price_cap: None,
            pricing: PricingScheme::standard_lmp().with_base_price(self.base_price).unwrap(),
            loss_model: LossModel::Zero,
            prelec_alpha,
        };
        Scenario::from_parts_unchecked(customers, grid)
    }

    /// `u_k` for a pure profile; `charge[l]` is true when player `l` charges.
    pub fn utility(&self, k: usize, charge: [bool; 2]) -> f64 {
        let nominal = self.background + self.demand[0] + self.demand[1];
        let mut generation = self.background;
        for l in 0..2 {
            if charge[l] {
                generation += self.demand[l];
            } else {
                generation -= self.surplus[l];
            }
        }
        let penalty = self.beta * (generation - nominal) * (generation - nominal);
        if charge[k] {
            -ladder_price(generation, self.base_price) * self.demand[k] - penalty
        } else {
            self.sell[k] * self.surplus[k] - penalty
        }
    }

    /// Expected utility by summing over all four outcomes. `weight` is applied
    /// to the opponent's probabilities only.
    pub fn expected(&self, k: usize, p: [f64; 2], weight: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for a0 in [true, false] {
            for a1 in [true, false] {
                let profile = [a0, a1];
                let mut w = 1.0;
                for l in 0..2 {
                    let prob = if profile[l] { p[l] } else { 1.0 - p[l] };
                    w *= if l == k { prob } else { weight(prob) };
                }
                total += w * self.utility(k, profile);
            }
        }
        total
    }

    /// Pure Charge minus pure Discharge for player `k` against `p`.
    pub fn indifference_gap(&self, k: usize, p: [f64; 2], weight: impl Fn(f64) -> f64 + Copy) -> f64 {
        let mut charge = p;
        charge[k] = 1.0;
        let mut discharge = p;
        discharge[k] = 0.0;
        self.expected(k, charge, weight) - self.expected(k, discharge, weight)
    }

    /// Brute-force properness for player `k`: does its EUT indifference
    /// function, scanned over the opponent's probability on a 1e-3 grid,
    /// change sign strictly inside (0, 1)?
    pub fn player_mixes(&self, k: usize) -> bool {
        let o = 1 - k;
        let gap = |q: f64| {
            let mut p = [0.5; 2];
            p[o] = q;
            self.indifference_gap(k, p, |x| x)
        };
        let samples: Vec<f64> = (0..=1000).map(|i| gap(i as f64 / 1000.0)).collect();
        let interior_zero = samples[1..1000].iter().any(|&g| g == 0.0);
        let crossing = samples
            .windows(2)
            .any(|w| (w[0] > 0.0 && w[1] < 0.0) || (w[0] < 0.0 && w[1] > 0.0));
        interior_zero || crossing
    }
}

pub fn prelec(alpha: f64) -> impl Fn(f64) -> f64 + Copy {
    move |s: f64| {
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            (-(-s.ln()).powf(alpha)).exp()
        }
    }
}

/// Draws a lossless two-player game on the standard ladder.
pub fn random_game(rng: &mut ChaCha8Rng) -> Game {
    let demand = [rng.gen_range(5.0..40.0), rng.gen_range(5.0..40.0)];
    let surplus = [
        demand[0] * rng.gen_range(0.1..0.9),
        demand[1] * rng.gen_range(0.1..0.9),
    ];
    Game {
        demand,
        surplus,
        sell: [rng.gen_range(0.0..0.25), rng.gen_range(0.0..0.25)],
        beta: rng.gen_range(0.0005..0.005),
        background: 200.0,
        base_price: 0.05,
    }
}
