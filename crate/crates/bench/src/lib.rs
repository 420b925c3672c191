//! Fixtures shared by the criterion benchmarks.

use ptgrid_core::{Customer, Scenario};

/// The reference two-customer scenario with a given selling price for both.
pub fn two_player(sell_price: f64) -> Scenario {
    Scenario::reference()
        .with_sell_prices(&[sell_price, sell_price])
        .expect("valid selling price")
}

/// `players` identical customers on the reference grid.
pub fn symmetric(players: usize) -> Scenario {
    let grid = Scenario::reference().grid().clone();
    Scenario::new(vec![Customer::new(12.0, 4.0, 0.05); players], grid).expect("valid scenario")
}
