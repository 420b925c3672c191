use proptest::prelude::*;
use ptgrid_core::equilibrium::indifference_residual;
use ptgrid_core::{
    eut_expected_utility, expected_load, payoff_table, prelec_weight,
    pt_expected_utility, ActionProfile, MixedProfile, Prelec, Scenario, Theory,
};

fn scenario() -> Scenario {
    Scenario::reference()
}

proptest! {
    #[test]
    fn prelec_is_increasing(alpha in 0.05f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(prelec_weight(lo, alpha).unwrap() <= prelec_weight(hi, alpha).unwrap());
    }

    #[test]
    fn prelec_overweights_below_inverse_e(alpha in 0.05f64..0.99, sigma in 0.001f64..0.999) {
        let w = prelec_weight(sigma, alpha).unwrap();
        let pivot = (-1.0f64).exp();
        if sigma < pivot - 1e-6 {
            prop_assert!(w > sigma);
        } else if sigma > pivot + 1e-6 {
            prop_assert!(w < sigma);
        }
    }

    #[test]
    fn pt_with_identity_weighting_is_eut(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
        let table = payoff_table(&scenario()).unwrap();
        let mixed = MixedProfile::new(vec![p1, p2]).unwrap();
        for k in 0..2 {
            let e = eut_expected_utility(k, &mixed, &table);
            let p = pt_expected_utility(k, &mixed, &table, Prelec::identity());
            prop_assert!((e - p).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_utility_is_linear_in_own_probability(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, alpha in 0.1f64..=1.0) {
        let table = payoff_table(&scenario()).unwrap();
        let weighting = Prelec::new(alpha).unwrap();
        for k in 0..2 {
            let mixed = MixedProfile::new(vec![p1, p2]).unwrap();
            let own = mixed.charge_probability(k);
            let at = |q: f64| pt_expected_utility(k, &mixed.with_probability(k, q).unwrap(), &table, weighting);
            let blended = own * at(1.0) + (1.0 - own) * at(0.0);
            prop_assert!((at(own) - blended).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_is_charge_minus_discharge(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
        let table = payoff_table(&scenario()).unwrap();
        let mixed = MixedProfile::new(vec![p1, p2]).unwrap();
        let weighting = Prelec::new(0.25).unwrap();
        for k in 0..2 {
            let r = indifference_residual(k, &mixed, &table, Theory::Pt, weighting);
            let c = pt_expected_utility(k, &mixed.with_probability(k, 1.0).unwrap(), &table, weighting);
            let d = pt_expected_utility(k, &mixed.with_probability(k, 0.0).unwrap(), &table, weighting);
            prop_assert!((r - (c - d)).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_load_is_bounded_by_pure_profiles(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
        let s = scenario();
        let load = expected_load(&MixedProfile::new(vec![p1, p2]).unwrap(), s.customers());
        let demand: f64 = s.customers().iter().map(|c| c.demand_kwh).sum();
        let surplus: f64 = s.customers().iter().map(|c| c.surplus_kwh).sum();
        prop_assert!(load <= demand + 1e-12 && load >= -surplus - 1e-12);
        let all_charge = expected_load(&MixedProfile::pure(&ActionProfile::all_charge(2)), s.customers());
        prop_assert!((all_charge - demand).abs() < 1e-12);
    }
}
