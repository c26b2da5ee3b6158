//! Randomized invariants, checked over generated parameter ranges.

use proptest::prelude::*;

use critical_dirac::asymptotics::fit_power;
use critical_dirac::clifford::{
    anticommutator_deviation, build_rep, commutation_deviation, inversion_deviation,
};
use critical_dirac::closed_form::{excited_explicit, ground_state_radial, radial_residual};
use critical_dirac::model::ModelParams;
use critical_dirac::radial::{energy, from_profile, integrate, to_profile, LogState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fit_power_recovers_exact_laws(
        p in 0.25f64..5.0,
        c in 0.1f64..10.0,
    ) {
        let rs: Vec<f64> = (0..50)
            .map(|i| (0.0 + (1e3f64.ln()) * i as f64 / 49.0).exp())
            .collect();
        let ws: Vec<f64> = rs.iter().map(|r| c * r.powf(-p)).collect();
        let fit = fit_power(&rs, &ws, (1.0, 1e3)).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-10);
        prop_assert!((fit.coefficient - c).abs() < 1e-9 * c);
        prop_assert!(fit.fit_residual < 1e-12);
    }

    #[test]
    fn clifford_identities_hold_at_random_directions(
        n in 2u32..=8,
        coords in prop::collection::vec(-3.0f64..3.0, 8),
    ) {
        let rep = build_rep(n).unwrap();
        prop_assert!(anticommutator_deviation(&rep) < 1e-14);
        let x = &coords[..n as usize];
        if x.iter().map(|c| c * c).sum::<f64>().sqrt() > 0.1 {
            prop_assert!(inversion_deviation(&rep, x).unwrap() < 1e-14);
            prop_assert!(commutation_deviation(&rep, x).unwrap() < 1e-14);
        }
    }

    #[test]
    fn closed_forms_satisfy_their_systems(
        lambda in 0.2f64..5.0,
        r in 1e-2f64..1e2,
        n in 1.5f64..5.0,
        s in -3i32..=3,
        sigma in prop::sample::select(vec![-1i32, 1]),
    ) {
        let ground = ground_state_radial(n, lambda, sigma).unwrap();
        prop_assert!(radial_residual(&ground, r).unwrap() <= 1e-11);
        let excited = excited_explicit(s, lambda, sigma).unwrap();
        prop_assert!(radial_residual(&excited, r).unwrap() <= 1e-11);
    }

    #[test]
    fn profile_round_trip_is_lossless(
        f0 in -1.5f64..1.5,
        g0 in -1.5f64..1.5,
        n in prop::sample::select(vec![2.0f64, 2.5, 3.0]),
    ) {
        let params = ModelParams::GroundState { n };
        let tr = integrate(&params, LogState::new(0.0, f0, g0), 3.0, 1e-9).unwrap();
        let back = from_profile(&to_profile(&tr));
        for i in 0..tr.len() {
            prop_assert!((tr.ts[i] - back.ts[i]).abs() < 1e-12);
            prop_assert!((tr.fs[i] - back.fs[i]).abs() < 1e-10 * (1.0 + tr.fs[i].abs()));
            prop_assert!((tr.gs[i] - back.gs[i]).abs() < 1e-10 * (1.0 + tr.gs[i].abs()));
        }
    }

    #[test]
    fn integration_conserves_energy(
        f0 in -1.5f64..1.5,
        g0 in -1.5f64..1.5,
        beta1 in 0.2f64..2.0,
        beta2 in 0.2f64..2.0,
        s in prop::sample::select(vec![-2i32, 0, 1]),
    ) {
        let params = ModelParams::Graphene2D { beta1, beta2, s };
        let initial = LogState::new(0.0, f0, g0);
        let e0 = energy(&params, &initial);
        let tr = integrate(&params, initial, 5.0, 1e-10).unwrap();
        prop_assert!(tr.energy_drift <= 1e-7 * (1.0 + e0.abs()));
    }
}
