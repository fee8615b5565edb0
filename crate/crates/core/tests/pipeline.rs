use pap_core::planner::{maxmin_schedule, velocity_search, RateTable};
use pap_core::policy::policy_registry;
use pap_core::scenario::Scenario;
use proptest::prelude::*;

fn small() -> Scenario {
    Scenario::from_toml(
        r#"
        seed = 15
        q_bits = 4e8
        [planner]
        velocities = [4.0, 8.0, 12.0, 16.0]
        "#,
    )
    .unwrap()
}

#[test]
fn prepared_scenario_is_consistent() {
    let sc = small();
    let p = sc.prepare().unwrap();
    let mut served: Vec<usize> = p.lois.iter().flat_map(|l| l.covered.clone()).collect();
    served.sort_unstable();
    served.dedup();
    assert_eq!(served, (0..sc.area.n_gns).collect::<Vec<_>>());
    let first = p.path.waypoints.first().unwrap();
    let last = p.path.waypoints.last().unwrap();
    assert!(first.dist(&sc.p_initial) < 1e-9 && last.dist(&sc.p_final) < 1e-9);
    assert!(p.path.segment_lengths().iter().all(|&l| l <= sc.planner.delta + 1e-9));
    assert_eq!(p.rates.actual.segments(), p.path.n_segments());
}

#[test]
fn policies_agree_on_delivery() {
    let sc = small();
    let p = sc.prepare().unwrap();
    let ctx = p.context(&sc).unwrap();
    let reg = policy_registry(&sc.planner.velocities, false, sc.planner.single_lap);
    let mut energies = Vec::new();
    for name in ["multi-lap", "single-lap", "fly-hover"] {
        let plan = reg.get(name).unwrap().plan(&ctx).unwrap();
        for b in &plan.bits_per_gn {
            assert!(*b >= sc.q_bits * (1.0 - 1e-6), "{name} delivered {b}");
        }
        energies.push(plan.energy_total);
    }
    assert!(energies[0] <= energies[2]);
}

#[test]
fn early_break_never_beats_full_sweep() {
    let sc = small();
    let ctx = sc.prepare().unwrap().context(&sc).unwrap();
    let full = velocity_search(&ctx, &sc.planner.velocities, false).best.unwrap();
    let early = velocity_search(&ctx, &sc.planner.velocities, true).best.unwrap();
    assert!(early.gee <= full.gee * (1.0 + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schedule_respects_segment_time(
        d in prop::collection::vec(prop::collection::vec(0.0f64..1e9, 3), 1..6),
        t in prop::collection::vec(0.1f64..5.0, 6),
    ) {
        let t = &t[..d.len()];
        let table = RateTable::new(d.clone());
        let s = maxmin_schedule(&table, t).unwrap();
        for (row, tm) in s.t_mn.iter().zip(t) {
            prop_assert!(row.iter().all(|&x| x >= -1e-12));
            prop_assert!(row.iter().sum::<f64>() <= tm * (1.0 + 1e-9));
        }
        for b in s.bits_per_gn(&table) {
            prop_assert!(b >= s.t_star * (1.0 - 1e-9) - 1e-6);
        }
    }

    #[test]
    fn schedule_scales_with_time(
        d in prop::collection::vec(prop::collection::vec(1e6f64..1e9, 2), 1..5),
        c in 0.1f64..10.0,
    ) {
        let t = vec![1.0; d.len()];
        let table = RateTable::new(d);
        let a = maxmin_schedule(&table, &t).unwrap().t_star;
        let tc: Vec<f64> = t.iter().map(|x| x * c).collect();
        let b = maxmin_schedule(&table, &tc).unwrap().t_star;
        prop_assert!((b - c * a).abs() <= 1e-7 * c * a);
    }
}
