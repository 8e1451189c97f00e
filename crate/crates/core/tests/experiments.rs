use mprk_core::experiments::{
    delta_axis, exact_solution, run_fixed_point_experiment, scan_delta, DistanceClass,
    ExperimentConfig,
};
use mprk_core::{integrate, MprkParams, TwoSpeciesSystem};

#[test]
fn spurious_fixed_point_at_a_20() {
    let cfg = |delta| ExperimentConfig {
        a: 20.0,
        delta,
        alpha: -0.5,
        dt: 1.0,
        steps: 10_000,
    };
    let near = run_fixed_point_experiment(&cfg(0.23)).unwrap();
    assert!(near.distance() <= 1e-6, "d = {}", near.distance());
    let far = run_fixed_point_experiment(&cfg(0.24)).unwrap();
    assert!(far.distance() >= 1e-2, "d = {}", far.distance());
    let [y1, y2] = far.final_state().unwrap();
    assert!((y1 + y2 - 1.0).abs() <= 1e-10);
    assert!(y1 > 0.0 && y2 > 0.0);
}

#[test]
fn scan_cells_conserve_mass_and_stable_cells_have_converged() {
    let short = scan_delta(-0.5, 20.0, 1.0, 10_000, 20).unwrap();
    let long = scan_delta(-0.5, 20.0, 1.0, 20_000, 20).unwrap();
    let mut unstable = 0;
    for (k, cell) in short.row(0).iter().enumerate() {
        let [y1, y2] = cell.final_state().expect("two-species cells never fail");
        assert!(y1 > 0.0 && y2 > 0.0);
        assert!((y1 + y2 - 1.0).abs() <= 1e-10);
        match cell.class() {
            DistanceClass::Stable => {
                let again = long.row(0)[k].final_state().unwrap();
                assert!((again[0] - y1).abs() < 1e-10 && (again[1] - y2).abs() < 1e-10);
            }
            DistanceClass::Unstable => unstable += 1,
            other => panic!("unexpected class {other:?}"),
        }
    }
    assert!(unstable > 0 && unstable < 20);
}

#[test]
fn delta_axis_avoids_both_ends() {
    let axis = delta_axis(160).unwrap();
    assert_eq!(axis.len(), 160);
    assert!(axis[0] > 0.0 && *axis.last().unwrap() < 0.5);
    assert!(axis.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn long_horizon_stays_near_exact_solution_for_small_steps() {
    let pds = TwoSpeciesSystem::symmetric(1.0).unwrap().to_linear();
    let y0 = exact_solution(0.25, 1.0, 0.0).unwrap();
    let params = MprkParams::new(1.0).unwrap();
    let traj = integrate(&pds, &y0, 0.01, 300, &params).unwrap();
    let exact = exact_solution(0.25, 1.0, 3.0).unwrap();
    let last = traj.last();
    assert!((last.y[0] - exact.y[0]).abs() < 1e-5);
}
