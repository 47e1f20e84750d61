//! End-to-end paths through the modules: layout → couplings → transpiled pair
//! gates, trained angles → trajectories, trained circuit → noisy evaluation.

use std::f64::consts::TAU;

use rvqc::field::{coupling_matrix, fidelity_lower_bound, InteractionProfile, QubitLayout};
use rvqc::sim::{apply_channel, circuit_unitary, CircuitParams, DensityMatrix, LayerParams, Rotation, StateVector};
use rvqc::spacetime::{rotation_angle, solve_omega_for_angle, QubitSpec, TrajectorySegment};
use rvqc::train::{random_test_states, train_run, TrainConfig};
use rvqc::transpile::{check_entangling_angle, pair_gate_plan, verify_plan, DEFAULT_ANGLE_MARGIN};

fn paper_setup() -> (QubitLayout, InteractionProfile) {
    (QubitLayout::rectangular_lattice(3, 2, 5.0, 3.0).unwrap(), InteractionProfile::new(1e8, 1e-8, 1e-4).unwrap())
}

#[test]
fn paper_couplings_feed_the_transpiler() {
    let (layout, profile) = paper_setup();
    let c = coupling_matrix(&layout, &profile).unwrap();
    // nearest horizontal neighbours: λ²|Δ| = 1/(2√π·5)
    assert!((profile.lambda.powi(2) * c.delta(0, 1).abs() - 0.056_418_958_354_775_6).abs() < 1e-12);
    for (a, b) in [(0, 1), (0, 3), (2, 4)] {
        let plan = pair_gate_plan(6, (a, b)).unwrap();
        let v = verify_plan(&plan, &c, profile.lambda, DEFAULT_ANGLE_MARGIN).unwrap();
        assert!(v.residual <= 1e-10, "pair ({a},{b}): {}", v.residual);
        assert_eq!(v.angle_ok, check_entangling_angle(c.delta(a, b), profile.lambda, 6, DEFAULT_ANGLE_MARGIN).unwrap());
    }
}

#[test]
fn trained_angles_are_realized_by_circular_motion() {
    let layout = QubitLayout::new(vec![[0.0, 0.0, 0.0], [0.4, 0.0, 0.0]]).unwrap();
    let profile = InteractionProfile::new(1e8, 1e-8, 1e-4).unwrap();
    let mut cfg = TrainConfig::new(3, layout, profile);
    cfg.max_epochs = 200;
    cfg.num_test_states = 4;
    let params = train_run(&cfg, 0).unwrap().final_params;

    // Ω·Δt/2 = 2π covers every gate angle
    let (gap, radius, dt) = (4.0 * TAU, 0.05, 1.0);
    let realized: Vec<LayerParams> = params
        .layers()
        .iter()
        .map(|layer| {
            let rotations = layer
                .rotations
                .iter()
                .map(|r| {
                    let gate = match r.theta.rem_euclid(TAU) {
                        0.0 => TAU,
                        g => g,
                    };
                    let omega = solve_omega_for_angle(gate, gap, radius, dt).unwrap();
                    let seg = TrajectorySegment::new(radius, omega, dt).unwrap();
                    let theta = rotation_angle(&QubitSpec::new(gap, 0.0, 0.0, [0.0; 3]).unwrap(), &seg).unwrap();
                    Rotation::new(theta, r.vartheta, r.varphi)
                })
                .collect();
            LayerParams::new(rotations).unwrap()
        })
        .collect();
    let realized = CircuitParams::new(realized).unwrap();
    let c = cfg.coupling().unwrap();
    let u = circuit_unitary(&params, &c, profile.lambda).unwrap();
    let v = circuit_unitary(&realized, &c, profile.lambda).unwrap();
    assert!(u.max_abs_diff(&v) < 1e-11);
}

#[test]
fn trained_circuit_under_field_noise() {
    // strong coupling so the noise is visible
    let layout = QubitLayout::new(vec![[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.7, 0.0]]).unwrap();
    let profile = InteractionProfile::new(1.0, 0.05, 0.3).unwrap();
    let mut cfg = TrainConfig::new(4, layout, profile);
    cfg.max_epochs = 300;
    cfg.num_test_states = 4;
    let params = train_run(&cfg, 1).unwrap().final_params;
    let c = cfg.coupling().unwrap();
    let lambda = profile.lambda;
    let per_layer = fidelity_lower_bound(lambda, 3, c.noise_scale());
    assert!(per_layer < 0.99);

    let u = circuit_unitary(&params, &c, lambda).unwrap();
    for psi in random_test_states(3, 10, 3).unwrap() {
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        for layer in params.layers() {
            let rotations = circuit_unitary(&CircuitParams::new(vec![layer.clone()]).unwrap(), &c, 0.0).unwrap();
            rho = rho.conjugate_by(&rotations).unwrap();
            apply_channel(&mut rho, &c, lambda).unwrap();
        }
        let ideal: StateVector = psi.apply_matrix(&u).unwrap();
        let f = rho.expectation_pure(&ideal).unwrap();
        // 1 - F ≤ trace distance ≤ Σ_ℓ √(1 - F_ℓ) ≤ D √(1 - b)
        let floor = 1.0 - params.depth() as f64 * (1.0 - per_layer).sqrt();
        assert!(f <= 1.0 + 1e-12 && f >= floor, "F = {f}, floor {floor}");
        assert!(f < 1.0 - 1e-6, "noise must be visible");
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }
}
