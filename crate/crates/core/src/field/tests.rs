use super::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn profile(t: f64, sigma: f64) -> InteractionProfile {
    InteractionProfile::new(t, sigma, 1e-4).unwrap()
}

fn qft_layout() -> (QubitLayout, InteractionProfile) {
    let t = 1e8;
    let lambda: f64 = 1e-4;
    let unit = t * lambda * lambda;
    let layout = QubitLayout::rectangular_lattice(3, 2, 5.0 * unit, 3.0 * unit).unwrap();
    (layout, InteractionProfile::new(t, 1e-8, lambda).unwrap())
}

#[test]
fn alpha_examples() {
    assert_eq!(alpha(0.0, 1.0), 1.0);
    assert!((alpha(1.0, 1.0) - std::f64::consts::SQRT_2).abs() < 1e-15);
    assert!((alpha(1e-8, 1e8) - 1.0).abs() <= 1e-30);
}

#[test]
fn wightman_self_examples() {
    assert!((wightman_self(&profile(1e8, 1e-8)) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    assert!(rel(wightman_self(&profile(1.0, 1.0)), 1.0 / (8.0 * PI)) < 1e-15);
    let a = wightman_self(&profile(2.0, 0.7));
    let b = wightman_self(&profile(4.0, 1.4));
    assert!(rel(a, b) < 1e-15);
}

#[test]
fn wightman_pair_is_continuous_at_zero_separation() {
    for (t, sigma) in [(1.0, 1e-3), (1e8, 1e-8), (3.0, 2.0)] {
        let p = profile(t, sigma);
        assert!(rel(wightman_pair(1e-6 * t, &p), wightman_self(&p)) < 1e-6);
        assert!(rel(wightman_pair(1e-12 * t, &p), wightman_self(&p)) < 1e-12);
    }
}

#[test]
fn wightman_pair_never_exceeds_self_term() {
    for t in [0.5, 1.0, 10.0, 1e4] {
        for sigma_frac in [1e-4, 1e-2, 0.5, 2.0] {
            let p = profile(t, sigma_frac * t);
            let w_self = wightman_self(&p);
            for k in 0..60 {
                let l = t * 10f64.powf(-5.0 + 0.1 * k as f64);
                let w = wightman_pair(l, &p);
                assert!(w <= w_self && w > 0.0, "L={l} T={t}: {w} vs {w_self}");
            }
        }
    }
}

#[test]
fn wightman_pair_matches_oracle_at_l_equal_t() {
    let p = profile(1.0, 1e-3);
    let oracle = quadrature_oracle_wightman(1.0, &p).unwrap();
    assert!(rel(wightman_pair(1.0, &p), oracle.value) < 1e-4);
}

#[test]
fn delta_far_field_limit() {
    let t = 1.0;
    for (l, sigma) in [(1e-3, 1e-6), (1e-4, 1e-8), (5e-4, 1e-7)] {
        let p = profile(t, sigma);
        let d = delta_pair(l, &p);
        assert!(d < 0.0);
        assert!((d * 2.0 * PI.sqrt() * l / t + 1.0).abs() <= 1e-3);
        assert!(rel(d, delta_far_field(l, t)) < 1e-3);
    }
}

#[test]
fn delta_pair_matches_oracle() {
    for (l, t, sigma) in [(1.0, 10.0, 0.1), (1.0, 2.0, 0.3), (2.0, 1.0, 0.5), (0.3, 1.0, 0.01)] {
        let p = profile(t, sigma);
        let oracle = quadrature_oracle_delta(l, &p).unwrap();
        assert!(oracle.value < 0.0);
        assert!(rel(delta_pair(l, &p), oracle.value) < 1e-4, "L={l} T={t} σ={sigma}");
    }
}

#[test]
fn oracle_far_field_and_self_term() {
    let p = profile(1.0, 1e-7);
    let o = quadrature_oracle_delta(1e-4, &p).unwrap();
    assert!(rel(o.value, delta_far_field(1e-4, 1.0)) < 1e-3);
    let p = profile(1.0, 0.2);
    let w = quadrature_oracle_wightman(0.0, &p).unwrap();
    assert!(rel(w.value, wightman_self(&p)) < 1e-4, "{} vs {}", w.value, wightman_self(&p));
}

#[test]
fn oracle_rejects_bad_input() {
    let p = profile(1.0, 0.1);
    assert!(quadrature_oracle_delta(0.0, &p).is_err());
    assert!(quadrature_oracle_wightman(-1.0, &p).is_err());
}

#[test]
fn single_qubit_coupling_is_trivial() {
    let layout = QubitLayout::new(vec![[1.0, 2.0, 3.0]]).unwrap();
    let c = coupling_matrix(&layout, &profile(1.0, 0.1)).unwrap();
    assert_eq!(c.num_qubits(), 1);
    assert_eq!(c.delta_matrix(), &[0.0]);
    assert_eq!(c.delta_csv(), "0\n0.0000000000000000e0\n");
}

#[test]
fn qft_setup_couplings() {
    let (layout, p) = qft_layout();
    let c = coupling_matrix(&layout, &p).unwrap();
    assert_eq!(c.num_qubits(), 6);
    let l2 = p.lambda * p.lambda;
    // nearest neighbours along x (L = 5) and y (L = 3)
    for (i, j, l) in [(0, 1, 5.0), (1, 2, 5.0), (0, 3, 3.0), (2, 5, 3.0)] {
        let d = c.delta(i, j);
        assert!(rel(d, delta_pair(l, &p)) < 1e-15);
        let strength = (l2 * d).abs();
        assert!((0.03..1.0).contains(&strength), "|λ²Δ_{i}{j}| = {strength}");
        assert!(rel(l2 * d, -1.0 / (2.0 * PI.sqrt() * l)) < 1e-9);
    }
    for i in 0..6 {
        assert_eq!(c.delta(i, i), 0.0);
        for j in 0..6 {
            assert_eq!(c.delta(i, j), c.delta(j, i));
            assert!(c.wightman(i, i) >= c.wightman(i, j).abs());
        }
    }
    assert_eq!(c.noise_scale(), c.wightman(0, 0));
}

#[test]
fn coupling_is_permutation_equivariant() {
    let layout = QubitLayout::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 2.0, 0.0], [0.0, 0.5, 1.5]]).unwrap();
    let p = profile(5.0, 0.05);
    let perm = [2, 0, 3, 1];
    let direct = coupling_matrix(&layout.permuted(&perm).unwrap(), &p).unwrap();
    let relabeled = coupling_matrix(&layout, &p).unwrap().permuted(&perm);
    assert_eq!(direct, relabeled);
}

#[test]
fn coincident_positions_are_rejected() {
    let err = QubitLayout::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0; 3]]).unwrap_err();
    assert_eq!(err, Error::CoincidentPositions(0, 2));
}

#[test]
fn fidelity_bound_values() {
    assert_eq!(fidelity_lower_bound(0.0, 10, 1.0), 1.0);
    let per_layer = fidelity_lower_bound(1e-4, 100, 1.0 / (4.0 * PI));
    assert!((per_layer - 0.999_984_1).abs() < 1e-7);
    assert!((per_layer.powi(100) - 0.99841).abs() < 1e-5);
    // simplified Minkowski form e^{-λ²N²/2π}
    assert!(rel(per_layer, (-1e-8 * 1e4 / (2.0 * PI)).exp()) < 1e-15);
}

#[test]
fn fidelity_bound_is_monotone() {
    let base = fidelity_lower_bound(0.1, 5, 0.08);
    assert!(fidelity_lower_bound(0.2, 5, 0.08) < base);
    assert!(fidelity_lower_bound(0.1, 6, 0.08) < base);
    assert!(fidelity_lower_bound(0.1, 5, 0.09) < base);
    assert!(base > 0.0 && base <= 1.0);
}

#[test]
fn profile_validation() {
    assert!(InteractionProfile::new(0.0, 1.0, 0.1).is_err());
    assert!(InteractionProfile::new(1.0, 0.0, 0.1).is_err());
    assert!(InteractionProfile::new(1.0, 1.0, -0.1).is_err());
    let p = InteractionProfile::new(2.0, 1.0, 0.1).unwrap();
    assert_eq!(p.interaction_window(), (0.0, 28.0));
}

#[test]
fn explicit_matrices_are_validated() {
    assert!(CouplingMatrix::noiseless(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
    assert!(CouplingMatrix::noiseless(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
    assert!(CouplingMatrix::noiseless(2, vec![0.0, 1.0, 1.0]).is_err());
    let c = CouplingMatrix::from_matrices(2, vec![0.0, -1.0, -1.0, 0.0], vec![0.5, -0.7, -0.7, 0.5]).unwrap();
    assert_eq!(c.noise_scale(), 0.7);
}
