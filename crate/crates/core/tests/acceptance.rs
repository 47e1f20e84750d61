//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! The full six-qubit QFT reproduction (criterion 9) takes hours on one core
//! and only runs when asked for:
//!
//! ```text
//! cargo test --release -p rvqc --test acceptance -- --ignored
//! ```

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use rvqc::field::{
    coupling_matrix, delta_far_field, delta_pair, fidelity_lower_bound, quadrature_oracle_delta,
    quadrature_oracle_wightman, wightman_pair, CouplingMatrix, InteractionProfile, QubitLayout,
};
use rvqc::linalg::{phase_min_distance, trace_distance, CMatrix, C64};
use rvqc::sim::{
    apply_channel, apply_dephasing, apply_entangler, circuit_unitary, entangler_phases, exact_channel_fidelity,
    CircuitParams, DensityMatrix, StateVector,
};
use rvqc::train::{
    hs_loss, init_params, loss_and_gradient, multi_run, qft_unitary, LossDivisor, TrainConfig, TrainReport,
};
use rvqc::transpile::{
    ceil_log2, eliminate_pair_gate_plan, execute_plan, expected_pair_unitary, layer_cost, pair_gate_plan,
    verify_locality,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

fn random_layout(n: usize, extent: f64, rng: &mut impl Rng) -> QubitLayout {
    QubitLayout::new((0..n).map(|_| [0, 1, 2].map(|_| rng.random_range(0.0..extent))).collect()).unwrap()
}

fn far_field() -> Outcome {
    let t = 1.0;
    let mut worst: f64 = 0.0;
    for l_over_t in [1e-3, 1e-4, 1e-5] {
        for s_over_l in [1e-3, 1e-4, 1e-6] {
            let l = l_over_t * t;
            let p = InteractionProfile::new(t, s_over_l * l, 0.1).unwrap();
            worst = worst.max(rel(delta_pair(l, &p), delta_far_field(l, t)));
        }
    }
    outcome(worst <= 1e-3, format!("max relative deviation {worst:.2e} over 9 points (tol 1e-3)"))
}

fn oracle_equivalence() -> Outcome {
    let t = 1.0;
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for l_over_t in logspace(1e-4, 1e-1, 5) {
        for s_over_l in logspace(1e-4, 1e-1, 5) {
            let l = l_over_t * t;
            let p = InteractionProfile::new(t, s_over_l * l, 0.1).unwrap();
            match (quadrature_oracle_delta(l, &p), quadrature_oracle_wightman(l, &p)) {
                (Ok(d), Ok(w)) => {
                    worst = worst.max(rel(delta_pair(l, &p), d.value)).max(rel(wightman_pair(l, &p), w.value));
                    if d.value >= 0.0 {
                        errors += 1;
                    }
                }
                _ => errors += 1,
            }
        }
    }
    outcome(
        worst <= 1e-4 && errors == 0,
        format!("max relative deviation {worst:.2e} for Δ and W on 5×5 (L/T, σ/L) grid (tol 1e-4), {errors} oracle failures"),
    )
}

fn bound_values() -> Outcome {
    let per_layer = fidelity_lower_bound(1e-4, 100, 1.0 / (4.0 * PI));
    let hundred = per_layer.powi(100);
    outcome(
        (per_layer - 0.999984).abs() <= 1e-6 && (hundred - 0.99841).abs() <= 1e-5,
        format!("per-layer {per_layer:.7}, 100 layers {hundred:.6} (expect 0.999984 ± 1e-6, 0.99841 ± 1e-5)"),
    )
}

/// Couplings and states shared by criteria 4 and 5.
struct ChannelCase {
    coupling: CouplingMatrix,
    lambda: f64,
    states: Vec<StateVector>,
}

fn channel_cases() -> Vec<ChannelCase> {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    (2..=8)
        .map(|n| {
            let layout = random_layout(n, 2.0, &mut rng);
            let profile = InteractionProfile::new(1.0, 0.05, 1.5 / n as f64).unwrap();
            let coupling = coupling_matrix(&layout, &profile).unwrap();
            let states = (0..200).map(|_| StateVector::random(n, &mut rng).unwrap()).collect();
            ChannelCase { coupling, lambda: profile.lambda, states }
        })
        .collect()
}

fn bound_satisfaction(cases: &[ChannelCase]) -> Outcome {
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut bounds = Vec::new();
    for c in cases {
        let n = c.coupling.num_qubits();
        let bound = fidelity_lower_bound(c.lambda, n, c.coupling.noise_scale());
        bounds.push(bound);
        for s in &c.states {
            let f = exact_channel_fidelity(s, &c.coupling, c.lambda).unwrap();
            if f < bound {
                violations += 1;
            }
            min_margin = min_margin.min(f - bound);
        }
    }
    let lo = bounds.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        violations == 0,
        format!("{violations} violations over 7×200 states (N = 2..8, bounds down to {lo:.3}); min F - bound {min_margin:.3e}"),
    )
}

fn channel_consistency(cases: &[ChannelCase]) -> Outcome {
    let mut worst: f64 = 0.0;
    for c in cases {
        let phases = entangler_phases(&c.coupling, c.lambda);
        for s in &c.states {
            let closed = exact_channel_fidelity(s, &c.coupling, c.lambda).unwrap();
            let mut rho = DensityMatrix::from_pure(s).unwrap();
            apply_channel(&mut rho, &c.coupling, c.lambda).unwrap();
            let ideal = s.apply_matrix(&CMatrix::from_diagonal(&phases)).unwrap();
            let dense = rho.expectation_pure(&ideal).unwrap();
            worst = worst.max((closed - dense).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |closed form - density matrix| {worst:.2e} over 1400 states (tol 1e-12)"))
}

fn transpiler_correctness() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let (mut worst, mut plans, mut bad_cost, mut locality) = (0.0f64, 0, 0, 0);
    for n in 3..=7 {
        let layout = random_layout(n, 3.0, &mut rng);
        let profile = InteractionProfile::new(1.0, 0.01, 0.7).unwrap();
        let c = coupling_matrix(&layout, &profile).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                let plan = pair_gate_plan(n, (a, b)).unwrap();
                let u = execute_plan(&plan, &c, profile.lambda).unwrap();
                let expected =
                    expected_pair_unitary(c.delta(a, b), profile.lambda, plan.expected_exponent, n, (a, b)).unwrap();
                worst = worst.max(phase_min_distance(&u, &expected));
                if plan.layer_cost != 1 << (ceil_log2(n) + 3) || plan.steps.len() as u64 != plan.layer_cost {
                    bad_cost += 1;
                }
                locality += verify_locality(&plan).iter().map(|r| r.violations).sum::<usize>();
                plans += 1;
            }
        }
    }
    outcome(
        worst <= 1e-10 && bad_cost == 0 && locality == 0,
        format!("{plans} plans (N = 3..7, all pairs): max residual {worst:.2e}, {bad_cost} cost mismatches, {locality} partition-bound violations"),
    )
}

fn gate_elimination() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for n in 3..=5 {
        let layout = random_layout(n, 3.0, &mut rng);
        let profile = InteractionProfile::new(1.0, 0.01, 0.9).unwrap();
        let c = coupling_matrix(&layout, &profile).unwrap();
        let plan = eliminate_pair_gate_plan(n).unwrap();
        assert_eq!(plan.layer_cost, 2 * layer_cost(n));
        let u = execute_plan(&plan, &c, profile.lambda).unwrap();
        worst = worst.max(phase_min_distance(&u, &CMatrix::identity(1 << n)));
    }
    outcome(worst <= 1e-10, format!("max phase-minimized distance to identity {worst:.2e} for N = 3, 4, 5 (tol 1e-10)"))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = rng.random_range(1..=3);
        let depth = rng.random_range(1..=4);
        let layout = random_layout(n, 2.0, &mut rng);
        let profile = InteractionProfile::new(1.0, 0.05, rng.random_range(0.1..1.5)).unwrap();
        let c = coupling_matrix(&layout, &profile).unwrap();
        let target = qft_unitary(n).unwrap();
        let divisor = if case % 2 == 0 { LossDivisor::QubitCount } else { LossDivisor::HilbertDimension };
        let params = init_params(n, depth, rng.random()).unwrap();
        let flat = params.to_flat();
        let (_, grad) = loss_and_gradient(&params, &c, profile.lambda, &target, divisor).unwrap();
        let loss_at = |f: &[f64]| {
            let p = CircuitParams::from_flat(n, depth, f).unwrap();
            hs_loss(&circuit_unitary(&p, &c, profile.lambda).unwrap(), &target, n, divisor).unwrap()
        };
        for k in 0..flat.len() {
            let (mut plus, mut minus) = (flat.clone(), flat.clone());
            plus[k] += h;
            minus[k] -= h;
            let fd = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
            worst = worst.max((fd - grad[k]).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |analytic - central difference| {worst:.2e} over 50 configurations (tol 1e-6)"))
}

fn training_summary(r: &TrainReport) -> String {
    let a = &r.aggregate;
    format!(
        "{}/{} converged, final loss {:.5} ± {:.5}, final fidelity {:.5} ± {:.5}, loss floor {:.5}",
        a.converged_runs,
        a.num_runs,
        a.final_loss.0,
        a.final_loss.1,
        a.final_fidelity.0,
        a.final_fidelity.1,
        r.loss_floor
    )
}

fn qft_pilot() -> Outcome {
    let layout = QubitLayout::new(vec![[0.0, 0.0, 0.0], [0.25, 0.0, 0.0], [0.0, 0.35, 0.0]]).unwrap();
    let profile = InteractionProfile::new(1e8, 1e-8, 1e-4).unwrap();
    let mut cfg = TrainConfig::new(12, layout, profile);
    cfg.num_runs = 10;
    cfg.seed = 2024;
    let start = Instant::now();
    let report = multi_run(&cfg).unwrap();
    let elapsed = start.elapsed();
    outcome(
        report.aggregate.converged_runs >= 8 && elapsed <= Duration::from_secs(600),
        format!("N=3, D=12: {} (need ≥ 8/10 at tol 0.004)", training_summary(&report)),
    )
}

fn qft_full() -> Outcome {
    let layout = QubitLayout::rectangular_lattice(3, 2, 5.0, 3.0).unwrap();
    let profile = InteractionProfile::new(1e8, 1e-8, 1e-4).unwrap();
    let mut cfg = TrainConfig::new(50, layout, profile);
    cfg.seed = 2024;
    let report = multi_run(&cfg).unwrap();
    let a = &report.aggregate;
    outcome(
        a.converged_runs >= 16 && a.final_loss.0 <= 0.006 && a.final_fidelity.0 >= 0.99,
        format!("N=6, D=50: {} (need ≥ 16/20, mean loss ≤ 0.006, mean fidelity ≥ 0.99)", training_summary(&report)),
    )
}

fn random_mixed(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = 1 << n;
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut rho = a.matmul(&a.adjoint());
    let tr = rho.trace().re;
    rho = rho.scale(C64::new(1.0 / tr, 0.0));
    // exact Hermitian symmetrization against rounding in the product
    let sym = CMatrix::from_fn(d, d, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5);
    DensityMatrix::new(n, sym).unwrap()
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let (mut trace, mut diag, mut commute, mut unitary) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut psd = f64::INFINITY;
    for case in 0..60 {
        let n = 1 + case % 5;
        let layout = random_layout(n, 2.0, &mut rng);
        let profile = InteractionProfile::new(1.0, 0.05, rng.random_range(0.0..2.0)).unwrap();
        let c = coupling_matrix(&layout, &profile).unwrap();
        let lambda = profile.lambda;
        let rho = random_mixed(n, &mut rng);

        let mut out = rho.clone();
        apply_channel(&mut out, &c, lambda).unwrap();
        trace = trace.max((out.trace() - 1.0).abs());
        psd = psd.min(out.min_eigenvalue());

        let mut deph = rho.clone();
        apply_dephasing(&mut deph, &c, lambda).unwrap();
        let d0 = rho.entries().diagonal();
        diag = diag.max(deph.entries().diagonal().iter().zip(&d0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));

        let mut ed = rho.clone();
        apply_entangler(&mut ed, &c, lambda).unwrap();
        apply_dephasing(&mut ed, &c, lambda).unwrap();
        let mut de = rho.clone();
        apply_dephasing(&mut de, &c, lambda).unwrap();
        apply_entangler(&mut de, &c, lambda).unwrap();
        commute = commute.max(ed.entries().max_abs_diff(de.entries()));

        let params = init_params(n, 1 + case % 4, rng.random()).unwrap();
        unitary = unitary.max(circuit_unitary(&params, &c, lambda).unwrap().unitarity_residual());
    }

    // noiseless limit: λ → 0 with λ²Δ fixed
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let layout = random_layout(3, 2.0, &mut rng);
    let base = coupling_matrix(&layout, &InteractionProfile::new(1.0, 0.05, 1.0).unwrap()).unwrap();
    let rho = random_mixed(3, &mut rng);
    let ideal = rho.conjugate_by(&CMatrix::from_diagonal(&entangler_phases(&base, 1.0))).unwrap();
    let distances: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&lambda| {
            let c = base.scale_delta(1.0 / (lambda * lambda));
            let mut out = rho.clone();
            apply_channel(&mut out, &c, lambda).unwrap();
            trace_distance(out.entries(), ideal.entries())
        })
        .collect();
    let monotone = distances.windows(2).all(|w| w[1] < w[0]);

    let pass = trace <= 1e-10 && psd >= -1e-10 && diag <= 1e-15 && commute <= 1e-12 && unitary <= 1e-10 && monotone;
    outcome(
        pass,
        format!(
            "60 cases: trace err {trace:.1e}, min eigenvalue {psd:.1e}, diagonal change {diag:.1e}, \
             commutator {commute:.1e}, unitarity {unitary:.1e}; noiseless-limit distances {:.1e} > {:.1e} > {:.1e}",
            distances[0], distances[1], distances[2]
        ),
    )
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let full = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    // under `cargo test`, libtest flags such as `--list` must not run the suite
    if args.iter().any(|a| a == "--list") {
        return;
    }

    let mut failed = 0;
    let mut run = |id: &str, name: &str, budget: Duration, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let pass = o.pass && in_budget;
        if !pass {
            failed += 1;
        }
        let budget_note = if in_budget { String::new() } else { format!(" [over budget {budget:?}]") };
        println!(
            "{} criterion {id} {name}: {} ({:.2}s){budget_note}",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    };

    let cases = channel_cases();
    run("1", "far-field coupling", Duration::from_secs(1), &far_field);
    run("2", "oracle equivalence", Duration::from_secs(60), &oracle_equivalence);
    run("3", "fidelity bound values", Duration::from_secs(1), &bound_values);
    run("4", "bound satisfaction", Duration::from_secs(300), &|| bound_satisfaction(&cases));
    run("5", "channel consistency", Duration::from_secs(300), &|| channel_consistency(&cases));
    run("6", "transpiler correctness", Duration::from_secs(120), &transpiler_correctness);
    run("7", "gate elimination", Duration::from_secs(30), &gate_elimination);
    run("8", "gradient check", Duration::from_secs(120), &gradient_check);
    run("9", "QFT pilot", Duration::from_secs(600), &qft_pilot);
    if full {
        run("9", "QFT reproduction", Duration::from_secs(8 * 3600), &qft_full);
    } else {
        println!("SKIP criterion 9 QFT reproduction: hours on one core; run with `-- --ignored`");
    }
    run("10", "CPTP and unitarity properties", Duration::from_secs(120), &property_suites);

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
