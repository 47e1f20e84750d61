use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rvqc::field::{coupling_matrix, delta_far_field, fidelity_lower_bound, CouplingMatrix};
use rvqc::linalg::fmt_f64;
use rvqc::sim::{exact_channel_fidelity, MAX_DENSITY_QUBITS};
use rvqc::spacetime::{rotation_angle, solve_omega_for_angle, QubitSpec, TrajectorySegment};
use rvqc::train::{multi_run, random_test_states, TrainReport};
use rvqc::transpile::{
    distance_to_pi_multiple, eliminate_pair_gate_plan, execute_plan, operator_schmidt_rank, pair_gate_plan,
    symbolic_multipliers, two_qubit_block, verify_locality, verify_plan, TranspilePlan,
};

use crate::config::{ExperimentConfig, MotionConfig, TranspileMode};
use crate::CliError;

/// Dense transpiler verification is used up to this size in `auto` mode.
const DENSE_AUTO_LIMIT: usize = 7;
/// Hard limit of the dense executor.
const DENSE_LIMIT: usize = 12;
/// Exact channel fidelities are sampled up to this size.
const BOUND_SAMPLE_LIMIT: usize = 8;
const RESIDUAL_TOLERANCE: f64 = 1e-10;

fn compute<T>(r: rvqc::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Compute(e.to_string()))
}

/// Output directory with the effective configuration already written.
struct Output {
    dir: PathBuf,
}

impl Output {
    fn create(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let dir = PathBuf::from(&cfg.output_dir);
        fs::create_dir_all(&dir).map_err(|e| CliError::Compute(format!("cannot create {}: {e}", dir.display())))?;
        let out = Self { dir };
        out.write("effective_config.toml", &cfg.to_toml())?;
        Ok(out)
    }

    /// Writes `name` atomically (temp file in the same directory, then rename).
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp{}", std::process::id()));
        write_then_rename(&tmp, &path, contents)
            .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))
    }
}

fn write_then_rename(tmp: &Path, path: &Path, contents: &str) -> std::io::Result<()> {
    fs::write(tmp, contents)?;
    fs::rename(tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(tmp);
    })
}

fn coupling(cfg: &ExperimentConfig) -> Result<CouplingMatrix, CliError> {
    let layout = cfg.layout()?;
    let profile = cfg.profile()?;
    coupling_matrix(&layout, &profile).map_err(|e| CliError::Config(format!("layout: {e}")))
}

pub fn couplings(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let layout = cfg.layout()?;
    let c = coupling(cfg)?;
    let p = cfg.profile()?;
    let out = Output::create(cfg)?;
    let n = c.num_qubits();
    let l2 = p.lambda * p.lambda;

    let mut pairs = String::from("i,j,separation,delta,delta_far_field,far_field_ratio,lambda2_abs_delta,wightman\n");
    let mut table = String::new();
    for i in 0..n {
        for j in i + 1..n {
            let sep = layout.separation(i, j);
            let (d, ff) = (c.delta(i, j), delta_far_field(sep, p.duration));
            let row = [sep, d, ff, d / ff, l2 * d.abs(), c.wightman(i, j)].map(fmt_f64).join(",");
            writeln!(pairs, "{i},{j},{row}").unwrap();
            writeln!(table, "{i:>4} {j:>4} {:>24} {:>24} {:>24}", fmt_f64(l2 * d.abs()), fmt_f64(d), fmt_f64(ff))
                .unwrap();
        }
    }
    let mut summary = format!("qubits: {n}\nnoise scale W: {}\n", fmt_f64(c.noise_scale()));
    if n > 1 {
        writeln!(summary, "\n   i    j {:>24} {:>24} {:>24}", "|lambda^2 delta|", "delta", "far-field delta").unwrap();
        summary.push_str(&table);
    }
    out.write("delta.csv", &c.delta_csv())?;
    out.write("wightman.csv", &c.wightman_csv())?;
    out.write("pairs.csv", &pairs)?;
    out.write("couplings_summary.txt", &summary)?;
    Ok(summary)
}

pub fn bound(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let c = coupling(cfg)?;
    let p = cfg.profile()?;
    let b = cfg.bound;
    if b.num_states == 0 {
        return Err(CliError::Config("bound.num_states must be ≥ 1".into()));
    }
    let out = Output::create(cfg)?;
    let n = c.num_qubits();
    let per_layer = fidelity_lower_bound(p.lambda, n, c.noise_scale());
    let product = per_layer.powi(b.layers as i32);
    let mut report = format!(
        "qubits: {n}\nlambda: {}\nnoise scale W: {}\nper-layer bound: {}\n{}-layer bound: {}\n",
        fmt_f64(p.lambda),
        fmt_f64(c.noise_scale()),
        fmt_f64(per_layer),
        b.layers,
        fmt_f64(product)
    );
    let mut violations = 0;
    if n <= BOUND_SAMPLE_LIMIT.min(MAX_DENSITY_QUBITS) {
        let states = compute(random_test_states(n, b.num_states, cfg.seed))?;
        let mut csv = String::from("state,fidelity,bound\n");
        let (mut min, mut sum) = (f64::INFINITY, 0.0);
        for (k, s) in states.iter().enumerate() {
            let f = compute(exact_channel_fidelity(s, &c, p.lambda))?;
            if f < per_layer {
                violations += 1;
            }
            min = min.min(f);
            sum += f;
            writeln!(csv, "{k},{},{}", fmt_f64(f), fmt_f64(per_layer)).unwrap();
        }
        out.write("bound_samples.csv", &csv)?;
        write!(
            report,
            "sampled states: {}\nmin exact fidelity: {}\nmean exact fidelity: {}\nviolations: {violations}\n",
            states.len(),
            fmt_f64(min),
            fmt_f64(sum / states.len() as f64)
        )
        .unwrap();
    } else {
        writeln!(report, "sampled states: none (exact check limited to N ≤ {BOUND_SAMPLE_LIMIT})").unwrap();
    }
    out.write("bound.txt", &report)?;
    if violations > 0 {
        return Err(CliError::Compute(format!("{violations} sampled states fall below the bound\n{report}")));
    }
    Ok(report)
}

pub fn transpile(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let t = cfg.transpile;
    let c = coupling(cfg)?;
    let lambda = cfg.profile()?.lambda;
    let n = c.num_qubits();
    if !(t.margin > 0.0) {
        return Err(CliError::Config("transpile.margin must be > 0".into()));
    }
    let plan = if t.eliminate { eliminate_pair_gate_plan(n) } else { pair_gate_plan(n, (t.pair[0], t.pair[1])) }
        .map_err(|e| CliError::Config(format!("transpile: {e}")))?;
    let dense = match t.mode {
        TranspileMode::Auto => n <= DENSE_AUTO_LIMIT,
        TranspileMode::Dense if n > DENSE_LIMIT => {
            return Err(CliError::Config(format!("transpile: dense mode supports N ≤ {DENSE_LIMIT}, got {n}")));
        }
        TranspileMode::Dense => true,
        TranspileMode::Symbolic => false,
    };
    let out = Output::create(cfg)?;
    out.write("plan.txt", &plan.to_text())?;

    let (a, b) = plan.target_pair;
    let mut report = format!(
        "mode: {}\nqubits: {n}\ntarget pair: {a},{b}\nelimination: {}\nlayer cost: {}\nexponent: {}\n",
        if dense { "dense" } else { "symbolic" },
        t.eliminate,
        plan.layer_cost,
        plan.expected_exponent
    );
    let mut failures = Vec::new();
    let locality = verify_locality(&plan);
    let bad: usize = locality.iter().map(|r| r.violations).sum();
    report.push_str("locality (iteration, steps, max set size, bound, violations):\n");
    for r in &locality {
        writeln!(report, "  {} {} {} {} {}", r.iteration, r.steps, r.max_set_size, fmt_f64(r.bound), r.violations)
            .unwrap();
    }
    if bad > 0 {
        failures.push(format!("{bad} locality violations"));
    }
    let mult_ok = final_multipliers_ok(&plan);
    writeln!(report, "final multipliers match: {mult_ok}").unwrap();
    if !mult_ok {
        failures.push("final phase multipliers do not isolate the pair".into());
    }

    if dense {
        let v = compute(verify_plan(&plan, &c, lambda, t.margin))?;
        let u = compute(execute_plan(&plan, &c, lambda))?;
        let rank = operator_schmidt_rank(&two_qubit_block(&u, plan.target_pair), 1e-9);
        writeln!(report, "residual: {}\noperator schmidt rank on pair: {rank}", fmt_f64(v.residual)).unwrap();
        if !(v.residual <= RESIDUAL_TOLERANCE) {
            failures.push(format!("residual {} exceeds {RESIDUAL_TOLERANCE:e}", fmt_f64(v.residual)));
        }
    }
    if !t.eliminate {
        let d = c.delta(a, b);
        let angle = rvqc::transpile::pair_angle(d, lambda, n);
        let dist = distance_to_pi_multiple(angle);
        let ok = dist > t.margin;
        write!(
            report,
            "pair angle: {}\ndistance to multiple of pi: {}\nmargin: {}\nangle check: {}\n",
            fmt_f64(angle),
            fmt_f64(dist),
            fmt_f64(t.margin),
            if ok { "ok" } else { "FAILED" }
        )
        .unwrap();
        if !ok {
            failures.push(format!(
                "pair angle {} is within margin {} of a multiple of pi (distance {}); the transpiled gate is not entangling",
                fmt_f64(angle),
                fmt_f64(t.margin),
                fmt_f64(dist)
            ));
        }
    }
    out.write("transpile_report.txt", &report)?;
    if !failures.is_empty() {
        return Err(CliError::Compute(format!("{}\n{report}", failures.join("; "))));
    }
    Ok(report)
}

/// The full plan leaves multiplier `2·exponent` on the pair and 0 elsewhere.
fn final_multipliers_ok(plan: &TranspilePlan) -> bool {
    let n = plan.num_qubits;
    let (a, b) = plan.target_pair;
    let m = symbolic_multipliers(n, &plan.steps);
    (0..n).all(|i| {
        (i + 1..n).all(|j| {
            let expect = if (i, j) == (a.min(b), a.max(b)) { 2 * plan.expected_exponent as i64 } else { 0 };
            m[i * n + j] == expect
        })
    })
}

pub fn train(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let tc = cfg.train_config()?;
    if let Some(m) = &cfg.motion {
        if !(m.energy_gap > 0.0 && m.radius > 0.0 && m.layer_duration > 0.0) {
            return Err(CliError::Config("motion: energy_gap, radius and layer_duration must all be > 0".into()));
        }
    }
    let out = Output::create(cfg)?;
    let report = compute(multi_run(&tc))?;
    out.write("traces.csv", &report.traces_csv())?;
    out.write("aggregate.csv", &report.aggregate_csv())?;
    out.write("params.csv", &report.params_csv())?;
    let mut summary = report.summary();
    if let Some(m) = &cfg.motion {
        let (csv, unreachable) = trajectories_csv(&report, m)?;
        out.write("trajectories.csv", &csv)?;
        writeln!(summary, "angles beyond the inertial maximum: {unreachable}").unwrap();
    }
    out.write("summary.txt", &summary)?;
    Ok(summary)
}

/// Angular frequency realizing each trained `θ`, reduced to `(0, 2π]` (the
/// rotation has period 2π in `θ`). Unreachable angles get an empty `omega`.
fn trajectories_csv(report: &TrainReport, m: &MotionConfig) -> Result<(String, usize), CliError> {
    let mut csv = String::from("run,layer,qubit,theta,gate_angle,omega,realized_angle\n");
    let mut unreachable = 0;
    for r in &report.runs {
        for (l, layer) in r.final_params.layers().iter().enumerate() {
            for (q, rot) in layer.rotations.iter().enumerate() {
                let tau = 2.0 * std::f64::consts::PI;
                let mut gate = rot.theta.rem_euclid(tau);
                if gate == 0.0 {
                    gate = tau;
                }
                let (omega, realized) = match solve_omega_for_angle(gate, m.energy_gap, m.radius, m.layer_duration) {
                    Ok(w) => {
                        let seg = compute(TrajectorySegment::new(m.radius, w, m.layer_duration))?;
                        // the axis does not enter the angle
                        let spec = compute(QubitSpec::new(m.energy_gap, 0.0, 0.0, [0.0; 3]))?;
                        (fmt_f64(w), fmt_f64(compute(rotation_angle(&spec, &seg))?))
                    }
                    Err(_) => {
                        unreachable += 1;
                        (String::new(), String::new())
                    }
                };
                writeln!(csv, "{},{l},{q},{},{},{omega},{realized}", r.run, fmt_f64(rot.theta), fmt_f64(gate)).unwrap();
            }
        }
    }
    Ok((csv, unreachable))
}
