//! Fitting the layered circuit to a target unitary (by default the quantum
//! Fourier transform) with the scaled Hilbert–Schmidt loss and Adam.
//!
//! Randomness: every generator is ChaCha20 seeded with `seed_from_u64(seed)`.
//! Run `r` draws its initial parameters from stream `r`; the shared test
//! ensemble comes from stream [`TEST_STATE_STREAM`]. Normal variates use
//! `rand_distr::StandardNormal` (ziggurat), so ensembles agree in
//! distribution, not bit for bit, with other implementations.

mod adam;
mod gradient;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

pub use adam::{adam_step, AdamState};
pub use gradient::{hs_loss, loss_and_gradient, loss_gradient, rotation_derivatives};

use crate::error::{invalid, Error, Result};
use crate::field::{coupling_matrix, CouplingMatrix, InteractionProfile, QubitLayout};
use crate::linalg::{fmt_f64, CMatrix, C64};
use crate::sim::{circuit_unitary, state_fidelity, CircuitParams, LayerParams, Rotation, StateVector};

/// ChaCha20 stream reserved for the test-state ensemble.
pub const TEST_STATE_STREAM: u64 = u64::MAX;

/// What the `1/n` in the loss refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossDivisor {
    /// `n = N`, the number of qubits.
    QubitCount,
    /// `n = 2^N`, the Hilbert-space dimension.
    #[default]
    HilbertDimension,
}

impl LossDivisor {
    pub fn value(self, num_qubits: usize) -> f64 {
        match self {
            Self::QubitCount => num_qubits as f64,
            Self::HilbertDimension => (1u64 << num_qubits) as f64,
        }
    }
}

/// Unitary the circuit is trained towards.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Target {
    #[default]
    Qft,
    Matrix(CMatrix),
}

impl Target {
    pub fn matrix(&self, num_qubits: usize) -> Result<CMatrix> {
        match self {
            Self::Qft => qft_unitary(num_qubits),
            Self::Matrix(m) => {
                let dim = 1usize << num_qubits;
                if m.rows() != dim || m.cols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: m.rows() });
                }
                Ok(m.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub num_qubits: usize,
    pub depth: usize,
    pub layout: QubitLayout,
    pub profile: InteractionProfile,
    pub target: Target,
    pub learning_rate: f64,
    pub tolerance: f64,
    pub max_epochs: usize,
    pub num_runs: usize,
    pub num_test_states: usize,
    pub seed: u64,
    pub loss_divisor: LossDivisor,
    /// Test-ensemble fidelity is evaluated every this many epochs and at the
    /// final epoch of each run.
    pub fidelity_every: usize,
}

impl TrainConfig {
    /// Defaults: learning rate 0.01, tolerance 0.004, 30000 epochs, 20 runs,
    /// 64 test states, fidelity every 50 epochs, QFT target.
    pub fn new(depth: usize, layout: QubitLayout, profile: InteractionProfile) -> Self {
        Self {
            num_qubits: layout.len(),
            depth,
            layout,
            profile,
            target: Target::Qft,
            learning_rate: 0.01,
            tolerance: 0.004,
            max_epochs: 30000,
            num_runs: 20,
            num_test_states: 64,
            seed: 0,
            loss_divisor: LossDivisor::default(),
            fidelity_every: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if self.num_qubits == 0 || self.num_qubits > 10 {
            return Err(invalid("num_qubits", format!("must lie in 1..=10, got {}", self.num_qubits)));
        }
        if self.layout.len() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: self.layout.len() });
        }
        if self.depth == 0 {
            return Err(invalid("depth", "must be ≥ 1"));
        }
        if !(self.learning_rate > 0.0) || !(self.tolerance >= 0.0) {
            return Err(invalid("learning_rate/tolerance", "learning rate must be > 0 and tolerance ≥ 0"));
        }
        if self.max_epochs == 0 || self.num_runs == 0 || self.num_test_states == 0 || self.fidelity_every == 0 {
            return Err(invalid("max_epochs/num_runs/num_test_states/fidelity_every", "must all be ≥ 1"));
        }
        Ok(())
    }

    pub fn coupling(&self) -> Result<CouplingMatrix> {
        coupling_matrix(&self.layout, &self.profile)
    }
}

/// `F_jk = ω^{jk}/√(2^N)`, `ω = e^{2πi/2^N}`.
pub fn qft_unitary(num_qubits: usize) -> Result<CMatrix> {
    if num_qubits == 0 || num_qubits > 10 {
        return Err(invalid("num_qubits", format!("QFT supports 1..=10 qubits, got {num_qubits}")));
    }
    let dim = 1usize << num_qubits;
    let s = 1.0 / (dim as f64).sqrt();
    // reduce jk mod dim before forming the angle to keep it exact
    Ok(CMatrix::from_fn(dim, dim, |j, k| C64::from_polar(s, 2.0 * PI * ((j * k) % dim) as f64 / dim as f64)))
}

/// Smallest loss any circuit of this model can reach for `target`.
///
/// Every layer has determinant 1 (SU(2) rotations and a traceless Ising
/// generator), so `U_𝜽 ∈ SU(2^N)`. The nearest special unitary to `V` is
/// `cV` with `c^{2^N} det V = 1`, giving
/// `min ‖U - V‖² = 2d (1 - cos(δ/d))`, where `δ` is the distance of
/// `arg det V` to the nearest multiple of 2π.
pub fn special_unitary_loss_floor(target: &CMatrix, num_qubits: usize, divisor: LossDivisor) -> f64 {
    let d = target.rows() as f64;
    let det = target.to_nalgebra().determinant();
    let gamma = det.arg();
    let delta = (gamma - 2.0 * PI * (gamma / (2.0 * PI)).round()).abs();
    2.0 * d * (1.0 - (delta / d).cos()) / divisor.value(num_qubits)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_params(num_qubits: usize, depth: usize, rng: &mut impl Rng) -> CircuitParams {
    let layers = (0..depth)
        .map(|_| {
            let rots = (0..num_qubits)
                .map(|_| {
                    let theta = rng.random_range(0.0..10.0 * PI);
                    let vartheta = rng.random_range(0.0..2.0 * PI);
                    let varphi = rng.random_range(0.0..2.0 * PI);
                    Rotation::new(theta, vartheta, varphi)
                })
                .collect();
            LayerParams { rotations: rots }
        })
        .collect();
    CircuitParams::new(layers).expect("finite angles and uniform width")
}

/// `θ ~ U[0, 10π)`, `ϑ, φ ~ U[0, 2π)` from stream 0 of `seed`.
pub fn init_params(num_qubits: usize, depth: usize, seed: u64) -> Result<CircuitParams> {
    init_params_for_run(num_qubits, depth, seed, 0)
}

/// Initial parameters of run `run` (stream `run` of `seed`).
pub fn init_params_for_run(num_qubits: usize, depth: usize, seed: u64, run: u64) -> Result<CircuitParams> {
    if num_qubits == 0 || depth == 0 {
        return Err(invalid("num_qubits/depth", "must be ≥ 1"));
    }
    Ok(draw_params(num_qubits, depth, &mut stream_rng(seed, run)))
}

/// `count` states with i.i.d. complex standard normal amplitudes, normalized.
pub fn random_test_states(num_qubits: usize, count: usize, seed: u64) -> Result<Vec<StateVector>> {
    if count == 0 {
        return Err(invalid("count", "must be ≥ 1"));
    }
    let mut rng = stream_rng(seed, TEST_STATE_STREAM);
    (0..count).map(|_| StateVector::random(num_qubits, &mut rng)).collect()
}

/// Mean of `|⟨Vψ|Uψ⟩|²` over the ensemble.
pub fn mean_state_fidelity(u_model: &CMatrix, u_target: &CMatrix, states: &[StateVector]) -> Result<f64> {
    let mut total = 0.0;
    for psi in states {
        total += state_fidelity(&psi.apply_matrix(u_model)?, &psi.apply_matrix(u_target)?)?;
    }
    Ok(total / states.len() as f64)
}

/// Trace of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub run: usize,
    /// `losses[e]` is the loss at the start of epoch `e + 1`.
    pub losses: Vec<f64>,
    /// Test-ensemble fidelity at the same epochs, where evaluated.
    pub fidelities: Vec<Option<f64>>,
    pub final_params: CircuitParams,
    pub converged: bool,
}

impl RunReport {
    pub fn epochs(&self) -> usize {
        self.losses.len()
    }

    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("at least one epoch")
    }

    pub fn final_fidelity(&self) -> f64 {
        self.fidelities.last().copied().flatten().expect("final epoch is always evaluated")
    }

    pub fn min_loss(&self) -> f64 {
        self.losses.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Trains one run. Each epoch evaluates loss and gradient at the current
/// parameters; the run stops before updating once the loss is at or below
/// the tolerance, or after `max_epochs` evaluations.
pub fn train_run(config: &TrainConfig, run: usize) -> Result<RunReport> {
    config.validate()?;
    let coupling = config.coupling()?;
    let target = config.target.matrix(config.num_qubits)?;
    let states = random_test_states(config.num_qubits, config.num_test_states, config.seed)?;
    let init = init_params_for_run(config.num_qubits, config.depth, config.seed, run as u64)?;
    train_from(config, &coupling, &target, &states, init, run)
}

fn train_from(
    config: &TrainConfig,
    coupling: &CouplingMatrix,
    target: &CMatrix,
    states: &[StateVector],
    init: CircuitParams,
    run: usize,
) -> Result<RunReport> {
    let (n, d) = (config.num_qubits, config.depth);
    let lambda = config.profile.lambda;
    let mut flat = init.to_flat();
    let mut adam = AdamState::new(flat.len());
    let mut losses = Vec::new();
    let mut fidelities = Vec::new();
    let mut converged = false;
    for epoch in 1..=config.max_epochs {
        let params = CircuitParams::from_flat(n, d, &flat)?;
        let (loss, grad) = loss_and_gradient(&params, coupling, lambda, target, config.loss_divisor)?;
        if !loss.is_finite() {
            return Err(invalid("loss", format!("non-finite loss at epoch {epoch} of run {run}")));
        }
        losses.push(loss);
        converged = loss <= config.tolerance;
        let last = converged || epoch == config.max_epochs;
        if last || epoch % config.fidelity_every == 0 {
            let u = circuit_unitary(&params, coupling, lambda)?;
            fidelities.push(Some(mean_state_fidelity(&u, target, states)?));
        } else {
            fidelities.push(None);
        }
        if last {
            break;
        }
        adam_step(&mut adam, &mut flat, &grad, config.learning_rate);
    }
    Ok(RunReport { run, losses, fidelities, final_params: CircuitParams::from_flat(n, d, &flat)?, converged })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Statistics across runs, with shorter traces padded by their final values.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub num_runs: usize,
    pub converged_runs: usize,
    /// Length of the longest run.
    pub epochs: usize,
    pub loss_mean: Vec<f64>,
    pub loss_std: Vec<f64>,
    /// `(epoch, mean, std)` at epochs where every padded run has a fidelity.
    pub fidelity: Vec<(usize, f64, f64)>,
    pub final_loss: (f64, f64),
    pub final_fidelity: (f64, f64),
    pub epochs_to_converge: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub runs: Vec<RunReport>,
    pub aggregate: Aggregate,
    /// Loss floor imposed by the determinant of the target.
    pub loss_floor: f64,
}

/// Padded value of a run's trace at 0-based epoch index `e`.
fn padded<T: Copy>(trace: &[T], e: usize) -> T {
    trace[e.min(trace.len() - 1)]
}

pub fn aggregate(runs: &[RunReport]) -> Aggregate {
    let mut sorted: Vec<&RunReport> = runs.iter().collect();
    sorted.sort_by_key(|r| r.run);
    let epochs = sorted.iter().map(|r| r.epochs()).max().unwrap_or(0);
    let mut loss_mean = Vec::with_capacity(epochs);
    let mut loss_std = Vec::with_capacity(epochs);
    let mut fidelity = Vec::new();
    for e in 0..epochs {
        let ls: Vec<f64> = sorted.iter().map(|r| padded(&r.losses, e)).collect();
        let (m, s) = mean_std(&ls);
        loss_mean.push(m);
        loss_std.push(s);
        let fs: Option<Vec<f64>> = sorted.iter().map(|r| padded(&r.fidelities, e)).collect();
        if let Some(fs) = fs {
            let (m, s) = mean_std(&fs);
            fidelity.push((e + 1, m, s));
        }
    }
    let finals: Vec<f64> = sorted.iter().map(|r| r.final_loss()).collect();
    let final_fids: Vec<f64> = sorted.iter().map(|r| r.final_fidelity()).collect();
    Aggregate {
        num_runs: sorted.len(),
        converged_runs: sorted.iter().filter(|r| r.converged).count(),
        epochs,
        loss_mean,
        loss_std,
        fidelity,
        final_loss: mean_std(&finals),
        final_fidelity: mean_std(&final_fids),
        epochs_to_converge: sorted.iter().filter(|r| r.converged).map(|r| r.epochs()).collect(),
    }
}

/// Runs `num_runs` independent trainings (in parallel) and aggregates them.
pub fn multi_run(config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    let coupling = config.coupling()?;
    let target = config.target.matrix(config.num_qubits)?;
    let states = random_test_states(config.num_qubits, config.num_test_states, config.seed)?;
    let runs = (0..config.num_runs)
        .into_par_iter()
        .map(|run| {
            let init = init_params_for_run(config.num_qubits, config.depth, config.seed, run as u64)?;
            train_from(config, &coupling, &target, &states, init, run)
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregate = aggregate(&runs);
    let loss_floor = special_unitary_loss_floor(&target, config.num_qubits, config.loss_divisor);
    Ok(TrainReport { runs, aggregate, loss_floor })
}

impl TrainReport {
    /// `epoch,run,loss,fidelity`; fidelity is empty where not evaluated.
    pub fn traces_csv(&self) -> String {
        let mut out = String::from("epoch,run,loss,fidelity\n");
        for r in &self.runs {
            for (e, (l, f)) in r.losses.iter().zip(&r.fidelities).enumerate() {
                let f = f.map(fmt_f64).unwrap_or_default();
                out.push_str(&format!("{},{},{},{}\n", e + 1, r.run, fmt_f64(*l), f));
            }
        }
        out
    }

    /// Padded per-epoch statistics: `epoch,loss_mean,loss_std,fidelity_mean,fidelity_std`.
    pub fn aggregate_csv(&self) -> String {
        let a = &self.aggregate;
        let mut fid = a.fidelity.iter().peekable();
        let mut out = String::from("epoch,loss_mean,loss_std,fidelity_mean,fidelity_std\n");
        for e in 0..a.epochs {
            let (fm, fs) = match fid.peek() {
                Some(&&(ep, m, s)) if ep == e + 1 => {
                    fid.next();
                    (fmt_f64(m), fmt_f64(s))
                }
                _ => (String::new(), String::new()),
            };
            out.push_str(&format!("{},{},{},{fm},{fs}\n", e + 1, fmt_f64(a.loss_mean[e]), fmt_f64(a.loss_std[e])));
        }
        out
    }

    /// `run,layer,qubit,theta,vartheta,varphi` for the final parameters.
    pub fn params_csv(&self) -> String {
        let mut out = String::from("run,layer,qubit,theta,vartheta,varphi\n");
        for r in &self.runs {
            for line in r.final_params.to_csv().lines().skip(1) {
                out.push_str(&format!("{},{line}\n", r.run));
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let a = &self.aggregate;
        let mut out = String::new();
        out.push_str(&format!("runs: {}\n", a.num_runs));
        out.push_str(&format!("converged: {}/{}\n", a.converged_runs, a.num_runs));
        out.push_str(&format!("final loss: {} ± {}\n", fmt_f64(a.final_loss.0), fmt_f64(a.final_loss.1)));
        out.push_str(&format!(
            "final test fidelity: {} ± {}\n",
            fmt_f64(a.final_fidelity.0),
            fmt_f64(a.final_fidelity.1)
        ));
        out.push_str(&format!("loss floor (det = 1 circuits): {}\n", fmt_f64(self.loss_floor)));
        out.push_str(&format!("longest run: {} epochs\n", a.epochs));
        if let Some(min) = a.epochs_to_converge.iter().min() {
            out.push_str(&format!("fastest convergence: {min} epochs\n"));
        }
        for r in &self.runs {
            out.push_str(&format!(
                "run {}: epochs={} converged={} final_loss={} min_loss={} final_fidelity={}\n",
                r.run,
                r.epochs(),
                r.converged,
                fmt_f64(r.final_loss()),
                fmt_f64(r.min_loss()),
                fmt_f64(r.final_fidelity())
            ));
        }
        out
    }
}
