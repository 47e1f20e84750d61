//! Pair-gate transpilation: a two-qubit `Z⊗Z` gate on any chosen pair built
//! from repeated global entanglers conjugated by X masks.
//!
//! Conjugating the diagonal `U_C` by `X_m` flips the sign of every `Z_i Z_j`
//! term with exactly one of `i, j` in `m`. Starting from
//! `U^(1) = X_pair U_C X_pair U_C`, which cancels every coupling between the
//! pair and the rest, each iteration
//! `U^(k+1) = X_{I_k} U^(k) X_{I_k} U^(k)` halves the surviving index sets,
//! where `I_k` collects the X-halves of all level-`k` sets. After
//! `K = ⌈log₂N⌉ + 3` iterations only the pair is left:
//! `U^(K) = U_pair^{2^{K-1}}` with `U_pair = exp(-iλ²Δ_pair Z⊗Z)`.
//!
//! Plans store masks in physical qubit labels. Internally the target pair
//! sits at positions `(N-2, N-1)` and the remaining qubits keep ascending
//! order; the plan records that relabeling.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::field::CouplingMatrix;
use crate::linalg::{phase_min_distance, CMatrix, C64};
use crate::sim::{entangler_phases, spin};

/// Default distance (radians) the pair angle must keep from multiples of π.
pub const DEFAULT_ANGLE_MARGIN: f64 = 0.1;

/// Largest register supported by the bitmask representation.
pub const MAX_PLAN_QUBITS: usize = 63;

/// `⌈log₂ N⌉` for `N ≥ 1`.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1);
    usize::BITS - (n - 1).leading_zeros()
}

/// Number of iterations `K = ⌈log₂N⌉ + 3`.
pub fn iteration_count(num_qubits: usize) -> u32 {
    ceil_log2(num_qubits) + 3
}

/// Power of `U_pair` realized by the full plan, `2^{⌈log₂N⌉+2}`.
pub fn pair_exponent(num_qubits: usize) -> u64 {
    1 << (iteration_count(num_qubits) - 1)
}

/// Number of global entanglers used by the full plan, `2^{⌈log₂N⌉+3}`.
pub fn layer_cost(num_qubits: usize) -> u64 {
    1 << iteration_count(num_qubits)
}

/// Bound on the largest index set at level `k`:
/// `max{N/2^k + 2 - 1/2^{k-1}, 1}`.
pub fn max_set_size_bound(num_qubits: usize, k: u32) -> f64 {
    assert!(k >= 1, "levels start at 1");
    let n = num_qubits as f64;
    let p = 2f64.powi(k as i32);
    (n / p + 2.0 - 2.0 / p).max(1.0)
}

/// Index sets at one level of the recursive halving, keyed by their label
/// `J_1…J_k` written with `1` and `X`. Level 0 has the single empty label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    pub level: u32,
    pub sets: BTreeMap<String, Vec<usize>>,
}

impl IndexPartition {
    fn root(indices: Vec<usize>) -> Self {
        Self { level: 0, sets: BTreeMap::from([(String::new(), indices)]) }
    }

    /// Splits every set; the X child takes the first `⌊|parent|/2⌋` entries.
    fn split(&self) -> Self {
        let mut sets = BTreeMap::new();
        for (label, set) in &self.sets {
            let half = set.len() / 2;
            sets.insert(format!("{label}X"), set[..half].to_vec());
            sets.insert(format!("{label}1"), set[half..].to_vec());
        }
        Self { level: self.level + 1, sets }
    }

    /// Union of all X children at this level, as a bitmask.
    pub fn x_mask(&self) -> u64 {
        self.sets
            .iter()
            .filter(|(label, _)| label.ends_with('X'))
            .flat_map(|(_, set)| set.iter())
            .fold(0, |m, &q| m | (1 << q))
    }

    pub fn max_size(&self) -> usize {
        self.sets.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Label of the set containing `q`, if any.
    pub fn label_of(&self, q: usize) -> Option<&str> {
        self.sets.iter().find(|(_, s)| s.contains(&q)).map(|(l, _)| l.as_str())
    }
}

/// Ordered masked-entangler steps. Step `s` applies `X_{mask_s} U_C X_{mask_s}`;
/// steps run in the listed order (first step acts first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranspilePlan {
    pub num_qubits: usize,
    pub target_pair: (usize, usize),
    /// Internal position `k` holds physical qubit `permutation[k]`.
    pub permutation: Vec<usize>,
    pub steps: Vec<u64>,
    /// Power of `U_pair` the plan realizes (0 for the elimination plan).
    pub expected_exponent: u64,
    pub layer_cost: u64,
    /// Partitions at levels `0..K-1`; level `k` feeds iteration `k + 1`.
    pub partitions: Vec<IndexPartition>,
}

fn check_pair(num_qubits: usize, (a, b): (usize, usize)) -> Result<()> {
    if !(2..=MAX_PLAN_QUBITS).contains(&num_qubits) {
        return Err(invalid("num_qubits", format!("plans need 2 ≤ N ≤ {MAX_PLAN_QUBITS}, got {num_qubits}")));
    }
    if a == b || a >= num_qubits || b >= num_qubits {
        return Err(Error::InvalidPair(a, b));
    }
    Ok(())
}

/// Plan realizing `U_pair^{2^{⌈log₂N⌉+2}}` on `target_pair` (0-based,
/// unordered).
pub fn pair_gate_plan(num_qubits: usize, target_pair: (usize, usize)) -> Result<TranspilePlan> {
    check_pair(num_qubits, target_pair)?;
    let (a, b) = target_pair;
    let mut permutation: Vec<usize> = (0..num_qubits).filter(|&q| q != a && q != b).collect();
    permutation.extend([a, b]);

    let k_total = iteration_count(num_qubits);
    let mut partitions = vec![IndexPartition::root(permutation[..num_qubits - 2].to_vec())];
    let mut steps = vec![0, (1 << a) | (1 << b)];
    for _ in 1..k_total {
        let next = partitions.last().expect("root partition").split();
        let flip = next.x_mask();
        let repeated: Vec<u64> = steps.iter().map(|m| m ^ flip).collect();
        steps.extend(repeated);
        partitions.push(next);
    }
    debug_assert_eq!(steps.len() as u64, layer_cost(num_qubits));
    Ok(TranspilePlan {
        num_qubits,
        target_pair,
        permutation,
        steps,
        expected_exponent: pair_exponent(num_qubits),
        layer_cost: layer_cost(num_qubits),
        partitions,
    })
}

/// Plan whose product is the identity: the pair plan followed by the same
/// plan with the second pair qubit (internal position `N-1`) also flipped,
/// which inverts `U_pair^{2^{⌈log₂N⌉+2}}` exactly.
pub fn eliminate_pair_gate_plan(num_qubits: usize) -> Result<TranspilePlan> {
    let mut plan = pair_gate_plan(num_qubits, (num_qubits.saturating_sub(2), num_qubits.saturating_sub(1)))?;
    let flip = 1u64 << (num_qubits - 1);
    let second: Vec<u64> = plan.steps.iter().map(|m| m ^ flip).collect();
    plan.steps.extend(second);
    plan.layer_cost *= 2;
    plan.expected_exponent = 0;
    Ok(plan)
}

/// Dense product of masked entanglers, first mask acting first.
pub fn execute_masks(masks: &[u64], coupling: &CouplingMatrix, lambda: f64) -> Result<CMatrix> {
    let n = coupling.num_qubits();
    if n > 12 {
        return Err(Error::TooManyQubits(n, 12));
    }
    let dim = 1usize << n;
    if let Some(&m) = masks.iter().find(|&&m| m >> n != 0) {
        return Err(invalid("mask", format!("{m:#x} touches qubits beyond {n}")));
    }
    let phases = entangler_phases(coupling, lambda);
    let mut u = CMatrix::identity(dim);
    let mut scratch = CMatrix::zeros(dim, dim);
    let permute_rows = |src: &CMatrix, dst: &mut CMatrix, m: usize| {
        for r in 0..dim {
            dst.as_mut_slice()[r * dim..(r + 1) * dim].copy_from_slice(src.row(r ^ m));
        }
    };
    for &mask in masks {
        let m = mask as usize;
        // X_m U_C X_m U: permute rows, scale, permute back
        permute_rows(&u, &mut scratch, m);
        scratch.scale_rows(&phases);
        permute_rows(&scratch, &mut u, m);
    }
    Ok(u)
}

pub fn execute_plan(plan: &TranspilePlan, coupling: &CouplingMatrix, lambda: f64) -> Result<CMatrix> {
    if coupling.num_qubits() != plan.num_qubits {
        return Err(Error::DimensionMismatch { expected: plan.num_qubits, found: coupling.num_qubits() });
    }
    execute_masks(&plan.steps, coupling, lambda)
}

/// `exp(-iλ² · exponent · Δ_pair · Z_a Z_b)` on `N` qubits.
pub fn expected_pair_unitary(
    delta_pair_value: f64,
    lambda: f64,
    exponent: u64,
    num_qubits: usize,
    target_pair: (usize, usize),
) -> Result<CMatrix> {
    check_pair(num_qubits, target_pair)?;
    let (a, b) = target_pair;
    let angle = lambda * lambda * exponent as f64 * delta_pair_value;
    let diag: Vec<C64> =
        (0..1usize << num_qubits).map(|s| C64::from_polar(1.0, -angle * spin(s, a) * spin(s, b))).collect();
    Ok(CMatrix::from_diagonal(&diag))
}

/// Angle `2^{⌈log₂N⌉+2} λ² Δ_pair` of the transpiled pair gate.
pub fn pair_angle(delta_pair_value: f64, lambda: f64, num_qubits: usize) -> f64 {
    pair_exponent(num_qubits) as f64 * lambda * lambda * delta_pair_value
}

/// Distance of `angle` to the nearest multiple of π.
pub fn distance_to_pi_multiple(angle: f64) -> f64 {
    (angle - PI * (angle / PI).round()).abs()
}

/// True iff the transpiled pair angle stays more than `margin` away from
/// every multiple of π.
///
/// Note that odd multiples of π/2 pass this test although
/// `exp(-i(π/2) Z⊗Z) = -i Z⊗Z` is a product operator; use
/// [`operator_schmidt_rank`] when that case matters.
pub fn check_entangling_angle(delta_pair_value: f64, lambda: f64, num_qubits: usize, margin: f64) -> Result<bool> {
    if !(margin > 0.0) {
        return Err(invalid("margin", "must be > 0"));
    }
    Ok(distance_to_pi_multiple(pair_angle(delta_pair_value, lambda, num_qubits)) > margin)
}

/// The 4×4 action of `u` on qubits `(a, b)` with all other qubits in `|0⟩`,
/// indexed as `2·bit_a + bit_b`.
pub fn two_qubit_block(u: &CMatrix, (a, b): (usize, usize)) -> CMatrix {
    let idx = |k: usize| (((k >> 1) & 1) << a) | ((k & 1) << b);
    CMatrix::from_fn(4, 4, |r, c| u[(idx(r), idx(c))])
}

/// Operator Schmidt rank of a two-qubit operator across its two factors.
pub fn operator_schmidt_rank(block: &CMatrix, tol: f64) -> usize {
    // U_{(a1 a2),(b1 b2)} → M_{(a1 b1),(a2 b2)}
    let m = CMatrix::from_fn(4, 4, |r, c| {
        let (a1, b1) = (r >> 1, r & 1);
        let (a2, b2) = (c >> 1, c & 1);
        block[(2 * a1 + a2, 2 * b1 + b2)]
    });
    m.singular_values().iter().filter(|&&s| s > tol).count()
}

/// Pairwise multipliers `m_ij = Σ_steps s_i s_j`, `s = -1` for masked qubits.
/// The composed operator is `exp(-(iλ²/2) Σ_{i<j} m_ij Δ_ij Z_i Z_j)`.
pub fn symbolic_multipliers(num_qubits: usize, masks: &[u64]) -> Vec<i64> {
    let n = num_qubits;
    let mut m = vec![0i64; n * n];
    for &mask in masks {
        for i in 0..n {
            let si = if (mask >> i) & 1 == 1 { -1 } else { 1 };
            for j in 0..n {
                let sj = if (mask >> j) & 1 == 1 { -1 } else { 1 };
                m[i * n + j] += si * sj;
            }
        }
    }
    m
}

/// Per-iteration outcome of the symbolic check.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityReport {
    /// Iteration `k` (1-based).
    pub iteration: u32,
    pub steps: usize,
    /// Largest index set the surviving couplings may live in.
    pub max_set_size: usize,
    pub bound: f64,
    /// Count of pairs whose multiplier disagrees with the expected pattern.
    pub violations: usize,
}

/// Verifies on the symbolic phase exponents that after iteration `k` every
/// surviving `Z_iZ_j` term has both qubits in one level-`(k-1)` set (or is
/// the target pair), with multiplier exactly `2^k`, and that set sizes obey
/// [`max_set_size_bound`].
pub fn verify_locality(plan: &TranspilePlan) -> Vec<LocalityReport> {
    let n = plan.num_qubits;
    let (a, b) = plan.target_pair;
    let iterations = plan.partitions.len() as u32;
    (1..=iterations)
        .map(|k| {
            let steps = 1usize << k;
            let mult = symbolic_multipliers(n, &plan.steps[..steps]);
            let part = &plan.partitions[(k - 1) as usize];
            let mut violations = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let is_pair = (i, j) == (a.min(b), a.max(b));
                    let same_set = matches!((part.label_of(i), part.label_of(j)), (Some(x), Some(y)) if x == y);
                    let expected = if is_pair || same_set { steps as i64 } else { 0 };
                    if mult[i * n + j] != expected {
                        violations += 1;
                    }
                }
            }
            let next_level = plan.partitions.get(k as usize).map_or(0, IndexPartition::max_size);
            let bound = max_set_size_bound(n, k);
            if next_level as f64 > bound {
                violations += 1;
            }
            LocalityReport { iteration: k, steps, max_set_size: part.max_size(), bound, violations }
        })
        .collect()
}

/// Result of a dense plan check.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// Phase-minimized max-entry distance between executed and expected.
    pub residual: f64,
    pub angle: f64,
    pub angle_ok: bool,
}

/// Executes `plan` against `coupling` and compares with the expected pair
/// unitary (or the identity for an elimination plan).
pub fn verify_plan(plan: &TranspilePlan, coupling: &CouplingMatrix, lambda: f64, margin: f64) -> Result<Verification> {
    let u = execute_plan(plan, coupling, lambda)?;
    let (a, b) = plan.target_pair;
    let d = coupling.delta(a, b);
    let expected = expected_pair_unitary(d, lambda, plan.expected_exponent, plan.num_qubits, plan.target_pair)?;
    Ok(Verification {
        residual: phase_min_distance(&u, &expected),
        angle: pair_angle(d, lambda, plan.num_qubits),
        angle_ok: check_entangling_angle(d, lambda, plan.num_qubits, margin)?,
    })
}

impl TranspilePlan {
    /// Line-oriented text form: a `key=value` header, then one
    /// `mask=<hex> ; UC` line per step.
    pub fn to_text(&self) -> String {
        let perm: Vec<String> = self.permutation.iter().map(usize::to_string).collect();
        let mut out = format!(
            "N={}\ntarget_pair={},{}\npermutation={}\nexponent={}\nlayer_cost={}\n",
            self.num_qubits,
            self.target_pair.0,
            self.target_pair.1,
            perm.join(","),
            self.expected_exponent,
            self.layer_cost
        );
        for m in &self.steps {
            out.push_str(&format!("mask={m:#x} ; UC\n"));
        }
        out
    }
}
