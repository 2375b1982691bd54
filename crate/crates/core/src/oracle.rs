//! Monte-Carlo oracle: concrete tree circuits simulated as stabilizer states.
//!
//! A realization of depth `t` starts from a Bell pair between the reference
//! `R` (qubit 0) and the root `A` (qubit 1). Each of the `2^t - 1` internal
//! nodes, visited in preorder, carries one edge slot:
//!
//! 1. with probability `r`, a CNOT copies the qubit onto a fresh
//!    environment qubit;
//! 2. with probability `p`, one of the six one-qubit Cliffords acts;
//! 3. a CNOT onto a fresh recruit branches the qubit into two children.
//!
//! Randomness is drawn from a ChaCha8 stream keyed by `(seed, index)` in a
//! fixed order (gates, eavesdrop flags, leaf keys, environment keys), so
//! samples are independent of evaluation order. Access sets are `{key < f}`,
//! which makes sets at different `f` nested within one realization.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{S3Perm, SubgroupLabel};
use crate::eavesdrop::EavesdropParams;
use crate::error::{check_unit, Error, Result};
use crate::recursion::ModelParams;
use crate::tableau::StabTableau;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_7ee5;

/// Largest supported depth (`2^16 + 1` system qubits).
pub const MAX_DEPTH: u32 = 16;

pub const REFERENCE: usize = 0;
pub const ROOT: usize = 1;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeRealization {
    pub t: u32,
    pub p: f64,
    pub r: f64,
    pub seed: u64,
    pub index: u64,
    /// One slot per internal edge, in preorder; `None` is the identity.
    pub gates: Vec<Option<S3Perm>>,
    /// One flag per internal edge, in preorder.
    pub eavesdrops: Vec<bool>,
    /// Access keys of the leaves, in tree order.
    pub leaf_keys: Vec<f64>,
    /// Access keys of the environment qubits, in creation order.
    pub env_keys: Vec<f64>,
}

/// A built state with the qubit indices of leaves and environment.
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub tableau: StabTableau,
    pub leaves: Vec<usize>,
    pub environment: Vec<usize>,
}

impl TreeRealization {
    pub fn sample(t: u32, p: f64, r: f64, seed: u64, index: u64) -> Result<Self> {
        check_depth(t)?;
        check_unit("p", p)?;
        check_unit("r", r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let internal = (1usize << t) - 1;
        let mut gates = Vec::with_capacity(internal);
        for _ in 0..internal {
            let key: f64 = rng.random();
            let perm = S3Perm::ALL[rng.random_range(0..6)];
            gates.push((key < p).then_some(perm));
        }
        let eavesdrops: Vec<bool> = (0..internal).map(|_| rng.random::<f64>() < r).collect();
        let leaf_keys = (0..1usize << t).map(|_| rng.random()).collect();
        let env_keys = (0..eavesdrops.iter().filter(|&&e| e).count()).map(|_| rng.random()).collect();
        Ok(TreeRealization { t, p, r, seed, index, gates, eavesdrops, leaf_keys, env_keys })
    }

    pub fn num_system_qubits(&self) -> usize {
        (1usize << self.t) + 1
    }

    pub fn build(&self) -> BuiltState {
        let n_sys = self.num_system_qubits();
        let mut b = Builder {
            real: self,
            tableau: StabTableau::zero_state(n_sys + self.env_keys.len()),
            leaves: Vec::with_capacity(1 << self.t),
            environment: Vec::with_capacity(self.env_keys.len()),
            next_recruit: ROOT + 1,
            next_env: n_sys,
            edge: 0,
        };
        b.tableau.hadamard(REFERENCE);
        b.tableau.cnot(REFERENCE, ROOT);
        b.visit(ROOT, 0);
        BuiltState { tableau: b.tableau, leaves: b.leaves, environment: b.environment }
    }
}

struct Builder<'a> {
    real: &'a TreeRealization,
    tableau: StabTableau,
    leaves: Vec<usize>,
    environment: Vec<usize>,
    next_recruit: usize,
    next_env: usize,
    edge: usize,
}

impl Builder<'_> {
    fn visit(&mut self, q: usize, depth: u32) {
        if depth == self.real.t {
            self.leaves.push(q);
            return;
        }
        let e = self.edge;
        self.edge += 1;
        if self.real.eavesdrops[e] {
            self.tableau.cnot(q, self.next_env);
            self.environment.push(self.next_env);
            self.next_env += 1;
        }
        if let Some(perm) = self.real.gates[e] {
            self.tableau.apply_perm(q, perm);
        }
        let recruit = self.next_recruit;
        self.next_recruit += 1;
        self.tableau.cnot(q, recruit);
        self.visit(q, depth + 1);
        self.visit(recruit, depth + 1);
    }
}

fn check_depth(t: u32) -> Result<()> {
    if t > MAX_DEPTH {
        return Err(Error::OutOfRange { name: "t", value: t as f64, min: 0.0, max: MAX_DEPTH as f64 });
    }
    Ok(())
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::OutOfRange { name: "samples", value: 0.0, min: 1.0, max: f64::INFINITY });
    }
    Ok(())
}

impl BuiltState {
    /// Leaves with key below `f`.
    pub fn leaf_access(&self, real: &TreeRealization, f: f64) -> Vec<usize> {
        select(&self.leaves, &real.leaf_keys, f)
    }

    /// Environment qubits with key below `f`.
    pub fn env_access(&self, real: &TreeRealization, f: f64) -> Vec<usize> {
        select(&self.environment, &real.env_keys, f)
    }

    pub fn entropy(&self, subset: &[usize]) -> usize {
        self.tableau.entropy(subset)
    }

    /// `I(R, F) = S(R) + S(F) - S(RF)` in bits.
    pub fn mutual_information(&self, access: &[usize]) -> usize {
        let mut rf = Vec::with_capacity(access.len() + 1);
        rf.push(REFERENCE);
        rf.extend_from_slice(access);
        self.entropy(&[REFERENCE]) + self.entropy(access) - self.entropy(&rf)
    }

    pub fn subgroup(&self, access: &[usize], z_only: bool) -> SubgroupLabel {
        self.tableau.extract_subgroup(REFERENCE, access, z_only)
    }

    /// `(Tr ρ_F², Tr ρ_RF²)`; stabilizer spectra are flat, so `2^{-S}`.
    pub fn purities(&self, access: &[usize]) -> (f64, f64) {
        let mut rf = Vec::with_capacity(access.len() + 1);
        rf.push(REFERENCE);
        rf.extend_from_slice(access);
        (libm::exp2(-(self.entropy(access) as f64)), libm::exp2(-(self.entropy(&rf) as f64)))
    }
}

fn select(qubits: &[usize], keys: &[f64], f: f64) -> Vec<usize> {
    qubits.iter().zip(keys).filter(|(_, &k)| k < f).map(|(&q, _)| q).collect()
}

/// Per-realization consistency of entropies and the subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyReport {
    pub access_size: usize,
    pub entropy_f: usize,
    pub mutual_information: usize,
    pub subgroup: SubgroupLabel,
    pub complement_subgroup: SubgroupLabel,
}

impl ConsistencyReport {
    /// `0 ≤ S(F) ≤ |F|`, `I ∈ {0,1,2}`, `I = dim s`, `dim s_F + dim s_{F^c} = 2`.
    pub fn holds(&self) -> bool {
        self.entropy_f <= self.access_size
            && self.mutual_information <= 2
            && self.mutual_information == self.subgroup.dim() as usize
            && self.subgroup.dim() + self.complement_subgroup.dim() == 2
    }
}

pub fn consistency_report(state: &BuiltState, access: &[usize]) -> ConsistencyReport {
    let complement: Vec<usize> = state.leaves.iter().copied().filter(|q| !access.contains(q)).collect();
    ConsistencyReport {
        access_size: access.len(),
        entropy_f: state.entropy(access),
        mutual_information: state.mutual_information(access),
        subgroup: state.subgroup(access, false),
        complement_subgroup: state.subgroup(&complement, false),
    }
}

/// Subgroup accessible from leaves in sample `index`.
pub fn sample_subgroup(params: &ModelParams, z_only: bool, seed: u64, index: u64) -> Result<SubgroupLabel> {
    let real = TreeRealization::sample(params.t, params.p, 0.0, seed, index)?;
    let state = real.build();
    Ok(state.subgroup(&state.leaf_access(&real, params.f), z_only))
}

/// Subgroup accessible from `Z` measurements on the environment at `p = 1`.
pub fn sample_subgroup_eavesdrop(params: &EavesdropParams, t: u32, seed: u64, index: u64) -> Result<SubgroupLabel> {
    let real = TreeRealization::sample(t, 1.0, params.r, seed, index)?;
    let state = real.build();
    Ok(state.subgroup(&state.env_access(&real, params.f), true))
}

/// Empirical distribution of subgroup labels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McEstimate {
    pub samples: u64,
    pub counts: [u64; 5],
    pub mean: [f64; 5],
    /// `sqrt(π̂ (1 - π̂) / n)` per label.
    pub stderr: [f64; 5],
}

impl McEstimate {
    pub fn from_counts(counts: [u64; 5]) -> Self {
        let samples: u64 = counts.iter().sum();
        let n = samples.max(1) as f64;
        let mean = counts.map(|c| c as f64 / n);
        McEstimate { samples, counts, mean, stderr: mean.map(|m| libm::sqrt(m * (1.0 - m) / n)) }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = SubgroupLabel>) -> Self {
        let mut counts = [0u64; 5];
        for s in labels {
            counts[s.index()] += 1;
        }
        Self::from_counts(counts)
    }

    /// Per-label z-scores against a reference distribution, using the
    /// binomial error of the reference probability.
    pub fn z_scores(&self, reference: &[f64; 5]) -> [f64; 5] {
        core::array::from_fn(|i| binomial_z(self.mean[i], reference[i], self.samples))
    }

    pub fn max_abs_z(&self, reference: &[f64; 5]) -> f64 {
        self.z_scores(reference).iter().fold(0.0, |m, z| f64::max(m, z.abs()))
    }
}

/// `(observed - reference) / sqrt(reference (1 - reference) / n)`, with the
/// gap shrunk by half a count (continuity correction) so that a single hit on
/// a rare label does not read as a large deviation. A reference of exactly 0
/// or 1 has no spread: any deviation beyond half a count is infinite.
pub fn binomial_z(observed: f64, reference: f64, samples: u64) -> f64 {
    let n = samples.max(1) as f64;
    let se = libm::sqrt(reference * (1.0 - reference) / n);
    let diff = observed - reference;
    let gap = (diff.abs() - 0.5 / n).max(0.0);
    if se > 0.0 {
        libm::copysign(gap / se, diff)
    } else if gap == 0.0 {
        0.0
    } else {
        libm::copysign(f64::INFINITY, diff)
    }
}

pub fn mc_estimate_pi(params: &ModelParams, z_only: bool, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    let mut labels = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        labels.push(sample_subgroup(params, z_only, seed, i)?);
    }
    Ok(McEstimate::from_labels(labels))
}

pub fn mc_estimate_pi_eavesdrop(params: &EavesdropParams, t: u32, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    let mut labels = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        labels.push(sample_subgroup_eavesdrop(params, t, seed, i)?);
    }
    Ok(McEstimate::from_labels(labels))
}

/// `I(R, F)` along nested access sets `{key < f}` of one realization.
pub fn nested_mi_curve(real: &TreeRealization, state: &BuiltState, f_grid: &[f64]) -> Vec<usize> {
    f_grid.iter().map(|&f| state.mutual_information(&state.leaf_access(real, f))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CurveShape {
    /// `I = 1` on both sides of `f = 1/2`.
    Plateau,
    /// `I = 0` below and `I = 2` above.
    Step,
    Other,
}

impl CurveShape {
    pub fn classify(below_half: usize, above_half: usize) -> Self {
        match (below_half, above_half) {
            (1, 1) => CurveShape::Plateau,
            (0, 2) => CurveShape::Step,
            _ => CurveShape::Other,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            CurveShape::Plateau => "plateau",
            CurveShape::Step => "step",
            CurveShape::Other => "other",
        }
    }
}

pub fn sample_curve_shape(p: f64, t: u32, probes: (f64, f64), seed: u64, index: u64) -> Result<CurveShape> {
    let real = TreeRealization::sample(t, p, 0.0, seed, index)?;
    let state = real.build();
    let curve = nested_mi_curve(&real, &state, &[probes.0, probes.1]);
    Ok(CurveShape::classify(curve[0], curve[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShapeCounts {
    pub plateau: u64,
    pub step: u64,
    pub other: u64,
}

impl ShapeCounts {
    pub fn add(&mut self, shape: CurveShape) {
        match shape {
            CurveShape::Plateau => self.plateau += 1,
            CurveShape::Step => self.step += 1,
            CurveShape::Other => self.other += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.plateau + self.step + self.other
    }

    pub fn plateau_fraction(&self) -> f64 {
        self.plateau as f64 / self.total().max(1) as f64
    }
}

/// Curve shapes of nested single-realization sweeps probed at two access
/// fractions on either side of `1/2`.
pub fn mc_curve_shapes(p: f64, t: u32, probes: (f64, f64), samples: usize, seed: u64) -> Result<ShapeCounts> {
    check_samples(samples)?;
    let mut counts = ShapeCounts::default();
    for i in 0..samples as u64 {
        counts.add(sample_curve_shape(p, t, probes, seed, i)?);
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub f: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Sample mean of `I(R, F)` on a grid of `f`, with nested access sets.
pub fn mc_mutual_info_curve(p: f64, t: u32, f_grid: &[f64], samples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    check_samples(samples)?;
    let mut sums = alloc::vec![(0.0, 0.0); f_grid.len()];
    for i in 0..samples as u64 {
        let real = TreeRealization::sample(t, p, 0.0, seed, i)?;
        let state = real.build();
        for (acc, mi) in sums.iter_mut().zip(nested_mi_curve(&real, &state, f_grid)) {
            acc.0 += mi as f64;
            acc.1 += (mi * mi) as f64;
        }
    }
    let n = samples as f64;
    Ok(f_grid
        .iter()
        .zip(sums)
        .map(|(&f, (s, s2))| {
            let mean = s / n;
            let var = if samples > 1 { (s2 - n * mean * mean) / (n - 1.0) } else { 0.0 };
            CurvePoint { f, mean, stderr: libm::sqrt(var.max(0.0) / n) }
        })
        .collect())
}

/// Accumulates `(Tr ρ_F², Tr ρ_RF²)` samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PurityAccumulator {
    n: u64,
    sum_f: f64,
    sum_rf: f64,
    sum_ff: f64,
    sum_rr: f64,
    sum_fr: f64,
}

impl PurityAccumulator {
    pub fn push(&mut self, (pf, prf): (f64, f64)) {
        self.n += 1;
        self.sum_f += pf;
        self.sum_rf += prf;
        self.sum_ff += pf * pf;
        self.sum_rr += prf * prf;
        self.sum_fr += pf * prf;
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum_f += other.sum_f;
        self.sum_rf += other.sum_rf;
        self.sum_ff += other.sum_ff;
        self.sum_rr += other.sum_rr;
        self.sum_fr += other.sum_fr;
    }

    pub fn finish(&self) -> PurityEstimate {
        let n = self.n.max(1) as f64;
        let (mf, mr) = (self.sum_f / n, self.sum_rf / n);
        let dof = (n - 1.0).max(1.0);
        let var_f = ((self.sum_ff - n * mf * mf) / dof).max(0.0);
        let var_r = ((self.sum_rr - n * mr * mr) / dof).max(0.0);
        let cov = (self.sum_fr - n * mf * mr) / dof;
        let ratio = mr / mf;
        // delta method for a ratio of correlated means
        let var_ratio = (var_r / (mf * mf) - 2.0 * mr * cov / (mf * mf * mf) + mr * mr * var_f / (mf * mf * mf * mf)) / n;
        PurityEstimate {
            samples: self.n,
            mean_f: mf,
            stderr_f: libm::sqrt(var_f / n),
            mean_rf: mr,
            stderr_rf: libm::sqrt(var_r / n),
            ratio,
            ratio_stderr: libm::sqrt(var_ratio.max(0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PurityEstimate {
    pub samples: u64,
    pub mean_f: f64,
    pub stderr_f: f64,
    pub mean_rf: f64,
    pub stderr_rf: f64,
    /// `mean(Tr ρ_RF²) / mean(Tr ρ_F²)`
    pub ratio: f64,
    pub ratio_stderr: f64,
}

pub fn sample_purities(params: &ModelParams, seed: u64, index: u64) -> Result<(f64, f64)> {
    let real = TreeRealization::sample(params.t, params.p, 0.0, seed, index)?;
    let state = real.build();
    Ok(state.purities(&state.leaf_access(&real, params.f)))
}

pub fn mc_purities(params: &ModelParams, samples: usize, seed: u64) -> Result<PurityEstimate> {
    check_samples(samples)?;
    let mut acc = PurityAccumulator::default();
    for i in 0..samples as u64 {
        acc.push(sample_purities(params, seed, i)?);
    }
    Ok(acc.finish())
}
