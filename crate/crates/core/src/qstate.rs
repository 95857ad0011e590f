//! Multipartite state representation and the linear-algebra substrate on
//! top of it: tensor products, partial traces, local operator application
//! and entropies.
//!
//! Flattening convention: amplitudes, matrix rows/columns and outcome tables
//! are stored row-major with site 0 as the most significant index, i.e. the
//! flat index of `(i_0, …, i_{n-1})` is `Σ_l i_l · Π_{m>l} d_m`.
//!
//! All entropies are in bits.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Operator, C64, ZERO};

/// Default cap on the total Hilbert-space dimension of dense states.
pub const DEFAULT_MAX_DIM: usize = 1 << 20;

/// Probabilities below this are treated as exact zeros by the entropies.
pub const PROB_ZERO: f64 = 1e-14;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;

/// Ordered local dimensions of an `n`-site system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_max_dim(dims, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(dims: Vec<usize>, max_dim: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument(
                "layout needs at least one site".into(),
            ));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidArgument(format!(
                "local dimension {d} is below 2"
            )));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= max_dim)
                .ok_or_else(|| {
                    Error::Unsupported(format!(
                        "total dimension of {dims:?} exceeds the dense cap {max_dim}"
                    ))
                })?;
        }
        Ok(Self { dims })
    }

    /// `n` sites of local dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Returns `Some(d)` when every site has the same dimension.
    pub fn uniform_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    /// Flat index → per-site digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Per-site digits → flat index.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    fn sub_layout(&self, sites: &[usize]) -> Self {
        Self {
            dims: sites.iter().map(|&s| self.dims[s]).collect(),
        }
    }

    /// Validates a site subset and returns it sorted.
    pub(crate) fn check_sites(&self, sites: &[usize]) -> Result<Vec<usize>> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("site subset is empty".into()));
        }
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument(format!(
                    "site {} listed twice",
                    w[0]
                )));
            }
        }
        if let Some(&s) = sorted.iter().find(|&&s| s >= self.n_sites()) {
            return Err(Error::InvalidArgument(format!(
                "site {s} out of range for {} sites",
                self.n_sites()
            )));
        }
        Ok(sorted)
    }

    pub(crate) fn complement(&self, sites: &[usize]) -> Vec<usize> {
        (0..self.n_sites()).filter(|s| !sites.contains(s)).collect()
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for l in (0..dims.len().saturating_sub(1)).rev() {
        s[l] = s[l + 1] * dims[l + 1];
    }
    s
}

/// Flat offsets contributed by every multi-index over `sites` (in the order
/// given, most significant first).
fn offsets(dims: &[usize], sites: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &s in sites {
        let mut next = Vec::with_capacity(out.len() * dims[s]);
        for &base in &out {
            for i in 0..dims[s] {
                next.push(base + i * st[s]);
            }
        }
        out = next;
    }
    out
}

/// Pure state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(layout: SubsystemLayout, amps: Vec<C64>) -> Result<Self> {
        let s = Self::unnormalized(layout, amps)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {n} differs from 1"
            )));
        }
        Ok(s)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(layout: SubsystemLayout, amps: Vec<C64>) -> Result<Self> {
        let mut s = Self::unnormalized(layout, amps)?;
        let n = s.norm_sqr().sqrt();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        s.amps.iter_mut().for_each(|a| *a /= n);
        Ok(s)
    }

    /// Vector with the right length but no norm constraint; the output of
    /// [`apply_local`] with non-unitary operators is of this kind.
    pub fn unnormalized(layout: SubsystemLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        Ok(Self { layout, amps })
    }

    /// Computational basis product state `|i_0 … i_{n-1}⟩`.
    pub fn basis_state(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.n_sites()
            || digits.iter().zip(layout.dims()).any(|(&i, &d)| i >= d)
        {
            return Err(Error::InvalidArgument(format!(
                "digits {digits:?} do not fit layout {:?}",
                layout.dims()
            )));
        }
        let mut amps = vec![ZERO; layout.total_dim()];
        amps[layout.index(digits)] = C64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_density(&self) -> DensityOperator {
        let n = self.amps.len();
        let m = DMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        DensityOperator {
            layout: self.layout.clone(),
            matrix: m,
        }
    }
}

/// Mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: SubsystemLayout,
    matrix: Operator,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(layout: SubsystemLayout, matrix: Operator) -> Result<Self> {
        let rho = Self::from_parts_unchecked(layout, matrix)?;
        let herm = linalg::hermiticity_defect(&rho.matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let (vals, _) = linalg::eigh(&rho.matrix)?;
        if vals[0] < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                vals[0]
            )));
        }
        Ok(rho)
    }

    /// Shape check only. For matrices built internally from valid pieces.
    pub(crate) fn from_parts_unchecked(layout: SubsystemLayout, matrix: Operator) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, layout needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { layout, matrix })
    }

    /// `I / D`.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self {
            matrix: Operator::identity(n, n).scale(1.0 / n as f64),
            layout,
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::eigh(&self.matrix)?.0)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self.eigenvalues()?.into_iter().filter(|&l| l > tol).count())
    }

    /// Convex combination `(1-w)·self + w·other`.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<DensityOperator> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch(
                "mixing states on different layouts".into(),
            ));
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: self.matrix.scale(1.0 - w) + other.matrix.scale(w),
        })
    }

    /// Reorders the sites: site `order[j]` of `self` becomes site `j`.
    pub fn permute_sites(&self, order: &[usize]) -> Result<DensityOperator> {
        let n = self.layout.n_sites();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&s| s >= n || std::mem::replace(&mut seen[s], true))
        {
            return Err(Error::InvalidArgument(format!(
                "{order:?} is not a permutation of {n} sites"
            )));
        }
        let dims = self.layout.dims();
        let new_layout = self.layout.sub_layout(order);
        // new flat index → old flat index
        let map = offsets(dims, order);
        let dim = map.len();
        let m = DMatrix::from_fn(dim, dim, |i, j| self.matrix[(map[i], map[j])]);
        Ok(Self {
            layout: new_layout,
            matrix: m,
        })
    }
}

/// Either a pure or a mixed state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl State {
    pub fn layout(&self) -> &SubsystemLayout {
        match self {
            State::Pure(s) => s.layout(),
            State::Mixed(r) => r.layout(),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&StateVector> {
        match self {
            State::Pure(s) => Some(s),
            State::Mixed(_) => None,
        }
    }
}

impl From<StateVector> for State {
    fn from(s: StateVector) -> Self {
        State::Pure(s)
    }
}

impl From<DensityOperator> for State {
    fn from(r: DensityOperator) -> Self {
        State::Mixed(r)
    }
}

/// Probability table over outcome tuples of a product measurement. The
/// outcome labels are implicit: entry `i` is the tuple
/// `SubsystemLayout::digits(i)` of the outcome shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    probs: Vec<f64>,
    shape: Vec<usize>,
}

impl ProbDist {
    /// Entries in `[-1e-12, 0)` are clamped to zero; anything more negative,
    /// or a sum off by more than `1e-10`, is rejected.
    pub fn new(shape: Vec<usize>, mut probs: Vec<f64>) -> Result<Self> {
        let expect: usize = shape.iter().product();
        if probs.len() != expect || shape.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for outcome shape {shape:?}",
                probs.len()
            )));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::InvalidArgument(format!("invalid probability {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs, shape })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn n_sites(&self) -> usize {
        self.shape.len()
    }

    /// Outcome tuple of entry `index`.
    pub fn label(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.shape.len()];
        for (slot, &d) in out.iter_mut().zip(&self.shape).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Probability of one outcome tuple.
    pub fn get(&self, outcome: &[usize]) -> f64 {
        let idx = outcome
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &d)| acc * d + i);
        self.probs[idx]
    }

    /// Marginal on `sites` (sorted, unique, in range).
    pub fn marginal(&self, sites: &[usize]) -> ProbDist {
        let rest: Vec<usize> = (0..self.shape.len())
            .filter(|s| !sites.contains(s))
            .collect();
        let keep_off = offsets(&self.shape, sites);
        let rest_off = offsets(&self.shape, &rest);
        let probs = keep_off
            .iter()
            .map(|&k| rest_off.iter().map(|&r| self.probs[k + r]).sum())
            .collect();
        ProbDist {
            probs,
            shape: sites.iter().map(|&s| self.shape[s]).collect(),
        }
    }
}

/// Shannon entropy in bits, `0·log 0 = 0`.
pub fn shannon_entropy(p: &ProbDist) -> f64 {
    entropy_bits(p.probs())
}

/// Shannon entropy of a raw probability slice; entries below
/// [`PROB_ZERO`] contribute nothing.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > PROB_ZERO)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let vals = rho.eigenvalues()?;
    if vals[0] < EIGEN_FLOOR {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {:.3e}",
            vals[0]
        )));
    }
    let clamped: Vec<f64> = vals.into_iter().map(|l| l.max(0.0)).collect();
    Ok(entropy_bits(&clamped))
}

/// One factor of a tensor product.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Pure(StateVector),
    Mixed(DensityOperator),
    Op(Operator),
}

/// Kronecker product of same-kind factors in site order.
pub fn tensor_product(factors: &[Factor]) -> Result<Factor> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("tensor product of an empty list".into()))?;
    match first {
        Factor::Pure(_) => {
            let states = factors
                .iter()
                .map(|f| match f {
                    Factor::Pure(s) => Ok(s),
                    _ => Err(mixed_kinds()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Factor::Pure(kron_states(&states)?))
        }
        Factor::Mixed(_) => {
            let states = factors
                .iter()
                .map(|f| match f {
                    Factor::Mixed(r) => Ok(r),
                    _ => Err(mixed_kinds()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Factor::Mixed(kron_densities(&states)?))
        }
        Factor::Op(_) => {
            let ops = factors
                .iter()
                .map(|f| match f {
                    Factor::Op(o) => Ok(o),
                    _ => Err(mixed_kinds()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Factor::Op(kron_ops(&ops)))
        }
    }
}

fn mixed_kinds() -> Error {
    Error::InvalidArgument("tensor product factors are of mixed kinds".into())
}

fn concat_layouts<'a>(
    layouts: impl Iterator<Item = &'a SubsystemLayout>,
) -> Result<SubsystemLayout> {
    SubsystemLayout::new(layouts.flat_map(|l| l.dims().iter().copied()).collect())
}

pub fn kron_states(states: &[&StateVector]) -> Result<StateVector> {
    let layout = concat_layouts(states.iter().map(|s| s.layout()))?;
    let mut amps = vec![C64::new(1.0, 0.0)];
    for s in states {
        amps = amps
            .iter()
            .flat_map(|&a| s.amplitudes().iter().map(move |&b| a * b))
            .collect();
    }
    Ok(StateVector { layout, amps })
}

pub fn kron_densities(states: &[&DensityOperator]) -> Result<DensityOperator> {
    let layout = concat_layouts(states.iter().map(|s| s.layout()))?;
    let matrix = kron_ops(&states.iter().map(|s| s.matrix()).collect::<Vec<_>>());
    Ok(DensityOperator { layout, matrix })
}

pub fn kron_ops(ops: &[&Operator]) -> Operator {
    ops.iter()
        .fold(Operator::identity(1, 1), |acc, o| linalg::kron(&acc, o))
}

/// Reduced density operator on `keep` (site indices are 0-based; the
/// result lists the kept sites in ascending order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let layout = rho.layout();
    let keep = layout.check_sites(keep)?;
    let rest = layout.complement(&keep);
    let k_off = offsets(layout.dims(), &keep);
    let r_off = offsets(layout.dims(), &rest);
    let m = rho.matrix();
    let out = DMatrix::from_fn(k_off.len(), k_off.len(), |a, b| {
        r_off
            .iter()
            .map(|&t| m[(k_off[a] + t, k_off[b] + t)])
            .sum::<C64>()
    });
    Ok(DensityOperator {
        layout: layout.sub_layout(&keep),
        matrix: out,
    })
}

/// Reduced state of a pure state, computed as `M M†` of the reshaped
/// amplitude matrix.
pub fn partial_trace_pure(psi: &StateVector, keep: &[usize]) -> Result<DensityOperator> {
    let layout = psi.layout();
    let keep = layout.check_sites(keep)?;
    let rest = layout.complement(&keep);
    let k_off = offsets(layout.dims(), &keep);
    let r_off = offsets(layout.dims(), &rest);
    let a = psi.amplitudes();
    let m = DMatrix::from_fn(k_off.len(), r_off.len(), |i, t| a[k_off[i] + r_off[t]]);
    Ok(DensityOperator {
        layout: layout.sub_layout(&keep),
        matrix: &m * m.adjoint(),
    })
}

/// `(O_0 ⊗ … ⊗ O_{n-1})|ψ⟩` applied site by site. The result is not
/// renormalized.
pub fn apply_local(ops: &[Operator], psi: &StateVector) -> Result<StateVector> {
    let layout = psi.layout();
    check_local_ops(layout, ops.iter().map(Some))?;
    let mut amps = psi.amplitudes().to_vec();
    let refs: Vec<Option<&Operator>> = ops.iter().map(Some).collect();
    apply_local_in_place(layout.dims(), &refs, &mut amps);
    Ok(StateVector {
        layout: layout.clone(),
        amps,
    })
}

pub(crate) fn check_local_ops<'a>(
    layout: &SubsystemLayout,
    ops: impl ExactSizeIterator<Item = Option<&'a Operator>>,
) -> Result<()> {
    if ops.len() != layout.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} local operators for {} sites",
            ops.len(),
            layout.n_sites()
        )));
    }
    for (l, (op, &d)) in ops.zip(layout.dims()).enumerate() {
        if let Some(op) = op {
            if op.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!(
                    "operator on site {l} is {}x{}, site dimension is {d}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
    }
    Ok(())
}

/// In-place local application on a flat amplitude buffer; `None` entries
/// are identities. Shapes must already be checked.
pub(crate) fn apply_local_in_place(dims: &[usize], ops: &[Option<&Operator>], data: &mut [C64]) {
    let total: usize = dims.iter().product();
    debug_assert_eq!(data.len(), total);
    let mut left = 1usize;
    let mut fiber = Vec::new();
    for (l, &d) in dims.iter().enumerate() {
        let right = total / (left * d);
        if let Some(op) = ops[l] {
            fiber.resize(d, ZERO);
            for lo in 0..left {
                for r in 0..right {
                    let base = lo * d * right + r;
                    for (b, slot) in fiber.iter_mut().enumerate() {
                        *slot = data[base + b * right];
                    }
                    for a in 0..d {
                        let mut acc = ZERO;
                        for (b, &v) in fiber.iter().enumerate() {
                            acc += op[(a, b)] * v;
                        }
                        data[base + a * right] = acc;
                    }
                }
            }
        }
        left *= d;
    }
}

/// `(⊗O_l) ρ (⊗O_l)†` computed with local operations only.
pub(crate) fn conjugate_local(rho: &DensityOperator, ops: &[Option<&Operator>]) -> Operator {
    let dims = rho.layout().dims();
    let mut m = rho.matrix().clone();
    let n = m.nrows();
    // left action on every column
    for col in m.as_mut_slice().chunks_mut(n) {
        apply_local_in_place(dims, ops, col);
    }
    // right action: (W (W ρ)†)† = W ρ W†
    let mut t = m.adjoint();
    for col in t.as_mut_slice().chunks_mut(n) {
        apply_local_in_place(dims, ops, col);
    }
    t.adjoint()
}

/// Applies local unitaries to a density operator: `U ρ U†`.
pub fn conjugate_by_local(rho: &DensityOperator, ops: &[Operator]) -> Result<DensityOperator> {
    check_local_ops(rho.layout(), ops.iter().map(Some))?;
    let refs: Vec<Option<&Operator>> = ops.iter().map(Some).collect();
    Ok(DensityOperator {
        layout: rho.layout().clone(),
        matrix: conjugate_local(rho, &refs),
    })
}

/// JSON wire format for states:
/// `{"dims": [...], "kind": "pure", "amplitudes": [[re, im], ...]}` or
/// `{"dims": [...], "kind": "mixed", "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

impl State {
    pub fn from_json_str(text: &str) -> Result<State> {
        let raw: StateJson = serde_json::from_str(text)?;
        State::try_from(raw)
    }

    pub fn to_json(&self) -> StateJson {
        let pair = |z: &C64| [z.re, z.im];
        match self {
            State::Pure(s) => StateJson {
                dims: s.layout().dims().to_vec(),
                kind: StateKind::Pure,
                amplitudes: Some(s.amplitudes().iter().map(pair).collect()),
                matrix: None,
            },
            State::Mixed(r) => {
                let m = r.matrix();
                StateJson {
                    dims: r.layout().dims().to_vec(),
                    kind: StateKind::Mixed,
                    amplitudes: None,
                    matrix: Some(
                        (0..m.nrows())
                            .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
                            .collect(),
                    ),
                }
            }
        }
    }
}

impl TryFrom<StateJson> for State {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<State> {
        let layout = SubsystemLayout::new(raw.dims)?;
        match (raw.kind, raw.amplitudes, raw.matrix) {
            (StateKind::Pure, Some(amps), None) => {
                let amps = amps.into_iter().map(|[re, im]| C64::new(re, im)).collect();
                Ok(State::Pure(StateVector::new(layout, amps)?))
            }
            (StateKind::Mixed, None, Some(rows)) => {
                let n = layout.total_dim();
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("matrix must be {n}x{n}")));
                }
                let m = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
                Ok(State::Mixed(DensityOperator::new(layout, m)?))
            }
            (StateKind::Pure, _, _) => Err(Error::Parse(
                "a pure state needs \"amplitudes\" and no \"matrix\"".into(),
            )),
            (StateKind::Mixed, _, _) => Err(Error::Parse(
                "a mixed state needs \"matrix\" and no \"amplitudes\"".into(),
            )),
        }
    }
}
