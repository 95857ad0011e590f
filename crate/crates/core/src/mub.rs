//! Mutually unbiased bases built from generalized Pauli (Weyl–Heisenberg)
//! operators, plus mutually unbiased measurements (MUMs).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, gcd, is_prime, omega_pow, Operator, C64, ONE};

const GRAM_TOL: f64 = 1e-10;
const UNBIASED_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-10;

/// Orthonormal basis of `C^d`, stored as the columns of a `d×d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Operator,
}

impl Basis {
    pub fn new(vectors: Operator) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::DimensionMismatch(
                "basis matrix must be square".into(),
            ));
        }
        let defect = linalg::unitarity_defect(&vectors);
        if defect > GRAM_TOL {
            return Err(Error::InvalidArgument(format!(
                "basis vectors are not orthonormal (Gram defect {defect:.3e})"
            )));
        }
        Ok(Self { vectors })
    }

    /// Computational basis.
    pub fn computational(d: usize) -> Self {
        Self {
            vectors: Operator::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Column `i` is basis vector `|b(i)⟩`.
    pub fn matrix(&self) -> &Operator {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i).iter().copied().collect()
    }

    /// `U|b(i)⟩` for every vector.
    pub fn rotated(&self, u: &Operator) -> Basis {
        Basis {
            vectors: u * &self.vectors,
        }
    }

    /// Largest deviation of `|⟨a(i)|b(j)⟩|²` from `1/d`.
    pub fn unbiasedness_defect(&self, other: &Basis) -> f64 {
        let d = self.dim();
        let g = self.vectors.adjoint() * &other.vectors;
        g.iter()
            .map(|z| (z.norm_sqr() - 1.0 / d as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// `N` pairwise mutually unbiased bases of `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    d: usize,
    bases: Vec<Basis>,
}

impl MubSet {
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let d = bases
            .first()
            .map(Basis::dim)
            .ok_or_else(|| Error::InvalidArgument("empty MUB set".into()))?;
        if bases.iter().any(|b| b.dim() != d) {
            return Err(Error::DimensionMismatch(
                "bases of different dimensions".into(),
            ));
        }
        let set = Self { d, bases };
        let defect = set.unbiasedness_defect();
        if defect > UNBIASED_TOL {
            return Err(Error::InvalidArgument(format!(
                "bases are not mutually unbiased (defect {defect:.3e})"
            )));
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn basis(&self, k: usize) -> &Basis {
        &self.bases[k]
    }

    /// First `n` bases of the set.
    pub fn truncated(&self, n: usize) -> Result<MubSet> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot take {n} of {} bases",
                self.len()
            )));
        }
        Ok(Self {
            d: self.d,
            bases: self.bases[..n].to_vec(),
        })
    }

    /// Maximum over `k≠k'`, `i`, `j` of `||⟨b_k(i)|b_k'(j)⟩|² − 1/d|`.
    pub fn unbiasedness_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, ba) in self.bases.iter().enumerate() {
            for bb in &self.bases[a + 1..] {
                worst = worst.max(ba.unbiasedness_defect(bb));
            }
        }
        worst
    }

    /// Largest Gram-matrix defect over the bases.
    pub fn orthonormality_defect(&self) -> f64 {
        self.bases
            .iter()
            .map(|b| linalg::unitarity_defect(b.matrix()))
            .fold(0.0, f64::max)
    }

    /// Checks both defining conditions at `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let o = self.orthonormality_defect();
        let u = self.unbiasedness_defect();
        if o > tol || u > tol {
            return Err(Error::Numerical(format!(
                "MUB validation failed: orthonormality defect {o:.3e}, unbiasedness defect {u:.3e}"
            )));
        }
        Ok(())
    }

    /// Every basis vector as `{"d", "N", "kind", "bases": [[[re, im], ...], ...]}`
    /// with one row-major matrix (columns = vectors) per basis.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "N": self.len(),
            "kind": "mub",
            "kappa": 1.0,
            "bases": self.bases.iter().map(|b| matrix_json(b.matrix())).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn matrix_json(m: &Operator) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Index `k = (k₁, k₂)` of the generalized Pauli operator `X^{k₁} Z^{k₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PauliIndex {
    pub k1: usize,
    pub k2: usize,
}

impl PauliIndex {
    pub const fn new(k1: usize, k2: usize) -> Self {
        Self { k1, k2 }
    }

    pub fn is_identity(&self, d: usize) -> bool {
        self.k1 % d == 0 && self.k2 % d == 0
    }

    /// `-k mod d`.
    pub fn neg(&self, d: usize) -> Self {
        Self::new((d - self.k1 % d) % d, (d - self.k2 % d) % d)
    }

    /// All non-identity indices in lexicographic order.
    pub fn all_nontrivial(d: usize) -> impl Iterator<Item = PauliIndex> {
        (0..d)
            .flat_map(move |a| (0..d).map(move |b| PauliIndex::new(a, b)))
            .filter(move |k| !k.is_identity(d))
    }
}

impl std::fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

/// Generalized Pauli operator `S_{d,k} = X_d^{k₁} Z_d^{k₂}` with
/// `X_d|j⟩ = |j+1 mod d⟩` and `Z_d|j⟩ = ω^j|j⟩`, `ω = exp(2πi/d)`.
pub fn gen_pauli(d: usize, k: PauliIndex) -> Operator {
    let mut m = Operator::zeros(d, d);
    for j in 0..d {
        m[((j + k.k1) % d, j)] = omega_pow(d, (k.k2 * j) as i64);
    }
    m
}

/// `S_{d,k}^m`.
pub fn gen_pauli_pow(d: usize, k: PauliIndex, m: usize) -> Operator {
    let s = gen_pauli(d, k);
    (0..m).fold(Operator::identity(d, d), |acc, _| acc * &s)
}

/// Whether `S_{d,k}` has a non-degenerate spectrum.
pub fn pauli_is_nondegenerate(d: usize, k: PauliIndex) -> bool {
    let (a, b) = (k.k1 % d, k.k2 % d);
    if a == 0 {
        b != 0 && gcd(b, d) == 1
    } else {
        gcd(a, d) == 1
    }
}

/// Common phase `λ` such that the eigenvalues of `S_{d,k}` are `λ·ω^i`.
/// It is 1 whenever `S_{d,k}^d = I`, which holds for every `k` when `d` is
/// odd; for even `d` it can be `exp(iπ/d)` (e.g. `X₂Z₂`, eigenvalues `±i`).
pub fn pauli_eigen_phase(d: usize, k: PauliIndex) -> C64 {
    let ab = (k.k1 % d) * (k.k2 % d);
    // S^d = (-1)^{ab(d-1)} I
    if (ab * (d - 1)) % 2 == 0 {
        ONE
    } else {
        C64::from_polar(1.0, std::f64::consts::PI / d as f64)
    }
}

/// Eigenbasis `{|i_k⟩}` of `S_{d,k}` ordered so that
/// `S_{d,k}|i_k⟩ = λ·ω^i|i_k⟩` with `λ` from [`pauli_eigen_phase`]. Each
/// vector's first nonzero component is real and positive.
///
/// Degenerate operators (e.g. `X₄²`) are rejected.
pub fn pauli_eigenbasis(d: usize, k: PauliIndex) -> Result<Basis> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} is below 2")));
    }
    if !pauli_is_nondegenerate(d, k) {
        return Err(Error::Unsupported(format!(
            "S_{{{d},{k}}} has a degenerate spectrum"
        )));
    }
    let (a, b) = (k.k1 % d, k.k2 % d);
    let mut v = Operator::zeros(d, d);
    if a == 0 {
        // Z^b|j⟩ = ω^{bj}|j⟩: eigenvalue ω^i sits at j = i·b⁻¹ mod d.
        let binv = (1..d)
            .find(|&x| (x * b) % d == 1)
            .expect("b is invertible mod d");
        for i in 0..d {
            v[((i * binv) % d, i)] = ONE;
        }
    } else {
        // Along the orbit m_t = t·a: λ c_{m_{t+1}} = ω^{b m_t} c_{m_t}, so
        // c_{m_t} = λ^{-t} ω^{ab·t(t-1)/2} c_0.
        let base = pauli_eigen_phase(d, k);
        let norm = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            let lambda = base * omega_pow(d, i as i64);
            for t in 0..d {
                let tri = (t * t.saturating_sub(1) / 2) as i64;
                let phase = lambda.powi(-(t as i32)) * omega_pow(d, (a * b) as i64 * tri);
                v[((t * a) % d, i)] = phase * norm;
            }
        }
    }
    Basis::new(v)
}

/// Pauli indices of the standard MUB construction in its fixed order:
/// `Z = (0,1)`, `X = (1,0)`, then `X Z^m = (1,m)` for `m = 1, 2, …`.
pub fn standard_pauli_indices(d: usize, n: usize) -> Result<Vec<PauliIndex>> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one basis".into()));
    }
    if n > d + 1 {
        return Err(Error::Unsupported(format!(
            "at most d+1 = {} MUBs exist in dimension {d}, requested {n}",
            d + 1
        )));
    }
    if n > 2 && !is_prime(d) {
        return Err(Error::Unsupported(format!(
            "more than two MUBs are only constructed for prime d (got d = {d})"
        )));
    }
    let mut out = vec![PauliIndex::new(0, 1)];
    if n >= 2 {
        out.push(PauliIndex::new(1, 0));
    }
    out.extend((1..=n.saturating_sub(2)).map(|m| PauliIndex::new(1, m)));
    Ok(out)
}

/// Standard set of `n` MUBs in dimension `d`: eigenbases of
/// [`standard_pauli_indices`]. Any `d` for `n ≤ 2`, prime `d` up to `n = d+1`.
pub fn standard_mub_set(d: usize, n: usize) -> Result<MubSet> {
    let bases = standard_pauli_indices(d, n)?
        .into_iter()
        .map(|k| pauli_eigenbasis(d, k))
        .collect::<Result<Vec<_>>>()?;
    MubSet::new(bases)
}

/// Maps every basis vector through the unitary `u`.
pub fn rotate_mub_set(set: &MubSet, u: &Operator) -> Result<MubSet> {
    if u.shape() != (set.d, set.d) {
        return Err(Error::DimensionMismatch(format!(
            "rotation is {}x{}, set dimension is {}",
            u.nrows(),
            u.ncols(),
            set.d
        )));
    }
    let defect = linalg::unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::InvalidArgument(format!(
            "rotation is not unitary (defect {defect:.3e})"
        )));
    }
    Ok(MubSet {
        d: set.d,
        bases: set.bases.iter().map(|b| b.rotated(u)).collect(),
    })
}

/// Orthonormal basis of traceless Hermitian operators used to build MUMs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TracelessBasis {
    /// Generalized Gell-Mann matrices (symmetric, antisymmetric, diagonal),
    /// grouped consecutively into `d+1` blocks of `d-1`.
    #[default]
    GellMann,
    /// Operators derived from the standard complete Pauli MUB set (prime `d`
    /// only); with this basis `κ = 1` reproduces the MUB projectors.
    PauliMub,
}

/// Complete set of `d+1` mutually unbiased measurements with efficiency κ.
#[derive(Debug, Clone)]
pub struct MumSet {
    d: usize,
    kappa: f64,
    measurements: Vec<Vec<Operator>>,
}

impl MumSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    /// POVM elements of measurement `k`.
    pub fn measurement(&self, k: usize) -> &[Operator] {
        &self.measurements[k]
    }

    pub fn measurements(&self) -> &[Vec<Operator>] {
        &self.measurements
    }

    /// Largest violation of the MUM conditions: completeness, unit trace,
    /// `tr(P_k(i)P_k'(i')) = 1/d` across measurements and
    /// `tr(P_k(i)P_k(i')) = δκ + (1-δ)(1-κ)/(d-1)` within one, plus the
    /// most negative eigenvalue of any element.
    pub fn defect(&self) -> f64 {
        let d = self.d;
        let df = d as f64;
        let mut worst = 0.0f64;
        for (k, meas) in self.measurements.iter().enumerate() {
            let sum = meas.iter().fold(Operator::zeros(d, d), |acc, p| acc + p);
            worst = worst.max(linalg::frobenius_distance(&sum, &Operator::identity(d, d)));
            for (i, p) in meas.iter().enumerate() {
                worst = worst.max((p.trace() - ONE).norm());
                let lmin = linalg::eigh(p)
                    .map(|(v, _)| v[0])
                    .unwrap_or(f64::NEG_INFINITY);
                worst = worst.max(-lmin);
                for (i2, p2) in meas.iter().enumerate() {
                    let target = if i == i2 {
                        self.kappa
                    } else {
                        (1.0 - self.kappa) / (df - 1.0)
                    };
                    worst = worst.max(((p * p2).trace() - C64::new(target, 0.0)).norm());
                }
                for other in &self.measurements[k + 1..] {
                    for p2 in other {
                        worst = worst.max(((p * p2).trace() - C64::new(1.0 / df, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Every element conjugated by the unitary `u`: `P ↦ U P U†`.
    pub fn rotated(&self, u: &Operator) -> Result<MumSet> {
        if u.shape() != (self.d, self.d) {
            return Err(Error::DimensionMismatch(format!(
                "rotation is {}x{}, set dimension is {}",
                u.nrows(),
                u.ncols(),
                self.d
            )));
        }
        let defect = linalg::unitarity_defect(u);
        if defect > UNITARY_TOL {
            return Err(Error::InvalidArgument(format!(
                "rotation is not unitary (defect {defect:.3e})"
            )));
        }
        let ud = u.adjoint();
        let measurements = self
            .measurements
            .iter()
            .map(|m| m.iter().map(|p| u * p * &ud).collect())
            .collect();
        Ok(MumSet {
            d: self.d,
            kappa: self.kappa,
            measurements,
        })
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let worst = self.defect();
        if worst > tol {
            return Err(Error::Numerical(format!(
                "MUM validation defect {worst:.3e}"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "N": self.len(),
            "kind": "mum",
            "kappa": self.kappa,
            "measurements": self
                .measurements
                .iter()
                .map(|m| m.iter().map(matrix_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

fn gell_mann(d: usize) -> Vec<Operator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = Operator::zeros(d, d);
            m[(j, k)] = C64::new(s, 0.0);
            m[(k, j)] = C64::new(s, 0.0);
            out.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = Operator::zeros(d, d);
            m[(j, k)] = C64::new(0.0, -s);
            m[(k, j)] = C64::new(0.0, s);
            out.push(m);
        }
    }
    for l in 1..d {
        let lf = l as f64;
        let norm = 1.0 / (lf * (lf + 1.0)).sqrt();
        let mut m = Operator::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = C64::new(norm, 0.0);
        }
        m[(l, l)] = C64::new(-lf * norm, 0.0);
        out.push(m);
    }
    out
}

/// The `d` operators `F_k(n)` of one block: `F_k − (d+√d)F_{k,n}` for
/// `n < d-1` positions and `(1+√d)F_k` last, with `F_k = Σ_n F_{k,n}`.
fn block_operators(block: &[Operator], d: usize) -> Vec<Operator> {
    let s = (d as f64).sqrt();
    let total = block.iter().fold(Operator::zeros(d, d), |acc, f| acc + f);
    let mut out: Vec<Operator> = block
        .iter()
        .map(|f| &total - f.scale(d as f64 + s))
        .collect();
    out.push(total.scale(1.0 + s));
    out
}

fn traceless_blocks(d: usize, basis: TracelessBasis) -> Result<Vec<Vec<Operator>>> {
    match basis {
        TracelessBasis::GellMann => {
            let all = gell_mann(d);
            Ok(all.chunks(d - 1).map(|c| c.to_vec()).collect())
        }
        TracelessBasis::PauliMub => {
            if !is_prime(d) {
                return Err(Error::Unsupported(format!(
                    "Pauli-derived operator basis needs prime d (got {d})"
                )));
            }
            // Invert the block construction at κ = 1: F_k(n) = (Π_n − I/d)/t₁.
            let s = (d as f64).sqrt();
            let t1 = 1.0 / (s * (1.0 + s));
            let set = standard_mub_set(d, d + 1)?;
            let id = Operator::identity(d, d).scale(1.0 / d as f64);
            Ok(set
                .bases()
                .iter()
                .map(|b| {
                    let f: Vec<Operator> = (0..d)
                        .map(|i| {
                            let v = b.matrix().column(i);
                            (&v * v.adjoint() - &id).scale(1.0 / t1)
                        })
                        .collect();
                    let fk = f[d - 1].scale(1.0 / (1.0 + s));
                    f[..d - 1]
                        .iter()
                        .map(|fn_| (&fk - fn_).scale(1.0 / (d as f64 + s)))
                        .collect()
                })
                .collect())
        }
    }
}

fn max_t(blocks: &[Vec<Operator>], d: usize) -> Result<f64> {
    let mut t = f64::INFINITY;
    for block in blocks {
        for f in block_operators(block, d) {
            let lmin = linalg::eigh(&f)?.0[0];
            if lmin < 0.0 {
                t = t.min(1.0 / (d as f64 * -lmin));
            }
        }
    }
    Ok(t)
}

fn kappa_of_t(t: f64, d: usize) -> f64 {
    let s = (d as f64).sqrt();
    1.0 / d as f64 + t * t * (1.0 + s) * (1.0 + s) * (d as f64 - 1.0)
}

/// Largest κ the construction reaches with the given operator basis.
pub fn mum_max_kappa(d: usize, basis: TracelessBasis) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} is below 2")));
    }
    let blocks = traceless_blocks(d, basis)?;
    Ok(kappa_of_t(max_t(&blocks, d)?, d).min(1.0))
}

/// Complete MUM set from the generalized Gell-Mann basis.
pub fn build_mum_set(d: usize, kappa: f64) -> Result<MumSet> {
    build_mum_set_with(d, kappa, TracelessBasis::GellMann)
}

/// Complete MUM set: `P_k(n) = I/d + t·F_k(n)` with `t` fixed by κ via
/// `κ = 1/d + t²(1+√d)²(d−1)`.
pub fn build_mum_set_with(d: usize, kappa: f64, basis: TracelessBasis) -> Result<MumSet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} is below 2")));
    }
    let df = d as f64;
    if !(kappa > 1.0 / df && kappa <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "κ = {kappa} outside (1/d, 1] = ({:.6}, 1]",
            1.0 / df
        )));
    }
    let blocks = traceless_blocks(d, basis)?;
    let s = df.sqrt();
    let t = ((kappa - 1.0 / df) / ((1.0 + s) * (1.0 + s) * (df - 1.0))).sqrt();
    let t_max = max_t(&blocks, d)?;
    if t > t_max * (1.0 + 1e-12) {
        return Err(Error::Unsupported(format!(
            "κ = {kappa} is not reachable with this operator basis; achievable maximum is κ = {:.12}",
            kappa_of_t(t_max, d).min(1.0)
        )));
    }
    let id = Operator::identity(d, d).scale(1.0 / df);
    let measurements = blocks
        .iter()
        .map(|block| {
            block_operators(block, d)
                .into_iter()
                .map(|f| &id + f.scale(t))
                .collect()
        })
        .collect();
    Ok(MumSet {
        d,
        kappa,
        measurements,
    })
}

/// Rank-one projectors of a basis, as POVM elements.
pub fn basis_projectors(b: &Basis) -> Vec<Operator> {
    (0..b.dim())
        .map(|i| {
            let v = b.matrix().column(i);
            &v * v.adjoint()
        })
        .collect()
}
