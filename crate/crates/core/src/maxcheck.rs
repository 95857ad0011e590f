//! Certifiers for maximal correlations.
//!
//! A pure state with completely mixed single-site marginals that is
//! stabilized by `⊗_l S_k^{m_l}` for `N` Pauli indices `k` with mutually
//! unbiased eigenbases reaches `C_N = log₂ d`. For bipartite cuts the
//! maximum requires the decomposition
//! `ρ_AB = Σ_k q_k (V_k⊗I)|φ⁺⟩⟨φ⁺|(V_k⊗I)†` with isometries `V_k` of
//! mutually orthogonal images.

use rayon::prelude::*;
use serde::Serialize;

use crate::corr::{c_n_given, MeasurementSetting};
use crate::error::{Error, Result};
use crate::linalg::{self, gcd, is_prime, Operator, C64};
use crate::mub::{self, MubSet, PauliIndex};
use crate::qstate::{
    apply_local_in_place, partial_trace_pure, DensityOperator, State, StateVector, SubsystemLayout,
};

/// Residual tolerance for `S|ψ⟩ = |ψ⟩`.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Tolerance on the certified correlation value.
pub const VALUE_TOL: f64 = 1e-9;
/// Default tolerance of the decomposition test.
pub const DECOMPOSITION_TOL: f64 = 1e-8;
const SUPPORT_TOL: f64 = 1e-10;

/// `‖tr_{l̄}|ψ⟩⟨ψ| − I/d_l‖_F ≤ tol` for every site `l`.
pub fn check_mixed_marginals(psi: &StateVector, tol: f64) -> Vec<bool> {
    marginal_defects(psi)
        .into_iter()
        .map(|e| e <= tol)
        .collect()
}

fn marginal_defects(psi: &StateVector) -> Vec<f64> {
    let dims = psi.layout().dims();
    (0..dims.len())
        .map(|l| {
            let r = partial_trace_pure(psi, &[l]).expect("site in range");
            let target = Operator::identity(dims[l], dims[l]).scale(1.0 / dims[l] as f64);
            linalg::frobenius_distance(r.matrix(), &target)
        })
        .collect()
}

/// A local Pauli symmetry `⊗_l S_k^{m_l}` of a state.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PauliSymmetry {
    pub k: PauliIndex,
    pub exponents: Vec<usize>,
    pub residual: f64,
}

/// Exponents allowed for a symmetry: units mod `d`, so that every
/// `S_k^m` keeps the non-degenerate spectrum of `S_k` (for prime `d` this is
/// all of `1..d`).
fn exponent_range(d: usize) -> Vec<usize> {
    (1..d).filter(|&m| gcd(m, d) == 1).collect()
}

/// First exponent vector (lexicographic) for which `⊗ S_k^{m_l}` fixes
/// `ψ` with eigenvalue exactly 1, if any.
pub fn find_symmetry(psi: &StateVector, k: PauliIndex) -> Result<Option<PauliSymmetry>> {
    let layout = psi.layout();
    let d = uniform_dim(layout)?;
    let n = layout.n_sites();
    let exps = exponent_range(d);
    let powers: Vec<Operator> = (0..d).map(|m| mub::gen_pauli_pow(d, k, m)).collect();
    let mut choice = vec![0usize; n];
    let mut buf = vec![C64::new(0.0, 0.0); psi.amplitudes().len()];
    loop {
        let ops: Vec<Option<&Operator>> = choice.iter().map(|&c| Some(&powers[exps[c]])).collect();
        buf.copy_from_slice(psi.amplitudes());
        apply_local_in_place(layout.dims(), &ops, &mut buf);
        let residual = buf
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= SYMMETRY_TOL {
            return Ok(Some(PauliSymmetry {
                k,
                exponents: choice.iter().map(|&c| exps[c]).collect(),
                residual,
            }));
        }
        // odometer increment
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < exps.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// All Pauli indices with a non-degenerate spectrum that admit a symmetry,
/// in lexicographic order of `k`.
pub fn find_pauli_symmetries(psi: &StateVector) -> Result<Vec<PauliSymmetry>> {
    let d = uniform_dim(psi.layout())?;
    let ks: Vec<PauliIndex> = PauliIndex::all_nontrivial(d)
        .filter(|&k| mub::pauli_is_nondegenerate(d, k))
        .collect();
    let found: Vec<Option<PauliSymmetry>> = ks
        .par_iter()
        .map(|&k| find_symmetry(psi, k))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

fn uniform_dim(layout: &SubsystemLayout) -> Result<usize> {
    layout.uniform_dim().ok_or_else(|| {
        Error::Unsupported(format!(
            "symmetry search needs equal local dimensions, got {:?}",
            layout.dims()
        ))
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SymmetryCertificate {
    pub d: usize,
    /// Pauli indices whose eigenbases form the certified setting.
    pub paulis: Vec<PauliIndex>,
    /// `exponents[k][l]`: power of `S_k` on site `l`.
    pub exponents: Vec<Vec<usize>>,
    pub residuals: Vec<f64>,
    pub marginals_mixed: Vec<bool>,
    /// `C_N` measured at the certified setting.
    pub c_value: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Certification {
    Certified(SymmetryCertificate),
    /// The sufficient condition could not be established; this says nothing
    /// about whether the maximum is reached.
    Inconclusive {
        reason: String,
        symmetries: Vec<PauliSymmetry>,
    },
}

impl Certification {
    pub fn certificate(&self) -> Option<&SymmetryCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Inconclusive { .. } => None,
        }
    }
}

/// Picks `n` symmetries whose eigenbases are pairwise unbiased, by
/// depth-first search in input order.
fn unbiased_subset(d: usize, syms: &[PauliSymmetry], n: usize) -> Result<Option<Vec<usize>>> {
    let bases = syms
        .iter()
        .map(|s| mub::pauli_eigenbasis(d, s.k))
        .collect::<Result<Vec<_>>>()?;
    fn extend(bases: &[mub::Basis], chosen: &mut Vec<usize>, from: usize, n: usize) -> bool {
        if chosen.len() == n {
            return true;
        }
        for i in from..bases.len() {
            if chosen
                .iter()
                .all(|&c| bases[c].unbiasedness_defect(&bases[i]) <= 1e-9)
            {
                chosen.push(i);
                if extend(bases, chosen, i + 1, n) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(extend(&bases, &mut chosen, 0, n).then_some(chosen))
}

/// Tries to certify `C_N(ψ) = log₂ d` through local Pauli symmetries.
/// On success the value is also measured at the certified setting; a
/// mismatch there is reported as a numerical error.
pub fn certify_theorem2(psi: &StateVector, n_bases: usize) -> Result<Certification> {
    let layout = psi.layout();
    let d = uniform_dim(layout)?;
    if layout.n_sites() < 2 {
        return Err(Error::InvalidArgument("need at least two sites".into()));
    }
    if n_bases < 2 || n_bases > d + 1 {
        return Err(Error::InvalidArgument(format!(
            "N = {n_bases} outside 2..={} for d = {d}",
            d + 1
        )));
    }
    if n_bases > 2 && !is_prime(d) {
        return Err(Error::Unsupported(format!(
            "certification for N > 2 needs prime d (got {d})"
        )));
    }
    let defects = marginal_defects(psi);
    let marginals_mixed: Vec<bool> = defects.iter().map(|&e| e <= SYMMETRY_TOL).collect();
    let symmetries = find_pauli_symmetries(psi)?;
    if !marginals_mixed.iter().all(|&m| m) {
        return Ok(Certification::Inconclusive {
            reason: format!("single-site marginals are not maximally mixed: {marginals_mixed:?}"),
            symmetries,
        });
    }
    let Some(pick) = unbiased_subset(d, &symmetries, n_bases)? else {
        return Ok(Certification::Inconclusive {
            reason: format!(
                "found {} Pauli symmetries, but no {n_bases} of them have mutually unbiased eigenbases",
                symmetries.len()
            ),
            symmetries,
        });
    };
    let chosen: Vec<&PauliSymmetry> = pick.iter().map(|&i| &symmetries[i]).collect();
    let set = MubSet::new(
        chosen
            .iter()
            .map(|s| mub::pauli_eigenbasis(d, s.k))
            .collect::<Result<_>>()?,
    )?;
    let state = State::Pure(psi.clone());
    let report = c_n_given(
        &state,
        &MeasurementSetting::uniform(&set, layout.n_sites())?,
    )?;
    let target = (d as f64).log2();
    if (report.c_value - target).abs() > VALUE_TOL {
        return Err(Error::Numerical(format!(
            "symmetries certified but C_N = {} differs from log2 d = {target}",
            report.c_value
        )));
    }
    Ok(Certification::Certified(SymmetryCertificate {
        d,
        paulis: chosen.iter().map(|s| s.k).collect(),
        exponents: chosen.iter().map(|s| s.exponents.clone()).collect(),
        residuals: chosen.iter().map(|s| s.residual).collect(),
        marginals_mixed,
        c_value: report.c_value,
    }))
}

/// `ρ_AB = Σ_k q_k (V_k⊗I)|φ⁺⟩⟨φ⁺|(V_k⊗I)†` with `V_k : C^d → C^{d'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntDecomposition {
    pub weights: Vec<f64>,
    /// `d'×d` isometries.
    pub isometries: Vec<Operator>,
    /// Largest deviation of `V_k†V_{k'}` from `δ_{kk'} I`.
    pub residual: f64,
    /// Frobenius error of the reconstructed state.
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecompositionVerdict {
    Decomposes(MaxEntDecomposition),
    /// `residual` is the largest deviation of the cross-Gram blocks.
    NoDecomposition {
        residual: f64,
    },
}

impl DecompositionVerdict {
    pub fn is_success(&self) -> bool {
        matches!(self, DecompositionVerdict::Decomposes(_))
    }

    pub fn decomposition(&self) -> Option<&MaxEntDecomposition> {
        match self {
            DecompositionVerdict::Decomposes(m) => Some(m),
            DecompositionVerdict::NoDecomposition { .. } => None,
        }
    }
}

/// Decomposition test at [`DECOMPOSITION_TOL`].
pub fn lemma1_check(rho: &DensityOperator, split: (usize, usize)) -> Result<DecompositionVerdict> {
    lemma1_check_with_tol(rho, split, DECOMPOSITION_TOL)
}

/// Tests whether `ρ_AB` on `C^{d'} ⊗ C^d` (A first) decomposes into locally
/// rotated maximally entangled states with orthogonal images.
///
/// Each support eigenvector `v_k` is reshaped to `M_k` (`d'×d`, rows indexed
/// by A). The state decomposes iff `M_k†M_{k'} = δ_{kk'} I/d`. That condition
/// only depends on the support subspace: any unitary mixing of the support
/// vectors preserves it, so degenerate eigenspaces need no special basis.
pub fn lemma1_check_with_tol(
    rho: &DensityOperator,
    split: (usize, usize),
    tol: f64,
) -> Result<DecompositionVerdict> {
    let (da, db) = split;
    if da * db != rho.layout().total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "split {da}x{db} does not match total dimension {}",
            rho.layout().total_dim()
        )));
    }
    if da < db {
        return Err(Error::InvalidArgument(format!(
            "first factor ({da}) must be at least as large as the second ({db})"
        )));
    }
    let (vals, vecs) = linalg::eigh(rho.matrix())?;
    let support: Vec<usize> = (0..vals.len())
        .rev()
        .filter(|&i| vals[i] > SUPPORT_TOL)
        .collect();
    let mats: Vec<Operator> = support
        .iter()
        .map(|&i| Operator::from_fn(da, db, |a, b| vecs[(a * db + b, i)]))
        .collect();
    let scale = 1.0 / db as f64;
    let mut residual = 0.0f64;
    for (i, mi) in mats.iter().enumerate() {
        for (j, mj) in mats.iter().enumerate().skip(i) {
            let g = mi.adjoint() * mj;
            for r in 0..db {
                for c in 0..db {
                    let target = if i == j && r == c { scale } else { 0.0 };
                    // compare on the isometry scale V = √d·M
                    residual = residual.max((g[(r, c)] - C64::new(target, 0.0)).norm() * db as f64);
                }
            }
        }
    }
    if residual > tol {
        return Ok(DecompositionVerdict::NoDecomposition { residual });
    }
    let root = (db as f64).sqrt();
    let isometries: Vec<Operator> = mats.iter().map(|m| m.scale(root)).collect();
    let weight_sum: f64 = support.iter().map(|&i| vals[i]).sum();
    let weights: Vec<f64> = support.iter().map(|&i| vals[i] / weight_sum).collect();
    let phi = nalgebra::DVector::from_fn(db * db, |idx, _| {
        if idx / db == idx % db {
            C64::new(1.0 / root, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut recon = Operator::zeros(da * db, da * db);
    for (v, &q) in isometries.iter().zip(&weights) {
        let w = linalg::kron(v, &Operator::identity(db, db)) * &phi;
        recon += (&w * w.adjoint()).scale(q);
    }
    let reconstruction_error = linalg::frobenius_distance(&recon, rho.matrix());
    Ok(DecompositionVerdict::Decomposes(MaxEntDecomposition {
        weights,
        isometries,
        residual,
        reconstruction_error,
    }))
}

/// Decomposition test across every one-vs-rest cut, with the rest as the
/// first factor. All `true` is necessary for `C_N` to be maximal.
pub fn lemma2_necessary_check(state: &State) -> Result<Vec<bool>> {
    let rho = state.to_density();
    let dims = rho.layout().dims().to_vec();
    let n = dims.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two sites".into()));
    }
    let total: usize = dims.iter().product();
    (0..n)
        .map(|l| {
            let d = dims[l];
            if total / d < d {
                return Ok(false);
            }
            let mut order: Vec<usize> = (0..n).filter(|&s| s != l).collect();
            order.push(l);
            let permuted = rho.permute_sites(&order)?;
            Ok(lemma1_check(&permuted, (total / d, d))?.is_success())
        })
        .collect()
}
