//! Measurement statistics and the correlation functionals built on them.
//!
//! `C_N` is the average, over `N` bases and every site `l`, of the mutual
//! information between the outcome on `l` and the joint outcome on the rest
//! when all sites measure their `k`-th basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Operator, C64};
use crate::mub::{self, Basis, MubSet, MumSet};
use crate::optim::{self, SimplexOptions};
use crate::qstate::{
    apply_local_in_place, conjugate_local, entropy_bits, von_neumann_entropy, DensityOperator,
    ProbDist, State, SubsystemLayout,
};

/// `N` mutually unbiased bases for every site.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    sites: Vec<MubSet>,
}

impl MeasurementSetting {
    pub fn per_site(sites: Vec<MubSet>) -> Result<Self> {
        let n_bases = sites
            .first()
            .map(MubSet::len)
            .ok_or_else(|| Error::InvalidArgument("setting has no sites".into()))?;
        if sites.iter().any(|s| s.len() != n_bases) {
            return Err(Error::InvalidArgument(
                "every site must use the same number of bases".into(),
            ));
        }
        Ok(Self { sites })
    }

    /// The same set on each of `n_sites` sites.
    pub fn uniform(set: &MubSet, n_sites: usize) -> Result<Self> {
        Self::per_site(vec![set.clone(); n_sites])
    }

    /// Standard Pauli MUB set of the right dimension on every site.
    pub fn standard(layout: &SubsystemLayout, n_bases: usize) -> Result<Self> {
        Self::per_site(
            layout
                .dims()
                .iter()
                .map(|&d| mub::standard_mub_set(d, n_bases))
                .collect::<Result<_>>()?,
        )
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_bases(&self) -> usize {
        self.sites[0].len()
    }

    pub fn site(&self, l: usize) -> &MubSet {
        &self.sites[l]
    }

    /// Basis `k` of every site.
    pub fn slice(&self, k: usize) -> Vec<&Basis> {
        self.sites.iter().map(|s| s.basis(k)).collect()
    }

    /// The first `n` bases on every site.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        Self::per_site(
            self.sites
                .iter()
                .map(|s| s.truncated(n))
                .collect::<Result<_>>()?,
        )
    }

    /// Site `l`'s bases mapped through `U_l`.
    pub fn rotated(&self, unitaries: &[Operator]) -> Result<Self> {
        if unitaries.len() != self.sites.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rotations for {} sites",
                unitaries.len(),
                self.sites.len()
            )));
        }
        Self::per_site(
            self.sites
                .iter()
                .zip(unitaries)
                .map(|(s, u)| mub::rotate_mub_set(s, u))
                .collect::<Result<_>>()?,
        )
    }

    fn check(&self, layout: &SubsystemLayout) -> Result<()> {
        if self.sites.len() != layout.n_sites() {
            return Err(Error::DimensionMismatch(format!(
                "setting covers {} sites, state has {}",
                self.sites.len(),
                layout.n_sites()
            )));
        }
        for (l, (s, &d)) in self.sites.iter().zip(layout.dims()).enumerate() {
            if s.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "site {l} has dimension {d}, its bases dimension {}",
                    s.dim()
                )));
            }
        }
        Ok(())
    }
}

/// Metadata of an optimized report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OptimizerInfo {
    pub restarts: usize,
    pub seed: u64,
    /// Restart index that produced the reported value.
    pub best_restart: usize,
    /// Objective evaluations summed over restarts.
    pub evaluations: usize,
    /// Whether the winning restart met the tolerance.
    pub converged: bool,
    /// Hermitian-generator parameters of the winning rotations, per site.
    pub params: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CorrelationReport {
    pub n_sites: usize,
    pub n_bases: usize,
    /// `mutual_info[k][l] = I(B_k^(l) : B_k^(rest))` in bits.
    pub mutual_info: Vec<Vec<f64>>,
    pub c_value: f64,
    pub setting: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerInfo>,
}

impl CorrelationReport {
    /// `(1/n) Σ_l I(B_k^(l) : rest)` for one basis index.
    pub fn q_value(&self, k: usize) -> f64 {
        self.mutual_info[k].iter().sum::<f64>() / self.n_sites as f64
    }
}

fn check_bases(layout: &SubsystemLayout, bases: &[&Basis]) -> Result<()> {
    if bases.len() != layout.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} bases for {} sites",
            bases.len(),
            layout.n_sites()
        )));
    }
    for (l, (b, &d)) in bases.iter().zip(layout.dims()).enumerate() {
        if b.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "basis on site {l} has dimension {}, site dimension is {d}",
                b.dim()
            )));
        }
    }
    Ok(())
}

/// Outcome distribution when site `l` measures `bases[l]`. The state is
/// rotated site by site with `B_l†`, so no product projector is ever formed.
pub fn joint_distribution(state: &State, bases: &[&Basis]) -> Result<ProbDist> {
    let layout = state.layout();
    check_bases(layout, bases)?;
    let adj: Vec<Operator> = bases.iter().map(|b| b.matrix().adjoint()).collect();
    let ops: Vec<Option<&Operator>> = adj.iter().map(Some).collect();
    let probs = match state {
        State::Pure(psi) => {
            let mut amps = psi.amplitudes().to_vec();
            apply_local_in_place(layout.dims(), &ops, &mut amps);
            amps.iter().map(|a| a.norm_sqr()).collect()
        }
        State::Mixed(rho) => {
            let m = conjugate_local(rho, &ops);
            (0..m.nrows()).map(|i| m[(i, i)].re).collect()
        }
    };
    ProbDist::new(layout.dims().to_vec(), probs)
}

/// Outcome distribution of a product of general POVMs,
/// `p(i₁…i_n) = tr[(E¹_{i₁} ⊗ … ⊗ Eⁿ_{i_n}) ρ]`.
pub fn joint_distribution_povm(state: &State, povms: &[&[Operator]]) -> Result<ProbDist> {
    let layout = state.layout();
    let dims = layout.dims();
    if povms.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} measurements for {} sites",
            povms.len(),
            dims.len()
        )));
    }
    for (l, (p, &d)) in povms.iter().zip(dims).enumerate() {
        if p.is_empty() || p.iter().any(|e| e.shape() != (d, d)) {
            return Err(Error::DimensionMismatch(format!(
                "measurement on site {l} does not act on dimension {d}"
            )));
        }
    }
    let rho = state.to_density();
    // Interleave ρ's row and column digits per site, then contract each
    // site's (r, c) pair with the effect map E ↦ E[c, r].
    let n = dims.len();
    let total = layout.total_dim();
    let mut shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let mut data = vec![C64::new(0.0, 0.0); total * total];
    let strides = layout.strides();
    for r in 0..total {
        for c in 0..total {
            let mut idx = 0usize;
            for l in 0..n {
                let (rl, cl) = ((r / strides[l]) % dims[l], (c / strides[l]) % dims[l]);
                idx = idx * shape[l] + rl * dims[l] + cl;
            }
            data[idx] = rho.matrix()[(r, c)];
        }
    }
    for (l, povm) in povms.iter().enumerate() {
        let d = dims[l];
        let m = povm.len();
        let left: usize = shape[..l].iter().product();
        let right: usize = shape[l + 1..].iter().product();
        let mut next = vec![C64::new(0.0, 0.0); left * m * right];
        for lo in 0..left {
            for r in 0..right {
                for (i, e) in povm.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..d {
                        for b in 0..d {
                            acc += e[(b, a)] * data[(lo * d * d + a * d + b) * right + r];
                        }
                    }
                    next[(lo * m + i) * right + r] = acc;
                }
            }
        }
        shape[l] = m;
        data = next;
    }
    ProbDist::new(shape, data.iter().map(|z| z.re).collect())
}

/// `I(A:B) = H(A) + H(B) − H(AB)` in bits, `B` the complement of `a`.
pub fn mutual_information_cut(p: &ProbDist, a: &[usize]) -> Result<f64> {
    let n = p.n_sites();
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() >= n || a.iter().any(|&s| s >= n) {
        return Err(Error::InvalidArgument(format!(
            "{a:?} is not a nonempty proper subset of {n} sites"
        )));
    }
    let b: Vec<usize> = (0..n).filter(|s| !a.contains(s)).collect();
    let h_a = entropy_bits(p.marginal(&a).probs());
    let h_b = entropy_bits(p.marginal(&b).probs());
    let h_ab = entropy_bits(p.probs());
    Ok((h_a + h_b - h_ab).max(0.0))
}

/// `I(site l : rest)` for every site.
fn one_vs_rest(p: &ProbDist) -> Vec<f64> {
    let n = p.n_sites();
    let h_all = entropy_bits(p.probs());
    (0..n)
        .map(|l| {
            let rest: Vec<usize> = (0..n).filter(|&s| s != l).collect();
            let h_l = entropy_bits(p.marginal(&[l]).probs());
            let h_rest = entropy_bits(p.marginal(&rest).probs());
            (h_l + h_rest - h_all).max(0.0)
        })
        .collect()
}

fn require_multipartite(layout: &SubsystemLayout) -> Result<()> {
    if layout.n_sites() < 2 {
        return Err(Error::InvalidArgument(
            "correlations need at least two sites".into(),
        ));
    }
    Ok(())
}

fn mutual_info_table(state: &State, setting: &MeasurementSetting) -> Result<Vec<Vec<f64>>> {
    (0..setting.n_bases())
        .map(|k| joint_distribution(state, &setting.slice(k)).map(|p| one_vs_rest(&p)))
        .collect()
}

fn average(table: &[Vec<f64>]) -> f64 {
    let count: usize = table.iter().map(Vec::len).sum();
    table.iter().flatten().sum::<f64>() / count as f64
}

/// `C_N` for a fixed setting.
pub fn c_n_given(state: &State, setting: &MeasurementSetting) -> Result<CorrelationReport> {
    require_multipartite(state.layout())?;
    setting.check(state.layout())?;
    let table = mutual_info_table(state, setting)?;
    Ok(CorrelationReport {
        n_sites: setting.n_sites(),
        n_bases: setting.n_bases(),
        c_value: average(&table),
        mutual_info: table,
        setting: "given".into(),
        optimizer: None,
    })
}

/// `C_N` with every site performing the same complete set of mutually
/// unbiased measurements; `N = d+1`.
pub fn c_n_mum(state: &State, mum: &MumSet) -> Result<CorrelationReport> {
    let layout = state.layout();
    require_multipartite(layout)?;
    if layout.dims().iter().any(|&d| d != mum.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "measurements of dimension {} on sites {:?}",
            mum.dim(),
            layout.dims()
        )));
    }
    let table = mum
        .measurements()
        .iter()
        .map(|meas| {
            let povms = vec![meas.as_slice(); layout.n_sites()];
            joint_distribution_povm(state, &povms).map(|p| one_vs_rest(&p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationReport {
        n_sites: layout.n_sites(),
        n_bases: mum.len(),
        c_value: average(&table),
        mutual_info: table,
        setting: format!("mum(kappa={})", mum.kappa()),
        optimizer: None,
    })
}

/// Per-site `I(B^(l) : rest)` for one basis per site, and their average.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BasisCorrelations {
    pub per_site: Vec<f64>,
    pub average: f64,
}

/// Single-basis slice of `C_N`.
pub fn q_basis(state: &State, bases: &[&Basis]) -> Result<BasisCorrelations> {
    require_multipartite(state.layout())?;
    let per_site = one_vs_rest(&joint_distribution(state, bases)?);
    let average = per_site.iter().sum::<f64>() / per_site.len() as f64;
    Ok(BasisCorrelations { per_site, average })
}

/// Shannon entropy of the outcome of measuring `basis` on a single-site state.
pub fn measurement_entropy(state: &State, basis: &Basis) -> Result<f64> {
    if state.layout().n_sites() != 1 {
        return Err(Error::InvalidArgument(
            "expected a single-site state".into(),
        ));
    }
    Ok(entropy_bits(joint_distribution(state, &[basis])?.probs()))
}

/// Search parameters for [`c_n_optimize`] and [`j_n_optimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per restart.
    pub max_iters: usize,
    /// Convergence tolerance on the objective.
    pub tol: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            max_iters: 20_000,
            tol: 1e-8,
        }
    }
}

fn split_params<'a>(dims: &[usize], x: &'a [f64]) -> Vec<&'a [f64]> {
    let mut out = Vec::with_capacity(dims.len());
    let mut at = 0;
    for &d in dims {
        out.push(&x[at..at + d * d]);
        at += d * d;
    }
    out
}

fn unitary(d: usize, params: &[f64]) -> Operator {
    // exp(iH) of a Hermitian matrix cannot fail short of NaN input, which
    // the simplex never produces.
    linalg::expi_hermitian(&linalg::hermitian_from_params(d, params))
        .unwrap_or_else(|_| Operator::identity(d, d))
}

struct RestartResult {
    value: f64,
    x: Vec<f64>,
    evaluations: usize,
    converged: bool,
}

/// Multi-start maximization of `objective` over `n_params` reals; restart
/// `r` uses seed `seed + r` and restart 0 starts at the origin.
fn maximize<F>(
    objective: F,
    n_params: usize,
    config: &OptimizeConfig,
) -> (usize, Vec<RestartResult>)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let opts = SimplexOptions {
        step: 0.6,
        max_evals: config.max_iters,
        tol: config.tol,
        reinits: 3,
    };
    let results: Vec<RestartResult> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let x0: Vec<f64> = if r == 0 {
                vec![0.0; n_params]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(r as u64));
                (0..n_params)
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect()
            };
            let m = optim::nelder_mead(|x| -objective(x), &x0, &opts);
            RestartResult {
                value: -m.value,
                x: m.x,
                evaluations: m.evaluations,
                converged: m.converged,
            }
        })
        .collect();
    let best = results.iter().enumerate().fold(
        0,
        |b, (i, r)| if r.value > results[b].value { i } else { b },
    );
    (best, results)
}

/// Numerical `𝒞_N`: maximizes `C_N` over independent local unitary rotations
/// of the standard MUB set on every site. Rotations are `exp(iH_l)` with
/// `H_l` built from `d_l²` real parameters.
///
/// The search is local with random restarts, so the result is a lower bound
/// on the true maximum.
pub fn c_n_optimize(
    state: &State,
    n_bases: usize,
    config: &OptimizeConfig,
) -> Result<CorrelationReport> {
    let layout = state.layout();
    require_multipartite(layout)?;
    let base = MeasurementSetting::standard(layout, n_bases)?;
    let dims = layout.dims().to_vec();
    let n_params: usize = dims.iter().map(|d| d * d).sum();
    let rotated = |x: &[f64]| -> Result<MeasurementSetting> {
        let us: Vec<Operator> = split_params(&dims, x)
            .into_iter()
            .zip(&dims)
            .map(|(p, &d)| unitary(d, p))
            .collect();
        base.rotated(&us)
    };
    let objective = |x: &[f64]| -> f64 {
        rotated(x)
            .and_then(|s| mutual_info_table(state, &s))
            .map(|t| average(&t))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (best, results) = maximize(objective, n_params, config);
    let winner = &results[best];
    let setting = rotated(&winner.x)?;
    let table = mutual_info_table(state, &setting)?;
    Ok(CorrelationReport {
        n_sites: layout.n_sites(),
        n_bases,
        c_value: average(&table),
        mutual_info: table,
        setting: "optimized local rotations of the standard Pauli MUBs".into(),
        optimizer: Some(OptimizerInfo {
            restarts: results.len(),
            seed: config.seed,
            best_restart: best,
            evaluations: results.iter().map(|r| r.evaluations).sum(),
            converged: winner.converged,
            params: split_params(&dims, &winner.x)
                .into_iter()
                .map(<[f64]>::to_vec)
                .collect(),
        }),
    })
}

fn levi_civita_support(d: usize) -> Vec<usize> {
    // flat indices of outcome tuples with all-distinct entries
    let total = d.pow(d as u32);
    (0..total)
        .filter(|&idx| {
            let mut seen = 0u64;
            let mut x = idx;
            for _ in 0..d {
                let bit = 1u64 << (x % d);
                if seen & bit != 0 {
                    return false;
                }
                seen |= bit;
                x /= d;
            }
            true
        })
        .collect()
}

fn check_j_layout(layout: &SubsystemLayout, d: usize) -> Result<()> {
    if layout.n_sites() != d || layout.uniform_dim() != Some(d) || d > 12 {
        return Err(Error::DimensionMismatch(format!(
            "J_N needs {d} sites of dimension {d}, got dims {:?}",
            layout.dims()
        )));
    }
    Ok(())
}

fn j_from_set(state: &State, set: &MubSet, support: &[usize]) -> Result<f64> {
    let n = state.layout().n_sites();
    set.bases()
        .iter()
        .map(|b| {
            let p = joint_distribution(state, &vec![b; n])?;
            Ok(support.iter().map(|&i| p.probs()[i]).sum::<f64>())
        })
        .sum()
}

/// `J_N = Σ_k A_{B_k}` where `A_B` is the probability that `d` qudits all
/// measured in the same basis `B` give pairwise distinct outcomes.
pub fn j_n_value(state: &State, mubs: &MubSet) -> Result<f64> {
    let d = mubs.dim();
    check_j_layout(state.layout(), d)?;
    j_from_set(state, mubs, &levi_civita_support(d))
}

/// Maximum of `J_N` found over one unitary rotation `U` of the standard set,
/// shared by all sites.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct JOptimum {
    pub value: f64,
    pub optimizer: OptimizerInfo,
}

pub fn j_n_optimize(state: &State, n_bases: usize, config: &OptimizeConfig) -> Result<JOptimum> {
    let layout = state.layout();
    let d = layout.dims()[0];
    check_j_layout(layout, d)?;
    let base = mub::standard_mub_set(d, n_bases)?;
    let support = levi_civita_support(d);
    let objective = |x: &[f64]| -> f64 {
        mub::rotate_mub_set(&base, &unitary(d, x))
            .and_then(|s| j_from_set(state, &s, &support))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (best, results) = maximize(objective, d * d, config);
    let winner = &results[best];
    Ok(JOptimum {
        value: winner.value,
        optimizer: OptimizerInfo {
            restarts: results.len(),
            seed: config.seed,
            best_restart: best,
            evaluations: results.iter().map(|r| r.evaluations).sum(),
            converged: winner.converged,
            params: vec![winner.x.clone()],
        },
    })
}

/// Holevo quantity `χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i)` in bits.
pub fn holevo_chi(ensemble: &[(f64, DensityOperator)]) -> Result<f64> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let layout = first.1.layout();
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "ensemble weights must be nonnegative and sum to 1 (sum {total})"
        )));
    }
    if ensemble.iter().any(|(_, r)| r.layout() != layout) {
        return Err(Error::DimensionMismatch(
            "ensemble states differ in layout".into(),
        ));
    }
    let dim = layout.total_dim();
    let mut avg = Operator::zeros(dim, dim);
    let mut mean_entropy = 0.0;
    for (p, rho) in ensemble {
        avg += rho.matrix().scale(*p);
        mean_entropy += p * von_neumann_entropy(rho)?;
    }
    let avg = DensityOperator::new(layout.clone(), avg)?;
    Ok((von_neumann_entropy(&avg)? - mean_entropy).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::StateVector;
    use approx::assert_abs_diff_eq;

    fn ghz(d: usize, n: usize) -> State {
        let layout = SubsystemLayout::uniform(d, n).unwrap();
        let total = layout.total_dim();
        let step: usize = (0..n).map(|i| d.pow(i as u32)).sum();
        let mut amps = vec![C64::new(0.0, 0.0); total];
        for i in 0..d {
            amps[i * step] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        StateVector::new(layout, amps).unwrap().into()
    }

    #[test]
    fn product_state_point_mass() {
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let psi: State = StateVector::basis_state(layout, &[0, 0]).unwrap().into();
        let z = Basis::computational(2);
        let p = joint_distribution(&psi, &[&z, &z]).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(mutual_information_cut(&p, &[0]).unwrap(), 0.0);
    }

    #[test]
    fn bell_z_basis() {
        let psi = ghz(2, 2);
        let z = Basis::computational(2);
        let p = joint_distribution(&psi, &[&z, &z]).unwrap();
        for (got, want) in p.probs().iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            mutual_information_cut(&p, &[1]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ghz_x_basis_even_parity() {
        let psi = ghz(2, 3);
        let x = mub::pauli_eigenbasis(2, mub::PauliIndex::new(1, 0)).unwrap();
        let p = joint_distribution(&psi, &[&x, &x, &x]).unwrap();
        for idx in 0..8 {
            let parity = (idx as u32).count_ones() % 2;
            let want = if parity == 0 { 0.25 } else { 0.0 };
            assert_abs_diff_eq!(p.probs()[idx], want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            mutual_information_cut(&p, &[0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // mixed path agrees
        let rho: State = psi.to_density().into();
        let q = joint_distribution(&rho, &[&x, &x, &x]).unwrap();
        for (a, b) in p.probs().iter().zip(q.probs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn cut_validation() {
        let p = ProbDist::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(mutual_information_cut(&p, &[]).is_err());
        assert!(mutual_information_cut(&p, &[0, 1]).is_err());
        assert!(mutual_information_cut(&p, &[2]).is_err());
    }

    #[test]
    fn ghz_two_and_three_paulis() {
        let psi = ghz(2, 3);
        let s2 = MeasurementSetting::standard(psi.layout(), 2).unwrap();
        assert_abs_diff_eq!(c_n_given(&psi, &s2).unwrap().c_value, 1.0, epsilon = 1e-12);
        let s3 = MeasurementSetting::standard(psi.layout(), 3).unwrap();
        let rep = c_n_given(&psi, &s3).unwrap();
        assert_abs_diff_eq!(rep.c_value, 2.0 / 3.0, epsilon = 1e-12);
        // Z and X slices carry one bit each, the Y slice nothing
        assert_abs_diff_eq!(rep.q_value(0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.q_value(1), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.q_value(2), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn setting_shape_errors() {
        let psi = ghz(2, 3);
        let set = mub::standard_mub_set(3, 2).unwrap();
        let s = MeasurementSetting::uniform(&set, 3).unwrap();
        assert!(matches!(
            c_n_given(&psi, &s),
            Err(Error::DimensionMismatch(_))
        ));
        let s = MeasurementSetting::uniform(&mub::standard_mub_set(2, 2).unwrap(), 2).unwrap();
        assert!(c_n_given(&psi, &s).is_err());
        let mixed = MeasurementSetting::per_site(vec![
            mub::standard_mub_set(2, 2).unwrap(),
            mub::standard_mub_set(2, 3).unwrap(),
        ]);
        assert!(mixed.is_err());
    }

    #[test]
    fn povm_path_matches_projective() {
        let psi = ghz(3, 2);
        let set = mub::standard_mub_set(3, 4).unwrap();
        for k in 0..4 {
            let b = set.basis(k);
            let proj = mub::basis_projectors(b);
            let p1 = joint_distribution(&psi, &[b, b]).unwrap();
            let p2 = joint_distribution_povm(&psi, &[&proj, &proj]).unwrap();
            for (a, c) in p1.probs().iter().zip(p2.probs()) {
                assert_abs_diff_eq!(a, c, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn holevo_examples() {
        let layout = SubsystemLayout::uniform(2, 1).unwrap();
        let zero = StateVector::basis_state(layout.clone(), &[0])
            .unwrap()
            .to_density();
        let one = StateVector::basis_state(layout.clone(), &[1])
            .unwrap()
            .to_density();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(layout, vec![C64::new(h, 0.0), C64::new(h, 0.0)])
            .unwrap()
            .to_density();
        assert_abs_diff_eq!(
            holevo_chi(&[(1.0, zero.clone())]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            holevo_chi(&[(0.5, zero.clone()), (0.5, one)]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // spectrum of the average is (1 ± 1/√2)/2
        let l = (1.0 + h) / 2.0;
        let want = -(l * l.log2() + (1.0 - l) * (1.0 - l).log2());
        let chi = holevo_chi(&[(0.5, zero.clone()), (0.5, plus)]).unwrap();
        assert_abs_diff_eq!(chi, want, epsilon = 1e-12);
        assert_abs_diff_eq!(chi, 0.6009, epsilon = 1e-4);
        assert!(holevo_chi(&[(0.7, zero)]).is_err());
        assert!(holevo_chi(&[]).is_err());
    }

    #[test]
    fn j_for_maximally_mixed_qutrits() {
        let layout = SubsystemLayout::uniform(3, 3).unwrap();
        let rho: State = DensityOperator::maximally_mixed(layout).into();
        let set = mub::standard_mub_set(3, 4).unwrap();
        assert_abs_diff_eq!(j_n_value(&rho, &set).unwrap(), 8.0 / 9.0, epsilon = 1e-12);
        let wrong: State =
            DensityOperator::maximally_mixed(SubsystemLayout::uniform(3, 2).unwrap()).into();
        assert!(j_n_value(&wrong, &set).is_err());
    }

    #[test]
    fn optimizer_reaches_bell_maximum() {
        let psi = ghz(2, 2);
        let cfg = OptimizeConfig {
            restarts: 4,
            seed: 3,
            ..Default::default()
        };
        let rep = c_n_optimize(&psi, 2, &cfg).unwrap();
        assert_abs_diff_eq!(rep.c_value, 1.0, epsilon = 1e-6);
        let info = rep.optimizer.unwrap();
        assert_eq!(info.restarts, 4);
        assert_eq!(info.params.len(), 2);
        assert_eq!(info.params[0].len(), 4);
    }
}
