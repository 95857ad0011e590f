//! Catalog of named states and parameterized families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Operator, C64, ONE, ZERO};
use crate::mub::{gen_pauli, PauliIndex};
use crate::qstate::{
    apply_local, partial_trace_pure, DensityOperator, State, StateVector, SubsystemLayout,
};

/// Family names accepted by [`StateSpec::from_family`].
pub const FAMILIES: &[&str] = &[
    "phi-plus",
    "ghz",
    "w",
    "product",
    "aharonov",
    "psi33",
    "ame4",
    "ame-abc",
    "classical",
    "counterexample4",
    "ghz-mes",
    "qutrit-mes",
];

/// Fully specified catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateSpec {
    /// `(1/√d) Σ |ii⟩`.
    PhiPlus { d: usize },
    /// `(1/√d) Σ |i⟩^{⊗n}`.
    Ghz { d: usize, n: usize },
    /// `n`-qubit W state, uniform over single excitations.
    W { n: usize },
    /// `|0⟩^{⊗n}`.
    Product { d: usize, n: usize },
    /// Totally antisymmetric state of `d` qudits.
    Aharonov { d: usize },
    /// Three-qutrit `a·Σ|iii⟩ + b·(|012⟩+|201⟩+|120⟩) + c·(|021⟩+|210⟩+|102⟩)`.
    Psi33 { a: C64, b: C64, c: C64 },
    /// Four-qutrit absolutely maximally entangled state on sites `R, A, B, C`.
    Ame4,
    /// The AME state with site `R` traced out.
    AmeAbc,
    /// `(1/d) Σ |i⟩⟨i|^{⊗n}`.
    Classical { d: usize, n: usize },
    /// `|0120⟩ + |1201⟩ + |2012⟩`, normalized.
    Counterexample4,
    /// `g_{x₁}⊗g_{x₂}⊗g_{x₃}·(P_z⊗I⊗I)|GHZ_{2,3}⟩`, normalized.
    GhzMes { x: [f64; 3], z: C64 },
    /// `g⁽¹⁾⊗g⁽²⁾⊗g⁽³⁾ Ψ₃,₃(a,b,c)`, normalized.
    QutritMes {
        g: [f64; 3],
        k: (usize, usize),
        a: C64,
        b: C64,
        c: C64,
    },
}

/// Loose parameter bag used to build a [`StateSpec`] from a family name.
#[derive(Debug, Clone, Default)]
pub struct StateParams {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub a: Option<C64>,
    pub b: Option<C64>,
    pub c: Option<C64>,
    pub x: Option<[f64; 3]>,
    pub z: Option<C64>,
    pub k: Option<(usize, usize)>,
}

impl StateSpec {
    pub fn from_family(name: &str, p: &StateParams) -> Result<StateSpec> {
        let d = |default: usize| p.d.unwrap_or(default);
        let n = |default: usize| p.n.unwrap_or(default);
        let abc = || (p.a.unwrap_or(ONE), p.b.unwrap_or(ZERO), p.c.unwrap_or(ZERO));
        let spec = match name {
            "phi-plus" | "phi_plus" | "bell" => StateSpec::PhiPlus { d: d(2) },
            "ghz" => StateSpec::Ghz { d: d(2), n: n(3) },
            "w" => StateSpec::W { n: n(3) },
            "product" => StateSpec::Product { d: d(2), n: n(3) },
            "aharonov" => StateSpec::Aharonov { d: d(3) },
            "psi33" => {
                let (a, b, c) = abc();
                StateSpec::Psi33 { a, b, c }
            }
            "ame4" => StateSpec::Ame4,
            "ame-abc" | "ame_abc" => StateSpec::AmeAbc,
            "classical" => StateSpec::Classical { d: d(2), n: n(3) },
            "counterexample4" => StateSpec::Counterexample4,
            "ghz-mes" | "ghz_mes" => StateSpec::GhzMes {
                x: p.x.unwrap_or([0.0; 3]),
                z: p.z.unwrap_or(ONE),
            },
            "qutrit-mes" | "qutrit_mes" => {
                let (a, b, c) = abc();
                StateSpec::QutritMes {
                    g: p.x.unwrap_or([0.0; 3]),
                    k: p.k.unwrap_or((1, 0)),
                    a,
                    b,
                    c,
                }
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown state family '{other}' (known: {})",
                    FAMILIES.join(", ")
                )))
            }
        };
        Ok(spec)
    }

    pub fn family(&self) -> &'static str {
        match self {
            StateSpec::PhiPlus { .. } => "phi-plus",
            StateSpec::Ghz { .. } => "ghz",
            StateSpec::W { .. } => "w",
            StateSpec::Product { .. } => "product",
            StateSpec::Aharonov { .. } => "aharonov",
            StateSpec::Psi33 { .. } => "psi33",
            StateSpec::Ame4 => "ame4",
            StateSpec::AmeAbc => "ame-abc",
            StateSpec::Classical { .. } => "classical",
            StateSpec::Counterexample4 => "counterexample4",
            StateSpec::GhzMes { .. } => "ghz-mes",
            StateSpec::QutritMes { .. } => "qutrit-mes",
        }
    }
}

/// Builds the state described by `spec`.
pub fn catalog_state(spec: &StateSpec) -> Result<State> {
    Ok(match *spec {
        StateSpec::PhiPlus { d } => ghz(d, 2)?.into(),
        StateSpec::Ghz { d, n } => ghz(d, n)?.into(),
        StateSpec::W { n } => w(n)?.into(),
        StateSpec::Product { d, n } => {
            StateVector::basis_state(SubsystemLayout::uniform(d, n)?, &vec![0; n])?.into()
        }
        StateSpec::Aharonov { d } => aharonov(d)?.into(),
        StateSpec::Psi33 { a, b, c } => psi33(a, b, c)?.into(),
        StateSpec::Ame4 => ame4().into(),
        StateSpec::AmeAbc => ame_abc().into(),
        StateSpec::Classical { d, n } => classical(d, n)?.into(),
        StateSpec::Counterexample4 => counterexample4().into(),
        StateSpec::GhzMes { x, z } => ghz_mes_state(x, z)?.into(),
        StateSpec::QutritMes { g, k, a, b, c } => {
            qutrit_mes_state(g, PauliIndex::new(k.0, k.1), (a, b, c))?.into()
        }
    })
}

fn check_dims(d: usize, n: usize) -> Result<SubsystemLayout> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    SubsystemLayout::uniform(d, n)
}

/// `(1/√d) Σ_i |i⟩^{⊗n}`.
pub fn ghz(d: usize, n: usize) -> Result<StateVector> {
    let layout = check_dims(d, n)?;
    let step: usize = (0..n).map(|i| d.pow(i as u32)).sum();
    let mut amps = vec![ZERO; layout.total_dim()];
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * step] = a;
    }
    StateVector::new(layout, amps)
}

/// Two-qudit maximally entangled state.
pub fn phi_plus(d: usize) -> Result<StateVector> {
    ghz(d, 2)
}

/// `n`-qubit W state.
pub fn w(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "W state needs at least two qubits".into(),
        ));
    }
    let layout = check_dims(2, n)?;
    let mut amps = vec![ZERO; layout.total_dim()];
    let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for l in 0..n {
        amps[1 << l] = a;
    }
    StateVector::new(layout, amps)
}

fn permutation_sign(perm: &[usize]) -> Option<f64> {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = *perm.get(i)?;
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    Some(sign)
}

/// `(1/√d!) Σ ε_{i₁…i_d} |i₁…i_d⟩` on `d` qudits.
pub fn aharonov(d: usize) -> Result<StateVector> {
    if d > 8 {
        return Err(Error::Unsupported(format!(
            "antisymmetric state for d = {d} is too large"
        )));
    }
    let layout = check_dims(d, d)?;
    let mut amps = vec![ZERO; layout.total_dim()];
    let norm = 1.0 / ((1..=d).product::<usize>() as f64).sqrt();
    for (idx, amp) in amps.iter_mut().enumerate() {
        let digits = layout.digits(idx);
        let mut used = vec![false; d];
        if digits
            .iter()
            .all(|&v| !std::mem::replace(&mut used[v], true))
        {
            let sign = permutation_sign(&digits).expect("digits form a permutation");
            *amp = C64::new(sign * norm, 0.0);
        }
    }
    StateVector::new(layout, amps)
}

/// Three-qutrit family with `{S_{3,k}^{⊗3}}` symmetry.
pub fn psi33(a: C64, b: C64, c: C64) -> Result<StateVector> {
    let layout = SubsystemLayout::uniform(3, 3)?;
    let mut amps = vec![ZERO; 27];
    let idx = |i: usize, j: usize, k: usize| 9 * i + 3 * j + k;
    for t in 0..3 {
        amps[idx(t, t, t)] = a;
        amps[idx(t, (t + 1) % 3, (t + 2) % 3)] = b;
        amps[idx(t, (t + 2) % 3, (t + 1) % 3)] = c;
    }
    if amps.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidArgument(
            "a = b = c = 0 gives no state".into(),
        ));
    }
    StateVector::normalized(layout, amps)
}

/// `(1/3) Σ_{i,j} |i⟩_R |j⟩_A |i+j⟩_B |i+2j⟩_C` (mod 3).
pub fn ame4() -> StateVector {
    let layout = SubsystemLayout::uniform(3, 4).expect("valid layout");
    let mut amps = vec![ZERO; 81];
    for i in 0..3 {
        for j in 0..3 {
            amps[layout.index(&[i, j, (i + j) % 3, (i + 2 * j) % 3])] = C64::new(1.0 / 3.0, 0.0);
        }
    }
    StateVector::new(layout, amps).expect("normalized by construction")
}

/// Three-qutrit mixed state obtained from [`ame4`] by tracing out site `R`.
pub fn ame_abc() -> DensityOperator {
    partial_trace_pure(&ame4(), &[1, 2, 3]).expect("valid sites")
}

/// `(1/d) Σ_i |i⟩⟨i|^{⊗n}`.
pub fn classical(d: usize, n: usize) -> Result<DensityOperator> {
    let layout = check_dims(d, n)?;
    let dim = layout.total_dim();
    let step: usize = (0..n).map(|i| d.pow(i as u32)).sum();
    let mut m = Operator::zeros(dim, dim);
    for i in 0..d {
        m[(i * step, i * step)] = C64::new(1.0 / d as f64, 0.0);
    }
    DensityOperator::new(layout, m)
}

/// Four-qutrit `(|0120⟩ + |1201⟩ + |2012⟩)/√3`.
pub fn counterexample4() -> StateVector {
    let layout = SubsystemLayout::uniform(3, 4).expect("valid layout");
    let mut amps = vec![ZERO; 81];
    for digits in [[0, 1, 2, 0], [1, 2, 0, 1], [2, 0, 1, 2]] {
        amps[layout.index(&digits)] = C64::new(1.0 / 3f64.sqrt(), 0.0);
    }
    StateVector::new(layout, amps).expect("normalized by construction")
}

/// `g_x = √(½·I + x·σ_x)`, the principal root.
pub fn g_x(x: f64) -> Result<Operator> {
    if !(0.0..0.5).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "x = {x} outside [0, 1/2): ½I + xσx must be positive definite"
        )));
    }
    let m = Operator::from_row_slice(
        2,
        2,
        &[
            C64::new(0.5, 0.0),
            C64::new(x, 0.0),
            C64::new(x, 0.0),
            C64::new(0.5, 0.0),
        ],
    );
    linalg::psd_sqrt(&m, 0.0)
}

/// Three-qubit GHZ-class state in the normal form
/// `g_{x₁}⊗g_{x₂}⊗g_{x₃}·P_z|GHZ⟩` with `P_z = diag(z, 1/z)` on site 0.
pub fn ghz_mes_state(x: [f64; 3], z: C64) -> Result<StateVector> {
    if z.norm() == 0.0 || z.norm() > 1.0 + 1e-12 || !z.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "z = {z} must satisfy 0 < |z| ≤ 1"
        )));
    }
    let g: Vec<Operator> = x.iter().map(|&v| g_x(v)).collect::<Result<_>>()?;
    let mut pz = Operator::zeros(2, 2);
    pz[(0, 0)] = z;
    pz[(1, 1)] = ONE / z;
    let ops = [&g[0] * pz, g[1].clone(), g[2].clone()];
    let out = apply_local(&ops, &ghz(2, 3)?)?;
    StateVector::normalized(out.layout().clone(), out.amplitudes().to_vec())
}

/// `G = (1/3)·I + g·S_{3,k} + (g·S_{3,k})†`, the Gram operator of the
/// qutrit local filter.
pub fn qutrit_filter_gram(g: f64, k: PauliIndex) -> Operator {
    let s = gen_pauli(3, k).scale(g);
    Operator::identity(3, 3).scale(1.0 / 3.0) + &s + s.adjoint()
}

/// Principal square root of [`qutrit_filter_gram`], after checking the Gram
/// operator is positive definite.
pub fn qutrit_filter(g: f64, k: PauliIndex) -> Result<Operator> {
    let gram = qutrit_filter_gram(g, k);
    let lmin = linalg::eigh(&gram)?.0[0];
    if lmin <= 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "filter Gram operator for g = {g}, k = {k} is not positive definite (λ_min = {lmin:.3e})"
        )));
    }
    linalg::psd_sqrt(&gram, 0.0)
}

/// `g⁽¹⁾_k ⊗ g⁽²⁾_k ⊗ g⁽³⁾_k Ψ₃,₃(a,b,c)`, normalized.
pub fn qutrit_mes_state(g: [f64; 3], k: PauliIndex, abc: (C64, C64, C64)) -> Result<StateVector> {
    if k.is_identity(3) {
        return Err(Error::InvalidArgument("k = (0,0) gives no filter".into()));
    }
    let base = psi33(abc.0, abc.1, abc.2)?;
    let ops: Vec<Operator> = g
        .iter()
        .map(|&v| qutrit_filter(v, k))
        .collect::<Result<_>>()?;
    let out = apply_local(&ops, &base)?;
    StateVector::normalized(out.layout().clone(), out.amplitudes().to_vec())
}

/// `(1−p)|ψ⟩⟨ψ| + p·I/D`.
pub fn white_noise_mix(psi: &StateVector, p: f64) -> Result<DensityOperator> {
    white_noise_mix_state(&State::Pure(psi.clone()), p)
}

/// `(1−p)ρ + p·I/D` for any state.
pub fn white_noise_mix_state(state: &State, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "noise level p = {p} outside [0, 1]"
        )));
    }
    let rho = state.to_density();
    rho.mix(&DensityOperator::maximally_mixed(rho.layout().clone()), p)
}

/// Three-tangle `τ₃ = 4|Det|` of a three-qubit pure state, with `Det` the
/// Cayley hyperdeterminant of the amplitude tensor.
pub fn three_tangle(psi: &StateVector) -> Result<f64> {
    if psi.layout().dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "three-tangle needs three qubits, got dims {:?}",
            psi.layout().dims()
        )));
    }
    let a = |i: usize, j: usize, k: usize| psi.amplitudes()[4 * i + 2 * j + k];
    let sq = |z: C64| z * z;
    let d1 = sq(a(0, 0, 0)) * sq(a(1, 1, 1))
        + sq(a(0, 0, 1)) * sq(a(1, 1, 0))
        + sq(a(0, 1, 0)) * sq(a(1, 0, 1))
        + sq(a(1, 0, 0)) * sq(a(0, 1, 1));
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1)
        + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    Ok(4.0 * (d1 - d2.scale(2.0) + d3.scale(4.0)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::partial_trace;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_qutrit_amplitudes() {
        let s = ghz(3, 3).unwrap();
        let nz: Vec<usize> = (0..27)
            .filter(|&i| s.amplitudes()[i].norm() > 0.0)
            .collect();
        assert_eq!(nz, vec![0, 13, 26]);
        for &i in &nz {
            assert_abs_diff_eq!(s.amplitudes()[i].re, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn aharonov_signs() {
        let s = aharonov(3).unwrap();
        let layout = s.layout().clone();
        let v = 1.0 / 6f64.sqrt();
        let amp = |d: [usize; 3]| s.amplitudes()[layout.index(&d)].re;
        assert_abs_diff_eq!(amp([0, 1, 2]), v, epsilon = 1e-15);
        assert_abs_diff_eq!(amp([1, 2, 0]), v, epsilon = 1e-15);
        assert_abs_diff_eq!(amp([1, 0, 2]), -v, epsilon = 1e-15);
        assert_abs_diff_eq!(amp([2, 1, 0]), -v, epsilon = 1e-15);
        let nonzero = s.amplitudes().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 6);
        assert_abs_diff_eq!(
            aharonov(2).unwrap().amplitudes()[1].re,
            std::f64::consts::FRAC_1_SQRT_2
        );
    }

    #[test]
    fn ame_marginals() {
        let psi = ame4();
        for pair in [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]] {
            let r = partial_trace_pure(&psi, &pair).unwrap();
            let target = Operator::identity(9, 9).scale(1.0 / 9.0);
            assert!(linalg::frobenius_distance(r.matrix(), &target) < 1e-12);
        }
        let abc = ame_abc();
        // purifying system is a qutrit, so the rank is 3
        assert_eq!(abc.rank(1e-10).unwrap(), 3);
        for s in 0..3 {
            let m = partial_trace(&abc, &[s]).unwrap();
            let target = Operator::identity(3, 3).scale(1.0 / 3.0);
            assert!(linalg::frobenius_distance(m.matrix(), &target) < 1e-12);
        }
    }

    #[test]
    fn psi33_marginals_mixed() {
        let s = psi33(
            C64::new(0.3, 0.1),
            C64::new(-0.7, 0.2),
            C64::new(0.05, -0.4),
        )
        .unwrap();
        for site in 0..3 {
            let m = partial_trace_pure(&s, &[site]).unwrap();
            let target = Operator::identity(3, 3).scale(1.0 / 3.0);
            assert!(linalg::frobenius_distance(m.matrix(), &target) < 1e-12);
        }
        assert!(psi33(ZERO, ZERO, ZERO).is_err());
    }

    #[test]
    fn ghz_mes_reduces_to_ghz() {
        let s = ghz_mes_state([0.0; 3], ONE).unwrap();
        assert!(s.distance(&ghz(2, 3).unwrap()) < 1e-12);
        assert!(ghz_mes_state([0.5, 0.0, 0.0], ONE).is_err());
        assert!(ghz_mes_state([0.1; 3], ZERO).is_err());
    }

    #[test]
    fn g_x_squares_back() {
        let g = g_x(0.3).unwrap();
        let want = Operator::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.5, 0.0),
            ],
        );
        assert!(linalg::frobenius_distance(&(g.adjoint() * &g), &want) < 1e-12);
    }

    #[test]
    fn qutrit_filter_gram_and_domain() {
        for k in [
            PauliIndex::new(1, 0),
            PauliIndex::new(1, 1),
            PauliIndex::new(0, 1),
        ] {
            let f = qutrit_filter(0.1, k).unwrap();
            let gram = qutrit_filter_gram(0.1, k);
            assert!(linalg::hermiticity_defect(&gram) < 1e-15);
            assert!(linalg::frobenius_distance(&(f.adjoint() * &f), &gram) < 1e-10);
        }
        // eigenvalues are 1/3 + 2g and 1/3 - g (twice)
        assert!(qutrit_filter(0.33, PauliIndex::new(1, 0)).is_ok());
        assert!(qutrit_filter(1.0 / 3.0, PauliIndex::new(1, 0)).is_err());
        assert!(qutrit_filter(-1.0 / 6.0, PauliIndex::new(1, 0)).is_err());
        let base = psi33(ONE, ZERO, ZERO).unwrap();
        let same = qutrit_mes_state([0.0; 3], PauliIndex::new(1, 0), (ONE, ZERO, ZERO)).unwrap();
        assert!(same.distance(&base) < 1e-12);
    }

    #[test]
    fn noise_endpoints() {
        let psi = ghz(2, 2).unwrap();
        let pure = white_noise_mix(&psi, 0.0).unwrap();
        assert!(linalg::frobenius_distance(pure.matrix(), psi.to_density().matrix()) < 1e-15);
        let full = white_noise_mix(&psi, 1.0).unwrap();
        assert!(
            linalg::frobenius_distance(full.matrix(), &Operator::identity(4, 4).scale(0.25))
                < 1e-15
        );
        assert!(white_noise_mix(&psi, 1.5).is_err());
    }

    #[test]
    fn tangle_of_canonical_states() {
        assert_abs_diff_eq!(
            three_tangle(&ghz(2, 3).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(three_tangle(&w(3).unwrap()).unwrap(), 0.0, epsilon = 1e-12);
        let prod =
            StateVector::basis_state(SubsystemLayout::uniform(2, 3).unwrap(), &[0, 1, 1]).unwrap();
        assert_abs_diff_eq!(three_tangle(&prod).unwrap(), 0.0, epsilon = 1e-12);
        assert!(three_tangle(&ghz(3, 3).unwrap()).is_err());
    }

    #[test]
    fn family_lookup() {
        let spec = StateSpec::from_family(
            "ghz",
            &StateParams {
                d: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(spec, StateSpec::Ghz { d: 3, n: 3 });
        assert_eq!(spec.family(), "ghz");
        assert!(StateSpec::from_family("nope", &StateParams::default()).is_err());
        for name in FAMILIES {
            let spec = StateSpec::from_family(name, &StateParams::default()).unwrap();
            assert_eq!(spec.family(), *name);
            let state = catalog_state(&spec).unwrap();
            if let Some(psi) = state.as_pure() {
                assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = StateSpec::GhzMes {
            x: [0.1, 0.2, 0.3],
            z: C64::new(0.9, -0.1),
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"family\":\"ghz-mes\""));
        let back: StateSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
