#![allow(dead_code)]

use mubcorr::linalg::kron;
use mubcorr::{Basis, DensityOperator, Operator, State, StateVector, SubsystemLayout, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Operator {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the phases of `R`'s diagonal divided out.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> Operator {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure(rng: &mut ChaCha8Rng, layout: SubsystemLayout) -> StateVector {
    let g = ginibre(rng, layout.total_dim(), 1);
    StateVector::normalized(layout, g.iter().copied().collect()).unwrap()
}

/// Random density operator of the given rank (`G G† / tr`).
pub fn random_density(
    rng: &mut ChaCha8Rng,
    layout: SubsystemLayout,
    rank: usize,
) -> DensityOperator {
    let g = ginibre(rng, layout.total_dim(), rank);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityOperator::new(layout, m / tr).unwrap()
}

/// Outcome probabilities from explicit Kronecker products of basis vectors.
pub fn brute_force_distribution(state: &State, bases: &[&Basis]) -> Vec<f64> {
    let rho = state.to_density();
    let dims = state.layout().dims().to_vec();
    let total = state.layout().total_dim();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let digits = state.layout().digits(idx);
        let mut v = Operator::from_element(1, 1, C64::new(1.0, 0.0));
        for (l, &i) in digits.iter().enumerate() {
            let col = Operator::from_column_slice(dims[l], 1, &bases[l].vector(i));
            v = kron(&v, &col);
        }
        out.push((v.adjoint() * rho.matrix() * &v)[(0, 0)].re);
    }
    out
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol:e})");
}
