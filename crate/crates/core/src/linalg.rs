//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex square matrix. Used for local operators and density matrices.
pub type Operator = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `exp(2πi/d)`.
pub fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64)
}

/// `exp(2πi·j/d)` with the exponent reduced mod `d` first, which keeps the
/// phase exact for large powers.
pub fn omega_pow(d: usize, j: i64) -> C64 {
    let r = j.rem_euclid(d as i64);
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d as f64)
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Operator::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Maximum absolute entry of `m - m†`.
pub fn hermiticity_defect(m: &Operator) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order; eigenvectors are the matching columns.
pub fn eigh(m: &Operator) -> Result<(Vec<f64>, Operator)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    // Symmetrize explicitly: nalgebra reads only the lower triangle.
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::try_new(herm, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Operator::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &Operator) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// `exp(iH)` for Hermitian `H`, computed through its spectral decomposition so
/// the result is unitary to machine precision.
pub fn expi_hermitian(h: &Operator) -> Result<Operator> {
    let (vals, vecs) = eigh(h)?;
    let phases = Operator::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, l)),
    ));
    Ok(&vecs * phases * vecs.adjoint())
}

/// Hermitian matrix from `d²` real parameters: `d` diagonal entries followed
/// by (re, im) pairs for the strict upper triangle in row-major order.
pub fn hermitian_from_params(d: usize, params: &[f64]) -> Operator {
    debug_assert_eq!(params.len(), d * d);
    let mut h = Operator::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut idx = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(params[idx], params[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Fails if an eigenvalue is below `-tol`.
pub fn psd_sqrt(m: &Operator, tol: f64) -> Result<Operator> {
    let (vals, vecs) = eigh(m)?;
    if let Some(&worst) = vals.first() {
        if worst < -tol {
            return Err(Error::InvalidArgument(format!(
                "matrix is not positive semidefinite (smallest eigenvalue {worst:.3e})"
            )));
        }
    }
    let roots = nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    );
    Ok(&vecs * Operator::from_diagonal(&roots) * vecs.adjoint())
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &Operator, b: &Operator) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
