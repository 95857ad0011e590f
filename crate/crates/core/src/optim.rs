//! Derivative-free minimization (Nelder–Mead simplex with restarts from the
//! incumbent once the simplex collapses).

/// Outcome of one local search.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Budget of objective evaluations.
    pub max_evals: usize,
    /// Convergence: spread of simplex values below `tol`.
    pub tol: f64,
    /// Re-seed the simplex around the incumbent this many times after it
    /// converges, stopping early if nothing improves.
    pub reinits: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            step: 0.5,
            max_evals: 20_000,
            tol: 1e-8,
            reinits: 3,
        }
    }
}

/// Minimizes `f` starting at `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best_x = x0.to_vec();
    let mut best = eval(&best_x);
    let mut converged = false;
    let mut step = opts.step;
    for round in 0..=opts.reinits {
        let budget = opts.max_evals.saturating_sub(evals.get());
        if budget == 0 {
            break;
        }
        let (x, v, ok) = simplex_run(&mut eval, &best_x, best, step, budget, opts.tol);
        let improved = best - v;
        if v <= best {
            best = v;
            best_x = x;
        }
        converged = ok;
        if !ok || (round > 0 && improved <= opts.tol) {
            break;
        }
        step *= 0.5;
    }
    Minimum {
        x: best_x,
        value: best,
        evaluations: evals.get(),
        converged,
    }
}

fn simplex_run<E>(
    eval: &mut E,
    x0: &[f64],
    f0: f64,
    step: f64,
    budget: usize,
    tol: f64,
) -> (Vec<f64>, f64, bool)
where
    E: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f0, true);
    }
    // standard coefficients, adapted to dimension (Gao & Han)
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n > 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut used = 0usize;
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    vals.push(f0);
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        vals.push(eval(&p));
        pts.push(p);
        used += 1;
    }
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (lo, hi, second) = (order[0], order[n], order[n - 1]);
        if (vals[hi] - vals[lo]).abs() <= tol {
            return (pts[lo].clone(), vals[lo], true);
        }
        if used >= budget {
            return (pts[lo].clone(), vals[lo], false);
        }
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64, out: &mut Vec<f64>, worst: &[f64], c: &[f64]| {
            for ((o, w), cc) in out.iter_mut().zip(worst).zip(c) {
                *o = cc + t * (cc - w);
            }
        };
        along(alpha, &mut trial, &pts[hi], &centroid);
        let fr = eval(&trial);
        used += 1;
        if fr < vals[lo] {
            along(alpha * gamma, &mut trial2, &pts[hi], &centroid);
            let fe = eval(&trial2);
            used += 1;
            if fe < fr {
                pts[hi].copy_from_slice(&trial2);
                vals[hi] = fe;
            } else {
                pts[hi].copy_from_slice(&trial);
                vals[hi] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[hi].copy_from_slice(&trial);
            vals[hi] = fr;
            continue;
        }
        // contraction, outside if the reflection helped at all
        let (t, reference) = if fr < vals[hi] {
            (alpha * rho, fr)
        } else {
            (-rho, vals[hi])
        };
        along(t, &mut trial2, &pts[hi], &centroid);
        let fc = eval(&trial2);
        used += 1;
        if fc <= reference {
            pts[hi].copy_from_slice(&trial2);
            vals[hi] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = pts[lo].clone();
        for &i in &order[1..] {
            for (x, b) in pts[i].iter_mut().zip(&best) {
                *x = b + sigma * (*x - b);
            }
            vals[i] = eval(&pts[i]);
            used += 1;
        }
    }
}
