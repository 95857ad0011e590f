//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain
//! binary so the report is always printed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{brute_force_distribution, random_density, random_unitary, rng};
use mubcorr::corr::{measurement_entropy, MeasurementSetting};
use mubcorr::detect::{
    bisect_decreasing, ghz_d3_noise_c2, j_n_bisep_bound, threshold_table, ThresholdKind,
};
use mubcorr::linalg::kron;
use mubcorr::maxcheck::lemma1_check;
use mubcorr::mub::{mum_max_kappa, TracelessBasis};
use mubcorr::states::{
    aharonov, ame_abc, ghz, ghz_mes_state, phi_plus, psi33, three_tangle, w, white_noise_mix,
    StateParams, FAMILIES,
};
use mubcorr::{
    bisep_threshold, build_mum_set, c_n_given, c_n_optimize, catalog_state, certify_theorem2,
    ghz33_noise_cn, holevo_chi, j_n_value, joint_distribution, mutual_information_cut, p_max,
    pauli_eigenbasis, q_basis, rotate_mub_set, standard_mub_set, Basis, DensityOperator, MubSet,
    Operator, OptimizeConfig, PauliIndex, ProbDist, State, StateSpec, SubsystemLayout, C64,
};
use rand::Rng;

const LOG3: f64 = 1.584_962_500_721_156;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(value: f64, target: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure(
        (value - target).abs() <= tol,
        format!("{what}: {value:.12} vs {target:.12} (tol {tol:e})"),
    )
}

fn pauli_cn(state: &State, n: usize) -> f64 {
    c_n_given(
        state,
        &MeasurementSetting::standard(state.layout(), n).unwrap(),
    )
    .unwrap()
    .c_value
}

fn ghz_maxima() -> Check {
    let g: State = ghz(2, 3).unwrap().into();
    within(pauli_cn(&g, 2), 1.0, 1e-9, "GHZ_{2,3} with Z/X")?;
    let mut worst: f64 = 0.0;
    for d in [2usize, 3, 5] {
        let s: State = phi_plus(d).unwrap().into();
        let c = pauli_cn(&s, 2);
        within(c, (d as f64).log2(), 1e-9, &format!("phi+ d={d}"))?;
        worst = worst.max((c - (d as f64).log2()).abs());
    }
    Ok(format!(
        "C2(GHZ)=1, phi+ d=2,3,5 at log d (max err {worst:.1e})"
    ))
}

fn w_optimum() -> Check {
    let s: State = w(3).unwrap().into();
    let cfg = OptimizeConfig {
        restarts: 32,
        seed: 7,
        ..Default::default()
    };
    let r = c_n_optimize(&s, 2, &cfg).map_err(|e| e.to_string())?;
    within(r.c_value, 0.685, 5e-3, "optimized C2(W)")?;
    Ok(format!("C2(W) = {:.6} (32 restarts, seed 7)", r.c_value))
}

fn ghz_three_bases() -> Check {
    let g: State = ghz(2, 3).unwrap().into();
    within(pauli_cn(&g, 3), 2.0 / 3.0, 1e-9, "Pauli C3(GHZ)")?;
    let cfg = OptimizeConfig {
        restarts: 200,
        seed: 11,
        ..Default::default()
    };
    let r = c_n_optimize(&g, 3, &cfg).map_err(|e| e.to_string())?;
    ensure(
        r.c_value <= 2.0 / 3.0 + 1e-4,
        format!("optimizer exceeded 2/3: {:.12}", r.c_value),
    )?;
    Ok(format!(
        "Pauli C3 = 2/3; best of 200 restarts = {:.12}",
        r.c_value
    ))
}

fn ame_reduction() -> Check {
    let s: State = ame_abc().into();
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let c = pauli_cn(&s, n);
        within(c, LOG3, 1e-9, &format!("C{n}(rho_ABC)"))?;
        worst = worst.max((c - LOG3).abs());
    }
    Ok(format!("C2, C3, C4 = log2 3 (max err {worst:.1e})"))
}

fn psi33_certification() -> Check {
    let mut r = rng(2024);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let g = common::ginibre(&mut r, 3, 1);
        let psi = psi33(g[0], g[1], g[2]).unwrap();
        let verdict = certify_theorem2(&psi, 4).map_err(|e| e.to_string())?;
        let cert = verdict
            .certificate()
            .ok_or(format!("instance {i} not certified"))?;
        ensure(
            cert.paulis.len() == 4,
            format!("instance {i}: {} symmetries", cert.paulis.len()),
        )?;
        // re-measure at the certified setting independently of the certifier
        let bases: Vec<Basis> = cert
            .paulis
            .iter()
            .map(|&k| pauli_eigenbasis(3, k).unwrap())
            .collect();
        let set = MubSet::new(bases).map_err(|e| e.to_string())?;
        let state: State = psi.into();
        let c = c_n_given(&state, &MeasurementSetting::uniform(&set, 3).unwrap())
            .unwrap()
            .c_value;
        within(c, LOG3, 1e-9, &format!("instance {i}"))?;
        worst = worst.max((c - LOG3).abs());
    }
    Ok(format!(
        "50/50 certified with N=4, C4 = log2 3 (max err {worst:.1e})"
    ))
}

fn table_one() -> Check {
    let table = threshold_table();
    ensure(table.len() == 12, format!("{} cells", table.len()))?;
    let expected = |kind: ThresholdKind, n: usize, d: usize| -> Option<(f64, f64)> {
        use ThresholdKind::*;
        match (kind, n, d) {
            (_, 4, 2) => None,
            (Separable, 2, _) => Some((0.5, 1e-12)),
            (Separable, 3, 2) => Some((1.0 / 3.0, 1e-12)),
            (Separable, 3, 3) => Some((0.465, 0.002)),
            (Separable, 4, 3) => Some((0.366, 0.005)),
            (Biseparable, 2, _) => Some((5.0 / 6.0, 1e-12)),
            (Biseparable, 3, 2) => Some((7.0 / 9.0, 1e-12)),
            (Biseparable, 3, 3) => Some((0.822, 0.002)),
            (Biseparable, 4, 3) => Some((0.790, 0.002)),
            _ => unreachable!(),
        }
    };
    let mut flagged = false;
    for cell in &table {
        match (expected(cell.kind, cell.n_bases, cell.d), cell.in_log_d) {
            (None, None) => {}
            (Some((target, tol)), Some(v)) => within(
                v,
                target,
                tol,
                &format!(
                    "{:?} N={} d={} (units of log2 d)",
                    cell.kind, cell.n_bases, cell.d
                ),
            )?,
            (e, v) => {
                return Err(format!(
                    "cell {:?} N={} d={}: expected {e:?}, got {v:?}",
                    cell.kind, cell.n_bases, cell.d
                ))
            }
        }
        if cell.kind == ThresholdKind::Separable && cell.n_bases == 4 && cell.d == 3 {
            flagged = cell.note.as_deref().is_some_and(|n| n.contains("0.366"));
            let v = cell.in_log_d.unwrap();
            ensure(
                (v - 0.369).abs() < 5e-4,
                format!("C4 sep formula value {v}"),
            )?;
        }
    }
    ensure(
        flagged,
        "C4 separable cell is missing the 0.366 vs 0.369 flag",
    )?;
    Ok("12 cells reproduced; C4 sep d=3 = 0.369 log2 3, flagged against 0.366".into())
}

fn qubit_ghz_boundary() -> Check {
    let target = bisep_threshold(2, 2).unwrap();
    let analytic = bisect_decreasing(|p| ghz_d3_noise_c2(p, 2), target, 0.0, 1.0, 1e-12).unwrap();
    let g = ghz(2, 3).unwrap();
    let numeric = bisect_decreasing(
        |p| Ok(pauli_cn(&white_noise_mix(&g, p)?.into(), 2)),
        target,
        0.0,
        1.0,
        1e-12,
    )
    .unwrap();
    within(analytic, 0.0594, 1e-3, "analytic crossing")?;
    within(numeric, 0.0594, 1e-3, "dense crossing")?;
    Ok(format!(
        "crossing with 5/6 at p = {analytic:.6} (dense {numeric:.6})"
    ))
}

fn qutrit_ghz_noise() -> Check {
    let g = ghz(3, 3).unwrap();
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.05, 0.2, 0.7, 1.0] {
        let s: State = white_noise_mix(&g, p).unwrap().into();
        for n in 2..=4 {
            let dense = pauli_cn(&s, n);
            let closed = ghz33_noise_cn(p, n).unwrap();
            within(closed, dense, 1e-9, &format!("p={p} N={n}"))?;
            worst = worst.max((closed - dense).abs());
        }
    }
    let cross = bisect_decreasing(
        |p| ghz33_noise_cn(p, 4),
        bisep_threshold(4, 3).unwrap(),
        0.0,
        1.0,
        1e-12,
    )
    .unwrap();
    within(cross, 0.0833, 5e-4, "N=4 crossing")?;
    Ok(format!(
        "closed form = dense (max err {worst:.1e}); crossing p = {cross:.6}"
    ))
}

fn aharonov_noise() -> Check {
    let s = aharonov(3).unwrap();
    let c4 = |p: f64| Ok(pauli_cn(&white_noise_mix(&s, p)?.into(), 4));
    let cross = bisect_decreasing(c4, bisep_threshold(4, 3).unwrap(), 0.0, 1.0, 1e-10).unwrap();
    ensure(
        cross >= 0.0918 - 1e-3,
        format!("C4 detection ends at p = {cross:.6}"),
    )?;
    let set = standard_mub_set(3, 4).unwrap();
    let j = |p: f64| j_n_value(&white_noise_mix(&s, p)?.into(), &set);
    let j_cross = bisect_decreasing(j, j_n_bisep_bound(4, 3), 0.0, 1.0, 1e-10).unwrap();
    within(j_cross, 0.6429, 1e-3, "J4 crossing")?;
    Ok(format!(
        "C4 detects to p = {cross:.6}; J4 crossing p = {j_cross:.6}"
    ))
}

fn p_max_curve() -> Check {
    let start = Instant::now();
    for (d, target) in [
        (3, 0.0709),
        (6, 0.0882),
        (12, 0.1017),
        (24, 0.1118),
        (48, 0.1195),
    ] {
        within(
            p_max(d, 1e-6).unwrap(),
            target,
            5e-4,
            &format!("p_max({d})"),
        )?;
    }
    let mut prev = 0.0;
    let mut top: f64 = 0.0;
    for d in 3..=1000 {
        let v = p_max(d, 1e-9).unwrap();
        ensure(
            v > prev,
            format!("p_max not increasing at d = {d}: {v} after {prev}"),
        )?;
        prev = v;
        top = top.max(v);
    }
    ensure(top <= 1.0 / 6.0 + 1e-3, format!("p_max reaches {top}"))?;
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(120),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "five values within 5e-4; d=3..1000 increasing, max {top:.6} < 1/6"
    ))
}

fn property_suites() -> Check {
    let mut r = rng(99);
    // validator self-consistency under random rotations
    for i in 0..100 {
        let d = [2usize, 3, 5][i % 3];
        let u = random_unitary(&mut r, d);
        rotate_mub_set(&standard_mub_set(d, d + 1).unwrap(), &u)
            .and_then(|s| s.validate(1e-9))
            .map_err(|e| format!("MUB rotation {i}: {e}"))?;
        let hi = mum_max_kappa(d, TracelessBasis::GellMann).unwrap();
        let kappa = 1.0 / d as f64 + (0.05 + 0.95 * r.random::<f64>()) * (hi - 1.0 / d as f64);
        build_mum_set(d, kappa)
            .and_then(|m| m.rotated(&u))
            .and_then(|m| m.validate(1e-9))
            .map_err(|e| format!("MUM rotation {i}: {e}"))?;
    }
    // Maassen-Uffink
    for i in 0..500 {
        let d = [2usize, 3, 5][i % 3];
        let rank = 1 + i % d;
        let rho: State =
            random_density(&mut r, SubsystemLayout::uniform(d, 1).unwrap(), rank).into();
        let set =
            rotate_mub_set(&standard_mub_set(d, 2).unwrap(), &random_unitary(&mut r, d)).unwrap();
        let h = measurement_entropy(&rho, set.basis(0)).unwrap()
            + measurement_entropy(&rho, set.basis(1)).unwrap();
        ensure(
            h >= (d as f64).log2() - 1e-9,
            format!("Maassen-Uffink state {i}: {h}"),
        )?;
    }
    // Holevo
    for i in 0..200 {
        let d = 2 + i % 3;
        let m = 2 + i % 3;
        let layout = SubsystemLayout::uniform(d, 1).unwrap();
        let mut ws: Vec<f64> = (0..m).map(|_| r.random::<f64>() + 0.05).collect();
        let total: f64 = ws.iter().sum();
        ws.iter_mut().for_each(|w| *w /= total);
        let ens: Vec<(f64, DensityOperator)> = ws
            .iter()
            .map(|&w| (w, random_density(&mut r, layout.clone(), 1 + (i / 3) % d)))
            .collect();
        let basis = Basis::new(random_unitary(&mut r, d)).unwrap();
        let mut joint = Vec::new();
        for (w, rho) in &ens {
            let p = joint_distribution(&rho.clone().into(), &[&basis]).unwrap();
            joint.extend(p.probs().iter().map(|q| w * q));
        }
        let info =
            mutual_information_cut(&ProbDist::new(vec![m, d], joint).unwrap(), &[0]).unwrap();
        let chi = holevo_chi(&ens).unwrap();
        ensure(
            info <= chi + 1e-9,
            format!("Holevo ensemble {i}: I = {info}, chi = {chi}"),
        )?;
    }
    // decomposition round trip
    for i in 0..200 {
        let d = 2 + i % 2;
        let k = 1 + i % 3;
        let dp = k * d + (i / 6) % 2;
        let w = random_unitary(&mut r, dp);
        let ket = Operator::from_column_slice(d * d, 1, phi_plus(d).unwrap().amplitudes());
        let mut ws: Vec<f64> = (0..k).map(|_| r.random::<f64>() + 0.1).collect();
        let total: f64 = ws.iter().sum();
        ws.iter_mut().for_each(|q| *q /= total);
        let mut m = Operator::zeros(dp * d, dp * d);
        for (j, q) in ws.iter().enumerate() {
            let out = kron(&w.columns(j * d, d).into_owned(), &Operator::identity(d, d)) * &ket;
            m += &out * out.adjoint() * C64::new(*q, 0.0);
        }
        let rho = DensityOperator::new(SubsystemLayout::new(vec![dp, d]).unwrap(), m).unwrap();
        let verdict = lemma1_check(&rho, (dp, d)).unwrap();
        let dec = verdict
            .decomposition()
            .ok_or(format!("decomposition {i} not recovered"))?;
        let mut found = dec.weights.clone();
        found.sort_by(|a, b| b.total_cmp(a));
        ws.sort_by(|a, b| b.total_cmp(a));
        ensure(
            found.len() == ws.len(),
            format!("decomposition {i}: {} weights", found.len()),
        )?;
        for (a, b) in found.iter().zip(&ws) {
            within(*a, *b, 1e-8, &format!("decomposition {i} weight"))?;
        }
    }
    // brute-force oracle on the catalog
    let mut checked = 0;
    for name in FAMILIES {
        let state =
            catalog_state(&StateSpec::from_family(name, &StateParams::default()).unwrap()).unwrap();
        if state.layout().total_dim() > 81 {
            continue;
        }
        let bases: Vec<Basis> = state
            .layout()
            .dims()
            .iter()
            .map(|&d| Basis::new(random_unitary(&mut r, d)).unwrap())
            .collect();
        let refs: Vec<&Basis> = bases.iter().collect();
        let fast = joint_distribution(&state, &refs).unwrap();
        let slow = brute_force_distribution(&state, &refs);
        for (a, b) in fast.probs().iter().zip(&slow) {
            within(*a, *b, 1e-12, &format!("{name} outcome probability"))?;
        }
        checked += 1;
    }
    Ok(format!(
        "100 rotations, 500 MU states, 200 Holevo ensembles, 200 decompositions, {checked} catalog states"
    ))
}

fn figure_one() -> Check {
    let cfg = OptimizeConfig {
        restarts: 16,
        seed: 1,
        ..Default::default()
    };
    let mut prev = f64::INFINITY;
    for i in 0..=9 {
        let x = 0.05 * i as f64;
        let s: State = ghz_mes_state([x; 3], C64::new(1.0, 0.0)).unwrap().into();
        let c = c_n_optimize(&s, 2, &cfg).unwrap().c_value;
        ensure(
            c < prev,
            format!("C2 not decreasing at x = {x:.2}: {c} after {prev}"),
        )?;
        prev = c;
    }
    let y = pauli_eigenbasis(2, PauliIndex::new(1, 1)).unwrap();
    let (mut best_x, mut best_q) = (0.0, f64::NEG_INFINITY);
    for i in 0..50 {
        let x = 0.01 * i as f64;
        let s: State = ghz_mes_state([x; 3], C64::new(1.0, 0.0)).unwrap().into();
        let q = q_basis(&s, &[&y, &y, &y]).unwrap().average;
        if q > best_q {
            (best_x, best_q) = (x, q);
        }
    }
    within(best_x, 0.25, 0.01, "argmax of Q_y")?;
    within(
        three_tangle(&ghz(2, 3).unwrap()).unwrap(),
        1.0,
        1e-9,
        "tau3(GHZ)",
    )?;
    within(three_tangle(&w(3).unwrap()).unwrap(), 0.0, 1e-9, "tau3(W)")?;
    Ok(format!(
        "C2 decreasing on 0..0.45; Q_y max {best_q:.6} at x = {best_x:.2}; tau3 = 1, 0"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Option<Duration>); 12] = [
        ("GHZ maxima", ghz_maxima, Some(Duration::from_secs(1))),
        (
            "optimized C2 of W",
            w_optimum,
            Some(Duration::from_secs(60)),
        ),
        ("C3 of GHZ", ghz_three_bases, None),
        ("AME reduction", ame_reduction, None),
        ("symmetry certifier on Psi33", psi33_certification, None),
        ("threshold table", table_one, None),
        ("noisy qubit GHZ boundary", qubit_ghz_boundary, None),
        ("noisy qutrit GHZ closed form", qutrit_ghz_noise, None),
        ("noisy Aharonov state", aharonov_noise, None),
        ("p_max curve", p_max_curve, Some(Duration::from_secs(120))),
        ("property suites", property_suites, None),
        ("GHZ-class family curves", figure_one, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(max)) if elapsed > *max => {
                Err(format!("runtime {elapsed:.2?} over {max:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} ({name}): {detail} [{elapsed:.2?}]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2} ({name}): {why} [{elapsed:.2?}]",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
