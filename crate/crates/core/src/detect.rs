//! Entanglement detection from correlation values: entropic uncertainty
//! bounds, separability and biseparability thresholds, white-noise scans and
//! the closed-form expressions for noisy GHZ states.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::corr::{self, c_n_given, c_n_optimize, MeasurementSetting, OptimizeConfig};
use crate::error::{Error, Result};
use crate::mub::{self, build_mum_set};
use crate::qstate::State;
use crate::states::{self, catalog_state, StateSpec};

/// Which inequality produced an uncertainty bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Maassen–Uffink, `log d` for two bases (tight).
    MaassenUffink,
    /// Sum of Maassen–Uffink over all pairs, `(N/2) log d`.
    Pairwise,
    /// `−N log((N+d−1)/(dN))`.
    Wehner,
    /// Complete sets for `d` a power of two.
    SanchezRuiz,
    UserSupplied,
}

/// Lower bound `f(N,d)` on `Σ_k H(B_k|ρ)` over `N` MUBs, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyBound {
    pub n_bases: usize,
    pub d: usize,
    pub value: f64,
    pub source: BoundSource,
}

/// User-supplied values of `f(N,d)` that take part in the maximum.
#[derive(Debug, Clone, Default)]
pub struct BoundRegistry {
    extra: Vec<UncertaintyBound>,
}

impl BoundRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a bound; it must lie in `[0, N log₂ d]`.
    pub fn register(&mut self, n_bases: usize, d: usize, value: f64) -> Result<()> {
        let cap = n_bases as f64 * (d as f64).log2();
        if !(0.0..=cap + 1e-12).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "f({n_bases},{d}) = {value} outside [0, {cap}]"
            )));
        }
        self.extra.push(UncertaintyBound {
            n_bases,
            d,
            value,
            source: BoundSource::UserSupplied,
        });
        Ok(())
    }

    pub fn entries(&self) -> &[UncertaintyBound] {
        &self.extra
    }
}

fn is_power_of_two(d: usize) -> bool {
    d.is_power_of_two()
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Candidates in preference order (ties go to the earlier one).
fn candidate_bounds(n: usize, d: usize) -> Vec<UncertaintyBound> {
    let log_d = (d as f64).log2();
    let nf = n as f64;
    let df = d as f64;
    let mut out = Vec::new();
    let mk = |value, source| UncertaintyBound {
        n_bases: n,
        d,
        value,
        source,
    };
    if n == 2 {
        out.push(mk(log_d, BoundSource::MaassenUffink));
    }
    if is_power_of_two(d) && n == d + 1 {
        let h = df / 2.0;
        out.push(mk(xlog2x(h) + xlog2x(h + 1.0), BoundSource::SanchezRuiz));
    }
    out.push(mk(
        -nf * ((nf + df - 1.0) / (df * nf)).log2(),
        BoundSource::Wehner,
    ));
    out.push(mk(nf / 2.0 * log_d, BoundSource::Pairwise));
    out
}

/// Best `f(N,d)` from the built-in bounds.
pub fn f_bound(n_bases: usize, d: usize) -> Result<UncertaintyBound> {
    f_bound_with(n_bases, d, &BoundRegistry::default())
}

/// Best `f(N,d)` from the built-in bounds and the registry.
pub fn f_bound_with(
    n_bases: usize,
    d: usize,
    registry: &BoundRegistry,
) -> Result<UncertaintyBound> {
    if n_bases < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "uncertainty bound needs N ≥ 2 and d ≥ 2 (got N = {n_bases}, d = {d})"
        )));
    }
    let mut best: Option<UncertaintyBound> = None;
    let user = registry
        .entries()
        .iter()
        .filter(|b| b.n_bases == n_bases && b.d == d)
        .copied();
    for b in candidate_bounds(n_bases, d).into_iter().chain(user) {
        if best.is_none_or(|cur| b.value > cur.value) {
            best = Some(b);
        }
    }
    Ok(best.expect("at least one bound applies"))
}

/// Fully separable states satisfy `C_N ≤ log₂ d − f(N,d)/N`.
pub fn sep_threshold(n_bases: usize, d: usize) -> Result<f64> {
    sep_threshold_with(n_bases, d, &BoundRegistry::default())
}

pub fn sep_threshold_with(n_bases: usize, d: usize, registry: &BoundRegistry) -> Result<f64> {
    let f = f_bound_with(n_bases, d, registry)?.value;
    Ok((d as f64).log2() - f / n_bases as f64)
}

/// Biseparable three-party states satisfy `C_N ≤ log₂ d − f(N,d)/(3N)`.
pub fn bisep_threshold(n_bases: usize, d: usize) -> Result<f64> {
    bisep_threshold_with(n_bases, d, &BoundRegistry::default())
}

pub fn bisep_threshold_with(n_bases: usize, d: usize, registry: &BoundRegistry) -> Result<f64> {
    let f = f_bound_with(n_bases, d, registry)?.value;
    Ok((d as f64).log2() - f / (3.0 * n_bases as f64))
}

/// `(sep, bisep)` thresholds for a complete set of `d+1` MUMs of efficiency
/// κ: `log₂ d − log₂((1+d)/(1+κ))` and `log₂ d − ⅓ log₂((1+d)/(1+κ))`.
pub fn mum_thresholds(d: usize, kappa: f64) -> Result<(f64, f64)> {
    let df = d as f64;
    if d < 2 || !(kappa > 1.0 / df && kappa <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "κ = {kappa} outside (1/d, 1] for d = {d}"
        )));
    }
    let gap = ((1.0 + df) / (1.0 + kappa)).log2();
    Ok((df.log2() - gap, df.log2() - gap / 3.0))
}

/// `J_N` of biseparable states is at most `1 + (N−1)/d`.
pub fn j_n_bisep_bound(n_bases: usize, d: usize) -> f64 {
    1.0 + (n_bases as f64 - 1.0) / d as f64
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "noise level p = {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Closed-form `C_N` of `(1−p)|GHZ_{3,3}⟩⟨GHZ_{3,3}| + p·I/27` with every
/// site measuring the first `N` of the Z, X, XZ, XZZ eigenbases.
pub fn ghz33_noise_cn(p: f64, n_bases: usize) -> Result<f64> {
    check_p(p)?;
    if !(2..=4).contains(&n_bases) {
        return Err(Error::InvalidArgument(format!(
            "N = {n_bases} outside 2..=4"
        )));
    }
    let nf = n_bases as f64;
    let second = 3.0 - 2.0 * p;
    let third = 9.0 - 8.0 * p;
    let value = ((6.0 * nf - 4.0) * xlog2x(p)
        - 3.0 * (nf - 2.0) * (2.0 * p - 3.0) * safe_log2(second)
        + xlog2x(third))
        / (9.0 * nf);
    Ok(value.max(0.0))
}

fn safe_log2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.log2()
    }
}

/// `C₂` of `(1−p)|GHZ_{d,3}⟩⟨GHZ_{d,3}| + p·I/d³` with Z and X eigenbases on
/// every site, from the closed-form outcome statistics.
pub fn ghz_d3_noise_c2(p: f64, d: usize) -> Result<f64> {
    check_p(p)?;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} is below 2")));
    }
    let df = d as f64;
    let (d2, d3) = (df * df, df * df * df);
    let log_d = df.log2();
    let noise3 = p / d3;
    // Z basis: diagonal triples carry the GHZ weight
    let diag = (1.0 - p) / df + noise3;
    let h_all_z = -(df * xlog2x(diag) + (d3 - df) * xlog2x(noise3));
    let pair_diag = (1.0 - p) / df + p / d2;
    let h_rest_z = -(df * xlog2x(pair_diag) + (d2 - df) * xlog2x(p / d2));
    let i_z = log_d + h_rest_z - h_all_z;
    // X basis: the d² triples with zero outcome sum carry it; pairs are uniform
    let allowed = (1.0 - p) / d2 + noise3;
    let h_all_x = -(d2 * xlog2x(allowed) + (d3 - d2) * xlog2x(noise3));
    let i_x = 3.0 * log_d - h_all_x;
    Ok(((i_z + i_x) / 2.0).max(0.0))
}

/// `R(p;d) = (6/5)·C₂/log₂ d`; `R > 1` certifies genuine tripartite
/// entanglement of the noisy GHZ_{d,3} state.
pub fn r_quantity(p: f64, d: usize) -> Result<f64> {
    Ok(1.2 * ghz_d3_noise_c2(p, d)? / (d as f64).log2())
}

/// `R(p;d)` evaluated on the dense `d³×d³` noisy state.
pub fn r_quantity_dense(p: f64, d: usize) -> Result<f64> {
    let rho = states::white_noise_mix(&states::ghz(d, 3)?, p)?;
    let state = State::Mixed(rho);
    let setting = MeasurementSetting::standard(state.layout(), 2)?;
    Ok(1.2 * c_n_given(&state, &setting)?.c_value / (d as f64).log2())
}

/// Bisection for `g(x) = target` on `[lo, hi]` where `g` decreases.
pub fn bisect_decreasing<F>(g: F, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (glo, ghi) = (g(lo)? - target, g(hi)? - target);
    if glo < 0.0 || ghi > 0.0 {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}]: g − target = {glo:.3e}, {ghi:.3e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = g(mid)? - target;
        if v.abs() <= tol && hi - lo <= tol.max(1e-12) {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest white-noise level with `R(p;d) ≥ 1`.
pub fn p_max(d: usize, tol: f64) -> Result<f64> {
    bisect_decreasing(|p| r_quantity(p, d), 1.0, 0.0, 1.0, tol)
}

/// How measurement settings are chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SettingPolicy {
    /// Standard Pauli MUB eigenbases on every site.
    Pauli,
    /// Numerical optimization over local rotations.
    Optimize(OptimizeConfig),
    /// Closed-form expressions (GHZ_{3,3} for N ≤ 4, GHZ_{d,3} for N = 2).
    Analytic,
    /// Complete set of mutually unbiased measurements with efficiency κ.
    Mum { kappa: f64 },
}

/// Correlation functional being thresholded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `C_N` against the separability and biseparability thresholds.
    CorrelationN,
    /// `J_N` against its biseparability bound.
    JN,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub n_bases: usize,
    pub policy: SettingPolicy,
    pub functional: Functional,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DetectionVerdict {
    pub p: f64,
    pub d: usize,
    pub n_sites: usize,
    pub n_bases: usize,
    pub value: f64,
    pub sep_threshold: Option<f64>,
    /// Only for three parties.
    pub bisep_threshold: Option<f64>,
    pub entangled: bool,
    pub tripartite: bool,
    pub sep_margin: Option<f64>,
    pub bisep_margin: Option<f64>,
    pub setting: String,
    pub seed: Option<u64>,
}

impl DetectionVerdict {
    /// Applies the thresholds to a measured value.
    pub fn new(
        p: f64,
        d: usize,
        n_sites: usize,
        n_bases: usize,
        value: f64,
        sep: Option<f64>,
        bisep: Option<f64>,
    ) -> Self {
        let bisep = bisep.filter(|_| n_sites == 3);
        let sep_margin = sep.map(|t| value - t);
        let bisep_margin = bisep.map(|t| value - t);
        let tripartite = bisep_margin.is_some_and(|m| m > 0.0);
        Self {
            p,
            d,
            n_sites,
            n_bases,
            value,
            sep_threshold: sep,
            bisep_threshold: bisep,
            // genuine tripartite entanglement implies entanglement
            entangled: sep_margin.is_some_and(|m| m > 0.0) || tripartite,
            tripartite,
            sep_margin,
            bisep_margin,
            setting: String::new(),
            seed: None,
        }
    }
}

fn analytic_value(spec: &StateSpec, p: f64, n_bases: usize) -> Result<f64> {
    match *spec {
        StateSpec::Ghz { d: 3, n: 3 } => ghz33_noise_cn(p, n_bases),
        StateSpec::Ghz { d, n: 3 } if n_bases == 2 => ghz_d3_noise_c2(p, d),
        _ => Err(Error::Unsupported(format!(
            "no closed form for family '{}' with N = {n_bases}",
            spec.family()
        ))),
    }
}

fn evaluate_point(
    spec: Option<&StateSpec>,
    base: &State,
    p: f64,
    cfg: &ScanConfig,
) -> Result<DetectionVerdict> {
    let layout = base.layout();
    let n_sites = layout.n_sites();
    let d = layout.uniform_dim().ok_or_else(|| {
        Error::Unsupported(format!(
            "thresholds need equal local dimensions, got {:?}",
            layout.dims()
        ))
    })?;
    let noisy = || -> Result<State> { Ok(State::Mixed(states::white_noise_mix_state(base, p)?)) };
    if cfg.functional == Functional::JN {
        let set = mub::standard_mub_set(d, cfg.n_bases)?;
        let (value, setting, seed) = match cfg.policy {
            SettingPolicy::Pauli => (corr::j_n_value(&noisy()?, &set)?, "pauli", None),
            SettingPolicy::Optimize(oc) => (
                corr::j_n_optimize(&noisy()?, cfg.n_bases, &oc)?.value,
                "optimized",
                Some(oc.seed),
            ),
            _ => {
                return Err(Error::Unsupported(
                    "J_N scans support the pauli and optimize settings only".into(),
                ))
            }
        };
        let bound = j_n_bisep_bound(cfg.n_bases, d);
        let mut v = DetectionVerdict::new(p, d, n_sites, cfg.n_bases, value, None, Some(bound));
        if n_sites != 3 {
            // the bound is for biseparable states of any party number
            v.entangled = value > bound;
        }
        v.setting = format!("{setting}-J");
        v.seed = seed;
        return Ok(v);
    }
    let (value, sep, bisep, setting, seed) = match cfg.policy {
        SettingPolicy::Pauli => {
            let st = noisy()?;
            let setting = MeasurementSetting::standard(st.layout(), cfg.n_bases)?;
            let v = c_n_given(&st, &setting)?.c_value;
            (
                v,
                sep_threshold(cfg.n_bases, d)?,
                bisep_threshold(cfg.n_bases, d)?,
                "pauli",
                None,
            )
        }
        SettingPolicy::Optimize(oc) => {
            let v = c_n_optimize(&noisy()?, cfg.n_bases, &oc)?.c_value;
            (
                v,
                sep_threshold(cfg.n_bases, d)?,
                bisep_threshold(cfg.n_bases, d)?,
                "optimized",
                Some(oc.seed),
            )
        }
        SettingPolicy::Analytic => {
            let spec = spec.ok_or_else(|| {
                Error::Unsupported("closed forms need a catalog state, not an arbitrary one".into())
            })?;
            let v = analytic_value(spec, p, cfg.n_bases)?;
            (
                v,
                sep_threshold(cfg.n_bases, d)?,
                bisep_threshold(cfg.n_bases, d)?,
                "analytic",
                None,
            )
        }
        SettingPolicy::Mum { kappa } => {
            let v = corr::c_n_mum(&noisy()?, &build_mum_set(d, kappa)?)?.c_value;
            let (s, b) = mum_thresholds(d, kappa)?;
            (v, s, b, "mum", None)
        }
    };
    let mut v = DetectionVerdict::new(p, d, n_sites, cfg.n_bases, value, Some(sep), Some(bisep));
    if let SettingPolicy::Mum { .. } = cfg.policy {
        v.n_bases = d + 1;
    }
    v.setting = setting.into();
    v.seed = seed;
    Ok(v)
}

/// One verdict per grid point of `(1−p)ρ + p·I/D`, in grid order.
pub fn noise_scan(
    spec: &StateSpec,
    grid: &[f64],
    cfg: &ScanConfig,
) -> Result<Vec<DetectionVerdict>> {
    for &p in grid {
        check_p(p)?;
    }
    let base = catalog_state(spec)?;
    scan(Some(spec), &base, grid, cfg)
}

/// [`noise_scan`] for an arbitrary state; the analytic policy is unavailable.
pub fn noise_scan_state(
    base: &State,
    grid: &[f64],
    cfg: &ScanConfig,
) -> Result<Vec<DetectionVerdict>> {
    for &p in grid {
        check_p(p)?;
    }
    scan(None, base, grid, cfg)
}

fn scan(
    spec: Option<&StateSpec>,
    base: &State,
    grid: &[f64],
    cfg: &ScanConfig,
) -> Result<Vec<DetectionVerdict>> {
    grid.par_iter()
        .map(|&p| evaluate_point(spec, base, p, cfg))
        .collect()
}

/// First grid point (after at least one detection) where `flag` is false.
pub fn first_undetected(rows: &[DetectionVerdict], tripartite: bool) -> Option<f64> {
    let flag = |r: &DetectionVerdict| {
        if tripartite {
            r.tripartite
        } else {
            r.entangled
        }
    };
    let start = rows.iter().position(flag)?;
    rows[start..].iter().find(|r| !flag(r)).map(|r| r.p)
}

/// Fixed CSV header of [`write_csv`].
pub const CSV_HEADER: &str =
    "p,d,N,c_value,sep_threshold,bisep_threshold,entangled,tripartite,setting,seed";

/// Formats a float with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut out: W, rows: &[DetectionVerdict]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            format_sig(r.p),
            r.d,
            r.n_bases,
            format_sig(r.value),
            opt_sig(r.sep_threshold),
            opt_sig(r.bisep_threshold),
            r.entangled,
            r.tripartite,
            r.setting,
            r.seed.map(|s| s.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Separable or biseparable threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdKind {
    Separable,
    Biseparable,
}

/// One cell of the three-party threshold table.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ThresholdCell {
    pub d: usize,
    pub n_bases: usize,
    pub kind: ThresholdKind,
    /// `None` when `N` MUBs do not exist in dimension `d`.
    pub value: Option<f64>,
    /// `value / log₂ d`.
    pub in_log_d: Option<f64>,
    pub source: Option<BoundSource>,
    pub note: Option<String>,
}

/// Separable and biseparable thresholds for `d ∈ {2, 3}` and
/// `N ∈ {2, 3, 4}`: 12 cells, row-major by (kind, N) then d.
pub fn threshold_table() -> Vec<ThresholdCell> {
    let mut cells = Vec::new();
    for kind in [ThresholdKind::Separable, ThresholdKind::Biseparable] {
        for n in 2..=4usize {
            for d in [2usize, 3] {
                if n > d + 1 {
                    cells.push(ThresholdCell {
                        d,
                        n_bases: n,
                        kind,
                        value: None,
                        in_log_d: None,
                        source: None,
                        note: Some(format!("at most {} MUBs exist in dimension {d}", d + 1)),
                    });
                    continue;
                }
                let f = f_bound(n, d).expect("valid (N, d)");
                let value = match kind {
                    ThresholdKind::Separable => sep_threshold(n, d),
                    ThresholdKind::Biseparable => bisep_threshold(n, d),
                }
                .expect("valid (N, d)");
                let note = (kind == ThresholdKind::Separable && n == 4 && d == 3).then(|| {
                    "the commonly quoted 0.366·log2(3) is not produced by any implemented bound; \
                     the best one gives 0.369·log2(3)"
                        .to_string()
                });
                cells.push(ThresholdCell {
                    d,
                    n_bases: n,
                    kind,
                    value: Some(value),
                    in_log_d: Some(value / (d as f64).log2()),
                    source: Some(f.source),
                    note,
                });
            }
        }
    }
    cells
}
