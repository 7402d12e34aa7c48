//! Critical light–matter couplings.
//!
//! For odd `N_B` the two lowest levels belong to opposite mirror sectors and
//! cross exactly at `G_c`; for even `N_B` they only approach. Near `G_c` the
//! splitting drops far below the resolution of the ground energy itself
//! (around `1e-13` against `|E| ~ 200` at `N_B = 8`), so the sector ground
//! energies are evaluated as Rayleigh quotients in double-double arithmetic
//! on the double-precision Jacobi eigenvectors. The eigenvector error enters
//! the quotient only at second order, which leaves the splitting accurate
//! far below `1e-13`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, rayleigh_quotient, DoubleDouble};
use crate::model::{build_parity_blocks, ModelParams, Parity};
use crate::spectral::decompose;

/// Width at which bracketing searches stop.
pub const SEARCH_TOL: f64 = 1e-10;
const SCAN_POINTS: usize = 200;

/// Signed `J_eff(N) = (-1)^(N-1) N J^N / ((N-1)! (2A)^(N-1))`.
pub fn effective_hopping(n_bosons: usize, hop: f64, anharm: f64) -> Result<f64> {
    if n_bosons == 0 {
        return Err(Error::domain("J_eff needs N_B >= 1"));
    }
    if n_bosons == 1 {
        return Ok(hop);
    }
    if anharm == 0.0 {
        return Err(Error::domain("J_eff diverges for A = 0 when N_B >= 2"));
    }
    let n = n_bosons as i32;
    let factorial: f64 = (1..n_bosons).map(|k| k as f64).product();
    let sign = if n_bosons % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * n as f64 * hop.powi(n) / (factorial * (2.0 * anharm).powi(n - 1)))
}

/// `sqrt(J^2 + (N_B - 1) A J)`.
pub fn empirical_gc(n_bosons: usize, anharm: f64, hop: f64) -> f64 {
    (hop * hop + (n_bosons as f64 - 1.0) * anharm * hop).sqrt()
}

fn dd_cmp(a: DoubleDouble, b: DoubleDouble) -> Ordering {
    (a - b).hi.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

/// Lowest `count` levels of each sector in compensated precision, ascending.
pub fn precise_levels(params: &ModelParams, count: usize) -> Result<Vec<(DoubleDouble, Parity)>> {
    let blocks = build_parity_blocks(params)?;
    let mut out = Vec::new();
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let (block, _) = blocks.block(parity);
        if block.dim() == 0 {
            continue;
        }
        let pairs = jacobi_eigen(block)?;
        for v in pairs.vectors.iter().take(count) {
            out.push((rayleigh_quotient(block, v), parity));
        }
    }
    out.sort_by(|a, b| dd_cmp(a.0, b.0));
    Ok(out)
}

/// `E_0(symmetric) - E_0(antisymmetric)`, evaluated in compensated precision.
pub fn parity_split_gap(params: &ModelParams) -> Result<f64> {
    let levels = precise_levels(params, 1)?;
    let find = |p: Parity| {
        levels
            .iter()
            .find(|(_, q)| *q == p)
            .map(|(e, _)| *e)
            .ok_or_else(|| Error::domain(format!("{p} sector is empty")))
    };
    Ok((find(Parity::Symmetric)? - find(Parity::Antisymmetric)?).to_f64())
}

/// `E_1 - E_0` in compensated precision.
pub fn precise_gap(params: &ModelParams) -> Result<f64> {
    let levels = precise_levels(params, 2)?;
    if levels.len() < 2 {
        return Err(Error::domain("gap needs at least two levels"));
    }
    Ok((levels[1].0 - levels[0].0).to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    /// Sign change of the parity splitting (odd `N_B`).
    ExactCrossing,
    /// Interior minimum of the gap (even `N_B`).
    AvoidedMinimum,
}

impl CriticalKind {
    pub fn label(self) -> &'static str {
        match self {
            CriticalKind::ExactCrossing => "exact-crossing",
            CriticalKind::AvoidedMinimum => "avoided-minimum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalResult {
    pub g_c: f64,
    pub gap_at_gc: f64,
    pub kind: CriticalKind,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// `[0, 3 sqrt(J^2 + (N_B - 1) A J)]`.
pub fn default_bracket(params: &ModelParams) -> (f64, f64) {
    (
        0.0,
        3.0 * empirical_gc(params.n_bosons, params.anharm, params.hop),
    )
}

/// Locates `G_c` for the model `params` (its coupling is ignored).
pub fn find_critical(params: &ModelParams, bracket: Option<(f64, f64)>) -> Result<CriticalResult> {
    let bracket = bracket.unwrap_or_else(|| default_bracket(params));
    let (lo, hi) = bracket;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Search {
            lo,
            hi,
            reason: "need 0 <= G_lo < G_hi".into(),
        });
    }
    params.with_coupling(lo).validate()?;
    if params.n_bosons % 2 == 1 {
        find_crossing(params, bracket)
    } else {
        find_minimum(params, bracket)
    }
}

fn find_crossing(params: &ModelParams, bracket: (f64, f64)) -> Result<CriticalResult> {
    let split = |g: f64| parity_split_gap(&params.with_coupling(g));
    let (mut lo, mut hi) = bracket;
    let (mut s_lo, mut s_hi) = (split(lo)?, split(hi)?);
    if s_lo.signum() == s_hi.signum() && s_lo != 0.0 && s_hi != 0.0 {
        return Err(Error::Search {
            lo,
            hi,
            reason: format!("parity splitting has the same sign at both ends ({s_lo:e}, {s_hi:e})"),
        });
    }
    let mut iterations = 0;
    while hi - lo > SEARCH_TOL && s_lo != 0.0 && s_hi != 0.0 {
        let mid = 0.5 * (lo + hi);
        let s_mid = split(mid)?;
        if s_mid.signum() == s_lo.signum() {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
            s_hi = s_mid;
        }
        iterations += 1;
    }
    // the splitting is linear across the final bracket
    let g_c = if s_lo == 0.0 {
        lo
    } else if s_hi == 0.0 {
        hi
    } else {
        lo - s_lo * (hi - lo) / (s_hi - s_lo)
    };
    Ok(CriticalResult {
        g_c,
        gap_at_gc: precise_gap(&params.with_coupling(g_c))?,
        kind: CriticalKind::ExactCrossing,
        bracket,
        iterations,
    })
}

fn find_minimum(params: &ModelParams, bracket: (f64, f64)) -> Result<CriticalResult> {
    let gap = |g: f64| precise_gap(&params.with_coupling(g));
    let (lo, hi) = bracket;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let scan: Vec<f64> = (0..SCAN_POINTS)
        .into_par_iter()
        .map(|i| gap(lo + i as f64 * step))
        .collect::<Result<_>>()?;
    let best = (0..SCAN_POINTS)
        .min_by(|&a, &b| scan[a].total_cmp(&scan[b]))
        .expect("nonempty scan");
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(Error::Search {
            lo,
            hi,
            reason: "gap has no interior minimum on the bracket".into(),
        });
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo + (best - 1) as f64 * step, lo + (best + 1) as f64 * step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (gap(c)?, gap(d)?);
    let mut iterations = 0;
    while b - a > SEARCH_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap(d)?;
        }
        iterations += 1;
    }
    let g_c = 0.5 * (a + b);
    Ok(CriticalResult {
        g_c,
        gap_at_gc: gap(g_c)?,
        kind: CriticalKind::AvoidedMinimum,
        bracket,
        iterations,
    })
}

/// Least-squares slope of `E_1 - E_0` against `|G - g_c|` on `points`
/// couplings spread over `[g_c - half_width, g_c + half_width]`.
pub fn gap_slope(params: &ModelParams, g_c: f64, half_width: f64, points: usize) -> Result<f64> {
    if points < 3 || !(half_width > 0.0) {
        return Err(Error::domain("slope fit needs at least three points and a positive width"));
    }
    let samples: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let g = g_c - half_width + 2.0 * half_width * i as f64 / (points - 1) as f64;
            Ok(((g - g_c).abs(), precise_gap(&params.with_coupling(g))?))
        })
        .collect::<Result<_>>()?;
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = samples.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// One point of a gap sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub g: f64,
    pub gap: f64,
    pub e0: f64,
    pub e1: f64,
    pub spectrum: Option<Vec<f64>>,
}

/// Spectrum at each coupling in `grid` (ascending), offset removed.
pub fn sweep_gap(params: &ModelParams, grid: &[f64], full_spectrum: bool) -> Result<Vec<GapRow>> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("coupling grid must be ascending"));
    }
    grid.par_iter()
        .map(|&g| {
            let d = decompose(&params.with_coupling(g))?;
            Ok(GapRow {
                g,
                gap: d.gap()?,
                e0: d.energies[0],
                e1: d.energies[1],
                spectrum: full_spectrum.then(|| d.energies.clone()),
            })
        })
        .collect()
}

/// One entry of a critical-coupling table.
#[derive(Debug)]
pub struct GcRow {
    pub n_bosons: usize,
    pub anharm: f64,
    pub hop: f64,
    pub empirical: f64,
    pub result: Result<CriticalResult>,
}

fn gc_row(params: ModelParams) -> GcRow {
    GcRow {
        n_bosons: params.n_bosons,
        anharm: params.anharm,
        hop: params.hop,
        empirical: empirical_gc(params.n_bosons, params.anharm, params.hop),
        result: find_critical(&params, None),
    }
}

/// `G_c` for each anharmonicity in `a_grid`; failures stay in their row.
pub fn sweep_gc_vs_a(base: &ModelParams, a_grid: &[f64]) -> Vec<GcRow> {
    a_grid
        .par_iter()
        .map(|&a| gc_row(ModelParams { anharm: a, ..*base }))
        .collect()
}

/// `G_c` for each boson number in `n_range`; failures stay in their row.
pub fn table_gc_vs_nb(base: &ModelParams, n_range: std::ops::RangeInclusive<usize>) -> Vec<GcRow> {
    let ns: Vec<usize> = n_range.collect();
    ns.par_iter()
        .map(|&n| gc_row(ModelParams { n_bosons: n, ..*base }))
        .collect()
}
