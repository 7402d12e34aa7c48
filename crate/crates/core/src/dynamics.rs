//! Observables of the time-evolved state: configuration probabilities,
//! mode populations, the vibron imbalance `P1 - P2`, limiting (infinite
//! time averaged) probabilities and transfer-time estimates.
//!
//! Traces are evaluated in fixed-size chunks of the time grid. Each chunk
//! starts from exact phases `exp(-i E t)` and advances them by repeated
//! multiplication, so chunk results do not depend on how many workers ran
//! them and the rounding drift stays bounded by the chunk length.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{linear_index, SiteIndex};
use crate::model::{site_energy, ModelParams};
use crate::spectral::{decompose, SpectralDecomposition};

const CHUNK: usize = 2048;
const ENERGY_CLASS_TOL: f64 = 1e-6;

/// Uniform grid `t_i = i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    step: f64,
    len: usize,
}

impl TimeGrid {
    /// `steps + 1` points spanning `[0, tmax]`.
    pub fn new(tmax: f64, steps: usize) -> Result<Self> {
        if !(tmax > 0.0 && tmax.is_finite()) {
            return Err(Error::domain(format!("tmax = {tmax} must be positive")));
        }
        if steps == 0 {
            return Err(Error::domain("time grid needs at least one step"));
        }
        Ok(Self {
            step: tmax / steps as f64,
            len: steps + 1,
        })
    }

    /// Points `0, step, 2 step, ...` up to and including `tmax`.
    pub fn with_step(tmax: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain(format!("time step {step} must be positive")));
        }
        if !(tmax >= 0.0 && tmax.is_finite()) {
            return Err(Error::domain(format!("tmax = {tmax} must be nonnegative")));
        }
        let n = (tmax / step * (1.0 + 1e-12)).floor() as usize;
        Ok(Self { step, len: n + 1 })
    }

    /// `min(0.05, 0.1 pi / range)`: at least twenty samples per period of the
    /// fastest Bohr frequency.
    pub fn default_step(spectral_range: f64) -> f64 {
        if spectral_range > 0.0 {
            (0.1 * std::f64::consts::PI / spectral_range).min(0.05)
        } else {
            0.05
        }
    }

    pub fn default_for(decomp: &SpectralDecomposition, tmax: f64) -> Result<Self> {
        Self::with_step(tmax, Self::default_step(decomp.spectral_range()))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn tmax(&self) -> f64 {
        self.time(self.len - 1)
    }
}

/// Expected quanta in the cavity and in each vibrational mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub photon: f64,
    pub mode1: f64,
    pub mode2: f64,
}

impl Populations {
    /// `P1 - P2`.
    pub fn imbalance(&self) -> f64 {
        self.mode1 - self.mode2
    }

    pub fn total(&self) -> f64 {
        self.photon + self.mode1 + self.mode2
    }
}

/// Sampled populations along a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub observable: String,
    /// Free-form provenance: parameter names and values.
    pub meta: Vec<(String, f64)>,
    pub times: Vec<f64>,
    pub values: Vec<Populations>,
}

impl TimeSeries {
    pub fn imbalance(&self) -> Vec<f64> {
        self.values.iter().map(Populations::imbalance).collect()
    }
}

pub(crate) fn params_meta(params: &ModelParams) -> Vec<(String, f64)> {
    vec![
        ("N_B".into(), params.n_bosons as f64),
        ("omega0".into(), params.omega0),
        ("omega".into(), params.omega),
        ("A".into(), params.anharm),
        ("J".into(), params.hop),
        ("G".into(), params.coupling),
    ]
}

/// `|<site|psi>|^2` for every site in linear order.
pub fn site_probabilities(state: &[Complex64]) -> Vec<f64> {
    state.iter().map(|z| z.norm_sqr()).collect()
}

fn occupations(n_bosons: usize) -> Vec<[f64; 3]> {
    (0..=n_bosons)
        .flat_map(|v| {
            (0..=v).map(move |p| [(n_bosons - v) as f64, (v - p) as f64, p as f64])
        })
        .collect()
}

fn populations_from(probs: &[f64], occ: &[[f64; 3]]) -> Populations {
    let mut out = [0.0; 3];
    for (pi, o) in probs.iter().zip(occ) {
        for (acc, n) in out.iter_mut().zip(o) {
            *acc += pi * n;
        }
    }
    Populations {
        photon: out[0],
        mode1: out[1],
        mode2: out[2],
    }
}

/// Photon and vibron populations of a state of `n_bosons` quanta.
pub fn populations(state: &[Complex64], n_bosons: usize) -> Result<Populations> {
    let occ = occupations(n_bosons);
    if state.len() != occ.len() {
        return Err(Error::domain(format!(
            "state has length {}, N_B = {n_bosons} needs {}",
            state.len(),
            occ.len()
        )));
    }
    Ok(populations_from(&site_probabilities(state), &occ))
}

fn check_initial(params: &ModelParams, initial: SiteIndex) -> Result<usize> {
    params.lattice().index(initial)
}

/// Spectral evolution of one basis state over a subset of levels.
struct Evolver {
    energies: Vec<f64>,
    // weights[l][k] = <chi_l|initial> <k|chi_l>
    weights: Vec<Vec<f64>>,
    dim: usize,
}

impl Evolver {
    fn new(decomp: &SpectralDecomposition, initial: usize, levels: &[usize]) -> Self {
        let weights = levels
            .iter()
            .map(|&mu| {
                let chi = &decomp.vectors[mu];
                chi.iter().map(|&x| x * chi[initial]).collect()
            })
            .collect();
        Self {
            energies: levels.iter().map(|&mu| decomp.energies[mu]).collect(),
            weights,
            dim: decomp.dim(),
        }
    }

    /// Runs `f(acc, t, probs)` over every grid point; one accumulator per chunk.
    fn scan<T, I, F>(&self, grid: &TimeGrid, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> T + Sync,
        F: Fn(&mut T, f64, &[f64]) + Sync,
    {
        let n_chunks = grid.len().div_ceil(CHUNK);
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(grid.len());
                let t0 = grid.time(start);
                let mut phases: Vec<Complex64> = self
                    .energies
                    .iter()
                    .map(|&e| Complex64::from_polar(1.0, -e * t0))
                    .collect();
                let rot: Vec<Complex64> = self
                    .energies
                    .iter()
                    .map(|&e| Complex64::from_polar(1.0, -e * grid.step()))
                    .collect();
                let mut amps = vec![Complex64::new(0.0, 0.0); self.dim];
                let mut probs = vec![0.0; self.dim];
                let mut acc = init();
                for i in start..end {
                    amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
                    for (w, ph) in self.weights.iter().zip(&phases) {
                        for (a, &x) in amps.iter_mut().zip(w) {
                            *a += ph * x;
                        }
                    }
                    for (p, a) in probs.iter_mut().zip(&amps) {
                        *p = a.norm_sqr();
                    }
                    f(&mut acc, grid.time(i), &probs);
                    for (ph, r) in phases.iter_mut().zip(&rot) {
                        *ph *= r;
                    }
                }
                acc
            })
            .collect()
    }
}

fn all_levels(decomp: &SpectralDecomposition) -> Vec<usize> {
    (0..decomp.dim()).collect()
}

fn trace(
    params: &ModelParams,
    decomp: &SpectralDecomposition,
    initial: SiteIndex,
    grid: &TimeGrid,
    levels: &[usize],
    observable: &str,
) -> Result<TimeSeries> {
    let k0 = check_initial(params, initial)?;
    let occ = occupations(params.n_bosons);
    let evolver = Evolver::new(decomp, k0, levels);
    let chunks = evolver.scan(grid, Vec::new, |acc: &mut Vec<Populations>, _, probs| {
        acc.push(populations_from(probs, &occ))
    });
    let values: Vec<Populations> = chunks.into_iter().flatten().collect();
    let mut meta = params_meta(params);
    meta.push(("v0".into(), initial.v as f64));
    meta.push(("p0".into(), initial.p as f64));
    Ok(TimeSeries {
        observable: observable.into(),
        meta,
        times: (0..grid.len()).map(|i| grid.time(i)).collect(),
        values,
    })
}

/// Exact populations along `grid` starting from the basis state `initial`.
pub fn imbalance_trace(
    params: &ModelParams,
    initial: SiteIndex,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let d = decompose(params)?;
    trace(params, &d, initial, grid, &all_levels(&d), "imbalance")
}

/// Populations from the propagator restricted to `levels`.
pub fn restricted_imbalance_trace(
    params: &ModelParams,
    initial: SiteIndex,
    grid: &TimeGrid,
    levels: &[usize],
) -> Result<TimeSeries> {
    let d = decompose(params)?;
    if levels.is_empty() || levels.iter().any(|&mu| mu >= d.dim()) {
        return Err(Error::domain("level set must be a nonempty subset of the spectrum"));
    }
    trace(params, &d, initial, grid, levels, "restricted_imbalance")
}

/// Populations from the two lowest levels only: the slow envelope of the
/// exact trace.
pub fn smoothed_imbalance_trace(
    params: &ModelParams,
    initial: SiteIndex,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let d = decompose(params)?;
    let levels: Vec<usize> = (0..d.dim().min(2)).collect();
    trace(params, &d, initial, grid, &levels, "smoothed_imbalance")
}

/// Streaming summary of `P1 - P2` along a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImbalanceStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub samples: usize,
}

/// Min, max and mean of the exact imbalance without storing the trace.
pub fn imbalance_statistics(
    params: &ModelParams,
    initial: SiteIndex,
    grid: &TimeGrid,
) -> Result<ImbalanceStats> {
    let d = decompose(params)?;
    let k0 = check_initial(params, initial)?;
    let occ = occupations(params.n_bosons);
    let evolver = Evolver::new(&d, k0, &all_levels(&d));
    let chunks = evolver.scan(
        grid,
        || (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize),
        |acc, _, probs| {
            let dp = populations_from(probs, &occ).imbalance();
            acc.0 = acc.0.min(dp);
            acc.1 = acc.1.max(dp);
            acc.2 += dp;
            acc.3 += 1;
        },
    );
    let (min, max, sum, n) = chunks.into_iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize),
        |a, b| (a.0.min(b.0), a.1.max(b.1), a.2 + b.2, a.3 + b.3),
    );
    Ok(ImbalanceStats {
        min,
        max,
        mean: sum / n as f64,
        samples: n,
    })
}

/// Sample mean of every site probability along `grid`.
pub fn time_averaged_probabilities(
    params: &ModelParams,
    initial: SiteIndex,
    grid: &TimeGrid,
) -> Result<Vec<f64>> {
    let d = decompose(params)?;
    let k0 = check_initial(params, initial)?;
    let evolver = Evolver::new(&d, k0, &all_levels(&d));
    let dim = d.dim();
    let chunks = evolver.scan(
        grid,
        || vec![0.0; dim],
        |acc, _, probs| {
            for (a, p) in acc.iter_mut().zip(probs) {
                *a += p;
            }
        },
    );
    let mut total = vec![0.0; dim];
    for c in chunks {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    let n = grid.len() as f64;
    Ok(total.into_iter().map(|x| x / n).collect())
}

/// Sites sharing one on-site energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyClass {
    pub energy: f64,
    pub sites: Vec<(usize, usize)>,
    pub probability: f64,
}

/// Infinite-time averaged site probabilities and their aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingProfile {
    pub n_bosons: usize,
    /// Values in linear site order.
    pub values: Vec<f64>,
    pub eps_deg: f64,
    /// Survival: the initial configuration of all vibrons on mode 1.
    pub pi_s: f64,
    /// Target: all vibrons on mode 2.
    pub pi_t: f64,
    /// Class at on-site energy `N_B w0 - 2A`, survival and target excluded.
    pub pi_2: f64,
    /// Class at on-site energy `N_B w0`, survival and target excluded.
    pub pi_0: f64,
    /// All on-site energy classes, ascending in energy.
    pub energy_classes: Vec<EnergyClass>,
}

impl LimitingProfile {
    pub fn value(&self, site: SiteIndex) -> f64 {
        self.values[linear_index(site)]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Infinite-time average of every site probability starting from `initial`.
///
/// Levels closer than `eps_deg` (default `1e-8 max(1, range)`) are treated
/// as one degenerate group; each group contributes `|<site|P|initial>|^2`
/// with `P` its spectral projector.
pub fn limiting_profile(
    params: &ModelParams,
    initial: SiteIndex,
    eps_deg: Option<f64>,
) -> Result<LimitingProfile> {
    let d = decompose(params)?;
    limiting_profile_from(params, &d, initial, eps_deg)
}

pub fn limiting_profile_from(
    params: &ModelParams,
    d: &SpectralDecomposition,
    initial: SiteIndex,
    eps_deg: Option<f64>,
) -> Result<LimitingProfile> {
    let k0 = check_initial(params, initial)?;
    let eps = eps_deg.unwrap_or_else(|| d.default_eps_deg());
    let classes = d.group_degenerate(eps)?;
    let mut values = vec![0.0; d.dim()];
    let mut amp = vec![0.0; d.dim()];
    for group in &classes.groups {
        amp.iter_mut().for_each(|a| *a = 0.0);
        for &mu in group {
            let chi = &d.vectors[mu];
            for (a, &x) in amp.iter_mut().zip(chi) {
                *a += x * chi[k0];
            }
        }
        for (v, a) in values.iter_mut().zip(&amp) {
            *v += a * a;
        }
    }

    let n = params.n_bosons;
    let survival = SiteIndex::new(n, 0);
    let target = SiteIndex::new(n, n);
    let lattice = params.lattice();
    let sites: Vec<SiteIndex> = lattice.sites().collect();
    let energies: Vec<f64> = sites.iter().map(|&s| site_energy(s, params)).collect();
    let energy_classes: Vec<EnergyClass> =
        crate::spectral::group_by_proximity(&energies, ENERGY_CLASS_TOL)
            .into_iter()
            .map(|g| EnergyClass {
                energy: energies[g[0]],
                sites: g.iter().map(|&k| (sites[k].v, sites[k].p)).collect(),
                probability: g.iter().map(|&k| values[k]).sum(),
            })
            .collect();
    let class_sum = |target_energy: f64| -> f64 {
        sites
            .iter()
            .zip(&energies)
            .filter(|(s, &e)| {
                **s != survival && **s != target && (e - target_energy).abs() <= ENERGY_CLASS_TOL
            })
            .map(|(&s, _)| values[linear_index(s)])
            .sum()
    };
    let e0 = n as f64 * params.omega0;
    Ok(LimitingProfile {
        n_bosons: n,
        pi_s: values[linear_index(survival)],
        pi_t: values[linear_index(target)],
        pi_2: class_sum(e0 - 2.0 * params.anharm),
        pi_0: class_sum(e0),
        values,
        eps_deg: eps,
        energy_classes,
    })
}

/// How a transfer time is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferMode {
    /// `pi / (E_1 - E_0)`.
    Spectral,
    /// First local minimum below `-N_B / 2` of the smoothed imbalance,
    /// searched on `[0, horizon]`.
    Dynamical { horizon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferTime {
    Time(f64),
    /// The two lowest levels are degenerate: the excitation stays put.
    Localized,
    /// No qualifying minimum before the horizon.
    NotReached,
}

impl TransferTime {
    pub fn time(self) -> Option<f64> {
        match self {
            TransferTime::Time(t) => Some(t),
            _ => None,
        }
    }
}

pub fn transfer_time(
    params: &ModelParams,
    initial: SiteIndex,
    mode: TransferMode,
) -> Result<TransferTime> {
    check_initial(params, initial)?;
    let d = decompose(params)?;
    let gap = d.gap()?;
    match mode {
        TransferMode::Spectral => {
            if gap < d.default_eps_deg() {
                Ok(TransferTime::Localized)
            } else {
                Ok(TransferTime::Time(std::f64::consts::PI / gap))
            }
        }
        TransferMode::Dynamical { horizon } => {
            let grid = TimeGrid::default_for(&d, horizon)?;
            let series = trace(params, &d, initial, &grid, &[0, 1], "smoothed_imbalance")?;
            let threshold = -0.5 * params.n_bosons as f64;
            Ok(first_minimum_below(&series.times, &series.imbalance(), threshold)
                .map_or(TransferTime::NotReached, TransferTime::Time))
        }
    }
}

/// First interior local minimum with value below `threshold`, refined by
/// a parabola through the three bracketing samples.
pub fn first_minimum_below(times: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    (1..values.len().saturating_sub(1))
        .find(|&i| {
            values[i] < threshold && values[i] < values[i - 1] && values[i] <= values[i + 1]
        })
        .map(|i| {
            let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
            let denom = y0 - 2.0 * y1 + y2;
            let h = times[i + 1] - times[i];
            if denom > 0.0 {
                times[i] + 0.5 * h * (y0 - y2) / denom
            } else {
                times[i]
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::basis_state;

    fn top(n: usize) -> SiteIndex {
        SiteIndex::new(n, 0)
    }

    #[test]
    fn grid_construction() {
        let g = TimeGrid::new(10.0, 4).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.time(4), 10.0);
        let g = TimeGrid::with_step(1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert!(TimeGrid::new(0.0, 3).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::with_step(1.0, -0.1).is_err());
        assert_eq!(TimeGrid::default_step(1.0), 0.05);
        assert!((TimeGrid::default_step(100.0) - 0.1 * std::f64::consts::PI / 100.0).abs() < 1e-15);
    }

    #[test]
    fn population_examples() {
        let s = basis_state(10, linear_index(SiteIndex::new(3, 0)));
        let p = populations(&s, 3).unwrap();
        assert_eq!((p.photon, p.mode1, p.mode2), (0.0, 3.0, 0.0));
        let s = basis_state(10, 0);
        let p = populations(&s, 3).unwrap();
        assert_eq!((p.photon, p.mode1, p.mode2), (3.0, 0.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = vec![Complex64::new(0.0, 0.0); 10];
        s[6] = Complex64::new(h, 0.0);
        s[9] = Complex64::new(0.0, h);
        let p = populations(&s, 3).unwrap();
        assert!((p.mode1 - 1.5).abs() < 1e-15 && (p.mode2 - 1.5).abs() < 1e-15);
        assert!(populations(&s, 2).is_err());
        let uniform = vec![Complex64::new(10f64.sqrt().recip(), 0.0); 10];
        for pi in site_probabilities(&uniform) {
            assert!((pi - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn harmonic_trace_is_cosine() {
        let params = ModelParams::resonant(3, 0.0, 0.0);
        let grid = TimeGrid::new(20.0, 4000).unwrap();
        let ts = imbalance_trace(&params, top(3), &grid).unwrap();
        for (t, dp) in ts.times.iter().zip(ts.imbalance()) {
            assert!((dp - 3.0 * (2.0 * t).cos()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn populations_sum_and_bound() {
        let params = ModelParams::resonant(4, 3.0, 2.5);
        let grid = TimeGrid::new(300.0, 6000).unwrap();
        let ts = imbalance_trace(&params, top(4), &grid).unwrap();
        assert!((ts.values[0].imbalance() - 4.0).abs() < 1e-12);
        for p in &ts.values {
            assert!((p.total() - 4.0).abs() < 1e-9);
            assert!(p.imbalance().abs() <= 4.0 + 1e-9);
        }
    }

    #[test]
    fn chunked_evolution_matches_direct_propagation() {
        let params = ModelParams::resonant(3, 4.0, 1.0);
        let grid = TimeGrid::new(1000.0, 3 * CHUNK + 17).unwrap();
        let ts = imbalance_trace(&params, top(3), &grid).unwrap();
        let d = decompose(&params).unwrap();
        let psi0 = basis_state(10, 6);
        for i in [0, 1, CHUNK - 1, CHUNK, 2 * CHUNK + 5, grid.len() - 1] {
            let psi = d.propagate(&psi0, grid.time(i)).unwrap();
            let p = populations(&psi, 3).unwrap();
            assert!((p.imbalance() - ts.values[i].imbalance()).abs() < 1e-10);
        }
    }

    #[test]
    fn full_restriction_equals_exact_trace() {
        let params = ModelParams::resonant(2, 4.0, 1.5);
        let grid = TimeGrid::new(50.0, 500).unwrap();
        let exact = imbalance_trace(&params, top(2), &grid).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let r = restricted_imbalance_trace(&params, top(2), &grid, &all).unwrap();
        assert_eq!(exact.values, r.values);
        assert!(restricted_imbalance_trace(&params, top(2), &grid, &[]).is_err());
        assert!(restricted_imbalance_trace(&params, top(2), &grid, &[6]).is_err());
    }

    #[test]
    fn smoothed_trace_tracks_slow_envelope() {
        let params = ModelParams::resonant(3, 4.0, 0.0);
        let grid = TimeGrid::new(150.0, 15000).unwrap();
        let exact = imbalance_trace(&params, top(3), &grid).unwrap().imbalance();
        let smooth = smoothed_imbalance_trace(&params, top(3), &grid).unwrap().imbalance();
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let (mx, my) = (mean(&exact), mean(&smooth));
        let cov: f64 = exact.iter().zip(&smooth).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = exact.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = smooth.iter().map(|b| (b - my).powi(2)).sum();
        assert!(cov / (vx * vy).sqrt() > 0.99);
        // two-level Rabi form with half-period pi / gap
        let gap = decompose(&params).unwrap().gap().unwrap();
        let amp = smooth[0];
        for (t, y) in grid_times(&grid).zip(&smooth) {
            assert!((y - amp * (gap * t).cos()).abs() < 1e-6);
        }
    }

    fn grid_times(grid: &TimeGrid) -> impl Iterator<Item = f64> + '_ {
        (0..grid.len()).map(|i| grid.time(i))
    }

    #[test]
    fn statistics_agree_with_stored_trace() {
        let params = ModelParams::resonant(3, 4.0, 3.0);
        let grid = TimeGrid::with_step(250.0, 0.01).unwrap();
        let stats = imbalance_statistics(&params, top(3), &grid).unwrap();
        let dp = imbalance_trace(&params, top(3), &grid).unwrap().imbalance();
        let mean = dp.iter().sum::<f64>() / dp.len() as f64;
        assert!((stats.mean - mean).abs() < 1e-12);
        assert_eq!(stats.samples, dp.len());
        assert_eq!(stats.min, dp.iter().copied().fold(f64::INFINITY, f64::min));
        assert!((stats.mean - 2.62).abs() < 0.1, "{}", stats.mean);
    }

    #[test]
    fn limiting_profile_closure_and_bounds() {
        for g in [0.0, 1.0, 3.0, 5.0, 8.0] {
            let params = ModelParams::resonant(3, 4.0, g);
            let prof = limiting_profile(&params, top(3), None).unwrap();
            assert!((prof.total() - 1.0).abs() < 1e-9);
            assert!(prof.values.iter().all(|&x| (-1e-15..=1.0 + 1e-12).contains(&x)));
            let classes = prof.pi_s + prof.pi_t + prof.pi_2 + prof.pi_0;
            assert!((classes - 1.0).abs() < 1e-9, "G = {g}: {classes}");
            let sizes: Vec<usize> = prof.energy_classes.iter().map(|c| c.sites.len()).collect();
            assert_eq!(sizes, vec![2, 4, 4]);
        }
    }

    #[test]
    fn limiting_profile_field_free_and_weak_coupling() {
        let prof = limiting_profile(&ModelParams::resonant(3, 4.0, 0.0), top(3), None).unwrap();
        assert!((prof.pi_s - 0.49).abs() < 0.01 && (prof.pi_t - 0.49).abs() < 0.01);
        let prof = limiting_profile(&ModelParams::resonant(3, 4.0, 1.0), top(3), None).unwrap();
        assert!((prof.pi_s - 0.48).abs() < 0.01);
        assert!((prof.value(SiteIndex::new(2, 0)) - 9e-3).abs() < 3e-3);
    }

    #[test]
    fn mirror_symmetric_profile_off_critical() {
        for g in [0.5, 2.0, 4.0, 6.0] {
            let params = ModelParams::resonant(3, 4.0, g);
            let prof = limiting_profile(&params, top(3), None).unwrap();
            for s in params.lattice().sites() {
                assert!((prof.value(s) - prof.value(s.mirror())).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn running_average_approaches_limit() {
        let params = ModelParams::resonant(3, 4.0, 1.0);
        let d = decompose(&params).unwrap();
        let grid = TimeGrid::default_for(&d, 5e3).unwrap();
        let avg = time_averaged_probabilities(&params, top(3), &grid).unwrap();
        let prof = limiting_profile(&params, top(3), None).unwrap();
        for (a, b) in avg.iter().zip(&prof.values) {
            assert!((a - b).abs() <= 0.02, "{a} vs {b}");
        }
    }

    #[test]
    fn transfer_time_modes() {
        let params = ModelParams::resonant(3, 4.0, 0.0);
        let spectral = transfer_time(&params, top(3), TransferMode::Spectral).unwrap();
        let gap = decompose(&params).unwrap().gap().unwrap();
        assert_eq!(spectral, TransferTime::Time(std::f64::consts::PI / gap));
        let dynamical =
            transfer_time(&params, top(3), TransferMode::Dynamical { horizon: 150.0 }).unwrap();
        let t = dynamical.time().unwrap();
        assert!((t - std::f64::consts::PI / gap).abs() < 0.05, "{t}");
        let short = transfer_time(&params, top(3), TransferMode::Dynamical { horizon: 30.0 });
        assert_eq!(short.unwrap(), TransferTime::NotReached);
        let n1 = ModelParams::resonant(1, 4.0, 1.0);
        assert_eq!(
            transfer_time(&n1, top(1), TransferMode::Spectral).unwrap(),
            TransferTime::Localized
        );
        assert!(transfer_time(&params, SiteIndex::new(4, 0), TransferMode::Spectral).is_err());
    }

    #[test]
    fn minimum_finder() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|&x| 2.0 * (x - 4.03).powi(2) - 2.0).collect();
        let m = first_minimum_below(&t, &y, -1.0).unwrap();
        assert!((m - 4.03).abs() < 1e-9);
        assert!(first_minimum_below(&t, &y, -3.0).is_none());
    }
}
