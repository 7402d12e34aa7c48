//! Four-level reduction of the polariton problem.
//!
//! Only four configurations are kept: the bound states `|1_g> = |0,N,0>` and
//! `|2_g> = |0,0,N>`, and their one-photon partners `|1_e> = |1,N-1,0>` and
//! `|2_e> = |1,0,N-1>`. Relative to the bare `|1_g>` energy the Hamiltonian
//! reads
//!
//! ```text
//!        1g      2g      1e      2e
//! 1g  [  0       Jg      sG      0  ]
//! 2g  [  Jg      0       0       sG ]
//! 1e  [  sG      0       D       Je ]
//! 2e  [  0       sG      Je      D  ]
//! ```
//!
//! with `s = sqrt(N)`, `Jg = J_eff(N)`, `Je = J_eff(N-1)` and `D = 2(N-1)A`.
//! The mirror combinations `|±_g>`, `|±_e>` split it into two 2x2 blocks
//! `H_s = [[Jg, sG], [sG, D+Je]]` and `H_a = [[-Jg, sG], [sG, D-Je]]`.
//!
//! For a 2x2 block `[[a, c], [c, b]]` with eigenvalues `w+ > w-`, the
//! propagator is
//!
//! ```text
//! <a|U|a> = sum over ± of (1/2)(1 ∓ (b-a)/R) exp(-i w± t),  R = w+ - w-
//! <b|U|a> = c (exp(-i w+ t) - exp(-i w- t)) / R
//! ```
//!
//! The ground-pair amplitudes `U_S = <1g|U|1g>` and `U_T = <2g|U|1g>` are
//! half sums and differences of the two block diagonal elements. The
//! excited-pair amplitudes `U_1e`, `U_2e` follow in the same way from the
//! off-diagonal element, which gives the photon-assisted part of the
//! imbalance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::critical::effective_hopping;
use crate::dynamics::{Populations, TimeGrid, TimeSeries};
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, SymmetricMatrix};

/// Parameters of the reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourLevelParams {
    pub n_bosons: usize,
    pub j_g: f64,
    pub j_e: f64,
    pub delta: f64,
    pub g: f64,
}

pub fn four_level_params(n_bosons: usize, anharm: f64, hop: f64, g: f64) -> Result<FourLevelParams> {
    if n_bosons < 2 {
        return Err(Error::domain("the four-level model needs N_B >= 2"));
    }
    if !(anharm > 0.0) {
        return Err(Error::domain(format!("A = {anharm} must be positive")));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::domain(format!("G = {g} must be >= 0")));
    }
    Ok(FourLevelParams {
        n_bosons,
        j_g: effective_hopping(n_bosons, hop, anharm)?,
        j_e: effective_hopping(n_bosons - 1, hop, anharm)?,
        delta: 2.0 * (n_bosons as f64 - 1.0) * anharm,
        g,
    })
}

impl FourLevelParams {
    pub fn with_coupling(self, g: f64) -> Self {
        Self { g, ..self }
    }

    fn n(&self) -> f64 {
        self.n_bosons as f64
    }

    fn ng2(&self) -> f64 {
        self.n() * self.g * self.g
    }

    /// Explicit 4x4 matrix in the basis `1g, 2g, 1e, 2e`.
    pub fn matrix(&self) -> SymmetricMatrix {
        let sg = self.n().sqrt() * self.g;
        let rows = [
            [0.0, self.j_g, sg, 0.0],
            [self.j_g, 0.0, 0.0, sg],
            [sg, 0.0, self.delta, self.j_e],
            [0.0, sg, self.j_e, self.delta],
        ];
        SymmetricMatrix::from_upper(4, |i, j| rows[i][j])
    }

    // x and y: diagonal differences of the symmetric and antisymmetric blocks
    fn x(&self) -> f64 {
        self.delta + self.j_e - self.j_g
    }

    fn y(&self) -> f64 {
        self.delta - self.j_e + self.j_g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourLevelSpectrum {
    pub w_s_plus: f64,
    pub w_s_minus: f64,
    pub w_a_plus: f64,
    pub w_a_minus: f64,
}

impl FourLevelSpectrum {
    /// All four levels ascending.
    pub fn sorted(&self) -> [f64; 4] {
        let mut e = [self.w_s_minus, self.w_s_plus, self.w_a_minus, self.w_a_plus];
        e.sort_by(f64::total_cmp);
        e
    }

    /// Splitting of the two lowest levels.
    pub fn gap(&self) -> f64 {
        let e = self.sorted();
        e[1] - e[0]
    }
}

/// Closed-form block eigenvalues.
pub fn four_level_spectrum(p: &FourLevelParams) -> FourLevelSpectrum {
    let rs = ((p.x() / 2.0).powi(2) + p.ng2()).sqrt();
    let ra = ((p.y() / 2.0).powi(2) + p.ng2()).sqrt();
    let cs = (p.delta + p.j_e + p.j_g) / 2.0;
    let ca = (p.delta - p.j_e - p.j_g) / 2.0;
    FourLevelSpectrum {
        w_s_plus: cs + rs,
        w_s_minus: cs - rs,
        w_a_plus: ca + ra,
        w_a_minus: ca - ra,
    }
}

/// Closed-form spectrum checked against a direct diagonalization of the
/// explicit matrix.
pub fn checked_spectrum(p: &FourLevelParams) -> Result<FourLevelSpectrum> {
    let closed = four_level_spectrum(p);
    let direct = jacobi_eigen(&p.matrix())?.values;
    let scale = 1.0 + p.delta.abs() + p.n().sqrt() * p.g;
    for (a, b) in closed.sorted().iter().zip(&direct) {
        if (a - b).abs() > 1e-10 * scale {
            return Err(Error::Inconsistent(format!(
                "four-level eigenvalue {a} (closed form) vs {b} (direct)"
            )));
        }
    }
    Ok(closed)
}

/// Coupling at which `w_s- = w_a-`, if any:
/// `N G^2 = -Jg Je / (Jg + Je)^2 (D^2 - (Jg + Je)^2)`.
pub fn four_level_gc(n_bosons: usize, anharm: f64, hop: f64) -> Result<Option<f64>> {
    let p = four_level_params(n_bosons, anharm, hop, 0.0)?;
    let s = p.j_g + p.j_e;
    if s == 0.0 {
        return Ok(None);
    }
    let rhs = -p.j_g * p.j_e / (s * s) * (p.delta * p.delta - s * s);
    Ok((rhs > 0.0).then(|| (rhs / p.n()).sqrt()))
}

/// Weights `(alpha+, alpha-, beta+, beta-)` of the four exponentials.
pub fn coefficients(p: &FourLevelParams) -> (f64, f64, f64, f64) {
    let c2 = 4.0 * p.ng2();
    let (x, y) = (p.x(), p.y());
    let qs = x / (x * x + c2).sqrt();
    let qa = y / (y * y + c2).sqrt();
    (
        0.25 * (1.0 - qs),
        0.25 * (1.0 + qs),
        0.25 * (1.0 - qa),
        0.25 * (1.0 + qa),
    )
}

/// Survival and target amplitudes `(U_S, U_T)` at time `t`.
pub fn four_level_amplitudes(p: &FourLevelParams, t: f64) -> (Complex64, Complex64) {
    let a = four_level_all_amplitudes(p, t);
    (a[0], a[1])
}

/// Amplitudes on `1g, 2g, 1e, 2e` starting from `1g`.
pub fn four_level_all_amplitudes(p: &FourLevelParams, t: f64) -> [Complex64; 4] {
    let w = four_level_spectrum(p);
    let (ap, am, bp, bm) = coefficients(p);
    let e = |omega: f64| Complex64::from_polar(1.0, -omega * t);
    let (esp, esm, eap, eam) = (e(w.w_s_plus), e(w.w_s_minus), e(w.w_a_plus), e(w.w_a_minus));
    let sym = esp * ap + esm * am;
    let anti = eap * bp + eam * bm;
    let sg = p.n().sqrt() * p.g;
    let off = |plus: Complex64, minus: Complex64, r: f64| {
        if sg == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (plus - minus) * (sg / r)
        }
    };
    let s_e = off(esp, esm, w.w_s_plus - w.w_s_minus);
    let a_e = off(eap, eam, w.w_a_plus - w.w_a_minus);
    [sym + anti, sym - anti, (s_e + a_e) * 0.5, (s_e - a_e) * 0.5]
}

/// Limiting survival and target probabilities. `at_critical` merges the two
/// lowest levels and is only accepted when they are degenerate within
/// `eps_deg`.
pub fn four_level_limiting(p: &FourLevelParams, at_critical: bool, eps_deg: f64) -> Result<(f64, f64)> {
    let (ap, am, bp, bm) = coefficients(p);
    if !at_critical {
        let s = ap * ap + am * am + bp * bp + bm * bm;
        return Ok((s, s));
    }
    let w = four_level_spectrum(p);
    if (w.w_s_minus - w.w_a_minus).abs() > eps_deg {
        return Err(Error::domain(format!(
            "G = {} is not critical: lower levels split by {:e}",
            p.g,
            (w.w_s_minus - w.w_a_minus).abs()
        )));
    }
    Ok((
        ap * ap + bp * bp + (am + bm).powi(2),
        ap * ap + bp * bp + (am - bm).powi(2),
    ))
}

/// Small-`G` estimate `2|Jg| - N |Je - Jg| G^2 / (2 (N-1)^2 A^2)`, floored
/// at zero. `A` is recovered from `D`.
pub fn weak_coupling_gap(p: &FourLevelParams) -> f64 {
    let n1 = p.n() - 1.0;
    let a = p.delta / (2.0 * n1);
    let shift = p.n() * (p.j_e - p.j_g).abs() * p.g * p.g / (2.0 * n1 * n1 * a * a);
    (2.0 * p.j_g.abs() - shift).max(0.0)
}

/// Populations implied by the four-level amplitudes along `grid`.
pub fn four_level_imbalance(p: &FourLevelParams, grid: &TimeGrid) -> TimeSeries {
    let n = p.n();
    let mut times = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let t = grid.time(i);
        let [s, tt, e1, e2] = four_level_all_amplitudes(p, t).map(|z| z.norm_sqr());
        times.push(t);
        values.push(Populations {
            photon: e1 + e2,
            mode1: n * s + (n - 1.0) * e1,
            mode2: n * tt + (n - 1.0) * e2,
        });
    }
    TimeSeries {
        observable: "four_level_imbalance".into(),
        meta: vec![
            ("N_B".into(), n),
            ("J_g".into(), p.j_g),
            ("J_e".into(), p.j_e),
            ("Delta".into(), p.delta),
            ("G".into(), p.g),
        ],
        times,
        values,
    }
}
