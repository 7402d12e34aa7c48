//! Light–matter Hamiltonian of the anharmonic dimer in a single-mode cavity.
//!
//! In the `(v, p)` basis the Hamiltonian is a tight-binding model on the
//! triangular lattice:
//!
//! * on-site energy `E(v,p) = N ω + v(ω0 − ω) − v(v−1)A + 2p(v−p)A`
//! * horizontal bond `(v,p)–(v,p+1)`: `J(v,p) = sqrt((v−p)(p+1)) J`
//! * vertical bond `(v,p)–(v+1,p)`: `G(v,p) = sqrt((N−v)(v−p+1)) G`
//! * diagonal bond `(v,p)–(v+1,p+1)`: `G(v, v−p)`
//!
//! The assembled matrix stores energies relative to the constant `N ω`,
//! which is kept alongside it as [`Hamiltonian::offset`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{linear_index, Lattice, SiteIndex, DEFAULT_MAX_BOSONS};
use crate::linalg::SymmetricMatrix;

/// Parameters of one Hamiltonian instance. Energies are in units of `J`
/// when `hop = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Total boson number `N_B`.
    pub n_bosons: usize,
    /// Vibrational mode frequency `ω0`.
    pub omega0: f64,
    /// Cavity frequency `ω`.
    pub omega: f64,
    /// Anharmonicity `A` (attractive on-site interaction).
    pub anharm: f64,
    /// Dipole–dipole hopping `J`.
    pub hop: f64,
    /// Light–matter coupling `G`.
    pub coupling: f64,
}

impl ModelParams {
    /// Resonant cavity (`ω = ω0 = 0`) with unit hopping.
    pub fn resonant(n_bosons: usize, anharm: f64, coupling: f64) -> Self {
        Self {
            n_bosons,
            omega0: 0.0,
            omega: 0.0,
            anharm,
            hop: 1.0,
            coupling,
        }
    }

    pub fn with_coupling(self, coupling: f64) -> Self {
        Self { coupling, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_cap(DEFAULT_MAX_BOSONS)
    }

    pub fn validate_with_cap(&self, max_bosons: usize) -> Result<()> {
        if self.n_bosons < 1 {
            return Err(Error::domain("N_B must be at least 1"));
        }
        Lattice::with_cap(self.n_bosons, max_bosons)?;
        let finite = [
            ("omega0", self.omega0),
            ("omega", self.omega),
            ("A", self.anharm),
            ("J", self.hop),
            ("G", self.coupling),
        ];
        if let Some((name, _)) = finite.iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::domain(format!("{name} must be finite")));
        }
        if self.anharm < 0.0 {
            return Err(Error::domain(format!("A = {} must be >= 0", self.anharm)));
        }
        if self.coupling < 0.0 {
            return Err(Error::domain(format!("G = {} must be >= 0", self.coupling)));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::with_cap(self.n_bosons, usize::MAX).expect("uncapped lattice")
    }

    /// The constant `N_B ω` removed from the assembled diagonal.
    pub fn energy_offset(&self) -> f64 {
        self.n_bosons as f64 * self.omega
    }
}

/// On-site energy of configuration `(v, p)`, including the `N_B ω` offset.
pub fn site_energy(site: SiteIndex, params: &ModelParams) -> f64 {
    site_energy_relative(site, params) + params.energy_offset()
}

fn site_energy_relative(site: SiteIndex, params: &ModelParams) -> f64 {
    let v = site.v as f64;
    let p = site.p as f64;
    v * (params.omega0 - params.omega) - v * (v - 1.0) * params.anharm
        + 2.0 * p * (v - p) * params.anharm
}

/// Hopping amplitude on the bond `(v,p)–(v,p+1)`.
pub fn hop_coupling(site: SiteIndex, params: &ModelParams) -> f64 {
    let (v, p) = (site.v, site.p);
    if p >= v {
        return 0.0;
    }
    (((v - p) * (p + 1)) as f64).sqrt() * params.hop
}

/// Photon-exchange amplitude on the bond `(v,p)–(v+1,p)`.
pub fn photon_coupling(site: SiteIndex, params: &ModelParams) -> f64 {
    let (v, p) = (site.v, site.p);
    let n = params.n_bosons;
    if v >= n || p > v {
        return 0.0;
    }
    (((n - v) * (v - p + 1)) as f64).sqrt() * params.coupling
}

/// Assembled Hamiltonian with its energy offset.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub params: ModelParams,
    /// Constant `N_B ω` subtracted from every diagonal element.
    pub offset: f64,
    pub matrix: SymmetricMatrix,
}

pub fn build_hamiltonian(params: &ModelParams) -> Result<Hamiltonian> {
    params.validate()?;
    let lattice = params.lattice();
    let mut h = SymmetricMatrix::zeros(lattice.dim());
    for site in lattice.sites() {
        let k = linear_index(site);
        h.set(k, k, site_energy_relative(site, params));
        if site.p < site.v {
            let right = linear_index(SiteIndex::new(site.v, site.p + 1));
            h.set(k, right, hop_coupling(site, params));
        }
        if site.v < params.n_bosons {
            let below = linear_index(SiteIndex::new(site.v + 1, site.p));
            let diag = linear_index(SiteIndex::new(site.v + 1, site.p + 1));
            h.set(k, below, photon_coupling(site, params));
            h.set(k, diag, photon_coupling(site.mirror(), params));
        }
    }
    Ok(Hamiltonian {
        params: *params,
        offset: params.energy_offset(),
        matrix: h,
    })
}

/// Mirror sector of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        })
    }
}

/// A block basis vector: `(|a> ± |b>)/√2`, or `|a>` alone at a mirror fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SitePair {
    pub first: SiteIndex,
    pub second: SiteIndex,
}

impl SitePair {
    pub fn is_fixed_point(&self) -> bool {
        self.first == self.second
    }
}

/// Hamiltonian restricted to the two mirror sectors.
#[derive(Debug, Clone)]
pub struct ParityBlocks {
    pub params: ModelParams,
    pub offset: f64,
    pub sym_block: SymmetricMatrix,
    pub antisym_block: SymmetricMatrix,
    pub sym_basis_map: Vec<SitePair>,
    pub antisym_basis_map: Vec<SitePair>,
}

impl ParityBlocks {
    pub fn block(&self, parity: Parity) -> (&SymmetricMatrix, &[SitePair]) {
        match parity {
            Parity::Symmetric => (&self.sym_block, &self.sym_basis_map),
            Parity::Antisymmetric => (&self.antisym_block, &self.antisym_basis_map),
        }
    }

    /// Expands a block vector into the full site basis.
    pub fn embed(&self, parity: Parity, coeffs: &[f64]) -> Vec<f64> {
        let (_, map) = self.block(parity);
        let dim = self.sym_basis_map.len() + self.antisym_basis_map.len();
        let mut out = vec![0.0; dim];
        let sign = match parity {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric => -1.0,
        };
        for (pair, &c) in map.iter().zip(coeffs) {
            if pair.is_fixed_point() {
                out[linear_index(pair.first)] = c;
            } else {
                out[linear_index(pair.first)] = c * std::f64::consts::FRAC_1_SQRT_2;
                out[linear_index(pair.second)] = sign * c * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        out
    }
}

/// Splits the Hamiltonian into mirror-symmetric and antisymmetric blocks.
///
/// Site pairs `{(v,p), (v,v−p)}` with `p < v−p` contribute one row to each
/// block; fixed points `v = 2p` belong to the symmetric block.
pub fn build_parity_blocks(params: &ModelParams) -> Result<ParityBlocks> {
    let h = build_hamiltonian(params)?;
    let lattice = params.lattice();
    let mut sym_map = Vec::new();
    let mut anti_map = Vec::new();
    for site in lattice.sites() {
        let m = site.mirror();
        if site.p < m.p {
            sym_map.push(SitePair { first: site, second: m });
            anti_map.push(SitePair { first: site, second: m });
        } else if site == m {
            sym_map.push(SitePair { first: site, second: site });
        }
    }
    let sym_block = project(&h.matrix, &sym_map, 1.0);
    let antisym_block = project(&h.matrix, &anti_map, -1.0);
    Ok(ParityBlocks {
        params: *params,
        offset: h.offset,
        sym_block,
        antisym_block,
        sym_basis_map: sym_map,
        antisym_basis_map: anti_map,
    })
}

// <a|H|b> for a, b in the pair basis with the given relative sign.
fn project(h: &SymmetricMatrix, map: &[SitePair], sign: f64) -> SymmetricMatrix {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let element = |a: &SitePair, b: &SitePair| -> f64 {
        let (a1, a2) = (linear_index(a.first), linear_index(a.second));
        let (b1, b2) = (linear_index(b.first), linear_index(b.second));
        match (a.is_fixed_point(), b.is_fixed_point()) {
            (true, true) => h.get(a1, b1),
            (true, false) => (h.get(a1, b1) + sign * h.get(a1, b2)) * half,
            (false, true) => (h.get(a1, b1) + sign * h.get(a2, b1)) * half,
            (false, false) => h.get(a1, b1) + sign * h.get(a1, b2),
        }
    };
    SymmetricMatrix::from_upper(map.len(), |i, j| element(&map[i], &map[j]))
}
