//! Vibron–photon number-state basis.
//!
//! A configuration with `n` bosons in total is labelled by `(v, p)`: `v`
//! vibrons live on the dimer, `p` of them on mode 2, and the remaining
//! `n - v` quanta are cavity photons. The labels form a triangle
//! `0 <= p <= v <= n`; each fixed-`v` row is a horizontal chain coupled by
//! dipole hopping, and neighbouring rows are coupled by photon exchange.
//!
//! States are ordered row-major (increasing `v`, then increasing `p`), so
//! every fixed-`v` chain occupies a contiguous index range.

use crate::error::{Error, Result};

/// Largest boson number accepted unless a caller raises the cap.
pub const DEFAULT_MAX_BOSONS: usize = 16;

/// A site `(v, p)` of the triangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex {
    /// Number of vibrons on the dimer.
    pub v: usize,
    /// Number of vibrons on mode 2.
    pub p: usize,
}

impl SiteIndex {
    pub const fn new(v: usize, p: usize) -> Self {
        Self { v, p }
    }

    /// Occupations `|n_photon, n_1, n_2>` for a total of `n_bosons` quanta.
    pub fn number_state(self, n_bosons: usize) -> NumberState {
        NumberState {
            photons: n_bosons - self.v,
            vibrons_mode1: self.v - self.p,
            vibrons_mode2: self.p,
        }
    }

    /// Image under the exchange of the two vibrational modes.
    pub const fn mirror(self) -> Self {
        Self {
            v: self.v,
            p: self.v - self.p,
        }
    }

    /// Fixed point of the mirror map (`v = 2p`).
    pub const fn is_mirror_fixed(self) -> bool {
        self.v == 2 * self.p
    }

    fn is_valid(self, n_bosons: usize) -> bool {
        self.p <= self.v && self.v <= n_bosons
    }
}

impl std::fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.v, self.p)
    }
}

/// Occupation numbers of the cavity mode and the two vibrational modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumberState {
    pub photons: usize,
    pub vibrons_mode1: usize,
    pub vibrons_mode2: usize,
}

impl NumberState {
    pub fn total(&self) -> usize {
        self.photons + self.vibrons_mode1 + self.vibrons_mode2
    }

    pub fn site(&self) -> SiteIndex {
        SiteIndex::new(
            self.vibrons_mode1 + self.vibrons_mode2,
            self.vibrons_mode2,
        )
    }
}

/// Kind of lattice bond between two coupled configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondKind {
    /// Dipole hopping `(v,p) <-> (v,p+1)`.
    Horizontal,
    /// Photon absorption onto mode 1, `(v,p) <-> (v+1,p)`.
    Vertical,
    /// Photon absorption onto mode 2, `(v,p) <-> (v+1,p+1)`.
    Diagonal,
}

/// Number of configurations for `n_bosons` quanta.
pub const fn basis_dimension(n_bosons: usize) -> usize {
    (n_bosons + 1) * (n_bosons + 2) / 2
}

/// Linear index of `(v, p)`.
pub fn index_of(v: usize, p: usize, n_bosons: usize) -> Result<usize> {
    let site = SiteIndex::new(v, p);
    if !site.is_valid(n_bosons) {
        return Err(Error::domain(format!(
            "site {site} outside the lattice for N_B = {n_bosons}"
        )));
    }
    Ok(linear_index(site))
}

/// Inverse of [`index_of`].
pub fn state_of(k: usize, n_bosons: usize) -> Result<SiteIndex> {
    let dim = basis_dimension(n_bosons);
    if k >= dim {
        return Err(Error::domain(format!(
            "index {k} outside 0..{dim} for N_B = {n_bosons}"
        )));
    }
    // largest v with v(v+1)/2 <= k
    let mut v = (((8 * k + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
    while (v + 1) * (v + 2) / 2 <= k {
        v += 1;
    }
    while v * (v + 1) / 2 > k {
        v -= 1;
    }
    Ok(SiteIndex::new(v, k - v * (v + 1) / 2))
}

#[inline]
pub(crate) const fn linear_index(site: SiteIndex) -> usize {
    site.v * (site.v + 1) / 2 + site.p
}

/// Sites coupled to `(v, p)` by a nonzero off-diagonal Hamiltonian element.
pub fn neighbors(v: usize, p: usize, n_bosons: usize) -> Result<Vec<(SiteIndex, BondKind)>> {
    index_of(v, p, n_bosons)?;
    let mut out = Vec::with_capacity(6);
    if p < v {
        out.push((SiteIndex::new(v, p + 1), BondKind::Horizontal));
    }
    if p > 0 {
        out.push((SiteIndex::new(v, p - 1), BondKind::Horizontal));
    }
    if v < n_bosons {
        out.push((SiteIndex::new(v + 1, p), BondKind::Vertical));
        out.push((SiteIndex::new(v + 1, p + 1), BondKind::Diagonal));
    }
    if v > 0 {
        if p < v {
            out.push((SiteIndex::new(v - 1, p), BondKind::Vertical));
        }
        if p > 0 {
            out.push((SiteIndex::new(v - 1, p - 1), BondKind::Diagonal));
        }
    }
    Ok(out)
}

/// Mirror image `(v, v - p)` of a site.
pub fn mirror(v: usize, p: usize) -> Result<SiteIndex> {
    if p > v {
        return Err(Error::domain(format!("p = {p} exceeds v = {v}")));
    }
    Ok(SiteIndex::new(v, p).mirror())
}

/// The ordered basis for a fixed boson number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    n_bosons: usize,
}

impl Lattice {
    pub fn new(n_bosons: usize) -> Result<Self> {
        Self::with_cap(n_bosons, DEFAULT_MAX_BOSONS)
    }

    pub fn with_cap(n_bosons: usize, max_bosons: usize) -> Result<Self> {
        if n_bosons > max_bosons {
            return Err(Error::domain(format!(
                "N_B = {n_bosons} exceeds the cap of {max_bosons}"
            )));
        }
        Ok(Self { n_bosons })
    }

    pub fn n_bosons(&self) -> usize {
        self.n_bosons
    }

    pub fn dim(&self) -> usize {
        basis_dimension(self.n_bosons)
    }

    /// Sites in linear-index order.
    pub fn sites(&self) -> impl Iterator<Item = SiteIndex> + '_ {
        (0..=self.n_bosons).flat_map(|v| (0..=v).map(move |p| SiteIndex::new(v, p)))
    }

    pub fn index(&self, site: SiteIndex) -> Result<usize> {
        index_of(site.v, site.p, self.n_bosons)
    }

    pub fn site(&self, k: usize) -> Result<SiteIndex> {
        state_of(k, self.n_bosons)
    }

    /// Mirror permutation as an index map: `perm[k]` is the index of the mirror of site `k`.
    pub fn mirror_permutation(&self) -> Vec<usize> {
        self.sites().map(|s| linear_index(s.mirror())).collect()
    }
}
