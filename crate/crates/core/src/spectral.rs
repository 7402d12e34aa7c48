//! Eigendecomposition, spectral propagator and degeneracy grouping.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, SymmetricMatrix};
use crate::model::{build_parity_blocks, ModelParams, Parity, ParityBlocks};

/// Eigenpairs of a Hamiltonian, energies ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub energies: Vec<f64>,
    /// `vectors[mu][k]` is the component of eigenstate `mu` on basis state `k`.
    pub vectors: Vec<Vec<f64>>,
    /// Mirror sector of each eigenstate when computed blockwise.
    pub parities: Option<Vec<Parity>>,
}

/// Decomposes a dense symmetric matrix.
pub fn eigendecompose(h: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let pairs = jacobi_eigen(h)?;
    Ok(SpectralDecomposition {
        energies: pairs.values,
        vectors: pairs.vectors,
        parities: None,
    })
}

/// Decomposes each mirror sector separately and merges the results in the
/// full site basis. Eigenstates carry exact parity labels, so states that
/// cross without hybridizing stay unmixed.
pub fn eigendecompose_blocks(blocks: &ParityBlocks) -> Result<SpectralDecomposition> {
    let mut states: Vec<(f64, Parity, Vec<f64>)> = Vec::new();
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let (block, _) = blocks.block(parity);
        if block.dim() == 0 {
            continue;
        }
        let pairs = jacobi_eigen(block)?;
        for (e, v) in pairs.values.into_iter().zip(pairs.vectors) {
            let mut full = blocks.embed(parity, &v);
            crate::linalg::orient(&mut full);
            states.push((e, parity, full));
        }
    }
    // stable: symmetric first on exact ties
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = SpectralDecomposition {
        energies: Vec::with_capacity(states.len()),
        vectors: Vec::with_capacity(states.len()),
        parities: Some(Vec::with_capacity(states.len())),
    };
    for (e, parity, v) in states {
        out.energies.push(e);
        out.vectors.push(v);
        out.parities.as_mut().unwrap().push(parity);
    }
    Ok(out)
}

/// Blockwise decomposition of the Hamiltonian for `params`.
pub fn decompose(params: &ModelParams) -> Result<SpectralDecomposition> {
    eigendecompose_blocks(&build_parity_blocks(params)?)
}

/// Partition of eigenstate indices into near-degenerate groups.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyClasses {
    pub groups: Vec<Vec<usize>>,
    pub tolerance: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `E_1 - E_0`.
    pub fn gap(&self) -> Result<f64> {
        if self.dim() < 2 {
            return Err(Error::domain("gap needs at least two levels"));
        }
        Ok(self.energies[1] - self.energies[0])
    }

    pub fn spectral_range(&self) -> f64 {
        match (self.energies.first(), self.energies.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Default degeneracy tolerance `1e-8 max(1, range)`.
    pub fn default_eps_deg(&self) -> f64 {
        1e-8 * self.spectral_range().max(1.0)
    }

    /// Single-linkage grouping of the (sorted) energies.
    pub fn group_degenerate(&self, eps: f64) -> Result<DegeneracyClasses> {
        if !(eps > 0.0) {
            return Err(Error::domain(format!("eps_deg = {eps} must be positive")));
        }
        Ok(DegeneracyClasses {
            groups: group_by_proximity(&self.energies, eps),
            tolerance: eps,
        })
    }

    /// Overlaps `<chi_mu|psi>` for every level.
    pub fn overlaps(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(psi.len())?;
        Ok(self
            .vectors
            .iter()
            .map(|chi| chi.iter().zip(psi).map(|(&c, &z)| z * c).sum())
            .collect())
    }

    /// `U(t) psi` using every level.
    pub fn propagate(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.propagate_levels(psi, t, &all)
    }

    /// `U(t) psi` with the spectral sum restricted to `levels`.
    /// The result is not renormalized.
    pub fn propagate_restricted(
        &self,
        psi: &[Complex64],
        t: f64,
        levels: &[usize],
    ) -> Result<Vec<Complex64>> {
        if levels.is_empty() {
            return Err(Error::domain("level set is empty"));
        }
        if let Some(&bad) = levels.iter().find(|&&mu| mu >= self.dim()) {
            return Err(Error::domain(format!(
                "level {bad} outside 0..{}",
                self.dim()
            )));
        }
        self.propagate_levels(psi, t, levels)
    }

    fn propagate_levels(
        &self,
        psi: &[Complex64],
        t: f64,
        levels: &[usize],
    ) -> Result<Vec<Complex64>> {
        let c = self.overlaps(psi)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for &mu in levels {
            let amp = c[mu] * Complex64::from_polar(1.0, -self.energies[mu] * t);
            for (o, &x) in out.iter_mut().zip(&self.vectors[mu]) {
                *o += amp * x;
            }
        }
        Ok(out)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::domain(format!(
                "state has length {n}, basis has {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Single-linkage grouping of arbitrary values: two values share a group
/// when a chain of neighbours closer than `eps` joins them. Groups are
/// ordered by value and hold indices into `values`.
pub fn group_by_proximity(values: &[f64], eps: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for k in order {
        match groups.last_mut() {
            Some(g) if values[k] - last <= eps => g.push(k),
            _ => groups.push(vec![k]),
        }
        last = values[k];
    }
    groups
}

/// Real basis vector as a complex state.
pub fn basis_state(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}
