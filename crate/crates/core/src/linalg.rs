//! Dense real-symmetric matrices, a cyclic Jacobi eigensolver, and
//! compensated (double-double) accumulation for Rayleigh quotients.

use crate::error::{Error, Result};

/// Dense real-symmetric matrix stored row-major.
///
/// Every mutation writes both `(i, j)` and `(j, i)`, so the stored entries
/// are symmetric bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// Builds a matrix from the upper triangle `f(i, j)`, `i <= j`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full row-major data, failing unless it is exactly symmetric.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::domain(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = Self { dim, entries };
        if !m.is_symmetric() {
            return Err(Error::domain("matrix is not symmetric"));
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.dim + j] = value;
        self.entries[j * self.dim + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Conjugation `Pᵀ H P` by a permutation given as an index map.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        Self::from_upper(self.dim, |i, j| self.get(perm[i], perm[j]))
    }
}

/// Eigenpairs of a symmetric matrix, ascending.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Eigenvectors, `vectors[mu]` has length `dim`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 60;

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues are returned in ascending order and each eigenvector is
/// oriented so that its largest-magnitude component (the first one on ties)
/// is positive.
pub fn jacobi_eigen(m: &SymmetricMatrix) -> Result<EigenPairs> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::domain("cannot diagonalize an empty matrix"));
    }
    let mut a = m.as_row_major().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        if off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
                dim: n,
            });
        }
        let thresh = if sweeps < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweeps > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                let rotate = |buf: &mut [f64], i: usize, j: usize| {
                    let g = buf[i];
                    let h = buf[j];
                    buf[i] = g - s * (h + g * tau);
                    buf[j] = h + s * (g - h * tau);
                };
                for r in 0..p {
                    rotate(&mut a, r * n + p, r * n + q);
                }
                for r in (p + 1)..q {
                    rotate(&mut a, p * n + r, r * n + q);
                }
                for r in (q + 1)..n {
                    rotate(&mut a, p * n + r, q * n + r);
                }
                for r in 0..n {
                    rotate(&mut v, r * n + p, r * n + q);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|r| v[r * n + k]).collect();
            orient(&mut col);
            col
        })
        .collect();
    Ok(EigenPairs {
        values,
        vectors,
        sweeps,
    })
}

/// Flips the sign so that the largest-magnitude component is positive.
pub(crate) fn orient(x: &mut [f64]) {
    let mut best = 0;
    for (i, c) in x.iter().enumerate() {
        if c.abs() > x[best].abs() {
            best = i;
        }
    }
    if x[best] < 0.0 {
        x.iter_mut().for_each(|c| *c = -*c);
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    /// Adds the exact product `a * b`.
    pub fn add_prod(self, a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        self + Self { hi: p, lo: e }
    }

}

impl std::ops::Add for DoubleDouble {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl std::ops::Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl std::ops::Div for DoubleDouble {
    type Output = Self;

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self - other.mul_f64(q1);
        let q2 = r.hi / other.hi;
        let r = r - other.mul_f64(q2);
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

/// Rayleigh quotient `xᵀ M x / xᵀ x` accumulated in double-double.
///
/// For an eigenvector accurate to `δ` the quotient is accurate to about
/// `spread · δ²`, far below the rounding level of `M`'s eigenvalues.
pub fn rayleigh_quotient(m: &SymmetricMatrix, x: &[f64]) -> DoubleDouble {
    assert_eq!(x.len(), m.dim());
    let mut num = DoubleDouble::ZERO;
    let mut den = DoubleDouble::ZERO;
    for (i, &xi) in x.iter().enumerate() {
        let mut y = DoubleDouble::ZERO;
        for (&mij, &xj) in m.row(i).iter().zip(x) {
            y = y.add_prod(mij, xj);
        }
        num = num + y.mul_f64(xi);
        den = den.add_prod(xi, xi);
    }
    num / den
}
