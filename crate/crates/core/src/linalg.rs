//! Dense complex matrices and the handful of factorizations the effective
//! operator formulas need.
//!
//! Every operator in this crate (Hamiltonians, jump operators, projectors,
//! density matrices) is a [`ComplexMatrix`]: square, at least 1x1, and finite
//! at construction. Systems of interest have a handful of levels, so storage is
//! always dense.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Relative Hermiticity tolerance: `max |H - H^dag| <= HERMITICITY_TOL * ||H||_max`.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Relative tolerance under which eigenvalues are merged into one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Smallest admissible ratio between the smallest and largest LU pivots.
pub const PIVOT_REL_TOL: f64 = 1e-12;

/// Square, finite, dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::NotSquare {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, &entries),
        })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    expected: dim * dim,
                    found: rows.iter().map(Vec::len).sum(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    /// Real-valued matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let dim = values.len();
        Self::from_fn(dim, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn real_diagonal(values: &[f64]) -> Result<Self> {
        let values: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&values)
    }

    /// `value * |row><col|`.
    pub fn ket_bra(dim: usize, row: usize, col: usize, value: C64) -> Result<Self> {
        if row >= dim || col >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.max(col) + 1,
            });
        }
        Self::from_fn(dim, |i, j| {
            if i == row && j == col {
                value
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Diagonal 0/1 projector onto the given basis indices.
    pub fn projector(dim: usize, indices: &[usize]) -> Self {
        let mut p = Self::zeros(dim);
        for &i in indices {
            p.inner[(i, i)] = C64::new(1.0, 0.0);
        }
        p
    }

    pub(crate) fn from_inner(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.is_square() && inner.nrows() > 0);
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.inner[(i, i)]).collect()
    }

    /// Largest entry magnitude, `||M||_max`.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `max_ij |M_ij - conj(M_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `(M + M^dag) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    /// Keeps entries with row in `rows` and column in `cols`, zeroing the rest.
    ///
    /// Equivalent to `P_rows M P_cols` for diagonal 0/1 projectors, without
    /// any floating-point arithmetic.
    pub fn masked(&self, rows: &[usize], cols: &[usize]) -> Self {
        let n = self.dim();
        let mut keep_row = vec![false; n];
        let mut keep_col = vec![false; n];
        rows.iter().for_each(|&i| keep_row[i] = true);
        cols.iter().for_each(|&j| keep_col[j] = true);
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if keep_row[i] && keep_col[j] {
                    out[(i, j)] = self.inner[(i, j)];
                }
            }
        }
        Self { inner: out }
    }

    /// Largest entry magnitude outside the `rows x cols` block.
    pub fn off_block_residual(&self, rows: &[usize], cols: &[usize]) -> f64 {
        (self - &self.masked(rows, cols)).max_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        for i in 0..self.dim() {
            write!(f, "[")?;
            for j in 0..self.dim() {
                let z = self.inner[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.*e}{:+.*e}i", prec, z.re, prec, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;

            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix {
                    inner: $trait::$method(&self.inner, &rhs.inner),
                }
            }
        }

        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;

            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                $trait::$method(&self, &rhs)
            }
        }

        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;

            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                $trait::$method(&self, rhs)
            }
        }

        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;

            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                $trait::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.inner += &rhs.inner;
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -&self.inner,
        }
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        -&self
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn check_indices(dim: usize, indices: &[usize]) -> Result<()> {
    match indices.iter().find(|&&i| i >= dim) {
        Some(&i) => Err(Error::DimensionMismatch {
            expected: dim,
            found: i + 1,
        }),
        None => Ok(()),
    }
}

fn submatrix(m: &ComplexMatrix, support: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(support.len(), support.len(), |a, b| m[(support[a], support[b])])
}

fn embed(dim: usize, support: &[usize], block: &DMatrix<C64>) -> ComplexMatrix {
    let mut out = DMatrix::zeros(dim, dim);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            out[(i, j)] = block[(a, b)];
        }
    }
    ComplexMatrix::from_inner(out)
}

/// Inverse of `m`, optionally restricted to the block on `restricted_to`.
///
/// With a restriction, `m` must vanish outside the block (up to `1e-12` of
/// its largest entry) and the result is the block inverse embedded in the
/// full dimension, zero elsewhere. Uses LU with partial pivoting; the matrix
/// is declared singular when the smallest pivot falls below
/// [`PIVOT_REL_TOL`] times the largest.
pub fn mat_inverse(m: &ComplexMatrix, restricted_to: Option<&[usize]>) -> Result<ComplexMatrix> {
    let all: Vec<usize>;
    let support = match restricted_to {
        Some(s) => {
            check_indices(m.dim(), s)?;
            let residual = m.off_block_residual(s, s);
            if residual > 1e-12 * m.max_abs() {
                return Err(Error::NotBlockSupported { residual });
            }
            s
        }
        None => {
            all = (0..m.dim()).collect();
            &all
        }
    };
    if support.is_empty() {
        return Err(Error::EmptyMatrix);
    }

    let block = submatrix(m, support);
    let lu = block.lu();
    let u = lu.u();
    let (min_pivot, max_pivot) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), z| (lo.min(z.norm()), hi.max(z.norm())));
    if !(max_pivot > 0.0) || min_pivot < PIVOT_REL_TOL * max_pivot {
        return Err(Error::Singular {
            min_pivot,
            max_pivot,
        });
    }
    let inv = lu.try_inverse().ok_or(Error::Singular {
        min_pivot,
        max_pivot,
    })?;
    Ok(embed(m.dim(), support, &inv))
}

/// One eigenspace of a Hermitian matrix: energy and orthogonal projector.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub energy: f64,
    pub projector: ComplexMatrix,
}

/// Spectral decomposition `H = sum_l E_l P_l` of a Hermitian matrix.
///
/// Energies come out in descending order; eigenvalues within
/// [`DEGENERACY_TOL`]` * ||H||_max` of each other share one projector.
pub fn hermitian_eigendecomposition(h: &ComplexMatrix) -> Result<Vec<Eigenspace>> {
    let all: Vec<usize> = (0..h.dim()).collect();
    hermitian_eigendecomposition_on(h, &all)
}

/// [`hermitian_eigendecomposition`] of the block of `h` on `support`.
///
/// The projectors are full-dimension matrices that sum to the 0/1 projector
/// onto `support`.
pub fn hermitian_eigendecomposition_on(
    h: &ComplexMatrix,
    support: &[usize],
) -> Result<Vec<Eigenspace>> {
    check_indices(h.dim(), support)?;
    if support.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let scale = h.max_abs();
    let residual = h.hermiticity_residual();
    if residual > HERMITICITY_TOL * scale {
        return Err(Error::NotHermitian { residual });
    }
    let off = h.off_block_residual(support, support);
    if off > 1e-12 * scale {
        return Err(Error::NotBlockSupported { residual: off });
    }

    let block = submatrix(&h.hermitian_part(), support);
    let eig = block.symmetric_eigen();
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let tol = DEGENERACY_TOL * scale;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[*c.last().unwrap()] - eig.eigenvalues[k]).abs() <= tol => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }

    let dim = h.dim();
    let n = support.len();
    let spaces = clusters
        .into_iter()
        .map(|cluster| {
            let energy = cluster.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
            let projector = if cluster.len() == n {
                ComplexMatrix::projector(dim, support)
            } else {
                let mut p = DMatrix::<C64>::zeros(n, n);
                for &k in &cluster {
                    let v = eig.eigenvectors.column(k);
                    p += v * v.adjoint();
                }
                embed(dim, support, &p)
            };
            Eigenspace { energy, projector }
        })
        .collect();
    Ok(spaces)
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = h
        .hermitian_part()
        .inner
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `sqrt(sum |A_ij - B_ij|^2)`.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok((a - b).frobenius_norm())
}

/// `max |A_ij - B_ij|`.
pub fn max_abs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok((a - b).max_abs())
}

/// Trace distance `(1/2) sum |eig(A - B)|` between Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok(0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>())
}
