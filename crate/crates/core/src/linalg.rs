//! Small dense complex linear algebra.
//!
//! Everything here is sized for local dimensions of a few qubits; the
//! algorithms are the textbook `O(n³)` ones.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::Error;

pub type C64 = Complex64;

/// Entrywise tolerance for the Hermitian precondition of [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Real matrix from row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n_cols, "ragged rows");
                r.iter().map(|&x| c(x, 0.0))
            })
            .collect();
        CMatrix {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = CMatrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &CVector) -> Self {
        let n = v.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self[(i, k)];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += x * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matvec shape mismatch");
        CVector::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
                .collect(),
        )
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMatrix { data, ..*self }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMatrix { data, ..*self }
    }

    pub fn scale(&self, k: f64) -> CMatrix {
        let data = self.data.iter().map(|z| z * k).collect();
        CMatrix { data, ..*self }
    }

    /// `self += k · rhs`.
    pub fn add_scaled(&mut self, k: f64, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * k;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        self.add(&self.adjoint()).scale(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        CVector { data }
    }

    pub fn from_real(values: &[f64]) -> Self {
        CVector::new(values.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Standard basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![c(0.0, 0.0); dim];
        v[index] = c(1.0, 0.0);
        CVector::new(v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        CVector::new(self.data.iter().map(|z| z / n).collect())
    }

    /// `⟨self| M |self⟩`.
    pub fn expectation(&self, m: &CMatrix) -> C64 {
        self.inner(&m.matvec(self))
    }

    pub fn kron(&self, other: &CVector) -> CVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        CVector::new(data)
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    #[inline]
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

fn check_bipartite(m: &CMatrix, d_a: usize, d_b: usize) -> Result<(), Error> {
    if !m.is_square() || m.rows != d_a * d_b {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix is not an operator on C^{d_a} ⊗ C^{d_b}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

/// Trace over the second tensor factor: `out[i][j] = Σ_k M[(i,k),(j,k)]`.
pub fn partial_trace_b(m: &CMatrix, d_a: usize, d_b: usize) -> Result<CMatrix, Error> {
    check_bipartite(m, d_a, d_b)?;
    let mut out = CMatrix::zeros(d_a, d_a);
    for i in 0..d_a {
        for j in 0..d_a {
            out[(i, j)] = (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum();
        }
    }
    Ok(out)
}

/// Trace over the first tensor factor: `out[k][l] = Σ_i M[(i,k),(i,l)]`.
pub fn partial_trace_a(m: &CMatrix, d_a: usize, d_b: usize) -> Result<CMatrix, Error> {
    check_bipartite(m, d_a, d_b)?;
    let mut out = CMatrix::zeros(d_b, d_b);
    for k in 0..d_b {
        for l in 0..d_b {
            out[(k, l)] = (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum();
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `j` is the eigenvector of `values[j]`.
    pub vectors: CMatrix,
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..m.rows {
        for j in 0..m.cols {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    libm::sqrt(sum)
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of `h[p][q]` with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation to the
/// resulting real 2x2 block.
pub fn herm_eig(h: &CMatrix) -> Result<HermEig, Error> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let dev = h.hermitian_deviation();
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) < threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) < threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermEig { values, vectors })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.rows;
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs < 1e-300 {
        return;
    }
    let phase = apq / abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
    };
    let cs = 1.0 / libm::sqrt(1.0 + t * t);
    let sn = t * cs;
    let pc = phase.conj();

    // J restricted to (p,q): [[c, s], [-s·ē, c·ē]] with ē = conj(phase).
    let j_pp = c(cs, 0.0);
    let j_pq = c(sn, 0.0);
    let j_qp = pc * (-sn);
    let j_qq = pc * cs;

    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = c(0.0, 0.0);
    a[(q, p)] = c(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    // V ← V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Projector onto the span of the given columns of a unitary.
pub fn projector_onto(vectors: &CMatrix, columns: impl IntoIterator<Item = usize>) -> CMatrix {
    let n = vectors.rows;
    let mut out = CMatrix::zeros(n, n);
    for j in columns {
        for r in 0..n {
            for s in 0..n {
                out[(r, s)] += vectors[(r, j)] * vectors[(s, j)].conj();
            }
        }
    }
    out
}

/// Orthonormalizes the columns of a square matrix by modified Gram-Schmidt.
/// Returns `None` if the columns are numerically dependent.
pub fn gram_schmidt(m: &CMatrix) -> Option<CMatrix> {
    let n = m.rows;
    let mut cols: Vec<CVector> = (0..m.cols).map(|j| m.column(j)).collect();
    for j in 0..cols.len() {
        for k in 0..j {
            let proj = cols[k].inner(&cols[j]);
            for i in 0..n {
                let x = cols[k][i];
                cols[j][i] -= proj * x;
            }
        }
        let norm = cols[j].norm();
        if norm < 1e-12 {
            return None;
        }
        cols[j] = cols[j].normalized();
    }
    let mut out = CMatrix::zeros(n, m.cols);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Some(out)
}
