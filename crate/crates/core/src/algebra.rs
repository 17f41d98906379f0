//! Fixed-size 2×2 / 4×4 matrices and the Pauli basis.
//!
//! Tensor products always put the polarization factor first and the spatial
//! factor second, so the row index of a 4×4 operator is `2 * i_pol + i_spa`.
//! This matches the amplitude ordering `[A00, A01, A10, A11]` used by
//! [`crate::states::TwoQubitAmplitudes`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default singularity threshold on `|det|` for [`invert4`].
pub const SINGULAR_DET: f64 = 1e-12;

/// Default element-wise comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense row-major `N×N` matrix. Serialized as a list of rows.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<T, const N: usize>(pub [[T; N]; N]);

impl<T: Serialize, const N: usize> Serialize for Matrix<T, N> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = self.0.iter().map(|r| r.as_slice()).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Deserialize<'de> + Copy + Zero, const N: usize> Deserialize<'de> for Matrix<T, N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        if rows.len() != N || rows.iter().any(|r| r.len() != N) {
            return Err(D::Error::custom(format!("expected a {N}x{N} matrix")));
        }
        let mut m = [[T::zero(); N]; N];
        for (i, r) in rows.into_iter().enumerate() {
            m[i].copy_from_slice(&r);
        }
        Ok(Matrix(m))
    }
}

pub type Complex2x2 = Matrix<C64, 2>;
pub type Complex4x4 = Matrix<C64, 4>;
pub type Real4x4 = Matrix<f64, 4>;

impl<T: Copy + Zero + One, const N: usize> Matrix<T, N> {
    pub fn zero() -> Self {
        Matrix([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: [T; N]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> T {
        (0..N).fold(T::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn row(&self, i: usize) -> [T; N] {
        self.0[i]
    }

    pub fn col(&self, j: usize) -> [T; N] {
        std::array::from_fn(|i| self.0[i][j])
    }

    pub fn apply(&self, v: &[T; N]) -> [T; N] {
        std::array::from_fn(|i| (0..N).fold(T::zero(), |acc, k| acc + self.0[i][k] * v[k]))
    }
}

impl<T, const N: usize> Index<(usize, usize)> for Matrix<T, N> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T, const N: usize> IndexMut<(usize, usize)> for Matrix<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Copy + Zero + One, const N: usize> Mul for Matrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).fold(T::zero(), |acc, k| acc + self.0[i][k] * rhs.0[k][j]))
    }
}

impl<T: Copy + Zero + One, const N: usize> Add for Matrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Copy + Zero + One + Sub<Output = T>, const N: usize> Sub for Matrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Copy + Zero + One + Neg<Output = T>, const N: usize> Neg for Matrix<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<T: fmt::Debug, const N: usize> fmt::Debug for Matrix<T, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<const N: usize> Matrix<C64, N> {
    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.dagger(), tol)
    }

    /// Largest imaginary part magnitude, used when dropping the imaginary part.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<const N: usize> Matrix<f64, N> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn frobenius_diff(&self, other: &Self) -> f64 {
        (*self - *other).frobenius()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn to_complex(&self) -> Matrix<C64, N> {
        Matrix::from_fn(|i, j| c(self.0[i][j], 0.0))
    }
}

impl Complex2x2 {
    pub const fn new(a: C64, b: C64, c_: C64, d: C64) -> Self {
        Matrix([[a, b], [c_, d]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        // Eigenvalues of the Hermitian 2x2 Gram matrix M†M.
        let g = self.dagger() * *self;
        let tr = g.0[0][0].re + g.0[1][1].re;
        let det = self.det().norm_sqr();
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let hi = (tr / 2.0 + disc).max(0.0).sqrt();
        // s1 * s2 = |det|; avoids cancellation in the small value.
        let lo = if hi > 0.0 { self.det().norm() / hi } else { 0.0 };
        (hi, lo)
    }

    /// Eigenvalues of a Hermitian 2×2 matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mean = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        (mean - r, mean + r)
    }
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
///
/// Cyclic Jacobi on the real-symmetric 8×8 embedding `[[Re, -Im], [Im, Re]]`;
/// each eigenvalue appears there twice.
pub fn hermitian_eigenvalues4(h: &Complex4x4) -> [f64; 4] {
    let mut a = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let z = h.0[i][j];
            a[i][j] = z.re;
            a[i + 4][j + 4] = z.re;
            a[i][j + 4] = -z.im;
            a[i + 4][j] = z.im;
        }
    }
    for _sweep in 0..64 {
        let off: f64 = (0..8)
            .flat_map(|i| (0..8).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..8 {
            for q in p + 1..8 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..8 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..8 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..8).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[2], ev[4], ev[6]]
}

/// Pauli matrix `σ_mu` in the order σ0 = I, σ1 = X, σ2 = Y, σ3 = Z.
pub fn pauli(mu: usize) -> Result<Complex2x2> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match mu {
        0 => Ok(Complex2x2::new(one, z, z, one)),
        1 => Ok(Complex2x2::new(z, one, one, z)),
        2 => Ok(Complex2x2::new(z, -i, i, z)),
        3 => Ok(Complex2x2::new(one, z, z, -one)),
        _ => Err(Error::IndexOutOfRange { index: mu, max: 3 }),
    }
}

/// All four Pauli matrices.
pub fn pauli_set() -> [Complex2x2; 4] {
    std::array::from_fn(|mu| pauli(mu).expect("mu < 4"))
}

/// Kronecker product `a ⊗ b` (polarization factor first).
pub fn kron(a: &Complex2x2, b: &Complex2x2) -> Complex4x4 {
    Complex4x4::from_fn(|r, s| a.0[r / 2][s / 2] * b.0[r % 2][s % 2])
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det4(m: &Real4x4) -> f64 {
    let mut a = m.0;
    let mut det = 1.0;
    for k in 0..4 {
        let p = pivot_row(&a, k);
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..4 {
            let f = a[r][k] / a[k][k];
            for cidx in k..4 {
                a[r][cidx] -= f * a[k][cidx];
            }
        }
    }
    det
}

fn pivot_row(a: &[[f64; 4]; 4], k: usize) -> usize {
    (k..4)
        .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
        .unwrap_or(k)
}

/// Inverse with the default singularity threshold.
pub fn invert4(m: &Real4x4) -> Result<Real4x4> {
    invert4_with(m, SINGULAR_DET)
}

/// Gauss-Jordan inverse with partial pivoting. Fails when `|det(m)| < threshold`.
pub fn invert4_with(m: &Real4x4, threshold: f64) -> Result<Real4x4> {
    let det = det4(m);
    if !det.is_finite() || det.abs() < threshold {
        return Err(Error::SingularMatrix { det, threshold });
    }
    let mut a = m.0;
    let mut inv = Real4x4::identity().0;
    for k in 0..4 {
        let p = pivot_row(&a, k);
        a.swap(p, k);
        inv.swap(p, k);
        let d = a[k][k];
        for j in 0..4 {
            a[k][j] /= d;
            inv[k][j] /= d;
        }
        for r in 0..4 {
            if r == k {
                continue;
            }
            let f = a[r][k];
            if f == 0.0 {
                continue;
            }
            for j in 0..4 {
                a[r][j] -= f * a[k][j];
                inv[r][j] -= f * inv[k][j];
            }
        }
    }
    Ok(Matrix(inv))
}
