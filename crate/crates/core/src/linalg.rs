//! Small dense complex linear algebra for one and two qubits.
//!
//! Everything here works on fixed-size `N x N` matrices (`N` is 2 or 4 in
//! practice), so there is no allocation and no external solver. Hermitian
//! spectra come from a cyclic Jacobi sweep with a fixed pivot order, which
//! makes the output bit-for-bit reproducible for identical input.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{Error, Rejection, Result};

/// Tolerance on `max |M - M^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `|Tr M - 1|` for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues down to `-NEGATIVE_EIG_TOL` are clamped to zero instead of rejected.
pub const NEGATIVE_EIG_TOL: f64 = 1e-10;
/// Eigenvalues below this contribute nothing to an entropy (`0 log 0 = 0`).
pub const ENTROPY_CUTOFF: f64 = 1e-14;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A dense `N x N` complex matrix stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize> {
    data: [[C64; N]; N],
}

pub type Mat2 = CMatrix<2>;
pub type Mat4 = CMatrix<4>;

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        Self { data: [[ZERO; N]; N] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(data: [[C64; N]; N]) -> Self {
        Self { data }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in values.into_iter().enumerate() {
            m.data[i][i] = C64::new(v, 0.0);
        }
        m
    }

    /// Projector `|v><v|` (not normalised).
    pub fn outer(v: &[C64; N]) -> Self {
        Self::from_fn(|i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> &[[C64; N]; N] {
        &self.data
    }

    /// Row-major flattening.
    pub fn to_vec(&self) -> Vec<C64> {
        self.data.iter().flatten().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.data[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    /// `U M U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                d = d.max((self.data[i][j] - other.data[i][j]).norm());
            }
        }
        d
    }

    /// `max |M - M^dagger|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..N {
            for j in i..N {
                d = d.max((self.data[i][j] - self.data[j][i].conj()).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(|i, j| (self.data[i][j] + self.data[j][i].conj()) * 0.5)
    }

    /// `Re Tr[self * other]`, the Hilbert-Schmidt pairing for Hermitian arguments.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            for k in 0..N {
                acc += (self.data[i][k] * other.data[k][i]).re;
            }
        }
        acc
    }

    fn frobenius_off_diagonal(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    acc += self.data[i][j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

impl<const N: usize> Default for CMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl<const N: usize> fmt::Debug for CMatrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for row in &self.data {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrix `sigma_p` for `p` in 1..=3; `p = 0` gives the identity.
pub fn pauli(p: usize) -> Mat2 {
    match p {
        0 => Mat2::identity(),
        1 => Mat2::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => Mat2::from_rows([[ZERO, -I], [I, ZERO]]),
        3 => Mat2::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index {p} out of range"),
    }
}

/// `n . sigma` for a real 3-vector.
pub fn pauli_dot(n: [f64; 3]) -> Mat2 {
    Mat2::from_rows([
        [C64::new(n[2], 0.0), C64::new(n[0], -n[1])],
        [C64::new(n[0], n[1]), C64::new(-n[2], 0.0)],
    ])
}

/// Qubit operator `(I + r . sigma) / 2`.
pub fn bloch_operator(r: [f64; 3]) -> Mat2 {
    (Mat2::identity() + pauli_dot(r)).scale(0.5)
}

/// The SU(2) element `w I - i (x sigma_x + y sigma_y + z sigma_z)` for a unit
/// quaternion `(w, x, y, z)`. Conjugation by it rotates Bloch vectors by the
/// rotation the quaternion represents.
pub fn su2_from_quaternion(q: [f64; 4]) -> Mat2 {
    let [w, x, y, z] = q;
    Mat2::from_rows([
        [C64::new(w, -z), C64::new(-y, -x)],
        [C64::new(y, -x), C64::new(w, z)],
    ])
}

/// Which qubit of a two-qubit system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Kronecker product `a (x) b`; qubit A is the more significant index.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Reduced state of the subsystem `keep`.
pub fn partial_trace(m: &Mat4, keep: Subsystem) -> Mat2 {
    let mut out = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::A => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
                Subsystem::B => m[(i, j)] + m[(2 + i, 2 + j)],
            };
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct Spectrum<const N: usize> {
    /// Descending.
    pub eigenvalues: [f64; N],
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMatrix<N>,
}

impl<const N: usize> Spectrum<N> {
    pub fn eigenvector(&self, k: usize) -> [C64; N] {
        std::array::from_fn(|i| self.eigenvectors[(i, k)])
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix<N> {
        let v = &self.eigenvectors;
        CMatrix::from_fn(|i, j| {
            (0..N)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[N - 1]
    }
}

/// Hermitian eigen-decomposition by cyclic complex Jacobi rotations.
///
/// Fails with [`Error::NonHermitian`] when `max |M - M^dagger| > 1e-10`.
pub fn hermitian_eig<const N: usize>(m: &CMatrix<N>) -> Result<Spectrum<N>> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NonHermitian(dev));
    }
    let mut a = m.hermitian_part();
    for i in 0..N {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::<N>::identity();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.frobenius_off_diagonal() < JACOBI_TOL {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|k| k);
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let eigenvalues = order.map(|k| a[(k, k)].re);
    let eigenvectors = CMatrix::from_fn(|i, k| v[(i, order[k])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilate `a[p][q]` with a unitary acting on coordinates `p, q`, and
/// accumulate the rotation into `v`.
fn jacobi_rotate<const N: usize>(a: &mut CMatrix<N>, v: &mut CMatrix<N>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J restricted to (p, q) is diag(1, conj(phase)) * [[c, s], [-s, c]].
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase.conj() * (-s);
    let jqq = phase.conj() * c;

    // a <- a J
    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // a <- J^dagger a
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // v <- v J
    for k in 0..N {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Shannon entropy in bits of a (sub-)probability vector, skipping entries
/// below [`ENTROPY_CUTOFF`].
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > ENTROPY_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Entropy of a qubit whose Bloch vector has length `r`.
pub fn qubit_entropy(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    shannon_entropy(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

/// Von Neumann entropy `-Tr[rho log2 rho]` of a density matrix.
pub fn von_neumann_entropy<const N: usize>(m: &CMatrix<N>) -> Result<f64> {
    let v = validate_density_matrix(m)?;
    Ok(shannon_entropy(&v.spectrum.eigenvalues))
}

/// An accepted density matrix, possibly after clamping tiny negative eigenvalues.
#[derive(Clone, Copy, Debug)]
pub struct Validated<const N: usize> {
    pub matrix: CMatrix<N>,
    pub spectrum: Spectrum<N>,
    /// Set when eigenvalues in `[-1e-10, 0)` were clamped and the matrix renormalised.
    pub clamped: bool,
}

/// Accept `m` as a density matrix or explain why not.
pub fn validate_density_matrix<const N: usize>(
    m: &CMatrix<N>,
) -> std::result::Result<Validated<N>, Rejection> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Rejection::NonHermitian { deviation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Rejection::TraceNotOne { trace });
    }
    let spectrum = hermitian_eig(m).expect("Hermiticity checked above");
    let min = spectrum.min_eigenvalue();
    if min < -NEGATIVE_EIG_TOL {
        return Err(Rejection::NegativeEigenvalue { min });
    }
    if min < 0.0 {
        let mut clamped = spectrum;
        for e in clamped.eigenvalues.iter_mut() {
            *e = e.max(0.0);
        }
        let total: f64 = clamped.eigenvalues.iter().sum();
        for e in clamped.eigenvalues.iter_mut() {
            *e /= total;
        }
        return Ok(Validated {
            matrix: clamped.reconstruct(),
            spectrum: clamped,
            clamped: true,
        });
    }
    Ok(Validated {
        matrix: m.hermitian_part(),
        spectrum,
        clamped: false,
    })
}
