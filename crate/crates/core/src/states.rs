//! Two-qubit density matrices: the named families, a Hilbert-Schmidt sampler,
//! the Pauli expansion and the local-unitary normal form.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Rotation3, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Rejection, Result};
use crate::linalg::{
    bloch_operator, partial_trace, pauli, pauli_dot, su2_from_quaternion, tensor,
    validate_density_matrix, Mat2, Mat4, Spectrum, Subsystem, C64,
};

/// Slack on the PSD gates of the family constructors.
const PARAM_TOL: f64 = 1e-10;

/// Where a state came from: a family name with its parameters, `random`, or `external`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Provenance {
    pub fn new(source: &str) -> Self {
        Self {
            source: source.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn external() -> Self {
        Self::new("external")
    }
}

/// A validated two-qubit state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: Mat4,
    spectrum: Spectrum<4>,
    clamped: bool,
    provenance: Provenance,
}

impl DensityMatrix {
    /// Validate `matrix` (Hermitian, unit trace, PSD) and wrap it.
    pub fn new(matrix: Mat4, provenance: Provenance) -> std::result::Result<Self, Rejection> {
        let v = validate_density_matrix(&matrix)?;
        Ok(Self {
            matrix: v.matrix,
            spectrum: v.spectrum,
            clamped: v.clamped,
            provenance,
        })
    }

    pub fn maximally_mixed() -> Self {
        Self::new(Mat4::identity().scale(0.25), Provenance::new("maximally_mixed"))
            .expect("I/4 is a state")
    }

    /// Pure state `|psi><psi|` from an unnormalised amplitude vector.
    pub fn pure(amplitudes: [C64; 4], provenance: Provenance) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::OutOfRange {
                name: "amplitude norm",
                value: norm,
                range: "(0, inf)",
            });
        }
        Ok(Self::new(Mat4::outer(&amplitudes).scale(1.0 / norm), provenance)?)
    }

    pub fn product(rho_a: &Mat2, rho_b: &Mat2) -> Result<Self> {
        Ok(Self::new(tensor(rho_a, rho_b), Provenance::new("product"))?)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum<4> {
        &self.spectrum
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        self.spectrum.eigenvalues
    }

    /// True when tiny negative eigenvalues were clamped during validation.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        crate::linalg::shannon_entropy(&self.spectrum.eigenvalues)
    }

    pub fn reduced(&self, keep: Subsystem) -> Mat2 {
        partial_trace(&self.matrix, keep)
    }

    pub fn pauli_expansion(&self) -> PauliExpansion {
        PauliExpansion::of(&self.matrix)
    }

    /// Exchange the two qubits.
    pub fn swapped(&self) -> Self {
        const PERM: [usize; 4] = [0, 2, 1, 3];
        let m = Mat4::from_fn(|i, j| self.matrix[(PERM[i], PERM[j])]);
        Self::new(m, Provenance::new("swap")).expect("swap preserves validity")
    }

    /// `(u (x) v) rho (u (x) v)^dagger`.
    pub fn local_unitary(&self, u: &Mat2, v: &Mat2) -> Self {
        let w = tensor(u, v);
        Self::new(self.matrix.conjugate_by(&w), self.provenance.clone())
            .expect("unitary conjugation preserves validity")
    }

    /// Whether all entries off the diagonal and anti-diagonal vanish within `tol`.
    pub fn is_x_shaped(&self, tol: f64) -> bool {
        (0..4).all(|i| {
            (0..4).all(|j| i == j || i + j == 3 || self.matrix[(i, j)].norm() <= tol)
        })
    }
}

/// Coefficients of `rho = [I + a.sigma (x) I + I (x) b.sigma + sum T_pq sigma_p (x) sigma_q] / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliExpansion {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl PauliExpansion {
    pub fn of(m: &Mat4) -> Self {
        let id = Mat2::identity();
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        for p in 0..3 {
            a[p] = tensor(&pauli(p + 1), &id).trace_product_re(m);
            b[p] = tensor(&id, &pauli(p + 1)).trace_product_re(m);
            for q in 0..3 {
                t[p][q] = tensor(&pauli(p + 1), &pauli(q + 1)).trace_product_re(m);
            }
        }
        Self { a, b, t }
    }

    pub fn from_bloch(a: [f64; 3], b: [f64; 3], chi: [f64; 3]) -> Self {
        let mut t = [[0.0; 3]; 3];
        for p in 0..3 {
            t[p][p] = chi[p];
        }
        Self { a, b, t }
    }

    /// Rebuild the 4x4 operator.
    pub fn to_matrix(&self) -> Mat4 {
        let id = Mat2::identity();
        let mut m = Mat4::identity()
            + tensor(&pauli_dot(self.a), &id)
            + tensor(&id, &pauli_dot(self.b));
        for p in 0..3 {
            for q in 0..3 {
                if self.t[p][q] != 0.0 {
                    m = m + tensor(&pauli(p + 1), &pauli(q + 1)).scale(self.t[p][q]);
                }
            }
        }
        m.scale(0.25)
    }

    /// Exchange the roles of the two qubits.
    pub fn swapped(&self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                t[p][q] = self.t[q][p];
            }
        }
        Self {
            a: self.b,
            b: self.a,
            t,
        }
    }

    /// `T n`.
    pub fn t_mul(&self, n: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|p| (0..3).map(|q| self.t[p][q] * n[q]).sum())
    }

    /// `m^T T n`.
    pub fn t_bilinear(&self, m: &[f64; 3], n: &[f64; 3]) -> f64 {
        let tn = self.t_mul(n);
        m[0] * tn[0] + m[1] * tn[1] + m[2] * tn[2]
    }
}

/// The local-unitary normal form: `(u_a (x) u_b) rho (u_a (x) u_b)^dagger` has a
/// diagonal correlation matrix `diag(chi)` and local Bloch vectors `a`, `b`.
#[derive(Debug, Clone, Copy)]
pub struct BlochForm {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub chi: [f64; 3],
    pub u_a: Mat2,
    pub u_b: Mat2,
    /// Bloch-vector rotations implemented by `u_a`, `u_b`: `a = rot_a a_original`.
    pub rot_a: [[f64; 3]; 3],
    pub rot_b: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn expansion(&self) -> PauliExpansion {
        PauliExpansion::from_bloch(self.a, self.b, self.chi)
    }

    /// `[I + a.sigma (x) I + I (x) b.sigma + sum chi_p sigma_p (x) sigma_p] / 4`.
    pub fn reassemble(&self) -> Mat4 {
        self.expansion().to_matrix()
    }

    /// Axis `k` along which both local Bloch vectors lie (within `tol`), if
    /// any. In that frame the state has the X sparsity pattern.
    pub fn x_axis(&self, tol: f64) -> Option<usize> {
        let on_axis = |k: usize| {
            (0..3)
                .filter(|&p| p != k)
                .all(|p| self.a[p].abs() <= tol && self.b[p].abs() <= tol)
        };
        // Prefer z so that states already in X form keep their frame.
        [2, 0, 1].into_iter().find(|&k| on_axis(k))
    }
}

/// Normal form via a signed singular-value decomposition of the correlation
/// matrix, with both orthogonal factors forced into SO(3).
pub fn bloch_normal_form(rho: &DensityMatrix) -> BlochForm {
    let pe = rho.pauli_expansion();
    let t = Matrix3::from_fn(|i, j| pe.t[i][j]);
    let svd = t.svd(true, true);
    let mut u = svd.u.expect("requested U");
    let mut v_t = svd.v_t.expect("requested V^T");
    let mut s = svd.singular_values;
    if u.determinant() < 0.0 {
        u.column_mut(2).neg_mut();
        s[2] = -s[2];
    }
    if v_t.determinant() < 0.0 {
        v_t.row_mut(2).neg_mut();
        s[2] = -s[2];
    }
    // T = U diag(s) V^T, so rotating A by U^T and B by V^T diagonalises it.
    let rot_a = u.transpose();
    let rot_b = v_t;
    let a = rot_a * nalgebra::Vector3::from(pe.a);
    let b = rot_b * nalgebra::Vector3::from(pe.b);
    BlochForm {
        a: [a[0], a[1], a[2]],
        b: [b[0], b[1], b[2]],
        chi: [s[0], s[1], s[2]],
        u_a: lift_rotation(&rot_a),
        u_b: lift_rotation(&rot_b),
        rot_a: std::array::from_fn(|i| std::array::from_fn(|j| rot_a[(i, j)])),
        rot_b: std::array::from_fn(|i| std::array::from_fn(|j| rot_b[(i, j)])),
    }
}

/// SU(2) element whose adjoint action on Bloch vectors is the rotation `r`.
fn lift_rotation(r: &Matrix3<f64>) -> Mat2 {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
    su2_from_quaternion([q.w, q.i, q.j, q.k])
}

fn range_error(name: &'static str, value: f64, range: &'static str) -> Error {
    Error::OutOfRange { name, value, range }
}

/// The X state with the given diagonal and corner entries
/// (`rho14 = <00|rho|11>`, `rho23 = <01|rho|10>`).
pub fn x_state(diag: [f64; 4], rho14: C64, rho23: C64) -> Result<DensityMatrix> {
    let [r11, r22, r33, r44] = diag;
    if diag.iter().any(|&d| d < -PARAM_TOL) {
        return Err(Rejection::NegativeEigenvalue {
            min: diag.iter().copied().fold(f64::INFINITY, f64::min),
        }
        .into());
    }
    let trace: f64 = diag.iter().sum();
    if (trace - 1.0).abs() > PARAM_TOL {
        return Err(Rejection::TraceNotOne { trace }.into());
    }
    let outer = (r11.max(0.0) * r44.max(0.0)).sqrt();
    let inner = (r22.max(0.0) * r33.max(0.0)).sqrt();
    if rho14.norm() > outer + PARAM_TOL {
        return Err(Rejection::NegativeEigenvalue {
            min: (r11 + r44) / 2.0 - (((r11 - r44) / 2.0).powi(2) + rho14.norm_sqr()).sqrt(),
        }
        .into());
    }
    if rho23.norm() > inner + PARAM_TOL {
        return Err(Rejection::NegativeEigenvalue {
            min: (r22 + r33) / 2.0 - (((r22 - r33) / 2.0).powi(2) + rho23.norm_sqr()).sqrt(),
        }
        .into());
    }
    let mut m = Mat4::diag(diag);
    m[(0, 3)] = rho14;
    m[(3, 0)] = rho14.conj();
    m[(1, 2)] = rho23;
    m[(2, 1)] = rho23.conj();
    Ok(DensityMatrix::new(m, Provenance::new("x"))?)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Werner state `f |phi+><phi+| + (1 - f) I / 4`, `f` in `[-1/3, 1]`.
pub fn werner(f: f64) -> Result<DensityMatrix> {
    if !(-1.0 / 3.0 - PARAM_TOL..=1.0 + PARAM_TOL).contains(&f) {
        return Err(range_error("f", f, "[-1/3, 1]"));
    }
    let d = [(1.0 + f) / 4.0, (1.0 - f) / 4.0, (1.0 - f) / 4.0, (1.0 + f) / 4.0];
    Ok(x_state(d, real(f / 2.0), real(0.0))?.with_provenance(Provenance::new("W").with("f", f)))
}

/// Rank-3 family: `rho11 = rho44 = (1 - a)/2`, `rho22 = a`, `rho14 = r/2`.
pub fn r_family(a: f64, r: f64) -> Result<DensityMatrix> {
    if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&a) {
        return Err(range_error("a", a, "[0, 1]"));
    }
    if r.abs() > 1.0 - a + PARAM_TOL {
        return Err(range_error("r", r, "|r| <= 1 - a"));
    }
    let d = [(1.0 - a) / 2.0, a, 0.0, (1.0 - a) / 2.0];
    Ok(x_state(d, real(r / 2.0), real(0.0))?
        .with_provenance(Provenance::new("R").with("a", a).with("r", r)))
}

/// Two-parameter family: `a |phi+><phi+| + diag(0, (1-a-b)/2, (1-a+b)/2, 0)`.
pub fn p_family(a: f64, b: f64) -> Result<DensityMatrix> {
    if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&a) {
        return Err(range_error("a", a, "[0, 1]"));
    }
    if b.abs() > 1.0 - a + PARAM_TOL {
        return Err(range_error("b", b, "|b| <= 1 - a"));
    }
    let d = [a / 2.0, (1.0 - a - b) / 2.0, (1.0 - a + b) / 2.0, a / 2.0];
    Ok(x_state(d, real(a / 2.0), real(0.0))?
        .with_provenance(Provenance::new("P").with("a", a).with("b", b)))
}

/// `beta |phi+><phi+| + (1 - beta) |psi+><psi+|`.
pub fn beta_family(beta: f64) -> Result<DensityMatrix> {
    if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&beta) {
        return Err(range_error("beta", beta, "[0, 1]"));
    }
    let d = [beta / 2.0, (1.0 - beta) / 2.0, (1.0 - beta) / 2.0, beta / 2.0];
    Ok(x_state(d, real(beta / 2.0), real((1.0 - beta) / 2.0))?
        .with_provenance(Provenance::new("beta").with("beta", beta)))
}

/// `delta rho_beta(1/2) + (1 - delta) I / 4`.
pub fn delta_family(delta: f64) -> Result<DensityMatrix> {
    if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&delta) {
        return Err(range_error("delta", delta, "[0, 1]"));
    }
    let c = delta / 4.0;
    Ok(x_state([0.25; 4], real(c), real(c))?
        .with_provenance(Provenance::new("delta").with("delta", delta)))
}

/// Hilbert-Schmidt random state: `G G^dagger / Tr`, with `G` a `4 x rank`
/// matrix of independent standard complex Gaussians. `rank` defaults to 4.
pub fn random_state(seed: u64, rank: Option<usize>) -> Result<DensityMatrix> {
    let rank = rank.unwrap_or(4);
    if !(1..=4).contains(&rank) {
        return Err(range_error("rank", rank as f64, "1..=4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<[C64; 4]> = (0..rank)
        .map(|_| std::array::from_fn(|_| gaussian_c64(&mut rng)))
        .collect();
    let mut m = Mat4::zeros();
    for col in &g {
        m = m + Mat4::outer(col);
    }
    let tr = m.trace().re;
    let prov = Provenance::new("random")
        .with("seed", seed as f64)
        .with("rank", rank as f64);
    Ok(DensityMatrix::new(m.scale(1.0 / tr), prov)?)
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= n);
    su2_from_quaternion(q)
}

/// Uniformly random unit 3-vector.
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return v.map(|x| x / n);
        }
    }
}

/// Random X state: uniform diagonal on the simplex, corner moduli uniform
/// in their PSD range, uniform phases.
pub fn random_x_state(seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
    let total: f64 = e.iter().sum();
    let d = e.map(|x| x / total);
    let tau = std::f64::consts::TAU;
    let c14 = C64::from_polar(rng.random::<f64>() * (d[0] * d[3]).sqrt(), tau * rng.random::<f64>());
    let c23 = C64::from_polar(rng.random::<f64>() * (d[1] * d[2]).sqrt(), tau * rng.random::<f64>());
    x_state(d, c14, c23)
        .expect("constructed inside the PSD region")
        .with_provenance(Provenance::new("random_x").with("seed", seed as f64))
}

/// Random classical-classical state `sum p_ij |i><i| (x) |j><j|` in a random
/// local product basis.
pub fn random_classical_classical(seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
    let total: f64 = e.iter().sum();
    let diag = Mat4::diag(e.map(|x| x / total));
    let u = random_su2(&mut rng);
    let v = random_su2(&mut rng);
    DensityMatrix::new(diag, Provenance::new("cc").with("seed", seed as f64))
        .expect("diagonal probability vector")
        .local_unitary(&u, &v)
}

/// Random classical-quantum state `sum_i p_i |i><i| (x) rho_B^i` with two
/// non-orthogonal conditional states on B.
pub fn random_classical_quantum(seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: f64 = 0.2 + 0.6 * rng.random::<f64>();
    let r0 = random_axis(&mut rng).map(|x| x * (0.5 + 0.5 * rng.random::<f64>()));
    let r1 = random_axis(&mut rng).map(|x| x * (0.5 + 0.5 * rng.random::<f64>()));
    let m = tensor(&Mat2::diag([1.0, 0.0]), &bloch_operator(r0)).scale(p)
        + tensor(&Mat2::diag([0.0, 1.0]), &bloch_operator(r1)).scale(1.0 - p);
    DensityMatrix::new(m, Provenance::new("cq").with("seed", seed as f64))
        .expect("convex combination of product states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, von_neumann_entropy};

    fn bell() -> Mat4 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat4::outer(&[real(s), real(0.0), real(0.0), real(s)])
    }

    fn psi_plus() -> Mat4 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat4::outer(&[real(0.0), real(s), real(s), real(0.0)])
    }

    #[test]
    fn x_state_examples() {
        let m = x_state([0.25; 4], real(0.0), real(0.0)).unwrap();
        assert!(m.matrix().max_abs_diff(&Mat4::identity().scale(0.25)) < 1e-15);
        let b = x_state([0.5, 0.0, 0.0, 0.5], real(0.5), real(0.0)).unwrap();
        assert!(b.matrix().max_abs_diff(&bell()) < 1e-15);
        let bad = x_state([0.5, 0.3, 0.2, 0.0], real(0.4), real(0.1));
        assert!(matches!(
            bad,
            Err(Error::InvalidState(Rejection::NegativeEigenvalue { .. }))
        ));
    }

    #[test]
    fn werner_examples() {
        assert!(werner(1.0).unwrap().matrix().max_abs_diff(&bell()) < 1e-15);
        let w0 = werner(0.0).unwrap();
        assert!(w0.matrix().max_abs_diff(&Mat4::identity().scale(0.25)) < 1e-15);
        let ev = werner(1.0 / 3.0).unwrap().eigenvalues();
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (x, y) in ev.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(werner(-0.5).is_err());
        assert!(werner(-1.0 / 3.0).is_ok());
    }

    #[test]
    fn r_family_examples() {
        assert!(r_family(0.0, 1.0).unwrap().matrix().max_abs_diff(&bell()) < 1e-15);
        let pure = r_family(1.0, 0.0).unwrap();
        assert!(pure.matrix().max_abs_diff(&Mat4::diag([0.0, 1.0, 0.0, 0.0])) < 1e-15);
        let s = r_family(1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-14);
        // Eigenvalues 1/3, (1-a±r)/2 = 1/2, 1/6, and 0: rank 3.
        let ev = s.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-12 && ev[3].abs() < 1e-12);
        assert!(r_family(0.5, 0.6).is_err());
    }

    #[test]
    fn p_family_examples() {
        assert!(p_family(1.0, 0.0).unwrap().matrix().max_abs_diff(&bell()) < 1e-15);
        let cl = p_family(0.0, 0.0).unwrap();
        assert!(cl.matrix().max_abs_diff(&Mat4::diag([0.0, 0.5, 0.5, 0.0])) < 1e-15);
        let s = p_family(0.4, 0.2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| s.matrix()[(i, i)].re).collect();
        let expected = [0.2, 0.2, 0.4, 0.2];
        for (x, y) in diag.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(s.spectrum().min_eigenvalue() > -1e-14);
        assert!(p_family(0.5, 0.6).is_err());
    }

    #[test]
    fn beta_and_delta_examples() {
        assert!(beta_family(1.0).unwrap().matrix().max_abs_diff(&bell()) < 1e-15);
        assert!(beta_family(0.0).unwrap().matrix().max_abs_diff(&psi_plus()) < 1e-15);
        let half = beta_family(0.5).unwrap();
        let expected = bell().scale(0.5) + psi_plus().scale(0.5);
        assert!(half.matrix().max_abs_diff(&expected) < 1e-15);
        for (i, j) in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (1, 2)] {
            assert!((half.matrix()[(i, j)].re - 0.25).abs() < 1e-15);
        }

        let d0 = delta_family(0.0).unwrap();
        assert!(d0.matrix().max_abs_diff(&Mat4::identity().scale(0.25)) < 1e-15);
        assert!(delta_family(1.0).unwrap().matrix().max_abs_diff(half.matrix()) < 1e-15);
        let mid = delta_family(0.5).unwrap();
        assert!((mid.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(mid.spectrum().min_eigenvalue() >= 0.0);
    }

    #[test]
    fn beta_marginals_are_maximally_mixed() {
        for k in 0..=10 {
            let s = beta_family(k as f64 / 10.0).unwrap();
            for side in [Subsystem::A, Subsystem::B] {
                assert!(s.reduced(side).max_abs_diff(&Mat2::identity().scale(0.5)) < 1e-15);
            }
        }
    }

    #[test]
    fn random_state_properties() {
        let pure = random_state(11, Some(1)).unwrap();
        assert!((pure.eigenvalues()[0] - 1.0).abs() < 1e-10);
        let a = random_state(5, None).unwrap();
        let b = random_state(5, None).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_ne!(a.matrix(), random_state(6, None).unwrap().matrix());
        assert!(random_state(1, Some(0)).is_err());
    }

    #[test]
    fn random_full_rank_has_positive_spectrum() {
        for seed in 0..1000 {
            let s = random_state(seed, Some(4)).unwrap();
            assert!(s.spectrum().min_eigenvalue() > 0.0, "seed {seed}");
        }
    }

    #[test]
    fn pauli_expansion_round_trip() {
        for seed in 0..20 {
            let s = random_state(seed, None).unwrap();
            let back = s.pauli_expansion().to_matrix();
            assert!(back.max_abs_diff(s.matrix()) < 1e-13);
        }
    }

    fn check_normal_form(rho: &DensityMatrix) -> BlochForm {
        let form = bloch_normal_form(rho);
        let rotated = rho.matrix().conjugate_by(&tensor(&form.u_a, &form.u_b));
        assert!(form.reassemble().max_abs_diff(&rotated) < 1e-9);
        let t = PauliExpansion::of(&rotated).t;
        for p in 0..3 {
            for q in 0..3 {
                if p != q {
                    assert!(t[p][q].abs() < 1e-9);
                }
            }
        }
        let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        assert!(norm(form.a) <= 1.0 + 1e-10 && norm(form.b) <= 1.0 + 1e-10);
        form
    }

    #[test]
    fn normal_form_random_states() {
        for seed in 0..50 {
            check_normal_form(&random_state(seed, None).unwrap());
        }
    }

    #[test]
    fn normal_form_werner() {
        for f in [-0.3, 0.2, 0.7] {
            let form = check_normal_form(&werner(f).unwrap());
            assert!(form.a.iter().chain(form.b.iter()).all(|x| x.abs() < 1e-12));
            // T = diag(f, -f, f) directly from the matrix; singular values all |f|.
            let t = werner(f).unwrap().pauli_expansion().t;
            assert!((t[0][0] - f).abs() < 1e-14 && (t[1][1] + f).abs() < 1e-14);
            assert!((t[2][2] - f).abs() < 1e-14);
            for c in form.chi {
                assert!((c.abs() - f.abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normal_form_product_state() {
        let ra = bloch_operator([0.3, 0.1, -0.2]);
        let rb = bloch_operator([-0.1, 0.4, 0.2]);
        let rho = DensityMatrix::product(&ra, &rb).unwrap();
        let form = check_normal_form(&rho);
        // T = a b^T has rank one; in the normal frame chi_p = a_p b_p.
        let nonzero = form.chi.iter().filter(|c| c.abs() > 1e-12).count();
        assert!(nonzero <= 1);
        for p in 0..3 {
            assert!((form.chi[p] - form.a[p] * form.b[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_form_maximally_mixed() {
        let form = check_normal_form(&DensityMatrix::maximally_mixed());
        for v in [form.a, form.b, form.chi] {
            assert!(v.iter().all(|x| x.abs() < 1e-15));
        }
    }

    #[test]
    fn x_axis_detection() {
        let form = bloch_normal_form(&random_x_state(3));
        assert!(form.x_axis(1e-10).is_some());
        let form = bloch_normal_form(&random_state(3, None).unwrap());
        assert!(form.x_axis(1e-10).is_none());
    }

    #[test]
    fn swap_and_local_unitary_keep_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_state(2, None).unwrap();
        let t = s.swapped();
        assert!((s.entropy() - t.entropy()).abs() < 1e-12);
        let u = s.local_unitary(&random_su2(&mut rng), &random_su2(&mut rng));
        let e1 = hermitian_eig(s.matrix()).unwrap().eigenvalues;
        let e2 = hermitian_eig(u.matrix()).unwrap().eigenvalues;
        for (x, y) in e1.iter().zip(e2) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((von_neumann_entropy(u.matrix()).unwrap() - s.entropy()).abs() < 1e-9);
    }

    #[test]
    fn generated_families_are_valid() {
        for seed in 0..50 {
            assert!(random_x_state(seed).is_x_shaped(1e-15));
            let cc = random_classical_classical(seed);
            assert!(cc.spectrum().min_eigenvalue() > -1e-12);
            let cq = random_classical_quantum(seed);
            assert!((cq.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
