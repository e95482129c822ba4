//! Bi-local projective measurements and their outcome statistics.

use crate::error::{Error, Result};
use crate::linalg::{pauli, su2_from_quaternion, tensor, Mat2, Mat4, Subsystem};
use crate::states::{DensityMatrix, PauliExpansion, Provenance};

/// Unit-norm tolerance on measurement axes.
pub const AXIS_NORM_TOL: f64 = 1e-12;

/// Outcomes with probability below this are dropped from conditional averages.
pub const OUTCOME_CUTOFF: f64 = 1e-14;

pub type Axis = [f64; 3];

pub(crate) fn dot(x: &Axis, y: &Axis) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

pub(crate) fn norm(x: &Axis) -> f64 {
    dot(x, x).sqrt()
}

pub fn normalize(x: Axis) -> Result<Axis> {
    let n = norm(&x);
    if !(n > 1e-15) || !n.is_finite() {
        return Err(Error::DegenerateAxis);
    }
    Ok(x.map(|c| c / n))
}

pub(crate) fn mat_vec(m: &[[f64; 3]; 3], v: &Axis) -> Axis {
    std::array::from_fn(|i| dot(&m[i], v))
}

pub(crate) fn mat_t_vec(m: &[[f64; 3]; 3], v: &Axis) -> Axis {
    std::array::from_fn(|i| (0..3).map(|k| m[k][i] * v[k]).sum())
}

/// Coordinates of one local unitary `U = y0 I + i y.sigma`, `|y| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementParams {
    pub y: [f64; 4],
    pub kappa: f64,
    pub h: f64,
    pub w: f64,
}

impl MeasurementParams {
    pub fn from_y(y: [f64; 4]) -> Result<Self> {
        let n = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 1e-15) {
            return Err(Error::DegenerateAxis);
        }
        let y = y.map(|c| c / n);
        Ok(Self {
            y,
            kappa: y[0] * y[0] + y[3] * y[3],
            h: y[0] * y[1] + y[2] * y[3],
            w: y[1] * y[3] - y[0] * y[2],
        })
    }

    /// A `y` realising the given axis: rotate `z` onto `n` about `z x n`.
    pub fn for_axis(n: Axis) -> Result<Self> {
        let n = normalize(n)?;
        // U sigma_z U^dagger = n.sigma for U = cos(t/2) I - i sin(t/2) m.sigma,
        // with m the unit rotation axis; U = y0 I + i y.sigma gives y = -sin(t/2) m.
        let c = (0.5 * (1.0 + n[2])).max(0.0).sqrt();
        let s = (0.5 * (1.0 - n[2])).max(0.0).sqrt();
        let perp = (n[0] * n[0] + n[1] * n[1]).sqrt();
        let m = if perp > 1e-15 {
            [-n[1] / perp, n[0] / perp, 0.0]
        } else {
            [1.0, 0.0, 0.0]
        };
        Self::from_y([c, -s * m[0], -s * m[1], -s * m[2]])
    }

    pub fn l(&self) -> f64 {
        1.0 - self.kappa
    }

    pub fn unitary(&self) -> Mat2 {
        let [y0, y1, y2, y3] = self.y;
        su2_from_quaternion([y0, -y1, -y2, -y3])
    }

    /// `gamma = (2w, 2h, 2 kappa - 1)`: the Bloch axis of the measured basis.
    pub fn axis(&self) -> Axis {
        [2.0 * self.w, 2.0 * self.h, 2.0 * self.kappa - 1.0]
    }

    /// Rows `p` hold `(alpha_p, beta_p, gamma_p)` from
    /// `U^dagger sigma_p U = alpha_p sigma_1 + beta_p sigma_2 + gamma_p sigma_3`.
    pub fn rotation_coefficients(&self) -> [[f64; 3]; 3] {
        let u = self.unitary();
        std::array::from_fn(|p| {
            let rotated = u.adjoint() * pauli(p + 1) * u;
            std::array::from_fn(|q| 0.5 * pauli(q + 1).trace_product_re(&rotated))
        })
    }
}

/// One complete rank-1 projective measurement on each qubit, described by
/// Bloch axes; outcome `k = 0` projects onto `(I + n.sigma)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMeasurement {
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub params_a: Option<MeasurementParams>,
    pub params_b: Option<MeasurementParams>,
}

impl LocalMeasurement {
    pub fn from_axes(axis_a: Axis, axis_b: Axis) -> Result<Self> {
        Ok(Self {
            axis_a: normalize(axis_a)?,
            axis_b: normalize(axis_b)?,
            params_a: None,
            params_b: None,
        })
    }

    pub fn from_params(a: MeasurementParams, b: MeasurementParams) -> Self {
        Self {
            axis_a: a.axis(),
            axis_b: b.axis(),
            params_a: Some(a),
            params_b: Some(b),
        }
    }

    pub fn computational() -> Self {
        Self::from_axes([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).expect("unit axes")
    }

    pub fn axis(&self, side: Subsystem) -> Axis {
        match side {
            Subsystem::A => self.axis_a,
            Subsystem::B => self.axis_b,
        }
    }

    pub fn projectors(&self, side: Subsystem) -> [Mat2; 2] {
        axis_projectors(self.axis(side))
    }

    /// The four product projectors `Omega_A,k (x) Omega_B,l`, indexed `2k + l`.
    pub fn product_projectors(&self) -> [Mat4; 4] {
        let pa = self.projectors(Subsystem::A);
        let pb = self.projectors(Subsystem::B);
        std::array::from_fn(|i| tensor(&pa[i / 2], &pb[i % 2]))
    }
}

/// `[(I + n.sigma)/2, (I - n.sigma)/2]`.
pub fn axis_projectors(n: Axis) -> [Mat2; 2] {
    let s = crate::linalg::pauli_dot(n).scale(0.5);
    let half = Mat2::identity().scale(0.5);
    [half + s, half - s]
}

/// `Delta_kl / 4 = [1 + s_k a.nA + s_l b.nB + s_k s_l nA^T T nB] / 4`, `s_0 = +1`.
pub fn outcome_probabilities(pe: &PauliExpansion, na: &Axis, nb: &Axis) -> [[f64; 2]; 2] {
    let an = dot(&pe.a, na);
    let bn = dot(&pe.b, nb);
    let tn = pe.t_bilinear(na, nb);
    let mut p = [[0.0; 2]; 2];
    for (k, sk) in [1.0, -1.0].into_iter().enumerate() {
        for (l, sl) in [1.0, -1.0].into_iter().enumerate() {
            p[k][l] = 0.25 * (1.0 + sk * an + sl * bn + sk * sl * tn);
        }
    }
    p
}

/// Classical mutual information (bits) of a 2x2 joint distribution.
pub fn table_mutual_information(p: &[[f64; 2]; 2]) -> f64 {
    let pa = [p[0][0] + p[0][1], p[1][0] + p[1][1]];
    let pb = [p[0][0] + p[1][0], p[0][1] + p[1][1]];
    let flat = [p[0][0], p[0][1], p[1][0], p[1][1]];
    crate::linalg::shannon_entropy(&pa) + crate::linalg::shannon_entropy(&pb)
        - crate::linalg::shannon_entropy(&flat)
}

/// `sum_kl (Omega_k (x) Omega_l) rho (Omega_k (x) Omega_l)`.
pub fn post_measurement_state(rho: &DensityMatrix, m: &LocalMeasurement) -> DensityMatrix {
    let mut out = Mat4::zeros();
    for p in m.product_projectors() {
        out = out + p * *rho.matrix() * p;
    }
    DensityMatrix::new(out, Provenance::new("measured"))
        .expect("a projective measurement channel preserves validity")
}

/// `sum_i p_i S(rho_A|i)` after measuring B along `axis_b`, from the Pauli
/// expansion: outcome `+-` has weight `(1 +- b.n)/2` and leaves A with Bloch
/// vector `(a +- T n) / (1 +- b.n)`.
pub fn conditional_entropy(pe: &PauliExpansion, axis_b: &Axis) -> f64 {
    let bn = dot(&pe.b, axis_b);
    let tn = pe.t_mul(axis_b);
    let mut h = 0.0;
    for s in [1.0, -1.0] {
        let p = 0.5 * (1.0 + s * bn);
        if p < OUTCOME_CUTOFF {
            continue;
        }
        let r: Axis = std::array::from_fn(|i| pe.a[i] + s * tn[i]);
        h += p * crate::linalg::qubit_entropy(norm(&r) / (2.0 * p));
    }
    h
}

/// Conditional entropy of A given a projective measurement on B along `axis_b`.
pub fn conditional_entropy_after_b_measurement(rho: &DensityMatrix, axis_b: Axis) -> Result<f64> {
    let n = normalize(axis_b)?;
    Ok(conditional_entropy(&rho.pauli_expansion(), &n))
}
