//! Correlation functionals: mutual information, one-way discord, MID,
//! classical mutual information and AMID.
//!
//! Discord and the classical mutual information are optimised numerically
//! for every state: a coarse grid over measurement axes, then Nelder-Mead in
//! a local chart of the sphere around the best cells. Everything runs on the
//! Pauli expansion `(a, b, T)`, so one objective evaluation is a handful of
//! flops and a few logarithms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{qubit_entropy, Subsystem};
use crate::measurement::{
    conditional_entropy, dot, mat_t_vec, mat_vec, norm, normalize, outcome_probabilities,
    table_mutual_information, Axis, LocalMeasurement,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::states::{bloch_normal_form, BlochForm, DensityMatrix, PauliExpansion};

/// Optimised values below `-CONSISTENCY_SLACK` indicate a bug, not slack.
pub const CONSISTENCY_SLACK: f64 = 1e-7;

/// Slack allowed on `A <= M`, which holds by construction of the search.
pub const MID_SLACK: f64 = 1e-9;

/// A marginal Bloch vector shorter than this has no preferred eigenbasis.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Bloch-vector tolerance for recognising an X state in its normal frame.
pub const X_PATTERN_TOL: f64 = 1e-9;

const DISCORD_POLAR: usize = 32;
const DISCORD_AZIMUTH: usize = 64;
const DISCORD_RESTARTS: usize = 3;

const IC_RINGS: usize = 8;
const IC_AZIMUTH: usize = 16;
const IC_RESTARTS: usize = 8;

fn local_options(step: f64) -> NelderMeadOptions {
    NelderMeadOptions {
        step,
        x_tol: 1e-7,
        f_tol: 1e-13,
        max_iter: 1000,
    }
}

fn marginal_entropy(pe: &PauliExpansion, side: Subsystem) -> f64 {
    match side {
        Subsystem::A => qubit_entropy(norm(&pe.a)),
        Subsystem::B => qubit_entropy(norm(&pe.b)),
    }
}

/// `I = S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho: &DensityMatrix) -> f64 {
    let pe = rho.pauli_expansion();
    mutual_information_from(rho, &pe)
}

fn mutual_information_from(rho: &DensityMatrix, pe: &PauliExpansion) -> f64 {
    let i = marginal_entropy(pe, Subsystem::A) + marginal_entropy(pe, Subsystem::B) - rho.entropy();
    i.max(0.0)
}

fn check_and_clamp(name: &str, raw: f64, upper: f64) -> Result<f64> {
    if !raw.is_finite() || raw < -CONSISTENCY_SLACK {
        return Err(Error::Consistency(format!("{name} evaluated to {raw:e}")));
    }
    Ok(raw.clamp(0.0, upper.max(0.0)))
}

/// Orthonormal pair spanning the plane perpendicular to the unit vector `n`.
fn tangent_basis(n: &Axis) -> (Axis, Axis) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&helper, n);
    let e1 = normalize(std::array::from_fn(|i| helper[i] - d * n[i])).expect("independent helper");
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    (e1, e2)
}

/// Local chart of the sphere centred on `n0`.
struct Chart {
    n0: Axis,
    e1: Axis,
    e2: Axis,
}

impl Chart {
    fn new(n0: Axis) -> Self {
        let (e1, e2) = tangent_basis(&n0);
        Self { n0, e1, e2 }
    }

    fn point(&self, u: f64, v: f64) -> Axis {
        let p: Axis = std::array::from_fn(|i| self.n0[i] + u * self.e1[i] + v * self.e2[i]);
        normalize(p).unwrap_or(self.n0)
    }
}

fn spherical(theta: f64, phi: f64) -> Axis {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Hemisphere grid: polar angles `0..=pi/2` in `polar` steps, `azimuth`
/// points per ring, a single point at the pole.
fn hemisphere_grid(polar: usize, azimuth: usize) -> Vec<Axis> {
    let mut axes = vec![[0.0, 0.0, 1.0]];
    for i in 1..polar {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (polar - 1) as f64;
        for j in 0..azimuth {
            axes.push(spherical(theta, std::f64::consts::TAU * j as f64 / azimuth as f64));
        }
    }
    axes
}

/// Indices of the `k` smallest values.
fn smallest(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let k = k.min(idx.len());
    if k == 0 {
        return Vec::new();
    }
    idx.select_nth_unstable_by(k - 1, |&i, &j| values[i].total_cmp(&values[j]));
    idx.truncate(k);
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    idx
}

/// Minimum of an objective on the sphere of axes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisOptimum {
    pub axis: Axis,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimise `H(A|B)` over the axis measured on B.
fn minimize_conditional_entropy(pe: &PauliExpansion, seeds: &[Axis]) -> AxisOptimum {
    let grid = hemisphere_grid(DISCORD_POLAR, DISCORD_AZIMUTH);
    let values: Vec<f64> = grid.iter().map(|n| conditional_entropy(pe, n)).collect();
    let mut starts: Vec<Axis> = smallest(&values, DISCORD_RESTARTS).into_iter().map(|i| grid[i]).collect();
    starts.extend(seeds.iter().filter_map(|s| normalize(*s).ok()));

    let step = std::f64::consts::FRAC_PI_2 / (DISCORD_POLAR - 1) as f64;
    let mut best = AxisOptimum {
        axis: starts[0],
        value: conditional_entropy(pe, &starts[0]),
        iterations: 0,
        converged: false,
    };
    let mut iterations = 0;
    for start in starts {
        let chart = Chart::new(start);
        let r = nelder_mead(
            |x| conditional_entropy(pe, &chart.point(x[0], x[1])),
            &[0.0, 0.0],
            local_options(step),
        );
        iterations += r.iterations;
        if r.value < best.value || (r.value == best.value && !best.converged) {
            best = AxisOptimum {
                axis: chart.point(r.x[0], r.x[1]),
                value: r.value,
                iterations: 0,
                converged: r.converged,
            };
        }
    }
    best.iterations = iterations;
    best
}

/// One-way discord with the measurement on `measured`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscordResult {
    pub value: f64,
    /// Unclamped `I - S(unmeasured) + min H`.
    pub raw: f64,
    /// `J = S(unmeasured) - min H`.
    pub classical_correlation: f64,
    pub optimum: AxisOptimum,
}

/// Discord with the projective measurement on `measured`; extra seed axes
/// (in the original frame) join the grid restarts.
pub fn discord_with_seeds(rho: &DensityMatrix, measured: Subsystem, seeds: &[Axis]) -> Result<DiscordResult> {
    let pe = match measured {
        Subsystem::B => rho.pauli_expansion(),
        Subsystem::A => rho.pauli_expansion().swapped(),
    };
    let i = mutual_information_from(rho, &pe);
    let opt = minimize_conditional_entropy(&pe, seeds);
    let s_unmeasured = qubit_entropy(norm(&pe.a));
    let raw = i - s_unmeasured + opt.value;
    let value = check_and_clamp("discord", raw, i)?;
    Ok(DiscordResult {
        value,
        raw,
        classical_correlation: i - value,
        optimum: opt,
    })
}

/// `D<-`: discord with the measurement on B.
pub fn discord_left(rho: &DensityMatrix) -> Result<f64> {
    Ok(discord_with_seeds(rho, Subsystem::B, &[])?.value)
}

/// `D->`: discord with the measurement on A.
pub fn discord_right(rho: &DensityMatrix) -> Result<f64> {
    Ok(discord_with_seeds(rho, Subsystem::A, &[])?.value)
}

/// `D<-> = max(D<-, D->)`.
pub fn discord_two_way(rho: &DensityMatrix) -> Result<f64> {
    Ok(discord_left(rho)?.max(discord_right(rho)?))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MidResult {
    pub value: f64,
    /// Set when a marginal is maximally mixed and the computational basis
    /// stood in for its eigenbasis.
    pub degenerate: bool,
    #[serde(skip)]
    pub measurement: LocalMeasurement,
}

fn eigen_axis(r: &Axis) -> (Axis, bool) {
    if norm(r) <= DEGENERACY_TOL {
        ([0.0, 0.0, 1.0], true)
    } else {
        (normalize(*r).expect("nonzero"), false)
    }
}

/// MID with its measurement and degeneracy flag.
pub fn mid_detailed(rho: &DensityMatrix) -> Result<MidResult> {
    let pe = rho.pauli_expansion();
    let i = mutual_information_from(rho, &pe);
    let (na, da) = eigen_axis(&pe.a);
    let (nb, db) = eigen_axis(&pe.b);
    let measured = table_mutual_information(&outcome_probabilities(&pe, &na, &nb));
    let value = check_and_clamp("MID", i - measured, i)?;
    Ok(MidResult {
        value,
        degenerate: da || db,
        measurement: LocalMeasurement::from_axes(na, nb)?,
    })
}

/// `M = I - I(rho measured in the marginal eigenbases)`.
pub fn mid(rho: &DensityMatrix) -> Result<f64> {
    Ok(mid_detailed(rho)?.value)
}

fn pair_mi(pe: &PauliExpansion, na: &Axis, nb: &Axis) -> f64 {
    table_mutual_information(&outcome_probabilities(pe, na, nb))
}

/// Supremum of the classical mutual information over bi-local measurements.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClassicalOptimum {
    pub value: f64,
    /// Optimal measurement in the original frame.
    #[serde(skip)]
    pub measurement: LocalMeasurement,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// Maximise the outcome mutual information in the normal frame.
fn maximize_classical_mi(form: &BlochForm, seeds: &[(Axis, Axis)]) -> ClassicalOptimum {
    let pe = form.expansion();
    let grid = hemisphere_grid(IC_RINGS + 1, IC_AZIMUTH);
    let an: Vec<f64> = grid.iter().map(|n| dot(&pe.a, n)).collect();
    let bn: Vec<f64> = grid.iter().map(|n| dot(&pe.b, n)).collect();
    let tn: Vec<Axis> = grid.iter().map(|n| pe.t_mul(n)).collect();
    let mut values = Vec::with_capacity(grid.len() * grid.len());
    for (i, na) in grid.iter().enumerate() {
        for j in 0..grid.len() {
            let c = dot(na, &tn[j]);
            let p = [
                [
                    0.25 * (1.0 + an[i] + bn[j] + c),
                    0.25 * (1.0 + an[i] - bn[j] - c),
                ],
                [
                    0.25 * (1.0 - an[i] + bn[j] - c),
                    0.25 * (1.0 - an[i] - bn[j] + c),
                ],
            ];
            values.push(-table_mutual_information(&p));
        }
    }
    let m = grid.len();
    let mut starts: Vec<(Axis, Axis)> = smallest(&values, IC_RESTARTS)
        .into_iter()
        .map(|k| (grid[k / m], grid[k % m]))
        .collect();
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        starts.push((e, e));
    }
    for (na, nb) in seeds {
        if let (Ok(na), Ok(nb)) = (normalize(*na), normalize(*nb)) {
            starts.push((mat_vec(&form.rot_a, &na), mat_vec(&form.rot_b, &nb)));
        }
    }

    let step = std::f64::consts::FRAC_PI_2 / IC_RINGS as f64;
    let mut best: Option<(f64, Axis, Axis, bool)> = None;
    let mut iterations = 0;
    for (sa, sb) in &starts {
        let ca = Chart::new(*sa);
        let cb = Chart::new(*sb);
        let r = nelder_mead(
            |x| -pair_mi(&pe, &ca.point(x[0], x[1]), &cb.point(x[2], x[3])),
            &[0.0; 4],
            local_options(step / 2.0),
        );
        iterations += r.iterations;
        let value = -r.value;
        if best.is_none_or(|b| value > b.0) {
            best = Some((value, ca.point(r.x[0], r.x[1]), cb.point(r.x[2], r.x[3]), r.converged));
        }
    }
    let (value, na, nb, converged) = best.expect("at least the three axis candidates");
    let na = mat_t_vec(&form.rot_a, &na);
    let nb = mat_t_vec(&form.rot_b, &nb);
    ClassicalOptimum {
        value,
        measurement: LocalMeasurement::from_axes(na, nb).expect("unit axes"),
        iterations,
        restarts: starts.len(),
        converged,
    }
}

/// `I_c` and its optimal measurement; `seeds` are extra starting
/// measurements given in the original frame.
pub fn classical_mutual_information_with_seeds(
    rho: &DensityMatrix,
    seeds: &[(Axis, Axis)],
) -> ClassicalOptimum {
    maximize_classical_mi(&bloch_normal_form(rho), seeds)
}

/// `I_c = sup I(rho measured)` over bi-local projective measurements.
pub fn classical_mutual_information(rho: &DensityMatrix) -> (f64, LocalMeasurement) {
    let opt = classical_mutual_information_with_seeds(rho, &[]);
    (opt.value, opt.measurement)
}

/// AMID with its supporting optimum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmidResult {
    pub value: f64,
    pub raw: f64,
    pub classical: ClassicalOptimum,
    /// Two-candidate value, for states that are X-shaped in their normal frame.
    pub x_candidates: Option<f64>,
}

/// AMID seeded with the MID measurement, so that `A <= M` holds exactly.
pub fn amid_detailed(rho: &DensityMatrix, mid: &MidResult) -> Result<AmidResult> {
    let form = bloch_normal_form(rho);
    let i = mutual_information(rho);
    let seed = (mid.measurement.axis_a, mid.measurement.axis_b);
    let classical = maximize_classical_mi(&form, &[seed]);
    let raw = i - classical.value;
    let value = check_and_clamp("AMID", raw, i)?;
    let x_candidates = match x_frame(&form) {
        Some(frame) => Some(candidates_from_frame(&form, frame, i)),
        None => None,
    };
    Ok(AmidResult {
        value,
        raw,
        classical,
        x_candidates,
    })
}

/// `A = I - I_c`.
pub fn amid(rho: &DensityMatrix) -> Result<f64> {
    let mid = mid_detailed(rho)?;
    Ok(amid_detailed(rho, &mid)?.value)
}

/// `(z, x)`: the axis carrying both Bloch vectors, and the remaining axis
/// with the larger correlation magnitude.
fn x_frame(form: &BlochForm) -> Option<(usize, usize)> {
    let z = form.x_axis(X_PATTERN_TOL)?;
    let others: Vec<usize> = (0..3).filter(|&k| k != z).collect();
    let x = if form.chi[others[1]].abs() > form.chi[others[0]].abs() {
        others[1]
    } else {
        others[0]
    };
    Some((z, x))
}

/// Permute the normal-frame coordinates so the X frame's axes become x and z.
fn reframe(form: &BlochForm, (z, x): (usize, usize)) -> PauliExpansion {
    let y = 3 - z - x;
    let pick = |v: &[f64; 3]| [v[x], v[y], v[z]];
    PauliExpansion::from_bloch(pick(&form.a), pick(&form.b), pick(&form.chi))
}

fn candidates_from_frame(form: &BlochForm, frame: (usize, usize), i: f64) -> f64 {
    let pe = reframe(form, frame);
    let z = mu(&pe, i, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
    let x = mu(&pe, i, [0.5, 0.0, 0.5], [0.5, 0.0, 0.5]);
    z.min(x).clamp(0.0, i.max(0.0))
}

/// `mu = I - I(rho' measured)` with each side's measurement given as
/// `(kappa, h, w)`; the measured axis is `(2w, 2h, 2 kappa - 1)`.
pub fn mu(pe: &PauliExpansion, mutual_information: f64, side_a: [f64; 3], side_b: [f64; 3]) -> f64 {
    let axis = |[kappa, h, w]: [f64; 3]| [2.0 * w, 2.0 * h, 2.0 * kappa - 1.0];
    mutual_information - pair_mi(pe, &axis(side_a), &axis(side_b))
}

/// AMID upper bound from the two candidate measurements (both qubits along
/// z, both along x, in the normal frame); exact for X states.
pub fn amid_x_candidates(rho: &DensityMatrix) -> Result<f64> {
    let form = bloch_normal_form(rho);
    let frame = x_frame(&form).ok_or(Error::NotXState)?;
    Ok(candidates_from_frame(&form, frame, mutual_information(rho)))
}

/// Optimiser diagnostics attached to a report.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub discord_left_axis: Axis,
    pub discord_right_axis: Axis,
    pub discord_iterations: usize,
    pub discord_converged: bool,
    pub classical_axis_a: Axis,
    pub classical_axis_b: Axis,
    pub classical_iterations: usize,
    pub classical_restarts: usize,
    pub classical_converged: bool,
    pub mid_degenerate: bool,
    /// `amid_x_candidates - A` for states X-shaped in their normal frame.
    pub x_candidate_gap: Option<f64>,
    pub eigenvalues_clamped: bool,
}

/// Every indicator for one state, in bits.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    #[serde(rename = "S")]
    pub entropy: f64,
    #[serde(rename = "I")]
    pub mutual_information: f64,
    #[serde(rename = "J_left")]
    pub j_left: f64,
    #[serde(rename = "J_right")]
    pub j_right: f64,
    #[serde(rename = "D_left")]
    pub discord_left: f64,
    #[serde(rename = "D_right")]
    pub discord_right: f64,
    #[serde(rename = "D_two_way")]
    pub discord_two_way: f64,
    #[serde(rename = "M")]
    pub mid: f64,
    #[serde(rename = "I_c")]
    pub classical_mutual_information: f64,
    #[serde(rename = "A")]
    pub amid: f64,
    pub diagnostics: Diagnostics,
}

impl CorrelationReport {
    /// Two-column text rendering, one quantity per line.
    pub fn table(&self) -> String {
        let d = &self.diagnostics;
        let rows = [
            ("S", self.entropy),
            ("I", self.mutual_information),
            ("J_left", self.j_left),
            ("J_right", self.j_right),
            ("D_left", self.discord_left),
            ("D_right", self.discord_right),
            ("D_two_way", self.discord_two_way),
            ("M", self.mid),
            ("I_c", self.classical_mutual_information),
            ("A", self.amid),
        ];
        let mut out: String = rows.iter().map(|(k, v)| format!("{k:<10} {v:.10}\n")).collect();
        out += &format!("{:<10} {}\n", "mid_degenerate", d.mid_degenerate);
        if let Some(gap) = d.x_candidate_gap {
            out += &format!("{:<10} {gap:.3e}\n", "x_gap");
        }
        out
    }

    /// `D<-> - 1e-7 <= A <= M + 1e-9` and `M <= I`.
    pub fn check_hierarchy(&self) -> Result<()> {
        let d = self.discord_two_way;
        if d > self.amid + CONSISTENCY_SLACK {
            return Err(Error::Consistency(format!("D<-> = {d} exceeds A = {}", self.amid)));
        }
        if self.amid > self.mid + MID_SLACK {
            return Err(Error::Consistency(format!("A = {} exceeds M = {}", self.amid, self.mid)));
        }
        if self.mid > self.mutual_information + MID_SLACK {
            return Err(Error::Consistency(format!(
                "M = {} exceeds I = {}",
                self.mid, self.mutual_information
            )));
        }
        Ok(())
    }
}

/// All measures for `rho`. The discord searches are seeded with the axes
/// of the `I_c` optimum, which bound them by `A` exactly.
pub fn full_report(rho: &DensityMatrix) -> Result<CorrelationReport> {
    let i = mutual_information(rho);
    let mid = mid_detailed(rho)?;
    let am = amid_detailed(rho, &mid)?;
    let m = am.classical.measurement;
    let left = discord_with_seeds(rho, Subsystem::B, &[m.axis_b])?;
    let right = discord_with_seeds(rho, Subsystem::A, &[m.axis_a])?;
    let report = CorrelationReport {
        entropy: rho.entropy(),
        mutual_information: i,
        j_left: left.classical_correlation,
        j_right: right.classical_correlation,
        discord_left: left.value,
        discord_right: right.value,
        discord_two_way: left.value.max(right.value),
        mid: mid.value,
        classical_mutual_information: am.classical.value,
        amid: am.value,
        diagnostics: Diagnostics {
            discord_left_axis: left.optimum.axis,
            discord_right_axis: right.optimum.axis,
            discord_iterations: left.optimum.iterations + right.optimum.iterations,
            discord_converged: left.optimum.converged && right.optimum.converged,
            classical_axis_a: m.axis_a,
            classical_axis_b: m.axis_b,
            classical_iterations: am.classical.iterations,
            classical_restarts: am.classical.restarts,
            classical_converged: am.classical.converged,
            mid_degenerate: mid.degenerate,
            x_candidate_gap: am.x_candidates.map(|c| c - am.value),
            eigenvalues_clamped: rho.was_clamped(),
        },
    };
    report.check_hierarchy()?;
    Ok(report)
}
