//! States of maximal discord or AMID at fixed von Neumann entropy, and the
//! related extremal curves (MID trapezium, AMID-versus-discord upper edge).
//!
//! The maximisation runs over five one- or two-parameter X-state branches,
//! in order of increasing entropy range:
//!
//! | branch | state              | free parameter        | constrained parameter |
//! |--------|--------------------|-----------------------|-----------------------|
//! | `R`    | `r_family(a, r)`   | `a` in `[0, 1/3]`     | `r` in `[0, 1 - a]`   |
//! | `W+`   | `werner(f)`        | none                  | `f` in `[0, 1]`       |
//! | `P0`   | `p_family(a, 0)`   | root choice           | `a` in `[0, 1]`       |
//! | `P`    | `p_family(a, b)`   | `a` in `[0, 1/3]`     | `b` in `[0, 1 - a]`   |
//! | `W-`   | `werner(f)`        | none                  | `f` in `[-1/3, 0]`    |
//!
//! For each branch the entropy constraint is solved by bisection on the
//! constrained parameter (entropy is monotone in it), and the objective is
//! maximised over the free parameter by a grid scan and golden-section
//! refinement. The boundary value is the best branch; ties within
//! [`TIE_TOL`] go to the branch listed first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{qubit_entropy, shannon_entropy, C64};
use crate::measurement::{conditional_entropy, norm, table_mutual_information, outcome_probabilities, Axis};
use crate::measures;
use crate::optimize::{bisect, golden_section_max, illinois, nelder_mead, NelderMeadOptions};
use crate::states::{self, DensityMatrix, PauliExpansion};

/// Branch values closer than this count as a tie.
pub const TIE_TOL: f64 = 1e-9;

/// Bisection tolerance on constrained parameters.
const PARAM_BISECT_TOL: f64 = 1e-13;

/// Golden-section tolerance on the free parameter.
const FREE_TOL: f64 = 1e-9;

/// Scan resolution of the free parameter.
const FREE_GRID: usize = 40;

/// Entropy scan step when locating crossings.
const CROSSING_SCAN_STEP: f64 = 0.01;

/// Entropy tolerance of located crossings.
pub const CROSSING_TOL: f64 = 1e-7;

/// Which correlation quantity a boundary maximises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Discord,
    Amid,
    Mid,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Discord => "discord",
            Measure::Amid => "amid",
            Measure::Mid => "mid",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "discord" | "d" => Ok(Measure::Discord),
            "amid" | "a" => Ok(Measure::Amid),
            "mid" | "m" => Ok(Measure::Mid),
            other => Err(Error::Parse(format!("unknown measure `{other}`"))),
        }
    }
}

/// Family of the state realising a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    R,
    W,
    #[serde(rename = "P(b=0)")]
    P0,
    P,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "delta")]
    Delta,
    X,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::R => "R",
            Family::W => "W",
            Family::P0 => "P(b=0)",
            Family::P => "P",
            Family::Beta => "beta",
            Family::Delta => "delta",
            Family::X => "X",
        })
    }
}

/// One sample of an extremal curve.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPoint {
    pub entropy: f64,
    pub value: f64,
    pub measure: Measure,
    pub family: Family,
    pub params: BTreeMap<String, f64>,
}

impl BoundaryPoint {
    /// Rebuild the state from the family tag and parameters.
    pub fn state(&self) -> Result<DensityMatrix> {
        let p = |k: &str| {
            self.params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("boundary point lacks parameter `{k}`")))
        };
        match self.family {
            Family::R => states::r_family(p("a")?, p("r")?),
            Family::W => states::werner(p("f")?),
            Family::P0 => states::p_family(p("a")?, 0.0),
            Family::P => states::p_family(p("a")?, p("b")?),
            Family::Beta => states::beta_family(p("beta")?),
            Family::Delta => states::delta_family(p("delta")?),
            Family::X => states::x_state(
                [p("rho11")?, p("rho22")?, p("rho33")?, p("rho44")?],
                C64::new(p("rho14")?, 0.0),
                C64::new(p("rho23")?, 0.0),
            ),
        }
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

// Closed-form spectra of the branch families.

fn entropy_r(a: f64, r: f64) -> f64 {
    shannon_entropy(&[(1.0 - a + r) / 2.0, (1.0 - a - r) / 2.0, a])
}

fn entropy_w(f: f64) -> f64 {
    let q = (1.0 - f) / 4.0;
    shannon_entropy(&[(1.0 + 3.0 * f) / 4.0, q, q, q])
}

fn entropy_p(a: f64, b: f64) -> f64 {
    shannon_entropy(&[a, (1.0 - a - b) / 2.0, (1.0 - a + b) / 2.0])
}

/// Fast evaluations for states whose Bloch vectors lie on z and whose
/// correlation matrix is diagonal (every branch family is of this form).
#[derive(Debug, Clone, Copy)]
pub(crate) struct XEval {
    pe: PauliExpansion,
    entropy: f64,
}

impl XEval {
    pub(crate) fn new(rho: &DensityMatrix) -> Self {
        Self {
            pe: rho.pauli_expansion(),
            entropy: rho.entropy(),
        }
    }

    /// Real X state from its diagonal and corners, without building the matrix.
    fn from_real_x(d: [f64; 4], r14: f64, r23: f64) -> Self {
        let a = [0.0, 0.0, d[0] + d[1] - d[2] - d[3]];
        let b = [0.0, 0.0, d[0] - d[1] + d[2] - d[3]];
        let chi = [2.0 * (r14 + r23), 2.0 * (r23 - r14), d[0] - d[1] - d[2] + d[3]];
        let block = |p: f64, q: f64, c: f64| {
            let m = 0.5 * (p + q);
            let r = (0.25 * (p - q) * (p - q) + c * c).sqrt();
            [m + r, (m - r).max(0.0)]
        };
        let [e0, e1] = block(d[0], d[3], r14);
        let [e2, e3] = block(d[1], d[2], r23);
        Self {
            pe: PauliExpansion::from_bloch(a, b, chi),
            entropy: shannon_entropy(&[e0, e1, e2, e3]),
        }
    }

    fn mutual_information(&self) -> f64 {
        (qubit_entropy(norm(&self.pe.a)) + qubit_entropy(norm(&self.pe.b)) - self.entropy).max(0.0)
    }

    /// Transverse axis with the larger correlation magnitude.
    fn transverse(pe: &PauliExpansion) -> Axis {
        if pe.t[1][1].abs() > pe.t[0][0].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [1.0, 0.0, 0.0]
        }
    }

    /// Minimum of `H(A|B)`. With `a, b` on z and `T` diagonal, the optimal
    /// axis lies in the plane spanned by z and the stronger transverse
    /// correlation, leaving a 1-D search over the polar angle.
    fn min_conditional_entropy(pe: &PauliExpansion) -> f64 {
        Self::min_conditional_entropy_with(pe, 64, 1e-10)
    }

    fn min_conditional_entropy_with(pe: &PauliExpansion, n: usize, tol: f64) -> f64 {
        let t = Self::transverse(pe);
        let h = |theta: f64| {
            let (s, c) = theta.sin_cos();
            conditional_entropy(pe, &[s * t[0], s * t[1], c])
        };
        let step = std::f64::consts::FRAC_PI_2 / n as f64;
        let (mut best_i, mut best) = (0, f64::INFINITY);
        for i in 0..=n {
            let v = h(i as f64 * step);
            if v < best {
                best = v;
                best_i = i;
            }
        }
        let lo = (best_i as f64 - 1.0).max(0.0) * step;
        let hi = ((best_i + 1).min(n)) as f64 * step;
        let (_, neg) = golden_section_max(|x| -h(x), lo, hi, tol);
        best.min(-neg)
    }

    /// `D<-` (measurement on B).
    pub(crate) fn discord_left(&self) -> f64 {
        let d = self.mutual_information() - qubit_entropy(norm(&self.pe.a))
            + Self::min_conditional_entropy(&self.pe);
        d.max(0.0)
    }

    /// `D->` (measurement on A).
    #[cfg(test)]
    pub(crate) fn discord_right(&self) -> f64 {
        let pe = self.pe.swapped();
        let d = self.mutual_information() - qubit_entropy(norm(&pe.a)) + Self::min_conditional_entropy(&pe);
        d.max(0.0)
    }

    /// Two-way discord at search precision.
    fn discord_two_way_coarse(&self) -> f64 {
        let i = self.mutual_information();
        let left = i - qubit_entropy(norm(&self.pe.a)) + Self::min_conditional_entropy_with(&self.pe, 24, 1e-8);
        let sw = self.pe.swapped();
        let right = i - qubit_entropy(norm(&sw.a)) + Self::min_conditional_entropy_with(&sw, 24, 1e-8);
        left.max(right).max(0.0)
    }

    /// AMID from the z (x) z and transverse (x) transverse candidates.
    pub(crate) fn amid(&self) -> f64 {
        let z = [0.0, 0.0, 1.0];
        let t = Self::transverse(&self.pe);
        let mi = |n: &Axis| table_mutual_information(&outcome_probabilities(&self.pe, n, n));
        (self.mutual_information() - mi(&z).max(mi(&t))).max(0.0)
    }

    fn value(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Discord => self.discord_left(),
            Measure::Amid => self.amid(),
            Measure::Mid => unreachable!("MID boundary has a closed form"),
        }
    }
}

/// The five candidate branches, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    R,
    WPlus,
    P0,
    P,
    WMinus,
}

impl Branch {
    pub const ALL: [Branch; 5] = [Branch::R, Branch::WPlus, Branch::P0, Branch::P, Branch::WMinus];

    pub fn family(self) -> Family {
        match self {
            Branch::R => Family::R,
            Branch::WPlus | Branch::WMinus => Family::W,
            Branch::P0 => Family::P0,
            Branch::P => Family::P,
        }
    }
}

/// Best state of one branch at fixed entropy.
#[derive(Debug, Clone)]
pub struct BranchOptimum {
    pub branch: Branch,
    pub value: f64,
    pub params: BTreeMap<String, f64>,
}

impl BranchOptimum {
    fn state(&self) -> DensityMatrix {
        let p = |k: &str| self.params[k];
        match self.branch {
            Branch::R => states::r_family(p("a"), p("r")),
            Branch::WPlus | Branch::WMinus => states::werner(p("f")),
            Branch::P0 => states::p_family(p("a"), 0.0),
            Branch::P => states::p_family(p("a"), p("b")),
        }
        .expect("branch parameters stay inside the PSD region")
    }
}

/// Solve `entropy(v) = target` for `v` in `[lo, hi]`, entropy monotone.
fn solve_entropy(entropy: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> Option<f64> {
    let (e_lo, e_hi) = (entropy(lo), entropy(hi));
    let (min, max) = (e_lo.min(e_hi), e_lo.max(e_hi));
    if target < min - 1e-12 || target > max + 1e-12 {
        return None;
    }
    if (target - e_lo).abs() <= 1e-15 {
        return Some(lo);
    }
    if (target - e_hi).abs() <= 1e-15 {
        return Some(hi);
    }
    bisect(|v| entropy(v) - target, lo, hi, PARAM_BISECT_TOL)
}

/// Maximise over a free parameter `u` in `[lo, hi]`; `eval(u)` returns the
/// objective and constrained parameter, or `None` when infeasible.
fn maximize_free(
    lo: f64,
    hi: f64,
    eval: impl Fn(f64) -> Option<(f64, f64)>,
) -> Option<(f64, f64, f64)> {
    let score = |u: f64| eval(u).map_or(-1.0, |(v, _)| v);
    let us: Vec<f64> = (0..=FREE_GRID).map(|i| lo + (hi - lo) * i as f64 / FREE_GRID as f64).collect();
    let scores: Vec<f64> = us.iter().map(|&u| score(u)).collect();
    let (best_i, &best) = scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))?;
    if best < 0.0 {
        return None;
    }
    let a = us[best_i.saturating_sub(1)];
    let b = us[(best_i + 1).min(FREE_GRID)];
    let (u, _) = golden_section_max(score, a, b, FREE_TOL);
    let (u, (value, v)) = match eval(u) {
        Some(r) if r.0 >= best => (u, r),
        _ => (us[best_i], eval(us[best_i]).expect("feasible grid point")),
    };
    Some((u, v, value))
}

/// Best state of `branch` with entropy `target`, maximising `measure`.
pub fn branch_optimum(branch: Branch, measure: Measure, target: f64) -> Option<BranchOptimum> {
    let objective = |rho: DensityMatrix| XEval::new(&rho).value(measure);
    match branch {
        Branch::R => {
            let eval = |a: f64| {
                let r = solve_entropy(|r| entropy_r(a, r), target, 0.0, 1.0 - a)?;
                Some((objective(states::r_family(a, r).ok()?), r))
            };
            let (a, r, value) = maximize_free(0.0, 1.0 / 3.0, eval)?;
            Some(BranchOptimum {
                branch,
                value,
                params: params(&[("a", a), ("r", r)]),
            })
        }
        Branch::WPlus | Branch::WMinus => {
            let (lo, hi) = if branch == Branch::WPlus { (0.0, 1.0) } else { (-1.0 / 3.0, 0.0) };
            let f = solve_entropy(entropy_w, target, lo, hi)?;
            Some(BranchOptimum {
                branch,
                value: objective(states::werner(f).ok()?),
                params: params(&[("f", f)]),
            })
        }
        Branch::P0 => {
            // S(a, 0) rises on [0, 1/3] and falls on [1/3, 1]: two roots.
            let third = 1.0 / 3.0;
            [(0.0, third), (third, 1.0)]
                .into_iter()
                .filter_map(|(lo, hi)| {
                    let a = solve_entropy(|a| entropy_p(a, 0.0), target, lo, hi)?;
                    Some(BranchOptimum {
                        branch,
                        value: objective(states::p_family(a, 0.0).ok()?),
                        params: params(&[("a", a)]),
                    })
                })
                .fold(None, |best: Option<BranchOptimum>, cand| match best {
                    Some(b) if b.value >= cand.value - TIE_TOL => Some(b),
                    _ => Some(cand),
                })
        }
        Branch::P => {
            let eval = |a: f64| {
                let b = solve_entropy(|b| entropy_p(a, b), target, 0.0, 1.0 - a)?;
                Some((objective(states::p_family(a, b).ok()?), b))
            };
            let (a, b, value) = maximize_free(0.0, 1.0 / 3.0, eval)?;
            Some(BranchOptimum {
                branch,
                value,
                params: params(&[("a", a), ("b", b)]),
            })
        }
    }
}

fn check_entropy(target: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&target) || !target.is_finite() {
        return Err(Error::ConstraintInfeasible(target));
    }
    Ok(())
}

/// Best branch at `target`, with deterministic tie-break toward the branch
/// with the lower entropy range.
pub fn best_branch(measure: Measure, target: f64) -> Result<BranchOptimum> {
    check_entropy(target)?;
    let all: Vec<BranchOptimum> = Branch::ALL
        .iter()
        .filter_map(|&b| branch_optimum(b, measure, target))
        .collect();
    let max = all.iter().map(|b| b.value).fold(f64::NEG_INFINITY, f64::max);
    all.into_iter()
        .find(|b| b.value >= max - TIE_TOL)
        .ok_or(Error::ConstraintInfeasible(target))
}

/// Maximum of `measure` over states with entropy `target`. Discord and AMID
/// are searched over the X branches and re-evaluated on the winning state
/// with the general optimisers; MID uses [`mid_boundary`].
pub fn max_measure_at_entropy(measure: Measure, target: f64) -> Result<BoundaryPoint> {
    if measure == Measure::Mid {
        return mid_boundary(target);
    }
    let best = best_branch(measure, target)?;
    let rho = best.state();
    let value = match measure {
        Measure::Discord => measures::discord_left(&rho)?,
        Measure::Amid => measures::amid(&rho)?,
        Measure::Mid => unreachable!(),
    };
    Ok(BoundaryPoint {
        entropy: rho.entropy(),
        value,
        measure,
        family: best.branch.family(),
        params: best.params,
    })
}

/// Entropies at which the maximising branch changes, located by bisection
/// on the winning-branch label after a uniform scan.
pub fn family_crossings_for(measure: Measure) -> Result<Vec<f64>> {
    let n = (2.0 / CROSSING_SCAN_STEP).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
    // Family labels: W+ and W- coincide at S = 2 and must not count as a crossing.
    let labels: Vec<Family> = grid
        .par_iter()
        .map(|&s| best_branch(measure, s).map(|b| b.branch.family()))
        .collect::<Result<_>>()?;
    let mut crossings = Vec::new();
    for i in 1..grid.len() {
        if labels[i] == labels[i - 1] {
            continue;
        }
        let (mut lo, mut hi) = (grid[i - 1], grid[i]);
        let left = labels[i - 1];
        while hi - lo > CROSSING_TOL {
            let mid = 0.5 * (lo + hi);
            if best_branch(measure, mid)?.branch.family() == left {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossings.push(0.5 * (lo + hi));
    }
    Ok(crossings)
}

/// The discord boundary's family crossings.
pub fn family_crossings() -> Result<Vec<f64>> {
    family_crossings_for(Measure::Discord)
}

/// Free-parameter value of the branch optimum at `target`.
fn free_param(branch: Branch, target: f64, key: &str) -> Option<(f64, BranchOptimum)> {
    let opt = branch_optimum(branch, Measure::Discord, target)?;
    Some((opt.params[key], opt))
}

/// Invert a monotone map `target -> free parameter` by bisection on the entropy.
fn invert_along_branch(
    branch: Branch,
    key: &str,
    want: f64,
    s_lo: f64,
    s_hi: f64,
) -> Result<BranchOptimum> {
    let f = |s: f64| free_param(branch, s, key).map_or(f64::NAN, |(v, _)| v - want);
    let (f_lo, f_hi) = (f(s_lo), f(s_hi));
    let s = if f_lo.abs() <= 1e-12 {
        s_lo
    } else if f_hi.abs() <= 1e-12 {
        s_hi
    } else {
        bisect(f, s_lo, s_hi, 1e-12).ok_or(Error::OutOfRange {
            name: "parameter",
            value: want,
            range: "outside the branch's optimal curve",
        })?
    };
    branch_optimum(branch, Measure::Discord, s).ok_or(Error::ConstraintInfeasible(s))
}

/// `r*(a)`: the `r` of the maximal-discord R state whose other parameter is `a`.
pub fn r_star(a: f64) -> Result<f64> {
    if !(0.0..=1.0 / 3.0 + 1e-12).contains(&a) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            range: "[0, 1/3]",
        });
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    // a_opt(S) increases from 0 and reaches 1/3 below S = log2(3).
    let s_hi = first_entropy_reaching(Branch::R, "a", a)?;
    Ok(invert_along_branch(Branch::R, "a", a, 0.0, s_hi)?.params["r"])
}

/// `a*(b)`: the `a` of the maximal-discord P state whose other parameter is `b`.
pub fn a_star(b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::OutOfRange {
            name: "b",
            value: b,
            range: "[0, 1]",
        });
    }
    let top = 3f64.log2();
    if b == 0.0 {
        return Ok(branch_optimum(Branch::P, Measure::Discord, top).expect("a = 1/3 is feasible").params["a"]);
    }
    // b_opt(S) falls to 0 at S = log2(3); scan down for a bracket.
    let step = 0.005;
    let mut s_hi = top;
    loop {
        let s_lo = (s_hi - step).max(0.0);
        if let Some((bv, _)) = free_param(Branch::P, s_lo, "b") {
            if bv >= b {
                return Ok(invert_along_branch(Branch::P, "b", b, s_lo, s_hi)?.params["a"]);
            }
        }
        if s_lo <= 0.0 {
            return Err(Error::OutOfRange {
                name: "b",
                value: b,
                range: "beyond the P branch's optimal curve",
            });
        }
        s_hi = s_lo;
    }
}

/// Smallest scanned entropy at which the branch optimum's `key` reaches `want`.
fn first_entropy_reaching(branch: Branch, key: &str, want: f64) -> Result<f64> {
    let top = 3f64.log2();
    let n = 200;
    for i in 1..=n {
        let s = top * i as f64 / n as f64;
        if let Some((v, _)) = free_param(branch, s, key) {
            if v >= want - 1e-12 {
                return Ok(s);
            }
        }
    }
    Err(Error::OutOfRange {
        name: "parameter",
        value: want,
        range: "never reached on the branch",
    })
}

/// Upper MID boundary: `M = 1` on the beta family for `S <= 1`, and
/// `M = 2 - S` on the delta family above.
pub fn mid_boundary(target: f64) -> Result<BoundaryPoint> {
    check_entropy(target)?;
    let (family, rho, key, param) = if target <= 1.0 {
        // S(beta) = h(beta); take the root in [0, 1/2].
        let beta = solve_entropy(|b| shannon_entropy(&[b, 1.0 - b]), target, 0.0, 0.5)
            .ok_or(Error::ConstraintInfeasible(target))?;
        (Family::Beta, states::beta_family(beta)?, "beta", beta)
    } else {
        // S(delta) = 1 + h((1 + delta)/2), decreasing in delta.
        let entropy = |d: f64| 1.0 + shannon_entropy(&[(1.0 + d) / 2.0, (1.0 - d) / 2.0]);
        let delta = solve_entropy(entropy, target, 0.0, 1.0).ok_or(Error::ConstraintInfeasible(target))?;
        (Family::Delta, states::delta_family(delta)?, "delta", delta)
    };
    Ok(BoundaryPoint {
        entropy: rho.entropy(),
        value: measures::mid(&rho)?,
        measure: Measure::Mid,
        family,
        params: params(&[(key, param)]),
    })
}

/// Boundary samples on `grid` uniformly spaced entropies in `[0, 2]`, plus
/// the crossing entropies as exact sample points.
pub fn boundary_curve(measure: Measure, grid: usize) -> Result<Vec<BoundaryPoint>> {
    if grid < 2 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: grid as f64,
            range: ">= 2",
        });
    }
    let mut entropies: Vec<f64> = (0..grid).map(|i| 2.0 * i as f64 / (grid - 1) as f64).collect();
    match measure {
        Measure::Mid => entropies.push(1.0),
        _ => entropies.extend(family_crossings_for(measure)?),
    }
    entropies.sort_by(f64::total_cmp);
    entropies.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    entropies
        .par_iter()
        .map(|&s| max_measure_at_entropy(measure, s))
        .collect()
}

/// Boundary values on a fine entropy grid, for dominance checks.
#[derive(Debug, Clone)]
pub struct BoundaryTable {
    pub measure: Measure,
    nodes: Vec<(f64, f64)>,
}

impl BoundaryTable {
    /// Tabulate the branch maximum at `grid` uniform entropies plus the
    /// crossings (fast X-state evaluations; no general re-evaluation).
    pub fn build(measure: Measure, grid: usize) -> Result<Self> {
        let mut entropies: Vec<f64> = (0..grid.max(2)).map(|i| 2.0 * i as f64 / (grid.max(2) - 1) as f64).collect();
        if measure != Measure::Mid {
            entropies.extend(family_crossings_for(measure)?);
        }
        entropies.sort_by(f64::total_cmp);
        let nodes = entropies
            .par_iter()
            .map(|&s| {
                let v = match measure {
                    Measure::Mid => mid_boundary(s)?.value,
                    _ => best_branch(measure, s)?.value,
                };
                Ok((s, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { measure, nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Upper bound on the boundary within the cell containing `entropy`:
    /// the larger of the two bracketing node values.
    pub fn upper_bound(&self, entropy: f64) -> f64 {
        let i = self.nodes.partition_point(|&(s, _)| s < entropy);
        let right = self.nodes.get(i).map_or(f64::NEG_INFINITY, |n| n.1);
        let left = if i > 0 { self.nodes[i - 1].1 } else { f64::NEG_INFINITY };
        left.max(right)
    }
}

/// X-state shape for the AMID-versus-discord search: diagonal from three
/// angles, coherence fractions of the PSD maxima from a fourth. Returns the
/// diagonal and the real corners `rho14`, `rho23`.
fn shape(x: &[f64], t: f64) -> ([f64; 4], f64, f64) {
    let (s1, s2, s3) = (x[0].sin().powi(2), x[1].sin().powi(2), x[2].sin().powi(2));
    let d = [
        1.0 - s1,
        s1 * (1.0 - s2),
        s1 * s2 * (1.0 - s3),
        s1 * s2 * s3,
    ];
    let sigma = 1.0 - x[3].cos();
    let (c1, c2) = if sigma <= 1.0 { (1.0, sigma) } else { (2.0 - sigma, 1.0) };
    (d, t * c1 * (d[0] * d[3]).sqrt(), t * c2 * (d[1] * d[2]).sqrt())
}

fn shape_eval(x: &[f64], t: f64) -> XEval {
    let (d, r14, r23) = shape(x, t);
    XEval::from_real_x(d, r14, r23)
}

fn shape_state(x: &[f64], t: f64) -> DensityMatrix {
    let (d, r14, r23) = shape(x, t);
    states::x_state(d, C64::new(r14, 0.0), C64::new(r23, 0.0)).expect("inside the PSD region")
}

fn two_way_fast(x: &[f64], t: f64) -> f64 {
    shape_eval(x, t).discord_two_way_coarse()
}

const SCREEN_SHAPES: usize = 400;
const REFINE_STARTS: usize = 12;

/// Angles reproducing the diagonal `d` in [`shape_state`].
fn angles_for_diag(d: [f64; 4]) -> [f64; 3] {
    let s1 = 1.0 - d[0];
    let s2 = if s1 > 0.0 { 1.0 - d[1] / s1 } else { 0.0 };
    let s3 = if s1 * s2 > 0.0 { 1.0 - d[2] / (s1 * s2) } else { 0.0 };
    [s1, s2, s3].map(|s| s.clamp(0.0, 1.0).sqrt().asin())
}

/// Objective for the outer search: `-A` at `D<-> = target`, or the
/// discord shortfall at full coherence when the target is out of reach.
fn amid_objective(x: &[f64], target: f64) -> f64 {
    let full = two_way_fast(x, 1.0);
    if full < target {
        return target - full;
    }
    amid_at_discord(x, target).map_or(target, |(a, _)| -a)
}

/// `(A, t)` for the shape at `D<-> = target`, or `None` if even full
/// coherence stays below the target.
fn amid_at_discord(x: &[f64], target: f64) -> Option<(f64, f64)> {
    if two_way_fast(x, 1.0) < target {
        return None;
    }
    let t = illinois(|t| two_way_fast(x, t) - target, 0.0, 1.0, 1e-11)?;
    Some((shape_eval(x, t).amid(), t))
}

/// Maximum AMID among X states with two-way discord `target`.
pub fn amid_vs_discord_upper_boundary(target: f64) -> Result<BoundaryPoint> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::OutOfRange {
            name: "D",
            value: target,
            range: "[0, 1]",
        });
    }
    let finish = |rho: DensityMatrix| -> Result<BoundaryPoint> {
        let m = rho.matrix();
        let d = measures::discord_two_way(&rho)?;
        Ok(BoundaryPoint {
            entropy: rho.entropy(),
            value: measures::amid(&rho)?,
            measure: Measure::Amid,
            family: Family::X,
            params: params(&[
                ("rho11", m[(0, 0)].re),
                ("rho22", m[(1, 1)].re),
                ("rho33", m[(2, 2)].re),
                ("rho44", m[(3, 3)].re),
                ("rho14", m[(0, 3)].re),
                ("rho23", m[(1, 2)].re),
                ("D_two_way", d),
            ]),
        })
    };
    if target <= 0.0 {
        return finish(DensityMatrix::maximally_mixed());
    }
    if target >= 1.0 - 1e-12 {
        return finish(states::werner(1.0)?);
    }

    let objective = |x: &[f64]| amid_objective(x, target);
    // Global screen: structured diagonals with one or both coherences at
    // their PSD maximum, plus seeded random shapes; refine the best few.
    let half_pi = std::f64::consts::FRAC_PI_2;
    let diagonals = [
        [0.5, 0.0, 0.0, 0.5],
        [0.45, 0.05, 0.05, 0.45],
        [0.35, 0.15, 0.15, 0.35],
        [0.25, 0.25, 0.25, 0.25],
        [0.7, 0.01, 0.01, 0.28],
        [0.15, 0.02, 0.02, 0.81],
    ];
    let mut screen: Vec<Vec<f64>> = Vec::new();
    for d in diagonals {
        let [x0, x1, x2] = angles_for_diag(d);
        for sig in [0.5, 1.2, half_pi] {
            screen.push(vec![x0, x1, x2, sig]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..SCREEN_SHAPES {
        screen.push((0..4).map(|_| rng.random::<f64>() * std::f64::consts::PI).collect());
    }
    let scores: Vec<f64> = screen.par_iter().map(|x| objective(x)).collect();
    let mut order: Vec<usize> = (0..screen.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]).then(i.cmp(&j)));
    let starts: Vec<Vec<f64>> = order.iter().take(REFINE_STARTS).map(|&i| screen[i].clone()).collect();
    let opts = NelderMeadOptions {
        step: 0.2,
        x_tol: 1e-6,
        f_tol: 1e-10,
        max_iter: 400,
    };
    // Restarting from the incumbent with a fresh simplex escapes the stalls
    // caused by kinks where the optimal discord axis switches.
    let refine = |x0: &Vec<f64>| {
        let mut r = nelder_mead(objective, x0, opts);
        for step in [0.1, 0.03] {
            let again = nelder_mead(objective, &r.x, NelderMeadOptions { step, ..opts });
            if again.value < r.value {
                r = again;
            }
        }
        r
    };
    let best = starts
        .par_iter()
        .map(refine)
        .filter(|r| r.value <= 0.0 && amid_at_discord(&r.x, target).is_some())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or(Error::ConstraintInfeasible(target))?;
    let (_, t) = amid_at_discord(&best.x, target).expect("feasible optimum");
    finish(shape_state(&best.x, t))
}
