//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary so the verdicts are printed even when `cargo test`
//! captures output. Exits nonzero if any criterion fails other than those
//! listed in `KNOWN_CONFLICTS`.

use std::time::Instant;

use qcorr::campaign::{self, CampaignConfig, PlaneX};
use qcorr::extremal::{self, BoundaryTable, Measure};
use qcorr::linalg::{hermitian_eig, partial_trace, shannon_entropy, tensor, Mat2};
use qcorr::measurement::{axis_projectors, outcome_probabilities, LocalMeasurement};
use qcorr::measures::{self, full_report, CorrelationReport};
use qcorr::states::{self, random_axis, random_su2};
use qcorr::{DensityMatrix, Subsystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria whose failure is a documented disagreement between the stated
/// claim and what the measures actually give.
const KNOWN_CONFLICTS: &[u32] = &[7];

const CAMPAIGN_SEED: u64 = 2024;
const CAMPAIGN_COUNT: usize = 10_000;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

/// One plane-CSV row of the shared A-vs-D<-> campaign.
struct Row {
    kind: String,
    source: String,
    s: f64,
    d: f64,
    m: f64,
    a: f64,
}

fn parse_plane(text: &str) -> Vec<Row> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# qcorr"));
    let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
    let at = |name: &str| cols.iter().position(|c| *c == name).unwrap();
    let (is, id, im, ia) = (at("S"), at("D_two_way"), at("M"), at("A"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let num = |i: usize| f[i].parse::<f64>().unwrap();
            Row {
                kind: f[0].to_string(),
                source: f[1].to_string(),
                s: num(is),
                d: num(id),
                m: num(im),
                a: num(ia),
            }
        })
        .collect()
}

fn c1_crossings() -> Verdict {
    let expected = [0.9231, 1.410, 1.497, 1.585];
    match extremal::family_crossings() {
        Ok(got) if got.len() == 4 => {
            let err = got.iter().zip(expected).map(|(g, e)| (g - e).abs()).fold(0.0, f64::max);
            verdict(err < 1e-3, format!("crossings {got:.5?}, max error {err:.2e}"))
        }
        Ok(got) => verdict(false, format!("expected 4 crossings, found {got:?}")),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn grid11() -> impl Iterator<Item = f64> {
    (0..=10).map(|i| i as f64 / 10.0)
}

fn c2_beta_mid() -> Verdict {
    let worst = grid11()
        .map(|b| (measures::mid(&states::beta_family(b).unwrap()).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(worst < 1e-9, format!("max |M - 1| = {worst:.2e} over 11 beta values"))
}

fn c3_delta() -> Verdict {
    let (mut gap, mut d, mut a) = (0.0f64, 0.0f64, 0.0f64);
    for delta in grid11() {
        let r = full_report(&states::delta_family(delta).unwrap()).unwrap();
        gap = gap.max((r.mid - (2.0 - r.entropy)).abs());
        d = d.max(r.discord_two_way);
        a = a.max(r.amid);
    }
    verdict(
        gap < 1e-9 && d < 1e-6 && a < 1e-6,
        format!("max |M - (2 - S)| = {gap:.2e}, max D<-> = {d:.2e}, max A = {a:.2e}"),
    )
}

fn c4_hierarchy(rows: &[Row]) -> Verdict {
    let samples: Vec<&Row> = rows.iter().filter(|r| r.kind == "sample").collect();
    let violations = samples
        .iter()
        .filter(|r| !(r.d - 1e-7 <= r.a && r.a <= r.m + 1e-9))
        .count();
    let slack_d = samples.iter().map(|r| r.d - r.a).fold(f64::NEG_INFINITY, f64::max);
    let slack_m = samples.iter().map(|r| r.a - r.m).fold(f64::NEG_INFINITY, f64::max);
    verdict(
        violations == 0 && samples.len() == CAMPAIGN_COUNT,
        format!(
            "{} states, {violations} violations; max(D<-> - A) = {slack_d:.2e}, max(A - M) = {slack_m:.2e}",
            samples.len()
        ),
    )
}

fn c5_werner() -> Verdict {
    // -1/3, then 19 evenly spaced points from -0.2 to 1.
    let fs = std::iter::once(-1.0 / 3.0).chain((0..19).map(|i| -0.2 + 1.2 * i as f64 / 18.0));
    let (mut ma, mut ad) = (0.0f64, 0.0f64);
    for f in fs {
        let r = full_report(&states::werner(f).unwrap()).unwrap();
        ma = ma.max((r.mid - r.amid).abs());
        ad = ad.max((r.amid - r.discord_two_way).abs());
    }
    verdict(ma < 1e-5 && ad < 1e-5, format!("max |M - A| = {ma:.2e}, max |A - D<->| = {ad:.2e} over 20 points"))
}

fn c6_x_states() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..1000 {
        let rho = states::random_x_state(seed);
        let a = measures::amid(&rho).unwrap();
        let c = measures::amid_x_candidates(&rho).unwrap();
        worst = worst.max((a - c).abs());
    }
    verdict(worst < 1e-5, format!("max |A - A_x| = {worst:.2e} over 1000 X states"))
}

fn c7_congruence() -> Verdict {
    let discord = extremal::boundary_curve(Measure::Discord, 50).unwrap();
    let amid = extremal::boundary_curve(Measure::Amid, 50).unwrap();
    let mut value_gap = 0.0f64;
    let mut where_gap = 0.0;
    let mut state_gap = 0.0f64;
    for p in &discord {
        // Nearest AMID node; the grids coincide except at the crossings.
        let a = amid
            .iter()
            .min_by(|x, y| (x.entropy - p.entropy).abs().total_cmp(&(y.entropy - p.entropy).abs()))
            .map(|q| q.value)
            .unwrap();
        if (a - p.value).abs() > value_gap {
            value_gap = (a - p.value).abs();
            where_gap = p.entropy;
        }
        let r = full_report(&p.state().unwrap()).unwrap();
        let spread = [r.amid, r.discord_left, r.discord_right];
        let hi = spread.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = spread.iter().cloned().fold(f64::INFINITY, f64::min);
        state_gap = state_gap.max(hi - lo);
    }
    verdict(
        value_gap < 1e-3 && state_gap < 1e-4,
        format!(
            "max |A_max - D_max| = {value_gap:.2e} (at S = {where_gap:.3}); \
             on discord-boundary states max spread of (A, D<-, D->) = {state_gap:.2e}"
        ),
    )
}

fn c8_dominance(rows: &[Row]) -> Verdict {
    let discord = BoundaryTable::build(Measure::Discord, 400).unwrap();
    let amid = BoundaryTable::build(Measure::Amid, 400).unwrap();
    let mut excess = [f64::NEG_INFINITY; 3];
    let mut over = 0;
    for r in rows.iter().filter(|r| r.kind == "sample") {
        let e = [
            r.d - discord.upper_bound(r.s),
            r.a - amid.upper_bound(r.s),
            r.m - extremal::mid_boundary(r.s).unwrap().value,
        ];
        over += e.iter().filter(|&&x| x > 1e-3).count();
        for k in 0..3 {
            excess[k] = excess[k].max(e[k]);
        }
    }
    verdict(
        over == 0,
        format!(
            "{over} exceedances; max excess discord {:.2e}, amid {:.2e}, mid {:.2e}",
            excess[0], excess[1], excess[2]
        ),
    )
}

fn c9_faithfulness(rows: &[Row]) -> Verdict {
    let false_positive = rows.iter().filter(|r| r.d < 1e-6 && r.a > 1e-4).count();
    let mid_witness = rows.iter().filter(|r| r.d < 1e-6 && r.m > 0.5).count();
    let witness_sources: std::collections::BTreeSet<&str> = rows
        .iter()
        .filter(|r| r.d < 1e-6 && r.m > 0.5)
        .map(|r| r.source.as_str())
        .collect();
    verdict(
        false_positive == 0 && mid_witness > 0,
        format!(
            "{} rows; {false_positive} with D<-> < 1e-6 and A > 1e-4; \
             {mid_witness} with D<-> < 1e-6 and M > 0.5 (sources {witness_sources:?})",
            rows.len()
        ),
    )
}

/// Brute-force discord with B measured: dense hemisphere grid, then three
/// zoom rounds around the best cells, via projectors and partial traces.
fn discord_oracle(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let s_a = shannon_entropy(&hermitian_eig(&rho.reduced(Subsystem::A)).unwrap().eigenvalues);
    let i = measures::mutual_information(rho);
    let cond = |theta: f64, phi: f64| -> f64 {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let mut h = 0.0;
        for proj in axis_projectors(n) {
            let op = tensor(&Mat2::identity(), &proj);
            let unnorm = partial_trace(&(op * *m * op), Subsystem::A);
            let p = unnorm.trace().re;
            if p > 1e-14 {
                h += p * shannon_entropy(&hermitian_eig(&unnorm.scale(1.0 / p)).unwrap().eigenvalues);
            }
        }
        h
    };
    let (rings, az) = (60, 120);
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(rings * az);
    let dt = std::f64::consts::FRAC_PI_2 / rings as f64;
    let dp = std::f64::consts::TAU / az as f64;
    for a in 0..=rings {
        for b in 0..az {
            let (t, p) = (a as f64 * dt, b as f64 * dp);
            cells.push((cond(t, p), t, p));
        }
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = cells[0].0;
    for &(_, t0, p0) in cells.iter().take(4) {
        let (mut t, mut p, mut st, mut sp) = (t0, p0, dt, dp);
        for _ in 0..6 {
            let mut local = (f64::INFINITY, t, p);
            for u in -4..=4 {
                for v in -4..=4 {
                    let (tt, pp) = (t + st * u as f64 / 4.0, p + sp * v as f64 / 4.0);
                    let h = cond(tt, pp);
                    if h < local.0 {
                        local = (h, tt, pp);
                    }
                }
            }
            (t, p) = (local.1, local.2);
            best = best.min(local.0);
            st /= 3.0;
            sp /= 3.0;
        }
    }
    (i - (s_a - best)).max(0.0)
}

fn max_field_gap(x: &CorrelationReport, y: &CorrelationReport) -> f64 {
    let fields = |r: &CorrelationReport| {
        [r.entropy, r.mutual_information, r.discord_left, r.discord_right, r.mid, r.classical_mutual_information, r.amid]
    };
    fields(x).iter().zip(fields(y)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn c10_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut lu, mut swap, mut delta, mut oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let rho = states::random_state(campaign::sample_seed(10, seed), None).unwrap();
        let r = full_report(&rho).unwrap();

        let moved = rho.local_unitary(&random_su2(&mut rng), &random_su2(&mut rng));
        lu = lu.max(max_field_gap(&r, &full_report(&moved).unwrap()));

        let s = full_report(&rho.swapped()).unwrap();
        swap = swap
            .max((r.discord_left - s.discord_right).abs())
            .max((r.discord_right - s.discord_left).abs())
            .max((r.mid - s.mid).abs())
            .max((r.amid - s.amid).abs())
            .max((r.mutual_information - s.mutual_information).abs());

        let meas = LocalMeasurement::from_axes(random_axis(&mut rng), random_axis(&mut rng)).unwrap();
        let p = outcome_probabilities(&rho.pauli_expansion(), &meas.axis_a, &meas.axis_b);
        for (k, proj) in meas.product_projectors().iter().enumerate() {
            delta = delta.max((proj.trace_product_re(rho.matrix()) - p[k / 2][k % 2]).abs());
        }

        oracle = oracle.max((r.discord_left - discord_oracle(&rho)).abs());
    }
    verdict(
        lu < 1e-6 && swap < 1e-6 && delta < 1e-12 && oracle < 1e-4,
        format!(
            "100 states: local-unitary drift {lu:.2e}, swap asymmetry {swap:.2e}, \
             probability identity {delta:.2e}, |D<- - brute force| {oracle:.2e}"
        ),
    )
}

fn main() {
    let started = Instant::now();
    let plane = {
        let cfg = CampaignConfig {
            count: Some(CAMPAIGN_COUNT),
            seed: CAMPAIGN_SEED,
            measure: Measure::Amid,
            grid: 2,
            ..CampaignConfig::default()
        };
        match campaign::plane_csv(&cfg, PlaneX::DiscordTwoWay) {
            Ok(text) => Ok(parse_plane(&text)),
            Err(e) => Err(e.to_string()),
        }
    };
    let campaign_verdict = |f: fn(&[Row]) -> Verdict| match &plane {
        Ok(rows) => f(rows),
        Err(e) => verdict(false, format!("campaign aborted: {e}")),
    };

    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Verdict>)> = vec![
        (1, "family crossings", Box::new(c1_crossings)),
        (2, "beta-family MID", Box::new(c2_beta_mid)),
        (3, "delta-family identities", Box::new(c3_delta)),
        (4, "hierarchy sweep", Box::new(move || campaign_verdict(c4_hierarchy))),
        (5, "Werner coincidence", Box::new(c5_werner)),
        (6, "X-state AMID equality", Box::new(c6_x_states)),
        (7, "boundary congruence", Box::new(c7_congruence)),
        (8, "boundary dominance", Box::new(move || campaign_verdict(c8_dominance))),
        (9, "faithfulness scatter", Box::new(move || campaign_verdict(c9_faithfulness))),
        (10, "property suite", Box::new(c10_properties)),
    ];

    let mut unexpected = Vec::new();
    for (id, name, run) in &criteria {
        let t = Instant::now();
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        let note = if !v.passed && KNOWN_CONFLICTS.contains(id) {
            " [documented conflict]"
        } else {
            ""
        };
        println!("{tag} criterion {id:>2} ({name}): {}{note} [{:.1}s]", v.detail, t.elapsed().as_secs_f64());
        if !v.passed && !KNOWN_CONFLICTS.contains(id) {
            unexpected.push(*id);
        }
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
