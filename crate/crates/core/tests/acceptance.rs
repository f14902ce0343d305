//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::{brute_proximal, calibration_path, exhaustive_cover_optimum, random_set};
use fdim::algodim::{dim_estimate, mdim_estimate, precision_ladder, BinaryPoint, Calibration};
use fdim::estimators::{box_dimension, greedy_cover, hausdorff_sum};
use fdim::experiments::{
    chain_campaign, intersection_campaign, invariance_campaign, motion_campaign, p2s_probe,
    packing_intersection_campaign, prng_pairs, product_campaign, ChainParams, ExperimentReport,
    IntersectionParams, InvarianceParams, ProbeParams, ProductParams, Transform, RUNG_NAMES,
};
use fdim::generators::{cantor_set, koch_snowflake, sierpinski};
use fdim::geometry::{proximal_intersection, Point, RigidMotion};
use fdim::rng::ShiftRegister64;
use fdim::Result;

const SEED: u64 = 7;
const KOCH_DIM: f64 = 1.2618595071429148; // log 4 / log 3
const CANTOR_DIM: f64 = 0.6309297535714574; // log 2 / log 3

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn koch_params() -> IntersectionParams {
    IntersectionParams::new(3, 9).with_seed(SEED)
}

fn campaign_detail(r: &ExperimentReport) -> String {
    let checks: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{}={:.4}", c.name, c.value))
        .collect();
    format!(
        "violations {}/{} ({:.1}%), bound {:.4}, {}",
        r.violations,
        r.samples,
        100.0 * r.violation_fraction(),
        r.bound,
        checks.join(", ")
    )
}

fn koch_dimension() -> Result<Outcome> {
    let t = Instant::now();
    let k = koch_snowflake(6)?;
    let est = box_dimension(&k, 3, 8)?;
    let took = t.elapsed();
    outcome(
        (est.value - 1.26).abs() <= 0.05 && took < Duration::from_secs(10),
        format!("value {:.4} (log_3 4 = {KOCH_DIM:.4}) in {took:.2?}", est.value),
    )
}

fn intersection_bound() -> Result<Outcome> {
    let t = Instant::now();
    let k = koch_snowflake(6)?;
    let r = intersection_campaign(&k, &k, 100, &koch_params())?;
    let took = t.elapsed();
    let aligned = r.checks.iter().any(|c| c.name.starts_with("aligned") && c.value >= 0.3);
    outcome(
        r.violation_fraction() <= 0.05 && aligned && took < Duration::from_secs(300),
        format!("{} in {took:.2?}", campaign_detail(&r)),
    )
}

fn rigid_motions() -> Result<Outcome> {
    let k = koch_snowflake(6)?;
    let r = motion_campaign(&k, &k, 100, &koch_params())?;
    outcome(r.violation_fraction() <= 0.05, campaign_detail(&r))
}

fn product_chain() -> Result<Outcome> {
    let c = cantor_set(1.0 / 3.0, 8)?;
    let mut params = ProductParams::new(4, 11);
    params.oracle = Some(2.0 * CANTOR_DIM);
    let r = product_campaign(&c, &c, &params)?;
    let rungs: Vec<String> = RUNG_NAMES
        .iter()
        .map(|n| format!("{n}={:.4}", r.estimate(n).unwrap_or(f64::NAN)))
        .collect();
    let near = RUNG_NAMES
        .iter()
        .all(|n| r.estimate(n).is_some_and(|v| (v - 2.0 * CANTOR_DIM).abs() <= 0.1));
    let identity = r.checks.iter().any(|c| c.name.starts_with("count identity") && c.pass);
    outcome(
        near && identity && r.succeeded(),
        format!("{}, identity exact over r=0..=30: {identity}", rungs.join(" ")),
    )
}

fn packing_side() -> Result<Outcome> {
    let k = koch_snowflake(6)?;
    let r = packing_intersection_campaign(&k, &k, 100, &koch_params())?;
    let agree = r
        .checks
        .iter()
        .filter(|c| c.name.starts_with("upper/lower"))
        .all(|c| c.pass);
    outcome(agree && r.violation_fraction() <= 0.05, campaign_detail(&r))
}

fn bi_lipschitz() -> Result<Outcome> {
    let sets = [koch_snowflake(6)?, sierpinski(7)?];
    let mut transforms = vec![
        Transform::Pow2(-3),
        Transform::Pow2(1),
        Transform::Lattice { cells: vec![5, -3], scale: 3 },
    ];
    for deg in [30.0, 45.0, 73.1, 137.5, 200.0, 301.7] {
        transforms.push(Transform::Motion(RigidMotion::planar(deg, [0.0, 0.0], 1.0)?));
    }
    let r = invariance_campaign(&sets, &transforms, &InvarianceParams::new(3, 8))?;
    outcome(
        r.succeeded(),
        format!(
            "{} pairs, violations {}, max shift {:.4}, {}",
            r.samples,
            r.violations,
            r.estimate("max_shift").unwrap_or(f64::NAN),
            r.checks.iter().map(|c| format!("{}={:.4}", c.name, c.value)).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn effective_proxies() -> Result<Outcome> {
    let ladder = precision_ladder(4096);
    let mut worst_dyadic = 0.0f64;
    for x in [[0.375, 0.0], [0.5, 0.8125], [0.0, 0.0]] {
        let p = BinaryPoint::from_point(&Point::from_f64(&x, 30)?)?;
        worst_dyadic = worst_dyadic.max(dim_estimate(&p, &ladder)?.upper);
    }
    let mut rng = ShiftRegister64::new(SEED);
    let x = BinaryPoint::random(1, 4096, &mut rng)?;
    let d = dim_estimate(&x, &ladder)?;
    let m = mdim_estimate(&x, &x, &ladder)?;
    let gap = (m.lower - d.lower).abs().max((m.upper - d.upper).abs());
    let cal = Calibration::load(calibration_path())?;
    let pairs = prng_pairs(50, 4096, SEED)?;
    let chain = chain_campaign(&pairs, &ladder, &cal, &ChainParams::default())?;
    let frac = chain.estimate("pass_fraction").unwrap_or(0.0);
    outcome(
        worst_dyadic <= 0.2 && d.lower >= 0.8 && gap <= 0.15 && frac >= 0.9,
        format!(
            "dyadic density {worst_dyadic:.4}, PRNG density {:.4}, |mdim(x,x)-dim(x)| {gap:.4}, chain PASS {:.0}%",
            d.lower,
            100.0 * frac
        ),
    )
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut rng = ShiftRegister64::new(SEED);
    let mut cover_bad = 0;
    for _ in 0..1000 {
        let dim = 1 + (rng.next_u64() % 3) as usize;
        let count = 1 + (rng.next_u64() % 12) as usize;
        let span = 22 + (rng.next_u64() % 9) as u32;
        let set = random_set(&mut rng, count, dim, span);
        let delta = rng.uniform(0.02, 1.5) * 2f64.powi(span as i32 - 30);
        let s = rng.uniform(0.0, dim as f64);
        let greedy = hausdorff_sum(&greedy_cover(&set, delta)?, s)?;
        if greedy < exhaustive_cover_optimum(&set, delta, s) * (1.0 - 1e-12) {
            cover_bad += 1;
        }
    }
    let mut prox_bad = 0;
    for _ in 0..200 {
        let dim = 1 + (rng.next_u64() % 4) as usize;
        let ne = 1 + (rng.next_u64() % 500) as usize;
        let nf = 1 + (rng.next_u64() % 500) as usize;
        let span = 16 + (rng.next_u64() % 15) as u32;
        let e = random_set(&mut rng, ne, dim, span);
        let f = random_set(&mut rng, nf, dim, span);
        let delta = rng.uniform(1e-3, 0.4) * 2f64.powi(span as i32 - 30);
        if proximal_intersection(&e, &f, delta)? != brute_proximal(&e, &f, delta) {
            prox_bad += 1;
        }
    }
    outcome(
        cover_bad == 0 && prox_bad == 0,
        format!("cover below optimum {cover_bad}/1000, proximity mismatches {prox_bad}/200"),
    )
}

fn reproducibility() -> Result<Outcome> {
    let k = koch_snowflake(5)?;
    let c = cantor_set(1.0 / 3.0, 7)?;
    let cal = Calibration::load(calibration_path())?;
    let params = IntersectionParams::new(3, 8).with_seed(SEED);
    let runs: Vec<(&str, Box<dyn Fn() -> Result<ExperimentReport>>)> = vec![
        ("intersect", Box::new(|| intersection_campaign(&k, &k, 30, &params))),
        ("motion", Box::new(|| motion_campaign(&k, &k, 30, &params))),
        ("packing", Box::new(|| packing_intersection_campaign(&k, &k, 30, &params))),
        ("product", Box::new(|| product_campaign(&c, &c, &ProductParams::new(3, 10)))),
        (
            "chain",
            Box::new(|| {
                let pairs = prng_pairs(20, 1024, SEED)?;
                chain_campaign(&pairs, &precision_ladder(1024), &cal, &ChainParams::default())
            }),
        ),
        (
            "probe",
            Box::new(|| {
                let params = ProbeParams { seed: SEED, r_min: 3, r_max: 10 };
                p2s_probe(&c, 50, None, &params)
            }),
        ),
    ];
    let dir = tempfile::tempdir()?;
    let mut differing = Vec::new();
    for (name, run) in &runs {
        let a = run()?;
        let b = run()?;
        let pa = dir.path().join(format!("{name}-a.json"));
        let pb = dir.path().join(format!("{name}-b.json"));
        a.write(&pa)?;
        b.write(&pb)?;
        let same = std::fs::read(&pa)? == std::fs::read(&pb)?
            && std::fs::read(pa.with_extension("csv"))? == std::fs::read(pb.with_extension("csv"))?;
        if !same {
            differing.push(*name);
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} campaigns re-run, differing: {:?}", runs.len(), differing),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("Koch box dimension", koch_dimension),
        ("intersection bound", intersection_bound),
        ("rigid motions", rigid_motions),
        ("product chain", product_chain),
        ("packing-side intersection", packing_side),
        ("bi-Lipschitz invariance", bi_lipschitz),
        ("effective-dimension proxies", effective_proxies),
        ("oracle equivalence", oracle_equivalence),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!(
            "criterion {} {name}: {} | {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
