use std::path::{Path, PathBuf};

use fdim::algodim::{
    calibrate, complexity_profile, dim_estimate, precision_ladder, BinaryPoint, Calibration, Scheme,
};
use fdim::estimators::{box_dimension, box_dimension_auto, box_profile, DimensionEstimate};
use fdim::experiments::{
    chain_campaign, intersection_campaign, motion_campaign, normalized_points, p2s_probe,
    packing_intersection_campaign, prng_pairs, product_campaign, ChainParams, ExperimentReport,
    IntersectionParams, ProbeParams, ProductParams,
};
use fdim::generators::{
    attractor_with, cantor_set_with, koch_snowflake_with, read_ifs, sierpinski_with, AttractorOptions,
};
use fdim::geometry::{
    read_points, read_points_csv, write_points, write_points_csv, PointSet, DEFAULT_PRECISION,
};
use fdim::io::{write_atomic, Provenance};
use fdim::rng::ShiftRegister64;

use crate::config::{usage, CliResult, Settings};

pub const DEFAULT_CALIBRATION: &str = "calibration/fdim-calibration.txt";

/// Summary line and whether the run met its criterion.
pub fn run(s: &Settings) -> CliResult<(String, bool)> {
    match s.command() {
        "generate" => generate(s),
        "boxdim" => boxdim(s),
        "kdim" => kdim(s),
        "intersect" | "motion" => intersect(s),
        "product" => product(s),
        "chain" => chain(s),
        "probe" => probe(s),
        "calibrate" => run_calibrate(s),
        other => Err(usage(format!("unknown command {other}"))),
    }
}

/// Every merged setting under a `cli.` prefix.
fn snapshot(s: &Settings, prov: &mut Provenance) {
    prov.set("cli.command", s.command());
    for (k, v) in s.iter() {
        prov.set(format!("cli.{k}"), v);
    }
}

fn cli_provenance(s: &Settings) -> CliResult<Provenance> {
    let mut prov = Provenance::new(s.command(), s.seed()?);
    snapshot(s, &mut prov);
    Ok(prov)
}

fn load_set(s: &Settings, key: &str) -> CliResult<PointSet> {
    let path: PathBuf = s.require(key)?;
    if !path.exists() {
        return Err(usage(format!("input file {} not found", path.display())));
    }
    let set = if path.extension().is_some_and(|e| e == "csv") {
        read_points_csv(&path, s.get_or("precision", DEFAULT_PRECISION)?)?
    } else {
        read_points(&path)?
    };
    Ok(set)
}

fn load_calibration(s: &Settings) -> CliResult<Calibration> {
    let path: PathBuf = s.get_or("calibration", PathBuf::from(DEFAULT_CALIBRATION))?;
    Calibration::load(&path).map_err(|e| usage(e.to_string()))
}

fn write_report(s: &Settings, report: &mut ExperimentReport) -> CliResult<()> {
    snapshot(s, &mut report.provenance);
    if let Some(out) = s.get::<PathBuf>("out")? {
        report.write(&out)?;
    }
    Ok(())
}

fn generate(s: &Settings) -> CliResult<(String, bool)> {
    let fractal: String = s.require("fractal")?;
    let precision = s.get_or("precision", DEFAULT_PRECISION)?;
    let opts = AttractorOptions {
        precision,
        ..AttractorOptions::default()
    };
    let set = match fractal.as_str() {
        "koch" => koch_snowflake_with(s.require("order")?, precision)?,
        "cantor" => cantor_set_with(s.get_or("ratio", 1.0 / 3.0)?, s.require("depth")?, opts)?,
        "sierpinski" => sierpinski_with(s.require("depth")?, opts)?,
        "ifs" => {
            let path: PathBuf = s.require("ifs")?;
            attractor_with(&read_ifs(&path)?, s.require("depth")?, opts)?
        }
        other => {
            return Err(usage(format!(
                "unknown fractal `{other}`; expected koch, cantor, sierpinski or ifs"
            )))
        }
    };
    let out: PathBuf = s.require("out")?;
    let meta = cli_provenance(s)?.with("points", set.len()).to_text();
    if out.extension().is_some_and(|e| e == "csv") {
        write_points_csv(&out, &set, Some(&meta))?;
    } else {
        write_points(&out, &set, Some(&meta))?;
    }
    Ok((
        format!("generate {} points={} out={}", set.label(), set.len(), out.display()),
        true,
    ))
}

fn estimate_line(command: &str, label: &str, e: &DimensionEstimate) -> String {
    format!(
        "{command} {label} value={:.4} lower={:.4} upper={:.4} r=[{},{}]",
        e.value, e.lower_slope, e.upper_slope, e.r_min, e.r_max
    )
}

fn boxdim(s: &Settings) -> CliResult<(String, bool)> {
    let set = load_set(s, "in")?;
    let r_min = s.get_or("r_min", 3)?;
    let r_max = s.get_or("r_max", 8)?;
    let est = if s.flag("auto")? {
        box_dimension_auto(&set, r_min, r_max)?
    } else {
        box_dimension(&set, r_min, r_max)?
    };
    if let Some(out) = s.get::<PathBuf>("out")? {
        let prov = cli_provenance(s)?;
        let profile = box_profile(&set, est.r_min, est.r_max)?;
        let doc = serde_json::json!({
            "label": set.label(),
            "estimate": est,
            "scales": profile.scales(),
            "counts": profile.counts(),
            "provenance": prov,
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| usage(e.to_string()))?;
        text.push('\n');
        write_atomic(&out, text.as_bytes())?;
        let mut csv = comment(&prov);
        csv.push_str(&profile.to_csv());
        write_atomic(&out.with_extension("csv"), csv.as_bytes())?;
    }
    Ok((estimate_line("boxdim", set.label(), &est), true))
}

fn comment(prov: &Provenance) -> String {
    prov.to_text().lines().map(|l| format!("# {l}\n")).collect()
}

fn kdim(s: &Settings) -> CliResult<(String, bool)> {
    let cal = load_calibration(s)?;
    let (point, label, width) = match s.get::<usize>("random")? {
        Some(len) => {
            let mut rng = ShiftRegister64::new(s.seed()?);
            (BinaryPoint::random(1, len, &mut rng)?, format!("prng-{len}"), len)
        }
        None => {
            let set = load_set(s, "in")?;
            let i: usize = s.get_or("index", 0)?;
            if i >= set.len() {
                return Err(usage(format!("index {i} out of range for {} points", set.len())));
            }
            let (mut pts, width) = normalized_points(&set, &[i])?;
            (pts.remove(0), format!("{}[{i}]", set.label()), width)
        }
    };
    let r_max = s.get_or("r_max", width)?;
    let ladder = precision_ladder(r_max);
    let d = dim_estimate(&point, &ladder)?;
    if let Some(out) = s.get::<PathBuf>("out")? {
        let prov = cli_provenance(s)?
            .with("calibration.encoder", &cal.encoder)
            .with("calibration.header_overhead", cal.header_overhead)
            .with("lower", d.lower)
            .with("upper", d.upper);
        let mut csv = comment(&prov);
        csv.push_str(&complexity_profile(&point, &ladder, Scheme::default())?.to_csv());
        write_atomic(&out, csv.as_bytes())?;
    }
    Ok((
        format!(
            "kdim {label} value={:.4} lower={:.4} upper={:.4} r=[{},{}]",
            d.upper, d.lower, d.upper, d.r_min, d.r_max
        ),
        true,
    ))
}

fn intersect(s: &Settings) -> CliResult<(String, bool)> {
    let e = load_set(s, "e")?;
    let f = load_set(s, "f")?;
    let count: usize = s.get_or("count", 100)?;
    let mut params = IntersectionParams::new(s.get_or("r_min", 3)?, s.get_or("r_max", 9)?)
        .with_seed(s.seed()?);
    if let Some(d) = s.get::<f64>("delta")? {
        params.deltas = vec![d / 2.0, d, 2.0 * d];
    }
    params.tolerance = s.get_or("tolerance", params.tolerance)?;
    params.allowed_fraction = s.get_or("allowed_fraction", params.allowed_fraction)?;
    params.box_scale = s.get_or("box_scale", params.box_scale)?;
    params.window = s.get("window")?;
    let mut report = if s.command() == "motion" {
        params.motion_scale = s.get_or("scale", 1.0)?;
        motion_campaign(&e, &f, count, &params)?
    } else if s.flag("packing")? {
        packing_intersection_campaign(&e, &f, count, &params)?
    } else {
        intersection_campaign(&e, &f, count, &params)?
    };
    finish(s, &mut report)
}

fn finish(s: &Settings, report: &mut ExperimentReport) -> CliResult<(String, bool)> {
    write_report(s, report)?;
    Ok((report.summary_line(s.command()), report.succeeded()))
}

fn product(s: &Settings) -> CliResult<(String, bool)> {
    let e = load_set(s, "e")?;
    let f = load_set(s, "f")?;
    let mut params = ProductParams::new(s.get_or("r_min", 4)?, s.get_or("r_max", 11)?);
    params.tolerance = s.get_or("tolerance", params.tolerance)?;
    params.cap = s.get_or("cap", params.cap)?;
    params.oracle = s.get("oracle")?;
    params.window = s.get("window")?;
    let mut report = product_campaign(&e, &f, &params)?;
    finish(s, &mut report)
}

fn chain(s: &Settings) -> CliResult<(String, bool)> {
    let cal = load_calibration(s)?;
    let count = s.get_or("count", 50)?;
    let len = s.get_or("length", 4096)?;
    let seed = s.seed()?;
    let pairs = prng_pairs(count, len, seed)?;
    let params = ChainParams {
        allowed_fraction: s.get_or("allowed_fraction", 0.10)?,
        seed,
    };
    let mut report = chain_campaign(&pairs, &precision_ladder(len), &cal, &params)?;
    finish(s, &mut report)
}

fn probe(s: &Settings) -> CliResult<(String, bool)> {
    let set = load_set(s, "in")?;
    let params = ProbeParams {
        seed: s.seed()?,
        r_min: s.get_or("r_min", 3)?,
        r_max: s.get_or("r_max", 8)?,
    };
    let mut report = p2s_probe(&set, s.get_or("count", 50)?, None, &params)?;
    finish(s, &mut report)
}

fn run_calibrate(s: &Settings) -> CliResult<(String, bool)> {
    let out: PathBuf = s.get_or("out", PathBuf::from(DEFAULT_CALIBRATION))?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    }
    let cal = calibrate()?;
    cal.write(&out)?;
    Ok((calibration_line(&cal, &out), true))
}

fn calibration_line(cal: &Calibration, out: &Path) -> String {
    format!(
        "calibrate {} header_overhead={} join_overhead={} c0={} c1={}",
        out.display(),
        cal.header_overhead,
        cal.join_overhead,
        cal.c0,
        cal.c1
    )
}
