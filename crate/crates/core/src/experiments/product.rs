use super::report::{Check, ExperimentReport, NamedValue, SampleRow, TheoremTag};
use crate::error::{Error, Result};
use crate::estimators::{
    box_count, box_profile, default_window, estimate_with_window, product_profile,
    DimensionEstimate,
};
use crate::geometry::{cartesian_product, PointSet, DEFAULT_PRODUCT_CAP};
use crate::io::Provenance;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductParams {
    pub r_min: u32,
    pub r_max: u32,
    /// Slack `tau` added per link of the chain.
    pub tolerance: f64,
    pub window: Option<u32>,
    /// Largest `|E| * |F|` materialized for the count identity.
    pub cap: u64,
    /// Known dimension of `E x F`; every rung is compared to it when set.
    pub oracle: Option<f64>,
    pub oracle_tolerance: f64,
}

impl ProductParams {
    pub fn new(r_min: u32, r_max: u32) -> Self {
        Self {
            r_min,
            r_max,
            tolerance: 0.1,
            window: None,
            cap: DEFAULT_PRODUCT_CAP,
            oracle: None,
            oracle_tolerance: 0.1,
        }
    }
}

pub const RUNG_NAMES: [&str; 5] = [
    "lower(E)+lower(F)",
    "lower(ExF)",
    "lower(E)+upper(F)",
    "upper(ExF)",
    "upper(E)+upper(F)",
];

/// Five-term chain from `lower(E) + lower(F)` up to `upper(E) + upper(F)`, each
/// link allowed `tau`, plus the dyadic count identity on the materialized product.
pub fn product_campaign(e: &PointSet, f: &PointSet, params: &ProductParams) -> Result<ExperimentReport> {
    if params.r_min >= params.r_max {
        return Err(Error::param("need r_min < r_max"));
    }
    if e.precision() != f.precision() {
        return Err(Error::PrecisionMismatch(e.precision(), f.precision()));
    }
    let required = e.len() as u128 * f.len() as u128;
    if required > params.cap as u128 {
        return Err(Error::ProductTooLarge {
            required,
            cap: params.cap,
        });
    }
    let p = e.precision();
    let w = params.window.unwrap_or_else(|| default_window(params.r_min, params.r_max));
    let range = (params.r_min, params.r_max);
    let est = |set: &PointSet| -> Result<DimensionEstimate> {
        estimate_with_window(&box_profile(set, params.r_min, params.r_max)?, w)
    };
    let de = est(e)?;
    let df = est(f)?;
    let ef = cartesian_product(e, f, params.cap)?;
    let def = est(&ef)?;
    let rungs = [
        de.lower_slope + df.lower_slope,
        def.lower_slope,
        de.lower_slope + df.upper_slope,
        def.upper_slope,
        de.upper_slope + df.upper_slope,
    ];

    let mut rows = Vec::new();
    let mut violations = 0;
    for i in 0..4 {
        let violation = rungs[i] > rungs[i + 1] + params.tolerance;
        violations += violation as usize;
        rows.push(SampleRow {
            index: i,
            delta: 0.0,
            estimate: rungs[i],
            bound: rungs[i + 1] + params.tolerance,
            empty: false,
            violation,
        });
    }
    // Identity at every dyadic scale the precision admits.
    let pe = box_profile(e, 0, p)?;
    let pf = box_profile(f, 0, p)?;
    let predicted = product_profile(&pe, &pf)?;
    let mut mismatches = 0;
    for (i, r) in (0..=p).enumerate() {
        let got = box_count(&ef, r)?;
        let want = predicted.counts()[i];
        let violation = got != want;
        mismatches += violation as usize;
        rows.push(SampleRow {
            index: 4 + i,
            delta: 0.0,
            estimate: got as f64,
            bound: want as f64,
            empty: false,
            violation,
        });
    }
    violations += mismatches;
    let samples = 4 + (p as usize + 1);

    let mut checks = vec![Check {
        name: "count identity N_r(ExF) = N_r(E) N_r(F)".into(),
        value: mismatches as f64,
        threshold: 0.0,
        pass: mismatches == 0,
    }];
    if let Some(oracle) = params.oracle {
        for (name, v) in RUNG_NAMES.iter().zip(rungs) {
            let gap = (v - oracle).abs();
            checks.push(Check {
                name: format!("{name} near oracle {oracle:.4}"),
                value: gap,
                threshold: params.oracle_tolerance,
                pass: gap <= params.oracle_tolerance,
            });
        }
    }

    let mut estimates: Vec<NamedValue> = RUNG_NAMES
        .iter()
        .zip(rungs)
        .map(|(name, v)| NamedValue::new(*name, v, range, None))
        .collect();
    // Value of the product regression first so the summary line shows it.
    estimates.insert(0, NamedValue::new("value(ExF)", def.value, range, None));

    let mut prov = Provenance::new(TheoremTag::Product.as_str(), 0)
        .with("r_min", params.r_min)
        .with("r_max", params.r_max)
        .with("window", w)
        .with("tolerance", params.tolerance)
        .with("cap", params.cap)
        .with("identity_scales", format!("0..={p}"))
        .with("e", format!("{} ({} points)", e.label(), e.len()))
        .with("f", format!("{} ({} points)", f.label(), f.len()))
        .with("allowed_fraction", 0);
    if let Some(o) = params.oracle {
        prov.set("oracle", o);
        prov.set("oracle_tolerance", params.oracle_tolerance);
    }
    Ok(ExperimentReport {
        name: ef.label().to_string(),
        theorem_tag: TheoremTag::Product,
        samples,
        estimates,
        bound: rungs[4],
        violations,
        tolerance: params.tolerance,
        allowed_fraction: 0.0,
        pass: Some(violations == 0),
        checks,
        sweep: Vec::new(),
        provenance: prov,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::cantor_set;

    #[test]
    fn singleton_collapses_to_other_factor() {
        let e = PointSet::from_f64_points(1, 30, [[0.25]].iter().map(|p| &p[..]), "pt").unwrap();
        let f = cantor_set(1.0 / 3.0, 6).unwrap();
        let rep = product_campaign(&e, &f, &ProductParams::new(3, 9)).unwrap();
        let df = box_dimension_range(&f, 3, 9);
        assert!((rep.estimate("lower(ExF)").unwrap() - df.lower_slope).abs() < 1e-12);
        assert!((rep.estimate("upper(ExF)").unwrap() - df.upper_slope).abs() < 1e-12);
        assert_eq!(rep.estimate("lower(E)+lower(F)").unwrap(), df.lower_slope);
        assert!(rep.succeeded());
    }

    fn box_dimension_range(s: &PointSet, a: u32, b: u32) -> DimensionEstimate {
        estimate_with_window(&box_profile(s, a, b).unwrap(), default_window(a, b)).unwrap()
    }

    #[test]
    fn cap_is_enforced() {
        let f = cantor_set(1.0 / 3.0, 6).unwrap();
        let mut params = ProductParams::new(3, 9);
        params.cap = 100;
        assert!(matches!(
            product_campaign(&f, &f, &params),
            Err(Error::ProductTooLarge { required: 4096, cap: 100 })
        ));
    }
}
