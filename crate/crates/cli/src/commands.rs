//! Subcommand implementations.

use std::io::BufWriter;

use juliadim::conditions::{self, check_osc, check_semihyperbolicity, family_c0, Verdict};
use juliadim::julia::{approximate_julia, box_count_dimension, default_eps_range, rasterize, PointCloud, Viewport};
use juliadim::measure::{build_conformal_atoms, conformality_residual, geometric_ratio_report, project_measure, truncation_tail};
use juliadim::pressure::{base_point_select, bowen_root_from, critical_exponent_estimate, default_candidates, PressureProfile};
use juliadim::{Complex64, Error, MultiMap};
use serde_json::{json, Value};

use crate::config::{FamilyConfig, RunConfig};
use crate::error::CliError;
use crate::report::Run;

/// Depth of the postcritical sample used to choose a base point.
const BASE_POINT_DEPTH: usize = 6;
/// Slack allowed when comparing a residual with its tail bound.
const RESIDUAL_SLACK: f64 = 1e-9;

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn base_point(f: &MultiMap, cfg: &mut RunConfig) -> Result<Complex64, CliError> {
    if let Some([re, im]) = cfg.base_point {
        return Ok(Complex64::new(re, im));
    }
    let bp = base_point_select(f, &default_candidates(), BASE_POINT_DEPTH)?;
    cfg.base_point = Some([bp.point.re, bp.point.im]);
    Ok(bp.point)
}

fn fit_viewport(cloud: &PointCloud, pixels: u32) -> Viewport {
    let (x0, y0, x1, y1) = cloud.bounds().unwrap_or((-1.0, -1.0, 1.0, 1.0));
    let half = ((x1 - x0).max(y1 - y0) / 2.0 * 1.05).max(1e-9);
    Viewport::square(Complex64::new((x0 + x1) / 2.0, (y0 + y1) / 2.0), half, pixels)
}

pub fn render(cfg: &mut RunConfig, run: &mut Run) -> Result<Value, CliError> {
    let f = cfg.multimap.resolve()?;
    let mut rc = cfg.render.clone().unwrap_or_default();
    if let Some(vp) = &rc.viewport {
        vp.validate().map_err(|e| schema(e.to_string()))?;
    } else if rc.pixels == 0 {
        return Err(schema("render.pixels must be positive"));
    }
    let params = rc.julia.params(cfg.seed);
    let cloud = run.phase("cloud", || approximate_julia(&f, &params))?;
    let vp = *rc.viewport.get_or_insert_with(|| fit_viewport(&cloud, rc.pixels));
    cfg.render = Some(rc);
    let img = run.phase("raster", || rasterize(&cloud, &vp))?;
    run.write_with("julia.png", |p| Ok(img.save_png(p)?))?;
    let max_modulus = cloud.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sidecar = json!({
        "viewport": vp,
        "points": cloud.len(),
        "method": cloud.method,
        "burn_in": cloud.burn_in,
        "source_hash": format!("{:016x}", cloud.source_hash),
        "bounds": cloud.bounds(),
        "max_modulus": max_modulus,
        "outside": img.outside,
        "nonzero_pixels": img.nonzero_pixels(),
        "max_count": img.counts.iter().max(),
        "pixel_pitch": vp.pixel_pitch(),
    });
    run.write_json("render.json", &sidecar)?;
    Ok(sidecar)
}

pub fn dimension(cfg: &mut RunConfig, run: &mut Run) -> Result<Value, CliError> {
    let f = cfg.multimap.resolve()?;
    let dc = cfg.dimension.clone().ok_or_else(|| schema("a dimension block with n_range is required"))?;
    let [lo, hi] = dc.n_range;
    if lo == 0 || lo > hi {
        return Err(schema("n_range must satisfy 1 <= lo <= hi"));
    }
    if dc.t_grid.iter().any(|t| !t.is_finite()) || !(dc.tol_t > 0.0) {
        return Err(schema("t_grid must be finite and tol_t positive"));
    }
    let z = base_point(&f, cfg)?;
    let metric = cfg.metric;
    let profile = run.phase("tree", || PressureProfile::build(&f, z, hi + 1, dc.pruning, metric))?;
    if profile.level_profile().sampled {
        run.warn("BeamSampling: transfer sums are importance-weighted estimates");
    }
    let bowen = run.phase("bowen", || bowen_root_from(&profile, hi, dc.tol_t))?;
    if bowen.diagnostics.iter().any(|d| d.infinite_sum) {
        run.warn("InfiniteSum: nodes with vanishing derivative were excluded for t > 0");
    }
    let poincare = match critical_exponent_estimate(&profile, &dc.t_grid, profile.depth()) {
        Ok(c) => Some(c),
        Err(Error::Inconclusive) => {
            run.warn("Inconclusive: no grid value of t gives decaying Poincaré terms");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let params = dc.julia.params(cfg.seed);
    let cloud = run.phase("cloud", || approximate_julia(&f, &params))?;
    let eps = default_eps_range(&cloud, dc.boxcount.decades, dc.boxcount.steps);
    let fit = run.phase("boxcount", || box_count_dimension(&cloud, &eps, cfg.seed))?;
    for w in &fit.warnings {
        run.warn(format!("BoxCount: {w}"));
    }

    let ns: Vec<usize> = (lo..=hi).collect();
    run.write_with("pressure.csv", |p| {
        use std::io::Write;
        let mut out = BufWriter::new(std::fs::File::create(p)?);
        writeln!(out, "t,n,cesaro,ratio")?;
        for &t in &dc.t_grid {
            for &n in &ns {
                writeln!(out, "{},{},{},{}", t, n, profile.cesaro(t, n), profile.ratio(t, n))?;
            }
        }
        Ok(out.flush()?)
    })?;
    let results = json!({
        "base_point": cfg.base_point,
        "bowen": bowen,
        "boxcount": fit,
        "poincare": poincare,
    });
    run.write_json("dimension.json", &results)?;
    Ok(json!({
        "bowen_root": bowen.h,
        "boxcount_slope": fit.slope,
        "critical_exponent": poincare.as_ref().map(|c| c.estimate),
    }))
}

pub fn measure(cfg: &mut RunConfig, run: &mut Run) -> Result<Value, CliError> {
    let f = cfg.multimap.resolve()?;
    let mut mc = cfg.measure.clone().unwrap_or_default();
    if mc.truncation < 2 || mc.centers == 0 || mc.radii.count == 0 || mc.bowen_n == 0 {
        return Err(schema("truncation must be at least 2; centers, radii.count and bowen_n positive"));
    }
    if !(mc.radii.min > 0.0 && mc.radii.max >= mc.radii.min) {
        return Err(schema("radii must satisfy 0 < min <= max"));
    }
    let z = base_point(&f, cfg)?;
    let metric = cfg.metric;
    if mc.t.is_none() || mc.s.is_none() {
        let profile = run.phase("preliminary", || PressureProfile::build(&f, z, mc.bowen_n + 1, mc.pruning, metric))?;
        let t = match mc.t {
            Some(t) => t,
            None => bowen_root_from(&profile, mc.bowen_n, 1e-9)?.h,
        };
        let p = profile.estimate(t, &[mc.bowen_n])?;
        mc.t = Some(t);
        mc.s.get_or_insert(p.headline + mc.s_offset);
    }
    let (t, s) = (mc.t.unwrap(), mc.s.unwrap());
    cfg.measure = Some(mc.clone());

    let nu = run.phase("atoms", || build_conformal_atoms(&f, z, t, s, mc.truncation, mc.pruning, metric))?;
    if nu.infinite_sum {
        run.warn("InfiniteSum: nodes with vanishing derivative were excluded for t > 0");
    }
    let residual = if nu.params.sampled {
        run.warn("BeamSampling: conformality residual skipped for a sampled measure");
        None
    } else {
        let r = run.phase("residual", || conformality_residual(&nu, &f, t, s))?;
        let tail = run.phase("tail", || truncation_tail(&f, &nu, mc.pruning))?;
        let within = r.residual <= tail * (1.0 + RESIDUAL_SLACK);
        if !within {
            run.warn("ResidualAboveTail: conformality residual exceeds the truncation tail");
        }
        Some(json!({ "report": r, "tail": tail, "within_tail": within }))
    };
    let planar = project_measure(&nu);
    run.write_with("atoms.csv", |p| Ok(planar.write_csv(BufWriter::new(std::fs::File::create(p)?))?))?;

    let params = mc.julia.params(cfg.seed);
    let cloud = run.phase("cloud", || approximate_julia(&f, &params))?;
    let k = mc.centers.min(cloud.len());
    let centers: Vec<Complex64> = (0..k).map(|i| cloud.points[i * cloud.len() / k]).collect();
    let radii = mc.radii.values();
    let geo = run.phase("geometric", || geometric_ratio_report(&planar, t, &centers, &radii))?;
    if geo.empty_balls > 0 {
        run.warn(format!("EmptyBall: {} of {} balls hold no atoms", geo.empty_balls, geo.samples.len()));
    }
    run.write_json("geometric.json", &geo)?;
    let summary = json!({
        "t": t,
        "s": s,
        "truncation": mc.truncation,
        "atoms": nu.atoms.len(),
        "planar_atoms": planar.atoms.len(),
        "total_mass": nu.total_mass,
        "normalizer": nu.normalizer,
        "level_masses": nu.level_masses,
        "level_decay_ratio": nu.level_decay_ratio(),
        "residual": residual,
    });
    run.write_json("residual.json", &summary)?;
    Ok(json!({
        "t": t,
        "s": s,
        "total_mass": nu.total_mass,
        "residual": summary["residual"],
        "spread": geo.spread,
    }))
}

pub fn check(cfg: &mut RunConfig, run: &mut Run) -> Result<Value, CliError> {
    let f = cfg.multimap.resolve()?;
    let mut cc = cfg.check.clone().unwrap_or_default();
    let entry = cfg.multimap.catalog_name().map(conditions::example).transpose().map_err(|e| schema(e.to_string()))?;
    let catalog_region = entry.as_ref().and_then(|e| e.region.clone());
    let region = cc.region.clone().or(catalog_region.clone()).ok_or_else(|| schema("check needs a region"))?;
    region.validate().map_err(|e| schema(e.to_string()))?;
    if cc.semihyp.depth == 0 || !(cc.semihyp.dist_tol > 0.0) || cc.osc.grid < 2 {
        return Err(schema("semihyp.depth, semihyp.dist_tol and osc.grid must be positive"));
    }
    cc.region = Some(region.clone());
    cfg.check = Some(cc.clone());

    let osc = run.phase("osc", || check_osc(&f, &region, &cc.osc.params(cfg.seed)))?;
    if osc.unconfirmed > 0 {
        run.warn(format!("OscUnconfirmed: {} boundary grid hits were not robust and were not counted", osc.unconfirmed));
    }
    let params = cc.julia.params(cfg.seed);
    let cloud = run.phase("cloud", || approximate_julia(&f, &params))?;
    let semihyp = run.phase("semihyp", || check_semihyperbolicity(&f, &cloud, cc.semihyp.depth, cc.semihyp.dist_tol))?;
    if semihyp.pairs.iter().any(|p| p.verdict == Verdict::Inconclusive) {
        run.warn("Inconclusive: a critical orbit returns within ten times dist_tol");
    }
    run.write_json("check.json", &json!({ "osc": osc, "semihyp": semihyp }))?;
    let documented_pass = entry.as_ref().is_some_and(|e| e.osc_expected == Some(true)) && Some(&region) == catalog_region.as_ref();
    let summary = json!({
        "osc1_violations": osc.osc1_violations,
        "osc2_violations": osc.osc2_violations,
        "osc3_alpha": osc.osc3_alpha,
        "semihyp": semihyp.overall,
        "documented_pass": documented_pass,
    });
    if documented_pass && !osc.passes_osc1_osc2() {
        return Err(CliError::Check(format!(
            "{} osc1 and {} osc2 violations on an example documented to pass",
            osc.osc1_violations, osc.osc2_violations
        )));
    }
    Ok(summary)
}

pub fn family(fc: FamilyConfig, run: &mut Run) -> Result<Value, CliError> {
    let c0 = family_c0(fc.d1, fc.d, fc.r)?;
    let v = json!({ "d1": fc.d1, "d": fc.d, "r": fc.r, "c0": c0, "log2_c0": c0.log2() });
    run.write_json("family_c0.json", &v)?;
    Ok(v)
}

pub fn list_examples() -> Value {
    serde_json::to_value(conditions::builtin_examples()).expect("catalog serializes")
}
