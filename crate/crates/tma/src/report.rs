//! Workflow layer behind the CLI subcommands: pattern sweeps to CSV,
//! metric reports to JSON, scene simulation, and side-by-side comparison.
//! Output formatting is fixed (see [`crate::io::fmt_float`]) so identical
//! inputs produce byte-identical files.

use serde_json::{json, Map, Value};

use crate::config::{BuiltConfig, RunConfig, SceneConfig};
use crate::error::{Result, TmaError};
use crate::io::fmt_float;
use crate::metrics::{
    angle_grid, directivity, efficiency, harmonic_powers, pattern_stats, DirectivityMode,
    HarmonicPattern,
};
use crate::sim::{link_metrics, synthesize_received, Scene};

/// Integration nodes for directivity; doubling this changes results by
/// well under 0.01 dB for desk-scale arrays.
const SIMPSON_POINTS: usize = 2001;

/// CSV sweep of the exploited harmonic patterns (plus specular mirrors for
/// real-pulse grids), normalized to the global peak across the listed
/// harmonics. Rows are ordered q ascending, theta ascending.
pub fn pattern_csv(config: &RunConfig, angle_step_override: Option<f64>) -> Result<String> {
    let built = config.build()?;
    let step = angle_step_override.unwrap_or(built.analysis.angle_step_deg);
    let thetas = angle_grid(step)?;
    let harmonics = built.pattern_harmonics();

    let patterns: Vec<HarmonicPattern> = harmonics
        .iter()
        .map(|&q| HarmonicPattern::evaluate(&built.grid, &built.geometry, q, &thetas))
        .collect::<Result<Vec<_>>>()?;
    let global_peak = patterns
        .iter()
        .flat_map(|p| p.values.iter().map(|v| v.norm()))
        .fold(0.0, f64::max);

    let mut out = String::from("theta_deg,q,power_db\n");
    for pat in &patterns {
        for (theta, value) in pat.theta_deg.iter().zip(&pat.values) {
            let db = if value.norm() == 0.0 || global_peak == 0.0 {
                f64::NEG_INFINITY
            } else {
                20.0 * (value.norm() / global_peak).log10()
            };
            out.push_str(&format!("{},{},{}\n", fmt_float(*theta), pat.q, fmt_float(db)));
        }
    }
    Ok(out)
}

fn beam_report(built: &BuiltConfig, q: i64, target_deg: f64) -> Result<Value> {
    let thetas = angle_grid(built.analysis.angle_step_deg)?;
    let pattern = HarmonicPattern::evaluate(&built.grid, &built.geometry, q, &thetas)?;
    let mut entry = Map::new();
    entry.insert("q".into(), json!(q));
    entry.insert("target_deg".into(), json!(target_deg));
    if pattern.peak_power() > 0.0 {
        let stats = pattern_stats(&pattern)?;
        entry.insert("peak_deg".into(), json!(stats.peak_deg));
        entry.insert("sll_db".into(), json!(stats.sll_db));
        entry.insert("beamwidth_deg".into(), json!(stats.beamwidth_deg));
        for mode in built.analysis.directivity_mode.modes() {
            let d = directivity(
                &built.grid,
                &built.geometry,
                q,
                target_deg,
                mode,
                SIMPSON_POINTS,
            )?;
            let key = match mode {
                DirectivityMode::PatternOnly => "directivity_pattern_only_dbi",
                DirectivityMode::TotalPower => "directivity_total_power_dbi",
            };
            entry.insert(key.into(), json!(d));
        }
    } else {
        entry.insert("peak_deg".into(), Value::Null);
        entry.insert("sll_db".into(), Value::Null);
        entry.insert("beamwidth_deg".into(), Value::Null);
    }
    Ok(Value::Object(entry))
}

/// Structured metrics report: efficiency, per-harmonic powers over the
/// exploited band (plus the residual), and per-beam shape/directivity stats.
pub fn metrics_report(config: &RunConfig) -> Result<Value> {
    let built = config.build()?;
    let powers = harmonic_powers(&built.grid);
    let eta = efficiency(&powers, &built.exploited)?;

    let span = built
        .pattern_harmonics()
        .iter()
        .map(|q| q.unsigned_abs())
        .max()
        .unwrap_or(0) as i64;
    let mut p_q = Map::new();
    for q in -span..=span {
        p_q.insert(q.to_string(), json!(powers.get(&q).copied().unwrap_or(0.0)));
    }
    let residual: f64 = powers
        .iter()
        .filter(|(q, _)| q.abs() > span)
        .map(|(_, v)| v)
        .sum();

    let beams = built
        .reported_beams()
        .into_iter()
        .map(|(q, target)| beam_report(&built, q, target))
        .collect::<Result<Vec<_>>>()?;

    let mut root = Map::new();
    root.insert("architecture".into(), json!(built.kind));
    root.insert("n_elements".into(), json!(built.geometry.n_elements()));
    root.insert("q_max".into(), json!(built.grid.q_max()));
    root.insert(
        "useful_harmonics".into(),
        json!(built.exploited.clone()),
    );
    root.insert("eta".into(), json!(eta));
    root.insert("p_q".into(), Value::Object(p_q));
    root.insert("p_q_residual".into(), json!(residual));
    root.insert("beams".into(), Value::Array(beams));
    Ok(Value::Object(root))
}

/// Simulate a scene and report link quality; optionally return the raw
/// combiner series for dumping.
pub fn simulate_report(scene_cfg: &SceneConfig, dump_series: bool) -> Result<(Value, Option<(u32, Vec<num_complex::Complex64>)>)> {
    let scene: Scene = scene_cfg.build()?;
    let report = link_metrics(&scene)?;

    let lines: Vec<Value> = report
        .lines
        .iter()
        .map(|l| {
            json!({
                "q": l.q,
                "amp_re": l.amp.re,
                "amp_im": l.amp.im,
                "power": l.amp.norm_sqr(),
            })
        })
        .collect();
    let image: Map<String, Value> = report
        .image_rejection_db
        .iter()
        .map(|(q, db)| (q.to_string(), json!(db)))
        .collect();

    let value = json!({
        "n_streams": scene.streams.len(),
        "l": scene.l,
        "sample_rate": scene.sample_rate,
        "duration": scene.duration,
        "lines": lines,
        "image_rejection_db": image,
        "crosstalk_db": report.crosstalk_db,
        "stream_errors": report.stream_errors,
    });

    let series = if dump_series {
        Some((
            scene.sample_rate as u32,
            synthesize_received(&scene)?,
        ))
    } else {
        None
    };
    Ok((value, series))
}

/// One architecture's column in the comparison table.
#[derive(Debug, Clone)]
pub struct CompareColumn {
    pub kind: &'static str,
    pub eta: f64,
    pub beam_a: (i64, f64),
    pub directivity_pattern_only_dbi: f64,
    pub directivity_total_power_dbi: f64,
    pub sll_db: Option<f64>,
}

/// Side-by-side comparison of 2..3 run configs sharing the same geometry.
/// "Beam A" is the first planned (steerable) beam of each architecture.
pub fn compare(configs: &[RunConfig]) -> Result<(String, Vec<CompareColumn>)> {
    if !(2..=3).contains(&configs.len()) {
        return Err(TmaError::config("compare takes 2 or 3 configs"));
    }
    let built: Vec<BuiltConfig> = configs
        .iter()
        .map(|c| c.build())
        .collect::<Result<Vec<_>>>()?;
    for b in &built[1..] {
        if b.geometry != built[0].geometry {
            return Err(TmaError::config("compared configs must share geometry"));
        }
    }

    let mut columns = Vec::new();
    for b in &built {
        let powers = harmonic_powers(&b.grid);
        let eta = efficiency(&powers, &b.exploited)?;
        let (q, target) = b
            .plan
            .beams()
            .first()
            .map(|&(q, t)| (q as i64, t))
            .ok_or_else(|| TmaError::config("compare needs at least one planned beam"))?;
        let d_pat = directivity(
            &b.grid,
            &b.geometry,
            q,
            target,
            DirectivityMode::PatternOnly,
            SIMPSON_POINTS,
        )?;
        let d_tot = directivity(
            &b.grid,
            &b.geometry,
            q,
            target,
            DirectivityMode::TotalPower,
            SIMPSON_POINTS,
        )?;
        let thetas = angle_grid(b.analysis.angle_step_deg)?;
        let stats = pattern_stats(&HarmonicPattern::evaluate(&b.grid, &b.geometry, q, &thetas)?)?;
        columns.push(CompareColumn {
            kind: b.kind,
            eta,
            beam_a: (q, target),
            directivity_pattern_only_dbi: d_pat,
            directivity_total_power_dbi: d_tot,
            sll_db: stats.sll_db,
        });
    }

    let mut table = String::new();
    table.push_str("metric");
    for c in &columns {
        table.push(',');
        table.push_str(c.kind);
    }
    table.push('\n');
    let row = |name: &str, f: &dyn Fn(&CompareColumn) -> String| {
        let mut line = String::from(name);
        for c in &columns {
            line.push(',');
            line.push_str(&f(c));
        }
        line.push('\n');
        line
    };
    table.push_str(&row("eta", &|c| fmt_float(c.eta)));
    table.push_str(&row("beam_a_q", &|c| c.beam_a.0.to_string()));
    table.push_str(&row("beam_a_theta_deg", &|c| fmt_float(c.beam_a.1)));
    table.push_str(&row("directivity_pattern_only_dbi", &|c| {
        fmt_float(c.directivity_pattern_only_dbi)
    }));
    table.push_str(&row("directivity_total_power_dbi", &|c| {
        fmt_float(c.directivity_total_power_dbi)
    }));
    table.push_str(&row("sll_db", &|c| {
        c.sll_db.map(fmt_float).unwrap_or_else(|| "".to_string())
    }));

    // flag the expected total-power ordering ssb >= swc >= rect when all
    // three architectures are present
    let find = |kind: &str| columns.iter().find(|c| c.kind == kind);
    if let (Some(ssb), Some(swc), Some(rect)) = (find("ssb"), find("swc"), find("rect")) {
        let ok = ssb.directivity_total_power_dbi >= swc.directivity_total_power_dbi
            && swc.directivity_total_power_dbi >= rect.directivity_total_power_dbi;
        table.push_str(&format!(
            "total_power_ordering_ssb_swc_rect,{}\n",
            if ok { "ok" } else { "violated" }
        ));
    }
    Ok((table, columns))
}

/// Deterministic JSON serialization: key order is insertion order
/// (`preserve_order`), floats via serde_json's shortest-round-trip encoding.
pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serialization");
    s.push('\n');
    s
}
