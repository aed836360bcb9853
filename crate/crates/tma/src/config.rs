//! TOML configuration files for the CLI: run configs (geometry, taper,
//! architecture, beams, analysis options) and scene files (modulation plus
//! incident streams). The checked-in fixtures double as schema examples.

use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

use crate::error::{Result, TmaError};
use crate::metrics::DirectivityMode;
use crate::model::{ArrayGeometry, ExcitationGrid};
use crate::pulse::{RectPulse, SwcPulse};
use crate::sim::{Baseband, Modulation, Scene, Stream, Tone};
use crate::synthesis::{
    gaussian_taper, grid_from_rect, grid_from_swc, grid_from_ssb, rect_pulses_steered,
    ssb_pulses_for_plan, steering_phases, BeamPlan,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub n_elements: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum TaperSection {
    Uniform {
        #[serde(default = "one")]
        value: f64,
    },
    Gaussian {
        sigma: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl TaperSection {
    pub fn build(&self, n_elements: usize) -> Result<Vec<f64>> {
        match self {
            TaperSection::Uniform { value } => {
                if !(*value > 0.0 && *value <= 1.0) {
                    return Err(TmaError::config("uniform taper value outside (0, 1]"));
                }
                Ok(vec![*value; n_elements])
            }
            TaperSection::Gaussian { sigma } => gaussian_taper(n_elements, *sigma),
            TaperSection::Explicit { values } => {
                if values.len() != n_elements {
                    return Err(TmaError::config(format!(
                        "explicit taper has {} values for {} elements",
                        values.len(),
                        n_elements
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum ArchitectureSection {
    /// Switched rectangular pulses. Delays are either explicit or derived by
    /// steering the first harmonic towards the first planned beam.
    Rect {
        #[serde(default)]
        delays: Option<Vec<f64>>,
    },
    /// Sum-of-weighted-cosines pulses with weights `a_0..a_K`; beam phases
    /// come from the plan.
    Swc { weights: Vec<f64> },
    /// Preprocessed single-sideband pulses; carriers and phases come from
    /// the plan.
    Ssb,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamEntry {
    pub q: usize,
    pub theta_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_q_max")]
    pub q_max: usize,
    #[serde(default = "default_angle_step")]
    pub angle_step_deg: f64,
    #[serde(default)]
    pub directivity_mode: DirectivityModeOpt,
}

fn default_q_max() -> usize {
    50
}

fn default_angle_step() -> f64 {
    0.1
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            q_max: default_q_max(),
            angle_step_deg: default_angle_step(),
            directivity_mode: DirectivityModeOpt::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DirectivityModeOpt {
    PatternOnly,
    TotalPower,
    #[default]
    Both,
}

impl DirectivityModeOpt {
    pub fn modes(self) -> Vec<DirectivityMode> {
        match self {
            DirectivityModeOpt::PatternOnly => vec![DirectivityMode::PatternOnly],
            DirectivityModeOpt::TotalPower => vec![DirectivityMode::TotalPower],
            DirectivityModeOpt::Both => {
                vec![DirectivityMode::PatternOnly, DirectivityMode::TotalPower]
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    pub taper: TaperSection,
    pub architecture: ArchitectureSection,
    #[serde(default)]
    pub beams: Vec<BeamEntry>,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TmaError::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| TmaError::config(format!("{}: {e}", path.display())))
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::uniform(self.geometry.n_elements, self.geometry.spacing)
    }

    pub fn plan(&self) -> Result<BeamPlan> {
        BeamPlan::new(self.beams.iter().map(|b| (b.q, b.theta_deg)).collect())
    }

    /// Instantiate the architecture: grid plus metadata used by the report
    /// layer.
    pub fn build(&self) -> Result<BuiltConfig> {
        let geometry = self.geometry()?;
        let taper = self.taper.build(geometry.n_elements())?;
        let plan = self.plan()?;
        let q_max = self.analysis.q_max;

        let (grid, exploited) = match &self.architecture {
            ArchitectureSection::Rect { delays } => {
                let pulses = match delays {
                    Some(d) => {
                        if d.len() != geometry.n_elements() {
                            return Err(TmaError::config("delays length != element count"));
                        }
                        taper
                            .iter()
                            .zip(d)
                            .map(|(&xi, &delta)| RectPulse::new(xi, delta))
                            .collect::<Result<Vec<_>>>()?
                    }
                    None => match plan.beams().first() {
                        Some(&(_, theta)) => rect_pulses_steered(&geometry, &taper, theta)?,
                        None => taper
                            .iter()
                            .map(|&xi| RectPulse::new(xi, 0.0))
                            .collect::<Result<Vec<_>>>()?,
                    },
                };
                let l = plan.beams().len().max(1);
                // switched reference exploits q = 0..L-1
                let exploited: Vec<i64> = (0..l as i64).collect();
                (grid_from_rect(&pulses, q_max)?, exploited)
            }
            ArchitectureSection::Swc { weights } => {
                let order = weights.len().saturating_sub(1);
                if order == 0 {
                    return Err(TmaError::config("swc needs weights a_0..a_K with K >= 1"));
                }
                if plan.order() > order {
                    return Err(TmaError::config(format!(
                        "plan uses harmonic {} but swc weights stop at {order}",
                        plan.order()
                    )));
                }
                let phases = steering_phases(&geometry, &plan);
                let pulses = (0..geometry.n_elements())
                    .map(|n| {
                        let row: Vec<f64> = (1..=order)
                            .map(|q| if q <= phases.order() { phases.get(n, q) } else { 0.0 })
                            .collect();
                        SwcPulse::new(taper[n], weights.clone(), row)
                    })
                    .collect::<Result<Vec<_>>>()?;
                // SWC reference exploits q = 0..K
                let exploited: Vec<i64> = (0..=order as i64).collect();
                (grid_from_swc(&pulses, q_max)?, exploited)
            }
            ArchitectureSection::Ssb => {
                if plan.is_empty() {
                    return Err(TmaError::config("ssb architecture needs a beams section"));
                }
                let pulses = ssb_pulses_for_plan(&geometry, &plan, &taper)?;
                let mut exploited: Vec<i64> =
                    plan.beams().iter().map(|&(q, _)| q as i64).collect();
                exploited.sort_unstable();
                (grid_from_ssb(&pulses, q_max)?, exploited)
            }
        };

        Ok(BuiltConfig {
            geometry,
            taper,
            plan,
            grid,
            exploited,
            analysis: self.analysis.clone(),
            kind: self.architecture_name(),
        })
    }

    pub fn architecture_name(&self) -> &'static str {
        match self.architecture {
            ArchitectureSection::Rect { .. } => "rect",
            ArchitectureSection::Swc { .. } => "swc",
            ArchitectureSection::Ssb => "ssb",
        }
    }
}

/// A run config resolved into concrete objects.
#[derive(Debug, Clone)]
pub struct BuiltConfig {
    pub geometry: ArrayGeometry,
    pub taper: Vec<f64>,
    pub plan: BeamPlan,
    pub grid: ExcitationGrid,
    /// Useful harmonic set for the efficiency quotient.
    pub exploited: Vec<i64>,
    pub analysis: AnalysisSection,
    pub kind: &'static str,
}

impl BuiltConfig {
    /// Beams reported by metrics/compare: every exploited harmonic with its
    /// target angle (planned angle, or 90 degrees for the fundamental).
    pub fn reported_beams(&self) -> Vec<(i64, f64)> {
        self.exploited
            .iter()
            .map(|&q| {
                let target = if q == 0 {
                    90.0
                } else {
                    self.plan.target(q as usize).unwrap_or(90.0)
                };
                (q, target)
            })
            .collect()
    }

    /// Harmonics listed in pattern sweeps: the exploited set, plus the
    /// specular mirrors for real-pulse grids.
    pub fn pattern_harmonics(&self) -> Vec<i64> {
        let mut qs: Vec<i64> = self.exploited.clone();
        if self.kind != "ssb" {
            for &q in &self.exploited {
                if q != 0 {
                    qs.push(-q);
                }
            }
        }
        qs.sort_unstable();
        qs.dedup();
        qs
    }
}

// --- scene files ---

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneModulationSection {
    pub kind: String,
    #[serde(default)]
    pub delays: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_sample_rate")]
    pub sample_rate: usize,
    #[serde(default = "default_duration")]
    pub duration: usize,
}

fn default_sample_rate() -> usize {
    64
}

fn default_duration() -> usize {
    128
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            sample_rate: default_sample_rate(),
            duration: default_duration(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneEntry {
    pub freq: f64,
    #[serde(default = "one")]
    pub amp_re: f64,
    #[serde(default)]
    pub amp_im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamEntry {
    pub theta_deg: f64,
    pub target_q: usize,
    #[serde(default = "default_stream_kind")]
    pub kind: String,
    #[serde(default = "one")]
    pub amp_re: f64,
    #[serde(default)]
    pub amp_im: f64,
    #[serde(default)]
    pub tones: Vec<ToneEntry>,
}

fn default_stream_kind() -> String {
    "cw".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub geometry: GeometrySection,
    pub taper: TaperSection,
    pub modulation: SceneModulationSection,
    #[serde(default)]
    pub beams: Vec<BeamEntry>,
    #[serde(default)]
    pub sim: SimSection,
    pub streams: Vec<StreamEntry>,
}

impl SceneConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TmaError::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| TmaError::config(format!("{}: {e}", path.display())))
    }

    pub fn build(&self) -> Result<Scene> {
        let geometry = ArrayGeometry::uniform(self.geometry.n_elements, self.geometry.spacing)?;
        let taper = self.taper.build(geometry.n_elements())?;
        let plan = BeamPlan::new(self.beams.iter().map(|b| (b.q, b.theta_deg)).collect())?;
        let l = plan.order().max(1);

        let modulation = match self.modulation.kind.as_str() {
            "ssb" => Modulation::Ssb(ssb_pulses_for_plan(&geometry, &plan, &taper)?),
            "rect" => {
                let pulses = match &self.modulation.delays {
                    Some(d) => {
                        if d.len() != geometry.n_elements() {
                            return Err(TmaError::config("delays length != element count"));
                        }
                        taper
                            .iter()
                            .zip(d)
                            .map(|(&xi, &delta)| RectPulse::new(xi, delta))
                            .collect::<Result<Vec<_>>>()?
                    }
                    None => match plan.beams().first() {
                        Some(&(_, theta)) => rect_pulses_steered(&geometry, &taper, theta)?,
                        None => taper
                            .iter()
                            .map(|&xi| RectPulse::new(xi, 0.0))
                            .collect::<Result<Vec<_>>>()?,
                    },
                };
                Modulation::Rect(pulses)
            }
            other => {
                return Err(TmaError::config(format!(
                    "unknown modulation kind '{other}' (expected rect | ssb)"
                )))
            }
        };

        let streams = self
            .streams
            .iter()
            .map(|s| {
                let baseband = match s.kind.as_str() {
                    "cw" => Baseband::Cw {
                        amp: Complex64::new(s.amp_re, s.amp_im),
                    },
                    "tones" => {
                        if s.tones.is_empty() {
                            return Err(TmaError::config("tones stream needs [[streams.tones]]"));
                        }
                        Baseband::Tones(
                            s.tones
                                .iter()
                                .map(|t| Tone {
                                    freq: t.freq,
                                    amp: Complex64::new(t.amp_re, t.amp_im),
                                })
                                .collect(),
                        )
                    }
                    other => {
                        return Err(TmaError::config(format!(
                            "unknown stream kind '{other}' (expected cw | tones)"
                        )))
                    }
                };
                Ok(Stream {
                    theta_deg: s.theta_deg,
                    baseband,
                    target_q: s.target_q,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let scene = Scene {
            geometry,
            modulation,
            streams,
            l,
            sample_rate: self.sim.sample_rate,
            duration: self.sim.duration,
        };
        scene.validate()?;
        Ok(scene)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SSB_TOML: &str = r#"
[geometry]
n_elements = 20
spacing = 0.5

[taper]
kind = "gaussian"
sigma = 0.6666666666666666

[architecture]
kind = "ssb"

[[beams]]
q = 1
theta_deg = 50.0

[[beams]]
q = 2
theta_deg = 90.0

[[beams]]
q = 3
theta_deg = 120.0
"#;

    #[test]
    fn parse_and_build_ssb_config() {
        let cfg: RunConfig = toml::from_str(SSB_TOML).unwrap();
        let built = cfg.build().unwrap();
        assert_eq!(built.kind, "ssb");
        assert_eq!(built.exploited, vec![1, 2, 3]);
        assert_eq!(built.grid.q_max(), 50);
        // amplitudes equal the taper on every exploited harmonic
        for n in 0..20 {
            for q in 1..=3i64 {
                assert!((built.grid.get(n, q).norm() - built.taper[n]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unknown_field_is_config_error() {
        let bad = SSB_TOML.replace("spacing", "spacinng");
        assert!(toml::from_str::<RunConfig>(&bad).is_err());
    }

    #[test]
    fn rect_without_beams_exploits_dc_only() {
        let cfg: RunConfig = toml::from_str(
            r#"
[geometry]
n_elements = 4
spacing = 0.5
[taper]
kind = "uniform"
value = 0.5
[architecture]
kind = "rect"
"#,
        )
        .unwrap();
        let built = cfg.build().unwrap();
        assert_eq!(built.exploited, vec![0]);
        assert_eq!(built.pattern_harmonics(), vec![0]);
    }

    #[test]
    fn scene_round_trip() {
        let cfg: SceneConfig = toml::from_str(
            r#"
[geometry]
n_elements = 2
spacing = 0.5
[taper]
kind = "uniform"
value = 1.0
[modulation]
kind = "ssb"
[[beams]]
q = 1
theta_deg = 90.0
[sim]
sample_rate = 64
duration = 4
[[streams]]
theta_deg = 90.0
target_q = 1
"#,
        )
        .unwrap();
        let scene = cfg.build().unwrap();
        assert_eq!(scene.n_samples(), 256);
        assert_eq!(scene.l, 1);
    }
}
