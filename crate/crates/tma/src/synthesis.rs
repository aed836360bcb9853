//! Excitation grid construction and beam-plan synthesis: tapers, steering
//! phases, delay schedules, and the per-architecture grid builders.

use std::f64::consts::PI;

use crate::error::{Result, TmaError};
use crate::model::{ArrayGeometry, ExcitationGrid, Provenance};
use crate::pulse::{wrap_phase, RectPulse, SsbPulse, SwcPulse};

/// Steering plan: distinct harmonic orders `q in [1, L]`, each with a target
/// angle in the open interval (0, 180) degrees. Endfire is excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPlan {
    beams: Vec<(usize, f64)>,
}

impl BeamPlan {
    pub fn new(beams: Vec<(usize, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(q, theta) in &beams {
            if q == 0 {
                return Err(TmaError::invalid(
                    "beam plan harmonics must be >= 1 (the fundamental cannot steer)",
                ));
            }
            if !seen.insert(q) {
                return Err(TmaError::invalid(format!("duplicate harmonic {q} in plan")));
            }
            if !(theta > 0.0 && theta < 180.0) {
                return Err(TmaError::invalid(format!(
                    "target angle {theta} deg outside (0, 180)"
                )));
            }
        }
        Ok(Self { beams })
    }

    pub fn beams(&self) -> &[(usize, f64)] {
        &self.beams
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    /// Highest planned harmonic order, 0 when the plan is empty.
    pub fn order(&self) -> usize {
        self.beams.iter().map(|&(q, _)| q).max().unwrap_or(0)
    }

    pub fn target(&self, q: usize) -> Option<f64> {
        self.beams.iter().find(|&&(b, _)| b == q).map(|&(_, t)| t)
    }
}

/// Per-element, per-harmonic phases `Phi_nq` for `q in [1, l]`, wrapped to
/// `(-pi, pi]`. Columns for unplanned harmonics are zero.
#[derive(Debug, Clone)]
pub struct PhaseMatrix {
    n_elements: usize,
    l: usize,
    data: Vec<f64>,
}

impl PhaseMatrix {
    pub fn zeros(n_elements: usize, l: usize) -> Self {
        Self {
            n_elements,
            l,
            data: vec![0.0; n_elements * l],
        }
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn order(&self) -> usize {
        self.l
    }

    pub fn get(&self, n: usize, q: usize) -> f64 {
        assert!((1..=self.l).contains(&q));
        self.data[n * self.l + (q - 1)]
    }

    pub fn set(&mut self, n: usize, q: usize, phi: f64) {
        assert!((1..=self.l).contains(&q));
        self.data[n * self.l + (q - 1)] = wrap_phase(phi);
    }

    /// Row `n` as Phi_1..Phi_l, the layout [`SsbPulse`] consumes.
    pub fn row(&self, n: usize) -> Vec<f64> {
        (1..=self.l).map(|q| self.get(n, q)).collect()
    }
}

/// Steering phases for a beam plan: `Phi_nq = 2 pi z_n cos(theta_q)` so the
/// q-th harmonic pattern of an SSB grid peaks at `theta_q`.
pub fn steering_phases(geometry: &ArrayGeometry, plan: &BeamPlan) -> PhaseMatrix {
    let l = plan.order().max(1);
    let mut m = PhaseMatrix::zeros(geometry.n_elements(), l);
    for &(q, theta) in plan.beams() {
        let c = theta.to_radians().cos();
        for (n, z) in geometry.positions().iter().enumerate() {
            m.set(n, q, 2.0 * PI * z * c);
        }
    }
    m
}

/// Convert a phase schedule to per-harmonic time delays `delta_nq` in `T_0`
/// units, the canonical representative in `[0, 1/q)`. Round trip:
/// `q * 2 pi * delta_nq == Phi_nq (mod 2 pi)`.
pub fn delays_from_phases(phases: &PhaseMatrix) -> Vec<Vec<f64>> {
    (0..phases.n_elements())
        .map(|n| {
            (1..=phases.order())
                .map(|q| (phases.get(n, q) / (2.0 * PI * q as f64)).rem_euclid(1.0 / q as f64))
                .collect()
        })
        .collect()
}

/// Inverse of [`delays_from_phases`], for round-trip checks.
pub fn phases_from_delays(delays: &[Vec<f64>]) -> PhaseMatrix {
    let l = delays.first().map(|d| d.len()).unwrap_or(0);
    let mut m = PhaseMatrix::zeros(delays.len(), l.max(1));
    for (n, row) in delays.iter().enumerate() {
        for (i, d) in row.iter().enumerate() {
            let q = i + 1;
            m.set(n, q, 2.0 * PI * q as f64 * d);
        }
    }
    m
}

/// Normalized Gaussian taper: element index mapped affinely onto [-1, 1],
/// `xi_n = exp(-x_n^2 / (2 sigma^2))`, peak 1 at the aperture center.
pub fn gaussian_taper(n_elements: usize, sigma: f64) -> Result<Vec<f64>> {
    if n_elements == 0 {
        return Err(TmaError::invalid("taper needs at least one element"));
    }
    if !(sigma > 0.0) {
        return Err(TmaError::invalid("sigma must be > 0"));
    }
    if n_elements == 1 {
        return Ok(vec![1.0]);
    }
    let den = (n_elements - 1) as f64;
    Ok((0..n_elements)
        .map(|n| {
            let x = (2.0 * n as f64 - den) / den;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect())
}

/// DC component of a rectangular pulse, `G_0 = xi` (delay-invariant).
pub fn dc_extract(pulse: &RectPulse) -> f64 {
    pulse.coeff(0).re
}

/// Grid of a switched rectangular-pulse array: `I_nq = G_nq` for `|q| <= q_max`.
pub fn grid_from_rect(pulses: &[RectPulse], q_max: usize) -> Result<ExcitationGrid> {
    let mut grid = ExcitationGrid::zeros(pulses.len(), q_max, Provenance::Rect)?;
    for (n, p) in pulses.iter().enumerate() {
        for q in -(q_max as i64)..=(q_max as i64) {
            grid.set(n, q, p.coeff(q));
        }
    }
    Ok(grid)
}

/// Grid of an SWC-pulse array: conjugate-symmetric, zero beyond the pulse order.
pub fn grid_from_swc(pulses: &[SwcPulse], q_max: usize) -> Result<ExcitationGrid> {
    if let Some(p) = pulses.iter().find(|p| p.order() > q_max) {
        return Err(TmaError::invalid(format!(
            "swc pulse order {} exceeds band limit {q_max}",
            p.order()
        )));
    }
    let mut grid = ExcitationGrid::zeros(pulses.len(), q_max, Provenance::Swc)?;
    for (n, p) in pulses.iter().enumerate() {
        for q in -(q_max as i64)..=(q_max as i64) {
            grid.set(n, q, p.coeff(q));
        }
    }
    Ok(grid)
}

/// Grid of the preprocessed SSB array: `I_nq = xi_n exp(-j Phi_nq)` on
/// `q in [1, L]`, exactly zero everywhere else including the whole q <= 0 band.
pub fn grid_from_ssb(pulses: &[SsbPulse], q_max: usize) -> Result<ExcitationGrid> {
    if let Some(p) = pulses.iter().find(|p| p.order() > q_max) {
        return Err(TmaError::invalid(format!(
            "ssb order {} exceeds band limit {q_max}",
            p.order()
        )));
    }
    let mut grid = ExcitationGrid::zeros(pulses.len(), q_max, Provenance::Ssb)?;
    for (n, p) in pulses.iter().enumerate() {
        for q in 1..=(q_max as i64) {
            grid.set(n, q, p.coeff(q));
        }
    }
    Ok(grid)
}

/// SSB pulses realizing a beam plan: taper amplitudes, steering phases.
/// Unplanned harmonics get no carrier (zero grid amplitude).
pub fn ssb_pulses_for_plan(
    geometry: &ArrayGeometry,
    plan: &BeamPlan,
    taper: &[f64],
) -> Result<Vec<SsbPulse>> {
    if taper.len() != geometry.n_elements() {
        return Err(TmaError::invalid("taper length must match element count"));
    }
    if plan.is_empty() {
        return Err(TmaError::invalid("ssb synthesis needs at least one beam"));
    }
    let phases = steering_phases(geometry, plan);
    let mut orders: Vec<usize> = plan.beams().iter().map(|&(q, _)| q).collect();
    orders.sort_unstable();
    (0..geometry.n_elements())
        .map(|n| {
            let terms = orders.iter().map(|&q| (q, phases.get(n, q))).collect();
            SsbPulse::with_terms(taper[n], terms)
        })
        .collect()
}

/// Rectangular pulses steering the first harmonic towards `theta_deg`:
/// `delta_n = z_n cos(theta) - xi_n / 2 (mod 1)`, so `arg G_n1` aligns the
/// q = 1 beam. Higher harmonics follow the phase-proportionality law.
pub fn rect_pulses_steered(
    geometry: &ArrayGeometry,
    taper: &[f64],
    theta_deg: f64,
) -> Result<Vec<RectPulse>> {
    if taper.len() != geometry.n_elements() {
        return Err(TmaError::invalid("taper length must match element count"));
    }
    let c = theta_deg.to_radians().cos();
    geometry
        .positions()
        .iter()
        .zip(taper)
        .map(|(z, &xi)| RectPulse::new(xi, (z * c - xi / 2.0).rem_euclid(1.0)))
        .collect()
}
