//! Harmonic array factors and scalar figures of merit: power patterns,
//! sidelobe level, beamwidth, per-harmonic powers, efficiency, directivity,
//! and the specular-symmetry check.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Result, TmaError};
use crate::model::{ArrayGeometry, ExcitationGrid};

/// Complex array factor `F_q(theta) = sum_n I_nq exp(j k z_n cos(theta))`,
/// time factor excluded.
pub fn array_factor(
    grid: &ExcitationGrid,
    geometry: &ArrayGeometry,
    q: i64,
    theta_deg: f64,
) -> Result<Complex64> {
    if !grid.contains_q(q) {
        return Err(TmaError::invalid(format!(
            "harmonic {q} outside grid band [-{0}, {0}]",
            grid.q_max()
        )));
    }
    if grid.n_elements() != geometry.n_elements() {
        return Err(TmaError::invalid("grid/geometry element count mismatch"));
    }
    let c = theta_deg.to_radians().cos();
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, z) in geometry.positions().iter().enumerate() {
        acc += grid.get(n, q) * Complex64::from_polar(1.0, 2.0 * PI * z * c);
    }
    Ok(acc)
}

/// Evenly spaced angle grid covering [0, 180] degrees.
pub fn angle_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0 && step_deg <= 180.0) {
        return Err(TmaError::invalid("angle step must be in (0, 180]"));
    }
    let n = (180.0 / step_deg).round() as usize;
    Ok((0..=n).map(|i| 180.0 * i as f64 / n as f64).collect())
}

/// Sampled complex pattern of one harmonic on an angle grid.
#[derive(Debug, Clone)]
pub struct HarmonicPattern {
    pub q: i64,
    pub theta_deg: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl HarmonicPattern {
    /// Evaluate `F_q` over an angle grid; the per-angle map runs in parallel
    /// with a deterministic (index-ordered) gather.
    pub fn evaluate(
        grid: &ExcitationGrid,
        geometry: &ArrayGeometry,
        q: i64,
        theta_deg: &[f64],
    ) -> Result<Self> {
        if theta_deg.is_empty() {
            return Err(TmaError::invalid("empty angle grid"));
        }
        let values = theta_deg
            .par_iter()
            .map(|&t| array_factor(grid, geometry, q, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            q,
            theta_deg: theta_deg.to_vec(),
            values,
        })
    }

    pub fn power_linear(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn peak_power(&self) -> f64 {
        self.power_linear().into_iter().fold(0.0, f64::max)
    }
}

/// Power pattern in dB, `20 log10 |F_q|`. With `self_normalize` the maximum
/// maps to 0 dB; otherwise `reference` (linear field amplitude) is 0 dB.
/// All-zero columns come back as -inf everywhere rather than an error.
pub fn power_pattern(pattern: &HarmonicPattern, self_normalize: bool, reference: f64) -> Vec<f64> {
    let peak = if self_normalize {
        pattern.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else {
        reference
    };
    pattern
        .values
        .iter()
        .map(|v| {
            if v.norm() == 0.0 || peak == 0.0 {
                f64::NEG_INFINITY
            } else {
                20.0 * (v.norm() / peak).log10()
            }
        })
        .collect()
}

/// Mean received power per harmonic, `p_q = sum_n |I_nq|^2`, over the whole
/// stored band. Keys are harmonic orders.
pub fn harmonic_powers(grid: &ExcitationGrid) -> BTreeMap<i64, f64> {
    let mut map = BTreeMap::new();
    for q in -(grid.q_max() as i64)..=(grid.q_max() as i64) {
        let p: f64 = (0..grid.n_elements()).map(|n| grid.get(n, q).norm_sqr()).sum();
        map.insert(q, p);
    }
    map
}

/// Sideband radiation efficiency `eta = sum_{q in useful} p_q / sum_q p_q`.
pub fn efficiency(powers: &BTreeMap<i64, f64>, useful: &[i64]) -> Result<f64> {
    let total: f64 = powers.values().sum();
    if total <= 0.0 {
        return Err(TmaError::numeric("efficiency undefined: zero total power"));
    }
    let useful_power: f64 = useful
        .iter()
        .map(|q| powers.get(q).copied().unwrap_or(0.0))
        .sum();
    Ok(useful_power / total)
}

/// Denominator convention for [`directivity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectivityMode {
    /// Mean intensity of the selected harmonic pattern only.
    PatternOnly,
    /// Mean intensity summed over every harmonic in the grid band
    /// (sideband losses included).
    TotalPower,
}

/// Composite Simpson of `f(theta) sin(theta)` over [0, pi] on `points` nodes
/// (forced odd, >= 2001 by callers).
fn simpson_sin_weighted<F: Fn(f64) -> f64 + Sync>(f: F, points: usize) -> f64 {
    let n = if points % 2 == 1 { points } else { points + 1 };
    let h = PI / (n - 1) as f64;
    let eval = |i: usize| {
        let th = i as f64 * h;
        f(th) * th.sin()
    };
    let body: f64 = (1..n - 1)
        .into_par_iter()
        .map(|i| if i % 2 == 1 { 4.0 * eval(i) } else { 2.0 * eval(i) })
        .sum();
    (eval(0) + body + eval(n - 1)) * h / 3.0
}

fn pattern_integral(
    grid: &ExcitationGrid,
    geometry: &ArrayGeometry,
    q: i64,
    points: usize,
) -> f64 {
    simpson_sin_weighted(
        |th| {
            array_factor(grid, geometry, q, th.to_degrees())
                .map(|v| v.norm_sqr())
                .unwrap_or(0.0)
        },
        points,
    )
}

/// Directivity of harmonic `q` towards `theta0` in dBi:
/// `D = 2 |F_q(theta0)|^2 / integral(|F|^2 sin(theta))`, the integral taken
/// over one harmonic (pattern-only) or the whole band (total-power).
pub fn directivity(
    grid: &ExcitationGrid,
    geometry: &ArrayGeometry,
    q: i64,
    theta0_deg: f64,
    mode: DirectivityMode,
    points: usize,
) -> Result<f64> {
    let points = points.max(2001);
    let peak = array_factor(grid, geometry, q, theta0_deg)?.norm_sqr();
    if peak <= 0.0 {
        return Err(TmaError::invalid(format!(
            "directivity undefined: |F_{q}({theta0_deg} deg)| = 0"
        )));
    }
    let denom = match mode {
        DirectivityMode::PatternOnly => pattern_integral(grid, geometry, q, points),
        DirectivityMode::TotalPower => (-(grid.q_max() as i64)..=(grid.q_max() as i64))
            .map(|qq| pattern_integral(grid, geometry, qq, points))
            .sum(),
    };
    if denom <= 0.0 {
        return Err(TmaError::numeric("directivity denominator is zero"));
    }
    Ok(10.0 * (2.0 * peak / denom).log10())
}

/// Scalar shape descriptors of one harmonic pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternStats {
    /// Peak angle in degrees, parabolic refinement on the power pattern.
    pub peak_deg: f64,
    /// Highest local maximum outside the main lobe, dB relative to the peak.
    /// Absent when the pattern has no sidelobe (single element).
    pub sll_db: Option<f64>,
    /// -3 dB beamwidth in degrees by linear interpolation of the crossings.
    pub beamwidth_deg: Option<f64>,
}

/// Peak, sidelobe level, and -3 dB beamwidth of a sampled pattern.
pub fn pattern_stats(pattern: &HarmonicPattern) -> Result<PatternStats> {
    let p = pattern.power_linear();
    let th = &pattern.theta_deg;
    let peak_val = p.iter().cloned().fold(0.0, f64::max);
    if peak_val <= 0.0 {
        return Err(TmaError::invalid("pattern_stats needs a nonzero pattern"));
    }
    let i_peak = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    // parabolic refinement around the grid argmax
    let peak_deg = if i_peak > 0 && i_peak + 1 < p.len() {
        let (y0, y1, y2) = (p[i_peak - 1], p[i_peak], p[i_peak + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        if denom.abs() > 0.0 {
            let delta = 0.5 * (y0 - y2) / denom;
            th[i_peak] + delta.clamp(-1.0, 1.0) * (th[i_peak + 1] - th[i_peak])
        } else {
            th[i_peak]
        }
    } else {
        th[i_peak]
    };

    // main lobe extent: walk to the first local minimum on each side
    let mut lo = i_peak;
    while lo > 0 && p[lo - 1] < p[lo] {
        lo -= 1;
    }
    let mut hi = i_peak;
    while hi + 1 < p.len() && p[hi + 1] < p[hi] {
        hi += 1;
    }

    // highest local maximum outside [lo, hi]; samples at the peak level
    // (flat pattern) are not sidelobes
    let below_peak = |v: f64| v > 0.0 && v < peak_val * (1.0 - 1e-9);
    let mut sll: Option<f64> = None;
    for i in 1..p.len() - 1 {
        if i >= lo && i <= hi {
            continue;
        }
        if p[i] >= p[i - 1] && p[i] >= p[i + 1] && below_peak(p[i]) {
            let level = 10.0 * (p[i] / peak_val).log10();
            sll = Some(sll.map_or(level, |s: f64| s.max(level)));
        }
    }
    // boundary samples count as sidelobe candidates outside the main lobe
    for &i in &[0, p.len() - 1] {
        if (i < lo || i > hi) && below_peak(p[i]) {
            let level = 10.0 * (p[i] / peak_val).log10();
            sll = Some(sll.map_or(level, |s: f64| s.max(level)));
        }
    }

    // -3 dB crossings by linear interpolation on the power pattern
    let half = peak_val * 10f64.powf(-3.0 / 10.0);
    let cross = |i0: usize, i1: usize| -> f64 {
        let (p0, p1) = (p[i0], p[i1]);
        let f = (half - p0) / (p1 - p0);
        th[i0] + f * (th[i1] - th[i0])
    };
    let mut left = None;
    let mut i = i_peak;
    while i > 0 {
        if p[i - 1] < half && p[i] >= half {
            left = Some(cross(i - 1, i));
            break;
        }
        i -= 1;
    }
    let mut right = None;
    let mut i = i_peak;
    while i + 1 < p.len() {
        if p[i + 1] < half && p[i] >= half {
            right = Some(cross(i + 1, i));
            break;
        }
        i += 1;
    }
    let beamwidth = match (left, right) {
        (Some(l), Some(r)) => Some((r - l).abs()),
        _ => None,
    };

    Ok(PatternStats {
        peak_deg,
        sll_db: sll,
        beamwidth_deg: beamwidth,
    })
}

/// Max over the angle grid of `| |F_q(theta)|^2 - |F_{-q}(180 - theta)|^2 |`.
/// Zero (to machine precision) for grids built from real pulses.
pub fn specular_deviation(
    grid: &ExcitationGrid,
    geometry: &ArrayGeometry,
    q: i64,
    theta_deg: &[f64],
) -> Result<f64> {
    if !grid.contains_q(q) || !grid.contains_q(-q) {
        return Err(TmaError::invalid("both +q and -q must lie in the band"));
    }
    let dev = theta_deg
        .par_iter()
        .map(|&t| {
            let a = array_factor(grid, geometry, q, t)?.norm_sqr();
            let b = array_factor(grid, geometry, -q, 180.0 - t)?.norm_sqr();
            Ok((a - b).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(dev.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Provenance;
    use crate::pulse::{RectPulse, SsbPulse};
    use crate::synthesis::{grid_from_rect, grid_from_ssb};

    fn uniform_grid(n: usize) -> (ExcitationGrid, ArrayGeometry) {
        let mut grid = ExcitationGrid::zeros(n, 1, Provenance::Ssb).unwrap();
        for i in 0..n {
            grid.set(i, 1, Complex64::new(1.0, 0.0));
        }
        (grid, ArrayGeometry::uniform(n, 0.5).unwrap())
    }

    #[test]
    fn broadside_coherent_sum() {
        let (grid, geom) = uniform_grid(20);
        let f = array_factor(&grid, &geom, 1, 90.0).unwrap();
        assert!((f - Complex64::new(20.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn single_element_identity() {
        let mut grid = ExcitationGrid::zeros(1, 1, Provenance::Ssb).unwrap();
        grid.set(0, 1, Complex64::new(0.3, 0.4));
        let geom = ArrayGeometry::uniform(1, 0.5).unwrap();
        for theta in [0.0, 45.0, 90.0, 133.0] {
            let f = array_factor(&grid, &geom, 1, theta).unwrap();
            assert!((f - Complex64::new(0.3, 0.4)).norm() < 1e-12);
        }
    }

    #[test]
    fn two_element_endfire_null() {
        let (grid, geom) = uniform_grid(2);
        // in-phase lambda/2 pair: phases 0 and pi at endfire, exact null
        let f = array_factor(&grid, &geom, 1, 0.0).unwrap();
        assert!(f.norm() < 1e-9);
    }

    #[test]
    fn out_of_band_is_error() {
        let (grid, geom) = uniform_grid(2);
        assert!(array_factor(&grid, &geom, 2, 90.0).is_err());
    }

    #[test]
    fn uniform_broadside_sll_and_peak() {
        let (grid, geom) = uniform_grid(20);
        let th = angle_grid(0.01).unwrap();
        let pat = HarmonicPattern::evaluate(&grid, &geom, 1, &th).unwrap();
        let stats = pattern_stats(&pat).unwrap();
        assert!((stats.peak_deg - 90.0).abs() < 1e-6);
        // classic uniform-array first sidelobe, frozen from a dense sweep
        let sll = stats.sll_db.unwrap();
        assert!((sll - (-13.2)).abs() < 0.1, "sll = {sll}");
        assert!(stats.beamwidth_deg.is_some());
    }

    #[test]
    fn power_pattern_normalization_and_zero_column() {
        let (grid, geom) = uniform_grid(4);
        let th = angle_grid(1.0).unwrap();
        let pat = HarmonicPattern::evaluate(&grid, &geom, 1, &th).unwrap();
        let db = power_pattern(&pat, true, 1.0);
        let max = db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - 0.0).abs() < 1e-12);

        let zero = HarmonicPattern::evaluate(&grid, &geom, -1, &th).unwrap();
        let db = power_pattern(&zero, true, 1.0);
        assert!(db.iter().all(|v| v.is_infinite() && *v < 0.0));
    }

    #[test]
    fn harmonic_powers_ssb_comb() {
        let pulses = vec![SsbPulse::new(1.0, vec![0.0, 0.0, 0.0]).unwrap(); 20];
        let grid = grid_from_ssb(&pulses, 5).unwrap();
        let p = harmonic_powers(&grid);
        for q in 1..=3 {
            assert!((p[&q] - 20.0).abs() < 1e-12);
        }
        let rest: f64 = p
            .iter()
            .filter(|(q, _)| !(1..=3).contains(*q))
            .map(|(_, v)| v)
            .sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn harmonic_powers_parseval_and_symmetry() {
        let pulses = vec![RectPulse::new(0.5, 0.3).unwrap()];
        let grid = grid_from_rect(&pulses, 10_000).unwrap();
        let p = harmonic_powers(&grid);
        let total: f64 = p.values().sum();
        assert!((total - 0.5).abs() < 1e-3);
        for q in 1..=10i64 {
            assert!((p[&q] - p[&(-q)]).abs() < 1e-15);
        }
    }

    #[test]
    fn efficiency_cases() {
        let pulses = vec![SsbPulse::new(0.7, vec![0.1, 0.2, 0.3]).unwrap(); 5];
        let grid = grid_from_ssb(&pulses, 10).unwrap();
        let eta = efficiency(&harmonic_powers(&grid), &[1, 2, 3]).unwrap();
        assert!((eta - 1.0).abs() < 1e-12);

        // rect xi = 0.5, useful {0}: p_0 = xi^2, total -> xi
        let grid = grid_from_rect(&[RectPulse::new(0.5, 0.0).unwrap()], 10_000).unwrap();
        let eta = efficiency(&harmonic_powers(&grid), &[0]).unwrap();
        assert!((eta - 0.5).abs() < 1e-3);

        // SWC paper weights: p_q equal over q = -2..2, useful {0,1,2} -> 3/5
        let p = crate::pulse::SwcPulse::new(1.0, vec![0.1, 0.2, 0.2], vec![0.0, 0.0]).unwrap();
        let grid = crate::synthesis::grid_from_swc(&[p], 5).unwrap();
        let eta = efficiency(&harmonic_powers(&grid), &[0, 1, 2]).unwrap();
        assert!((eta - 0.6).abs() < 1e-12);

        let empty = ExcitationGrid::zeros(2, 2, Provenance::Rect).unwrap();
        assert!(efficiency(&harmonic_powers(&empty), &[0]).is_err());
    }

    #[test]
    fn directivity_uniform_broadside() {
        let (grid, geom) = uniform_grid(20);
        let d = directivity(&grid, &geom, 1, 90.0, DirectivityMode::PatternOnly, 2001).unwrap();
        assert!((d - 10.0 * 20f64.log10()).abs() < 0.05, "d = {d}");

        let d2 = directivity(&grid, &geom, 1, 90.0, DirectivityMode::PatternOnly, 4001).unwrap();
        assert!((d - d2).abs() < 0.01);
    }

    #[test]
    fn directivity_single_element_isotropic() {
        let (grid, geom) = uniform_grid(1);
        let d = directivity(&grid, &geom, 1, 42.0, DirectivityMode::PatternOnly, 2001).unwrap();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn single_element_stats_have_no_lobes() {
        let (grid, geom) = uniform_grid(1);
        let th = angle_grid(0.5).unwrap();
        let pat = HarmonicPattern::evaluate(&grid, &geom, 1, &th).unwrap();
        let stats = pattern_stats(&pat).unwrap();
        assert!(stats.sll_db.is_none());
        assert!(stats.beamwidth_deg.is_none());
    }

    #[test]
    fn specular_symmetry_rect_and_ssb() {
        let pulses: Vec<_> = (0..8)
            .map(|n| RectPulse::new(0.4, (n as f64 * 0.13).rem_euclid(1.0)).unwrap())
            .collect();
        let grid = grid_from_rect(&pulses, 3).unwrap();
        let geom = ArrayGeometry::uniform(8, 0.5).unwrap();
        let th = angle_grid(0.1).unwrap();
        for q in 1..=3 {
            assert!(specular_deviation(&grid, &geom, q, &th).unwrap() < 1e-10);
        }

        let pulses = vec![SsbPulse::new(1.0, vec![0.0]).unwrap(); 8];
        let grid = grid_from_ssb(&pulses, 1).unwrap();
        let dev = specular_deviation(&grid, &geom, 1, &th).unwrap();
        let peak = HarmonicPattern::evaluate(&grid, &geom, 1, &th)
            .unwrap()
            .peak_power();
        assert!((dev - peak).abs() < 1e-9);
    }
}
