//! Shared value types and normalization conventions.
//!
//! Everything in this crate works in normalized units: the modulation period
//! `T_0` is 1 time unit, the fundamental `omega_0` is `2*pi` per time unit,
//! and the carrier is complex-baseband zero. Element positions are stored in
//! wavelengths, so the electrical phase of element `n` towards angle `theta`
//! is `2*pi * z_n * cos(theta)`.

use num_complex::Complex64;

use crate::error::{Result, TmaError};

/// Linear array along the z axis with isotropic elements. Positions are in
/// wavelengths and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<f64>,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(TmaError::invalid("geometry needs at least one element"));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(TmaError::invalid("element positions must be finite"));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TmaError::invalid(
                "element positions must be strictly increasing",
            ));
        }
        Ok(Self { positions })
    }

    /// Uniform geometry with `z_n = n * spacing` (spacing in wavelengths).
    pub fn uniform(n_elements: usize, spacing: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(TmaError::invalid("n_elements must be >= 1"));
        }
        if !(spacing > 0.0) {
            return Err(TmaError::invalid("spacing must be > 0"));
        }
        Ok(Self {
            positions: (0..n_elements).map(|n| n as f64 * spacing).collect(),
        })
    }

    pub fn n_elements(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Electrical phase `k * z_n * cos(theta)` in radians.
    pub fn phase_at(&self, n: usize, theta_deg: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.positions[n] * theta_deg.to_radians().cos()
    }
}

/// Harmonic band of an excitation grid: columns `q` range over `[-q_max, q_max]`
/// and `l` is the order of the highest exploited harmonic, `l <= q_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicBand {
    pub l: usize,
    pub q_max: usize,
}

impl HarmonicBand {
    pub fn new(l: usize, q_max: usize) -> Result<Self> {
        if l == 0 {
            return Err(TmaError::invalid("harmonic order L must be >= 1"));
        }
        if l > q_max {
            return Err(TmaError::invalid(format!(
                "L = {l} exceeds band limit Q = {q_max}"
            )));
        }
        Ok(Self { l, q_max })
    }
}

/// Which pulse family produced a grid. Determines the symmetry invariants
/// checked by [`ExcitationGrid::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Switched rectangular pulses: real waveform, conjugate-symmetric grid.
    Rect,
    /// Sum-of-weighted-cosines pulses: real waveform, conjugate-symmetric grid.
    Swc,
    /// Preprocessed single-sideband pulses: all power on q >= 1.
    Ssb,
}

/// Complex dynamic excitations `I_nq` over elements `n` (rows) and harmonics
/// `q in [-q_max, q_max]` (columns). Entry `(n, q)` equals the q-th Fourier
/// coefficient of element n's modulating waveform.
#[derive(Debug, Clone)]
pub struct ExcitationGrid {
    n_elements: usize,
    q_max: usize,
    provenance: Provenance,
    // row-major, column index = q + q_max
    data: Vec<Complex64>,
}

/// Outcome of [`ExcitationGrid::validate`]: worst-case deviations from the
/// structural invariants of each provenance, with the offending entry.
#[derive(Debug, Clone, Default)]
pub struct GridDiagnostics {
    /// Max |I_nq - conj(I_n(-q))| for real-pulse grids (rect, swc).
    pub conjugate_symmetry_deviation: f64,
    /// Max |I_nq| over q <= 0 for ssb grids.
    pub negative_band_magnitude: f64,
    /// Max |I_nq| over the whole grid.
    pub max_magnitude: f64,
    /// Entry (n, q) realizing the worst deviation, if any deviation is nonzero.
    pub worst_entry: Option<(usize, i64)>,
    /// Entries that are NaN or infinite.
    pub non_finite_entries: Vec<(usize, i64)>,
}

impl GridDiagnostics {
    pub fn is_clean(&self, tol: f64) -> bool {
        self.conjugate_symmetry_deviation <= tol
            && self.negative_band_magnitude <= tol
            && self.non_finite_entries.is_empty()
    }
}

impl ExcitationGrid {
    pub fn zeros(n_elements: usize, q_max: usize, provenance: Provenance) -> Result<Self> {
        if n_elements == 0 {
            return Err(TmaError::invalid("grid needs at least one element row"));
        }
        Ok(Self {
            n_elements,
            q_max,
            provenance,
            data: vec![Complex64::new(0.0, 0.0); n_elements * (2 * q_max + 1)],
        })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn contains_q(&self, q: i64) -> bool {
        q.unsigned_abs() as usize <= self.q_max
    }

    fn index(&self, n: usize, q: i64) -> usize {
        debug_assert!(n < self.n_elements && self.contains_q(q));
        n * (2 * self.q_max + 1) + (q + self.q_max as i64) as usize
    }

    pub fn get(&self, n: usize, q: i64) -> Complex64 {
        self.data[self.index(n, q)]
    }

    pub fn set(&mut self, n: usize, q: i64, value: Complex64) {
        let i = self.index(n, q);
        self.data[i] = value;
    }

    /// Column `q` over all elements.
    pub fn column(&self, q: i64) -> Vec<Complex64> {
        (0..self.n_elements).map(|n| self.get(n, q)).collect()
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// Diagnostic check of the per-provenance structural invariants. Never
    /// fails; the report carries worst-case deviation magnitudes.
    pub fn validate(&self) -> GridDiagnostics {
        let mut diag = GridDiagnostics::default();
        for n in 0..self.n_elements {
            for q in -(self.q_max as i64)..=(self.q_max as i64) {
                let v = self.get(n, q);
                if !v.re.is_finite() || !v.im.is_finite() {
                    diag.non_finite_entries.push((n, q));
                    continue;
                }
                diag.max_magnitude = diag.max_magnitude.max(v.norm());
                match self.provenance {
                    Provenance::Rect | Provenance::Swc => {
                        let dev = (v - self.get(n, -q).conj()).norm();
                        if dev > diag.conjugate_symmetry_deviation {
                            diag.conjugate_symmetry_deviation = dev;
                            diag.worst_entry = Some((n, q));
                        }
                    }
                    Provenance::Ssb => {
                        if q <= 0 && v.norm() > diag.negative_band_magnitude {
                            diag.negative_band_magnitude = v.norm();
                            diag.worst_entry = Some((n, q));
                        }
                    }
                }
            }
        }
        diag
    }
}
