//! Periodic modulating waveforms of the three architectures and their
//! Fourier series coefficients, plus brute-force spectral oracles.
//!
//! All waveforms have period 1 (times in `T_0` units). The q-th Fourier
//! coefficient is `integral over one period of w(t) * exp(-j*2*pi*q*t) dt`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Result, TmaError};

/// `sin(pi x) / (pi x)`, 1 at x = 0.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = phi.rem_euclid(two_pi);
    if w > PI {
        w -= two_pi;
    }
    w
}

/// Periodic rectangular switch pulse: 1 on `[delay, delay + xi)` modulo 1,
/// 0 elsewhere. `xi` is the duty cycle `tau/T_0`, `delay` is `delta/T_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectPulse {
    xi: f64,
    delay: f64,
}

impl RectPulse {
    pub fn new(xi: f64, delay: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) || !xi.is_finite() {
            return Err(TmaError::invalid(format!("duty cycle {xi} outside [0, 1]")));
        }
        if !(0.0..1.0).contains(&delay) || !delay.is_finite() {
            return Err(TmaError::invalid(format!("delay {delay} outside [0, 1)")));
        }
        Ok(Self { xi, delay })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Waveform value in {0, 1}; handles the wraparound case
    /// `delay + xi > 1`.
    pub fn waveform(&self, t: f64) -> f64 {
        let u = (t - self.delay).rem_euclid(1.0);
        if u < self.xi {
            1.0
        } else {
            0.0
        }
    }

    /// Closed-form Fourier coefficient
    /// `G_q = xi * sinc(q xi) * exp(-j 2 pi q (delay + xi/2))`.
    /// At q = 0 this is exactly the duty cycle.
    pub fn coeff(&self, q: i64) -> Complex64 {
        if q == 0 {
            return Complex64::new(self.xi, 0.0);
        }
        let qf = q as f64;
        let mag = self.xi * sinc(qf * self.xi);
        let phase = -2.0 * PI * qf * (self.delay + self.xi / 2.0);
        Complex64::from_polar(mag, phase)
    }
}

/// Sum-of-weighted-cosines pulse for one element:
/// `w(t) = xi * sum_{k=0..L} a_k cos(2 pi k t - Phi_k)` with `Phi_0 = 0`.
/// Its harmonic coefficients are `I_0 = xi a_0` and
/// `I_{+-k} = xi (a_k / 2) exp(-+ j Phi_k)`, zero beyond `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwcPulse {
    xi: f64,
    /// a_0..a_L, nonnegative.
    weights: Vec<f64>,
    /// Phi_1..Phi_L (radians); Phi_0 is fixed to zero.
    phases: Vec<f64>,
}

impl SwcPulse {
    pub fn new(xi: f64, weights: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(TmaError::invalid(format!("taper {xi} outside [0, 1]")));
        }
        if weights.is_empty() {
            return Err(TmaError::invalid("swc weights a_0..a_L must be nonempty"));
        }
        if weights.iter().any(|a| *a < 0.0 || !a.is_finite()) {
            return Err(TmaError::invalid("swc weights must be finite and >= 0"));
        }
        if phases.len() != weights.len() - 1 {
            return Err(TmaError::invalid(format!(
                "expected {} harmonic phases, got {}",
                weights.len() - 1,
                phases.len()
            )));
        }
        Ok(Self {
            xi,
            weights,
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn waveform(&self, t: f64) -> f64 {
        let mut acc = self.weights[0];
        for k in 1..self.weights.len() {
            acc += self.weights[k] * (2.0 * PI * k as f64 * t - self.phases[k - 1]).cos();
        }
        self.xi * acc
    }

    pub fn coeff(&self, q: i64) -> Complex64 {
        let k = q.unsigned_abs() as usize;
        if k > self.order() {
            return Complex64::new(0.0, 0.0);
        }
        if k == 0 {
            return Complex64::new(self.xi * self.weights[0], 0.0);
        }
        let phase = if q > 0 {
            -self.phases[k - 1]
        } else {
            self.phases[k - 1]
        };
        Complex64::from_polar(self.xi * self.weights[k] / 2.0, phase)
    }
}

/// Preprocessed single-sideband pulse pair for one element. The taper `xi`
/// is the duty cycle of the rectangular pulse whose DC is extracted;
/// `terms` lists the generated carriers as `(q, Phi_q)` with distinct
/// `q >= 1`. A plan that skips a harmonic simply omits its carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SsbPulse {
    xi: f64,
    terms: Vec<(usize, f64)>,
}

impl SsbPulse {
    /// Full comb over `q = 1..=L` with `phases[q-1] = Phi_q`.
    pub fn new(xi: f64, phases: Vec<f64>) -> Result<Self> {
        let terms = phases
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i + 1, p))
            .collect();
        Self::with_terms(xi, terms)
    }

    /// Sparse comb over explicit harmonic orders.
    pub fn with_terms(xi: f64, terms: Vec<(usize, f64)>) -> Result<Self> {
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(TmaError::invalid(format!("taper {xi} outside (0, 1]")));
        }
        if terms.is_empty() {
            return Err(TmaError::invalid("ssb pulse needs at least one harmonic"));
        }
        let mut seen = std::collections::HashSet::new();
        for &(q, phi) in &terms {
            if q == 0 {
                return Err(TmaError::invalid("ssb carriers start at q = 1"));
            }
            if !seen.insert(q) {
                return Err(TmaError::invalid(format!("duplicate ssb carrier {q}")));
            }
            if !phi.is_finite() {
                return Err(TmaError::invalid("ssb phases must be finite"));
            }
        }
        let mut terms: Vec<(usize, f64)> =
            terms.into_iter().map(|(q, p)| (q, wrap_phase(p))).collect();
        terms.sort_by_key(|&(q, _)| q);
        Ok(Self { xi, terms })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Order of the highest generated carrier.
    pub fn order(&self) -> usize {
        self.terms.last().map(|&(q, _)| q).unwrap_or(0)
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    /// Quadrature branch pair
    /// `r_cos = xi sum_q cos(2 pi q t - Phi_q)`,
    /// `r_sin = xi sum_q sin(2 pi q t - Phi_q)`.
    pub fn waveforms(&self, t: f64) -> (f64, f64) {
        let mut c = 0.0;
        let mut s = 0.0;
        for &(q, phi) in &self.terms {
            let arg = 2.0 * PI * q as f64 * t - phi;
            c += arg.cos();
            s += arg.sin();
        }
        (self.xi * c, self.xi * s)
    }

    /// The complex modulating waveform `r_cos + j r_sin`, an analytic comb
    /// `xi sum_q exp(j(2 pi q t - Phi_q))`.
    pub fn complex_waveform(&self, t: f64) -> Complex64 {
        let (c, s) = self.waveforms(t);
        Complex64::new(c, s)
    }

    /// Harmonic coefficient of the complex waveform: `xi exp(-j Phi_q)` on
    /// the generated carriers, zero elsewhere (including the whole band
    /// q <= 0).
    pub fn coeff(&self, q: i64) -> Complex64 {
        if q < 1 {
            return Complex64::new(0.0, 0.0);
        }
        match self.terms.iter().find(|&&(tq, _)| tq == q as usize) {
            Some(&(_, phi)) => Complex64::from_polar(self.xi, -phi),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// Brute-force Fourier coefficient oracle: `(1/M) sum_m w(m/M) e^{-j2pi q m/M}`.
/// Error is O(1/M) for bounded-variation waveforms. Requires `M >= 64(|q|+1)`.
pub fn numeric_coeff<F>(waveform: F, q: i64, samples: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let min = 64 * (q.unsigned_abs() as usize + 1);
    if samples < min {
        return Err(TmaError::invalid(format!(
            "numeric_coeff needs M >= {min} samples for q = {q}, got {samples}"
        )));
    }
    let m = samples as f64;
    // rotator recurrence instead of per-sample sin/cos; drift over 1e6 steps
    // stays far below the oracle's own O(1/M) error
    let step = Complex64::from_polar(1.0, -2.0 * PI * q as f64 / m);
    let mut rot = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..samples {
        acc += waveform(i as f64 / m) * rot;
        rot *= step;
    }
    Ok(acc / m)
}

/// Mean power oracle `(1/M) sum |w(m/M)|^2`, approximating the period average
/// of |w|^2. Requires `M >= 1024`.
pub fn waveform_mean_power<F>(waveform: F, samples: usize) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    if samples < 1024 {
        return Err(TmaError::invalid("waveform_mean_power needs M >= 1024"));
    }
    let m = samples as f64;
    Ok((0..samples).map(|i| waveform(i as f64 / m).norm_sqr()).sum::<f64>() / m)
}

/// Real-valued sampler adapter for the complex oracles.
pub fn real_sampler<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Complex64 {
    move |t| Complex64::new(f(t), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn rect_waveform_inside_outside() {
        let p = RectPulse::new(0.5, 0.0).unwrap();
        assert_eq!(p.waveform(0.25), 1.0);
        assert_eq!(p.waveform(0.75), 0.0);
    }

    #[test]
    fn rect_waveform_wraparound() {
        let p = RectPulse::new(0.3, 0.9).unwrap();
        assert_eq!(p.waveform(0.05), 1.0);
        assert_eq!(p.waveform(0.95), 1.0);
        assert_eq!(p.waveform(0.25), 0.0);
    }

    #[test]
    fn rect_coeff_dc_is_duty_cycle() {
        let p = RectPulse::new(0.5, 0.0).unwrap();
        assert_eq!(p.coeff(0), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn rect_coeff_sinc_null() {
        let p = RectPulse::new(0.5, 0.0).unwrap();
        assert!(p.coeff(2).norm() < TOL);
    }

    #[test]
    fn rect_coeff_first_harmonic() {
        // magnitude 1/pi, phase -pi/2; frozen from the numeric oracle
        let p = RectPulse::new(0.5, 0.0).unwrap();
        let c = p.coeff(1);
        assert!((c.norm() - 1.0 / PI).abs() < TOL);
        assert!((c.arg() + PI / 2.0).abs() < TOL);
    }

    #[test]
    fn rect_coeff_matches_numeric_oracle() {
        let p = RectPulse::new(0.5, 0.0).unwrap();
        let oracle = numeric_coeff(real_sampler(|t| p.waveform(t)), 1, 1_000_000).unwrap();
        assert!((p.coeff(1) - oracle).norm() < 1e-5);
    }

    #[test]
    fn rect_zero_duty_is_all_zero() {
        let p = RectPulse::new(0.0, 0.2).unwrap();
        for q in -5..=5 {
            assert_eq!(p.coeff(q).norm(), 0.0);
        }
    }

    #[test]
    fn swc_coeffs_paper_weights() {
        // a_2 = a_1 = 2 a_0 = 1/5
        let p = SwcPulse::new(1.0, vec![0.1, 0.2, 0.2], vec![0.0, 0.0]).unwrap();
        assert!((p.coeff(0) - Complex64::new(0.1, 0.0)).norm() < TOL);
        assert!((p.coeff(1) - Complex64::new(0.1, 0.0)).norm() < TOL);
        assert!(p.coeff(3).norm() == 0.0);
    }

    #[test]
    fn swc_coeff_matches_numeric_oracle() {
        let p = SwcPulse::new(0.7, vec![0.1, 0.2, 0.2], vec![0.4, -1.1]).unwrap();
        for q in -3..=3i64 {
            let oracle = numeric_coeff(real_sampler(|t| p.waveform(t)), q, 65536).unwrap();
            assert!((p.coeff(q) - oracle).norm() < 1e-9, "q = {q}");
        }
    }

    #[test]
    fn ssb_waveforms_spot_values() {
        let p = SsbPulse::new(1.0, vec![0.0]).unwrap();
        let (c, s) = p.waveforms(0.0);
        assert!((c - 1.0).abs() < TOL && s.abs() < TOL);

        let p = SsbPulse::new(1.0, vec![PI / 2.0]).unwrap();
        let (c, s) = p.waveforms(0.0);
        assert!(c.abs() < TOL && (s + 1.0).abs() < TOL);

        let p = SsbPulse::new(0.5, vec![0.0, 0.0, 0.0]).unwrap();
        let (c, s) = p.waveforms(0.0);
        assert!((c - 1.5).abs() < TOL && s.abs() < TOL);
    }

    #[test]
    fn ssb_comb_is_single_sideband() {
        let p = SsbPulse::new(0.8, vec![0.3, -0.7, 2.0]).unwrap();
        for q in -8..=8i64 {
            let oracle = numeric_coeff(|t| p.complex_waveform(t), q, 65536).unwrap();
            let expected = p.coeff(q);
            assert!((oracle - expected).norm() < 1e-10, "q = {q}");
            if !(1..=3).contains(&q) {
                assert!(oracle.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn numeric_coeff_orthogonality() {
        let one = |_: f64| Complex64::new(1.0, 0.0);
        assert!((numeric_coeff(one, 0, 1024).unwrap() - Complex64::new(1.0, 0.0)).norm() < TOL);
        assert!(numeric_coeff(one, 3, 1024).unwrap().norm() < TOL);
    }

    #[test]
    fn numeric_coeff_rejects_small_m() {
        assert!(numeric_coeff(|_| Complex64::new(1.0, 0.0), 10, 100).is_err());
    }

    #[test]
    fn mean_power_values() {
        let rect = RectPulse::new(0.5, 0.0).unwrap();
        let p = waveform_mean_power(real_sampler(|t| rect.waveform(t)), 65536).unwrap();
        assert!((p - 0.5).abs() < 1e-4);

        let p = waveform_mean_power(real_sampler(|t| (2.0 * PI * t).cos()), 65536).unwrap();
        assert!((p - 0.5).abs() < 1e-9);

        // Parseval: complex SSB branch with xi = 1, L = 3 has mean power 3
        let ssb = SsbPulse::new(1.0, vec![0.2, 1.0, -2.5]).unwrap();
        let p = waveform_mean_power(|t| ssb.complex_waveform(t), 65536).unwrap();
        assert!((p - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rect_phase_proportionality() {
        let p = RectPulse::new(0.3, 0.45).unwrap();
        let base = p.coeff(1).arg();
        for q in 2..=6i64 {
            if sinc(q as f64 * 0.3) > 0.0 {
                let dev = wrap_phase(p.coeff(q).arg() - q as f64 * base).abs();
                assert!(dev < 1e-9, "q = {q}, dev = {dev}");
            }
        }
    }
}
