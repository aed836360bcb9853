//! Binary time-series format: 16-byte header (4-byte magic `TMAS`,
//! u32 version, u32 sample rate, u32 sample count, all little-endian)
//! followed by interleaved (re, im) f64 little-endian pairs.

use num_complex::Complex64;
use std::io::{Read, Write};

use crate::error::{Result, TmaError};

pub const SERIES_MAGIC: &[u8; 4] = b"TMAS";
pub const SERIES_VERSION: u32 = 1;

pub fn write_series<W: Write>(w: &mut W, sample_rate: u32, series: &[Complex64]) -> Result<()> {
    w.write_all(SERIES_MAGIC)?;
    w.write_all(&SERIES_VERSION.to_le_bytes())?;
    w.write_all(&sample_rate.to_le_bytes())?;
    w.write_all(&(series.len() as u32).to_le_bytes())?;
    for v in series {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_series<R: Read>(r: &mut R) -> Result<(u32, Vec<Complex64>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[0..4] != SERIES_MAGIC {
        return Err(TmaError::config("bad series magic"));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != SERIES_VERSION {
        return Err(TmaError::config(format!("unsupported series version {version}")));
    }
    let sample_rate = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let len = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let mut series = Vec::with_capacity(len);
    let mut buf = [0u8; 16];
    for _ in 0..len {
        r.read_exact(&mut buf)?;
        series.push(Complex64::new(
            f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            f64::from_le_bytes(buf[8..16].try_into().unwrap()),
        ));
    }
    Ok((sample_rate, series))
}

/// Fixed float formatting for text outputs: 9 significant digits, `.`
/// separator. Negative zero collapses to zero so equal values format
/// identically.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x == f64::INFINITY {
        return "inf".to_string();
    }
    if x == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.8e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip() {
        let series = vec![Complex64::new(1.5, -2.25), Complex64::new(0.0, 3.0)];
        let mut buf = Vec::new();
        write_series(&mut buf, 64, &series).unwrap();
        assert_eq!(buf.len(), 16 + 2 * 16);
        assert_eq!(&buf[0..4], b"TMAS");
        let (fs, back) = read_series(&mut buf.as_slice()).unwrap();
        assert_eq!(fs, 64);
        assert_eq!(back, series);
    }

    #[test]
    fn bad_magic_rejected() {
        let buf = vec![0u8; 16];
        assert!(read_series(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn float_formatting_is_stable() {
        assert_eq!(fmt_float(0.0), fmt_float(-0.0));
        assert_eq!(fmt_float(1.0), "1.00000000e0");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }
}
