//! SRI: a minimal spectral image container.
//!
//! ```text
//! SRI1
//! rows=<usize>
//! cols=<usize>
//! start_nm=<f64>
//! step_nm=<f64>
//! count=<usize>
//! kind=radiance|irradiance
//! units=<text>
//! creator=<text>
//! checksum=<64 lowercase hex digits>
//! end
//! <count·rows·cols little-endian f32, wavelength-major then row-major>
//! ```
//!
//! Every line ends in `\n`. The checksum is the SHA-256 of all header
//! bytes before the `checksum=` line followed by the payload, so any
//! change to the header or the data is detected.

use std::fs;
use std::path::Path;

use ndarray::Array3;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spectral::{SpectralImage, SpectralKind, WavelengthGrid};

pub const SRI_MAGIC: &str = "SRI1";

const KEYS: [&str; 8] = ["rows", "cols", "start_nm", "step_nm", "count", "kind", "units", "creator"];

fn creator() -> String {
    format!("hdrsim {}", env!("CARGO_PKG_VERSION"))
}

fn checksum(header_prefix: &[u8], payload: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(header_prefix);
    h.update(payload);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Serialize `img` to SRI bytes. Samples are stored as f32 and must stay
/// finite after narrowing.
pub fn encode_sri(img: &SpectralImage) -> Result<Vec<u8>> {
    if let Some(bad) = img.data().iter().find(|v| !(**v as f32).is_finite() || **v < 0.0) {
        return Err(Error::Domain(format!("sample {bad} is not representable as a finite f32")));
    }
    let g = img.grid();
    let mut head = format!("{SRI_MAGIC}\n");
    let values = [
        img.rows().to_string(),
        img.cols().to_string(),
        g.start_nm.to_string(),
        g.step_nm.to_string(),
        g.count.to_string(),
        img.kind().as_str().to_string(),
        img.kind().units().to_string(),
        creator(),
    ];
    for (k, v) in KEYS.iter().zip(values.iter()) {
        head.push_str(&format!("{k}={v}\n"));
    }
    let mut payload = Vec::with_capacity(img.data().len() * 4);
    for v in img.data().iter() {
        payload.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    let sum = checksum(head.as_bytes(), &payload);
    let mut out = head.into_bytes();
    out.extend_from_slice(format!("checksum={sum}\nend\n").as_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn write_sri(path: impl AsRef<Path>, img: &SpectralImage) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_sri(img)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Line reader tracking byte offsets.
struct Lines<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        let start = self.pos;
        let rest = &self.bytes[start..];
        let len = rest
            .iter()
            .take(4096)
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::parse(start, "unterminated header line"))?;
        let line = std::str::from_utf8(&rest[..len])
            .map_err(|e| Error::parse(start + e.valid_up_to(), "header is not valid UTF-8"))?;
        if let Some(i) = line.find(|c: char| c.is_control()) {
            return Err(Error::parse(start + i, "control character in header"));
        }
        self.pos = start + len + 1;
        Ok((start, line))
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (off, line) = self.next_line()?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(off, format!("expected `{key}=...`, found {line:?}")))?;
        if k != key {
            return Err(Error::parse(off, format!("expected key `{key}`, found `{k}`")));
        }
        Ok((off + k.len() + 1, v))
    }
}

fn parse_usize(off: usize, key: &str, v: &str) -> Result<usize> {
    if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) || (v.len() > 1 && v.starts_with('0')) {
        return Err(Error::parse(off, format!("`{key}` must be a canonical unsigned integer, got {v:?}")));
    }
    v.parse()
        .map_err(|_| Error::parse(off, format!("`{key}` out of range: {v}")))
}

fn parse_f64(off: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::parse(off, format!("`{key}` is not a number: {v:?}")))?;
    if !x.is_finite() || x.to_string() != v {
        return Err(Error::parse(off, format!("`{key}` is not a canonical finite number: {v:?}")));
    }
    Ok(x)
}

/// Parse SRI bytes.
pub fn decode_sri(bytes: &[u8]) -> Result<SpectralImage> {
    let mut lines = Lines { bytes, pos: 0 };
    let (_, magic) = lines.next_line()?;
    if magic != SRI_MAGIC {
        return Err(Error::parse(0, format!("bad magic {magic:?}, expected {SRI_MAGIC:?}")));
    }
    let (o, v) = lines.field("rows")?;
    let rows = parse_usize(o, "rows", v)?;
    let (o, v) = lines.field("cols")?;
    let cols = parse_usize(o, "cols", v)?;
    let (o_start, v) = lines.field("start_nm")?;
    let start_nm = parse_f64(o_start, "start_nm", v)?;
    let (o, v) = lines.field("step_nm")?;
    let step_nm = parse_f64(o, "step_nm", v)?;
    let (o, v) = lines.field("count")?;
    let count = parse_usize(o, "count", v)?;
    let (o_kind, v) = lines.field("kind")?;
    let kind = match v {
        "radiance" => SpectralKind::Radiance,
        "irradiance" => SpectralKind::Irradiance,
        other => return Err(Error::parse(o_kind, format!("unknown kind {other:?}"))),
    };
    let (o, v) = lines.field("units")?;
    if v != kind.units() {
        return Err(Error::parse(o, format!("units {v:?} do not match kind `{}`", kind.as_str())));
    }
    lines.field("creator")?;
    let prefix_end = lines.pos;
    let (o_sum, stored) = lines.field("checksum")?;
    if stored.len() != 64 || !stored.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(Error::parse(o_sum, "checksum must be 64 lowercase hex digits"));
    }
    let (o_end, end) = lines.next_line()?;
    if end != "end" {
        return Err(Error::parse(o_end, format!("expected `end`, found {end:?}")));
    }
    let header_len = lines.pos;

    if rows == 0 || cols == 0 {
        return Err(Error::parse(0, "image dimensions must be positive"));
    }
    let grid = WavelengthGrid::new(start_nm, step_nm, count)
        .map_err(|e| Error::parse(o_start, format!("invalid wavelength grid: {e}")))?;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(count))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::parse(0, "header dimensions overflow"))?;
    let payload = &bytes[header_len..];
    if payload.len() != expected {
        return Err(Error::parse(
            header_len,
            format!(
                "payload holds {} bytes but the header implies {expected} ({count}x{rows}x{cols} f32)",
                payload.len()
            ),
        ));
    }
    let actual = checksum(&bytes[..prefix_end], payload);
    if actual != stored {
        return Err(Error::parse(o_sum, format!("checksum mismatch: stored {stored}, computed {actual}")));
    }
    let mut data = Vec::with_capacity(expected / 4);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        if !v.is_finite() || v < 0.0 {
            return Err(Error::parse(header_len + 4 * i, format!("invalid sample {v}")));
        }
        data.push(f64::from(v));
    }
    let data = Array3::from_shape_vec((count, rows, cols), data).expect("length checked");
    SpectralImage::new(grid, kind, data)
}

pub fn read_sri(path: impl AsRef<Path>) -> Result<SpectralImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_sri(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpectralImage {
        let grid = WavelengthGrid::new(450.0, 25.0, 3).unwrap();
        let data = Array3::from_shape_fn((3, 2, 4), |(b, r, c)| (b * 100 + r * 10 + c) as f64 * 0.5);
        SpectralImage::new(grid, SpectralKind::Irradiance, data).unwrap()
    }

    #[test]
    fn round_trip_bit_identical() {
        let img = sample();
        let back = decode_sri(&encode_sri(&img).unwrap()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn header_text() {
        let bytes = encode_sri(&sample()).unwrap();
        let text = String::from_utf8_lossy(&bytes[..200]);
        assert!(text.starts_with("SRI1\nrows=2\ncols=4\nstart_nm=450\nstep_nm=25\ncount=3\nkind=irradiance\n"));
    }

    #[test]
    fn payload_is_little_endian() {
        let bytes = encode_sri(&sample()).unwrap();
        let n = bytes.len();
        // Last sample: b=2, r=1, c=3 → 213·0.5.
        assert_eq!(&bytes[n - 4..], &106.5f32.to_le_bytes());
    }

    #[test]
    fn truncated_names_sizes() {
        let bytes = encode_sri(&sample()).unwrap();
        let err = decode_sri(&bytes[..bytes.len() - 3]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("93 bytes") && msg.contains("96"), "{msg}");
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn bad_magic_at_zero() {
        let mut bytes = encode_sri(&sample()).unwrap();
        bytes[3] = b'2';
        assert!(matches!(decode_sri(&bytes), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn header_payload_mismatch() {
        let bytes = encode_sri(&sample()).unwrap();
        let text = String::from_utf8(bytes[..bytes.len() - 96].to_vec()).unwrap();
        let forged = text.replace("cols=4", "cols=5");
        let mut b = forged.into_bytes();
        b.extend_from_slice(&bytes[bytes.len() - 96..]);
        assert!(matches!(decode_sri(&b), Err(Error::Parse { .. })));
    }

    #[test]
    fn f32_overflow_refused() {
        let grid = WavelengthGrid::new(500.0, 10.0, 1).unwrap();
        let img = SpectralImage::new(grid, SpectralKind::Radiance, Array3::from_elem((1, 1, 1), 1e300)).unwrap();
        assert!(matches!(encode_sri(&img), Err(Error::Domain(_))));
    }

    #[test]
    fn negative_payload_rejected() {
        let mut bytes = encode_sri(&sample()).unwrap();
        let n = bytes.len();
        bytes[n - 4..].copy_from_slice(&(-1.0f32).to_le_bytes());
        // Checksum fails first; a forged checksum would still hit the sample check.
        assert!(matches!(decode_sri(&bytes), Err(Error::Parse { .. })));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.sri");
        write_sri(&p, &sample()).unwrap();
        assert_eq!(read_sri(&p).unwrap(), sample());
        assert!(matches!(read_sri(dir.path().join("missing.sri")), Err(Error::Io { .. })));
    }
}
