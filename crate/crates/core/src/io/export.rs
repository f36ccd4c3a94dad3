use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::isp::Rgb8Image;

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_png(path: &Path, w: usize, h: usize, color: png::ColorType, depth: png::BitDepth, data: &[u8]) -> Result<()> {
    let to_io = |e: png::EncodingError| match e {
        png::EncodingError::IoError(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(other.to_string())),
    };
    let (w32, h32) = (
        u32::try_from(w).map_err(|_| Error::Structural(format!("image width {w} too large for PNG")))?,
        u32::try_from(h).map_err(|_| Error::Structural(format!("image height {h} too large for PNG")))?,
    );
    let mut enc = png::Encoder::new(create(path)?, w32, h32);
    enc.set_color(color);
    enc.set_depth(depth);
    let mut writer = enc.write_header().map_err(to_io)?;
    writer.write_image_data(data).map_err(to_io)?;
    writer.finish().map_err(to_io)
}

/// 8-bit RGB PNG.
pub fn export_png(path: impl AsRef<Path>, img: &Rgb8Image) -> Result<()> {
    if img.rows == 0 || img.cols == 0 || img.data.len() != 3 * img.rows * img.cols {
        return Err(Error::Structural(format!(
            "RGB buffer of {} bytes does not match {}x{}",
            img.data.len(),
            img.rows,
            img.cols
        )));
    }
    write_png(path.as_ref(), img.cols, img.rows, png::ColorType::Rgb, png::BitDepth::Eight, &img.data)
}

/// 16-bit greyscale PNG, e.g. raw digital numbers.
pub fn export_gray16_png(path: impl AsRef<Path>, img: &Array2<u16>) -> Result<()> {
    let (rows, cols) = img.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::Structural("cannot export an empty image".into()));
    }
    let bytes: Vec<u8> = img.iter().flat_map(|v| v.to_be_bytes()).collect();
    write_png(path.as_ref(), cols, rows, png::ColorType::Grayscale, png::BitDepth::Sixteen, &bytes)
}

/// Read a 16-bit greyscale PNG written by [`export_gray16_png`].
pub fn read_gray16_png(path: impl AsRef<Path>) -> Result<Array2<u16>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let to_err = |e: png::DecodingError| match e {
        png::DecodingError::IoError(io) => Error::io(path, io),
        other => Error::parse(0, format!("{}: {other}", path.display())),
    };
    let mut reader = png::Decoder::new(std::io::BufReader::new(file)).read_info().map_err(to_err)?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(to_err)?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(Error::parse(
            0,
            format!("{}: expected 16-bit greyscale, found {:?} {:?}", path.display(), info.color_type, info.bit_depth),
        ));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let data: Vec<u16> = buf[..info.buffer_size()]
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect();
    Ok(Array2::from_shape_vec((h, w), data).expect("decoder returned h·w samples"))
}

/// Boolean mask as an 8-bit PNG (255 where set).
pub fn export_mask_png(path: impl AsRef<Path>, mask: &Array2<bool>) -> Result<()> {
    let (rows, cols) = mask.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::Structural("cannot export an empty mask".into()));
    }
    let bytes: Vec<u8> = mask.iter().map(|&m| if m { 255 } else { 0 }).collect();
    write_png(path.as_ref(), cols, rows, png::ColorType::Grayscale, png::BitDepth::Eight, &bytes)
}

/// Named numeric columns, written one row per index.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Table { headers: Vec::new(), columns: Vec::new() }
    }

    pub fn with_column(mut self, name: &str, values: Vec<f64>) -> Self {
        self.headers.push(name.to_string());
        self.columns.push(values);
        self
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.headers.len() != self.columns.len() || self.headers.is_empty() {
            return Err(Error::Structural("table needs one header per column and at least one column".into()));
        }
        let n = self.len();
        if self.columns.iter().any(|c| c.len() != n) {
            return Err(Error::Structural("table columns differ in length".into()));
        }
        Ok(())
    }
}

impl Default for Table {
    fn default() -> Self {
        Self::new()
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let offset = e.position().map(|p| p.byte() as usize);
    match (e.into_kind(), offset) {
        (csv::ErrorKind::Io(io), _) => Error::io(path, io),
        (kind, Some(off)) => Error::parse(off, format!("{kind:?}")),
        (kind, None) => Error::io(path, std::io::Error::other(format!("{kind:?}"))),
    }
}

/// CSV with a header row. Floats use the shortest representation that
/// parses back to the same value.
pub fn export_csv(path: impl AsRef<Path>, table: &Table) -> Result<()> {
    let path = path.as_ref();
    table.validate()?;
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(&table.headers).map_err(|e| csv_err(path, e))?;
    for i in 0..table.len() {
        w.write_record(table.columns.iter().map(|c| c[i].to_string()))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read back a table written by [`export_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let off = rec.position().map_or(0, |p| p.byte() as usize);
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            col.push(
                field
                    .parse()
                    .map_err(|_| Error::parse(off, format!("not a number: {field:?}")))?,
            );
        }
    }
    let t = Table { headers, columns };
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_pixel_png() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.png");
        export_png(&p, &Rgb8Image { rows: 1, cols: 1, data: vec![255; 3] }).unwrap();
        let dec = png::Decoder::new(std::io::BufReader::new(File::open(&p).unwrap()));
        let mut reader = dec.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size()];
        let info = reader.next_frame(&mut buf).unwrap();
        assert_eq!((info.width, info.height), (1, 1));
        assert_eq!(&buf[..3], &[255, 255, 255]);
    }

    #[test]
    fn gray16_and_mask() {
        let dir = tempfile::tempdir().unwrap();
        let dn = Array2::from_shape_fn((3, 5), |(r, c)| (r * 1000 + c) as u16);
        export_gray16_png(dir.path().join("dn.png"), &dn).unwrap();
        let mask = Array2::from_shape_fn((2, 2), |(r, c)| r == c);
        export_mask_png(dir.path().join("m.png"), &mask).unwrap();
        assert_eq!(read_gray16_png(dir.path().join("dn.png")).unwrap(), dn);
        assert!(matches!(read_gray16_png(dir.path().join("m.png")), Err(Error::Parse { .. })));
    }

    #[test]
    fn csv_round_trip_full_precision() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let vals = vec![0.1, 1.0 / 3.0, 1e-300, 12345.678901234567, 0.0];
        let t = Table::new()
            .with_column("x", (0..5).map(f64::from).collect())
            .with_column("value", vals);
        export_csv(&p, &t).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert_eq!(read_csv(&p).unwrap(), t);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("missing").join("x.png");
        let img = Rgb8Image { rows: 1, cols: 1, data: vec![0; 3] };
        assert!(matches!(export_png(&p, &img), Err(Error::Io { .. })));
        let t = Table::new().with_column("a", vec![1.0]);
        assert!(matches!(export_csv(&p, &t), Err(Error::Io { .. })));
    }

    #[test]
    fn ragged_table_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let t = Table::new().with_column("a", vec![1.0]).with_column("b", vec![]);
        assert!(matches!(export_csv(dir.path().join("x.csv"), &t), Err(Error::Structural(_))));
    }
}
