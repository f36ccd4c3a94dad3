//! Files: the SRI spectral container plus PNG and CSV exports.

mod export;
mod sri;

pub use export::{export_csv, export_gray16_png, export_mask_png, export_png, read_csv, read_gray16_png, Table};
pub use sri::{decode_sri, encode_sri, read_sri, write_sri, SRI_MAGIC};
