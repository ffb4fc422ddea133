//! Versioned little-endian weight files.
//!
//! Layout: magic `SWTE`, then `u32` format version, input bins, output bins
//! and tap count, followed by the taps as `f64`.

use std::fs;
use std::path::Path;

use super::ToeplitzEncoder;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SWTE";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

pub fn weights_to_bytes(enc: &ToeplitzEncoder) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * enc.param_count());
    out.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        enc.in_bins() as u32,
        enc.out_bins() as u32,
        enc.param_count() as u32,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for t in enc.taps() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().expect("4 bytes"))
}

pub fn weights_from_bytes(bytes: &[u8]) -> Result<ToeplitzEncoder> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Weights(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Weights(format!("bad magic {:?}", &bytes[..4])));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(Error::Weights(format!("unsupported format version {version}")));
    }
    let (in_bins, out_bins, n_taps) = (
        read_u32(bytes, 8) as usize,
        read_u32(bytes, 12) as usize,
        read_u32(bytes, 16) as usize,
    );
    if in_bins != out_bins {
        return Err(Error::Weights(format!(
            "input bins {in_bins} differ from output bins {out_bins}"
        )));
    }
    let expected = HEADER_LEN + 8 * n_taps;
    if bytes.len() != expected {
        return Err(Error::Weights(format!(
            "expected {expected} bytes for {n_taps} taps, found {}",
            bytes.len()
        )));
    }
    let taps = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    ToeplitzEncoder::new(taps, in_bins).map_err(|e| Error::Weights(e.to_string()))
}

pub fn save_weights(enc: &ToeplitzEncoder, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, weights_to_bytes(enc))?;
    Ok(())
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<ToeplitzEncoder> {
    weights_from_bytes(&fs::read(path)?)
}
