//! Binary PGM (P5): 16-bit ingest of sensor frames and 8-bit export of maps.

use std::fs;
use std::path::Path;

use super::write_atomic;
use crate::cube::MosaicImage;
use crate::error::{Error, Result};

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_header(bytes: &[u8], path: &Path) -> Result<Header> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::format(path, "wrong magic, expected binary PGM 'P5'"));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, "truncated PGM header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(path, "bad number in PGM header"))?;
    }
    // exactly one whitespace byte before the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::format(path, "missing separator after PGM header"));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::format(path, "PGM dimensions must be positive"));
    }
    Ok(Header {
        width: width as usize,
        height: height as usize,
        maxval,
        data_start: pos + 1,
    })
}

/// Reads a 16-bit binary PGM; samples are big-endian and scaled by 1/65535.
pub fn read_pgm16(path: &Path) -> Result<MosaicImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let hdr = parse_header(&bytes, path)?;
    if hdr.maxval != 65535 {
        return Err(Error::format(
            path,
            format!("unsupported depth: maxval {} (only 65535 is accepted)", hdr.maxval),
        ));
    }
    let n = hdr.width * hdr.height;
    let raster = &bytes[hdr.data_start..];
    if raster.len() != n * 2 {
        return Err(Error::PayloadLength {
            path: path.to_path_buf(),
            expected: (n * 2) as u64,
            actual: raster.len() as u64,
        });
    }
    let data = raster
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]) as f32 / 65535.0)
        .collect();
    MosaicImage::new(hdr.height, hdr.width, data)
}

/// Writes raw 16-bit samples as a P5 file (maxval 65535).
pub fn write_pgm16(path: &Path, height: usize, width: usize, samples: &[u16]) -> Result<()> {
    assert_eq!(samples.len(), height * width);
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for s in samples {
        out.extend_from_slice(&s.to_be_bytes());
    }
    write_atomic(path, &out)
}

pub fn write_pgm8(path: &Path, height: usize, width: usize, samples: &[u8]) -> Result<()> {
    assert_eq!(samples.len(), height * width);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(samples);
    write_atomic(path, &out)
}
