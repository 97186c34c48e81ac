//! Image, kernel and mask files.
//!
//! Images are 8-bit binary PGM (P5) / PPM (P6), mapped to `[0, 1]` by
//! `/255`, or the lossless raw format `TLFT`:
//! `"TLFT" | u32 H | u32 W | u32 C | f64 payload`, all little-endian,
//! channel-planar. Kernels are text: `kh kw` followed by row-major taps.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernel::BlurKernel;
use crate::tensor::{ImageTensor, Shape};

pub const TLFT_MAGIC: &[u8; 4] = b"TLFT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Ppm,
    Tlft,
}

impl ImageFormat {
    /// Format implied by a file extension (`pgm`, `ppm`, `tlft`).
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("ppm") => Ok(ImageFormat::Ppm),
            Some("tlft") => Ok(ImageFormat::Tlft),
            _ => Err(Error::config(format!(
                "cannot infer image format of {} (use .pgm, .ppm or .tlft)",
                path.display()
            ))),
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

/// Reads any supported image, detected from its leading bytes.
pub fn read_image(path: &Path) -> Result<ImageTensor> {
    let bytes = read_bytes(path)?;
    let ctx = path.display().to_string();
    if bytes.starts_with(TLFT_MAGIC) {
        decode_tlft(&bytes, &ctx)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(&bytes, &ctx)
    } else {
        Err(Error::parse(ctx, "unrecognized image signature"))
    }
}

/// Writes `x` in the format given by the extension of `path`. The 8-bit
/// formats clamp to `[0, 1]` and round.
pub fn write_image(path: &Path, x: &ImageTensor) -> Result<()> {
    let bytes = match ImageFormat::from_path(path)? {
        ImageFormat::Tlft => encode_tlft(x),
        ImageFormat::Pgm => {
            if x.channels() != 1 {
                return Err(Error::validation(format!("PGM needs 1 channel, got {}", x.channels())));
            }
            encode_pnm(x)
        }
        ImageFormat::Ppm => {
            if x.channels() != 3 {
                return Err(Error::validation(format!("PPM needs 3 channels, got {}", x.channels())));
            }
            encode_pnm(x)
        }
    };
    write_bytes(path, &bytes)
}

pub fn encode_tlft(x: &ImageTensor) -> Vec<u8> {
    let s = x.shape();
    let mut out = Vec::with_capacity(16 + 8 * s.len());
    out.extend_from_slice(TLFT_MAGIC);
    for d in [s.height, s.width, s.channels] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in x.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_tlft(bytes: &[u8], ctx: &str) -> Result<ImageTensor> {
    if bytes.len() < 16 || &bytes[..4] != TLFT_MAGIC {
        return Err(Error::parse(ctx, "missing TLFT header"));
    }
    let dim = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (h, w, c) = (dim(0), dim(1), dim(2));
    if h == 0 || w == 0 || c == 0 {
        return Err(Error::parse(ctx, format!("zero dimension in {h}x{w}x{c}")));
    }
    let n = h
        .checked_mul(w)
        .and_then(|v| v.checked_mul(c))
        .ok_or_else(|| Error::parse(ctx, "dimensions overflow"))?;
    let payload = &bytes[16..];
    if payload.len() != 8 * n {
        return Err(Error::parse(
            ctx,
            format!("payload has {} bytes, expected {}", payload.len(), 8 * n),
        ));
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::parse(ctx, "non-finite value in payload"));
    }
    ImageTensor::from_vec(Shape::new(h, w, c), data)
}

fn encode_pnm(x: &ImageTensor) -> Vec<u8> {
    let s = x.shape();
    let magic = if s.channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", s.width, s.height).into_bytes();
    for i in 0..s.height {
        for j in 0..s.width {
            for c in 0..s.channels {
                out.push((x.get(i, j, c).clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
    }
    out
}

/// Header tokens of a PNM file, skipping `#` comments. Returns the tokens
/// and the offset of the raster.
fn pnm_header(bytes: &[u8], ctx: &str) -> Result<([usize; 3], usize)> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::parse(ctx, "truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(ctx, "malformed header field"))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => Ok((fields, pos + 1)),
        _ => Err(Error::parse(ctx, "missing separator after header")),
    }
}

fn decode_pnm(bytes: &[u8], ctx: &str) -> Result<ImageTensor> {
    let channels = if bytes.starts_with(b"P5") { 1 } else { 3 };
    let ([w, h, maxval], offset) = pnm_header(bytes, ctx)?;
    if w == 0 || h == 0 {
        return Err(Error::parse(ctx, "zero dimension"));
    }
    if maxval != 255 {
        return Err(Error::parse(ctx, format!("only 8-bit maxval 255 is supported, got {maxval}")));
    }
    let raster = &bytes[offset..];
    let n = w * h * channels;
    if raster.len() != n {
        return Err(Error::parse(ctx, format!("raster has {} bytes, expected {n}", raster.len())));
    }
    Ok(ImageTensor::from_fn(Shape::new(h, w, channels), |i, j, c| {
        raster[(i * w + j) * channels + c] as f64 / 255.0
    }))
}

/// Binary mask from a PGM: 0 = missing, 255 = observed.
pub fn read_mask(path: &Path) -> Result<ImageTensor> {
    let m = read_image(path)?;
    if m.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::validation(format!(
            "mask {} must contain only 0 and 255",
            path.display()
        )));
    }
    Ok(m)
}

pub fn parse_kernel(text: &str, ctx: &str) -> Result<BlurKernel> {
    let mut tokens = text.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(ctx, format!("missing or malformed {what}")))
    };
    let rows = next_usize("kernel height")?;
    let cols = next_usize("kernel width")?;
    let taps = tokens
        .map(|t| t.parse::<f64>().map_err(|_| Error::parse(ctx, format!("malformed tap {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if taps.len() != rows * cols {
        return Err(Error::parse(ctx, format!("expected {} taps, got {}", rows * cols, taps.len())));
    }
    BlurKernel::new(rows, cols, taps)
}

pub fn read_kernel(path: &Path) -> Result<BlurKernel> {
    let bytes = read_bytes(path)?;
    let ctx = path.display().to_string();
    let text = String::from_utf8(bytes).map_err(|_| Error::parse(&ctx, "kernel file is not UTF-8"))?;
    parse_kernel(&text, &ctx)
}

pub fn format_kernel(k: &BlurKernel) -> String {
    let mut out = format!("{} {}\n", k.rows(), k.cols());
    for row in k.taps().chunks(k.cols()) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_kernel(path: &Path, k: &BlurKernel) -> Result<()> {
    write_text(path, &format_kernel(k))
}
