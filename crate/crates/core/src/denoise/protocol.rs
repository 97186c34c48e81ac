//! Wire format for external denoisers.
//!
//! Request: `"TLF1"` | u32-LE height | u32-LE width | u32-LE channels |
//! f32-LE hint | `h*w*c` f32-LE values (row-major, channel-planar).
//! Reply: identical but without the hint field.

use crate::error::{Error, Result};
use crate::tensor::{ImageTensor, Shape};

pub const MAGIC: &[u8; 4] = b"TLF1";
const DIMS_LEN: usize = 4 + 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub image: ImageTensor,
    pub hint: f32,
}

pub fn encode_request(x: &ImageTensor, hint: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(DIMS_LEN + 4 + 4 * x.as_slice().len());
    push_dims(&mut out, x.shape());
    out.extend_from_slice(&(hint as f32).to_le_bytes());
    push_payload(&mut out, x);
    out
}

pub fn encode_reply(x: &ImageTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(DIMS_LEN + 4 * x.as_slice().len());
    push_dims(&mut out, x.shape());
    push_payload(&mut out, x);
    out
}

pub fn decode_request(bytes: &[u8]) -> Result<Request> {
    let shape = read_dims(bytes, "request")?;
    let hint = read_f32(bytes, DIMS_LEN, "request")?;
    let image = read_payload(bytes, DIMS_LEN + 4, shape, "request")?;
    Ok(Request { image, hint })
}

/// Decodes a reply and checks it has the `expected` shape.
pub fn decode_reply(bytes: &[u8], expected: Shape) -> Result<ImageTensor> {
    let shape = read_dims(bytes, "reply")?;
    if shape != expected {
        return Err(Error::Denoiser(format!(
            "reply shape {shape} does not match request shape {expected}"
        )));
    }
    read_payload(bytes, DIMS_LEN, shape, "reply")
}

fn push_dims(out: &mut Vec<u8>, s: Shape) {
    out.extend_from_slice(MAGIC);
    for d in [s.height, s.width, s.channels] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
}

fn push_payload(out: &mut Vec<u8>, x: &ImageTensor) {
    for &v in x.as_slice() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

fn malformed(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::Denoiser(format!("malformed {what}: {detail}"))
}

fn read_dims(bytes: &[u8], what: &str) -> Result<Shape> {
    if bytes.len() < DIMS_LEN {
        return Err(malformed(what, format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(malformed(what, "bad magic"));
    }
    let dim = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().unwrap()) as usize;
    let shape = Shape::new(dim(0), dim(1), dim(2));
    if shape.height == 0 || shape.width == 0 || shape.channels == 0 {
        return Err(malformed(what, format!("zero dimension in {shape}")));
    }
    Ok(shape)
}

fn read_f32(bytes: &[u8], at: usize, what: &str) -> Result<f32> {
    bytes
        .get(at..at + 4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(|| malformed(what, "truncated header"))
}

fn read_payload(bytes: &[u8], at: usize, shape: Shape, what: &str) -> Result<ImageTensor> {
    let n = shape.len();
    let payload = &bytes[at.min(bytes.len())..];
    if payload.len() != 4 * n {
        return Err(malformed(
            what,
            format!("expected {} payload bytes for {shape}, got {}", 4 * n, payload.len()),
        ));
    }
    let data: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    ImageTensor::from_vec(shape, data).map_err(|_| malformed(what, "non-finite values"))
}
