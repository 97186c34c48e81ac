//! Scriptable stand-in for an external denoiser, used by the tests.
//!
//! Modes:
//!   echo             reply with the input unchanged
//!   add DELTA        reply with input + DELTA
//!   bad-shape        reply with one extra row
//!   bad-magic        reply with a corrupted magic
//!   truncate         reply with half the payload
//!   exit CODE        read the request, then exit with CODE
//!   sleep SECONDS    read the request, then sleep before echoing

use std::io::{Read, Write};
use std::process::ExitCode;
use std::thread;
use std::time::Duration;

use tlf::denoise::protocol::{decode_request, encode_reply};
use tlf::{ImageTensor, Shape};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mode = args.first().map(String::as_str).unwrap_or("echo");
    let arg = args.get(1).map(String::as_str);

    let mut bytes = Vec::new();
    if std::io::stdin().read_to_end(&mut bytes).is_err() {
        return ExitCode::from(10);
    }
    let request = match decode_request(&bytes) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(11);
        }
    };
    let x = request.image;

    let reply = match mode {
        "echo" => encode_reply(&x),
        "add" => {
            let delta: f64 = arg.and_then(|v| v.parse().ok()).unwrap_or(0.0);
            encode_reply(&x.map(|v| v + delta))
        }
        "bad-shape" => {
            let s = x.shape();
            encode_reply(&ImageTensor::zeros(Shape::new(s.height + 1, s.width, s.channels)))
        }
        "bad-magic" => {
            let mut r = encode_reply(&x);
            r[0] = b'X';
            r
        }
        "truncate" => {
            let mut r = encode_reply(&x);
            r.truncate(r.len() / 2);
            r
        }
        "exit" => {
            let code: u8 = arg.and_then(|v| v.parse().ok()).unwrap_or(1);
            return ExitCode::from(code);
        }
        "sleep" => {
            let secs: f64 = arg.and_then(|v| v.parse().ok()).unwrap_or(1.0);
            thread::sleep(Duration::from_secs_f64(secs));
            encode_reply(&x)
        }
        other => {
            eprintln!("unknown mode {other}");
            return ExitCode::from(12);
        }
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(&reply).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(13);
    }
    ExitCode::SUCCESS
}
