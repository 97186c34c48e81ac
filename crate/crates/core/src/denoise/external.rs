//! Running a denoiser as a child process over stdin/stdout.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::protocol::{decode_reply, encode_request};
use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalCommand {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl ExternalCommand {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Result<Self> {
        let program = program.into();
        if program.trim().is_empty() {
            return Err(Error::config("external denoiser command is empty"));
        }
        Ok(ExternalCommand {
            program,
            args,
            timeout: DEFAULT_TIMEOUT,
        })
    }

    /// Splits a command line on whitespace into program and arguments.
    pub fn parse(command_line: &str) -> Result<Self> {
        let mut parts = command_line.split_whitespace().map(str::to_owned);
        let program = parts
            .next()
            .ok_or_else(|| Error::config("external denoiser command is empty"))?;
        Self::new(program, parts.collect())
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

/// Sends one request to a fresh child process and decodes its reply.
pub fn external_roundtrip(cmd: &ExternalCommand, x: &ImageTensor, hint: f64) -> Result<ImageTensor> {
    let mut child = Command::new(&cmd.program)
        .args(&cmd.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Denoiser(format!("cannot start {:?}: {e}", cmd.program)))?;

    let request = encode_request(x, hint);
    let mut stdin = child.stdin.take().expect("stdin is piped");
    let writer = thread::spawn(move || {
        // a child that exits early closes the pipe; the reply check reports it
        let _ = stdin.write_all(&request);
    });
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        stdout.read_to_end(&mut buf).map(|_| buf)
    });

    let deadline = Instant::now() + cmd.timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::Denoiser(format!(
                    "{:?} timed out after {:?}",
                    cmd.program, cmd.timeout
                )));
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(Error::Denoiser(format!("waiting for {:?}: {e}", cmd.program))),
        }
    };
    let _ = writer.join();
    let reply = reader
        .join()
        .map_err(|_| Error::Denoiser("reader thread panicked".into()))?
        .map_err(|e| Error::Denoiser(format!("reading reply: {e}")))?;
    if !status.success() {
        return Err(Error::Denoiser(format!("{:?} exited with {status}", cmd.program)));
    }
    decode_reply(&reply, x.shape())
}
