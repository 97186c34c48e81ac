//! Denoisers used as data-driven anchors.

mod designed;
mod external;
pub mod protocol;

use std::fmt;
use std::str::FromStr;

pub use designed::{
    gaussian, median, recursive_filter, shrink_levels, total_variation, tv_rof, wavelet_shrink, TV_ROF_ITERS,
};
pub use external::{external_roundtrip, ExternalCommand, DEFAULT_TIMEOUT};

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenoiserKind {
    TvRof,
    RecursiveFilter,
    Gaussian,
    Median,
    WaveletShrink,
    External(ExternalCommand),
}

impl DenoiserKind {
    pub fn name(&self) -> &'static str {
        match self {
            DenoiserKind::TvRof => "tv-rof",
            DenoiserKind::RecursiveFilter => "recursive-filter",
            DenoiserKind::Gaussian => "gaussian",
            DenoiserKind::Median => "median",
            DenoiserKind::WaveletShrink => "wavelet-shrink",
            DenoiserKind::External(_) => "external",
        }
    }
}

/// A denoiser with a strength and an optional per-iteration schedule.
///
/// Strength means TV weight (`tv-rof`), sigma (`gaussian`,
/// `recursive-filter`), window radius (`median`, rounded), shrink threshold
/// (`wavelet-shrink`) or the hint sent to an external process.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiserSpec {
    kind: DenoiserKind,
    strength: f64,
    schedule: Vec<f64>,
}

impl DenoiserSpec {
    pub fn new(kind: DenoiserKind, strength: f64) -> Result<Self> {
        check_strength(strength)?;
        Ok(DenoiserSpec {
            kind,
            strength,
            schedule: Vec::new(),
        })
    }

    /// Strengths indexed by outer iteration; the last entry repeats.
    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Result<Self> {
        for &s in &schedule {
            check_strength(s)?;
        }
        self.schedule = schedule;
        Ok(self)
    }

    pub fn external(command: ExternalCommand, hint: f64) -> Result<Self> {
        Self::new(DenoiserKind::External(command), hint)
    }

    pub fn kind(&self) -> &DenoiserKind {
        &self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn strength_at(&self, iter_index: usize) -> f64 {
        match self.schedule.len() {
            0 => self.strength,
            n => self.schedule[iter_index.min(n - 1)],
        }
    }
}

fn check_strength(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("denoiser strength must be >= 0, got {s}")))
    }
}

/// Parses `kind:strength` or `kind:s0,s1,...` (a schedule whose first entry
/// is also the base strength). `external:<command line>` takes the hint from
/// an optional leading `@value ` token, e.g. `external:@0.1 my-denoiser -v`.
impl FromStr for DenoiserSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = kind.trim();
        if kind == "external" {
            let rest = rest.trim();
            let (hint, cmd) = match rest.strip_prefix('@') {
                Some(r) => {
                    let (h, c) = r.split_once(char::is_whitespace).unwrap_or((r, ""));
                    (parse_number(h)?, c)
                }
                None => (1.0, rest),
            };
            return Self::external(ExternalCommand::parse(cmd)?, hint);
        }
        let kind = match kind {
            "tv-rof" => DenoiserKind::TvRof,
            "recursive-filter" => DenoiserKind::RecursiveFilter,
            "gaussian" => DenoiserKind::Gaussian,
            "median" => DenoiserKind::Median,
            "wavelet-shrink" => DenoiserKind::WaveletShrink,
            other => return Err(Error::config(format!("unknown denoiser kind {other:?}"))),
        };
        let values = rest
            .split(',')
            .filter(|v| !v.trim().is_empty())
            .map(parse_number)
            .collect::<Result<Vec<_>>>()?;
        match values.as_slice() {
            [] => Err(Error::config(format!("denoiser {s:?} needs a strength"))),
            [one] => Self::new(kind, *one),
            many => Self::new(kind, many[0])?.with_schedule(many.to_vec()),
        }
    }
}

fn parse_number(v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid denoiser strength {v:?}")))
}

impl fmt::Display for DenoiserSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let DenoiserKind::External(cmd) = &self.kind {
            write!(f, "external:@{} {}", self.strength, cmd.program)?;
            for a in &cmd.args {
                write!(f, " {a}")?;
            }
            return Ok(());
        }
        write!(f, "{}:", self.kind.name())?;
        if self.schedule.is_empty() {
            write!(f, "{}", self.strength)
        } else {
            let parts: Vec<String> = self.schedule.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Applies the denoiser with the strength scheduled for `iter_index`.
pub fn denoise(spec: &DenoiserSpec, x: &ImageTensor, iter_index: usize) -> Result<ImageTensor> {
    let strength = spec.strength_at(iter_index);
    if strength == 0.0 {
        return Ok(x.clone());
    }
    let out = match &spec.kind {
        DenoiserKind::TvRof => tv_rof(x, strength)?,
        DenoiserKind::RecursiveFilter => recursive_filter(x, strength),
        DenoiserKind::Gaussian => gaussian(x, strength),
        DenoiserKind::Median => median(x, strength.round() as usize),
        DenoiserKind::WaveletShrink => wavelet_shrink(x, strength)?,
        DenoiserKind::External(cmd) => external_roundtrip(cmd, x, strength)?,
    };
    if !out.is_finite() {
        return Err(Error::Denoiser(format!("{} produced non-finite values", spec.kind.name())));
    }
    Ok(out)
}
