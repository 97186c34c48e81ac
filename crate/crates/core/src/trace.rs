//! Per-iteration solver traces and their CSV form.

use std::fmt;
use std::fmt::Write as _;

pub const CSV_HEADER: &str =
    "k,F,rel_err,norm_xF_x,norm_xG_x,norm_xGmu_x,alpha,mu,mdus_branch,bus_branch,psnr";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pg,
    Apg,
    Mapg,
    /// Reserved for externally produced traces.
    NiApg,
    /// Reserved for externally produced traces.
    ApgNc,
    Tlf,
    Dtlf,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Pg => "pg",
            Method::Apg => "apg",
            Method::Mapg => "mapg",
            Method::NiApg => "niapg",
            Method::ApgNc => "apgnc",
            Method::Tlf => "tlf",
            Method::Dtlf => "dtlf",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [
            Method::Pg,
            Method::Apg,
            Method::Mapg,
            Method::NiApg,
            Method::ApgNc,
            Method::Tlf,
            Method::Dtlf,
        ]
        .into_iter()
        .find(|m| m.tag() == tag)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdusBranch {
    AcceptedV,
    FellBackXF,
    NotApplicable,
}

impl MdusBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            MdusBranch::AcceptedV => "accepted-v",
            MdusBranch::FellBackXF => "fell-back-xF",
            MdusBranch::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BusBranch {
    AcceptedZ,
    FellBackXG,
    NotApplicable,
}

impl BusBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            BusBranch::AcceptedZ => "accepted-z",
            BusBranch::FellBackXG => "fell-back-xG",
            BusBranch::NotApplicable => "not-applicable",
        }
    }
}

/// One iteration `x^k -> x^{k+1}`. `objective` is `F(x^{k+1})`; the norms
/// measure displacements from `x^k`; `alpha` and `mu` are the values used
/// during the iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub objective: f64,
    pub rel_err: f64,
    pub norm_xf_x: f64,
    pub norm_xg_x: Option<f64>,
    pub norm_xgmu_x: Option<f64>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub mdus: MdusBranch,
    pub bus: BusBranch,
    pub psnr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub method: Method,
    /// `F(x^0)`
    pub initial_objective: f64,
    pub records: Vec<IterateRecord>,
}

impl IterateTrace {
    pub fn new(method: Method, initial_objective: f64) -> Self {
        IterateTrace {
            method,
            initial_objective,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterateRecord> {
        self.records.last()
    }

    /// Objective values `F(x^0), F(x^1), ...`.
    pub fn objectives(&self) -> Vec<f64> {
        std::iter::once(self.initial_objective)
            .chain(self.records.iter().map(|r| r.objective))
            .collect()
    }

    pub fn final_objective(&self) -> f64 {
        self.last().map_or(self.initial_objective, |r| r.objective)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.k,
                r.objective,
                r.rel_err,
                r.norm_xf_x,
                opt(r.norm_xg_x),
                opt(r.norm_xgmu_x),
                opt(r.alpha),
                opt(r.mu),
                r.mdus.as_str(),
                r.bus.as_str(),
                opt(r.psnr)
            );
        }
        out
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `||new - old|| / ||new||`, with 0/0 treated as 0.
pub fn relative_change(diff_norm: f64, new_norm: f64) -> f64 {
    if diff_norm == 0.0 {
        0.0
    } else if new_norm == 0.0 {
        f64::INFINITY
    } else {
        diff_norm / new_norm
    }
}
