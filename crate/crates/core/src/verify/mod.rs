//! Executable suite of identities and inequalities, one record per
//! `(check, group, params, seed)`.

mod checks;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::multipliers::MultiplierParams;
use crate::norms::{GridSpec, SolverOptions};

pub use checks::{check_ids, check_kind, CheckKind};

pub const SCHEMA_VERSION: &str = "grandsmall.check/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not a failure: the check did not apply or carries a caveat.
    Flagged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub schema: String,
    pub check_id: String,
    pub kind: CheckKind,
    pub group: GroupSpec,
    pub params: MultiplierParams,
    pub seed: u64,
    pub status: Status,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violations: Option<usize>,
    pub detail: String,
    /// Wall time, only when timing is requested (it breaks byte-for-byte reproducibility).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub groups: Vec<GroupSpec>,
    pub params: Vec<MultiplierParams>,
    pub seeds: Vec<u64>,
    /// Random trials per inequality record.
    pub trials: usize,
    /// Absolute tolerance for identities.
    pub tolerance: f64,
    pub solver: SolverOptions,
    pub timing: bool,
    pub jobs: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            groups: ["Z6", "Z8", "Z12", "Z16", "Z4xZ4"].iter().map(|s| s.parse().expect("valid")).collect(),
            params: vec![MultiplierParams::example1(1.0, GridSpec::default())],
            seeds: (0..20).collect(),
            trials: 3,
            tolerance: 1e-9,
            solver: SolverOptions::default(),
            timing: false,
            jobs: None,
        }
    }
}

/// Runs the selected checks over every `(group, params, seed)`; an empty
/// selection runs nothing. Output is sorted by `(check, group, params, seed)`.
pub fn run_suite(selection: &[String], config: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    for id in selection {
        check_kind(id)?;
    }
    for p in &config.params {
        MultiplierParams::new(p.p1, p.p2, p.p3, p.theta, p.grid)?;
    }
    let mut ids: Vec<&str> = selection.iter().map(String::as_str).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut jobs = Vec::new();
    for id in &ids {
        for g in &config.groups {
            for (pi, p) in config.params.iter().enumerate() {
                for &seed in &config.seeds {
                    jobs.push((*id, g, pi, p, seed));
                }
            }
        }
    }
    let run = || -> Vec<CheckRecord> {
        jobs.par_iter()
            .map(|&(id, g, _, p, seed)| run_one(id, g, p, seed, config))
            .collect()
    };
    let mut records = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(run),
        None => run(),
    };
    // Job order is already canonical; the sort documents it.
    let key = |r: &CheckRecord| {
        let pi = config.params.iter().position(|p| *p == r.params).unwrap_or(0);
        (r.check_id.clone(), r.group.to_string(), pi, r.seed)
    };
    records.sort_by_cached_key(key);
    Ok(records)
}

fn run_one(id: &str, group: &GroupSpec, params: &MultiplierParams, seed: u64, config: &SuiteConfig) -> CheckRecord {
    let ctx = checks::Ctx {
        id,
        spec: group,
        params,
        seed,
        trials: config.trials,
        solver: config.solver,
        tol: config.tolerance,
    };
    let start = std::time::Instant::now();
    let outcome = checks::run_check(&ctx);
    let runtime_ms = config.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let kind = check_kind(id).expect("validated");
    let base = |status, detail: String| CheckRecord {
        schema: SCHEMA_VERSION.into(),
        check_id: id.into(),
        kind,
        group: group.clone(),
        params: *params,
        seed,
        status,
        lhs: 0.0,
        rhs: 0.0,
        margin: 0.0,
        violations: None,
        detail,
        runtime_ms,
    };
    match outcome {
        Ok(o) => CheckRecord {
            lhs: finite(o.lhs),
            rhs: finite(o.rhs),
            margin: finite(o.margin),
            violations: o.violations,
            ..base(o.status, o.detail)
        },
        Err(Error::Inadmissible(msg)) => base(Status::Flagged, format!("not applicable: {msg}")),
        Err(e) => base(Status::Fail, format!("error: {e}")),
    }
}

fn finite(x: f64) -> f64 {
    if x.is_finite() { x } else { f64::MAX.copysign(x) }
}

pub fn all_passed(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.status != Status::Fail)
}

pub fn write_jsonl<W: Write>(records: &[CheckRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(records: &[CheckRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record([
        "schema", "check_id", "kind", "group", "p1", "p2", "p3", "theta", "seed", "status", "lhs", "rhs", "margin",
        "violations",
    ])
    .map_err(io)?;
    for r in records {
        let kind = serde_json::to_value(r.kind).expect("enum").as_str().unwrap_or_default().to_string();
        let status = serde_json::to_value(r.status).expect("enum").as_str().unwrap_or_default().to_string();
        w.write_record([
            r.schema.clone(),
            r.check_id.clone(),
            kind,
            r.group.to_string(),
            r.params.p1.to_string(),
            r.params.p2.to_string(),
            r.params.p3.to_string(),
            r.params.theta.to_string(),
            r.seed.to_string(),
            status,
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.margin.to_string(),
            r.violations.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}
