//! Report rendering: JSON envelopes and CSV flattening.
//!
//! JSON schema for verification runs:
//! `{"meta": {"config": {...}, "version": "..."}, "claims": [{name, params,
//! status, witness, value, bound, note, elapsed_ms}]}`. CSV flattens the
//! same claim fields, one row per claim.

use anyhow::Result;
use serde_json::{json, to_string_pretty, Value};
use sqfs_core::search::PeriodicSet;
use sqfs_core::residues::ResidueProfile;
use sqfs_core::verify::SuiteConfig;
use sqfs_core::VerificationReport;

fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

pub fn report_json(config: &SuiteConfig, report: &VerificationReport) -> Result<String> {
    let doc = json!({
        "meta": {
            "config": {
                "n": config.n,
                "k": config.ks,
                "epsilon": config.epsilon,
                "seed": config.seed,
            },
            "version": version(),
        },
        "claims": report.claims,
    });
    Ok(to_string_pretty(&doc)? + "\n")
}

pub fn constants_json(report: &VerificationReport) -> Result<String> {
    let doc = json!({
        "meta": { "version": version() },
        "claims": report.claims,
    });
    Ok(to_string_pretty(&doc)? + "\n")
}

pub fn report_csv(report: &VerificationReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["name", "params", "status", "witness", "value", "bound", "note", "elapsed_ms"])?;
    for claim in &report.claims {
        let params = claim
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let witness = claim
            .witness
            .as_ref()
            .map(|w| w.iter().map(u64::to_string).collect::<Vec<_>>().join("|"))
            .unwrap_or_default();
        writer.write_record([
            claim.name.clone(),
            params,
            claim.status.to_string(),
            witness,
            claim.value.map(|v| v.to_string()).unwrap_or_default(),
            claim.bound.map(|v| v.to_string()).unwrap_or_default(),
            claim.note.clone().unwrap_or_default(),
            claim.elapsed_ms.to_string(),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

pub struct SearchOutcome {
    pub modulus: u64,
    pub mode: &'static str,
    pub max_density: f64,
    pub certificates: Vec<PeriodicSet>,
}

pub fn search_json(outcome: &SearchOutcome) -> Result<String> {
    let doc = json!({
        "meta": { "version": version() },
        "result": {
            "modulus": outcome.modulus,
            "mode": outcome.mode,
            "max_density": outcome.max_density,
            "certificates": outcome.certificates,
        },
    });
    Ok(to_string_pretty(&doc)? + "\n")
}

pub fn search_csv(outcome: &SearchOutcome) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["modulus", "density", "size", "residues"])?;
    for cert in &outcome.certificates {
        writer.write_record([
            outcome.modulus.to_string(),
            cert.density().to_string(),
            cert.residues.len().to_string(),
            cert.residues.iter().map(u64::to_string).collect::<Vec<_>>().join("|"),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

pub struct ProfileOutcome {
    pub set: String,
    pub modulus: u64,
    pub window: u64,
    pub counts: Vec<u64>,
    pub deltas: Vec<f64>,
    pub u: Option<Vec<u64>>,
    pub v: Vec<u64>,
}

impl ProfileOutcome {
    pub fn build(label: &str, profile: &ResidueProfile, epsilon: f64) -> Result<Self> {
        let m = profile.modulus();
        let u = if m == 36 {
            Some(sqfs_core::residues::compute_u(profile, epsilon)?)
        } else {
            None
        };
        Ok(ProfileOutcome {
            set: label.to_string(),
            modulus: m,
            window: profile.window(),
            counts: (0..m).map(|a| profile.count(a)).collect(),
            deltas: (0..m).map(|a| profile.delta(a)).collect(),
            u,
            v: sqfs_core::residues::compute_v(profile),
        })
    }
}

pub fn profile_json(outcome: &ProfileOutcome) -> Result<String> {
    let doc: Value = json!({
        "meta": { "version": version() },
        "result": {
            "set": outcome.set,
            "modulus": outcome.modulus,
            "window": outcome.window,
            "counts": outcome.counts,
            "deltas": outcome.deltas,
            "u": outcome.u,
            "v": outcome.v,
        },
    });
    Ok(to_string_pretty(&doc)? + "\n")
}

pub fn profile_csv(outcome: &ProfileOutcome) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["residue", "count", "delta"])?;
    for a in 0..outcome.modulus as usize {
        writer.write_record([
            a.to_string(),
            outcome.counts[a].to_string(),
            outcome.deltas[a].to_string(),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}
