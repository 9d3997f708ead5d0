//! Claim ledger types shared by the verification and analytic modules.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// The check could not decide (window too small, precondition unmet);
    /// distinct from a refutation.
    Inconclusive,
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimStatus::Pass => write!(f, "pass"),
            ClaimStatus::Fail => write!(f, "fail"),
            ClaimStatus::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// One named, checked claim. Failures always carry a witness or a note
/// explaining the refutation; quantitative passes carry the measured value
/// and the bound it was compared against.
#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub status: ClaimStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall-clock time; excluded from determinism comparisons.
    pub elapsed_ms: u64,
}

impl Claim {
    pub fn new(name: impl Into<String>, status: ClaimStatus) -> Self {
        Claim {
            name: name.into(),
            params: BTreeMap::new(),
            status,
            witness: None,
            value: None,
            bound: None,
            note: None,
            elapsed_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn witness(mut self, w: Vec<u64>) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == ClaimStatus::Pass
    }
}

/// Ordered ledger of claims from a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub claims: Vec<Claim>,
}

impl VerificationReport {
    pub fn new(claims: Vec<Claim>) -> Self {
        VerificationReport { claims }
    }

    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != ClaimStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| c.status == ClaimStatus::Fail)
    }

    /// Copy with elapsed times zeroed, for byte-identical comparisons.
    pub fn without_timing(&self) -> Self {
        let mut claims = self.claims.clone();
        for c in &mut claims {
            c.elapsed_ms = 0;
        }
        VerificationReport { claims }
    }
}
