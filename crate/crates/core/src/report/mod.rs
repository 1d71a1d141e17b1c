//! Verification suites, run reports and sample export.

mod export;
mod spec_file;
mod suite;
mod tolerance;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fibration::{MapClass, MapVerdict};

pub use export::{export_samples, ExportKind};
pub use spec_file::{parse_map, FibrationSpec, SpecKind};
pub use suite::{classify_fibration, run_verification_suite, Suite, SuiteConfig, Target};
pub use tolerance::{Profile, Tolerances, PROFILE_ENV};

/// Sign and labelling conventions every result depends on.
pub const CONVENTIONS: &str = "\
basis: (1, i, j, k) = (e0, e1, e2, e3)
volume form: vol(a, b, c, d) = -det[a, b, c, d]
hodge: *e01 = -e23, *e02 = -e31, *e03 = -e12
grassmann: plane (m, n) = {x : m x = x n}, oriented by (x, m x); m anti-self-dual, n self-dual
cross3: <cross3(p, v, u), y> = vol(p, v, u, y)
charts: stereographic from -k; S2- chart z = (a1 + i a2) / (1 + a3), S2+ chart conjugated
rotations: on T S2- u -> m x u, on T S2+ u -> -(n x u)
fibre: a p = p F(a), field X(p) = a p
dlambda(u, w) = <beta u, w> - <u, beta w>
dalpha(xi, eta) = <xi_V, eta_H> - <xi_H, eta_V>
ricci: mean sectional curvature, Ric(X) = 1
";

/// Lower-case hex SHA-256 of [`CONVENTIONS`].
pub fn conventions_hash() -> String {
    Sha256::digest(CONVENTIONS.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
}

impl Relation {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Self::AtMost => value <= threshold,
            Self::AtLeast => value >= threshold,
            Self::Below => value < threshold,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AtMost => "<=",
            Self::AtLeast => ">=",
            Self::Below => "<",
        })
    }
}

/// One check. Negative controls carry `expect_pass = false` and pass when
/// the bound is violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: Option<f64>,
    pub relation: Relation,
    pub threshold: f64,
    pub expect_pass: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64, expect_pass: bool) -> Self {
        let holds = value.is_finite() && relation.holds(value, threshold);
        Self {
            name: name.into(),
            value: Some(value),
            relation,
            threshold,
            expect_pass,
            pass: holds == expect_pass,
            error: None,
        }
    }

    pub fn from_result(
        name: impl Into<String>,
        value: Result<f64, String>,
        relation: Relation,
        threshold: f64,
        expect_pass: bool,
    ) -> Self {
        match value {
            Ok(v) => Self::new(name, v, relation, threshold, expect_pass),
            Err(e) => Self::failed(name, relation, threshold, expect_pass, e),
        }
    }

    pub fn failed(
        name: impl Into<String>,
        relation: Relation,
        threshold: f64,
        expect_pass: bool,
        error: String,
    ) -> Self {
        Self {
            name: name.into(),
            value: None,
            relation,
            threshold,
            expect_pass,
            pass: false,
            error: Some(error),
        }
    }

    /// A yes/no condition recorded as a count of violations.
    pub fn condition(name: impl Into<String>, violations: usize) -> Self {
        Self::new(name, violations as f64, Relation::AtMost, 0.0, true)
    }

    /// The bound itself holds.
    pub fn holds(&self) -> bool {
        self.error.is_none() && self.pass == self.expect_pass
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let control = if self.expect_pass { "" } else { " (expected violation)" };
        match (&self.value, &self.error) {
            (_, Some(e)) => write!(f, "{verdict} {}: error: {e}", self.name),
            (Some(v), None) => write!(
                f,
                "{verdict} {}: {v:.3e} {} {:.3e}{control}",
                self.name, self.relation, self.threshold
            ),
            (None, None) => write!(f, "{verdict} {}", self.name),
        }
    }
}

/// Classification of a field from its defect scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldClass {
    Hopf,
    VolumePreserving,
    Conformal,
    Generic,
}

impl FieldClass {
    pub fn from_flags(divergence_free: bool, conformal: bool) -> Self {
        match (divergence_free, conformal) {
            (true, true) => Self::Hopf,
            (true, false) => Self::VolumePreserving,
            (false, true) => Self::Conformal,
            (false, false) => Self::Generic,
        }
    }

    /// The field class a map verdict predicts.
    pub fn expected_from(verdict: MapVerdict) -> Self {
        match verdict {
            MapVerdict::Constant => Self::Hopf,
            MapVerdict::Holomorphic => Self::VolumePreserving,
            MapVerdict::AntiHolomorphic => Self::Conformal,
            MapVerdict::Generic => Self::Generic,
        }
    }

    pub fn sigma_swapped(self) -> Self {
        match self {
            Self::VolumePreserving => Self::Conformal,
            Self::Conformal => Self::VolumePreserving,
            c => c,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Hopf => "hopf",
            Self::VolumePreserving => "volume-preserving",
            Self::Conformal => "conformal",
            Self::Generic => "generic",
        }
    }
}

impl fmt::Display for FieldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub name: String,
    pub map_class: Option<MapClass>,
    pub field_class: Option<FieldClass>,
    /// Set when the map is not distance-decreasing on its domain.
    pub rejected: bool,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl TargetReport {
    fn finish(mut self) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub conventions_sha256: String,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub targets: Vec<TargetReport>,
    /// Checks that span several targets or none.
    pub global: Vec<CheckRecord>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn checks(&self) -> impl Iterator<Item = (&str, &CheckRecord)> {
        self.targets
            .iter()
            .flat_map(|t| t.checks.iter().map(move |c| (t.name.as_str(), c)))
            .chain(self.global.iter().map(|c| ("global", c)))
    }

    pub fn find(&self, target: &str, check: &str) -> Option<&CheckRecord> {
        self.checks()
            .find(|(t, c)| *t == target && c.name == check)
            .map(|(_, c)| c)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (target, c) in self.checks() {
            out.push_str(&format!("[{target}] {c}\n"));
        }
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict}: {} checks\n", self.checks().count()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_controls_pass_on_violation() {
        let c = CheckRecord::new("j-invariant", 0.5, Relation::AtMost, 1e-4, false);
        assert!(c.pass);
        let c = CheckRecord::new("j-invariant", 1e-6, Relation::AtMost, 1e-4, false);
        assert!(!c.pass);
        let c = CheckRecord::new("nan", f64::NAN, Relation::AtMost, 1.0, true);
        assert!(!c.pass);
        let c = CheckRecord::failed("err", Relation::AtMost, 1.0, false, "boom".into());
        assert!(!c.pass);
    }

    #[test]
    fn conventions_hash_is_stable_hex() {
        let h = conventions_hash();
        assert_eq!(h.len(), 64);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(h, conventions_hash());
    }
}
