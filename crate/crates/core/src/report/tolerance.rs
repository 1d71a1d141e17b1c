use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming the default tolerance profile.
pub const PROFILE_ENV: &str = "GCFLOW_TOL_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Standard,
    /// Residual bounds ten times tighter.
    Strict,
    /// Residual bounds ten times looser.
    Relaxed,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Strict => "strict",
            Self::Relaxed => "relaxed",
        }
    }

    fn factor(self) -> f64 {
        match self {
            Self::Standard => 1.0,
            Self::Strict => 0.1,
            Self::Relaxed => 10.0,
        }
    }

    /// The profile named by [`PROFILE_ENV`], or the standard one when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PROFILE_ENV) {
            Ok(v) if !v.is_empty() => v.parse(),
            _ => Ok(Self::Standard),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Standard, Self::Strict, Self::Relaxed]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown tolerance profile `{s}`")))
    }
}

/// Thresholds of every check. Residual bounds scale with the profile;
/// the lower bounds of the witness checks do not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub profile: Profile,
    /// `‖∇_X X‖`
    pub geodesic: f64,
    /// `|λ(X) − 1|`, a rounding-level bound.
    pub lambda: f64,
    /// `‖ι_X dλ‖`
    pub reeb: f64,
    /// Lower bound for `det(dλ|X⊥)`.
    pub contact_min: f64,
    /// Agreement of the two `dλ` routes and of the pullback identity.
    pub dlambda: f64,
    /// Trace-formula residual.
    pub key: f64,
    /// `|div X|` for divergence-free fields.
    pub div: f64,
    /// `‖β² + Id‖` for invariant fields.
    pub jdefect: f64,
    /// Conformality defects.
    pub conf: f64,
    /// Holomorphy thresholds of the map classifier.
    pub classify: f64,
    /// Commutation of the linearized flow with both structures.
    pub commute: f64,
    /// Flow invariance of `X_*(X⊥)`.
    pub e_invariance: f64,
    /// Preservation of `dα` by the linearized flow.
    pub symplectic: f64,
    /// Fibre location and plane recovery round trips.
    pub roundtrip: f64,
    /// Lower bound for `|dα(X_* u1, X_* u2)|`.
    pub non_lagrangian_min: f64,
    /// A field is divergent if `|div X|` exceeds this somewhere.
    pub div_witness: f64,
    /// A field is not invariant if `‖β² + Id‖` exceeds this somewhere.
    pub jdefect_witness: f64,
    /// A field is not conformal if all three defects exceed this somewhere.
    pub conf_witness: f64,
    /// Rejection bound for maps that fail to be distance-decreasing.
    pub dilatation_reject: f64,
}

impl Tolerances {
    pub fn standard() -> Self {
        Self {
            profile: Profile::Standard,
            geodesic: 1e-6,
            lambda: 8.0 * f64::EPSILON,
            reeb: 1e-5,
            contact_min: 0.1,
            dlambda: 1e-5,
            key: 1e-4,
            div: 1e-5,
            jdefect: 1e-4,
            conf: 1e-4,
            classify: 1e-6,
            commute: 1e-8,
            e_invariance: 1e-6,
            symplectic: 1e-10,
            roundtrip: 1e-8,
            non_lagrangian_min: 0.05,
            div_witness: 1e-3,
            jdefect_witness: 1e-2,
            conf_witness: 1e-3,
            dilatation_reject: 1.0 - 1e-3,
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        let k = profile.factor();
        let s = Self::standard();
        Self {
            profile,
            geodesic: s.geodesic * k,
            lambda: s.lambda * k,
            reeb: s.reeb * k,
            dlambda: s.dlambda * k,
            key: s.key * k,
            div: s.div * k,
            jdefect: s.jdefect * k,
            conf: s.conf * k,
            classify: s.classify * k,
            commute: s.commute * k,
            e_invariance: s.e_invariance * k,
            symplectic: s.symplectic * k,
            roundtrip: s.roundtrip * k,
            ..s
        }
    }

    /// Names accepted by [`Tolerances::set`].
    pub const NAMES: [&'static str; 19] = [
        "geodesic",
        "lambda",
        "reeb",
        "contact-min",
        "dlambda",
        "key",
        "div",
        "jdefect",
        "conf",
        "classify",
        "commute",
        "e-invariance",
        "symplectic",
        "roundtrip",
        "non-lagrangian-min",
        "div-witness",
        "jdefect-witness",
        "conf-witness",
        "dilatation-reject",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "geodesic" => &mut self.geodesic,
            "lambda" => &mut self.lambda,
            "reeb" => &mut self.reeb,
            "contact-min" => &mut self.contact_min,
            "dlambda" => &mut self.dlambda,
            "key" => &mut self.key,
            "div" => &mut self.div,
            "jdefect" => &mut self.jdefect,
            "conf" => &mut self.conf,
            "classify" => &mut self.classify,
            "commute" => &mut self.commute,
            "e-invariance" => &mut self.e_invariance,
            "symplectic" => &mut self.symplectic,
            "roundtrip" => &mut self.roundtrip,
            "non-lagrangian-min" => &mut self.non_lagrangian_min,
            "div-witness" => &mut self.div_witness,
            "jdefect-witness" => &mut self.jdefect_witness,
            "conf-witness" => &mut self.conf_witness,
            "dilatation-reject" => &mut self.dilatation_reject,
            _ => return None,
        })
    }

    /// Overrides one threshold; values must be positive and finite.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Config(format!(
                "tolerance `{name}` must be positive, got {value}"
            )));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::Config(format!("unknown tolerance `{name}`")))?;
        *slot = value;
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::standard()
    }
}
