//! Reference graph maps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fibration::{ChartTerm, Domain, FibrationMap};
use crate::quat::ImagUnitQuaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fixture {
    /// `F ≡ i` on the whole sphere.
    Hopf,
    /// `F̂(z) = 0.5 z` on the unit cap.
    Vol05,
    /// `F̂(z) = 0.5 z̄` on the unit cap.
    Conf05,
    /// `F̂(z) = 0.3 z + 0.1 z̄` on the unit cap.
    Gen,
    /// `F̂(z) = z̄²` on the whole sphere; not distance-decreasing.
    FullAnti,
}

impl Fixture {
    pub const ALL: [Fixture; 5] = [Self::Hopf, Self::Vol05, Self::Conf05, Self::Gen, Self::FullAnti];
    pub const VALID: [Fixture; 4] = [Self::Hopf, Self::Vol05, Self::Conf05, Self::Gen];

    pub fn name(self) -> &'static str {
        match self {
            Self::Hopf => "HOPF",
            Self::Vol05 => "VOL05",
            Self::Conf05 => "CONF05",
            Self::Gen => "GEN",
            Self::FullAnti => "FULLANTI",
        }
    }

    pub fn map(self) -> FibrationMap {
        let unit_cap = Domain::Cap { radius: 1.0 };
        match self {
            Self::Hopf => FibrationMap::constant(ImagUnitQuaternion::i()),
            Self::Vol05 => FibrationMap::polynomial(vec![ChartTerm::new(1, 0, 0.5, 0.0)], unit_cap),
            Self::Conf05 => FibrationMap::polynomial(vec![ChartTerm::new(0, 1, 0.5, 0.0)], unit_cap),
            Self::Gen => FibrationMap::polynomial(
                vec![ChartTerm::new(1, 0, 0.3, 0.0), ChartTerm::new(0, 1, 0.1, 0.0)],
                unit_cap,
            ),
            Self::FullAnti => FibrationMap::polynomial(vec![ChartTerm::new(0, 2, 1.0, 0.0)], Domain::FullSphere),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown fixture `{s}`")))
    }
}
