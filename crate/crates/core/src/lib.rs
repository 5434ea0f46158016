//! Individually fair k-median / k-means clustering in the presence of outliers.
//!
//! The pipeline solves a linear-programming relaxation in which every point may
//! be fractionally declared an outlier, thresholds the outlier variables
//! ([`outround`]), repairs the fractional assignment so that inliers stay
//! within twice their fair radius, and finally rounds to at most `k` integral
//! centers ([`fairround`]). [`oracle`] enumerates tiny instances exactly and is
//! used as ground truth by the test suites.
//!
//! ```no_run
//! use fairclust::{dataio, metric, lp, outround, fairround, Exec, Power};
//!
//! let data = dataio::load_csv("bank.csv", &["age", "balance", "duration"]).unwrap();
//! let data = dataio::standard_scale(&data).unwrap();
//! let ctx = metric::build_metric(&data, 5).unwrap();
//! let inst = lp::build_lp(&ctx, Power::Two, 5, 10, 1.0).unwrap();
//! let report = lp::solve_lp(&inst);
//! let sol = report.solution.unwrap();
//! let rounded = outround::out_round(&ctx, &sol, 0.0).unwrap();
//! let result = fairround::fair_round(&ctx, &rounded, Power::Two, Exec::default()).unwrap();
//! println!("{:?}", result.centers);
//! ```

pub mod dataio;
mod error;
mod exec;
pub mod fairround;
pub mod harness;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod outround;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Exec;

use serde::{Deserialize, Serialize};
use std::fmt;

/// Exponent applied to distances in the clustering objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Power {
    /// k-median.
    One,
    /// k-means.
    Two,
}

impl Power {
    pub fn exponent(self) -> u8 {
        match self {
            Power::One => 1,
            Power::Two => 2,
        }
    }

    #[inline]
    pub fn apply(self, d: f64) -> f64 {
        match self {
            Power::One => d,
            Power::Two => d * d,
        }
    }
}

impl TryFrom<u8> for Power {
    type Error = Error;

    fn try_from(p: u8) -> Result<Self> {
        match p {
            1 => Ok(Power::One),
            2 => Ok(Power::Two),
            other => Err(Error::InvalidParameter(format!(
                "power must be 1 or 2, got {other}"
            ))),
        }
    }
}

impl From<Power> for u8 {
    fn from(p: Power) -> u8 {
        p.exponent()
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exponent())
    }
}

impl std::str::FromStr for Power {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("power must be 1 or 2, got `{s}`")))?;
        Power::try_from(p)
    }
}
