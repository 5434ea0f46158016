//! Seeded synthetic datasets shaped like the usual fair-clustering benchmarks
//! (bank marketing, census income, hospital readmission). Useful for tests
//! and demos when the original CSVs are not at hand.

use crate::dataio::Dataset;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetStyle {
    /// age, balance, duration
    Bank,
    /// age, fnlwgt, education-num, capital-gain, hours-per-week
    Adult,
    /// age, time-in-hospital (both coarse integers, many ties)
    Diabetes,
}

impl DatasetStyle {
    pub const ALL: [DatasetStyle; 3] = [DatasetStyle::Bank, DatasetStyle::Adult, DatasetStyle::Diabetes];

    pub fn name(self) -> &'static str {
        match self {
            DatasetStyle::Bank => "bank",
            DatasetStyle::Adult => "adult",
            DatasetStyle::Diabetes => "diabetes",
        }
    }

    pub fn features(self) -> &'static [&'static str] {
        match self {
            DatasetStyle::Bank => &["age", "balance", "duration"],
            DatasetStyle::Adult => &["age", "fnlwgt", "education-num", "capital-gain", "hours-per-week"],
            DatasetStyle::Diabetes => &["age", "time-in-hospital"],
        }
    }
}

impl FromStr for DatasetStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetStyle::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown dataset style `{s}`")))
    }
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("valid normal")
}

fn lognormal(mu: f64, sigma: f64) -> LogNormal<f64> {
    LogNormal::new(mu, sigma).expect("valid lognormal")
}

pub fn generate(style: DatasetStyle, n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| match style {
            DatasetStyle::Bank => {
                let age = normal(41.0, 10.6).sample(&mut rng).clamp(18.0, 95.0).round();
                let balance = if rng.gen_bool(0.08) {
                    -normal(0.0, 400.0).sample(&mut rng).abs().round()
                } else {
                    lognormal(6.6, 1.4).sample(&mut rng).min(100_000.0).round()
                };
                let duration = Exp::new(1.0f64 / 258.0).unwrap().sample(&mut rng).min(5000.0).round();
                vec![age, balance, duration]
            }
            DatasetStyle::Adult => {
                let age = normal(38.6, 13.6).sample(&mut rng).clamp(17.0, 90.0).round();
                let fnlwgt = lognormal(12.0, 0.5).sample(&mut rng).round();
                let edu = normal(10.1, 2.6).sample(&mut rng).clamp(1.0, 16.0).round();
                let gain = if rng.gen_bool(0.08) {
                    lognormal(8.5, 1.0).sample(&mut rng).min(99_999.0).round()
                } else {
                    0.0
                };
                let hours = normal(40.4, 12.3).sample(&mut rng).clamp(1.0, 99.0).round();
                vec![age, fnlwgt, edu, gain, hours]
            }
            DatasetStyle::Diabetes => {
                // ten-year age brackets, reported at the bracket midpoint
                let bracket = normal(6.2, 1.6).sample(&mut rng).clamp(0.0, 9.0).round();
                let age = bracket * 10.0 + 5.0;
                let stay = (1.0 + lognormal(1.0, 0.7).sample(&mut rng)).clamp(1.0, 14.0).round();
                vec![age, stay]
            }
        })
        .collect();
    Dataset::from_rows(style.features().iter().copied(), &rows)
}
