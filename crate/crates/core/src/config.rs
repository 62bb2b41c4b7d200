//! Run configuration shared by the batteries and the command line.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::GammaGenerator;
use crate::padic::max_relative_precision;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    pub p: u32,
    pub prec: i32,
    pub lo: i32,
    pub hi: i32,
    /// `χ(γ)`; the smallest generator of `(Z/p^2)^×` when absent.
    pub chi_gamma: Option<i64>,
    pub search_limit: u32,
    /// Digits a pivot must keep above its precision floor.
    pub margin: i32,
    pub seed: u64,
    /// Random samples per identity.
    pub samples: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { p: 5, prec: 12, lo: -10, hi: 80, chi_gamma: None, search_limit: 10, margin: 3, seed: 0, samples: 20 }
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl Config {
    pub fn with_prime(p: u32) -> Self {
        Config { p, ..Self::default() }
    }

    /// `p` an odd prime, `6 ≤ N` within the representable range, and
    /// `lo ≤ -2`, `hi ≥ 2` so that pairings see degrees `-2..=1`.
    pub fn validate(&self) -> Result<()> {
        if self.p == 2 || !is_prime(self.p) {
            return Err(Error::Config(format!("p = {} must be an odd prime", self.p)));
        }
        let cap = max_relative_precision(self.p) - 2;
        if self.prec < 6 || self.prec > cap {
            return Err(Error::Config(format!("precision {} outside [6, {cap}] for p = {}", self.prec, self.p)));
        }
        if self.lo > -2 || self.hi < 2 {
            return Err(Error::Config(format!("window [{}, {}] must contain [-2, 2]", self.lo, self.hi)));
        }
        if self.margin < 1 || self.margin >= self.prec {
            return Err(Error::Config(format!("margin {} outside [1, precision)", self.margin)));
        }
        self.gamma().map(|_| ())
    }

    pub fn gamma(&self) -> Result<GammaGenerator> {
        match self.chi_gamma {
            Some(a) => GammaGenerator::new(self.p, a),
            None => Ok(GammaGenerator::default_for(self.p)),
        }
    }
}

/// `lo:hi`, e.g. `-10:80`.
pub fn parse_window(s: &str) -> Result<(i32, i32)> {
    let bad = || Error::Config(format!("window must read lo:hi, got \"{s}\""));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Config::default().validate().is_ok());
        assert!(Config::with_prime(2).validate().is_err());
        assert!(Config::with_prime(9).validate().is_err());
        assert!(Config { prec: 5, ..Config::default() }.validate().is_err());
        assert!(Config { lo: -1, ..Config::default() }.validate().is_err());
        assert!(Config { hi: 1, ..Config::default() }.validate().is_err());
        assert!(Config { chi_gamma: Some(4), ..Config::default() }.validate().is_err());
        assert!(Config { p: 7, chi_gamma: Some(3), ..Config::default() }.validate().is_ok());
        assert_eq!(parse_window("-10:80").unwrap(), (-10, 80));
        assert!(parse_window("3").is_err());
        assert!(parse_window("5:1").is_err());
    }
}
