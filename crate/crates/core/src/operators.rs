//! Strength distributions of the standard mutation operators.
//!
//! | spec string   | operator                                              |
//! |---------------|-------------------------------------------------------|
//! | `rls`         | flip exactly one bit                                  |
//! | `onepoint:k`  | flip exactly `k` bits                                 |
//! | `sbm:p`       | standard bit mutation, `Bin(n, p)` including `k = 0`  |
//! | `sbm>0:p`     | standard bit mutation resampled until `k >= 1`        |
//! | `sbm0to1:p`   | standard bit mutation with the `k = 0` mass moved to 1 |
//! | `fastga:b`    | `k^-b` on `1..=n/2` (heavy-tailed fast GA)            |
//! | `pow:b`       | `k^-b` on `1..=n`                                     |
//! | `binpos:p`    | `Bin(n, p)` conditioned on `k >= 1`                   |
//!
//! Rates may be written as `auto`, meaning `1/n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dp::{binomial_pmf, LnFactorials, StrengthDistribution};
use crate::error::{Error, Result};

/// Per-bit mutation rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    /// `1/n`
    PerBit,
    Fixed(f64),
}

impl Rate {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Rate::PerBit => 1.0 / n as f64,
            Rate::Fixed(p) => p,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::PerBit => f.write_str("auto"),
            Rate::Fixed(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Rate::PerBit);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("bad mutation rate `{s}`")))?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid(format!("mutation rate {p} is outside (0, 1]")));
        }
        Ok(Rate::Fixed(p))
    }
}

/// A baseline mutation operator, described by how it picks the strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BaselineSpec {
    OnePoint(usize),
    Sbm(Rate),
    SbmResample(Rate),
    SbmShift(Rate),
    FastGa(f64),
    PowerLaw(f64),
    CondBinomial(Rate),
}

impl BaselineSpec {
    pub const RLS: BaselineSpec = BaselineSpec::OnePoint(1);

    /// The operators of the standard regret comparison.
    pub fn standard_catalog() -> Vec<BaselineSpec> {
        let mut v = vec![
            BaselineSpec::RLS,
            BaselineSpec::Sbm(Rate::PerBit),
            BaselineSpec::SbmResample(Rate::PerBit),
            BaselineSpec::SbmShift(Rate::PerBit),
        ];
        for beta in [1.3, 1.5, 1.7] {
            v.push(BaselineSpec::FastGa(beta));
        }
        for beta in [1.3, 1.5, 1.7] {
            v.push(BaselineSpec::PowerLaw(beta));
        }
        v
    }
}

impl fmt::Display for BaselineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineSpec::OnePoint(1) => f.write_str("rls"),
            BaselineSpec::OnePoint(k) => write!(f, "onepoint:{k}"),
            BaselineSpec::Sbm(p) => write!(f, "sbm:{p}"),
            BaselineSpec::SbmResample(p) => write!(f, "sbm>0:{p}"),
            BaselineSpec::SbmShift(p) => write!(f, "sbm0to1:{p}"),
            BaselineSpec::FastGa(b) => write!(f, "fastga:{b}"),
            BaselineSpec::PowerLaw(b) => write!(f, "pow:{b}"),
            BaselineSpec::CondBinomial(p) => write!(f, "binpos:{p}"),
        }
    }
}

fn parse_beta(s: &str) -> Result<f64> {
    let b: f64 = s
        .parse()
        .map_err(|_| Error::invalid(format!("bad power-law exponent `{s}`")))?;
    if !(b > 1.0 && b.is_finite()) {
        return Err(Error::invalid(format!("power-law exponent {b} must exceed 1")));
    }
    Ok(b)
}

impl FromStr for BaselineSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rls" {
            return Ok(BaselineSpec::RLS);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("unknown operator `{s}`")))?;
        match kind {
            "onepoint" => {
                let k: usize = arg
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad strength `{arg}`")))?;
                if k == 0 {
                    return Err(Error::invalid("one-point strength must be at least 1"));
                }
                Ok(BaselineSpec::OnePoint(k))
            }
            "sbm" => Ok(BaselineSpec::Sbm(arg.parse()?)),
            "sbm>0" => Ok(BaselineSpec::SbmResample(arg.parse()?)),
            "sbm0to1" => Ok(BaselineSpec::SbmShift(arg.parse()?)),
            "fastga" => Ok(BaselineSpec::FastGa(parse_beta(arg)?)),
            "pow" => Ok(BaselineSpec::PowerLaw(parse_beta(arg)?)),
            "binpos" => Ok(BaselineSpec::CondBinomial(arg.parse()?)),
            _ => Err(Error::invalid(format!("unknown operator `{kind}`"))),
        }
    }
}

impl TryFrom<String> for BaselineSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BaselineSpec> for String {
    fn from(spec: BaselineSpec) -> String {
        spec.to_string()
    }
}

/// Builds the strength distribution of `spec` in dimension `n`.
pub fn make_baseline(spec: &BaselineSpec, n: usize) -> Result<StrengthDistribution> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    match *spec {
        BaselineSpec::OnePoint(k) => {
            if k == 0 || k > n {
                return Err(Error::invalid(format!("strength {k} is outside 1..={n}")));
            }
            StrengthDistribution::one_point(n, k)
        }
        BaselineSpec::Sbm(rate) => StrengthDistribution::normalized(binomial(n, checked(rate, n)?)),
        BaselineSpec::SbmResample(rate) | BaselineSpec::CondBinomial(rate) => {
            let p = checked(rate, n)?;
            let mut w = binomial(n, p);
            // 1 - (1 - p)^n
            let positive = -(n as f64 * (-p).ln_1p()).exp_m1();
            w[0] = 0.0;
            for x in &mut w[1..] {
                *x /= positive;
            }
            StrengthDistribution::normalized(w)
        }
        BaselineSpec::SbmShift(rate) => {
            let mut w = binomial(n, checked(rate, n)?);
            w[1] += w[0];
            w[0] = 0.0;
            StrengthDistribution::normalized(w)
        }
        BaselineSpec::FastGa(beta) => {
            let upper = n / 2;
            if upper == 0 {
                return Err(Error::invalid("the fast GA operator needs n >= 2"));
            }
            power_law(n, check_beta(beta)?, upper)
        }
        BaselineSpec::PowerLaw(beta) => power_law(n, check_beta(beta)?, n),
    }
}

fn checked(rate: Rate, n: usize) -> Result<f64> {
    let p = rate.resolve(n);
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("mutation rate {p} is outside (0, 1]")));
    }
    Ok(p)
}

fn check_beta(beta: f64) -> Result<f64> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("power-law exponent {beta} must exceed 1")));
    }
    Ok(beta)
}

fn binomial(n: usize, p: f64) -> Vec<f64> {
    let table = LnFactorials::new(n);
    (0..=n).map(|k| binomial_pmf(&table, n, p, k)).collect()
}

fn power_law(n: usize, beta: f64, upper: usize) -> Result<StrengthDistribution> {
    let mut w = vec![0.0; n + 1];
    for (k, x) in w.iter_mut().enumerate().take(upper + 1).skip(1) {
        *x = (k as f64).powf(-beta);
    }
    StrengthDistribution::normalized(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn conditional_binomial_three_bits() {
        let d = make_baseline(&"binpos:0.5".parse().unwrap(), 3).unwrap();
        assert!(close(d.weights(), &[0.0, 3.0 / 7.0, 3.0 / 7.0, 1.0 / 7.0], 1e-15));
    }

    #[test]
    fn rls_is_one_point() {
        for n in [1, 2, 10, 100] {
            let d = make_baseline(&BaselineSpec::RLS, n).unwrap();
            assert_eq!(d.weight(1), 1.0);
            assert_eq!(d.weights().iter().filter(|w| **w != 0.0).count(), 1);
        }
    }

    #[test]
    fn fast_ga_ten_bits() {
        let d = make_baseline(&BaselineSpec::FastGa(1.5), 10).unwrap();
        let c: f64 = (1..=5).map(|i| (i as f64).powf(-1.5)).sum();
        for k in 0..=10 {
            let want = if (1..=5).contains(&k) {
                (k as f64).powf(-1.5) / c
            } else {
                0.0
            };
            assert!((d.weight(k) - want).abs() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn fast_ga_odd_dimension_floors() {
        let d = make_baseline(&BaselineSpec::FastGa(1.3), 7).unwrap();
        assert!(d.weight(3) > 0.0);
        assert_eq!(d.weight(4), 0.0);
        assert!(make_baseline(&BaselineSpec::FastGa(1.3), 1).is_err());
    }

    #[test]
    fn sbm_variants() {
        let n = 10;
        let sbm = make_baseline(&BaselineSpec::Sbm(Rate::PerBit), n).unwrap();
        let res = make_baseline(&BaselineSpec::SbmResample(Rate::PerBit), n).unwrap();
        let shift = make_baseline(&BaselineSpec::SbmShift(Rate::PerBit), n).unwrap();
        let p0 = 0.9f64.powi(10);
        assert!((sbm.weight(0) - p0).abs() < 1e-14);
        assert_eq!(res.weight(0), 0.0);
        assert_eq!(shift.weight(0), 0.0);
        assert!((shift.weight(1) - sbm.weight(0) - sbm.weight(1)).abs() < 1e-15);
        for k in 2..=n {
            assert!((shift.weight(k) - sbm.weight(k)).abs() < 1e-15);
            assert!((res.weight(k) - sbm.weight(k) / (1.0 - p0)).abs() < 1e-15);
        }
    }

    #[test]
    fn parse_and_display() {
        for s in [
            "rls", "onepoint:3", "sbm:auto", "sbm>0:auto", "sbm0to1:0.25", "fastga:1.5",
            "pow:1.3", "binpos:0.5",
        ] {
            let spec: BaselineSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("onepoint:1".parse::<BaselineSpec>().unwrap(), BaselineSpec::RLS);
        for bad in ["", "rls:1", "sbm:0", "sbm:1.5", "fastga:1", "pow:abc", "onepoint:0", "foo:1"] {
            assert!(bad.parse::<BaselineSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn one_point_out_of_range() {
        assert!(make_baseline(&BaselineSpec::OnePoint(5), 4).is_err());
    }

    #[test]
    fn catalog_size() {
        assert_eq!(BaselineSpec::standard_catalog().len(), 10);
    }
}
