//! Named verification suites, as run by `meslab verify`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::Dimension;
use crate::error::{Error, Result};
use crate::geometry::verify_dapg;
use crate::mes::{verify_balance, verify_leaky, verify_line_states, verify_operators, verify_overlaps, MesBasis};
use crate::mub::{verify_completeness, verify_conjugation, verify_eigen, verify_unbiased};
use crate::protocols::verify_protocols;
use crate::report::SuiteReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Mub,
    Geometry,
    Mes,
    Balance,
    Protocols,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["mub", "geometry", "mes", "balance", "protocols", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mub" => Suite::Mub,
            "geometry" => Suite::Geometry,
            "mes" => Suite::Mes,
            "balance" => Suite::Balance,
            "protocols" => Suite::Protocols,
            "all" => Suite::All,
            _ => return Err(Error::InvalidConfig(format!("unknown suite '{s}'"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

/// Runs one suite (or all of them) and returns the reports in a fixed order.
pub fn run_suite(dim: Dimension, suite: Suite) -> Result<Vec<SuiteReport>> {
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let mut out = Vec::new();
    if wants(Suite::Mub) {
        out.extend([
            verify_unbiased(dim),
            verify_eigen(dim),
            verify_conjugation(dim),
            verify_completeness(dim),
        ]);
    }
    if wants(Suite::Geometry) {
        out.push(verify_dapg(dim));
    }
    let needs_basis = wants(Suite::Mes) || wants(Suite::Balance) || wants(Suite::Protocols);
    let basis = if needs_basis { Some(MesBasis::new(dim)?) } else { None };
    if let Some(basis) = &basis {
        if wants(Suite::Mes) {
            out.extend([
                verify_line_states(basis),
                verify_operators(dim),
                verify_overlaps(basis),
                verify_leaky(basis),
            ]);
        }
        if wants(Suite::Balance) {
            out.push(verify_balance(basis));
        }
        if wants(Suite::Protocols) {
            out.push(verify_protocols(basis));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn all_passes_for_d3() {
        let reports = run_suite(Dimension::new(3).unwrap(), Suite::All).unwrap();
        assert_eq!(reports.len(), 11);
        for r in &reports {
            assert!(r.passed, "{r:#?}");
        }
    }
}
