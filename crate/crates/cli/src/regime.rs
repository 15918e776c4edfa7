//! Cooling-time regimes of a long chain with one cooled link.
//!
//! With mean free path `ℓ`, sink strength `A = ℓγ` and diffusion constant
//! `D`, a chain of extent `L` is ballistic for `L < ℓ`, decays exponentially
//! with time `t_A = L/A` for `ℓ < L < D/A`, and for `L > D/A` shows a
//! `t^{-1/2}` survival before the exponential tail beyond `t_D = L²/D`.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Ballistic,
    DiffusiveIntermediate,
    DiffusiveLarge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeEstimate {
    #[serde(rename = "L")]
    pub l: f64,
    pub ell: f64,
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub regime: Regime,
    /// `L/A`; not defined in the ballistic regime.
    pub t_a: Option<f64>,
    /// `L²/D`; not defined in the ballistic regime.
    pub t_d: Option<f64>,
    /// Set when `L` is within a factor of [`CROSSOVER_FACTOR`] of a regime
    /// boundary.
    pub crossover: bool,
}

pub const CROSSOVER_FACTOR: f64 = 3.0;

pub fn regime_classify(l: f64, ell: f64, gamma: f64, d: f64) -> Result<RegimeEstimate> {
    for (name, v) in [("L", l), ("ell", ell), ("gamma", gamma), ("D", d)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::config(format!("regime.{name} must be positive, found {v}")));
        }
    }
    let a = ell * gamma;
    let upper = d / a;
    let regime = if l < ell {
        Regime::Ballistic
    } else if l < upper {
        Regime::DiffusiveIntermediate
    } else {
        Regime::DiffusiveLarge
    };
    let near = |boundary: f64| {
        let r = l / boundary;
        r > 1.0 / CROSSOVER_FACTOR && r < CROSSOVER_FACTOR
    };
    let (t_a, t_d) = match regime {
        Regime::Ballistic => (None, None),
        _ => (Some(l / a), Some(l * l / d)),
    };
    Ok(RegimeEstimate {
        l,
        ell,
        gamma,
        a,
        d,
        regime,
        t_a,
        t_d,
        crossover: near(ell) || near(upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system_is_ballistic() {
        let r = regime_classify(0.1, 10.0, 0.1, 1.0).unwrap();
        assert_eq!(r.regime, Regime::Ballistic);
        assert_eq!((r.t_a, r.t_d), (None, None));
    }

    #[test]
    fn large_system() {
        let r = regime_classify(100.0, 1.0, 0.1, 1.0).unwrap();
        assert!((r.a - 0.1).abs() < 1e-15);
        assert_eq!(r.regime, Regime::DiffusiveLarge);
        assert!((r.t_d.unwrap() - 1e4).abs() < 1e-9);
        assert!(!r.crossover);
    }

    #[test]
    fn intermediate_system() {
        let r = regime_classify(5.0, 0.1, 0.1, 0.1).unwrap();
        assert!((r.a - 0.01).abs() < 1e-15);
        assert_eq!(r.regime, Regime::DiffusiveIntermediate);
        assert!((r.t_a.unwrap() - 500.0).abs() < 1e-9);
        // D/A = 10 is within a factor 3 of L = 5
        assert!(r.crossover);
    }

    #[test]
    fn nonpositive_inputs_fail() {
        assert!(regime_classify(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(regime_classify(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(regime_classify(1.0, f64::NAN, 1.0, 1.0).is_err());
    }
}
