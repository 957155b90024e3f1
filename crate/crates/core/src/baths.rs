//! Reservoir occupations and wide-band golden-rule rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
}

/// A thermal reservoir in the wide-band limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub id: String,
    pub temperature: f64,
    pub chemical_potential: f64,
    pub coupling: f64,
    pub statistics: Statistics,
}

impl BathSpec {
    pub fn new(
        id: impl Into<String>,
        statistics: Statistics,
        temperature: f64,
        chemical_potential: f64,
        coupling: f64,
    ) -> Result<Self> {
        let b = Self { id: id.into(), temperature, chemical_potential, coupling, statistics };
        b.validate()?;
        Ok(b)
    }

    pub fn bose(id: impl Into<String>, temperature: f64, coupling: f64) -> Result<Self> {
        Self::new(id, Statistics::Bose, temperature, 0.0, coupling)
    }

    pub fn fermi(id: impl Into<String>, temperature: f64, chemical_potential: f64, coupling: f64) -> Result<Self> {
        Self::new(id, Statistics::Fermi, temperature, chemical_potential, coupling)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!("bath {}: temperature must be > 0", self.id)));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidParameter(format!("bath {}: coupling must be > 0", self.id)));
        }
        if !self.chemical_potential.is_finite() {
            return Err(Error::InvalidParameter(format!("bath {}: chemical potential must be finite", self.id)));
        }
        if self.statistics == Statistics::Bose && self.chemical_potential != 0.0 {
            return Err(Error::InvalidParameter(format!("bath {}: bosonic baths need μ = 0", self.id)));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// Coupling strength at energy `ω`. Constant in the wide-band limit.
    pub fn coupling_at(&self, _omega: f64) -> f64 {
        self.coupling
    }
}

/// `1/(e^x + 1)` without overflow.
pub fn fermi_function(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// `1/(e^x − 1)` for `x > 0`; exactly 0 once `e^x` overflows.
pub fn bose_function(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Mean occupation of a bath mode at energy `ω`.
pub fn occupation(bath: &BathSpec, omega: f64) -> Result<f64> {
    match bath.statistics {
        Statistics::Fermi => Ok(fermi_function((omega - bath.chemical_potential) / bath.temperature)),
        Statistics::Bose => {
            if omega <= 0.0 {
                return Err(Error::InvalidParameter(format!("Bose occupation needs ω > 0, got {omega}")));
            }
            Ok(bose_function(omega / bath.temperature))
        }
    }
}

/// Rates multiplying `D[S]` (emission) and `D[S†]` (absorption).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub emission: f64,
    pub absorption: f64,
}

/// Golden-rule rates for a jump at frequency `ω` that removes `charge` particles.
///
/// Absorption over emission equals `exp(−β(ω − μ·charge))`.
pub fn rate(bath: &BathSpec, omega: f64, charge: i32) -> Result<RatePair> {
    let kappa = bath.coupling_at(omega);
    let x = (omega - bath.chemical_potential * charge as f64) / bath.temperature;
    match bath.statistics {
        Statistics::Fermi => {
            Ok(RatePair { emission: kappa * fermi_function(-x), absorption: kappa * fermi_function(x) })
        }
        Statistics::Bose => {
            if x <= 0.0 {
                return Err(Error::InvalidParameter(format!("Bose rate needs ω > 0, got {omega}")));
            }
            let n = bose_function(x);
            let n1 = -1.0 / (-x).exp_m1();
            Ok(RatePair { emission: kappa * n1, absorption: kappa * n })
        }
    }
}
