use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {x}")))
    }
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}

fn unknown(name: &str) -> Error {
    Error::InvalidParameter(format!("unknown parameter `{name}`"))
}

/// Two coupled oscillators, each attached to its own bosonic bath.
/// Defaults match the `fig2a` preset, in units of `Ω̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoModeBoson {
    pub omega_c: f64,
    pub omega_h: f64,
    pub g: f64,
    pub kappa_c: f64,
    pub kappa_h: f64,
    pub t_c: f64,
    pub t_h: f64,
}

impl Default for TwoModeBoson {
    fn default() -> Self {
        Self { omega_c: 1.0, omega_h: 1.0, g: 0.02, kappa_c: 0.02, kappa_h: 0.02, t_c: 0.8, t_h: 1.0 }
    }
}

impl TwoModeBoson {
    pub const PARAMS: &'static [&'static str] =
        &["omega_c", "omega_h", "omega_bar", "delta", "g", "kappa", "kappa_c", "kappa_h", "t_c", "t_h"];

    pub fn omega_bar(&self) -> f64 {
        0.5 * (self.omega_c + self.omega_h)
    }

    /// Half the detuning, `(Ω_h − Ω_c)/2`.
    pub fn delta(&self) -> f64 {
        0.5 * (self.omega_h - self.omega_c)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("omega_h", self.omega_h)?;
        positive("kappa_c", self.kappa_c)?;
        positive("kappa_h", self.kappa_h)?;
        positive("t_c", self.t_c)?;
        positive("t_h", self.t_h)?;
        finite("g", self.g)?;
        // both normal modes must stay above zero energy
        if self.omega_bar() - (self.delta().powi(2) + self.g * self.g).sqrt() <= 0.0 {
            return Err(Error::InvalidParameter("lower normal mode must have positive energy".into()));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "omega_c" => self.omega_c,
            "omega_h" => self.omega_h,
            "omega_bar" => self.omega_bar(),
            "delta" => self.delta(),
            "g" => self.g,
            "kappa" | "kappa_c" => self.kappa_c,
            "kappa_h" => self.kappa_h,
            "t_c" => self.t_c,
            "t_h" => self.t_h,
            _ => return Err(unknown(name)),
        })
    }

    /// `delta` and `omega_bar` move the two frequencies keeping the other fixed.
    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        match name {
            "omega_c" => self.omega_c = v,
            "omega_h" => self.omega_h = v,
            "omega_bar" => {
                let d = self.delta();
                self.omega_c = v - d;
                self.omega_h = v + d;
            }
            "delta" => {
                let m = self.omega_bar();
                self.omega_c = m - v;
                self.omega_h = m + v;
            }
            "g" => self.g = v,
            "kappa" => {
                self.kappa_c = v;
                self.kappa_h = v;
            }
            "kappa_c" => self.kappa_c = v,
            "kappa_h" => self.kappa_h = v,
            "t_c" => self.t_c = v,
            "t_h" => self.t_h = v,
            _ => return Err(unknown(name)),
        }
        Ok(())
    }
}

/// Two single-level dots in series between fermionic leads. Defaults are the
/// `fig4a` preset parameters, in units of `μ_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleDot {
    pub omega_l: f64,
    pub omega_r: f64,
    pub g: f64,
    pub kappa_l: f64,
    pub kappa_r: f64,
    pub t_l: f64,
    pub t_r: f64,
    pub mu_l: f64,
    pub mu_r: f64,
}

impl Default for DoubleDot {
    fn default() -> Self {
        Self {
            omega_l: 2.5,
            omega_r: 2.5,
            g: 0.05,
            kappa_l: 0.05,
            kappa_r: 0.05,
            t_l: 2.5,
            t_r: 1.0,
            mu_l: 0.0,
            mu_r: 1.0,
        }
    }
}

impl DoubleDot {
    pub const PARAMS: &'static [&'static str] =
        &["omega", "omega_l", "omega_r", "delta", "g", "kappa", "kappa_l", "kappa_r", "t_l", "t_r", "mu_l", "mu_r"];

    pub fn omega_bar(&self) -> f64 {
        0.5 * (self.omega_l + self.omega_r)
    }

    /// `(Ω_R − Ω_L)/2`.
    pub fn delta(&self) -> f64 {
        0.5 * (self.omega_r - self.omega_l)
    }

    pub fn validate(&self) -> Result<()> {
        finite("omega_l", self.omega_l)?;
        finite("omega_r", self.omega_r)?;
        finite("g", self.g)?;
        finite("mu_l", self.mu_l)?;
        finite("mu_r", self.mu_r)?;
        positive("kappa_l", self.kappa_l)?;
        positive("kappa_r", self.kappa_r)?;
        positive("t_l", self.t_l)?;
        positive("t_r", self.t_r)
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "omega" => self.omega_bar(),
            "omega_l" => self.omega_l,
            "omega_r" => self.omega_r,
            "delta" => self.delta(),
            "g" => self.g,
            "kappa" | "kappa_l" => self.kappa_l,
            "kappa_r" => self.kappa_r,
            "t_l" => self.t_l,
            "t_r" => self.t_r,
            "mu_l" => self.mu_l,
            "mu_r" => self.mu_r,
            _ => return Err(unknown(name)),
        })
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        match name {
            "omega" => {
                let d = self.delta();
                self.omega_l = v - d;
                self.omega_r = v + d;
            }
            "omega_l" => self.omega_l = v,
            "omega_r" => self.omega_r = v,
            "delta" => {
                let m = self.omega_bar();
                self.omega_l = m - v;
                self.omega_r = m + v;
            }
            "g" => self.g = v,
            "kappa" => {
                self.kappa_l = v;
                self.kappa_r = v;
            }
            "kappa_l" => self.kappa_l = v,
            "kappa_r" => self.kappa_r = v,
            "t_l" => self.t_l = v,
            "t_r" => self.t_r = v,
            "mu_l" => self.mu_l = v,
            "mu_r" => self.mu_r = v,
            _ => return Err(unknown(name)),
        }
        Ok(())
    }
}

/// Two oscillators with a periodically modulated exchange coupling, treated
/// in the rotating frame. The drive frequency is `ϖ = Ω_h − Ω_c − 2Δ`.
/// Defaults match the `fig5a` preset, in units of `Ω_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrivenBoson {
    pub omega_c: f64,
    pub omega_h: f64,
    pub g: f64,
    pub delta: f64,
    pub kappa_c: f64,
    pub kappa_h: f64,
    pub t_c: f64,
    pub t_h: f64,
}

impl Default for DrivenBoson {
    fn default() -> Self {
        Self { omega_c: 1.0, omega_h: 2.0, g: 0.1, delta: 0.0, kappa_c: 0.05, kappa_h: 0.05, t_c: 0.5, t_h: 2.5 }
    }
}

impl DrivenBoson {
    pub const PARAMS: &'static [&'static str] =
        &["omega_c", "omega_h", "g", "delta", "drive", "kappa", "kappa_c", "kappa_h", "t_c", "t_h"];

    /// `ϖ = Ω_h − Ω_c − 2Δ`.
    pub fn drive(&self) -> f64 {
        self.omega_h - self.omega_c - 2.0 * self.delta
    }

    /// Effective bath frequencies `(Ω_c + Δ, Ω_h − Δ)` of the local picture.
    pub fn local_frequencies(&self) -> (f64, f64) {
        (self.omega_c + self.delta, self.omega_h - self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("omega_h", self.omega_h)?;
        positive("kappa_c", self.kappa_c)?;
        positive("kappa_h", self.kappa_h)?;
        positive("t_c", self.t_c)?;
        positive("t_h", self.t_h)?;
        finite("g", self.g)?;
        finite("delta", self.delta)?;
        let s = (self.delta * self.delta + self.g * self.g).sqrt();
        let (c, h) = self.local_frequencies();
        if c - s <= 0.0 || h - s <= 0.0 {
            return Err(Error::InvalidParameter("shifted bath frequencies must stay positive".into()));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "omega_c" => self.omega_c,
            "omega_h" => self.omega_h,
            "g" => self.g,
            "delta" => self.delta,
            "drive" => self.drive(),
            "kappa" | "kappa_c" => self.kappa_c,
            "kappa_h" => self.kappa_h,
            "t_c" => self.t_c,
            "t_h" => self.t_h,
            _ => return Err(unknown(name)),
        })
    }

    /// Setting `drive` adjusts `Δ`.
    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        match name {
            "omega_c" => self.omega_c = v,
            "omega_h" => self.omega_h = v,
            "g" => self.g = v,
            "delta" => self.delta = v,
            "drive" => self.delta = 0.5 * (self.omega_h - self.omega_c - v),
            "kappa" => {
                self.kappa_c = v;
                self.kappa_h = v;
            }
            "kappa_c" => self.kappa_c = v,
            "kappa_h" => self.kappa_h = v,
            "t_c" => self.t_c = v,
            "t_h" => self.t_h = v,
            _ => return Err(unknown(name)),
        }
        Ok(())
    }
}

/// Degenerate double dot with interdot Coulomb repulsion `U`. Defaults are
/// the `fig7a` preset parameters, in units of `μ_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteractingDot {
    pub omega: f64,
    pub g: f64,
    pub u: f64,
    pub kappa_l: f64,
    pub kappa_r: f64,
    pub t_l: f64,
    pub t_r: f64,
    pub mu_l: f64,
    pub mu_r: f64,
}

impl Default for InteractingDot {
    fn default() -> Self {
        Self { omega: 2.5, g: 0.05, u: 0.5, kappa_l: 0.05, kappa_r: 0.05, t_l: 2.5, t_r: 1.0, mu_l: 0.0, mu_r: 1.0 }
    }
}

impl InteractingDot {
    pub const PARAMS: &'static [&'static str] =
        &["omega", "g", "u", "kappa", "kappa_l", "kappa_r", "t_l", "t_r", "mu_l", "mu_r"];

    pub fn validate(&self) -> Result<()> {
        finite("omega", self.omega)?;
        finite("g", self.g)?;
        finite("u", self.u)?;
        finite("mu_l", self.mu_l)?;
        finite("mu_r", self.mu_r)?;
        positive("kappa_l", self.kappa_l)?;
        positive("kappa_r", self.kappa_r)?;
        positive("t_l", self.t_l)?;
        positive("t_r", self.t_r)
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "omega" => self.omega,
            "g" => self.g,
            "u" => self.u,
            "kappa" | "kappa_l" => self.kappa_l,
            "kappa_r" => self.kappa_r,
            "t_l" => self.t_l,
            "t_r" => self.t_r,
            "mu_l" => self.mu_l,
            "mu_r" => self.mu_r,
            _ => return Err(unknown(name)),
        })
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        match name {
            "omega" => self.omega = v,
            "g" => self.g = v,
            "u" => self.u = v,
            "kappa" => {
                self.kappa_l = v;
                self.kappa_r = v;
            }
            "kappa_l" => self.kappa_l = v,
            "kappa_r" => self.kappa_r = v,
            "t_l" => self.t_l = v,
            "t_r" => self.t_r = v,
            "mu_l" => self.mu_l = v,
            "mu_r" => self.mu_r = v,
            _ => return Err(unknown(name)),
        }
        Ok(())
    }
}
