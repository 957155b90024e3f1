//! Sweep presets with the parameters of the published figures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Method, ModelKind, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Sweep {
    pub fn new(param: &str, start: f64, stop: f64, points: usize, spacing: Spacing) -> Self {
        Self { param: param.into(), start, stop, points, spacing }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::InvalidParameter("a sweep needs at least one point".into()));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParameter("sweep bounds must be finite".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let n = (self.points - 1) as f64;
        match self.spacing {
            Spacing::Linear => {
                Ok((0..self.points).map(|i| self.start + (self.stop - self.start) * i as f64 / n).collect())
            }
            Spacing::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(Error::InvalidParameter("log sweeps need positive bounds".into()));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                Ok((0..self.points).map(|i| (a + (b - a) * i as f64 / n).exp()).collect())
            }
        }
    }
}

/// A figure: base model, sweep and approaches.
#[derive(Debug, Clone)]
pub struct Figure {
    pub name: &'static str,
    pub model: ModelSpec,
    pub sweep: Sweep,
    pub methods: Vec<Method>,
    pub outputs: Vec<&'static str>,
}

pub const FIGURES: [&str; 12] =
    ["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b"];

fn set(kind: ModelKind, params: &[(&str, f64)]) -> ModelSpec {
    let mut m = ModelSpec::default_for(kind);
    for (k, v) in params {
        m.set(k, *v).expect("preset parameter names are valid");
    }
    m
}

pub fn figure(name: &str) -> Result<Figure> {
    use Method::*;
    use ModelKind::*;
    use Spacing::*;
    let me_t = || vec![Local, Global, PerLind, Transmission];
    let (model, sweep, methods, outputs) = match name {
        "fig2a" => (set(TwoModeBoson, &[]), Sweep::new("g", 0.002, 0.6, 40, Log), me_t(), vec!["J_h"]),
        "fig2b" => (set(TwoModeBoson, &[("g", 0.1)]), Sweep::new("t_c", 0.05, 1.0, 39, Linear), me_t(), vec!["J_h"]),
        "fig3a" | "fig3b" => {
            let g = if name == "fig3a" { 0.02 } else { 0.1 };
            (
                set(TwoModeBoson, &[("g", g)]),
                Sweep::new("delta", 0.0, 0.25, 51, Linear),
                vec![ConventionalLocal, Local, Global, PerLind, Transmission],
                vec!["J_h"],
            )
        }
        "fig4a" => (set(DoubleDot, &[]), Sweep::new("g", 0.005, 1.5, 40, Log), me_t(), vec!["J_h", "P_S", "eta"]),
        "fig4b" => (set(DoubleDot, &[]), Sweep::new("omega", 0.0, 6.0, 61, Linear), me_t(), vec!["J_h", "P_S", "eta"]),
        "fig5a" => (set(DrivenBoson, &[]), Sweep::new("g", 0.005, 0.5, 40, Log), me_t(), vec!["J_h", "P_S", "eta"]),
        "fig5b" => {
            (set(DrivenBoson, &[]), Sweep::new("omega_h", 1.0, 5.0, 41, Linear), me_t(), vec!["J_h", "P_S", "eta"])
        }
        "fig6a" => (
            set(DrivenBoson, &[("delta", 0.0125)]),
            Sweep::new("g", 0.005, 0.5, 40, Log),
            me_t(),
            vec!["J_h", "P_S", "eta"],
        ),
        "fig6b" => {
            (set(DrivenBoson, &[]), Sweep::new("delta", 0.0, 0.5, 41, Linear), me_t(), vec!["J_h", "P_S", "eta"])
        }
        "fig7a" => (
            set(InteractingDot, &[]),
            Sweep::new("g", 0.005, 1.5, 40, Log),
            vec![SemiLocal, Global, Local, PerLind],
            vec!["J_h", "P_S"],
        ),
        "fig7b" => (
            set(InteractingDot, &[]),
            Sweep::new("u", 0.0, 2.0, 41, Linear),
            vec![SemiLocal, Global, Local, PerLind],
            vec!["J_h", "P_S"],
        ),
        _ => return Err(Error::InvalidParameter(format!("unknown figure `{name}`"))),
    };
    let name = FIGURES.iter().find(|f| **f == name).copied().expect("listed");
    Ok(Figure { name, model, sweep, methods, outputs })
}
