//! Run configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thermolind::models::{BosonSolver, Method, ModelSpec, SolveOptions, Sweep};
use thermolind::solvers::SteadyOptions;

/// Scalars that can be requested per row.
pub const SCALARS: [&str; 6] = ["J_h", "J_c", "P_S", "eta", "Sigma_dot", "first_law_residual"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Absent means a single point at the model's current `g`.
    #[serde(default)]
    pub sweep: Option<Sweep>,
    pub approaches: Vec<String>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_outputs() -> Vec<String> {
    vec!["J_h".into()]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// `moments`, `fock` or `fock-converged`.
    pub boson: String,
    /// Total excitation cap for `boson = "fock"`.
    pub cutoff: usize,
    pub tol_ss: f64,
    pub tol_pos: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SteadyOptions::default();
        Self { boson: "moments".into(), cutoff: 12, tol_ss: s.tol_ss, tol_pos: s.tol_pos }
    }
}

impl SolverConfig {
    pub fn options(&self) -> Result<SolveOptions, String> {
        let boson = match self.boson.as_str() {
            "moments" => BosonSolver::Moments,
            "fock" => BosonSolver::Fock { cutoff: self.cutoff },
            "fock-converged" | "fock_converged" => BosonSolver::FockConverged,
            other => return Err(format!("unknown boson solver `{other}`")),
        };
        if !(self.tol_ss > 0.0 && self.tol_pos > 0.0) {
            return Err("solver tolerances must be positive".into());
        }
        let steady = SteadyOptions { tol_ss: self.tol_ss, tol_pos: self.tol_pos, ..SteadyOptions::default() };
        Ok(SolveOptions { steady, boson, ..SolveOptions::default() })
    }
}

/// A parsed and checked configuration.
#[derive(Debug, Clone)]
pub struct Plan {
    pub model: ModelSpec,
    pub sweep: Sweep,
    pub values: Vec<f64>,
    pub methods: Vec<Method>,
    pub outputs: Vec<String>,
    pub output: Option<PathBuf>,
    pub options: SolveOptions,
}

pub fn parse(text: &str, json: bool) -> Result<RunConfig, String> {
    if json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

pub fn load(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse(&text, json).map_err(|e| format!("{}: {e}", path.display()))
}

impl RunConfig {
    pub fn plan(self) -> Result<Plan, String> {
        self.model.validate().map_err(|e| e.to_string())?;
        let sweep = match self.sweep {
            Some(s) => s,
            None => {
                let g = self.model.get("g").map_err(|e| e.to_string())?;
                Sweep::new("g", g, g, 1, Default::default())
            }
        };
        let values = sweep.values().map_err(|e| e.to_string())?;
        for &v in &values {
            let m = self.model.clone().with(&sweep.param, v).map_err(|e| e.to_string())?;
            m.validate().map_err(|e| format!("sweep value {} = {v}: {e}", sweep.param))?;
        }
        if self.approaches.is_empty() {
            return Err("at least one approach is required".into());
        }
        let methods = self
            .approaches
            .iter()
            .map(|a| a.parse::<Method>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        if self.outputs.is_empty() {
            return Err("at least one output is required".into());
        }
        if let Some(bad) = self.outputs.iter().find(|o| !SCALARS.contains(&o.as_str())) {
            return Err(format!("unknown output `{bad}` (expected one of {})", SCALARS.join(", ")));
        }
        Ok(Plan {
            model: self.model,
            sweep,
            values,
            methods,
            outputs: self.outputs,
            output: self.output,
            options: self.solver.options()?,
        })
    }
}
