//! Sweep execution and CSV output.

use std::io::Write;

use rayon::prelude::*;
use thermolind::models::{Method, ModelSpec};
use thermolind::thermo::ThermoReport;

use crate::config::Plan;

/// A solver failure at one sweep point.
#[derive(Debug)]
pub struct PointError {
    pub param: String,
    pub value: f64,
    pub method: Method,
    pub message: String,
}

impl std::fmt::Display for PointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "solver failed at {} = {} ({}): {}", self.param, self.value, self.method, self.message)
    }
}

pub struct Row {
    pub value: f64,
    pub method: Method,
    pub report: ThermoReport,
}

fn scalar(model: &ModelSpec, report: &ThermoReport, name: &str) -> f64 {
    match name {
        "J_h" => report.heat(model.hot_bath()).unwrap_or(f64::NAN),
        "J_c" => report.heat(model.cold_bath()).unwrap_or(f64::NAN),
        "P_S" => report.output_power,
        "eta" => report.efficiency.unwrap_or(f64::NAN),
        "Sigma_dot" => report.entropy_production,
        "first_law_residual" => report.first_law_residual.unwrap_or(f64::NAN),
        _ => unreachable!("outputs are checked when the plan is built"),
    }
}

/// Solves every (point, approach) pair on `jobs` threads; rows come back in
/// sweep order with approaches in config order.
pub fn execute(plan: &Plan, jobs: usize) -> Result<Vec<Row>, PointError> {
    let tasks: Vec<(f64, &Method)> =
        plan.values.iter().flat_map(|&v| plan.methods.iter().map(move |m| (v, m))).collect();
    let solve = |&(value, method): &(f64, &Method)| -> Result<Row, PointError> {
        let err =
            |message: String| PointError { param: plan.sweep.param.clone(), value, method: method.clone(), message };
        let model = plan.model.clone().with(&plan.sweep.param, value).map_err(|e| err(e.to_string()))?;
        log::debug!("{} = {value}: {method}", plan.sweep.param);
        let sol = model.solve(method, &plan.options).map_err(|e| err(e.to_string()))?;
        Ok(Row { value, method: method.clone(), report: sol.report })
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| tasks.par_iter().map(solve).collect())
}

fn format(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(plan: &Plan, rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["sweep_param".to_string(), "sweep_value".into(), "approach".into()];
    header.extend(plan.outputs.iter().cloned());
    w.write_record(&header)?;
    for row in rows {
        let model = plan.model.clone().with(&plan.sweep.param, row.value).expect("checked when planning");
        let mut rec = vec![plan.sweep.param.clone(), format(row.value), row.method.name().to_string()];
        rec.extend(plan.outputs.iter().map(|o| format(scalar(&model, &row.report, o))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
