use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use periodic_invasion::invasion::{EigenvalueBounds, InvasionVerdict, Report};
use periodic_invasion::pde::Grid;
use periodic_invasion::simulate::{Classification, Trajectory};
use periodic_invasion::SpaceTimeField;
use serde_json::{Map, Number, Value};

/// A float printed with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    serde_json::from_str::<Number>(&text)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn verdict_json(v: &InvasionVerdict) -> Value {
    let mut obj = Map::new();
    obj.insert("condition".into(), v.condition.clone().into());
    obj.insert("verdict".into(), v.verdict.as_str().into());
    let witnesses: Map<String, Value> = v
        .witnesses
        .iter()
        .map(|w| (w.name.to_string(), num(w.value)))
        .collect();
    obj.insert("witnesses".into(), witnesses.into());
    if let Some(note) = &v.note {
        obj.insert("note".into(), note.clone().into());
    }
    obj.into()
}

pub fn bounds_json(b: &EigenvalueBounds) -> Value {
    let mut obj = Map::new();
    obj.insert("lower_static".into(), num(b.lower_static));
    obj.insert("lower_motion".into(), num(b.lower_motion));
    obj.insert("lower".into(), num(b.lower));
    obj.insert("upper_integral".into(), num(b.upper_integral));
    obj.insert("upper_overlap".into(), opt_num(b.upper_overlap));
    obj.into()
}

pub fn report_json(report: &Report, r2: f64) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("mu1".into(), num(report.mu1));
    obj.insert("mu2".into(), num(report.mu2));
    obj.insert("mu_hat".into(), num(report.mu_hat.mu));
    obj.insert("mu_hat_iterations".into(), report.mu_hat.iterations.into());
    obj.insert("r2".into(), num(r2));
    obj.insert("beta".into(), num(report.beta));
    obj.insert("beta_hat".into(), num(report.beta_hat));
    obj.insert("u1_extinct".into(), report.u1star.extinct.into());
    obj.insert("u2_extinct".into(), report.u2star.extinct.into());
    obj.insert(
        "bounds".into(),
        match &report.bounds {
            Some([b1, b2]) => {
                let mut b = Map::new();
                b.insert("species1".into(), bounds_json(b1));
                b.insert("species2".into(), bounds_json(b2));
                b.into()
            }
            None => Value::Null,
        },
    );
    obj.insert("linearization".into(), verdict_json(&report.linearization));
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            let mut v = verdict_json(&c.verdict);
            if let Value::Object(m) = &mut v {
                m.insert("agreement".into(), c.agreement.as_str().into());
            }
            v
        })
        .collect();
    obj.insert("checks".into(), checks.into());
    obj
}

pub fn classification_json(c: &Classification) -> Value {
    let mut obj = Map::new();
    obj.insert("class".into(), c.class.as_str().into());
    obj.insert("rate".into(), num(c.rate));
    obj.insert("log_growth_per_period".into(), num(c.log_growth_per_period));
    obj.insert("margin".into(), num(c.margin));
    obj.insert("window_first".into(), c.window.0.into());
    obj.insert("window_last".into(), c.window.1.into());
    obj.into()
}

pub fn emit(obj: Map<String, Value>) -> Result<()> {
    let line = serde_json::to_string(&Value::Object(obj))?;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    writeln!(lock, "{line}")?;
    lock.flush()?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn write_field(dir: &Path, name: &str, field: &SpaceTimeField) -> Result<()> {
    let mut out = create(dir, name)?;
    field.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_trajectory(dir: &Path, trajectory: &Trajectory) -> Result<()> {
    let mut out = create(dir, "trajectory.csv")?;
    writeln!(out, "period,t,u2_sup,u1_deviation")?;
    for r in &trajectory.records {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            r.period, r.t, r.u2_sup, r.u1_deviation
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Final profiles of both species, boundary zeros included.
pub fn write_final_profiles(dir: &Path, grid: &Grid, trajectory: &Trajectory) -> Result<()> {
    let mut out = create(dir, "final_profiles.csv")?;
    writeln!(out, "xi,u1,u2")?;
    let m = grid.m();
    for i in 0..m + 2 {
        let (a, b) = if i == 0 || i == m + 1 {
            (0.0, 0.0)
        } else {
            (trajectory.final_u1[i - 1], trajectory.final_u2[i - 1])
        };
        writeln!(out, "{:.16e},{:.16e},{:.16e}", i as f64 * grid.h(), a, b)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(-2.0).to_string(), "-2.0000000000000000e+0");
        assert_eq!(num(f64::NAN), Value::Null);
        let back: f64 = num(std::f64::consts::PI).to_string().parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }
}
