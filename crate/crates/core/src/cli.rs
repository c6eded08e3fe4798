//! The `simulate`, `sweep`, `check` and `portrait` commands.
//!
//! Each command returns an [`Outcome`] holding the process exit code and the
//! text to print; file output is written before returning. Exit codes are
//! stable: 0 success (or entry recommended), 1 validation / usage error,
//! 2 numerical abort, 3 entry refused.
//!
//! CSV files have a header row and print every float with 17 significant
//! digits (`{:.16e}`), so re-parsing recovers the exact `f64`.
//!
//! | command    | columns                                                                  |
//! |------------|--------------------------------------------------------------------------|
//! | `simulate` | `t, omega_{x,y,z}, b_{x,y,z}, m_{x,y,z}, torque_{x,y,z}, energy`         |
//! | `sweep`    | `<axis>, <measure>` or `<axis1>, <axis2>, <measure>`                     |
//! | `portrait` | `omega_z, omega_dot_z`; equilibria file `omega, kind`                   |
//!
//! `<measure>` is `delta_omega` (one-interval horizon) or `avg_angular_accel`.
//! Sweep rows that fail carry `NaN` and are listed in the printed summary.
//! A simulation that aborts keeps the rows computed so far and appends a
//! marker row `ABORT, <step>, <t>, <reason>`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunSpec;
use crate::dynamics::rotate_to_body;
use crate::sim::{run_detumble, sweep_1d, sweep_2d, GridTable, SimError, SweepTable, Telemetry};
use crate::stability::{classify_equilibria, entry_check, phase_portrait, EquilibriumSet, StabilityReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self { code: EXIT_OK, report }
    }

    fn validation(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_VALIDATION,
            report: format!("error: {msg}\n"),
        }
    }
}

/// Float formatting shared by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), Outcome> {
    std::fs::write(path, contents)
        .map_err(|e| Outcome::validation(format!("cannot write {}: {e}", path.display())))
}

fn csv_string<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    fill(&mut w).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

pub const TELEMETRY_HEADER: [&str; 14] = [
    "t", "omega_x", "omega_y", "omega_z", "b_x", "b_y", "b_z", "m_x", "m_y", "m_z", "torque_x",
    "torque_y", "torque_z", "energy",
];

/// Telemetry as CSV, with an abort marker row when `abort` is given.
pub fn telemetry_csv(tel: &Telemetry, abort: Option<(usize, f64, &str)>) -> String {
    csv_string(&TELEMETRY_HEADER, |w| {
        for r in &tel.rows {
            let mut rec = vec![fmt_f64(r.t)];
            for v in [r.omega, r.b_body, r.moment, r.torque] {
                rec.extend(v.iter().map(|x| fmt_f64(*x)));
            }
            rec.push(fmt_f64(r.energy));
            w.write_record(&rec)?;
        }
        if let Some((step, t, reason)) = abort {
            w.write_record(["ABORT", &step.to_string(), &fmt_f64(t), reason])?;
        }
        Ok(())
    })
}

pub fn sweep_csv(table: &SweepTable) -> String {
    csv_string(&[table.axis.name(), table.horizon.measure_name()], |w| {
        for r in &table.rows {
            let v = r.outcome.as_ref().copied().unwrap_or(f64::NAN);
            w.write_record([fmt_f64(r.value), fmt_f64(v)])?;
        }
        Ok(())
    })
}

pub fn grid_csv(table: &GridTable) -> String {
    csv_string(
        &[table.axis1.name(), table.axis2.name(), table.horizon.measure_name()],
        |w| {
            for r in &table.rows {
                let v = r.outcome.as_ref().copied().unwrap_or(f64::NAN);
                w.write_record([fmt_f64(r.value1), fmt_f64(r.value2), fmt_f64(v)])?;
            }
            Ok(())
        },
    )
}

pub fn portrait_csv(samples: &[(f64, f64)]) -> String {
    csv_string(&["omega_z", "omega_dot_z"], |w| {
        for (x, y) in samples {
            w.write_record([fmt_f64(*x), fmt_f64(*y)])?;
        }
        Ok(())
    })
}

pub fn equilibria_csv(eq: &EquilibriumSet) -> String {
    let mut points: Vec<(f64, &str)> = eq
        .stable_points
        .iter()
        .map(|w| (*w, "stable"))
        .chain(eq.unstable_points.iter().map(|w| (*w, "unstable")))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    csv_string(&["omega", "kind"], |w| {
        for (x, kind) in points {
            w.write_record([fmt_f64(x), kind.to_string()])?;
        }
        Ok(())
    })
}

/// Path of the equilibria file written next to a portrait CSV.
pub fn equilibria_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_equilibria.csv"))
}

fn need_out(out: Option<&Path>, cmd: &str) -> Result<PathBuf, Outcome> {
    out.map(Path::to_path_buf)
        .ok_or_else(|| Outcome::validation(format!("`{cmd}` needs --out <path>")))
}

pub fn cmd_simulate(spec: &RunSpec, out: Option<&Path>) -> Outcome {
    let out = match need_out(out, "simulate") {
        Ok(p) => p,
        Err(o) => return o,
    };
    match run_detumble(&spec.sim) {
        Ok(tel) => {
            if let Err(o) = write_file(&out, &telemetry_csv(&tel, None)) {
                return o;
            }
            let monotone = tel.energy_non_increasing(&spec.sim.body, 1e-12);
            let mut s = String::new();
            let _ = writeln!(s, "algorithm            {}", spec.sim.controller.algorithm.name());
            let _ = writeln!(s, "control steps        {}", tel.rows.len());
            let _ = writeln!(s, "initial |omega|      {:.6} rad/s", tel.initial_omega().norm());
            let _ = writeln!(s, "final |omega|        {:.6} rad/s", tel.final_omega().norm());
            let _ = writeln!(s, "avg angular accel    {:.6e} rad/s^2", tel.average_angular_acceleration());
            let _ = writeln!(s, "energy non-increasing {monotone}");
            let _ = writeln!(s, "telemetry            {}", out.display());
            Outcome::ok(s)
        }
        Err(SimError::Config(e)) => Outcome::validation(e),
        Err(SimError::Abort { step, t, reason, partial }) => {
            let csv = telemetry_csv(&partial, Some((step, t, &reason)));
            let mut report = format!("numerical abort at control step {step} (t = {t}): {reason}\n");
            if let Err(o) = write_file(&out, &csv) {
                report.push_str(&o.report);
            }
            Outcome {
                code: EXIT_NUMERICAL,
                report,
            }
        }
    }
}

pub fn cmd_sweep(spec: &RunSpec, out: Option<&Path>) -> Outcome {
    let out = match need_out(out, "sweep") {
        Ok(p) => p,
        Err(o) => return o,
    };
    let Some(sweep) = &spec.sweep else {
        return Outcome::validation("`sweep` needs a [sweep] section (sweep.axis, sweep.values)");
    };
    if let Err(e) = spec.sim.validate() {
        return Outcome::validation(e);
    }
    let (csv, failures) = match &sweep.second {
        None => {
            let table = sweep_1d(&spec.sim, sweep.axis, &sweep.values, sweep.horizon);
            let failures: Vec<String> = table
                .rows
                .iter()
                .filter_map(|r| r.outcome.as_ref().err().map(|e| format!("{} = {}: {e}", table.axis.name(), r.value)))
                .collect();
            (sweep_csv(&table), failures)
        }
        Some((axis2, values2)) => {
            let table = sweep_2d(&spec.sim, sweep.axis, *axis2, &sweep.values, values2, sweep.horizon);
            let failures: Vec<String> = table
                .rows
                .iter()
                .filter_map(|r| {
                    r.outcome.as_ref().err().map(|e| {
                        format!("{} = {}, {} = {}: {e}", table.axis1.name(), r.value1, table.axis2.name(), r.value2)
                    })
                })
                .collect();
            (grid_csv(&table), failures)
        }
    };
    if let Err(o) = write_file(&out, &csv) {
        return o;
    }
    let rows = csv.lines().count() - 1;
    let mut s = format!("{rows} rows written to {}\n", out.display());
    for f in &failures {
        let _ = writeln!(s, "row error: {f}");
    }
    Outcome::ok(s)
}

/// Human-readable report followed by `key=value` lines.
pub fn format_report(r: &StabilityReport) -> String {
    let mark = |bad: bool| if bad { "VIOLATED" } else { "ok" };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "entry check: |omega| = {:.6} rad/s, algorithm = {}, dt = {} s",
        r.omega_norm,
        r.algorithm.name(),
        r.dt
    );
    let _ = writeln!(
        s,
        "  type I   (overshoot)  margin k_c*dt/I_min - 2 = {:.6e}  {}",
        r.type1_margin,
        mark(r.type1_unstable)
    );
    let type2_note = match r.algorithm {
        crate::control::Algorithm::BDot => mark(r.type2_violated),
        crate::control::Algorithm::OmegaCrossB => "n/a (no field differencing)",
    };
    let _ = writeln!(
        s,
        "  type II  (aliasing)   max dt = pi/|omega| = {:.6} s  {}",
        r.type2_max_dt, type2_note
    );
    let _ = writeln!(
        s,
        "  type III (hold)       predicted delta omega = {:.6e} rad/s, |omega|*dt = {:.6}  {}",
        r.type3_delta_omega_pred,
        r.omega_norm * r.dt,
        mark(r.type3_violated)
    );
    let verdict = if r.recommended_entry {
        "RECOMMENDED".to_string()
    } else {
        format!("REFUSED ({})", r.violations().join(", "))
    };
    let _ = writeln!(s, "entry: {verdict}");
    s.push('\n');
    s.push_str(&report_key_values(r));
    s
}

pub fn report_key_values(r: &StabilityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "recommended_entry={}", r.recommended_entry);
    let _ = writeln!(s, "violations={}", r.violations().join(","));
    let _ = writeln!(s, "omega_norm={}", fmt_f64(r.omega_norm));
    let _ = writeln!(s, "type1_unstable={}", r.type1_unstable);
    let _ = writeln!(s, "type1_margin={}", fmt_f64(r.type1_margin));
    let _ = writeln!(s, "type2_max_dt={}", fmt_f64(r.type2_max_dt));
    let _ = writeln!(s, "type2_violated={}", r.type2_violated);
    let _ = writeln!(s, "type3_delta_omega_pred={}", fmt_f64(r.type3_delta_omega_pred));
    let _ = writeln!(s, "type3_violated={}", r.type3_violated);
    s
}

pub fn cmd_check(spec: &RunSpec, out: Option<&Path>) -> Outcome {
    let report = entry_check(&spec.sim.initial_omega, &spec.sim.controller, &spec.sim.body);
    if let Some(path) = out {
        if let Err(o) = write_file(path, &report_key_values(&report)) {
            return o;
        }
    }
    Outcome {
        code: if report.recommended_entry { EXIT_OK } else { EXIT_REFUSED },
        report: format_report(&report),
    }
}

pub fn cmd_portrait(spec: &RunSpec, out: Option<&Path>) -> Outcome {
    let out = match need_out(out, "portrait") {
        Ok(p) => p,
        Err(o) => return o,
    };
    let Some(portrait) = &spec.portrait else {
        return Outcome::validation("`portrait` needs portrait.omega_max");
    };
    let sim = &spec.sim;
    let b = rotate_to_body(&sim.initial_q(), &sim.field.field_inertial(0.0));
    let izz = sim.body.inertia()[(2, 2)];
    let samples = phase_portrait(
        sim.controller.dt,
        sim.controller.k_c,
        izz,
        &b,
        portrait.omega_max,
        portrait.points,
    );
    let eq = classify_equilibria(sim.controller.dt, portrait.omega_max);
    let eq_path = equilibria_path(&out);
    if let Err(o) = write_file(&out, &portrait_csv(&samples)) {
        return o;
    }
    if let Err(o) = write_file(&eq_path, &equilibria_csv(&eq)) {
        return o;
    }
    let fmt_list = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "{} samples written to {}", samples.len(), out.display());
    let _ = writeln!(s, "stable equilibria   {}", fmt_list(&eq.stable_points));
    let _ = writeln!(s, "unstable equilibria {}", fmt_list(&eq.unstable_points));
    let _ = writeln!(s, "equilibria written to {}", eq_path.display());
    Outcome::ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunSpec;

    const SPEC: &str = r#"
body.inertia = 1.0
controller.algorithm = "bdot"
controller.k_c = 0.5
controller.dt = 1.0
field.model = "static"
field.b0 = [1.0, 0.0, 0.0]
sim.initial_omega = [0.0, 0.0, 4.0]
sim.duration = 10.0
sim.torque = "frozen"
"#;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -2.5e-5, std::f64::consts::PI, 1e300, 0.0, 6.02214076e23] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn equilibria_file_path() {
        assert_eq!(
            equilibria_path(Path::new("/tmp/x/portrait.csv")),
            PathBuf::from("/tmp/x/portrait_equilibria.csv")
        );
    }

    #[test]
    fn simulate_requires_out() {
        let spec = RunSpec::parse(SPEC).unwrap();
        assert_eq!(cmd_simulate(&spec, None).code, EXIT_VALIDATION);
        assert_eq!(cmd_sweep(&spec, None).code, EXIT_VALIDATION);
        assert_eq!(cmd_portrait(&spec, None).code, EXIT_VALIDATION);
    }

    #[test]
    fn sweep_and_portrait_need_sections() {
        let spec = RunSpec::parse(SPEC).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o.csv");
        assert_eq!(cmd_sweep(&spec, Some(&out)).code, EXIT_VALIDATION);
        assert_eq!(cmd_portrait(&spec, Some(&out)).code, EXIT_VALIDATION);
    }

    #[test]
    fn report_mentions_every_criterion() {
        let spec = RunSpec::parse(SPEC).unwrap();
        let o = cmd_check(&spec, None);
        // |omega| dt = 4 > pi: aliasing and hold-interval criteria both fail.
        assert_eq!(o.code, EXIT_REFUSED);
        assert!(o.report.contains("type I "));
        assert!(o.report.contains("REFUSED (type2, type3)"));
        assert!(o.report.contains("recommended_entry=false"));
    }
}
