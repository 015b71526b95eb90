//! Report emission. Both formats carry the same rows in the same order.
//!
//! CSV columns: `scenario_id, quantity, a_index, b_index, value,
//! tolerance_flag`. Index columns are empty where they do not apply; for
//! per-particle quantities `a_index` holds the particle number (1 or 2) and
//! for the decoherence sweep it holds the position in the σ list.
//! `tolerance_flag` is `ok` or `fail` for checked quantities and empty
//! otherwise. Reals are written with nine significant digits.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use super::pipeline::{Report, CROSS_CHECK_TOL};
use crate::error::{Error, Result};
use crate::frame::ORTHO_TOL;
use crate::geodesic::NORM_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Csv => "csv",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Configuration(format!(
                "unknown report format '{other}'"
            ))),
        }
    }
}

struct Row {
    section: &'static str,
    quantity: String,
    a: Option<usize>,
    b: Option<usize>,
    value: String,
    flag: &'static str,
}

fn real(x: f64) -> String {
    format!("{x:.8e}")
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fail"
    }
}

fn rows(r: &Report) -> Vec<Row> {
    let mut out = Vec::new();
    let mut push = |section, quantity: &str, a, b, value: String, flag| {
        out.push(Row {
            section,
            quantity: quantity.to_string(),
            a,
            b,
            value,
            flag,
        })
    };

    push("meta", "tool", None, None, r.tool_version.clone(), "");
    push(
        "meta",
        "scenario_sha256",
        None,
        None,
        r.scenario_hash.clone(),
        "",
    );
    push("meta", "spacetime", None, None, r.spacetime.clone(), "");
    push("meta", "gauge", None, None, r.gauge.to_string(), "");
    push(
        "meta",
        "integrator_tol",
        None,
        None,
        real(r.integrator_tol),
        "",
    );
    push("meta", "bvp_tol", None, None, real(r.bvp_tol), "");
    push("meta", "norm_tol", None, None, real(NORM_TOL), "");
    push("meta", "ortho_tol", None, None, real(ORTHO_TOL), "");
    push(
        "meta",
        "cross_check_tol",
        None,
        None,
        real(CROSS_CHECK_TOL),
        "",
    );

    for (i, g) in r.geodesics.iter().enumerate() {
        let p = Some(i + 1);
        push(
            "geodesics",
            "geodesic.mode",
            p,
            None,
            g.mode.to_string(),
            "",
        );
        push(
            "geodesics",
            "geodesic.converged",
            p,
            None,
            g.converged.to_string(),
            flag(g.converged),
        );
        push(
            "geodesics",
            "geodesic.residual",
            p,
            None,
            real(g.residual),
            flag(g.residual <= r.bvp_tol),
        );
        push(
            "geodesics",
            "geodesic.iterations",
            p,
            None,
            g.iterations.to_string(),
            "",
        );
        push(
            "geodesics",
            "geodesic.proper_length",
            p,
            None,
            real(g.proper_length),
            "",
        );
        push(
            "geodesics",
            "geodesic.samples",
            p,
            None,
            g.samples.to_string(),
            "",
        );
        push(
            "geodesics",
            "geodesic.norm_drift",
            p,
            None,
            real(g.norm_drift),
            flag(g.norm_drift <= NORM_TOL),
        );
    }
    if let Some(f) = &r.failure {
        push("failure", "failure", None, None, f.clone(), "fail");
    }

    if let Some(rot) = &r.rotation {
        for (k, name) in ["rotation.axis_x", "rotation.axis_y", "rotation.axis_z"]
            .iter()
            .enumerate()
        {
            push("rotation", name, None, None, real(rot.axis[k]), "");
        }
        push(
            "rotation",
            "rotation.angle",
            None,
            None,
            real(rot.angle),
            "",
        );
        let ok = (rot.holonomy_angle - rot.angle).abs() <= CROSS_CHECK_TOL;
        push(
            "rotation",
            "rotation.holonomy_angle",
            None,
            None,
            real(rot.holonomy_angle),
            flag(ok),
        );
        let ok = (rot.spin_angle - rot.angle).abs() <= CROSS_CHECK_TOL;
        push(
            "rotation",
            "rotation.spin_angle",
            None,
            None,
            real(rot.spin_angle),
            flag(ok),
        );
    }

    for c in &r.correlations {
        push(
            "correlations",
            "E",
            Some(c.a_index),
            Some(c.b_index),
            real(c.value),
            "",
        );
    }
    if let Some(s) = r.chsh {
        push("chsh", "S", None, None, real(s), "");
    }
    for (k, d) in r.decoherence.iter().enumerate() {
        let i = Some(k);
        push(
            "decoherence",
            "decoherence.sigma",
            i,
            None,
            real(d.sigma),
            "",
        );
        push(
            "decoherence",
            "decoherence.fidelity",
            i,
            None,
            real(d.fidelity),
            "",
        );
        push(
            "decoherence",
            "decoherence.fidelity_se",
            i,
            None,
            real(d.fidelity_se),
            "",
        );
        push(
            "decoherence",
            "decoherence.E",
            i,
            None,
            real(d.correlation),
            "",
        );
        push(
            "decoherence",
            "decoherence.pairs",
            i,
            None,
            d.pairs.to_string(),
            "",
        );
        push(
            "decoherence",
            "decoherence.subsampled",
            i,
            None,
            d.subsampled.to_string(),
            "",
        );
    }

    let d = &r.diagnostics;
    push(
        "diagnostics",
        "diag.norm_drift",
        None,
        None,
        real(d.norm_drift),
        flag(d.norm_ok()),
    );
    push(
        "diagnostics",
        "diag.ortho_drift",
        None,
        None,
        real(d.ortho_drift),
        flag(d.ortho_ok()),
    );
    push(
        "diagnostics",
        "diag.transport_cross_check",
        None,
        None,
        real(d.cross_check),
        flag(d.cross_ok()),
    );
    out
}

fn index(i: Option<usize>) -> String {
    i.map(|i| i.to_string()).unwrap_or_default()
}

pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Csv => csv_report(r),
        Format::Table => table_report(r),
    }
}

fn csv_report(r: &Report) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let record = |w: &mut csv::Writer<Vec<u8>>, f: [&str; 6]| {
        w.write_record(f).expect("writing to memory");
    };
    record(
        &mut w,
        [
            "scenario_id",
            "quantity",
            "a_index",
            "b_index",
            "value",
            "tolerance_flag",
        ],
    );
    for row in rows(r) {
        record(
            &mut w,
            [
                &r.scenario_id,
                &row.quantity,
                &index(row.a),
                &index(row.b),
                &row.value,
                row.flag,
            ],
        );
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

fn table_report(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {}  scenario {}  sha256 {}",
        r.tool_version, r.scenario_id, r.scenario_hash
    );
    let all = rows(r);
    let sections = [
        "meta",
        "geodesics",
        "failure",
        "rotation",
        "correlations",
        "chsh",
        "decoherence",
        "diagnostics",
    ];
    for section in sections {
        let group: Vec<&Row> = all.iter().filter(|row| row.section == section).collect();
        let header_only = section == "correlations" && r.rotation.is_some();
        if group.is_empty() && !header_only {
            continue;
        }
        let _ = writeln!(s, "\n## {section}");
        let q = group
            .iter()
            .map(|r| r.quantity.len())
            .max()
            .unwrap_or(0)
            .max(8);
        let v = group
            .iter()
            .map(|r| r.value.len())
            .max()
            .unwrap_or(0)
            .max(5);
        let _ = writeln!(
            s,
            "{:<q$}  {:>3}  {:>3}  {:<v$}  flag",
            "quantity", "a", "b", "value"
        );
        for row in group {
            let _ = writeln!(
                s,
                "{:<q$}  {:>3}  {:>3}  {:<v$}  {}",
                row.quantity,
                index(row.a),
                index(row.b),
                row.value,
                row.flag
            );
        }
    }
    s
}
