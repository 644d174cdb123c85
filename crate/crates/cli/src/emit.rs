//! CSV and JSON emitters. CSV floats are printed with 17 significant digits
//! so that parsing a file back reproduces every value bit-exactly; JSON goes
//! through serde_json's shortest-round-trip formatting, which has the same
//! property.

use qfimeter_core::{ExtrapolationResult, QfiPoint, SweepGrid};
use serde_json::{json, Value};

pub const GRID_HEADER: [&str; 8] = [
    "n_atoms", "tau", "eps", "u", "f_M", "F_M", "ell_max", "ell_min",
];

/// 17 significant digits: enough to reconstruct any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn grid_row(n_atoms: usize, tau: f64, eps: f64, u: f64, point: [f64; 4]) -> Vec<String> {
    let [f_scaled, f_max, ell_max, ell_min] = point;
    vec![
        n_atoms.to_string(),
        fmt_f64(tau),
        fmt_f64(eps),
        fmt_f64(u),
        fmt_f64(f_scaled),
        fmt_f64(f_max),
        fmt_f64(ell_max),
        fmt_f64(ell_min),
    ]
}

fn csv_from_rows(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory csv");
    for row in rows {
        writer.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

pub fn point_csv(point: &QfiPoint) -> String {
    let p = &point.params;
    csv_from_rows(
        &GRID_HEADER,
        vec![grid_row(
            p.n_atoms,
            p.tau,
            p.eps,
            p.u,
            [
                point.fisher_scaled,
                point.fisher_max,
                point.ell_max,
                point.ell_min,
            ],
        )],
    )
}

pub fn point_json(point: &QfiPoint) -> Value {
    let p = &point.params;
    let amplitudes: Vec<[f64; 2]> = point
        .optimal_state
        .amplitudes()
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    json!({
        "n_atoms": p.n_atoms,
        "tau": p.tau,
        "eps": p.eps,
        "u": p.u,
        "U": p.bare_interaction(),
        "f_M": point.fisher_scaled,
        "F_M": point.fisher_max,
        "ell_max": point.ell_max,
        "ell_min": point.ell_min,
        "degenerate_generator": point.degenerate_generator,
        "optimal_state": amplitudes,
    })
}

pub fn grid_csv(grid: &SweepGrid) -> String {
    let mut rows = Vec::with_capacity(grid.tau_axis().len() * grid.u_axis().len());
    for (iu, &u) in grid.u_axis().iter().enumerate() {
        for (it, &tau) in grid.tau_axis().iter().enumerate() {
            let cell = grid.cell(iu, it);
            rows.push(grid_row(
                grid.n_atoms(),
                tau,
                grid.eps(),
                u,
                [
                    cell.fisher_scaled,
                    cell.fisher_max,
                    cell.ell_max,
                    cell.ell_min,
                ],
            ));
        }
    }
    csv_from_rows(&GRID_HEADER, rows)
}

pub fn grid_json(grid: &SweepGrid) -> Value {
    let mut cells = Vec::with_capacity(grid.tau_axis().len() * grid.u_axis().len());
    for (iu, &u) in grid.u_axis().iter().enumerate() {
        for (it, &tau) in grid.tau_axis().iter().enumerate() {
            let cell = grid.cell(iu, it);
            cells.push(json!({
                "tau": tau,
                "u": u,
                "f_M": cell.fisher_scaled,
                "F_M": cell.fisher_max,
                "ell_max": cell.ell_max,
                "ell_min": cell.ell_min,
            }));
        }
    }
    json!({
        "n_atoms": grid.n_atoms(),
        "eps": grid.eps(),
        "tau_axis": grid.tau_axis(),
        "u_axis": grid.u_axis(),
        "cells": cells,
    })
}

pub fn extrapolation_csv(result: &ExtrapolationResult) -> String {
    let rows = result
        .n_series
        .iter()
        .zip(&result.values)
        .map(|(&n, &f)| {
            vec![
                n.to_string(),
                fmt_f64(f),
                fmt_f64(result.f_infinity),
                fmt_f64(result.error_estimate),
            ]
        })
        .collect();
    csv_from_rows(&["n_atoms", "f_M", "f_infinity", "error_estimate"], rows)
}

pub fn extrapolation_json(result: &ExtrapolationResult, tau: f64, eps: f64, u: f64) -> Value {
    json!({
        "tau": tau,
        "eps": eps,
        "u": u,
        "n_series": result.n_series,
        "values": result.values,
        "f_infinity": result.f_infinity,
        "error_estimate": result.error_estimate,
    })
}

pub struct LimitRow {
    pub name: &'static str,
    pub analytic: f64,
    pub numerical: f64,
}

pub fn limits_csv(rows: &[LimitRow]) -> String {
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.name.to_string(),
                fmt_f64(r.analytic),
                fmt_f64(r.numerical),
                fmt_f64((r.analytic - r.numerical).abs()),
            ]
        })
        .collect();
    csv_from_rows(&["limit", "analytic", "numerical", "abs_diff"], body)
}

pub fn limits_json(rows: &[LimitRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "limit": r.name,
                    "analytic": r.analytic,
                    "numerical": r.numerical,
                    "abs_diff": (r.analytic - r.numerical).abs(),
                })
            })
            .collect(),
    )
}
