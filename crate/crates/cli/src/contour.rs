//! Contour rendering: parse a sweep CSV back into a grid, trace level sets,
//! and emit a standalone SVG. Tracing splits every grid cell into four
//! triangles around the cell center, which avoids the ambiguous saddle cases
//! of square marching and keeps the output deterministic.

use crate::emit::GRID_HEADER;

pub struct ParsedGrid {
    pub tau_axis: Vec<f64>,
    pub u_axis: Vec<f64>,
    /// values[iu][it] = f_M at (tau_axis[it], u_axis[iu]).
    pub values: Vec<Vec<f64>>,
    pub n_atoms: usize,
    pub eps: f64,
}

pub fn parse_grid_csv(text: &str) -> Result<ParsedGrid, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let expected: Vec<&str> = GRID_HEADER.to_vec();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(format!(
            "unexpected CSV header '{}', want '{}'",
            headers.iter().collect::<Vec<_>>().join(","),
            expected.join(",")
        ));
    }

    struct Row {
        n_atoms: usize,
        tau: f64,
        eps: f64,
        u: f64,
        f: f64,
    }
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("row {}: {e}", idx + 1))?;
        if record.len() != 8 {
            return Err(format!("row {}: expected 8 fields", idx + 1));
        }
        let field = |k: usize| -> Result<f64, String> {
            record[k]
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("row {}: bad float '{}'", idx + 1, &record[k]))
        };
        rows.push(Row {
            n_atoms: record[0]
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("row {}: bad atom count '{}'", idx + 1, &record[0]))?,
            tau: field(1)?,
            eps: field(2)?,
            u: field(3)?,
            f: field(4)?,
        });
    }
    if rows.is_empty() {
        return Err("CSV contains no data rows".into());
    }

    let n_atoms = rows[0].n_atoms;
    let eps = rows[0].eps;
    if rows.iter().any(|r| r.n_atoms != n_atoms || r.eps != eps) {
        return Err("rows mix different n_atoms or eps values".into());
    }

    // Row-major contract: tau sweeps fastest. The tau axis is the leading run
    // of distinct tau values; everything after must repeat it exactly.
    let mut tau_axis = vec![rows[0].tau];
    for row in rows.iter().skip(1) {
        if row.tau == rows[0].tau {
            break;
        }
        tau_axis.push(row.tau);
    }
    let nt = tau_axis.len();
    if rows.len() % nt != 0 {
        return Err(format!(
            "ragged grid: {} rows do not tile a tau axis of {nt}",
            rows.len()
        ));
    }
    let nu = rows.len() / nt;
    let mut u_axis = Vec::with_capacity(nu);
    let mut values = vec![vec![0.0f64; nt]; nu];
    for iu in 0..nu {
        let block_u = rows[iu * nt].u;
        u_axis.push(block_u);
        for it in 0..nt {
            let row = &rows[iu * nt + it];
            if row.tau != tau_axis[it] || row.u != block_u {
                return Err(format!(
                    "ragged grid at data row {}: expected tau = {}, u = {}",
                    iu * nt + it + 1,
                    tau_axis[it],
                    block_u
                ));
            }
            values[iu][it] = row.f;
        }
    }
    for axis in [&tau_axis, &u_axis] {
        if axis
            .windows(2)
            .any(|w| w[0] >= w[1] || w[0].is_nan() || w[1].is_nan())
        {
            return Err("grid axes are not strictly increasing".into());
        }
    }
    Ok(ParsedGrid {
        tau_axis,
        u_axis,
        values,
        n_atoms,
        eps,
    })
}

/// Level values at integer multiples of `spacing`, strictly inside the open
/// interval (min, max) of the data.
pub fn contour_levels(min: f64, max: f64, spacing: f64) -> Vec<f64> {
    let mut levels = Vec::new();
    if spacing.is_nan() || spacing <= 0.0 || !min.is_finite() || !max.is_finite() || min >= max {
        return levels;
    }
    let mut k = (min / spacing).floor() as i64;
    while k as f64 * spacing <= min {
        k += 1;
    }
    while (k as f64) * spacing < max {
        levels.push(k as f64 * spacing);
        k += 1;
    }
    levels
}

type Pt = (f64, f64);

fn cross(level: f64, a: (Pt, f64), b: (Pt, f64)) -> Option<Pt> {
    let (pa, va) = a;
    let (pb, vb) = b;
    let (lo, hi) = (va >= level, vb >= level);
    if lo == hi {
        return None;
    }
    let t = (level - va) / (vb - va);
    Some((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)))
}

fn triangle_segment(level: f64, v: [(Pt, f64); 3]) -> Option<(Pt, Pt)> {
    let hits: Vec<Pt> = [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]
        .into_iter()
        .filter_map(|(a, b)| cross(level, a, b))
        .collect();
    match hits.as_slice() {
        [p, q] => Some((*p, *q)),
        _ => None,
    }
}

/// All level-set segments in data coordinates, in a fixed scan order.
pub fn level_segments(grid: &ParsedGrid, level: f64) -> Vec<(Pt, Pt)> {
    let nt = grid.tau_axis.len();
    let nu = grid.u_axis.len();
    let mut segments = Vec::new();
    for iu in 0..nu.saturating_sub(1) {
        for it in 0..nt.saturating_sub(1) {
            let (t0, t1) = (grid.tau_axis[it], grid.tau_axis[it + 1]);
            let (u0, u1) = (grid.u_axis[iu], grid.u_axis[iu + 1]);
            let bl = ((t0, u0), grid.values[iu][it]);
            let br = ((t1, u0), grid.values[iu][it + 1]);
            let tr = ((t1, u1), grid.values[iu + 1][it + 1]);
            let tl = ((t0, u1), grid.values[iu + 1][it]);
            let center = (
                (0.5 * (t0 + t1), 0.5 * (u0 + u1)),
                0.25 * (bl.1 + br.1 + tr.1 + tl.1),
            );
            for triangle in [
                [bl, br, center],
                [br, tr, center],
                [tr, tl, center],
                [tl, bl, center],
            ] {
                if let Some(seg) = triangle_segment(level, triangle) {
                    segments.push(seg);
                }
            }
        }
    }
    segments
}

fn trim_number(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Standalone SVG with the level sets of f_M over the (tau, u) plane.
pub fn contour_svg(grid: &ParsedGrid, spacing: f64) -> String {
    const W: f64 = 640.0;
    const H: f64 = 560.0;
    const X0: f64 = 70.0;
    const X1: f64 = 610.0;
    const Y0: f64 = 500.0;
    const Y1: f64 = 40.0;

    let (tmin, tmax) = (
        *grid.tau_axis.first().unwrap(),
        *grid.tau_axis.last().unwrap(),
    );
    let (umin, umax) = (*grid.u_axis.first().unwrap(), *grid.u_axis.last().unwrap());
    let tspan = if tmax > tmin { tmax - tmin } else { 1.0 };
    let uspan = if umax > umin { umax - umin } else { 1.0 };
    let x_of = |tau: f64| X0 + (tau - tmin) / tspan * (X1 - X0);
    let y_of = |u: f64| Y0 + (u - umin) / uspan * (Y1 - Y0);

    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for row in &grid.values {
        for &v in row {
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\">f_M contours, N = {}, eps = {} \
         (levels every {})</text>\n",
        0.5 * (X0 + X1),
        grid.n_atoms,
        trim_number(grid.eps),
        trim_number(spacing)
    ));

    // Frame and ticks.
    svg.push_str(&format!(
        "<rect x=\"{X0}\" y=\"{Y1}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>\n",
        X1 - X0,
        Y0 - Y1
    ));
    for i in 0..5 {
        let frac = i as f64 / 4.0;
        let tau = tmin + frac * (tmax - tmin);
        let x = x_of(tau);
        svg.push_str(&format!(
            "<line x1=\"{x:.3}\" y1=\"{Y0}\" x2=\"{x:.3}\" y2=\"{}\" stroke=\"black\"/>\n",
            Y0 + 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.3}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            Y0 + 24.0,
            trim_number(tau)
        ));
        let u = umin + frac * (umax - umin);
        let y = y_of(u);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.3}\" x2=\"{X0}\" y2=\"{y:.3}\" stroke=\"black\"/>\n",
            X0 - 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.3}\" text-anchor=\"end\">{}</text>\n",
            X0 - 10.0,
            y + 5.0,
            trim_number(u)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-style=\"italic\">\u{3c4}</text>\n",
        0.5 * (X0 + X1),
        H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-style=\"italic\">u</text>\n",
        0.5 * (Y0 + Y1)
    ));

    for level in contour_levels(vmin, vmax, spacing) {
        let segments = level_segments(grid, level);
        if segments.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (p, q) in segments {
            d.push_str(&format!(
                "M{:.3},{:.3}L{:.3},{:.3}",
                x_of(p.0),
                y_of(p.1),
                x_of(q.0),
                y_of(q.1)
            ));
        }
        svg.push_str(&format!(
            "<path class=\"contour\" data-level=\"{}\" d=\"{d}\" fill=\"none\" \
             stroke=\"black\" stroke-width=\"1\"/>\n",
            trim_number(level)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
