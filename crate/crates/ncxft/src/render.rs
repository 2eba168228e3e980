//! Deterministic text output: number formatting, CSV tables and SVG line
//! charts.

use std::fmt::Write as _;

use ncxft_core::collision::{ExplicitDelta, TrajectoryTable};
use ncxft_core::qubit::SweepPoint;

use crate::CliError;

/// Renders `x` with 17 significant digits like C's `%.17g`: fixed notation
/// for decimal exponents in `[-5, 17)`, otherwise lowercase scientific with
/// at least two exponent digits. Trailing zeros are dropped.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub const SWEEP_COLUMNS: [&str; 17] = [
    "betaA",
    "chiA",
    "betaB",
    "chiB",
    "alpha",
    "avg_dq_z",
    "avg_dq_x",
    "avg_delta",
    "sigma_avg",
    "integral_ft",
    "naive_ft",
    "uncorrected_second_law",
    "inversion_z",
    "inversion_x",
    "double_inversion",
    "tur_min_margin",
    "flags",
];

/// Numeric value of a plottable sweep column.
pub fn sweep_value(p: &SweepPoint, column: &str) -> Option<f64> {
    let v = match column {
        "betaA" => p.params.beta_a,
        "chiA" => p.params.chi_a,
        "betaB" => p.params.beta_b,
        "chiB" => p.params.chi_b,
        "alpha" => p.params.alpha,
        "avg_dq_z" => p.avg_dq_z,
        "avg_dq_x" => p.avg_dq_x,
        "avg_delta" => p.avg_delta,
        "sigma_avg" => p.sigma_avg,
        "integral_ft" => p.integral_ft,
        "naive_ft" => p.naive_ft,
        "uncorrected_second_law" => p.uncorrected_second_law,
        "tur_min_margin" => p.tur_min_margin.unwrap_or(f64::NAN),
        _ => return None,
    };
    Some(v)
}

pub fn is_plottable(column: &str) -> bool {
    SWEEP_COLUMNS.iter().any(|c| {
        *c == column
            && !matches!(
                *c,
                "inversion_z" | "inversion_x" | "double_inversion" | "flags"
            )
    })
}

fn csv_string(header: &[String], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn sweep_csv(points: &[SweepPoint]) -> Result<String, CliError> {
    let header: Vec<String> = SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect();
    let rows = points
        .iter()
        .map(|p| {
            let mut r: Vec<String> = SWEEP_COLUMNS[..12]
                .iter()
                .map(|c| num(sweep_value(p, c).expect("numeric column")))
                .collect();
            for b in [p.inversion_z, p.inversion_x, p.double_inversion] {
                r.push(b.to_string());
            }
            r.push(match p.tur_min_margin {
                Some(m) => num(m),
                None => "degenerate".into(),
            });
            r.push(p.flags.join(";"));
            r
        })
        .collect();
    csv_string(&header, rows)
}

pub fn trajectory_csv(table: &TrajectoryTable) -> Result<String, CliError> {
    let n = table.deltas_lambda.len();
    let mut header: Vec<String> = ["n", "nu", "m", "mu", "prob", "dhA", "dhB"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=n).map(|i| format!("dq_{i}")));
    header.extend(
        ["delta", "delta_explicit", "flags"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in &table.rows {
        let mut flags = Vec::new();
        if !r.supported {
            flags.push("unsupported");
        }
        let explicit = match r.delta_explicit {
            ExplicitDelta::Applicable { value, .. } => num(value),
            ExplicitDelta::Inapplicable => {
                flags.push("explicit_inapplicable");
                "nan".into()
            }
            ExplicitDelta::Unavailable => {
                flags.push("explicit_unavailable");
                "nan".into()
            }
        };
        let mut row = vec![
            r.n.to_string(),
            r.nu.to_string(),
            r.m.to_string(),
            r.mu.to_string(),
            num(r.prob),
            num(r.dh_a),
            num(r.dh_b),
        ];
        row.extend(r.dq.iter().map(|&q| num(q)));
        row.push(num(r.delta));
        row.push(explicit);
        row.push(flags.join(";"));
        rows.push(row);
    }
    csv_string(&header, rows)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

fn coord(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = trim_zeros(&s);
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Line chart of `series` (name, y-values) against `xs`. Each series is one
/// polyline; non-finite points are skipped.
pub fn line_chart(x_label: &str, xs: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let (x0, x1) = range(xs.iter().copied());
    let (y0, y1) = range(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = coord(LEFT),
        r = coord(LEFT + pw),
        t = coord(TOP),
        b = coord(TOP + ph)
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11">"#);
    for k in 0..TICKS {
        let t = k as f64 / (TICKS - 1) as f64;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{b}" x2="{x}" y2="{b5}" stroke="black"/><text x="{x}" y="{bt}" text-anchor="middle">{lab}</text>"#,
            x = coord(px),
            b = coord(TOP + ph),
            b5 = coord(TOP + ph + 5.0),
            bt = coord(TOP + ph + 18.0),
            lab = tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{l5}" y1="{y}" x2="{l}" y2="{y}" stroke="black"/><text x="{lt}" y="{yt}" text-anchor="end">{lab}</text>"#,
            l5 = coord(LEFT - 5.0),
            l = coord(LEFT),
            lt = coord(LEFT - 8.0),
            y = coord(py),
            yt = coord(py + 4.0),
            lab = tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="13">{x_label}</text>"#,
        x = coord(LEFT + pw / 2.0),
        y = coord(HEIGHT - 15.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{y}" text-anchor="middle" font-size="13" transform="rotate(-90 15 {y})">value</text>"#,
        y = coord(TOP + ph / 2.0)
    );
    let _ = writeln!(s, "</g>");

    for (k, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{},{}", coord(sx(x)), coord(sy(y))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{name}</title></polyline>"#,
            points.join(" ")
        );
        let ly = TOP + 15.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{a}" y1="{y}" x2="{b}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{t}" y="{yt}" font-family="sans-serif" font-size="11">{name}</text>"#,
            a = coord(WIDTH - RIGHT + 15.0),
            b = coord(WIDTH - RIGHT + 35.0),
            t = coord(WIDTH - RIGHT + 40.0),
            y = coord(ly),
            yt = coord(ly + 4.0)
        );
    }
    s.push_str("</svg>\n");
    s
}
