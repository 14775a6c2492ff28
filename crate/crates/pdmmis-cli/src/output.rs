//! Result files: CSV, two-column plot data, and an SVG rendering.

use std::fmt::Write as _;
use std::path::Path;

use crate::{HarnessError, Result, ResultRow};

/// Header line of the result CSV.
pub const CSV_HEADER: &str = "P,M,mse_mean,mse_z,evaluations";

/// Renders a float in plain decimal with at least six significant digits,
/// while keeping the text exact: parsing it back yields the original value.
///
/// The shortest round-trip form is used when it already carries six
/// significant digits; shorter values are zero-padded, which leaves the
/// decimal value unchanged.
pub(crate) fn format_sig(value: f64) -> String {
    let shortest = format!("{value}");
    if significant_digits(&shortest) >= 6 {
        return shortest;
    }
    let (int_part, frac_part) = shortest.split_once('.').unwrap_or((shortest.as_str(), ""));
    let int_digits = int_part.trim_start_matches('-').trim_start_matches('0').len();
    let precision = if int_digits > 0 {
        6 - int_digits.min(6)
    } else {
        let leading_zeros = frac_part.len() - frac_part.trim_start_matches('0').len();
        6 + leading_zeros
    };
    format!("{value:.precision$}")
}

fn significant_digits(text: &str) -> usize {
    text.chars()
        .filter(char::is_ascii_digit)
        .collect::<String>()
        .trim_start_matches('0')
        .len()
}

/// The CSV document for a row set, header included.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.p,
            row.m_nominal,
            format_sig(row.mse_mean),
            format_sig(row.mse_z),
            row.evals
        )
        .expect("string formatting cannot fail");
    }
    out
}

/// Writes the sweep rows as CSV; an empty row set yields a header-only file.
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(rows))?;
    Ok(())
}

/// Parses a CSV document written by [`write_csv`] back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(HarnessError::CsvParse {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`, got `{header}`"),
            });
        }
        None => {
            return Err(HarnessError::CsvParse {
                line: 1,
                message: "empty file".into(),
            });
        }
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(HarnessError::CsvParse {
                line,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        fn parse<T: std::str::FromStr>(line: usize, name: &str, text: &str) -> Result<T> {
            text.parse().map_err(|_| HarnessError::CsvParse {
                line,
                message: format!("invalid {name} `{text}`"),
            })
        }
        rows.push(ResultRow {
            p: parse(line, "P", fields[0])?,
            m_nominal: parse(line, "M", fields[1])?,
            mse_mean: parse(line, "mse_mean", fields[2])?,
            mse_z: parse(line, "mse_z", fields[3])?,
            evals: parse(line, "evaluations", fields[4])?,
        });
    }
    Ok(rows)
}

/// Writes `(evaluations, mse_mean)` pairs sorted by evaluations, plus an
/// optional self-contained SVG rendering with log-scaled axes.
///
/// Errors with [`HarnessError::NoRows`] when `rows` is empty.
pub fn write_plot_data(rows: &[ResultRow], data_path: &Path, svg_path: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(HarnessError::NoRows);
    }
    let mut pairs: Vec<(u64, f64)> = rows.iter().map(|r| (r.evals, r.mse_mean)).collect();
    pairs.sort_by_key(|&(evals, _)| evals);

    let mut text = String::from("# evaluations mse_mean\n");
    for (evals, mse) in &pairs {
        writeln!(text, "{evals} {}", format_sig(*mse)).expect("string formatting cannot fail");
    }
    std::fs::write(data_path, text)?;

    if let Some(svg) = svg_path {
        std::fs::write(svg, render_svg(&pairs))?;
    }
    Ok(())
}

/// A minimal log-log scatter-and-line chart.
fn render_svg(pairs: &[(u64, f64)]) -> String {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 480.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 20.0;
    const BOTTOM: f64 = 50.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;

    let xs: Vec<f64> = pairs.iter().map(|&(e, _)| (e as f64).log10()).collect();
    let ys: Vec<f64> = pairs
        .iter()
        .map(|&(_, m)| m.max(f64::MIN_POSITIVE).log10())
        .collect();
    let range = |vals: &[f64]| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // A degenerate span (single point) still needs a drawable axis.
        if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x_lo, x_hi) = range(&xs);
    let (y_lo, y_hi) = range(&ys);
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\"/>"
    );
    for k in (x_lo.ceil() as i64)..=(x_hi.floor() as i64) {
        let x = px(k as f64);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{TOP}\" x2=\"{x:.1}\" y2=\"{:.1}\" \
             stroke=\"lightgray\"/>\
             <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">1e{k}</text>",
            TOP + plot_h,
            TOP + plot_h + 18.0
        );
    }
    for k in (y_lo.ceil() as i64)..=(y_hi.floor() as i64) {
        let y = py(k as f64);
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
             stroke=\"lightgray\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">1e{k}</text>",
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let points: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| format!("{:.1},{:.1}", px(x), py(y)))
        .collect();
    if points.len() > 1 {
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>",
            points.join(" ")
        );
    }
    for point in &points {
        let (x, y) = point.split_once(',').expect("point is formatted as x,y");
        let _ = writeln!(svg, "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"steelblue\"/>");
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">proposal evaluations</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 14 {:.1})\">MSE of the mean estimate</text>",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}
