use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::wn_fill;
use crate::error::{Error, Result};

use super::{dbar_from_ps, fill_bounds, ps_from_fill, RootMethod, FIG3_BETA_SQ_MAX, FILL_CEILING};

const SIGNIFICANT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Figure::Fig1 => &["ps", "dbar", "alpha_sq", "beta_sq", "gamma_sq", "reference"],
            Figure::Fig2 => &["n", "fill"],
            Figure::Fig3 => &["beta_sq", "fill", "ps"],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    /// `(|α|², |β|², |γ|²)` tuples, each swept over `points` values of `ps` in `[0, 1]`.
    Fig1 {
        tuples: Vec<(f64, f64, f64)>,
        points: usize,
    },
    Fig2 {
        n_max: u32,
    },
    Fig3 {
        beta_sqs: Vec<f64>,
        points: usize,
    },
}

impl GridSpec {
    pub fn figure(&self) -> Figure {
        match self {
            GridSpec::Fig1 { .. } => Figure::Fig1,
            GridSpec::Fig2 { .. } => Figure::Fig2,
            GridSpec::Fig3 { .. } => Figure::Fig3,
        }
    }
}

/// Columns follow [`Figure::header`]. Missing values are NaN and are written
/// as empty fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub figure: Figure,
    pub rows: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    let span = (points.max(2) - 1) as f64;
    (0..points).map(move |i| if points == 1 { 0.0 } else { i as f64 / span })
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidConfig(format!(
            "a sweep needs at least 2 points, got {points}"
        )));
    }
    Ok(())
}

pub fn figure_series(spec: &GridSpec) -> Result<SweepTable> {
    let figure = spec.figure();
    let mut warnings = Vec::new();
    let rows = match spec {
        GridSpec::Fig1 { tuples, points } => {
            check_points(*points)?;
            for &(a, b, g) in tuples {
                let in_unit = [a, b, g].iter().all(|v| (0.0..=1.0).contains(v));
                if !in_unit || (a + b + g - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidConfig(format!(
                        "squared magnitudes ({a}, {b}, {g}) do not form a normalized triple"
                    )));
                }
            }
            let grid: Vec<f64> = grid(*points).collect();
            tuples
                .iter()
                .flat_map(|&t| grid.iter().map(move |&ps| (t, ps)))
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|((a, b, g), ps)| vec![ps, dbar_from_ps(ps, b, a, g), a, b, g, 1.0 / 3.0])
                .collect()
        }
        GridSpec::Fig2 { n_max } => {
            if *n_max < 1 {
                return Err(Error::InvalidConfig("n-max must be at least 1".into()));
            }
            (1..=*n_max)
                .map(|n| Ok(vec![f64::from(n), wn_fill(n)?]))
                .collect::<Result<Vec<_>>>()?
        }
        GridSpec::Fig3 { beta_sqs, points } => {
            check_points(*points)?;
            let mut rows = Vec::new();
            for &b in beta_sqs {
                if !(b > 0.0 && b <= FIG3_BETA_SQ_MAX + 1e-12) {
                    warnings.push(format!(
                        "beta^2 = {b} lies outside (0, {FIG3_BETA_SQ_MAX}); no sweep emitted"
                    ));
                    rows.push(vec![b, f64::NAN, f64::NAN]);
                    continue;
                }
                let (lower, upper) = fill_bounds(b);
                let top = upper.min(FILL_CEILING);
                let swept = grid(*points)
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|x| {
                        let f = lower + (top - lower) * x;
                        Ok(vec![b, f, ps_from_fill(f, b, RootMethod::Numeric)?.ps])
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.extend(swept);
            }
            rows
        }
    };
    Ok(SweepTable {
        figure,
        rows,
        warnings,
    })
}

/// Decimal with `SIGNIFICANT` significant digits; integers print bare.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{x:.0}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

impl SweepTable {
    pub fn header(&self) -> &'static [&'static str] {
        self.figure.header()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header().iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.header())?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_sig(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: io::Read>(figure: Figure, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        if header != figure.header() {
            return Err(Error::InvalidConfig(format!(
                "unexpected {} header: {}",
                figure.name(),
                header.join(",")
            )));
        }
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    if field.is_empty() {
                        Ok(f64::NAN)
                    } else {
                        field
                            .parse::<f64>()
                            .map_err(|e| Error::InvalidConfig(format!("bad number `{field}`: {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            figure,
            rows,
            warnings: Vec::new(),
        })
    }
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

fn series_of(table: &SweepTable) -> (Vec<Series>, &'static str, &'static str) {
    let finite = |r: &&Vec<f64>| r.iter().all(|v| v.is_finite());
    let group = |key: &dyn Fn(&Vec<f64>) -> String, x: usize, y: usize| {
        let mut out: Vec<Series> = Vec::new();
        for row in table.rows.iter().filter(finite) {
            let name = key(row);
            if out.last().map(|s| &s.name) != Some(&name) {
                out.push(Series {
                    name,
                    points: Vec::new(),
                });
            }
            out.last_mut()
                .expect("pushed")
                .points
                .push((row[x], row[y]));
        }
        out
    };
    match table.figure {
        Figure::Fig1 => {
            let mut s = group(
                &|r| {
                    format!(
                        "({}, {}, {})",
                        format_sig(r[2]),
                        format_sig(r[3]),
                        format_sig(r[4])
                    )
                },
                0,
                1,
            );
            s.push(Series {
                name: "1/3".into(),
                points: vec![(0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0)],
            });
            (s, "ps", "dbar")
        }
        Figure::Fig2 => (group(&|_| "fill".into(), 0, 1), "n", "fill"),
        Figure::Fig3 => (
            group(&|r| format!("beta^2 = {}", format_sig(r[0])), 1, 2),
            "fill",
            "ps",
        ),
    }
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#444444",
];

/// A plain poly-line chart of the table.
pub fn write_svg(table: &SweepTable) -> String {
    let (series, x_label, y_label) = series_of(table);
    let (w, h, margin) = (640.0, 420.0, 56.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<polyline points="{m},{t} {m},{b} {r},{b}" fill="none" stroke="black"/>"#,
        m = margin,
        t = margin,
        b = h - margin,
        r = w - margin
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{x_label} [{}, {}]</text>"#,
        w / 2.0,
        h - 16.0,
        format_sig(x0),
        format_sig(x1)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">{y_label} [{}, {}]</text>"#,
        h / 2.0,
        h / 2.0,
        format_sig(y0),
        format_sig(y1)
    );
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{colour}">{}</text>"#,
            w - margin - 150.0,
            margin + 14.0 * (i as f64 + 1.0),
            s.name
        );
    }
    out.push_str("</svg>\n");
    out
}
