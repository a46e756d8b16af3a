use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// One point of a figure data set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub family: String,
    pub x: f64,
    pub value: f64,
    pub curve: String,
}

/// Write rows as CSV with the header `family,x,value,curve`. Lines in
/// `comments` are emitted first, each prefixed with `# `.
pub fn write_figure_csv<W: Write>(mut out: W, comments: &[String], rows: &[FigureRow]) -> io::Result<()> {
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "family,x,value,curve")?;
    for row in rows {
        writeln!(out, "{},{:?},{:?},{}", row.family, row.x, row.value, row.curve)?;
    }
    out.flush()
}

/// `points` log-spaced magnitudes from `lo` to `hi`, mirrored to negative
/// values; sorted ascending and free of zero.
pub fn symmetric_log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let positive: Vec<f64> = match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut v: Vec<f64> = (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect();
            // keep the requested end points exact
            v[0] = lo;
            v[points - 1] = hi;
            v
        }
    };
    positive.iter().rev().map(|v| -v).chain(positive.iter().copied()).collect()
}

/// Log-spaced integer counts from `10^lo_exp` to `10^hi_exp`, `per_decade`
/// points per factor of ten, rounded and deduplicated.
pub fn log_spaced_counts(lo_exp: u32, hi_exp: u32, per_decade: usize) -> Vec<u64> {
    let steps = (hi_exp.saturating_sub(lo_exp)) as usize * per_decade.max(1);
    let mut out: Vec<u64> =
        (0..=steps).map(|i| 10f64.powf(lo_exp as f64 + i as f64 / per_decade.max(1) as f64).round() as u64).collect();
    out.dedup();
    out
}
