//! Deterministic CSV/JSON emission (15 and 17 significant digits) plus
//! the matching parsers used for round-trip checks, and gnuplot sidecars.

use anyhow::{bail, Context, Result};
use std::io::Write;
use std::path::Path;

/// 15 significant digits: CSV payload precision.
pub fn fmt15(x: f64) -> String {
    format!("{x:.14e}")
}

/// 17 significant digits: JSON payload precision (f64 round-trip safe).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Write to the path, or to stdout when no path is given. Returns whether
/// a file was written.
pub fn emit(out: Option<&Path>, content: &str) -> Result<bool> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(true)
        }
        None => {
            std::io::stdout().write_all(content.as_bytes()).context("stdout write failed")?;
            Ok(false)
        }
    }
}

/// Parse our own CSV dialect: comma-separated, header row, no quoting.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let header = match lines.next() {
        Some(h) => h.split(',').map(str::to_string).collect::<Vec<_>>(),
        None => bail!("empty CSV"),
    };
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != header.len() {
            bail!("CSV row has {} fields, header has {}", fields.len(), header.len());
        }
        rows.push(fields);
    }
    Ok((header, rows))
}

pub fn gnuplot_for_dispersion(csv_name: &str) -> String {
    format!(
        "set datafile separator \",\"\n\
         set key autotitle columnhead\n\
         set xlabel \"E\"\n\
         set ylabel \"D(E)\"\n\
         set grid\n\
         plot \"{csv_name}\" using 1:4 with lines title \"D\", \\\n\
         \x20    1 with lines lc rgb \"gray\" dt 2 notitle, \\\n\
         \x20   -1 with lines lc rgb \"gray\" dt 2 notitle\n"
    )
}

pub fn gnuplot_for_bands(csv_name: &str) -> String {
    format!(
        "set datafile separator \",\"\n\
         set key autotitle columnhead\n\
         set xlabel \"E\"\n\
         set ylabel \"band / gap index\"\n\
         set grid xtics\n\
         # bands drawn solid, gaps dashed, as horizontal extents\n\
         plot \"{csv_name}\" using (0.5*($3+$4)):2:3:4 with xerrorbars \\\n\
         \x20    lc rgb \"navy\" pt 7 notitle\n"
    )
}

pub fn gnuplot_for_spectrum(csv_name: &str) -> String {
    format!(
        "set datafile separator \",\"\n\
         set key autotitle columnhead\n\
         set xlabel \"n\"\n\
         set ylabel \"E_n\"\n\
         set grid\n\
         plot \"{csv_name}\" using 1:2 with points pt 7 title \"levels\"\n"
    )
}
