//! Subcommand implementations. Each returns the process exit code:
//! 0 success, 1 verification failure, 3 incomplete scan without --force.
//! Usage problems bubble up as errors and exit 2.

use crate::config::{self, Format};
use crate::output::{self, fmt15, fmt17, json_escape};
use crate::args::{CommonArgs, SpectrumArgs, VerifyArgs};
use anyhow::Result;
use ptbands::bands::{self, Band, EdgeKind, ScanWarning};
use ptbands::cell;
use ptbands::dispersion;
use ptbands::model::ModelParams;
use ptbands::oracle::{self, IntegratorConfig, Scheme};
use ptbands::susy;
use rayon::prelude::*;
use std::path::Path;

/// Data goes to the file (or stdout); the human summary goes to whichever
/// stream the data did not take.
fn note(wrote_file: bool, msg: &str) {
    if wrote_file {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn warning_text(w: &ScanWarning) -> String {
    match w {
        ScanWarning::IncompleteScan { e_lo, e_hi } => {
            format!("possible unresolved band in [{}, {}]", fmt15(*e_lo), fmt15(*e_hi))
        }
        ScanWarning::EdgeOrderAnomaly { energy } => {
            format!("band-edge ordering anomaly near E = {}", fmt15(*energy))
        }
    }
}

fn write_gnuplot(out: &Path, script: String) -> Result<()> {
    let gp = out.with_extension("gp");
    std::fs::write(&gp, script)
        .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", gp.display()))
}

fn csv_name(out: &Path) -> String {
    out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

// ---------------------------------------------------------------- bands

struct GapRow {
    e_lo: f64,
    e_hi: f64,
}

fn bands_csv(bands: &[Band], gaps: &[GapRow]) -> String {
    let mut s = String::from("kind,index,e_lo,e_hi,width,edge_lo,edge_hi\n");
    for (i, b) in bands.iter().enumerate() {
        s.push_str(&format!(
            "band,{i},{},{},{},{},{}\n",
            fmt15(b.e_lo),
            fmt15(b.e_hi),
            fmt15(b.width()),
            b.edge_lo,
            b.edge_hi
        ));
    }
    for (i, g) in gaps.iter().enumerate() {
        s.push_str(&format!(
            "gap,{i},{},{},{},,\n",
            fmt15(g.e_lo),
            fmt15(g.e_hi),
            fmt15(g.e_hi - g.e_lo)
        ));
    }
    s
}

fn params_json(p: &ModelParams) -> String {
    format!(
        "{{\"l\":{},\"alpha\":{},\"a\":{}}}",
        p.l(),
        fmt17(p.alpha()),
        fmt17(p.a())
    )
}

fn bands_json(
    p: &ModelParams,
    window: (f64, f64),
    bands: &[Band],
    gaps: &[GapRow],
    warnings: &[String],
) -> String {
    let band_items: Vec<String> = bands
        .iter()
        .enumerate()
        .map(|(i, b)| {
            format!(
                "{{\"index\":{i},\"e_lo\":{},\"e_hi\":{},\"width\":{},\"edge_lo\":\"{}\",\"edge_hi\":\"{}\"}}",
                fmt17(b.e_lo),
                fmt17(b.e_hi),
                fmt17(b.width()),
                b.edge_lo,
                b.edge_hi
            )
        })
        .collect();
    let gap_items: Vec<String> = gaps
        .iter()
        .enumerate()
        .map(|(i, g)| {
            format!(
                "{{\"index\":{i},\"e_lo\":{},\"e_hi\":{},\"width\":{}}}",
                fmt17(g.e_lo),
                fmt17(g.e_hi),
                fmt17(g.e_hi - g.e_lo)
            )
        })
        .collect();
    let warn_items: Vec<String> =
        warnings.iter().map(|w| format!("\"{}\"", json_escape(w))).collect();
    format!(
        "{{\"params\":{},\"window\":{{\"emin\":{},\"emax\":{}}},\"bands\":[{}],\"gaps\":[{}],\"warnings\":[{}]}}\n",
        params_json(p),
        fmt17(window.0),
        fmt17(window.1),
        band_items.join(","),
        gap_items.join(","),
        warn_items.join(",")
    )
}

pub fn bands(args: &CommonArgs) -> Result<u8> {
    let cfg = config::resolve_scan(args, 801)?;
    let p = cfg.params;

    // never let one scan straddle E = 0
    let segments: Vec<(f64, f64)> = if cfg.emin < 0.0 && cfg.emax > 0.0 {
        vec![(cfg.emin, 0.0), (0.0, cfg.emax)]
    } else {
        vec![(cfg.emin, cfg.emax)]
    };
    let mut all_bands: Vec<Band> = Vec::new();
    let mut warnings: Vec<ScanWarning> = Vec::new();
    for (lo, hi) in segments {
        let scan = bands::find_band_edges_with(&p, lo, hi, cfg.tol, cfg.samples);
        all_bands.extend(scan.bands);
        warnings.extend(scan.warnings);
    }
    // a band split by the E = 0 scan boundary is one physical band
    let mut merged: Vec<Band> = Vec::new();
    for b in all_bands {
        match merged.last_mut() {
            Some(prev)
                if prev.e_hi == 0.0
                    && b.e_lo == 0.0
                    && prev.edge_hi == EdgeKind::Cutoff
                    && b.edge_lo == EdgeKind::Cutoff =>
            {
                prev.e_hi = b.e_hi;
                prev.edge_hi = b.edge_hi;
            }
            _ => merged.push(b),
        }
    }

    if !cfg.force && warnings.iter().any(ScanWarning::is_incomplete_scan) {
        for w in &warnings {
            eprintln!("ptbands: {}", warning_text(w));
        }
        eprintln!("ptbands: incomplete scan; re-run with --force to write results anyway");
        return Ok(3);
    }

    let gaps: Vec<GapRow> = merged
        .windows(2)
        .filter(|w| w[1].e_lo - w[0].e_hi > 1e-12 * w[1].e_lo.abs().max(1.0))
        .map(|w| GapRow { e_lo: w[0].e_hi, e_hi: w[1].e_lo })
        .collect();

    let warn_strings: Vec<String> = warnings.iter().map(warning_text).collect();
    let content = match cfg.format {
        Format::Csv => bands_csv(&merged, &gaps),
        Format::Json => bands_json(&p, (cfg.emin, cfg.emax), &merged, &gaps, &warn_strings),
    };
    let wrote = output::emit(cfg.out.as_deref(), &content)?;
    if cfg.gnuplot {
        let out = cfg.out.as_ref().expect("validated");
        write_gnuplot(out, output::gnuplot_for_bands(&csv_name(out)))?;
    }
    let first_gap = gaps
        .first()
        .map(|g| format!("[{:.6}, {:.6}]", g.e_lo, g.e_hi))
        .unwrap_or_else(|| "none".into());
    note(
        wrote,
        &format!(
            "bands: {} band(s), {} gap(s) in [{}, {}]; first gap {}; {} warning(s)",
            merged.len(),
            gaps.len(),
            cfg.emin,
            cfg.emax,
            first_gap,
            warnings.len()
        ),
    );
    Ok(0)
}

// ----------------------------------------------------------- dispersion

fn branch_label(e: f64) -> &'static str {
    if e > cell::ZERO_ENERGY_WINDOW {
        "pos"
    } else if e < -cell::ZERO_ENERGY_WINDOW {
        "neg"
    } else {
        "zero"
    }
}

pub fn dispersion(args: &CommonArgs) -> Result<u8> {
    let cfg = config::resolve_scan(args, 200)?;
    let p = cfg.params;
    let rows: Vec<dispersion::DiscriminantSample> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let e = cfg.emin + (cfg.emax - cfg.emin) * i as f64 / (cfg.samples - 1) as f64;
            dispersion::discriminant_with_reference(&p, e)
        })
        .collect();

    let content = match cfg.format {
        Format::Csv => {
            let mut s = String::from("E,k,branch,D,f_paper,in_band\n");
            for r in &rows {
                let k = (2.0 * r.energy.abs()).sqrt();
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt15(r.energy),
                    fmt15(k),
                    branch_label(r.energy),
                    fmt15(r.d),
                    r.f_closed_form.map(fmt15).unwrap_or_default(),
                    r.in_band
                ));
            }
            s
        }
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|r| {
                    let k = (2.0 * r.energy.abs()).sqrt();
                    format!(
                        "{{\"e\":{},\"k\":{},\"branch\":\"{}\",\"d\":{},\"f_paper\":{},\"in_band\":{}}}",
                        fmt17(r.energy),
                        fmt17(k),
                        branch_label(r.energy),
                        fmt17(r.d),
                        r.f_closed_form.map(fmt17).unwrap_or_else(|| "null".into()),
                        r.in_band
                    )
                })
                .collect();
            format!("{{\"params\":{},\"rows\":[{}]}}\n", params_json(&p), items.join(","))
        }
    };
    let wrote = output::emit(cfg.out.as_deref(), &content)?;
    if cfg.gnuplot {
        let out = cfg.out.as_ref().expect("validated");
        write_gnuplot(out, output::gnuplot_for_dispersion(&csv_name(out)))?;
    }
    let in_band = rows.iter().filter(|r| r.in_band).count();
    note(
        wrote,
        &format!(
            "dispersion: {} sample(s) in [{}, {}], {} in-band",
            rows.len(),
            cfg.emin,
            cfg.emax,
            in_band
        ),
    );
    Ok(0)
}

// ------------------------------------------------------------- spectrum

pub fn spectrum(args: &SpectrumArgs) -> Result<u8> {
    let cfg = config::resolve_spectrum(args)?;
    let p = cfg.params;
    let analytic = susy::bound_spectrum(&p);
    let oracle_levels = if cfg.verify {
        match oracle::single_well_bound_states(&p, cfg.half_width, cfg.tol) {
            Ok(levels) => Some(levels),
            Err(e) => {
                eprintln!("ptbands: shooting oracle failed: {e}");
                return Ok(1);
            }
        }
    } else {
        None
    };

    let mut max_diff = 0.0f64;
    let mut rows = Vec::new();
    for (n, &ea) in analytic.iter().enumerate() {
        let eo = oracle_levels.as_ref().and_then(|v| v.get(n)).copied();
        let diff = eo.map(|x| (x - ea).abs());
        if let Some(d) = diff {
            max_diff = max_diff.max(d);
        }
        rows.push((n, ea, eo, diff));
    }

    let content = match cfg.format {
        Format::Csv => {
            let mut s = String::from("n,e_analytic,e_oracle,abs_diff\n");
            for (n, ea, eo, diff) in &rows {
                s.push_str(&format!(
                    "{n},{},{},{}\n",
                    fmt15(*ea),
                    eo.map(fmt15).unwrap_or_default(),
                    diff.map(fmt15).unwrap_or_default()
                ));
            }
            s
        }
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|(n, ea, eo, diff)| {
                    format!(
                        "{{\"n\":{n},\"e_analytic\":{},\"e_oracle\":{},\"abs_diff\":{}}}",
                        fmt17(*ea),
                        eo.map(fmt17).unwrap_or_else(|| "null".into()),
                        diff.map(fmt17).unwrap_or_else(|| "null".into())
                    )
                })
                .collect();
            format!("{{\"params\":{},\"levels\":[{}]}}\n", params_json(&p), items.join(","))
        }
    };
    let wrote = output::emit(cfg.out.as_deref(), &content)?;
    if cfg.gnuplot {
        let out = cfg.out.as_ref().expect("validated");
        write_gnuplot(out, output::gnuplot_for_spectrum(&csv_name(out)))?;
    }

    if let Some(levels) = &oracle_levels {
        if levels.len() != analytic.len() {
            note(
                wrote,
                &format!(
                    "spectrum: oracle found {} level(s), analytic predicts {}",
                    levels.len(),
                    analytic.len()
                ),
            );
            return Ok(1);
        }
        note(
            wrote,
            &format!("spectrum: {} level(s); max |Δ| = {:.3e}", analytic.len(), max_diff),
        );
    } else {
        note(wrote, &format!("spectrum: {} level(s)", analytic.len()));
    }
    Ok(0)
}

// --------------------------------------------------------------- verify

struct HardCheck {
    name: &'static str,
    value: f64,
    threshold: f64,
}

impl HardCheck {
    fn pass(&self) -> bool {
        self.value <= self.threshold
    }
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    let cfg = config::resolve_verify(args)?;
    let p = cfg.params;
    let alpha = p.alpha();
    let a = p.a();

    // bound spectrum vs shooting oracle
    let analytic = susy::bound_spectrum(&p);
    let bound_diff = match oracle::single_well_bound_states(&p, 12.0 / alpha, 1e-8) {
        Ok(levels) if levels.len() == analytic.len() => analytic
            .iter()
            .zip(&levels)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max),
        _ => f64::INFINITY,
    };

    // closed-form vs Numerov discriminant sweep
    let numerov = IntegratorConfig::new(100_000, Scheme::Numerov, (-a, a))
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let energies: Vec<f64> = (0..cfg.samples)
        .map(|i| cfg.emin + (cfg.emax - cfg.emin) * i as f64 / (cfg.samples - 1) as f64)
        .collect();
    let disc_diff = energies
        .par_iter()
        .map(|&e| {
            let exact = dispersion::discriminant(&p, e).d;
            match oracle::numeric_discriminant(&p, e, &numerov) {
                Ok(n) => (exact - n).abs(),
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);

    // structural checks on a grid subsample
    let grid: Vec<f64> = (0..=200).map(|i| -a + 2.0 * a * i as f64 / 200.0).collect();
    let mut wronskian_spread = 0.0f64;
    let mut det_err = 0.0f64;
    let mut residual = 0.0f64;
    let mut repaired = 0usize;
    for e in energies.iter().step_by((cfg.samples / 24).max(1)) {
        let basis = cell::intertwined_basis(&p, *e);
        wronskian_spread = wronskian_spread.max(basis.wronskian_rel_spread);
        det_err = det_err.max((dispersion::monodromy_from_basis(&p, &basis).det() - 1.0).abs());
        if basis.repaired {
            repaired += 1;
        }
        for sol in [&basis.u, &basis.v] {
            if !sol.is_numeric() {
                residual = residual.max(cell::schrodinger_residual(&p, sol, &grid));
            }
        }
    }

    // shape invariance across the hierarchy of this well
    let xs: Vec<f64> = (0..=1000).map(|i| -5.0 + 10.0 * i as f64 / 1000.0).collect();
    let shape = (1..=p.l())
        .map(|j| susy::shape_invariance_residual(j, alpha, &xs))
        .fold(0.0f64, f64::max);

    // closed-form band function crosscheck (printed only for l = 1, 2)
    let crosschecks: Vec<dispersion::Crosscheck> = if p.l() <= 2 {
        (1..=300)
            .into_par_iter()
            .map(|i| {
                let k_hat = 15.0 * i as f64 / 300.0;
                let k = k_hat / a;
                dispersion::crosscheck_band_function(&p, 0.5 * k * k)
            })
            .collect()
    } else {
        Vec::new()
    };
    let non_edge: Vec<&dispersion::Crosscheck> =
        crosschecks.iter().filter(|c| !c.is_edge_point).collect();
    let with_f = |sel: fn(&dispersion::Crosscheck) -> Option<bool>| {
        let considered: Vec<_> = non_edge.iter().filter(|c| sel(c).is_some()).collect();
        if considered.is_empty() {
            return (0usize, 0usize);
        }
        let agree = considered.iter().filter(|c| sel(c) == Some(true)).count();
        (agree, considered.len())
    };
    let (cell_agree, cell_total) = with_f(|c| c.cell_membership_agree);
    let (period_agree, period_total) = with_f(|c| c.period_membership_agree);
    let membership_agreement = period_total > 0 && period_agree == period_total;
    let max_res = |sel: fn(&dispersion::Crosscheck) -> Option<f64>| {
        crosschecks.iter().filter_map(sel).fold(0.0f64, f64::max)
    };
    let period_mismatches: Vec<&dispersion::Crosscheck> = non_edge
        .iter()
        .filter(|c| c.period_membership_agree == Some(false))
        .copied()
        .collect();
    let cell_mismatches: Vec<&dispersion::Crosscheck> = non_edge
        .iter()
        .filter(|c| c.cell_membership_agree == Some(false))
        .copied()
        .collect();
    let mismatch_json = |list: &[&dispersion::Crosscheck], scale: f64, f: fn(&dispersion::Crosscheck) -> Option<f64>| {
        let items: Vec<String> = list
            .iter()
            .take(50)
            .map(|c| {
                format!(
                    "{{\"k_hat\":{},\"e\":{},\"d\":{},\"f\":{}}}",
                    fmt17(c.k * scale),
                    fmt17(c.energy),
                    fmt17(c.d),
                    f(c).map(fmt17).unwrap_or_else(|| "null".into())
                )
            })
            .collect();
        items.join(",")
    };

    let hard = [
        HardCheck { name: "bound_spectrum_max_abs_diff", value: bound_diff, threshold: 1e-6 },
        HardCheck { name: "discriminant_max_abs_diff", value: disc_diff, threshold: 1e-6 },
        HardCheck { name: "shape_invariance_residual", value: shape, threshold: 1e-12 },
        HardCheck { name: "wronskian_max_rel_spread", value: wronskian_spread, threshold: 1e-9 },
        HardCheck { name: "monodromy_det_max_err", value: det_err, threshold: 1e-9 },
        HardCheck { name: "schrodinger_residual_max", value: residual, threshold: 1e-8 },
    ];
    let failures: Vec<&str> = hard.iter().filter(|c| !c.pass()).map(|c| c.name).collect();
    let pass = failures.is_empty();

    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let check_fields: Vec<String> = hard
        .iter()
        .map(|c| format!("\"{}\":{}", c.name, fmt17(c.value)))
        .collect();
    let threshold_fields: Vec<String> = hard
        .iter()
        .map(|c| format!("\"{}\":{}", c.name, fmt17(c.threshold)))
        .collect();
    let failure_items: Vec<String> =
        failures.iter().map(|f| format!("\"{}\"", json_escape(f))).collect();

    let report = format!(
        concat!(
            "{{\"meta\":{{\"tool\":\"ptbands\",\"version\":\"{version}\",\"generated_at_unix\":{now}}},",
            "\"params\":{params},",
            "\"checks\":{{{checks},",
            "\"repaired_bases\":{repaired},",
            "\"discriminant_grid\":{{\"e_min\":{emin},\"e_max\":{emax},\"points\":{npts}}},",
            "\"paper_formula_band_membership_agreement\":{agreement},",
            "\"paper_formula_mismatches\":[{period_mismatches}],",
            "\"paper_formula_crosscheck\":{{",
            "\"points\":{cpoints},",
            "\"agreement_fraction_cell_scaled\":{cell_frac},",
            "\"agreement_fraction_period_scaled\":{period_frac},",
            "\"max_identity_residual_cell_scaled\":{cell_res},",
            "\"max_identity_residual_period_scaled\":{period_res},",
            "\"cell_scaled_mismatch_count\":{cell_miss},",
            "\"cell_scaled_mismatches\":[{cell_mismatches}]}},",
            "\"thresholds\":{{{thresholds}}}}},",
            "\"summary\":{{\"hard_checks_passed\":{pass},\"failures\":[{failures}]}}}}\n"
        ),
        version = env!("CARGO_PKG_VERSION"),
        now = now,
        params = params_json(&p),
        checks = check_fields.join(","),
        repaired = repaired,
        emin = fmt17(cfg.emin),
        emax = fmt17(cfg.emax),
        npts = cfg.samples,
        agreement = if crosschecks.is_empty() {
            "null".to_string()
        } else {
            membership_agreement.to_string()
        },
        period_mismatches = mismatch_json(&period_mismatches, 2.0 * a, |c| c.f_period_scaled),
        cpoints = crosschecks.len(),
        cell_frac = if cell_total > 0 {
            fmt17(cell_agree as f64 / cell_total as f64)
        } else {
            "null".into()
        },
        period_frac = if period_total > 0 {
            fmt17(period_agree as f64 / period_total as f64)
        } else {
            "null".into()
        },
        cell_res = fmt17(max_res(|c| c.cell_identity_residual)),
        period_res = fmt17(max_res(|c| c.period_identity_residual)),
        cell_miss = cell_mismatches.len(),
        cell_mismatches = mismatch_json(&cell_mismatches, a, |c| c.f_cell_scaled),
        thresholds = threshold_fields.join(","),
        pass = pass,
        failures = failure_items.join(","),
    );

    let wrote = output::emit(cfg.out.as_deref(), &report)?;
    let verdict = if pass { "PASS" } else { "FAIL" };
    note(
        wrote,
        &format!(
            "verify: {verdict}; max deviations: spectrum {bound_diff:.2e}, discriminant {disc_diff:.2e}, shape {shape:.2e}, wronskian {wronskian_spread:.2e}, det {det_err:.2e}, residual {residual:.2e}"
        ),
    );
    Ok(if pass { 0 } else { 1 })
}
