//! CSV rendering of ensemble reports and re-rendering of summaries from
//! existing result tables.
//!
//! Every file starts with one provenance comment line carrying the seeds and
//! run parameters, followed by a CSV header.

use crate::error::{Error, Result};
use crate::mc::{
    fidelity_histogram, CellResult, EnsembleReport, Histogram, Objective, Provenance, SummaryRow,
};
use crate::protocol::ProtocolKind;
use crate::stats;

fn provenance_line(p: &Provenance) -> String {
    format!(
        "# instance_seed={} mc_seed={} M={} L={} delta_max={} objective={} rng={} version={}",
        p.instance_seed,
        p.mc_seed,
        p.steps,
        p.n_instances,
        p.delta_max,
        p.objective.label(),
        p.rng,
        p.version
    )
}

/// Per-cell table: `instance,protocol,m,final_E,final_F,accepts`.
pub fn render_results(report: &EnsembleReport) -> String {
    let mut out = provenance_line(&report.provenance);
    out.push('\n');
    out.push_str("instance,protocol,m,final_E,final_F,accepts\n");
    for c in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.instance,
            c.protocol.label(),
            c.m,
            c.final_e,
            c.final_f,
            c.accepts
        ));
    }
    out
}

pub fn render_summary(report: &EnsembleReport) -> String {
    let mut out = provenance_line(&report.provenance);
    out.push('\n');
    out.push_str("protocol,m,mean_F,stderr_F,mean_E,stderr_E\n");
    for r in &report.summary {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.protocol.label(),
            r.m,
            r.mean_f,
            r.stderr_f,
            r.mean_e,
            r.stderr_e
        ));
    }
    out
}

pub fn render_histograms(report: &EnsembleReport) -> String {
    let mut out = provenance_line(&report.provenance);
    out.push('\n');
    out.push_str("protocol,m,bin,bin_lo,bin_hi,mass\n");
    for h in &report.histograms {
        let n = h.masses.len() as f64;
        for (i, mass) in h.masses.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                h.protocol.label(),
                h.m,
                i,
                i as f64 / n,
                (i + 1) as f64 / n,
                mass
            ));
        }
    }
    out
}

/// Parse a results table back into cells; the provenance line, when present,
/// is returned verbatim.
pub fn parse_results(text: &str) -> Result<(Vec<CellResult>, Option<String>)> {
    let mut provenance = None;
    let mut cells = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(p) = line.strip_prefix('#') {
            if provenance.is_none() {
                provenance = Some(p.trim().to_string());
            }
            continue;
        }
        if line.starts_with("instance,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [instance, protocol, m, final_e, final_f, accepts] = fields[..] else {
            return Err(Error::parse(line_no, "expected 6 comma-separated fields"));
        };
        let protocol = ProtocolKind::from_label(protocol)
            .ok_or_else(|| Error::parse(line_no, format!("unknown protocol `{protocol}`")))?;
        let parse_num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(line_no, format!("bad number `{s}`")))
        };
        let parse_int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(line_no, format!("bad integer `{s}`")))
        };
        cells.push(CellResult {
            instance: parse_int(instance)?,
            protocol,
            m: parse_int(m)?,
            final_e: parse_num(final_e)?,
            final_f: parse_num(final_f)?,
            accepts: parse_int(accepts)?,
        });
    }
    Ok((cells, provenance))
}

/// Rebuild summary rows and histograms from a cell table.
pub fn summarize_cells(cells: &[CellResult], bins: usize) -> (Vec<SummaryRow>, Vec<Histogram>) {
    let mut keys: Vec<(ProtocolKind, usize)> = cells.iter().map(|c| (c.protocol, c.m)).collect();
    keys.sort_by_key(|&(p, m)| (p.label(), m));
    keys.dedup();
    let mut summary = Vec::new();
    let mut histograms = Vec::new();
    for (protocol, m) in keys {
        let fs: Vec<f64> = cells
            .iter()
            .filter(|c| c.protocol == protocol && c.m == m)
            .map(|c| c.final_f)
            .collect();
        let es: Vec<f64> = cells
            .iter()
            .filter(|c| c.protocol == protocol && c.m == m)
            .map(|c| c.final_e)
            .collect();
        summary.push(SummaryRow {
            protocol,
            m,
            mean_f: stats::mean(&fs),
            stderr_f: stats::std_err(&fs),
            mean_e: stats::mean(&es),
            stderr_e: stats::std_err(&es),
        });
        histograms.push(Histogram {
            protocol,
            m,
            masses: fidelity_histogram(&fs, bins),
        });
    }
    (summary, histograms)
}

/// Default objective parser for config files.
pub fn parse_objective(label: &str) -> Option<Objective> {
    match label {
        "minimize_e" => Some(Objective::MinimizeE),
        "maximize_f" => Some(Objective::MaximizeF),
        _ => None,
    }
}
