//! Artifact export: scalar fields, flux sweeps, trajectories and stagnation
//! inventories to CSV, JSON, or gnuplot-compatible whitespace `.dat`.
//!
//! All floats are serialized with 17 significant digits (CSV/dat) or via
//! serde_json's shortest-round-trip encoding (JSON); both reproduce the f64
//! bit pattern exactly on parse-back. Writers emit `\n` line endings and no
//! time-dependent content, so identical inputs yield byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::ClassicalTrajectory;
use crate::flow::StagnationInventory;
use crate::quantifiers::SweepEntry;
use crate::quantum::{ScalarField, SystemConfig};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("failed to write artifact: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to serialize artifact: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// On-disk representation of an exported artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Json,
    /// Gnuplot-compatible whitespace columns with `#` comment headers and
    /// blank lines between grid rows.
    Dat,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            "dat" => Ok(ExportFormat::Dat),
            other => Err(format!("unknown format {other:?}; expected csv|json|dat")),
        }
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn writer(path: &Path) -> Result<BufWriter<File>, IoError> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Serialize)]
struct FieldDocument<'a> {
    system: &'a SystemConfig,
    grid: crate::quantum::PhaseGrid,
    label: crate::quantum::FieldLabel,
    /// Row-major (k fastest), nx × nk values.
    values: &'a [f64],
}

/// Export a scalar field. CSV/dat rows are `x,k,value` with x outer and k
/// inner; dat inserts a blank line after each x-row (gnuplot `splot` block
/// format); JSON is a self-describing document with the flat value array.
pub fn write_field(
    path: &Path,
    format: ExportFormat,
    cfg: &SystemConfig,
    field: &ScalarField,
) -> Result<(), IoError> {
    let mut out = writer(path)?;
    let grid = *field.grid();
    match format {
        ExportFormat::Json => {
            serde_json::to_writer(
                &mut out,
                &FieldDocument {
                    system: cfg,
                    grid,
                    label: field.label(),
                    values: field.values(),
                },
            )?;
            out.write_all(b"\n")?;
        }
        ExportFormat::Csv => {
            writeln!(out, "x,k,value")?;
            for ix in 0..grid.nx {
                for ik in 0..grid.nk {
                    writeln!(
                        out,
                        "{},{},{}",
                        fmt_f64(grid.x(ix)),
                        fmt_f64(grid.k(ik)),
                        fmt_f64(field.value(ix, ik))
                    )?;
                }
            }
        }
        ExportFormat::Dat => {
            writeln!(
                out,
                "# field={} n={} alpha={} mode={:?}",
                field.label(),
                cfg.n(),
                cfg.alpha(),
                cfg.mode()
            )?;
            writeln!(out, "# x k value")?;
            for ix in 0..grid.nx {
                for ik in 0..grid.nk {
                    writeln!(
                        out,
                        "{} {} {}",
                        fmt_f64(grid.x(ix)),
                        fmt_f64(grid.k(ik)),
                        fmt_f64(field.value(ix, ik))
                    )?;
                }
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CurrentsDocument<'a> {
    system: &'a SystemConfig,
    grid: crate::quantum::PhaseGrid,
    /// Row-major (k fastest), nx × nk values.
    jx: &'a [f64],
    jk: &'a [f64],
}

/// Export the Wigner current pair on a common grid. CSV/dat rows are
/// `x,k,jx,jk` with x outer and k inner; dat inserts a blank line after
/// each x-row.
pub fn write_currents(
    path: &Path,
    format: ExportFormat,
    cfg: &SystemConfig,
    jx: &ScalarField,
    jk: &ScalarField,
) -> Result<(), IoError> {
    let mut out = writer(path)?;
    let grid = *jx.grid();
    match format {
        ExportFormat::Json => {
            serde_json::to_writer(
                &mut out,
                &CurrentsDocument {
                    system: cfg,
                    grid,
                    jx: jx.values(),
                    jk: jk.values(),
                },
            )?;
            out.write_all(b"\n")?;
        }
        ExportFormat::Csv | ExportFormat::Dat => {
            let (head, sep, blocky) = match format {
                ExportFormat::Csv => ("x,k,jx,jk", ",", false),
                _ => ("# x k jx jk", " ", true),
            };
            writeln!(out, "{head}")?;
            for ix in 0..grid.nx {
                for ik in 0..grid.nk {
                    writeln!(
                        out,
                        "{}{sep}{}{sep}{}{sep}{}",
                        fmt_f64(grid.x(ix)),
                        fmt_f64(grid.k(ik)),
                        fmt_f64(jx.value(ix, ik)),
                        fmt_f64(jk.value(ix, ik))
                    )?;
                }
                if blocky {
                    writeln!(out)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    system: &'a SystemConfig,
    entries: &'a [SweepEntry],
}

/// Export a flux sweep. CSV/dat schema:
/// `epsilon,sigma_rate,entropy_rate,purity_rate,clamp_events`; rows whose
/// evaluation failed carry `nan` rates and clamp_events 0 (the error text
/// is in the JSON form and on the CLI's stderr).
pub fn write_sweep(
    path: &Path,
    format: ExportFormat,
    cfg: &SystemConfig,
    entries: &[SweepEntry],
) -> Result<(), IoError> {
    let mut out = writer(path)?;
    match format {
        ExportFormat::Json => {
            serde_json::to_writer(
                &mut out,
                &SweepDocument {
                    system: cfg,
                    entries,
                },
            )?;
            out.write_all(b"\n")?;
        }
        ExportFormat::Csv | ExportFormat::Dat => {
            let (head, sep) = match format {
                ExportFormat::Csv => (
                    "epsilon,sigma_rate,entropy_rate,purity_rate,clamp_events",
                    ",",
                ),
                _ => (
                    "# epsilon sigma_rate entropy_rate purity_rate clamp_events",
                    " ",
                ),
            };
            writeln!(out, "{head}")?;
            for e in entries {
                let (s, h, p, c) = match &e.report {
                    Some(r) => (r.sigma_rate, r.entropy_rate, r.purity_rate, r.clamp_events),
                    None => (f64::NAN, f64::NAN, f64::NAN, 0),
                };
                writeln!(
                    out,
                    "{}{sep}{}{sep}{}{sep}{}{sep}{}",
                    fmt_f64(e.epsilon),
                    fmt_f64(s),
                    fmt_f64(h),
                    fmt_f64(p),
                    c
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Export a classical orbit. CSV/dat schema: `tau,x,k,dxdtau`.
pub fn write_trajectory(
    path: &Path,
    format: ExportFormat,
    traj: &ClassicalTrajectory,
) -> Result<(), IoError> {
    let mut out = writer(path)?;
    match format {
        ExportFormat::Json => {
            serde_json::to_writer(&mut out, traj)?;
            out.write_all(b"\n")?;
        }
        ExportFormat::Csv | ExportFormat::Dat => {
            let (head, sep) = match format {
                ExportFormat::Csv => ("tau,x,k,dxdtau", ","),
                _ => ("# tau x k dxdtau", " "),
            };
            writeln!(out, "{head}")?;
            for s in &traj.samples {
                writeln!(
                    out,
                    "{}{sep}{}{sep}{}{sep}{}",
                    fmt_f64(s.tau),
                    fmt_f64(s.x),
                    fmt_f64(s.k),
                    fmt_f64(s.dx_dtau)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StagnationDocument<'a> {
    system: &'a SystemConfig,
    inventory: &'a StagnationInventory,
}

/// Export a stagnation-point inventory. CSV/dat schema:
/// `x,k,class,winding,index,residual`.
pub fn write_stagnation(
    path: &Path,
    format: ExportFormat,
    cfg: &SystemConfig,
    inventory: &StagnationInventory,
) -> Result<(), IoError> {
    let mut out = writer(path)?;
    match format {
        ExportFormat::Json => {
            serde_json::to_writer_pretty(
                &mut out,
                &StagnationDocument {
                    system: cfg,
                    inventory,
                },
            )?;
            out.write_all(b"\n")?;
        }
        ExportFormat::Csv | ExportFormat::Dat => {
            let (head, sep) = match format {
                ExportFormat::Csv => ("x,k,class,winding,index,residual", ","),
                _ => ("# x k class winding index residual", " "),
            };
            writeln!(out, "{head}")?;
            for p in &inventory.points {
                writeln!(
                    out,
                    "{}{sep}{}{sep}{:?}{sep}{}{sep}{}{sep}{}",
                    fmt_f64(p.x),
                    fmt_f64(p.k),
                    p.classification,
                    p.winding,
                    p.index,
                    fmt_f64(p.residual)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Serialize any document as pretty JSON (used for validation reports and
/// `--dump-config`).
pub fn write_json_pretty<T: Serialize>(path: &Path, doc: &T) -> Result<(), IoError> {
    let mut out = writer(path)?;
    serde_json::to_writer_pretty(&mut out, doc)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
