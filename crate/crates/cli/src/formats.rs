//! CSV tables and the parameter checkpoint.
//!
//! Real numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly. Every table starts with a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rigid_pinn_core::eval::{SliceRow, SweepRow};
use rigid_pinn_core::field::Measurements;
use rigid_pinn_core::geom::CartPoint;
use rigid_pinn_core::nn::{Activation, MlpArch, MlpParams};
use rigid_pinn_core::pw::PwModel;
use rigid_pinn_core::sh::ShCoefficients;
use rigid_pinn_core::train::LossReport;
use rigid_pinn_core::Complex;

use crate::error::CliError;

pub const MEASUREMENTS_HEADER: [&str; 5] = ["x", "y", "z", "re", "im"];
pub const POINTS_HEADER: [&str; 3] = ["x", "y", "z"];
pub const COEFFS_HEADER: [&str; 4] = ["n", "m", "re", "im"];
pub const AMPLITUDES_HEADER: [&str; 5] = ["dx", "dy", "dz", "re", "im"];
pub const LOSS_HEADER: [&str; 5] = ["epoch", "l_data", "l_pde", "l_bc", "total"];
pub const SWEEP_HEADER: [&str; 4] = ["radius", "nmse_sh", "nmse_pl", "nmse_pinn"];
pub const SLICE_HEADER: [&str; 5] = ["theta", "phi", "re", "im", "err"];

/// First token of the checkpoint header line.
pub const CHECKPOINT_MAGIC: &str = "rigid-pinn-mlp";
pub const CHECKPOINT_VERSION: &str = "v1";

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(header).map_err(|e| csv_io(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Parse {
            path: path.to_path_buf(),
            line: 0,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Reads a table of reals with the given header. Columns in errors are
/// 1-based field numbers.
fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let parse_err = |line: u64, column: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut rows = Vec::new();
    let mut seen_header = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, 0, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if !seen_header {
            let got: Vec<&str> = rec.iter().map(str::trim).collect();
            if got != header {
                return Err(parse_err(
                    line,
                    1,
                    format!("expected header `{}`, found `{}`", header.join(","), got.join(",")),
                ));
            }
            seen_header = true;
            continue;
        }
        if rec.len() != header.len() {
            return Err(parse_err(
                line,
                rec.len().min(header.len()) + 1,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, field)| {
                let v: f64 = field.trim().parse().map_err(|_| {
                    parse_err(line, j + 1, format!("`{field}` is not a number ({})", header[j]))
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(line, j + 1, format!("non-finite value for {}", header[j])))
                }
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(row);
    }
    if !seen_header {
        return Err(parse_err(1, 1, "empty file".into()));
    }
    Ok(rows)
}

fn point_row(p: CartPoint) -> Vec<String> {
    p.to_array().into_iter().map(real).collect()
}

/// Positions with complex values, header `x,y,z,re,im`.
pub fn write_field(path: &Path, points: &[CartPoint], values: &[Complex]) -> Result<(), CliError> {
    write_table(
        path,
        &MEASUREMENTS_HEADER,
        points.iter().zip(values).map(|(p, v)| {
            let mut row = point_row(*p);
            row.push(real(v.re));
            row.push(real(v.im));
            row
        }),
    )
}

pub fn write_measurements(path: &Path, m: &Measurements) -> Result<(), CliError> {
    write_field(path, &m.positions, &m.pressures)
}

/// Reads a measurements table. The result carries `scale = 1` and no SNR;
/// neither is stored in the file.
pub fn read_measurements(path: &Path) -> Result<Measurements, CliError> {
    let rows = read_table(path, &MEASUREMENTS_HEADER)?;
    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 2,
            column: 1,
            message: "no measurement rows".into(),
        });
    }
    let positions = rows.iter().map(|r| CartPoint::new(r[0], r[1], r[2])).collect();
    let pressures = rows.iter().map(|r| Complex::new(r[3], r[4])).collect();
    Ok(Measurements::new(positions, pressures)?)
}

pub fn write_points(path: &Path, points: &[CartPoint]) -> Result<(), CliError> {
    write_table(path, &POINTS_HEADER, points.iter().map(|p| point_row(*p)))
}

pub fn read_points(path: &Path) -> Result<Vec<CartPoint>, CliError> {
    Ok(read_table(path, &POINTS_HEADER)?
        .into_iter()
        .map(|r| CartPoint::new(r[0], r[1], r[2]))
        .collect())
}

pub fn write_coeffs(path: &Path, c: &ShCoefficients) -> Result<(), CliError> {
    write_table(
        path,
        &COEFFS_HEADER,
        c.iter()
            .map(|(n, m, v)| vec![n.to_string(), m.to_string(), real(v.re), real(v.im)]),
    )
}

pub fn write_amplitudes(path: &Path, model: &PwModel) -> Result<(), CliError> {
    write_table(
        path,
        &AMPLITUDES_HEADER,
        model.directions.iter().zip(&model.amplitudes).map(|(d, w)| {
            let mut row = point_row(*d);
            row.push(real(w.re));
            row.push(real(w.im));
            row
        }),
    )
}

pub fn write_loss(path: &Path, history: &[LossReport]) -> Result<(), CliError> {
    write_table(
        path,
        &LOSS_HEADER,
        history.iter().map(|r| {
            vec![
                r.epoch.to_string(),
                real(r.l_data),
                real(r.l_pde),
                real(r.l_bc),
                real(r.weighted_total),
            ]
        }),
    )
}

pub fn read_loss(path: &Path) -> Result<Vec<LossReport>, CliError> {
    Ok(read_table(path, &LOSS_HEADER)?
        .into_iter()
        .map(|r| LossReport {
            epoch: r[0] as usize,
            l_data: r[1],
            l_pde: r[2],
            l_bc: r[3],
            weighted_total: r[4],
        })
        .collect())
}

/// One row per radius; estimator columns in the order SH, PL, PINN.
pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    write_table(
        path,
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            let mut row = vec![real(r.radius)];
            row.extend(r.nmse.iter().map(|v| real(*v)));
            row
        }),
    )
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    Ok(read_table(path, &SWEEP_HEADER)?
        .into_iter()
        .map(|r| SweepRow {
            radius: r[0],
            nmse: r[1..].to_vec(),
        })
        .collect())
}

pub fn write_slice(path: &Path, rows: &[SliceRow]) -> Result<(), CliError> {
    write_table(
        path,
        &SLICE_HEADER,
        rows.iter().map(|r| {
            vec![real(r.theta), real(r.phi), real(r.re), real(r.im), real(r.err)]
        }),
    )
}

pub fn read_slice(path: &Path) -> Result<Vec<SliceRow>, CliError> {
    Ok(read_table(path, &SLICE_HEADER)?
        .into_iter()
        .map(|r| SliceRow {
            theta: r[0],
            phi: r[1],
            re: r[2],
            im: r[3],
            err: r[4],
        })
        .collect())
}

/// Checkpoint text: one header line
///
/// ```text
/// rigid-pinn-mlp v1 hidden_layers=3 hidden_width=4 activation=tanh params=66
/// ```
///
/// followed by one parameter per line in [`MlpParams`] order.
pub fn write_checkpoint(path: &Path, params: &MlpParams) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let arch = params.arch;
    let body = (|| -> std::io::Result<()> {
        writeln!(
            w,
            "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION} hidden_layers={} hidden_width={} activation={} params={}",
            arch.hidden_layers,
            arch.hidden_width,
            arch.activation.name(),
            params.len()
        )?;
        for v in &params.values {
            writeln!(w, "{}", real(*v))?;
        }
        w.flush()
    })();
    body.map_err(|e| CliError::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<MlpParams, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_checkpoint(path, &text)
}

pub fn parse_checkpoint(path: &Path, text: &str) -> Result<MlpParams, CliError> {
    let err = |line: usize, column: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        column,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, 1, "empty checkpoint".into()))?;
    let mut layers = None;
    let mut width = None;
    let mut activation = None;
    let mut count = None;
    let mut next_col = 1;
    for (i, tok) in header.split(' ').enumerate() {
        let col = next_col;
        next_col += tok.len() + 1;
        match i {
            0 if tok != CHECKPOINT_MAGIC => {
                return Err(err(1, col, format!("expected `{CHECKPOINT_MAGIC}`, found `{tok}`")))
            }
            1 if tok != CHECKPOINT_VERSION => {
                return Err(err(1, col, format!("unsupported version `{tok}`")))
            }
            0 | 1 => {}
            _ => {
                let (key, value) = tok
                    .split_once('=')
                    .ok_or_else(|| err(1, col, format!("expected key=value, found `{tok}`")))?;
                let num = || {
                    value
                        .parse::<usize>()
                        .map_err(|_| err(1, col + key.len() + 1, format!("bad {key} `{value}`")))
                };
                match key {
                    "hidden_layers" => layers = Some(num()?),
                    "hidden_width" => width = Some(num()?),
                    "params" => count = Some(num()?),
                    "activation" => {
                        activation = Some(match value {
                            "tanh" => Activation::Tanh,
                            "identity" => Activation::Identity,
                            _ => {
                                return Err(err(
                                    1,
                                    col + key.len() + 1,
                                    format!("unknown activation `{value}`"),
                                ))
                            }
                        })
                    }
                    _ => return Err(err(1, col, format!("unknown key `{key}`"))),
                }
            }
        }
    }
    let missing = |k: &str| err(1, header.len() + 1, format!("header is missing `{k}`"));
    let arch = MlpArch {
        hidden_layers: layers.ok_or_else(|| missing("hidden_layers"))?,
        hidden_width: width.ok_or_else(|| missing("hidden_width"))?,
        activation: activation.ok_or_else(|| missing("activation"))?,
    };
    let count = count.ok_or_else(|| missing("params"))?;
    if count != arch.param_count() {
        return Err(err(
            1,
            1,
            format!("params={count} does not match the architecture ({})", arch.param_count()),
        ));
    }
    let mut values = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| err(lineno, 1, format!("`{t}` is not a number")))?;
        if !v.is_finite() {
            return Err(err(lineno, 1, "non-finite parameter".into()));
        }
        values.push(v);
    }
    if values.len() != count {
        return Err(err(
            values.len() + 2,
            1,
            format!("expected {count} parameters, found {}", values.len()),
        ));
    }
    Ok(MlpParams::from_values(arch, values)?)
}
