//! CSV writers and readers. Column order is fixed; floats use Rust's
//! shortest round-trip formatting, missing values are empty fields.

use std::io;
use std::path::Path;

use mvam::dynamics::SimTrace;
use mvam::energetics::EvaluationRecord;
use mvam::gait::LegId;
use mvam::search::GenerationStats;

pub const RECORD_HEADER: [&str; 9] = [
    "id",
    "cx_m",
    "cy_m",
    "ib_kgm2",
    "mass_kg",
    "tcot",
    "payload_margin_kg",
    "min_stability_margin_m",
    "feasible",
];

pub const HISTORY_HEADER: [&str; 3] = ["generation", "best_tcot", "mean_tcot"];

pub const SLICE_HEADER: [&str; 3] = ["cx_m", "ib_kgm2", "tcot"];

const LEG_COLUMNS: [&str; 6] = ["phi_rad", "ell_m", "tau_hip_Nm", "tau_knee_Nm", "Fx_N", "Fz_N"];

/// Shortest round-trip form, with an exponent for very small or large values.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn record_row(r: &EvaluationRecord) -> [String; 9] {
    [
        r.id.to_string(),
        num(r.cx),
        num(r.cy),
        num(r.ib),
        num(r.mass),
        opt(r.tcot),
        opt(r.payload_margin),
        opt(r.min_stability_margin),
        r.feasible.to_string(),
    ]
}

pub fn write_records(path: &Path, records: &[EvaluationRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record(record_row(r))?;
    }
    w.flush()?;
    Ok(())
}

fn field<'a>(row: &'a csv::StringRecord, i: usize, name: &str) -> io::Result<&'a str> {
    row.get(i)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, format!("missing column {name}")))
}

fn parse_f64(s: &str, name: &str) -> io::Result<f64> {
    s.parse().map_err(|_| {
        io::Error::new(io::ErrorKind::InvalidData, format!("column {name}: bad number `{s}`"))
    })
}

fn parse_opt(s: &str, name: &str) -> io::Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, name).map(Some)
    }
}

pub fn read_records(path: &Path) -> Result<Vec<EvaluationRecord>, Box<dyn std::error::Error>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != RECORD_HEADER {
        return Err(format!("{}: unexpected header {header:?}", path.display()).into());
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let f = |i: usize| field(&row, i, RECORD_HEADER[i]);
        out.push(EvaluationRecord {
            id: f(0)?.parse().map_err(|_| format!("bad id `{}`", &row[0]))?,
            cx: parse_f64(f(1)?, "cx_m")?,
            cy: parse_f64(f(2)?, "cy_m")?,
            ib: parse_f64(f(3)?, "ib_kgm2")?,
            mass: parse_f64(f(4)?, "mass_kg")?,
            tcot: parse_opt(f(5)?, "tcot")?,
            payload_margin: parse_opt(f(6)?, "payload_margin_kg")?,
            min_stability_margin: parse_opt(f(7)?, "min_stability_margin_m")?,
            feasible: f(8)? == "true",
            reason: None,
        });
    }
    Ok(out)
}

pub fn write_history(path: &Path, history: &[GenerationStats]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HISTORY_HEADER)?;
    for h in history {
        w.write_record([h.generation.to_string(), num(h.best), num(h.mean)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_header() -> Vec<String> {
    let mut h: Vec<String> = ["t_s", "x_m", "z_m", "theta_rad"].map(String::from).to_vec();
    for leg in LegId::ALL {
        for c in LEG_COLUMNS {
            h.push(format!("{}_{c}", leg.short_name()));
        }
    }
    h.push("margin_m".into());
    h
}

pub fn write_trace(path: &Path, trace: &SimTrace) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(trace_header())?;
    for s in &trace.samples {
        let mut row = vec![
            num(s.t),
            num(s.torso.position.x),
            num(s.torso.position.y),
            num(s.torso.pitch),
        ];
        for l in &s.legs {
            row.push(opt(l.config.map(|c| c.phi)));
            row.push(opt(l.config.map(|c| c.ell)));
            row.extend(
                [l.torques.hip, l.torques.knee, l.force.x, l.force.y].map(num),
            );
        }
        row.push(num(s.margin.value));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_slice(path: &Path, rows: &[&EvaluationRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SLICE_HEADER)?;
    for r in rows {
        w.write_record([num(r.cx), num(r.ib), opt(r.tcot)])?;
    }
    w.flush()?;
    Ok(())
}
