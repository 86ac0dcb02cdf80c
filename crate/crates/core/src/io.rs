//! File formats: sequence, schedule and graph JSON, plus the CSV tables
//! written by the analysis and experiment commands.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{ControlTrace, EntryVerdict, SymmetryReport, AXES};
use crate::decay::{FitFlag, FitResult};
use crate::error::{Error, Result};
use crate::sequence::{ColoredSchedule, PulseShape, Segment, Sequence};
use crate::sim::SurvivalRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Pulse,
    Delay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub kind: SlotKind,
    pub duration_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
    /// Omitted for π pulses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_rad: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub name: String,
    pub tau_p_s: f64,
    pub shape: PulseShape,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub red: SequenceFile,
    pub blue: SequenceFile,
}

impl From<&Sequence> for SequenceFile {
    fn from(s: &Sequence) -> Self {
        let slots = s
            .segments
            .iter()
            .map(|seg| match seg {
                Segment::Pulse { phase, flip_angle } => Slot {
                    kind: SlotKind::Pulse,
                    duration_s: s.pulse_duration(),
                    phase_rad: Some(*phase),
                    flip_rad: (*flip_angle != PI).then_some(*flip_angle),
                },
                Segment::Delay { duration } => Slot {
                    kind: SlotKind::Delay,
                    duration_s: *duration,
                    phase_rad: None,
                    flip_rad: None,
                },
            })
            .collect();
        SequenceFile {
            name: s.name.clone(),
            tau_p_s: s.tau_p,
            shape: s.shape.clone(),
            slots,
        }
    }
}

impl SequenceFile {
    pub fn to_sequence(&self) -> Result<Sequence> {
        let seq = Sequence::new(self.name.clone(), self.tau_p_s, self.shape.clone(), Vec::new())?;
        let mut segments = Vec::with_capacity(self.slots.len());
        for (i, slot) in self.slots.iter().enumerate() {
            match slot.kind {
                SlotKind::Pulse => {
                    let expect = seq.pulse_duration();
                    if (slot.duration_s - expect).abs() > 1e-12 * expect.max(1e-300) {
                        return Err(Error::Data(format!(
                            "slot {i}: pulse lasts {} s but tau_p_s gives {expect} s",
                            slot.duration_s
                        )));
                    }
                    let phase = slot
                        .phase_rad
                        .ok_or_else(|| Error::Data(format!("slot {i}: pulse without phase_rad")))?;
                    segments.push(Segment::Pulse {
                        phase,
                        flip_angle: slot.flip_rad.unwrap_or(PI),
                    });
                }
                SlotKind::Delay => segments.push(Segment::Delay {
                    duration: slot.duration_s,
                }),
            }
        }
        Sequence::new(self.name.clone(), self.tau_p_s, self.shape.clone(), segments)
    }
}

impl From<&ColoredSchedule> for ScheduleFile {
    fn from(s: &ColoredSchedule) -> Self {
        ScheduleFile {
            red: (&s.red).into(),
            blue: (&s.blue).into(),
        }
    }
}

impl ScheduleFile {
    pub fn to_schedule(&self) -> Result<ColoredSchedule> {
        ColoredSchedule::new(self.red.to_sequence()?, self.blue.to_sequence()?)
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)?.read_to_string(&mut s)?;
    Ok(s)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_to_string(path)?)?)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_sequence(path: &Path) -> Result<Sequence> {
    read_json::<SequenceFile>(path)?.to_sequence()
}

pub fn read_schedule(path: &Path) -> Result<ColoredSchedule> {
    read_json::<ScheduleFile>(path)?.to_schedule()
}

/// Shortest round-trip representation; infinities as `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Data(format!("not a number: {s:?}")))
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_trace<W: Write>(w: W, trace: &ControlTrace) -> Result<()> {
    let mut out = csv_writer(w);
    let mut header = vec!["t_s".to_string()];
    for m in AXES {
        for a in AXES {
            header.push(format!("R_{m}{a}"));
        }
    }
    out.write_record(&header)?;
    for (t, r) in trace.grid.times.iter().zip(&trace.r) {
        let mut row = vec![fmt_f64(*t)];
        for m in 0..3 {
            for a in 0..3 {
                row.push(fmt_f64(r[(m, a)]));
            }
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_chi<W: Write>(w: W, entries: &[EntryVerdict]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["kind", "alpha", "beta", "value_s", "pass"])?;
    for e in entries {
        out.write_record([
            e.kind.to_string(),
            e.row.to_string(),
            e.col.to_string(),
            fmt_f64(e.value_s),
            e.pass.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_symmetry<W: Write>(w: W, reports: &[SymmetryReport]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["mu", "alpha", "relation", "residual", "flag"])?;
    for r in reports {
        for c in &r.checks {
            out.write_record([
                r.mu.to_string(),
                r.alpha.to_string(),
                c.relation.as_str().to_string(),
                fmt_f64(c.residual),
                c.flag.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One row of the results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub embedding_id: String,
    pub state_id: String,
    pub duration_s: f64,
    pub pulses: usize,
    pub shots: u64,
    pub zeros: u64,
    pub p0: f64,
}

pub const RESULT_HEADER: [&str; 8] = [
    "method",
    "embedding_id",
    "state_id",
    "duration_s",
    "pulses",
    "shots",
    "zeros",
    "p0",
];

impl ResultRow {
    pub fn record(&self) -> [String; 8] {
        [
            self.method.clone(),
            self.embedding_id.clone(),
            self.state_id.clone(),
            fmt_f64(self.duration_s),
            self.pulses.to_string(),
            self.shots.to_string(),
            self.zeros.to_string(),
            fmt_f64(self.p0),
        ]
    }
}

pub fn rows_from_records(records: &[SurvivalRecord]) -> Vec<ResultRow> {
    records
        .iter()
        .flat_map(|r| {
            r.points.iter().map(move |p| ResultRow {
                method: r.method.clone(),
                embedding_id: r.embedding_id.clone(),
                state_id: r.state_id.clone(),
                duration_s: p.duration_s,
                pulses: p.pulses,
                shots: p.shots,
                zeros: p.zeros,
                p0: p.p0,
            })
        })
        .collect()
}

/// Appends result rows to a CSV file, header first.
pub struct ResultsWriter<W: Write> {
    out: csv::Writer<W>,
}

impl ResultsWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        ResultsWriter::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> ResultsWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut out = csv_writer(w);
        out.write_record(RESULT_HEADER)?;
        Ok(ResultsWriter { out })
    }

    pub fn append(&mut self, rows: &[ResultRow]) -> Result<()> {
        for r in rows {
            self.out.write_record(r.record())?;
        }
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_results<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    ResultsWriter::new(w)?.append(rows)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Data(format!("missing column {name}")))
}

pub fn read_results<R: Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut rd = reader(r);
    let h = rd.headers()?.clone();
    let idx: Vec<usize> = RESULT_HEADER.iter().map(|c| column(&h, c)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| rec.get(idx[k]).unwrap_or("");
        let int = |k: usize| -> Result<u64> {
            f(k).parse::<u64>()
                .map_err(|_| Error::Data(format!("{}: not an integer: {:?}", RESULT_HEADER[k], f(k))))
        };
        let p0 = parse_f64(f(7))?;
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::Data(format!("p0 out of range: {p0}")));
        }
        rows.push(ResultRow {
            method: f(0).to_string(),
            embedding_id: f(1).to_string(),
            state_id: f(2).to_string(),
            duration_s: parse_f64(f(3))?,
            pulses: int(4)? as usize,
            shots: int(5)?,
            zeros: int(6)?,
            p0,
        });
    }
    Ok(rows)
}

/// One row of the fits table.
#[derive(Clone, Debug, PartialEq)]
pub struct FitRow {
    pub method: String,
    pub embedding_id: String,
    pub fit: FitResult,
}

pub const FIT_HEADER: [&str; 8] = [
    "method",
    "embedding_id",
    "A",
    "gamma_per_s",
    "c",
    "tau_gamma_s",
    "rss",
    "flag",
];

pub fn write_fits<W: Write>(w: W, rows: &[FitRow]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(FIT_HEADER)?;
    for r in rows {
        out.write_record([
            r.method.clone(),
            r.embedding_id.clone(),
            fmt_f64(r.fit.a),
            fmt_f64(r.fit.gamma),
            fmt_f64(r.fit.c),
            fmt_f64(r.fit.tau_gamma),
            fmt_f64(r.fit.rss),
            r.fit.flag.as_str().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Fits as stored on disk; standard errors and iteration counts are not kept.
pub fn read_fits<R: Read>(r: R) -> Result<Vec<FitRow>> {
    let mut rd = reader(r);
    let h = rd.headers()?.clone();
    let idx: Vec<usize> = FIT_HEADER.iter().map(|c| column(&h, c)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| rec.get(idx[k]).unwrap_or("");
        let flag = FitFlag::parse(f(7)).ok_or_else(|| Error::Data(format!("unknown fit flag {:?}", f(7))))?;
        rows.push(FitRow {
            method: f(0).to_string(),
            embedding_id: f(1).to_string(),
            fit: FitResult {
                a: parse_f64(f(2))?,
                gamma: parse_f64(f(3))?,
                c: parse_f64(f(4))?,
                tau_gamma: parse_f64(f(5))?,
                rss: parse_f64(f(6))?,
                std_err: [f64::NAN; 3],
                iterations: 0,
                flag,
            },
        });
    }
    Ok(rows)
}
