//! Raw touch-log ingestion: CSV parsing, stroke segmentation, click
//! filtering and per-device coordinate normalization.
//!
//! The log format is an 11-column CSV:
//!
//! ```text
//! phone_id,user_id,doc_id,time_ms,action,phone_orientation,x,y,pressure,area,finger_orientation
//! ```
//!
//! `action` is `0=down, 1=up, 2=move, 3=multitouch`; `phone_orientation` is
//! `0=portrait, 1=landscape`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical header of the raw touch log.
pub const LOG_COLUMNS: [&str; 11] = [
    "phone_id",
    "user_id",
    "doc_id",
    "time_ms",
    "action",
    "phone_orientation",
    "x",
    "y",
    "pressure",
    "area",
    "finger_orientation",
];

/// Default click threshold, as a fraction of the screen diagonal.
pub const DEFAULT_MIN_DISPLACEMENT_FRAC: f64 = 0.02;

/// Inter-sample gap above which a diagnostic is emitted (the stroke is kept).
pub const SAMPLE_GAP_WARN_MS: i64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Down,
    Up,
    Move,
    Multitouch,
}

impl Action {
    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            0 => Some(Action::Down),
            1 => Some(Action::Up),
            2 => Some(Action::Move),
            3 => Some(Action::Multitouch),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Action::Down => 0,
            Action::Up => 1,
            Action::Move => 2,
            Action::Multitouch => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhoneOrientation {
    Portrait,
    Landscape,
}

impl PhoneOrientation {
    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            0 => Some(PhoneOrientation::Portrait),
            1 => Some(PhoneOrientation::Landscape),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            PhoneOrientation::Portrait => 0,
            PhoneOrientation::Landscape => 1,
        }
    }
}

/// One raw sample from a device log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouchEvent {
    pub phone_id: String,
    pub user_id: String,
    pub doc_id: String,
    /// Milliseconds since epoch or log start.
    pub t: i64,
    pub action: Action,
    pub phone_orientation: PhoneOrientation,
    pub x: f64,
    pub y: f64,
    pub pressure: f64,
    pub area: f64,
    pub finger_orientation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenSpec {
    pub phone_id: String,
    pub width_px: f64,
    pub height_px: f64,
}

impl ScreenSpec {
    pub fn new(phone_id: impl Into<String>, width_px: f64, height_px: f64) -> Result<Self> {
        let phone_id = phone_id.into();
        if !(width_px > 0.0 && height_px > 0.0) {
            return Err(Error::InvalidScreen(format!(
                "{phone_id}: width and height must be positive"
            )));
        }
        Ok(Self {
            phone_id,
            width_px,
            height_px,
        })
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width_px).contains(&x) && (0.0..=self.height_px).contains(&y)
    }
}

/// Screen geometry per phone, keyed by `phone_id`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScreenSpecs(BTreeMap<String, ScreenSpec>);

impl ScreenSpecs {
    pub fn new(specs: impl IntoIterator<Item = ScreenSpec>) -> Self {
        Self(specs.into_iter().map(|s| (s.phone_id.clone(), s)).collect())
    }

    pub fn get(&self, phone_id: &str) -> Option<&ScreenSpec> {
        self.0.get(phone_id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a `phone_id,width_px,height_px` CSV with a header row.
    pub fn parse_csv(raw: &[u8]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(raw);
        let headers = reader.headers()?.clone();
        let expected = ["phone_id", "width_px", "height_px"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Header(format!(
                "screen spec header must be `{}`",
                expected.join(",")
            )));
        }
        let mut specs = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i].parse::<f64>().map_err(|_| {
                    Error::InvalidScreen(format!("non-numeric value `{}`", &record[i]))
                })
            };
            specs.push(ScreenSpec::new(&record[0], parse(1)?, parse(2)?)?);
        }
        Ok(Self::new(specs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    MalformedRow,
    OutOfBounds,
    DroppedEvent,
    DiscardedStroke,
    SampleGap,
}

/// A non-fatal problem found while parsing or segmenting a log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    /// 1-based line number in the source file, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
    pub kind: DiagnosticKind,
    pub detail: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {:?}: {}", self.kind, self.detail),
            None => write!(f, "{:?}: {}", self.kind, self.detail),
        }
    }
}

/// Writes diagnostics as JSON lines.
pub fn write_diagnostics<W: std::io::Write>(
    mut out: W,
    diagnostics: &[ParseDiagnostic],
) -> Result<()> {
    for d in diagnostics {
        serde_json::to_writer(&mut out, d)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn parse_row(record: &csv::StringRecord) -> std::result::Result<TouchEvent, String> {
    if record.len() != LOG_COLUMNS.len() {
        return Err(format!(
            "expected {} fields, found {}",
            LOG_COLUMNS.len(),
            record.len()
        ));
    }
    let num = |i: usize| -> std::result::Result<f64, String> {
        let v: f64 = record[i]
            .parse()
            .map_err(|_| format!("non-numeric {} `{}`", LOG_COLUMNS[i], &record[i]))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite {}", LOG_COLUMNS[i]))
        }
    };
    let int = |i: usize| -> std::result::Result<i64, String> {
        record[i]
            .parse()
            .map_err(|_| format!("non-integer {} `{}`", LOG_COLUMNS[i], &record[i]))
    };
    let t = int(3)?;
    if t < 0 {
        return Err(format!("negative time_ms {t}"));
    }
    let action =
        Action::from_code(int(4)?).ok_or_else(|| format!("unknown action `{}`", &record[4]))?;
    let phone_orientation = PhoneOrientation::from_code(int(5)?)
        .ok_or_else(|| format!("unknown phone_orientation `{}`", &record[5]))?;
    Ok(TouchEvent {
        phone_id: record[0].to_string(),
        user_id: record[1].to_string(),
        doc_id: record[2].to_string(),
        t,
        action,
        phone_orientation,
        x: num(6)?,
        y: num(7)?,
        pressure: num(8)?,
        area: num(9)?,
        finger_orientation: num(10)?,
    })
}

/// Parses a raw touch log.
///
/// Malformed rows are skipped with a diagnostic. When `screens` is given,
/// every phone must have a spec and events outside the screen are rejected.
/// The result is stably sorted by `(user_id, doc_id, t)`.
pub fn parse_log(
    raw: &[u8],
    screens: Option<&ScreenSpecs>,
) -> Result<(Vec<TouchEvent>, Vec<ParseDiagnostic>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw);
    let headers = reader
        .headers()
        .map_err(|e| Error::Header(e.to_string()))?
        .clone();
    if headers.len() != LOG_COLUMNS.len() || headers.iter().zip(LOG_COLUMNS).any(|(h, c)| h != c) {
        return Err(Error::Header(format!(
            "expected `{}`, found `{}`",
            LOG_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut events = Vec::new();
    let mut diagnostics = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                diagnostics.push(ParseDiagnostic {
                    line: Some(line),
                    kind: DiagnosticKind::MalformedRow,
                    detail: e.to_string(),
                });
                continue;
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(line);
        let event = match parse_row(&record) {
            Ok(ev) => ev,
            Err(detail) => {
                diagnostics.push(ParseDiagnostic {
                    line: Some(line),
                    kind: DiagnosticKind::MalformedRow,
                    detail,
                });
                continue;
            }
        };
        if let Some(screens) = screens {
            let spec = screens
                .get(&event.phone_id)
                .ok_or_else(|| Error::UnknownPhone(event.phone_id.clone()))?;
            if !spec.contains(event.x, event.y) {
                diagnostics.push(ParseDiagnostic {
                    line: Some(line),
                    kind: DiagnosticKind::OutOfBounds,
                    detail: format!(
                        "({}, {}) outside {}x{} screen of phone {}",
                        event.x, event.y, spec.width_px, spec.height_px, spec.phone_id
                    ),
                });
                continue;
            }
        }
        events.push(event);
    }

    events.sort_by(|a, b| {
        (a.user_id.as_str(), a.doc_id.as_str(), a.t).cmp(&(
            b.user_id.as_str(),
            b.doc_id.as_str(),
            b.t,
        ))
    });
    Ok((events, diagnostics))
}

/// A single-finger trajectory from touch-down to lift-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub samples: Vec<TouchEvent>,
    pub user_id: String,
    pub doc_id: String,
    pub phone_id: String,
    /// Up-timestamp of the previous stroke in the session.
    pub prev_stroke_end_t: Option<i64>,
}

impl Stroke {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &TouchEvent {
        &self.samples[0]
    }

    pub fn last(&self) -> &TouchEvent {
        &self.samples[self.samples.len() - 1]
    }

    /// End-to-end displacement in the stroke's coordinate units.
    pub fn displacement(&self) -> f64 {
        let (a, b) = (self.first(), self.last());
        (b.x - a.x).hypot(b.y - a.y)
    }
}

fn diag(kind: DiagnosticKind, detail: String) -> ParseDiagnostic {
    ParseDiagnostic {
        line: None,
        kind,
        detail,
    }
}

/// Splits one session's time-ordered events into strokes.
///
/// Each maximal down..up run becomes a stroke. Stray move/up events are
/// dropped, a second down discards the open stroke, and a multitouch event
/// aborts it.
pub fn segment_strokes(events: &[TouchEvent]) -> (Vec<Stroke>, Vec<ParseDiagnostic>) {
    let mut strokes = Vec::new();
    let mut diagnostics = Vec::new();
    let mut open: Option<Vec<TouchEvent>> = None;
    let mut prev_end: Option<i64> = None;

    for ev in events {
        match ev.action {
            Action::Down => {
                if let Some(run) = open.take() {
                    diagnostics.push(diag(
                        DiagnosticKind::DiscardedStroke,
                        format!(
                            "user {} doc {}: stroke at t={} has no up event",
                            ev.user_id, ev.doc_id, run[0].t
                        ),
                    ));
                }
                open = Some(vec![ev.clone()]);
            }
            Action::Move => match open.as_mut() {
                Some(run) => run.push(ev.clone()),
                None => diagnostics.push(diag(
                    DiagnosticKind::DroppedEvent,
                    format!(
                        "user {} doc {}: move at t={} outside a stroke",
                        ev.user_id, ev.doc_id, ev.t
                    ),
                )),
            },
            Action::Up => match open.take() {
                Some(mut run) => {
                    run.push(ev.clone());
                    for pair in run.windows(2) {
                        let gap = pair[1].t - pair[0].t;
                        if gap > SAMPLE_GAP_WARN_MS {
                            diagnostics.push(diag(
                                DiagnosticKind::SampleGap,
                                format!(
                                    "user {} doc {}: {gap} ms between samples at t={}",
                                    ev.user_id, ev.doc_id, pair[0].t
                                ),
                            ));
                        }
                    }
                    let first = &run[0];
                    strokes.push(Stroke {
                        user_id: first.user_id.clone(),
                        doc_id: first.doc_id.clone(),
                        phone_id: first.phone_id.clone(),
                        prev_stroke_end_t: prev_end,
                        samples: run,
                    });
                    prev_end = Some(ev.t);
                }
                None => diagnostics.push(diag(
                    DiagnosticKind::DroppedEvent,
                    format!(
                        "user {} doc {}: up at t={} outside a stroke",
                        ev.user_id, ev.doc_id, ev.t
                    ),
                )),
            },
            Action::Multitouch => {
                if let Some(run) = open.take() {
                    diagnostics.push(diag(
                        DiagnosticKind::DiscardedStroke,
                        format!(
                            "user {} doc {}: stroke at t={} aborted by multitouch",
                            ev.user_id, ev.doc_id, run[0].t
                        ),
                    ));
                } else {
                    diagnostics.push(diag(
                        DiagnosticKind::DroppedEvent,
                        format!(
                            "user {} doc {}: multitouch at t={}",
                            ev.user_id, ev.doc_id, ev.t
                        ),
                    ));
                }
            }
        }
    }
    if let Some(run) = open {
        diagnostics.push(diag(
            DiagnosticKind::DiscardedStroke,
            format!(
                "user {} doc {}: log ends inside stroke started at t={}",
                run[0].user_id, run[0].doc_id, run[0].t
            ),
        ));
    }
    (strokes, diagnostics)
}

/// Groups sorted events by `(user_id, doc_id)` and segments each session.
pub fn segment_sessions(events: &[TouchEvent]) -> (Vec<Stroke>, Vec<ParseDiagnostic>) {
    let mut strokes = Vec::new();
    let mut diagnostics = Vec::new();
    let mut start = 0;
    while start < events.len() {
        let key = (&events[start].user_id, &events[start].doc_id);
        let end = events[start..]
            .iter()
            .position(|e| (&e.user_id, &e.doc_id) != key)
            .map_or(events.len(), |p| start + p);
        let (s, d) = segment_strokes(&events[start..end]);
        strokes.extend(s);
        diagnostics.extend(d);
        start = end;
    }
    (strokes, diagnostics)
}

/// Keeps strokes whose end-to-end displacement is at least
/// `min_displacement_frac` of the (normalized) screen diagonal.
pub fn filter_clicks(strokes: Vec<Stroke>, min_displacement_frac: f64) -> Vec<Stroke> {
    let threshold = min_displacement_frac * std::f64::consts::SQRT_2;
    strokes
        .into_iter()
        .filter(|s| s.displacement() >= threshold)
        .collect()
}

/// Maps pixel coordinates into `[0, 1]²` using the phone's screen size.
pub fn normalize(stroke: &Stroke, screen: &ScreenSpec) -> Result<Stroke> {
    if screen.phone_id != stroke.phone_id {
        return Err(Error::PhoneMismatch {
            spec: screen.phone_id.clone(),
            stroke: stroke.phone_id.clone(),
        });
    }
    let mut out = stroke.clone();
    for s in &mut out.samples {
        s.x /= screen.width_px;
        s.y /= screen.height_px;
    }
    Ok(out)
}

/// Inverse of [`normalize`].
pub fn denormalize(stroke: &Stroke, screen: &ScreenSpec) -> Result<Stroke> {
    if screen.phone_id != stroke.phone_id {
        return Err(Error::PhoneMismatch {
            spec: screen.phone_id.clone(),
            stroke: stroke.phone_id.clone(),
        });
    }
    let mut out = stroke.clone();
    for s in &mut out.samples {
        s.x *= screen.width_px;
        s.y *= screen.height_px;
    }
    Ok(out)
}

/// Writes events in the canonical log format.
pub fn write_log<W: std::io::Write>(out: W, events: &[TouchEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LOG_COLUMNS)?;
    for e in events {
        w.write_record([
            e.phone_id.clone(),
            e.user_id.clone(),
            e.doc_id.clone(),
            e.t.to_string(),
            e.action.code().to_string(),
            e.phone_orientation.code().to_string(),
            e.x.to_string(),
            e.y.to_string(),
            e.pressure.to_string(),
            e.area.to_string(),
            e.finger_orientation.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
