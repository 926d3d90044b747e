//! File formats and JSON schemas.
//!
//! Sequence files come in a text form (header `k=<int> n=<int>` followed by
//! whitespace-separated symbols) and a binary form (magic `FQSEQ1`,
//! little-endian u32 k, u64 n, then u16 symbols). JSON schemas cover curve
//! specs, credal sets, set systems, analysis inputs and construction traces.
//! All readers treat their input as untrusted: they validate eagerly and
//! never trust length fields for allocation.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::{Event, Gamble};
use crate::credal::CredalSet;
use crate::error::FormatError;
use crate::sequence::{GenerationTrace, SegmentRecord, SymbolSequence};
use crate::setsys::SetSystem;
use crate::simplex::{CurveSpec, SimplexPoint, LEMNISCATE_DEFAULT_CENTER, LEMNISCATE_DEFAULT_SCALE};

/// Magic prefix of binary sequence files.
pub const BINARY_MAGIC: &[u8; 6] = b"FQSEQ1";

/// Hard cap on the declared sequence length a reader will accept.
pub const MAX_SEQUENCE_LENGTH: u64 = 1 << 33;

const SYMBOLS_PER_LINE: usize = 20;
const READ_CHUNK: usize = 1 << 16;

/// Writes the text format: `k=<k> n=<n>` then the symbols.
pub fn write_sequence_text<W: Write>(w: &mut W, seq: &SymbolSequence) -> Result<(), FormatError> {
    writeln!(w, "k={} n={}", seq.k(), seq.len())?;
    let mut on_line = 0;
    for sym in seq.iter() {
        if on_line == SYMBOLS_PER_LINE {
            writeln!(w)?;
            on_line = 0;
        }
        if on_line > 0 {
            write!(w, " ")?;
        }
        write!(w, "{sym}")?;
        on_line += 1;
    }
    if on_line > 0 {
        writeln!(w)?;
    }
    Ok(())
}

/// Reads the text format, validating the header and every symbol.
pub fn read_sequence_text<R: BufRead>(r: &mut R) -> Result<SymbolSequence, FormatError> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let header = header.trim();
    let mut k: Option<usize> = None;
    let mut n: Option<u64> = None;
    for part in header.split_whitespace() {
        if let Some(v) = part.strip_prefix("k=") {
            k = Some(v.parse().map_err(|_| FormatError::malformed("bad k field"))?);
        } else if let Some(v) = part.strip_prefix("n=") {
            n = Some(v.parse().map_err(|_| FormatError::malformed("bad n field"))?);
        } else {
            return Err(FormatError::malformed(format!(
                "unexpected header token {part:?}"
            )));
        }
    }
    let k = k.ok_or_else(|| FormatError::malformed("missing k= in header"))?;
    let n = n.ok_or_else(|| FormatError::malformed("missing n= in header"))?;
    if k == 0 || k > u16::MAX as usize {
        return Err(FormatError::malformed(format!("alphabet size {k} out of range")));
    }
    if n > MAX_SEQUENCE_LENGTH {
        return Err(FormatError::malformed(format!("declared length {n} too large")));
    }
    let mut seq = SymbolSequence::new(k);
    seq.reserve((n as usize).min(READ_CHUNK));
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            break;
        }
        for tok in line.split_whitespace() {
            let sym: u16 = tok
                .parse()
                .map_err(|_| FormatError::malformed(format!("bad symbol {tok:?}")))?;
            seq.try_push(sym).map_err(FormatError::from)?;
            if seq.len() as u64 > n {
                return Err(FormatError::malformed("more symbols than declared"));
            }
        }
    }
    if seq.len() as u64 != n {
        return Err(FormatError::malformed(format!(
            "declared {n} symbols, found {}",
            seq.len()
        )));
    }
    Ok(seq)
}

/// Writes the binary format: magic, u32 k, u64 n, u16 symbols (little endian).
pub fn write_sequence_binary<W: Write>(w: &mut W, seq: &SymbolSequence) -> Result<(), FormatError> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(seq.k() as u32).to_le_bytes())?;
    w.write_all(&(seq.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(2 * READ_CHUNK);
    for sym in seq.iter() {
        buf.extend_from_slice(&sym.to_le_bytes());
        if buf.len() >= 2 * READ_CHUNK {
            w.write_all(&buf)?;
            buf.clear();
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads the binary format, incrementally so a forged length cannot force a
/// huge allocation.
pub fn read_sequence_binary<R: Read>(r: &mut R) -> Result<SymbolSequence, FormatError> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(FormatError::malformed("bad magic"));
    }
    let mut k_bytes = [0u8; 4];
    r.read_exact(&mut k_bytes)?;
    let k = u32::from_le_bytes(k_bytes) as usize;
    let mut n_bytes = [0u8; 8];
    r.read_exact(&mut n_bytes)?;
    let n = u64::from_le_bytes(n_bytes);
    if k == 0 || k > u16::MAX as usize {
        return Err(FormatError::malformed(format!("alphabet size {k} out of range")));
    }
    if n > MAX_SEQUENCE_LENGTH {
        return Err(FormatError::malformed(format!("declared length {n} too large")));
    }
    let mut seq = SymbolSequence::new(k);
    seq.reserve((n as usize).min(READ_CHUNK));
    let mut buf = [0u8; 2 * READ_CHUNK];
    let mut pending: Option<u8> = None;
    loop {
        let read = r.read(&mut buf)?;
        if read == 0 {
            break;
        }
        let mut slice = &buf[..read];
        if let Some(lo) = pending.take() {
            let sym = u16::from_le_bytes([lo, slice[0]]);
            seq.try_push(sym).map_err(FormatError::from)?;
            slice = &slice[1..];
        }
        let mut chunks = slice.chunks_exact(2);
        for c in &mut chunks {
            let sym = u16::from_le_bytes([c[0], c[1]]);
            seq.try_push(sym).map_err(FormatError::from)?;
            if seq.len() as u64 > n {
                return Err(FormatError::malformed("more symbols than declared"));
            }
        }
        if let [lo] = chunks.remainder() {
            pending = Some(*lo);
        }
    }
    if pending.is_some() {
        return Err(FormatError::malformed("odd trailing byte"));
    }
    if seq.len() as u64 != n {
        return Err(FormatError::malformed(format!(
            "declared {n} symbols, found {}",
            seq.len()
        )));
    }
    Ok(seq)
}

/// Reads either sequence format by sniffing the magic prefix.
pub fn read_sequence_auto(bytes: &[u8]) -> Result<SymbolSequence, FormatError> {
    if bytes.starts_with(BINARY_MAGIC) {
        read_sequence_binary(&mut &bytes[..])
    } else {
        read_sequence_text(&mut &bytes[..])
    }
}

#[derive(Serialize, Deserialize)]
enum CurveSpecJson {
    #[serde(rename = "polygon")]
    Polygon(Vec<Vec<f64>>),
    #[serde(rename = "parametric")]
    Parametric {
        name: String,
        #[serde(default = "default_center")]
        center: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

fn default_center() -> f64 {
    LEMNISCATE_DEFAULT_CENTER
}

fn default_scale() -> f64 {
    LEMNISCATE_DEFAULT_SCALE
}

/// Parses a curve spec: `{"polygon": [[...], ...]}` or
/// `{"parametric": {"name": "lemniscate3", "center": ..., "scale": ...}}`.
pub fn curve_spec_from_json(json: &str) -> Result<CurveSpec, FormatError> {
    let raw: CurveSpecJson = serde_json::from_str(json)?;
    let spec = match raw {
        CurveSpecJson::Polygon(rows) => {
            let vertices = rows
                .into_iter()
                .map(SimplexPoint::new)
                .collect::<Result<Vec<_>, _>>()?;
            CurveSpec::Polygon(vertices)
        }
        CurveSpecJson::Parametric {
            name,
            center,
            scale,
        } => {
            if name != "lemniscate3" {
                return Err(FormatError::malformed(format!(
                    "unknown parametric curve {name:?}"
                )));
            }
            CurveSpec::Lemniscate { center, scale }
        }
    };
    spec.validate()?;
    Ok(spec)
}

pub fn curve_spec_to_json(spec: &CurveSpec) -> Result<String, FormatError> {
    let raw = match spec {
        CurveSpec::Polygon(vs) => {
            CurveSpecJson::Polygon(vs.iter().map(|p| p.coords().to_vec()).collect())
        }
        CurveSpec::Lemniscate { center, scale } => CurveSpecJson::Parametric {
            name: "lemniscate3".to_string(),
            center: *center,
            scale: *scale,
        },
    };
    Ok(serde_json::to_string(&raw)?)
}

#[derive(Serialize, Deserialize)]
struct CredalSetJson {
    k: usize,
    points: Vec<Vec<f64>>,
}

/// Parses `{"k": 3, "points": [[...], ...]}`.
pub fn credal_set_from_json(json: &str) -> Result<CredalSet, FormatError> {
    let raw: CredalSetJson = serde_json::from_str(json)?;
    let points = raw
        .points
        .into_iter()
        .map(|coords| {
            if coords.len() != raw.k {
                return Err(FormatError::malformed(format!(
                    "point has {} coordinates, expected {}",
                    coords.len(),
                    raw.k
                )));
            }
            SimplexPoint::new(coords).map_err(FormatError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    CredalSet::new(points).map_err(FormatError::from)
}

pub fn credal_set_to_json(set: &CredalSet) -> Result<String, FormatError> {
    let raw = CredalSetJson {
        k: set.k(),
        points: set.points().iter().map(|p| p.coords().to_vec()).collect(),
    };
    Ok(serde_json::to_string(&raw)?)
}

#[derive(Serialize, Deserialize)]
struct SetSystemJson {
    omega: usize,
    sets: Vec<Vec<usize>>,
}

/// Parses `{"omega": 4, "sets": [[1, 2], [3]]}` (1-based element lists).
pub fn set_system_from_json(json: &str) -> Result<SetSystem, FormatError> {
    let raw: SetSystemJson = serde_json::from_str(json)?;
    SetSystem::new(raw.omega, &raw.sets).map_err(FormatError::from)
}

pub fn set_system_to_json(system: &SetSystem) -> Result<String, FormatError> {
    let raw = SetSystemJson {
        omega: system.omega_size(),
        sets: system.element_lists(),
    };
    Ok(serde_json::to_string(&raw)?)
}

/// Named gambles and events for an analysis run:
/// `{"gambles": {"X1": [..k values..]}, "events": {"A": [1, 3]}}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AnalysisInputs {
    #[serde(default)]
    pub gambles: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub events: BTreeMap<String, Vec<u16>>,
}

impl AnalysisInputs {
    pub fn from_json(json: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(json)?)
    }

    /// Validates against an alphabet size, producing domain objects.
    pub fn resolve(
        &self,
        k: usize,
    ) -> Result<(BTreeMap<String, Gamble>, BTreeMap<String, Event>), FormatError> {
        let mut gambles = BTreeMap::new();
        for (name, values) in &self.gambles {
            if values.len() != k {
                return Err(FormatError::malformed(format!(
                    "gamble {name:?} has {} values, expected {k}",
                    values.len()
                )));
            }
            let g = Gamble::new(values.clone())
                .map_err(|e| FormatError::malformed(format!("gamble {name:?}: {e}")))?;
            gambles.insert(name.clone(), g);
        }
        let mut events = BTreeMap::new();
        for (name, members) in &self.events {
            let e = Event::new(k, members)
                .map_err(|e| FormatError::malformed(format!("event {name:?}: {e}")))?;
            events.insert(name.clone(), e);
        }
        Ok((gambles, events))
    }
}

/// Writes one JSON object per segment record.
pub fn write_trace_jsonl<W: Write>(w: &mut W, trace: &GenerationTrace) -> Result<(), FormatError> {
    for segment in &trace.segments {
        serde_json::to_writer(&mut *w, segment)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Reads segment records back from JSON lines.
pub fn read_trace_jsonl<R: BufRead>(r: &mut R) -> Result<Vec<SegmentRecord>, FormatError> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
