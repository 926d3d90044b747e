//! Construction of symbol sequences with prescribed relative-frequency
//! cluster behavior.
//!
//! The central routine appends blocks to a sequence so that its relative
//! frequencies trace a polygonal approximation of a target curve, one
//! generation (full cycle) after another. Per segment it computes the
//! boundary intercept of the hop direction, quantizes it with denominator
//! T(n), and appends an integer number of copies of the quantized block.
//! Endpoint and within-piece error bounds are asserted while building, never
//! post hoc.

use serde::{Deserialize, Serialize};

use crate::error::{SequenceError, SimplexError};
use crate::simplex::{
    boundary_intercept, point_to_segment_distance_sq, polygonal_approximation, quantize_direction,
    CurveSpec, SimplexPoint,
};

/// Stride of the prefix-count checkpoints kept alongside the symbols.
const CHECKPOINT_STRIDE: usize = 64;

/// Cap on the appended mass of a single segment, as a multiple of the current
/// length. Binds only when the target sits on the simplex boundary (the ideal
/// repetition count diverges); such segments are flagged `clipped`.
const MAX_APPEND_FACTOR: f64 = 99.0;

/// Absolute slack for floating-point noise in bound assertions.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
enum SymbolStore {
    Wide(Vec<u16>),
    Compact(Vec<u8>),
}

impl SymbolStore {
    fn push(&mut self, sym: u16) {
        match self {
            SymbolStore::Wide(v) => v.push(sym),
            SymbolStore::Compact(v) => v.push(sym as u8),
        }
    }

    fn get(&self, i: usize) -> u16 {
        match self {
            SymbolStore::Wide(v) => v[i],
            SymbolStore::Compact(v) => v[i] as u16,
        }
    }

    fn len(&self) -> usize {
        match self {
            SymbolStore::Wide(v) => v.len(),
            SymbolStore::Compact(v) => v.len(),
        }
    }
}

/// A finite prefix of a symbol sequence over the alphabet {1, ..., k}, with
/// checkpointed prefix counts for exact O(1)-ish relative frequencies at any
/// index.
#[derive(Debug, Clone)]
pub struct SymbolSequence {
    k: usize,
    store: SymbolStore,
    /// Running totals over the whole prefix.
    totals: Vec<u64>,
    /// Snapshots of `totals` after every `CHECKPOINT_STRIDE` symbols,
    /// concatenated k at a time.
    checkpoints: Vec<u64>,
}

impl SymbolSequence {
    /// An empty sequence over alphabet {1, ..., k} with 16-bit storage.
    pub fn new(k: usize) -> Self {
        assert!(k >= 1 && k <= u16::MAX as usize, "alphabet size out of range");
        SymbolSequence {
            k,
            store: SymbolStore::Wide(Vec::new()),
            totals: vec![0; k],
            checkpoints: Vec::new(),
        }
    }

    /// An empty sequence with 8-bit compact storage (alphabet up to 255).
    pub fn new_compact(k: usize) -> Result<Self, SequenceError> {
        if k == 0 || k > u8::MAX as usize {
            return Err(SequenceError::AlphabetTooLarge { k });
        }
        Ok(SymbolSequence {
            k,
            store: SymbolStore::Compact(Vec::new()),
            totals: vec![0; k],
            checkpoints: Vec::new(),
        })
    }

    /// Builds a sequence from explicit symbols, validating the range.
    pub fn from_symbols(k: usize, symbols: &[u16]) -> Result<Self, SequenceError> {
        let mut seq = SymbolSequence::new(k);
        seq.reserve(symbols.len());
        for &s in symbols {
            seq.try_push(s)?;
        }
        Ok(seq)
    }

    pub fn reserve(&mut self, additional: usize) {
        match &mut self.store {
            SymbolStore::Wide(v) => v.reserve(additional),
            SymbolStore::Compact(v) => v.reserve(additional),
        }
    }

    /// Appends a symbol in {1, ..., k}.
    pub fn push(&mut self, sym: u16) {
        self.try_push(sym).expect("symbol out of range");
    }

    pub fn try_push(&mut self, sym: u16) -> Result<(), SequenceError> {
        if sym == 0 || sym as usize > self.k {
            return Err(SequenceError::SymbolOutOfRange {
                symbol: sym,
                k: self.k,
            });
        }
        self.store.push(sym);
        self.totals[(sym - 1) as usize] += 1;
        if self.store.len() % CHECKPOINT_STRIDE == 0 {
            self.checkpoints.extend_from_slice(&self.totals);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.len() == 0
    }

    /// The symbol at position `i` (0-based), in {1, ..., k}.
    pub fn symbol(&self, i: usize) -> u16 {
        self.store.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        (0..self.len()).map(move |i| self.store.get(i))
    }

    /// Per-symbol totals over the whole prefix.
    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    /// Exact per-symbol counts of the length-`n` prefix.
    pub fn counts_at(&self, n: usize) -> Result<Vec<u64>, SequenceError> {
        let mut counts = vec![0u64; self.k];
        self.counts_into(n, &mut counts)?;
        Ok(counts)
    }

    /// Writes the exact counts of the length-`n` prefix into `out`.
    pub fn counts_into(&self, n: usize, out: &mut [u64]) -> Result<(), SequenceError> {
        if n > self.len() {
            return Err(SequenceError::OutOfRange { n, len: self.len() });
        }
        assert_eq!(out.len(), self.k);
        if n == self.len() {
            out.copy_from_slice(&self.totals);
            return Ok(());
        }
        let cp = n / CHECKPOINT_STRIDE;
        let mut start = 0usize;
        if cp > 0 {
            let base = (cp - 1) * self.k;
            out.copy_from_slice(&self.checkpoints[base..base + self.k]);
            start = cp * CHECKPOINT_STRIDE;
        } else {
            out.fill(0);
        }
        for i in start..n {
            out[(self.store.get(i) - 1) as usize] += 1;
        }
        Ok(())
    }

    /// The relative frequency r^x(n) as exact integer-count ratios.
    pub fn relative_frequency(&self, n: usize) -> Result<SimplexPoint, SequenceError> {
        if n == 0 || n > self.len() {
            return Err(SequenceError::OutOfRange { n, len: self.len() });
        }
        let counts = self.counts_at(n)?;
        let nf = n as f64;
        Ok(
            SimplexPoint::new(counts.iter().map(|&c| c as f64 / nf).collect())
                .expect("count ratios form a simplex point"),
        )
    }
}

/// Polygon vertex counts per generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VertexSchedule {
    Constant(u32),
    /// V(g) = per_generation * g.
    Linear { per_generation: u32 },
}

/// Quantization denominators per current length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuantizationSchedule {
    Constant(u64),
    /// T(n) = ceil(sqrt(n)).
    SqrtOfLength,
}

/// Schedules driving a curve construction. Both components are nondecreasing
/// by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedules {
    pub vertices: VertexSchedule,
    pub quantization: QuantizationSchedule,
}

impl Default for Schedules {
    fn default() -> Self {
        Schedules {
            vertices: VertexSchedule::Linear { per_generation: 30 },
            quantization: QuantizationSchedule::SqrtOfLength,
        }
    }
}

impl Schedules {
    pub fn vertices_at(&self, g: u32) -> u32 {
        match self.vertices {
            VertexSchedule::Constant(v) => v,
            VertexSchedule::Linear { per_generation } => per_generation.saturating_mul(g),
        }
    }

    pub fn quantization_at(&self, n: u64) -> u64 {
        match self.quantization {
            QuantizationSchedule::Constant(t) => t,
            QuantizationSchedule::SqrtOfLength => (n as f64).sqrt().ceil() as u64,
        }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        let bad = |reason: &str| Err(SequenceError::InvalidSchedule { reason: reason.into() });
        match self.vertices {
            VertexSchedule::Constant(v) if v < 2 => return bad("constant V must be >= 2"),
            VertexSchedule::Linear { per_generation } if per_generation < 2 => {
                return bad("linear V base must be >= 2")
            }
            _ => {}
        }
        if let QuantizationSchedule::Constant(0) = self.quantization {
            return bad("constant T must be >= 1");
        }
        Ok(())
    }
}

/// Stopping rule for a curve construction. At least one limit must be set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub generations: Option<u32>,
    pub max_length: Option<u64>,
}

impl Budget {
    pub fn generations(g: u32) -> Self {
        Budget {
            generations: Some(g),
            max_length: None,
        }
    }

    pub fn max_length(n: u64) -> Self {
        Budget {
            generations: None,
            max_length: Some(n),
        }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        match (self.generations, self.max_length) {
            (None, None) => Err(SequenceError::InvalidBudget {
                reason: "set generations and/or max_length".to_string(),
            }),
            (Some(0), _) => Err(SequenceError::InvalidBudget {
                reason: "generations must be >= 1".to_string(),
            }),
            (_, Some(n)) if n < 2 => Err(SequenceError::InvalidBudget {
                reason: "max_length must be >= 2".to_string(),
            }),
            _ => Ok(()),
        }
    }
}

/// Per-segment construction record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub generation: u32,
    /// Vertex index within the generation, 1-based.
    pub vertex: u32,
    /// Sequence length at the start of the segment.
    pub n_start: u64,
    /// Quantization denominator used (already clamped to >= k).
    pub t: u64,
    /// Stretch factor of the boundary intercept; `None` when the target was
    /// already on the boundary.
    pub gamma: Option<f64>,
    pub p_star: Vec<f64>,
    pub iota: Vec<u64>,
    pub t_tilde: u64,
    pub ell_tilde: u64,
    /// The target vertex of this segment.
    pub p_new: Vec<f64>,
    /// The achieved relative frequency at the segment end.
    pub p_hat_new: Vec<f64>,
    /// Euclidean distance between achieved and target endpoints.
    pub endpoint_error: f64,
    /// 4T/n + k/T at the segment start.
    pub endpoint_bound: f64,
    /// Largest deviation of any in-segment prefix from the chord
    /// l(p_old, p_hat_new).
    pub max_within_piece_deviation: f64,
    /// (2T + k)/n at the segment start.
    pub within_piece_bound: f64,
    /// Set when the target coincided with the current frequency point and the
    /// segment was skipped.
    pub skipped: bool,
    /// Set when the repetition count was cut by the budget or the
    /// boundary-target cap; the endpoint bound is not applicable then.
    pub clipped: bool,
}

/// Full construction trace: one record per segment plus generation offsets.
#[derive(Debug, Clone, Default)]
pub struct GenerationTrace {
    pub segments: Vec<SegmentRecord>,
    /// Sequence length at the start of each generation.
    pub generation_starts: Vec<u64>,
    /// Set when `max_length` stopped the run before the requested generations
    /// completed.
    pub budget_exceeded: bool,
}

impl GenerationTrace {
    /// Final length implied by the last segment, or 1 for an empty trace.
    pub fn final_length(&self) -> u64 {
        self.segments
            .iter()
            .rev()
            .find(|s| !s.skipped)
            .map(|s| s.n_start + s.ell_tilde * s.t_tilde)
            .unwrap_or(1)
    }
}

/// Hook into a running construction. `step` fires after every appended
/// symbol with the exact relative frequency of the new prefix.
pub trait ConstructionObserver {
    fn generation_start(&mut self, _generation: u32, _polygon: &[SimplexPoint], _n: u64) {}
    fn step(&mut self, _generation: u32, _n: u64, _r: &[f64]) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl ConstructionObserver for NoObserver {}

/// Builds a sequence whose relative frequencies cycle a closed curve,
/// recording the full trace. See [`construct_for_curve_streaming`] for the
/// storage-free variant.
pub fn construct_for_curve(
    curve: &CurveSpec,
    schedules: &Schedules,
    budget: &Budget,
) -> Result<(SymbolSequence, GenerationTrace), SequenceError> {
    let mut seq = SymbolSequence::new(curve.k().max(1));
    let trace = run_curve_construction(curve, schedules, budget, Some(&mut seq), &mut NoObserver)?;
    Ok((seq, trace))
}

/// Runs the curve construction without storing symbols; bounds are still
/// asserted and the observer sees every step. Returns the trace and the
/// final length.
pub fn construct_for_curve_streaming<O: ConstructionObserver>(
    curve: &CurveSpec,
    schedules: &Schedules,
    budget: &Budget,
    observer: &mut O,
) -> Result<(GenerationTrace, u64), SequenceError> {
    let trace = run_curve_construction(curve, schedules, budget, None, observer)?;
    let n = trace.final_length();
    Ok((trace, n))
}

fn run_curve_construction<O: ConstructionObserver>(
    curve: &CurveSpec,
    schedules: &Schedules,
    budget: &Budget,
    mut store: Option<&mut SymbolSequence>,
    observer: &mut O,
) -> Result<GenerationTrace, SequenceError> {
    curve.validate()?;
    schedules.validate()?;
    budget.validate()?;
    let k = curve.k();
    let kf = k as f64;

    // x = <1>, p_old = e_1.
    let mut counts: Vec<u64> = vec![0; k];
    counts[0] = 1;
    if let Some(seq) = store.as_deref_mut() {
        assert_eq!(seq.k(), k);
        assert!(seq.is_empty(), "construction requires an empty sequence");
        seq.push(1);
    }
    let mut n: u64 = 1;
    let mut r: Vec<f64> = vec![0.0; k];
    r[0] = 1.0;

    let mut trace = GenerationTrace::default();

    let mut g: u32 = 1;
    'generations: loop {
        if let Some(gmax) = budget.generations {
            if g > gmax {
                break;
            }
        }
        if let Some(nmax) = budget.max_length {
            if n >= nmax {
                if budget.generations.map_or(false, |gmax| g <= gmax) {
                    trace.budget_exceeded = true;
                }
                break;
            }
        }
        let v_count = schedules.vertices_at(g);
        let polygon = polygonal_approximation(curve, v_count)?;
        observer.generation_start(g, &polygon, n);
        trace.generation_starts.push(n);

        for v in 1..=v_count {
            let target = &polygon[v as usize];
            let n_seg_start = n;
            let t = schedules.quantization_at(n).max(k as u64);
            let tf = t as f64;
            let n0 = n as f64;
            let p_old: Vec<f64> = r.clone();
            let p_old_pt = SimplexPoint::new(p_old.clone())
                .expect("relative frequency is a simplex point");

            let intercept = match boundary_intercept(&p_old_pt, target) {
                Ok(i) => i,
                Err(SimplexError::DegeneratePair) => {
                    trace.segments.push(SegmentRecord {
                        generation: g,
                        vertex: v,
                        n_start: n_seg_start,
                        t,
                        gamma: None,
                        p_star: Vec::new(),
                        iota: Vec::new(),
                        t_tilde: 0,
                        ell_tilde: 0,
                        p_new: target.coords().to_vec(),
                        p_hat_new: p_old.clone(),
                        endpoint_error: 0.0,
                        endpoint_bound: 4.0 * tf / n0 + kf / tf,
                        max_within_piece_deviation: 0.0,
                        within_piece_bound: (2.0 * tf + kf) / n0,
                        skipped: true,
                        clipped: false,
                    });
                    continue;
                }
                Err(e) => return Err(e.into()),
            };

            let gamma = intercept.gamma();
            let quant = quantize_direction(intercept.p_star(), t)?;
            let t_tilde = quant.t_tilde;

            // Ideal repetition count ceil(n / (T (gamma - 1))); diverges for
            // boundary targets, where the cap takes over.
            let cap = ((MAX_APPEND_FACTOR * n0) / t_tilde as f64).ceil().max(1.0) as u64;
            let (mut ell, mut clipped) = match gamma {
                Some(gm) if gm > 1.0 => {
                    let ideal = (n0 / (tf * (gm - 1.0))).ceil().max(1.0);
                    if ideal >= cap as f64 {
                        (cap, true)
                    } else {
                        (ideal as u64, false)
                    }
                }
                _ => (cap, true),
            };
            if let Some(nmax) = budget.max_length {
                let room = (nmax - n) / t_tilde;
                if ell > room {
                    ell = room;
                    clipped = true;
                    trace.budget_exceeded = true;
                }
            }
            if ell == 0 {
                trace.budget_exceeded = true;
                break 'generations;
            }

            // The endpoint is determined by integer arithmetic before any
            // symbol is appended.
            let end_n = n + ell * t_tilde;
            let end_nf = end_n as f64;
            let p_hat_new: Vec<f64> = counts
                .iter()
                .zip(&quant.iota)
                .map(|(&c, &i)| (c + ell * i) as f64 / end_nf)
                .collect();

            let endpoint_bound = 4.0 * tf / n0 + kf / tf;
            let within_piece_bound = (2.0 * tf + kf) / n0;

            // Per-step chord-distance setup: squared length of the chord.
            let mut max_dev_sq = 0.0f64;
            for _copy in 0..ell {
                for (idx, &reps) in quant.iota.iter().enumerate() {
                    let sym = (idx + 1) as u16;
                    for _ in 0..reps {
                        counts[idx] += 1;
                        n += 1;
                        let inv = 1.0 / n as f64;
                        for (ri, &ci) in r.iter_mut().zip(counts.iter()) {
                            *ri = ci as f64 * inv;
                        }
                        if let Some(seq) = store.as_deref_mut() {
                            seq.push(sym);
                        }
                        let d2 = point_to_segment_distance_sq(&r, &p_old, &p_hat_new);
                        if d2 > max_dev_sq {
                            max_dev_sq = d2;
                        }
                        observer.step(g, n, &r);
                    }
                }
            }
            debug_assert_eq!(n, end_n);

            let max_dev = max_dev_sq.sqrt();
            let endpoint_error = crate::simplex::euclidean_distance(&r, target.coords());

            if max_dev > within_piece_bound + BOUND_SLACK {
                return Err(SequenceError::BoundViolation {
                    generation: g,
                    vertex: v,
                    detail: format!(
                        "within-piece deviation {max_dev} exceeds (2T+k)/n = {within_piece_bound}"
                    ),
                });
            }
            if !clipped && endpoint_error > endpoint_bound + BOUND_SLACK {
                return Err(SequenceError::BoundViolation {
                    generation: g,
                    vertex: v,
                    detail: format!(
                        "endpoint error {endpoint_error} exceeds 4T/n + k/T = {endpoint_bound}"
                    ),
                });
            }

            trace.segments.push(SegmentRecord {
                generation: g,
                vertex: v,
                n_start: n_seg_start,
                t,
                gamma,
                p_star: intercept.p_star().coords().to_vec(),
                iota: quant.iota.clone(),
                t_tilde,
                ell_tilde: ell,
                p_new: target.coords().to_vec(),
                p_hat_new,
                endpoint_error,
                endpoint_bound,
                max_within_piece_deviation: max_dev,
                within_piece_bound,
                skipped: false,
                clipped,
            });

            if let Some(nmax) = budget.max_length {
                if n >= nmax {
                    let mid_generation = v < v_count;
                    let generations_pending =
                        budget.generations.map_or(false, |gmax| g < gmax);
                    if mid_generation || generations_pending {
                        trace.budget_exceeded = true;
                    }
                    break 'generations;
                }
            }
        }
        g += 1;
    }
    Ok(trace)
}

/// Builds a sequence cycling the boundary outline of the polytope spanned by
/// `vertices` (in the given order), so that the convex hull of the tail
/// frequencies approximates the polytope.
pub fn construct_polytope_boundary(
    vertices: &[SimplexPoint],
    schedules: &Schedules,
    budget: &Budget,
) -> Result<(SymbolSequence, GenerationTrace), SequenceError> {
    if vertices.is_empty() {
        return Err(SimplexError::InvalidCurve {
            reason: "need at least one vertex".to_string(),
        }
        .into());
    }
    construct_for_curve(&CurveSpec::Polygon(vertices.to_vec()), schedules, budget)
}

/// phi(s) = ceil(exp(s^alpha)) as used by the extreme construction.
pub fn extreme_phi(s: u32, alpha: f64) -> Result<u64, SequenceError> {
    let v = ((s as f64).powf(alpha)).exp();
    if !v.is_finite() || v >= 9.0e18 {
        return Err(SequenceError::Overflow { segment: s });
    }
    Ok(v.ceil() as u64)
}

/// Segment endpoints of the extreme construction, computed in closed form
/// without materializing the sequence: for each segment s (0-based) the pair
/// (phi(s+1), counts at that length).
pub fn extreme_segment_endpoints(
    k: usize,
    alpha: f64,
    num_segments: u32,
) -> Result<Vec<(u64, Vec<u64>)>, SequenceError> {
    validate_extreme_args(k, alpha, num_segments)?;
    let mut counts = vec![0u64; k];
    counts[0] = extreme_phi(0, alpha)?;
    let mut out = Vec::with_capacity(num_segments as usize);
    for s in 0..num_segments {
        let lo = extreme_phi(s, alpha)?;
        let hi = extreme_phi(s + 1, alpha)?;
        let sym = s as usize % k;
        counts[sym] += hi - lo;
        out.push((hi, counts.clone()));
    }
    Ok(out)
}

fn validate_extreme_args(k: usize, alpha: f64, num_segments: u32) -> Result<(), SequenceError> {
    if k < 2 {
        return Err(SequenceError::InvalidBudget {
            reason: "extreme construction needs k >= 2".to_string(),
        });
    }
    if !(alpha > 1.0) {
        return Err(SequenceError::InvalidBudget {
            reason: "extreme construction needs alpha > 1".to_string(),
        });
    }
    if (num_segments as usize) < k {
        return Err(SequenceError::InvalidBudget {
            reason: format!("need at least k = {k} segments"),
        });
    }
    Ok(())
}

/// Builds the extreme-case sequence: segment s (0-based) appends
/// phi(s+1) - phi(s) copies of symbol (s mod k) + 1, after an initial block
/// of phi(0) ones. After segment s the frequency point is within
/// 2 phi(s)/phi(s+1) of the targeted simplex vertex. `max_length`, when set,
/// truncates the materialized prefix.
pub fn construct_extreme(
    k: usize,
    alpha: f64,
    num_segments: u32,
    max_length: Option<u64>,
) -> Result<SymbolSequence, SequenceError> {
    validate_extreme_args(k, alpha, num_segments)?;
    let total = extreme_phi(num_segments, alpha)?;
    let cap = max_length.unwrap_or(u64::MAX).min(total);
    if cap > (1u64 << 31) {
        return Err(SequenceError::Overflow {
            segment: num_segments,
        });
    }
    let mut seq = SymbolSequence::new(k);
    seq.reserve(cap as usize);
    let phi0 = extreme_phi(0, alpha)?;
    for _ in 0..phi0.min(cap) {
        seq.push(1);
    }
    'outer: for s in 0..num_segments {
        let lo = extreme_phi(s, alpha)?;
        let hi = extreme_phi(s + 1, alpha)?;
        let sym = (s as usize % k + 1) as u16;
        for _ in lo..hi {
            if seq.len() as u64 >= cap {
                break 'outer;
            }
            seq.push(sym);
        }
    }
    Ok(seq)
}

/// The doubling block sequence 1 22 1111 22222222 ... over {1, 2} (block i,
/// 0-based, has length 2^i and alternating symbol), truncated to `length`.
/// The frequency of symbol 2 hits exactly 2/3 at the end of every 2-block
/// and drifts down towards 1/3 over each 1-block, so its cluster set is the
/// whole interval [1/3, 2/3].
pub fn von_mises_doubling(length: usize) -> SymbolSequence {
    let mut seq = SymbolSequence::new(2);
    seq.reserve(length);
    let mut block: u64 = 1;
    let mut sym = 1u16;
    'outer: loop {
        for _ in 0..block {
            if seq.len() >= length {
                break 'outer;
            }
            seq.push(sym);
        }
        block = block.saturating_mul(2);
        sym = 3 - sym;
    }
    seq
}

/// The label sequence 1 22 3333 44444444 ... (label i repeated 2^(i-1)
/// times), truncated to `length`. Every singleton has vanishing frequency,
/// while the union of the even labels reproduces the doubling pattern and so
/// has no frequency limit. The alphabet size is the largest label emitted.
pub fn pre_dynkin_counterexample(length: usize) -> SymbolSequence {
    let mut symbols: Vec<u16> = Vec::with_capacity(length);
    let mut label: u16 = 1;
    'outer: loop {
        let block = 1u64 << (label - 1);
        for _ in 0..block {
            if symbols.len() >= length {
                break 'outer;
            }
            symbols.push(label);
        }
        label += 1;
    }
    let k = symbols.iter().copied().max().unwrap_or(1) as usize;
    SymbolSequence::from_symbols(k, &symbols).expect("labels are in range by construction")
}
