//! Estimators over finite sequence prefixes.
//!
//! Upper and lower previsions are estimated as extrema of running averages
//! over a tail window; these are finite surrogates for limsup/liminf and are
//! always reported together with the window that produced them. All running
//! averages are computed from exact integer prefix counts, so linearity
//! identities hold to machine precision regardless of the prefix length.

use crate::error::AnalysisError;
use crate::sequence::SymbolSequence;
use crate::simplex::SimplexPoint;

/// A bounded real function on the alphabet {1, ..., k}, as a value table.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamble {
    values: Vec<f64>,
}

impl Gamble {
    pub fn new(values: Vec<f64>) -> Result<Self, AnalysisError> {
        if values.is_empty() {
            return Err(AnalysisError::InvalidArgument {
                reason: "empty gamble table".to_string(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::InvalidArgument {
                reason: "gamble values must be finite".to_string(),
            });
        }
        Ok(Gamble { values })
    }

    pub fn constant(k: usize, c: f64) -> Self {
        Gamble {
            values: vec![c; k],
        }
    }

    /// The indicator gamble of an event.
    pub fn indicator(event: &Event) -> Self {
        Gamble {
            values: (1..=event.k() as u16)
                .map(|s| if event.contains(s) { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a symbol in {1, ..., k}.
    pub fn at(&self, sym: u16) -> f64 {
        self.values[(sym - 1) as usize]
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Gamble {
            values: self.values.iter().map(|v| lambda * v).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn plus(&self, other: &Gamble) -> Self {
        assert_eq!(self.k(), other.k());
        Gamble {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn plus_const(&self, c: f64) -> Self {
        Gamble {
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn pointwise_max(&self, other: &Gamble) -> Self {
        assert_eq!(self.k(), other.k());
        Gamble {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.max(*b))
                .collect(),
        }
    }

    /// The product with an event indicator: X chi_B.
    pub fn restricted_to(&self, event: &Event) -> Self {
        assert_eq!(self.k(), event.k());
        Gamble {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| if event.contains((i + 1) as u16) { v } else { 0.0 })
                .collect(),
        }
    }
}

/// An event over the alphabet {1, ..., k}, stored as a k-bit mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    k: usize,
    words: Vec<u64>,
}

impl Event {
    pub fn new(k: usize, members: &[u16]) -> Result<Self, AnalysisError> {
        let mut e = Event::empty(k);
        for &m in members {
            if m == 0 || m as usize > k {
                return Err(AnalysisError::InvalidArgument {
                    reason: format!("event member {m} out of range 1..={k}"),
                });
            }
            let bit = (m - 1) as usize;
            e.words[bit / 64] |= 1u64 << (bit % 64);
        }
        Ok(e)
    }

    pub fn empty(k: usize) -> Self {
        Event {
            k,
            words: vec![0; k.div_ceil(64)],
        }
    }

    pub fn full(k: usize) -> Self {
        let mut e = Event::empty(k);
        for bit in 0..k {
            e.words[bit / 64] |= 1u64 << (bit % 64);
        }
        e
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contains(&self, sym: u16) -> bool {
        if sym == 0 || sym as usize > self.k {
            return false;
        }
        let bit = (sym - 1) as usize;
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn complement(&self) -> Self {
        let mut e = Event::full(self.k);
        for (w, s) in e.words.iter_mut().zip(&self.words) {
            *w &= !s;
        }
        e
    }

    pub fn union(&self, other: &Event) -> Self {
        assert_eq!(self.k, other.k);
        Event {
            k: self.k,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &Event) -> Self {
        assert_eq!(self.k, other.k);
        Event {
            k: self.k,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn members(&self) -> Vec<u16> {
        (1..=self.k as u16).filter(|&s| self.contains(s)).collect()
    }

    /// Mass of the event under a simplex point (0-based coordinates).
    pub fn mass_under(&self, p: &SimplexPoint) -> f64 {
        self.members().iter().map(|&s| p.get((s - 1) as usize)).sum()
    }
}

/// Where a tail estimation window starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Start at floor(beta * N), clamped to [1, N].
    Fraction(f64),
    /// Start at a fixed index (1-based).
    FixedStart(usize),
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy::Fraction(0.5)
    }
}

impl TailPolicy {
    /// The 1-based start index of the window over a length-`len` series.
    pub fn start(&self, len: usize) -> Result<usize, AnalysisError> {
        if len == 0 {
            return Err(AnalysisError::EmptyWindow {
                reason: "empty series".to_string(),
            });
        }
        match *self {
            TailPolicy::Fraction(beta) => {
                if !(0.0..=1.0).contains(&beta) {
                    return Err(AnalysisError::InvalidArgument {
                        reason: format!("tail fraction {beta} outside [0, 1]"),
                    });
                }
                Ok(((beta * len as f64).floor() as usize).clamp(1, len))
            }
            TailPolicy::FixedStart(n0) => {
                if n0 == 0 || n0 > len {
                    return Err(AnalysisError::EmptyWindow {
                        reason: format!("fixed start {n0} outside [1, {len}]"),
                    });
                }
                Ok(n0)
            }
        }
    }
}

/// A [liminf, limsup] estimate together with the window that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEstimate {
    pub start: usize,
    pub end: usize,
    pub lo: f64,
    pub hi: f64,
}

impl WindowEstimate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn check_gamble(seq: &SymbolSequence, x: &Gamble) -> Result<(), AnalysisError> {
    if x.k() != seq.k() {
        return Err(AnalysisError::DimensionMismatch {
            left: x.k(),
            right: seq.k(),
        });
    }
    Ok(())
}

fn check_event(seq: &SymbolSequence, a: &Event) -> Result<(), AnalysisError> {
    if a.k() != seq.k() {
        return Err(AnalysisError::DimensionMismatch {
            left: a.k(),
            right: seq.k(),
        });
    }
    Ok(())
}

/// Streams (n, average) pairs for n = 1..=len; the average at n is the exact
/// count-weighted value sum over n.
fn stream_averages(
    seq: &SymbolSequence,
    x: &Gamble,
    mut f: impl FnMut(usize, f64),
) {
    let k = seq.k();
    let mut counts = vec![0u64; k];
    for (i, sym) in seq.iter().enumerate() {
        counts[(sym - 1) as usize] += 1;
        let n = i + 1;
        let mut dot = 0.0;
        for (j, &c) in counts.iter().enumerate() {
            if c > 0 {
                dot += x.values()[j] * c as f64;
            }
        }
        f(n, dot / n as f64);
    }
}

/// The running-average series of a gamble: (1/n) sum of X over the prefix,
/// identical (to machine precision) to the inner product of X with r^x(n).
pub fn running_average(seq: &SymbolSequence, x: &Gamble) -> Result<Vec<f64>, AnalysisError> {
    check_gamble(seq, x)?;
    let mut out = Vec::with_capacity(seq.len());
    stream_averages(seq, x, |_, v| out.push(v));
    Ok(out)
}

/// Maximum of a series over the tail window.
pub fn limsup_estimate(series: &[f64], policy: &TailPolicy) -> Result<f64, AnalysisError> {
    window_extrema(series, policy).map(|w| w.hi)
}

/// Minimum of a series over the tail window.
pub fn liminf_estimate(series: &[f64], policy: &TailPolicy) -> Result<f64, AnalysisError> {
    window_extrema(series, policy).map(|w| w.lo)
}

/// Both extrema of a series over the tail window.
pub fn window_extrema(series: &[f64], policy: &TailPolicy) -> Result<WindowEstimate, AnalysisError> {
    let start = policy.start(series.len())?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &series[start - 1..] {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(WindowEstimate {
        start,
        end: series.len(),
        lo,
        hi,
    })
}

/// Window extrema of the running average of `x`, computed streaming.
pub fn prevision_window(
    seq: &SymbolSequence,
    x: &Gamble,
    policy: &TailPolicy,
) -> Result<WindowEstimate, AnalysisError> {
    check_gamble(seq, x)?;
    let start = policy.start(seq.len())?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    stream_averages(seq, x, |n, v| {
        if n >= start {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    });
    Ok(WindowEstimate {
        start,
        end: seq.len(),
        lo,
        hi,
    })
}

/// Tail-window maximum of the running average: the finite surrogate of the
/// upper prevision.
pub fn upper_prevision_estimate(
    seq: &SymbolSequence,
    x: &Gamble,
    policy: &TailPolicy,
) -> Result<f64, AnalysisError> {
    prevision_window(seq, x, policy).map(|w| w.hi)
}

/// Tail-window minimum of the running average (conjugate lower prevision).
pub fn lower_prevision_estimate(
    seq: &SymbolSequence,
    x: &Gamble,
    policy: &TailPolicy,
) -> Result<f64, AnalysisError> {
    prevision_window(seq, x, policy).map(|w| w.lo)
}

/// Window extrema of an event's relative frequency.
pub fn event_frequency_window(
    seq: &SymbolSequence,
    a: &Event,
    policy: &TailPolicy,
) -> Result<WindowEstimate, AnalysisError> {
    check_event(seq, a)?;
    let start = policy.start(seq.len())?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut count = 0u64;
    for (i, sym) in seq.iter().enumerate() {
        if a.contains(sym) {
            count += 1;
        }
        let n = i + 1;
        if n >= start {
            let v = count as f64 / n as f64;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(WindowEstimate {
        start,
        end: seq.len(),
        lo,
        hi,
    })
}

pub fn upper_probability_estimate(
    seq: &SymbolSequence,
    a: &Event,
    policy: &TailPolicy,
) -> Result<f64, AnalysisError> {
    event_frequency_window(seq, a, policy).map(|w| w.hi)
}

pub fn lower_probability_estimate(
    seq: &SymbolSequence,
    a: &Event,
    policy: &TailPolicy,
) -> Result<f64, AnalysisError> {
    event_frequency_window(seq, a, policy).map(|w| w.lo)
}

/// The conditional frequency object for an event B that occurs at least once:
/// count ratios after the first occurrence, a fixed prior before it.
#[derive(Debug, Clone)]
pub struct ConditionalFrequency {
    event: Event,
    first_occurrence: usize,
    prior: SimplexPoint,
}

impl ConditionalFrequency {
    /// Scans for the first occurrence of `b`; errors if it never occurs.
    /// `prior` defaults to the uniform distribution.
    pub fn new(
        seq: &SymbolSequence,
        b: Event,
        prior: Option<SimplexPoint>,
    ) -> Result<Self, AnalysisError> {
        check_event(seq, &b)?;
        let first = seq
            .iter()
            .position(|s| b.contains(s))
            .ok_or(AnalysisError::NeverOccurred)?;
        let prior = prior.unwrap_or_else(|| SimplexPoint::uniform(seq.k()));
        if prior.k() != seq.k() {
            return Err(AnalysisError::DimensionMismatch {
                left: prior.k(),
                right: seq.k(),
            });
        }
        Ok(ConditionalFrequency {
            event: b,
            first_occurrence: first + 1,
            prior,
        })
    }

    /// The smallest 1-based index n with x(n) in B.
    pub fn first_occurrence(&self) -> usize {
        self.first_occurrence
    }

    pub fn event(&self) -> &Event {
        &self.event
    }

    pub fn prior(&self) -> &SimplexPoint {
        &self.prior
    }

    /// The conditional distribution P(.|B)(n): the prior before B first
    /// occurs, exact count ratios afterwards.
    pub fn distribution(&self, seq: &SymbolSequence, n: usize) -> Result<SimplexPoint, AnalysisError> {
        if n == 0 || n > seq.len() {
            return Err(AnalysisError::OutOfRange { n, len: seq.len() });
        }
        if n < self.first_occurrence {
            return Ok(self.prior.clone());
        }
        let counts = seq.counts_at(n).map_err(AnalysisError::from)?;
        let total: u64 = self
            .event
            .members()
            .iter()
            .map(|&s| counts[(s - 1) as usize])
            .sum();
        debug_assert!(total > 0);
        let coords: Vec<f64> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if self.event.contains((i + 1) as u16) {
                    c as f64 / total as f64
                } else {
                    0.0
                }
            })
            .collect();
        Ok(SimplexPoint::new(coords).expect("conditional count ratios are a simplex point"))
    }

    /// P(A|B)(n) as an exact integer ratio (prior mass before n_B).
    pub fn probability(
        &self,
        seq: &SymbolSequence,
        a: &Event,
        n: usize,
    ) -> Result<f64, AnalysisError> {
        check_event(seq, a)?;
        if n == 0 || n > seq.len() {
            return Err(AnalysisError::OutOfRange { n, len: seq.len() });
        }
        if n < self.first_occurrence {
            return Ok(a.mass_under(&self.prior));
        }
        let counts = seq.counts_at(n).map_err(AnalysisError::from)?;
        let b_total: u64 = self
            .event
            .members()
            .iter()
            .map(|&s| counts[(s - 1) as usize])
            .sum();
        let ab = a.intersection(&self.event);
        let ab_total: u64 = ab.members().iter().map(|&s| counts[(s - 1) as usize]).sum();
        Ok(ab_total as f64 / b_total as f64)
    }

    /// The full series n -> P(A|B)(n).
    pub fn probability_series(
        &self,
        seq: &SymbolSequence,
        a: &Event,
    ) -> Result<Vec<f64>, AnalysisError> {
        check_event(seq, a)?;
        let prior_mass = a.mass_under(&self.prior);
        let ab = a.intersection(&self.event);
        let mut out = Vec::with_capacity(seq.len());
        let mut b_count = 0u64;
        let mut ab_count = 0u64;
        for sym in seq.iter() {
            if self.event.contains(sym) {
                b_count += 1;
            }
            if ab.contains(sym) {
                ab_count += 1;
            }
            if b_count == 0 {
                out.push(prior_mass);
            } else {
                out.push(ab_count as f64 / b_count as f64);
            }
        }
        Ok(out)
    }
}

/// Convenience wrapper returning the conditional frequency object for B and
/// the series n -> P(A|B)(n).
pub fn conditional_frequency(
    seq: &SymbolSequence,
    a: &Event,
    b: &Event,
) -> Result<(ConditionalFrequency, Vec<f64>), AnalysisError> {
    let cf = ConditionalFrequency::new(seq, b.clone(), None)?;
    let series = cf.probability_series(seq, a)?;
    Ok((cf, series))
}

/// Window extrema of the B-conditioned running average of X, taken over
/// n >= max(window start, first occurrence of B).
pub fn conditional_prevision_window(
    seq: &SymbolSequence,
    x: &Gamble,
    b: &Event,
    policy: &TailPolicy,
) -> Result<WindowEstimate, AnalysisError> {
    check_gamble(seq, x)?;
    check_event(seq, b)?;
    let n_b = seq
        .iter()
        .position(|s| b.contains(s))
        .ok_or(AnalysisError::NeverOccurred)?
        + 1;
    let start = policy.start(seq.len())?.max(n_b);
    let k = seq.k();
    let mut counts = vec![0u64; k];
    let mut b_count = 0u64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, sym) in seq.iter().enumerate() {
        let idx = (sym - 1) as usize;
        counts[idx] += 1;
        if b.contains(sym) {
            b_count += 1;
        }
        let n = i + 1;
        if n >= start {
            let mut dot = 0.0;
            for (j, &c) in counts.iter().enumerate() {
                if c > 0 && b.contains((j + 1) as u16) {
                    dot += x.values()[j] * c as f64;
                }
            }
            let v = dot / b_count as f64;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(WindowEstimate {
        start,
        end: seq.len(),
        lo,
        hi,
    })
}

/// Tail-window maximum of the B-conditioned running average of X.
pub fn conditional_upper_prevision_estimate(
    seq: &SymbolSequence,
    x: &Gamble,
    b: &Event,
    policy: &TailPolicy,
) -> Result<f64, AnalysisError> {
    conditional_prevision_window(seq, x, b, policy).map(|w| w.hi)
}

pub fn conditional_lower_prevision_estimate(
    seq: &SymbolSequence,
    x: &Gamble,
    b: &Event,
    policy: &TailPolicy,
) -> Result<f64, AnalysisError> {
    conditional_prevision_window(seq, x, b, policy).map(|w| w.lo)
}

/// Result of an irrelevance check of B for A.
#[derive(Debug, Clone, Copy)]
pub struct IrrelevanceReport {
    /// Upper-probability estimate of A given B.
    pub conditional: f64,
    /// Unconditional upper-probability estimate of A.
    pub marginal: f64,
    pub gap: f64,
    pub irrelevant: bool,
}

/// Compares the conditional and unconditional upper-probability estimates of
/// A; B is irrelevant to A when they agree within `tol`.
pub fn irrelevance_check(
    seq: &SymbolSequence,
    a: &Event,
    b: &Event,
    policy: &TailPolicy,
    tol: f64,
) -> Result<IrrelevanceReport, AnalysisError> {
    let conditional =
        conditional_upper_prevision_estimate(seq, &Gamble::indicator(a), b, policy)?;
    let marginal = upper_probability_estimate(seq, a, policy)?;
    let gap = (conditional - marginal).abs();
    Ok(IrrelevanceReport {
        conditional,
        marginal,
        gap,
        irrelevant: gap <= tol,
    })
}

/// Mutual irrelevance of A and B (both must occur at least once).
#[derive(Debug, Clone, Copy)]
pub struct IndependenceReport {
    pub a_given_b: IrrelevanceReport,
    pub b_given_a: IrrelevanceReport,
    pub independent: bool,
}

pub fn independence_check(
    seq: &SymbolSequence,
    a: &Event,
    b: &Event,
    policy: &TailPolicy,
    tol: f64,
) -> Result<IndependenceReport, AnalysisError> {
    let a_given_b = irrelevance_check(seq, a, b, policy, tol)?;
    let b_given_a = irrelevance_check(seq, b, a, policy, tol)?;
    Ok(IndependenceReport {
        a_given_b,
        b_given_a,
        independent: a_given_b.irrelevant && b_given_a.irrelevant,
    })
}

/// One threshold pair of a gamble irrelevance report.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdPairGap {
    pub x_threshold: f64,
    pub y_threshold: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct GambleIrrelevanceReport {
    pub max_gap: f64,
    pub worst: Option<ThresholdPairGap>,
    pub pairs: Vec<ThresholdPairGap>,
    pub irrelevant: bool,
}

/// Checks irrelevance of Y for X over all threshold events {X <= a},
/// {Y <= b} with a, b ranging over the attained values; pairs whose
/// conditioning event never occurs are skipped.
pub fn gamble_irrelevance_check(
    seq: &SymbolSequence,
    x: &Gamble,
    y: &Gamble,
    policy: &TailPolicy,
    tol: f64,
) -> Result<GambleIrrelevanceReport, AnalysisError> {
    check_gamble(seq, x)?;
    check_gamble(seq, y)?;
    let threshold_events = |g: &Gamble| -> Vec<(f64, Event)> {
        let mut vals: Vec<f64> = g.values().to_vec();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals.into_iter()
            .map(|a| {
                let members: Vec<u16> = (1..=g.k() as u16)
                    .filter(|&s| g.at(s) <= a)
                    .collect();
                (a, Event::new(g.k(), &members).expect("threshold members in range"))
            })
            .collect()
    };
    let x_events = threshold_events(x);
    let y_events = threshold_events(y);
    let mut pairs = Vec::new();
    let mut max_gap = 0.0f64;
    let mut worst = None;
    for (b_thr, b_event) in &y_events {
        let occurs = seq.iter().any(|s| b_event.contains(s));
        if !occurs {
            continue;
        }
        for (a_thr, a_event) in &x_events {
            let rep = irrelevance_check(seq, a_event, b_event, policy, tol)?;
            let entry = ThresholdPairGap {
                x_threshold: *a_thr,
                y_threshold: *b_thr,
                gap: rep.gap,
            };
            if rep.gap > max_gap {
                max_gap = rep.gap;
                worst = Some(entry);
            }
            pairs.push(entry);
        }
    }
    Ok(GambleIrrelevanceReport {
        max_gap,
        worst,
        pairs,
        irrelevant: max_gap <= tol,
    })
}

/// A place-selection rule acting on 1-based positions.
#[derive(Debug, Clone)]
pub enum SelectionRule {
    /// Explicit 0/1 mask aligned with the sequence prefix.
    Mask(Vec<bool>),
    /// Selects positions i with (i - 1) mod period == offset.
    Periodic { period: usize, offset: usize },
    /// Selects every position immediately following an occurrence of the
    /// given symbol.
    AfterSymbol(u16),
}

impl SelectionRule {
    fn selects(&self, seq: &SymbolSequence, i: usize) -> bool {
        match self {
            SelectionRule::Mask(m) => m.get(i).copied().unwrap_or(false),
            SelectionRule::Periodic { period, offset } => {
                *period > 0 && i % period == *offset % period
            }
            SelectionRule::AfterSymbol(s) => i > 0 && seq.symbol(i - 1) == *s,
        }
    }
}

/// Per-event comparison of full-sequence and subsequence frequency windows.
#[derive(Debug, Clone)]
pub struct AdmissibilityEntry {
    pub event: Event,
    pub full: WindowEstimate,
    pub selected: WindowEstimate,
    /// Largest endpoint difference between the two windows.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SelectionReport {
    pub selected: SymbolSequence,
    pub entries: Vec<AdmissibilityEntry>,
    /// All gaps within tolerance: the finite surrogate of an admissible
    /// selection rule.
    pub admissible: bool,
}

/// Extracts the subsequence picked by `rule` and compares frequency windows
/// per event against the full sequence.
pub fn selection_subsequence(
    seq: &SymbolSequence,
    rule: &SelectionRule,
    events: &[Event],
    policy: &TailPolicy,
    tol: f64,
) -> Result<SelectionReport, AnalysisError> {
    let mut selected = SymbolSequence::new(seq.k());
    for i in 0..seq.len() {
        if rule.selects(seq, i) {
            selected.push(seq.symbol(i));
        }
    }
    if selected.is_empty() {
        return Err(AnalysisError::EmptySelection);
    }
    let mut entries = Vec::with_capacity(events.len());
    let mut admissible = true;
    for event in events {
        let full = event_frequency_window(seq, event, policy)?;
        let sub = event_frequency_window(&selected, event, policy)?;
        let gap = (full.lo - sub.lo).abs().max((full.hi - sub.hi).abs());
        admissible &= gap <= tol;
        entries.push(AdmissibilityEntry {
            event: event.clone(),
            full,
            selected: sub,
            gap,
        });
    }
    Ok(SelectionReport {
        selected,
        entries,
        admissible,
    })
}

/// Greedy eps-net over the tail frequency points, scanned by increasing n:
/// the first point not covered by an existing center becomes a center.
pub fn cluster_point_estimate(
    seq: &SymbolSequence,
    policy: &TailPolicy,
    eps: f64,
) -> Result<Vec<SimplexPoint>, AnalysisError> {
    if eps <= 0.0 {
        return Err(AnalysisError::InvalidArgument {
            reason: "eps must be positive".to_string(),
        });
    }
    let start = policy.start(seq.len())?;
    let k = seq.k();
    let mut counts = vec![0u64; k];
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut point = vec![0.0f64; k];
    let eps2 = eps * eps;
    for (i, sym) in seq.iter().enumerate() {
        counts[(sym - 1) as usize] += 1;
        let n = i + 1;
        if n < start {
            continue;
        }
        let inv = 1.0 / n as f64;
        for (p, &c) in point.iter_mut().zip(&counts) {
            *p = c as f64 * inv;
        }
        let covered = centers.iter().any(|c| {
            let mut d2 = 0.0;
            for (a, b) in c.iter().zip(&point) {
                d2 += (a - b) * (a - b);
            }
            d2 <= eps2
        });
        if !covered {
            centers.push(point.clone());
        }
    }
    Ok(centers
        .into_iter()
        .map(|c| SimplexPoint::new(c).expect("frequency points are simplex points"))
        .collect())
}

/// Precision classification of one event.
#[derive(Debug, Clone)]
pub struct PrecisionEntry {
    pub event: Event,
    pub window: WindowEstimate,
    pub width: f64,
    pub precise: bool,
}

/// Classifies each event of the family by its frequency window width; events
/// with width <= tol form the finite surrogate of the system of precision.
pub fn precision_system(
    seq: &SymbolSequence,
    family: &[Event],
    policy: &TailPolicy,
    tol: f64,
) -> Result<Vec<PrecisionEntry>, AnalysisError> {
    if tol <= 0.0 {
        return Err(AnalysisError::InvalidArgument {
            reason: "tolerance must be positive".to_string(),
        });
    }
    family
        .iter()
        .map(|event| {
            let window = event_frequency_window(seq, event, policy)?;
            let width = window.width();
            Ok(PrecisionEntry {
                event: event.clone(),
                window,
                width,
                precise: width <= tol,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{von_mises_doubling, SymbolSequence};

    fn seq(k: usize, symbols: &[u16]) -> SymbolSequence {
        SymbolSequence::from_symbols(k, symbols).unwrap()
    }

    #[test]
    fn running_average_examples() {
        let s = seq(2, &[1, 2]);
        let x = Gamble::new(vec![2.0, -2.0]).unwrap();
        let avg = running_average(&s, &x).unwrap();
        assert_eq!(avg, vec![2.0, 0.0]);

        let c = Gamble::constant(2, 3.5);
        let avg = running_average(&s, &c).unwrap();
        assert!(avg.iter().all(|&v| (v - 3.5).abs() < 1e-15));

        let a = Event::new(2, &[1]).unwrap();
        let ind = running_average(&s, &Gamble::indicator(&a)).unwrap();
        assert_eq!(ind, vec![1.0, 0.5]);
    }

    #[test]
    fn window_estimates() {
        let series = vec![1.0, 2.0, 3.0, 4.0];
        let policy = TailPolicy::Fraction(0.5);
        assert_eq!(limsup_estimate(&series, &policy).unwrap(), 4.0);
        assert_eq!(liminf_estimate(&series, &policy).unwrap(), 2.0);
        let constant = vec![7.0; 10];
        assert_eq!(limsup_estimate(&constant, &policy).unwrap(), 7.0);
        assert!(matches!(
            limsup_estimate(&[], &policy),
            Err(AnalysisError::EmptyWindow { .. })
        ));
        assert!(matches!(
            window_extrema(&series, &TailPolicy::FixedStart(9)),
            Err(AnalysisError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn doubling_window_brackets_third_and_two_thirds() {
        let s = von_mises_doubling(1 << 20);
        let two = Event::new(2, &[2]).unwrap();
        let w = event_frequency_window(&s, &two, &TailPolicy::Fraction(0.5)).unwrap();
        assert!((w.lo - 1.0 / 3.0).abs() < 0.01, "lo = {}", w.lo);
        assert!((w.hi - 2.0 / 3.0).abs() < 0.01, "hi = {}", w.hi);
    }

    #[test]
    fn decreasing_series_estimate_near_limit() {
        // 1/n-converging series: the window estimate is within 2/start of 0.
        let series: Vec<f64> = (1..=1000).map(|n| 1.0 / n as f64).collect();
        let policy = TailPolicy::FixedStart(500);
        let hi = limsup_estimate(&series, &policy).unwrap();
        assert!(hi <= 2.0 / 500.0);
    }

    #[test]
    fn periodic_previsions() {
        let symbols: Vec<u16> = (0..10_000).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
        let s = seq(2, &symbols);
        let x = Gamble::new(vec![1.0, 0.0]).unwrap();
        let policy = TailPolicy::default();
        let hi = upper_prevision_estimate(&s, &x, &policy).unwrap();
        let lo = lower_prevision_estimate(&s, &x, &policy).unwrap();
        let start = policy.start(s.len()).unwrap();
        assert!((hi - 0.5).abs() <= 1.0 / start as f64);
        assert!((lo - 0.5).abs() <= 1.0 / start as f64);

        let omega = Gamble::indicator(&Event::full(2));
        assert_eq!(
            upper_prevision_estimate(&s, &omega, &policy).unwrap(),
            1.0
        );
    }

    #[test]
    fn conjugacy_is_exact() {
        let s = von_mises_doubling(4096);
        let x = Gamble::new(vec![0.3, -1.7]).unwrap();
        let policy = TailPolicy::default();
        let lower = lower_prevision_estimate(&s, &x, &policy).unwrap();
        let upper_neg = upper_prevision_estimate(&s, &x.negated(), &policy).unwrap();
        assert_eq!(lower, -upper_neg);
    }

    #[test]
    fn conditional_probability_example() {
        let s = seq(3, &[1, 2, 3, 2]);
        let b = Event::new(3, &[2, 3]).unwrap();
        let a = Event::new(3, &[2]).unwrap();
        let (cf, series) = conditional_frequency(&s, &a, &b).unwrap();
        assert_eq!(cf.first_occurrence(), 2);
        assert!((series[3] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn conditional_single_simultaneous_occurrence() {
        // A and B occur exactly once, simultaneously: conditional upper and
        // lower are both 1.
        let s = seq(3, &[1, 1, 2, 1, 1, 1]);
        let a = Event::new(3, &[2]).unwrap();
        let b = Event::new(3, &[2]).unwrap();
        let w = conditional_prevision_window(
            &s,
            &Gamble::indicator(&a),
            &b,
            &TailPolicy::FixedStart(1),
        )
        .unwrap();
        assert_eq!(w.lo, 1.0);
        assert_eq!(w.hi, 1.0);
    }

    #[test]
    fn conditional_prior_before_first_occurrence() {
        let s = seq(3, &[1, 1, 2]);
        let b = Event::new(3, &[2]).unwrap();
        let cf = ConditionalFrequency::new(&s, b, None).unwrap();
        let a = Event::new(3, &[1]).unwrap();
        // n < n_B: the uniform prior gives 1/3.
        assert!((cf.probability(&s, &a, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let d = cf.distribution(&s, 1).unwrap();
        assert_eq!(d, SimplexPoint::uniform(3));
        // After n_B the ratio is exact.
        assert_eq!(cf.probability(&s, &a, 3).unwrap(), 0.0);
    }

    #[test]
    fn conditional_never_occurred() {
        let s = seq(3, &[1, 1, 1]);
        let b = Event::new(3, &[2]).unwrap();
        assert!(matches!(
            ConditionalFrequency::new(&s, b, None),
            Err(AnalysisError::NeverOccurred)
        ));
    }

    #[test]
    fn conditional_constant_gamble() {
        let s = seq(2, &[1, 2, 1, 2, 2]);
        let b = Event::new(2, &[2]).unwrap();
        let c = Gamble::constant(2, 4.25);
        let w = conditional_prevision_window(&s, &c, &b, &TailPolicy::FixedStart(1)).unwrap();
        assert!((w.lo - 4.25).abs() < 1e-12 && (w.hi - 4.25).abs() < 1e-12);
    }

    #[test]
    fn conditioning_on_omega_is_unconditional() {
        let s = von_mises_doubling(2048);
        let x = Gamble::new(vec![0.2, 0.9]).unwrap();
        let policy = TailPolicy::default();
        let cond =
            conditional_upper_prevision_estimate(&s, &x, &Event::full(2), &policy).unwrap();
        let uncond = upper_prevision_estimate(&s, &x, &policy).unwrap();
        assert!((cond - uncond).abs() < 1e-12);
    }

    #[test]
    fn irrelevance_of_omega() {
        let s = von_mises_doubling(2048);
        let a = Event::full(2);
        let b = Event::new(2, &[2]).unwrap();
        let rep = irrelevance_check(&s, &a, &b, &TailPolicy::default(), 0.02).unwrap();
        assert_eq!(rep.gap, 0.0);
        assert!(rep.irrelevant);
    }

    #[test]
    fn dependent_events_show_large_gap() {
        // A = {3} occurs only together with B = {3}: conditional is 1.
        let symbols: Vec<u16> = (0..4096).map(|i| if i % 4 == 0 { 3 } else { 1 }).collect();
        let s = seq(3, &symbols);
        let a = Event::new(3, &[3]).unwrap();
        let rep = irrelevance_check(&s, &a, &a, &TailPolicy::default(), 0.02).unwrap();
        assert!((rep.conditional - 1.0).abs() < 1e-12);
        assert!(rep.gap > 0.7, "gap = {}", rep.gap);
        assert!(!rep.irrelevant);
    }

    #[test]
    fn product_sequence_events_are_independent() {
        // Pair symbols (a, b) with phase-independent marginals of period 2
        // and 3: the joint pattern has period 6 and factorizes.
        let mut symbols = Vec::new();
        for i in 0..60_000usize {
            let a = i % 2; // marginal 1/2
            let b = i % 3; // marginal 1/3 each
            symbols.push((a * 3 + b + 1) as u16); // alphabet {1..6}
        }
        let s = seq(6, &symbols);
        let ev_a = Event::new(6, &[1, 2, 3]).unwrap(); // a == 0
        let ev_b = Event::new(6, &[1, 4]).unwrap(); // b == 0
        let rep = independence_check(&s, &ev_a, &ev_b, &TailPolicy::default(), 0.02).unwrap();
        assert!(rep.independent, "gaps {:?}", rep);

        // Gambles reading only their own coordinate stay mutually irrelevant
        // across all threshold events.
        let x = Gamble::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap(); // a
        let y = Gamble::new(vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0]).unwrap(); // b
        let rep = gamble_irrelevance_check(&s, &x, &y, &TailPolicy::default(), 0.02).unwrap();
        assert!(rep.irrelevant, "max gap {} at {:?}", rep.max_gap, rep.worst);
        let rep = gamble_irrelevance_check(&s, &y, &x, &TailPolicy::default(), 0.02).unwrap();
        assert!(rep.irrelevant, "max gap {} at {:?}", rep.max_gap, rep.worst);
    }

    #[test]
    fn gamble_irrelevance_cases() {
        let s = von_mises_doubling(4096);
        let constant = Gamble::constant(2, 1.0);
        let y = Gamble::new(vec![0.0, 1.0]).unwrap();
        let rep =
            gamble_irrelevance_check(&s, &constant, &y, &TailPolicy::default(), 0.02).unwrap();
        assert_eq!(rep.max_gap, 0.0);
        assert!(rep.irrelevant);

        // X = Y = identity: conditioning on {Y <= min} forces {X <= min}.
        let ident = Gamble::new(vec![1.0, 2.0]).unwrap();
        let rep =
            gamble_irrelevance_check(&s, &ident, &ident, &TailPolicy::default(), 0.02).unwrap();
        assert!(rep.max_gap > 0.3, "max gap {}", rep.max_gap);
    }

    #[test]
    fn selection_rule_examples() {
        let symbols: Vec<u16> = (0..4096).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
        let s = seq(2, &symbols);
        let events = vec![Event::new(2, &[1]).unwrap()];
        let policy = TailPolicy::default();

        let all = SelectionRule::Mask(vec![true; s.len()]);
        let rep = selection_subsequence(&s, &all, &events, &policy, 0.01).unwrap();
        assert!(rep.admissible);
        assert_eq!(rep.entries[0].gap, 0.0);

        // Selecting the even positions of the alternating sequence yields
        // all ones: frequency 1 against 1/2.
        let periodic = SelectionRule::Periodic {
            period: 2,
            offset: 0,
        };
        let rep = selection_subsequence(&s, &periodic, &events, &policy, 0.01).unwrap();
        assert!(!rep.admissible);
        assert!((rep.entries[0].gap - 0.5).abs() < 1e-3, "gap {}", rep.entries[0].gap);

        let empty = SelectionRule::Mask(vec![false; s.len()]);
        assert!(matches!(
            selection_subsequence(&s, &empty, &events, &policy, 0.01),
            Err(AnalysisError::EmptySelection)
        ));
    }

    #[test]
    fn after_symbol_rule_on_balanced_sequence() {
        // de Bruijn-style balanced pattern over {1,2}: 1,1,2,2 repeated makes
        // successors of 1 split evenly between 1 and 2.
        let symbols: Vec<u16> = (0..40_000)
            .map(|i| match i % 4 {
                0 | 1 => 1,
                _ => 2,
            })
            .collect();
        let s = seq(2, &symbols);
        let events = vec![Event::new(2, &[1]).unwrap(), Event::new(2, &[2]).unwrap()];
        let rep = selection_subsequence(
            &s,
            &SelectionRule::AfterSymbol(1),
            &events,
            &TailPolicy::default(),
            0.01,
        )
        .unwrap();
        for e in &rep.entries {
            assert!(e.gap <= 0.01, "gap {}", e.gap);
        }
    }

    #[test]
    fn eps_net_on_constant_tail() {
        let symbols: Vec<u16> = vec![1; 4096];
        let s = seq(2, &symbols);
        let centers = cluster_point_estimate(&s, &TailPolicy::default(), 0.05).unwrap();
        assert_eq!(centers.len(), 1);
    }

    #[test]
    fn eps_net_spans_doubling_interval() {
        let s = von_mises_doubling(1 << 20);
        let centers = cluster_point_estimate(&s, &TailPolicy::default(), 0.05).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &centers {
            lo = lo.min(c.get(1));
            hi = hi.max(c.get(1));
        }
        assert!((lo - 1.0 / 3.0).abs() <= 0.05, "lo = {lo}");
        assert!((hi - 2.0 / 3.0).abs() <= 0.05, "hi = {hi}");
        // Every tail point is within eps of some center by construction;
        // spot-check coverage at a few indices.
        for n in [s.len() / 2, s.len() * 3 / 4, s.len()] {
            let r = s.relative_frequency(n).unwrap();
            let d = centers
                .iter()
                .map(|c| c.distance(&r))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 0.05 + 1e-12);
        }
    }

    #[test]
    fn precision_family_classification() {
        let s = von_mises_doubling(1 << 20);
        let family = vec![
            Event::empty(2),
            Event::full(2),
            Event::new(2, &[1]).unwrap(),
            Event::new(2, &[2]).unwrap(),
        ];
        let entries = precision_system(&s, &family, &TailPolicy::default(), 0.1).unwrap();
        assert!(entries[0].precise && entries[0].width == 0.0);
        assert!(entries[1].precise && entries[1].width == 0.0);
        assert!(!entries[2].precise);
        assert!(!entries[3].precise);
    }
}
