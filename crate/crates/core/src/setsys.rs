//! Finite set-system algebra: pi-systems, pre-Dynkin systems, fields, their
//! generated closures, and checkable uniqueness/precision consequences.
//!
//! Members are bitmasks over a ground set of at most 24 elements. Closures
//! are least fixpoints computed by saturation and guarded by a member budget.

use std::collections::BTreeSet;

use crate::analysis::{precision_system, Event, TailPolicy};
use crate::error::{AnalysisError, SetSystemError};
use crate::sequence::SymbolSequence;

/// Maximum ground-set size.
pub const MAX_OMEGA: usize = 24;
/// Maximum number of members a closure may reach.
pub const CLOSURE_BUDGET: usize = 1 << 20;

/// A collection of subsets of {1, ..., omega_size}, kept deduplicated and
/// sorted for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    omega_size: usize,
    sets: Vec<u32>,
}

impl SetSystem {
    /// Builds from element lists (1-based elements).
    pub fn new(omega_size: usize, sets: &[Vec<usize>]) -> Result<Self, SetSystemError> {
        if omega_size == 0 || omega_size > MAX_OMEGA {
            return Err(SetSystemError::OmegaTooLarge {
                omega: omega_size,
                max: MAX_OMEGA,
            });
        }
        let mut masks = BTreeSet::new();
        for set in sets {
            let mut mask = 0u32;
            for &e in set {
                if e == 0 || e > omega_size {
                    return Err(SetSystemError::ElementOutOfRange {
                        element: e,
                        omega: omega_size,
                    });
                }
                mask |= 1 << (e - 1);
            }
            masks.insert(mask);
        }
        Ok(SetSystem {
            omega_size,
            sets: masks.into_iter().collect(),
        })
    }

    /// Builds directly from bitmasks.
    pub fn from_masks(
        omega_size: usize,
        masks: impl IntoIterator<Item = u32>,
    ) -> Result<Self, SetSystemError> {
        if omega_size == 0 || omega_size > MAX_OMEGA {
            return Err(SetSystemError::OmegaTooLarge {
                omega: omega_size,
                max: MAX_OMEGA,
            });
        }
        let full = full_mask(omega_size);
        let mut dedup = BTreeSet::new();
        for m in masks {
            if m & !full != 0 {
                return Err(SetSystemError::ElementOutOfRange {
                    element: (32 - m.leading_zeros()) as usize,
                    omega: omega_size,
                });
            }
            dedup.insert(m);
        }
        Ok(SetSystem {
            omega_size,
            sets: dedup.into_iter().collect(),
        })
    }

    pub fn omega_size(&self) -> usize {
        self.omega_size
    }

    pub fn masks(&self) -> &[u32] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.sets.binary_search(&mask).is_ok()
    }

    fn full(&self) -> u32 {
        full_mask(self.omega_size)
    }

    /// Nonempty and closed under pairwise intersection.
    pub fn is_pi_system(&self) -> bool {
        if self.sets.is_empty() {
            return false;
        }
        for (i, &a) in self.sets.iter().enumerate() {
            for &b in &self.sets[i..] {
                if !self.contains(a & b) {
                    return false;
                }
            }
        }
        true
    }

    /// Contains Omega, closed under complement and disjoint union.
    pub fn is_pre_dynkin(&self) -> bool {
        let full = self.full();
        if !self.contains(full) {
            return false;
        }
        for &a in &self.sets {
            if !self.contains(full & !a) {
                return false;
            }
        }
        for (i, &a) in self.sets.iter().enumerate() {
            for &b in &self.sets[i..] {
                if a & b == 0 && !self.contains(a | b) {
                    return false;
                }
            }
        }
        true
    }

    /// Contains Omega, closed under complement and arbitrary pairwise union.
    pub fn is_field(&self) -> bool {
        let full = self.full();
        if !self.contains(full) {
            return false;
        }
        for &a in &self.sets {
            if !self.contains(full & !a) {
                return false;
            }
        }
        for (i, &a) in self.sets.iter().enumerate() {
            for &b in &self.sets[i..] {
                if !self.contains(a | b) {
                    return false;
                }
            }
        }
        true
    }

    /// Element lists of all members (for serialization).
    pub fn element_lists(&self) -> Vec<Vec<usize>> {
        self.sets
            .iter()
            .map(|&m| (1..=self.omega_size).filter(|e| m >> (e - 1) & 1 == 1).collect())
            .collect()
    }
}

fn full_mask(omega_size: usize) -> u32 {
    if omega_size == 32 {
        u32::MAX
    } else {
        (1u32 << omega_size) - 1
    }
}

fn saturate(
    start: &SetSystem,
    close_any_union: bool,
) -> Result<SetSystem, SetSystemError> {
    let over_budget = || SetSystemError::ClosureBudgetExceeded {
        budget: CLOSURE_BUDGET,
    };
    let full = start.full();
    let mut members: BTreeSet<u32> = start.sets.iter().copied().collect();
    members.insert(full);
    loop {
        let snapshot: Vec<u32> = members.iter().copied().collect();
        let before = members.len();
        for &a in &snapshot {
            members.insert(full & !a);
        }
        for (i, &a) in snapshot.iter().enumerate() {
            for &b in &snapshot[i..] {
                if close_any_union || a & b == 0 {
                    members.insert(a | b);
                }
            }
            // A single round can explode combinatorially; bail early.
            if members.len() > CLOSURE_BUDGET {
                return Err(over_budget());
            }
        }
        if members.len() > CLOSURE_BUDGET {
            return Err(over_budget());
        }
        if members.len() == before {
            break;
        }
    }
    SetSystem::from_masks(start.omega_size, members)
}

/// Least pre-Dynkin system containing `h`: saturation under Omega,
/// complement and disjoint union.
pub fn generate_pre_dynkin(h: &SetSystem) -> Result<SetSystem, SetSystemError> {
    let out = saturate(h, false)?;
    debug_assert!(out.is_pre_dynkin());
    Ok(out)
}

/// Least field containing `h`: saturation under Omega, complement and union
/// (intersections follow by De Morgan).
pub fn generate_field(h: &SetSystem) -> Result<SetSystem, SetSystemError> {
    let out = saturate(h, true)?;
    debug_assert!(out.is_field());
    Ok(out)
}

/// Outcome of a uniqueness check: two finitely additive probabilities that
/// agree on a pi-system agree on the generated field.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Whether |P - Q| <= tol held on the pi-system itself.
    pub agree_on_h: bool,
    pub max_gap_h: f64,
    pub max_gap_field: f64,
    pub field_size: usize,
    /// The propagated bound |field| * tol.
    pub bound: f64,
    /// Whether the implication held (vacuously true when the premise fails).
    pub holds: bool,
}

fn mass(atoms: &[f64], mask: u32) -> f64 {
    atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .sum()
}

fn validate_atoms(atoms: &[f64], omega: usize) -> Result<(), SetSystemError> {
    if atoms.len() != omega {
        return Err(SetSystemError::InvalidProbability {
            reason: format!("expected {omega} atom masses, got {}", atoms.len()),
        });
    }
    if atoms.iter().any(|&p| !(0.0..=1.0 + 1e-9).contains(&p)) {
        return Err(SetSystemError::InvalidProbability {
            reason: "atom masses must lie in [0, 1]".to_string(),
        });
    }
    let sum: f64 = atoms.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SetSystemError::InvalidProbability {
            reason: format!("atom masses sum to {sum}"),
        });
    }
    Ok(())
}

/// Checks the uniqueness property: if P and Q (given by atom masses) agree on
/// the pi-system `h` within `tol`, they agree on the generated field within
/// |field| * tol.
pub fn uniqueness_check(
    p_atoms: &[f64],
    q_atoms: &[f64],
    h: &SetSystem,
    tol: f64,
) -> Result<UniquenessReport, SetSystemError> {
    validate_atoms(p_atoms, h.omega_size())?;
    validate_atoms(q_atoms, h.omega_size())?;
    if !h.is_pi_system() {
        return Err(SetSystemError::NotPiSystem);
    }
    let max_gap_h = h
        .masks()
        .iter()
        .map(|&m| (mass(p_atoms, m) - mass(q_atoms, m)).abs())
        .fold(0.0f64, f64::max);
    let field = generate_field(h)?;
    let max_gap_field = field
        .masks()
        .iter()
        .map(|&m| (mass(p_atoms, m) - mass(q_atoms, m)).abs())
        .fold(0.0f64, f64::max);
    let agree_on_h = max_gap_h <= tol;
    let bound = field.len() as f64 * tol;
    Ok(UniquenessReport {
        agree_on_h,
        max_gap_h,
        max_gap_field,
        field_size: field.len(),
        bound,
        holds: !agree_on_h || max_gap_field <= bound,
    })
}

/// One event of a precision pre-Dynkin report.
#[derive(Debug, Clone)]
pub struct PrecisionPdEntry {
    pub event: Event,
    pub width: f64,
    pub precise: bool,
}

/// Pre-Dynkin structure of the prefix-surrogate system of precision.
#[derive(Debug, Clone)]
pub struct PrecisionPdReport {
    pub entries: Vec<PrecisionPdEntry>,
    /// Omega has window width zero.
    pub omega_precise: bool,
    /// width(A) equals width(complement of A) for every family member.
    pub complement_symmetric: bool,
    /// For disjoint precise pairs, the union's width is subadditive and
    /// within twice the tolerance.
    pub disjoint_union_ok: bool,
}

/// Verifies the pre-Dynkin axioms on the finite surrogate of the system of
/// precision over the given event family.
pub fn precision_pre_dynkin_check(
    seq: &SymbolSequence,
    family: &[Event],
    policy: &TailPolicy,
    tol: f64,
) -> Result<PrecisionPdReport, AnalysisError> {
    let k = seq.k();
    let omega = Event::full(k);
    let omega_width = precision_system(seq, &[omega], policy, tol)?[0].width;
    let omega_precise = omega_width == 0.0;

    let entries: Vec<PrecisionPdEntry> = precision_system(seq, family, policy, tol)?
        .into_iter()
        .map(|e| PrecisionPdEntry {
            event: e.event,
            width: e.width,
            precise: e.precise,
        })
        .collect();

    let mut complement_symmetric = true;
    for entry in &entries {
        let comp = entry.event.complement();
        let comp_width = precision_system(seq, &[comp], policy, tol)?[0].width;
        if (entry.width - comp_width).abs() > 1e-12 {
            complement_symmetric = false;
        }
    }

    let mut disjoint_union_ok = true;
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            if !(a.precise && b.precise) || !a.event.is_disjoint(&b.event) {
                continue;
            }
            let union = a.event.union(&b.event);
            let union_width = precision_system(seq, &[union], policy, tol)?[0].width;
            if union_width > a.width + b.width + 1e-12 || union_width > 2.0 * tol + 1e-12 {
                disjoint_union_ok = false;
            }
        }
    }

    Ok(PrecisionPdReport {
        entries,
        omega_precise,
        complement_symmetric,
        disjoint_union_ok,
    })
}
