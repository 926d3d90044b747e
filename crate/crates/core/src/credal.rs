//! Finite credal sets: envelope previsions, coherence checking and the
//! generalized Bayes rule.
//!
//! A credal set is a finite list of simplex points. Suprema of linear
//! functionals over the list equal suprema over its convex hull, so no hull
//! computation is ever needed.

use crate::analysis::{Event, Gamble};
use crate::error::CredalError;
use crate::simplex::SimplexPoint;

/// Default cutoff under which a conditioning event's lower probability is
/// treated as zero.
pub const GBR_MASS_THRESHOLD: f64 = 1e-6;

/// Expectation of a gamble under a single finitely additive probability:
/// the natural extension of the point to all gambles, i.e. the dot product.
pub fn natural_extension(p: &SimplexPoint, x: &Gamble) -> Result<f64, CredalError> {
    if p.k() != x.k() {
        return Err(CredalError::DimensionMismatch {
            left: p.k(),
            right: x.k(),
        });
    }
    Ok(p.coords()
        .iter()
        .zip(x.values())
        .map(|(a, b)| a * b)
        .sum())
}

/// A nonempty finite set of simplex points whose convex hull is the intended
/// credal set.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalSet {
    k: usize,
    points: Vec<SimplexPoint>,
}

/// Envelope evaluation of one gamble over a credal set.
#[derive(Debug, Clone)]
pub struct UpperPrevisionReport {
    pub value: f64,
    /// Index of the point attaining the extremum (first one on ties).
    pub arg: usize,
    pub expectations: Vec<f64>,
}

impl CredalSet {
    pub fn new(points: Vec<SimplexPoint>) -> Result<Self, CredalError> {
        let k = points.first().map(|p| p.k()).ok_or(CredalError::Empty)?;
        for p in &points {
            if p.k() != k {
                return Err(CredalError::DimensionMismatch {
                    left: k,
                    right: p.k(),
                });
            }
        }
        Ok(CredalSet { k, points })
    }

    /// The vacuous credal set {e_1, ..., e_k}.
    pub fn vacuous(k: usize) -> Self {
        CredalSet {
            k,
            points: (0..k).map(|i| SimplexPoint::vertex(k, i)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    fn expectations(&self, x: &Gamble) -> Result<Vec<f64>, CredalError> {
        self.points
            .iter()
            .map(|p| natural_extension(p, x))
            .collect()
    }

    /// Envelope upper prevision: the maximum expectation over the points.
    pub fn upper_prevision(&self, x: &Gamble) -> Result<UpperPrevisionReport, CredalError> {
        let expectations = self.expectations(x)?;
        let (arg, value) = expectations
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(ai, av), (i, &v)| {
                if v > av {
                    (i, v)
                } else {
                    (ai, av)
                }
            });
        Ok(UpperPrevisionReport {
            value,
            arg,
            expectations,
        })
    }

    /// Conjugate lower prevision: the minimum expectation over the points.
    pub fn lower_prevision(&self, x: &Gamble) -> Result<UpperPrevisionReport, CredalError> {
        let expectations = self.expectations(x)?;
        let (arg, value) = expectations
            .iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |(ai, av), (i, &v)| {
                if v < av {
                    (i, v)
                } else {
                    (ai, av)
                }
            });
        Ok(UpperPrevisionReport {
            value,
            arg,
            expectations,
        })
    }

    pub fn upper_probability(&self, a: &Event) -> Result<f64, CredalError> {
        Ok(self.upper_prevision(&Gamble::indicator(a))?.value)
    }

    pub fn lower_probability(&self, a: &Event) -> Result<f64, CredalError> {
        Ok(self.lower_prevision(&Gamble::indicator(a))?.value)
    }

    /// Generalized Bayes rule by per-point updating: the maximum of
    /// E(chi_B X)/E(chi_B) over the points. Requires every point to give B
    /// mass above `threshold` (defaults to [`GBR_MASS_THRESHOLD`] when NaN).
    pub fn gbr_credal(&self, x: &Gamble, b: &Event, threshold: f64) -> Result<f64, CredalError> {
        let threshold = if threshold.is_nan() {
            GBR_MASS_THRESHOLD
        } else {
            threshold
        };
        if x.k() != self.k || b.k() != self.k {
            return Err(CredalError::DimensionMismatch {
                left: self.k,
                right: x.k().max(b.k()),
            });
        }
        let mut best = f64::NEG_INFINITY;
        for p in &self.points {
            let mass = b.mass_under(p);
            if mass <= threshold {
                return Err(CredalError::ZeroLowerProbability { threshold });
            }
            let num = natural_extension(p, &x.restricted_to(b))?;
            best = best.max(num / mass);
        }
        Ok(best)
    }
}

/// Coherence axioms checked by [`coherence_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceAxiom {
    /// R(X) <= sup X.
    Bounds,
    /// R(lambda X) = lambda R(X) for lambda >= 0.
    PositiveHomogeneity,
    /// R(X + Y) <= R(X) + R(Y).
    Subadditivity,
    /// R(X + c) = R(X) + c.
    TranslationEquivariance,
    /// X <= Y pointwise implies R(X) <= R(Y).
    Monotonicity,
}

/// First observed violation, with the inputs that witnessed it.
#[derive(Debug, Clone)]
pub struct CoherenceViolation {
    pub axiom: CoherenceAxiom,
    pub witness_x: Gamble,
    pub witness_y: Option<Gamble>,
    pub lambda: f64,
    pub shift: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub samples_checked: usize,
    pub violation: Option<CoherenceViolation>,
}

impl CoherenceReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks a candidate upper prevision against the coherence axioms on the
/// given samples (X, Y, lambda >= 0, c), stopping at the first violation.
pub fn coherence_check<F: FnMut(&Gamble) -> f64>(
    mut functional: F,
    samples: &[(Gamble, Gamble, f64, f64)],
    tol: f64,
) -> CoherenceReport {
    let mut checked = 0;
    for (x, y, lambda, shift) in samples {
        checked += 1;
        let rx = functional(x);
        let ry = functional(y);

        let sup = x.sup();
        if rx > sup + tol {
            return CoherenceReport {
                samples_checked: checked,
                violation: Some(CoherenceViolation {
                    axiom: CoherenceAxiom::Bounds,
                    witness_x: x.clone(),
                    witness_y: None,
                    lambda: *lambda,
                    shift: *shift,
                    lhs: rx,
                    rhs: sup,
                }),
            };
        }

        let scaled = functional(&x.scaled(*lambda));
        if (scaled - lambda * rx).abs() > tol {
            return CoherenceReport {
                samples_checked: checked,
                violation: Some(CoherenceViolation {
                    axiom: CoherenceAxiom::PositiveHomogeneity,
                    witness_x: x.clone(),
                    witness_y: None,
                    lambda: *lambda,
                    shift: *shift,
                    lhs: scaled,
                    rhs: lambda * rx,
                }),
            };
        }

        let summed = functional(&x.plus(y));
        if summed > rx + ry + tol {
            return CoherenceReport {
                samples_checked: checked,
                violation: Some(CoherenceViolation {
                    axiom: CoherenceAxiom::Subadditivity,
                    witness_x: x.clone(),
                    witness_y: Some(y.clone()),
                    lambda: *lambda,
                    shift: *shift,
                    lhs: summed,
                    rhs: rx + ry,
                }),
            };
        }

        let shifted = functional(&x.plus_const(*shift));
        if (shifted - (rx + shift)).abs() > tol {
            return CoherenceReport {
                samples_checked: checked,
                violation: Some(CoherenceViolation {
                    axiom: CoherenceAxiom::TranslationEquivariance,
                    witness_x: x.clone(),
                    witness_y: None,
                    lambda: *lambda,
                    shift: *shift,
                    lhs: shifted,
                    rhs: rx + shift,
                }),
            };
        }

        let dominating = x.pointwise_max(y);
        let rdom = functional(&dominating);
        if rx > rdom + tol {
            return CoherenceReport {
                samples_checked: checked,
                violation: Some(CoherenceViolation {
                    axiom: CoherenceAxiom::Monotonicity,
                    witness_x: x.clone(),
                    witness_y: Some(dominating),
                    lambda: *lambda,
                    shift: *shift,
                    lhs: rx,
                    rhs: rdom,
                }),
            };
        }
    }
    CoherenceReport {
        samples_checked: checked,
        violation: None,
    }
}

/// Generalized Bayes rule as the root of alpha -> R(chi_B (X - alpha)),
/// found by bisection on [inf X, sup X]. The functional must be a coherent
/// upper prevision with positive lower probability of B for the root to be
/// unique; a bracket without sign change is reported as `NoBracket`.
pub fn gbr_root<F: FnMut(&Gamble) -> f64>(
    mut functional: F,
    x: &Gamble,
    b: &Event,
    tol: f64,
    max_iters: u32,
) -> Result<f64, CredalError> {
    let mut lo = x.inf();
    let mut hi = x.sup();
    let g = |alpha: f64, f: &mut F| f(&x.plus_const(-alpha).restricted_to(b));
    let g_lo = g(lo, &mut functional);
    let g_hi = g(hi, &mut functional);
    if g_lo < -tol || g_hi > tol {
        return Err(CredalError::NoBracket { lo, hi });
    }
    if hi - lo <= tol {
        return Ok(0.5 * (lo + hi));
    }
    for _ in 0..max_iters {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid, &mut functional);
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
