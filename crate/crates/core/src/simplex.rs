//! Geometry of the (k-1)-simplex.
//!
//! Points are stored in barycentric coordinates (k nonnegative reals summing
//! to one). The module provides the boundary intercept of a ray between two
//! simplex points, integer quantization of boundary directions, polygonal
//! approximation of closed curves, one-sided Hausdorff distances and polyline
//! lengths. All operations are pure functions over immutable inputs.

use crate::error::SimplexError;

/// Validity tolerance for coordinates after floating-point arithmetic.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;
/// Tolerance for membership in the simplex boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;
/// Two points closer than this (sup norm) are treated as coinciding.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;
/// Stretch factors beyond this are numerically meaningless and reported as
/// degenerate pairs.
const GAMMA_MAX: f64 = 1e9;

/// A point of the (k-1)-simplex: a finitely additive probability on a
/// k-element outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Validates and wraps barycentric coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self, SimplexError> {
        if coords.is_empty() {
            return Err(SimplexError::InvalidPoint {
                reason: "empty coordinate vector".to_string(),
            });
        }
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(SimplexError::InvalidPoint {
                    reason: format!("coordinate {i} is not finite"),
                });
            }
            if c < -SIMPLEX_TOLERANCE {
                return Err(SimplexError::InvalidPoint {
                    reason: format!("coordinate {i} = {c} is negative"),
                });
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(SimplexError::InvalidPoint {
                reason: format!("coordinates sum to {sum}, expected 1"),
            });
        }
        Ok(SimplexPoint { coords })
    }

    /// The vertex e_i (0-based coordinate index).
    pub fn vertex(k: usize, i: usize) -> Self {
        assert!(i < k, "vertex index out of range");
        let mut coords = vec![0.0; k];
        coords[i] = 1.0;
        SimplexPoint { coords }
    }

    /// The barycenter (uniform distribution) of the simplex.
    pub fn uniform(k: usize) -> Self {
        assert!(k > 0);
        SimplexPoint {
            coords: vec![1.0 / k as f64; k],
        }
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn min_coord(&self) -> f64 {
        self.coords.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Whether the point lies on the simplex boundary (some coordinate zero
    /// within [`BOUNDARY_TOLERANCE`]).
    pub fn on_boundary(&self) -> bool {
        self.min_coord() <= BOUNDARY_TOLERANCE
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        euclidean_distance(&self.coords, &other.coords)
    }

    /// Probability of an event given as a 0-based coordinate index set.
    pub fn mass_of(&self, indices: impl IntoIterator<Item = usize>) -> f64 {
        indices.into_iter().map(|i| self.coords[i]).sum()
    }
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Nearest-integer rounding with halves rounding up: floor(y + 1/2).
pub fn round_half_up(y: f64) -> f64 {
    (y + 0.5).floor()
}

/// The boundary intercept of the ray from `p_old` through `p_new`.
#[derive(Debug, Clone)]
pub enum BoundaryIntercept {
    /// `p_new` already lies on the boundary; the intercept is `p_new` itself.
    OnBoundary { p_star: SimplexPoint },
    /// `p_new` is interior; the ray meets the boundary at `p_star` with
    /// stretch factor `gamma > 1`.
    Interior { gamma: f64, p_star: SimplexPoint },
}

impl BoundaryIntercept {
    pub fn p_star(&self) -> &SimplexPoint {
        match self {
            BoundaryIntercept::OnBoundary { p_star } => p_star,
            BoundaryIntercept::Interior { p_star, .. } => p_star,
        }
    }

    /// The stretch factor, `None` when the target was already on the boundary.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            BoundaryIntercept::OnBoundary { .. } => None,
            BoundaryIntercept::Interior { gamma, .. } => Some(*gamma),
        }
    }
}

/// Computes where the ray from `p_old` through `p_new` meets the simplex
/// boundary: gamma = min{ p_old_i / (p_old_i - p_new_i) > 0 } and
/// p* = gamma (p_new - p_old) + p_old. If `p_new` is itself on the boundary,
/// the intercept is `p_new`.
pub fn boundary_intercept(
    p_old: &SimplexPoint,
    p_new: &SimplexPoint,
) -> Result<BoundaryIntercept, SimplexError> {
    if p_old.k() != p_new.k() {
        return Err(SimplexError::DimensionMismatch {
            left: p_old.k(),
            right: p_new.k(),
        });
    }
    let sup_diff = p_old
        .coords()
        .iter()
        .zip(p_new.coords())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if sup_diff <= DEGENERATE_TOLERANCE {
        return Err(SimplexError::DegeneratePair);
    }
    if p_new.on_boundary() {
        return Ok(BoundaryIntercept::OnBoundary {
            p_star: p_new.clone(),
        });
    }
    let mut gamma = f64::INFINITY;
    for (&po, &pn) in p_old.coords().iter().zip(p_new.coords()) {
        let denom = po - pn;
        if denom > 0.0 && po > 0.0 {
            let g = po / denom;
            if g < gamma {
                gamma = g;
            }
        }
    }
    if !gamma.is_finite() || gamma > GAMMA_MAX {
        // Coordinates can only all be non-decreasing when the points
        // coincide; enormous stretch factors mean the same thing numerically.
        return Err(SimplexError::DegeneratePair);
    }
    let mut coords: Vec<f64> = p_old
        .coords()
        .iter()
        .zip(p_new.coords())
        .map(|(&po, &pn)| gamma * (pn - po) + po)
        .map(|c| if c < 0.0 && c > -SIMPLEX_TOLERANCE { 0.0 } else { c })
        .collect();
    // Large gamma amplifies the inputs' own sum defects; scale it away so the
    // intercept stays a valid simplex point.
    let sum: f64 = coords.iter().sum();
    if (sum - 1.0).abs() > 1e-13 && sum > 0.5 {
        for c in &mut coords {
            *c /= sum;
        }
    }
    let p_star = SimplexPoint::new(coords)?;
    Ok(BoundaryIntercept::Interior { gamma, p_star })
}

/// Integer quantization of a boundary direction with denominator `T`.
#[derive(Debug, Clone)]
pub struct QuantizedDirection {
    /// Rounded integer vector: iota_i = floor(T p*_i + 1/2).
    pub iota: Vec<u64>,
    /// The design denominator T.
    pub t: u64,
    /// Total mass T~ = sum of iota; always within k/2 of T.
    pub t_tilde: u64,
    /// iota / T, not necessarily a simplex point.
    pub p_tilde: Vec<f64>,
    /// iota / T~, a valid simplex point.
    pub p_hat: SimplexPoint,
}

/// Rounds `T * p_star` elementwise (halves up) and renormalizes by the summed
/// integer mass.
pub fn quantize_direction(
    p_star: &SimplexPoint,
    t: u64,
) -> Result<QuantizedDirection, SimplexError> {
    if t == 0 {
        return Err(SimplexError::InvalidArgument {
            reason: "quantization denominator T must be >= 1".to_string(),
        });
    }
    let tf = t as f64;
    let iota: Vec<u64> = p_star
        .coords()
        .iter()
        .map(|&c| round_half_up(tf * c).max(0.0) as u64)
        .collect();
    let t_tilde: u64 = iota.iter().sum();
    if t_tilde == 0 {
        return Err(SimplexError::ZeroMass { t });
    }
    let p_tilde: Vec<f64> = iota.iter().map(|&i| i as f64 / tf).collect();
    let p_hat = SimplexPoint::new(iota.iter().map(|&i| i as f64 / t_tilde as f64).collect())?;
    Ok(QuantizedDirection {
        iota,
        t,
        t_tilde,
        p_tilde,
        p_hat,
    })
}

/// A closed curve in the simplex: either an explicit polygon (the closing
/// edge back to the first vertex is implied) or a named parametric curve.
#[derive(Debug, Clone)]
pub enum CurveSpec {
    Polygon(Vec<SimplexPoint>),
    /// The figure-eight curve in the 2-simplex:
    /// z1 = center + scale 2 cos t / (1 + sin^2 t),
    /// z2 = center + scale 2 sin t cos t / (1 + sin^2 t), z3 = 1 - z1 - z2,
    /// with t = 2 pi u for u in [0, 1].
    Lemniscate { center: f64, scale: f64 },
}

pub const LEMNISCATE_DEFAULT_CENTER: f64 = 1.0 / 3.0;
pub const LEMNISCATE_DEFAULT_SCALE: f64 = 1.0 / 12.0;

impl CurveSpec {
    /// The builtin `lemniscate3` with default center 1/3 and scale 1/12.
    pub fn lemniscate3() -> Self {
        CurveSpec::Lemniscate {
            center: LEMNISCATE_DEFAULT_CENTER,
            scale: LEMNISCATE_DEFAULT_SCALE,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            CurveSpec::Polygon(vs) => vs.first().map(|p| p.k()).unwrap_or(0),
            CurveSpec::Lemniscate { .. } => 3,
        }
    }

    pub fn validate(&self) -> Result<(), SimplexError> {
        match self {
            CurveSpec::Polygon(vs) => {
                if vs.is_empty() {
                    return Err(SimplexError::InvalidCurve {
                        reason: "polygon needs at least one vertex".to_string(),
                    });
                }
                let k = vs[0].k();
                for v in vs {
                    if v.k() != k {
                        return Err(SimplexError::DimensionMismatch {
                            left: k,
                            right: v.k(),
                        });
                    }
                }
                Ok(())
            }
            CurveSpec::Lemniscate { center, scale } => {
                let c = Self::lemniscate_point(*center, *scale, 0.0);
                for t in [0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875] {
                    SimplexPoint::new(Self::lemniscate_point(*center, *scale, t).to_vec())?;
                }
                let _ = c;
                Ok(())
            }
        }
    }

    fn lemniscate_point(center: f64, scale: f64, u: f64) -> [f64; 3] {
        let th = u * std::f64::consts::TAU;
        let (s, c) = th.sin_cos();
        let denom = 1.0 + s * s;
        let z1 = center + scale * 2.0 * c / denom;
        let z2 = center + scale * 2.0 * s * c / denom;
        [z1, z2, 1.0 - z1 - z2]
    }

    /// Evaluates the closed parametrization c(u) for u in [0, 1]. Polygons are
    /// parametrized by arclength fraction along their closed outline.
    pub fn eval(&self, u: f64) -> SimplexPoint {
        match self {
            CurveSpec::Lemniscate { center, scale } => {
                let p = Self::lemniscate_point(*center, *scale, u);
                SimplexPoint::new(p.to_vec()).expect("lemniscate point leaves the simplex")
            }
            CurveSpec::Polygon(vs) => {
                if vs.len() == 1 {
                    return vs[0].clone();
                }
                let m = vs.len();
                let lengths: Vec<f64> = (0..m)
                    .map(|e| vs[e].distance(&vs[(e + 1) % m]))
                    .collect();
                let perimeter: f64 = lengths.iter().sum();
                if perimeter == 0.0 {
                    return vs[0].clone();
                }
                let mut target = u.clamp(0.0, 1.0) * perimeter;
                for e in 0..m {
                    if target <= lengths[e] || e == m - 1 {
                        let frac = if lengths[e] > 0.0 {
                            (target / lengths[e]).clamp(0.0, 1.0)
                        } else {
                            0.0
                        };
                        return lerp(&vs[e], &vs[(e + 1) % m], frac);
                    }
                    target -= lengths[e];
                }
                unreachable!()
            }
        }
    }
}

fn lerp(a: &SimplexPoint, b: &SimplexPoint, t: f64) -> SimplexPoint {
    let coords: Vec<f64> = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(&x, &y)| x + t * (y - x))
        .collect();
    SimplexPoint::new(coords).expect("interpolant of simplex points is a simplex point")
}

/// Samples `V + 1` vertices of the closed curve: p_v = c(v/V) with
/// p_0 = p_V. A polygon with exactly V vertices is returned verbatim; other
/// polygons are subdivided by arclength while keeping the original vertices.
pub fn polygonal_approximation(
    curve: &CurveSpec,
    v_count: u32,
) -> Result<Vec<SimplexPoint>, SimplexError> {
    if v_count < 2 {
        return Err(SimplexError::InvalidArgument {
            reason: format!("vertex count {v_count} must be >= 2"),
        });
    }
    curve.validate()?;
    let v_count = v_count as usize;
    match curve {
        CurveSpec::Lemniscate { .. } => {
            let mut pts: Vec<SimplexPoint> = (0..v_count)
                .map(|v| curve.eval(v as f64 / v_count as f64))
                .collect();
            pts.push(pts[0].clone());
            Ok(pts)
        }
        CurveSpec::Polygon(vs) => {
            let m = vs.len();
            if m == 1 {
                let mut pts = vec![vs[0].clone(); v_count];
                pts.push(vs[0].clone());
                return Ok(pts);
            }
            if v_count <= m {
                let mut pts = vs.clone();
                pts.push(vs[0].clone());
                return Ok(pts);
            }
            // Distribute V points over the m closed edges: one per edge plus
            // extras allocated by largest remainder on edge length.
            let lengths: Vec<f64> = (0..m)
                .map(|e| vs[e].distance(&vs[(e + 1) % m]))
                .collect();
            let perimeter: f64 = lengths.iter().sum();
            let extra = v_count - m;
            let mut alloc = vec![1usize; m];
            if perimeter > 0.0 && extra > 0 {
                let shares: Vec<f64> = lengths
                    .iter()
                    .map(|&l| extra as f64 * l / perimeter)
                    .collect();
                let mut given = 0usize;
                for (e, s) in shares.iter().enumerate() {
                    let whole = s.floor() as usize;
                    alloc[e] += whole;
                    given += whole;
                }
                let mut rema: Vec<(usize, f64)> = shares
                    .iter()
                    .enumerate()
                    .map(|(e, s)| (e, s - s.floor()))
                    .collect();
                rema.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                for &(e, _) in rema.iter().take(extra - given) {
                    alloc[e] += 1;
                }
            }
            let mut pts = Vec::with_capacity(v_count + 1);
            for e in 0..m {
                let next = &vs[(e + 1) % m];
                for j in 0..alloc[e] {
                    pts.push(lerp(&vs[e], next, j as f64 / alloc[e] as f64));
                }
            }
            debug_assert_eq!(pts.len(), v_count);
            pts.push(pts[0].clone());
            Ok(pts)
        }
    }
}

/// Squared Euclidean distance from `p` to the segment [a, b], on raw
/// coordinate slices.
pub fn point_to_segment_distance_sq(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut dot_wv = 0.0;
    let mut dot_vv = 0.0;
    for i in 0..p.len() {
        let v = b[i] - a[i];
        let w = p[i] - a[i];
        dot_wv += w * v;
        dot_vv += v * v;
    }
    let t = if dot_vv > 0.0 {
        (dot_wv / dot_vv).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut d2 = 0.0;
    for i in 0..p.len() {
        let proj = a[i] + t * (b[i] - a[i]);
        let d = p[i] - proj;
        d2 += d * d;
    }
    d2
}

/// Euclidean distance from `p` to the segment [a, b].
pub fn point_to_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    point_to_segment_distance_sq(p, a, b).sqrt()
}

/// Minimum distance from a point to an open polyline (consecutive segments).
pub fn min_distance_to_polyline(p: &[f64], polyline: &[SimplexPoint]) -> f64 {
    if polyline.is_empty() {
        return f64::INFINITY;
    }
    if polyline.len() == 1 {
        return euclidean_distance(p, polyline[0].coords());
    }
    let mut best = f64::INFINITY;
    for w in polyline.windows(2) {
        let d2 = point_to_segment_distance_sq(p, w[0].coords(), w[1].coords());
        if d2 < best {
            best = d2;
        }
    }
    best.sqrt()
}

/// Target of a one-sided Hausdorff distance computation.
#[derive(Debug, Clone, Copy)]
pub enum DistanceTarget<'a> {
    Points(&'a [SimplexPoint]),
    Polyline(&'a [SimplexPoint]),
}

/// One-sided Hausdorff distance d(A, B) = max over a in A of the distance
/// from a to B. Polyline targets measure point-to-segment distance.
pub fn hausdorff_distance(a: &[SimplexPoint], b: DistanceTarget<'_>) -> f64 {
    let mut worst = 0.0f64;
    for p in a {
        let d = match b {
            DistanceTarget::Points(pts) => pts
                .iter()
                .map(|q| p.distance(q))
                .fold(f64::INFINITY, f64::min),
            DistanceTarget::Polyline(line) => min_distance_to_polyline(p.coords(), line),
        };
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Total Euclidean length of a polyline (sum of segment lengths).
pub fn curve_length(polyline: &[SimplexPoint]) -> f64 {
    polyline.windows(2).map(|w| w[0].distance(&w[1])).sum()
}
