//! Cross-module invariants, mostly property-based.

use proptest::prelude::*;

use freqlab::analysis::{
    conditional_prevision_window, event_frequency_window, lower_prevision_estimate,
    prevision_window, running_average, upper_prevision_estimate, ConditionalFrequency, Event,
    Gamble, TailPolicy,
};
use freqlab::credal::{coherence_check, natural_extension, CredalSet};
use freqlab::sequence::{von_mises_doubling, SymbolSequence};
use freqlab::setsys::{generate_field, generate_pre_dynkin, SetSystem};
use freqlab::simplex::{
    boundary_intercept, hausdorff_distance, quantize_direction, BoundaryIntercept, DistanceTarget,
    SimplexPoint,
};

fn simplex_point(k: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(1e-6f64..1.0, k).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        let coords: Vec<f64> = raw.iter().map(|v| v / sum).collect();
        let total: f64 = coords.iter().sum();
        SimplexPoint::new(coords.iter().map(|c| c / total).collect()).unwrap()
    })
}

fn symbols(k: u16, max_len: usize) -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(1..=k, 1..max_len)
}

proptest! {
    #[test]
    fn intercept_hits_boundary_exactly(
        p_old in simplex_point(3),
        p_new in simplex_point(3),
    ) {
        prop_assume!(p_old.coords().iter().zip(p_new.coords()).any(|(a, b)| (a - b).abs() > 1e-6));
        let icpt = boundary_intercept(&p_old, &p_new).unwrap();
        match icpt {
            BoundaryIntercept::Interior { gamma, ref p_star } => {
                prop_assert!(gamma > 1.0);
                // The binding coordinate sits on the boundary.
                prop_assert!(p_star.min_coord().abs() <= 1e-10);
                // p* realizes the affine formula.
                for i in 0..3 {
                    let expect = gamma * (p_new.get(i) - p_old.get(i)) + p_old.get(i);
                    prop_assert!((p_star.get(i) - expect).abs() <= 1e-12);
                }
            }
            BoundaryIntercept::OnBoundary { ref p_star } => {
                prop_assert!(p_star.min_coord() <= 1e-10);
            }
        }
    }

    #[test]
    fn quantization_invariants(
        p_star in simplex_point(4),
        t in 4u64..10_000,
    ) {
        let k = 4.0;
        let q = quantize_direction(&p_star, t).unwrap();
        let tt = q.t_tilde as f64;
        prop_assert!(tt >= t as f64 - k / 2.0 && tt <= t as f64 + k / 2.0);
        for i in 0..4 {
            prop_assert!((q.p_tilde[i] - p_star.get(i)).abs() <= 1.0 / (2.0 * t as f64) + 1e-15);
        }
        let dist: f64 = q
            .p_hat
            .coords()
            .iter()
            .zip(&q.p_tilde)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        prop_assert!(dist <= k / (2.0 * t as f64) + 1e-15);
    }

    #[test]
    fn hausdorff_zero_iff_contained(points in prop::collection::vec(simplex_point(3), 1..6)) {
        let d = hausdorff_distance(&points, DistanceTarget::Points(&points));
        prop_assert!(d == 0.0);
        // Moving one point strictly off the target set gives a positive value.
        let mut moved = points.clone();
        let shift = SimplexPoint::new(vec![0.98, 0.01, 0.01]).unwrap();
        if moved.iter().all(|p| p.distance(&shift) > 1e-6) {
            moved[0] = shift;
            let d = hausdorff_distance(&moved, DistanceTarget::Points(&points));
            prop_assert!(d > 1e-12);
        }
    }

    #[test]
    fn running_average_is_linear_in_counts(
        syms in symbols(5, 400),
        values in prop::collection::vec(-10.0f64..10.0, 5),
    ) {
        let seq = SymbolSequence::from_symbols(5, &syms).unwrap();
        let x = Gamble::new(values).unwrap();
        let avg = running_average(&seq, &x).unwrap();
        for n in 1..=seq.len() {
            let r = seq.relative_frequency(n).unwrap();
            let dot: f64 = r.coords().iter().zip(x.values()).map(|(a, b)| a * b).sum();
            prop_assert!((avg[n - 1] - dot).abs() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn decomposition_lemma_exact(
        syms in symbols(4, 600),
        split in 0.0f64..1.0,
        width in 0.0f64..1.0,
    ) {
        let seq = SymbolSequence::from_symbols(4, &syms).unwrap();
        let len = seq.len();
        prop_assume!(len >= 2);
        let n = 1 + ((len - 1) as f64 * split) as usize;
        let m = 1 + ((len - n) as f64 * width) as usize;
        prop_assume!(n + m <= len);
        // Integer form: prefix counts decompose into prefix + shifted block.
        let c_nm = seq.counts_at(n + m).unwrap();
        let c_n = seq.counts_at(n).unwrap();
        let mut block = vec![0u64; 4];
        for i in n..n + m {
            block[(seq.symbol(i) - 1) as usize] += 1;
        }
        for j in 0..4 {
            prop_assert_eq!(c_nm[j], c_n[j] + block[j]);
        }
        // Float form: the convex combination identity.
        let r_nm = seq.relative_frequency(n + m).unwrap();
        let r_n = seq.relative_frequency(n).unwrap();
        let nf = n as f64;
        let mf = m as f64;
        for j in 0..4 {
            let shifted = block[j] as f64 / mf;
            let combo = nf / (nf + mf) * r_n.get(j) + mf / (nf + mf) * shifted;
            prop_assert!((r_nm.get(j) - combo).abs() <= 1e-12);
        }
    }

    #[test]
    fn step_bound_holds(syms in symbols(6, 500)) {
        let seq = SymbolSequence::from_symbols(6, &syms).unwrap();
        for n in 1..seq.len() {
            let a = seq.relative_frequency(n).unwrap();
            let b = seq.relative_frequency(n + 1).unwrap();
            prop_assert!(a.distance(&b) <= 2.0 / (n as f64 + 1.0) + 1e-12);
        }
    }

    #[test]
    fn estimator_conjugacy_and_bounds(
        syms in symbols(3, 500),
        values in prop::collection::vec(-5.0f64..5.0, 3),
    ) {
        let seq = SymbolSequence::from_symbols(3, &syms).unwrap();
        let x = Gamble::new(values).unwrap();
        let policy = TailPolicy::default();
        let upper = upper_prevision_estimate(&seq, &x, &policy).unwrap();
        let lower = lower_prevision_estimate(&seq, &x, &policy).unwrap();
        // Conjugacy is exact, not approximate.
        let upper_neg = upper_prevision_estimate(&seq, &x.negated(), &policy).unwrap();
        prop_assert_eq!(lower, -upper_neg);
        prop_assert!(lower <= upper);
        prop_assert!(upper <= x.sup() + 1e-12 && upper >= x.inf() - 1e-12);
        // Monotonicity against a pointwise-dominating gamble.
        let y = x.plus_const(0.25);
        let upper_y = upper_prevision_estimate(&seq, &y, &policy).unwrap();
        prop_assert!(upper <= upper_y + 1e-12);
    }

    #[test]
    fn precision_width_is_complement_symmetric(syms in symbols(4, 500), mask in 1u8..15) {
        let seq = SymbolSequence::from_symbols(4, &syms).unwrap();
        let members: Vec<u16> = (1..=4u16).filter(|s| mask >> (s - 1) & 1 == 1).collect();
        let a = Event::new(4, &members).unwrap();
        let policy = TailPolicy::default();
        let wa = event_frequency_window(&seq, &a, &policy).unwrap();
        let wc = event_frequency_window(&seq, &a.complement(), &policy).unwrap();
        prop_assert!((wa.width() - wc.width()).abs() <= 1e-12);
    }

    #[test]
    fn disjoint_counts_are_additive(syms in symbols(5, 400)) {
        let seq = SymbolSequence::from_symbols(5, &syms).unwrap();
        let a = Event::new(5, &[1, 3]).unwrap();
        let b = Event::new(5, &[2, 5]).unwrap();
        prop_assert!(a.is_disjoint(&b));
        let union = a.union(&b);
        for n in [1, seq.len() / 2 + 1, seq.len()] {
            let counts = seq.counts_at(n).unwrap();
            let sum_parts: u64 = counts[0] + counts[2] + counts[1] + counts[4];
            let union_count: u64 = union
                .members()
                .iter()
                .map(|&s| counts[(s - 1) as usize])
                .sum();
            prop_assert_eq!(union_count, sum_parts);
        }
    }

    #[test]
    fn conditional_distributions_are_valid(
        syms in symbols(4, 300),
        mask in 1u8..15,
    ) {
        let seq = SymbolSequence::from_symbols(4, &syms).unwrap();
        let members: Vec<u16> = (1..=4u16).filter(|s| mask >> (s - 1) & 1 == 1).collect();
        let b = Event::new(4, &members).unwrap();
        prop_assume!(seq.iter().any(|s| b.contains(s)));
        let cf = ConditionalFrequency::new(&seq, b, None).unwrap();
        for n in 1..=seq.len() {
            let d = cf.distribution(&seq, n).unwrap();
            let sum: f64 = d.coords().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            prop_assert!(d.coords().iter().all(|&c| c >= 0.0));
        }
    }

    #[test]
    fn envelope_dominates_convex_combinations(
        points in prop::collection::vec(simplex_point(3), 1..5),
        values in prop::collection::vec(-4.0f64..4.0, 3),
        weights in prop::collection::vec(0.01f64..1.0, 5),
    ) {
        let credal = CredalSet::new(points.clone()).unwrap();
        let x = Gamble::new(values).unwrap();
        let upper = credal.upper_prevision(&x).unwrap().value;
        let lower = credal.lower_prevision(&x).unwrap().value;
        // Any convex combination of the points stays inside the envelope.
        let w: Vec<f64> = weights.iter().take(points.len()).cloned().collect();
        let total: f64 = w.iter().sum();
        let mut mix = vec![0.0; 3];
        for (p, wi) in points.iter().zip(&w) {
            for (m, c) in mix.iter_mut().zip(p.coords()) {
                *m += wi / total * c;
            }
        }
        let blended = SimplexPoint::new(mix).unwrap();
        let e = natural_extension(&blended, &x).unwrap();
        prop_assert!(e <= upper + 1e-12);
        prop_assert!(e >= lower - 1e-12);
    }

    #[test]
    fn envelope_is_coherent(
        points in prop::collection::vec(simplex_point(3), 1..5),
        xv in prop::collection::vec(-4.0f64..4.0, 3),
        yv in prop::collection::vec(-4.0f64..4.0, 3),
        lambda in 0.0f64..3.0,
        shift in -2.0f64..2.0,
    ) {
        let credal = CredalSet::new(points).unwrap();
        let samples = vec![(Gamble::new(xv).unwrap(), Gamble::new(yv).unwrap(), lambda, shift)];
        let rep = coherence_check(
            |g| credal.upper_prevision(g).unwrap().value,
            &samples,
            1e-10,
        );
        prop_assert!(rep.passed(), "violation: {:?}", rep.violation);
    }

    #[test]
    fn positive_scaling_preserves_argmax(
        points in prop::collection::vec(simplex_point(3), 2..5),
        values in prop::collection::vec(-4.0f64..4.0, 3),
        lambda in 0.1f64..5.0,
    ) {
        let credal = CredalSet::new(points).unwrap();
        let x = Gamble::new(values).unwrap();
        let base = credal.upper_prevision(&x).unwrap();
        // Require a clearly unique maximum before asserting stability.
        let mut sorted = base.expectations.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(
            sorted.len() >= 2 && sorted[sorted.len() - 1] - sorted[sorted.len() - 2] > 1e-9
        );
        let scaled = credal.upper_prevision(&x.scaled(lambda)).unwrap();
        prop_assert_eq!(base.arg, scaled.arg);
        prop_assert!((scaled.value - lambda * base.value).abs() <= 1e-9);
    }

    #[test]
    fn field_equivalence_randomized_omega5(picks in prop::collection::vec(0u32..32, 0..12)) {
        let mut masks = vec![31u32];
        masks.extend(picks);
        let s = SetSystem::from_masks(5, masks).unwrap();
        prop_assert_eq!(s.is_field(), s.is_pre_dynkin() && s.is_pi_system());
    }

    #[test]
    fn pre_dynkin_closure_contained_in_field(picks in prop::collection::vec(0u32..16, 0..5)) {
        let h = SetSystem::from_masks(4, picks).unwrap();
        let pd = generate_pre_dynkin(&h).unwrap();
        let fld = generate_field(&h).unwrap();
        for &m in pd.masks() {
            prop_assert!(fld.contains(m));
        }
        prop_assert!(pd.is_pre_dynkin());
        prop_assert!(fld.is_field());
    }

    #[test]
    fn window_widens_with_more_data(
        series in prop::collection::vec(-10.0f64..10.0, 4..200),
        frac in 0.2f64..1.0,
    ) {
        // Enlarging the window at a fixed start can only widen the interval.
        let start = 2usize;
        let shorter = (series.len() as f64 * frac) as usize;
        prop_assume!(shorter >= start);
        let policy = TailPolicy::FixedStart(start);
        let small = freqlab::analysis::window_extrema(&series[..shorter], &policy).unwrap();
        let big = freqlab::analysis::window_extrema(&series, &policy).unwrap();
        prop_assert!(big.lo <= small.lo);
        prop_assert!(big.hi >= small.hi);
    }

    #[test]
    fn sequence_text_roundtrip(syms in symbols(7, 300)) {
        let seq = SymbolSequence::from_symbols(7, &syms).unwrap();
        let mut buf = Vec::new();
        freqlab::io::write_sequence_text(&mut buf, &seq).unwrap();
        let back = freqlab::io::read_sequence_text(&mut &buf[..]).unwrap();
        prop_assert_eq!(back.k(), seq.k());
        prop_assert!(back.iter().eq(seq.iter()));
    }

    #[test]
    fn sequence_binary_roundtrip(syms in symbols(300, 300)) {
        let seq = SymbolSequence::from_symbols(300, &syms).unwrap();
        let mut buf = Vec::new();
        freqlab::io::write_sequence_binary(&mut buf, &seq).unwrap();
        let back = freqlab::io::read_sequence_auto(&buf).unwrap();
        prop_assert_eq!(back.k(), seq.k());
        prop_assert!(back.iter().eq(seq.iter()));
    }
}

#[test]
fn near_boundary_triangle_tracks_its_outline() {
    // A triangle close to the simplex corners forces small stretch factors
    // and long pieces; all trace bounds must still hold and the last
    // generation's points stay within (8 + k)/sqrt(n) of the outline (the
    // polygonal approximation of a polygon is exact, so no curve term).
    use freqlab::sequence::{
        construct_polytope_boundary, Budget, QuantizationSchedule, Schedules, VertexSchedule,
    };
    use freqlab::simplex::min_distance_to_polyline;
    let verts = vec![
        SimplexPoint::new(vec![0.70, 0.15, 0.15]).unwrap(),
        SimplexPoint::new(vec![0.15, 0.70, 0.15]).unwrap(),
        SimplexPoint::new(vec![0.15, 0.15, 0.70]).unwrap(),
    ];
    let schedules = Schedules {
        vertices: VertexSchedule::Constant(30),
        quantization: QuantizationSchedule::SqrtOfLength,
    };
    let budget = Budget {
        generations: Some(3),
        max_length: Some(2_000_000),
    };
    let (seq, trace) = construct_polytope_boundary(&verts, &schedules, &budget).unwrap();
    for s in &trace.segments {
        assert!(s.skipped || s.max_within_piece_deviation <= s.within_piece_bound + 1e-9);
        assert!(s.skipped || s.clipped || s.endpoint_error <= s.endpoint_bound + 1e-9);
    }
    let mut outline = verts.clone();
    outline.push(verts[0].clone());
    let last_gen_start = *trace.generation_starts.last().unwrap() as usize;
    let mut counts = [0u64; 3];
    let mut worst = 0.0f64;
    for (i, sym) in seq.iter().enumerate() {
        counts[(sym - 1) as usize] += 1;
        let n = i + 1;
        if n < last_gen_start {
            continue;
        }
        let nf = n as f64;
        let r = [
            counts[0] as f64 / nf,
            counts[1] as f64 / nf,
            counts[2] as f64 / nf,
        ];
        let d = min_distance_to_polyline(&r, &outline);
        let bound = 11.0 / nf.sqrt();
        worst = worst.max(d / bound);
    }
    println!(
        "triangle: length={} generations={:?} worst d/bound={:.4}",
        seq.len(),
        trace.generation_starts,
        worst
    );
    assert!(worst <= 1.0, "last-generation point left the bound: {worst}");
}

#[test]
fn conditional_window_respects_first_occurrence() {
    // B occurs late: the window starts no earlier than n_B even when the
    // policy asks for more.
    let mut syms = vec![1u16; 100];
    syms.extend([2u16; 20]);
    let seq = SymbolSequence::from_symbols(2, &syms).unwrap();
    let b = Event::new(2, &[2]).unwrap();
    let x = Gamble::new(vec![0.0, 1.0]).unwrap();
    let w = conditional_prevision_window(&seq, &x, &b, &TailPolicy::FixedStart(1)).unwrap();
    assert_eq!(w.start, 101);
    assert_eq!(w.hi, 1.0);
    assert_eq!(w.lo, 1.0);
}

#[test]
fn prevision_window_matches_series_route() {
    let seq = von_mises_doubling(4096);
    let x = Gamble::new(vec![0.25, -1.5]).unwrap();
    let policy = TailPolicy::Fraction(0.3);
    let series = running_average(&seq, &x).unwrap();
    let via_series = freqlab::analysis::window_extrema(&series, &policy).unwrap();
    let direct = prevision_window(&seq, &x, &policy).unwrap();
    assert_eq!(via_series.hi, direct.hi);
    assert_eq!(via_series.lo, direct.lo);
    assert_eq!(via_series.start, direct.start);
}
