use approx::assert_abs_diff_eq;
use std::collections::HashSet;
use trispec::hyperbolic_core::*;
use trispec::spectrum::*;
use trispec::tiling::Tiling;
use trispec::words::*;

struct Setup {
    til: Tiling,
    lw: LimitingWords,
    c: f64,
}

fn setup(p: u32, q: u32, r: u32) -> Setup {
    let til = Tiling::new(Triplet::new(p, q, r).unwrap()).unwrap();
    let lw = trispec::constants::build_limiting_words(&til).unwrap();
    let c = stopping_constant(&til, &lw).unwrap().c;
    Setup { til, lw, c }
}

fn spectrum(s: &Setup, ell0: f64) -> SpectrumResult {
    length_spectrum(&s.til, &s.lw, s.c, ell0, SpectrumOptions::default()).unwrap()
}

#[test]
fn stopping_constant_is_positive_for_small_triplets() {
    for t in Triplet::all_up_to(9) {
        let til = Tiling::new(t).unwrap();
        let lw = trispec::constants::build_limiting_words(&til).unwrap();
        let report = stopping_constant(&til, &lw).unwrap();
        assert!(report.c > 0.0, "{t:?}");
        assert!(report.configurations.iter().all(|c| c.distance >= report.c && c.distance > 1e-12));
        assert_eq!(report.argmin.distance, report.c);
    }
}

#[test]
fn stopping_constant_values() {
    assert_abs_diff_eq!(setup(3, 3, 7).c, 0.868003, epsilon = 1e-6);
    assert_abs_diff_eq!(setup(3, 4, 4).c, 0.881374, epsilon = 1e-6);
    assert_abs_diff_eq!(setup(3, 4, 5).c, 0.976708, epsilon = 1e-6);
}

#[test]
fn configurations_cover_every_case_when_switches_exist() {
    let s = setup(4, 5, 6);
    let report = stopping_constant(&s.til, &s.lw).unwrap();
    let cases: HashSet<_> = report.configurations.iter().map(|c| c.case()).collect();
    for a in [PolygonKind::TypeI, PolygonKind::TypeII] {
        for b in [PolygonKind::TypeI, PolygonKind::TypeII] {
            assert!(cases.contains(&(a, b)), "missing case {a:?}/{b:?}");
        }
    }
    // Without a-switches two adjacent switches cannot occur.
    let s = setup(3, 3, 7);
    let report = stopping_constant(&s.til, &s.lw).unwrap();
    assert!(report.configurations.iter().all(|c| c.case() == (PolygonKind::TypeI, PolygonKind::TypeI)));
}

#[test]
fn perpendicular_geodesics_by_parity() {
    let s = setup(3, 3, 7);
    let t = s.til.triplet();
    let sy = parse_word("ba2ba2b2a2bab").unwrap().syllables;
    let path = FramePath::of_word(&sy, &s.til);
    let polys = complete_polygons(&sy, t);
    assert!(polys.iter().any(|d| d.n % 2 == 0) && polys.iter().any(|d| d.n % 2 == 1), "{polys:?}");
    for poly in &polys {
        let lp = lambda_perp(&path, poly, &s.til).unwrap();
        let near = (0..4000).map(|i| disk_distance(lp.foot, lp.geodesic.point_at(-20.0 + i as f64 * 0.01))).fold(f64::MAX, f64::min);
        assert!(near < 1e-2, "foot off the geodesic for {poly:?}");
        if poly.n % 2 == 0 {
            let k = poly.first_edge + poly.n / 2;
            assert!((lp.foot - path.tail_position(k, &s.til)).norm() < 1e-12);
        }
    }
    let bad = PolygonDescriptor { n: 40, first_edge: 0, side: Side::Left, kind: PolygonKind::TypeI, entry: trispec::tiling::VType::A };
    assert_eq!(lambda_perp(&path, &bad, &s.til).unwrap_err(), SpectrumError::NotContributing);
}

#[test]
fn perpendicular_geodesics_cross_the_closed_geodesic() {
    for (p, q, r) in [(3, 3, 7), (4, 5, 6)] {
        let s = setup(p, q, r);
        let t = s.til.triplet();
        for w in enumerate_admissible(t, &s.lw, 3).iter().step_by(5).take(20) {
            let m = matrix_of_word(w, &s.til.gd);
            let Ok(axis) = Geodesic::axis(&m) else { continue };
            let n = w.syllables.len();
            let sy: Vec<Syllable> = (0..3).flat_map(|_| w.syllables.iter().copied()).collect();
            let path = FramePath::of_word(&sy, &s.til);
            // Polygons of the middle period, seen from the start of that period.
            let back = path.frames[n].inverse();
            let axis = axis.apply(&back);
            for poly in complete_polygons(&sy, t).into_iter().filter(|d| (n..2 * n).contains(&d.first_edge)) {
                let lp = lambda_perp(&path, &poly, &s.til).unwrap();
                assert_eq!(geodesic_distance(&lp.geodesic.apply(&back), &axis).flag, DistanceFlag::Crossing, "{w} {poly:?}");
            }
        }
    }
}

#[test]
fn spectra_grow_by_prefix() {
    let s = setup(3, 3, 7);
    let small = spectrum(&s, 4.0);
    let large = spectrum(&s, 5.5);
    assert!(!small.entries.is_empty());
    assert!(small.entries.len() < large.entries.len());
    assert_eq!(small.entries[..], large.entries[..small.entries.len()]);
    assert_eq!(small.l0, (4.0 / s.c).ceil() as usize);
    for pair in large.entries.windows(2) {
        assert!(pair[0].length < pair[1].length);
    }
}

#[test]
fn entries_share_a_trace() {
    let s = setup(3, 4, 5);
    for e in spectrum(&s, 5.0).entries {
        assert_eq!(e.multiplicity, e.words.len());
        let traces: Vec<f64> = e.words.iter().map(|w| matrix_of_word(w, &s.til.gd).trace().abs()).collect();
        for tr in &traces {
            assert!((tr - traces[0]).abs() <= 1e-9 * traces[0]);
        }
        assert!(e.length <= 5.0 + 1e-9);
    }
}

#[test]
fn exceptional_pair_counts_once() {
    let s = setup(3, 3, 7);
    let len = classify_and_length(&matrix_of_word(&s.lw.w_r, &s.til.gd)).length;
    let result = spectrum(&s, len + 0.01);
    let entry = result.entries.iter().find(|e| (e.length - len).abs() < 1e-9).unwrap();
    assert!(entry.words.contains(&s.lw.w_r));
    assert!(!entry.words.contains(&s.lw.w_l));
    assert_eq!(entry.words.iter().filter(|w| is_power_of(w, &s.lw.w_r)).count(), 1);
}

#[test]
fn short_bounds_and_invalid_bounds() {
    let s = setup(3, 3, 7);
    assert!(spectrum(&s, 0.1).entries.is_empty());
    for bad in [0.0, -1.0, f64::NAN] {
        assert!(matches!(
            length_spectrum(&s.til, &s.lw, s.c, bad, SpectrumOptions::default()),
            Err(SpectrumError::NonPositiveLength(_))
        ));
    }
}

#[test]
fn folding_inverses_keeps_one_of_each_pair() {
    let s = setup(3, 4, 5);
    let plain = spectrum(&s, 4.5);
    let folded = length_spectrum(&s.til, &s.lw, s.c, 4.5, SpectrumOptions { fold_inverses: true }).unwrap();
    assert_eq!(plain.entries.len(), folded.entries.len());
    for (a, b) in plain.entries.iter().zip(&folded.entries) {
        assert!(b.multiplicity <= a.multiplicity && 2 * b.multiplicity >= a.multiplicity);
    }
}

#[test]
fn bound_holds_on_a_sweep_and_is_stable() {
    let s = setup(3, 3, 7);
    let a = validate_bound(&s.til, &s.lw, s.c, 8).unwrap();
    let b = validate_bound(&s.til, &s.lw, s.c, 8).unwrap();
    assert!(a.min_ratio >= s.c * (1.0 - 1e-9));
    assert_eq!(a.min_ratio, b.min_ratio);
    assert_eq!(a.argmin, b.argmin);
    assert!(a.words_checked > 0);
    let wr = classify_and_length(&matrix_of_word(&s.lw.w_r, &s.til.gd)).length / polygon_count(&s.lw.w_r, s.til.triplet()) as f64;
    assert!(wr >= s.c);
    // An inflated constant must be rejected with the offending word.
    assert!(matches!(validate_bound(&s.til, &s.lw, 2.0 * s.c, 8), Err(SpectrumError::BoundViolated { .. })));
}

#[test]
fn csv_and_json_round_trip() {
    let s = setup(3, 4, 5);
    let result = spectrum(&s, 4.5);
    let entries: Vec<SpectrumEntry> = result
        .entries
        .iter()
        .map(|e| SpectrumEntry { length: round_sig15(e.length), ..e.clone() })
        .collect();
    let csv = to_csv(&result.entries).unwrap();
    assert!(csv.starts_with("length,multiplicity,words\n"));
    assert_eq!(from_csv(&csv).unwrap(), entries);
    let meta = SpectrumMetadata {
        p: 3,
        q: 4,
        r: 5,
        ell0: 4.5,
        c: s.c,
        l0: result.l0,
        tool_version: "test".into(),
        source: "enumeration".into(),
        ball_radius: None,
    };
    let json = to_json(&meta, &result.entries).unwrap();
    let (m2, e2) = from_json(&json).unwrap();
    assert_eq!(m2, meta);
    assert_eq!(e2, entries);
    assert!(from_csv("length,multiplicity,words\n1.0,2,a2b*\n").is_err());
}

#[test]
fn grouping_uses_relative_tolerance() {
    let w1 = CyclicWord::parse("a2b").unwrap();
    let w2 = CyclicWord::parse("ab2").unwrap();
    let g = group_by_length(vec![(3.0, w2.clone()), (3.0 + 1e-12, w1.clone()), (3.1, w1.clone())]);
    assert_eq!(g.len(), 2);
    assert_eq!(g[0].multiplicity, 2);
    assert_eq!(g[0].words, vec![w1, w2]);
}
