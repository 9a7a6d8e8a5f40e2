use std::collections::{HashMap, HashSet};
use trispec::hyperbolic_core::*;
use trispec::oracle::*;
use trispec::spectrum::*;
use trispec::tiling::Tiling;
use trispec::words::*;

fn setup(p: u32, q: u32, r: u32) -> (Tiling, LimitingWords) {
    let til = Tiling::new(Triplet::new(p, q, r).unwrap()).unwrap();
    let lw = trispec::constants::build_limiting_words(&til).unwrap();
    (til, lw)
}

fn same_up_to_sign(a: &Isometry, b: &Isometry) -> bool {
    let tol = 1e-8 * a.norm_max().max(1.0);
    a.approx_eq(b, tol) || a.approx_eq(&Isometry::new(-b.m[0], -b.m[1], -b.m[2], -b.m[3]), tol)
}

#[test]
fn radius_one_ball_is_the_generator_powers() {
    let (til, _) = setup(3, 3, 7);
    let ball = ball_elements(&til.gd, 3, 3, 1);
    let mut words: Vec<String> = ball.iter().map(|e| e.word.iter().map(|s| s.to_string()).collect()).collect();
    words.sort();
    assert_eq!(words, vec!["a", "a2", "b", "b2"]);
}

#[test]
fn ball_grows_and_collapses_relations() {
    let (til, _) = setup(3, 3, 7);
    let sizes: Vec<usize> = (1..=8).map(|n| ball_elements(&til.gd, 3, 3, n).len()).collect();
    for pair in sizes.windows(2) {
        assert!(pair[0] < pair[1]);
    }
    // With two exponents per letter there are 2·(2 + 4 + … + 2^n) alternating words.
    let words = |n: u32| 2 * (2u32.pow(n + 1) - 2) as usize;
    assert_eq!(sizes[5], words(6));
    // (a b²)^7 = ±Id forces coincidences among words of eight syllables.
    assert!(sizes[7] < words(8));
}

#[test]
fn ball_is_closed_under_inversion() {
    let (til, _) = setup(3, 4, 5);
    let ball = ball_elements(&til.gd, 3, 4, 5);
    for el in &ball {
        let inv = el.matrix.inverse();
        assert!(ball.iter().any(|o| same_up_to_sign(&o.matrix, &inv)), "{:?}", el.word);
    }
    for el in ball.iter().take(50) {
        assert!(same_up_to_sign(&el.matrix, &matrix_of_syllables(&el.word, &til.gd)));
    }
}

#[test]
fn conjugate_elements_share_a_trace() {
    let (til, _) = setup(3, 3, 7);
    let mut traces: HashMap<CyclicWord, f64> = HashMap::new();
    for el in ball_elements(&til.gd, 3, 3, 8) {
        if classify_and_length(&el.matrix).class != IsometryClass::Hyperbolic {
            continue;
        }
        let code = til.code_of_element(&el.matrix).unwrap();
        let tr = el.matrix.trace().abs();
        let prev = *traces.entry(code.clone()).or_insert(tr);
        assert!((prev - tr).abs() <= 1e-9 * tr, "{code}");
    }
    assert!(traces.len() > 50);
}

#[test]
fn ball_codes_agree_with_enumeration() {
    let (til, lw) = setup(3, 3, 7);
    let t = til.triplet();
    let enumerated: HashSet<CyclicWord> = enumerate_admissible(t, &lw, 3).into_iter().collect();
    let mut codes = HashSet::new();
    for el in ball_elements(&til.gd, 3, 3, 8) {
        if classify_and_length(&el.matrix).class == IsometryClass::Hyperbolic {
            codes.insert(til.code_of_element(&el.matrix).unwrap());
        }
    }
    for code in &codes {
        assert!(is_admissible(code, &lw), "{code}");
        if polygon_count(code, t) <= 3 {
            assert!(enumerated.contains(code), "{code}");
        }
    }
    let exceptional = |w: &CyclicWord| is_power_of(w, &lw.w_l) || is_power_of(w, &lw.w_r);
    for w in enumerated.iter().filter(|w| w.syllables.len() <= 8 && !exceptional(w)) {
        let hyperbolic = classify_and_length(&matrix_of_word(w, &til.gd)).class == IsometryClass::Hyperbolic;
        assert!(!hyperbolic || codes.contains(w), "{w}");
    }
}

#[test]
fn compare_spectra_reports_differences() {
    let (til, lw) = setup(3, 3, 7);
    let c = stopping_constant(&til, &lw).unwrap().c;
    let s = length_spectrum(&til, &lw, c, 5.0, SpectrumOptions::default()).unwrap().entries;
    assert!(compare_spectra(&s, &s, 1e-6).is_empty());
    let shorter = &s[..s.len() - 1];
    let d = compare_spectra(&s, shorter, 1e-6);
    assert_eq!(d.missing_in_right, vec![s.last().unwrap().length]);
    assert!(d.missing_in_left.is_empty() && d.multiplicity_mismatch.is_empty());
    let mut bumped = s.clone();
    bumped[0].multiplicity += 1;
    let d = compare_spectra(&s, &bumped, 1e-6);
    assert_eq!(d.multiplicity_mismatch, vec![(s[0].length, s[0].multiplicity, s[0].multiplicity + 1)]);
    assert!(!d.is_empty());
}

#[test]
fn brute_spectrum_below_the_systole_is_empty() {
    let (til, lw) = setup(3, 3, 7);
    assert!(brute_spectrum(&til, (&lw.w_l, &lw.w_r), 0.1, 6).is_empty());
}

#[test]
fn brute_spectrum_saturates() {
    let (til, lw) = setup(3, 3, 7);
    let radius = ball_radius(&til, 4.0);
    assert_eq!(radius, 2 * (4.0 / min_edge_length(&til)).ceil() as usize + 4);
    let a = brute_spectrum(&til, (&lw.w_l, &lw.w_r), 4.0, radius);
    let b = brute_spectrum(&til, (&lw.w_l, &lw.w_r), 4.0, radius + 2);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn oracle_matches_enumeration_for_345() {
    let (til, lw) = setup(3, 4, 5);
    let c = stopping_constant(&til, &lw).unwrap().c;
    let main = length_spectrum(&til, &lw, c, 5.0, SpectrumOptions::default()).unwrap().entries;
    let oracle = brute_spectrum(&til, (&lw.w_l, &lw.w_r), 5.0, ball_radius(&til, 5.0));
    assert!(!oracle.is_empty());
    let diff = compare_spectra(&main, &oracle, 1e-6);
    assert!(diff.is_empty(), "{diff:?}");
    for (a, b) in main.iter().zip(&oracle) {
        let wa: HashSet<_> = a.words.iter().collect();
        let wb: HashSet<_> = b.words.iter().collect();
        assert_eq!(wa, wb);
    }
}
