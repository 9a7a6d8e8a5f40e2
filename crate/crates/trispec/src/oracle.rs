//! Brute-force reference spectrum from a ball in the group.
//!
//! Independent of the admissibility machinery: elements are generated as
//! products of generator powers, reduced to conjugacy classes by geometric
//! path-following, and compared with the enumeration pipeline.

use crate::hyperbolic_core::{classify_and_length, GroupData, Isometry, IsometryClass};
use crate::spectrum::{group_by_length, is_power_of, SpectrumEntry};
use crate::tiling::Tiling;
use crate::words::{CyclicWord, Letter, Syllable};
use std::collections::HashMap;

const GRID: f64 = 1e-7;

/// A group element with a word that produces it.
#[derive(Debug, Clone)]
pub struct BallElement {
    pub word: Vec<Syllable>,
    pub matrix: Isometry,
}

/// Sign-normalized matrix entries, so that `M` and `−M` coincide.
fn canonical(m: &Isometry) -> [f64; 4] {
    let mut e = m.m;
    let lead = e.iter().copied().find(|x| x.abs() > 1e-9).unwrap_or(1.0);
    if lead < 0.0 {
        for x in &mut e {
            *x = -*x;
        }
    }
    e
}

/// Hash keys to probe: each entry rounded, plus its neighbouring cell when the
/// entry sits close to a cell boundary.
fn probe_keys(e: &[f64; 4]) -> Vec<[i64; 4]> {
    let mut keys = vec![[0i64; 4]];
    for (i, x) in e.iter().enumerate() {
        let s = x / GRID;
        let k = s.round();
        let frac = s - k;
        let alt = if frac.abs() > 0.49 { Some(k + frac.signum()) } else { None };
        let mut next = Vec::with_capacity(keys.len() * 2);
        for key in &keys {
            let mut a = *key;
            a[i] = k as i64;
            next.push(a);
            if let Some(alt) = alt {
                let mut b = *key;
                b[i] = alt as i64;
                next.push(b);
            }
        }
        keys = next;
    }
    keys
}

/// Matrix-keyed set with tolerance confirmation.
#[derive(Default)]
struct MatrixSet {
    map: HashMap<[i64; 4], Vec<[f64; 4]>>,
}

impl MatrixSet {
    /// Inserts and returns true when no element within tolerance was present.
    fn insert(&mut self, m: &Isometry) -> bool {
        let e = canonical(m);
        let tol = 1e-9 * m.norm_max().max(1.0);
        for k in probe_keys(&e) {
            if let Some(v) = self.map.get(&k) {
                if v.iter().any(|f| f.iter().zip(&e).all(|(a, b)| (a - b).abs() <= tol)) {
                    return false;
                }
            }
        }
        let key = e.map(|x| (x / GRID).round() as i64);
        self.map.entry(key).or_default().push(e);
        true
    }
}

/// Distinct elements given by alternating words of at most `n_syllables` syllables.
pub fn ball_elements(gd: &GroupData, p: u32, q: u32, n_syllables: usize) -> Vec<BallElement> {
    let mut seen = MatrixSet::default();
    seen.insert(&Isometry::identity());
    let mut out = Vec::new();
    // Frontier entries are distinct per (matrix, last letter): the last letter decides the extensions.
    let mut frontier_keys: [MatrixSet; 2] = Default::default();
    let mut frontier: Vec<BallElement> = vec![BallElement { word: vec![], matrix: Isometry::identity() }];
    for _ in 0..n_syllables {
        let mut next = Vec::new();
        for el in &frontier {
            let letters: &[Letter] = match el.word.last() {
                None => &[Letter::A, Letter::B],
                Some(s) if s.letter == Letter::A => &[Letter::B],
                Some(_) => &[Letter::A],
            };
            for &l in letters {
                let max = if l == Letter::A { p } else { q };
                for e in 1..max {
                    let g = match l {
                        Letter::A => gd.gen_a.pow(e as i64),
                        Letter::B => gd.gen_b.pow(-(e as i64)),
                    };
                    let m = el.matrix.mul(&g);
                    let slot = if l == Letter::A { 0 } else { 1 };
                    if !frontier_keys[slot].insert(&m) {
                        continue;
                    }
                    let mut word = el.word.clone();
                    word.push(Syllable::new(l, e));
                    let be = BallElement { word, matrix: m };
                    if seen.insert(&m) {
                        out.push(be.clone());
                    }
                    next.push(be);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Shortest translation length among two-syllable elements `a^e b^f`.
pub fn min_edge_length(tiling: &Tiling) -> f64 {
    let gd = &tiling.gd;
    let t = tiling.triplet();
    let mut best = f64::INFINITY;
    for e in 1..t.p {
        for f in 1..t.q {
            let m = gd.gen_a.pow(e as i64).mul(&gd.gen_b.pow(-(f as i64)));
            let cl = classify_and_length(&m);
            if cl.class == IsometryClass::Hyperbolic {
                best = best.min(cl.length);
            }
        }
    }
    best
}

/// Heuristic ball radius in syllables for classes of length at most `ell0`:
/// `2·ceil(ell0/ℓ_min) + 4` with `ℓ_min` from [`min_edge_length`].
pub fn ball_radius(tiling: &Tiling, ell0: f64) -> usize {
    2 * (ell0 / min_edge_length(tiling)).ceil() as usize + 4
}

/// Reference spectrum up to `ell0`, with the exceptional class `w_L` folded into `w_R`.
pub fn brute_spectrum(tiling: &Tiling, pair: (&CyclicWord, &CyclicWord), ell0: f64, n_syllables: usize) -> Vec<SpectrumEntry> {
    use rayon::prelude::*;
    let (w_l, w_r) = pair;
    let t = tiling.triplet();
    let ball = ball_elements(&tiling.gd, t.p, t.q, n_syllables);
    let coded: Vec<(f64, CyclicWord)> = ball
        .par_iter()
        .filter_map(|el| {
            let cl = classify_and_length(&el.matrix);
            if cl.class != IsometryClass::Hyperbolic || cl.length > ell0 + 1e-9 {
                return None;
            }
            let w = tiling.code_of_element(&el.matrix).ok()?;
            Some((cl.length, w))
        })
        .collect();
    let mut classes: HashMap<CyclicWord, f64> = HashMap::new();
    for (len, w) in coded {
        // Both codes of the exceptional class are recorded under w_R.
        let w = if is_power_of(&w, w_l) { w_r.power(w.primitive_root().1) } else { w };
        classes.entry(w).or_insert(len);
    }
    group_by_length(classes.into_iter().map(|(w, l)| (l, w)).collect())
}

/// Differences between two spectra.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectrumDiff {
    /// Lengths present in only one of the spectra.
    pub missing_in_left: Vec<f64>,
    pub missing_in_right: Vec<f64>,
    /// `(length, left multiplicity, right multiplicity)` where they disagree.
    pub multiplicity_mismatch: Vec<(f64, usize, usize)>,
}

impl SpectrumDiff {
    pub fn is_empty(&self) -> bool {
        self.missing_in_left.is_empty() && self.missing_in_right.is_empty() && self.multiplicity_mismatch.is_empty()
    }
}

/// Compares two ascending spectra at relative tolerance `tol`.
pub fn compare_spectra(left: &[SpectrumEntry], right: &[SpectrumEntry], tol: f64) -> SpectrumDiff {
    let mut diff = SpectrumDiff::default();
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        match (left.get(i), right.get(j)) {
            (Some(a), Some(b)) if (a.length - b.length).abs() <= tol * a.length.max(1.0) => {
                if a.multiplicity != b.multiplicity {
                    diff.multiplicity_mismatch.push((a.length, a.multiplicity, b.multiplicity));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a.length < b.length => {
                diff.missing_in_right.push(a.length);
                i += 1;
            }
            (Some(_), Some(b)) => {
                diff.missing_in_left.push(b.length);
                j += 1;
            }
            (Some(a), None) => {
                diff.missing_in_right.push(a.length);
                i += 1;
            }
            (None, Some(b)) => {
                diff.missing_in_left.push(b.length);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    diff
}
