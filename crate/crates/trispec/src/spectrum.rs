//! Stopping constant and the length-spectrum pipeline.

use crate::hyperbolic_core::{geodesic_distance, length_from_trace, DistanceFlag, Geodesic, Isometry, Triplet};
use crate::tiling::{Tiling, VType};
use crate::words::{
    for_each_admissible_from, matrix_of_word, turn_of, CyclicWord, EnumeratedWord, Letter, LimitingWords, Syllable, Turn,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Tolerance for counting a trace as hyperbolic in the spectrum.
pub const TRACE_FILTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("disjointness violated: consecutive perpendicular geodesics at distance {distance:e} in window {window}")]
    Disjointness { distance: f64, window: String },
    #[error("ell0 must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("bound violated by {word}: length {length} < c·L = {bound}")]
    BoundViolated { word: String, length: f64, bound: f64 },
    #[error("polygon is not contributing for this path")]
    NotContributing,
    #[error("no local configuration found")]
    NoConfiguration,
}

/// Side of the path on which a contributing polygon lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolygonKind {
    /// Shares two or more consecutive edges with the path.
    TypeI,
    /// Shares a single edge whose endpoints are both switches.
    TypeII,
}

/// A contributing polygon along a finite path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonDescriptor {
    /// Number of shared edges.
    pub n: usize,
    /// Index of the first shared edge; edge `k` enters vertex `k` of the window.
    pub first_edge: usize,
    pub side: Side,
    pub kind: PolygonKind,
    /// Type of the vertex at the start of the first shared edge.
    pub entry: VType,
}

impl PolygonDescriptor {
    /// Twice the index of the middle of the shared edges.
    fn middle2(&self) -> usize {
        2 * self.first_edge + self.n - 1
    }
}

/// A finite path given by edge frames: edge `k` is `frames[k]·[A0,B0]`,
/// traversed from a vertex of type `tails[k]`.
#[derive(Debug, Clone)]
pub struct FramePath {
    pub frames: Vec<Isometry>,
    pub tails: Vec<VType>,
}

impl FramePath {
    /// Path of a linear syllable word. Vertex `k` carries syllable `k`; the edge
    /// entering vertex 0 has the identity frame.
    pub fn of_word(sy: &[Syllable], tiling: &Tiling) -> FramePath {
        let gd = &tiling.gd;
        let mut h = Isometry::identity();
        let first = sy.first().map(|s| s.letter).unwrap_or(Letter::A);
        let mut frames = vec![h];
        let mut tails = vec![first.other().vtype()];
        for s in sy {
            let g = match s.letter {
                Letter::A => gd.gen_a.pow(s.exp as i64),
                Letter::B => gd.gen_b.pow(-(s.exp as i64)),
            };
            h = h.mul(&g);
            frames.push(h);
            tails.push(s.letter.vtype());
        }
        FramePath { frames, tails }
    }

    /// Centre of the polygon on the given side of edge `k`, in the disk.
    pub fn polygon_center(&self, k: usize, side: Side, tiling: &Tiling) -> Complex64 {
        let gd = &tiling.gd;
        let h = self.frames[k];
        let left_of_ab = h;
        let right_of_ab = h.mul(&gd.gen_a.inverse());
        let g = match (self.tails[k], side) {
            (VType::A, Side::Left) | (VType::B, Side::Right) => left_of_ab,
            (VType::A, Side::Right) | (VType::B, Side::Left) => right_of_ab,
        };
        crate::hyperbolic_core::to_disk(g.act_h(gd.c0))
    }

    /// Disk position of the tail of edge `k`.
    pub fn tail_position(&self, k: usize, tiling: &Tiling) -> Complex64 {
        let gd = &tiling.gd;
        let base = match self.tails[k] {
            VType::A => gd.a0,
            VType::B => gd.b0,
        };
        crate::hyperbolic_core::to_disk(self.frames[k].act_h(base))
    }
}

/// A perpendicular geodesic attached to a contributing polygon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaPerpData {
    pub polygon: PolygonDescriptor,
    pub geodesic: Geodesic,
    /// Point where the geodesic meets the middle vertex or middle edge.
    pub foot: Complex64,
}

/// The perpendicular geodesic of a contributing polygon along `path`.
///
/// For an even number of shared edges it joins the middle shared vertex to
/// its antipodal vertex in the polygon; for an odd number it is the strip
/// axis through the middle edge and its opposite edge.
pub fn lambda_perp(path: &FramePath, polygon: &PolygonDescriptor, tiling: &Tiling) -> Result<LambdaPerpData, SpectrumError> {
    if polygon.n == 0 || polygon.first_edge + polygon.n > path.frames.len() {
        return Err(SpectrumError::NotContributing);
    }
    if polygon.n % 2 == 1 {
        let k = polygon.first_edge + polygon.n / 2;
        let frame = path.frames[k];
        let geodesic = tiling.strip_axis(&frame);
        let (u, v) = edge_endpoints(path, k, tiling);
        let foot = crate::tiling::disk_midpoint(u, v);
        Ok(LambdaPerpData { polygon: *polygon, geodesic, foot })
    } else {
        // Middle vertex is the head of edge first_edge + n/2 − 1.
        let k = polygon.first_edge + polygon.n / 2;
        let m = path.tail_position(k, tiling);
        let c = path.polygon_center(k, polygon.side, tiling);
        // Antipode: rotation by π about the centre.
        let one = Complex64::new(1.0, 0.0);
        let to0 = |z: Complex64| (z - c) / (one - c.conj() * z);
        let from0 = |z: Complex64| (z + c) / (one + c.conj() * z);
        let anti = from0(-to0(m));
        let geodesic = Geodesic::through(m, anti).map_err(|_| SpectrumError::NotContributing)?;
        Ok(LambdaPerpData { polygon: *polygon, geodesic, foot: m })
    }
}

fn edge_endpoints(path: &FramePath, k: usize, tiling: &Tiling) -> (Complex64, Complex64) {
    let gd = &tiling.gd;
    let h = path.frames[k];
    (crate::hyperbolic_core::to_disk(h.act_h(gd.a0)), crate::hyperbolic_core::to_disk(h.act_h(gd.b0)))
}

/// Contributing polygons whose shared edges and both delimiting turns lie in the window.
///
/// Vertex `k` of the window carries syllable `k`; edge `k` enters vertex `k`.
pub fn complete_polygons(sy: &[Syllable], t: Triplet) -> Vec<PolygonDescriptor> {
    let turns: Vec<Turn> = sy.iter().map(|s| turn_of(*s, t)).collect();
    let m = turns.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < m {
        let cur = turns[i];
        if cur != Turn::Switch && turns[i - 1] != cur {
            let mut j = i;
            while j + 1 < m && turns[j + 1] == cur {
                j += 1;
            }
            if j + 1 < m {
                // Vertices i..=j turn the same way; shared edges enter i through leave j.
                out.push(PolygonDescriptor {
                    n: j - i + 2,
                    first_edge: i,
                    side: if cur == Turn::Left { Side::Left } else { Side::Right },
                    kind: PolygonKind::TypeI,
                    entry: sy[i - 1].letter.vtype(),
                });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    for k in 0..m.saturating_sub(1) {
        if turns[k] == Turn::Switch && turns[k + 1] == Turn::Switch {
            out.push(PolygonDescriptor {
                n: 1,
                first_edge: k + 1,
                side: Side::Left,
                kind: PolygonKind::TypeII,
                entry: sy[k].letter.vtype(),
            });
        }
    }
    out.sort_by_key(|d| d.middle2());
    out
}

/// One pair of consecutive contributing polygons in a local window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Configuration {
    /// The window, serialized as a linear syllable word.
    pub local_word: String,
    pub polygons: (PolygonDescriptor, PolygonDescriptor),
    pub distance: f64,
}

impl Configuration {
    /// Case label `(kind of first, kind of second)`.
    pub fn case(&self) -> (PolygonKind, PolygonKind) {
        (self.polygons.0.kind, self.polygons.1.kind)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoppingConstantReport {
    pub triplet: Triplet,
    pub c: f64,
    pub argmin: Configuration,
    pub configurations: Vec<Configuration>,
    /// Windows are checked with finite-prefix admissibility, a superset of the
    /// windows that occur in admissible paths; the minimum is therefore a valid lower bound.
    pub window_cap: usize,
}

fn word_string(sy: &[Syllable]) -> String {
    sy.iter().map(|s| s.to_string()).collect()
}

/// Necessary condition for a window to occur inside an admissible path.
fn window_admissible(sy: &[Syllable], lw: &LimitingWords) -> bool {
    let letters = crate::words::expand(sy);
    (0..letters.len()).all(|i| {
        let (lo, hi) = match letters[i] {
            Letter::A => (&lw.u_l, &lw.u_r),
            Letter::B => (&lw.v_l, &lw.v_r),
        };
        let cmp = |b: &crate::words::PeriodicWord| {
            letters[i..]
                .iter()
                .enumerate()
                .map(|(k, l)| l.cmp(&b.letter_at(k)))
                .find(|o| *o != Ordering::Equal)
        };
        cmp(lo) != Some(Ordering::Less) && cmp(hi) != Some(Ordering::Greater)
    })
}

/// Minimum distance between consecutive perpendicular geodesics over all local windows.
pub fn stopping_constant(tiling: &Tiling, lw: &LimitingWords) -> Result<StoppingConstantReport, SpectrumError> {
    use rayon::prelude::*;
    let t = tiling.triplet();
    let cap = 2 * t.r as usize + 4;
    let mut seeds = Vec::new();
    for first in [Letter::A, Letter::B] {
        let max0 = if first == Letter::A { t.p - 1 } else { t.q - 1 };
        let max1 = if first == Letter::A { t.q - 1 } else { t.p - 1 };
        for e0 in 1..=max0 {
            for e1 in 1..=max1 {
                seeds.push(vec![Syllable::new(first, e0), Syllable::new(first.other(), e1)]);
            }
        }
    }
    let results: Vec<Result<Vec<Configuration>, SpectrumError>> = seeds
        .into_par_iter()
        .map(|seed| {
            let mut out = Vec::new();
            let mut sy = seed;
            window_dfs(&mut sy, tiling, lw, cap, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut configurations = Vec::new();
    for r in results {
        configurations.extend(r?);
    }
    let argmin = configurations
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .cloned()
        .ok_or(SpectrumError::NoConfiguration)?;
    Ok(StoppingConstantReport { triplet: t, c: argmin.distance, argmin, configurations, window_cap: cap })
}

fn window_dfs(
    sy: &mut Vec<Syllable>,
    tiling: &Tiling,
    lw: &LimitingWords,
    cap: usize,
    out: &mut Vec<Configuration>,
) -> Result<(), SpectrumError> {
    let t = tiling.triplet();
    if !window_admissible(sy, lw) {
        return Ok(());
    }
    let turns: Vec<Turn> = sy.iter().map(|s| turn_of(*s, t)).collect();
    // The window must open exactly where its first polygon begins.
    let opens = (turns[1] != Turn::Switch && turns[0] != turns[1]) || (turns[0] == Turn::Switch && turns[1] == Turn::Switch);
    if !opens {
        return Ok(());
    }
    let polys = complete_polygons(sy, t);
    if polys.len() >= 2 {
        let path = FramePath::of_word(sy, tiling);
        let first_start = polys[0].first_edge;
        if first_start <= 1 {
            for pair in polys.windows(2) {
                let l1 = lambda_perp(&path, &pair[0], tiling)?;
                let l2 = lambda_perp(&path, &pair[1], tiling)?;
                let d = geodesic_distance(&l1.geodesic, &l2.geodesic);
                if d.flag != DistanceFlag::Disjoint || d.distance <= 1e-12 {
                    return Err(SpectrumError::Disjointness { distance: d.distance, window: word_string(sy) });
                }
                out.push(Configuration { local_word: word_string(sy), polygons: (pair[0], pair[1]), distance: d.distance });
            }
        }
        return Ok(());
    }
    if sy.len() >= cap {
        return Ok(());
    }
    let next = sy[sy.len() - 1].letter.other();
    let max_e = if next == Letter::A { t.p - 1 } else { t.q - 1 };
    for e in 1..=max_e {
        sy.push(Syllable::new(next, e));
        window_dfs(sy, tiling, lw, cap, out)?;
        sy.pop();
    }
    Ok(())
}

/// A length with its oriented conjugacy classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub length: f64,
    pub multiplicity: usize,
    pub words: Vec<CyclicWord>,
}

/// Groups `(length, word)` pairs by relative length tolerance `1e-9`, ascending.
pub fn group_by_length(mut items: Vec<(f64, CyclicWord)>) -> Vec<SpectrumEntry> {
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.letters().cmp(&b.1.letters())));
    let mut out: Vec<SpectrumEntry> = Vec::new();
    for (len, w) in items {
        match out.last_mut() {
            Some(e) if (len - e.length).abs() <= 1e-9 * e.length.max(1.0) => {
                e.words.push(w);
                e.multiplicity += 1;
            }
            _ => out.push(SpectrumEntry { length: len, multiplicity: 1, words: vec![w] }),
        }
    }
    for e in &mut out {
        e.words.sort_by_key(|w| w.letters());
    }
    out
}

/// True when `w` is a positive power of `root`.
pub fn is_power_of(w: &CyclicWord, root: &CyclicWord) -> bool {
    let (wr, _) = w.primitive_root();
    let (rr, _) = root.primitive_root();
    wr == rr
}

/// Options of the spectrum pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectrumOptions {
    /// Pair each class with its inverse and keep one representative per pair.
    pub fold_inverses: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub entries: Vec<SpectrumEntry>,
    pub c: f64,
    pub l0: usize,
    pub words_enumerated: usize,
}

/// Lengths of closed geodesics up to `ell0` by bounded word enumeration.
pub fn length_spectrum(
    tiling: &Tiling,
    lw: &LimitingWords,
    c: f64,
    ell0: f64,
    opts: SpectrumOptions,
) -> Result<SpectrumResult, SpectrumError> {
    if ell0 <= 0.0 || !ell0.is_finite() {
        return Err(SpectrumError::NonPositiveLength(ell0));
    }
    let l0 = (ell0 / c).ceil() as usize;
    let parts = sweep(tiling, lw, l0, |w, acc: &mut (usize, Vec<(f64, CyclicWord)>)| {
        acc.0 += 1;
        let tr = w.matrix.trace().abs();
        if tr <= 2.0 + TRACE_FILTER {
            return;
        }
        let len = length_from_trace(tr);
        if len <= ell0 + 1e-9 {
            let cw = CyclicWord { syllables: w.syllables.to_vec() };
            if !is_power_of(&cw, &lw.w_l) {
                acc.1.push((len, cw));
            }
        }
    });
    let words_enumerated = parts.iter().map(|p| p.0).sum();
    let items: Vec<(f64, CyclicWord)> = parts.into_iter().flat_map(|p| p.1).collect();
    let items = if opts.fold_inverses { fold_inverses(tiling, items) } else { items };
    Ok(SpectrumResult { entries: group_by_length(items), c, l0, words_enumerated })
}

/// Runs `f` over every admissible word with polygon count `≤ l_max`, one
/// accumulator per first block, in parallel; accumulators come back in block order.
fn sweep<A, F>(tiling: &Tiling, lw: &LimitingWords, l_max: usize, f: F) -> Vec<A>
where
    A: Default + Send,
    F: Fn(&EnumeratedWord, &mut A) + Sync,
{
    use rayon::prelude::*;
    let t = tiling.triplet();
    let n_blocks = ((t.p - 1) * (t.q - 1)) as usize;
    (0..n_blocks)
        .into_par_iter()
        .map(|first| {
            let mut acc = A::default();
            for_each_admissible_from(t, &tiling.gd, lw, l_max, first, |w| f(w, &mut acc));
            acc
        })
        .collect()
}

/// Keeps one class out of each inverse pair (the one whose word sorts first).
pub fn fold_inverses(tiling: &Tiling, items: Vec<(f64, CyclicWord)>) -> Vec<(f64, CyclicWord)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut items = items;
    items.sort_by_key(|(_, w)| w.letters());
    for (l, w) in items {
        if seen.contains(&w) {
            continue;
        }
        let inv = tiling.code_of_element(&matrix_of_word(&w, &tiling.gd).inverse()).ok();
        seen.insert(w.clone());
        if let Some(i) = inv {
            seen.insert(i);
        }
        out.push((l, w));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub c: f64,
    pub l_max: usize,
    pub words_checked: usize,
    /// Admissible words skipped because their trace is not hyperbolic.
    pub non_hyperbolic: usize,
    pub min_ratio: f64,
    pub argmin: Option<String>,
}

#[derive(Default)]
struct BoundAcc {
    checked: usize,
    non_hyperbolic: usize,
    min_ratio: f64,
    argmin: Option<Vec<Syllable>>,
    violation: Option<(Vec<Syllable>, f64, usize)>,
}

/// Checks `length ≥ c·L` over every admissible word with `L ≤ l_max`.
///
/// The minimum ratio is attained with equality by some words, so the check
/// allows a relative slack of `1e-9`.
pub fn validate_bound(tiling: &Tiling, lw: &LimitingWords, c: f64, l_max: usize) -> Result<BoundReport, SpectrumError> {
    let parts = sweep(tiling, lw, l_max, |w, acc: &mut BoundAcc| {
        let tr = w.matrix.trace().abs();
        if tr <= 2.0 + TRACE_FILTER {
            acc.non_hyperbolic += 1;
            return;
        }
        acc.checked += 1;
        let len = length_from_trace(tr);
        let ratio = len / w.polygon_count as f64;
        if acc.checked == 1 || ratio < acc.min_ratio {
            acc.min_ratio = ratio;
            acc.argmin = Some(w.syllables.to_vec());
        }
        if ratio < c * (1.0 - 1e-9) && acc.violation.is_none() {
            acc.violation = Some((w.syllables.to_vec(), len, w.polygon_count));
        }
    });
    let mut report = BoundReport { c, l_max, words_checked: 0, non_hyperbolic: 0, min_ratio: f64::INFINITY, argmin: None };
    for acc in parts {
        if let Some((sy, len, l)) = acc.violation {
            return Err(SpectrumError::BoundViolated { word: format!("{}*", word_string(&sy)), length: len, bound: c * l as f64 });
        }
        report.words_checked += acc.checked;
        report.non_hyperbolic += acc.non_hyperbolic;
        if acc.checked > 0 && acc.min_ratio < report.min_ratio {
            report.min_ratio = acc.min_ratio;
            report.argmin = acc.argmin.map(|sy| format!("{}*", word_string(&sy)));
        }
    }
    Ok(report)
}

/// Metadata attached to serialized spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub ell0: f64,
    pub c: f64,
    #[serde(rename = "L0")]
    pub l0: usize,
    pub tool_version: String,
    /// `enumeration` or `oracle`.
    pub source: String,
    /// Ball radius in syllables, for oracle spectra.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ball_radius: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntryRecord {
    length: f64,
    multiplicity: usize,
    words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpectrumDocument {
    metadata: SpectrumMetadata,
    entries: Vec<EntryRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad record: {0}")]
    Record(String),
}

/// `x` rounded to 15 significant digits, the precision used in all outputs.
pub fn round_sig15(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn record(e: &SpectrumEntry) -> EntryRecord {
    EntryRecord { length: round_sig15(e.length), multiplicity: e.multiplicity, words: e.words.iter().map(|w| w.to_string()).collect() }
}

fn entry(r: EntryRecord) -> Result<SpectrumEntry, FormatError> {
    let words = r
        .words
        .iter()
        .map(|w| CyclicWord::parse(w).map_err(|e| FormatError::Record(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if words.len() != r.multiplicity {
        return Err(FormatError::Record(format!("multiplicity {} but {} words", r.multiplicity, words.len())));
    }
    Ok(SpectrumEntry { length: r.length, multiplicity: r.multiplicity, words })
}

/// CSV with header `length,multiplicity,words`; words joined by `|`.
pub fn to_csv(entries: &[SpectrumEntry]) -> Result<String, FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["length", "multiplicity", "words"])?;
    for e in entries {
        let r = record(e);
        w.write_record([r.length.to_string(), r.multiplicity.to_string(), r.words.join("|")])?;
    }
    let bytes = w.into_inner().map_err(|e| FormatError::Record(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv(text: &str) -> Result<Vec<SpectrumEntry>, FormatError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let field = |i: usize| row.get(i).ok_or_else(|| FormatError::Record(format!("missing column {i}")));
        let length = field(0)?.parse::<f64>().map_err(|e| FormatError::Record(e.to_string()))?;
        let multiplicity = field(1)?.parse::<usize>().map_err(|e| FormatError::Record(e.to_string()))?;
        let words = field(2)?.split('|').filter(|s| !s.is_empty()).map(str::to_string).collect();
        out.push(entry(EntryRecord { length, multiplicity, words })?);
    }
    Ok(out)
}

pub fn to_json(metadata: &SpectrumMetadata, entries: &[SpectrumEntry]) -> Result<String, FormatError> {
    let doc = SpectrumDocument { metadata: metadata.clone(), entries: entries.iter().map(record).collect() };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json(text: &str) -> Result<(SpectrumMetadata, Vec<SpectrumEntry>), FormatError> {
    let doc: SpectrumDocument = serde_json::from_str(text)?;
    let entries = doc.entries.into_iter().map(entry).collect::<Result<Vec<_>, _>>()?;
    Ok((doc.metadata, entries))
}
