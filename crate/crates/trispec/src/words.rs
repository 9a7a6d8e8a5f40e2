//! Syllable words over `{a, b}`: serialization, lexicographic order,
//! admissibility, enumeration, zigzag factorization and combinatorial length.

use crate::hyperbolic_core::{GroupData, Isometry, Triplet};
use crate::tiling::VType;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }
    /// Type of the vertex at which this letter is recorded.
    pub fn vtype(self) -> VType {
        match self {
            Letter::A => VType::A,
            Letter::B => VType::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub letter: Letter,
    pub exp: u32,
}

impl Syllable {
    pub fn new(letter: Letter, exp: u32) -> Self {
        Syllable { letter, exp }
    }
    pub fn a(exp: u32) -> Self {
        Syllable::new(Letter::A, exp)
    }
    pub fn b(exp: u32) -> Self {
        Syllable::new(Letter::B, exp)
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.letter.as_char())
        } else {
            write!(f, "{}{}", self.letter.as_char(), self.exp)
        }
    }
}

/// Expands syllables into single letters.
pub fn expand(sy: &[Syllable]) -> Vec<Letter> {
    sy.iter().flat_map(|s| std::iter::repeat(s.letter).take(s.exp as usize)).collect()
}

/// Run-length encodes letters into syllables.
pub fn compress(letters: &[Letter]) -> Vec<Syllable> {
    let mut out: Vec<Syllable> = Vec::new();
    for &l in letters {
        match out.last_mut() {
            Some(s) if s.letter == l => s.exp += 1,
            _ => out.push(Syllable::new(l, 1)),
        }
    }
    out
}

fn syllables_to_string(sy: &[Syllable]) -> String {
    sy.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("cyclic word must alternate letters cyclically and be nonempty")]
    NotCyclic,
    #[error("exponent {exp} of {letter} out of range 1..={max}")]
    Exponent { letter: char, exp: u32, max: u32 },
    #[error("word {0} is not admissible")]
    NotAdmissible(String),
}

/// A parsed serialized word: syllables plus whether a trailing `*` marked it periodic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedWord {
    pub syllables: Vec<Syllable>,
    pub periodic: bool,
}

/// Parses `a2ba2b2*`-style serializations.
pub fn parse_word(s: &str) -> Result<ParsedWord, WordError> {
    let chars: Vec<char> = s.trim().chars().collect();
    let mut i = 0;
    let mut syllables: Vec<Syllable> = Vec::new();
    let mut periodic = false;
    while i < chars.len() {
        let c = chars[i];
        let letter = match c {
            'a' => Letter::A,
            'b' => Letter::B,
            '*' if i + 1 == chars.len() => {
                periodic = true;
                i += 1;
                continue;
            }
            '*' => return Err(WordError::Parse { pos: i, msg: "'*' is only allowed at the end".into() }),
            _ => return Err(WordError::Parse { pos: i, msg: format!("unexpected character '{c}'") }),
        };
        let start = i;
        i += 1;
        let digits_start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let exp = if i > digits_start {
            let txt: String = chars[digits_start..i].iter().collect();
            txt.parse::<u32>()
                .map_err(|_| WordError::Parse { pos: digits_start, msg: "exponent too large".into() })?
        } else {
            1
        };
        if exp == 0 {
            return Err(WordError::Parse { pos: digits_start, msg: "zero exponent".into() });
        }
        match syllables.last_mut() {
            Some(last) if last.letter == letter => {
                return Err(WordError::Parse { pos: start, msg: "repeated letter; merge the exponents".into() })
            }
            _ => syllables.push(Syllable::new(letter, exp)),
        }
    }
    if syllables.is_empty() {
        return Err(WordError::Parse { pos: 0, msg: "empty word".into() });
    }
    Ok(ParsedWord { syllables, periodic })
}

/// Conjugacy-class representative: alternating syllables, even count, least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord {
    pub syllables: Vec<Syllable>,
}

impl CyclicWord {
    pub fn from_syllables(sy: Vec<Syllable>) -> Result<Self, WordError> {
        let n = sy.len();
        if n == 0 || n % 2 == 1 {
            return Err(WordError::NotCyclic);
        }
        for i in 0..n {
            if sy[i].letter == sy[(i + 1) % n].letter || sy[i].exp == 0 {
                return Err(WordError::NotCyclic);
            }
        }
        Ok(CyclicWord { syllables: canonical_rotation(&sy) })
    }

    /// Parses and canonicalizes; the trailing `*` is optional.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        Self::from_syllables(parse_word(s)?.syllables)
    }

    pub fn check_exponents(&self, t: Triplet) -> Result<(), WordError> {
        for s in &self.syllables {
            let max = match s.letter {
                Letter::A => t.p - 1,
                Letter::B => t.q - 1,
            };
            if s.exp < 1 || s.exp > max {
                return Err(WordError::Exponent { letter: s.letter.as_char(), exp: s.exp, max });
            }
        }
        Ok(())
    }

    pub fn letters(&self) -> Vec<Letter> {
        expand(&self.syllables)
    }

    pub fn letter_len(&self) -> usize {
        self.syllables.iter().map(|s| s.exp as usize).sum()
    }

    pub fn power(&self, k: usize) -> CyclicWord {
        let mut sy = Vec::with_capacity(self.syllables.len() * k);
        for _ in 0..k {
            sy.extend_from_slice(&self.syllables);
        }
        CyclicWord { syllables: canonical_rotation(&sy) }
    }

    /// Smallest `d` with `self = root^d` for a shorter cyclic word `root`.
    pub fn primitive_root(&self) -> (CyclicWord, usize) {
        let n = self.syllables.len();
        for len in (2..=n).step_by(2) {
            if n % len == 0 && (0..n).all(|i| self.syllables[i] == self.syllables[i % len]) {
                return (CyclicWord { syllables: canonical_rotation(&self.syllables[..len]) }, n / len);
            }
        }
        (self.clone(), 1)
    }

    pub fn as_periodic(&self) -> PeriodicWord {
        PeriodicWord { prefix: Vec::new(), period: self.letters() }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*", syllables_to_string(&self.syllables))
    }
}

/// Rotation at a syllable boundary with the lexicographically least letter expansion.
pub fn canonical_rotation(sy: &[Syllable]) -> Vec<Syllable> {
    let n = sy.len();
    let mut best: Option<(Vec<Letter>, usize)> = None;
    for k in 0..n {
        let rot: Vec<Syllable> = sy[k..].iter().chain(sy[..k].iter()).copied().collect();
        let ex = expand(&rot);
        if best.as_ref().is_none_or(|(b, _)| ex < *b) {
            best = Some((ex, k));
        }
    }
    let k = best.map(|(_, k)| k).unwrap_or(0);
    sy[k..].iter().chain(sy[..k].iter()).copied().collect()
}

/// An eventually periodic one-sided word `prefix · period^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicWord {
    pub prefix: Vec<Letter>,
    pub period: Vec<Letter>,
}

impl PeriodicWord {
    pub fn pure(period: Vec<Letter>) -> Self {
        PeriodicWord { prefix: Vec::new(), period }
    }

    pub fn from_syllables(sy: &[Syllable]) -> Self {
        Self::pure(expand(sy))
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn len_hint(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn first_letters(&self, n: usize) -> Vec<Letter> {
        (0..n).map(|i| self.letter_at(i)).collect()
    }

    /// Minimal eventually periodic description of a finite letter sequence.
    ///
    /// A candidate period must repeat at least three times at the end of the
    /// sequence; among those the shortest period wins, then the shortest prefix.
    pub fn detect(seq: &[Letter]) -> PeriodicWord {
        let n = seq.len();
        for per in 1..=n / 3 {
            let mut pre = n - per;
            while pre > 0 && seq[pre - 1] == seq[pre - 1 + per] {
                pre -= 1;
            }
            if n - pre >= 3 * per {
                return PeriodicWord { prefix: seq[..pre].to_vec(), period: seq[pre..pre + per].to_vec() };
            }
        }
        PeriodicWord::pure(seq.to_vec())
    }

    /// The period rotated so that it starts at a syllable boundary and prefix absorbed where possible.
    pub fn period_syllables(&self) -> Vec<Syllable> {
        compress(&self.period)
    }
}

impl fmt::Display for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            write!(f, "{}*", syllables_to_string(&compress(&self.period)))
        } else {
            write!(f, "{}({})*", syllables_to_string(&compress(&self.prefix)), syllables_to_string(&compress(&self.period)))
        }
    }
}

/// Lexicographic comparison with `a < b` over the first `|u| + |v|` letters.
pub fn lex_cmp(u: &PeriodicWord, v: &PeriodicWord) -> Ordering {
    let n = u.len_hint() + v.len_hint();
    for i in 0..n {
        match u.letter_at(i).cmp(&v.letter_at(i)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

pub fn lex_less(u: &PeriodicWord, v: &PeriodicWord) -> bool {
    lex_cmp(u, v) == Ordering::Less
}

/// The four boundary words of the admissibility criterion plus the exceptional pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitingWords {
    pub u_l: PeriodicWord,
    pub u_r: PeriodicWord,
    pub v_l: PeriodicWord,
    pub v_r: PeriodicWord,
    pub w_l: CyclicWord,
    pub w_r: CyclicWord,
}

/// Words written in closed form for each parity of `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableWords {
    pub u_l: PeriodicWord,
    pub v_r: PeriodicWord,
    /// The left exceptional word expanded literally from its closed form.
    pub w_l_literal: CyclicWord,
    /// The left exceptional word with the last `a^{p−1}` of the r-odd form
    /// lowered to `a^{p−2}`; equal to the literal form when `r` is even.
    pub w_l: CyclicWord,
    pub w_r: CyclicWord,
}

fn rep(out: &mut Vec<Syllable>, block: &[Syllable], k: u32) {
    for _ in 0..k {
        for &s in block {
            push_merge(out, s);
        }
    }
}

fn push_merge(out: &mut Vec<Syllable>, s: Syllable) {
    match out.last_mut() {
        Some(l) if l.letter == s.letter => l.exp += s.exp,
        _ => out.push(s),
    }
}

fn cyclic_merge(mut sy: Vec<Syllable>) -> Vec<Syllable> {
    while sy.len() > 1 && sy[0].letter == sy[sy.len() - 1].letter {
        let last = sy.pop().expect("nonempty");
        sy[0].exp += last.exp;
    }
    sy
}

pub fn table_words(t: Triplet) -> TableWords {
    let (p, q, r) = (t.p, t.q, t.r);
    let (a, b) = (Syllable::a, Syllable::b);
    let mut u_l = Vec::new();
    let mut v_r = Vec::new();
    let mut w_l_lit = Vec::new();
    let mut w_l = Vec::new();
    let mut w_r = Vec::new();
    if r % 2 == 1 {
        let k = (r - 3) / 2;
        rep(&mut u_l, &[a(p - 1), b(1)], k);
        rep(&mut u_l, &[a(p - 1), b(2)], 1);
        rep(&mut v_r, &[b(q - 1), a(1)], k);
        rep(&mut v_r, &[b(q - 1), a(2)], 1);
        rep(&mut w_l_lit, &[a(p - 1), b(1)], k);
        rep(&mut w_l_lit, &[a(p - 1), b(1)], 1);
        rep(&mut w_l, &[a(p - 1), b(1)], k);
        rep(&mut w_l, &[a(p - 2), b(1)], 1);
        rep(&mut w_r, &[b(q - 1), a(1)], k);
        rep(&mut w_r, &[b(q - 2), a(1)], 1);
    } else {
        let k = (r - 2) / 2;
        rep(&mut u_l, &[a(p - 1), b(1)], k);
        rep(&mut u_l, &[a(p - 2)], 1);
        rep(&mut u_l, &[b(1), a(p - 1)], k);
        rep(&mut u_l, &[b(2)], 1);
        rep(&mut v_r, &[b(q - 1), a(1)], k);
        rep(&mut v_r, &[b(q - 2)], 1);
        rep(&mut v_r, &[a(1), b(q - 1)], k);
        rep(&mut v_r, &[a(2)], 1);
        for (out, x, y, xm) in [(&mut w_l_lit, a as fn(u32) -> Syllable, b as fn(u32) -> Syllable, p), (&mut w_r, b, a, q)] {
            rep(out, &[x(xm - 1), y(1)], k);
            rep(out, &[x(xm - 2), y(1)], 1);
            rep(out, &[x(xm - 1), y(1)], k - 1);
            rep(out, &[x(xm - 2), y(1)], 1);
        }
        w_l = w_l_lit.clone();
    }
    let cyc = |sy: Vec<Syllable>| CyclicWord { syllables: canonical_rotation(&cyclic_merge(sy)) };
    TableWords {
        u_l: PeriodicWord::from_syllables(&u_l),
        v_r: PeriodicWord::from_syllables(&v_r),
        w_l_literal: cyc(w_l_lit),
        w_l: cyc(w_l),
        w_r: cyc(w_r),
    }
}

/// How shifts of a periodic word are selected for the admissibility test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftMode {
    /// Every letter position.
    Letter,
    /// Syllable boundaries only.
    Syllable,
}

/// Compares the window `letters[start..]` against `bound` on their overlap.
/// Returns `None` when the window is a prefix of `bound`.
fn window_cmp(letters: &[Letter], start: usize, bound: &PeriodicWord) -> Option<Ordering> {
    for (i, &l) in letters[start..].iter().enumerate() {
        match l.cmp(&bound.letter_at(i)) {
            Ordering::Equal => continue,
            o => return Some(o),
        }
    }
    None
}

impl LimitingWords {
    fn bounds(&self, l: Letter) -> (&PeriodicWord, &PeriodicWord) {
        match l {
            Letter::A => (&self.u_l, &self.u_r),
            Letter::B => (&self.v_l, &self.v_r),
        }
    }

    fn max_len(&self) -> usize {
        [&self.u_l, &self.u_r, &self.v_l, &self.v_r].iter().map(|w| w.len_hint()).max().unwrap_or(0)
    }
}

fn shift_starts(sy: &[Syllable], mode: ShiftMode) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut pos = 0usize;
    for s in sy {
        match mode {
            ShiftMode::Letter => starts.extend(pos..pos + s.exp as usize),
            ShiftMode::Syllable => starts.push(pos),
        }
        pos += s.exp as usize;
    }
    starts
}

/// Admissibility with an explicit shift mode.
pub fn is_admissible_with(w: &CyclicWord, lw: &LimitingWords, mode: ShiftMode) -> bool {
    let letters = w.letters();
    let n = letters.len();
    let horizon = n + lw.max_len() + 1;
    let window: Vec<Letter> = (0..n + horizon).map(|i| letters[i % n]).collect();
    for start in shift_starts(&w.syllables, mode) {
        let seg = &window[start..start + horizon];
        let (lo, hi) = lw.bounds(seg[0]);
        if window_cmp(seg, 0, lo) == Some(Ordering::Less) {
            return false;
        }
        // Equal to the upper bound over the horizon means equal as periodic words.
        match window_cmp(seg, 0, hi) {
            Some(Ordering::Less) => {}
            _ => return false,
        }
    }
    true
}

/// Every letter-position shift of `w^∞` lies in `[u_L, u_R)` (a-initial) or `[v_L, v_R)` (b-initial).
pub fn is_admissible(w: &CyclicWord, lw: &LimitingWords) -> bool {
    is_admissible_with(w, lw, ShiftMode::Letter)
}

/// Product of generator powers: `a^e ↦ gen_a^e`, `b^f ↦ gen_b^{−f}`.
///
/// The second generator enters with a negative exponent because the code
/// counts turns clockwise at B-type vertices.
pub fn matrix_of_syllables(sy: &[Syllable], gd: &GroupData) -> Isometry {
    let mut m = Isometry::identity();
    for s in sy {
        let g = match s.letter {
            Letter::A => gd.gen_a.pow(s.exp as i64),
            Letter::B => gd.gen_b.pow(-(s.exp as i64)),
        };
        m = m.mul(&g);
    }
    m
}

pub fn matrix_of_word(w: &CyclicWord, gd: &GroupData) -> Isometry {
    matrix_of_syllables(&w.syllables, gd)
}

/// Turn made by the path at the vertex of a syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Turn {
    /// Keeps following the polygon on the left.
    Left,
    /// Keeps following the polygon on the right.
    Right,
    Switch,
}

pub fn turn_of(s: Syllable, t: Triplet) -> Turn {
    let n = match s.letter {
        Letter::A => t.p,
        Letter::B => t.q,
    };
    let (left, right) = match s.letter {
        Letter::A => (n - 1, 1),
        Letter::B => (1, n - 1),
    };
    if s.exp == left {
        Turn::Left
    } else if s.exp == right {
        Turn::Right
    } else {
        Turn::Switch
    }
}

/// Syllable realizing a non-switch turn at a vertex of the given letter.
pub fn syllable_of_turn(letter: Letter, turn: Turn, t: Triplet) -> Syllable {
    let n = match letter {
        Letter::A => t.p,
        Letter::B => t.q,
    };
    let exp = match (letter, turn) {
        (Letter::A, Turn::Left) | (Letter::B, Turn::Right) => n - 1,
        (Letter::A, Turn::Right) | (Letter::B, Turn::Left) => 1,
        (_, Turn::Switch) => panic!("switch has no canonical exponent"),
    };
    Syllable::new(letter, exp)
}

/// A uni-polygonal factor: `n − 1` consecutive same-side turns along one polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    /// Letter of the first turn.
    pub first: Letter,
    pub turn: Turn,
    /// Number of polygon sides the path runs along.
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Zigzag {
    pub factors: Vec<Factor>,
}

impl Zigzag {
    /// Number of contributing polygons; the empty zigzag still counts one.
    pub fn length(&self) -> usize {
        self.factors.len().max(1)
    }

    pub fn syllables(&self, t: Triplet) -> Vec<Syllable> {
        let mut out = Vec::new();
        for f in &self.factors {
            let mut l = f.first;
            for _ in 0..f.n - 1 {
                out.push(syllable_of_turn(l, f.turn, t));
                l = l.other();
            }
        }
        out
    }
}

impl fmt::Display for Zigzag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, fa) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let side = if fa.turn == Turn::Left { 'L' } else { 'R' };
            write!(f, "{}{}{}", side, fa.first.as_char(), fa.n)?;
        }
        write!(f, ")")
    }
}

/// `(∏ ζ_j σ_j)^∞` with the switches in `switches`.
///
/// For a switchless word there is one zigzag, cut at a vertex that lies on
/// two contributing polygons; that vertex's own turn is left out of the
/// factors and recorded in `cut`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagFactorization {
    pub zigzags: Vec<Zigzag>,
    pub switches: Vec<Syllable>,
    /// Rotation offset (in syllables) of the canonical word where the factorization starts.
    pub offset: usize,
    pub cut: Option<Syllable>,
}

impl ZigzagFactorization {
    /// Rebuilds the cyclic word.
    pub fn reassemble(&self, t: Triplet) -> CyclicWord {
        let mut sy = Vec::new();
        if let Some(c) = self.cut {
            sy.push(c);
            sy.extend(self.zigzags[0].syllables(t));
        } else {
            for (z, s) in self.zigzags.iter().zip(&self.switches) {
                sy.extend(z.syllables(t));
                sy.push(*s);
            }
        }
        CyclicWord { syllables: canonical_rotation(&sy) }
    }

    /// `Σ L(ζ_j)` with switches, `L(ζ_0) + 1` without.
    pub fn combinatorial_length(&self) -> usize {
        if self.cut.is_some() {
            self.zigzags[0].factors.len() + 1
        } else {
            self.zigzags.iter().map(|z| z.length()).sum()
        }
    }
}

/// Groups a switch-free run of syllables into maximal same-turn factors.
fn factor_run(sy: &[Syllable], t: Triplet) -> Zigzag {
    let mut factors: Vec<Factor> = Vec::new();
    for s in sy {
        let turn = turn_of(*s, t);
        match factors.last_mut() {
            Some(f) if f.turn == turn => f.n += 1,
            _ => factors.push(Factor { first: s.letter, turn, n: 2 }),
        }
    }
    Zigzag { factors }
}

pub fn zigzag_factorize(w: &CyclicWord, t: Triplet) -> ZigzagFactorization {
    let sy = &w.syllables;
    let n = sy.len();
    let turns: Vec<Turn> = sy.iter().map(|s| turn_of(*s, t)).collect();
    if let Some(first_switch) = turns.iter().position(|&x| x == Turn::Switch) {
        // Start right after a switch so every zigzag is followed by its switch.
        let offset = (first_switch + 1) % n;
        let rot: Vec<Syllable> = (0..n).map(|i| sy[(offset + i) % n]).collect();
        let mut zigzags = Vec::new();
        let mut switches = Vec::new();
        let mut run = Vec::new();
        for s in rot {
            if turn_of(s, t) == Turn::Switch {
                zigzags.push(factor_run(&run, t));
                switches.push(s);
                run.clear();
            } else {
                run.push(s);
            }
        }
        return ZigzagFactorization { zigzags, switches, offset, cut: None };
    }
    // Switchless: cut at a turn that forms a block of its own, if any.
    let block_len = |i: usize| -> usize {
        let mut k = 1;
        while k < n && turns[(i + k) % n] == turns[i] {
            k += 1;
        }
        k
    };
    let single = (0..n).find(|&i| turns[(i + n - 1) % n] != turns[i] && block_len(i) == 1);
    let offset = single.unwrap_or_else(|| (0..n).find(|&i| turns[(i + n - 1) % n] != turns[i]).unwrap_or(0));
    let rot: Vec<Syllable> = (0..n).map(|i| sy[(offset + i) % n]).collect();
    ZigzagFactorization { zigzags: vec![factor_run(&rot[1..], t)], switches: Vec::new(), offset, cut: Some(rot[0]) }
}

/// Counts contributing polygons per period from the turn sequence.
///
/// Every maximal block of left (right) turns is one polygon shared along
/// two or more edges. An edge whose two endpoints are both switches touches
/// each neighbouring polygon along that edge only; its left polygon counts.
pub fn polygon_count(w: &CyclicWord, t: Triplet) -> usize {
    let turns: Vec<Turn> = w.syllables.iter().map(|s| turn_of(*s, t)).collect();
    cyclic_polygon_count(&turns)
}

fn cyclic_polygon_count(turns: &[Turn]) -> usize {
    let n = turns.len();
    if turns.iter().all(|&x| x == turns[0]) && turns[0] != Turn::Switch {
        return 1;
    }
    let mut count = 0;
    for i in 0..n {
        let (prev, cur) = (turns[(i + n - 1) % n], turns[i]);
        match cur {
            Turn::Switch => {
                if prev == Turn::Switch {
                    count += 1;
                }
            }
            _ => {
                if prev != cur {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Combinatorial length of an admissible word by polygon counting.
pub fn combinatorial_length(w: &CyclicWord, t: Triplet, lw: &LimitingWords) -> Result<usize, WordError> {
    if !is_admissible(w, lw) {
        return Err(WordError::NotAdmissible(w.to_string()));
    }
    Ok(polygon_count(w, t))
}

/// All admissible canonical cyclic words with polygon count `≤ l_max`, sorted.
pub fn enumerate_admissible(t: Triplet, lw: &LimitingWords, l_max: usize) -> Vec<CyclicWord> {
    use rayon::prelude::*;
    let gd = crate::hyperbolic_core::build_group(t);
    let blocks = block_alphabet(t, &gd);
    let mut out: Vec<CyclicWord> = (0..blocks.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            for_each_admissible_from(t, &gd, lw, l_max, first, |w| {
                found.push(CyclicWord { syllables: w.syllables.to_vec() });
            });
            found
        })
        .collect();
    out.sort_by_key(|w| w.letters());
    out
}

/// One word produced by [`for_each_admissible`].
pub struct EnumeratedWord<'a> {
    /// Canonical syllables.
    pub syllables: &'a [Syllable],
    /// `matrix_of_syllables(syllables)`.
    pub matrix: &'a Isometry,
    pub polygon_count: usize,
}

/// Calls `visit` on every admissible canonical cyclic word with polygon count `≤ l_max`.
///
/// The search runs over pairs `a^e b^f` ("blocks"). Under the letter order
/// `a < b`, blocks compare by `e` descending then `f` ascending, and the
/// canonical rotation of a word is its least rotation as a block sequence, so
/// necklaces are generated directly by the Fredricksen–Kessler–Maiorana
/// recursion. Admissibility, turn counts and the matrix product are all
/// updated incrementally.
pub fn for_each_admissible<F: FnMut(&EnumeratedWord)>(t: Triplet, gd: &GroupData, lw: &LimitingWords, l_max: usize, mut visit: F) {
    for first in 0..block_alphabet(t, gd).len() {
        for_each_admissible_from(t, gd, lw, l_max, first, &mut visit);
    }
}

/// As [`for_each_admissible`], restricted to words whose first block has index `first`
/// in the block order. Used to partition the search.
pub fn for_each_admissible_from<F: FnMut(&EnumeratedWord)>(
    t: Triplet,
    gd: &GroupData,
    lw: &LimitingWords,
    l_max: usize,
    first: usize,
    mut visit: F,
) {
    if l_max == 0 {
        return;
    }
    let blocks = block_alphabet(t, gd);
    if first >= blocks.len() {
        return;
    }
    let max_blocks = l_max * t.r as usize + 1;
    let max_letters = max_blocks * (t.p + t.q) as usize;
    let horizon_extra = lw.max_len() + 1;
    let table = |w: &PeriodicWord| -> Vec<Letter> { (0..max_letters + horizon_extra + 1).map(|i| w.letter_at(i)).collect() };
    let mut st = Necklaces {
        blocks: &blocks,
        l_max,
        max_blocks,
        horizon_extra,
        bounds: [[table(&lw.u_l), table(&lw.u_r)], [table(&lw.v_l), table(&lw.v_r)]],
        seq: Vec::new(),
        syllables: Vec::new(),
        letters: Vec::new(),
        matrices: vec![Isometry::identity()],
        lin: vec![0],
        ties: Vec::new(),
        tie_marks: Vec::new(),
        letter_marks: Vec::new(),
    };
    if st.push(first) {
        st.dfs(1, &mut visit);
    }
}

struct Block {
    a: Syllable,
    b: Syllable,
    g: Isometry,
    turn_a: Turn,
    turn_b: Turn,
}

/// Blocks `a^e b^f` sorted ascending in the order induced on letter expansions.
fn block_alphabet(t: Triplet, gd: &GroupData) -> Vec<Block> {
    let mut out = Vec::new();
    for e in (1..t.p).rev() {
        for f in 1..t.q {
            let (a, b) = (Syllable::a(e), Syllable::b(f));
            out.push(Block { a, b, g: matrix_of_syllables(&[a, b], gd), turn_a: turn_of(a, t), turn_b: turn_of(b, t) });
        }
    }
    out
}

/// Whether the turn `cur` following `prev` starts a new contributing polygon.
fn fresh(prev: Turn, cur: Turn) -> bool {
    match (prev, cur) {
        (Turn::Switch, Turn::Switch) => true,
        (_, Turn::Switch) => false,
        (p, c) => p != c,
    }
}

/// A letter position whose shift still agrees with the lower and/or upper bound.
#[derive(Clone, Copy)]
struct Tie {
    start: u32,
    lo: bool,
    hi: bool,
}

struct Necklaces<'a> {
    blocks: &'a [Block],
    l_max: usize,
    max_blocks: usize,
    horizon_extra: usize,
    /// `[letter][lower, upper]` expanded to the maximal comparison length.
    bounds: [[Vec<Letter>; 2]; 2],
    seq: Vec<usize>,
    syllables: Vec<Syllable>,
    letters: Vec<Letter>,
    matrices: Vec<Isometry>,
    /// Fresh-polygon count over syllables `1..`, per depth.
    lin: Vec<usize>,
    ties: Vec<Tie>,
    /// Start of each depth's segment in `ties`.
    tie_marks: Vec<usize>,
    letter_marks: Vec<usize>,
}

fn letter_idx(l: Letter) -> usize {
    match l {
        Letter::A => 0,
        Letter::B => 1,
    }
}

impl<'a> Necklaces<'a> {
    /// Feeds one letter to the open comparisons; false when a bound is violated.
    fn feed(&mut self, l: Letter) -> bool {
        let pos = self.letters.len();
        self.letters.push(l);
        self.ties.push(Tie { start: pos as u32, lo: true, hi: true });
        let mark = *self.tie_marks.last().unwrap_or(&0);
        let mut keep = mark;
        for k in mark..self.ties.len() {
            let mut tie = self.ties[k];
            let s = tie.start as usize;
            let [lo, hi] = &self.bounds[letter_idx(self.letters[s])];
            let off = pos - s;
            if tie.lo {
                match l.cmp(&lo[off]) {
                    Ordering::Less => return false,
                    Ordering::Greater => tie.lo = false,
                    Ordering::Equal => {}
                }
            }
            if tie.hi {
                match l.cmp(&hi[off]) {
                    Ordering::Greater => return false,
                    Ordering::Less => tie.hi = false,
                    Ordering::Equal => {}
                }
            }
            if tie.lo || tie.hi {
                self.ties[keep] = tie;
                keep += 1;
            }
        }
        self.ties.truncate(keep);
        true
    }

    /// Appends a block; on failure the state is left for [`Self::pop`] to restore.
    fn push(&mut self, idx: usize) -> bool {
        let blk = &self.blocks[idx];
        let depth = self.seq.len();
        // Open comparisons of this depth are copied so that popping restores them.
        let base = *self.tie_marks.last().unwrap_or(&0);
        let live = self.ties.len();
        self.tie_marks.push(live);
        self.ties.extend_from_within(base..live);
        self.letter_marks.push(self.letters.len());
        let (sa, sb, g, ta, tb) = (blk.a, blk.b, blk.g, blk.turn_a, blk.turn_b);
        self.seq.push(idx);
        self.syllables.push(sa);
        self.syllables.push(sb);
        let m = self.matrices[depth].mul(&g);
        self.matrices.push(m);
        let mut lin = self.lin[depth];
        if depth > 0 && fresh(self.blocks[self.seq[depth - 1]].turn_b, ta) {
            lin += 1;
        }
        if fresh(ta, tb) {
            lin += 1;
        }
        self.lin.push(lin);
        if lin > self.l_max {
            return false;
        }
        for _ in 0..sa.exp {
            if !self.feed(Letter::A) {
                return false;
            }
        }
        for _ in 0..sb.exp {
            if !self.feed(Letter::B) {
                return false;
            }
        }
        true
    }

    fn pop(&mut self) {
        self.seq.pop();
        self.syllables.truncate(self.syllables.len() - 2);
        self.matrices.pop();
        self.lin.pop();
        self.letters.truncate(self.letter_marks.pop().expect("nonempty"));
        self.ties.truncate(self.tie_marks.pop().expect("nonempty"));
    }

    /// Completes the comparisons of `w^∞` for a closed word.
    fn closes(&self) -> bool {
        let n = self.letters.len();
        let horizon = n + self.horizon_extra;
        let base = *self.tie_marks.last().unwrap_or(&0);
        for tie in &self.ties[base..] {
            let s = tie.start as usize;
            let [lo, hi] = &self.bounds[letter_idx(self.letters[s])];
            let (mut tlo, mut thi) = (tie.lo, tie.hi);
            let mut off = n - s;
            while (tlo || thi) && off < horizon {
                let l = self.letters[(s + off) % n];
                if tlo {
                    match l.cmp(&lo[off]) {
                        Ordering::Less => return false,
                        Ordering::Greater => tlo = false,
                        Ordering::Equal => {}
                    }
                }
                if thi {
                    match l.cmp(&hi[off]) {
                        Ordering::Greater => return false,
                        Ordering::Less => thi = false,
                        Ordering::Equal => {}
                    }
                }
                off += 1;
            }
            // Agreement with the upper bound over the horizon means equality, which is excluded.
            if thi {
                return false;
            }
        }
        true
    }

    fn dfs<F: FnMut(&EnumeratedWord)>(&mut self, per: usize, visit: &mut F) {
        let t = self.seq.len();
        if t % per == 0 {
            let first = &self.blocks[self.seq[0]];
            let last = &self.blocks[self.seq[t - 1]];
            let lin = self.lin[t];
            let count = (lin + usize::from(fresh(last.turn_b, first.turn_a))).max(1);
            if count <= self.l_max && self.closes() {
                visit(&EnumeratedWord { syllables: &self.syllables, matrix: &self.matrices[t], polygon_count: count });
            }
        }
        if t >= self.max_blocks {
            return;
        }
        let lower = self.seq[t - per];
        for b in lower..self.blocks.len() {
            let next_per = if b == lower { per } else { t + 1 };
            if self.push(b) {
                self.dfs(next_per, visit);
            }
            self.pop();
        }
    }
}
