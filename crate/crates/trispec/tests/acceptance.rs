//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! The target reports rather than asserts, so a failing criterion does not
//! hide the others. Set `TRISPEC_ACCEPTANCE_FULL=1` to run the (3,4,5) bound
//! sweep of criterion 5 at its full depth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};
use trispec::hyperbolic_core::*;
use trispec::oracle::{ball_radius, brute_spectrum, compare_spectra};
use trispec::spectrum::*;
use trispec::tiling::*;
use trispec::words::*;

const TEST_TRIPLETS: [(u32, u32, u32); 4] = [(3, 3, 7), (3, 4, 4), (3, 4, 5), (4, 5, 6)];

struct Ctx {
    til: Tiling,
    lw: LimitingWords,
}

fn ctx(p: u32, q: u32, r: u32) -> Ctx {
    let til = Tiling::new(Triplet::new(p, q, r).unwrap()).unwrap();
    let lw = trispec::constants::build_limiting_words(&til).unwrap();
    Ctx { til, lw }
}

type Outcome = Result<String, String>;

fn within(limit: Duration, start: Instant, what: &str) -> Result<(), String> {
    let spent = start.elapsed();
    if spent <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {:.1}s, limit {:.0}s", spent.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn relations() -> Outcome {
    let start = Instant::now();
    let mut n = 0;
    for t in Triplet::all_up_to(9) {
        let gd = build_group(t);
        for (m, k) in [(gd.gen_a, t.p), (gd.gen_b, t.q), (gd.gen_a.mul(&gd.gen_b), t.r)] {
            if !m.pow(k as i64).is_identity(1e-9) {
                return Err(format!("relation fails for {t:?}"));
            }
        }
        n += 1;
    }
    within(Duration::from_secs(1), start, "relations")?;
    Ok(format!("{n} triplets with r ≤ 9"))
}

fn table_one() -> Outcome {
    let start = Instant::now();
    for (p, q, r) in [(3, 3, 7), (3, 4, 4)] {
        let til = Tiling::new(Triplet::new(p, q, r).unwrap()).unwrap();
        let num = til.limiting_words_numeric(60).map_err(|e| e.to_string())?;
        let tw = table_words(til.triplet());
        if num.prefixes[0] != tw.u_l.first_letters(60) {
            return Err(format!("u_L differs for ({p},{q},{r})"));
        }
        if num.prefixes[3] != tw.v_r.first_letters(60) {
            return Err(format!("v_R differs for ({p},{q},{r})"));
        }
    }
    within(Duration::from_secs(10), start, "coder")?;
    Ok("u_L and v_R match for (3,3,7) and (3,4,4)".into())
}

fn anchors() -> Outcome {
    let tp = |p, q, r| trig_pack(Triplet::new(p, q, r).unwrap());
    let checks = [
        ("θ (3,3,4)", tp(3, 3, 4).theta_a, 2.672),
        ("θ_A (3,4,4)", tp(3, 4, 4).theta_a, 2.579),
        ("θ_B (3,4,4)", tp(3, 4, 4).theta_b, 1.965),
        ("μ bound p=3 r=5", tp(3, 3, 5).mu_bound, 1.435),
    ];
    let mut parts = Vec::new();
    for (name, got, want) in checks {
        if (got - want).abs() > 5e-3 {
            return Err(format!("{name} = {got:.4}, expected {want}"));
        }
        parts.push(format!("{name} = {got:.4}"));
    }
    Ok(parts.join(", "))
}

fn oracle_equivalence() -> Outcome {
    let mut parts = Vec::new();
    for ((p, q, r), ell0) in [((3, 3, 7), 6.0), ((3, 4, 5), 5.0)] {
        let start = Instant::now();
        let k = ctx(p, q, r);
        let c = stopping_constant(&k.til, &k.lw).map_err(|e| e.to_string())?.c;
        let main = length_spectrum(&k.til, &k.lw, c, ell0, SpectrumOptions::default()).map_err(|e| e.to_string())?;
        let radius = ball_radius(&k.til, ell0);
        let oracle = brute_spectrum(&k.til, (&k.lw.w_l, &k.lw.w_r), ell0, radius);
        if oracle.is_empty() {
            return Err(format!("oracle spectrum of ({p},{q},{r}) is empty"));
        }
        let diff = compare_spectra(&main.entries, &oracle, 1e-6);
        if !diff.is_empty() {
            return Err(format!("({p},{q},{r}) ℓ0 = {ell0}: {diff:?}"));
        }
        within(Duration::from_secs(300), start, "oracle comparison")?;
        parts.push(format!("({p},{q},{r}) ℓ0 = {ell0}: {} lengths, radius {radius}", oracle.len()));
    }
    Ok(parts.join("; "))
}

fn stopping_bound() -> Outcome {
    let full = std::env::var_os("TRISPEC_ACCEPTANCE_FULL").is_some();
    let mut parts = Vec::new();
    let mut shortfall = None;
    for (p, q, r) in [(3, 3, 7), (3, 4, 5)] {
        let k = ctx(p, q, r);
        let c = stopping_constant(&k.til, &k.lw).map_err(|e| e.to_string())?.c;
        if c <= 0.0 {
            return Err(format!("c = {c} for ({p},{q},{r})"));
        }
        // On a single core the (3,4,5) sweep to L = 12 takes about 40 minutes.
        let l_max = if (p, q, r) == (3, 4, 5) && !full { 10 } else { 12 };
        let start = Instant::now();
        let rep = validate_bound(&k.til, &k.lw, c, l_max).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        parts.push(format!(
            "({p},{q},{r}) c = {c:.6}, L ≤ {l_max}: {} words, min ratio {:.6}, {secs:.0}s",
            rep.words_checked, rep.min_ratio
        ));
        if l_max < 12 {
            shortfall = Some(format!("({p},{q},{r}) only swept to L ≤ {l_max}"));
        } else if secs > 120.0 {
            shortfall = Some(format!("({p},{q},{r}) took {secs:.0}s, limit 120s"));
        }
    }
    match shortfall {
        None => Ok(parts.join("; ")),
        Some(s) => Err(format!("{s}; zero violations found: {}", parts.join("; "))),
    }
}

fn exceptional_pair() -> Outcome {
    let k = ctx(3, 3, 7);
    let (wl, wr) = (&k.lw.w_l, &k.lw.w_r);
    if !is_admissible(wl, &k.lw) || !is_admissible(wr, &k.lw) {
        return Err("w_L or w_R is not admissible".into());
    }
    let tl = matrix_of_word(wl, &k.til.gd).trace().abs();
    let tr = matrix_of_word(wr, &k.til.gd).trace().abs();
    if (tl - tr).abs() > 1e-9 {
        return Err(format!("traces {tl} and {tr} differ"));
    }
    let len = length_from_trace(tr);
    let c = stopping_constant(&k.til, &k.lw).map_err(|e| e.to_string())?.c;
    let spec = length_spectrum(&k.til, &k.lw, c, len + 0.01, SpectrumOptions::default()).map_err(|e| e.to_string())?;
    let entry = spec.entries.iter().find(|e| (e.length - len).abs() < 1e-9).ok_or("no entry at the pair's length")?;
    let hits = entry.words.iter().filter(|w| *w == wl || *w == wr).count();
    if hits != 1 {
        return Err(format!("pair contributes {hits} to multiplicity"));
    }
    Ok(format!("w_L = {wl}, w_R = {wr}, length {len:.9}, contributes 1 of {}", entry.multiplicity))
}

fn round_trip() -> Outcome {
    let k = ctx(3, 3, 7);
    let t = k.til.triplet();
    // The coder may return either code of the exceptional class.
    let exceptional = |w: &CyclicWord| is_power_of(w, &k.lw.w_l) || is_power_of(w, &k.lw.w_r);
    let mut checked = 0usize;
    let mut failed = 0usize;
    let mut examples = Vec::new();
    for_each_admissible(t, &k.til.gd, &k.lw, 8, |e| {
        if e.matrix.trace().abs() <= 2.0 + TRACE_FILTER {
            return;
        }
        let w = CyclicWord { syllables: e.syllables.to_vec() };
        checked += 1;
        match k.til.code_of_element(e.matrix) {
            Ok(code) if code == w => {}
            Ok(code) if exceptional(&code) && exceptional(&w) && code.letter_len() == w.letter_len() => {}
            other => {
                failed += 1;
                if examples.len() < 5 {
                    examples.push(format!("{w} -> {other:?}"));
                }
            }
        }
    });
    if failed == 0 {
        Ok(format!("{checked} hyperbolic words with L ≤ 8"))
    } else {
        Err(format!("{failed} of {checked} failed, e.g. {}", examples.join(", ")))
    }
}

fn busemann_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut parts = Vec::new();
    for (p, q, r) in TEST_TRIPLETS {
        let til = Tiling::new(Triplet::new(p, q, r).unwrap()).unwrap();
        let mut margin = f64::INFINITY;
        for _ in 0..100 {
            let xi = BoundaryPoint::new(rng.gen_range(0.0..TAU));
            let path = til.follow_path(Vertex::base(VType::A), xi, false, 16);
            let b: Vec<f64> = path.vertices.iter().map(|v| busemann(xi, v.position_disk(&til.gd))).collect();
            for i in 0..b.len() - 2 {
                margin = margin.min(b[i] - b[i + 2]);
            }
        }
        if margin <= 0.0 {
            return Err(format!("({p},{q},{r}) margin {margin}"));
        }
        parts.push(format!("({p},{q},{r}) margin {margin:.4}"));
    }
    Ok(parts.join(", "))
}

fn interval_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (p, q, r) in TEST_TRIPLETS {
        let til = Tiling::new(Triplet::new(p, q, r).unwrap()).unwrap();
        let mut vertices = vec![Vertex::base(VType::A), Vertex::base(VType::B)];
        for _ in 0..8 {
            let mut v = Vertex::base(VType::A);
            for _ in 0..rng.gen_range(1..6) {
                let nb = til.neighbors(&v);
                v = nb[rng.gen_range(0..nb.len())].head;
            }
            vertices.push(v);
        }
        for v in &vertices {
            for dual in [false, true] {
                let ivs: Vec<_> = til.neighbors(v).iter().map(|e| til.spectacle_interval(e, dual)).collect();
                let total: f64 = ivs.iter().map(|i| i.measure()).sum();
                if (total - TAU).abs() > 1e-9 {
                    return Err(format!("({p},{q},{r}) measures sum to {total}"));
                }
                let mut probes: Vec<BoundaryPoint> = ivs.iter().flat_map(|i| [i.left, i.right]).collect();
                probes.extend((0..50).map(|_| BoundaryPoint::new(rng.gen_range(0.0..TAU))));
                for x in probes {
                    let n = ivs.iter().filter(|i| i.contains(x)).count();
                    if n != 1 {
                        return Err(format!("({p},{q},{r}) dual={dual}: angle {} in {n} intervals", x.angle));
                    }
                }
            }
        }
    }
    Ok("disjoint and summing to 2π at 10 vertices per triplet, regular and dual".into())
}

/// Every canonical cyclic word with at most `max_syl` syllables.
fn words_up_to(t: Triplet, max_syl: usize) -> Vec<CyclicWord> {
    let mut out = HashSet::new();
    let mut stack: Vec<Vec<Syllable>> = vec![vec![]];
    while let Some(sy) = stack.pop() {
        if !sy.is_empty() && sy.len() % 2 == 0 {
            out.insert(CyclicWord::from_syllables(sy.clone()).unwrap());
        }
        if sy.len() == max_syl {
            continue;
        }
        let (letter, max) = if sy.len() % 2 == 0 { (Letter::A, t.p) } else { (Letter::B, t.q) };
        for e in 1..max {
            let mut next = sy.clone();
            next.push(Syllable::new(letter, e));
            stack.push(next);
        }
    }
    out.into_iter().collect()
}

fn zigzag_equivalence() -> Outcome {
    let mut parts = Vec::new();
    let mut mismatches = 0;
    let mut example = None;
    for (p, q, r) in [(3, 3, 7), (3, 4, 4)] {
        let k = ctx(p, q, r);
        let t = k.til.triplet();
        let words: Vec<_> = words_up_to(t, 10).into_iter().filter(|w| is_admissible(w, &k.lw)).collect();
        let bad: Vec<_> = words
            .iter()
            .filter(|w| polygon_count(w, t) != zigzag_factorize(w, t).combinatorial_length())
            .collect();
        mismatches += bad.len();
        if example.is_none() {
            example = bad.first().map(|w| {
                format!("{w}: polygons {}, formula {}", polygon_count(w, t), zigzag_factorize(w, t).combinatorial_length())
            });
        }
        parts.push(format!("({p},{q},{r}) {} of {} words differ", bad.len(), words.len()));
    }
    let summary = parts.join(", ");
    if mismatches == 0 {
        Ok(summary)
    } else {
        Err(format!("{summary}; e.g. {}", example.unwrap_or_default()))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("group relations", relations),
        ("limiting words from the coder", table_one),
        ("trigonometric anchors", anchors),
        ("oracle equivalence", oracle_equivalence),
        ("stopping bound", stopping_bound),
        ("exceptional pair", exceptional_pair),
        ("round trip", round_trip),
        ("Busemann monotonicity", busemann_monotone),
        ("interval partition", interval_partition),
        ("zigzag and polygon counts", zigzag_equivalence),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{name}] ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL [{name}] ({secs:.1}s) {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed; failed: {failed:?}", 10 - failed.len());
}
