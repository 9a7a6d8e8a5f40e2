//! Command-line front end.
//!
//! [`run`] parses arguments and writes to the given streams; the `trispec`
//! binary is a thin wrapper around it. Exit codes: `0` success, `1` internal
//! failure (including a spectrum diff in `validate`), `2` user error.

mod render;

use crate::constants::{self, TripletConstants};
use crate::hyperbolic_core::{classify_and_length, IsometryClass, Triplet};
use crate::oracle::{ball_radius, brute_spectrum, compare_spectra};
use crate::spectrum::{self, SpectrumMetadata, SpectrumOptions};
use crate::tiling::Tiling;
use crate::words::{
    for_each_admissible, is_admissible, matrix_of_word, parse_word, polygon_count, zigzag_factorize, CyclicWord,
    ZigzagFactorization,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub use render::{render_svg, Overlay, RenderSpec};

#[derive(Debug, Parser)]
#[command(name = "trispec", version, about = "Length spectra of triangle-group orbifolds")]
struct Cli {
    /// Worker threads for the parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct TripletArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    r: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Length spectrum up to a length bound.
    Spectrum {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long)]
        max_length: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Keep one class out of each inverse pair.
        #[arg(long)]
        fold_inverses: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stopping constant c.
    Constant {
        #[command(flatten)]
        triplet: TripletArgs,
        /// Print every local configuration as JSON.
        #[arg(long)]
        report: bool,
    },
    /// Admissible canonical words with combinatorial length at most `--max-L`.
    Words {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long = "max-L")]
        max_l: usize,
    },
    /// Trace, length, combinatorial length and zigzags of one word.
    Code {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long)]
        word: String,
    },
    /// Compares the enumerated spectrum with the brute-force ball spectrum.
    Validate {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long)]
        max_length: f64,
        /// Ball radius in syllables (default: derived from the length bound).
        #[arg(long)]
        radius: Option<usize>,
    },
    /// SVG picture of the tiling with overlays.
    Render {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Closed geodesic of a word, with its coded path.
        #[arg(long)]
        word: Vec<String>,
        /// Geodesic between two boundary angles in radians, `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        geodesic: Vec<String>,
        /// Spectacle path from A0 towards a boundary angle in radians.
        #[arg(long, allow_hyphen_values = true)]
        path: Vec<f64>,
        /// Draw the spectacle intervals at A0, regular and dual.
        #[arg(long)]
        intervals: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli.command, out, err)) {
        Ok(code) => code,
        Err(e) => {
            let (CliError::User(m) | CliError::Internal(m)) = &e;
            let _ = writeln!(err, "error: {m}");
            e.code()
        }
    }
}

fn triplet_of(a: TripletArgs) -> Result<Triplet, CliError> {
    Triplet::new(a.p, a.q, a.r).map_err(|e| CliError::User(e.to_string()))
}

fn tiling_of(a: TripletArgs) -> Result<Tiling, CliError> {
    Tiling::new(triplet_of(a)?).map_err(internal)
}

fn load_constants(tiling: &Tiling, with_c: bool) -> Result<TripletConstants, CliError> {
    constants::load_or_compute(tiling, with_c).map_err(internal)
}

fn positive_length(x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::User(format!("--max-length must be a positive number, got {x}")))
    }
}

fn parse_user_word(s: &str, t: Triplet) -> Result<CyclicWord, CliError> {
    let parsed = parse_word(s).map_err(|e| CliError::User(format!("cannot parse word {s:?}: {e}")))?;
    let w = CyclicWord::from_syllables(parsed.syllables)
        .map_err(|e| CliError::User(format!("word {s:?}: {e}")))?;
    w.check_exponents(t).map_err(|e| CliError::User(format!("word {s:?}: {e}")))?;
    Ok(w)
}

fn emit(text: &str, dest: Option<&PathBuf>, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(internal),
    }
}

fn dispatch(cmd: Command, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    match cmd {
        Command::Spectrum { triplet, max_length, format, fold_inverses, out: dest } => {
            let ell0 = positive_length(max_length)?;
            let tiling = tiling_of(triplet)?;
            let k = load_constants(&tiling, true)?;
            let c = k.c.expect("constants loaded with c");
            let res = spectrum::length_spectrum(&tiling, &k.limiting_words, c, ell0, SpectrumOptions { fold_inverses })
                .map_err(internal)?;
            let t = tiling.triplet();
            let text = match format {
                Format::Csv => {
                    writeln!(err, "# p={} q={} r={} ell0={} c={} L0={}", t.p, t.q, t.r, ell0, c, res.l0).map_err(internal)?;
                    spectrum::to_csv(&res.entries).map_err(internal)?
                }
                Format::Json => {
                    let meta = SpectrumMetadata {
                        p: t.p,
                        q: t.q,
                        r: t.r,
                        ell0,
                        c,
                        l0: res.l0,
                        tool_version: env!("CARGO_PKG_VERSION").to_string(),
                        source: "enumeration".to_string(),
                        ball_radius: None,
                    };
                    spectrum::to_json(&meta, &res.entries).map_err(internal)? + "\n"
                }
            };
            emit(&text, dest.as_ref(), out)?;
            Ok(0)
        }
        Command::Constant { triplet, report } => {
            let tiling = tiling_of(triplet)?;
            let lw = load_constants(&tiling, false)?.limiting_words;
            let rep = spectrum::stopping_constant(&tiling, &lw).map_err(internal)?;
            writeln!(out, "c = {:.15}", rep.c).map_err(internal)?;
            if report {
                let a = &rep.argmin;
                writeln!(out, "argmin window {} ({:?}, {:?})", a.local_word, a.polygons.0.kind, a.polygons.1.kind)
                    .map_err(internal)?;
                writeln!(out, "{} configurations, window cap {} syllables", rep.configurations.len(), rep.window_cap)
                    .map_err(internal)?;
                writeln!(out, "{}", serde_json::to_string_pretty(&rep).map_err(internal)?).map_err(internal)?;
            }
            Ok(0)
        }
        Command::Words { triplet, max_l } => {
            let tiling = tiling_of(triplet)?;
            let lw = load_constants(&tiling, false)?.limiting_words;
            let mut io_err = None;
            for_each_admissible(tiling.triplet(), &tiling.gd, &lw, max_l, |w| {
                if io_err.is_none() {
                    let cw = CyclicWord { syllables: w.syllables.to_vec() };
                    if let Err(e) = writeln!(out, "{cw}") {
                        io_err = Some(e);
                    }
                }
            });
            match io_err {
                Some(e) => Err(internal(e)),
                None => Ok(0),
            }
        }
        Command::Code { triplet, word } => {
            let t = triplet_of(triplet)?;
            let w = parse_user_word(&word, t)?;
            let tiling = Tiling::new(t).map_err(internal)?;
            let lw = load_constants(&tiling, false)?.limiting_words;
            let m = matrix_of_word(&w, &tiling.gd);
            let cl = classify_and_length(&m);
            writeln!(out, "word: {w}").map_err(internal)?;
            writeln!(out, "trace: {:.15}", m.trace().abs()).map_err(internal)?;
            match cl.class {
                IsometryClass::Hyperbolic => writeln!(out, "length: {:.15}", cl.length),
                other => writeln!(out, "length: none ({other:?})"),
            }
            .map_err(internal)?;
            writeln!(out, "admissible: {}", is_admissible(&w, &lw)).map_err(internal)?;
            writeln!(out, "L: {}", polygon_count(&w, t)).map_err(internal)?;
            let z = zigzag_factorize(&w, t);
            writeln!(out, "zigzags: {}", format_factorization(&z)).map_err(internal)?;
            writeln!(out, "zigzag length: {}", z.combinatorial_length()).map_err(internal)?;
            if cl.class == IsometryClass::Hyperbolic {
                match tiling.code_of_element(&m) {
                    Ok(g) => writeln!(out, "geometric code: {g}"),
                    Err(e) => writeln!(out, "geometric code: failed ({e})"),
                }
                .map_err(internal)?;
            }
            Ok(0)
        }
        Command::Validate { triplet, max_length, radius } => {
            let ell0 = positive_length(max_length)?;
            let tiling = tiling_of(triplet)?;
            let k = load_constants(&tiling, true)?;
            let c = k.c.expect("constants loaded with c");
            let lw = &k.limiting_words;
            let main = spectrum::length_spectrum(&tiling, lw, c, ell0, SpectrumOptions::default()).map_err(internal)?;
            let n = radius.unwrap_or_else(|| ball_radius(&tiling, ell0));
            let brute = brute_spectrum(&tiling, (&lw.w_l, &lw.w_r), ell0, n);
            let diff = compare_spectra(&main.entries, &brute, 1e-6);
            writeln!(
                out,
                "enumeration: {} lengths (L0 = {}), oracle: {} lengths (radius {})",
                main.entries.len(),
                main.l0,
                brute.len(),
                n
            )
            .map_err(internal)?;
            if diff.is_empty() {
                writeln!(out, "spectra agree").map_err(internal)?;
                Ok(0)
            } else {
                writeln!(out, "spectra differ: {diff:?}").map_err(internal)?;
                Ok(1)
            }
        }
        Command::Render { triplet, depth, word, geodesic, path, intervals, out: dest } => {
            let t = triplet_of(triplet)?;
            if depth == 0 || depth > render::MAX_DEPTH {
                return Err(CliError::User(format!("--depth must lie in 1..={}", render::MAX_DEPTH)));
            }
            let mut overlays = Vec::new();
            for w in &word {
                overlays.push(Overlay::Word(parse_user_word(w, t)?));
            }
            for g in &geodesic {
                let parts: Vec<&str> = g.split(',').collect();
                let bad = || CliError::User(format!("--geodesic expects two angles `a,b`, got {g:?}"));
                if parts.len() != 2 {
                    return Err(bad());
                }
                let a = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
                let b = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
                overlays.push(Overlay::Geodesic(a, b));
            }
            overlays.extend(path.iter().map(|&a| Overlay::Path(a)));
            if intervals {
                overlays.push(Overlay::Intervals);
            }
            let tiling = Tiling::new(t).map_err(internal)?;
            let spec = RenderSpec { triplet: t, depth, overlays, output: dest.clone() };
            let svg = render_svg(&tiling, &spec).map_err(internal)?;
            emit(&svg, dest.as_ref(), out)?;
            Ok(0)
        }
    }
}

fn format_factorization(z: &ZigzagFactorization) -> String {
    match z.cut {
        Some(cut) => format!("cut {cut}, {}", z.zigzags[0]),
        None => z
            .zigzags
            .iter()
            .zip(&z.switches)
            .map(|(zz, s)| format!("{zz} [{s}]"))
            .collect::<Vec<_>>()
            .join(" "),
    }
}
