//! The `ratkh` command line.

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::closure::{compare, kh_cube, kh_fast, kh_table, oracle_diagram, sweep_links, working_form};
use crate::cobcat::BigradedHomology;
use crate::cube::{self, Closure, OrientationRequest, OrientationType};
use crate::error::{Error, Result};
use crate::fraction::{canonical_form, canonical_standard_form, classify, parse_tangle, Notation};
use crate::zigzag::{build_zigzag, render, to_dot_diagram, validate_structure, DotFormat};

#[derive(Debug, Parser)]
#[command(name = "ratkh", version, about = "Khovanov homology of rational tangle closures")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Closure to take: numerator or denominator.
    #[arg(long, global = true, value_enum, default_value = "N")]
    closure: ClosureArg,
    /// Orientation type of the closure.
    #[arg(long, global = true, value_enum, default_value = "auto")]
    orientation: OrientationArg,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Print the fraction of a tangle.
    Fraction { input: String },
    /// Print the canonical continued fraction and standard form.
    Canonical { input: String },
    /// Components, chirality and strong invertibility of the numerator closure.
    Classify { input: String },
    /// Print the morphism string of the tangle's complex.
    String { input: String },
    /// Draw the dot diagram of the tangle's complex.
    Dot {
        input: String,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
    },
    /// Khovanov homology of the closure.
    Kh {
        input: String,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Kauffman bracket, unnormalized and normalized Jones polynomial.
    Jones { input: String },
    /// Compare both engines on every rational link up to a crossing count.
    Verify {
        #[arg(long, default_value_t = 8)]
        max_crossings: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClosureArg {
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrientationArg {
    Auto,
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Fast,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Table,
    Ascii,
    Svg,
}

struct Ctx {
    closure: Closure,
    orient: OrientationRequest,
}

/// What a verb produced: text to print and an exit code.
struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

/// Run the command line in `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let ctx = Ctx {
        closure: match cli.closure {
            ClosureArg::N => Closure::Numerator,
            ClosureArg::D => Closure::Denominator,
        },
        orient: match cli.orientation {
            OrientationArg::Auto => OrientationRequest::Auto,
            OrientationArg::One => OrientationRequest::Fixed(OrientationType::TypeI),
            OrientationArg::Two => OrientationRequest::Fixed(OrientationType::TypeII),
        },
    };
    let outcome = match dispatch(&cli.verb, &ctx) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if matches!(e, Error::Mismatch(_)) { 2 } else { 1 };
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => out.write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    outcome.code
}

fn input(text: &str) -> Result<Notation> {
    parse_tangle(text)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn dispatch(verb: &Verb, ctx: &Ctx) -> Result<Outcome> {
    match verb {
        Verb::Fraction { input: s } => Ok(Outcome::ok(format!("{}\n", input(s)?.fraction()))),
        Verb::Canonical { input: s } => {
            let f = input(s)?.fraction();
            let cf = canonical_form(&f)?;
            Ok(Outcome::ok(format!("{cf}\n{}\n", cf.to_standard_form())))
        }
        Verb::Classify { input: s } => {
            let f = input(s)?.fraction();
            let c = classify(&f)?;
            let v = json!({
                "fraction": f.to_string(),
                "components": c.components,
                "achiral": c.achiral,
                "strongly_invertible": c.strongly_invertible,
            });
            Ok(Outcome::ok(pretty(&v)))
        }
        Verb::String { input: s } => {
            let zz = zigzag_for(&input(s)?, ctx)?;
            Ok(Outcome::ok(format!("{}\n", zz.presentation().string)))
        }
        Verb::Dot { input: s, format } => {
            let zz = zigzag_for(&input(s)?, ctx)?;
            let f = match format {
                Format::Ascii | Format::Table => DotFormat::Ascii,
                Format::Svg => DotFormat::Svg,
                Format::Json => return Ok(Outcome::ok(pretty(&zz.to_json()))),
                Format::Tsv => return Err(Error::Domain("dot diagrams render as ascii, svg or json".into())),
            };
            Ok(Outcome::ok(render(&to_dot_diagram(&zz), f)))
        }
        Verb::Kh { input: s, engine, format } => kh(&input(s)?, *engine, *format, ctx),
        Verb::Jones { input: s } => jones(&input(s)?, ctx),
        Verb::Verify { max_crossings } => verify(*max_crossings, ctx),
    }
}

fn zigzag_for(n: &Notation, ctx: &Ctx) -> Result<crate::zigzag::ZigZagComplex> {
    let Some(sf) = working_form(n)? else {
        return Err(Error::Domain("[∞] has no crossings to build a morphism string from".into()));
    };
    Ok(build_zigzag(&sf, ctx.orient)?.complex)
}

fn render_homology(h: &BigradedHomology, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(pretty(&h.to_json())),
        Format::Tsv => Ok(kh_table(h).to_tsv()),
        Format::Table | Format::Ascii => Ok(kh_table(h).to_ascii()),
        Format::Svg => Err(Error::Domain("homology renders as json, tsv or table".into())),
    }
}

fn kh(n: &Notation, engine: Engine, format: Format, ctx: &Ctx) -> Result<Outcome> {
    let bound = cube::oracle_bound();
    match engine {
        Engine::Fast => Ok(Outcome::ok(render_homology(&kh_fast(n, ctx.closure, ctx.orient)?.homology, format)?)),
        Engine::Oracle => Ok(Outcome::ok(render_homology(&kh_cube(n, ctx.closure, ctx.orient, bound)?, format)?)),
        Engine::Both => {
            let c = compare(n, ctx.closure, ctx.orient, bound)?;
            if !c.agrees() {
                let ((t, q), a, b) = c.differences().remove(0);
                return Err(Error::Mismatch(format!("at t={t}, q={q}: fast {a:?}, oracle {b:?}")));
            }
            if format == Format::Json {
                return Ok(Outcome::ok(pretty(&c.to_json())));
            }
            Ok(Outcome::ok(render_homology(&c.fast, format)?))
        }
    }
}

fn jones(n: &Notation, ctx: &Ctx) -> Result<Outcome> {
    let d = oracle_diagram(n, ctx.closure, ctx.orient)?;
    let bound = cube::oracle_bound();
    let text = format!(
        "bracket: {}\nunnormalized: {}\nnormalized: {}\n",
        cube::kauffman_bracket(&d, bound)?,
        cube::unnormalized_jones(&d, bound)?,
        cube::jones(&d, bound)?
    );
    Ok(Outcome::ok(text))
}

fn verify(max: usize, ctx: &Ctx) -> Result<Outcome> {
    let bound = cube::oracle_bound().max(max);
    let started = Instant::now();
    let links = sweep_links(max);
    let mut text = String::new();
    for e in &links {
        let n = Notation::Fraction(e.fraction.clone());
        let sf = canonical_standard_form(&e.fraction)?;
        let mut trace_ok = true;
        if !sf.is_negative() {
            for ms in crate::zigzag::construct(&sf)?.strings {
                trace_ok &= validate_structure(&ms).is_ok();
            }
        }
        let fast = kh_fast(&n, ctx.closure, ctx.orient)?.homology;
        let d = oracle_diagram(&n, ctx.closure, ctx.orient)?;
        let oracle = cube::kh_oracle(&d, bound)?;
        let euler = fast.graded_euler() == cube::unnormalized_jones(&d, bound)?;
        let pass = fast == oracle && euler && trace_ok;
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            if pass { "PASS" } else { "FAIL" },
            e.fraction,
            e.form,
            e.crossings
        ));
        if !pass {
            let why = if !trace_ok {
                "a morphism string breaks the subword conditions".to_string()
            } else if !euler {
                "graded Euler characteristic differs from the bracket".to_string()
            } else {
                "homology differs between engines".to_string()
            };
            return Err(Error::Mismatch(format!("{} ({}): {why}", e.fraction, e.form)));
        }
    }
    text.push_str(&format!("{} links, all passed in {:.2?}\n", links.len(), started.elapsed()));
    Ok(Outcome::ok(text))
}
