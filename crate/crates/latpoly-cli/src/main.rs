//! Command-line front end for the latpoly library.
//!
//! Subcommands mirror the library modules: `lattice` builds and inspects
//! lattices, `poly` parses and normalizes polynomial functions, `assoc`
//! decides and constructs associative ones, and `verify` runs the bundled
//! verification suite.
//!
//! Exit codes: 0 on success or a passing check, 1 when a checked property
//! fails (the output carries a witness), 2 on usage or validation errors.
//! Output is deterministic for fixed flags; sampled verification is
//! seed-stamped. `--format json` wraps every result in an object carrying a
//! `schema` version field; text mode stays stable for golden tests.

use std::error::Error;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use latpoly::assoc::{
    classify_nary_budgeted, construct_nary, enumerate_associative_nary, extend_to_variadic,
    is_associative_nary_budgeted, is_associative_variadic_budgeted, AssocError, AssocParams,
    VariadicFn,
};
use latpoly::expr::TermExpr;
use latpoly::io::{self, IoError, LatticeFile, PolyFile, VariadicFile};
use latpoly::lattice::{Element, Lattice};
use latpoly::poly::PolynomialFn;
use latpoly::theorems::{verify, verify_all, Bounds, TheoremTag};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "latpoly",
    version,
    about = "Polynomial functions and associativity over finite bounded distributive lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Lattice file, or a shorthand: chain:<k>, boolean:<k>, product:<a>,<b>
    #[arg(long, global = true, value_name = "LATTICE")]
    lattice: Option<String>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Work budget for the decision procedures
    #[arg(long, global = true, default_value_t = latpoly::assoc::DEFAULT_BUDGET)]
    budget: u64,

    /// Longest word length scanned by variadic checks
    #[arg(long, global = true, default_value_t = 5)]
    maxlen: usize,

    /// Seed used when a verification falls back to sampling
    #[arg(long, global = true, default_value_t = latpoly::theorems::DEFAULT_SEED)]
    seed: u64,

    /// Worker threads (0 = machine parallelism)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build, inspect, and validate lattices
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Parse, evaluate, and normalize polynomial functions
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Associativity: decide, construct, classify, enumerate, extend
    #[command(subcommand)]
    Assoc(AssocCmd),
    /// Verify the bundled claims on a lattice: `all` or one tag
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Build a lattice from a shorthand and print its file form
    New {
        /// chain:<k>, boolean:<k>, or product:<a>,<b>
        shorthand: String,
    },
    /// Print the elements, covers, and bounds of --lattice
    Show,
    /// Check that --lattice is a valid bounded distributive lattice
    Check,
}

#[derive(Subcommand)]
enum PolyCmd {
    /// Parse an expression and print its minimal-parentheses form
    Parse {
        /// Term expression, e.g. "med(x1, 'a', x2) \/ x1 /\ x3"
        #[arg(long)]
        expr: String,
        /// Number of variables the expression may use
        #[arg(long)]
        arity: usize,
    },
    /// Evaluate an expression or polynomial file at one tuple
    Eval {
        #[arg(long, conflicts_with = "poly")]
        expr: Option<String>,
        #[arg(long)]
        poly: Option<PathBuf>,
        /// Comma-separated element names, e.g. c1,0,1
        #[arg(long, value_name = "ELEMS")]
        args: String,
    },
    /// Print the canonical coefficient map as a polynomial file
    Canon {
        #[arg(long, conflicts_with = "expr")]
        poly: Option<PathBuf>,
        #[arg(long, requires = "arity")]
        expr: Option<String>,
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Print the minimal coefficient map as a polynomial file
    Minimize {
        #[arg(long, conflicts_with = "expr")]
        poly: Option<PathBuf>,
        #[arg(long, requires = "arity")]
        expr: Option<String>,
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Decide whether a value table is a polynomial function
    IsPoly {
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Subcommand)]
enum AssocCmd {
    /// Decide associativity of a polynomial, table, or variadic family
    Check {
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Family file; checked for every word up to --maxlen
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Build the normal form for quadruple parameters
    Construct {
        /// Comma-separated element names a,b,c,d
        #[arg(long, value_name = "A,B,C,D")]
        params: String,
        #[arg(long)]
        arity: usize,
    },
    /// Recover the quadruple parameters of an associative polynomial
    Classify {
        #[arg(long)]
        poly: PathBuf,
    },
    /// List every associative polynomial function at one arity
    Enumerate {
        #[arg(long)]
        arity: usize,
    },
    /// Extend an associative polynomial to a variadic family
    Extend {
        #[arg(long)]
        poly: PathBuf,
    },
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// "all" or a tag: P1, L2, L3, P3, L4, T5, R2i, R2ii, T7, C1, P8, T9, C2
    target: String,
    /// Largest arity scanned by per-arity checks
    #[arg(long, default_value_t = 3)]
    max_arity: usize,
    /// Candidates drawn per sampled scan
    #[arg(long, default_value_t = 400)]
    samples: u32,
}

/// Pass prints and exits 0; Fail prints and exits 1 (a checked property did
/// not hold; the text carries the witness). Errors exit 2.
enum CmdOutput {
    Pass(String),
    Fail(String),
}

type CmdResult = Result<CmdOutput, Box<dyn Error>>;

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(CmdOutput::Pass(out)) => emit_stdout(&out),
        Ok(CmdOutput::Fail(out)) => {
            emit_stdout(&out);
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

/// Prints to stdout without panicking when the reader hangs up, so piping
/// into `head` truncates cleanly.
fn emit_stdout(text: &str) {
    use std::io::{ErrorKind, Write};
    if let Err(e) = writeln!(std::io::stdout(), "{text}") {
        if e.kind() != ErrorKind::BrokenPipe {
            eprintln!("error: cannot write to stdout: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Cmd::Lattice(cmd) => run_lattice(cli, cmd),
        Cmd::Poly(cmd) => run_poly(cli, cmd),
        Cmd::Assoc(cmd) => run_assoc(cli, cmd),
        Cmd::Verify(args) => run_verify(cli, args),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

/// Loads the --lattice argument. Files display under their stem so reports
/// read "T5 on chain2" for chain2.json; shorthands keep their built-in label.
fn load_lattice(spec: &str) -> Result<Lattice, IoError> {
    let l = io::load_lattice_spec(spec)?;
    if Lattice::from_shorthand(spec).is_none() {
        let stem = Path::new(spec)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(spec);
        return Ok(l.relabeled(stem));
    }
    Ok(l)
}

fn lattice_flag(cli: &Cli) -> Result<Option<Lattice>, Box<dyn Error>> {
    match &cli.lattice {
        None => Ok(None),
        Some(spec) => Ok(Some(load_lattice(spec)?)),
    }
}

fn require_lattice(cli: &Cli) -> Result<Lattice, Box<dyn Error>> {
    lattice_flag(cli)?
        .ok_or_else(|| "a lattice is required: pass --lattice <file-or-shorthand>".into())
}

/// Splits on commas outside of braces and parentheses, so names like
/// `{1,2}` and `(c1,0)` survive.
fn split_names(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i64;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '{' | '(' => {
                depth += 1;
                current.push(ch);
            }
            '}' | ')' => {
                depth -= 1;
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(ch),
        }
    }
    parts.push(current.trim().to_string());
    parts
}

fn parse_elements(l: &Lattice, s: &str) -> Result<Vec<Element>, Box<dyn Error>> {
    split_names(s)
        .iter()
        .map(|name| Ok(l.element_named(name)?))
        .collect()
}

/// Text goes out as is; JSON mode adds the schema version to the object.
fn emit(format: Format, text: String, json: Value) -> String {
    match format {
        Format::Text => text,
        Format::Json => {
            let mut v = json;
            v.as_object_mut()
                .expect("json outputs are objects")
                .insert("schema".to_string(), SCHEMA_VERSION.into());
            serde_json::to_string_pretty(&v).expect("value serializes")
        }
    }
}

/// A JSON string literal (quoted, escaped) for hand-assembled text lines.
fn js(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

// ---------------------------------------------------------------------------
// lattice

fn run_lattice(cli: &Cli, cmd: &LatticeCmd) -> CmdResult {
    match cmd {
        LatticeCmd::New { shorthand } => {
            let l = match Lattice::from_shorthand(shorthand) {
                Some(built) => built?,
                None => {
                    return Err(format!(
                        "{shorthand:?} is not a lattice shorthand; expected chain:<k>, \
                         boolean:<k>, or product:<a>,<b>"
                    )
                    .into())
                }
            };
            let file = LatticeFile::from_lattice(&l);
            let text = serde_json::to_string_pretty(&file)?;
            let json = serde_json::to_value(&file)?;
            Ok(CmdOutput::Pass(emit(cli.format, text, json)))
        }
        LatticeCmd::Show => {
            let l = require_lattice(cli)?;
            let names = l.element_names();
            let covers = l.cover_pairs();
            let cover_list: Vec<String> = covers
                .iter()
                .map(|&(x, y)| format!("{} < {}", names[x], names[y]))
                .collect();
            let text = format!(
                "{}: {} elements\nbottom: {}\ntop: {}\nelements: {}\ncovers: {}\nchain: {}",
                l.label(),
                l.size(),
                l.name(l.bottom()),
                l.name(l.top()),
                names.join(", "),
                cover_list.join(", "),
                if l.is_chain() { "yes" } else { "no" }
            );
            let json = json!({
                "label": l.label(),
                "size": l.size(),
                "bottom": l.name(l.bottom()),
                "top": l.name(l.top()),
                "elements": names,
                "covers": covers,
                "chain": l.is_chain(),
            });
            Ok(CmdOutput::Pass(emit(cli.format, text, json)))
        }
        LatticeCmd::Check => {
            let spec = cli
                .lattice
                .as_deref()
                .ok_or("a lattice is required: pass --lattice <file-or-shorthand>")?;
            match load_lattice(spec) {
                Ok(l) => {
                    let text = format!(
                        "ok: bounded distributive lattice, {} elements",
                        l.size()
                    );
                    let json = json!({"valid": true, "size": l.size()});
                    Ok(CmdOutput::Pass(emit(cli.format, text, json)))
                }
                // a missing file is a usage error, bad content is the
                // negative answer this command exists to report
                Err(e @ IoError::Read { .. }) => Err(e.into()),
                Err(e) => {
                    let text = format!("invalid: {e}");
                    let json = json!({"valid": false, "reason": e.to_string()});
                    Ok(CmdOutput::Fail(emit(cli.format, text, json)))
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// poly

/// Loads a polynomial either from a file or by lowering an expression.
fn input_polynomial(
    cli: &Cli,
    poly: &Option<PathBuf>,
    expr: &Option<String>,
    arity: &Option<usize>,
) -> Result<PolynomialFn, Box<dyn Error>> {
    match (poly, expr) {
        (Some(path), None) => {
            let external = lattice_flag(cli)?;
            Ok(io::load_poly(path, external.as_ref())?)
        }
        (None, Some(src)) => {
            let l = require_lattice(cli)?;
            let arity = arity.ok_or("--expr needs --arity")?;
            let e = TermExpr::parse(src, &l, arity)?;
            Ok(e.lower(&l, arity)?)
        }
        _ => Err("pass exactly one of --poly and --expr".into()),
    }
}

fn poly_file_output(cli: &Cli, f: &PolynomialFn) -> CmdResult {
    let file = PolyFile::from_polynomial(f, true);
    let text = serde_json::to_string_pretty(&file)?;
    let json = serde_json::to_value(&file)?;
    Ok(CmdOutput::Pass(emit(cli.format, text, json)))
}

fn run_poly(cli: &Cli, cmd: &PolyCmd) -> CmdResult {
    match cmd {
        PolyCmd::Parse { expr, arity } => {
            let l = require_lattice(cli)?;
            let e = TermExpr::parse(expr, &l, *arity)?;
            let pretty = e.pretty(&l);
            let json = json!({"arity": arity, "pretty": pretty});
            Ok(CmdOutput::Pass(emit(cli.format, pretty, json)))
        }
        PolyCmd::Eval { expr, poly, args } => {
            let (l, value) = match (expr, poly) {
                (Some(src), None) => {
                    let l = require_lattice(cli)?;
                    let xs = parse_elements(&l, args)?;
                    let e = TermExpr::parse(src, &l, xs.len())?;
                    let v = e.eval(&l, &xs)?;
                    (l, v)
                }
                (None, Some(path)) => {
                    let external = lattice_flag(cli)?;
                    let f = io::load_poly(path, external.as_ref())?;
                    let l = f.lattice().clone();
                    let xs = parse_elements(&l, args)?;
                    (l.clone(), f.eval(&xs)?)
                }
                _ => return Err("pass exactly one of --expr and --poly".into()),
            };
            let name = l.name(value).to_string();
            let json = json!({"value": name});
            Ok(CmdOutput::Pass(emit(cli.format, name, json)))
        }
        PolyCmd::Canon { poly, expr, arity } => {
            let f = input_polynomial(cli, poly, expr, arity)?;
            poly_file_output(cli, &f.canonical())
        }
        PolyCmd::Minimize { poly, expr, arity } => {
            let f = input_polynomial(cli, poly, expr, arity)?;
            poly_file_output(cli, &f.minimal())
        }
        PolyCmd::IsPoly { table } => {
            let external = lattice_flag(cli)?;
            let t = io::load_table(table, external.as_ref())?;
            match t.to_polynomial() {
                Ok(f) => {
                    let file = PolyFile::from_polynomial(&f.canonical(), false);
                    let text = "polynomial".to_string();
                    let json = json!({"polynomial": true, "alpha": file.alpha});
                    Ok(CmdOutput::Pass(emit(cli.format, text, json)))
                }
                Err(e) => {
                    let text = format!("not polynomial: {e}");
                    let json = json!({"polynomial": false, "witness": e.to_string()});
                    Ok(CmdOutput::Fail(emit(cli.format, text, json)))
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// assoc

fn run_assoc(cli: &Cli, cmd: &AssocCmd) -> CmdResult {
    match cmd {
        AssocCmd::Check {
            poly,
            table,
            family,
        } => {
            let external = lattice_flag(cli)?;
            let given = poly.is_some() as u8 + table.is_some() as u8 + family.is_some() as u8;
            if given != 1 {
                return Err("pass exactly one of --poly, --table, and --family".into());
            }
            let verdict = if let Some(path) = family {
                let g = io::load_variadic(path, external.as_ref())?;
                is_associative_variadic_budgeted(&g, cli.maxlen, cli.budget)?
                    .map(|w| w.render(g.lattice()))
            } else {
                let t = if let Some(path) = poly {
                    io::load_poly(path, external.as_ref())?.table()
                } else {
                    io::load_table(table.as_ref().unwrap(), external.as_ref())?
                };
                is_associative_nary_budgeted(&t, cli.budget)?.map(|w| w.render(t.lattice()))
            };
            match verdict {
                latpoly::Verdict::Holds => {
                    let json = json!({"associative": true});
                    Ok(CmdOutput::Pass(emit(cli.format, "associative".into(), json)))
                }
                latpoly::Verdict::Fails(w) => {
                    let text = format!("not associative; witness: {w}");
                    let json = json!({"associative": false, "witness": w});
                    Ok(CmdOutput::Fail(emit(cli.format, text, json)))
                }
            }
        }
        AssocCmd::Construct { params, arity } => {
            let l = require_lattice(cli)?;
            let elems = parse_elements(&l, params)?;
            if elems.len() != 4 {
                return Err(format!(
                    "--params needs four comma-separated element names, got {}",
                    elems.len()
                )
                .into());
            }
            let p = AssocParams::new(elems[0], elems[1], elems[2], elems[3]);
            let f = construct_nary(&l, *arity, p)?;
            poly_file_output(cli, &f)
        }
        AssocCmd::Classify { poly } => {
            let external = lattice_flag(cli)?;
            let f = io::load_poly(poly, external.as_ref())?;
            let l = f.lattice().clone();
            match classify_nary_budgeted(&f, cli.budget) {
                Ok(p) => {
                    let text = format!(
                        "{{\"associative\": true, \"a\": {}, \"b\": {}, \"c\": {}, \"d\": {}}}",
                        js(l.name(p.a)),
                        js(l.name(p.b)),
                        js(l.name(p.c)),
                        js(l.name(p.d))
                    );
                    let json = json!({
                        "associative": true,
                        "a": l.name(p.a),
                        "b": l.name(p.b),
                        "c": l.name(p.c),
                        "d": l.name(p.d),
                    });
                    Ok(CmdOutput::Pass(emit(cli.format, text, json)))
                }
                Err(AssocError::NotAssociative(w)) => {
                    let rendered = w.render(&l);
                    let text = format!(
                        "{{\"associative\": false, \"witness\": {}}}",
                        js(&rendered)
                    );
                    let json = json!({"associative": false, "witness": rendered});
                    Ok(CmdOutput::Fail(emit(cli.format, text, json)))
                }
                Err(e) => Err(e.into()),
            }
        }
        AssocCmd::Enumerate { arity } => {
            let l = require_lattice(cli)?;
            let members = enumerate_associative_nary(&l, *arity, cli.budget)?;
            let mut lines = vec![format!(
                "{} associative polynomial functions of arity {} on {}",
                members.len(),
                arity,
                l.label()
            )];
            let mut rows = Vec::with_capacity(members.len());
            for (p, _) in &members {
                lines.push(format!(
                    "a={} b={} c={} d={}",
                    l.name(p.a),
                    l.name(p.b),
                    l.name(p.c),
                    l.name(p.d)
                ));
                rows.push(json!({
                    "a": l.name(p.a),
                    "b": l.name(p.b),
                    "c": l.name(p.c),
                    "d": l.name(p.d),
                }));
            }
            let json = json!({
                "lattice": l.label(),
                "arity": arity,
                "count": members.len(),
                "members": rows,
            });
            Ok(CmdOutput::Pass(emit(cli.format, lines.join("\n"), json)))
        }
        AssocCmd::Extend { poly } => {
            let external = lattice_flag(cli)?;
            let f = io::load_poly(poly, external.as_ref())?;
            match extend_to_variadic(&f) {
                Ok(g) => {
                    let file = VariadicFile::from_family(&g, true);
                    let text = serde_json::to_string_pretty(&file)?;
                    let json = serde_json::to_value(&file)?;
                    Ok(CmdOutput::Pass(emit(cli.format, text, json)))
                }
                Err(AssocError::NotAssociative(w)) => {
                    let rendered = w.render(f.lattice());
                    let text = format!("not associative; witness: {rendered}");
                    let json = json!({"associative": false, "witness": rendered});
                    Ok(CmdOutput::Fail(emit(cli.format, text, json)))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// verify

fn run_verify(cli: &Cli, args: &VerifyArgs) -> CmdResult {
    let l = require_lattice(cli)?;
    let bounds = Bounds {
        max_arity: args.max_arity,
        maxlen: cli.maxlen,
        samples: args.samples,
        seed: cli.seed,
        budget: cli.budget,
    };
    let reports = if args.target.eq_ignore_ascii_case("all") {
        verify_all(&l, &bounds)?
    } else {
        let tag: TheoremTag = args.target.parse()?;
        vec![verify(tag, &l, &bounds)?]
    };
    let all_passed = reports.iter().all(|r| r.passed());
    let text = reports
        .iter()
        .map(|r| r.text_line())
        .collect::<Vec<_>>()
        .join("\n");
    let json = json!({"reports": reports});
    let out = emit(cli.format, text, json);
    if all_passed {
        Ok(CmdOutput::Pass(out))
    } else {
        Ok(CmdOutput::Fail(out))
    }
}
