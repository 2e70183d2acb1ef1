//! Command-line surface: argument resolution (flags over config-file
//! values over defaults), the connection input file reader, and the
//! report emitters for every subcommand.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{ArgAction, Parser, Subcommand};
use num::traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coeffs::{parse_rational, render_rational, PAdic, Rational};
use crate::connection::{
    evaluate_section, flatness_violation, independence_test, polylog, shuffle_check,
    solve_horizontal_partial, HorizontalSection, UniversalConnection,
};
use crate::derham::{gauge_reduce, parse_ratfunc, ConnMatrix, PlaceSet, RatFunc};
use crate::lcs_dims::{dim_ladder, elliptic_example, CurveShape};
use crate::ncseries::{shuffle_words, Word};
use crate::report::{PAdicJson, Report};
use crate::selmer::{find_crossing, BoundMode, CurveData};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "chabauty",
    version,
    about = "Desk-scale computations for the unipotent method on curves"
)]
struct Cli {
    /// Flat key = value config file; flags take precedence over its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: human, json, or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lower-central-series dimension ladder for a curve shape.
    Dims {
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        punctures: Option<u32>,
        #[arg(long = "max-n")]
        max_n: Option<u64>,
        /// Compact curve (no punctures).
        #[arg(long, action = ArgAction::SetTrue)]
        compact: bool,
    },
    /// Selmer bound ladder and the first level where the quotient wins.
    Crossing {
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        punctures: Option<u32>,
        #[arg(long, action = ArgAction::SetTrue)]
        compact: bool,
        /// conjecture2 or weak_jannsen.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long = "n-max")]
        n_max: Option<u64>,
        /// Report the worked rank-r elliptic chain instead of the ladder.
        #[arg(long = "elliptic-example", action = ArgAction::SetTrue)]
        elliptic_example: bool,
        #[arg(long)]
        rank: Option<u32>,
        /// Away-place weight-1 graded dimension (default 2g).
        #[arg(long)]
        gr1: Option<u32>,
        /// Away-place weight-2 graded dimension (default g).
        #[arg(long)]
        gr2: Option<u32>,
        /// Number of places above p.
        #[arg(long = "atp-places")]
        atp_places: Option<u32>,
        /// Global constant K in dim H^2 <= K dim V.
        #[arg(long = "k-const")]
        k_const: Option<u32>,
        /// Weak-Jannsen vanishing threshold k.
        #[arg(long = "jannsen-k")]
        jannsen_k: Option<u32>,
        /// Level from which the conjecture-2 injection is assumed.
        #[arg(long)]
        n0: Option<u64>,
    },
    /// p-adic polylogarithm Li_n(x) with a precision certificate.
    Polylog {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Solve the universal connection and emit the horizontal section.
    Solve {
        #[arg(long)]
        file: Option<PathBuf>,
        /// Use the standard P1 minus {0,1,infinity} connection.
        #[arg(long = "standard-p1", action = ArgAction::SetTrue)]
        standard_p1: bool,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Gauge-reduce a strictly upper-triangular connection matrix.
    Reduce {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Identity suite: flatness, shuffle pairs, point products,
    /// bounded-degree independence.
    Check {
        #[arg(long = "standard-p1", action = ArgAction::SetTrue)]
        standard_p1: bool,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long = "deg-bound")]
        deg_bound: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Human,
    Json,
    Csv,
}

/// Entry point returning the process exit code: 0 success, 1 domain
/// error, 2 internal invariant violation.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help/version are successes; everything else is a domain error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(output) => {
            println!("{output}");
            0
        }
        Err(Error::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Flag-or-config resolution: flags beat config keys beat defaults.
struct Opts {
    cfg: BTreeMap<String, String>,
}

impl Opts {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read config: {e}")))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(Error::InvalidInput(format!(
                        "config line {} is not 'key = value'",
                        lineno + 1
                    )));
                };
                cfg.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Opts { cfg })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidInput(format!("config key '{key}': bad value '{raw}'"))),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.get(flag, key)?
            .ok_or_else(|| Error::InvalidInput(format!("missing required --{key}")))
    }

    fn get_bool(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        Ok(self.get::<bool>(None, key)?.unwrap_or(false))
    }
}

fn parse_format(opts: &Opts, flag: Option<String>) -> Result<Format> {
    match opts
        .get(flag, "format")?
        .unwrap_or_else(|| "human".to_string())
        .as_str()
    {
        "human" => Ok(Format::Human),
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(Error::InvalidInput(format!(
            "unknown format '{other}' (expected human, json, or csv)"
        ))),
    }
}

fn run(cli: Cli) -> Result<String> {
    let opts = Opts::load(cli.config.as_deref())?;
    let format = parse_format(&opts, cli.format)?;
    match cli.cmd {
        Cmd::Dims {
            genus,
            punctures,
            max_n,
            compact,
        } => cmd_dims(&opts, format, genus, punctures, max_n, compact),
        Cmd::Crossing {
            genus,
            punctures,
            compact,
            mode,
            n_max,
            elliptic_example: elliptic,
            rank,
            gr1,
            gr2,
            atp_places,
            k_const,
            jannsen_k,
            n0,
        } => cmd_crossing(
            &opts, format, genus, punctures, compact, mode, n_max, elliptic, rank, gr1, gr2,
            atp_places, k_const, jannsen_k, n0,
        ),
        Cmd::Polylog { p, degree, x, order } => cmd_polylog(&opts, format, p, degree, x, order),
        Cmd::Solve {
            file,
            standard_p1,
            depth,
            order,
        } => cmd_solve(&opts, format, file, standard_p1, depth, order),
        Cmd::Reduce { file } => cmd_reduce(&opts, format, file),
        Cmd::Check {
            standard_p1,
            file,
            depth,
            deg_bound,
            order,
            p,
        } => cmd_check(&opts, format, standard_p1, file, depth, deg_bound, order, p),
    }
}

// ---------------------------------------------------------------- dims

#[derive(Serialize, Deserialize)]
struct DimsInputs {
    genus: u32,
    punctures: u32,
    max_n: u64,
}

fn cmd_dims(
    opts: &Opts,
    format: Format,
    genus: Option<u32>,
    punctures: Option<u32>,
    max_n: Option<u64>,
    compact: bool,
) -> Result<String> {
    let genus = opts.require(genus, "genus")?;
    let compact = opts.get_bool(compact, "compact")?;
    let punctures = if compact {
        0
    } else {
        opts.require(punctures, "punctures")?
    };
    let max_n = opts.get(max_n, "max-n")?.unwrap_or(6);
    let shape = CurveShape { genus, punctures };
    let report = dim_ladder(&shape, max_n)?;
    let inputs = DimsInputs {
        genus,
        punctures,
        max_n,
    };
    let warnings = report.warnings.clone();
    match format {
        Format::Json => to_json(&Report::new("dims", inputs, &report, warnings)),
        Format::Csv => {
            let mut out = String::from("level,d,dim_u,hodge_f,quotient_q\n");
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    l.level, l.d, l.dim_u, l.hodge_f, l.quotient_q
                );
            }
            Ok(out.trim_end().to_string())
        }
        Format::Human => {
            let mut out = format!(
                "dimension ladder, genus {} with {} puncture(s) [{}]\n",
                genus, punctures, report.case
            );
            let _ = writeln!(out, "{:>5} {:>10} {:>10} {:>10} {:>10}", "level", "d", "dim_u", "f", "q");
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "{:>5} {:>10} {:>10} {:>10} {:>10}",
                    l.level, l.d, l.dim_u, l.hodge_f, l.quotient_q
                );
            }
            for w in &warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            Ok(out.trim_end().to_string())
        }
    }
}

// ------------------------------------------------------------ crossing

#[derive(Serialize, Deserialize)]
struct CrossingInputs {
    mode: String,
    n_max: u64,
    data: CurveData,
}

#[allow(clippy::too_many_arguments)]
fn cmd_crossing(
    opts: &Opts,
    format: Format,
    genus: Option<u32>,
    punctures: Option<u32>,
    compact: bool,
    mode: Option<String>,
    n_max: Option<u64>,
    elliptic: bool,
    rank: Option<u32>,
    gr1: Option<u32>,
    gr2: Option<u32>,
    atp_places: Option<u32>,
    k_const: Option<u32>,
    jannsen_k: Option<u32>,
    n0: Option<u64>,
) -> Result<String> {
    if opts.get_bool(elliptic, "elliptic-example")? {
        let rank = opts.get(rank, "rank")?.unwrap_or(1);
        let rep = elliptic_example(rank);
        return match format {
            Format::Json => to_json(&Report::new(
                "crossing",
                serde_json::json!({ "elliptic_example": true, "rank": rank }),
                &rep,
                vec![],
            )),
            Format::Csv => Ok(format!(
                "rank,sel_u2,sel_z3_mod_z2,sel_u3,dim_u3,dim_f0_u3,dr_quotient,satisfied\n\
                 {},{},{},{},{},{},{},{}",
                rep.rank,
                rep.sel_u2,
                rep.sel_z3_mod_z2,
                rep.sel_u3,
                rep.dim_u3,
                rep.dim_f0_u3,
                rep.dr_quotient,
                rep.satisfied
            )),
            Format::Human => Ok(format!(
                "elliptic-minus-origin chain, rank {}\n\
                 dim Sel(U_2) = {}\n\
                 dim Sel(Z^3\\Z^2) = {}\n\
                 dim Sel(U_3) <= {}\n\
                 dim U_3 = {}, dim F0 = {}, quotient = {}\n\
                 verdict: {}",
                rep.rank,
                rep.sel_u2,
                rep.sel_z3_mod_z2,
                rep.sel_u3,
                rep.dim_u3,
                rep.dim_f0_u3,
                rep.dr_quotient,
                if rep.satisfied {
                    "satisfied (bound < quotient)"
                } else {
                    "not satisfied"
                }
            )),
        };
    }

    let genus = opts.require(genus, "genus")?;
    let compact = opts.get_bool(compact, "compact")?;
    let punctures = if compact {
        0
    } else {
        opts.require(punctures, "punctures")?
    };
    let shape = CurveShape { genus, punctures };
    shape.case()?;
    let mode_text = opts
        .get(mode, "mode")?
        .unwrap_or_else(|| "conjecture2".to_string());
    let mode = BoundMode::parse(&mode_text)?;
    let n_max = opts.get(n_max, "n-max")?.unwrap_or(20);

    let mut data = CurveData::with_defaults(shape);
    if let Some(v) = opts.get(atp_places, "atp-places")? {
        data.atp_places = v;
    }
    let gr1 = opts.get(gr1, "gr1")?;
    let gr2 = opts.get(gr2, "gr2")?;
    if gr1.is_some() || gr2.is_some() {
        for place in &mut data.away_places {
            if let Some(v) = gr1 {
                place.gr1 = v;
            }
            if let Some(v) = gr2 {
                place.gr2 = v;
            }
        }
    }
    if let Some(v) = opts.get(k_const, "k-const")? {
        data.k_const = v;
    }
    if let Some(v) = opts.get(jannsen_k, "jannsen-k")? {
        data.jannsen_k = v;
    }
    if let Some(v) = opts.get(n0, "n0")? {
        data.n0 = v;
    }

    let report = find_crossing(&data, mode, n_max)?;
    let inputs = CrossingInputs {
        mode: mode_text,
        n_max,
        data: data.clone(),
    };
    let warnings = report.warnings.clone();
    match format {
        Format::Json => to_json(&Report::new("crossing", inputs, &report, warnings)),
        Format::Csv => {
            let mut out = String::from("level,h2_summand,h1_summand,selmer_upper,quotient_q,gap\n");
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    l.level, l.h2_summand, l.h1_summand, l.selmer_upper, l.quotient_q, l.gap
                );
            }
            let _ = writeln!(
                out,
                "crossing,{}",
                report
                    .crossing
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "none".to_string())
            );
            Ok(out.trim_end().to_string())
        }
        Format::Human => {
            let mut out = format!(
                "Selmer bound ladder, genus {genus}, {punctures} puncture(s), mode {}\n",
                match report.mode {
                    BoundMode::Conjecture2 => "conjecture2",
                    BoundMode::WeakJannsen => "weak_jannsen",
                }
            );
            let _ = writeln!(
                out,
                "{:>5} {:>8} {:>8} {:>10} {:>10} {:>8}",
                "level", "h2", "h1", "S_n", "q_n", "gap"
            );
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "{:>5} {:>8} {:>8} {:>10} {:>10} {:>8}",
                    l.level, l.h2_summand, l.h1_summand, l.selmer_upper, l.quotient_q, l.gap
                );
            }
            match report.crossing {
                Some(n) => {
                    let _ = writeln!(out, "crossing at n* = {n}");
                }
                None => {
                    let _ = writeln!(out, "no crossing within n_max = {n_max}");
                }
            }
            for w in &warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            Ok(out.trim_end().to_string())
        }
    }
}

// ------------------------------------------------------------- polylog

#[derive(Serialize, Deserialize)]
struct PolylogInputs {
    p: u64,
    degree: usize,
    x: String,
    order: usize,
}

fn cmd_polylog(
    opts: &Opts,
    format: Format,
    p: Option<u64>,
    degree: Option<usize>,
    x: Option<String>,
    order: Option<usize>,
) -> Result<String> {
    let p = opts.require(p, "p")?;
    let degree = opts.require(degree, "degree")?;
    let x_text = opts.require(x, "x")?;
    let order = opts.get(order, "order")?.unwrap_or(60);
    let x_rat = parse_rational(&x_text)
        .ok_or_else(|| Error::InvalidInput(format!("bad rational --x '{x_text}'")))?;
    let prec = u32::try_from(order as u64 + 8).unwrap_or(u32::MAX);
    let x_p = PAdic::from_rational(p, &x_rat, prec);
    let value = polylog(p, degree, &x_p, order)?;
    let inputs = PolylogInputs {
        p,
        degree,
        x: render_rational(&x_rat),
        order,
    };
    let json_val = PAdicJson::from_padic(&value);
    match format {
        Format::Json => to_json(&Report::new("polylog", inputs, &json_val, vec![])),
        Format::Csv => Ok(format!(
            "prime,valuation,digits,rel_precision,abs_precision\n{},{},{},{},{}",
            json_val.prime,
            json_val
                .valuation
                .map(|v| v.to_string())
                .unwrap_or_else(|| "exact-zero".into()),
            json_val
                .digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            json_val.rel_precision,
            json_val
                .abs_precision
                .map(|v| v.to_string())
                .unwrap_or_else(|| "exact".into()),
        )),
        Format::Human => Ok(format!(
            "Li_{}({}) over Q_{} = {}",
            degree, inputs.x, p, value
        )),
    }
}

// -------------------------------------------- connection input files

/// Parsed `places / basepoint / rank / entry i j = expr` document.
pub struct ConnFile {
    pub places: PlaceSet,
    pub basepoint: Rational,
    pub rank: Option<usize>,
    pub entries: Vec<(usize, usize, RatFunc)>,
}

pub fn parse_conn_file(text: &str) -> Result<ConnFile> {
    let mut places: Option<PlaceSet> = None;
    let mut basepoint = Rational::zero();
    let mut rank: Option<usize> = None;
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| {
            Error::InvalidInput(format!("connection file line {}: {msg}", lineno + 1))
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad("expected 'key = value'"));
        };
        let key = key.trim();
        let value = value.trim();
        if key == "places" {
            let poles = value
                .split(',')
                .map(|s| {
                    parse_rational(s.trim())
                        .ok_or_else(|| bad(&format!("bad place '{}'", s.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            places = Some(PlaceSet::new(poles)?);
        } else if key == "basepoint" {
            basepoint =
                parse_rational(value).ok_or_else(|| bad("bad basepoint rational"))?;
        } else if key == "rank" {
            rank = Some(value.parse().map_err(|_| bad("bad rank"))?);
        } else if let Some(coords) = key.strip_prefix("entry") {
            let parts: Vec<&str> = coords.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(bad("entry needs 'entry i j = expr'"));
            }
            let i: usize = parts[0].parse().map_err(|_| bad("bad row index"))?;
            let j: usize = parts[1].parse().map_err(|_| bad("bad column index"))?;
            if i < 1 || j < 1 {
                return Err(bad("entry indices are 1-based"));
            }
            entries.push((i, j, parse_ratfunc(value)?));
        } else {
            return Err(bad(&format!("unknown key '{key}'")));
        }
    }
    let places = places.ok_or_else(|| {
        Error::InvalidInput("connection file must define 'places'".into())
    })?;
    Ok(ConnFile {
        places,
        basepoint,
        rank,
        entries,
    })
}

impl ConnFile {
    pub fn to_matrix(&self) -> Result<ConnMatrix> {
        let r = self.rank.ok_or_else(|| {
            Error::InvalidInput("connection file must define 'rank' for reduction".into())
        })?;
        let mut entries = vec![vec![RatFunc::zero(); r]; r];
        for (i, j, f) in &self.entries {
            if *i > r || *j > r {
                return Err(Error::InvalidInput(format!(
                    "entry ({i}, {j}) outside rank {r}"
                )));
            }
            entries[i - 1][j - 1] = f.clone();
        }
        ConnMatrix::new(r, entries)
    }

    pub fn to_connection(&self) -> Result<UniversalConnection> {
        UniversalConnection::from_places(self.places.clone(), self.basepoint.clone())
    }
}

// --------------------------------------------------------------- solve

#[derive(Serialize, Deserialize)]
struct SolveInputs {
    source: String,
    depth: usize,
    order: usize,
}

#[derive(Serialize, Deserialize)]
struct SolveResults {
    basepoint: String,
    alphabet: u8,
    /// word rendering -> series coefficients as canonical rationals
    sections: BTreeMap<String, Vec<String>>,
    divergent: Vec<String>,
}

fn section_results(sec: &HorizontalSection) -> SolveResults {
    SolveResults {
        basepoint: render_rational(&sec.basepoint),
        alphabet: sec.alphabet,
        sections: sec
            .series
            .iter()
            .map(|(w, s)| {
                (
                    if w.is_empty() { "1".to_string() } else { w.render() },
                    s.coeffs().iter().map(render_rational).collect(),
                )
            })
            .collect(),
        divergent: sec.divergent.iter().map(|w| w.render()).collect(),
    }
}

fn load_connection(
    opts: &Opts,
    file: Option<PathBuf>,
    standard_p1: bool,
) -> Result<(UniversalConnection, String)> {
    let standard = opts.get_bool(standard_p1, "standard-p1")?;
    let file = opts.get(file, "file")?;
    if standard {
        Ok((UniversalConnection::standard_p1(), "standard-p1".to_string()))
    } else if let Some(path) = file {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        let cf = parse_conn_file(&text)?;
        Ok((cf.to_connection()?, path.display().to_string()))
    } else {
        Err(Error::InvalidInput(
            "need --standard-p1 or --file for the connection".into(),
        ))
    }
}

fn cmd_solve(
    opts: &Opts,
    format: Format,
    file: Option<PathBuf>,
    standard_p1: bool,
    depth: Option<usize>,
    order: Option<usize>,
) -> Result<String> {
    let (conn, source) = load_connection(opts, file, standard_p1)?;
    let depth = opts.get(depth, "depth")?.unwrap_or(2);
    let order = opts.get(order, "order")?.unwrap_or(20);
    let sec = solve_horizontal_partial(&conn, depth, order)?;
    let mut warnings = Vec::new();
    if !sec.divergent.is_empty() {
        warnings.push(format!(
            "{} word(s) have divergent iterated integrals at the basepoint and were skipped",
            sec.divergent.len()
        ));
    }
    let inputs = SolveInputs {
        source,
        depth,
        order,
    };
    let results = section_results(&sec);
    match format {
        Format::Json => to_json(&Report::new("solve", inputs, &results, warnings)),
        Format::Csv => {
            let mut out = String::from("word,coefficients\n");
            for (w, coeffs) in &results.sections {
                let _ = writeln!(out, "{w},{}", coeffs.join(" "));
            }
            Ok(out.trim_end().to_string())
        }
        Format::Human => {
            let mut out = format!(
                "horizontal section at b = {}, depth {depth}, order {order}\n",
                results.basepoint
            );
            for (w, coeffs) in &results.sections {
                let shown: Vec<&String> = coeffs.iter().take(8).collect();
                let _ = writeln!(
                    out,
                    "u[{w}] = [{}{}]",
                    shown
                        .iter()
                        .map(|s| s.as_str())
                        .collect::<Vec<_>>()
                        .join(", "),
                    if coeffs.len() > 8 { ", ..." } else { "" }
                );
            }
            if !results.divergent.is_empty() {
                let _ = writeln!(out, "divergent words: {}", results.divergent.join(", "));
            }
            for w in &warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            Ok(out.trim_end().to_string())
        }
    }
}

// -------------------------------------------------------------- reduce

#[derive(Serialize, Deserialize)]
struct ReduceResults {
    gauge: Vec<Vec<String>>,
    reduced: Vec<Vec<String>>,
    identity_verified: bool,
}

fn cmd_reduce(opts: &Opts, format: Format, file: Option<PathBuf>) -> Result<String> {
    let path: PathBuf = opts.require(file, "file")?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let cf = parse_conn_file(&text)?;
    let omega = cf.to_matrix()?;
    let res = gauge_reduce(&omega, &cf.places)?;
    // symbolic re-verification of the gauge identity
    let r = omega.rank();
    let omega_entries: Vec<Vec<RatFunc>> = (0..r)
        .map(|i| (0..r).map(|j| omega.entry(i, j).clone()).collect())
        .collect();
    let recombined = crate::derham::gauge::apply_gauge(&omega_entries, &res.gauge);
    let identity_verified = (0..r).all(|i| {
        (0..r).all(|j| &recombined[i][j] == res.reduced.entry(i, j))
    });
    if !identity_verified {
        return Err(Error::Internal("gauge identity failed re-verification".into()));
    }
    let results = ReduceResults {
        gauge: res
            .gauge
            .iter()
            .map(|row| row.iter().map(|f| f.render()).collect())
            .collect(),
        reduced: (0..r)
            .map(|i| (0..r).map(|j| res.reduced.entry(i, j).render()).collect())
            .collect(),
        identity_verified,
    };
    let inputs = serde_json::json!({
        "file": path.display().to_string(),
        "rank": r,
    });
    match format {
        Format::Json => to_json(&Report::new("reduce", inputs, &results, vec![])),
        Format::Csv => {
            let mut out = String::from("matrix,row,col,entry\n");
            for (i, row) in results.gauge.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let _ = writeln!(out, "G,{},{},{}", i + 1, j + 1, e);
                }
            }
            for (i, row) in results.reduced.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let _ = writeln!(out, "omega_red,{},{},{}", i + 1, j + 1, e);
                }
            }
            let _ = writeln!(out, "identity_verified,,,{identity_verified}");
            Ok(out.trim_end().to_string())
        }
        Format::Human => {
            let mut out = String::from("gauge matrix G:\n");
            for row in &results.gauge {
                let _ = writeln!(out, "  [{}]", row.join(", "));
            }
            let _ = writeln!(out, "reduced connection (coefficients of dz):");
            for row in &results.reduced {
                let _ = writeln!(out, "  [{}]", row.join(", "));
            }
            let _ = writeln!(out, "identity omega_red = G^-1 omega G + G^-1 dG: verified");
            Ok(out.trim_end().to_string())
        }
    }
}

// --------------------------------------------------------------- check

#[derive(Serialize, Deserialize)]
struct CheckResults {
    flatness_ok: bool,
    shuffle_pairs_checked: usize,
    shuffle_pairs_passed: usize,
    point_products_checked: usize,
    point_products_passed: usize,
    independence_full_rank: bool,
    divergent_words: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    opts: &Opts,
    format: Format,
    standard_p1: bool,
    file: Option<PathBuf>,
    depth: Option<usize>,
    deg_bound: Option<usize>,
    order: Option<usize>,
    p: Option<u64>,
) -> Result<String> {
    let (conn, source) = load_connection(opts, file, standard_p1)?;
    let depth = opts.get(depth, "depth")?.unwrap_or(2);
    let deg_bound = opts.get(deg_bound, "deg-bound")?.unwrap_or(1);
    let order = opts.get(order, "order")?.unwrap_or(60);
    let p = opts.get(p, "p")?.unwrap_or(5);

    let sec = solve_horizontal_partial(&conn, depth, order)?;
    let flatness_ok = flatness_violation(&conn, &sec)?.is_none();

    // all shuffle pairs of computable words within depth
    let computable: Vec<Word> = sec.series.keys().cloned().collect();
    let mut pairs = 0usize;
    let mut pairs_passed = 0usize;
    for u in &computable {
        for v in &computable {
            if u.len() + v.len() > depth {
                continue;
            }
            pairs += 1;
            if shuffle_check(&sec, u, v)?.pass {
                pairs_passed += 1;
            }
        }
    }

    // group-like at sample points, restricted to computable coordinates:
    // coefficient products must match the shuffle combinations p-adically
    let prec = u32::try_from(order as u64 + 8).unwrap_or(u32::MAX);
    let mut point_checked = 0usize;
    let mut point_passed = 0usize;
    for mult in [1u64, 2] {
        let x = PAdic::from_int(p, (p * mult) as i64, prec);
        let val = evaluate_section(&sec, &x, prec)?;
        for u in &computable {
            for v in &computable {
                if u.len() + v.len() > depth || u > v {
                    continue;
                }
                let (Some(cu), Some(cv)) = (val.coeff(u), val.coeff(v)) else {
                    continue;
                };
                let lhs = cu.mul(cv);
                let mut rhs = PAdic::exact_zero(p);
                let mut all_present = true;
                for (w, m) in shuffle_words(u, v) {
                    match val.coeff(&w) {
                        Some(cw) => {
                            rhs = rhs.add(&cw.mul_exact_int(m as i64));
                        }
                        None => {
                            all_present = false;
                        }
                    }
                }
                if !all_present {
                    continue;
                }
                point_checked += 1;
                if lhs.agrees_with(&rhs) {
                    point_passed += 1;
                }
            }
        }
    }

    let independence = independence_test(&sec, deg_bound, order)?;

    let results = CheckResults {
        flatness_ok,
        shuffle_pairs_checked: pairs,
        shuffle_pairs_passed: pairs_passed,
        point_products_checked: point_checked,
        point_products_passed: point_passed,
        independence_full_rank: independence.full_rank,
        divergent_words: sec.divergent.iter().map(|w| w.render()).collect(),
    };
    let all_ok = flatness_ok
        && pairs == pairs_passed
        && point_checked == point_passed
        && independence.full_rank;
    let inputs = serde_json::json!({
        "source": source,
        "depth": depth,
        "deg_bound": deg_bound,
        "order": order,
        "p": p,
    });
    let mut warnings = Vec::new();
    if !results.divergent_words.is_empty() {
        warnings.push(
            "identities verified on the computable (convergent) coordinates only".to_string(),
        );
    }
    if !all_ok {
        return Err(Error::Internal(format!(
            "identity suite failed: flatness {}, shuffle {}/{}, points {}/{}, independence {}",
            flatness_ok,
            pairs_passed,
            pairs,
            point_passed,
            point_checked,
            independence.full_rank
        )));
    }
    match format {
        Format::Json => to_json(&Report::new("check", inputs, &results, warnings)),
        Format::Csv => Ok(format!(
            "check,result\nflatness,{}\nshuffle_pairs,{}/{}\npoint_products,{}/{}\nindependence_full_rank,{}",
            results.flatness_ok,
            results.shuffle_pairs_passed,
            results.shuffle_pairs_checked,
            results.point_products_passed,
            results.point_products_checked,
            results.independence_full_rank
        )),
        Format::Human => {
            let mut out = String::new();
            let _ = writeln!(out, "flatness identity: {}", if flatness_ok { "pass" } else { "FAIL" });
            let _ = writeln!(out, "shuffle pairs: {pairs_passed}/{pairs} pass");
            let _ = writeln!(
                out,
                "group-like point products: {point_passed}/{point_checked} pass"
            );
            let _ = writeln!(
                out,
                "independence (deg bound {deg_bound}): {}",
                if independence.full_rank { "full rank" } else { "DEGENERATE" }
            );
            for w in &warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            Ok(out.trim_end().to_string())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialization failed: {e}")))
}
