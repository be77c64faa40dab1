//! Command-line front end. Exit codes: 0 success, 1 a mathematical check
//! failed, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::Error;
use crate::exactla::inverse_gauss;
use crate::json::*;
use crate::matched::{enumerate_nonsingular, random_nonsingular, MatchedTree};
use crate::matrix::{PolyMat, QMat, RatMat};
use crate::qmatrices::*;
use crate::ratfun::{format_rational, parse_rational};
use crate::tree::Tree;
use crate::verify::{
    default_q_points, run_conjecture, run_enumerated, run_full_trees, run_random, run_suite,
    summary_line, SuiteOptions, VerificationReport,
};

/// Largest `p` accepted by `enum`.
pub const MAX_ENUM_P: usize = 9;
/// Largest vertex bound accepted by `--enumerate-upto` and `conjecture --upto`.
pub const MAX_ENUM_VERTICES: usize = 2 * MAX_ENUM_P;
/// Largest `p` accepted by `gen` and `--random`.
pub const MAX_RANDOM_P: usize = 5000;

#[derive(Debug, Parser)]
#[command(
    name = "qbd",
    version,
    about = "q-bipartite distance matrices of nonsingular trees"
)]
pub struct Cli {
    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one matrix or vector of a tree.
    Show(ShowArgs),
    /// Write the closed-form inverse of qB or E.
    Invert(InvertArgs),
    /// Run the identity suite.
    Verify(VerifyArgs),
    /// Write every nonsingular tree with p matching pairs, one JSON per line.
    Enum(EnumArgs),
    /// Write one random nonsingular tree.
    Gen(GenArgs),
    /// Diagonalizability and eigenvalue signs of the q = 1 Laplacian.
    Conjecture(ConjectureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShowArgs {
    #[arg(long)]
    pub tree: PathBuf,
    /// qB, E, qL, qD, eD, tau or mu:<vertex>.
    #[arg(long)]
    pub matrix: String,
    /// Evaluate at this rational point, written a/b.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub tree: PathBuf,
    /// qB or E.
    #[arg(long)]
    pub matrix: String,
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Also compute the Gauss-Jordan inverse and compare.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with_all = ["enumerate_upto", "random", "full_upto"])]
    pub tree: Option<PathBuf>,
    /// Every nonsingular tree with at most this many vertices.
    #[arg(long, conflicts_with_all = ["random", "full_upto"])]
    pub enumerate_upto: Option<usize>,
    /// Random trees given as p,trials; checked by exact evaluation.
    #[arg(long, conflicts_with = "full_upto")]
    pub random: Option<String>,
    /// Full-matrix determinants of every tree with at most this many vertices.
    #[arg(long)]
    pub full_upto: Option<usize>,
    /// Base seed for --random; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Evaluation points for --random; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Vec<String>,
    /// Skip the Gauss-Jordan comparison of the inverse formulas.
    #[arg(long)]
    pub no_oracle: bool,
    /// Write the full JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    /// Vertex bound 2p.
    #[arg(long)]
    pub upto: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

/// Text for standard output plus the exit code.
struct Outcome {
    stdout: String,
    code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(outcome) => {
            if stdout.write_all(outcome.stdout.as_bytes()).is_err() {
                return 2;
            }
            outcome.code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Show(a) => cmd_show(a),
        Command::Invert(a) => cmd_invert(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Enum(a) => cmd_enum(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Conjecture(a) => cmd_conjecture(a),
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_tree(path: &PathBuf) -> Result<Tree, Failure> {
    Ok(read_tree(&read_file(path)?)?)
}

fn load_matched(path: &PathBuf) -> Result<MatchedTree, Failure> {
    Ok(read_matched(&read_file(path)?)?)
}

fn parse_point(s: &str) -> Result<BigRational, Failure> {
    Ok(parse_rational(s)?)
}

/// Write `text` to `out` if given and return nothing for standard output.
fn emit(text: String, out: &Option<PathBuf>) -> Result<String, Failure> {
    match out {
        Some(path) => {
            fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn json_line(v: &Value) -> String {
    format!("{v}\n")
}

fn render_poly(m: &PolyMat, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(json_line(&matrix_to_json(m))),
        Format::Pretty => Ok(matrix_to_pretty(m)),
        Format::Csv => Err(Failure::Usage("csv output needs --at".into())),
    }
}

fn render_rat(m: &RatMat, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(json_line(&matrix_to_json(m))),
        Format::Pretty => Ok(matrix_to_pretty(m)),
        Format::Csv => Err(Failure::Usage("csv output needs --at".into())),
    }
}

fn render_q(m: &QMat, format: Format) -> String {
    match format {
        Format::Json => json_line(&matrix_to_json(m)),
        Format::Pretty => matrix_to_pretty(m),
        Format::Csv => matrix_to_csv(m),
    }
}

fn cmd_show(a: &ShowArgs) -> CmdResult {
    let at = a.at.as_deref().map(parse_point).transpose()?;
    let format = a.output.format;
    let name = a.matrix.as_str();
    let text = match name {
        "qD" | "eD" => {
            let t = load_tree(&a.tree)?;
            let m = if name == "qD" {
                build_full_qd(&t)
            } else {
                build_full_ed(&t)
            };
            match &at {
                Some(q0) => render_q(&m.eval(q0), format),
                None => render_poly(&m, format)?,
            }
        }
        "qB" | "E" | "qL" => {
            let mt = load_matched(&a.tree)?;
            let m = match name {
                "qB" => build_qb(&mt),
                "E" => build_e(&mt),
                _ => build_ql(&mt),
            };
            match &at {
                Some(q0) => render_q(&m.eval(q0), format),
                None => render_poly(&m, format)?,
            }
        }
        "tau" => {
            let mt = load_matched(&a.tree)?;
            let (tl, tr) = qtau(&mt);
            match (&at, format) {
                (None, Format::Json) => json_line(&json!({
                    "tau_l": vector_to_json(&tl),
                    "tau_r": vector_to_json(&tr),
                })),
                (None, Format::Pretty) => format!(
                    "tau_l {}tau_r {}",
                    vector_to_pretty(&tl),
                    vector_to_pretty(&tr)
                ),
                (None, Format::Csv) => return Err(Failure::Usage("csv output needs --at".into())),
                (Some(q0), _) => {
                    let (tl, tr) = qtau_at(&mt, q0);
                    match format {
                        Format::Json => json_line(&json!({
                            "tau_l": vector_to_json(&tl),
                            "tau_r": vector_to_json(&tr),
                        })),
                        Format::Pretty => {
                            format!(
                                "tau_l {}tau_r {}",
                                vector_to_pretty(&tl),
                                vector_to_pretty(&tr)
                            )
                        }
                        Format::Csv => format!("{}{}", vector_to_csv(&tl), vector_to_csv(&tr)),
                    }
                }
            }
        }
        _ => {
            let Some(v) = name.strip_prefix("mu:") else {
                return Err(Error::UnknownObject(name.into()).into());
            };
            let v: usize = v
                .parse()
                .map_err(|_| Failure::Usage(format!("bad vertex in {name:?}")))?;
            let mt = load_matched(&a.tree)?;
            let mu = qsigned_degree_vector(&mt, v)?;
            match (&at, format) {
                (None, Format::Json) => json_line(&vector_to_json(&mu)),
                (None, Format::Pretty) => vector_to_pretty(&mu),
                (None, Format::Csv) => return Err(Failure::Usage("csv output needs --at".into())),
                (Some(q0), _) => {
                    let mu = mu.map(|x| x.eval(q0));
                    match format {
                        Format::Json => json_line(&vector_to_json(&mu)),
                        Format::Pretty => vector_to_pretty(&mu),
                        Format::Csv => vector_to_csv(&mu),
                    }
                }
            }
        }
    };
    Ok(Outcome::ok(emit(text, &a.output.out)?))
}

/// Reject points outside the domain of the inverse formula, naming the
/// hypothesis.
fn check_excluded(name: &str, mt: &MatchedTree, q0: &BigRational) -> Result<(), Failure> {
    let tag = format_rational(q0);
    let one = BigRational::one();
    let minus_one = -BigRational::one();
    match name {
        "E" if q0.is_zero() || *q0 == one || *q0 == minus_one => Err(Failure::Usage(format!(
            "q = {tag} is excluded: the inverse of E needs q != 0, 1, -1"
        ))),
        "qB" if q0.is_zero() || *q0 == minus_one => Err(Failure::Usage(format!(
            "q = {tag} is excluded: the inverse of qB needs q != 0, -1 and bd_q(T) != 0"
        ))),
        "qB" if bdq_recursive(mt).eval(q0).is_zero() => Err(Failure::Usage(format!(
            "q = {tag} is excluded: bd_q(T) vanishes there, and the inverse of qB needs q != 0, -1 and bd_q(T) != 0"
        ))),
        _ => Ok(()),
    }
}

fn cmd_invert(a: &InvertArgs) -> CmdResult {
    let name = a.matrix.as_str();
    if name != "qB" && name != "E" {
        return Err(Failure::Usage(format!(
            "invert takes --matrix qB or E, not {name:?}"
        )));
    }
    let at = a.at.as_deref().map(parse_point).transpose()?;
    let mt = load_matched(&a.tree)?;
    let (m, formula) = if name == "E" {
        (build_e(&mt), inverse_e_formula(&mt))
    } else {
        (build_qb(&mt), inverse_qb_formula(&mt)?)
    };
    let format = a.output.format;
    if let Some(q0) = &at {
        check_excluded(name, &mt, q0)?;
    }
    if !a.oracle {
        let text = match &at {
            Some(q0) => render_q(&formula.eval(q0)?, format),
            None => render_rat(&formula, format)?,
        };
        return Ok(Outcome::ok(emit(text, &a.output.out)?));
    }
    let reference = inverse_gauss(&m)?;
    let equal = formula == reference;
    let text = match (&at, format) {
        (None, Format::Json) => json_line(&json!({
            "formula": matrix_to_json(&formula),
            "oracle": matrix_to_json(&reference),
            "equal": equal,
        })),
        (None, Format::Pretty) => format!(
            "formula {}oracle {}equal {equal}\n",
            matrix_to_pretty(&formula),
            matrix_to_pretty(&reference)
        ),
        (None, Format::Csv) => return Err(Failure::Usage("csv output needs --at".into())),
        (Some(q0), _) => {
            let (f, o) = (formula.eval(q0)?, reference.eval(q0)?);
            match format {
                Format::Json => json_line(&json!({
                    "formula": matrix_to_json(&f),
                    "oracle": matrix_to_json(&o),
                    "equal": equal,
                })),
                Format::Pretty => format!(
                    "formula {}oracle {}equal {equal}\n",
                    matrix_to_pretty(&f),
                    matrix_to_pretty(&o)
                ),
                Format::Csv => format!("{}{}equal,{equal}\n", matrix_to_csv(&f), matrix_to_csv(&o)),
            }
        }
    };
    let stdout = emit(text, &a.output.out)?;
    if equal {
        Ok(Outcome::ok(stdout))
    } else {
        Ok(Outcome {
            stdout: format!("{stdout}formula and Gauss-Jordan inverse differ\n"),
            code: 1,
        })
    }
}

fn parse_random(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--random takes p,trials, got {s:?}"));
    let (p, trials) = s.split_once(',').ok_or_else(bad)?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    let trials: usize = trials.trim().parse().map_err(|_| bad())?;
    if p == 0 || p > MAX_RANDOM_P {
        return Err(Failure::Usage(format!("p must be in 1..={MAX_RANDOM_P}")));
    }
    Ok((p, trials))
}

fn check_vertex_bound(n: usize, flag: &str) -> Result<usize, Failure> {
    if !(2..=MAX_ENUM_VERTICES).contains(&n) {
        return Err(Failure::Usage(format!(
            "{flag} must be in 2..={MAX_ENUM_VERTICES}"
        )));
    }
    Ok(n / 2)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let opts = SuiteOptions {
        oracle: !a.no_oracle,
        ..SuiteOptions::default()
    };
    let reports: Vec<VerificationReport> = if let Some(path) = &a.tree {
        vec![run_suite(&load_matched(path)?, opts)]
    } else if let Some(n) = a.enumerate_upto {
        run_enumerated(check_vertex_bound(n, "--enumerate-upto")?, opts)
    } else if let Some(spec) = &a.random {
        let (p, trials) = parse_random(spec)?;
        let points = if a.at.is_empty() {
            default_q_points()
        } else {
            a.at.iter()
                .map(|s| parse_point(s))
                .collect::<Result<Vec<_>, _>>()?
        };
        run_random(p, trials, a.seed, &points)
    } else if let Some(n) = a.full_upto {
        if !(2..=12).contains(&n) {
            return Err(Failure::Usage("--full-upto must be in 2..=12".into()));
        }
        run_full_trees(n)
    } else {
        return Err(Failure::Usage(
            "verify needs one of --tree, --enumerate-upto, --random or --full-upto".into(),
        ));
    };
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
        emit(text + "\n", &Some(path.clone()))?;
    }
    let summary = summary_line(&reports);
    let first = reports
        .iter()
        .find_map(|r| r.failures().next().map(|c| (r, c)));
    match first {
        None => Ok(Outcome::ok(format!("{summary}\n"))),
        Some((r, c)) => Ok(Outcome {
            stdout: format!(
                "FAIL tree {} check {}: {}\n{summary}\n",
                r.tree,
                c.name,
                c.witness.as_deref().unwrap_or("")
            ),
            code: 1,
        }),
    }
}

fn cmd_enum(a: &EnumArgs) -> CmdResult {
    if !(1..=MAX_ENUM_P).contains(&a.p) {
        return Err(Failure::Usage(format!("--p must be in 1..={MAX_ENUM_P}")));
    }
    let text: String = enumerate_nonsingular(a.p)
        .iter()
        .map(|mt| json_line(&matched_to_json(mt)))
        .collect();
    Ok(Outcome::ok(emit(text, &a.out)?))
}

fn cmd_gen(a: &GenArgs) -> CmdResult {
    if !(1..=MAX_RANDOM_P).contains(&a.p) {
        return Err(Failure::Usage(format!("--p must be in 1..={MAX_RANDOM_P}")));
    }
    let mt = random_nonsingular(a.p, a.seed);
    Ok(Outcome::ok(emit(json_line(&matched_to_json(&mt)), &a.out)?))
}

fn cmd_conjecture(a: &ConjectureArgs) -> CmdResult {
    let p_max = check_vertex_bound(a.upto, "--upto")?;
    let rows = run_conjecture(p_max);
    let mut text = String::new();
    if a.output.format == Format::Csv {
        text.push_str("tree,p,diagonalizable,nonneg,charpoly\n");
    }
    for row in &rows {
        let ev = &row.evidence;
        let charpoly: Vec<BigInt> = ev.charpoly.coeffs().to_vec();
        match a.output.format {
            Format::Json => text.push_str(&json_line(&json!({
                "tree": row.tree.code_hex(),
                "p": row.tree.p(),
                "diagonalizable": ev.diagonalizable,
                "nonneg": ev.all_eigen_nonneg,
                "charpoly": ev.charpoly.to_json(),
            }))),
            Format::Csv => text.push_str(&format!(
                "{},{},{},{},{}\n",
                row.tree.code_hex(),
                row.tree.p(),
                ev.diagonalizable,
                ev.all_eigen_nonneg,
                charpoly
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            )),
            Format::Pretty => text.push_str(&format!(
                "{:<28} p={} diagonalizable={} nonneg={} charpoly={}\n",
                row.tree.code_hex(),
                row.tree.p(),
                ev.diagonalizable,
                ev.all_eigen_nonneg,
                ev.charpoly
            )),
        }
    }
    let stdout = emit(text, &a.output.out)?;
    match rows.iter().find(|r| !r.holds()) {
        None => Ok(Outcome::ok(stdout)),
        Some(row) => Ok(Outcome {
            stdout: format!(
                "{stdout}counterexample {}\n",
                json!({
                    "tree": matched_to_json(&row.tree),
                    "code": row.tree.code_hex(),
                    "charpoly": row.evidence.charpoly.to_json(),
                    "squarefree": row.evidence.squarefree.to_json(),
                    "diagonalizable": row.evidence.diagonalizable,
                    "nonneg": row.evidence.all_eigen_nonneg,
                })
            ),
            code: 1,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("qbd").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn enum_counts() {
        let (code, out, _) = run_args(&["enum", "--p", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
        assert_eq!(run_args(&["enum", "--p", "0"]).0, 2);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["bogus"]).0, 2);
        assert_eq!(run_args(&["verify"]).0, 2);
        assert_eq!(run_args(&["verify", "--random", "x"]).0, 2);
        assert_eq!(run_args(&["conjecture", "--upto", "1"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn conjecture_small() {
        let (code, out, _) = run_args(&["conjecture", "--upto", "2"]);
        assert_eq!(code, 0);
        let row: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(row["diagonalizable"], json!(true));
        assert_eq!(row["nonneg"], json!(true));
    }
}
