//! Batch front end: `cf`, `discrepancy`, `subgroup`, `verify` and `charsum`.
//!
//! Every command produces an [`Outcome`] that can be rendered as a human
//! table, a single JSON [`RunReport`], or CSV rows with fixed headers.
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{
    build_pi, burgess_bound, burgess_bound_with, lemma1_bound, lemma1_bound_with, lemma1_sum, CharacterGroup,
    LogBase,
};
use crate::contfrac::expand;
use crate::error::Error;
use crate::lattice::{discrepancy_bound, discrepancy_exact_with_limit, LatticePointSet, DEFAULT_EXACT_LIMIT};
use crate::modmath::{primes_between, PrimeContext, SubgroupCoset, DEFAULT_DLOG_LIMIT};
use crate::report::{format_ratio, RunReport};
use crate::theorems::{
    corollary_check, hypothesis_check, theorem1_fraction, theorem1_proofstep_check, theorem1_threshold,
    theorem2_search,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Worker thread count; unset means one per logical core.
pub const THREADS_ENV: &str = "GOODLATTICE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "goodlattice", version, about = "Continued fractions, lattice discrepancy and character sums modulo p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit one JSON report object.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Emit CSV rows.
    #[arg(long, global = true)]
    pub csv: bool,

    /// Largest p for exact discrepancy.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub max_p_exact: u64,

    /// Largest p for which a discrete-log table is built.
    #[arg(long, global = true, default_value_t = DEFAULT_DLOG_LIMIT)]
    pub max_p_dlog: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continued fraction of a/p.
    Cf(CfArgs),
    /// Discrepancy of the point set (x/p, {ax/p}).
    Discrepancy(DiscrepancyArgs),
    /// Elements of a subgroup or coset.
    Subgroup(SubgroupArgs),
    /// Run a check over a range of primes.
    Verify(VerifyArgs),
    /// Character sums and their bounds.
    Charsum(CharsumArgs),
}

#[derive(Debug, Args)]
pub struct CfArgs {
    pub p: u64,
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    pub a: Option<u64>,
    /// One row per a in [1, p-1].
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct DiscrepancyArgs {
    pub p: u64,
    pub a: u64,
    #[arg(long, conflicts_with = "bound")]
    pub exact: bool,
    /// Only the continued-fraction bound 3(Σb + 1).
    #[arg(long)]
    pub bound: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct GroupSelect {
    /// Subgroup order m (must divide p - 1).
    #[arg(long, conflicts_with = "index")]
    pub order: Option<u64>,
    /// Subgroup index d, i.e. m = (p - 1) / d.
    #[arg(long)]
    pub index: Option<u64>,
    /// Coset representative v.
    #[arg(long, default_value_t = 1)]
    pub coset: u64,
}

#[derive(Debug, Args)]
pub struct SubgroupArgs {
    pub p: u64,
    #[command(flatten)]
    pub group: GroupSelect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremCheck {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    Corollary,
    Lemma1,
    Burgess,
    Proofstep,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Prime range `lo..hi` (inclusive) or a single prime.
    pub range: String,
    #[command(flatten)]
    pub group: GroupSelect,
    #[arg(long, value_enum)]
    pub theorem: TheoremCheck,
}

#[derive(Debug, Args)]
pub struct CharsumArgs {
    pub p: u64,
    /// Character index j in [0, p-2].
    #[arg(long = "char", conflicts_with = "sweep", required_unless_present = "sweep")]
    pub character: Option<u64>,
    /// All non-principal characters.
    #[arg(long)]
    pub sweep: bool,
    /// Sum over x = 1..N.
    #[arg(long, conflicts_with = "lemma1", required_unless_present = "lemma1")]
    pub interval: Option<u64>,
    /// Rectangle-family double sum with parameter c.
    #[arg(long)]
    pub lemma1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// A finished command, before rendering.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub lines: Vec<String>,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(command: &str, parameters: Value) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            results: Value::Null,
            lines: Vec::new(),
            csv_header: Vec::new(),
            csv_rows: Vec::new(),
            passed: true,
            warnings: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn report(&self, wall_time_ms: f64) -> RunReport {
        RunReport::new(
            self.command.clone(),
            self.parameters.clone(),
            self.results.clone(),
            wall_time_ms,
        )
    }

    pub fn render(&self, format: Format, wall_time_ms: f64) -> String {
        match format {
            Format::Human => {
                let mut out = String::new();
                for line in &self.lines {
                    let _ = writeln!(out, "{line}");
                }
                out
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report(wall_time_ms)).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.csv_header).expect("in-memory write");
                for row in &self.csv_rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
            }
        }
    }
}

/// Input rejected before any check ran.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UsageError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Invalid(String),
}

fn ratio_str(r: &Ratio<i64>) -> String {
    format_ratio(r)
}

fn context(p: u64, limit: u64) -> Result<Arc<PrimeContext>, UsageError> {
    Ok(Arc::new(PrimeContext::with_limit(p, limit)?))
}

fn select_coset(ctx: &Arc<PrimeContext>, sel: GroupSelect) -> Result<Option<SubgroupCoset>, UsageError> {
    let n = ctx.group_order();
    let m = match (sel.order, sel.index) {
        (Some(m), _) => m,
        (None, Some(d)) => {
            if d == 0 || !n.is_multiple_of(d) {
                return Ok(None);
            }
            n / d
        }
        (None, None) => n,
    };
    if m == 0 || !n.is_multiple_of(m) || sel.coset.is_multiple_of(ctx.p()) {
        return Ok(None);
    }
    Ok(Some(SubgroupCoset::subgroup(Arc::clone(ctx), m)?.coset(sel.coset as i128)?))
}

pub fn parse_range(text: &str) -> Result<(u64, u64), UsageError> {
    let bad = || UsageError::Invalid(format!("bad prime range {text:?}; expected lo..hi"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: u64 = lo.parse().map_err(|_| bad())?;
    let hi: u64 = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn execute(cli: &Cli) -> Result<Outcome, UsageError> {
    match &cli.command {
        Command::Cf(args) => cmd_cf(args),
        Command::Discrepancy(args) => cmd_discrepancy(args, cli.max_p_exact),
        Command::Subgroup(args) => cmd_subgroup(args, cli.max_p_dlog),
        Command::Verify(args) => cmd_verify(args, cli.max_p_dlog, cli.max_p_exact),
        Command::Charsum(args) => cmd_charsum(args, cli.max_p_dlog),
    }
}

const CF_HEADER: [&str; 6] = ["p", "a", "len", "sum", "max", "quotients"];

fn cf_row(p: u64, a: u64) -> Result<(Value, Vec<String>), UsageError> {
    let cf = expand(a, p)?;
    let quotients = cf.quotients().iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let convergents: Vec<String> = cf.convergents().iter().map(|(n, d)| format!("{n}/{d}")).collect();
    let value = json!({
        "a": a,
        "quotients": cf.quotients(),
        "convergents": convergents,
        "len": cf.len(),
        "sum": cf.sum_quotients(),
        "max": cf.max_quotient(),
    });
    let row = vec![
        p.to_string(),
        a.to_string(),
        cf.len().to_string(),
        cf.sum_quotients().to_string(),
        cf.max_quotient().to_string(),
        quotients,
    ];
    Ok((value, row))
}

fn cmd_cf(args: &CfArgs) -> Result<Outcome, UsageError> {
    let p = args.p;
    if !crate::modmath::is_prime(p) {
        return Err(Error::NotPrime(p).into());
    }
    let mut out = Outcome::new("cf", json!({ "p": p, "a": args.a, "all": args.all }));
    out.csv_header = CF_HEADER.to_vec();
    let values: Vec<u64> = match args.a {
        Some(a) => vec![a],
        None => (1..p).collect(),
    };
    let mut results = Vec::with_capacity(values.len());
    for a in values {
        let (value, row) = cf_row(p, a)?;
        if !args.all {
            out.lines.push(format!("{a}/{p} = [0; {}]", row[5]));
            out.lines.push(format!("quotients:   {}", row[5]));
            out.lines.push(format!(
                "convergents: {}",
                value["convergents"]
                    .as_array()
                    .map(|v| v.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", "))
                    .unwrap_or_default()
            ));
            out.lines.push(format!("length {}  sum {}  max {}", row[2], row[3], row[4]));
        } else {
            out.lines.push(format!("{:>8} {:>4} {:>8} {:>8}  {}", a, row[2], row[3], row[4], row[5]));
        }
        results.push(value);
        out.csv_rows.push(row);
    }
    if args.all {
        out.lines.insert(0, format!("{:>8} {:>4} {:>8} {:>8}  quotients", "a", "len", "sum", "max"));
        out.results = Value::Array(results);
    } else {
        out.results = results.pop().unwrap_or(Value::Null);
    }
    Ok(out)
}

fn cmd_discrepancy(args: &DiscrepancyArgs, max_exact: u64) -> Result<Outcome, UsageError> {
    let (p, a) = (args.p, args.a);
    let set = LatticePointSet::new(p, a)?;
    let cf = expand(a, p)?;
    let bound = discrepancy_bound(&cf);
    let mode = if args.bound { "bound" } else { "exact" };
    let mut out = Outcome::new("discrepancy", json!({ "p": p, "a": a, "mode": mode, "max_p_exact": max_exact }));
    if args.bound {
        out.results = json!({ "p": p, "a": a, "sum_quotients": cf.sum_quotients(), "cf_constant": 3, "cf_bound": bound });
        out.lines.push(format!("D_{p}({a}) <= 3 (sum b + 1) = {bound}   (sum b = {})", cf.sum_quotients()));
        out.csv_header = vec!["p", "a", "sum_quotients", "cf_bound"];
        out.csv_rows.push(vec![p.to_string(), a.to_string(), cf.sum_quotients().to_string(), bound.to_string()]);
        return Ok(out);
    }
    if p > max_exact {
        return Err(UsageError::Invalid(format!(
            "p = {p} exceeds --max-p-exact {max_exact}; raise the limit or use --bound"
        )));
    }
    let d = discrepancy_exact_with_limit(&set, max_exact)?;
    out.passed = d.within_cf_bound();
    out.results = serde_json::to_value(&d).expect("reports serialize");
    let mode_name = match d.argmax.mode {
        crate::lattice::BoxMode::Closed => "closed",
        crate::lattice::BoxMode::Open => "open",
    };
    out.lines.push(format!("D_{p}({a}) = {} = {:.6}", ratio_str(&d.value), d.value_f64));
    out.lines.push(format!(
        "extremal box: {} [0, {}] x [0, {}]",
        mode_name,
        ratio_str(&d.argmax.gamma1),
        ratio_str(&d.argmax.gamma2)
    ));
    out.lines.push(format!(
        "cf bound: 3 (sum b + 1) = {}   ratio D / (sum b + 1) = {:.4}",
        d.cf_bound,
        d.value_f64 / (d.sum_quotients + 1) as f64
    ));
    out.csv_header = vec!["p", "a", "d", "d_decimal", "gamma1", "gamma2", "mode", "sum_quotients", "cf_bound"];
    out.csv_rows.push(vec![
        p.to_string(),
        a.to_string(),
        ratio_str(&d.value),
        format!("{:.12}", d.value_f64),
        ratio_str(&d.argmax.gamma1),
        ratio_str(&d.argmax.gamma2),
        mode_name.to_string(),
        d.sum_quotients.to_string(),
        d.cf_bound.to_string(),
    ]);
    Ok(out)
}

fn cmd_subgroup(args: &SubgroupArgs, max_dlog: u64) -> Result<Outcome, UsageError> {
    let ctx = context(args.p, max_dlog)?;
    let r = select_coset(&ctx, args.group)?.ok_or_else(|| {
        UsageError::Invalid(format!(
            "no subgroup of order {:?} / index {:?} with coset {} modulo {}",
            args.group.order, args.group.index, args.group.coset, args.p
        ))
    })?;
    let mut out = Outcome::new(
        "subgroup",
        json!({ "p": args.p, "order": r.order(), "index": r.index(), "coset": args.group.coset }),
    );
    out.results = json!({
        "p": args.p,
        "generator": ctx.generator(),
        "order": r.order(),
        "index": r.index(),
        "coset": r.representative(),
        "elements": r.elements(),
    });
    out.lines.push(format!(
        "p = {}  g = {}  order {}  index {}  coset {}",
        args.p,
        ctx.generator(),
        r.order(),
        r.index(),
        r.representative()
    ));
    out.lines
        .push(r.elements().iter().map(u64::to_string).collect::<Vec<_>>().join(" "));
    out.csv_header = vec!["p", "order", "coset", "element"];
    for &e in r.elements() {
        out.csv_rows.push(vec![args.p.to_string(), r.order().to_string(), r.representative().to_string(), e.to_string()]);
    }
    Ok(out)
}

/// Characters and N values covered by the Burgess check.
const BURGESS_RS: [u32; 3] = [1, 2, 3];

fn lemma1_parameters(p: u64) -> [f64; 4] {
    [2.0, 4.0, 16.0, theorem1_threshold(p)]
}

struct PrimeCheck {
    passed: bool,
    value: Value,
    row: Vec<String>,
    line: String,
}

fn verify_header(check: TheoremCheck) -> Vec<&'static str> {
    match check {
        TheoremCheck::One => vec!["p", "order", "coset", "threshold", "omega", "size", "fraction", "passed", "hyp1", "hyp2"],
        TheoremCheck::Two => vec!["p", "order", "coset", "best_a", "best_sum", "bound", "passed", "hyp1", "hyp2"],
        TheoremCheck::Corollary => vec!["p", "order", "coset", "best_a", "best_sum", "discrepancy", "ratio", "passed"],
        TheoremCheck::Lemma1 => vec!["p", "c", "max_abs_sum", "bound", "bound_log2", "passed"],
        TheoremCheck::Burgess => vec!["p", "r", "max_ratio", "worst_j", "worst_n", "passed"],
        TheoremCheck::Proofstep => vec!["p", "order", "coset", "t", "trials", "nonvacuous", "passed"],
    }
}

fn verify_prime(
    check: TheoremCheck,
    ctx: &Arc<PrimeContext>,
    r: &SubgroupCoset,
    max_exact: u64,
) -> Result<Vec<PrimeCheck>, UsageError> {
    let p = ctx.p();
    let (m, v) = (r.order(), r.representative());
    let hyp = hypothesis_check(p, r.len() as u64);
    let checks = match check {
        TheoremCheck::One => {
            let o = theorem1_fraction(r);
            let passed = o.fraction >= Ratio::new(1, 2);
            vec![PrimeCheck {
                passed,
                line: format!(
                    "p={p:<8} m={m:<8} v={v:<6} t={:<8.3} omega={}/{} = {:.4} {}  (hypotheses {}/{})",
                    o.threshold,
                    o.omega,
                    o.size,
                    o.fraction_f64,
                    pass_word(passed),
                    hyp.theorem1,
                    hyp.theorem2
                ),
                row: vec![
                    p.to_string(),
                    m.to_string(),
                    v.to_string(),
                    format!("{:.12}", o.threshold),
                    o.omega.to_string(),
                    o.size.to_string(),
                    format!("{}/{}", o.fraction.numer(), o.fraction.denom()),
                    passed.to_string(),
                    hyp.theorem1.to_string(),
                    hyp.theorem2.to_string(),
                ],
                value: json!({ "p": p, "order": m, "coset": v, "omega": o, "passed": passed, "hypotheses": hyp }),
            }]
        }
        TheoremCheck::Two => {
            let s = theorem2_search(r)?;
            vec![PrimeCheck {
                passed: s.within_bound,
                line: format!(
                    "p={p:<8} m={m:<8} v={v:<6} best a={:<8} sum b={:<6} bound={:.1} {}",
                    s.best_a,
                    s.best_sum,
                    s.bound,
                    pass_word(s.within_bound)
                ),
                row: vec![
                    p.to_string(),
                    m.to_string(),
                    v.to_string(),
                    s.best_a.to_string(),
                    s.best_sum.to_string(),
                    format!("{:.12}", s.bound),
                    s.within_bound.to_string(),
                    hyp.theorem1.to_string(),
                    hyp.theorem2.to_string(),
                ],
                value: json!({ "p": p, "order": m, "coset": v, "search": s, "passed": s.within_bound, "hypotheses": hyp }),
            }]
        }
        TheoremCheck::Corollary => {
            if p > max_exact {
                return Err(UsageError::Invalid(format!(
                    "p = {p} exceeds --max-p-exact {max_exact} needed for the corollary check"
                )));
            }
            let s = theorem2_search(r)?;
            let c = corollary_check(p, s.best_a, max_exact)?;
            vec![PrimeCheck {
                passed: c.within_bound,
                line: format!(
                    "p={p:<8} m={m:<8} v={v:<6} best a={:<8} D={} ratio={:.4} {}",
                    s.best_a,
                    ratio_str(&c.discrepancy),
                    c.ratio,
                    pass_word(c.within_bound)
                ),
                row: vec![
                    p.to_string(),
                    m.to_string(),
                    v.to_string(),
                    s.best_a.to_string(),
                    s.best_sum.to_string(),
                    ratio_str(&c.discrepancy),
                    format!("{:.12}", c.ratio),
                    c.within_bound.to_string(),
                ],
                value: json!({ "p": p, "order": m, "coset": v, "best_sum": s.best_sum, "corollary": c, "passed": c.within_bound }),
            }]
        }
        TheoremCheck::Lemma1 => {
            let group = CharacterGroup::new(Arc::clone(ctx));
            let mut out = Vec::new();
            for c in lemma1_parameters(p) {
                let fam = build_pi(p, c)?;
                let max = group
                    .nonprincipal()
                    .map(|chi| lemma1_sum(&fam, &chi).expect("non-principal").norm())
                    .fold(0.0f64, f64::max);
                let bound = lemma1_bound(p, c);
                let passed = max <= bound;
                out.push(PrimeCheck {
                    passed,
                    line: format!("p={p:<8} c={c:<10.4} max|sum|={max:<12.4} bound={bound:.1} {}", pass_word(passed)),
                    row: vec![
                        p.to_string(),
                        format!("{c:.12}"),
                        format!("{max:.12}"),
                        format!("{bound:.6}"),
                        format!("{:.6}", lemma1_bound_with(p, c, LogBase::Binary)),
                        passed.to_string(),
                    ],
                    value: json!({ "p": p, "c": c, "max_abs_sum": max, "bound": bound,
                                   "bound_log2": lemma1_bound_with(p, c, LogBase::Binary), "passed": passed }),
                });
            }
            out
        }
        TheoremCheck::Burgess => {
            let group = CharacterGroup::new(Arc::clone(ctx));
            let mut worst = [(0.0f64, 0u64, 0u64); 3];
            for chi in group.nonprincipal() {
                let prefix = chi.prefix_sums(p - 1);
                for n in 1..p {
                    let s = prefix.upto(n).norm();
                    for (slot, &r) in worst.iter_mut().zip(&BURGESS_RS) {
                        let ratio = s / burgess_bound(p, n, r);
                        if ratio > slot.0 {
                            *slot = (ratio, chi.index(), n);
                        }
                    }
                }
            }
            BURGESS_RS
                .iter()
                .zip(worst)
                .map(|(&r, (ratio, j, n))| {
                    let passed = ratio <= 1.0;
                    PrimeCheck {
                        passed,
                        line: format!(
                            "p={p:<8} r={r} max |sum|/bound={ratio:.6} at j={j} N={n} {}",
                            pass_word(passed)
                        ),
                        row: vec![
                            p.to_string(),
                            r.to_string(),
                            format!("{ratio:.12}"),
                            j.to_string(),
                            n.to_string(),
                            passed.to_string(),
                        ],
                        value: json!({ "p": p, "r": r, "max_ratio": ratio, "worst_j": j, "worst_n": n,
                                       "log2_bound_at_worst": burgess_bound_with(p, n.max(1), r, LogBase::Binary),
                                       "passed": passed }),
                    }
                })
                .collect()
        }
        TheoremCheck::Proofstep => {
            let t = theorem1_threshold(p);
            let mut nonvacuous = 0u64;
            let mut passed = true;
            for &a in r.elements() {
                let o = theorem1_proofstep_check(p, a, t)?;
                nonvacuous += u64::from(!o.vacuous());
                passed &= o.holds();
            }
            vec![PrimeCheck {
                passed,
                line: format!(
                    "p={p:<8} m={m:<8} v={v:<6} t={t:.3} S(a)=0 for {nonvacuous}/{} {}",
                    r.len(),
                    pass_word(passed)
                ),
                row: vec![
                    p.to_string(),
                    m.to_string(),
                    v.to_string(),
                    format!("{t:.12}"),
                    r.len().to_string(),
                    nonvacuous.to_string(),
                    passed.to_string(),
                ],
                value: json!({ "p": p, "order": m, "coset": v, "t": t, "trials": r.len(),
                               "nonvacuous": nonvacuous, "passed": passed }),
            }]
        }
    };
    Ok(checks)
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_verify(args: &VerifyArgs, max_dlog: u64, max_exact: u64) -> Result<Outcome, UsageError> {
    let (lo, hi) = parse_range(&args.range)?;
    let mut out = Outcome::new(
        "verify",
        json!({
            "range": [lo, hi],
            "order": args.group.order,
            "index": args.group.index,
            "coset": args.group.coset,
            "theorem": args.theorem,
            "max_p_exact": max_exact,
            "max_p_dlog": max_dlog,
        }),
    );
    out.csv_header = verify_header(args.theorem);
    let mut per_prime = Vec::new();
    let mut skipped = Vec::new();
    for p in primes_between(lo.max(3), hi) {
        let ctx = context(p, max_dlog)?;
        let Some(r) = select_coset(&ctx, args.group)? else {
            out.warnings.push(format!("skipping p = {p}: subgroup/coset selection not valid modulo {p}"));
            skipped.push(p);
            continue;
        };
        for c in verify_prime(args.theorem, &ctx, &r, max_exact)? {
            out.passed &= c.passed;
            out.lines.push(c.line);
            out.csv_rows.push(c.row);
            per_prime.push(c.value);
        }
    }
    let failures = per_prime.iter().filter(|v| v["passed"] == Value::Bool(false)).count();
    out.lines.push(format!(
        "{} checks, {} failed, {} primes skipped: {}",
        per_prime.len(),
        failures,
        skipped.len(),
        pass_word(out.passed)
    ));
    out.results = json!({ "checks": per_prime, "skipped": skipped, "failures": failures, "all_passed": out.passed });
    Ok(out)
}

fn cmd_charsum(args: &CharsumArgs, max_dlog: u64) -> Result<Outcome, UsageError> {
    let p = args.p;
    let ctx = context(p, max_dlog)?;
    let group = CharacterGroup::new(Arc::clone(&ctx));
    let chars: Vec<_> = match args.character {
        Some(j) => vec![group.character(j)?],
        None => group.nonprincipal().collect(),
    };
    let mut out = Outcome::new(
        "charsum",
        json!({ "p": p, "char": args.character, "sweep": args.sweep, "interval": args.interval, "lemma1": args.lemma1 }),
    );
    let mut rows = Vec::new();
    if let Some(n) = args.interval {
        if n == 0 {
            return Err(UsageError::Invalid("--interval must be at least 1".into()));
        }
        out.csv_header = vec!["p", "j", "n", "re", "im", "abs", "burgess_r1", "burgess_r2", "burgess_r3", "passed"];
        let mut max_abs = 0.0f64;
        for chi in &chars {
            let s = chi.interval_sum(n);
            let bounds: Vec<f64> = BURGESS_RS.iter().map(|&r| burgess_bound(p, n, r)).collect();
            let passed = chi.is_principal() || bounds.iter().all(|&b| s.norm() <= b);
            out.passed &= passed;
            max_abs = max_abs.max(s.norm());
            out.lines.push(format!(
                "p={p} j={:<6} N={n:<8} sum={:.6}{:+.6}i |sum|={:.6} burgess(r=1,2,3)={:.2},{:.2},{:.2} {}",
                chi.index(),
                s.re,
                s.im,
                s.norm(),
                bounds[0],
                bounds[1],
                bounds[2],
                pass_word(passed)
            ));
            out.csv_rows.push(vec![
                p.to_string(),
                chi.index().to_string(),
                n.to_string(),
                format!("{:.12}", s.re),
                format!("{:.12}", s.im),
                format!("{:.12}", s.norm()),
                format!("{:.6}", bounds[0]),
                format!("{:.6}", bounds[1]),
                format!("{:.6}", bounds[2]),
                passed.to_string(),
            ]);
            rows.push(json!({ "j": chi.index(), "n": n, "re": s.re, "im": s.im, "abs": s.norm(),
                              "burgess": bounds, "passed": passed }));
        }
        out.results = json!({ "rows": rows, "max_abs": max_abs, "all_passed": out.passed });
    } else if let Some(c) = args.lemma1 {
        let fam = build_pi(p, c)?;
        let bound = lemma1_bound(p, c);
        out.csv_header = vec!["p", "j", "c", "re", "im", "abs", "bound", "passed"];
        let mut max_abs = 0.0f64;
        for chi in &chars {
            let s = lemma1_sum(&fam, chi)?;
            let passed = s.norm() <= bound;
            out.passed &= passed;
            max_abs = max_abs.max(s.norm());
            out.csv_rows.push(vec![
                p.to_string(),
                chi.index().to_string(),
                format!("{c:.12}"),
                format!("{:.12}", s.re),
                format!("{:.12}", s.im),
                format!("{:.12}", s.norm()),
                format!("{bound:.6}"),
                passed.to_string(),
            ]);
            if !args.sweep {
                out.lines.push(format!(
                    "p={p} j={} c={c} sum={:.6}{:+.6}i |sum|={:.6} bound={bound:.1} {}",
                    chi.index(),
                    s.re,
                    s.im,
                    s.norm(),
                    pass_word(passed)
                ));
            }
            rows.push(json!({ "j": chi.index(), "re": s.re, "im": s.im, "abs": s.norm(), "passed": passed }));
        }
        if args.sweep {
            out.lines.push(format!(
                "p={p} c={c} rectangles={} max over {} characters |sum|={max_abs:.6} bound={bound:.1} {}",
                fam.len(),
                chars.len(),
                pass_word(out.passed)
            ));
        }
        out.results = json!({ "rows": rows, "max_abs": max_abs, "bound": bound,
                              "bound_log2": lemma1_bound_with(p, c, LogBase::Binary),
                              "rectangles": fam.len(), "all_passed": out.passed });
    }
    Ok(out)
}

/// Reads [`THREADS_ENV`] and sizes the global pool; returns the thread count in use.
pub fn configure_threads() -> usize {
    let requested = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    if let Some(n) = requested.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}

/// Parses arguments, runs the command, writes output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = configure_threads();
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Human
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut outcome) => {
            if let Value::Object(map) = &mut outcome.parameters {
                map.insert("threads".into(), json!(threads));
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let wall = start.elapsed().as_secs_f64() * 1e3;
            print!("{}", outcome.render(format, wall));
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
