//! The `fibrank` command line.
//!
//! Every command produces one [`OutputRecord`]. Big integers travel as
//! decimal strings in every format.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fibstruct::z_oracle_budgeted;
use crate::lcmkit::{decompose_ints, decompose_run, RunSpec};
use crate::orderprod::{
    z_from_table, z_product_closed, z_product_general, z_product_oracle, ProductSpec, Route,
    ZResult, DEFAULT_ORACLE_BUDGET,
};
use crate::tables::{corollary_tables, theorem_table, Base, Condition, ExtraFactor, ResidueTable};
use crate::valuation::{vp_fib, vp_lucas};
use crate::{fib, lucas, Family};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fibrank", version, about = "Order of appearance in the Fibonacci sequence")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Step budget for oracle scans.
    #[arg(long, env = "FIBRANK_ORACLE_BUDGET", default_value_t = DEFAULT_ORACLE_BUDGET, global = true)]
    pub oracle_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Fib,
    Lucas,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Fib => Family::Fibonacci,
            FamilyArg::Lucas => Family::Lucas,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LcmKind {
    Ints,
    Fib,
    Lucas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Auto,
    Closed,
    General,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableForm {
    Theorem,
    Gcd,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F_n.
    Fib { n: u64 },
    /// L_n.
    Lucas { n: u64 },
    /// z(m) by scanning residues modulo m.
    Z {
        #[arg(value_parser = parse_big)]
        m: BigUint,
    },
    /// v_p of F_n or L_n from the valuation laws.
    Vp {
        family: FamilyArg,
        p: u64,
        #[arg(value_parser = parse_big)]
        n: BigUint,
    },
    /// Least common multiple of a run of length k+1 starting at n.
    Lcm { kind: LcmKind, n: u64, k: u32 },
    /// z of F_n...F_{n+k} or L_n...L_{n+k}.
    Zprod {
        family: FamilyArg,
        n: u64,
        k: u32,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
    },
    /// Cross-check routes over a range of n.
    Verify {
        family: FamilyArg,
        n_min: u64,
        n_max: u64,
        /// Comma-separated run lengths [default: 4,5,6].
        k_set: Option<String>,
        /// Comma-separated routes among closed, general, oracle
        /// [default: closed,general].
        routes: Option<String>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print a residue table.
    Table {
        family: FamilyArg,
        k: u32,
        #[arg(long, value_enum, default_value_t = TableForm::Theorem)]
        form: TableForm,
    },
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    s.parse::<BigUint>().map_err(|_| format!("{s:?} is not a non-negative decimal integer"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub result: ResultFields,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultFields {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableOut {
    pub name: String,
    pub family: String,
    pub k: u32,
    pub base: String,
    pub extra: String,
    pub period: u64,
    pub rows: Vec<TableRowOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowOut {
    pub multiplier: String,
    pub conditions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOut {
    pub cases: u64,
    pub checks: u64,
    /// Route evaluations dropped for exceeding the oracle budget.
    pub skipped: u64,
    pub mismatches: Vec<CaseOut>,
}

/// One `(n, k)` of a sweep with the `z` each route produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseOut {
    pub n: u64,
    pub k: u32,
    pub outputs: BTreeMap<String, String>,
    pub agree: bool,
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Internal(_) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: msg.into() }
}

struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn new() -> Self {
        Inputs(BTreeMap::new())
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }
}

fn family_name(f: FamilyArg) -> &'static str {
    Family::from(f).short_name()
}

fn record(command: &str, inputs: Inputs, result: ResultFields) -> OutputRecord {
    OutputRecord { command: command.to_string(), inputs: inputs.0, result, ms: 0.0 }
}

fn zresult_fields(r: &ZResult) -> ResultFields {
    ResultFields {
        z: Some(r.z.to_string()),
        a: Some(r.base_a.to_string()),
        j: Some(r.multiplier_j.to_string()),
        c: Some(r.extra_c.to_string()),
        branch: r.residue_case.clone(),
        form: r.row_label.clone(),
        route: Some(r.route.name().to_string()),
        ..Default::default()
    }
}

fn condition_text(c: &Condition) -> String {
    match c {
        Condition::Residues { modulus, residues } => {
            let list: Vec<String> = residues.iter().map(u64::to_string).collect();
            format!("n≡{} (mod {modulus})", list.join(","))
        }
        Condition::Otherwise => "otherwise".to_string(),
    }
}

fn base_name(base: Base) -> &'static str {
    match base {
        Base::Lcm => "a=[n..n+k]",
        Base::DoubleLcm => "a=2[n..n+k]",
        Base::Product => "n(n+1)...(n+k)",
    }
}

fn extra_name(extra: ExtraFactor) -> &'static str {
    match extra {
        ExtraFactor::None => "1",
        ExtraFactor::FiveN => "c=(5,n)",
        ExtraFactor::FiveNN1 => "c=(5,n(n+1))",
    }
}

pub fn table_out(t: &ResidueTable) -> TableOut {
    TableOut {
        name: t.name.to_string(),
        family: t.family.short_name().to_string(),
        k: t.k,
        base: base_name(t.base).to_string(),
        extra: extra_name(t.extra).to_string(),
        period: t.period(),
        rows: t
            .rows
            .iter()
            .map(|row| TableRowOut {
                multiplier: row.label.to_string(),
                conditions: row.conditions.iter().map(condition_text).collect(),
            })
            .collect(),
    }
}

fn select_table(family: Family, k: u32, form: TableForm) -> Result<&'static ResidueTable, Failure> {
    let theorem = theorem_table(family, k)?;
    let suffix = match form {
        TableForm::Theorem => return Ok(theorem),
        TableForm::Gcd => "-gcd",
        TableForm::Plain => "-plain",
    };
    let wanted = format!("{}{suffix}", theorem.name);
    corollary_tables(family, k)
        .iter()
        .copied()
        .find(|t| t.name == wanted)
        .ok_or_else(|| usage(format!("no {form:?} form for {family} k = {k}").to_lowercase()))
}

fn parse_k_set(list: &str) -> Result<Vec<u32>, Failure> {
    list.split(',')
        .map(|k| k.trim().parse().map_err(|_| usage(format!("{k:?} is not a run length"))))
        .collect()
}

fn parse_routes(list: &str) -> Result<Vec<Route>, Failure> {
    let mut out = Vec::new();
    for name in list.split(',') {
        let route = match name.trim() {
            "closed" => Route::ClosedForm,
            "general" => Route::General,
            "oracle" => Route::Oracle,
            other => return Err(usage(format!("unknown route {other:?}"))),
        };
        if !out.contains(&route) {
            out.push(route);
        }
    }
    if out.is_empty() {
        return Err(usage("no routes given"));
    }
    Ok(out)
}

fn route_key(r: Route) -> &'static str {
    match r {
        Route::ClosedForm => "closed",
        Route::General => "general",
        Route::Oracle => "oracle",
    }
}

struct CaseCheck {
    case: Option<CaseOut>,
    checks: u64,
    skipped: u64,
}

fn check_case(spec: ProductSpec, routes: &[Route], budget: u64) -> CaseCheck {
    let mut outputs = BTreeMap::new();
    let mut values = Vec::new();
    let mut skipped = 0;
    for &route in routes {
        let r = match route {
            Route::ClosedForm => z_product_closed(spec),
            Route::General => z_product_general(spec),
            Route::Oracle => z_product_oracle(spec, budget),
        };
        let text = match r {
            Ok(r) => {
                values.push(r.z.clone());
                r.z.to_string()
            }
            Err(Error::BudgetExceeded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => {
                values.push(BigUint::default());
                format!("error: {e}")
            }
        };
        outputs.insert(route_key(route).to_string(), text);
    }
    // Alternative closed forms of the same table must agree with the main one.
    if routes.contains(&Route::ClosedForm) {
        for t in corollary_tables(spec.family, spec.k) {
            let text = match z_from_table(t, spec.n) {
                Ok(r) => {
                    values.push(r.z.clone());
                    r.z.to_string()
                }
                Err(e) => {
                    values.push(BigUint::default());
                    format!("error: {e}")
                }
            };
            outputs.insert(t.name.to_string(), text);
        }
    }
    if values.is_empty() {
        return CaseCheck { case: None, checks: 0, skipped };
    }
    let agree = outputs.values().all(|v| !v.starts_with("error"))
        && values.windows(2).all(|w| w[0] == w[1]);
    let checks = values.len() as u64 - 1;
    CaseCheck { case: Some(CaseOut { n: spec.n, k: spec.k, outputs, agree }), checks, skipped }
}

pub struct VerifyRun {
    pub summary: VerifyOut,
    pub cases: Vec<CaseOut>,
}

/// Runs a verification sweep. Results come back sorted by `(n, k)` whatever
/// the number of workers.
pub fn run_verify(
    family: Family,
    n_range: (u64, u64),
    k_set: &[u32],
    routes: &[Route],
    jobs: usize,
    budget: u64,
) -> Result<VerifyRun, Failure> {
    let (n_min, n_max) = n_range;
    if n_min == 0 {
        return Err(usage("n_min must be at least 1"));
    }
    if n_min > n_max {
        return Err(usage(format!("empty range {n_min}..={n_max}")));
    }
    if k_set.is_empty() || k_set.contains(&0) {
        return Err(usage("k values must be at least 1"));
    }
    if routes.contains(&Route::ClosedForm) {
        if let Some(&k) = k_set.iter().find(|k| !(4..=6).contains(*k)) {
            return Err(Error::NoClosedForm(k).into());
        }
    }
    let specs: Vec<ProductSpec> = (n_min..=n_max)
        .flat_map(|n| k_set.iter().map(move |&k| ProductSpec::new(family, n, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| usage(format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<CaseCheck> =
        pool.install(|| specs.par_iter().map(|&s| check_case(s, routes, budget)).collect());

    let mut cases = Vec::new();
    let mut checks = 0;
    let mut skipped = 0;
    for r in results {
        checks += r.checks;
        skipped += r.skipped;
        cases.extend(r.case);
    }
    cases.sort_by_key(|c| (c.n, c.k));
    let summary = VerifyOut {
        cases: cases.len() as u64,
        checks,
        skipped,
        mismatches: cases.iter().filter(|c| !c.agree).cloned().collect(),
    };
    Ok(VerifyRun { summary, cases })
}

/// What a command produced: a record plus, for sweeps, per-case rows and an
/// exit code.
pub struct Outcome {
    pub record: OutputRecord,
    pub cases: Vec<CaseOut>,
    pub code: i32,
}

impl Outcome {
    fn ok(record: OutputRecord) -> Self {
        Outcome { record, cases: Vec::new(), code: EXIT_OK }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let budget = cli.oracle_budget;
    let started = Instant::now();
    let mut outcome = match &cli.command {
        Command::Fib { n } => Outcome::ok(record(
            "fib",
            Inputs::new().with("n", n),
            ResultFields { value: Some(fib(*n).to_string()), ..Default::default() },
        )),
        Command::Lucas { n } => Outcome::ok(record(
            "lucas",
            Inputs::new().with("n", n),
            ResultFields { value: Some(lucas(*n).to_string()), ..Default::default() },
        )),
        Command::Z { m } => {
            let z = z_oracle_budgeted(m, Some(budget))?;
            Outcome::ok(record(
                "z",
                Inputs::new().with("m", m),
                ResultFields { z: Some(z.to_string()), ..Default::default() },
            ))
        }
        Command::Vp { family, p, n } => {
            let r = match family {
                FamilyArg::Fib => vp_fib(*p, n)?,
                FamilyArg::Lucas => vp_lucas(*p, n)?,
            };
            Outcome::ok(record(
                "vp",
                Inputs::new().with("family", family_name(*family)).with("p", p).with("n", n),
                ResultFields {
                    value: Some(r.order.to_string()),
                    branch: Some(r.branch.label().to_string()),
                    ..Default::default()
                },
            ))
        }
        Command::Lcm { kind, n, k } => {
            let spec = RunSpec::new(*n, *k);
            let (name, d) = match kind {
                LcmKind::Ints => ("ints", decompose_ints(spec)?),
                LcmKind::Fib => ("fib", decompose_run(spec, Family::Fibonacci)?),
                LcmKind::Lucas => ("lucas", decompose_run(spec, Family::Lucas)?),
            };
            Outcome::ok(record(
                "lcm",
                Inputs::new().with("kind", name).with("n", n).with("k", k),
                ResultFields {
                    value: Some(d.lcm.to_string()),
                    product: Some(d.product.to_string()),
                    cofactor: Some(d.cofactor.to_string()),
                    ..Default::default()
                },
            ))
        }
        Command::Zprod { family, n, k, route } => {
            let spec = ProductSpec::new((*family).into(), *n, *k);
            let r = match route {
                RouteArg::Auto if (4..=6).contains(k) => z_product_closed(spec)?,
                RouteArg::Auto | RouteArg::General => z_product_general(spec)?,
                RouteArg::Closed => z_product_closed(spec)?,
                RouteArg::Oracle => z_product_oracle(spec, budget)?,
            };
            let route_name = format!("{route:?}").to_lowercase();
            Outcome::ok(record(
                "zprod",
                Inputs::new()
                    .with("family", family_name(*family))
                    .with("n", n)
                    .with("k", k)
                    .with("requested_route", route_name),
                zresult_fields(&r),
            ))
        }
        Command::Verify { family, n_min, n_max, k_set, routes, jobs } => {
            if n_min > n_max {
                return Err(usage(format!("empty range {n_min}..={n_max}")));
            }
            let k_set = parse_k_set(k_set.as_deref().unwrap_or("4,5,6"))?;
            let route_list = parse_routes(routes.as_deref().unwrap_or("closed,general"))?;
            let run = run_verify(
                (*family).into(),
                (*n_min, *n_max),
                &k_set,
                &route_list,
                *jobs,
                budget,
            )?;
            let ks: Vec<String> = k_set.iter().map(u32::to_string).collect();
            let rs: Vec<&str> = route_list.iter().map(|&r| route_key(r)).collect();
            let code = if run.summary.mismatches.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
            Outcome {
                record: record(
                    "verify",
                    Inputs::new()
                        .with("family", family_name(*family))
                        .with("n_min", n_min)
                        .with("n_max", n_max)
                        .with("k_set", ks.join(","))
                        .with("routes", rs.join(",")),
                    ResultFields { verify: Some(run.summary), ..Default::default() },
                ),
                cases: run.cases,
                code,
            }
        }
        Command::Table { family, k, form } => {
            let t = select_table((*family).into(), *k, *form)?;
            Outcome::ok(record(
                "table",
                Inputs::new()
                    .with("family", family_name(*family))
                    .with("k", k)
                    .with("form", format!("{form:?}").to_lowercase()),
                ResultFields { table: Some(table_out(t)), ..Default::default() },
            ))
        }
    };
    let micros = started.elapsed().as_micros() as f64;
    outcome.record.ms = (micros / 1000.0 * 1000.0).round() / 1000.0;
    Ok(outcome)
}

/// Serializes a record as JSON with keys in sorted order, so that parsing
/// and re-serializing reproduces the same bytes.
pub fn to_json(record: &OutputRecord) -> String {
    let value = serde_json::to_value(record).expect("records serialize");
    serde_json::to_string(&value).expect("values serialize")
}

fn scalar_fields(r: &ResultFields) -> Vec<(&'static str, &String)> {
    [
        ("value", &r.value),
        ("z", &r.z),
        ("a", &r.a),
        ("j", &r.j),
        ("c", &r.c),
        ("branch", &r.branch),
        ("form", &r.form),
        ("route", &r.route),
        ("product", &r.product),
        ("cofactor", &r.cofactor),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
    .collect()
}

fn write_text(out: &mut dyn Write, outcome: &Outcome) -> std::io::Result<()> {
    let r = &outcome.record.result;
    if let Some(t) = &r.table {
        writeln!(out, "{} (base {}, extra {}, period {})", t.name, t.base, t.extra, t.period)?;
        for row in &t.rows {
            writeln!(out, "  {:<40} if {}", row.multiplier, row.conditions.join(" or "))?;
        }
        return Ok(());
    }
    if let Some(v) = &r.verify {
        writeln!(
            out,
            "{} cases, {} checks, {} skipped, {} mismatches",
            v.cases,
            v.checks,
            v.skipped,
            v.mismatches.len()
        )?;
        for m in &v.mismatches {
            let parts: Vec<String> = m.outputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "mismatch n={} k={}: {}", m.n, m.k, parts.join(" "))?;
        }
        return Ok(());
    }
    let fields = scalar_fields(r);
    match fields.as_slice() {
        [(_, v)] => writeln!(out, "{v}"),
        _ => {
            for (k, v) in fields {
                writeln!(out, "{k}: {v}")?;
            }
            Ok(())
        }
    }
}

fn write_csv(out: &mut dyn Write, outcome: &Outcome) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let r = &outcome.record.result;
    if let Some(t) = &r.table {
        w.write_record(["table", "multiplier", "conditions"])?;
        for row in &t.rows {
            w.write_record([t.name.as_str(), &row.multiplier, &row.conditions.join(" or ")])?;
        }
    } else if r.verify.is_some() {
        let mut columns: Vec<String> = Vec::new();
        for case in &outcome.cases {
            for key in case.outputs.keys() {
                if !columns.contains(key) {
                    columns.push(key.clone());
                }
            }
        }
        let mut header = vec!["n".to_string(), "k".to_string(), "agree".to_string()];
        header.extend(columns.iter().cloned());
        w.write_record(&header)?;
        for case in &outcome.cases {
            let mut row = vec![case.n.to_string(), case.k.to_string(), case.agree.to_string()];
            row.extend(columns.iter().map(|c| case.outputs.get(c).cloned().unwrap_or_default()));
            w.write_record(&row)?;
        }
    } else {
        let inputs = &outcome.record.inputs;
        let fields = scalar_fields(r);
        let mut header: Vec<&str> = vec!["command"];
        header.extend(inputs.keys().map(String::as_str));
        header.extend(fields.iter().map(|(k, _)| *k));
        header.push("ms");
        w.write_record(&header)?;
        let mut row: Vec<String> = vec![outcome.record.command.clone()];
        row.extend(inputs.values().cloned());
        row.extend(fields.iter().map(|(_, v)| (*v).clone()));
        row.push(outcome.record.ms.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            return f.code;
        }
    };
    let written = match cli.format {
        Format::Text => write_text(out, &outcome),
        Format::Json => writeln!(out, "{}", to_json(&outcome.record)),
        Format::Csv => write_csv(out, &outcome).map_err(std::io::Error::other),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}
