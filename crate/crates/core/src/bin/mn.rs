use std::collections::HashMap;
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mnseries::calculus::{self, ChangeOfVariables, Form};
use mnseries::coeff;
use mnseries::driver::Driver;
use mnseries::expr::{self, expand, expand_on, extract_on, Expr, Scope};
use mnseries::identities::{self, DysonInstance, IdentityReport};
use mnseries::json;
use mnseries::order::{FieldSpec, PrecisionBox, DEFAULT_BOX_RADIUS};
use mnseries::series::{format_terms, Budget, Series};
use mnseries::{MnError, Result};

/// `println!` that tolerates a closed stdout, as in `mn ... | head`.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "mn", version, about = "Exact iterated Laurent series: expansion, residues, constant terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand an expression.
    Expand(FieldArgs),
    /// Constant term of an expression.
    Ct(ExtractArgs),
    /// Residue of an expression.
    Res(ExtractArgs),
    /// Jacobian determinant of the functions given with --cov.
    Jacobian(FieldArgs),
    /// Jacobian number of the functions given with --cov.
    Jnum(FieldArgs),
    /// Log Jacobian of the functions given with --cov.
    Lj(FieldArgs),
    /// Both sides of the residue theorem for --phi under --cov.
    Cov(CovArgs),
    /// Compositional inverse, or one of its coefficients with --phi and --k.
    Lagrange(LagrangeArgs),
    /// Dyson constant term identity.
    Dyson(DysonArgs),
    /// Dixon's alternating sum against the Dyson constant term.
    Dixon(DixonArgs),
    /// Wilson's v_j variables.
    Wilson(WilsonArgs),
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Variables, least significant first.
    #[arg(long)]
    vars: Option<String>,
    /// Order twist as a JSON matrix, one row per variable.
    #[arg(long)]
    twist: Option<String>,
    /// Full field description, `vars=x,y; twist=[[..]]`.
    #[arg(long)]
    spec: Option<String>,
    /// Evaluate on [-k, k] in every twisted coordinate.
    #[arg(long = "box", default_value_t = DEFAULT_BOX_RADIUS)]
    radius: i64,
    /// Expression, or @file.
    #[arg(long)]
    expr: Option<String>,
    /// Substituted functions separated by `;`.
    #[arg(long)]
    cov: Option<String>,
    /// Variables to act on (default: all, or the first ones for --cov).
    #[arg(long)]
    over: Option<String>,
    /// Rational parameter, `name=p/q`.
    #[arg(long = "bind")]
    bind: Vec<String>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Worker threads for batch work.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Integrand for the residue theorem; with --cov reports both sides.
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum FormArg {
    #[default]
    Res,
    Ct,
}

#[derive(Args, Debug)]
struct CovArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    phi: String,
    #[arg(long, value_enum, default_value_t)]
    form: FormArg,
}

#[derive(Args, Debug)]
struct LagrangeArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Total degree of the inverse.
    #[arg(long, default_value_t = 8)]
    degree: i64,
    #[arg(long)]
    phi: Option<String>,
    /// Multi-index `k1,k2,..`.
    #[arg(long)]
    k: Option<String>,
}

#[derive(Args, Debug)]
struct DysonArgs {
    /// Exponents `a1,a2,..`; repeat for a batch.
    #[arg(long = "a", required = true)]
    a: Vec<String>,
    #[arg(long)]
    generalized: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct DixonArgs {
    #[arg(long = "a", required = true)]
    a: String,
}

#[derive(Args, Debug)]
struct WilsonArgs {
    #[arg(long)]
    n: usize,
    /// Print v_j.
    #[arg(long)]
    j: Option<usize>,
    /// Check CT prod v_j^(-a_j) against the multinomial.
    #[arg(long = "a")]
    a: Option<String>,
    #[arg(long = "box", default_value_t = 4)]
    radius: i64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

/// Splices `--config FILE` lines (one flag per line) into the argument list.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let path = if a == "--config" {
            it.next().ok_or_else(|| MnError::Usage("--config needs a file".into()))?
        } else if let Some(p) = a.strip_prefix("--config=") {
            p.to_string()
        } else {
            out.push(a);
            continue;
        };
        let text = std::fs::read_to_string(&path).map_err(|e| MnError::Usage(format!("{path}: {e}")))?;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            match line.split_once(char::is_whitespace) {
                Some((flag, value)) => {
                    out.push(flag.to_string());
                    out.push(value.trim().to_string());
                }
                None => out.push(line.to_string()),
            }
        }
    }
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| MnError::Usage(format!("invalid {what} `{text}`"))))
        .collect()
}

fn read_expr(text: &str) -> Result<Expr> {
    match text.strip_prefix('@') {
        Some(path) => {
            let body = std::fs::read_to_string(path).map_err(|e| MnError::Usage(format!("{path}: {e}")))?;
            expr::parse(body.trim())
        }
        None => expr::parse(text),
    }
}

fn set_jobs(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

struct Context {
    spec: Arc<FieldSpec>,
    region: PrecisionBox,
    scope: Scope,
    format: Format,
    driver: Driver,
}

impl FieldArgs {
    fn context(&self) -> Result<Context> {
        set_jobs(self.jobs);
        let spec = match (&self.spec, &self.vars) {
            (Some(text), None) => FieldSpec::parse(text)?,
            (None, Some(vars)) => {
                let mut text = format!("vars={vars}");
                if let Some(t) = &self.twist {
                    text.push_str(&format!("; twist={t}"));
                }
                FieldSpec::parse(&text)?
            }
            (Some(_), Some(_)) => return Err(MnError::Usage("give either --spec or --vars".into())),
            (None, None) => return Err(MnError::Usage("--vars is required".into())),
        };
        if self.radius < 0 {
            return Err(MnError::Usage("--box must be nonnegative".into()));
        }
        let mut constants = HashMap::new();
        for b in &self.bind {
            let (name, value) = b.split_once('=').ok_or_else(|| MnError::Usage(format!("invalid binding `{b}`")))?;
            constants.insert(name.trim().to_string(), coeff::parse(value)?);
        }
        Ok(Context {
            region: PrecisionBox::symmetric(self.radius, spec.width()),
            spec: Arc::new(spec),
            scope: Scope::with_constants(constants),
            format: self.format,
            driver: Driver::default(),
        })
    }

    fn expr(&self) -> Result<Expr> {
        read_expr(self.expr.as_deref().ok_or_else(|| MnError::Usage("--expr is required".into()))?)
    }

    fn cov_exprs(&self) -> Result<Vec<Expr>> {
        let text = self.cov.as_deref().ok_or_else(|| MnError::Usage("--cov is required".into()))?;
        text.split(';').map(read_expr).collect()
    }

    /// Variables acted on: `--over`, else the first `count` variables, else all.
    fn over(&self, spec: &FieldSpec, count: Option<usize>) -> Result<Vec<String>> {
        match &self.over {
            Some(text) => Ok(text.split(',').map(|s| s.trim().to_string()).collect()),
            None => Ok(spec.vars()[..count.unwrap_or(spec.nvars()).min(spec.nvars())].to_vec()),
        }
    }
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    out!("{}", serde_json::to_string(value).map_err(|e| MnError::Usage(e.to_string()))?);
    Ok(())
}

fn print_series(ctx: &Context, s: &Series, region: &PrecisionBox) -> Result<()> {
    match ctx.format {
        Format::Json => emit(&json::series_json(s, region)?),
        Format::Text => {
            let terms = if s.is_exact() { s.terms().collect() } else { s.terms_in(region)? };
            let mut line = format_terms(s.spec(), &terms);
            if !s.is_exact() && s.spec().width() > 0 {
                line.push_str(" + ...");
            }
            out!("{line}");
            Ok(())
        }
    }
}

fn run_expand(a: &FieldArgs) -> Result<()> {
    let ctx = a.context()?;
    let s = expand_on(&a.expr()?, &ctx.spec, &ctx.region, &ctx.scope, &ctx.driver)?;
    print_series(&ctx, &s, &ctx.region)
}

#[derive(Serialize)]
struct CovExtractJson {
    value: json::SeriesJson,
    jacobian_number: i64,
    target: Option<String>,
}

fn run_extract(a: &ExtractArgs, form: Form) -> Result<()> {
    let ctx = a.field.context()?;
    let exps_value = if form == Form::Residue { -1 } else { 0 };
    let cov = match &a.field.cov {
        Some(_) => {
            let fs = a.field.cov_exprs()?;
            let over = a.field.over(&ctx.spec, Some(fs.len()))?;
            let over: Vec<&str> = over.iter().map(String::as_str).collect();
            Some(ChangeOfVariables::new(&ctx.spec, &over, fs, ctx.scope.clone(), &ctx.driver)?)
        }
        None => None,
    };
    if let (Some(cov), Some(phi)) = (&cov, &a.phi) {
        return print_verdict(&ctx, cov, &read_expr(phi)?, form);
    }
    if a.phi.is_some() {
        return Err(MnError::Usage("--phi needs --cov".into()));
    }
    let vars = match &cov {
        Some(c) => c.xvars.clone(),
        None => ctx.spec.indices_of(&a.field.over(&ctx.spec, None)?)?,
    };
    let exps = vec![exps_value; vars.len()];
    let (s, region) = extract_on(&a.field.expr()?, &ctx.spec, &vars, &exps, &ctx.region, &ctx.scope, &ctx.driver)?;
    match (&cov, ctx.format) {
        (Some(c), Format::Json) => emit(&CovExtractJson {
            value: json::series_json(&s, &region)?,
            jacobian_number: c.jnum,
            target: c.target.as_ref().map(|t| t.to_string()),
        }),
        _ => print_series(&ctx, &s, &region),
    }
}

fn print_verdict(ctx: &Context, cov: &ChangeOfVariables, phi: &Expr, form: Form) -> Result<()> {
    let v = cov.verify(phi, form, &ctx.region, &ctx.driver)?;
    match ctx.format {
        Format::Json => emit(&json::verdict_json(&v)?),
        Format::Text => {
            let show = |s: &Series| -> Result<String> {
                let terms = if s.is_exact() { s.terms().collect() } else { s.terms_in(&v.region)? };
                Ok(format_terms(s.spec(), &terms))
            };
            out!("lhs: {}", show(&v.lhs)?);
            out!("rhs: {}", show(&v.rhs)?);
            out!("jacobian number: {}", v.jnum);
            out!("equal: {}", v.equal);
            Ok(())
        }
    }
}

fn cov_series(ctx: &Context, a: &FieldArgs, budget: &Budget) -> Result<(Vec<Series>, Vec<usize>)> {
    let fs = a.cov_exprs()?;
    let over = ctx.spec.indices_of(&a.over(&ctx.spec, Some(fs.len()))?)?;
    let fs = fs.iter().map(|e| expand(e, &ctx.spec, budget, &ctx.scope)).collect::<Result<Vec<_>>>()?;
    Ok((fs, over))
}

fn run_jacobian(a: &FieldArgs, log: bool) -> Result<()> {
    let ctx = a.context()?;
    let s = ctx.driver.run(ctx.spec.width(), &ctx.region, |b| {
        let (fs, over) = cov_series(&ctx, a, b)?;
        if log {
            calculus::log_jacobian(&fs, &over, b)
        } else {
            calculus::jacobian(&fs, &over)
        }
    })?;
    print_series(&ctx, &s, &ctx.region)
}

fn run_jnum(a: &FieldArgs) -> Result<()> {
    let ctx = a.context()?;
    let fs = a.cov_exprs()?;
    let over = a.over(&ctx.spec, Some(fs.len()))?;
    let over: Vec<&str> = over.iter().map(String::as_str).collect();
    let cov = ChangeOfVariables::new(&ctx.spec, &over, fs, ctx.scope.clone(), &ctx.driver)?;
    match ctx.format {
        Format::Json => emit(&serde_json::json!({
            "jacobian_number": cov.jnum,
            "target": cov.target.as_ref().map(|t| t.to_string()),
        })),
        Format::Text => {
            out!("{}", cov.jnum);
            Ok(())
        }
    }
}

fn run_cov(a: &CovArgs) -> Result<()> {
    let ctx = a.field.context()?;
    let fs = a.field.cov_exprs()?;
    let over = a.field.over(&ctx.spec, Some(fs.len()))?;
    let over: Vec<&str> = over.iter().map(String::as_str).collect();
    let cov = ChangeOfVariables::new(&ctx.spec, &over, fs, ctx.scope.clone(), &ctx.driver)?;
    let form = match a.form {
        FormArg::Res => Form::Residue,
        FormArg::Ct => Form::ConstantTerm,
    };
    print_verdict(&ctx, &cov, &read_expr(&a.phi)?, form)
}

fn run_lagrange(a: &LagrangeArgs) -> Result<()> {
    let ctx = a.field.context()?;
    if !ctx.spec.twist().is_identity() {
        return Err(MnError::Usage("lagrange works in the identity order".into()));
    }
    let b = Budget::new(mnseries::Grading::geometric(1, ctx.spec.width()), 0);
    let fs: Vec<Series> = a.field.cov_exprs()?.iter().map(|e| expand(e, &ctx.spec, &b, &ctx.scope)).collect::<Result<_>>()?;
    match (&a.phi, &a.k) {
        (Some(phi), Some(k)) => {
            let k: Vec<i64> = parse_list(k, "multi-index")?;
            let c = calculus::lagrange_coefficient(&read_expr(phi)?, &fs, &k, &ctx.driver)?;
            match ctx.format {
                Format::Json => emit(&serde_json::json!({ "k": k, "coeff": coeff::format(&c) })),
                Format::Text => {
                    out!("{}", coeff::format(&c));
                    Ok(())
                }
            }
        }
        (None, None) => {
            let gs = calculus::lagrange_inverse(&fs, a.degree)?;
            let region = PrecisionBox::new(vec![(0, a.degree); ctx.spec.width()])?;
            for g in &gs {
                let terms: Vec<_> = g.terms().filter(|t| t.exponent.0.iter().sum::<i64>() <= a.degree).collect();
                match ctx.format {
                    Format::Json => {
                        let exact = Series::from_terms(g.spec(), terms.into_iter().map(|t| (t.exponent, t.coeff)));
                        let mut j = json::series_json(&exact, &region)?;
                        j.exact = false;
                        emit(&j)?;
                    }
                    Format::Text => out!("{} + ...", format_terms(g.spec(), &terms)),
                }
            }
            Ok(())
        }
        _ => Err(MnError::Usage("--phi and --k go together".into())),
    }
}

fn run_dyson(a: &DysonArgs) -> Result<()> {
    set_jobs(a.jobs);
    let instances = a
        .a
        .iter()
        .map(|t| Ok(DysonInstance { a: parse_list(t, "exponents")?, generalized: a.generalized }))
        .collect::<Result<Vec<_>>>()?;
    for r in identities::dyson_sweep(&instances) {
        emit(&json::identity_json(&r?))?;
    }
    Ok(())
}

fn run_dixon(a: &DixonArgs) -> Result<()> {
    let v: Vec<u32> = parse_list(&a.a, "exponents")?;
    let [x, y, z] = v[..] else {
        return Err(MnError::Usage("dixon takes three exponents".into()));
    };
    let dyson = identities::dyson_ct(&DysonInstance { a: v.clone(), generalized: false })?;
    emit(&json::identity_json(&IdentityReport { lhs: identities::dixon_sum(x, y, z), rhs: dyson.lhs }))
}

fn run_wilson(a: &WilsonArgs) -> Result<()> {
    let n = a.n;
    if n < 2 {
        return Err(MnError::Usage("--n must be at least 2".into()));
    }
    let spec = identities::z_spec(n);
    let region = identities::wilson_region(n, a.radius);
    let driver = Driver::default();
    if let Some(text) = &a.a {
        let exps: Vec<u32> = parse_list(text, "exponents")?;
        if exps.len() != n {
            return Err(MnError::Usage(format!("--a needs {n} entries")));
        }
        let target = |g: &mnseries::Grading| g.weight(&mnseries::OrderKey::zero(n));
        let ct = driver.run(n, &target, |b| identities::wilson_dyson_ct(&exps, b))?;
        let lhs = ct.scalar_value()?;
        return emit(&json::identity_json(&IdentityReport { lhs, rhs: identities::multinomial(&exps) }));
    }
    let ctx = Context { spec: spec.clone(), region: region.clone(), scope: Scope::default(), format: a.format, driver };
    if let Some(j) = a.j {
        let v = ctx.driver.run(n, &region, |b| identities::wilson_v(n, j, b))?;
        return print_series(&ctx, &v, &region);
    }
    let sum = ctx.driver.run(n, &region, |b| {
        (1..=n).try_fold(Series::zero(&spec), |acc, j| acc.add(&identities::wilson_v(n, j, b)?))
    })?;
    let terms = sum.terms_in(&region)?;
    let one = terms.len() == 1 && terms[0].exponent.is_zero() && terms[0].coeff == coeff::int(1);
    match ctx.format {
        Format::Json => emit(&serde_json::json!({
            "sum": json::series_json(&sum, &region)?,
            "equal": one,
        })),
        Format::Text => {
            out!("{}", format_terms(&spec, &terms));
            out!("equal: {one}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Expand(a) => run_expand(a),
        Command::Ct(a) => run_extract(a, Form::ConstantTerm),
        Command::Res(a) => run_extract(a, Form::Residue),
        Command::Jacobian(a) => run_jacobian(a, false),
        Command::Jnum(a) => run_jnum(a),
        Command::Lj(a) => run_jacobian(a, true),
        Command::Cov(a) => run_cov(a),
        Command::Lagrange(a) => run_lagrange(a),
        Command::Dyson(a) => run_dyson(a),
        Command::Dixon(a) => run_dixon(a),
        Command::Wilson(a) => run_wilson(a),
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
