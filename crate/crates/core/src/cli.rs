//! Command-line driver. Every subcommand builds a [`Report`] that renders as
//! JSON, CSV or a Markdown table; exit code 0 means every check passed, 1 a
//! failed check, 2 a usage or configuration error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::deform::{
    conjugate_by_s, differentiability_probe, dyadic_offsets, phi_table, pole_obstruction_check,
    probe_limit_all_directions, raising_entry, LimitExpression, LimitProbe, PsiHandle,
};
use crate::error::{Error, Result};
use crate::families::{build, is_reducibility_point, FamilyKind, FamilySpec, Parity};
use crate::hermitian::{
    form_on_Pi, form_on_pi, one_sided_limits, radical_of_form, socle_vanishing_check,
    verify_invariance, FormTable,
};
use crate::scalar::{parse_rat, rat_int, CRat, NuParameter, RadicalScalar, Rat};
use crate::structure::{
    casimir_scalar, casimir_scalar_approx, series_report, verify_brackets, verify_brackets_approx,
};
use crate::toy::{
    delta_limit, jordan_block, toy_Pi_limit, toy_conjugation_check, toy_matrices, CONJUGATION_TOL,
};

#[derive(Parser, Debug)]
#[command(
    name = "sl2deform",
    version,
    about = "Principal series of SL(2,R) and its deformations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lie relations, Casimir and the pole identity for each family and nu
    Verify(Common),
    /// Composition series and bracket strings over a nu grid
    Structure(Common),
    /// Invariant Hermitian forms on pi or Pi
    Hermitian(Common),
    /// Intertwiner check, or limit probes with --probe nu0=X --m M
    Deform(DeformArgs),
    /// Log-log slope of difference quotients of the E coefficient
    Probe(ProbeArgs),
    /// The two-dimensional example
    Toy(ToyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// pi, Pi or piPrime; repeat or separate by commas
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// 1 or -1; both when omitted
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<i64>,
    /// A single nu such as 7/2, -3, i, i*3/4
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// a..b, a..b:step (rational), or a comma list
    #[arg(long, allow_hyphen_values = true)]
    pub nu_grid: Option<String>,
    #[arg(long, default_value_t = 30)]
    pub window: i64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Evaluate in floating point instead of exactly
    #[arg(long)]
    pub float: bool,
}

#[derive(Args, Debug, Clone)]
pub struct DeformArgs {
    #[command(flatten)]
    pub common: Common,
    /// Limit probe at a point, as nu0=X
    #[arg(long, allow_hyphen_values = true)]
    pub probe: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    /// canonical or trivial
    #[arg(long, default_value = "canonical")]
    pub psi: String,
}

#[derive(Args, Debug, Clone)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
}

#[derive(Args, Debug, Clone)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// A rendered-on-demand result: a JSON document plus a flat table for CSV
/// and Markdown.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub failed: bool,
}

impl Report {
    fn new(headers: &[&str]) -> Self {
        Report {
            json: Value::Array(Vec::new()),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            failed: false,
        }
    }

    fn push_json(&mut self, v: Value) {
        if let Value::Array(a) = &mut self.json {
            a.push(v);
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)
                    .map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Io(e.to_string());
                w.write_record(&self.headers).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
            }
            Format::Md => {
                let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
                let mut s = line(&self.headers);
                s.push_str(&line(&vec!["---".to_string(); self.headers.len()]));
                for r in &self.rows {
                    s.push_str(&line(r));
                }
                Ok(s)
            }
        }
    }
}

fn pass(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

/// Parses `a..b`, `a..b:step` or a comma list into a sorted, deduplicated grid.
pub fn parse_grid(spec: &str, float: bool) -> Result<Vec<NuParameter>> {
    let mut grid = Vec::new();
    if let Some((a, rest)) = spec.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, s)) => (b, parse_rat(s.trim())?),
            None => (rest, rat_int(1)),
        };
        let (a, b) = (parse_rat(a.trim())?, parse_rat(b.trim())?);
        if step <= rat_int(0) {
            return Err(Error::Parse(format!("grid step must be positive: {spec}")));
        }
        let mut x = a;
        while x <= b {
            grid.push(NuParameter::ExactReal(x.clone()));
            x += &step;
        }
    } else {
        for item in spec.split(',') {
            grid.push(parse_nu(item.trim(), float)?);
        }
    }
    if float {
        grid = grid
            .into_iter()
            .map(|nu| NuParameter::Float(nu.to_complex()))
            .collect();
    }
    sort_grid(&mut grid);
    Ok(grid)
}

fn parse_nu(s: &str, float: bool) -> Result<NuParameter> {
    match s.parse::<NuParameter>() {
        Ok(nu) => Ok(nu),
        Err(e) if float => s
            .parse::<f64>()
            .map(|x| NuParameter::Float(num_complex::Complex64::new(x, 0.0)))
            .map_err(|_| e),
        Err(e) => Err(e),
    }
}

fn sort_key(nu: &NuParameter) -> (Rat, Rat) {
    let c = nu.exact().unwrap_or_else(CRat::zero);
    (c.re, c.im)
}

fn sort_grid(grid: &mut Vec<NuParameter>) {
    if grid.iter().all(NuParameter::is_exact) {
        grid.sort_by_key(sort_key);
    } else {
        grid.sort_by(|a, b| {
            let (a, b) = (a.to_complex(), b.to_complex());
            a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
        });
    }
    grid.dedup();
}

impl Common {
    fn grid(&self) -> Result<Vec<NuParameter>> {
        match (&self.nu, &self.nu_grid) {
            (Some(_), Some(_)) => Err(Error::Parse("give either --nu or --nu-grid".into())),
            (Some(nu), None) => {
                let nu = parse_nu(nu.trim(), self.float)?;
                Ok(vec![if self.float {
                    NuParameter::Float(nu.to_complex())
                } else {
                    nu
                }])
            }
            (None, Some(g)) => parse_grid(g, self.float),
            (None, None) => Err(Error::Parse("one of --nu or --nu-grid is required".into())),
        }
    }

    fn families(&self, default: &[FamilyKind]) -> Result<Vec<FamilyKind>> {
        if self.family.is_empty() {
            return Ok(default.to_vec());
        }
        let mut out: Vec<FamilyKind> = Vec::new();
        for f in &self.family {
            let kind: FamilyKind = f.trim().parse()?;
            if kind == FamilyKind::PsiCustom {
                return Err(Error::Parse("psiCustom families are library-only".into()));
            }
            if !out.contains(&kind) {
                out.push(kind);
            }
        }
        out.sort();
        Ok(out)
    }

    fn epsilons(&self) -> Result<Vec<i64>> {
        match self.epsilon {
            Some(e) => Parity::from_epsilon(e).map(|_| vec![e]),
            None => Ok(vec![1, -1]),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.window < crate::families::WeightWindow::MIN_BOUND {
            return Err(Error::WindowTooSmall {
                bound: self.window,
                needed: crate::families::WeightWindow::MIN_BOUND,
            });
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Parse("--tol must be positive".into()));
        }
        Ok(())
    }
}

fn expected_casimir(nu: &NuParameter) -> Option<RadicalScalar> {
    nu.exact()
        .map(|c| RadicalScalar::from_crat(&(&c * &c) - &CRat::one()))
}

pub fn run_verify(c: &Common) -> Result<Report> {
    c.validate()?;
    let grid = c.grid()?;
    let families = c.families(&FamilyKind::NAMED)?;
    let eps = c.epsilons()?;
    let mut report = Report::new(&["nu", "family", "epsilon", "check", "result", "detail"]);
    for nu in &grid {
        for &kind in &families {
            for &e in &eps {
                let ops = build(&FamilySpec::new(kind, e, nu.clone(), c.window)?)?;
                let brackets = if c.float || !ops.is_exact() {
                    verify_brackets_approx(&ops, c.tol)
                } else {
                    verify_brackets(&ops)
                };
                let (b_ok, b_detail) = match brackets {
                    Ok(ok) => (ok, String::new()),
                    Err(err) => (false, err.to_string()),
                };
                let (c_ok, c_detail) = match expected_casimir(nu) {
                    Some(want) if ops.is_exact() => match casimir_scalar(&ops) {
                        Ok(got) => (got == want, got.to_string()),
                        Err(err) => (false, err.to_string()),
                    },
                    _ => {
                        let z = nu.to_complex();
                        let want = z * z - 1.0;
                        match casimir_scalar_approx(&ops, c.tol) {
                            Ok(got) => (
                                (got - want).norm() <= c.tol,
                                format!("{} {}", got.re, got.im),
                            ),
                            Err(err) => (false, err.to_string()),
                        }
                    }
                };
                let (p_ok, p_detail) = match pole_obstruction_check(
                    kind,
                    e,
                    std::slice::from_ref(nu),
                    c.window,
                    c.tol,
                ) {
                    Ok(p) => (p.passed, format!("max deviation {:e}", p.max_deviation)),
                    Err(err) => (false, err.to_string()),
                };
                for (check, ok, detail) in [
                    ("brackets", b_ok, b_detail),
                    ("casimir", c_ok, c_detail),
                    ("pole", p_ok, p_detail),
                ] {
                    report.failed |= !ok;
                    report.push_json(json!({
                        "nu": nu.to_string(), "family": kind.as_str(), "epsilon": e,
                        "check": check, "result": pass(ok), "detail": detail,
                    }));
                    report.rows.push(vec![
                        nu.to_string(),
                        kind.to_string(),
                        e.to_string(),
                        check.to_string(),
                        pass(ok),
                        detail,
                    ]);
                }
            }
        }
    }
    Ok(report)
}

pub fn run_structure(c: &Common) -> Result<Report> {
    c.validate()?;
    let grid = c.grid()?;
    let families = c.families(&FamilyKind::NAMED)?;
    let eps = c.epsilons()?;
    let mut report = Report::new(&[
        "nu",
        "family",
        "epsilon",
        "reducible",
        "bracket",
        "factors",
        "completelyReducible",
        "indecomposable",
    ]);
    for nu in &grid {
        for &kind in &families {
            for &e in &eps {
                let s = series_report(&FamilySpec::new(kind, e, nu.clone(), c.window)?)?;
                let factors: Vec<String> = s.factors.iter().map(|f| f.to_string()).collect();
                report.push_json(json!({
                    "nu": nu.to_string(), "family": kind.as_str(), "epsilon": e,
                    "reducible": s.is_reducible(), "factors": factors, "bracket": s.bracket_string,
                    "completelyReducible": s.completely_reducible, "indecomposable": s.indecomposable,
                }));
                report.rows.push(vec![
                    nu.to_string(),
                    kind.to_string(),
                    e.to_string(),
                    s.is_reducible().to_string(),
                    s.bracket_string.clone(),
                    factors.join(" "),
                    s.completely_reducible.to_string(),
                    s.indecomposable.to_string(),
                ]);
            }
        }
    }
    Ok(report)
}

fn form_rows(report: &mut Report, nu: &NuParameter, form: &FormTable, single: bool) {
    for (j, v) in form.iter() {
        let mut row = vec![
            j.to_string(),
            v.to_string(),
            form.sign(j).unwrap_or(0).to_string(),
        ];
        if !single {
            row.insert(0, nu.to_string());
        }
        report.rows.push(row);
    }
}

pub fn run_hermitian(c: &Common) -> Result<Report> {
    c.validate()?;
    let grid = c.grid()?;
    let families = c.families(&[FamilyKind::Pi0])?;
    if families
        .iter()
        .any(|k| !matches!(k, FamilyKind::Pi0 | FamilyKind::PiDeformed))
    {
        return Err(Error::Parse(
            "hermitian forms are computed for pi and Pi".into(),
        ));
    }
    let eps = c.epsilons()?;
    let single = grid.len() == 1 && families.len() == 1 && eps.len() == 1;
    let mut report = if single {
        Report::new(&["weight", "value", "sign"])
    } else {
        Report::new(&["nu", "weight", "value", "sign"])
    };
    for nu in &grid {
        for &kind in &families {
            for &e in &eps {
                let spec = FamilySpec::new(kind, e, nu.clone(), c.window)?;
                let ops = build(&spec)?;
                let wall = is_reducibility_point(nu, spec.parity);
                let head = json!({"nu": nu.to_string(), "family": kind.as_str(), "epsilon": e});
                let mut entry = head.as_object().cloned().unwrap_or_default();
                match kind {
                    FamilyKind::PiDeformed if wall => {
                        let n = nu.as_integer().unwrap_or(0);
                        let lim = one_sided_limits(e, n, c.window)?;
                        let sided = |d: Rat| {
                            let nu = NuParameter::ExactReal(rat_int(n) + d);
                            build(&FamilySpec::new(kind, e, nu, c.window)?)
                        };
                        let quarter = Rat::new(1.into(), 4.into());
                        let ok = verify_invariance(&sided(-quarter.clone())?, &lim.left)
                            && verify_invariance(&sided(quarter)?, &lim.right)
                            && radical_of_form(&lim.left).is_empty()
                            && radical_of_form(&lim.right).is_empty();
                        report.failed |= !ok;
                        entry.insert("invariant".into(), json!(ok));
                        entry.insert("limits".into(), to_value(&lim)?);
                        for (j, rel) in &lim.relation {
                            let row = |v: &FormTable| {
                                v.get(*j).map(|s| s.to_string()).unwrap_or_default()
                            };
                            let rel = to_value(rel)?.as_str().unwrap_or_default().to_string();
                            let mut r = vec![j.to_string(), row(&lim.left), row(&lim.right), rel];
                            if !single {
                                r.insert(0, nu.to_string());
                            }
                            report.rows.push(r);
                        }
                        if single {
                            report.headers = ["weight", "left", "right", "relation"]
                                .map(String::from)
                                .to_vec();
                        }
                    }
                    _ => {
                        let form = if kind == FamilyKind::Pi0 {
                            form_on_pi(e, nu, c.window)?
                        } else {
                            form_on_Pi(e, nu, c.window)?
                        };
                        let ok = verify_invariance(&ops, &form);
                        report.failed |= !ok;
                        let radical: Vec<i64> = radical_of_form(&form).into_iter().collect();
                        entry.insert("invariant".into(), json!(ok));
                        entry.insert("radical".into(), json!(radical));
                        if kind == FamilyKind::Pi0
                            && wall
                            && !(e == -1 && nu.as_integer() == Some(0))
                        {
                            let n = nu.as_integer().unwrap_or(0);
                            let socle = socle_vanishing_check(e, n, &form)?;
                            report.failed |= !socle;
                            entry.insert("socleVanishes".into(), json!(socle));
                        }
                        entry.insert("form".into(), to_value(&form)?);
                        form_rows(&mut report, nu, &form, single);
                    }
                }
                report.push_json(Value::Object(entry));
            }
        }
    }
    Ok(report)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn parse_probe_point(s: &str) -> Result<f64> {
    let v = s
        .strip_prefix("nu0=")
        .ok_or_else(|| Error::Parse(format!("expected nu0=X, got {s:?}")))?;
    match v.parse::<NuParameter>() {
        Ok(nu) if nu.to_complex().im == 0.0 => Ok(nu.to_complex().re),
        Ok(_) => Err(Error::Parse("probe points are real".into())),
        Err(e) => v.parse::<f64>().map_err(|_| e),
    }
}

pub fn run_deform(a: &DeformArgs) -> Result<Report> {
    let c = &a.common;
    c.validate()?;
    match &a.probe {
        Some(point) => {
            let nu0 = parse_probe_point(point)?;
            let m =
                a.m.ok_or_else(|| Error::Parse("--probe needs --m".into()))?;
            let psi = match a.psi.as_str() {
                "canonical" => PsiHandle::canonical(),
                "trivial" => PsiHandle::trivial(),
                other => return Err(Error::Parse(format!("unknown psi {other:?}"))),
            };
            let mut report = Report::new(&[
                "nu0",
                "m",
                "psi",
                "expr",
                "direction",
                "exists",
                "re",
                "im",
                "rate",
            ]);
            for expr in LimitExpression::BOTH {
                let p = probe_limit_all_directions(&psi, m, expr, nu0, c.tol.max(1e-6))?;
                for r in &p.probes {
                    report.rows.push(vec![
                        nu0.to_string(),
                        m.to_string(),
                        a.psi.clone(),
                        expr.label().to_string(),
                        r.direction.symbol().to_string(),
                        r.exists.to_string(),
                        r.value[0].to_string(),
                        r.value[1].to_string(),
                        r.rate.map(|x| x.to_string()).unwrap_or_default(),
                    ]);
                }
                report.push_json(json!({
                    "nu0": nu0, "m": m, "psi": a.psi, "expr": expr.label(),
                    "exists": p.exists, "value": p.value, "probes": to_value(&p.probes)?,
                }));
            }
            Ok(report)
        }
        None => {
            let grid = c.grid()?;
            let eps = c.epsilons()?;
            let mut report = Report::new(&["nu", "epsilon", "check", "result"]);
            for nu in &grid {
                for &e in &eps {
                    let pi = build(&FamilySpec::new(FamilyKind::Pi0, e, nu.clone(), c.window)?)?;
                    let big = build(&FamilySpec::new(
                        FamilyKind::PiDeformed,
                        e,
                        nu.clone(),
                        c.window,
                    )?)?;
                    let result = match phi_table(nu, pi.window()) {
                        Ok(phi) => {
                            let conj = conjugate_by_s(&pi, &phi)?;
                            let ok = if conj.is_exact() && big.is_exact() {
                                conj == big
                            } else {
                                operators_close(&conj, &big, c.tol)
                            };
                            report.failed |= !ok;
                            pass(ok)
                        }
                        Err(Error::AtReducibilityPoint(_)) => "skipped".to_string(),
                        Err(err) => return Err(err),
                    };
                    report.push_json(json!({
                        "nu": nu.to_string(), "epsilon": e, "check": "intertwiner", "result": result,
                    }));
                    report.rows.push(vec![
                        nu.to_string(),
                        e.to_string(),
                        "intertwiner".into(),
                        result,
                    ]);
                }
            }
            Ok(report)
        }
    }
}

fn operators_close(a: &crate::OperatorTriple, b: &crate::OperatorTriple, tol: f64) -> bool {
    [(&a.h, &b.h), (&a.e, &b.e), (&a.f, &b.f)]
        .iter()
        .all(|(x, y)| {
            x.entries().count() == y.entries().count()
                && x.entries()
                    .all(|(j, v)| (v.to_float() - y.coeff(j).to_float()).norm() <= tol)
        })
}

pub fn run_probe(a: &ProbeArgs) -> Result<Report> {
    let c = &a.common;
    c.validate()?;
    let grid = c.grid()?;
    let families = c.families(&[FamilyKind::PiDeformed])?;
    let eps = c.epsilons()?;
    let offsets = dyadic_offsets(LimitProbe::DEFAULT_DELTA0, LimitProbe::DEFAULT_STEPS);
    let mut report = Report::new(&["nu0", "family", "epsilon", "m", "slope"]);
    for nu in &grid {
        let z = nu.to_complex();
        if z.im != 0.0 {
            return Err(Error::Parse(
                "difference quotients are probed at real nu".into(),
            ));
        }
        for &kind in &families {
            for &e in &eps {
                let slope = differentiability_probe(raising_entry(kind, e, a.m), z.re, &offsets);
                report.push_json(json!({
                    "nu0": nu.to_string(), "family": kind.as_str(), "epsilon": e, "m": a.m, "slope": slope,
                }));
                report.rows.push(vec![
                    nu.to_string(),
                    kind.to_string(),
                    e.to_string(),
                    a.m.to_string(),
                    format!("{slope:.6}"),
                ]);
            }
        }
    }
    Ok(report)
}

pub fn run_toy(a: &ToyArgs) -> Result<Report> {
    let mats = toy_matrices(a.nu, a.t);
    let check = if a.nu == 0.0 {
        None
    } else {
        Some(toy_conjugation_check(a.nu)?)
    };
    let lim = toy_Pi_limit(a.t);
    let dist = |x: &crate::toy::Mat2, y: &crate::toy::Mat2| (x - y).amax();
    let converged = dist(&lim.exp_limit, &jordan_block(a.t)) <= 1e-8
        && dist(&lim.delta_limit, &delta_limit()) <= 1e-8;
    let mut report = Report::new(&["nu", "exp_error", "delta_error"]);
    report.failed = !converged || check == Some(false);
    report.json = json!({
        "matrices": to_value(&mats)?,
        "conjugation": check.map(|ok| json!({"pass": ok, "tol": CONJUGATION_TOL})),
        "limit": to_value(&lim)?,
        "converged": converged,
    });
    for r in &lim.table {
        report.rows.push(vec![
            format!("{:e}", r.nu),
            format!("{:e}", r.exp_error),
            format!("{:e}", r.delta_error),
        ]);
    }
    Ok(report)
}

/// Parses `args`, runs the subcommand, writes the report, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (result, format, out) = match &cli.command {
        Command::Verify(c) => (run_verify(c), c.format, c.out.clone()),
        Command::Structure(c) => (run_structure(c), c.format, c.out.clone()),
        Command::Hermitian(c) => (run_hermitian(c), c.format, c.out.clone()),
        Command::Deform(a) => (run_deform(a), a.common.format, a.common.out.clone()),
        Command::Probe(a) => (run_probe(a), a.common.format, a.common.out.clone()),
        Command::Toy(a) => (run_toy(a), a.format, a.out.clone()),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match report.render(format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match out {
        Some(path) => std::fs::write(&path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if report.failed { 1 } else { 0 })
}
