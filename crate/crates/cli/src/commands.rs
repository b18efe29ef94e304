use std::fmt::Write as _;

use kolakoski_core::{
    build_level, check_identity, compute_stats, detect, kolakoski_stream_with_cap,
    spectral_constants, to_decimal, verify_block_prefix, verify_kolakoski_step, verify_lemma,
    verify_prefix, Alphabet, Budget, Check, Error, LevelStats, SearchBounds, Verdict,
};
use num::rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::report::{ErrorRecord, Report, VerdictRecord};
use crate::Format;

pub struct Context {
    pub format: Format,
    pub budget: Budget,
    pub parallel: bool,
}

/// Rendered report and whether every requested check passed.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, ok: true }
    }
}

const DECIMALS: usize = 6;

pub fn generate(ctx: &Context, alphabet: Alphabet, n: u64) -> Result<Output, Error> {
    let word = kolakoski_stream_with_cap(alphabet, n, ctx.budget.max_symbols)?;
    let text = match ctx.format {
        Format::Plain => format!("{word}\n"),
        Format::Csv => {
            let mut s = String::from("index,symbol\n");
            for (i, sym) in word.symbols().iter().enumerate() {
                writeln!(s, "{},{sym}", i + 1).unwrap();
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string(word.symbols()).expect("serializes");
            s.push('\n');
            s
        }
    };
    Ok(Output::ok(text))
}

/// One stats row. Field names follow the level statistics notation.
#[derive(Debug, Serialize)]
struct StatsRow {
    n: usize,
    #[serde(rename = "L")]
    block_len: u128,
    m: u128,
    c: u128,
    o: u128,
    d: f64,
    delta: f64,
    lambda: f64,
    ratio_prev: Option<f64>,
    identity_ok: bool,
    d_exact: String,
    delta_exact: String,
    lambda_exact: String,
    ratio_prev_exact: Option<String>,
}

fn decimal_f64(x: &BigRational) -> f64 {
    to_decimal(x, DECIMALS).parse().expect("decimal parses")
}

impl From<&LevelStats> for StatsRow {
    fn from(s: &LevelStats) -> Self {
        let ratio = s.ratio_prev();
        StatsRow {
            n: s.n,
            block_len: s.block_len,
            m: s.pillar_len,
            c: s.block_ones,
            o: s.pillar_ones,
            d: decimal_f64(&s.block_density()),
            delta: decimal_f64(&s.pillar_density()),
            lambda: decimal_f64(&s.lambda()),
            ratio_prev: ratio.as_ref().map(decimal_f64),
            identity_ok: check_identity(s),
            d_exact: s.block_density().to_string(),
            delta_exact: s.pillar_density().to_string(),
            lambda_exact: s.lambda().to_string(),
            ratio_prev_exact: ratio.map(|r| r.to_string()),
        }
    }
}

pub const STATS_COLUMNS: [&str; 10] = [
    "n",
    "L",
    "m",
    "c",
    "o",
    "d",
    "delta",
    "lambda",
    "ratio",
    "identity_ok",
];

fn stats_fields(s: &LevelStats) -> [String; 10] {
    [
        s.n.to_string(),
        s.block_len.to_string(),
        s.pillar_len.to_string(),
        s.block_ones.to_string(),
        s.pillar_ones.to_string(),
        to_decimal(&s.block_density(), DECIMALS),
        to_decimal(&s.pillar_density(), DECIMALS),
        to_decimal(&s.lambda(), DECIMALS),
        s.ratio_prev()
            .map(|r| to_decimal(&r, DECIMALS))
            .unwrap_or_default(),
        check_identity(s).to_string(),
    ]
}

pub fn stats(ctx: &Context, max_n: usize) -> Result<Output, Error> {
    let rows = compute_stats(max_n, &ctx.budget).inspect_err(|_| {
        eprintln!("stats: failed while computing levels 1..={max_n}");
    })?;
    let ok = rows.iter().all(check_identity);
    let mut report = Report::new("stats", &[("max_n", max_n.to_string())]);
    let text = match ctx.format {
        Format::Plain | Format::Csv => {
            let sep = if ctx.format == Format::Csv { "," } else { " " };
            let mut s = if ctx.format == Format::Plain {
                report.header_line()
            } else {
                String::new()
            };
            s.push_str(&STATS_COLUMNS.join(sep));
            s.push('\n');
            for row in &rows {
                let fields = stats_fields(row);
                let fields: Vec<&str> = fields
                    .iter()
                    .map(|f| if f.is_empty() { "-" } else { f.as_str() })
                    .map(|f| {
                        if ctx.format == Format::Csv && f == "-" {
                            ""
                        } else {
                            f
                        }
                    })
                    .collect();
                s.push_str(&fields.join(sep));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            report.rows = rows
                .iter()
                .map(|r| serde_json::to_value(StatsRow::from(r)).expect("serializes"))
                .collect();
            report.verdicts = rows
                .iter()
                .map(|r| {
                    let mut v =
                        VerdictRecord::simple(format!("identity/{}", r.n), check_identity(r));
                    v.level = Some(r.n);
                    v
                })
                .collect();
            report.to_json()
        }
    };
    Ok(Output { text, ok })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSet(pub Vec<Check>);

pub fn parse_checks(s: &str) -> Result<CheckSet, String> {
    if s == "all" {
        return Ok(CheckSet(Check::ALL.to_vec()));
    }
    let mut picked = Vec::new();
    for name in s.split(',').map(str::trim) {
        let check = Check::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| {
                format!("unknown check {name:?}; expected prefix, step, lemma, identity or all")
            })?;
        if !picked.contains(&check) {
            picked.push(check);
        }
    }
    // Report order is fixed regardless of how the flag was spelled.
    picked.sort_by_key(|c| Check::ALL.iter().position(|x| x == c));
    Ok(CheckSet(picked))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub level: usize,
    pub position: usize,
}

pub fn parse_fault(s: &str) -> Result<Fault, String> {
    let (level, position) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LEVEL:POSITION, got {s:?}"))?;
    Ok(Fault {
        level: level.parse().map_err(|e| format!("{level:?}: {e}"))?,
        position: position.parse().map_err(|e| format!("{position:?}: {e}"))?,
    })
}

fn record_from(verdict: Result<Verdict, Error>, check: Check, level: usize) -> VerdictRecord {
    let mut rec = VerdictRecord::simple(format!("{}/{level}", check.name()), false);
    rec.level = Some(level);
    match verdict {
        Ok(v) => {
            rec.passed = v.passed;
            rec.compared = Some(v.compared);
            rec.first_mismatch = v.first_mismatch;
        }
        Err(err) => rec.error = Some(ErrorRecord::from(&err)),
    }
    rec
}

fn prefix_with_fault(level: usize, fault: Fault, budget: &Budget) -> Result<Verdict, Error> {
    let mut block = build_level(level, budget)?
        .block
        .expect("build_level materializes the block");
    block.flip_symbol(fault.position)?;
    verify_block_prefix(&block, level, budget)
}

fn run_check(
    check: Check,
    n: usize,
    stats: &Result<Vec<LevelStats>, Error>,
    fault: Option<Fault>,
    budget: &Budget,
) -> (VerdictRecord, Option<String>) {
    match check {
        Check::Prefix => {
            let verdict = match fault {
                Some(f) if f.level == n => prefix_with_fault(n, f, budget),
                _ => verify_prefix(n, budget),
            };
            (record_from(verdict, check, n), None)
        }
        Check::Step => (
            record_from(verify_kolakoski_step(n, budget), check, n),
            None,
        ),
        Check::Lemma | Check::Identity => {
            let row = match stats {
                Ok(rows) => &rows[n - 1],
                Err(err) => {
                    let mut rec = VerdictRecord::simple(format!("{}/{n}", check.name()), false);
                    rec.level = Some(n);
                    rec.error = Some(ErrorRecord::from(err));
                    return (rec, None);
                }
            };
            if check == Check::Identity {
                let mut rec = VerdictRecord::simple(format!("identity/{n}"), check_identity(row));
                rec.level = Some(n);
                let detail = format!(
                    "m={} L-2c={}",
                    row.pillar_len,
                    row.block_len as i128 - 2 * row.block_ones as i128
                );
                return (rec, Some(detail));
            }
            let mut rec = VerdictRecord::simple(format!("lemma/{n}"), false);
            rec.level = Some(n);
            match verify_lemma(row, budget) {
                Ok(v) => {
                    rec.passed = v.passed();
                    let detail = format!(
                        "pillar_len_odd={} block_ends_in_one={} pillar_ends_in_three={} block_len_odd={} lengths_match={}",
                        v.pillar_len_odd,
                        v.block_ends_in_one,
                        v.pillar_ends_in_three,
                        v.block_len_odd,
                        v.lengths_match
                    );
                    (rec, Some(detail))
                }
                Err(err) => {
                    rec.error = Some(ErrorRecord::from(&err));
                    (rec, None)
                }
            }
        }
    }
}

pub fn verify(
    ctx: &Context,
    max_n: usize,
    checks: CheckSet,
    fault: Option<Fault>,
) -> Result<Output, Error> {
    let needs_stats = checks
        .0
        .iter()
        .any(|c| matches!(c, Check::Lemma | Check::Identity));
    let stats = if needs_stats {
        compute_stats(max_n, &ctx.budget)
    } else {
        Ok(Vec::new())
    };
    let tasks: Vec<(usize, Check)> = (1..=max_n)
        .flat_map(|n| checks.0.iter().map(move |&c| (n, c)))
        .collect();
    let run = |&(n, check): &(usize, Check)| run_check(check, n, &stats, fault, &ctx.budget);
    let results: Vec<(VerdictRecord, Option<String>)> = if ctx.parallel {
        tasks.par_iter().map(run).collect()
    } else {
        tasks.iter().map(run).collect()
    };

    let mut params = vec![
        ("max_n", max_n.to_string()),
        (
            "checks",
            checks
                .0
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(","),
        ),
    ];
    if let Some(f) = fault {
        params.push(("inject_fault", format!("{}:{}", f.level, f.position)));
    }
    let mut report = Report::new("verify", &params);
    report.verdicts = results.iter().map(|(r, _)| r.clone()).collect();
    let ok = report.all_passed();

    let text = match ctx.format {
        Format::Json => report.to_json(),
        Format::Csv => {
            let mut s = String::from("name,check,n,passed,compared,first_mismatch,error\n");
            for (r, _) in &results {
                let (check, _) = r.name.split_once('/').unwrap_or((&r.name, ""));
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.name,
                    check,
                    r.level.unwrap_or_default(),
                    r.passed,
                    opt(r.compared),
                    opt(r.first_mismatch),
                    r.error
                        .as_ref()
                        .map(|e| format!("{}: {}", e.kind, e.message.replace(',', ";")))
                        .unwrap_or_default()
                )
                .unwrap();
            }
            s
        }
        Format::Plain => {
            let mut s = report.header_line();
            for (r, detail) in &results {
                let status = match (&r.error, r.passed) {
                    (Some(_), _) => "ERROR",
                    (None, true) => "pass",
                    (None, false) => "FAIL",
                };
                write!(s, "{} {status}", r.name).unwrap();
                if let Some(c) = r.compared {
                    write!(s, " compared={c}").unwrap();
                }
                if let Some(p) = r.first_mismatch {
                    write!(s, " first_mismatch={p}").unwrap();
                }
                if let Some(d) = detail {
                    write!(s, " {d}").unwrap();
                }
                if let Some(e) = &r.error {
                    write!(s, " {}: {}", e.kind, e.message).unwrap();
                }
                s.push('\n');
            }
            let passed = results.iter().filter(|(r, _)| r.passed).count();
            writeln!(s, "# {passed}/{} checks passed", results.len()).unwrap();
            s
        }
    };
    Ok(Output { text, ok })
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

const EIGEN_TOLERANCE: f64 = 1e-9;

pub fn spectral(ctx: &Context, tolerance: f64) -> Result<Output, Error> {
    let k = spectral_constants(tolerance)?;
    let s = &k.spectrum;
    let expected_trace = 5.0 - 2.0 * k.d_limit;
    let expected_det = 6.0 - 4.0 * k.d_limit;
    let coefficient_error = (s.char_poly[1] + expected_trace)
        .abs()
        .max((s.char_poly[2] - expected_det).abs());

    let mut report = Report::new("spectral", &[("tolerance", format!("{tolerance:e}"))]);
    report.verdicts = vec![
        VerdictRecord::simple("residual", k.residual < tolerance),
        VerdictRecord::simple(
            "eigenvalue_alpha",
            (s.eigenvalues[0] - k.alpha).abs() < EIGEN_TOLERANCE,
        ),
        VerdictRecord::simple(
            "eigenvalue_two",
            (s.eigenvalues[1] - 2.0).abs() < EIGEN_TOLERANCE,
        ),
        VerdictRecord::simple("char_coefficients", coefficient_error < 1e-12),
    ];
    let ok = report.all_passed();

    let text = match ctx.format {
        Format::Json => {
            report.rows = vec![json!({
                "alpha": k.alpha,
                "d_limit": k.d_limit,
                "matrix": s.matrix,
                "char_poly": s.char_poly,
                "eigenvalues": s.eigenvalues,
                "residual": k.residual,
            })];
            report.to_json()
        }
        Format::Csv => {
            let mut out = String::from("quantity,value\n");
            for (name, value) in spectral_pairs(&k) {
                writeln!(out, "{name},{value}").unwrap();
            }
            for v in &report.verdicts {
                writeln!(out, "check:{},{}", v.name, v.passed).unwrap();
            }
            out
        }
        Format::Plain => {
            let mut out = report.header_line();
            for (name, value) in spectral_pairs(&k) {
                writeln!(out, "{name}={value}").unwrap();
            }
            for v in &report.verdicts {
                writeln!(
                    out,
                    "check {} {}",
                    v.name,
                    if v.passed { "pass" } else { "FAIL" }
                )
                .unwrap();
            }
            out
        }
    };
    Ok(Output { text, ok })
}

fn spectral_pairs(k: &kolakoski_core::SpectralConstants) -> Vec<(&'static str, String)> {
    let s = &k.spectrum;
    let f = |x: f64| format!("{x:.DECIMALS$}");
    vec![
        ("alpha", f(k.alpha)),
        ("d_limit", f(k.d_limit)),
        ("m11", f(s.matrix[0][0])),
        ("m12", f(s.matrix[0][1])),
        ("m21", f(s.matrix[1][0])),
        ("m22", f(s.matrix[1][1])),
        ("trace", f(-s.char_poly[1])),
        ("determinant", f(s.char_poly[2])),
        ("eigenvalue_1", f(s.eigenvalues[0])),
        ("eigenvalue_2", f(s.eigenvalues[1])),
        ("residual", format!("{:.3e}", k.residual)),
    ]
}

pub fn explore(ctx: &Context, alphabet: Alphabet, bounds: SearchBounds) -> Result<Output, Error> {
    let found = detect(alphabet, bounds, &ctx.budget, ctx.parallel)?;
    let report_params = [
        ("alphabet", format!("{},{}", alphabet.a(), alphabet.b())),
        ("max_block", bounds.max_block.to_string()),
        ("max_pillar", bounds.max_pillar.to_string()),
        ("depth", bounds.depth.to_string()),
    ];
    let mut report = Report::new("explore", &report_params);
    let text = match ctx.format {
        Format::Json => {
            report.rows = found
                .iter()
                .map(|c| {
                    json!({
                        "block_len": c.block_len,
                        "pillar": c.pillar.symbols(),
                        "verified_depth": c.verified_depth,
                    })
                })
                .collect();
            report.to_json()
        }
        Format::Csv => {
            let mut s = String::from("block_len,pillar,verified_depth\n");
            for c in &found {
                writeln!(s, "{},{},{}", c.block_len, c.pillar, c.verified_depth).unwrap();
            }
            s
        }
        Format::Plain => {
            let mut s = report.header_line();
            if found.is_empty() {
                s.push_str("no candidate within bounds\n");
            }
            for c in &found {
                writeln!(
                    s,
                    "block_len={} pillar=<{}> verified_depth={}",
                    c.block_len,
                    c.pillar
                        .symbols()
                        .iter()
                        .map(u8::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                    c.verified_depth
                )
                .unwrap();
            }
            s
        }
    };
    Ok(Output::ok(text))
}
