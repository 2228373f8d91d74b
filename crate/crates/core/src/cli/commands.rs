use std::fs::File;
use std::io::{BufWriter, Write};

use serde_json::json;

use super::config::{CommandKind, OutputFormat, RunConfig};
use super::selfcheck::{run_selfcheck, Depth, Fault};
use crate::combinatorics::{
    catalan, catalan_convolution, check_de_agreement, check_exit_degree_bound, check_root_degree_agreement,
    de_closed_forms, n_12_closed, n_hat_22, n_one_multiedge, r_sequence, root_degree_closed_form,
};
use crate::error::{Error, Result};
use crate::montecarlo::{
    compare_asymptotic, estimate_moments, mc_json, mc_rows, spectral_norm_study, write_lambda_dump, write_mc_csv,
    EnsembleConfig, EntryDist,
};
use crate::rational::{self, Rational};
use crate::report::{rows_json, write_rows_csv, Provenance, ReportRow, RowValue};
use crate::series::{
    check_lower_bound, check_upper_bound, io_csv_err, phi_12, phi_22, series_json, solve_catalan,
    solve_moment_series, write_series_csv, SeriesParams, TruncatedSeries, Verdict,
};
use crate::walks::{
    count_24star, count_profile, decompose_moment, enum_ceiling, exact_moment, par_fold_walks, rose_polynomial,
    rose_weight_sum, set_enum_ceiling, verify_coloring_rule, write_walk_dump, Filter, MomentParams, Profile,
};

pub(super) fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match config.command {
        CommandKind::Series => series(config, out),
        CommandKind::Counts => counts(config, out),
        CommandKind::Enumerate => with_ceiling(config, || enumerate(config, out)),
        CommandKind::Exact => with_ceiling(config, || exact(config, out)),
        CommandKind::Mc => mc(config, out),
        CommandKind::Compare => compare(config, out),
        CommandKind::Bounds => bounds(config, out),
        CommandKind::Selfcheck => selfcheck(config, out),
    }
}

/// Applies `--enum-max` for the duration of one command.
fn with_ceiling(config: &RunConfig, f: impl FnOnce() -> Result<()>) -> Result<()> {
    let previous = enum_ceiling();
    if let Some(v) = config.params.get("enum-max") {
        let v: usize = v.parse().map_err(|_| Error::Config(format!("--enum-max: cannot parse {v:?}")))?;
        set_enum_ceiling(v)?;
    }
    let r = f();
    set_enum_ceiling(previous)?;
    r
}

fn write_rows(config: &RunConfig, rows: &[ReportRow], out: &mut dyn Write) -> Result<()> {
    match config.output_format {
        OutputFormat::Csv => write_rows_csv(rows, out),
        OutputFormat::Json => write_json(&rows_json(rows), out),
    }
}

fn write_json(value: &serde_json::Value, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn series(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let order: usize = config.get("order", 8)?;
    let kind: String = config.get("kind", "moment".to_string())?;
    let u_value = config.rational("u")?;
    if u_value.is_some() && kind != "moment" {
        return Err(Error::Config(format!("--u applies only to the moment series, not {kind}")));
    }
    let f: TruncatedSeries = match kind.as_str() {
        "moment" => solve_moment_series(&SeriesParams { order, u_value })?,
        "catalan" => {
            SeriesParams::symbolic(order).validate()?;
            solve_catalan(order)
        }
        "phi12" => phi_12(order)?,
        "phi22" => phi_22(order)?,
        _ => return Err(Error::Config(format!("--kind must be moment, catalan, phi12 or phi22, got {kind:?}"))),
    };
    match config.output_format {
        OutputFormat::Csv => write_series_csv(&f, out),
        OutputFormat::Json => write_json(&serde_json::to_value(series_json(&f)).expect("plain rows"), out),
    }
}

/// One line of the `counts` table.
struct CountRow {
    name: &'static str,
    s: usize,
    d_or_m: Option<usize>,
    value: String,
}

pub const COUNTS_CSV_HEADER: [&str; 4] = ["name", "s", "d_or_m", "value"];

fn count_rows(s_max: usize) -> Result<Vec<CountRow>> {
    let mut rows = Vec::new();
    let mut push = |name, s, d_or_m, value: String| rows.push(CountRow { name, s, d_or_m, value });
    let phi = if s_max >= 4 { Some(phi_22(s_max)?) } else { None };
    for s in 0..=s_max {
        push("catalan", s, None, catalan(s).to_string());
        for d in 1..=s {
            push("root_degree", s, Some(d), root_degree_closed_form(s, d)?.to_string());
        }
        for m in 1..=s {
            push("one_multiedge", s, Some(m), n_one_multiedge(s, m)?.to_string());
        }
        if s >= 2 {
            push("r_sequence", s, None, r_sequence(s)?.to_string());
            push("n_12", s, None, n_12_closed(s)?.to_string());
        }
        if let (Some(p), true) = (&phi, s >= 4) {
            push("n_22", s, None, rational::to_exact_string(&p.scalar(s)));
            push("n_hat_22", s, None, n_hat_22(s)?.to_string());
        }
        for m in 1..=s {
            let (d, e) = de_closed_forms(s, m)?;
            push("d", s, Some(m), d.to_string());
            push("e", s, Some(m), e.to_string());
        }
    }
    Ok(rows)
}

fn count_identities(s_max: usize) -> Result<()> {
    check_root_degree_agreement(s_max)?;
    if s_max >= 1 {
        check_de_agreement(s_max)?;
    }
    for s in 2..=s_max {
        if n_12_closed(s)? != n_one_multiedge(s, 2)? {
            return Err(Error::Inconsistency(format!("N_s^(1,2) closed form differs from the multiedge count at s={s}")));
        }
        if r_sequence(s)? != catalan_convolution(s - 2, 3)? {
            return Err(Error::Inconsistency(format!("R_s differs from the three-fold convolution at s={s}")));
        }
    }
    if s_max >= 1 {
        let rep = check_exit_degree_bound(s_max)?;
        if let Some(c) = rep.failures_outside_known_exception().first() {
            return Err(Error::Inconsistency(format!("exit degree bound fails at s={}, d={}", c.s, c.d)));
        }
    }
    Ok(())
}

fn counts(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let s_max: usize = config.get("s-max", 12)?;
    if s_max > crate::series::MAX_PRACTICAL_ORDER {
        return Err(Error::Config(format!("--s-max above {} is not supported", crate::series::MAX_PRACTICAL_ORDER)));
    }
    if config.flag("check")? {
        count_identities(s_max)?;
    }
    let rows = count_rows(s_max)?;
    match config.output_format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COUNTS_CSV_HEADER).map_err(io_csv_err)?;
            for r in &rows {
                let d = r.d_or_m.map(|d| d.to_string()).unwrap_or_default();
                w.write_record([r.name, &r.s.to_string(), &d, &r.value]).map_err(io_csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Json => {
            let items =
                rows.iter().map(|r| json!({"name": r.name, "s": r.s, "d_or_m": r.d_or_m, "value": r.value})).collect();
            write_json(&serde_json::Value::Array(items), out)
        }
    }
}

fn enumerate(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let s: usize = config.require("s")?;
    let filter = Filter::from_name(&config.get("filter", "all".to_string())?)?;
    if config.flag("dump")? {
        if config.has("profile") {
            return Err(Error::Config("--dump and --profile are exclusive".into()));
        }
        write_walk_dump(&mut *out, s, enum_ceiling(), filter)?;
        return Ok(());
    }
    let mut rows = Vec::new();
    if let Some(p) = config.params.get("profile") {
        let profile = Profile::parse(p)?;
        let v = count_profile(s, profile)?;
        rows.push(ReportRow::new("profile_count", RowValue::integer(v), Provenance::Enumeration).param("s", s).param("index", p));
        return write_rows(config, &rows, out);
    }
    let walks = par_fold_walks(s, enum_ceiling(), filter, || 0u64, |a, _| a + 1, |a, b| a + b)?;
    rows.push(
        ReportRow::new("walk_count", RowValue::integer(walks), Provenance::Enumeration)
            .param("s", s)
            .param("index", format!("filter={}", crate::walks::WalkFilter::name(&filter))),
    );
    let star = count_24star(s)?;
    for (p, c) in star.coeffs().iter().enumerate() {
        rows.push(
            ReportRow::new("two_four_star", RowValue::exact(c), Provenance::Enumeration).param("s", s).param("index", format!("u^{p}")),
        );
    }
    let rep = verify_coloring_rule(s)?;
    for (name, v) in [
        ("walks_with_red", rep.walks_with_red),
        ("red_without_blue", rep.counterexamples.len() as u64),
        ("second_arrival_only_differs", rep.ambiguous),
        ("second_arrival_only_red_without_blue", rep.literal_counterexamples),
        ("tree_type_vs_no_blue_mismatch", rep.tree_blue_mismatches),
    ] {
        rows.push(ReportRow::new(name, RowValue::integer(v), Provenance::Enumeration).param("s", s).param("index", ""));
    }
    write_rows(config, &rows, out)
}

/// `MomentParams` from `--n`, `--rho` and `--moments`, padded to `V_{2s}`
/// with the Rademacher value 1 when `--moments` is absent.
pub(super) fn moment_params(config: &RunConfig, s: usize) -> Result<MomentParams> {
    let n: u64 = config.require("n")?;
    let rho = config.rational("rho")?.ok_or_else(|| Error::Config("--rho is required".into()))?;
    match config.rational_list("moments")? {
        Some(m) => MomentParams::new(n, rho, m),
        None => MomentParams::rademacher(n, rho, s.max(1)),
    }
}

fn exact(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let s: usize = config.get("s", 4)?;
    let rose: Option<usize> = config.params.get("rose").map(|v| v.parse()).transpose().map_err(|_| Error::Config("--rose: expected an integer".into()))?;
    let params = moment_params(config, s.max(rose.unwrap_or(0)))?;
    let tag = |name: &str, value: RowValue, prov| {
        ReportRow::new(name, value, prov)
            .param("s", s)
            .param("n", params.n)
            .param("rho", rational::to_exact_string(&params.rho))
    };
    let total = exact_moment(&params, s)?;
    let (tree, non_tree) = decompose_moment(&params, s)?;
    let mut rows = vec![
        tag("exact_moment", RowValue::exact(&total), Provenance::ExactEngine),
        tag("tree_part", RowValue::exact(&tree), Provenance::ExactEngine),
        tag("non_tree_part", RowValue::exact(&non_tree), Provenance::ExactEngine),
    ];
    if let Some(m) = rose {
        let poly = rose_polynomial(m)?;
        rows.push(tag("rose_polynomial", RowValue::Exact(poly.to_string()), Provenance::Enumeration).param("m", m));
        rows.push(tag("rose_weight_sum", RowValue::exact(&rose_weight_sum(m, &params)?), Provenance::Enumeration).param("m", m));
        for r in rows.iter_mut().take(3) {
            r.params.push(("m".into(), String::new()));
        }
    }
    write_rows(config, &rows, out)
}

pub(super) fn ensemble(config: &RunConfig) -> Result<EnsembleConfig> {
    let rho = config.rational("rho")?.ok_or_else(|| Error::Config("--rho is required".into()))?;
    let q: Option<Rational> = config.rational("q")?;
    let dist = EntryDist::parse(&config.get("dist", "rademacher".to_string())?, q.as_ref())?;
    let e = EnsembleConfig {
        n: config.require("n")?,
        rho,
        dist,
        master_seed: config.get("seed", 0)?,
        samples: config.get("samples", 1000)?,
    };
    e.validate()?;
    Ok(e)
}

fn mc(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let e = ensemble(config)?;
    let study: String = config.get("study", "moments".to_string())?;
    match study.as_str() {
        "moments" => {
            for key in ["eps", "chi", "lambda-dump"] {
                if config.has(key) {
                    return Err(Error::Config(format!("--{key} applies only to --study spectral")));
                }
            }
            let s_max: usize = config.get("s-max", 4)?;
            if s_max < 1 {
                return Err(Error::Config("--s-max must be at least 1".into()));
            }
            let rows = mc_rows(&e, &estimate_moments(&e, s_max)?)?;
            match config.output_format {
                OutputFormat::Csv => write_mc_csv(&rows, out),
                OutputFormat::Json => write_json(&mc_json(&rows), out),
            }
        }
        "spectral" => {
            let eps = config.float_list("eps")?.unwrap_or_else(|| vec![0.1, 0.25, 0.5]);
            let chi = config.params.get("chi").map(|c| c.parse::<f64>()).transpose().map_err(|_| Error::Config("--chi: expected a number".into()))?;
            let summary = spectral_norm_study(&e, &eps, chi)?;
            if let Some(path) = config.params.get("lambda-dump") {
                let f = File::create(path).map_err(|err| Error::Config(format!("cannot create {path}: {err}")))?;
                let mut w = BufWriter::new(f);
                write_lambda_dump(&mut w, &summary)?;
                w.flush()?;
            }
            let base = |name: &str, value: f64, eps: String| {
                ReportRow::new(name, RowValue::Float(value), Provenance::Diagnostic)
                    .param("eps", eps)
                    .param("chi", summary.chi)
                    .param("s", summary.s)
            };
            let mut rows = vec![base("lambda_max_median", summary.median, String::new())];
            for r in &summary.rows {
                let mut freq = base("exceedance_frequency", r.frequency, r.eps.to_string());
                freq.provenance = Provenance::MonteCarlo;
                rows.push(freq);
                let mut bound = base("tail_bound", r.bound, r.eps.to_string());
                bound.provenance = Provenance::ClosedForm;
                rows.push(bound);
            }
            write_rows(config, &rows, out)
        }
        _ => Err(Error::Config(format!("--study must be moments or spectral, got {study:?}"))),
    }
}

pub const COMPARE_CSV_HEADER: [&str; 8] =
    ["s", "mc_over_n", "mc_stderr_over_n", "exact_over_n", "series", "mc_ratio", "exact_ratio", "provenance"];

fn compare(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let e = ensemble(config)?;
    let s_max: usize = config.get("s-max", 4)?;
    let rows = compare_asymptotic(&e, s_max, !config.flag("no-mc")?)?;
    let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    match config.output_format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COMPARE_CSV_HEADER).map_err(io_csv_err)?;
            for r in &rows {
                w.write_record([
                    r.s.to_string(),
                    f(r.mc_over_n),
                    f(r.mc_stderr_over_n),
                    r.exact_over_n.as_ref().map(rational::to_exact_string).unwrap_or_default(),
                    rational::to_exact_string(&r.series),
                    f(r.mc_ratio),
                    f(r.exact_ratio),
                    Provenance::Diagnostic.as_str().to_string(),
                ])
                .map_err(io_csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Json => {
            let items = rows
                .iter()
                .map(|r| {
                    json!({
                        "s": r.s,
                        "mc_over_n": r.mc_over_n,
                        "mc_stderr_over_n": r.mc_stderr_over_n.map(|x| if x.is_finite() { json!(x) } else { json!("inf") }),
                        "exact_over_n": r.exact_over_n.as_ref().map(rational::to_exact_string),
                        "series": rational::to_exact_string(&r.series),
                        "mc_ratio": r.mc_ratio,
                        "exact_ratio": r.exact_ratio,
                        "provenance": Provenance::Diagnostic.as_str(),
                    })
                })
                .collect();
            write_json(&serde_json::Value::Array(items), out)
        }
    }
}

fn bounds(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let which: String = config.get("which", "all".to_string())?;
    let (upper, lower, exit) = match which.as_str() {
        "upper" => (true, false, false),
        "lower" => (false, true, false),
        "exit-degree" => (false, false, true),
        "all" => (true, true, true),
        _ => return Err(Error::Config(format!("--which must be upper, lower, exit-degree or all, got {which:?}"))),
    };
    let order: usize = config.get("order", 32)?;
    let mut rows = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let row = |q: &str, s: usize, index: String, check: &str, value: RowValue, prov| {
        ReportRow::new(q, value, prov).param("s", s).param("index", index).param("check", check)
    };
    if upper {
        let grid = config
            .rational_list("u-grid")?
            .unwrap_or_else(|| vec![rational::ratio(1, 100), rational::ratio(1, 10), rational::ratio(1, 2), rational::int(1)]);
        let rep = check_upper_bound(order, &grid)?;
        for c in &rep.cells {
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Inconclusive => "inconclusive",
            };
            rows.push(row("moment_over_catalan", c.s, rational::to_exact_string(&c.u), verdict, RowValue::exact(&c.ratio), Provenance::Series));
        }
        let first = rep.non_passing().next().map(|c| (c.s, rational::to_exact_string(&c.u)));
        if let Some((s, u)) = first {
            failures.push(format!("upper bound not certified at s={s}, u={u}"));
        }
    }
    if lower {
        let rep = check_lower_bound(order)?;
        for r in &rep.rows {
            let ok = r.u0_is_catalan && r.u1_at_least_n12;
            rows.push(row("u1_coefficient", r.s, String::new(), if ok { "pass" } else { "fail" }, RowValue::exact(&r.u1_coefficient), Provenance::Series));
        }
        if let Some(r) = rep.rows.iter().find(|r| !(r.u0_is_catalan && r.u1_at_least_n12)) {
            failures.push(format!("lower bound fails at s={}", r.s));
        }
    }
    if exit {
        let s_max: usize = config.get("s-max", 200)?;
        let rep = check_exit_degree_bound(s_max)?;
        let outside = rep.failures_outside_known_exception();
        rows.push(row(
            "exit_degree_cells",
            s_max,
            String::new(),
            if outside.is_empty() { "pass" } else { "fail" },
            RowValue::integer(rep.cells_checked),
            Provenance::ClosedForm,
        ));
        for c in &rep.failures {
            let known = (c.s, c.d) == (1, 1);
            rows.push(row(
                "exit_degree_violation",
                c.s,
                c.d.to_string(),
                if known { "known" } else { "fail" },
                RowValue::integer(0),
                if known { Provenance::Diagnostic } else { Provenance::ClosedForm },
            ));
        }
        if let Some(c) = outside.first() {
            failures.push(format!("exit degree bound fails at s={}, d={}", c.s, c.d));
        }
    }
    write_rows(config, &rows, out)?;
    match failures.into_iter().next() {
        Some(f) => Err(Error::Inconsistency(f)),
        None => Ok(()),
    }
}

fn selfcheck(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let depth: Depth = config.get("depth", "quick".to_string())?.parse()?;
    let fault: Option<Fault> = config.params.get("inject-fault").map(|f| f.parse()).transpose()?;
    let report = run_selfcheck(depth, fault);
    match config.output_format {
        OutputFormat::Csv => out.write_all(report.render().as_bytes())?,
        OutputFormat::Json => write_json(&serde_json::to_value(&report).expect("plain rows"), out)?,
    }
    match report.first_hard_failure() {
        Some(r) => Err(Error::Inconsistency(format!("selfcheck failed: {}: {}", r.name, r.detail))),
        None => Ok(()),
    }
}
