use std::ops::RangeInclusive;
use std::path::Path;

use serde_json::{json, Map, Value};

use hermite_lab::bounds::{
    exact_constant_cd, growth_rate, kurtosis_excess, lower_constant, lower_rate,
    printed_constant_check, upper_constant, BoundReport,
};
use hermite_lab::hermite::{hermite_fourth_moment, hermite_fourth_moment_linearized};
use hermite_lab::fitting::fit_power_exponential;
use hermite_lab::montecarlo::{run_experiment, ExperimentConfig};
use hermite_lab::statistics::{
    hm2_statistic, hm4_statistic, ht_statistic, m5_statistic, m6_statistic, sb_statistic,
    with_hm4_mc_pvalue,
};

use crate::input::{read_fit_points, read_sample};
use crate::{CliError, Format, GlobalArgs, TestKind, TOOL_VERSION};

/// Reference coefficients of the published fit, echoed for comparison.
const REFERENCE_FIT: (f64, f64, f64) = (0.0015, -2.19, 1.02);

/// 17 significant digits.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt17(x: Option<f64>) -> String {
    x.map(f17).unwrap_or_default()
}

fn ensure_finite(what: &str, values: &[f64]) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("{what} is not finite")))
    }
}

fn json_document(config: Value, mut body: Map<String, Value>) -> String {
    body.insert("tool_version".into(), json!(TOOL_VERSION));
    body.insert("config".into(), config);
    let mut s = serde_json::to_string_pretty(&Value::Object(body)).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_document(comments: &[String], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
    out
}

fn config_line(config: &Value) -> String {
    match config {
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn header_comments(config: &Value) -> Vec<String> {
    vec![format!("hermite-lab {TOOL_VERSION}"), config_line(config)]
}

pub fn bounds(g: &GlobalArgs, n: u64, range: RangeInclusive<u32>) -> Result<String, CliError> {
    let config = json!({
        "command": "bounds",
        "n": n,
        "d_min": range.start(),
        "d_max": range.end(),
    });
    let reports = range
        .map(|d| BoundReport::new(n, d))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        ensure_finite(&format!("bound for d = {}", r.d), &[r.upper, r.exact_constant_cd])?;
    }
    Ok(match g.format {
        Format::Json => {
            let mut body = Map::new();
            body.insert("rows".into(), json!(reports));
            json_document(config, body)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.d.to_string(),
                        f17(r.upper),
                        opt17(r.lower),
                        opt17(r.n_d_necessity),
                        r.n_d_necessity_ceiling.map(|c| c.to_string()).unwrap_or_default(),
                        f17(r.exact_constant_cd),
                        f17(r.exact_constant_bound),
                        r.notes.join("; "),
                    ]
                })
                .collect();
            csv_document(
                &header_comments(&config),
                &[
                    "n",
                    "d",
                    "upper",
                    "lower",
                    "n_d_necessity",
                    "n_d_necessity_ceiling",
                    "exact_constant_cd",
                    "exact_constant_bound",
                    "notes",
                ],
                &rows,
            )
        }
    })
}

pub fn constants(g: &GlobalArgs, d_max: u32) -> Result<String, CliError> {
    if d_max == 0 {
        return Err(CliError::Usage("--d-max must be at least 1".into()));
    }
    let config = json!({ "command": "constants", "d_max": d_max });
    let mut rows = Vec::new();
    for d in 1..=d_max {
        let fourth = hermite_fourth_moment(d);
        let routes_agree = fourth == hermite_fourth_moment_linearized(d);
        let cd = exact_constant_cd(d)?;
        let mut row = Map::new();
        row.insert("d".into(), json!(d));
        row.insert("fourth_moment".into(), json!(fourth.to_string()));
        row.insert("fourth_moment_routes_agree".into(), json!(routes_agree));
        row.insert("cd_oracle".into(), json!(cd.value.to_f64()));
        row.insert("cd_outside_intended_range".into(), json!(cd.outside_intended_range));
        if d >= 2 {
            row.insert("kurtosis_excess".into(), json!(kurtosis_excess(d)?.to_string()));
        }
        let mut flags: Vec<String> = Vec::new();
        if let Some(check) = printed_constant_check(d) {
            row.insert("cd_printed_value".into(), json!(check.printed_value));
            row.insert(
                "cd_printed_expression".into(),
                json!(check.printed_expression_value.to_f64()),
            );
            row.insert("corollary_constant".into(), json!(check.corollary_constant));
            flags.extend(check.notes.iter().cloned());
        }
        if d % 2 == 0 {
            let cert = lower_rate(d)?;
            row.insert("lower_rate".into(), json!(cert.exact_rate.to_f64()));
            row.insert("stirling_floor".into(), json!(cert.stirling_floor.to_f64()));
            row.insert(
                "intermediate_floor".into(),
                json!(cert.intermediate_floor.map(|v| v.to_f64())),
            );
            row.insert("lower_rate_floor_holds".into(), json!(cert.floor_holds()));
            row.insert(
                "squared_rate_identity_holds".into(),
                json!(cert.integer_identity_holds()),
            );
            if !cert.floor_holds() {
                flags.push("lower rate falls below its Stirling floor".into());
            }
        }
        if !routes_agree {
            flags.push("fourth-moment routes disagree".into());
        }
        row.insert("flags".into(), json!(flags));
        rows.push(Value::Object(row));
    }
    let globals = json!({
        "upper_constant": upper_constant().to_f64(),
        "lower_constant": lower_constant().to_f64(),
        "growth_rate": growth_rate().to_f64(),
    });
    Ok(match g.format {
        Format::Json => {
            let mut body = Map::new();
            body.insert("constants".into(), globals);
            body.insert("rows".into(), Value::Array(rows));
            json_document(config, body)
        }
        Format::Csv => {
            let columns = [
                "d",
                "fourth_moment",
                "fourth_moment_routes_agree",
                "cd_oracle",
                "cd_printed_value",
                "cd_printed_expression",
                "lower_rate",
                "stirling_floor",
                "intermediate_floor",
                "kurtosis_excess",
                "flags",
            ];
            let cell = |row: &Value, key: &str| -> String {
                match &row[key] {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    Value::Number(n) => match n.as_f64() {
                        Some(x) if n.is_f64() => f17(x),
                        _ => n.to_string(),
                    },
                    Value::Array(a) => a
                        .iter()
                        .filter_map(Value::as_str)
                        .collect::<Vec<_>>()
                        .join(" | "),
                    other => other.to_string(),
                }
            };
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| columns.iter().map(|c| cell(r, c)).collect())
                .collect();
            let mut comments = header_comments(&config);
            comments.push(format!(
                "upper_constant={} lower_constant={} growth_rate={}",
                f17(upper_constant().to_f64()),
                f17(lower_constant().to_f64()),
                f17(growth_rate().to_f64())
            ));
            csv_document(&comments, &columns, &table)
        }
    })
}

pub fn test(
    g: &GlobalArgs,
    input: &Path,
    kind: TestKind,
    d: Option<usize>,
    standardize: bool,
    mc_pvalue: Option<u64>,
) -> Result<String, CliError> {
    let mut data = read_sample(input)?;
    let mut notes: Vec<String> = Vec::new();
    if standardize {
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let sd = (data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        if !(sd > 0.0) {
            return Err(CliError::Usage("cannot standardize a constant sample".into()));
        }
        for x in &mut data {
            *x = (*x - mean) / sd;
        }
        notes.push(format!(
            "data standardized with sample mean {mean} and standard deviation {sd}; the limit \
             laws assume known mean and variance, so p-values are approximate"
        ));
    }
    if mc_pvalue.is_some() && kind != TestKind::Hm4 {
        return Err(CliError::Usage("--mc-pvalue applies to hm4 only".into()));
    }
    if d.is_some() && kind != TestKind::Ht {
        return Err(CliError::Usage("--d applies to ht only".into()));
    }
    let mut result = match kind {
        TestKind::Ht => {
            let d = d.ok_or_else(|| CliError::Usage("ht needs --d".into()))?;
            ht_statistic(&data, d)?
        }
        TestKind::Sb => sb_statistic(&data)?,
        TestKind::Hm4 => hm4_statistic(&data)?,
        TestKind::M5 => m5_statistic(&data)?,
        TestKind::M6 => m6_statistic(&data)?,
        TestKind::Hm2 => hm2_statistic(&data)?,
    };
    if kind == TestKind::Hm4 {
        match mc_pvalue {
            Some(m) => {
                result = with_hm4_mc_pvalue(result, m, g.seed)?;
                notes.push(format!(
                    "limit law is not chi-square; p-value simulated from {m} draws of the limiting quadratic form"
                ));
            }
            None => notes.push(
                "limit law is not chi-square; no p-value (use --mc-pvalue M for a Monte-Carlo estimate)"
                    .into(),
            ),
        }
    }
    ensure_finite("statistic", &[result.statistic])?;

    let config = json!({
        "command": "test",
        "input": input.display().to_string(),
        "test": result.name.as_str(),
        "d": d,
        "standardize": standardize,
        "mc_pvalue": mc_pvalue,
        "seed": g.seed,
    });
    Ok(match g.format {
        Format::Json => {
            let mut body = match serde_json::to_value(&result).expect("serializable") {
                Value::Object(m) => m,
                _ => unreachable!("TestResult serializes to an object"),
            };
            body.remove("name");
            body.insert("test".into(), json!(result.name.as_str()));
            body.insert("notes".into(), json!(notes));
            json_document(config, body)
        }
        Format::Csv => {
            let reference = match &result.reference {
                hermite_lab::statistics::Reference::ChiSquare { df } => format!("chi2({df})"),
                hermite_lab::statistics::Reference::GaussianQuadraticForm { .. } => {
                    "gaussian_quadratic_form".into()
                }
            };
            csv_document(
                &header_comments(&config),
                &["test", "n", "d", "statistic", "reference", "p_value", "notes"],
                &[vec![
                    result.name.as_str().into(),
                    result.n.to_string(),
                    result.d.map(|d| d.to_string()).unwrap_or_default(),
                    f17(result.statistic),
                    reference,
                    opt17(result.p_value),
                    notes.join("; "),
                ]],
            )
        }
    })
}

pub fn experiment(
    g: &GlobalArgs,
    n: usize,
    d_min: usize,
    d_max: usize,
    replicates: usize,
) -> Result<String, CliError> {
    let cfg = ExperimentConfig { n, d_min, d_max, replicates, seed: g.seed, threads: g.threads };
    let rows = run_experiment(&cfg)?;
    for r in &rows {
        ensure_finite(&format!("row d = {}", r.d), &[r.ks.distance, r.upper_bound])?;
    }
    // The thread count is left out so output bytes do not depend on it.
    let config = json!({
        "command": "experiment",
        "n": n,
        "d_min": d_min,
        "d_max": d_max,
        "replicates": replicates,
        "seed": g.seed,
    });
    let vacuous: Vec<String> = rows
        .iter()
        .filter(|r| r.bound_is_vacuous())
        .map(|r| r.d.to_string())
        .collect();
    Ok(match g.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d,
                        "n": r.n,
                        "replicates": r.replicates,
                        "ks": r.ks.distance,
                        "dkw95": r.ks.dkw_95,
                        "upper_bound": r.upper_bound,
                        "bound_vacuous": r.bound_is_vacuous(),
                        "seed": r.seed,
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("rows".into(), Value::Array(items));
            json_document(config, body)
        }
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        r.n.to_string(),
                        r.replicates.to_string(),
                        f17(r.ks.distance),
                        f17(r.ks.dkw_95),
                        f17(r.upper_bound),
                        r.seed.to_string(),
                    ]
                })
                .collect();
            let mut out = csv_document(
                &header_comments(&config),
                &["d", "n", "replicates", "ks", "dkw95", "upper_bound", "seed"],
                &table,
            );
            if !vacuous.is_empty() {
                out.push_str(&format!(
                    "# upper_bound >= 1 (vacuous) for d = {}\n",
                    vacuous.join(",")
                ));
            }
            out
        }
    })
}

pub fn fit(g: &GlobalArgs, input: &Path) -> Result<String, CliError> {
    let points = read_fit_points(input)?;
    let fit = fit_power_exponential(&points)?;
    let theory = growth_rate().ln().to_f64();
    let config = json!({ "command": "fit", "input": input.display().to_string() });
    let (ra, rb, rc) = REFERENCE_FIT;
    let within_3se = fit.std_errors.map(|se| (fit.c - theory).abs() <= 3.0 * se[2]);
    Ok(match g.format {
        Format::Json => {
            let mut body = Map::new();
            body.insert("a".into(), json!(fit.a));
            body.insert("b".into(), json!(fit.b));
            body.insert("c".into(), json!(fit.c));
            body.insert("r_squared_log".into(), json!(fit.r_squared_log));
            body.insert("residuals".into(), json!(fit.residuals));
            body.insert(
                "std_errors".into(),
                json!(fit.std_errors.map(|s| json!({ "ln_a": s[0], "b": s[1], "c": s[2] }))),
            );
            body.insert("points".into(), json!(fit.points));
            body.insert("reference_fit".into(), json!({ "a": ra, "b": rb, "c": rc }));
            body.insert("theoretical_exponent".into(), json!(theory));
            body.insert("theoretical_exponent_within_3se".into(), json!(within_3se));
            json_document(config, body)
        }
        Format::Csv => {
            let se = fit.std_errors;
            csv_document(
                &header_comments(&config),
                &["a", "b", "c", "r_squared_log", "se_ln_a", "se_b", "se_c"],
                &[vec![
                    f17(fit.a),
                    f17(fit.b),
                    f17(fit.c),
                    f17(fit.r_squared_log),
                    opt17(se.map(|s| s[0])),
                    opt17(se.map(|s| s[1])),
                    opt17(se.map(|s| s[2])),
                ]],
            )
        }
    })
}
