use std::fs;
use std::path::Path;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Newline-delimited decimals. Blank lines, `#` comments and a leading `x`
/// header are skipped.
pub fn read_sample(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = read(path)?;
    let mut out = Vec::new();
    let mut seen_value = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_value && line.eq_ignore_ascii_case("x") {
            seen_value = true;
            continue;
        }
        seen_value = true;
        let v: f64 = line.parse().map_err(|_| {
            CliError::Usage(format!("{}:{}: not a number: {line:?}", path.display(), lineno + 1))
        })?;
        if !v.is_finite() {
            return Err(CliError::Usage(format!(
                "{}:{}: value is not finite",
                path.display(),
                lineno + 1
            )));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{}: no data", path.display())));
    }
    Ok(out)
}

/// `(d, ks)` pairs from a CSV with those column names (`#` lines skipped),
/// or from the `rows` array of the experiment's JSON output.
pub fn read_fit_points(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return read_fit_points_json(path, &text);
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let bad = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (di, ki) = (col("d")?, col("ks")?);
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |j: usize| -> Result<f64, CliError> {
            let s = rec.get(j).unwrap_or("");
            s.parse()
                .map_err(|_| bad(format!("row {}: not a number: {s:?}", i + 1)))
        };
        points.push((field(di)?, field(ki)?));
    }
    Ok(points)
}

fn read_fit_points_json(path: &Path, text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let bad = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let rows = doc["rows"]
        .as_array()
        .ok_or_else(|| bad("expected a `rows` array".into()))?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| match (r["d"].as_f64(), r["ks"].as_f64()) {
            (Some(d), Some(ks)) => Ok((d, ks)),
            _ => Err(bad(format!("row {}: needs numeric `d` and `ks`", i + 1))),
        })
        .collect()
}
