//! Report number formatting and the metrics CSV.

use crate::error::{Error, Result};
use crate::stats::{Labels, MetricMatrix};

const LABEL_PREFIX: &str = "label:";

/// `x` with six significant digits, like C's `%.6g`. Non-finite values
/// print as `NaN`, `inf` or `-inf`.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to six significant digits; JSON reports serialize this value.
pub fn round_sig6(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig6(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

/// Writes `drawing_id`, then one `label:<tag>` column per label tag, then
/// the metric columns.
pub fn write_metrics_csv(m: &MetricMatrix<f64>) -> Result<String> {
    let tags: std::collections::BTreeSet<&str> = m.labels().iter().flat_map(|l| l.keys().map(String::as_str)).collect();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["drawing_id".to_string()];
    header.extend(tags.iter().map(|t| format!("{LABEL_PREFIX}{t}")));
    header.extend(m.col_names().iter().cloned());
    w.write_record(&header)?;
    for (i, id) in m.row_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(tags.iter().map(|t| m.label(i, t).unwrap_or("").to_string()));
        rec.extend(m.values().row(i).iter().map(|&v| fmt_sig6(v)));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Reads the format of [`write_metrics_csv`].
pub fn read_metrics_csv(bytes: &[u8]) -> Result<MetricMatrix<f64>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(bytes);
    let header = r.headers()?.clone();
    if header.get(0) != Some("drawing_id") {
        return Err(Error::Parse { line: 1, message: "first column must be 'drawing_id'".into() });
    }
    let mut label_cols = Vec::new();
    let mut metric_cols = Vec::new();
    for (j, h) in header.iter().enumerate().skip(1) {
        match h.strip_prefix(LABEL_PREFIX) {
            Some(tag) => label_cols.push((j, tag.to_string())),
            None => metric_cols.push((j, h.to_string())),
        }
    }
    let (mut ids, mut rows, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for (n, rec) in r.records().enumerate() {
        let line = n + 2;
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Parse { line, message: format!("{} fields, header has {}", rec.len(), header.len()) });
        }
        ids.push(rec[0].to_string());
        let mut l = Labels::new();
        for (j, tag) in &label_cols {
            if !rec[*j].is_empty() {
                l.insert(tag.clone(), rec[*j].to_string());
            }
        }
        labels.push(l);
        let row = metric_cols
            .iter()
            .map(|(j, name)| {
                rec[*j].trim().parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("column '{name}': '{}' is not a number", &rec[*j]),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    MetricMatrix::new(ids, metric_cols.into_iter().map(|(_, n)| n).collect(), rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(1.0), "1");
        assert_eq!(fmt_sig6(-2.5), "-2.5");
        assert_eq!(fmt_sig6(std::f64::consts::PI), "3.14159");
        assert_eq!(fmt_sig6(123456.7), "123457");
        assert_eq!(fmt_sig6(1234567.0), "1.23457e+06");
        assert_eq!(fmt_sig6(0.0001234567), "0.000123457");
        assert_eq!(fmt_sig6(0.00001234567), "1.23457e-05");
        assert_eq!(fmt_sig6(999999.5), "1e+06");
        assert_eq!(fmt_sig6(0.1 + 0.2), "0.3");
        assert_eq!(round_sig6(2.0 / 3.0), 0.666667);
    }

    #[test]
    fn metrics_csv_round_trip() {
        let labels = vec![
            Labels::from([("group".to_string(), "a".to_string())]),
            Labels::from([("group".to_string(), "b".to_string()), ("age".to_string(), "3".to_string())]),
        ];
        let m = MetricMatrix::new(
            vec!["d1".into(), "d2".into()],
            vec!["x".into(), "y".into()],
            vec![vec![1.5, 2.0], vec![0.25, -3.0]],
            labels,
        )
        .unwrap();
        let text = write_metrics_csv(&m).unwrap();
        assert_eq!(text, "drawing_id,label:age,label:group,x,y\nd1,,a,1.5,2\nd2,3,b,0.25,-3\n");
        assert_eq!(read_metrics_csv(text.as_bytes()).unwrap(), m);
    }

    #[test]
    fn bad_metrics_csv() {
        let e = read_metrics_csv(b"drawing_id,x\nd1,abc\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(read_metrics_csv(b"id,x\n").is_err());
    }
}
