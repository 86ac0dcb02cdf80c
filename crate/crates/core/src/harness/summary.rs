use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::embed::embedding_size;
use super::method::{Method, MethodKind};
use crate::decay::{fit_decay, quantile_sorted};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, parse_f64, FitRow, ResultRow};

/// State-averaged survival `(t, mean p0)` per (method, embedding), ordered
/// by key and time.
pub fn mean_traces(rows: &[ResultRow]) -> BTreeMap<(String, String), Vec<(f64, f64)>> {
    let mut acc: BTreeMap<(String, String), BTreeMap<u64, (f64, f64, usize)>> = BTreeMap::new();
    for r in rows {
        let e = acc
            .entry((r.method.clone(), r.embedding_id.clone()))
            .or_default()
            .entry(r.duration_s.to_bits())
            .or_insert((r.duration_s, 0.0, 0));
        e.1 += r.p0;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(k, pts)| {
            let mut v: Vec<(f64, f64)> = pts.into_values().map(|(t, s, n)| (t, s / n as f64)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            (k, v)
        })
        .collect()
}

/// Fit the state-averaged trace of every (method, embedding).
pub fn fit_dataset(rows: &[ResultRow]) -> Result<Vec<FitRow>> {
    mean_traces(rows)
        .into_iter()
        .map(|((method, embedding_id), pts)| {
            let fit = fit_decay(&pts).map_err(|e| Error::Data(format!("{method} on {embedding_id}: {e}")))?;
            Ok(FitRow {
                method,
                embedding_id,
                fit,
            })
        })
        .collect()
}

/// Median and spread of `τ_γ` over embeddings for one (n, method).
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub method: String,
    pub embeddings: usize,
    pub median_tau_s: f64,
    pub q1_tau_s: f64,
    pub q3_tau_s: f64,
    pub iqr_tau_s: f64,
    /// Median over the better IDLE median, for SIM rows.
    pub ratio_sim_idle: Option<f64>,
    /// Median over the best SIM median of the same base sequence, for CR rows.
    pub ratio_cr_sim: Option<f64>,
}

fn spread(mut taus: Vec<f64>) -> (f64, f64, f64, f64) {
    taus.sort_by(f64::total_cmp);
    let (q1, med, q3) = (
        quantile_sorted(&taus, 0.25),
        quantile_sorted(&taus, 0.5),
        quantile_sorted(&taus, 0.75),
    );
    let iqr = if q1 == q3 { 0.0 } else { q3 - q1 };
    // q3 = inf with finite q1 gives an infinite spread, as it should
    (med, q1, q3, iqr)
}

/// Median `τ_γ` tables over embeddings, with SIM/IDLE and CR/SIM ratios.
/// When several IDLE (or SIM) methods exist at one register size, the one
/// with the larger median is the reference.
pub fn summarize(fits: &[FitRow]) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for f in fits {
        let n = embedding_size(&f.embedding_id).unwrap_or(0);
        groups.entry((n, f.method.clone())).or_default().push(f.fit.tau_gamma);
    }
    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((n, method), taus)| {
            let count = taus.len();
            let (median, q1, q3, iqr) = spread(taus);
            SummaryRow {
                n,
                method,
                embeddings: count,
                median_tau_s: median,
                q1_tau_s: q1,
                q3_tau_s: q3,
                iqr_tau_s: iqr,
                ratio_sim_idle: None,
                ratio_cr_sim: None,
            }
        })
        .collect();
    let parsed: Vec<Option<Method>> = rows.iter().map(|r| Method::parse(&r.method).ok()).collect();
    let best = |n: usize, pick: &dyn Fn(&Method) -> bool| -> Option<f64> {
        rows.iter()
            .zip(&parsed)
            .filter(|(r, m)| r.n == n && m.as_ref().is_some_and(|m| pick(m)))
            .map(|(r, _)| r.median_tau_s)
            .max_by(f64::total_cmp)
    };
    let ratios: Vec<(Option<f64>, Option<f64>)> = rows
        .iter()
        .zip(&parsed)
        .map(|(r, m)| match m.as_ref().map(|m| (&m.kind, m.base())) {
            Some((MethodKind::Sim { .. }, _)) => (best(r.n, &|m| m.is_idle()).map(|i| r.median_tau_s / i), None),
            Some((MethodKind::Cr { .. }, Some(base))) => (
                None,
                best(r.n, &|m| matches!(m.kind, MethodKind::Sim { .. }) && m.base() == Some(base))
                    .map(|s| r.median_tau_s / s),
            ),
            _ => (None, None),
        })
        .collect();
    for (r, (a, b)) in rows.iter_mut().zip(ratios) {
        r.ratio_sim_idle = a;
        r.ratio_cr_sim = b;
    }
    Ok(rows)
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "n",
    "method",
    "embeddings",
    "median_tau_s",
    "q1_tau_s",
    "q3_tau_s",
    "iqr_tau_s",
    "ratio_sim_idle",
    "ratio_cr_sim",
];

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(SUMMARY_HEADER)?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for r in rows {
        out.write_record([
            r.n.to_string(),
            r.method.clone(),
            r.embeddings.to_string(),
            fmt_f64(r.median_tau_s),
            fmt_f64(r.q1_tau_s),
            fmt_f64(r.q3_tau_s),
            fmt_f64(r.iqr_tau_s),
            opt(r.ratio_sim_idle),
            opt(r.ratio_cr_sim),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(r: R) -> Result<Vec<SummaryRow>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| rec.get(k).unwrap_or("");
        let opt = |k: usize| -> Result<Option<f64>> {
            if f(k).is_empty() {
                Ok(None)
            } else {
                parse_f64(f(k)).map(Some)
            }
        };
        rows.push(SummaryRow {
            n: f(0).parse().map_err(|_| Error::Data(format!("bad n {:?}", f(0))))?,
            method: f(1).to_string(),
            embeddings: f(2).parse().map_err(|_| Error::Data(format!("bad count {:?}", f(2))))?,
            median_tau_s: parse_f64(f(3))?,
            q1_tau_s: parse_f64(f(4))?,
            q3_tau_s: parse_f64(f(5))?,
            iqr_tau_s: parse_f64(f(6))?,
            ratio_sim_idle: opt(7)?,
            ratio_cr_sim: opt(8)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::{FitFlag, FitResult};

    fn fit(method: &str, emb: &str, tau: f64) -> FitRow {
        FitRow {
            method: method.into(),
            embedding_id: emb.into(),
            fit: FitResult {
                a: 0.5,
                gamma: 1.0 / tau,
                c: 0.5,
                tau_gamma: tau,
                rss: 0.0,
                std_err: [0.0; 3],
                iterations: 1,
                flag: FitFlag::Ok,
            },
        }
    }

    #[test]
    fn single_embedding() {
        let s = summarize(&[fit("CR-XY4", "n4-0", 3.0)]).unwrap();
        assert_eq!((s[0].median_tau_s, s[0].iqr_tau_s, s[0].n), (3.0, 0.0, 4));
    }

    #[test]
    fn medians_and_ratios() {
        let mut fits = Vec::new();
        for (i, t) in [1.0, 2.0, 3.0, 4.0, 5.0].iter().enumerate() {
            let e = format!("n4-{i}");
            fits.push(fit("IDLE", &e, *t));
            fits.push(fit("IDLE-CR-XY4", &e, t * 1.5));
            fits.push(fit("SIM-XY4-2", &e, t * 2.0));
            fits.push(fit("CR-XY4", &e, t * 8.0));
            fits.push(fit("CR-UR10", &e, *t));
        }
        let s = summarize(&fits).unwrap();
        let get = |m: &str| s.iter().find(|r| r.method == m).unwrap();
        assert_eq!(get("IDLE").median_tau_s, 3.0);
        assert_eq!(get("IDLE").iqr_tau_s, 2.0);
        assert_eq!(get("SIM-XY4-2").ratio_sim_idle, Some(6.0 / 4.5));
        assert_eq!(get("CR-XY4").ratio_cr_sim, Some(4.0));
        assert_eq!(get("CR-UR10").ratio_cr_sim, None);
        let mut buf = Vec::new();
        write_summary(&mut buf, &s).unwrap();
        assert_eq!(read_summary(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn averaging_and_fitting() {
        let mut rows = Vec::new();
        for (k, t) in [0.0f64, 1.0, 2.0, 3.0, 4.0].iter().enumerate() {
            for (s, off) in [("a", 0.01), ("b", -0.01)] {
                let p = 0.5 * (-0.5 * *t).exp() + 0.5 + if k > 0 { off } else { 0.0 };
                rows.push(ResultRow {
                    method: "M".into(),
                    embedding_id: "n1-0".into(),
                    state_id: s.into(),
                    duration_s: *t,
                    pulses: k,
                    shots: 1,
                    zeros: 0,
                    p0: p,
                });
            }
        }
        let f = fit_dataset(&rows).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0].fit.gamma - 0.5).abs() < 1e-8);
    }
}
