use std::collections::BTreeMap;
use std::fmt;

use cylscat::analysis::fit_slope;

use crate::sweep::SweepRow;

const THIRD: f64 = 1.0 / 3.0;

/// Expected log-log slope range for a `(formulation or operator, measure)` series.
pub fn expected_slope(series: &str, measure: &str) -> Option<(f64, f64)> {
    let current = matches!(measure, "L2" | "Hs" | "Hsk");
    match (series, measure) {
        ("TE-EFIE", m) if current || m == "cond" => Some((THIRD - 0.1, THIRD + 0.1)),
        ("TE-EFIE", "S_L2") => Some((0.05, 0.35)),
        ("TM-EFIE" | "TM-MFIE" | "TE-MFIE", "L2") => Some((-0.1, 0.1)),
        ("TE-EFIE_F" | "TM-CCFIE_F" | "TE-CCFIE_F", _) if current => Some((-0.1, 0.1)),
        ("TM-EFIE", "cond") => Some((THIRD - 0.1, THIRD + 0.1)),
        ("TM-CCFIE" | "TE-CCFIE", "cond") => Some((-0.1, 0.1)),
        ("S", "abs_EA") => Some((-THIRD - 0.1, -THIRD + 0.1)),
        ("N", "abs_EA") => Some((THIRD - 0.1, THIRD + 0.1)),
        ("D", "im_EA") => Some((-1.15, -0.85)),
        ("D", "re_EA") => Some((-5.0 / 3.0 - 0.25, -5.0 / 3.0 + 0.25)),
        ("TM-MFIO" | "TE-MFIO", "abs_E") => Some((-0.1, 0.1)),
        ("TM-CCFIO" | "TE-CCFIO", "abs_EA") => Some((THIRD - 0.15, THIRD + 0.15)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeLine {
    pub series: String,
    pub engine: String,
    pub measure: String,
    /// Slope and standard error, or why the fit failed.
    pub fit: Result<(f64, f64), String>,
    pub points: usize,
    pub expected: Option<(f64, f64)>,
}

impl SlopeLine {
    /// `None` when no check applies.
    pub fn passed(&self) -> Option<bool> {
        let (lo, hi) = self.expected?;
        Some(matches!(self.fit, Ok((m, _)) if m >= lo && m <= hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub what: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub lines: Vec<SlopeLine>,
    pub comparisons: Vec<Comparison>,
}

impl Summary {
    /// Slope of every `(series, engine, measure)` group over its unmasked points.
    pub fn from_rows(rows: &[SweepRow]) -> Self {
        let mut groups: BTreeMap<(String, String, String), (Vec<(f64, f64)>, Vec<bool>)> = BTreeMap::new();
        let mut order = Vec::new();
        for r in rows {
            let key = (r.formulation.clone(), r.engine.clone(), r.measure.clone());
            let g = groups.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                Default::default()
            });
            // Failed points are excluded like masked ones.
            g.0.push((r.ka, r.value.unwrap_or(f64::NAN)));
            g.1.push(r.masked || r.value.is_none());
        }
        let lines: Vec<SlopeLine> = order
            .into_iter()
            .map(|key| {
                let (series, mask) = &groups[&key];
                let points = mask.iter().filter(|m| !**m).count();
                SlopeLine {
                    fit: fit_slope(series, mask).map_err(|e| e.to_string()),
                    expected: expected_slope(&key.0, &key.2),
                    series: key.0,
                    engine: key.1,
                    measure: key.2,
                    points,
                }
            })
            .collect();
        let mut comparisons = Vec::new();
        for cc in lines.iter().filter(|l| l.series == "TE-CCFIE") {
            let efie = lines.iter().find(|l| l.series == "TE-EFIE" && l.engine == cc.engine && l.measure == cc.measure);
            if let (Some(e), Ok((a, _)), true) = (efie, &cc.fit, matches!(cc.measure.as_str(), "L2" | "Hs" | "Hsk")) {
                let passed = matches!(e.fit, Ok((b, _)) if *a < b);
                comparisons.push(Comparison { what: format!("TE-CCFIE {} slope below TE-EFIE ({})", cc.measure, cc.engine), passed });
            }
        }
        Summary { lines, comparisons }
    }

    pub fn checks(&self) -> usize {
        self.lines.iter().filter(|l| l.expected.is_some()).count() + self.comparisons.len()
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| l.passed() == Some(false)).count() + self.comparisons.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:<10} {:<7} {:>8} {:>8} {:>6}  check", "series", "engine", "measure", "slope", "stderr", "points")?;
        for l in &self.lines {
            let (m, e) = match &l.fit {
                Ok((m, e)) => (format!("{m:.4}"), format!("{e:.4}")),
                Err(_) => ("-".into(), "-".into()),
            };
            let check = match (l.expected, l.passed()) {
                (Some((lo, hi)), Some(ok)) => format!("{} in [{lo:.3}, {hi:.3}]", if ok { "PASS" } else { "FAIL" }),
                _ => String::new(),
            };
            write!(f, "{:<12} {:<10} {:<7} {:>8} {:>8} {:>6}  {check}", l.series, l.engine, l.measure, m, e, l.points)?;
            if let Err(reason) = &l.fit {
                write!(f, " ({reason})")?;
            }
            writeln!(f)?;
        }
        for c in &self.comparisons {
            writeln!(f, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.what)?;
        }
        write!(f, "{} of {} checks failed", self.failures(), self.checks())
    }
}
