use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::sweep::{SweepRow, SPECTRAL_MEASURES};

/// Reference slopes drawn on every figure.
pub const GUIDES: [(f64, &str); 3] = [(1.0 / 3.0, "(ka)^{1/3}"), (-1.0 / 3.0, "(ka)^{-1/3}"), (-1.0, "(ka)^{-1}")];

/// Figure file stem for a measure tag.
fn figure(measure: &str) -> String {
    match measure {
        "S_L2" => "scattering".into(),
        "cond" => "conditioning".into(),
        m if SPECTRAL_MEASURES.contains(&m) => format!("spectral_{m}"),
        m => format!("current_{m}"),
    }
}

fn title(measure: &str) -> String {
    match measure {
        "S_L2" => "scattering error s_{L2}".into(),
        "cond" => "condition number".into(),
        "abs_EP" => "|E^P| at q = floor(ka)".into(),
        "abs_EA" => "|E^A| at q = floor(ka)".into(),
        "re_EA" => "|Re E^A| at q = floor(ka)".into(),
        "im_EA" => "|Im E^A| at q = floor(ka)".into(),
        "abs_E" => "|E| at q = floor(ka)".into(),
        m => format!("current error r_{{{m}}}"),
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Writes one gnuplot script per figure class present in `rows`, each
/// reading `csv` directly. Returns the scripts written; an empty dataset
/// writes nothing.
pub fn emit_plots(rows: &[SweepRow], csv: &Path, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if rows.is_empty() {
        eprintln!("warning: empty dataset, no plot scripts written");
        return Ok(Vec::new());
    }
    // figure -> measure -> ordered series (formulation, engine)
    let mut figs: BTreeMap<String, (String, Vec<(String, String)>, Vec<(f64, f64)>)> = BTreeMap::new();
    for r in rows {
        let entry = figs.entry(figure(&r.measure)).or_insert_with(|| (r.measure.clone(), Vec::new(), Vec::new()));
        let key = (r.formulation.clone(), r.engine.clone());
        if !entry.1.contains(&key) {
            entry.1.push(key);
        }
        if let Some(v) = r.value.filter(|v| *v > 0.0 && v.is_finite()) {
            entry.2.push((r.ka, v));
        }
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (stem, (measure, series, values)) in figs {
        let path = dir.join(format!("{stem}.gp"));
        std::fs::write(&path, script(&measure, &series, &values, csv))?;
        written.push(path);
    }
    Ok(written)
}

fn script(measure: &str, series: &[(String, String)], values: &[(f64, f64)], csv: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", title(measure));
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set xlabel \"ka\"");
    let _ = writeln!(s, "set ylabel {}", quoted(&title(measure)));
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "csv = {}", quoted(&csv.display().to_string()));
    let _ = writeln!(s, "sel(f, e, m) = (strcol(3) eq f && strcol(4) eq e && strcol(5) eq m && strcol(6) ne \"\") ? column(6) : NaN");
    // Guides pass through the geometric centre of the data.
    let (lx, ly) = if values.is_empty() {
        (0.0, 0.0)
    } else {
        let n = values.len() as f64;
        (values.iter().map(|p| p.0.ln()).sum::<f64>() / n, values.iter().map(|p| p.1.ln()).sum::<f64>() / n)
    };
    for (i, (p, _)) in GUIDES.iter().enumerate() {
        let _ = writeln!(s, "g{i}(x) = {:e} * x**({p:e})", (ly - p * lx).exp());
    }
    let mut plots: Vec<String> = series
        .iter()
        .map(|(f, e)| {
            format!(
                "csv using 1:(sel({}, {}, {})) skip 1 with linespoints title {}",
                quoted(f),
                quoted(e),
                quoted(measure),
                quoted(&format!("{f} ({e})"))
            )
        })
        .collect();
    for (i, (_, label)) in GUIDES.iter().enumerate() {
        plots.push(format!("g{i}(x) with lines dashtype 2 lc rgb \"gray\" title {}", quoted(label)));
    }
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(formulation: &str, measure: &str, ka: f64, v: f64) -> SweepRow {
        SweepRow {
            ka,
            n: 0,
            formulation: formulation.into(),
            engine: "predicted".into(),
            measure: measure.into(),
            value: Some(v),
            masked: false,
            error: None,
        }
    }

    #[test]
    fn one_script_per_figure_class() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            row("TE-EFIE", "L2", 30.0, 0.1),
            row("TE-EFIE", "L2", 300.0, 0.2),
            row("TM-CCFIE", "L2", 30.0, 0.1),
            row("TM-EFIE", "cond", 30.0, 10.0),
            row("TM-CCFIE", "cond", 30.0, 2.0),
            row("TE-EFIE", "S_L2", 30.0, 1e-2),
        ];
        let out = emit_plots(&rows, Path::new("data/sweep.csv"), dir.path()).unwrap();
        let names: Vec<_> = out.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, ["conditioning.gp", "current_L2.gp", "scattering.gp"]);
        let cur = std::fs::read_to_string(&out[1]).unwrap();
        assert!(cur.contains("set logscale xy"));
        assert!(cur.contains("csv = \"data/sweep.csv\""));
        assert!(cur.contains("sel(\"TE-EFIE\", \"predicted\", \"L2\")"));
        assert!(cur.contains("(ka)^{1/3}") && cur.contains("(ka)^{-1/3}") && cur.contains("(ka)^{-1}"));
        let cond = std::fs::read_to_string(&out[0]).unwrap();
        assert!(cond.contains("TM-EFIE") && cond.contains("TM-CCFIE"));
    }

    #[test]
    fn spectral_figure_carries_positive_third_guide() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![row("N", "abs_EA", 30.0, 0.3), row("N", "abs_EA", 300.0, 0.6)];
        let out = emit_plots(&rows, Path::new("s.csv"), dir.path()).unwrap();
        assert_eq!(out.len(), 1);
        let s = std::fs::read_to_string(&out[0]).unwrap();
        assert!(s.contains("sel(\"N\", \"predicted\", \"abs_EA\")"));
        assert!(s.contains("x**(3.333333333333333e-1)"));
    }

    #[test]
    fn empty_dataset_is_a_no_op() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("plots");
        assert!(emit_plots(&[], Path::new("x.csv"), &target).unwrap().is_empty());
        assert!(!target.exists());
    }
}
