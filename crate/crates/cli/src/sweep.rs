use std::io::{Read, Write};
use std::path::Path;

use cylscat::analysis::ka_grid;
use cylscat::discretization::spectral_error_in;
use cylscat::spectra::ModalContext;
use cylscat::{Analysis64, Engine, Formulation, Operator, OperatorKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Quantity, SweepConfig};
use crate::error::CliError;

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ka: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub formulation: String,
    pub engine: String,
    pub measure: String,
    pub value: Option<f64>,
    pub masked: bool,
    pub error: Option<String>,
}

/// Operators swept in spectral mode.
pub const SPECTRAL_OPERATORS: [Operator; 7] = [
    Operator::SingleLayer,
    Operator::DoubleLayer,
    Operator::Hypersingular,
    Operator::TmMfio,
    Operator::TeMfio,
    Operator::TmCcfio,
    Operator::TeCcfio,
];

/// Spectral-mode measures: `|E^P|`, `|E^A|`, `|Re E^A|`, `|Im E^A|`, `|E|`.
pub const SPECTRAL_MEASURES: [&str; 5] = ["abs_EP", "abs_EA", "re_EA", "im_EA", "abs_E"];

struct Point {
    ka: f64,
    n: usize,
    masked: bool,
    note: Option<String>,
    analysis: Option<Analysis64>,
}

fn point(cfg: &SweepConfig, ka: f64) -> Point {
    match cfg.problem(ka) {
        Err(e) => Point { ka, n: 0, masked: true, note: Some(e.to_string()), analysis: None },
        Ok(p) => {
            let an = Analysis64::new(p);
            let (masked, note) = match an.is_masked() {
                Ok(m) => (m, None),
                Err(e) => (true, Some(format!("mask: {e}"))),
            };
            Point { ka, n: p.n, masked, note, analysis: Some(an) }
        }
    }
}

impl Point {
    fn row(&self, formulation: &str, engine: &str, measure: &str, value: Result<f64, String>) -> SweepRow {
        let (value, err) = match value {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e)),
        };
        let error = match (&self.note, err) {
            (Some(a), Some(b)) => Some(format!("{a}; {b}")),
            (a, b) => b.or_else(|| a.clone()),
        };
        SweepRow { ka: self.ka, n: self.n, formulation: formulation.into(), engine: engine.into(), measure: measure.into(), value, masked: self.masked, error }
    }

    fn formulation_rows(&self, f: Formulation, engine: Engine, quantities: &[Quantity]) -> Vec<SweepRow> {
        let Some(an) = &self.analysis else {
            return quantities.iter().map(|q| self.row(f.name(), engine.name(), q.name(), Err("no problem instance".into()))).collect();
        };
        let coefficients = if quantities.iter().any(|q| matches!(q, Quantity::Error(_))) {
            Some(an.coefficients(f, engine).map_err(|e| e.to_string()))
        } else {
            None
        };
        quantities
            .iter()
            .map(|&q| {
                let v = match q {
                    Quantity::Condition => an.condition_number(f, engine).map_err(|e| e.to_string()),
                    Quantity::Error(m) => match coefficients.as_ref().unwrap() {
                        Ok(c) => c.current_error(m).map_err(|e| e.to_string()),
                        Err(e) => Err(e.clone()),
                    },
                };
                self.row(f.name(), engine.name(), q.name(), v)
            })
            .collect()
    }

    fn spectral_rows(&self, op: Operator) -> Vec<SweepRow> {
        let kind = OperatorKind::physical(op);
        let label = kind.label();
        let values: Result<[f64; 5], String> = match &self.analysis {
            None => Err("no problem instance".into()),
            Some(an) => {
                let ctx: &ModalContext<f64> = an.context();
                let q = (ctx.config().ka().floor() as i64).min(ctx.config().max_mode());
                spectral_error_in(ctx, kind, q)
                    .map(|e| [e.projection.abs(), e.aliasing.norm(), e.aliasing.re.abs(), e.aliasing.im.abs(), e.total.norm()])
                    .map_err(|e| e.to_string())
            }
        };
        SPECTRAL_MEASURES
            .iter()
            .enumerate()
            .map(|(i, m)| self.row(&label, Engine::Predicted.name(), m, values.clone().map(|v| v[i])))
            .collect()
    }
}

/// All rows of a sweep, ordered by ka, then formulation, engine and measure as configured.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let mut kas: Vec<f64> = ka_grid(cfg.ka_start, cfg.ka_stop, cfg.points, cfg.spacing).map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.spectral {
        // Spectral errors are evaluated at q = ka exactly.
        kas = kas.iter().map(|k| k.round()).filter(|k| *k >= 1.0).collect();
        kas.dedup();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        let points: Vec<Point> = kas.par_iter().map(|&ka| point(cfg, ka)).collect();
        if cfg.spectral {
            let tasks: Vec<(usize, Operator)> = (0..points.len()).flat_map(|i| SPECTRAL_OPERATORS.map(|o| (i, o))).collect();
            tasks.par_iter().map(|&(i, o)| points[i].spectral_rows(o)).collect::<Vec<_>>()
        } else {
            let tasks: Vec<(usize, Formulation)> =
                (0..points.len()).flat_map(|i| cfg.formulations.iter().map(move |&f| (i, f))).collect();
            tasks
                .par_iter()
                .map(|&(i, f)| cfg.engine.engines().iter().flat_map(|&e| points[i].formulation_rows(f, e, &cfg.quantities)).collect())
                .collect::<Vec<Vec<SweepRow>>>()
        }
    });
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if rows.is_empty() {
        w.write_record(["ka", "N", "formulation", "engine", "measure", "value", "masked", "error"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<SweepRow>, _>>()?)
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(rows, std::io::BufWriter::new(std::fs::File::create(path)?))
}
