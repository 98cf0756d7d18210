//! Library side of the `apapr` command: spec parsing, evaluation over a
//! sample and report writing.

pub mod checks;
pub mod report;
pub mod spec;

use std::io::Write;
use std::path::PathBuf;

use apapr_core::apapr::lee_forms;
use apapr_core::classify::decompose;
use apapr_core::evaluate::evaluate_point;
use apapr_core::expr::ChartPoint;
use apapr_core::tensor::Orientation;
use rayon::prelude::*;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use report::{CheckResult, Table};
use spec::{check_tolerances, ManifoldSpec, Tolerances};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("evaluation failed at point {index} {coords:?}: {source}")]
    Engine {
        index: usize,
        coords: [f64; 3],
        #[source]
        source: apapr_core::Error,
    },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    /// Errors never produce a report; check failures exit with 1 instead.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub spec: PathBuf,
    pub tol_structure: Option<f64>,
    pub tol_class: Option<f64>,
    pub tol_curvature: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
}

/// What a command produced; `text` goes to `--out` or standard output.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub checks: Vec<CheckResult>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, out: Option<&PathBuf>) -> Result<(), CliError> {
        match out {
            Some(path) => std::fs::write(path, &self.text).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            }),
            None => std::io::stdout()
                .write_all(self.text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
        }
    }
}

struct Loaded {
    spec: ManifoldSpec,
    sha256: String,
    tolerances: Tolerances,
}

fn load(opts: &Options) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(&opts.spec).map_err(|source| CliError::Io {
        path: opts.spec.display().to_string(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Spec(e.to_string()))?;
    let spec = ManifoldSpec::parse(text)?;
    let mut tolerances = spec.tolerances;
    if let Some(v) = opts.tol_structure {
        tolerances.structure = v;
    }
    if let Some(v) = opts.tol_class {
        tolerances.class = v;
    }
    if let Some(v) = opts.tol_curvature {
        tolerances.curvature = v;
    }
    check_tolerances(&tolerances)?;
    Ok(Loaded {
        sha256: hex::encode(Sha256::digest(&bytes)),
        spec,
        tolerances,
    })
}

/// Worker pool sized by `APAPR_THREADS`; results never depend on it.
fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("APAPR_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "APAPR_THREADS must be a positive integer, got `{v}`"
            ))
        })?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(e.to_string()))
}

/// Maps `f` over the points in parallel, keeping the input order.
fn par_map<T: Send>(
    points: &[ChartPoint<3>],
    f: impl Fn(&ChartPoint<3>) -> apapr_core::Result<T> + Sync,
) -> Result<Vec<T>, CliError> {
    pool()?.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(index, p)| {
                f(p).map_err(|source| CliError::Engine {
                    index,
                    coords: p.coords,
                    source,
                })
            })
            .collect()
    })
}

fn metadata(command: &str, l: &Loaded, seed: Option<u64>, count: usize) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), Value::from("apapr"));
    m.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), Value::from(command));
    m.insert("spec_sha256".into(), Value::from(l.sha256.clone()));
    m.insert("seed".into(), seed.map_or(Value::Null, Value::from));
    m.insert(
        "construction".into(),
        serde_json::to_value(l.spec.construction).expect("serializes"),
    );
    m.insert(
        "base".into(),
        serde_json::to_value(&l.spec.base).expect("serializes"),
    );
    let t = &l.tolerances;
    let mut tol = Map::new();
    tol.insert("structure".into(), report::num(t.structure));
    tol.insert("class".into(), report::num(t.class));
    tol.insert("curvature".into(), report::num(t.curvature));
    m.insert("tolerances".into(), Value::Object(tol));
    m.insert("point_count".into(), Value::from(count));
    Value::Object(m)
}

fn render(
    format: Format,
    meta: Value,
    extra: Vec<(&str, Value)>,
    records: Vec<Value>,
    table: Table,
) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut m = Map::new();
            m.insert("metadata".into(), meta);
            for (k, v) in extra {
                m.insert(k.into(), v);
            }
            m.insert("points".into(), Value::Array(records));
            report::to_json_text(&Value::Object(m))
        }
    }
}

/// Evaluates every spec point and runs the checks.
pub fn verify(opts: &Options) -> Result<Outcome, CliError> {
    let l = load(opts)?;
    let m = l.spec.manifold()?;
    let points = l.spec.points(&m, opts.seed)?;
    let tol = l.tolerances;
    let data = par_map(&points, |p| checks::point_data(&m, p, &tol))?;
    let w0 = checks::base_is_w0(&m, &points, tol.class).map_err(|source| CliError::Engine {
        index: 0,
        coords: points[0].coords,
        source,
    })?;
    let results = checks::run(&m, &data, w0, &tol);
    let evals: Vec<_> = data.into_iter().map(|d| d.eval).collect();
    let (records, table) = report::verify_records(&evals);
    let meta = metadata("verify", &l, l.spec.seed(opts.seed), points.len());
    let extra = vec![
        ("base_is_w0", Value::from(w0)),
        ("pass", Value::from(results.iter().all(|c| c.pass))),
        (
            "checks",
            Value::Array(results.iter().map(CheckResult::to_json).collect()),
        ),
    ];
    Ok(Outcome {
        text: render(opts.format, meta, extra, records, table),
        checks: results,
    })
}

/// Class decomposition of `F` at one point or at every spec point.
pub fn classify(opts: &Options, point: Option<[f64; 3]>) -> Result<Outcome, CliError> {
    let l = load(opts)?;
    let m = l.spec.manifold()?;
    let (points, seed) = match point {
        Some([t, x, y]) => (
            vec![m
                .point(t, x, y)
                .map_err(|e| CliError::Spec(format!("--point: {e}")))?],
            None,
        ),
        None => (l.spec.points(&m, opts.seed)?, l.spec.seed(opts.seed)),
    };
    let class = l.tolerances.class;
    let reports = par_map(&points, |p| {
        let f = m.fundamental_f(p, Orientation::default())?.components;
        decompose(&f, &lee_forms(&f), class)
    })?;
    let coords: Vec<_> = points.iter().map(|p| p.coords).collect();
    let (records, table) = report::classify_records(&coords, &reports);
    let meta = metadata("classify", &l, seed, points.len());
    Ok(Outcome {
        text: render(opts.format, meta, Vec::new(), records, table),
        checks: Vec::new(),
    })
}

/// Curvature table over the spec points or an `n`-grid.
pub fn curvature(opts: &Options, grid: Option<usize>) -> Result<Outcome, CliError> {
    let l = load(opts)?;
    let m = l.spec.manifold()?;
    let (points, seed) = match grid {
        Some(n) => (l.spec.grid(&m, n)?, None),
        None => (l.spec.points(&m, opts.seed)?, l.spec.seed(opts.seed)),
    };
    let tol = l.tolerances;
    let evals = par_map(&points, |p| {
        evaluate_point(&m, p, Orientation::default(), tol.structure, tol.class)
    })?;
    let (records, table) = report::curvature_records(&evals);
    let meta = metadata("curvature", &l, seed, points.len());
    Ok(Outcome {
        text: render(opts.format, meta, Vec::new(), records, table),
        checks: Vec::new(),
    })
}
