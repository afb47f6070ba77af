//! Benchmark grid: synthetic data cells run through the pipeline, one row
//! per repeat, strictly sequentially.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{run_pipeline, PipelineConfig, PipelineReport};
use crate::reduce::Closeness;
use crate::synth::{DataSpec, GenKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    /// Defaults to `cell{index}`.
    #[serde(default)]
    pub id: Option<String>,
    pub data: DataSpec,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub cells: Vec<BenchCell>,
    /// Run and discard one repetition per cell before timing.
    #[serde(default = "yes")]
    pub warmup: bool,
}

fn yes() -> bool {
    true
}

impl BenchGrid {
    pub fn new(cells: Vec<BenchCell>) -> Self {
        Self {
            cells,
            warmup: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let grid: Self = serde_json::from_str(text)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::InvalidConfig("bench grid has no cells".into()));
        }
        Ok(())
    }
}

/// Fixed report column order.
pub const BENCH_COLUMNS: [&str; 18] = [
    "cell_id",
    "repeat",
    "kind",
    "n",
    "p",
    "degree",
    "trainer",
    "keep_fraction",
    "subset_size",
    "bcp_s",
    "reduce_s",
    "train_reduced_s",
    "train_full_s",
    "acc_pipeline",
    "acc_baseline",
    "auc_pipeline",
    "auc_baseline",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub cell_id: String,
    pub repeat: usize,
    pub kind: String,
    pub n: usize,
    pub p: usize,
    pub degree: Option<usize>,
    pub trainer: String,
    pub keep_fraction: Option<f64>,
    pub subset_size: Option<usize>,
    pub bcp_s: Option<f64>,
    pub reduce_s: Option<f64>,
    pub train_reduced_s: Option<f64>,
    pub train_full_s: Option<f64>,
    pub acc_pipeline: Option<f64>,
    pub acc_baseline: Option<f64>,
    pub auc_pipeline: Option<f64>,
    pub auc_baseline: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// `bcp_s + reduce_s + train_reduced_s`.
    pub fn pipeline_s(&self) -> Option<f64> {
        Some(self.bcp_s? + self.reduce_s? + self.train_reduced_s?)
    }

    fn cells(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(String::new, T::to_string)
        }
        vec![
            self.cell_id.clone(),
            self.repeat.to_string(),
            self.kind.clone(),
            self.n.to_string(),
            self.p.to_string(),
            opt(&self.degree),
            self.trainer.clone(),
            opt(&self.keep_fraction),
            opt(&self.subset_size),
            opt(&self.bcp_s),
            opt(&self.reduce_s),
            opt(&self.train_reduced_s),
            opt(&self.train_full_s),
            opt(&self.acc_pipeline),
            opt(&self.acc_baseline),
            opt(&self.auc_pipeline),
            opt(&self.auc_baseline),
            opt(&self.error),
        ]
    }
}

/// Mean, min and max of one column over a cell's successful rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell_id: String,
    pub rows_ok: usize,
    pub rows_failed: usize,
    pub pipeline_s: Option<Stat>,
    pub train_full_s: Option<Stat>,
    pub acc_pipeline: Option<Stat>,
    pub acc_baseline: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<CellSummary>,
}

fn kind_name(kind: GenKind) -> &'static str {
    match kind {
        GenKind::Linear => "linear",
        GenKind::Poly => "poly",
    }
}

fn run_cell_once(cell: &BenchCell, seed: u64) -> Result<PipelineReport> {
    let data = cell.data.generate(seed)?.dataset;
    run_pipeline(&data, &cell.pipeline.reseeded(seed))
}

fn row_for(
    cell_id: &str,
    cell: &BenchCell,
    repeat: usize,
    outcome: Result<PipelineReport>,
) -> BenchRow {
    let mut row = BenchRow {
        cell_id: cell_id.to_string(),
        repeat,
        kind: kind_name(cell.data.kind).to_string(),
        n: cell.data.n,
        p: cell.data.p,
        degree: (cell.data.kind == GenKind::Poly).then_some(cell.data.degree),
        trainer: cell.pipeline.trainer.name().to_string(),
        keep_fraction: match cell.pipeline.policy.rule {
            Closeness::KeepFraction(f) => Some(f),
            Closeness::BandWidth(_) => None,
        },
        subset_size: None,
        bcp_s: None,
        reduce_s: None,
        train_reduced_s: None,
        train_full_s: None,
        acc_pipeline: None,
        acc_baseline: None,
        auc_pipeline: None,
        auc_baseline: None,
        error: None,
    };
    match outcome {
        Ok(r) => {
            row.subset_size = Some(r.subset_size);
            row.bcp_s = Some(r.timings.bcp_s);
            row.reduce_s = Some(r.timings.reduce_s);
            row.train_reduced_s = Some(r.timings.train_reduced_s);
            row.train_full_s = Some(r.timings.train_full_s);
            row.acc_pipeline = Some(r.metrics_pipeline.accuracy);
            row.acc_baseline = Some(r.metrics_baseline.accuracy);
            row.auc_pipeline = r.metrics_pipeline.auc;
            row.auc_baseline = r.metrics_baseline.auc;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn summarize(cell_id: &str, rows: &[BenchRow]) -> CellSummary {
    let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.is_ok()).collect();
    let col = |f: fn(&BenchRow) -> Option<f64>| {
        Stat::of(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
    };
    CellSummary {
        cell_id: cell_id.to_string(),
        rows_ok: ok.len(),
        rows_failed: rows.len() - ok.len(),
        pipeline_s: col(BenchRow::pipeline_s),
        train_full_s: col(|r| r.train_full_s),
        acc_pipeline: col(|r| r.acc_pipeline),
        acc_baseline: col(|r| r.acc_baseline),
    }
}

/// Run every cell; per-repeat seeds are `base_seed + repeat`. Failures are
/// recorded in the row's `error` field and the run continues.
pub fn run_bench(grid: &BenchGrid) -> Result<BenchReport> {
    grid.validate()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (index, cell) in grid.cells.iter().enumerate() {
        let cell_id = cell.id.clone().unwrap_or_else(|| format!("cell{index}"));
        if grid.warmup && cell.repeats > 0 {
            let _ = run_cell_once(cell, cell.base_seed);
        }
        let start = rows.len();
        for repeat in 0..cell.repeats {
            let seed = cell.base_seed.wrapping_add(repeat as u64);
            rows.push(row_for(&cell_id, cell, repeat, run_cell_once(cell, seed)));
        }
        summary.push(summarize(&cell_id, &rows[start..]));
    }
    Ok(BenchReport { rows, summary })
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], writer: W) -> Result<()> {
    let mut w = ::csv::Writer::from_writer(writer);
    w.write_record(BENCH_COLUMNS)?;
    for row in rows {
        w.write_record(row.cells())?;
    }
    w.flush()?;
    Ok(())
}

/// Write `bench.csv` and `bench.json` into `dir`, creating it if needed.
pub fn write_bench_reports(report: &BenchReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_bench_csv(&report.rows, std::fs::File::create(dir.join("bench.csv"))?)?;
    std::fs::write(
        dir.join("bench.json"),
        serde_json::to_string_pretty(report)? + "\n",
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::ReductionPolicy;

    fn cell(n: usize, repeats: usize) -> BenchCell {
        BenchCell {
            id: None,
            data: DataSpec {
                kind: GenKind::Linear,
                n,
                p: 4,
                degree: 3,
                margin_gap: 0.0,
            },
            pipeline: PipelineConfig::default(),
            repeats,
            base_seed: 5,
        }
    }

    fn accuracies(r: &BenchReport) -> Vec<(Option<f64>, Option<f64>)> {
        r.rows
            .iter()
            .map(|r| (r.acc_pipeline, r.acc_baseline))
            .collect()
    }

    #[test]
    fn cardinality_and_determinism() {
        let grid = BenchGrid::new(vec![cell(300, 2), cell(400, 2), cell(500, 2)]);
        let a = run_bench(&grid).unwrap();
        assert_eq!(a.rows.len(), 6);
        assert_eq!(a.summary.len(), 3);
        assert!(a.rows.iter().all(BenchRow::is_ok));
        assert_eq!(a.rows[3].cell_id, "cell1");
        let b = run_bench(&grid).unwrap();
        assert_eq!(accuracies(&a), accuracies(&b));
    }

    #[test]
    fn bad_cell_is_isolated() {
        let mut bad = cell(300, 2);
        bad.pipeline.policy = ReductionPolicy::keep_fraction(1.5);
        let grid = BenchGrid::new(vec![cell(300, 1), bad, cell(300, 1)]);
        let r = run_bench(&grid).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.rows[0].is_ok() && r.rows[3].is_ok());
        assert!(r.rows[1].error.is_some() && r.rows[2].error.is_some());
        assert_eq!(r.summary[1].rows_failed, 2);
        assert!(r.summary[1].acc_pipeline.is_none());
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(run_bench(&BenchGrid::new(vec![])).is_err());
        assert!(BenchGrid::from_json(r#"{"cells":[]}"#).is_err());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let r = run_bench(&BenchGrid::new(vec![cell(200, 1)])).unwrap();
        let mut buf = Vec::new();
        write_bench_csv(&r.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), BENCH_COLUMNS.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 18);
        assert_eq!(&fields[..4], &["cell0", "0", "linear", "200"]);
        assert_eq!(fields[5], "");
        assert_eq!(fields[7], "0.2");
        assert_eq!(fields[17], "");
    }

    #[test]
    fn grid_json_parses() {
        let text = r#"{"cells":[{"id":"a","data":{"kind":"poly","n":100,"p":2,"degree":2},
            "pipeline":{"trainer":{"algo":"mlp","epochs":5}},"repeats":3,"base_seed":10}]}"#;
        let grid = BenchGrid::from_json(text).unwrap();
        assert!(grid.warmup);
        assert_eq!(grid.cells[0].repeats, 3);
        assert_eq!(grid.cells[0].pipeline.trainer.name(), "mlp");
    }

    #[test]
    fn stats() {
        let s = Stat::of(&[1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.min, s.max), (2.0, 1.0, 3.0));
        assert!(Stat::of(&[]).is_none());
    }
}
