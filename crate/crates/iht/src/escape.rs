//! Monte-Carlo perturbation studies around unstable stationary points.
//!
//! The protocol: take every unstable point of an enumerated list, add
//! zero-mean Gaussian noise (std dev sigma) to its nonzero coordinates,
//! run the projected gradient iteration for a fixed number of steps, and
//! record where each run ends up. Escape is tracked against a ball of
//! radius sigma/10 around the source; final points are attributed to the
//! nearest stable point when within basin_tol.
//!
//! Every run's randomness derives from (master_seed, point_id, run_index)
//! alone, so reports are byte-identical across thread counts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{IhtError, Result};
use crate::ht::ht_gradient_map;
use crate::objective::{Objective, QuadraticInstance};
use crate::stationary::{Classification, StationaryPoint};
use crate::types::{DenseVector, SparsityBudget};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EscapeExperimentConfig {
    /// Standard deviation of the start perturbation; applied only to the
    /// nonzero coordinates of each source point, so starts stay feasible.
    pub sigma: f64,
    pub runs_per_point: usize,
    /// Exact number of iteration steps per run; no early stopping.
    pub steps: usize,
    pub master_seed: u64,
    pub gamma: f64,
    /// A final point within this distance of a stable point is attributed
    /// to it; within this distance of an unstable point it counts as not
    /// escaped.
    pub basin_tol: f64,
}

impl EscapeExperimentConfig {
    fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(IhtError::Config(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        if self.runs_per_point == 0 {
            return Err(IhtError::Config("runs_per_point must be positive".into()));
        }
        if self.steps == 0 {
            return Err(IhtError::Config("steps must be positive".into()));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(IhtError::InvalidGamma(self.gamma));
        }
        if !(self.basin_tol.is_finite() && self.basin_tol > 0.0) {
            return Err(IhtError::Config(format!(
                "basin_tol must be finite and positive, got {}",
                self.basin_tol
            )));
        }
        Ok(())
    }

    /// Radius of the ball around each source used for escape_step.
    pub fn escape_radius(&self) -> f64 {
        self.sigma / 10.0
    }
}

/// One perturbed run. Ids are 1-based positions in the stationary-point
/// list the experiment was given.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub source_id: usize,
    pub start: DenseVector,
    pub final_point: DenseVector,
    pub final_f: f64,
    /// Nearest stable point when within basin_tol of one.
    pub dest_id: Option<usize>,
    /// First step at which the iterate left the escape ball around the
    /// source; 0 when the start itself is outside, None when the run
    /// never left.
    pub escape_step: Option<usize>,
    /// The final point is farther than basin_tol from every unstable
    /// point in the list.
    pub escaped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateRow {
    pub source_id: usize,
    /// None counts runs attributed to no stable point.
    pub dest_id: Option<usize>,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeReport {
    pub config: EscapeExperimentConfig,
    pub escape_radius: f64,
    /// 1-based ids of the stable points destinations refer to.
    pub stable_ids: Vec<usize>,
    /// 1-based ids of the unstable points used as sources.
    pub unstable_ids: Vec<usize>,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<AggregateRow>,
    pub fraction_escaped: f64,
}

fn is_stable(c: Classification) -> bool {
    matches!(c, Classification::StrictlyStable | Classification::StableBoundary)
}

/// Read-only state shared by every run of one experiment.
struct RunContext<'a> {
    q: &'a QuadraticInstance,
    cfg: &'a EscapeExperimentConfig,
    budget: SparsityBudget,
    stable: &'a [(usize, &'a StationaryPoint)],
    unstable: &'a [(usize, &'a StationaryPoint)],
}

fn single_run(
    ctx: &RunContext,
    source: &StationaryPoint,
    source_id: usize,
    run_index: usize,
) -> Result<RunRecord> {
    let cfg = ctx.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    rng.set_stream(((source_id as u64) << 32) | run_index as u64);

    let mut entries = source.point.as_slice().to_vec();
    if cfg.sigma > 0.0 {
        let noise = Normal::new(0.0, cfg.sigma).expect("sigma validated");
        for &i in source.support.iter() {
            entries[i] += noise.sample(&mut rng);
        }
    }
    let start = DenseVector::new(entries)?;

    let radius = cfg.escape_radius();
    let mut escape_step = (start.dist(&source.point) > radius).then_some(0);
    let mut x = start.clone();
    for k in 1..=cfg.steps {
        let grad = ctx.q.gradient(&x);
        x = ht_gradient_map(&x, &grad, cfg.gamma, ctx.budget)?.projected;
        if escape_step.is_none() && x.dist(&source.point) > radius {
            escape_step = Some(k);
        }
    }

    let nearest_stable = ctx
        .stable
        .iter()
        .map(|(id, p)| (*id, p.point.dist(&x)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("distances are finite"))
        .expect("stable list nonempty");
    let dest_id = (nearest_stable.1 <= cfg.basin_tol).then_some(nearest_stable.0);
    let escaped = ctx.unstable.iter().all(|(_, p)| p.point.dist(&x) > cfg.basin_tol);

    Ok(RunRecord {
        run_id: 0,
        source_id,
        start,
        final_f: ctx.q.value(&x),
        final_point: x,
        dest_id,
        escape_step,
        escaped,
    })
}

/// Runs the full perturbation protocol over every unstable point in
/// `points`. Requires at least one stable and one unstable point; points
/// classified as not stationary are ignored.
pub fn run_escape_experiment(
    q: &QuadraticInstance,
    points: &[StationaryPoint],
    cfg: &EscapeExperimentConfig,
    budget: SparsityBudget,
) -> Result<EscapeReport> {
    cfg.validate()?;
    if budget.n() != q.dim() {
        return Err(IhtError::DimensionMismatch {
            expected: q.dim(),
            got: budget.n(),
        });
    }
    let stable: Vec<(usize, &StationaryPoint)> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| is_stable(p.classification))
        .map(|(i, p)| (i + 1, p))
        .collect();
    let unstable: Vec<(usize, &StationaryPoint)> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.classification == Classification::Unstable)
        .map(|(i, p)| (i + 1, p))
        .collect();
    if stable.is_empty() || unstable.is_empty() {
        return Err(IhtError::MissingStationaryPoints);
    }

    let tasks: Vec<(usize, &StationaryPoint, usize)> = unstable
        .iter()
        .flat_map(|(id, p)| (0..cfg.runs_per_point).map(move |r| (*id, *p, r)))
        .collect();
    let ctx = RunContext { q, cfg, budget, stable: &stable, unstable: &unstable };
    let mut records: Vec<RunRecord> = tasks
        .into_par_iter()
        .map(|(id, p, r)| single_run(&ctx, p, id, r))
        .collect::<Result<_>>()?;
    for (i, rec) in records.iter_mut().enumerate() {
        rec.run_id = i + 1;
    }

    let mut counts: BTreeMap<(usize, Option<usize>), usize> = BTreeMap::new();
    for rec in &records {
        *counts.entry((rec.source_id, rec.dest_id)).or_insert(0) += 1;
    }
    let aggregates = counts
        .into_iter()
        .map(|((source_id, dest_id), count)| AggregateRow { source_id, dest_id, count })
        .collect();
    let fraction_escaped =
        records.iter().filter(|r| r.escaped).count() as f64 / records.len() as f64;

    Ok(EscapeReport {
        config: *cfg,
        escape_radius: cfg.escape_radius(),
        stable_ids: stable.iter().map(|(i, _)| *i).collect(),
        unstable_ids: unstable.iter().map(|(i, _)| *i).collect(),
        records,
        aggregates,
        fraction_escaped,
    })
}

/// JSON export of the complete report, run records included.
pub fn write_report_json(report: &EscapeReport, path: &Path) -> Result<()> {
    let raw = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(path, raw).map_err(|e| IhtError::io(path, e))
}

/// CSV rendering of the per-run records: run_id, source_id, escape_step,
/// dest_id, final_f, x_1..x_n. Unset optionals are empty cells.
pub fn runs_csv_string(report: &EscapeReport) -> String {
    let n = report
        .records
        .first()
        .map_or(0, |r| r.final_point.len());
    let mut out = String::from("run_id,source_id,escape_step,dest_id,final_f");
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    out.push('\n');
    for r in &report.records {
        out.push_str(&format!("{},{}", r.run_id, r.source_id));
        match r.escape_step {
            Some(k) => out.push_str(&format!(",{k}")),
            None => out.push(','),
        }
        match r.dest_id {
            Some(d) => out.push_str(&format!(",{d}")),
            None => out.push(','),
        }
        out.push_str(&format!(",{}", r.final_f));
        for v in r.final_point.iter() {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Writes [`runs_csv_string`] to a file.
pub fn write_runs_csv(report: &EscapeReport, path: &Path) -> Result<()> {
    std::fs::write(path, runs_csv_string(report)).map_err(|e| IhtError::io(path, e))
}

/// One scatter CSV per coordinate pair (i, j): marker rows for the
/// stationary points tagged stable/unstable, then the final point of
/// every run. Returns the written paths in deterministic order.
pub fn emit_plane_projections(
    report: &EscapeReport,
    points: &[StationaryPoint],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let n = points
        .first()
        .map(|p| p.point.len())
        .ok_or(IhtError::MissingStationaryPoints)?;
    std::fs::create_dir_all(dir).map_err(|e| IhtError::io(dir, e))?;
    let mut written = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let path = dir.join(format!("plane_x{}_x{}.csv", i + 1, j + 1));
            let mut out = format!("kind,id,source_id,dest_id,x{},x{}\n", i + 1, j + 1);
            for (no, p) in points.iter().enumerate() {
                let kind = match p.classification {
                    Classification::Unstable => "unstable",
                    Classification::NotStationary => continue,
                    _ => "stable",
                };
                out.push_str(&format!(
                    "{kind},{},,,{},{}\n",
                    no + 1,
                    p.point[i],
                    p.point[j]
                ));
            }
            for r in &report.records {
                let dest = r.dest_id.map_or(String::new(), |d| d.to_string());
                out.push_str(&format!(
                    "final,{},{},{},{},{}\n",
                    r.run_id,
                    r.source_id,
                    dest,
                    r.final_point[i],
                    r.final_point[j]
                ));
            }
            std::fs::write(&path, out).map_err(|e| IhtError::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::enumerate_stationary;

    fn paper_setup() -> (QuadraticInstance, SparsityBudget, Vec<StationaryPoint>) {
        let inst = QuadraticInstance::paper4x4();
        let budget = SparsityBudget::new(2, 4).unwrap();
        let points = enumerate_stationary(&inst, budget, 0.06).unwrap();
        (inst, budget, points)
    }

    fn mini_config() -> EscapeExperimentConfig {
        EscapeExperimentConfig {
            sigma: 0.5,
            runs_per_point: 3,
            steps: 5,
            master_seed: 99,
            gamma: 0.06,
            basin_tol: 1e-4,
        }
    }

    #[test]
    fn identical_seeds_reproduce_reports_exactly() {
        let (inst, budget, points) = paper_setup();
        let cfg = mini_config();
        let a = run_escape_experiment(&inst, &points, &cfg, budget).unwrap();
        let b = run_escape_experiment(&inst, &points, &cfg, budget).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );

        let mut other = cfg;
        other.master_seed = 100;
        let c = run_escape_experiment(&inst, &points, &other, budget).unwrap();
        assert_ne!(a.records[0].start, c.records[0].start);
    }

    #[test]
    fn report_structure_covers_every_source() {
        let (inst, budget, points) = paper_setup();
        let mut cfg = mini_config();
        cfg.runs_per_point = 1;
        cfg.steps = 1;
        let report = run_escape_experiment(&inst, &points, &cfg, budget).unwrap();
        assert_eq!(report.stable_ids, vec![1, 2]);
        assert_eq!(report.unstable_ids, vec![3, 4, 5, 6]);
        assert_eq!(report.records.len(), 4);
        let sources: Vec<usize> = report.records.iter().map(|r| r.source_id).collect();
        assert_eq!(sources, vec![3, 4, 5, 6]);
        let run_ids: Vec<usize> = report.records.iter().map(|r| r.run_id).collect();
        assert_eq!(run_ids, vec![1, 2, 3, 4]);
        let total: usize = report.aggregates.iter().map(|a| a.count).sum();
        assert_eq!(total, 4);
        // Perturbed starts keep the source support, hence feasibility.
        for r in &report.records {
            assert!(r.start.l0_norm() <= 2);
            assert!(r.final_point.l0_norm() <= 2);
        }
    }

    #[test]
    fn zero_sigma_starts_at_the_source_and_still_moves_off() {
        // Without noise the start is the unstable point itself. Its
        // off-support gradient beats the smallest kept magnitude, so the
        // projection swaps supports at the very first step: instability
        // is a property of the map, not of the noise.
        let (inst, budget, points) = paper_setup();
        let mut cfg = mini_config();
        cfg.sigma = 0.0;
        cfg.runs_per_point = 1;
        cfg.steps = 400;
        let report = run_escape_experiment(&inst, &points, &cfg, budget).unwrap();
        for (r, src_id) in report.records.iter().zip([3usize, 4, 5, 6]) {
            let src = &points[src_id - 1];
            assert_eq!(r.start, src.point);
            assert_eq!(r.escape_step, Some(1));
            assert!(r.escaped);
            assert!(r.final_point.dist(&src.point) > 0.05);
        }
        assert_eq!(report.fraction_escaped, 1.0);
    }

    #[test]
    fn protocol_subset_escapes_and_lands_near_stable_points() {
        let (inst, budget, points) = paper_setup();
        let cfg = EscapeExperimentConfig {
            sigma: 0.5,
            runs_per_point: 50,
            steps: 400,
            master_seed: 7,
            gamma: 0.06,
            basin_tol: 1e-4,
        };
        let report = run_escape_experiment(&inst, &points, &cfg, budget).unwrap();
        assert_eq!(report.records.len(), 200);
        assert_eq!(report.fraction_escaped, 1.0);
        for r in &report.records {
            // Every run leaves the sigma/10 ball within the horizon.
            let step = r.escape_step.expect("escaped within the horizon");
            assert!(step <= 300, "escape step {step}");
            if let Some(d) = r.dest_id {
                assert!(report.stable_ids.contains(&d));
            }
            // Far from every unstable point at the end.
            for &u in &report.unstable_ids {
                assert!(r.final_point.dist(&points[u - 1].point) > 0.1);
            }
        }
    }

    #[test]
    fn missing_point_classes_are_configuration_errors() {
        let (inst, budget, points) = paper_setup();
        let cfg = mini_config();
        let only_stable: Vec<StationaryPoint> = points[..2].to_vec();
        assert!(matches!(
            run_escape_experiment(&inst, &only_stable, &cfg, budget),
            Err(IhtError::MissingStationaryPoints)
        ));
        let only_unstable: Vec<StationaryPoint> = points[2..].to_vec();
        assert!(matches!(
            run_escape_experiment(&inst, &only_unstable, &cfg, budget),
            Err(IhtError::MissingStationaryPoints)
        ));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let (inst, budget, points) = paper_setup();
        let mut bad = mini_config();
        bad.sigma = -0.1;
        assert!(run_escape_experiment(&inst, &points, &bad, budget).is_err());
        bad = mini_config();
        bad.steps = 0;
        assert!(run_escape_experiment(&inst, &points, &bad, budget).is_err());
        bad = mini_config();
        bad.gamma = 0.0;
        assert!(run_escape_experiment(&inst, &points, &bad, budget).is_err());
        bad = mini_config();
        bad.basin_tol = 0.0;
        assert!(run_escape_experiment(&inst, &points, &bad, budget).is_err());
    }

    #[test]
    fn exports_round_trip() {
        let (inst, budget, points) = paper_setup();
        let report = run_escape_experiment(&inst, &points, &mini_config(), budget).unwrap();
        let dir = tempfile::tempdir().unwrap();

        let json_path = dir.path().join("report.json");
        write_report_json(&report, &json_path).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(parsed["records"].as_array().unwrap().len(), 12);
        assert_eq!(parsed["config"]["sigma"], 0.5);
        assert_eq!(parsed["escape_radius"], 0.05);

        let csv_path = dir.path().join("runs.csv");
        write_runs_csv(&report, &csv_path).unwrap();
        let raw = std::fs::read_to_string(&csv_path).unwrap();
        let lines: Vec<&str> = raw.lines().collect();
        assert_eq!(lines[0], "run_id,source_id,escape_step,dest_id,final_f,x_1,x_2,x_3,x_4");
        assert_eq!(lines.len(), 13);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "1");
        assert_eq!(first[1], "3");
        let f_back: f64 = first[4].parse().unwrap();
        assert_eq!(f_back, report.records[0].final_f);
    }

    #[test]
    fn plane_files_carry_exact_marker_rows() {
        let (inst, budget, points) = paper_setup();
        let report = run_escape_experiment(&inst, &points, &mini_config(), budget).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plane_projections(&report, &points, dir.path()).unwrap();
        assert_eq!(files.len(), 6);
        assert!(files[0].ends_with("plane_x1_x2.csv"));

        let raw = std::fs::read_to_string(&files[0]).unwrap();
        let lines: Vec<&str> = raw.lines().collect();
        assert_eq!(lines[0], "kind,id,source_id,dest_id,x1,x2");
        // 6 marker rows, then one row per run.
        assert_eq!(lines.len(), 1 + 6 + 12);
        let marker_kinds: Vec<&str> = lines[1..7].iter().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(marker_kinds, vec!["stable", "stable", "unstable", "unstable", "unstable", "unstable"]);
        // Shortest round-trip floats reparse to the exact coordinates.
        let row1: Vec<&str> = lines[1].split(',').collect();
        let x1: f64 = row1[4].parse().unwrap();
        assert_eq!(x1, points[0].point[0]);
        for l in &lines[7..] {
            assert!(l.starts_with("final,"));
        }
    }
}
