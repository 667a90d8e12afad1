//! Benchmark harness: seeded runs over an instance × configuration grid,
//! written as CSV.
//!
//! Every run gives one `run` row; every (instance, objective, config)
//! group then gets one `aggregate` row with the best value, mean, sample
//! standard deviation, mean gap and mean wall time of its successful runs.
//! The gap of a value is `100·(value − best_known)/best_known`, where
//! `best_known` is the reference value when one is supplied and otherwise
//! the best value seen anywhere in the grid for that instance and
//! objective. Rows come out in job order whatever the worker count.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::evaluation::RelaxMode;
use crate::genetic::{run_hga, Ablations, CrossoverKind, HgaParams};
use crate::io::IoError;
use crate::model::{Instance, Objective};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "TSPD_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub label: String,
    pub params: HgaParams,
}

impl BenchConfig {
    pub fn new(label: impl Into<String>, params: HgaParams) -> Self {
        BenchConfig {
            label: label.into(),
            params,
        }
    }
}

/// One configuration per crossover kind.
pub fn crossover_grid(base: &HgaParams) -> Vec<BenchConfig> {
    CrossoverKind::ALL
        .iter()
        .map(|&kind| {
            BenchConfig::new(
                kind.to_string(),
                HgaParams {
                    crossover: kind,
                    ..base.clone()
                },
            )
        })
        .collect()
}

/// Standard, each ablation on its own, then the two partial relax modes.
pub fn ablation_grid(base: &HgaParams) -> Vec<BenchConfig> {
    let with = |ablations: Ablations| HgaParams {
        ablations,
        ..base.clone()
    };
    let off = Ablations::default();
    vec![
        BenchConfig::new("standard", base.clone()),
        BenchConfig::new("no-inf", with(Ablations { no_inf: true, ..off })),
        BenchConfig::new("no-div", with(Ablations { no_div: true, ..off })),
        BenchConfig::new("no-repair", with(Ablations { no_repair: true, ..off })),
        BenchConfig::new("no-restore", with(Ablations { no_restore: true, ..off })),
        BenchConfig::new(
            "relax-truck",
            HgaParams {
                relax: RelaxMode::Truck,
                ..base.clone()
            },
        ),
        BenchConfig::new(
            "relax-drone",
            HgaParams {
                relax: RelaxMode::Drone,
                ..base.clone()
            },
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub kind: &'static str,
    pub instance: String,
    pub objective: String,
    pub config: String,
    pub crossover: String,
    pub relax: String,
    pub ablations: String,
    pub seed: Option<u64>,
    pub status: &'static str,
    pub runs: usize,
    pub value: Option<f64>,
    pub gap: Option<f64>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub wall_ms: f64,
    pub iterations: Option<u64>,
    /// `iteration:value` pairs separated by `;`.
    pub trace: String,
}

fn ablation_label(a: &Ablations) -> String {
    let names: Vec<&str> = [
        (a.no_inf, "no_inf"),
        (a.no_div, "no_div"),
        (a.no_repair, "no_repair"),
        (a.no_restore, "no_restore"),
    ]
    .iter()
    .filter(|f| f.0)
    .map(|f| f.1)
    .collect();
    if names.is_empty() {
        "-".into()
    } else {
        names.join("+")
    }
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<RunRecord>,
}

impl BenchReport {
    /// Mean gap over the aggregate rows of one configuration and objective.
    pub fn mean_gap(&self, config: &str, obj: Objective) -> Option<f64> {
        let gaps: Vec<f64> = self
            .aggregates
            .iter()
            .filter(|r| r.config == config && r.objective == obj.to_string())
            .filter_map(|r| r.gap)
            .collect();
        (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), IoError> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.runs.iter().chain(&self.aggregates) {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

pub struct BenchSpec<'a> {
    pub instances: &'a [Instance],
    pub configs: &'a [BenchConfig],
    pub objectives: &'a [Objective],
    pub seeds: &'a [u64],
    /// Best known value per (instance name, objective).
    pub reference: HashMap<(String, Objective), f64>,
    pub workers: usize,
}

/// Worker count from the environment, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn sample_sd(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

pub fn bench(spec: &BenchSpec) -> BenchReport {
    let mut jobs = Vec::new();
    for inst in spec.instances {
        for &obj in spec.objectives {
            for cfg in spec.configs {
                for &seed in spec.seeds {
                    jobs.push((inst, obj, cfg, seed));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .expect("thread pool");
    let mut runs: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(inst, obj, cfg, seed)| {
                let start = std::time::Instant::now();
                let outcome = run_hga(inst, &cfg.params, obj, seed);
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                let (status, value, iterations, trace) = match outcome {
                    Ok(run) => {
                        let trace: Vec<String> =
                            run.stats.best_trace.iter().map(|(i, v)| format!("{i}:{v}")).collect();
                        ("ok", Some(run.value), Some(run.stats.iterations), trace.join(";"))
                    }
                    Err(e) => ("no-feasible", None, Some(e.stats.iterations), String::new()),
                };
                RunRecord {
                    kind: "run",
                    instance: inst.name().to_string(),
                    objective: obj.to_string(),
                    config: cfg.label.clone(),
                    crossover: cfg.params.crossover.to_string(),
                    relax: cfg.params.relax.to_string(),
                    ablations: ablation_label(&cfg.params.ablations),
                    seed: Some(seed),
                    status,
                    runs: 1,
                    value,
                    gap: None,
                    mean: None,
                    sd: None,
                    wall_ms,
                    iterations,
                    trace,
                }
            })
            .collect()
    });

    let mut best_known: HashMap<(String, String), f64> = HashMap::new();
    for r in &runs {
        if let Some(v) = r.value {
            let e = best_known.entry((r.instance.clone(), r.objective.clone())).or_insert(v);
            *e = e.min(v);
        }
    }
    for ((name, obj), &v) in &spec.reference {
        best_known.insert((name.clone(), obj.to_string()), v);
    }
    let gap = |r: &RunRecord, v: f64| {
        best_known
            .get(&(r.instance.clone(), r.objective.clone()))
            .map(|&b| 100.0 * (v - b) / b)
    };
    for r in &mut runs {
        r.gap = r.value.and_then(|v| gap(r, v));
    }

    let mut aggregates = Vec::new();
    for group in runs.chunk_by(|a, b| a.instance == b.instance && a.objective == b.objective && a.config == b.config) {
        let values: Vec<f64> = group.iter().filter_map(|r| r.value).collect();
        let gaps: Vec<f64> = group.iter().filter_map(|r| r.gap).collect();
        let first = &group[0];
        let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
        aggregates.push(RunRecord {
            kind: "aggregate",
            seed: None,
            status: if values.len() == group.len() { "ok" } else { "partial" },
            runs: group.len(),
            value: values.iter().copied().reduce(f64::min),
            gap: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
            mean,
            sd: mean.map(|m| sample_sd(&values, m)),
            wall_ms: group.iter().map(|r| r.wall_ms).sum::<f64>() / group.len() as f64,
            iterations: None,
            trace: String::new(),
            ..first.clone()
        });
    }
    BenchReport { runs, aggregates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate::{generate_instance, GenParams};

    fn tiny() -> HgaParams {
        HgaParams {
            iter_ni: 50,
            ..HgaParams::default()
        }
    }

    #[test]
    fn ten_seeds_give_ten_rows_and_one_aggregate() {
        let inst = [generate_instance(6, 1, &GenParams::default())];
        let configs = [BenchConfig::new("standard", tiny())];
        let seeds: Vec<u64> = (1..=10).collect();
        let spec = BenchSpec {
            instances: &inst,
            configs: &configs,
            objectives: &[Objective::MinCost],
            seeds: &seeds,
            reference: HashMap::new(),
            workers: 1,
        };
        let report = bench(&spec);
        assert_eq!(report.runs.len(), 10);
        assert_eq!(report.aggregates.len(), 1);
        let agg = &report.aggregates[0];
        assert!(agg.value.unwrap() <= agg.mean.unwrap() + 1e-12);
        assert!(report.runs.iter().all(|r| r.gap.unwrap() >= 0.0));
        assert!(report.runs.iter().any(|r| r.gap == Some(0.0)));
    }

    #[test]
    fn gap_uses_the_reference_when_given() {
        let inst = [generate_instance(5, 2, &GenParams::default())];
        let configs = [BenchConfig::new("standard", tiny())];
        let mut reference = HashMap::new();
        reference.insert((inst[0].name().to_string(), Objective::MinTime), 10.0);
        let spec = BenchSpec {
            instances: &inst,
            configs: &configs,
            objectives: &[Objective::MinTime],
            seeds: &[1],
            reference,
            workers: 1,
        };
        let report = bench(&spec);
        let v = report.runs[0].value.unwrap();
        assert!((report.runs[0].gap.unwrap() - 100.0 * (v - 10.0) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn csv_is_deterministic_apart_from_wall_time() {
        let inst = [generate_instance(5, 3, &GenParams::default())];
        let configs = ablation_grid(&tiny());
        assert_eq!(configs.len(), 7);
        let csv_of = |workers| {
            let spec = BenchSpec {
                instances: &inst,
                configs: &configs,
                objectives: &[Objective::MinCost, Objective::MinTime],
                seeds: &[1, 2],
                reference: HashMap::new(),
                workers,
            };
            let mut report = bench(&spec);
            for r in report.runs.iter_mut().chain(report.aggregates.iter_mut()) {
                r.wall_ms = 0.0;
            }
            let mut buf = Vec::new();
            report.write_csv(&mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = csv_of(1);
        assert_eq!(a, csv_of(2));
        assert_eq!(a.lines().count(), 1 + 28 + 14);
        assert!(a.starts_with("kind,instance,objective,config,"));
    }

    #[test]
    fn sd_of_a_single_value_is_zero() {
        assert_eq!(sample_sd(&[3.0], 3.0), 0.0);
        assert!((sample_sd(&[1.0, 3.0], 2.0) - 2f64.sqrt()).abs() < 1e-12);
    }
}
