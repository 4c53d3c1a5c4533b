//! Single runs and refinement studies.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use poroelastic_core::analysis::{ConvergenceTable, ErrorNorms, Field, Norm};
use poroelastic_core::mesh::TriMesh;
use poroelastic_core::scheme::StateVec;
use poroelastic_core::simulation::{Diagnostic, Simulation};

use crate::config::{RunConfig, Scheme, StudyKind};
use crate::error::{config_error, CliError, Result};

/// Table order used everywhere: (u, L²), (u, H¹), (p, L²), (p, H¹).
pub const TABLE_KEYS: [(Field, Norm); 4] =
    [(Field::U, Norm::L2), (Field::U, Norm::H1), (Field::P, Norm::L2), (Field::P, Norm::H1)];

/// One refinement level to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub n: usize,
    pub tau: f64,
    pub scheme: Scheme,
}

#[derive(Debug, Clone)]
pub struct LevelResult {
    pub level: Level,
    pub h: f64,
    pub steps: usize,
    /// R(h, τ): maximum over all time nodes.
    pub max_errors: ErrorNorms,
    /// Empty unless diagnostics were requested.
    pub diagnostics: Vec<Diagnostic>,
    /// Kept only when snapshots were requested.
    pub final_state: Option<StateVec>,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub scheme: Scheme,
    /// Ordered from coarse to fine.
    pub levels: Vec<LevelResult>,
    /// One table per entry of [`TABLE_KEYS`].
    pub tables: Vec<ConvergenceTable>,
    pub echo: String,
}

impl StudyResult {
    fn new(kind: StudyKind, scheme: Scheme, levels: Vec<LevelResult>, echo: String) -> StudyResult {
        let triples: Vec<_> = levels.iter().map(|l| (l.h, l.level.tau, l.max_errors)).collect();
        let tables = TABLE_KEYS.iter().map(|&(f, nm)| ConvergenceTable::new(f, nm, &triples)).collect();
        StudyResult { kind, scheme, levels, tables, echo }
    }

    pub fn table(&self, field: Field, norm: Norm) -> &ConvergenceTable {
        let k = TABLE_KEYS.iter().position(|&key| key == (field, norm)).expect("every key has a table");
        &self.tables[k]
    }
}

/// CN and BE studies over the same levels.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub cn: StudyResult,
    pub be: StudyResult,
}

/// Runs one level from scratch: mesh, assembly, time loop.
pub fn run_level(cfg: &RunConfig, level: Level, echo: &str) -> Result<LevelResult> {
    let start = Instant::now();
    let classify = |e| CliError::from_core(e, level.n, level.tau, echo);
    let n = NonZeroUsize::new(level.n).ok_or_else(|| CliError::Config("mesh subdivisions must be positive".into()))?;
    let exact = cfg.exact_solution()?;
    let mesh = TriMesh::unit_square(n);
    let sim = Simulation::new(&mesh, &exact, cfg.boundary.setup(), cfg.quadrature_degrees()).map_err(classify)?;
    let scheme = cfg.scheme_config(level.tau, level.scheme);
    let steps = scheme.steps().map_err(config_error)?;
    let out = sim.run(scheme).map_err(classify)?;
    Ok(LevelResult {
        level,
        h: mesh.h,
        steps,
        max_errors: out.max_errors,
        diagnostics: if cfg.diagnostics { out.diagnostics } else { Vec::new() },
        final_state: cfg.snapshots.then_some(out.final_state),
        wall: start.elapsed(),
    })
}

/// Runs independent levels on up to `threads` workers. Results come back in
/// the order of `levels` whatever the thread count; on failure the error of
/// the first failing level (in that order) is returned.
pub fn run_levels(cfg: &RunConfig, levels: &[Level], threads: usize, echo: &str) -> Result<Vec<LevelResult>> {
    let workers = threads.max(1).min(levels.len().max(1));
    if workers == 1 {
        return levels.iter().map(|&l| run_level(cfg, l, echo)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<LevelResult>>>> = levels.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= levels.len() {
                    break;
                }
                let r = run_level(cfg, levels[k], echo);
                *slots[k].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()).expect("every level was claimed by a worker"))
        .collect()
}

fn levels_for(cfg: &RunConfig, scheme: Scheme) -> Vec<Level> {
    let mut out = Vec::new();
    for &n in &cfg.n_values() {
        for &tau in &cfg.tau_values() {
            out.push(Level { n, tau, scheme });
        }
    }
    out
}

pub fn run_single(cfg: &RunConfig, threads: usize) -> Result<StudyResult> {
    run_study(cfg, StudyKind::Single, threads)
}

pub fn run_spatial_study(cfg: &RunConfig, threads: usize) -> Result<StudyResult> {
    run_study(cfg, StudyKind::Spatial, threads)
}

pub fn run_temporal_study(cfg: &RunConfig, threads: usize) -> Result<StudyResult> {
    run_study(cfg, StudyKind::Temporal, threads)
}

fn run_study(cfg: &RunConfig, kind: StudyKind, threads: usize) -> Result<StudyResult> {
    cfg.validate()?;
    cfg.validate_for(kind)?;
    let echo = cfg.echo();
    let levels = run_levels(cfg, &levels_for(cfg, cfg.scheme), threads, &echo)?;
    Ok(StudyResult::new(kind, cfg.scheme, levels, echo))
}

/// Spatial studies with both schemes; all levels share one worker pool.
pub fn run_scheme_comparison(cfg: &RunConfig, threads: usize) -> Result<Comparison> {
    cfg.validate()?;
    cfg.validate_for(StudyKind::Comparison)?;
    let echo = cfg.echo();
    let cn = levels_for(cfg, Scheme::Cn);
    let all: Vec<Level> = cn.iter().copied().chain(levels_for(cfg, Scheme::Be)).collect();
    let mut results = run_levels(cfg, &all, threads, &echo)?;
    let be = results.split_off(cn.len());
    Ok(Comparison {
        cn: StudyResult::new(StudyKind::Comparison, Scheme::Cn, results, echo.clone()),
        be: StudyResult::new(StudyKind::Comparison, Scheme::Be, be, echo),
    })
}
