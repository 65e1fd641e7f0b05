//! Convergence tables, interface-position sweeps and conditioning studies
//! for the benchmark problems.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::assembly::{assemble_problem, hierarchical_transform, transform_system, LinearSystem};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, MeshModel, MeshParams, PatchGrid};
use crate::norms::{fill_eoc, l2_error, modified_energy_error, ErrorReport};
use crate::problem::{ExampleKind, ExampleProblem, ProblemSpec, DOMAIN_ORIGIN, DOMAIN_WIDTH};
use crate::solver::{cg_solve, estimate_system_condition, CgOptions, EigenOptions};
use crate::space::{BasisKind, FiniteElementSpace};

pub const CSV_HEADER: &str = "h,delta,l2_error,energy_error,eoc_l2,eoc_energy,PN,n_l,cond_lagrange,cond_hier,cg_iters";

/// Length by which `δ` is multiplied to obtain the interface shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShiftUnit {
    /// Shift `δ·h` on every mesh, so the interface moves with the grid.
    MeshSize,
    /// Shift `δ·s` with a fixed `s`, the same on every mesh.
    Fixed(f64),
}

impl ShiftUnit {
    pub fn shift(self, delta: f64, h: f64) -> f64 {
        match self {
            ShiftUnit::MeshSize => delta * h,
            ShiftUnit::Fixed(s) => delta * s,
        }
    }
}

impl FromStr for ShiftUnit {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim() == "h" {
            return Ok(ShiftUnit::MeshSize);
        }
        parse_real(s).map(ShiftUnit::Fixed)
    }
}

impl fmt::Display for ShiftUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftUnit::MeshSize => f.write_str("h"),
            ShiftUnit::Fixed(s) => write!(f, "{s}"),
        }
    }
}

/// `steps` equidistant values from `start` to `end`, both included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaRange {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl DeltaRange {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.end - self.start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

impl FromStr for DeltaRange {
    type Err = String;
    /// `a:b:n`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("delta range '{s}' is not of the form a:b:n"));
        };
        let steps = n.trim().parse().map_err(|_| format!("bad step count '{n}'"))?;
        Ok(DeltaRange {
            start: parse_real(a)?,
            end: parse_real(b)?,
            steps,
        })
    }
}

/// Parses a real number, also accepting fractions like `1/32`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            n / d
        }
        None => s.parse().map_err(|_| format!("bad number '{s}'"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Comma-separated list of reals.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_real).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub example: ExampleKind,
    /// Mesh sizes; `1/h` patches per side.
    pub h_list: Vec<f64>,
    pub delta: f64,
    pub shift_unit: ShiftUnit,
    pub basis: BasisKind,
    pub tol: f64,
    pub out: PathBuf,
    pub csv: bool,
    pub vtk: bool,
    pub matrix: bool,
    pub sweep: Option<DeltaRange>,
    pub condition: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            example: ExampleKind::Parabola,
            h_list: vec![1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
            delta: 0.0,
            shift_unit: ShiftUnit::MeshSize,
            basis: BasisKind::Lagrange,
            tol: 1e-10,
            out: PathBuf::from("out"),
            csv: true,
            vtk: false,
            matrix: false,
            sweep: None,
            condition: false,
        }
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(format!("bad boolean '{other}'")),
    }
}

impl ExperimentConfig {
    /// Sets one `key = value` entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let err = |msg: String| Error::Config(format!("{key}: {msg}"));
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "example" => self.example = value.parse().map_err(err)?,
            "h" | "h_list" => self.h_list = parse_list(value).map_err(err)?,
            "delta" => self.delta = parse_real(value).map_err(err)?,
            "delta_range" | "sweep" => self.sweep = Some(value.parse().map_err(err)?),
            "shift_unit" => self.shift_unit = value.parse().map_err(err)?,
            "basis" => self.basis = value.parse().map_err(err)?,
            "tol" => self.tol = parse_real(value).map_err(err)?,
            "out" => self.out = PathBuf::from(value),
            "csv" => self.csv = parse_bool(value).map_err(err)?,
            "vtk" => self.vtk = parse_bool(value).map_err(err)?,
            "matrix" => self.matrix = parse_bool(value).map_err(err)?,
            "condition" => self.condition = parse_bool(value).map_err(err)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a plain-text `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_list.is_empty() {
            return Err(Error::Config("no mesh sizes given".into()));
        }
        for &h in &self.h_list {
            patches_per_side(h)?;
        }
        let deltas = self.sweep.map_or_else(|| vec![self.delta], |r| r.values());
        if deltas.is_empty() {
            return Err(Error::Config("empty delta range".into()));
        }
        if let Some(d) = deltas.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::Config(format!("delta = {d} outside [0, 1]")));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tolerance {} outside (0, 1)", self.tol)));
        }
        Ok(())
    }
}

/// `1/h` as a patch count.
pub fn patches_per_side(h: f64) -> Result<usize> {
    let n = (1.0 / h).round();
    if !(h > 0.0) || n < 1.0 || ((1.0 / h) - n).abs() > 1e-9 * n {
        return Err(Error::Config(format!("1/h must be a positive integer, got h = {h}")));
    }
    Ok(n as usize)
}

/// Outcome of one discretization.
#[derive(Clone, Debug)]
pub struct Run {
    pub problem: ExampleProblem,
    pub mesh: MeshModel,
    pub system: LinearSystem,
    pub coeffs: Vec<f64>,
    pub report: ErrorReport,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub basis: BasisKind,
    pub tol: f64,
    pub condition: bool,
}

/// Attaches refinement guidance to an unresolvable interface.
fn with_guidance(e: Error, h: f64) -> Error {
    if e.is_assumption_violation() {
        Error::Unresolved { h, source: Box::new(e) }
    } else {
        e
    }
}

/// Meshes, assembles and solves `example` at mesh size `h` and shift `shift`.
pub fn solve_case(example: ExampleKind, h: f64, delta: f64, shift: f64, opts: &RunOptions) -> Result<Run> {
    let n = patches_per_side(h)?;
    let problem = ExampleProblem::new(example, shift);
    let grid = PatchGrid::new(DOMAIN_ORIGIN, DOMAIN_WIDTH, n)?;
    let mesh = build_mesh(&grid, problem.level_set(), &MeshParams::for_grid(&grid))?;
    let space = FiniteElementSpace::new(&mesh, opts.basis);
    let system = assemble_problem(&space, &problem)?;
    let transform = (opts.basis != BasisKind::Lagrange).then(|| hierarchical_transform(&space, &system));
    let cg = CgOptions {
        tol: opts.tol,
        ..CgOptions::default()
    };
    let sol = cg_solve(&system, &cg, transform.as_ref())?;
    let mut report = ErrorReport {
        h,
        delta,
        l2_error: l2_error(&space, &sol.x, &problem),
        energy_error: modified_energy_error(&space, &sol.x, &problem),
        pn: mesh.pn,
        n_l: mesh.n_l,
        cg_iters: Some(sol.iterations),
        ..ErrorReport::default()
    };
    if opts.condition {
        let eig = EigenOptions::default();
        report.cond_lagrange = estimate_system_condition(&system, &eig).ok().map(|c| c.cond);
        let s = match &transform {
            Some(s) => s.clone(),
            None => hierarchical_transform(&FiniteElementSpace::new(&mesh, BasisKind::HierarchicalScaled), &system),
        };
        report.cond_hier = estimate_system_condition(&transform_system(&system, &s), &eig).ok().map(|c| c.cond);
    }
    let coeffs = sol.x;
    drop(space);
    Ok(Run {
        problem,
        mesh,
        system,
        coeffs,
        report,
    })
}

fn run_options(cfg: &ExperimentConfig, condition: bool) -> RunOptions {
    RunOptions {
        basis: cfg.basis,
        tol: cfg.tol,
        condition,
    }
}

fn case(cfg: &ExperimentConfig, h: f64, delta: f64, condition: bool) -> Result<Run> {
    let shift = cfg.shift_unit.shift(delta, h);
    solve_case(cfg.example, h, delta, shift, &run_options(cfg, condition)).map_err(|e| with_guidance(e, h))
}

/// One row per mesh size at the configured `δ`, with convergence orders.
pub fn run_example(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.h_list.len());
    for &h in &cfg.h_list {
        let run = case(cfg, h, cfg.delta, cfg.condition)?;
        write_artifacts(cfg, &run)?;
        rows.push(run.report);
    }
    fill_eoc(&mut rows);
    Ok(rows)
}

fn sweep_values(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.sweep
        .map(|r| r.values())
        .ok_or_else(|| Error::Config("no delta range configured".into()))
}

/// One row per `(h, δ)` over the configured range.
pub fn sweep_delta(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>> {
    run_grid(cfg, cfg.condition)
}

/// Condition numbers in both bases per `(h, δ)`.
pub fn condition_study(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>> {
    run_grid(cfg, true)
}

fn run_grid(cfg: &ExperimentConfig, condition: bool) -> Result<Vec<ErrorReport>> {
    cfg.validate()?;
    let deltas = sweep_values(cfg)?;
    let cases: Vec<(f64, f64)> = cfg.h_list.iter().flat_map(|&h| deltas.iter().map(move |&d| (h, d))).collect();
    cases
        .par_iter()
        .map(|&(h, d)| {
            let run = case(cfg, h, d, condition)?;
            write_artifacts(cfg, &run)?;
            Ok(run.report)
        })
        .collect()
}

/// File stem identifying a run.
pub fn run_stem(example: ExampleKind, h: f64, delta: f64) -> String {
    format!("{example}_n{}_delta{delta}", (1.0 / h).round() as usize)
}

fn write_artifacts(cfg: &ExperimentConfig, run: &Run) -> Result<()> {
    if !(cfg.vtk || cfg.matrix) {
        return Ok(());
    }
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let stem = run_stem(cfg.example, run.report.h, run.report.delta);
    if cfg.vtk {
        let dofs = crate::space::build_dof_map(&run.mesh);
        crate::vtk::export_vtk(&cfg.out.join(format!("{stem}.vtk")), &run.mesh, &dofs, Some(&run.coeffs))?;
    }
    if cfg.matrix {
        let path = cfg.out.join(format!("{stem}.mtx"));
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        run.system
            .matrix
            .write_matrix_market(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes rows under [`CSV_HEADER`]; unavailable values are empty fields.
pub fn write_csv(w: impl Write, rows: &[ErrorReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Config(format!("csv output failed: {e}"));
    out.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for r in rows {
        out.write_record([
            r.h.to_string(),
            r.delta.to_string(),
            r.l2_error.to_string(),
            r.energy_error.to_string(),
            opt(r.eoc_l2),
            opt(r.eoc_energy),
            r.pn.to_string(),
            r.n_l.to_string(),
            opt(r.cond_lagrange),
            opt(r.cond_hier),
            opt(r.cg_iters),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| Error::Config(format!("csv output failed: {e}")))?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[ErrorReport]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(BufWriter::new(file), rows)
}
