use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lmfem::experiment::{self, parse_list, parse_real, run_stem, DeltaRange, ShiftUnit};
use lmfem::space::build_dof_map;
use lmfem::{BasisKind, CutKind, Error, ExampleKind, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lmfem", version, about = "Locally modified P2/Q2 finite elements for interface problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Errors and convergence orders over a list of mesh sizes.
    Convergence(Common),
    /// Errors over a range of interface positions.
    Sweep(Common),
    /// Condition numbers in the Lagrange and scaled hierarchical bases.
    Condition(Common),
    /// Solve once and write the sub-element mesh as VTK.
    Mesh(Common),
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Plain-text key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["parabola", "circle"])]
    example: Option<String>,
    /// Comma-separated mesh sizes, e.g. 1/32,1/64.
    #[arg(long = "h")]
    h_list: Option<String>,
    #[arg(long, value_parser = parse_real)]
    delta: Option<f64>,
    /// a:b:n, n values from a to b.
    #[arg(long = "delta-range")]
    delta_range: Option<DeltaRange>,
    /// Unit of the interface shift: `h`, or a fixed length such as 1/64.
    #[arg(long = "shift-unit")]
    shift_unit: Option<ShiftUnit>,
    #[arg(long, value_parser = ["lagrange", "hierarchical"])]
    basis: Option<String>,
    #[arg(long, value_parser = parse_real)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also estimate condition numbers.
    #[arg(long)]
    condition: bool,
    #[arg(long)]
    vtk: bool,
    /// Export the constrained stiffness matrix in MatrixMarket format.
    #[arg(long)]
    matrix: bool,
}

impl Common {
    fn config(&self) -> lmfem::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(e) = &self.example {
            cfg.example = e.parse::<ExampleKind>().map_err(Error::Config)?;
        }
        if let Some(h) = &self.h_list {
            cfg.h_list = parse_list(h).map_err(Error::Config)?;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        if let Some(r) = self.delta_range {
            cfg.sweep = Some(r);
        }
        if let Some(u) = self.shift_unit {
            cfg.shift_unit = u;
        }
        if let Some(b) = &self.basis {
            cfg.basis = b.parse::<BasisKind>().map_err(Error::Config)?;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.condition |= self.condition;
        cfg.vtk |= self.vtk;
        cfg.matrix |= self.matrix;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

fn print_rows(rows: &[lmfem::ErrorReport]) {
    println!(
        "{:>10} {:>8} {:>12} {:>7} {:>12} {:>7} {:>5} {:>4} {:>11} {:>11} {:>6}",
        "h", "delta", "L2", "EOC", "energy", "EOC", "PN", "n_l", "cond_lag", "cond_hier", "cg"
    );
    for r in rows {
        println!(
            "{:>10.6} {:>8.4} {:>12.4e} {:>7} {:>12.4e} {:>7} {:>5} {:>4} {:>11} {:>11} {:>6}",
            r.h,
            r.delta,
            r.l2_error,
            fmt_opt(r.eoc_l2, 3),
            r.energy_error,
            fmt_opt(r.eoc_energy, 3),
            r.pn,
            r.n_l,
            r.cond_lagrange.map_or("-".into(), |c| format!("{c:.3e}")),
            r.cond_hier.map_or("-".into(), |c| format!("{c:.3e}")),
            r.cg_iters.map_or("-".into(), |c| c.to_string()),
        );
    }
}

fn tabulate(cfg: &ExperimentConfig, name: &str, rows: &[lmfem::ErrorReport]) -> lmfem::Result<()> {
    print_rows(rows);
    if cfg.csv {
        let path = cfg.out.join(format!("{name}.csv"));
        experiment::write_csv_file(&path, rows)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn mesh_command(mut cfg: ExperimentConfig) -> lmfem::Result<()> {
    let h = cfg.h_list[0];
    cfg.vtk = false;
    let shift = cfg.shift_unit.shift(cfg.delta, h);
    let opts = experiment::RunOptions {
        basis: cfg.basis,
        tol: cfg.tol,
        condition: cfg.condition,
    };
    let run = experiment::solve_case(cfg.example, h, cfg.delta, shift, &opts).map_err(|e| {
        if e.is_assumption_violation() {
            Error::Unresolved { h, source: Box::new(e) }
        } else {
            e
        }
    })?;
    let mesh = &run.mesh;
    println!("patches per side {}, PN {}, n_l {}, sub-elements {}", mesh.grid.n, mesh.pn, mesh.n_l, mesh.n_elements());
    for kind in [CutKind::A, CutKind::B, CutKind::C, CutKind::D, CutKind::E] {
        println!("  configuration {kind:?}: {}", mesh.count(kind));
    }
    print_rows(std::slice::from_ref(&run.report));
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let path = cfg.out.join(format!("{}.vtk", run_stem(cfg.example, h, cfg.delta)));
    lmfem::vtk::export_vtk(&path, mesh, &build_dof_map(mesh), Some(&run.coeffs))?;
    eprintln!("wrote {}", path.display());
    if cfg.matrix {
        let path = cfg.out.join(format!("{}.mtx", run_stem(cfg.example, h, cfg.delta)));
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        run.system
            .matrix
            .write_matrix_market(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(&path, e))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> lmfem::Result<()> {
    match cli.command {
        Command::Convergence(c) => {
            let cfg = c.config()?;
            let rows = experiment::run_example(&cfg)?;
            tabulate(&cfg, "convergence", &rows)
        }
        Command::Sweep(c) => {
            let cfg = c.config()?;
            let rows = experiment::sweep_delta(&cfg)?;
            tabulate(&cfg, "sweep", &rows)
        }
        Command::Condition(c) => {
            let mut cfg = c.config()?;
            if c.h_list.is_none() && c.config.is_none() {
                cfg.h_list = vec![1.0 / 16.0];
            }
            let rows = experiment::condition_study(&cfg)?;
            tabulate(&cfg, "condition", &rows)
        }
        Command::Mesh(c) => mesh_command(c.config()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_assumption_violation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
