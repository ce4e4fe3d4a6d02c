use std::fs;
use std::path::{Path, PathBuf};

use ipdg_core::adapt::adaptive_loop;
use ipdg_core::io::{
    emit_records, emit_sweep, load_mesh, parse_config, save_mesh, to_config_text, RunConfig, StudyKind,
};
use ipdg_core::mesh::{
    generate_unit_square, shape_regularity, BoundaryTag, FacetKind, MaterialSplit, Mesh, SideTags, SplitAxis,
};
use ipdg_core::study::{
    extrapolate, record_for, robustness_study, solve_on_mesh, stabilization_sweep, uniform_study, Record,
};
use ipdg_core::{Error, Result};

use crate::{AxisArg, MeshCommand, RunArgs};

struct Run {
    cfg: RunConfig,
    /// Directory of the config file; relative mesh paths resolve against it.
    base: PathBuf,
    output: PathBuf,
}

fn load(args: &RunArgs, expected: StudyKind) -> Result<Run> {
    let text = fs::read_to_string(&args.config)?;
    let cfg = parse_config(&text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Config(format!("{}:{line}: {msg}", args.config.display())),
        other => other,
    })?;
    if cfg.study.kind != expected {
        return Err(Error::Config(format!(
            "{} declares study type `{}`; run it with `ipdg {}`",
            args.config.display(),
            cfg.study.kind.name(),
            cfg.study.kind.name()
        )));
    }
    let output = args.output.clone().unwrap_or_else(|| PathBuf::from(&cfg.study.output));
    fs::create_dir_all(&output)?;
    // normalized copy of what was run
    fs::write(output.join("config.toml"), to_config_text(&cfg))?;
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Run { cfg, base, output })
}

impl Run {
    fn initial_mesh(&self) -> Result<Mesh> {
        match (&self.cfg.domain.mesh, self.cfg.domain.n) {
            (Some(file), _) => load_mesh(&self.base.join(file)),
            (None, Some(n)) => self.cfg.square()?.mesh(n),
            (None, None) => unreachable!("validated config has n or mesh"),
        }
    }

    fn csv(&self, name: &str) -> PathBuf {
        self.output.join(name)
    }
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")
}

fn print_records(records: &[Record]) {
    println!(
        "{:>4} {:>9} {:>10} {:>16} {:>12} {:>12} {:>10}",
        "iter", "dof", "h_max", "kappa_hat_1", "err_1", "eta_sq", "eff"
    );
    for r in records {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4e}"));
        println!(
            "{:>4} {:>9} {:>10.4e} {:>16.10e} {:>12} {:>12.4e} {:>10}",
            r.iter,
            r.dof,
            r.h_max,
            r.kappa_hat[0],
            opt(r.err.first().copied()),
            r.eta_sq,
            opt(r.eff)
        );
    }
}

pub fn solve(args: &RunArgs) -> Result<()> {
    let run = load(args, StudyKind::Solve)?;
    let materials = run.cfg.material_table()?;
    let sol = solve_on_mesh(
        run.initial_mesh()?,
        &materials,
        &run.cfg.discretization()?,
        &run.cfg.solver_options(),
    )?;
    let (record, _) = record_for(0, &sol, &materials, run.cfg.study.mode - 1, &run.cfg.study.references)?;
    emit_records(
        &run.csv("solve.csv"),
        std::slice::from_ref(&record),
        run.cfg.solver.modes,
    )?;
    println!(
        "dof {}  backend {:?}  max residual {:.2e}  {:.2} s",
        sol.dof(),
        sol.eigen.backend,
        sol.eigen.max_residual(),
        sol.seconds
    );
    println!("{:>4} {:>20} {:>20}", "i", "kappa_hat", "frequency");
    for (i, (k, f)) in record.kappa_hat.iter().zip(&record.freq).enumerate() {
        println!("{:>4} {k:>20.12e} {f:>20.12e}", i + 1);
    }
    println!("eta^2 = {:.6e} (mode {})", record.eta_sq, run.cfg.study.mode);
    Ok(())
}

pub fn sweep(args: &RunArgs) -> Result<()> {
    let run = load(args, StudyKind::Sweep)?;
    let st = &run.cfg.study;
    let cells = stabilization_sweep(
        &run.cfg.square()?,
        run.cfg.domain.n.expect("validated"),
        &st.k_list,
        &st.a_list,
        run.cfg.discretization()?.variant,
        &run.cfg.solver_options(),
        &st.reference_frequencies,
        st.spurious_tol,
    )?;
    emit_sweep(&run.csv("sweep.csv"), &cells, run.cfg.solver.modes)?;
    for c in &cells {
        match &c.error {
            Some(e) => println!("k={} a={:<5} error: {e}", c.k, c.a),
            None => {
                let shown: Vec<String> = c
                    .frequencies
                    .iter()
                    .zip(&c.spurious)
                    .map(|(f, &s)| if s { format!("*{f:.4}") } else { format!("{f:.4}") })
                    .collect();
                let n_spurious = c.spurious.iter().filter(|&&s| s).count();
                println!("k={} a={:<5} [{n_spurious} spurious] {}", c.k, c.a, shown.join(" "));
            }
        }
    }
    Ok(())
}

pub fn uniform(args: &RunArgs) -> Result<()> {
    let run = load(args, StudyKind::Uniform)?;
    let setup = run.cfg.square()?;
    let disc = run.cfg.discretization()?;
    let records = uniform_study(
        &setup,
        &disc,
        &run.cfg.study.levels,
        &run.cfg.solver_options(),
        &run.cfg.study.references,
    )?;
    emit_records(&run.csv("uniform.csv"), &records, run.cfg.solver.modes)?;
    for (n, r) in run.cfg.study.levels.iter().zip(&records) {
        println!("N={n:<4} dof={:<8} freq: {}", r.dof, fmt_list(&r.freq));
    }
    if records.len() >= 4 {
        let hs: Vec<f64> = records.iter().map(|r| r.h_max).collect();
        for i in 0..run.cfg.solver.modes {
            let freq: Vec<f64> = records.iter().map(|r| r.freq[i]).collect();
            let fit = extrapolate(&hs, &freq, (2 * disc.k + 2) as f64)?;
            let order = fit.order.map_or("-".to_string(), |t| format!("{t:.2}"));
            println!("mode {}: order {order}  extrapolated frequency {:.6}", i + 1, fit.value);
        }
    } else {
        println!("(extrapolation needs at least 4 levels)");
    }
    Ok(())
}

pub fn adapt(args: &RunArgs) -> Result<()> {
    let run = load(args, StudyKind::Adapt)?;
    let materials = run.cfg.material_table()?;
    let opts = run.cfg.adapt_options();
    let mut last_mesh = None;
    let outcome = adaptive_loop(
        run.initial_mesh()?,
        &materials,
        &run.cfg.discretization()?,
        &run.cfg.solver_options(),
        &opts,
        |r, mesh| {
            let err = r.err.get(opts.mode).map_or("-".to_string(), |e| format!("{e:.4e}"));
            println!(
                "iter {:>2}  dof {:>8}  kappa_hat {:.10e}  err {err}  eta^2 {:.4e}",
                r.iter, r.dof, r.kappa_hat[opts.mode], r.eta_sq
            );
            last_mesh = Some(mesh.clone());
        },
    );
    let records = match &outcome {
        Ok(r) => r,
        Err(f) => &f.records,
    };
    emit_records(&run.csv("adapt.csv"), records, run.cfg.solver.modes)?;
    if let Some(mesh) = &last_mesh {
        save_mesh(&run.csv("final.mesh"), mesh)?;
    }
    outcome.map(|_| ()).map_err(|f| f.error)
}

pub fn robust(args: &RunArgs) -> Result<()> {
    let run = load(args, StudyKind::Robust)?;
    let st = &run.cfg.study;
    let series = robustness_study(
        &run.cfg.square()?,
        &st.young_list,
        &run.cfg.discretization()?,
        &st.levels,
        &run.cfg.solver_options(),
        st.reference_per_young,
    )?;
    for s in &series {
        emit_records(&run.csv(&format!("robust_E{:e}.csv", s.young)), &s.records, 1)?;
        println!(
            "E = {:e}: extrapolated kappa_hat_1/E = {:.10}",
            s.young,
            s.extrapolated_over_young()
        );
        print_records(&s.records);
    }
    Ok(())
}

fn side_tags(names: &[String]) -> Result<SideTags> {
    let mut tags = SideTags::all(BoundaryTag::Neumann);
    for name in names {
        let slot = match name.trim() {
            "bottom" => &mut tags.bottom,
            "right" => &mut tags.right,
            "top" => &mut tags.top,
            "left" => &mut tags.left,
            "" | "none" => continue,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown side `{other}` (expected bottom, right, top or left)"
                )))
            }
        };
        *slot = BoundaryTag::Dirichlet;
    }
    Ok(tags)
}

pub fn mesh(cmd: MeshCommand) -> Result<()> {
    match cmd {
        MeshCommand::Gen {
            n,
            dirichlet,
            split,
            split_at,
            output,
        } => {
            let split = split.map(|axis| MaterialSplit {
                axis: match axis {
                    AxisArg::Horizontal => SplitAxis::Horizontal,
                    AxisArg::Vertical => SplitAxis::Vertical,
                },
                at: split_at.unwrap_or(0.5),
                first: 0,
                second: 1,
            });
            let mesh = generate_unit_square(n, side_tags(&dirichlet)?, split)?;
            save_mesh(&output, &mesh)?;
            println!("wrote {} ({} triangles)", output.display(), mesh.n_elements());
        }
        MeshCommand::Check { file } => {
            let mesh = load_mesh(&file)?;
            let quality = shape_regularity(&mesh);
            let mut ids: Vec<u32> = mesh.materials().to_vec();
            ids.sort_unstable();
            ids.dedup();
            println!("vertices        {}", mesh.n_vertices());
            println!("triangles       {}", mesh.n_elements());
            println!("interior facets {}", mesh.count_facets(FacetKind::Interior));
            println!("dirichlet       {}", mesh.count_facets(FacetKind::Dirichlet));
            println!("neumann         {}", mesh.count_facets(FacetKind::Neumann));
            println!("area            {:.15}", mesh.total_area());
            println!("h_max / h_min   {:.6e} / {:.6e}", mesh.h_max(), mesh.h_min());
            println!("min angle (deg) {:.4}", quality.min_angle);
            println!("material ids    {ids:?}");
        }
    }
    Ok(())
}
