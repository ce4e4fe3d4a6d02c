//! Solve, estimate, mark, refine.

use crate::eigensolver::SolverOptions;
use crate::estimator::mark;
use crate::materials::MaterialTable;
use crate::mesh::{refine, Mesh};
use crate::study::{record_for, solve_on_mesh, Discretization, Record};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptOptions {
    /// Refinement steps; the loop performs `iterations + 1` solves.
    pub iterations: usize,
    /// Marking fraction of the largest indicator.
    pub theta: f64,
    /// Eigenpair driving the estimator (0-based).
    pub mode: usize,
    /// Reference unscaled eigenvalues; empty when unknown.
    pub references: Vec<f64>,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self {
            iterations: 10,
            theta: 0.5,
            mode: 0,
            references: Vec::new(),
        }
    }
}

/// Records gathered before a failure, and the failure itself.
#[derive(Debug)]
pub struct AdaptFailure {
    pub records: Vec<Record>,
    pub error: Error,
}

impl std::fmt::Display for AdaptFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "adaptive loop stopped after {} records: {}",
            self.records.len(),
            self.error
        )
    }
}

impl std::error::Error for AdaptFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs the adaptive loop from `initial`.
///
/// `on_record` sees every record as soon as it is produced.
pub fn adaptive_loop(
    initial: Mesh,
    materials: &MaterialTable,
    disc: &Discretization,
    solver: &SolverOptions,
    options: &AdaptOptions,
    mut on_record: impl FnMut(&Record, &Mesh),
) -> Result<Vec<Record>, AdaptFailure> {
    let mut records = Vec::with_capacity(options.iterations + 1);
    if solver.modes <= options.mode {
        return Err(AdaptFailure {
            records,
            error: Error::InvalidArgument(format!(
                "mode {} needs at least {} computed eigenpairs, got {}",
                options.mode,
                options.mode + 1,
                solver.modes
            )),
        });
    }
    let mut mesh = initial;
    for iter in 0..=options.iterations {
        let step = (|| {
            let sol = solve_on_mesh(mesh.clone(), materials, disc, solver)?;
            let (record, field) = record_for(iter, &sol, materials, options.mode, &options.references)?;
            Ok::<_, Error>((record, field))
        })();
        let (record, field) = match step {
            Ok(v) => v,
            Err(error) => return Err(AdaptFailure { records, error }),
        };
        on_record(&record, &mesh);
        records.push(record);
        if iter == options.iterations {
            break;
        }
        let refined = mark(&field.eta_k(), options.theta).and_then(|marked| refine(&mesh, &marked));
        match refined {
            Ok(m) => mesh = m,
            Err(error) => return Err(AdaptFailure { records, error }),
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::IpVariant;
    use crate::mesh::{generate_unit_square, SideTags};

    fn setup() -> (Mesh, MaterialTable, Discretization, SolverOptions) {
        let mesh = generate_unit_square(3, SideTags::bottom_clamped(), None).unwrap();
        let mats = MaterialTable::homogeneous(0.35, 1.0, 1.0).unwrap();
        let solver = SolverOptions {
            modes: 2,
            ..SolverOptions::default()
        };
        (mesh, mats, Discretization::new(1, 10.0, IpVariant::Symmetric), solver)
    }

    #[test]
    fn zero_iterations_is_a_single_solve() {
        let (mesh, mats, disc, solver) = setup();
        let opts = AdaptOptions {
            iterations: 0,
            ..AdaptOptions::default()
        };
        let records = adaptive_loop(mesh, &mats, &disc, &solver, &opts, |_, _| {}).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].dof, 126);
        assert!(records[0].err.is_empty());
        assert!(records[0].eff.is_none());
    }

    #[test]
    fn refinement_grows_and_reports_every_step() {
        let (mesh, mats, disc, solver) = setup();
        let opts = AdaptOptions {
            iterations: 3,
            references: vec![0.46355423498481496],
            ..AdaptOptions::default()
        };
        let mut seen = 0;
        let records = adaptive_loop(mesh, &mats, &disc, &solver, &opts, |_, _| seen += 1).unwrap();
        assert_eq!(seen, 4);
        for w in records.windows(2) {
            assert!(w[1].dof > w[0].dof);
            assert_eq!(w[1].iter, w[0].iter + 1);
        }
        assert!(records.iter().all(|r| r.eff.is_some() && r.theta_osc == 0.0));
    }

    #[test]
    fn failures_keep_partial_records() {
        let (mesh, mats, disc, _) = setup();
        // more modes than the coarse pencil has finite eigenvalues
        let solver = SolverOptions {
            modes: 5000,
            ..SolverOptions::default()
        };
        let opts = AdaptOptions::default();
        let failure = adaptive_loop(mesh, &mats, &disc, &solver, &opts, |_, _| {}).unwrap_err();
        assert!(failure.records.is_empty());
        assert_eq!(failure.error.category(), "numerical", "{}", failure.error);
    }

    #[test]
    fn mode_beyond_requested_pairs_is_rejected() {
        let (mesh, mats, disc, solver) = setup();
        let opts = AdaptOptions {
            mode: 2,
            ..AdaptOptions::default()
        };
        let failure = adaptive_loop(mesh, &mats, &disc, &solver, &opts, |_, _| {}).unwrap_err();
        assert_eq!(failure.error.category(), "input");
    }
}
