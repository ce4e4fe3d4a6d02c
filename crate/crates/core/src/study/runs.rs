use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{detect_spurious, extrapolate, Extrapolation};
use crate::assembly::{BlockSystem, IpVariant};
use crate::eigensolver::{solve_evp, EigenResult, SolverOptions};
use crate::estimator::{effectivity, local_indicators, IndicatorField};
use crate::materials::{unscale_eigenvalue, MaterialTable};
use crate::mesh::{generate_unit_square, shape_regularity, MaterialSplit, Mesh, SideTags};
use crate::spaces::{build_space, DgSpace};
use crate::Result;

/// Polynomial degree, stabilization and consistency variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub k: usize,
    /// Penalty scale; the penalty is `a k^2`.
    pub a: f64,
    #[serde(skip, default = "symmetric")]
    pub variant: IpVariant,
}

fn symmetric() -> IpVariant {
    IpVariant::Symmetric
}

impl Discretization {
    pub fn new(k: usize, a: f64, variant: IpVariant) -> Self {
        Self { k, a, variant }
    }

    pub fn penalty(&self) -> f64 {
        self.a * (self.k * self.k) as f64
    }
}

/// Unit square with boundary tags, optional two-material split and data.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareSetup {
    pub sides: SideTags,
    pub split: Option<MaterialSplit>,
    pub materials: MaterialTable,
}

impl SquareSetup {
    pub fn mesh(&self, n: usize) -> Result<Mesh> {
        generate_unit_square(n, self.sides, self.split)
    }
}

/// A solved discrete eigenproblem together with what produced it.
#[derive(Clone, Debug)]
pub struct Solution {
    pub mesh: Mesh,
    pub space: DgSpace,
    pub system: BlockSystem,
    pub eigen: EigenResult,
    pub nu: f64,
    pub seconds: f64,
}

impl Solution {
    pub fn dof(&self) -> usize {
        self.space.n_total()
    }

    /// Unscaled eigenvalues (real parts).
    pub fn kappa_hat(&self) -> Vec<f64> {
        self.eigen
            .pairs
            .iter()
            .map(|p| unscale_eigenvalue(p.kappa, self.nu).kappa_hat.re)
            .collect()
    }

    /// Natural frequencies (real parts of the principal roots).
    pub fn frequencies(&self) -> Vec<f64> {
        self.eigen
            .pairs
            .iter()
            .map(|p| unscale_eigenvalue(p.kappa, self.nu).frequency.re)
            .collect()
    }

    /// Indicators of eigenpair `mode` (0-based), using real parts.
    pub fn indicators(&self, materials: &MaterialTable, mode: usize) -> Result<IndicatorField> {
        let pair = self.eigen.pairs.get(mode).ok_or_else(|| {
            crate::Error::InvalidArgument(format!(
                "mode {} requested but only {} computed",
                mode + 1,
                self.eigen.pairs.len()
            ))
        })?;
        local_indicators(
            &self.mesh,
            &self.space,
            materials,
            pair.kappa.re,
            &pair.u_real(),
            &pair.p_real(),
            self.system.a_s,
        )
    }
}

pub fn solve_on_mesh(
    mesh: Mesh,
    materials: &MaterialTable,
    disc: &Discretization,
    solver: &SolverOptions,
) -> Result<Solution> {
    let start = Instant::now();
    materials.check_ids(mesh.materials())?;
    let space = build_space(&mesh, disc.k)?;
    let system = BlockSystem::assemble(&mesh, &space, materials, disc.penalty(), disc.variant)?;
    let eigen = solve_evp(&system, solver)?;
    Ok(Solution {
        mesh,
        space,
        system,
        eigen,
        nu: materials.nu(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// One row of a study: a solve plus the estimator of one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub iter: usize,
    pub dof: usize,
    pub h_max: f64,
    pub n_elements: usize,
    pub min_angle: f64,
    pub kappa_hat: Vec<f64>,
    pub freq: Vec<f64>,
    /// `|kappa_hat_i - reference_i|`; empty without references.
    pub err: Vec<f64>,
    pub eta: f64,
    pub eta_sq: f64,
    pub theta_osc: f64,
    /// Effectivity of the estimated mode, when its error is known.
    pub eff: Option<f64>,
    pub seconds: f64,
}

/// Record of a solution with indicators of `mode` and optional references (unscaled eigenvalues).
pub fn record_for(
    iter: usize,
    solution: &Solution,
    materials: &MaterialTable,
    mode: usize,
    references: &[f64],
) -> Result<(Record, IndicatorField)> {
    let field = solution.indicators(materials, mode)?;
    let kappa_hat = solution.kappa_hat();
    let err: Vec<f64> = kappa_hat.iter().zip(references).map(|(k, r)| (k - r).abs()).collect();
    let eff = match err.get(mode) {
        Some(&e) => Some(effectivity(e, field.eta())?),
        None => None,
    };
    let record = Record {
        iter,
        dof: solution.dof(),
        h_max: solution.mesh.h_max(),
        n_elements: solution.mesh.n_elements(),
        min_angle: shape_regularity(&solution.mesh).min_angle,
        freq: solution.frequencies(),
        kappa_hat,
        err,
        eta: field.eta(),
        eta_sq: field.eta_sq(),
        theta_osc: field.theta(),
        eff,
        seconds: solution.seconds,
    };
    Ok((record, field))
}

/// Frequencies of one `(k, a)` pair in a stabilization sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub k: usize,
    pub a: f64,
    pub frequencies: Vec<f64>,
    pub spurious: Vec<bool>,
    /// Solver failure for this cell, if any.
    pub error: Option<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn stabilization_sweep(
    setup: &SquareSetup,
    n: usize,
    k_list: &[usize],
    a_list: &[f64],
    variant: IpVariant,
    solver: &SolverOptions,
    reference_frequencies: &[f64],
    rel_tol: f64,
) -> Result<Vec<SweepCell>> {
    let mesh = setup.mesh(n)?;
    let mut cells = Vec::with_capacity(k_list.len() * a_list.len());
    for &k in k_list {
        for &a in a_list {
            let disc = Discretization::new(k, a, variant);
            let cell = match solve_on_mesh(mesh.clone(), &setup.materials, &disc, solver) {
                Ok(sol) => {
                    let frequencies = sol.frequencies();
                    let spurious = if reference_frequencies.is_empty() {
                        vec![false; frequencies.len()]
                    } else {
                        detect_spurious(&frequencies, reference_frequencies, rel_tol)
                    };
                    SweepCell {
                        k,
                        a,
                        frequencies,
                        spurious,
                        error: None,
                    }
                }
                Err(e) => SweepCell {
                    k,
                    a,
                    frequencies: Vec::new(),
                    spurious: Vec::new(),
                    error: Some(e.to_string()),
                },
            };
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Solves on uniform `n x n` meshes, one record per level.
pub fn uniform_study(
    setup: &SquareSetup,
    disc: &Discretization,
    levels: &[usize],
    solver: &SolverOptions,
    references: &[f64],
) -> Result<Vec<Record>> {
    levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let sol = solve_on_mesh(setup.mesh(n)?, &setup.materials, disc, solver)?;
            Ok(record_for(i, &sol, &setup.materials, 0, references)?.0)
        })
        .collect()
}

/// Uniform study of the first eigenvalue for one Young modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustSeries {
    pub young: f64,
    pub records: Vec<Record>,
    pub extrapolated: Extrapolation,
    /// Reference used for errors and effectivities.
    pub reference: f64,
}

impl RobustSeries {
    pub fn extrapolated_over_young(&self) -> f64 {
        self.extrapolated.value / self.young
    }

    pub fn effectivities(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.eff).collect()
    }
}

/// Scales every Young modulus of `setup` to each value of `young_list`
/// (relative to material 0) and runs a uniform study of the first mode.
///
/// `reference_per_young` gives `kappa_hat_1 / E`; without it the extrapolated
/// value is the reference. The extrapolation uses the finest four levels.
pub fn robustness_study(
    setup: &SquareSetup,
    young_list: &[f64],
    disc: &Discretization,
    levels: &[usize],
    solver: &SolverOptions,
    reference_per_young: Option<f64>,
) -> Result<Vec<RobustSeries>> {
    let base = setup
        .materials
        .get(*setup.materials.entries().keys().next().expect("nonempty"))?
        .young;
    let mut out = Vec::with_capacity(young_list.len());
    for &young in young_list {
        let scaled = SquareSetup {
            materials: setup.materials.scale_young(young / base)?,
            ..setup.clone()
        };
        let mut records = uniform_study(&scaled, disc, levels, solver, &[])?;
        let fine = &records[records.len().saturating_sub(4)..];
        let hs: Vec<f64> = fine.iter().map(|r| r.h_max).collect();
        let first: Vec<f64> = fine.iter().map(|r| r.kappa_hat[0]).collect();
        let extrapolated = extrapolate(&hs, &first, (2 * disc.k + 2) as f64)?;
        let reference = reference_per_young.map_or(extrapolated.value, |c| c * young);
        for r in &mut records {
            let err = (r.kappa_hat[0] - reference).abs();
            r.err = vec![err];
            r.eff = Some(effectivity(err, r.eta)?);
        }
        out.push(RobustSeries {
            young,
            records,
            extrapolated,
            reference,
        });
    }
    Ok(out)
}
