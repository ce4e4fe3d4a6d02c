//! Run configuration files.
//!
//! A config is a TOML document with five flat sections. Only `[study].type`,
//! `[materials].nu`, `[materials].young` and, for generated meshes,
//! `[domain].n` are required; see `configs/` for complete examples.
//!
//! ```toml
//! [study]
//! type = "solve"          # solve | sweep | uniform | adapt | robust
//!
//! [domain]
//! n = 8
//! dirichlet = ["bottom"]
//!
//! [materials]
//! nu = 0.35
//! young = [1.0]
//! ```

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::adapt::AdaptOptions;
use crate::assembly::IpVariant;
use crate::eigensolver::{Backend, SolverOptions};
use crate::materials::{Material, MaterialTable};
use crate::mesh::{BoundaryTag, MaterialSplit, SideTags, SplitAxis};
use crate::study::{Discretization, SquareSetup, SPURIOUS_TOL};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    Solve,
    Sweep,
    Uniform,
    Adapt,
    Robust,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Solve => "solve",
            StudyKind::Sweep => "sweep",
            StudyKind::Uniform => "uniform",
            StudyKind::Adapt => "adapt",
            StudyKind::Robust => "robust",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

fn default_output() -> String {
    "out".into()
}
fn default_iterations() -> usize {
    10
}
fn default_theta() -> f64 {
    0.5
}
fn default_mode() -> usize {
    1
}
fn default_spurious_tol() -> f64 {
    SPURIOUS_TOL
}
fn default_dirichlet() -> Vec<Side> {
    vec![Side::Bottom]
}
fn default_k() -> usize {
    1
}
fn default_epsilon() -> i32 {
    1
}
fn default_a() -> f64 {
    10.0
}
fn default_backend() -> Backend {
    Backend::Auto
}
fn default_tol() -> f64 {
    1e-8
}
fn default_modes() -> usize {
    10
}
fn default_max_subspace() -> usize {
    600
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    #[serde(rename = "type")]
    pub kind: StudyKind,
    #[serde(default = "default_output")]
    pub output: String,
    /// Grid sizes `N` for uniform and robustness studies.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a_list: Vec<f64>,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// 1-based eigenpair driving the estimator.
    #[serde(default = "default_mode")]
    pub mode: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub young_list: Vec<f64>,
    /// Reference `kappa_hat_1 / E` for robustness runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_per_young: Option<f64>,
    /// Reference unscaled eigenvalues.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<f64>,
    /// Reference frequencies for spurious-mode detection.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_frequencies: Vec<f64>,
    #[serde(default = "default_spurious_tol")]
    pub spurious_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// Grid size of the generated unit square (initial mesh for `adapt`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Mesh file; replaces the generated square for `solve` and `adapt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<String>,
    #[serde(default = "default_dirichlet")]
    pub dirichlet: Vec<Side>,
    /// Material interface of the generated square: id 0 below/left, id 1 above/right.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsSection {
    pub nu: f64,
    /// Young modulus per material id, starting at 0.
    pub young: Vec<f64>,
    /// Density per material id; defaults to 1 for every id.
    #[serde(default)]
    pub density: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: i32,
    #[serde(default = "default_a")]
    pub a: f64,
}

impl Default for DiscretizationSection {
    fn default() -> Self {
        Self {
            k: default_k(),
            epsilon: default_epsilon(),
            a: default_a(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_backend")]
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Seed of the Arnoldi start vector.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_subspace")]
    pub max_subspace: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            backend: default_backend(),
            shift: None,
            tol: default_tol(),
            modes: default_modes(),
            seed: 0,
            max_subspace: default_max_subspace(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub study: StudySection,
    pub domain: DomainSection,
    pub materials: MaterialsSection,
    #[serde(default)]
    pub discretization: DiscretizationSection,
    #[serde(default)]
    pub solver: SolverSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]`, or of the section header, or 1.
fn key_line(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header_line = Some(i + 1);
            }
        } else if current == section && line.split_once('=').is_some_and(|(k, _)| k.trim() == key) {
            return i + 1;
        }
    }
    header_line.unwrap_or(1)
}

struct Checker<'a> {
    text: &'a str,
}

impl Checker<'_> {
    fn fail(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> Error {
        Error::Parse {
            line: key_line(self.text, section, key),
            msg: format!("[{section}] {key}: {msg}"),
        }
    }

    fn ensure(&self, ok: bool, section: &str, key: &str, msg: impl std::fmt::Display) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(section, key, msg))
        }
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

fn check_degree(k: usize) -> bool {
    (1..=3).contains(&k)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |Range { start, .. }| line_of(text, start)),
        msg: e.message().to_string(),
    })?;
    let c = Checker { text };

    let mats = &mut cfg.materials;
    c.ensure(
        mats.nu > 0.0 && mats.nu <= 0.5,
        "materials",
        "nu",
        format_args!("Poisson ratio must lie in (0, 0.5], got {}", mats.nu),
    )?;
    c.ensure(
        !mats.young.is_empty(),
        "materials",
        "young",
        "at least one material is required",
    )?;
    if let Some(bad) = mats.young.iter().find(|&&e| !positive(e)) {
        return Err(c.fail(
            "materials",
            "young",
            format_args!("Young modulus must be positive, got {bad}"),
        ));
    }
    if mats.density.is_empty() {
        mats.density = vec![1.0; mats.young.len()];
    }
    c.ensure(
        mats.density.len() == mats.young.len(),
        "materials",
        "density",
        format_args!("{} densities for {} materials", mats.density.len(), mats.young.len()),
    )?;
    if let Some(bad) = mats.density.iter().find(|&&r| !positive(r)) {
        return Err(c.fail(
            "materials",
            "density",
            format_args!("density must be positive, got {bad}"),
        ));
    }

    let d = &mut cfg.domain;
    d.dirichlet.sort();
    d.dirichlet.dedup();
    match (&d.n, &d.mesh) {
        (None, None) => return Err(c.fail("domain", "n", "either n or mesh is required")),
        (Some(0), _) => return Err(c.fail("domain", "n", "grid size must be at least 1")),
        _ => {}
    }
    match (d.split, d.split_at) {
        (Some(_), None) => return Err(c.fail("domain", "split_at", "split needs split_at")),
        (None, Some(_)) => return Err(c.fail("domain", "split", "split_at needs split")),
        (Some(_), Some(at)) => {
            c.ensure(at > 0.0 && at < 1.0, "domain", "split_at", "must lie in (0, 1)")?;
            c.ensure(
                cfg.materials.young.len() >= 2,
                "domain",
                "split",
                "a split square references material ids 0 and 1; give two Young moduli",
            )?;
        }
        (None, None) => {}
    }

    let disc = &cfg.discretization;
    c.ensure(
        check_degree(disc.k),
        "discretization",
        "k",
        format_args!("polynomial degree must be 1, 2 or 3, got {}", disc.k),
    )?;
    IpVariant::from_epsilon(disc.epsilon).map_err(|e| c.fail("discretization", "epsilon", e))?;
    c.ensure(
        positive(disc.a),
        "discretization",
        "a",
        "stabilization must be positive",
    )?;

    let s = &cfg.solver;
    c.ensure(s.modes >= 1, "solver", "modes", "at least one mode is required")?;
    c.ensure(
        positive(s.tol) && s.tol < 1.0,
        "solver",
        "tol",
        "tolerance must lie in (0, 1)",
    )?;
    c.ensure(s.max_subspace > s.modes, "solver", "max_subspace", "must exceed modes")?;
    if let Some(shift) = s.shift {
        c.ensure(shift.is_finite(), "solver", "shift", "must be finite")?;
    }

    let st = &mut cfg.study;
    c.ensure(
        st.theta > 0.0 && st.theta <= 1.0,
        "study",
        "theta",
        "marking fraction must lie in (0, 1]",
    )?;
    c.ensure(
        st.mode >= 1 && st.mode <= cfg.solver.modes,
        "study",
        "mode",
        format_args!("must lie in 1..={} (solver modes)", cfg.solver.modes),
    )?;
    c.ensure(positive(st.spurious_tol), "study", "spurious_tol", "must be positive")?;
    for (key, list) in [
        ("references", &st.references),
        ("reference_frequencies", &st.reference_frequencies),
    ] {
        if let Some(bad) = list.iter().find(|v| !v.is_finite()) {
            return Err(c.fail("study", key, format_args!("non-finite value {bad}")));
        }
    }
    let needs_square = matches!(st.kind, StudyKind::Sweep | StudyKind::Uniform | StudyKind::Robust);
    if needs_square && cfg.domain.mesh.is_some() {
        return Err(c.fail(
            "domain",
            "mesh",
            format_args!("{} studies run on generated squares; remove mesh", st.kind.name()),
        ));
    }
    match st.kind {
        StudyKind::Sweep => {
            c.ensure(!st.k_list.is_empty(), "study", "k_list", "sweep needs k_list")?;
            c.ensure(!st.a_list.is_empty(), "study", "a_list", "sweep needs a_list")?;
            if let Some(k) = st.k_list.iter().find(|&&k| !check_degree(k)) {
                return Err(c.fail(
                    "study",
                    "k_list",
                    format_args!("polynomial degree must be 1, 2 or 3, got {k}"),
                ));
            }
            if let Some(a) = st.a_list.iter().find(|&&a| !positive(a)) {
                return Err(c.fail(
                    "study",
                    "a_list",
                    format_args!("stabilization must be positive, got {a}"),
                ));
            }
        }
        StudyKind::Uniform | StudyKind::Robust => {
            let need = if st.kind == StudyKind::Robust { 4 } else { 1 };
            c.ensure(
                st.levels.len() >= need,
                "study",
                "levels",
                format_args!("{} study needs at least {need} levels", st.kind.name()),
            )?;
            c.ensure(
                st.levels.windows(2).all(|w| w[0] < w[1]) && st.levels[0] >= 1,
                "study",
                "levels",
                "levels must be increasing positive grid sizes",
            )?;
            if st.kind == StudyKind::Robust {
                c.ensure(
                    !st.young_list.is_empty(),
                    "study",
                    "young_list",
                    "robust needs young_list",
                )?;
                if let Some(bad) = st.young_list.iter().find(|&&e| !positive(e)) {
                    return Err(c.fail("study", "young_list", format_args!("must be positive, got {bad}")));
                }
            }
        }
        StudyKind::Solve | StudyKind::Adapt => {}
    }
    Ok(cfg)
}

/// Canonical text of a parsed config, defaults included.
pub fn to_config_text(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config values are always representable")
}

impl RunConfig {
    pub fn material_table(&self) -> Result<MaterialTable> {
        let m = &self.materials;
        MaterialTable::new(
            m.nu,
            m.young
                .iter()
                .zip(&m.density)
                .enumerate()
                .map(|(id, (&young, &density))| (id as u32, Material { young, density })),
        )
    }

    pub fn side_tags(&self) -> SideTags {
        let tag = |s| {
            if self.domain.dirichlet.contains(&s) {
                BoundaryTag::Dirichlet
            } else {
                BoundaryTag::Neumann
            }
        };
        SideTags {
            bottom: tag(Side::Bottom),
            right: tag(Side::Right),
            top: tag(Side::Top),
            left: tag(Side::Left),
        }
    }

    pub fn square(&self) -> Result<SquareSetup> {
        let split = match (self.domain.split, self.domain.split_at) {
            (Some(axis), Some(at)) => Some(MaterialSplit {
                axis,
                at,
                first: 0,
                second: 1,
            }),
            _ => None,
        };
        Ok(SquareSetup {
            sides: self.side_tags(),
            split,
            materials: self.material_table()?,
        })
    }

    pub fn discretization(&self) -> Result<Discretization> {
        let d = &self.discretization;
        Ok(Discretization::new(d.k, d.a, IpVariant::from_epsilon(d.epsilon)?))
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.solver;
        SolverOptions {
            backend: s.backend,
            shift: s.shift,
            tol: s.tol,
            modes: s.modes,
            seed: s.seed,
            max_subspace: s.max_subspace,
        }
    }

    pub fn adapt_options(&self) -> AdaptOptions {
        AdaptOptions {
            iterations: self.study.iterations,
            theta: self.study.theta,
            mode: self.study.mode - 1,
            references: self.study.references.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[study]
type = \"solve\"

[domain]
n = 8

[materials]
nu = 0.35
young = [1.0]
";

    fn line_and_msg(text: &str) -> (usize, String) {
        match parse_config(text).unwrap_err() {
            Error::Parse { line, msg } => (line, msg),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.discretization.a, 10.0);
        assert_eq!(cfg.discretization.k, 1);
        assert_eq!(cfg.discretization.epsilon, 1);
        assert_eq!(cfg.study.theta, 0.5);
        assert_eq!(cfg.solver.tol, 1e-8);
        assert_eq!(cfg.solver.backend, Backend::Auto);
        assert_eq!(cfg.materials.density, vec![1.0]);
        assert_eq!(cfg.domain.dirichlet, vec![Side::Bottom]);
        assert_eq!(cfg.side_tags(), SideTags::bottom_clamped());
        assert_eq!(cfg.study.output, "out");
    }

    #[test]
    fn poisson_ratio_above_half_cites_the_bound() {
        let (line, msg) = line_and_msg(&MINIMAL.replace("0.35", "0.6"));
        assert_eq!(line, 9);
        assert!(msg.contains("(0, 0.5]"), "{msg}");
    }

    #[test]
    fn unknown_key_is_reported_on_its_line() {
        let (line, msg) = line_and_msg(&MINIMAL.replace("n = 8", "n = 8\nsize = 3"));
        assert_eq!(line, 7);
        assert!(msg.contains("size"), "{msg}");
    }

    #[test]
    fn type_mismatch_is_reported_on_its_line() {
        let (line, _) = line_and_msg(&MINIMAL.replace("n = 8", "n = \"eight\""));
        assert_eq!(line, 6);
    }

    #[test]
    fn missing_required_key_is_reported() {
        let (_, msg) = line_and_msg(&MINIMAL.replace("young = [1.0]\n", ""));
        assert!(msg.contains("young"), "{msg}");
        let (line, msg) = line_and_msg(&MINIMAL.replace("n = 8", "dirichlet = [\"left\"]"));
        assert_eq!(line, 5);
        assert!(msg.contains("n or mesh"), "{msg}");
    }

    #[test]
    fn invalid_degree_and_epsilon_are_rejected() {
        let (line, msg) = line_and_msg(&format!("{MINIMAL}\n[discretization]\nk = 4\n"));
        assert_eq!(line, 13);
        assert!(msg.contains("1, 2 or 3"));
        let (line, _) = line_and_msg(&format!("{MINIMAL}\n[discretization]\nepsilon = 2\n"));
        assert_eq!(line, 13);
    }

    #[test]
    fn study_requirements_are_enforced() {
        let sweep = MINIMAL.replace("\"solve\"", "\"sweep\"");
        assert!(line_and_msg(&sweep).1.contains("k_list"));
        let robust = MINIMAL.replace("\"solve\"", "\"robust\"\nlevels = [3, 5, 9, 17]");
        assert!(line_and_msg(&robust).1.contains("young_list"));
        let uniform = MINIMAL.replace("\"solve\"", "\"uniform\"\nlevels = [8, 4]");
        assert!(line_and_msg(&uniform).1.contains("increasing"));
    }

    #[test]
    fn split_needs_two_materials() {
        let text = MINIMAL.replace("n = 8", "n = 8\nsplit = \"horizontal\"\nsplit_at = 0.5");
        assert!(line_and_msg(&text).1.contains("two Young moduli"));
        let ok = text.replace("young = [1.0]", "young = [1.0, 2.0]");
        let setup = parse_config(&ok).unwrap().square().unwrap();
        assert_eq!(setup.split.unwrap().axis, SplitAxis::Horizontal);
    }

    #[test]
    fn normalization_is_idempotent() {
        let full = "
[study]
type = \"robust\"
levels = [3, 5, 9, 17]
young_list = [10.0, 100.0]
reference_per_young = 0.46355423498481496

[domain]
n = 4
dirichlet = [\"top\", \"bottom\", \"top\"]

[materials]
nu = 0.5
young = [1.0]
density = [2.0]

[solver]
backend = \"shift_invert\"
shift = -0.125
seed = 7
";
        for text in [MINIMAL, full] {
            let cfg = parse_config(text).unwrap();
            let canonical = to_config_text(&cfg);
            let again = parse_config(&canonical).unwrap();
            assert_eq!(again, cfg);
            assert_eq!(to_config_text(&again), canonical);
        }
    }
}
