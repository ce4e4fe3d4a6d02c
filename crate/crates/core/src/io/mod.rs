//! Configuration files, the mesh text format and CSV output.

mod config;
mod mesh_io;
mod records;

pub use config::{
    parse_config, to_config_text, DiscretizationSection, DomainSection, MaterialsSection, RunConfig, Side,
    SolverSection, StudyKind, StudySection,
};
pub use mesh_io::{load_mesh, read_mesh, save_mesh, write_mesh};
pub use records::{emit_records, emit_sweep, record_header, write_records, write_sweep};
