//! Pyramid meshes of the unit cube, continuous assembly and rate studies.

mod dofs;
mod mesh;
mod poisson;
mod presets;
mod study;

pub use dofs::{GlobalSpace, NodalElement};
pub use mesh::{build_cube_mesh, MeshElement, MeshEntity, PyramidMesh};
pub use poisson::{
    assemble_global, assemble_poisson, assemble_stiffness, element_load, element_stiffness, error_norms, GlobalSystem,
};
pub use presets::{
    coefficient_preset, solution_preset, ManufacturedSolution, ScalarCoefficient, COEFFICIENT_PRESETS,
    SOLUTION_PRESETS,
};
pub use study::{consistency_study, convergence_study, fitted_rate, Rates, StudyResult, StudyRow, CSV_HEADER};
