//! Minimal tour: bands at the Dirac point, the Chern number three ways,
//! the localization dichotomy, and the real-space marker.
//!
//! ```sh
//! cargo run --release -p chernlab --example quickstart
//! ```

use chernlab::frames::build_pt_frame;
use chernlab::lattice::{build_geometry, dirac_points, kgrid};
use chernlab::model::{assemble_flake, bands, BoundaryCondition, HaldaneParams};
use chernlab::numerics::eigh_dense;
use chernlab::realspace::{chern_marker, fermi_from_spectrum, projection_from_eig};
use chernlab::topology::{chern_curvature, chern_fhs};
use chernlab::wannier::{dichotomy_scan, wannier_from_frame};

fn main() -> chernlab::Result<()> {
    let g = build_geometry(1.0)?;
    let p = HaldaneParams::chern_reference(); // t1 = 1, t2 = 1/4, φ = π/2, M = 0

    let (k, _) = dirac_points(&g);
    let dirac = bands(&p, &k);
    println!("bands at K: ({:+.4}, {:+.4})", dirac.e_minus, dirac.e_plus);

    let fhs = chern_fhs(&p, &kgrid(&g, 24, 24)?)?;
    let quad = chern_curvature(&p, &kgrid(&g, 96, 96)?)?;
    let frame = build_pt_frame(&p, &kgrid(&g, 48, 48)?)?;
    println!(
        "c1: link variables {} | curvature quadrature {:+.6} | transport obstruction {}",
        fhs.c1, quad.raw, frame.obstruction
    );

    let w = wannier_from_frame(&frame)?;
    println!("wannier weight in window: {:.6}", w.total_weight());
    let scan = dichotomy_scan(&p, &g, &[24, 48], &[1.0])?;
    println!(
        "⟨x²⟩ growth under grid doubling: ×{:.4} (diverges in a Chern phase)",
        scan.growth_ratios(0)[0]
    );

    let flake = assemble_flake(&g, &p, 12, 12, BoundaryCondition::Open)?;
    let eig = eigh_dense(&flake.hamiltonian)?;
    let (fermi, _) = fermi_from_spectrum(&eig.eigenvalues, 0.0, None)?;
    let proj = projection_from_eig(&eig, fermi)?;
    let marker = chern_marker(&flake, &proj, 0.4 * flake.inradius())?;
    println!(
        "chern marker on a 12×12 open flake: {:+.4} ({} cells in the box)",
        marker.marker, marker.cells_in_box
    );
    Ok(())
}
