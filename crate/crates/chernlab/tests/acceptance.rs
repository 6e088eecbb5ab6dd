//! Acceptance suite: one test per release criterion, each printing a
//! pass line with its measured runtime (`--nocapture` to see them).
//!
//! Criteria 1–9 live here; criterion 10 (byte-identical self-check
//! reports) exercises the CLI binary and lives in the CLI crate's
//! acceptance test.

use chernlab::frames::build_pt_frame;
use chernlab::lattice::{build_geometry, dirac_points, kgrid, HoneycombGeometry, KPoint};
use chernlab::model::{
    assemble_flake, bands, fiber, gap_zero_in_m, BoundaryCondition, HaldaneParams,
};
use chernlab::numerics::eigh_dense;
use chernlab::realspace::{
    candidate_gwb, chern_marker, fermi_from_spectrum, gwb_audit, marker_scan,
    projection_from_eig, LocalizationFn, DELONE_BIG_R_FACTOR, DELONE_R_FACTOR,
};
use chernlab::topology::{chern_curvature, chern_fhs, loop_berry_phase, sobolev_h1_grid};
use chernlab::util::SplitMix64;
use chernlab::wannier::{decay_fit, dichotomy_scan, wannier_from_frame};
use std::f64::consts::PI;
use std::time::Instant;

fn geometry() -> HoneycombGeometry {
    build_geometry(1.0).unwrap()
}

fn params(phi: f64, m: f64) -> HaldaneParams {
    HaldaneParams::new(1.0, 0.25, phi, m).unwrap()
}

/// The four canonical parameter sets and their Chern numbers.
fn canonical() -> [(&'static str, HaldaneParams, i64); 4] {
    [
        ("cyan", params(PI / 2.0, 0.0), -1),
        ("orange", params(-PI / 2.0, 0.0), 1),
        ("trivial ", params(0.0, 1.0), 0),
        ("trivial+", params(PI / 2.0, 2.0 * 3.0 * 3.0_f64.sqrt() * 0.25), 0),
    ]
}

#[test]
fn criterion_01_phase_diagram_fidelity() {
    let start = Instant::now();
    let g = geometry();
    let grid = kgrid(&g, 24, 24).unwrap();
    for (name, p, expect) in canonical() {
        let t0 = Instant::now();
        let res = chern_fhs(&p, &grid).unwrap();
        let dt = t0.elapsed();
        assert_eq!(res.c1, expect, "{name}: c1 = {} ≠ {expect}", res.c1);
        assert!(dt.as_secs_f64() < 1.0, "{name}: {dt:.2?} per point exceeds 1 s");
    }
    println!(
        "ACCEPTANCE 1 PASS ({:.2?}): chern_fhs 24×24 integer-exact on all four canonical points",
        start.elapsed()
    );
}

#[test]
fn criterion_02_boundary_formula_bisection() {
    let start = Instant::now();
    let g = geometry();
    for phi in [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
        let expect = 3.0 * 3.0_f64.sqrt() * 0.25 * phi.sin();
        let found = gap_zero_in_m(&g, 1.0, 0.25, phi, (0.25 * expect, expect + 1.0), 24).unwrap();
        assert!(
            (found - expect).abs() < 1e-6,
            "φ = {phi}: located {found}, formula {expect}"
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0);
    println!("ACCEPTANCE 2 PASS ({dt:.2?}): gap zero locus reproduces M = 3√3 t₂ sin φ to 1e-6");
}

#[test]
fn criterion_03_cross_method_chern_agreement() {
    let start = Instant::now();
    let g = geometry();
    let coarse = kgrid(&g, 24, 24).unwrap();
    let fine = kgrid(&g, 192, 192).unwrap();
    for (name, p, _) in canonical() {
        let fhs = chern_fhs(&p, &coarse).unwrap();
        let quad = chern_curvature(&p, &fine).unwrap();
        let gap = (quad.raw - fhs.c1 as f64).abs();
        assert!(gap < 1e-3, "{name}: |quadrature − integer| = {gap:.2e}");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0);
    println!("ACCEPTANCE 3 PASS ({dt:.2?}): curvature quadrature (192²) within 1e-3 of FHS integers");
}

#[test]
fn criterion_04_stokes_loop_identity() {
    let start = Instant::now();
    let g = geometry();
    let (k, _) = dirac_points(&g);
    // Chern phase: the explicit gauge is singular at K and the loop
    // integral converges to −2π c₁ = +2π.
    let chern_loop = loop_berry_phase(&params(PI / 2.0, 0.0), &g, &k, 0.02, 256).unwrap();
    assert!(
        (chern_loop - 2.0 * PI).abs() < 5e-2,
        "Chern-phase loop {chern_loop} vs 2π"
    );
    // Trivial phase: no singularity, the loop phase vanishes.
    let trivial_loop =
        loop_berry_phase(&HaldaneParams::trivial_reference(), &g, &k, 0.02, 256).unwrap();
    assert!(trivial_loop.abs() < 5e-2, "trivial-phase loop {trivial_loop}");
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0);
    println!("ACCEPTANCE 4 PASS ({dt:.2?}): Stokes loop → +2π (Chern) and → 0 (trivial) within 5e-2");
}

#[test]
fn criterion_05_representation_equivalence() {
    let start = Instant::now();
    let g = geometry();
    for (name, p, _) in [
        ("cyan", params(PI / 2.0, 0.0), -1),
        ("orange", params(-PI / 2.0, 0.0), 1),
        ("trivial", HaldaneParams::trivial_reference(), 0),
    ] {
        let sample = assemble_flake(&g, &p, 6, 6, BoundaryCondition::Periodic).unwrap();
        let eig = eigh_dense(&sample.hamiltonian).unwrap();
        let grid = kgrid(&g, 6, 6).unwrap();
        let mut expected: Vec<f64> = grid
            .points
            .iter()
            .flat_map(|k| {
                let b = bands(&p, k);
                [b.e_minus, b.e_plus]
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        let worst = eig
            .eigenvalues
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-8, "{name}: worst spectral mismatch {worst:.2e}");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0);
    println!("ACCEPTANCE 5 PASS ({dt:.2?}): periodic-flake spectra equal closed-form bands to 1e-8");
}

#[test]
fn criterion_06_localization_dichotomy_signature() {
    let start = Instant::now();
    let g = geometry();
    let s_values = [0.45, 1.0];

    // (a) Trivial phase: exponential localization and converged moments.
    let trivial = HaldaneParams::trivial_reference();
    let frame48 = build_pt_frame(&trivial, &kgrid(&g, 48, 48).unwrap()).unwrap();
    let fit = decay_fit(&wannier_from_frame(&frame48).unwrap()).unwrap();
    assert!(fit.rate > 0.0, "trivial decay rate {}", fit.rate);
    assert!(fit.r2 > 0.99, "trivial exponential fit r² {}", fit.r2);
    let scan_trivial = dichotomy_scan(&trivial, &g, &[48, 96], &s_values).unwrap();
    let ratio = scan_trivial.growth_ratios(1)[0];
    assert!((ratio - 1.0).abs() < 0.02, "trivial ⟨x²⟩ moved {ratio}");

    // (b) Chern phase: ⟨x²⟩ grows every doubling, s = 0.45 stabilizes,
    // the gauge-dependent H¹ grows while H^0.45 settles.
    let chern = params(PI / 2.0, 0.0);
    let scan_chern = dichotomy_scan(&chern, &g, &[24, 48, 96], &s_values).unwrap();
    for (step, r) in scan_chern.growth_ratios(1).iter().enumerate() {
        assert!(*r >= 1.05, "Chern ⟨x²⟩ ratio at doubling {step}: {r}");
    }
    let r045 = scan_chern.growth_ratios(0);
    let last = r045.last().unwrap();
    assert!((last - 1.0).abs() < 0.05, "s = 0.45 moment ratio {last}");
    let h48 = sobolev_h1_grid(&build_pt_frame(&chern, &kgrid(&g, 48, 48).unwrap()).unwrap());
    let h96 = sobolev_h1_grid(&build_pt_frame(&chern, &kgrid(&g, 96, 96).unwrap()).unwrap());
    assert!(h96.h1_state > h48.h1_state + 0.1, "H¹ failed to grow");

    // No mixed outcome on any tested gapped parameter set.
    for (name, p, c1) in canonical() {
        let frame = build_pt_frame(&p, &kgrid(&g, 48, 48).unwrap()).unwrap();
        let fit = decay_fit(&wannier_from_frame(&frame).unwrap()).unwrap();
        let scan = dichotomy_scan(&p, &g, &[48, 96], &s_values).unwrap();
        let grow = scan.growth_ratios(1)[0];
        let exponential = fit.r2 > 0.99 && c1 == 0;
        let divergent = grow >= 1.05 && c1 != 0;
        assert!(
            exponential ^ divergent,
            "{name}: mixed dichotomy outcome (r² = {}, ratio = {grow}, c1 = {c1})",
            fit.r2
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 300.0);
    println!("ACCEPTANCE 6 PASS ({dt:.2?}): localization dichotomy scaling signature on all sets");
}

#[test]
fn criterion_07_chern_marker_calibration() {
    let start = Instant::now();
    let g = geometry();

    // Chern phase, 16×16 open flake, box at 0.4 of the inradius.
    let cyan_marker = single_marker(&g, &params(PI / 2.0, 0.0), 16);
    assert!(
        (cyan_marker + 1.0).abs() < 0.15,
        "16×16 Chern marker {cyan_marker} vs −1"
    );
    // Trivial phase: flat zero.
    let trivial_marker = single_marker(&g, &HaldaneParams::trivial_reference(), 12);
    assert!(trivial_marker.abs() < 0.05, "trivial marker {trivial_marker}");
    // Mirror phase: equal magnitude, opposite sign.
    let orange_marker = single_marker(&g, &params(-PI / 2.0, 0.0), 16);
    assert!(
        (orange_marker.abs() - cyan_marker.abs()).abs() < 0.05,
        "magnitudes diverge: {orange_marker} vs {cyan_marker}"
    );
    assert!(orange_marker > 0.0 && cyan_marker < 0.0, "signs failed to flip");
    // Monotone improvement with flake size at fixed box ratio.
    let scan = marker_scan(&params(PI / 2.0, 0.0), &g, &[10, 14, 18], 0.4).unwrap();
    let errs: Vec<f64> = scan.iter().map(|r| (r.marker + 1.0).abs()).collect();
    assert!(
        errs[1] < errs[0] && errs[2] < errs[1],
        "marker error not monotone: {errs:?}"
    );
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 600.0);
    println!(
        "ACCEPTANCE 7 PASS ({dt:.2?}): open-flake marker within 0.15 of c₁, monotone in size, \
         sign-symmetric"
    );
}

fn single_marker(g: &HoneycombGeometry, p: &HaldaneParams, n: usize) -> f64 {
    let sample = assemble_flake(g, p, n, n, BoundaryCondition::Open).unwrap();
    let eig = eigh_dense(&sample.hamiltonian).unwrap();
    let (fermi, _) = fermi_from_spectrum(&eig.eigenvalues, 0.0, None).unwrap();
    let proj = projection_from_eig(&eig, fermi).unwrap();
    chern_marker(&sample, &proj, 0.4 * sample.inradius()).unwrap().marker
}

#[test]
fn criterion_08_localized_gwb_forces_zero_marker() {
    let start = Instant::now();
    let g = geometry();
    let scale = g.a1.norm();
    let mut runs = Vec::new();
    for (name, p) in [
        ("trivial", HaldaneParams::trivial_reference()),
        ("cyan", params(PI / 2.0, 0.0)),
    ] {
        // GWB audit stability under flake doubling (periodic bulk).
        let mut bounds = Vec::new();
        let mut audit_ok = true;
        for n in [10usize, 20] {
            let sample = assemble_flake(&g, &p, n, n, BoundaryCondition::Periodic).unwrap();
            let eig = eigh_dense(&sample.hamiltonian).unwrap();
            let (fermi, _) = fermi_from_spectrum(&eig.eigenvalues, 0.0, None).unwrap();
            let proj = projection_from_eig(&eig, fermi).unwrap();
            match candidate_gwb(&sample, &proj).and_then(|basis| {
                gwb_audit(
                    &sample,
                    &basis,
                    LocalizationFn::Polynomial { s: 1.0 },
                    DELONE_R_FACTOR * scale,
                    DELONE_BIG_R_FACTOR * scale,
                )
            }) {
                Ok(audit) => bounds.push(audit.m_bound),
                Err(_) => {
                    audit_ok = false;
                    break;
                }
            }
        }
        let stable = audit_ok
            && bounds.len() == 2
            && (bounds[1] - bounds[0]).abs() / bounds[0] < 0.05;
        let marker = single_marker(&g, &p, 12);
        runs.push((name, stable, marker, bounds));
    }
    for (name, stable, marker, bounds) in &runs {
        assert!(
            !(*stable && marker.abs() > 0.5),
            "{name}: stable s=1 GWB audit coexists with |marker| = {} (bounds {bounds:?})",
            marker.abs()
        );
    }
    // The trivial run must actually demonstrate the localized side.
    let trivial = &runs[0];
    assert!(trivial.1, "trivial-phase audit should be stable: {:?}", trivial.3);
    assert!(trivial.2.abs() < 0.5);
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 600.0);
    println!(
        "ACCEPTANCE 8 PASS ({dt:.2?}): no run pairs a stable s=1 GWB audit with |marker| > 0.5 \
         (trivial m_bounds {:?}, Chern m_bounds {:?})",
        runs[0].3, runs[1].3
    );
}

#[test]
fn criterion_09_symmetry_suite() {
    let start = Instant::now();
    let g = geometry();
    let mut rng = SplitMix64::new(20260808);

    // TRS at φ ∈ {0, π}: fiber(−k) equals the entrywise conjugate.
    for phi in [0.0, PI] {
        let p = params(phi, 0.35);
        for _ in 0..50 {
            let (f1, f2) = (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            let f = fiber(&p, &KPoint::from_frac(&g, f1, f2));
            let fm = fiber(&p, &KPoint::from_frac(&g, -f1, -f2));
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (fm.entry(i, j) - f.entry(i, j).conj()).norm() < 1e-13,
                        "TRS violated at φ = {phi}"
                    );
                }
            }
        }
    }
    // 2π/3 rotation invariance of the bands.
    let p = params(PI / 2.0, 0.0);
    for _ in 0..100 {
        let (f1, f2) = (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
        let b = bands(&p, &KPoint::from_frac(&g, f1, f2));
        let br = bands(&p, &KPoint::from_frac(&g, -f1 - f2, f1));
        assert!((b.e_minus - br.e_minus).abs() < 1e-12);
        assert!((b.e_plus - br.e_plus).abs() < 1e-12);
    }
    // c1(φ) = −c1(−φ).
    let grid = kgrid(&g, 24, 24).unwrap();
    let c_plus = chern_fhs(&params(PI / 2.0, 0.4), &grid).unwrap().c1;
    let c_minus = chern_fhs(&params(-PI / 2.0, 0.4), &grid).unwrap().c1;
    assert_eq!(c_plus, -c_minus);
    // Marker sign flip between the two Chern phases.
    let m_cyan = single_marker(&g, &params(PI / 2.0, 0.0), 10);
    let m_orange = single_marker(&g, &params(-PI / 2.0, 0.0), 10);
    assert!(m_cyan < -0.3 && m_orange > 0.3, "markers {m_cyan} / {m_orange}");
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0);
    println!("ACCEPTANCE 9 PASS ({dt:.2?}): TRS, rotation, φ-antisymmetry, marker sign flip");
}
