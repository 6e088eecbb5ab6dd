//! Berry curvature, Chern numbers, Stokes loops, phase diagrams, and
//! discrete Sobolev diagnostics.
//!
//! Three independent routes to the Chern number are kept deliberately
//! separate so they can be played against each other:
//!
//! 1. [`chern_fhs`] — Fukui–Hatsugai–Suzuki link variables. Plaquette
//!    field strengths are principal arguments of Wilson-loop products,
//!    so the total is an exact integer on any gapped grid and fully
//!    gauge invariant;
//! 2. [`chern_curvature`] — midpoint quadrature of the Berry curvature
//!    F = −i Tr(P [∂₁P, ∂₂P]) evaluated by central finite differences
//!    of the spectral projector;
//! 3. the parallel-transport obstruction recorded by
//!    [`crate::frames::build_pt_frame`].
//!
//! [`loop_berry_phase`] checks the Stokes identity: the Berry phase of a
//! small loop around the explicit gauge's singular point converges to
//! −2π·c₁.

use crate::error::{Error, Result};
use crate::frames::{bloch_state_explicit, projector, BlochFrame};
use crate::lattice::{HoneycombGeometry, KGrid, KPoint};
use crate::model::{phase_classify, HaldaneParams, PhaseRegion};
use crate::numerics::C64;
use crate::util::par_map_indexed;

/// Which route produced a Chern estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChernMethod {
    Fhs,
    CurvatureIntegral,
    PtObstruction,
}

/// An integer Chern number with its pre-rounding estimate.
#[derive(Debug, Clone, Copy)]
pub struct ChernResult {
    pub c1: i64,
    pub raw: f64,
    pub method: ChernMethod,
    pub grid: (usize, usize),
}

fn resolve_integer(raw: f64, method: ChernMethod, grid: (usize, usize)) -> Result<ChernResult> {
    let c1 = raw.round();
    if (raw - c1).abs() >= 0.5 || !raw.is_finite() {
        return Err(Error::UnresolvedInteger { raw });
    }
    Ok(ChernResult { c1: c1 as i64, raw, method, grid })
}

/// Berry curvature (Cartesian density) at one k-point.
///
/// Central finite differences of the projector with fractional step `h`
/// (0 < h ≤ 1e-3), converted through the reciprocal-basis Jacobian:
/// F = −i Tr(P [∂_{f1}P, ∂_{f2}P]) / det[b₁ b₂]. The trace is purely
/// imaginary up to roundoff; anything above 1e-10 of real residue is a
/// bug and reported as non-convergence.
pub fn berry_curvature(p: &HaldaneParams, g: &HoneycombGeometry, k: &KPoint, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidInput(format!("curvature step h = {h} outside (0, 1e-3]")));
    }
    let (f1, f2) = k.frac;
    let at = |a: f64, b: f64| -> Result<[[C64; 2]; 2]> {
        Ok(*projector(p, &KPoint::from_frac(g, a, b))?.p.entries())
    };
    let p0 = at(f1, f2)?;
    let d1 = diff(&at(f1 + h, f2)?, &at(f1 - h, f2)?, 2.0 * h);
    let d2 = diff(&at(f1, f2 + h)?, &at(f1, f2 - h)?, 2.0 * h);
    // Tr(P [D1, D2]).
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            let mut comm = C64::new(0.0, 0.0);
            for l in 0..2 {
                comm += d1[j][l] * d2[l][i] - d2[j][l] * d1[l][i];
            }
            tr += p0[i][j] * comm;
        }
    }
    let value = -(C64::new(0.0, 1.0) * tr);
    if value.im.abs() > 1e-10 * (1.0 + value.re.abs()) {
        return Err(Error::NoConvergence { achieved: value.im.abs(), tolerance: 1e-10 });
    }
    let det = g.b1.cross(g.b2);
    Ok(value.re / det)
}

fn diff(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2], denom: f64) -> [[C64; 2]; 2] {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (a[i][j] - b[i][j]) / denom;
        }
    }
    out
}

/// Berry curvature sampled at plaquette midpoints, each entry already
/// multiplied by the Cartesian plaquette area (so the map sums to 2π·c₁).
#[derive(Debug, Clone)]
pub struct CurvatureMap {
    pub grid: KGrid,
    pub values: Vec<f64>,
}

impl CurvatureMap {
    pub fn total_over_two_pi(&self) -> f64 {
        self.values.iter().sum::<f64>() / (2.0 * std::f64::consts::PI)
    }
}

pub const CURVATURE_STEP: f64 = 1e-4;

/// Sample the Berry curvature over a grid's plaquette midpoints.
pub fn curvature_map(p: &HaldaneParams, grid: &KGrid) -> Result<CurvatureMap> {
    let g = &grid.geometry;
    let (n1, n2) = (grid.n1, grid.n2);
    let plaq_area = g.b1.cross(g.b2).abs() / (n1 * n2) as f64;
    let mut values = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let k = KPoint::from_frac(
                g,
                (i as f64 + 0.5) / n1 as f64,
                (j as f64 + 0.5) / n2 as f64,
            );
            values.push(berry_curvature(p, g, &k, CURVATURE_STEP)? * plaq_area);
        }
    }
    Ok(CurvatureMap { grid: grid.clone(), values })
}

/// Chern number by quadrature of the Berry curvature.
pub fn chern_curvature(p: &HaldaneParams, grid: &KGrid) -> Result<ChernResult> {
    let map = curvature_map(p, grid)?;
    resolve_integer(map.total_over_two_pi(), ChernMethod::CurvatureIntegral, (grid.n1, grid.n2))
}

/// Chern number by Fukui–Hatsugai–Suzuki link variables.
///
/// U_μ(k) = ⟨u(k), u(k+ê_μ)⟩ normalized; the plaquette field strength is
/// the principal argument of U₁U₂U₁⁻¹U₂⁻¹ around each plaquette and
/// c₁ = Σ/2π, integral by construction. Gauge choice per grid point is
/// irrelevant, so the explicit gauge serves even in Chern phases.
pub fn chern_fhs(p: &HaldaneParams, grid: &KGrid) -> Result<ChernResult> {
    let states = explicit_states(p, grid)?;
    chern_fhs_of_states(&states, grid.n1, grid.n2)
        .and_then(|raw| resolve_integer(raw, ChernMethod::Fhs, (grid.n1, grid.n2)))
}

fn explicit_states(p: &HaldaneParams, grid: &KGrid) -> Result<Vec<[C64; 2]>> {
    grid.points
        .iter()
        .map(|k| bloch_state_explicit(p, k).map(|s| s.v))
        .collect()
}

/// Raw FHS sum Σ arg(plaquette)/2π for an arbitrary state field.
pub(crate) fn chern_fhs_of_states(states: &[[C64; 2]], n1: usize, n2: usize) -> Result<f64> {
    let idx = |i: usize, j: usize| (i % n1) * n2 + (j % n2);
    let dot = |a: [C64; 2], b: [C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let mut total = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            let u1 = dot(states[idx(i, j)], states[idx(i + 1, j)]);
            let u2 = dot(states[idx(i + 1, j)], states[idx(i + 1, j + 1)]);
            let u3 = dot(states[idx(i, j + 1)], states[idx(i + 1, j + 1)]);
            let u4 = dot(states[idx(i, j)], states[idx(i, j + 1)]);
            for u in [u1, u2, u3, u4] {
                if u.norm() < 1e-12 {
                    return Err(Error::UnderResolved { overlap: u.norm() });
                }
            }
            // arg(U1 U2 U3⁻¹ U4⁻¹); conjugation inverts the phase, and
            // magnitudes are irrelevant to the argument.
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    Ok(total / (2.0 * std::f64::consts::PI))
}

/// Berry phase accumulated along a small circle (fractional-coordinate
/// radius) in the explicit gauge: Σ arg⟨u(k_i), u(k_{i+1})⟩ over the
/// closed polygon. Each increment is small, so the sum tracks windings
/// beyond mod 2π. Around the gauge's singular Dirac point this converges
/// to −2π·c₁ as the radius shrinks (Stokes); around regular points to 0.
pub fn loop_berry_phase(
    p: &HaldaneParams,
    g: &HoneycombGeometry,
    center: &KPoint,
    radius_frac: f64,
    n_points: usize,
) -> Result<f64> {
    if n_points < 64 {
        return Err(Error::InvalidInput(format!("loop needs ≥ 64 points, got {n_points}")));
    }
    if !radius_frac.is_finite() || radius_frac <= 0.0 {
        return Err(Error::InvalidInput("loop radius must be positive".into()));
    }
    let mut states = Vec::with_capacity(n_points);
    for t in 0..n_points {
        let angle = 2.0 * std::f64::consts::PI * t as f64 / n_points as f64;
        let k = KPoint::from_frac(
            g,
            center.frac.0 + radius_frac * angle.cos(),
            center.frac.1 + radius_frac * angle.sin(),
        );
        states.push(bloch_state_explicit(p, &k)?.v);
    }
    let mut total = 0.0;
    for t in 0..n_points {
        let a = states[t];
        let b = states[(t + 1) % n_points];
        let overlap = a[0].conj() * b[0] + a[1].conj() * b[1];
        if overlap.norm() < 0.5 {
            return Err(Error::UnderResolved { overlap: overlap.norm() });
        }
        total += overlap.arg();
    }
    Ok(total)
}

/// One cell of a phase-diagram scan.
#[derive(Debug, Clone, Copy)]
pub enum PhaseCell {
    /// Sampled parameters sit on (or too close to) a gap closing.
    Gapless,
    Chern(ChernResult),
}

/// Chern numbers over a rectangular (φ, M) sweep, row-major in φ then M.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub phi_values: Vec<f64>,
    pub m_values: Vec<f64>,
    pub cells: Vec<PhaseCell>,
}

impl PhaseDiagram {
    pub fn cell(&self, i_phi: usize, i_m: usize) -> &PhaseCell {
        &self.cells[i_phi * self.m_values.len() + i_m]
    }
}

/// Scan the (φ, M) plane at fixed t₁, t₂. Boundary samples are flagged
/// gapless rather than forced to an integer. Cells are computed in
/// parallel but assembled in fixed row-major order, so the output is
/// identical for any thread count.
pub fn phase_diagram(
    g: &HoneycombGeometry,
    t1: f64,
    t2: f64,
    phi_values: &[f64],
    m_values: &[f64],
    grid_n: usize,
    threads: usize,
) -> Result<PhaseDiagram> {
    let grid = crate::lattice::kgrid(g, grid_n, grid_n)?;
    let tasks: Vec<(f64, f64)> = phi_values
        .iter()
        .flat_map(|&phi| m_values.iter().map(move |&m| (phi, m)))
        .collect();
    let cells: Vec<Result<PhaseCell>> = par_map_indexed(tasks.len(), threads, |t| {
        let (phi, m) = tasks[t];
        let p = HaldaneParams::new(t1, t2, phi, m)?;
        match phase_classify(&p)?.region {
            PhaseRegion::Boundary => Ok(PhaseCell::Gapless),
            _ => match chern_fhs(&p, &grid) {
                Ok(res) => Ok(PhaseCell::Chern(res)),
                // A Dirac point grazing the grid renders the cell gapless.
                Err(Error::GaplessPoint { .. }) | Err(Error::UnderResolved { .. }) => {
                    Ok(PhaseCell::Gapless)
                }
                Err(e) => Err(e),
            },
        }
    });
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram { phi_values: phi_values.to_vec(), m_values: m_values.to_vec(), cells })
}

/// Discrete Sobolev diagnostics of a Bloch frame.
///
/// All entries are squared-norm quadratures under the normalized measure
/// (1/N)Σ_k: `l2` is Σ‖u‖²/N (1 for a normalized frame), the H¹ values
/// add the forward-difference gradient energy in Cartesian k-coordinates.
/// `h1_state` differences the states themselves — gauge dependent, and
/// the quantity that diverges logarithmically with grid size in a Chern
/// phase. `h1_projector` differences the spectral projectors instead
/// (gauge invariant, ½‖ΔP‖²_F as the squared gradient) and stays bounded
/// whenever the band is gapped.
#[derive(Debug, Clone, Copy)]
pub struct H1Report {
    pub l2: f64,
    pub h1_state: f64,
    pub h1_projector: f64,
}

pub fn sobolev_h1_grid(frame: &BlochFrame) -> H1Report {
    let g = &frame.grid.geometry;
    let (n1, n2) = (frame.grid.n1, frame.grid.n2);
    // Cartesian gradient from fractional forward differences:
    // (∂x, ∂y) = (Fᵀ)⁻¹(∂f1, ∂f2) with F = [b1 b2] as columns.
    let det = g.b1.cross(g.b2);
    let ginv = [
        [g.b2.y / det, -g.b1.y / det],
        [-g.b2.x / det, g.b1.x / det],
    ];
    let mut l2 = 0.0;
    let mut grad_state = 0.0;
    let mut grad_proj = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            let u = frame.state(i, j);
            let u1 = frame.state((i + 1) % n1, j);
            let u2 = frame.state(i, (j + 1) % n2);
            l2 += u[0].norm_sqr() + u[1].norm_sqr();
            let d1 = [(u1[0] - u[0]) * n1 as f64, (u1[1] - u[1]) * n1 as f64];
            let d2 = [(u2[0] - u[0]) * n2 as f64, (u2[1] - u[1]) * n2 as f64];
            for row in ginv {
                let gx = [row[0] * d1[0] + row[1] * d2[0], row[0] * d1[1] + row[1] * d2[1]];
                grad_state += gx[0].norm_sqr() + gx[1].norm_sqr();
            }
            // Projector gradient: same chain rule on ΔP, with ½‖·‖²_F.
            let pp = outer(u);
            let pp1 = outer(u1);
            let pp2 = outer(u2);
            for row in ginv {
                let mut gsq = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        let e1 = (pp1[a][b] - pp[a][b]) * n1 as f64;
                        let e2 = (pp2[a][b] - pp[a][b]) * n2 as f64;
                        gsq += (row[0] * e1 + row[1] * e2).norm_sqr();
                    }
                }
                grad_proj += 0.5 * gsq;
            }
        }
    }
    let norm = 1.0 / (n1 * n2) as f64;
    H1Report {
        l2: l2 * norm,
        h1_state: (l2 + grad_state) * norm,
        h1_projector: (l2 + grad_proj) * norm,
    }
}

fn outer(u: [C64; 2]) -> [[C64; 2]; 2] {
    [
        [u[0] * u[0].conj(), u[0] * u[1].conj()],
        [u[1] * u[0].conj(), u[1] * u[1].conj()],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::build_pt_frame;
    use crate::lattice::{build_geometry, dirac_points, kgrid};
    use crate::util::SplitMix64;
    use std::f64::consts::PI;

    fn geometry() -> HoneycombGeometry {
        build_geometry(1.0).unwrap()
    }

    fn reference(phi: f64, m: f64) -> HaldaneParams {
        HaldaneParams::new(1.0, 0.25, phi, m).unwrap()
    }

    #[test]
    fn curvature_trivial_phase_small_and_richardson_stable() {
        let g = geometry();
        let p = HaldaneParams::trivial_reference();
        let k = KPoint::from_frac(&g, 0.1, 0.05);
        let v1 = berry_curvature(&p, &g, &k, 1e-4).unwrap();
        let v2 = berry_curvature(&p, &g, &k, 5e-5).unwrap();
        assert!(v1.abs() < 0.05, "curvature {v1} not small far from Dirac points");
        assert!((v2 - v1).abs() < 0.1 * v1.abs().max(1e-8), "Richardson drift {v1} → {v2}");
        assert!(berry_curvature(&p, &g, &k, 2e-3).is_err());
    }

    #[test]
    fn curvature_trs_odd_symmetry() {
        let g = geometry();
        let p = reference(0.0, 0.7);
        let mut rng = SplitMix64::new(21);
        for _ in 0..20 {
            let (f1, f2) = (rng.range(-0.5, 0.5), rng.range(-0.5, 0.5));
            let plus = berry_curvature(&p, &g, &KPoint::from_frac(&g, f1, f2), 1e-4).unwrap();
            let minus = berry_curvature(&p, &g, &KPoint::from_frac(&g, -f1, -f2), 1e-4).unwrap();
            assert!((plus + minus).abs() < 1e-9, "F(k) + F(-k) = {}", plus + minus);
        }
    }

    #[test]
    fn fhs_canonical_parameter_points() {
        let g = geometry();
        let grid = kgrid(&g, 24, 24).unwrap();
        let cases = [
            (PI / 2.0, 0.0, -1),
            (-PI / 2.0, 0.0, 1),
            (0.0, 1.0, 0),
            (PI / 2.0, 2.0 * 3.0 * 3.0_f64.sqrt() * 0.25, 0),
        ];
        for (phi, m, expect) in cases {
            let res = chern_fhs(&reference(phi, m), &grid).unwrap();
            assert_eq!(res.c1, expect, "φ={phi}, M={m}");
            assert!((res.raw - expect as f64).abs() < 1e-10, "raw {}", res.raw);
        }
    }

    #[test]
    fn fhs_gauge_invariance_under_random_phase_fields() {
        let g = geometry();
        let grid = kgrid(&g, 24, 24).unwrap();
        let p = HaldaneParams::chern_reference();
        let base = explicit_states(&p, &grid).unwrap();
        let raw0 = chern_fhs_of_states(&base, 24, 24).unwrap();
        let mut rng = SplitMix64::new(1234);
        for _ in 0..20 {
            let rotated: Vec<[C64; 2]> = base
                .iter()
                .map(|s| {
                    let ph = C64::from_polar(1.0, rng.range(-PI, PI));
                    [s[0] * ph, s[1] * ph]
                })
                .collect();
            let raw = chern_fhs_of_states(&rotated, 24, 24).unwrap();
            assert!((raw - raw0).abs() < 1e-10, "gauge dependence {raw} vs {raw0}");
        }
    }

    #[test]
    fn fhs_chern_antisymmetric_in_phi() {
        let g = geometry();
        let grid = kgrid(&g, 24, 24).unwrap();
        let mut rng = SplitMix64::new(55);
        let mut tested = 0;
        while tested < 3 {
            let phi = rng.range(0.2, PI - 0.2);
            let m = rng.range(-0.6, 0.6);
            let p_plus = reference(phi, m);
            let p_minus = reference(-phi, m);
            if phase_classify(&p_plus).unwrap().region == PhaseRegion::Boundary {
                continue;
            }
            let c_plus = chern_fhs(&p_plus, &grid).unwrap().c1;
            let c_minus = chern_fhs(&p_minus, &grid).unwrap().c1;
            assert_eq!(c_plus, -c_minus, "φ={phi}, M={m}");
            tested += 1;
        }
    }

    #[test]
    fn fhs_total_jumps_across_phase_boundary() {
        // Sweeping M through the K' closing at φ = π/2 changes the total
        // plaquette field strength by exactly one quantum of 2π.
        let g = geometry();
        let grid = kgrid(&g, 24, 24).unwrap();
        let inside = chern_fhs(&reference(PI / 2.0, 1.0), &grid).unwrap();
        let outside = chern_fhs(&reference(PI / 2.0, 1.6), &grid).unwrap();
        assert_eq!(inside.c1, -1);
        assert_eq!(outside.c1, 0);
    }

    #[test]
    fn curvature_integral_matches_fhs() {
        let g = geometry();
        let coarse = kgrid(&g, 24, 24).unwrap();
        let fine = kgrid(&g, 96, 96).unwrap();
        for (phi, m) in [(PI / 2.0, 0.0), (0.0, -3.0 * 3.0_f64.sqrt())] {
            let p = reference(phi, m);
            let quad = chern_curvature(&p, &fine).unwrap();
            let fhs = chern_fhs(&p, &coarse).unwrap();
            assert_eq!(quad.c1, fhs.c1);
            assert!(
                (quad.raw - fhs.c1 as f64).abs() < 1e-3,
                "quadrature raw {} vs integer {}",
                quad.raw,
                fhs.c1
            );
        }
    }

    #[test]
    fn curvature_map_total_is_near_integer_at_96() {
        let g = geometry();
        let grid = kgrid(&g, 96, 96).unwrap();
        let map = curvature_map(&HaldaneParams::chern_reference(), &grid).unwrap();
        let total = map.total_over_two_pi();
        assert!((total - total.round()).abs() < 1e-6, "total {total}");
    }

    #[test]
    fn stokes_loop_around_singular_dirac_point() {
        let g = geometry();
        let p = HaldaneParams::chern_reference();
        let (k, _) = dirac_points(&g);
        // c1 = −1, so the loop phase converges to −2π·c1 = +2π.
        let phase = loop_berry_phase(&p, &g, &k, 0.02, 256).unwrap();
        assert!((phase - 2.0 * PI).abs() < 5e-2, "loop phase {phase}");
        // Shrinking the loop tightens the limit.
        let tighter = loop_berry_phase(&p, &g, &k, 0.01, 256).unwrap();
        assert!((tighter - 2.0 * PI).abs() < (phase - 2.0 * PI).abs() + 1e-3);
    }

    #[test]
    fn stokes_loop_regular_points_vanish() {
        let g = geometry();
        let (k, _) = dirac_points(&g);
        // Trivial phase: the gauge is analytic everywhere, including K.
        let trivial = HaldaneParams::trivial_reference();
        let phase = loop_berry_phase(&trivial, &g, &k, 0.02, 256).unwrap();
        assert!(phase.abs() < 5e-2, "trivial-phase loop {phase}");
        // Chern phase, but a loop around Γ encloses no singularity.
        let p = HaldaneParams::chern_reference();
        let gamma = KPoint::from_frac(&g, 0.0, 0.0);
        let phase = loop_berry_phase(&p, &g, &gamma, 0.02, 256).unwrap();
        assert!(phase.abs() < 5e-2, "Γ loop {phase}");
        assert!(loop_berry_phase(&p, &g, &gamma, 0.02, 32).is_err());
    }

    #[test]
    fn pt_obstruction_agrees_with_fhs() {
        let g = geometry();
        let grid = kgrid(&g, 48, 48).unwrap();
        for p in [
            HaldaneParams::chern_reference(),
            reference(-PI / 2.0, 0.0),
            HaldaneParams::trivial_reference(),
        ] {
            let frame = build_pt_frame(&p, &grid).unwrap();
            let fhs = chern_fhs(&p, &grid).unwrap();
            assert_eq!(frame.obstruction, fhs.c1, "φ = {}", p.phi);
        }
    }

    #[test]
    fn phase_diagram_matches_mass_sign_rule() {
        let g = geometry();
        let phis: Vec<f64> = (0..13).map(|i| -2.8 + 5.6 * i as f64 / 12.0).collect();
        let ms: Vec<f64> = (0..11).map(|j| -2.2 + 4.4 * j as f64 / 10.0).collect();
        let diagram = phase_diagram(&g, 1.0, 0.25, &phis, &ms, 24, 2).unwrap();
        let boundary_dist = |phi: f64, m: f64| {
            (m.abs() - (3.0 * 3.0_f64.sqrt() * 0.25 * phi.sin()).abs()).abs()
        };
        for (i, &phi) in phis.iter().enumerate() {
            for (j, &m) in ms.iter().enumerate() {
                match diagram.cell(i, j) {
                    PhaseCell::Gapless => {
                        assert!(boundary_dist(phi, m) < 0.05, "spurious gapless at ({phi}, {m})");
                    }
                    PhaseCell::Chern(res) => {
                        let expect = phase_classify(&reference(phi, m))
                            .unwrap()
                            .expected_c1()
                            .expect("non-boundary cell");
                        assert_eq!(res.c1, expect, "cell ({phi}, {m})");
                    }
                }
            }
        }
        // M ↦ −M swaps and negates the two Dirac masses, which maps each
        // region onto itself: the diagram is mirror-symmetric about the
        // φ axis with unchanged labels (the M samples are symmetric).
        for i in 0..phis.len() {
            for j in 0..ms.len() {
                let j_flip = ms.len() - 1 - j;
                if let (PhaseCell::Chern(a), PhaseCell::Chern(b)) =
                    (diagram.cell(i, j), diagram.cell(i, j_flip))
                {
                    assert_eq!(a.c1, b.c1);
                }
            }
        }
        // |M| > 3√3 t2 is trivial for every sampled φ.
        for (j, &m) in ms.iter().enumerate() {
            if m.abs() <= 3.0 * 3.0_f64.sqrt() * 0.25 {
                continue;
            }
            for (i, phi) in phis.iter().enumerate() {
                if let PhaseCell::Chern(res) = diagram.cell(i, j) {
                    assert_eq!(res.c1, 0, "({phi}, {m})");
                }
            }
        }
    }

    #[test]
    fn sobolev_trivial_phase_converges() {
        let g = geometry();
        let p = HaldaneParams::trivial_reference();
        let h48 = sobolev_h1_grid(&build_pt_frame(&p, &kgrid(&g, 48, 48).unwrap()).unwrap());
        let h96 = sobolev_h1_grid(&build_pt_frame(&p, &kgrid(&g, 96, 96).unwrap()).unwrap());
        assert!((h48.l2 - 1.0).abs() < 1e-12);
        assert!((h96.l2 - 1.0).abs() < 1e-12);
        let rel = (h96.h1_state - h48.h1_state).abs() / h48.h1_state;
        assert!(rel < 0.02, "trivial-phase H¹ moved by {rel}");
    }

    #[test]
    fn sobolev_chern_phase_state_norm_diverges_projector_norm_does_not() {
        let g = geometry();
        let p = HaldaneParams::chern_reference();
        let h48 = sobolev_h1_grid(&build_pt_frame(&p, &kgrid(&g, 48, 48).unwrap()).unwrap());
        let h96 = sobolev_h1_grid(&build_pt_frame(&p, &kgrid(&g, 96, 96).unwrap()).unwrap());
        assert!(
            h96.h1_state - h48.h1_state >= 0.2,
            "expected log divergence, got {} → {}",
            h48.h1_state,
            h96.h1_state
        );
        let rel = (h96.h1_projector - h48.h1_projector).abs() / h48.h1_projector;
        assert!(rel < 0.05, "projector H¹ should stay bounded, moved {rel}");
    }
}
