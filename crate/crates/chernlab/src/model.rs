//! The Haldane Hamiltonian H = H_NN + H_NNN + V in both representations.
//!
//! k-space: with the cell {0, d₃} the Bloch fiber is H(k) = Σ_j R_j(k) σ_j,
//!
//! ```text
//! R₀(k) = 2 t₂ cos φ Σ_j cos(k·a_j)
//! R₁(k) = t₁ (1 + cos(k·a₁) + cos(k·a₂))
//! R₂(k) = t₁ (sin(k·a₁) − sin(k·a₂))
//! R₃(k) = M − 2 t₂ sin φ Σ_j sin(k·a_j)
//! ```
//!
//! so bands are E_±(k) = R₀ ± √(R₃² + |R|²) with R = R₁ + iR₂
//! = t₁(1 + e^{ik·a₁} + e^{−ik·a₂}).
//!
//! Real space: on finite flakes sites hop with amplitude t₁ across any
//! ±d_j, with amplitude t₂ cos φ ± i t₂ sin φ (sign set by the sublattice)
//! across any ±a_j, and carry on-site energy ±M. The decisive consistency
//! check is spectral: a periodic n₁×n₂ flake must reproduce the closed-form
//! bands over the n₁×n₂ fractional k-grid exactly.

use crate::error::{Error, Result};
use crate::lattice::{HoneycombGeometry, KGrid, KPoint, SiteIndex, Sublattice};
use crate::numerics::{C64, Hermitian2, HermitianDense};

/// Physical knobs of the model: NN hopping t₁ (energy unit), NNN hopping
/// t₂, flux phase φ ∈ (−π, π], staggered on-site energy M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaldaneParams {
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
    pub m: f64,
}

impl HaldaneParams {
    /// Wraps φ into (−π, π].
    pub fn new(t1: f64, t2: f64, phi: f64, m: f64) -> Result<Self> {
        for (v, name) in [(t1, "t1"), (t2, "t2"), (phi, "phi"), (m, "M")] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite")));
            }
        }
        let tau = 2.0 * std::f64::consts::PI;
        let mut w = phi % tau;
        if w > std::f64::consts::PI {
            w -= tau;
        } else if w <= -std::f64::consts::PI {
            w += tau;
        }
        Ok(HaldaneParams { t1, t2, phi: w, m })
    }

    /// The regime plotted throughout: t₁ = 1, t₂ = ¼, φ = π/2, M = 0.
    pub fn chern_reference() -> Self {
        HaldaneParams::new(1.0, 0.25, std::f64::consts::FRAC_PI_2, 0.0).unwrap()
    }

    /// Deep trivial regime: φ = 0, M = −3√3 (analytic Bloch gauge).
    pub fn trivial_reference() -> Self {
        HaldaneParams::new(1.0, 0.25, 0.0, -3.0 * 3.0_f64.sqrt()).unwrap()
    }
}

/// Pauli coefficients of the fiber at one k-point.
#[derive(Debug, Clone, Copy)]
pub struct RVector {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl RVector {
    /// R = R₁ + iR₂.
    pub fn r(&self) -> C64 {
        C64::new(self.r1, self.r2)
    }

    /// √(R₁² + R₂² + R₃²): half the band gap at this k.
    pub fn rho(&self) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3).sqrt()
    }
}

/// Evaluate the four Pauli coefficients at k.
pub fn r_vector(p: &HaldaneParams, k: &KPoint) -> RVector {
    let dots = k.dots_with_a();
    let (sum_cos, sum_sin) = dots
        .iter()
        .fold((0.0, 0.0), |(c, s), &d| (c + d.cos(), s + d.sin()));
    RVector {
        r0: 2.0 * p.t2 * p.phi.cos() * sum_cos,
        r1: p.t1 * (1.0 + dots[0].cos() + dots[1].cos()),
        r2: p.t1 * (dots[0].sin() - dots[1].sin()),
        r3: p.m - 2.0 * p.t2 * p.phi.sin() * sum_sin,
    }
}

/// The 2×2 Bloch fiber H(k) = Σ_j R_j(k) σ_j.
pub fn fiber(p: &HaldaneParams, k: &KPoint) -> Hermitian2 {
    let r = r_vector(p, k);
    Hermitian2::from_pauli([r.r0, r.r1, r.r2, r.r3])
}

/// Band energies at one k-point.
#[derive(Debug, Clone, Copy)]
pub struct BandPair {
    pub e_minus: f64,
    pub e_plus: f64,
}

impl BandPair {
    pub fn gap(&self) -> f64 {
        self.e_plus - self.e_minus
    }
}

/// Closed-form band energies E_±(k) = R₀ ± √(R₃² + |R|²).
pub fn bands(p: &HaldaneParams, k: &KPoint) -> BandPair {
    let r = r_vector(p, k);
    let rho = r.rho();
    BandPair { e_minus: r.r0 - rho, e_plus: r.r0 + rho }
}

/// Minimum direct gap over a k-grid.
pub fn min_gap(p: &HaldaneParams, grid: &KGrid) -> f64 {
    grid.points
        .iter()
        .map(|k| 2.0 * r_vector(p, k).rho())
        .fold(f64::INFINITY, f64::min)
}

/// R₃ at the two Dirac points: (R₃(K), R₃(K′)) = M ± 3√3 t₂ sin φ.
pub fn dirac_masses(p: &HaldaneParams) -> (f64, f64) {
    let shift = 3.0 * 3.0_f64.sqrt() * p.t2 * p.phi.sin();
    (p.m + shift, p.m - shift)
}

/// Gapped regions of the (φ, M) plane, labeled by their Chern number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseRegion {
    /// R₃(K) > 0, R₃(K′) < 0: c₁ = −1.
    Cyan,
    /// R₃(K) < 0, R₃(K′) > 0: c₁ = +1.
    Orange,
    /// Both masses positive: c₁ = 0.
    TrivialUpper,
    /// Both masses negative: c₁ = 0.
    TrivialLower,
    /// A Dirac mass vanishes: gapless, classification refused.
    Boundary,
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseClassification {
    pub r3_k: f64,
    pub r3_kp: f64,
    pub region: PhaseRegion,
}

impl PhaseClassification {
    /// Chern number attached to the region; `None` on the boundary.
    pub fn expected_c1(&self) -> Option<i64> {
        match self.region {
            PhaseRegion::Cyan => Some(-1),
            PhaseRegion::Orange => Some(1),
            PhaseRegion::TrivialUpper | PhaseRegion::TrivialLower => Some(0),
            PhaseRegion::Boundary => None,
        }
    }
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Classify (φ, M) by the signs of the Dirac masses.
pub fn phase_classify(p: &HaldaneParams) -> Result<PhaseClassification> {
    if p.t1 == 0.0 {
        return Err(Error::InvalidInput(
            "phase classification requires t1 ≠ 0 (bands overlap otherwise)".into(),
        ));
    }
    let (r3_k, r3_kp) = dirac_masses(p);
    let region = if r3_k.abs() < BOUNDARY_TOL || r3_kp.abs() < BOUNDARY_TOL {
        PhaseRegion::Boundary
    } else {
        match (r3_k > 0.0, r3_kp > 0.0) {
            (true, false) => PhaseRegion::Cyan,
            (false, true) => PhaseRegion::Orange,
            (true, true) => PhaseRegion::TrivialUpper,
            (false, false) => PhaseRegion::TrivialLower,
        }
    };
    Ok(PhaseClassification { r3_k, r3_kp, region })
}

/// Locate the gap-closing M at fixed φ by bisecting the slope sign of
/// M ↦ min_gap(M); the gap is a V shape with vertex on the zero locus
/// M = 3√3 t₂ sin φ when the grid contains the closing Dirac point
/// (choose 3 | n₁, n₂). min_gap stays a black box throughout.
pub fn gap_zero_in_m(
    g: &HoneycombGeometry,
    t1: f64,
    t2: f64,
    phi: f64,
    m_bracket: (f64, f64),
    grid_n: usize,
) -> Result<f64> {
    let grid = crate::lattice::kgrid(g, grid_n, grid_n)?;
    let gap_at = |m: f64| -> Result<f64> {
        let p = HaldaneParams::new(t1, t2, phi, m)?;
        Ok(min_gap(&p, &grid))
    };
    let slope_step = 1e-7;
    let slope_sign = |m: f64| -> Result<f64> {
        Ok(gap_at(m + slope_step)? - gap_at(m - slope_step)?)
    };
    let (mut lo, mut hi) = m_bracket;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidInput("empty bisection bracket".into()));
    }
    if slope_sign(lo)? >= 0.0 || slope_sign(hi)? <= 0.0 {
        return Err(Error::InvalidInput(
            "bracket does not straddle the gap minimum".into(),
        ));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if slope_sign(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One sample along a k-path: arclength from the path start (Cartesian),
/// fractional coordinates, band energies.
#[derive(Debug, Clone, Copy)]
pub struct KPathPoint {
    pub arclength: f64,
    pub frac: (f64, f64),
    pub bands: BandPair,
}

/// The standard tour Γ → K → M → K′ → Γ (M at fractional (½, 0)),
/// sampled with `samples` points uniform in Cartesian arclength.
/// Returns the samples and the node arclengths for axis ticks.
pub fn standard_k_path(
    g: &HoneycombGeometry,
    p: &HaldaneParams,
    samples: usize,
) -> Result<(Vec<KPathPoint>, Vec<f64>)> {
    if samples < 8 {
        return Err(Error::InvalidInput("need at least 8 path samples".into()));
    }
    let nodes: [(f64, f64); 5] = [
        (0.0, 0.0),
        (-1.0 / 3.0, -1.0 / 3.0),
        (0.5, 0.0),
        (1.0 / 3.0, 1.0 / 3.0),
        (0.0, 0.0),
    ];
    let carts: Vec<KPoint> = nodes.iter().map(|f| KPoint::from_frac(g, f.0, f.1)).collect();
    let mut cumulative = vec![0.0_f64];
    for w in carts.windows(2) {
        let seg = (w[1].cart - w[0].cart).norm();
        cumulative.push(cumulative.last().unwrap() + seg);
    }
    let total = *cumulative.last().unwrap();
    let mut points = Vec::with_capacity(samples);
    for i in 0..samples {
        let target = total * i as f64 / (samples - 1) as f64;
        let seg = cumulative
            .windows(2)
            .position(|w| target <= w[1] + 1e-12)
            .unwrap_or(nodes.len() - 2);
        let (t0, t1) = (cumulative[seg], cumulative[seg + 1]);
        let lam = if t1 > t0 { (target - t0) / (t1 - t0) } else { 0.0 };
        let f1 = nodes[seg].0 + lam * (nodes[seg + 1].0 - nodes[seg].0);
        let f2 = nodes[seg].1 + lam * (nodes[seg + 1].1 - nodes[seg].1);
        let k = KPoint::from_frac(g, f1, f2);
        points.push(KPathPoint { arclength: target, frac: (f1, f2), bands: bands(p, &k) });
    }
    Ok((points, cumulative))
}

/// Boundary condition of a finite flake.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Open,
    Periodic,
}

/// A finite honeycomb flake with its assembled Hamiltonian.
#[derive(Debug, Clone)]
pub struct FiniteSample {
    pub geometry: HoneycombGeometry,
    pub params: HaldaneParams,
    pub n1: usize,
    pub n2: usize,
    pub bc: BoundaryCondition,
    pub sites: Vec<SiteIndex>,
    pub hamiltonian: HermitianDense,
}

impl FiniteSample {
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    /// Cartesian positions in site order.
    pub fn positions(&self) -> Vec<crate::lattice::Vec2> {
        self.sites.iter().map(|s| s.position(&self.geometry)).collect()
    }

    /// Inscribed radius of the flake parallelogram: the distance from its
    /// center to the nearest side. Box sizes for real-space traces are
    /// chosen relative to this.
    pub fn inradius(&self) -> f64 {
        let g = &self.geometry;
        let d1 = self.n1 as f64 * g.cell_area / (2.0 * g.a2.norm());
        let d2 = self.n2 as f64 * g.cell_area / (2.0 * g.a1.norm());
        d1.min(d2)
    }
}

/// Assemble the flake Hamiltonian.
///
/// Row conventions, with s(x) = +1 on sublattice A and −1 on B:
/// - NN: entry t₁ between any pair separated by ±d_j;
/// - NNN: the hop arriving at site x from x − a_j carries
///   t₂ cos φ + i t₂ sin φ · s(x), the reverse direction the conjugate;
/// - on-site +M on A, −M on B.
///
/// Open boundaries drop bonds leaving the flake; periodic boundaries wrap
/// cell indices mod (n₁, n₂), which requires n ≥ 2 (n ≥ 3 when t₂ ≠ 0) so
/// no two hopping classes fold onto the same matrix entry.
pub fn assemble_flake(
    g: &HoneycombGeometry,
    p: &HaldaneParams,
    n1: usize,
    n2: usize,
    bc: BoundaryCondition,
) -> Result<FiniteSample> {
    assemble_flake_inner(g, p, n1, n2, bc, false)
}

/// Test hook used by the self-check mutation test: optionally corrupts the
/// NNN sublattice sign (χ_A − χ_B → χ_A + χ_B), which must be caught by
/// the periodic-flake spectral-equivalence oracle.
pub fn assemble_flake_corruptible(
    g: &HoneycombGeometry,
    p: &HaldaneParams,
    n1: usize,
    n2: usize,
    bc: BoundaryCondition,
    corrupt_nnn_sign: bool,
) -> Result<FiniteSample> {
    assemble_flake_inner(g, p, n1, n2, bc, corrupt_nnn_sign)
}

fn assemble_flake_inner(
    g: &HoneycombGeometry,
    p: &HaldaneParams,
    n1: usize,
    n2: usize,
    bc: BoundaryCondition,
    corrupt_nnn_sign: bool,
) -> Result<FiniteSample> {
    if bc == BoundaryCondition::Periodic {
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidInput(format!(
                "periodic flake needs n1, n2 ≥ 2, got {n1}×{n2}"
            )));
        }
        if p.t2 != 0.0 && (n1 < 3 || n2 < 3) {
            return Err(Error::InvalidInput(format!(
                "periodic flake with t2 ≠ 0 needs n1, n2 ≥ 3 to avoid double NNN bonds, got {n1}×{n2}"
            )));
        }
    }
    let sites = crate::lattice::enumerate_flake(n1, n2)?;
    let dim = sites.len();
    let mut h = vec![crate::numerics::ZERO; dim * dim];

    let idx = |g1: i64, g2: i64, sub: Sublattice| -> Option<usize> {
        let (n1, n2) = (n1 as i64, n2 as i64);
        let (c1, c2) = match bc {
            BoundaryCondition::Open => {
                if g1 < 0 || g1 >= n1 || g2 < 0 || g2 >= n2 {
                    return None;
                }
                (g1, g2)
            }
            BoundaryCondition::Periodic => (g1.rem_euclid(n1), g2.rem_euclid(n2)),
        };
        let cell = (c1 * n2 + c2) as usize;
        Some(2 * cell + if sub == Sublattice::A { 0 } else { 1 })
    };

    // Cell offsets of the in-plane hops. NN connects A(γ) to
    // B(γ), B(γ + e₁), B(γ − e₂) (displacements d₃, d₂, d₁ respectively);
    // NNN connects same sublattices across ±a₁ = ±(1,0), ±a₂ = ±(0,1),
    // ±a₃ = ∓(1,1).
    let nn_from_a: [(i64, i64); 3] = [(0, 0), (1, 0), (0, -1)];
    let nnn_offsets: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, -1)];

    let t2c = p.t2 * p.phi.cos();
    let t2s = p.t2 * p.phi.sin();

    for (row, site) in sites.iter().enumerate() {
        let (g1, g2) = site.cell;
        // On-site term.
        let m_sign = if site.sublattice == Sublattice::A { 1.0 } else { -1.0 };
        h[row * dim + row] += C64::new(p.m * m_sign, 0.0);

        // NN hops.
        match site.sublattice {
            Sublattice::A => {
                for (o1, o2) in nn_from_a {
                    if let Some(col) = idx(g1 + o1, g2 + o2, Sublattice::B) {
                        h[row * dim + col] += C64::new(p.t1, 0.0);
                    }
                }
            }
            Sublattice::B => {
                for (o1, o2) in nn_from_a {
                    if let Some(col) = idx(g1 - o1, g2 - o2, Sublattice::A) {
                        h[row * dim + col] += C64::new(p.t1, 0.0);
                    }
                }
            }
        }

        // NNN hops: arriving at this site from x ∓ a_j.
        let s_row = if corrupt_nnn_sign { 1.0 } else { m_sign };
        for (o1, o2) in nnn_offsets {
            if let Some(col) = idx(g1 - o1, g2 - o2, site.sublattice) {
                h[row * dim + col] += C64::new(t2c, t2s * s_row);
            }
            if let Some(col) = idx(g1 + o1, g2 + o2, site.sublattice) {
                h[row * dim + col] += C64::new(t2c, -t2s * s_row);
            }
        }
    }

    let hamiltonian = HermitianDense::new(dim, h)?;
    Ok(FiniteSample { geometry: *g, params: *p, n1, n2, bc, sites, hamiltonian })
}
