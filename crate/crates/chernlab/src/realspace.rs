//! Real-space machinery on finite flakes: spectral projections, the
//! Chern marker, marker scaling scans, and generalized-Wannier-basis
//! audits against Delone center sets.
//!
//! The marker estimates the Chern number without any k-space input:
//!
//! ```text
//! C(P) ≈ 2π / (|Λ_L| · A_cell) · Tr( i χ_L P [[X₁,P],[X₂,P]] P χ_L ),
//! ```
//!
//! where χ_L restricts to a centered box, |Λ_L| counts the unit cells
//! inside it, and X₁, X₂ are the diagonal position operators — genuine
//! positions, so the marker is evaluated on open flakes. The per-cell
//! normalization |Λ_L|·A_cell is the discrete transcription of the
//! continuum per-area prefactor 2π/4L²; it is locked by the calibration
//! requirement that the marker approach the k-space Chern number.
//!
//! The GWB side: projected deltas at one A site per cell, symmetrically
//! (Löwdin) orthonormalized within Ran P, audited by per-center moments
//! Σ G(|x − γ|)|ψ(x)|². This is one construction, not the construction —
//! its failure to stay bounded in a Chern phase is evidence consistent
//! with the localization dichotomy, not a proof.

use crate::error::{Error, Result};
use crate::lattice::{Sublattice, Vec2};
use crate::model::{BoundaryCondition, FiniteSample, HaldaneParams};
use crate::numerics::{eigh_dense, CMatrix, EigenDecomposition, C64, ZERO};

/// Spectral projection onto all eigenstates below a Fermi level.
#[derive(Debug, Clone)]
pub struct SpectralProjection {
    pub fermi: f64,
    pub rank: usize,
    pub dim: usize,
    pub p: CMatrix,
}

pub const FERMI_GAP_TOLERANCE: f64 = 1e-6;

/// Build P = Σ_{λ < fermi} |v⟩⟨v| from an eigendecomposition. The Fermi
/// level must clear every eigenvalue by the gap tolerance.
pub fn projection_from_eig(eig: &EigenDecomposition, fermi: f64) -> Result<SpectralProjection> {
    let nearest = eig
        .eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| (a - fermi).abs().total_cmp(&(b - fermi).abs()))
        .ok_or_else(|| Error::InvalidInput("empty spectrum".into()))?;
    if (nearest - fermi).abs() < FERMI_GAP_TOLERANCE {
        return Err(Error::FermiOnEigenvalue { fermi, nearest });
    }
    let dim = eig.eigenvectors.first().map_or(0, Vec::len);
    let mut p = CMatrix::zeros(dim);
    let mut rank = 0;
    for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *lam < fermi {
            p.add_outer(v);
            rank += 1;
        }
    }
    Ok(SpectralProjection { fermi, rank, dim, p })
}

/// Diagonalize a flake and project below `fermi`.
pub fn spectral_projection(sample: &FiniteSample, fermi: f64) -> Result<SpectralProjection> {
    let eig = eigh_dense(&sample.hamiltonian)?;
    projection_from_eig(&eig, fermi)
}

/// Midpoint of the widest spectral gap near a target energy: among the
/// consecutive-eigenvalue gaps at least half as wide as the widest one,
/// pick the one whose midpoint lies closest to `target`. Also counts the
/// eigenvalues inside `bulk_gap` when the infinite-system gap is supplied
/// (edge states on open Chern flakes).
pub fn fermi_from_spectrum(
    eigenvalues: &[f64],
    target: f64,
    bulk_gap: Option<(f64, f64)>,
) -> Result<(f64, usize)> {
    if eigenvalues.len() < 2 {
        return Err(Error::InvalidInput("need at least two eigenvalues".into()));
    }
    let mut widest = 0.0_f64;
    for w in eigenvalues.windows(2) {
        widest = widest.max(w[1] - w[0]);
    }
    let mut best: Option<f64> = None;
    for w in eigenvalues.windows(2) {
        let width = w[1] - w[0];
        if width >= 0.5 * widest {
            let mid = 0.5 * (w[0] + w[1]);
            if best.is_none() || (mid - target).abs() < (best.unwrap() - target).abs() {
                best = Some(mid);
            }
        }
    }
    let fermi = best.expect("at least one gap");
    let edge_states = bulk_gap.map_or(0, |(lo, hi)| {
        eigenvalues.iter().filter(|&&e| e > lo && e < hi).count()
    });
    Ok((fermi, edge_states))
}

/// One Chern-marker evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MarkerReport {
    /// Box half-width, length units.
    pub l: f64,
    pub cells_in_box: usize,
    pub sites_in_box: usize,
    /// Re Tr(iχPCPχ), before normalization.
    pub trace_value: f64,
    pub marker: f64,
}

/// Evaluate the Chern marker of a projection over the box (−L, L]²
/// centered on the flake centroid.
///
/// Preconditions: the box holds at least 9 unit cells, and on open flakes
/// it keeps two cells of clearance from the boundary.
pub fn chern_marker(
    sample: &FiniteSample,
    proj: &SpectralProjection,
    l: f64,
) -> Result<MarkerReport> {
    chern_marker_centered(sample, proj, l, None)
}

/// [`chern_marker`] with an explicit box center (translation-consistency
/// checks move the box by lattice vectors); `None` uses the centroid.
pub fn chern_marker_centered(
    sample: &FiniteSample,
    proj: &SpectralProjection,
    l: f64,
    center: Option<Vec2>,
) -> Result<MarkerReport> {
    let dim = sample.dim();
    if proj.dim != dim {
        return Err(Error::InvalidInput("projection and sample dimensions differ".into()));
    }
    if !l.is_finite() || l <= 0.0 {
        return Err(Error::InvalidInput("box half-width must be positive".into()));
    }
    let g = &sample.geometry;
    if sample.bc == BoundaryCondition::Open {
        let clearance = 2.0 * g.a1.norm().max(g.a2.norm());
        let inradius = sample.inradius();
        if l > inradius - clearance {
            return Err(Error::InvalidInput(format!(
                "box half-width {l:.3} too close to the open boundary (inradius {inradius:.3})"
            )));
        }
    }
    let positions = sample.positions();
    let centroid = center.unwrap_or_else(|| {
        let mut c = Vec2::new(0.0, 0.0);
        for p in &positions {
            c = c + *p;
        }
        c.scale(1.0 / positions.len() as f64)
    });
    let in_box: Vec<usize> = (0..dim)
        .filter(|&i| {
            let d = positions[i] - centroid;
            d.x > -l && d.x <= l && d.y > -l && d.y <= l
        })
        .collect();
    let cells_in_box = in_box
        .iter()
        .filter(|&&i| sample.sites[i].sublattice == Sublattice::A)
        .count();
    if cells_in_box < 9 {
        return Err(Error::InvalidInput(format!(
            "box contains only {cells_in_box} cells; need at least 9"
        )));
    }

    // A = [X1, P], B = [X2, P]: entrywise (x_i − x_j) P_ij. On periodic
    // flakes the coordinate difference is taken minimum-image, which is
    // the only translation-covariant reading of a position operator on a
    // torus; open flakes use the genuine coordinates.
    let mut a = CMatrix::zeros(dim);
    let mut b = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let delta = site_displacement(sample, positions[i], positions[j]);
            let pij = proj.p.get(i, j);
            a.set(i, j, pij * delta.x);
            b.set(i, j, pij * delta.y);
        }
    }
    let c = a.mul(&b).sub(&b.mul(&a));
    let cp = c.mul(&proj.p);
    // Box-restricted diagonal of i·P·(C·P).
    let mut trace = C64::new(0.0, 0.0);
    for &i in &in_box {
        let mut diag = ZERO;
        for j in 0..dim {
            diag += proj.p.get(i, j) * cp.get(j, i);
        }
        trace += C64::new(0.0, 1.0) * diag;
    }
    if trace.im.abs() > 1e-8 * (1.0 + trace.re.abs()) {
        return Err(Error::NoConvergence { achieved: trace.im.abs(), tolerance: 1e-8 });
    }
    let marker = 2.0 * std::f64::consts::PI * trace.re / (cells_in_box as f64 * g.cell_area);
    Ok(MarkerReport {
        l,
        cells_in_box,
        sites_in_box: in_box.len(),
        trace_value: trace.re,
        marker,
    })
}

/// Marker across increasing open flakes at a fixed box/flake ratio.
///
/// The Fermi level is re-chosen per flake as the widest spectral gap
/// nearest zero — open Chern flakes carry edge states in the bulk gap, so
/// a fixed level could collide with one.
pub fn marker_scan(
    p: &HaldaneParams,
    g: &crate::lattice::HoneycombGeometry,
    sizes: &[usize],
    box_ratio: f64,
) -> Result<Vec<MarkerReport>> {
    if !(box_ratio > 0.2 && box_ratio < 0.6) {
        return Err(Error::InvalidInput(format!("box_ratio {box_ratio} outside (0.2, 0.6)")));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sizes must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let sample = crate::model::assemble_flake(g, p, n, n, BoundaryCondition::Open)?;
        let eig = eigh_dense(&sample.hamiltonian)?;
        let (fermi, _) = fermi_from_spectrum(&eig.eigenvalues, 0.0, None)?;
        let proj = projection_from_eig(&eig, fermi)?;
        let l = box_ratio * sample.inradius();
        out.push(chern_marker(&sample, &proj, l)?);
    }
    Ok(out)
}

/// Localization function G(r) of the audit: polynomial ⟨r⟩^{2s} or
/// exponential e^{2βr}. Both are positive, increasing, and satisfy the
/// submultiplicative triangle bound (with constant 1 in the exponential
/// case).
#[derive(Debug, Clone, Copy)]
pub enum LocalizationFn {
    Polynomial { s: f64 },
    Exponential { beta: f64 },
}

impl LocalizationFn {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            LocalizationFn::Polynomial { s } => (1.0 + r * r).powf(*s),
            LocalizationFn::Exponential { beta } => (2.0 * beta * r).exp(),
        }
    }
}

/// Candidate generalized Wannier basis: Löwdin-orthonormalized projected
/// deltas with one center per cell.
#[derive(Debug, Clone)]
pub struct GwbBasis {
    /// Orthonormal vectors spanning Ran P; the first `kept` are anchored
    /// to `centers`, the rest are an arbitrary completion.
    pub vectors: Vec<Vec<C64>>,
    pub centers: Vec<Vec2>,
    pub kept: usize,
    pub padded: usize,
    pub rank: usize,
}

const SEED_NORM_MIN: f64 = 0.05;
const GRAM_CONDITION_MAX: f64 = 1e8;

/// Build the candidate basis from a spectral projection.
///
/// Seeds are P·δ at every A site (the Delone centers); seeds with norm
/// below 0.05 are dropped, the survivors are symmetrically
/// orthonormalized (the Gram matrix of projected deltas is just the
/// corresponding P block), and any rank deficit is padded with an
/// arbitrary orthonormal completion of Ran P. Padded vectors carry no
/// center and are excluded from audits.
pub fn candidate_gwb(sample: &FiniteSample, proj: &SpectralProjection) -> Result<GwbBasis> {
    let dim = sample.dim();
    let positions = sample.positions();
    let mut center_sites = Vec::new();
    for (idx, site) in sample.sites.iter().enumerate() {
        if site.sublattice == Sublattice::A {
            let norm_sq = proj.p.get(idx, idx).re;
            if norm_sq.sqrt() >= SEED_NORM_MIN {
                center_sites.push(idx);
            }
        }
    }
    let kept = center_sites.len();
    if kept == 0 {
        return Err(Error::InvalidInput("no usable Wannier seeds".into()));
    }
    // Gram matrix of the seeds: ⟨Pδ_c, Pδ_d⟩ = P_cd.
    let mut gram = vec![ZERO; kept * kept];
    for (r, &c) in center_sites.iter().enumerate() {
        for (s, &d) in center_sites.iter().enumerate() {
            gram[r * kept + s] = proj.p.get(c, d);
        }
    }
    let gram = crate::numerics::HermitianDense::new(kept, gram)?;
    let geig = eigh_dense(&gram)?;
    let mu_min = geig.eigenvalues.first().copied().unwrap_or(0.0);
    let mu_max = geig.eigenvalues.last().copied().unwrap_or(0.0);
    if mu_min <= 0.0 || mu_max / mu_min > GRAM_CONDITION_MAX {
        return Err(Error::IllConditioned { condition: mu_max / mu_min.max(1e-300) });
    }
    // W = G^{-1/2} from the Gram eigensystem.
    let mut w = vec![ZERO; kept * kept];
    for (mu, v) in geig.eigenvalues.iter().zip(&geig.eigenvectors) {
        let scale = 1.0 / mu.sqrt();
        for r in 0..kept {
            let vr = v[r] * scale;
            for s in 0..kept {
                w[r * kept + s] += vr * v[s].conj();
            }
        }
    }
    // ψ_c = Σ_d (G^{-1/2})_{dc} P δ_d.
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(proj.rank);
    for c in 0..kept {
        let mut psi = vec![ZERO; dim];
        for (d, &site_d) in center_sites.iter().enumerate() {
            let coeff = w[d * kept + c];
            for (i, slot) in psi.iter_mut().enumerate() {
                *slot += proj.p.get(i, site_d) * coeff;
            }
        }
        vectors.push(psi);
    }
    // Pad to the full rank of P by Gram-Schmidt over projected deltas.
    let mut padded = 0;
    if vectors.len() < proj.rank {
        for seed_idx in 0..dim {
            if vectors.len() >= proj.rank {
                break;
            }
            let mut v: Vec<C64> = (0..dim).map(|i| proj.p.get(i, seed_idx)).collect();
            for existing in &vectors {
                let overlap: C64 = existing.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (slot, e) in v.iter_mut().zip(existing) {
                    *slot -= e * overlap;
                }
            }
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for slot in v.iter_mut() {
                    *slot /= norm;
                }
                vectors.push(v);
                padded += 1;
            }
        }
    }
    if vectors.len() != proj.rank {
        return Err(Error::NoConvergence {
            achieved: vectors.len() as f64,
            tolerance: proj.rank as f64,
        });
    }
    let centers = center_sites.iter().map(|&i| positions[i]).collect();
    Ok(GwbBasis { vectors, centers, kept, padded, rank: proj.rank })
}

/// Per-center localization audit of a candidate basis.
#[derive(Debug, Clone)]
pub struct GwbAudit {
    pub per_center: Vec<f64>,
    /// sup over audited centers of Σ G(|x − γ|)|ψ_γ(x)|².
    pub m_bound: f64,
    pub delone_r: f64,
    pub delone_big_r: f64,
}

/// Displacement a − b honoring the boundary condition: plain difference
/// on open flakes, minimum-image over the superlattice n₁a₁, n₂a₂ on
/// periodic ones (a state near the seam has its physical tail on the far
/// side of the stored coordinates).
fn site_displacement(sample: &FiniteSample, a: Vec2, b: Vec2) -> Vec2 {
    let d = a - b;
    match sample.bc {
        BoundaryCondition::Open => d,
        BoundaryCondition::Periodic => {
            // Average all norm-tied minimal images: at half-period
            // separations the tied opposite images cancel, which keeps
            // δ(a,b) = −δ(b,a) exact (the marker algebra needs the
            // commutators anti-Hermitian to the last bit).
            let big_a1 = sample.geometry.a1.scale(sample.n1 as f64);
            let big_a2 = sample.geometry.a2.scale(sample.n2 as f64);
            let mut best = f64::INFINITY;
            let mut images: Vec<Vec2> = Vec::with_capacity(2);
            for m1 in -1..=1_i32 {
                for m2 in -1..=1_i32 {
                    let img = d + big_a1.scale(m1 as f64) + big_a2.scale(m2 as f64);
                    let norm = img.norm();
                    if norm < best - 1e-9 {
                        best = norm;
                        images.clear();
                        images.push(img);
                    } else if (norm - best).abs() <= 1e-9 {
                        images.push(img);
                    }
                }
            }
            let mut mean = Vec2::new(0.0, 0.0);
            for img in &images {
                mean = mean + *img;
            }
            mean.scale(1.0 / images.len() as f64)
        }
    }
}

/// Minimum-image distance (periodic) or plain distance (open). Distinct
/// from [`site_displacement`]: norm ties are harmless here, so no
/// averaging is involved.
fn flake_distance(sample: &FiniteSample, a: Vec2, b: Vec2) -> f64 {
    let d = a - b;
    match sample.bc {
        BoundaryCondition::Open => d.norm(),
        BoundaryCondition::Periodic => {
            let big_a1 = sample.geometry.a1.scale(sample.n1 as f64);
            let big_a2 = sample.geometry.a2.scale(sample.n2 as f64);
            let mut best = f64::INFINITY;
            for m1 in -1..=1_i32 {
                for m2 in -1..=1_i32 {
                    let img = d + big_a1.scale(m1 as f64) + big_a2.scale(m2 as f64);
                    best = best.min(img.norm());
                }
            }
            best
        }
    }
}

pub const DELONE_R_FACTOR: f64 = 0.4;
pub const DELONE_BIG_R_FACTOR: f64 = 1.1;

/// Audit the kept vectors of a basis against their centers.
///
/// Verifies orthonormality (1e-8) and the Delone conditions for the
/// center set (pairwise separation ≥ 2r; every site within R of a
/// center), then reports the per-center moments and their supremum.
pub fn gwb_audit(
    sample: &FiniteSample,
    basis: &GwbBasis,
    loc: LocalizationFn,
    delone_r: f64,
    delone_big_r: f64,
) -> Result<GwbAudit> {
    let dim = sample.dim();
    for v in &basis.vectors {
        if v.len() != dim {
            return Err(Error::InvalidInput("basis vector dimension mismatch".into()));
        }
    }
    for i in 0..basis.vectors.len() {
        for j in i..basis.vectors.len() {
            let dot: C64 = basis.vectors[i]
                .iter()
                .zip(&basis.vectors[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            if (dot.norm() - target).abs() > 1e-8 {
                return Err(Error::InvalidInput(format!(
                    "basis not orthonormal: |⟨ψ{i}, ψ{j}⟩| deviates by {:.3e}",
                    (dot.norm() - target).abs()
                )));
            }
        }
    }
    // Delone conditions over the flake.
    for (i, a) in basis.centers.iter().enumerate() {
        for b in basis.centers.iter().skip(i + 1) {
            if flake_distance(sample, *a, *b) < 2.0 * delone_r {
                return Err(Error::InvalidInput(format!(
                    "centers ({:.2}, {:.2}) and ({:.2}, {:.2}) violate the packing radius",
                    a.x, a.y, b.x, b.y
                )));
            }
        }
    }
    let positions = sample.positions();
    for pos in &positions {
        let near = basis
            .centers
            .iter()
            .any(|c| flake_distance(sample, *pos, *c) <= delone_big_r);
        if !near {
            return Err(Error::InvalidInput(format!(
                "site at ({:.2}, {:.2}) has no center within R",
                pos.x, pos.y
            )));
        }
    }
    let mut per_center = Vec::with_capacity(basis.kept);
    for (c, center) in basis.centers.iter().enumerate() {
        let psi = &basis.vectors[c];
        let moment: f64 = positions
            .iter()
            .zip(psi)
            .map(|(pos, amp)| loc.eval(flake_distance(sample, *pos, *center)) * amp.norm_sqr())
            .sum();
        per_center.push(moment);
    }
    let m_bound = per_center.iter().copied().fold(0.0_f64, f64::max);
    Ok(GwbAudit { per_center, m_bound, delone_r, delone_big_r })
}
