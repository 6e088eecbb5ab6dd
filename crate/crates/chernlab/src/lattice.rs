//! Honeycomb geometry: displacement and periodicity vectors, reciprocal
//! basis, Brillouin-zone grids, Dirac points, and finite-flake sites.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - displacement vectors d₁ = d(½, −√3/2), d₂ = d(½, √3/2), d₃ = d(−1, 0);
//! - periodicity vectors a₁ = d₂ − d₃, a₂ = d₃ − d₁, a₃ = −a₁ − a₂;
//! - the unit cell pairs the A site at 0 with the B site at d₃, so a flake
//!   site is (cell γ, sublattice) with position γ₁a₁ + γ₂a₂ (+ d₃ for B);
//! - k-points are stored in fractional coordinates of the reciprocal basis
//!   (a_i · b_j = 2π δ_ij); Cartesian coordinates are derived. Fractional
//!   coordinates make lattice periodicity exact: k·a₁ = 2π k₁, k·a₂ = 2π k₂.

use crate::error::{Error, Result};

/// Plain 2-vector in length (or inverse-length) units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2d cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Metric data of the honeycomb structure for nearest-neighbor distance `d`.
#[derive(Debug, Clone, Copy)]
pub struct HoneycombGeometry {
    pub d: f64,
    pub d1: Vec2,
    pub d2: Vec2,
    pub d3: Vec2,
    pub a1: Vec2,
    pub a2: Vec2,
    pub a3: Vec2,
    pub b1: Vec2,
    pub b2: Vec2,
    pub cell_area: f64,
}

/// Build the geometry from the nearest-neighbor distance.
///
/// The reciprocal basis solves the 2×2 linear system a_i · b_j = 2π δ_ij.
pub fn build_geometry(d: f64) -> Result<HoneycombGeometry> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::InvalidInput(format!("nearest-neighbor distance must be positive, got {d}")));
    }
    let sqrt3 = 3.0_f64.sqrt();
    let d1 = Vec2::new(0.5 * d, -0.5 * sqrt3 * d);
    let d2 = Vec2::new(0.5 * d, 0.5 * sqrt3 * d);
    let d3 = Vec2::new(-d, 0.0);
    let a1 = d2 - d3;
    let a2 = d3 - d1;
    let a3 = -a1 - a2;
    let det = a1.cross(a2);
    let tau = 2.0 * std::f64::consts::PI / det;
    // Rows of 2π (A)^{-1} with A = [a1; a2] as rows.
    let b1 = Vec2::new(a2.y * tau, -a2.x * tau);
    let b2 = Vec2::new(-a1.y * tau, a1.x * tau);
    Ok(HoneycombGeometry { d, d1, d2, d3, a1, a2, a3, b1, b2, cell_area: det.abs() })
}

impl HoneycombGeometry {
    pub fn displacements(&self) -> [Vec2; 3] {
        [self.d1, self.d2, self.d3]
    }

    pub fn periodicity(&self) -> [Vec2; 3] {
        [self.a1, self.a2, self.a3]
    }

    /// Cartesian position of a cell, γ₁ a₁ + γ₂ a₂.
    pub fn cell_position(&self, g1: i64, g2: i64) -> Vec2 {
        self.a1.scale(g1 as f64) + self.a2.scale(g2 as f64)
    }
}

/// A reciprocal-space point; `frac` is canonical, `cart` derived.
#[derive(Debug, Clone, Copy)]
pub struct KPoint {
    pub frac: (f64, f64),
    pub cart: Vec2,
}

impl KPoint {
    pub fn from_frac(g: &HoneycombGeometry, k1: f64, k2: f64) -> KPoint {
        KPoint {
            frac: (k1, k2),
            cart: g.b1.scale(k1) + g.b2.scale(k2),
        }
    }

    /// Dual pairings with the periodicity vectors: (k·a₁, k·a₂, k·a₃).
    /// Exact in fractional coordinates, so fibers are exactly Γ*-periodic.
    pub fn dots_with_a(&self) -> [f64; 3] {
        let two_pi = 2.0 * std::f64::consts::PI;
        [
            two_pi * self.frac.0,
            two_pi * self.frac.1,
            -two_pi * (self.frac.0 + self.frac.1),
        ]
    }
}

/// The two Dirac points: K at fractional (−1/3, −1/3), K′ = −K.
///
/// These are the zeros of R(k); K satisfies e^{iK·a₁} = e^{−i2π/3} and
/// e^{−iK·a₂} = e^{+i2π/3}, so all three pairings k·a_j coincide mod 2π.
pub fn dirac_points(g: &HoneycombGeometry) -> (KPoint, KPoint) {
    (
        KPoint::from_frac(g, -1.0 / 3.0, -1.0 / 3.0),
        KPoint::from_frac(g, 1.0 / 3.0, 1.0 / 3.0),
    )
}

/// Uniform grid on the Brillouin torus, fractional points (i/n1, j/n2),
/// row-major with the second index fastest.
#[derive(Debug, Clone)]
pub struct KGrid {
    pub geometry: HoneycombGeometry,
    pub n1: usize,
    pub n2: usize,
    pub points: Vec<KPoint>,
}

pub fn kgrid(g: &HoneycombGeometry, n1: usize, n2: usize) -> Result<KGrid> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidInput(format!("k-grid needs n1, n2 ≥ 2, got {n1}×{n2}")));
    }
    let mut points = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            points.push(KPoint::from_frac(g, i as f64 / n1 as f64, j as f64 / n2 as f64));
        }
    }
    Ok(KGrid { geometry: *g, n1, n2, points })
}

impl KGrid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2);
        i * self.n2 + j
    }

    pub fn at(&self, i: usize, j: usize) -> &KPoint {
        &self.points[self.index(i, j)]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Sublattice label within the cell {0, d₃}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

/// A site of a finite flake: Bravais cell coordinates plus sublattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteIndex {
    pub cell: (i64, i64),
    pub sublattice: Sublattice,
}

impl SiteIndex {
    pub fn position(&self, g: &HoneycombGeometry) -> Vec2 {
        let base = g.cell_position(self.cell.0, self.cell.1);
        match self.sublattice {
            Sublattice::A => base,
            Sublattice::B => base + g.d3,
        }
    }
}

/// Enumerate the 2·n1·n2 sites of an n1×n2-cell flake, cell-major with A
/// before B — the ordering every flake matrix in the crate uses.
pub fn enumerate_flake(n1: usize, n2: usize) -> Result<Vec<SiteIndex>> {
    if n1 < 1 || n2 < 1 {
        return Err(Error::InvalidInput(format!("flake needs n1, n2 ≥ 1, got {n1}×{n2}")));
    }
    let mut sites = Vec::with_capacity(2 * n1 * n2);
    for g1 in 0..n1 as i64 {
        for g2 in 0..n2 as i64 {
            sites.push(SiteIndex { cell: (g1, g2), sublattice: Sublattice::A });
            sites.push(SiteIndex { cell: (g1, g2), sublattice: Sublattice::B });
        }
    }
    Ok(sites)
}
