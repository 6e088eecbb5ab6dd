//! Minimal dense complex-Hermitian linear algebra.
//!
//! Three layers, each only as general as the rest of the crate needs:
//!
//! - [`Hermitian2`] with Pauli decomposition and the closed-form
//!   eigensolver [`eigh2`] — every Bloch fiber lives here;
//! - [`HermitianDense`] with the cyclic Jacobi eigensolver
//!   [`eigh_dense`] — flake Hamiltonians and spectral projections;
//! - [`CMatrix`], a plain row-major complex matrix with multiplication,
//!   used for projector/commutator algebra in real space.
//!
//! Jacobi is slower than tridiagonalization but unconditionally stable and
//! self-verifying via residual checks, which is what the oracle-style test
//! suite wants. Adequate up to a few thousand rows.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Convenience alias used across the crate.
pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrices σ₀ (identity), σ₁, σ₂, σ₃ as 2×2 entry arrays.
pub const PAULI: [[[C64; 2]; 2]; 4] = [
    [[ONE, ZERO], [ZERO, ONE]],
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]],
];

const HERM2_TOL: f64 = 1e-12;

/// A 2×2 complex Hermitian matrix, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    entries: [[C64; 2]; 2],
}

impl Hermitian2 {
    /// Build from explicit entries; rejects non-finite or non-Hermitian
    /// input (tolerance 1e-12 on |A - A†| entries, absolute).
    pub fn new(entries: [[C64; 2]; 2]) -> Result<Self> {
        for row in &entries {
            for e in row {
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
        }
        let asym = (entries[0][1] - entries[1][0].conj()).norm().max(
            entries[0][0].im.abs().max(entries[1][1].im.abs()),
        );
        if asym > HERM2_TOL {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        // Exact Hermitian storage: symmetrize away the sub-tolerance noise.
        let d0 = C64::new(entries[0][0].re, 0.0);
        let d1 = C64::new(entries[1][1].re, 0.0);
        let off = (entries[0][1] + entries[1][0].conj()) * 0.5;
        Ok(Hermitian2 { entries: [[d0, off], [off.conj(), d1]] })
    }

    /// Σ_j r_j σ_j.
    pub fn from_pauli(r: [f64; 4]) -> Self {
        Hermitian2 {
            entries: [
                [C64::new(r[0] + r[3], 0.0), C64::new(r[1], -r[2])],
                [C64::new(r[1], r[2]), C64::new(r[0] - r[3], 0.0)],
            ],
        }
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.entries[0][0] * v[0] + self.entries[0][1] * v[1],
            self.entries[1][0] * v[0] + self.entries[1][1] * v[1],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    /// Frobenius norm of the difference.
    pub fn distance(&self, other: &Hermitian2) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += (self.entries[i][j] - other.entries[i][j]).norm_sqr();
            }
        }
        s.sqrt()
    }
}

/// Coefficients (R₀, R₁, R₂, R₃) with h = Σ_j R_j σ_j, via R_j = ½ Tr(σ_j h).
pub fn pauli_decompose(h: &Hermitian2) -> [f64; 4] {
    let e = h.entries();
    [
        0.5 * (e[0][0].re + e[1][1].re),
        e[1][0].re,
        e[1][0].im,
        0.5 * (e[0][0].re - e[1][1].re),
    ]
}

/// Eigenvalues and eigenvectors of a dense Hermitian matrix.
///
/// Eigenvalues ascend; eigenvectors are orthonormal and stored one `Vec`
/// per eigenvalue, in matching order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    /// Largest residual ‖A v − λ v‖ over all eigenpairs; test hook.
    pub fn max_residual(&self, apply: impl Fn(&[C64]) -> Vec<C64>) -> f64 {
        let mut worst = 0.0_f64;
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let av = apply(v);
            let r: f64 = av
                .iter()
                .zip(v)
                .map(|(a, x)| (a - x * *lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }
}

/// Closed-form eigensolver for 2×2 Hermitian matrices.
///
/// With h = Σ R_j σ_j and ρ = √(R₁²+R₂²+R₃²) the eigenvalues are
/// R₀ ∓ ρ. Eigenvectors are evaluated on the cancellation-free branch of
/// the rank-1 projector formulas, so the residual stays at machine scale
/// even within 1e-13 of a band touching. A fully degenerate input returns
/// the canonical basis.
pub fn eigh2(h: &Hermitian2) -> EigenDecomposition {
    let [r0, r1, r2, r3] = pauli_decompose(h);
    let rho = (r1 * r1 + r2 * r2 + r3 * r3).sqrt();
    let (lower, upper) = lower_band_vector(r1, r2, r3, rho);
    EigenDecomposition {
        eigenvalues: vec![r0 - rho, r0 + rho],
        eigenvectors: vec![lower.to_vec(), upper.to_vec()],
    }
}

/// Unit eigenvector of the lower eigenvalue of R₁σ₁+R₂σ₂+R₃σ₃, plus its
/// orthogonal complement. Branches on sign(R₃) to avoid the cancellation
/// √(R₃²+|R|²) − R₃ when R₃ > 0. The phase makes the first component real
/// and non-negative; when |R| = 0 the lower vector is axis-aligned.
pub(crate) fn lower_band_vector(r1: f64, r2: f64, r3: f64, rho: f64) -> ([C64; 2], [C64; 2]) {
    if rho == 0.0 {
        return ([ONE, ZERO], [ZERO, ONE]);
    }
    let r = C64::new(r1, r2);
    let rabs = r.norm();
    let lower: [C64; 2] = if rabs == 0.0 {
        if r3 > 0.0 {
            // Lower eigenspace is the second axis; R/|R| taken as 1.
            [ZERO, C64::new(-1.0, 0.0)]
        } else {
            [ONE, ZERO]
        }
    } else if r3 <= 0.0 {
        let norm = (2.0 * rho * (rho - r3)).sqrt();
        [C64::new((rho - r3) / norm, 0.0), -r / norm]
    } else {
        let first = rabs / (2.0 * rho * (rho + r3)).sqrt();
        let second = -(r / rabs) * ((rho + r3) / (2.0 * rho)).sqrt();
        [C64::new(first, 0.0), second]
    };
    let upper = [-lower[1].conj(), lower[0].conj()];
    (lower, upper)
}

const DENSE_HERM_REL_TOL: f64 = 1e-10;
const JACOBI_SWEEP_CAP: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;

/// A dense complex Hermitian matrix, validated at construction
/// (tolerance 1e-10 relative to the largest entry magnitude).
#[derive(Debug, Clone)]
pub struct HermitianDense {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianDense {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {dim}×{dim} entries, got {}",
                data.len()
            )));
        }
        let mut max_entry = 0.0_f64;
        for e in &data {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::NonFinite);
            }
            max_entry = max_entry.max(e.norm());
        }
        let mut asym = 0.0_f64;
        for i in 0..dim {
            for j in i..dim {
                asym = asym.max((data[i * dim + j] - data[j * dim + i].conj()).norm() * 0.5);
            }
        }
        if asym > DENSE_HERM_REL_TOL * max_entry.max(1e-300) {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        Ok(HermitianDense { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = ZERO;
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            *slot = acc;
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Full spectrum of a dense Hermitian matrix by cyclic Jacobi rotations.
///
/// Sweeps annihilate off-diagonal entries in row order until the
/// off-diagonal Frobenius norm drops below 1e-12·‖A‖_F, with a cap of 100
/// sweeps; unconverged input reports the achieved off-diagonal norm.
/// Ascending eigenvalues, ties keeping their pre-sort order.
pub fn eigh_dense(a: &HermitianDense) -> Result<EigenDecomposition> {
    let n = a.dim;
    let mut m = a.data.clone();
    // Eigenvector accumulator: column j holds eigenvector j.
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
    }
    let fro = a.frobenius().max(1e-300);
    let tol = JACOBI_OFF_TOL * fro;

    let mut converged = false;
    let mut achieved = off_norm(&m, n);
    for sweep in 0..JACOBI_SWEEP_CAP {
        achieved = off_norm(&m, n);
        if achieved <= tol {
            converged = true;
            break;
        }
        // Threshold schedule in early sweeps avoids chasing noise.
        let thresh = if sweep < 3 { 0.2 * achieved / (n * n) as f64 } else { 0.0 };
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q, thresh);
            }
        }
    }
    if !converged && off_norm(&m, n) > tol {
        return Err(Error::NoConvergence { achieved, tolerance: tol });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i].re).collect();
    let eigenvectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn off_norm(m: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating the (p, q) entry.
///
/// The complex entry a_pq = r·w (|w| = 1) is phase-rotated to the real
/// axis and then treated with the standard symmetric Jacobi angle; the
/// combined unitary is J = diag(1, w̄)·[[c, s], [-s, c]] acting on the
/// (p, q) plane.
fn rotate(m: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize, thresh: f64) {
    let apq = m[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    // Entries that can no longer move the diagonal at working precision
    // are flushed to zero outright.
    if r <= f64::EPSILON * 0.5 * (app.abs() + aqq.abs()) || r < thresh {
        if r < f64::EPSILON * 0.5 * (app.abs() + aqq.abs()) {
            m[p * n + q] = ZERO;
            m[q * n + p] = ZERO;
        }
        return;
    }
    let w = apq / r;
    let theta = 0.5 * (aqq - app) / r;
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sw = w.conj() * s;

    // A ← A·J with J_pp = c, J_pq = s, J_qp = -s·w̄, J_qq = c·w̄.
    for i in 0..n {
        let aip = m[i * n + p];
        let aiq = m[i * n + q];
        m[i * n + p] = aip * c - aiq * sw;
        m[i * n + q] = aip * s + aiq * (w.conj() * c);
    }
    // A ← J†·A.
    let swc = w * s;
    for j in 0..n {
        let apj = m[p * n + j];
        let aqj = m[q * n + j];
        m[p * n + j] = apj * c - aqj * swc;
        m[q * n + j] = apj * s + aqj * (w * c);
    }
    // Clean the rotated pair and re-pin the diagonal to the real axis.
    m[p * n + q] = ZERO;
    m[q * n + p] = ZERO;
    m[p * n + p] = C64::new(m[p * n + p].re, 0.0);
    m[q * n + q] = C64::new(m[q * n + q].re, 0.0);

    // V ← V·J accumulates the eigenvector columns.
    for i in 0..n {
        let vip = v[i * n + p];
        let viq = v[i * n + q];
        v[i * n + p] = vip * c - viq * sw;
        v[i * n + q] = vip * s + viq * (w.conj() * c);
    }
}

/// Row-major complex matrix with the few dense operations real-space
/// projector algebra needs.
#[derive(Debug, Clone)]
pub struct CMatrix {
    n: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, val: C64) {
        self.data[i * self.n + j] = val;
    }

    /// Accumulate the rank-1 update `self += v v†`.
    pub fn add_outer(&mut self, v: &[C64]) {
        let n = self.n;
        for i in 0..n {
            let vi = v[i];
            let row = &mut self.data[i * n..(i + 1) * n];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot += vi * v[j].conj();
            }
        }
    }

    /// `self · other`, i-k-j loop order so both operands stream row-wise.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }
}
