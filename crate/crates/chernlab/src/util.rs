//! Deterministic helpers: a seedable RNG for property checks and a
//! fixed-order parallel map for scan workloads.

/// SplitMix64. Small, fast, and good enough for test-point generation;
/// identical streams for identical seeds on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

/// Map `f` over `0..n` using at most `threads` workers, returning results
/// in index order. Chunks are assigned statically, so the output (and any
/// reduction over it) is identical regardless of scheduling.
pub fn par_map_indexed<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.max(1).min(n.max(1));
    if threads <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, s) in slot.iter_mut().enumerate() {
                    *s = Some(f(t * chunk + off));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("worker filled every slot")).collect()
}

use num_complex::Complex64;

/// In-place 2d DFT on an n1×n2 row-major grid (second index fastest).
///
/// `sign = -1.0` is the forward transform Σ x e^{-2πi(q₁i/n₁ + q₂j/n₂)};
/// `sign = +1.0` the unnormalized inverse. Row-column factorization with
/// naive O(n) kernels per line — plenty for the grids used here.
pub fn dft2(data: &mut [Complex64], n1: usize, n2: usize, sign: f64) {
    assert_eq!(data.len(), n1 * n2);
    let mut line = vec![Complex64::new(0.0, 0.0); n1.max(n2)];
    // Transform along the second (contiguous) index.
    let w2: Vec<Complex64> = (0..n2)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * k as f64 / n2 as f64))
        .collect();
    for i in 0..n1 {
        let row = &mut data[i * n2..(i + 1) * n2];
        for (q, slot) in line[..n2].iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in row.iter().enumerate() {
                acc += x * w2[(q * j) % n2];
            }
            *slot = acc;
        }
        row.copy_from_slice(&line[..n2]);
    }
    // Transform along the first index.
    let w1: Vec<Complex64> = (0..n1)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * k as f64 / n1 as f64))
        .collect();
    for j in 0..n2 {
        for (q, slot) in line[..n1].iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n1 {
                acc += data[i * n2 + j] * w1[(q * i) % n1];
            }
            *slot = acc;
        }
        for i in 0..n1 {
            data[i * n2 + j] = line[i];
        }
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut w = a % tau;
    if w > std::f64::consts::PI {
        w -= tau;
    } else if w <= -std::f64::consts::PI {
        w += tau;
    }
    w
}
