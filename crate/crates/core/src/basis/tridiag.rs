//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for
//! eigenvalues in a spectral window, inverse iteration for eigenvectors.
//!
//! The second-order finite-difference Hamiltonian is tridiagonal, so a
//! windowed solver gets the handful of lowest-band states directly instead
//! of paying for a full decomposition. Everything here is deterministic:
//! identical inputs give bit-identical eigenpairs.

/// Real symmetric tridiagonal matrix: `diag` on the main diagonal and `off`
/// on the two adjacent ones (`off.len() == diag.len() - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "band length mismatch");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// Gershgorin bounds enclosing the whole spectrum.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues below `sigma` (Sturm sequence on the shifted
    /// LDL^T factorization).
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0usize;
        let mut d = 1.0_f64;
        for i in 0..self.dim() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - sigma - e2 / d;
            if d < 0.0 {
                count += 1;
            } else if d == 0.0 {
                d = -1e-300; // exact hit: nudge so the factorization continues
                count += 1;
            }
        }
        count
    }

    /// All eigenvalues in `[lo, hi)`, ascending, each refined by bisection to
    /// near machine precision.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let first = self.count_below(lo);
        let last = self.count_below(hi);
        let mut out = Vec::with_capacity(last.saturating_sub(first));
        for j in first..last {
            let mut a = lo;
            let mut b = hi;
            for _ in 0..120 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if self.count_below(m) > j {
                    b = m;
                } else {
                    a = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    /// Eigenvector for an isolated eigenvalue near `lambda`, by inverse
    /// iteration; returns the Rayleigh-refined eigenvalue, the normalized
    /// vector (unit 2-norm) and the residual `||T v - lambda v||`.
    pub fn eigenpair(&self, lambda: f64) -> (f64, Vec<f64>, f64) {
        let n = self.dim();
        let factors = lu_factor(&self.diag, &self.off, lambda);

        // deterministic pseudo-random start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = (i as u64).wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                s ^= s >> 33;
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        normalize(&mut v);

        for _ in 0..3 {
            lu_solve(&factors, &mut v);
            normalize(&mut v);
        }

        // Rayleigh quotient and residual
        let mut tv = vec![0.0; n];
        self.matvec(&v, &mut tv);
        let rq: f64 = v.iter().zip(&tv).map(|(a, b)| a * b).sum();
        let res: f64 = tv
            .iter()
            .zip(&v)
            .map(|(t, x)| (t - rq * x) * (t - rq * x))
            .sum::<f64>()
            .sqrt();
        (rq, v, res)
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Partially pivoted LU of the shifted tridiagonal `T - lambda I`.
struct TriLu {
    lower: Vec<f64>,  // multipliers
    d: Vec<f64>,      // U main diagonal
    u1: Vec<f64>,     // U first superdiagonal
    u2: Vec<f64>,     // U second superdiagonal (fill-in from pivoting)
    swapped: Vec<bool>,
}

fn lu_factor(diag: &[f64], off: &[f64], lambda: f64) -> TriLu {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|x| x - lambda).collect();
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut swapped = vec![false; n];
    u1[..n - 1].copy_from_slice(off);

    for i in 0..n - 1 {
        // row i carries (a0, a1, a2) at columns i..i+2 (a2 is pivot fill-in);
        // row i+1 still carries its original band (b0, b1, b2).
        let (a0, a1, a2) = (d[i], u1[i], u2[i]);
        let (b0, b1, b2) = (off[i], d[i + 1], u1[i + 1]);
        if b0.abs() > a0.abs() {
            swapped[i] = true;
            d[i] = b0;
            u1[i] = b1;
            u2[i] = b2;
            let m = a0 / b0;
            lower[i] = m;
            d[i + 1] = a1 - m * b1;
            u1[i + 1] = a2 - m * b2;
        } else {
            let pivot = if a0 == 0.0 { 1e-300 } else { a0 };
            d[i] = pivot;
            let m = b0 / pivot;
            lower[i] = m;
            d[i + 1] = b1 - m * a1;
            u1[i + 1] = b2 - m * a2;
        }
        u2[i + 1] = 0.0;
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = 1e-300;
    }
    TriLu { lower, d, u1, u2, swapped }
}

fn lu_solve(f: &TriLu, b: &mut [f64]) {
    let n = b.len();
    // forward pass with recorded row swaps
    for i in 0..n - 1 {
        if f.swapped[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= f.lower[i] * b[i];
    }
    // back substitution
    b[n - 1] /= f.d[n - 1];
    if n >= 2 {
        b[n - 2] = (b[n - 2] - f.u1[n - 2] * b[n - 1]) / f.d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - f.u1[i] * b[i + 1] - f.u2[i] * b[i + 2]) / f.d[i];
    }
}
