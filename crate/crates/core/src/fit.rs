//! Small least-squares fits used by the validation suite and the sweep
//! summaries.

/// Ordinary least-squares line `y = slope * t + intercept`.
pub fn linear_fit(ts: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(ts.len(), ys.len());
    let n = ts.len() as f64;
    let mean_t: f64 = ts.iter().sum::<f64>() / n;
    let mean_y: f64 = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, y) in ts.iter().zip(ys) {
        cov += (t - mean_t) * (y - mean_y);
        var += (t - mean_t) * (t - mean_t);
    }
    let slope = cov / var;
    (slope, mean_y - slope * mean_t)
}

/// Fits `y = a cos(w t) + b sin(w t) + c` with `w` free inside
/// `[w_lo, w_hi]`; returns `(w, amplitude)` minimizing the residual.
///
/// The inner problem is linear; the frequency is located by golden-section
/// search on the residual, which avoids the positive/negative-frequency
/// cross-talk a periodogram peak suffers on short windows.
pub fn harmonic_fit(ts: &[f64], ys: &[f64], w_lo: f64, w_hi: f64) -> (f64, f64) {
    assert_eq!(ts.len(), ys.len());
    let golden = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (w_lo, w_hi);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let mut fc = harmonic_residual(ts, ys, c);
    let mut fd = harmonic_residual(ts, ys, d);
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = harmonic_residual(ts, ys, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = harmonic_residual(ts, ys, d);
        }
        if b - a < 1e-12 * (1.0 + w_hi.abs()) {
            break;
        }
    }
    let w = 0.5 * (a + b);
    let (ca, cb, _) = harmonic_coefficients(ts, ys, w);
    (w, ca.hypot(cb))
}

fn harmonic_residual(ts: &[f64], ys: &[f64], w: f64) -> f64 {
    let (a, b, c) = harmonic_coefficients(ts, ys, w);
    ts.iter()
        .zip(ys)
        .map(|(t, y)| {
            let r = y - a * (w * t).cos() - b * (w * t).sin() - c;
            r * r
        })
        .sum()
}

/// Normal equations for the linear subproblem at fixed frequency.
fn harmonic_coefficients(ts: &[f64], ys: &[f64], w: f64) -> (f64, f64, f64) {
    let n = ts.len() as f64;
    let (mut scc, mut scs, mut sss, mut sc, mut ss) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut syc, mut sys, mut sy) = (0.0, 0.0, 0.0);
    for (t, y) in ts.iter().zip(ys) {
        let (s, c) = (w * t).sin_cos();
        scc += c * c;
        scs += c * s;
        sss += s * s;
        sc += c;
        ss += s;
        syc += y * c;
        sys += y * s;
        sy += y;
    }
    // solve the 3x3 system [scc scs sc; scs sss ss; sc ss n] (a b c)^T = rhs
    let m = [[scc, scs, sc], [scs, sss, ss], [sc, ss, n]];
    let rhs = [syc, sys, sy];
    solve3(m, rhs)
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> (f64, f64, f64) {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= factor * m[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let x2 = b[2] / m[2][2];
    let x1 = (b[1] - m[1][2] * x2) / m[1][1];
    let x0 = (b[0] - m[0][1] * x1 - m[0][2] * x2) / m[0][0];
    (x0, x1, x2)
}
