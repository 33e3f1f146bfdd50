//! Small numeric helpers shared across modules.

/// SplitMix64 generator. Used wherever deterministic sample points are
/// needed from a `u64` seed without dragging in an RNG dependency.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Identity matrix.
#[inline]
pub fn mat_identity<const P: usize>() -> [[f64; P]; P] {
    let mut m = [[0.0; P]; P];
    for i in 0..P {
        m[i][i] = 1.0;
    }
    m
}

/// `(a b)[i][j] = sum_k a[i][k] b[k][j]`.
#[inline]
pub fn mat_mul<const P: usize>(a: &[[f64; P]; P], b: &[[f64; P]; P]) -> [[f64; P]; P] {
    let mut c = [[0.0; P]; P];
    for i in 0..P {
        for k in 0..P {
            let aik = a[i][k];
            for j in 0..P {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// `(m v)[i] = sum_j m[i][j] v[j]`.
#[inline]
pub fn mat_vec<const P: usize>(m: &[[f64; P]; P], v: &[f64; P]) -> [f64; P] {
    let mut r = [0.0; P];
    for i in 0..P {
        for j in 0..P {
            r[i] += m[i][j] * v[j];
        }
    }
    r
}

/// Least-squares line fit `y = slope * x + intercept`.
/// Returns `(slope, intercept, residual)` where residual is the RMS of the
/// fit deviations.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Convergence-order fit: slope of log(err) against log(h).
/// Levels with error exactly zero are clipped to 1e-300 to keep logs finite.
pub fn fit_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.max(1e-300).ln()).collect();
    fit_line(&xs, &ys).0
}
