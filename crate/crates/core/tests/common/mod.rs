//! Oracles that share no code with the library.

/// Finite-difference Newton solve of `v'' + a² sin v = z`, `v(0) = v(1) = 0`
/// on `n` uniform nodes. Returns the nodal values including both endpoints.
pub fn newton_collocation(a: f64, z: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let m = n - 2;
    let a2 = a * a;
    let t: Vec<f64> = (1..=m).map(|i| i as f64 * h).collect();
    let mut v = vec![0.0; m];
    for _ in 0..50 {
        let at = |v: &[f64], i: isize| {
            if i < 0 || i as usize >= m {
                0.0
            } else {
                v[i as usize]
            }
        };
        let res: Vec<f64> = (0..m)
            .map(|i| {
                let j = i as isize;
                (at(&v, j - 1) - 2.0 * v[i] + at(&v, j + 1)) / (h * h) + a2 * v[i].sin() - z(t[i])
            })
            .collect();
        let diag: Vec<f64> = v.iter().map(|x| -2.0 / (h * h) + a2 * x.cos()).collect();
        let step = thomas(1.0 / (h * h), &diag, &res);
        let mut biggest: f64 = 0.0;
        for (x, d) in v.iter_mut().zip(&step) {
            *x -= d;
            biggest = biggest.max(d.abs());
        }
        if biggest < 1e-14 {
            break;
        }
    }
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    out.extend(v);
    out.push(0.0);
    out
}

/// Tridiagonal solve with constant off-diagonals.
fn thomas(off: f64, diag: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = off / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let denom = diag[i] - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
