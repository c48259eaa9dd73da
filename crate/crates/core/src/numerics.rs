//! Small numerical kernels shared by the profile builders: adaptive
//! Gauss-Kronrod quadrature, an embedded Dormand-Prince stepper and a
//! safeguarded scalar root finder.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("quadrature did not converge on [{a}, {b}] (estimated error {error:.3e})")]
    QuadratureNonConvergence { a: f64, b: f64, error: f64 },
    #[error("root is not bracketed on [{a}, {b}] (f(a)={fa:.3e}, f(b)={fb:.3e})")]
    NotBracketed { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("ODE step size underflow at t={t}")]
    StepUnderflow { t: f64 },
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Intervals are bisected until the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, NumericsError> {
    const MAX_INTERVALS: usize = 20_000;
    if a == b {
        return Ok(0.0);
    }
    let (i0, e0) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, i0, e0)];
    let mut total = i0;
    let mut err = e0;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if pieces.len() >= MAX_INTERVALS {
            return Err(NumericsError::QuadratureNonConvergence { a, b, error: err });
        }
        // Split the interval carrying the largest error.
        let (k, _) = pieces
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, ik, ek) = pieces.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(NumericsError::QuadratureNonConvergence { a, b, error: err });
        }
        let (il, el) = gk15(&f, lo, mid);
        let (ir, er) = gk15(&f, mid, hi);
        total += il + ir - ik;
        err += el + er - ek;
        pieces.push((lo, mid, il, el));
        pieces.push((mid, hi, ir, er));
    }
    // Re-sum to shed the cancellation from the running updates.
    Ok(pieces.iter().map(|p| p.2).sum())
}

/// Finds the root of a function that is increasing on `[lo, hi]`.
///
/// Bisection keeps the bracket, a Newton step is accepted whenever it lands
/// inside it. `df` is the derivative of `f`.
pub fn monotone_root<F, D>(
    f: F,
    df: D,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo > 0.0 || fhi < 0.0 {
        return Err(NumericsError::NotBracketed { a: lo, b: hi, fa: flo, fb: fhi });
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= x_tol * (1.0 + x.abs()) || hi - lo <= x_tol * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Dormand-Prince 5(4) integration of `y' = f(t, y)` from `t0` to `t1`
/// with a two-component state. Returns the state at `t1`.
///
/// `h` is the initial trial step and is updated with the last accepted
/// step size so consecutive calls can chain.
pub fn dopri5<F>(
    f: &F,
    t0: f64,
    y0: [f64; 2],
    t1: f64,
    h: &mut f64,
    tol: f64,
) -> Result<[f64; 2], NumericsError>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut step = h.abs().min(span).max(span * 1e-12);
    while dir * (t1 - t) > 0.0 {
        let last = step >= (t1 - t).abs();
        let hs = if last { (t1 - t).abs() } else { step };
        let hd = dir * hs;
        let mut k = [[0.0; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += hd * A[s][j] * kj[0];
                ys[1] += hd * A[s][j] * kj[1];
            }
            k[s] = f(t + C[s] * hd, ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][c];
                d4 += B4[s] * k[s][c];
            }
            y5[c] += hd * d5;
            let scale = tol * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((hd * (d5 - d4)).abs() / scale);
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hd };
            y = y5;
            *h = hs;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        step = hs * factor;
        if step < span * 1e-14 {
            return Err(NumericsError::StepUnderflow { t });
        }
    }
    Ok(y)
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, slope_std_err)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, se)
}

/// `n` points log-spaced between `a` and `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_integrates_gaussian() {
        let v = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-14, 1e-14).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn dopri_matches_exponential() {
        let f = |_t: f64, y: [f64; 2]| [y[1], -y[0]];
        let mut h = 0.1;
        let y = dopri5(&f, 0.0, [0.0, 1.0], 3.0, &mut h, 1e-13).unwrap();
        assert!((y[0] - 3.0f64.sin()).abs() < 1e-11);
        assert!((y[1] - 3.0f64.cos()).abs() < 1e-11);
        // backward integration
        let y = dopri5(&f, 0.0, [0.0, 1.0], -2.0, &mut h, 1e-13).unwrap();
        assert!((y[0] - (-2.0f64).sin()).abs() < 1e-11);
    }

    #[test]
    fn root_of_cubic() {
        let r = monotone_root(|x| x * x * x - 2.0, |x| 3.0 * x * x, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2.0f64.cbrt()).abs() < 1e-14);
        assert!(monotone_root(|x| x + 5.0, |_| 1.0, 0.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let (s, i, se) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (i + 1.0).abs() < 1e-14 && se < 1e-12);
    }
}
