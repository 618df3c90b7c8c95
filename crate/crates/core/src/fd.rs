//! Finite-difference derivatives with Richardson extrapolation.

/// A derivative estimate and its extrapolation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Ridders' method: a tableau of central differences with shrinking step,
/// extrapolated to zero step. `h` is the initial step.
pub fn ridders<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> Derivative {
    const NTAB: usize = 10;
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const SAFE: f64 = 2.0;

    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut hh = h;
    a[0][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
    let mut best = Derivative {
        value: a[0][0],
        error: f64::INFINITY,
    };
    for i in 1..NTAB {
        hh /= CON;
        a[0][i] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let err = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if err <= best.error {
                best = Derivative {
                    value: a[j][i],
                    error: err,
                };
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * best.error {
            break;
        }
    }
    best
}

/// One Richardson step on central differences: `(4 D(h/2) - D(h)) / 3`.
pub fn central_richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |step: f64| (f(x + step) - f(x - step)) / (2.0 * step);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Gradient of a scalar field by Richardson-extrapolated central differences.
pub fn gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            central_richardson(
                |v| {
                    let mut y = x.to_vec();
                    y[i] = v;
                    f(&y)
                },
                x[i],
                h,
            )
        })
        .collect()
}

/// Hessian by central second differences, Richardson-extrapolated once.
/// Returned row-major as `n x n`.
pub fn hessian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let at = |shifts: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in shifts {
            y[i] += s;
        }
        f(&y)
    };
    let second = |i: usize, j: usize, step: f64| {
        if i == j {
            (at(&[(i, step)]) - 2.0 * f(x) + at(&[(i, -step)])) / (step * step)
        } else {
            (at(&[(i, step), (j, step)]) - at(&[(i, step), (j, -step)])
                - at(&[(i, -step), (j, step)])
                + at(&[(i, -step), (j, -step)]))
                / (4.0 * step * step)
        }
    };
    let mut out = vec![vec![0.0; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in i..n {
            let v = (4.0 * second(i, j, h / 2.0) - second(i, j, h)) / 3.0;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}
