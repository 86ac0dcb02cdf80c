use crate::error::{Error, Result};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Data("spline needs at least two matching points".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Data("spline knots must be strictly increasing".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let k = n - 2;
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..k {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        Ok(CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().expect("nonempty"))
    }

    fn locate(&self, t: f64) -> usize {
        self.x.partition_point(|&k| k <= t).clamp(1, self.x.len() - 1) - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// Exact integral of piece `i` from `x_i` to `x_i + u`.
    fn piece_integral(&self, i: usize, u: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        // With b = u/h, a = 1 − b, integrate in u.
        let b = u / h;
        let ia = h * (b - b * b / 2.0);
        let ib = h * b * b / 2.0;
        let ia3 = h * (1.0 - (1.0 - b).powi(4)) / 4.0;
        let ib3 = h * b.powi(4) / 4.0;
        y0 * ia + y1 * ib + (m0 * (ia3 - ia) + m1 * (ib3 - ib)) * h * h / 6.0
    }

    /// `∫_{x_0}^{T} s(t) dt`.
    pub fn integral_to(&self, t_end: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if t_end < lo || t_end > hi * (1.0 + 1e-12) {
            return Err(Error::Extrapolation { t: t_end, lo, hi });
        }
        let t_end = t_end.min(hi);
        let mut total = 0.0;
        for i in 0..self.x.len() - 1 {
            if self.x[i + 1] <= t_end {
                total += self.piece_integral(i, self.x[i + 1] - self.x[i]);
            } else {
                total += self.piece_integral(i, t_end - self.x[i]);
                break;
            }
        }
        Ok(total)
    }
}

/// `(1/T) ∫_0^T p(t)/p(0) dt` with a natural cubic spline through the data.
pub fn time_avg_survival(points: &[(f64, f64)], t_end: f64) -> Result<f64> {
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let s = CubicSpline::natural(&x, &y)?;
    let (lo, hi) = s.range();
    if lo.abs() > 1e-12 * hi.abs().max(1.0) {
        return Err(Error::Extrapolation { t: 0.0, lo, hi });
    }
    if !(t_end > 0.0) {
        return Err(Error::Data("averaging window must be positive".into()));
    }
    let p0 = y[0];
    if !(p0 > 0.0) {
        return Err(Error::Data("initial survival must be positive".into()));
    }
    Ok(s.integral_to(t_end)? / (p0 * t_end))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_average() {
        let pts: Vec<(f64, f64)> = (0..=50).map(|i| {
            let t = i as f64 / 50.0;
            (t, (-t).exp())
        }).collect();
        let v = time_avg_survival(&pts, 1.0).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 0.01 * 0.632);
    }

    #[test]
    fn constant_and_linear() {
        let c: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.4)).collect();
        assert!((time_avg_survival(&c, 4.0).unwrap() - 1.0).abs() < 1e-12);
        let l: Vec<(f64, f64)> = (0..=10).map(|i| (i as f64, 1.0 - i as f64 / 10.0)).collect();
        assert!((time_avg_survival(&l, 10.0).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn partial_window_and_extrapolation() {
        let l: Vec<(f64, f64)> = (0..=10).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let s = CubicSpline::natural(&l.iter().map(|p| p.0).collect::<Vec<_>>(), &l.iter().map(|p| p.1).collect::<Vec<_>>()).unwrap();
        assert!((s.integral_to(2.5).unwrap() - (2.5f64 * 2.5 + 2.5)).abs() < 1e-12);
        assert!((s.eval(3.3) - 7.6).abs() < 1e-12);
        assert!(matches!(time_avg_survival(&l, 11.0), Err(Error::Extrapolation { .. })));
    }
}
