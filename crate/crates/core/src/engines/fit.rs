//! Small numeric helpers shared by the engines.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub intercept: f64,
    pub slope: f64,
}

impl Line {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Abscissa where two lines cross, `None` when they are parallel.
    pub fn intersect(&self, other: &Line) -> Option<f64> {
        let ds = self.slope - other.slope;
        let scale = self.slope.abs().max(other.slope.abs()).max(1.0);
        if ds.abs() <= 1e-12 * scale {
            None
        } else {
            Some((other.intercept - self.intercept) / ds)
        }
    }
}

/// Ordinary least squares on centred data. Returns the line and its sum of
/// squared residuals, or `None` with fewer than two distinct abscissae.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(Line, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let line = Line {
        intercept: my - slope * mx,
        slope,
    };
    let ssr = points.iter().map(|&(x, y)| (y - line.at(x)).powi(2)).sum();
    Some((line, ssr))
}

/// Piecewise-linear interpolation over points sorted by x, clamped to the end
/// values outside their range.
pub fn interpolate_clamped(points: &[(f64, f64)], x: f64) -> f64 {
    match points {
        [] => 0.0,
        [only] => only.1,
        _ => {
            let first = points[0];
            let last = points[points.len() - 1];
            if x <= first.0 {
                return first.1;
            }
            if x >= last.0 {
                return last.1;
            }
            // first index with xi > x; 1 <= hi < len
            let hi = points.partition_point(|p| p.0 <= x);
            let (x0, y0) = points[hi - 1];
            let (x1, y1) = points[hi];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}
