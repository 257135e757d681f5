
use super::NumericsError;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Ellipsoid `{x : (x - c)^T A^{-1} (x - c) <= 1}` in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid2D {
    pub center: [f64; 2],
    pub shape: [[f64; 2]; 2],
}

impl Ellipsoid2D {
    pub fn ball(center: [f64; 2], radius: f64) -> Self {
        let r2 = radius * radius;
        Self {
            center,
            shape: [[r2, 0.0], [0.0, r2]],
        }
    }

    pub fn det(&self) -> f64 {
        self.shape[0][0] * self.shape[1][1] - self.shape[0][1] * self.shape[1][0]
    }

    /// `g^T A g`
    pub fn quad_form(&self, g: [f64; 2]) -> f64 {
        let a = &self.shape;
        g[0] * (a[0][0] * g[0] + a[0][1] * g[1]) + g[1] * (a[1][0] * g[0] + a[1][1] * g[1])
    }

    pub fn is_positive_definite(&self) -> bool {
        let a = &self.shape;
        a[0][0] > 0.0 && self.det() > 0.0 && (a[0][1] - a[1][0]).abs() <= 1e-12 * (a[0][0] + a[1][1])
    }
}

/// Central-cut update keeping the half `{x : g^T (x - c) <= 0}`.
pub fn ellipsoid_step(e: &Ellipsoid2D, subgradient: [f64; 2]) -> Result<Ellipsoid2D, NumericsError> {
    const N: f64 = 2.0;
    let [g0, g1] = subgradient;
    let norm = g0.hypot(g1);
    if !(norm >= 1e-300) || !norm.is_finite() {
        return Err(NumericsError::DegenerateGradient(g0, g1));
    }
    // unit-scale the cut first so gᵀAg does not under/overflow
    let g = [g0 / norm, g1 / norm];
    let gag = e.quad_form(g);
    if !(gag > 0.0) || !gag.is_finite() {
        return Err(NumericsError::DegenerateGradient(g0, g1));
    }
    let s = gag.sqrt();
    let a = &e.shape;
    let b = [
        (a[0][0] * g[0] + a[0][1] * g[1]) / s,
        (a[1][0] * g[0] + a[1][1] * g[1]) / s,
    ];
    let center = [
        e.center[0] - b[0] / (N + 1.0),
        e.center[1] - b[1] / (N + 1.0),
    ];
    let scale = N * N / (N * N - 1.0);
    let k = 2.0 / (N + 1.0);
    let mut shape = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            shape[i][j] = scale * (a[i][j] - k * b[i] * b[j]);
        }
    }
    let off = 0.5 * (shape[0][1] + shape[1][0]);
    shape[0][1] = off;
    shape[1][0] = off;
    Ok(Ellipsoid2D { center, shape })
}

/// `sqrt(g^T A g) <= tol`: the remaining gap bound of the ellipsoid method.
pub fn ellipsoid_converged(e: &Ellipsoid2D, subgradient: [f64; 2], tol: f64) -> bool {
    e.quad_form(subgradient).max(0.0).sqrt() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_cut_moves_center_against_gradient() {
        let e = Ellipsoid2D::ball([1.0, 1.0], 10.0);
        let next = ellipsoid_step(&e, [1.0, 0.0]).unwrap();
        assert!(next.center[0] < 1.0);
        assert_eq!(next.center[1], 1.0);
        assert!(next.is_positive_definite());
    }

    #[test]
    fn volume_contracts_every_step() {
        let mut e = Ellipsoid2D::ball([1.0, 1.0], 10.0);
        let cuts = [[1.0, 0.0], [0.3, -2.0], [-1.0, 1.0], [5.0, 5.0], [0.0, -1.0]];
        for g in cuts.iter().cycle().take(40) {
            let next = ellipsoid_step(&e, *g).unwrap();
            // area ratio sqrt(det'/det) is at most e^{-1/(2n)} with n = 2
            let ratio = (next.det() / e.det()).sqrt();
            assert!(ratio < (-0.25f64).exp(), "ratio {ratio}");
            assert!(next.is_positive_definite());
            e = next;
        }
    }

    #[test]
    fn degenerate_gradient() {
        let e = Ellipsoid2D::ball([0.0, 0.0], 1.0);
        assert!(ellipsoid_step(&e, [0.0, 0.0]).is_err());
        assert!(ellipsoid_step(&e, [1e-301, 0.0]).is_err());
        assert!(ellipsoid_step(&e, [f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn stopping_rule() {
        let tiny = Ellipsoid2D::ball([0.0, 0.0], 1e-10);
        assert!(ellipsoid_converged(&tiny, [1.0, 0.0], 1e-6));
        let big = Ellipsoid2D::ball([0.0, 0.0], 10.0);
        assert!(!ellipsoid_converged(&big, [0.0, 1.0], 1e-6));
        let four = Ellipsoid2D::ball([0.0, 0.0], 2.0);
        assert!(ellipsoid_converged(&four, [1.0, 0.0], 2.0));
    }

    #[test]
    fn toy_dual_converges_to_known_minimizer() {
        // minimize max(|x - 2|, |y - 3|), minimizer (2, 3)
        let f = |c: [f64; 2]| (c[0] - 2.0).abs().max((c[1] - 3.0).abs());
        let mut e = Ellipsoid2D::ball([1.0, 1.0], 100.0);
        let mut best = e.center;
        for _ in 0..200 {
            let c = e.center;
            if f(c) < f(best) {
                best = c;
            }
            let dx = c[0] - 2.0;
            let dy = c[1] - 3.0;
            let g = if dx.abs() >= dy.abs() {
                [dx.signum(), 0.0]
            } else {
                [0.0, dy.signum()]
            };
            if dx == 0.0 && dy == 0.0 {
                break;
            }
            e = ellipsoid_step(&e, g).unwrap();
        }
        assert!((best[0] - 2.0).abs() < 1e-3 && (best[1] - 3.0).abs() < 1e-3, "{best:?}");
        assert!((e.center[0] - 2.0).abs() < 1e-3 && (e.center[1] - 3.0).abs() < 1e-3);
    }
}
