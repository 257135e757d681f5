use super::NumericsError;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizer of a quasi-concave `f` on `[lo, hi]` by golden-section search.
///
/// Returns `(argmax, f(argmax))`. The endpoints are compared against the final
/// interior point so that boundary maximizers are returned exactly.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) || !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best_f {
            best_x = x;
            best_f = fx;
        }
    }
    Ok((best_x, best_f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_parabola() {
        let (x, fx) = golden_section_max(|x| -(x - 3.0) * (x - 3.0), 0.0, 10.0, 1e-9).unwrap();
        assert!((x - 3.0).abs() < 1e-8);
        assert_eq!(fx, -(x - 3.0) * (x - 3.0));
    }

    #[test]
    fn boundary_maximizer() {
        let (x, fx) = golden_section_max(|x| x, 0.0, 1.0, 1e-9).unwrap();
        assert_eq!(x, 1.0);
        assert_eq!(fx, 1.0);
    }

    #[test]
    fn x_exp_minus_x() {
        // dense grid oracle for argmax of x e^{-x} on [0, 10]
        let f = |x: f64| x * (-x).exp();
        let mut best = (0.0, f(0.0));
        let n = 1_000_000;
        for i in 0..=n {
            let x = 10.0 * i as f64 / n as f64;
            if f(x) > best.1 {
                best = (x, f(x));
            }
        }
        assert!((best.0 - 1.0).abs() <= 1e-5);
        let (x, fx) = golden_section_max(f, 0.0, 10.0, 1e-9).unwrap();
        assert!((x - best.0).abs() < 1e-4);
        assert!(fx >= best.1 - 1e-15);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(golden_section_max(|x| x, 1.0, 0.0, 1e-6).is_err());
        assert!(golden_section_max(|x| x, 0.0, f64::INFINITY, 1e-6).is_err());
    }
}
