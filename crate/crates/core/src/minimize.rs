//! Derivative-free minimizers for the convex inner problems.

const INV_PHI: f64 = 0.618_033_988_749_894_8; // (√5 − 1) / 2

/// Golden-section search for a convex `f` on `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`. Returns `(argmin, min)`; the endpoints are
/// compared too, so minima on the boundary are found exactly.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa0 = f(a);
    let fb0 = f(b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    [(lo, fa0), (hi, fb0), (c, fc), (d, fd), (mid, fm)]
        .into_iter()
        .fold(
            (mid, fm),
            |best, cand| if cand.1 < best.1 { cand } else { best },
        )
}

/// Convex minimization in several variables by cyclic line searches along
/// coordinate and pairwise-diagonal directions. Used only for norms that are
/// not absolute, where no closed form exists. The result is an upper bound on
/// the true minimum; diagonal moves keep it from stalling on the kinks of
/// polyhedral norms in practice.
pub fn pattern_descent<F: Fn(&[f64]) -> f64>(
    f: F,
    start: Vec<f64>,
    radius: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut x = start;
    let mut fx = f(&x);
    if n == 0 {
        return (x, fx);
    }
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        directions.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = std::f64::consts::FRAC_1_SQRT_2;
                e[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                directions.push(e);
            }
        }
    }
    let mut r = radius.max(1e-6);
    for _ in 0..500 {
        let before = fx;
        let mut largest_move: f64 = 0.0;
        for dir in &directions {
            let line = |t: f64| {
                let p: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + t * d).collect();
                f(&p)
            };
            let (t, ft) = golden_section(line, -r, r, 1e-12 * (1.0 + r));
            if ft < fx {
                for (a, d) in x.iter_mut().zip(dir) {
                    *a += t * d;
                }
                fx = ft;
                largest_move = largest_move.max(t.abs());
            }
        }
        if before - fx <= 1e-14 * (1.0 + fx.abs()) {
            break;
        }
        r = (4.0 * largest_move).max(1e-9);
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_quadratic_minimum() {
        let (x, fx) = golden_section(|t| (t - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_handles_boundary_and_kinks() {
        let (x, fx) = golden_section(|t| t, -1.0, 1.0, 1e-10);
        assert_eq!(x, -1.0);
        assert_eq!(fx, -1.0);
        let (_, fx) = golden_section(|t| (t - 1.0).abs() + (t - 3.0).abs(), -4.0, 4.0, 1e-10);
        assert!((fx - 2.0).abs() < 1e-9);
    }

    #[test]
    fn pattern_descent_on_coupled_l1() {
        // min |a − 1| + |b − 2| + |a + b − 3| = 0 at (1, 2).
        let f = |p: &[f64]| (p[0] - 1.0).abs() + (p[1] - 2.0).abs() + (p[0] + p[1] - 3.0).abs();
        let (_, fx) = pattern_descent(f, vec![0.0, 0.0], 4.0);
        assert!(fx < 1e-8, "{fx}");
    }
}
