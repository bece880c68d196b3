//! Adaptive Simpson quadrature for smooth real integrands.

const MAX_DEPTH: u32 = 50;

/// ∫ f over [a, b] to relative tolerance `rel_tol` (absolute floor
/// `rel_tol · 1e-3` for integrals near zero).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Coarse pass sets the absolute scale the recursion aims for.
    let n = 64;
    let h = (b - a) / n as f64;
    let coarse: f64 = (0..n)
        .map(|k| {
            let x0 = a + k as f64 * h;
            let x1 = x0 + h;
            simpson(f(x0), f(0.5 * (x0 + x1)), f(x1), h)
        })
        .sum();
    let tol = rel_tol * coarse.abs().max(1e-3) / n as f64;
    (0..n)
        .map(|k| {
            let x0 = a + k as f64 * h;
            let x1 = if k + 1 == n { b } else { x0 + h };
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = simpson(f0, fm, f1, x1 - x0);
            refine(&f, x0, x1, f0, fm, f1, whole, tol, MAX_DEPTH)
        })
        .sum()
}

fn simpson(f0: f64, fm: f64, f1: f64, width: f64) -> f64 {
    width * (f0 + 4.0 * fm + f1) / 6.0
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-12);
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate(|x: f64| (-x * x).exp(), -20.0, 20.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-10), 0.0);
    }
}
