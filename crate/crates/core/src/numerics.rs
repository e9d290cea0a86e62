//! Small shared numerical utilities: quadrature, line fits, scalar searches.

/// Composite Simpson rule on a uniform grid. Falls back to the trapezoid
/// rule on the last interval when the point count is even.
pub fn simpson_uniform(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * dx * (values[0] + values[1]);
    }
    let odd_count = if n % 2 == 1 { n } else { n - 1 };
    let mut sum = values[0] + values[odd_count - 1];
    for (i, &v) in values.iter().enumerate().take(odd_count - 1).skip(1) {
        sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = sum * dx / 3.0;
    if n % 2 == 0 {
        total += 0.5 * dx * (values[n - 2] + values[n - 1]);
    }
    total
}

/// Least-squares line fit y ≈ slope·x + intercept.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line fit");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept, r_squared }
}

/// Least-squares slope of y against x through the origin.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let den: f64 = xs.iter().map(|x| x * x).sum();
    num / den
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Returns (argmax, max).
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
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
    let x = 0.5 * (a + b);
    let fx = f(x);
    (x, fx)
}

/// Root of a strictly decreasing function g on (0, ∞) with g(0⁺) > 0,
/// solved by doubling bracket + bisection + Newton polish using the
/// supplied derivative. `s_init` seeds the bracket search.
///
/// Returns an error message when no sign change is found before `s_cap`.
pub fn decreasing_root(
    mut g: impl FnMut(f64) -> f64,
    mut dg: impl FnMut(f64) -> f64,
    s_init: f64,
    s_cap: f64,
    rel_tol: f64,
) -> Result<f64, String> {
    let mut lo = 0.0_f64;
    let mut hi = s_init.max(1e-12);
    let mut g_hi = g(hi);
    // walk down first if we started past the root
    while g_hi < 0.0 && hi > 1e-300 {
        lo = 0.0;
        hi *= 0.5;
        g_hi = g(hi);
        if g_hi > 0.0 {
            lo = hi;
            hi *= 2.0;
            g_hi = g(hi);
            break;
        }
    }
    while g_hi > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > s_cap {
            return Err(format!(
                "no sign change found below the bracket cap {s_cap:.3e}"
            ));
        }
        g_hi = g(hi);
    }
    // bisection to a loose bracket
    for _ in 0..80 {
        if (hi - lo) <= 1e-3 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish, safeguarded by the bracket
    let mut s = 0.5 * (lo + hi);
    for _ in 0..60 {
        let gs = g(s);
        if gs > 0.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
        let d = dg(s);
        let mut next = if d != 0.0 { s - gs / d } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= rel_tol * s.abs() {
            return Ok(next);
        }
        s = next;
    }
    Ok(s)
}

/// Deterministic uniform samples in [lo, hi) from a splitmix64 stream.
/// Used for reproducible randomized tests and diagnostics.
pub fn uniform_samples(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut state = seed;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        let u = (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        out.push(lo + u * (hi - lo));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let n = 101;
        let dx = 1.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * dx).powi(3)).collect();
        assert!((simpson_uniform(&vals, dx) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|t| -(t - 1.3) * (t - 1.3), 0.0, 4.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-9);
        assert!(fx.abs() < 1e-15);
    }

    #[test]
    fn decreasing_root_solves_exponential() {
        // g(s) = 2 - e^s, root at ln 2
        let root = decreasing_root(|s| 2.0 - s.exp(), |s| -s.exp(), 1.0, 1e6, 1e-14).unwrap();
        assert!((root - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn uniform_samples_deterministic_and_in_range() {
        let a = uniform_samples(42, 100, -1.0, 2.0);
        let b = uniform_samples(42, 100, -1.0, 2.0);
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| (-1.0..2.0).contains(&x)));
    }
}
