//! Euclidean projection onto `{y : Σ|y_i|^P ≤ r^P}`.

/// Projects `x` onto the `ℓ_P` ball of radius `r` (sum form), `1 ≤ P < ∞`.
///
/// For `P > 1` the multiplier `λ` of `y + λ P y^{P-1} = |x_i|` is found by a
/// safeguarded Newton/bisection search; each per-point root is solved in
/// log coordinates, where the equation is convex and Newton is monotone.
pub fn project_lp_ball(x: &[f64], p: f64, r: f64) -> Vec<f64> {
    assert!(p >= 1.0 && p.is_finite(), "exponent {p} must lie in [1, inf)");
    if r <= 0.0 {
        return vec![0.0; x.len()];
    }
    let a: Vec<f64> = x.iter().map(|v| v.abs() / r).collect();
    if a.iter().map(|&v| v.powf(p)).sum::<f64>() <= 1.0 {
        return x.to_vec();
    }
    let y = if p == 1.0 { simplex_threshold(&a) } else { lp_multiplier(&a, p) };
    x.iter().zip(y).map(|(&xi, yi)| xi.signum() * yi * r).collect()
}

fn simplex_threshold(a: &[f64]) -> Vec<f64> {
    let mut s = a.to_vec();
    s.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (k, &v) in s.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (k + 1) as f64;
        if v > t {
            tau = t;
        } else {
            break;
        }
    }
    a.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Root of `y + c y^{P-1} = a` on `(0, a]`, with its derivative in `c`.
fn point_root(a: f64, c: f64, p: f64) -> (f64, f64) {
    if a == 0.0 {
        return (0.0, 0.0);
    }
    let mut z = a.ln();
    for _ in 0..100 {
        let ez = z.exp();
        let ep = ((p - 1.0) * z).exp();
        let h = ez + c * ep - a;
        let dh = ez + c * (p - 1.0) * ep;
        let step = h / dh;
        z -= step;
        if step.abs() < 1e-15 * z.abs().max(1.0) {
            break;
        }
    }
    let y = z.exp();
    let dy = -y.powf(p - 1.0) / (1.0 + c * (p - 1.0) * y.powf(p - 2.0));
    (y, dy)
}

fn lp_multiplier(a: &[f64], p: f64) -> Vec<f64> {
    // φ(λ) = Σ y_i(λ)^P - 1 is decreasing; work in s = ln λ.
    let phi = |s: f64| -> (f64, f64, Vec<f64>) {
        let c = p * s.exp();
        let mut val = -1.0;
        let mut dval = 0.0;
        let mut ys = Vec::with_capacity(a.len());
        for &ai in a {
            let (y, dy) = point_root(ai, c, p);
            val += y.powf(p);
            dval += p * y.powf(p - 1.0) * dy * c;
            ys.push(y);
        }
        (val, dval, ys)
    };
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut f_lo = phi(lo).0;
    if f_lo > 0.0 {
        hi = 1.0;
        while phi(hi).0 > 0.0 {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        while f_lo <= 0.0 {
            hi = lo;
            lo -= 2.0;
            f_lo = phi(lo).0;
        }
    }
    let mut s = 0.5 * (lo + hi);
    let mut ys = Vec::new();
    for _ in 0..200 {
        let (v, dv, y) = phi(s);
        ys = y;
        if v.abs() < 1e-15 {
            break;
        }
        if v > 0.0 { lo = s } else { hi = s }
        let newton = s - v / dv;
        s = if dv < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 {
            break;
        }
    }
    ys
}
