use num_complex::Complex64;

use super::kernel_apply;
use crate::error::Result;
use crate::group::GroupSpec;
use crate::spectral::{fourier_forward, GFunction};

/// Radii `0..=diameter`, one per distinct ball.
pub fn hl_radii(spec: &GroupSpec) -> Vec<usize> {
    (0..=spec.diameter()).collect()
}

/// `χ_{B_r} / λ(B_r)`, which has `‖K‖₁ = 1`.
pub fn hl_kernel(spec: &GroupSpec, r: usize) -> GFunction {
    let ball = spec.ball(r as f64);
    let height = spec.order() as f64 / ball.len() as f64;
    let mut v = vec![Complex64::new(0.0, 0.0); spec.order()];
    for i in ball {
        v[i] = Complex64::new(height, 0.0);
    }
    GFunction::new(spec, v).expect("finite kernel")
}

/// `max_r mean_{y ∈ B_r} |f(x-y) g(x+y)|`, evaluated through the difference-symbol kernel path.
pub fn hl_maximal(f: &GFunction, g: &GFunction) -> Result<GFunction> {
    f.same_spec(g)?;
    let spec = f.spec();
    let (af, ag) = (f.abs(), g.abs());
    let mut best = vec![0.0f64; spec.order()];
    for r in hl_radii(spec) {
        let avg = kernel_apply(&fourier_forward(&hl_kernel(spec, r)), &af, &ag)?;
        for (b, v) in best.iter_mut().zip(avg.values()) {
            *b = b.max(v.re);
        }
    }
    Ok(GFunction::from_fn(spec, |x| Complex64::new(best[x], 0.0)))
}

/// Direct ball averages.
pub fn hl_maximal_direct(f: &GFunction, g: &GFunction) -> Result<GFunction> {
    f.same_spec(g)?;
    let spec = f.spec();
    let balls: Vec<Vec<usize>> = hl_radii(spec).iter().map(|&r| spec.ball(r as f64)).collect();
    Ok(GFunction::from_fn(spec, |x| {
        let m = balls
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&y| (f.at(spec.sub_idx(x, y)) * g.at(spec.add_idx(x, y))).norm())
                    .sum::<f64>()
                    / b.len() as f64
            })
            .fold(0.0, f64::max);
        Complex64::new(m, 0.0)
    }))
}
