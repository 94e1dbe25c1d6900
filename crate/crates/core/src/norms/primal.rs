//! Primal side: minimize `Σ_j w_j ‖g_j‖_{q_j}` subject to `Σ_j g_j = |g|`.
//!
//! Sharing-form ADMM. Each block update is the proximal step of a weighted
//! `q_j`-norm, computed as the residual minus its projection onto the dual
//! `ℓ_{P_j}` ball. The shared multiplier doubles as a dual witness, so the
//! solver reports its own bracket.

use num_complex::Complex64;

use super::{
    grand_of_abs, lp_of_abs, project_lp_ball, relative_gap, small_cost_of_abs, NormCertificate,
    SmallParams, SolverOptions,
};
use crate::spectral::GFunction;

/// Optional warm start for the primal solver.
#[derive(Debug, Clone, Default)]
pub struct PrimalStart {
    /// One block per grid point; must sum to `g`.
    pub blocks: Option<Vec<GFunction>>,
    /// A known dual value; the solver stops once its cost is within tolerance of it.
    pub target_lower: Option<f64>,
}

const ADAPT_EVERY: usize = 25;

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    s
}

pub fn small_norm_primal(g: &GFunction, params: &SmallParams, opts: &SolverOptions) -> NormCertificate {
    small_norm_primal_from(g, params, opts, &PrimalStart::default())
}

pub fn small_norm_primal_from(
    g: &GFunction,
    params: &SmallParams,
    opts: &SolverOptions,
    start: &PrimalStart,
) -> NormCertificate {
    let n = g.len();
    let nf = n as f64;
    // Work on sorted magnitudes so the result depends only on the rearrangement of |g|.
    let raw: Vec<f64> = g.values().iter().map(|v| v.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| raw[x].partial_cmp(&raw[y]).expect("finite"));
    let abs: Vec<f64> = order.iter().map(|&x| raw[x]).collect();
    let gv: Vec<Complex64> = order.iter().map(|&x| g.at(x)).collect();
    let scale = abs.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return NormCertificate::zero(g, params, opts);
    }
    let b: Vec<f64> = abs.iter().map(|v| v / scale).collect();
    let w = params.weights();
    let q = params.exponents();
    let pexp = params.grand().exponents();
    let jn = w.len();
    // N_j(u) = c_j ‖u‖_{q_j, sum}
    let cj: Vec<f64> = q
        .iter()
        .zip(&w)
        .map(|(&q, &w)| if q.is_infinite() { w } else { w * nf.powf(-1.0 / q) })
        .collect();
    let cost = |blocks: &[Vec<f64>]| {
        let s: Vec<Vec<f64>> = blocks.iter().map(|b| sorted(b)).collect();
        small_cost_of_abs(&s, params)
    };

    let mut z: Vec<Vec<f64>> = match &start.blocks {
        Some(blocks) if blocks.len() == jn => blocks
            .iter()
            .map(|blk| {
                order
                    .iter()
                    .zip(&gv)
                    .map(|(&x, gv)| {
                        let r = gv.norm();
                        if r > 0.0 { (blk.at(x) * gv.conj() / r).re / scale } else { 0.0 }
                    })
                    .collect()
            })
            .collect(),
        _ => {
            let best = (0..jn)
                .min_by(|&a, &c| {
                    let ca = w[a] * lp_of_abs(&sorted(&b), q[a]);
                    let cc = w[c] * lp_of_abs(&sorted(&b), q[c]);
                    ca.partial_cmp(&cc).expect("finite")
                })
                .expect("nonempty grid");
            (0..jn).map(|j| if j == best { b.clone() } else { vec![0.0; n] }).collect()
        }
    };
    // Enforce Σ z_j = b exactly.
    for x in 0..n {
        let s: f64 = z.iter().map(|blk| blk[x]).sum();
        let fix = (b[x] - s) / jn as f64;
        z.iter_mut().for_each(|blk| blk[x] += fix);
    }

    let mut rho = cj.iter().copied().fold(f64::INFINITY, f64::min) / nf.sqrt();
    let mut y = vec![0.0; n];
    let mut u = z.clone();
    let mut best_upper = cost(&z);
    let mut best_blocks = z.clone();
    let mut best_lower = 0.0;
    let mut best_h = vec![0.0; n];
    let mut iterations = 0;

    let target = |lower: f64| start.target_lower.map_or(lower, |t| t.max(lower));
    while iterations < opts.max_iter {
        iterations += 1;
        for j in 0..jn {
            let arg: Vec<f64> = z[j].iter().zip(&y).map(|(z, y)| z - y).collect();
            let proj = project_lp_ball(&arg, pexp[j], cj[j] / rho);
            u[j] = arg.iter().zip(&proj).map(|(a, p)| a - p).collect();
        }
        let z_prev = std::mem::take(&mut z);
        let mut shortfall = vec![0.0; n];
        for x in 0..n {
            let s: f64 = (0..jn).map(|j| u[j][x] + y[x]).sum();
            shortfall[x] = (b[x] - s) / jn as f64;
        }
        z = (0..jn)
            .map(|j| (0..n).map(|x| u[j][x] + y[x] + shortfall[x]).collect())
            .collect();
        for x in 0..n {
            y[x] = -shortfall[x];
        }

        let c = cost(&z);
        if c < best_upper {
            best_upper = c;
            best_blocks = z.clone();
        }
        // Dual candidate: h = n ρ max(-y, 0) under the mean pairing.
        let h: Vec<f64> = y.iter().map(|&v| (-v * rho * nf).max(0.0)).collect();
        let gh = grand_of_abs(&sorted(&h), params.grand());
        if gh > 0.0 {
            let val = b.iter().zip(&h).map(|(b, h)| b * h).sum::<f64>() / nf / gh;
            if val > best_lower {
                best_lower = val;
                best_h = h.iter().map(|v| v / gh).collect();
            }
        }
        if relative_gap(target(best_lower), best_upper) <= opts.tol_rel * 0.5 {
            break;
        }

        let r: f64 = (0..jn)
            .map(|j| u[j].iter().zip(&z[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        let s: f64 = rho
            * (0..jn)
                .map(|j| z[j].iter().zip(&z_prev[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                .sum::<f64>()
                .sqrt();
        if iterations % ADAPT_EVERY != 0 {
            continue;
        }
        if r > 10.0 * s {
            rho *= 2.0;
            y.iter_mut().for_each(|v| *v /= 2.0);
        } else if s > 10.0 * r {
            rho /= 2.0;
            y.iter_mut().for_each(|v| *v *= 2.0);
        }
    }

    let phase = |z: Complex64| {
        let r = z.norm();
        if r > 0.0 { z / r } else { Complex64::new(1.0, 0.0) }
    };
    let unsort = |vals: &[f64], f: &dyn Fn(Complex64, f64) -> Complex64| {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, &x) in order.iter().enumerate() {
            out[x] = f(gv[k], vals[k]);
        }
        GFunction::new(g.spec(), out).expect("finite values")
    };
    let blocks = best_blocks.iter().map(|blk| unsort(blk, &|gv, v| phase(gv) * (v * scale))).collect();
    let h = unsort(&best_h, &|gv, v| phase(gv).conj() * v);
    NormCertificate::assemble(
        (scale * best_lower).min(scale * best_upper),
        scale * best_upper,
        iterations,
        params,
        opts,
        h,
        blocks,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::norms::{single_block_bound, small_norm_dual, GridSpec};
    use crate::rng::Gaussian;

    #[test]
    fn matches_dual_on_random_inputs() {
        let g = GroupSpec::cyclic(16).unwrap();
        let mut rng = Gaussian::new(31);
        let params = SmallParams::geometric(3.0, 1.0, GridSpec { count: 6, min_fraction: 1e-3 }).unwrap();
        let opts = SolverOptions::default();
        for _ in 0..5 {
            let f = rng.g_function(&g);
            let primal = small_norm_primal(&f, &params, &opts);
            let dual = small_norm_dual(&f, &params, &opts);
            assert!(primal.upper >= dual.lower - 1e-12);
            assert!((primal.upper - dual.lower) / primal.upper <= 1e-3, "{} vs {}", primal.upper, dual.lower);
            assert!(primal.lower <= dual.upper + 1e-12);
            assert!(primal.upper <= single_block_bound(&f, &params).0 + 1e-12);
            assert!(primal.reconstruction().unwrap().max_abs_diff(&f) < 1e-10);
        }
    }

    #[test]
    fn constant_reduces_to_lebesgue() {
        let g = GroupSpec::cyclic(8).unwrap();
        let one = GFunction::constant(&g, Complex64::new(1.0, 0.0));
        let params = SmallParams::geometric(2.0, 0.0, GridSpec { count: 12, min_fraction: 1e-3 }).unwrap();
        let cert = small_norm_primal(&one, &params, &SolverOptions::default());
        assert!((cert.upper - 1.0).abs() < 1e-9);
    }
}
