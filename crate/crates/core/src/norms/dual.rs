//! Dual side: maximize `mean(|g| v)` over `v ≥ 0` in the unit grand ball.
//!
//! Solved with a log-barrier interior-point method. The Hessian is a
//! diagonal plus one rank-one term per grid point, so each Newton system is
//! solved with the Woodbury identity. A decomposition of `g` is recovered
//! from the barrier multipliers, which gives the matching primal bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{
    grand_of_abs, single_block_bound, small_cost_of_abs, NormCertificate, SmallParams, SolverOptions,
};
use crate::spectral::GFunction;

const BARRIER_GROWTH: f64 = 20.0;
const MAX_CENTERING: usize = 60;

struct Barrier<'a> {
    b: &'a [f64],
    exps: Vec<f64>,
    radii: Vec<f64>,
    n: f64,
}

impl Barrier<'_> {
    /// `c_j(v) = mean((v / R_j)^{P_j})`.
    fn constraints(&self, v: &[f64]) -> Vec<f64> {
        self.exps
            .iter()
            .zip(&self.radii)
            .map(|(&p, &r)| v.iter().map(|&x| (x / r).powf(p)).sum::<f64>() / self.n)
            .collect()
    }

    fn objective(&self, v: &[f64]) -> f64 {
        self.b.iter().zip(v).map(|(b, v)| b * v).sum::<f64>() / self.n
    }

    fn feasible(&self, v: &[f64]) -> Option<Vec<f64>> {
        if v.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let c = self.constraints(v);
        c.iter().all(|&c| c < 1.0).then_some(c)
    }

    fn value(&self, t: f64, v: &[f64], c: &[f64]) -> f64 {
        -t * self.objective(v)
            - c.iter().map(|&c| (1.0 - c).ln()).sum::<f64>()
            - v.iter().map(|&x| x.ln()).sum::<f64>()
    }

    /// `∇c_j` as rows.
    fn constraint_grads(&self, v: &[f64]) -> Vec<Vec<f64>> {
        self.exps
            .iter()
            .zip(&self.radii)
            .map(|(&p, &r)| v.iter().map(|&x| p * (x / r).powf(p - 1.0) / (r * self.n)).collect())
            .collect()
    }

    /// Newton direction and squared decrement at `v`.
    fn newton(&self, t: f64, v: &[f64], c: &[f64]) -> (Vec<f64>, f64) {
        let n = v.len();
        let jn = self.exps.len();
        let e = self.constraint_grads(v);
        let d: Vec<f64> = c.iter().map(|&c| 1.0 / (1.0 - c)).collect();
        let mut grad: Vec<f64> = (0..n).map(|x| -t * self.b[x] / self.n - 1.0 / v[x]).collect();
        let mut diag: Vec<f64> = v.iter().map(|&x| 1.0 / (x * x)).collect();
        for j in 0..jn {
            let (p, r) = (self.exps[j], self.radii[j]);
            for x in 0..n {
                grad[x] += d[j] * e[j][x];
                if p != 1.0 {
                    diag[x] += d[j] * p * (p - 1.0) * (v[x] / r).powf(p - 2.0) / (r * r * self.n);
                }
            }
        }
        // H = D + U Uᵀ with U[:, j] = d_j ∇c_j.
        let u: Vec<Vec<f64>> = (0..jn).map(|j| e[j].iter().map(|&x| d[j] * x).collect()).collect();
        let dinv_g: Vec<f64> = grad.iter().zip(&diag).map(|(g, d)| g / d).collect();
        let mut small = DMatrix::<f64>::identity(jn, jn);
        let mut rhs = DVector::<f64>::zeros(jn);
        for a in 0..jn {
            rhs[a] = u[a].iter().zip(&dinv_g).map(|(x, y)| x * y).sum();
            for bcol in 0..jn {
                small[(a, bcol)] += (0..n).map(|x| u[a][x] * u[bcol][x] / diag[x]).sum::<f64>();
            }
        }
        let coef = small
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&rhs))
            .or_else(|| small.lu().solve(&rhs))
            .unwrap_or_else(|| DVector::zeros(jn));
        let step: Vec<f64> = (0..n)
            .map(|x| {
                let corr: f64 = (0..jn).map(|j| u[j][x] * coef[j]).sum();
                -(dinv_g[x] - corr / diag[x])
            })
            .collect();
        let dec = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
        (step, dec.max(0.0))
    }

    /// Splits `b` into blocks from the barrier multipliers at parameter `t`.
    fn recover_blocks(&self, t: f64, v: &[f64], c: &[f64]) -> Vec<Vec<f64>> {
        let e = self.constraint_grads(v);
        let parts: Vec<Vec<f64>> = e
            .iter()
            .zip(c)
            .map(|(row, &c)| row.iter().map(|&x| self.n / (t * (1.0 - c)) * x).collect())
            .collect();
        let n = v.len();
        let mut blocks = vec![vec![0.0; n]; parts.len()];
        for x in 0..n {
            let total: f64 = parts.iter().map(|p| p[x]).sum();
            if self.b[x] == 0.0 || !(total > 0.0) {
                continue;
            }
            for (blk, part) in blocks.iter_mut().zip(&parts) {
                blk[x] = part[x] / total * self.b[x];
            }
        }
        blocks
    }
}

struct DualRun {
    v: Vec<f64>,
    blocks: Vec<Vec<f64>>,
    iterations: usize,
}

fn solve(b: &[f64], params: &SmallParams, opts: &SolverOptions) -> DualRun {
    let n = b.len();
    let barrier = Barrier {
        b,
        exps: params.grand().exponents(),
        radii: params.weights(),
        n: n as f64,
    };
    let rmin = barrier.radii.iter().copied().fold(f64::INFINITY, f64::min);
    let mut v = vec![0.5 * rmin; n];
    let mut c = barrier.constraints(&v);
    let m = (n + barrier.exps.len()) as f64;
    let mut t = m / barrier.objective(&v).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    let mut best_blocks = barrier.recover_blocks(t, &v, &c);

    'outer: loop {
        // Rounding puts a floor under the decrement that grows with t.
        let dec_floor = 1e-10_f64.max(1e-18 * t * barrier.objective(&v));
        for _ in 0..MAX_CENTERING {
            if iterations >= opts.max_iter {
                break 'outer;
            }
            let (step, dec) = barrier.newton(t, &v, &c);
            iterations += 1;
            if !dec.is_finite() {
                break 'outer;
            }
            if dec < dec_floor {
                break;
            }
            let f0 = barrier.value(t, &v, &c);
            let mut s = 1.0;
            let mut accepted = None;
            while s > 1e-20 {
                let trial: Vec<f64> = v.iter().zip(&step).map(|(x, d)| x + s * d).collect();
                if let Some(ct) = barrier.feasible(&trial) {
                    if dec < 1e-6 || barrier.value(t, &trial, &ct) <= f0 - 0.25 * s * dec {
                        accepted = Some((trial, ct));
                        break;
                    }
                }
                s *= 0.5;
            }
            match accepted {
                Some((nv, nc)) => {
                    v = nv;
                    c = nc;
                }
                None => break,
            }
            if dec < dec_floor {
                break;
            }
        }
        best_blocks = barrier.recover_blocks(t, &v, &c);
        if m / t <= opts.target_rel * barrier.objective(&v) {
            break;
        }
        t *= BARRIER_GROWTH;
    }
    DualRun { v, blocks: best_blocks, iterations }
}

fn phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 { z / r } else { Complex64::new(1.0, 0.0) }
}

/// Interior-point dual with KKT primal recovery; the certificate carries both sides.
pub fn small_norm_dual(g: &GFunction, params: &SmallParams, opts: &SolverOptions) -> NormCertificate {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    let abs: Vec<f64> = g.values().iter().map(|v| v.norm()).collect();
    order.sort_by(|&x, &y| abs[x].partial_cmp(&abs[y]).expect("finite"));
    let scale = abs.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return NormCertificate::zero(g, params, opts);
    }
    let b: Vec<f64> = order.iter().map(|&x| abs[x] / scale).collect();
    let run = solve(&b, params, opts);

    let gv = grand_of_abs(&{
        let mut s = run.v.clone();
        s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        s
    }, params.grand());
    let pairing = b.iter().zip(&run.v).map(|(b, v)| b * v).sum::<f64>() / n as f64;
    let lower = scale * pairing / gv;

    let recovered = scale * small_cost_of_abs(
        &run.blocks
            .iter()
            .map(|blk| {
                let mut s = blk.clone();
                s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                s
            })
            .collect::<Vec<_>>(),
        params,
    );
    let (single, j_single) = single_block_bound(g, params);

    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for (k, &x) in order.iter().enumerate() {
        h[x] = phase(g.at(x)).conj() * (run.v[k] / gv);
    }
    let witness_dual = GFunction::new(g.spec(), h).expect("finite witness");

    let (upper, blocks) = if recovered <= single {
        let blocks = run
            .blocks
            .iter()
            .map(|blk| {
                let mut vals = vec![Complex64::new(0.0, 0.0); n];
                for (k, &x) in order.iter().enumerate() {
                    vals[x] = phase(g.at(x)) * (scale * blk[k]);
                }
                GFunction::new(g.spec(), vals).expect("finite blocks")
            })
            .collect();
        (recovered, blocks)
    } else {
        let zero = GFunction::zeros(g.spec());
        let blocks = (0..params.grid().len())
            .map(|j| if j == j_single { g.clone() } else { zero.clone() })
            .collect();
        (single, blocks)
    };
    NormCertificate::assemble(lower.min(upper), upper, run.iterations, params, opts, witness_dual, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::norms::{grand_norm, lp_norm, GridSpec};
    use crate::rng::Gaussian;

    #[test]
    fn constants_saturate() {
        let g = GroupSpec::cyclic(8).unwrap();
        let one = GFunction::constant(&g, Complex64::new(1.0, 0.0));
        let params = SmallParams::geometric(2.0, 0.0, GridSpec::default()).unwrap();
        let cert = small_norm_dual(&one, &params, &SolverOptions::default());
        assert!((cert.lower - 1.0).abs() < 1e-9, "{cert:?}");
        assert!((cert.upper - 1.0).abs() < 1e-9);
        assert!(cert.witness_dual.max_abs_diff(&one) < 1e-6);
    }

    #[test]
    fn random_certificates_close() {
        let g = GroupSpec::cyclic(16).unwrap();
        let mut rng = Gaussian::new(21);
        let params = SmallParams::geometric(3.0, 1.0, GridSpec { count: 6, min_fraction: 1e-3 }).unwrap();
        for _ in 0..10 {
            let f = rng.g_function(&g);
            let cert = small_norm_dual(&f, &params, &SolverOptions::default());
            assert!(cert.converged, "{cert:?}");
            assert!(cert.gap < 1e-8, "{cert:?}");
            assert!(grand_norm(&cert.witness_dual, params.grand()) <= 1.0 + 1e-10);
            let pairing = f.mul(&cert.witness_dual).unwrap().haar_integral().norm();
            assert!((pairing - cert.lower).abs() < 1e-10 * cert.lower);
            let rec = cert.reconstruction().unwrap();
            assert!(rec.max_abs_diff(&f) < 1e-10);
            let (single, _) = single_block_bound(&f, &params);
            assert!(cert.upper <= single + 1e-12);
        }
        let f = rng.g_function(&g);
        let flat = SmallParams::geometric(3.0, 0.0, GridSpec { count: 12, min_fraction: 1e-3 }).unwrap();
        let cert = small_norm_dual(&f, &flat, &SolverOptions::default());
        let lp = lp_norm(&f, 3.0).unwrap();
        assert!((cert.value - lp).abs() / lp < 0.02);
    }

    #[test]
    fn budget_one_is_flagged() {
        let g = GroupSpec::cyclic(16).unwrap();
        let f = Gaussian::new(1).g_function(&g);
        let params = SmallParams::geometric(3.0, 1.0, GridSpec::default()).unwrap();
        let opts = SolverOptions { max_iter: 1, ..Default::default() };
        let cert = small_norm_dual(&f, &params, &opts);
        assert!(!cert.converged);
        assert!(cert.lower <= cert.upper);
    }
}
