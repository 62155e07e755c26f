//! Soft-margin kernel SVM trained in the dual with sequential minimal
//! optimization (maximal-violating pair with second-order working-set
//! selection).
//!
//! The dual problem is
//!
//! ```text
//! min  ½ αᵀQα − eᵀα   s.t.  yᵀα = 0,  0 ≤ αᵢ ≤ C,   Qᵢⱼ = yᵢyⱼK(xᵢ, xⱼ)
//! ```
//!
//! and the decision function is `f(x) = Σ αᵢyᵢK(xᵢ, x) − ρ`.

use serde::{Deserialize, Serialize};

use super::kdtree::squared_distance;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    /// `exp(−γ‖a − b‖²)`
    Rbf {
        gamma: f64,
    },
    Linear,
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Rbf { gamma } => (-gamma * squared_distance(a, b)).exp(),
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    /// Cap on pair updates.
    pub max_iterations: usize,
}

impl SvmParams {
    pub fn rbf(c: f64, gamma: f64) -> Self {
        Self {
            c,
            kernel: Kernel::Rbf { gamma },
            tolerance: 1e-3,
            max_iterations: 100_000,
        }
    }

    fn gamma(&self) -> f64 {
        match self.kernel {
            Kernel::Rbf { gamma } => gamma,
            Kernel::Linear => 0.0,
        }
    }
}

/// Full dual solution, as returned by the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    /// Dual objective `½ αᵀQα − eᵀα` at the solution.
    pub objective: f64,
    /// Final maximal violation `m(α) − M(α)`.
    pub kkt_gap: f64,
    pub iterations: usize,
}

fn sign(label: bool) -> f64 {
    if label {
        1.0
    } else {
        -1.0
    }
}

/// Solves the dual for training points `x` with labels `y` (`true` = +1).
pub fn solve_dual(x: &[Vec<f64>], y: &[bool], params: &SvmParams) -> Result<DualSolution> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidArgument(
            "points and labels differ in length".into(),
        ));
    }
    if !y.iter().any(|&l| l) || y.iter().all(|&l| l) {
        return Err(Error::OneClass);
    }
    if !(params.c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    let c = params.c;
    let ys: Vec<f64> = y.iter().map(|&l| sign(l)).collect();

    // Q is symmetric; store the full matrix row-major.
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = ys[i] * ys[j] * params.kernel.eval(&x[i], &x[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }
    let qd: Vec<f64> = (0..n).map(|i| q[i * n + i]).collect();

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let kkt_gap = loop {
        // first index: maximal violation among I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let in_up = if ys[t] > 0.0 {
                !is_upper(alpha[t])
            } else {
                !is_lower(alpha[t])
            };
            if in_up && -ys[t] * grad[t] >= gmax {
                gmax = -ys[t] * grad[t];
                i_sel = Some(t);
            }
        }
        // second index: best second-order gain among I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_obj = f64::INFINITY;
        if let Some(i) = i_sel {
            let qi = &q[i * n..(i + 1) * n];
            for t in 0..n {
                let in_low = if ys[t] > 0.0 {
                    !is_lower(alpha[t])
                } else {
                    !is_upper(alpha[t])
                };
                if !in_low {
                    continue;
                }
                let yg = ys[t] * grad[t];
                gmax2 = gmax2.max(yg);
                let grad_diff = gmax + yg;
                if grad_diff > 0.0 {
                    let quad = qd[i] + qd[t] - 2.0 * ys[i] * ys[t] * qi[t];
                    let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best_obj {
                        best_obj = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let gap = gmax + gmax2;
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if gap >= params.tolerance => (i, j),
            _ => break gap.max(0.0),
        };
        if iterations >= params.max_iterations {
            return Err(Error::NoConvergence {
                c,
                gamma: params.gamma(),
                iterations,
            });
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q[i * n + j];
        if ys[i] != ys[j] {
            let quad = (qd[i] + qd[j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        let (qi, qj) = (&q[i * n..(i + 1) * n], &q[j * n..(j + 1) * n]);
        for t in 0..n {
            grad[t] += qi[t] * di + qj[t] * dj;
        }
    };

    // ρ: average over free vectors, else midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = ys[t] * grad[t];
        if is_upper(alpha[t]) {
            if ys[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if is_lower(alpha[t]) {
            if ys[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };
    let objective = alpha
        .iter()
        .zip(&grad)
        .map(|(a, g)| a * (g - 1.0))
        .sum::<f64>()
        / 2.0;

    Ok(DualSolution {
        alpha,
        rho,
        objective,
        kkt_gap,
        iterations,
    })
}

/// Trained kernel SVM: support vectors with coefficients `αᵢyᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// `αᵢyᵢ` for each support vector.
    pub coefficients: Vec<f64>,
    pub rho: f64,
}

impl SvmModel {
    pub fn train(x: &[Vec<f64>], y: &[bool], params: &SvmParams) -> Result<Self> {
        let sol = solve_dual(x, y, params)?;
        Ok(Self::from_solution(x, y, params, &sol))
    }

    pub fn from_solution(
        x: &[Vec<f64>],
        y: &[bool],
        params: &SvmParams,
        sol: &DualSolution,
    ) -> Self {
        let (support_vectors, coefficients) = sol
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(i, &a)| (x[i].clone(), a * sign(y[i])))
            .unzip();
        Self {
            kernel: params.kernel,
            c: params.c,
            support_vectors,
            coefficients,
            rho: sol.rho,
        }
    }

    /// Signed decision value; positive means the legitimate user.
    pub fn score(&self, query: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, coef)| coef * self.kernel.eval(sv, query))
            .sum::<f64>()
            - self.rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_points_split_at_the_midpoint() {
        let x = vec![vec![0.0, 0.0], vec![2.0, 0.0]];
        let y = vec![true, false];
        for gamma in [0.1, 1.0, 10.0] {
            let m = SvmModel::train(&x, &y, &SvmParams::rbf(1.0, gamma)).unwrap();
            assert!(m.score(&[1.0, 0.0]).abs() < 1e-12);
            assert!(m.score(&[0.0, 0.0]) > 0.0);
            assert!(m.score(&[2.0, 0.0]) < 0.0);
        }
    }

    fn xor() -> (Vec<Vec<f64>>, Vec<bool>) {
        (
            vec![
                vec![1.0, 1.0],
                vec![-1.0, -1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
            ],
            vec![true, true, false, false],
        )
    }

    #[test]
    fn xor_needs_a_nonlinear_kernel() {
        let (x, y) = xor();
        let rbf = SvmModel::train(&x, &y, &SvmParams::rbf(10.0, 1.0)).unwrap();
        for (p, &l) in x.iter().zip(&y) {
            assert_eq!(rbf.score(p) > 0.0, l);
        }
        let linear = SvmParams {
            kernel: Kernel::Linear,
            ..SvmParams::rbf(10.0, 1.0)
        };
        let lin = SvmModel::train(&x, &y, &linear).unwrap();
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(p, &l)| (lin.score(p) > 0.0) == l)
            .count();
        assert!(correct < 4);
    }

    fn random_problem(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y = (0..n).map(|i| i % 2 == 0).collect();
        (x, y)
    }

    #[test]
    fn free_vectors_sit_on_the_margin() {
        let (x, y) = random_problem(1, 40);
        let params = SvmParams::rbf(4.0, 0.5);
        let sol = solve_dual(&x, &y, &params).unwrap();
        assert!(sol.kkt_gap < params.tolerance);
        let model = SvmModel::from_solution(&x, &y, &params, &sol);
        for (i, &a) in sol.alpha.iter().enumerate() {
            assert!((0.0..=params.c).contains(&a));
            if a > 0.0 && a < params.c {
                let margin = sign(y[i]) * model.score(&x[i]);
                assert!((margin - 1.0).abs() <= params.tolerance, "{margin}");
            }
        }
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, &l)| a * sign(l)).sum();
        assert!(balance.abs() < 1e-9);
    }

    #[test]
    fn permutation_and_label_flip() {
        let (x, y) = random_problem(2, 30);
        let params = SvmParams::rbf(2.0, 1.0);
        let base = SvmModel::train(&x, &y, &params).unwrap();

        let mut order: Vec<usize> = (0..x.len()).collect();
        order.reverse();
        order.swap(3, 17);
        let xp: Vec<Vec<f64>> = order.iter().map(|&i| x[i].clone()).collect();
        let yp: Vec<bool> = order.iter().map(|&i| y[i]).collect();
        let permuted = SvmModel::train(&xp, &yp, &params).unwrap();

        let yf: Vec<bool> = y.iter().map(|l| !l).collect();
        let flipped = SvmModel::train(&x, &yf, &params).unwrap();

        let (probe, _) = random_problem(3, 25);
        for p in &probe {
            let s = base.score(p);
            assert!(
                (s - permuted.score(p)).abs() < 1e-2,
                "{s} vs {}",
                permuted.score(p)
            );
            assert!((s + flipped.score(p)).abs() < 1e-2);
        }
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let (x, y) = random_problem(4, 30);
        let params = SvmParams {
            max_iterations: 1,
            ..SvmParams::rbf(100.0, 5.0)
        };
        assert!(matches!(
            solve_dual(&x, &y, &params),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn one_class_is_rejected() {
        assert!(matches!(
            solve_dual(
                &[vec![0.0], vec![1.0]],
                &[true, true],
                &SvmParams::rbf(1.0, 1.0)
            ),
            Err(Error::OneClass)
        ));
    }
}
