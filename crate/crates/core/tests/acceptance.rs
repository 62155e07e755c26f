//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use touchauth_core::analysis::{relative_mutual_information, BinningSpec};
use touchauth_core::authsim::synth::{generate_corpus, CorpusSpec};
use touchauth_core::authsim::{AuthConfig, AuthSession, Event, Phase};
use touchauth_core::classify::kdtree::KdTree;
use touchauth_core::classify::svm::{solve_dual, Kernel, SvmModel, SvmParams};
use touchauth_core::evaluate::experiment::{
    report_from_scores, run_experiment, score_experiment, DecisionWindow, ExperimentConfig,
};
use touchauth_core::evaluate::fusion::StrokeOutput;
use touchauth_core::evaluate::roc::{equal_error_rate, roc_and_eer};
use touchauth_core::evaluate::sweep::{sweep_strokes, sweep_subjects, write_curve_csv};
use touchauth_core::features::mean_resultant_length;
use touchauth_core::ingest::{Action, PhoneOrientation, Stroke, TouchEvent};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stroke(points: &[(f64, f64)]) -> Stroke {
    let n = points.len();
    let samples = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| TouchEvent {
            phone_id: "p".into(),
            user_id: "u".into(),
            doc_id: "d".into(),
            t: 10 * i as i64,
            action: match i {
                0 => Action::Down,
                i if i + 1 == n => Action::Up,
                _ => Action::Move,
            },
            phone_orientation: PhoneOrientation::Portrait,
            x,
            y,
            pressure: 0.5,
            area: 0.1,
            finger_orientation: 0.0,
        })
        .collect();
    Stroke {
        samples,
        user_id: "u".into(),
        doc_id: "d".into(),
        phone_id: "p".into(),
        prev_stroke_end_t: None,
    }
}

fn mean_resultant_goldens() -> Result<String, String> {
    let collinear = [
        vec![(0.1, 0.5), (0.2, 0.5), (0.45, 0.5), (0.9, 0.5)],
        vec![(0.5, 0.9), (0.5, 0.7), (0.5, 0.2)],
        vec![(0.1, 0.1), (0.2, 0.2), (0.3, 0.3), (0.4, 0.4)],
        (0..9)
            .map(|i| (0.1 + 0.07 * i as f64, 0.9 - 0.093 * i as f64))
            .collect(),
    ];
    for pts in &collinear {
        let r = mean_resultant_length(&stroke(pts)).map_err(|e| e.to_string())?;
        ensure(r == 1.0, || format!("collinear {pts:?}: R = {r:e}"))?;
    }
    let opposing = mean_resultant_length(&stroke(&[(0.2, 0.5), (0.6, 0.5), (0.2, 0.5)]))
        .map_err(|e| e.to_string())?;
    ensure(opposing.abs() < 1e-12, || {
        format!("opposing: R = {opposing:e}")
    })?;
    // angle 0 then angle π/2 in the flipped-y frame
    let right_angle = mean_resultant_length(&stroke(&[(0.2, 0.5), (0.4, 0.5), (0.4, 0.3)]))
        .map_err(|e| e.to_string())?;
    let expected = 2f64.sqrt() / 2.0;
    ensure((right_angle - expected).abs() < 1e-12, || {
        format!("right angle: R = {right_angle}")
    })?;
    Ok("collinear 1.0 exact, opposing < 1e-12, {0, π/2} = √2/2".into())
}

/// Linear-interpolation percentile, written independently of the library.
fn oracle_percentile(values: &[f64], q: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}

/// `I(U;F) / H(U)` from a joint histogram.
fn oracle_relative_mi(values: &[f64], users: &[u8]) -> f64 {
    const BINS: usize = 50;
    let lo = oracle_percentile(values, 0.1);
    let hi = oracle_percentile(values, 0.9);
    let bin = |v: f64| -> usize {
        if hi <= lo {
            return if v <= lo { 0 } else { BINS - 1 };
        }
        let b = ((v - lo) / ((hi - lo) / BINS as f64)).floor();
        b.clamp(0.0, (BINS - 1) as f64) as usize
    };
    let mut joint = vec![[0usize; 2]; BINS];
    for (&v, &u) in values.iter().zip(users) {
        joint[bin(v)][u as usize] += 1;
    }
    let n = values.len() as f64;
    let h = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_u = h(&[
        joint.iter().map(|r| r[0]).sum(),
        joint.iter().map(|r| r[1]).sum(),
    ]);
    let h_f = h(&joint.iter().map(|r| r[0] + r[1]).collect::<Vec<_>>());
    let h_uf = h(&joint
        .iter()
        .flat_map(|r| r.iter().copied())
        .collect::<Vec<_>>());
    (h_u + h_f - h_uf) / h_u
}

fn mutual_information() -> Result<String, String> {
    let spec = BinningSpec::default();
    let users: Vec<&str> = (0..200)
        .map(|i| if i % 2 == 0 { "a" } else { "b" })
        .collect();
    let constant =
        relative_mutual_information(&vec![3.5; 200], &users, &spec).map_err(|e| e.to_string())?;
    ensure(constant.abs() < 1e-12, || {
        format!("constant feature: I = {constant:e}")
    })?;
    let separated: Vec<f64> = (0..200)
        .map(|i| {
            if i % 2 == 0 {
                0.0
            } else {
                10.0 + i as f64 * 1e-3
            }
        })
        .collect();
    let sep = relative_mutual_information(&separated, &users, &spec).map_err(|e| e.to_string())?;
    ensure((sep - 1.0).abs() < 1e-12, || {
        format!("bin-separated users: I = {sep}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0f64;
    for _ in 0..100 {
        let n = rng.random_range(20..400);
        let shift: f64 = rng.random_range(0.0..2.0);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let values: Vec<f64> = labels
            .iter()
            .map(|&u| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                // a few repeated values exercise ties at bin edges
                let v = z + shift * u as f64;
                if rng.random_bool(0.1) {
                    v.round()
                } else {
                    v
                }
            })
            .collect();
        let ids: Vec<String> = labels.iter().map(|u| format!("user{u}")).collect();
        let got = relative_mutual_information(&values, &ids, &spec).map_err(|e| e.to_string())?;
        let want = oracle_relative_mi(&values, &labels);
        worst = worst.max((got - want).abs());
    }
    ensure(worst < 1e-10, || format!("oracle disagreement {worst:e}"))?;
    Ok(format!(
        "constant 0, separated 1, 100 random datasets max |Δ| = {worst:.1e}"
    ))
}

fn kd_tree_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let dim = 6;
    // a coarse lattice produces many exact distance ties
    let points: Vec<Vec<f64>> = (0..1000)
        .map(|i| {
            (0..dim)
                .map(|_| {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    if i % 3 == 0 {
                        (v * 4.0).round() / 4.0
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let tree = KdTree::build(points.clone());
    for q in 0..100 {
        let query: Vec<f64> = (0..dim)
            .map(|_| {
                let v: f64 = rng.random_range(-1.2..1.2);
                if q % 4 == 0 {
                    (v * 4.0).round() / 4.0
                } else {
                    v
                }
            })
            .collect();
        let mut scan: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (
                    p.iter().zip(&query).map(|(a, b)| (a - b) * (a - b)).sum(),
                    i,
                )
            })
            .collect();
        scan.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for k in [1, 3, 5, 7] {
            let got: Vec<usize> = tree.nearest(&query, k).iter().map(|n| n.index).collect();
            let want: Vec<usize> = scan[..k].iter().map(|&(_, i)| i).collect();
            ensure(got == want, || {
                format!("query {q}, k={k}: {got:?} vs {want:?}")
            })?;
        }
    }
    Ok("1000 points × 100 queries × k∈{1,3,5,7} identical (ties by index)".into())
}

/// Minimizes `½ αᵀQα − eᵀα` over `0 ≤ α ≤ C`, `yᵀα = 0` by accelerated
/// projected gradient.
fn qp_oracle(q: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let lipschitz = q
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let project = |v: &[f64]| -> Vec<f64> {
        let at = |lambda: f64| -> Vec<f64> {
            v.iter()
                .zip(y)
                .map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c))
                .collect()
        };
        let balance = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };
        let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if balance(&at(mid)) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };
    let objective = |a: &[f64]| -> f64 {
        let quad: f64 = (0..n)
            .map(|i| a[i] * (0..n).map(|j| q[i][j] * a[j]).sum::<f64>())
            .sum();
        0.5 * quad - a.iter().sum::<f64>()
    };
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..4000 {
        let grad: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| q[i][j] * z[j]).sum::<f64>() - 1.0)
            .collect();
        let step: Vec<f64> = z
            .iter()
            .zip(&grad)
            .map(|(zi, gi)| zi - gi / lipschitz)
            .collect();
        let next = project(&step);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = next
            .iter()
            .zip(&a)
            .map(|(x, xp)| x + (t - 1.0) / t_next * (x - xp))
            .collect();
        a = next;
        t = t_next;
    }
    objective(&a)
}

fn svm_solver() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    for p in 0..25 {
        let x: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                (0..2)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect()
            })
            .collect();
        let mut y: Vec<bool> = (0..20)
            .map(|i| x[i][0] + 0.8 * rng.sample::<f64, _>(rand_distr::StandardNormal) > 0.0)
            .collect();
        y[0] = true;
        y[1] = false;
        let params = SvmParams {
            c: [0.5, 1.0, 4.0, 10.0, 50.0][p % 5],
            kernel: if p % 3 == 2 {
                Kernel::Linear
            } else {
                Kernel::Rbf {
                    gamma: [0.1, 0.5, 2.0][p % 3],
                }
            },
            tolerance: 1e-3,
            max_iterations: 100_000,
        };
        let sol = solve_dual(&x, &y, &params).map_err(|e| e.to_string())?;
        let ys: Vec<f64> = y.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
        let q: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                (0..20)
                    .map(|j| ys[i] * ys[j] * params.kernel.eval(&x[i], &x[j]))
                    .collect()
            })
            .collect();
        let oracle = qp_oracle(&q, &ys, params.c);
        let diff = (sol.objective - oracle).abs();
        worst = worst.max(diff);
        ensure(diff < 1e-3, || {
            format!("problem {p}: SMO {} vs oracle {oracle}", sol.objective)
        })?;

        // KKT: maximal violating pair from the gradient, recomputed here
        let grad: Vec<f64> = (0..20)
            .map(|i| (0..20).map(|j| q[i][j] * sol.alpha[j]).sum::<f64>() - 1.0)
            .collect();
        let (mut m_up, mut m_low) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..20 {
            let v = -ys[i] * grad[i];
            let a = sol.alpha[i];
            let in_up = (ys[i] > 0.0 && a < params.c) || (ys[i] < 0.0 && a > 0.0);
            let in_low = (ys[i] < 0.0 && a < params.c) || (ys[i] > 0.0 && a > 0.0);
            if in_up {
                m_up = m_up.max(v);
            }
            if in_low {
                m_low = m_low.min(v);
            }
            ensure((0.0..=params.c).contains(&a), || {
                format!("problem {p}: α out of box")
            })?;
        }
        let balance: f64 = sol.alpha.iter().zip(&ys).map(|(a, y)| a * y).sum();
        ensure(balance.abs() < 1e-9, || {
            format!("problem {p}: yᵀα = {balance:e}")
        })?;
        ensure(m_up - m_low <= params.tolerance + 1e-12, || {
            format!("problem {p}: KKT residual {}", m_up - m_low)
        })?;
    }

    let xor = vec![
        vec![1.0, 1.0],
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
        vec![-1.0, 1.0],
    ];
    let labels = vec![true, true, false, false];
    let rbf =
        SvmModel::train(&xor, &labels, &SvmParams::rbf(10.0, 1.0)).map_err(|e| e.to_string())?;
    ensure(
        xor.iter()
            .zip(&labels)
            .all(|(p, &l)| (rbf.score(p) > 0.0) == l),
        || "rbf misclassifies XOR".into(),
    )?;
    let linear = SvmModel::train(
        &xor,
        &labels,
        &SvmParams {
            kernel: Kernel::Linear,
            ..SvmParams::rbf(10.0, 1.0)
        },
    )
    .map_err(|e| e.to_string())?;
    let linear_ok = xor
        .iter()
        .zip(&labels)
        .all(|(p, &l)| (linear.score(p) > 0.0) == l);
    ensure(!linear_ok, || "linear kernel separated XOR".into())?;
    Ok(format!("25 problems, max |Δ objective| = {worst:.1e}, KKT within tolerance, XOR separated by rbf only"))
}

/// FAR/FRR at every threshold by direct counting, then the sign change.
fn oracle_eer(genuine: &[f64], impostor: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    thresholds.insert(0, f64::NEG_INFINITY);
    thresholds.push(f64::INFINITY);
    let rates: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&t| {
            let far = impostor.iter().filter(|&&s| s >= t).count() as f64 / impostor.len() as f64;
            let frr = genuine.iter().filter(|&&s| s < t).count() as f64 / genuine.len() as f64;
            (far, frr)
        })
        .collect();
    for w in rates.windows(2) {
        let (d0, d1) = (w[0].0 - w[0].1, w[1].0 - w[1].1);
        if d0 == 0.0 {
            return w[0].0;
        }
        if d0 > 0.0 && d1 <= 0.0 {
            let s = d0 / (d0 - d1);
            return w[0].0 + s * (w[1].0 - w[0].0);
        }
    }
    unreachable!()
}

fn eer_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0f64;
    for set in 0..100 {
        let ng = rng.random_range(1..60);
        let ni = rng.random_range(1..60);
        let quantize = set % 2 == 0;
        let mut draw = |shift: f64| -> f64 {
            let v: f64 = rng.random::<f64>() + shift;
            if quantize {
                (v * 8.0).round() / 8.0
            } else {
                v
            }
        };
        let shift = (set % 5) as f64 * 0.2;
        let genuine: Vec<f64> = (0..ng).map(|_| draw(shift)).collect();
        let impostor: Vec<f64> = (0..ni).map(|_| draw(0.0)).collect();
        let got = equal_error_rate(&genuine, &impostor).map_err(|e| e.to_string())?;
        let want = oracle_eer(&genuine, &impostor);
        worst = worst.max((got - want).abs());
    }
    ensure(worst < 1e-9, || format!("oracle disagreement {worst:e}"))?;
    let separated =
        equal_error_rate(&[0.9, 0.8, 0.95], &[0.1, 0.2, 0.3]).map_err(|e| e.to_string())?;
    ensure(separated == 0.0, || format!("separated EER {separated}"))?;
    let scores: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
    let labels: Vec<bool> = (0..10_000).map(|_| rng.random_bool(0.5)).collect();
    let shuffled = roc_and_eer(&scores, &labels)
        .map_err(|e| e.to_string())?
        .eer;
    ensure((shuffled - 0.5).abs() <= 0.05, || {
        format!("label-independent EER {shuffled}")
    })?;
    Ok(format!(
        "100 sets max |Δ| = {worst:.1e}, separated 0, label-independent {shuffled:.4}"
    ))
}

fn pipeline_config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 1,
        include_roc: false,
        ..ExperimentConfig::default()
    }
}

fn pipeline_separation() -> Result<String, String> {
    let mut medians = Vec::new();
    for sep in [1.0, 2.0, 4.0, 6.0] {
        let corpus = CorpusSpec {
            users: 10,
            separation: sep,
            ..CorpusSpec::default()
        };
        let data = generate_corpus(&corpus, 42).map_err(|e| e.to_string())?;
        let report = run_experiment(&data, &pipeline_config()).map_err(|e| e.to_string())?;
        ensure(report.users.len() == 10, || {
            format!("{sep}σ: {} users evaluated", report.users.len())
        })?;
        medians.push(report.median_eer().ok_or("no summary")?);
    }
    ensure(medians[3] == 0.0, || {
        format!("6σ median EER {}", medians[3])
    })?;
    ensure(medians[0] > 0.15, || {
        format!("1σ median EER {}", medians[0])
    })?;
    ensure(medians.windows(2).all(|w| w[0] >= w[1]), || {
        format!("not monotone: {medians:?}")
    })?;
    Ok(format!(
        "10 users, intra-session, kNN, n=11: median EER 1σ {:.3}, 2σ {:.3}, 4σ {:.3}, 6σ {:.3}",
        medians[0], medians[1], medians[2], medians[3]
    ))
}

fn fusion_effect() -> Result<String, String> {
    let corpus = CorpusSpec {
        separation: 2.0,
        ..CorpusSpec::default()
    };
    let data = generate_corpus(&corpus, 42).map_err(|e| e.to_string())?;
    let config = pipeline_config();
    let scored = score_experiment(&data, &config).map_err(|e| e.to_string())?;
    let at = |n| -> Result<f64, String> {
        report_from_scores(&data, &scored, &config, DecisionWindow { n, stride: 1 })
            .map_err(|e| e.to_string())?
            .median_eer()
            .ok_or_else(|| "no summary".to_string())
    };
    let (one, eleven) = (at(1)?, at(11)?);
    ensure(eleven < one, || format!("n=11 {eleven} vs n=1 {one}"))?;
    Ok(format!(
        "2σ corpus median EER n=1 {one:.3} > n=11 {eleven:.3} (synthetic check; no recorded dataset supplied)"
    ))
}

/// Lockout position for a decision string under "t consecutive rejections",
/// found by scanning every run of rejections.
fn scan_lockout(decisions: &[bool], t: usize) -> Option<usize> {
    (0..decisions.len()).find(|&i| i + 1 >= t && decisions[i + 1 - t..=i].iter().all(|&d| !d))
}

fn state_machine() -> Result<String, String> {
    let mut strings = 0;
    for t in 1..=3 {
        for len in 0..=12 {
            for bits in 0u32..(1 << len) {
                let decisions: Vec<bool> = (0..len).map(|i| bits >> i & 1 == 1).collect();
                let mut session = AuthSession::authenticating(AuthConfig {
                    window: DecisionWindow { n: 1, stride: 1 },
                    t_threshold: t,
                    threshold: 0.0,
                    ..AuthConfig::default()
                })
                .map_err(|e| e.to_string())?;
                let mut lockout = None;
                for (i, &d) in decisions.iter().enumerate() {
                    let rec = session
                        .authenticate(StrokeOutput::Svm(if d { 1.0 } else { -1.0 }))
                        .map_err(|e| e.to_string())?;
                    match (lockout, rec.event) {
                        (None, Event::Lockout) => lockout = Some(i),
                        (None, Event::Accepted) => {
                            ensure(rec.counter == 0, || "accept did not reset".into())?
                        }
                        (None, Event::Rejected) => ensure(rec.counter < t, || {
                            "counter reached t without lockout".into()
                        })?,
                        (Some(_), Event::Blocked) => {}
                        (l, e) => {
                            return Err(format!(
                                "t={t} {decisions:?}: {e:?} at {i} (lockout {l:?})"
                            ))
                        }
                    }
                }
                let want = scan_lockout(&decisions, t);
                ensure(lockout == want, || {
                    format!("t={t} {decisions:?}: lockout {lockout:?}, scanner {want:?}")
                })?;
                ensure(
                    (session.phase() == Phase::Challenge) == want.is_some(),
                    || format!("t={t} {decisions:?}: phase {:?}", session.phase()),
                )?;
                strings += 1;
            }
        }
    }
    for n in 1..=15 {
        let mut session = AuthSession::authenticating(AuthConfig {
            window: DecisionWindow { n, stride: 1 },
            t_threshold: 3,
            threshold: 0.0,
            ..AuthConfig::default()
        })
        .map_err(|e| e.to_string())?;
        let first = (1..=3 * n).find(|_| {
            session
                .authenticate(StrokeOutput::Svm(-1.0))
                .map(|r| r.decision.is_some())
                .unwrap_or(false)
        });
        ensure(first == Some(n), || {
            format!("n={n}: first decision at stroke {first:?}")
        })?;
    }
    Ok(format!("{strings} decision strings (len ≤ 12, t ∈ {{1,2,3}}) match the scanner; first decision at stroke n for n ≤ 15"))
}

fn determinism() -> Result<String, String> {
    let corpus = CorpusSpec {
        users: 5,
        strokes_per_session: 40,
        ..CorpusSpec::default()
    };
    let data = generate_corpus(&corpus, 8).map_err(|e| e.to_string())?;
    let mut outputs: Vec<(String, Vec<u8>, String)> = Vec::new();
    for workers in [1, 2, 4, 7] {
        let config = ExperimentConfig {
            seed: 17,
            workers: Some(workers),
            ..ExperimentConfig::default()
        };
        let report = serde_json::to_string_pretty(
            &run_experiment(&data, &config).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let sweep = sweep_strokes(&data, &config, &[1, 5, 11]).map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        write_curve_csv(&mut csv, &sweep.curve).map_err(|e| e.to_string())?;
        let subjects = sweep_subjects(&data, &config, &[3], 2).map_err(|e| e.to_string())?;
        // the worker count is part of the config; compare everything else
        let strip = |s: String| s.replace(&format!("\"workers\": {workers}"), "\"workers\": _");
        outputs.push((
            strip(report),
            csv,
            strip(serde_json::to_string(&subjects.curve).map_err(|e| e.to_string())?),
        ));
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
        "reports differ across worker counts".into()
    })?;
    Ok(
        "eval JSON, stroke-sweep CSV and subject sweep byte-identical for 1, 2, 4, 7 workers"
            .into(),
    )
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("mean resultant length goldens", mean_resultant_goldens),
        ("relative mutual information", mutual_information),
        ("k-d tree vs linear scan", kd_tree_equivalence),
        ("SVM dual solver", svm_solver),
        ("EER oracle", eer_oracle),
        ("synthetic pipeline separation", pipeline_separation),
        ("multi-stroke fusion", fusion_effect),
        ("lockout state machine", state_machine),
        ("determinism across workers", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
