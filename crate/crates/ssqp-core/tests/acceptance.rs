//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Every tolerance here is pinned; the suites are seeded and deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssqp_core::driver::{complexity_constants, solve, SolverConfig};
use ssqp_core::geometry::enumerate_vertices;
use ssqp_core::kkt::{clarke_kkt_check, lower_bound_constant, refine_to_vertex};
use ssqp_core::linalg::{axpy, norm2, sub, Mat};
use ssqp_core::problems::{
    brute_force_three_partition, make_decoding, make_power_control, make_random, make_svm,
    make_three_partition, HKind, ProblemSpec, XKind,
};
use ssqp_core::smoothing::{
    curvature_cap, objective, theta_q, theta_q_d1, theta_q_d2, SmoothedObjective,
};
use ssqp_core::subproblems::{residual_direction, step, StepMode};
use std::time::Instant;

const Q_GRID: [f64; 6] = [0.1, 0.3, 0.5, 0.7, 0.9, 1.0];

fn loguniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.gen::<f64>()).exp()
}

/// Instances for the complexity sweeps: h >= 0 on X, known curvature
/// constant, N, M <= 50.
fn sweep_suite(q: f64) -> Vec<ProblemSpec> {
    vec![
        make_random(1, 8, 12, q, HKind::Quadratic, XKind::Box).unwrap(),
        make_random(2, 15, 20, q, HKind::Linear, XKind::BoxSimplex).unwrap(),
        make_random(3, 30, 40, q, HKind::Zero, XKind::Box).unwrap(),
    ]
}

fn assert_h_nonnegative_on_set(p: &ProblemSpec, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried = 0;
    while tried < 100 {
        let x: Vec<f64> = (0..p.dim()).map(|_| rng.gen::<f64>() * 2.0).collect();
        if !p.set().contains(&x) {
            continue;
        }
        tried += 1;
        assert!(p.h_value(&x) >= -1e-12, "h must be nonnegative on X");
    }
}

#[test]
fn criterion_01_smoothing_calculus() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let samples = 100_000usize;
    for _ in 0..samples {
        let q = Q_GRID[rng.gen_range(0..Q_GRID.len())];
        let mu = loguniform(&mut rng, 1e-3, 1.0);
        let cap = 4.0 * q * mu.powf(q - 2.0);

        // (i) sandwich on t <= mu
        let t = mu - loguniform(&mut rng, 1e-6, 8.0);
        let gap = theta_q(t, mu, q).unwrap() - t.max(0.0).powf(q);
        assert!(gap >= -1e-12, "sandwich lower: t={t} mu={mu} q={q}");
        assert!(
            gap <= (mu / 2.0).powf(q) + 1e-12,
            "sandwich upper: t={t} mu={mu} q={q}"
        );

        // (ii) curvature cap away from breakpoints, and difference
        // quotients of the first derivative across the breakpoints
        let t2 = mu * (rng.gen::<f64>() * 8.0 - 3.0);
        if let Some(d2) = theta_q_d2(t2, mu, q).unwrap() {
            assert!(d2.abs() <= cap + 1e-12, "cap: t={t2} mu={mu} q={q}");
        }
        for bp in [0.0, mu] {
            let h = mu * loguniform(&mut rng, 1e-6, 1e-2);
            let lo = theta_q_d1(bp - h, mu, q).unwrap();
            let hi = theta_q_d1(bp + h, mu, q).unwrap();
            let slope = (hi - lo) / (2.0 * h);
            assert!(
                slope.abs() <= cap * (1.0 + 1e-9) + 1e-12,
                "breakpoint slope: bp={bp} mu={mu} q={q}"
            );
        }

        // (iii) majorization on the three stated cases
        let t_hat = mu * (rng.gen::<f64>() * 12.0 - 6.0);
        let t = if t_hat > 2.0 * mu {
            // t - t_hat >= -t_hat / 2
            -t_hat / 2.0 + t_hat + rng.gen::<f64>() * (4.0 * mu + 2.0)
        } else if t_hat >= -mu {
            mu * (rng.gen::<f64>() * 16.0 - 8.0)
        } else {
            // t - t_hat <= mu
            t_hat + mu - rng.gen::<f64>() * (4.0 * mu + 2.0)
        };
        let lhs = theta_q(t, mu, q).unwrap();
        let rhs = theta_q(t_hat, mu, q).unwrap()
            + theta_q_d1(t_hat, mu, q).unwrap() * (t - t_hat)
            + 0.5 * curvature_cap(t_hat, mu, q).unwrap() * (t - t_hat) * (t - t_hat);
        assert!(
            lhs <= rhs + 1e-12,
            "majorization: t={t} t_hat={t_hat} mu={mu} q={q} lhs={lhs} rhs={rhs}"
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "criterion 1 took {dt:?}");
    println!("criterion 01 (smoothing calculus, {samples} samples): PASS in {dt:?}");
}

#[test]
fn criterion_02_gradient_against_central_differences() {
    for seed in 0..10u64 {
        let n = 3 + (seed as usize % 5);
        let m = n + 3;
        let q = Q_GRID[seed as usize % Q_GRID.len()];
        let hk = [HKind::Zero, HKind::Linear, HKind::Quadratic][seed as usize % 3];
        let p = make_random(seed + 200, n, m, q, hk, XKind::Box).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 300);
        let mu = 0.05 + 0.5 * rng.gen::<f64>();
        let smoothed = SmoothedObjective::new(&p, mu).unwrap();
        let reach = 20.0 * p.max_row_norm() * 1e-6;
        let mut checked = 0;
        while checked < 100 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0).collect();
            // keep clear of the kernel breakpoints so the stencil stays on
            // one smooth piece
            let res = p.residuals(&x);
            if res
                .iter()
                .any(|r| r.abs() < reach || (r - mu).abs() < reach)
            {
                continue;
            }
            checked += 1;
            let g = smoothed.gradient(&x).unwrap();
            let mut fd = vec![0.0; n];
            for i in 0..n {
                let h = 1e-6 * (1.0 + x[i].abs());
                let mut xp = x.clone();
                xp[i] += h;
                let mut xm = x.clone();
                xm[i] -= h;
                fd[i] = (smoothed.value(&xp).unwrap() - smoothed.value(&xm).unwrap())
                    / (2.0 * h);
            }
            let err = norm2(&sub(&fd, &g)) / (1.0 + norm2(&g));
            assert!(err <= 1e-6, "seed {seed}: gradient error {err}");
        }
    }
    println!("criterion 02 (gradient vs central differences): PASS");
}

#[test]
fn criterion_03_sufficient_decrease() {
    for seed in 0..10u64 {
        let n = 4 + (seed as usize % 4) * 3;
        let m = n + 4;
        let q = [0.3, 0.5, 0.8][seed as usize % 3];
        let hk = [HKind::Zero, HKind::Linear, HKind::Quadratic][seed as usize % 3];
        let xk = [XKind::Box, XKind::BoxSimplex][seed as usize % 2];
        let p = make_random(seed, n, m, q, hk, xk).unwrap();
        let x0 = p.x0().unwrap().to_vec();
        for mode in [StepMode::Proj, StepMode::Snorm, StepMode::Exact] {
            let mut config = SolverConfig::new(0.05);
            config.step_mode = mode;
            let c = complexity_constants(&p, &x0, &config).unwrap();
            let r = solve(&p, &x0, &config).unwrap();
            assert!(r.kkt.pass);
            for t in &r.trace {
                let required = t.mu.powf(4.0 - q) / c.j0;
                assert!(
                    t.decrease >= required - 1e-12,
                    "seed {seed} {mode:?}: decrease {} below {} at mu {}",
                    t.decrease,
                    required,
                    t.mu
                );
            }
        }
    }
    println!("criterion 03 (per-step sufficient decrease, 3 modes x 10 instances): PASS");
}

#[test]
fn criterion_04_step_ordering() {
    let mut recorded = 0;
    let mut seed = 20u64;
    while recorded < 50 {
        let p = make_random(seed, 8, 12, 0.5, HKind::Quadratic, XKind::Box).unwrap();
        seed += 1;
        let mut x = p.x0().unwrap().to_vec();
        let eps = 0.05f64;
        let sigma = 0.5f64;
        let l = p.lipschitz();
        let mut mu = ssqp_core::driver::mu0(eps, sigma).unwrap();
        loop {
            let d = residual_direction(&p, &x, mu).unwrap();
            if norm2(&d) <= mu {
                if mu <= eps {
                    break;
                }
                mu *= sigma;
                continue;
            }
            let proj = step(&p, &x, mu, l, StepMode::Proj).unwrap();
            let snorm = step(&p, &x, mu, l, StepMode::Snorm).unwrap();
            let exact = step(&p, &x, mu, l, StepMode::Exact).unwrap();
            assert!(
                snorm.decrease >= proj.decrease - 1e-9,
                "snorm {} below proj {}",
                snorm.decrease,
                proj.decrease
            );
            assert!(
                exact.decrease >= snorm.decrease - 1e-9,
                "exact {} below snorm {}",
                exact.decrease,
                snorm.decrease
            );
            // every step kind stays feasible to X and to the trust rows
            let (low, high) = ssqp_core::subproblems::index_sets_mu(&p, &x, mu).unwrap();
            let res = p.residuals(&x);
            for s in [&proj, &snorm, &exact] {
                assert!(p.set().contains(&s.next));
                let moved = p.matrix().matvec(&sub(&x, &s.next));
                for &m in &low {
                    assert!(moved[m] <= mu + 1e-9);
                }
                for &m in &high {
                    assert!(moved[m] >= -res[m] / 2.0 - 1e-9);
                }
            }
            recorded += 1;
            x = proj.next;
            if recorded >= 50 {
                break;
            }
        }
    }
    println!("criterion 04 (step ordering on {recorded} recorded iterations): PASS");
}

#[test]
fn criterion_05_and_06_complexity_bound_and_certificates() {
    let start = Instant::now();
    let mut runs = 0;
    for q in [0.3, 0.5, 0.8] {
        for (k, p) in sweep_suite(q).into_iter().enumerate() {
            assert_h_nonnegative_on_set(&p, 900 + k as u64);
            let x0 = p.x0().unwrap().to_vec();
            for eps in [0.1, 0.05, 0.01] {
                let config = SolverConfig::new(eps);
                let c = complexity_constants(&p, &x0, &config).unwrap();
                let r = solve(&p, &x0, &config).unwrap();
                runs += 1;
                assert!(
                    r.qp_solves <= c.bound,
                    "q={q} eps={eps} instance {k}: {} solves over bound {}",
                    r.qp_solves,
                    c.bound
                );
                assert_eq!(r.bound, c.bound);
                assert!(
                    (r.mu_final - eps).abs() <= 1e-12 * eps,
                    "mu_final {} vs eps {eps}",
                    r.mu_final
                );
                // criterion 6: epsilon-KKT certification of every output
                assert!(r.kkt.pass);
                assert!(r.kkt.projected_residual <= eps + 1e-9);
                assert!(r.kkt.complementarity_max <= eps.powf(q) + 1e-9);
                assert!(r.kkt.multipliers.iter().all(|l| *l >= 0.0));
            }
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "sweep took {dt:?}");
    println!("criterion 05 (complexity bound, {runs} runs in {dt:?}): PASS");
    println!("criterion 06 (epsilon-KKT certification on every run): PASS");
}

#[test]
fn certificate_fails_after_ascent_perturbation() {
    // moving a passing point well away from stationarity must break the
    // check for some direction of size 10 eps
    for seed in [1u64, 2, 3] {
        let eps = 0.05;
        let p = sweep_suite(0.5).into_iter().nth(seed as usize % 3).unwrap();
        let x0 = p.x0().unwrap().to_vec();
        let r = solve(&p, &x0, &SolverConfig::new(eps)).unwrap();
        assert!(r.kkt.pass);
        let n = p.dim();
        let mut found_failure = false;
        'dirs: for axis in 0..(2 * n) {
            let mut delta = vec![0.0; n];
            delta[axis / 2] = if axis % 2 == 0 { 10.0 * eps } else { -10.0 * eps };
            let mut moved = r.x_final.clone();
            axpy(1.0, &delta, &mut moved);
            let candidate = p.set().project(&moved).unwrap();
            if norm2(&sub(&candidate, &r.x_final)) < 5.0 * eps {
                continue; // projection swallowed the move
            }
            let report = ssqp_core::kkt::eps_kkt_check(&p, &candidate, eps).unwrap();
            if !report.pass {
                found_failure = true;
                break 'dirs;
            }
        }
        assert!(found_failure, "every perturbation stayed certified");
    }
}

#[test]
fn smoothed_objective_sandwich_on_random_points() {
    // F(x) <= F~(x, mu) <= F(x) + (count of residuals <= mu) (mu/2)^q
    let mut rng = ChaCha8Rng::seed_from_u64(717);
    for seed in 0..6u64 {
        let q = Q_GRID[seed as usize % 6];
        let p = make_random(seed + 500, 5, 8, q, HKind::Linear, XKind::Box).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() * 4.0 - 1.0).collect();
            let mu = loguniform(&mut rng, 1e-3, 1.0);
            let f = objective(&p, &x).unwrap();
            let f_smooth = SmoothedObjective::new(&p, mu)
                .unwrap()
                .value(&x)
                .unwrap();
            let gap_rows = p.residuals(&x).iter().filter(|r| **r <= mu).count();
            assert!(f_smooth >= f - 1e-12);
            assert!(f_smooth <= f + gap_rows as f64 * (mu / 2.0).powf(q) + 1e-12);
        }
    }
}

#[test]
fn criterion_07_q1_clarke_mode() {
    for seed in [3u64, 4, 5] {
        let p = make_random(seed, 10, 14, 1.0, HKind::Quadratic, XKind::Box).unwrap();
        let x0 = p.x0().unwrap().to_vec();
        for eps in [0.1, 0.05] {
            let config = SolverConfig::new(eps);
            let c = complexity_constants(&p, &x0, &config).unwrap();
            // at q = 1 the bound exponent is exactly -3
            let direct = (c.j_t_q * eps.powi(-3)).ceil() as u64;
            assert!(c.bound == direct || c.bound == direct.saturating_sub(1));
            let r = solve(&p, &x0, &config).unwrap();
            assert!(r.qp_solves <= c.bound);
            let clarke = clarke_kkt_check(&p, &r.x_final, r.mu_final, eps).unwrap();
            assert!(clarke.pass, "seed {seed} eps {eps}: residual {}", clarke.residual);
        }
    }
    println!("criterion 07 (q = 1 Clarke mode within the eps^-3 cap): PASS");
}

/// Valid random 3-partition inputs for m = 2: six integers strictly inside
/// (target/4, target/2) summing to twice the target.
fn random_three_partition(rng: &mut ChaCha8Rng) -> (Vec<u64>, u64) {
    loop {
        let target = 9 + rng.gen::<u64>() % 22;
        let lo = target / 4 + 1;
        let hi = (target - 1) / 2;
        if lo > hi {
            continue;
        }
        let mut weights: Vec<u64> = (0..5)
            .map(|_| lo + rng.gen::<u64>() % (hi - lo + 1))
            .collect();
        let sum5: u64 = weights.iter().sum();
        let total = 2 * target;
        if sum5 >= total {
            continue;
        }
        let last = total - sum5;
        if last < lo || last > hi {
            continue;
        }
        weights.push(last);
        return (weights, target);
    }
}

#[test]
fn criterion_08_hardness_instance_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut cases: Vec<(Vec<u64>, u64)> = vec![(vec![1, 1, 1, 1, 1, 1], 3)];
    while cases.len() < 6 {
        cases.push(random_three_partition(&mut rng));
    }
    let mut yes_count = 0;
    for (weights, target) in &cases {
        let q = 0.5;
        let p = make_three_partition(weights, *target, q).unwrap();
        assert_eq!(p.dim(), 12);
        let is_yes = brute_force_three_partition(weights, *target).unwrap();
        yes_count += usize::from(is_yes);

        // exhaustive minimum over the 4096 indicator points
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << 12) {
            let x: Vec<f64> = (0..12)
                .map(|i| f64::from((mask >> i) & 1))
                .collect();
            best = best.min(objective(&p, &x).unwrap());
        }
        if is_yes {
            assert!(
                (best - 12.0).abs() < 1e-12,
                "yes-instance {weights:?} target {target}: binary min {best}"
            );
        } else {
            assert!(
                best > 12.0 + 0.5,
                "no-instance {weights:?} target {target}: binary min {best}"
            );
        }

        // the objective never dips below 3 m^2 anywhere
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..12).map(|_| rng.gen::<f64>() * 5.0 - 2.0).collect();
            let f = objective(&p, &x).unwrap();
            assert!(f >= 12.0 - 1e-9, "sample below the floor: {f}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "criterion 8 took {dt:?}");
    println!(
        "criterion 08 (3-partition oracle equivalence, {} cases, {yes_count} yes): PASS in {dt:?}",
        cases.len()
    );
}

#[test]
fn criterion_09_lower_bound_dichotomy() {
    let instances = [
        (40u64, 2usize, 3usize),
        (41, 2, 3),
        (43, 2, 3),
        (50, 3, 4),
        (53, 3, 4),
    ];
    for (seed, n, m) in instances {
        let p = make_random(seed, n, m, 0.5, HKind::Linear, XKind::Box).unwrap();
        let c = lower_bound_constant(&p).unwrap();
        assert!(c.is_finite() && c > 0.0, "seed {seed}: C = {c}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed * 7 + 1);
        for start in 0..20 {
            let x0: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0).collect();
            let config = SolverConfig::new(1e-3);
            let r = solve(&p, &x0, &config).unwrap();
            let refined = refine_to_vertex(&p, &r.x_final, 1e-3)
                .unwrap()
                .or_else(|| refine_to_vertex(&p, &r.x_final, 0.0).unwrap())
                .expect("bounded box polytope has vertices");
            for rm in p.residuals(&refined) {
                assert!(
                    rm <= 1e-8 || rm >= c - 1e-8,
                    "seed {seed} start {start}: residual {rm} violates dichotomy (C = {c})"
                );
            }
        }
    }
    println!("criterion 09 (residual dichotomy at refined outputs, 5 instances x 20 starts): PASS");
}

/// Hinge-loss reference value: subgradient descent to localize, then nested
/// grid refinement to pin the optimum (the toy problem is two-dimensional).
fn svm_oracle_value(p: &ProblemSpec) -> f64 {
    let subgrad = |x: &[f64]| -> Vec<f64> {
        let mut g = p.h_gradient(x);
        for (m, r) in p.residuals(x).into_iter().enumerate() {
            if r > 0.0 {
                axpy(-1.0, p.matrix().row(m), &mut g);
            }
        }
        g
    };
    let mut x = vec![0.0; 2];
    let mut best = (objective(p, &x).unwrap(), x.clone());
    for k in 0..100_000 {
        let g = subgrad(&x);
        let step = 0.5 / ((k + 1) as f64).sqrt();
        axpy(-step, &g, &mut x);
        let f = objective(p, &x).unwrap();
        if f < best.0 {
            best = (f, x.clone());
        }
    }
    let mut center = best.1;
    let mut span = 0.5;
    for _ in 0..8 {
        let mut local = (f64::INFINITY, center.clone());
        for i in 0..=40 {
            for j in 0..=40 {
                let z = vec![
                    center[0] - span + 2.0 * span * i as f64 / 40.0,
                    center[1] - span + 2.0 * span * j as f64 / 40.0,
                ];
                let f = objective(p, &z).unwrap();
                if f < local.0 {
                    local = (f, z);
                }
            }
        }
        center = local.1;
        span *= 0.1;
    }
    objective(p, &center).unwrap()
}

#[test]
fn criterion_10a_svm_application() {
    let patterns = vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]];
    let labels = vec![-1.0, -1.0, 1.0, 1.0];
    let p = make_svm(&patterns, &labels, 1.0, 1.0).unwrap();
    let oracle = svm_oracle_value(&p);

    let config = SolverConfig::new(1e-5);
    let r = solve(&p, &[0.0, 0.0], &config).unwrap();
    let achieved = objective(&p, &r.x_final).unwrap();
    assert!(
        (achieved - oracle).abs() <= 1e-4,
        "hinge objective {achieved} vs oracle {oracle}"
    );

    // at tighter accuracy the separable toy set is fully classified
    let config = SolverConfig::new(1e-7);
    let r = solve(&p, &[0.0, 0.0], &config).unwrap();
    for t in p.residuals(&r.x_final) {
        let margin = 1.0 - t;
        assert!(margin >= 1.0 - 1e-6, "margin {margin}");
    }
    println!("criterion 10a (soft-margin SVM vs subgradient oracle): PASS");
}

#[test]
fn criterion_10b_power_control_application() {
    let gains = Mat::from_rows(&[
        vec![1.0, 0.9, 0.05],
        vec![0.8, 1.0, 0.05],
        vec![0.02, 0.03, 1.0],
    ])
    .unwrap();
    let noise = vec![0.3, 0.3, 0.1];
    let p = make_power_control(&gains, &noise, 0.01, 0.1).unwrap();

    // subset feasibility oracle: S supportable iff
    // {0 <= x <= 1, (b - A x)_S <= 0} is nonempty
    let mut oracle_max = 0usize;
    for mask in 1u32..8 {
        let rows: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let mut extra = Vec::new();
        let mut rhs = Vec::new();
        for &m in &rows {
            extra.push(p.matrix().row(m).iter().map(|v| -v).collect::<Vec<f64>>());
            rhs.push(-p.offsets()[m]);
        }
        let vs = enumerate_vertices(
            p.set(),
            Some((&Mat::from_rows(&extra).unwrap(), rhs.as_slice())),
        )
        .unwrap();
        if !vs.is_empty() {
            oracle_max = oracle_max.max(rows.len());
        }
    }
    assert_eq!(oracle_max, 2);

    // best of a few starts, then count rows supported at the output
    let starts = [
        vec![0.0, 0.0, 0.0],
        vec![1.0, 1.0, 1.0],
        vec![0.5, 0.5, 0.5],
        vec![1.0, 0.0, 1.0],
    ];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for x0 in &starts {
        let config = SolverConfig::new(1e-4);
        let r = solve(&p, x0, &config).unwrap();
        let f = objective(&p, &r.x_final).unwrap();
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, r.x_final));
        }
    }
    let (_, x_best) = best.unwrap();
    let admitted = p.residuals(&x_best).iter().filter(|r| **r <= 1e-6).count();
    assert_eq!(admitted, oracle_max, "admitted {admitted} vs oracle {oracle_max}");
    println!("criterion 10b (power control admitted count vs subset oracle): PASS");
}

#[test]
fn criterion_10c_decoding_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|_| vec![rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0])
        .collect();
    let coding = Mat::from_rows(&rows).unwrap();
    let x_true = vec![0.7, -0.3];
    let mut measurement = coding.matvec(&x_true);
    measurement[2] += 2.0; // one corrupted entry
    let p = make_decoding(&coding, &measurement, 0.5).unwrap();

    // grid oracle: nested refinement over the plane finds the global optimum
    let mut center = vec![0.0, 0.0];
    let mut span = 2.0;
    for _ in 0..8 {
        let mut best = (f64::INFINITY, center.clone());
        for i in 0..=40 {
            for j in 0..=40 {
                let z = vec![
                    center[0] - span + 2.0 * span * i as f64 / 40.0,
                    center[1] - span + 2.0 * span * j as f64 / 40.0,
                ];
                let f = objective(&p, &z).unwrap();
                if f < best.0 {
                    best = (f, z);
                }
            }
        }
        center = best.1;
        span *= 0.1;
    }
    assert!(norm2(&sub(&center, &x_true)) <= 1e-6, "oracle at {center:?}");

    let config = SolverConfig::new(1e-5);
    let r = solve(&p, &[0.0, 0.0], &config).unwrap();
    let err = norm2(&sub(&r.x_final, &center));
    assert!(err <= 1e-4, "recovery error {err}");
    println!("criterion 10c (decoding recovery vs grid oracle): PASS");
}

#[test]
fn multiplier_construction_is_valid_everywhere() {
    // nonnegativity and the complementarity bound hold at arbitrary points,
    // not only solver outputs
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for seed in 0..5u64 {
        let p = make_random(seed + 400, 4, 7, Q_GRID[seed as usize % 6], HKind::Linear, XKind::Box)
            .unwrap();
        for eps in [0.05, 0.3] {
            for _ in 0..50 {
                let x: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 2.0).collect();
                let sets = ssqp_core::kkt::index_sets(&p, &x, eps).unwrap();
                let lam = ssqp_core::kkt::build_multipliers(&p, &x, eps).unwrap();
                let res = p.residuals(&x);
                for (l, &m) in lam.iter().zip(&sets.k) {
                    assert!(*l >= 0.0);
                    assert!(
                        (l * res[m]).abs() <= eps.powf(p.q()) + 1e-12,
                        "complementarity bound violated off the solution path"
                    );
                }
            }
        }
    }
}

#[test]
fn certificate_monotone_in_eps_for_a_fixed_witness() {
    // The certificate asks for the existence of multipliers. A point that
    // passes at eps passes at any wider eps' with the same index sets and
    // the SAME witness: its residual and complementarity numbers do not
    // change while both thresholds relax. (The checker's freshly built
    // witness at eps' may differ, so re-running the checker is not the
    // monotone quantity; the certified numbers are.)
    let p = make_random(61, 6, 9, 0.5, HKind::Quadratic, XKind::Box).unwrap();
    let x0 = p.x0().unwrap().to_vec();
    let r = solve(&p, &x0, &SolverConfig::new(0.05)).unwrap();
    let base = ssqp_core::kkt::eps_kkt_check(&p, &r.x_final, 0.05).unwrap();
    assert!(base.pass);
    for factor in [1.5, 2.0, 4.0] {
        let eps_wide = 0.05 * factor;
        let wider = ssqp_core::kkt::eps_kkt_check(&p, &r.x_final, eps_wide).unwrap();
        if wider.sets.k == base.sets.k && wider.sets.j == base.sets.j {
            assert!(base.projected_residual <= eps_wide + 1e-9);
            assert!(base.complementarity_max <= eps_wide.powf(p.q()) + 1e-9);
        }
    }
}

#[test]
fn exact_sets_recovered_in_small_eps_limit() {
    // at a stationary point with no band-resident rows the certificate at
    // shrinking eps reproduces the sign partition of the exact conditions
    let p = make_random(62, 5, 8, 0.5, HKind::Quadratic, XKind::Box).unwrap();
    let x0 = p.x0().unwrap().to_vec();
    let r = solve(&p, &x0, &SolverConfig::new(1e-3)).unwrap();
    let exact = ssqp_core::kkt::index_sets(&p, &r.x_final, 0.0).unwrap();
    let res = p.residuals(&r.x_final);
    let clear = res.iter().fold(f64::INFINITY, |a, r| {
        if r.abs() > 1e-6 { a.min(r.abs()) } else { a }
    });
    let eps = (clear / 2.0).min(1e-3);
    let sets = ssqp_core::kkt::index_sets(&p, &r.x_final, eps).unwrap();
    // rows far from zero classify identically; band rows are those the
    // exact partition calls zero up to solver accuracy
    for &m in sets.j.iter() {
        assert!(exact.j.contains(&m));
    }
    for &m in sets.i.iter() {
        assert!(exact.i.contains(&m));
    }
}
