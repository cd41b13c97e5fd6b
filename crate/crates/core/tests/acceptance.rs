//! Acceptance gate. Prints one PASS/FAIL line per criterion.
//!
//! Runs with `harness = false`; set `ACCEPTANCE_STRICT=1` to turn any FAIL
//! into a nonzero exit status.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use netcentral::centrality::{
    degree, diffusion, leading_eigenpair, regularize, DeltaRule, DiffusionParams, Regularization, Scaling,
};
use netcentral::estimator::{BiasCoefficients, EigenMode, Estimator};
use netcentral::graph::{build_true_adjacency, observe, sample_latent, Graphon, GraphonSpec, SparsityRule};
use netcentral::inference::{bias_correct, degree_bias_variance, diffusion_bias_variance, ols, Mode};
use netcentral::montecarlo::{run_cell, summarize, CellResult, ErrorModel, EstimatorSpec, ExperimentConfig, TestKind};
use netcentral::rng::stream_rng;
use netcentral::stats::ks_normal;
use netcentral::walks::{
    count_even_path_walks, derive_b, derive_g, reference_b, reference_g, BiasConvention, Budget,
};
use netcentral::{SparseGraph, SymmetricOperator};
use rand::Rng;

const ALPHA: f64 = 0.05;
const SIZE_TOL: f64 = 0.03;
const FIXTURE_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-8;
const KS_LEVEL: f64 = 0.01;

struct Gate {
    failed: Vec<usize>,
}

impl Gate {
    fn report(&mut self, k: usize, ok: bool, detail: String) {
        println!("{} criterion {k}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(k);
        }
    }
}

fn k3() -> SparseGraph {
    SparseGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn criterion_1(gate: &mut Gate) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for t in 1..=10 {
        if derive_g(t, Budget::DEFAULT).unwrap() != reference_g(t).unwrap() {
            bad.push(format!("g({t})"));
        }
    }
    for h in 1..=5 {
        let budget = if h <= 4 { Budget::DEFAULT } else { Budget::EXTENDED };
        if derive_b(h, budget, BiasConvention::Tabulated).unwrap() != reference_b(h).unwrap() {
            bad.push(format!("b_{h}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    gate.report(
        1,
        bad.is_empty() && secs < 300.0,
        format!("g(t) for t <= 10 and b_T for T <= 5 equal the embedded tables; mismatches {bad:?}; {secs:.2}s"),
    );
}

fn criterion_2(gate: &mut Gate) {
    let g = k3();
    let deg = degree(&g).values;
    let dif = diffusion(&g, &DiffusionParams::fixed(0.5, 2)).unwrap().values;
    let pair = leading_eigenpair(&g).unwrap();
    let v_ok = pair.vector.iter().all(|v| close(*v, 1.0 / 3f64.sqrt(), FIXTURE_TOL));
    let c = degree(&g);
    let fit = ols(&[1.0, 2.0, 3.0], &c.values, Mode::NoisyDegree).unwrap();
    let bv = degree_bias_variance(&g, &c, &fit).unwrap();
    let fit = fit.with_components(bv);
    let check = bias_correct(&fit).unwrap();
    let ok = deg.iter().all(|v| close(*v, 2.0, FIXTURE_TOL))
        && dif.iter().all(|v| close(*v, 2.0, FIXTURE_TOL))
        && close(pair.lambda1, 2.0, FIXTURE_TOL)
        && v_ok
        && close(bv.b_hat, 0.5, FIXTURE_TOL)
        && close(bv.v_hat, 1.0 / 3.0, FIXTURE_TOL)
        && close(check, 2.0 * fit.beta_hat, FIXTURE_TOL);
    gate.report(
        2,
        ok,
        format!(
            "K3: degree {deg:?}, diffusion {dif:?}, lambda1 {}, B {}, V {}, beta_check {check} (beta_hat {})",
            pair.lambda1, bv.b_hat, bv.v_hat, fit.beta_hat
        ),
    );
}

fn random_graph(n: usize, p: f64, seed: u64) -> SparseGraph {
    let mut rng = stream_rng(seed, 77);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    SparseGraph::from_edges(n, &edges).unwrap()
}

fn dense(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.dim();
    let mut m = DMatrix::zeros(n, n);
    for (i, j) in g.edges() {
        m[(i, j)] = 1.0;
        m[(j, i)] = 1.0;
    }
    m
}

/// Walks of length `t` from vertex 0 in first-visit labeling whose edges
/// form a simple path with every edge used at least twice, by unique edges.
fn path_walks_oracle(t: usize) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    let mut walk = vec![0usize];
    fn rec(t: usize, walk: &mut Vec<usize>, out: &mut BTreeMap<usize, u64>) {
        if walk.len() == t + 1 {
            let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for w in walk.windows(2) {
                *mult.entry((w[0].min(w[1]), w[0].max(w[1]))).or_default() += 1;
            }
            let verts = walk.iter().max().unwrap() + 1;
            let mut deg = vec![0; verts];
            for &(a, b) in mult.keys() {
                deg[a] += 1;
                deg[b] += 1;
            }
            let tree = mult.len() + 1 == verts;
            if tree && deg.iter().all(|&d| d <= 2) && mult.values().all(|&m| m >= 2) {
                *out.entry(mult.len()).or_default() += 1;
            }
            return;
        }
        let next_fresh = walk.iter().max().unwrap() + 1;
        let cur = *walk.last().unwrap();
        for v in 0..=next_fresh {
            if v != cur {
                walk.push(v);
                rec(t, walk, out);
                walk.pop();
            }
        }
    }
    rec(t, &mut walk, &mut out);
    out
}

fn criterion_3(gate: &mut Gate) {
    let mut worst_diff: f64 = 0.0;
    let mut worst_var: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for seed in 0..40u64 {
        let n = 5 + (seed as usize % 16);
        let g = random_graph(n, 0.4, seed);
        if g.num_edges() == 0 {
            continue;
        }
        let a = dense(&g);
        let ones = DMatrix::from_element(n, 1, 1.0);
        for h in 1..=5 {
            let delta = 0.3 + 0.1 * h as f64;
            let fast = diffusion(&g, &DiffusionParams::fixed(delta, h)).unwrap().values;
            let mut slow = DMatrix::zeros(n, 1);
            let mut pw = DMatrix::identity(n, n);
            for t in 1..=h {
                pw = &pw * &a;
                slow += (&pw * &ones) * delta.powi(t as i32);
            }
            for i in 0..n {
                worst_diff = worst_diff.max((fast[i] - slow[i]).abs() / slow[i].abs().max(1.0));
            }
        }
        if n <= 15 {
            for h in 1..=3 {
                let delta = 0.7;
                let c = diffusion(&g, &DiffusionParams::fixed(delta, h)).unwrap();
                let y: Vec<f64> = (0..n).map(|i| i as f64 * 0.3 - 1.0).collect();
                let fit = ols(&y, &c.values, Mode::NoisyDiffusion).unwrap();
                let coeffs = reference_b(h).unwrap();
                let v = diffusion_bias_variance(&g, &c, &fit, &coeffs).unwrap().v_hat;
                let mut m = DMatrix::zeros(n, n);
                for t in 1..=2 * h {
                    let left = a.pow((2 * h - t) as u32) * &ones;
                    let right = ones.transpose() * a.pow((t - 1) as u32);
                    m += left * right;
                }
                let had = a.component_mul(&m).component_mul(&m).sum();
                let ssq: f64 = c.values.iter().map(|x| x * x).sum();
                let oracle = 0.5 * delta.powi(2 * h as i32) * had / (ssq * ssq);
                worst_var = worst_var.max((v - oracle).abs() / oracle.abs().max(1.0));
            }
        }
        if n <= 30 && g.num_edges() > 0 {
            let pair = leading_eigenpair(&g).unwrap();
            let eig = a.clone().symmetric_eigen();
            let (k, &l1) = eig.eigenvalues.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap();
            let mut v = eig.eigenvectors.column(k).clone_owned();
            if v.sum() < 0.0 {
                v = -v;
            }
            let err_l = (pair.lambda1 - l1).abs();
            let err_v = (0..n).map(|i| (pair.vector[i] - v[i]).abs()).fold(0.0, f64::max);
            let multiple = eig.eigenvalues.iter().filter(|&&x| (x - l1).abs() < 1e-6).count() > 1;
            worst_eig = worst_eig.max(if multiple { err_l } else { err_l.max(err_v) });
        }
    }
    let mut walks_ok = true;
    for t in [2, 4, 6] {
        let lib = count_even_path_walks(t).unwrap().counts;
        let oracle = path_walks_oracle(t);
        walks_ok &= lib.iter().map(|(&k, &v)| (k, v)).collect::<BTreeMap<_, _>>() == oracle;
    }
    gate.report(
        3,
        worst_diff <= ORACLE_TOL && worst_var <= ORACLE_TOL && worst_eig <= EIGEN_TOL && walks_ok,
        format!(
            "diffusion vs dense powers {worst_diff:.1e}; V vs Hadamard {worst_var:.1e}; \
             power iteration vs dense eigensolve {worst_eig:.1e}; walk counts t in {{2,4,6}} agree: {walks_ok}"
        ),
    );
}

fn base_config(n: usize, sparsity: SparsityRule, estimators: Vec<EstimatorSpec>, reps: usize) -> ExperimentConfig {
    ExperimentConfig {
        graphon: GraphonSpec::Constant { c: 1.0 },
        n_grid: vec![n],
        sparsity,
        beta_true: 1.0,
        beta0_grid: vec![1.0, 0.0],
        estimators,
        error_model: ErrorModel::Gaussian { sigma: 1.0 },
        replications: reps,
        master_seed: 20240601,
        alpha_grid: vec![ALPHA],
    }
}

fn named(estimator: Estimator, name: &str) -> EstimatorSpec {
    EstimatorSpec { estimator, no_error: false, name: Some(name.into()) }
}

fn find<'a>(cells: &'a [CellResult], name: &str) -> &'a CellResult {
    cells.iter().find(|c| c.estimator == name).unwrap()
}

fn rate(c: &CellResult, kind: TestKind, b0: f64) -> f64 {
    c.reject_rate(kind, b0, ALPHA).map(|r| r.0).unwrap_or(f64::NAN)
}

fn criteria_4_5_6d(gate: &mut Gate) {
    let estimators = vec![
        named(Estimator::Degree, "degree"),
        named(Estimator::Eigenvector { scaling: Scaling::SqrtLambda1, mode: EigenMode::Corollary5 }, "eigenvector"),
        named(
            Estimator::Diffusion {
                delta: DeltaRule::InverseSqrtLambda1,
                horizon: 2,
                coefficients: BiasCoefficients::Tabulated,
            },
            "diffusion",
        ),
        named(
            Estimator::Diffusion {
                delta: DeltaRule::Fixed { delta: 1.0 },
                horizon: 2,
                coefficients: BiasCoefficients::Tabulated,
            },
            "diffusion-delta1",
        ),
    ];
    let cfg = base_config(500, SparsityRule::InverseSqrtN, estimators, 1000);
    let start = Instant::now();
    let cells = run_cell(&cfg, 0, 0..cfg.replications).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (deg, eig, dif, dif1) =
        (find(&cells, "degree"), find(&cells, "eigenvector"), find(&cells, "diffusion"), find(&cells, "diffusion-delta1"));

    let a = rate(deg, TestKind::Ours, 1.0);
    let b = rate(deg, TestKind::Robust, 1.0);
    let c = rate(eig, TestKind::Ours, 1.0);
    let d = rate(dif, TestKind::Ours, 1.0);
    let d1 = rate(dif1, TestKind::Ours, 1.0);
    let ok = close(a, 0.051, SIZE_TOL) && b >= 0.80 && close(c, 0.036, SIZE_TOL) && d <= 0.03 && secs < 1200.0;
    let failures: usize = cells.iter().map(|c| c.failure_count()).sum();
    gate.report(
        4,
        ok,
        format!(
            "n=500 p=n^-1/2, 1000 reps, size at beta0=1: degree ours {a:.3} (0.051 +/- 0.03), degree robust {b:.3} \
             (>= 0.80), eigenvector sqrt-lambda1 {c:.3} (0.036 +/- 0.03), diffusion T=2 delta=1/sqrt(lambda1) {d:.3} \
             (<= 0.03); diffusion delta=1 for reference {d1:.3}; failures {failures}; {secs:.0}s"
        ),
    );

    let p: Vec<f64> = [deg, eig, dif].iter().map(|c| rate(c, TestKind::Ours, 0.0)).collect();
    gate.report(
        5,
        p.iter().all(|&r| r >= 0.95),
        format!("rejection of beta0=0: degree {:.3}, eigenvector {:.3}, diffusion {:.3} (>= 0.95)", p[0], p[1], p[2]),
    );

    let hat = summarize(&deg.beta_hats(), 1.0).rmse;
    let check = summarize(&deg.beta_checks(), 1.0).rmse;
    gate.report(6, check < hat, format!("(d) degree RMSE beta_check {check:.4} < beta_hat {hat:.4} at n=500 p=n^-1/2"));
}

fn criterion_6abc(gate: &mut Gate) {
    let no_error = EstimatorSpec { estimator: Estimator::Degree, no_error: true, name: Some("degree-no-error".into()) };
    let mut gaps = Vec::new();
    for n in [100, 500, 2000] {
        let cfg = base_config(n, SparsityRule::InverseN, vec![no_error.clone()], 200);
        let cells = run_cell(&cfg, 0, 0..200).unwrap();
        let s = summarize(&cells[0].beta_hats(), 1.0);
        gaps.push((n, (s.mean - 1.0).abs(), s.rmse));
    }
    let decreasing = gaps.windows(2).all(|w| w[1].1 < w[0].1);
    gate.report(
        6,
        decreasing,
        format!(
            "(a) no-error degree at p=1/n, 200 reps: |mean - 1| (RMSE) = {}",
            gaps.iter().map(|(n, g, r)| format!("{g:.5} ({r:.4}) at n={n}")).collect::<Vec<_>>().join(", ")
        ),
    );

    let estimators = vec![
        named(Estimator::Degree, "degree"),
        named(Estimator::Eigenvector { scaling: Scaling::SqrtN, mode: EigenMode::Corollary5 }, "eigenvector"),
    ];
    let cfg = base_config(2000, SparsityRule::InverseN, estimators, 200);
    let start = Instant::now();
    let cells = run_cell(&cfg, 0, 0..200).unwrap();
    let deg = summarize(&find(&cells, "degree").beta_hats(), 1.0).mean;
    let eig = find(&cells, "eigenvector");
    let eig_mean = summarize(&eig.beta_hats(), 1.0).mean;
    gate.report(6, (0.4..=0.6).contains(&deg), format!("(b) noisy degree at p=1/n, n=2000: mean {deg:.4} in [0.4, 0.6]"));
    gate.report(
        6,
        eig_mean.abs() < 0.5 && !eig.all_failed(),
        format!(
            "(c) noisy eigenvector a_n=sqrt(n) at p=1/n, n=2000: mean {eig_mean:.4} (|mean| < 0.5); \
             {} draws, failures {:?}; {:.0}s",
            eig.draws.len(),
            eig.failures,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_7(gate: &mut Gate) {
    let cfg = base_config(500, SparsityRule::InverseSqrtN, vec![named(Estimator::Degree, "degree")], 2000);
    let cells = run_cell(&cfg, 0, 0..2000).unwrap();
    let (d_ours, p_ours) = ks_normal(&cells[0].statistics(TestKind::Ours, 1.0));
    let robust = cells[0].statistics(TestKind::Robust, 1.0);
    let (d_rob, p_rob) = ks_normal(&robust);
    let s = summarize(&cells[0].statistics(TestKind::Ours, 1.0), 0.0);
    gate.report(
        7,
        p_ours > KS_LEVEL && p_rob <= KS_LEVEL,
        format!(
            "n=500 p=n^-1/2, 2000 reps: KS of S(1) vs N(0,1) D={d_ours:.4} p={p_ours:.2e} (needs > {KS_LEVEL}), \
             statistic mean {:.3} sd {:.3}; robust t D={d_rob:.4} p={p_rob:.2e} (needs <= {KS_LEVEL})",
            s.mean, s.sd
        ),
    );
}

fn criterion_8(gate: &mut Gate) {
    let mut bound_ok = true;
    let mut unchanged_ok = true;
    let mut unchanged_cases = 0;
    let mut worst_z: f64 = 0.0;
    for draw in 0..100u64 {
        let n = 50 + 10 * (draw as usize % 20);
        let rule = [SparsityRule::InverseN, SparsityRule::InverseSqrtN, SparsityRule::InverseCbrtN][draw as usize % 3].clone();
        let p = rule.resolve(n).unwrap();
        let latent = sample_latent(n, draw).unwrap();
        let a = build_true_adjacency(&Graphon::constant(1.0).unwrap(), &latent, p).unwrap();
        let g = observe(&a, draw);

        let reg = regularize(&g, Regularization::Oracle { p_n: p }).unwrap();
        let deg = g.degrees();
        bound_ok &= reg.weights.iter().zip(&deg).all(|(l, &d)| l * d as f64 <= reg.tau * (1.0 + 1e-12));

        let max_deg = *deg.iter().max().unwrap() as f64;
        let loose = Regularization::Oracle { p_n: ((max_deg + 0.5) / (2.0 * n as f64)).min(1.0) };
        let same = regularize(&g, loose).unwrap();
        if max_deg <= same.tau {
            unchanged_cases += 1;
            unchanged_ok &= same.weights.iter().all(|&w| w == 1.0)
                && same.matrix.entries().all(|(_, _, w)| w == 1.0)
                && same.matrix.structure() == &g;
        }

        let plug = regularize(&g, Regularization::PlugIn { m: 1.0 }).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let rho_hat = plug.tau / (3.0 * n as f64);
        let se = (p * (1.0 - p) / pairs).sqrt();
        worst_z = worst_z.max((rho_hat - p).abs() / se);
    }
    gate.report(
        8,
        bound_ok && unchanged_ok && unchanged_cases == 100 && worst_z <= 4.0,
        format!(
            "100 draws: lambda_i deg_i <= tau always {bound_ok}; {unchanged_cases} graphs with max degree <= tau \
             unchanged {unchanged_ok}; plug-in (M=1) density vs oracle p within {worst_z:.2} se (<= 4); \
             plug-in tau = 1.5 x oracle tau up to that error, from the 3 vs 2 constants"
        ),
    );
}

fn main() {
    let start = Instant::now();
    let mut gate = Gate { failed: Vec::new() };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criteria_4_5_6d(&mut gate);
    criterion_6abc(&mut gate);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    gate.failed.dedup();
    println!(
        "acceptance: {} of 8 criteria failing {:?}; {:.0}s total",
        gate.failed.len(),
        gate.failed,
        start.elapsed().as_secs_f64()
    );
    if !gate.failed.is_empty() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
