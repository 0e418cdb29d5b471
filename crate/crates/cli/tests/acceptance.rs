//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fwbq::density::TruncatedGaussian;
use fwbq::integrate::adaptive;
use fwbq::kernel::rff_sample;
use fwbq::mean_element::{mixture_eq_mean_element, numeric_mean_element, rff_mean_element, DEFAULT_ORACLE_TOL};
use fwbq::quadrature::{
    bq_rule, contraction_bound, contraction_mass, fw_weights, mmd_squared, posterior, BqSystem, KernelExpansion,
};
use fwbq::selector::{fwls_step, select};
use fwbq::{
    EqKernel64, GaussianMixture64, IntegralPosterior64, Kernel64, MeanElement64, Method, QuadratureRule64, RngSeed,
    SelectionConfig64, TargetDensity64,
};
use fwbq_cli::{run_convergence, run_model_select, Experiment, ExperimentConfig, ResultRow};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mixture(seed: u64, components: usize) -> (TargetDensity64, Kernel64, MeanElement64) {
    let p = GaussianMixture64::random(2, components, RngSeed(seed)).unwrap();
    let k = EqKernel64::new(1.0, 0.8, 2).unwrap();
    let mu = mixture_eq_mean_element(&p, &k).unwrap();
    (p.into(), k.into(), mu)
}

fn c1_trunc_constants() -> Outcome {
    let expected = [0.629907, 0.396783, 0.249937];
    let mut got = Vec::new();
    for (d, &e) in (1..=3).zip(&expected) {
        let p: TargetDensity64 = TruncatedGaussian::new(d).unwrap().into();
        let k: Kernel64 = EqKernel64::unit_exponent(1.0, d).unwrap().into();
        let v = numeric_mean_element(&p, &k, DEFAULT_ORACLE_TOL).unwrap().initial_error();
        check((v - e).abs() <= 5e-5, || format!("d = {d}: {v:.7} vs {e}"))?;
        got.push(format!("{v:.6}"));
    }
    Ok(format!("p[μ] = {}", got.join(", ")))
}

fn c2_variance_identity() -> Outcome {
    let mut rng = RngSeed(2).rng(0);
    let mut worst = 0.0f64;
    for set in 0..50u64 {
        let (p, k, mu) = mixture(100 + set, 20);
        let n = rng.random_range(1..=20);
        let pts = p.sample(n, RngSeed(set));
        let var = BqSystem::new(&pts, &k, &mu).unwrap().variance().unwrap();
        let mmd2 = mmd_squared(&bq_rule(&pts, &k, &mu, Method::FWBQ).unwrap(), &k, &mu).unwrap();
        let rel = (var - mmd2).abs() / var.abs().max(1e-300);
        worst = worst.max(rel);
        check(rel <= 1e-10, || format!("set {set} (n = {n}): {var:e} vs {mmd2:e}"))?;
    }
    Ok(format!("max relative gap {worst:.2e}"))
}

fn c3_minimax() -> Outcome {
    let mut rng = RngSeed(3).rng(0);
    let mut margin = f64::INFINITY;
    for set in 0..10u64 {
        let (p, k, mu) = mixture(200 + set, 20);
        let n = 5 + 3 * set as usize % 16;
        let tr = select(Method::FW, &p, &k, &mu, &SelectionConfig64::new(n, RngSeed(set)).with_pool_size(2000)).unwrap();
        let bq = bq_rule(&tr.points, &k, &mu, Method::FWBQ).unwrap();
        let best = mmd_squared(&bq, &k, &mu).unwrap();
        let fw = mmd_squared(&tr.native_rule().unwrap(), &k, &mu).unwrap();
        margin = margin.min(fw - best);
        check(fw - best >= -1e-12, || format!("set {set}: FW {fw:e} < BQ {best:e}"))?;
        for _ in 0..100 {
            let w: Vec<f64> = bq
                .weights()
                .iter()
                .map(|&w| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    w + 0.05 * z
                })
                .collect();
            let r = QuadratureRule64::new(bq.points().to_vec(), w, Method::MC).unwrap();
            let v = mmd_squared(&r, &k, &mu).unwrap();
            margin = margin.min(v - best);
            check(v - best >= -1e-12, || format!("set {set}: perturbed {v:e} < BQ {best:e}"))?;
        }
    }
    Ok(format!("smallest margin {margin:.2e}"))
}

fn c4_uniform_weights() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=50usize {
        let steps: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let w = fw_weights(&steps).unwrap();
        for &v in &w {
            worst = worst.max((v - 1.0 / n as f64).abs());
        }
    }
    check(worst <= 1e-12, || format!("deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn at_n<'a>(rows: &'a [ResultRow], method: &str, n: usize) -> &'a ResultRow {
    rows.iter().find(|r| r.method == method && r.n == n).unwrap()
}

fn c5_ordering() -> Outcome {
    let mut cfg = ExperimentConfig::new(Experiment::Convergence);
    cfg.methods = vec![Method::FW, Method::FWLS, Method::FWBQ, Method::FWLSBQ];
    cfg.n_max = 50;
    let rows = run_convergence(&cfg).unwrap();
    let ratio = |bq: &str, plain: &str| at_n(&rows, bq, 50).mmd2 / at_n(&rows, plain, 50).mmd2;
    let (a, b) = (ratio("FWBQ", "FW"), ratio("FWLSBQ", "FWLS"));
    let detail = format!("FWBQ/FW = {a:.3}, FWLSBQ/FWLS = {b:.3} (need ≤ 0.1)");
    check(a <= 0.1 && b <= 0.1, || detail.clone())?;
    Ok(detail)
}

fn c6_monotone() -> Outcome {
    let mut checked = 0;
    for seed in 1..=3u64 {
        let (p, k, mu) = mixture(seed, 20);
        for m in [Method::SBQ, Method::FWBQ, Method::FWLSBQ] {
            let tr = select(m, &p, &k, &mu, &SelectionConfig64::new(100, RngSeed(seed))).unwrap();
            let mut prev = f64::INFINITY;
            for n in 1..=tr.len() {
                let v = mmd_squared(&tr.prefix(n).bq_rule(&k, &mu).unwrap(), &k, &mu).unwrap();
                check(v <= prev + 1e-12, || format!("seed {seed} {m} n = {n}: {v:e} > {prev:e}"))?;
                prev = v;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} consecutive pairs"))
}

fn c7_line_search() -> Outcome {
    const GRID: usize = 10_000;
    let mut rng = RngSeed(7).rng(0);
    let cell = 1.0 / (GRID - 1) as f64;
    let mut worst = 0.0f64;
    for state in 0..100u64 {
        let (p, k, mu) = mixture(300 + state % 10, 5);
        let n = rng.random_range(1..=8);
        let pts = p.sample(n, RngSeed(state));
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let x = p.sample_stream(1, RngSeed(state), 99).remove(0);
        let rho = fwls_step(&pts, &w, &x, &k, &mu).unwrap();
        let mut all = pts.clone();
        all.push(x);
        let objective = |r: f64| {
            let mut ww: Vec<f64> = w.iter().map(|v| (1.0 - r) * v).collect();
            ww.push(r);
            0.5 * mmd_squared(&QuadratureRule64::new(all.clone(), ww, Method::FWLS).unwrap(), &k, &mu).unwrap()
        };
        let (mut best, mut best_j) = (f64::INFINITY, 0);
        for j in 0..GRID {
            let v = objective(j as f64 * cell);
            if v < best {
                best = v;
                best_j = j;
            }
        }
        let gap = (rho - best_j as f64 * cell).abs();
        worst = worst.max(gap);
        check(gap <= cell, || format!("state {state}: ρ* = {rho}, grid {}", best_j as f64 * cell))?;
    }
    Ok(format!("max |ρ* − grid| = {worst:.2e} (cell {cell:.2e})"))
}

fn c8_rff_unbiased() -> Outcome {
    const DRAWS: usize = 2000;
    let mut rng = RngSeed(8).rng(0);
    let exact = EqKernel64::new(1.0, 0.8, 2).unwrap();
    let mut worst = 0.0f64;
    for pair in 0..10u64 {
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
        let vals: Vec<f64> = (0..DRAWS as u64)
            .map(|t| rff_sample(0.8, 1.0, 2, 1, RngSeed(pair * 1_000_000 + t)).unwrap().value(&x, &y))
            .collect();
        let mean = vals.iter().sum::<f64>() / DRAWS as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (DRAWS - 1) as f64;
        let se = (var / DRAWS as f64).sqrt();
        let z = (mean - exact.value(&x, &y)).abs() / se;
        worst = worst.max(z);
        check(z <= 3.0, || format!("pair {pair}: {z:.2} standard errors"))?;
    }
    Ok(format!("max |z| = {worst:.2}"))
}

fn c9_rff_rate() -> Outcome {
    let p = GaussianMixture64::isotropic(vec![0.0, 0.0], 1.0).unwrap();
    let rff = rff_sample(0.8, 1.0, 2, 100, RngSeed(5)).unwrap();
    let mu = rff_mean_element(&p, &rff).unwrap();
    let k: Kernel64 = rff.into();
    let target: TargetDensity64 = p.into();
    let tr = select(Method::FWBQ, &target, &k, &mu, &SelectionConfig64::new(80, RngSeed(1))).unwrap();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 10..=80 {
        let v = mmd_squared(&tr.prefix(n).bq_rule(&k, &mu).unwrap(), &k, &mu).unwrap();
        xs.push((n as f64).ln());
        ys.push(0.5 * v.max(f64::MIN_POSITIVE).ln());
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    check(slope <= -0.9, || format!("slope {slope:.3}"))?;
    Ok(format!("slope {slope:.3}"))
}

fn c10_contraction() -> Outcome {
    let mut rng = RngSeed(10).rng(0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m: f64 = rng.random_range(-2.0..2.0);
        let sd: f64 = rng.random_range(0.01..2.0);
        let a: f64 = rng.random_range(-3.0..1.0);
        let b = a + rng.random_range(0.1..3.0);
        let post = IntegralPosterior64::new(m, sd * sd).unwrap();
        let got = contraction_mass(&post, a, b).unwrap();
        let pdf = |t: f64| (-(t - m).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
        let inside = adaptive(|t| Ok(pdf(t)), a, b, 1e-14, 2000).unwrap().value;
        let gap = (got - (1.0 - inside)).abs();
        worst = worst.max(gap);
        check(gap <= 1e-10, || format!("m {m}, sd {sd}, ({a}, {b}): {got} vs {}", 1.0 - inside))?;
    }
    let (a, b, m) = (-0.5, 1.5, 0.2);
    let mut prev = 0.0;
    for i in 1..=200 {
        let sd = 0.01 * i as f64;
        let v = contraction_mass(&IntegralPosterior64::new(m, sd * sd).unwrap(), a, b).unwrap();
        check(v >= prev, || format!("mass decreased at σ = {sd}"))?;
        prev = v;
    }
    let mut ratio_gap = 0.0f64;
    for t in [6.0f64, 7.0, 8.0, 10.0, 15.0] {
        let (exact, asym) = contraction_bound(t * 0.3, 0.3).unwrap();
        let r = exact / asym;
        ratio_gap = ratio_gap.max((r - 1.0).abs());
        check((r - 1.0).abs() <= 0.05, || format!("γ/σ = {t}: ratio {r}"))?;
    }
    Ok(format!("tail error {worst:.1e}, worst ratio gap {ratio_gap:.3}"))
}

fn c11_interpolation() -> Outcome {
    let mut rng = RngSeed(11).rng(0);
    let mut worst = 0.0f64;
    for case in 0..20u64 {
        let (p, k, mu) = mixture(400 + case, 20);
        let n = rng.random_range(1..=20);
        let tr = select(Method::FW, &p, &k, &mu, &SelectionConfig64::new(n, RngSeed(case)).with_pool_size(2000)).unwrap();
        let m = rng.random_range(1..=tr.len());
        let coeffs: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let f = KernelExpansion::new(tr.points[..m].to_vec(), coeffs).unwrap();
        let values: Vec<f64> = tr.points.iter().map(|x| f.eval(&k, x)).collect();
        let post = posterior(&tr.points, &values, &k, &mu).unwrap();
        let truth = f.integral(&mu).unwrap();
        let rel = (post.mean - truth).abs() / truth.abs().max(1e-300);
        worst = worst.max(rel);
        check(rel <= 1e-8, || format!("case {case} (n = {n}): {} vs {truth}", post.mean))?;
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn c12_model_selection() -> Outcome {
    let cfg = ExperimentConfig::new(Experiment::ModelSelect);
    let out = run_model_select(&cfg).unwrap();
    let find = |n: usize| &out.results.iter().find(|(m, _)| *m == n).unwrap().1;
    let (r10, r200) = (find(10), find(200));
    let detail = format!(
        "{} models; width {:.3e} → {:.3e}, mapStability {:.3} → {:.3}",
        out.models.len(),
        r10.mean_width95(),
        r200.mean_width95(),
        r10.map_stability,
        r200.map_stability
    );
    check(out.models.len() == 56, || detail.clone())?;
    check(r200.mean_width95() < r10.mean_width95(), || detail.clone())?;
    check(r200.map_stability >= r10.map_stability, || detail.clone())?;
    Ok(detail)
}

fn c13_error_bound() -> Outcome {
    let mut rng = RngSeed(13).rng(0);
    let mut tightest = f64::INFINITY;
    for case in 0..50u64 {
        let (p, k, mu) = mixture(500 + case % 5, 20);
        let n = rng.random_range(1..=25);
        let tr = select(Method::FWBQ, &p, &k, &mu, &SelectionConfig64::new(n, RngSeed(case)).with_pool_size(1000)).unwrap();
        let centres: Vec<Vec<f64>> = (0..6).map(|_| (0..2).map(|_| rng.random_range(-4.0..4.0)).collect()).collect();
        let coeffs: Vec<f64> = (0..6).map(|_| StandardNormal.sample(&mut rng)).collect();
        let f = KernelExpansion::new(centres, coeffs).unwrap();
        let values: Vec<f64> = tr.points.iter().map(|x| f.eval(&k, x)).collect();
        let post = posterior(&tr.points, &values, &k, &mu).unwrap();
        let err = (f.integral(&mu).unwrap() - post.mean).abs();
        let bound = post.sd() * f.norm(&k);
        tightest = tightest.min(bound - err);
        check(err <= bound + 1e-10, || format!("case {case}: error {err:e} > bound {bound:e}"))?;
    }
    Ok(format!("smallest slack {tightest:.2e}"))
}

fn main() {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "truncated-Gaussian initial errors", limit: secs(30), run: c1_trunc_constants },
        Criterion { id: 2, name: "posterior variance equals MMD²", limit: secs(5), run: c2_variance_identity },
        Criterion { id: 3, name: "BQ weights are minimax", limit: secs(5), run: c3_minimax },
        Criterion { id: 4, name: "FW weights uniform for 1/(i+1)", limit: None, run: c4_uniform_weights },
        Criterion { id: 5, name: "BQ ≤ 0.1 × FW at n = 50", limit: secs(120), run: c5_ordering },
        Criterion { id: 6, name: "monotone BQ refinement", limit: None, run: c6_monotone },
        Criterion { id: 7, name: "line-search optimality", limit: secs(10), run: c7_line_search },
        Criterion { id: 8, name: "RFF unbiasedness", limit: None, run: c8_rff_unbiased },
        Criterion { id: 9, name: "finite-dimensional rate", limit: secs(120), run: c9_rff_rate },
        Criterion { id: 10, name: "contraction computation", limit: None, run: c10_contraction },
        Criterion { id: 11, name: "BQ interpolation exactness", limit: None, run: c11_interpolation },
        Criterion { id: 12, name: "model-selection narrowing", limit: secs(300), run: c12_model_selection },
        Criterion { id: 13, name: "worst-case error bound", limit: None, run: c13_error_bound },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs())),
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {}: {tag} ({detail}; {:.1}s)", c.id, c.name, took.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
