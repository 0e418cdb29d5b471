use fwbq::kernel::rff_sample;
use fwbq::linalg::{Cholesky, Matrix};
use fwbq::mean_element::{analytic_mean_element, mixture_eq_mean_element, MeanElement, Provenance};
use fwbq::quadrature::{bq_rule, jitter_ladder, mmd_squared, posterior, BqSystem};
use fwbq::selector::select;
use fwbq::{
    EqKernel64, GaussianMixture, GaussianMixture64, Kernel, Kernel64, Method, QuadratureRule64, RngSeed,
    SelectionConfig, SelectionConfig64, TargetDensity, TargetDensity64,
};

#[test]
fn rff_feature_mmd_matches_expanded_form() {
    let p = GaussianMixture64::random(2, 3, RngSeed(11)).unwrap();
    let rff: Kernel64 = rff_sample(0.8, 1.0, 2, 60, RngSeed(2)).unwrap().into();
    let mu = analytic_mean_element(&p.clone().into(), &rff).unwrap();
    // Same mean element without the feature mean forces the expanded form.
    let mu_plain = {
        let inner = mu.clone();
        MeanElement::from_fn(2, mu.initial_error(), Provenance::Analytic, move |x| inner.evaluate(x))
    };
    let target: TargetDensity64 = p.into();
    let pts = target.sample(12, RngSeed(5));
    let w: Vec<f64> = (0..12).map(|i| 1.0 / 12.0 + 0.01 * (i as f64 - 5.5)).collect();
    let rule = QuadratureRule64::new(pts, w, Method::MC).unwrap();
    let a = mmd_squared(&rule, &rff, &mu).unwrap();
    let b = mmd_squared(&rule, &rff, &mu_plain).unwrap();
    assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
}

#[test]
fn ladder_skips_zero_jitter_for_near_singular_gram() {
    // Two points 1e-6 apart: the second pivot is about 1e-12, far below the
    // first positive rung.
    let k: Kernel64 = EqKernel64::new(1.0, 1.0, 1).unwrap().into();
    let gram = k.gram(&[vec![0.0], vec![1e-6]]);
    assert!(Cholesky::new(&gram, 0.0).is_some());
    let chol = Cholesky::with_jitter_ladder(&gram, &jitter_ladder(1.0)).unwrap();
    assert!(chol.jitter() > 0.0);

    let gram = k.gram(&[vec![0.0], vec![1.0]]);
    let chol = Cholesky::with_jitter_ladder(&gram, &jitter_ladder(1.0)).unwrap();
    assert_eq!(chol.jitter(), 0.0);
}

#[test]
fn ladder_reports_ill_conditioning() {
    let a = Matrix::from_fn(2, 2, |i, j| if i == j { -1.0 } else { 0.0 });
    assert!(Cholesky::with_jitter_ladder(&a, &jitter_ladder(1.0)).is_err());
}

#[test]
fn f32_pipeline_tracks_f64() {
    let p64 = GaussianMixture64::random(2, 5, RngSeed(8)).unwrap();
    let k64 = EqKernel64::new(1.0, 0.8, 2).unwrap();
    let mu64 = mixture_eq_mean_element(&p64, &k64).unwrap();
    let t64: TargetDensity64 = p64.into();
    let k64: Kernel64 = k64.into();
    let tr64 = select(Method::FW, &t64, &k64, &mu64, &SelectionConfig64::new(15, RngSeed(1)).with_pool_size(500)).unwrap();
    let m64 = mmd_squared(&tr64.native_rule().unwrap(), &k64, &mu64).unwrap();

    let p32 = GaussianMixture::<f32>::random(2, 5, RngSeed(8)).unwrap();
    let k32 = fwbq::EqKernel::<f32>::new(1.0, 0.8, 2).unwrap();
    let mu32 = mixture_eq_mean_element(&p32, &k32).unwrap();
    let t32: TargetDensity<f32> = p32.into();
    let k32: Kernel<f32> = k32.into();
    let tr32 = select(Method::FW, &t32, &k32, &mu32, &SelectionConfig::new(15, RngSeed(1)).with_pool_size(500)).unwrap();
    let m32 = mmd_squared(&tr32.native_rule().unwrap(), &k32, &mu32).unwrap();
    assert!(((m32 as f64) - m64).abs() < 1e-3 * m64.max(1e-3), "{m32} vs {m64}");
}

#[test]
fn bq_rule_integrates_mean_element_sections() {
    // f = μ_p itself has p[f] = p[μ_p]; the BQ posterior mean should approach it.
    let p = GaussianMixture64::random(2, 4, RngSeed(21)).unwrap();
    let eq = EqKernel64::new(1.0, 0.8, 2).unwrap();
    let mu = mixture_eq_mean_element(&p, &eq).unwrap();
    let t: TargetDensity64 = p.into();
    let k: Kernel64 = eq.into();
    let tr = select(Method::SBQ, &t, &k, &mu, &SelectionConfig64::new(40, RngSeed(3)).with_pool_size(2000)).unwrap();
    let f: Vec<f64> = tr.points.iter().map(|x| mu.value(x)).collect();
    let post = posterior(&tr.points, &f, &k, &mu).unwrap();
    let sys = BqSystem::new(&tr.points, &k, &mu).unwrap();
    let rule = bq_rule(&tr.points, &k, &mu, Method::SBQ).unwrap();
    assert!((mmd_squared(&rule, &k, &mu).unwrap() - sys.variance().unwrap()).abs() < 1e-12);
    // |p[f] − m| ≤ MMD · ‖μ_p‖_H with ‖μ_p‖² = p[μ_p].
    let truth = mu.initial_error();
    assert!((post.mean - truth).abs() <= post.sd() * truth.sqrt() + 1e-12);
}
