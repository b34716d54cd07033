use super::*;
use crate::quad::{integrate, QuadOptions};
use proptest::prelude::*;

fn point() -> SurvivalModel {
    SurvivalModel::point_1d(1.0, 1.0).unwrap()
}

fn builtins() -> Vec<SurvivalModel> {
    vec![
        SurvivalModel::point_1d(1.0, 1.0).unwrap(),
        SurvivalModel::robin_1d(1.0, 1.0, 1.0).unwrap(),
        SurvivalModel::sphere_3d(1.0, 1.0).unwrap(),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn decades() -> impl Iterator<Item = u64> {
    (2..=8).map(|e| 10u64.pow(e))
}

#[test]
fn standard_gumbel_summaries() {
    let g = GumbelParams::standard();
    assert!((g.mean() + EULER_GAMMA).abs() < 1e-15);
    assert!((g.median() - (-0.366_512_920_581_664_3)).abs() < 1e-15);
    assert!((g.variance() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
    assert_eq!(g.mode(), 0.0);
    assert!((g.survival(0.0) - (-1.0f64).exp()).abs() < 1e-16);
    assert!((g.survival(0.3) + g.cdf(0.3) - 1.0).abs() < 1e-15);
}

#[test]
fn gumbel_location_scale() {
    let g = GumbelParams::new(2.0, 0.5).unwrap();
    assert!((g.mean() - (2.0 - 0.5 * EULER_GAMMA)).abs() < 1e-15);
    assert!((g.survival(g.median()) - 0.5).abs() < 1e-15);
    assert!((g.pdf(2.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    assert!(GumbelParams::new(0.0, 0.0).is_err());
    assert!(GumbelParams::new(f64::NAN, 1.0).is_err());
}

#[test]
fn gumbel_pdf_normalized_with_matching_moments() {
    let g = GumbelParams::new(1.0, 0.3).unwrap();
    let opts = QuadOptions::default();
    let mass = integrate(|x| g.pdf(x), -10.0, 15.0, opts).unwrap().value;
    let m1 = integrate(|x| x * g.pdf(x), -10.0, 15.0, opts).unwrap().value;
    let m2 = integrate(|x| (x - m1).powi(2) * g.pdf(x), -10.0, 15.0, opts).unwrap().value;
    assert!((mass - 1.0).abs() < 1e-10);
    assert!((m1 - g.mean()).abs() < 1e-10);
    assert!((m2 - g.variance()).abs() < 1e-10);
}

#[test]
fn mgf_pole_and_derivative() {
    let g = GumbelParams::new(0.4, 0.7).unwrap();
    assert!(matches!(g.mgf(-1.0 / 0.7), Err(Error::Domain(_))));
    assert!(g.mgf(-2.0).is_err());
    assert!((g.mgf(0.0).unwrap() - 1.0).abs() < 1e-14);
    let h = 1e-5;
    let d = (g.mgf(h).unwrap() - g.mgf(-h).unwrap()) / (2.0 * h);
    assert!((d - g.mean()).abs() < 1e-6);
}

#[test]
fn variant_names_round_trip() {
    for v in RescalingVariant::ALL {
        assert_eq!(v.name().parse::<RescalingVariant>().unwrap(), v);
    }
    assert!("lambert".parse::<RescalingVariant>().is_err());
}

#[test]
fn lambertw_p_zero() {
    let stp = ShortTimeParams::new(1.0, 0.0, 1.0).unwrap();
    let r = rescaling_lambertw(&stp, 10_000).unwrap();
    let l = 10_000f64.ln();
    assert!(rel(r.b_n, 1.0 / l) < 1e-15);
    assert!(rel(r.a_n, 1.0 / (l * l)) < 1e-15);
    assert!((r.b_n - 0.108_574).abs() < 1e-6);
    assert!((r.a_n - 0.011_788_2).abs() < 1e-7);
}

#[test]
fn lambertw_p_zero_undefined_for_small_an() {
    let stp = ShortTimeParams::new(0.01, 0.0, 1.0).unwrap();
    match rescaling_lambertw(&stp, 50) {
        Err(Error::Undefined { min_valid_n, .. }) => assert_eq!(min_valid_n, Some(101)),
        other => panic!("expected undefined, got {other:?}"),
    }
    assert!(rescaling_lambertw(&stp, 101).is_ok());
}

#[test]
fn lambertw_point_1d_million() {
    let r = rescaling_lambertw(point().short_time(), 1_000_000).unwrap();
    assert!(r.b_n > 0.02 && r.b_n < 0.022, "b = {}", r.b_n);
    // mpmath: C / (p W0(0.5 (A N)^2))
    assert!(rel(r.b_n, 0.020_832_179_579_044_735) < 1e-12, "b = {:.17}", r.b_n);
}

#[test]
fn lambertw_lower_branch_reports_min_n() {
    let stp = ShortTimeParams::new(0.5, -0.5, 1.0).unwrap();
    let min_n = lambertw_min_n(&stp);
    match rescaling_lambertw(&stp, min_n - 1) {
        Err(Error::Undefined { min_valid_n, .. }) => assert_eq!(min_valid_n, Some(min_n)),
        other => panic!("expected undefined, got {other:?}"),
    }
    assert!(rescaling_lambertw(&stp, min_n).is_ok());
    let sphere = SurvivalModel::sphere_3d(1.0, 1.0).unwrap();
    assert_eq!(lambertw_min_n(sphere.short_time()), 2);
    assert!(rescaling_lambertw(sphere.short_time(), 2).is_ok());
}

#[test]
fn rescaling_rejects_small_n() {
    let m = point();
    assert!(matches!(rescaling_lambertw(m.short_time(), 1), Err(Error::Domain(_))));
    assert!(matches!(rescaling_elementary(m.short_time(), 2), Err(Error::Domain(_))));
    assert!(matches!(rescaling_numeric(&m, 1), Err(Error::Domain(_))));
    assert!(rescaling_elementary(m.short_time(), 3).is_ok());
}

#[test]
fn elementary_examples() {
    let stp = ShortTimeParams::new(1.0, 0.0, 1.0).unwrap();
    let r = rescaling_elementary(&stp, 10_000).unwrap();
    let l = 10_000f64.ln();
    assert!(rel(r.b_n, 1.0 / l) < 1e-15);
    assert!(rel(r.a_n, 1.0 / (l * l)) < 1e-15);

    let r = rescaling_elementary(point().short_time(), 1_000_000).unwrap();
    assert!((r.b_n - 0.020_57).abs() < 5e-5, "b' = {}", r.b_n);
}

#[test]
fn numeric_closed_form_case() {
    let stp = ShortTimeParams::new(1.0, 0.0, 1.0).unwrap();
    for n in [10u64, 1000, 123_456] {
        let r = rescaling_numeric_params(&stp, n).unwrap();
        let l = (n as f64).ln();
        assert!(rel(r.b_n, 1.0 / l) < 1e-13);
        assert!(rel(r.a_n, 1.0 / (l * l)) < 1e-12);
    }
    let r = rescaling_numeric_params(&stp, 1000).unwrap();
    assert!((r.b_n - 0.144_765).abs() < 1e-6);
}

#[test]
fn numeric_residual_point_1d() {
    let m = point();
    let r = rescaling_numeric(&m, 1_000_000).unwrap();
    let s0 = m.short_time().s0(r.b_n);
    assert!((s0 - (1.0 - 1e-6)).abs() < 1e-12);
}

#[test]
fn numeric_matches_lambertw() {
    for m in builtins() {
        for n in decades() {
            let w = rescaling_lambertw(m.short_time(), n).unwrap();
            let x = rescaling_numeric(&m, n).unwrap();
            assert!((w.b_n - x.b_n).abs() / x.a_n < 1e-9, "{} N={n}", m.label());
            assert!(rel(w.a_n, x.a_n) < 1e-9, "{} N={n}", m.label());
        }
    }
}

#[test]
fn numeric_monotone_in_n() {
    for m in builtins() {
        let mut prev = f64::INFINITY;
        for n in decades() {
            let r = rescaling_numeric(&m, n).unwrap();
            assert!(r.a_n > 0.0 && r.b_n < prev);
            prev = r.b_n;
        }
    }
}

fn elementary_deviation(m: &SurvivalModel, n: u64) -> (f64, f64) {
    let w = rescaling_lambertw(m.short_time(), n).unwrap();
    let e = rescaling_elementary(m.short_time(), n).unwrap();
    (e.a_n / w.a_n - 1.0, (e.b_n - w.b_n) / w.a_n)
}

#[test]
fn elementary_converges_to_lambertw_point_1d() {
    let m = point();
    let stats: Vec<(f64, f64)> = decades()
        .map(|n| {
            let (da, db) = elementary_deviation(&m, n);
            (da.abs(), db.abs())
        })
        .collect();
    let (first, last) = (stats[0], stats[stats.len() - 1]);
    assert!(last.0 < 0.2 && last.1 < 0.2, "{last:?}");
    assert!(last.0 < first.0 && last.1 < first.1, "{stats:?}");
}

#[test]
fn elementary_deviation_matches_reference() {
    // (a'/a - 1, (b' - b)/a) at N = 1e2, 1e8, 1e19. The remainder decays like
    // (ln ln N)^2 / ln N, so the sphere is still above 0.2 at 1e8 and the
    // Robin model (p = 3/2) has not started to converge there.
    let cases = [
        (
            point(),
            [(-0.368_457_323_261_610_3, -0.166_168_096_031_257_4),
             (-0.178_455_675_561_289_6, -0.147_804_650_198_195_4),
             (-0.097_338_754_892_514_67, -0.103_501_663_978_465_4)],
        ),
        (
            SurvivalModel::sphere_3d(1.0, 1.0).unwrap(),
            [(0.747_448_685_226_664_4, -0.552_091_635_823_792_1),
             (0.238_426_199_382_816_2, -0.250_304_224_996_720_4),
             (0.116_722_010_348_474_6, -0.145_667_420_603_194_7)],
        ),
        (
            SurvivalModel::robin_1d(1.0, 1.0, 1.0).unwrap(),
            [(-0.623_245_232_223_253_3, -0.599_610_430_999_958_9),
             (-0.421_869_731_253_368_7, -0.868_473_028_884_651_3),
             (-0.253_190_531_734_878_2, -0.714_562_287_087_772_5)],
        ),
    ];
    for (m, refs) in &cases {
        for (n, (da_ref, db_ref)) in [100u64, 100_000_000, 10u64.pow(19)].into_iter().zip(refs) {
            let (da, db) = elementary_deviation(m, n);
            assert!((da - da_ref).abs() < 1e-9, "{} N={n}: {da}", m.label());
            assert!((db - db_ref).abs() < 1e-9, "{} N={n}: {db}", m.label());
        }
    }
}

#[test]
fn xk_reduces_to_gumbel() {
    let g = GumbelParams::standard();
    for x in [-3.0, -0.5, 0.0, 1.2, 2.5] {
        assert!((xk_pdf(1, x).unwrap() - g.pdf(x)).abs() < 1e-14);
        assert!((xk_joint_pdf(&[x]).unwrap() - g.pdf(x)).abs() < 1e-15);
    }
    assert!(xk_pdf(0, 0.0).is_err());
    assert!(xk_mean(0).is_err());
    assert!(xk_variance(0).is_err());
}

#[test]
fn xk_means_step_by_harmonic() {
    assert!((xk_mean(1).unwrap() + EULER_GAMMA).abs() < 1e-15);
    for k in 1..10u32 {
        let gap = xk_mean(k + 1).unwrap() - xk_mean(k).unwrap();
        assert!((gap - 1.0 / k as f64).abs() < 1e-14);
    }
    assert!((xk_variance(1).unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
}

#[test]
fn xk_pdf_normalization_and_moments() {
    let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
    let third = integrate(|x| xk_pdf(3, x).unwrap(), -20.0, 20.0, opts).unwrap().value;
    assert!((third - 1.0).abs() < 1e-10);
    for k in 1..=6u32 {
        let lo = -40.0 / k as f64 - 5.0;
        let mass = integrate(|x| xk_pdf(k, x).unwrap(), lo, 5.0, opts).unwrap().value;
        let mean = integrate(|x| x * xk_pdf(k, x).unwrap(), lo, 5.0, opts).unwrap().value;
        let mu = xk_mean(k).unwrap();
        let var = integrate(|x| (x - mu).powi(2) * xk_pdf(k, x).unwrap(), lo, 5.0, opts)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-9, "k={k} mass={mass}");
        assert!((mean - mu).abs() < 1e-8, "k={k}");
        assert!((var - xk_variance(k).unwrap()).abs() < 1e-8, "k={k}");
    }
}

#[test]
fn joint_pdf_support_and_marginal() {
    assert_eq!(xk_joint_pdf(&[1.0, 0.0]).unwrap(), 0.0);
    assert!(xk_joint_pdf(&[]).is_err());
    let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
    for x2 in [-1.0, 0.0, 1.0] {
        let marginal = integrate(|x1| xk_joint_pdf(&[x1, x2]).unwrap(), -60.0, x2, opts)
            .unwrap()
            .value;
        assert!((marginal - xk_pdf(2, x2).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn approx_moments_relations() {
    let r = rescaling_lambertw(point().short_time(), 10_000).unwrap();
    let m1 = approx_moments(&r, 1).unwrap();
    let m2 = approx_moments(&r, 2).unwrap();
    assert!((m1.mean - (r.b_n - EULER_GAMMA * r.a_n)).abs() < 1e-15);
    assert!((m2.mean - m1.mean - r.a_n).abs() < 1e-15);
    assert!(rel(m1.variance, PI_SQ_OVER_6 * r.a_n * r.a_n) < 1e-14);
    assert_eq!(m1.mean, r.gumbel().mean());
    assert!(approx_moments(&r, 0).is_err());
}

proptest! {
    #[test]
    fn gumbel_survival_monotone(b in -5.0..5.0f64, a in 0.01..10.0f64, x in -20.0..20.0f64, dx in 0.0..5.0f64) {
        let g = GumbelParams::new(b, a).unwrap();
        let (s1, s2) = (g.survival(x), g.survival(x + dx));
        prop_assert!((0.0..=1.0).contains(&s1));
        prop_assert!(s2 <= s1);
        prop_assert!(g.pdf(x) >= 0.0);
    }

    #[test]
    fn rescaling_pairs_positive(
        ln_a in -3.0..3.0f64,
        p in prop::sample::select(vec![-1.5, -0.5, 0.0, 0.5, 1.5]),
        c in 0.01..10.0f64,
        e in 3u32..12,
    ) {
        let stp = ShortTimeParams::new(ln_a.exp(), p, c).unwrap();
        let n = 10u64.pow(e);
        for r in [rescaling_lambertw(&stp, n), rescaling_numeric_params(&stp, n), rescaling_elementary(&stp, n)] {
            match r {
                Ok(r) => prop_assert!(r.a_n > 0.0 && r.b_n > 0.0),
                Err(Error::Undefined { .. }) | Err(Error::Solver(_)) => {}
                Err(other) => prop_assert!(false, "unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn lambertw_solves_short_time_equation(
        ln_a in -2.0..2.0f64,
        p in prop::sample::select(vec![-0.5, 0.5, 1.5]),
        c in 0.05..5.0f64,
        e in 2u32..15,
    ) {
        let stp = ShortTimeParams::new(ln_a.exp(), p, c).unwrap();
        let n = 10u64.pow(e);
        if let Ok(r) = rescaling_lambertw(&stp, n) {
            let lhs = stp.one_minus_s0(r.b_n) * n as f64;
            prop_assert!((lhs - 1.0).abs() < 1e-9, "N (1 - S0(b)) = {lhs}");
        }
    }

    #[test]
    fn xk_joint_pdf_ordered_positive(xs in prop::collection::vec(-5.0..3.0f64, 1..6)) {
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert!(xk_joint_pdf(&sorted).unwrap() > 0.0);
    }
}
