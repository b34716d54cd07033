use super::*;
use crate::evt::rescaling_lambertw;
use crate::specfun::PI_SQ_OVER_6;
use proptest::prelude::*;

fn point() -> SurvivalModel {
    SurvivalModel::point_1d(1.0, 1.0).unwrap()
}

fn robin() -> SurvivalModel {
    SurvivalModel::robin_1d(1.0, 1.0, 1.0).unwrap()
}

fn sphere() -> SurvivalModel {
    SurvivalModel::sphere_3d(1.0, 1.0).unwrap()
}

fn spec(k: u32, n: u64) -> OrderStatSpec {
    OrderStatSpec::new(k, n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn order_stat_spec_validation() {
    assert!(OrderStatSpec::new(0, 5).is_err());
    assert!(OrderStatSpec::new(6, 5).is_err());
    let s = OrderStatSpec::new(5, 5).unwrap();
    assert_eq!((s.k(), s.n()), (5, 5));
}

#[test]
fn survival_tn_basics() {
    let m = point();
    for t in [0.01, 0.25, 3.0] {
        assert_eq!(survival_tn(&m, 1, t).unwrap(), m.survival(t));
    }
    assert_eq!(survival_tn(&m, 1000, 0.0).unwrap(), 1.0);
    assert!(survival_tn(&m, 0, 1.0).is_err());
    assert!(survival_tn(&m, 3, -1.0).is_err());
    // erf(1)^100 from mpmath
    let v = survival_tn(&m, 100, 0.25).unwrap();
    assert!(rel(v, 3.692_667_955_058_480_5e-8) < 1e-12, "{v:e}");
}

#[test]
fn survival_tkn_boundaries() {
    let m = sphere();
    for t in [0.02, 0.1, 0.4] {
        let a = survival_tkn(&m, spec(1, 7), t).unwrap();
        assert_eq!(a, survival_tn(&m, 7, t).unwrap());
    }
    assert_eq!(survival_tkn(&m, spec(7, 7), 0.0).unwrap(), 1.0);
    assert!(survival_tkn(&m, spec(7, 7), 50.0).unwrap() < 1e-100);
}

#[test]
fn binomial_head_small_case() {
    let h = 0.5f64.ln();
    assert!((binomial_head(2, 3, h, h) - 0.5).abs() < 1e-15);
    assert!((binomial_head(3, 3, h, h) - 0.875).abs() < 1e-15);
    assert_eq!(binomial_head(2, 3, f64::NEG_INFINITY, 0.0), 0.0);
    assert_eq!(binomial_head(1, 3, 0.0, f64::NEG_INFINITY), 1.0);
}

#[test]
fn survival_tkn_matches_enumeration() {
    let m = point();
    let n = 5usize;
    for i in 0..20 {
        let t = 0.02 * 1.6f64.powi(i);
        let s = m.survival(t);
        let q = 1.0 - s;
        for k in 1..=5u32 {
            // fewer than k of the 5 searchers have arrived by t
            let brute: f64 = (0u32..32)
                .filter(|mask| mask.count_ones() < k)
                .map(|mask| {
                    let arrived = mask.count_ones() as i32;
                    q.powi(arrived) * s.powi(n as i32 - arrived)
                })
                .sum();
            let v = survival_tkn(&m, spec(k, 5), t).unwrap();
            assert!((v - brute).abs() < 1e-12, "t={t} k={k}: {v} vs {brute}");
        }
    }
}

#[test]
fn sphere_mean_exit_time() {
    let e = moment_tkn(&sphere(), spec(1, 1), 1.0).unwrap();
    assert!((e - 1.0 / 6.0).abs() < 1e-8, "{e}");
    let s = SurvivalModel::sphere_3d(2.0, 0.5).unwrap();
    let e = moment_tkn(&s, spec(1, 1), 1.0).unwrap();
    assert!(rel(e, 4.0 / 3.0) < 1e-8, "{e}");
}

#[test]
fn heavy_tail_moments_refused() {
    let m = point();
    assert!(matches!(moment_tkn(&m, spec(1, 2), 1.0), Err(Error::InfiniteMoment(_))));
    assert!(matches!(moment_tkn(&m, spec(1, 4), 2.0), Err(Error::InfiniteMoment(_))));
    assert!(moment_tkn(&m, spec(1, 5), 2.0).is_ok());
    assert!(matches!(moment_tkn(&m, spec(3, 4), 1.0), Err(Error::InfiniteMoment(_))));
    assert!(moment_tkn(&m, spec(1, 3), 0.0).is_err());
}

#[test]
fn means_match_reference_integrals() {
    // mpmath quadrature of S(t)^N at 30 digits
    let cases = [
        (point(), 3u64, 0.757_602_154_836_948_2),
        (point(), 1000, 0.043_509_909_259_309_47),
        (point(), 1_000_000, 0.020_145_721_278_642_296),
        (robin(), 1_000_000, 0.026_464_728_328_528_955),
    ];
    for (m, n, want) in cases {
        let got = moment_tkn(&m, spec(1, n), 1.0).unwrap();
        assert!(rel(got, want) < 1e-8, "{} N={n}: {got}", m.label());
    }
}

#[test]
fn means_nondecreasing_in_k() {
    let m = sphere();
    let means: Vec<f64> = (1..=3).map(|k| moment_tkn(&m, spec(k, 50), 1.0).unwrap()).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
}

#[test]
fn gap_and_variance_laws_sphere() {
    let m = sphere();
    let mut gaps = Vec::new();
    let mut ratios = Vec::new();
    for n in [1000u64, 10_000, 100_000, 1_000_000] {
        let a = rescaling_lambertw(m.short_time(), n).unwrap().a_n;
        let e1 = moment_tkn(&m, spec(1, n), 1.0).unwrap();
        let e2 = moment_tkn(&m, spec(2, n), 1.0).unwrap();
        gaps.push((e2 - e1) / a);
        ratios.push(variance_tkn(&m, spec(1, n)).unwrap() / (a * a));
    }
    let (g0, g1) = (gaps[0], gaps[gaps.len() - 1]);
    assert!(g1 > 0.7 && g1 < 1.3 && (g1 - 1.0).abs() < (g0 - 1.0).abs(), "{gaps:?}");
    let last = ratios[ratios.len() - 1];
    assert!(rel(last, PI_SQ_OVER_6) < 0.35, "{ratios:?}");
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}

#[test]
fn variance_positive_and_consistent() {
    let m = robin();
    let v = variance_tkn(&m, spec(1, 10_000)).unwrap();
    let e1 = moment_tkn(&m, spec(1, 10_000), 1.0).unwrap();
    assert!(v > 0.0 && v < e1 * e1);
    assert!(matches!(variance_tkn(&point(), spec(1, 4)), Err(Error::InfiniteMoment(_))));
}

#[test]
fn rescaled_pdf_normalized() {
    let m = point();
    let n = 10_000;
    let r = rescaling_lambertw(m.short_time(), n).unwrap();
    let mass = integrate(|x| rescaled_tn_pdf(&m, n, &r, x), -8.0, 8.0, QuadOptions::default())
        .unwrap()
        .value;
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
    assert_eq!(rescaled_tn_pdf(&m, n, &r, -r.b_n / r.a_n - 1.0), 0.0);
}

fn pdf_deviation(m: &SurvivalModel, n: u64) -> f64 {
    let r = rescaling_lambertw(m.short_time(), n).unwrap();
    (0..=800)
        .map(|i| {
            let x = -4.0 + 0.01 * i as f64;
            (rescaled_tn_pdf(m, n, &r, x) - (x - x.exp()).exp()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn rescaled_pdf_approaches_gumbel() {
    for m in [point(), robin(), sphere()] {
        let devs: Vec<f64> = [100u64, 10_000, 1_000_000].iter().map(|&n| pdf_deviation(&m, n)).collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]), "{}: {devs:?}", m.label());
    }
    // point and sphere settle below 0.05 by N = 1e6; robin is at 0.0599 (mpmath)
    assert!(pdf_deviation(&point(), 1_000_000) < 0.05);
    assert!(pdf_deviation(&sphere(), 1_000_000) < 0.05);
    assert!((pdf_deviation(&robin(), 1_000_000) - 0.059_93).abs() < 5e-4);
}

#[test]
fn ks_distance_shrinks() {
    for m in [point(), robin(), sphere()] {
        let d: Vec<f64> = (2..=6)
            .map(|e| {
                let n = 10u64.pow(e);
                ks_distance_to_gumbel(&m, n, &rescaling_lambertw(m.short_time(), n).unwrap()).unwrap()
            })
            .collect();
        assert!(d.iter().all(|v| *v <= 1.0));
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{}: {d:?}", m.label());
    }
    let m = point();
    let r = rescaling_lambertw(m.short_time(), 2).unwrap();
    assert!(ks_distance_to_gumbel(&m, 2, &r).unwrap() > 0.05);
    assert!(ks_distance_to_gumbel(&m, 1, &r).is_err());
}

#[test]
fn error_table_ordering_and_trend() {
    let ns = [100u64, 1000, 10_000, 100_000, 1_000_000];
    for m in [point(), robin(), sphere()] {
        let rows = error_table(&m, &ns, 1).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), ns);
        for w in rows.windows(2) {
            assert!(w[1].err_baseline < w[0].err_baseline, "{}", m.label());
            assert!(w[1].err_elementary < w[0].err_elementary, "{}", m.label());
            assert!(w[1].err_lambertw < w[0].err_lambertw, "{}", m.label());
        }
        for r in &rows {
            assert!(r.exact_mean > 0.0 && r.err_lambertw > 0.0 && r.err_elementary > 0.0);
        }
    }
    let r = error_table(&point(), &[10_000], 1).unwrap()[0];
    assert!(r.err_lambertw < r.err_elementary && r.err_elementary < r.err_baseline, "{r:?}");
    let r = error_table(&sphere(), &[100], 1).unwrap()[0];
    assert!(r.err_baseline > 0.1);
    assert!(matches!(error_table(&point(), &[2], 1), Err(Error::InfiniteMoment(_))));
}

#[test]
fn error_table_independent_of_threads() {
    let ns = [100u64, 1000, 10_000, 100_000];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| error_table(&robin(), &ns, 2).unwrap())
    };
    let (a, b) = (run(1), run(4));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.exact_mean.to_bits(), y.exact_mean.to_bits());
        assert_eq!(x.err_lambertw.to_bits(), y.err_lambertw.to_bits());
    }
}

#[test]
fn regime_diagnostic_cases() {
    let unit = SurvivalModel::tabulated(
        &[0.1, 0.2, 0.5, 1.0],
        &[0.99, 0.9, 0.6, 0.4],
        ShortTimeParams::new(1.0, 0.0, 1.0).unwrap(),
        TailClass::Exponential,
    )
    .unwrap();
    for n in [3u64, 100, 1_000_000] {
        let d = regime_diagnostic(&unit, n).unwrap();
        assert_eq!(d.log_ratio, 0.0);
        assert!(d.in_regime);
    }
    for m in [point(), robin(), sphere()] {
        assert!(regime_diagnostic(&m, 1_000_000_000).unwrap().in_regime, "{}", m.label());
    }
    let weak = SurvivalModel::robin_1d(1.0, 1.0, 1e-3).unwrap();
    let d = regime_diagnostic(&weak, 1000).unwrap();
    assert!((d.log_ratio - 1.183_201_644_003_682_7).abs() < 1e-12);
    assert!(!d.in_regime);
    assert!(regime_diagnostic(&point(), 2).is_err());
    // the sphere normalizers are defined from N = 2, so this uses LambertW
    let d = regime_diagnostic(&sphere(), 3).unwrap();
    assert!(d.dimensionless_mean > 0.0);
}

proptest! {
    #[test]
    fn survival_tkn_monotone(t in 0.005..5.0f64, dt in 0.0..2.0f64, n in 1u64..40) {
        let m = robin();
        let mut prev = 0.0;
        for k in 1..=n.min(6) as u32 {
            let s = spec(k, n);
            let here = survival_tkn(&m, s, t).unwrap();
            let later = survival_tkn(&m, s, t + dt).unwrap();
            prop_assert!(later <= here + 1e-15);
            prop_assert!(here >= prev - 1e-15);
            prop_assert!((0.0..=1.0).contains(&here));
            prev = here;
        }
    }
}
