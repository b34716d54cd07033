//! One function per subcommand. Each returns the full output text; warnings
//! and summaries go to stderr.

use std::fmt::Write as _;

use extreme_fpt::evt::{
    approx_moments, rescaling, rescaling_elementary, rescaling_lambertw, rescaling_numeric_params,
    RescalingVariant,
};
use extreme_fpt::exact::{
    error_table, moment_tkn, regime_diagnostic_params, rescaled_tn_pdf, variance_tkn, OrderStatSpec,
};
use extreme_fpt::mc::{sample_replicates, summarize, SampleConfig};
use extreme_fpt::Error;

use crate::config::RunConfig;
use crate::format::num;
use crate::CliError;

fn check_n(n: u64, variant: RescalingVariant) -> Result<(), CliError> {
    let min = if variant == RescalingVariant::Elementary { 3 } else { 2 };
    if n < min {
        return Err(CliError::usage(format!("N: the {variant} rescaling needs N >= {min}, got {n}")));
    }
    Ok(())
}

fn check_k(k: u32, n: u64) -> Result<OrderStatSpec, CliError> {
    OrderStatSpec::new(k, n).map_err(|_| CliError::usage(format!("k: need 1 <= k <= N, got k = {k}, N = {n}")))
}

pub fn rescale(cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let stp = cfg.short_time()?;
    let variants = cfg.variants.clone().unwrap_or_else(|| RescalingVariant::ALL.to_vec());
    let ns = cfg.ns()?;
    for &n in ns {
        for &v in &variants {
            check_n(n, v)?;
        }
    }
    out.push_str("N,variant,a_N,b_N\n");
    for &n in ns {
        for &v in &variants {
            let r = match v {
                RescalingVariant::LambertW => rescaling_lambertw(&stp, n),
                RescalingVariant::Elementary => rescaling_elementary(&stp, n),
                RescalingVariant::Numeric => rescaling_numeric_params(&stp, n),
            }?;
            writeln!(out, "{n},{v},{},{}", num(r.a_n), num(r.b_n)).unwrap();
        }
    }
    Ok(())
}

/// Exact moment, with `None` for a divergent one.
fn exact_or_inf(value: Result<f64, Error>) -> Result<Option<f64>, CliError> {
    match value {
        Ok(v) => Ok(Some(v)),
        Err(Error::InfiniteMoment(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn stats(cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let model = cfg.survival_model()?;
    let variant = cfg.single_variant()?;
    let ns = cfg.ns()?;
    let ks = cfg.ks();
    for &n in ns {
        check_n(n, variant)?;
        for &k in &ks {
            check_k(k, n)?;
        }
    }
    out.push_str("N,k,approx_mean,approx_variance,exact_mean,exact_variance,rel_err_mean\n");
    for &n in ns {
        let r = rescaling(variant, &model, n)?;
        let baseline = model.short_time().c() / (n as f64).ln();
        for &k in &ks {
            let approx = approx_moments(&r, k)?;
            if cfg.no_exact {
                writeln!(out, "{n},{k},{},{},,,", num(approx.mean), num(approx.variance)).unwrap();
                continue;
            }
            let spec = check_k(k, n)?;
            let mean = exact_or_inf(moment_tkn(&model, spec, 1.0))?;
            let var = exact_or_inf(variance_tkn(&model, spec))?;
            let field = |v: Option<f64>| v.map_or_else(|| "inf".to_string(), num);
            let rel = match mean {
                Some(e) => {
                    eprintln!(
                        "N={n} k={k}: baseline C/ln N relative error {}",
                        num(((e - baseline) / e).abs())
                    );
                    num(((e - approx.mean) / e).abs())
                }
                None => {
                    eprintln!("warning: N={n} k={k}: E[T] is infinite for this tail; reported as inf");
                    String::new()
                }
            };
            if mean.is_some() && var.is_none() {
                eprintln!("warning: N={n} k={k}: Var[T] is infinite for this tail; reported as inf");
            }
            writeln!(
                out,
                "{n},{k},{},{},{},{},{rel}",
                num(approx.mean),
                num(approx.variance),
                field(mean),
                field(var)
            )
            .unwrap();
        }
    }
    Ok(())
}

pub fn density(cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let model = cfg.survival_model()?;
    let variant = cfg.single_variant()?;
    let n = cfg.single_n()?;
    check_n(n, variant)?;
    let r = rescaling(variant, &model, n)?;
    out.push_str("x,pdf_exact,pdf_gumbel\n");
    for i in 0..=1200 {
        let x = (i as f64 - 600.0) / 100.0;
        let exact = rescaled_tn_pdf(&model, n, &r, x);
        writeln!(out, "{},{},{}", num(x), num(exact), num((x - x.exp()).exp())).unwrap();
    }
    Ok(())
}

pub fn error_table_cmd(cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let model = cfg.survival_model()?;
    let ns = cfg.ns()?;
    let k = cfg.single_k()?;
    for &n in ns {
        check_n(n, RescalingVariant::Elementary)?;
        check_k(k, n)?;
    }
    let rows = error_table(&model, ns, k)?;
    out.push_str("N,exact_mean,err_baseline,err_elementary,err_lambertw\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            num(r.exact_mean),
            num(r.err_baseline),
            num(r.err_elementary),
            num(r.err_lambertw)
        )
        .unwrap();
    }
    Ok(())
}

pub fn sample(cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let model = cfg.survival_model()?;
    let n = cfg.single_n()?;
    let k = cfg.single_k()?;
    check_k(k, n)?;
    if cfg.replicates < 1 {
        return Err(CliError::usage("replicates must be at least 1"));
    }
    let mc = SampleConfig {
        n,
        k,
        replicates: cfg.replicates,
        seed: cfg.seed,
        workers: cfg.workers,
        sampler: cfg.sampler,
    };
    let samples = sample_replicates(&model, &mc)?;
    out.push_str("replicate,k,t\n");
    for (i, times) in samples.iter().enumerate() {
        for (j, t) in times.iter().enumerate() {
            writeln!(out, "{i},{},{}", j + 1, num(*t)).unwrap();
        }
    }
    for est in summarize(&samples, k).per_k {
        eprintln!("k={}: mean {} (standard error {})", est.k, num(est.mean), num(est.std_error));
    }
    Ok(())
}

pub fn regime(cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let stp = cfg.short_time()?;
    let ns = cfg.ns()?;
    if let Some(&n) = ns.iter().find(|&&n| n < 3) {
        return Err(CliError::usage(format!("N: the regime diagnostic needs N >= 3, got {n}")));
    }
    for &n in ns {
        let d = regime_diagnostic_params(&stp, n)?;
        writeln!(
            out,
            "N={n} dimensionless_mean={} log_ratio={} in_regime={}",
            num(d.dimensionless_mean),
            num(d.log_ratio),
            d.in_regime
        )
        .unwrap();
    }
    Ok(())
}
