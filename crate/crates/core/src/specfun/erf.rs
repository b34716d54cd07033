//! Error function family.
//!
//! The rational approximations are the FreeBSD/SunPro `s_erf.c` fits. On
//! `[1.25, 28)` that code writes `erfc(x) = exp(-x^2 - 0.5625 + R/S) / x`,
//! which gives the scaled function `erfcx(x) = exp(R/S - 0.5625) / x` with
//! no `exp(x^2)` factor at all. Past 28 the asymptotic series takes over.

use crate::error::{domain, Result};

const ERX: f64 = 8.450_629_115_104_675_292_97e-1;

// erf on [0, 0.84375]
const EFX: f64 = 1.283_791_670_955_125_863_16e-1;
const PP: [f64; 5] = [
    1.283_791_670_955_125_585_61e-1,
    -3.250_421_072_470_014_993_70e-1,
    -2.848_174_957_559_851_047_66e-2,
    -5.770_270_296_489_441_591_57e-3,
    -2.376_301_665_665_016_260_84e-5,
];
const QQ: [f64; 5] = [
    3.979_172_239_591_553_528_19e-1,
    6.502_224_998_876_729_444_85e-2,
    5.081_306_281_875_765_627_76e-3,
    1.324_947_380_043_216_445_26e-4,
    -3.960_228_278_775_368_123_20e-6,
];

// erf on [0.84375, 1.25]
const PA: [f64; 7] = [
    -2.362_118_560_752_659_440_77e-3,
    4.148_561_186_837_483_316_66e-1,
    -3.722_078_760_357_013_238_47e-1,
    3.183_466_199_011_617_536_74e-1,
    -1.108_946_942_823_966_774_76e-1,
    3.547_830_432_561_823_593_71e-2,
    -2.166_375_594_868_790_843_00e-3,
];
const QA: [f64; 6] = [
    1.064_208_804_008_442_282_86e-1,
    5.403_979_177_021_710_489_37e-1,
    7.182_865_441_419_626_628_68e-2,
    1.261_712_198_087_616_421_12e-1,
    1.363_708_391_202_905_073_62e-2,
    1.198_449_984_679_910_741_70e-2,
];

// erfc on [1.25, 1/0.35]
const RA: [f64; 8] = [
    -9.864_944_034_847_148_227_05e-3,
    -6.938_585_727_071_817_643_72e-1,
    -1.055_862_622_532_329_098_14e1,
    -6.237_533_245_032_600_603_96e1,
    -1.623_966_694_625_734_703_55e2,
    -1.846_050_929_067_110_359_94e2,
    -8.128_743_550_630_659_342_46e1,
    -9.814_329_344_169_145_485_92,
];
const SA: [f64; 8] = [
    1.965_127_166_743_925_712_92e1,
    1.376_577_541_435_190_426_00e2,
    4.345_658_774_752_292_288_21e2,
    6.453_872_717_332_678_803_36e2,
    4.290_081_400_275_678_333_86e2,
    1.086_350_055_417_794_351_34e2,
    6.570_249_770_319_281_701_35,
    -6.042_441_521_485_809_874_38e-2,
];

// erfc on [1/0.35, 28]
const RB: [f64; 7] = [
    -9.864_942_924_700_099_285_97e-3,
    -7.992_832_376_805_230_065_74e-1,
    -1.775_795_491_775_475_198_89e1,
    -1.606_363_848_558_219_160_62e2,
    -6.375_664_433_683_896_277_22e2,
    -1.025_095_131_611_077_249_54e3,
    -4.835_191_916_086_513_970_19e2,
];
const SB: [f64; 7] = [
    3.033_806_074_348_245_829_24e1,
    3.257_925_129_965_739_188_26e2,
    1.536_729_586_084_436_959_94e3,
    3.199_858_219_508_595_539_08e3,
    2.553_050_406_433_164_425_83e3,
    4.745_285_412_069_553_672_15e2,
    -2.244_095_244_658_581_833_62e1,
];

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_9;

/// `p[0] + p[1] z + ...`
#[inline]
fn poly(p: &[f64], z: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// `1 + q[0] z + q[1] z^2 + ...`
#[inline]
fn poly1(q: &[f64], z: f64) -> f64 {
    q.iter().rev().fold(0.0, |acc, &c| acc * z + c) * z + 1.0
}

/// `erf(x) - x` scaled as `x * R(x^2)` for `|x| < 0.84375`.
#[inline]
fn small_ratio(x: f64) -> f64 {
    let z = x * x;
    poly(&PP, z) / poly1(&QQ, z)
}

#[inline]
fn near_one(ax: f64) -> f64 {
    let s = ax - 1.0;
    poly(&PA, s) / poly1(&QA, s)
}

/// `ln(x erfc(x)) + x^2 + 0.5625` for `x >= 1.25`, valid up to 28.
#[inline]
fn tail_log(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    if ax < 1.0 / 0.35 {
        poly(&RA, s) / poly1(&SA, s)
    } else {
        poly(&RB, s) / poly1(&SB, s)
    }
}

/// `erfc(x)` for `x >= 1.25`.
#[inline]
fn erfc_tail(ax: f64) -> f64 {
    if ax >= 28.0 {
        return 0.0;
    }
    // Split x^2 so the large part of the exponent is exact.
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + tail_log(ax)).exp() / ax
}

/// `erfcx(x)` for `x >= 28` from the asymptotic series.
fn erfcx_asymptotic(x: f64) -> f64 {
    let h = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..12 {
        term *= -((2 * n - 1) as f64) * h;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    FRAC_1_SQRT_PI * sum / x
}

pub(crate) fn erf_raw(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < 0.84375 {
        if ax < 3.725_290_298_461_914e-9 {
            ax + EFX * ax
        } else {
            ax + ax * small_ratio(ax)
        }
    } else if ax < 1.25 {
        ERX + near_one(ax)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_tail(ax)
    };
    v.copysign(x)
}

pub(crate) fn erfc_raw(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let ax = x.abs();
    if ax < 0.84375 {
        if ax < 1.387_778_780_781_445_7e-17 {
            return 1.0 - x;
        }
        let y = small_ratio(ax);
        let e = if ax < 0.25 {
            ax + ax * y
        } else {
            0.5 + (ax * y + (ax - 0.5))
        };
        return if x < 0.0 { 1.0 + e } else { 1.0 - e };
    }
    if ax < 1.25 {
        let p = near_one(ax);
        return if x < 0.0 {
            1.0 + ERX + p
        } else {
            1.0 - ERX - p
        };
    }
    let r = erfc_tail(ax);
    if x < 0.0 {
        2.0 - r
    } else {
        r
    }
}

pub(crate) fn erfcx_raw(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows to +inf below about -26.6
        return 2.0 * (x * x).exp() - erfcx_raw(-x);
    }
    if x < 1.25 {
        return (x * x).exp() * erfc_raw(x);
    }
    if x < 28.0 {
        return (tail_log(x) - 0.5625).exp() / x;
    }
    if x.is_infinite() {
        return 0.0;
    }
    erfcx_asymptotic(x)
}

/// Error function.
pub fn erf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("erf requires a finite argument, got {x}"));
    }
    Ok(erf_raw(x))
}

/// Complementary error function `1 - erf(x)`, computed without cancellation
/// for positive `x`. Underflows to zero past `x ~ 26.55`.
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("erfc requires a finite argument, got {x}"));
    }
    Ok(erfc_raw(x))
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
///
/// Finite for every positive `x`; behaves like `1/(x sqrt(pi))` as `x` grows.
pub fn erfcx(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("erfcx requires a finite argument, got {x}"));
    }
    Ok(erfcx_raw(x))
}
