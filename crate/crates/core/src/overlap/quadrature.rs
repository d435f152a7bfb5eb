//! Gauss-Kronrod and Gauss-Legendre rules used by the expectation integrals.
//!
//! The Kronrod tables are the QUADPACK ones. The adaptive driver integrates a
//! two-component integrand so both ⟨f⟩ and ⟨g⟩ share nodes.

use crate::error::{Error, Result};

pub(crate) struct KronrodRule {
    xgk: &'static [f64],
    wg: &'static [f64],
    wgk: &'static [f64],
}

#[allow(clippy::excessive_precision)]
pub(crate) const K21: KronrodRule = KronrodRule {
    xgk: &[
        0.995_657_163_025_808_080_735_527_280_689_003,
        0.973_906_528_517_171_720_077_964_012_084_452,
        0.930_157_491_355_708_226_001_207_180_059_508,
        0.865_063_366_688_984_510_732_096_688_423_493,
        0.780_817_726_586_416_897_063_717_578_345_042,
        0.679_409_568_299_024_406_234_327_365_114_874,
        0.562_757_134_668_604_683_339_000_099_272_694,
        0.433_395_394_129_247_190_799_265_943_165_784,
        0.294_392_862_701_460_198_131_126_603_103_866,
        0.148_874_338_981_631_210_884_826_001_129_720,
        0.000_000_000_000_000_000_000_000_000_000_000,
    ],
    wg: &[
        0.066_671_344_308_688_137_593_568_809_893_332,
        0.149_451_349_150_580_593_145_776_339_657_697,
        0.219_086_362_515_982_043_995_534_934_228_163,
        0.269_266_719_309_996_355_091_226_921_569_469,
        0.295_524_224_714_752_870_173_892_994_651_338,
    ],
    wgk: &[
        0.011_694_638_867_371_874_278_064_396_062_192,
        0.032_558_162_307_964_727_478_818_972_459_390,
        0.054_755_896_574_351_996_031_381_300_244_580,
        0.075_039_674_810_919_952_767_043_140_916_190,
        0.093_125_454_583_697_605_535_065_465_083_366,
        0.109_387_158_802_297_641_899_210_590_325_805,
        0.123_491_976_262_065_851_077_958_109_831_074,
        0.134_709_217_311_473_325_928_054_001_771_707,
        0.142_775_938_577_060_080_797_094_273_138_717,
        0.147_739_104_901_338_491_374_841_515_972_068,
        0.149_445_554_002_916_905_664_936_468_389_821,
    ],
};

#[allow(clippy::excessive_precision)]
pub(crate) const K31: KronrodRule = KronrodRule {
    xgk: &[
        0.998_002_298_693_397_060_285_172_840_152_271,
        0.987_992_518_020_485_428_489_565_718_586_613,
        0.967_739_075_679_139_134_257_347_978_784_337,
        0.937_273_392_400_705_904_307_758_947_710_209,
        0.897_264_532_344_081_900_882_509_656_454_496,
        0.848_206_583_410_427_216_200_648_320_774_217,
        0.790_418_501_442_465_932_967_649_294_817_947,
        0.724_417_731_360_170_047_416_186_054_613_938,
        0.650_996_741_297_416_970_533_735_895_313_275,
        0.570_972_172_608_538_847_537_226_737_253_911,
        0.485_081_863_640_239_680_693_655_740_232_351,
        0.394_151_347_077_563_369_897_207_370_981_045,
        0.299_180_007_153_168_812_166_780_024_266_389,
        0.201_194_093_997_434_522_300_628_303_394_596,
        0.101_142_066_918_717_499_027_074_231_447_392,
        0.000_000_000_000_000_000_000_000_000_000_000,
    ],
    wg: &[
        0.030_753_241_996_117_268_354_628_393_577_204,
        0.070_366_047_488_108_124_709_267_416_450_667,
        0.107_159_220_467_171_935_011_869_546_685_869,
        0.139_570_677_926_154_314_447_804_794_511_028,
        0.166_269_205_816_993_933_553_200_860_481_209,
        0.186_161_000_015_562_211_026_800_561_866_423,
        0.198_431_485_327_111_576_456_118_326_443_839,
        0.202_578_241_925_561_272_880_620_199_967_519,
    ],
    wgk: &[
        0.005_377_479_872_923_348_987_792_051_430_128,
        0.015_007_947_329_316_122_538_374_763_075_807,
        0.025_460_847_326_715_320_186_874_001_019_653,
        0.035_346_360_791_375_846_222_037_948_478_360,
        0.044_589_751_324_764_876_608_227_299_373_280,
        0.053_481_524_690_928_087_265_343_147_239_430,
        0.062_009_567_800_670_640_285_139_230_960_803,
        0.069_854_121_318_728_258_709_520_077_099_147,
        0.076_849_680_757_720_378_894_432_777_482_659,
        0.083_080_502_823_133_021_038_289_247_286_104,
        0.088_564_443_056_211_770_647_275_443_693_774,
        0.093_126_598_170_825_321_225_486_872_747_346,
        0.096_642_726_983_623_678_505_179_907_627_589,
        0.099_173_598_721_791_959_332_393_173_484_603,
        0.100_769_845_523_875_595_044_946_662_617_570,
        0.101_330_007_014_791_549_017_374_792_767_493,
    ],
};

impl KronrodRule {
    /// One Kronrod panel for a two-component integrand.
    pub(crate) fn apply<F>(&self, f: &mut F, a: f64, b: f64) -> Panel
    where
        F: FnMut(f64) -> [f64; 2],
    {
        let n = self.xgk.len();
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let fc = f(center);

        let mut gauss = [0.0; 2];
        let mut kron = [0.0; 2];
        let mut abs = [0.0; 2];
        let mut fv1 = vec![[0.0; 2]; n - 1];
        let mut fv2 = vec![[0.0; 2]; n - 1];
        for c in 0..2 {
            kron[c] = fc[c] * self.wgk[n - 1];
            abs[c] = kron[c].abs();
            if n.is_multiple_of(2) {
                gauss[c] = fc[c] * self.wg[n / 2 - 1];
            }
        }
        for j in 0..n - 1 {
            let dx = half * self.xgk[j];
            let lo = f(center - dx);
            let hi = f(center + dx);
            fv1[j] = lo;
            fv2[j] = hi;
            for c in 0..2 {
                let s = lo[c] + hi[c];
                kron[c] += self.wgk[j] * s;
                abs[c] += self.wgk[j] * (lo[c].abs() + hi[c].abs());
                if j % 2 == 1 {
                    gauss[c] += self.wg[j / 2] * s;
                }
            }
        }

        let mut out = Panel {
            a,
            b,
            value: [0.0; 2],
            error: [0.0; 2],
            abs: [0.0; 2],
        };
        for c in 0..2 {
            let mean = 0.5 * kron[c];
            let mut asc = self.wgk[n - 1] * (fc[c] - mean).abs();
            for j in 0..n - 1 {
                asc += self.wgk[j] * ((fv1[j][c] - mean).abs() + (fv2[j][c] - mean).abs());
            }
            let resabs = abs[c] * half.abs();
            let resasc = asc * half.abs();
            let mut err = ((kron[c] - gauss[c]) * half).abs();
            if resasc != 0.0 && err != 0.0 {
                err = resasc * (1.0f64).min((200.0 * err / resasc).powf(1.5));
            }
            if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
                err = err.max(50.0 * f64::EPSILON * resabs);
            }
            out.value[c] = kron[c] * half;
            out.error[c] = err;
            out.abs[c] = resabs;
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: [f64; 2],
    pub error: [f64; 2],
    pub abs: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Integral {
    pub value: [f64; 2],
    pub error: [f64; 2],
}

pub(crate) struct AdaptiveLimits {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Budget in kernel calls, as reported by the caller's meter.
    pub max_calls: u64,
}

/// Globally adaptive integration over the given breakpoints. The panel with
/// the largest error relative to its component's target is bisected until
/// both components meet `rel_tol` of the integral of their modulus.
///
/// `meter` reports the kernel calls spent so far; the budget is checked
/// against it before every bisection.
pub(crate) fn integrate<F, M>(
    rule: &KronrodRule,
    mut f: F,
    breaks: &[f64],
    limits: &AdaptiveLimits,
    meter: M,
) -> Result<Integral>
where
    F: FnMut(f64) -> [f64; 2],
    M: Fn() -> u64,
{
    let start = meter();
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    let mut last_cost = 0;
    for w in breaks.windows(2) {
        let before = meter();
        panels.push(rule.apply(&mut f, w[0], w[1]));
        last_cost = meter() - before;
    }

    loop {
        let mut value = [0.0; 2];
        let mut error = [0.0; 2];
        let mut abs = [0.0; 2];
        for p in &panels {
            for c in 0..2 {
                value[c] += p.value[c];
                error[c] += p.error[c];
                abs[c] += p.abs[c];
            }
        }
        let target = [
            limits.rel_tol * value[0].abs().max(abs[0]),
            limits.rel_tol * value[1].abs().max(abs[1]),
        ];
        let calls = meter() - start;
        if error[0] <= target[0] && error[1] <= target[1] {
            return Ok(Integral { value, error });
        }

        let worst = if error[0] / target[0].max(f64::MIN_POSITIVE)
            >= error[1] / target[1].max(f64::MIN_POSITIVE)
        {
            0
        } else {
            1
        };
        let fail = || Error::NonConvergence {
            evaluations: calls,
            error: error[worst],
            target: target[worst],
        };

        if panels.len() >= limits.max_subdivisions || calls + 2 * last_cost > limits.max_calls {
            return Err(fail());
        }

        let score = |p: &Panel| {
            p.error[0] / target[0].max(f64::MIN_POSITIVE)
                + p.error[1] / target[1].max(f64::MIN_POSITIVE)
        };
        let (idx, _) = panels.iter().enumerate().map(|(i, p)| (i, score(p))).fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || (p.b - p.a) <= 4.0 * f64::EPSILON * mid.abs() {
            return Err(fail());
        }
        let before = meter();
        panels.push(rule.apply(&mut f, p.a, mid));
        panels.push(rule.apply(&mut f, mid, p.b));
        last_cost = (meter() - before) / 2;
    }
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub(crate) fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
