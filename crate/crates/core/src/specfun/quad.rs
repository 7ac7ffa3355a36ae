//! Globally adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Half-infinite ranges are mapped onto `[0, 1)` with
//! `t = lo + scale * u / (1 - u)`. Error estimates follow the QUADPACK
//! heuristics, including the round-off floor, so that requests near machine
//! precision terminate instead of bisecting forever.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gamma::ln_gamma;
use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_292_239,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut resabs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, points: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let seg = gauss_kronrod(f, w[0], w[1]);
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    let mut subdivisions = heap.len();
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite integrand on [{}, {}]",
                points[0],
                points[points.len() - 1]
            )));
        }
        if error <= spec.tolerance(value) {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NoConvergence {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NoConvergence {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let left = gauss_kronrod(f, worst.a, mid);
        let right = gauss_kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Re-sum occasionally so incremental updates do not drift.
        if subdivisions % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Integrates `f` over `[lo, hi]`; `hi` may be `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_breaks(f, lo, hi, &[], 1.0, spec).map(|e| e.value)
}

/// Integrates `f` over `[lo, hi]` with the initial partition refined at
/// `breaks`. For `hi = ∞` the map `t = lo + scale·u/(1−u)` is used, so
/// `scale` should be close to where the integrand mass sits.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !lo.is_finite() {
        return Err(Error::Domain("lower integration limit must be finite".into()));
    }
    if hi.is_nan() || hi < lo {
        return Err(Error::Domain(format!("invalid integration range [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let interior = |x: &f64| *x > lo && *x < hi;
    if hi.is_finite() {
        let mut points = vec![lo];
        points.extend(breaks.iter().copied().filter(interior));
        points.push(hi);
        points.sort_by(f64::total_cmp);
        points.dedup();
        adaptive(&f, &points, spec)
    } else {
        if !(scale > 0.0) {
            return Err(Error::Domain("mapping scale must be positive".into()));
        }
        let mapped = |u: f64| {
            let one_minus = 1.0 - u;
            let t = lo + scale * u / one_minus;
            let fx = f(t);
            if fx == 0.0 {
                0.0
            } else {
                fx * scale / (one_minus * one_minus)
            }
        };
        let mut points = vec![0.0];
        points.extend(
            breaks
                .iter()
                .copied()
                .filter(interior)
                .map(|t| (t - lo) / (scale + t - lo)),
        );
        points.push(1.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        adaptive(&mapped, &points, spec)
    }
}

/// `E[f(T)]` for `T ~ Gamma(shape, 1)`, i.e.
/// `∫₀^∞ f(t) t^{shape−1} e^{−t} / Γ(shape) dt`.
///
/// The density is evaluated in log space, so large shapes are fine.
pub fn gamma_expectation<F: Fn(f64) -> f64>(f: F, shape: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::Domain(format!("gamma shape must be positive, got {shape}")));
    }
    let log_norm = ln_gamma(shape)?;
    let density = move |t: f64| {
        if t <= 0.0 {
            return if shape == 1.0 { 1.0 } else { 0.0 };
        }
        ((shape - 1.0) * t.ln() - t - log_norm).exp()
    };
    let mode = (shape - 1.0).max(0.0);
    let sd = shape.sqrt();
    let breaks: Vec<f64> = [-10.0, -4.0, -1.0, 0.0, 1.0, 4.0, 10.0, 30.0]
        .iter()
        .map(|k| mode + k * sd)
        .filter(|t| *t > 0.0)
        .collect();
    let integrand = |t: f64| {
        let w = density(t);
        if w == 0.0 {
            0.0
        } else {
            f(t) * w
        }
    };
    integrate_with_breaks(integrand, 0.0, f64::INFINITY, &breaks, mode.max(1.0), spec)
        .map(|e| e.value)
}
