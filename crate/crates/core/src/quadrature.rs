//! Globally adaptive Gauss-Kronrod (10/21) quadrature over a list of
//! breakpoints, with an optional semi-infinite tail.
//!
//! The integrands met in this crate are products of sharply peaked
//! functions whose peaks can sit many widths apart, so callers pass the
//! feature locations as breakpoints and the driver refines whichever panel
//! currently carries the largest error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_932_300,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Result of a 21-point rule on a single panel.
#[derive(Debug, Clone, Copy)]
pub struct PanelRule<T> {
    pub value: T,
    pub error: f64,
    /// Integral of |f| over the panel.
    pub abs_value: f64,
}

/// Applies the Gauss-Kronrod 21-point rule on `[a, b]`.
pub fn gauss_kronrod<T, F>(f: &F, a: f64, b: f64) -> PanelRule<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = T::default();
    let mut res_abs = f_center.magnitude() * WGK[10];
    let mut values = [(T::default(), T::default()); 10];

    for (j, node) in XGK.iter().take(10).enumerate() {
        let dx = half * node;
        let lo = f(center - dx);
        let hi = f(center + dx);
        values[j] = (lo, hi);
        kronrod = kronrod + (lo + hi) * WGK[j];
        res_abs += (lo.magnitude() + hi.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (lo + hi) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = (f_center - mean).magnitude() * WGK[10];
    for (j, (lo, hi)) in values.iter().enumerate() {
        res_asc += ((*lo - mean).magnitude() + (*hi - mean).magnitude()) * WGK[j];
    }

    let value = kronrod * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    PanelRule {
        value,
        error,
        abs_value: res_abs,
    }
}

/// Error targets for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative target on |I|.
    pub rel: f64,
    /// Absolute target.
    pub abs: f64,
    /// If refinement stops short of the target, the result is still
    /// accepted when its error is below `accept_rel * |I|`.
    pub accept_rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn new(rel: f64) -> Self {
        Self {
            rel,
            abs: 0.0,
            accept_rel: rel,
            max_panels: 20_000,
        }
    }

    pub const fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub const fn accepting(mut self, accept_rel: f64) -> Self {
        self.accept_rel = accept_rel;
        self
    }

    pub const fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
enum Domain {
    Finite,
    /// x = origin + scale * (1 - u) / u for u in (0, 1].
    Tail {
        origin: f64,
        scale: f64,
    },
}

impl Domain {
    fn eval<T: QuadValue, F: Fn(f64) -> T>(self, f: &F, u: f64) -> T {
        match self {
            Domain::Finite => f(u),
            Domain::Tail { origin, scale } => {
                let x = origin + scale * (1.0 - u) / u;
                f(x) * (scale / (u * u))
            }
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    domain: Domain,
    rule: PanelRule<T>,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rule.error.total_cmp(&other.rule.error) == Ordering::Equal
    }
}

impl<T> Eq for Panel<T> {}

impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule.error.total_cmp(&other.rule.error)
    }
}

fn make_panel<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, domain: Domain) -> Panel<T> {
    let rule = gauss_kronrod(&|u| domain.eval(f, u), a, b);
    Panel { a, b, domain, rule }
}

/// Integrates `f` over consecutive panels delimited by `points`
/// (sorted, at least two unless `tail` is set), and over
/// `[last point, +inf)` when `tail` is true.
pub fn integrate<T, F>(f: F, points: &[f64], tail: bool, tol: Tolerance) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(make_panel(&f, w[0], w[1], Domain::Finite));
        }
    }
    if tail {
        let origin = *points.last().expect("tail integration needs an origin");
        let span = origin - points[0];
        let scale = match origin.abs().max(span) {
            s if s > 0.0 => s,
            _ => 1.0,
        };
        heap.push(make_panel(&f, 0.0, 1.0, Domain::Tail { origin, scale }));
    }

    let mut panels = heap.len();
    let exact_sums = |heap: &BinaryHeap<Panel<T>>| {
        heap.iter().fold((T::default(), 0.0), |(v, e), p| {
            (v + p.rule.value, e + p.rule.error)
        })
    };
    let (mut total, mut error) = exact_sums(&heap);
    loop {
        let target = tol.abs.max(tol.rel * total.magnitude());
        if error <= target {
            // running sums drift; confirm against a fresh summation
            (total, error) = exact_sums(&heap);
            if error <= tol.abs.max(tol.rel * total.magnitude()) {
                return Ok(Estimate {
                    value: total,
                    abs_error: error,
                    panels,
                });
            }
        }

        let (a, b) = match heap.peek() {
            Some(p) => (p.a, p.b),
            None => {
                return Ok(Estimate {
                    value: T::default(),
                    abs_error: 0.0,
                    panels: 0,
                })
            }
        };
        let mid = 0.5 * (a + b);
        if panels >= tol.max_panels || !(mid > a && mid < b) {
            (total, error) = exact_sums(&heap);
            let accept = tol.abs.max(tol.accept_rel * total.magnitude());
            if error <= accept {
                return Ok(Estimate {
                    value: total,
                    abs_error: error,
                    panels,
                });
            }
            return Err(Error::NonConvergence {
                estimate: total.magnitude(),
                error,
                panels,
            });
        }

        let worst = heap.pop().expect("peeked above");
        let left = make_panel(&f, worst.a, mid, worst.domain);
        let right = make_panel(&f, mid, worst.b, worst.domain);
        total = total - worst.rule.value + left.rule.value + right.rule.value;
        error = (error - worst.rule.error + left.rule.error + right.rule.error).max(0.0);
        heap.push(left);
        heap.push(right);
        panels += 1;
    }
}

/// Sorts, removes non-finite values and near-duplicates, and clips to
/// `[lo, hi]` (both kept as endpoints).
pub fn clean_breakpoints(mut points: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    points.retain(|p| p.is_finite() && *p > lo && *p < hi);
    points.push(lo);
    points.push(hi);
    points.sort_by(f64::total_cmp);
    let span = (hi - lo).abs().max(hi.abs()).max(lo.abs());
    let min_gap = span * 4.0 * f64::EPSILON;
    let mut out: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        match out.last() {
            Some(&last) if p - last <= min_gap && p != hi => {}
            Some(&last) if p - last <= min_gap => {
                out.pop();
                out.push(p);
            }
            _ => out.push(p),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk21_is_exact_for_polynomials() {
        let r: PanelRule<f64> =
            gauss_kronrod(&|x: f64| x.powi(12) - 3.0 * x.powi(5) + 1.0, -1.0, 2.0);
        let exact = (2f64.powi(13) + 1.0) / 13.0 - 0.5 * (64.0 - 1.0) + 3.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-14);
    }

    #[test]
    fn peaked_integrand_with_breakpoints() {
        let w = 1.0e-6;
        let f = |x: f64| w / (std::f64::consts::PI * (w * w + (x - 0.3) * (x - 0.3)));
        let pts = clean_breakpoints(vec![0.3 - w, 0.3, 0.3 + w, 0.3 + 100.0 * w], 0.0, 1.0);
        let est: Estimate<f64> = integrate(f, &pts, false, Tolerance::new(1e-12)).unwrap();
        let exact = ((1.0 - 0.3) / w).atan() / std::f64::consts::PI
            + (0.3 / w).atan() / std::f64::consts::PI;
        assert_relative_eq!(est.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn semi_infinite_tail() {
        let est: Estimate<f64> = integrate(
            |x: f64| 1.0 / (1.0 + x * x),
            &[0.0, 1.0],
            true,
            Tolerance::new(1e-13),
        )
        .unwrap();
        assert_relative_eq!(est.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn complex_oscillatory() {
        let t = 40.0;
        let f = |x: f64| Complex64::new(0.0, -x * t).exp() * (-x).exp();
        let est: Estimate<Complex64> =
            integrate(f, &[0.0, 1.0, 10.0], true, Tolerance::new(1e-12)).unwrap();
        let exact = Complex64::new(1.0, t).inv();
        assert!((est.value - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn budget_exhaustion_reports_error() {
        let f = |x: f64| (1.0 / x).sin() / x;
        let err = integrate(
            f,
            &[1e-9, 1.0],
            false,
            Tolerance::new(1e-14).with_max_panels(50),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn zero_integrand_terminates() {
        let est: Estimate<f64> =
            integrate(|_| 0.0, &[0.0, 1.0], true, Tolerance::new(1e-10)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn breakpoints_are_sorted_and_clipped() {
        let p = clean_breakpoints(vec![5.0, -3.0, 2.0, 2.0, f64::NAN, 11.0], 0.0, 10.0);
        assert_eq!(p, vec![0.0, 2.0, 5.0, 10.0]);
    }
}
