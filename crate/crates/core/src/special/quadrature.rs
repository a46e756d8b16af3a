//! Globally adaptive Gauss–Kronrod (10/21) quadrature on finite, semi-infinite
//! and doubly infinite domains.
//!
//! Infinite pieces are mapped onto `[0, 1)` with `x = a + t/(1-t)` (the inverse
//! of `t = (x-a)/(1+x-a)`), so integrands with `1/x²` tails stay bounded in the
//! transformed coordinate.

use crate::error::{domain, Error, Result};

// Node and weight tables keep the published digits.

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
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
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_618,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Domain and tolerances for one integral.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    /// Interior points where the integrand changes character (peaks, kinks).
    /// Points outside `(lower, upper)` are ignored.
    pub breakpoints: Vec<f64>,
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            breakpoints: Vec::new(),
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-12,
            max_subdivisions: 2000,
        }
    }

    pub fn whole_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn relative_tolerance(mut self, tol: f64) -> Self {
        self.relative_tolerance = tol;
        self
    }

    pub fn absolute_tolerance(mut self, tol: f64) -> Self {
        self.absolute_tolerance = tol;
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) {
            return Err(domain("relative tolerance must be positive", self.relative_tolerance));
        }
        if !(self.absolute_tolerance > 0.0) {
            return Err(domain("absolute tolerance must be positive", self.absolute_tolerance));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        if self.lower.is_nan() || self.upper.is_nan() || !(self.lower < self.upper) {
            return Err(domain("quadrature domain must satisfy lower < upper", self.upper));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound and cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Identity,
    /// x = origin + t/(1-t)
    Right(f64),
    /// x = origin - t/(1-t)
    Left(f64),
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Identity => (t, 1.0),
            Map::Right(a) => {
                let s = 1.0 - t;
                (a + t / s, 1.0 / (s * s))
            }
            Map::Left(b) => {
                let s = 1.0 - t;
                (b - t / s, 1.0 / (s * s))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    map: Map,
    value: f64,
    error: f64,
    splittable: bool,
}

/// Integrate `f` over the domain of `spec` to the requested tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_error(f, spec).map(|e| e.value)
}

/// Like [`integrate`] but returns the error estimate and evaluation count too.
pub fn integrate_with_error<F: FnMut(f64) -> f64>(mut f: F, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let mut points: Vec<f64> =
        spec.breakpoints.iter().copied().filter(|p| p.is_finite() && *p > spec.lower && *p < spec.upper).collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    if spec.lower.is_infinite() && spec.upper.is_infinite() && points.is_empty() {
        points.push(0.0);
    }

    let mut nodes = Vec::with_capacity(points.len() + 2);
    nodes.push(spec.lower);
    nodes.extend(points);
    nodes.push(spec.upper);

    let mut evaluations = 0usize;
    let mut segments = Vec::new();
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (a, b, map) = if lo.is_infinite() {
            (0.0, 1.0, Map::Left(hi))
        } else if hi.is_infinite() {
            (0.0, 1.0, Map::Right(lo))
        } else {
            (lo, hi, Map::Identity)
        };
        segments.push(kronrod(&mut f, a, b, map, &mut evaluations)?);
    }

    let mut subdivisions = 0usize;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = spec.absolute_tolerance.max(spec.relative_tolerance * total.abs());
        let pending: f64 = segments.iter().filter(|s| s.splittable).map(|s| s.error).sum();
        // segments too narrow to split only carry roundoff
        if error <= target || pending <= target {
            return Ok(Estimate { value: total, error, evaluations });
        }
        if subdivisions >= spec.max_subdivisions || pending == 0.0 {
            return Err(Error::NonConvergence { subdivisions, estimate: total, error });
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .fold((usize::MAX, -1.0), |best, (i, s)| if s.error > best.1 { (i, s.error) } else { best });
        let seg = segments.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) || (seg.b - seg.a) <= 8.0 * f64::EPSILON * seg.a.abs().max(seg.b.abs()) {
            segments.push(Segment { splittable: false, ..seg });
            continue;
        }
        segments.push(kronrod(&mut f, seg.a, mid, seg.map, &mut evaluations)?);
        segments.push(kronrod(&mut f, mid, seg.b, seg.map, &mut evaluations)?);
        subdivisions += 1;
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, map: Map, evaluations: &mut usize) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |t: f64| -> Result<f64> {
        let (x, jac) = map.apply(t);
        let fx = f(x);
        let v = fx * jac;
        *evaluations += 1;
        if !v.is_finite() {
            if fx == 0.0 {
                return Ok(0.0);
            }
            return Err(Error::NonFiniteIntegrand { x, value: fx });
        }
        Ok(v)
    };

    let fc = eval(center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, map, value, error, splittable: true })
}

/// A point of the open unit interval carried together with its complement and
/// logit, so integrands can avoid forming `1 - τ` near `τ = 1`.
#[derive(Clone, Copy, Debug)]
pub struct UnitPoint {
    pub value: f64,
    pub complement: f64,
    pub logit: f64,
    pub ln_value: f64,
    pub ln_complement: f64,
}

impl UnitPoint {
    pub fn from_logit(s: f64) -> Self {
        let ln_value = -super::softplus(-s);
        let ln_complement = -super::softplus(s);
        Self { value: ln_value.exp(), complement: ln_complement.exp(), logit: s, ln_value, ln_complement }
    }
}

/// `∫₀¹ f(τ) dτ` through the logit substitution `τ = 1/(1+e^{-s})`, which
/// absorbs integrable asymptotes at both endpoints.
///
/// `ln_f` returns `ln f(τ)`; the Jacobian `τ(1-τ)` is added in log space.
/// The domain of `spec` is read in logit coordinates (normally the whole line).
pub fn integrate_logit<F: FnMut(UnitPoint) -> f64>(mut ln_f: F, spec: &QuadratureSpec) -> Result<f64> {
    integrate(
        |s| {
            let pt = UnitPoint::from_logit(s);
            (ln_f(pt) + pt.ln_value + pt.ln_complement).exp()
        },
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn standard_normal_integrates_to_one() {
        let v = integrate(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(), &QuadratureSpec::whole_line()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn polynomials_up_to_degree_thirty_are_exact() {
        // the 21-point Kronrod rule is exact through degree 31
        for degree in 0..=30 {
            let v = integrate(|x| x.powi(degree), &QuadratureSpec::new(0.0, 1.0)).unwrap();
            let exact = 1.0 / (degree as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {degree}");
        }
    }

    #[test]
    fn single_rule_is_exact_for_degree_31() {
        let mut n = 0;
        let seg = kronrod(&mut |x: f64| x.powi(31) + 3.0 * x.powi(7), -1.0, 2.0, Map::Identity, &mut n).unwrap();
        let exact = (2f64.powi(32) - 1.0) / 32.0 + 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert!((seg.value - exact).abs() / exact < 1e-13);
        assert_eq!(n, 21);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x| 1.0 / x.sqrt(), &QuadratureSpec::new(0.0, 1.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_cauchy_tail() {
        let v = integrate(|x| 1.0 / (1.0 + x * x), &QuadratureSpec::new(0.0, f64::INFINITY)).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-10);
        let v = integrate(|x| 1.0 / (1.0 + x * x), &QuadratureSpec::new(f64::NEG_INFINITY, 1.0)).unwrap();
        assert!((v - 3.0 * PI / 4.0).abs() < 1e-10);
    }

    #[test]
    fn breakpoints_locate_narrow_peaks() {
        let f = |x: f64| (-(x - 300.0) * (x - 300.0) * 50.0).exp();
        let exact = (PI / 50.0).sqrt();
        let v = integrate(f, &QuadratureSpec::whole_line().with_breakpoints([300.0])).unwrap();
        assert!((v - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec::new(0.0, 1.0).max_subdivisions(1);
        let r = integrate(|x| (1.0 / x).sin() / x.sqrt(), &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn nan_integrand_is_reported() {
        let r = integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, &QuadratureSpec::new(0.0, 1.0));
        assert!(matches!(r, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(integrate(|x| x, &QuadratureSpec::new(1.0, 0.0)).is_err());
        assert!(integrate(|x| x, &QuadratureSpec::new(0.0, 1.0).relative_tolerance(0.0)).is_err());
        assert!(integrate(|x| x, &QuadratureSpec::new(0.0, 1.0).max_subdivisions(0)).is_err());
    }

    #[test]
    fn logit_route_handles_arcsine_asymptotes() {
        // Beta(1/2, 1/2) density
        let v =
            integrate_logit(|pt| -0.5 * pt.ln_value - 0.5 * pt.ln_complement - PI.ln(), &QuadratureSpec::whole_line())
                .unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }
}
