//! Adaptive quadrature: Gauss–Kronrod on finite intervals and the
//! exp-sinh double-exponential rule on half-lines.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult { value: 0.0, error: 0.0, evals: 0, converged: true }
    }

    /// Adds another piece of a split integral.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            evals: self.evals + other.evals,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, s: f64) -> QuadResult {
        QuadResult { value: self.value * s, error: self.error * s.abs(), ..self }
    }

    /// Converts to a value, failing when the error estimate misses the
    /// requested tolerance by more than `slack`.
    pub fn value_within(self, abs_tol: f64, rel_tol: f64, slack: f64) -> Result<f64> {
        let requested = abs_tol.max(rel_tol * self.value.abs());
        if !self.value.is_finite() {
            return Err(Error::QuadratureNonConvergence { achieved: f64::INFINITY, requested });
        }
        if self.error > slack * requested {
            return Err(Error::QuadratureNonConvergence { achieved: self.error, requested });
        }
        Ok(self.value)
    }
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
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv = [0.0; 14];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = resk * h;
    resabs *= h.abs();
    resasc *= h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on `[a, b]`.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    if a == b {
        return QuadResult::zero();
    }
    let (v0, e0) = kronrod15(&mut f, a, b);
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v0, error: e0 });
    let mut total = v0;
    let mut total_err = e0;
    let mut subdivisions = 1;
    while total_err > abs_tol.max(rel_tol * total.abs()) && subdivisions < max_subdivisions {
        let seg = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            heap.push(seg);
            break;
        }
        let (v1, e1) = kronrod15(&mut f, seg.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, seg.b);
        evals += 30;
        subdivisions += 1;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let (mut value, mut error) = (0.0, 0.0);
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    QuadResult {
        value,
        error,
        evals,
        converged: error <= abs_tol.max(rel_tol * value.abs()),
    }
}

/// Gauss–Kronrod over consecutive intervals `[p_0, p_1], [p_1, p_2], ...`.
pub fn gauss_kronrod_points<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    let mut acc = QuadResult::zero();
    let pieces = points.len().saturating_sub(1).max(1);
    for w in points.windows(2) {
        let r = gauss_kronrod(&mut f, w[0], w[1], abs_tol / pieces as f64, rel_tol, max_subdivisions);
        acc = acc.combine(r);
    }
    acc
}

/// Exp-sinh rule for `∫_a^∞ f(x) dx`, with `scale` the length over which
/// the integrand decays. Suited to exponential and algebraic decay.
pub fn exp_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let t_lo = -4.5_f64;
    let x_cap = 1e300 / scale.max(1e-300);
    let t_hi = ((x_cap.ln() / half_pi).asinh()).min(6.5);
    let mut evals = 0usize;
    let mut term = |t: f64, evals: &mut usize| -> f64 {
        let e = (half_pi * t.sinh()).exp();
        let x = a + scale * e;
        let w = scale * half_pi * t.cosh() * e;
        *evals += 1;
        let v = f(x) * w;
        if v.is_finite() { v } else { 0.0 }
    };

    let mut h = 0.5_f64;
    let mut sum = 0.0;
    let n0 = ((t_hi - t_lo) / h).floor() as i64;
    for k in 0..=n0 {
        sum += term(t_lo + k as f64 * h, &mut evals);
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for _level in 0..9 {
        h *= 0.5;
        let n = ((t_hi - t_lo) / h).floor() as i64;
        let mut k = 1;
        while k <= n {
            sum += term(t_lo + k as f64 * h, &mut evals);
            k += 2;
        }
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if error <= 0.1 * abs_tol.max(rel_tol * estimate.abs()) && _level >= 2 {
            break;
        }
    }
    QuadResult {
        value: estimate,
        error,
        evals,
        converged: error <= abs_tol.max(rel_tol * estimate.abs()),
    }
}

/// `∫_a^∞ f`, split as Gauss–Kronrod between `a` and the given interior
/// break points and exp-sinh beyond the last one.
pub fn semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    tail_scale: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    let mut points = vec![a];
    let mut sorted: Vec<f64> = breaks.iter().copied().filter(|&b| b > a && b.is_finite()).collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sorted.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
    points.extend(sorted);
    let finite = if points.len() > 1 {
        gauss_kronrod_points(&mut f, &points, 0.5 * abs_tol, rel_tol, max_subdivisions)
    } else {
        QuadResult::zero()
    };
    let last = *points.last().unwrap();
    let tail = exp_sinh(&mut f, last, tail_scale, 0.5 * abs_tol, rel_tol);
    finite.combine(tail)
}
