//! Variogram and Hurst estimators, LASS rescaling and the discrete
//! Riemann–Liouville integral.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::SamplePath;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::gamma_fn;

/// Empirical structure function at lags `k·dt`, `k = 1..=max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variogram<T: Real> {
    pub lags: Vec<T>,
    pub estimates: Vec<T>,
    pub counts: Vec<usize>,
    /// Batch-means standard error of each estimate.
    pub stderr: Vec<T>,
}

const BATCHES: usize = 32;

/// `σ̂²(k·dt) = mean_i (x_{i+k} − x_i)²` for `k = 1..=max_lag`.
pub fn empirical_variogram<T: Real>(path: &SamplePath<T>, max_lag: usize) -> Result<Variogram<T>> {
    let n = path.len();
    if max_lag == 0 || 4 * max_lag >= n {
        return Err(Error::InsufficientData(format!("max_lag = {} needs more than {} samples, have {}", max_lag, 4 * max_lag, n)));
    }
    let x: Vec<f64> = path.values.iter().map(|v| v.as_f64()).collect();
    let dt = path.dt.as_f64();
    let mut v = Variogram { lags: Vec::new(), estimates: Vec::new(), counts: Vec::new(), stderr: Vec::new() };
    for k in 1..=max_lag {
        let count = n - k;
        let sq = |i: usize| {
            let d = x[i + k] - x[i];
            d * d
        };
        let mean = (0..count).map(sq).sum::<f64>() / count as f64;
        // Batch means over contiguous blocks absorb the serial correlation.
        let nb = BATCHES.min(count);
        let size = count / nb;
        let batch_means: Vec<f64> = (0..nb).map(|b| (b * size..(b + 1) * size).map(sq).sum::<f64>() / size as f64).collect();
        let bm = batch_means.iter().sum::<f64>() / nb as f64;
        let var_b = batch_means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (nb.max(2) - 1) as f64;
        v.lags.push(T::lit(k as f64 * dt));
        v.estimates.push(T::lit(mean));
        v.counts.push(count);
        v.stderr.push(T::lit((var_b / nb as f64).sqrt()));
    }
    Ok(v)
}

/// Hurst estimate with the regression standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstFit {
    pub h: f64,
    pub stderr: f64,
}

/// Least-squares slope of `log σ̂²` against `log lag` over the inclusive
/// index range `[fit_lo, fit_hi]`, halved.
pub fn estimate_hurst<T: Real>(v: &Variogram<T>, fit_lo: usize, fit_hi: usize) -> Result<HurstFit> {
    if fit_hi >= v.lags.len() {
        return Err(Error::OutOfRange(format!("fit_hi = {} but variogram has {} lags", fit_hi, v.lags.len())));
    }
    if fit_hi < fit_lo || fit_hi - fit_lo + 1 < 4 {
        return Err(Error::DegenerateRange(format!("need at least 4 lags, got [{}, {}]", fit_lo, fit_hi)));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in fit_lo..=fit_hi {
        let (l, e) = (v.lags[i].as_f64(), v.estimates[i].as_f64());
        if !(e > 0.0) || !(l > 0.0) {
            return Err(Error::DegenerateRange(format!("nonpositive variogram value at index {}", i)));
        }
        xs.push(l.ln());
        ys.push(e.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se_slope = (rss / (n - 2.0) / sxx).sqrt();
    Ok(HurstFit { h: 0.5 * slope, stderr: 0.5 * se_slope })
}

/// `Z(k) = ε^{−H}[X(kε) − X(0)]` with `ε = stride·dt`; the result is
/// indexed by `k` (step 1).
pub fn rescaled_increment_path<T: Real>(path: &SamplePath<T>, stride: usize, h: f64) -> Result<SamplePath<T>> {
    if stride == 0 || stride >= path.len() {
        return Err(Error::OutOfRange(format!("stride {} outside [1, {})", stride, path.len())));
    }
    let eps = stride as f64 * path.dt.as_f64();
    let s = eps.powf(-h);
    let x0 = path.values[0].as_f64();
    let values: Vec<T> = path.values.iter().step_by(stride).map(|v| T::lit(s * (v.as_f64() - x0))).collect();
    let mut out = SamplePath::new(T::one(), values, path.seed, path.method)?;
    out.warnings = path.warnings.clone();
    Ok(out)
}

/// Product-integration Riemann–Liouville integral
/// `Y_k = (dt^χ/Γ(χ)) Σ_{j<k} w_{k−j} X_j`, `w_m = (m^χ − (m−1)^χ)/χ`, `Y_0 = 0`.
pub fn rl_fractional_integral<T: Real>(path: &SamplePath<T>, chi: f64) -> Result<SamplePath<T>> {
    if !(chi > 0.5 && chi < 1.5) {
        return Err(Error::Domain(format!("chi must lie in (1/2, 3/2), got {}", chi)));
    }
    let n = path.len();
    let x: Vec<f64> = path.values.iter().map(|v| v.as_f64()).collect();
    let w: Vec<f64> = (0..n).map(|m| if m == 0 { 0.0 } else { ((m as f64).powf(chi) - (m as f64 - 1.0).powf(chi)) / chi }).collect();
    let conv = if n <= 64 { direct_convolution(&x, &w) } else { fft_convolution(&x, &w) };
    let pref = path.dt.as_f64().powf(chi) / gamma_fn(chi)?;
    let values: Vec<T> = conv.into_iter().map(|c| T::lit(pref * c)).collect();
    let mut out = SamplePath::new(path.dt, values, path.seed, path.method)?;
    out.warnings = path.warnings.clone();
    Ok(out)
}

/// `y_k = Σ_{j<k} w_{k−j} x_j` (with `w_0 = 0`).
fn direct_convolution(x: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|k| (0..k).map(|j| w[k - j] * x[j]).sum()).collect()
}

fn fft_convolution(x: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let pad = |v: &[f64]| {
        let mut b: Vec<Complex<f64>> = v.iter().map(|&r| Complex::new(r, 0.0)).collect();
        b.resize(m, Complex::new(0.0, 0.0));
        b
    };
    let mut a = pad(x);
    let mut b = pad(w);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (u, v) in a.iter_mut().zip(&b) {
        *u *= v;
    }
    inv.process(&mut a);
    a.into_iter().take(n).map(|z| z.re / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::SynthesisMethod;

    fn path(values: Vec<f64>, dt: f64) -> SamplePath<f64> {
        SamplePath::new(dt, values, 0, SynthesisMethod::Imported).unwrap()
    }

    #[test]
    fn constant_path_has_zero_variogram() {
        let v = empirical_variogram(&path(vec![3.0; 100], 0.1), 10).unwrap();
        assert!(v.estimates.iter().all(|&e| e == 0.0));
        assert!(empirical_variogram(&path(vec![3.0; 100], 0.1), 25).is_err());
    }

    #[test]
    fn exact_power_law_gives_exact_hurst() {
        let lags: Vec<f64> = (1..=10).map(|k| k as f64 * 0.01).collect();
        let v = Variogram {
            estimates: lags.iter().map(|l| l.powf(1.2)).collect(),
            counts: vec![1; 10],
            stderr: vec![0.0; 10],
            lags,
        };
        let fit = estimate_hurst(&v, 0, 9).unwrap();
        assert!((fit.h - 0.6).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!(matches!(estimate_hurst(&v, 2, 4), Err(Error::DegenerateRange(_))));
        assert!(matches!(estimate_hurst(&v, 2, 10), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn rl_integral_chi_one_is_cumulative_sum() {
        let x: Vec<f64> = (0..200).map(|k| (k as f64 * 0.37).sin()).collect();
        let y = rl_fractional_integral(&path(x.clone(), 0.5), 1.0).unwrap();
        let mut acc = 0.0;
        for k in 0..200 {
            assert!((y.values[k] - 0.5 * acc).abs() < 1e-11);
            acc += x[k];
        }
    }

    #[test]
    fn rl_integral_of_constant_is_exact() {
        for &chi in &[0.6, 0.9, 1.3] {
            for &n in &[50, 300] {
                let y = rl_fractional_integral(&path(vec![1.0; n], 0.01), chi).unwrap();
                for (k, v) in y.values.iter().enumerate() {
                    let t: f64 = k as f64 * 0.01;
                    let e = t.powf(chi) / gamma_fn(chi + 1.0).unwrap();
                    assert!((v - e).abs() < 1e-12, "chi = {} k = {}", chi, k);
                }
            }
        }
    }

    #[test]
    fn rescaled_path_examples() {
        let p = path((0..100).map(|k| 2.0 + k as f64).collect(), 0.1);
        let z = rescaled_increment_path(&p, 5, 0.0).unwrap();
        assert_eq!(z.values[0], 0.0);
        assert_eq!(z.values[3], 15.0);
        assert_eq!(z.len(), 20);
        assert!(rescaled_increment_path(&p, 100, 0.5).is_err());
    }
}
