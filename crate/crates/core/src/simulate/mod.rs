//! Sample-path synthesis: circulant embedding, spectral (Riemann sum over
//! the density) and the truncated Fourier series of the periodic thermal
//! process. Paths are generic over the stored scalar; all synthesis runs
//! in `f64`.

mod estimate;
mod io;

pub use estimate::{empirical_variogram, estimate_hurst, rescaled_increment_path, rl_fractional_integral, HurstFit, Variogram};
pub use io::{read_csv, write_csv};

use std::f64::consts::PI;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::covariance::{covariance, spectral_kernel, variance, ProcessParams, QuadratureSpec};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SynthesisMethod {
    /// Davies–Harte circulant embedding; exact in distribution.
    Circulant,
    /// Midpoint Riemann sum of the spectral representation up to `π/dt`.
    Spectral,
    /// Truncated Fourier series of the periodic thermal process.
    FourierSeries,
    /// Read from a file; origin unknown.
    Imported,
}

/// Uniformly sampled realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath<T: Real> {
    pub dt: T,
    pub values: Vec<T>,
    pub seed: u64,
    pub method: SynthesisMethod,
    /// Non-fatal events during synthesis, e.g. a fallback from circulant
    /// embedding to the spectral method.
    pub warnings: Vec<String>,
    /// `C(0)` minus the variance of the discretized spectral sum.
    pub spectral_bias: Option<f64>,
}

impl<T: Real> SamplePath<T> {
    pub fn new(dt: T, values: Vec<T>, seed: u64, method: SynthesisMethod) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("a path needs at least one value".into()));
        }
        if !(dt > T::zero()) {
            return Err(Error::Domain(format!("dt must be positive, got {}", dt)));
        }
        Ok(SamplePath { dt, values, seed, method, warnings: Vec::new(), spectral_bias: None })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.values.len()).map(move |k| self.dt * T::lit(k as f64))
    }

    /// Converts the stored scalar type.
    pub fn cast<U: Real>(&self) -> SamplePath<U> {
        SamplePath {
            dt: U::lit(self.dt.as_f64()),
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
            seed: self.seed,
            method: self.method,
            warnings: self.warnings.clone(),
            spectral_bias: self.spectral_bias,
        }
    }

    fn from_f64(dt: f64, values: Vec<f64>, seed: u64, method: SynthesisMethod) -> Self {
        SamplePath {
            dt: T::lit(dt),
            values: values.into_iter().map(T::lit).collect(),
            seed,
            method,
            warnings: Vec::new(),
            spectral_bias: None,
        }
    }
}

/// Standard normal variates: ChaCha20 stream, Box–Muller on consecutive
/// pairs of 53-bit uniforms.
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream { rng: ChaCha20Rng::seed_from_u64(seed), spare: None }
    }

    /// Uniform on (0, 1].
    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let th = 2.0 * PI * self.uniform();
        self.spare = Some(r * th.sin());
        r * th.cos()
    }

    pub fn fill(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}

/// Maximum number of padding doublings before giving up on the embedding.
const MAX_PADDING_DOUBLINGS: usize = 3;

/// Relative tolerance on negative circulant eigenvalues (times `C(0)`).
pub const TOL_EMBED: f64 = 1e-10;

fn fft_forward(n: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(n)
}

/// Eigenvalues of the circulant built from `c[0..=m/2]`, mirrored to length `m`.
fn circulant_eigenvalues(c: &[f64], m: usize) -> Vec<f64> {
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|k| {
            let j = if k <= m / 2 { k } else { m - k };
            Complex::new(c[j], 0.0)
        })
        .collect();
    fft_forward(m).process(&mut row);
    row.into_iter().map(|z| z.re).collect()
}

/// Davies–Harte synthesis from a covariance sequence. `cov(k)` gives the
/// covariance at lag `k`. Returns `Err(EmbeddingFailure)` when no padding
/// up to the limit gives a nonnegative spectrum.
fn circulant_synthesis<F>(cov: F, n: usize, c0: f64, gauss: &mut GaussianStream) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    if n == 1 {
        return Ok(vec![c0.sqrt() * gauss.next()]);
    }
    let mut m = (2 * (n - 1)).next_power_of_two();
    let mut min_eig = f64::NEG_INFINITY;
    for _ in 0..=MAX_PADDING_DOUBLINGS {
        let c: Vec<f64> = (0..=m / 2).into_par_iter().map(&cov).collect::<Result<Vec<_>>>()?;
        let mut eig = circulant_eigenvalues(&c, m);
        min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -TOL_EMBED * c0 {
            m *= 2;
            continue;
        }
        for e in eig.iter_mut() {
            *e = e.max(0.0);
        }
        let mut w: Vec<Complex<f64>> = eig
            .iter()
            .map(|&e| {
                let s = (e / m as f64).sqrt();
                Complex::new(s * gauss.next(), s * gauss.next())
            })
            .collect();
        fft_forward(m).process(&mut w);
        return Ok(w.into_iter().take(n).map(|z| z.re).collect());
    }
    Err(Error::EmbeddingFailure { min_eig })
}

/// Spectral synthesis on `4n` positive-frequency midpoint bins up to
/// `Ω = π/dt`, summed with one FFT of length `8n`. Returns the path and
/// the variance of the discretized spectrum.
fn spectral_synthesis(p: &ProcessParams, n: usize, dt: f64, gauss: &mut GaussianStream) -> (Vec<f64>, f64) {
    let bins = 4 * n;
    let len = 8 * n;
    let dw = PI / (bins as f64 * dt);
    let mut var = 0.0;
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for (k, slot) in buf.iter_mut().enumerate().take(bins) {
        let w = (k as f64 + 0.5) * dw;
        // two-sided density mass 2·S(ω)Δω = g(ω)Δω/π
        let mass = spectral_kernel(p, w) * dw / PI;
        var += mass;
        let s = mass.sqrt();
        let (a, b) = (gauss.next(), gauss.next());
        *slot = Complex::new(s * a, -s * b);
    }
    // Σ_k c_k e^{iω_k t_j} with ω_k t_j = 2π(k + 1/2) j / len.
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let values = (0..n)
        .map(|j| {
            let ph = PI * j as f64 / len as f64;
            (buf[j] * Complex::new(ph.cos(), ph.sin())).re
        })
        .collect();
    (values, var)
}

/// Stationary Gaussian path of `X_{α,γ}` at `t_k = k·dt`, `k < n`.
///
/// `Circulant` falls back to `Spectral` (with a warning in the result) when
/// the embedding has eigenvalues below `−TOL_EMBED·C(0)` after padding.
pub fn sample_path<T: Real>(p: &ProcessParams, n: usize, dt: f64, seed: u64, method: SynthesisMethod) -> Result<SamplePath<T>> {
    p.require_regular()?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {}", dt)));
    }
    let q = QuadratureSpec::default();
    let c0 = variance(p)?;
    let mut gauss = GaussianStream::new(seed);
    match method {
        SynthesisMethod::Circulant => {
            match circulant_synthesis(|k| covariance(p, k as f64 * dt, &q), n, c0, &mut gauss) {
                Ok(v) => Ok(SamplePath::from_f64(dt, v, seed, SynthesisMethod::Circulant)),
                Err(Error::EmbeddingFailure { min_eig }) => {
                    let mut path = sample_path::<T>(p, n, dt, seed, SynthesisMethod::Spectral)?;
                    path.warnings.push(format!(
                        "circulant embedding failed (min eigenvalue {:e}); fell back to spectral synthesis",
                        min_eig
                    ));
                    Ok(path)
                }
                Err(e) => Err(e),
            }
        }
        SynthesisMethod::Spectral => {
            let (v, var) = spectral_synthesis(p, n, dt, &mut gauss);
            let mut path = SamplePath::from_f64(dt, v, seed, SynthesisMethod::Spectral);
            path.spectral_bias = Some(c0 - var);
            Ok(path)
        }
        SynthesisMethod::FourierSeries | SynthesisMethod::Imported => {
            Err(Error::Domain(format!("{:?} is not a stationary synthesis method; use sample_thermal", method)))
        }
    }
}

/// `Var B_H(1) = 1/(sin(πH) Γ(2H+1))` in the tangent-process normalization.
pub fn fbm_unit_variance(h: f64) -> Result<f64> {
    Ok(1.0 / ((PI * h).sin() * gamma_fn(2.0 * h + 1.0)?))
}

/// Fractional Brownian motion at `t_k = k·dt` with `B(0) = 0`, from exact
/// circulant synthesis of its increments (fractional Gaussian noise).
pub fn sample_fbm<T: Real>(h: f64, n: usize, dt: f64, seed: u64) -> Result<SamplePath<T>> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("H must lie in (0, 1), got {}", h)));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {}", dt)));
    }
    let scale = fbm_unit_variance(h)? * dt.powf(2.0 * h);
    let mut values = vec![0.0; n];
    if n > 1 {
        let fgn = |k: usize| -> Result<f64> {
            let k = k as f64;
            let e = 2.0 * h;
            Ok(0.5 * scale * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e)))
        };
        let mut gauss = GaussianStream::new(seed);
        let inc = circulant_synthesis(fgn, n - 1, scale, &mut gauss)?;
        let mut acc = 0.0;
        for (k, d) in inc.into_iter().enumerate() {
            acc += d;
            values[k + 1] = acc;
        }
    }
    Ok(SamplePath::from_f64(dt, values, seed, SynthesisMethod::Circulant))
}

/// Periodic thermal process
/// `X^T(t) = a₀ + Σ_{k=1}^{N} [a_k cos(ω_k t) + b_k sin(ω_k t)]`, `ω_k = 2πk/β`,
/// sampled at `t_j = jβ/(n−1)`, `j < n` (both ends of one period).
/// `Var a₀ = g(0)/β`, `Var a_k = Var b_k = 2g(ω_k)/β` with
/// `g(ω) = (|ω|^{2α} + λ²)^{−γ}`, so the covariance is the truncated
/// thermal two-point function.
pub fn sample_thermal<T: Real>(p: &ProcessParams, beta: f64, n_modes: usize, n: usize, seed: u64) -> Result<SamplePath<T>> {
    p.require_regular()?;
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {}", beta)));
    }
    if n < 2 || n_modes == 0 {
        return Err(Error::Domain("need n >= 2 points and at least one mode".into()));
    }
    let mut gauss = GaussianStream::new(seed);
    let a0 = (spectral_kernel(p, 0.0) / beta).sqrt() * gauss.next();
    let mut coeffs = Vec::with_capacity(n_modes);
    for k in 1..=n_modes {
        let s = (2.0 * spectral_kernel(p, 2.0 * PI * k as f64 / beta) / beta).sqrt();
        coeffs.push((s * gauss.next(), s * gauss.next()));
    }
    let period = n - 1;
    // cos/sin tables indexed by (k·j) mod period make the path exactly periodic.
    let table: Vec<(f64, f64)> = (0..period)
        .map(|m| {
            let th = 2.0 * PI * m as f64 / period as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut x = a0;
            for (k, &(a, b)) in coeffs.iter().enumerate() {
                let idx = ((k + 1) * (j % period)) % period;
                let (c, s) = table[idx];
                x += a * c + b * s;
            }
            x
        })
        .collect();
    Ok(SamplePath::from_f64(beta / period as f64, values, seed, SynthesisMethod::FourierSeries))
}
