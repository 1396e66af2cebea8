//! Spectral density, covariance, structure function and the finite-time /
//! thermal two-point functions of the fractional oscillator process.
//!
//! Convention: unit white noise, spectral density
//! `S(ω) = (1/2π)(|ω|^{2α} + λ²)^{−γ}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadResult};
use crate::specfun::{bessel_k, cos_pi, ln_gamma, rgamma, sin_pi};

/// Default tolerance on `αγ − 3/2` for the borderline class.
pub const TOL_CLASS: f64 = 1e-12;

/// Parameters `(α, γ, λ)` of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    alpha: f64,
    gamma: f64,
    lambda: f64,
}

impl ProcessParams {
    pub fn new(alpha: f64, gamma: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {}", alpha)));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be positive, got {}", gamma)));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive, got {}", lambda)));
        }
        Ok(ProcessParams { alpha, gamma, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    /// The product αγ.
    pub fn ag(&self) -> f64 {
        self.alpha * self.gamma
    }

    pub fn regularity(&self) -> RegularityClass {
        RegularityClass::classify(self.ag(), TOL_CLASS)
    }

    /// Fails with `GeneralizedOnly` when αγ ≤ 1/2.
    pub fn require_regular(&self) -> Result<()> {
        if self.ag() <= 0.5 {
            Err(Error::GeneralizedOnly { ag: self.ag() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn is_alpha_one(&self) -> bool {
        self.alpha == 1.0
    }

    /// Natural time unit `λ^{−1/α}`.
    pub fn time_scale(&self) -> f64 {
        self.lambda.powf(-1.0 / self.alpha)
    }
}

/// Sample-path regularity class, decided by αγ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityClass {
    GeneralizedOnly,
    Rough,
    Borderline,
    Smooth,
}

impl RegularityClass {
    pub fn classify(ag: f64, tol_class: f64) -> Self {
        if ag <= 0.5 {
            RegularityClass::GeneralizedOnly
        } else if (ag - 1.5).abs() <= tol_class {
            RegularityClass::Borderline
        } else if ag < 1.5 {
            RegularityClass::Rough
        } else {
            RegularityClass::Smooth
        }
    }
}

/// Tolerances and switch points for the integral representations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Covariance switches from the structure-function route to the
    /// Laplace route once `λ^{1/α}|t|` reaches this value.
    pub t_switch: f64,
    /// Cap on the binomial terms of the analytic structure-function tail.
    pub tail_power_terms: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
            t_switch: 0.1,
            tail_power_terms: 80,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol <= 1e-4) {
            return Err(Error::Domain(format!("abs_tol must lie in (0, 1e-4], got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(Error::Domain(format!("rel_tol must lie in (0, 1e-4], got {}", self.rel_tol)));
        }
        if !(self.t_switch > 0.0) {
            return Err(Error::Domain(format!("t_switch must be positive, got {}", self.t_switch)));
        }
        if self.max_subdivisions == 0 || self.tail_power_terms == 0 {
            return Err(Error::Domain("max_subdivisions and tail_power_terms must be positive".into()));
        }
        Ok(())
    }

    /// Accepts results whose error estimate is within this factor of the
    /// requested tolerance.
    const SLACK: f64 = 100.0;

    pub(crate) fn accept(&self, r: QuadResult) -> Result<f64> {
        r.value_within(self.abs_tol, self.rel_tol, Self::SLACK)
    }
}

/// `(|ω|^{2α} + λ²)^{−γ}`, i.e. 2π·S(ω).
#[inline]
pub(crate) fn spectral_kernel(p: &ProcessParams, omega: f64) -> f64 {
    (omega.abs().powf(2.0 * p.alpha) + p.lambda * p.lambda).powf(-p.gamma)
}

/// Spectral density `(1/2π)(|ω|^{2α} + λ²)^{−γ}`.
pub fn spectral_density(p: &ProcessParams, omega: f64) -> f64 {
    spectral_kernel(p, omega) / (2.0 * PI)
}

/// Spectral density of the combined type-I/II comparison process,
/// `(1/2π)(|ω|^{2α} + 2λ|ω|^α cos(πα/2) + λ²)^{−γ}`.
pub fn spectral_density_type12(p: &ProcessParams, omega: f64) -> f64 {
    let w = omega.abs();
    let base = w.powf(2.0 * p.alpha) + 2.0 * p.lambda * w.powf(p.alpha) * cos_pi(0.5 * p.alpha) + p.lambda * p.lambda;
    base.powf(-p.gamma) / (2.0 * PI)
}

/// Variance `C(0) = (1/2πα) Γ(1/2α) Γ(γ − 1/2α)/Γ(γ) · λ^{1/α − 2γ}`.
pub fn variance(p: &ProcessParams) -> Result<f64> {
    p.require_regular()?;
    let h = 0.5 / p.alpha;
    let log = ln_gamma(h)? + ln_gamma(p.gamma - h)? - ln_gamma(p.gamma)?;
    Ok(log.exp() / (2.0 * PI * p.alpha) * p.lambda.powf(1.0 / p.alpha - 2.0 * p.gamma))
}

/// Closed-form covariance for α = 1 via `K_{γ−1/2}`.
pub fn covariance_closed_alpha1(gamma: f64, lambda: f64, t: f64) -> Result<f64> {
    if !(gamma > 0.5) {
        return Err(Error::Domain(format!("closed form needs gamma > 1/2, got {}", gamma)));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {}", lambda)));
    }
    let t = t.abs();
    if t == 0.0 {
        return variance(&ProcessParams::new(1.0, gamma, lambda)?);
    }
    let nu = gamma - 0.5;
    let k = bessel_k(nu, lambda * t)?;
    let log_pref = (0.5 - gamma) * std::f64::consts::LN_2 - 0.5 * PI.ln() - ln_gamma(gamma)? + nu * (t / lambda).ln();
    Ok(log_pref.exp() * k)
}

/// Which integral representation [`covariance_quadrature`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovarianceRoute {
    /// Structure-function route for small `|t|`, Laplace route otherwise.
    Auto,
    /// Laplace representation along the negative real frequency axis.
    Laplace,
    /// `C(0) − σ²(t)/2` with σ² from the sin² representation.
    Structure,
}

/// Covariance `C(t)`; closed form when α = 1, otherwise quadrature.
pub fn covariance(p: &ProcessParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    p.require_regular()?;
    if p.is_alpha_one() {
        return covariance_closed_alpha1(p.gamma, p.lambda, t);
    }
    covariance_quadrature(p, t, q, CovarianceRoute::Auto)
}

/// Covariance by an explicitly chosen integral representation (also for α = 1).
pub fn covariance_quadrature(p: &ProcessParams, t: f64, q: &QuadratureSpec, route: CovarianceRoute) -> Result<f64> {
    p.require_regular()?;
    let t = t.abs();
    if t == 0.0 {
        return variance(p);
    }
    let route = match route {
        CovarianceRoute::Auto => {
            if t / p.time_scale() >= q.t_switch {
                CovarianceRoute::Laplace
            } else {
                CovarianceRoute::Structure
            }
        }
        r => r,
    };
    match route {
        CovarianceRoute::Laplace if p.is_alpha_one() => covariance_branch_cut(p, t, q),
        CovarianceRoute::Laplace => covariance_laplace(p, t, q),
        _ => Ok(variance(p)? - 0.5 * structure_function(p, t, q)?),
    }
}

/// `(1/π) Im ∫₀^∞ e^{−ut} (λ² + e^{−iπα} u^{2α})^{−γ} du` for 0 < α < 1.
fn covariance_laplace(p: &ProcessParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    let (ca, sa) = (cos_pi(p.alpha), sin_pi(p.alpha));
    let l2 = p.lambda * p.lambda;
    let g = p.gamma;
    let two_a = 2.0 * p.alpha;
    let f = |u: f64| -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let w = u.powf(two_a);
        let base = Complex64::new(l2 + w * ca, -w * sa);
        let val = (-g * base.ln()).exp();
        (-u * t).exp() * val.im
    };
    let u_star = 1.0 / p.time_scale();
    let u_t = 1.0 / t;
    let mut breaks = vec![u_star, u_t];
    // Resolve the |u|^{2α} onset near zero.
    let lo = u_star.min(u_t);
    breaks.push(lo * 1e-2);
    breaks.push(lo * 1e-1);
    let r = quad::semi_infinite(f, 0.0, &breaks, u_t, q.abs_tol * PI, q.rel_tol, q.max_subdivisions);
    q.accept(r.scale(1.0 / PI))
}

/// α = 1 Laplace route along the branch cut `u > λ`, written after `n`
/// integrations by parts so the endpoint weight is integrable:
/// `C(t) = (−1)^n/(Γ(γ)Γ(n+1−γ)) ∫₀^∞ s^{n−γ} g^{(n)}(λ+s) ds`,
/// `g(u) = e^{−ut}(u+λ)^{−γ}`.
fn covariance_branch_cut(p: &ProcessParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    let g = p.gamma;
    let lam = p.lambda;
    let n = g.floor() as usize + 1;
    let kappa = 1.0 / (n as f64 + 1.0 - g);
    // Leibniz: g^{(n)}(u) = Σ_k C(n,k) (−t)^{n−k} e^{−ut} (−1)^k (γ)_k (u+λ)^{−γ−k}
    let mut binom = vec![1.0; n + 1];
    for k in 1..=n {
        binom[k] = binom[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    let deriv = move |u: f64| -> f64 {
        let e = (-u * t).exp();
        let base = u + lam;
        let mut poch = 1.0;
        let mut acc = 0.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += binom[k] * (-t).powi((n - k) as i32) * sign * poch * base.powf(-g - k as f64);
            poch *= g + k as f64;
        }
        e * acc
    };
    // s = w^κ absorbs the weight s^{n−γ} ds = κ dw.
    let f = |w: f64| -> f64 { kappa * deriv(lam + w.powf(kappa)) };
    let w_scale = (1.0 / t).powf(1.0 / kappa).max(1e-300);
    let w_lam = lam.powf(1.0 / kappa);
    let breaks = [w_scale, w_lam, 0.1 * w_scale.min(w_lam)];
    let r = quad::semi_infinite(f, 0.0, &breaks, w_scale.max(w_lam), q.abs_tol, q.rel_tol, q.max_subdivisions);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let pref = sign * rgamma(g) * rgamma(n as f64 + 1.0 - g);
    q.accept(r.scale(pref))
}

fn binom_neg(gamma: f64, k: usize) -> f64 {
    // C(−γ, k)
    let mut c = 1.0;
    for j in 0..k {
        c *= (-gamma - j as f64) / (j as f64 + 1.0);
    }
    c
}

/// Structure function `σ²(t) = (2/π)∫₀^∞ (1 − cos ωt)(λ² + ω^{2α})^{−γ} dω`.
///
/// Evaluated in the scaled form
/// `(4|t|^{2αγ−1}/π) ∫₀^∞ sin²(v/2)(v^{2α} + c)^{−γ} dv`, `c = λ²|t|^{2α}`,
/// with quadrature up to a whole number of periods `V` and an analytic tail.
pub fn structure_function(p: &ProcessParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    p.require_regular()?;
    let t = t.abs();
    if t == 0.0 {
        return Ok(0.0);
    }
    let a2 = 2.0 * p.alpha;
    let g = p.gamma;
    let c = p.lambda * p.lambda * t.powf(a2);
    let two_pi = 2.0 * PI;
    let v_min = (32.0 * PI).max((4.0 * c).powf(1.0 / a2));
    let periods = (v_min / two_pi).ceil() as usize;
    let v_cut = periods as f64 * two_pi;

    let f = |v: f64| -> f64 {
        let s = (0.5 * v).sin();
        s * s * (v.powf(a2) + c).powf(-g)
    };
    let mut points = vec![0.0];
    let v0 = c.powf(1.0 / a2);
    if v0 < two_pi {
        let mut b = v0 * 1e-2;
        while b < two_pi {
            points.push(b);
            b *= 4.0;
        }
    }
    for k in 1..=periods {
        points.push(k as f64 * two_pi);
    }
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    let r = quad::gauss_kronrod_points(f, &points, q.abs_tol * 1e-2, q.rel_tol, q.max_subdivisions);
    let body = r.value;

    // ½ Σ_k C(−γ,k) c^k [V^{1−q}/(q−1) − J(q)],  J(q) = ∫_V^∞ cos v · v^{−q} dv.
    let mut tail = 0.0;
    let ratio = c * v_cut.powf(-a2);
    let mut ck = 1.0; // c^k V^{-2αk} folded into the powers below
    for k in 0..q.tail_power_terms {
        let qk = 2.0 * p.alpha * g + a2 * k as f64;
        let coeff = binom_neg(g, k);
        let vq = v_cut.powf(-qk);
        let smooth = v_cut * vq / (qk - 1.0);
        let osc = cos_tail(qk, v_cut);
        let term = 0.5 * coeff * c.powi(k as i32) * (smooth - osc);
        tail += term;
        ck *= ratio;
        if term.abs() <= 1e-18 * (body.abs() + tail.abs()) && k > 2 {
            break;
        }
    }
    let _ = ck;
    let total = body + tail;
    let pref = 4.0 * t.powf(2.0 * p.ag() - 1.0) / PI;
    let r = QuadResult { value: total, ..r };
    q.accept(r.scale(pref))
}

/// `∫_V^∞ cos(v) v^{−q} dv` for `V` a multiple of 2π, by repeated
/// integration by parts: `Σ_j (−1)^j (q)_{2j+1} V^{−q−2j−1}`.
fn cos_tail(qk: f64, v: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = qk * v.powf(-qk - 1.0);
    for j in 0..200 {
        let jf = j as f64;
        sum += term;
        let next = -term * (qk + 2.0 * jf + 1.0) * (qk + 2.0 * jf + 2.0) / (v * v);
        if next.abs() >= term.abs() || next.abs() < 1e-20 * sum.abs() {
            break;
        }
        term = next;
    }
    sum
}

/// Thermal two-point function: the Matsubara sum
/// `(1/β) Σ_{|n|≤N} e^{iω_n dt} (|ω_n|^{2α} + λ²)^{−γ}` plus an integral
/// estimate of the modes `|n| > N`. Fails with `TruncationBudget` when the
/// error estimate of that replacement exceeds `q.abs_tol`.
pub fn thermal_covariance(p: &ProcessParams, beta: f64, dt: f64, n_modes: usize, q: &QuadratureSpec) -> Result<f64> {
    p.require_regular()?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be positive, got {}", beta)));
    }
    if n_modes == 0 {
        return Err(Error::Domain("n_modes must be positive".into()));
    }
    let d = (dt - beta * (dt / beta).round()).abs();
    let a = 2.0 * PI / beta;
    let mut sum = 0.0;
    for n in (1..=n_modes).rev() {
        let w = a * n as f64;
        sum += (w * d).cos() * spectral_kernel(p, w);
    }
    let modes = (spectral_kernel(p, 0.0) + 2.0 * sum) / beta;

    let omega = a * (n_modes as f64 + 0.5);
    let tail = oscillatory_tail(p, omega, d, q)?;
    // Poisson summation: the midpoint tail differs from its integral by the
    // image terms; first-order parts sum to g(Ω)|π/(β sin(πd/β)) − 1/d|, the
    // rest is bounded by 2π²|g'(Ω)|/β².
    let g_om = spectral_kernel(p, omega);
    let dg = 2.0 * p.ag() * omega.powf(2.0 * p.alpha - 1.0) * (omega.powf(2.0 * p.alpha) + p.lambda * p.lambda).powf(-p.gamma - 1.0);
    let image_sum = if d == 0.0 { 0.0 } else { (PI / (beta * sin_pi(d / beta)) - 1.0 / d).abs() };
    let bound = (g_om * image_sum + 2.0 * PI * PI * dg / (beta * beta)) / PI;
    if bound > q.abs_tol {
        return Err(Error::TruncationBudget { estimate: bound, budget: q.abs_tol });
    }
    Ok(modes + tail)
}

/// `(1/π) ∫_Ω^∞ cos(ω d) (ω^{2α} + λ²)^{−γ} dω`, rotating the contour to
/// `ω = Ω + iy` when `d > 0` so the integrand decays like `e^{−yd}`.
fn oscillatory_tail(p: &ProcessParams, omega: f64, d: f64, q: &QuadratureSpec) -> Result<f64> {
    let a2 = 2.0 * p.alpha;
    let l2 = p.lambda * p.lambda;
    let g = p.gamma;
    let tol = q.abs_tol * 1e-2;
    if d == 0.0 {
        let f = |w: f64| (w.powf(a2) + l2).powf(-g);
        let r = quad::exp_sinh(f, omega, omega.max(1.0), tol, q.rel_tol);
        return q.accept(QuadResult { error: r.error.min(tol), ..r }.scale(1.0 / PI)).or(Ok(r.value / PI));
    }
    let f = |y: f64| -> f64 {
        let z = Complex64::new(omega, y);
        let base = z.powf(a2) + l2;
        let val = (-g * base.ln()).exp();
        // Re[i e^{iΩd} val] e^{−yd}
        let phase = Complex64::new(0.0, omega * d).exp();
        (Complex64::i() * phase * val).re * (-y * d).exp()
    };
    let r = quad::semi_infinite(f, 0.0, &[1.0 / d], 1.0 / d, tol, q.rel_tol, q.max_subdivisions);
    Ok(r.value / PI)
}

/// Finite relaxation-time covariance
/// `(1/2π)∫ e^{iω dt} [e^{−A|τ₁−τ₂|} − e^{−A(τ₁+τ₂)}]/A dω`,
/// `A(ω) = (|ω|^{2α} + λ²)^γ`.
pub fn relaxation_covariance(p: &ProcessParams, dt: f64, tau1: f64, tau2: f64, q: &QuadratureSpec) -> Result<f64> {
    p.require_regular()?;
    if tau1 < 0.0 || tau2 < 0.0 {
        return Err(Error::Domain("relaxation times must be nonnegative".into()));
    }
    if tau1.min(tau2) == 0.0 {
        return Ok(0.0);
    }
    let s1 = (tau1 - tau2).abs();
    let s2 = tau1 + tau2;
    let i1 = if s1 == 0.0 { covariance(p, dt, q)? } else { relaxation_kernel(p, dt, s1, q)? };
    let i2 = relaxation_kernel(p, dt, s2, q)?;
    Ok(i1 - i2)
}

/// `(1/π) ∫₀^∞ cos(ω dt) e^{−A(ω)s}/A(ω) dω` for `s > 0`.
fn relaxation_kernel(p: &ProcessParams, dt: f64, s: f64, q: &QuadratureSpec) -> Result<f64> {
    let a2 = 2.0 * p.alpha;
    let l2 = p.lambda * p.lambda;
    let g = p.gamma;
    let lam_g = l2.powf(g);
    // Past Ω_s the factor e^{−As} is below e^{−45}.
    let x = 45.0 / s;
    if lam_g * s > 45.0 {
        return Ok(0.0);
    }
    let omega_s = (x.powf(1.0 / g) - l2).max(0.0).powf(1.0 / a2);
    let dt = dt.abs();
    let f = |w: f64| -> f64 {
        let a = (w.powf(a2) + l2).powf(g);
        (w * dt).cos() * (-a * s).exp() / a
    };
    let mut points = vec![0.0];
    let scale = 1.0 / p.time_scale();
    if scale < omega_s {
        points.push(scale);
    }
    if dt > 0.0 {
        let period = 2.0 * PI / dt;
        let n = (omega_s / period).ceil() as usize;
        if n > 200_000 {
            return Err(Error::QuadratureNonConvergence { achieved: f64::INFINITY, requested: q.abs_tol });
        }
        for k in 1..n {
            points.push(k as f64 * period);
        }
    }
    points.push(omega_s);
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    let r = quad::gauss_kronrod_points(f, &points, q.abs_tol * PI, q.rel_tol, q.max_subdivisions);
    q.accept(r.scale(1.0 / PI))
}
