//! Fluctuation–dissipation coefficient, diffusion constants and
//! mean-square displacement of the (fractionally) integrated process.
//!
//! Convention: every function here reads `p.lambda()` as the damping of the
//! Langevin equation `(d/dt + λ^α)^γ`-type dynamics, i.e. the spectral
//! density is `(B/π)(|ω|^{2α} + λ^{2α})^{−γ}` with noise `⟨η(t)η(s)⟩ = 2Bδ(t−s)`.
//! [`covariance_params`] maps to the λ² convention of [`crate::covariance`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{covariance_large_t, AsymptoticExpansion, OrderTag, Regime, Term, Validity};
use crate::covariance::{covariance, ProcessParams, QuadratureSpec};
use crate::error::{Error, Result};
use crate::quad::{self, QuadResult};
use crate::specfun::{gamma_fn, ln_gamma};

/// Noise coefficient `B` and thermal energy `kT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseStrength {
    b: f64,
    kt: f64,
}

impl NoiseStrength {
    pub fn new(b: f64, kt: f64) -> Result<Self> {
        if !(b > 0.0) || !(kt > 0.0) {
            return Err(Error::Domain(format!("B and kT must be positive, got B = {}, kT = {}", b, kt)));
        }
        Ok(NoiseStrength { b, kt })
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn kt(&self) -> f64 {
        self.kt
    }
}

/// Order `χ` of the fractional displacement relation and the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsdSpec {
    pub chi: f64,
    pub t_max: f64,
    pub quad: QuadratureSpec,
}

impl MsdSpec {
    pub fn new(chi: f64, t_max: f64, quad: QuadratureSpec) -> Result<Self> {
        let s = MsdSpec { chi, t_max, quad };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi > 0.5 && self.chi < 1.5) {
            return Err(Error::Domain(format!("chi must lie in (1/2, 3/2), got {}", self.chi)));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::Domain(format!("t_max must be positive, got {}", self.t_max)));
        }
        self.quad.validate()
    }
}

/// Parameters in the λ² convention of the covariance module: `λ ↦ λ^α`.
pub fn covariance_params(p: &ProcessParams) -> ProcessParams {
    ProcessParams::new(p.alpha(), p.gamma(), p.lambda().powf(p.alpha())).expect("mapped parameters stay valid")
}

/// `Γ(1/2α)Γ(γ − 1/2α)/Γ(γ)`.
fn variance_gamma_ratio(p: &ProcessParams) -> Result<f64> {
    let h = 0.5 / p.alpha();
    Ok((ln_gamma(h)? + ln_gamma(p.gamma() - h)? - ln_gamma(p.gamma())?).exp())
}

/// Noise coefficient fixed by equipartition `⟨X²⟩ = (kT)^{αγ}`.
/// Returns `(B, n_factor)` with `n_factor = παΓ(γ)/(Γ(1/2α)Γ(γ−1/2α))`
/// and `B = n_factor · λ^{2αγ−1} (kT)^{αγ}`.
pub fn fd_coefficient(p: &ProcessParams, kt: f64) -> Result<(f64, f64)> {
    p.require_regular()?;
    if !(kt > 0.0) {
        return Err(Error::Domain(format!("kT must be positive, got {}", kt)));
    }
    let n = PI * p.alpha() / variance_gamma_ratio(p)?;
    let ag = p.ag();
    Ok((n * p.lambda().powf(2.0 * ag - 1.0) * kt.powf(ag), n))
}

/// Stationary variance `(B/πα) Γ(1/2α)Γ(γ−1/2α)/Γ(γ) · λ^{1−2αγ}`.
pub fn equipartition_variance(p: &ProcessParams, b: f64) -> Result<f64> {
    p.require_regular()?;
    Ok(b / (PI * p.alpha()) * variance_gamma_ratio(p)? * p.lambda().powf(1.0 - 2.0 * p.ag()))
}

/// Long-time diffusion constant `D = ∫₀^∞ C = B λ^{−2αγ}`.
pub fn diffusion_constant(p: &ProcessParams, b: f64) -> Result<f64> {
    p.require_regular()?;
    Ok(b * p.lambda().powf(-2.0 * p.ag()))
}

/// Unit-noise covariance (`B = 1/2`) at lag `t`, in this module's convention.
fn unit_covariance(pc: &ProcessParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    covariance(pc, t, q)
}

/// Tolerance used for the outer τ-integrals; the covariance inside already
/// carries quadrature error at the `q.rel_tol` level.
fn outer_tolerances(q: &QuadratureSpec) -> (f64, f64) {
    (q.abs_tol, q.rel_tol.max(1e-10))
}

/// `∫₀ᵗ w(τ) C(τ) dτ` with break points at the natural time scale.
fn weighted_covariance_integral<W: Fn(f64) -> Result<f64>>(
    pc: &ProcessParams,
    t: f64,
    q: &QuadratureSpec,
    weight: W,
) -> Result<f64> {
    let mut failure: Option<Error> = None;
    let f = |tau: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        let w = match weight(tau) {
            Ok(w) => w,
            Err(e) => {
                failure = Some(e);
                return 0.0;
            }
        };
        if w == 0.0 {
            return 0.0;
        }
        match unit_covariance(pc, tau, q) {
            Ok(c) => w * c,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let ts = pc.time_scale();
    let mut points = vec![0.0];
    let mut b = 1e-3 * ts;
    while b < t {
        points.push(b);
        b *= 4.0;
    }
    points.push(t);
    let (abs, rel) = outer_tolerances(q);
    let r = quad::gauss_kronrod_points(f, &points, abs, rel, q.max_subdivisions);
    if let Some(e) = failure {
        return Err(e);
    }
    accept(r, abs, rel)
}

fn accept(r: QuadResult, abs: f64, rel: f64) -> Result<f64> {
    r.value_within(abs, rel, 100.0)
}

/// `⟨Y(t)²⟩ = 2∫₀ᵗ (t−τ) C(τ) dτ` for the velocity–displacement relation
/// `Y' = X`, with unit noise (`B = 1/2`).
pub fn msd_velocity(p: &ProcessParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    p.require_regular()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {}", t)));
    }
    let pc = covariance_params(p);
    Ok(2.0 * weighted_covariance_integral(&pc, t, q, |tau| Ok(t - tau))?)
}

/// `∫_τ^t u^{χ−1}(u−τ)^{χ−1} du`, via `u = τ + L w^{1/χ}` which absorbs
/// the endpoint singularity: `(L^χ/χ) ∫₀¹ (τ + L w^{1/χ})^{χ−1} dw`.
fn inner_kernel(chi: f64, tau: f64, t: f64, q: &QuadratureSpec) -> Result<f64> {
    let l = t - tau;
    if l <= 0.0 {
        return Ok(0.0);
    }
    if chi == 1.0 {
        return Ok(l);
    }
    let f = |w: f64| (tau + l * w.powf(1.0 / chi)).powf(chi - 1.0);
    let r = quad::gauss_kronrod(f, 0.0, 1.0, 0.0, q.rel_tol.max(1e-12), q.max_subdivisions);
    let pref = l.powf(chi) / chi;
    accept(r.scale(pref), 0.0, q.rel_tol.max(1e-12) * 10.0)
}

/// Mean-square displacement for `Y = I^χ X` (Riemann–Liouville integral),
/// `(2/Γ(χ)²) ∫₀ᵗ [∫_τ^t u^{χ−1}(u−τ)^{χ−1} du] C(τ) dτ`, unit noise.
pub fn msd_fractional(p: &ProcessParams, spec: &MsdSpec, t: f64) -> Result<f64> {
    p.require_regular()?;
    spec.validate()?;
    if !(t > 0.0 && t <= spec.t_max) {
        return Err(Error::Domain(format!("t must lie in (0, t_max = {}], got {}", spec.t_max, t)));
    }
    let chi = spec.chi;
    let q = &spec.quad;
    let pc = covariance_params(p);
    let g = gamma_fn(chi)?;
    let v = weighted_covariance_integral(&pc, t, q, |tau| inner_kernel(chi, tau, t, q))?;
    Ok(2.0 * v / (g * g))
}

/// Long-time expansion of the fractional MSD with noise `B`:
/// `2Bλ^{−2αγ} t^{2χ−1}/((2χ−1)Γ(χ)²) + O(t^{max{0, 2χ−2, 2χ−2α−1}} log t)`.
///
/// For χ = 1 `next_order` carries the second-order growth: `t⁰` for α > 1/2,
/// `log t` for α = 1/2, `t^{1−2α}` for α < 1/2 (see [`msd_second_order`]).
pub fn msd_asymptotic(p: &ProcessParams, chi: f64, b: f64) -> Result<AsymptoticExpansion> {
    p.require_regular()?;
    if !(chi > 0.5 && chi < 1.5) {
        return Err(Error::Domain(format!("chi must lie in (1/2, 3/2), got {}", chi)));
    }
    if !(b > 0.0) {
        return Err(Error::Domain(format!("B must be positive, got {}", b)));
    }
    let g = gamma_fn(chi)?;
    let c = 2.0 * diffusion_constant(p, b)? / ((2.0 * chi - 1.0) * g * g);
    let a = p.alpha();
    let err_pow = 0.0f64.max(2.0 * chi - 2.0).max(2.0 * chi - 2.0 * a - 1.0);
    let mut e = AsymptoticExpansion {
        terms: vec![Term::new(c, 2.0 * chi - 1.0, 0)],
        regime: Regime::LargeT,
        validity: Validity::Regular,
        exp_rate: None,
        // log t = −log(1/t); the tag records magnitude only.
        error_order: Some(OrderTag { power: err_pow, log_power: 1 }),
        next_order: None,
    };
    if chi == 1.0 {
        e.next_order = Some(second_order_tag(a));
    }
    Ok(e)
}

fn second_order_tag(a: f64) -> OrderTag {
    if a > 0.5 {
        OrderTag { power: 0.0, log_power: 0 }
    } else if a == 0.5 {
        OrderTag { power: 0.0, log_power: 1 }
    } else {
        OrderTag { power: 1.0 - 2.0 * a, log_power: 0 }
    }
}

/// Constants of the long-time MSD expansion for χ = 1, with noise `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsdConstants {
    /// Leading large-τ coefficient: `C(τ) ~ A₁ τ^{−2α−1}`.
    pub a1: f64,
    /// `A₂ = D`.
    pub a2: f64,
    /// `A₃ = −A₁/(2α)`, from `∫_t^∞ C`.
    pub a3: f64,
    /// `A₄ = ∫₀^∞ τ C(τ) dτ`, finite for α > 1/2.
    pub a4: Option<f64>,
    /// `A₅ = A₁/(1−2α)`, α < 1/2.
    pub a5: f64,
    /// `A₆ = A₁`, coefficient of `log t` in `∫₀ᵗ τC` at α = 1/2.
    pub a6: f64,
}

/// Numerically computed constants of the χ = 1 expansion.
pub fn msd_constants(p: &ProcessParams, b: f64, q: &QuadratureSpec) -> Result<MsdConstants> {
    p.require_regular()?;
    let pc = covariance_params(p);
    let a = p.alpha();
    let a1 = if a < 1.0 { 2.0 * b * covariance_large_t(&pc, 1)?.terms[0].coeff } else { 0.0 };
    let a2 = diffusion_constant(p, b)?;
    let a4 = if a > 0.5 { Some(2.0 * b * first_moment(&pc, q)?) } else { None };
    let (a3, a5) = (-a1 / (2.0 * a), if a != 0.5 { a1 / (1.0 - 2.0 * a) } else { f64::INFINITY });
    Ok(MsdConstants { a1, a2, a3, a4, a5, a6: a1 })
}

/// `∫₀^∞ τ C(τ) dτ` (λ² convention, unit noise): quadrature to `T` plus the
/// large-τ series beyond it.
fn first_moment(pc: &ProcessParams, q: &QuadratureSpec) -> Result<f64> {
    let big_t = 40.0 * pc.time_scale();
    let body = weighted_covariance_integral(pc, big_t, q, |tau| Ok(tau))?;
    let mut tail = 0.0;
    if pc.alpha() < 1.0 {
        let series = covariance_large_t(pc, 12)?;
        let a = pc.alpha();
        let mut prev = f64::INFINITY;
        for (j, c) in series.terms.iter().map(|t| t.coeff).enumerate() {
            let k = 2.0 * a * (j + 1) as f64;
            // ∫_T^∞ τ · c τ^{−k−1} dτ
            let term = c * big_t.powf(1.0 - k) / (k - 1.0);
            if term.abs() > prev {
                break;
            }
            tail += term;
            prev = term.abs();
        }
    }
    Ok(body + tail)
}

/// Second-order term of `⟨Y²⟩` (χ = 1) for noise `B`, in the
/// `coeff·t^p·(log 1/t)^q` convention: `−2A₄` (α > 1/2),
/// `−2A₆ log t` (α = 1/2), `(2A₃ − 2A₅) t^{1−2α}` (α < 1/2).
pub fn msd_second_order(p: &ProcessParams, b: f64, q: &QuadratureSpec) -> Result<Term> {
    let k = msd_constants(p, b, q)?;
    let a = p.alpha();
    Ok(if a > 0.5 {
        Term::new(-2.0 * k.a4.expect("finite first moment for alpha > 1/2"), 0.0, 0)
    } else if a == 0.5 {
        Term::new(2.0 * k.a6, 0.0, 1)
    } else {
        Term::new(2.0 * k.a3 - 2.0 * k.a5, 1.0 - 2.0 * a, 0)
    })
}

/// Coefficient of `t^{2αγ−1}` in the fractional MSD with `χ = αγ` and `B`
/// from [`fd_coefficient`]:
/// `2 n_factor (kT)^{αγ} / (λ (2αγ−1) Γ(αγ)²)`.
pub fn fbm_msd_coefficient(p: &ProcessParams, kt: f64) -> Result<f64> {
    let (b, _) = fd_coefficient(p, kt)?;
    let ag = p.ag();
    if !(ag > 0.5 && ag < 1.5) {
        return Err(Error::Regime(format!("chi = alpha*gamma must lie in (1/2, 3/2), got {}", ag)));
    }
    let g = gamma_fn(ag)?;
    Ok(2.0 * diffusion_constant(p, b)? / ((2.0 * ag - 1.0) * g * g))
}

/// `N(α,γ)` in `⟨Y²⟩ ~ N (kT/λ)^{αγ} t^{2αγ−1}`, not normalized.
/// Note it carries `λ^{αγ−1}`, so it is a pure constant only when αγ = 1.
pub fn n_alpha_gamma(p: &ProcessParams, kt: f64) -> Result<f64> {
    Ok(fbm_msd_coefficient(p, kt)? / (kt / p.lambda()).powf(p.ag()))
}

/// Effective diffusion coefficient `D(t) = ½ (kT/λ)^{αγ} (2αγ−1) t^{2αγ−2}`.
pub fn effective_diffusion(p: &ProcessParams, kt: f64, t: f64) -> Result<f64> {
    p.require_regular()?;
    if !(t > 0.0) || !(kt > 0.0) {
        return Err(Error::Domain("t and kT must be positive".into()));
    }
    let ag = p.ag();
    Ok(0.5 * (kt / p.lambda()).powf(ag) * (2.0 * ag - 1.0) * t.powf(2.0 * ag - 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, g: f64, l: f64) -> ProcessParams {
        ProcessParams::new(a, g, l).unwrap()
    }

    #[test]
    fn fd_examples() {
        let (b, n) = fd_coefficient(&p(1.0, 1.0, 2.5), 0.7).unwrap();
        assert!((b - 2.5 * 0.7).abs() < 1e-14);
        assert!((n - 1.0).abs() < 1e-14);
        let par = p(1.0, 1.0, 2.5);
        assert!((equipartition_variance(&par, 2.5 * 0.7).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn unit_noise_variance_matches_covariance_module() {
        for &(a, g, l) in &[(0.8, 1.0, 1.5), (0.5, 3.0, 0.7), (1.0, 1.3, 2.0)] {
            let par = p(a, g, l);
            let v = equipartition_variance(&par, 0.5).unwrap();
            let c = crate::covariance::variance(&covariance_params(&par)).unwrap();
            assert!(((v - c) / c).abs() < 1e-13);
        }
    }

    #[test]
    fn diffusion_examples() {
        assert!((diffusion_constant(&p(1.0, 1.0, 1.0), 0.5).unwrap() - 0.5).abs() < 1e-15);
        let par = p(1.0, 1.0, 3.0);
        let (b, _) = fd_coefficient(&par, 2.0).unwrap();
        assert!((diffusion_constant(&par, b).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn effective_diffusion_examples() {
        assert!((effective_diffusion(&p(1.0, 1.0, 1.0), 2.0, 7.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((effective_diffusion(&p(0.5, 2.0, 3.0), 1.5, 0.3).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn msd_asymptotic_tags() {
        let e = msd_asymptotic(&p(0.8, 1.0, 1.0), 1.0, 0.5).unwrap();
        assert!((e.terms[0].coeff - 1.0).abs() < 1e-14);
        assert_eq!(e.next_order.unwrap().power, 0.0);
        let e = msd_asymptotic(&p(0.3, 2.0, 1.0), 1.0, 0.5).unwrap();
        assert!((e.next_order.unwrap().power - 0.4).abs() < 1e-15);
        let e = msd_asymptotic(&p(0.5, 2.0, 1.0), 1.0, 0.5).unwrap();
        assert_eq!(e.next_order.unwrap().log_power, 1);
        let e = msd_asymptotic(&p(0.8, 1.0, 1.0), 0.7, 0.5).unwrap();
        assert!(e.next_order.is_none());
        assert_eq!(e.error_order.unwrap().power, 0.0);
        let e = msd_asymptotic(&p(0.3, 3.0, 1.0), 1.3, 0.5).unwrap();
        assert!((e.error_order.unwrap().power - 1.0).abs() < 1e-15);
    }
}
