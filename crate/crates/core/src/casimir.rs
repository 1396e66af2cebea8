//! Zeta-regularized free energy of the thermal fractional Klein–Gordon
//! field on a circle of length β: ζ(s), ζ(0), ζ′(0), the free energy, its
//! counterterm, and the low- and high-temperature expansions.
//!
//! The eigenvalues are `((a|n|)^{2α} + m²)^γ`, `n ∈ ℤ`, with `a = 2π/β`.
//! Everything is evaluated in the scaled heat time `c = t·a^{2α}`, where
//! the heat-kernel remainder
//! `K̃(c) = 2Σ_{n≥1} e^{−c n^{2α}} − (1/α)Γ(1/(2α)) c^{−1/(2α)} + 1`
//! depends on α alone and the mass enters only through
//! `M = m²(β/2π)^{2α} = (βm^{1/α}/2π)^{2α}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticExpansion, OrderTag, Regime, Term, Validity};
use crate::covariance::QuadratureSpec;
use crate::error::{Error, Result};
use crate::quad::gauss_kronrod_points;
use crate::specfun::{bernoulli_even, digamma, gamma_fn, ln_gamma, rgamma, riemann_zeta, sin_pi};

/// Tolerance on `1/(2α)` for membership in the even-reciprocal set.
pub const TOL_LAMBDA: f64 = 1e-9;

/// `|sin(π/(2α))|` below which the off-set formula is flagged as
/// ill-conditioned.
pub const SIN_WARN: f64 = 1e-3;

/// Scaled heat times up to this value use the small-c series.
const C_SERIES: f64 = 0.1;
/// Exponent beyond which `e^{−c n^{2α}}` is dropped.
const Z_DIRECT: f64 = 45.0;
/// Bernoulli corrections in the Euler–Maclaurin tail.
const EM_TERMS: usize = 12;

/// Inverse temperature, mass and normalization scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    beta: f64,
    m: f64,
    mu: f64,
}

impl ThermalParams {
    pub fn new(beta: f64, m: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("m", m), ("mu", mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{} must be positive and finite, got {}", name, v)));
            }
        }
        Ok(ThermalParams { beta, m, mu })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Matsubara spacing `2π/β`.
    pub fn a(&self) -> f64 {
        2.0 * PI / self.beta
    }

    /// `β m^{1/α}`, the only combination `F_ren/m^{1/α}` depends on.
    pub fn scaled_beta(&self, alpha: f64) -> f64 {
        self.beta * self.m.powf(1.0 / alpha)
    }

    fn mass_scale(&self, alpha: f64) -> f64 {
        (self.scaled_beta(alpha) / (2.0 * PI)).powf(2.0 * alpha)
    }
}

/// Whether `α = 1/(2u)` for a positive integer `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaBranch {
    pub in_lambda: bool,
    pub u: Option<u32>,
    /// `(−1)^u`, defined on the branch only.
    pub sign: Option<i32>,
}

impl LambdaBranch {
    fn omega(&self) -> f64 {
        if self.in_lambda { 1.0 } else { 0.0 }
    }

    fn sign_f64(&self) -> f64 {
        self.sign.unwrap_or(0) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyResult {
    pub zeta0: f64,
    pub zeta0_prime: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub counterterm: f64,
    #[serde(rename = "F_ren")]
    pub f_ren: f64,
    pub lambda_branch: LambdaBranch,
    pub warnings: Vec<String>,
}

pub fn lambda_membership(alpha: f64, tol: f64) -> LambdaBranch {
    let x = 1.0 / (2.0 * alpha);
    let r = x.round();
    if r >= 1.0 && (x - r).abs() <= tol {
        let u = r as u32;
        LambdaBranch { in_lambda: true, u: Some(u), sign: Some(if u % 2 == 0 { 1 } else { -1 }) }
    } else {
        LambdaBranch { in_lambda: false, u: None, sign: None }
    }
}

fn check_exponents(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {}", alpha)));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be positive, got {}", gamma)));
    }
    Ok(())
}

fn condition_warning(alpha: f64, branch: &LambdaBranch) -> Option<String> {
    let s = sin_pi(1.0 / (2.0 * alpha));
    if !branch.in_lambda && s.abs() < SIN_WARN {
        Some(format!(
            "alpha = {} is within {:.1e} of the even-reciprocal set; |sin(pi/(2 alpha))| = {:.3e} makes the off-set branch ill-conditioned",
            alpha,
            (1.0 / (2.0 * alpha) - (1.0 / (2.0 * alpha)).round()).abs(),
            s.abs()
        ))
    } else {
        None
    }
}

/// Heat-kernel remainder `K̃(c)` for a fixed exponent `p = 2α`.
struct HeatKernel {
    p: f64,
    /// `(2/p)Γ(1/p)`.
    leading: f64,
    /// `(2(−1)^k ζ(−pk)/k!, log of its envelope)` for `k = 1, 2, ...`.
    series: Vec<(f64, f64)>,
    /// `binom(p, k)` for `k = 0..2·EM_TERMS`.
    binom: Vec<f64>,
    /// `B_{2j}/(2j)`.
    bernoulli: Vec<f64>,
}

impl HeatKernel {
    fn new(alpha: f64) -> Result<Self> {
        let p = 2.0 * alpha;
        let leading = 2.0 / p * gamma_fn(1.0 / p)?;
        let ln_2pi = (2.0 * PI).ln();
        let target = (1e-17 * C_SERIES).ln();
        let mut series = Vec::new();
        let mut prev_env = f64::INFINITY;
        for k in 1..=400usize {
            let x = p * k as f64;
            let zeta = match riemann_zeta(-x) {
                Ok(z) => z,
                Err(_) => break,
            };
            // |ζ(−x)| ≤ 2Γ(x+1)ζ(x+1)/(2π)^{x+1}
            let ln_env = 4f64.ln() + ln_gamma(x + 1.0)? + riemann_zeta(x + 1.0)?.ln() - (x + 1.0) * ln_2pi - ln_gamma(k as f64 + 1.0)?;
            let coeff = 2.0 * if k % 2 == 0 { 1.0 } else { -1.0 } * zeta * (-ln_gamma(k as f64 + 1.0)?).exp();
            series.push((coeff, ln_env));
            let env_at_switch = ln_env + k as f64 * C_SERIES.ln();
            if env_at_switch < target || env_at_switch > prev_env {
                break;
            }
            prev_env = env_at_switch;
        }
        let mut binom = vec![1.0];
        for k in 1..2 * EM_TERMS {
            let prev = binom[k - 1];
            binom.push(prev * (p - (k - 1) as f64) / k as f64);
        }
        let bernoulli = (1..=EM_TERMS).map(|j| Ok(bernoulli_even(j)? / (2 * j) as f64)).collect::<Result<Vec<_>>>()?;
        Ok(HeatKernel { p, leading, series, binom, bernoulli })
    }

    fn eval(&self, c: f64) -> f64 {
        if c <= C_SERIES {
            return self.small_c(c);
        }
        let p = self.p;
        let mut n = 8usize;
        loop {
            let nf = n as f64;
            if c * nf.powf(p) > Z_DIRECT {
                return self.direct(c);
            }
            if p * c * nf.powf(p - 1.0) <= 0.5 {
                return self.euler_maclaurin(c, n);
            }
            n *= 2;
        }
    }

    fn small_c(&self, c: f64) -> f64 {
        let ln_c = c.ln();
        let floor = (1e-17 * c).ln();
        let mut sum = 0.0;
        let mut pw = 1.0;
        for (k, &(coeff, ln_env)) in self.series.iter().enumerate() {
            pw *= c;
            sum += coeff * pw;
            if ln_env + (k + 1) as f64 * ln_c < floor {
                break;
            }
        }
        sum
    }

    fn direct(&self, c: f64) -> f64 {
        let nd = ((Z_DIRECT / c).powf(1.0 / self.p)).ceil().max(1.0) as usize;
        let s: f64 = (1..=nd).rev().map(|k| (-c * (k as f64).powf(self.p)).exp()).sum();
        2.0 * s - self.leading * c.powf(-1.0 / self.p) + 1.0
    }

    /// Σ_{n≥1} split at `n`: the tail is replaced by its integral and
    /// Bernoulli corrections, and `∫_0^∞` cancels the leading term exactly,
    /// leaving `−∫_0^n`.
    fn euler_maclaurin(&self, c: f64, n: usize) -> f64 {
        let p = self.p;
        let nf = n as f64;
        let z = c * nf.powf(p);
        let ez = (-z).exp();
        let mut s: f64 = (1..n).rev().map(|k| (-c * (k as f64).powf(p)).exp()).sum();
        s += 0.5 * ez;

        // ∫_0^n e^{−cx^p} dx = n e^{−z} Σ_k z^k / ((1/p)(1/p+1)…(1/p+k)) / p
        let sh = 1.0 / p;
        let mut t = 1.0 / sh;
        let mut acc = t;
        let mut k = 1usize;
        loop {
            t *= z / (sh + k as f64);
            acc += t;
            if (t < 1e-18 * acc && k as f64 > z) || k > 10_000 {
                break;
            }
            k += 1;
        }
        s -= nf * sh * ez * acc;

        // Taylor jet of exp(−z(1+u)^p), u = h/n.
        let kmax = 2 * EM_TERMS - 1;
        let g: Vec<f64> = (0..=kmax).map(|k| if k == 0 { 0.0 } else { -z * self.binom[k] }).collect();
        let mut e = vec![1.0; kmax + 1];
        for k in 1..=kmax {
            e[k] = (1..=k).map(|j| j as f64 * g[j] * e[k - j]).sum::<f64>() / k as f64;
        }
        let mut inv_n = 1.0 / nf;
        for j in 1..=EM_TERMS {
            let term = self.bernoulli[j - 1] * e[2 * j - 1] * ez * inv_n;
            s -= term;
            if term.abs() < 1e-18 {
                break;
            }
            inv_n /= nf * nf;
        }
        2.0 * s + 1.0
    }

    /// `∫_0^∞ c^{e} K̃(c) e^{−cM} dc`.
    fn moment(&self, e: f64, mass: f64, q: &QuadratureSpec) -> Result<f64> {
        let c_max = (75.0 + 3.0 * e.max(0.0)) / mass;
        let mut points = vec![0.0, c_max];
        let mut b = C_SERIES;
        while b < c_max {
            points.push(b);
            b *= 4.0;
        }
        for x in [0.25, 1.0, 4.0, 16.0] {
            points.push(x / mass);
        }
        points.retain(|&x| x <= c_max);
        points.sort_by(|x, y| x.partial_cmp(y).unwrap());
        points.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs());
        let r = gauss_kronrod_points(
            |c| if c <= 0.0 { 0.0 } else { c.powf(e) * self.eval(c) * (-c * mass).exp() },
            &points,
            q.abs_tol,
            q.rel_tol,
            q.max_subdivisions,
        );
        q.accept(r)
    }
}

/// `K(t) = 2Σ_{n≥1} e^{−t(an)^{2α}} − (1/α)Γ(1/(2α)) t^{−1/(2α)} a^{−1} + 1`,
/// which is `O(t)` as `t → 0`.
pub fn heat_remainder(t: f64, alpha: f64, a: f64) -> Result<f64> {
    check_exponents(alpha, 1.0)?;
    if !(t > 0.0) || !(a > 0.0) {
        return Err(Error::Domain(format!("heat_remainder needs t > 0 and a > 0, got t = {}, a = {}", t, a)));
    }
    Ok(HeatKernel::new(alpha)?.eval(t * a.powf(2.0 * alpha)))
}

/// Analytic continuation of `ζ(s) = Σ_{n∈ℤ} ((a|n|)^{2α} + m²)^{−γs}` to
/// `s > −1/γ`.
pub fn zeta_value(s: f64, th: &ThermalParams, alpha: f64, gamma: f64, q: &QuadratureSpec) -> Result<f64> {
    check_exponents(alpha, gamma)?;
    q.validate()?;
    if !(s > -1.0 / gamma) {
        return Err(Error::Domain(format!("zeta continuation needs s > -1/gamma = {}, got {}", -1.0 / gamma, s)));
    }
    let x = gamma * s;
    let h = 1.0 / (2.0 * alpha);
    let a = th.a();
    let rg = rgamma(x);
    let first = gamma_fn(h)? * gamma_fn(x - h)? * rg / alpha / a * th.m.powf(-2.0 * x + 1.0 / alpha);
    if rg == 0.0 {
        return Ok(first);
    }
    let hk = HeatKernel::new(alpha)?;
    let integral = hk.moment(x - 1.0, th.mass_scale(alpha), q)?;
    Ok(first + rg * a.powf(-2.0 * alpha * x) * integral)
}

/// `ζ(0) = 2ω(−1)^u a^{−1} m^{1/α}`; zero off the even-reciprocal set.
pub fn zeta_at_zero(th: &ThermalParams, alpha: f64, gamma: f64) -> Result<f64> {
    check_exponents(alpha, gamma)?;
    let b = lambda_membership(alpha, TOL_LAMBDA);
    Ok(2.0 * b.omega() * b.sign_f64() / th.a() * th.m.powf(1.0 / alpha))
}

/// `ζ′(0)`: closed-form branch term plus `γ∫_0^∞ t^{−1}K(t)e^{−tm²}dt`.
pub fn zeta_prime_at_zero(th: &ThermalParams, alpha: f64, gamma: f64, q: &QuadratureSpec) -> Result<f64> {
    check_exponents(alpha, gamma)?;
    q.validate()?;
    let hk = HeatKernel::new(alpha)?;
    let integral = hk.moment(-1.0, th.mass_scale(alpha), q)?;
    Ok(branch_term(th, alpha, gamma, &lambda_membership(alpha, TOL_LAMBDA))? + gamma * integral)
}

fn branch_term(th: &ThermalParams, alpha: f64, gamma: f64, b: &LambdaBranch) -> Result<f64> {
    let scale = th.m.powf(1.0 / alpha) / th.a();
    match b.u {
        Some(u) => {
            let harmonic = digamma(u as f64 + 1.0)? - digamma(1.0)?;
            Ok(2.0 * b.sign_f64() * scale * gamma * (harmonic - (th.m * th.m).ln()))
        }
        None => Ok(-gamma * 2.0 * PI / sin_pi(1.0 / (2.0 * alpha)) * scale),
    }
}

/// `F = −(ζ′(0) − ζ(0) log μ²)/(2β)`, the counterterm and `F_ren = F + F_c`.
pub fn free_energy(th: &ThermalParams, alpha: f64, gamma: f64, q: &QuadratureSpec) -> Result<FreeEnergyResult> {
    check_exponents(alpha, gamma)?;
    let branch = lambda_membership(alpha, TOL_LAMBDA);
    let zeta0 = zeta_at_zero(th, alpha, gamma)?;
    let zeta0_prime = zeta_prime_at_zero(th, alpha, gamma, q)?;
    let log_mu2 = (th.mu * th.mu).ln();
    let f = -(zeta0_prime - zeta0 * log_mu2) / (2.0 * th.beta);
    let counterterm = if branch.in_lambda {
        -branch.sign_f64() / (2.0 * PI) * th.m.powf(1.0 / alpha) * (log_mu2 + gamma * (th.m * th.m).ln())
    } else {
        0.0
    };
    let warnings = condition_warning(alpha, &branch).into_iter().collect();
    Ok(FreeEnergyResult { zeta0, zeta0_prime, f, counterterm, f_ren: f + counterterm, lambda_branch: branch, warnings })
}

/// Exact free energy at α = 1: `(γ/β) log(2 sinh(βm/2))`.
pub fn free_energy_alpha_one(th: &ThermalParams, gamma: f64) -> f64 {
    let bm = th.beta * th.m;
    gamma * th.m / 2.0 + gamma / th.beta * (-(-bm).exp()).ln_1p()
}

/// Low-temperature expansion of `F_ren` in powers of `T = 1/β`: the
/// branch constant plus `−γ(−1)^k/k · m^{−2k}(2π)^{2αk} ζ_R(−2αk) T^{2αk+1}`
/// for `k = 1..=k_terms` (terms with `2αk` even vanish and are omitted).
pub fn free_energy_low_t(th: &ThermalParams, alpha: f64, gamma: f64, k_terms: usize) -> Result<AsymptoticExpansion> {
    check_exponents(alpha, gamma)?;
    if k_terms == 0 {
        return Err(Error::Domain("k_terms must be at least 1".into()));
    }
    let b = lambda_membership(alpha, TOL_LAMBDA);
    let m = th.m;
    let constant = match b.u {
        Some(u) => -gamma * b.sign_f64() / (2.0 * PI) * m.powf(1.0 / alpha) * (digamma(u as f64 + 1.0)? - digamma(1.0)?),
        None => gamma * m.powf(1.0 / alpha) / (2.0 * sin_pi(1.0 / (2.0 * alpha))),
    };
    let mut terms = vec![Term::new(constant, 0.0, 0)];
    for k in 1..=k_terms {
        let x = 2.0 * alpha * k as f64;
        if (x / 2.0 - (x / 2.0).round()).abs() < 1e-12 {
            continue;
        }
        let z = match riemann_zeta(-x) {
            Ok(z) => z,
            Err(_) => break,
        };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = -gamma * sign / k as f64 * m.powi(-2 * k as i32) * (2.0 * PI).powf(x) * z;
        terms.push(Term::new(coeff, x + 1.0, 0));
    }
    let alpha_one = alpha == 1.0;
    let next = OrderTag { power: 2.0 * alpha * (k_terms + 1) as f64 + 1.0, log_power: 0 };
    Ok(AsymptoticExpansion {
        terms,
        regime: Regime::SmallT,
        validity: Validity::LowTemperature,
        exp_rate: None,
        // At α = 1 the remainder is exponentially small.
        error_order: if alpha_one { None } else { Some(next) },
        next_order: if alpha_one { None } else { Some(next) },
    })
}

/// High-temperature expansion of `F_ren` as a function of β:
/// `(1/2β){γ log m² + 2αγ log β − 2γ Σ_{l≠u} ((−1)^l/l) m^{2l}(β/2π)^{2αl} ζ_R(2αl)}`
/// plus the branch correction on the even-reciprocal set. The series stops
/// at `l_terms` or when its terms start to grow at the given β.
pub fn free_energy_high_t(th: &ThermalParams, alpha: f64, gamma: f64, l_terms: usize) -> Result<AsymptoticExpansion> {
    check_exponents(alpha, gamma)?;
    if l_terms == 0 {
        return Err(Error::Domain("l_terms must be at least 1".into()));
    }
    let sb = th.scaled_beta(alpha);
    if !(sb < 2.0 * PI) {
        return Err(Error::Divergence(format!("high-temperature series needs beta*m^(1/alpha) < 2*pi, got {}", sb)));
    }
    let b = lambda_membership(alpha, TOL_LAMBDA);
    let m = th.m;
    let mpow = m.powf(1.0 / alpha);
    let mut terms = vec![
        Term::new(gamma * (m * m).ln() / 2.0, -1.0, 0),
        // αγ β^{−1} log β = −αγ β^{−1} log(1/β)
        Term::new(-alpha * gamma, -1.0, 1),
    ];
    if let Some(u) = b.u {
        let s = gamma * b.sign_f64() * mpow / (2.0 * PI);
        let psi1 = digamma(1.0)?;
        let c0 = 2.0 * alpha * (2.0 * PI / mpow).ln() + 2.0 * alpha * psi1 - digamma(u as f64)? + psi1;
        terms.push(Term::new(2.0 * alpha * s, 0.0, 1));
        terms.push(Term::new(s * c0, 0.0, 0));
    }
    let mut prev = f64::INFINITY;
    let mut last_l = 0usize;
    for l in 1..=l_terms {
        if b.u == Some(l as u32) {
            continue;
        }
        let x = 2.0 * alpha * l as f64;
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = -gamma * sign / l as f64 * m.powi(2 * l as i32) * (2.0 * PI).powf(-x) * riemann_zeta(x)?;
        let term = Term::new(coeff, x - 1.0, 0);
        let size = term.eval(th.beta).abs();
        if size > prev {
            break;
        }
        prev = size;
        terms.push(term);
        last_l = l;
    }
    let next = OrderTag { power: 2.0 * alpha * (last_l + 1) as f64 - 1.0, log_power: 0 };
    Ok(AsymptoticExpansion {
        terms,
        regime: Regime::SmallT,
        validity: Validity::HighTemperature,
        exp_rate: None,
        error_order: Some(next),
        next_order: Some(next),
    })
}

/// One grid point of a free-energy sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub m: f64,
    pub beta_m_scaled: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "F_ren")]
    pub f_ren: f64,
}

/// Free energies on the grid `alphas × scaled_betas` (β = scaled/m^{1/α}),
/// evaluated in parallel and returned in grid order.
pub fn sweep(alphas: &[f64], gamma: f64, m: f64, mu: f64, scaled_betas: &[f64], q: &QuadratureSpec) -> Result<Vec<SweepRow>> {
    let grid: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| scaled_betas.iter().map(move |&s| (a, s))).collect();
    grid.par_iter()
        .map(|&(alpha, sb)| {
            check_exponents(alpha, gamma)?;
            let beta = sb / m.powf(1.0 / alpha);
            let th = ThermalParams::new(beta, m, mu)?;
            let r = free_energy(&th, alpha, gamma, q)?;
            Ok(SweepRow { alpha, gamma, beta, m, beta_m_scaled: sb, f: r.f, f_ren: r.f_ren })
        })
        .collect()
}
