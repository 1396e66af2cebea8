//! Small-t expansions of the structure function, large-t expansions of the
//! covariance, and the path-regularity descriptors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::covariance::{ProcessParams, RegularityClass};
use crate::error::{Error, Result};
use crate::specfun::{cos_pi, digamma, gamma_fn, ln_gamma, sin_pi};

/// `coeff · |t|^power · (log 1/|t|)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub power: f64,
    pub log_power: u32,
}

impl Term {
    pub fn new(coeff: f64, power: f64, log_power: u32) -> Self {
        Term { coeff, power, log_power }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        let mut v = self.coeff * t.powf(self.power);
        if self.log_power > 0 {
            v *= (1.0 / t).ln().powi(self.log_power as i32);
        }
        v
    }
}

/// Order of magnitude `|t|^power · (log 1/|t|)^log_power` without a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderTag {
    pub power: f64,
    pub log_power: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    SmallT,
    LargeT,
}

/// Parameter range an expansion is derived for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Validity {
    Class(RegularityClass),
    /// 0 < α < 1.
    AlphaBelowOne,
    AlphaOne,
    /// Any regular parameters (αγ > 1/2).
    Regular,
    /// Free energy as a series in `T` for `T ≪ m^{1/α}`.
    LowTemperature,
    /// Free energy as a series in `β`; converges for `βm^{1/α} < 2π`.
    HighTemperature,
}

/// Sum of terms, optionally multiplied by `e^{−rate·|t|}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticExpansion {
    pub terms: Vec<Term>,
    pub regime: Regime,
    pub validity: Validity,
    /// Present for exponentially decaying tails (α = 1).
    pub exp_rate: Option<f64>,
    /// Size of the neglected remainder, when known.
    pub error_order: Option<OrderTag>,
    /// Order of the first neglected term, when known.
    pub next_order: Option<OrderTag>,
}

impl AsymptoticExpansion {
    fn new(terms: Vec<Term>, regime: Regime, validity: Validity) -> Self {
        AsymptoticExpansion { terms, regime, validity, exp_rate: None, error_order: None, next_order: None }
    }

    /// Heuristic range in natural time units: `t ≤ 0.01` for small-t
    /// expansions, `t ≥ 10` for large-t ones.
    pub fn advisory_range(&self) -> (f64, f64) {
        match self.regime {
            Regime::SmallT => (0.0, 0.01),
            Regime::LargeT => (10.0, f64::INFINITY),
        }
    }
}

/// Partial sum of the expansion at `t`.
pub fn evaluate_expansion(e: &AsymptoticExpansion, t: f64) -> f64 {
    evaluate_partial(e, t, e.terms.len())
}

/// Sum of the first `n` terms at `t`.
pub fn evaluate_partial(e: &AsymptoticExpansion, t: f64, n: usize) -> f64 {
    let s: f64 = e.terms.iter().take(n).map(|term| term.eval(t)).sum();
    match e.exp_rate {
        Some(r) => s * (-r * t.abs()).exp(),
        None => s,
    }
}

/// Leading behavior of `σ²(t)` as `t → 0`, by regularity class.
pub fn sigma2_small_t(p: &ProcessParams) -> Result<AsymptoticExpansion> {
    p.require_regular()?;
    let (a, g, l) = (p.alpha(), p.gamma(), p.lambda());
    let ag = p.ag();
    let class = p.regularity();
    let mut e = match class {
        RegularityClass::Rough => {
            let c = -1.0 / (cos_pi(ag) * gamma_fn(2.0 * ag)?);
            let mut e = AsymptoticExpansion::new(vec![Term::new(c, 2.0 * ag - 1.0, 0)], Regime::SmallT, Validity::Class(class));
            e.next_order = Some(OrderTag { power: (2.0 * ag - 1.0 + 2.0 * a).min(2.0), log_power: 0 });
            e
        }
        RegularityClass::Smooth => {
            let h = 1.5 / a;
            let log = ln_gamma(h)? + ln_gamma(g - h)? - ln_gamma(g)?;
            let c = l.powf(3.0 / a - 2.0 * g) / (2.0 * PI * a) * log.exp();
            let mut e = AsymptoticExpansion::new(vec![Term::new(c, 2.0, 0)], Regime::SmallT, Validity::Class(class));
            e.error_order = Some(OrderTag { power: 2.0, log_power: 0 });
            e
        }
        RegularityClass::Borderline => {
            let psi1 = digamma(1.0)?;
            let k = -((1.0 / a) * l.ln() + (0.5 / a) * (digamma(g)? - psi1) - psi1 - 1.5) / PI;
            let mut e = AsymptoticExpansion::new(
                vec![Term::new(1.0 / PI, 2.0, 1), Term::new(k, 2.0, 0)],
                Regime::SmallT,
                Validity::Class(class),
            );
            e.error_order = Some(OrderTag { power: 2.0, log_power: 0 });
            e
        }
        RegularityClass::GeneralizedOnly => unreachable!(),
    };
    if e.error_order.is_none() {
        e.error_order = e.next_order;
    }
    Ok(e)
}

/// Large-t expansion of `C(t)`: an alternating power series for α < 1, the
/// exponential form `|t|^{γ−1}e^{−λ|t|}/((2λ)^γ Γ(γ))` for α = 1.
pub fn covariance_large_t(p: &ProcessParams, n_terms: usize) -> Result<AsymptoticExpansion> {
    p.require_regular()?;
    if n_terms == 0 {
        return Err(Error::Domain("n_terms must be positive".into()));
    }
    let (a, g, l) = (p.alpha(), p.gamma(), p.lambda());
    if a == 1.0 {
        let c = (-(g * (2.0 * l).ln()) - ln_gamma(g)?).exp();
        let mut e = AsymptoticExpansion::new(vec![Term::new(c, g - 1.0, 0)], Regime::LargeT, Validity::AlphaOne);
        e.exp_rate = Some(l);
        e.next_order = Some(OrderTag { power: g - 2.0, log_power: 0 });
        return Ok(e);
    }
    let lg = ln_gamma(g)?;
    let mut terms = Vec::with_capacity(n_terms);
    for j in 1..=n_terms {
        let jf = j as f64;
        let s = sin_pi(a * jf);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let mag = (ln_gamma(g + jf)? - lg - ln_gamma(jf + 1.0)? + ln_gamma(1.0 + 2.0 * a * jf)? - 2.0 * (g + jf) * l.ln()).exp();
        terms.push(Term::new(sign * s * mag / PI, -(2.0 * a * jf + 1.0), 0));
    }
    let mut e = AsymptoticExpansion::new(terms, Regime::LargeT, Validity::AlphaBelowOne);
    e.next_order = Some(OrderTag { power: -(2.0 * a * (n_terms as f64 + 1.0) + 1.0), log_power: 0 });
    Ok(e)
}

/// `H = αγ − 1/2`, defined in the rough class.
pub fn hurst_index(p: &ProcessParams) -> Result<f64> {
    p.require_regular()?;
    match p.regularity() {
        RegularityClass::Rough => Ok(p.ag() - 0.5),
        c => Err(Error::Regime(format!("Hurst index is defined for rough paths only, got {:?} (alpha*gamma = {})", c, p.ag()))),
    }
}

/// Fractal dimension of the graph, `max{1, 5/2 − αγ}`.
pub fn fractal_dimension(p: &ProcessParams) -> Result<f64> {
    p.require_regular()?;
    Ok((2.5 - p.ag()).max(1.0))
}

/// Supremum Hölder order `min{αγ − 1/2, 1}`.
pub fn holder_exponent(p: &ProcessParams) -> Result<f64> {
    p.require_regular()?;
    Ok((p.ag() - 0.5).min(1.0))
}

/// Covariance of the fBm tangent process,
/// `−(|u|^{2H} + |v|^{2H} − |u−v|^{2H}) / (2 cos(π(H+1/2)) Γ(2H+1))`.
pub fn fbm_tangent_covariance(h: f64, u: f64, v: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("H must lie in (0, 1), got {}", h)));
    }
    let s = u.abs().powf(2.0 * h) + v.abs().powf(2.0 * h) - (u - v).abs().powf(2.0 * h);
    Ok(-s / (2.0 * cos_pi(h + 0.5) * gamma_fn(2.0 * h + 1.0)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailKind {
    /// `C(t) ~ |t|^{−exponent}`.
    PowerLaw { exponent: f64 },
    /// `C(t) ~ |t|^{power} e^{−rate|t|}`.
    Exponential { rate: f64, power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDescriptor {
    pub kind: TailKind,
    /// Short-range dependent (integrable covariance).
    pub srd: bool,
}

pub fn srd_tail(p: &ProcessParams) -> Result<TailDescriptor> {
    p.require_regular()?;
    let kind = if p.alpha() < 1.0 {
        TailKind::PowerLaw { exponent: 2.0 * p.alpha() + 1.0 }
    } else {
        TailKind::Exponential { rate: p.lambda(), power: p.gamma() - 1.0 }
    };
    let srd = match kind {
        TailKind::PowerLaw { exponent } => exponent > 1.0,
        TailKind::Exponential { .. } => true,
    };
    Ok(TailDescriptor { kind, srd })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, g: f64, l: f64) -> ProcessParams {
        ProcessParams::new(a, g, l).unwrap()
    }

    #[test]
    fn ou_small_t_coefficient() {
        let e = sigma2_small_t(&p(1.0, 1.0, 3.0)).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert!((e.terms[0].coeff - 1.0).abs() < 1e-14);
        assert!((e.terms[0].power - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_specializations() {
        for &g in &[0.6, 0.9, 1.2, 1.4] {
            let e = sigma2_small_t(&p(1.0, g, 1.7)).unwrap();
            let expect = -1.0 / (cos_pi(g) * gamma_fn(2.0 * g).unwrap());
            assert!(((e.terms[0].coeff - expect) / expect).abs() < 1e-12);
        }
        // Smooth, α = 1: Γ(3/2)Γ(γ−3/2)/(2πΓ(γ)) λ^{3−2γ}
        for &(g, l) in &[(2.0, 1.0), (2.5, 1.0), (3.0, 2.0)] {
            let e = sigma2_small_t(&p(1.0, g, l)).unwrap();
            let expect = gamma_fn(1.5).unwrap() * gamma_fn(g - 1.5).unwrap() / (2.0 * PI * gamma_fn(g).unwrap()) * l.powf(3.0 - 2.0 * g);
            assert!(((e.terms[0].coeff - expect) / expect).abs() < 1e-12);
        }
        // Borderline, α = 1: (1/π)(−log λ + log 2 + ψ(1) + 1/2)
        for &l in &[0.5, 1.0, 3.0] {
            let e = sigma2_small_t(&p(1.0, 1.5, l)).unwrap();
            let expect = (-l.ln() + 2f64.ln() + digamma(1.0).unwrap() + 0.5) / PI;
            assert!((e.terms[1].coeff - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn rough_coefficient_positive() {
        for k in 1..100 {
            let ag = 0.5 + k as f64 / 100.0;
            let e = sigma2_small_t(&p(1.0, ag, 1.0)).unwrap();
            assert!(e.terms[0].coeff > 0.0, "ag = {}", ag);
        }
    }

    #[test]
    fn evaluate_examples() {
        let e = AsymptoticExpansion::new(vec![Term::new(2.0, 1.0, 0)], Regime::SmallT, Validity::Regular);
        assert_eq!(evaluate_expansion(&e, 3.0), 6.0);
        let e = AsymptoticExpansion::new(vec![Term::new(1.0, 2.0, 1)], Regime::SmallT, Validity::Regular);
        assert!((evaluate_expansion(&e, 0.1) - 0.01 * 10f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn large_t_leading_coefficient() {
        let e = covariance_large_t(&p(0.6, 1.0, 1.0), 3).unwrap();
        let expect = gamma_fn(2.2).unwrap() * sin_pi(0.6) / PI;
        assert!(((e.terms[0].coeff - expect) / expect).abs() < 1e-13);
        assert!((e.terms[0].power + 2.2).abs() < 1e-15);
        let ou = covariance_large_t(&p(1.0, 1.0, 2.0), 1).unwrap();
        for &t in &[0.1, 1.0, 5.0] {
            assert!((evaluate_expansion(&ou, t) - (-2.0 * t).exp() / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn descriptors() {
        assert_eq!(hurst_index(&p(1.0, 1.0, 1.0)).unwrap(), 0.5);
        assert!((hurst_index(&p(0.75, 1.4, 1.0)).unwrap() - 0.55).abs() < 1e-15);
        assert!(matches!(hurst_index(&p(0.8, 2.0, 1.0)), Err(Error::Regime(_))));
        assert_eq!(fractal_dimension(&p(1.0, 1.0, 1.0)).unwrap(), 1.5);
        assert_eq!(fractal_dimension(&p(1.0, 2.0, 1.0)).unwrap(), 1.0);
        assert_eq!(fractal_dimension(&p(1.0, 1.5, 1.0)).unwrap(), 1.0);
        assert!((holder_exponent(&p(1.0, 0.7, 1.0)).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(holder_exponent(&p(1.0, 1.5, 1.0)).unwrap(), 1.0);
        assert_eq!(holder_exponent(&p(1.0, 3.0, 1.0)).unwrap(), 1.0);
        match srd_tail(&p(0.6, 1.0, 1.0)).unwrap().kind {
            TailKind::PowerLaw { exponent } => assert!((exponent - 2.2).abs() < 1e-15),
            k => panic!("{:?}", k),
        }
        assert!(matches!(srd_tail(&p(1.0, 1.0, 1.0)).unwrap().kind, TailKind::Exponential { .. }));
        assert!(matches!(fractal_dimension(&p(0.5, 0.8, 1.0)), Err(Error::GeneralizedOnly { .. })));
    }

    #[test]
    fn fbm_tangent_examples() {
        assert!((fbm_tangent_covariance(0.5, 2.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(fbm_tangent_covariance(0.3, 0.0, 1.7).unwrap(), 0.0);
        assert!(fbm_tangent_covariance(1.0, 1.0, 1.0).is_err());
    }
}
