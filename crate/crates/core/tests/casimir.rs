use std::f64::consts::PI;

use fracosc::asymptotics::evaluate_expansion;
use fracosc::casimir::*;
use fracosc::QuadratureSpec;
use proptest::prelude::*;

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn sinh_oracle(beta: f64, m: f64, gamma: f64) -> f64 {
    gamma / beta * (2.0 * (beta * m / 2.0).sinh()).ln()
}

fn th(beta: f64, m: f64) -> ThermalParams {
    ThermalParams::new(beta, m, 1.0).unwrap()
}

#[test]
fn alpha_one_matches_sinh_formula_on_grid() {
    let vals = [0.5, 1.0, 2.0, 5.0];
    for &beta in &vals {
        for &m in &vals {
            for &gamma in &vals {
                let f = free_energy(&th(beta, m), 1.0, gamma, &q()).unwrap().f;
                let e = sinh_oracle(beta, m, gamma);
                assert!(((f - e) / e).abs() < 1e-6, "beta {} m {} gamma {}: {} vs {}", beta, m, gamma, f, e);
            }
        }
    }
}

#[test]
fn alpha_one_worked_example() {
    let r = free_energy(&th(2.0, 1.0), 1.0, 1.0, &q()).unwrap();
    let e = 0.5 * (2.0 * 1f64.sinh()).ln();
    assert!((r.f - e).abs() < 1e-9, "{} vs {}", r.f, e);
    assert!((r.f - 0.427).abs() < 1e-3);
    assert_eq!(r.zeta0, 0.0);
    assert_eq!(r.counterterm, 0.0);
    assert!(r.warnings.is_empty());
}

#[test]
fn heat_remainder_matches_jacobi_inversion() {
    for &t in &[0.3, 1.0, 4.0, 20.0, 100.0] {
        let k = heat_remainder(t, 1.0, 1.0).unwrap();
        let dual: f64 = (1..50).map(|n| (-PI * PI * (n * n) as f64 / t).exp()).sum::<f64>() * 2.0 * (PI / t).sqrt();
        assert!((k - dual).abs() < 1e-13 * (1.0 + (PI / t).sqrt()), "t {}: {} vs {}", t, k, dual);
    }
    let t = 1e3;
    let k = heat_remainder(t, 0.7, 1.0).unwrap();
    let g = fracosc::specfun::gamma_fn(1.0 / 1.4).unwrap();
    let limit = 1.0 - g / 0.7 * t.powf(-1.0 / 1.4);
    assert!((k - limit).abs() < 1e-14, "{} vs {}", k, limit);
}

#[test]
fn heat_remainder_is_linear_near_zero() {
    for &t in &[1e-6, 1e-4, 1e-2] {
        assert!(heat_remainder(t, 1.0, 1.0).unwrap().abs() <= t);
    }
    for &(alpha, a) in &[(0.7, 1.0), (0.3, 2.0)] {
        let (t1, t2) = (1e-6, 1e-2);
        let k1 = heat_remainder(t1, alpha, a).unwrap().abs();
        let k2 = heat_remainder(t2, alpha, a).unwrap().abs();
        let slope = (k2 / k1).ln() / (t2 / t1).ln();
        assert!(slope >= 0.9, "alpha {}: slope {}", alpha, slope);
    }
}

fn direct_zeta(s: f64, beta: f64, m: f64, alpha: f64, gamma: f64, n_max: usize) -> f64 {
    let a = 2.0 * PI / beta;
    let e = |x: f64| ((a * x).powf(2.0 * alpha) + m * m).powf(-gamma * s);
    let mut sum: f64 = (1..=n_max).rev().map(|n| e(n as f64)).sum();
    // Tail by the midpoint integral ∫_{N+1/2}^∞ of the leading power.
    let p = 2.0 * alpha * gamma * s;
    sum += a.powf(-p) * (n_max as f64 + 0.5).powf(1.0 - p) / (p - 1.0);
    m.powf(-2.0 * gamma * s) + 2.0 * sum
}

#[test]
fn zeta_value_matches_direct_sum() {
    // Σ_{n∈ℤ}(n²+1)^{−2} summed far out; the tail estimate is exact to O(N^{−5}).
    let e = direct_zeta(2.0, 2.0 * PI, 1.0, 1.0, 1.0, 2_000_000);
    let z = zeta_value(2.0, &th(2.0 * PI, 1.0), 1.0, 1.0, &q()).unwrap();
    assert!((z - e).abs() < 1e-10, "{} vs {}", z, e);

    for &(alpha, gamma, beta, m) in &[(0.7, 1.0, 3.0, 0.8), (0.4, 1.5, 1.0, 1.2), (1.0, 0.6, 2.0, 2.0)] {
        let s = 5.0;
        let e = direct_zeta(s, beta, m, alpha, gamma, 200_000);
        let z = zeta_value(s, &th(beta, m), alpha, gamma, &q()).unwrap();
        assert!((z - e).abs() < 1e-10 * e.abs().max(1.0), "alpha {}: {} vs {}", alpha, z, e);
    }
}

#[test]
fn zeta_value_pole() {
    assert!(matches!(
        zeta_value(0.0, &th(1.0, 1.0), 0.5, 1.0, &q()),
        Err(fracosc::Error::Pole { .. })
    ));
}

#[test]
fn zeta_prime_matches_finite_difference() {
    for &(alpha, gamma, beta, m) in &[(0.7, 1.0, 2.0, 1.0), (0.7, 1.4, 0.7, 2.0)] {
        let t = th(beta, m);
        let h = 1e-5;
        let fd = (zeta_value(h, &t, alpha, gamma, &q()).unwrap() - zeta_value(-h, &t, alpha, gamma, &q()).unwrap()) / (2.0 * h);
        let d = zeta_prime_at_zero(&t, alpha, gamma, &q()).unwrap();
        assert!((fd - d).abs() < 1e-6, "{} vs {}", fd, d);
        let z0 = zeta_value(1e-12, &t, alpha, gamma, &q()).unwrap();
        assert!(z0.abs() < 1e-9);
    }
}

#[test]
fn free_energy_mu_dependence() {
    for &alpha in &[0.25, 0.5, 0.7, 0.3] {
        let a = free_energy(&ThermalParams::new(1.7, 0.9, 0.5).unwrap(), alpha, 1.2, &q()).unwrap();
        let b = free_energy(&ThermalParams::new(1.7, 0.9, 2.0).unwrap(), alpha, 1.2, &q()).unwrap();
        assert!((a.f_ren - b.f_ren).abs() < 1e-12, "alpha {}", alpha);
        if a.lambda_branch.in_lambda {
            assert!((a.f - b.f).abs() > 1e-3);
        } else {
            assert!((a.f - b.f).abs() < 1e-12);
        }
    }
}

#[test]
fn scaling_collapse() {
    for &alpha in &[0.3, 0.5, 0.7] {
        let (beta, m) = (1.3, 0.8);
        let base = free_energy(&th(beta, m), alpha, 1.0, &q()).unwrap().f_ren / m.powf(1.0 / alpha);
        for &c in &[2.0f64, 5.0] {
            let m2 = m * c.powf(alpha);
            let other = free_energy(&th(beta / c, m2), alpha, 1.0, &q()).unwrap().f_ren / m2.powf(1.0 / alpha);
            assert!((base - other).abs() < 1e-8 * (1.0 + base.abs()), "alpha {} c {}: {} vs {}", alpha, c, base, other);
        }
    }
}

#[test]
fn low_temperature_expansion_matches() {
    for &alpha in &[0.3, 0.5, 0.7, 0.9] {
        let t = th(50.0, 1.0);
        let full = free_energy(&t, alpha, 1.0, &q()).unwrap().f_ren;
        let e = free_energy_low_t(&t, alpha, 1.0, 3).unwrap();
        let constant = e.terms[0].coeff;
        // Below α ≈ 0.6 the first T-power correction still exceeds 1e-4 here.
        if alpha >= 0.6 {
            assert!((full - constant).abs() < 1e-4, "alpha {}: {} vs {}", alpha, full, constant);
        }
        let series = evaluate_expansion(&e, 1.0 / 50.0);
        assert!((full - series).abs() < 0.1 * (full - constant).abs().max(1e-9), "alpha {}: {} vs {}", alpha, full, series);
    }
    // α = 0.7 constant: γ m^{1/α} / (2 sin(π/(2α)))
    let e = free_energy_low_t(&th(50.0, 1.0), 0.7, 1.0, 1).unwrap();
    assert!((e.terms[0].coeff - 1.0 / (2.0 * (PI / 1.4).sin())).abs() < 1e-14);
}

#[test]
fn high_temperature_expansion_matches() {
    for &alpha in &[0.6, 0.5, 0.25, 0.35] {
        let m: f64 = 1.3;
        let beta = 0.1 / m.powf(1.0 / alpha);
        let t = th(beta, m);
        let full = free_energy(&t, alpha, 1.0, &q()).unwrap().f_ren;
        let series = evaluate_expansion(&free_energy_high_t(&t, alpha, 1.0, 30).unwrap(), beta);
        assert!(((full - series) / full).abs() < 1e-6, "alpha {}: {} vs {}", alpha, full, series);
    }
    // α = 1 resums to the closed form.
    let t = th(0.8, 2.0);
    let series = evaluate_expansion(&free_energy_high_t(&t, 1.0, 1.5, 40).unwrap(), 0.8);
    let e = sinh_oracle(0.8, 2.0, 1.5);
    assert!(((series - e) / e).abs() < 1e-12, "{} vs {}", series, e);
}

#[test]
fn high_temperature_leading_behaviour() {
    for &alpha in &[0.3, 0.7] {
        let temp = 1e3;
        let f = free_energy(&th(1.0 / temp, 1.0), alpha, 1.0, &q()).unwrap().f_ren;
        let ratio = f / (-alpha * temp * temp.ln());
        assert!((ratio - 1.0).abs() < 0.05, "alpha {}: ratio {}", alpha, ratio);
    }
}

#[test]
fn renormalized_energy_vanishes_at_zero_temperature_and_mass() {
    for &alpha in &[0.25, 0.3, 0.5] {
        let m: f64 = 1e-3;
        let beta = 1e3 / m.powf(1.0 / alpha);
        let f = free_energy(&th(beta, m), alpha, 1.0, &q()).unwrap().f_ren;
        assert!(f.abs() < 1e-5, "alpha {}: {}", alpha, f);
    }
}

#[test]
fn branch_boundary_warns() {
    let r = free_energy(&th(1.0, 1.0), 0.5 + 1e-5, 1.0, &q()).unwrap();
    assert!(!r.lambda_branch.in_lambda);
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn sweep_is_in_grid_order() {
    let rows = sweep(&[0.5, 0.7], 1.0, 1.0, 1.0, &[0.5, 2.0, 8.0], &q()).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!((rows[0].alpha, rows[0].beta_m_scaled), (0.5, 0.5));
    assert_eq!((rows[5].alpha, rows[5].beta_m_scaled), (0.7, 8.0));
    let direct = free_energy(&th(2.0, 1.0), 0.7, 1.0, &q()).unwrap();
    assert_eq!(rows[4].f_ren, direct.f_ren);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn counterterm_removes_mu(beta in 0.2f64..20.0, m in 0.2f64..5.0, mu in 0.05f64..20.0, u in 1u32..4) {
        let alpha = 1.0 / (2.0 * u as f64);
        let a = free_energy(&ThermalParams::new(beta, m, mu).unwrap(), alpha, 1.0, &q()).unwrap();
        let b = free_energy(&ThermalParams::new(beta, m, 1.0 / m).unwrap(), alpha, 1.0, &q()).unwrap();
        prop_assert!((a.f_ren - b.f_ren).abs() < 1e-11 * (1.0 + a.f_ren.abs()));
        // μ = m^{−γ} makes the counterterm vanish.
        prop_assert!(b.counterterm.abs() < 1e-13 * (1.0 + b.f.abs()));
    }
}
