//! Quick oracle suite: each check compares two independent
//! representations of the same quantity.

use std::f64::consts::PI;

use fracosc::casimir::{self, ThermalParams};
use fracosc::covariance::{self, CovarianceRoute};
use fracosc::dynamics;
use fracosc::{ProcessParams, QuadratureSpec};

use crate::{check_report, Check, CliResult, Report};

fn check(name: &str, value: f64, reference: f64, tolerance: f64, relative: bool) -> Check {
    let error = if relative { ((value - reference) / reference).abs() } else { (value - reference).abs() };
    Check { name: name.to_string(), value, reference, error, tolerance, passed: error <= tolerance }
}

pub(crate) fn run(q: &QuadratureSpec) -> CliResult<Report> {
    let mut checks = Vec::new();

    let ou = ProcessParams::new(1.0, 1.0, 2.0)?;
    checks.push(check("OU covariance at t = 1", covariance::covariance(&ou, 1.0, q)?, (-2.0f64).exp() / 4.0, 1e-10, true));

    let p = ProcessParams::new(1.0, 1.5, 1.0)?;
    checks.push(check(
        "Laplace quadrature vs Bessel closed form",
        covariance::covariance_quadrature(&p, 0.7, q, CovarianceRoute::Laplace)?,
        covariance::covariance_closed_alpha1(1.5, 1.0, 0.7)?,
        1e-8,
        true,
    ));

    let p = ProcessParams::new(0.75, 1.6, 1.0)?;
    let spectral = fracosc::quad::semi_infinite(|w| covariance::spectral_density(&p, w), 0.0, &[1.0, 4.0], 4.0, 1e-14, 1e-12, 2000);
    checks.push(check("variance vs spectral integral", covariance::variance(&p)?, 2.0 * spectral.value, 1e-9, true));

    let p = ProcessParams::new(0.8, 1.0, 1.0)?;
    let (b, _) = dynamics::fd_coefficient(&p, 0.7)?;
    checks.push(check("fluctuation-dissipation round trip", dynamics::equipartition_variance(&p, b)?, 0.7f64.powf(0.8), 1e-12, true));

    let th = ThermalParams::new(2.0, 1.0, 1.0)?;
    let f = casimir::free_energy(&th, 1.0, 1.0, q)?.f;
    checks.push(check("zeta-route free energy vs sinh formula", f, 0.5 * (2.0 * 1f64.sinh()).ln(), 1e-8, true));

    let th = ThermalParams::new(2.0 * PI, 2.0, 1.0)?;
    checks.push(check("zeta(0) on the even-reciprocal branch", casimir::zeta_at_zero(&th, 0.5, 1.0)?, -8.0, 1e-12, false));

    let a = casimir::free_energy(&ThermalParams::new(1.3, 0.8, 1.0)?, 0.7, 1.0, q)?.f_ren / 0.8f64.powf(1.0 / 0.7);
    let m2 = 0.8 * 2f64.powf(0.7);
    let b = casimir::free_energy(&ThermalParams::new(0.65, m2, 1.0)?, 0.7, 1.0, q)?.f_ren / m2.powf(1.0 / 0.7);
    checks.push(check("scaling collapse of F_ren", b, a, 1e-8, false));

    Ok(check_report(checks))
}
