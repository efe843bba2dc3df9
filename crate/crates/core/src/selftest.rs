//! Exact-identity suite. Every check is deterministic and the whole suite
//! runs in a few seconds.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dbm::qt_kernel;
use crate::ensemble::{sample_wigner, EnsembleSpec, EntryLaw};
use crate::error::Result;
use crate::quad::integrate;
use crate::rng::derive_stream;
use crate::semicircle::rho_sc;
use crate::spectral::{eigenvalues, principal_minor, resolvent_diag, schur_diag, SchurParts};
use crate::stieltjes::{fixed_point_residual, interlacing_check, m_sc, self_consistency_from_parts, UpperHalfPoint};

const SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed violation.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &'static str, worst: f64, tolerance: f64, detail: String) -> Check {
    Check {
        name,
        passed: worst <= tolerance,
        worst,
        tolerance,
        detail,
    }
}

fn errored(name: &'static str, tolerance: f64, err: crate::Error) -> Check {
    Check {
        name,
        passed: false,
        worst: f64::INFINITY,
        tolerance,
        detail: err.to_string(),
    }
}

/// Runs the suite against the library's semicircle density.
pub fn selftest() -> SelftestReport {
    selftest_with(&rho_sc)
}

/// Runs the suite with `density` standing in for the semicircle density in
/// the normalization and Stieltjes checks.
pub fn selftest_with(density: &dyn Fn(f64) -> f64) -> SelftestReport {
    let mut checks = Vec::new();
    let mats = || -> Result<Vec<_>> {
        let mut out = Vec::new();
        for (k, law) in [EntryLaw::gaussian(), EntryLaw::rademacher()].into_iter().enumerate() {
            let spec = EnsembleSpec::new(60, law, 0.0, SEED)?;
            out.push(sample_wigner::<f64>(&spec, &mut derive_stream(SEED, k as u64))?);
        }
        Ok(out)
    };
    let mats = match mats() {
        Ok(m) => m,
        Err(e) => {
            checks.push(errored("sampling", 0.0, e));
            return SelftestReport { checks };
        }
    };
    let zs = [C64::new(0.0, 0.05), C64::new(-1.3, 0.01), C64::new(2.5, 0.3), C64::new(0.7, 1.0)];

    let schur_checks = match schur(&mats, &zs) {
        Ok((schur_err, sc_err)) => vec![
            check(
                "schur diagonal identity",
                schur_err,
                1e-8,
                "relative gap between the Schur formula and a direct solve".into(),
            ),
            check(
                "self-consistent resolvent form",
                sc_err,
                1e-8,
                "relative gap of -1/(z + m_N + X) to the direct solve".into(),
            ),
        ],
        Err(e) => vec![errored("schur diagonal identity", 1e-8, e)],
    };
    checks.extend(schur_checks);

    checks.push(match interlacing(&mats) {
        Ok(bad) => check(
            "cauchy interlacing",
            bad as f64,
            0.0,
            format!("{bad} minors violate interlacing"),
        ),
        Err(e) => errored("cauchy interlacing", 0.0, e),
    });

    checks.push(match traces(&mats) {
        Ok(w) => check("trace identities", w, 1e-10, "relative error of sum lambda^k vs tr H^k, k = 1, 2".into()),
        Err(e) => errored("trace identities", 1e-10, e),
    });

    let mut worst = 0.0f64;
    let mut points = 0;
    for i in 0..40 {
        let e = -3.0 + 6.0 * i as f64 / 39.0;
        for k in 0..25 {
            let eta = 10f64.powf(-3.0 + 4.0 * k as f64 / 24.0);
            let z = UpperHalfPoint::new(e, eta).expect("eta > 0");
            match fixed_point_residual(m_sc(&z), &z) {
                Ok(r) => worst = worst.max(r),
                Err(_) => worst = f64::INFINITY,
            }
            points += 1;
        }
    }
    checks.push(check("m_sc fixed point", worst, 1e-12, format!("max residual over {points} points")));

    // theta-substitution keeps the square-root edges smooth
    let on_circle = |f: &dyn Fn(f64) -> C64| -> C64 {
        let half = std::f64::consts::FRAC_PI_2;
        let re = integrate(|th| f(2.0 * th.sin()).re * 2.0 * th.cos(), -half, half, 64, 16);
        let im = integrate(|th| f(2.0 * th.sin()).im * 2.0 * th.cos(), -half, half, 64, 16);
        C64::new(re, im)
    };
    let mass = on_circle(&|x| C64::new(density(x), 0.0)).re;
    checks.push(check(
        "density normalization",
        (mass - 1.0).abs(),
        1e-10,
        format!("integral of the density = {mass}"),
    ));
    let mut worst = 0.0f64;
    for (e, eta) in [(0.0, 1.0), (-0.8, 0.5), (1.4, 2.0), (3.0, 0.7)] {
        let z = C64::new(e, eta);
        let m = on_circle(&|x| density(x) / (x - z));
        let want = m_sc(&UpperHalfPoint::new(e, eta).expect("eta > 0"));
        worst = worst.max((m - want).norm());
    }
    checks.push(check(
        "density stieltjes transform",
        worst,
        1e-10,
        "integral of rho/(x - z) against the closed-form m_sc".into(),
    ));

    let mut worst = 0.0f64;
    for &(x, y, t) in &[(0.3f64, -0.2f64, 0.5f64), (1.7, 0.0, 0.1), (-2.0, 1.0, 2.0), (0.0, 0.0, 1.0)] {
        let want = (-(x - y) * (x - y) / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt();
        match qt_kernel(&[x], &[y], t) {
            Ok(v) => worst = worst.max((v - want).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    checks.push(check("q_t heat kernel reduction", worst, 1e-12, "N = 1 transition density vs heat kernel".into()));

    SelftestReport { checks }
}

type Mat = crate::matrix::HermitianMatrix<f64>;

fn schur(mats: &[Mat], zs: &[C64]) -> Result<(f64, f64)> {
    let mut worst = 0.0f64;
    let mut worst_sc = 0.0f64;
    for h in mats {
        let eigs = eigenvalues(h)?;
        for j in [0, 17, h.n() - 1] {
            let parts = SchurParts::new(h, j)?;
            for &z in zs {
                let direct = resolvent_diag(h, z, j)?;
                let via = schur_diag(h, z, j)?;
                worst = worst.max((via - direct).norm() / direct.norm());
                let p = UpperHalfPoint::new(z.re, z.im)?;
                let sc = self_consistency_from_parts(&eigs, &parts, &p).resolvent(&p);
                worst_sc = worst_sc.max((sc - direct).norm() / direct.norm());
            }
        }
    }
    Ok((worst, worst_sc))
}

fn interlacing(mats: &[Mat]) -> Result<usize> {
    let mut bad = 0;
    for h in mats {
        let eigs = eigenvalues(h)?;
        for j in [0, 5, 31, h.n() - 1] {
            let minor = eigenvalues(&principal_minor(h, j)?)?;
            if !interlacing_check(&eigs, &minor)? {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn traces(mats: &[Mat]) -> Result<f64> {
    let mut worst = 0.0f64;
    for h in mats {
        let eigs = eigenvalues(h)?;
        let s1: f64 = eigs.iter().sum();
        let s2: f64 = eigs.iter().map(|l| l * l).sum();
        let scale = h.trace_sq().max(1.0);
        worst = worst.max((s1 - h.trace()).abs() / scale);
        worst = worst.max((s2 - h.trace_sq()).abs() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_suite_passes() {
        let r = selftest();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn corrupted_density_constant_is_caught() {
        let bad = |e: f64| if e.abs() < 2.0 { (4.0 - e * e).sqrt() / (2.0 * 3.0) } else { 0.0 };
        let r = selftest_with(&bad);
        assert!(!r.passed());
        let names: Vec<_> = r.failures().map(|c| c.name).collect();
        assert!(names.contains(&"density normalization"), "{names:?}");
    }

    #[test]
    fn reruns_are_identical() {
        assert_eq!(selftest(), selftest());
    }
}
