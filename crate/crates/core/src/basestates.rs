//! Assembly of the unextended bound states in polar coordinates: angular
//! factors built on Jacobi polynomials, radial factors on generalized
//! Laguerre polynomials, and full two-dimensional evaluation.

use crate::error::{Error, Result};
use crate::orthopoly::{jacobi, laguerre, log_gamma, Polynomial};
use crate::params::{Parameters, QuantumNumbers, SectorLabel};
use crate::quasiforms::{AngularForm, RadialForm};

/// Separation constant M^2 = 4n(n + mu1 + mu2), with n = n2/2.
pub fn separation_constant(n2: u32, p: &Parameters) -> f64 {
    let n2 = n2 as f64;
    n2 * (n2 + 2.0 * p.mu_sum())
}

/// Angular eigenfunction of the sector-reduced angular operator with
/// eigenvalue M^2/2; unit-normalized against the |cos|^{2mu1}|sin|^{2mu2}
/// weight on (0, 2 pi).
pub fn angular_state(sector: SectorLabel, n2: u32, p: &Parameters) -> Result<AngularForm> {
    let qn = QuantumNumbers::new(sector, n2, 0)?;
    let nu = qn.jacobi_degree();
    let (e1, e2) = (sector.eps1() as f64, sector.eps2() as f64);
    let n = qn.n();
    let a = p.mu1() + e1 - 0.5;
    let b = p.mu2() + e2 - 0.5;
    let poly = jacobi(nu, a, b)?;

    // prefactor^2 = (2n + mu) nu! Gamma(n + mu + (e1+e2)/2)
    //             / (2 Gamma(n + mu1 + (1+e1-e2)/2) Gamma(n + mu2 + (1+e2-e1)/2))
    // The n = 0 pairing (2n+mu) Gamma(n+mu) = Gamma(mu+1) keeps the log-space
    // path valid when mu1 + mu2 <= 0.
    let mu = p.mu_sum();
    let front = if n2 == 0 {
        log_gamma(mu + 1.0)?
    } else {
        (n2 as f64 + mu).ln() + log_gamma(n + mu + 0.5 * (e1 + e2))?
    };
    let ln_num = front + log_gamma(nu as f64 + 1.0)?;
    let ln_den = std::f64::consts::LN_2
        + log_gamma(n + p.mu1() + 0.5 * (1.0 + e1 - e2))?
        + log_gamma(n + p.mu2() + 0.5 * (1.0 + e2 - e1))?;
    let c = (0.5 * (ln_num - ln_den)).exp();
    AngularForm::new(c, e1, e2, poly, Polynomial::one())
}

/// Radial eigenfunction c rho^{2n} e^{-rho^2/2} L_k^{(alpha)}(rho^2) with
/// c = sqrt(2 k! / Gamma(k + alpha + 1)), alpha = 2n + mu1 + mu2.
pub fn radial_state(k: u32, n2: u32, p: &Parameters) -> RadialForm {
    let alpha = n2 as f64 + p.mu_sum();
    let ln_c2 = std::f64::consts::LN_2 + log_gamma(k as f64 + 1.0).expect("k + 1 > 0")
        - log_gamma(k as f64 + alpha + 1.0).expect("k + alpha + 1 > 0");
    let c = (0.5 * ln_c2).exp();
    RadialForm::new(c, n2 as f64, true, laguerre(k, alpha), Polynomial::one())
        .expect("unit denominator always certifies")
}

/// A complete bound state: radial and angular factors with consistent
/// energy and separation constant.
#[derive(Debug, Clone)]
pub struct BoundState {
    qn: QuantumNumbers,
    radial: RadialForm,
    angular: AngularForm,
    energy: f64,
    msq: f64,
}

impl BoundState {
    pub fn qn(&self) -> &QuantumNumbers {
        &self.qn
    }

    pub fn radial(&self) -> &RadialForm {
        &self.radial
    }

    pub fn angular(&self) -> &AngularForm {
        &self.angular
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn msq(&self) -> f64 {
        self.msq
    }

    /// Psi(x1, x2) = R(rho) Phi(phi) with the branch cut of phi on the
    /// positive x1-axis; the origin is excluded.
    pub fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        let rho = x1.hypot(x2);
        if rho == 0.0 {
            return Err(Error::domain("wavefunction undefined at the origin"));
        }
        let mut phi = x2.atan2(x1);
        if phi <= 0.0 {
            phi += 2.0 * std::f64::consts::PI;
        }
        Ok(self.radial.eval(rho, 0)? * self.angular.eval(phi, 0)?)
    }
}

/// Build the bound state for a validated set of quantum numbers.
pub fn assemble(qn: QuantumNumbers, p: &Parameters) -> Result<BoundState> {
    let angular = angular_state(qn.sector(), qn.n2(), p)?;
    let radial = radial_state(qn.k(), qn.n2(), p);
    Ok(BoundState {
        qn,
        radial,
        angular,
        energy: qn.energy(p),
        msq: qn.msq(p),
    })
}
