//! The X_1-Jacobi extension of the angular equation: extended
//! Poschl-Teller potential, the projector-weighted K terms with their
//! Cartesian forms, L and F combinations, the extended Hamiltonian in its
//! three operator forms, and the extended angular eigenstates.

use crate::error::{Error, Result};
use crate::linalg; // kernel machinery shared with the radial solver
use crate::orthopoly::{log_gamma, Polynomial};
use crate::params::{Parameters, QuantumNumbers, SectorLabel};
use crate::quasiforms::AngularForm;
use crate::radial_ext::{solve_kernel, NullspaceMode};
use crate::ratpoly::{rat_from_f64, rat_int, rp_add, rp_deriv, rp_mul, rp_scale, rp_sub, Rat};
use crate::verify::{converged_integral, gauss_rule, CField, WeightFamily};
use num::{One, Zero};

// ---------------------------------------------------------------------------
// extended PT I potential
// ---------------------------------------------------------------------------

/// Rationally extended trigonometric Poschl-Teller potential
/// V_{A,B}(x) + 8(A+B-1)/D - 8(2A-1)(2B-1)/D^2, D = A+B-1+(B-A)cos 2x.
pub fn pt1_extended_potential(a_cap: f64, b_cap: f64, x: f64) -> Result<f64> {
    if a_cap == b_cap {
        return Err(Error::DegenerateParameters(format!(
            "extension vanishes identically at A = B = {a_cap}"
        )));
    }
    if a_cap.min(b_cap) <= 0.5 {
        return Err(Error::SingularExtension(format!(
            "denominator of the extension vanishes unless min(A, B) > 1/2 (A = {a_cap}, B = {b_cap})"
        )));
    }
    let (c, s) = (x.cos(), x.sin());
    let v = a_cap * (a_cap - 1.0) / (c * c) + b_cap * (b_cap - 1.0) / (s * s);
    let d = a_cap + b_cap - 1.0 + (b_cap - a_cap) * (2.0 * x).cos();
    Ok(v + 8.0 * (a_cap + b_cap - 1.0) / d - 8.0 * (2.0 * a_cap - 1.0) * (2.0 * b_cap - 1.0) / (d * d))
}

// ---------------------------------------------------------------------------
// K, L and F terms
// ---------------------------------------------------------------------------

/// Projector coefficient K_{m1,m2}; its Cartesian denominator
/// (2 m2 - 1) x1^2 + (2 m1 - 1) x2^2 must be sign-definite.
#[derive(Debug, Clone, Copy)]
pub struct KTerm {
    m1: f64,
    m2: f64,
}

impl KTerm {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        if (2.0 * m1 - 1.0) * (2.0 * m2 - 1.0) <= 0.0 {
            return Err(Error::SingularExtension(format!(
                "K denominator is sign-indefinite unless m1, m2 lie on the same side of 1/2 \
                 (m1 = {m1}, m2 = {m2})"
            )));
        }
        Ok(KTerm { m1, m2 })
    }

    fn delta(&self, x1: f64, x2: f64) -> f64 {
        (2.0 * self.m2 - 1.0) * x1 * x1 + (2.0 * self.m1 - 1.0) * x2 * x2
    }

    /// First Cartesian form.
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let d = self.delta(x1, x2);
        (self.m1 + self.m2 - 1.0) / d
            - (2.0 * self.m1 - 1.0) * (2.0 * self.m2 - 1.0) * (x1 * x1 + x2 * x2) / (d * d)
    }

    /// All three algebraically equivalent Cartesian forms.
    pub fn eval_forms(&self, x1: f64, x2: f64) -> [f64; 3] {
        let d = self.delta(x1, x2);
        let f1 = self.eval(x1, x2);
        let f2 = (self.m2 - self.m1)
            * (1.0 / d - 2.0 * (2.0 * self.m1 - 1.0) * x2 * x2 / (d * d));
        let f3 = (self.m1 - self.m2)
            * (1.0 / d - 2.0 * (2.0 * self.m2 - 1.0) * x1 * x1 / (d * d));
        [f1, f2, f3]
    }

    /// Polar form (1/rho^2)[(m1+m2-1)/Dp - (2m1-1)(2m2-1)/Dp^2] with
    /// Dp = m1 + m2 - 1 - (m1 - m2) cos 2 phi.
    pub fn eval_polar(&self, rho: f64, phi: f64) -> f64 {
        let dp = self.m1 + self.m2 - 1.0 - (self.m1 - self.m2) * (2.0 * phi).cos();
        ((self.m1 + self.m2 - 1.0) / dp
            - (2.0 * self.m1 - 1.0) * (2.0 * self.m2 - 1.0) / (dp * dp))
            / (rho * rho)
    }
}

/// K_{m1,m2}(x1, x2), first Cartesian form.
pub fn k_term(m1: f64, m2: f64, x1: f64, x2: f64) -> Result<f64> {
    if x1 == 0.0 && x2 == 0.0 {
        return Err(Error::domain("K term undefined at the origin"));
    }
    Ok(KTerm::new(m1, m2)?.eval(x1, x2))
}

/// L^{(p,q)} = K_{mu1,mu2} + (-1)^p K_{mu1+1,mu2} + (-1)^q K_{mu1,mu2+1}
/// + (-1)^{p+q} K_{mu1+1,mu2+1}.
pub fn l_term(p_idx: u8, q_idx: u8, params: &Parameters, x1: f64, x2: f64) -> Result<f64> {
    if p_idx > 1 || q_idx > 1 {
        return Err(Error::domain("L indices must be 0 or 1"));
    }
    let (m1, m2) = (params.mu1(), params.mu2());
    let sp = if p_idx == 0 { 1.0 } else { -1.0 };
    let sq = if q_idx == 0 { 1.0 } else { -1.0 };
    Ok(k_term(m1, m2, x1, x2)?
        + sp * k_term(m1 + 1.0, m2, x1, x2)?
        + sq * k_term(m1, m2 + 1.0, x1, x2)?
        + sp * sq * k_term(m1 + 1.0, m2 + 1.0, x1, x2)?)
}

/// Shifted-parameter component of the extended Dunkl derivative:
/// F_1 = (m2 - m1) x1 / Delta, F_2 = (m1 - m2) x2 / Delta.
pub fn f_component(i: u8, m1: f64, m2: f64, x1: f64, x2: f64) -> Result<f64> {
    let k = KTerm::new(m1, m2)?;
    let d = k.delta(x1, x2);
    match i {
        1 => Ok((m2 - m1) * x1 / d),
        2 => Ok((m1 - m2) * x2 / d),
        _ => Err(Error::domain("component index must be 1 or 2")),
    }
}

/// d F_i^{(m1,m2)} / d x_i, by the quotient rule on the explicit form.
fn f_component_partial(i: u8, m1: f64, m2: f64, x1: f64, x2: f64) -> Result<f64> {
    let k = KTerm::new(m1, m2)?;
    let d = k.delta(x1, x2);
    match i {
        1 => Ok((m2 - m1) * (d - 2.0 * (2.0 * m2 - 1.0) * x1 * x1) / (d * d)),
        2 => Ok((m1 - m2) * (d - 2.0 * (2.0 * m1 - 1.0) * x2 * x2) / (d * d)),
        _ => Err(Error::domain("component index must be 1 or 2")),
    }
}

fn f_signs(i: u8) -> [f64; 4] {
    // F_i = F^{(mu1,mu2)} + (-1)^i F^{(mu1+1,mu2)} - (-1)^i F^{(mu1,mu2+1)} - F^{(mu1+1,mu2+1)}
    let si = if i == 1 { -1.0 } else { 1.0 };
    [1.0, si, -si, -1.0]
}

/// F_i assembled from its four shifted components.
pub fn f_term(i: u8, params: &Parameters, x1: f64, x2: f64) -> Result<f64> {
    let (m1, m2) = (params.mu1(), params.mu2());
    let shifts = [
        (m1, m2),
        (m1 + 1.0, m2),
        (m1, m2 + 1.0),
        (m1 + 1.0, m2 + 1.0),
    ];
    let signs = f_signs(i);
    let mut total = 0.0;
    for (s, (a, b)) in signs.iter().zip(shifts.iter()) {
        total += s * f_component(i, *a, *b, x1, x2)?;
    }
    Ok(total)
}

fn f_term_partial(i: u8, params: &Parameters, x1: f64, x2: f64) -> Result<f64> {
    let (m1, m2) = (params.mu1(), params.mu2());
    let shifts = [
        (m1, m2),
        (m1 + 1.0, m2),
        (m1, m2 + 1.0),
        (m1 + 1.0, m2 + 1.0),
    ];
    let signs = f_signs(i);
    let mut total = 0.0;
    for (s, (a, b)) in signs.iter().zip(shifts.iter()) {
        total += s * f_component_partial(i, *a, *b, x1, x2)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// X_1-Jacobi exceptional polynomials
// ---------------------------------------------------------------------------

/// Residual system for the ansatz cos^A x sin^B x y(t)/D(t), t = -cos 2x,
/// under the extended PT I potential at the target energy.
fn angular_system(a: &Rat, b: &Rat, degree: u32, energy: &Rat) -> Vec<Vec<Rat>> {
    let delta = b - a;
    let sigma = a + b;
    let dpoly = vec![sigma.clone(), -delta.clone()];
    let dprime = -delta.clone();
    let two = rat_int(2);
    let four = rat_int(4);
    // (A + B)^2 with A = a + 1/2, B = b + 1/2
    let apb = &sigma + Rat::one();
    let apb_sq = &apb * &apb;
    let ab4 = (&four * a) * b; // (2A-1)(2B-1) = 4ab at A = a+1/2, B = b+1/2
    let one_mt2 = vec![Rat::one(), Rat::zero(), -Rat::one()];
    let lin = vec![delta.clone(), -(&sigma + &two)];
    let dd = rp_mul(&dpoly, &dpoly);
    let rows = degree as usize + 3;
    let cols = degree as usize + 1;
    let mut mat = vec![vec![Rat::zero(); cols]; rows];
    for j in 0..cols {
        let mut y = vec![Rat::zero(); j + 1];
        y[j] = Rat::one();
        let yd = rp_deriv(&y);
        let ydd = rp_deriv(&yd);
        // (1 - t^2)(y'' D^2 - 2 D' y' D + 2 D'^2 y)
        let part1 = rp_mul(
            &one_mt2,
            &rp_add(
                &rp_sub(
                    &rp_mul(&ydd, &dd),
                    &rp_scale(&rp_mul(&yd, &dpoly), &(&two * &dprime)),
                ),
                &rp_scale(&y, &(&two * &dprime * &dprime)),
            ),
        );
        // (delta - (sigma + 2) t)(y' D^2 - D' y D)
        let part2 = rp_mul(
            &lin,
            &rp_sub(
                &rp_mul(&yd, &dd),
                &rp_scale(&rp_mul(&y, &dpoly), &dprime),
            ),
        );
        let t12 = rp_scale(&rp_add(&part1, &part2), &rat_int(-4));
        let t3 = rp_scale(&rp_mul(&y, &dd), &(&apb_sq - energy));
        let t4 = rp_sub(
            &rp_scale(&rp_mul(&y, &dpoly), &(rat_int(8) * &sigma)),
            &rp_scale(&y, &(rat_int(8) * &ab4)),
        );
        let res = rp_add(&rp_add(&t12, &t3), &t4);
        for (i, c) in res.into_iter().enumerate() {
            if i < rows {
                mat[i][j] = c;
            }
        }
    }
    mat
}

fn x1_admissibility(a: f64, b: f64) -> Result<()> {
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::domain(format!(
            "Jacobi parameters must exceed -1, got a = {a}, b = {b}"
        )));
    }
    if a == b {
        return Err(Error::DegenerateParameters(format!(
            "X_1-Jacobi extension degenerates at a = b = {a}"
        )));
    }
    if a.min(b) <= -0.5 {
        return Err(Error::SingularExtension(format!(
            "extension denominator vanishes unless min(a, b) > -1/2 (a = {a}, b = {b})"
        )));
    }
    Ok(())
}

/// Degree-(nu+1) X_1-Jacobi polynomial: the numerator of the quasi-rational
/// eigenfunction of the extended PT I potential at E = (A + B + 2 nu)^2.
/// Scaled so the assembled eigenfunction has unit norm on (0, pi/2) with the
/// plain measure, positive leading coefficient.
pub fn x1_jacobi(nu_plus_1: u32, a: f64, b: f64) -> Result<Polynomial> {
    x1_jacobi_impl(nu_plus_1, a, b, None)
}

/// Same construction at an arbitrary target energy. Values within 1e-12
/// relative of the quantized (A + B + 2 nu)^2 are snapped to it exactly;
/// anything further collapses the kernel.
pub fn x1_jacobi_with_energy(nu_plus_1: u32, a: f64, b: f64, energy: f64) -> Result<Polynomial> {
    x1_jacobi_impl(nu_plus_1, a, b, Some(energy))
}

fn x1_jacobi_impl(
    nu_plus_1: u32,
    a: f64,
    b: f64,
    energy_override: Option<f64>,
) -> Result<Polynomial> {
    x1_admissibility(a, b)?;
    if nu_plus_1 == 0 {
        return Err(Error::domain("X_1-Jacobi degree starts at 1"));
    }
    let ar = rat_from_f64(a);
    let br = rat_from_f64(b);
    // exact quantized energy (a + b + 1 + 2 nu)^2 over the dyadic a, b
    let root = &ar + &br + rat_int(2 * (nu_plus_1 as i64 - 1) + 1);
    let energy_exact = &root * &root;
    let er = match energy_override {
        None => energy_exact,
        Some(e) => {
            let nu = (nu_plus_1 - 1) as f64;
            let formula = (a + b + 1.0 + 2.0 * nu) * (a + b + 1.0 + 2.0 * nu);
            if (e - formula).abs() <= 1e-12 * formula.abs().max(1.0) {
                energy_exact
            } else {
                rat_from_f64(e)
            }
        }
    };
    let system = angular_system(&ar, &br, nu_plus_1, &er);
    let coeffs = solve_kernel(
        &system,
        NullspaceMode::Both,
        &format!("X_1-Jacobi nu+1={nu_plus_1} a={a} b={b}"),
    )?;
    let mut poly = Polynomial::new(coeffs);
    if poly.degree() != nu_plus_1 as usize {
        return Err(Error::NullspaceDimension {
            dim: 1,
            context: format!(
                "kernel degree {} differs from nu+1 = {nu_plus_1}",
                poly.degree()
            ),
        });
    }
    if poly.leading() < 0.0 {
        poly = poly.scaled(-1.0);
    }
    // unit norm of cos^A sin^B P/D on (0, pi/2):
    // 2^{-a-b-2} * integral (1-t)^a (1+t)^b (P/D)^2 dt
    let den = Polynomial::new(vec![a + b, -(b - a)]);
    let norm_sq = 2f64.powf(-a - b - 2.0)
        * converged_integral(
            WeightFamily::Jacobi { a, b },
            4 * (nu_plus_1 as usize + 1) + 60,
            |t| {
                let v = poly.eval(t) / den.eval(t);
                v * v
            },
        )?;
    if !(norm_sq > 0.0) {
        return Err(Error::Construction(format!(
            "non-positive norm {norm_sq} for X_1-Jacobi nu+1={nu_plus_1}"
        )));
    }
    Ok(poly.scaled(1.0 / norm_sq.sqrt()))
}

// ---------------------------------------------------------------------------
// extended angular states
// ---------------------------------------------------------------------------

/// Extended angular eigenstate with degree-1 denominator; the separation
/// constant is untouched by the extension.
#[derive(Debug, Clone)]
pub struct ExtendedAngularState {
    sector: SectorLabel,
    n2: u32,
    form: AngularForm,
    msq: f64,
    closed_form_prefactor: f64,
}

impl ExtendedAngularState {
    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn form(&self) -> &AngularForm {
        &self.form
    }

    pub fn msq(&self) -> f64 {
        self.msq
    }

    /// The closed-form normalization prefactor (sign included); the stored
    /// form uses the quadrature-anchored scale and records this value for
    /// cross-checking.
    pub fn closed_form_prefactor(&self) -> f64 {
        self.closed_form_prefactor
    }
}

fn sector_caps(sector: SectorLabel, p: &Parameters) -> (f64, f64) {
    (
        p.mu1() + sector.eps1() as f64,
        p.mu2() + sector.eps2() as f64,
    )
}

fn check_sector_admissibility(sector: SectorLabel, p: &Parameters) -> Result<(f64, f64)> {
    let (a_cap, b_cap) = sector_caps(sector, p);
    if b_cap - a_cap == 0.0 {
        return Err(Error::DegenerateParameters(format!(
            "mu2 - mu1 + eps2 - eps1 = 0 in sector {sector} at mu = ({}, {})",
            p.mu1(),
            p.mu2()
        )));
    }
    if a_cap.min(b_cap) <= 0.5 {
        return Err(Error::SingularExtension(format!(
            "extension denominator vanishes in sector {sector}: min(mu1+eps1, mu2+eps2) <= 1/2"
        )));
    }
    Ok((a_cap, b_cap))
}

/// Closed-form prefactor of the extended angular state (sign included),
/// computed in log space.
fn closed_form_prefactor(sector: SectorLabel, n2: u32, p: &Parameters) -> Result<f64> {
    let (e1, e2) = (sector.eps1() as f64, sector.eps2() as f64);
    let n = n2 as f64 / 2.0;
    let mu = p.mu_sum();
    let nu = (n2 - sector.eps1() as u32 - sector.eps2() as u32) / 2;
    let ln_num = std::f64::consts::LN_2
        + (n2 as f64 + mu).ln()
        + log_gamma(nu as f64 + 1.0)?
        + log_gamma(n + mu + 0.5 * (e1 + e2))?;
    let ln_den = (n + p.mu1() + 0.5 * (1.0 + e1 - e2)).ln()
        + (n + p.mu2() + 0.5 * (1.0 + e2 - e1)).ln()
        + log_gamma(n + p.mu1() + 0.5 * (e1 - e2 - 1.0))?
        + log_gamma(n + p.mu2() + 0.5 * (e2 - e1 - 1.0))?;
    let magnitude = (0.5 * (ln_num - ln_den)).exp();
    let sign_factor = p.mu2() - p.mu1() + e2 - e1;
    Ok(sign_factor.signum() * sign_factor.abs() * magnitude)
}

/// Closed-form prefactor of the extended PT I eigenfunction at the same
/// substituted arguments; the paper-level relation fixes the ratio of the
/// two constants at 1/2.
pub fn pt1_prefactor(a_cap: f64, b_cap: f64, nu: u32) -> Result<f64> {
    let nuf = nu as f64;
    let ln_num = (8.0f64).ln()
        + (a_cap + b_cap + 2.0 * nuf).ln()
        + log_gamma(nuf + 1.0)?
        + log_gamma(a_cap + b_cap + nuf)?;
    let ln_den = (a_cap + nuf + 0.5).ln()
        + (b_cap + nuf + 0.5).ln()
        + log_gamma(a_cap + nuf - 0.5)?
        + log_gamma(b_cap + nuf - 0.5)?;
    Ok((b_cap - a_cap) * (0.5 * (ln_num - ln_den)).exp())
}

/// Ratio of the extended angular closed-form prefactor to the substituted
/// PT I one; equals 1/2 when the two normalizations are consistent.
pub fn prefactor_consistency_ratio(sector: SectorLabel, n2: u32, p: &Parameters) -> Result<f64> {
    let (a_cap, b_cap) = check_sector_admissibility(sector, p)?;
    let qn = QuantumNumbers::new(sector, n2, 0)?;
    let c30 = closed_form_prefactor(sector, n2, p)?;
    let c_pt1 = pt1_prefactor(a_cap, b_cap, qn.jacobi_degree())?;
    Ok(c30 / c_pt1)
}

/// Assemble the extended angular state. The polynomial carries the
/// quadrature-anchored scale; the closed-form prefactor is recorded on the
/// state for the verify-then-trust comparison.
pub fn extended_angular_state(
    sector: SectorLabel,
    n2: u32,
    p: &Parameters,
) -> Result<ExtendedAngularState> {
    let (a_cap, b_cap) = check_sector_admissibility(sector, p)?;
    let qn = QuantumNumbers::new(sector, n2, 0)?;
    let a = a_cap - 0.5;
    let b = b_cap - 0.5;
    let nu = qn.jacobi_degree();
    let poly = x1_jacobi(nu + 1, a, b)?;
    let den = Polynomial::new(vec![a + b, -(b - a)]);
    // Phi = (sign/2) cos^{eps1} sin^{eps2} P(t)/D(t): the 1/2 folds the
    // quarter-circle PT I normalization onto (0, 2 pi).
    let c = 0.5 * (b_cap - a_cap).signum();
    let form = AngularForm::new(
        c,
        sector.eps1() as f64,
        sector.eps2() as f64,
        poly,
        den,
    )?;
    Ok(ExtendedAngularState {
        sector,
        n2,
        form,
        msq: crate::basestates::separation_constant(n2, p),
        closed_form_prefactor: closed_form_prefactor(sector, n2, p)?,
    })
}

/// The phi-only potential added to the sector-reduced angular operator by
/// the extension, at unit operator scale: 4 [ (A+B-1)/D - (2A-1)(2B-1)/D^2 ].
pub fn sector_extension_potential(
    sector: SectorLabel,
    p: &Parameters,
    scale: f64,
) -> Result<impl Fn(f64) -> f64> {
    let (a_cap, b_cap) = check_sector_admissibility(sector, p)?;
    Ok(move |phi: f64| {
        let d = a_cap + b_cap - 1.0 + (b_cap - a_cap) * (2.0 * phi).cos();
        scale
            * 4.0
            * ((a_cap + b_cap - 1.0) / d
                - (2.0 * a_cap - 1.0) * (2.0 * b_cap - 1.0) / (d * d))
    })
}

// ---------------------------------------------------------------------------
// the three operator forms of H_ext
// ---------------------------------------------------------------------------

/// Operator form selector for the extended Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HExtForm {
    /// K terms times reflection projectors.
    Projectors,
    /// L^{(p,q)} combinations times reflection products.
    LTerms,
    /// Extended Dunkl derivatives with G compensators.
    DunklHat,
}

/// Unextended Hamiltonian applied through exact derivatives and mirrored
/// evaluations.
pub fn apply_h_base(f: &dyn CField, p: &Parameters, x1: f64, x2: f64) -> Result<f64> {
    if x1 == 0.0 || x2 == 0.0 {
        return Err(Error::domain("Hamiltonian application needs an off-axis point"));
    }
    let v = f.value(x1, x2);
    let vr1 = f.value(-x1, x2);
    let vr2 = f.value(x1, -x2);
    Ok(0.5
        * (-f.d11(x1, x2) - f.d22(x1, x2)
            - 2.0 * p.mu1() / x1 * f.d1(x1, x2)
            - 2.0 * p.mu2() / x2 * f.d2(x1, x2)
            + p.mu1() / (x1 * x1) * (v - vr1)
            + p.mu2() / (x2 * x2) * (v - vr2)
            + (x1 * x1 + x2 * x2) * v))
}

/// Extended Dunkl derivative D-hat_i applied to f at (x1, x2), with the
/// component scale c multiplying the F_i R_i addition.
fn dhat_apply(f: &dyn CField, p: &Parameters, c: f64, i: u8, x1: f64, x2: f64) -> Result<f64> {
    let (mi, xi, deriv, mirrored_value): (f64, f64, f64, f64) = match i {
        1 => (p.mu1(), x1, f.d1(x1, x2), f.value(-x1, x2)),
        2 => (p.mu2(), x2, f.d2(x1, x2), f.value(x1, -x2)),
        _ => return Err(Error::domain("component index must be 1 or 2")),
    };
    let fi = f_term(i, p, x1, x2)?;
    Ok(deriv + mi / xi * (f.value(x1, x2) - mirrored_value) + c * fi * mirrored_value)
}

/// D-hat_i^2 f via reflection-point evaluation: h = D-hat_i f is formed
/// pointwise (including at the mirrored point), and its i-derivative is
/// assembled from exact derivatives of f so no numerical differentiation
/// enters.
fn dhat_squared(f: &dyn CField, p: &Parameters, c: f64, i: u8, x1: f64, x2: f64) -> Result<f64> {
    let (mi, xi) = match i {
        1 => (p.mu1(), x1),
        2 => (p.mu2(), x2),
        _ => return Err(Error::domain("component index must be 1 or 2")),
    };
    let (mx1, mx2) = if i == 1 { (-x1, x2) } else { (x1, -x2) };
    let h_here = dhat_apply(f, p, c, i, x1, x2)?;
    let h_mirror = dhat_apply(f, p, c, i, mx1, mx2)?;
    let v = f.value(x1, x2);
    let v_m = f.value(mx1, mx2);
    let (deriv_here, deriv_mirror, second) = match i {
        1 => (f.d1(x1, x2), f.d1(mx1, mx2), f.d11(x1, x2)),
        _ => (f.d2(x1, x2), f.d2(mx1, mx2), f.d22(x1, x2)),
    };
    let fi = f_term(i, p, x1, x2)?;
    let dfi = f_term_partial(i, p, x1, x2)?;
    // d/dx_i of h = f_i' + (mu/x)(f - Rf) + c F_i Rf
    let dh = second - mi / (xi * xi) * (v - v_m)
        + mi / xi * (deriv_here + deriv_mirror)
        + c * dfi * v_m
        - c * fi * deriv_mirror;
    Ok(dh + mi / xi * (h_here - h_mirror) + c * fi * h_mirror)
}

/// The extended Hamiltonian applied to an exact field in the chosen
/// operator form. `scale` multiplies the extension terms: the written
/// projector form corresponds to 1/2, the eigenfunction-consistent value
/// is resolved empirically (see `resolve_extension_scale`).
pub fn apply_h_ext(
    f: &dyn CField,
    p: &Parameters,
    scale: f64,
    form: HExtForm,
    x1: f64,
    x2: f64,
) -> Result<f64> {
    if x1 == 0.0 || x2 == 0.0 {
        return Err(Error::domain("Hamiltonian application needs an off-axis point"));
    }
    let v = f.value(x1, x2);
    let vr1 = f.value(-x1, x2);
    let vr2 = f.value(x1, -x2);
    let vr12 = f.value(-x1, -x2);
    match form {
        HExtForm::Projectors => {
            let k00 = k_term(p.mu1(), p.mu2(), x1, x2)?;
            let k11 = k_term(p.mu1() + 1.0, p.mu2() + 1.0, x1, x2)?;
            let k01 = k_term(p.mu1(), p.mu2() + 1.0, x1, x2)?;
            let k10 = k_term(p.mu1() + 1.0, p.mu2(), x1, x2)?;
            Ok(apply_h_base(f, p, x1, x2)?
                + scale
                    * (k00 * (v + vr1 + vr2 + vr12)
                        + k11 * (v - vr1 - vr2 + vr12)
                        + k01 * (v + vr1 - vr2 - vr12)
                        + k10 * (v - vr1 + vr2 - vr12)))
        }
        HExtForm::LTerms => {
            let l00 = l_term(0, 0, p, x1, x2)?;
            let l10 = l_term(1, 0, p, x1, x2)?;
            let l01 = l_term(0, 1, p, x1, x2)?;
            let l11 = l_term(1, 1, p, x1, x2)?;
            Ok(apply_h_base(f, p, x1, x2)?
                + scale * (l00 * v + l10 * vr1 + l01 * vr2 + l11 * vr12))
        }
        HExtForm::DunklHat => {
            let c = 2.0 * scale;
            let d1sq = dhat_squared(f, p, c, 1, x1, x2)?;
            let d2sq = dhat_squared(f, p, c, 2, x1, x2)?;
            let l00 = l_term(0, 0, p, x1, x2)?;
            let l11 = l_term(1, 1, p, x1, x2)?;
            let f1 = f_term(1, p, x1, x2)?;
            let f2 = f_term(2, p, x1, x2)?;
            let g1 = 2.0 * scale
                * (l00 + 2.0 * p.mu1() / x1 * f1 + 2.0 * p.mu2() / x2 * f2)
                - c * c * (f1 * f1 + f2 * f2);
            let g2 = 2.0 * scale * l11;
            Ok(0.5
                * (-d1sq - d2sq + (x1 * x1 + x2 * x2) * v + g1 * v + g2 * vr12))
        }
    }
}

// ---------------------------------------------------------------------------
// scale resolution
// ---------------------------------------------------------------------------

/// Outcome of the empirical resolution of the extension-term scale.
#[derive(Debug, Clone, Copy)]
pub struct ScaleResolution {
    pub chosen: f64,
    pub residual_half: f64,
    pub residual_one: f64,
}

/// Decide between the two candidate scales (1/2 as written in the projector
/// form, 1 as implied by the gauge route) by measuring eigen-residuals of
/// the extended angular states under each; the winner is the scale with the
/// vanishing residual.
pub fn resolve_extension_scale(p: &Parameters) -> Result<ScaleResolution> {
    let phis = crate::verify::angular_samples(91, 24);
    let mut residual = [0.0f64; 2];
    let mut tested = 0;
    for sector in SectorLabel::all() {
        if check_sector_admissibility(sector, p).is_err() {
            continue;
        }
        let n2 = sector.min_n2();
        let state = extended_angular_state(sector, n2, p)?;
        for (slot, scale) in [(0usize, 0.5f64), (1, 1.0)] {
            let extra = sector_extension_potential(sector, p, scale)?;
            for &phi in &phis {
                let lhs = crate::quasiforms::apply_angular_operator(
                    state.form(),
                    p,
                    sector,
                    Some(&extra),
                    phi,
                )?;
                let fv = state.form().eval(phi, 0)?;
                let r = (lhs - 0.5 * state.msq() * fv).abs() / fv.abs().max(1e-12);
                residual[slot] = residual[slot].max(r);
            }
        }
        tested += 1;
    }
    if tested == 0 {
        return Err(Error::Admissibility(
            "no sector admits the angular extension at these parameters".into(),
        ));
    }
    let chosen = if residual[0] < residual[1] { 0.5 } else { 1.0 };
    Ok(ScaleResolution {
        chosen,
        residual_half: residual[0],
        residual_one: residual[1],
    })
}

// keep the shared kernel solver linked from this module's tests
#[allow(unused_imports)]
use linalg::nullspace_exact as _;
