//! Rational extensions of the radial equation: seed factors, the extended
//! potential, X_m-Laguerre exceptional polynomials constructed by an
//! ODE-ansatz nullspace solve, and fully normalized extended radial states.

use crate::error::{Error, Result};
use crate::linalg::{nullspace_exact, nullspace_svd};
use crate::orthopoly::{log_gamma, Polynomial};
use crate::params::{ExtensionSpec, ExtensionType, Parameters, QuantumNumbers, SectorLabel};
use crate::quasiforms::{certify_nonvanishing_on_nonneg, RadialForm};
use crate::ratpoly::{
    laguerre_rat, rat_from_f64, rat_int, rat_to_f64, rp_add, rp_deriv, rp_mul, rp_mul_z,
    rp_scale, rp_sub, rp_to_f64, Rat,
};
use crate::verify::{converged_integral, gauss_rule, WeightFamily};
use num::{One, Zero};

/// Seed factor g_m^{(tau,alpha)}(z) of a radial extension, certified free of
/// zeros on z >= 0.
#[derive(Debug, Clone)]
pub struct GFactor {
    spec: ExtensionSpec,
    alpha: f64,
    poly: Polynomial,
    pub(crate) exact: Vec<Rat>,
}

/// Build the seed factor for the requested extension type:
/// L_m^{(alpha-1)}(-z) (I), L_m^{(-alpha-1)}(z) with m < alpha+1 (II),
/// L_m^{(-alpha-1)}(-z) with m < alpha+1 and m even (III).
pub fn g_factor(spec: ExtensionSpec, alpha: f64) -> Result<GFactor> {
    g_factor_exact(spec, rat_from_f64(alpha), alpha)
}

/// Seed factor over a caller-supplied exact alpha; the solver routes its
/// exact rational alpha through here so the whole ansatz system shares one
/// value.
fn g_factor_exact(spec: ExtensionSpec, alpha_r: Rat, alpha: f64) -> Result<GFactor> {
    let m = spec.m();
    if matches!(spec.tau(), ExtensionType::II | ExtensionType::III)
        && !((m as f64) < alpha + 1.0)
    {
        return Err(Error::Admissibility(format!(
            "type {} requires m < alpha + 1 (m = {m}, alpha = {alpha})",
            spec.tau()
        )));
    }
    let exact = match spec.tau() {
        ExtensionType::I => laguerre_rat(m, &(alpha_r - Rat::one()), true),
        ExtensionType::II => laguerre_rat(m, &(-alpha_r - Rat::one()), false),
        ExtensionType::III => laguerre_rat(m, &(-alpha_r - Rat::one()), true),
    };
    let poly = Polynomial::new(rp_to_f64(&exact));
    if poly.degree() != m as usize {
        return Err(Error::SingularExtension(format!(
            "seed degree collapsed below m = {m} at alpha = {alpha}"
        )));
    }
    certify_nonvanishing_on_nonneg(&poly)?;
    Ok(GFactor {
        spec,
        alpha,
        poly,
        exact,
    })
}

impl GFactor {
    pub fn spec(&self) -> ExtensionSpec {
        self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    /// The rational part added to the oscillator:
    /// -2 { g'/g + 2 z [ g''/g - (g'/g)^2 ] } at z = rho^2 (derivatives in z).
    pub fn delta_potential(&self, rho: f64) -> f64 {
        rational_delta(&self.poly, rho)
    }

    /// Full extended radial potential (1/2) rho^2 + delta.
    pub fn extended_potential(&self, rho: f64) -> f64 {
        0.5 * rho * rho + self.delta_potential(rho)
    }
}

pub(crate) fn rational_delta(g: &Polynomial, rho: f64) -> f64 {
    let z = rho * rho;
    let g0 = g.eval(z);
    let g1 = g.deriv().eval(z);
    let g2 = g.deriv().deriv().eval(z);
    let lg = g1 / g0;
    -2.0 * (lg + 2.0 * z * (g2 / g0 - lg * lg))
}

/// Closed form of the extended potential for m = 1 (types I and II):
/// (1/2) rho^2 + 2/(rho^2 + alpha) - 4 alpha / (rho^2 + alpha)^2.
pub fn extended_potential_m1(alpha: f64, rho: f64) -> f64 {
    let z = rho * rho;
    0.5 * z + 2.0 / (z + alpha) - 4.0 * alpha / (z + alpha) / (z + alpha)
}

// ---------------------------------------------------------------------------
// ansatz linear system
// ---------------------------------------------------------------------------

/// Coefficient matrix of the polynomial residual of the extended radial
/// equation for the ansatz rho^{2n} e^{-rho^2/2} y(rho^2)/g(rho^2): column j
/// holds the residual coefficients for y = z^j. A one-dimensional kernel at
/// the quantized energy yields the exceptional polynomial.
fn radial_system(g: &[Rat], n2: u32, alpha: &Rat, energy: &Rat, k: u32) -> Vec<Vec<Rat>> {
    let m = g.len() - 1;
    let two = rat_int(2);
    let n = rat_int(n2 as i64) / &two;
    let gd = rp_deriv(g);
    let gdd = rp_deriv(&gd);
    let msq = rat_int(4) * &n * (alpha - &n);
    // W = g' g + 2 z (g'' g - g'^2)
    let w = rp_add(
        &rp_mul(&gd, g),
        &rp_scale(&rp_mul_z(&rp_sub(&rp_mul(&gdd, g), &rp_mul(&gd, &gd))), &two),
    );
    let rows = k as usize + 2 * m + 3;
    let cols = k as usize + 1;
    let mut mat = vec![vec![Rat::zero(); cols]; rows];
    for j in 0..cols {
        let mut y = vec![Rat::zero(); j + 1];
        y[j] = Rat::one();
        let yd = rp_deriv(&y);
        // B = (2n - z) y g + 2 z (y' g - y g')
        let lin = vec![&two * &n, -Rat::one()];
        let b = rp_add(
            &rp_mul(&lin, &rp_mul(&y, g)),
            &rp_scale(&rp_mul_z(&rp_sub(&rp_mul(&yd, g), &rp_mul(&y, &gd))), &two),
        );
        let bd = rp_deriv(&b);
        // (z - (2 alpha - 2n)) B g
        let t1 = rp_mul(
            &vec![-(&two * alpha - &two * &n), Rat::one()],
            &rp_mul(&b, g),
        );
        // -2 z (B' g - 2 g' B)
        let t2 = rp_scale(
            &rp_mul_z(&rp_sub(&rp_mul(&bd, g), &rp_scale(&rp_mul(&gd, &b), &two))),
            &rat_int(-2),
        );
        // (z^2 + M^2 - 2 E z) y g^2
        let quad = vec![msq.clone(), rat_int(-2) * energy, Rat::one()];
        let t3 = rp_mul(&quad, &rp_mul(&y, &rp_mul(g, g)));
        // -4 z W y
        let t4 = rp_scale(&rp_mul_z(&rp_mul(&w, &y)), &rat_int(-4));
        let res = rp_add(&rp_add(&t1, &t2), &rp_add(&t3, &t4));
        for (i, c) in res.into_iter().enumerate() {
            if i < rows {
                mat[i][j] = c;
            }
        }
    }
    mat
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NullspaceMode {
    Exact,
    Svd,
    Both,
}

/// Certified kernel extraction for an ansatz system built over exact
/// rationals. `Both` requires the exact elimination and the SVD gap test to
/// agree on a one-dimensional kernel.
pub(crate) fn solve_kernel(
    rows: &[Vec<Rat>],
    mode: NullspaceMode,
    context: &str,
) -> Result<Vec<f64>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let float_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(rat_to_f64).collect())
        .collect();

    let exact_verdict = if mode != NullspaceMode::Svd {
        let (nullity, kernel) = nullspace_exact(rows.to_vec(), ncols);
        if nullity != 1 {
            return Err(Error::NullspaceDimension {
                dim: nullity,
                context: format!("exact elimination, {context}"),
            });
        }
        Some(kernel.expect("kernel present when nullity is 1"))
    } else {
        None
    };

    let svd_kernel = if mode != NullspaceMode::Exact {
        let ns = nullspace_svd(&float_rows, ncols);
        if ns.zero_matrix {
            if ncols != 1 {
                return Err(Error::NullspaceDimension {
                    dim: ncols,
                    context: format!("zero system, {context}"),
                });
            }
            Some(vec![1.0])
        } else {
            let small_ok = ns.sigma_min <= 1e-10 * ns.sigma_max;
            let gap_ok = ns.sigma_second_min >= 1e-6 * ns.sigma_max;
            if !(small_ok && gap_ok) {
                return Err(Error::NullspaceDimension {
                    dim: if small_ok { 2 } else { 0 },
                    context: format!(
                        "svd gap test (sigma_min/max = {:.3e}, second/max = {:.3e}), {context}",
                        ns.sigma_min / ns.sigma_max,
                        ns.sigma_second_min / ns.sigma_max
                    ),
                });
            }
            Some(ns.kernel)
        }
    } else {
        None
    };

    match (exact_verdict, svd_kernel) {
        (Some(k), _) => Ok(k.iter().map(rat_to_f64).collect()),
        (None, Some(k)) => Ok(k),
        (None, None) => unreachable!("at least one route runs"),
    }
}

// ---------------------------------------------------------------------------
// exceptional polynomials and extended states
// ---------------------------------------------------------------------------

fn check_k_range(spec: ExtensionSpec, k: u32) -> Result<()> {
    if !spec.admits_k(k) {
        return Err(Error::Admissibility(format!(
            "k = {k} is outside the admissible range of type {}",
            spec
        )));
    }
    Ok(())
}

/// The degree-k X_m-Laguerre polynomial of the requested type, scaled so
/// that rho^{2n} e^{-rho^2/2} y(rho^2)/g(rho^2) has unit norm against
/// rho^{2 mu1 + 2 mu2 + 1} d rho, with positive leading coefficient.
pub fn xm_laguerre(spec: ExtensionSpec, k: u32, n2: u32, p: &Parameters) -> Result<Polynomial> {
    xm_laguerre_mode(spec, k, n2, p, None, NullspaceMode::Both)
}

/// Same construction at an arbitrary target energy. Values within 1e-12
/// relative of the quantized energy are snapped to it exactly (floating
/// arithmetic cannot hit an exact rational), anything further collapses the
/// kernel and returns `NullspaceDimension`; used by the solver-integrity
/// checks.
pub fn xm_laguerre_with_energy(
    spec: ExtensionSpec,
    k: u32,
    n2: u32,
    p: &Parameters,
    energy: f64,
) -> Result<Polynomial> {
    xm_laguerre_mode(spec, k, n2, p, Some(energy), NullspaceMode::Both)
}

pub(crate) fn xm_laguerre_mode(
    spec: ExtensionSpec,
    k: u32,
    n2: u32,
    p: &Parameters,
    energy_override: Option<f64>,
    mode: NullspaceMode,
) -> Result<Polynomial> {
    check_k_range(spec, k)?;
    let alpha = n2 as f64 + p.mu_sum();
    let alpha_r = rat_int(n2 as i64) + rat_from_f64(p.mu1()) + rat_from_f64(p.mu2());
    let g = g_factor_exact(spec, alpha_r.clone(), alpha)?;
    // exact quantized energy 2k - 2m + 2n + mu1 + mu2 + 1 over the dyadic mu
    let energy_exact =
        rat_int(2 * k as i64 - 2 * spec.m() as i64 + n2 as i64 + 1) + rat_from_f64(p.mu1())
            + rat_from_f64(p.mu2());
    let energy_r = match energy_override {
        None => energy_exact,
        Some(e) => {
            let formula = spec.energy(k, n2, p);
            if (e - formula).abs() <= 1e-12 * formula.abs().max(1.0) {
                energy_exact
            } else {
                rat_from_f64(e)
            }
        }
    };
    let system = radial_system(&g.exact, n2, &alpha_r, &energy_r, k);
    let coeffs = solve_kernel(
        &system,
        mode,
        &format!("X_m-Laguerre {} k={k} n2={n2}", spec),
    )?;
    let mut poly = Polynomial::new(coeffs);
    if poly.degree() != k as usize {
        return Err(Error::NullspaceDimension {
            dim: 1,
            context: format!(
                "kernel degree {} differs from k = {k} ({} n2={n2})",
                poly.degree(),
                spec
            ),
        });
    }
    if poly.leading() < 0.0 {
        poly = poly.scaled(-1.0);
    }
    // unit norm of the assembled state, via the Laguerre(alpha) weight in z;
    // type III seeds put poles close to the ray, so the node count adapts
    let nodes = 4 * (k as usize + spec.m() as usize) + 60;
    let gp = g.poly();
    let norm_sq = 0.5
        * converged_integral(WeightFamily::GenLaguerre { alpha }, nodes, |z| {
            let v = poly.eval(z) / gp.eval(z);
            v * v
        })?;
    if !(norm_sq > 0.0) {
        return Err(Error::Construction(format!(
            "non-positive norm {norm_sq} for {} k={k} n2={n2}",
            spec
        )));
    }
    Ok(poly.scaled(1.0 / norm_sq.sqrt()))
}

/// Extended radial bound state. `norm_constant` carries the closed-form
/// normalization constant associated with the extension type; the stored
/// form is scaled to unit quadrature norm.
#[derive(Debug, Clone)]
pub struct ExtendedRadialState {
    spec: ExtensionSpec,
    qn: QuantumNumbers,
    form: RadialForm,
    energy: f64,
    norm_constant: f64,
}

impl ExtendedRadialState {
    pub fn spec(&self) -> ExtensionSpec {
        self.spec
    }

    pub fn qn(&self) -> &QuantumNumbers {
        &self.qn
    }

    pub fn form(&self) -> &RadialForm {
        &self.form
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }
}

fn closed_form_norm(spec: ExtensionSpec, k: u32, alpha: f64) -> Result<f64> {
    let m = spec.m() as f64;
    let kf = k as f64;
    let ln2 = std::f64::consts::LN_2;
    let ln_n2 = match spec.tau() {
        ExtensionType::I => {
            ln2 + log_gamma(kf - m + 1.0)? - (kf + alpha).ln() - log_gamma(kf + alpha - m)?
        }
        ExtensionType::II => {
            ln2 + log_gamma(kf - m + 1.0)?
                - (kf + alpha + 1.0 - 2.0 * m).ln()
                - log_gamma(kf + alpha + 2.0 - m)?
        }
        ExtensionType::III => {
            if k == 0 {
                ln2 - log_gamma(alpha + 1.0 - m)? - log_gamma(m + 1.0)?
            } else {
                ln2 + log_gamma(kf - m)? - kf.ln() - log_gamma(kf + alpha + 1.0 - m)?
            }
        }
    };
    Ok((0.5 * ln_n2).exp())
}

/// Assemble the extended radial state at the shifted energy
/// 2k - 2m + 2n + mu1 + mu2 + 1. The quantum numbers carry a canonical
/// sector admitting n2 (the radial problem itself only depends on n).
pub fn extended_radial_state(
    spec: ExtensionSpec,
    k: u32,
    n2: u32,
    p: &Parameters,
) -> Result<ExtendedRadialState> {
    let poly = xm_laguerre(spec, k, n2, p)?;
    let alpha = n2 as f64 + p.mu_sum();
    let g = g_factor(spec, alpha)?;
    let norm_constant = closed_form_norm(spec, k, alpha)?;
    let form = RadialForm::new(
        norm_constant,
        n2 as f64,
        true,
        poly.scaled(1.0 / norm_constant),
        g.poly().clone(),
    )?;
    let sector = if n2 % 2 == 0 {
        SectorLabel::new(0, 0).unwrap()
    } else {
        SectorLabel::new(0, 1).unwrap()
    };
    let qn = QuantumNumbers::new(sector, n2, k)?;
    Ok(ExtendedRadialState {
        spec,
        qn,
        form,
        energy: spec.energy(k, n2, p),
        norm_constant,
    })
}
