//! Independent verification machinery: Gauss quadrature for the Dunkl
//! weights (Golub-Welsch), Gram matrices, pointwise residual scans, a
//! Cartesian finite-difference Hamiltonian oracle and a grid-diagonalization
//! spectrum oracle. None of these reuse the closed-form derivative path they
//! are meant to check.

use crate::error::{Error, Result};
use crate::linalg::{symtrid_eigen_first_row, symtrid_lowest_eigenvalues};
use crate::orthopoly::log_gamma;
use crate::params::Parameters;
use crate::quasiforms::{AngularForm, RadialForm};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

/// Weight family of a Gauss rule: z^alpha e^{-z} on (0, inf) or
/// (1-t)^a (1+t)^b on (-1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFamily {
    GenLaguerre { alpha: f64 },
    Jacobi { a: f64, b: f64 },
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    family: WeightFamily,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of w_i f(x_i); integrates f against the family weight.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Closed-form moments of the weight, used by the construction self-test.
/// Gamma product for the Laguerre family; for the Jacobi family the Beta
/// total mass seeds the stable recursion
/// m_{j+1} = [(b - a) m_j + j m_{j-1}] / (a + b + j + 2)
/// obtained by integrating d/dt[(1-t)^{a+1}(1+t)^{b+1} t^j] over (-1, 1).
fn moment(family: WeightFamily, j: u32) -> Result<f64> {
    match family {
        WeightFamily::GenLaguerre { alpha } => Ok(log_gamma(alpha + j as f64 + 1.0)?.exp()),
        WeightFamily::Jacobi { a, b } => {
            let ln_m0 = (a + b + 1.0) * std::f64::consts::LN_2 + log_gamma(a + 1.0)?
                + log_gamma(b + 1.0)?
                - log_gamma(a + b + 2.0)?;
            let mut prev = 0.0;
            let mut cur = ln_m0.exp();
            for i in 0..j {
                let next = ((b - a) * cur + i as f64 * prev) / (a + b + i as f64 + 2.0);
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}

/// N-point Gauss rule by Golub-Welsch on the symmetric Jacobi matrix of the
/// weight's orthogonal polynomials. Construction self-tests the first seven
/// moments against their Gamma closed forms to 1e-12 relative.
pub fn gauss_rule(family: WeightFamily, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Construction("rule needs at least one node".into()));
    }
    let (diag, offdiag, mu0) = match family {
        WeightFamily::GenLaguerre { alpha } => {
            if alpha <= -1.0 {
                return Err(Error::domain(format!("Laguerre weight needs alpha > -1, got {alpha}")));
            }
            let diag: Vec<f64> = (0..n).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
            let off: Vec<f64> = (1..n)
                .map(|j| (j as f64 * (j as f64 + alpha)).sqrt())
                .collect();
            (diag, off, log_gamma(alpha + 1.0)?.exp())
        }
        WeightFamily::Jacobi { a, b } => {
            if a <= -1.0 || b <= -1.0 {
                return Err(Error::domain(format!(
                    "Jacobi weight needs a, b > -1, got a = {a}, b = {b}"
                )));
            }
            let mut diag = Vec::with_capacity(n);
            diag.push((b - a) / (a + b + 2.0));
            for j in 1..n {
                let j = j as f64;
                let s = 2.0 * j + a + b;
                diag.push((b * b - a * a) / (s * (s + 2.0)));
            }
            let mut off = Vec::with_capacity(n.saturating_sub(1));
            if n > 1 {
                // beta_1 with the (1+a+b) factor cancelled: valid at a+b = -1
                let b1 = 4.0 * (1.0 + a) * (1.0 + b)
                    / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
                off.push(b1.sqrt());
            }
            for j in 2..n {
                let j = j as f64;
                let s = 2.0 * j + a + b;
                let beta = 4.0 * j * (j + a) * (j + b) * (j + a + b)
                    / (s * s * (s + 1.0) * (s - 1.0));
                off.push(beta.sqrt());
            }
            let ln_mu0 = (a + b + 1.0) * std::f64::consts::LN_2 + log_gamma(a + 1.0)?
                + log_gamma(b + 1.0)?
                - log_gamma(a + b + 2.0)?;
            (diag, off, ln_mu0.exp())
        }
    };
    let (nodes, first) = symtrid_eigen_first_row(&diag, &offdiag)?;
    let weights: Vec<f64> = first.iter().map(|&z| mu0 * z * z).collect();
    let rule = QuadratureRule {
        family,
        nodes,
        weights,
    };
    // moment self-test, capped by the rule's exactness degree 2n - 1
    let jmax = 6u32.min(2 * n as u32 - 1);
    for j in 0..=jmax {
        let got = rule.integrate(|x| x.powi(j as i32));
        let expect = moment(family, j)?;
        let scale = rule.integrate(|x| x.abs().powi(j as i32)).abs().max(1e-300);
        if (got - expect).abs() > 1e-12 * scale {
            return Err(Error::Construction(format!(
                "moment {j} self-test failed: {got} vs {expect} for {family:?} (n = {n})"
            )));
        }
    }
    Ok(rule)
}

/// Integrate against the family weight with node-doubling until two
/// successive rules agree to 1e-13 relative; rational integrands with poles
/// near the integration domain converge slowly and need this guard.
pub fn converged_integral(
    family: WeightFamily,
    start_nodes: usize,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut nodes = start_nodes.max(40);
    let mut prev = gauss_rule(family, nodes)?.integrate(&f);
    loop {
        nodes *= 2;
        let cur = gauss_rule(family, nodes)?.integrate(&f);
        if (cur - prev).abs() <= 1e-13 * cur.abs().max(1e-300) {
            return Ok(cur);
        }
        if nodes > 6400 {
            return Err(Error::Construction(format!(
                "quadrature failed to converge by {nodes} nodes for {family:?}"
            )));
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// Gram matrices
// ---------------------------------------------------------------------------

/// Gram matrix of radial forms sharing the rho-power and Gaussian gauge,
/// against rho^{2 mu1 + 2 mu2 + 1} d rho, via the z = rho^2 substitution.
pub fn radial_gram(states: &[RadialForm], p: &Parameters, nodes: usize) -> Result<Vec<Vec<f64>>> {
    let m = states.len();
    let mut out = vec![vec![0.0; m]; m];
    if m == 0 {
        return Ok(out);
    }
    let s = states[0].exponent();
    for st in states {
        if st.exponent() != s || !st.has_gauss() {
            return Err(Error::Construction(
                "radial Gram requires a common rho-power and Gaussian gauge".into(),
            ));
        }
    }
    let alpha = s + p.mu_sum();
    let rule = gauss_rule(WeightFamily::GenLaguerre { alpha }, nodes)?;
    for i in 0..m {
        for j in i..m {
            let (fi, fj) = (&states[i], &states[j]);
            let v = 0.5
                * fi.scale()
                * fj.scale()
                * rule.integrate(|z| {
                    fi.num().eval(z) * fj.num().eval(z) / (fi.den().eval(z) * fj.den().eval(z))
                });
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Gram matrix of angular forms (integer cos/sin exponents) against
/// |cos|^{2 mu1} |sin|^{2 mu2} d phi on (0, 2 pi). Entries between forms of
/// opposite parity vanish identically (odd integrand over the full circle)
/// and are set to exact zero.
pub fn angular_gram(states: &[AngularForm], p: &Parameters, nodes: usize) -> Result<Vec<Vec<f64>>> {
    let m = states.len();
    let mut out = vec![vec![0.0; m]; m];
    let mut rules: BTreeMap<(i64, i64), QuadratureRule> = BTreeMap::new();
    for i in 0..m {
        for j in i..m {
            let (gi, gj) = (&states[i], &states[j]);
            let (pa_i, pb_i) = (gi.cos_parity(), gi.sin_parity());
            let (pa_j, pb_j) = (gj.cos_parity(), gj.sin_parity());
            let (Some(pa_i), Some(pb_i), Some(pa_j), Some(pb_j)) = (pa_i, pb_i, pa_j, pb_j)
            else {
                return Err(Error::Construction(
                    "angular Gram requires integer exponents".into(),
                ));
            };
            if pa_i != pa_j || pb_i != pb_j {
                continue; // odd integrand: exactly zero
            }
            let abar = 0.5 * (gi.cos_exponent() + gj.cos_exponent());
            let bbar = 0.5 * (gi.sin_exponent() + gj.sin_exponent());
            let pw = p.mu1() + abar;
            let qw = p.mu2() + bbar;
            let key = ((2.0 * abar) as i64, (2.0 * bbar) as i64);
            if !rules.contains_key(&key) {
                let rule = gauss_rule(
                    WeightFamily::Jacobi {
                        a: pw - 0.5,
                        b: qw - 0.5,
                    },
                    nodes,
                )?;
                rules.insert(key, rule);
            }
            let rule = &rules[&key];
            let factor = 2f64.powf(1.0 - pw - qw);
            let v = gi.scale()
                * gj.scale()
                * factor
                * rule.integrate(|t| {
                    gi.num().eval(t) * gj.num().eval(t) / (gi.den().eval(t) * gj.den().eval(t))
                });
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Largest absolute deviation of a matrix from the identity.
pub fn identity_deviation(gram: &[Vec<f64>]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((v - target).abs());
        }
    }
    dev
}

// ---------------------------------------------------------------------------
// reports and residual scans
// ---------------------------------------------------------------------------

/// Machine-readable outcome of a single check. The pass flag is derived
/// from the deviation and tolerance, never set independently.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub nodes: u64,
}

impl VerificationReport {
    pub fn new(
        check: impl Into<String>,
        params: BTreeMap<String, serde_json::Value>,
        deviation: f64,
        tolerance: f64,
        seed: u64,
        nodes: u64,
    ) -> Self {
        let pass = deviation.is_finite() && deviation <= tolerance;
        VerificationReport {
            check: check.into(),
            params,
            deviation,
            tolerance,
            pass,
            seed,
            nodes,
        }
    }
}

/// Convenience constructor for report parameter maps.
pub fn report_params(pairs: &[(&str, serde_json::Value)]) -> BTreeMap<String, serde_json::Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Max over samples of |(Op - lambda) f| / max(|f|, 1e-12).
pub fn residual_scan<P: Copy>(
    check: &str,
    op: impl Fn(P) -> Result<f64>,
    f: impl Fn(P) -> Result<f64>,
    eigenvalue: f64,
    samples: &[P],
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut dev: f64 = 0.0;
    for &x in samples {
        let fv = f(x)?;
        let ov = op(x)?;
        dev = dev.max((ov - eigenvalue * fv).abs() / fv.abs().max(1e-12));
    }
    Ok(VerificationReport::new(
        check,
        report_params(&[("eigenvalue", serde_json::json!(eigenvalue))]),
        dev,
        tolerance,
        seed,
        samples.len() as u64,
    ))
}

// ---------------------------------------------------------------------------
// sample point sets
// ---------------------------------------------------------------------------

/// Seeded radial sample points on [0.05, 3.8], steering clear of the origin.
pub fn radial_samples(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0.05..3.8)).collect()
}

/// Seeded angular samples in (0, 2 pi) avoiding |phi - j pi/2| < 0.05.
pub fn angular_samples(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let off_axis = (0..=4).all(|j| (phi - j as f64 * std::f64::consts::FRAC_PI_2).abs() >= 0.05);
        if off_axis {
            out.push(phi);
        }
    }
    out
}

/// Seeded Cartesian samples off both axes (|x_i| >= 0.08, radius in [0.3, 2.6]).
pub fn cartesian_samples(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r: f64 = rng.gen_range(0.3..2.6);
        let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let (x1, x2) = (r * phi.cos(), r * phi.sin());
        if x1.abs() >= 0.08 && x2.abs() >= 0.08 {
            out.push((x1, x2));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// exact-derivative Cartesian fields
// ---------------------------------------------------------------------------

/// A smooth scalar field on the plane with closed-form first and second
/// partial derivatives; the substrate for operator-form comparisons.
pub trait CField {
    fn value(&self, x1: f64, x2: f64) -> f64;
    fn d1(&self, x1: f64, x2: f64) -> f64;
    fn d2(&self, x1: f64, x2: f64) -> f64;
    fn d11(&self, x1: f64, x2: f64) -> f64;
    fn d22(&self, x1: f64, x2: f64) -> f64;
}

/// Polynomial times Gaussian: sum c x1^i x2^j exp(-(x1^2+x2^2)/2).
#[derive(Debug, Clone)]
pub struct PolyGaussField {
    terms: Vec<(u32, u32, f64)>,
}

impl PolyGaussField {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        PolyGaussField { terms }
    }
}

fn xpow(x: f64, i: i64) -> f64 {
    if i < 0 {
        0.0 // only reached with zero coefficient
    } else {
        x.powi(i as i32)
    }
}

impl CField for PolyGaussField {
    fn value(&self, x1: f64, x2: f64) -> f64 {
        let e = (-(x1 * x1 + x2 * x2) / 2.0).exp();
        self.terms
            .iter()
            .map(|&(i, j, c)| c * xpow(x1, i as i64) * xpow(x2, j as i64))
            .sum::<f64>()
            * e
    }

    fn d1(&self, x1: f64, x2: f64) -> f64 {
        let e = (-(x1 * x1 + x2 * x2) / 2.0).exp();
        self.terms
            .iter()
            .map(|&(i, j, c)| {
                let i = i as i64;
                let poly = i as f64 * xpow(x1, i - 1) - xpow(x1, i + 1);
                c * poly * xpow(x2, j as i64)
            })
            .sum::<f64>()
            * e
    }

    fn d2(&self, x1: f64, x2: f64) -> f64 {
        let e = (-(x1 * x1 + x2 * x2) / 2.0).exp();
        self.terms
            .iter()
            .map(|&(i, j, c)| {
                let j = j as i64;
                let poly = j as f64 * xpow(x2, j - 1) - xpow(x2, j + 1);
                c * poly * xpow(x1, i as i64)
            })
            .sum::<f64>()
            * e
    }

    fn d11(&self, x1: f64, x2: f64) -> f64 {
        let e = (-(x1 * x1 + x2 * x2) / 2.0).exp();
        self.terms
            .iter()
            .map(|&(i, j, c)| {
                let i = i as i64;
                let poly = (i * (i - 1)) as f64 * xpow(x1, i - 2)
                    - (2 * i + 1) as f64 * xpow(x1, i)
                    + xpow(x1, i + 2);
                c * poly * xpow(x2, j as i64)
            })
            .sum::<f64>()
            * e
    }

    fn d22(&self, x1: f64, x2: f64) -> f64 {
        let e = (-(x1 * x1 + x2 * x2) / 2.0).exp();
        self.terms
            .iter()
            .map(|&(i, j, c)| {
                let j = j as i64;
                let poly = (j * (j - 1)) as f64 * xpow(x2, j - 2)
                    - (2 * j + 1) as f64 * xpow(x2, j)
                    + xpow(x2, j + 2);
                c * poly * xpow(x1, i as i64)
            })
            .sum::<f64>()
            * e
    }
}

/// Fixed battery of 20 mixed-parity smooth fields for operator-form checks.
pub fn test_field_battery(seed: u64) -> Vec<PolyGaussField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(77));
    (0..20)
        .map(|idx| {
            let nterms = rng.gen_range(3..6);
            let mut terms = Vec::with_capacity(nterms + 1);
            for _ in 0..nterms {
                terms.push((
                    rng.gen_range(0..5u32),
                    rng.gen_range(0..5u32),
                    rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                ));
            }
            // force a parity mix across the battery
            terms.push(((idx % 2) as u32, ((idx / 2) % 2) as u32, 0.7));
            PolyGaussField::new(terms)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// finite-difference Cartesian Hamiltonian oracle
// ---------------------------------------------------------------------------

/// Extension terms for the finite-difference Hamiltonian.
pub enum HamiltonianExt<'a> {
    /// Pointwise radial addition delta(rho) to the oscillator potential.
    Radial(&'a dyn Fn(f64) -> f64),
    /// Projector-weighted angular K-terms with the given overall scale.
    Angular { scale: f64 },
}

/// (H psi)(x1, x2) with 4th-order central differences for the second
/// derivatives and exact mirrored evaluations for the reflection terms.
pub fn fd_cartesian_hamiltonian(
    psi: &dyn Fn(f64, f64) -> Result<f64>,
    p: &Parameters,
    ext: Option<&HamiltonianExt>,
    x1: f64,
    x2: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("step h = {h} must be positive")));
    }
    if x1.abs() <= 2.0 * h || x2.abs() <= 2.0 * h {
        return Err(Error::StencilDomain(format!(
            "stencil at ({x1}, {x2}) with h = {h} touches an axis"
        )));
    }
    let f = psi(x1, x2)?;
    let fp1 = psi(x1 + h, x2)?;
    let fm1 = psi(x1 - h, x2)?;
    let fp2 = psi(x1 + 2.0 * h, x2)?;
    let fm2 = psi(x1 - 2.0 * h, x2)?;
    let gp1 = psi(x1, x2 + h)?;
    let gm1 = psi(x1, x2 - h)?;
    let gp2 = psi(x1, x2 + 2.0 * h)?;
    let gm2 = psi(x1, x2 - 2.0 * h)?;
    let d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
    let d2 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
    let d11 = (-fp2 + 16.0 * fp1 - 30.0 * f + 16.0 * fm1 - fm2) / (12.0 * h * h);
    let d22 = (-gp2 + 16.0 * gp1 - 30.0 * f + 16.0 * gm1 - gm2) / (12.0 * h * h);
    let fr1 = psi(-x1, x2)?;
    let fr2 = psi(x1, -x2)?;
    let mut out = 0.5
        * (-d11 - d22 - 2.0 * p.mu1() / x1 * d1 - 2.0 * p.mu2() / x2 * d2
            + p.mu1() / (x1 * x1) * (f - fr1)
            + p.mu2() / (x2 * x2) * (f - fr2)
            + (x1 * x1 + x2 * x2) * f);
    match ext {
        None => {}
        Some(HamiltonianExt::Radial(delta)) => {
            out += delta(x1.hypot(x2)) * f;
        }
        Some(HamiltonianExt::Angular { scale }) => {
            let fr12 = psi(-x1, -x2)?;
            let k00 = crate::angular_ext::k_term(p.mu1(), p.mu2(), x1, x2)?;
            let k11 = crate::angular_ext::k_term(p.mu1() + 1.0, p.mu2() + 1.0, x1, x2)?;
            let k01 = crate::angular_ext::k_term(p.mu1(), p.mu2() + 1.0, x1, x2)?;
            let k10 = crate::angular_ext::k_term(p.mu1() + 1.0, p.mu2(), x1, x2)?;
            out += scale
                * (k00 * (f + fr1 + fr2 + fr12)
                    + k11 * (f - fr1 - fr2 + fr12)
                    + k01 * (f + fr1 - fr2 - fr12)
                    + k10 * (f - fr1 + fr2 - fr12));
        }
    }
    Ok(out)
}

/// Richardson combination of the 4th-order stencil over h and h/2.
pub fn fd_hamiltonian_richardson(
    psi: &dyn Fn(f64, f64) -> Result<f64>,
    p: &Parameters,
    ext: Option<&HamiltonianExt>,
    x1: f64,
    x2: f64,
    h: f64,
) -> Result<f64> {
    let coarse = fd_cartesian_hamiltonian(psi, p, ext, x1, x2, h)?;
    let fine = fd_cartesian_hamiltonian(psi, p, ext, x1, x2, 0.5 * h)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

// ---------------------------------------------------------------------------
// grid-diagonalization spectrum oracle
// ---------------------------------------------------------------------------

/// Lowest eigenvalues of the gauge-transformed radial operator
/// -(1/2) d^2/d rho^2 + (1/2)(alpha - 1/2)(alpha + 1/2)/rho^2 + V(rho)
/// on a Dirichlet grid, Richardson-extrapolated over two grid resolutions.
pub fn grid_spectrum_oracle(
    potential: &dyn Fn(f64) -> f64,
    p: &Parameters,
    n2: u32,
    rho_max: f64,
    points: usize,
    count: usize,
) -> Vec<f64> {
    let alpha = n2 as f64 + p.mu_sum();
    let centrifugal = 0.5 * (alpha * alpha - 0.25);
    let solve = |npts: usize| -> Vec<f64> {
        let h = rho_max / (npts as f64 + 1.0);
        let mut diag = Vec::with_capacity(npts);
        for i in 1..=npts {
            let rho = i as f64 * h;
            diag.push(1.0 / (h * h) + centrifugal / (rho * rho) + potential(rho));
        }
        let off = vec![-0.5 / (h * h); npts - 1];
        symtrid_lowest_eigenvalues(&diag, &off, count)
    };
    let coarse = solve(points / 2);
    let fine = solve(points);
    fine.iter()
        .zip(&coarse)
        .map(|(&f, &c)| (4.0 * f - c) / 3.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basestates::{angular_state, assemble, radial_state};
    use crate::params::{QuantumNumbers, SectorLabel};

    fn p37() -> Parameters {
        Parameters::new(0.3, 0.7).unwrap()
    }

    #[test]
    fn laguerre_rule_single_node() {
        let r = gauss_rule(WeightFamily::GenLaguerre { alpha: 0.0 }, 1).unwrap();
        assert!((r.nodes()[0] - 1.0).abs() < 1e-14);
        assert!((r.weights()[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn laguerre_orthogonality_spot_check() {
        // integral L_j L_k z^alpha e^{-z} = delta_jk Gamma(k+alpha+1)/k!
        for &alpha in &[-0.4, 0.0, 1.7] {
            let rule = gauss_rule(WeightFamily::GenLaguerre { alpha }, 40).unwrap();
            for j in 0..=6u32 {
                for k in j..=6u32 {
                    let lj = crate::orthopoly::laguerre(j, alpha);
                    let lk = crate::orthopoly::laguerre(k, alpha);
                    let got = rule.integrate(|z| lj.eval(z) * lk.eval(z));
                    let expect = if j == k {
                        (log_gamma(k as f64 + alpha + 1.0).unwrap()
                            - log_gamma(k as f64 + 1.0).unwrap())
                        .exp()
                    } else {
                        0.0
                    };
                    let scale = (log_gamma(k as f64 + alpha + 1.0).unwrap()
                        - log_gamma(k as f64 + 1.0).unwrap())
                    .exp();
                    assert!(
                        (got - expect).abs() <= 1e-10 * scale,
                        "alpha={alpha} j={j} k={k}: {got} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_total_mass() {
        let (a, b) = (0.37, -0.2);
        let rule = gauss_rule(WeightFamily::Jacobi { a, b }, 24).unwrap();
        let expect = ((a + b + 1.0) * std::f64::consts::LN_2 + log_gamma(a + 1.0).unwrap()
            + log_gamma(b + 1.0).unwrap()
            - log_gamma(a + b + 2.0).unwrap())
        .exp();
        assert!((rule.integrate(|_| 1.0) - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn angular_weight_total_mass() {
        // integral over (0, 2 pi) of |cos|^{2 mu1} |sin|^{2 mu2}
        // = 2 Gamma(mu1 + 1/2) Gamma(mu2 + 1/2) / Gamma(mu1 + mu2 + 1);
        // at mu = (1/2, 1/2) this equals 2 exactly.
        for (mu1, mu2) in [(0.5, 0.5), (0.3, 0.7), (0.0, 0.0)] {
            let p = Parameters::new(mu1, mu2).unwrap();
            let rule = gauss_rule(
                WeightFamily::Jacobi {
                    a: p.mu1() - 0.5,
                    b: p.mu2() - 0.5,
                },
                30,
            )
            .unwrap();
            let factor = 2f64.powf(1.0 - p.mu1() - p.mu2());
            let got = factor * rule.integrate(|_| 1.0);
            let expect = (std::f64::consts::LN_2 + log_gamma(mu1 + 0.5).unwrap()
                + log_gamma(mu2 + 0.5).unwrap()
                - log_gamma(mu1 + mu2 + 1.0).unwrap())
            .exp();
            assert!(
                (got - expect).abs() < 1e-13 * expect,
                "mu = ({mu1},{mu2}): {got} vs {expect}"
            );
            if (mu1, mu2) == (0.5, 0.5) {
                assert!((got - 2.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn base_radial_gram_is_identity() {
        let p = p37();
        let states: Vec<_> = (0..=6).map(|k| radial_state(k, 2, &p)).collect();
        let gram = radial_gram(&states, &p, 80).unwrap();
        assert!(identity_deviation(&gram) < 1e-10);
    }

    #[test]
    fn base_angular_gram_identity_and_zero_blocks() {
        let p = p37();
        let mut states = Vec::new();
        for sector in SectorLabel::all() {
            let mut n2 = sector.min_n2();
            while n2 <= 6 {
                if sector.admits_n2(n2) {
                    states.push(angular_state(sector, n2, &p).unwrap());
                }
                n2 += 1;
            }
        }
        let gram = angular_gram(&states, &p, 60).unwrap();
        assert_eq!(states.len(), 13);
        assert!(identity_deviation(&gram) < 1e-9);
    }

    #[test]
    fn residual_scan_detects_perturbation() {
        let p = p37();
        let qn = QuantumNumbers::new(SectorLabel::new(0, 0).unwrap(), 0, 0).unwrap();
        let st = assemble(qn, &p).unwrap();
        let samples = radial_samples(42, 25);
        let rep = residual_scan(
            "ground",
            |rho| crate::quasiforms::apply_radial_operator(st.radial(), &p, st.msq(), None, rho),
            |rho| st.radial().eval(rho, 0),
            st.energy(),
            &samples,
            1e-11,
            42,
        )
        .unwrap();
        assert!(rep.pass, "deviation {}", rep.deviation);

        let rep = residual_scan(
            "ground-perturbed",
            |rho| crate::quasiforms::apply_radial_operator(st.radial(), &p, st.msq(), None, rho),
            |rho| st.radial().eval(rho, 0),
            st.energy() + 1e-3,
            &samples,
            1e-11,
            42,
        )
        .unwrap();
        assert!(!rep.pass);
        assert!(rep.deviation > 1e-4 && rep.deviation < 1e-2);
    }

    #[test]
    fn fd_oracle_on_undeformed_gaussian() {
        let p = Parameters::new(0.0, 0.0).unwrap();
        let psi = |x1: f64, x2: f64| Ok((-(x1 * x1 + x2 * x2) / 2.0).exp());
        for &(x1, x2) in &[(0.7, 0.4), (-1.1, 0.8)] {
            let h = fd_hamiltonian_richardson(&psi, &p, None, x1, x2, 0.01).unwrap();
            let expect = psi(x1, x2).unwrap();
            assert!((h - expect).abs() < 1e-9, "H psi = {h}, psi = {expect}");
        }
    }

    #[test]
    fn fd_oracle_on_deformed_eigenstate() {
        let p = p37();
        let qn = QuantumNumbers::new(SectorLabel::new(1, 0).unwrap(), 3, 1).unwrap();
        let st = assemble(qn, &p).unwrap();
        let psi = |x1: f64, x2: f64| st.eval(x1, x2);
        for &(x1, x2) in &[(0.8, 0.5), (-0.6, -1.0)] {
            let hv = fd_hamiltonian_richardson(&psi, &p, None, x1, x2, 0.01).unwrap();
            let ev = st.energy() * st.eval(x1, x2).unwrap();
            let scale = st.eval(x1, x2).unwrap().abs().max(1e-12);
            assert!(
                ((hv - ev) / scale).abs() < 1e-5,
                "residual {}",
                ((hv - ev) / scale).abs()
            );
        }
    }

    #[test]
    fn fd_stencil_domain_guard() {
        let p = p37();
        let psi = |_x1: f64, _x2: f64| Ok(1.0);
        assert!(matches!(
            fd_cartesian_hamiltonian(&psi, &p, None, 0.01, 1.0, 0.01),
            Err(Error::StencilDomain(_))
        ));
    }

    #[test]
    fn grid_oracle_base_spectrum() {
        let p = p37();
        let eigs = grid_spectrum_oracle(&|rho| 0.5 * rho * rho, &p, 0, 12.0, 3000, 3);
        for (i, e) in eigs.iter().enumerate() {
            let expect = 2.0 * i as f64 + 2.0;
            assert!((e - expect).abs() < 1e-4, "level {i}: {e} vs {expect}");
        }
    }

    #[test]
    fn reports_serialize_with_fixed_schema() {
        let rep = VerificationReport::new(
            "demo",
            report_params(&[("mu1", serde_json::json!(0.3))]),
            1e-12,
            1e-9,
            42,
            100,
        );
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.contains("\"check\":\"demo\""));
        assert!(s.contains("\"pass\":true"));
        let rep2 = VerificationReport::new("demo", BTreeMap::new(), 1e-6, 1e-9, 42, 100);
        assert!(!rep2.pass);
    }

    #[test]
    fn battery_has_mixed_parity_and_exact_derivatives() {
        let battery = test_field_battery(42);
        assert_eq!(battery.len(), 20);
        let (x1, x2) = (0.63, -0.41);
        let h = 1e-5;
        for f in &battery {
            let fd1 = (f.value(x1 + h, x2) - f.value(x1 - h, x2)) / (2.0 * h);
            assert!((fd1 - f.d1(x1, x2)).abs() < 1e-7);
            let fd22 = (f.value(x1, x2 + h) - 2.0 * f.value(x1, x2) + f.value(x1, x2 - h))
                / (h * h);
            assert!((fd22 - f.d22(x1, x2)).abs() < 1e-5);
        }
    }
}
