//! Quasi-rational function representations for radial and angular factors,
//! with closed-form first and second derivatives. All residual verification
//! in the crate runs through these evaluators, so no numerical
//! differentiation enters the high-accuracy checks.

use crate::error::{Error, Result};
use crate::orthopoly::Polynomial;
use crate::params::{Parameters, SectorLabel};

// ---------------------------------------------------------------------------
// interval certification of denominators
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct Iv {
    lo: f64,
    hi: f64,
}

impl Iv {
    fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }

    fn widen(self) -> Self {
        let mag = self.lo.abs().max(self.hi.abs()).max(1e-300);
        Iv {
            lo: self.lo - 1e-14 * mag,
            hi: self.hi + 1e-14 * mag,
        }
    }

    fn add(self, o: Iv) -> Self {
        Iv {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
        .widen()
    }

    fn mul(self, o: Iv) -> Self {
        let cands = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Iv {
            lo: cands.iter().copied().fold(f64::INFINITY, f64::min),
            hi: cands.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
        .widen()
    }

    fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }
}

fn horner_iv(p: &Polynomial, x: Iv) -> Iv {
    let mut acc = Iv::point(0.0);
    for &c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add(Iv::point(c));
    }
    acc
}

/// Certify that `p` has no zeros on z >= 0 by adaptive interval subdivision
/// on [0, Z*] (Cauchy root bound) down to width 1e-6; beyond Z* the leading
/// coefficient governs the sign.
pub(crate) fn certify_nonvanishing_on_nonneg(p: &Polynomial) -> Result<()> {
    if p.is_zero() {
        return Err(Error::SingularExtension(
            "denominator is identically zero".into(),
        ));
    }
    if p.degree() == 0 {
        return Ok(());
    }
    let lead = p.leading();
    let zstar = 1.0
        + p.coeffs()[..p.degree()]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    let mut stack = vec![(0.0f64, zstar)];
    let mut work = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        work += 1;
        if work > 4_000_000 {
            return Err(Error::SingularExtension(
                "sign-definiteness certification exceeded its work budget".into(),
            ));
        }
        let enclosure = horner_iv(p, Iv { lo, hi });
        if !enclosure.contains_zero() {
            continue;
        }
        if hi - lo <= 1e-6 {
            return Err(Error::SingularExtension(format!(
                "possible zero in [{lo:.7}, {hi:.7}] of the denominator"
            )));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid));
        stack.push((mid, hi));
    }
    Ok(())
}

/// Signed power that understands integer exponents at non-positive bases.
fn pw(base: f64, expo: f64) -> Result<f64> {
    if expo == 0.0 {
        return Ok(1.0);
    }
    if base > 0.0 {
        return Ok(base.powf(expo));
    }
    let rounded = expo.round();
    if (expo - rounded).abs() < 1e-12 && rounded.abs() < 1e9 {
        if base == 0.0 {
            return if expo > 0.0 {
                Ok(0.0)
            } else {
                Err(Error::domain(format!(
                    "zero base raised to non-positive power {expo}"
                )))
            };
        }
        return Ok(base.powi(rounded as i32));
    }
    if base == 0.0 {
        return Ok(0.0); // expo > 0 here
    }
    Err(Error::domain(format!(
        "negative base {base} with non-integer exponent {expo}"
    )))
}

fn coef_pw(coef: f64, base: f64, expo: f64) -> Result<f64> {
    if coef == 0.0 {
        Ok(0.0)
    } else {
        Ok(coef * pw(base, expo)?)
    }
}

/// Value and first two derivatives of a ratio num/den along with the chain
/// through an inner variable; helpers shared by both form evaluators.
fn ratio_derivs(num: &Polynomial, den: &Polynomial, x: f64) -> (f64, f64, f64) {
    let dv = den.eval(x);
    let w0 = num.eval(x) / dv;
    let nd = num.deriv();
    let dd = den.deriv();
    let w1 = (nd.eval(x) - w0 * dd.eval(x)) / dv;
    let w2 = (nd.deriv().eval(x) - 2.0 * w1 * dd.eval(x) - w0 * dd.deriv().eval(x)) / dv;
    (w0, w1, w2)
}

// ---------------------------------------------------------------------------
// RadialForm
// ---------------------------------------------------------------------------

/// f(rho) = c rho^s [e^{-rho^2/2}] num(rho^2) / den(rho^2).
///
/// The denominator is certified free of zeros on z >= 0 at construction.
#[derive(Debug, Clone)]
pub struct RadialForm {
    c: f64,
    s: f64,
    gauss: bool,
    num: Polynomial,
    den: Polynomial,
}

impl RadialForm {
    pub fn new(c: f64, s: f64, gauss: bool, num: Polynomial, den: Polynomial) -> Result<Self> {
        certify_nonvanishing_on_nonneg(&den)?;
        Ok(RadialForm {
            c,
            s,
            gauss,
            num,
            den,
        })
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn has_gauss(&self) -> bool {
        self.gauss
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn with_scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.c = c;
        out
    }

    /// f, f' or f'' at rho > 0 through the closed-form chain rule.
    pub fn eval(&self, rho: f64, order: usize) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain(format!("rho = {rho} must be positive")));
        }
        if order > 2 {
            return Err(Error::domain(format!("derivative order {order} > 2")));
        }
        let z = rho * rho;
        let (w0, wz1, wz2) = ratio_derivs(&self.num, &self.den, z);
        let u0 = pw(rho, self.s)?;
        let (v0, v1, v2) = if self.gauss {
            let e = (-0.5 * z).exp();
            (e, -rho * e, (z - 1.0) * e)
        } else {
            (1.0, 0.0, 0.0)
        };
        if order == 0 {
            return Ok(self.c * u0 * v0 * w0);
        }
        let u1 = coef_pw(self.s, rho, self.s - 1.0)?;
        let w1 = 2.0 * rho * wz1;
        if order == 1 {
            return Ok(self.c * (u1 * v0 * w0 + u0 * v1 * w0 + u0 * v0 * w1));
        }
        let u2 = coef_pw(self.s * (self.s - 1.0), rho, self.s - 2.0)?;
        let w2 = 4.0 * z * wz2 + 2.0 * wz1;
        Ok(self.c
            * (u2 * v0 * w0
                + u0 * v2 * w0
                + u0 * v0 * w2
                + 2.0 * (u1 * v1 * w0 + u1 * v0 * w1 + u0 * v1 * w1)))
    }
}

// ---------------------------------------------------------------------------
// AngularForm
// ---------------------------------------------------------------------------

/// g(phi) = c (cos phi)^a (sin phi)^b num(t) / den(t) with t = -cos 2 phi.
///
/// The denominator has degree <= 1 and is certified nonvanishing on [-1, 1].
#[derive(Debug, Clone)]
pub struct AngularForm {
    c: f64,
    a: f64,
    b: f64,
    num: Polynomial,
    den: Polynomial,
}

impl AngularForm {
    pub fn new(c: f64, a: f64, b: f64, num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.degree() > 1 {
            return Err(Error::Construction(format!(
                "angular denominator degree {} exceeds 1",
                den.degree()
            )));
        }
        let d0 = den.coeff(0);
        let d1 = den.coeff(1);
        // degree <= 1: root at -d0/d1 must lie outside [-1, 1]
        let vanishes = if d1 == 0.0 {
            d0 == 0.0
        } else {
            (d0 / d1).abs() <= 1.0
        };
        if vanishes {
            return Err(Error::SingularExtension(
                "angular denominator vanishes on [-1, 1]".into(),
            ));
        }
        Ok(AngularForm { c, a, b, num, den })
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    pub fn cos_exponent(&self) -> f64 {
        self.a
    }

    pub fn sin_exponent(&self) -> f64 {
        self.b
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn with_scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.c = c;
        out
    }

    /// Integer parity (mod 2) of the cos exponent, when it is an integer.
    pub fn cos_parity(&self) -> Option<u8> {
        int_parity(self.a)
    }

    pub fn sin_parity(&self) -> Option<u8> {
        int_parity(self.b)
    }

    /// g, g' or g'' at phi, exact chain rule through t(phi) = -cos 2 phi.
    pub fn eval(&self, phi: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::domain(format!("derivative order {order} > 2")));
        }
        let cp = phi.cos();
        let sp = phi.sin();
        let t = -(2.0 * phi).cos();
        let (w0, wt1, wt2) = ratio_derivs(&self.num, &self.den, t);
        let u0 = pw(cp, self.a)?;
        let v0 = pw(sp, self.b)?;
        if order == 0 {
            return Ok(self.c * u0 * v0 * w0);
        }
        let tp = 2.0 * (2.0 * phi).sin();
        let tpp = 4.0 * (2.0 * phi).cos();
        let u1 = -coef_pw(self.a, cp, self.a - 1.0)? * sp;
        let v1 = coef_pw(self.b, sp, self.b - 1.0)? * cp;
        let w1 = wt1 * tp;
        if order == 1 {
            return Ok(self.c * (u1 * v0 * w0 + u0 * v1 * w0 + u0 * v0 * w1));
        }
        let u2 = coef_pw(self.a * (self.a - 1.0), cp, self.a - 2.0)? * sp * sp
            - coef_pw(self.a, cp, self.a)?;
        let v2 = coef_pw(self.b * (self.b - 1.0), sp, self.b - 2.0)? * cp * cp
            - coef_pw(self.b, sp, self.b)?;
        let w2 = wt2 * tp * tp + wt1 * tpp;
        Ok(self.c
            * (u2 * v0 * w0
                + u0 * v2 * w0
                + u0 * v0 * w2
                + 2.0 * (u1 * v1 * w0 + u1 * v0 * w1 + u0 * v1 * w1)))
    }
}

fn int_parity(x: f64) -> Option<u8> {
    let r = x.round();
    if (x - r).abs() < 1e-9 && r.abs() < 1e9 {
        Some(((r as i64).rem_euclid(2)) as u8)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// operator application
// ---------------------------------------------------------------------------

/// [A_rho f + (msq / 2 rho^2) f + extra * f](rho) with
/// A_rho = (1/2)(-d^2 - (2 mu1 + 2 mu2 + 1)/rho d + rho^2).
pub fn apply_radial_operator(
    f: &RadialForm,
    p: &Parameters,
    msq: f64,
    extra_potential: Option<&dyn Fn(f64) -> f64>,
    rho: f64,
) -> Result<f64> {
    let f0 = f.eval(rho, 0)?;
    let f1 = f.eval(rho, 1)?;
    let f2 = f.eval(rho, 2)?;
    let a_rho = 0.5 * (-f2 - (2.0 * p.mu_sum() + 1.0) / rho * f1 + rho * rho * f0);
    let extra = extra_potential.map(|e| e(rho)).unwrap_or(0.0);
    Ok(a_rho + msq / (2.0 * rho * rho) * f0 + extra * f0)
}

/// Sector-reduced angular operator
/// [B_phi g + extra * g](phi) with the reflection terms replaced by their
/// sector eigenvalues (2 mu1 eps1 sec^2 + 2 mu2 eps2 csc^2).
///
/// The form must be a parity eigenfunction matching the sector.
pub fn apply_angular_operator(
    g: &AngularForm,
    p: &Parameters,
    sector: SectorLabel,
    extra_potential: Option<&dyn Fn(f64) -> f64>,
    phi: f64,
) -> Result<f64> {
    match (g.cos_parity(), g.sin_parity()) {
        (Some(pa), Some(pb)) => {
            if pa != sector.eps1() || pb != sector.eps2() {
                return Err(Error::Parity(format!(
                    "form parity ({pa},{pb}) does not match sector {sector}"
                )));
            }
        }
        _ => {
            return Err(Error::Parity(
                "form with non-integer exponents is not a parity eigenfunction".into(),
            ))
        }
    }
    let cp = phi.cos();
    let sp = phi.sin();
    if cp == 0.0 || sp == 0.0 {
        return Err(Error::domain(format!(
            "angular operator undefined on the axes (phi = {phi})"
        )));
    }
    let g0 = g.eval(phi, 0)?;
    let g1 = g.eval(phi, 1)?;
    let g2 = g.eval(phi, 2)?;
    let refl = 2.0 * p.mu1() * sector.eps1() as f64 / (cp * cp)
        + 2.0 * p.mu2() * sector.eps2() as f64 / (sp * sp);
    let b_phi = 0.5 * (-g2 + 2.0 * (p.mu1() * sp / cp - p.mu2() * cp / sp) * g1 + refl * g0);
    let extra = extra_potential.map(|e| e(phi)).unwrap_or(0.0);
    Ok(b_phi + extra * g0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Richardson-extrapolated central difference, 4 levels; test-only oracle.
    fn richardson<F: Fn(f64) -> f64>(f: &F, x: f64, order: usize) -> f64 {
        let base = |h: f64| -> f64 {
            match order {
                1 => (f(x + h) - f(x - h)) / (2.0 * h),
                2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
                _ => unreachable!(),
            }
        };
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut h = 1e-2;
        for i in 0..4 {
            let mut row = vec![base(h)];
            for j in 0..i {
                let prev = rows[i - 1][j];
                let fac = 4f64.powi(j as i32 + 1);
                let v = (fac * row[j] - prev) / (fac - 1.0);
                row.push(v);
            }
            rows.push(row);
            h /= 2.0;
        }
        *rows.last().unwrap().last().unwrap()
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Polynomial {
        Polynomial::new((0..=deg).map(|_| rng.gen_range(-2.0..2.0)).collect())
    }

    #[test]
    fn gaussian_second_derivative() {
        let f = RadialForm::new(1.0, 0.0, true, Polynomial::one(), Polynomial::one()).unwrap();
        // f'' = (rho^2 - 1) e^{-rho^2/2}; zero at rho = 1
        assert!(f.eval(1.0, 2).unwrap().abs() < 1e-15);
        let v = f.eval(1.5, 2).unwrap();
        let expect = (1.5f64 * 1.5 - 1.0) * (-0.5 * 1.5f64 * 1.5).exp();
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn monomial_derivative() {
        let f = RadialForm::new(1.0, 2.0, false, Polynomial::one(), Polynomial::one()).unwrap();
        assert!((f.eval(3.0, 1).unwrap() - 6.0).abs() < 1e-13);
        assert!(f.eval(0.0, 0).is_err());
        assert!(f.eval(-1.0, 0).is_err());
    }

    #[test]
    fn radial_derivatives_match_fd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let deg = rng.gen_range(0..5);
            let num = random_poly(&mut rng, deg);
            let den = Polynomial::new(vec![rng.gen_range(1.0..4.0), rng.gen_range(0.0..1.0)]);
            let s: f64 = rng.gen_range(0.0f64..4.0);
            let gauss = rng.gen_bool(0.7);
            let Ok(f) = RadialForm::new(rng.gen_range(0.2..2.0), s, gauss, num, den) else {
                continue;
            };
            for _ in 0..5 {
                let rho: f64 = rng.gen_range(0.3..2.5);
                let (v1, v2) = (f.eval(rho, 1).unwrap(), f.eval(rho, 2).unwrap());
                let g = |x: f64| f.eval(x, 0).unwrap();
                let scale = f.eval(rho, 0).unwrap().abs().max(1.0);
                assert!(
                    (v1 - richardson(&g, rho, 1)).abs() <= 1e-8 * v1.abs().max(scale),
                    "first derivative mismatch at rho={rho}"
                );
                assert!(
                    (v2 - richardson(&g, rho, 2)).abs() <= 1e-6 * v2.abs().max(scale),
                    "second derivative mismatch at rho={rho}"
                );
            }
        }
    }

    #[test]
    fn angular_cos_form() {
        let g = AngularForm::new(1.0, 1.0, 0.0, Polynomial::one(), Polynomial::one()).unwrap();
        for phi in [0.3, 1.1, 2.7] {
            assert!((g.eval(phi, 2).unwrap() + phi.cos()).abs() < 1e-13);
        }
        // num = t at phi = pi/4: t = -cos(pi/2) = 0
        let g = AngularForm::new(
            1.0,
            0.0,
            0.0,
            Polynomial::new(vec![0.0, 1.0]),
            Polynomial::one(),
        )
        .unwrap();
        assert!(g.eval(std::f64::consts::FRAC_PI_4, 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn angular_derivatives_match_fd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let deg = rng.gen_range(0..4);
            let num = random_poly(&mut rng, deg);
            let den = Polynomial::new(vec![rng.gen_range(2.0..4.0), rng.gen_range(-0.8..0.8)]);
            let a = rng.gen_range(0..3) as f64;
            let b = rng.gen_range(0..3) as f64;
            let Ok(g) = AngularForm::new(rng.gen_range(0.2..2.0), a, b, num, den) else {
                continue;
            };
            for _ in 0..5 {
                let phi: f64 = rng.gen_range(0.15..1.4);
                let (v1, v2) = (g.eval(phi, 1).unwrap(), g.eval(phi, 2).unwrap());
                let h = |x: f64| g.eval(x, 0).unwrap();
                let scale = g.eval(phi, 0).unwrap().abs().max(1.0);
                assert!((v1 - richardson(&h, phi, 1)).abs() <= 1e-8 * v1.abs().max(scale));
                assert!((v2 - richardson(&h, phi, 2)).abs() <= 1e-6 * v2.abs().max(scale));
            }
        }
    }

    #[test]
    fn angular_parity_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let num = random_poly(&mut rng, 3);
            let a = rng.gen_range(0..2) as f64;
            let b = rng.gen_range(0..2) as f64;
            let g = AngularForm::new(1.0, a, b, num, Polynomial::one()).unwrap();
            let phi: f64 = rng.gen_range(0.2..1.3);
            let v = g.eval(phi, 0).unwrap();
            // R2: phi -> -phi (same as 2 pi - phi); sign (-1)^b
            let v2 = g.eval(-phi, 0).unwrap();
            assert!((v2 - v * (-1f64).powi(b as i32)).abs() < 1e-12);
            // R1: phi -> pi - phi; sign (-1)^a
            let v1 = g.eval(std::f64::consts::PI - phi, 0).unwrap();
            assert!((v1 - v * (-1f64).powi(a as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_on_constant() {
        let p = Parameters::new(0.0, 0.0).unwrap();
        let f = RadialForm::new(1.0, 0.0, false, Polynomial::one(), Polynomial::one()).unwrap();
        for rho in [0.5, 1.0, 2.0] {
            let v = apply_radial_operator(&f, &p, 0.0, None, rho).unwrap();
            assert!((v - 0.5 * rho * rho).abs() < 1e-14);
        }
        let g = AngularForm::new(1.0, 0.0, 0.0, Polynomial::one(), Polynomial::one()).unwrap();
        let s = SectorLabel::new(0, 0).unwrap();
        let v = apply_angular_operator(&g, &p, s, None, 0.7).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn operator_rejects_wrong_parity() {
        let p = Parameters::new(0.3, 0.7).unwrap();
        let g = AngularForm::new(1.0, 1.0, 0.0, Polynomial::one(), Polynomial::one()).unwrap();
        let s = SectorLabel::new(0, 0).unwrap();
        assert!(matches!(
            apply_angular_operator(&g, &p, s, None, 0.7),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn denominator_certification() {
        // z + 1 fine; z - 1 has a zero at z = 1
        assert!(certify_nonvanishing_on_nonneg(&Polynomial::new(vec![1.0, 1.0])).is_ok());
        assert!(certify_nonvanishing_on_nonneg(&Polynomial::new(vec![-1.0, 1.0])).is_err());
        // -2 - z is sign-definite (negative) on z >= 0
        assert!(certify_nonvanishing_on_nonneg(&Polynomial::new(vec![-2.0, -1.0])).is_ok());
        // (z-2)^2 + 1e-8 is positive but grazes; must still certify
        assert!(certify_nonvanishing_on_nonneg(&Polynomial::new(vec![4.0 + 1e-2, -4.0, 1.0]))
            .is_ok());
        // root at z = 0 must be rejected
        assert!(certify_nonvanishing_on_nonneg(&Polynomial::new(vec![0.0, 1.0])).is_err());
    }

    #[test]
    fn angular_denominator_check() {
        let ok = Polynomial::new(vec![3.0, 1.0]);
        assert!(AngularForm::new(1.0, 0.0, 0.0, Polynomial::one(), ok).is_ok());
        let bad = Polynomial::new(vec![0.5, 1.0]);
        assert!(AngularForm::new(1.0, 0.0, 0.0, Polynomial::one(), bad).is_err());
    }
}
