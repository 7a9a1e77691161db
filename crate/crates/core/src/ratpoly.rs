//! Exact-rational polynomial arithmetic used by the ansatz nullspace
//! solvers. Every finite f64 is a dyadic rational, so the exact route is
//! always available for floating inputs.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub(crate) type Rat = BigRational;

pub(crate) fn rat_int(i: i64) -> Rat {
    Rat::from_integer(BigInt::from(i))
}

/// Exact dyadic rational carried by a finite f64.
pub(crate) fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float required")
}

/// Conversion that stays finite even for very large numerators/denominators.
pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num = r.numer();
    let den = r.denom();
    let shift_n = (num.bits() as i64 - 900).max(0) as u64;
    let shift_d = (den.bits() as i64 - 900).max(0) as u64;
    let nf = (num.clone() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let df = (den.clone() >> shift_d).to_f64().unwrap_or(f64::NAN);
    (nf / df) * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

pub(crate) fn rp_trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
    if v.is_empty() {
        v.push(Rat::zero());
    }
    v
}

pub(crate) fn rp_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        if i < a.len() {
            *slot += &a[i];
        }
        if i < b.len() {
            *slot += &b[i];
        }
    }
    rp_trim(out)
}

pub(crate) fn rp_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        if i < a.len() {
            *slot += &a[i];
        }
        if i < b.len() {
            *slot -= &b[i];
        }
    }
    rp_trim(out)
}

pub(crate) fn rp_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    rp_trim(out)
}

pub(crate) fn rp_scale(a: &[Rat], s: &Rat) -> Vec<Rat> {
    rp_trim(a.iter().map(|c| c * s).collect())
}

pub(crate) fn rp_deriv(a: &[Rat]) -> Vec<Rat> {
    if a.len() <= 1 {
        return vec![Rat::zero()];
    }
    rp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect(),
    )
}

/// Multiply by the variable (shift coefficients up one degree).
pub(crate) fn rp_mul_z(a: &[Rat]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(Rat::zero());
    out.extend(a.iter().cloned());
    rp_trim(out)
}

/// Substitute z -> -z.
pub(crate) fn rp_negate_arg(a: &[Rat]) -> Vec<Rat> {
    a.iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c.clone() })
        .collect()
}

pub(crate) fn rp_to_f64(a: &[Rat]) -> Vec<f64> {
    a.iter().map(rat_to_f64).collect()
}

pub(crate) fn rp_is_zero(a: &[Rat]) -> bool {
    a.iter().all(|c| c.is_zero())
}

pub(crate) fn rp_max_abs_f64(a: &[Rat]) -> f64 {
    a.iter().map(|c| rat_to_f64(&c.abs())).fold(0.0, f64::max)
}

/// Exact generalized Laguerre L_k^{(alpha)}(z) or L_k^{(alpha)}(-z).
pub(crate) fn laguerre_rat(k: u32, alpha: &Rat, negate_arg: bool) -> Vec<Rat> {
    let mut p = vec![Rat::one()];
    if k >= 1 {
        let mut pm1 = p.clone();
        p = vec![Rat::one() + alpha, -Rat::one()];
        for j in 2..=k {
            let jr = rat_int(j as i64);
            let lin = vec![rat_int(2 * j as i64 - 1) + alpha, -Rat::one()];
            let mut q = rp_mul(&lin, &p);
            q = rp_sub(&q, &rp_scale(&pm1, &(rat_int(j as i64 - 1) + alpha)));
            q = rp_scale(&q, &(Rat::one() / jr));
            pm1 = p;
            p = q;
        }
    }
    if negate_arg {
        rp_negate_arg(&p)
    } else {
        p
    }
}
