//! Small dense linear-algebra kernels: symmetric tridiagonal eigensolvers
//! (for quadrature rules and the grid spectrum oracle) and the dual-route
//! nullspace machinery (exact rational elimination plus floating SVD).

use crate::error::{Error, Result};
use crate::ratpoly::{rat_to_f64, Rat};
use num::{One, Zero};

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating only the
/// first row of the eigenvector matrix (all that Golub-Welsch weights need).
///
/// Returns (eigenvalues ascending, matching first components).
pub(crate) fn symtrid_eigen_first_row(
    diag: &[f64],
    offdiag: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert!(n >= 1 && offdiag.len() + 1 == n.max(1));
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return Ok((d, z));
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::Construction(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let dv = order.iter().map(|&i| d[i]).collect();
    let zv = order.iter().map(|&i| z[i]).collect();
    Ok((dv, zv))
}

/// Number of eigenvalues strictly below `lambda` (Sturm / LDL^T pivot count).
fn sturm_count(diag: &[f64], offdiag: &[f64], lambda: f64) -> usize {
    let mut count = 0usize;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let ei = offdiag[i - 1];
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = diag[i] - lambda - ei * ei / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenvalues by bisection on the Sturm count.
pub(crate) fn symtrid_lowest_eigenvalues(
    diag: &[f64],
    offdiag: &[f64],
    count: usize,
) -> Vec<f64> {
    let n = diag.len();
    let count = count.min(n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = offdiag.get(i.wrapping_sub(1)).copied().unwrap_or(0.0).abs()
            + offdiag.get(i).copied().unwrap_or(0.0).abs();
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, offdiag, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Exact reduced-row-echelon nullspace. Returns the kernel dimension and,
/// when it is exactly one, a basis vector.
pub(crate) fn nullspace_exact(mut rows: Vec<Vec<Rat>>, ncols: usize) -> (usize, Option<Vec<Rat>>) {
    let nrows = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].clone();
        for c in col..ncols {
            let v = &rows[rank][c] / &inv;
            rows[rank][c] = v;
        }
        for r in 0..nrows {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..ncols {
                    let v = &rows[r][c] - &(&f * &rows[rank][c]);
                    rows[r][c] = v;
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
    }
    let nullity = ncols - rank;
    if nullity != 1 {
        return (nullity, None);
    }
    let free_col = (0..ncols)
        .find(|c| !pivots.iter().any(|&(_, pc)| pc == *c))
        .expect("one free column");
    let mut kernel = vec![Rat::zero(); ncols];
    kernel[free_col] = Rat::one();
    for &(pr, pc) in &pivots {
        kernel[pc] = -rows[pr][free_col].clone();
    }
    (1, Some(kernel))
}

/// Exact nullspace of a rational matrix converted from f64 coefficients.
pub(crate) fn nullspace_exact_f64_view(rows: &[Vec<Rat>]) -> (usize, Option<Vec<f64>>) {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let (nullity, kernel) = nullspace_exact(rows.to_vec(), ncols);
    (
        nullity,
        kernel.map(|k| k.iter().map(rat_to_f64).collect()),
    )
}

/// Floating SVD view of a nullspace. Rows whose magnitude is negligible
/// relative to the whole matrix are exact-cancellation dust and are dropped
/// before row equilibration, otherwise they would be amplified into spurious
/// constraints.
pub(crate) struct SvdNullspace {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub sigma_second_min: f64,
    pub kernel: Vec<f64>,
    pub zero_matrix: bool,
}

pub(crate) fn nullspace_svd(rows: &[Vec<f64>], ncols: usize) -> SvdNullspace {
    let gmax = rows
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    if gmax == 0.0 {
        return SvdNullspace {
            sigma_max: 0.0,
            sigma_min: 0.0,
            sigma_second_min: 0.0,
            kernel: vec![],
            zero_matrix: true,
        };
    }
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let rmax = r.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if rmax > 1e-13 * gmax {
            kept.push(r.iter().map(|v| v / rmax).collect());
        }
    }
    while kept.len() < ncols {
        kept.push(vec![0.0; ncols]);
    }
    let m = nalgebra::DMatrix::from_fn(kept.len(), ncols, |i, j| kept[i][j]);
    let svd = m.svd(false, true);
    let mut sv: Vec<(usize, f64)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .collect();
    sv.sort_by(|a, b| b.1.total_cmp(&a.1));
    let sigma_max = sv.first().map(|x| x.1).unwrap_or(0.0);
    let sigma_min = sv.last().map(|x| x.1).unwrap_or(0.0);
    let sigma_second_min = if sv.len() >= 2 {
        sv[sv.len() - 2].1
    } else {
        sigma_max
    };
    let kernel_row = sv.last().map(|x| x.0).unwrap_or(0);
    let v_t = svd.v_t.expect("V^T requested");
    let kernel: Vec<f64> = v_t.row(kernel_row).iter().copied().collect();
    SvdNullspace {
        sigma_max,
        sigma_min,
        sigma_second_min,
        kernel,
        zero_matrix: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::rat_int;

    #[test]
    fn ql_reproduces_known_eigenvalues() {
        // 2x2: [[2, 1], [1, 2]] -> {1, 3}, first components 1/sqrt(2)
        let (vals, first) = symtrid_eigen_first_row(&[2.0, 2.0], &[1.0]).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        for f in first {
            assert!((f * f - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn ql_matches_sturm_on_random_matrix() {
        let n = 40;
        let mut d = Vec::new();
        let mut e = Vec::new();
        let mut state = 123456789u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..n {
            d.push(3.0 * next());
        }
        for _ in 0..n - 1 {
            e.push(next());
        }
        let (vals, _) = symtrid_eigen_first_row(&d, &e).unwrap();
        let lowest = symtrid_lowest_eigenvalues(&d, &e, 5);
        for i in 0..5 {
            assert!(
                (vals[i] - lowest[i]).abs() < 1e-9,
                "eig {i}: {} vs {}",
                vals[i],
                lowest[i]
            );
        }
    }

    #[test]
    fn exact_nullspace_rank_and_kernel() {
        // rows of a rank-2 matrix with kernel (1, -2, 1)
        let rows = vec![
            vec![rat_int(1), rat_int(0), rat_int(-1)],
            vec![rat_int(0), rat_int(1), rat_int(2)],
            vec![rat_int(1), rat_int(1), rat_int(1)],
        ];
        let (nullity, kernel) = nullspace_exact(rows, 3);
        assert_eq!(nullity, 1);
        let k = kernel.unwrap();
        let kf: Vec<f64> = k.iter().map(rat_to_f64).collect();
        let s = kf[2];
        assert!((kf[0] / s - 1.0).abs() < 1e-14);
        assert!((kf[1] / s + 2.0).abs() < 1e-14);

        // full-rank case: nullity zero
        let rows = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(1)],
        ];
        let (nullity, kernel) = nullspace_exact(rows, 2);
        assert_eq!(nullity, 0);
        assert!(kernel.is_none());

        // rank-1, two free columns
        let rows = vec![vec![rat_int(1), rat_int(2), rat_int(3)]];
        let (nullity, kernel) = nullspace_exact(rows, 3);
        assert_eq!(nullity, 2);
        assert!(kernel.is_none());
    }

    #[test]
    fn svd_nullspace_ignores_roundoff_dust_rows() {
        let rows = vec![
            vec![1.0, 0.0, -1.0],
            vec![0.0, 1.0, 2.0],
            vec![1.0, 1.0, 1.0],
            vec![0.0, 0.0, 1e-16], // cancellation dust; must not become a constraint
        ];
        let ns = nullspace_svd(&rows, 3);
        assert!(!ns.zero_matrix);
        assert!(ns.sigma_min <= 1e-12 * ns.sigma_max, "{}", ns.sigma_min);
        assert!(ns.sigma_second_min >= 1e-3 * ns.sigma_max);
        let k = &ns.kernel;
        let s = k[2];
        assert!((k[0] / s - 1.0).abs() < 1e-10);
        assert!((k[1] / s + 2.0).abs() < 1e-10);
    }
}
