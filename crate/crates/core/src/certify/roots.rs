//! Polynomial roots as eigenvalues of the companion matrix, computed by a
//! shifted complex QR iteration on the (already Hessenberg) companion form.

use crate::error::{Error, Result};
use crate::linalg::c64;

/// Roots of `Σ coeffs[k] z^k`. The leading coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[c64]) -> Result<Vec<c64>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    // companion matrix in upper Hessenberg form: first row −a_{m−1} … −a_0
    let mut h = vec![vec![c64::new(0.0, 0.0); degree]; degree];
    for (j, entry) in h[0].iter_mut().enumerate() {
        *entry = -coeffs[degree - 1 - j] / lead;
    }
    for i in 1..degree {
        h[i][i - 1] = c64::new(1.0, 0.0);
    }
    let mut roots = hessenberg_eigenvalues(h)?;
    for r in roots.iter_mut() {
        *r = newton_polish(coeffs, *r);
    }
    Ok(roots)
}

fn horner(coeffs: &[c64], z: c64) -> (c64, c64) {
    let mut p = c64::new(0.0, 0.0);
    let mut dp = c64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[c64], mut z: c64) -> c64 {
    let (mut pz, _) = horner(coeffs, z);
    for _ in 0..4 {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = horner(coeffs, cand);
        if pc.norm() < pz.norm() {
            z = cand;
            pz = pc;
        } else {
            break;
        }
    }
    z
}

fn hessenberg_eigenvalues(mut h: Vec<Vec<c64>>) -> Result<Vec<c64>> {
    let n = h.len();
    let mut eig = vec![c64::new(0.0, 0.0); n];
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iters = 0usize;
    let mut total = 0usize;
    let budget = 60 * n;

    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        // locate the start of the unreduced active block
        let mut l = hi;
        while l > 0 {
            let scale = h[l - 1][l - 1].norm() + h[l][l].norm();
            if h[l][l - 1].norm() <= eps * scale.max(f64::MIN_POSITIVE) {
                h[l][l - 1] = c64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            iters = 0;
            continue;
        }
        if total >= budget {
            return Err(Error::NoConvergence {
                method: "companion QR",
                iterations: total,
                residual: h[hi][hi - 1].norm(),
            });
        }
        iters += 1;
        total += 1;

        let a = h[hi - 1][hi - 1];
        let b = h[hi - 1][hi];
        let c = h[hi][hi - 1];
        let d = h[hi][hi];
        let mu = if iters.is_multiple_of(11) {
            // exceptional shift to break cycles
            d + c64::new(c.norm() * 0.75, c.norm() * 0.25)
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        for (k, row) in h.iter_mut().enumerate().take(hi + 1).skip(l) {
            row[k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (c64::new(1.0, 0.0), c64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            let (upper, lower) = h.split_at_mut(k + 1);
            for (u, v) in upper[k][k..=hi].iter_mut().zip(&mut lower[0][k..=hi]) {
                let (x, y) = (*u, *v);
                *u = cs.conj() * x + sn.conj() * y;
                *v = -sn * x + cs * y;
            }
            rots.push((cs, sn));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (cs, sn) = rots[idx];
            let top = (k + 2).min(hi);
            for row in h.iter_mut().take(top + 1).skip(l) {
                let u = row[k];
                let v = row[k + 1];
                row[k] = u * cs + v * sn;
                row[k + 1] = -u * sn.conj() + v * cs.conj();
            }
        }
        for (k, row) in h.iter_mut().enumerate().take(hi + 1).skip(l) {
            row[k] += mu;
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_by_angle(mut v: Vec<c64>) -> Vec<c64> {
        v.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
        v
    }

    #[test]
    fn quadratic_with_known_roots() {
        // (z − 2)(z + 3i) = z² + (3i − 2) z − 6i
        let c = [c64::new(0.0, -6.0), c64::new(-2.0, 3.0), c64::new(1.0, 0.0)];
        let r = polynomial_roots(&c).unwrap();
        assert!(r.iter().any(|z| (z - c64::new(2.0, 0.0)).norm() < 1e-12));
        assert!(r.iter().any(|z| (z - c64::new(0.0, -3.0)).norm() < 1e-12));
    }

    #[test]
    fn roots_of_unity() {
        // z^5 − 1
        let mut c = vec![c64::new(0.0, 0.0); 6];
        c[0] = c64::new(-1.0, 0.0);
        c[5] = c64::new(1.0, 0.0);
        let r = sorted_by_angle(polynomial_roots(&c).unwrap());
        assert_eq!(r.len(), 5);
        for z in &r {
            assert!((z.powu(5) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(polynomial_roots(&[c64::new(3.0, 0.0)]).unwrap().is_empty());
        assert!(polynomial_roots(&[c64::new(1.0, 0.0), c64::new(0.0, 0.0)]).is_err());
    }
}
