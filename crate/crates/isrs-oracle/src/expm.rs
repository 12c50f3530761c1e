//! Scaling-and-squaring Padé exponential (Higham 2005) and a complex LU solver.

use isrs_model::C64;
use ndarray::{Array2, Zip};

use crate::{OracleError, Result};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [f64; 5] =
    [1.495585217958292e-2, 2.53939833006323e-1, 9.504178996162932e-1, 2.097847961257068, 5.371920351148152];

fn norm1(a: &Array2<C64>) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

fn axpy(acc: &mut Array2<C64>, k: f64, x: &Array2<C64>) {
    Zip::from(acc).and(x).for_each(|a, &b| *a += b * k);
}

/// Padé numerator/denominator pieces `U` (odd) and `V` (even) for degree ≤ 9.
fn pade_low(a: &Array2<C64>, b: &[f64]) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let a2 = a.dot(a);
    let mut odd = identity(n) * b[1];
    let mut even = identity(n) * b[0];
    let mut pow = identity(n);
    for k in 1..b.len() / 2 {
        pow = pow.dot(&a2);
        axpy(&mut odd, b[2 * k + 1], &pow);
        axpy(&mut even, b[2 * k], &pow);
    }
    (a.dot(&odd), even)
}

fn pade13(a: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let b = &B13;
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let mut t = &a6 * b[13];
    axpy(&mut t, b[11], &a4);
    axpy(&mut t, b[9], &a2);
    let mut u = a6.dot(&t);
    axpy(&mut u, b[7], &a6);
    axpy(&mut u, b[5], &a4);
    axpy(&mut u, b[3], &a2);
    Zip::from(&mut u).and(&identity(n)).for_each(|x, &i| *x += i * b[1]);
    let u = a.dot(&u);
    let mut t = &a6 * b[12];
    axpy(&mut t, b[10], &a4);
    axpy(&mut t, b[8], &a2);
    let mut v = a6.dot(&t);
    axpy(&mut v, b[6], &a6);
    axpy(&mut v, b[4], &a4);
    axpy(&mut v, b[2], &a2);
    Zip::from(&mut v).and(&identity(n)).for_each(|x, &i| *x += i * b[0]);
    (u, v)
}

/// Matrix exponential of a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    assert_eq!(a.nrows(), a.ncols(), "expm needs a square matrix");
    if a.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(OracleError::NonFinite("expm input"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let nrm = norm1(a);
    let lows: [&[f64]; 4] = [&B3, &B5, &B7, &B9];
    for (theta, b) in THETA.iter().zip(lows) {
        if nrm <= *theta {
            let (u, v) = pade_low(a, b);
            return lu_solve(&(&v - &u), &(&v + &u));
        }
    }
    let s = if nrm > THETA[4] { (nrm / THETA[4]).log2().ceil() as i32 } else { 0 };
    let scaled = a * 0.5f64.powi(s);
    let (u, v) = pade13(&scaled);
    let mut r = lu_solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Solves `A X = B` by LU decomposition with partial pivoting.
pub fn lu_solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.nrows(), n);
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = lu.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for k in 0..n {
        let (piv, pmax) = (k..n).map(|r| (r, lu[[r, k]].norm())).fold((k, -1.0), |m, e| if e.1 > m.1 { e } else { m });
        if pmax <= f64::EPSILON * scale * n as f64 || pmax == 0.0 {
            return Err(OracleError::Singular);
        }
        if piv != k {
            for c in 0..n {
                lu.swap([k, c], [piv, c]);
            }
            for c in 0..x.ncols() {
                x.swap([k, c], [piv, c]);
            }
        }
        let d = lu[[k, k]];
        for r in k + 1..n {
            let f = lu[[r, k]] / d;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            lu[[r, k]] = f;
            for c in k + 1..n {
                let t = lu[[k, c]];
                lu[[r, c]] -= f * t;
            }
            for c in 0..x.ncols() {
                let t = x[[k, c]];
                x[[r, c]] -= f * t;
            }
        }
    }
    for c in 0..x.ncols() {
        for r in (0..n).rev() {
            let mut s = x[[r, c]];
            for k in r + 1..n {
                s -= lu[[r, k]] * x[[k, c]];
            }
            x[[r, c]] = s / lu[[r, r]];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        Zip::from(a).and(b).fold(0.0, |m, x, y| m.max((x - y).norm()))
    }

    fn taylor(a: &Array2<C64>) -> Array2<C64> {
        // Plain series after scaling so that ‖A/2^s‖ < 1/2; a slow independent route.
        let s = (norm1(a).max(1e-300) * 2.0).log2().ceil().max(0.0) as i32;
        let x = a * 0.5f64.powi(s);
        let mut term = identity(a.nrows());
        let mut sum = term.clone();
        for k in 1..40 {
            term = term.dot(&x) / k as f64;
            sum += &term;
        }
        for _ in 0..s {
            sum = sum.dot(&sum);
        }
        sum
    }

    fn random(n: usize, seed: u64, scale: f64) -> Array2<C64> {
        // Small LCG keeps the matrices reproducible without an RNG dependency.
        let mut st = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            st = st.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((st >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * scale
        };
        Array2::from_shape_fn((n, n), |_| C64::new(next(), next()))
    }

    #[test]
    fn scalar_and_diagonal() {
        let a = Array2::from_diag(&ndarray::arr1(&[C64::new(0.0, 1.0), C64::new(-2.0, 0.0), C64::new(7.0, 3.0)]));
        let e = expm(&a).unwrap();
        for i in 0..3 {
            let want = a[[i, i]].exp();
            assert!((e[[i, i]] - want).norm() <= 1e-13 * want.norm());
        }
        assert_eq!(expm(&Array2::zeros((3, 3))).unwrap(), identity(3));
    }

    #[test]
    fn nilpotent() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 1]] = C64::new(2.0, 0.0);
        a[[1, 2]] = C64::new(3.0, 0.0);
        let e = expm(&a).unwrap();
        assert!((e[[0, 2]] - C64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((e[[0, 1]] - C64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn every_pade_degree_against_series() {
        for (k, scale) in [0.004, 0.08, 0.3, 0.7, 1.6, 12.0].into_iter().enumerate() {
            let a = random(6, k as u64, scale);
            let e = expm(&a).unwrap();
            let t = taylor(&a);
            let tol = 1e-13 * t.iter().map(|v| v.norm()).fold(1.0, f64::max);
            assert!(max_diff(&e, &t) < tol, "scale {scale}: {}", max_diff(&e, &t));
        }
    }

    #[test]
    fn lu_solves_and_detects_singular() {
        let a = random(8, 3, 1.0);
        let b = random(8, 4, 1.0);
        let x = lu_solve(&a, &b).unwrap();
        assert!(max_diff(&a.dot(&x), &b) < 1e-12);
        let z = Array2::<C64>::zeros((2, 2));
        assert!(matches!(lu_solve(&z, &identity(2)), Err(OracleError::Singular)));
    }

    proptest! {
        #[test]
        fn commuting_sum(seed in 0u64..1000, s in 0.01f64..3.0, t in 0.01f64..3.0) {
            let a = random(5, seed, 1.0);
            let ea = expm(&(&a * s)).unwrap();
            let eb = expm(&(&a * t)).unwrap();
            let es = expm(&(&a * (s + t))).unwrap();
            let scale = es.iter().map(|v| v.norm()).fold(1.0, f64::max);
            prop_assert!(max_diff(&ea.dot(&eb), &es) < 1e-11 * scale);
        }
    }
}
