//! Matrix exponential by scaling and squaring with the degree-13 Padé
//! approximant (Higham 2005). Only the degree-13 branch is used: smaller
//! norms simply take fewer squarings, at a small cost in flops.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

const THETA_13: f64 = 5.371920351148152;

const B: [f64; 14] = [
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

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn expm(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidInput("expm needs a square matrix".into()));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * real(0.5f64.powi(squarings));
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * real(B[13]) + &a4 * real(B[11]) + &a2 * real(B[9]);
    let u = &a * (&a6 * inner_u + &a6 * real(B[7]) + &a4 * real(B[5]) + &a2 * real(B[3]) + &id * real(B[1]));
    let inner_v = &a6 * real(B[12]) + &a4 * real(B[10]) + &a2 * real(B[8]);
    let v = &a6 * inner_v + &a6 * real(B[6]) + &a4 * real(B[4]) + &a2 * real(B[2]) + &id * real(B[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or(Error::NonFinite("expm Padé denominator is singular"))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_rel_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    }

    #[test]
    fn diagonal_exponential() {
        let d = [Complex64::new(-3.0, 40.0), Complex64::new(0.5, -7.0), Complex64::new(-20.0, 0.0)];
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d));
        let e = expm(&a).unwrap();
        for (i, z) in d.iter().enumerate() {
            assert!((e[(i, i)] - z.exp()).norm() < 1e-13 * z.exp().norm().max(1e-300) + 1e-300);
        }
        assert!(e[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn nilpotent_is_exact() {
        let mut a = DMatrix::<Complex64>::zeros(3, 3);
        a[(0, 1)] = real(2.0);
        a[(1, 2)] = real(3.0);
        let e = expm(&a).unwrap();
        assert!((e[(0, 2)] - real(3.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - real(2.0)).norm() < 1e-14);
    }

    #[test]
    fn agrees_with_independent_implementation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for scale in [0.1, 3.0, 40.0] {
            let a = DMatrix::from_fn(12, 12, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale / 12.0
            });
            // anti-Hermitian part keeps the exponential bounded
            let a = (&a - a.adjoint()) * real(0.5) - DMatrix::identity(12, 12) * real(0.1 * scale);
            let ours = expm(&a).unwrap();
            let theirs = a.clone().exp();
            assert!(max_rel_diff(&ours, &theirs) < 1e-12, "scale {scale}: {}", max_rel_diff(&ours, &theirs));
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(expm(&DMatrix::zeros(2, 3)).is_err());
    }
}
