use rustfft::num_complex::Complex64;

use super::transform::{fft_size, grid, synthesize};
use super::SpectralField;

/// `(Σ_k (1 + k²)^s |û_k|²)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    field
        .iter()
        .map(|(k, c)| {
            let kf = k as f64;
            (1.0 + kf * kf).powf(s) * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// Evaluates the trigonometric polynomial at an arbitrary point.
pub fn evaluate(field: &SpectralField, x: f64) -> Complex64 {
    field
        .iter()
        .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * x))
        .sum()
}

/// Largest modulus of the band-limited field.
///
/// Scans an oversampled grid (`M ≥ 4K+1`), then polishes every grid-local
/// maximum within a factor two of the best one by golden-section search on
/// the interpolant. The result is an attained value, hence a lower bound of
/// the true supremum.
pub fn sup_norm(field: &SpectralField) -> f64 {
    let m = fft_size(4 * field.k_max() + 1);
    let values: Vec<f64> = synthesize(field, m)
        .expect("oversampled grid holds the band")
        .iter()
        .map(|s| s.norm())
        .collect();
    let grid_max = values.iter().copied().fold(0.0, f64::max);
    if grid_max == 0.0 || field.k_max() == 0 {
        return grid_max;
    }
    let xs = grid(m);
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let mut best = grid_max;
    for j in 0..m {
        let v = values[j];
        if v < 0.5 * grid_max || v < values[(j + m - 1) % m] || v < values[(j + 1) % m] {
            continue;
        }
        best = best.max(golden_max(field, xs[j] - h, xs[j] + h));
    }
    best
}

fn golden_max(field: &SpectralField, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |x: f64| evaluate(field, x).norm();
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..64 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sobolev_examples() {
        let e1 = SpectralField::mode(4, 1, c(1.0, 0.0));
        for s in [-2.0, 0.0, 1.5, 3.0] {
            assert!((sobolev_norm(&e1, s) - 2f64.powf(0.5 * s)).abs() < 1e-14);
        }
        let one = SpectralField::constant(4, c(1.0, 0.0));
        assert_eq!(sobolev_norm(&one, 7.0), 1.0);
        let mut f = SpectralField::zeros(4);
        f.set(1, c(1.0, 0.0));
        f.set(2, c(1.0, 0.0));
        assert!((sobolev_norm(&f, 1.0) - 7f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sup_examples() {
        assert!((sup_norm(&SpectralField::mode(3, 1, c(1.0, 0.0))) - 1.0).abs() < 1e-14);
        let mut cos2 = SpectralField::zeros(5);
        cos2.set(1, c(1.0, 0.0));
        cos2.set(-1, c(1.0, 0.0));
        assert!((sup_norm(&cos2) - 2.0).abs() < 1e-10);
        assert_eq!(sup_norm(&SpectralField::zeros(3)), 0.0);
    }

    /// Brute force: direct evaluation on a grid 8x finer than the scan grid,
    /// then a dense 2000-point sweep around the best fine-grid point.
    fn brute_sup(field: &SpectralField) -> f64 {
        let m = 8 * fft_size(4 * field.k_max() + 1);
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let (mut best_x, mut best) = (0.0, 0.0);
        for j in 0..m {
            let x = j as f64 * h;
            let v = evaluate(field, x).norm();
            if v > best {
                best = v;
                best_x = x;
            }
        }
        for i in 0..=2000 {
            let x = best_x - h + 2.0 * h * i as f64 / 2000.0;
            best = best.max(evaluate(field, x).norm());
        }
        best
    }

    #[test]
    fn sup_matches_fine_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let f = SpectralField::from_fn(16, |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let oracle = brute_sup(&f);
            let got = sup_norm(&f);
            assert!(((oracle - got) / oracle).abs() < 1e-6, "oracle {oracle} got {got}");
        }
    }
}
