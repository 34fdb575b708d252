mod common;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use common::{chi2_sf_df1_quadrature, chi2_sf_df3_quadrature, dense_loglik, simulate_rows};
use slotentropy::extract::ConstructionKind;
use slotentropy::stats::{chi2_sf, fit_lmm, fit_lmm_levels, lrt, permutation_test, LmmError, LongRow};

const LEVELS: [ConstructionKind; 4] = ConstructionKind::ALL;
const TRUE_BETA: [f64; 4] = [3.0, -0.5, 2.0, 2.0];

#[test]
fn chi2_tail_against_quadrature() {
    let p = chi2_sf(3.841459, 1);
    assert!((p - 0.05).abs() < 1e-5, "{p}");
    assert!((p - chi2_sf_df1_quadrature(3.841459)).abs() < 1e-6);

    let p = chi2_sf(0.0247, 1);
    assert!((0.874..=0.876).contains(&p), "{p}");
    assert!((p - chi2_sf_df1_quadrature(0.0247)).abs() < 1e-6);

    for x in [0.1, 1.0, 3.0, 7.814728, 12.0, 25.0] {
        let (a, b) = (chi2_sf(x, 3), chi2_sf_df3_quadrature(x));
        assert!((a - b).abs() < 1e-6, "x={x}: {a} vs {b}");
    }
    assert!((chi2_sf(7.814728, 3) - 0.05).abs() < 1e-5);
}

#[test]
fn loglik_matches_dense_covariance() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = simulate_rows(&mut rng, 8 + seed as usize, TRUE_BETA, 0.4, 0.3);
        for include in [true, false] {
            let fit = fit_lmm(&rows, include).unwrap();
            let levels: &[ConstructionKind] = if include { &LEVELS } else { &LEVELS[..1] };
            let dense = dense_loglik(&rows, levels, &fit.beta, fit.sigma_u2, fit.sigma_e2);
            assert!(
                (fit.loglik - dense).abs() < 1e-6,
                "seed {seed}: {} vs {dense}",
                fit.loglik
            );
        }
    }
}

#[test]
fn recovers_generating_coefficients() {
    let reps = 200;
    let mut covered = [0usize; 4];
    for seed in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let rows = simulate_rows(&mut rng, 36, TRUE_BETA, 0.4, 0.3);
        let fit = fit_lmm(&rows, true).unwrap();
        for j in 0..4 {
            if (fit.beta[j] - TRUE_BETA[j]).abs() <= 3.0 * fit.se[j] {
                covered[j] += 1;
            }
        }
    }
    for (j, c) in covered.iter().enumerate() {
        assert!(*c as f64 >= 0.95 * reps as f64, "coefficient {j}: {c}/{reps}");
    }
}

/// Profiled ML log-likelihood at a given λ = σu²/σe², from dense GLS.
fn dense_profile(rows: &[LongRow], lambda: f64) -> f64 {
    let n = rows.len();
    let x = DMatrix::from_fn(n, 4, |i, j| {
        if j == 0 {
            1.0
        } else {
            (rows[i].construction == LEVELS[j]) as u8 as f64
        }
    });
    let y = DVector::from_iterator(n, rows.iter().map(|r| r.entropy_bits));
    let v0 = DMatrix::from_fn(n, n, |i, j| {
        (rows[i].participle == rows[j].participle) as u8 as f64 * lambda + (i == j) as u8 as f64
    });
    let chol = v0.cholesky().unwrap();
    let vx = chol.solve(&x);
    let vy = chol.solve(&y);
    let beta = (x.transpose() * &vx).lu().solve(&(x.transpose() * &vy)).unwrap();
    let r = &y - &x * &beta;
    let se2 = r.dot(&chol.solve(&r)) / n as f64;
    dense_loglik(rows, &LEVELS, beta.as_slice(), lambda * se2, se2)
}

#[test]
fn optimum_dominates_a_dense_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let rows = simulate_rows(&mut rng, 12, TRUE_BETA, 0.4, 0.3);
    let fit = fit_lmm(&rows, true).unwrap();
    let best = (0..1000)
        .map(|i| {
            let ln_lambda = -18.0 + 36.0 * i as f64 / 999.0;
            dense_profile(&rows, ln_lambda.exp())
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(fit.loglik >= best - 1e-8, "{} < {best}", fit.loglik);
}

#[test]
fn invariant_under_shift_and_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows = simulate_rows(&mut rng, 20, TRUE_BETA, 0.4, 0.3);
    let base = fit_lmm(&rows, true).unwrap();
    let base_null = fit_lmm(&rows, false).unwrap();
    let base_lrt = lrt(&base, &base_null, 3).unwrap();

    let map = |f: &dyn Fn(f64) -> f64| -> Vec<LongRow> {
        rows.iter()
            .map(|r| LongRow::new(&r.participle, r.construction, f(r.entropy_bits)))
            .collect()
    };
    let shifted = fit_lmm(&map(&|y| y + 7.5), true).unwrap();
    for j in 1..4 {
        assert!((shifted.beta[j] - base.beta[j]).abs() < 1e-8);
        assert!((shifted.t[j] - base.t[j]).abs() < 1e-8);
    }
    assert!((shifted.beta[0] - base.beta[0] - 7.5).abs() < 1e-8);

    let k = 2.5;
    let scaled_rows = map(&|y| k * y);
    let scaled = fit_lmm(&scaled_rows, true).unwrap();
    let scaled_lrt = lrt(&scaled, &fit_lmm(&scaled_rows, false).unwrap(), 3).unwrap();
    for j in 0..4 {
        assert!((scaled.beta[j] - k * base.beta[j]).abs() < 1e-8);
        assert!((scaled.t[j] - base.t[j]).abs() < 1e-8);
    }
    assert!((scaled.sigma_e2 - k * k * base.sigma_e2).abs() < 1e-8);
    assert!((scaled_lrt.chi2 - base_lrt.chi2).abs() < 1e-8);
}

#[test]
fn single_group_is_rejected() {
    let rows: Vec<LongRow> = LEVELS.iter().map(|&k| LongRow::new("only", k, 1.0)).collect();
    assert_eq!(fit_lmm(&rows, true).unwrap_err(), LmmError::TooFewGroups(1));
}

#[test]
fn one_row_per_group_reduces_to_sample_moments() {
    let ys = [4.1, 3.7, 5.2, 4.9, 3.3, 4.4, 6.0, 2.8];
    let rows: Vec<LongRow> = ys
        .iter()
        .enumerate()
        .map(|(g, &y)| LongRow::new(&format!("p{g}"), ConstructionKind::Hyphenated, y))
        .collect();
    let fit = fit_lmm_levels(&rows, &LEVELS[..1], false).unwrap();
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
    assert!((fit.beta[0] - mean).abs() < 1e-10);
    assert!((fit.sigma_u2 + fit.sigma_e2 - var).abs() < 1e-8);
}

#[test]
fn chi2_tail_is_monotone_and_bounded() {
    for df in [1, 2, 3, 5] {
        let mut prev = 1.0;
        for i in 0..400 {
            let p = chi2_sf(i as f64 * 0.1, df);
            assert!((0.0..=1.0).contains(&p));
            assert!(p <= prev);
            prev = p;
        }
    }
    assert_eq!(chi2_sf(0.0, 1), 1.0);
    assert!(chi2_sf(260.79, 3) < 1e-50);
}

#[test]
fn permutation_test_is_calibrated_under_the_null() {
    let noise = Normal::new(0.0, 0.3).unwrap();
    let group = Normal::new(0.0, 0.4).unwrap();
    let reps = 1000u64;
    let mut rejections = 0;
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + rep);
        let mut rows = Vec::new();
        for g in 0..36 {
            let u = group.sample(&mut rng);
            let name = format!("p{g:02}");
            for k in [ConstructionKind::Passive, ConstructionKind::ReducedRelative] {
                rows.push(LongRow::new(&name, k, 5.0 + u + noise.sample(&mut rng)));
            }
        }
        let r = permutation_test(
            &rows,
            (ConstructionKind::Passive, ConstructionKind::ReducedRelative),
            999,
            rep,
        )
        .unwrap();
        if r.p <= 0.05 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / reps as f64;
    assert!((0.03..=0.07).contains(&rate), "false-positive rate {rate}");
}
