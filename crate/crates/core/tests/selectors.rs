use featsel::selectors::{
    first_left_singular_vector_with_diagnostics, score_svd, score_thresholding, zero_one_loss, CrossCovMatrix, MethodKind,
    Ranking, ScoreVector,
};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn matrix_strategy(max_p: usize, max_q: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_p, 1..=max_q).prop_flat_map(|(p, q)| {
        prop::collection::vec(-10.0f64..10.0, p * q).prop_map(move |v| DMatrix::from_row_slice(p, q, &v))
    })
}

/// Row maxima by explicit nested loops.
fn thresholding_oracle(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        let mut best = 0.0f64;
        for j in 0..m.ncols() {
            if m[(i, j)].abs() > best {
                best = m[(i, j)].abs();
            }
        }
        out.push(best);
    }
    out
}

/// |u1| from a dense eigendecomposition of `T Tᵀ`, or `T v1 / σ1` from `Tᵀ T`.
fn svd_oracle(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    let (p, q) = m.shape();
    let (gram, left) = if p <= q { (m * m.transpose(), true) } else { (m.transpose() * m, false) };
    let eig = SymmetricEigen::new(gram);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[idx[0]];
    if top <= 0.0 {
        return None;
    }
    // Skip near-degenerate spectra; the top direction is not unique there.
    if idx.len() > 1 && (top - eig.eigenvalues[idx[1]]) < 1e-6 * top {
        return None;
    }
    let v = eig.eigenvectors.column(idx[0]).into_owned();
    let u = if left { v } else { (m * v) / top.sqrt() };
    Some(u.iter().map(|x| x.abs()).collect())
}

/// Selection-sort argsort: repeatedly take the largest remaining score,
/// lowest index first among equals.
fn argsort_oracle(scores: &[f64]) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..scores.len()).collect();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let mut best = 0;
        for k in 1..remaining.len() {
            if scores[remaining[k]] > scores[remaining[best]] {
                best = k;
            }
        }
        out.push(remaining.remove(best));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn thresholding_matches_nested_loops(m in matrix_strategy(12, 8)) {
        let t = CrossCovMatrix::new(m.clone()).unwrap();
        prop_assert_eq!(score_thresholding(&t).into_inner(), thresholding_oracle(&m));
    }

    #[test]
    fn svd_matches_dense_eigensolver(m in matrix_strategy(12, 8)) {
        let t = CrossCovMatrix::new(m.clone()).unwrap();
        if let Some(expected) = svd_oracle(&m) {
            let got = score_svd(&t).unwrap().into_inner();
            for (g, e) in got.iter().zip(&expected) {
                prop_assert!((g - e).abs() < 1e-6, "{} vs {}", g, e);
            }
        }
    }

    #[test]
    fn singular_vector_postconditions(m in matrix_strategy(10, 10)) {
        let t = CrossCovMatrix::new(m.clone()).unwrap();
        if let Ok((u, diag)) = first_left_singular_vector_with_diagnostics(&t) {
            prop_assert!((u.norm() - 1.0).abs() < 1e-10);
            let imax = u.iamax();
            prop_assert!(u[imax] > 0.0);
            if !diag.near_tie {
                let residual = (&m * m.transpose() * &u - &u * diag.sigma1.powi(2)).norm();
                prop_assert!(residual <= 1e-8 * diag.sigma1.powi(2).max(1.0));
            }
        }
    }

    #[test]
    fn ranking_is_a_permutation_and_matches_argsort(scores in prop::collection::vec(0.0f64..5.0, 1..40)) {
        let sv = ScoreVector::new(scores.clone()).unwrap();
        let r = Ranking::from_scores(&sv);
        let mut sorted = r.order().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..scores.len()).collect::<Vec<_>>());
        prop_assert_eq!(r.order().to_vec(), argsort_oracle(&scores));
        let ranks = r.ranks();
        for (pos, &j) in r.order().iter().enumerate() {
            prop_assert_eq!(ranks[j], pos + 1);
        }
    }

    #[test]
    fn tied_scores_rank_by_index(levels in prop::collection::vec(0u8..3, 1..30)) {
        let scores: Vec<f64> = levels.iter().map(|&l| l as f64).collect();
        let r = Ranking::from_scores(&ScoreVector::new(scores.clone()).unwrap());
        prop_assert_eq!(r.order().to_vec(), argsort_oracle(&scores));
    }

    #[test]
    fn positive_scale_invariance(m in matrix_strategy(10, 6), c in 1e-3f64..1e3) {
        let t = CrossCovMatrix::new(m).unwrap();
        let tc = t.scaled(c).unwrap();
        for method in MethodKind::ALL {
            if let (Ok(a), Ok(b)) = (method.score(&t), method.score(&tc)) {
                let (ra, rb) = (Ranking::from_scores(&a), Ranking::from_scores(&b));
                // Scores that differ by rounding only can swap; compare where the gap is resolvable.
                if min_gap(a.as_slice()) > 1e-9 {
                    prop_assert_eq!(ra, rb);
                }
            }
        }
    }

    #[test]
    fn column_permutation_invariance(m in matrix_strategy(10, 6), seed in any::<u64>()) {
        let q = m.ncols();
        let mut perm: Vec<usize> = (0..q).collect();
        let mut s = seed;
        for k in (1..q).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(k, (s >> 33) as usize % (k + 1));
        }
        let mp = DMatrix::from_fn(m.nrows(), q, |i, j| m[(i, perm[j])]);
        let (t, tp) = (CrossCovMatrix::new(m).unwrap(), CrossCovMatrix::new(mp).unwrap());
        prop_assert_eq!(score_thresholding(&t), score_thresholding(&tp));
        if let (Ok(a), Ok(b)) = (score_svd(&t), score_svd(&tp)) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((x - y).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rank_one_rankings_agree(
        a in prop::collection::vec(-5.0f64..5.0, 1..15),
        b in prop::collection::vec(-5.0f64..5.0, 1..8),
    ) {
        prop_assume!(b.iter().any(|v| v.abs() > 1e-3));
        prop_assume!(min_gap(&a.iter().map(|v| v.abs()).collect::<Vec<_>>()) > 1e-6);
        let m = DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]);
        let t = CrossCovMatrix::new(m).unwrap();
        if a.iter().any(|v| v.abs() > 1e-3) {
            let rt = Ranking::from_scores(&score_thresholding(&t));
            let rs = Ranking::from_scores(&score_svd(&t).unwrap());
            prop_assert_eq!(rt, rs);
        }
    }

    #[test]
    fn scores_are_deterministic(m in matrix_strategy(8, 8)) {
        let t = CrossCovMatrix::new(m).unwrap();
        for method in MethodKind::ALL {
            let a = method.score(&t).map(|s| s.into_inner());
            let b = method.score(&t).map(|s| s.into_inner());
            prop_assert_eq!(a, b);
        }
    }
}

/// Smallest relative gap between distinct sorted values.
fn min_gap(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s.windows(2).map(|w| (w[1] - w[0]) / w[1].abs().max(1e-300)).fold(f64::INFINITY, f64::min)
}

#[test]
fn rank_one_equivalence_on_a_thousand_instances() {
    use featsel::rng::StreamSeed;
    use rand_distr::{Distribution, StandardNormal};
    for i in 0..1_000u64 {
        let mut rng = StreamSeed::new(i).rng();
        let p = 1 + (i % 17) as usize;
        let q = 1 + (i % 5) as usize;
        let a: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..q).map(|_| StandardNormal.sample(&mut rng)).collect();
        let t = CrossCovMatrix::new(DMatrix::from_fn(p, q, |r, c| a[r] * b[c])).unwrap();
        let rt = Ranking::from_scores(&score_thresholding(&t));
        let rs = Ranking::from_scores(&score_svd(&t).unwrap());
        assert_eq!(rt, rs, "instance {i}");
    }
}

#[test]
fn loss_examples() {
    let r = Ranking::from_order(vec![3, 0, 1, 2]).unwrap();
    assert_eq!(zero_one_loss(&r, 2), 1);
    assert_eq!(zero_one_loss(&r, 4), 0);
}
