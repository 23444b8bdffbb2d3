use pdim::partition::{brute_force_p, dyadic_eps, SeparationInstance};
use pdim::potentials::{AlmostAdditiveSeq, PointFn, PositiveMatrix};
use pdim::symbolic::{exact_growth_table, q_p_exact, weighted_word_sum, word_count, CylinderCover, TransferMatrix};
use pdim::systems::{bowen_metric, SystemModel, TimeMap};

fn golden() -> SystemModel {
    SystemModel::sft(vec![vec![1, 1], vec![1, 0]]).unwrap()
}

fn sigma2() -> SystemModel {
    SystemModel::full_shift(2).unwrap()
}

#[test]
fn word_counts() {
    assert_eq!(word_count(&sigma2(), 3).unwrap(), 8);
    assert_eq!(word_count(&SystemModel::full_shift(3).unwrap(), 1).unwrap(), 3);
    let (mut a, mut b) = (1u128, 2u128);
    for n in 1..=90 {
        assert_eq!(word_count(&golden(), n).unwrap(), b, "n = {n}");
        (a, b) = (b, a + b);
    }
}

#[test]
fn cylinder_joins() {
    let c = CylinderCover::new(&sigma2(), 1).unwrap();
    assert_eq!(c.join(1).unwrap().len().unwrap(), 2);
    assert_eq!(c.join(3).unwrap().len().unwrap(), 8);
    let g = CylinderCover::new(&golden(), 2).unwrap();
    assert_eq!(g.join(2).unwrap().elements().unwrap().len(), 5);
}

#[test]
fn cover_sums_by_hand() {
    let s = sigma2();
    let cover = CylinderCover::new(&s, 1).unwrap();
    let (q, p) = q_p_exact(&AlmostAdditiveSeq::zero(&s), &cover, 3).unwrap();
    assert!((q - 8f64.ln()).abs() < 1e-12 && (p - 8f64.ln()).abs() < 1e-12);
    let (q, _) = q_p_exact(&AlmostAdditiveSeq::drift(&s, 1.0), &cover, 3).unwrap();
    assert!((q - (3.0 + 8f64.ln())).abs() < 1e-12);
    let mats = vec![
        PositiveMatrix::scalar(2.0).unwrap(),
        PositiveMatrix::scalar(3.0).unwrap(),
    ];
    let phi = AlmostAdditiveSeq::cocycle(&s, mats).unwrap();
    let (q, p) = q_p_exact(&phi, &cover, 3).unwrap();
    // sum over the 8 words of 2^{#0} 3^{#1} = (2 + 3)^3
    assert!((q - 125f64.ln()).abs() < 1e-12 && (p - 125f64.ln()).abs() < 1e-12);
}

#[test]
fn canonical_candidates_are_pairwise_separated() {
    let s = sigma2();
    let time = TimeMap::forward(s.clone());
    let k = 2;
    let eps = dyadic_eps(k);
    let zero = AlmostAdditiveSeq::zero(&s);
    let (_, sep) = exact_growth_table(&zero, k, &[1, 2, 3, 4, 5, 6]).unwrap();
    for (n, sample) in (1..=6).zip(&sep) {
        let reps: Vec<_> = s
            .admissible_words(n + k)
            .unwrap()
            .iter()
            .map(|w| s.representative(w).unwrap())
            .collect();
        for i in 0..reps.len() {
            for j in (i + 1)..reps.len() {
                assert!(bowen_metric(&time, n, &reps[i], &reps[j]).unwrap() > eps);
            }
        }
        assert!((sample.log_value - (n + k) as f64 * 2f64.ln()).abs() < 1e-12);
        if reps.len() <= 20 {
            let inst = SeparationInstance::for_potential(&zero, n, eps, reps).unwrap();
            assert!((brute_force_p(&inst).unwrap().log_value - sample.log_value).abs() < 1e-12);
        }
    }
}

#[test]
fn drift_tables_add_na() {
    let s = sigma2();
    let (_, sep) = exact_growth_table(&AlmostAdditiveSeq::drift(&s, 0.5), 2, &[4, 16, 64]).unwrap();
    for x in sep {
        let expected = 0.5 * x.n as f64 + (x.n + 2) as f64 * 2f64.ln();
        assert!((x.log_value - expected).abs() < 1e-9);
    }
}

fn power_iteration(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    let mut v = vec![1.0; d];
    let mut rho = 0.0;
    for _ in 0..1000 {
        let w: Vec<f64> = (0..d).map(|i| (0..d).map(|j| m[i][j] * v[j]).sum()).collect();
        let norm: f64 = w.iter().sum();
        rho = norm / v.iter().sum::<f64>();
        v = w.iter().map(|x| x / norm).collect();
    }
    rho
}

#[test]
fn cocycle_growth_approaches_spectral_radius() {
    let s = sigma2();
    let a = vec![vec![1.0, 2.0], vec![0.5, 3.0]];
    let b = vec![vec![2.0, 1.0], vec![1.0, 1.5]];
    let sum: Vec<Vec<f64>> = (0..2).map(|i| (0..2).map(|j| a[i][j] + b[i][j]).collect()).collect();
    let target = power_iteration(&sum).ln();
    let phi = AlmostAdditiveSeq::cocycle(
        &s,
        vec![PositiveMatrix::new(a).unwrap(), PositiveMatrix::new(b).unwrap()],
    )
    .unwrap();
    let mut last = f64::INFINITY;
    for n in [10, 40, 160] {
        let err = (weighted_word_sum(&phi, n, n).unwrap() / n as f64 - target).abs();
        assert!(err < last, "error should shrink with n");
        last = err;
    }
    assert!(last / target < 0.02, "{last}");
    let scalar = AlmostAdditiveSeq::cocycle(
        &s,
        vec![
            PositiveMatrix::scalar(2.0).unwrap(),
            PositiveMatrix::scalar(3.0).unwrap(),
        ],
    )
    .unwrap();
    let pd = weighted_word_sum(&scalar, 14, 14).unwrap() / 14.0;
    assert!((pd - power_iteration(&[vec![5.0]]).ln()).abs() < 1e-9);
}

#[test]
fn transfer_matrix_counts_weighted_words() {
    let g = golden();
    let t = TransferMatrix::new(&g, &[1.0, 1.0]).unwrap();
    assert!((t.log_weighted_count(10).unwrap() - (word_count(&g, 10).unwrap() as f64).ln()).abs() < 1e-9);
    let t = TransferMatrix::new(&g, &[2.0, 3.0]).unwrap();
    let direct: f64 = g
        .admissible_words(8)
        .unwrap()
        .iter()
        .map(|w| w.iter().map(|&a| [2.0, 3.0][a as usize]).product::<f64>())
        .sum();
    assert!((t.log_weighted_count(8).unwrap() - direct.ln()).abs() < 1e-9);
}

#[test]
fn locality_is_enforced() {
    let s = sigma2();
    let phi = AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 3, vec![0.1; 8]).unwrap()).unwrap();
    assert!(weighted_word_sum(&phi, 4, 4).is_err());
    assert!(weighted_word_sum(&phi, 4, 6).is_ok());
    let d = AlmostAdditiveSeq::birkhoff(&SystemModel::Doubling, PointFn::Identity).unwrap();
    assert!(weighted_word_sum(&d, 2, 10).is_err());
}
