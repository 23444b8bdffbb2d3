use pdim::partition::{
    brute_force_p, brute_force_q, count_spanning_separated, greedy_separated, greedy_spanning, p_lower, q_upper,
    GreedyOrder, SeparationInstance,
};
use pdim::potentials::AlmostAdditiveSeq;
use pdim::systems::{bowen_metric, Point, SystemModel, TimeMap};
use pdim::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exhaustive `(log P, log Q, s, r)` straight from the definitions.
fn naive(d: &[Vec<f64>], w: &[f64], eps: f64) -> (f64, f64, usize, usize) {
    let m = w.len();
    let (mut p, mut q) = (0.0f64, f64::INFINITY);
    let (mut s, mut r) = (usize::MAX, 0);
    for mask in 1u32..(1 << m) {
        let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let total: f64 = members.iter().map(|&i| w[i].exp()).sum();
        let separated = members
            .iter()
            .all(|&i| members.iter().all(|&j| i == j || d[i][j] > eps));
        let spanning = (0..m).all(|x| members.iter().any(|&i| d[i][x] < eps));
        if separated {
            p = p.max(total);
            r = r.max(members.len());
        }
        if spanning {
            q = q.min(total);
            s = s.min(members.len());
        }
    }
    (p.ln(), q.ln(), s, r)
}

fn fixture() -> Vec<Point> {
    [0.0, 0.3, 0.6, 0.9].map(Point::real).to_vec()
}

fn zero_instance(eps: f64) -> SeparationInstance {
    let r = SystemModel::rotation(0.3).unwrap();
    SeparationInstance::for_potential(&AlmostAdditiveSeq::zero(&r), 1, eps, fixture()).unwrap()
}

#[test]
fn four_point_rotation_instances() {
    let inst = zero_instance(0.25);
    assert_eq!(greedy_separated(&inst, GreedyOrder::ByIndex), vec![0, 1, 2]);
    assert!((p_lower(&inst).unwrap().log_value - 3f64.ln()).abs() < 1e-12);
    assert!((brute_force_p(&inst).unwrap().log_value - 3f64.ln()).abs() < 1e-12);
    let (s, r) = count_spanning_separated(&inst).unwrap();
    assert!(s <= r);

    let wide = zero_instance(0.5);
    assert_eq!(greedy_spanning(&wide), vec![0]);
    assert_eq!(q_upper(&wide).unwrap().log_value, 0.0);
    assert_eq!(brute_force_q(&wide).unwrap().log_value, 0.0);
}

#[test]
fn degenerate_instances() {
    let r = SystemModel::rotation(0.3).unwrap();
    let one =
        SeparationInstance::for_potential(&AlmostAdditiveSeq::drift(&r, 0.7), 2, 0.1, vec![Point::real(0.4)]).unwrap();
    assert!((brute_force_p(&one).unwrap().log_value - 1.4).abs() < 1e-12);
    assert!((brute_force_q(&one).unwrap().log_value - 1.4).abs() < 1e-12);
    assert_eq!(count_spanning_separated(&one).unwrap(), (1, 1));

    let empty = SeparationInstance::for_potential(&AlmostAdditiveSeq::zero(&r), 1, 0.1, vec![]).unwrap();
    assert_eq!(p_lower(&empty).unwrap_err(), Error::EmptyInstance);

    // pair at distance 2 eps: both kept
    let pair = SeparationInstance::from_distances(1, 0.1, fixture()[..2].to_vec(), vec![0.5, -0.5], vec![0.2]).unwrap();
    let expected = (0.5f64.exp() + (-0.5f64).exp()).ln();
    assert!((brute_force_p(&pair).unwrap().log_value - expected).abs() < 1e-12);
    // eps below every distance: everything is needed to span
    assert!((brute_force_q(&pair.with_eps(0.01)).unwrap().log_value - expected).abs() < 1e-12);

    let equal =
        SeparationInstance::from_distances(1, 0.25, fixture(), vec![0.3; 4], zero_instance(0.25).distances()).unwrap();
    let (_, r) = count_spanning_separated(&equal).unwrap();
    let greedy_r = greedy_separated(&equal, GreedyOrder::ByWeightDesc).len();
    assert!((p_lower(&equal).unwrap().log_value - (0.3 + (greedy_r as f64).ln())).abs() < 1e-12);
    assert_eq!(greedy_r, r);
}

trait Distances {
    fn distances(&self) -> Vec<f64>;
}

impl Distances for SeparationInstance {
    fn distances(&self) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .map(|(i, j)| self.distance(i, j))
            .collect()
    }
}

#[test]
fn oracles_match_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..150 {
        let sys = match trial % 3 {
            0 => SystemModel::rotation(rng.gen_range(0.0..1.0)).unwrap(),
            1 => SystemModel::Doubling,
            _ => SystemModel::full_shift(2).unwrap(),
        };
        let time = TimeMap::forward(sys.clone());
        let m = rng.gen_range(1..=10);
        let n = rng.gen_range(1..=3);
        let eps = rng.gen_range(0.05..0.5);
        let pts: Vec<Point> = (0..m).map(|_| sys.sample_point(&mut rng, 10).unwrap()).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let d: Vec<Vec<f64>> = pts
            .iter()
            .map(|x| pts.iter().map(|y| bowen_metric(&time, n, x, y).unwrap()).collect())
            .collect();
        let inst = SeparationInstance::new(&time, n, eps, pts.clone(), w.clone()).unwrap();
        let (p, q, s, r) = naive(&d, &w, eps);
        assert!(
            (brute_force_p(&inst).unwrap().log_value - p).abs() < 1e-9,
            "trial {trial}"
        );
        assert!(
            (brute_force_q(&inst).unwrap().log_value - q).abs() < 1e-9,
            "trial {trial}"
        );
        assert_eq!(count_spanning_separated(&inst).unwrap(), (s, r), "trial {trial}");
        assert!(p_lower(&inst).unwrap().log_value <= p + 1e-9);
        assert!(q_upper(&inst).unwrap().log_value >= q - 1e-9);
    }
}

#[test]
fn spanning_separated_triple() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let r = SystemModel::rotation(0.41).unwrap();
    let zero = AlmostAdditiveSeq::zero(&r);
    for _ in 0..100 {
        let m = rng.gen_range(1..=12);
        let pts: Vec<Point> = (0..m).map(|_| Point::real(rng.gen())).collect();
        let eps = rng.gen_range(0.02..0.4);
        let n = rng.gen_range(1..=3);
        let (s, r1) =
            count_spanning_separated(&SeparationInstance::for_potential(&zero, n, eps, pts.clone()).unwrap()).unwrap();
        let (s_half, _) =
            count_spanning_separated(&SeparationInstance::for_potential(&zero, n, eps / 2.0, pts).unwrap()).unwrap();
        assert!(s <= r1 && r1 <= s_half, "{s} {r1} {s_half}");
    }
}

#[test]
fn oversized_oracle_is_refused() {
    let r = SystemModel::rotation(0.3).unwrap();
    let pts: Vec<Point> = (0..21).map(|i| Point::real(i as f64 / 21.0)).collect();
    let inst = SeparationInstance::for_potential(&AlmostAdditiveSeq::zero(&r), 1, 0.01, pts).unwrap();
    assert!(matches!(brute_force_p(&inst), Err(Error::InstanceTooLarge { .. })));
}
