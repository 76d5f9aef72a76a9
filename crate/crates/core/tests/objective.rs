use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tvprox::linalg::{dist, norm};
use tvprox::objective::{
    parse_libsvm_str, shard, sigmoid, synthetic, write_libsvm, Dataset, LocalObjective, Sample,
};
use tvprox::Error;

fn lipschitz_probe(obj: &LocalObjective, pairs: usize, scale: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = obj.lipschitz_bound();
    for _ in 0..pairs {
        let x: Vec<f64> = (0..obj.dim())
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| v + rng.gen_range(-0.5..0.5) * scale)
            .collect();
        let gx = obj.gradient(&x).unwrap();
        let gy = obj.gradient(&y).unwrap();
        assert!(dist(&gx, &gy) <= l * dist(&x, &y) * (1.0 + 1e-8));
    }
}

#[test]
fn sigmoid_lipschitz_probe() {
    let data = synthetic::one_hot_classification(80, 12);
    let obj = LocalObjective::sigmoid(data).unwrap();
    lipschitz_probe(&obj, 10_000, 1.0, 13);
}

#[test]
fn quadratic_lipschitz_probe() {
    for q in synthetic::random_quadratics(3, 6, 14) {
        lipschitz_probe(&LocalObjective::quadratic(q), 10_000, 5.0, 15);
    }
}

#[test]
fn single_unit_sample_lipschitz_is_curvature_constant() {
    let d = parse_libsvm_str("+1 1:1", None).unwrap();
    let obj = LocalObjective::sigmoid(d).unwrap();
    assert!((obj.lipschitz_bound() - 1.0 / (6.0 * 3f64.sqrt())).abs() < 1e-9);
    assert!((obj.lipschitz_bound() - 0.09623).abs() < 1e-5);
}

#[test]
fn sigmoid_examples() {
    let d = parse_libsvm_str("+1 1:1\n-1 2:2", None).unwrap();
    assert_eq!(sigmoid::loss_value(&[0.0, 0.0], &d).unwrap(), 0.5);
    let one = parse_libsvm_str("+1 1:1", None).unwrap();
    assert!((sigmoid::loss_value(&[3f64.ln()], &one).unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(sigmoid::loss_grad(&[0.0], &one).unwrap(), vec![-0.25]);
    let neg = parse_libsvm_str("-1 1:2", None).unwrap();
    assert_eq!(sigmoid::loss_grad(&[0.0], &neg).unwrap(), vec![0.5]);
    let mut last = 1.0;
    for s in [0.5, 1.0, 2.0, 8.0, 40.0] {
        let v = sigmoid::loss_value(&[s], &one).unwrap();
        assert!(v < last);
        last = v;
    }
}

#[test]
fn sigmoid_gradient_bound_by_sampling() {
    let data = synthetic::one_hot_classification(60, 16);
    let obj = LocalObjective::sigmoid(data.clone()).unwrap();
    let bound = 0.25 * data.mean_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let x: Vec<f64> = (0..data.n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        assert!(norm(&obj.gradient(&x).unwrap()) <= bound);
    }
}

#[test]
fn libsvm_examples_and_errors() {
    let d = parse_libsvm_str("+1 3:1.5", None).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.n, 3);
    assert_eq!(d.samples[0].indices, vec![2]);
    assert_eq!(d.samples[0].values, vec![1.5]);

    let z = parse_libsvm_str("0 1:1\n1 2:1", None).unwrap();
    assert_eq!(z.samples[0].label, -1.0);
    assert_eq!(z.samples[1].label, 1.0);
    assert_eq!(parse_libsvm_str("+1 1:1", Some(10)).unwrap().n, 10);

    assert!(matches!(
        parse_libsvm_str("+1 1:1\n-1 2:x", None),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(matches!(
        parse_libsvm_str("+1 3:1 2:1", None),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(parse_libsvm_str("1 1:1\n2 1:1\n3 1:1", None).is_err());
}

#[test]
fn shard_examples() {
    let data = synthetic::one_hot_classification(10, 18);
    let sizes: Vec<usize> = shard(&data, 3, 1)
        .unwrap()
        .iter()
        .map(Dataset::len)
        .collect();
    assert_eq!(sizes, vec![4, 3, 3]);
    assert_eq!(shard(&data, 1, 1).unwrap(), vec![data.clone()]);
    assert_eq!(shard(&data, 3, 9).unwrap(), shard(&data, 3, 9).unwrap());
    assert!(shard(&data, 11, 1).is_err());

    let mut all: Vec<Sample> = shard(&data, 4, 2)
        .unwrap()
        .into_iter()
        .flat_map(|d| d.samples)
        .collect();
    let mut orig = data.samples.clone();
    let key = |s: &Sample| format!("{:?}", s);
    all.sort_by_key(key);
    orig.sort_by_key(key);
    assert_eq!(all, orig);
}

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    let sample = (
        prop::bool::ANY,
        prop::collection::btree_map(0usize..30, -1e3f64..1e3, 0..6),
    )
        .prop_map(|(pos, feats)| Sample {
            indices: feats.keys().copied().collect(),
            values: feats.values().copied().collect(),
            label: if pos { 1.0 } else { -1.0 },
        });
    prop::collection::vec(sample, 1..20).prop_map(|s| Dataset::new(s, 30).unwrap())
}

proptest! {
    #[test]
    fn libsvm_round_trip(d in arb_dataset()) {
        let mut buf = Vec::new();
        write_libsvm(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = parse_libsvm_str(&text, Some(30)).unwrap();
        prop_assert_eq!(back, d);
    }
}
