use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn stochastic(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn random_schema(rng: &mut ChaCha8Rng, n_features: usize) -> Vec<FeatureSpec> {
    (0..n_features)
        .map(|i| {
            let kind = match rng.gen_range(0..3) {
                0 => FeatureKind::Linear,
                1 => FeatureKind::Angular,
                _ => FeatureKind::Discrete { cardinality: rng.gen_range(2..4) },
            };
            FeatureSpec { name: format!("f{i}"), kind }
        })
        .collect()
}

fn random_hmm(rng: &mut ChaCha8Rng, n: usize, schema: Vec<FeatureSpec>) -> Hmm {
    let outputs = (0..n)
        .map(|_| {
            schema
                .iter()
                .map(|f| match f.kind {
                    FeatureKind::Linear => OutputDist::Gaussian { mean: rng.gen_range(-2.0..2.0), var: rng.gen_range(0.2..3.0) },
                    FeatureKind::Angular => OutputDist::VonMises { mu: rng.gen_range(-3.0..3.0), kappa: rng.gen_range(0.0..5.0) },
                    FeatureKind::Discrete { cardinality } => OutputDist::Categorical(stochastic(rng, cardinality)),
                })
                .collect()
        })
        .collect();
    Hmm { initial: stochastic(rng, n), transitions: (0..n).map(|_| stochastic(rng, n)).collect(), outputs, schema }
}

fn random_series(rng: &mut ChaCha8Rng, schema: &[FeatureSpec], t: usize) -> FeatureSeries {
    let frames = (0..t)
        .map(|_| {
            schema
                .iter()
                .map(|f| match f.kind {
                    FeatureKind::Linear => rng.gen_range(-3.0..3.0),
                    FeatureKind::Angular => rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                    FeatureKind::Discrete { cardinality } => rng.gen_range(0..cardinality) as f64,
                })
                .collect()
        })
        .collect();
    FeatureSeries { schema: schema.to_vec(), start_frame: 0, frames }
}

/// Every state path, with its joint log-probability.
fn enumerate_paths(hmm: &Hmm, series: &FeatureSeries) -> Vec<(Vec<usize>, f64)> {
    let n = hmm.n_states();
    let t = series.len();
    let emit = |s: usize, row: &[f64]| -> f64 { hmm.outputs[s].iter().zip(row).map(|(o, &x)| o.log_density(x)).sum() };
    let mut out = Vec::new();
    for code in 0..n.pow(t as u32) {
        let mut c = code;
        let path: Vec<usize> = (0..t)
            .map(|_| {
                let s = c % n;
                c /= n;
                s
            })
            .collect();
        let mut lp = hmm.initial[path[0]].ln() + emit(path[0], &series.frames[0]);
        for k in 1..t {
            lp += hmm.transitions[path[k - 1]][path[k]].ln() + emit(path[k], &series.frames[k]);
        }
        out.push((path, lp));
    }
    out
}

#[test]
fn forward_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let nf = rng.gen_range(1..=2);
        let schema = random_schema(&mut rng, nf);
        let hmm = random_hmm(&mut rng, n, schema.clone());
        let t = rng.gen_range(1..=5);
        let series = random_series(&mut rng, &schema, t);
        let paths = enumerate_paths(&hmm, &series);
        let lps: Vec<f64> = paths.iter().map(|p| p.1).collect();
        let oracle = log_sum_exp(&lps);
        let got = log_forward(&hmm, &series).unwrap();
        assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
    }
}

#[test]
fn viterbi_matches_enumeration_and_bounds_forward() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let schema = random_schema(&mut rng, 2);
        let hmm = random_hmm(&mut rng, n, schema.clone());
        let t = rng.gen_range(1..=5);
        let series = random_series(&mut rng, &schema, t);
        let paths = enumerate_paths(&hmm, &series);
        let best = paths.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let (path, lp) = viterbi_decode(&hmm, &series).unwrap();
        assert!((lp - best).abs() < 1e-9);
        let own = paths.iter().find(|p| p.0 == path).unwrap().1;
        assert!((own - best).abs() < 1e-9);
        assert!(lp <= log_forward(&hmm, &series).unwrap() + 1e-12);
    }
}

#[test]
fn one_state_categorical_is_sum_of_symbol_logs() {
    let p = vec![0.1, 0.6, 0.3];
    let hmm = Hmm {
        schema: vec![FeatureSpec { name: "c".into(), kind: FeatureKind::Discrete { cardinality: 3 } }],
        initial: vec![1.0],
        transitions: vec![vec![1.0]],
        outputs: vec![vec![OutputDist::Categorical(p.clone())]],
    };
    let obs = [0.0, 1.0, 1.0, 2.0];
    let series = FeatureSeries { schema: hmm.schema.clone(), start_frame: 0, frames: obs.iter().map(|&x| vec![x]).collect() };
    let want: f64 = obs.iter().map(|&x| p[x as usize].ln()).sum();
    assert!((log_forward(&hmm, &series).unwrap() - want).abs() < 1e-12);

    let mut zero = hmm.clone();
    zero.outputs[0][0] = OutputDist::Categorical(vec![0.5, 0.5, 0.0]);
    assert_eq!(log_forward(&zero, &series).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn deterministic_chain_decodes_in_order() {
    let schema = vec![FeatureSpec { name: "c".into(), kind: FeatureKind::Discrete { cardinality: 3 } }];
    let hmm = Hmm {
        schema: schema.clone(),
        initial: vec![1.0, 0.0, 0.0],
        transitions: vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]],
        outputs: (0..3).map(|_| vec![OutputDist::Categorical(vec![1.0 / 3.0; 3])]).collect(),
    };
    let series = FeatureSeries { schema, start_frame: 0, frames: vec![vec![0.0]; 4] };
    assert_eq!(viterbi_decode(&hmm, &series).unwrap().0, vec![0, 1, 2, 2]);
}

#[test]
fn schema_mismatch_is_an_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let schema = random_schema(&mut rng, 2);
    let hmm = random_hmm(&mut rng, 2, schema);
    let other = vec![FeatureSpec { name: "x".into(), kind: FeatureKind::Linear }];
    let series = random_series(&mut rng, &other, 3);
    assert!(matches!(log_forward(&hmm, &series), Err(Error::Schema(_))));
}

#[test]
fn one_state_em_recovers_sample_moments() {
    let xs = [1.0, 2.0, 4.0, 7.0, 1.5];
    let schema = vec![FeatureSpec { name: "x".into(), kind: FeatureKind::Linear }];
    let series = FeatureSeries { schema, start_frame: 0, frames: xs.iter().map(|&x| vec![x]).collect() };
    let params = TrainParams { n_states: 1, ..TrainParams::default() };
    let (hmm, _) = train(&[series], &params).unwrap();
    let m = crate::stats::mean(&xs);
    let v = crate::stats::variance(&xs);
    match hmm.outputs[0][0] {
        OutputDist::Gaussian { mean, var } => {
            assert!((mean - m).abs() < 1e-12);
            assert!((var - v).abs() < 1e-12);
        }
        ref o => panic!("unexpected {o:?}"),
    }

    let flat = FeatureSeries { schema: hmm.schema.clone(), start_frame: 0, frames: vec![vec![3.0]; 4] };
    let (hmm, _) = train(&[flat], &params).unwrap();
    assert_eq!(hmm.outputs[0][0], OutputDist::Gaussian { mean: 3.0, var: params.var_floor });
}

#[test]
fn identical_angles_hit_the_kappa_cap() {
    let schema = vec![FeatureSpec { name: "a".into(), kind: FeatureKind::Angular }];
    let series = FeatureSeries { schema, start_frame: 0, frames: vec![vec![0.7]; 6] };
    let params = TrainParams { n_states: 1, ..TrainParams::default() };
    let (hmm, _) = train(&[series], &params).unwrap();
    match hmm.outputs[0][0] {
        OutputDist::VonMises { mu, kappa } => {
            assert!((mu - 0.7).abs() < 1e-12);
            assert_eq!(kappa, params.kappa_cap);
        }
        ref o => panic!("unexpected {o:?}"),
    }
}

#[test]
fn empty_training_set_is_an_error() {
    assert!(train(&[], &TrainParams::default()).is_err());
}

fn assert_stochastic(hmm: &Hmm) {
    hmm.validate().unwrap();
}

#[test]
fn em_is_monotone_on_random_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..30 {
        let nf = rng.gen_range(1..=3);
        let schema = random_schema(&mut rng, nf);
        let n_sets = rng.gen_range(1..5);
        let sets: Vec<FeatureSeries> = (0..n_sets)
            .map(|_| {
                let t = rng.gen_range(3..15);
                random_series(&mut rng, &schema, t)
            })
            .collect();
        let params = TrainParams { n_states: rng.gen_range(1..=4), max_iters: 15, tol: 0.0, ..TrainParams::default() };
        let (hmm, report) = train(&sets, &params).unwrap();
        for w in report.log_likelihoods.windows(2) {
            assert!(w[1] >= w[0] - 1e-8, "{:?}", report.log_likelihoods);
        }
        assert_stochastic(&hmm);
    }
}

#[test]
fn serialized_model_scores_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let schema = random_schema(&mut rng, 3);
    let hmm = random_hmm(&mut rng, 3, schema.clone());
    let series = random_series(&mut rng, &schema, 6);
    let back = parse_hmm(&render_hmm(&hmm)).unwrap();
    assert_eq!(log_forward(&hmm, &series).unwrap().to_bits(), log_forward(&back, &series).unwrap().to_bits());
}

proptest! {
    #[test]
    fn densities_are_finite(x in -1e6f64..1e6, mean in -100.0f64..100.0, kappa in 0.0f64..500.0) {
        let g = OutputDist::Gaussian { mean, var: 1e-4 };
        let v = OutputDist::VonMises { mu: 0.3, kappa };
        prop_assert!(g.log_density(x).is_finite());
        prop_assert!(v.log_density(x).is_finite());
    }
}
