mod common;

use labe_core::abe::{select_params, Profile};
use labe_core::gauss::{sample_error, sample_error_vec, sample_z, ErrorParam, GaussParam, RandomSource};
use labe_core::zq::{centered, Modulus};
use num_traits::ToPrimitive;

fn seeded(tag: u8) -> RandomSource {
    RandomSource::from_seed([tag; 32])
}

#[test]
fn sample_z_matches_exact_pmf() {
    let p = GaussParam::new(4.0).unwrap();
    let mut rng = seeded(40);
    let draws: Vec<i64> = (0..100_000).map(|_| sample_z(&p, &mut rng).unwrap()).collect();
    let pmf = common::exact_pmf(4.0, 0.0, -60, 60);
    let tv = common::tv_distance(&common::histogram(&draws), &pmf);
    assert!(tv < 0.01, "tv = {tv}");
}

#[test]
fn sample_z_off_center_matches_exact_pmf() {
    let p = GaussParam::with_center(3.5, 0.37).unwrap();
    let mut rng = seeded(41);
    let draws: Vec<i64> = (0..100_000).map(|_| sample_z(&p, &mut rng).unwrap()).collect();
    let pmf = common::exact_pmf(3.5, 0.37, -60, 60);
    let tv = common::tv_distance(&common::histogram(&draws), &pmf);
    assert!(tv < 0.01, "tv = {tv}");
}

#[test]
fn error_vec_of_dim_one_agrees_with_scalar_draws() {
    let q = Modulus::from_u64(1_048_583).unwrap();
    let p = ErrorParam::new(2f64.powi(-14), &q).unwrap();
    let mut ra = seeded(42);
    let mut rb = seeded(43);
    let to_i64 = |x| centered(&x, &q).to_i64().unwrap();
    let a: Vec<i64> = (0..20_000).map(|_| to_i64(sample_error(&p, &mut ra))).collect();
    let b: Vec<i64> = (0..20_000)
        .map(|_| to_i64(sample_error_vec(&p, 1, &mut rb).unwrap().get(0).clone()))
        .collect();
    let pv = common::two_sample_chi2(&a, &b, 200);
    assert!(pv > 0.001, "p = {pv}");
}

#[test]
fn toy_error_vectors_concentrate() {
    let params = select_params(4, 2, Profile::Toy).unwrap();
    let (q, m) = (params.q(), params.m());
    let bound = q.to_f64() * params.alpha().alpha() * (m as f64).sqrt() * params.c_omega();
    let mut rng = seeded(44);
    let trials = 200;
    let within = (0..trials)
        .filter(|_| {
            let v = sample_error_vec(params.alpha(), m, &mut rng).unwrap();
            let sq: f64 = v.centered().iter().map(|c| c.to_f64().unwrap().powi(2)).sum();
            sq.sqrt() <= bound
        })
        .count();
    assert!(within as f64 / trials as f64 >= 0.99, "{within}/{trials}");
}
