use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgldiff::analysis::{lemma1_check, lemma2_check, lemma3_check};
use sgldiff::potentials::{quadratic, trig, PotentialFamily};

fn random_family(rng: &mut ChaCha8Rng) -> PotentialFamily<f64> {
    let n = rng.random_range(1..4);
    let dim = rng.random_range(1..3);
    if rng.random_bool(0.5) {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..15.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        quadratic(&a, &b, dim).unwrap()
    } else {
        let m: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        trig(&m, dim).unwrap()
    }
}

#[test]
fn lemma_verifiers_pass_on_randomised_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..20 {
        let fam = random_family(&mut rng);
        let theta0: Vec<f64> = (0..fam.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let t = rng.random_range(0.1..1.0);
        let s = t * rng.random_range(0.0..1.0);
        let r1 = lemma1_check(&fam, &theta0, t, 1e-3, 300, case).unwrap();
        assert!(r1.passed, "case {case}: {r1:?}");
        let r2 = lemma2_check(&fam, &theta0, t, s, 1e-3, 300, case).unwrap();
        assert!(r2.passed, "case {case}: {r2:?}");
        let n = rng.random_range(2..6);
        let g: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let r3 = lemma3_check(&g, rng.random_range(0.01..1.0), 1.0, 300, case).unwrap();
        assert!(r3.passed, "case {case}: {r3:?}");
    }
}
