mod common;

use common::{intermediate_denominators, iet, perm, q};
use ietk::harness::{
    dichotomy_experiment, khinchin_brute, khinchin_count, sample_seed, target_measure_sweep, volume_mc,
    zorich_growth_estimate, ExperimentConfig,
};
use ietk::iet::{random_exact, Iet};
use ietk::triples::Phi;
use ietk::{Error, Path};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn phi(s: &str) -> Phi {
    s.parse().unwrap()
}

#[test]
fn sample_seeds_are_distinct_and_stable() {
    let seeds: Vec<u64> = (0..1000).map(|i| sample_seed(1, i)).collect();
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), seeds.len());
    assert_eq!(sample_seed(1, 0), sample_seed(1, 0));
    assert_ne!(sample_seed(1, 0), sample_seed(2, 0));
}

#[test]
fn zero_phi_counts_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let t = random_exact(&perm("ABCD/DCBA"), 40, &mut rng);
        match khinchin_count(&t, &phi("0"), 500) {
            Ok(c) => assert_eq!(c.total(), 0),
            Err(e) => assert_eq!(e, Error::Connection),
        }
    }
}

#[test]
fn rotation_five_eighths_quarter() {
    let t = iet("AB/BA", &["3/8", "5/8"]);
    let f = phi("tab:0.25,0.25,0.25,0.25,0.25");
    let fast = khinchin_count(&t, &f, 5).unwrap();
    let brute = khinchin_brute(&t, &f, 5).unwrap();
    assert_eq!(fast, brute);
    assert_eq!(fast.pairs.len(), 1);
    assert_eq!(fast.pairs[0].ns, vec![1, 3]);
    // The connection (A,B,6) lies inside the horizon.
    assert_eq!(khinchin_count(&t, &f, 6), Err(Error::Connection));
}

#[test]
fn float_backend_is_rejected() {
    let t = Iet::new(perm("AB/BA"), vec![0.25, 0.75]).unwrap();
    assert_eq!(khinchin_count(&t, &phi("1/n"), 10), Err(Error::FloatBackend));
}

/// `|{(n+1)y/D} − x/D|` for the rotation with lengths `(x/D, y/D)`.
fn rotation_gap(x: u64, y: u64, n: u64) -> BigRational {
    let den = x + y;
    let p = ((n + 1) as u128 * y as u128 % den as u128) as i128;
    BigRational::new(BigInt::from((p - x as i128).abs()), BigInt::from(den))
}

#[test]
fn d2_counts_match_continued_fraction_control() {
    let f = phi("0.3/n");
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..60 {
        let x: u64 = rng.gen_range(1..5000);
        let y: u64 = rng.gen_range(1..5000);
        let den = x + y;
        let t = Iet::new(perm("AB/BA"), vec![BigRational::new(x.into(), den.into()), BigRational::new(y.into(), den.into())])
            .unwrap();
        let connection = den / num_integer::gcd(x, y) - 2;
        let n_max = connection.saturating_sub(1).min(2000);
        let want: Vec<u64> = intermediate_denominators(x, den, n_max + 2)
            .into_iter()
            .filter(|&m| m >= 3)
            .map(|m| m - 2)
            .filter(|&n| rotation_gap(x, y, n) < BigRational::from_float(f.eval(n)).unwrap())
            .collect();
        let got = khinchin_count(&t, &f, n_max).unwrap();
        assert_eq!(got.pairs[0].ns, want, "lengths {x}/{den}, {y}/{den}");
        checked += 1;
    }
    assert_eq!(checked, 60);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_path_equals_brute_force(seed in any::<u64>(), d4 in any::<bool>()) {
        let p = if d4 { perm("ABCD/DCBA") } else { perm("ABC/CBA") };
        let t = random_exact(&p, 36, &mut ChaCha8Rng::seed_from_u64(seed));
        let f = phi("1/n");
        prop_assert_eq!(khinchin_count(&t, &f, 150), khinchin_brute(&t, &f, 150));
    }

    #[test]
    fn counts_are_monotone(seed in any::<u64>(), n1 in 1u64..200, extra in 0u64..200, c in 0.05f64..2.0) {
        let t = random_exact(&perm("ABCD/DCBA"), 40, &mut ChaCha8Rng::seed_from_u64(seed));
        let small = Phi::Power { c, p: 1.0 };
        let large = Phi::Power { c: 2.0 * c, p: 1.0 };
        let n2 = n1 + extra;
        let (Ok(a), Ok(b), Ok(w)) = (khinchin_count(&t, &small, n1), khinchin_count(&t, &small, n2), khinchin_count(&t, &large, n2))
        else {
            return Ok(());
        };
        prop_assert_eq!(b.count_up_to(n1), a.total());
        for (ps, pl) in b.pairs.iter().zip(&w.pairs) {
            prop_assert!(ps.ns.iter().all(|n| pl.ns.contains(n)));
        }
    }
}

fn small_config(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: "small".into(),
        perm: "ABCD/DCBA".into(),
        samples: 16,
        n_max: 400,
        doublings: 4,
        master_seed: 9,
        workers,
        ..ExperimentConfig::default()
    }
}

#[test]
fn dichotomy_is_worker_independent() {
    let one = dichotomy_experiment(&small_config(1)).unwrap();
    let four = dichotomy_experiment(&small_config(4)).unwrap();
    assert_eq!(one.to_csv().unwrap(), four.to_csv().unwrap());
    assert_eq!(one.samples, four.samples);
    assert_eq!(one.used + one.discarded, 16);
    assert_eq!(one.config.grid(), vec![25, 50, 100, 200, 400]);
    for s in one.samples.iter().filter(|s| s.status == "ok") {
        for c in &s.counts {
            assert!(c.windows(2).all(|w| w[0] <= w[1]));
        }
    }
    let csv = String::from_utf8(one.to_csv().unwrap()).unwrap();
    assert!(csv.starts_with("sample,seed,family,status,n_25,n_50,n_100,n_200,n_400\n"));
    assert_eq!(csv.lines().count(), 1 + 16 * 2);
}

#[test]
fn volume_mc_small_paths() {
    let start = perm("ABC/CBA");
    let rows = volume_mc(&start, 3, 20_000, 4, 2).unwrap();
    assert_eq!(rows.len(), 15);
    assert_eq!(rows[0].path, "");
    assert_eq!(rows[0].hits, 20_000);
    assert_eq!(rows[0].volume, "1");
    assert_eq!(rows[1].hits + rows[2].hits, 20_000);
    for r in &rows {
        assert!(r.z.abs() < 4.5, "{} z = {}", r.path, r.z);
    }
    let again = volume_mc(&start, 3, 20_000, 4, 5).unwrap();
    assert!(rows.iter().zip(&again).all(|(a, b)| a.hits == b.hits));
}

#[test]
fn zorich_growth_d2() {
    let eta = Path::parse(&perm("AB/BA"), "tb").unwrap();
    let rep = zorich_growth_estimate(&eta, 40, 400, 2, 3).unwrap();
    let sup = rep.sup.unwrap();
    assert!(sup.is_finite() && sup > 1.0);
    assert!(rep.min.unwrap() <= rep.median.unwrap() && rep.median.unwrap() <= sup);
    let again = zorich_growth_estimate(&eta, 40, 400, 2, 1).unwrap();
    assert_eq!(again.sup, rep.sup);
}

#[test]
fn sweep_d2_matches_hand_masses() {
    let grid: Vec<BigRational> = ["1/2", "1/3", "1/4", "1/8", "1/16"].iter().map(|s| q(s)).collect();
    let rep = target_measure_sweep(&perm("AB/BA"), 1, &grid, 64, 100_000, 3).unwrap();
    // E consists of the single path b^m with m + 1 the least integer above 1/ε, of mass 1/(m + 1).
    let want = ["1/3", "1/4", "1/5", "1/9", "1/17"];
    for (row, w) in rep.rows.iter().zip(want) {
        assert_eq!(row.e_mass, w, "ε = {}", row.epsilon);
        assert_eq!(row.undecided, "0");
    }
    assert_eq!(rep.c_exact, Some(q("2/3")));
    assert!(rep.rows.windows(2).all(|w| w[1].exact.1 <= w[0].exact.1));
}
