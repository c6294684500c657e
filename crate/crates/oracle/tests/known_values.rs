use num_complex::Complex64;
use omega_oracle::*;

#[test]
fn published_counts() {
    // Mertens M(10^k) and π(10^k) tables
    assert_eq!(brute_mertens(10).unwrap(), -1);
    assert_eq!(brute_mertens(1000).unwrap(), 2);
    assert_eq!(brute_mertens(100_000).unwrap(), -48);
    assert_eq!(brute_prime_count(10_000).unwrap(), 1229);
    assert_eq!(brute_prime_count(1_000_000).unwrap(), 78_498);
}

#[test]
fn powerful_numbers_start() {
    assert_eq!(
        brute_kfull_list(200, 2).unwrap(),
        [1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100, 108, 121, 125, 128, 144, 169, 196, 200]
    );
    assert_eq!(brute_kfull_list(100, 2).unwrap().len(), 14);
    assert_eq!(brute_kfull_list(300, 3).unwrap(), [1, 8, 16, 27, 32, 64, 81, 125, 128, 216, 243, 256]);
}

#[test]
fn small_functions() {
    let mu: Vec<i64> = (1..=10).map(brute_mobius).collect();
    assert_eq!(mu, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    let omega: Vec<u32> = (1..=12).map(brute_omega).collect();
    assert_eq!(omega, [0, 1, 1, 2, 1, 2, 1, 3, 2, 2, 1, 3]);
    let phi: Vec<u64> = (1..=10).map(brute_totient).collect();
    assert_eq!(phi, [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
    assert!(brute_is_prime(2) && brute_is_prime(97) && !brute_is_prime(1) && !brute_is_prime(91));
    assert_eq!(gcd(84, 36), 12);
    assert!(brute_is_kfull(1, 5) && brute_is_kfull(72, 2) && !brute_is_kfull(72, 3));
}

#[test]
fn squarefree_decomposition_with_ones() {
    // lhs is the squarefree density at 100; each inner mean of 1 is 1
    let (l, r) = brute_decomposition_squarefree(|_| Complex64::new(1.0, 0.0), &[], 100, 10).unwrap();
    assert!((l.re - 0.61).abs() < 1e-15);
    let hand = 1.0 - 1.0 / 4.0 - 1.0 / 9.0 - 1.0 / 25.0 + 1.0 / 36.0 - 1.0 / 49.0 + 1.0 / 100.0;
    assert!((r.re - hand).abs() < 1e-15 && r.im == 0.0);
}

#[test]
fn minting() {
    assert_eq!(mint("factor", &[360]).unwrap().value.to_string(), "2^3*3^2*5^1");
    assert_eq!(mint("mertens", &[100]).unwrap().value, OracleValue::Integer(1));
    assert_eq!(mint("kfull", &[30, 2]).unwrap().value.to_string(), "1,4,8,9,16,25,27");
    assert!(matches!(mint("nope", &[]), Err(MintError::UnknownQuantity(_))));
    assert!(matches!(mint("mertens", &[]), Err(MintError::Arguments(_))));
    assert!(brute_mertens(LIST_LIMIT + 1).is_err());
}
