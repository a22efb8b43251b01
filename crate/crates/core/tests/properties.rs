use num_bigint::BigInt;
use proptest::prelude::*;

use romik::exact::{binomial, factorial, mod_floor_u64};
use romik::residues::{digit_facts_check, digit_sum, legendre_valuation_factorial, valuation, Residue};

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

proptest! {
    #[test]
    fn legendre_matches_digit_sum_form(n in 0u64..1_000_000, i in 0usize..6) {
        let p = PRIMES[i];
        prop_assert_eq!(legendre_valuation_factorial(n, p) * (p - 1), n - digit_sum(n, p));
    }

    #[test]
    fn legendre_matches_factorial(n in 0u64..300, i in 0usize..6) {
        let p = PRIMES[i];
        prop_assert_eq!(legendre_valuation_factorial(n, p), valuation(&factorial(n), p));
    }

    #[test]
    fn digit_facts_hold(r in 0u64..100_000, s in 0u64..100_000, i in 1usize..6) {
        prop_assert!(digit_facts_check(r, s, PRIMES[i]));
    }

    #[test]
    fn kummer_carries(a in 0u64..400, b in 0u64..400, i in 0usize..6) {
        let p = PRIMES[i];
        let sum = a + b;
        let carries = (digit_sum(a, p) + digit_sum(b, p) - digit_sum(sum, p)) / (p - 1);
        prop_assert_eq!(valuation(&binomial(sum, a), p), carries);
    }

    #[test]
    fn residue_reduction_is_compatible(x in any::<i64>(), y in any::<i64>(), i in 0usize..6) {
        let p = PRIMES[i];
        let (bx, by) = (BigInt::from(x), BigInt::from(y));
        let lhs = mod_floor_u64(&(&bx * &by), p);
        let rhs = mod_floor_u64(&bx, p) * mod_floor_u64(&by, p) % p;
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(Residue::new(&bx, p).value(), Residue::from_i64(x, p).value());
    }
}
