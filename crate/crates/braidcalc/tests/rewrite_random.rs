mod common;

use common::sweep;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rule_contracts_hold_on_random_walks(seed in any::<u64>()) {
        let (tally, violations) = sweep(seed, 6);
        prop_assert!(violations.is_empty(), "{:?}", violations);
        prop_assert!(tally.total() > 0);
    }
}
