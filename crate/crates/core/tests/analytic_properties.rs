use proptest::prelude::*;

use qcp::analytics::{avg_error_min, error_given_overlap, OverlapQ};
use qcp::asymptotics::limit_m_infinite;
use qcp::combinatorics::ProblemSize;

proptest! {
    #[test]
    fn swapping_the_outer_systems_changes_nothing(m in 0u64..40, a in 0u64..40, b in 0u64..40, d in 2u64..6, q in 0.0f64..=1.0) {
        prop_assume!(m + a + b > 0 && a != b);
        let s = ProblemSize::new(m, a, b, d).unwrap();
        let t = ProblemSize::new(m, b, a, d).unwrap();
        prop_assert!(s.relabeled() != t.relabeled());
        prop_assert_eq!(avg_error_min(&s).value, avg_error_min(&t).value);
        let q = OverlapQ::new(q).unwrap();
        prop_assert_eq!(error_given_overlap(&s, q).value, error_given_overlap(&t, q).value);
    }

    #[test]
    fn errors_are_probabilities_and_sum_their_blocks(m in 0u64..60, n1 in 0u64..60, n2 in 0u64..60, d in 2u64..5, q in 0.0f64..=1.0) {
        prop_assume!(m + n1 + n2 > 0);
        let s = ProblemSize::new(m, n1, n2, d).unwrap();
        let avg = avg_error_min(&s);
        // up to a few hundred block terms are summed; allow their rounding
        prop_assert!((0.0..=0.5 + 1e-13).contains(&avg.value));
        prop_assert!((avg.reconstructed() - avg.value).abs() < 1e-15);
        let pair = error_given_overlap(&s, OverlapQ::new(q).unwrap());
        prop_assert!((-1e-13..=0.5 + 1e-13).contains(&pair.value));
        prop_assert!((pair.reconstructed() - pair.value).abs() < 1e-15);
    }

    #[test]
    fn averaged_error_stays_above_its_m_limit(m in 0u64..200, n1 in 0u64..8, n2 in 0u64..8, d in 2u64..5) {
        prop_assume!(m + n1 + n2 > 0);
        let s = ProblemSize::new(m, n1, n2, d).unwrap();
        prop_assert!(avg_error_min(&s).value >= limit_m_infinite(s.n2(), d).unwrap() - 1e-14);
    }
}

#[test]
fn reports_serialize_with_provenance() {
    let s = ProblemSize::new(2, 3, 1, 3).unwrap();
    let v = serde_json::to_value(avg_error_min(&s)).unwrap();
    assert_eq!(v["formula_path"], "averaged/general");
    assert_eq!(v["relabeled"], true);
    assert_eq!(v["size"]["n1"], 1);
    assert!(v["per_k"][0]["dim"].is_string());
    let p = serde_json::to_value(error_given_overlap(&s, OverlapQ::new(0.3).unwrap())).unwrap();
    assert_eq!(p["formula_path"], "per-pair/general");
    assert!(p["per_k"][0]["q_k"].is_number());
}
