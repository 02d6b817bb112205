use proptest::prelude::*;

use scf_verify::classification::{
    check_duality, classify_all, classify_profile, dictatorial_count, ClassifyOptions,
};
use scf_verify::constructions::{coalesce, restrict, TopsGeometry};
use scf_verify::domain::factorial;
use scf_verify::rules::{is_efficient, is_tops_only};
use scf_verify::{parse_rule, Alternative, Dims, Preference, Profile, Rule};

fn dims() -> impl Strategy<Value = Dims> {
    (2usize..=3, 2usize..=4).prop_map(|(n, m)| Dims::new(n, m).unwrap())
}

fn table(d: Dims) -> impl Strategy<Value = Rule> {
    let len = d.tops_count() as usize;
    proptest::collection::vec(0..d.alts, len).prop_map(move |digits| {
        let table = digits.iter().map(|&x| Alternative::new(x, d.alts).unwrap()).collect();
        Rule::tops_table(d, table).unwrap()
    })
}

/// Each cell picks one of its own tops.
fn efficient_table(d: Dims) -> impl Strategy<Value = Rule> {
    let len = d.tops_count() as usize;
    proptest::collection::vec(0..d.agents, len).prop_map(move |picks| {
        let geo = TopsGeometry::new(d).unwrap();
        let table = picks
            .iter()
            .enumerate()
            .map(|(cell, &i)| geo.tops(cell)[i])
            .collect();
        Rule::tops_table(d, table).unwrap()
    })
}

fn profile(d: Dims) -> impl Strategy<Value = Profile> {
    (0..d.profile_count() as u64).prop_map(move |c| Profile::from_code(d, c).unwrap())
}

fn small() -> impl Strategy<Value = Dims> {
    prop_oneof![Just(Dims::new(2, 2).unwrap()), Just(Dims::new(2, 3).unwrap()), Just(Dims::new(3, 3).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn preference_codes_are_a_bijection(m in 2usize..=6, seed in any::<u64>()) {
        let code = seed % factorial(m);
        let p = Preference::decode(code, m).unwrap();
        prop_assert_eq!(p.code(), code);
        let reparsed: Preference = p.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, p);
    }

    #[test]
    fn profile_codes_are_a_bijection(d in dims(), seed in any::<u64>()) {
        let code = seed % d.profile_count() as u64;
        let p = Profile::from_code(d, code).unwrap();
        prop_assert_eq!(p.code(), code);
        prop_assert_eq!(p.dims(), d);
        let tops = p.tops();
        prop_assert_eq!(scf_verify::TopsProfile::from_code(d, tops.code(d.alts)).unwrap(), tops);
    }

    #[test]
    fn tops_rule_strings_round_trip(r in dims().prop_flat_map(table)) {
        let back = parse_rule(&r.to_string(), None).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_string(), r.to_string());
    }

    #[test]
    fn closed_form_strings_round_trip(d in dims(), pick in any::<usize>()) {
        let rules = [
            Rule::dictator(d, pick % d.agents).unwrap(),
            Rule::constant(d, Alternative::new(pick % d.alts, d.alts).unwrap()).unwrap(),
            Rule::borda_lex(d),
        ];
        for r in rules {
            let back = parse_rule(&r.to_string(), Some(d)).unwrap();
            prop_assert!(back.same_function(&r).unwrap());
            prop_assert_eq!(back.to_string(), r.to_string());
        }
    }

    #[test]
    fn profiles_split_into_manipulable_and_dictatorial(r in small().prop_flat_map(table)) {
        let s = classify_all(&r, ClassifyOptions { materialize: true }).unwrap();
        let m = s.manipulable_set.unwrap();
        let d = s.dictatorial_set.unwrap();
        prop_assert_eq!(s.manipulable + s.dictatorial, s.total);
        prop_assert_eq!(m.intersection(&d).count(), 0);
        prop_assert_eq!(m.union(&d).count() as u64, s.total);
        prop_assert_eq!(dictatorial_count(&r).unwrap(), s.dictatorial);
    }

    #[test]
    fn verdicts_are_constant_on_tops_cells(
        (r, p, q) in small().prop_flat_map(|d| (table(d), profile(d), profile(d)))
    ) {
        // move q into p's tops cell, keeping q's lower rankings where possible
        let same_tops: Vec<Preference> = p.prefs().iter().zip(q.prefs()).map(|(a, b)| {
            let mut ranking = vec![a.top()];
            ranking.extend(b.ranking().iter().copied().filter(|&x| x != a.top()));
            Preference::from_ranking(&ranking).unwrap()
        }).collect();
        let q = Profile::new(same_tops).unwrap();
        prop_assert_eq!(q.tops(), p.tops());
        let a = classify_profile(&r, &p).unwrap();
        let b = classify_profile(&r, &q).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(r.evaluate(&p).unwrap(), r.evaluate(&q).unwrap());
    }

    #[test]
    fn counting_orders_are_dual(
        (f, g) in small().prop_flat_map(|d| (table(d), table(d)))
    ) {
        prop_assert!(check_duality(&f, &g).unwrap());
        prop_assert!(check_duality(&g, &f).unwrap());
    }

    #[test]
    fn tops_level_predicates_match_the_generic_scan(r in small().prop_flat_map(table)) {
        let geo = TopsGeometry::new(r.dims()).unwrap();
        let table = r.tops_outcomes().unwrap();
        prop_assert_eq!(geo.is_unanimous(&table), scf_verify::rules::is_unanimous(&r).unwrap());
        prop_assert_eq!(geo.is_efficient(&table), is_efficient(&r).unwrap());
        prop_assert_eq!(geo.dictator(&table), scf_verify::rules::dictator(&r).unwrap());
        prop_assert_eq!(
            geo.is_strategy_proof(&table),
            scf_verify::rules::is_strategy_proof(&r).unwrap()
        );
    }

    #[test]
    fn coalescing_feeds_one_preference_to_two_slots(
        (f, p) in efficient_table(Dims::new(3, 3).unwrap())
            .prop_flat_map(|f| (Just(f), profile(Dims::new(2, 3).unwrap())))
    ) {
        let g = coalesce(&f).unwrap();
        prop_assert_eq!(g.dims(), Dims::new(2, 3).unwrap());
        let widened = Profile::new(
            std::iter::once(p.prefs()[0]).chain(p.prefs().iter().copied()).collect()
        ).unwrap();
        prop_assert_eq!(g.evaluate(&p).unwrap(), f.evaluate(&widened).unwrap());
        prop_assert!(is_tops_only(&g).unwrap());
        prop_assert!(is_efficient(&g).unwrap());
    }

    #[test]
    fn restriction_fixes_the_tail(
        (f, fixed, p) in table(Dims::new(3, 3).unwrap()).prop_flat_map(|f| (
            Just(f),
            (0..6u64).prop_map(|c| Preference::decode(c, 3).unwrap()),
            profile(Dims::new(2, 3).unwrap()),
        ))
    ) {
        let h = restrict(&f, &[fixed]).unwrap();
        let full = Profile::new(vec![p.prefs()[0], p.prefs()[1], fixed]).unwrap();
        prop_assert_eq!(h.evaluate(&p).unwrap(), f.evaluate(&full).unwrap());
        prop_assert!(is_tops_only(&h).unwrap());
    }
}
