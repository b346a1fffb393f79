use cantorfam::calculus::{forces, forces_scheme};
use cantorfam::gen;
use cantorfam::io::FamilyFile;
use cantorfam::rank;
use cantorfam::{semantically_equal, Family, FamilyExpr, RankResult, Scheme, Sentence, Theory, Word};
use proptest::prelude::*;

fn theory() -> impl Strategy<Value = Theory> {
    (prop::collection::vec(any::<bool>(), 0..5), prop::collection::vec(any::<bool>(), 1..4))
        .prop_map(|(p, c)| Theory::new(p, c).unwrap())
}

fn sentence() -> impl Strategy<Value = Sentence> {
    let leaf = prop_oneof![
        1 => Just(Sentence::True),
        1 => Just(Sentence::False),
        6 => (0u32..5).prop_map(Sentence::atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Sentence::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Sentence::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Sentence::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Sentence::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Sentence::iff(a, b)),
        ]
    })
}

/// Families come from the suite generator, so shrinking happens on the seed.
fn family() -> impl Strategy<Value = Family> {
    any::<u64>().prop_map(|seed| gen::family(&mut gen::rng(seed, 0)))
}

fn finite_scheme() -> impl Strategy<Value = Scheme> {
    prop::collection::vec(sentence(), 0..3).prop_map(Scheme::Finite)
}

fn any_scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![
        finite_scheme(),
        theory().prop_map(Scheme::Diagram),
        any::<u64>().prop_map(|seed| Scheme::ClosedTarget(gen::automaton(&mut gen::rng(seed, 1), 3))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eval_agrees_with_clopen(s in sentence(), t in theory()) {
        let c = s.to_clopen().unwrap();
        prop_assert_eq!(s.eval(&t), c.allowed().contains(&t.take(c.depth() as usize)));
    }

    #[test]
    fn clopen_is_a_homomorphism(a in sentence(), b in sentence()) {
        let (ca, cb) = (a.to_clopen().unwrap(), b.to_clopen().unwrap());
        prop_assert_eq!(Sentence::and(a.clone(), b.clone()).to_clopen().unwrap(), ca.intersect(&cb));
        prop_assert_eq!(Sentence::or(a.clone(), b).to_clopen().unwrap(), ca.union(&cb));
        prop_assert_eq!(Sentence::not(a).to_clopen().unwrap(), ca.complement());
    }

    #[test]
    fn equality_is_a_congruence(a in sentence(), c in sentence()) {
        let b = Sentence::not(Sentence::not(a.clone()));
        prop_assert!(semantically_equal(&a, &b));
        prop_assert!(semantically_equal(&Sentence::and(a.clone(), c.clone()), &Sentence::and(b.clone(), c.clone())));
        prop_assert!(semantically_equal(&Sentence::implies(c.clone(), a), &Sentence::implies(c, b)));
    }

    #[test]
    fn text_round_trips(s in sentence(), t in theory()) {
        prop_assert_eq!(Sentence::parse(&s.to_string()).unwrap(), s);
        prop_assert_eq!(t.to_string().parse::<Theory>().unwrap(), t);
    }

    #[test]
    fn theories_are_canonical(p in prop::collection::vec(any::<bool>(), 0..4), c in prop::collection::vec(any::<bool>(), 1..4)) {
        let t = Theory::new(p.clone(), c.clone()).unwrap();
        let unrolled = Theory::new([p.clone(), c.clone()].concat(), [c.clone(), c.clone()].concat()).unwrap();
        prop_assert_eq!(&unrolled, &t);
        for i in 0..12 {
            prop_assert_eq!(t.bit(i), if i < p.len() { p[i] } else { c[(i - p.len()) % c.len()] });
        }
    }

    #[test]
    fn closure_is_a_closure_operator(f in family(), g in family()) {
        let c = f.closure();
        prop_assert!(f.is_subset(&c));
        prop_assert_eq!(c.closure(), c.clone());
        prop_assert!(c.is_subset(&f.union(&g).closure()));
        prop_assert_eq!(f.union(&g).closure(), c.union(&g.closure()));
    }

    #[test]
    fn closure_membership_is_local_consistency(f in family(), t in theory()) {
        let expected = f.member(&t) || f.locally_consistent(&Scheme::Diagram(t.clone()));
        prop_assert_eq!(f.closure().member(&t), expected);
    }

    #[test]
    fn closed_families_stay_closed(f in family(), phi in any_scheme()) {
        let c = f.closure();
        prop_assert!(c.restrict_scheme(&phi).is_e_closed());
        if c.locally_consistent(&phi) {
            prop_assert!(c.consistent(&phi));
        }
    }

    #[test]
    fn rank_ignores_closure(f in family()) {
        prop_assert_eq!(rank::rank(&f), rank::rank(&f.closure()));
    }

    #[test]
    fn rank_is_monotone(f in family(), s in sentence()) {
        let sub = f.restrict(&s);
        prop_assert!(rank::rank(&sub).cmp_rank(&rank::rank(&f)).is_le());
    }

    #[test]
    fn forcing_has_finite_character(points in prop::collection::btree_set(theory(), 0..5), a in sentence(), b in sentence()) {
        let f = Family::explicit(points.iter().cloned());
        let pointwise = points.iter().all(|t| forces(&Family::explicit([t.clone()]), &a, &b));
        prop_assert_eq!(forces(&f, &a, &b), pointwise);
    }

    #[test]
    fn finite_schemes_ignore_closure(f in family(), phi in finite_scheme(), psi in finite_scheme()) {
        prop_assert_eq!(forces_scheme(&f, &phi, &psi), forces_scheme(&f.closure(), &phi, &psi));
    }

    #[test]
    fn forcing_is_transitive(f in family(), a in any_scheme(), b in any_scheme(), c in any_scheme()) {
        if forces_scheme(&f, &a, &b) && forces_scheme(&f, &b, &c) {
            prop_assert!(forces_scheme(&f, &a, &c));
        }
    }

    #[test]
    fn files_round_trip(f in family()) {
        let file = FamilyFile::from_family(&f);
        prop_assert_eq!(FamilyFile::parse(&file.to_json()).unwrap().to_family().unwrap(), f);
    }

    #[test]
    fn recipes_compile_to_their_rank(seed in any::<u64>()) {
        let e: FamilyExpr = gen::expr(&mut gen::rng(seed, 2), 3);
        let r = e.recipe_rank();
        let expected = match r.rank {
            None => RankResult::Empty,
            Some(a) => RankResult::Finite { rank: a.as_finite().unwrap() as u32, degree: r.degree },
        };
        prop_assert_eq!(rank::rank(&Family::closed(e.compile().unwrap())), expected);
    }

    #[test]
    fn words_parse_back(bits in prop::collection::vec(any::<bool>(), 0..10)) {
        let u = Word::from_bits(bits);
        prop_assert_eq!(u.to_string().parse::<Word>().unwrap(), u);
    }
}
