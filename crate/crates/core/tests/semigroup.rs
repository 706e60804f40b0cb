use std::sync::OnceLock;

use proptest::prelude::*;

use tiling_semigroup::semigroup::{Element, TilingSemigroup};
use tiling_semigroup::SubstitutionSystem;

struct Fixture {
    sg: TilingSemigroup,
    elements: Vec<Element>,
}

fn chair() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let sg = TilingSemigroup::new(SubstitutionSystem::builtin("chair").unwrap());
        let elements = sg.enumerate_elements(1, 3).unwrap();
        Fixture { sg, elements }
    })
}

fn pick() -> impl Strategy<Value = usize> {
    any::<prop::sample::Index>().prop_map(|i| i.index(chair().elements.len()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn regular_with_involution(i in pick()) {
        let Fixture { sg, elements } = chair();
        let s = &elements[i];
        let s_star = sg.star(s);
        prop_assert_eq!(&sg.multiply(&sg.multiply(s, &s_star), s), s);
        prop_assert_eq!(&sg.multiply(&sg.multiply(&s_star, s), &s_star), &s_star);
        prop_assert_eq!(&sg.star(&s_star), s);
        prop_assert!(sg.multiply(&s_star, s).is_idempotent());
    }

    #[test]
    fn associative(i in pick(), j in pick(), k in pick()) {
        let Fixture { sg, elements } = chair();
        let (a, b, c) = (&elements[i], &elements[j], &elements[k]);
        prop_assert_eq!(sg.multiply(&sg.multiply(a, b), c), sg.multiply(a, &sg.multiply(b, c)));
    }

    #[test]
    fn star_reverses_products(i in pick(), j in pick()) {
        let Fixture { sg, elements } = chair();
        let (a, b) = (&elements[i], &elements[j]);
        prop_assert_eq!(sg.star(&sg.multiply(a, b)), sg.multiply(&sg.star(b), &sg.star(a)));
    }

    #[test]
    fn idempotents_commute(i in pick(), j in pick()) {
        let Fixture { sg, elements } = chair();
        let (e, f) = (sg.multiply(&sg.star(&elements[i]), &elements[i]), sg.multiply(&elements[j], &sg.star(&elements[j])));
        let ef = sg.multiply(&e, &f);
        prop_assert_eq!(&ef, &sg.multiply(&f, &e));
        prop_assert_eq!(&sg.multiply(&ef, &ef), &ef);
    }

    #[test]
    fn displacements_add(i in pick(), j in pick()) {
        let Fixture { sg, elements } = chair();
        let (a, b) = (&elements[i], &elements[j]);
        let ab = sg.multiply(a, b);
        if let Some(x) = ab.displacement() {
            prop_assert_eq!(x, a.displacement().unwrap() + b.displacement().unwrap());
        }
    }

    #[test]
    fn order_is_the_natural_partial_order(i in pick(), j in pick()) {
        let Fixture { sg, elements } = chair();
        let e = sg.multiply(&sg.star(&elements[i]), &elements[i]);
        let f = sg.multiply(&sg.star(&elements[j]), &elements[j]);
        prop_assert!(sg.leq(&e, &e).unwrap());
        prop_assert_eq!(sg.leq(&e, &f).unwrap(), sg.multiply(&e, &f) == e);
    }

    #[test]
    fn text_round_trip(i in pick()) {
        let Fixture { sg, elements } = chair();
        let s = &elements[i];
        prop_assert_eq!(&Element::from_text(&s.to_text(sg.alphabet()), sg.alphabet()).unwrap(), s);
    }
}

#[test]
fn zero_absorbs() {
    let Fixture { sg, elements } = chair();
    let z = Element::Zero;
    for s in elements.iter().take(200) {
        assert!(sg.multiply(s, &z).is_zero());
        assert!(sg.multiply(&z, s).is_zero());
    }
    assert!(sg.star(&z).is_zero());
}

#[test]
fn solid_elements_are_counted() {
    let sg = TilingSemigroup::new(SubstitutionSystem::builtin("solid").unwrap());
    // one pattern per connected support through the origin, one element per tile
    let mut expected = 0;
    for cells in tiling_semigroup::semigroup::connected_supports(1, 3) {
        expected += cells.len();
    }
    assert_eq!(sg.enumerate_elements(1, 3).unwrap().len(), expected);
}
