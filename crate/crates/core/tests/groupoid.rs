use tiling_semigroup::groupoid::{alpha, alpha_inv, compose, germ_equiv_lemma, invert, Germ, GroupoidError, PathOrder, RpuncPair};
use tiling_semigroup::semigroup::TilingSemigroup;
use tiling_semigroup::suites::groupoid::{germ_population, Population};
use tiling_semigroup::{SubstitutionSystem, Vec2};

const SMALL: Population = Population { radius: 1, max_tiles: 3, reach: 1 };

fn chair() -> TilingSemigroup {
    TilingSemigroup::new(SubstitutionSystem::builtin("chair").unwrap())
}

#[test]
fn lemma_criterion_is_an_equivalence() {
    let sg = chair();
    for w in sg.system().realized_windows(2, 6).unwrap().iter().take(8) {
        let germs = germ_population(&sg, w, SMALL).unwrap();
        let n = germs.len();
        let rel: Vec<Vec<bool>> =
            (0..n).map(|i| (0..n).map(|j| germ_equiv_lemma(&germs[i], &germs[j]).unwrap()).collect()).collect();
        for i in 0..n {
            assert!(rel[i][i]);
            for j in 0..n {
                assert_eq!(rel[i][j], rel[j][i]);
                if rel[i][j] {
                    assert!((0..n).all(|k| !rel[j][k] || rel[i][k]));
                    assert_eq!(germs[i].displacement(), germs[j].displacement());
                }
            }
        }
    }
}

/// Germs at `θ_s(W)` that compose with `g`.
fn partners(sg: &TilingSemigroup, g: &Germ) -> Vec<Germ> {
    germ_population(sg, invert(sg, g).unwrap().window(), SMALL).unwrap()
}

#[test]
fn composition_is_associative_on_every_composable_triple() {
    let sg = chair();
    let mut triples = 0;
    for w in sg.system().realized_windows(2, 8).unwrap().iter().take(3) {
        for g3 in germ_population(&sg, w, SMALL).unwrap() {
            for g2 in partners(&sg, &g3) {
                let g23 = compose(&sg, &g2, &g3).unwrap();
                for g1 in partners(&sg, &g2) {
                    let left = compose(&sg, &compose(&sg, &g1, &g2).unwrap(), &g3).unwrap();
                    let right = compose(&sg, &g1, &g23).unwrap();
                    assert!(germ_equiv_lemma(&left, &right).unwrap());
                    triples += 1;
                }
            }
        }
    }
    assert!(triples > 10_000, "{triples}");
}

#[test]
fn inverses_compose_to_units() {
    let sg = chair();
    for w in sg.system().realized_windows(2, 8).unwrap().iter().take(4) {
        for g in germ_population(&sg, w, SMALL).unwrap() {
            let inv = invert(&sg, &g).unwrap();
            let unit = compose(&sg, &inv, &g).unwrap();
            assert!(unit.element().is_idempotent());
            assert!(alpha(&unit).displacement().is_zero());
            assert!(alpha(&invert(&sg, &inv).unwrap()).same_as(&alpha(&g)));
        }
    }
}

#[test]
fn germs_at_different_points_are_not_compared() {
    let sg = chair();
    let windows = sg.system().realized_windows(1, 4).unwrap();
    let a = germ_population(&sg, &windows[0], SMALL).unwrap();
    let b = germ_population(&sg, &windows[1], SMALL).unwrap();
    assert!(matches!(germ_equiv_lemma(&a[0], &b[0]), Err(GroupoidError::DifferentPoints)));
}

#[test]
fn l_paths_reach_every_nearby_translate() {
    let sg = chair();
    let w = sg.system().fixed_point_window(12).unwrap();
    for y in -3..=3 {
        for x in -3..=3 {
            let p = RpuncPair::new(w.clone(), Vec2::new(x, y)).unwrap();
            for order in [PathOrder::HorizontalFirst, PathOrder::VerticalFirst] {
                let g = alpha_inv(&sg, &p, order).unwrap();
                assert!(alpha(&g).same_as(&p));
            }
        }
    }
}
