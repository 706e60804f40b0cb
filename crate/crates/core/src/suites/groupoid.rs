//! Germ equivalence by both criteria and the algebraic properties of `α`,
//! exhaustive over a germ population on each window.

use crate::filters::IdempotentUniverse;
use crate::geometry::{Patch, Tile, Vec2, Window};
use crate::groupoid::{
    alpha, alpha_inv, compose, germ_equiv_lemma, invert, rpunc_compose, rpunc_invert, Germ, GroupoidError, PathOrder,
    RpuncPair, WitnessTable,
};
use crate::report::{Report, Verdict};
use crate::semigroup::{connected_supports, TilingSemigroup};

use super::FAILURE_LINES;

/// Shape of the germ population at a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Population {
    /// Patches are connected, lie in `B_radius` around `t2` and have at most
    /// `max_tiles` tiles; every choice of `t1`.
    pub radius: u32,
    pub max_tiles: usize,
    /// Also the germs `α⁻¹(W, x)` for `|x| ≤ reach`.
    pub reach: u32,
}

impl std::fmt::Display for Population {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "germs(r={},n={},reach={})", self.radius, self.max_tiles, self.reach)
    }
}

/// The germs at `w`, distinct as elements, in sorted order.
pub fn germ_population(sg: &TilingSemigroup, w: &Window, pop: Population) -> Result<Vec<Germ>, GroupoidError> {
    let mut elements = Vec::new();
    let origin = w.origin_tile();
    for cells in connected_supports(pop.radius, pop.max_tiles) {
        let tiles: Vec<Tile> = cells
            .iter()
            .map(|&c| w.tile_at(c).ok_or(GroupoidError::InsufficientWindow { radius: w.radius(), needed: c.cheb() }))
            .collect::<Result<_, _>>()?;
        let patch = Patch::new(tiles.iter().copied()).expect("distinct cells");
        for &t1 in &tiles {
            elements.push(sg.dppc(t1, &patch, origin)?);
        }
    }
    let r = pop.reach as i32;
    for y in -r..=r {
        for x in -r..=r {
            let p = RpuncPair::new(w.clone(), Vec2::new(x, y))?;
            elements.push(alpha_inv(sg, &p, PathOrder::HorizontalFirst)?.element().clone());
        }
    }
    elements.sort();
    elements.dedup();
    elements.into_iter().map(|s| Germ::new(sg, s, w.clone())).collect()
}

/// Counts from the equivalence cross-check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivalenceTally {
    pub germs: usize,
    pub pairs: u64,
    pub equivalent: u64,
    pub disagreements: u64,
    pub escalations: u64,
    pub failures: Vec<String>,
}

/// The witness search and the patch criterion on every ordered pair of
/// germs at each window. Germs at different windows are never equivalent
/// and are not paired.
pub fn equivalence_tally(
    sg: &TilingSemigroup,
    windows: &[Window],
    u: &IdempotentUniverse,
    pop: Population,
) -> Result<EquivalenceTally, GroupoidError> {
    let mut t = EquivalenceTally::default();
    for (k, w) in windows.iter().enumerate() {
        let germs = germ_population(sg, w, pop)?;
        let elements: Vec<_> = germs.iter().map(Germ::element).collect();
        let table = WitnessTable::new(sg, w, u, &elements)?;
        t.germs += germs.len();
        for i in 0..germs.len() {
            for j in 0..germs.len() {
                t.pairs += 1;
                let def = table.equivalent(i, j);
                let lemma = germ_equiv_lemma(&germs[i], &germs[j])?;
                t.equivalent += lemma as u64;
                if def == lemma {
                    continue;
                }
                // no witness although the patch criterion holds
                if lemma {
                    t.escalations += 1;
                } else {
                    t.disagreements += 1;
                }
                if t.failures.len() < FAILURE_LINES {
                    t.failures.push(format!(
                        "window={k} {} ~ {} def={def} lemma={lemma}",
                        germs[i].element().to_text(sg.alphabet()),
                        germs[j].element().to_text(sg.alphabet())
                    ));
                }
            }
        }
    }
    Ok(t)
}

pub fn germ_equivalence(
    sg: &TilingSemigroup,
    windows: &[Window],
    u: &IdempotentUniverse,
    pop: Population,
    tag: &str,
    report: &mut Report,
) -> Result<EquivalenceTally, GroupoidError> {
    let t = equivalence_tally(sg, windows, u, pop)?;
    let check = "groupoid.germ-equivalence";
    let fp = format!(
        "{tag} {pop} universe={:?}(r={},n={},items={}) windows={} germs={} pairs={} equivalent={} disagreements={} universe-too-small={}",
        u.shape(),
        u.radius(),
        u.max_tiles(),
        u.len(),
        windows.len(),
        t.germs,
        t.pairs,
        t.equivalent,
        t.disagreements,
        t.escalations
    );
    report.push(check, fp, Verdict::from_bool(t.disagreements == 0 && t.escalations == 0 && t.pairs > 0));
    for f in &t.failures {
        report.push(check, format!("{tag} {f}"), Verdict::Fail);
    }
    Ok(t)
}

/// Failure counts per property of `α`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlphaTally {
    pub germs: usize,
    pub pairs: u64,
    pub well_defined: u64,
    pub injective: u64,
    pub realized: u64,
    pub surjective: u64,
    pub round_trip: u64,
    pub path_independent: u64,
    pub composable: u64,
    /// Smallest truthful radius at which a composable pair was matched.
    pub composable_radius: u32,
    pub multiplicative: u64,
    pub inverse: u64,
    pub unit_space: u64,
    pub failures: Vec<String>,
}

impl AlphaTally {
    pub fn failures_total(&self) -> u64 {
        self.well_defined
            + self.injective
            + self.surjective
            + self.round_trip
            + self.path_independent
            + self.multiplicative
            + self.inverse
            + self.unit_space
    }

    fn note(&mut self, what: &str, k: usize, detail: impl FnOnce() -> String) {
        if self.failures.len() < FAILURE_LINES {
            self.failures.push(format!("{what} window={k} {}", detail()));
        }
    }
}

/// Well-definedness, injectivity modulo equivalence, surjectivity onto
/// `|x| ≤ reach`, round trips through `α⁻¹` along both paths, the unit
/// space, inverses, and multiplicativity on every composable pair
/// `([s, θ_t(W)], [t, W])` with both germs from the population.
pub fn alpha_tally(sg: &TilingSemigroup, windows: &[Window], pop: Population) -> Result<AlphaTally, GroupoidError> {
    let mut t = AlphaTally { composable_radius: u32::MAX, ..AlphaTally::default() };
    let text = |g: &Germ| g.element().to_text(sg.alphabet());
    for (k, w) in windows.iter().enumerate() {
        let germs = germ_population(sg, w, pop)?;
        let images: Vec<RpuncPair> = germs.iter().map(alpha).collect();
        t.germs += germs.len();
        for i in 0..germs.len() {
            for j in 0..germs.len() {
                t.pairs += 1;
                let equivalent = germ_equiv_lemma(&germs[i], &germs[j])?;
                let same = images[i].same_as(&images[j]);
                if equivalent && !same {
                    t.well_defined += 1;
                    t.note("well-defined", k, || format!("{} {}", text(&germs[i]), text(&germs[j])));
                }
                if same && !equivalent {
                    t.injective += 1;
                    t.note("injective", k, || format!("{} {}", text(&germs[i]), text(&germs[j])));
                }
            }
        }
        let r = pop.reach as i32;
        for y in -r..=r {
            for x in -r..=r {
                let p = RpuncPair::new(w.clone(), Vec2::new(x, y))?;
                t.realized += 1;
                if !images.iter().any(|q| q.same_as(&p)) {
                    t.surjective += 1;
                    t.note("surjective", k, || format!("x={}", p.displacement()));
                }
                if !alpha(&alpha_inv(sg, &p, PathOrder::VerticalFirst)?).same_as(&p) {
                    t.round_trip += 1;
                    t.note("round-trip", k, || format!("x={}", p.displacement()));
                }
            }
        }
        for (g, p) in germs.iter().zip(&images) {
            let h = alpha_inv(sg, p, PathOrder::HorizontalFirst)?;
            let v = alpha_inv(sg, p, PathOrder::VerticalFirst)?;
            if !germ_equiv_lemma(&h, g)? {
                t.round_trip += 1;
                t.note("round-trip", k, || text(g));
            }
            if !germ_equiv_lemma(&h, &v)? {
                t.path_independent += 1;
                t.note("path-independence", k, || text(g));
            }
            if g.element().is_idempotent() != p.displacement().is_zero() {
                t.unit_space += 1;
                t.note("unit-space", k, || text(g));
            }
            let inv = invert(sg, g)?;
            if !alpha(&inv).same_as(&rpunc_invert(p)) {
                t.inverse += 1;
                t.note("inverse", k, || text(g));
            }
            // composable partners: the population at θ_t(W)
            for g1 in germ_population(sg, inv.window(), pop)? {
                t.composable += 1;
                t.composable_radius = t.composable_radius.min(inv.window().radius());
                let lhs = alpha(&compose(sg, &g1, g)?);
                let rhs = rpunc_compose(&alpha(&g1), p)?;
                if !lhs.same_as(&rhs) {
                    t.multiplicative += 1;
                    t.note("multiplicative", k, || format!("{} {}", text(&g1), text(g)));
                }
            }
        }
    }
    Ok(t)
}

pub fn alpha_isomorphism(
    sg: &TilingSemigroup,
    windows: &[Window],
    pop: Population,
    tag: &str,
    report: &mut Report,
) -> Result<AlphaTally, GroupoidError> {
    let t = alpha_tally(sg, windows, pop)?;
    let base = format!("{tag} {pop} windows={} germs={}", windows.len(), t.germs);
    let lines = [
        ("groupoid.alpha.well-defined", format!("pairs={} failures={}", t.pairs, t.well_defined), t.well_defined),
        ("groupoid.alpha.injective", format!("pairs={} failures={}", t.pairs, t.injective), t.injective),
        ("groupoid.alpha.surjective", format!("targets={} missed={}", t.realized, t.surjective), t.surjective),
        ("groupoid.alpha.round-trip", format!("failures={}", t.round_trip), t.round_trip),
        ("groupoid.alpha.path-independence", format!("failures={}", t.path_independent), t.path_independent),
        ("groupoid.alpha.unit-space", format!("failures={}", t.unit_space), t.unit_space),
        ("groupoid.alpha.inverse", format!("failures={}", t.inverse), t.inverse),
        (
            "groupoid.alpha.multiplicative",
            format!("composable={} truthful-radius>={} failures={}", t.composable, t.composable_radius, t.multiplicative),
            t.multiplicative,
        ),
    ];
    for (check, detail, failures) in lines {
        report.push(check, format!("{base} {detail}"), Verdict::from_bool(failures == 0 && t.germs > 0));
    }
    for f in &t.failures {
        report.push("groupoid.alpha", format!("{tag} {f}"), Verdict::Fail);
    }
    Ok(t)
}
