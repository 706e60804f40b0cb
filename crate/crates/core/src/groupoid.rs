//! Germs of the semigroup action on punctured windows, the translation
//! groupoid of pairs `(T - x, T)`, and the map `α` between them.
//!
//! Germs are never canonicalized; two germs at the same window are compared
//! with [`germ_equiv_lemma`], and [`germ_equiv_def`] is the slower search for
//! an idempotent witness kept as a cross-check.

use std::collections::HashMap;

use thiserror::Error;

use crate::filters::{xi_t, FilterError, IdempotentUniverse};
use crate::geometry::{Patch, Tile, Vec2, Window};
use crate::semigroup::{Element, SemigroupError, TilingSemigroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("window radius {radius} is too small (need {needed})")]
    InsufficientWindow { radius: u32, needed: u32 },
    #[error("germs sit at different windows")]
    DifferentPoints,
    #[error("pair is not composable")]
    NotComposable,
    #[error("composable germs multiplied to zero")]
    ZeroProduct,
    #[error("no idempotent witness in the universe although the germs are equivalent")]
    UniverseTooSmall,
    #[error("refining patch does not contain the element's patch")]
    NotARefinement,
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// `[s, W]` for a non-zero `s` with `W ∈ U(P, t2)`.
#[derive(Debug, Clone)]
pub struct Germ {
    s: Element,
    w: Window,
}

impl Germ {
    pub fn new(sg: &TilingSemigroup, s: Element, w: Window) -> Result<Germ, GroupoidError> {
        if !sg.in_domain(&s, &w)? {
            return Err(SemigroupError::NotInDomain.into());
        }
        Ok(Germ { s, w })
    }

    pub fn element(&self) -> &Element {
        &self.s
    }

    pub fn window(&self) -> &Window {
        &self.w
    }

    pub fn displacement(&self) -> Vec2 {
        self.s.displacement().expect("germ elements are non-zero")
    }

    fn patch(&self) -> &Patch {
        self.s.class().expect("germ elements are non-zero").patch()
    }

    fn t1(&self) -> Tile {
        self.s.class().expect("germ elements are non-zero").t1()
    }
}

fn same_window(g1: &Germ, g2: &Germ) -> Result<(), GroupoidError> {
    if g1.w.same_point(&g2.w) {
        Ok(())
    } else {
        Err(GroupoidError::DifferentPoints)
    }
}

/// Equal marked tiles and `P ∪ P' ⊆ W`.
pub fn germ_equiv_lemma(g1: &Germ, g2: &Germ) -> Result<bool, GroupoidError> {
    same_window(g1, g2)?;
    if g1.t1() != g2.t1() {
        return Ok(false);
    }
    let Ok(union) = g1.patch().union(g2.patch()) else {
        return Ok(false);
    };
    let needed = union.radius();
    if needed > g1.w.radius() {
        return Err(GroupoidError::InsufficientWindow { radius: g1.w.radius(), needed });
    }
    Ok(g1.w.contains_patch(&union))
}

/// The products `s·e` for a list of elements against every idempotent of the
/// universe whose domain holds the window, interned so that a witness search
/// is a scan over integers.
#[derive(Debug, Clone)]
pub struct WitnessTable {
    witnesses: usize,
    ids: Vec<u32>,
}

impl WitnessTable {
    pub fn new(sg: &TilingSemigroup, w: &Window, u: &IdempotentUniverse, elements: &[&Element]) -> Result<Self, GroupoidError> {
        let members = xi_t(w, u)?;
        let mut intern: HashMap<Element, u32> = HashMap::new();
        let mut ids = Vec::with_capacity(elements.len() * members.len());
        for s in elements {
            for &e in members.members() {
                let p = sg.multiply(s, u.item(e));
                let next = intern.len() as u32;
                ids.push(*intern.entry(p).or_insert(next));
            }
        }
        Ok(WitnessTable { witnesses: members.len(), ids })
    }

    /// Some idempotent `e` with `W ∈ D_e` has `s_i e = s_j e`.
    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        let m = self.witnesses;
        self.ids[i * m..(i + 1) * m].iter().zip(&self.ids[j * m..(j + 1) * m]).any(|(a, b)| a == b)
    }
}

/// An idempotent `e` in the universe with `W ∈ D_e` and `se = te`.
/// When no witness exists but the patch criterion says the germs are
/// equivalent, the universe is too small to decide and that is an error.
pub fn germ_equiv_def(sg: &TilingSemigroup, g1: &Germ, g2: &Germ, u: &IdempotentUniverse) -> Result<bool, GroupoidError> {
    same_window(g1, g2)?;
    let table = WitnessTable::new(sg, &g1.w, u, &[&g1.s, &g2.s])?;
    if table.equivalent(0, 1) {
        return Ok(true);
    }
    if germ_equiv_lemma(g1, g2)? {
        return Err(GroupoidError::UniverseTooSmall);
    }
    Ok(false)
}

/// `[s, θ_t(y)] · [t, y] = [st, y]`.
pub fn compose(sg: &TilingSemigroup, g1: &Germ, g2: &Germ) -> Result<Germ, GroupoidError> {
    let image = sg.theta_omega(&g2.s, &g2.w)?;
    if !g1.w.same_point(&image) {
        return Err(GroupoidError::NotComposable);
    }
    let st = sg.multiply(&g1.s, &g2.s);
    if st.is_zero() {
        return Err(GroupoidError::ZeroProduct);
    }
    Germ::new(sg, st, g2.w.clone())
}

/// `[s, x]⁻¹ = [s*, θ_s(x)]`.
pub fn invert(sg: &TilingSemigroup, g: &Germ) -> Result<Germ, GroupoidError> {
    let image = sg.theta_omega(&g.s, &g.w)?;
    Germ::new(sg, sg.star(&g.s), image)
}

/// The pair `(T - x, T)`, stored as `T` and `x`.
#[derive(Debug, Clone)]
pub struct RpuncPair {
    source: Window,
    displacement: Vec2,
}

impl RpuncPair {
    pub fn new(source: Window, displacement: Vec2) -> Result<RpuncPair, GroupoidError> {
        if displacement.cheb() > source.radius() {
            return Err(GroupoidError::InsufficientWindow { radius: source.radius(), needed: displacement.cheb() });
        }
        Ok(RpuncPair { source, displacement })
    }

    pub fn source(&self) -> &Window {
        &self.source
    }

    pub fn displacement(&self) -> Vec2 {
        self.displacement
    }

    /// `T - x`, truthful on the shrunken radius.
    pub fn displaced(&self) -> Window {
        self.source.shifted(self.displacement).expect("displacement within the radius")
    }

    /// Equal displacements and sources agreeing on the common radius.
    pub fn same_as(&self, other: &RpuncPair) -> bool {
        self.displacement == other.displacement && self.source.same_point(&other.source)
    }
}

/// `α([s, T]) = (T - x_s, T)`.
pub fn alpha(g: &Germ) -> RpuncPair {
    RpuncPair { source: g.w.clone(), displacement: g.displacement() }
}

/// Order in which the connecting path of [`alpha_inv`] walks the axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    HorizontalFirst,
    VerticalFirst,
}

/// Cells of the L-shaped lattice path from the origin to `x`.
pub fn l_path(x: Vec2, order: PathOrder) -> Vec<Vec2> {
    let corner = match order {
        PathOrder::HorizontalFirst => Vec2::new(x.x, 0),
        PathOrder::VerticalFirst => Vec2::new(0, x.y),
    };
    let mut cells = vec![Vec2::ZERO];
    for (from, to) in [(Vec2::ZERO, corner), (corner, x)] {
        let step = Vec2::new((to.x - from.x).signum(), (to.y - from.y).signum());
        let mut c = from;
        while c != to {
            c += step;
            cells.push(c);
        }
    }
    cells
}

/// `[T(x), P, T(0)]` at `T`, where `P` is the tiles of `T` along an L-shaped
/// path from the origin to `x`.
pub fn alpha_inv(sg: &TilingSemigroup, p: &RpuncPair, order: PathOrder) -> Result<Germ, GroupoidError> {
    let w = &p.source;
    let x = p.displacement;
    let tiles: Vec<Tile> = l_path(x, order)
        .into_iter()
        .map(|c| w.tile_at(c).ok_or(GroupoidError::InsufficientWindow { radius: w.radius(), needed: c.cheb() }))
        .collect::<Result<_, _>>()?;
    let patch = Patch::new(tiles).expect("path cells are distinct");
    let s = sg.dppc(w.tile_at(x).expect("checked above"), &patch, w.origin_tile())?;
    Germ::new(sg, s, w.clone())
}

/// `(T - x - x', T')` from `(T - x, T)` and `(T' - x', T')` with `T = T' - x'`.
pub fn rpunc_compose(p1: &RpuncPair, p2: &RpuncPair) -> Result<RpuncPair, GroupoidError> {
    if !p1.source.same_point(&p2.displaced()) {
        return Err(GroupoidError::NotComposable);
    }
    RpuncPair::new(p2.source.clone(), p1.displacement + p2.displacement)
}

/// `(T, T - x)`.
pub fn rpunc_invert(p: &RpuncPair) -> RpuncPair {
    RpuncPair { source: p.displaced(), displacement: -p.displacement }
}

/// Sizes of the two sides of `α(Θ(s, U(Q, t2))) = graph(θ_s on U(Q, t2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisCorrespondence {
    pub image: usize,
    pub graph: usize,
    pub equal: bool,
}

/// Compares, over `windows`, the `α`-image of the basis set `Θ(s, U(Q, t2))`
/// with the graph of `θ^Ω_s` restricted to `U(Q, t2)`. `Q` is given in the
/// coordinates of `s` (`t2` at the origin) and must contain `P`.
pub fn basis_correspondence(
    sg: &TilingSemigroup,
    s: &Element,
    q: &Patch,
    windows: &[Window],
) -> Result<BasisCorrespondence, GroupoidError> {
    let c = s.class().ok_or(SemigroupError::ZeroElement)?;
    if !c.patch().is_subpatch_of(q) {
        return Err(GroupoidError::NotARefinement);
    }
    let mut image = Vec::new();
    let mut graph = Vec::new();
    for w in windows {
        if q.radius() > w.radius() {
            return Err(GroupoidError::InsufficientWindow { radius: w.radius(), needed: q.radius() });
        }
        if !w.contains_patch(q) {
            continue;
        }
        let p = alpha(&Germ::new(sg, s.clone(), w.clone())?);
        image.push((p.displaced(), p.source().clone()));
        graph.push((sg.theta_omega(s, w)?, w.clone()));
    }
    let key = |(a, b): &(Window, Window)| (a.patch(), b.patch());
    image.sort_by_cached_key(key);
    image.dedup();
    graph.sort_by_cached_key(key);
    graph.dedup();
    Ok(BasisCorrespondence { image: image.len(), graph: graph.len(), equal: image == graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::build_plaque_universe;
    use crate::substitution::SubstitutionSystem;

    fn chair() -> TilingSemigroup {
        TilingSemigroup::new(SubstitutionSystem::builtin("chair").unwrap())
    }

    fn germ_on(sg: &TilingSemigroup, w: &Window, cells: &[(i32, i32)], t1: (i32, i32)) -> Germ {
        let tiles: Vec<Tile> = cells.iter().map(|&(x, y)| w.tile_at(Vec2::new(x, y)).unwrap()).collect();
        let patch = Patch::new(tiles).unwrap();
        let s = sg.dppc(w.tile_at(Vec2::new(t1.0, t1.1)).unwrap(), &patch, w.origin_tile()).unwrap();
        Germ::new(sg, s, w.clone()).unwrap()
    }

    #[test]
    fn l_paths() {
        assert_eq!(l_path(Vec2::ZERO, PathOrder::HorizontalFirst), vec![Vec2::ZERO]);
        assert_eq!(
            l_path(Vec2::new(-1, 2), PathOrder::HorizontalFirst),
            vec![Vec2::new(0, 0), Vec2::new(-1, 0), Vec2::new(-1, 1), Vec2::new(-1, 2)]
        );
        assert_eq!(
            l_path(Vec2::new(-1, 2), PathOrder::VerticalFirst),
            vec![Vec2::new(0, 0), Vec2::new(0, 1), Vec2::new(0, 2), Vec2::new(-1, 2)]
        );
    }

    #[test]
    fn lemma_examples() {
        let sg = chair();
        let w = sg.system().fixed_point_window(6).unwrap();
        let g = germ_on(&sg, &w, &[(0, 0), (1, 0)], (1, 0));
        assert!(germ_equiv_lemma(&g, &g).unwrap());
        let h = germ_on(&sg, &w, &[(0, 0), (1, 0)], (0, 0));
        assert!(!germ_equiv_lemma(&g, &h).unwrap());
        let k = germ_on(&sg, &w, &[(0, 0), (1, 0), (1, 1)], (1, 0));
        assert!(germ_equiv_lemma(&g, &k).unwrap());
        assert!(germ_equiv_lemma(&k, &g).unwrap());
    }

    #[test]
    fn definition_agrees_on_examples() {
        let sg = chair();
        let w = sg.system().fixed_point_window(6).unwrap();
        let u = build_plaque_universe(&sg, 2, 25).unwrap();
        let g = germ_on(&sg, &w, &[(0, 0), (1, 0)], (1, 0));
        let h = germ_on(&sg, &w, &[(0, 0), (1, 0)], (0, 0));
        let k = germ_on(&sg, &w, &[(0, 0), (1, 0), (1, 1)], (1, 0));
        assert!(germ_equiv_def(&sg, &g, &g, &u).unwrap());
        assert!(!germ_equiv_def(&sg, &g, &h, &u).unwrap());
        assert!(germ_equiv_def(&sg, &g, &k, &u).unwrap());
        // a universe of single tiles cannot separate anything from `g`
        let tiny = build_plaque_universe(&sg, 0, 1).unwrap();
        assert_eq!(germ_equiv_def(&sg, &g, &k, &tiny), Err(GroupoidError::UniverseTooSmall));
    }

    #[test]
    fn different_windows_are_rejected() {
        let sg = chair();
        let w = sg.system().fixed_point_window(6).unwrap();
        let v = w.shifted(Vec2::new(1, 0)).unwrap();
        let g = germ_on(&sg, &w, &[(0, 0)], (0, 0));
        let h = germ_on(&sg, &v, &[(0, 0)], (0, 0));
        assert_eq!(germ_equiv_lemma(&g, &h), Err(GroupoidError::DifferentPoints));
    }

    #[test]
    fn unit_and_involution_laws() {
        let sg = chair();
        let w = sg.system().fixed_point_window(8).unwrap();
        let g = germ_on(&sg, &w, &[(0, 0), (0, 1), (1, 1)], (1, 1));
        let inv = invert(&sg, &g).unwrap();
        let unit = compose(&sg, &inv, &g).unwrap();
        let source = Germ::new(&sg, sg.multiply(&sg.star(g.element()), g.element()), w.clone()).unwrap();
        assert!(germ_equiv_lemma(&unit, &source).unwrap());
        assert!(germ_equiv_lemma(&invert(&sg, &inv).unwrap(), &g).unwrap());
        assert_eq!(compose(&sg, &g, &g).err(), Some(GroupoidError::NotComposable));
    }

    #[test]
    fn alpha_round_trip() {
        let sg = chair();
        let w = sg.system().fixed_point_window(8).unwrap();
        let g = germ_on(&sg, &w, &[(0, 0), (1, 0), (1, 1)], (1, 1));
        let p = alpha(&g);
        assert_eq!(p.displacement(), Vec2::new(1, 1));
        for order in [PathOrder::HorizontalFirst, PathOrder::VerticalFirst] {
            let back = alpha_inv(&sg, &p, order).unwrap();
            assert!(germ_equiv_lemma(&back, &g).unwrap());
            assert!(alpha(&back).same_as(&p));
        }
        let e = germ_on(&sg, &w, &[(0, 0), (1, 0)], (0, 0));
        assert_eq!(alpha(&e).displacement(), Vec2::ZERO);
    }

    #[test]
    fn rpunc_laws() {
        let sg = chair();
        let w = sg.system().fixed_point_window(8).unwrap();
        let p = RpuncPair::new(w, Vec2::new(2, -1)).unwrap();
        let q = rpunc_invert(&p);
        assert_eq!(rpunc_compose(&p, &q).unwrap().displacement(), Vec2::ZERO);
        assert_eq!(rpunc_compose(&q, &p).unwrap().displacement(), Vec2::ZERO);
        assert!(rpunc_compose(&p, &p).is_err());
    }

    #[test]
    fn basis_sets() {
        let sg = chair();
        let windows = sg.system().realized_windows(2, 6).unwrap();
        let w = &windows[0];
        let g = germ_on(&sg, w, &[(0, 0), (1, 0)], (1, 0));
        let p = g.patch().clone();
        let full = basis_correspondence(&sg, g.element(), &p, &windows).unwrap();
        assert!(full.equal);
        let domain = windows.iter().filter(|v| v.contains_patch(&p)).count();
        assert_eq!(full.graph, domain);
        let q = w.restrict(1).patch();
        let part = basis_correspondence(&sg, g.element(), &q, &windows).unwrap();
        assert!(part.equal && part.graph < full.graph);
        let clash = p.union(&Patch::single(Tile { pos: Vec2::new(0, 1), label: crate::Label(9) })).unwrap();
        let none = basis_correspondence(&sg, g.element(), &clash, &windows).unwrap();
        assert_eq!((none.image, none.graph, none.equal), (0, 0, true));
    }
}
