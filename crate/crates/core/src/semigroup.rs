//! The inverse semigroup of doubly pointed pattern classes.
//!
//! A non-zero element `[t1, P, t2]` is stored in the representative whose
//! second marked tile `t2` has its puncture at the origin, so class equality
//! is structural equality.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{parse_tile, Alphabet, Label, Patch, Tile, Vec2, Window};
use crate::substitution::{SubstitutionSystem, SystemError};

/// Default cap on the number of elements an enumeration may produce.
pub const DEFAULT_ELEMENT_BUDGET: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("marked tile {0:?} is not a tile of the patch")]
    TileNotInPatch(Tile),
    #[error("patch support has disconnected interior")]
    NotConnected,
    #[error("patch does not occur in the tiling")]
    NotAdmissible,
    #[error("element is not an idempotent")]
    NotIdempotent,
    #[error("the zero element has no domain")]
    ZeroElement,
    #[error("window is not in the domain U(P, t2)")]
    NotInDomain,
    #[error("window radius {radius} is too small (need {needed})")]
    InsufficientWindow { radius: u32, needed: u32 },
    #[error("enumeration exceeded the budget of {0} elements")]
    BudgetExceeded(usize),
    #[error("bad element text: {0}")]
    Parse(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Canonical representative of a non-zero class `[t1, P, t2]` with the
/// puncture of `t2` at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternClass {
    patch: Patch,
    t1: Tile,
}

impl PatternClass {
    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn t1(&self) -> Tile {
        self.t1
    }

    pub fn t2(&self) -> Tile {
        Tile { pos: Vec2::ZERO, label: self.patch.label_at(Vec2::ZERO).expect("t2 sits at the origin") }
    }

    /// `x_s = x(t1) - x(t2)`.
    pub fn displacement(&self) -> Vec2 {
        self.t1.pos
    }

    pub fn is_idempotent(&self) -> bool {
        self.t1.pos.is_zero()
    }
}

/// An element of the tiling inverse semigroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Zero,
    Class(PatternClass),
}

impl Element {
    pub fn is_zero(&self) -> bool {
        matches!(self, Element::Zero)
    }

    pub fn class(&self) -> Option<&PatternClass> {
        match self {
            Element::Zero => None,
            Element::Class(c) => Some(c),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        match self {
            Element::Zero => true,
            Element::Class(c) => c.is_idempotent(),
        }
    }

    pub fn displacement(&self) -> Option<Vec2> {
        self.class().map(PatternClass::displacement)
    }

    /// `[t, P, t]` for a `t` at the origin, without checking `P`.
    pub(crate) fn idempotent_unchecked(t: Tile, patch: Patch) -> Element {
        debug_assert!(t.pos.is_zero() && patch.contains(&t));
        Element::Class(PatternClass { patch, t1: t })
    }

    /// Single-line text form `t1 | tile; tile; ... | t2`, or `0`.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        match self {
            Element::Zero => "0".to_string(),
            Element::Class(c) => {
                let tile = |t: Tile| format!("{} {} {}", alphabet.name(t.label), t.pos.x, t.pos.y);
                let body: Vec<String> = c.patch.tiles().iter().map(|&t| tile(t)).collect();
                format!("{} | {} | {}", tile(c.t1), body.join("; "), tile(c.t2()))
            }
        }
    }

    /// Parses [`Element::to_text`] output. The class is re-canonicalized but
    /// not checked for admissibility.
    pub fn from_text(text: &str, alphabet: &Alphabet) -> Result<Element, SemigroupError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Element::Zero);
        }
        let parts: Vec<&str> = text.split('|').map(str::trim).collect();
        let [t1, body, t2] = parts[..] else {
            return Err(SemigroupError::Parse(format!("expected three `|`-separated fields in `{text}`")));
        };
        let t1 = parse_tile(t1, alphabet).map_err(SemigroupError::Parse)?;
        let t2 = parse_tile(t2, alphabet).map_err(SemigroupError::Parse)?;
        let tiles = body
            .split(';')
            .map(|t| parse_tile(t.trim(), alphabet).map_err(SemigroupError::Parse))
            .collect::<Result<Vec<_>, _>>()?;
        let patch = Patch::new(tiles).map_err(|e| SemigroupError::Parse(e.to_string()))?;
        canonical(t1, &patch, t2)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&Alphabet::numeric(256)))
    }
}

fn canonical(t1: Tile, patch: &Patch, t2: Tile) -> Result<Element, SemigroupError> {
    for t in [t1, t2] {
        if !patch.contains(&t) {
            return Err(SemigroupError::TileNotInPatch(t));
        }
    }
    let shift = -t2.pos;
    Ok(Element::Class(PatternClass { patch: patch.translate(shift), t1: t1.translate(shift) }))
}

/// Connected cell sets containing the origin, inside `B_r(0)`, with at most
/// `max_cells` cells. Each set is sorted; the list is sorted.
pub fn connected_supports(radius: u32, max_cells: usize) -> Vec<Vec<Vec2>> {
    let mut seen: HashSet<Vec<Vec2>> = HashSet::new();
    let start = vec![Vec2::ZERO];
    seen.insert(start.clone());
    let mut frontier = vec![start];
    let mut out = frontier.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for cells in &frontier {
            if cells.len() >= max_cells {
                continue;
            }
            for c in cells {
                for q in c.neighbours() {
                    if q.cheb() > radius || cells.binary_search(&q).is_ok() {
                        continue;
                    }
                    let mut grown = cells.clone();
                    let at = grown.binary_search(&q).unwrap_err();
                    grown.insert(at, q);
                    if seen.insert(grown.clone()) {
                        next.push(grown.clone());
                        out.push(grown);
                    }
                }
            }
        }
        frontier = next;
    }
    out.sort();
    out
}

/// The tiling inverse semigroup of one substitution system.
#[derive(Debug, Clone)]
pub struct TilingSemigroup {
    system: Arc<SubstitutionSystem>,
    element_budget: usize,
}

impl TilingSemigroup {
    pub fn new(system: SubstitutionSystem) -> Self {
        Self::from_arc(Arc::new(system))
    }

    pub fn from_arc(system: Arc<SubstitutionSystem>) -> Self {
        TilingSemigroup { system, element_budget: DEFAULT_ELEMENT_BUDGET }
    }

    pub fn with_element_budget(mut self, budget: usize) -> Self {
        self.element_budget = budget;
        self
    }

    pub fn element_budget(&self) -> usize {
        self.element_budget
    }

    pub fn system(&self) -> &SubstitutionSystem {
        &self.system
    }

    pub fn system_arc(&self) -> &Arc<SubstitutionSystem> {
        &self.system
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.system.alphabet()
    }

    /// Membership in 𝓜: connected interior and occurrence in the tiling.
    pub fn is_pattern(&self, patch: &Patch) -> bool {
        patch.connected_interior() && self.system.is_admissible(patch)
    }

    /// The class `[t1, P, t2]`.
    pub fn dppc(&self, t1: Tile, patch: &Patch, t2: Tile) -> Result<Element, SemigroupError> {
        let element = canonical(t1, patch, t2)?;
        if !patch.connected_interior() {
            return Err(SemigroupError::NotConnected);
        }
        if !self.system.is_admissible(patch) {
            return Err(SemigroupError::NotAdmissible);
        }
        Ok(element)
    }

    /// The idempotent `[t, P, t]`.
    pub fn idempotent(&self, t: Tile, patch: &Patch) -> Result<Element, SemigroupError> {
        self.dppc(t, patch, t)
    }

    /// Product of two classes: the right factor is translated so its first
    /// marked tile lands on the left factor's second one, and the result is
    /// zero unless the union is an admissible patch.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        let (Element::Class(a), Element::Class(b)) = (a, b) else {
            return Element::Zero;
        };
        let q = b.t1.pos;
        if a.patch.label_at(Vec2::ZERO) != Some(b.t1.label) {
            return Element::Zero;
        }
        if !self.system.is_admissible_union(&a.patch, q, &b.patch) {
            return Element::Zero;
        }
        let union = a.patch.merge_shifted(q, &b.patch);
        Element::Class(PatternClass { patch: union, t1: a.t1.translate(q) })
    }

    pub fn star(&self, a: &Element) -> Element {
        match a {
            Element::Zero => Element::Zero,
            Element::Class(c) => {
                let shift = -c.t1.pos;
                Element::Class(PatternClass {
                    patch: c.patch.translate(shift),
                    t1: c.t2().translate(shift),
                })
            }
        }
    }

    /// Natural order on idempotents: `e ≤ f` iff `e = ef`.
    pub fn leq(&self, e: &Element, f: &Element) -> Result<bool, SemigroupError> {
        if !e.is_idempotent() || !f.is_idempotent() {
            return Err(SemigroupError::NotIdempotent);
        }
        Ok(self.multiply(e, f) == *e)
    }

    /// `U(P, t2)` membership of a window. Undecidable (an error) when the
    /// patch reaches beyond the window's truthful radius.
    pub fn in_domain(&self, s: &Element, w: &Window) -> Result<bool, SemigroupError> {
        let c = s.class().ok_or(SemigroupError::ZeroElement)?;
        let needed = c.patch.radius();
        if needed > w.radius() {
            return Err(SemigroupError::InsufficientWindow { radius: w.radius(), needed });
        }
        Ok(w.contains_patch(&c.patch))
    }

    /// `U(P, t1)` membership: the range of `θ^Ω_s`.
    pub fn in_range(&self, s: &Element, w: &Window) -> Result<bool, SemigroupError> {
        self.in_domain(&self.star(s), w)
    }

    /// `θ^Ω_s(W) = W - x_s` on `U(P, t2)`; the result is truthful on
    /// `B_{R - |x_s|}`.
    pub fn theta_omega(&self, s: &Element, w: &Window) -> Result<Window, SemigroupError> {
        if !self.in_domain(s, w)? {
            return Err(SemigroupError::NotInDomain);
        }
        let x = s.displacement().expect("non-zero");
        w.shifted(x).ok_or(SemigroupError::InsufficientWindow { radius: w.radius(), needed: x.cheb() })
    }

    /// Every labeling of `cells` that occurs in the tiling, read off the
    /// legal squares of `B_r`.
    pub fn labelings(&self, cells: &[Vec2], squares: &[Patch]) -> Vec<Patch> {
        let mut out = BTreeSet::new();
        for sq in squares {
            let tiles: Vec<Tile> = cells
                .iter()
                .map(|&c| Tile { pos: c, label: sq.label_at(c).expect("square covers the ball") })
                .collect();
            out.insert(Patch::from_sorted(tiles));
        }
        out.into_iter().collect()
    }

    /// Legal squares `T(B_r(x)) - x`, centred on the origin.
    pub fn centred_atlas(&self, r: u32) -> Result<Vec<Patch>, SemigroupError> {
        let centre = Vec2::new(r as i32, r as i32);
        Ok(self.system.atlas(r)?.into_iter().map(|p| p.translate(-centre)).collect())
    }

    /// Patches in 𝓜 containing the origin whose support is one of `supports`.
    pub fn patterns_on(&self, supports: &[Vec<Vec2>], r: u32) -> Result<Vec<Patch>, SemigroupError> {
        let squares = self.centred_atlas(r)?;
        let mut out = Vec::new();
        for cells in supports {
            for p in self.labelings(cells, &squares) {
                debug_assert!(self.is_pattern(&p));
                out.push(p);
                if out.len() > self.element_budget {
                    return Err(SemigroupError::BudgetExceeded(self.element_budget));
                }
            }
        }
        Ok(out)
    }

    /// All non-zero elements whose canonical patch lies in `B_r(0)` and has
    /// at most `max_tiles` tiles, sorted.
    pub fn enumerate_elements(&self, r: u32, max_tiles: usize) -> Result<Vec<Element>, SemigroupError> {
        let supports = connected_supports(r, max_tiles);
        let mut out = Vec::new();
        for patch in self.patterns_on(&supports, r)? {
            let t2 = Tile { pos: Vec2::ZERO, label: patch.label_at(Vec2::ZERO).unwrap() };
            for &t1 in patch.tiles() {
                out.push(self.dppc(t1, &patch, t2)?);
            }
            if out.len() > self.element_budget {
                return Err(SemigroupError::BudgetExceeded(self.element_budget));
            }
        }
        out.sort();
        Ok(out)
    }

    /// The idempotent on the single origin tile with the given label.
    pub fn unit_idempotent(&self, label: Label) -> Element {
        let t = Tile { pos: Vec2::ZERO, label };
        Element::Class(PatternClass { patch: Patch::single(t), t1: t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid() -> TilingSemigroup {
        TilingSemigroup::new(SubstitutionSystem::builtin("solid").unwrap())
    }

    fn checkerboard() -> TilingSemigroup {
        TilingSemigroup::new(SubstitutionSystem::builtin("checkerboard").unwrap())
    }

    const U: Label = Label(0);

    fn patch(tiles: &[(Label, i32, i32)]) -> Patch {
        Patch::new(tiles.iter().map(|&(l, x, y)| Tile::new(l, x, y))).unwrap()
    }

    #[test]
    fn smallest_idempotent() {
        let s = solid();
        let t = Tile::new(U, 0, 0);
        let e = s.dppc(t, &Patch::single(t), t).unwrap();
        assert!(e.is_idempotent());
        assert_eq!(e.class().unwrap().patch().len(), 1);
    }

    #[test]
    fn canonicalization_translates_t2_to_origin() {
        let s = solid();
        let p = patch(&[(U, 3, 3), (U, 4, 3)]);
        let e = s.dppc(Tile::new(U, 3, 3), &p, Tile::new(U, 4, 3)).unwrap();
        let c = e.class().unwrap();
        assert_eq!(c.t1(), Tile::new(U, -1, 0));
        assert_eq!(c.patch(), &patch(&[(U, -1, 0), (U, 0, 0)]));
        assert_eq!(c.t2(), Tile::new(U, 0, 0));
    }

    #[test]
    fn dppc_errors() {
        let s = solid();
        let p = patch(&[(U, 0, 0), (U, 1, 1)]);
        assert_eq!(s.dppc(Tile::new(U, 0, 0), &p, Tile::new(U, 0, 0)), Err(SemigroupError::NotConnected));
        assert!(matches!(
            s.dppc(Tile::new(U, 5, 0), &p, Tile::new(U, 0, 0)),
            Err(SemigroupError::TileNotInPatch(_))
        ));
        let cb = checkerboard();
        let b = Label(1);
        let bad = patch(&[(b, 0, 0), (b, 1, 0)]);
        assert_eq!(cb.dppc(Tile::new(b, 0, 0), &bad, Tile::new(b, 1, 0)), Err(SemigroupError::NotAdmissible));
    }

    #[test]
    fn solid_product_example() {
        let s = solid();
        let a = s
            .dppc(Tile::new(U, 0, 0), &patch(&[(U, 0, 0), (U, 1, 0)]), Tile::new(U, 1, 0))
            .unwrap();
        let b = s
            .dppc(Tile::new(U, 0, 0), &patch(&[(U, 0, 0), (U, 0, 1)]), Tile::new(U, 0, 1))
            .unwrap();
        let expected = s
            .dppc(
                Tile::new(U, -1, 0),
                &patch(&[(U, -1, 0), (U, 0, 0), (U, 0, 1)]),
                Tile::new(U, 0, 1),
            )
            .unwrap();
        // canonical form of the expected product: t2 = u@(0,1) moved to the origin
        let c = expected.class().unwrap();
        assert_eq!(c.t1(), Tile::new(U, -1, -1));
        assert_eq!(s.multiply(&a, &b), expected);
    }

    #[test]
    fn star_swaps_marks() {
        let s = solid();
        let a = s
            .dppc(Tile::new(U, 0, 0), &patch(&[(U, 0, 0), (U, 1, 0), (U, 1, 1)]), Tile::new(U, 1, 1))
            .unwrap();
        let b = s.star(&a);
        assert_eq!(b.displacement().unwrap(), -a.displacement().unwrap());
        assert_eq!(s.star(&b), a);
        assert_eq!(s.star(&Element::Zero), Element::Zero);
    }

    #[test]
    fn zero_absorbs() {
        let s = solid();
        let e = s.unit_idempotent(U);
        assert!(s.multiply(&Element::Zero, &e).is_zero());
        assert!(s.multiply(&e, &Element::Zero).is_zero());
    }

    #[test]
    fn leq_rejects_non_idempotents() {
        let s = solid();
        let a = s
            .dppc(Tile::new(U, 0, 0), &patch(&[(U, 0, 0), (U, 1, 0)]), Tile::new(U, 1, 0))
            .unwrap();
        assert_eq!(s.leq(&a, &a), Err(SemigroupError::NotIdempotent));
        let e = s.unit_idempotent(U);
        assert_eq!(s.leq(&e, &e), Ok(true));
    }

    #[test]
    fn element_text_round_trip() {
        let s = solid();
        let a = s
            .dppc(Tile::new(U, 0, 0), &patch(&[(U, 0, 0), (U, 1, 0)]), Tile::new(U, 1, 0))
            .unwrap();
        let text = a.to_text(s.alphabet());
        assert_eq!(text, "u -1 0 | u -1 0; u 0 0 | u 0 0");
        assert_eq!(Element::from_text(&text, s.alphabet()).unwrap(), a);
        assert_eq!(Element::from_text("0", s.alphabet()).unwrap(), Element::Zero);
    }

    #[test]
    fn support_counts() {
        // fixed polyomino placements containing a given cell, clipped to the ball
        assert_eq!(connected_supports(0, 5).len(), 1);
        assert_eq!(connected_supports(1, 2).len(), 5);
        assert_eq!(connected_supports(1, 3).len(), 19);
        assert_eq!(connected_supports(2, 4).len(), 95);
    }

    #[test]
    fn solid_enumeration_base_case() {
        let s = solid();
        assert_eq!(s.enumerate_elements(0, 1).unwrap().len(), 1);
    }

    #[test]
    fn theta_omega_errors() {
        let s = solid();
        let w = s.system().fixed_point_window(1).unwrap();
        assert_eq!(s.theta_omega(&Element::Zero, &w), Err(SemigroupError::ZeroElement));
        let far = s
            .dppc(Tile::new(U, 0, 0), &patch(&[(U, 0, 0), (U, 1, 0), (U, 2, 0)]), Tile::new(U, 2, 0))
            .unwrap();
        assert!(matches!(s.theta_omega(&far, &w), Err(SemigroupError::InsufficientWindow { .. })));
    }
}
