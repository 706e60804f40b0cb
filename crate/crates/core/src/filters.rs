//! Filters, ultrafilters and characters on finite truncations of the
//! idempotent semilattice, and the action of the semigroup on characters.
//!
//! Idempotents `[t, P, t]` are stored with `t` at the origin, so an
//! idempotent is determined by its patch and `e ≤ f` is `P_f ⊆ P_e`.

use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{Alphabet, Label, Patch, Tile, Vec2, Window};
use crate::semigroup::{connected_supports, Element, SemigroupError, TilingSemigroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilterError {
    #[error("window radius {radius} is too small (need {needed})")]
    InsufficientWindow { radius: u32, needed: u32 },
    #[error("character is not 1 at s*s")]
    DomainViolation,
    #[error("{0} is not in the universe")]
    NotInUniverse(String),
    #[error("member patches are not compatible")]
    IncompatibleMembers,
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}

/// Which idempotents of `B_r` a universe keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniverseShape {
    /// Every pattern containing the origin.
    Connected,
    /// Axis-aligned rectangles containing the origin.
    Plaques,
}

/// Idempotents whose patch contains the origin, lies in `B_r` and has at
/// most `N` tiles, in sorted order.
#[derive(Debug, Clone)]
pub struct IdempotentUniverse {
    radius: u32,
    max_tiles: usize,
    shape: UniverseShape,
    /// Cell sets every item's support is drawn from, each sorted.
    supports: Vec<Vec<Vec2>>,
    items: Vec<Element>,
    index: HashMap<Patch, usize>,
}

impl IdempotentUniverse {
    fn from_items(
        radius: u32,
        max_tiles: usize,
        shape: UniverseShape,
        supports: Vec<Vec<Vec2>>,
        mut items: Vec<Element>,
    ) -> Self {
        items.sort();
        items.dedup();
        let index = items.iter().enumerate().map(|(i, e)| (patch_of(e).clone(), i)).collect();
        IdempotentUniverse { radius, max_tiles, shape, supports, items, index }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn max_tiles(&self) -> usize {
        self.max_tiles
    }

    pub fn shape(&self) -> UniverseShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Element] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &Element {
        &self.items[i]
    }

    pub fn patch(&self, i: usize) -> &Patch {
        patch_of(&self.items[i])
    }

    /// Index of an element, if it is an idempotent of the universe.
    pub fn position(&self, e: &Element) -> Option<usize> {
        let c = e.class()?;
        if !c.is_idempotent() {
            return None;
        }
        self.position_of_patch(c.patch())
    }

    /// Index of the idempotent on `patch` (origin-marked).
    pub fn position_of_patch(&self, patch: &Patch) -> Option<usize> {
        self.index.get(patch).copied()
    }

    /// `items[i] ≤ items[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.patch(j).is_subpatch_of(self.patch(i))
    }

    /// Items whose patch agrees with `label_at` on every cell, one lookup
    /// per support.
    pub fn members_within(&self, label_at: impl Fn(Vec2) -> Option<Label>) -> Vec<usize> {
        let mut out = Vec::new();
        'support: for cells in &self.supports {
            let mut tiles = Vec::with_capacity(cells.len());
            for &c in cells {
                match label_at(c) {
                    Some(label) => tiles.push(Tile { pos: c, label }),
                    None => continue 'support,
                }
            }
            if let Some(&i) = self.index.get(&Patch::from_sorted(tiles)) {
                out.push(i);
            }
        }
        out.sort_unstable();
        out
    }
}

fn patch_of(e: &Element) -> &Patch {
    e.class().expect("universe items are non-zero").patch()
}

/// The universe of all idempotents from `enumerate_elements(r, N)`.
pub fn build_universe(sg: &TilingSemigroup, r: u32, n: usize) -> Result<IdempotentUniverse, FilterError> {
    let items = sg.enumerate_elements(r, n)?.into_iter().filter(Element::is_idempotent).collect();
    Ok(IdempotentUniverse::from_items(r, n, UniverseShape::Connected, connected_supports(r, n), items))
}

/// Rectangles `[x0, x1] × [y0, y1] ⊆ B_r` containing the origin with at most
/// `N` cells, under every labeling that occurs in the tiling.
pub fn build_plaque_universe(sg: &TilingSemigroup, r: u32, n: usize) -> Result<IdempotentUniverse, FilterError> {
    let squares = sg.centred_atlas(r)?;
    let ri = r as i32;
    let mut items = Vec::new();
    let mut supports = Vec::new();
    for x0 in -ri..=0 {
        for x1 in 0..=ri {
            for y0 in -ri..=0 {
                for y1 in 0..=ri {
                    if ((x1 - x0 + 1) * (y1 - y0 + 1)) as usize > n {
                        continue;
                    }
                    let cells: Vec<Vec2> =
                        (y0..=y1).flat_map(|y| (x0..=x1).map(move |x| Vec2::new(x, y))).collect();
                    for p in sg.labelings(&cells, &squares) {
                        items.push(origin_idempotent(p));
                    }
                    supports.push(cells);
                    if items.len() > sg.element_budget() {
                        return Err(SemigroupError::BudgetExceeded(sg.element_budget()).into());
                    }
                }
            }
        }
    }
    Ok(IdempotentUniverse::from_items(r, n, UniverseShape::Plaques, supports, items))
}

fn origin_idempotent(p: Patch) -> Element {
    let t = Tile { pos: Vec2::ZERO, label: p.label_at(Vec2::ZERO).expect("patch holds the origin") };
    Element::idempotent_unchecked(t, p)
}

/// A subset of a universe, as sorted item indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Filter {
    members: Vec<usize>,
}

impl Filter {
    pub fn from_members(mut members: Vec<usize>) -> Filter {
        members.sort_unstable();
        members.dedup();
        Filter { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// `ξ_T`: the items whose patch lies in the window.
pub fn xi_t(w: &Window, u: &IdempotentUniverse) -> Result<Filter, FilterError> {
    if w.radius() < u.radius() {
        return Err(FilterError::InsufficientWindow { radius: w.radius(), needed: u.radius() });
    }
    Ok(Filter { members: u.members_within(|p| w.label_at(p)) })
}

/// `ξ` of a partial tiling given as a patch around the origin.
pub fn xi_partial(t: &Patch, u: &IdempotentUniverse) -> Filter {
    Filter { members: u.members_within(|p| t.label_at(p)) }
}

/// Non-empty, free of zero, upward closed within `u`, and downward directed
/// as far as `u` can tell: two members need a common lower bound among the
/// members unless their product is non-zero and nothing in `u` lies below
/// both (the lower bound escapes the truncation).
pub fn is_filter(sg: &TilingSemigroup, f: &Filter, u: &IdempotentUniverse) -> bool {
    if f.is_empty() || f.members.iter().any(|&i| i >= u.len()) {
        return false;
    }
    for &x in &f.members {
        if !u.members_within(|p| u.patch(x).label_at(p)).iter().all(|&y| f.contains(y)) {
            return false;
        }
    }
    // largest patches first: the likeliest lower bounds
    let mut by_size = f.members.clone();
    by_size.sort_by_key(|&i| std::cmp::Reverse(u.patch(i).len()));
    for (k, &x) in f.members.iter().enumerate() {
        for &y in &f.members[k + 1..] {
            if u.leq(x, y) || u.leq(y, x) {
                continue;
            }
            let p = sg.multiply(u.item(x), u.item(y));
            if p.is_zero() {
                return false;
            }
            if let Some(j) = u.position(&p) {
                if f.contains(j) {
                    continue;
                }
                return false;
            }
            let joint = patch_of(&p);
            if joint.len() > u.max_tiles() {
                continue;
            }
            if by_size.iter().any(|&z| joint.is_subpatch_of(u.patch(z))) {
                continue;
            }
            if (0..u.len()).any(|z| joint.is_subpatch_of(u.patch(z))) {
                return false;
            }
        }
    }
    true
}

/// `{ j : items[m] ≤ items[j] }`.
pub fn principal_filter(m: usize, u: &IdempotentUniverse) -> Filter {
    Filter::from_members((0..u.len()).filter(|&j| u.leq(m, j)).collect())
}

/// Every filter of `u`, by exhaustive search over subsets.
///
/// Items are decided in order of patch size, so everything above an item is
/// decided before it. An item is excluded when something above it is out or
/// when it meets a chosen item in zero, and included when it is the product
/// of two chosen items. Surviving subsets are confirmed with [`is_filter`].
/// Fails with `BudgetExceeded` past `limit` search nodes.
pub fn enumerate_filters(sg: &TilingSemigroup, u: &IdempotentUniverse, limit: usize) -> Result<Vec<Filter>, FilterError> {
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by_key(|&i| (u.patch(i).len(), i));
    let above: Vec<Vec<usize>> =
        (0..u.len()).map(|x| (0..u.len()).filter(|&y| y != x && u.leq(x, y)).collect()).collect();
    let n = u.len();
    let mut product = vec![None; n * n];
    for x in 0..n {
        for y in 0..n {
            let p = sg.multiply(u.item(x), u.item(y));
            product[x * n + y] = if p.is_zero() { Some(usize::MAX) } else { u.position(&p) };
        }
    }
    let mut search = FilterSearch { sg, u, order, above, product, state: vec![None; n], nodes: 0, limit, found: Vec::new() };
    search.descend(0)?;
    let mut found = search.found;
    found.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(found)
}

struct FilterSearch<'a> {
    sg: &'a TilingSemigroup,
    u: &'a IdempotentUniverse,
    order: Vec<usize>,
    above: Vec<Vec<usize>>,
    /// `Some(usize::MAX)` for zero, `None` for an escape.
    product: Vec<Option<usize>>,
    state: Vec<Option<bool>>,
    nodes: usize,
    limit: usize,
    found: Vec<Filter>,
}

impl FilterSearch<'_> {
    fn descend(&mut self, k: usize) -> Result<(), FilterError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(SemigroupError::BudgetExceeded(self.limit).into());
        }
        let n = self.u.len();
        if k == self.order.len() {
            let f = Filter::from_members((0..n).filter(|&i| self.state[i] == Some(true)).collect());
            if is_filter(self.sg, &f, self.u) {
                self.found.push(f);
            }
            return Ok(());
        }
        let x = self.order[k];
        let chosen = |s: &Self, i: usize| s.state[i] == Some(true);
        let allowed = self.above[x].iter().all(|&y| chosen(self, y))
            && (0..n).all(|a| !chosen(self, a) || self.product[a * n + x] != Some(usize::MAX));
        let forced = (0..n).any(|a| {
            chosen(self, a) && (0..n).any(|b| chosen(self, b) && self.product[a * n + b] == Some(x))
        });
        if allowed {
            self.state[x] = Some(true);
            self.descend(k + 1)?;
        }
        if !forced {
            self.state[x] = Some(false);
            self.descend(k + 1)?;
        }
        self.state[x] = None;
        Ok(())
    }
}

/// Union of the member patches; the partial tiling a filter comes from.
pub fn reconstruct(f: &Filter, u: &IdempotentUniverse) -> Result<Patch, FilterError> {
    let mut members = f.members.iter();
    let first = members.next().ok_or(FilterError::IncompatibleMembers)?;
    let mut acc = u.patch(*first).clone();
    for &i in members {
        acc = acc.union(u.patch(i)).map_err(|_| FilterError::IncompatibleMembers)?;
    }
    Ok(acc)
}

/// Outcome of the truncated maximality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Maximality {
    NotAFilter,
    Maximal,
    NotMaximal,
    /// Every `e ∉ F` without a zero witness had a product with some member
    /// outside the universe; `escapes` counts those `e`.
    Indeterminate { escapes: usize },
}

/// Maximality of a filter: every `e ∉ F` must meet some member in zero.
/// An `e` whose products with members are all non-zero refutes maximality
/// when they all lie in the universe, and is an escape otherwise.
pub fn is_ultrafilter(sg: &TilingSemigroup, f: &Filter, u: &IdempotentUniverse) -> Maximality {
    if !is_filter(sg, f, u) {
        return Maximality::NotAFilter;
    }
    // largest patches first: the likeliest to clash
    let mut by_size = f.members.clone();
    by_size.sort_by_key(|&i| std::cmp::Reverse(u.patch(i).len()));
    let mut escapes = 0;
    for e in (0..u.len()).filter(|&e| !f.contains(e)) {
        let mut escaped = false;
        let mut witnessed = false;
        for &m in &by_size {
            let p = sg.multiply(u.item(e), u.item(m));
            if p.is_zero() {
                witnessed = true;
                break;
            }
            escaped |= u.position(&p).is_none();
        }
        match (witnessed, escaped) {
            (true, _) => {}
            (false, true) => escapes += 1,
            (false, false) => return Maximality::NotMaximal,
        }
    }
    if escapes == 0 {
        Maximality::Maximal
    } else {
        Maximality::Indeterminate { escapes }
    }
}

/// A `{0, 1}`-valued map on the items of a universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    values: Vec<bool>,
}

impl Character {
    pub fn new(values: Vec<bool>) -> Character {
        Character { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn value(&self, i: usize) -> bool {
        self.values[i]
    }

    pub fn to_partial(&self) -> PartialCharacter {
        PartialCharacter { values: self.values.iter().map(|&v| Some(v)).collect() }
    }

    pub fn dump(&self, u: &IdempotentUniverse, alphabet: &Alphabet) -> String {
        self.to_partial().dump(u, alphabet)
    }
}

/// A character table in which some entries could not be evaluated inside
/// the universe (`None`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialCharacter {
    values: Vec<Option<bool>>,
}

impl PartialCharacter {
    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn determinate(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Equal on every entry determinate in both.
    pub fn agrees_with(&self, c: &Character) -> bool {
        self.values.iter().zip(&c.values).all(|(a, &b)| a.is_none_or(|a| a == b))
    }

    /// `<hash> <0|1|?>` per item, in universe order.
    pub fn dump(&self, u: &IdempotentUniverse, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        for (e, v) in u.items().iter().zip(&self.values) {
            let v = match v {
                Some(true) => '1',
                Some(false) => '0',
                None => '?',
            };
            let _ = writeln!(out, "{} {v}", element_hash(e, alphabet));
        }
        out
    }
}

/// First 16 hex digits of the SHA-256 of the element's text form.
pub fn element_hash(e: &Element, alphabet: &Alphabet) -> String {
    let digest = Sha256::digest(e.to_text(alphabet).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn character_of(f: &Filter, u: &IdempotentUniverse) -> Character {
    let mut values = vec![false; u.len()];
    for &i in &f.members {
        values[i] = true;
    }
    Character { values }
}

pub fn filter_of(c: &Character) -> Filter {
    Filter { members: c.values.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i).collect() }
}

/// Multiplicativity on every pair whose product is zero or in the universe,
/// and not identically zero.
pub fn is_character(sg: &TilingSemigroup, c: &Character, u: &IdempotentUniverse) -> bool {
    c.values.iter().any(|&v| v) && is_partial_character(sg, &c.to_partial(), u)
}

/// [`is_character`] restricted to determinate entries.
pub fn is_partial_character(sg: &TilingSemigroup, c: &PartialCharacter, u: &IdempotentUniverse) -> bool {
    let v = &c.values;
    for e in 0..u.len() {
        let Some(ve) = v[e] else { continue };
        for f in 0..u.len() {
            let Some(vf) = v[f] else { continue };
            let p = sg.multiply(u.item(e), u.item(f));
            let vp = if p.is_zero() {
                Some(false)
            } else {
                u.position(&p).and_then(|k| v[k])
            };
            if vp.is_some_and(|vp| vp != (ve && vf)) {
                return false;
            }
        }
    }
    true
}

/// `Ψ(W) = φ_T`, the character of `ξ_T`.
pub fn psi(w: &Window, u: &IdempotentUniverse) -> Result<Character, FilterError> {
    Ok(character_of(&xi_t(w, u)?, u))
}

/// `θ_s(φ)(e) = φ(s* e s)`, with products taken in the whole semigroup.
/// Entries whose conjugate is non-zero and outside the universe are `None`.
pub fn theta_tight(
    sg: &TilingSemigroup,
    s: &Element,
    c: &Character,
    u: &IdempotentUniverse,
) -> Result<PartialCharacter, FilterError> {
    if s.is_zero() {
        return Err(SemigroupError::ZeroElement.into());
    }
    let s_star = sg.star(s);
    let source = sg.multiply(&s_star, s);
    let k = u.position(&source).ok_or_else(|| FilterError::NotInUniverse(source.to_string()))?;
    if !c.values[k] {
        return Err(FilterError::DomainViolation);
    }
    let values = u
        .items()
        .iter()
        .map(|e| {
            let left = sg.multiply(&s_star, e);
            if left.is_zero() {
                return Some(false);
            }
            let conj = sg.multiply(&left, s);
            if conj.is_zero() {
                return Some(false);
            }
            u.position(&conj).map(|j| c.values[j])
        })
        .collect();
    Ok(PartialCharacter { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::SubstitutionSystem;

    fn sg(name: &str) -> TilingSemigroup {
        TilingSemigroup::new(SubstitutionSystem::builtin(name).unwrap())
    }

    #[test]
    fn smallest_universe() {
        let s = sg("solid");
        let u = build_universe(&s, 0, 1).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u.shape(), UniverseShape::Connected);
    }

    #[test]
    fn items_are_idempotent_and_self_adjoint() {
        let s = sg("checkerboard");
        let u = build_universe(&s, 1, 3).unwrap();
        for e in u.items() {
            assert_eq!(&s.multiply(e, e), e);
            assert_eq!(&s.star(e), e);
        }
    }

    #[test]
    fn leq_matches_semigroup_order() {
        let s = sg("checkerboard");
        let u = build_universe(&s, 1, 3).unwrap();
        for i in 0..u.len() {
            for j in 0..u.len() {
                assert_eq!(u.leq(i, j), s.leq(u.item(i), u.item(j)).unwrap());
            }
        }
    }

    #[test]
    fn plaques_are_rectangles() {
        let s = sg("chair");
        let u = build_plaque_universe(&s, 1, 9).unwrap();
        for i in 0..u.len() {
            let b = u.patch(i).bbox();
            assert_eq!(b.width() * b.height(), u.patch(i).len());
            assert!(s.is_pattern(u.patch(i)));
        }
        // 9 rectangles containing the origin in B_1, one origin tile per label
        let singles = (0..u.len()).filter(|&i| u.patch(i).len() == 1).count();
        assert_eq!(singles, 4);
    }

    #[test]
    fn xi_needs_a_large_enough_window() {
        let s = sg("solid");
        let u = build_universe(&s, 2, 2).unwrap();
        let w = s.system().fixed_point_window(1).unwrap();
        assert_eq!(xi_t(&w, &u), Err(FilterError::InsufficientWindow { radius: 1, needed: 2 }));
    }

    #[test]
    fn xi_matches_a_containment_scan() {
        let s = sg("chair");
        let w = s.system().fixed_point_window(16).unwrap();
        for u in [build_universe(&s, 2, 3).unwrap(), build_plaque_universe(&s, 3, 9).unwrap()] {
            let scan: Vec<usize> = (0..u.len()).filter(|&i| w.contains_patch(u.patch(i))).collect();
            let f = xi_t(&w, &u).unwrap();
            assert_eq!(f.members(), &scan[..]);
            assert!(f.contains(u.position(&s.unit_idempotent(w.origin_tile().label)).unwrap()));
        }
    }

    #[test]
    fn solid_window_contains_everything() {
        let s = sg("solid");
        let u = build_universe(&s, 1, 4).unwrap();
        let w = s.system().fixed_point_window(3).unwrap();
        let f = xi_t(&w, &u).unwrap();
        assert_eq!(f.len(), u.len());
        assert!(is_filter(&s, &f, &u));
        assert_eq!(is_ultrafilter(&s, &f, &u), Maximality::Maximal);
    }

    #[test]
    fn empty_set_is_not_a_filter() {
        let s = sg("solid");
        let u = build_universe(&s, 1, 2).unwrap();
        assert!(!is_filter(&s, &Filter::default(), &u));
    }

    #[test]
    fn incompatible_plaques_do_not_form_a_filter() {
        let s = sg("chair");
        let u = build_plaque_universe(&s, 2, 25).unwrap();
        let origin = |i: usize| u.patch(i).label_at(Vec2::ZERO);
        let full: Vec<usize> = (0..u.len()).filter(|&i| u.patch(i).len() == 25).collect();
        let a = full[0];
        let b = *full[1..].iter().find(|&&j| origin(j) == origin(a)).unwrap();
        let mut members = principal_filter(a, &u).members().to_vec();
        members.extend_from_slice(principal_filter(b, &u).members());
        let f = Filter::from_members(members);
        assert!(!is_filter(&s, &f, &u));
        assert!(is_filter(&s, &principal_filter(a, &u), &u));
    }

    #[test]
    fn character_round_trip_and_dump() {
        let s = sg("checkerboard");
        let u = build_universe(&s, 1, 3).unwrap();
        let w = s.system().fixed_point_window(2).unwrap();
        let c = psi(&w, &u).unwrap();
        assert!(is_character(&s, &c, &u));
        assert_eq!(character_of(&filter_of(&c), &u), c);
        let dump = c.dump(&u, s.alphabet());
        assert_eq!(dump.lines().count(), u.len());
        assert!(dump.lines().all(|l| l.len() == 18 && (l.ends_with(" 0") || l.ends_with(" 1"))));
    }

    #[test]
    fn constant_one_is_not_a_character_when_zero_products_exist() {
        let s = sg("checkerboard");
        let u = build_universe(&s, 1, 2).unwrap();
        assert!(!is_character(&s, &Character::new(vec![true; u.len()]), &u));
    }

    #[test]
    fn theta_by_satisfied_idempotent_is_identity() {
        let s = sg("checkerboard");
        let u = build_universe(&s, 1, 3).unwrap();
        let w = s.system().fixed_point_window(3).unwrap();
        let c = psi(&w, &u).unwrap();
        for (i, e) in u.items().iter().enumerate() {
            if c.value(i) {
                assert!(theta_tight(&s, e, &c, &u).unwrap().agrees_with(&c));
            } else {
                assert_eq!(theta_tight(&s, e, &c, &u), Err(FilterError::DomainViolation));
            }
        }
    }
}
