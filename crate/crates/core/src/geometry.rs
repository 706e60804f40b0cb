//! Exact integer geometry of labeled unit cells.
//!
//! A [`Tile`] is a labeled unit square whose puncture is its lattice anchor,
//! a [`Patch`] is a finite set of tiles with pairwise distinct cells, and a
//! [`Window`] is the dense truncation `T(B_R(0))` of a punctured tiling.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_rational::Ratio;
use smallvec::{smallvec, SmallVec};
use thiserror::Error;

/// Errors raised by patch construction and the patch text format.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("a patch must contain at least one tile")]
    EmptyPatch,
    #[error("cell ({x}, {y}) carries two different labels")]
    CellClash { x: i32, y: i32 },
    #[error("patches disagree on the shared cell ({x}, {y})")]
    IncompatibleOverlap { x: i32, y: i32 },
    #[error("window of radius {radius} is missing cell ({x}, {y})")]
    IncompleteWindow { radius: u32, x: i32, y: i32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A lattice vector. Ordered by `(y, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Vec2 {
    pub x: i32,
    pub y: i32,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Vec2 { x, y }
    }

    /// Chebyshev norm `max(|x|, |y|)`.
    pub fn cheb(self) -> u32 {
        self.x.unsigned_abs().max(self.y.unsigned_abs())
    }

    pub fn is_zero(self) -> bool {
        self == Vec2::ZERO
    }

    /// The four edge neighbours, in a fixed order.
    pub fn neighbours(self) -> [Vec2; 4] {
        [
            Vec2::new(self.x + 1, self.y),
            Vec2::new(self.x - 1, self.y),
            Vec2::new(self.x, self.y + 1),
            Vec2::new(self.x, self.y - 1),
        ]
    }
}

impl Ord for Vec2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Vec2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Prototile identifier. The printable name lives in an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub u8);

impl Label {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Printable names of the labels of one system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Self {
        Alphabet { names }
    }

    /// Labels named `0`, `1`, ... `n-1`.
    pub fn numeric(n: usize) -> Self {
        Alphabet { names: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, label: Label) -> &str {
        &self.names[label.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Label> {
        self.names.iter().position(|n| n == name).map(|i| Label(i as u8))
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.names.len()).map(|i| Label(i as u8))
    }
}

/// A labeled unit cell; its puncture is `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    pub pos: Vec2,
    pub label: Label,
}

impl Tile {
    pub const fn new(label: Label, x: i32, y: i32) -> Self {
        Tile { pos: Vec2::new(x, y), label }
    }

    pub fn translate(self, v: Vec2) -> Tile {
        Tile { pos: self.pos + v, label: self.label }
    }
}

impl Ord for Tile {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pos.cmp(&other.pos).then(self.label.cmp(&other.label))
    }
}

impl PartialOrd for Tile {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Inclusive bounding box of a set of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundingBox {
    pub min: Vec2,
    pub max: Vec2,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        (self.max.x - self.min.x + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.max.y - self.min.y + 1) as usize
    }

    /// Side of the smallest square containing the box, in cells.
    pub fn extent(&self) -> usize {
        self.width().max(self.height())
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// A finite non-empty set of tiles, no two on the same cell.
///
/// Tiles are kept sorted by `(y, x)`, so two patches are equal iff they
/// hold the same tiles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Patch {
    tiles: SmallVec<[Tile; 12]>,
    bbox: BoundingBox,
}

impl Patch {
    fn wrap(tiles: SmallVec<[Tile; 12]>) -> Patch {
        // sorted by y first, so only x needs a scan
        let mut min = tiles[0].pos;
        let mut max = tiles[tiles.len() - 1].pos;
        for t in &tiles {
            min.x = min.x.min(t.pos.x);
            max.x = max.x.max(t.pos.x);
        }
        Patch { tiles, bbox: BoundingBox { min, max } }
    }

    pub fn new<I: IntoIterator<Item = Tile>>(tiles: I) -> Result<Patch, GeometryError> {
        let mut tiles: Vec<Tile> = tiles.into_iter().collect();
        if tiles.is_empty() {
            return Err(GeometryError::EmptyPatch);
        }
        tiles.sort_unstable();
        tiles.dedup();
        for pair in tiles.windows(2) {
            if pair[0].pos == pair[1].pos {
                return Err(GeometryError::CellClash { x: pair[0].pos.x, y: pair[0].pos.y });
            }
        }
        Ok(Patch::wrap(tiles.into()))
    }

    /// Builds a patch from tiles already sorted by cell with no repeated cell.
    pub(crate) fn from_sorted(tiles: Vec<Tile>) -> Patch {
        debug_assert!(!tiles.is_empty());
        debug_assert!(tiles.windows(2).all(|w| w[0].pos < w[1].pos));
        Patch::wrap(tiles.into())
    }

    pub fn single(tile: Tile) -> Patch {
        Patch::wrap(smallvec![tile])
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.tiles.iter().map(|t| t.pos)
    }

    pub fn label_at(&self, pos: Vec2) -> Option<Label> {
        self.tiles
            .binary_search_by(|t| t.pos.cmp(&pos))
            .ok()
            .map(|i| self.tiles[i].label)
    }

    pub fn contains(&self, tile: &Tile) -> bool {
        self.label_at(tile.pos) == Some(tile.label)
    }

    pub fn translate(&self, v: Vec2) -> Patch {
        Patch {
            tiles: self.tiles.iter().map(|t| t.translate(v)).collect(),
            bbox: BoundingBox { min: self.bbox.min + v, max: self.bbox.max + v },
        }
    }

    /// True iff the labels agree on every cell covered by both patches.
    pub fn compatible(&self, other: &Patch) -> bool {
        self.first_clash(other, Vec2::ZERO).is_none()
    }

    /// First shared cell on which `self + shift` and `other` disagree.
    fn first_clash(&self, other: &Patch, shift: Vec2) -> Option<Vec2> {
        let (a, b) = (&self.tiles, &other.tiles);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let pa = a[i].pos + shift;
            match pa.cmp(&b[j].pos) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    if a[i].label != b[j].label {
                        return Some(pa);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        None
    }

    pub fn union(&self, other: &Patch) -> Result<Patch, GeometryError> {
        self.shifted_union(Vec2::ZERO, other)
    }

    /// `(self + shift) ∪ other`, failing on a label clash.
    pub fn shifted_union(&self, shift: Vec2, other: &Patch) -> Result<Patch, GeometryError> {
        if let Some(p) = self.first_clash(other, shift) {
            return Err(GeometryError::IncompatibleOverlap { x: p.x, y: p.y });
        }
        Ok(self.merge_shifted(shift, other))
    }

    /// `(self + shift) ∪ other` for patches already known to be compatible.
    pub(crate) fn merge_shifted(&self, shift: Vec2, other: &Patch) -> Patch {
        let (a, b) = (&self.tiles, &other.tiles);
        let mut out = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let ta = a[i].translate(shift);
            match ta.pos.cmp(&b[j].pos) {
                Ordering::Less => {
                    out.push(ta);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(ta);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().map(|t| t.translate(shift)));
        out.extend_from_slice(&b[j..]);
        Patch::wrap(out)
    }

    /// True iff every tile of `self` is a tile of `other`.
    pub fn is_subpatch_of(&self, other: &Patch) -> bool {
        self.is_shifted_subpatch_of(Vec2::ZERO, other)
    }

    /// True iff `self + shift ⊆ other`.
    pub fn is_shifted_subpatch_of(&self, shift: Vec2, other: &Patch) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let b = &other.tiles;
        let mut j = 0;
        for t in &self.tiles {
            let p = t.pos + shift;
            while j < b.len() && b[j].pos < p {
                j += 1;
            }
            if j == b.len() || b[j].pos != p || b[j].label != t.label {
                return false;
            }
            j += 1;
        }
        true
    }

    /// Edge-connectivity of the support; equals connectedness of the
    /// interior for unions of closed unit squares.
    pub fn connected_interior(&self) -> bool {
        let n = self.tiles.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(i) = queue.pop_front() {
            for q in self.tiles[i].pos.neighbours() {
                if let Ok(k) = self.tiles.binary_search_by(|t| t.pos.cmp(&q)) {
                    if !seen[k] {
                        seen[k] = true;
                        reached += 1;
                        queue.push_back(k);
                    }
                }
            }
        }
        reached == n
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    /// Largest Chebyshev norm of a cell.
    pub fn radius(&self) -> u32 {
        self.tiles.iter().map(|t| t.pos.cheb()).max().unwrap_or(0)
    }

    /// Translate so the least cell in `(y, x)` order sits at the origin.
    pub fn normalized(&self) -> Patch {
        self.translate(-self.tiles[0].pos)
    }

    /// The tiles whose cells lie in `B_r(0)`; `None` if there are none.
    pub fn restrict(&self, r: u32) -> Option<Patch> {
        let tiles: Vec<Tile> = self.tiles.iter().copied().filter(|t| t.pos.cheb() <= r).collect();
        (!tiles.is_empty()).then(|| Patch::wrap(tiles.into()))
    }

    /// Canonical text form: one `label x y` line per tile, sorted by `(y, x, label)`.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        for t in &self.tiles {
            out.push_str(&format!("{} {} {}\n", alphabet.name(t.label), t.pos.x, t.pos.y));
        }
        out
    }

    /// Parses the `label x y` format. Line order is irrelevant; blank lines
    /// and `#` comments are skipped.
    pub fn from_text(text: &str, alphabet: &Alphabet) -> Result<Patch, GeometryError> {
        let mut tiles = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            tiles.push(parse_tile(line, alphabet).map_err(|message| GeometryError::Parse {
                line: i + 1,
                message,
            })?);
        }
        Patch::new(tiles)
    }
}

pub(crate) fn parse_tile(text: &str, alphabet: &Alphabet) -> Result<Tile, String> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let [name, x, y] = fields[..] else {
        return Err(format!("expected `label x y`, got `{text}`"));
    };
    let label = alphabet.lookup(name).ok_or_else(|| format!("unknown label `{name}`"))?;
    let x = x.parse::<i32>().map_err(|e| format!("bad x `{x}`: {e}"))?;
    let y = y.parse::<i32>().map_err(|e| format!("bad y `{y}`: {e}"))?;
    Ok(Tile::new(label, x, y))
}

/// All `v` with `pattern + v ⊆ within`, sorted by `(y, x)`.
pub fn find_occurrences(pattern: &Patch, within: &Patch) -> Vec<Vec2> {
    let anchor = pattern.tiles[0];
    within
        .tiles
        .iter()
        .filter(|t| t.label == anchor.label)
        .map(|t| t.pos - anchor.pos)
        .filter(|&v| pattern.is_shifted_subpatch_of(v, within))
        .collect()
}

/// Dense truncation `T(B_R(0))` of a punctured tiling.
///
/// Holds exactly the cells of the Chebyshev ball of radius `R`; everything
/// outside is unknown.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Window {
    radius: u32,
    cells: Vec<Label>,
}

impl Window {
    /// Builds a window from a patch covering `B_R(0)`; tiles outside are dropped.
    pub fn from_patch(patch: &Patch, radius: u32) -> Result<Window, GeometryError> {
        let r = radius as i32;
        let side = 2 * radius as usize + 1;
        let mut cells = Vec::with_capacity(side * side);
        for y in -r..=r {
            for x in -r..=r {
                match patch.label_at(Vec2::new(x, y)) {
                    Some(l) => cells.push(l),
                    None => return Err(GeometryError::IncompleteWindow { radius, x, y }),
                }
            }
        }
        Ok(Window { radius, cells })
    }

    /// Builds a window by sampling `f` on every cell of `B_R(0)`.
    pub fn from_fn(radius: u32, mut f: impl FnMut(Vec2) -> Label) -> Window {
        let r = radius as i32;
        let mut cells = Vec::with_capacity((2 * radius as usize + 1).pow(2));
        for y in -r..=r {
            for x in -r..=r {
                cells.push(f(Vec2::new(x, y)));
            }
        }
        Window { radius, cells }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }

    pub fn label_at(&self, p: Vec2) -> Option<Label> {
        if p.cheb() > self.radius {
            return None;
        }
        let r = self.radius as i32;
        Some(self.cells[(p.y + r) as usize * self.side() + (p.x + r) as usize])
    }

    /// The tile at the origin, `T(0)`.
    pub fn origin_tile(&self) -> Tile {
        Tile { pos: Vec2::ZERO, label: self.label_at(Vec2::ZERO).expect("origin cell") }
    }

    pub fn tile_at(&self, p: Vec2) -> Option<Tile> {
        self.label_at(p).map(|label| Tile { pos: p, label })
    }

    pub fn patch(&self) -> Patch {
        let r = self.radius as i32;
        let mut tiles = Vec::with_capacity(self.cells.len());
        let mut k = 0;
        for y in -r..=r {
            for x in -r..=r {
                tiles.push(Tile::new(self.cells[k], x, y));
                k += 1;
            }
        }
        Patch::wrap(tiles.into())
    }

    /// Restriction to `B_r(0)`, `r ≤ R`.
    pub fn restrict(&self, r: u32) -> Window {
        assert!(r <= self.radius, "cannot restrict radius {} window to {}", self.radius, r);
        Window::from_fn(r, |p| self.label_at(p).unwrap())
    }

    /// `W - v`, truthful on `B_{R - |v|}`. `None` if `|v| > R`.
    pub fn shifted(&self, v: Vec2) -> Option<Window> {
        let r = self.radius.checked_sub(v.cheb())?;
        Some(Window::from_fn(r, |p| self.label_at(p + v).unwrap()))
    }

    /// True iff every tile of `patch + shift` lies in the window. Cells outside
    /// `B_R` count as absent.
    pub fn contains_shifted(&self, patch: &Patch, shift: Vec2) -> bool {
        patch.tiles().iter().all(|t| self.label_at(t.pos + shift) == Some(t.label))
    }

    pub fn contains_patch(&self, patch: &Patch) -> bool {
        self.contains_shifted(patch, Vec2::ZERO)
    }

    /// True iff the two windows coincide on `B_r(0)` (requires `r` within both radii).
    pub fn agrees_within(&self, other: &Window, r: u32) -> bool {
        if r > self.radius || r > other.radius {
            return false;
        }
        fn row(w: &Window, y: i32, r: u32) -> &[Label] {
            let start = (y + w.radius as i32) as usize * w.side() + (w.radius - r) as usize;
            &w.cells[start..start + 2 * r as usize + 1]
        }
        let ri = r as i32;
        (-ri..=ri).all(|y| row(self, y, r) == row(other, y, r))
    }

    /// Agreement on the common truthful ball `B_{min(R1, R2)}`.
    pub fn same_point(&self, other: &Window) -> bool {
        if self.radius == other.radius {
            return self == other;
        }
        self.agrees_within(other, self.radius.min(other.radius))
    }

    /// Largest `r ≤ min(R1, R2)` with agreement on `B_r`, or `None` if the
    /// origin cells already differ.
    pub fn agreement_radius(&self, other: &Window) -> Option<u32> {
        let limit = self.radius.min(other.radius);
        let mut best = None;
        for r in 0..=limit {
            // only the ring at Chebyshev distance r is new
            let ri = r as i32;
            let ring_ok = (-ri..=ri).all(|t| {
                [Vec2::new(t, ri), Vec2::new(t, -ri), Vec2::new(ri, t), Vec2::new(-ri, t)]
                    .iter()
                    .all(|&p| self.label_at(p) == other.label_at(p))
            });
            if !ring_ok {
                break;
            }
            best = Some(r);
        }
        best
    }
}

/// Lattice form of the tiling metric with micro-translations fixed to zero.
///
/// Returns `1` on an origin mismatch, otherwise `min(1, 1/ρ)` where `ρ` is
/// the agreement radius capped at the smaller truncation radius.
pub fn window_distance(a: &Window, b: &Window) -> Ratio<u32> {
    match a.agreement_radius(b) {
        None | Some(0) => Ratio::from_integer(1),
        Some(rho) => Ratio::new(1, rho),
    }
}
