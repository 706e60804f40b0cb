//! Block substitutions: supertiles, fixed-point windows, admissibility,
//! atlases and the finite-window checks of finite local complexity,
//! repetitivity and aperiodicity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::{Alphabet, Label, Patch, Tile, Vec2, Window};

/// Default cap on the number of cells of any generated grid.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 24;

/// Patches whose extent is at most this many cells go through the
/// rectangle index; larger ones are searched directly.
const INDEXED_EXTENT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("malformed rule: {0}")]
    MalformedRule(String),
    #[error("substitution matrix is not primitive")]
    NotPrimitive,
    #[error("supertile of depth {depth} needs {cells} cells, budget is {budget}")]
    DepthTooLarge { depth: u32, cells: usize, budget: usize },
    #[error("no self-reproducing 2x2 seed with period at most 4")]
    NoSeed,
    #[error("atlas of radius {radius} did not saturate within the cell budget")]
    NoSaturation { radius: u32 },
    #[error("unknown builtin system `{0}`")]
    UnknownBuiltin(String),
    #[error("{0}")]
    InsufficientWindow(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    labels: Vec<String>,
    factor: usize,
    rule: BTreeMap<String, Vec<Vec<String>>>,
}

const BUILTINS: [(&str, &str); 3] = [
    ("solid", include_str!("../systems/solid.toml")),
    ("checkerboard", include_str!("../systems/checkerboard.toml")),
    ("chair", include_str!("../systems/chair.toml")),
];

/// Names of the shipped systems.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

/// Config text of a shipped system.
pub fn builtin_config(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

/// Square grid of labels covering `[origin, origin + side)²`, stored by rows
/// from the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub origin: Vec2,
    pub side: usize,
    pub cells: Vec<Label>,
}

impl Grid {
    pub fn get(&self, p: Vec2) -> Option<Label> {
        let (x, y) = (p.x - self.origin.x, p.y - self.origin.y);
        if x < 0 || y < 0 || x as usize >= self.side || y as usize >= self.side {
            return None;
        }
        Some(self.cells[y as usize * self.side + x as usize])
    }

    fn at(&self, x: usize, y: usize) -> Label {
        self.cells[y * self.side + x]
    }

    pub fn to_patch(&self) -> Patch {
        let mut tiles = Vec::with_capacity(self.cells.len());
        for y in 0..self.side {
            for x in 0..self.side {
                tiles.push(Tile::new(
                    self.at(x, y),
                    self.origin.x + x as i32,
                    self.origin.y + y as i32,
                ));
            }
        }
        Patch::from_sorted(tiles)
    }

    /// The `w × h` block with lower-left cell `(x, y)` in local coordinates.
    fn block(&self, x: usize, y: usize, w: usize, h: usize) -> Vec<Label> {
        let mut out = Vec::with_capacity(w * h);
        for j in 0..h {
            out.extend_from_slice(&self.cells[(y + j) * self.side + x..(y + j) * self.side + x + w]);
        }
        out
    }
}

/// Self-reproducing 2×2 block around the origin corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed {
    /// Labels of the cells `(-1,-1)`, `(0,-1)`, `(-1,0)`, `(0,0)`.
    pub quad: [Label; 4],
    /// Number of substitution steps after which the quad reappears.
    pub period: u32,
}

/// Distinct `w × h` label blocks with per-cell label bitsets for fast
/// containment queries.
struct RectIndex {
    w: usize,
    words: usize,
    // bits[(cell * labels + label) * words ..]
    bits: Vec<u64>,
    count: usize,
}

impl RectIndex {
    fn build(blocks: &BTreeSet<Vec<Label>>, w: usize, h: usize, labels: usize) -> RectIndex {
        let count = blocks.len();
        // padded to a power of two so small indexes get fixed-width loops
        let mut words = count.div_ceil(64).max(1);
        if words <= 8 {
            words = words.next_power_of_two();
        }
        let mut bits = vec![0u64; w * h * labels * words];
        for (k, block) in blocks.iter().enumerate() {
            for (cell, l) in block.iter().enumerate() {
                bits[(cell * labels + l.index()) * words + k / 64] |= 1 << (k % 64);
            }
        }
        RectIndex { w, words, bits, count }
    }

    /// True iff some block agrees with the patch (given relative to the
    /// block's lower-left cell).
    /// Tiles may repeat; two labels on one cell never match.
    fn matches(&self, tiles: impl Iterator<Item = Tile>, offset: Vec2, labels: usize) -> bool {
        if self.count == 0 {
            return false;
        }
        let w = self.w;
        let bases = tiles.map(|t| {
            let p = t.pos - offset;
            (p.y as usize * w + p.x as usize) * labels + t.label.index()
        });
        match self.words {
            1 => self.and_rows::<1>(bases),
            2 => self.and_rows::<2>(bases),
            4 => self.and_rows::<4>(bases),
            8 => self.and_rows::<8>(bases),
            words => {
                let bases: Vec<usize> = bases.collect();
                (0..words).any(|k| {
                    let mut acc = u64::MAX;
                    for &base in &bases {
                        acc &= self.bits[base * words + k];
                        if acc == 0 {
                            return false;
                        }
                    }
                    true
                })
            }
        }
    }

    fn and_rows<const W: usize>(&self, bases: impl Iterator<Item = usize>) -> bool {
        let mut acc = [u64::MAX; W];
        for base in bases {
            let row: &[u64; W] = self.bits[base * W..(base + 1) * W].try_into().expect("row width");
            let mut any = 0;
            for i in 0..W {
                acc[i] &= row[i];
                any |= acc[i];
            }
            if any == 0 {
                return false;
            }
        }
        true
    }
}

/// A primitive block substitution on labeled unit cells.
pub struct SubstitutionSystem {
    name: String,
    alphabet: Alphabet,
    factor: usize,
    // rule[a][y * factor + x], y = 0 the bottom row
    rule: Vec<Vec<Label>>,
    primitivity_exponent: u32,
    two_by_two_depth: u32,
    cell_budget: usize,
    grids: RwLock<HashMap<(Label, u32), Arc<Grid>>>,
    indexes: RwLock<HashMap<(usize, usize, u32), Arc<RectIndex>>>,
    // indexes at the default depth, slot (h - 1) * INDEXED_EXTENT + (w - 1)
    default_indexes: Vec<OnceLock<Option<Arc<RectIndex>>>>,
}

fn default_index_slots() -> Vec<OnceLock<Option<Arc<RectIndex>>>> {
    (0..INDEXED_EXTENT * INDEXED_EXTENT).map(|_| OnceLock::new()).collect()
}

impl fmt::Debug for SubstitutionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubstitutionSystem")
            .field("name", &self.name)
            .field("labels", &self.alphabet)
            .field("factor", &self.factor)
            .finish()
    }
}

impl Clone for SubstitutionSystem {
    fn clone(&self) -> Self {
        SubstitutionSystem {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            factor: self.factor,
            rule: self.rule.clone(),
            primitivity_exponent: self.primitivity_exponent,
            two_by_two_depth: self.two_by_two_depth,
            cell_budget: self.cell_budget,
            grids: RwLock::default(),
            indexes: RwLock::default(),
            default_indexes: default_index_slots(),
        }
    }
}

impl SubstitutionSystem {
    /// Parses and validates a TOML config.
    pub fn load(config: &str) -> Result<SubstitutionSystem, SystemError> {
        let raw: RawConfig = toml::from_str(config).map_err(|e| SystemError::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn builtin(name: &str) -> Result<SubstitutionSystem, SystemError> {
        let config = builtin_config(name).ok_or_else(|| SystemError::UnknownBuiltin(name.to_string()))?;
        Self::load(config)
    }

    fn from_raw(raw: RawConfig) -> Result<SubstitutionSystem, SystemError> {
        let n = raw.labels.len();
        if n == 0 || n > 255 {
            return Err(SystemError::MalformedRule(format!("need 1..=255 labels, got {n}")));
        }
        let unique: BTreeSet<&String> = raw.labels.iter().collect();
        if unique.len() != n {
            return Err(SystemError::MalformedRule("duplicate label".into()));
        }
        if raw.factor < 2 {
            return Err(SystemError::MalformedRule(format!("factor must be at least 2, got {}", raw.factor)));
        }
        let alphabet = Alphabet::new(raw.labels.clone());
        if let Some(extra) = raw.rule.keys().find(|k| alphabet.lookup(k).is_none()) {
            return Err(SystemError::MalformedRule(format!("rule for unknown label `{extra}`")));
        }
        let lam = raw.factor;
        let mut rule = Vec::with_capacity(n);
        for name in &raw.labels {
            let rows = raw
                .rule
                .get(name)
                .ok_or_else(|| SystemError::MalformedRule(format!("no rule for label `{name}`")))?;
            if rows.len() != lam || rows.iter().any(|r| r.len() != lam) {
                return Err(SystemError::MalformedRule(format!(
                    "rule for `{name}` must be a {lam}x{lam} block"
                )));
            }
            let mut block = vec![Label(0); lam * lam];
            for (row, entries) in rows.iter().enumerate() {
                let y = lam - 1 - row;
                for (x, entry) in entries.iter().enumerate() {
                    block[y * lam + x] = alphabet.lookup(entry).ok_or_else(|| {
                        SystemError::MalformedRule(format!("rule for `{name}` uses unknown label `{entry}`"))
                    })?;
                }
            }
            rule.push(block);
        }
        let matrix = substitution_matrix(&rule, n);
        let primitivity_exponent = primitivity_exponent(&matrix).ok_or(SystemError::NotPrimitive)?;
        let mut system = SubstitutionSystem {
            name: raw.name,
            alphabet,
            factor: lam,
            rule,
            primitivity_exponent,
            two_by_two_depth: 0,
            cell_budget: DEFAULT_CELL_BUDGET,
            grids: RwLock::default(),
            indexes: RwLock::default(),
            default_indexes: default_index_slots(),
        };
        system.two_by_two_depth = system.saturated_blocks(2, 2)?.1;
        Ok(system)
    }

    pub fn with_cell_budget(mut self, budget: usize) -> Self {
        self.cell_budget = budget;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        self.alphabet.labels()
    }

    pub fn cell_budget(&self) -> usize {
        self.cell_budget
    }

    /// `M[a][b]` = number of `b` cells in the image of `a`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        substitution_matrix(&self.rule, self.alphabet.len())
    }

    /// Least `k` with `M^k` entrywise positive.
    pub fn primitivity_exponent(&self) -> u32 {
        self.primitivity_exponent
    }

    /// Image of `label` under one substitution step, indexed `[y * λ + x]`.
    pub fn image(&self, label: Label) -> &[Label] {
        &self.rule[label.index()]
    }

    /// Depth beyond the covering depth at which admissibility is decided.
    ///
    /// Every legal 2×2 block occurs in a supertile of depth
    /// `two_by_two_depth`, and a patch of extent `≤ λ^m` sits inside the
    /// image of such a block under `m` steps.
    pub fn admissibility_margin(&self) -> u32 {
        self.two_by_two_depth.max(2)
    }

    fn check_budget(&self, depth: u32, side: usize) -> Result<(), SystemError> {
        let cells = side.saturating_mul(side);
        if cells > self.cell_budget {
            return Err(SystemError::DepthTooLarge { depth, cells, budget: self.cell_budget });
        }
        Ok(())
    }

    fn side_at(&self, depth: u32) -> Option<usize> {
        self.factor.checked_pow(depth)
    }

    /// One substitution step applied to a grid.
    fn substitute(&self, grid: &Grid) -> Grid {
        let lam = self.factor;
        let side = grid.side * lam;
        let mut cells = vec![Label(0); side * side];
        for y in 0..grid.side {
            for x in 0..grid.side {
                let image = &self.rule[grid.at(x, y).index()];
                for j in 0..lam {
                    let row = (y * lam + j) * side + x * lam;
                    cells[row..row + lam].copy_from_slice(&image[j * lam..(j + 1) * lam]);
                }
            }
        }
        let origin = Vec2::new(grid.origin.x * lam as i32, grid.origin.y * lam as i32);
        Grid { origin, side, cells }
    }

    /// `λ^k × λ^k` supertile of `label` with its lower-left cell at the origin.
    pub fn supertile_grid(&self, label: Label, depth: u32) -> Result<Arc<Grid>, SystemError> {
        if let Some(g) = self.grids.read().unwrap().get(&(label, depth)) {
            return Ok(g.clone());
        }
        let side = self.side_at(depth).ok_or(SystemError::DepthTooLarge {
            depth,
            cells: usize::MAX,
            budget: self.cell_budget,
        })?;
        self.check_budget(depth, side)?;
        let grid = if depth == 0 {
            Grid { origin: Vec2::ZERO, side: 1, cells: vec![label] }
        } else {
            let below = self.supertile_grid(label, depth - 1)?;
            self.substitute(&below)
        };
        let grid = Arc::new(grid);
        self.grids.write().unwrap().insert((label, depth), grid.clone());
        Ok(grid)
    }

    pub fn supertile(&self, label: Label, depth: u32) -> Result<Patch, SystemError> {
        Ok(self.supertile_grid(label, depth)?.to_patch())
    }

    /// Distinct `w × h` blocks occurring in the supertiles of depth `depth`.
    pub fn blocks_at_depth(&self, w: usize, h: usize, depth: u32) -> Result<BTreeSet<Vec<Label>>, SystemError> {
        let mut out = BTreeSet::new();
        for a in self.labels() {
            let g = self.supertile_grid(a, depth)?;
            if g.side < w || g.side < h {
                continue;
            }
            for y in 0..=g.side - h {
                for x in 0..=g.side - w {
                    out.insert(g.block(x, y, w, h));
                }
            }
        }
        Ok(out)
    }

    /// Blocks of size `w × h` at the first depth where two consecutive depths
    /// agree, together with that depth.
    pub fn saturated_blocks(&self, w: usize, h: usize) -> Result<(BTreeSet<Vec<Label>>, u32), SystemError> {
        let mut depth = self.covering_depth(w.max(h));
        let mut prev = self.blocks_at_depth(w, h, depth)?;
        loop {
            let next = self.blocks_at_depth(w, h, depth + 1).map_err(|e| match e {
                SystemError::DepthTooLarge { .. } => SystemError::NoSaturation { radius: (w.max(h) / 2) as u32 },
                other => other,
            })?;
            if next == prev {
                return Ok((prev, depth));
            }
            prev = next;
            depth += 1;
        }
    }

    /// Least `m` with `λ^m ≥ extent`.
    pub fn covering_depth(&self, extent: usize) -> u32 {
        let mut m = 0;
        let mut side = 1usize;
        while side < extent {
            side *= self.factor;
            m += 1;
        }
        m
    }

    /// Depth of the supertiles scanned when deciding admissibility of a
    /// patch with the given extent.
    pub fn admissibility_depth(&self, extent: usize) -> u32 {
        self.covering_depth(extent) + self.admissibility_margin()
    }

    /// True iff the patch occurs up to translation in some supertile.
    pub fn is_admissible(&self, patch: &Patch) -> bool {
        let bb = patch.bbox();
        match self.default_index(bb.width(), bb.height()) {
            Some(index) => index.matches(patch.tiles().iter().copied(), bb.min, self.alphabet.len()),
            None => self.is_admissible_at_depth(patch, self.admissibility_depth(bb.extent())),
        }
    }

    /// Same as `is_admissible` on `(a + shift) ∪ b`, false when the two
    /// disagree on a shared cell. Small unions are never materialized.
    pub fn is_admissible_union(&self, a: &Patch, shift: Vec2, b: &Patch) -> bool {
        let (ba, bb) = (a.bbox(), b.bbox());
        let min = Vec2::new((ba.min.x + shift.x).min(bb.min.x), (ba.min.y + shift.y).min(bb.min.y));
        let max = Vec2::new((ba.max.x + shift.x).max(bb.max.x), (ba.max.y + shift.y).max(bb.max.y));
        let (w, h) = ((max.x - min.x + 1) as usize, (max.y - min.y + 1) as usize);
        match self.default_index(w, h) {
            Some(index) => {
                let tiles = a.tiles().iter().map(|t| t.translate(shift)).chain(b.tiles().iter().copied());
                index.matches(tiles, min, self.alphabet.len())
            }
            None => a.shifted_union(shift, b).is_ok_and(|u| self.is_admissible(&u)),
        }
    }

    /// Index for `w × h` blocks at the default depth; `None` when the
    /// extent is too large to index.
    fn default_index(&self, w: usize, h: usize) -> Option<&RectIndex> {
        if w.max(h) > INDEXED_EXTENT {
            return None;
        }
        let slot = &self.default_indexes[(h - 1) * INDEXED_EXTENT + (w - 1)];
        slot.get_or_init(|| self.rect_index(w, h, self.admissibility_depth(w.max(h))).ok()).as_deref()
    }

    /// Occurrence test against the supertiles of exactly this depth.
    pub fn is_admissible_at_depth(&self, patch: &Patch, depth: u32) -> bool {
        let bb = patch.bbox();
        let (w, h) = (bb.width(), bb.height());
        if w.max(h) <= INDEXED_EXTENT {
            match self.rect_index(w, h, depth) {
                Ok(index) => index.matches(patch.tiles().iter().copied(), bb.min, self.alphabet.len()),
                Err(_) => false,
            }
        } else {
            self.labels().any(|a| match self.supertile_grid(a, depth) {
                Ok(g) => scan_grid(&g, patch, w, h),
                Err(_) => false,
            })
        }
    }

    fn rect_index(&self, w: usize, h: usize, depth: u32) -> Result<Arc<RectIndex>, SystemError> {
        if let Some(ix) = self.indexes.read().unwrap().get(&(w, h, depth)) {
            return Ok(ix.clone());
        }
        let blocks = self.blocks_at_depth(w, h, depth)?;
        let ix = Arc::new(RectIndex::build(&blocks, w, h, self.alphabet.len()));
        // a concurrent builder inserting the same index is harmless
        self.indexes.write().unwrap().insert((w, h, depth), ix.clone());
        Ok(ix)
    }

    /// Looks for a self-reproducing seed: first period 1, then up to 4.
    /// Quads are tried in lexicographic order of `(c₋₋, c₊₋, c₋₊, c₊₊)`.
    pub fn find_seed(&self) -> Result<Seed, SystemError> {
        let (legal, _) = self.saturated_blocks(2, 2)?;
        for period in 1..=4u32 {
            let corners: Vec<[Label; 4]> = self
                .labels()
                .map(|a| {
                    let g = self.supertile_grid(a, period)?;
                    let e = g.side - 1;
                    // the corner of each image that touches the origin
                    Ok([g.at(e, e), g.at(0, e), g.at(e, 0), g.at(0, 0)])
                })
                .collect::<Result<_, SystemError>>()?;
            for block in &legal {
                let quad = [block[0], block[1], block[2], block[3]];
                if (0..4).all(|k| corners[quad[k].index()][k] == quad[k]) {
                    return Ok(Seed { quad, period });
                }
            }
        }
        Err(SystemError::NoSeed)
    }

    /// Grid of the seeded fixed point covering at least `B_R(0)`.
    pub fn fixed_point_grid(&self, radius: u32) -> Result<Grid, SystemError> {
        let seed = self.find_seed()?;
        let mut grid = Grid { origin: Vec2::new(-1, -1), side: 2, cells: seed.quad.to_vec() };
        let mut depth = 0;
        while grid.side / 2 < radius as usize + 1 {
            for _ in 0..seed.period {
                depth += 1;
                self.check_budget(depth, grid.side * self.factor)?;
                grid = self.substitute(&grid);
            }
        }
        Ok(grid)
    }

    /// Truncation `T(B_R(0))` of the seeded fixed point.
    pub fn fixed_point_window(&self, radius: u32) -> Result<Window, SystemError> {
        let grid = self.fixed_point_grid(radius)?;
        Ok(Window::from_fn(radius, |p| grid.get(p).expect("grid covers the ball")))
    }

    /// All patches `T(B_r(x))` up to translation, each with its lower-left
    /// cell at the origin, in sorted order.
    pub fn atlas(&self, r: u32) -> Result<Vec<Patch>, SystemError> {
        let side = 2 * r as usize + 1;
        let (blocks, _) = self.saturated_blocks(side, side).map_err(|e| match e {
            SystemError::NoSaturation { .. } => SystemError::NoSaturation { radius: r },
            other => other,
        })?;
        let mut out: Vec<Patch> = blocks.iter().map(|b| block_patch(b, side, Vec2::ZERO)).collect();
        out.sort();
        Ok(out)
    }

    /// Windows `(T - x)(B_R(0))` of the fixed point, one per class of
    /// `B_{class_radius}` content, ordered by that content. Positions are
    /// scanned by increasing distance from the origin.
    pub fn realized_windows(&self, class_radius: u32, window_radius: u32) -> Result<Vec<Window>, SystemError> {
        assert!(class_radius <= window_radius);
        let wanted: BTreeSet<Patch> = self.atlas(class_radius)?.into_iter().collect();
        let mut reach = window_radius.max(16);
        loop {
            let big = self.fixed_point_window(reach + window_radius)?;
            let mut found: BTreeMap<Patch, Window> = BTreeMap::new();
            for x in ball_positions(reach) {
                let w = big.shifted(x).expect("inside the generated ball").restrict(window_radius);
                let class = w.restrict(class_radius).patch().normalized();
                found.entry(class).or_insert(w);
            }
            if found.len() == wanted.len() {
                debug_assert!(found.keys().eq(wanted.iter()));
                return Ok(found.into_values().collect());
            }
            reach *= 2;
            self.check_budget(0, 2 * (reach + window_radius) as usize + 1)
                .map_err(|_| SystemError::NoSaturation { radius: class_radius })?;
        }
    }
}

/// Cells of `B_r(0)` ordered by Chebyshev norm, then `(y, x)`.
pub fn ball_positions(r: u32) -> Vec<Vec2> {
    let ri = r as i32;
    let mut out: Vec<Vec2> = (-ri..=ri).flat_map(|y| (-ri..=ri).map(move |x| Vec2::new(x, y))).collect();
    out.sort_by_key(|p| (p.cheb(), *p));
    out
}

fn block_patch(block: &[Label], w: usize, origin: Vec2) -> Patch {
    let tiles = block
        .iter()
        .enumerate()
        .map(|(k, &l)| Tile::new(l, origin.x + (k % w) as i32, origin.y + (k / w) as i32))
        .collect();
    Patch::from_sorted(tiles)
}

fn scan_grid(g: &Grid, patch: &Patch, w: usize, h: usize) -> bool {
    if g.side < w || g.side < h {
        return false;
    }
    let min = patch.bbox().min;
    let rel: Vec<(usize, usize, Label)> = patch
        .tiles()
        .iter()
        .map(|t| ((t.pos.x - min.x) as usize, (t.pos.y - min.y) as usize, t.label))
        .collect();
    (0..=g.side - h).any(|y| (0..=g.side - w).any(|x| rel.iter().all(|&(i, j, l)| g.at(x + i, y + j) == l)))
}

fn substitution_matrix(rule: &[Vec<Label>], n: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n]; n];
    for (a, image) in rule.iter().enumerate() {
        for l in image {
            m[a][l.index()] += 1;
        }
    }
    m
}

/// Least `k ≤ n²` with `M^k > 0` entrywise.
fn primitivity_exponent(m: &[Vec<u64>]) -> Option<u32> {
    let n = m.len();
    let step: Vec<Vec<bool>> = m.iter().map(|row| row.iter().map(|&c| c > 0).collect()).collect();
    let mut power = step.clone();
    for k in 1..=(n * n) as u32 {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return Some(k);
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).any(|l| power[i][l] && step[l][j]);
            }
        }
        power = next;
    }
    None
}

/// Least nonzero `v` with `|v| ≤ R/2` such that `W` and `W + v` agree on
/// their overlap, or `None`.
///
/// Only the half-plane `y > 0` or `y = 0, x > 0` is searched (periods come in
/// `±v` pairs), ordered by Chebyshev norm, then `(y, x)`.
pub fn detect_period(w: &Window) -> Option<Vec2> {
    let half = (w.radius() / 2) as i32;
    let mut candidates: Vec<Vec2> = (0..=half)
        .flat_map(|y| (-half..=half).map(move |x| Vec2::new(x, y)))
        .filter(|v| v.y > 0 || v.x > 0)
        .collect();
    candidates.sort_by_key(|v| (v.cheb(), *v));
    let r = w.radius() as i32;
    candidates.into_iter().find(|&v| {
        (-r..=r).all(|y| {
            (-r..=r).all(|x| {
                let c = Vec2::new(x, y);
                match w.label_at(c + v) {
                    Some(l) => w.label_at(c) == Some(l),
                    None => true,
                }
            })
        })
    })
}

/// Result of the empirical repetitivity scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repetitivity {
    /// Smallest radius that works for every pattern and every position.
    pub radius: u32,
    /// Per pattern, the radius it needs.
    pub per_pattern: Vec<u32>,
}

impl SubstitutionSystem {
    /// For every position `x ∈ B_R(0)` of the fixed point and every pattern,
    /// the least `r` such that a translate of the pattern lies in `B_r(x)`.
    /// The fixed point is generated out to `R + slack`; if a position has no
    /// occurrence within `slack`, the scan reports an insufficient window.
    pub fn repetitivity_radius(&self, patterns: &[Patch], radius: u32, slack: u32) -> Result<Repetitivity, SystemError> {
        let outer = radius + slack;
        let big = self.fixed_point_window(outer)?;
        let side = 2 * outer as usize + 1;
        let o = outer as i32;
        let mut per_pattern = Vec::with_capacity(patterns.len());
        for pattern in patterns {
            let bb = pattern.bbox();
            let (w, h) = (bb.width() as i32, bb.height() as i32);
            // prefix sums over occurrence anchors (pattern's bbox min corner)
            let mut sums = vec![0u32; (side + 1) * (side + 1)];
            for y in -o..=o {
                for x in -o..=o {
                    let anchor = Vec2::new(x, y);
                    let hit = big.contains_shifted(pattern, anchor - bb.min) as u32;
                    let (i, j) = ((x + o) as usize + 1, (y + o) as usize + 1);
                    sums[j * (side + 1) + i] =
                        hit + sums[(j - 1) * (side + 1) + i] + sums[j * (side + 1) + i - 1] - sums[(j - 1) * (side + 1) + i - 1];
                }
            }
            let count = |x0: i32, y0: i32, x1: i32, y1: i32| -> u32 {
                let (x0, y0) = (x0.max(-o), y0.max(-o));
                let (x1, y1) = (x1.min(o), y1.min(o));
                if x0 > x1 || y0 > y1 {
                    return 0;
                }
                let (i0, j0, i1, j1) =
                    ((x0 + o) as usize, (y0 + o) as usize, (x1 + o) as usize + 1, (y1 + o) as usize + 1);
                sums[j1 * (side + 1) + i1] + sums[j0 * (side + 1) + i0] - sums[j0 * (side + 1) + i1] - sums[j1 * (side + 1) + i0]
            };
            let mut worst = 0u32;
            let ri = radius as i32;
            for y in -ri..=ri {
                for x in -ri..=ri {
                    let mut r = (w.max(h) - 1) / 2;
                    loop {
                        // anchors a with [a, a + size - 1] ⊆ [x - r, x + r]
                        if count(x - r, y - r, x + r - w + 1, y + r - h + 1) > 0 {
                            break;
                        }
                        r += 1;
                        if (x.abs().max(y.abs()) + r) > o {
                            return Err(SystemError::InsufficientWindow(format!(
                                "no occurrence near ({x}, {y}) within the generated radius {outer}"
                            )));
                        }
                    }
                    worst = worst.max(r as u32);
                }
            }
            per_pattern.push(worst);
        }
        Ok(Repetitivity { radius: per_pattern.iter().copied().max().unwrap_or(0), per_pattern })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chair() -> SubstitutionSystem {
        SubstitutionSystem::builtin("chair").unwrap()
    }

    #[test]
    fn builtins_load_and_are_primitive() {
        let solid = SubstitutionSystem::builtin("solid").unwrap();
        assert_eq!(solid.matrix(), vec![vec![4]]);
        assert_eq!(solid.primitivity_exponent(), 1);
        assert_eq!(chair().primitivity_exponent(), 2);
        assert_eq!(SubstitutionSystem::builtin("checkerboard").unwrap().primitivity_exponent(), 1);
    }

    #[test]
    fn malformed_rules_are_rejected() {
        let wrong_shape = r#"
            name = "bad"
            labels = ["a"]
            factor = 2
            [rule]
            a = [["a", "a", "a"], ["a", "a", "a"], ["a", "a", "a"]]
        "#;
        assert!(matches!(SubstitutionSystem::load(wrong_shape), Err(SystemError::MalformedRule(_))));
        let unknown = r#"
            name = "bad"
            labels = ["a"]
            factor = 2
            [rule]
            a = [["a", "z"], ["a", "a"]]
        "#;
        assert!(matches!(SubstitutionSystem::load(unknown), Err(SystemError::MalformedRule(_))));
        let missing = r#"
            name = "bad"
            labels = ["a", "b"]
            factor = 2
            [rule]
            a = [["a", "b"], ["a", "a"]]
        "#;
        assert!(matches!(SubstitutionSystem::load(missing), Err(SystemError::MalformedRule(_))));
    }

    #[test]
    fn reducible_rule_is_not_primitive() {
        let reducible = r#"
            name = "reducible"
            labels = ["a", "b"]
            factor = 2
            [rule]
            a = [["a", "a"], ["a", "a"]]
            b = [["a", "b"], ["b", "b"]]
        "#;
        assert_eq!(SubstitutionSystem::load(reducible).unwrap_err(), SystemError::NotPrimitive);
    }

    #[test]
    fn depth_budget_is_enforced() {
        let solid = SubstitutionSystem::builtin("solid").unwrap().with_cell_budget(64);
        assert!(solid.supertile(Label(0), 3).is_ok());
        assert!(matches!(solid.supertile(Label(0), 4), Err(SystemError::DepthTooLarge { depth: 4, .. })));
    }

    #[test]
    fn seeds_are_self_reproducing() {
        for name in builtin_names() {
            let s = SubstitutionSystem::builtin(name).unwrap();
            let seed = s.find_seed().unwrap();
            let g = s.fixed_point_grid(1).unwrap();
            let quad = [
                g.get(Vec2::new(-1, -1)).unwrap(),
                g.get(Vec2::new(0, -1)).unwrap(),
                g.get(Vec2::new(-1, 0)).unwrap(),
                g.get(Vec2::new(0, 0)).unwrap(),
            ];
            assert_eq!(quad, seed.quad, "{name}");
        }
    }

    #[test]
    fn covering_depth_matches_powers() {
        let s = chair();
        assert_eq!(s.covering_depth(1), 0);
        assert_eq!(s.covering_depth(2), 1);
        assert_eq!(s.covering_depth(5), 3);
        assert_eq!(s.covering_depth(8), 3);
        assert_eq!(s.covering_depth(9), 4);
    }

    #[test]
    fn chair_margin_covers_its_two_by_two_depth() {
        let s = chair();
        assert_eq!(s.admissibility_margin(), 3);
    }

    #[test]
    fn ball_positions_start_at_origin() {
        let b = ball_positions(2);
        assert_eq!(b.len(), 25);
        assert_eq!(b[0], Vec2::ZERO);
        assert!(b.windows(2).all(|w| w[0].cheb() <= w[1].cheb()));
    }
}
