//! SVG 1.1 rendering of patches: one unit square per tile, y axis up.

use std::fmt::Write as _;

use crate::geometry::{Alphabet, Label, Patch, Vec2};

const DEFAULT_COLORS: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f"];

/// Fill color per label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<String>,
}

impl Palette {
    pub fn new(colors: Vec<String>) -> Palette {
        assert!(!colors.is_empty(), "a palette needs at least one color");
        Palette { colors }
    }

    /// The built-in colors, cycled if the alphabet is longer.
    pub fn default_for(alphabet: &Alphabet) -> Palette {
        Palette { colors: (0..alphabet.len().max(1)).map(|i| DEFAULT_COLORS[i % DEFAULT_COLORS.len()].to_string()).collect() }
    }

    pub fn color(&self, label: Label) -> &str {
        &self.colors[label.index() % self.colors.len()]
    }
}

/// Pixels per lattice unit.
const SCALE: i32 = 16;

/// Renders `patch` with each tile as a `rect`, flipping y so that lattice
/// y grows upward. The origin cell gets a small circle when it is drawn.
pub fn render_svg(patch: &Patch, palette: &Palette, alphabet: &Alphabet) -> String {
    let b = patch.bbox();
    let (w, h) = (b.width() as i32 * SCALE, b.height() as i32 * SCALE);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let px = |p: Vec2| ((p.x - b.min.x) * SCALE, (b.max.y - p.y) * SCALE);
    for t in patch.tiles() {
        let (x, y) = px(t.pos);
        let _ = writeln!(
            out,
            "  <rect x=\"{x}\" y=\"{y}\" width=\"{SCALE}\" height=\"{SCALE}\" fill=\"{}\" stroke=\"#222\" stroke-width=\"0.5\"><title>{} {} {}</title></rect>",
            palette.color(t.label),
            alphabet.name(t.label),
            t.pos.x,
            t.pos.y
        );
    }
    if patch.label_at(Vec2::ZERO).is_some() {
        let (x, y) = px(Vec2::ZERO);
        let _ = writeln!(out, "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#000\"/>", x + SCALE / 2, y + SCALE / 2, SCALE / 5);
    }
    out.push_str("</svg>\n");
    out
}
