//! Inverse-semigroup axioms and the nonzero-product criterion, checked
//! exhaustively on enumerated truncations.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::geometry::Window;
use crate::report::{Report, Verdict};
use crate::semigroup::{Element, SemigroupError, TilingSemigroup};

use super::{rng, FAILURE_LINES};

/// Label of the first marked tile.
fn first_label(e: &Element) -> usize {
    e.class().expect("non-zero").t1().label.index()
}

/// Label of the second marked tile, which sits at the origin.
fn last_label(e: &Element) -> usize {
    e.class().expect("non-zero").t2().label.index()
}

fn triple_text(sg: &TilingSemigroup, es: &[&Element]) -> String {
    es.iter().map(|e| e.to_text(sg.alphabet())).collect::<Vec<_>>().join(" * ")
}

/// `s s* s = s`, `s* s s* = s*` and `s** = s` for every element.
pub fn regularity(sg: &TilingSemigroup, elements: &[Element], tag: &str, report: &mut Report) {
    let mut regular_bad = Vec::new();
    let mut involution_bad = Vec::new();
    for s in elements {
        let t = sg.star(s);
        if sg.multiply(s, &sg.multiply(&t, s)) != *s || sg.multiply(&t, &sg.multiply(s, &t)) != t {
            regular_bad.push(s);
        }
        if sg.star(&t) != *s {
            involution_bad.push(s);
        }
    }
    for (check, bad) in [("semigroup.regularity", regular_bad), ("semigroup.involution", involution_bad)] {
        let fp = format!("{tag} elements={} failures={}", elements.len(), bad.len());
        report.push(check, fp, Verdict::from_bool(bad.is_empty()));
        for s in bad.into_iter().take(FAILURE_LINES) {
            report.push(check, s.to_text(sg.alphabet()), Verdict::Fail);
        }
    }
}

/// `ef = fe` for every pair of idempotents. Pairs whose origin labels
/// differ are zero both ways by the label rule and are only counted; all
/// others are multiplied both ways.
pub fn commuting_idempotents(sg: &TilingSemigroup, elements: &[Element], tag: &str, report: &mut Report) {
    // contiguous per-label copies keep the inner loop in cache
    let mut buckets: Vec<Vec<Element>> = vec![Vec::new(); sg.alphabet().len()];
    for e in elements.iter().filter(|e| e.is_idempotent() && !e.is_zero()) {
        buckets[last_label(e)].push(e.clone());
    }
    let total: u64 = buckets.iter().map(|b| b.len() as u64).sum();
    let mut bad = Vec::new();
    let mut compared = 0u64;
    for bucket in &buckets {
        for (i, e) in bucket.iter().enumerate() {
            for f in &bucket[i..] {
                compared += 1;
                if sg.multiply(e, f) != sg.multiply(f, e) {
                    bad.push(triple_text(sg, &[e, f]));
                }
            }
        }
    }
    let pairs = total * (total + 1) / 2;
    let check = "semigroup.commuting-idempotents";
    let fp = format!(
        "{tag} idempotents={total} pairs={pairs} compared={compared} label-ruled={} failures={}",
        pairs - compared,
        bad.len()
    );
    report.push(check, fp, Verdict::from_bool(bad.is_empty()));
    for b in bad.into_iter().take(FAILURE_LINES) {
        report.push(check, b, Verdict::Fail);
    }
}

/// Outcome of an exhaustive associativity sweep.
#[derive(Debug, Clone, Default)]
pub struct AssociativityTally {
    pub elements: usize,
    /// All `n³` ordered triples.
    pub triples: u128,
    /// Triples whose both sides were evaluated and compared.
    pub compared: u64,
    /// Triples whose marked-tile labels do not line up; both sides are the
    /// zero by the label rule, which is itself checked on all pairs.
    pub label_ruled: u128,
    /// Pairs violating the label rule; must be empty for the count above to
    /// stand.
    pub label_rule_violations: Vec<String>,
    pub failure_count: u64,
    /// The first few failing triples.
    pub failures: Vec<String>,
}

impl AssociativityTally {
    pub fn holds(&self) -> bool {
        self.failure_count == 0 && self.label_rule_violations.is_empty()
    }
}

/// Exact 128-bit encoding of small elements: up to 12 tiles with
/// coordinates in `[-8, 7]` over at most four labels. Never zero.
fn compact_key(e: &Element) -> Option<u128> {
    let c = e.class()?;
    let tiles = c.patch().tiles();
    if tiles.len() > 12 {
        return None;
    }
    let mut key = tiles.len() as u128;
    for (k, t) in tiles.iter().enumerate() {
        let (x, y, l) = (t.pos.x + 8, t.pos.y + 8, t.label.index());
        if !(0..16).contains(&x) || !(0..16).contains(&y) || l >= 4 {
            return None;
        }
        if t.pos == c.t1().pos {
            key |= (k as u128) << 4;
        }
        key |= ((x as u128) | (y as u128) << 4 | (l as u128) << 8) << (8 + 10 * k);
    }
    Some(key)
}

/// Exact element keys: compact encodings where they exist, interned ids
/// (tagged with a zero tile count) otherwise. Zero maps to 0.
#[derive(Default)]
struct Keys {
    large: HashMap<Element, u128>,
}

impl Keys {
    fn key(&mut self, e: &Element) -> u128 {
        if e.is_zero() {
            return 0;
        }
        if let Some(k) = compact_key(e) {
            return k;
        }
        let next = (self.large.len() as u128 + 1) << 8;
        *self.large.entry(e.clone()).or_insert(next)
    }
}

/// Checks `(ab)c = a(bc)` on every ordered triple of `elements`.
///
/// Products of pairs are tabulated and interned; each distinct left product
/// `x = ab` is multiplied once by every `c`, and each `a` once by every
/// distinct right product `y = bc`, so the sweep costs about two products
/// per distinct (product, factor) combination instead of four per triple.
pub fn exhaustive_associativity(sg: &TilingSemigroup, elements: &[Element]) -> AssociativityTally {
    let els: Vec<&Element> = elements.iter().filter(|e| !e.is_zero()).collect();
    let n = els.len();
    let labels = sg.alphabet().len();
    let mut tally = AssociativityTally { elements: n, triples: (n as u128).pow(3), ..Default::default() };

    // elements grouped by the label of their first marked tile
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); labels];
    for (i, e) in els.iter().enumerate() {
        buckets[first_label(e)].push(i);
    }

    // pair table over interned non-zero products, id 0 = Zero
    let mut ids: HashMap<Element, u32> = HashMap::new();
    let mut products: Vec<Element> = vec![Element::Zero];
    let mut table = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            let p = sg.multiply(els[a], els[b]);
            if p.is_zero() {
                continue;
            }
            let ruled = last_label(els[a]) != first_label(els[b])
                || first_label(&p) != first_label(els[a])
                || last_label(&p) != last_label(els[b]);
            if ruled {
                tally.label_rule_violations.push(triple_text(sg, &[els[a], els[b]]));
            }
            let id = *ids.entry(p.clone()).or_insert_with(|| {
                products.push(p);
                (products.len() - 1) as u32
            });
            table[a * n + b] = id;
        }
    }
    drop(ids);

    // renumber products so each first label owns a contiguous id range
    let mut order: Vec<usize> = (1..products.len()).collect();
    order.sort_by_key(|&y| first_label(&products[y]));
    let mut renumber = vec![0u32; products.len()];
    for (k, &y) in order.iter().enumerate() {
        renumber[y] = k as u32 + 1;
    }
    let mut slots: Vec<Option<Element>> = products.into_iter().map(Some).collect();
    let products: Vec<Element> = std::iter::once(Element::Zero)
        .chain(order.iter().map(|&y| slots[y].take().expect("each product once")))
        .collect();
    for id in table.iter_mut() {
        *id = renumber[*id as usize];
    }

    // left rows: x·c for every distinct product x and every c it can meet,
    // non-zero entries only
    let mut keys = Keys::default();
    let mut row_start = vec![0usize; products.len() + 1];
    let mut row_cols: Vec<u32> = Vec::new();
    let mut row_keys: Vec<u128> = Vec::new();
    for x in 1..products.len() {
        for (k, &c) in buckets[last_label(&products[x])].iter().enumerate() {
            let p = sg.multiply(&products[x], els[c]);
            if !p.is_zero() {
                row_cols.push(k as u32);
                row_keys.push(keys.key(&p));
            }
        }
        row_start[x + 1] = row_cols.len();
    }

    // for each b, the ids of b·c over the c it can meet
    let right: Vec<Vec<u32>> =
        (0..n).map(|b| buckets[last_label(els[b])].iter().map(|&c| table[b * n + c]).collect()).collect();

    let by_first: Vec<std::ops::Range<usize>> = (0..labels)
        .map(|l| {
            let start = products[1..].partition_point(|p| first_label(p) < l) + 1;
            start..products[1..].partition_point(|p| first_label(p) <= l) + 1
        })
        .collect();
    let mut col = vec![0u128; products.len()];
    for a in 0..n {
        let la = last_label(els[a]);
        for y in by_first[la].clone() {
            col[y] = keys.key(&sg.multiply(els[a], &products[y]));
        }
        for &b in &buckets[la] {
            let x = table[a * n + b] as usize;
            let (mut r, end) = if x == 0 { (0, 0) } else { (row_start[x], row_start[x + 1]) };
            let ys = &right[b];
            tally.compared += ys.len() as u64;
            for (k, &y) in ys.iter().enumerate() {
                let lhs = if r < end && row_cols[r] == k as u32 {
                    r += 1;
                    row_keys[r - 1]
                } else {
                    0
                };
                if lhs != col[y as usize] {
                    tally.failure_count += 1;
                    if tally.failures.len() < FAILURE_LINES {
                        let c = buckets[last_label(els[b])][k];
                        tally.failures.push(triple_text(sg, &[els[a], els[b], els[c]]));
                    }
                }
            }
        }
    }
    tally.label_ruled = tally.triples - tally.compared as u128;
    tally
}

/// `(ab)c = a(bc)` on seeded random triples whose labels line up, so that
/// most products are non-trivial.
pub fn random_associativity(
    sg: &TilingSemigroup,
    elements: &[Element],
    count: usize,
    seed: u64,
    tag: &str,
    report: &mut Report,
) {
    let mut rng = rng(seed);
    let mut by_first: Vec<Vec<&Element>> = vec![Vec::new(); sg.alphabet().len()];
    for e in elements.iter().filter(|e| !e.is_zero()) {
        by_first[first_label(e)].push(e);
    }
    let mut bad = Vec::new();
    let mut nonzero = 0usize;
    for _ in 0..count {
        let a = elements.choose(&mut rng).expect("non-empty");
        let b = by_first[last_label(a)].choose(&mut rng).copied().unwrap_or(a);
        let c = by_first[last_label(b)].choose(&mut rng).copied().unwrap_or(b);
        let lhs = sg.multiply(&sg.multiply(a, b), c);
        let rhs = sg.multiply(a, &sg.multiply(b, c));
        nonzero += !lhs.is_zero() as usize;
        if lhs != rhs {
            bad.push(triple_text(sg, &[a, b, c]));
        }
    }
    let check = "semigroup.associativity.random";
    let fp = format!("{tag} seed={seed} triples={count} nonzero={nonzero} failures={}", bad.len());
    report.push(check, fp, Verdict::from_bool(bad.is_empty()));
    for b in bad.into_iter().take(FAILURE_LINES) {
        report.push(check, b, Verdict::Fail);
    }
}

pub fn associativity(sg: &TilingSemigroup, elements: &[Element], tag: &str, report: &mut Report) {
    let t = exhaustive_associativity(sg, elements);
    let check = "semigroup.associativity.exhaustive";
    let fp = format!(
        "{tag} elements={} triples={} compared={} label-ruled={} failures={}",
        t.elements,
        t.triples,
        t.compared,
        t.label_ruled,
        t.failure_count
    );
    report.push(check, fp, Verdict::from_bool(t.holds()));
    for f in &t.failures {
        report.push(check, f.clone(), Verdict::Fail);
    }
    for v in t.label_rule_violations.iter().take(FAILURE_LINES) {
        report.push("semigroup.label-rule", v.clone(), Verdict::Fail);
    }
}

/// `x_{st} = x_s + x_t` and `θ^Ω_{st} = θ^Ω_s ∘ θ^Ω_t` on seeded pairs.
pub fn action_homomorphism(
    sg: &TilingSemigroup,
    elements: &[Element],
    windows: &[Window],
    count: usize,
    seed: u64,
    tag: &str,
    report: &mut Report,
) -> Result<(), SemigroupError> {
    let mut rng = rng(seed);
    let mut by_first: Vec<Vec<&Element>> = vec![Vec::new(); sg.alphabet().len()];
    for e in elements.iter().filter(|e| !e.is_zero()) {
        by_first[first_label(e)].push(e);
    }
    let (mut additive_bad, mut action_bad, mut evaluated) = (0usize, 0usize, 0usize);
    for _ in 0..count {
        let s = elements.choose(&mut rng).expect("non-empty");
        let Some(&t) = by_first[last_label(s)].choose(&mut rng) else { continue };
        let st = sg.multiply(s, t);
        if st.is_zero() {
            continue;
        }
        if st.displacement() != Some(s.displacement().unwrap() + t.displacement().unwrap()) {
            additive_bad += 1;
        }
        let w = &windows[rng.gen_range(0..windows.len())];
        if !sg.in_domain(t, w)? {
            continue;
        }
        let inner = sg.theta_omega(t, w)?;
        if !sg.in_domain(s, &inner)? {
            continue;
        }
        evaluated += 1;
        let rhs = sg.theta_omega(s, &inner)?;
        let lhs = sg.theta_omega(&st, w)?;
        let r = lhs.radius().min(rhs.radius());
        if !lhs.agrees_within(&rhs, r) {
            action_bad += 1;
        }
    }
    report.push(
        "semigroup.displacement-additivity",
        format!("{tag} seed={seed} failures={additive_bad}"),
        Verdict::from_bool(additive_bad == 0),
    );
    report.push(
        "semigroup.action-homomorphism",
        format!("{tag} seed={seed} evaluated={evaluated} failures={action_bad}"),
        Verdict::from_bool(action_bad == 0 && evaluated > 0),
    );
    Ok(())
}

/// Outcome of the nonzero-product criterion on one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonzeroWitness {
    pub product_nonzero: bool,
    pub union_admissible: bool,
    /// Some window lies in `U(P, t2) ∩ U(P', t1')`.
    pub realized: bool,
}

/// Evaluates the three sides of the criterion for `a·b`. `windows` must
/// realize every pattern class of a ball holding both aligned patches.
pub fn nonzero_witness(sg: &TilingSemigroup, a: &Element, b: &Element, windows: &[Window]) -> NonzeroWitness {
    let product_nonzero = !sg.multiply(a, b).is_zero();
    let (Some(ca), Some(cb)) = (a.class(), b.class()) else {
        return NonzeroWitness { product_nonzero, union_admissible: false, realized: false };
    };
    // both factors anchored at the origin puncture of a candidate window:
    // P with t2 at the origin, P' with t1' at the origin
    let q = cb.t1().pos;
    let right = cb.patch().translate(-q);
    let union_admissible = ca.patch().union(&right).is_ok_and(|u| sg.system().is_admissible(&u));
    let realized = windows.iter().any(|w| w.contains_patch(ca.patch()) && w.contains_patch(&right));
    NonzeroWitness { product_nonzero, union_admissible, realized }
}

/// The nonzero criterion on seeded pairs with matching marked labels.
pub fn nonzero_criterion(
    sg: &TilingSemigroup,
    elements: &[Element],
    windows: &[Window],
    count: usize,
    seed: u64,
    tag: &str,
    report: &mut Report,
) {
    let mut rng = rng(seed);
    let mut by_first: Vec<Vec<&Element>> = vec![Vec::new(); sg.alphabet().len()];
    for e in elements.iter().filter(|e| !e.is_zero()) {
        by_first[first_label(e)].push(e);
    }
    let needed = elements.iter().filter_map(|e| e.class()).map(|c| c.patch().radius()).max().unwrap_or(0) * 2;
    let mut disagreements = Vec::new();
    let mut nonzero = 0usize;
    for _ in 0..count {
        let a = elements.choose(&mut rng).expect("non-empty");
        let b = by_first[last_label(a)].choose(&mut rng).copied().unwrap_or(a);
        let w = nonzero_witness(sg, a, b, windows);
        nonzero += w.product_nonzero as usize;
        if w.product_nonzero != w.union_admissible || w.product_nonzero != w.realized {
            disagreements.push(format!("{} [{:?}]", triple_text(sg, &[a, b]), w));
        }
    }
    let check = "semigroup.nonzero-criterion";
    let fp = format!(
        "{tag} seed={seed} pairs={count} nonzero={nonzero} windows={} ball={needed} disagreements={}",
        windows.len(),
        disagreements.len()
    );
    report.push(check, fp, Verdict::from_bool(disagreements.is_empty()));
    for d in disagreements.into_iter().take(FAILURE_LINES) {
        report.push(check, d, Verdict::Fail);
    }
}

/// Largest Chebyshev radius of the patches, which bounds the ball the
/// nonzero criterion needs realized: twice this value.
pub fn patch_reach(elements: &[Element]) -> u32 {
    elements.iter().filter_map(|e| e.class()).map(|c| c.patch().radius()).max().unwrap_or(0)
}
