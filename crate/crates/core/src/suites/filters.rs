//! Filters of windows, maximality, reconstruction, injectivity of `Ψ` and
//! the square relating `θ` on characters to `θ^Ω` on windows.

use std::collections::HashMap;

use crate::filters::{
    character_of, enumerate_filters, filter_of, is_filter, is_ultrafilter, psi, reconstruct, theta_tight, xi_partial, xi_t,
    FilterError, IdempotentUniverse, Maximality,
};
use crate::geometry::Window;
use crate::report::{Report, Verdict};
use crate::semigroup::{Element, TilingSemigroup};

use super::FAILURE_LINES;

fn universe_tag(u: &IdempotentUniverse) -> String {
    format!("universe={:?}(r={},n={},items={})", u.shape(), u.radius(), u.max_tiles(), u.len())
}

/// `ξ_T` is a filter for every window.
pub fn xi_is_filter(
    sg: &TilingSemigroup,
    windows: &[Window],
    u: &IdempotentUniverse,
    tag: &str,
    report: &mut Report,
) -> Result<(), FilterError> {
    let mut bad = Vec::new();
    for (k, w) in windows.iter().enumerate() {
        if !is_filter(sg, &xi_t(w, u)?, u) {
            bad.push(k);
        }
    }
    let check = "filters.xi-is-filter";
    let fp = format!("{tag} {} windows={} failures={}", universe_tag(u), windows.len(), bad.len());
    report.push(check, fp, Verdict::from_bool(bad.is_empty()));
    for k in bad.into_iter().take(FAILURE_LINES) {
        report.push(check, format!("{tag} window={k}"), Verdict::Fail);
    }
    Ok(())
}

/// Truncated maximality of `ξ_T`. Escapes make the line indeterminate.
pub fn xi_is_ultrafilter(
    sg: &TilingSemigroup,
    windows: &[Window],
    u: &IdempotentUniverse,
    tag: &str,
    report: &mut Report,
) -> Result<(), FilterError> {
    let (mut maximal, mut refuted, mut indeterminate) = (0, Vec::new(), 0);
    for (k, w) in windows.iter().enumerate() {
        match is_ultrafilter(sg, &xi_t(w, u)?, u) {
            Maximality::Maximal => maximal += 1,
            Maximality::Indeterminate { .. } => indeterminate += 1,
            m => refuted.push((k, m)),
        }
    }
    let verdict = match (refuted.is_empty(), indeterminate) {
        (false, _) => Verdict::Fail,
        (true, 0) => Verdict::Pass,
        (true, _) => Verdict::Indet,
    };
    let check = "filters.xi-ultrafilter";
    let fp = format!(
        "{tag} {} windows={} maximal={maximal} indeterminate={indeterminate} failures={}",
        universe_tag(u),
        windows.len(),
        refuted.len()
    );
    report.push(check, fp, verdict);
    for (k, m) in refuted.into_iter().take(FAILURE_LINES) {
        report.push(check, format!("{tag} window={k} {m:?}"), Verdict::Fail);
    }
    Ok(())
}

/// Every filter of `u` is `ξ` of the union of its members, and filters and
/// characters correspond.
pub fn reconstruction(
    sg: &TilingSemigroup,
    u: &IdempotentUniverse,
    limit: usize,
    tag: &str,
    report: &mut Report,
) -> Result<(), FilterError> {
    let filters = enumerate_filters(sg, u, limit)?;
    let mut rebuilt_bad = Vec::new();
    let mut bijection_bad = 0;
    for f in &filters {
        let ok = reconstruct(f, u).is_ok_and(|t| xi_partial(&t, u) == *f);
        if !ok {
            rebuilt_bad.push(f.members().to_vec());
        }
        if filter_of(&character_of(f, u)) != *f {
            bijection_bad += 1;
        }
    }
    let check = "filters.reconstruction";
    let fp = format!("{tag} {} filters={} failures={}", universe_tag(u), filters.len(), rebuilt_bad.len());
    report.push(check, fp, Verdict::from_bool(rebuilt_bad.is_empty() && !filters.is_empty()));
    for m in rebuilt_bad.into_iter().take(FAILURE_LINES) {
        report.push(check, format!("{tag} members={m:?}"), Verdict::Fail);
    }
    report.push(
        "filters.character-bijection",
        format!("{tag} {} filters={} failures={bijection_bad}", universe_tag(u), filters.len()),
        Verdict::from_bool(bijection_bad == 0),
    );
    Ok(())
}

/// Windows with distinct contents on `B_r` receive distinct characters.
pub fn psi_injectivity(windows: &[Window], u: &IdempotentUniverse, tag: &str, report: &mut Report) -> Result<(), FilterError> {
    let r = u.radius();
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut collisions = Vec::new();
    let mut classes = 0;
    let mut contents = std::collections::HashSet::new();
    for (k, w) in windows.iter().enumerate() {
        if !contents.insert(w.restrict(r)) {
            continue;
        }
        classes += 1;
        let c = psi(w, u)?;
        if let Some(&j) = seen.get(c.values()) {
            collisions.push((j, k));
        } else {
            seen.insert(c.values().to_vec(), k);
        }
    }
    let check = "filters.psi-injective";
    let fp = format!("{tag} {} classes={classes} collisions={}", universe_tag(u), collisions.len());
    report.push(check, fp, Verdict::from_bool(collisions.is_empty()));
    for (j, k) in collisions.into_iter().take(FAILURE_LINES) {
        report.push(check, format!("{tag} windows={j},{k}"), Verdict::Fail);
    }
    Ok(())
}

/// Tally of the commuting-square sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SquareTally {
    pub pairs: usize,
    pub entries: u64,
    pub determinate: u64,
    pub mismatches: u64,
    pub failures: Vec<String>,
}

impl SquareTally {
    pub fn coverage(&self) -> f64 {
        if self.entries == 0 {
            0.0
        } else {
            self.determinate as f64 / self.entries as f64
        }
    }
}

/// `θ_s(Ψ(W)) = Ψ(θ^Ω_s(W))` on determinate entries, for every element
/// whose domain holds the window.
pub fn commuting_square(
    sg: &TilingSemigroup,
    elements: &[Element],
    windows: &[Window],
    u: &IdempotentUniverse,
) -> Result<SquareTally, FilterError> {
    let mut t = SquareTally::default();
    for (k, w) in windows.iter().enumerate() {
        let c = psi(w, u)?;
        for s in elements {
            if !sg.in_domain(s, w)? {
                continue;
            }
            let lhs = theta_tight(sg, s, &c, u)?;
            let rhs = psi(&sg.theta_omega(s, w)?, u)?;
            t.pairs += 1;
            t.entries += u.len() as u64;
            t.determinate += lhs.determinate() as u64;
            let bad = lhs.values().iter().zip(rhs.values()).filter(|(a, &b)| a.is_some_and(|a| a != b)).count();
            if bad > 0 {
                t.mismatches += bad as u64;
                if t.failures.len() < FAILURE_LINES {
                    t.failures.push(format!("window={k} s={} mismatches={bad}", s.to_text(sg.alphabet())));
                }
            }
        }
    }
    Ok(t)
}

pub fn commuting_diagram(
    sg: &TilingSemigroup,
    elements: &[Element],
    windows: &[Window],
    u: &IdempotentUniverse,
    min_coverage: f64,
    tag: &str,
    report: &mut Report,
) -> Result<SquareTally, FilterError> {
    let t = commuting_square(sg, elements, windows, u)?;
    let check = "filters.commuting-diagram";
    let fp = format!(
        "{tag} {} windows={} pairs={} entries={} determinate={} coverage={:.4} mismatches={}",
        universe_tag(u),
        windows.len(),
        t.pairs,
        t.entries,
        t.determinate,
        t.coverage(),
        t.mismatches
    );
    report.push(check, fp, Verdict::from_bool(t.mismatches == 0 && t.pairs > 0 && t.coverage() >= min_coverage));
    for f in &t.failures {
        report.push(check, format!("{tag} {f}"), Verdict::Fail);
    }
    Ok(t)
}
