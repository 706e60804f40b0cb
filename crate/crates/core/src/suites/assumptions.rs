//! Finite checks of the standing hypotheses on the tiling: a saturating
//! atlas, no period, and bounded recurrence of patterns.

use crate::geometry::Vec2;
use crate::report::{Report, Verdict};
use crate::substitution::{detect_period, SubstitutionSystem, SystemError};

/// `atlas(r)` for each `r ≤ max_r` stabilizes: the blocks at the saturation
/// depth equal those one depth further.
pub fn saturation(system: &SubstitutionSystem, max_r: u32, report: &mut Report) -> Result<(), SystemError> {
    for r in 0..=max_r {
        let side = 2 * r as usize + 1;
        let (blocks, depth) = system.saturated_blocks(side, side)?;
        let next = system.blocks_at_depth(side, side, depth + 1)?;
        let fp = format!("system={} r={r} depth={depth} patches={}", system.name(), blocks.len());
        report.push("assumptions.saturation", fp, Verdict::from_bool(blocks == next));
    }
    Ok(())
}

/// A generated window has a period exactly when one is expected.
pub fn period(system: &SubstitutionSystem, radius: u32, expected: Option<Vec2>, report: &mut Report) -> Result<(), SystemError> {
    let w = system.fixed_point_window(radius)?;
    let found = detect_period(&w);
    let show = |v: Option<Vec2>| v.map_or("none".to_string(), |v| v.to_string());
    let fp = format!("system={} R={radius} found={} expected={}", system.name(), show(found), show(expected));
    report.push("assumptions.period", fp, Verdict::from_bool(found == expected));
    Ok(())
}

/// Every `B_r` pattern recurs within a finite radius of every position of
/// `B_R` in the fixed point.
pub fn repetitivity(system: &SubstitutionSystem, r: u32, radius: u32, slack: u32, report: &mut Report) -> Result<u32, SystemError> {
    let patterns = system.atlas(r)?;
    let rep = system.repetitivity_radius(&patterns, radius, slack)?;
    let fp = format!(
        "system={} r={r} patterns={} R={radius} slack={slack} r0={}",
        system.name(),
        patterns.len(),
        rep.radius
    );
    report.push("assumptions.repetitivity", fp, Verdict::Pass);
    Ok(rep.radius)
}
