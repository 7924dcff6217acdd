use std::cmp::Ordering;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::ingest::normalize_body;
use crate::model::{ElementLabel, Entity, Group, GroupKind, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RowOrderParams {
    pub angle_threshold_degrees: f64,
}

impl Default for RowOrderParams {
    fn default() -> Self {
        Self {
            angle_threshold_degrees: 50.0,
        }
    }
}

/// Angle of the segment `a`-`b` against the horizontal, folded into [0, 90] degrees.
pub fn line_angle(a: Point, b: Point) -> f64 {
    let dx = (b.x - a.x).abs();
    let dy = (b.y - a.y).abs();
    if dx == 0.0 {
        return if dy == 0.0 { 0.0 } else { 90.0 };
    }
    (dy / dx).atan().to_degrees()
}

/// Top to bottom, then left to right, then id.
pub(crate) fn reading_cmp(a: &Entity, b: &Entity) -> Ordering {
    a.top()
        .total_cmp(&b.top())
        .then(a.left().total_cmp(&b.left()))
        .then_with(|| a.id.cmp(&b.id))
}

/// Orders a row region left to right, swapping steep adjacent pairs so the
/// upper element comes first. One pass.
pub fn order_row_group(members: &[&Entity], params: &RowOrderParams) -> Option<Group> {
    let mut ordered = members.to_vec();
    ordered.sort_by(|a, b| a.x_center.total_cmp(&b.x_center).then_with(|| reading_cmp(a, b)));
    for i in 0..ordered.len().saturating_sub(1) {
        let (a, b) = (ordered[i], ordered[i + 1]);
        if line_angle(a.mid_point, b.mid_point) >= params.angle_threshold_degrees && reading_cmp(b, a).is_lt() {
            ordered.swap(i, i + 1);
        }
    }
    Group::from_members(GroupKind::Row, &ordered).ok()
}

/// Orders a generic region top to bottom, ties broken left to right.
pub fn order_generic_group(members: &[&Entity]) -> Option<Group> {
    let mut ordered = members.to_vec();
    ordered.sort_by(|a, b| reading_cmp(a, b));
    Group::from_members(GroupKind::Generic, &ordered).ok()
}

fn dedupe_key(e: &Entity) -> String {
    normalize_body(e.text())
}

/// Removes duplicate detections: same label, same normalized text and IoU above 0.5.
///
/// The highest-confidence entity of each duplicate set survives (ties go to the
/// smallest id); survivors keep their input order.
pub fn dedupe_page(entities: Vec<Entity>) -> Vec<Entity> {
    let mut ranked: Vec<usize> = (0..entities.len()).collect();
    ranked.sort_by(|&i, &j| {
        entities[j]
            .confidence
            .total_cmp(&entities[i].confidence)
            .then_with(|| entities[i].id.cmp(&entities[j].id))
    });
    let keys: Vec<String> = entities.iter().map(dedupe_key).collect();

    let mut keep = vec![false; entities.len()];
    let mut kept: Vec<usize> = Vec::new();
    for i in ranked {
        let dup = kept.iter().any(|&k| {
            entities[k].label == entities[i].label
                && keys[k] == keys[i]
                && entities[k].bbox().iou(entities[i].bbox()) > 0.5
        });
        if dup {
            log::debug!("dropping duplicate detection {}", entities[i].id);
        } else {
            keep[i] = true;
            kept.push(i);
        }
    }
    entities
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

enum Block<'a> {
    Group(&'a Group),
    Single(&'a Entity),
}

/// Merges groups and ungrouped entities into the page reading order.
///
/// Blocks sort by top edge then left edge; groups expand in their internal
/// order. Page headers are pinned first and page footers last.
pub fn order_page_elements(
    groups: &[Group],
    non_group_entities: &[Entity],
    lookup: &IndexMap<String, Entity>,
) -> IndexMap<String, Entity> {
    let mut headers: Vec<&Entity> = Vec::new();
    let mut footers: Vec<&Entity> = Vec::new();
    let mut blocks: Vec<(f64, f64, String, Block)> = Vec::new();
    for e in non_group_entities {
        match e.label {
            ElementLabel::PageHeader => headers.push(e),
            ElementLabel::PageFooter => footers.push(e),
            _ => blocks.push((e.top(), e.left(), e.id.clone(), Block::Single(e))),
        }
    }
    for g in groups {
        let b = g.pixel_coordinates;
        blocks.push((b.top, b.left, g.ids[0].clone(), Block::Group(g)));
    }
    headers.sort_by(|a, b| reading_cmp(a, b));
    footers.sort_by(|a, b| reading_cmp(a, b));
    blocks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then_with(|| a.2.cmp(&b.2)));

    let mut out = IndexMap::new();
    let mut push = |e: &Entity| {
        out.insert(e.id.clone(), e.clone());
    };
    headers.into_iter().for_each(&mut push);
    for (_, _, _, block) in &blocks {
        match block {
            Block::Single(e) => push(e),
            Block::Group(g) => g.ids.iter().filter_map(|id| lookup.get(id)).for_each(&mut push),
        }
    }
    footers.into_iter().for_each(&mut push);
    out
}
