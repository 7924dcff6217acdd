//! Page assembly: layout-region grouping, deduplication, reading order and
//! header/footer correction.

pub mod cluster;
pub mod headers;
pub mod order;

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LayoutRegion;
use crate::model::{contains_midpoint, BBox, ElementLabel, Entity, Group, LayoutLabel, PageResult};

pub use cluster::{cluster_multi_column, dbscan, minmax_scale, ClusterLabel, ClusterParams};
pub use headers::{correct_headers_footers, fuzzy_ratio, HeaderFooterParams};
pub use order::{
    dedupe_page, line_angle, order_generic_group, order_page_elements, order_row_group, RowOrderParams,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssemblyParams {
    pub cluster: ClusterParams,
    pub row: RowOrderParams,
    pub header_footer: HeaderFooterParams,
}

fn excluded_from_groups(label: ElementLabel) -> bool {
    matches!(
        label,
        ElementLabel::PageHeader | ElementLabel::PageFooter | ElementLabel::TableOfContent
    )
}

/// Entities whose midpoint falls inside `layout_box`, minus page furniture and tables of content.
pub fn candidate_members<'a>(layout_box: &BBox, entities: &[&'a Entity]) -> Vec<&'a Entity> {
    entities
        .iter()
        .copied()
        .filter(|e| !excluded_from_groups(e.label) && contains_midpoint(layout_box, e.bbox()))
        .collect()
}

/// Claims entities for layout regions. Regions are visited by descending
/// confidence, then descending area; an entity belongs to the first region
/// that claims it. Returns the groups and the ids left ungrouped.
pub fn assign_groups(
    regions: &[LayoutRegion],
    entities: &[Entity],
    params: &AssemblyParams,
) -> (Vec<Group>, Vec<String>) {
    let mut regions: Vec<&LayoutRegion> = regions.iter().collect();
    regions.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then(b.bbox.area().total_cmp(&a.bbox.area()))
            .then(a.bbox.top.total_cmp(&b.bbox.top))
            .then(a.bbox.left.total_cmp(&b.bbox.left))
            .then(a.bbox.bottom.total_cmp(&b.bbox.bottom))
            .then(a.bbox.right.total_cmp(&b.bbox.right))
            .then(a.label.cmp(&b.label))
    });

    let mut claimed: HashSet<&str> = HashSet::new();
    let mut groups = Vec::new();
    for region in regions {
        let free: Vec<&Entity> = entities.iter().filter(|e| !claimed.contains(e.id.as_str())).collect();
        let members = candidate_members(&region.bbox, &free);
        if members.is_empty() {
            continue;
        }
        match region.label {
            LayoutLabel::MultiColumn => groups.extend(cluster_multi_column(&members, &params.cluster)),
            LayoutLabel::RowGroup => groups.extend(order_row_group(&members, &params.row)),
            LayoutLabel::Group | LayoutLabel::ColumnText | LayoutLabel::ColumnGroup | LayoutLabel::LayoutBox => {
                groups.extend(order_generic_group(&members))
            }
        }
        claimed.extend(members.iter().map(|e| e.id.as_str()));
    }
    let non_groups = entities
        .iter()
        .filter(|e| !claimed.contains(e.id.as_str()))
        .map(|e| e.id.clone())
        .collect();
    (groups, non_groups)
}

/// Builds a page from groups and non-group ids, deriving the reading order.
fn finalize_page(
    page_number: u32,
    groups: Vec<Group>,
    lookup: IndexMap<String, Entity>,
    non_group_ids: &[String],
    skipped_images: Vec<String>,
    page_height: Option<f64>,
) -> PageResult {
    let loose: Vec<Entity> = non_group_ids.iter().filter_map(|id| lookup.get(id).cloned()).collect();
    let elements = order_page_elements(&groups, &loose, &lookup);
    let position: HashMap<&str, usize> = elements.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect();

    let mut groups = groups;
    groups.sort_by_key(|g| position[g.ids[0].as_str()]);
    let mut non_groups = non_group_ids.to_vec();
    non_groups.sort_by_key(|id| position[id.as_str()]);

    PageResult {
        page_number,
        elements,
        groups,
        non_groups,
        skipped_images,
        page_height,
    }
}

/// Re-derives groups and reading order after labels changed.
pub(crate) fn rebuild_page(page: PageResult) -> PageResult {
    let PageResult {
        page_number,
        elements,
        groups,
        skipped_images,
        page_height,
        ..
    } = page;

    let mut grouped = HashSet::new();
    let groups: Vec<Group> = groups
        .into_iter()
        .filter_map(|g| {
            let members: Vec<&Entity> = g
                .ids
                .iter()
                .filter_map(|id| elements.get(id))
                .filter(|e| !excluded_from_groups(e.label))
                .collect();
            if members.len() == g.ids.len() {
                grouped.extend(g.ids.iter().cloned());
                return Some(g);
            }
            let rebuilt = Group::from_members(g.kind, &members).ok()?;
            grouped.extend(rebuilt.ids.iter().cloned());
            Some(rebuilt)
        })
        .collect();
    let non_groups: Vec<String> = elements.keys().filter(|id| !grouped.contains(*id)).cloned().collect();
    finalize_page(page_number, groups, elements, &non_groups, skipped_images, page_height)
}

/// Assembles one page from gated, enriched entities and its layout regions.
pub fn assemble_page(
    page_number: u32,
    regions: &[LayoutRegion],
    entities: Vec<Entity>,
    skipped_images: Vec<String>,
    page_height: Option<f64>,
    params: &AssemblyParams,
) -> Result<PageResult> {
    if page_number == 0 {
        return Err(Error::Validation("page_number must be positive".into()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = entities.iter().find(|e| !seen.insert(e.id.as_str())) {
        return Err(Error::Validation(format!("page {page_number}: duplicate entity id {}", dup.id)));
    }
    if let Some(id) = skipped_images.iter().find(|id| seen.contains(id.as_str())) {
        return Err(Error::Validation(format!("page {page_number}: skipped image {id} is also an element")));
    }

    let mut entities = entities;
    entities.sort_by(order::reading_cmp);
    let entities = dedupe_page(entities);

    let (groups, non_groups) = assign_groups(regions, &entities, params);
    let lookup: IndexMap<String, Entity> = entities.into_iter().map(|e| (e.id.clone(), e)).collect();
    let mut skipped_images = skipped_images;
    skipped_images.sort();
    Ok(finalize_page(page_number, groups, lookup, &non_groups, skipped_images, page_height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EntityValue, GroupKind, SchemaWeights};

    fn ent(id: &str, label: ElementLabel, b: [f64; 4]) -> Entity {
        Entity::new(id, label, 0.9, EntityValue::text(format!("text {id}")), BBox::from_ltrb(b).unwrap(), &SchemaWeights::default())
            .unwrap()
    }

    fn region(label: LayoutLabel, conf: f64, b: [f64; 4]) -> LayoutRegion {
        LayoutRegion {
            label,
            confidence: conf,
            bbox: BBox::from_ltrb(b).unwrap(),
        }
    }

    #[test]
    fn candidates_respect_midpoint_and_exclusions() {
        let boxed = BBox::from_ltrb([0., 0., 100., 100.]).unwrap();
        let header = ent("h", ElementLabel::PageHeader, [10., 10., 20., 20.]);
        let inside = ent("in", ElementLabel::Text, [10., 10., 20., 20.]);
        let corner = ent("corner", ElementLabel::Text, [90., 90., 200., 200.]);
        let toc = ent("toc", ElementLabel::TableOfContent, [10., 10., 20., 20.]);
        let got = candidate_members(&boxed, &[&header, &inside, &corner, &toc]);
        assert_eq!(got.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), ["in"]);
    }

    #[test]
    fn no_regions_means_no_groups() {
        let es = vec![ent("a", ElementLabel::Text, [0., 0., 1., 1.])];
        let (groups, rest) = assign_groups(&[], &es, &AssemblyParams::default());
        assert!(groups.is_empty());
        assert_eq!(rest, ["a"]);
    }

    #[test]
    fn overlapping_regions_claim_once() {
        let es = vec![ent("a", ElementLabel::Text, [10., 10., 20., 20.]), ent("b", ElementLabel::Text, [60., 60., 70., 70.])];
        let regions = [
            region(LayoutLabel::Group, 0.5, [0., 0., 100., 100.]),
            region(LayoutLabel::RowGroup, 0.9, [0., 0., 50., 50.]),
        ];
        let (groups, rest) = assign_groups(&regions, &es, &AssemblyParams::default());
        assert!(rest.is_empty());
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].kind, GroupKind::Row);
        assert_eq!(groups[0].ids, ["a"]);
        assert_eq!(groups[1].ids, ["b"]);
    }

    #[test]
    fn multi_column_region_gives_two_groups() {
        let es = vec![
            ent("l1", ElementLabel::Text, [50., 100., 250., 150.]),
            ent("l2", ElementLabel::Text, [50., 200., 250., 250.]),
            ent("r1", ElementLabel::Text, [350., 100., 550., 150.]),
            ent("r2", ElementLabel::Text, [350., 200., 550., 250.]),
        ];
        let regions = [region(LayoutLabel::MultiColumn, 0.9, [0., 0., 600., 300.])];
        let (groups, rest) = assign_groups(&regions, &es, &AssemblyParams::default());
        assert!(rest.is_empty());
        assert_eq!(groups.len(), 2);
    }

    #[test]
    fn empty_page() {
        let page = assemble_page(3, &[], vec![], vec![], None, &AssemblyParams::default()).unwrap();
        assert_eq!(page.page_number, 3);
        assert!(page.elements.is_empty() && page.groups.is_empty() && page.non_groups.is_empty());
    }

    #[test]
    fn duplicate_ids_fail_the_page() {
        let es = vec![ent("a", ElementLabel::Text, [0., 0., 1., 1.]), ent("a", ElementLabel::Text, [5., 5., 6., 6.])];
        assert!(assemble_page(1, &[], es, vec![], None, &AssemblyParams::default()).is_err());
    }

    #[test]
    fn relabelled_member_leaves_its_group() {
        let es = vec![ent("a", ElementLabel::Text, [0., 0., 10., 10.]), ent("b", ElementLabel::Text, [0., 20., 10., 30.])];
        let regions = [region(LayoutLabel::Group, 0.9, [0., 0., 50., 50.])];
        let mut page = assemble_page(1, &regions, es, vec![], None, &AssemblyParams::default()).unwrap();
        page.elements["a"].relabel(ElementLabel::PageHeader, &SchemaWeights::default());
        let page = rebuild_page(page);
        page.validate(&SchemaWeights::default()).unwrap();
        assert_eq!(page.groups[0].ids, ["b"]);
        assert_eq!(page.non_groups, ["a"]);
    }
}
