//! Cross-page header/footer relabelling.

use serde::{Deserialize, Serialize};

use crate::metrics::text::indel_distance;
use crate::model::{ElementLabel, PageResult, SchemaWeights};

use super::rebuild_page;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeaderFooterParams {
    /// A match needs a ratio strictly above this value.
    pub fuzzy_threshold: u32,
    pub header_top_limit: f64,
}

impl Default for HeaderFooterParams {
    fn default() -> Self {
        Self {
            fuzzy_threshold: 95,
            header_top_limit: 100.0,
        }
    }
}

/// Fraction of the page height treated as the header or footer band.
const BAND: f64 = 0.2;

/// Similarity in `[0, 100]` from the indel distance; two empty strings score 100.
pub fn fuzzy_ratio(a: &str, b: &str) -> u32 {
    let total = a.chars().count() + b.chars().count();
    if total == 0 {
        return 100;
    }
    let ratio = 1.0 - indel_distance(a, b) as f64 / total as f64;
    (100.0 * ratio).round() as u32
}

fn is_text_like(label: ElementLabel) -> bool {
    use ElementLabel::*;
    matches!(label, Title | Header | Section | Text | ListItem)
}

/// Relabels text that repeats a known header or footer from another page, then
/// swaps headers and footers that sit in the wrong band of the page.
pub fn correct_headers_footers(
    mut pages: Vec<PageResult>,
    params: &HeaderFooterParams,
    schema: &SchemaWeights,
) -> Vec<PageResult> {
    let mut changed_any = false;
    loop {
        let candidates: Vec<(u32, ElementLabel, String)> = pages
            .iter()
            .flat_map(|p| {
                p.elements
                    .values()
                    .filter(|e| e.label.is_page_furniture() && !e.text().trim().is_empty())
                    .map(move |e| (p.page_number, e.label, e.text().trim().to_string()))
            })
            .collect();
        if candidates.is_empty() {
            break;
        }

        let mut changed = false;
        for page in &mut pages {
            let number = page.page_number;
            for entity in page.elements.values_mut() {
                let text = entity.text().trim();
                if !is_text_like(entity.label) || text.is_empty() {
                    continue;
                }
                let matched = |target: ElementLabel| {
                    candidates.iter().any(|(p, label, cand)| {
                        *p != number && *label == target && fuzzy_ratio(text, cand) > params.fuzzy_threshold
                    })
                };
                let new_label = if matched(ElementLabel::PageHeader) {
                    Some(ElementLabel::PageHeader)
                } else if matched(ElementLabel::PageFooter) {
                    Some(ElementLabel::PageFooter)
                } else {
                    None
                };
                if let Some(label) = new_label {
                    entity.relabel(label, schema);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        changed_any = true;
    }

    for page in &mut pages {
        let height = page.effective_height();
        for entity in page.elements.values_mut() {
            let top = entity.top();
            let y = entity.y_center;
            let swap = match entity.label {
                ElementLabel::PageHeader if top > params.header_top_limit && y >= (1.0 - BAND) * height => {
                    Some(ElementLabel::PageFooter)
                }
                ElementLabel::PageFooter if top <= params.header_top_limit && y <= BAND * height => {
                    Some(ElementLabel::PageHeader)
                }
                _ => None,
            };
            if let Some(label) = swap {
                entity.relabel(label, schema);
                changed_any = true;
            }
        }
    }

    if changed_any {
        pages.into_iter().map(rebuild_page).collect()
    } else {
        pages
    }
}
