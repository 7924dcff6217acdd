use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::hash::content_hash;
use crate::model::{DocumentResult, ElementLabel, Entity, PageResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkKind {
    Page,
    HeaderBlock,
    Element,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkMetadata {
    pub page_number: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element_type: Option<ElementLabel>,
    pub token_count: usize,
    pub filename: String,
    pub document_category: String,
    pub chunk_kind: ChunkKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub page_content: String,
    pub metadata: ChunkMetadata,
}

fn text_of(e: &Entity) -> &str {
    e.value.content().trim()
}

fn page_text(page: &PageResult) -> String {
    page.elements
        .values()
        .map(text_of)
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Title/section entities with the text and list items that follow them.
fn header_blocks(page: &PageResult) -> Vec<(ElementLabel, String)> {
    let mut blocks: Vec<(ElementLabel, Vec<&str>)> = Vec::new();
    for e in page.elements.values() {
        match e.label {
            ElementLabel::Title | ElementLabel::Section => blocks.push((e.label, vec![text_of(e)])),
            ElementLabel::Text | ElementLabel::ListItem => {
                if let Some((_, parts)) = blocks.last_mut() {
                    parts.push(text_of(e));
                }
            }
            _ => {}
        }
    }
    blocks
        .into_iter()
        .map(|(label, parts)| {
            let parts: Vec<&str> = parts.into_iter().filter(|p| !p.is_empty()).collect();
            (label, parts.join("\n"))
        })
        .collect()
}

/// Page chunks, then header blocks, then per-element chunks, with duplicate
/// contents removed (first occurrence wins).
pub fn to_chunks(doc: &DocumentResult) -> Vec<Chunk> {
    let make = |page: u32, element_type: Option<ElementLabel>, kind: ChunkKind, content: String| Chunk {
        metadata: ChunkMetadata {
            page_number: page,
            element_type,
            token_count: content.split_whitespace().count(),
            filename: doc.filename.clone(),
            document_category: doc.document_category.clone(),
            chunk_kind: kind,
        },
        page_content: content,
    };
    let mut all = Vec::new();
    for p in &doc.pages {
        all.push(make(p.page_number, None, ChunkKind::Page, page_text(p)));
    }
    for p in &doc.pages {
        for (label, content) in header_blocks(p) {
            all.push(make(p.page_number, Some(label), ChunkKind::HeaderBlock, content));
        }
    }
    for p in &doc.pages {
        for e in p.elements.values() {
            all.push(make(p.page_number, Some(e.label), ChunkKind::Element, text_of(e).to_string()));
        }
    }
    let mut seen = HashSet::new();
    all.into_iter()
        .filter(|c| !c.page_content.trim().is_empty() && seen.insert(content_hash(&c.page_content)))
        .collect()
}

/// One JSON record per line.
pub fn chunks_to_ndjson(chunks: &[Chunk]) -> String {
    chunks
        .iter()
        .map(|c| serde_json::to_string(c).expect("chunk serializes") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BBox, EntityValue, SchemaWeights};

    fn entity(id: &str, label: ElementLabel, text: &str, top: f64) -> Entity {
        let bbox = BBox::new(0.0, top, 100.0, top + 10.0).unwrap();
        Entity::new(id, label, 0.9, EntityValue::text(text), bbox, &SchemaWeights::default()).unwrap()
    }

    fn doc(es: Vec<Entity>) -> DocumentResult {
        let mut p = PageResult::empty(1);
        for e in es {
            p.non_groups.push(e.id.clone());
            p.elements.insert(e.id.clone(), e);
        }
        DocumentResult {
            filename: "f.pdf".into(),
            total_pages: 1,
            total_processed_pages: 1,
            total_failed_pages: 0,
            total_llm_calls: 0,
            metadata: Default::default(),
            document_category: "report".into(),
            pages: vec![p],
        }
    }

    #[test]
    fn single_text_dedupes_to_one() {
        let chunks = to_chunks(&doc(vec![entity("a", ElementLabel::Text, "only text", 0.0)]));
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].metadata.chunk_kind, ChunkKind::Page);
        assert_eq!(chunks[0].metadata.token_count, 2);
    }

    #[test]
    fn header_block_collects_following_text() {
        let d = doc(vec![
            entity("s", ElementLabel::Section, "Intro", 0.0),
            entity("t1", ElementLabel::Text, "first", 20.0),
            entity("t2", ElementLabel::Text, "second", 40.0),
            entity("f", ElementLabel::PageFooter, "1", 90.0),
        ]);
        let chunks = to_chunks(&d);
        let block = chunks.iter().find(|c| c.metadata.chunk_kind == ChunkKind::HeaderBlock).unwrap();
        assert_eq!(block.page_content, "Intro\nfirst\nsecond");
        assert_eq!(chunks[0].page_content, "Intro\nfirst\nsecond\n1");
        let hashes: HashSet<u64> = chunks.iter().map(|c| content_hash(&c.page_content)).collect();
        assert_eq!(hashes.len(), chunks.len());
    }

    #[test]
    fn empty_document() {
        let mut d = doc(vec![]);
        d.pages.clear();
        assert!(to_chunks(&d).is_empty());
        assert_eq!(chunks_to_ndjson(&[]), "");
    }
}
