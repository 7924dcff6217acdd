use crate::dpbench::{DpBenchDocument, DpBenchElement, DpBenchFile, DpContent};
use crate::metrics::table::rows_to_html;
use crate::model::{DocumentResult, ElementLabel, Entity};

pub fn category_for(label: ElementLabel) -> &'static str {
    match label {
        ElementLabel::PageHeader => "Header",
        ElementLabel::PageFooter => "Footer",
        ElementLabel::Text | ElementLabel::TableOfContent => "Paragraph",
        ElementLabel::Title | ElementLabel::Section | ElementLabel::Header => "Heading1",
        ElementLabel::ListItem => "List",
        ElementLabel::TableCaption | ElementLabel::ImageCaption => "Caption",
        ElementLabel::Image => "Figure",
        ElementLabel::Table => "Table",
    }
}

fn convert(e: &Entity, page: u32, id: u64) -> DpBenchElement {
    let html = match e.label {
        ElementLabel::Table => e.value.data.as_deref().filter(|d| !d.is_empty()).map(rows_to_html),
        _ => None,
    };
    DpBenchElement {
        category: category_for(e.label).to_string(),
        coordinates: DpBenchElement::polygon(e.bbox()),
        id,
        page,
        content: DpContent { text: e.value.text.trim().to_string(), html, markdown: None },
    }
}

/// Elements in reading order with sequential ids from 0.
pub fn to_dpbench(doc: &DocumentResult) -> Vec<DpBenchElement> {
    doc.entities()
        .enumerate()
        .map(|(i, (page, e))| convert(e, page, i as u64))
        .collect()
}

/// Single-document prediction file keyed by the source file name.
pub fn to_dpbench_file(doc: &DocumentResult) -> DpBenchFile {
    DpBenchFile::from([(doc.filename.clone(), DpBenchDocument { elements: to_dpbench(doc) })])
}
