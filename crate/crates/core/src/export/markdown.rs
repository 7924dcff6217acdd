use crate::ingest::normalize::BULLET_GLYPHS;
use crate::model::{DocumentResult, ElementLabel, Entity, Row};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MarkdownOptions {
    pub skip_headers_footers: bool,
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn escape_cell(s: &str) -> String {
    one_line(s).replace('|', "\\|")
}

fn pipe_table(rows: &[Row]) -> Option<String> {
    let first = rows.first()?;
    if first.is_empty() {
        return None;
    }
    let line = |cells: Vec<String>| format!("| {} |", cells.join(" | "));
    let mut out = vec![
        line(first.keys().map(|k| escape_cell(k)).collect()),
        line(first.keys().map(|_| "---".to_string()).collect()),
    ];
    for row in rows {
        out.push(line(row.values().map(|v| escape_cell(v)).collect()));
    }
    Some(out.join("\n"))
}

/// Strips a leading list marker: a bullet glyph, `-`, `*`, or `1.`/`1)`.
fn strip_marker(item: &str) -> &str {
    let item = item.trim();
    if let Some(rest) = item.strip_prefix(|c: char| BULLET_GLYPHS.contains(&c)) {
        return rest.trim_start();
    }
    for m in ["- ", "* "] {
        if let Some(rest) = item.strip_prefix(m) {
            return rest.trim_start();
        }
    }
    let digits = item.len() - item.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 {
        let rest = &item[digits..];
        if let Some(after) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
            if after.is_empty() || after.starts_with(char::is_whitespace) {
                return after.trim_start();
            }
        }
    }
    item
}

/// Splits list text into items.
///
/// Lines are split first, then each line on inline bullet glyphs.
pub fn extract_list_items(text: &str) -> Vec<String> {
    text.lines()
        .flat_map(|line| line.split(|c: char| BULLET_GLYPHS.contains(&c)))
        .map(|piece| strip_marker(piece).trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn render(e: &Entity, opts: MarkdownOptions) -> Option<String> {
    let text = e.text().trim();
    let block = match e.label {
        ElementLabel::Title => format!("## {}", one_line(text)),
        ElementLabel::Section | ElementLabel::Header => format!("### {}", one_line(text)),
        ElementLabel::ListItem => {
            let items = extract_list_items(text);
            if items.is_empty() {
                return None;
            }
            items.iter().map(|i| format!("- {i}")).collect::<Vec<_>>().join("\n")
        }
        ElementLabel::Table => {
            let mut parts = Vec::new();
            if let Some(t) = e.value.title.as_deref().filter(|t| !t.trim().is_empty()) {
                parts.push(format!("**{}**", one_line(t)));
            }
            if let Some(s) = e.value.summary.as_deref().filter(|s| !s.trim().is_empty()) {
                parts.push(format!("*{}*", one_line(s)));
            }
            match e.value.data.as_deref().and_then(pipe_table) {
                Some(t) => parts.push(t),
                None if !text.is_empty() => parts.push(text.to_string()),
                None => {}
            }
            parts.join("\n\n")
        }
        ElementLabel::Image => {
            let title = e.value.title.as_deref().map(one_line).unwrap_or_default();
            let mut block = format!("![{title}]({})", e.id);
            if let Some(s) = e.value.summary.as_deref().filter(|s| !s.trim().is_empty()) {
                block.push_str("\n\n");
                block.push_str(s.trim());
            }
            block
        }
        ElementLabel::PageHeader | ElementLabel::PageFooter => {
            if opts.skip_headers_footers {
                return None;
            }
            format!("> [{}] {}", e.label, one_line(text))
        }
        _ => text.to_string(),
    };
    let trimmed = block.trim();
    (!trimmed.is_empty() && trimmed != "##" && trimmed != "###").then_some(block)
}

/// Renders the document as Markdown, one horizontal rule between pages.
pub fn to_markdown(doc: &DocumentResult, opts: MarkdownOptions) -> String {
    let pages: Vec<String> = doc
        .pages
        .iter()
        .map(|p| {
            p.elements
                .values()
                .filter_map(|e| render(e, opts))
                .collect::<Vec<_>>()
                .join("\n\n")
        })
        .collect();
    let mut out = pages.join("\n\n---\n\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
