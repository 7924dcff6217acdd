//! Table HTML to ordered labeled tree.
//!
//! Only the table skeleton is kept: `table`, `thead`, `tbody`, `tr` and `td`
//! (`th` becomes `td`, `tfoot` becomes `tbody`). Any other markup inside a
//! cell contributes its character data to the cell text.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableTree {
    pub tag: String,
    #[serde(default)]
    pub text: String,
    #[serde(default = "one")]
    pub colspan: u32,
    #[serde(default = "one")]
    pub rowspan: u32,
    #[serde(default)]
    pub children: Vec<TableTree>,
}

fn one() -> u32 {
    1
}

impl TableTree {
    pub fn node(tag: &str) -> Self {
        Self {
            tag: tag.to_string(),
            text: String::new(),
            colspan: 1,
            rowspan: 1,
            children: Vec::new(),
        }
    }

    pub fn cell(text: &str) -> Self {
        Self {
            text: text.to_string(),
            ..Self::node("td")
        }
    }

    pub fn with_children(mut self, children: Vec<TableTree>) -> Self {
        self.children = children;
        self
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TableTree::size).sum::<usize>()
    }

    /// Copy with every cell text emptied; spans are kept.
    pub fn structure_only(&self) -> Self {
        Self {
            tag: self.tag.clone(),
            text: String::new(),
            colspan: self.colspan,
            rowspan: self.rowspan,
            children: self.children.iter().map(TableTree::structure_only).collect(),
        }
    }
}

#[derive(Debug)]
enum Token {
    Open { name: String, attrs: Vec<(String, String)> },
    Close(String),
    Text(String),
}

fn tokenize(html: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut rest = html;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix("<!--") {
            rest = after.find("-->").map_or("", |i| &after[i + 3..]);
            continue;
        }
        if rest.starts_with('<') {
            let end = tag_end(rest);
            let inner = rest[1..end].strip_suffix('>').unwrap_or(&rest[1..end]);
            rest = &rest[end..];
            if let Some(tok) = parse_tag(inner) {
                tokens.push(tok);
            }
            continue;
        }
        let next = rest.find('<').unwrap_or(rest.len());
        tokens.push(Token::Text(decode_entities(&rest[..next])));
        rest = &rest[next..];
    }
    tokens
}

/// Byte offset just past the `>` closing the tag at the start of `s`, honouring quotes.
fn tag_end(s: &str) -> usize {
    let mut quote = None;
    for (i, c) in s.char_indices().skip(1) {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (None, '"' | '\'') => quote = Some(c),
            (None, '>') => return i + 1,
            _ => {}
        }
    }
    s.len()
}

fn parse_tag(inner: &str) -> Option<Token> {
    let inner = inner.trim().trim_end_matches('/');
    if inner.starts_with('!') || inner.starts_with('?') {
        return None;
    }
    if let Some(name) = inner.strip_prefix('/') {
        return Some(Token::Close(name.trim().to_ascii_lowercase()));
    }
    let name_end = inner.find(|c: char| c.is_whitespace()).unwrap_or(inner.len());
    let name = inner[..name_end].to_ascii_lowercase();
    if name.is_empty() {
        return None;
    }
    Some(Token::Open {
        name,
        attrs: parse_attrs(&inner[name_end..]),
    })
}

fn parse_attrs(mut s: &str) -> Vec<(String, String)> {
    let mut attrs = Vec::new();
    loop {
        s = s.trim_start();
        if s.is_empty() {
            return attrs;
        }
        let key_end = s.find(|c: char| c == '=' || c.is_whitespace()).unwrap_or(s.len());
        let key = s[..key_end].to_ascii_lowercase();
        s = s[key_end..].trim_start();
        let value = if let Some(after) = s.strip_prefix('=') {
            let after = after.trim_start();
            match after.chars().next() {
                Some(q @ ('"' | '\'')) => {
                    let body = &after[1..];
                    let close = body.find(q).unwrap_or(body.len());
                    s = body.get(close + 1..).unwrap_or("");
                    body[..close].to_string()
                }
                _ => {
                    let end = after.find(char::is_whitespace).unwrap_or(after.len());
                    s = &after[end..];
                    after[..end].to_string()
                }
            }
        } else {
            String::new()
        };
        if key.is_empty() {
            // Stray `=` or similar; skip one char to guarantee progress.
            s = s.get(1..).unwrap_or("");
            continue;
        }
        attrs.push((key, decode_entities(&value)));
    }
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let semi = rest.find(';').filter(|&i| i <= 10);
        let decoded = semi.and_then(|i| {
            let name = &rest[1..i];
            let c = match name {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some('\u{00A0}'),
                _ => name
                    .strip_prefix("#x")
                    .or_else(|| name.strip_prefix("#X"))
                    .and_then(|h| u32::from_str_radix(h, 16).ok())
                    .or_else(|| name.strip_prefix('#').and_then(|d| d.parse().ok()))
                    .and_then(char::from_u32),
            };
            c.map(|c| (c, i + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn span(attrs: &[(String, String)], key: &str) -> u32 {
    match attrs.iter().find(|(k, _)| k == key) {
        None => 1,
        Some((_, v)) => match v.trim().parse::<u32>() {
            Ok(n) if n >= 1 => n,
            _ => {
                warn!("invalid {key} value {v:?}; using 1");
                1
            }
        },
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Default)]
struct Builder {
    root: Option<TableTree>,
    section: Option<TableTree>,
    row: Option<TableTree>,
    cell: Option<(TableTree, String)>,
}

impl Builder {
    fn close_cell(&mut self) {
        if let Some((mut cell, text)) = self.cell.take() {
            cell.text = collapse_ws(&text);
            self.row.get_or_insert_with(|| TableTree::node("tr")).children.push(cell);
        }
    }

    fn close_row(&mut self) {
        self.close_cell();
        if let Some(row) = self.row.take() {
            match self.section.as_mut() {
                Some(section) => section.children.push(row),
                None => self.root_mut().children.push(row),
            }
        }
    }

    fn close_section(&mut self) {
        self.close_row();
        if let Some(section) = self.section.take() {
            self.root_mut().children.push(section);
        }
    }

    fn root_mut(&mut self) -> &mut TableTree {
        self.root.get_or_insert_with(|| TableTree::node("table"))
    }
}

/// Parses the first `<table>` in `html` into a tree, repairing unclosed rows and cells.
pub fn parse_table_html(html: &str) -> Result<TableTree> {
    let mut b = Builder::default();
    let mut nested = 0usize;
    let mut started = false;

    for token in tokenize(html) {
        if !started {
            if matches!(&token, Token::Open { name, .. } if name == "table") {
                started = true;
                b.root = Some(TableTree::node("table"));
            }
            continue;
        }
        if nested > 0 {
            match &token {
                Token::Open { name, .. } if name == "table" => nested += 1,
                Token::Close(name) if name == "table" => nested -= 1,
                Token::Text(t) => {
                    if let Some((_, text)) = b.cell.as_mut() {
                        text.push_str(t);
                    }
                }
                _ => {}
            }
            continue;
        }
        match token {
            Token::Open { name, attrs } => match name.as_str() {
                "table" if b.cell.is_some() => nested += 1,
                "thead" | "tbody" | "tfoot" => {
                    b.close_section();
                    let tag = if name == "thead" { "thead" } else { "tbody" };
                    b.section = Some(TableTree::node(tag));
                }
                "tr" => {
                    b.close_row();
                    b.row = Some(TableTree::node("tr"));
                }
                "td" | "th" => {
                    b.close_cell();
                    let cell = TableTree {
                        colspan: span(&attrs, "colspan"),
                        rowspan: span(&attrs, "rowspan"),
                        ..TableTree::node("td")
                    };
                    b.cell = Some((cell, String::new()));
                }
                "br" => {
                    if let Some((_, text)) = b.cell.as_mut() {
                        text.push(' ');
                    }
                }
                _ => {}
            },
            Token::Close(name) => match name.as_str() {
                "td" | "th" => b.close_cell(),
                "tr" => b.close_row(),
                "thead" | "tbody" | "tfoot" => b.close_section(),
                "table" => break,
                _ => {}
            },
            Token::Text(t) => {
                if let Some((_, text)) = b.cell.as_mut() {
                    text.push_str(&t);
                }
            }
        }
    }
    if !started {
        return Err(Error::NoTable);
    }
    b.close_section();
    Ok(b.root.take().unwrap_or_else(|| TableTree::node("table")))
}

/// Renders record rows as a simple HTML table with a header row.
pub fn rows_to_html(rows: &[crate::model::Row]) -> String {
    let esc = |s: &str| s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    let mut html = String::from("<table>");
    if let Some(first) = rows.first() {
        html.push_str("<thead><tr>");
        for key in first.keys() {
            html.push_str(&format!("<th>{}</th>", esc(key)));
        }
        html.push_str("</tr></thead><tbody>");
        for row in rows {
            html.push_str("<tr>");
            for cell in row.values() {
                html.push_str(&format!("<td>{}</td>", esc(cell)));
            }
            html.push_str("</tr>");
        }
        html.push_str("</tbody>");
    }
    html.push_str("</table>");
    html
}
