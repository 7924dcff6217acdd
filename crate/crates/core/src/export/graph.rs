use serde::{Deserialize, Serialize};

use crate::model::DocumentResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Root,
    Page,
    Element,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeRelation {
    #[serde(rename = "contains")]
    Contains,
    #[serde(rename = "sibling")]
    Sibling,
    #[serde(rename = "parent-child")]
    ParentChild,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub relation: EdgeRelation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

pub const ROOT_ID: &str = "root";

pub fn page_node_id(page_number: u32) -> String {
    format!("page-{page_number}")
}

/// Root, page and element nodes linked in reading order.
///
/// Consecutive elements of equal weight are siblings; otherwise the lighter
/// one is the parent.
pub fn to_graph(doc: &DocumentResult) -> Graph {
    let mut nodes = vec![GraphNode {
        id: ROOT_ID.into(),
        kind: NodeKind::Root,
        label: doc.filename.clone(),
        weight: None,
    }];
    let mut edges = Vec::new();
    for page in &doc.pages {
        let page_id = page_node_id(page.page_number);
        nodes.push(GraphNode {
            id: page_id.clone(),
            kind: NodeKind::Page,
            label: format!("page {}", page.page_number),
            weight: None,
        });
        edges.push(GraphEdge { from: ROOT_ID.into(), to: page_id.clone(), relation: EdgeRelation::Contains });
        let elements: Vec<_> = page.elements.values().collect();
        if let Some(first) = elements.first() {
            edges.push(GraphEdge { from: page_id, to: first.id.clone(), relation: EdgeRelation::Contains });
        }
        for e in &elements {
            nodes.push(GraphNode {
                id: e.id.clone(),
                kind: NodeKind::Element,
                label: e.label.to_string(),
                weight: Some(e.weight),
            });
        }
        for pair in elements.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let edge = if a.weight == b.weight {
                GraphEdge { from: a.id.clone(), to: b.id.clone(), relation: EdgeRelation::Sibling }
            } else {
                let (parent, child) = if a.weight < b.weight { (a, b) } else { (b, a) };
                GraphEdge { from: parent.id.clone(), to: child.id.clone(), relation: EdgeRelation::ParentChild }
            };
            edges.push(edge);
        }
    }
    Graph { nodes, edges }
}
