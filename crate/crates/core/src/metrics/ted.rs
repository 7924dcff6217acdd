//! Zhang–Shasha ordered tree edit distance and the TEDS similarity scores.

use super::table::TableTree;
use super::text::normalized_levenshtein;

/// Relabel cost between two table nodes.
///
/// Differing tags or spans cost 1; two cells with equal spans cost the
/// normalized Levenshtein distance of their texts; anything else is free.
pub fn relabel_cost(a: &TableTree, b: &TableTree) -> f64 {
    if a.tag != b.tag || a.colspan != b.colspan || a.rowspan != b.rowspan {
        1.0
    } else if a.tag == "td" {
        normalized_levenshtein(&a.text, &b.text)
    } else {
        0.0
    }
}

/// Post-order flattening with left-most leaf descendants and keyroots.
struct Indexed<'a> {
    nodes: Vec<&'a TableTree>,
    lmd: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Indexed<'a> {
    fn new(root: &'a TableTree) -> Self {
        let mut nodes = Vec::new();
        let mut lmd = Vec::new();
        fn walk<'a>(t: &'a TableTree, nodes: &mut Vec<&'a TableTree>, lmd: &mut Vec<usize>) -> usize {
            let mut leftmost = None;
            for child in &t.children {
                let l = walk(child, nodes, lmd);
                leftmost.get_or_insert(l);
            }
            let idx = nodes.len();
            nodes.push(t);
            lmd.push(leftmost.unwrap_or(idx));
            lmd[idx]
        }
        walk(root, &mut nodes, &mut lmd);

        // A keyroot is the highest-numbered node for its left-most leaf.
        let mut last_for_lmd = std::collections::BTreeMap::new();
        for (i, l) in lmd.iter().enumerate() {
            last_for_lmd.insert(*l, i);
        }
        let mut keyroots: Vec<usize> = last_for_lmd.into_values().collect();
        keyroots.sort_unstable();
        Self { nodes, lmd, keyroots }
    }
}

/// Ordered tree edit distance with unit insert/delete and [`relabel_cost`].
pub fn tree_edit_distance(a: &TableTree, b: &TableTree) -> f64 {
    let ta = Indexed::new(a);
    let tb = Indexed::new(b);
    let (n, m) = (ta.nodes.len(), tb.nodes.len());
    let mut treedist = vec![vec![0.0f64; m]; n];
    let mut forest = vec![vec![0.0f64; m + 1]; n + 1];

    for &i in &ta.keyroots {
        for &j in &tb.keyroots {
            let (li, lj) = (ta.lmd[i], tb.lmd[j]);
            let rows = i - li + 2;
            let cols = j - lj + 2;
            forest[0][0] = 0.0;
            for x in 1..rows {
                forest[x][0] = forest[x - 1][0] + 1.0;
            }
            for y in 1..cols {
                forest[0][y] = forest[0][y - 1] + 1.0;
            }
            for x in 1..rows {
                let node_a = li + x - 1;
                for y in 1..cols {
                    let node_b = lj + y - 1;
                    let delete = forest[x - 1][y] + 1.0;
                    let insert = forest[x][y - 1] + 1.0;
                    if ta.lmd[node_a] == li && tb.lmd[node_b] == lj {
                        let relabel = forest[x - 1][y - 1] + relabel_cost(ta.nodes[node_a], tb.nodes[node_b]);
                        let d = delete.min(insert).min(relabel);
                        forest[x][y] = d;
                        treedist[node_a][node_b] = d;
                    } else {
                        let px = ta.lmd[node_a] - li;
                        let py = tb.lmd[node_b] - lj;
                        let subtree = forest[px][py] + treedist[node_a][node_b];
                        forest[x][y] = delete.min(insert).min(subtree);
                    }
                }
            }
        }
    }
    treedist[n - 1][m - 1]
}

/// `1 - distance / max(|a|, |b|)`, floored at 0.
pub fn teds(a: &TableTree, b: &TableTree) -> f64 {
    let size = a.size().max(b.size()) as f64;
    (1.0 - tree_edit_distance(a, b) / size).max(0.0)
}

/// TEDS on structure-only copies of both trees.
pub fn teds_s(a: &TableTree, b: &TableTree) -> f64 {
    teds(&a.structure_only(), &b.structure_only())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(tag: &str, children: Vec<TableTree>) -> TableTree {
        TableTree::node(tag).with_children(children)
    }

    fn table(rows: Vec<Vec<&str>>) -> TableTree {
        n(
            "table",
            rows.into_iter()
                .map(|r| n("tr", r.into_iter().map(TableTree::cell).collect()))
                .collect(),
        )
    }

    #[test]
    fn identical_trees() {
        let t = table(vec![vec!["a", "b"], vec!["c", "d"]]);
        assert_eq!(tree_edit_distance(&t, &t), 0.0);
        assert_eq!(teds(&t, &t), 1.0);
        assert_eq!(teds_s(&t, &t), 1.0);
    }

    #[test]
    fn single_cell_relabel() {
        let a = table(vec![vec!["ab"]]);
        let b = table(vec![vec!["ad"]]);
        assert_eq!(tree_edit_distance(&a, &b), 0.5);
    }

    #[test]
    fn extra_row_costs_its_subtree() {
        let one = table(vec![vec!["x"]]);
        let two = table(vec![vec!["x"], vec!["x"]]);
        assert_eq!(tree_edit_distance(&one, &two), 2.0);
        assert_eq!(tree_edit_distance(&two, &one), 2.0);
        assert_eq!(teds(&one, &two), 1.0 - 2.0 / 5.0);
    }

    #[test]
    fn small_tree_examples() {
        let root = TableTree::node("table");
        let two = n("table", vec![TableTree::node("tr")]);
        assert_eq!(teds(&two, &root), 0.5);
        assert_eq!(teds(&TableTree::node("thead"), &TableTree::node("tbody")), 0.0);
    }

    #[test]
    fn span_mismatch_costs_one() {
        let a = n("table", vec![n("tr", vec![TableTree { colspan: 2, ..TableTree::cell("x") }])]);
        let b = table(vec![vec!["x"]]);
        assert_eq!(tree_edit_distance(&a, &b), 1.0);
    }

    #[test]
    fn structure_only_ignores_text() {
        let a = table(vec![vec!["alpha", "beta"]]);
        let b = table(vec![vec!["gamma", "delta"]]);
        assert!(teds(&a, &b) < 1.0);
        assert_eq!(teds_s(&a, &b), 1.0);
    }
}
