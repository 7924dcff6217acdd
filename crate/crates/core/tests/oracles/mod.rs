//! Slow, direct reference implementations used to cross-check the library.
#![allow(dead_code)]

use std::collections::HashMap;

use layoutkit::assembly::ClusterLabel;
use layoutkit::metrics::TableTree;
use rand::Rng;

/// Insert/delete-only edit distance by its defining recurrence.
pub fn indel_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            d[i][j] = if i == 0 {
                j
            } else if j == 0 {
                i
            } else {
                let mut best = (d[i - 1][j] + 1).min(d[i][j - 1] + 1);
                if a[i - 1] == b[j - 1] {
                    best = best.min(d[i - 1][j - 1]);
                }
                best
            };
        }
    }
    d[a.len()][b.len()]
}

fn levenshtein_oracle(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut diag = row[0];
        row[0] = i;
        for j in 1..=b.len() {
            let up = row[j];
            row[j] = (row[j] + 1).min(row[j - 1] + 1).min(diag + usize::from(a[i - 1] != b[j - 1]));
            diag = up;
        }
    }
    row[b.len()]
}

fn relabel_oracle(a: &TableTree, b: &TableTree) -> f64 {
    if (&a.tag, a.colspan, a.rowspan) != (&b.tag, b.colspan, b.rowspan) {
        return 1.0;
    }
    if a.tag != "td" {
        return 0.0;
    }
    let (x, y): (Vec<char>, Vec<char>) = (a.text.chars().collect(), b.text.chars().collect());
    let longest = x.len().max(y.len());
    if longest == 0 {
        0.0
    } else {
        levenshtein_oracle(&x, &y) as f64 / longest as f64
    }
}

type Forest = Vec<TableTree>;

fn forest_size(f: &Forest) -> usize {
    f.iter().map(TableTree::size).sum()
}

fn key(f: &Forest, g: &Forest) -> String {
    serde_json::to_string(&(f, g)).unwrap()
}

/// Forest edit distance by the textbook rightmost-root recursion, memoized on
/// the serialized forests.
fn forest_distance(f: &Forest, g: &Forest, memo: &mut HashMap<String, f64>) -> f64 {
    if f.is_empty() {
        return forest_size(g) as f64;
    }
    if g.is_empty() {
        return forest_size(f) as f64;
    }
    let k = key(f, g);
    if let Some(&d) = memo.get(&k) {
        return d;
    }
    let v = f.last().unwrap();
    let w = g.last().unwrap();

    let mut f_minus_v = f[..f.len() - 1].to_vec();
    f_minus_v.extend(v.children.iter().cloned());
    let mut g_minus_w = g[..g.len() - 1].to_vec();
    g_minus_w.extend(w.children.iter().cloned());
    let f_rest = f[..f.len() - 1].to_vec();
    let g_rest = g[..g.len() - 1].to_vec();

    let delete = forest_distance(&f_minus_v, g, memo) + 1.0;
    let insert = forest_distance(f, &g_minus_w, memo) + 1.0;
    let matched = forest_distance(&v.children, &w.children, memo)
        + forest_distance(&f_rest, &g_rest, memo)
        + relabel_oracle(v, w);
    let d = delete.min(insert).min(matched);
    memo.insert(k, d);
    d
}

pub fn ted_oracle(a: &TableTree, b: &TableTree) -> f64 {
    forest_distance(&vec![a.clone()], &vec![b.clone()], &mut HashMap::new())
}

/// Core points by brute-force neighbor counts, clusters as connected components
/// of core points numbered by their lowest index, border points attached to
/// the lowest-numbered adjacent cluster.
pub fn dbscan_oracle(points: &[f64], eps: f64, min_samples: usize) -> Vec<ClusterLabel> {
    let n = points.len();
    let adj = |i: usize, j: usize| (points[i] - points[j]).abs() <= eps;
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| adj(i, j)).count() >= min_samples).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for i in 0..n {
        for j in 0..n {
            if core[i] && core[j] && adj(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut number: HashMap<usize, usize> = HashMap::new();
    for (i, &is_core) in core.iter().enumerate() {
        if is_core {
            let r = find(&mut parent, i);
            let next = number.len();
            number.entry(r).or_insert(next);
        }
    }
    (0..n)
        .map(|i| {
            if core[i] {
                ClusterLabel::Cluster(number[&find(&mut parent, i)])
            } else {
                (0..n)
                    .filter(|&j| core[j] && adj(i, j))
                    .map(|j| number[&find(&mut parent, j)])
                    .min()
                    .map_or(ClusterLabel::Noise, ClusterLabel::Cluster)
            }
        })
        .collect()
}

/// Random labeled tree with exactly `n` nodes, built by attaching each node to
/// a uniformly chosen earlier node.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> TableTree {
    const TAGS: [&str; 5] = ["table", "thead", "tbody", "tr", "td"];
    const TEXTS: [&str; 6] = ["", "a", "ab", "ba", "abc", "x"];
    let mut nodes: Vec<(Option<usize>, TableTree)> = Vec::new();
    for i in 0..n {
        let mut t = TableTree::node(TAGS[rng.gen_range(0..TAGS.len())]);
        if t.tag == "td" {
            t.text = TEXTS[rng.gen_range(0..TEXTS.len())].to_string();
        }
        if rng.gen_bool(0.15) {
            t.colspan = 2;
        }
        let parent = (i > 0).then(|| rng.gen_range(0..i));
        nodes.push((parent, t));
    }
    for i in (1..n).rev() {
        let (parent, node) = nodes.pop().unwrap();
        let p = parent.unwrap();
        nodes[p].1.children.insert(0, node);
        debug_assert_eq!(nodes.len(), i);
    }
    nodes.pop().unwrap().1
}

/// Random well-formed table: rows of cells with random texts.
pub fn random_table<R: Rng>(rng: &mut R) -> TableTree {
    let rows = rng.gen_range(1..4);
    let cols = rng.gen_range(1..4);
    let body = (0..rows)
        .map(|_| {
            TableTree::node("tr").with_children(
                (0..cols)
                    .map(|_| {
                        let len = rng.gen_range(0..5);
                        let text: String = (0..len).map(|_| rng.gen_range(b'a'..=b'e') as char).collect();
                        TableTree::cell(&text)
                    })
                    .collect(),
            )
        })
        .collect();
    TableTree::node("table").with_children(vec![TableTree::node("tbody").with_children(body)])
}

/// Replaces every cell text with fresh random text.
pub fn mutate_cells<R: Rng>(rng: &mut R, t: &TableTree) -> TableTree {
    let mut out = t.clone();
    if out.tag == "td" {
        let len = rng.gen_range(0..6);
        out.text = (0..len).map(|_| rng.gen_range(b'k'..=b'z') as char).collect();
    }
    out.children = t.children.iter().map(|c| mutate_cells(rng, c)).collect();
    out
}

/// Every string over {a, b} of length at most `max_len`.
pub fn binary_strings(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        frontier = frontier.iter().flat_map(|s| [format!("{s}a"), format!("{s}b")]).collect();
        out.extend(frontier.iter().cloned());
    }
    out
}
