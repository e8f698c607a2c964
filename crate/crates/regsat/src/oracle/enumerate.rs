//! Exhaustive enumeration of small data words and data trees, up to data
//! isomorphism: data assignments are restricted growth strings, canonical
//! surjections onto `{0..k-1}`.

use crate::model::{DataTree, DataWord, Datum, Label};

#[derive(Clone, Debug)]
pub struct EnumBounds {
    /// Maximum number of positions (words) or nodes (trees).
    pub max_size: usize,
    pub max_distinct_data: usize,
    pub alphabet: Vec<Label>,
}

impl EnumBounds {
    pub fn new(max_size: usize, max_distinct_data: usize, labels: &[&str]) -> Self {
        assert!(max_size >= 1 && max_distinct_data >= 1);
        EnumBounds {
            max_size,
            max_distinct_data,
            alphabet: labels.iter().map(|l| Label::new(l)).collect(),
        }
    }
}

/// All data assignments for `n` positions with at most `k` distinct values,
/// one representative per data isomorphism class (restricted growth
/// strings: `d[0] = 0`, `d[i] <= max(d[..i]) + 1`).
fn data_patterns(n: usize, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn go(i: usize, n: usize, k: usize, mx: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        let top = (mx + 1).min(k as u64 - 1);
        for v in 0..=top {
            cur[i] = v;
            go(i + 1, n, k, mx.max(v), cur, out);
        }
    }
    go(1.min(n), n, k, 0, &mut cur, &mut out);
    if n == 0 {
        out.push(Vec::new());
    }
    out
}

fn label_seqs(n: usize, alphabet: &[Label]) -> Vec<Vec<Label>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for l in alphabet {
                let mut p = prefix.clone();
                p.push(l.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Enumerates all data words within the bounds, in deterministic order:
/// by length, then label sequence, then data pattern.
pub fn enum_words(bounds: &EnumBounds) -> Vec<DataWord> {
    let mut out = Vec::new();
    for n in 1..=bounds.max_size {
        for labels in label_seqs(n, &bounds.alphabet) {
            for data in data_patterns(n, bounds.max_distinct_data) {
                out.push(DataWord::new(
                    labels
                        .iter()
                        .cloned()
                        .zip(data.iter().map(|&d| Datum::int(d)))
                        .collect(),
                ));
            }
        }
    }
    out
}

/// An unlabeled unranked tree shape: the list of child shapes.
#[derive(Clone, Debug)]
pub struct Shape {
    pub children: Vec<Shape>,
}

impl Shape {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Shape::size).sum::<usize>()
    }
}

/// All tree shapes with exactly `n` nodes, deterministic order.
pub fn tree_shapes(n: usize) -> Vec<Shape> {
    // A shape of size n has a root plus an ordered forest of total size
    // n - 1.
    fn forests(n: usize) -> Vec<Vec<Shape>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        // First subtree takes k nodes, rest of the forest n - k.
        for k in 1..=n {
            for first in tree_shapes(k) {
                for rest in forests(n - k) {
                    let mut f = vec![first.clone()];
                    f.extend(rest);
                    out.push(f);
                }
            }
        }
        out
    }
    if n == 0 {
        return Vec::new();
    }
    forests(n - 1)
        .into_iter()
        .map(|children| Shape { children })
        .collect()
}

fn fill_shape(shape: &Shape, labels: &[Label], data: &[Datum], idx: &mut usize) -> DataTree {
    let my = *idx;
    *idx += 1;
    let children = shape
        .children
        .iter()
        .map(|c| fill_shape(c, labels, data, idx))
        .collect();
    DataTree::node(labels[my].clone(), data[my], children)
}

/// Enumerates all data trees within the bounds: shapes by node count, then
/// label assignments (pre-order), then data patterns up to isomorphism.
pub fn enum_trees(bounds: &EnumBounds) -> Vec<DataTree> {
    let mut out = Vec::new();
    for n in 1..=bounds.max_size {
        for shape in tree_shapes(n) {
            for labels in label_seqs(n, &bounds.alphabet) {
                for data in data_patterns(n, bounds.max_distinct_data) {
                    let datums: Vec<Datum> = data.iter().map(|&d| Datum::int(d)).collect();
                    let mut idx = 0;
                    out.push(fill_shape(&shape, &labels, &datums, &mut idx));
                }
            }
        }
    }
    out
}
