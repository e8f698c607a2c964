//! Data words, data trees, positions and their text formats.
//!
//! A data word is a non-empty sequence of `(label, datum)` pairs; a data
//! tree is a finite unranked ordered tree whose every node carries such a
//! pair. Both are immutable after construction and safe to share.

mod datum;
pub(crate) mod text;

pub use datum::Datum;
pub use text::{parse_tree, parse_word, ParseError};

use std::fmt;

/// A letter from a finite alphabet. Tokens are non-empty strings over
/// `[a-zA-Z0-9_]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub String);

impl Label {
    pub fn new(name: &str) -> Self {
        debug_assert!(is_valid_label(name), "invalid label token: {name:?}");
        Label(name.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({})", self.0)
    }
}

pub(crate) fn is_valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Word type of a position: whether it has a next position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WordTypeFlag {
    pub has_next: bool,
}

/// Tree type of a node: whether it has a first child and a next sibling.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TreeTypeFlag {
    pub has_child: bool,
    pub has_right_sibling: bool,
}

/// A non-empty data word. Positions are 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DataWord {
    items: Vec<(Label, Datum)>,
}

impl DataWord {
    /// Builds a word from its items. Panics on an empty sequence: words
    /// have at least one position.
    pub fn new(items: Vec<(Label, Datum)>) -> Self {
        assert!(!items.is_empty(), "data words are non-empty");
        DataWord { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Positions are `1..=len`.
    pub fn positions(&self) -> impl Iterator<Item = usize> {
        1..=self.items.len()
    }

    pub fn label(&self, pos: usize) -> &Label {
        &self.items[pos - 1].0
    }

    pub fn datum(&self, pos: usize) -> Datum {
        self.items[pos - 1].1
    }

    pub fn items(&self) -> &[(Label, Datum)] {
        &self.items
    }

    /// The word type of a position, per the definition of `type_w`.
    pub fn type_of(&self, pos: usize) -> Option<WordTypeFlag> {
        if pos >= 1 && pos <= self.items.len() {
            Some(WordTypeFlag {
                has_next: pos < self.items.len(),
            })
        } else {
            None
        }
    }

    /// All distinct data values of the word.
    pub fn data(&self) -> Vec<Datum> {
        let mut ds: Vec<Datum> = self.items.iter().map(|(_, d)| *d).collect();
        ds.sort();
        ds.dedup();
        ds
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, d)) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}@{d}")?;
        }
        Ok(())
    }
}

/// A tree position: the sequence of 1-based sibling indices from the root.
/// The root is the empty sequence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TreePos(pub Vec<usize>);

impl TreePos {
    pub fn root() -> Self {
        TreePos(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        TreePos(v)
    }

    /// The i-th child position written `x·i`.
    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<TreePos> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreePos(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The next sibling `x·(i+1)` of `x·i`, if this is not the root.
    pub fn next_sibling(&self) -> Option<TreePos> {
        let mut v = self.0.clone();
        let last = v.pop()?;
        v.push(last + 1);
        Some(TreePos(v))
    }

    /// The leftmost child `x·1`.
    pub fn first_child(&self) -> TreePos {
        self.child(1)
    }
}

impl fmt::Display for TreePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("eps")
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl fmt::Debug for TreePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One node of a data tree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Node {
    label: Label,
    datum: Datum,
    children: Vec<Node>,
}

/// A non-empty unranked ordered data tree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DataTree {
    root: Node,
}

impl DataTree {
    pub fn leaf(label: Label, datum: Datum) -> Self {
        DataTree {
            root: Node {
                label,
                datum,
                children: Vec::new(),
            },
        }
    }

    pub fn node(label: Label, datum: Datum, children: Vec<DataTree>) -> Self {
        DataTree {
            root: Node {
                label,
                datum,
                children: children.into_iter().map(|t| t.root).collect(),
            },
        }
    }

    fn get(&self, pos: &TreePos) -> Option<&Node> {
        let mut cur = &self.root;
        for &i in &pos.0 {
            cur = cur.children.get(i.checked_sub(1)?)?;
        }
        Some(cur)
    }

    pub fn contains(&self, pos: &TreePos) -> bool {
        self.get(pos).is_some()
    }

    pub fn label(&self, pos: &TreePos) -> Option<&Label> {
        self.get(pos).map(|n| &n.label)
    }

    pub fn datum(&self, pos: &TreePos) -> Option<Datum> {
        self.get(pos).map(|n| n.datum)
    }

    pub fn child_count(&self, pos: &TreePos) -> Option<usize> {
        self.get(pos).map(|n| n.children.len())
    }

    /// The tree type of a node, per the definition of `type_T`.
    pub fn type_of(&self, pos: &TreePos) -> Option<TreeTypeFlag> {
        self.get(pos)?;
        let has_child = self.contains(&pos.first_child());
        let has_right_sibling = match pos.next_sibling() {
            Some(sib) => self.contains(&sib),
            None => false,
        };
        Some(TreeTypeFlag {
            has_child,
            has_right_sibling,
        })
    }

    /// All positions in document (depth-first, pre-order) order.
    pub fn positions(&self) -> Vec<TreePos> {
        let mut out = Vec::new();
        let mut stack = vec![(TreePos::root(), &self.root)];
        while let Some((pos, node)) = stack.pop() {
            out.push(pos.clone());
            for (i, c) in node.children.iter().enumerate().rev() {
                stack.push((pos.child(i + 1), c));
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        fn count(n: &Node) -> usize {
            1 + n.children.iter().map(count).sum::<usize>()
        }
        count(&self.root)
    }

    /// All distinct data values of the tree.
    pub fn data(&self) -> Vec<Datum> {
        let mut ds = Vec::new();
        fn walk(n: &Node, out: &mut Vec<Datum>) {
            out.push(n.datum);
            for c in &n.children {
                walk(c, out);
            }
        }
        walk(&self.root, &mut ds);
        ds.sort();
        ds.dedup();
        ds
    }

    /// `x ⪯_fcns y`: y is reachable from x by `leftmost child` and
    /// `next sibling` moves, reflexively.
    pub fn fcns_leq(&self, x: &TreePos, y: &TreePos) -> Option<bool> {
        if !self.contains(x) || !self.contains(y) {
            return None;
        }
        // Walk up from y through fcns-parents until x or the root.
        let mut cur = y.clone();
        loop {
            if &cur == x {
                return Some(true);
            }
            match self.fcns_parent(&cur) {
                Some(p) => cur = p,
                None => return Some(false),
            }
        }
    }

    /// The fcns-parent of a position: the node of which it is either the
    /// leftmost child or the immediate next sibling.
    pub fn fcns_parent(&self, pos: &TreePos) -> Option<TreePos> {
        let last = *pos.0.last()?;
        if last == 1 {
            pos.parent()
        } else {
            let mut v = pos.0.clone();
            let n = v.len();
            v[n - 1] = last - 1;
            Some(TreePos(v))
        }
    }

    /// The chain of fcns-ancestors of `pos`, starting at `pos` itself and
    /// ending at the root.
    pub fn fcns_ancestors(&self, pos: &TreePos) -> Vec<TreePos> {
        let mut out = vec![pos.clone()];
        let mut cur = pos.clone();
        while let Some(p) = self.fcns_parent(&cur) {
            out.push(p.clone());
            cur = p;
        }
        out
    }
}

impl fmt::Display for DataTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{}@{}", n.label, n.datum)?;
            if !n.children.is_empty() {
                f.write_str("(")?;
                for (i, c) in n.children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write_node(c, f)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
        write_node(&self.root, f)
    }
}

#[cfg(test)]
mod tests;
