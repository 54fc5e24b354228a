//! Growing binary trees and classical binary trees.
//!
//! Both tree types keep their nodes in a flat vector in preorder, so the root
//! is always node `0` and structural equality is plain vector equality.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::profiles::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Internal,
    Anchor,
    DeadLeaf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrowthChoice {
    Die,
    Branch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrowNode {
    Internal { left: u32, right: u32 },
    Anchor,
    DeadLeaf,
}

impl GrowNode {
    pub fn kind(&self) -> NodeKind {
        match self {
            GrowNode::Internal { .. } => NodeKind::Internal,
            GrowNode::Anchor => NodeKind::Anchor,
            GrowNode::DeadLeaf => NodeKind::DeadLeaf,
        }
    }

    fn children(&self) -> Option<(u32, u32)> {
        match *self {
            GrowNode::Internal { left, right } => Some((left, right)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinNode {
    Leaf,
    Internal { left: u32, right: u32 },
}

impl BinNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, BinNode::Leaf)
    }

    fn children(&self) -> Option<(u32, u32)> {
        match *self {
            BinNode::Internal { left, right } => Some((left, right)),
            BinNode::Leaf => None,
        }
    }
}

/// Internal nodes, anchors, dead leaves and height of a growing tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct TreeStats {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub h: usize,
}

/// Reorders an arena into preorder starting at `root`, dropping unreachable
/// nodes and rewriting child links.
fn to_preorder<N: Copy>(
    nodes: &[N],
    root: u32,
    children: impl Fn(&N) -> Option<(u32, u32)>,
    relink: impl Fn(N, Option<(u32, u32)>) -> N,
) -> Vec<N> {
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![root];
    while let Some(i) = stack.pop() {
        order.push(i);
        if let Some((l, r)) = children(&nodes[i as usize]) {
            stack.push(r);
            stack.push(l);
        }
    }
    let mut new_index = vec![u32::MAX; nodes.len()];
    for (pos, &old) in order.iter().enumerate() {
        new_index[old as usize] = pos as u32;
    }
    order
        .iter()
        .map(|&old| {
            let node = nodes[old as usize];
            let kids = children(&node).map(|(l, r)| (new_index[l as usize], new_index[r as usize]));
            relink(node, kids)
        })
        .collect()
}

/// Depth of every node of a preorder vector (children always follow parents).
fn preorder_depths(len: usize, children: impl Fn(usize) -> Option<(u32, u32)>) -> Vec<usize> {
    let mut depth = vec![0usize; len];
    for i in 0..len {
        if let Some((l, r)) = children(i) {
            depth[l as usize] = depth[i] + 1;
            depth[r as usize] = depth[i] + 1;
        }
    }
    depth
}

/// A tree produced by the growth process: every step turns each anchor
/// into either a dead leaf or an internal node carrying two fresh anchors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrowingTree {
    nodes: Vec<GrowNode>,
    step: u32,
}

impl GrowingTree {
    /// The initial tree: a single anchor at step 0.
    pub fn new_seed() -> Self {
        GrowingTree {
            nodes: vec![GrowNode::Anchor],
            step: 0,
        }
    }

    pub fn nodes(&self) -> &[GrowNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn anchor_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, GrowNode::Anchor)).count()
    }

    pub fn is_active(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, GrowNode::Anchor))
    }

    /// Applies one growth step; `choices[i]` is applied to the `i`-th anchor
    /// from the left.
    pub fn grow_step(&self, choices: &[GrowthChoice]) -> Result<GrowingTree> {
        let anchors = self.anchor_count();
        if anchors == 0 {
            return Err(Error::NoAnchors);
        }
        if choices.len() != anchors {
            return Err(Error::ChoiceArity {
                expected: anchors,
                got: choices.len(),
            });
        }
        let mut arena = self.nodes.clone();
        let mut next = choices.iter();
        // Preorder visits same-depth anchors left to right.
        for i in 0..self.nodes.len() {
            if let GrowNode::Anchor = self.nodes[i] {
                arena[i] = match next.next().expect("arity checked") {
                    GrowthChoice::Die => GrowNode::DeadLeaf,
                    GrowthChoice::Branch => {
                        let left = arena.len() as u32;
                        arena.push(GrowNode::Anchor);
                        arena.push(GrowNode::Anchor);
                        GrowNode::Internal {
                            left,
                            right: left + 1,
                        }
                    }
                };
            }
        }
        let nodes = to_preorder(&arena, 0, GrowNode::children, |node, kids| match kids {
            Some((left, right)) => GrowNode::Internal { left, right },
            None => node,
        });
        Ok(GrowingTree {
            nodes,
            step: self.step + 1,
        })
    }

    /// Replays a full choice history from the seed.
    pub fn replay(history: &[Vec<GrowthChoice>]) -> Result<GrowingTree> {
        history
            .iter()
            .try_fold(GrowingTree::new_seed(), |t, choices| t.grow_step(choices))
    }

    /// The per-step choices that produced this tree, read off level by level.
    pub fn history(&self) -> Vec<Vec<GrowthChoice>> {
        let depth = self.depths();
        let mut history = vec![Vec::new(); self.step as usize];
        // Preorder lists each level left to right.
        for (i, node) in self.nodes.iter().enumerate() {
            let choice = match node {
                GrowNode::Internal { .. } => GrowthChoice::Branch,
                GrowNode::DeadLeaf => GrowthChoice::Die,
                GrowNode::Anchor => continue,
            };
            if let Some(level) = history.get_mut(depth[i]) {
                level.push(choice);
            }
        }
        history
    }

    fn depths(&self) -> Vec<usize> {
        preorder_depths(self.nodes.len(), |i| self.nodes[i].children())
    }

    pub fn stats(&self) -> TreeStats {
        let mut s = TreeStats {
            n: 0,
            m: 0,
            ell: 0,
            h: 0,
        };
        for node in &self.nodes {
            match node {
                GrowNode::Internal { .. } => s.n += 1,
                GrowNode::Anchor => s.m += 1,
                GrowNode::DeadLeaf => s.ell += 1,
            }
        }
        s.h = self.depths().into_iter().max().unwrap_or(0);
        s
    }

    /// Anchors become ordinary leaves.
    pub fn freeze(&self) -> BinaryTree {
        BinaryTree {
            nodes: self
                .nodes
                .iter()
                .map(|n| match *n {
                    GrowNode::Internal { left, right } => BinNode::Internal { left, right },
                    GrowNode::Anchor | GrowNode::DeadLeaf => BinNode::Leaf,
                })
                .collect(),
        }
    }

    /// Checks the reachability invariants: internal nodes and dead leaves lie
    /// strictly above level `step`, anchors exactly on it, and an inactive
    /// tree stopped right after its deepest level died.
    fn validate(&self) -> Result<()> {
        let depth = self.depths();
        let step = self.step as usize;
        let mut deepest = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            deepest = deepest.max(depth[i]);
            let ok = match node {
                GrowNode::Anchor => depth[i] == step,
                GrowNode::Internal { .. } | GrowNode::DeadLeaf => depth[i] < step,
            };
            if !ok {
                return Err(Error::InvalidTree {
                    node: i,
                    reason: format!("{:?} at depth {} with step {}", node.kind(), depth[i], step),
                });
            }
        }
        if !self.is_active() && step != deepest + 1 {
            return Err(Error::InvalidTree {
                node: 0,
                reason: format!("inactive tree of height {deepest} cannot be at step {step}"),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"step\":{},\"root\":", self.step);
        write_json(
            &mut out,
            |i| self.nodes[i].children(),
            |i| match self.nodes[i] {
                GrowNode::Internal { .. } => "\"kind\":\"internal\",",
                GrowNode::Anchor => "\"leaf\":true,\"kind\":\"anchor\"",
                GrowNode::DeadLeaf => "\"leaf\":true,\"kind\":\"dead\"",
            },
        );
        out.push('}');
        out
    }

    pub fn from_json(text: &str) -> Result<GrowingTree> {
        let value = parse_value(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("expected an object with \"step\" and \"root\"".into()))?;
        let step = obj
            .get("step")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing or non-integer \"step\"".into()))?;
        let root = obj
            .get("root")
            .ok_or_else(|| Error::Parse("missing \"root\"".into()))?;
        let shapes = read_shape(root, true)?;
        let nodes = shapes
            .into_iter()
            .map(|s| match s {
                Shape::Internal { left, right } => GrowNode::Internal { left, right },
                Shape::Leaf(Some(NodeKind::Anchor)) => GrowNode::Anchor,
                Shape::Leaf(_) => GrowNode::DeadLeaf,
            })
            .collect();
        let step = u32::try_from(step).map_err(|_| Error::Parse("step too large".into()))?;
        let tree = GrowingTree { nodes, step };
        tree.validate()?;
        Ok(tree)
    }

    pub fn to_dot(&self) -> String {
        write_dot(
            self.nodes.len(),
            |i| self.nodes[i].children(),
            |i| match self.nodes[i] {
                GrowNode::Internal { .. } => INTERNAL_STYLE,
                GrowNode::Anchor => ANCHOR_STYLE,
                GrowNode::DeadLeaf => DEAD_STYLE,
            },
        )
    }
}

/// A classical (plane, unlabeled) binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryTree {
    nodes: Vec<BinNode>,
}

impl BinaryTree {
    pub fn leaf() -> Self {
        BinaryTree {
            nodes: vec![BinNode::Leaf],
        }
    }

    /// A new tree with `left` and `right` as the subtrees of a fresh root.
    pub fn join(left: &BinaryTree, right: &BinaryTree) -> Self {
        let offset_l = 1u32;
        let offset_r = 1 + left.nodes.len() as u32;
        let mut nodes = Vec::with_capacity(1 + left.nodes.len() + right.nodes.len());
        nodes.push(BinNode::Internal {
            left: offset_l,
            right: offset_r,
        });
        for (off, sub) in [(offset_l, left), (offset_r, right)] {
            nodes.extend(sub.nodes.iter().map(|n| match *n {
                BinNode::Leaf => BinNode::Leaf,
                BinNode::Internal { left, right } => BinNode::Internal {
                    left: left + off,
                    right: right + off,
                },
            }));
        }
        BinaryTree { nodes }
    }

    /// Canonicalizes an arbitrary arena rooted at `root`.
    pub(crate) fn from_arena(arena: &[BinNode], root: u32) -> Self {
        let nodes = to_preorder(arena, root, BinNode::children, |node, kids| match kids {
            Some((left, right)) => BinNode::Internal { left, right },
            None => node,
        });
        BinaryTree { nodes }
    }

    pub fn nodes(&self) -> &[BinNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len() - self.leaf_count()
    }

    pub fn depths(&self) -> Vec<usize> {
        preorder_depths(self.nodes.len(), |i| self.nodes[i].children())
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Number of leaves on each level, from the root down to the deepest one.
    pub fn profile(&self) -> Profile {
        let depth = self.depths();
        let height = depth.iter().copied().max().unwrap_or(0);
        let mut levels = vec![0u64; height + 1];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.is_leaf() {
                levels[depth[i]] += 1;
            }
        }
        Profile::from_levels_unchecked(levels)
    }

    /// The unique active growing tree freezing to this one: leaves on the
    /// deepest level are anchors, all other leaves are dead.
    pub fn thaw(&self) -> GrowingTree {
        let depth = self.depths();
        let height = depth.iter().copied().max().unwrap_or(0);
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| match *n {
                BinNode::Internal { left, right } => GrowNode::Internal { left, right },
                BinNode::Leaf if depth[i] == height => GrowNode::Anchor,
                BinNode::Leaf => GrowNode::DeadLeaf,
            })
            .collect();
        GrowingTree {
            nodes,
            step: height as u32,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write_json(
            &mut out,
            |i| self.nodes[i].children(),
            |i| match self.nodes[i] {
                BinNode::Leaf => "\"leaf\":true",
                BinNode::Internal { .. } => "",
            },
        );
        out
    }

    /// Parses the JSON tree format. Growing-tree node objects are accepted
    /// too; their `kind` tags are ignored.
    pub fn from_json(text: &str) -> Result<BinaryTree> {
        let value = parse_value(text)?;
        let nodes = read_shape(&value, false)?
            .into_iter()
            .map(|s| match s {
                Shape::Internal { left, right } => BinNode::Internal { left, right },
                Shape::Leaf(_) => BinNode::Leaf,
            })
            .collect();
        Ok(BinaryTree { nodes })
    }

    pub fn to_dot(&self) -> String {
        write_dot(
            self.nodes.len(),
            |i| self.nodes[i].children(),
            |i| match self.nodes[i] {
                BinNode::Internal { .. } => INTERNAL_STYLE,
                BinNode::Leaf => DEAD_STYLE,
            },
        )
    }
}

const INTERNAL_STYLE: &str = "shape=circle, style=filled, fillcolor=black";
const ANCHOR_STYLE: &str = "shape=circle";
const DEAD_STYLE: &str = "shape=square";

fn write_json(out: &mut String, children: impl Fn(usize) -> Option<(u32, u32)>, tag: impl Fn(usize) -> &'static str) {
    enum Tok {
        Node(u32),
        Text(&'static str),
    }
    let mut stack = vec![Tok::Node(0)];
    while let Some(tok) = stack.pop() {
        match tok {
            Tok::Text(s) => out.push_str(s),
            Tok::Node(i) => {
                out.push('{');
                out.push_str(tag(i as usize));
                match children(i as usize) {
                    None => out.push('}'),
                    Some((l, r)) => {
                        out.push_str("\"l\":");
                        stack.push(Tok::Text("}"));
                        stack.push(Tok::Node(r));
                        stack.push(Tok::Text(",\"r\":"));
                        stack.push(Tok::Node(l));
                    }
                }
            }
        }
    }
}

fn write_dot(len: usize, children: impl Fn(usize) -> Option<(u32, u32)>, style: impl Fn(usize) -> &'static str) -> String {
    let mut out = String::from("digraph tree {\n  node [label=\"\", width=0.2, height=0.2];\n");
    for i in 0..len {
        let _ = writeln!(out, "  n{i} [{}];", style(i));
    }
    for i in 0..len {
        if let Some((l, r)) = children(i) {
            let _ = writeln!(out, "  n{i} -> n{l};");
            let _ = writeln!(out, "  n{i} -> n{r};");
        }
    }
    out.push_str("}\n");
    out
}

fn parse_value(text: &str) -> Result<Value> {
    use serde::Deserialize;
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let value = Value::deserialize(&mut de).map_err(|e| Error::Parse(e.to_string()))?;
    de.end().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(value)
}

enum Shape {
    Internal { left: u32, right: u32 },
    Leaf(Option<NodeKind>),
}

/// Flattens a JSON node tree into preorder, validating each node against the
/// schema. `strict_kind` requires a `kind` tag on every node.
fn read_shape(root: &Value, strict_kind: bool) -> Result<Vec<Shape>> {
    let mut out: Vec<Shape> = Vec::new();
    // (node, slot in parent to patch with this node's index)
    let mut stack: Vec<(&Value, Option<(usize, bool)>)> = vec![(root, None)];
    while let Some((value, slot)) = stack.pop() {
        let index = out.len();
        if let Some((parent, is_right)) = slot {
            if let Shape::Internal { left, right } = &mut out[parent] {
                if is_right {
                    *right = index as u32;
                } else {
                    *left = index as u32;
                }
            }
        }
        let bad = |reason: &str| Error::InvalidTree {
            node: index,
            reason: reason.to_string(),
        };
        let obj = value.as_object().ok_or_else(|| bad("node is not an object"))?;
        let kind = match obj.get("kind") {
            None if strict_kind => return Err(bad("missing \"kind\"")),
            None => None,
            Some(Value::String(k)) => Some(match k.as_str() {
                "internal" => NodeKind::Internal,
                "anchor" => NodeKind::Anchor,
                "dead" => NodeKind::DeadLeaf,
                other => return Err(bad(&format!("unknown kind {other:?}"))),
            }),
            Some(_) => return Err(bad("\"kind\" must be a string")),
        };
        let leaf = match obj.get("leaf") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(bad("\"leaf\" must be a boolean")),
        };
        let l = obj.get("l");
        let r = obj.get("r");
        for key in obj.keys() {
            if !matches!(key.as_str(), "kind" | "leaf" | "l" | "r") {
                return Err(bad(&format!("unexpected key {key:?}")));
            }
        }
        match (leaf, l, r) {
            (true, None, None) => {
                if kind == Some(NodeKind::Internal) {
                    return Err(bad("leaf tagged as internal"));
                }
                out.push(Shape::Leaf(kind));
            }
            (false, Some(l), Some(r)) => {
                if matches!(kind, Some(NodeKind::Anchor | NodeKind::DeadLeaf)) {
                    return Err(bad("node with children tagged as a leaf"));
                }
                out.push(Shape::Internal { left: 0, right: 0 });
                stack.push((r, Some((index, true))));
                stack.push((l, Some((index, false))));
            }
            (true, _, _) => return Err(bad("leaf with children")),
            (false, None, None) => return Err(bad("node is neither a leaf nor internal")),
            (false, _, _) => return Err(bad("internal node needs both \"l\" and \"r\"")),
        }
    }
    Ok(out)
}
