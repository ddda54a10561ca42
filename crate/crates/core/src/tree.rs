//! Perfect heap-ordered binary trees and the rearrangement step.
//!
//! Nodes live in a [`NodeArena`] and link to each other by [`NodeId`]. A
//! [`PerfectTree`] is only a root id plus a height; its shape is implied by
//! the links. Every element also owns a handle slot in the arena, so callers
//! can hold a [`Handle`] that keeps pointing at the element while its content
//! moves between nodes during sift-up.
//!
//! The rearrangement step takes three trees of height `h`, promotes the
//! smallest of the three roots, and returns
//!
//! ```text
//!      m            m = min root           m
//!     / \                               /     \
//!    L   R    A    B        ==>        A       B        L    R
//!   (h-1)    (h)  (h)                 (h)     (h)     (h-1) (h-1)
//! ```
//!
//! one tree of height `h + 1` and the two former subtrees of `m`, using two
//! comparisons and touching only the three roots and the two detached
//! subtree roots.

use std::collections::HashMap;
use std::mem;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use thiserror::Error;

use crate::compare::{CountingComparator, KeyOrder};

static NEXT_ARENA_ID: AtomicU64 = AtomicU64::new(1);

/// Index of a node inside a [`NodeArena`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn shifted(self, offset: u32) -> NodeId {
        NodeId(self.0 + offset)
    }
}

/// Stable reference to one queue element.
///
/// A handle stays valid across rearrangements, sift-ups and melds, and dies
/// permanently when its element is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Handle {
    arena: u64,
    slot: u32,
}

#[derive(Debug, Clone)]
struct Node<K, V> {
    key: K,
    payload: V,
    parent: Option<NodeId>,
    left: Option<NodeId>,
    right: Option<NodeId>,
    /// Slot in the arena's handle table; the slot points back at this node.
    handle: u32,
}

/// A perfect heap-ordered binary tree: `2^(height+1) - 1` nodes, all leaves
/// at depth `height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerfectTree {
    root: NodeId,
    height: u32,
}

impl PerfectTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of elements, `2^(height+1) - 1`.
    pub fn size(&self) -> usize {
        perfect_size(self.height)
    }

    pub(crate) fn shifted(self, offset: u32) -> PerfectTree {
        PerfectTree {
            root: self.root.shifted(offset),
            height: self.height,
        }
    }
}

/// Element count of a perfect tree of the given height.
pub fn perfect_size(height: u32) -> usize {
    (1usize << (height + 1)) - 1
}

/// Result of one rearrangement step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rearranged {
    /// Height `h + 1`, rooted at the smallest input root.
    pub big: PerfectTree,
    /// The promoted root's former subtrees (height `h - 1`); absent for `h = 0`.
    pub leftovers: Option<[PerfectTree; 2]>,
}

/// A detached root: its key and payload plus the subtrees it leaves behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRoot<K, V> {
    pub key: K,
    pub payload: V,
    pub leftovers: Option<[PerfectTree; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("rearrange needs three trees of equal height, got {0:?}")]
    HeightMismatch([u32; 3]),
    #[error("tree rooted at node {0:?} was passed to rearrange more than once")]
    Aliased(NodeId),
}

/// A structural problem found by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A link points at an empty arena slot.
    Dangling {
        from: Option<NodeId>,
        to: NodeId,
    },
    RootHasParent {
        root: NodeId,
    },
    /// Child's parent link does not point back at the node that owns it.
    ParentLink {
        node: NodeId,
        expected: NodeId,
        found: Option<NodeId>,
    },
    /// Exactly one child present.
    Lopsided {
        node: NodeId,
    },
    /// Leaf at the wrong depth, or a node below the tree's height.
    LeafDepth {
        node: NodeId,
        depth: u32,
        height: u32,
    },
    Size {
        root: NodeId,
        expected: usize,
        actual: usize,
    },
    HeapOrder {
        parent: NodeId,
        child: NodeId,
    },
    /// The node's handle slot does not point back at it.
    HandleBackRef {
        node: NodeId,
    },
    /// A tree is filed in the bucket for a different height.
    BucketHeight {
        root: NodeId,
        bucket: u32,
        height: u32,
    },
    /// Element counts disagree (forest bookkeeping vs. arena vs. trees).
    Count {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// A bucket holds more trees than the fix policy allows.
    DigitBound {
        height: u32,
        count: usize,
        bound: usize,
    },
}

/// Owns every node of one queue, plus the handle table.
#[derive(Debug, Clone)]
pub struct NodeArena<K, V> {
    id: u64,
    nodes: Vec<Option<Node<K, V>>>,
    free: Vec<NodeId>,
    live: usize,
    /// Handle slot -> node. Slots are never reused.
    handles: Vec<Option<NodeId>>,
    /// Ids of arenas absorbed by meld, mapped to the offset of their handle slots.
    aliases: HashMap<u64, u32>,
    link_writes: u64,
}

impl<K, V> Default for NodeArena<K, V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K, V> NodeArena<K, V> {
    pub fn new() -> Self {
        Self {
            id: NEXT_ARENA_ID.fetch_add(1, AtomicOrdering::Relaxed),
            nodes: Vec::new(),
            free: Vec::new(),
            live: 0,
            handles: Vec::new(),
            aliases: HashMap::new(),
            link_writes: 0,
        }
    }

    /// Number of live nodes.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Cumulative count of node writes to link fields. Each rearrangement
    /// adds at most 5, regardless of tree height.
    /// Slots held: nodes (live or free), handle slots and aliases. This is
    /// what [`absorb`](Self::absorb) has to copy.
    pub(crate) fn storage(&self) -> usize {
        self.nodes.len() + self.handles.len() + self.aliases.len()
    }

    pub fn link_writes(&self) -> u64 {
        self.link_writes
    }

    /// Number of handles ever issued that are still live.
    pub fn live_handles(&self) -> usize {
        self.handles.iter().filter(|h| h.is_some()).count()
    }

    fn node(&self, id: NodeId) -> &Node<K, V> {
        self.nodes[id.index()]
            .as_ref()
            .expect("node id refers to a freed slot")
    }

    fn node_mut(&mut self, id: NodeId) -> &mut Node<K, V> {
        self.nodes[id.index()]
            .as_mut()
            .expect("node id refers to a freed slot")
    }

    fn get(&self, id: NodeId) -> Option<&Node<K, V>> {
        self.nodes.get(id.index()).and_then(Option::as_ref)
    }

    pub fn key(&self, id: NodeId) -> &K {
        &self.node(id).key
    }

    pub fn payload(&self, id: NodeId) -> &V {
        &self.node(id).payload
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).parent
    }

    /// `(left, right)`; both `None` for a leaf.
    pub fn children(&self, id: NodeId) -> (Option<NodeId>, Option<NodeId>) {
        let n = self.node(id);
        (n.left, n.right)
    }

    /// The handle currently attached to the element stored at `id`.
    pub fn handle_of(&self, id: NodeId) -> Handle {
        Handle {
            arena: self.id,
            slot: self.node(id).handle,
        }
    }

    /// Node currently holding the handle's element, or `None` if the handle is
    /// dead or belongs to another queue.
    pub fn resolve(&self, handle: Handle) -> Option<NodeId> {
        let base = if handle.arena == self.id {
            0
        } else {
            *self.aliases.get(&handle.arena)?
        };
        self.handles
            .get(base as usize + handle.slot as usize)
            .copied()
            .flatten()
    }

    fn alloc(&mut self, node: Node<K, V>) -> NodeId {
        self.live += 1;
        match self.free.pop() {
            Some(id) => {
                self.nodes[id.index()] = Some(node);
                id
            }
            None => {
                let id = NodeId(u32::try_from(self.nodes.len()).expect("arena exceeds u32 nodes"));
                self.nodes.push(Some(node));
                id
            }
        }
    }

    /// Creates a one-node tree (height 0) and a fresh handle for it.
    pub fn make_singleton(&mut self, key: K, payload: V) -> (PerfectTree, Handle) {
        let slot = u32::try_from(self.handles.len()).expect("handle table exceeds u32 slots");
        let id = self.alloc(Node {
            key,
            payload,
            parent: None,
            left: None,
            right: None,
            handle: slot,
        });
        self.handles.push(Some(id));
        (
            PerfectTree {
                root: id,
                height: 0,
            },
            Handle {
                arena: self.id,
                slot,
            },
        )
    }

    /// Builds a perfect tree from elements in level order (root first, then
    /// each level left to right). Heap order is *not* checked; run
    /// [`NodeArena::validate`] if the input is untrusted.
    ///
    /// Returns `None` unless the element count is `2^(h+1) - 1` for some `h`.
    pub fn from_level_order(
        &mut self,
        elements: Vec<(K, V)>,
    ) -> Option<(PerfectTree, Vec<Handle>)> {
        let n = elements.len();
        if n == 0 || !(n + 1).is_power_of_two() {
            return None;
        }
        let height = (n + 1).trailing_zeros() - 1;
        let mut ids = Vec::with_capacity(n);
        let mut handles = Vec::with_capacity(n);
        for (key, payload) in elements {
            let (tree, handle) = self.make_singleton(key, payload);
            ids.push(tree.root);
            handles.push(handle);
        }
        for i in 0..n {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            if r < n {
                let (left, right, me) = (ids[l], ids[r], ids[i]);
                let node = self.node_mut(me);
                node.left = Some(left);
                node.right = Some(right);
                self.node_mut(left).parent = Some(me);
                self.node_mut(right).parent = Some(me);
            }
        }
        Some((
            PerfectTree {
                root: ids[0],
                height,
            },
            handles,
        ))
    }

    /// The rearrangement step.
    ///
    /// Takes three trees of equal height `h`, makes the smallest root (the
    /// earliest argument on ties) the root of a height-`h + 1` tree whose
    /// children are the other two trees in argument order, and returns the
    /// promoted root's two former subtrees as leftovers. Exactly two
    /// comparisons; no node below the roots is visited.
    pub fn rearrange<C: KeyOrder<K>>(
        &mut self,
        cmp: &CountingComparator<C>,
        trees: [PerfectTree; 3],
    ) -> Result<Rearranged, TreeError> {
        let h = trees[0].height;
        if trees.iter().any(|t| t.height != h) {
            return Err(TreeError::HeightMismatch(trees.map(|t| t.height)));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if trees[i].root == trees[j].root {
                    return Err(TreeError::Aliased(trees[i].root));
                }
            }
        }

        let mut min = 0;
        for i in 1..3 {
            if cmp.less(self.key(trees[i].root), self.key(trees[min].root)) {
                min = i;
            }
        }
        let (a, b) = match min {
            0 => (trees[1].root, trees[2].root),
            1 => (trees[0].root, trees[2].root),
            _ => (trees[0].root, trees[1].root),
        };
        let root = trees[min].root;

        let node = self.node_mut(root);
        let old = (node.left.replace(a), node.right.replace(b));
        self.node_mut(a).parent = Some(root);
        self.node_mut(b).parent = Some(root);
        self.link_writes += 3;

        let leftovers = match old {
            (Some(l), Some(r)) => {
                self.node_mut(l).parent = None;
                self.node_mut(r).parent = None;
                self.link_writes += 2;
                Some([
                    PerfectTree {
                        root: l,
                        height: h - 1,
                    },
                    PerfectTree {
                        root: r,
                        height: h - 1,
                    },
                ])
            }
            _ => None,
        };

        Ok(Rearranged {
            big: PerfectTree {
                root,
                height: h + 1,
            },
            leftovers,
        })
    }

    /// Removes a tree's root, killing its handle. The two subtrees come back
    /// as independent perfect trees; no comparisons are made.
    pub fn split_root(&mut self, tree: PerfectTree) -> SplitRoot<K, V> {
        let node = self.nodes[tree.root.index()]
            .take()
            .expect("split_root on a freed node");
        debug_assert!(node.parent.is_none(), "split_root on a non-root node");
        self.free.push(tree.root);
        self.live -= 1;
        self.handles[node.handle as usize] = None;

        let leftovers = match (node.left, node.right) {
            (Some(l), Some(r)) => {
                self.node_mut(l).parent = None;
                self.node_mut(r).parent = None;
                self.link_writes += 2;
                Some([
                    PerfectTree {
                        root: l,
                        height: tree.height - 1,
                    },
                    PerfectTree {
                        root: r,
                        height: tree.height - 1,
                    },
                ])
            }
            _ => None,
        };
        SplitRoot {
            key: node.key,
            payload: node.payload,
            leftovers,
        }
    }

    /// Exchanges element content (key, payload, handle) between two nodes and
    /// repoints both handles. Links are untouched.
    fn swap_contents(&mut self, a: NodeId, b: NodeId) {
        debug_assert_ne!(a, b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.nodes.split_at_mut(hi.index());
        let x = head[lo.index()].as_mut().expect("swap on freed node");
        let y = tail[0].as_mut().expect("swap on freed node");
        mem::swap(&mut x.key, &mut y.key);
        mem::swap(&mut x.payload, &mut y.payload);
        mem::swap(&mut x.handle, &mut y.handle);
        let (hx, hy) = (x.handle as usize, y.handle as usize);
        self.handles[hx] = Some(lo);
        self.handles[hy] = Some(hi);
    }

    /// Bubbles the element at `node` toward the root while it is smaller
    /// than its parent. Returns the node now holding the element and the
    /// number of swaps. At most `height` comparisons.
    pub fn sift_up<C: KeyOrder<K>>(
        &mut self,
        cmp: &CountingComparator<C>,
        mut node: NodeId,
    ) -> (NodeId, u32) {
        let mut swaps = 0;
        while let Some(parent) = self.node(node).parent {
            if !cmp.less(self.key(node), self.key(parent)) {
                break;
            }
            self.swap_contents(node, parent);
            node = parent;
            swaps += 1;
        }
        (node, swaps)
    }

    /// Moves the element at `node` all the way to its tree's root without
    /// comparing, as if it were smaller than every key. Returns the root.
    pub fn sift_to_root(&mut self, mut node: NodeId) -> NodeId {
        while let Some(parent) = self.node(node).parent {
            self.swap_contents(node, parent);
            node = parent;
        }
        node
    }

    /// Overwrites a key in place, returning the old one. The caller restores
    /// heap order.
    pub(crate) fn replace_key(&mut self, node: NodeId, key: K) -> K {
        mem::replace(&mut self.node_mut(node).key, key)
    }

    /// Height measured by walking the left spine from `root`.
    pub fn spine_height(&self, root: NodeId) -> u32 {
        let mut h = 0;
        let mut cur = root;
        while let Some(l) = self.node(cur).left {
            cur = l;
            h += 1;
        }
        h
    }

    /// Full structural check of one tree: perfectness, size, heap order,
    /// parent/child link symmetry and handle back-references. Linear time.
    /// `order` is used directly, so the check does not disturb comparison counts.
    pub fn validate<C: KeyOrder<K>>(&self, order: &C, tree: PerfectTree) -> Vec<Violation> {
        let mut out = Vec::new();
        let Some(root) = self.get(tree.root) else {
            out.push(Violation::Dangling {
                from: None,
                to: tree.root,
            });
            return out;
        };
        if root.parent.is_some() {
            out.push(Violation::RootHasParent { root: tree.root });
        }

        let mut count = 0usize;
        let mut stack = vec![(tree.root, 0u32)];
        while let Some((id, depth)) = stack.pop() {
            let node = self.node(id);
            count += 1;
            if self.handles.get(node.handle as usize).copied().flatten() != Some(id) {
                out.push(Violation::HandleBackRef { node: id });
            }
            match (node.left, node.right) {
                (None, None) => {
                    if depth != tree.height {
                        out.push(Violation::LeafDepth {
                            node: id,
                            depth,
                            height: tree.height,
                        });
                    }
                }
                (Some(l), Some(r)) => {
                    if depth >= tree.height {
                        // Too deep; stop here so corrupted cycles cannot loop.
                        out.push(Violation::LeafDepth {
                            node: id,
                            depth,
                            height: tree.height,
                        });
                        continue;
                    }
                    for child in [l, r] {
                        match self.get(child) {
                            None => out.push(Violation::Dangling {
                                from: Some(id),
                                to: child,
                            }),
                            Some(c) => {
                                if c.parent != Some(id) {
                                    out.push(Violation::ParentLink {
                                        node: child,
                                        expected: id,
                                        found: c.parent,
                                    });
                                }
                                if order.compare(&c.key, &node.key).is_lt() {
                                    out.push(Violation::HeapOrder { parent: id, child });
                                }
                                stack.push((child, depth + 1));
                            }
                        }
                    }
                }
                _ => out.push(Violation::Lopsided { node: id }),
            }
        }
        if count != tree.size() {
            out.push(Violation::Size {
                root: tree.root,
                expected: tree.size(),
                actual: count,
            });
        }
        out
    }

    /// Moves every node and handle of `other` into `self`. Handles issued by
    /// `other` (or by arenas it absorbed earlier) keep resolving here.
    /// Returns the offset to add to `other`'s node ids.
    pub(crate) fn absorb(&mut self, other: NodeArena<K, V>) -> u32 {
        let node_offset = u32::try_from(self.nodes.len()).expect("arena exceeds u32 nodes");
        let handle_offset =
            u32::try_from(self.handles.len()).expect("handle table exceeds u32 slots");
        let shift = |id: Option<NodeId>| id.map(|n| n.shifted(node_offset));

        self.nodes.extend(other.nodes.into_iter().map(|slot| {
            slot.map(|mut n| {
                n.parent = shift(n.parent);
                n.left = shift(n.left);
                n.right = shift(n.right);
                n.handle += handle_offset;
                n
            })
        }));
        self.free
            .extend(other.free.into_iter().map(|id| id.shifted(node_offset)));
        self.handles
            .extend(other.handles.into_iter().map(shift));
        self.aliases.insert(other.id, handle_offset);
        for (arena, offset) in other.aliases {
            self.aliases.insert(arena, offset + handle_offset);
        }
        self.live += other.live;
        self.link_writes += other.link_writes;
        node_offset
    }

    #[cfg(test)]
    pub(crate) fn corrupt_key(&mut self, node: NodeId, key: K) {
        self.node_mut(node).key = key;
    }

    #[cfg(test)]
    pub(crate) fn corrupt_cut_children(&mut self, node: NodeId) {
        let n = self.node_mut(node);
        n.left = None;
        n.right = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::Natural;

    fn singletons(arena: &mut NodeArena<i32, ()>, keys: &[i32]) -> Vec<(PerfectTree, Handle)> {
        keys.iter().map(|&k| arena.make_singleton(k, ())).collect()
    }

    /// Level-order perfect heap built from sorted keys (sorted order is a valid heap).
    fn sorted_tree(arena: &mut NodeArena<i32, ()>, keys: &[i32]) -> PerfectTree {
        let mut keys = keys.to_vec();
        keys.sort();
        arena
            .from_level_order(keys.into_iter().map(|k| (k, ())).collect())
            .unwrap()
            .0
    }

    #[test]
    fn singleton_is_height_zero() {
        let mut arena = NodeArena::new();
        let (t, h) = arena.make_singleton(7, ());
        assert_eq!(t.height(), 0);
        assert_eq!(t.size(), 1);
        assert_eq!(*arena.key(t.root()), 7);
        assert_eq!(arena.resolve(h), Some(t.root()));
        let (t0, _) = arena.make_singleton(0, ());
        assert_eq!(t0.size(), 1);
        assert_eq!(perfect_size(0), 1);
    }

    #[test]
    fn rearrange_three_singletons() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let s = singletons(&mut arena, &[5, 3, 9]);
        let out = arena.rearrange(&cmp, [s[0].0, s[1].0, s[2].0]).unwrap();
        assert_eq!(cmp.count(), 2);
        assert_eq!(out.big.height(), 1);
        assert_eq!(*arena.key(out.big.root()), 3);
        let (l, r) = arena.children(out.big.root());
        assert_eq!(*arena.key(l.unwrap()), 5);
        assert_eq!(*arena.key(r.unwrap()), 9);
        assert!(out.leftovers.is_none());
        assert!(arena.validate(&Natural, out.big).is_empty());
        for (_, h) in &s {
            assert!(arena.resolve(*h).is_some());
        }
    }

    #[test]
    fn rearrange_height_two_trees() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let a = sorted_tree(&mut arena, &[10, 11, 12, 13, 14, 15, 16]);
        let b = sorted_tree(&mut arena, &[2, 21, 22, 23, 24, 25, 26]);
        let c = sorted_tree(&mut arena, &[30, 31, 32, 33, 34, 35, 36]);
        let writes = arena.link_writes();
        let out = arena.rearrange(&cmp, [a, b, c]).unwrap();
        assert_eq!(cmp.count(), 2);
        assert!(arena.link_writes() - writes <= 5);
        assert_eq!(out.big.height(), 3);
        assert_eq!(out.big.size(), 15);
        assert_eq!(*arena.key(out.big.root()), 2);
        // Non-minimal trees keep argument order under the new root.
        assert_eq!(
            arena.children(out.big.root()),
            (Some(a.root()), Some(c.root()))
        );
        let [l, r] = out.leftovers.unwrap();
        assert_eq!((l.height(), r.height()), (1, 1));
        assert_eq!(l.size() + r.size() + out.big.size(), 21);
        for t in [out.big, l, r] {
            assert!(arena.validate(&Natural, t).is_empty());
        }
        // Σ heights 2+2+2 = 6 before, 3+1+1 = 5 after.
        assert_eq!(out.big.height() + l.height() + r.height(), 5);
    }

    #[test]
    fn rearrange_tie_goes_to_earliest_argument() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let s = singletons(&mut arena, &[4, 4, 8]);
        let out = arena.rearrange(&cmp, [s[0].0, s[1].0, s[2].0]).unwrap();
        assert_eq!(out.big.root(), s[0].0.root());
        let s = singletons(&mut arena, &[8, 4, 4]);
        let out = arena.rearrange(&cmp, [s[0].0, s[1].0, s[2].0]).unwrap();
        assert_eq!(out.big.root(), s[1].0.root());
    }

    #[test]
    fn rearrange_rejects_bad_inputs() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let s = singletons(&mut arena, &[1, 2]);
        let t = sorted_tree(&mut arena, &[1, 2, 3]);
        assert_eq!(
            arena.rearrange(&cmp, [s[0].0, s[1].0, t]),
            Err(TreeError::HeightMismatch([0, 0, 1]))
        );
        assert_eq!(
            arena.rearrange(&cmp, [s[0].0, s[1].0, s[0].0]),
            Err(TreeError::Aliased(s[0].0.root()))
        );
        assert_eq!(cmp.count(), 0);
    }

    #[test]
    fn split_root_detaches_children() {
        let mut arena = NodeArena::new();
        let (t, handles) = arena
            .from_level_order(vec![(1, ()), (2, ()), (3, ())])
            .unwrap();
        let split = arena.split_root(t);
        assert_eq!(split.key, 1);
        let [l, r] = split.leftovers.unwrap();
        assert_eq!((*arena.key(l.root()), *arena.key(r.root())), (2, 3));
        assert_eq!((l.height(), r.height()), (0, 0));
        assert!(arena.resolve(handles[0]).is_none());
        assert!(arena.validate(&Natural, l).is_empty());
        assert!(arena.validate(&Natural, r).is_empty());

        let (single, h) = arena.make_singleton(9, ());
        let split = arena.split_root(single);
        assert_eq!(split.key, 9);
        assert!(split.leftovers.is_none());
        assert!(arena.resolve(h).is_none());
        assert_eq!(arena.len(), 2);
    }

    #[test]
    fn split_root_of_seven_nodes_gives_two_threes() {
        let mut arena = NodeArena::new();
        let t = sorted_tree(&mut arena, &[4, 8, 15, 16, 23, 42, 7]);
        let split = arena.split_root(t);
        assert_eq!(split.key, 4);
        let [l, r] = split.leftovers.unwrap();
        assert_eq!((l.size(), r.size()), (3, 3));
        assert!(arena.validate(&Natural, l).is_empty());
        assert!(arena.validate(&Natural, r).is_empty());
    }

    #[test]
    fn sift_up_on_root_is_noop() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let t = sorted_tree(&mut arena, &[1, 2, 3]);
        assert_eq!(arena.sift_up(&cmp, t.root()), (t.root(), 0));
        assert_eq!(cmp.count(), 0);
    }

    #[test]
    fn sift_up_single_swap_moves_handles() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let (t, hs) = arena
            .from_level_order(vec![(5, 'a'), (2, 'b'), (7, 'c')])
            .unwrap();
        let left = arena.children(t.root()).0.unwrap();
        let (at, swaps) = arena.sift_up(&cmp, left);
        assert_eq!((at, swaps), (t.root(), 1));
        assert_eq!(*arena.key(t.root()), 2);
        assert_eq!(*arena.key(left), 5);
        assert_eq!(arena.resolve(hs[1]), Some(t.root()));
        assert_eq!(arena.resolve(hs[0]), Some(left));
        assert_eq!(*arena.payload(t.root()), 'b');
        assert!(arena.validate(&Natural, t).is_empty());
    }

    #[test]
    fn sift_up_from_leaf_to_root() {
        let mut arena = NodeArena::new();
        let cmp = CountingComparator::new(Natural);
        let keys: Vec<i32> = (1..=15).map(|k| k * 10).collect();
        let (t, hs) = arena
            .from_level_order(keys.iter().map(|&k| (k, ())).collect())
            .unwrap();
        let leaf = arena.resolve(hs[11]).unwrap();
        arena.replace_key(leaf, i32::MIN);
        let (at, swaps) = arena.sift_up(&cmp, leaf);
        assert_eq!(at, t.root());
        assert_eq!(swaps, 3);
        assert!(cmp.count() <= u64::from(t.height()));
        assert_eq!(*arena.key(t.root()), i32::MIN);
        assert_eq!(arena.resolve(hs[11]), Some(t.root()));
        assert!(arena.validate(&Natural, t).is_empty());
    }

    #[test]
    fn validate_reports_planted_faults() {
        let mut arena = NodeArena::new();
        let t = sorted_tree(&mut arena, &[1, 2, 3, 4, 5, 6, 7]);
        assert!(arena.validate(&Natural, t).is_empty());

        let (l, _) = arena.children(t.root());
        arena.corrupt_key(l.unwrap(), 0);
        let v = arena.validate(&Natural, t);
        assert!(v.contains(&Violation::HeapOrder {
            parent: t.root(),
            child: l.unwrap()
        }));

        let mut arena = NodeArena::new();
        let t = sorted_tree(&mut arena, &[1, 2, 3, 4, 5, 6, 7]);
        let (_, r) = arena.children(t.root());
        arena.corrupt_cut_children(r.unwrap());
        let v = arena.validate(&Natural, t);
        assert!(v.iter().any(|x| matches!(x, Violation::LeafDepth { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::Size { actual: 5, .. })));
    }

    #[test]
    fn absorb_keeps_handles_resolving() {
        let mut a: NodeArena<i32, ()> = NodeArena::new();
        let mut b = NodeArena::new();
        let mut c = NodeArena::new();
        let (_, ha) = a.make_singleton(1, ());
        let (tb, hb) = b.make_singleton(2, ());
        let (tc, hc) = c.make_singleton(3, ());
        let off_c = b.absorb(c);
        let off_b = a.absorb(b);
        assert_eq!(a.len(), 3);
        assert_eq!(*a.key(a.resolve(ha).unwrap()), 1);
        assert_eq!(a.resolve(hb), Some(tb.shifted(off_b).root()));
        assert_eq!(a.resolve(hc), Some(tc.shifted(off_c).shifted(off_b).root()));
        assert_eq!(*a.key(a.resolve(hc).unwrap()), 3);
    }
}
