use crate::base::{BaseStructure, State};
use crate::partial::{PartialRetro, RetroError};
use crate::timeline::{RetroOp, TimeKey, Timeline};

use super::{check_user_time, FullRetro, Strategy};

#[derive(Clone, Debug)]
struct Node<B: BaseStructure> {
    /// Leaves (operations) in this subtree.
    weight: usize,
    min: TimeKey,
    max: TimeKey,
    /// Partially retroactive structure over exactly this subtree's operations.
    structure: PartialRetro<B>,
    children: Option<Box<[Node<B>; 2]>>,
}

impl<B: BaseStructure> Node<B> {
    fn leaf(proto: &B, t: TimeKey, op: RetroOp<B::Entry>) -> Self {
        let mut structure = PartialRetro::new(proto.fresh());
        structure.pr_insert(t, op).expect("fresh structure");
        Node {
            weight: 1,
            min: t,
            max: t,
            structure,
            children: None,
        }
    }

    /// Child that holds (or would hold) time `t`.
    fn side(&self, t: TimeKey) -> usize {
        let children = self.children.as_ref().expect("internal node");
        usize::from(t >= children[1].min)
    }

    fn depth(&self) -> usize {
        match &self.children {
            None => 0,
            Some(c) => 1 + c[0].depth().max(c[1].depth()),
        }
    }
}

/// Whether a node of `weight` with a child of `child` leaves violates
/// `child <= alpha * weight`. An as-even-as-possible split never counts as a
/// violation, which keeps tiny nodes legal for every alpha in `(0.5, 1)`.
fn unbalanced(alpha: f64, child: usize, weight: usize) -> bool {
    child > weight.div_ceil(2) && child as f64 > alpha * weight as f64
}

/// Full retroactivity from a weight-balanced tree of partially retroactive
/// structures.
///
/// Leaves are the timeline operations in time order. A prefix query visits
/// the `O(log m)` maximal subtrees covering the prefix and threads the
/// evolving state through them: the state so far is injected at negative
/// times into the next node's structure, whose present state is then read
/// back. Unbalanced subtrees are rebuilt scapegoat-style.
#[derive(Clone, Debug)]
pub struct WbtFull<B: BaseStructure> {
    proto: B,
    alpha: f64,
    timeline: Timeline<B::Entry>,
    root: Option<Node<B>>,
    /// Total operation memberships added to or removed from node sets.
    set_changes: u64,
    rebuilds: u64,
}

impl<B: BaseStructure> WbtFull<B> {
    pub fn new(proto: &B, alpha: f64) -> Self {
        assert!(alpha > 0.5 && alpha < 1.0, "alpha must lie in (0.5, 1)");
        WbtFull {
            proto: proto.fresh(),
            alpha,
            timeline: Timeline::new(),
            root: None,
            set_changes: 0,
            rebuilds: 0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn set_changes(&self) -> u64 {
        self.set_changes
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    pub fn depth(&self) -> usize {
        self.root.as_ref().map_or(0, Node::depth)
    }

    /// Size of the present state.
    pub fn present_size(&self) -> usize {
        self.root.as_ref().map_or(0, |r| r.structure.live().size())
    }

    /// Operation counts of the root's structure and its children's, for
    /// small hand-checked trees.
    pub fn root_counts(&self) -> Option<(usize, Option<[usize; 2]>)> {
        self.root.as_ref().map(|r| {
            let kids = r
                .children
                .as_ref()
                .map(|c| [c[0].structure.len(), c[1].structure.len()]);
            (r.structure.len(), kids)
        })
    }

    fn insert_into(node: &mut Node<B>, proto: &B, t: TimeKey, op: RetroOp<B::Entry>, changes: &mut u64, path: &mut Vec<usize>) {
        if let Some(children) = node.children.as_mut() {
            let side = usize::from(t >= children[1].min);
            path.push(side);
            Self::insert_into(&mut children[side], proto, t, op.clone(), changes, path);
        } else {
            let old = Node {
                weight: 1,
                min: node.min,
                max: node.max,
                structure: node.structure.clone(),
                children: None,
            };
            let new = Node::leaf(proto, t, op.clone());
            *changes += 2;
            node.children = Some(Box::new(if t < old.min { [new, old] } else { [old, new] }));
        }
        node.structure.pr_insert(t, op).expect("time is fresh");
        *changes += 1;
        node.weight += 1;
        node.min = node.min.min(t);
        node.max = node.max.max(t);
    }

    /// Removes `t` from the subtree of an internal `node`.
    fn delete_from(node: &mut Node<B>, t: TimeKey, changes: &mut u64, path: &mut Vec<usize>) {
        let side = node.side(t);
        let children = node.children.as_mut().expect("internal node");
        if children[side].children.is_none() {
            debug_assert_eq!(children[side].min, t);
            let [left, right] = *node.children.take().expect("internal node");
            // The parent's set becomes the sibling's set.
            *changes += node.weight as u64;
            *node = if side == 0 { right } else { left };
            return;
        }
        path.push(side);
        Self::delete_from(&mut children[side], t, changes, path);
        node.structure.pr_delete(t).expect("time present in ancestor");
        *changes += 1;
        node.weight -= 1;
        node.min = children[0].min;
        node.max = children[1].max;
    }

    /// Rebuilds the highest unbalanced node along `path`.
    fn rebalance(&mut self, path: &[usize]) {
        let alpha = self.alpha;
        let Some(mut node) = self.root.as_mut() else {
            return;
        };
        let mut steps = path.iter();
        loop {
            let Some(children) = node.children.as_ref() else {
                return;
            };
            let heavy = children[0].weight.max(children[1].weight);
            if unbalanced(alpha, heavy, node.weight) {
                let built = Self::rebuild(node, &self.proto);
                self.set_changes += built;
                self.rebuilds += 1;
                return;
            }
            let Some(&side) = steps.next() else {
                return;
            };
            node = &mut node.children.as_mut().expect("internal node")[side];
        }
    }

    /// Reshapes `node`'s subtree to perfect balance, reusing its own structure
    /// and rebuilding every structure below. Returns memberships created.
    fn rebuild(node: &mut Node<B>, proto: &B) -> u64 {
        let ops: Vec<(TimeKey, RetroOp<B::Entry>)> = node
            .structure
            .timeline()
            .iter()
            .map(|(t, op)| (*t, op.clone()))
            .collect();
        let mid = ops.len().div_ceil(2);
        let mut built = 0;
        let left = Self::build(&ops[..mid], proto, &mut built);
        let right = Self::build(&ops[mid..], proto, &mut built);
        node.children = Some(Box::new([left, right]));
        built
    }

    fn build(ops: &[(TimeKey, RetroOp<B::Entry>)], proto: &B, built: &mut u64) -> Node<B> {
        *built += ops.len() as u64;
        if let [(t, op)] = ops {
            return Node::leaf(proto, *t, op.clone());
        }
        let mid = ops.len().div_ceil(2);
        let left = Self::build(&ops[..mid], proto, built);
        let right = Self::build(&ops[mid..], proto, built);
        let mut structure = left.structure.clone();
        for (t, op) in &ops[mid..] {
            structure.pr_insert(*t, op.clone()).expect("halves are disjoint");
        }
        Node {
            weight: ops.len(),
            min: left.min,
            max: right.max,
            structure,
            children: Some(Box::new([left, right])),
        }
    }

    /// Maximal subtrees whose leaves are all `<= t`, in time order.
    fn canonical<'a>(node: &'a mut Node<B>, t: TimeKey, out: &mut Vec<&'a mut Node<B>>) {
        if node.max <= t {
            out.push(node);
            return;
        }
        if node.min > t {
            return;
        }
        let children = node.children.as_deref_mut().expect("a leaf is either inside or outside");
        let [left, right] = children;
        Self::canonical(left, t, out);
        Self::canonical(right, t, out);
    }

    /// Number of canonical nodes for a prefix query at `t`.
    pub fn canonical_count(&mut self, t: TimeKey) -> usize {
        let mut nodes = Vec::new();
        if let Some(root) = self.root.as_mut() {
            Self::canonical(root, t, &mut nodes);
        }
        nodes.len()
    }

    fn check_node(&self, node: &Node<B>, path: &mut String) -> Result<(), String> {
        if node.structure.len() != node.weight {
            return Err(format!("node {path}: structure holds {} ops, weight {}", node.structure.len(), node.weight));
        }
        if node.structure.timeline().first_time() != Some(node.min)
            || node.structure.timeline().last_time() != Some(node.max)
        {
            return Err(format!("node {path}: time range out of sync"));
        }
        let Some(children) = node.children.as_ref() else {
            return if node.weight == 1 {
                Ok(())
            } else {
                Err(format!("leaf {path} has weight {}", node.weight))
            };
        };
        if children[0].weight + children[1].weight != node.weight {
            return Err(format!("node {path}: child weights do not sum"));
        }
        if children[0].max >= children[1].min {
            return Err(format!("node {path}: children out of time order"));
        }
        for c in children.iter() {
            if unbalanced(self.alpha, c.weight, node.weight) {
                return Err(format!(
                    "node {path}: child weight {} exceeds alpha * {}",
                    c.weight, node.weight
                ));
            }
        }
        for (bit, c) in ['0', '1'].into_iter().zip(children.iter()) {
            path.push(bit);
            self.check_node(c, path)?;
            path.pop();
        }
        Ok(())
    }

    fn collect_states(node: &Node<B>, out: &mut Vec<State<B::Entry>>) {
        out.push(node.structure.pr_extract_state());
        if let Some(c) = &node.children {
            Self::collect_states(&c[0], out);
            Self::collect_states(&c[1], out);
        }
    }
}

impl<B: BaseStructure> FullRetro<B> for WbtFull<B> {
    fn strategy(&self) -> Strategy {
        Strategy::Wbt
    }

    fn fr_insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        check_user_time(t)?;
        B::check_list(op.list)?;
        self.timeline.insert_op(t, op.clone())?;
        let mut path = Vec::new();
        match self.root.as_mut() {
            None => {
                self.root = Some(Node::leaf(&self.proto, t, op));
                self.set_changes += 1;
            }
            Some(root) => Self::insert_into(root, &self.proto, t, op, &mut self.set_changes, &mut path),
        }
        self.rebalance(&path);
        Ok(())
    }

    fn fr_delete(&mut self, t: TimeKey) -> Result<RetroOp<B::Entry>, RetroError> {
        let op = self.timeline.delete_op(t)?;
        let root = self.root.as_mut().expect("non-empty timeline has a root");
        let mut path = Vec::new();
        if root.children.is_none() {
            self.root = None;
            self.set_changes += 1;
        } else {
            Self::delete_from(root, t, &mut self.set_changes, &mut path);
        }
        self.rebalance(&path);
        Ok(op)
    }

    fn fr_query(&mut self, t: TimeKey) -> B::Value {
        let mut nodes = Vec::new();
        if let Some(root) = self.root.as_mut() {
            Self::canonical(root, t, &mut nodes);
        }
        let Some(last) = nodes.len().checked_sub(1) else {
            return self.proto.fresh().eval();
        };
        let mut state: State<B::Entry> = State::empty();
        let mut answer = None;
        for (i, node) in nodes.into_iter().enumerate() {
            let d = &mut node.structure;
            let injected: Vec<TimeKey> = (1..=state.n() as i64).map(|k| TimeKey(-k)).collect();
            for (key, (list, index, e)) in injected.iter().zip(state.entries()) {
                d.pr_insert(*key, RetroOp::set(*list, *index, Some(e.clone())))
                    .expect("negative times are free in node structures");
            }
            if i == last {
                answer = Some(d.pr_query_present());
            } else {
                state = d.pr_extract_state();
            }
            for key in injected {
                d.pr_delete(key).expect("injected above");
            }
        }
        answer.expect("last node answers")
    }

    fn timeline(&self) -> &Timeline<B::Entry> {
        &self.timeline
    }

    fn internal_states(&self) -> Vec<State<B::Entry>> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            Self::collect_states(root, &mut out);
        }
        out
    }

    fn check_invariants(&self) -> Result<(), String> {
        match &self.root {
            None if self.timeline.is_empty() => Ok(()),
            None => Err("empty tree over a non-empty timeline".into()),
            Some(root) => {
                if root.weight != self.timeline.len() {
                    return Err(format!("root weight {} != m {}", root.weight, self.timeline.len()));
                }
                self.check_node(root, &mut String::from("r"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::MinPlusSum;

    fn set(list: usize, v: i64) -> RetroOp<i64> {
        RetroOp::set(list, 0, Some(v))
    }

    #[test]
    fn three_ops_containment() {
        let mut w = WbtFull::new(&MinPlusSum::new(), 2.0 / 3.0);
        for t in 1..=3 {
            w.fr_insert(TimeKey(t), set(1, t)).unwrap();
        }
        let (root, kids) = w.root_counts().unwrap();
        assert_eq!(root, 3);
        let kids = kids.unwrap();
        assert_eq!(kids[0] + kids[1], 3);
        w.check_invariants().unwrap();
    }

    #[test]
    fn hand_trace() {
        let mut w = WbtFull::new(&MinPlusSum::new(), 2.0 / 3.0);
        w.fr_insert(TimeKey(1), set(1, 0)).unwrap();
        w.fr_insert(TimeKey(2), set(2, 3)).unwrap();
        w.fr_insert(TimeKey(3), set(2, 1)).unwrap();
        let before = w.internal_states();
        assert_eq!(w.fr_query(TimeKey(2)), Some(3));
        assert_eq!(w.fr_query(TimeKey(3)), Some(1));
        assert_eq!(w.fr_query(TimeKey(1)), None);
        assert_eq!(w.fr_query(TimeKey(0)), None);
        assert_eq!(w.internal_states(), before);
    }

    #[test]
    fn delete_to_empty() {
        let mut w = WbtFull::new(&MinPlusSum::new(), 2.0 / 3.0);
        w.fr_insert(TimeKey(4), set(1, 0)).unwrap();
        w.fr_delete(TimeKey(4)).unwrap();
        assert_eq!(w.depth(), 0);
        assert_eq!(w.fr_query(TimeKey(10)), None);
        w.check_invariants().unwrap();
    }

    #[test]
    fn sequential_inserts_stay_balanced() {
        let mut w = WbtFull::new(&MinPlusSum::new(), 2.0 / 3.0);
        for t in 0..500 {
            w.fr_insert(TimeKey(t), RetroOp::set(1, (t % 7) as usize, Some(t))).unwrap();
            w.check_invariants().unwrap();
        }
        assert!(w.rebuilds() > 0);
        // A 2/3-balanced tree on 500 leaves has depth <= log_{3/2}(500) + 1.
        assert!(w.depth() <= 17, "depth {}", w.depth());
        for t in (0..500).step_by(3) {
            w.fr_delete(TimeKey(t)).unwrap();
            w.check_invariants().unwrap();
        }
    }

    #[test]
    fn unbalanced_predicate() {
        let a = 2.0 / 3.0;
        assert!(!unbalanced(a, 1, 2));
        assert!(!unbalanced(a, 2, 3));
        assert!(unbalanced(a, 3, 4));
        assert!(!unbalanced(0.55, 2, 3));
        assert!(unbalanced(0.55, 4, 6));
    }
}
