use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use super::{PathResult, RoadNetwork, RoutingError};
use crate::model::{Location, VertexId};

const NONE: u32 = u32::MAX;

/// Compressed adjacency view of a [`RoadNetwork`].
///
/// Parallel edges collapse to the fastest one (then the shortest).
#[derive(Debug, Clone)]
pub struct RoadGraph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, u32>,
    offsets: Vec<usize>,
    arcs: Vec<Arc>,
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: u32,
    meters: u64,
    seconds: u64,
}

/// Fastest-path tree from one source, ties broken by fewer edges and then by
/// the lexicographically smallest vertex-id sequence.
#[derive(Debug, Clone)]
pub struct SpTree {
    source: u32,
    seconds: Vec<u64>,
    meters: Vec<u64>,
    hops: Vec<u32>,
    pred: Vec<u32>,
}

impl RoadGraph {
    pub fn new(net: &RoadNetwork) -> Self {
        let mut ids: Vec<VertexId> = net.vertices.iter().map(|v| v.vertex_id).collect();
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<VertexId, u32> =
            ids.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();

        let mut best: HashMap<(u32, u32), (u64, u64)> = HashMap::new();
        for e in &net.edges {
            let (Some(&a), Some(&b)) = (index.get(&e.from), index.get(&e.to)) else {
                continue;
            };
            let w = (e.travel_seconds as u64, e.distance_meters as u64);
            best.entry((a, b))
                .and_modify(|cur| *cur = (*cur).min(w))
                .or_insert(w);
        }
        let mut flat: Vec<((u32, u32), (u64, u64))> = best.into_iter().collect();
        flat.sort_unstable();

        let mut offsets = vec![0usize; ids.len() + 1];
        for ((a, _), _) in &flat {
            offsets[*a as usize + 1] += 1;
        }
        for i in 0..ids.len() {
            offsets[i + 1] += offsets[i];
        }
        let arcs = flat
            .into_iter()
            .map(|((_, b), (s, m))| Arc {
                to: b,
                meters: m,
                seconds: s,
            })
            .collect();
        Self {
            ids,
            index,
            offsets,
            arcs,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    fn idx(&self, v: VertexId) -> Result<u32, RoutingError> {
        self.index
            .get(&v)
            .copied()
            .ok_or(RoutingError::UnknownVertex(v))
    }

    fn arcs(&self, u: u32) -> &[Arc] {
        &self.arcs[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn tree_from(&self, source: VertexId) -> Result<SpTree, RoutingError> {
        let s = self.idx(source)?;
        let n = self.ids.len();
        let mut t = SpTree {
            source: s,
            seconds: vec![u64::MAX; n],
            meters: vec![u64::MAX; n],
            hops: vec![u32::MAX; n],
            pred: vec![NONE; n],
        };
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        t.seconds[s as usize] = 0;
        t.meters[s as usize] = 0;
        t.hops[s as usize] = 0;
        heap.push(Reverse((0u64, 0u32, s)));

        while let Some(Reverse((secs, hops, u))) = heap.pop() {
            let ui = u as usize;
            if settled[ui] || (secs, hops) != (t.seconds[ui], t.hops[ui]) {
                continue;
            }
            settled[ui] = true;
            for a in self.arcs(u) {
                let vi = a.to as usize;
                if settled[vi] {
                    continue;
                }
                let cand = (secs + a.seconds, hops + 1);
                let cur = (t.seconds[vi], t.hops[vi]);
                let take = match cand.cmp(&cur) {
                    Ordering::Less => true,
                    Ordering::Equal => self.lex_less(&t, u, t.pred[vi]),
                    Ordering::Greater => false,
                };
                if take {
                    let improved = cand < cur;
                    t.seconds[vi] = cand.0;
                    t.hops[vi] = cand.1;
                    t.meters[vi] = t.meters[ui] + a.meters;
                    t.pred[vi] = u;
                    if improved {
                        heap.push(Reverse((cand.0, cand.1, a.to)));
                    }
                }
            }
        }
        Ok(t)
    }

    /// Whether the tree path to `a` is lexicographically smaller (by vertex
    /// id) than the path to `b`. Both paths have the same number of edges.
    fn lex_less(&self, t: &SpTree, a: u32, b: u32) -> bool {
        let (mut x, mut y) = (a, b);
        let mut verdict = false;
        while x != NONE && y != NONE {
            if x != y {
                verdict = self.ids[x as usize] < self.ids[y as usize];
            }
            x = t.pred[x as usize];
            y = t.pred[y as usize];
        }
        verdict
    }

    /// `(seconds, meters)` of the tree path to `target`, if reachable.
    pub fn leg(&self, tree: &SpTree, target: VertexId) -> Option<(u64, u64)> {
        let i = *self.index.get(&target)? as usize;
        (tree.seconds[i] != u64::MAX).then(|| (tree.seconds[i], tree.meters[i]))
    }

    pub fn path(&self, tree: &SpTree, target: VertexId) -> Result<PathResult, RoutingError> {
        let ti = self.idx(target)?;
        let i = ti as usize;
        if tree.seconds[i] == u64::MAX {
            return Err(RoutingError::Unreachable {
                from: self.ids[tree.source as usize],
                to: target,
            });
        }
        let mut path = Vec::new();
        let mut cur = ti;
        while cur != NONE {
            path.push(self.ids[cur as usize]);
            cur = tree.pred[cur as usize];
        }
        path.reverse();
        Ok(PathResult {
            distance_meters: tree.meters[i],
            travel_seconds: tree.seconds[i],
            path,
        })
    }
}

impl SpTree {
    pub fn source_index(&self) -> u32 {
        self.source
    }
}

/// Fastest road path between two locations.
pub fn shortest_path(
    net: &RoadNetwork,
    o: &Location,
    d: &Location,
) -> Result<PathResult, RoutingError> {
    let g = RoadGraph::new(net);
    g.idx(d.vertex_id)?;
    let tree = g.tree_from(o.vertex_id)?;
    g.path(&tree, d.vertex_id)
}
