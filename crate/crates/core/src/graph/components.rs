use super::digraph::DiGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct ComponentSummary {
    pub count: usize,
    pub largest: usize,
}

impl ComponentSummary {
    fn from_labels(labels: &[u32], count: usize) -> Self {
        let mut sizes = vec![0usize; count];
        for &l in labels {
            sizes[l as usize] += 1;
        }
        ComponentSummary {
            count,
            largest: sizes.into_iter().max().unwrap_or(0),
        }
    }
}

/// Strongly connected component label per node (Tarjan, explicit stack).
/// Returns `(labels, component_count)`.
pub fn scc_labels(g: &DiGraph) -> (Vec<u32>, usize) {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut label = vec![UNVISITED; n];
    let mut stack: Vec<u32> = Vec::new();
    // (node, next successor position)
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(top) = call.last_mut() {
            let u = top.0;
            let succ = g.successors(u);
            if let Some(&v) = succ.get(top.1) {
                top.1 += 1;
                let vi = v as usize;
                if index[vi] == UNVISITED {
                    index[vi] = next_index;
                    low[vi] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[vi] = true;
                    call.push((v, 0));
                } else if on_stack[vi] {
                    low[u as usize] = low[u as usize].min(index[vi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[u as usize]);
            }
            if low[u as usize] == index[u as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component root");
                    on_stack[w as usize] = false;
                    label[w as usize] = count;
                    if w == u {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (label, count as usize)
}

pub fn scc(g: &DiGraph) -> ComponentSummary {
    let (labels, count) = scc_labels(g);
    ComponentSummary::from_labels(&labels, count)
}

struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Weakly connected component label per node (union-find on the undirected projection).
pub fn wcc_labels(g: &DiGraph) -> (Vec<u32>, usize) {
    let n = g.node_count();
    let mut ds = DisjointSet::new(n);
    for (u, v, _) in g.edges() {
        ds.union(u, v);
    }
    let mut remap = vec![u32::MAX; n];
    let mut count = 0u32;
    let labels = (0..n as u32)
        .map(|u| {
            let r = ds.find(u) as usize;
            if remap[r] == u32::MAX {
                remap[r] = count;
                count += 1;
            }
            remap[r]
        })
        .collect();
    (labels, count as usize)
}

pub fn wcc(g: &DiGraph) -> ComponentSummary {
    let (labels, count) = wcc_labels(g);
    ComponentSummary::from_labels(&labels, count)
}
