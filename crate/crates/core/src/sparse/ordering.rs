//! Fill-reducing column ordering by recursive level-set nested dissection.

use alloc::vec;
use alloc::vec::Vec;

use super::Csr;

const LEAF_SIZE: usize = 200;

struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    // symmetrized pattern of A without the diagonal
    fn from_pattern(a: &Csr) -> Graph {
        let n = a.nrows;
        let t = a.transpose();
        let mut ptr = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(2 * a.nnz());
        ptr.push(0);
        for i in 0..n {
            let (ca, _) = a.row(i);
            let (ct, _) = t.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < ct.len() {
                let next = match (ca.get(p), ct.get(q)) {
                    (Some(&x), Some(&y)) if x == y => {
                        p += 1;
                        q += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        p += 1;
                        x
                    }
                    (Some(&x), None) => {
                        p += 1;
                        x
                    }
                    (_, Some(&y)) => {
                        q += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                if next != i {
                    adj.push(next);
                }
            }
            ptr.push(adj.len());
        }
        Graph { ptr, adj }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }
}

struct Workspace {
    // region stamp of each vertex; only vertices carrying the current stamp are visible
    region: Vec<u32>,
    level: Vec<usize>,
    next_stamp: u32,
}

impl Workspace {
    fn stamp(&mut self, verts: &[usize]) -> u32 {
        self.next_stamp += 1;
        for &v in verts {
            self.region[v] = self.next_stamp;
        }
        self.next_stamp
    }

    // BFS restricted to `stamp`; returns vertices in visit order and level offsets
    fn bfs(&mut self, g: &Graph, root: usize, stamp: u32) -> (Vec<usize>, Vec<usize>) {
        let mut order = vec![root];
        let mut offsets = vec![0];
        self.level[root] = 0;
        let visited = stamp.wrapping_add(u32::MAX / 2);
        self.region[root] = visited;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in g.neighbors(v) {
                if self.region[w] == stamp {
                    self.region[w] = visited;
                    self.level[w] = self.level[v] + 1;
                    if self.level[w] == offsets.len() {
                        offsets.push(order.len());
                    }
                    order.push(w);
                }
            }
        }
        offsets.push(order.len());
        // restore the stamp so later searches see these vertices again
        for &v in &order {
            self.region[v] = stamp;
        }
        (order, offsets)
    }
}

/// Fill-reducing elimination order for the pattern of `a + aᵀ`.
///
/// Returns `q` with `q[k]` the index eliminated at step `k`. Within each
/// leaf and separator, vertices are stably sorted by `priority` (lower
/// first), which lets callers eliminate e.g. stiff primal unknowns before
/// the multiplier-like ones that couple to them.
pub fn nested_dissection(a: &Csr, priority: Option<&[u8]>) -> Vec<usize> {
    assert_eq!(a.nrows, a.ncols);
    let n = a.nrows;
    let g = Graph::from_pattern(a);
    let mut ws = Workspace { region: vec![0; n], level: vec![0; n], next_stamp: 0 };
    let mut out = Vec::with_capacity(n);
    let all: Vec<usize> = (0..n).collect();
    dissect(&g, &mut ws, all, priority, &mut out);
    debug_assert_eq!(out.len(), n);
    out
}

fn emit(mut verts: Vec<usize>, priority: Option<&[u8]>, out: &mut Vec<usize>) {
    if let Some(p) = priority {
        verts.sort_by_key(|&v| p[v]);
    }
    out.extend(verts);
}

fn dissect(g: &Graph, ws: &mut Workspace, verts: Vec<usize>, priority: Option<&[u8]>, out: &mut Vec<usize>) {
    if verts.is_empty() {
        return;
    }
    let stamp = ws.stamp(&verts);
    let (first, offsets) = ws.bfs(g, verts[0], stamp);
    if first.len() < verts.len() {
        // disconnected: handle each component on its own
        let mut components = vec![first];
        let done = ws.stamp(&components[0]);
        for &v in &verts {
            if ws.region[v] == stamp {
                let (comp, _) = ws.bfs(g, v, stamp);
                for &w in &comp {
                    ws.region[w] = done;
                }
                components.push(comp);
            }
        }
        for comp in components {
            dissect(g, ws, comp, priority, out);
        }
        return;
    }
    if verts.len() <= LEAF_SIZE {
        leaf_order(first, priority, out);
        return;
    }
    // pseudo-peripheral root: repeat BFS from the last vertex while depth grows
    let (mut order, mut offsets) = (first, offsets);
    for _ in 0..4 {
        let far = *order.last().unwrap();
        let (o2, off2) = ws.bfs(g, far, stamp);
        let grew = off2.len() > offsets.len();
        order = o2;
        offsets = off2;
        if !grew {
            break;
        }
    }
    let nlev = offsets.len() - 1;
    if nlev < 3 {
        leaf_order(order, priority, out);
        return;
    }
    let half = order.len() / 2;
    let mut m = 1;
    while m < nlev - 1 && offsets[m + 1] <= half {
        m += 1;
    }
    let part_a: Vec<usize> = order[..offsets[m]].to_vec();
    let mut sep: Vec<usize> = order[offsets[m]..offsets[m + 1]].to_vec();
    let part_b: Vec<usize> = order[offsets[m + 1]..].to_vec();
    // separator vertices with no neighbour beyond the separator join part A
    let mut part_a = part_a;
    let b_stamp = ws.stamp(&part_b);
    sep.retain(|&v| {
        let touches_b = g.neighbors(v).iter().any(|&w| ws.region[w] == b_stamp);
        if !touches_b {
            part_a.push(v);
        }
        touches_b
    });
    dissect(g, ws, part_a, priority, out);
    dissect(g, ws, part_b, priority, out);
    emit(sep, priority, out);
}

// reversed BFS order of a small connected region
fn leaf_order(order: Vec<usize>, priority: Option<&[u8]>, out: &mut Vec<usize>) {
    let mut v = order;
    v.reverse();
    emit(v, priority, out);
}
